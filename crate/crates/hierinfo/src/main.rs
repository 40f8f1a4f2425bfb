//! Thin command-line front end over the library's experiment drivers.
//!
//! Exit codes: 0 success, 1 usage, 2 data/validation error,
//! 3 a Monte-Carlo estimate failed to converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hierinfo::experiments::{
    ccdf_rows, compare, curve_header, null_curve_rows, null_curves, read_hp, read_table,
    run_cluster, scan_triangle, shuffle_decay, shuffle_decay_rows, validate_ccdf_csv,
    validate_columns, validate_curve_table, write_cluster_outputs, write_hpl, write_table,
    CompareOptions,
};
use hierinfo::genpart::{enum_hier_partitions, random_hier_partition};
use hierinfo::infotheory::{MeanKind, PairMeasure};
use hierinfo::nullmodel::{EhmiParams, RngSeed};

#[derive(Parser)]
#[command(name = "hierinfo", version, about = "Information-theoretic comparison of hierarchical partitions")]
struct Cli {
    /// RNG seed for every randomized command.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Display entropies in bits instead of nats (compare only; CSV
    /// artifacts always store nats).
    #[arg(long, global = true)]
    bits: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All pairwise measures for two partitions given as .hp files.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Also print the per-level HMI/HVI decomposition.
        #[arg(long)]
        levels: bool,
        /// Mean used by NHMI and AHMI.
        #[arg(long, default_value = "arithmetic", value_parser = ["arithmetic", "geometric", "max", "min"])]
        mean: String,
        /// Also estimate the EHMI and report the adjusted HMI.
        #[arg(long)]
        ahmi: bool,
        #[arg(long, default_value_t = 100_000)]
        max_samples: u64,
        /// Relative SEM stopping target for the EHMI estimate.
        #[arg(long, default_value_t = 0.01)]
        rel_sem: f64,
    },
    /// Exhaustive triangle-defect scan over all partitions of {1..n}.
    ScanTriangle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "hvi", value_parser = ["hvi", "dn"])]
        measure: String,
        /// Histogram cells of the CCDF.
        #[arg(long, default_value_t = 256)]
        bins: usize,
    },
    /// Chance-similarity curves over random pairs: mean HMI, HE, EHMI,
    /// EHMI(T,T) and the EHMI/HE ratio per size.
    NullCurves {
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 16, 32, 64, 128])]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 100_000)]
        max_samples: u64,
    },
    /// Decay of HMI and AHMI when k element identities are shuffled.
    ShuffleDecay {
        #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64])]
        ns: Vec<usize>,
        /// Random partitions drawn per size.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        max_samples: u64,
    },
    /// Write all hierarchical partitions of {1..n} to an .hpl file.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Write random hierarchical partitions to an .hpl file.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Completion-ensemble clustering of a boolean dataset with missing
    /// values; writes ensemble.hpl, eccentricity.csv, central.hp and
    /// vertex_stats.csv.
    Cluster {
        data: PathBuf,
        /// Merge-height tolerance for collapsing degenerate splits.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

enum Outcome {
    Done,
    NonConverged,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NonConverged) => {
            eprintln!("warning: a Monte-Carlo estimate did not reach its SEM target");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn meta(cli_seed: u64, cmd: &str, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut out = vec![
        ("cmd".to_string(), cmd.to_string()),
        ("seed".to_string(), cli_seed.to_string()),
        (
            "threads".to_string(),
            rayon::current_num_threads().to_string(),
        ),
    ];
    for (k, v) in extra {
        out.push((k.to_string(), v.clone()));
    }
    out
}

fn join(ns: &[usize]) -> String {
    ns.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn run(cli: Cli) -> hierinfo::Result<Outcome> {
    let seed = RngSeed::new(cli.seed);
    match cli.command {
        Command::Compare {
            file_a,
            file_b,
            levels,
            mean,
            ahmi,
            max_samples,
            rel_sem,
        } => {
            let a = read_hp(&file_a)?;
            let b = read_hp(&file_b)?;
            let opts = CompareOptions {
                mean: mean.parse::<MeanKind>().expect("validated by clap"),
                with_ahmi: ahmi,
                ehmi: EhmiParams {
                    rel_sem_target: rel_sem,
                    max_samples,
                    ..EhmiParams::default()
                },
                seed,
            };
            let report = compare(&a, &b, &opts)?;
            print!("{}", report.render(cli.bits, levels));
            if report.nonconverged() {
                return Ok(Outcome::NonConverged);
            }
            Ok(Outcome::Done)
        }
        Command::ScanTriangle { n, measure, bins } => {
            let pair_measure = measure.parse::<PairMeasure>().expect("validated by clap");
            let scan = scan_triangle(n, pair_measure, bins)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("ccdf_{measure}_n{n}.csv"));
            let extra = [
                ("n", n.to_string()),
                ("measure", measure.clone()),
                ("bins", bins.to_string()),
                ("triples", scan.n_triples.to_string()),
                ("min_delta", format!("{:.9}", scan.min.delta)),
                ("min_triple", format!("{}|{}|{}", scan.min.t, scan.min.s, scan.min.r)),
                ("max_delta", format!("{:.9}", scan.max.delta)),
                ("max_triple", format!("{}|{}|{}", scan.max.t, scan.max.s, scan.max.r)),
            ];
            write_table(
                &path,
                &meta(cli.seed, "scan-triangle", &extra),
                &["x", "ccdf"],
                &ccdf_rows(&scan.ccdf),
            )?;
            validate_ccdf_csv(&read_table(&path)?)?;
            println!(
                "scanned {} triples over {} partitions of n={}",
                scan.n_triples, scan.n_partitions, n
            );
            println!("min delta {:.6} at ({}, {}, {})", scan.min.delta, scan.min.t, scan.min.s, scan.min.r);
            println!("max delta {:.6} at ({}, {}, {})", scan.max.delta, scan.max.t, scan.max.s, scan.max.r);
            println!("wrote {}", path.display());
            Ok(Outcome::Done)
        }
        Command::NullCurves {
            ns,
            pairs,
            max_samples,
        } => {
            let params = EhmiParams {
                max_samples,
                ..EhmiParams::default()
            };
            let points = null_curves(&ns, pairs, seed, &params);
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("null_curves.csv");
            let extra = [("ns", join(&ns)), ("pairs", pairs.to_string())];
            write_table(
                &path,
                &meta(cli.seed, "null-curves", &extra),
                &curve_header(),
                &null_curve_rows(&points),
            )?;
            validate_curve_table(&read_table(&path)?)?;
            for p in &points {
                println!(
                    "n={:<4} <HMI>={:.4} <HE>={:.4} <EHMI>={:.4} ratio={:.3}",
                    p.n, p.mean_hmi, p.mean_he, p.mean_ehmi, p.ratio
                );
            }
            println!("wrote {}", path.display());
            if points.iter().map(|p| p.nonconverged).sum::<usize>() > 0 {
                return Ok(Outcome::NonConverged);
            }
            Ok(Outcome::Done)
        }
        Command::ShuffleDecay {
            ns,
            samples,
            max_samples,
        } => {
            let params = EhmiParams {
                max_samples,
                ..EhmiParams::default()
            };
            let result = shuffle_decay(&ns, samples, seed, &params);
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("shuffle_decay.csv");
            let extra = [("ns", join(&ns)), ("samples", samples.to_string())];
            write_table(
                &path,
                &meta(cli.seed, "shuffle-decay", &extra),
                &curve_header(),
                &shuffle_decay_rows(&result),
            )?;
            validate_curve_table(&read_table(&path)?)?;
            println!("wrote {}", path.display());
            if result.nonconverged > 0 {
                return Ok(Outcome::NonConverged);
            }
            Ok(Outcome::Done)
        }
        Command::Enumerate { n } => {
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("enumerate_n{n}.hpl"));
            let partitions: Vec<_> = enum_hier_partitions(n).collect();
            write_hpl(
                &path,
                partitions.iter(),
                &meta(cli.seed, "enumerate", &[("n", n.to_string())]),
            )?;
            println!("{} partitions -> {}", partitions.len(), path.display());
            Ok(Outcome::Done)
        }
        Command::Random { n, count } => {
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join(format!("random_n{n}.hpl"));
            let mut rng = seed.rng();
            let partitions: Vec<_> = (0..count)
                .map(|_| random_hier_partition(n, &mut rng))
                .collect();
            write_hpl(
                &path,
                partitions.iter(),
                &meta(
                    cli.seed,
                    "random",
                    &[("n", n.to_string()), ("count", count.to_string())],
                ),
            )?;
            println!("{count} partitions -> {}", path.display());
            Ok(Outcome::Done)
        }
        Command::Cluster { data, tol } => {
            let fm = hierinfo::cluster::load_dataset(&data)?;
            let run = run_cluster(&fm, tol)?;
            let extra = [
                ("data", data.display().to_string()),
                ("tol", format!("{tol:e}")),
                ("members", run.ensemble.members.len().to_string()),
                ("central_index", run.central_index.to_string()),
            ];
            let written =
                write_cluster_outputs(&run, &cli.out, &meta(cli.seed, "cluster", &extra))?;
            println!(
                "ensemble of {} members; central member {}",
                run.ensemble.members.len(),
                run.central_index
            );
            println!("central: {}", run.central.serialize());
            let bits = &run.ensemble.members[run.central_index].completion_bits;
            for (&(row, col), &bit) in run.missing.iter().zip(bits) {
                println!(
                    "inferred {}.{} = {}",
                    fm.label(row),
                    fm.column(col),
                    bit as u8
                );
            }
            for path in written {
                println!("wrote {}", path.display());
            }
            // The eccentricity table doubles as the machine-readable
            // summary; make sure it round-trips.
            validate_columns(
                &read_table(&cli.out.join("eccentricity.csv"))?,
                &["index", "completion_bits", "eccentricity"],
            )?;
            Ok(Outcome::Done)
        }
    }
}
