//! Experiment drivers and file I/O for the command-line harness.
//!
//! Every driver is a pure library function returning plain data; the CSV
//! writers stamp a `#`-prefixed header comment carrying the library
//! version, the seed and the run parameters, and every table written here
//! can be read back and schema-checked with [`read_table`] and the
//! `validate_*` functions.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cluster::{
    build_ensemble_with, central, eccentricity, vertex_stats, Ensemble, FeatureMatrix, NodeStats,
};
use crate::error::{Error, Result};
use crate::genpart::{enum_hier_partitions, random_hier_partition};
use crate::hpart::HierPartition;
use crate::infotheory::{
    hce, hentropy, hje, hmi_levels, hmi_recursive, hvi, nhmi, MeanKind, MeasureReport, PairMeasure,
};
use crate::nullmodel::{adjusted_from_estimate, ehmi, shuffle_k, EhmiEstimate, EhmiParams, RngSeed};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest universe size accepted by the exhaustive triangle scan; the
/// number of triples grows super-exponentially beyond it.
pub const MAX_SCAN_N: usize = 5;

// ---------------------------------------------------------------------------
// compare

#[derive(Clone, Copy, Debug)]
pub struct CompareOptions {
    pub mean: MeanKind,
    pub with_ahmi: bool,
    pub ehmi: EhmiParams,
    pub seed: RngSeed,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            mean: MeanKind::Arithmetic,
            with_ahmi: false,
            ehmi: EhmiParams::default(),
            seed: RngSeed::new(0),
        }
    }
}

#[derive(Clone, Debug)]
pub enum AhmiReport {
    NotRequested,
    /// The adjustment denominator vanished; only the EHMI is reported.
    Degenerate(EhmiEstimate),
    Value { value: f64, estimate: EhmiEstimate },
}

impl AhmiReport {
    fn estimate(&self) -> Option<&EhmiEstimate> {
        match self {
            AhmiReport::NotRequested => None,
            AhmiReport::Degenerate(est) | AhmiReport::Value { estimate: est, .. } => Some(est),
        }
    }
}

/// Every pairwise measure for two partitions of the same universe.
#[derive(Clone, Debug)]
pub struct CompareReport {
    pub n: usize,
    pub hmi: MeasureReport,
    pub he_a: f64,
    pub he_b: f64,
    pub hje: f64,
    pub hce_ab: f64,
    pub hce_ba: f64,
    pub hvi: MeasureReport,
    /// None when both entropies are zero under the chosen mean.
    pub nhmi: Option<f64>,
    pub mean: MeanKind,
    pub dn: f64,
    pub ahmi: AhmiReport,
    /// Seed and sampling controls behind the AHMI estimate.
    pub seed: RngSeed,
    pub ehmi_params: EhmiParams,
}

pub fn compare(
    a: &HierPartition,
    b: &HierPartition,
    opts: &CompareOptions,
) -> Result<CompareReport> {
    let hmi = hmi_levels(a, b)?;
    let hvi_report = hvi(a, b)?;
    let nhmi_value = match nhmi(a, b, opts.mean) {
        Ok(v) => Some(v),
        Err(Error::DegenerateDenominator(_)) => None,
        Err(e) => return Err(e),
    };
    let ahmi_report = if opts.with_ahmi {
        let mut rng = opts.seed.rng();
        let estimate = ehmi(a, b, &opts.ehmi, &mut rng)?;
        let i = hmi_recursive(a, b)?;
        match adjusted_from_estimate(i, hentropy(a), hentropy(b), opts.mean, &estimate, a == b) {
            Ok(value) => AhmiReport::Value { value, estimate },
            Err(Error::DegenerateDenominator(_)) => AhmiReport::Degenerate(estimate),
            Err(e) => return Err(e),
        }
    } else {
        AhmiReport::NotRequested
    };
    Ok(CompareReport {
        n: a.n(),
        hmi,
        he_a: hentropy(a),
        he_b: hentropy(b),
        hje: hje(a, b)?,
        hce_ab: hce(a, b)?,
        hce_ba: hce(b, a)?,
        hvi: hvi_report,
        nhmi: nhmi_value,
        mean: opts.mean,
        dn: crate::infotheory::dn(a, b)?,
        ahmi: ahmi_report,
        seed: opts.seed,
        ehmi_params: opts.ehmi,
    })
}

impl CompareReport {
    /// Plain-text rendering; with `bits` every entropy-like quantity is
    /// divided by ln 2 (dimensionless ratios are left untouched).
    pub fn render(&self, bits: bool, levels: bool) -> String {
        let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
        let unit = if bits { "bits" } else { "nats" };
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<18} {v}\n"));
        line("n", self.n.to_string());
        line("unit", unit.to_string());
        line("HMI", format!("{:.9}", self.hmi.total / scale));
        line("HE(A)", format!("{:.9}", self.he_a / scale));
        line("HE(B)", format!("{:.9}", self.he_b / scale));
        line("HJE", format!("{:.9}", self.hje / scale));
        line("HCE(A|B)", format!("{:.9}", self.hce_ab / scale));
        line("HCE(B|A)", format!("{:.9}", self.hce_ba / scale));
        line("HVI", format!("{:.9}", self.hvi.total / scale));
        match self.nhmi {
            Some(v) => line(&format!("NHMI({})", self.mean), format!("{v:.9}")),
            None => line(&format!("NHMI({})", self.mean), "undefined".into()),
        }
        line("d_n", format!("{:.9}", self.dn));
        if self.ahmi.estimate().is_some() {
            line(
                "EHMI sampling",
                format!(
                    "seed={} stream={} rel_sem={} max_samples={}",
                    self.seed.seed,
                    self.seed.stream,
                    self.ehmi_params.rel_sem_target,
                    self.ehmi_params.max_samples
                ),
            );
        }
        match &self.ahmi {
            AhmiReport::NotRequested => {}
            AhmiReport::Degenerate(est) => {
                line("EHMI", render_estimate(est, scale));
                line("AHMI", "undefined (degenerate denominator)".into());
            }
            AhmiReport::Value { value, estimate } => {
                line("EHMI", render_estimate(estimate, scale));
                line("AHMI", format!("{value:.9}"));
            }
        }
        if levels {
            out.push_str("level  HMI  HVI\n");
            for (l, (mi, v)) in self
                .hmi
                .per_level
                .iter()
                .zip(&self.hvi.per_level)
                .enumerate()
            {
                out.push_str(&format!("{l:<6} {:.9} {:.9}\n", mi / scale, v / scale));
            }
        }
        out
    }

    pub fn nonconverged(&self) -> bool {
        match &self.ahmi {
            AhmiReport::Value { estimate, .. } | AhmiReport::Degenerate(estimate) => {
                !estimate.converged
            }
            AhmiReport::NotRequested => false,
        }
    }
}

fn render_estimate(est: &EhmiEstimate, scale: f64) -> String {
    format!(
        "{:.9} (sem {:.3e}, samples {}{}{})",
        est.mean / scale,
        est.sem / scale,
        est.samples,
        if est.exhausted { ", exhaustive" } else { "" },
        if est.converged { "" } else { ", NOT CONVERGED" },
    )
}

// ---------------------------------------------------------------------------
// triangle scan

/// Complementary cumulative distribution table: `ccdf` at `x` is the
/// fraction of observed values that are `>= x`.
#[derive(Clone, Debug)]
pub struct CcdfTable {
    pub rows: Vec<CcdfRow>,
}

#[derive(Clone, Copy, Debug)]
pub struct CcdfRow {
    pub x: f64,
    pub ccdf: f64,
}

impl CcdfTable {
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Schema("ccdf table is empty".into()));
        }
        for pair in self.rows.windows(2) {
            if pair[0].x >= pair[1].x {
                return Err(Error::Schema("ccdf x values must strictly increase".into()));
            }
            if pair[0].ccdf < pair[1].ccdf {
                return Err(Error::Schema("ccdf must be non-increasing".into()));
            }
        }
        let first = self.rows.first().unwrap().ccdf;
        let last = self.rows.last().unwrap().ccdf;
        if first > 1.0 + 1e-12 || last < 0.0 {
            return Err(Error::Schema("ccdf values out of range".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExtremeTriple {
    pub delta: f64,
    pub t: String,
    pub s: String,
    pub r: String,
}

/// Result of an exhaustive triangle-defect scan over all hierarchical
/// partitions of `{1..n}`.
#[derive(Clone, Debug)]
pub struct TriangleScan {
    pub n: usize,
    pub measure: PairMeasure,
    pub n_partitions: usize,
    pub n_triples: u64,
    pub min: ExtremeTriple,
    pub max: ExtremeTriple,
    pub ccdf: CcdfTable,
}

/// Scans every triple (T, S, R) — identifying the symmetric (R, S, T) —
/// over the defect `m(T,S) + m(S,R) - m(T,R)` and histograms the values
/// into a CCDF with `bins` cells.
pub fn scan_triangle(n: usize, measure: PairMeasure, bins: usize) -> Result<TriangleScan> {
    if !(1..=MAX_SCAN_N).contains(&n) {
        return Err(Error::NOutOfRange { n, max: MAX_SCAN_N });
    }
    let bins = bins.max(1);
    let partitions: Vec<HierPartition> = enum_hier_partitions(n).collect();
    let m = partitions.len();

    // Pairwise measure matrix, computed once.
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            measure
                .eval(&partitions[i], &partitions[j])
                .expect("same universe")
        })
        .collect();
    let mut table = vec![0.0f64; m * m];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        table[i * m + j] = v;
        table[j * m + i] = v;
    }

    // Pass 1: extremes. (T,S,R) and (R,S,T) have the same defect, so only
    // triples with T <= R are visited.
    let mut min = (f64::INFINITY, 0usize, 0usize, 0usize);
    let mut max = (f64::NEG_INFINITY, 0usize, 0usize, 0usize);
    let mut max_count = 0u64;
    let mut n_triples = 0u64;
    for i in 0..m {
        for k in i..m {
            for j in 0..m {
                let delta = table[i * m + j] + table[j * m + k] - table[i * m + k];
                n_triples += 1;
                if delta < min.0 {
                    min = (delta, i, j, k);
                }
                if delta > max.0 {
                    max = (delta, i, j, k);
                    max_count = 1;
                } else if delta == max.0 {
                    max_count += 1;
                }
            }
        }
    }

    // Pass 2: histogram over [min, max].
    let span = max.0 - min.0;
    let rows = if span <= 0.0 {
        vec![CcdfRow { x: min.0, ccdf: 1.0 }]
    } else {
        let width = span / bins as f64;
        let mut hist = vec![0u64; bins];
        for i in 0..m {
            for k in i..m {
                for j in 0..m {
                    let delta = table[i * m + j] + table[j * m + k] - table[i * m + k];
                    let idx = (((delta - min.0) / width) as usize).min(bins - 1);
                    hist[idx] += 1;
                }
            }
        }
        let mut rows = Vec::with_capacity(bins + 1);
        let mut tail: u64 = hist.iter().sum();
        for (b, &count) in hist.iter().enumerate() {
            rows.push(CcdfRow {
                x: min.0 + b as f64 * width,
                ccdf: tail as f64 / n_triples as f64,
            });
            tail -= count;
        }
        // Exact tail row at the maximum, unless rounding already placed
        // the last bin edge there.
        if max.0 > rows.last().expect("bins >= 1").x {
            rows.push(CcdfRow {
                x: max.0,
                ccdf: max_count as f64 / n_triples as f64,
            });
        }
        rows
    };
    let ccdf = CcdfTable { rows };
    ccdf.validate()?;

    let extreme = |(delta, i, j, k): (f64, usize, usize, usize)| ExtremeTriple {
        delta,
        t: partitions[i].serialize(),
        s: partitions[j].serialize(),
        r: partitions[k].serialize(),
    };
    Ok(TriangleScan {
        n,
        measure,
        n_partitions: m,
        n_triples,
        min: extreme(min),
        max: extreme(max),
        ccdf,
    })
}

// ---------------------------------------------------------------------------
// null-model curves

/// One point of the chance-similarity study: averages over random pairs of
/// generated partitions at a fixed universe size.
#[derive(Clone, Debug)]
pub struct NullCurvePoint {
    pub n: usize,
    pub pairs: usize,
    pub mean_hmi: f64,
    pub sem_hmi: f64,
    pub mean_he: f64,
    pub sem_he: f64,
    pub mean_ehmi: f64,
    pub sem_ehmi: f64,
    pub mean_ehmi_self: f64,
    pub sem_ehmi_self: f64,
    /// `mean_ehmi / mean_he` with propagated standard error.
    pub ratio: f64,
    pub ratio_err: f64,
    pub nonconverged: usize,
}

fn mean_sem(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Samples `pairs_per_n` pairs of randomly generated partitions at each
/// size and evaluates mean HMI, mean HE, mean EHMI (between the pair and
/// of each partition against itself) plus the chance-similarity ratio.
pub fn null_curves(
    ns: &[usize],
    pairs_per_n: usize,
    seed: RngSeed,
    params: &EhmiParams,
) -> Vec<NullCurvePoint> {
    let mut out = Vec::with_capacity(ns.len());
    for (ni, &n) in ns.iter().enumerate() {
        struct PairOutcome {
            hmi: f64,
            he: f64,
            ehmi: f64,
            ehmi_self: f64,
            nonconverged: bool,
        }
        let outcomes: Vec<PairOutcome> = (0..pairs_per_n)
            .into_par_iter()
            .map(|p| {
                let stream = seed.stream + (ni * pairs_per_n + p) as u64;
                let mut rng = seed.with_stream(stream).rng();
                let t = random_hier_partition(n, &mut rng);
                let s = random_hier_partition(n, &mut rng);
                let hmi = hmi_recursive(&t, &s).expect("same universe");
                let he = hentropy(&t);
                let e_ts = ehmi(&t, &s, params, &mut rng).expect("same universe");
                let e_tt = ehmi(&t, &t, params, &mut rng).expect("same universe");
                PairOutcome {
                    hmi,
                    he,
                    ehmi: e_ts.mean,
                    ehmi_self: e_tt.mean,
                    nonconverged: !e_ts.converged || !e_tt.converged,
                }
            })
            .collect();

        let collect = |f: fn(&PairOutcome) -> f64| -> Vec<f64> { outcomes.iter().map(f).collect() };
        let (mean_hmi, sem_hmi) = mean_sem(&collect(|o| o.hmi));
        let (mean_he, sem_he) = mean_sem(&collect(|o| o.he));
        let (mean_ehmi, sem_ehmi) = mean_sem(&collect(|o| o.ehmi));
        let (mean_ehmi_self, sem_ehmi_self) = mean_sem(&collect(|o| o.ehmi_self));
        let ratio = mean_ehmi / mean_he;
        let ratio_err = if mean_ehmi != 0.0 && mean_he != 0.0 {
            ratio.abs()
                * ((sem_ehmi / mean_ehmi).powi(2) + (sem_he / mean_he).powi(2)).sqrt()
        } else {
            0.0
        };
        out.push(NullCurvePoint {
            n,
            pairs: pairs_per_n,
            mean_hmi,
            sem_hmi,
            mean_he,
            sem_he,
            mean_ehmi,
            sem_ehmi,
            mean_ehmi_self,
            sem_ehmi_self,
            ratio,
            ratio_err,
            nonconverged: outcomes.iter().filter(|o| o.nonconverged).count(),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// shuffle decay

/// One (n, k) point of the decorrelation study.
#[derive(Clone, Debug)]
pub struct ShuffleDecayPoint {
    pub n: usize,
    pub k: usize,
    pub mean_hmi: f64,
    pub sem_hmi: f64,
    /// Mean over the non-degenerate AHMI samples.
    pub mean_ahmi: f64,
    pub sem_ahmi: f64,
    pub ahmi_samples: usize,
    /// AHMI samples dropped for a degenerate denominator.
    pub dropped: usize,
}

#[derive(Clone, Debug)]
pub struct ShuffleDecayResult {
    pub points: Vec<ShuffleDecayPoint>,
    pub nonconverged: usize,
}

/// For each size, draws random partitions T, perturbs them by shuffling
/// the identity of k elements, and averages HMI and AHMI against k.
///
/// A shuffled partition has the same tree shape as T, so its hierarchical
/// entropy equals H(T) and every generalized mean of the two entropies is
/// H(T) itself; one EHMI estimate per sample therefore serves all k.
pub fn shuffle_decay(
    ns: &[usize],
    samples: usize,
    seed: RngSeed,
    params: &EhmiParams,
) -> ShuffleDecayResult {
    let mut points = Vec::new();
    let mut nonconverged = 0usize;
    for (ni, &n) in ns.iter().enumerate() {
        struct SampleOutcome {
            hmi_per_k: Vec<f64>,
            ahmi_per_k: Vec<Option<f64>>,
            nonconverged: bool,
        }
        let outcomes: Vec<SampleOutcome> = (0..samples)
            .into_par_iter()
            .map(|sample| {
                let stream = seed.stream + (ni * samples + sample) as u64;
                let mut rng = seed.with_stream(stream).rng();
                let t = random_hier_partition(n, &mut rng);
                let h = hentropy(&t);
                let expected = ehmi(&t, &t, params, &mut rng).expect("same universe");
                let denom = h - expected.mean;
                let mut hmi_per_k = Vec::with_capacity(n + 1);
                let mut ahmi_per_k = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let s = shuffle_k(&t, k, &mut rng).expect("k <= n");
                    let i = hmi_recursive(&t, &s).expect("same universe");
                    hmi_per_k.push(i);
                    if denom.abs() < 1e-9 {
                        ahmi_per_k.push(None);
                    } else if s == t {
                        // I(T;T) equals H(T) by definition, so the adjusted
                        // value is exactly one.
                        ahmi_per_k.push(Some(1.0));
                    } else {
                        ahmi_per_k.push(Some((i - expected.mean) / denom));
                    }
                }
                SampleOutcome {
                    hmi_per_k,
                    ahmi_per_k,
                    nonconverged: !expected.converged,
                }
            })
            .collect();

        nonconverged += outcomes.iter().filter(|o| o.nonconverged).count();
        for k in 0..=n {
            let hmi_values: Vec<f64> = outcomes.iter().map(|o| o.hmi_per_k[k]).collect();
            let ahmi_values: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.ahmi_per_k[k])
                .collect();
            let (mean_hmi, sem_hmi) = mean_sem(&hmi_values);
            let (mean_ahmi, sem_ahmi) = if ahmi_values.is_empty() {
                (f64::NAN, 0.0)
            } else {
                mean_sem(&ahmi_values)
            };
            points.push(ShuffleDecayPoint {
                n,
                k,
                mean_hmi,
                sem_hmi,
                mean_ahmi,
                sem_ahmi,
                ahmi_samples: ahmi_values.len(),
                dropped: samples - ahmi_values.len(),
            });
        }
    }
    ShuffleDecayResult {
        points,
        nonconverged,
    }
}

/// Spearman rank correlation (average ranks on ties).
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rank = |values: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0.0; values.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                ranks[idx] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for i in 0..xs.len() {
        cov += (rx[i] - mean) * (ry[i] - mean);
        var_x += (rx[i] - mean) * (rx[i] - mean);
        var_y += (ry[i] - mean) * (ry[i] - mean);
    }
    cov / (var_x * var_y).sqrt()
}

// ---------------------------------------------------------------------------
// cluster pipeline

#[derive(Clone, Debug)]
pub struct ClusterRun {
    pub ensemble: Ensemble,
    pub eccentricities: Vec<f64>,
    pub central_index: usize,
    /// Canonical form of the central partition; node ids of `stats` refer
    /// to it.
    pub central: HierPartition,
    pub stats: Vec<NodeStats>,
    pub missing: Vec<(usize, usize)>,
    pub labels: Vec<String>,
}

/// The full ensemble/central/statistics pipeline on a feature matrix.
pub fn run_cluster(fm: &FeatureMatrix, tol: f64) -> Result<ClusterRun> {
    let ensemble = build_ensemble_with(fm, tol)?;
    let eccentricities = eccentricity(&ensemble);
    let central_index = central(&ensemble);
    let central = ensemble.members[central_index].partition.canonical_form();
    let stats = vertex_stats(&central, &ensemble)?;
    Ok(ClusterRun {
        ensemble,
        eccentricities,
        central_index,
        central,
        stats,
        missing: fm.missing_cells(),
        labels: fm.labels().to_vec(),
    })
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Slash-separated child-index paths for every node of a partition, in
/// node-id order ("/" is the root).
pub fn node_paths(hp: &HierPartition) -> Vec<String> {
    let mut paths = vec![String::new(); hp.num_nodes()];
    paths[hp.root().0] = "/".to_string();
    let mut stack = vec![hp.root()];
    while let Some(id) = stack.pop() {
        for (i, &c) in hp.children(id).iter().enumerate() {
            let prefix = if paths[id.0] == "/" { "" } else { &paths[id.0] };
            paths[c.0] = format!("{prefix}/{i}");
            stack.push(c);
        }
    }
    paths
}

/// Writes `ensemble.hpl`, `eccentricity.csv`, `central.hp` and
/// `vertex_stats.csv` into `out_dir` and returns the paths. Both CSV files
/// are read back and schema-checked before returning.
pub fn write_cluster_outputs(
    run: &ClusterRun,
    out_dir: &Path,
    meta: &[(String, String)],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let ensemble_path = out_dir.join("ensemble.hpl");
    write_hpl(
        &ensemble_path,
        run.ensemble.members.iter().map(|m| &m.partition),
        meta,
    )?;
    written.push(ensemble_path);

    let ecc_path = out_dir.join("eccentricity.csv");
    let rows: Vec<Vec<String>> = run
        .ensemble
        .members
        .iter()
        .zip(&run.eccentricities)
        .enumerate()
        .map(|(i, (member, ecc))| {
            vec![
                i.to_string(),
                bits_string(&member.completion_bits),
                format!("{ecc:.12}"),
            ]
        })
        .collect();
    write_table(&ecc_path, meta, &["index", "completion_bits", "eccentricity"], &rows)?;
    let table = read_table(&ecc_path)?;
    validate_columns(&table, &["index", "completion_bits", "eccentricity"])?;
    written.push(ecc_path);

    let central_path = out_dir.join("central.hp");
    std::fs::write(&central_path, format!("{}\n", run.central.serialize()))?;
    written.push(central_path);

    let stats_path = out_dir.join("vertex_stats.csv");
    let paths = node_paths(&run.central);
    let rows: Vec<Vec<String>> = run
        .stats
        .iter()
        .map(|s| {
            vec![
                paths[s.node.0].clone(),
                s.depth.to_string(),
                format!("{:.12}", s.mean),
                format!("{:.12}", s.stddev),
                s.cv.map(|c| format!("{c:.12}")).unwrap_or_default(),
            ]
        })
        .collect();
    write_table(
        &stats_path,
        meta,
        &["node_path", "depth", "mean", "stddev", "cv"],
        &rows,
    )?;
    let table = read_table(&stats_path)?;
    validate_columns(&table, &["node_path", "depth", "mean", "stddev", "cv"])?;
    written.push(stats_path);

    Ok(written)
}

// ---------------------------------------------------------------------------
// file I/O

/// Renders the standard header comment: library version plus run metadata.
fn meta_line(meta: &[(String, String)]) -> String {
    let mut line = format!("# hierinfo={VERSION}");
    for (k, v) in meta {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push('\n');
    line
}

/// Writes a CSV table prefixed by the metadata comment line.
pub fn write_table(
    path: &Path,
    meta: &[(String, String)],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(meta_line(meta).as_bytes())?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// One partition per line, `#` comment lines allowed.
pub fn write_hpl<'a>(
    path: &Path,
    partitions: impl Iterator<Item = &'a HierPartition>,
    meta: &[(String, String)],
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(meta_line(meta).as_bytes())?;
    for p in partitions {
        writeln!(file, "{}", p.serialize())?;
    }
    file.flush()?;
    Ok(())
}

/// A `.hp` file holds exactly one partition in bracket notation.
pub fn read_hp(path: &Path) -> Result<HierPartition> {
    let text = std::fs::read_to_string(path)?;
    HierPartition::parse(&text)
}

/// A `.hpl` file holds one partition per line; `#` starts a comment.
pub fn read_hpl(path: &Path) -> Result<Vec<HierPartition>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(HierPartition::parse(line)?);
    }
    Ok(out)
}

/// A parsed CSV artifact: metadata from the leading comment, header and
/// string rows.
#[derive(Clone, Debug)]
pub struct CsvTable {
    pub meta: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_table(path: &Path) -> Result<CsvTable> {
    let text = std::fs::read_to_string(path)?;
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                if let Some((k, v)) = token.split_once('=') {
                    meta.insert(k.to_string(), v.to_string());
                }
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok(CsvTable { meta, header, rows })
}

pub fn validate_columns(table: &CsvTable, expected: &[&str]) -> Result<()> {
    if table.header != expected {
        return Err(Error::Schema(format!(
            "expected columns {expected:?}, found {:?}",
            table.header
        )));
    }
    if !table.meta.contains_key("hierinfo") {
        return Err(Error::Schema("missing version in header comment".into()));
    }
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != expected.len() {
            return Err(Error::Schema(format!("row {i} has {} fields", row.len())));
        }
    }
    Ok(())
}

/// One point of a labelled experiment curve.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub n: usize,
    pub k: Option<usize>,
    pub value: f64,
    pub stderr: f64,
}

impl CurvePoint {
    fn row(&self, curve: &str) -> Vec<String> {
        vec![
            curve.to_string(),
            self.n.to_string(),
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            format!("{:.12}", self.value),
            format!("{:.12}", self.stderr),
        ]
    }
}

/// Long-format curve rows shared by the null-curves and shuffle-decay
/// artifacts: `curve, n, k, value, stderr`.
pub fn curve_header() -> [&'static str; 5] {
    ["curve", "n", "k", "value", "stderr"]
}

pub fn null_curve_rows(points: &[NullCurvePoint]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |curve: &str, n: usize, value: f64, stderr: f64| {
        rows.push(CurvePoint { n, k: None, value, stderr }.row(curve));
    };
    for p in points {
        push("hmi", p.n, p.mean_hmi, p.sem_hmi);
        push("he", p.n, p.mean_he, p.sem_he);
        push("ehmi", p.n, p.mean_ehmi, p.sem_ehmi);
        push("ehmi_self", p.n, p.mean_ehmi_self, p.sem_ehmi_self);
        push("ratio", p.n, p.ratio, p.ratio_err);
    }
    rows
}

pub fn shuffle_decay_rows(result: &ShuffleDecayResult) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for p in &result.points {
        let point = |value: f64, stderr: f64| CurvePoint {
            n: p.n,
            k: Some(p.k),
            value,
            stderr,
        };
        rows.push(point(p.mean_hmi, p.sem_hmi).row("hmi"));
        if p.ahmi_samples > 0 {
            rows.push(point(p.mean_ahmi, p.sem_ahmi).row("ahmi"));
        }
        // Degenerate-denominator samples are dropped from the mean but
        // counted here.
        rows.push(point(p.dropped as f64, 0.0).row("ahmi_dropped"));
    }
    rows
}

/// Schema check for curve tables: the numeric columns must parse and the
/// standard errors must be non-negative.
pub fn validate_curve_table(table: &CsvTable) -> Result<()> {
    validate_columns(table, &curve_header())?;
    for (i, row) in table.rows.iter().enumerate() {
        row[1]
            .parse::<usize>()
            .map_err(|_| Error::Schema(format!("row {i}: bad n {:?}", row[1])))?;
        if !row[2].is_empty() {
            row[2]
                .parse::<usize>()
                .map_err(|_| Error::Schema(format!("row {i}: bad k {:?}", row[2])))?;
        }
        let value = row[3]
            .parse::<f64>()
            .map_err(|_| Error::Schema(format!("row {i}: bad value {:?}", row[3])))?;
        let stderr = row[4]
            .parse::<f64>()
            .map_err(|_| Error::Schema(format!("row {i}: bad stderr {:?}", row[4])))?;
        if !value.is_finite() && !value.is_nan() {
            return Err(Error::Schema(format!("row {i}: non-finite value")));
        }
        if stderr < 0.0 {
            return Err(Error::Schema(format!("row {i}: negative stderr")));
        }
    }
    Ok(())
}

pub fn ccdf_rows(table: &CcdfTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|r| vec![format!("{:.12}", r.x), format!("{:.12}", r.ccdf)])
        .collect()
}

pub fn validate_ccdf_csv(table: &CsvTable) -> Result<()> {
    validate_columns(table, &["x", "ccdf"])?;
    let rows: Result<Vec<CcdfRow>> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let x = row[0]
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("row {i}: bad x")))?;
            let ccdf = row[1]
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("row {i}: bad ccdf")))?;
            Ok(CcdfRow { x, ccdf })
        })
        .collect();
    CcdfTable { rows: rows? }.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(text: &str) -> HierPartition {
        HierPartition::parse(text).unwrap()
    }

    #[test]
    fn compare_identical_partitions() {
        let t = hp("[[1,2],[3]]");
        let report = compare(&t, &t, &CompareOptions::default()).unwrap();
        assert!(report.hvi.total.abs() < 1e-12);
        assert!(report.dn.abs() < 1e-12);
        assert!((report.nhmi.unwrap() - 1.0).abs() < 1e-12);
        assert!(report.hce_ab.abs() < 1e-12);
    }

    #[test]
    fn compare_bits_rendering_scales_entropies() {
        let t = hp("[[1],[2]]");
        let report = compare(&t, &t, &CompareOptions::default()).unwrap();
        let nats = report.render(false, false);
        let bits = report.render(true, false);
        assert!(nats.contains("0.693147181")); // ln 2
        assert!(bits.contains("1.000000000"));
    }

    #[test]
    fn compare_degenerate_nhmi_is_reported() {
        let t = hp("[1,2,3]");
        let report = compare(&t, &t, &CompareOptions::default()).unwrap();
        assert!(report.nhmi.is_none());
        assert!(report.render(false, false).contains("undefined"));
    }

    #[test]
    fn scan_triangle_rejects_large_n() {
        assert!(matches!(
            scan_triangle(6, PairMeasure::Hvi, 64),
            Err(Error::NOutOfRange { n: 6, max: 5 })
        ));
    }

    #[test]
    fn scan_triangle_n2() {
        let scan = scan_triangle(2, PairMeasure::Hvi, 16).unwrap();
        assert_eq!(scan.n_partitions, 2);
        // i <= k over 2 partitions with free middle: 2*3/2 * 2 = 6 triples.
        assert_eq!(scan.n_triples, 6);
        assert!(scan.min.delta >= 0.0); // no violation exists at n = 2
        scan.ccdf.validate().unwrap();
    }

    #[test]
    fn scan_triangle_n3_dn_is_metric() {
        let scan = scan_triangle(3, PairMeasure::Dn, 32).unwrap();
        assert!(scan.min.delta >= -1e-12);
    }

    #[test]
    fn spearman_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up = [0.1, 0.2, 0.3, 0.4];
        let down = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman_rho(&xs, &up) - 1.0).abs() < 1e-12);
        assert!((spearman_rho(&xs, &down) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_round_trip_and_validation() {
        let dir = std::env::temp_dir().join(format!("hierinfo-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("curves.csv");
        let meta = vec![("seed".to_string(), "42".to_string())];
        let rows = vec![vec![
            "hmi".to_string(),
            "8".to_string(),
            String::new(),
            "0.5".to_string(),
            "0.01".to_string(),
        ]];
        write_table(&path, &meta, &curve_header(), &rows).unwrap();
        let table = read_table(&path).unwrap();
        assert_eq!(table.meta.get("seed").map(String::as_str), Some("42"));
        assert_eq!(table.meta.get("hierinfo").map(String::as_str), Some(VERSION));
        validate_curve_table(&table).unwrap();
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn hpl_round_trip() {
        let dir = std::env::temp_dir().join(format!("hierinfo-hpl-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.hpl");
        let partitions = vec![hp("[[1,2],[3]]"), hp("[[1],[2],[3]]")];
        write_hpl(&path, partitions.iter(), &[]).unwrap();
        let back = read_hpl(&path).unwrap();
        assert_eq!(back, partitions);
        std::fs::remove_dir_all(&dir).ok();
    }
}
