//! Chance effects on the HMI: two unrelated partitions still share
//! information under random relabeling, and the adjusted HMI corrects for
//! it. Small universes are averaged over all n! permutations exactly;
//! larger ones are sampled until the relative standard error of the mean
//! drops below one percent.
//!
//! ```bash
//! cargo run --release --example chance_adjustment
//! ```

use hierinfo::genpart::random_hier_partition;
use hierinfo::hpart::HierPartition;
use hierinfo::infotheory::{hentropy, hmi_recursive, MeanKind};
use hierinfo::nullmodel::{ahmi_with_estimate, ehmi, EhmiParams, RngSeed};

fn main() {
    let params = EhmiParams::default();

    // Exhaustive regime: n! <= 5040.
    let t = HierPartition::parse("[[1,2],[3]]").unwrap();
    let s = HierPartition::parse("[[1,3],[2]]").unwrap();
    let est = ehmi(&t, &s, &params, &mut RngSeed::new(1).rng()).unwrap();
    println!("T = {t}, S = {s}");
    println!("I(T;S)   = {:.6}", hmi_recursive(&t, &s).unwrap());
    println!("H(T)     = {:.6}", hentropy(&t));
    println!(
        "EHMI     = {:.6} (exhaustive over {} permutations)",
        est.mean, est.samples
    );
    let (adjusted, _) =
        ahmi_with_estimate(&t, &s, MeanKind::Arithmetic, &params, &mut RngSeed::new(1).rng())
            .unwrap();
    println!("AHMI     = {adjusted:.6}  <- S is a pure relabeling of T\n");

    // Sampled regime with the SEM stopping rule.
    let mut rng = RngSeed::new(7).rng();
    let a = random_hier_partition(40, &mut rng);
    let b = random_hier_partition(40, &mut rng);
    let i = hmi_recursive(&a, &b).unwrap();
    let est = ehmi(&a, &b, &params, &mut rng).unwrap();
    println!("two random partitions of n = 40:");
    println!("I(A;B)   = {i:.6}");
    println!(
        "EHMI     = {:.6} +- {:.6} ({} samples, converged: {})",
        est.mean, est.sem, est.samples, est.converged
    );
    println!(
        "           raw similarity is almost entirely chance: I - <I> = {:+.6}",
        i - est.mean
    );
    let (adjusted, _) =
        ahmi_with_estimate(&a, &b, MeanKind::Arithmetic, &params, &mut RngSeed::new(8).rng())
            .unwrap();
    println!("AHMI     = {adjusted:+.6}  <- near zero for unrelated partitions");
}
