//! Random hierarchical partitions via the splitter scheme: each block is
//! split by shuffling its elements with a random number of separator
//! symbols, and the recursion runs until every part is a single element.
//!
//! ```bash
//! cargo run --example random_partitions
//! ```

use hierinfo::genpart::{random_flat_partition, random_hier_partition};
use hierinfo::nullmodel::RngSeed;

fn main() {
    let mut rng = RngSeed::new(2718).rng();

    println!("random flat partitions of {{1..8}}:");
    let block: Vec<u32> = (1..=8).collect();
    for _ in 0..5 {
        println!("  {:?}", random_flat_partition(&block, &mut rng));
    }

    println!("\nrandom hierarchical partitions of {{1..8}}:");
    for _ in 0..5 {
        println!("  {}", random_hier_partition(8, &mut rng));
    }

    // Identical seeds reproduce identical draws, and sub-streams are
    // independent.
    let draw = |seed: RngSeed| random_hier_partition(8, &mut seed.rng()).serialize();
    let a = draw(RngSeed::new(5));
    let b = draw(RngSeed::new(5));
    let c = draw(RngSeed::new(5).with_stream(1));
    println!("\nseed 5, stream 0: {a}");
    println!("seed 5, stream 0: {b}   (same)");
    println!("seed 5, stream 1: {c}");
}
