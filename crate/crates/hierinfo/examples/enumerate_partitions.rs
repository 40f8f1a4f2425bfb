//! Exhaustive enumeration of flat and hierarchical partitions.
//!
//! ```bash
//! cargo run --example enumerate_partitions
//! ```

use hierinfo::genpart::{enum_flat_partitions, enum_hier_partitions};

fn main() {
    println!("flat partitions of {{1,2,3}} (Bell number 5):");
    for p in enum_flat_partitions(3) {
        println!("  membership {:?}", p.membership());
    }

    println!("\nhierarchical partitions of {{1,2,3}}:");
    for p in enum_hier_partitions(3) {
        println!("  {p}");
    }

    println!("\ncounts by universe size:");
    println!("  n  flat   hierarchical");
    for n in 1..=6 {
        println!(
            "  {n}  {:<5}  {}",
            enum_flat_partitions(n).count(),
            enum_hier_partitions(n).count()
        );
    }
}
