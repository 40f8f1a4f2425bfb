//! All pairwise measures for two hierarchical partitions, with the
//! level-by-level decomposition.
//!
//! ```bash
//! cargo run --example measures
//! ```

use hierinfo::hpart::HierPartition;
use hierinfo::infotheory::{
    dn, hce, hentropy, hje, hmi_levels, hmi_recursive, hvi, nhmi, MeanKind,
};

fn main() {
    let t = HierPartition::parse("[[[1,2],[3]],[4]]").unwrap();
    let s = HierPartition::parse("[[2],[[3],[1,4]]]").unwrap();
    println!("T = {t}");
    println!("S = {s}\n");

    // The two HMI algorithms: joint tree recursion and the level sum of
    // classical conditional mutual informations. They agree to 1e-10.
    let recursive = hmi_recursive(&t, &s).unwrap();
    let levels = hmi_levels(&t, &s).unwrap();
    println!("HMI (recursive)    {recursive:.9} nats");
    println!("HMI (level sum)    {:.9} nats", levels.total);
    for (l, term) in levels.per_level.iter().enumerate() {
        println!("  level {l} -> {l_next}:  {term:.9}", l_next = l + 1);
    }

    println!("\nHE(T)              {:.9}", hentropy(&t));
    println!("HE(S)              {:.9}", hentropy(&s));
    println!("HJE                {:.9}", hje(&t, &s).unwrap());
    println!("HCE(T|S)           {:.9}", hce(&t, &s).unwrap());
    println!("HCE(S|T)           {:.9}", hce(&s, &t).unwrap());

    let v = hvi(&t, &s).unwrap();
    println!("HVI                {:.9}", v.total);
    for (l, term) in v.per_level.iter().enumerate() {
        println!("  level {l} -> {l_next}:  {term:.9}", l_next = l + 1);
    }

    for mean in MeanKind::ALL {
        println!("NHMI ({mean:<10})  {:.9}", nhmi(&t, &s, mean).unwrap());
    }
    println!("d_n                {:.9}", dn(&t, &s).unwrap());
}
