//! Regenerates the algebra files in `data/` from the library constructors,
//! so the checked-in JSON never drifts from the code.
//!
//! Run from the workspace root: `cargo run -p malcev --example write_samples`.

use std::fs;
use std::path::Path;

use malcev::relation::{relation_to_json, RelationSet};
use malcev::samples::{cyclic_group, klein_four, symmetric_group_3};
use malcev::z4::z4_algebra;

fn main() {
    let dir = Path::new("data");
    fs::create_dir_all(dir).expect("create data directory");
    let files = [
        ("z4-group.json", cyclic_group(4)),
        ("z6-group.json", cyclic_group(6)),
        ("klein.json", klein_four()),
        ("s3.json", symmetric_group_3()),
        ("z4-trunc2.json", z4_algebra(2)),
        ("z4-trunc3.json", z4_algebra(3)),
    ];
    for (name, alg) in files {
        let path = dir.join(name);
        fs::write(&path, alg.to_json()).expect("write algebra file");
        println!("wrote {}", path.display());
    }
    for (name, rel) in [
        ("z4-mod2-pairs.json", mod2_pairs()),
        ("z4-plus-graph.json", plus_graph()),
    ] {
        let path = dir.join(name);
        fs::write(&path, relation_to_json(&rel)).expect("write relation file");
        println!("wrote {}", path.display());
    }
}

fn mod2_pairs() -> RelationSet {
    let mut tuples = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            if x % 2 == y % 2 {
                tuples.push(vec![x, y]);
            }
        }
    }
    RelationSet::from_tuples(4, 2, &tuples).unwrap()
}

fn plus_graph() -> RelationSet {
    let mut tuples = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            tuples.push(vec![x, y, (x + y) % 4]);
        }
    }
    RelationSet::from_tuples(4, 3, &tuples).unwrap()
}
