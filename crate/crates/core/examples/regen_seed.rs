//! Rebuilds `data/seed.json` from the seed specification.
//!
//! Run with `cargo run -p graftree-core --example regen_seed`.

use std::path::Path;

fn main() {
    let state = graftree_core::grafting::build_seed().expect("seed specification is valid");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/seed.json");
    std::fs::write(&path, state.to_json()).expect("write seed");
    println!("wrote {}", path.display());
}
