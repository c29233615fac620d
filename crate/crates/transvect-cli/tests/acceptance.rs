#[path = "../src/acceptance.rs"]
mod acceptance;

use std::io::Write;
use std::path::Path;

#[test]
fn acceptance_criteria() {
    let exe = Path::new(env!("CARGO_BIN_EXE_transvect"));
    // straight to the handle so the lines show without --nocapture
    let outcomes = acceptance::run(&[], Some(exe), |o| {
        let _ = writeln!(std::io::stderr(), "{o}");
    });
    assert_eq!(outcomes.len(), acceptance::NAMES.len());
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
