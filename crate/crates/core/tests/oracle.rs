//! Independent transcription of the closed-form compliance model, checked
//! entry by entry against the library on random feasible designs.

mod support;

use std::time::Instant;

use support::{oracle_mismatches, random_feasible, reduction_error};

#[test]
fn library_matches_transcription() {
    let start = Instant::now();
    for p in random_feasible(100, 2024) {
        let bad = oracle_mismatches(&p);
        assert!(bad.is_empty(), "{p:?}: {bad:#?}");
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn vertical_sensor_at_table_edge_reduces_to_table_compliance() {
    for p in random_feasible(100, 7) {
        let e = reduction_error(&p);
        assert!(e < 1e-10, "{e}");
    }
}
