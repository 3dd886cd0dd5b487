use std::time::Instant;

use ftkit::beam_model::{LoadEnvelope, MaterialSpec};
use ftkit::optimizer::{global_search, SearchConfig};

mod support;
use support::search_vs_grid;

#[test]
fn two_variable_search_matches_exhaustive_grid() {
    let t0 = Instant::now();
    let (found, feasible, grid) = search_vs_grid(200);
    assert!(grid.is_finite());
    assert!(feasible);
    assert!(found <= grid * 1.01, "search {found} vs grid {grid}");
    assert!(t0.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn identical_config_gives_identical_result() {
    let cfg = SearchConfig {
        n_starts: 6,
        max_iters: 400,
        seed: 9,
        ..SearchConfig::default()
    };
    let (m, env) = (MaterialSpec::default(), LoadEnvelope::default());
    let a = global_search(&cfg, &m, &env).unwrap();
    let b = global_search(&cfg, &m, &env).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.history, b.history);
    assert_eq!(a.evaluations, b.evaluations);
}
