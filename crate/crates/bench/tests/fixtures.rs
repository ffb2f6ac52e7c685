use herglotz_bench::{density, probe};

#[test]
fn fixtures_are_deterministic_and_valid() {
    assert_eq!(density(3, 8), density(3, 8));
    assert_eq!(density(3, 8).max_degree(), 8);
    let xi = probe();
    assert!((xi.dot(&xi) - 1.0).abs() < 1e-12);
}
