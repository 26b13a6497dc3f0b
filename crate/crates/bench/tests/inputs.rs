use islab_bench::{budget, overlapping_players, targets};
use islab_core::measures::exchange_report;
use islab_core::{plain_complexity, Context, Lz78Estimator};

#[test]
fn benchmark_inputs_are_valid() {
    let (a, b, x) = overlapping_players();
    assert!(a.intersect(&b).unwrap().contains(&x));
    assert!(exchange_report(&a, &b, &x, &Lz78Estimator).unwrap().identities_hold());
    // the short targets are all reachable at the smallest benched budget
    for (name, t) in targets().into_iter().filter(|(n, _)| n.len() <= 1) {
        assert!(plain_complexity(&t, &Context::empty(), &budget(9)).value.is_finite(), "{name}");
    }
}
