use fracmeas_core::mc::Welford;
use proptest::prelude::*;

fn feed(xs: &[f64]) -> Welford {
    let mut w = Welford::new();
    xs.iter().for_each(|x| w.push(*x));
    w
}

proptest! {
    #[test]
    fn merge_agrees_with_a_single_pass(
        xs in prop::collection::vec(-1e3f64..1e3, 0..200),
        cuts in prop::collection::vec(0usize..200, 0..6),
    ) {
        let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c.min(xs.len())).collect();
        cuts.push(0);
        cuts.push(xs.len());
        cuts.sort_unstable();
        let mut merged = Welford::new();
        for w in cuts.windows(2) {
            merged.merge(&feed(&xs[w[0]..w[1]]));
        }
        let whole = feed(&xs);
        prop_assert_eq!(merged.count(), whole.count());
        prop_assert!((merged.mean() - whole.mean()).abs() <= 1e-9);
        prop_assert!((merged.variance() - whole.variance()).abs() <= 1e-8 * (1.0 + whole.variance()));
    }
}
