use evw::{label_grid, mate, Dims, FreqIndex, SeedSet};
use proptest::prelude::*;

/// Centered representatives of an axis coordinate; a Nyquist coordinate
/// has two.
fn reps(k: usize, n: usize) -> Vec<i64> {
    let (k, n) = (k as i64, n as i64);
    let c = if 2 * k > n { k - n } else { k };
    if n % 2 == 0 && 2 * k == n {
        vec![c, -c]
    } else {
        vec![c]
    }
}

fn dist2(dims: Dims, a: FreqIndex, b: FreqIndex) -> i64 {
    let mut best = i64::MAX;
    for ar in reps(a.k, dims.height) {
        for br in reps(b.k, dims.height) {
            for ac in reps(a.l, dims.width) {
                for bc in reps(b.l, dims.width) {
                    best = best.min((ar - br).pow(2) + (ac - bc).pow(2));
                }
            }
        }
    }
    best
}

fn seed_sets() -> impl Strategy<Value = (Dims, SeedSet)> {
    (8usize..=64, 8usize..=64)
        .prop_flat_map(|(h, w)| {
            let pts = proptest::collection::vec((0..h, 0..w), 0..8);
            (Just(Dims::new(h, w)), pts)
        })
        .prop_map(|(dims, pts)| {
            let mut seeds = vec![FreqIndex::DC];
            for (k, l) in pts {
                let s = FreqIndex::new(k, l);
                seeds.push(s);
                seeds.push(mate(s, dims));
            }
            (dims, SeedSet::from_seeds(seeds))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn labels_are_symmetric_and_nearest((dims, seeds) in seed_sets()) {
        let p = label_grid(&seeds, dims).unwrap();
        let self_paired: Vec<usize> =
            (0..p.num_cells()).filter(|&c| p.pair_of[c] == c).collect();
        for b in dims.bins() {
            let l = p.label(b);
            prop_assert_eq!(p.label(mate(b, dims)), p.pair_of[l]);

            let pool: Vec<usize> = if mate(b, dims) == b {
                self_paired.clone()
            } else {
                (0..p.num_cells()).collect()
            };
            let best = pool.iter().map(|&c| dist2(dims, b, p.seed_of[c])).min().unwrap();
            prop_assert_eq!(dist2(dims, b, p.seed_of[l]), best, "bin {:?}", b);
        }
        for (c, &s) in p.seed_of.iter().enumerate() {
            prop_assert_eq!(p.label(s), c);
        }
    }
}
