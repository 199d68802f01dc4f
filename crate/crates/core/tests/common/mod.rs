//! Small-instance corpora shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sicut::problems::{biig, wmcig, BiigInstance, BiigParams, WmcigInstance, WmcigParams};

/// Coverage instance `t` of the equivalence corpus: n in [6,12], r in
/// {1,2,3}, B in {2,3}, k in {1,2,3}.
pub fn small_wmcig(t: u64) -> WmcigInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000 + t);
    let params = WmcigParams {
        n: rng.gen_range(6..=12),
        radius: [1.0, 2.0, 3.0][rng.gen_range(0..3)],
        budget: rng.gen_range(2..=3),
        interdiction: rng.gen_range(1..=3),
    };
    wmcig::generate(&params, t).unwrap()
}

/// Activation instance `t` of the equivalence corpus: n in [6,10], m = 2n,
/// d in {0.1,0.2,0.3}, B in {2,3}, k in {1,2,3}.
pub fn small_biig(t: u64) -> BiigInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(20_000 + t);
    let params = BiigParams {
        n: rng.gen_range(6..=10),
        target_mult: 2,
        budget: rng.gen_range(2..=3),
        interdiction: rng.gen_range(1..=3),
        density: [0.1, 0.2, 0.3][rng.gen_range(0..3)],
    };
    biig::generate(&params, t).unwrap()
}

/// The two worked examples, zero-based.
pub fn example_biig() -> BiigInstance {
    BiigInstance::new(vec![0.3, 0.5, 0.4], 4, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 2)], 2, 1).unwrap()
}

pub fn example_wmcig() -> WmcigInstance {
    WmcigInstance::new(vec![5, 9, 6, 4], vec![vec![0, 2], vec![0, 1], vec![0, 2, 3]], 2, 1).unwrap()
}
