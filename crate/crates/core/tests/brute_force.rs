mod common;

use common::{brute_force, point, random_tau, Oracle};
use hilbert_cusps::CuspSearch;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn compare(o: Oracle, bound: i64, count: usize, seed: u64) {
    let field = o.field();
    let search = CuspSearch::new(&field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let tau = random_tau(o.degree(), &mut rng, 1.0, (0.3, 3.0));
        let bf = brute_force(&o, &tau, bound);
        let r = search.closest_cusps_default(&point(&tau)).unwrap();
        assert!(((r.mu1 - bf.mu1) / bf.mu1).abs() < 1e-10, "mu1 {} vs {} at {tau:?}", r.mu1, bf.mu1);
        assert!(((r.mu2 - bf.mu2) / bf.mu2).abs() < 1e-10, "mu2 {} vs {} at {tau:?}", r.mu2, bf.mu2);
        if !r.tie_flag {
            let a = r.best_cusp.alpha().small_coords().unwrap();
            let b = r.best_cusp.beta().small_coords().unwrap();
            assert!(o.same_point(&a, &b, &bf.best.0, &bf.best.1), "best cusp differs at {tau:?}");
        }
    }
}

#[test]
fn rationals_match_brute_force() {
    compare(Oracle { m: 1 }, 25, 200, 11);
}

#[test]
fn sqrt5_matches_brute_force() {
    compare(Oracle { m: 5 }, 8, 200, 12);
}

#[test]
fn sqrt2_matches_brute_force() {
    compare(Oracle { m: 2 }, 8, 60, 13);
}
