mod common;

use std::sync::LazyLock;

use common::{chi5, point, zeta_sqrt5_oracle, Oracle};
use hilbert_cusps::adelic_heights::RigidAdelicSpace;
use hilbert_cusps::analytics::{
    estimate_hermite, integral_mu1_t, partial_volume_g, sample_cusp_neighborhood, siegel_volume, McConfig,
};
use hilbert_cusps::cusp_metric::{mu, mu_invariance_check};
use hilbert_cusps::field_factory::{make_real_quadratic, QuadraticFieldRequest};
use hilbert_cusps::hyperbolic_geometry::{phi, psi_matrix};
use hilbert_cusps::number_field::load_field_spec;
use hilbert_cusps::selftest::{random_group_element, run_selftest, SelftestConfig};
use hilbert_cusps::{Cusp, CuspSearch, FieldElement, TotallyRealField};
use num_complex::Complex64;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static SQRT5: LazyLock<TotallyRealField> = LazyLock::new(|| Oracle { m: 5 }.field());
static SQRT2: LazyLock<TotallyRealField> = LazyLock::new(|| Oracle { m: 2 }.field());
static RATIONALS: LazyLock<TotallyRealField> = LazyLock::new(|| Oracle { m: 1 }.field());

fn pair() -> impl Strategy<Value = [i64; 2]> {
    [-40i64..=40, -40i64..=40]
}

fn nonzero_pair() -> impl Strategy<Value = [i64; 2]> {
    pair().prop_filter("nonzero", |c| c != &[0, 0])
}

fn quad_tau() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0f64..3.0, -2.0f64..2.0).prop_map(|(x, l)| Complex64::new(x, l.exp())), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gcd_is_bezout_and_symmetric(a in pair(), b in nonzero_pair()) {
        let k = &*SQRT5;
        let (a, b) = (FieldElement::from_ints(&a), FieldElement::from_ints(&b));
        let g = k.gcd(&a, &b).unwrap();
        prop_assert_eq!(&(&k.mul(&g.u, &a) + &k.mul(&g.w, &b)), &g.d);
        prop_assert!(k.div(&a, &g.d).unwrap().is_integral());
        prop_assert!(k.div(&b, &g.d).unwrap().is_integral());
        let h = k.gcd(&b, &a).unwrap();
        prop_assert!(k.is_unit(&k.div(&g.d, &h.d).unwrap()));
        prop_assert_eq!(k.norm(&g.d).abs(), num_rational::BigRational::from_integer(k.ideal_norm(&a, &b).unwrap()));
    }

    #[test]
    fn unit_reduce_ignores_unit_factors(x in nonzero_pair(), e in -6i64..=6) {
        let k = &*SQRT2;
        let x = FieldElement::from_ints(&x);
        let moved = k.mul(&k.unit_power(&[e]), &x);
        prop_assert_eq!(k.unit_reduce(&x).unwrap().0, k.unit_reduce(&moved).unwrap().0);
    }

    #[test]
    fn integral_norms_are_at_least_one(x in nonzero_pair()) {
        let k = &*SQRT5;
        let nx = k.norm(&FieldElement::from_ints(&x)).abs();
        prop_assert!(nx >= num_rational::BigRational::from_integer(1.into()));
        prop_assert!(k.product_formula_check(&FieldElement::from_ints(&x)).unwrap());
    }

    #[test]
    fn action_composes_and_preserves_mu(tau in quad_tau(), seed in any::<u64>(), a in pair(), b in nonzero_pair()) {
        let k = &*SQRT5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_group_element(k, &mut rng).unwrap();
        let h = random_group_element(k, &mut rng).unwrap();
        let t = point(&tau);
        let lhs = g.compose(k, &h).act(k, &t);
        let rhs = g.act(k, &h.act(k, &t));
        let scale = lhs.coords().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(lhs.max_deviation(&rhs) <= 1e-9 * scale);
        let c = Cusp::new(k, &FieldElement::from_ints(&a), &FieldElement::from_ints(&b)).unwrap();
        prop_assert!(mu_invariance_check(k, &g, &t, &c).unwrap());
    }

    #[test]
    fn phi_psi_round_trip(x in -10.0f64..10.0, ly in -4.0f64..4.0, ll in -3.0f64..3.0) {
        let z = Complex64::new(x, ly.exp());
        let (w, l) = psi_matrix(&phi(z, ll.exp())).unwrap();
        prop_assert!((w - z).norm() <= 1e-10 * (1.0 + z.norm()));
        prop_assert!((l / ll.exp() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn height_bridge_and_hadamard(tau in quad_tau(), a in pair(), b in nonzero_pair()) {
        let k = &*SQRT2;
        let e = RigidAdelicSpace::new(k, point(&tau)).unwrap();
        prop_assert!((e.height_of_space() - 1.0).abs() < 1e-12);
        let c = Cusp::new(k, &FieldElement::from_ints(&a), &FieldElement::from_ints(&b)).unwrap();
        prop_assert!(e.height_mu_bridge_check(&c).unwrap());
        let (l1, l2) = e.roy_thunder_minima(&CuspSearch::new(k)).unwrap();
        let ub = k.hermite_upper_bound();
        prop_assert!(l1 <= l2 * (1.0 + 1e-12));
        prop_assert!(l1 * l2 >= 1.0 - 1e-9 && l1 * l2 <= ub * ub + 1e-9);
    }

    #[test]
    fn mu_matches_raw_formula_on_coprime_pairs(tau in quad_tau(), a in pair(), b in nonzero_pair()) {
        let k = &*SQRT5;
        let o = Oracle { m: 5 };
        let (fa, fb) = (FieldElement::from_ints(&a), FieldElement::from_ints(&b));
        prop_assume!(k.coprime(&fa, &fb).unwrap());
        let c = Cusp::new(k, &fa, &fb).unwrap();
        let want = o.mu_naive(&tau, &a, &b);
        prop_assert!((mu(k, &point(&tau), &c) / want - 1.0).abs() < 1e-9);
    }
}

#[test]
fn height_scaling_is_projective() {
    let k = &*SQRT5;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let tau = common::random_tau(2, &mut rng, 2.0, (0.2, 3.0));
        let e = RigidAdelicSpace::new(k, point(&tau)).unwrap();
        let a = FieldElement::from_ints(&[i % 7 - 3, 2]);
        let b = FieldElement::from_ints(&[1, i % 5]);
        let lambda = k.div(&FieldElement::from_ints(&[3, -1 - i % 3]), &FieldElement::from_ints(&[2, 5])).unwrap();
        let h1 = e.height_of_point(&a, &b).unwrap();
        let h2 = e.height_of_point(&k.mul(&lambda, &a), &k.mul(&lambda, &b)).unwrap();
        assert!((h1 / h2 - 1.0).abs() < 1e-10, "{h1} vs {h2}");
    }
}

#[test]
fn direct_minima_reproduce_lambda1() {
    for (o, k, count) in [(Oracle { m: 1 }, &*RATIONALS, 50), (Oracle { m: 5 }, &*SQRT5, 50)] {
        let search = CuspSearch::new(k);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..count {
            let tau = common::random_tau(o.degree(), &mut rng, 1.0, (0.5, 2.0));
            let e = RigidAdelicSpace::new(k, point(&tau)).unwrap();
            let (d1, _) = e.direct_minima(15).unwrap();
            let (l1, _) = e.roy_thunder_minima(&search).unwrap();
            assert!((d1 - l1).abs() < 1e-8, "{d1} vs {l1} at {tau:?}");
        }
    }
}

#[test]
fn rho_minima() {
    let k = &*RATIONALS;
    let rho = point(&[Complex64::new(-0.5, 3f64.sqrt() / 2.0)]);
    let e = RigidAdelicSpace::new(k, rho).unwrap();
    let (l1, l2) = e.roy_thunder_minima(&CuspSearch::new(k)).unwrap();
    let want = (3f64.sqrt() / 2.0).powf(-0.5);
    assert!((l1 - want).abs() < 1e-12 && (l2 - want).abs() < 1e-12);
}

#[test]
fn zeta_sqrt5_matches_series_oracle() {
    assert_eq!(chi5(7), -1.0);
    let v = siegel_volume(&SQRT5, 1_000_000).unwrap();
    let oracle = zeta_sqrt5_oracle(1_000_000);
    assert!((v.zeta2.value - oracle).abs() < 1e-5, "{} vs {oracle}", v.zeta2.value);
    let want_vol = 2.0 / std::f64::consts::PI.powi(2) * 5f64.powf(1.5) * oracle;
    assert!((v.vol_gamma - want_vol).abs() < 1e-4);
}

/// Kolmogorov–Smirnov against F(y) = 1 − 1/y on (1, ∞).
#[test]
fn rational_samples_follow_inverse_square_law() {
    let k = &*RATIONALS;
    let pts = sample_cusp_neighborhood(k, 1.0, 10_000, 5).unwrap();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.coords()[0].im).collect();
    assert!(pts.iter().all(|p| (-0.5..0.5).contains(&p.coords()[0].re)));
    assert!(ys.iter().all(|&y| y > 1.0));
    ys.sort_by(f64::total_cmp);
    let n = ys.len() as f64;
    let d = ys
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let f = 1.0 - 1.0 / y;
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // critical value for p = 0.01
    assert!(d < 1.628 / n.sqrt(), "KS statistic {d}");
    let frac = ys.iter().filter(|&&y| y > 2.0).count() as f64 / n;
    assert!((frac - 0.5).abs() < 3.0 * (0.25 / n).sqrt(), "{frac}");
}

#[test]
fn quadratic_samples_respect_support() {
    let pts = sample_cusp_neighborhood(&SQRT5, 1.3, 2000, 6).unwrap();
    assert!(pts.iter().all(|p| p.norm_im() > 1.3f64.powi(-2)));
}

#[test]
fn g_is_monotone_and_sandwiched() {
    let k = &*RATIONALS;
    let cfg = McConfig { samples: 100_000, seed: 9, workers: 4 };
    let g: Vec<_> = [1.0, 1.05, 1.1].iter().map(|&x| partial_volume_g(k, x, &cfg).unwrap()).collect();
    for w in g.windows(2) {
        assert!(w[0].value <= w[1].value + 3.0 * (w[0].std_error + w[1].std_error));
    }
    let full = partial_volume_g(k, 1.08, &cfg).unwrap();
    assert!((full.value - std::f64::consts::PI / 3.0).abs() < 3.0 * full.std_error + 1e-12);
    // c^{-2n} ≤ g(1)/vol ≤ 1 with c² = 2/√3
    let ratio = g[0].value / (std::f64::consts::PI / 3.0);
    assert!(3f64.sqrt() / 2.0 <= ratio && ratio <= 1.0);
}

#[test]
fn sqrt5_integral_upper_bound() {
    let e = integral_mu1_t(&SQRT5, 0.3, &McConfig { samples: 50_000, seed: 2, workers: 4 }).unwrap();
    assert!(e.value <= 1.0 / 0.7 + 3.0 * e.std_error, "{e:?}");
    assert!(e.std_error > 0.0);
}

#[test]
fn sqrt2_hermite_within_ceiling() {
    let k = &*SQRT2;
    let e = estimate_hermite(k, 10, 100, 1).unwrap();
    assert!(e.distance >= 1.0 - 1e-9);
    assert!(e.c_estimate <= 2f64.sqrt() * 8f64.powf(0.25) + 1e-9);
    assert!(e.distance <= e.upper_bound.powi(2) + 1e-6);
}

#[test]
fn cubic_field_end_to_end() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fields/cubic49.toml");
    let k = load_field_spec(path.as_ref(), None).unwrap();
    assert_eq!(k.degree(), 3);
    let z = k.zeta_k_2(200_000).unwrap();
    // ζ_K(2) = ζ(2)·|L(2, χ)|² for the two cubic characters mod 7
    let l: Complex64 = (1..200_000u64)
        .map(|n| {
            let chi = match n % 7 {
                0 => Complex64::new(0.0, 0.0),
                r => {
                    // 3 generates (ℤ/7)^×
                    let e = (0..6).find(|&e| 3u64.pow(e) % 7 == r).unwrap();
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / 3.0)
                }
            };
            chi / (n * n) as f64
        })
        .sum();
    let want = std::f64::consts::PI.powi(2) / 6.0 * l.norm_sqr();
    assert!((z.value - want).abs() < 1e-6, "{} vs {want}", z.value);
    // a cusp whose naive (d·r, d) representative generates an ideal of norm 293²
    let (a, b) = (FieldElement::from_ints(&[4, -1, 0]), FieldElement::from_ints(&[5, -2, 1]));
    let c = Cusp::new(&k, &a, &b).unwrap();
    let lambda = k.div(&FieldElement::from_ints(&[2, 1, -1]), &FieldElement::from_ints(&[3, 0, 1])).unwrap();
    assert_eq!(Cusp::new(&k, &k.mul(&lambda, &a), &k.mul(&lambda, &b)).unwrap(), c);
    let report = run_selftest(&k, &SelftestConfig { cases: 20, mc_samples: 512, seed: 3 }).unwrap();
    assert!(report.passed, "{report:?}");
    let search = CuspSearch::new(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let tau = common::random_tau(3, &mut rng, 1.0, (0.5, 2.0));
        let r = search.verify_minkowski(&point(&tau), k.hermite_upper_bound()).unwrap();
        assert!(r.ok);
    }
}

#[test]
fn other_quadratic_fields_build() {
    for m in [3, 6, 7, 13, 17, 29] {
        let k = make_real_quadratic(&QuadraticFieldRequest::new(m)).unwrap();
        let search = CuspSearch::new(&k);
        let tau = point(&[Complex64::new(0.1, 0.9), Complex64::new(-0.3, 1.2)]);
        assert!(search.verify_minkowski(&tau, k.hermite_upper_bound()).unwrap().ok);
    }
}
