use pfmm::measure::Measure;
use pfmm::oracle::{exact_poly_integral, exact_sector_integral, mc_integral, McTask, MultiPoly, SectorIntegrand, SignFactor};
use pfmm::{int, rat, Rational};
use proptest::prelude::*;

type Terms = Vec<(Rational, Vec<u32>)>;

fn terms(nvars: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(((-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d)), prop::collection::vec(0u32..=3, nvars)), 1..=4)
}

fn build(nvars: usize, t: &Terms) -> MultiPoly {
    t.iter().fold(MultiPoly::zero(nvars), |acc, (c, e)| {
        let mono = e.iter().enumerate().fold(MultiPoly::constant(nvars, c.clone()), |m, (i, &k)| m.mul(&MultiPoly::var(nvars, i).pow(k)));
        acc.add(&mono)
    })
}

/// Relabels x_i as x_{σ(i)}.
fn relabel(t: &Terms, sigma: &[usize]) -> Terms {
    t.iter()
        .map(|(c, e)| {
            let mut out = vec![0; e.len()];
            for (i, &k) in e.iter().enumerate() {
                out[sigma[i]] = k;
            }
            (c.clone(), out)
        })
        .collect()
}

fn units(n: usize) -> Vec<Measure> {
    vec![Measure::unit(); n]
}

/// ∫_{[0,1]^2} x² y = 1/6 as a sampling target.
fn target(x: &[f64]) -> f64 {
    x[0] * x[0] * x[1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sectors_without_signs_tile_the_cube((n, t) in (1usize..=4).prop_flat_map(|n| (Just(n), terms(n)))) {
        let p = build(n, &t);
        prop_assert_eq!(
            exact_sector_integral(&SectorIntegrand::new(p.clone(), SignFactor::None)).unwrap(),
            exact_poly_integral(&p, &units(n)).unwrap()
        );
    }

    #[test]
    fn sector_integral_is_invariant_under_relabeling(
        (n, t, sigma) in (2usize..=4).prop_flat_map(|n| (Just(n), terms(n), Just((0..n).collect::<Vec<_>>()).prop_shuffle()))
    ) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let moved: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (sigma[i], sigma[j])).collect();
        let lhs = exact_sector_integral(&SectorIntegrand::new(build(n, &t), SignFactor::Product(pairs))).unwrap();
        let rhs = exact_sector_integral(&SectorIntegrand::new(build(n, &relabel(&t, &sigma)), SignFactor::Product(moved))).unwrap();
        prop_assert_eq!(lhs, rhs);
        let vars: Vec<usize> = (0..n - n % 2).collect();
        let moved_vars: Vec<usize> = vars.iter().map(|&v| sigma[v]).collect();
        let lhs = exact_sector_integral(&SectorIntegrand::new(build(n, &t), SignFactor::Pfaffian(vars))).unwrap();
        let rhs = exact_sector_integral(&SectorIntegrand::new(build(n, &relabel(&t, &sigma)), SignFactor::Pfaffian(moved_vars))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>(), samples in 1u64..20_000) {
        let task = McTask { measures: units(2), samples, seed };
        let a = mc_integral(&task, target).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = one.install(|| mc_integral(&task, target)).unwrap();
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        prop_assert_eq!(a.samples, samples);
    }
}

#[test]
fn pfaffian_sign_on_a_pair_is_the_sign_function() {
    // ∫∫ x sgn(x - y) = ∫ x (2x - 1) = 1/6
    let p = MultiPoly::var(2, 0);
    let v = exact_sector_integral(&SectorIntegrand::new(p, SignFactor::Pfaffian(vec![0, 1]))).unwrap();
    assert_eq!(v, rat(1, 6));
    let shifted = SectorIntegrand::new(MultiPoly::one(2), SignFactor::None).on_interval(int(1), int(3));
    assert_eq!(exact_sector_integral(&shifted).unwrap(), int(4));
}

#[test]
fn standard_error_scales_as_inverse_square_root() {
    let est = |samples| mc_integral(&McTask { measures: units(2), samples, seed: 11 }, target).unwrap();
    let (small, large) = (est(40_000), est(160_000));
    let ratio = large.stderr / small.stderr;
    assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn error_bars_are_calibrated() {
    let truth = 1.0 / 6.0;
    let trials = 400u64;
    let (mut within4, mut within2) = (0, 0);
    for seed in 0..trials {
        let e = mc_integral(&McTask { measures: units(2), samples: 2_000, seed }, target).unwrap();
        let s = e.sigmas(truth);
        within4 += u64::from(s <= 4.0);
        within2 += u64::from(s <= 2.0);
    }
    assert!(within4 * 100 >= trials * 99, "{within4}/{trials} within 4 sigma");
    // nominal 95.4%
    assert!(within2 * 100 >= trials * 90, "{within2}/{trials} within 2 sigma");
}

#[test]
fn discrete_measures_are_sampled_by_weight() {
    let d = Measure::discrete(vec![(int(0), rat(1, 4)), (int(1), rat(3, 4))]).unwrap();
    let e = mc_integral(&McTask { measures: vec![d], samples: 100_000, seed: 3 }, |x| x[0]).unwrap();
    assert!(e.brackets(0.75, 4.0), "{e:?}");
}
