mod common;

use num::{One, Zero};
use pfmm::partitions::{
    cauchy_bordered, cauchy_bordered_sign, cauchy_determinant, char_poly_schur_expand, delta4_det, dual_partition,
    modified_schur, schur, vandermonde, Partition,
};
use pfmm::{int, rat, Rational};
use proptest::prelude::*;

use common::det;

fn partition(max_len: usize, max_part: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v).expect("sorted parts")
    })
}

fn distinct(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::btree_set((-12i64..=12, 1i64..=3), len)
        .prop_map(|s| s.into_iter().map(|(n, d)| rat(n, d)).collect::<Vec<_>>())
        .prop_filter("distinct values", |v| {
            (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]))
        })
}

/// Complete homogeneous symmetric polynomial h_k by the recursion over variables.
fn h(k: i64, x: &[Rational]) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut row = vec![Rational::zero(); k as usize + 1];
    row[0] = Rational::one();
    for xi in x {
        for d in 1..row.len() {
            let v = row[d - 1].clone() * xi.clone();
            row[d] += v;
        }
    }
    row[k as usize].clone()
}

/// Jacobi-Trudi: s_λ = det h_{λ_i - i + j}.
fn jacobi_trudi(lambda: &Partition, x: &[Rational]) -> Rational {
    let l = lambda.len();
    let m: Vec<Vec<Rational>> = (0..l)
        .map(|i| (0..l).map(|j| h(lambda.part(i) as i64 - i as i64 + j as i64, x)).collect())
        .collect();
    det(&m)
}

/// p(n) by Euler's pentagonal recurrence.
fn partition_count(n: usize) -> i64 {
    let mut p = vec![0i64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            p[m] += sign * p[m - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                p[m] += sign * p[m - g2];
            }
            k += 1;
        }
    }
    p[n]
}

#[test]
fn partition_counts() {
    for n in 0..=20 {
        let all = Partition::of_size(n);
        assert_eq!(all.len() as i64, partition_count(n), "n = {n}");
        assert!(all.iter().all(|p| p.size() == n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution_preserving_size(n in 0usize..=20, pick in any::<prop::sample::Index>()) {
        let all = Partition::of_size(n);
        let p = pick.get(&all);
        prop_assert_eq!(p.transpose().size(), n);
        prop_assert_eq!(&p.transpose().transpose(), p);
    }

    #[test]
    fn box_complement_is_an_involution((lam, rows, cols) in (0usize..=5, 0usize..=5)
        .prop_flat_map(|(r, c)| (partition(r, c), Just(r), Just(c))))
    {
        let dual = dual_partition(&lam, rows, cols).unwrap();
        prop_assert_eq!(dual.size() + lam.size(), rows * cols);
        prop_assert!(dual.fits_box(cols, rows));
        prop_assert_eq!(dual_partition(&dual, cols, rows).unwrap(), lam);
    }

    #[test]
    fn delta4_determinant_is_fourth_power(x in (1usize..=4).prop_flat_map(distinct)) {
        prop_assert_eq!(delta4_det(&x).unwrap(), vandermonde(&x).pow(4));
    }

    #[test]
    fn schur_matches_jacobi_trudi((lam, x) in (1usize..=4).prop_flat_map(|n| (partition(n, 4), distinct(n)))) {
        prop_assert_eq!(schur(&lam, &x).unwrap(), jacobi_trudi(&lam, &x));
    }

    #[test]
    fn schur_is_symmetric((lam, x, i, j) in (2usize..=4).prop_flat_map(|n| (partition(n, 3), distinct(n), 0..n, 0..n))) {
        let mut y = x.clone();
        y.swap(i, j);
        prop_assert_eq!(schur(&lam, &x).unwrap(), schur(&lam, &y).unwrap());
    }

    #[test]
    fn modified_schur_on_the_diagonal_doubles_the_alphabet(
        (lam, x) in (1usize..=2).prop_flat_map(|n| (partition(2 * n, 3), distinct(n)))
    ) {
        let doubled: Vec<Rational> = x.iter().chain(&x).cloned().collect();
        prop_assert_eq!(modified_schur(&lam, &x, &x).unwrap(), jacobi_trudi(&lam, &doubled));
    }

    #[test]
    fn schur_expansion_of_cross_product((x, y) in (0usize..=3, 0usize..=3).prop_flat_map(|(n, m)| (distinct(n), distinct(m)))) {
        let direct: Rational = x.iter().flat_map(|a| y.iter().map(move |b| a.clone() - b.clone())).product();
        prop_assert_eq!(char_poly_schur_expand(&x, &y).unwrap(), direct);
    }

    #[test]
    fn bordered_cauchy_matches_ratio_form(
        v in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| (Just(n), distinct(n + m)))
    ) {
        let (n, all) = v;
        let (x, y) = all.split_at(n);
        let sign = int(cauchy_bordered_sign(x.len(), y.len()));
        prop_assert_eq!(cauchy_bordered(x, y).unwrap(), sign * cauchy_determinant(x, y).unwrap());
    }
}
