mod common;

use num::Zero;
use pfmm::pfaffian::{pf, pf_cauchy_binet, pf_cauchy_binet_direct, pf_laplace_expansion};
use pfmm::{rat, DenseMatrix, Rational, SkewMatrix};
use proptest::prelude::*;

use common::{det, pf_expand};

fn entry() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn skew(dim: usize) -> impl Strategy<Value = SkewMatrix<Rational>> {
    prop::collection::vec(entry(), dim * dim.saturating_sub(1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        SkewMatrix::from_upper_fn(dim, |_, _| it.next().expect("enough entries"))
    })
}

fn dense(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix<Rational>> {
    prop::collection::vec(entry(), rows * cols).prop_map(move |v| DenseMatrix::from_vec(rows, cols, v).expect("sized"))
}

fn rows(m: &SkewMatrix<Rational>) -> Vec<Vec<Rational>> {
    let d = m.dim();
    (0..d).map(|i| (0..d).map(|j| m.get(i, j)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn square_is_determinant(m in (1usize..=8).prop_flat_map(skew)) {
        let p = pf(&m);
        prop_assert_eq!(p.clone() * p.clone(), det(&rows(&m)));
        prop_assert_eq!(p, pf_expand(&rows(&m)));
    }

    #[test]
    fn odd_dimension_vanishes(m in (0usize..4).prop_flat_map(|k| skew(2 * k + 1))) {
        prop_assert!(pf(&m).is_zero());
    }

    #[test]
    fn congruence_scales_by_determinant((a, b) in (1usize..=4).prop_flat_map(|k| (skew(2 * k), dense(2 * k, 2 * k)))) {
        let lhs = pf(&a.congruence(&b).unwrap());
        prop_assert_eq!(lhs, b.det().unwrap() * pf(&a));
    }

    #[test]
    fn swapping_an_index_pair_flips_sign(
        (m, i, j) in (1usize..=4).prop_flat_map(|k| (skew(2 * k), 0..2 * k, 0..2 * k)).prop_filter("distinct", |(_, i, j)| i != j)
    ) {
        let mut p: Vec<usize> = (0..m.dim()).collect();
        p.swap(i, j);
        prop_assert_eq!(pf(&m.permute(&p)), -pf(&m));
    }

    #[test]
    fn laplace_expansion_matches_block(
        (z, w) in (1usize..=6).prop_flat_map(|m| (Just(m), m.saturating_sub(4)..=m / 2))
            .prop_flat_map(|(m, h)| {
                let n = m - 2 * h;
                (skew(m), dense(m, n))
            })
    ) {
        let n = w.cols();
        let block = pfmm::pfaffian::block_skew(&z, &w, &SkewMatrix::zeros(n)).unwrap();
        prop_assert_eq!(pf_laplace_expansion(&z, &w).unwrap(), pf(&block));
    }

    #[test]
    fn cauchy_binet_expansion_matches_block(
        (z, w, x) in (0usize..=2, 1usize..=3, 0usize..=2)
            .prop_flat_map(|(l, h, extra)| {
                let m = l + 2 * h;
                let n = 2 * h + extra;
                (skew(n), dense(m, n), dense(m, l))
            })
            .prop_filter("fits in dimension 8", |(_, w, x)| w.rows() + x.cols() <= 8)
    ) {
        prop_assert_eq!(pf_cauchy_binet(&z, &w, &x).unwrap(), pf_cauchy_binet_direct(&z, &w, &x).unwrap());
    }
}
