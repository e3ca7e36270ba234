//! Partitions, Vandermonde products, Schur and modified Schur polynomials,
//! Cauchy determinants.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::{sign_pow, Field};

/// Non-increasing sequence of positive integers. Zero parts are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Accepts trailing zeros; rejects increasing sequences.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("not a partition: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// λ_i with 0-based index; zero beyond the length.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let w = self.part(0);
        Partition { parts: (0..w).map(|c| self.parts.iter().filter(|&&p| p > c).count()).collect() }
    }

    /// Zero-padded view of length n.
    pub fn padded(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.part(i)).collect()
    }

    /// λ ⊆ (colsʳᵒʷˢ): at most `rows` parts, each at most `cols`.
    pub fn fits_box(&self, rows: usize, cols: usize) -> bool {
        self.len() <= rows && self.part(0) <= cols
    }

    /// All partitions inside the rows × cols box.
    pub fn in_box(rows: usize, cols: usize) -> Vec<Partition> {
        fn go(rows: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            out.push(Partition { parts: cur.clone() });
            if cur.len() == rows {
                return;
            }
            for p in 1..=max {
                cur.push(p);
                go(rows, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(rows, cols, &mut Vec::new(), &mut out);
        out
    }

    /// All partitions of n.
    pub fn of_size(n: usize) -> Vec<Partition> {
        fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=max.min(rest)).rev() {
                cur.push(p);
                go(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{:?}", self.parts)
        }
    }
}

/// Complement in the box: λ^∨_k = n - λᵀ_{m+1-k}, k = 1..m.
pub fn dual_partition(lambda: &Partition, n: usize, m: usize) -> Result<Partition> {
    if !lambda.fits_box(n, m) {
        return Err(Error::OutsideBox(format!("{lambda:?} not inside ({m}^{n})")));
    }
    let t = lambda.transpose();
    Partition::new((1..=m).map(|k| n - t.part(m - k)).collect())
}

/// ∏_{i<j} (x_i - x_j).
pub fn vandermonde<T: Field>(x: &[T]) -> T {
    let mut acc = T::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            acc = acc * (x[i].clone() - x[j].clone());
        }
    }
    acc
}

/// det p_{N-j}(x_i) with monomial p.
pub fn vandermonde_det<T: Field>(x: &[T]) -> Result<T> {
    let n = x.len();
    DenseMatrix::from_fn(n, n, |i, j| x[i].pow((n - 1 - j) as u32)).det()
}

/// The 2N×2N matrix with rows p_{2N-j}(x_i) then rows p'_{2N-j}(x_i).
pub fn delta4_matrix<T: Field>(x: &[T]) -> DenseMatrix<T> {
    let n = x.len();
    DenseMatrix::from_fn(2 * n, 2 * n, |r, j| {
        let k = 2 * n - 1 - j;
        if r < n {
            x[r].pow(k as u32)
        } else if k == 0 {
            T::zero()
        } else {
            T::from_i64(k as i64) * x[r - n].pow(k as u32 - 1)
        }
    })
}

/// (-1)^{N(N+1)/2} det[p_{2N-j}(x_i); p'_{2N-j}(x_i)], equal to Δ(x)⁴.
pub fn delta4_det<T: Field>(x: &[T]) -> Result<T> {
    let n = x.len() as i64;
    let d = delta4_matrix(x).det()?;
    Ok(if sign_pow(n * (n + 1) / 2) == 1 { d } else { -d })
}

fn check_distinct<T: Field>(x: &[T]) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x[i] == x[j] {
                return Err(Error::RepeatedPoints(format!("x[{i}] = x[{j}]")));
            }
        }
    }
    Ok(())
}

/// Bialternant det(x_i^{λ_j+N-j}) / Δ_N(x). Requires distinct points.
pub fn schur<T: Field>(lambda: &Partition, x: &[T]) -> Result<T> {
    let n = x.len();
    if lambda.len() > n {
        return Ok(T::zero());
    }
    check_distinct(x)?;
    let lam = lambda.padded(n);
    let num = DenseMatrix::from_fn(n, n, |i, j| x[i].pow((lam[j] + n - 1 - j) as u32)).det()?;
    Ok(num / vandermonde(x))
}

/// a_λ(X;Y): rows x_i^{λ_j+2N-j}, then rows (y_i^{λ_j+2N-j})'.
pub fn modified_alternant<T: Field>(lambda: &Partition, x: &[T], y: &[T]) -> Result<T> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::Dimension(format!("|x| = {n}, |y| = {}", y.len())));
    }
    if lambda.len() > 2 * n {
        return Ok(T::zero());
    }
    let lam = lambda.padded(2 * n);
    DenseMatrix::from_fn(2 * n, 2 * n, |r, j| {
        let k = lam[j] + 2 * n - 1 - j;
        if r < n {
            x[r].pow(k as u32)
        } else if k == 0 {
            T::zero()
        } else {
            T::from_i64(k as i64) * y[r - n].pow(k as u32 - 1)
        }
    })
    .det()
}

/// a_λ(X;Y) / a_∅(X;Y).
pub fn modified_schur<T: Field>(lambda: &Partition, x: &[T], y: &[T]) -> Result<T> {
    let den = modified_alternant(&Partition::empty(), x, y)?;
    if den.is_zero() {
        return Err(Error::Singular("a_∅(X;Y) vanishes".into()));
    }
    Ok(modified_alternant(lambda, x, y)? / den)
}

/// ∏_{i,j}(x_i - y_j).
pub fn cross_product<T: Field>(x: &[T], y: &[T]) -> T {
    let mut acc = T::one();
    for xi in x {
        for yj in y {
            acc = acc * (xi.clone() - yj.clone());
        }
    }
    acc
}

/// Σ_{ℓ(λ) ≤ M, λ_1 ≤ N} (-1)^{|λ|} s_{λ^∨}(X) s_λ(Y) with λ^∨ taken in the (M^N)-complement.
pub fn schur_cross_sum<T: Field>(x: &[T], y: &[T]) -> Result<T> {
    let (n, m) = (x.len(), y.len());
    let mut acc = T::zero();
    for lam in Partition::in_box(m, n) {
        let dual = dual_partition(&lam, m, n)?;
        let term = schur(&dual, x)? * schur(&lam, y)?;
        acc = if lam.size() % 2 == 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// ∏(x_i - y_j) evaluated directly and through the Schur expansion; errors if they differ.
pub fn char_poly_schur_expand<T: Field>(x: &[T], y: &[T]) -> Result<T> {
    if !T::EXACT {
        return Err(Error::Unsupported("Schur expansion check requires exact mode".into()));
    }
    let direct = cross_product(x, y);
    let expanded = schur_cross_sum(x, y)?;
    if direct != expanded {
        return Err(Error::Disagreement(format!(
            "direct {:?} vs expansion {:?}",
            direct.to_scalar(),
            expanded.to_scalar()
        )));
    }
    Ok(direct)
}

/// Ratio form Δ_N(x)Δ_M(y) / ∏(x_i - y_j).
pub fn cauchy_determinant<T: Field>(x: &[T], y: &[T]) -> Result<T> {
    check_distinct(x)?;
    check_distinct(y)?;
    let den = cross_product(x, y);
    if den.is_zero() {
        return Err(Error::RepeatedPoints("some x_i equals some y_j".into()));
    }
    Ok(vandermonde(x) * vandermonde(y) / den)
}

/// Bordered determinant. N ≥ M: rows x_i, columns 1/(x_i - y_j) then x_i^{k-1};
/// N < M: rows y_i, columns 1/(x_j - y_i) then y_i^{k-1}.
pub fn cauchy_bordered<T: Field>(x: &[T], y: &[T]) -> Result<T> {
    let (n, m) = (x.len(), y.len());
    if cross_product(x, y).is_zero() {
        return Err(Error::RepeatedPoints("some x_i equals some y_j".into()));
    }
    let mat = if n >= m {
        DenseMatrix::from_fn(n, n, |i, j| {
            if j < m {
                T::one() / (x[i].clone() - y[j].clone())
            } else {
                x[i].pow((j - m) as u32)
            }
        })
    } else {
        DenseMatrix::from_fn(m, m, |i, j| {
            if j < n {
                T::one() / (x[j].clone() - y[i].clone())
            } else {
                y[i].pow((j - n) as u32)
            }
        })
    };
    mat.det()
}

/// Sign with cauchy_bordered = sign · cauchy_determinant.
pub fn cauchy_bordered_sign(n: usize, m: usize) -> i64 {
    let (n, m) = (n as i64, m as i64);
    if n >= m {
        sign_pow(n * (n - 1) / 2)
    } else {
        sign_pow(m * (m - 1) / 2 + n * (m - n))
    }
}

/// Lagrange extrapolation to 0 of a polynomial sampled at distinct nodes.
pub fn extrapolate_to_zero<T: Field>(nodes: &[T], values: &[T]) -> T {
    let mut acc = T::zero();
    for (i, (xi, vi)) in nodes.iter().zip(values).enumerate() {
        let mut w = T::one();
        for (j, xj) in nodes.iter().enumerate() {
            if i != j {
                w = w * xj.clone() / (xj.clone() - xi.clone());
            }
        }
        acc = acc + w * vi.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn part(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn partition_basics() {
        let l = part(&[3, 1, 1, 0]);
        assert_eq!(l.parts(), &[3, 1, 1]);
        assert_eq!(l.transpose(), part(&[3, 1, 1]));
        assert_eq!(part(&[4, 2]).transpose(), part(&[2, 2, 1, 1]));
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::in_box(2, 2).len(), 6);
        assert_eq!(Partition::of_size(5).len(), 7);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_partition(&Partition::empty(), 2, 3).unwrap(), part(&[2, 2, 2]));
        assert_eq!(dual_partition(&part(&[3, 3]), 2, 3).unwrap(), Partition::empty());
        assert_eq!(dual_partition(&part(&[2, 1]), 2, 3).unwrap(), part(&[2, 1]));
        assert!(matches!(dual_partition(&part(&[4]), 2, 3), Err(Error::OutsideBox(_))));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&[int(5)]), int(1));
        assert_eq!(vandermonde(&[int(2), int(1)]), int(1));
        assert_eq!(vandermonde(&[int(1), int(2)]), int(-1));
        let x = [int(1), int(2), int(3)];
        assert_eq!(vandermonde(&x), vandermonde_det(&x).unwrap());
    }

    #[test]
    fn delta4_examples() {
        assert_eq!(delta4_det(&[rat(7, 3)]).unwrap(), int(1));
        assert_eq!(delta4_det(&[int(0), int(1)]).unwrap(), int(1));
        let x = [rat(1, 2), rat(-2, 3), int(4)];
        assert_eq!(delta4_det(&x).unwrap(), vandermonde(&x).pow(4));
    }

    #[test]
    fn schur_examples() {
        let x = [rat(2, 3), int(5)];
        assert_eq!(schur(&Partition::empty(), &x).unwrap(), int(1));
        assert_eq!(schur(&part(&[1]), &x).unwrap(), rat(17, 3));
        assert_eq!(schur(&part(&[1, 1, 1]), &x).unwrap(), int(0));
        assert!(matches!(schur(&part(&[1]), &[int(1), int(1)]), Err(Error::RepeatedPoints(_))));
    }

    #[test]
    fn modified_schur_small() {
        // N=1, λ=(1): a_λ = det[[a², 1],[2b, 0]] = -2b, a_∅ = det[[a, 1],[1, 0]] = -1
        let (a, b) = (rat(3, 2), rat(-1, 5));
        let direct = (int(-2) * b.clone()) / int(-1);
        assert_eq!(modified_schur(&part(&[1]), std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap(), direct);
        assert_eq!(modified_schur(&Partition::empty(), &[a], &[b]).unwrap(), int(1));
    }

    #[test]
    fn modified_schur_diagonal_is_doubled_alphabet() {
        let x = [rat(1, 3), rat(5, 2)];
        for lam in [part(&[1]), part(&[2, 1]), part(&[2, 2, 1]), part(&[3, 1, 1, 1])] {
            let deg = lam.size() + 1;
            let nodes: Vec<Rational> = (1..=deg as i64 + 1).map(|k| rat(k, 7)).collect();
            let vals: Vec<Rational> = nodes
                .iter()
                .map(|e| {
                    let mut pts = x.to_vec();
                    pts.extend(x.iter().map(|xi| xi.clone() + e.clone()));
                    schur(&lam, &pts).unwrap()
                })
                .collect();
            let limit = extrapolate_to_zero(&nodes, &vals);
            assert_eq!(modified_schur(&lam, &x, &x).unwrap(), limit, "{lam:?}");
        }
    }

    #[test]
    fn schur_expansion_examples() {
        let x = [rat(3, 7)];
        let y = [rat(-2, 5)];
        assert_eq!(char_poly_schur_expand(&x, &y).unwrap(), rat(3, 7) + rat(2, 5));
        let x = [rat(1, 2), rat(4, 3)];
        let y = [rat(-1, 3), int(2)];
        assert_eq!(Partition::in_box(2, 2).len(), 6);
        assert_eq!(char_poly_schur_expand(&x, &y).unwrap(), cross_product(&x, &y));
        let y3 = [int(1), rat(2, 9), int(-3)];
        assert_eq!(char_poly_schur_expand(&[rat(5, 4)], &y3).unwrap(), cross_product(&[rat(5, 4)], &y3));
        assert_eq!(char_poly_schur_expand(&y3, &[rat(5, 4)]).unwrap(), cross_product(&y3, &[rat(5, 4)]));
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_determinant(&[int(3)], &[int(1)]).unwrap(), rat(1, 2));
        let x = [int(2), int(3)];
        let y = [int(0)];
        assert_eq!(cauchy_determinant(&x, &y).unwrap(), rat(-1, 6));
        assert_eq!(cauchy_bordered(&x, &y).unwrap(), rat(1, 6));
        assert_eq!(cauchy_bordered_sign(2, 1), -1);
        assert!(cauchy_determinant(&[int(1)], &[int(1)]).is_err());
    }

    #[test]
    fn cauchy_bordered_sign_table() {
        let xs: Vec<Rational> = [11, 17, 23, 31, 43].iter().map(|&v| rat(v, 3)).collect();
        let ys: Vec<Rational> = [-2, -5, -7, -13, -19].iter().map(|&v| rat(v, 2)).collect();
        for n in 0..=4 {
            for m in 0..=4 {
                if n + m == 0 {
                    continue;
                }
                let (x, y) = (&xs[..n], &ys[..m]);
                let r = cauchy_determinant(x, y).unwrap();
                let b = cauchy_bordered(x, y).unwrap();
                assert_eq!(b, r * int(cauchy_bordered_sign(n, m)), "N={n} M={m}");
            }
        }
    }
}
