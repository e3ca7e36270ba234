//! Pfaffians and the block, Laplace-type and Cauchy-Binet-type expansions.

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::scalar::{sign_pow, Field};

/// Pfaffian. Odd dimension gives zero.
///
/// Exact fields use fraction-free skew elimination; floats use skew Gaussian
/// elimination with full pivoting.
pub fn pf<T: Field>(m: &SkewMatrix<T>) -> T {
    let n = m.dim();
    if n % 2 == 1 {
        return T::zero();
    }
    if n == 0 {
        return T::one();
    }
    let mut a = m.to_dense();
    let mut sign = T::one();
    if T::EXACT {
        let mut prev = T::one();
        let mut k = 0;
        while k + 2 < n {
            if a.get(k, k + 1).is_zero() {
                match (k + 2..n).find(|&j| !a.get(k, j).is_zero()) {
                    Some(j) => {
                        swap_index(&mut a, k + 1, j);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            let piv = a.get(k, k + 1).clone();
            for i in k + 2..n {
                for j in i + 1..n {
                    let v = (piv.clone() * a.get(i, j).clone()
                        + a.get(k + 1, i).clone() * a.get(k, j).clone()
                        - a.get(k, i).clone() * a.get(k + 1, j).clone())
                        / prev.clone();
                    a.set(i, j, v.clone());
                    a.set(j, i, -v);
                }
            }
            prev = piv;
            k += 2;
        }
        sign * a.get(n - 2, n - 1).clone()
    } else {
        let mut acc = T::one();
        let mut k = 0;
        while k < n {
            let mut best = (k, k + 1, -1.0);
            for i in k..n {
                for j in i + 1..n {
                    let mag = a.get(i, j).magnitude();
                    if mag > best.2 {
                        best = (i, j, mag);
                    }
                }
            }
            if best.2 <= 0.0 {
                return T::zero();
            }
            let (p, q) = (best.0, best.1);
            if p != k {
                swap_index(&mut a, k, p);
                sign = -sign;
            }
            if q != k + 1 {
                swap_index(&mut a, k + 1, q);
                sign = -sign;
            }
            let piv = a.get(k, k + 1).clone();
            acc = acc * piv.clone();
            for i in k + 2..n {
                for j in i + 1..n {
                    let v = a.get(i, j).clone()
                        + (a.get(k + 1, i).clone() * a.get(k, j).clone()
                            - a.get(k, i).clone() * a.get(k + 1, j).clone())
                            / piv.clone();
                    a.set(i, j, v.clone());
                    a.set(j, i, -v);
                }
            }
            k += 2;
        }
        sign * acc
    }
}

fn swap_index<T: Field>(a: &mut DenseMatrix<T>, p: usize, q: usize) {
    if p == q {
        return;
    }
    a.swap_rows(p, q);
    a.swap_cols(p, q);
}

/// Recursive first-row expansion. Independent oracle for small dimensions.
pub fn pf_expansion<T: Field>(m: &SkewMatrix<T>) -> T {
    fn go<T: Field>(m: &SkewMatrix<T>, idx: &[usize]) -> T {
        if idx.is_empty() {
            return T::one();
        }
        if idx.len() % 2 == 1 {
            return T::zero();
        }
        let mut acc = T::zero();
        for k in 1..idx.len() {
            let e = m.get(idx[0], idx[k]);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> =
                idx[1..].iter().enumerate().filter(|&(t, _)| t + 1 != k).map(|(_, &v)| v).collect();
            let term = e * go(m, &rest);
            acc = if k % 2 == 1 { acc + term } else { acc - term };
        }
        acc
    }
    let idx: Vec<usize> = (0..m.dim()).collect();
    go(m, &idx)
}

/// Assembles [[a, b], [-bᵀ, c]].
pub fn block_skew<T: Field>(a: &SkewMatrix<T>, b: &DenseMatrix<T>, c: &SkewMatrix<T>) -> Result<SkewMatrix<T>> {
    let (n, m) = (a.dim(), c.dim());
    if b.rows() != n || b.cols() != m {
        return Err(Error::Dimension(format!(
            "off-diagonal block is {}x{}, expected {n}x{m}",
            b.rows(),
            b.cols()
        )));
    }
    Ok(SkewMatrix::from_upper_fn(n + m, |i, j| match (i < n, j < n) {
        (true, true) => a.get(i, j),
        (true, false) => b.get(i, j - n).clone(),
        (false, false) => c.get(i - n, j - n),
        (false, true) => unreachable!("upper triangle only"),
    }))
}

/// Sign s(n) with Pf[[0, B], [-Bᵀ, 0]] = s(n)·det B in block ordering.
pub fn bipartite_pf_sign(n: usize) -> i64 {
    sign_pow((n * n.saturating_sub(1) / 2) as i64)
}

/// Pf[[0, B], [-Bᵀ, 0]] computed directly.
pub fn pf_bipartite<T: Field>(b: &DenseMatrix<T>) -> Result<T> {
    if !b.is_square() {
        return Err(Error::NonSquare { rows: b.rows(), cols: b.cols() });
    }
    let n = b.rows();
    let full = block_skew(&SkewMatrix::zeros(n), b, &SkewMatrix::zeros(n))?;
    Ok(pf(&full))
}

/// The three evaluations of a block Pfaffian.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPfaffian<T> {
    /// Pf of the assembled matrix.
    pub direct: T,
    /// Pf a · Pf[c + bᵀ a⁻¹ b]; `None` when a is singular.
    pub via_first: Option<T>,
    /// Pf c · Pf[a + b c⁻¹ bᵀ]; `None` when c is singular.
    pub via_second: Option<T>,
}

impl<T: Field> BlockPfaffian<T> {
    /// Names the unavailable factorizations.
    pub fn unavailable(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.via_first.is_none() {
            v.push("first block singular");
        }
        if self.via_second.is_none() {
            v.push("second block singular");
        }
        v
    }
}

/// Block factorization of Pf[[a, b], [-bᵀ, c]].
pub fn pf_block_factor<T: Field>(
    a: &SkewMatrix<T>,
    b: &DenseMatrix<T>,
    c: &SkewMatrix<T>,
) -> Result<BlockPfaffian<T>> {
    if a.dim() % 2 == 1 || c.dim() % 2 == 1 {
        return Err(Error::Parity("diagonal blocks must have even dimension".into()));
    }
    let full = block_skew(a, b, c)?;
    let direct = pf(&full);
    let via_first = match a.to_dense().inverse() {
        Ok(ainv) => {
            let inner = b.transpose().matmul(&ainv)?.matmul(b)?;
            let s = c.add(&SkewMatrix::from_dense_upper(&inner))?;
            Some(pf(a) * pf(&s))
        }
        Err(_) => None,
    };
    let via_second = match c.to_dense().inverse() {
        Ok(cinv) => {
            let inner = b.matmul(&cinv)?.matmul(&b.transpose())?;
            let s = a.add(&SkewMatrix::from_dense_upper(&inner))?;
            Some(pf(c) * pf(&s))
        }
        Err(_) => None,
    };
    Ok(BlockPfaffian { direct, via_first, via_second })
}

/// k-element subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Laplace-type expansion of Pf[[z, w], [-wᵀ, 0]] over (m-n)-subsets I:
/// Σ (-1)^{Σ(I) + C(m,2)} Pf z(I) det w([m]\I; [n]) with 1-based Σ(I).
pub fn pf_laplace_expansion<T: Field>(z: &SkewMatrix<T>, w: &DenseMatrix<T>) -> Result<T> {
    let m = z.dim();
    let n = w.cols();
    if w.rows() != m {
        return Err(Error::Dimension(format!("w has {} rows, z is {m}x{m}", w.rows())));
    }
    if n > m || (m - n) % 2 == 1 {
        return Err(Error::Parity(format!("m - n must be even and non-negative (m={m}, n={n})")));
    }
    let cols: Vec<usize> = (0..n).collect();
    let base = (m * m.saturating_sub(1) / 2) as i64;
    let mut acc = T::zero();
    for set in subsets(m, m - n) {
        let rest: Vec<usize> = (0..m).filter(|r| !set.contains(r)).collect();
        let d = w.select(&rest, &cols).det()?;
        if d.is_zero() {
            continue;
        }
        let p = pf(&z.select(&set));
        let sigma: i64 = set.iter().map(|&i| i as i64 + 1).sum();
        let term = p * d;
        acc = if sign_pow(sigma + base) == 1 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// Sign correction c(l) = (-1)^{l(l-1)/2} needed by the Cauchy-Binet-type sum.
pub fn cauchy_binet_sign(l: usize) -> i64 {
    sign_pow((l * l.saturating_sub(1) / 2) as i64)
}

/// Unsigned sum Σ_{|I| = m-l} Pf z(I) det[w([m]; I) x].
pub fn cauchy_binet_sum<T: Field>(z: &SkewMatrix<T>, w: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<T> {
    let n = z.dim();
    let m = w.rows();
    let l = x.cols();
    if w.cols() != n || x.rows() != m {
        return Err(Error::Dimension(format!(
            "w is {}x{}, x is {}x{}, z is {n}x{n}",
            w.rows(),
            w.cols(),
            x.rows(),
            x.cols()
        )));
    }
    if l > m || (m - l) % 2 == 1 || m - l > n {
        return Err(Error::Parity(format!("need m-l even and 0 <= m-l <= n (m={m}, l={l}, n={n})")));
    }
    let rows: Vec<usize> = (0..m).collect();
    let mut acc = T::zero();
    for set in subsets(n, m - l) {
        let p = pf(&z.select(&set));
        if p.is_zero() {
            continue;
        }
        let d = w.select(&rows, &set).hcat(x)?.det()?;
        acc = acc + p * d;
    }
    Ok(acc)
}

/// Cauchy-Binet-type expansion of Pf[[w z wᵀ, x], [-xᵀ, 0]].
pub fn pf_cauchy_binet<T: Field>(z: &SkewMatrix<T>, w: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<T> {
    let s = cauchy_binet_sum(z, w, x)?;
    Ok(if cauchy_binet_sign(x.cols()) == 1 { s } else { -s })
}

/// The block matrix [[w z wᵀ, x], [-xᵀ, 0]] evaluated directly.
pub fn pf_cauchy_binet_direct<T: Field>(z: &SkewMatrix<T>, w: &DenseMatrix<T>, x: &DenseMatrix<T>) -> Result<T> {
    let wzw = z.congruence(w)?;
    let full = block_skew(&wzw, x, &SkewMatrix::zeros(x.cols()))?;
    Ok(pf(&full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn skew(dim: usize, f: impl Fn(usize, usize) -> i64) -> SkewMatrix<Rational> {
        SkewMatrix::from_upper_fn(dim, |i, j| int(f(i, j)))
    }

    #[test]
    fn small_pfaffians() {
        let a = int(7);
        let m = SkewMatrix::from_upper_fn(2, |_, _| a.clone());
        assert_eq!(pf(&m), a);
        let m = skew(4, |i, j| (10 * (i + 1) + j + 1) as i64);
        // a12 a34 - a13 a24 + a14 a23
        let expect = int(12 * 34 - 13 * 24 + 14 * 23);
        assert_eq!(pf(&m), expect);
        assert_eq!(pf_expansion(&m), expect);
        assert_eq!(pf(&m.to_f64()), 12.0 * 34.0 - 13.0 * 24.0 + 14.0 * 23.0);
        assert_eq!(pf(&skew(3, |_, _| 1)), int(0));
        assert_eq!(pf(&SkewMatrix::<Rational>::zeros(0)), int(1));
    }

    #[test]
    fn zero_leading_pivot() {
        let m = skew(4, |i, j| if (i, j) == (0, 1) { 0 } else { (i + 2 * j) as i64 });
        assert_eq!(pf(&m), pf_expansion(&m));
        let f = pf(&m.to_f64());
        assert!((f - pf_expansion(&m).as_f64()).abs() < 1e-12);
        let z = skew(4, |i, _| if i == 0 { 0 } else { 1 });
        assert_eq!(pf(&z), int(0));
    }

    #[test]
    fn bipartite_sign_by_dimension() {
        for n in 1..=6 {
            let b = DenseMatrix::from_fn(n, n, |i, j| rat(((i * 5 + j * 3) % 7) as i64 - 3, (i + 1) as i64));
            let d = b.det().unwrap();
            assert_eq!(pf_bipartite(&b).unwrap(), d * int(bipartite_pf_sign(n)), "n={n}");
        }
    }

    #[test]
    fn subsets_enumerate() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn laplace_parity_error() {
        let z = SkewMatrix::<Rational>::zeros(3);
        let w = DenseMatrix::zeros(3, 2);
        assert!(matches!(pf_laplace_expansion(&z, &w), Err(Error::Parity(_))));
    }

    #[test]
    fn block_factor_singular_reports() {
        let a = SkewMatrix::<Rational>::zeros(2);
        let c = SkewMatrix::<Rational>::zeros(2);
        let b = DenseMatrix::identity(2);
        let r = pf_block_factor(&a, &b, &c).unwrap();
        assert_eq!(r.direct, int(-1));
        assert_eq!(r.unavailable().len(), 2);
    }
}
