//! Generalized β=1 and β=4 models: moment matrices, partition functions, CD kernels,
//! Schur and characteristic polynomial averages.

mod beta1;
mod beta4;
mod dual;

pub use beta1::{Beta1Model, CdKernel};
pub use beta4::{standard_kernel, Beta4Model, MatrixCdKernel};
pub use dual::{
    char_poly_inv_avg_beta1, char_poly_inv_avg_beta4, DualFamily, DualKernel, DualMatrix, DualRoute, InverseAverage,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{pair, PairKernel};
use crate::matrix::{DenseMatrix, Pivoting, SkewMatrix};
use crate::measure::Measure;
use crate::pfaffian::pf;
use crate::poly::Poly;
use crate::scalar::{Field, Rational};

/// x^{n-1}, …, x, 1.
pub fn descending_monomials(n: usize) -> Vec<Poly<Rational>> {
    (0..n).rev().map(Poly::monomial).collect()
}

/// 1, x, …, x^{n-1}.
pub fn ascending_monomials(n: usize) -> Vec<Poly<Rational>> {
    (0..n).map(Poly::monomial).collect()
}

pub(crate) fn lift<T: Field>(p: &Poly<Rational>) -> Poly<T> {
    p.map(|c| T::from_rational(c))
}

/// Unit lower-triangular change of basis bringing a skew matrix to 2×2 block form.
#[derive(Clone, Debug)]
pub struct SkewBasisChange<T> {
    /// Row i holds the coefficients of F_i in the input basis.
    pub transform: DenseMatrix<T>,
    /// h_i = ⟨F_{2i}|A|F_{2i+1}⟩.
    pub norms: Vec<T>,
}

impl<T: Field> SkewBasisChange<T> {
    /// Σ_j L_ij b_j for every i.
    pub fn apply(&self, basis: &[Poly<T>]) -> Vec<Poly<T>> {
        (0..self.transform.rows()).map(|i| Poly::combination(self.transform.row(i), basis)).collect()
    }

    pub fn product_of_norms(&self) -> T {
        self.norms.iter().fold(T::one(), |acc, h| acc * h.clone())
    }
}

fn pivot_vanishes<T: Field>(h: &T, scale: f64) -> bool {
    if T::EXACT {
        h.is_zero()
    } else {
        h.magnitude() <= 1e-13 * scale
    }
}

/// Skew Gram–Schmidt over consecutive pairs. Fails when a leading 2k×2k Pfaffian vanishes.
pub fn skew_orthogonalize<T: Field>(m: &SkewMatrix<T>) -> Result<SkewBasisChange<T>> {
    let n = m.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::Parity(format!("skew orthogonalization of odd dimension {n}")));
    }
    let mut w = m.to_dense();
    let mut l = DenseMatrix::<T>::identity(n);
    let scale = w.entries().iter().map(|x| x.magnitude()).fold(0.0, f64::max);
    let mut norms = Vec::with_capacity(n / 2);
    for k in (0..n).step_by(2) {
        let h = w.get(k, k + 1).clone();
        if pivot_vanishes(&h, scale) {
            return Err(Error::Degenerate(format!("leading Pfaffian of size {} vanishes", k + 2)));
        }
        for j in k + 2..n {
            let c1 = w.get(j, k + 1).clone() / h.clone();
            let c0 = w.get(j, k).clone() / h.clone();
            if c1.is_zero() && c0.is_zero() {
                continue;
            }
            // row_j ← row_j - c1 row_k + c0 row_{k+1}, on L and by congruence on W
            for c in 0..n {
                let v = l.get(j, c).clone() - c1.clone() * l.get(k, c).clone() + c0.clone() * l.get(k + 1, c).clone();
                l.set(j, c, v);
                let v = w.get(j, c).clone() - c1.clone() * w.get(k, c).clone() + c0.clone() * w.get(k + 1, c).clone();
                w.set(j, c, v);
            }
            for r in 0..n {
                let v = w.get(r, j).clone() - c1.clone() * w.get(r, k).clone() + c0.clone() * w.get(r, k + 1).clone();
                w.set(r, j, v);
            }
        }
        norms.push(h);
    }
    Ok(SkewBasisChange { transform: l, norms })
}

/// Skew moment matrix with its Pfaffian and, when available, inverse and skew basis.
#[derive(Clone, Debug)]
pub struct MomentMatrixRecord<T> {
    pub matrix: SkewMatrix<T>,
    pub pfaffian: T,
    pub inverse: Option<DenseMatrix<T>>,
    pub skew: Option<SkewBasisChange<T>>,
    /// Why the inverse or the skew basis is missing.
    pub degenerate: Option<String>,
}

impl<T: Field> MomentMatrixRecord<T> {
    pub fn from_matrix(matrix: SkewMatrix<T>) -> Self {
        let pfaffian = pf(&matrix);
        let mut degenerate = None;
        let inverse = match matrix.to_dense().inverse_with(Pivoting::default()) {
            Ok(inv) => Some(inv),
            Err(e) => {
                degenerate = Some(e.to_string());
                None
            }
        };
        let skew = match skew_orthogonalize(&matrix) {
            Ok(s) => Some(s),
            Err(e) => {
                degenerate.get_or_insert(e.to_string());
                None
            }
        };
        MomentMatrixRecord { matrix, pfaffian, inverse, skew, degenerate }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn inverse(&self) -> Result<&DenseMatrix<T>> {
        self.inverse
            .as_ref()
            .ok_or_else(|| Error::Singular(self.degenerate.clone().unwrap_or_else(|| "moment matrix".into())))
    }

    /// Σ_ij Ñ_ij N_ji, which is the matrix size when Ñ = N⁻¹.
    pub fn trace_identity(&self) -> Result<T> {
        let inv = self.inverse()?;
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + inv.get(i, j).clone() * self.matrix.get(j, i);
            }
        }
        Ok(acc)
    }
}

/// Skew matrix with entries entry(i, j) for i < j, evaluated in parallel.
pub(crate) fn assemble_skew<T: Field>(
    n: usize,
    entry: impl Fn(usize, usize) -> Result<T> + Sync,
) -> Result<SkewMatrix<T>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<T> = pairs.par_iter().map(|&(i, j)| entry(i, j)).collect::<Result<_>>()?;
    let mut m = SkewMatrix::zeros(n);
    for ((i, j), v) in pairs.into_iter().zip(values) {
        m.set(i, j, v);
    }
    Ok(m)
}

/// Δ_M(z) = ∏_{α<β} (z_α - z_β), rejecting repeated points.
pub(crate) fn distinct_vandermonde<T: Field>(z: &[T]) -> Result<T> {
    let d = crate::partitions::vandermonde(z);
    if d.is_zero() {
        return Err(Error::RepeatedPoints("evaluation points must be distinct".into()));
    }
    Ok(d)
}

/// Outcome of the self-reproduction check for a CD kernel written in monomials.
#[derive(Clone, Debug)]
pub struct SelfReproduction<T> {
    /// Monomial coefficients of the kernel, blocks indexed by component.
    pub coefficients: DenseMatrix<T>,
    /// Coefficients of K·A·K.
    pub reproduced: DenseMatrix<T>,
    /// Tr[K·A].
    pub trace: T,
}

impl<T: Field> SelfReproduction<T> {
    /// Largest entry of K·A·K - K.
    pub fn max_residual(&self) -> f64 {
        self.reproduced
            .entries()
            .iter()
            .zip(self.coefficients.entries())
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn is_exact(&self) -> bool {
        self.reproduced == self.coefficients
    }
}

/// Component kernels of a scalar or 2×2 block kernel.
pub(crate) fn components(k: &PairKernel) -> Vec<Vec<PairKernel>> {
    match k.canonical() {
        PairKernel::Matrix2x2(b) => {
            let [a, s, t, c] = *b;
            vec![vec![a, s], vec![t, c]]
        }
        other => vec![vec![other]],
    }
}

/// Builds C with K_ab(x, y) = Σ_pq C[(a,p),(b,q)] x^p y^q from the basis and Ñ, then
/// compares C·P·C with C, where P holds the monomial pairings of every kernel component.
pub(crate) fn reproduction_check<T: Field>(
    basis: &[Vec<Poly<T>>],
    inverse: &DenseMatrix<T>,
    kernel: &PairKernel,
    measure: &Measure,
) -> Result<SelfReproduction<T>> {
    let comps = components(kernel);
    let c = comps.len();
    let width = basis
        .iter()
        .flatten()
        .filter_map(|p| p.degree())
        .max()
        .map_or(1, |d| d + 1);
    let dim = c * width;
    // B[i, (a,p)] = coefficient of x^p in component a of basis function i
    let b = DenseMatrix::from_fn(basis.len(), dim, |i, col| basis[i][col / width].coeff(col % width));
    let coefficients = b.transpose().matmul(inverse)?.matmul(&b)?;
    let cells: Vec<(usize, usize)> = (0..dim).flat_map(|r| (0..dim).map(move |s| (r, s))).collect();
    let values: Vec<T> = cells
        .par_iter()
        .map(|&(r, s)| {
            let k = &comps[r / width][s / width];
            if *k == PairKernel::Zero {
                return Ok(T::zero());
            }
            pair(&Poly::monomial(r % width), k, &Poly::monomial(s % width), measure, measure)
        })
        .collect::<Result<_>>()?;
    let p = DenseMatrix::from_vec(dim, dim, values)?;
    let cp = coefficients.matmul(&p)?;
    let reproduced = cp.matmul(&coefficients)?;
    let trace = cp.trace();
    Ok(SelfReproduction { coefficients, reproduced, trace })
}

pub(crate) fn factorial<T: Field>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_i64(k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn gram_schmidt_blocks() {
        let m = SkewMatrix::from_upper_fn(4, |i, j| rat((i + 2 * j) as i64, (1 + i * j) as i64));
        let s = skew_orthogonalize(&m).unwrap();
        let reduced = m.congruence(&s.transform).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                let expected = if j == i + 1 && i % 2 == 0 { s.norms[i / 2].clone() } else { int(0) };
                assert_eq!(reduced.get(i, j), expected);
            }
        }
        assert_eq!(s.product_of_norms(), pf(&m));
    }

    #[test]
    fn block_input_is_fixed() {
        let mut m = SkewMatrix::zeros(4);
        m.set(0, 1, rat(1, 6));
        m.set(2, 3, int(3));
        let s = skew_orthogonalize(&m).unwrap();
        assert_eq!(s.transform, DenseMatrix::identity(4));
        assert_eq!(s.norms, vec![rat(1, 6), int(3)]);
    }

    #[test]
    fn vanishing_pivot_is_reported() {
        let mut m = SkewMatrix::zeros(4);
        m.set(0, 2, int(1));
        m.set(1, 3, int(1));
        assert!(matches!(skew_orthogonalize(&m), Err(Error::Degenerate(_))));
        let rec = MomentMatrixRecord::from_matrix(m);
        assert!(rec.inverse.is_some() && rec.skew.is_none());
        assert_eq!(rec.pfaffian, int(-1));
    }
}
