use crate::error::{Error, Result};
use crate::kernel::{pair, PairKernel};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::measure::Measure;
use crate::partitions::Partition;
use crate::pfaffian::{block_skew, pf};
use crate::poly::Poly;
use crate::scalar::{sign_pow, Field, Rational};

use super::{
    assemble_skew, descending_monomials, distinct_vandermonde, factorial, lift, reproduction_check,
    MomentMatrixRecord, SelfReproduction,
};

/// ∫ det[f_i(x_j)] Pf[A(x_i, x_j)] dμ^N / N! with an antisymmetric kernel A.
#[derive(Clone, Debug, PartialEq)]
pub struct Beta1Model {
    basis: Vec<Poly<Rational>>,
    kernel: PairKernel,
    measure: Measure,
}

impl Beta1Model {
    pub fn new(basis: Vec<Poly<Rational>>, kernel: PairKernel, measure: Measure) -> Result<Self> {
        if !basis.len().is_multiple_of(2) {
            return Err(Error::Parity(format!("β=1 model needs an even basis, got {}", basis.len())));
        }
        if kernel.is_block() {
            return Err(Error::InvalidArgument("β=1 kernel must be scalar".into()));
        }
        if !kernel.is_antisymmetric() {
            return Err(Error::InvalidArgument(format!("kernel {kernel:?} is not antisymmetric")));
        }
        Ok(Beta1Model { basis, kernel, measure })
    }

    /// Basis x^{N-1}, …, 1 with an arbitrary antisymmetric kernel.
    pub fn vandermonde(n: usize, kernel: PairKernel, measure: Measure) -> Result<Self> {
        Self::new(descending_monomials(n), kernel, measure)
    }

    /// The orthogonal ensemble: sgn kernel and Vandermonde basis.
    pub fn standard(n: usize, measure: Measure) -> Result<Self> {
        Self::vandermonde(n, PairKernel::Sgn, measure)
    }

    /// Same kernel and measure with a Vandermonde basis of size n.
    pub fn with_size(&self, n: usize) -> Result<Self> {
        Self::vandermonde(n, self.kernel.clone(), self.measure.clone())
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Poly<Rational>] {
        &self.basis
    }

    pub fn kernel(&self) -> &PairKernel {
        &self.kernel
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn is_vandermonde(&self) -> bool {
        self.basis == descending_monomials(self.n())
    }

    fn require_vandermonde(&self, what: &str) -> Result<()> {
        if self.is_vandermonde() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} needs the Vandermonde basis")))
        }
    }

    fn pairing<T: Field>(&self, f: &Poly<Rational>, g: &Poly<Rational>) -> Result<T> {
        pair(&lift(f), &self.kernel, &lift(g), &self.measure, &self.measure)
    }

    /// 𝖭_ij = ⟨f_i|A|f_j⟩.
    pub fn moment_matrix<T: Field>(&self) -> Result<MomentMatrixRecord<T>> {
        let m = assemble_skew(self.n(), |i, j| self.pairing(&self.basis[i], &self.basis[j]))?;
        Ok(MomentMatrixRecord::from_matrix(m))
    }

    /// Z = Pf 𝖭.
    pub fn z<T: Field>(&self) -> Result<T> {
        Ok(self.moment_matrix::<T>()?.pfaffian)
    }

    pub fn cd_kernel<T: Field>(&self) -> Result<CdKernel<T>> {
        let rec = self.moment_matrix::<T>()?;
        Ok(CdKernel { basis: self.basis.iter().map(lift).collect(), inverse: rec.inverse()?.clone() })
    }

    /// K·A·K against K and Tr[K·A], all through monomial pairings.
    pub fn self_reproduction<T: Field>(&self) -> Result<SelfReproduction<T>> {
        let k = self.cd_kernel::<T>()?;
        let rows: Vec<Vec<Poly<T>>> = k.basis.iter().map(|p| vec![p.clone()]).collect();
        reproduction_check(&rows, &k.inverse, &self.kernel, &self.measure)
    }

    fn kernel_pf<T: Field>(&self, pts: &[T]) -> Result<T> {
        let mut m = SkewMatrix::zeros(pts.len());
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                m.set(i, j, self.kernel.eval_in(&pts[i], &pts[j])?);
            }
        }
        Ok(pf(&m))
    }

    /// Eigenvalue density from the CD kernel: (-1)^{N/2} Pf[K(x_i,x_j)] Pf[A(x_i,x_j)] / N!.
    pub fn density<T: Field>(&self, pts: &[T]) -> Result<T> {
        let n = self.n();
        if pts.len() != n {
            return Err(Error::Dimension(format!("density needs {n} points, got {}", pts.len())));
        }
        let k = self.cd_kernel::<T>()?;
        let v = pf(&k.matrix_at(pts)) * self.kernel_pf(pts)? / factorial::<T>(n);
        Ok(if sign_pow((n / 2) as i64) < 0 { -v } else { v })
    }

    /// det[f_i(x_j)] Pf[A(x_i,x_j)] / (N! Z).
    pub fn defining_density<T: Field>(&self, pts: &[T]) -> Result<T> {
        let n = self.n();
        if pts.len() != n {
            return Err(Error::Dimension(format!("density needs {n} points, got {}", pts.len())));
        }
        let z = self.z::<T>()?;
        if z.is_zero() {
            return Err(Error::Singular("partition function vanishes".into()));
        }
        let basis: Vec<Poly<T>> = self.basis.iter().map(lift).collect();
        let d = DenseMatrix::from_fn(n, n, |i, j| basis[i].eval(&pts[j])).det()?;
        Ok(d * self.kernel_pf(pts)? / (factorial::<T>(n) * z))
    }

    /// ⟨s_λ(X)⟩ = Pf⟨x^{λ_i+N-i}|A|x^{λ_j+N-j}⟩ / Z.
    pub fn schur_avg<T: Field>(&self, lambda: &Partition) -> Result<T> {
        self.require_vandermonde("the Schur average")?;
        let n = self.n();
        if lambda.len() > n {
            return Ok(T::zero());
        }
        let q: Vec<Poly<Rational>> = lambda.padded(n).iter().enumerate().map(|(i, l)| Poly::monomial(l + n - 1 - i)).collect();
        let m = assemble_skew::<T>(n, |i, j| self.pairing(&q[i], &q[j]))?;
        let z = self.z::<T>()?;
        if z.is_zero() {
            return Err(Error::Singular("partition function vanishes".into()));
        }
        Ok(pf(&m) / z)
    }

    /// ⟨∏_α det(z_α - X)⟩ = (-1)^{M/2} (Z_{N+M}/Z_N) Pf[K_{N+M}(z_α, z_β)] / Δ_M(z).
    pub fn char_poly_avg<T: Field>(&self, z: &[T]) -> Result<T> {
        self.require_vandermonde("the characteristic polynomial average")?;
        let m = z.len();
        if !m.is_multiple_of(2) {
            return Err(Error::Parity(format!("number of characteristic polynomials must be even, got {m}")));
        }
        if m == 0 {
            return Ok(T::one());
        }
        let delta = distinct_vandermonde(z)?;
        let big = self.with_size(self.n() + m)?;
        let rec = big.moment_matrix::<T>()?;
        let k = CdKernel { basis: big.basis.iter().map(lift).collect(), inverse: rec.inverse()?.clone() };
        let zn = self.z::<T>()?;
        let v = rec.pfaffian * pf(&k.matrix_at(z)) / (zn * delta);
        Ok(if sign_pow((m / 2) as i64) < 0 { -v } else { v })
    }

    /// Same average from Pf[[𝖭_{N+M}, F], [-Fᵀ, 0]] with F_iα = f_i(z_α); no inverse needed.
    pub fn char_poly_avg_bordered<T: Field>(&self, z: &[T]) -> Result<T> {
        self.require_vandermonde("the characteristic polynomial average")?;
        let m = z.len();
        if !m.is_multiple_of(2) {
            return Err(Error::Parity(format!("number of characteristic polynomials must be even, got {m}")));
        }
        if m == 0 {
            return Ok(T::one());
        }
        let delta = distinct_vandermonde(z)?;
        let big = self.with_size(self.n() + m)?;
        let rec = big.moment_matrix::<T>()?;
        let basis: Vec<Poly<T>> = big.basis.iter().map(lift).collect();
        let f = DenseMatrix::from_fn(basis.len(), m, |i, a| basis[i].eval(&z[a]));
        let full = block_skew(&rec.matrix, &f, &SkewMatrix::zeros(m))?;
        let zn = self.z::<T>()?;
        let v = pf(&full) / (zn * delta);
        Ok(if sign_pow((m / 2) as i64) < 0 { -v } else { v })
    }

    /// Both sides of (z - w)⟨det(z - X) det(w - X)⟩ = (Z_{N+2}/Z_N) K_{N+2}(z, w).
    pub fn borodin_two_point<T: Field>(&self, z: &T, w: &T) -> Result<(T, T)> {
        let lhs = (z.clone() - w.clone()) * self.char_poly_avg(&[z.clone(), w.clone()])?;
        let big = self.with_size(self.n() + 2)?;
        let rhs = big.z::<T>()? / self.z::<T>()? * big.cd_kernel::<T>()?.eval(z, w);
        Ok((lhs, rhs))
    }
}

/// K(x, y) = Σ f_i(x) Ñ_ij f_j(y) with Ñ = 𝖭⁻¹.
#[derive(Clone, Debug)]
pub struct CdKernel<T: Field> {
    pub basis: Vec<Poly<T>>,
    pub inverse: DenseMatrix<T>,
}

impl<T: Field> CdKernel<T> {
    pub fn eval(&self, x: &T, y: &T) -> T {
        let fx: Vec<T> = self.basis.iter().map(|p| p.eval(x)).collect();
        let fy: Vec<T> = self.basis.iter().map(|p| p.eval(y)).collect();
        let mut acc = T::zero();
        for (i, a) in fx.iter().enumerate() {
            for (j, b) in fy.iter().enumerate() {
                acc = acc + a.clone() * self.inverse.get(i, j).clone() * b.clone();
            }
        }
        acc
    }

    /// [K(x_i, x_j)].
    pub fn matrix_at(&self, pts: &[T]) -> SkewMatrix<T> {
        SkewMatrix::from_upper_fn(pts.len(), |i, j| self.eval(&pts[i], &pts[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn std(n: usize) -> Beta1Model {
        Beta1Model::standard(n, Measure::unit()).unwrap()
    }

    #[test]
    fn small_moment_matrices() {
        let r = std(2).moment_matrix::<Rational>().unwrap();
        assert_eq!(r.matrix.get(0, 1), rat(1, 6));
        assert_eq!(r.pfaffian, rat(1, 6));
        let s = r.skew.unwrap();
        assert_eq!(s.norms, vec![rat(1, 6)]);
        assert_eq!(s.transform, DenseMatrix::identity(2));

        let r = std(4).moment_matrix::<Rational>().unwrap();
        let upper = [(0, 1, rat(1, 84)), (0, 2, rat(1, 24)), (0, 3, rat(3, 20)), (1, 2, rat(1, 30)), (1, 3, rat(1, 6)), (2, 3, rat(1, 6))];
        for (i, j, v) in upper {
            assert_eq!(r.matrix.get(i, j), v, "({i},{j})");
        }
        assert_eq!(r.pfaffian, rat(1, 25200));
        assert_eq!(r.skew.unwrap().product_of_norms(), rat(1, 25200));
        assert_eq!(std(0).z::<Rational>().unwrap(), int(1));
    }

    #[test]
    fn zero_kernel() {
        let m = Beta1Model::vandermonde(4, PairKernel::Zero, Measure::unit()).unwrap();
        let r = m.moment_matrix::<Rational>().unwrap();
        assert!(r.matrix.is_zero());
        assert_eq!(r.pfaffian, int(0));
        assert!(r.inverse.is_none() && r.degenerate.is_some());
        assert!(m.cd_kernel::<Rational>().is_err());
    }

    #[test]
    fn rejects_bad_models() {
        assert!(Beta1Model::standard(3, Measure::unit()).is_err());
        assert!(Beta1Model::vandermonde(2, PairKernel::Delta.neg(), Measure::unit()).is_err());
        assert!(Beta1Model::vandermonde(2, PairKernel::Cauchy, Measure::unit()).is_ok());
        let sym = PairKernel::custom("sum", |x, y| x + y, false).unwrap();
        assert!(Beta1Model::vandermonde(2, sym, Measure::unit()).is_err());
    }

    #[test]
    fn cd_kernel_small() {
        let k = std(2).cd_kernel::<Rational>().unwrap();
        assert_eq!(k.inverse, DenseMatrix::from_rows(vec![vec![int(0), int(-6)], vec![int(6), int(0)]]).unwrap());
        for (x, y) in [(rat(1, 3), rat(1, 2)), (int(2), int(-1))] {
            assert_eq!(k.eval(&x, &y), int(6) * (y.clone() - x.clone()));
            assert_eq!(k.eval(&x, &x), int(0));
        }
    }

    #[test]
    fn self_reproducing_exact() {
        for n in [2, 4] {
            let r = std(n).self_reproduction::<Rational>().unwrap();
            assert!(r.is_exact(), "N={n}");
            assert_eq!(r.trace, int(n as i64));
        }
    }

    #[test]
    fn densities_agree() {
        let m = std(2);
        let (x, y) = (rat(1, 5), rat(2, 3));
        assert_eq!(m.density(&[x.clone(), y.clone()]).unwrap(), int(3) * (y.clone() - x.clone()));
        assert_eq!(m.density(&[x.clone(), x.clone()]).unwrap(), int(0));
        let m4 = std(4);
        let pts = [rat(1, 7), rat(5, 6), rat(1, 2), rat(1, 3)];
        assert_eq!(m4.density(&pts).unwrap(), m4.defining_density(&pts).unwrap());
    }

    #[test]
    fn schur_small() {
        let m = std(2);
        assert_eq!(m.schur_avg::<Rational>(&Partition::empty()).unwrap(), int(1));
        assert_eq!(m.schur_avg::<Rational>(&Partition::new(vec![1]).unwrap()).unwrap(), int(1));
        assert_eq!(m.schur_avg::<Rational>(&Partition::new(vec![1, 1, 1]).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn char_poly_forms_agree() {
        let m = std(2);
        let z = [int(0), int(1)];
        assert_eq!(m.char_poly_avg(&z).unwrap(), rat(3, 140));
        assert_eq!(m.char_poly_avg_bordered(&z).unwrap(), rat(3, 140));
        let z4 = [rat(1, 3), int(2), rat(-1, 2), rat(3, 4)];
        assert_eq!(m.char_poly_avg(&z4).unwrap(), m.char_poly_avg_bordered(&z4).unwrap());
        assert_eq!(m.char_poly_avg::<Rational>(&[]).unwrap(), int(1));
        assert!(m.char_poly_avg(&[int(1), int(1)]).is_err());
        assert!(m.char_poly_avg(&[int(1)]).is_err());
    }
}
