use crate::error::{Error, Result};
use crate::kernel::{pair_block, PairKernel};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::measure::Measure;
use crate::partitions::Partition;
use crate::pfaffian::{block_skew, pf};
use crate::poly::Poly;
use crate::scalar::{sign_pow, Field, Rational};

use super::{
    assemble_skew, descending_monomials, distinct_vandermonde, lift, reproduction_check, MomentMatrixRecord,
    SelfReproduction,
};

/// Pf[⟨f_i, g_i|𝖠|f_j, g_j⟩] model with 𝖠 = [[A, S], [-Sᵀ, B]] on 2N function pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Beta4Model {
    fbasis: Vec<Poly<Rational>>,
    gbasis: Vec<Poly<Rational>>,
    kernel: PairKernel,
    measure: Measure,
}

impl Beta4Model {
    /// Assembles 𝖠 from A, S, B; A and B must be antisymmetric.
    pub fn from_parts(
        fbasis: Vec<Poly<Rational>>,
        gbasis: Vec<Poly<Rational>>,
        a: PairKernel,
        s: PairKernel,
        b: PairKernel,
        measure: Measure,
    ) -> Result<Self> {
        for (name, k) in [("A", &a), ("B", &b)] {
            if k.is_block() || !k.is_antisymmetric() {
                return Err(Error::InvalidArgument(format!("{name} = {k:?} must be a scalar antisymmetric kernel")));
            }
        }
        if s.is_block() {
            return Err(Error::InvalidArgument("S must be a scalar kernel".into()));
        }
        let kernel = PairKernel::block(a, s.clone(), s.transpose().neg(), b);
        Self::new(fbasis, gbasis, kernel, measure)
    }

    pub fn new(fbasis: Vec<Poly<Rational>>, gbasis: Vec<Poly<Rational>>, kernel: PairKernel, measure: Measure) -> Result<Self> {
        if fbasis.len() != gbasis.len() {
            return Err(Error::Dimension(format!("{} f functions vs {} g functions", fbasis.len(), gbasis.len())));
        }
        if !fbasis.len().is_multiple_of(2) {
            return Err(Error::Parity(format!("β=4 model needs 2N functions, got {}", fbasis.len())));
        }
        if !kernel.is_block() || !kernel.is_antisymmetric() {
            return Err(Error::InvalidArgument(format!("{kernel:?} is not an antisymmetric block kernel")));
        }
        Ok(Beta4Model { fbasis, gbasis, kernel, measure })
    }

    /// f_i = x^{2N-1-i}, g_i = f_i′ with the given block kernel.
    pub fn vandermonde(n: usize, kernel: PairKernel, measure: Measure) -> Result<Self> {
        let f = descending_monomials(2 * n);
        let g = f.iter().map(Poly::derivative).collect();
        Self::new(f, g, kernel, measure)
    }

    /// The symplectic ensemble: A = B = 0, S = δ.
    pub fn standard(n: usize, measure: Measure) -> Result<Self> {
        Self::vandermonde(n, standard_kernel(), measure)
    }

    pub fn with_size(&self, n: usize) -> Result<Self> {
        Self::vandermonde(n, self.kernel.clone(), self.measure.clone())
    }

    /// Number of eigenvalues N; the basis has 2N pairs.
    pub fn n(&self) -> usize {
        self.fbasis.len() / 2
    }

    pub fn fbasis(&self) -> &[Poly<Rational>] {
        &self.fbasis
    }

    pub fn gbasis(&self) -> &[Poly<Rational>] {
        &self.gbasis
    }

    pub fn kernel(&self) -> &PairKernel {
        &self.kernel
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn is_vandermonde(&self) -> bool {
        self.fbasis == descending_monomials(self.fbasis.len())
            && self.gbasis.iter().zip(&self.fbasis).all(|(g, f)| *g == f.derivative())
    }

    fn require_vandermonde(&self, what: &str) -> Result<()> {
        if self.is_vandermonde() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} needs f = x^(2N-1-i), g = f′")))
        }
    }

    fn pairing<T: Field>(&self, l: (&Poly<Rational>, &Poly<Rational>), r: (&Poly<Rational>, &Poly<Rational>)) -> Result<T> {
        pair_block((&lift(l.0), &lift(l.1)), &self.kernel, (&lift(r.0), &lift(r.1)), &self.measure, &self.measure)
    }

    /// 𝖭_ij = ⟨f_i, g_i|𝖠|f_j, g_j⟩.
    pub fn moment_matrix<T: Field>(&self) -> Result<MomentMatrixRecord<T>> {
        let m = assemble_skew(self.fbasis.len(), |i, j| {
            self.pairing((&self.fbasis[i], &self.gbasis[i]), (&self.fbasis[j], &self.gbasis[j]))
        })?;
        Ok(MomentMatrixRecord::from_matrix(m))
    }

    /// Z = Pf 𝖭. For the symplectic ensemble Z = (-1)^N ∫Δ⁴/N!.
    pub fn z<T: Field>(&self) -> Result<T> {
        Ok(self.moment_matrix::<T>()?.pfaffian)
    }

    pub fn matrix_cd_kernel<T: Field>(&self) -> Result<MatrixCdKernel<T>> {
        let rec = self.moment_matrix::<T>()?;
        Ok(MatrixCdKernel {
            f: self.fbasis.iter().map(lift).collect(),
            g: self.gbasis.iter().map(lift).collect(),
            inverse: rec.inverse()?.clone(),
        })
    }

    /// 𝖪·𝖠·𝖪 against 𝖪 and Tr[𝖪·𝖠], all through monomial pairings.
    pub fn self_reproduction<T: Field>(&self) -> Result<SelfReproduction<T>> {
        let k = self.matrix_cd_kernel::<T>()?;
        let rows: Vec<Vec<Poly<T>>> = k.f.iter().zip(&k.g).map(|(f, g)| vec![f.clone(), g.clone()]).collect();
        reproduction_check(&rows, &k.inverse, &self.kernel, &self.measure)
    }

    /// Pf⟨q_i, q_i′|𝖠|q_j, q_j′⟩ / Z with q_i = x^{λ_i+2N-1-i}.
    pub fn schur_avg_modified<T: Field>(&self, lambda: &Partition) -> Result<T> {
        self.require_vandermonde("the modified Schur average")?;
        let size = self.fbasis.len();
        if lambda.len() > size {
            return Ok(T::zero());
        }
        let q: Vec<Poly<Rational>> =
            lambda.padded(size).iter().enumerate().map(|(i, l)| Poly::monomial(l + size - 1 - i)).collect();
        let dq: Vec<Poly<Rational>> = q.iter().map(Poly::derivative).collect();
        let m = assemble_skew::<T>(size, |i, j| self.pairing((&q[i], &dq[i]), (&q[j], &dq[j])))?;
        let z = self.z::<T>()?;
        if z.is_zero() {
            return Err(Error::Singular("partition function vanishes".into()));
        }
        Ok(pf(&m) / z)
    }

    fn char_poly_setup<T: Field>(&self, z: &[T]) -> Result<Option<(Beta4Model, T)>> {
        self.require_vandermonde("the characteristic polynomial average")?;
        let m = z.len();
        if !m.is_multiple_of(2) {
            return Err(Error::Parity(format!("number of characteristic polynomials must be even, got {m}")));
        }
        if m == 0 {
            return Ok(None);
        }
        let delta = distinct_vandermonde(z)?;
        Ok(Some((self.with_size(self.n() + m / 2)?, delta)))
    }

    /// ⟨∏_α det(z_α - X)²⟩ = (-1)^{M/2} (Z_{N+M/2}/Z_N) Pf[K_{N+M/2}(z_α, z_β)] / Δ_M(z),
    /// K being the (1,1) entry of the matrix CD kernel.
    pub fn char_poly_avg<T: Field>(&self, z: &[T]) -> Result<T> {
        let Some((big, delta)) = self.char_poly_setup(z)? else {
            return Ok(T::one());
        };
        let rec = big.moment_matrix::<T>()?;
        let k = MatrixCdKernel { f: big.fbasis.iter().map(lift).collect(), g: Vec::new(), inverse: rec.inverse()?.clone() };
        let kz = SkewMatrix::from_upper_fn(z.len(), |a, b| k.k11(&z[a], &z[b]));
        let v = rec.pfaffian * pf(&kz) / (self.z::<T>()? * delta);
        Ok(if sign_pow((z.len() / 2) as i64) < 0 { -v } else { v })
    }

    /// Same average from Pf[[𝖭_{N+M/2}, F], [-Fᵀ, 0]] with F_iα = f_i(z_α).
    pub fn char_poly_avg_bordered<T: Field>(&self, z: &[T]) -> Result<T> {
        let Some((big, delta)) = self.char_poly_setup(z)? else {
            return Ok(T::one());
        };
        let rec = big.moment_matrix::<T>()?;
        let f: Vec<Poly<T>> = big.fbasis.iter().map(lift).collect();
        let fz = DenseMatrix::from_fn(f.len(), z.len(), |i, a| f[i].eval(&z[a]));
        let full = block_skew(&rec.matrix, &fz, &SkewMatrix::zeros(z.len()))?;
        let v = pf(&full) / (self.z::<T>()? * delta);
        Ok(if sign_pow((z.len() / 2) as i64) < 0 { -v } else { v })
    }
}

/// [[0, δ], [-δᵀ, 0]].
pub fn standard_kernel() -> PairKernel {
    PairKernel::block(PairKernel::Zero, PairKernel::Delta, PairKernel::Delta.transpose().neg(), PairKernel::Zero)
}

/// 𝖪(x, x̃; y, ỹ) = Σ [f_i(x); g_i(y)] Ñ_ij [f_j(x̃), g_j(ỹ)].
#[derive(Clone, Debug)]
pub struct MatrixCdKernel<T: Field> {
    pub f: Vec<Poly<T>>,
    pub g: Vec<Poly<T>>,
    pub inverse: DenseMatrix<T>,
}

impl<T: Field> MatrixCdKernel<T> {
    fn bilinear(&self, left: &[T], right: &[T]) -> T {
        let mut acc = T::zero();
        for (i, a) in left.iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                acc = acc + a.clone() * self.inverse.get(i, j).clone() * b.clone();
            }
        }
        acc
    }

    /// Σ f_i(x) Ñ_ij f_j(y).
    pub fn k11(&self, x: &T, y: &T) -> T {
        let l: Vec<T> = self.f.iter().map(|p| p.eval(x)).collect();
        let r: Vec<T> = self.f.iter().map(|p| p.eval(y)).collect();
        self.bilinear(&l, &r)
    }

    pub fn eval(&self, x: &T, x_t: &T, y: &T, y_t: &T) -> [[T; 2]; 2] {
        let fx: Vec<T> = self.f.iter().map(|p| p.eval(x)).collect();
        let gy: Vec<T> = self.g.iter().map(|p| p.eval(y)).collect();
        let fxt: Vec<T> = self.f.iter().map(|p| p.eval(x_t)).collect();
        let gyt: Vec<T> = self.g.iter().map(|p| p.eval(y_t)).collect();
        [
            [self.bilinear(&fx, &fxt), self.bilinear(&fx, &gyt)],
            [self.bilinear(&gy, &fxt), self.bilinear(&gy, &gyt)],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn std(n: usize) -> Beta4Model {
        Beta4Model::standard(n, Measure::unit()).unwrap()
    }

    #[test]
    fn small_partition_functions() {
        let r = std(1).moment_matrix::<Rational>().unwrap();
        assert_eq!(r.matrix.get(0, 1), int(-1));
        assert_eq!(r.pfaffian, int(-1));
        assert_eq!(std(2).z::<Rational>().unwrap(), rat(1, 30));
        let zero = Beta4Model::vandermonde(
            2,
            PairKernel::block(PairKernel::Zero, PairKernel::Zero, PairKernel::Zero, PairKernel::Zero),
            Measure::unit(),
        )
        .unwrap();
        assert_eq!(zero.z::<Rational>().unwrap(), int(0));
    }

    #[test]
    fn from_parts_matches_standard() {
        let f = descending_monomials(4);
        let g = f.iter().map(Poly::derivative).collect();
        let m = Beta4Model::from_parts(f, g, PairKernel::Zero, PairKernel::Delta, PairKernel::Zero, Measure::unit()).unwrap();
        assert_eq!(m.z::<Rational>().unwrap(), std(2).z::<Rational>().unwrap());
        assert!(Beta4Model::from_parts(vec![], vec![], PairKernel::Delta, PairKernel::Delta, PairKernel::Zero, Measure::unit()).is_err());
    }

    #[test]
    fn matrix_kernel_small() {
        let k = std(1).matrix_cd_kernel::<Rational>().unwrap();
        assert_eq!(k.inverse, DenseMatrix::from_rows(vec![vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap());
        let (x, y) = (rat(1, 3), rat(3, 4));
        assert_eq!(k.k11(&x, &y), x.clone() - y.clone());
        assert_eq!(k.k11(&x, &y), -k.k11(&y, &x));
    }

    #[test]
    fn self_reproducing_exact() {
        for n in [1, 2] {
            let r = std(n).self_reproduction::<Rational>().unwrap();
            assert!(r.is_exact(), "N={n}");
            assert_eq!(r.trace, int(2 * n as i64));
        }
    }

    #[test]
    fn modified_schur() {
        let m = std(1);
        assert_eq!(m.schur_avg_modified::<Rational>(&Partition::empty()).unwrap(), int(1));
        assert_eq!(m.schur_avg_modified::<Rational>(&Partition::new(vec![1]).unwrap()).unwrap(), int(1));
        assert_eq!(m.schur_avg_modified::<Rational>(&Partition::new(vec![1, 1, 1]).unwrap()).unwrap(), int(0));
    }

    #[test]
    fn char_poly_forms_agree() {
        // N=1: ∫(2-x)²(3-x)² dx on [0,1]
        let expected = rat(481, 30);
        let m = std(1);
        let z = [int(2), int(3)];
        assert_eq!(m.char_poly_avg(&z).unwrap(), expected);
        assert_eq!(m.char_poly_avg_bordered(&z).unwrap(), expected);
        let m2 = std(2);
        assert_eq!(m2.char_poly_avg(&z).unwrap(), m2.char_poly_avg_bordered(&z).unwrap());
    }
}
