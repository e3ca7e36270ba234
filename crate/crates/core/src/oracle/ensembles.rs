//! Ensemble averages computed straight from the defining integrals, without any Pfaffian
//! of moments: sector integration for the sgn weight, polynomial integration after the δ
//! collapse, and Monte Carlo for inverse characteristic polynomials.

use num::{One, Zero};

use super::{exact_poly_integral_capped, exact_sector_integral, mc_integral, permutations, McEstimate, McTask, MultiPoly, SectorIntegrand, SignFactor};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::measure::Measure;
use crate::pfaffian::pf;
use crate::poly::Poly;
use crate::scalar::{rational_to_f64, Rational};

const CAP: u32 = 48;

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_integer((k as i64).into()))
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}

/// Leibniz expansion of a square matrix of polynomials.
pub fn det_poly(rows: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = rows.len();
    let nvars = rows.first().and_then(|r| r.first()).map_or(0, MultiPoly::nvars);
    permutations(n).iter().fold(MultiPoly::zero(nvars), |acc, p| {
        let term = (0..n).fold(MultiPoly::one(nvars), |t, i| t.mul(&rows[i][p[i]]));
        if perm_sign(p) > 0 { acc.add(&term) } else { acc.sub(&term) }
    })
}

/// ∏_α ∏_i (z_α - x_i)^power over the first `n` variables.
fn char_poly_factor(nvars: usize, n: usize, z: &[Rational], power: u32) -> MultiPoly {
    let mut r = MultiPoly::one(nvars);
    for zv in z {
        for i in 0..n {
            let f = MultiPoly::constant(nvars, zv.clone()).sub(&MultiPoly::var(nvars, i));
            r = r.mul(&f.pow(power));
        }
    }
    r
}

fn uniform_bounds(m: &Measure) -> Result<(Rational, Rational)> {
    match m {
        Measure::Uniform { a, b, .. } => Ok((a.clone(), b.clone())),
        _ => Err(Error::Unsupported("the sgn-weight oracle needs a uniform measure".into())),
    }
}

fn check_outside(z: &[f64], support: (f64, f64)) -> Result<()> {
    if let Some(v) = z.iter().find(|v| support.0 <= **v && **v <= support.1) {
        return Err(Error::InsideSupport(format!("{v} lies in [{}, {}]", support.0, support.1)));
    }
    Ok(())
}

/// (1/N!) det[f_j(x_i)] Pf[sgn(x_i - x_j)] against Lebesgue measure on [a, b]^N.
#[derive(Clone, Debug)]
pub struct SgnEnsemble {
    basis: Vec<Poly<Rational>>,
    a: Rational,
    b: Rational,
}

impl SgnEnsemble {
    pub fn new(basis: Vec<Poly<Rational>>, measure: &Measure) -> Result<Self> {
        if !basis.len().is_multiple_of(2) {
            return Err(Error::Parity(format!("sgn weight needs an even number of variables, got {}", basis.len())));
        }
        let (a, b) = uniform_bounds(measure)?;
        Ok(SgnEnsemble { basis, a, b })
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    fn weight(&self, nvars: usize) -> MultiPoly {
        let n = self.n();
        let rows: Vec<Vec<MultiPoly>> =
            (0..n).map(|i| self.basis.iter().map(|f| MultiPoly::univariate(nvars, i, f)).collect()).collect();
        det_poly(&rows).scale(&(Rational::one() / factorial(n)))
    }

    fn integrate(&self, poly: MultiPoly) -> Result<Rational> {
        let signs = SignFactor::Pfaffian((0..self.n()).collect());
        let s = SectorIntegrand::new(poly, signs).on_interval(self.a.clone(), self.b.clone()).with_degree_cap(CAP);
        exact_sector_integral(&s)
    }

    pub fn z(&self) -> Result<Rational> {
        self.integrate(self.weight(self.n()))
    }

    /// ⟨∏_α det(z_α - X)⟩.
    pub fn char_poly(&self, z: &[Rational]) -> Result<Rational> {
        let n = self.n();
        let num = self.integrate(self.weight(n).mul(&char_poly_factor(n, n, z, 1)))?;
        Ok(num / self.z()?)
    }

    /// ⟨∏_α det(z_α - X)^{-1}⟩: the numerator by Monte Carlo, Z exact.
    pub fn inverse_char_poly(&self, z: &[f64], samples: u64, seed: u64) -> Result<McEstimate> {
        let (a, b) = (rational_to_f64(&self.a), rational_to_f64(&self.b));
        check_outside(z, (a, b))?;
        let n = self.n();
        let f: Vec<Poly<f64>> = self.basis.iter().map(Poly::to_f64).collect();
        let norm = 1.0 / rational_to_f64(&factorial(n));
        let measure = Measure::uniform(self.a.clone(), self.b.clone())?;
        let task = McTask { measures: vec![measure; n], samples, seed };
        let est = mc_integral(&task, |x| {
            let det = DenseMatrix::from_fn(n, n, |i, j| f[j].eval(&x[i])).det().unwrap_or(f64::NAN);
            let sgn = pf(&SkewMatrix::from_upper_fn(n, |i, j| (x[i] - x[j]).signum()));
            let denom: f64 = z.iter().flat_map(|zv| x.iter().map(move |xi| zv - xi)).product();
            norm * det * sgn / denom
        })?;
        scale(est, 1.0 / rational_to_f64(&self.z()?))
    }
}

/// (1/N!²) ∫ det[f_j(x_i), g_j(x̃_i)] Pf 𝖠 with A = B = 0, S = δ, after integrating x̃
/// against the δ: Σ_σ sgn σ det[f_j(x_i), g_j(x_{σ(i)})] (rows interleaved).
#[derive(Clone, Debug)]
pub struct DeltaEnsemble {
    fbasis: Vec<Poly<Rational>>,
    gbasis: Vec<Poly<Rational>>,
    measure: Measure,
}

impl DeltaEnsemble {
    pub fn new(fbasis: Vec<Poly<Rational>>, gbasis: Vec<Poly<Rational>>, measure: Measure) -> Result<Self> {
        if fbasis.len() != gbasis.len() || !fbasis.len().is_multiple_of(2) {
            return Err(Error::Dimension("δ-collapsed weight needs 2N pairs (f_j, g_j)".into()));
        }
        Ok(DeltaEnsemble { fbasis, gbasis, measure })
    }

    /// f_j = x^{2N-1-j}, g_j = f_j′.
    pub fn vandermonde(n: usize, measure: Measure) -> Result<Self> {
        let f: Vec<Poly<Rational>> = (0..2 * n).rev().map(Poly::monomial).collect();
        let g = f.iter().map(Poly::derivative).collect();
        Self::new(f, g, measure)
    }

    pub fn n(&self) -> usize {
        self.fbasis.len() / 2
    }

    fn weight(&self, nvars: usize) -> MultiPoly {
        let n = self.n();
        let total = permutations(n).iter().fold(MultiPoly::zero(nvars), |acc, sigma| {
            let rows: Vec<Vec<MultiPoly>> = (0..2 * n)
                .map(|r| {
                    let (i, tilde) = (r / 2, r % 2 == 1);
                    let (basis, var) = if tilde { (&self.gbasis, sigma[i]) } else { (&self.fbasis, i) };
                    basis.iter().map(|p| MultiPoly::univariate(nvars, var, p)).collect()
                })
                .collect();
            let d = det_poly(&rows);
            if perm_sign(sigma) > 0 { acc.add(&d) } else { acc.sub(&d) }
        });
        let nf = factorial(n);
        total.scale(&(Rational::one() / (nf.clone() * nf)))
    }

    fn integrate(&self, poly: &MultiPoly) -> Result<Rational> {
        exact_poly_integral_capped(poly, &vec![self.measure.clone(); poly.nvars()], CAP)
    }

    pub fn z(&self) -> Result<Rational> {
        self.integrate(&self.weight(self.n()))
    }

    /// ⟨∏_α det(z_α - X)⟩ with each eigenvalue counted for x and x̃, i.e. ∏ (z_α - x_i)².
    pub fn char_poly(&self, z: &[Rational]) -> Result<Rational> {
        let n = self.n();
        let num = self.integrate(&self.weight(n).mul(&char_poly_factor(n, n, z, 2)))?;
        let den = self.z()?;
        if den.is_zero() {
            return Err(Error::Singular("vanishing partition function".into()));
        }
        Ok(num / den)
    }

    /// ⟨∏_α ∏_i (z_α - x_i)^{-2}⟩: the numerator by Monte Carlo, Z exact.
    pub fn inverse_char_poly(&self, z: &[f64], samples: u64, seed: u64) -> Result<McEstimate> {
        check_outside(z, self.measure.support())?;
        let n = self.n();
        let weight = self.weight(n);
        let task = McTask { measures: vec![self.measure.clone(); n], samples, seed };
        let est = mc_integral(&task, |x| {
            let denom: f64 = z.iter().flat_map(|zv| x.iter().map(move |xi| (zv - xi) * (zv - xi))).product();
            weight.eval::<f64>(x) / denom
        })?;
        scale(est, 1.0 / rational_to_f64(&self.z()?))
    }
}

fn scale(e: McEstimate, c: f64) -> Result<McEstimate> {
    if !c.is_finite() {
        return Err(Error::Singular("vanishing partition function".into()));
    }
    Ok(McEstimate { estimate: e.estimate * c, stderr: e.stderr * c.abs(), samples: e.samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn descending(n: usize) -> Vec<Poly<Rational>> {
        (0..n).rev().map(Poly::monomial).collect()
    }

    #[test]
    fn sgn_weight_values() {
        let e = SgnEnsemble::new(descending(2), &Measure::unit()).unwrap();
        assert_eq!(e.z().unwrap(), rat(1, 6));
        assert_eq!(e.char_poly(&[int(0), int(1)]).unwrap(), rat(3, 140));
        assert_eq!(e.char_poly(&[]).unwrap(), int(1));
        let e4 = SgnEnsemble::new(descending(4), &Measure::unit()).unwrap();
        assert_eq!(e4.z().unwrap(), rat(1, 25200));
        assert!(SgnEnsemble::new(descending(3), &Measure::unit()).is_err());
    }

    #[test]
    fn delta_weight_values() {
        // signed: (-1)^N (1/N!) ∫ Δ⁴
        assert_eq!(DeltaEnsemble::vandermonde(1, Measure::unit()).unwrap().z().unwrap(), int(-1));
        assert_eq!(DeltaEnsemble::vandermonde(2, Measure::unit()).unwrap().z().unwrap(), rat(1, 30));
        let e = DeltaEnsemble::vandermonde(1, Measure::unit()).unwrap();
        assert_eq!(e.char_poly(&[int(2), int(3)]).unwrap(), rat(481, 30));
    }

    #[test]
    fn inverse_rejects_points_in_support() {
        let e = SgnEnsemble::new(descending(2), &Measure::unit()).unwrap();
        assert!(matches!(e.inverse_char_poly(&[0.5, 2.0], 10, 1), Err(Error::InsideSupport(_))));
        let est = e.inverse_char_poly(&[2.0, 3.0], 20_000, 1).unwrap();
        assert!(est.estimate > 0.0 && est.stderr > 0.0);
    }
}
