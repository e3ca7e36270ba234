//! Dual CD kernels ⟨h_z|Ā_n|h_w⟩ with h_z(x) = 1/(z - x), and inverse characteristic
//! polynomial averages built from them.
//!
//! Ā_n removes from A its projection onto the first n basis functions. The projection is
//! written in a skew-orthonormal family ψ_k, ⟨ψ_{2i}|A|ψ_{2j+1}⟩ = δ_ij, so that
//!
//!   Ā_n = A - Σ_{i<n/2} (A|ψ_{2i+1}⟩⟨ψ_{2i}|A - A|ψ_{2i}⟩⟨ψ_{2i+1}|A)
//!
//! and with T_k(z) = ⟨h_z|A|ψ_k⟩ each pair contributes T_{2i}(z)T_{2i+1}(w) - T_{2i+1}(z)T_{2i}(w).
//! The direct route subtracts the first n/2 pairs from ⟨h_z|A|h_w⟩; the series route sums
//! the pairs from n/2 up to the cutoff. For β=4 the functions are pairs (φ, φ′) and the
//! probe is (h_z, h_z′) = (1/(z-x), 1/(z-x)²).

use crate::error::{Error, Result};
use crate::hilbert::cauchy_transform;
use crate::kernel::{kernel_matrix, pair, PairKernel};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::measure::Measure;
use crate::pfaffian::{block_skew, pf};
use crate::poly::Poly;
use crate::scalar::{rational_from_f64, sign_pow, Field, Rational};

use super::{ascending_monomials, components, skew_orthogonalize, Beta1Model, Beta4Model};

/// Quadrature order for pairings where both sides are Cauchy probes.
const PROBE_ORDER: usize = 256;

#[derive(Clone, Debug)]
enum Func {
    Poly(Poly<Rational>),
    /// 1/(z - x)^power.
    Cauchy { z: f64, power: u32 },
}

impl Func {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Func::Poly(p) => p.to_f64().eval(&x),
            Func::Cauchy { z, power } => (z - x).powi(-(*power as i32)),
        }
    }
}

/// ∫∫ u(x) K(x, y) v(y) dμ dμ over node values.
fn quadrature_pair(u: &Func, k: &PairKernel, v: &Func, mu: &Measure) -> Result<f64> {
    let mu = match mu {
        Measure::Uniform { .. } => mu.with_order(mu.order().max(PROBE_ORDER)),
        _ => mu.clone(),
    };
    let w = kernel_matrix(k, &mu, &mu)?;
    let nodes = mu.nodes();
    let uv: Vec<f64> = nodes.iter().map(|(x, _)| u.eval(*x)).collect();
    let vv: Vec<f64> = nodes.iter().map(|(x, _)| v.eval(*x)).collect();
    let mut acc = 0.0;
    for (a, ua) in uv.iter().enumerate() {
        for (b, vb) in vv.iter().enumerate() {
            acc += ua * w.get(a, b) * vb;
        }
    }
    Ok(acc)
}

/// ∫ (z - x)^{-p} ∫ sgn(x - y) (w - y)^{-q} dy dx on [a, b], the inner integral in closed form.
fn sgn_cauchy_cauchy(z: f64, p: u32, w: f64, q: u32, a: f64, b: f64, order: usize) -> f64 {
    let inner = |x: f64| -> f64 {
        if q == 1 {
            (w - a).abs().ln() + (w - b).abs().ln() - 2.0 * (w - x).abs().ln()
        } else {
            // q = 2
            2.0 / (w - x) - 1.0 / (w - a) - 1.0 / (w - b)
        }
    };
    crate::measure::reference_nodes(order)
        .iter()
        .map(|(t, wt)| {
            let x = a + (b - a) * (t + 1.0) / 2.0;
            wt * (b - a) / 2.0 * (z - x).powi(-(p as i32)) * inner(x)
        })
        .sum()
}

/// ⟨u|K|v⟩ for one scalar kernel component.
fn pair_funcs(u: &Func, k: &PairKernel, v: &Func, mu: &Measure) -> Result<f64> {
    let k = k.canonical();
    match (&k, u, v) {
        (PairKernel::Zero, _, _) => Ok(0.0),
        (PairKernel::Neg(inner), _, _) => Ok(-pair_funcs(u, inner, v, mu)?),
        (PairKernel::Transpose(inner), _, _) => pair_funcs(v, inner, u, mu),
        (_, Func::Poly(p), Func::Poly(q)) => pair::<f64>(&p.to_f64(), &k, &q.to_f64(), mu, mu),
        (_, Func::Poly(_), Func::Cauchy { .. }) => pair_funcs(v, &k.clone().transpose(), u, mu),
        (PairKernel::Delta, Func::Cauchy { z, power }, Func::Poly(q)) => cauchy_transform(q, mu, *z, *power),
        (PairKernel::Sgn, Func::Cauchy { z, power }, Func::Poly(q)) => match mu {
            Measure::Uniform { a, b, .. } => {
                // (A q)(x) = ∫_a^x q - ∫_x^b q
                let anti = q.antiderivative();
                let shift = anti.eval(a) + anti.eval(b);
                let aq = anti.scale(&Rational::from_i64(2)).sub(&Poly::constant(shift));
                cauchy_transform(&aq, mu, *z, *power)
            }
            Measure::Discrete { points } => {
                let zr = rational_from_f64(*z)?;
                let mut acc = Rational::from_i64(0);
                for (x, wx) in points {
                    let d = &zr - x;
                    if d == Rational::from_i64(0) {
                        return Err(Error::InsideSupport(format!("z = {z} is an atom")));
                    }
                    let inner = points.iter().fold(Rational::from_i64(0), |s, (y, wy)| {
                        s + wy * q.eval(y) * PairKernel::Sgn.eval_in(x, y).expect("sgn is pointwise")
                    });
                    acc += wx * inner / Field::pow(&d, *power);
                }
                Ok(acc.as_f64())
            }
            Measure::Custom { .. } => quadrature_pair(u, &k, v, mu),
        },
        (PairKernel::Sgn, Func::Cauchy { z, power: p }, Func::Cauchy { z: w, power: q }) => match mu {
            Measure::Uniform { a, b, order } => {
                Ok(sgn_cauchy_cauchy(*z, *p, *w, *q, a.as_f64(), b.as_f64(), (*order).max(PROBE_ORDER)))
            }
            _ => quadrature_pair(u, &k, v, mu),
        },
        _ => quadrature_pair(u, &k, v, mu),
    }
}

/// The pairing form ⟨·|𝖠|·⟩ on scalar (β=1) or pair-valued (β=4) functions.
#[derive(Clone, Debug)]
struct Form {
    kernels: Vec<Vec<PairKernel>>,
    measure: Measure,
}

impl Form {
    fn pair(&self, u: &[Func], v: &[Func]) -> Result<f64> {
        let mut acc = 0.0;
        for (a, ua) in u.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                acc += pair_funcs(ua, &self.kernels[a][b], vb, &self.measure)?;
            }
        }
        Ok(acc)
    }

    fn width(&self) -> usize {
        self.kernels.len()
    }

    /// A polynomial as a function of the form: p, or (p, p′).
    fn lift(&self, p: &Poly<Rational>) -> Vec<Func> {
        if self.width() == 1 {
            vec![Func::Poly(p.clone())]
        } else {
            vec![Func::Poly(p.clone()), Func::Poly(p.derivative())]
        }
    }

    fn probe(&self, z: f64) -> Vec<Func> {
        (1..=self.width() as u32).map(|power| Func::Cauchy { z, power }).collect()
    }
}

/// Skew-orthonormal family ψ_0, …, ψ_{D-1} from ascending monomials: ψ_{2i} monic,
/// ⟨ψ_{2i}|𝖠|ψ_{2j+1}⟩ = δ_ij.
#[derive(Clone, Debug)]
pub struct DualFamily {
    form: Form,
    psi: Vec<Poly<Rational>>,
    exact: bool,
}

impl DualFamily {
    fn build(form: Form, cutoff: usize) -> Result<Self> {
        if !cutoff.is_multiple_of(2) {
            return Err(Error::Parity(format!("dual kernel cutoff must be even, got {cutoff}")));
        }
        let mono = ascending_monomials(cutoff);
        let kernel = if form.width() == 1 {
            form.kernels[0][0].clone()
        } else {
            let k = &form.kernels;
            PairKernel::block(k[0][0].clone(), k[0][1].clone(), k[1][0].clone(), k[1][1].clone())
        };
        let entry = |i: usize, j: usize| -> Result<Rational> {
            if form.width() == 1 {
                pair(&mono[i], &kernel, &mono[j], &form.measure, &form.measure)
            } else {
                crate::kernel::pair_block(
                    (&mono[i], &mono[i].derivative()),
                    &kernel,
                    (&mono[j], &mono[j].derivative()),
                    &form.measure,
                    &form.measure,
                )
            }
        };
        let exact_matrix = super::assemble_skew(cutoff, entry);
        let (psi, exact) = match exact_matrix {
            Ok(m) => (orthonormalize(&m)?, true),
            Err(Error::ExactUnavailable(_)) => {
                let m = super::assemble_skew(cutoff, |i, j| -> Result<f64> {
                    let (u, v) = (form.lift(&mono[i]), form.lift(&mono[j]));
                    form.pair(&u, &v)
                })?;
                let psi = orthonormalize(&m)?;
                let psi = psi
                    .iter()
                    .map(|p| -> Result<Poly<Rational>> {
                        Ok(Poly::new(p.coeffs().iter().map(|c| rational_from_f64(*c)).collect::<Result<_>>()?))
                    })
                    .collect::<Result<_>>()?;
                (psi, false)
            }
            Err(e) => return Err(e),
        };
        Ok(DualFamily { form, psi, exact })
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn functions(&self) -> &[Poly<Rational>] {
        &self.psi
    }

    /// Whether the family was orthonormalized in exact arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The skew Gram matrix ⟨ψ_i|𝖠|ψ_j⟩ recomputed exactly, for checking.
    pub fn gram<T: Field>(&self) -> Result<SkewMatrix<T>> {
        let kernel = if self.form.width() == 1 {
            self.form.kernels[0][0].clone()
        } else {
            let k = &self.form.kernels;
            PairKernel::block(k[0][0].clone(), k[0][1].clone(), k[1][0].clone(), k[1][1].clone())
        };
        let lifted: Vec<Poly<T>> = self.psi.iter().map(super::lift).collect();
        let mu = &self.form.measure;
        super::assemble_skew(self.psi.len(), |i, j| {
            if self.form.width() == 1 {
                pair(&lifted[i], &kernel, &lifted[j], mu, mu)
            } else {
                crate::kernel::pair_block(
                    (&lifted[i], &lifted[i].derivative()),
                    &kernel,
                    (&lifted[j], &lifted[j].derivative()),
                    mu,
                    mu,
                )
            }
        })
    }

    /// T_k(z) = ⟨h_z|𝖠|ψ_k⟩ for every k.
    fn transforms(&self, z: f64) -> Result<Vec<f64>> {
        let probe = self.form.probe(z);
        self.psi.iter().map(|p| self.form.pair(&probe, &self.form.lift(p))).collect()
    }
}

/// Rows of the triangular change of basis, odd members divided by their norm.
fn orthonormalize<T: Field>(m: &SkewMatrix<T>) -> Result<Vec<Poly<T>>> {
    let s = skew_orthogonalize(m)?;
    let mono: Vec<Poly<T>> = (0..m.dim()).map(Poly::monomial).collect();
    let mut psi = s.apply(&mono);
    for (i, h) in s.norms.iter().enumerate() {
        psi[2 * i + 1] = psi[2 * i + 1].scale(&(T::one() / h.clone()));
    }
    Ok(psi)
}

/// How the dual kernel is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualRoute {
    /// ⟨h_z|A|h_w⟩ minus the projection onto the first n functions.
    Direct,
    /// Sum of pair terms from n/2 up to the cutoff.
    Series,
}

/// K̃_n(z, w) for a fixed head size n and family cutoff D.
#[derive(Clone, Debug)]
pub struct DualKernel {
    family: DualFamily,
    head: usize,
}

/// A dual kernel matrix [K̃(z_α, z_β)] with the size of the last series term.
#[derive(Clone, Debug)]
pub struct DualMatrix {
    pub matrix: SkewMatrix<f64>,
    /// Largest |last pair term| over the entries; zero for the direct route.
    pub tail: f64,
}

impl DualKernel {
    /// Head of n basis functions (n even), family cutoff D ≥ n + 2.
    fn new(form: Form, head: usize, cutoff: usize) -> Result<Self> {
        if !head.is_multiple_of(2) {
            return Err(Error::Parity(format!("dual kernel head size must be even, got {head}")));
        }
        if cutoff < head + 2 {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} must exceed the head size {head} by at least 2")));
        }
        Ok(DualKernel { family: DualFamily::build(form, cutoff)?, head })
    }

    /// β=1: Ā_n with n = `head` Vandermonde functions.
    pub fn beta1(model: &Beta1Model, head: usize, cutoff: usize) -> Result<Self> {
        let form = Form { kernels: components(model.kernel()), measure: model.measure().clone() };
        Self::new(form, head, cutoff)
    }

    /// β=4: Ā with the first `pairs` eigenvalues' worth (2·pairs functions) removed.
    pub fn beta4(model: &Beta4Model, pairs: usize, cutoff: usize) -> Result<Self> {
        let form = Form { kernels: components(model.kernel()), measure: model.measure().clone() };
        Self::new(form, 2 * pairs, cutoff)
    }

    pub fn family(&self) -> &DualFamily {
        &self.family
    }

    pub fn cutoff(&self) -> usize {
        self.family.len()
    }

    fn check_outside(&self, z: f64) -> Result<()> {
        let mu = &self.family.form.measure;
        let inside = match mu {
            Measure::Discrete { points } => points.iter().any(|(x, _)| x.as_f64() == z),
            _ => {
                let (a, b) = mu.support();
                a <= z && z <= b
            }
        };
        if inside || !z.is_finite() {
            return Err(Error::InsideSupport(format!("z = {z} meets the support")));
        }
        Ok(())
    }

    fn pair_term(t: &[f64], s: &[f64], i: usize) -> f64 {
        t[2 * i] * s[2 * i + 1] - t[2 * i + 1] * s[2 * i]
    }

    /// [K̃(z_α, z_β)] by the chosen route.
    pub fn matrix(&self, z: &[f64], route: DualRoute) -> Result<DualMatrix> {
        for &x in z {
            self.check_outside(x)?;
        }
        let t: Vec<Vec<f64>> = z.iter().map(|&x| self.family.transforms(x)).collect::<Result<_>>()?;
        let pairs = self.family.len() / 2;
        let mut m = SkewMatrix::zeros(z.len());
        let mut tail: f64 = 0.0;
        for a in 0..z.len() {
            for b in a + 1..z.len() {
                let v = match route {
                    DualRoute::Series => {
                        let last = Self::pair_term(&t[a], &t[b], pairs - 1);
                        tail = tail.max(last.abs());
                        (self.head / 2..pairs).map(|i| Self::pair_term(&t[a], &t[b], i)).sum()
                    }
                    DualRoute::Direct => {
                        let form = &self.family.form;
                        let full = form.pair(&form.probe(z[a]), &form.probe(z[b]))?;
                        full - (0..self.head / 2).map(|i| Self::pair_term(&t[a], &t[b], i)).sum::<f64>()
                    }
                };
                m.set(a, b, v);
            }
        }
        Ok(DualMatrix { matrix: m, tail })
    }

    pub fn eval(&self, z: f64, w: f64, route: DualRoute) -> Result<f64> {
        Ok(self.matrix(&[z, w], route)?.matrix.get(0, 1))
    }

    /// |K̃ at cutoff D - K̃ at cutoff D-2|, the size of the last series term.
    pub fn tail_estimate(&self, z: f64, w: f64) -> Result<f64> {
        Ok(self.matrix(&[z, w], DualRoute::Series)?.tail)
    }
}

/// An inverse characteristic polynomial average with its truncation estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseAverage {
    pub value: f64,
    /// Zero when no series truncation enters.
    pub tail: f64,
    /// True when the bordered form (few eigenvalues, many points) was used.
    pub bordered: bool,
}

fn z_value<F: FnOnce() -> Result<Rational>, G: FnOnce() -> Result<f64>>(exact: F, float: G) -> Result<f64> {
    match exact() {
        Ok(v) => Ok(v.as_f64()),
        Err(Error::ExactUnavailable(_)) => float(),
        Err(e) => Err(e),
    }
}

fn validate_points(z: &[f64]) -> Result<f64> {
    if !z.len().is_multiple_of(2) {
        return Err(Error::Parity(format!("number of inverse characteristic polynomials must be even, got {}", z.len())));
    }
    super::distinct_vandermonde(z)
}

/// Bordered Pfaffian Pf[[K̃_0, P], [-Pᵀ, 0]] with P_αk = z_α^{r-1-k}.
fn bordered(k0: &SkewMatrix<f64>, z: &[f64], r: usize) -> Result<f64> {
    let p = DenseMatrix::from_fn(z.len(), r, |a, k| z[a].powi((r - 1 - k) as i32));
    Ok(pf(&block_skew(k0, &p, &SkewMatrix::zeros(r))?))
}

/// ⟨∏_α det(z_α - X)^{-1}⟩ for the β=1 model with Vandermonde basis.
///
/// N ≥ M: (-1)^{NM + M/2} (Z_{N-M}/Z_N) Pf[K̃_{N-M}(z_α, z_β)] / Δ_M(z).
/// N < M: (-1)^{r(r-1)/2 + N/2} Pf[[K̃_0, P], [-Pᵀ, 0]] / (Z_N Δ_M(z)), r = M - N, P_αk = z_α^{r-1-k}.
pub fn char_poly_inv_avg_beta1(model: &Beta1Model, z: &[f64], cutoff: usize, route: DualRoute) -> Result<InverseAverage> {
    if !model.is_vandermonde() {
        return Err(Error::InvalidArgument("inverse averages need the Vandermonde basis".into()));
    }
    let (n, m) = (model.n(), z.len());
    if m == 0 {
        return Ok(InverseAverage { value: 1.0, tail: 0.0, bordered: false });
    }
    let delta = validate_points(z)?;
    let zn = z_value(|| model.z::<Rational>(), || model.z::<f64>())?;
    if n >= m {
        let small = model.with_size(n - m)?;
        let zs = z_value(|| small.z::<Rational>(), || small.z::<f64>())?;
        let dual = DualKernel::beta1(model, n - m, cutoff)?;
        let km = dual.matrix(z, route)?;
        let sign = sign_pow((n * m + m / 2) as i64) as f64;
        Ok(InverseAverage { value: sign * zs / zn * pf(&km.matrix) / delta, tail: km.tail, bordered: false })
    } else {
        let dual = DualKernel::beta1(model, 0, cutoff.max(2))?;
        let k0 = dual.matrix(z, DualRoute::Direct)?;
        let r = m - n;
        let sign = sign_pow((r * (r - 1) / 2 + n / 2) as i64) as f64;
        Ok(InverseAverage { value: sign * bordered(&k0.matrix, z, r)? / (zn * delta), tail: 0.0, bordered: true })
    }
}

/// ⟨∏_α det(z_α - X)^{-2}⟩ for the β=4 model with f = x^{2N-1-i}, g = f′.
///
/// 2N ≥ M: (-1)^{M/2} (Z_{N-M/2}/Z_N) Pf[K̃_{N-M/2}(z_α, z_β)] / Δ_M(z).
/// 2N < M: (-1)^{r(r-1)/2 + N} Pf[[K̃_0, P], [-Pᵀ, 0]] / (Z_N Δ_M(z)), r = M - 2N.
pub fn char_poly_inv_avg_beta4(model: &Beta4Model, z: &[f64], cutoff: usize, route: DualRoute) -> Result<InverseAverage> {
    if !model.is_vandermonde() {
        return Err(Error::InvalidArgument("inverse averages need f = x^(2N-1-i), g = f′".into()));
    }
    let (n, m) = (model.n(), z.len());
    if m == 0 {
        return Ok(InverseAverage { value: 1.0, tail: 0.0, bordered: false });
    }
    let delta = validate_points(z)?;
    let zn = z_value(|| model.z::<Rational>(), || model.z::<f64>())?;
    if 2 * n >= m {
        let rest = n - m / 2;
        let small = model.with_size(rest)?;
        let zs = z_value(|| small.z::<Rational>(), || small.z::<f64>())?;
        let dual = DualKernel::beta4(model, rest, cutoff)?;
        let km = dual.matrix(z, route)?;
        let sign = sign_pow((m / 2) as i64) as f64;
        Ok(InverseAverage { value: sign * zs / zn * pf(&km.matrix) / delta, tail: km.tail, bordered: false })
    } else {
        let dual = DualKernel::beta4(model, 0, cutoff.max(2))?;
        let k0 = dual.matrix(z, DualRoute::Direct)?;
        let r = m - 2 * n;
        let sign = sign_pow((r * (r - 1) / 2 + n) as i64) as f64;
        Ok(InverseAverage { value: sign * bordered(&k0.matrix, z, r)? / (zn * delta), tail: 0.0, bordered: true })
    }
}
