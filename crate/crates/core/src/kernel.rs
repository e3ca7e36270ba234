//! Two-variable pairing kernels ⟨f|K|g⟩ = ∫∫ f(x) K(x,y) g(y) dμ1(x) dμ2(y).

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::measure::{legendre_values, reference_nodes, Measure};
use crate::poly::Poly;
use crate::scalar::{rational_to_f64, Field, Scalar};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum PairKernel {
    /// sgn(x - y).
    Sgn,
    /// δ(x - y); both measures must coincide.
    Delta,
    /// 1/(x - y); supports must be disjoint.
    Cauchy,
    /// 1/(x - y)²; supports must be disjoint.
    CauchySquared,
    Zero,
    /// Blocks [[K11, K12], [K21, K22]] acting on pairs of functions.
    Matrix2x2(Box<[PairKernel; 4]>),
    /// Float-only kernel given pointwise.
    Custom { name: String, func: KernelFn, antisymmetric: bool },
    /// K(y, x).
    Transpose(Box<PairKernel>),
    /// -K(x, y).
    Neg(Box<PairKernel>),
}

impl fmt::Debug for PairKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairKernel::Sgn => write!(f, "sgn"),
            PairKernel::Delta => write!(f, "delta"),
            PairKernel::Cauchy => write!(f, "cauchy"),
            PairKernel::CauchySquared => write!(f, "cauchy²"),
            PairKernel::Zero => write!(f, "zero"),
            PairKernel::Matrix2x2(b) => write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", b[0], b[1], b[2], b[3]),
            PairKernel::Custom { name, .. } => write!(f, "custom({name})"),
            PairKernel::Transpose(k) => write!(f, "{k:?}ᵀ"),
            PairKernel::Neg(k) => write!(f, "-{k:?}"),
        }
    }
}

impl PartialEq for PairKernel {
    fn eq(&self, other: &Self) -> bool {
        use PairKernel::*;
        match (self, other) {
            (Sgn, Sgn) | (Delta, Delta) | (Cauchy, Cauchy) | (CauchySquared, CauchySquared) | (Zero, Zero) => true,
            (Matrix2x2(a), Matrix2x2(b)) => a == b,
            (Custom { func: f, antisymmetric: x, .. }, Custom { func: g, antisymmetric: y, .. }) => {
                Arc::ptr_eq(f, g) && x == y
            }
            (Transpose(a), Transpose(b)) | (Neg(a), Neg(b)) => a == b,
            _ => false,
        }
    }
}

impl PairKernel {
    /// A pointwise kernel; a claimed antisymmetry is checked at a few sample points.
    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        antisymmetric: bool,
    ) -> Result<Self> {
        let name = name.into();
        if antisymmetric {
            for &(x, y) in &[(0.1, 0.7), (-0.4, 1.3), (2.0, -1.5), (0.25, 0.3)] {
                let (u, v) = (func(x, y), func(y, x));
                if (u + v).abs() > 1e-12 * (u.abs() + v.abs()).max(1.0) {
                    return Err(Error::InvalidArgument(format!("kernel {name} is not antisymmetric")));
                }
            }
        }
        Ok(PairKernel::Custom { name, func: Arc::new(func), antisymmetric })
    }

    pub fn block(k11: Self, k12: Self, k21: Self, k22: Self) -> Self {
        PairKernel::Matrix2x2(Box::new([k11, k12, k21, k22]))
    }

    pub fn transpose(self) -> Self {
        PairKernel::Transpose(Box::new(self))
    }

    pub fn neg(self) -> Self {
        PairKernel::Neg(Box::new(self))
    }

    /// K(x,y) = -K(y,x).
    pub fn is_antisymmetric(&self) -> bool {
        match self {
            PairKernel::Sgn | PairKernel::Zero | PairKernel::Cauchy => true,
            PairKernel::Delta | PairKernel::CauchySquared => false,
            PairKernel::Custom { antisymmetric, .. } => *antisymmetric,
            PairKernel::Transpose(k) | PairKernel::Neg(k) => k.is_antisymmetric(),
            PairKernel::Matrix2x2(b) => {
                let mirrored = |p: &PairKernel, q: &PairKernel| {
                    p.canonical() == q.clone().transpose().neg().canonical()
                        || (p.is_antisymmetric() && p.canonical() == q.canonical())
                };
                b[0].is_antisymmetric() && b[3].is_antisymmetric() && mirrored(&b[1], &b[2])
            }
        }
    }

    pub fn is_block(&self) -> bool {
        matches!(self, PairKernel::Matrix2x2(_))
    }

    /// Pushes `Transpose` and `Neg` inwards as far as the simple variants allow.
    pub fn canonical(&self) -> Self {
        match self {
            PairKernel::Transpose(k) => match k.canonical() {
                PairKernel::Sgn => PairKernel::Sgn.neg(),
                PairKernel::Cauchy => PairKernel::Cauchy.neg(),
                PairKernel::Delta => PairKernel::Delta,
                PairKernel::CauchySquared => PairKernel::CauchySquared,
                PairKernel::Zero => PairKernel::Zero,
                PairKernel::Transpose(inner) => *inner,
                PairKernel::Neg(inner) => PairKernel::Transpose(inner).canonical().neg(),
                PairKernel::Matrix2x2(b) => {
                    let [k11, k12, k21, k22] = *b;
                    PairKernel::block(
                        k11.transpose().canonical(),
                        k21.transpose().canonical(),
                        k12.transpose().canonical(),
                        k22.transpose().canonical(),
                    )
                }
                custom => custom.transpose(),
            },
            PairKernel::Neg(k) => match k.canonical() {
                PairKernel::Neg(inner) => *inner,
                PairKernel::Zero => PairKernel::Zero,
                other => other.neg(),
            },
            PairKernel::Matrix2x2(b) => {
                PairKernel::block(b[0].canonical(), b[1].canonical(), b[2].canonical(), b[3].canonical())
            }
            other => other.clone(),
        }
    }

    /// Pointwise value; `None` for δ and block kernels.
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            PairKernel::Sgn => Some(sign_f64(x - y)),
            PairKernel::Cauchy => Some(1.0 / (x - y)),
            PairKernel::CauchySquared => Some(1.0 / ((x - y) * (x - y))),
            PairKernel::Zero => Some(0.0),
            PairKernel::Custom { func, .. } => Some(func(x, y)),
            PairKernel::Transpose(k) => k.eval(y, x),
            PairKernel::Neg(k) => k.eval(x, y).map(|v| -v),
            PairKernel::Delta | PairKernel::Matrix2x2(_) => None,
        }
    }

    /// Pointwise value in the field T; float-only kernels are unavailable for exact fields.
    pub fn eval_in<T: Field>(&self, x: &T, y: &T) -> Result<T> {
        match self {
            PairKernel::Sgn => Ok(sign_t(&(x.clone() - y.clone()))),
            PairKernel::Zero => Ok(T::zero()),
            PairKernel::Cauchy | PairKernel::CauchySquared => {
                let d = x.clone() - y.clone();
                if d.is_zero() {
                    return Err(Error::Singular(format!("{self:?} at coincident points")));
                }
                Ok(if matches!(self, PairKernel::Cauchy) { T::one() / d } else { T::one() / (d.clone() * d) })
            }
            PairKernel::Custom { func, .. } => float(func(x.as_f64(), y.as_f64()), "custom kernel"),
            PairKernel::Transpose(k) => k.eval_in(y, x),
            PairKernel::Neg(k) => Ok(-k.eval_in(x, y)?),
            PairKernel::Delta | PairKernel::Matrix2x2(_) => {
                Err(Error::Unsupported(format!("{self:?} has no pointwise value")))
            }
        }
    }

    /// Whether the kernel is singular on the diagonal and needs separated supports.
    pub fn needs_disjoint(&self) -> bool {
        match self {
            PairKernel::Cauchy | PairKernel::CauchySquared => true,
            PairKernel::Transpose(k) | PairKernel::Neg(k) => k.needs_disjoint(),
            PairKernel::Matrix2x2(b) => b.iter().any(|k| k.needs_disjoint()),
            _ => false,
        }
    }
}

fn sign_f64(d: f64) -> f64 {
    if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn sign_t<T: Field>(d: &T) -> T {
    match d.partial_cmp(&T::zero()) {
        Some(Ordering::Greater) => T::one(),
        Some(Ordering::Less) => -T::one(),
        _ => T::zero(),
    }
}

fn min_t<T: Field>(a: &T, b: &T) -> T {
    if a <= b { a.clone() } else { b.clone() }
}

fn max_t<T: Field>(a: &T, b: &T) -> T {
    if a >= b { a.clone() } else { b.clone() }
}

fn float<T: Field>(v: f64, what: &str) -> Result<T> {
    if T::EXACT {
        return Err(Error::ExactUnavailable(format!("{what} has no exact closed form")));
    }
    if !v.is_finite() {
        return Err(Error::Degenerate(format!("{what} produced a non-finite value")));
    }
    T::from_scalar(&Scalar::Float(v))
}

/// Whether the supports are separated so that a Cauchy kernel is integrable.
pub fn supports_disjoint(mu1: &Measure, mu2: &Measure) -> bool {
    match (mu1, mu2) {
        (Measure::Discrete { points: p }, Measure::Discrete { points: q }) => {
            p.iter().all(|(x, _)| q.iter().all(|(y, _)| x != y))
        }
        (Measure::Discrete { points }, other) | (other, Measure::Discrete { points }) if other.is_exact() => {
            points.iter().all(|(x, _)| !other.contains(x))
        }
        _ => {
            let (l1, h1) = mu1.support();
            let (l2, h2) = mu2.support();
            h1 < l2 || h2 < l1
        }
    }
}

fn check_disjoint(k: &PairKernel, mu1: &Measure, mu2: &Measure) -> Result<()> {
    if k.needs_disjoint() && !supports_disjoint(mu1, mu2) {
        return Err(Error::SupportOverlap(format!("{k:?} between overlapping supports")));
    }
    Ok(())
}

/// ∫ g(y) sgn(x - y) dμ(y).
fn inner_sgn<T: Field>(g: &Poly<T>, mu: &Measure, x: &T) -> Result<T> {
    match mu {
        Measure::Uniform { a, b, .. } => {
            let (a, b) = (T::from_rational(a), T::from_rational(b));
            let gp = g.antiderivative();
            let (ga, gb) = (gp.eval(&a), gp.eval(&b));
            Ok(if *x <= a {
                ga - gb
            } else if *x >= b {
                gb - ga
            } else {
                T::from_i64(2) * gp.eval(x) - ga - gb
            })
        }
        Measure::Discrete { points } => Ok(points.iter().fold(T::zero(), |acc, (y, w)| {
            let y = T::from_rational(y);
            acc + T::from_rational(w) * g.eval(&y) * sign_t(&(x.clone() - y))
        })),
        Measure::Custom { .. } => {
            let gf = g.map(|c| c.as_f64());
            let xv = x.as_f64();
            let deg = gf.degree().unwrap_or(0);
            if let (Some(below), Some(all)) = (mu.gaussian_lower_moments(xv, deg), mu.gaussian_lower_moments(f64::INFINITY, deg)) {
                // 2∫_{-∞}^{x} g dμ - ∫ g dμ
                let v = gf.coeffs().iter().enumerate().map(|(k, c)| c * (2.0 * below[k] - all[k])).sum();
                return float(v, "sgn pairing against a Gaussian measure");
            }
            let v = mu.nodes().iter().map(|(y, w)| w * gf.eval(y) * sign_f64(xv - y)).sum();
            float(v, "sgn pairing against a custom measure")
        }
    }
}

fn pair_sgn<T: Field>(f: &Poly<T>, g: &Poly<T>, mu1: &Measure, mu2: &Measure) -> Result<T> {
    match (mu1, mu2) {
        (Measure::Uniform { a: a1, b: b1, .. }, Measure::Uniform { a: a2, b: b2, .. }) => {
            let (a1, b1) = (T::from_rational(a1), T::from_rational(b1));
            let (a2, b2) = (T::from_rational(a2), T::from_rational(b2));
            let gp = g.antiderivative();
            let (ga, gb) = (gp.eval(&a2), gp.eval(&b2));
            let total = gb.clone() - ga.clone();
            let mut acc = T::zero();
            // x below the second support
            let hi = min_t(&b1, &a2);
            if a1 < hi {
                acc = acc - total.clone() * f.integrate(&a1, &hi);
            }
            // x above it
            let lo = max_t(&a1, &b2);
            if lo < b1 {
                acc = acc + total * f.integrate(&lo, &b1);
            }
            // overlap
            let (lo, hi) = (max_t(&a1, &a2), min_t(&b1, &b2));
            if lo < hi {
                let h = gp.scale(&T::from_i64(2)).sub(&Poly::constant(ga + gb));
                acc = acc + f.mul(&h).integrate(&lo, &hi);
            }
            Ok(acc)
        }
        (Measure::Uniform { a, b, .. }, Measure::Discrete { points }) => {
            let (a, b) = (T::from_rational(a), T::from_rational(b));
            let fp = f.antiderivative();
            let (fa, fb) = (fp.eval(&a), fp.eval(&b));
            Ok(points.iter().fold(T::zero(), |acc, (y, w)| {
                let y = T::from_rational(y);
                let c = min_t(&max_t(&y, &a), &b);
                let inner = fb.clone() + fa.clone() - T::from_i64(2) * fp.eval(&c);
                acc + T::from_rational(w) * g.eval(&y) * inner
            }))
        }
        (Measure::Uniform { .. }, Measure::Custom { gaussian: Some(_), .. }) => {
            // the Gaussian inner integral is smooth in x, so Gauss-Legendre on the interval converges fast
            if T::EXACT {
                return Err(Error::ExactUnavailable("Gaussian measure is float-only".into()));
            }
            let ff = f.map(|c| c.as_f64());
            let mut acc = 0.0;
            for (x, w) in mu1.nodes() {
                acc += w * ff.eval(&x) * inner_sgn(g, mu2, &T::from_scalar(&Scalar::Float(x))?)?.as_f64();
            }
            float(acc, "sgn pairing")
        }
        (Measure::Custom { gaussian: Some(_), .. }, Measure::Uniform { .. }) => Ok(-pair_sgn(g, f, mu2, mu1)?),
        (Measure::Uniform { .. }, Measure::Custom { .. }) => Ok(-pair_sgn(g, f, mu2, mu1)?),
        (Measure::Discrete { points }, _) => points.iter().try_fold(T::zero(), |acc, (x, w)| {
            let x = T::from_rational(x);
            Ok(acc + T::from_rational(w) * f.eval(&x) * inner_sgn(g, mu2, &x)?)
        }),
        (Measure::Custom { .. }, _) => {
            if T::EXACT {
                return Err(Error::ExactUnavailable("custom measure is float-only".into()));
            }
            let ff = f.map(|c| c.as_f64());
            let mut acc = 0.0;
            for (x, w) in mu1.nodes() {
                acc += w * ff.eval(&x) * inner_sgn(g, mu2, &T::from_scalar(&Scalar::Float(x))?)?.as_f64();
            }
            float(acc, "sgn pairing")
        }
    }
}

/// ∫∫ f(x) K(x,y) g(y) dμ1(x) dμ2(y).
///
/// Exact for sgn, δ and zero on uniform/discrete measures and for the Cauchy kernels
/// between discrete measures; otherwise float only (`ExactUnavailable` for exact fields).
/// The Cauchy kernel goes through Hilbert moments of μ2 and quadrature on μ1, other
/// pointwise kernels through product quadrature.
pub fn pair<T: Field>(f: &Poly<T>, k: &PairKernel, g: &Poly<T>, mu1: &Measure, mu2: &Measure) -> Result<T> {
    check_disjoint(k, mu1, mu2)?;
    match k {
        PairKernel::Zero => Ok(T::zero()),
        PairKernel::Neg(inner) => Ok(-pair(f, inner, g, mu1, mu2)?),
        PairKernel::Transpose(inner) => pair(g, inner, f, mu2, mu1),
        PairKernel::Delta => {
            if mu1 != mu2 {
                return Err(Error::InvalidArgument("delta kernel needs identical measures".into()));
            }
            mu1.integrate(&f.mul(g))
        }
        PairKernel::Sgn => pair_sgn(f, g, mu1, mu2),
        PairKernel::Cauchy | PairKernel::CauchySquared => {
            if let (Measure::Discrete { points: p }, Measure::Discrete { points: q }) = (mu1, mu2) {
                let squared = matches!(k, PairKernel::CauchySquared);
                let mut acc = T::zero();
                for (x, w) in p {
                    let x = T::from_rational(x);
                    let fx = T::from_rational(w) * f.eval(&x);
                    for (y, v) in q {
                        let y = T::from_rational(y);
                        let d = x.clone() - y.clone();
                        let kxy = if squared { T::one() / (d.clone() * d) } else { T::one() / d };
                        acc = acc + fx.clone() * kxy * T::from_rational(v) * g.eval(&y);
                    }
                }
                return Ok(acc);
            }
            if T::EXACT {
                return Err(Error::ExactUnavailable(format!("{k:?} pairing involves logarithms")));
            }
            let (ff, gf) = (f.map(|c| c.as_f64()), g.map(|c| c.as_f64()));
            let mut acc = 0.0;
            if matches!(k, PairKernel::Cauchy) {
                for (x, w) in mu1.nodes() {
                    let mut h = 0.0;
                    for (j, c) in gf.coeffs().iter().enumerate() {
                        h += c * mu2.hilbert_moment(j, x)?;
                    }
                    acc += w * ff.eval(&x) * h;
                }
            } else {
                acc = product_quadrature(&ff, k, &gf, mu1, mu2);
            }
            float(acc, "Cauchy pairing")
        }
        PairKernel::Custom { .. } => {
            let (ff, gf) = (f.map(|c| c.as_f64()), g.map(|c| c.as_f64()));
            if T::EXACT {
                return Err(Error::ExactUnavailable("custom kernels are float-only".into()));
            }
            float(product_quadrature(&ff, k, &gf, mu1, mu2), "custom kernel pairing")
        }
        PairKernel::Matrix2x2(_) => {
            Err(Error::InvalidArgument("block kernel pairs pairs of functions; use pair_block".into()))
        }
    }
}

fn product_quadrature(f: &Poly<f64>, k: &PairKernel, g: &Poly<f64>, mu1: &Measure, mu2: &Measure) -> f64 {
    let (n1, n2) = (mu1.nodes(), mu2.nodes());
    let gv: Vec<f64> = n2.iter().map(|(y, w)| w * g.eval(y)).collect();
    n1.iter()
        .map(|(x, w)| {
            let inner: f64 = n2.iter().zip(&gv).map(|((y, _), gy)| k.eval(*x, *y).unwrap_or(0.0) * gy).sum();
            w * f.eval(x) * inner
        })
        .sum()
}

/// ⟨f, g| K |f̃, g̃⟩ = ⟨f|K11|f̃⟩ + ⟨f|K12|g̃⟩ + ⟨g|K21|f̃⟩ + ⟨g|K22|g̃⟩ for a block kernel.
pub fn pair_block<T: Field>(
    left: (&Poly<T>, &Poly<T>),
    k: &PairKernel,
    right: (&Poly<T>, &Poly<T>),
    mu1: &Measure,
    mu2: &Measure,
) -> Result<T> {
    let canon = k.canonical();
    let PairKernel::Matrix2x2(b) = &canon else {
        return Err(Error::InvalidArgument(format!("{k:?} is not a block kernel")));
    };
    let mut acc = T::zero();
    for (i, l) in [left.0, left.1].into_iter().enumerate() {
        for (j, r) in [right.0, right.1].into_iter().enumerate() {
            let block = &b[2 * i + j];
            if *block != PairKernel::Zero {
                acc = acc + pair(l, block, r, mu1, mu2)?;
            }
        }
    }
    Ok(acc)
}

/// Matrix T with (T v)_b ≈ ∫ v(x) K(x, y_b) dμ1(x) for node values v of μ1 and nodes y_b of μ2.
///
/// Pointwise kernels use T_ba = w_a K(x_a, y_b). For sgn on a uniform μ1 the node values
/// are interpolated by a Legendre series that is integrated exactly, so the result is exact
/// for polynomials of degree below the quadrature order. δ is the identity. Block kernels
/// give a 2×2 block matrix acting on stacked node values. When μ1 and μ2 overlap without
/// coinciding, the pushed sgn function has a kink inside μ2 and later quadrature on μ2 is
/// only algebraically accurate.
pub fn transfer_matrix(k: &PairKernel, mu1: &Measure, mu2: &Measure) -> Result<DenseMatrix<f64>> {
    check_disjoint(k, mu1, mu2)?;
    let (n1, n2) = (mu1.nodes(), mu2.nodes());
    let canon = k.canonical();
    match &canon {
        PairKernel::Zero => Ok(DenseMatrix::zeros(n2.len(), n1.len())),
        PairKernel::Delta => {
            if mu1 != mu2 {
                return Err(Error::InvalidArgument("delta kernel needs identical measures".into()));
            }
            Ok(DenseMatrix::identity(n1.len()))
        }
        PairKernel::Neg(inner) => Ok(transfer_matrix(inner, mu1, mu2)?.scale(&-1.0)),
        PairKernel::Sgn => match mu1 {
            Measure::Uniform { a, b, order } => Ok(sgn_transfer(rational_to_f64(a), rational_to_f64(b), *order, &n2)),
            _ => Ok(pointwise_transfer(&canon, &n1, &n2)),
        },
        PairKernel::Matrix2x2(b) => {
            let t: Vec<DenseMatrix<f64>> =
                b.iter().map(|k| transfer_matrix(k, mu1, mu2)).collect::<Result<_>>()?;
            let (m1, m2) = (n1.len(), n2.len());
            // output component j collects K_ij applied to input component i
            Ok(DenseMatrix::from_fn(2 * m2, 2 * m1, |r, c| {
                let (j, i) = (r / m2, c / m1);
                *t[2 * i + j].get(r % m2, c % m1)
            }))
        }
        _ => Ok(pointwise_transfer(&canon, &n1, &n2)),
    }
}

fn pointwise_transfer(k: &PairKernel, n1: &[(f64, f64)], n2: &[(f64, f64)]) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(n2.len(), n1.len(), |b, a| n1[a].1 * k.eval(n1[a].0, n2[b].0).unwrap_or(0.0))
}

/// Legendre-interpolated ∫_a^b v(x) sgn(x - y) dx at the targets y.
fn sgn_transfer(a: f64, b: f64, order: usize, targets: &[(f64, f64)]) -> DenseMatrix<f64> {
    let reference = reference_nodes(order);
    let half = (b - a) / 2.0;
    let basis: Vec<Vec<f64>> = reference.iter().map(|(t, _)| legendre_values(order, *t)).collect();
    DenseMatrix::from_fn(targets.len(), order, |row, col| {
        let w = half * reference[col].1;
        let s = (2.0 * targets[row].0 - a - b) / (b - a);
        if s <= -1.0 {
            return w;
        }
        if s >= 1.0 {
            return -w;
        }
        let p = legendre_values(order + 1, s);
        let mut acc = 0.0;
        for n in 0..order {
            let below = if n == 0 { 0.0 } else { p[n - 1] };
            acc += basis[col][n] * (p[n + 1] - below);
        }
        -w * acc
    })
}

/// W with vᵀ W u ≈ ⟨v|K|u⟩ for node values v on μ1 and u on μ2: W_ab = w_a K(x_a, y_b) w_b.
///
/// δ gives the diagonal of the weights. Exactness follows `transfer_matrix`.
pub fn kernel_matrix(k: &PairKernel, mu1: &Measure, mu2: &Measure) -> Result<DenseMatrix<f64>> {
    let t = transfer_matrix(k, mu1, mu2)?;
    let w2: Vec<f64> = mu2.nodes().iter().map(|(_, w)| *w).collect();
    let m2 = w2.len();
    Ok(DenseMatrix::from_fn(t.cols(), t.rows(), |a, b| *t.get(b, a) * w2[b % m2]))
}

/// Closed-form ∫_{a1}^{b1}∫_{a2}^{b2} dx dy/(x - y) for disjoint intervals.
pub fn cauchy_box_integral(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    // ∫∫ 1/(x-y) = Φ(b1-a2) - Φ(b1-b2) - Φ(a1-a2) + Φ(a1-b2) with Φ(t) = t ln|t| - t
    let phi = |t: f64| if t == 0.0 { 0.0 } else { t * t.abs().ln() - t };
    phi(b1 - a2) - phi(b1 - b2) - phi(a1 - a2) + phi(a1 - b2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn mono(k: usize) -> Poly<Rational> {
        Poly::monomial(k)
    }

    #[test]
    fn sgn_monomials_on_unit_interval() {
        let u = Measure::unit();
        assert_eq!(pair(&mono(0), &PairKernel::Sgn, &mono(1), &u, &u).unwrap(), rat(-1, 6));
        for a in 0..5i64 {
            for b in 0..5i64 {
                let v = pair(&mono(a as usize), &PairKernel::Sgn, &mono(b as usize), &u, &u).unwrap();
                assert_eq!(v, rat(a - b, (a + 1) * (b + 1) * (a + b + 2)));
            }
        }
    }

    #[test]
    fn delta_and_zero() {
        let u = Measure::unit();
        assert_eq!(pair(&mono(1), &PairKernel::Delta, &mono(0), &u, &u).unwrap(), rat(1, 2));
        assert_eq!(pair(&mono(3), &PairKernel::Zero, &mono(2), &u, &u).unwrap(), int(0));
        let v = Measure::uniform(int(0), int(2)).unwrap();
        assert!(pair(&mono(0), &PairKernel::Delta, &mono(0), &u, &v).is_err());
        let w = kernel_matrix(&PairKernel::Delta, &u, &u).unwrap();
        let nodes = u.nodes();
        for a in 0..nodes.len() {
            for b in 0..nodes.len() {
                assert_eq!(*w.get(a, b), if a == b { nodes[a].1 } else { 0.0 });
            }
        }
        let z = kernel_matrix(&PairKernel::Zero, &u, &v).unwrap();
        assert!(z.entries().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn cauchy_between_separated_intervals() {
        let u = Measure::uniform_with_order(int(0), int(1), 32).unwrap();
        let v = Measure::uniform_with_order(int(2), int(3), 32).unwrap();
        let exact = 4.0 * 2f64.ln() - 3.0 * 3f64.ln();
        assert!((cauchy_box_integral(0.0, 1.0, 2.0, 3.0) - exact).abs() < 1e-14);
        let w = kernel_matrix(&PairKernel::Cauchy, &u, &v).unwrap();
        let total: f64 = w.entries().iter().sum();
        assert!((total - exact).abs() < 1e-10);
        let one = Poly::<f64>::constant(1.0);
        let p: f64 = pair(&one, &PairKernel::Cauchy, &one, &u, &v).unwrap();
        assert!((p - exact).abs() < 1e-12);
        assert!(pair(&mono(0), &PairKernel::Cauchy, &mono(0), &u, &v).is_err());
        let overlap = Measure::uniform(rat(1, 2), int(2)).unwrap();
        assert!(matches!(
            kernel_matrix(&PairKernel::Cauchy, &u, &overlap),
            Err(Error::SupportOverlap(_))
        ));
        let t: f64 = pair(&one, &PairKernel::Cauchy.transpose(), &one, &v, &u).unwrap();
        assert!((t - exact).abs() < 1e-12);
    }

    #[test]
    fn discrete_cauchy_is_exact() {
        let p = Measure::discrete(vec![(int(0), int(1)), (int(1), rat(1, 2))]).unwrap();
        let q = Measure::discrete(vec![(int(3), int(2))]).unwrap();
        let v = pair(&mono(1), &PairKernel::Cauchy, &mono(0), &p, &q).unwrap();
        assert_eq!(v, rat(1, 2) * int(2) / int(-2));
        let sq = pair(&mono(0), &PairKernel::CauchySquared, &mono(0), &p, &q).unwrap();
        assert_eq!(sq, int(2) / int(9) + rat(1, 2) * int(2) / int(4));
    }

    #[test]
    fn sgn_matrix_matches_closed_form() {
        let u = Measure::unit();
        let w = kernel_matrix(&PairKernel::Sgn, &u, &u).unwrap();
        let x: Vec<f64> = u.nodes().iter().map(|(x, _)| *x).collect();
        for a in 0..6 {
            for b in 0..6 {
                let va: Vec<f64> = x.iter().map(|t| t.powi(a)).collect();
                let vb: Vec<f64> = x.iter().map(|t| t.powi(b)).collect();
                let q: f64 = (0..x.len()).map(|i| (0..x.len()).map(|j| va[i] * w.get(i, j) * vb[j]).sum::<f64>()).sum();
                let e = (a - b) as f64 / ((a + 1) * (b + 1) * (a + b + 2)) as f64;
                assert!((q - e).abs() < 1e-12, "{a} {b}: {q} vs {e}");
            }
        }
    }

    #[test]
    fn sgn_mixed_measures() {
        let u = Measure::unit();
        let v = Measure::uniform(rat(1, 2), int(2)).unwrap();
        let d = Measure::discrete(vec![(rat(1, 3), int(1)), (rat(3, 2), rat(1, 4)), (int(-1), int(2))]).unwrap();
        for (m1, m2) in [(&u, &v), (&v, &u), (&u, &d), (&d, &v), (&d, &d)] {
            for (a, b) in [(0, 0), (1, 2), (3, 1)] {
                let exact = pair(&mono(a), &PairKernel::Sgn, &mono(b), m1, m2).unwrap();
                let back = pair(&mono(b), &PairKernel::Sgn, &mono(a), m2, m1).unwrap();
                assert_eq!(exact, -back);
                if !matches!(m2, Measure::Discrete { .. }) {
                    continue;
                }
                let w = kernel_matrix(&PairKernel::Sgn, m1, m2).unwrap();
                let (n1, n2) = (m1.nodes(), m2.nodes());
                let mut q = 0.0;
                for (i, (xa, _)) in n1.iter().enumerate() {
                    for (j, (yb, _)) in n2.iter().enumerate() {
                        q += xa.powi(a as i32) * w.get(i, j) * yb.powi(b as i32);
                    }
                }
                assert!((q - exact.as_f64()).abs() < 1e-11, "{m1:?} {m2:?} {a} {b}");
            }
        }
    }

    #[test]
    fn block_pairing_sums_blocks() {
        let u = Measure::unit();
        let k = PairKernel::block(PairKernel::Sgn, PairKernel::Delta, PairKernel::Delta.neg(), PairKernel::Zero);
        let (f, g) = (mono(1), mono(0));
        let v = pair_block((&f, &g), &k, (&g, &f), &u, &u).unwrap();
        // ⟨x|sgn|1⟩ + ⟨x|δ|x⟩ - ⟨1|δ|1⟩
        assert_eq!(v, rat(1, 6) + rat(1, 3) - int(1));
        assert!(k.is_antisymmetric());
        assert!(!PairKernel::block(PairKernel::Sgn, PairKernel::Delta, PairKernel::Delta, PairKernel::Sgn)
            .is_antisymmetric());
        let t = transfer_matrix(&k, &u, &u).unwrap();
        assert_eq!((t.rows(), t.cols()), (128, 128));
    }

    #[test]
    fn antisymmetry_flags() {
        assert!(PairKernel::Sgn.is_antisymmetric());
        assert!(PairKernel::Zero.is_antisymmetric());
        assert!(!PairKernel::Delta.is_antisymmetric());
        assert!(PairKernel::custom("odd", |x, y| (x - y).powi(3), true).is_ok());
        assert!(PairKernel::custom("even", |x, y| x * y, true).is_err());
        assert_eq!(PairKernel::Sgn.transpose().canonical(), PairKernel::Sgn.neg());
        assert_eq!(PairKernel::Sgn.neg().neg().canonical(), PairKernel::Sgn);
    }

    #[test]
    fn custom_kernel_quadrature() {
        let u = Measure::unit();
        let k = PairKernel::custom("exp", |x, y| (x - y).exp(), false).unwrap();
        let one = Poly::<f64>::constant(1.0);
        let v: f64 = pair(&one, &k, &one, &u, &u).unwrap();
        let e = 1f64.exp();
        assert!((v - (e - 1.0) * (1.0 - 1.0 / e)).abs() < 1e-13);
        assert!(pair(&mono(0), &k, &mono(0), &u, &u).is_err());
    }
}
