//! One-dimensional measures: moments, quadrature nodes, Hilbert moments.

use std::num::NonZeroUsize;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{rational_to_f64, Field, Rational, Scalar};

pub const DEFAULT_ORDER: usize = 64;

/// A one-dimensional measure.
///
/// `Uniform` is Lebesgue measure dx on [a, b].
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    Uniform { a: Rational, b: Rational, order: usize },
    Discrete { points: Vec<(Rational, Rational)> },
    /// Float-only measure given by a quadrature rule and its support. `gaussian` keeps
    /// (mean, sd) when the weight is exp(-(x-mean)²/(2 sd²)), for closed-form sgn integrals.
    Custom { name: String, nodes: Vec<f64>, weights: Vec<f64>, support: (f64, f64), gaussian: Option<(f64, f64)> },
}

impl Measure {
    pub fn uniform(a: Rational, b: Rational) -> Result<Self> {
        Self::uniform_with_order(a, b, DEFAULT_ORDER)
    }

    pub fn uniform_with_order(a: Rational, b: Rational, order: usize) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be positive".into()));
        }
        Ok(Measure::Uniform { a, b, order })
    }

    /// Lebesgue measure on [0, 1].
    pub fn unit() -> Self {
        Measure::Uniform { a: Rational::from_i64(0), b: Rational::from_i64(1), order: DEFAULT_ORDER }
    }

    /// Point masses (x, w); weights must be positive.
    pub fn discrete(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("discrete measure without points".into()));
        }
        if points.iter().any(|(_, w)| *w <= Rational::from_i64(0)) {
            return Err(Error::InvalidArgument("discrete weights must be positive".into()));
        }
        Ok(Measure::Discrete { points })
    }

    /// Gaussian weight exp(-(x-mean)²/(2 sd²)) dx through Gauss-Hermite nodes.
    pub fn gaussian(mean: f64, sd: f64, order: usize) -> Result<Self> {
        if !(sd > 0.0) || order < 2 {
            return Err(Error::InvalidArgument("gaussian needs sd > 0 and order >= 2".into()));
        }
        let rule = GaussHermite::new(NonZeroUsize::new(order).expect("order checked"));
        let s = std::f64::consts::SQRT_2 * sd;
        let (nodes, weights) = rule.iter().map(|(t, w)| (mean + s * t, s * w)).unzip();
        Ok(Measure::Custom {
            name: format!("gaussian({mean},{sd})"),
            nodes,
            weights,
            support: (f64::NEG_INFINITY, f64::INFINITY),
            gaussian: Some((mean, sd)),
        })
    }

    /// Same measure with a different quadrature order (no-op for discrete measures).
    pub fn with_order(&self, order: usize) -> Self {
        match self {
            Measure::Uniform { a, b, .. } => Measure::Uniform { a: a.clone(), b: b.clone(), order },
            other => other.clone(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Measure::Uniform { order, .. } => *order,
            Measure::Discrete { points } => points.len(),
            Measure::Custom { nodes, .. } => nodes.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Measure::Custom { .. })
    }

    /// Closed hull of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Measure::Uniform { a, b, .. } => (rational_to_f64(a), rational_to_f64(b)),
            Measure::Discrete { points } => points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| {
                let v = rational_to_f64(x);
                (lo.min(v), hi.max(v))
            }),
            Measure::Custom { support, .. } => *support,
        }
    }

    /// Whether x lies in the closed support.
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            Measure::Uniform { a, b, .. } => a <= x && x <= b,
            Measure::Discrete { points } => points.iter().any(|(p, _)| p == x),
            Measure::Custom { support, .. } => {
                let v = rational_to_f64(x);
                support.0 <= v && v <= support.1
            }
        }
    }

    /// Quadrature nodes and weights (x_a, w_a).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match self {
            Measure::Uniform { a, b, order } => {
                let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
                reference_nodes(*order).into_iter().map(|(t, w)| (mid + half * t, half * w)).collect()
            }
            Measure::Discrete { points } => {
                points.iter().map(|(x, w)| (rational_to_f64(x), rational_to_f64(w))).collect()
            }
            Measure::Custom { nodes, weights, .. } => nodes.iter().copied().zip(weights.iter().copied()).collect(),
        }
    }

    /// ∫ p dμ in the field T; custom measures are float-only.
    pub fn integrate<T: Field>(&self, p: &Poly<T>) -> Result<T> {
        match self {
            Measure::Uniform { a, b, .. } => Ok(p.integrate(&T::from_rational(a), &T::from_rational(b))),
            Measure::Discrete { points } => Ok(points
                .iter()
                .fold(T::zero(), |acc, (x, w)| acc + T::from_rational(w) * p.eval(&T::from_rational(x)))),
            Measure::Custom { .. } => {
                if T::EXACT {
                    return Err(Error::ExactUnavailable("custom measure is float-only".into()));
                }
                let pf = p.map(|c| c.as_f64());
                Ok(T::from_scalar(&Scalar::Float(
                    self.nodes().iter().map(|(x, w)| w * pf.eval(x)).sum(),
                ))?)
            }
        }
    }

    /// ∫ x^k dμ: exact for uniform and discrete, float otherwise.
    pub fn moment(&self, k: usize) -> Scalar {
        match self {
            Measure::Custom { .. } => {
                Scalar::Float(self.nodes().iter().map(|(x, w)| w * x.powi(k as i32)).sum())
            }
            _ => Scalar::Exact(self.integrate(&Poly::<Rational>::monomial(k)).expect("exact measure")),
        }
    }

    pub fn total_mass(&self) -> Scalar {
        self.moment(0)
    }

    /// ∫_{-∞}^{x} y^k dμ(y) for a Gaussian measure, k = 0..=deg.
    pub fn gaussian_lower_moments(&self, x: f64, deg: usize) -> Option<Vec<f64>> {
        let Measure::Custom { gaussian: Some((mean, sd)), .. } = self else {
            return None;
        };
        let u = (x - mean) / sd;
        // J_j = ∫_{-∞}^{u} t^j e^{-t²/2} dt
        // boundary term u^{k-1} e^{-u²/2}, zero at u = ∞
        let edge = |k: usize| if u.is_infinite() { 0.0 } else { u.powi(k as i32 - 1) * (-u * u / 2.0).exp() };
        let mut j = vec![0.0; deg + 1];
        for k in 0..=deg {
            j[k] = match k {
                0 => (std::f64::consts::PI / 2.0).sqrt() * libm::erfc(-u / std::f64::consts::SQRT_2),
                1 => -edge(1),
                _ => (k - 1) as f64 * j[k - 2] - edge(k),
            };
        }
        // y = mean + sd t
        Some(
            (0..=deg)
                .map(|k| {
                    let mut binom = 1.0;
                    let mut acc = 0.0;
                    for i in 0..=k {
                        acc += binom * mean.powi((k - i) as i32) * sd.powi(i as i32) * j[i];
                        binom = binom * (k - i) as f64 / (i + 1) as f64;
                    }
                    sd * acc
                })
                .collect(),
        )
    }

    /// ∫ x^k/(z - x) dμ(x) in floating point.
    pub fn hilbert_moment(&self, k: usize, z: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if lo <= z && z <= hi && !matches!(self, Measure::Discrete { .. }) {
            return Err(Error::InsideSupport(format!("z = {z} inside [{lo}, {hi}]")));
        }
        match self {
            Measure::Uniform { a, b, .. } => {
                let (a, b) = (rational_to_f64(a), rational_to_f64(b));
                let h = b - a;
                let (zeta, zeta_m1) = ((z - a) / h, (z - b) / h);
                // x = a + h t, expand x^k binomially
                let mut acc = 0.0;
                let mut binom = 1.0;
                for j in 0..=k {
                    acc += binom * a.powi((k - j) as i32) * h.powi(j as i32) * unit_hilbert(j, zeta, zeta_m1);
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
                Ok(acc)
            }
            Measure::Discrete { points } => {
                let mut acc = 0.0;
                for (x, w) in points {
                    let xv = rational_to_f64(x);
                    if xv == z {
                        return Err(Error::InsideSupport(format!("z = {z} is an atom")));
                    }
                    acc += rational_to_f64(w) * xv.powi(k as i32) / (z - xv);
                }
                Ok(acc)
            }
            Measure::Custom { .. } => Ok(self.nodes().iter().map(|(x, w)| w * x.powi(k as i32) / (z - x)).sum()),
        }
    }
}

/// Gauss-Legendre rule on [-1, 1].
pub fn reference_nodes(order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"));
    let mut v: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
    v.sort_by(|p, q| p.0.total_cmp(&q.0));
    v
}

/// I_j(ζ) = ∫_0^1 t^j/(ζ - t) dt for ζ outside [0, 1].
fn unit_hilbert(j: usize, zeta: f64, zeta_m1: f64) -> f64 {
    // The forward recurrence I_i = ζ I_{i-1} - 1/i amplifies rounding by |ζ|^j; the series
    // Σ ζ^{-(m+1)}/(j+m+1) converges like |ζ|^{-m}. Use whichever is well behaved.
    if zeta.abs() <= 1.0 || j as f64 * zeta.abs().ln() <= 3.0 {
        let mut acc = (zeta / zeta_m1).ln();
        for i in 1..=j {
            acc = zeta * acc - 1.0 / i as f64;
        }
        acc
    } else {
        let mut acc = 0.0;
        let mut p = 1.0 / zeta;
        for m in 0.. {
            let term = p / (j + m + 1) as f64;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                break;
            }
            p /= zeta;
        }
        acc
    }
}

/// Legendre values P_0..P_{n-1} at t.
pub fn legendre_values(n: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n > 1 {
        p.push(t);
    }
    for k in 1..n.saturating_sub(1) {
        let next = ((2 * k + 1) as f64 * t * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
        p.push(next);
    }
    p.truncate(n);
    p
}
