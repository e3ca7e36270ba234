//! Brute-force evaluators: exact sector integration, exact polynomial integration and
//! seeded Monte Carlo.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SkewMatrix;
use crate::measure::Measure;
use crate::pfaffian::pf;
use crate::poly::Poly;
use crate::scalar::{rational_to_f64, Field, Rational};

pub mod ensembles;

pub const DEFAULT_DEGREE_CAP: u32 = 24;
pub const MAX_SECTOR_VARS: usize = 8;

/// Polynomial in `nvars` variables with exact coefficients, keyed by exponent vectors.
#[derive(Clone, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// q(x_i) for a univariate q.
    pub fn univariate(nvars: usize, i: usize, q: &Poly<Rational>) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in q.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[i] = k as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| acc.mul(self))
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }

    pub fn eval<T: Field>(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + e.iter().zip(x).fold(T::from_rational(c), |m, (k, xi)| m * xi.pow(*k))
        })
    }

    /// Antiderivative in x_i vanishing at x_i = 0.
    fn antiderivative(&self, i: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[i] += 1;
            let k = e[i];
            r.add_term(e, c / Rational::from_integer(k.into()));
        }
        r
    }

    /// Substitutes x_i := x_j.
    fn substitute_var(&self, i: usize, j: usize) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[j] += e[i];
            e[i] = 0;
            r.add_term(e, c.clone());
        }
        r
    }

    /// Substitutes x_i := v.
    fn substitute_value(&self, i: usize, v: &Rational) -> Self {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let k = std::mem::take(&mut e[i]);
            r.add_term(e, c * Field::pow(v, k));
        }
        r
    }

    /// Vandermonde product ∏_{i<j} (x_j - x_i) over the listed variables.
    pub fn vandermonde(nvars: usize, vars: &[usize]) -> Self {
        let mut r = Self::one(nvars);
        for (a, &i) in vars.iter().enumerate() {
            for &j in &vars[a + 1..] {
                r = r.mul(&Self::var(nvars, j).sub(&Self::var(nvars, i)));
            }
        }
        r
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}·x^{e:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sign factors that are constant on each ordering sector.
#[derive(Clone, Debug, PartialEq)]
pub enum SignFactor {
    None,
    /// ∏ sgn(x_i - x_j) over the listed pairs.
    Product(Vec<(usize, usize)>),
    /// Pf[sgn(x_{v_a} - x_{v_b})] over an even-length list of variables.
    Pfaffian(Vec<usize>),
}

impl SignFactor {
    /// Value on the sector where rank[i] is the position of x_i in increasing order.
    fn on_sector(&self, rank: &[usize]) -> i64 {
        let s = |i: usize, j: usize| if rank[i] > rank[j] { 1 } else { -1 };
        match self {
            SignFactor::None => 1,
            SignFactor::Product(pairs) => pairs.iter().map(|&(i, j)| s(i, j)).product(),
            SignFactor::Pfaffian(vars) => {
                let m = SkewMatrix::from_upper_fn(vars.len(), |a, b| Rational::from_integer(s(vars[a], vars[b]).into()));
                let v = pf(&m);
                v.to_integer().try_into().expect("small pfaffian")
            }
        }
    }
}

/// Integrand polynomial × sector-constant signs against Lebesgue measure on [a, b]^N.
#[derive(Clone, Debug)]
pub struct SectorIntegrand {
    pub poly: MultiPoly,
    pub signs: SignFactor,
    pub interval: (Rational, Rational),
    pub degree_cap: u32,
}

impl SectorIntegrand {
    pub fn new(poly: MultiPoly, signs: SignFactor) -> Self {
        SectorIntegrand {
            poly,
            signs,
            interval: (Rational::zero(), Rational::one()),
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn on_interval(mut self, a: Rational, b: Rational) -> Self {
        self.interval = (a, b);
        self
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self
    }
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Sum over all N! orderings of the exact iterated integral of poly × signs.
pub fn exact_sector_integral(s: &SectorIntegrand) -> Result<Rational> {
    let n = s.poly.nvars();
    if n > MAX_SECTOR_VARS {
        return Err(Error::Unsupported(format!("sector integration over {n} > {MAX_SECTOR_VARS} variables")));
    }
    let degree = s.poly.max_degree();
    if degree > s.degree_cap {
        return Err(Error::DegreeCap { degree: degree as usize, cap: s.degree_cap as usize });
    }
    if n == 0 {
        return Ok(s.poly.eval::<Rational>(&[]) * Rational::from_integer(s.signs.on_sector(&[]).into()));
    }
    let (a, b) = &s.interval;
    let terms: Vec<Rational> = permutations(n)
        .into_par_iter()
        .map(|order| {
            // order[k] is the variable in position k: x_{order[0]} ≤ … ≤ x_{order[n-1]}
            let mut rank = vec![0; n];
            for (k, &v) in order.iter().enumerate() {
                rank[v] = k;
            }
            let sign = s.signs.on_sector(&rank);
            if sign == 0 {
                return Rational::zero();
            }
            let mut p = s.poly.clone();
            for k in 0..n {
                let v = order[k];
                let anti = p.antiderivative(v);
                let upper = if k + 1 < n { anti.substitute_var(v, order[k + 1]) } else { anti.substitute_value(v, b) };
                p = upper.sub(&anti.substitute_value(v, a));
            }
            p.eval::<Rational>(&vec![Rational::zero(); n]) * Rational::from_integer(sign.into())
        })
        .collect();
    Ok(terms.into_iter().fold(Rational::zero(), |acc, t| acc + t))
}

/// ∫ p dμ_1 ⋯ dμ_n by moments; measures must be exact.
pub fn exact_poly_integral(p: &MultiPoly, measures: &[Measure]) -> Result<Rational> {
    exact_poly_integral_capped(p, measures, DEFAULT_DEGREE_CAP)
}

pub fn exact_poly_integral_capped(p: &MultiPoly, measures: &[Measure], cap: u32) -> Result<Rational> {
    if measures.len() != p.nvars() {
        return Err(Error::Dimension(format!("{} measures for {} variables", measures.len(), p.nvars())));
    }
    if measures.iter().any(|m| !m.is_exact()) {
        return Err(Error::ExactUnavailable("custom measures have no exact moments".into()));
    }
    let degree = p.max_degree();
    if degree > cap {
        return Err(Error::DegreeCap { degree: degree as usize, cap: cap as usize });
    }
    let moments: Vec<Vec<Rational>> = measures
        .iter()
        .map(|m| {
            (0..=degree as usize)
                .map(|k| m.moment(k).as_rational().cloned().expect("exact moment"))
                .collect()
        })
        .collect();
    Ok(p.terms().fold(Rational::zero(), |acc, (e, c)| {
        acc + e.iter().enumerate().fold(c.clone(), |m, (i, &k)| m * &moments[i][k as usize])
    }))
}

/// Samples per block; blocks are the unit of parallelism and of stream selection.
const BLOCK: u64 = 4096;

/// Monte Carlo estimate of ∫ f dμ_1 ⋯ dμ_n.
#[derive(Clone, Debug)]
pub struct McTask {
    pub measures: Vec<Measure>,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Whether `value` lies within k standard errors.
    pub fn brackets(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }

    /// Distance to `value` in standard errors.
    pub fn sigmas(&self, value: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.estimate == value { 0.0 } else { f64::INFINITY }
        } else {
            (self.estimate - value).abs() / self.stderr
        }
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments { n: 0.0, mean: 0.0, m2: 0.0 };

    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments { n, mean: a.mean + d * b.n / n, m2: a.m2 + b.m2 + d * d * a.n * b.n / n }
    }
}

/// Pairwise merge in a fixed tree shape.
fn merge_tree(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments::EMPTY,
        1 => parts[0],
        n => Moments::merge(merge_tree(&parts[..n / 2]), merge_tree(&parts[n / 2..])),
    }
}

enum Sampler {
    Uniform { lo: f64, width: f64 },
    Discrete { cumulative: Vec<f64>, points: Vec<f64> },
}

impl Sampler {
    fn new(m: &Measure) -> Result<(Self, f64)> {
        match m {
            Measure::Uniform { a, b, .. } => {
                let (lo, hi) = (rational_to_f64(a), rational_to_f64(b));
                Ok((Sampler::Uniform { lo, width: hi - lo }, hi - lo))
            }
            Measure::Discrete { points } => {
                let mut acc = 0.0;
                let mut cumulative = Vec::new();
                for (_, w) in points {
                    acc += rational_to_f64(w);
                    cumulative.push(acc);
                }
                let pts = points.iter().map(|(x, _)| rational_to_f64(x)).collect();
                Ok((Sampler::Discrete { cumulative, points: pts }, acc))
            }
            Measure::Custom { .. } => Err(Error::Unsupported("Monte Carlo over custom measures".into())),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        match self {
            Sampler::Uniform { lo, width } => lo + width * u,
            Sampler::Discrete { cumulative, points } => {
                let t = u * cumulative.last().copied().unwrap_or(0.0);
                let i = cumulative.partition_point(|c| *c <= t).min(points.len() - 1);
                points[i]
            }
        }
    }
}

/// Deterministic Monte Carlo: block b draws from ChaCha8 stream b of `seed`, so the
/// estimate does not depend on the number of threads.
pub fn mc_integral<F>(task: &McTask, f: F) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if task.samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let mut samplers = Vec::new();
    let mut volume = 1.0;
    for m in &task.measures {
        let (s, mass) = Sampler::new(m)?;
        samplers.push(s);
        volume *= mass;
    }
    let blocks = task.samples.div_ceil(BLOCK);
    let parts: Vec<Result<Moments>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(task.seed);
            rng.set_stream(block);
            let start = block * BLOCK;
            let end = (start + BLOCK).min(task.samples);
            let mut x = vec![0.0; samplers.len()];
            let mut acc = Moments::EMPTY;
            for index in start..end {
                for (xi, s) in x.iter_mut().zip(&samplers) {
                    *xi = s.draw(&mut rng);
                }
                let v = f(&x) * volume;
                if !v.is_finite() {
                    return Err(Error::NonFinite { index });
                }
                acc.push(v);
            }
            Ok(acc)
        })
        .collect();
    let parts: Vec<Moments> = parts.into_iter().collect::<Result<_>>()?;
    let total = merge_tree(&parts);
    let variance = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(McEstimate { estimate: total.mean, stderr: (variance / total.n).sqrt(), samples: task.samples })
}
