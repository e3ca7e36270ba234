//! Matrix-chain partition functions: the β=1 and β=4 chains, the D-type quiver model, and
//! the defining integrands used to check them by Monte Carlo.
//!
//! Operator composition along the chain is discretized: a basis function is sampled on the
//! quadrature nodes of the first measure and pushed edge by edge with `transfer_matrix`;
//! the terminal pairing uses `kernel_matrix`. δ edges between identical measures are
//! removed beforehand, so chains that reduce to a single node stay exact.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, supports_disjoint, transfer_matrix, PairKernel};
use crate::matrix::{DenseMatrix, SkewMatrix};
use crate::measure::Measure;
use crate::models::{descending_monomials, standard_kernel, Beta1Model, Beta4Model};
use crate::oracle::permutations;
use crate::pfaffian::pf;
use crate::poly::Poly;
use crate::scalar::{int, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainBeta {
    One,
    Four,
}

/// A chain of L nodes: measures μ_1..μ_L, edge kernels ω_1..ω_{L-1} (2×2 blocks Ω_k for
/// β=4), a terminal kernel A (𝖠) on the last node, and the basis f (and g for β=4).
#[derive(Clone, Debug)]
pub struct ChainSpec {
    beta: ChainBeta,
    measures: Vec<Measure>,
    edges: Vec<PairKernel>,
    terminal: PairKernel,
    fbasis: Vec<Poly<Rational>>,
    gbasis: Vec<Poly<Rational>>,
}

impl ChainSpec {
    pub fn beta1(basis: Vec<Poly<Rational>>, measures: Vec<Measure>, edges: Vec<PairKernel>, terminal: PairKernel) -> Result<Self> {
        if !basis.len().is_multiple_of(2) {
            return Err(Error::Parity(format!("β=1 chain needs an even basis, got {}", basis.len())));
        }
        if terminal.is_block() || !terminal.is_antisymmetric() {
            return Err(Error::InvalidArgument(format!("terminal {terminal:?} must be a scalar antisymmetric kernel")));
        }
        if let Some(k) = edges.iter().find(|k| k.is_block()) {
            return Err(Error::InvalidArgument(format!("β=1 edge {k:?} must be scalar")));
        }
        let spec = ChainSpec { beta: ChainBeta::One, measures, edges, terminal, fbasis: basis, gbasis: Vec::new() };
        spec.check_links()?;
        Ok(spec)
    }

    pub fn beta4(
        fbasis: Vec<Poly<Rational>>,
        gbasis: Vec<Poly<Rational>>,
        measures: Vec<Measure>,
        edges: Vec<PairKernel>,
        terminal: PairKernel,
    ) -> Result<Self> {
        if fbasis.len() != gbasis.len() {
            return Err(Error::Dimension(format!("{} f functions vs {} g functions", fbasis.len(), gbasis.len())));
        }
        if !fbasis.len().is_multiple_of(2) {
            return Err(Error::Parity(format!("β=4 chain needs 2N functions, got {}", fbasis.len())));
        }
        if !terminal.is_block() || !terminal.is_antisymmetric() {
            return Err(Error::InvalidArgument(format!("terminal {terminal:?} must be an antisymmetric block kernel")));
        }
        if let Some(k) = edges.iter().find(|k| !k.is_block()) {
            return Err(Error::InvalidArgument(format!("β=4 edge {k:?} must be a 2×2 block")));
        }
        let spec = ChainSpec { beta: ChainBeta::Four, measures, edges, terminal, fbasis, gbasis };
        spec.check_links()?;
        Ok(spec)
    }

    fn check_links(&self) -> Result<()> {
        if self.measures.is_empty() {
            return Err(Error::InvalidArgument("a chain needs at least one node".into()));
        }
        if self.edges.len() + 1 != self.measures.len() {
            return Err(Error::Dimension(format!("{} nodes need {} edges, got {}", self.measures.len(), self.measures.len() - 1, self.edges.len())));
        }
        for (k, edge) in self.edges.iter().enumerate() {
            let (m1, m2) = (&self.measures[k], &self.measures[k + 1]);
            if edge.needs_disjoint() && !supports_disjoint(m1, m2) {
                return Err(Error::SupportOverlap(format!("edge {k} ({edge:?}) joins overlapping supports")));
            }
            if mentions_delta(edge) && m1 != m2 {
                return Err(Error::InvalidArgument(format!("δ in edge {k} needs identical neighbouring measures")));
            }
        }
        Ok(())
    }

    /// The C-type chain: f_i = x^{N-1-i}, ω = 1/(x - y), A = sgn, node k on [2k, 2k+1].
    pub fn c_type(n: usize, l: usize) -> Result<Self> {
        let measures = separated_units(l)?;
        Self::beta1(descending_monomials(n), measures, vec![PairKernel::Cauchy; l - 1], PairKernel::Sgn)
    }

    /// The B-type chain: f = g = x^{2N-1-i}, Cauchy blocks with the squared last edge,
    /// A = B = 0 and S = δ, node k on [2k, 2k+1].
    pub fn b_type(n: usize, l: usize) -> Result<Self> {
        let measures = separated_units(l)?;
        let mut edges = vec![cauchy_block(); l - 1];
        if let Some(last) = edges.last_mut() {
            *last = b_type_edge();
        }
        let f = descending_monomials(2 * n);
        Self::beta4(f.clone(), f, measures, edges, standard_kernel())
    }

    /// Same chain with every uniform measure at quadrature order q.
    pub fn with_order(&self, q: usize) -> Self {
        let mut s = self.clone();
        s.measures = s.measures.iter().map(|m| m.with_order(q)).collect();
        s
    }

    pub fn beta(&self) -> ChainBeta {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    /// N: eigenvalues per node.
    pub fn n(&self) -> usize {
        match self.beta {
            ChainBeta::One => self.fbasis.len(),
            ChainBeta::Four => self.fbasis.len() / 2,
        }
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn edges(&self) -> &[PairKernel] {
        &self.edges
    }

    pub fn terminal(&self) -> &PairKernel {
        &self.terminal
    }

    fn is_identity_edge(&self, k: &PairKernel) -> bool {
        let canon = k.canonical();
        match self.beta {
            ChainBeta::One => canon == PairKernel::Delta,
            ChainBeta::Four => {
                canon == PairKernel::block(PairKernel::Delta, PairKernel::Zero, PairKernel::Zero, PairKernel::Delta)
            }
        }
    }

    /// Drops identity edges; their two measures coincide, so the nodes merge.
    pub fn compressed(&self) -> Self {
        let mut measures = vec![self.measures[0].clone()];
        let mut edges = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if !self.is_identity_edge(e) {
                edges.push(e.clone());
                measures.push(self.measures[k + 1].clone());
            }
        }
        ChainSpec { measures, edges, ..self.clone() }
    }

    /// Stacked node values on μ_1: [f(x_a)] for β=1, [f(x_a); g(x_a)] for β=4.
    fn start_vectors(&self) -> Vec<Vec<f64>> {
        let nodes = self.measures[0].nodes();
        (0..self.fbasis.len())
            .map(|i| {
                let (f, g) = (self.fbasis[i].to_f64(), self.gbasis.get(i).map(|g| g.to_f64()));
                let mut v: Vec<f64> = nodes.iter().map(|(x, _)| f.eval(x)).collect();
                if let Some(g) = g {
                    v.extend(nodes.iter().map(|(x, _)| g.eval(x)));
                }
                v
            })
            .collect()
    }

    fn quadrature_z(&self) -> Result<f64> {
        let transfers: Vec<DenseMatrix<f64>> = (0..self.edges.len())
            .into_par_iter()
            .map(|k| transfer_matrix(&self.edges[k], &self.measures[k], &self.measures[k + 1]))
            .collect::<Result<_>>()?;
        let mut vectors = self.start_vectors();
        for t in &transfers {
            vectors = vectors.iter().map(|v| t.apply(v)).collect::<Result<_>>()?;
        }
        let last = self.measures.last().expect("nonempty chain");
        let w = kernel_matrix(&self.terminal, last, last)?;
        let m = pairing_matrix(&vectors, &w, &vectors)?;
        let z = pf(&SkewMatrix::from_upper_fn(m.rows(), |i, j| (m.get(i, j) - m.get(j, i)) / 2.0));
        if !z.is_finite() {
            return Err(Error::Singular("chain discretization produced a non-finite Pfaffian".into()));
        }
        Ok(z)
    }

    fn single_node_z(&self) -> Result<Scalar> {
        let measure = self.measures[0].clone();
        let exact_then_float = |exact: Result<Rational>, float: &dyn Fn() -> Result<f64>| match exact {
            Ok(v) => Ok(Scalar::Exact(v)),
            Err(Error::ExactUnavailable(_)) | Err(Error::Unsupported(_)) => Ok(Scalar::Float(float()?)),
            Err(e) => Err(e),
        };
        match self.beta {
            ChainBeta::One => {
                let m = Beta1Model::new(self.fbasis.clone(), self.terminal.clone(), measure)?;
                exact_then_float(m.z::<Rational>(), &|| m.z::<f64>())
            }
            ChainBeta::Four => {
                let m = Beta4Model::new(self.fbasis.clone(), self.gbasis.clone(), self.terminal.clone(), measure)?;
                exact_then_float(m.z::<Rational>(), &|| m.z::<f64>())
            }
        }
    }

    /// The defining integral as a Monte Carlo task. β=1 variables are X_1, …, X_L; β=4
    /// variables are (X_k, X̃_k) for k < L followed by X_L, where the standard terminal
    /// (A = B = 0, S = δ) has been integrated over X̃_L. The prefactor is 1/N!^L for β=1
    /// and 1/N!^{2L} for β=4.
    pub fn integrand(&self) -> Result<ChainIntegrand> {
        let n = self.n();
        let per_node = match self.beta {
            ChainBeta::One => factorial(n),
            ChainBeta::Four => factorial(n).powi(2),
        };
        let prefactor = 1.0 / per_node.powi(self.compressed().len() as i32);
        let point = |k: &PairKernel| -> Result<()> {
            if k.eval(0.25, 0.75).is_none() {
                return Err(Error::Unsupported(format!("kernel {k:?} has no pointwise value for sampling")));
            }
            Ok(())
        };
        let spec = Arc::new(self.compressed());
        let (measures, eval): (Vec<Measure>, IntegrandFn) = match self.beta {
            ChainBeta::One => {
                for e in spec.edges.iter().chain([&spec.terminal]) {
                    point(e)?;
                }
                let measures = spec.measures.iter().flat_map(|m| vec![m.clone(); n]).collect();
                let s = spec.clone();
                (measures, Arc::new(move |x: &[f64]| beta1_chain_value(&s, x)))
            }
            ChainBeta::Four => {
                for e in &spec.edges {
                    let PairKernel::Matrix2x2(b) = e.canonical() else { unreachable!("validated block edge") };
                    for k in b.iter() {
                        point(k)?;
                    }
                }
                if spec.terminal.canonical() != standard_kernel().canonical() {
                    return Err(Error::Unsupported("sampling needs the terminal A = B = 0, S = δ".into()));
                }
                let l = spec.len();
                let mut measures = Vec::new();
                for m in &spec.measures[..l - 1] {
                    measures.extend(vec![m.clone(); 2 * n]);
                }
                measures.extend(vec![spec.measures[l - 1].clone(); n]);
                let s = spec.clone();
                (measures, Arc::new(move |x: &[f64]| beta4_chain_value(&s, x)))
            }
        };
        Ok(ChainIntegrand { measures, prefactor, eval })
    }
}

fn mentions_delta(k: &PairKernel) -> bool {
    match k {
        PairKernel::Delta => true,
        PairKernel::Transpose(k) | PairKernel::Neg(k) => mentions_delta(k),
        PairKernel::Matrix2x2(b) => b.iter().any(mentions_delta),
        _ => false,
    }
}

fn separated_units(l: usize) -> Result<Vec<Measure>> {
    if l == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one node".into()));
    }
    (0..l).map(|k| unit_at(2 * k)).collect()
}

/// Lebesgue measure on [s, s+1].
fn unit_at(s: usize) -> Result<Measure> {
    Measure::uniform(int(s as i64), int(s as i64 + 1))
}

fn cauchy_block() -> PairKernel {
    PairKernel::block(PairKernel::Cauchy, PairKernel::Cauchy, PairKernel::Cauchy, PairKernel::Cauchy)
}

/// [[1/(x-y), 1/(x-ỹ)²], [1/(x̃-y), 1/(x̃-ỹ)²]].
pub fn b_type_edge() -> PairKernel {
    PairKernel::block(PairKernel::Cauchy, PairKernel::CauchySquared, PairKernel::Cauchy, PairKernel::CauchySquared)
}

/// M_ij = u_iᵀ W v_j.
fn pairing_matrix(u: &[Vec<f64>], w: &DenseMatrix<f64>, v: &[Vec<f64>]) -> Result<DenseMatrix<f64>> {
    let wv: Vec<Vec<f64>> = v.iter().map(|x| w.apply(x)).collect::<Result<_>>()?;
    Ok(DenseMatrix::from_fn(u.len(), v.len(), |i, j| u[i].iter().zip(&wv[j]).map(|(a, b)| a * b).sum()))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Z^{(1)} for a β=1 chain: exact after δ compression to one node, quadrature otherwise.
pub fn chain_z_beta1(spec: &ChainSpec) -> Result<Scalar> {
    if spec.beta != ChainBeta::One {
        return Err(Error::InvalidArgument("expected a β=1 chain".into()));
    }
    chain_z(spec)
}

/// Z^{(4)} for a β=4 chain; exactness as for `chain_z_beta1`.
pub fn chain_z_beta4(spec: &ChainSpec) -> Result<Scalar> {
    if spec.beta != ChainBeta::Four {
        return Err(Error::InvalidArgument("expected a β=4 chain".into()));
    }
    chain_z(spec)
}

fn chain_z(spec: &ChainSpec) -> Result<Scalar> {
    let c = spec.compressed();
    if c.len() == 1 {
        c.single_node_z()
    } else {
        Ok(Scalar::Float(c.quadrature_z()?))
    }
}

type IntegrandFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A sampled integrand: ∫ prefactor · eval(x) dμ_1(x_1) ⋯ dμ_n(x_n).
#[derive(Clone)]
pub struct ChainIntegrand {
    pub measures: Vec<Measure>,
    pub prefactor: f64,
    eval: IntegrandFn,
}

impl ChainIntegrand {
    /// Integrand value without the prefactor.
    pub fn raw(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.prefactor * (self.eval)(x)
    }
}

fn det_f64(rows: usize, f: impl FnMut(usize, usize) -> f64) -> f64 {
    DenseMatrix::from_fn(rows, rows, f).det().unwrap_or(f64::NAN)
}

fn beta1_chain_value(s: &ChainSpec, x: &[f64]) -> f64 {
    let n = s.n();
    let node = |k: usize| &x[k * n..(k + 1) * n];
    let f: Vec<Poly<f64>> = s.fbasis.iter().map(Poly::to_f64).collect();
    let mut v = det_f64(n, |i, j| f[j].eval(&node(0)[i]));
    for (k, e) in s.edges.iter().enumerate() {
        let (a, b) = (node(k), node(k + 1));
        v *= det_f64(n, |i, j| e.eval(a[i], b[j]).unwrap_or(f64::NAN));
    }
    let last = node(s.len() - 1);
    v * pf(&SkewMatrix::from_upper_fn(n, |i, j| s.terminal.eval(last[i], last[j]).unwrap_or(f64::NAN)))
}

/// Rows and columns are interleaved (x_1, x̃_1, x_2, x̃_2, …); the δ terminal contributes
/// Σ_σ sgn σ · (rest at x̃_j = x_{σ(j)}).
fn beta4_chain_value(s: &ChainSpec, x: &[f64]) -> f64 {
    let n = s.n();
    let l = s.len();
    let pair = |k: usize| -> (&[f64], &[f64]) {
        let base = 2 * n * k;
        (&x[base..base + n], &x[base + n..base + 2 * n])
    };
    let last = &x[2 * n * (l - 1)..];
    let f: Vec<Poly<f64>> = s.fbasis.iter().map(Poly::to_f64).collect();
    let g: Vec<Poly<f64>> = s.gbasis.iter().map(Poly::to_f64).collect();
    let blocks: Vec<[PairKernel; 4]> = s
        .edges
        .iter()
        .map(|e| match e.canonical() {
            PairKernel::Matrix2x2(b) => *b,
            _ => unreachable!("validated block edge"),
        })
        .collect();
    let omega = |k: usize, left: (&[f64], &[f64]), right: (&[f64], &[f64])| {
        det_f64(2 * n, |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            let xa = if a == 0 { left.0[i] } else { left.1[i] };
            let yb = if b == 0 { right.0[j] } else { right.1[j] };
            blocks[k][2 * a + b].eval(xa, yb).unwrap_or(f64::NAN)
        })
    };
    let head = |xs: &[f64], xt: &[f64]| {
        det_f64(2 * n, |r, c| if r % 2 == 0 { f[c].eval(&xs[r / 2]) } else { g[c].eval(&xt[r / 2]) })
    };
    let mut body = 1.0;
    for k in 0..l.saturating_sub(2) {
        body *= omega(k, pair(k), pair(k + 1));
    }
    permutations(n)
        .into_iter()
        .map(|sigma| {
            let tilde: Vec<f64> = sigma.iter().map(|&s| last[s]).collect();
            let tail = if l == 1 { head(last, &tilde) } else { omega(l - 2, pair(l - 2), (last, &tilde)) };
            perm_sign(&sigma) * tail
        })
        .sum::<f64>()
        * body
        * if l == 1 { 1.0 } else { head(pair(0).0, pair(0).1) }
}

fn perm_sign(p: &[usize]) -> f64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1.0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// D_{L+1} chain: Z_1, …, Z_{L-1} carry 2N eigenvalues each, the fork nodes X_L and X̃_L carry N.
#[derive(Clone, Debug)]
pub struct DTypeSpec {
    pub n: usize,
    pub chain: Vec<Measure>,
    pub fork: Measure,
    pub fork_tilde: Measure,
}

impl DTypeSpec {
    pub fn new(n: usize, chain: Vec<Measure>, fork: Measure, fork_tilde: Measure) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        if chain.is_empty() {
            return Err(Error::InvalidArgument("D_{L+1} needs L ≥ 2".into()));
        }
        let spec = DTypeSpec { n, chain, fork, fork_tilde };
        let last = spec.chain.last().expect("nonempty");
        let mut pairs: Vec<(&Measure, &Measure)> = spec.chain.windows(2).map(|w| (&w[0], &w[1])).collect();
        pairs.extend([(last, &spec.fork), (last, &spec.fork_tilde), (&spec.fork, &spec.fork_tilde)]);
        if pairs.iter().any(|(a, b)| !supports_disjoint(a, b)) {
            return Err(Error::SupportOverlap("D-type nodes joined by an edge must have disjoint supports".into()));
        }
        Ok(spec)
    }

    /// Z_k on [2k, 2k+1] for k < L-1, X_L on [2L-2, 2L-1], X̃_L on [2L, 2L+1].
    pub fn standard(n: usize, l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidArgument(format!("D_{} needs L ≥ 2", l + 1)));
        }
        let chain = (0..l - 1).map(|k| unit_at(2 * k)).collect::<Result<_>>()?;
        Self::new(n, chain, unit_at(2 * l - 2)?, unit_at(2 * l)?)
    }

    pub fn l(&self) -> usize {
        self.chain.len() + 1
    }

    pub fn with_order(&self, q: usize) -> Self {
        DTypeSpec {
            n: self.n,
            chain: self.chain.iter().map(|m| m.with_order(q)).collect(),
            fork: self.fork.with_order(q),
            fork_tilde: self.fork_tilde.with_order(q),
        }
    }

    /// The antisymmetrized matrix ⟨p_{2N-i}|ω^{2L-1}|p_{2N-j}⟩ - (i ↔ j), ω = 1/(x - y).
    pub fn pairing_matrix(&self) -> Result<SkewMatrix<f64>> {
        let basis: Vec<Poly<f64>> = descending_monomials(2 * self.n).iter().map(Poly::to_f64).collect();
        let nodes = self.chain[0].nodes();
        let start: Vec<Vec<f64>> = basis.iter().map(|p| nodes.iter().map(|(x, _)| p.eval(x)).collect()).collect();
        let push = |kernel: PairKernel, end: &Measure| -> Result<Vec<Vec<f64>>> {
            let mut v = start.clone();
            let mut path: Vec<&Measure> = self.chain.iter().collect();
            path.push(end);
            for w in path.windows(2) {
                let t = transfer_matrix(&kernel, w[0], w[1])?;
                v = v.iter().map(|x| t.apply(x)).collect::<Result<_>>()?;
            }
            Ok(v)
        };
        let forward = push(PairKernel::Cauchy, &self.fork)?;
        let backward = push(PairKernel::Cauchy.transpose(), &self.fork_tilde)?;
        let w = kernel_matrix(&PairKernel::Cauchy, &self.fork, &self.fork_tilde)?;
        let t = pairing_matrix(&forward, &w, &backward)?;
        Ok(SkewMatrix::from_upper_fn(2 * self.n, |i, j| t.get(i, j) - t.get(j, i)))
    }

    /// Defining integrand with prefactor 1/((2N)!^{L-1} N!²). Variables: Z_1, …, Z_{L-1}
    /// (2N each), X_L, X̃_L.
    pub fn integrand(&self) -> ChainIntegrand {
        let n = self.n;
        let mut measures = Vec::new();
        for m in &self.chain {
            measures.extend(vec![m.clone(); 2 * n]);
        }
        measures.extend(vec![self.fork.clone(); n]);
        measures.extend(vec![self.fork_tilde.clone(); n]);
        let l = self.l();
        let prefactor = 1.0 / (factorial(2 * n).powi(l as i32 - 1) * factorial(n).powi(2));
        let eval = move |x: &[f64]| {
            let z = |k: usize| &x[2 * n * k..2 * n * (k + 1)];
            let tail = &x[2 * n * (l - 1)..];
            let (xs, xt) = (&tail[..n], &tail[n..]);
            let mut v = 1.0;
            for k in 0..l - 1 {
                v *= vandermonde_sq(z(k));
            }
            v *= vandermonde_sq(xs) * vandermonde_sq(xt);
            for k in 0..l - 2 {
                v /= cross(z(k), z(k + 1));
            }
            v / (cross(z(l - 2), xs) * cross(z(l - 2), xt))
        };
        ChainIntegrand { measures, prefactor, eval: Arc::new(eval) }
    }
}

fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            v *= (x[i] - x[j]) * (x[i] - x[j]);
        }
    }
    v
}

/// ∏_{i,j} (a_i - b_j).
fn cross(a: &[f64], b: &[f64]) -> f64 {
    a.iter().flat_map(|x| b.iter().map(move |y| x - y)).product()
}

/// Z[D_{L+1}] as the Pfaffian of the antisymmetrized 2N×2N pairing matrix.
pub fn d_type_z(spec: &DTypeSpec) -> Result<f64> {
    let m = spec.pairing_matrix()?;
    let z = pf(&m);
    if !z.is_finite() {
        return Err(Error::Singular("D-type discretization produced a non-finite Pfaffian".into()));
    }
    Ok(z)
}

/// Combinatorial prefactor 1/((2N)!^{L-1} N!) of the B-type quiver integrand.
pub fn b_model_prefactor(n: usize, l: usize) -> f64 {
    1.0 / (factorial(2 * n).powi(l as i32 - 1) * factorial(n))
}

/// Combinatorial prefactor 1/N!^L of the C-type quiver integrand.
pub fn c_model_prefactor(n: usize, l: usize) -> f64 {
    1.0 / factorial(n).powi(l as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{mc_integral, McTask};
    use crate::scalar::rat;

    fn unit() -> Measure {
        Measure::unit()
    }

    #[test]
    fn single_node_is_exact() {
        let c = ChainSpec::c_type(2, 1).unwrap();
        assert_eq!(chain_z_beta1(&c).unwrap(), Scalar::Exact(rat(1, 6)));
        let b = ChainSpec::beta4(
            descending_monomials(2),
            descending_monomials(2).iter().map(Poly::derivative).collect(),
            vec![unit()],
            vec![],
            standard_kernel(),
        )
        .unwrap();
        assert_eq!(chain_z_beta4(&b).unwrap(), Scalar::Exact(int(-1)));
    }

    #[test]
    fn delta_edges_drop_out() {
        let c = ChainSpec::beta1(descending_monomials(2), vec![unit(), unit(), unit()], vec![PairKernel::Delta; 2], PairKernel::Sgn).unwrap();
        assert_eq!(chain_z_beta1(&c).unwrap(), Scalar::Exact(rat(1, 6)));
        let id = PairKernel::block(PairKernel::Delta, PairKernel::Zero, PairKernel::Zero, PairKernel::Delta);
        let f = descending_monomials(4);
        let g = f.iter().map(Poly::derivative).collect();
        let b = ChainSpec::beta4(f, g, vec![unit(), unit()], vec![id], standard_kernel()).unwrap();
        assert_eq!(chain_z_beta4(&b).unwrap(), Scalar::Exact(rat(1, 30)));
    }

    #[test]
    fn rejects_bad_chains() {
        let far = Measure::uniform(int(2), int(3)).unwrap();
        assert!(matches!(
            ChainSpec::beta1(descending_monomials(2), vec![unit(), unit()], vec![PairKernel::Cauchy], PairKernel::Sgn),
            Err(Error::SupportOverlap(_))
        ));
        assert!(ChainSpec::beta1(descending_monomials(2), vec![unit(), far.clone()], vec![PairKernel::Delta], PairKernel::Sgn).is_err());
        assert!(ChainSpec::beta1(descending_monomials(2), vec![unit(), far], vec![], PairKernel::Sgn).is_err());
        assert!(ChainSpec::beta1(descending_monomials(3), vec![unit()], vec![], PairKernel::Sgn).is_err());
        assert!(DTypeSpec::standard(1, 1).is_err());
    }

    #[test]
    fn quadrature_converges() {
        let c = ChainSpec::c_type(2, 3).unwrap();
        let (a, b) = (chain_z_beta1(&c.with_order(32)).unwrap(), chain_z_beta1(&c.with_order(64)).unwrap());
        assert!((a.to_f64() - b.to_f64()).abs() < 1e-12 * b.to_f64().abs().max(1e-300));
        let d = DTypeSpec::standard(1, 3).unwrap();
        let (a, b) = (d_type_z(&d.with_order(32)).unwrap(), d_type_z(&d.with_order(64)).unwrap());
        assert!((a - b).abs() < 1e-12 * b.abs());
    }

    #[test]
    fn d_type_matrix_is_antisymmetric_by_construction() {
        let m = DTypeSpec::standard(2, 2).unwrap().pairing_matrix().unwrap().to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(*m.get(i, j), -*m.get(j, i));
            }
        }
    }

    fn mc(i: &ChainIntegrand, samples: u64, seed: u64) -> crate::oracle::McEstimate {
        let task = McTask { measures: i.measures.clone(), samples, seed };
        mc_integral(&task, |x| i.value(x)).unwrap()
    }

    #[test]
    fn cauchy_chain_matches_sampling() {
        let c = ChainSpec::c_type(2, 2).unwrap();
        let z = chain_z_beta1(&c).unwrap().to_f64();
        let est = mc(&c.integrand().unwrap(), 200_000, 7);
        assert!(est.sigmas(z) < 4.0, "{z} vs {est:?}");
    }

    #[test]
    fn b_type_pfaffian_vs_sampling_at_one_pair() {
        // mixing blocks break the single-species Andréief step; at N = 1 each edge doubles
        for l in [2, 3] {
            let c = ChainSpec::b_type(1, l).unwrap();
            let z = chain_z_beta4(&c).unwrap().to_f64();
            let est = mc(&c.integrand().unwrap(), 200_000, 11);
            assert!(est.sigmas(z) > 20.0);
            assert!(est.sigmas(z / f64::powi(2.0, l as i32 - 1)) < 4.0, "L={l}: {z} vs {est:?}");
        }
    }

    #[test]
    fn block_diagonal_beta4_chain_matches_sampling() {
        let diag = PairKernel::block(PairKernel::Cauchy, PairKernel::Zero, PairKernel::Zero, PairKernel::Cauchy);
        for n in [1, 2] {
            let f = descending_monomials(2 * n);
            let g = f.iter().map(Poly::derivative).collect();
            let c = ChainSpec::beta4(f, g, separated_units(2).unwrap(), vec![diag.clone()], standard_kernel()).unwrap();
            let z = chain_z_beta4(&c).unwrap().to_f64();
            let est = mc(&c.integrand().unwrap(), 200_000, 13);
            assert!(est.sigmas(z) < 4.0, "N={n}: {z} vs {est:?}");
        }
    }

    #[test]
    fn beta4_sampling_reproduces_single_node() {
        let f = descending_monomials(4);
        let g = f.iter().map(Poly::derivative).collect();
        let c = ChainSpec::beta4(f, g, vec![unit()], vec![], standard_kernel()).unwrap();
        let est = mc(&c.integrand().unwrap(), 200_000, 3);
        assert!(est.sigmas(1.0 / 30.0) < 4.0, "{est:?}");
    }

    #[test]
    fn d_type_matches_sampling() {
        for l in [2, 3] {
            let d = DTypeSpec::standard(1, l).unwrap();
            let z = d_type_z(&d).unwrap();
            let est = mc(&d.integrand(), 200_000, 5);
            assert!(est.sigmas(z) < 4.0, "L={l}: {z} vs {est:?}");
        }
    }
}
