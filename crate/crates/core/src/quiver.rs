//! Dynkin-quiver data: Cartan matrices, symmetrization, Langlands duality, folding, and the
//! interaction exponents of quiver matrix models.

use std::fmt;
use std::str::FromStr;

use num::integer::gcd;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DynkinType {
    A,
    B,
    C,
    D,
}

impl DynkinType {
    pub fn min_rank(self) -> usize {
        match self {
            DynkinType::A => 1,
            DynkinType::B | DynkinType::C => 2,
            DynkinType::D => 3,
        }
    }

    /// B ↔ C; A and D are self-dual.
    pub fn dual(self) -> Self {
        match self {
            DynkinType::B => DynkinType::C,
            DynkinType::C => DynkinType::B,
            t => t,
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self, DynkinType::A | DynkinType::D)
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DynkinType::A => "A",
            DynkinType::B => "B",
            DynkinType::C => "C",
            DynkinType::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for DynkinType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(DynkinType::A),
            "B" => Ok(DynkinType::B),
            "C" => Ok(DynkinType::C),
            "D" => Ok(DynkinType::D),
            _ => Err(Error::InvalidArgument(format!("unknown Dynkin type {s:?}"))),
        }
    }
}

/// Cartan matrix c, root lengths d, b = d·c and b̄ = b / gcd(b).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanRecord {
    pub kind: DynkinType,
    pub rank: usize,
    pub c: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    pub b: Vec<Vec<i64>>,
    #[serde(serialize_with = "serialize_rational_matrix")]
    pub b_bar: Vec<Vec<Rational>>,
}

fn serialize_rational_matrix<S: serde::Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    rows.serialize(s)
}

fn check_rank(kind: DynkinType, rank: usize) -> Result<()> {
    if rank < kind.min_rank() {
        return Err(Error::InvalidArgument(format!("{kind}_{rank}: rank must be at least {}", kind.min_rank())));
    }
    Ok(())
}

/// Nodes 0..r; the special node is the last one (B, C) or the two last ones (D).
pub fn cartan_matrices(kind: DynkinType, rank: usize) -> Result<CartanRecord> {
    check_rank(kind, rank)?;
    let r = rank;
    let mut c = vec![vec![0i64; r]; r];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let chain_end = if kind == DynkinType::D { r - 1 } else { r };
    for i in 0..chain_end.saturating_sub(1) {
        c[i][i + 1] = -1;
        c[i + 1][i] = -1;
    }
    let mut d = vec![1i64; r];
    match kind {
        DynkinType::A => {}
        DynkinType::B => {
            // short terminal root
            c[r - 1][r - 2] = -2;
            d = (0..r).map(|i| if i + 1 == r { 1 } else { 2 }).collect();
        }
        DynkinType::C => {
            c[r - 2][r - 1] = -2;
            d = (0..r).map(|i| if i + 1 == r { 2 } else { 1 }).collect();
        }
        DynkinType::D => {
            // fork: node r-3 joins r-2 and r-1
            c[r - 3][r - 1] = -1;
            c[r - 1][r - 3] = -1;
        }
    }
    let b: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| d[i] * c[i][j]).collect()).collect();
    let g = b.iter().flatten().fold(0i64, |acc, &x| gcd(acc, x));
    let b_bar = b.iter().map(|row| row.iter().map(|&x| Rational::new(x.into(), g.into())).collect()).collect();
    Ok(CartanRecord { kind, rank, c, d, b, b_bar })
}

/// A bond between two nodes; for double bonds the arrow points at the short root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub multiplicity: u32,
    pub arrow_to: Option<usize>,
}

/// Dynkin quiver with node sizes N_a and node interaction exponents β_a.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuiverDiagram {
    pub kind: DynkinType,
    pub ranks: Vec<usize>,
    pub betas: Vec<u32>,
    pub edges: Vec<Edge>,
}

impl QuiverDiagram {
    /// The quiver of the given type with node sizes `ranks`; β_a is read off the exponent
    /// matrix of the Langlands dual.
    pub fn new(kind: DynkinType, ranks: Vec<usize>) -> Result<Self> {
        let rank = ranks.len();
        let cartan = cartan_matrices(kind, rank)?;
        let mut edges = Vec::new();
        for a in 0..rank {
            for b in a + 1..rank {
                let (x, y) = (cartan.c[a][b], cartan.c[b][a]);
                if x == 0 {
                    continue;
                }
                let multiplicity = x.unsigned_abs().max(y.unsigned_abs()) as u32;
                let arrow_to = if x.abs() > 1 {
                    Some(a)
                } else if y.abs() > 1 {
                    Some(b)
                } else {
                    None
                };
                edges.push(Edge { a, b, multiplicity, arrow_to });
            }
        }
        let exps = cartan_matrices(kind.dual(), rank)?.b_bar;
        let betas = (0..rank)
            .map(|a| exps[a][a].to_integer().try_into().expect("small exponent"))
            .collect();
        Ok(QuiverDiagram { kind, ranks, betas, edges })
    }

    /// Uniform node size.
    pub fn uniform(kind: DynkinType, rank: usize, n: usize) -> Result<Self> {
        Self::new(kind, vec![n; rank])
    }

    pub fn rank(&self) -> usize {
        self.ranks.len()
    }

    pub fn cartan(&self) -> CartanRecord {
        cartan_matrices(self.kind, self.rank()).expect("validated at construction")
    }
}

impl fmt::Display for QuiverDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{} ranks {:?} betas {:?}", self.kind, self.rank(), self.ranks, self.betas)
    }
}

pub fn langlands_dual(q: &QuiverDiagram) -> QuiverDiagram {
    QuiverDiagram::new(q.kind.dual(), q.ranks.clone()).expect("same rank is valid for the dual type")
}

/// D_{L+1} → B_L identifying the two fork nodes; A_{2L-1} → C_L identifying X_k with X_{2L-k}.
pub fn fold(q: &QuiverDiagram) -> Result<QuiverDiagram> {
    let r = q.rank();
    match q.kind {
        DynkinType::D => {
            if q.ranks[r - 1] != q.ranks[r - 2] {
                return Err(Error::InvalidArgument(format!(
                    "fork nodes of D_{r} have sizes {} and {}; folding needs them equal",
                    q.ranks[r - 2],
                    q.ranks[r - 1]
                )));
            }
            QuiverDiagram::new(DynkinType::B, q.ranks[..r - 1].to_vec())
        }
        DynkinType::A => {
            if r.is_multiple_of(2) || r < 3 {
                return Err(Error::InvalidArgument(format!("A_{r} has no fold onto a C-type quiver (needs odd rank ≥ 3)")));
            }
            if q.ranks.iter().ne(q.ranks.iter().rev()) {
                return Err(Error::InvalidArgument("folding A_{2L-1} needs mirror-symmetric node sizes".into()));
            }
            QuiverDiagram::new(DynkinType::C, q.ranks[..r.div_ceil(2)].to_vec())
        }
        k => Err(Error::InvalidArgument(format!("{k}-type quivers are not folded"))),
    }
}

/// b̄(Γ^∨): the diagonal entry is the power of |Δ(X_a)|, the entry (a, b), a < b, the power of
/// ∏_{i,j} (x_{a,i} - x_{b,j}).
pub fn integrand_exponents(q: &QuiverDiagram) -> Vec<Vec<Rational>> {
    cartan_matrices(q.kind.dual(), q.rank()).expect("validated at construction").b_bar
}

/// Value of ∏_a |Δ(X_a)|^{e_aa} ∏_{a<b} ∏_{i,j} (x_{a,i} - x_{b,j})^{e_ab} at one configuration.
pub fn quiver_integrand(q: &QuiverDiagram, nodes: &[&[f64]]) -> Result<f64> {
    if nodes.len() != q.rank() || nodes.iter().zip(&q.ranks).any(|(x, &n)| x.len() != n) {
        return Err(Error::Dimension("one point set of size N_a per node".into()));
    }
    let e = integrand_exponents(q);
    let exp = |r: &Rational| -> Result<i32> {
        if !r.is_integer() {
            return Err(Error::Unsupported(format!("fractional exponent {r}")));
        }
        Ok(r.to_integer().try_into().expect("small exponent"))
    };
    let mut v = 1.0;
    for a in 0..q.rank() {
        let ea = exp(&e[a][a])?;
        for i in 0..nodes[a].len() {
            for j in i + 1..nodes[a].len() {
                v *= (nodes[a][i] - nodes[a][j]).abs().powi(ea);
            }
        }
        for b in a + 1..q.rank() {
            let eab = exp(&e[a][b])?;
            if eab == 0 {
                continue;
            }
            for x in nodes[a] {
                for y in nodes[b] {
                    v *= (x - y).powi(eab);
                }
            }
        }
    }
    Ok(v)
}

/// Exponent matrix of the B-type chain integrand: node powers (2, …, 2, 4), bonds -1 with a
/// squared terminal bond.
pub fn b_model_exponents(l: usize) -> Vec<Vec<Rational>> {
    chain_exponents(l, 4, -2)
}

/// Exponent matrix of the C-type chain integrand: node powers (2, …, 2, 1), bonds -1.
pub fn c_model_exponents(l: usize) -> Vec<Vec<Rational>> {
    chain_exponents(l, 1, -1)
}

fn chain_exponents(l: usize, last_node: i64, last_bond: i64) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![int(0); l]; l];
    for a in 0..l {
        m[a][a] = int(if a + 1 == l { last_node } else { 2 });
        if a + 1 < l {
            let e = int(if a + 2 == l { last_bond } else { -1 });
            m[a][a + 1] = e.clone();
            m[a + 1][a] = e;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(m: &[Vec<Rational>]) -> Vec<Vec<i64>> {
        m.iter().map(|r| r.iter().map(|x| x.to_integer().try_into().unwrap()).collect()).collect()
    }

    #[test]
    fn rank_three_matrices() {
        let b3 = cartan_matrices(DynkinType::B, 3).unwrap();
        assert_eq!(b3.b, vec![vec![4, -2, 0], vec![-2, 4, -2], vec![0, -2, 2]]);
        assert_eq!(ints(&b3.b_bar), vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 1]]);
        let c3 = cartan_matrices(DynkinType::C, 3).unwrap();
        assert_eq!(c3.b, vec![vec![2, -1, 0], vec![-1, 2, -2], vec![0, -2, 4]]);
        assert_eq!(ints(&c3.b_bar), c3.b);
        let d4 = cartan_matrices(DynkinType::D, 4).unwrap();
        assert_eq!(d4.c, vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]);
        assert!(cartan_matrices(DynkinType::D, 2).is_err());
        assert!(cartan_matrices(DynkinType::B, 1).is_err());
    }

    #[test]
    fn arrows_point_at_short_roots() {
        let b = QuiverDiagram::uniform(DynkinType::B, 3, 2).unwrap();
        let last = b.edges.last().unwrap();
        assert_eq!((last.multiplicity, last.arrow_to), (2, Some(2)));
        let c = QuiverDiagram::uniform(DynkinType::C, 3, 2).unwrap();
        assert_eq!(c.edges.last().unwrap().arrow_to, Some(1));
        assert_eq!(b.betas, vec![2, 2, 4]);
        assert_eq!(c.betas, vec![2, 2, 1]);
    }

    #[test]
    fn duality_and_folding() {
        let b4 = QuiverDiagram::uniform(DynkinType::B, 4, 1).unwrap();
        assert_eq!(langlands_dual(&b4).kind, DynkinType::C);
        assert_eq!(langlands_dual(&langlands_dual(&b4)), b4);
        let d = QuiverDiagram::new(DynkinType::D, vec![4, 4, 2, 2]).unwrap();
        let folded = fold(&d).unwrap();
        assert_eq!((folded.kind, folded.ranks.clone(), folded.betas.clone()), (DynkinType::B, vec![4, 4, 2], vec![2, 2, 4]));
        assert_eq!(integrand_exponents(&folded), b_model_exponents(3));
        let a = QuiverDiagram::uniform(DynkinType::A, 5, 3).unwrap();
        let folded = fold(&a).unwrap();
        assert_eq!((folded.kind, folded.ranks.clone(), folded.betas.clone()), (DynkinType::C, vec![3, 3, 3], vec![2, 2, 1]));
        assert_eq!(integrand_exponents(&folded), c_model_exponents(3));
        assert!(fold(&QuiverDiagram::uniform(DynkinType::A, 2, 1).unwrap()).is_err());
        assert!(fold(&QuiverDiagram::new(DynkinType::D, vec![2, 2, 1, 2]).unwrap()).is_err());
        assert!(fold(&b4).is_err());
    }

    #[test]
    fn simply_laced_exponents_are_cartan() {
        for (k, r) in [(DynkinType::A, 4), (DynkinType::D, 5)] {
            let q = QuiverDiagram::uniform(k, r, 1).unwrap();
            let c = cartan_matrices(k, r).unwrap().c;
            assert_eq!(ints(&integrand_exponents(&q)), c);
        }
    }

    #[test]
    fn integrand_values() {
        let q = QuiverDiagram::new(DynkinType::C, vec![2, 2]).unwrap();
        // Δ(X1)² |Δ(X2)| / ∏(x1i - x2j)
        let (x1, x2) = ([0.1, 0.4], [2.5, 2.2]);
        let v = quiver_integrand(&q, &[&x1, &x2]).unwrap();
        let expected = 0.3f64.powi(2) * 0.3 / ((0.1 - 2.5) * (0.1 - 2.2) * (0.4 - 2.5) * (0.4 - 2.2));
        assert!((v - expected).abs() < 1e-15);
        assert!(quiver_integrand(&q, &[&x1]).is_err());
    }
}
