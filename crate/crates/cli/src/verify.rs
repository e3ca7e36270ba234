//! Verification suites: each check compares a library formula with an independent
//! evaluation and records pass/fail with a short detail string.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pfmm::chain::{chain_z_beta1, d_type_z, ChainSpec, DTypeSpec};
use pfmm::kernel::PairKernel;
use pfmm::measure::Measure;
use pfmm::models::{char_poly_inv_avg_beta1, char_poly_inv_avg_beta4, descending_monomials, Beta1Model, Beta4Model, DualRoute};
use pfmm::oracle::ensembles::{DeltaEnsemble, SgnEnsemble};
use pfmm::oracle::{mc_integral, McTask};
use pfmm::pfaffian::{block_skew, pf, pf_cauchy_binet, pf_cauchy_binet_direct, pf_laplace_expansion};
use pfmm::poly::Poly;
use pfmm::quiver::{b_model_exponents, c_model_exponents, cartan_matrices, fold, integrand_exponents, langlands_dual, DynkinType, QuiverDiagram};
use pfmm::{int, rat, DenseMatrix, Rational, Scalar, SkewMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    PfaffianIdentities,
    Debruijn,
    CdKernel,
    Charpoly,
    InverseMc,
    ChainMc,
    Quiver,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::PfaffianIdentities => "pfaffian-identities",
            Suite::Debruijn => "debruijn",
            Suite::CdKernel => "cd-kernel",
            Suite::Charpoly => "charpoly",
            Suite::InverseMc => "inverse-mc",
            Suite::ChainMc => "chain-mc",
            Suite::Quiver => "quiver",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct McSettings {
    pub samples: u64,
    pub seed: u64,
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Recorder { suite: suite.name(), checks: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { suite: self.suite, name: name.into(), pass, detail: detail.into() });
    }

    /// Records an error from the computation as a failed check.
    fn attempt(&mut self, name: &str, f: impl FnOnce() -> pfmm::Result<(bool, String)>) {
        match f() {
            Ok((pass, detail)) => self.push(name, pass, detail),
            Err(e) => self.push(name, false, format!("error: {e}")),
        }
    }
}

pub fn run(suite: Suite, mc: McSettings) -> Vec<Check> {
    match suite {
        Suite::All => [
            Suite::PfaffianIdentities,
            Suite::Debruijn,
            Suite::CdKernel,
            Suite::Charpoly,
            Suite::InverseMc,
            Suite::ChainMc,
            Suite::Quiver,
        ]
        .into_iter()
        .flat_map(|s| run(s, mc))
        .collect(),
        Suite::PfaffianIdentities => pfaffian_identities(mc.seed),
        Suite::Debruijn => debruijn(),
        Suite::CdKernel => cd_kernel(),
        Suite::Charpoly => charpoly(),
        Suite::InverseMc => inverse_mc(mc),
        Suite::ChainMc => chain_mc(mc),
        Suite::Quiver => quiver(),
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-5..=5), rng.random_range(1..=4))
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> SkewMatrix<Rational> {
    SkewMatrix::from_upper_fn(n, |_, _| small_rational(rng))
}

fn random_dense(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DenseMatrix<Rational> {
    DenseMatrix::from_fn(r, c, |_, _| small_rational(rng))
}

const INSTANCES: usize = 100;

fn pfaffian_identities(seed: u64) -> Vec<Check> {
    let mut rec = Recorder::new(Suite::PfaffianIdentities);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tally = |rec: &mut Recorder, name: &str, results: Vec<pfmm::Result<bool>>| {
        let failures = results.iter().filter(|r| !matches!(r, Ok(true))).count();
        rec.push(name, failures == 0, format!("{} instances, {failures} failures", results.len()));
    };
    let sq: Vec<_> = (0..INSTANCES)
        .map(|k| {
            let a = random_skew(&mut rng, 1 + k % 8);
            let p = pf(&a);
            a.to_dense().det().map(|d| p.clone() * p == d)
        })
        .collect();
    tally(&mut rec, "pf^2 = det", sq);
    let cong: Vec<_> = (0..INSTANCES)
        .map(|k| {
            let n = 2 + 2 * (k % 4);
            let a = random_skew(&mut rng, n);
            let b = random_dense(&mut rng, n, n);
            Ok(pf(&a.congruence(&b)?) == b.det()? * pf(&a))
        })
        .collect();
    tally(&mut rec, "Pf(B A B^T) = det B Pf A", cong);
    let laplace: Vec<_> = (0..INSTANCES)
        .map(|k| {
            let m = 2 + k % 6;
            let n = m - 2 * ((k / 6) % (m / 2 + 1)).min(m / 2);
            let z = random_skew(&mut rng, m);
            let w = random_dense(&mut rng, m, n);
            let direct = pf(&block_skew(&z, &w, &SkewMatrix::zeros(n))?);
            Ok(pf_laplace_expansion(&z, &w)? == direct)
        })
        .collect();
    tally(&mut rec, "Laplace-type expansion", laplace);
    let binet: Vec<_> = (0..INSTANCES)
        .map(|k| {
            let l = k % 3;
            let m = l + 2 * (1 + k % 2);
            let n = m - l + (k / 3) % 3;
            let z = random_skew(&mut rng, n);
            let w = random_dense(&mut rng, m, n);
            let x = random_dense(&mut rng, m, l);
            Ok(pf_cauchy_binet(&z, &w, &x)? == pf_cauchy_binet_direct(&z, &w, &x)?)
        })
        .collect();
    tally(&mut rec, "Cauchy-Binet-type expansion", binet);
    rec.checks
}

fn unit() -> Measure {
    Measure::unit()
}

fn random_basis(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> Vec<Poly<Rational>> {
    (0..n).map(|_| Poly::new((0..=degree).map(|_| small_rational(rng)).collect())).collect()
}

fn debruijn() -> Vec<Check> {
    let mut rec = Recorder::new(Suite::Debruijn);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [2, 4] {
        rec.attempt(&format!("beta1 standard N={n}"), || {
            let z = Beta1Model::standard(n, unit())?.z::<Rational>()?;
            let o = SgnEnsemble::new(descending_monomials(n), &unit())?.z()?;
            Ok((z == o, format!("pfaffian {z}, sector integral {o}")))
        });
    }
    for n in [2, 4] {
        let basis = random_basis(&mut rng, n, n + 1);
        rec.attempt(&format!("beta1 random basis N={n}"), || {
            let z = Beta1Model::new(basis.clone(), PairKernel::Sgn, unit())?.z::<Rational>()?;
            let o = SgnEnsemble::new(basis.clone(), &unit())?.z()?;
            Ok((z == o, format!("pfaffian {z}, sector integral {o}")))
        });
    }
    for n in [1, 2] {
        rec.attempt(&format!("beta4 standard N={n}"), || {
            let z = Beta4Model::standard(n, unit())?.z::<Rational>()?;
            let o = DeltaEnsemble::vandermonde(n, unit())?.z()?;
            Ok((z == o, format!("pfaffian {z}, collapsed integral {o}")))
        });
    }
    rec.attempt("beta4 random basis N=2", || {
        let f = random_basis(&mut rng, 4, 3);
        let g = random_basis(&mut rng, 4, 3);
        let m = Beta4Model::from_parts(f.clone(), g.clone(), PairKernel::Zero, PairKernel::Delta, PairKernel::Zero, unit())?;
        let z = m.z::<Rational>()?;
        let o = DeltaEnsemble::new(f, g, unit())?.z()?;
        Ok((z == o, format!("pfaffian {z}, collapsed integral {o}")))
    });
    rec.checks
}

fn cd_kernel() -> Vec<Check> {
    let mut rec = Recorder::new(Suite::CdKernel);
    for n in [2, 4] {
        rec.attempt(&format!("beta1 N={n} K.A.K = K, Tr = N"), || {
            let s = Beta1Model::standard(n, unit())?.self_reproduction::<Rational>()?;
            Ok((s.is_exact() && s.trace == int(n as i64), format!("trace {}", s.trace)))
        });
    }
    for n in [1, 2] {
        rec.attempt(&format!("beta4 N={n} K.A.K = K, Tr = 2N"), || {
            let s = Beta4Model::standard(n, unit())?.self_reproduction::<Rational>()?;
            Ok((s.is_exact() && s.trace == int(2 * n as i64), format!("trace {}", s.trace)))
        });
    }
    rec.checks
}

fn charpoly() -> Vec<Check> {
    let mut rec = Recorder::new(Suite::Charpoly);
    rec.attempt("beta1 N=2 z=(0,1)", || {
        let m = Beta1Model::standard(2, unit())?;
        let z = [int(0), int(1)];
        let (cd, bordered) = (m.char_poly_avg::<Rational>(&z)?, m.char_poly_avg_bordered::<Rational>(&z)?);
        let o = SgnEnsemble::new(descending_monomials(2), &unit())?.char_poly(&z)?;
        Ok((cd == o && bordered == o && o == rat(3, 140), format!("kernel {cd}, bordered {bordered}, oracle {o}")))
    });
    for n in [1, 2] {
        rec.attempt(&format!("beta4 N={n} z=(2,3)"), || {
            let m = Beta4Model::standard(n, unit())?;
            let z = [int(2), int(3)];
            let v = m.char_poly_avg::<Rational>(&z)?;
            let o = DeltaEnsemble::vandermonde(n, unit())?.char_poly(&z)?;
            Ok((v == o, format!("kernel {v}, oracle {o}")))
        });
    }
    rec.checks
}

fn inverse_mc(mc: McSettings) -> Vec<Check> {
    let mut rec = Recorder::new(Suite::InverseMc);
    let z = [2.0, 3.0];
    for n in [2, 4] {
        rec.attempt(&format!("beta1 N={n} z=(2,3)"), || {
            let m = Beta1Model::standard(n, unit())?;
            let v = char_poly_inv_avg_beta1(&m, &z, n + 16, DualRoute::Series)?;
            let est = SgnEnsemble::new(descending_monomials(n), &unit())?.inverse_char_poly(&z, mc.samples, mc.seed)?;
            let pass = est.brackets(v.value, 3.0) && v.tail < est.stderr;
            Ok((pass, format!("formula {:.9e} (tail {:.1e}), MC {:.9e} ± {:.1e}", v.value, v.tail, est.estimate, est.stderr)))
        });
    }
    rec.attempt("beta4 N=1 z=(2,3)", || {
        let m = Beta4Model::standard(1, unit())?;
        let v = char_poly_inv_avg_beta4(&m, &z, 18, DualRoute::Series)?;
        let est = DeltaEnsemble::vandermonde(1, unit())?.inverse_char_poly(&z, mc.samples, mc.seed)?;
        Ok((est.brackets(v.value, 3.0), format!("formula {:.9e}, MC {:.9e} ± {:.1e}", v.value, est.estimate, est.stderr)))
    });
    rec.checks
}

fn chain_mc(mc: McSettings) -> Vec<Check> {
    let mut rec = Recorder::new(Suite::ChainMc);
    rec.attempt("L=1 reduces to the single model", || {
        let v = chain_z_beta1(&ChainSpec::c_type(2, 1)?)?;
        Ok((v == Scalar::Exact(rat(1, 6)), format!("value {v}")))
    });
    rec.attempt("delta edge leaves the value unchanged", || {
        let spec = ChainSpec::beta1(descending_monomials(2), vec![unit(), unit()], vec![PairKernel::Delta], PairKernel::Sgn)?;
        let v = chain_z_beta1(&spec)?;
        Ok((v == Scalar::Exact(rat(1, 6)), format!("value {v}")))
    });
    let sample = |integrand: pfmm::chain::ChainIntegrand| {
        let task = McTask { measures: integrand.measures.clone(), samples: mc.samples, seed: mc.seed };
        mc_integral(&task, |x| integrand.value(x))
    };
    rec.attempt("Cauchy chain N=2 L=2", || {
        let spec = ChainSpec::c_type(2, 2)?;
        let v = chain_z_beta1(&spec)?.to_f64();
        let doubled = chain_z_beta1(&spec.with_order(128))?.to_f64();
        let est = sample(spec.integrand()?)?;
        let stable = (v - doubled).abs() < 1e-8 * v.abs().max(1e-300);
        Ok((est.brackets(v, 3.0) && stable, format!("pfaffian {v:.9e}, MC {:.9e} ± {:.1e}", est.estimate, est.stderr)))
    });
    for l in [2, 3] {
        rec.attempt(&format!("D-type N=1 L={l}"), || {
            let spec = DTypeSpec::standard(1, l)?;
            let v = d_type_z(&spec)?;
            let doubled = d_type_z(&spec.with_order(128))?;
            let est = sample(spec.integrand())?;
            let stable = (v - doubled).abs() < 1e-8 * v.abs();
            Ok((est.brackets(v, 3.0) && stable, format!("pfaffian {v:.9e}, MC {:.9e} ± {:.1e}", est.estimate, est.stderr)))
        });
    }
    rec.checks
}

fn ints(m: &[Vec<Rational>]) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_integer().try_into().unwrap_or(i64::MAX)).collect()).collect()
}

fn quiver() -> Vec<Check> {
    let mut rec = Recorder::new(Suite::Quiver);
    rec.attempt("B3 and C3 matrices", || {
        let b3 = cartan_matrices(DynkinType::B, 3)?;
        let c3 = cartan_matrices(DynkinType::C, 3)?;
        let pass = b3.b == vec![vec![4, -2, 0], vec![-2, 4, -2], vec![0, -2, 2]]
            && c3.b == vec![vec![2, -1, 0], vec![-1, 2, -2], vec![0, -2, 4]]
            && ints(&c3.b_bar) == c3.b;
        Ok((pass, format!("b(B3) = {:?}, b(C3) = {:?}", b3.b, c3.b)))
    });
    rec.attempt("factored matrices for 2 <= r <= 8", || {
        let mut bad = Vec::new();
        for r in 2..=8 {
            let b = cartan_matrices(DynkinType::B, r)?;
            let c = cartan_matrices(DynkinType::C, r)?;
            if !b.b.iter().flatten().zip(b.b_bar.iter().flatten()).all(|(x, y)| rat(*x, 2) == *y) {
                bad.push(format!("B{r}"));
            }
            if !c.b.iter().flatten().zip(c.b_bar.iter().flatten()).all(|(x, y)| int(*x) == *y) {
                bad.push(format!("C{r}"));
            }
        }
        let detail = if bad.is_empty() { "b_bar = b/2 (B), b_bar = b (C)".to_string() } else { format!("violated at {}", bad.join(", ")) };
        Ok((bad.is_empty(), detail))
    });
    rec.attempt("folding reproduces the B and C exponents", || {
        let mut bad = Vec::new();
        for l in 2..=6 {
            let d = fold(&QuiverDiagram::uniform(DynkinType::D, l + 1, 2)?)?;
            let a = fold(&QuiverDiagram::uniform(DynkinType::A, 2 * l - 1, 2)?)?;
            if integrand_exponents(&d) != b_model_exponents(l) {
                bad.push(format!("D{} -> B{l}", l + 1));
            }
            if integrand_exponents(&a) != c_model_exponents(l) {
                bad.push(format!("A{} -> C{l}", 2 * l - 1));
            }
        }
        let detail = if bad.is_empty() { "L = 2..6".to_string() } else { format!("mismatch at {}", bad.join(", ")) };
        Ok((bad.is_empty(), detail))
    });
    rec.attempt("Langlands dual is an involution", || {
        let mut pass = true;
        for kind in [DynkinType::A, DynkinType::B, DynkinType::C, DynkinType::D] {
            for r in kind.min_rank()..=8 {
                let q = QuiverDiagram::uniform(kind, r, 2)?;
                pass &= langlands_dual(&langlands_dual(&q)) == q;
            }
        }
        Ok((pass, "A, B, C, D up to rank 8".to_string()))
    });
    rec.checks
}
