//! Subcommand implementations. Each returns a JSON document and, when a requested
//! cross-check disagrees, the reason for a verification failure.

use serde_json::{json, Map, Value};

use pfmm::chain::{chain_z_beta1, chain_z_beta4, d_type_z, ChainBeta, ChainIntegrand, ChainSpec, DTypeSpec};
use pfmm::kernel::PairKernel;
use pfmm::measure::Measure;
use pfmm::models::{
    char_poly_inv_avg_beta1, char_poly_inv_avg_beta4, descending_monomials, standard_kernel, Beta1Model, Beta4Model,
    DualRoute,
};
use pfmm::oracle::ensembles::{DeltaEnsemble, SgnEnsemble};
use pfmm::oracle::{exact_poly_integral, mc_integral, McEstimate, McTask, MultiPoly};
use pfmm::poly::Poly;
use pfmm::quiver::{cartan_matrices, fold, integrand_exponents, langlands_dual, DynkinType, QuiverDiagram};
use pfmm::scalar::rational_to_f64;
use pfmm::{Field, Rational, Scalar};

use crate::config::{polys, BasisSpec, ChainPreset, MeasureSpec, Mode, ModelConfig, ModelKind};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyMode {
    None,
    Exact,
    Mc,
}

/// A result document plus the failed cross-check, if any.
pub struct Outcome {
    pub doc: Value,
    pub failure: Option<String>,
}

type CliResult<T> = Result<T, CliError>;

pub fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(r) => Value::String(r.to_string()),
        Scalar::Float(x) => float_json(*x),
    }
}

fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

/// Runs the exact computation or its float counterpart.
fn in_mode(
    mode: Mode,
    exact: impl FnOnce() -> pfmm::Result<Rational>,
    float: impl FnOnce() -> pfmm::Result<f64>,
) -> CliResult<Scalar> {
    Ok(match mode {
        Mode::Exact => Scalar::Exact(exact()?),
        Mode::Float => Scalar::Float(float()?),
    })
}

fn beta1_model(cfg: &ModelConfig) -> CliResult<Beta1Model> {
    let n = cfg.require_n()?;
    let kernel = cfg.kernel.as_ref().map_or(PairKernel::Sgn, |k| k.build());
    let measure = cfg.measure()?;
    Ok(match &cfg.basis {
        None | Some(BasisSpec::Vandermonde) => Beta1Model::vandermonde(n, kernel, measure)?,
        Some(BasisSpec::Polys(p)) => {
            if p.len() != n {
                return Err(CliError::Config(format!("at `basis.polys`: {} polynomials for n = {n}", p.len())));
            }
            Beta1Model::new(polys(p), kernel, measure)?
        }
        Some(BasisSpec::Pairs { .. }) => return Err(CliError::Config("at `basis`: β=1 takes `polys`, not `pairs`".into())),
    })
}

fn beta4_model(cfg: &ModelConfig) -> CliResult<Beta4Model> {
    let n = cfg.require_n()?;
    let kernel = cfg.kernel.as_ref().map_or_else(standard_kernel, |k| k.build());
    let measure = cfg.measure()?;
    Ok(match &cfg.basis {
        None | Some(BasisSpec::Vandermonde) => Beta4Model::vandermonde(n, kernel, measure)?,
        Some(BasisSpec::Pairs { f, g }) => {
            if f.len() != 2 * n {
                return Err(CliError::Config(format!("at `basis.pairs.f`: {} functions for n = {n} (need 2n)", f.len())));
            }
            Beta4Model::new(polys(f), polys(g), kernel, measure)?
        }
        Some(BasisSpec::Polys(_)) => return Err(CliError::Config("at `basis`: β=4 takes `pairs`, not `polys`".into())),
    })
}

fn is_standard_beta4(m: &Beta4Model) -> bool {
    m.kernel().canonical() == standard_kernel().canonical()
}

/// Compares a computed value with an exact oracle: equality in exact mode, 1e-10 relative
/// agreement in float mode.
fn exact_check(value: &Scalar, oracle: &Rational, method: &str) -> (Value, Option<String>) {
    let agrees = match value {
        Scalar::Exact(v) => v == oracle,
        Scalar::Float(v) => {
            let o = rational_to_f64(oracle);
            (v - o).abs() <= 1e-10 * o.abs().max(1.0)
        }
    };
    let doc = json!({ "method": method, "value": oracle.to_string(), "agrees": agrees });
    (doc, (!agrees).then(|| format!("{method} oracle gives {oracle}, computed {value}")))
}

fn mc_check(value: f64, est: &McEstimate, seed: u64) -> (Value, Option<String>) {
    let sigmas = est.sigmas(value);
    let agrees = sigmas <= 3.0;
    let doc = json!({
        "method": "mc",
        "estimate": float_json(est.estimate),
        "stderr": float_json(est.stderr),
        "samples": est.samples,
        "seed": seed,
        "sigmas": float_json(sigmas),
        "agrees": agrees,
    });
    (doc, (!agrees).then(|| format!("MC estimate {} ± {} is {sigmas:.2}σ from {value}", est.estimate, est.stderr)))
}

fn sample(integrand: &ChainIntegrand, cfg: &ModelConfig) -> CliResult<McEstimate> {
    let task = McTask { measures: integrand.measures.clone(), samples: cfg.samples(), seed: cfg.seed() };
    Ok(mc_integral(&task, |x| integrand.value(x))?)
}

fn with_oracle(mut doc: Value, check: Option<(Value, Option<String>)>) -> Outcome {
    match check {
        Some((oracle, failure)) => {
            doc["oracle"] = oracle;
            Outcome { doc, failure }
        }
        None => Outcome { doc, failure: None },
    }
}

pub fn partition(cfg: &ModelConfig, verify: VerifyMode) -> CliResult<Outcome> {
    match cfg.model {
        ModelKind::Beta1 => partition_beta1(cfg, verify),
        ModelKind::Beta4 => partition_beta4(cfg, verify),
        ModelKind::Chain => chain(cfg, verify),
        ModelKind::Dtype => dtype(cfg, verify),
        ModelKind::QuiverInfo => quiver_info(cfg).map(|doc| Outcome { doc, failure: None }),
    }
}

fn partition_beta1(cfg: &ModelConfig, verify: VerifyMode) -> CliResult<Outcome> {
    let model = beta1_model(cfg)?;
    let mode = cfg.mode();
    let value = in_mode(mode, || model.z::<Rational>(), || model.z::<f64>())?;
    let doc = json!({
        "command": "partition",
        "model": "beta1",
        "n": model.n(),
        "mode": mode_name(mode),
        "value": scalar_json(&value),
        "method": format!("pfaffian-{}", mode_name(mode)),
        "formula": "Z = Pf[<f_i|A|f_j>]",
        "normalization": "1/N! in front of the eigenvalue integral",
    });
    let check = match verify {
        VerifyMode::None => None,
        VerifyMode::Exact => {
            if model.kernel().canonical() != PairKernel::Sgn {
                return Err(CliError::Config("the exact β=1 oracle needs the sgn kernel".into()));
            }
            let oracle = SgnEnsemble::new(model.basis().to_vec(), model.measure())?.z()?;
            Some(exact_check(&value, &oracle, "exact-sector"))
        }
        VerifyMode::Mc => {
            let spec = ChainSpec::beta1(model.basis().to_vec(), vec![model.measure().clone()], vec![], model.kernel().clone())?;
            let est = sample(&spec.integrand()?, cfg)?;
            Some(mc_check(value.to_f64(), &est, cfg.seed()))
        }
    };
    Ok(with_oracle(doc, check))
}

/// (1/N!) ∫ Δ(X)⁴ by exact polynomial integration.
fn delta4_integral(n: usize, measure: &Measure) -> pfmm::Result<Rational> {
    let vars: Vec<usize> = (0..n).collect();
    let p = MultiPoly::vandermonde(n, &vars).pow(4);
    let nf = (1..=n as i64).fold(Rational::from_i64(1), |acc, k| acc * Rational::from_i64(k));
    Ok(exact_poly_integral(&p, &vec![measure.clone(); n])? / nf)
}

fn partition_beta4(cfg: &ModelConfig, verify: VerifyMode) -> CliResult<Outcome> {
    let model = beta4_model(cfg)?;
    let mode = cfg.mode();
    let value = in_mode(mode, || model.z::<Rational>(), || model.z::<f64>())?;
    let mut doc = json!({
        "command": "partition",
        "model": "beta4",
        "n": model.n(),
        "mode": mode_name(mode),
        "value": scalar_json(&value),
        "method": format!("pfaffian-{}", mode_name(mode)),
        "formula": "Z = Pf[<f_i, g_i|A|f_j, g_j>]",
        "normalization": "1/N!^2 in front of the integral over (X, X~)",
    });
    if is_standard_beta4(&model) && model.is_vandermonde() && model.measure().is_exact() {
        let reference = delta4_integral(model.n(), model.measure())?;
        let abs = match &value {
            Scalar::Exact(v) => num::Signed::abs(v) == reference,
            Scalar::Float(v) => {
                let r = rational_to_f64(&reference);
                (v.abs() - r).abs() <= 1e-10 * r.max(1.0)
            }
        };
        doc["abs_matches_delta4_integral"] = Value::Bool(abs);
        doc["delta4_integral"] = Value::String(reference.to_string());
        doc["notes"] = json!(["for A = B = 0, S = δ the Pfaffian carries the sign (-1)^N"]);
    }
    let check = match verify {
        VerifyMode::None => None,
        VerifyMode::Exact => {
            if !is_standard_beta4(&model) {
                return Err(CliError::Config("the exact β=4 oracle needs A = B = 0, S = δ".into()));
            }
            let oracle = DeltaEnsemble::new(model.fbasis().to_vec(), model.gbasis().to_vec(), model.measure().clone())?.z()?;
            Some(exact_check(&value, &oracle, "exact-poly"))
        }
        VerifyMode::Mc => {
            let spec = ChainSpec::beta4(
                model.fbasis().to_vec(),
                model.gbasis().to_vec(),
                vec![model.measure().clone()],
                vec![],
                model.kernel().clone(),
            )?;
            let est = sample(&spec.integrand()?, cfg)?;
            Some(mc_check(value.to_f64(), &est, cfg.seed()))
        }
    };
    Ok(with_oracle(doc, check))
}

pub fn charpoly(cfg: &ModelConfig, z: &[Rational], inverse: bool, verify: VerifyMode) -> CliResult<Outcome> {
    if inverse {
        return inverse_charpoly(cfg, z, verify);
    }
    let mode = cfg.mode();
    let zf: Vec<f64> = z.iter().map(rational_to_f64).collect();
    let (name, n, value, oracle) = match cfg.model {
        ModelKind::Beta1 => {
            let m = beta1_model(cfg)?;
            let value = in_mode(mode, || m.char_poly_avg::<Rational>(z), || m.char_poly_avg::<f64>(&zf))?;
            let oracle = match verify {
                VerifyMode::Exact => {
                    if m.kernel().canonical() != PairKernel::Sgn {
                        return Err(CliError::Config("the exact β=1 oracle needs the sgn kernel".into()));
                    }
                    Some(SgnEnsemble::new(m.basis().to_vec(), m.measure())?.char_poly(z)?)
                }
                _ => None,
            };
            ("beta1", m.n(), value, oracle)
        }
        ModelKind::Beta4 => {
            let m = beta4_model(cfg)?;
            let value = in_mode(mode, || m.char_poly_avg::<Rational>(z), || m.char_poly_avg::<f64>(&zf))?;
            let oracle = match verify {
                VerifyMode::Exact => {
                    if !is_standard_beta4(&m) {
                        return Err(CliError::Config("the exact β=4 oracle needs A = B = 0, S = δ".into()));
                    }
                    Some(DeltaEnsemble::new(m.fbasis().to_vec(), m.gbasis().to_vec(), m.measure().clone())?.char_poly(z)?)
                }
                _ => None,
            };
            ("beta4", m.n(), value, oracle)
        }
        _ => return Err(CliError::Config("at `model`: charpoly needs beta1 or beta4".into())),
    };
    if verify == VerifyMode::Mc {
        return Err(CliError::Config("characteristic polynomial averages are checked with --verify exact".into()));
    }
    let doc = json!({
        "command": "charpoly",
        "model": name,
        "n": n,
        "z": z.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "inverse": false,
        "mode": mode_name(mode),
        "value": scalar_json(&value),
        "method": format!("cd-kernel-pfaffian-{}", mode_name(mode)),
        "formula": "<prod_a det(z_a - X)> = (-1)^(M/2) (Z_{N+M}/Z_N) Pf[K_{N+M}(z_a, z_b)] / Delta_M(z)",
        "notes": ["orientation factor (-1)^(M/2) included for the kernel built from the inverse moment matrix"],
    });
    Ok(with_oracle(doc, oracle.map(|o| exact_check(&value, &o, if name == "beta1" { "exact-sector" } else { "exact-poly" }))))
}

fn inverse_charpoly(cfg: &ModelConfig, z: &[Rational], verify: VerifyMode) -> CliResult<Outcome> {
    let zf: Vec<f64> = z.iter().map(rational_to_f64).collect();
    let n = cfg.require_n()?;
    let (name, avg, cutoff, est) = match cfg.model {
        ModelKind::Beta1 => {
            let m = beta1_model(cfg)?;
            let cutoff = cfg.cutoff.unwrap_or(n + 16);
            let avg = char_poly_inv_avg_beta1(&m, &zf, cutoff, DualRoute::Series)?;
            let est = match verify {
                VerifyMode::Mc => Some(SgnEnsemble::new(m.basis().to_vec(), m.measure())?.inverse_char_poly(&zf, cfg.samples(), cfg.seed())?),
                _ => None,
            };
            ("beta1", avg, cutoff, est)
        }
        ModelKind::Beta4 => {
            let m = beta4_model(cfg)?;
            if !is_standard_beta4(&m) {
                return Err(CliError::Config("inverse β=4 averages need A = B = 0, S = δ".into()));
            }
            let cutoff = cfg.cutoff.unwrap_or(2 * n + 16);
            let avg = char_poly_inv_avg_beta4(&m, &zf, cutoff, DualRoute::Series)?;
            let est = match verify {
                VerifyMode::Mc => Some(DeltaEnsemble::new(m.fbasis().to_vec(), m.gbasis().to_vec(), m.measure().clone())?.inverse_char_poly(&zf, cfg.samples(), cfg.seed())?),
                _ => None,
            };
            ("beta4", avg, cutoff, est)
        }
        _ => return Err(CliError::Config("at `model`: charpoly needs beta1 or beta4".into())),
    };
    if verify == VerifyMode::Exact {
        return Err(CliError::Config("inverse averages have no exact oracle; use --verify mc".into()));
    }
    let doc = json!({
        "command": "charpoly",
        "model": name,
        "n": n,
        "z": z.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "inverse": true,
        "mode": "float",
        "value": float_json(avg.value),
        "tail_estimate": float_json(avg.tail),
        "cutoff": cutoff,
        "bordered": avg.bordered,
        "method": if avg.bordered { "dual-kernel-bordered" } else { "dual-kernel-series" },
        "formula": if name == "beta1" { "<prod_a det(z_a - X)^-1>" } else { "<prod_a det(z_a - X)^-2>" },
        "notes": ["sign conventions fixed against seeded Monte Carlo; see README"],
    });
    Ok(with_oracle(doc, est.map(|e| mc_check(avg.value, &e, cfg.seed()))))
}

fn default_measures(cfg: &ModelConfig, specs: &Option<Vec<MeasureSpec>>) -> CliResult<Option<Vec<Measure>>> {
    specs
        .as_ref()
        .map(|v| v.iter().map(|m| m.build(cfg.quadrature)).collect::<pfmm::Result<Vec<_>>>())
        .transpose()
        .map_err(CliError::from)
}

fn chain_spec(cfg: &ModelConfig) -> CliResult<ChainSpec> {
    let c = cfg.chain.as_ref().ok_or_else(|| CliError::Config("at `chain`: missing field".into()))?;
    let n = cfg.require_n()?;
    let spec = match (&c.preset, c.beta) {
        (Some(ChainPreset::CType), 1) => ChainSpec::c_type(n, cfg.require_l()?)?,
        (Some(ChainPreset::BType), 4) => ChainSpec::b_type(n, cfg.require_l()?)?,
        (Some(p), b) => return Err(CliError::Config(format!("at `chain.preset`: {p:?} does not apply to beta {b}"))),
        (None, b) => {
            let measures = default_measures(cfg, &c.measures)?
                .ok_or_else(|| CliError::Config("at `chain.measures`: missing field".into()))?;
            let edges: Vec<PairKernel> = c.edges.iter().flatten().map(|k| k.build()).collect();
            match b {
                1 => {
                    let basis = match &c.basis {
                        None | Some(BasisSpec::Vandermonde) => descending_monomials(n),
                        Some(BasisSpec::Polys(p)) => polys(p),
                        Some(BasisSpec::Pairs { .. }) => return Err(CliError::Config("at `chain.basis`: β=1 takes `polys`".into())),
                    };
                    let terminal = c.terminal.as_ref().map_or(PairKernel::Sgn, |k| k.build());
                    ChainSpec::beta1(basis, measures, edges, terminal)?
                }
                4 => {
                    let (f, g) = match &c.basis {
                        None | Some(BasisSpec::Vandermonde) => {
                            let f = descending_monomials(2 * n);
                            let g = f.iter().map(Poly::derivative).collect();
                            (f, g)
                        }
                        Some(BasisSpec::Pairs { f, g }) => (polys(f), polys(g)),
                        Some(BasisSpec::Polys(_)) => return Err(CliError::Config("at `chain.basis`: β=4 takes `pairs`".into())),
                    };
                    let terminal = c.terminal.as_ref().map_or_else(standard_kernel, |k| k.build());
                    ChainSpec::beta4(f, g, measures, edges, terminal)?
                }
                b => return Err(CliError::Config(format!("at `chain.beta`: expected 1 or 4, got {b}"))),
            }
        }
    };
    Ok(match cfg.quadrature {
        Some(q) => spec.with_order(q),
        None => spec,
    })
}

fn mixes_components(spec: &ChainSpec) -> bool {
    spec.edges().iter().any(|e| match e.canonical() {
        PairKernel::Matrix2x2(b) => b[1] != PairKernel::Zero || b[2] != PairKernel::Zero,
        _ => false,
    })
}

pub fn chain(cfg: &ModelConfig, verify: VerifyMode) -> CliResult<Outcome> {
    if cfg.model == ModelKind::Dtype {
        return dtype(cfg, verify);
    }
    if cfg.model != ModelKind::Chain {
        return Err(CliError::Config("at `model`: the chain command needs chain or dtype".into()));
    }
    let spec = chain_spec(cfg)?;
    let (value, beta, prefactor) = match spec.beta() {
        ChainBeta::One => (chain_z_beta1(&spec)?, 1, "1/N!^L"),
        ChainBeta::Four => (chain_z_beta4(&spec)?, 4, "1/N!^(2L)"),
    };
    let exact = matches!(value, Scalar::Exact(_));
    let mut notes = vec!["δ edges between identical measures are contracted before evaluation".to_string()];
    if mixes_components(&spec) {
        notes.push("edge blocks mix the two components; the Pfaffian then differs from the defining integral (by 2^(L-1) at N = 1)".into());
    }
    let doc = json!({
        "command": "chain",
        "model": "chain",
        "beta": beta,
        "n": spec.n(),
        "l": spec.len(),
        "value": scalar_json(&value),
        "exact": exact,
        "method": if exact { "pfaffian-exact" } else { "pfaffian-quadrature" },
        "quadrature": spec.measures().iter().map(Measure::order).max(),
        "formula": "Z = Pf[<f_i|w_1...w_{L-1} A w_{L-1}^T...w_1^T|f_j>]",
        "prefactor": prefactor,
        "notes": notes,
    });
    let check = match verify {
        VerifyMode::None => None,
        VerifyMode::Mc => Some(mc_check(value.to_f64(), &sample(&spec.integrand()?, cfg)?, cfg.seed())),
        VerifyMode::Exact => return Err(CliError::Config("chains are checked with --verify mc".into())),
    };
    Ok(with_oracle(doc, check))
}

fn dtype_spec(cfg: &ModelConfig) -> CliResult<DTypeSpec> {
    let n = cfg.require_n()?;
    let spec = match &cfg.dtype {
        None => DTypeSpec::standard(n, cfg.require_l()?)?,
        Some(d) => {
            let chain = default_measures(cfg, &d.chain)?.ok_or_else(|| CliError::Config("at `dtype.chain`: missing field".into()))?;
            let fork = d.fork.as_ref().ok_or_else(|| CliError::Config("at `dtype.fork`: missing field".into()))?.build(cfg.quadrature)?;
            let tilde = d.fork_tilde.as_ref().ok_or_else(|| CliError::Config("at `dtype.fork_tilde`: missing field".into()))?.build(cfg.quadrature)?;
            DTypeSpec::new(n, chain, fork, tilde)?
        }
    };
    Ok(match cfg.quadrature {
        Some(q) => spec.with_order(q),
        None => spec,
    })
}

pub fn dtype(cfg: &ModelConfig, verify: VerifyMode) -> CliResult<Outcome> {
    let spec = dtype_spec(cfg)?;
    let value = d_type_z(&spec)?;
    let doc = json!({
        "command": "chain",
        "model": "dtype",
        "n": spec.n,
        "l": spec.l(),
        "value": float_json(value),
        "exact": false,
        "method": "pfaffian-quadrature",
        "quadrature": spec.chain[0].order(),
        "formula": "Z[D_{L+1}] = Pf[<p_{2N-i}|w^(2L-1)|p_{2N-j}> - (i <-> j)], w(x,y) = 1/(x-y)",
        "prefactor": "1/((2N)!^(L-1) N!^2)",
    });
    let check = match verify {
        VerifyMode::None => None,
        VerifyMode::Mc => Some(mc_check(value, &sample(&spec.integrand(), cfg)?, cfg.seed())),
        VerifyMode::Exact => return Err(CliError::Config("D-type chains are checked with --verify mc".into())),
    };
    Ok(with_oracle(doc, check))
}

fn rational_matrix(m: &[Vec<Rational>]) -> Value {
    m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>().into()
}

fn diagram_json(q: &QuiverDiagram) -> Value {
    json!({
        "type": q.kind.to_string(),
        "rank": q.rank(),
        "ranks": q.ranks,
        "betas": q.betas,
        "edges": q.edges,
    })
}

pub fn quiver_info(cfg: &ModelConfig) -> CliResult<Value> {
    let qc = cfg.quiver.as_ref().ok_or_else(|| CliError::Config("at `quiver`: missing field".into()))?;
    let kind: DynkinType = qc.kind.parse().map_err(|e: pfmm::Error| CliError::Config(format!("at `quiver.type`: {e}")))?;
    let ranks = qc.ranks.clone().unwrap_or_else(|| vec![1; qc.rank]);
    if ranks.len() != qc.rank {
        return Err(CliError::Config(format!("at `quiver.ranks`: {} sizes for rank {}", ranks.len(), qc.rank)));
    }
    let cartan = cartan_matrices(kind, qc.rank)?;
    let q = QuiverDiagram::new(kind, ranks)?;
    let dual = langlands_dual(&q);
    let folded = match fold(&q) {
        Ok(f) => json!({ "diagram": diagram_json(&f), "exponents": rational_matrix(&integrand_exponents(&f)) }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let mut cartan_doc = Map::new();
    cartan_doc.insert("c".into(), json!(cartan.c));
    cartan_doc.insert("d".into(), json!(cartan.d));
    cartan_doc.insert("b".into(), json!(cartan.b));
    cartan_doc.insert("b_bar".into(), rational_matrix(&cartan.b_bar));
    Ok(json!({
        "command": "quiver-info",
        "type": kind.to_string(),
        "rank": qc.rank,
        "cartan": Value::Object(cartan_doc),
        "diagram": diagram_json(&q),
        "exponents": rational_matrix(&integrand_exponents(&q)),
        "exponent_rule": "diagonal e: prod_{i<j} |x_{a,i} - x_{a,j}|^e; off-diagonal e: prod_{i,j} (x_{a,i} - x_{b,j})^e, each pair a<b once",
        "dual": diagram_json(&dual),
        "fold": folded,
    }))
}
