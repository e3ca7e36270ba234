//! JSON model configuration. Rationals are written as "p/q" strings (integers are accepted
//! as plain numbers); unknown fields are rejected.

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use pfmm::kernel::PairKernel;
use pfmm::measure::Measure;
use pfmm::poly::Poly;
use pfmm::scalar::parse_rational;
use pfmm::Rational;

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Beta1,
    Beta4,
    Chain,
    Dtype,
    QuiverInfo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A rational read from "p/q", "p" or an integer literal.
#[derive(Clone, Debug, PartialEq)]
pub struct Rat(pub Rational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RatVisitor;
        impl Visitor<'_> for RatVisitor {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Rat, E> {
                parse_rational(s).map(Rat).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
        }
        d.deserialize_any(RatVisitor)
    }
}

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Lebesgue measure on [a, b].
    Uniform { a: Rat, b: Rat },
    /// Point masses given as [x, w] pairs.
    Discrete { points: Vec<(Rat, Rat)> },
    Gaussian { mean: f64, sd: f64, order: Option<usize> },
}

impl MeasureSpec {
    pub fn build(&self, order: Option<usize>) -> pfmm::Result<Measure> {
        let m = match self {
            MeasureSpec::Uniform { a, b } => Measure::uniform(a.0.clone(), b.0.clone())?,
            MeasureSpec::Discrete { points } => {
                Measure::discrete(points.iter().map(|(x, w)| (x.0.clone(), w.0.clone())).collect())?
            }
            MeasureSpec::Gaussian { mean, sd, order: o } => return Measure::gaussian(*mean, *sd, o.or(order).unwrap_or(64)),
        };
        Ok(match order {
            Some(q) => m.with_order(q),
            None => m,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    Sgn,
    Delta,
    Cauchy,
    CauchySquared,
    Zero,
    /// [[k11, k12], [k21, k22]] given row by row.
    Block(Box<[KernelSpec; 4]>),
    Transpose(Box<KernelSpec>),
    Neg(Box<KernelSpec>),
}

impl KernelSpec {
    pub fn build(&self) -> PairKernel {
        match self {
            KernelSpec::Sgn => PairKernel::Sgn,
            KernelSpec::Delta => PairKernel::Delta,
            KernelSpec::Cauchy => PairKernel::Cauchy,
            KernelSpec::CauchySquared => PairKernel::CauchySquared,
            KernelSpec::Zero => PairKernel::Zero,
            KernelSpec::Block(b) => PairKernel::block(b[0].build(), b[1].build(), b[2].build(), b[3].build()),
            KernelSpec::Transpose(k) => k.build().transpose(),
            KernelSpec::Neg(k) => k.build().neg(),
        }
    }
}

/// Polynomials are coefficient lists in ascending degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum BasisSpec {
    Vandermonde,
    Polys(Vec<Vec<Rat>>),
    Pairs { f: Vec<Vec<Rat>>, g: Vec<Vec<Rat>> },
}

pub fn polys(coeffs: &[Vec<Rat>]) -> Vec<Poly<Rational>> {
    coeffs.iter().map(|c| Poly::new(c.iter().map(|r| r.0.clone()).collect())).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainPreset {
    /// f = x^{N-1-i}, Cauchy edges, sgn terminal.
    CType,
    /// f = g = x^{2N-1-i}, Cauchy blocks with the squared last edge, δ terminal.
    BType,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub beta: u8,
    pub preset: Option<ChainPreset>,
    pub measures: Option<Vec<MeasureSpec>>,
    pub edges: Option<Vec<KernelSpec>>,
    pub terminal: Option<KernelSpec>,
    pub basis: Option<BasisSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DTypeConfig {
    pub chain: Option<Vec<MeasureSpec>>,
    pub fork: Option<MeasureSpec>,
    pub fork_tilde: Option<MeasureSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverConfig {
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: usize,
    pub ranks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub version: u32,
    pub model: ModelKind,
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub measure: Option<MeasureSpec>,
    pub kernel: Option<KernelSpec>,
    pub basis: Option<BasisSpec>,
    pub chain: Option<ChainConfig>,
    pub dtype: Option<DTypeConfig>,
    pub quiver: Option<QuiverConfig>,
    pub z: Option<Vec<Rat>>,
    pub inverse: Option<bool>,
    pub mode: Option<Mode>,
    pub quadrature: Option<usize>,
    pub cutoff: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl ModelConfig {
    pub fn bare(model: ModelKind) -> Self {
        ModelConfig {
            version: CONFIG_VERSION,
            model,
            n: None,
            l: None,
            measure: None,
            kernel: None,
            basis: None,
            chain: None,
            dtype: None,
            quiver: None,
            z: None,
            inverse: None,
            mode: None,
            quadrature: None,
            cutoff: None,
            seed: None,
            samples: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ModelConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Config(format!("at `version`: unsupported config version {} (expected {CONFIG_VERSION})", cfg.version)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Config("at `n`: missing field".into()))
    }

    pub fn require_l(&self) -> Result<usize, CliError> {
        self.l.ok_or_else(|| CliError::Config("at `l`: missing field".into()))
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Exact)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn samples(&self) -> u64 {
        self.samples.unwrap_or(1_000_000)
    }

    /// Lebesgue measure on [0, 1] unless configured.
    pub fn measure(&self) -> pfmm::Result<Measure> {
        match &self.measure {
            Some(m) => m.build(self.quadrature),
            None => {
                let m = Measure::unit();
                Ok(self.quadrature.map_or(m.clone(), |q| m.with_order(q)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_config() {
        let cfg = ModelConfig::parse(
            r#"{"version":1,"model":"beta1","n":2,"measure":{"kind":"uniform","a":"0","b":"1/2"},
                "kernel":{"neg":"sgn"},"basis":{"polys":[["0","1"],[1]]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.model, ModelKind::Beta1);
        assert!(matches!(cfg.kernel.unwrap().build().canonical(), PairKernel::Neg(_)));
        assert!(matches!(cfg.measure.unwrap(), MeasureSpec::Uniform { b: Rat(ref r), .. } if *r == pfmm::rat(1, 2)));
    }

    #[test]
    fn rejects_unknown_fields_with_path() {
        let err = ModelConfig::parse(r#"{"version":1,"model":"beta1","measure":{"kind":"uniform","a":0,"b":1,"c":2}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("measure"), "{err}");
        let err = ModelConfig::parse(r#"{"version":2,"model":"beta1"}"#).unwrap_err();
        assert!(err.to_string().contains("version"));
        assert!(ModelConfig::parse(r#"{"version":1,"model":"beta1","n":2,"bogus":1}"#).is_err());
        assert!(ModelConfig::parse(r#"{"version":1,"model":"beta1","z":["1/0"]}"#).is_err());
    }
}
