//! Generator and state specifications.
//!
//! Text form is `kind:arg1,arg2`; `@path.json` reads the JSON form, an
//! object tagged by `"kind"`. Composite text forms join parts with `+`
//! (generator sums) or `*` (tensor factors).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{composite_sum, SpectralGenerator};
use crate::states::{self, DensityOperator, Probe, PureState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Jz {
        n: u32,
    },
    JzPow {
        n: u32,
        q: u32,
    },
    NJz {
        n: u32,
    },
    RoyH {
        n: u32,
    },
    RoyA {
        n: u32,
    },
    /// `f(k) = k^power`, or explicit `values` for `k = 0..=cutoff`.
    NumberFn {
        cutoff: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        power: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
    },
    Multipass {
        bits: u32,
    },
    Sum {
        parts: Vec<GeneratorSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedState {
    pub weight: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Ghz {
        n: u32,
    },
    /// Extreme-eigenvalue superposition of the accompanying generator.
    Minmax,
    Coherent {
        mean: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    PlusProduct {
        k: u32,
    },
    Basis {
        index: usize,
        qubits: u32,
    },
    Tensor {
        factors: Vec<StateSpec>,
    },
    Mixture {
        components: Vec<WeightedState>,
    },
}

fn bad(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidValue(format!("{key}: {msg}"))
}

fn split_kind(text: &str) -> (&str, &str) {
    match text.split_once(':') {
        Some((k, rest)) => (k.trim(), rest.trim()),
        None => (text.trim(), ""),
    }
}

fn args(rest: &str) -> Vec<&str> {
    if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(str::trim).collect()
    }
}

fn parse_num<T: std::str::FromStr>(kind: &str, name: &str, v: Option<&&str>) -> Result<T> {
    let v = v.ok_or_else(|| bad(kind, format!("missing argument '{name}'")))?;
    v.parse()
        .map_err(|_| bad(kind, format!("'{name}' = '{v}' is not valid")))
}

fn expect_args(kind: &str, a: &[&str], range: std::ops::RangeInclusive<usize>) -> Result<()> {
    if !range.contains(&a.len()) {
        return Err(bad(kind, format!("expected {range:?} arguments, got {}", a.len())));
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(path, e))?;
    serde_json::from_str(&text).map_err(|e| bad(path, e))
}

impl GeneratorSpec {
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(path) = text.strip_prefix('@') {
            return read_json(path);
        }
        let (kind, rest) = split_kind(text);
        if kind == "sum" {
            let parts = rest.split('+').map(Self::parse).collect::<Result<Vec<_>>>()?;
            return Ok(GeneratorSpec::Sum { parts });
        }
        let a = args(rest);
        let n1 = |name| -> Result<u32> {
            expect_args(kind, &a, 1..=1)?;
            parse_num(kind, name, a.first())
        };
        Ok(match kind {
            "jz" => GeneratorSpec::Jz { n: n1("n")? },
            "n_jz" => GeneratorSpec::NJz { n: n1("n")? },
            "roy_h" => GeneratorSpec::RoyH { n: n1("n")? },
            "roy_a" => GeneratorSpec::RoyA { n: n1("n")? },
            "multipass" => GeneratorSpec::Multipass { bits: n1("bits")? },
            "jz_pow" => {
                expect_args(kind, &a, 2..=2)?;
                GeneratorSpec::JzPow {
                    n: parse_num(kind, "n", a.first())?,
                    q: parse_num(kind, "q", a.get(1))?,
                }
            }
            "number_fn" => {
                expect_args(kind, &a, 1..=2)?;
                GeneratorSpec::NumberFn {
                    cutoff: parse_num(kind, "cutoff", a.first())?,
                    power: Some(if a.len() > 1 {
                        parse_num(kind, "power", a.get(1))?
                    } else {
                        1
                    }),
                    values: None,
                }
            }
            other => return Err(bad("generator kind", format!("unknown kind '{other}'"))),
        })
    }

    pub fn build(&self) -> Result<SpectralGenerator> {
        Ok(match self {
            GeneratorSpec::Jz { n } => SpectralGenerator::jz(*n)?,
            GeneratorSpec::JzPow { n, q } => SpectralGenerator::jz_pow(*n, *q)?,
            GeneratorSpec::NJz { n } => SpectralGenerator::n_jz(*n)?,
            GeneratorSpec::RoyH { n } => SpectralGenerator::roy_h(*n)?,
            GeneratorSpec::RoyA { n } => SpectralGenerator::roy_a(*n)?,
            GeneratorSpec::Multipass { bits } => SpectralGenerator::multipass(*bits)?,
            GeneratorSpec::NumberFn { cutoff, power, values } => match (power, values) {
                (_, Some(v)) => {
                    if v.len() != cutoff + 1 {
                        return Err(bad(
                            "number_fn.values",
                            format!("expected {} values, got {}", cutoff + 1, v.len()),
                        ));
                    }
                    let v = v.clone();
                    SpectralGenerator::number_function(*cutoff, move |k| v[k as usize], "f(N) from values")?
                }
                (p, None) => {
                    let p = p.unwrap_or(1);
                    SpectralGenerator::number_function(*cutoff, |k| (k as f64).powi(p as i32), format!("N^{p}"))?
                }
            },
            GeneratorSpec::Sum { parts } => {
                if parts.is_empty() {
                    return Err(bad("sum.parts", "empty"));
                }
                let built = parts.iter().map(|p| p.build()).collect::<Result<Vec<_>>>()?;
                composite_sum(&built)?
            }
        })
    }
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(path) = text.strip_prefix('@') {
            return read_json(path);
        }
        let (kind, rest) = split_kind(text);
        if kind == "tensor" {
            let factors = rest.split('*').map(Self::parse).collect::<Result<Vec<_>>>()?;
            return Ok(StateSpec::Tensor { factors });
        }
        let a = args(rest);
        Ok(match kind {
            "ghz" => {
                expect_args(kind, &a, 1..=1)?;
                StateSpec::Ghz {
                    n: parse_num(kind, "n", a.first())?,
                }
            }
            "minmax" => {
                expect_args(kind, &a, 0..=0)?;
                StateSpec::Minmax
            }
            "plus_product" => {
                expect_args(kind, &a, 1..=1)?;
                StateSpec::PlusProduct {
                    k: parse_num(kind, "k", a.first())?,
                }
            }
            "basis" => {
                expect_args(kind, &a, 2..=2)?;
                StateSpec::Basis {
                    index: parse_num(kind, "index", a.first())?,
                    qubits: parse_num(kind, "qubits", a.get(1))?,
                }
            }
            "coherent" => {
                expect_args(kind, &a, 1..=2)?;
                let mean = parse_num(kind, "mean", a.first())?;
                let mut mass = None;
                let mut cutoff = None;
                if let Some(opt) = a.get(1) {
                    match opt.split_once('=') {
                        Some(("cutoff", v)) => cutoff = Some(parse_num(kind, "cutoff", Some(&v))?),
                        Some(("mass", v)) => mass = Some(parse_num(kind, "mass", Some(&v))?),
                        _ => {
                            return Err(bad(
                                kind,
                                format!("option '{opt}' should be cutoff=<int> or mass=<real>"),
                            ))
                        }
                    }
                }
                StateSpec::Coherent { mean, mass, cutoff }
            }
            "mixture" => return Err(bad(kind, "mixtures are only accepted in JSON form (@file.json)")),
            other => return Err(bad("state kind", format!("unknown kind '{other}'"))),
        })
    }

    fn build_pure(&self, generator: Option<&SpectralGenerator>) -> Result<PureState> {
        match self {
            StateSpec::Ghz { n } => states::ghz(*n),
            StateSpec::Minmax => {
                let g = generator.ok_or_else(|| bad("minmax", "needs a generator"))?;
                states::minmax_superposition(g)
            }
            StateSpec::Coherent { mean, mass, cutoff } => match (cutoff, mass) {
                (Some(_), Some(_)) => Err(bad("coherent", "give either cutoff or mass, not both")),
                (Some(c), None) => states::coherent_with_cutoff(*mean, *c),
                // no truncation given: follow a number-basis generator
                (None, None) => match generator.map(|g| g.basis()) {
                    Some(crate::spectra::BasisKind::Fock { cutoff }) => states::coherent_with_cutoff(*mean, cutoff),
                    _ => states::coherent_number_state(*mean, states::DEFAULT_COHERENT_MASS),
                },
                (None, Some(m)) => states::coherent_number_state(*mean, *m),
            },
            StateSpec::PlusProduct { k } => states::plus_product(*k),
            StateSpec::Basis { index, qubits } => {
                if *qubits == 0 || *qubits > crate::spectra::MAX_QUBITS {
                    return Err(bad("basis.qubits", format!("{qubits} out of range")));
                }
                PureState::basis_state(*index, crate::spectra::BasisKind::Qubits { n: *qubits })
            }
            StateSpec::Tensor { factors } => {
                if factors.iter().any(|f| matches!(f, StateSpec::Minmax)) {
                    return Err(bad("tensor", "minmax is not allowed inside a tensor product"));
                }
                let built = factors.iter().map(|f| f.build_pure(None)).collect::<Result<Vec<_>>>()?;
                states::tensor(&built)
            }
            StateSpec::Mixture { .. } => Err(bad("mixture", "not a pure state")),
        }
    }

    pub fn build(&self, generator: Option<&SpectralGenerator>) -> Result<Probe> {
        match self {
            StateSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(bad("mixture.components", "empty"));
                }
                let ensemble = components
                    .iter()
                    .map(|c| Ok((c.weight, c.state.build_pure(generator)?)))
                    .collect::<Result<Vec<_>>>()?;
                let rho: DensityOperator = states::mix(&ensemble)?;
                Ok(Probe::Mixed(rho))
            }
            other => Ok(Probe::Pure(other.build_pure(generator)?)),
        }
    }
}
