//! Iterative probe schemes: ordered two-level components with integer gaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::SpectralGenerator;

pub const PRESETS: [&str; 5] = [
    "linear_multipass",
    "quadratic_iterative",
    "power_q_iterative",
    "roy_iterative",
    "none",
];

/// One probe component: a two-level superposition whose eigenvalues differ
/// by `gap`, used `copies` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub gap: u64,
    pub copies: u32,
    pub qubit_cost: u32,
    pub pass_cost: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessingOrder {
    #[default]
    LargestGapFirst,
    AsGiven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub preset: String,
    pub bits: u32,
    pub copies: u32,
    pub power: Option<u32>,
    pub components: Vec<Component>,
    pub order: ProcessingOrder,
    /// Qubit count as the paper states it, when that differs from the sum of
    /// component costs.
    pub paper_qubits: Option<u64>,
    pub paper_passes: Option<u64>,
    pub notes: Vec<String>,
}

impl SchemeSpec {
    pub fn custom(components: Vec<Component>, order: ProcessingOrder) -> Result<Self> {
        for c in &components {
            if c.gap == 0 {
                return Err(Error::BadParameters("component gap must be at least 1".into()));
            }
        }
        Ok(Self {
            preset: "custom".into(),
            bits: components.len() as u32,
            copies: components.iter().map(|c| c.copies).max().unwrap_or(0),
            power: None,
            components,
            order,
            paper_qubits: None,
            paper_passes: None,
            notes: Vec::new(),
        })
    }

    pub fn qubits(&self) -> u64 {
        self.components
            .iter()
            .map(|c| c.copies as u64 * c.qubit_cost as u64)
            .sum()
    }

    pub fn passes(&self) -> u64 {
        self.components.iter().map(|c| c.copies as u64 * c.pass_cost).sum()
    }

    pub fn max_gap(&self) -> u64 {
        self.components.iter().map(|c| c.gap).max().unwrap_or(0)
    }

    /// Components in the order they are measured.
    pub fn schedule(&self) -> Vec<Component> {
        let mut c = self.components.clone();
        if self.order == ProcessingOrder::LargestGapFirst {
            // stable: equal gaps keep their listed order
            c.sort_by_key(|x| std::cmp::Reverse(x.gap));
        }
        c
    }

    pub fn total_measurements(&self) -> usize {
        self.components.iter().map(|c| c.copies as usize).sum()
    }
}

fn check_km(k: u32, m: u32) -> Result<()> {
    if k == 0 || m == 0 {
        return Err(Error::BadParameters(format!(
            "K = {k} and M = {m} must both be at least 1"
        )));
    }
    if k > 62 {
        return Err(Error::BadParameters(format!("K = {k} is larger than 62")));
    }
    Ok(())
}

/// `⌈2^((k-1)/q)⌉`, computed without floating-point rounding at exact powers.
fn ceil_root_pow2(k: u32, q: u32) -> u64 {
    let exponent = (k - 1) as f64 / q as f64;
    let mut n = 2f64.powf(exponent).ceil() as u64;
    // integer check against n^q ≥ 2^(k-1)
    let target = 1u128 << (k - 1);
    while n > 1 && (n - 1).checked_pow(q).map(|v| v as u128 >= target).unwrap_or(true) {
        n -= 1;
    }
    while (n as u128).checked_pow(q).map(|v| v < target).unwrap_or(false) {
        n += 1;
    }
    n
}

/// Spread between the extreme eigenvalues of `(J_z)^q` on `n` qubits, taken
/// from the spectrum itself.
pub fn power_component_gap(n: u32, q: u32) -> Result<u64> {
    if n <= 12 {
        let s = SpectralGenerator::jz_pow(n, q)?.summarize();
        let gap = s.gap.round() as u64;
        if gap == 0 {
            return Err(Error::DegenerateComponent { qubits: n, power: q });
        }
        return Ok(gap);
    }
    closed_form_power_gap(n, q)
}

/// Even `q`: `n^q - (n mod 2)`; odd `q`: `2 n^q`.
pub fn closed_form_power_gap(n: u32, q: u32) -> Result<u64> {
    let top = (n as u64)
        .checked_pow(q)
        .ok_or_else(|| Error::BadParameters(format!("gap {n}^{q} overflows")))?;
    let gap = if q.is_multiple_of(2) {
        top - (n as u64 % 2)
    } else {
        2 * top
    };
    if gap == 0 {
        return Err(Error::DegenerateComponent { qubits: n, power: q });
    }
    Ok(gap)
}

pub fn linear_multipass(k: u32, m: u32) -> Result<SchemeSpec> {
    check_km(k, m)?;
    let components = (1..=k)
        .map(|j| Component {
            gap: 1 << (j - 1),
            copies: m,
            qubit_cost: 1,
            pass_cost: 1 << (j - 1),
        })
        .collect();
    Ok(SchemeSpec {
        preset: "linear_multipass".into(),
        bits: k,
        copies: m,
        power: None,
        components,
        order: ProcessingOrder::LargestGapFirst,
        paper_qubits: None,
        paper_passes: Some(m as u64 * ((1u64 << (k + 1)) - 1)),
        notes: vec![format!(
            "passes summed over the schedule: M(2^K - 1) = {}; stated passes M(2^(K+1) - 1) = {}",
            m as u64 * ((1u64 << k) - 1),
            m as u64 * ((1u64 << (k + 1)) - 1)
        )],
    })
}

pub fn power_q_iterative(k: u32, m: u32, q: u32) -> Result<SchemeSpec> {
    check_km(k, m)?;
    if q < 2 {
        return Err(Error::BadParameters(format!("power q = {q} must be at least 2")));
    }
    let mut components = Vec::with_capacity(k as usize);
    let mut notes = Vec::new();
    for j in 1..=k {
        let n = ceil_root_pow2(j, q);
        let n = u32::try_from(n).map_err(|_| Error::BadParameters(format!("component {j} needs {n} qubits")))?;
        if j == 1 {
            // n_1 = 1: (J_z)^q on one qubit is degenerate (even q) or has an
            // even gap that cannot resolve the leading bit (odd q)
            let reason = match power_component_gap(1, q) {
                Err(e) => e.to_string(),
                Ok(g) => format!("single-qubit gap {g} is even"),
            };
            notes.push(format!("k=1: {reason}; replaced by a linear gap-1 qubit"));
            components.push(Component {
                gap: 1,
                copies: m,
                qubit_cost: 1,
                pass_cost: 1,
            });
            continue;
        }
        components.push(Component {
            gap: power_component_gap(n, q)?,
            copies: m,
            qubit_cost: n,
            pass_cost: 1,
        });
    }
    Ok(SchemeSpec {
        preset: if q == 2 {
            "quadratic_iterative".into()
        } else {
            "power_q_iterative".into()
        },
        bits: k,
        copies: m,
        power: Some(q),
        components,
        order: ProcessingOrder::LargestGapFirst,
        paper_qubits: None,
        paper_passes: None,
        notes,
    })
}

pub fn quadratic_iterative(k: u32, m: u32) -> Result<SchemeSpec> {
    power_q_iterative(k, m, 2)
}

pub fn roy_iterative(k: u32, m: u32) -> Result<SchemeSpec> {
    check_km(k, m)?;
    let components = (1..=k)
        .map(|j| Component {
            gap: 1 << (j - 1),
            copies: m,
            qubit_cost: if j == 1 { 1 } else { j - 1 },
            pass_cost: 1,
        })
        .collect();
    let paper = m as u64 * k as u64 * (k as u64 - 1) / 2;
    Ok(SchemeSpec {
        preset: "roy_iterative".into(),
        bits: k,
        copies: m,
        power: None,
        components,
        order: ProcessingOrder::LargestGapFirst,
        paper_qubits: Some(paper),
        paper_passes: None,
        notes: vec![format!(
            "k=1 uses a single gap-1 qubit; qubits as implemented M(1 + K(K-1)/2), stated MK(K-1)/2 = {paper}"
        )],
    })
}

/// A scheme with no components: the estimate ignores the shift entirely.
pub fn no_measurement() -> SchemeSpec {
    SchemeSpec {
        preset: "none".into(),
        bits: 0,
        copies: 0,
        power: None,
        components: Vec::new(),
        order: ProcessingOrder::LargestGapFirst,
        paper_qubits: None,
        paper_passes: None,
        notes: Vec::new(),
    }
}

pub fn preset(name: &str, k: u32, m: u32, q: Option<u32>) -> Result<SchemeSpec> {
    match name {
        "linear_multipass" => linear_multipass(k, m),
        "quadratic_iterative" => quadratic_iterative(k, m),
        "power_q_iterative" => power_q_iterative(k, m, q.unwrap_or(2)),
        "roy_iterative" => roy_iterative(k, m),
        "none" => Ok(no_measurement()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
