//! Circular error statistics, jackknife errors and binned mutual information.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Principal value in `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Value in `[0, 2π)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Jackknife standard error from the leave-one-out estimates.
pub fn jackknife_se(leave_one_out: &[f64]) -> f64 {
    let n = leave_one_out.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = leave_one_out.iter().sum::<f64>() / n as f64;
    let ss: f64 = leave_one_out.iter().map(|x| (x - mean).powi(2)).sum();
    ((n - 1) as f64 / n as f64 * ss).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Root-mean-square of `errors`.
pub fn rms(errors: &[f64]) -> Estimate {
    let n = errors.len();
    let total: f64 = errors.iter().map(|e| e * e).sum();
    let value = (total / n as f64).sqrt();
    if n < 2 {
        return Estimate { value, se: f64::NAN };
    }
    let loo: Vec<f64> = errors
        .iter()
        .map(|e| ((total - e * e) / (n - 1) as f64).max(0.0).sqrt())
        .collect();
    Estimate {
        value,
        se: jackknife_se(&loo),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circular {
    pub sharpness: Estimate,
    pub holevo_variance: Estimate,
}

/// Sharpness `|E e^{iθ}|` and Holevo variance `S^{-2} - 1` of the errors.
pub fn circular(errors: &[f64]) -> Circular {
    let n = errors.len();
    let (c, s) = errors.iter().fold((0.0, 0.0), |(c, s), e| (c + e.cos(), s + e.sin()));
    let sharp = (c * c + s * s).sqrt() / n as f64;
    let hv = |x: f64| if x > 0.0 { x.powi(-2) - 1.0 } else { f64::INFINITY };
    if n < 2 {
        return Circular {
            sharpness: Estimate {
                value: sharp,
                se: f64::NAN,
            },
            holevo_variance: Estimate {
                value: hv(sharp),
                se: f64::NAN,
            },
        };
    }
    let loo_s: Vec<f64> = errors
        .iter()
        .map(|e| {
            let (ci, si) = (c - e.cos(), s - e.sin());
            (ci * ci + si * si).sqrt() / (n - 1) as f64
        })
        .collect();
    let loo_v: Vec<f64> = loo_s.iter().map(|&x| hv(x)).collect();
    Circular {
        sharpness: Estimate {
            value: sharp,
            se: jackknife_se(&loo_s),
        },
        holevo_variance: Estimate {
            value: hv(sharp),
            se: jackknife_se(&loo_v),
        },
    }
}

pub const MIN_BINS: usize = 8;
pub const SAMPLES_PER_CELL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    pub bins: usize,
    /// Miller–Madow corrected estimate.
    pub value: f64,
    pub se: f64,
    pub plug_in: f64,
}

fn bin_of(x: f64, bins: usize) -> usize {
    ((wrap_2pi(x) / TAU * bins as f64) as usize).min(bins - 1)
}

fn nlogn(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (n as f64).ln()
    }
}

struct Counts {
    total: usize,
    sum_x: f64,
    sum_y: f64,
    sum_xy: f64,
    occupied_x: usize,
    occupied_y: usize,
    occupied_xy: usize,
}

impl Counts {
    /// `(plug-in, Miller–Madow)` mutual information.
    fn estimates(&self) -> (f64, f64) {
        let t = self.total as f64;
        // H = ln T - Σ n ln n / T, so I = ln T + (Σxy - Σx - Σy)/T
        let plug = t.ln() + (self.sum_xy - self.sum_x - self.sum_y) / t;
        let correction =
            (self.occupied_x as f64 - 1.0 + self.occupied_y as f64 - 1.0 - (self.occupied_xy as f64 - 1.0)) / (2.0 * t);
        (plug, plug + correction)
    }
}

/// Binned estimate of `I(Φ̂ : Φ)` in nats from paired samples on the circle.
pub fn mutual_information(phi: &[f64], phi_hat: &[f64], bins: usize) -> Result<MutualInformation> {
    let t = phi.len();
    assert_eq!(t, phi_hat.len(), "paired samples");
    if bins < MIN_BINS {
        return Err(Error::BadParameters(format!(
            "{bins} bins; at least {MIN_BINS} are needed"
        )));
    }
    let required = SAMPLES_PER_CELL * bins * bins;
    if t < required {
        return Err(Error::InsufficientSamples {
            trials: t,
            required,
            bins,
        });
    }
    let mut nx = vec![0usize; bins];
    let mut ny = vec![0usize; bins];
    let mut nxy = vec![0usize; bins * bins];
    for (&a, &b) in phi.iter().zip(phi_hat) {
        let (i, j) = (bin_of(a, bins), bin_of(b, bins));
        nx[i] += 1;
        ny[j] += 1;
        nxy[i * bins + j] += 1;
    }
    let full = Counts {
        total: t,
        sum_x: nx.iter().map(|&n| nlogn(n)).sum(),
        sum_y: ny.iter().map(|&n| nlogn(n)).sum(),
        sum_xy: nxy.iter().map(|&n| nlogn(n)).sum(),
        occupied_x: nx.iter().filter(|&&n| n > 0).count(),
        occupied_y: ny.iter().filter(|&&n| n > 0).count(),
        occupied_xy: nxy.iter().filter(|&&n| n > 0).count(),
    };
    let (plug_in, value) = full.estimates();

    // samples sharing a cell have the same leave-one-out value
    let shift = |n: usize| nlogn(n - 1) - nlogn(n);
    let mut weighted = Vec::new();
    for i in 0..bins {
        for j in 0..bins {
            let n = nxy[i * bins + j];
            if n == 0 {
                continue;
            }
            let c = Counts {
                total: t - 1,
                sum_x: full.sum_x + shift(nx[i]),
                sum_y: full.sum_y + shift(ny[j]),
                sum_xy: full.sum_xy + shift(n),
                occupied_x: full.occupied_x - usize::from(nx[i] == 1),
                occupied_y: full.occupied_y - usize::from(ny[j] == 1),
                occupied_xy: full.occupied_xy - usize::from(n == 1),
            };
            weighted.push((c.estimates().1, n));
        }
    }
    let mean = weighted.iter().map(|(v, n)| v * *n as f64).sum::<f64>() / t as f64;
    let ss: f64 = weighted.iter().map(|(v, n)| (v - mean).powi(2) * *n as f64).sum();
    let se = ((t - 1) as f64 / t as f64 * ss).sqrt();
    Ok(MutualInformation {
        bins,
        value,
        se,
        plug_in,
    })
}
