//! Monte-Carlo certificates for the four dyadic frequency regions of the
//! commutator multiplier analysis.
//!
//! For dyadic magnitudes `N1 >= N2 >= N3` the quantity
//! `sigma = |m(xi1+xi2+xi3) - m(xi1)m(xi2)m(xi3)| / (m(xi1)m(xi2)m(xi3))`
//! is compared against the region's claimed envelope. The asymptotic
//! relations are pinned down as hard thresholds: `a << b` means
//! `a <= b/8`, and `a <~ b` means `b >= a/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::synth::splitmix64;

use super::multiplier::IMultiplierSpec;

/// Headroom above the cutoff for sampled dyadic magnitudes, as a multiple of N.
const MAGNITUDE_CAP: f64 = 64.0;
/// Floor for magnitudes constrained only from above, as a fraction of N.
const MAGNITUDE_FLOOR: f64 = 1.0 / 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `N1 << N`: all multipliers equal one, sigma vanishes identically.
    AllLow,
    /// `N2 << N <~ N1`: fundamental-theorem-of-calculus envelope
    /// `|xi2 + xi3| / |xi1|`.
    OneHigh,
    /// `N3 << N <~ N2 <= N1`: trivial multiplier envelope `1 / m(xi2)`.
    TwoHigh,
    /// `N <~ N3 <= N2 <= N1`: envelope `m(xi1+xi2+xi3) / (m1 m2 m3)`.
    ThreeHigh,
}

impl Region {
    pub fn index(&self) -> u8 {
        match self {
            Region::AllLow => 1,
            Region::OneHigh => 2,
            Region::TwoHigh => 3,
            Region::ThreeHigh => 4,
        }
    }

    pub fn from_index(i: u8) -> Option<Region> {
        match i {
            1 => Some(Region::AllLow),
            2 => Some(Region::OneHigh),
            3 => Some(Region::TwoHigh),
            4 => Some(Region::ThreeHigh),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: u8,
    pub samples: usize,
    /// Worst `sigma / envelope` over all samples (worst `sigma` for region 1,
    /// whose envelope is zero).
    pub worst_ratio: f64,
    pub worst_sigma: f64,
    /// Frequency triple attaining the worst ratio.
    pub arg_worst: [[f64; 2]; 3],
    pub empty: bool,
}

struct IndexedRng {
    state: u64,
}

impl IndexedRng {
    fn new(seed: u64, index: u64) -> Self {
        let mut state = seed ^ index.wrapping_mul(0xd1342543de82ef95);
        // warm up so consecutive indices decorrelate
        splitmix64(&mut state);
        IndexedRng { state }
    }

    fn next_unit(&mut self) -> f64 {
        (splitmix64(&mut self.state) >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Log-uniform draw from `[lo, hi]`.
    fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.next_unit() * (hi.ln() - lo.ln())).exp()
    }

    fn angle(&mut self) -> f64 {
        2.0 * std::f64::consts::PI * self.next_unit()
    }
}

fn sample_magnitudes(region: Region, n: f64, rng: &mut IndexedRng) -> [f64; 3] {
    let floor = n * MAGNITUDE_FLOOR;
    let cap = n * MAGNITUDE_CAP;
    match region {
        Region::AllLow => {
            let n1 = rng.log_uniform(floor, n / 8.0);
            let n2 = rng.log_uniform(floor, n1);
            let n3 = rng.log_uniform(floor, n2);
            [n1, n2, n3]
        }
        Region::OneHigh => {
            let n1 = rng.log_uniform(n / 2.0, cap);
            let n2 = rng.log_uniform(floor, n / 8.0);
            let n3 = rng.log_uniform(floor, n2);
            [n1, n2, n3]
        }
        Region::TwoHigh => {
            let n2 = rng.log_uniform(n / 2.0, cap);
            let n1 = rng.log_uniform(n2, cap);
            let n3 = rng.log_uniform(floor, n / 8.0);
            [n1, n2, n3]
        }
        Region::ThreeHigh => {
            let n3 = rng.log_uniform(n / 2.0, cap);
            let n2 = rng.log_uniform(n3, cap);
            let n1 = rng.log_uniform(n2, cap);
            [n1, n2, n3]
        }
    }
}

struct Sample {
    sigma: f64,
    ratio: f64,
    args: [[f64; 2]; 3],
}

fn evaluate(spec: &IMultiplierSpec, region: Region, seed: u64, index: u64) -> Sample {
    let mut rng = IndexedRng::new(seed, index);
    let mags = sample_magnitudes(region, spec.cutoff(), &mut rng);
    let mut xi = [[0.0f64; 2]; 3];
    for (i, &m) in mags.iter().enumerate() {
        let theta = rng.angle();
        xi[i] = [m * theta.cos(), m * theta.sin()];
    }
    let m1 = spec.m_value(xi[0][0], xi[0][1]);
    let m2 = spec.m_value(xi[1][0], xi[1][1]);
    let m3 = spec.m_value(xi[2][0], xi[2][1]);
    let sum = [
        xi[0][0] + xi[1][0] + xi[2][0],
        xi[0][1] + xi[1][1] + xi[2][1],
    ];
    let msum = spec.m_value(sum[0], sum[1]);
    let prod = m1 * m2 * m3;
    let sigma = (msum - prod).abs() / prod;
    let envelope = match region {
        Region::AllLow => 0.0,
        Region::OneHigh => {
            let dx = xi[1][0] + xi[2][0];
            let dy = xi[1][1] + xi[2][1];
            (dx * dx + dy * dy).sqrt() / mags[0]
        }
        Region::TwoHigh => 1.0 / m2,
        Region::ThreeHigh => msum / prod,
    };
    let ratio = if envelope == 0.0 {
        if sigma == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        sigma / envelope
    };
    Sample {
        sigma,
        ratio,
        args: xi,
    }
}

/// Sample `sample_count` frequency triples in the region's dyadic annuli and
/// report the worst `sigma / envelope` ratio. Deterministic for a fixed seed
/// regardless of thread count: samples are indexed, not raced.
pub fn region_bound_check(
    spec: &IMultiplierSpec,
    region: Region,
    sample_count: usize,
    seed: u64,
) -> Result<RegionReport> {
    if sample_count == 0 {
        return Ok(RegionReport {
            region: region.index(),
            samples: 0,
            worst_ratio: 0.0,
            worst_sigma: 0.0,
            arg_worst: [[0.0; 2]; 3],
            empty: true,
        });
    }
    let worst = (0..sample_count as u64)
        .into_par_iter()
        .map(|i| evaluate(spec, region, seed, i))
        .reduce(
            || Sample {
                sigma: -1.0,
                ratio: -1.0,
                args: [[0.0; 2]; 3],
            },
            |a, b| {
                let key_a = if region == Region::AllLow {
                    a.sigma
                } else {
                    a.ratio
                };
                let key_b = if region == Region::AllLow {
                    b.sigma
                } else {
                    b.ratio
                };
                if key_a >= key_b {
                    a
                } else {
                    b
                }
            },
        );
    Ok(RegionReport {
        region: region.index(),
        samples: sample_count,
        worst_ratio: if region == Region::AllLow {
            worst.sigma.max(0.0)
        } else {
            worst.ratio.max(0.0)
        },
        worst_sigma: worst.sigma.max(0.0),
        arg_worst: worst.args,
        empty: false,
    })
}
