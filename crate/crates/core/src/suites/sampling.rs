use serde::Serialize;

use super::SuiteError;
use crate::expr::Domain;
use crate::jet::Point;

/// Fraction by which each half-width of the domain box is shrunk.
pub const MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Halton,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            count: 32,
            seed: 7,
            strategy: Strategy::Halton,
        }
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic points strictly inside the domain box shrunk by [`MARGIN`].
pub fn sample_points(plan: &SamplePlan, domain: &Domain) -> Result<Vec<Point>, SuiteError> {
    let d = domain.dim();
    if d == 0 || plan.count == 0 || d > PRIMES.len() {
        return Err(SuiteError::EmptyDomain);
    }
    let boxes: Vec<(f64, f64)> = domain
        .bounds()
        .iter()
        .map(|(lo, hi)| {
            let c = 0.5 * (lo + hi);
            let hw = 0.5 * (hi - lo) * (1.0 - MARGIN);
            (c - hw, 2.0 * hw)
        })
        .collect();
    let place = |unit: &[f64]| {
        Point::new(
            unit.iter()
                .zip(&boxes)
                .map(|(u, (lo, w))| lo + u * w)
                .collect(),
        )
    };
    let pts = match plan.strategy {
        Strategy::Halton => (0..plan.count as u64)
            .map(|k| {
                let index = k.wrapping_add(plan.seed).wrapping_add(1).max(1);
                let u: Vec<f64> = PRIMES[..d]
                    .iter()
                    .map(|&b| radical_inverse(b, index))
                    .collect();
                place(&u)
            })
            .collect(),
        Strategy::Grid => {
            let mut k = 1usize;
            while k.pow(d as u32) < plan.count {
                k += 1;
            }
            let total = k.pow(d as u32);
            (0..plan.count)
                .map(|i| {
                    let mut cell = i * total / plan.count;
                    let u: Vec<f64> = (0..d)
                        .map(|_| {
                            let c = cell % k;
                            cell /= k;
                            (c as f64 + 0.5) / k as f64
                        })
                        .collect();
                    place(&u)
                })
                .collect()
        }
    };
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_single_point_is_center() {
        let dom = Domain::new(vec![(-1.0, 3.0), (0.0, 1.0), (2.0, 4.0)]).unwrap();
        for seed in [0, 7, 99] {
            let plan = SamplePlan {
                count: 1,
                seed,
                strategy: Strategy::Grid,
            };
            assert_eq!(sample_points(&plan, &dom).unwrap(), vec![Point::new(vec![1.0, 0.5, 3.0])]);
        }
    }

    #[test]
    fn halton_inside_margin_and_deterministic() {
        let dom = Domain::cube(3, 1.0);
        let plan = SamplePlan::default();
        let a = sample_points(&plan, &dom).unwrap();
        assert_eq!(a.len(), 32);
        assert_eq!(a, sample_points(&plan, &dom).unwrap());
        for p in &a {
            assert!(p.coords().iter().all(|x| x.abs() < 0.95));
        }
        let other = SamplePlan { seed: 8, ..plan };
        assert_ne!(a, sample_points(&other, &dom).unwrap());
    }

    #[test]
    fn empty_plan_is_an_error() {
        let plan = SamplePlan {
            count: 0,
            ..Default::default()
        };
        assert!(matches!(
            sample_points(&plan, &Domain::cube(3, 1.0)),
            Err(SuiteError::EmptyDomain)
        ));
    }
}
