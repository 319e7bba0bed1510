use rand::Rng;
use rayon::prelude::*;

use super::{stream_rng, ExperimentConfig};
use crate::cover::{build_multilevel_cover, uniform_in_disk};
use crate::error::{Error, Result};
use crate::geometry::{distance, Point};
use crate::routing::Router;
use crate::scalar::Scalar;

const PAIR_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord<S> {
    pub index: usize,
    pub world_radius: S,
    pub source: Point<S>,
    pub destination: Point<S>,
    pub straight: S,
    pub length: S,
    pub stretch: S,
    pub max_deviation: S,
    pub steps: usize,
    /// Steps whose advance fell below `δ·cos α − δ²/d`.
    pub progress_violations: usize,
    /// Steps whose deviation exceeded `α + 1e-9`.
    pub deviation_violations: usize,
    /// Step count within `d / (δ·cos α·(1 − 1e-6)) + 2`.
    pub termination_ok: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchReport<S> {
    pub sigma: S,
    pub alpha: S,
    pub tolerance: S,
    pub records: Vec<TrialRecord<S>>,
    pub max_stretch: S,
    pub mean_stretch: S,
    /// Trials with stretch above the tolerance.
    pub violation_count: usize,
    pub progress_violations: usize,
    pub deviation_violations: usize,
    pub termination_violations: usize,
}

impl<S: Scalar> StretchReport<S> {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn first_failure(&self) -> Option<&TrialRecord<S>> {
        self.records.iter().find(|r| !r.passed)
    }
}

fn sample_pair<S: Scalar, R: Rng>(rng: &mut R, world: S, min_d: S, max_d: Option<S>) -> Result<(Point<S>, Point<S>)> {
    for _ in 0..PAIR_ATTEMPTS {
        let source = uniform_in_disk(rng, world);
        let dest = match max_d {
            Some(m) => {
                let off = uniform_in_disk(rng, m);
                Point::new(source.x + off.x, source.y + off.y)
            }
            None => uniform_in_disk(rng, world),
        };
        let d = distance(source, dest);
        if dest.norm() <= world && d >= min_d && d > S::zero() {
            return Ok((source, dest));
        }
    }
    Err(Error::InvalidExperiment(format!(
        "could not draw a pair at distance >= {min_d} in a world of radius {world}"
    )))
}

/// Routes seeded random pairs over square-lattice covers, one batch of
/// `trial_count` pairs per world radius.
pub fn run_stretch_experiment<S: Scalar>(config: &ExperimentConfig<S>) -> Result<StretchReport<S>> {
    config.validate()?;
    let params = config.routing_params()?;
    let tolerance = config.stretch_tolerance()?;
    let alpha = params.alpha().radians();
    let delta = params.delta();
    let min_d = config.pair_min_distance.unwrap_or(config.r_0 + config.r_0);
    let dev_slack = S::lit(1e-9);

    let mut records = Vec::new();
    for (ri, &world) in config.world_radii.iter().enumerate() {
        let cover = build_multilevel_cover(config.r_0, config.s, world)?;
        let router = Router::new(&cover, params)?;
        let base = ri * config.trial_count;
        let batch = (base..base + config.trial_count)
            .into_par_iter()
            .map(|index| {
                let mut rng = stream_rng(config.seed, index as u64);
                let (source, dest) = sample_pair(&mut rng, world, min_d, config.pair_max_distance)?;
                let mut length = S::zero();
                let mut max_dev = S::zero();
                let mut progress_violations = 0;
                let mut deviation_violations = 0;
                let steps = router.walk(source, dest, |rec, next| {
                    length = length + distance(rec.position, next);
                    max_dev = max_dev.max(rec.deviation);
                    if rec.deviation > alpha + dev_slack {
                        deviation_violations += 1;
                    }
                    let before = distance(rec.position, dest);
                    // the closing step (before <= δ) is exact and exempt
                    if before > delta {
                        let advance = before - distance(next, dest);
                        if advance < delta * alpha.cos() - delta * delta / before {
                            progress_violations += 1;
                        }
                    }
                })?;
                let straight = distance(source, dest);
                let stretch = length / straight;
                let limit = straight / (delta * alpha.cos() * (S::one() - S::lit(1e-6))) + S::lit(2.0);
                let termination_ok = S::from_count(steps) <= limit;
                let passed = stretch <= tolerance && progress_violations == 0 && deviation_violations == 0 && termination_ok;
                Ok(TrialRecord {
                    index,
                    world_radius: world,
                    source,
                    destination: dest,
                    straight,
                    length,
                    stretch,
                    max_deviation: max_dev,
                    steps,
                    progress_violations,
                    deviation_violations,
                    termination_ok,
                    passed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.extend(batch);
    }

    let n = S::from_count(records.len());
    Ok(StretchReport {
        sigma: config.sigma,
        alpha,
        tolerance,
        max_stretch: records.iter().map(|r| r.stretch).fold(S::zero(), S::max),
        mean_stretch: records.iter().fold(S::zero(), |a, r| a + r.stretch) / n,
        violation_count: records.iter().filter(|r| r.stretch > tolerance).count(),
        progress_violations: records.iter().map(|r| r.progress_violations).sum(),
        deviation_violations: records.iter().map(|r| r.deviation_violations).sum(),
        termination_violations: records.iter().filter(|r| !r.termination_ok).count(),
        records,
    })
}
