//! Experiments and closed-form checks: the per-order entry bound, table
//! growth against `log_s(R/r_0)`, stretch compliance of simulated routes, the
//! near-perfect-stretch asymptotic and the scale-factor search.
//!
//! Trials run as a parallel map over a shared read-only cover. Each trial
//! draws from its own ChaCha8 stream keyed by the trial index, and results are
//! collected in index order, so reports do not depend on thread scheduling.

mod bounds;
mod fit;
mod report;
mod scaling;
mod stretch;

pub use bounds::{
    lower_order_ball_area, near_perfect_asymptotic, optimize_scale_factor, per_order_entry_bound, scale_total,
    ScaleOptimum, MAX_SCALE,
};
pub use fit::{least_squares, LinearFit};
pub use report::{
    scaling_summary, stretch_summary, write_scaling_csv, write_scaling_owner_csv, write_stretch_csv,
};
pub use scaling::{
    cover_fatness, interior_owners, run_scaling_experiment, square_lattice_factory, BoundViolation, OwnerRecord,
    RadiusRecord, ScalingReport,
};
pub use stretch::{run_stretch_experiment, StretchReport, TrialRecord};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::routing::RoutingParams;
use crate::scalar::Scalar;

/// Sample count used when measuring cover fatness.
pub const DEFAULT_FATNESS_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<S> {
    pub r_0: S,
    pub s: S,
    pub sigma: S,
    /// Strictly increasing.
    pub world_radii: Vec<S>,
    /// Owners per radius (scaling) or routed pairs per radius (stretch).
    pub trial_count: usize,
    pub delta: S,
    pub seed: u64,
    /// Replaces the default allowance `δ / r_0` in the stretch tolerance.
    pub epsilon_delta: Option<S>,
    pub fatness_samples: usize,
    /// Routed pairs are at least this far apart; defaults to `2·r_0`.
    pub pair_min_distance: Option<S>,
    /// Optional cap on pair distance.
    pub pair_max_distance: Option<S>,
}

impl<S: Scalar> ExperimentConfig<S> {
    pub fn new(r_0: S, s: S, sigma: S, world_radii: Vec<S>, trial_count: usize, delta: S, seed: u64) -> Self {
        Self {
            r_0,
            s,
            sigma,
            world_radii,
            trial_count,
            delta,
            seed,
            epsilon_delta: None,
            fatness_samples: DEFAULT_FATNESS_SAMPLES,
            pair_min_distance: None,
            pair_max_distance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.world_radii.is_empty() {
            return Err(Error::InvalidExperiment("world_radii is empty".into()));
        }
        if self.world_radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidExperiment("world_radii must be strictly increasing".into()));
        }
        if self.trial_count == 0 {
            return Err(Error::InvalidExperiment("trial_count must be at least 1".into()));
        }
        if !(self.s > S::one()) {
            return Err(Error::DegenerateScale(self.s.as_f64()));
        }
        self.routing_params().map(|_| ())
    }

    pub fn routing_params(&self) -> Result<RoutingParams<S>> {
        RoutingParams::new(self.sigma, self.r_0, self.delta)
    }

    /// `σ·(1 + ε_δ)`.
    pub fn stretch_tolerance(&self) -> Result<S> {
        let params = self.routing_params()?;
        let eps = self.epsilon_delta.unwrap_or_else(|| params.discretization_allowance());
        Ok(self.sigma * (S::one() + eps))
    }
}

/// Independent ChaCha8 stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
