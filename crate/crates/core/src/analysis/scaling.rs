use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{least_squares, per_order_entry_bound, stream_rng, ExperimentConfig, LinearFit};
use crate::cover::{build_multilevel_cover, measure_fatness, uniform_in_disk, MultilevelCover};
use crate::error::Result;
use crate::geometry::Point;
use crate::routing::Router;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct OwnerRecord<S> {
    pub owner: Point<S>,
    pub size: usize,
    pub per_order: Vec<usize>,
    /// Orders whose whole service ring lies inside the world ball.
    pub interior: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRecord<S> {
    pub world_radius: S,
    /// `log_s(R / r_0)`.
    pub log_ratio: S,
    pub top_order: u32,
    pub k_measured: usize,
    pub entry_bound: S,
    pub size_min: usize,
    pub size_mean: S,
    pub size_max: usize,
    pub per_order_mean: Vec<S>,
    pub per_order_max: Vec<usize>,
    /// Max/min entry count over all (owner, interior order) pairs.
    pub flatness: Option<S>,
    pub owners: Vec<OwnerRecord<S>>,
}

/// A per-order count above the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation<S> {
    pub world_radius: S,
    pub owner_index: usize,
    pub order: u32,
    pub count: usize,
    pub bound: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport<S> {
    pub records: Vec<RadiusRecord<S>>,
    /// Mean table size against `log_s(R / r_0)`.
    pub fit: LinearFit<S>,
    pub violations: Vec<BoundViolation<S>>,
    /// Worst flatness ratio over all radii.
    pub flatness: Option<S>,
}

/// Largest fatness measured over the levels of a cover.
pub fn cover_fatness<S: Scalar>(cover: &MultilevelCover<S>, samples: usize, seed: u64) -> usize {
    cover
        .levels()
        .iter()
        .map(|level| measure_fatness(level, samples, seed.wrapping_add(level.order() as u64)))
        .max()
        .unwrap_or(0)
}

/// Square-lattice covers with fixed `r_0` and `s`.
pub fn square_lattice_factory<S: Scalar>(r_0: S, s: S) -> impl Fn(S) -> Result<MultilevelCover<S>> + Sync {
    move |world_radius| build_multilevel_cover(r_0, s, world_radius)
}

/// Uniform owners away from the rim: a band of width `r_0·s` is excluded.
pub fn interior_owners<S: Scalar>(cover: &MultilevelCover<S>, rng: &mut ChaCha8Rng, count: usize) -> Vec<Point<S>> {
    let radius = (cover.world_radius() - cover.r_0() * cover.scale()).max(S::zero());
    (0..count).map(|_| uniform_in_disk(rng, radius)).collect()
}

pub fn run_scaling_experiment<S, F, O>(config: &ExperimentConfig<S>, cover_factory: F, owner_sampler: O) -> Result<ScalingReport<S>>
where
    S: Scalar,
    F: Fn(S) -> Result<MultilevelCover<S>>,
    O: Fn(&MultilevelCover<S>, &mut ChaCha8Rng, usize) -> Vec<Point<S>>,
{
    config.validate()?;
    let params = config.routing_params()?;
    let mut records = Vec::with_capacity(config.world_radii.len());
    let mut violations = Vec::new();

    for (ri, &world_radius) in config.world_radii.iter().enumerate() {
        let cover = cover_factory(world_radius)?;
        let router = Router::new(&cover, params)?;
        let k = cover_fatness(&cover, config.fatness_samples, config.seed);
        let bound = per_order_entry_bound(params.alpha().radians(), cover.scale(), k.max(1))?;
        let mut rng = stream_rng(config.seed, ri as u64);
        let owners = owner_sampler(&cover, &mut rng, config.trial_count);
        let top = cover.top_order() as usize;

        let owner_records = owners
            .par_iter()
            .map(|&owner| {
                let table = router.assemble_table(owner)?;
                let room = world_radius - owner.norm();
                let interior = (0..=top)
                    .map(|i| {
                        i < top && router.handover_radius(i as u32 + 1) + S::lit(2.0) * cover.radius_of(i as u32) <= room
                    })
                    .collect();
                Ok(OwnerRecord {
                    owner,
                    size: table.len(),
                    per_order: table.per_order_counts(),
                    interior,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        for (oi, rec) in owner_records.iter().enumerate() {
            for (order, &count) in rec.per_order.iter().enumerate() {
                if S::from_count(count) > bound {
                    violations.push(BoundViolation {
                        world_radius,
                        owner_index: oi,
                        order: order as u32,
                        count,
                        bound,
                    });
                }
            }
        }

        let n = S::from_count(owner_records.len());
        let sizes = owner_records.iter().map(|r| r.size);
        let per_order_mean = (0..=top)
            .map(|i| owner_records.iter().fold(S::zero(), |a, r| a + S::from_count(r.per_order[i])) / n)
            .collect();
        let per_order_max = (0..=top)
            .map(|i| owner_records.iter().map(|r| r.per_order[i]).max().unwrap_or(0))
            .collect();
        let interior_counts: Vec<usize> = owner_records
            .iter()
            .flat_map(|r| r.per_order.iter().zip(&r.interior).filter(|(_, &int)| int).map(|(&c, _)| c))
            .collect();
        let flatness = match (interior_counts.iter().min(), interior_counts.iter().max()) {
            (Some(&lo), Some(&hi)) if interior_counts.len() >= 2 && lo > 0 => Some(S::from_count(hi) / S::from_count(lo)),
            _ => None,
        };

        records.push(RadiusRecord {
            world_radius,
            log_ratio: (world_radius / config.r_0).ln() / cover.scale().ln(),
            top_order: cover.top_order(),
            k_measured: k,
            entry_bound: bound,
            size_min: sizes.clone().min().unwrap_or(0),
            size_mean: sizes.clone().fold(S::zero(), |a, x| a + S::from_count(x)) / n,
            size_max: sizes.max().unwrap_or(0),
            per_order_mean,
            per_order_max,
            flatness,
            owners: owner_records,
        });
    }

    let xs: Vec<S> = records.iter().map(|r| r.log_ratio).collect();
    let ys: Vec<S> = records.iter().map(|r| r.size_mean).collect();
    let flatness = records.iter().filter_map(|r| r.flatness).fold(None, |acc: Option<S>, f| {
        Some(acc.map_or(f, |a| a.max(f)))
    });
    Ok(ScalingReport {
        fit: least_squares(&xs, &ys),
        records,
        violations,
        flatness,
    })
}
