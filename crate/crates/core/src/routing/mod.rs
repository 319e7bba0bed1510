//! Aggregate usability, per-router tables, destination lookup and the
//! small-step forwarding loop.
//!
//! A router at `p` may use an order-`i` ball once its nearest surface point is
//! at least `f_i = r_i / tan α` away, which keeps the angle the ball subtends
//! at `p` under `α`. Beyond the handover radius `ρ_i = f_i + 2·r_i` every
//! order-`i` ball containing a destination is usable, so the router's own
//! cover uses order-`i` balls on the ring `[ρ_i, ρ_{i+1})` and nothing finer.
//! Lookup forwards toward the smallest ball of that cover containing the
//! destination.

mod path;
mod table;

pub use path::{path_stretch, read_path_text, RoutePath, StepRecord};
pub use table::{RoutingTable, RoutingTableEntry};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cover::{check_in_world, Aggregate, Cover, MultilevelCover};
use crate::error::{Error, Result};
use crate::geometry::{alpha_from_sigma, direction, distance, lens_distance_range, step, Angle, Direction, Disk, Point};
use crate::scalar::Scalar;

const DEFAULT_MAX_STEPS: usize = 100_000_000;

/// Stretch target and forwarding resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingParams<S> {
    sigma: S,
    alpha: Angle<S>,
    r_0: S,
    delta: S,
    max_steps: usize,
}

impl<S: Scalar> RoutingParams<S> {
    /// Requires `σ > 1` and `0 < δ <= r_0 / 10`.
    pub fn new(sigma: S, r_0: S, delta: S) -> Result<Self> {
        let alpha = alpha_from_sigma(sigma)?;
        Self::checked(sigma, alpha, r_0, delta)
    }

    /// Same as [`RoutingParams::new`] but from the angular-size limit.
    pub fn from_alpha(alpha: S, r_0: S, delta: S) -> Result<Self> {
        if !(alpha > S::zero() && alpha < S::FRAC_PI_2()) {
            return Err(Error::DegenerateAngle(alpha.as_f64()));
        }
        Self::checked(alpha.cos().recip(), Angle(alpha), r_0, delta)
    }

    fn checked(sigma: S, alpha: Angle<S>, r_0: S, delta: S) -> Result<Self> {
        if !(alpha.0 > S::zero()) {
            return Err(Error::DegenerateAngle(alpha.0.as_f64()));
        }
        if !(alpha.0 < S::FRAC_PI_2()) {
            return Err(Error::DegenerateAngle(alpha.0.as_f64()));
        }
        if !(r_0 > S::zero()) || !r_0.is_finite() {
            return Err(Error::NonPositiveRadius(r_0.as_f64()));
        }
        if !(delta > S::zero()) || delta > r_0 / S::lit(10.0) * (S::one() + S::slack()) {
            return Err(Error::InvalidParams(format!(
                "step delta = {} must lie in (0, r0/10 = {}]",
                delta,
                r_0 / S::lit(10.0)
            )));
        }
        Ok(Self {
            sigma,
            alpha,
            r_0,
            delta,
            max_steps: DEFAULT_MAX_STEPS,
        })
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn sigma(&self) -> S {
        self.sigma
    }

    pub fn alpha(&self) -> Angle<S> {
        self.alpha
    }

    pub fn r_0(&self) -> S {
        self.r_0
    }

    pub fn delta(&self) -> S {
        self.delta
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    /// Discretization allowance `ε_δ = δ / r_0`: 0.02 at `δ = r_0 / 50` and
    /// linear in `δ`.
    pub fn discretization_allowance(&self) -> S {
        self.delta / self.r_0
    }

    /// Largest stretch a simulated path may show: `σ·(1 + ε_δ)`.
    pub fn stretch_tolerance(&self) -> S {
        self.sigma * (S::one() + self.discretization_allowance())
    }

    fn tan_alpha(&self) -> S {
        self.alpha.0.tan()
    }
}

/// `f_i = r_0·s^i / tan α`: how far the nearest surface point of an order-`i`
/// ball has to be for the ball to be usable.
pub fn min_usable_distance<S: Scalar>(order: u32, params: &RoutingParams<S>, s: S) -> Result<S> {
    let alpha = params.alpha.0;
    if !(alpha > S::zero() && alpha < S::FRAC_PI_2()) {
        return Err(Error::DegenerateAngle(alpha.as_f64()));
    }
    Ok(params.r_0 * s.powi(order as i32) / alpha.tan())
}

fn usable_reach<S: Scalar>(radius: S, params: &RoutingParams<S>) -> S {
    radius / params.tan_alpha() + radius
}

/// True iff `p` is at least `f_i + r_i` from the aggregate center. The bound is
/// inclusive.
pub fn usable<S: Scalar>(p: Point<S>, a: &Aggregate<S>, params: &RoutingParams<S>) -> bool {
    distance(p, a.center()) >= usable_reach(a.radius(), params)
}

/// Forwarding decision at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision<S> {
    pub direction: Direction<S>,
    /// `None` means direct delivery along the shortest path.
    pub aggregate: Option<Aggregate<S>>,
}

impl<S: Scalar> Decision<S> {
    /// Order of the chosen aggregate, `-1` for direct delivery.
    pub fn order(&self) -> i32 {
        self.aggregate.map_or(-1, |a| a.order() as i32)
    }
}

/// Candidates of one order that contain the destination, smallest first.
fn better<S: Scalar>(dest: Point<S>, a: &Aggregate<S>, b: &Aggregate<S>) -> Ordering {
    let da = distance(a.center(), dest);
    let db = distance(b.center(), dest);
    da.partial_cmp(&db)
        .unwrap_or(Ordering::Equal)
        .then(a.center().x.partial_cmp(&b.center().x).unwrap_or(Ordering::Equal))
        .then(a.center().y.partial_cmp(&b.center().y).unwrap_or(Ordering::Equal))
}

pub(crate) fn pick_best<S: Scalar>(dest: Point<S>, candidates: impl IntoIterator<Item = Aggregate<S>>) -> Option<Aggregate<S>> {
    candidates.into_iter().min_by(|a, b| better(dest, a, b))
}

/// Routing over one multilevel cover. Holds the per-order thresholds so the
/// forwarding loop never recomputes them.
#[derive(Debug, Clone)]
pub struct Router<'a, S> {
    cover: &'a MultilevelCover<S>,
    params: RoutingParams<S>,
    world: Disk<S>,
    /// `ρ_i = f_i + 2·r_i` per order.
    handover: Vec<S>,
}

impl<'a, S: Scalar> Router<'a, S> {
    pub fn new(cover: &'a MultilevelCover<S>, params: RoutingParams<S>) -> Result<Self> {
        let gap = (cover.r_0() - params.r_0).abs();
        if gap > cover.r_0() * S::slack() {
            return Err(Error::InvalidParams(format!(
                "routing r0 = {} does not match cover r0 = {}",
                params.r_0,
                cover.r_0()
            )));
        }
        let two = S::lit(2.0);
        let handover = (0..=cover.top_order())
            .map(|i| {
                let r = cover.radius_of(i);
                r / params.tan_alpha() + two * r
            })
            .collect();
        Ok(Self {
            cover,
            params,
            world: Disk::new(Point::origin(), cover.world_radius()),
            handover,
        })
    }

    pub fn cover(&self) -> &MultilevelCover<S> {
        self.cover
    }

    pub fn params(&self) -> &RoutingParams<S> {
        &self.params
    }

    /// Radius `f_0 + 2·r_0` beyond which some order-0 table entry always
    /// contains the destination.
    pub fn local_radius(&self) -> S {
        self.handover[0]
    }

    /// Handover radius `ρ_i = f_i + 2·r_i`.
    pub fn handover_radius(&self, order: u32) -> S {
        self.handover[order as usize]
    }

    /// Whether `a` belongs to the routing table owned by `p`: it is usable from
    /// `p` and it meets the part of the world where `p` serves destinations
    /// with order `a.order()`, i.e. the ring `[ρ_i, ρ_{i+1})`.
    pub fn is_table_entry(&self, p: Point<S>, a: &Aggregate<S>) -> bool {
        if !usable(p, a, &self.params) {
            return false;
        }
        let i = a.order() as usize;
        let d = distance(p, a.center());
        let r = a.radius();
        let (lo, hi) = if a.center().norm() + r <= self.world.radius {
            ((d - r).max(S::zero()), d + r)
        } else {
            match lens_distance_range(p, a.disk(), self.world) {
                Some(range) => range,
                None => return false,
            }
        };
        hi >= self.handover[i] && (i + 1 >= self.handover.len() || lo < self.handover[i + 1])
    }

    /// Per-order list of aggregates containing `dest`; reused across a route.
    pub fn destination_index(&self, dest: Point<S>) -> Result<Vec<Vec<Aggregate<S>>>> {
        check_in_world(dest, self.world.radius)?;
        self.cover
            .levels()
            .iter()
            .map(|level| level.covering_aggregates(dest))
            .collect()
    }

    pub fn lookup(&self, p: Point<S>, dest: Point<S>) -> Result<Decision<S>> {
        let index = self.destination_index(dest)?;
        self.lookup_indexed(p, dest, &index)
    }

    fn lookup_indexed(&self, p: Point<S>, dest: Point<S>, index: &[Vec<Aggregate<S>>]) -> Result<Decision<S>> {
        let d = distance(p, dest);
        let straight = direction(p, dest)?;
        if d <= self.params.r_0 {
            return Ok(Decision {
                direction: straight,
                aggregate: None,
            });
        }
        for candidates in index {
            let best = pick_best(dest, candidates.iter().copied().filter(|a| self.is_table_entry(p, a)));
            if let Some(a) = best {
                return Ok(Decision {
                    direction: direction(p, a.representative())?,
                    aggregate: Some(a),
                });
            }
        }
        if d < self.local_radius() {
            return Ok(Decision {
                direction: straight,
                aggregate: None,
            });
        }
        Err(Error::RoutingHole {
            x: dest.x.as_f64(),
            y: dest.y.as_f64(),
        })
    }

    /// Materializes the table owned by `p` by enumerating, per order, the
    /// lattice centers in the annulus where table entries can sit.
    pub fn assemble_table(&self, p: Point<S>) -> Result<RoutingTable<S>> {
        check_in_world(p, self.world.radius)?;
        let top = self.cover.top_order() as usize;
        let entries = self
            .cover
            .levels()
            .iter()
            .enumerate()
            .map(|(i, level)| {
                let r = level.radius();
                let inner = usable_reach(r, &self.params);
                let outer = if i < top {
                    self.handover[i + 1] + r
                } else {
                    p.norm() + self.world.radius + r + r
                };
                level
                    .centers_in_annulus(p, inner, outer)
                    .into_iter()
                    .filter(|a| self.is_table_entry(p, a))
                    .map(|a| RoutingTableEntry::new(p, a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RoutingTable::new(
            p,
            entries,
            self.params.r_0,
            self.local_radius(),
            self.world.radius,
        ))
    }

    /// Walks from `source` to `dest`, calling `visit` once per step. Returns
    /// the number of steps taken.
    pub fn walk<F>(&self, source: Point<S>, dest: Point<S>, mut visit: F) -> Result<usize>
    where
        F: FnMut(&StepRecord<S>, Point<S>),
    {
        check_in_world(source, self.world.radius)?;
        if source == dest {
            return Err(Error::CoincidentPoints);
        }
        let index = self.destination_index(dest)?;
        let delta = self.params.delta;
        let mut here = source;
        let mut steps = 0usize;
        loop {
            if steps >= self.params.max_steps {
                return Err(Error::StepLimitExceeded(self.params.max_steps));
            }
            let d = distance(here, dest);
            if d <= delta {
                let record = StepRecord {
                    position: here,
                    order: -1,
                    deviation: S::zero(),
                };
                visit(&record, dest);
                return Ok(steps + 1);
            }
            let decision = self.lookup_indexed(here, dest, &index)?;
            let deviation = decision.direction.angle_to(&direction(here, dest)?).radians();
            let next = step(here, decision.direction, delta)?;
            let record = StepRecord {
                position: here,
                order: decision.order(),
                deviation,
            };
            visit(&record, next);
            here = next;
            steps += 1;
        }
    }

    pub fn route(&self, source: Point<S>, dest: Point<S>) -> Result<RoutePath<S>> {
        let mut waypoints = vec![source];
        let mut steps = Vec::new();
        self.walk(source, dest, |record, next| {
            steps.push(*record);
            waypoints.push(next);
        })?;
        Ok(RoutePath::new(source, dest, waypoints, steps))
    }
}

pub fn lookup<S: Scalar>(
    p: Point<S>,
    dest: Point<S>,
    cover: &MultilevelCover<S>,
    params: &RoutingParams<S>,
) -> Result<Decision<S>> {
    Router::new(cover, *params)?.lookup(p, dest)
}

pub fn assemble_table<S: Scalar>(p: Point<S>, cover: &MultilevelCover<S>, params: &RoutingParams<S>) -> Result<RoutingTable<S>> {
    Router::new(cover, *params)?.assemble_table(p)
}

pub fn route<S: Scalar>(
    source: Point<S>,
    dest: Point<S>,
    cover: &MultilevelCover<S>,
    params: &RoutingParams<S>,
) -> Result<RoutePath<S>> {
    Router::new(cover, *params)?.route(source, dest)
}
