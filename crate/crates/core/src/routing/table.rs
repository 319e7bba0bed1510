use serde::{Deserialize, Serialize};

use super::{pick_best, Decision};
use crate::cover::{check_in_world, Aggregate};
use crate::error::{Error, Result};
use crate::geometry::{direction, distance, Direction, Point};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingTableEntry<S> {
    pub aggregate: Aggregate<S>,
    pub direction_to_representative: Direction<S>,
}

impl<S: Scalar> RoutingTableEntry<S> {
    pub(crate) fn new(owner: Point<S>, aggregate: Aggregate<S>) -> Result<Self> {
        Ok(Self {
            aggregate,
            direction_to_representative: direction(owner, aggregate.representative())?,
        })
    }
}

/// Materialized table of one router, grouped by order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingTable<S> {
    owner: Point<S>,
    by_order: Vec<Vec<RoutingTableEntry<S>>>,
    r_0: S,
    local_radius: S,
    world_radius: S,
}

impl<S: Scalar> RoutingTable<S> {
    pub(crate) fn new(
        owner: Point<S>,
        by_order: Vec<Vec<RoutingTableEntry<S>>>,
        r_0: S,
        local_radius: S,
        world_radius: S,
    ) -> Self {
        Self {
            owner,
            by_order,
            r_0,
            local_radius,
            world_radius,
        }
    }

    pub fn owner(&self) -> Point<S> {
        self.owner
    }

    pub fn len(&self) -> usize {
        self.by_order.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entry counts for orders `0..=m`.
    pub fn per_order_counts(&self) -> Vec<usize> {
        self.by_order.iter().map(Vec::len).collect()
    }

    pub fn entries_of_order(&self, order: u32) -> &[RoutingTableEntry<S>] {
        self.by_order.get(order as usize).map_or(&[], Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = &RoutingTableEntry<S>> {
        self.by_order.iter().flatten()
    }

    /// Lookup using only this table: the smallest-order entry containing
    /// `dest`, direct delivery inside `r_0`, or inside the local radius when
    /// no entry contains `dest`.
    pub fn lookup(&self, dest: Point<S>) -> Result<Decision<S>> {
        check_in_world(dest, self.world_radius)?;
        let straight = direction(self.owner, dest)?;
        let d = distance(self.owner, dest);
        if d <= self.r_0 {
            return Ok(Decision {
                direction: straight,
                aggregate: None,
            });
        }
        for entries in &self.by_order {
            let containing = entries.iter().map(|e| e.aggregate).filter(|a| a.contains(dest));
            if let Some(a) = pick_best(dest, containing) {
                let entry = entries
                    .iter()
                    .find(|e| e.aggregate == a)
                    .expect("picked from these entries");
                return Ok(Decision {
                    direction: entry.direction_to_representative,
                    aggregate: Some(a),
                });
            }
        }
        if d < self.local_radius {
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
}
