use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::geometry::{distance, Point};
use crate::scalar::Scalar;

/// What the router decided at one waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord<S> {
    /// Position before the step.
    pub position: Point<S>,
    /// Aggregate order followed, `-1` for direct delivery.
    pub order: i32,
    /// Angle between the forwarding direction and the direction to the
    /// destination.
    pub deviation: S,
}

/// Polyline traced by a forwarded packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutePath<S> {
    pub source: Point<S>,
    pub destination: Point<S>,
    pub waypoints: Vec<Point<S>>,
    /// One record per step; `steps[j]` was taken at `waypoints[j]`.
    pub steps: Vec<StepRecord<S>>,
}

impl<S: Scalar> RoutePath<S> {
    pub(crate) fn new(source: Point<S>, destination: Point<S>, waypoints: Vec<Point<S>>, steps: Vec<StepRecord<S>>) -> Self {
        Self {
            source,
            destination,
            waypoints,
            steps,
        }
    }

    /// A bare polyline without per-step records.
    pub fn from_waypoints(waypoints: Vec<Point<S>>) -> Self {
        let source = *waypoints.first().expect("at least one waypoint");
        let destination = *waypoints.last().expect("at least one waypoint");
        Self::new(source, destination, waypoints, Vec::new())
    }

    pub fn length(&self) -> S {
        self.waypoints
            .windows(2)
            .fold(S::zero(), |acc, w| acc + distance(w[0], w[1]))
    }

    /// Writes one waypoint per line: `x,y,order,deviation`. The order and
    /// deviation are those of the step taken at that waypoint; the final
    /// waypoint carries `-1,0`.
    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (j, w) in self.waypoints.iter().enumerate() {
            let (order, dev) = self
                .steps
                .get(j)
                .map_or((-1, 0.0), |s| (s.order, s.deviation.as_f64()));
            writeln!(out, "{},{},{},{}", fmt12(w.x.as_f64()), fmt12(w.y.as_f64()), order, fmt12(dev))?;
        }
        Ok(())
    }
}

/// Ratio of the routed length to the straight-line distance. Needs at least
/// one segment.
pub fn path_stretch<S: Scalar>(path: &RoutePath<S>) -> S {
    path.length() / distance(path.source, path.destination)
}

/// Parses the format written by [`RoutePath::write_text`] into
/// `(waypoint, order, deviation)` rows.
pub fn read_path_text<R: BufRead>(input: R) -> Result<Vec<(Point<f64>, i32, f64)>> {
    let mut rows = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (|| -> Option<(Point<f64>, i32, f64)> {
            if f.len() != 4 {
                return None;
            }
            Some((Point::new(f[0].parse().ok()?, f[1].parse().ok()?), f[2].parse().ok()?, f[3].parse().ok()?))
        })();
        rows.push(parsed.ok_or_else(|| Error::Parse {
            line: line_no,
            reason: "expected x,y,order,deviation".into(),
        })?);
    }
    Ok(rows)
}
