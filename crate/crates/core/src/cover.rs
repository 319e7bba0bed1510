//! Symmetric ball covers on a square lattice and their self-similar stacks.
//!
//! A level cover of order `i` places balls of radius `r_i = r_0·s^i` on the
//! lattice `r_i·Z²` (one lattice point at the origin) and keeps every ball that
//! meets the world ball of radius `R`. The farthest any point sits from its
//! nearest lattice center is `r_i·√2/2 < r_i`, so the cover has no gaps, and a
//! point lies in at most five balls.
//!
//! Level covers are implicit: aggregates are generated from lattice indices on
//! demand, so a level with hundreds of millions of balls costs nothing until it
//! is enumerated.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::geometry::{distance, Disk, Point};
use crate::scalar::Scalar;

/// A ball of a given order together with its representative vertex, which is
/// always the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate<S> {
    order: u32,
    center: Point<S>,
    radius: S,
}

impl<S: Scalar> Aggregate<S> {
    /// A free-standing aggregate; covers build theirs with `radius = r_0·s^order`.
    pub fn new(order: u32, center: Point<S>, radius: S) -> Self {
        Self { order, center, radius }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn center(&self) -> Point<S> {
        self.center
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn representative(&self) -> Point<S> {
        self.center
    }

    pub fn disk(&self) -> Disk<S> {
        Disk::new(self.center, self.radius)
    }

    /// Closed-ball containment.
    pub fn contains(&self, p: Point<S>) -> bool {
        self.disk().contains(p)
    }
}

/// Anything that can report which of its aggregates contain a world point.
pub trait Cover<S: Scalar> {
    fn world_radius(&self) -> S;

    fn covering_aggregates(&self, p: Point<S>) -> Result<Vec<Aggregate<S>>>;
}

/// One order of the multilevel cover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCover<S> {
    order: u32,
    radius: S,
    spacing: S,
    world_radius: S,
}

impl<S: Scalar> LevelCover<S> {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    /// Lattice pitch; equal to the radius.
    pub fn spacing(&self) -> S {
        self.spacing
    }

    fn center_of(&self, a: i64, b: i64) -> Point<S> {
        Point::new(
            self.spacing * S::from_i64(a).expect("lattice index fits"),
            self.spacing * S::from_i64(b).expect("lattice index fits"),
        )
    }

    fn aggregate_at(&self, a: i64, b: i64) -> Aggregate<S> {
        Aggregate {
            order: self.order,
            center: self.center_of(a, b),
            radius: self.radius,
        }
    }

    /// Whether the ball at lattice index `(a, b)` belongs to the cover, i.e.
    /// whether it meets the world ball.
    fn keeps(&self, center: Point<S>) -> bool {
        center.norm() <= (self.world_radius + self.radius) * (S::one() + S::slack())
    }

    fn index_range(&self, lo: S, hi: S) -> (i64, i64) {
        let a = (lo / self.spacing).ceil().to_i64().expect("lattice index fits");
        let b = (hi / self.spacing).floor().to_i64().expect("lattice index fits");
        (a, b)
    }

    /// Every aggregate whose center lies in the closed annulus
    /// `inner <= |center - q| <= outer`, in lattice order.
    pub fn centers_in_annulus(&self, q: Point<S>, inner: S, outer: S) -> Vec<Aggregate<S>> {
        let mut out = Vec::new();
        if outer < inner || outer < S::zero() {
            return out;
        }
        let (a_lo, a_hi) = self.index_range(q.x - outer, q.x + outer);
        for a in a_lo..=a_hi {
            let x = self.spacing * S::from_i64(a).expect("lattice index fits");
            let dx = x - q.x;
            let span = (outer * outer - dx * dx).max(S::zero()).sqrt();
            let (b_lo, b_hi) = self.index_range(q.y - span, q.y + span);
            for b in b_lo..=b_hi {
                let c = self.center_of(a, b);
                let d = distance(q, c);
                if d >= inner && d <= outer && self.keeps(c) {
                    out.push(self.aggregate_at(a, b));
                }
            }
        }
        out
    }

    /// Enumerates the whole cover. Fine for small worlds only.
    pub fn aggregates(&self) -> impl Iterator<Item = Aggregate<S>> + '_ {
        let reach = self.world_radius + self.radius;
        let (lo, hi) = self.index_range(-reach, reach);
        (lo..=hi).flat_map(move |a| {
            (lo..=hi).filter_map(move |b| {
                let c = self.center_of(a, b);
                self.keeps(c).then(|| self.aggregate_at(a, b))
            })
        })
    }

    pub fn len(&self) -> usize {
        let reach = self.world_radius + self.radius;
        let (lo, hi) = self.index_range(-reach, reach);
        (lo..=hi)
            .map(|a| (lo..=hi).filter(|&b| self.keeps(self.center_of(a, b))).count())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<S: Scalar> Cover<S> for LevelCover<S> {
    fn world_radius(&self) -> S {
        self.world_radius
    }

    fn covering_aggregates(&self, p: Point<S>) -> Result<Vec<Aggregate<S>>> {
        check_in_world(p, self.world_radius)?;
        let mut out = self.centers_in_annulus(p, S::zero(), self.radius * (S::one() + S::slack()));
        out.retain(|a| a.contains(p));
        Ok(out)
    }
}

/// A union of covers; fatness adds up.
impl<S: Scalar, C: Cover<S>> Cover<S> for [C] {
    fn world_radius(&self) -> S {
        self.iter()
            .map(Cover::world_radius)
            .fold(S::zero(), S::max)
    }

    fn covering_aggregates(&self, p: Point<S>) -> Result<Vec<Aggregate<S>>> {
        let mut out = Vec::new();
        for c in self {
            out.extend(c.covering_aggregates(p)?);
        }
        Ok(out)
    }
}

pub(crate) fn check_in_world<S: Scalar>(p: Point<S>, world_radius: S) -> Result<()> {
    if !p.is_finite() || p.norm() > world_radius * (S::one() + S::slack()) {
        return Err(Error::OutsideWorld {
            x: p.x.as_f64(),
            y: p.y.as_f64(),
            radius: world_radius.as_f64(),
        });
    }
    Ok(())
}

fn validate_scale<S: Scalar>(r_0: S, s: S) -> Result<()> {
    if !(s > S::one()) || !s.is_finite() {
        return Err(Error::DegenerateScale(s.as_f64()));
    }
    if !(r_0 > S::zero()) || !r_0.is_finite() {
        return Err(Error::NonPositiveRadius(r_0.as_f64()));
    }
    Ok(())
}

pub fn build_level_cover<S: Scalar>(order: u32, r_0: S, s: S, world_radius: S) -> Result<LevelCover<S>> {
    validate_scale(r_0, s)?;
    if !(world_radius > S::zero()) || !world_radius.is_finite() {
        return Err(Error::EmptyWorld(world_radius.as_f64()));
    }
    let radius = r_0 * s.powi(order as i32);
    Ok(LevelCover {
        order,
        radius,
        spacing: radius,
        world_radius,
    })
}

/// Smallest `n >= 0` with `s^n >= ratio`, tolerant to last-ulp error so that
/// exact powers such as `2^11 = 2048` land on `n = 11`.
pub fn orders_to_reach<S: Scalar>(ratio: S, s: S) -> u32 {
    let target = ratio * (S::one() - S::slack());
    let mut n = 0u32;
    let mut reach = S::one();
    while reach < target {
        reach = reach * s;
        n += 1;
    }
    n
}

/// Self-similar stack of level covers for orders `0..=m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilevelCover<S> {
    r_0: S,
    s: S,
    world_radius: S,
    levels: Vec<LevelCover<S>>,
}

impl<S: Scalar> MultilevelCover<S> {
    pub fn r_0(&self) -> S {
        self.r_0
    }

    pub fn scale(&self) -> S {
        self.s
    }

    pub fn world_radius(&self) -> S {
        self.world_radius
    }

    /// Highest order `m`; one order-`m` ball holds the whole world.
    pub fn top_order(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn levels(&self) -> &[LevelCover<S>] {
        &self.levels
    }

    pub fn level(&self, order: u32) -> Option<&LevelCover<S>> {
        self.levels.get(order as usize)
    }

    pub fn radius_of(&self, order: u32) -> S {
        self.r_0 * self.s.powi(order as i32)
    }

    /// All aggregates of every order.
    pub fn aggregates(&self) -> impl Iterator<Item = Aggregate<S>> + '_ {
        self.levels.iter().flat_map(LevelCover::aggregates)
    }

    /// Writes one aggregate per line: `order,center_x,center_y,radius`.
    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for level in &self.levels {
            write_level_text(level, out)?;
        }
        Ok(())
    }
}

pub fn build_multilevel_cover<S: Scalar>(r_0: S, s: S, world_radius: S) -> Result<MultilevelCover<S>> {
    validate_scale(r_0, s)?;
    if !(world_radius > S::zero()) || !world_radius.is_finite() {
        return Err(Error::EmptyWorld(world_radius.as_f64()));
    }
    if world_radius < r_0 {
        return Err(Error::WorldBelowBase {
            world: world_radius.as_f64(),
            r0: r_0.as_f64(),
        });
    }
    let m = orders_to_reach((world_radius + world_radius) / r_0, s);
    let levels = (0..=m)
        .map(|i| build_level_cover(i, r_0, s, world_radius))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultilevelCover {
        r_0,
        s,
        world_radius,
        levels,
    })
}

pub fn covering_aggregates<S: Scalar>(cover: &LevelCover<S>, p: Point<S>) -> Result<Vec<Aggregate<S>>> {
    cover.covering_aggregates(p)
}

/// Largest number of aggregates containing any of `sample_count` seeded
/// uniform points of the world ball.
pub fn measure_fatness<S: Scalar, C: Cover<S> + ?Sized>(cover: &C, sample_count: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let world = cover.world_radius();
    (0..sample_count.max(1))
        .map(|_| {
            let p = uniform_in_disk(&mut rng, world);
            cover
                .covering_aggregates(p)
                .map(|v| v.len())
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Uniform sample from the disk of the given radius around the origin.
pub fn uniform_in_disk<S: Scalar, R: Rng + ?Sized>(rng: &mut R, radius: S) -> Point<S> {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let rho = radius * S::lit(u.sqrt());
    let th = S::lit(std::f64::consts::TAU * v);
    Point::new(rho * th.cos(), rho * th.sin())
}

pub fn write_level_text<S: Scalar, W: Write>(level: &LevelCover<S>, out: &mut W) -> std::io::Result<()> {
    for a in level.aggregates() {
        writeln!(
            out,
            "{},{},{},{}",
            a.order,
            fmt12(a.center.x.as_f64()),
            fmt12(a.center.y.as_f64()),
            fmt12(a.radius.as_f64())
        )?;
    }
    Ok(())
}

/// Parses the line format written by [`MultilevelCover::write_text`].
pub fn read_cover_text<R: BufRead>(input: R) -> Result<Vec<Aggregate<f64>>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Parse {
            line: line_no,
            reason: format!("bad {what}"),
        };
        let order = fields[0].parse().map_err(|_| bad("order"))?;
        let x = fields[1].parse().map_err(|_| bad("center x"))?;
        let y = fields[2].parse().map_err(|_| bad("center y"))?;
        let radius = fields[3].parse().map_err(|_| bad("radius"))?;
        out.push(Aggregate {
            order,
            center: Point::new(x, y),
            radius,
        });
    }
    Ok(out)
}
