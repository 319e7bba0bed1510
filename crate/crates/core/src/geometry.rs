//! Planar primitives: points, directions, small steps and the angular
//! bounds that decide whether an aggregate may be used for forwarding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A location on the plane. Every point is conceptually a router.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean norm of the position vector.
    pub fn norm(&self) -> S {
        self.x.hypot(self.y)
    }

    pub fn scaled(&self, factor: S) -> Self {
        Self::new(self.x * factor, self.y * factor)
    }
}

/// Unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction<S> {
    ux: S,
    uy: S,
}

impl<S: Scalar> Direction<S> {
    pub fn from_angle(angle: S) -> Self {
        let (uy, ux) = angle.sin_cos();
        Self { ux, uy }
    }

    /// Normalizes `(dx, dy)`; fails on the zero vector.
    pub fn from_vector(dx: S, dy: S) -> Result<Self> {
        let len = dx.hypot(dy);
        if len == S::zero() || !len.is_finite() {
            return Err(Error::CoincidentPoints);
        }
        Ok(Self {
            ux: dx / len,
            uy: dy / len,
        })
    }

    pub fn ux(&self) -> S {
        self.ux
    }

    pub fn uy(&self) -> S {
        self.uy
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(&self) -> S {
        let a = self.uy.atan2(self.ux);
        if a < S::zero() {
            let wrapped = a + S::TAU();
            // -0.0 style rounding can land exactly on 2π
            if wrapped >= S::TAU() {
                S::zero()
            } else {
                wrapped
            }
        } else {
            a
        }
    }

    /// Unsigned angle between two directions, in `[0, π]`.
    pub fn angle_to(&self, other: &Direction<S>) -> Angle<S> {
        let cross = self.ux * other.uy - self.uy * other.ux;
        let dot = self.ux * other.ux + self.uy * other.uy;
        Angle(cross.abs().atan2(dot))
    }
}

/// An angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle<S>(pub S);

impl<S: Scalar> Angle<S> {
    pub fn radians(self) -> S {
        self.0
    }

    pub fn degrees(self) -> S {
        self.0.to_degrees()
    }
}

/// Closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk<S> {
    pub center: Point<S>,
    pub radius: S,
}

impl<S: Scalar> Disk<S> {
    pub fn new(center: Point<S>, radius: S) -> Self {
        Self { center, radius }
    }

    /// Closed containment with a relative slack of a few ulps.
    pub fn contains(&self, p: Point<S>) -> bool {
        distance(self.center, p) <= self.radius * (S::one() + S::slack())
    }
}

pub fn distance<S: Scalar>(a: Point<S>, b: Point<S>) -> S {
    (b.x - a.x).hypot(b.y - a.y)
}

pub fn direction<S: Scalar>(from: Point<S>, to: Point<S>) -> Result<Direction<S>> {
    Direction::from_vector(to.x - from.x, to.y - from.y)
}

/// Moves `p` by `delta` along `d`.
pub fn step<S: Scalar>(p: Point<S>, d: Direction<S>, delta: S) -> Result<Point<S>> {
    if !(delta > S::zero()) {
        return Err(Error::NonPositiveStep(delta.as_f64()));
    }
    Ok(Point::new(p.x + d.ux * delta, p.y + d.uy * delta))
}

/// Largest angular size that still keeps every routed path under stretch `sigma`.
pub fn alpha_from_sigma<S: Scalar>(sigma: S) -> Result<Angle<S>> {
    if !(sigma >= S::one()) || !sigma.is_finite() {
        return Err(Error::InvalidStretch(sigma.as_f64()));
    }
    Ok(Angle(sigma.recip().acos()))
}

/// Exact maximum angle at `p` between the direction to `center` and the
/// direction to any point of the ball `B(center, radius)`.
pub fn max_deviation_angle<S: Scalar>(p: Point<S>, center: Point<S>, radius: S) -> Result<Angle<S>> {
    let d = distance(p, center);
    if d <= radius {
        return Err(Error::InsideAggregate {
            distance: d.as_f64(),
            radius: radius.as_f64(),
        });
    }
    Ok(Angle((radius / d).asin()))
}

/// Range `[min, max]` of distances from `p` to points of `a ∩ b`, or `None`
/// when the two disks do not meet.
///
/// Along any circle the distance to `p` is unimodal, so the extremes over the
/// lens sit at the nearest/farthest point of either circle (when that point is
/// inside the other disk) or at the circle intersections.
pub fn lens_distance_range<S: Scalar>(p: Point<S>, a: Disk<S>, b: Disk<S>) -> Option<(S, S)> {
    let gap = distance(a.center, b.center);
    let reach = (a.radius + b.radius) * (S::one() + S::slack());
    if gap > reach {
        return None;
    }

    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    let mut push = |q: Point<S>| {
        let d = distance(p, q);
        lo = lo.min(d);
        hi = hi.max(d);
    };

    for (this, other) in [(a, b), (b, a)] {
        let (near, far) = match direction(this.center, p) {
            Ok(u) => (
                Point::new(this.center.x + u.ux * this.radius, this.center.y + u.uy * this.radius),
                Point::new(this.center.x - u.ux * this.radius, this.center.y - u.uy * this.radius),
            ),
            Err(_) => {
                let q = Point::new(this.center.x + this.radius, this.center.y);
                (q, q)
            }
        };
        if other.contains(near) {
            push(near);
        }
        if other.contains(far) {
            push(far);
        }
    }

    for q in circle_intersections(a, b).into_iter().flatten() {
        push(q);
    }

    if hi < lo {
        return None;
    }
    if a.contains(p) && b.contains(p) {
        lo = S::zero();
    }
    Some((lo, hi))
}

fn circle_intersections<S: Scalar>(a: Disk<S>, b: Disk<S>) -> [Option<Point<S>>; 2] {
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    let d = dx.hypot(dy);
    if d == S::zero() || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
        return [None, None];
    }
    let along = (a.radius * a.radius - b.radius * b.radius + d * d) / (d + d);
    let h = (a.radius * a.radius - along * along).max(S::zero()).sqrt();
    let mx = a.center.x + along * dx / d;
    let my = a.center.y + along * dy / d;
    [
        Some(Point::new(mx - h * dy / d, my + h * dx / d)),
        Some(Point::new(mx + h * dy / d, my - h * dx / d)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn pt(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(pt(0.0, 0.0), pt(0.0, 0.0)), 0.0);
        assert_eq!(distance(pt(0.0, 0.0), pt(3.0, 4.0)), 5.0);
        assert_eq!(distance(pt(1.0, 1.0), pt(4.0, 5.0)), 5.0);
    }

    #[test]
    fn direction_examples() {
        assert_eq!(direction(pt(0.0, 0.0), pt(5.0, 0.0)).unwrap().angle(), 0.0);
        assert_relative_eq!(direction(pt(0.0, 0.0), pt(0.0, 2.0)).unwrap().angle(), PI / 2.0);
        assert_relative_eq!(
            direction(pt(2.0, 2.0), pt(1.0, 1.0)).unwrap().angle(),
            5.0 * PI / 4.0,
            epsilon = 1e-15
        );
        assert_eq!(direction(pt(1.0, 1.0), pt(1.0, 1.0)), Err(Error::CoincidentPoints));
    }

    #[test]
    fn step_examples() {
        let q = step(pt(0.0, 0.0), Direction::from_angle(0.0), 1.0).unwrap();
        assert_relative_eq!(q.x, 1.0);
        assert_relative_eq!(q.y, 0.0);
        let q = step(pt(0.0, 0.0), Direction::from_angle(PI / 2.0), 2.0).unwrap();
        assert_relative_eq!(q.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(q.y, 2.0);
        let q = step(pt(1.0, 0.0), Direction::from_angle(PI), 1.0).unwrap();
        assert_relative_eq!(q.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(q.y, 0.0, epsilon = 1e-15);
        assert!(matches!(
            step(pt(0.0, 0.0), Direction::from_angle(0.0), 0.0),
            Err(Error::NonPositiveStep(_))
        ));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_from_sigma(1.0).unwrap().radians(), 0.0);
        assert_relative_eq!(alpha_from_sigma(2.0).unwrap().radians(), PI / 3.0, epsilon = 1e-12);
        // arccos(1/1.1) evaluated at 30 digits: 0.429699666151424517...
        assert_relative_eq!(
            alpha_from_sigma(1.1).unwrap().radians(),
            0.429_699_666_151_424_5,
            epsilon = 1e-15
        );
        assert!(matches!(alpha_from_sigma(0.9), Err(Error::InvalidStretch(_))));
    }

    #[test]
    fn max_deviation_examples() {
        let a = max_deviation_angle(pt(0.0, 0.0), pt(2.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(a.radians(), PI / 6.0, epsilon = 1e-15);
        let a = max_deviation_angle(pt(0.0, 0.0), pt(10.0, 0.0), 10.0 * 0.1f64.sin()).unwrap();
        assert_relative_eq!(a.radians(), 0.1, epsilon = 1e-14);
        assert!(matches!(
            max_deviation_angle(pt(0.0, 0.0), pt(1.0, 0.0), 1.0),
            Err(Error::InsideAggregate { .. })
        ));
    }

    #[test]
    fn direction_is_unit() {
        let d = direction(pt(-3.0, 7.5), pt(1e6, -2e5)).unwrap();
        assert!((d.ux() * d.ux() + d.uy() * d.uy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lens_of_nested_disks_is_inner_disk() {
        let outer = Disk::new(pt(0.0, 0.0), 10.0);
        let inner = Disk::new(pt(3.0, 0.0), 1.0);
        let (lo, hi) = lens_distance_range(pt(-5.0, 0.0), inner, outer).unwrap();
        assert_relative_eq!(lo, 7.0);
        assert_relative_eq!(hi, 9.0);
    }

    #[test]
    fn lens_of_disjoint_disks_is_none() {
        let a = Disk::new(pt(0.0, 0.0), 1.0);
        let b = Disk::new(pt(3.0, 0.0), 1.0);
        assert!(lens_distance_range(pt(0.0, 5.0), a, b).is_none());
    }

    fn sampled_lens_range(p: Point<f64>, a: Disk<f64>, b: Disk<f64>) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let n = 400;
        for i in 0..=n {
            let rho = a.radius * (i as f64 / n as f64);
            for j in 0..n {
                let th = 2.0 * PI * j as f64 / n as f64;
                let q = pt(a.center.x + rho * th.cos(), a.center.y + rho * th.sin());
                if distance(b.center, q) <= b.radius {
                    let d = distance(p, q);
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        (hi >= lo).then_some((lo, hi))
    }

    proptest! {
        #[test]
        fn deviation_bound_holds_for_points_in_ball(
            cx in -50.0..50.0f64, cy in -50.0..50.0f64, r in 0.1..10.0f64,
            extra in 0.01..40.0f64, phi in 0.0..(2.0 * PI),
            u in 0.0..1.0f64, th in 0.0..(2.0 * PI),
        ) {
            let center = pt(cx, cy);
            let p = pt(cx + (r + extra) * phi.cos(), cy + (r + extra) * phi.sin());
            let bound = max_deviation_angle(p, center, r).unwrap().radians();
            let q = pt(cx + r * u.sqrt() * th.cos(), cy + r * u.sqrt() * th.sin());
            let dev = direction(p, center).unwrap().angle_to(&direction(p, q).unwrap()).radians();
            prop_assert!(dev <= bound + 1e-12);
        }

        #[test]
        fn step_moves_exactly_delta(
            x in -1.0..1.0f64, y in -1.0..1.0f64, th in 0.0..(2.0 * PI), e in -6.0..6.0f64,
        ) {
            let delta = 10f64.powf(e);
            let p = pt(x, y);
            let q = step(p, Direction::from_angle(th), delta).unwrap();
            prop_assert!((distance(p, q) - delta).abs() <= 1e-9 * delta);
        }

        #[test]
        fn alpha_inverts_secant(alpha in 1e-3..(PI / 2.0 - 1e-3)) {
            let back = alpha_from_sigma(1.0 / alpha.cos()).unwrap().radians();
            prop_assert!((back - alpha).abs() <= 1e-12);
        }

        #[test]
        fn lens_range_brackets_sampled_points(
            ax in -5.0..5.0f64, ay in -5.0..5.0f64, ar in 0.5..4.0f64,
            br in 2.0..8.0f64, px in -15.0..15.0f64, py in -15.0..15.0f64,
        ) {
            let a = Disk::new(pt(ax, ay), ar);
            let b = Disk::new(pt(0.0, 0.0), br);
            let p = pt(px, py);
            if let Some((slo, shi)) = sampled_lens_range(p, a, b) {
                let (lo, hi) = lens_distance_range(p, a, b).expect("sampled lens is non-empty");
                prop_assert!(lo <= slo + 1e-9 && shi <= hi + 1e-9);
                // 400x400 polar sampling resolves the extremes to well under 0.1
                prop_assert!(slo - lo < 0.1 && hi - shi < 0.1);
            }
        }
    }
}
