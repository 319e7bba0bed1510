//! Closed forms from the table-size argument and the scale-factor search.

use crate::cover::orders_to_reach;
use crate::error::{Error, Result};
use crate::geometry::alpha_from_sigma;
use crate::scalar::Scalar;

fn check_angle<S: Scalar>(alpha: S) -> Result<()> {
    if alpha > S::zero() && alpha < S::FRAC_PI_2() {
        Ok(())
    } else {
        Err(Error::DegenerateAngle(alpha.as_f64()))
    }
}

/// Area `B_i = π·r_0²·(1/tan α + 4)²·s^{2i}` of the ball around a router
/// outside of which orders below `i` are never needed.
pub fn lower_order_ball_area<S: Scalar>(order: u32, r_0: S, s: S, alpha: S) -> Result<S> {
    check_angle(alpha)?;
    let factor = alpha.tan().recip() + S::lit(4.0);
    Ok(S::PI() * r_0 * r_0 * factor * factor * s.powi(2 * order as i32))
}

/// `(1/tan α + 4)²·s²·k`: upper bound on the entries a router keeps per order.
pub fn per_order_entry_bound<S: Scalar>(alpha: S, s: S, k: usize) -> Result<S> {
    check_angle(alpha)?;
    if !(s > S::one()) {
        return Err(Error::DegenerateScale(s.as_f64()));
    }
    if k == 0 {
        return Err(Error::InvalidExperiment("fatness k must be at least 1".into()));
    }
    let factor = alpha.tan().recip() + S::lit(4.0);
    Ok(factor * factor * s * s * S::from_count(k))
}

/// For `σ = 1 + o`, pairs `(o, cot α·√o)`; the second column tends to `1/√2`.
pub fn near_perfect_asymptotic<S: Scalar>(o_values: &[S]) -> Result<Vec<(S, S)>> {
    o_values
        .iter()
        .map(|&o| {
            if !(o > S::zero() && o <= S::lit(0.1)) {
                return Err(Error::InvalidExperiment(format!("o = {o} must lie in (0, 0.1]")));
            }
            let alpha = alpha_from_sigma(S::one() + o)?.radians();
            Ok((o, alpha.tan().recip() * o.sqrt()))
        })
        .collect()
}

/// Bounded table size for a given scale factor:
/// `per_order_entry_bound(α, s, k)·⌈log_s(R/r_0)⌉`.
pub fn scale_total<S: Scalar>(s: S, ratio: S, alpha: S, k: usize) -> Result<S> {
    let orders = orders_to_reach(ratio, s);
    Ok(per_order_entry_bound(alpha, s, k)? * S::from_count(orders as usize))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleOptimum<S> {
    pub s_star: S,
    pub predicted_total: S,
    pub orders: u32,
}

pub const MAX_SCALE: f64 = 16.0;

/// Minimizes [`scale_total`] over `s ∈ (1, 16]`.
///
/// The order count is a step function of `s` and the per-order bound grows
/// with `s`, so on each plateau the left end wins. Plateaus start at
/// `s_n = (R/r_0)^{1/n}`; the search walks `n` upward from the plateau holding
/// `s = 16` until `n` alone exceeds the best total.
pub fn optimize_scale_factor<S: Scalar>(world_radius: S, r_0: S, sigma: S, k: usize) -> Result<ScaleOptimum<S>> {
    if !(r_0 > S::zero()) || !(world_radius > r_0) {
        return Err(Error::InvalidExperiment(format!(
            "need R > r0 > 0, got R = {world_radius}, r0 = {r_0}"
        )));
    }
    if !(sigma > S::one()) {
        return Err(Error::DegenerateAngle(0.0));
    }
    let alpha = alpha_from_sigma(sigma)?.radians();
    let ratio = world_radius / r_0;
    let max_s = S::lit(MAX_SCALE);
    let floor = per_order_entry_bound(alpha, S::one() + S::epsilon(), k)?;

    let mut best: Option<ScaleOptimum<S>> = None;
    let mut n = orders_to_reach(ratio, max_s).max(1);
    loop {
        let s_n = ratio.powf(S::from_count(n as usize).recip()).min(max_s);
        if s_n > S::one() {
            let total = scale_total(s_n, ratio, alpha, k)?;
            if best.is_none_or(|b| total < b.predicted_total) {
                best = Some(ScaleOptimum {
                    s_star: s_n,
                    predicted_total: total,
                    orders: orders_to_reach(ratio, s_n),
                });
            }
        }
        let b = best.expect("first plateau always evaluates");
        if floor * S::from_count(n as usize) > b.predicted_total || s_n <= S::one() {
            return Ok(b);
        }
        n += 1;
    }
}
