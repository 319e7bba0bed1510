//! CSV tables and JSON summaries. Reals are printed with 12 significant
//! digits so reruns with the same seed produce identical bytes.

use std::io::Write;

use serde_json::{json, Value};

use super::{ExperimentConfig, ScalingReport, StretchReport};
use crate::format::fmt12;
use crate::scalar::Scalar;

fn f<S: Scalar>(x: S) -> String {
    fmt12(x.as_f64())
}

fn opt<S: Scalar>(x: Option<S>) -> String {
    x.map(f).unwrap_or_default()
}

fn num<S: Scalar>(x: S) -> Value {
    // round-trip through the printed form so summaries match the CSV
    fmt12(x.as_f64()).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

/// One row per world radius.
pub fn write_scaling_csv<S: Scalar, W: Write>(report: &ScalingReport<S>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "world_radius",
        "log_s_ratio",
        "top_order",
        "k_measured",
        "entry_bound",
        "size_min",
        "size_mean",
        "size_max",
        "max_per_order",
        "flatness",
    ])?;
    for r in &report.records {
        w.write_record([
            f(r.world_radius),
            f(r.log_ratio),
            r.top_order.to_string(),
            r.k_measured.to_string(),
            f(r.entry_bound),
            r.size_min.to_string(),
            f(r.size_mean),
            r.size_max.to_string(),
            r.per_order_max.iter().max().copied().unwrap_or(0).to_string(),
            opt(r.flatness),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (world radius, owner, order).
pub fn write_scaling_owner_csv<S: Scalar, W: Write>(report: &ScalingReport<S>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["world_radius", "owner", "x", "y", "order", "entries", "interior"])?;
    for r in &report.records {
        for (oi, o) in r.owners.iter().enumerate() {
            for (order, (&count, &interior)) in o.per_order.iter().zip(&o.interior).enumerate() {
                w.write_record([
                    f(r.world_radius),
                    oi.to_string(),
                    f(o.owner.x),
                    f(o.owner.y),
                    order.to_string(),
                    count.to_string(),
                    interior.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per routed pair.
pub fn write_stretch_csv<S: Scalar, W: Write>(report: &StretchReport<S>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "world_radius",
        "source_x",
        "source_y",
        "dest_x",
        "dest_y",
        "straight",
        "length",
        "stretch",
        "max_deviation",
        "steps",
        "progress_violations",
        "deviation_violations",
        "termination_ok",
        "passed",
    ])?;
    for r in &report.records {
        w.write_record([
            r.index.to_string(),
            f(r.world_radius),
            f(r.source.x),
            f(r.source.y),
            f(r.destination.x),
            f(r.destination.y),
            f(r.straight),
            f(r.length),
            f(r.stretch),
            f(r.max_deviation),
            r.steps.to_string(),
            r.progress_violations.to_string(),
            r.deviation_violations.to_string(),
            r.termination_ok.to_string(),
            r.passed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn config_json<S: Scalar>(config: &ExperimentConfig<S>) -> Value {
    json!({
        "r_0": num(config.r_0),
        "s": num(config.s),
        "sigma": num(config.sigma),
        "delta": num(config.delta),
        "seed": config.seed,
        "trial_count": config.trial_count,
        "world_radii": config.world_radii.iter().map(|&r| num(r)).collect::<Vec<_>>(),
    })
}

pub fn scaling_summary<S: Scalar>(config: &ExperimentConfig<S>, report: &ScalingReport<S>, max_flatness: S) -> Value {
    let flat_ok = report.flatness.is_none_or(|x| x <= max_flatness);
    json!({
        "experiment": "table_scaling",
        "config": config_json(config),
        "fit": {
            "slope": num(report.fit.slope),
            "intercept": num(report.fit.intercept),
            "r_squared": num(report.fit.r_squared),
        },
        "flatness": report.flatness.map(num),
        "bound_violations": report.violations.len(),
        "pass": {
            "entry_bound": report.violations.is_empty(),
            "flatness": flat_ok,
        },
    })
}

pub fn stretch_summary<S: Scalar>(config: &ExperimentConfig<S>, report: &StretchReport<S>) -> Value {
    json!({
        "experiment": "stretch",
        "config": config_json(config),
        "alpha": num(report.alpha),
        "tolerance": num(report.tolerance),
        "trials": report.records.len(),
        "max_stretch": num(report.max_stretch),
        "mean_stretch": num(report.mean_stretch),
        "stretch_violations": report.violation_count,
        "progress_violations": report.progress_violations,
        "deviation_violations": report.deviation_violations,
        "termination_violations": report.termination_violations,
        "pass": {
            "stretch": report.violation_count == 0,
            "progress": report.progress_violations == 0,
            "deviation": report.deviation_violations == 0,
            "termination": report.termination_violations == 0,
        },
    })
}
