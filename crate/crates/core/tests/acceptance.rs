//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::Instant;

use geoagg::analysis::{
    interior_owners, lower_order_ball_area, near_perfect_asymptotic, per_order_entry_bound, run_scaling_experiment,
    run_stretch_experiment, scaling_summary, square_lattice_factory, stretch_summary, stream_rng, write_scaling_csv,
    write_scaling_owner_csv, write_stretch_csv, ExperimentConfig, StretchReport,
};
use geoagg::cover::{build_multilevel_cover, uniform_in_disk};
use geoagg::geometry::{alpha_from_sigma, distance};
use geoagg::routing::{min_usable_distance, usable};
use geoagg::{Aggregate, Point, Router, RoutingParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Criteria 1 and 2 share these runs.
fn stretch_runs() -> Vec<StretchReport<f64>> {
    [1.25, 2.0, 1.1]
        .into_iter()
        .map(|sigma| {
            let c = ExperimentConfig::new(1.0, 2.0, sigma, vec![1000.0], 500, 1.0 / 50.0, 20_240_601);
            run_stretch_experiment(&c).expect("stretch experiment")
        })
        .collect()
}

fn criterion_1(runs: &[StretchReport<f64>]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let limit = r.sigma * 1.02;
        let ok = r.records.len() == 500 && r.records.iter().all(|t| t.straight >= 2.0) && r.max_stretch <= limit;
        pass &= ok && r.violation_count == 0;
        parts.push(format!(
            "sigma {}: max {:.6} <= {:.4} over {} pairs",
            r.sigma,
            r.max_stretch,
            limit,
            r.records.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_2(runs: &[StretchReport<f64>]) -> Outcome {
    let steps: usize = runs.iter().flat_map(|r| &r.records).map(|t| t.steps).sum();
    let progress: usize = runs.iter().map(|r| r.progress_violations).sum();
    let deviation: usize = runs.iter().map(|r| r.deviation_violations).sum();
    let late: usize = runs.iter().map(|r| r.termination_violations).sum();
    outcome(
        progress == 0 && deviation == 0 && late == 0 && steps > 0,
        format!("{steps} steps: {progress} progress, {deviation} deviation, {late} termination violations"),
    )
}

fn criterion_3() -> Outcome {
    let mut tables = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for sigma in [1.1, 1.25, 2.0] {
        for s in [2.0, 3.0] {
            for world in [100.0, 1000.0] {
                let c = ExperimentConfig::new(1.0, s, sigma, vec![world], 20, 0.02, 3);
                let report = run_scaling_experiment(&c, square_lattice_factory(1.0, s), interior_owners)
                    .expect("scaling experiment");
                let rec = &report.records[0];
                tables += rec.owners.len();
                violations += report.violations.len();
                let peak = rec.per_order_max.iter().copied().max().unwrap_or(0) as f64;
                worst = worst.max(peak / rec.entry_bound);
            }
        }
    }
    outcome(
        violations == 0,
        format!("{tables} tables, {violations} violations, largest count/bound {worst:.3}"),
    )
}

fn criterion_4() -> Outcome {
    let c = ExperimentConfig::new(1.0, 2.0, 1.25, vec![100.0, 1000.0, 10000.0], 20, 0.02, 4);
    let report = run_scaling_experiment(&c, square_lattice_factory(1.0, 2.0), interior_owners).expect("scaling");
    let flat = report.flatness.unwrap_or(f64::INFINITY);
    let owners_ok = report.records.iter().all(|r| r.owners.len() >= 20);
    outcome(
        report.fit.r_squared >= 0.95 && flat <= 2.0 && owners_ok,
        format!(
            "size = {:.2} + {:.2}·log_s(R/r0), R² {:.4}, flatness {:.3}",
            report.fit.intercept, report.fit.slope, report.fit.r_squared, flat
        ),
    )
}

fn mean_size(r_0: f64, world: f64) -> (f64, f64) {
    let c = ExperimentConfig::new(r_0, 2.0, 1.25, vec![world], 20, r_0 / 50.0, 5);
    let report = run_scaling_experiment(&c, square_lattice_factory(r_0, 2.0), interior_owners).expect("scaling");
    let rec = &report.records[0];
    (rec.size_mean, rec.entry_bound)
}

fn criterion_5() -> Outcome {
    let (base, _) = mean_size(1.0, 1000.0);
    let (finer, bound_a) = mean_size(0.5, 1000.0);
    let (wider, bound_b) = mean_size(1.0, 2000.0);
    let bound = bound_a.min(bound_b);
    let gap = (finer - wider).abs();
    outcome(
        gap <= bound,
        format!(
            "size(R, r0/s) {finer:.2}, size(R·s, r0) {wider:.2}, size(R, r0) {base:.2}; gap {gap:.3} <= {bound:.1}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let alpha = alpha_from_sigma(2.0f64).unwrap().radians();
    let b1 = lower_order_ball_area(1, 1.0f64, 2.0, FRAC_PI_4).unwrap();
    let n = per_order_entry_bound(FRAC_PI_4, 2.0f64, 4).unwrap();
    let rel = |x: f64, y: f64| ((x - y) / y).abs();
    outcome(
        (alpha - FRAC_PI_3).abs() <= 1e-12 && rel(b1, 100.0 * PI) <= 1e-9 && rel(n, 400.0) <= 1e-9,
        format!("alpha(2) - pi/3 = {:.1e}, B_1 = {b1:.9}, bound = {n:.9}", alpha - FRAC_PI_3),
    )
}

fn criterion_7() -> Outcome {
    // lengths in km
    let params = RoutingParams::new(1.1f64, 2000.0, 20.0).unwrap();
    let f_0 = min_usable_distance(0, &params, 2.0).unwrap();
    // independent: cot(arccos(1/1.1)) = 1/sqrt(1.1² - 1)
    let oracle = 2000.0 / (1.1f64 * 1.1 - 1.0).sqrt();
    let at = |d: f64| usable(Point::new(0.0, 0.0), &Aggregate::new(0, Point::new(d, 0.0), 2000.0), &params);
    let far = at(10_000.0);
    let near = at(6_000.0);
    let threshold = f_0 + 2000.0;
    outcome(
        far && !near && (f_0 - oracle).abs() <= 1e-9 * oracle && 6_000.0 < threshold && threshold < 10_000.0,
        format!("usable at 10000 km: {far}, at 6000 km: {near}; f_0 + r_0 = {threshold:.3} km"),
    )
}

fn criterion_8() -> Outcome {
    let table = near_perfect_asymptotic(&[1e-4f64]).unwrap();
    let near = (table[0].1 - FRAC_1_SQRT_2).abs();
    let product = |o: f64| {
        let alpha = (1.0 / (1.0 + o)).acos();
        per_order_entry_bound(alpha, 2.0, 1).unwrap() * o
    };
    // ratios of successive decades; the additive 4 in the bound fades only
    // once 4·sqrt(o) is small against cot(α)·sqrt(o) → 1/sqrt(2)
    let decades = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let ratios: Vec<f64> = decades.windows(2).map(|w| product(w[1]) / product(w[0])).collect();
    let approaching = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    let tail = &ratios[ratios.len() - 2..];
    let tail_ok = tail.iter().all(|r| (r - 1.0).abs() <= 0.02);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(
        near <= 1e-4 && approaching && tail_ok,
        format!(
            "|cot·sqrt(o) - 1/sqrt2| = {near:.2e} at o = 1e-4; decade ratios 1e-2..1e-8: [{}]",
            shown.join(", ")
        ),
    )
}

fn better(dest: Point<f64>, a: &Aggregate<f64>, b: &Aggregate<f64>) -> Ordering {
    a.order()
        .cmp(&b.order())
        .then(distance(a.center(), dest).total_cmp(&distance(b.center(), dest)))
        .then(a.center().x.total_cmp(&b.center().x))
        .then(a.center().y.total_cmp(&b.center().y))
}

fn criterion_9() -> Outcome {
    let world = 100.0;
    let cover = build_multilevel_cover(1.0f64, 2.0, world).unwrap();
    let params = RoutingParams::new(1.25f64, 1.0, 0.02).unwrap();
    let router = Router::new(&cover, params).unwrap();
    let all: Vec<Aggregate<f64>> = cover.aggregates().collect();
    let mut rng = stream_rng(9, 0);

    let (mut lookup_bad, mut table_bad) = (0, 0);
    for _ in 0..1000 {
        let p = uniform_in_disk(&mut rng, world);
        let dest = uniform_in_disk(&mut rng, world);
        if p == dest {
            continue;
        }
        let entries: Vec<Aggregate<f64>> = all.iter().copied().filter(|a| router.is_table_entry(p, a)).collect();
        let d = distance(p, dest);
        let expected = if d <= 1.0 {
            Some(None)
        } else {
            match entries.iter().filter(|a| a.contains(dest)).min_by(|a, b| better(dest, a, b)) {
                Some(a) => Some(Some(*a)),
                None if d < router.local_radius() => Some(None),
                None => None,
            }
        };
        let got = router.lookup(p, dest).ok().map(|dec| dec.aggregate);
        if got != expected {
            lookup_bad += 1;
        }
        let mut fast: Vec<Aggregate<f64>> = router.assemble_table(p).unwrap().entries().map(|e| e.aggregate).collect();
        let mut slow = entries;
        let key = |a: &Aggregate<f64>, b: &Aggregate<f64>| better(Point::new(0.0, 0.0), a, b);
        fast.sort_by(key);
        slow.sort_by(key);
        if fast != slow {
            table_bad += 1;
        }
    }

    let reports = || {
        let mut c = ExperimentConfig::new(1.0f64, 2.0, 1.25, vec![30.0, 300.0], 16, 0.05, 77);
        let mut bytes = Vec::new();
        let stretch = run_stretch_experiment(&c).unwrap();
        write_stretch_csv(&stretch, &mut bytes).unwrap();
        bytes.extend(serde_json::to_vec(&stretch_summary(&c, &stretch)).unwrap());
        c.world_radii.push(3000.0);
        let scaling = run_scaling_experiment(&c, square_lattice_factory(1.0, 2.0), interior_owners).unwrap();
        write_scaling_csv(&scaling, &mut bytes).unwrap();
        write_scaling_owner_csv(&scaling, &mut bytes).unwrap();
        bytes.extend(serde_json::to_vec(&scaling_summary(&c, &scaling, 2.0)).unwrap());
        bytes
    };
    let identical = reports() == reports();
    outcome(
        lookup_bad == 0 && table_bad == 0 && identical,
        format!(
            "1000 lookups: {lookup_bad} mismatches; 1000 tables: {table_bad} mismatches; reports identical: {identical}"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let runs = stretch_runs();
    let results = [
        ("1 stretch guarantee", criterion_1(&runs)),
        ("2 per-step progress", criterion_2(&runs)),
        ("3 per-order entry bound", criterion_3()),
        ("4 logarithmic tables", criterion_4()),
        ("5 r0/R duality", criterion_5()),
        ("6 closed forms", criterion_6()),
        ("7 worked figure", criterion_7()),
        ("8 near-perfect asymptotic", criterion_8()),
        ("9 oracle equivalence", criterion_9()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
