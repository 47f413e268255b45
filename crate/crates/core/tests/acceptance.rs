//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! A criterion that cannot hold because the underlying construction is
//! undefined on part of its input is reported as `FAIL (known gap)` with the
//! measured extent of the gap. The target exits non-zero on any other
//! failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use hypwalk_core::coxeter::{coxeter_criterion, opposite_translation_lengths, CoxeterPolygon};
use hypwalk_core::freewalk::{
    criterion_witness, cylinder_measures, mc_first_passage, solve_first_passage, MeasureKind, StepDistribution,
};
use hypwalk_core::fuchswalk::{
    boundary_histogram, convolution_powers, entropy_upper_bounds, estimate_drift, simulate, KEY_RESOLUTION,
};
use hypwalk_core::hyperbolic::Isometry;
use hypwalk_core::inequality::{
    constraint_chain, polygon_criterion, verify_arccos_bound, verify_scalar_bounds, verify_sqrt_bound,
};
use hypwalk_core::polygon::{
    build, dual, neutralizing_pairs, pentagon_from_sides, pentagon_surgery, phi_sum, random_polygon,
    random_polygon_retrying, random_polygon_with_spread, redistribute_basepoint, reduce_to_acute, side_pairings,
    PolygonSpec,
};
use hypwalk_core::sampling::stream_rng;
use hypwalk_core::{with_threads, Error};

enum Status {
    Pass(String),
    KnownGap(String),
}

type Outcome = Result<Status, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn close(value: f64, expected: f64, tol: f64) -> bool {
    (value - expected).abs() <= tol
}

/// `cosh a = cos(γ/2) / sin(π/2m)` for the regular 2m-gon with angle `γ`.
fn regular_apothem(m: usize, gamma: f64) -> f64 {
    ((gamma / 2.0).cos() / (PI / (2 * m) as f64).sin()).acosh()
}

fn genus_two_octagon() -> Outcome {
    let start = Instant::now();
    let p = build(&PolygonSpec::uniform(4, Some(2))).map_err(|e| e.to_string())?;
    let report = polygon_criterion(&p);
    let elapsed = start.elapsed().as_secs_f64();
    let a = (1.0 + 2f64.sqrt()).acosh();
    for &ap in p.apothems() {
        ensure!(close(ap, 1.5285709, 1e-6) && close(ap, a, 1e-12), "apothem {ap}");
    }
    for &l in &report.lengths {
        ensure!(close(l, 3.0571418, 1e-6) && close(l, 2.0 * a, 1e-12), "pairing length {l}");
    }
    let oracle = 8.0 / (1.0 + (2.0 * a).exp());
    ensure!(close(report.sigma, oracle, 1e-12), "sigma {} vs closed form {oracle}", report.sigma);
    ensure!(report.is_singular(), "verdict {:?}", report.verdict);
    ensure!(elapsed < 1.0, "took {elapsed:.3} s");
    Ok(Status::Pass(format!(
        "apothem {:.7}, length {:.7}, sigma {:.8} = 8/(1+e^ℓ) (stated 0.3592794 is off by {:.1e}), singular, {:.3} s",
        p.apothems()[0],
        report.lengths[0],
        report.sigma,
        (report.sigma - 0.3592794).abs(),
        elapsed
    )))
}

fn right_angled_octagon() -> Outcome {
    let p = build(&PolygonSpec::uniform(4, Some(1))).map_err(|e| e.to_string())?;
    let report = polygon_criterion(&p);
    let a = regular_apothem(4, FRAC_PI_2);
    for &ap in p.apothems() {
        ensure!(close(ap, 1.2242262, 1e-6) && close(ap, a, 1e-12), "apothem {ap}");
    }
    let oracle = 8.0 / (1.0 + (2.0 * a).exp());
    ensure!(close(report.sigma, 0.6364145, 1e-6), "sigma {}", report.sigma);
    ensure!(close(report.sigma, oracle, 1e-12), "sigma {} vs closed form {oracle}", report.sigma);
    ensure!(report.is_singular(), "verdict {:?}", report.verdict);
    Ok(Status::Pass(format!("apothem {:.7}, sigma {:.7}, singular", p.apothems()[0], report.sigma)))
}

fn coxeter_polygons() -> Outcome {
    let hex = CoxeterPolygon::regular(3, 2).map_err(|e| e.to_string())?;
    let mu = StepDistribution::uniform(MeasureKind::Involutive, 3).map_err(|e| e.to_string())?;
    for l in opposite_translation_lengths(&hex) {
        ensure!(close(l, 3.5254944, 1e-6) && close(l, 4.0 * 2f64.sqrt().acosh(), 1e-9), "hexagon length {l}");
    }
    let rep = coxeter_criterion(&hex, &mu).map_err(|e| e.to_string())?;
    ensure!(close(rep.sigma, 0.4393398, 1e-6), "hexagon sum {}", rep.sigma);
    ensure!(close(rep.sigma, 3.0 / (4.0 + 2.0 * 2f64.sqrt()), 1e-12), "hexagon closed form");
    ensure!(rep.is_singular(), "hexagon verdict {:?}", rep.verdict);

    let oct = CoxeterPolygon::regular(4, 2).map_err(|e| e.to_string())?;
    let mu = StepDistribution::uniform(MeasureKind::Involutive, 4).map_err(|e| e.to_string())?;
    let rep8 = coxeter_criterion(&oct, &mu).map_err(|e| e.to_string())?;
    let oracle = 4.0 / (1.0 + (2.0 * regular_apothem(4, FRAC_PI_2)).exp());
    ensure!(close(rep8.sigma, 0.3182073, 1e-6), "octagon sum {}", rep8.sigma);
    ensure!(close(rep8.sigma, oracle, 1e-12), "octagon closed form {oracle}");
    ensure!(rep8.is_singular(), "octagon verdict {:?}", rep8.verdict);
    Ok(Status::Pass(format!(
        "hexagon ℓ(r_i r_i+3) {:.7}, sum {:.7}; octagon sum {:.7}; both singular",
        rep.lengths[0], rep.sigma, rep8.sigma
    )))
}

fn main_inequality_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = stream_rng(2024, 0);
    let (mut tested, mut acute, mut attempts) = (0, 0, 0);
    let mut worst_sigma: f64 = 0.0;
    let mut coverage = std::collections::BTreeMap::new();
    while tested < 500 {
        attempts += 1;
        ensure!(attempts < 50_000, "sampler stalled after {tested} polygons");
        let m = rng.gen_range(3..=6);
        let k = rng.gen_range(1..=3);
        let Ok(p) = random_polygon_retrying(&mut rng, m, k, 20) else { continue };
        tested += 1;
        *coverage.entry((m, k)).or_insert(0) += 1;
        let rep = polygon_criterion(&p);
        worst_sigma = worst_sigma.max(rep.sigma);
        ensure!(rep.is_singular(), "sigma {} on m = {m}, k = {k}", rep.sigma);
        if p.vertex_angles().iter().all(|&g| g <= FRAC_PI_2) {
            acute += 1;
            let (arccos_sum, z_sum) = constraint_chain(&p);
            ensure!(arccos_sum <= PI + 1e-12, "Σ arccos(z z') = {arccos_sum}");
            ensure!(z_sum > (m - 1) as f64, "Σ z = {z_sum} with m = {m}");
        }
    }
    // (m, k) = (3, 1) has no polygons: the angle sum 2π reaches the area bound
    for m in 3..=6 {
        for k in 1..=3 {
            let n = coverage.get(&(m, k)).copied().unwrap_or(0);
            ensure!((m, k) == (3, 1) || n >= 20, "only {n} polygons with m = {m}, k = {k}");
        }
    }
    let per_m: Vec<String> = (3..=6)
        .map(|m| format!("m={m}: {}", (1..=3).map(|k| coverage.get(&(m, k)).copied().unwrap_or(0)).sum::<usize>()))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 30.0, "took {elapsed:.1} s");
    Ok(Status::Pass(format!(
        "{tested} polygons ({}), max sigma {worst_sigma:.6}, {acute} acute checked, {elapsed:.1} s",
        per_m.join(", ")
    )))
}

fn optimization_verifiers() -> Outcome {
    let start = Instant::now();
    let mut minima = Vec::new();
    for m in 3..=5 {
        let r = verify_arccos_bound(m, 100_000, 7).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "arccos bound m = {m}: {:?}", r.violations.first());
        ensure!(r.minimum_found >= PI - 1e-9, "arccos minimum {}", r.minimum_found);
        ensure!(r.equality_cases_checked.len() == m, "equality cases for m = {m}");
        minima.push(r.minimum_found - PI);
    }
    let root5 = 5f64.sqrt();
    for m in 3..=5 {
        let r = verify_sqrt_bound(m, 100_000, 8).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "sqrt bound m = {m}: {:?}", r.violations.first());
    }
    let r3 = verify_sqrt_bound(3, 100_000, 8).map_err(|e| e.to_string())?;
    let vertex = r3.equality_cases_checked.iter().find(|c| c.point == [1.0, 0.0, 0.0]).ok_or("missing (1,0,0)")?;
    ensure!(close(vertex.lhs, vertex.rhs, 1e-12) && close(vertex.lhs, 2.0, 1e-12), "(1,0,0) sides {vertex:?}");
    let centre = r3.equality_cases_checked.iter().find(|c| c.point == [1.0 / 3.0; 3]).ok_or("missing centre")?;
    ensure!(
        close(centre.lhs, root5, 1e-12) && close(centre.rhs, root5, 1e-12) && close(centre.lhs, 2.2360680, 1e-7),
        "uniform point sides {} {}",
        centre.lhs,
        centre.rhs
    );
    let s = verify_scalar_bounds(10_000).map_err(|e| e.to_string())?;
    ensure!(s.passed(), "scalar bounds: {:?}", s.violations.first());
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 60.0, "took {elapsed:.1} s");
    Ok(Status::Pass(format!(
        "arccos minima − π = {:.1e}/{:.1e}/{:.1e}; √Δ equality sides {:.7}; scalar grid clean; {elapsed:.1} s",
        minima[0], minima[1], minima[2], centre.lhs
    )))
}

fn free_group_solver() -> Outcome {
    for m in 2..=4 {
        let mu = StepDistribution::uniform(MeasureKind::Free, m).map_err(|e| e.to_string())?;
        let fp = solve_first_passage(&mu).map_err(|e| e.to_string())?;
        let x = 1.0 / (2 * m - 1) as f64;
        ensure!(fp.x.iter().all(|&v| close(v, x, 1e-12)), "F_{m}: {:?}", fp.x);
        let nu = cylinder_measures(&fp).map_err(|e| e.to_string())?;
        ensure!(nu.iter().all(|&v| close(v, 1.0 / (2 * m) as f64, 1e-12)), "F_{m} cylinders {nu:?}");
    }
    let mut rng = stream_rng(99, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.gen_range(2..=5);
        let mu = StepDistribution::random(&mut rng, MeasureKind::Free, m).map_err(|e| e.to_string())?;
        let fp = solve_first_passage(&mu).map_err(|e| e.to_string())?;
        let total: f64 = cylinder_measures(&fp).map_err(|e| e.to_string())?.iter().sum();
        worst = worst.max((total - 1.0).abs());
    }
    ensure!(worst <= 1e-12, "cylinder mass off by {worst:e}");
    let inv = StepDistribution::uniform(MeasureKind::Involutive, 3).map_err(|e| e.to_string())?;
    let fp = solve_first_passage(&inv).map_err(|e| e.to_string())?;
    ensure!(fp.x.iter().all(|&v| close(v, 0.2, 1e-12)), "involutive {:?}", fp.x);
    let nu = cylinder_measures(&fp).map_err(|e| e.to_string())?;
    ensure!(nu.iter().all(|&v| close(v, 1.0 / 6.0, 1e-12)), "involutive cylinders {nu:?}");

    let mut z_scores = Vec::new();
    let skewed = StepDistribution::new(MeasureKind::Free, 2, vec![0.4, 0.1, 0.2, 0.3]).map_err(|e| e.to_string())?;
    let uniform = StepDistribution::uniform(MeasureKind::Free, 2).map_err(|e| e.to_string())?;
    for (mu, symbol) in [(&uniform, 0), (&skewed, 0), (&skewed, 3)] {
        let exact = solve_first_passage(mu).map_err(|e| e.to_string())?.x[symbol];
        let mc = mc_first_passage(mu, symbol, 100_000, 10_000, 31).map_err(|e| e.to_string())?;
        let z = (mc.estimate - exact).abs() / mc.stderr;
        ensure!(z <= 4.0, "MC {} ± {} vs {exact}", mc.estimate, mc.stderr);
        z_scores.push(z);
    }
    Ok(Status::Pass(format!(
        "x = 1/(2m−1), cylinder error ≤ {worst:.1e}, involutive 1/5; MC z-scores {:.2}, {:.2}, {:.2}",
        z_scores[0], z_scores[1], z_scores[2]
    )))
}

fn witness() -> Outcome {
    let mu = StepDistribution::uniform(MeasureKind::Free, 4).map_err(|e| e.to_string())?;
    let p = build(&PolygonSpec::uniform(4, Some(2))).map_err(|e| e.to_string())?;
    let lengths = polygon_criterion(&p).lengths;
    let r = criterion_witness(&lengths, &mu).map_err(|e| e.to_string())?;
    let c = 1.0 + 2f64.sqrt();
    let e_l = (c + (c * c - 1.0).sqrt()).powi(2);
    for cand in &r.candidates {
        ensure!(close(cand.threshold, 7.0, 1e-10), "threshold {}", cand.threshold);
        ensure!(close(cand.e_pow_length, 21.2666866, 1e-6) && close(cand.e_pow_length, e_l, 1e-9), "e^ℓ");
    }
    ensure!(r.witnesses == vec![0, 1, 2, 3], "witnesses {:?}", r.witnesses);
    Ok(Status::Pass(format!(
        "threshold {:.7}, e^ℓ {:.7}, witnesses {:?}",
        r.candidates[0].threshold, r.candidates[0].e_pow_length, r.witnesses
    )))
}

fn dual_polygon() -> Outcome {
    let p = build(&PolygonSpec::uniform(5, Some(1))).map_err(|e| e.to_string())?;
    let d = dual(&p).map_err(|e| e.to_string())?;
    ensure!(d.m == 5, "dual has {} sides", d.m);
    let side = 2.0 * ((PI / 5.0).cos() / (PI / 10.0).sin()).acosh();
    for &s in &d.side_lengths {
        ensure!(close(s, 3.2338434, 1e-6) && close(s, side, 1e-9), "side {s}");
    }
    for &a in &d.angles {
        ensure!(close(a, PI / 5.0, 1e-8), "angle {a}");
    }
    ensure!(d.closure_residual < 1e-8, "closure {}", d.closure_residual);
    let oracle = 10.0 / (1.0 + side.exp());
    ensure!(close(p.sigma(), d.sigma(), 1e-10), "Σ {} vs Σ̂ {}", p.sigma(), d.sigma());
    ensure!(close(d.sigma(), oracle, 1e-12), "Σ̂ {} vs closed form {oracle}", d.sigma());

    let mut rng = stream_rng(50, 0);
    let (mut done, mut worst) = (0, 0.0f64);
    while done < 50 {
        let m = rng.gen_range(4..=6);
        let Ok(q) = random_polygon(&mut rng, m, 1) else { continue };
        let dq = dual(&q).map_err(|e| e.to_string())?;
        let r = redistribute_basepoint(&dq).map_err(|e| format!("redistribution failed: {e}"))?;
        worst = worst.max((r.sigma() - q.sigma()).abs());
        done += 1;
    }
    ensure!(worst <= 1e-10, "roundtrip Σ drift {worst:e}");
    Ok(Status::Pass(format!(
        "pentagon sides {side:.7}, closure {:.1e}, Σ {:.8} = 10/(1+e^s) (stated 0.3791174 is off by {:.1e}); 50 roundtrips, max Σ drift {worst:.1e}",
        d.closure_residual,
        d.sigma(),
        (d.sigma() - 0.3791174).abs()
    )))
}

fn pentagon_surgery_suite() -> Outcome {
    let mut rng = stream_rng(9, 0);
    let (mut admissible, mut measured, mut missed) = (0, 0, 0);
    let mut worst_delta: f64 = 0.0;
    while admissible < 1000 {
        let Some(pts) = pentagon_from_sides(
            rng.gen_range(0.05..2.5),
            rng.gen_range(0.05..2.5),
            rng.gen_range(0.05..1.6),
            rng.gen_range(0.05..2.5),
            rng.gen_range(0.05..1.6),
        ) else {
            continue;
        };
        match pentagon_surgery(pts) {
            Ok(s) => {
                admissible += 1;
                measured += 1;
                worst_delta = worst_delta.max(s.delta);
                ensure!(s.delta <= FRAC_PI_2 + 1e-9, "δ = {}", s.delta);
            }
            Err(Error::NoIntersection(_)) => {
                admissible += 1;
                missed += 1;
            }
            Err(Error::PreconditionViolated(_)) => {}
            Err(e) => return Err(e.to_string()),
        }
    }

    let mut rng = stream_rng(6, 0);
    let (mut reduced, mut failed, mut attempts) = (0, 0, 0);
    while reduced + failed < 100 && attempts < 400_000 {
        attempts += 1;
        let m = rng.gen_range(4..=6);
        let k = rng.gen_range(1..=2);
        let Ok(p) = random_polygon_with_spread(&mut rng, m, k, 1.5) else { continue };
        let pairs = neutralizing_pairs(&p);
        if pairs.obtuse.is_empty() || !pairs.disjoint {
            continue;
        }
        match reduce_to_acute(&p) {
            Ok(q) => {
                for &g in q.vertex_angles() {
                    ensure!(g <= FRAC_PI_2 + 1e-12, "reduced angle {g}");
                }
                ensure!(
                    phi_sum(p.midpoint_distances()) <= phi_sum(q.apothems()) + 1e-12,
                    "φ decreased"
                );
                reduced += 1;
            }
            Err(Error::NoIntersection(_)) | Err(Error::PreconditionViolated(_)) => failed += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure!(reduced > 0, "no polygon could be reduced");
    let summary = format!(
        "δ ≤ {worst_delta:.6} on the {measured} pentagons where it exists; reduce_to_acute: {reduced} outputs acute with φ monotone, {failed} inputs without a valid surgery"
    );
    if missed > 0 {
        return Ok(Status::KnownGap(format!(
            "in {missed} of {admissible} pentagons meeting the lemma's hypotheses, line FP misses line ED, so G and δ do not exist; {summary}"
        )));
    }
    Ok(Status::Pass(summary))
}

fn simulation_structure() -> Outcome {
    let p = build(&PolygonSpec::uniform(4, Some(2))).map_err(|e| e.to_string())?;
    let gens = side_pairings(&p);
    let uniform = StepDistribution::uniform(MeasureKind::Free, 4).map_err(|e| e.to_string())?;
    let one = with_threads(Some(1), || simulate(&gens, &uniform, 200, 2000, 77)).map_err(|e| e.to_string())?;
    let eight = with_threads(Some(8), || simulate(&gens, &uniform, 200, 2000, 77)).map_err(|e| e.to_string())?;
    ensure!(one == eight, "1 and 8 workers disagree");

    let dirac = StepDistribution::dirac(MeasureKind::Free, 4, 0).map_err(|e| e.to_string())?;
    let s = simulate(&gens, &dirac, 50, 10, 1).map_err(|e| e.to_string())?;
    let drift = estimate_drift(&s).map_err(|e| e.to_string())?;
    let l = gens[0].translation_length().map_err(|e| e.to_string())?;
    ensure!(close(drift.drift, l, 1e-9), "deterministic drift {} vs {l}", drift.drift);

    let h = entropy_upper_bounds(&uniform, &gens, 2).map_err(|e| e.to_string())?;
    let h2 = (0.125 * 8f64.ln() + 0.875 * 64f64.ln()) / 2.0;
    ensure!(close(h[0], 8f64.ln(), 1e-9) && close(h[0], 2.0794415, 5e-8), "H(μ) = {}", h[0]);
    ensure!(close(h[1], h2, 1e-9) && close(h[1], 1.9494764, 5e-8), "H(μ²)/2 = {}", h[1]);
    let law = convolution_powers(&uniform, &gens, 2).map_err(|e| e.to_string())?;
    let identity = law[1].get(&Isometry::IDENTITY.key(KEY_RESOLUTION)).map(|e| e.1).unwrap_or(0.0);
    ensure!(close(identity * 64.0, 8.0, 1e-9), "identity mass {identity}");
    let survivors = law[1].len() - 1;
    ensure!(survivors == 56, "{survivors} non-identity elements");

    let sample = simulate(&gens, &uniform, 20, 20_000, 5).map_err(|e| e.to_string())?;
    let hist = boundary_histogram(&sample, 16).map_err(|e| e.to_string())?;
    let total: f64 = hist.frequencies.iter().sum();
    ensure!(close(total, 1.0, 1e-12), "frequencies sum to {total}");
    let outliers = hist.pi_rotation_outliers().ok_or("odd bin count")?;
    ensure!(outliers.is_empty(), "π-rotation outliers at bins {outliers:?}");
    ensure!(hist.quality_ok, "only {:.3} of paths settled", hist.settled_fraction);
    Ok(Status::Pass(format!(
        "1 vs 8 workers identical; drift {:.9} = ℓ; H/n = {:.7}, {:.7}; 8 identity collisions, 56 survivors; histogram symmetric",
        drift.drift, h[0], h[1]
    )))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("genus-2 regular octagon end to end", genus_two_octagon),
        ("right-angled regular octagon", right_angled_octagon),
        ("Coxeter hexagon and octagon", coxeter_polygons),
        ("main inequality on 500 random polygons", main_inequality_suite),
        ("optimization verifiers", optimization_verifiers),
        ("free-group first-passage solver", free_group_solver),
        ("witness computation", witness),
        ("dual polygon and redistribution", dual_polygon),
        ("pentagon surgery and reduction", pentagon_surgery_suite),
        ("simulation determinism and structure", simulation_structure),
    ];
    let (mut passed, mut gaps, mut failures) = (0, 0, 0);
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let n = i + 1;
        match outcome {
            Ok(Status::Pass(detail)) => {
                passed += 1;
                println!("criterion {n:>2} PASS [{secs:6.2} s] {name}: {detail}");
            }
            Ok(Status::KnownGap(detail)) => {
                gaps += 1;
                println!("criterion {n:>2} FAIL (known gap) [{secs:6.2} s] {name}: {detail}");
            }
            Err(reason) => {
                failures += 1;
                println!("criterion {n:>2} FAIL [{secs:6.2} s] {name}: {reason}");
            }
        }
    }
    println!(
        "acceptance: {passed} of {} criteria passed, {gaps} failed on a known gap, {failures} failed",
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
