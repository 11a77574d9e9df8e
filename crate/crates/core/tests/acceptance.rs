//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use ccus_plan::engine::{
    build_model, expected_cost_of_first_stage, solve_deterministic, solve_no_ccus, solve_robust,
    solve_stochastic, Mode, PlanningRequest, RobustMethod, UncertaintySpec,
};
use ccus_plan::formulation::compute_breakpoints;
use ccus_plan::instance::annualization_coefficient;
use ccus_plan::milp::HighsSolver;
use ccus_plan::oracle::{enumerate_optimum, OracleOptions, DEFAULT_BUDGET};
use ccus_plan::sweep::{parse_axis, run_sweep, SweepGrid, SweepMode};
use ccus_plan::{builtin_instance, PlanningInstance, PlanningOptions, PlanningSolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const ORACLE_REL_TOL: f64 = 1e-6;
const ORACLE_TIME: Duration = Duration::from_secs(60);
const ROBUST_REL_TOL: f64 = 1e-6;
const ROBUST_TIME: Duration = Duration::from_secs(120);
const REGION_TIME: Duration = Duration::from_secs(300);
const SOLVER_GAP: f64 = 1e-6;
const STOCH_REL_TOL: f64 = 1e-6;
const CARBON_TOL: f64 = 1e-6;
const EMISSION_FACTOR: f64 = 1.005;
const PWL_SAMPLES: usize = 1000;
const UC_SCHEDULES: usize = 100;
const ANNUALIZATION_TOL: f64 = 1e-6;
const DOMINANCE_PAIRS: usize = 10;
const SEED: u64 = 0x5eed_cc05;

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
    /// Every solution produced along the way, for the schedule checks.
    solved: Vec<PlanningSolution>,
}

impl Suite {
    fn record(&mut self, name: &str, outcome: Outcome) {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
}

fn opts() -> PlanningOptions {
    PlanningOptions::default().with_gap(SOLVER_GAP)
}

fn toy() -> PlanningInstance {
    builtin_instance("toy3-ccus").expect("builtin toy")
}

fn rel_delta(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn oracle_equivalence(suite: &mut Suite) -> Outcome {
    let start = Instant::now();
    let inst = toy();
    let sol = solve_deterministic(&inst, 50.0, 40.0, &HighsSolver, &opts().with_gap(1e-9)).map_err(|e| e.to_string())?;
    let request = PlanningRequest::Deterministic { tax: 50.0, price: 40.0 };
    let built = build_model(&inst, &request, &opts()).map_err(|e| e.to_string())?;
    let report = enumerate_optimum(built.model(), &HighsSolver, &OracleOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let best = report.best_objective.ok_or("oracle found no feasible assignment")?;
    let delta = rel_delta(best, sol.total());
    suite.solved.push(sol);
    let detail = format!(
        "oracle {best:.6} over {} assignments (limit {DEFAULT_BUDGET}), rel delta {delta:.2e}, {:.1}s",
        report.reduced_product,
        elapsed.as_secs_f64()
    );
    if report.reduced_product <= DEFAULT_BUDGET && delta <= ORACLE_REL_TOL && elapsed < ORACLE_TIME {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn robust_worst_corner(suite: &mut Suite) -> Outcome {
    let start = Instant::now();
    let inst = toy();
    let spec = UncertaintySpec::Box {
        tax_range: (1.0, 120.0),
        price_range: (1.0, 80.0),
    };
    let mut totals = Vec::new();
    let mut corners = Vec::new();
    for method in [RobustMethod::Corner, RobustMethod::VertexEpigraph] {
        let sol = solve_robust(&inst, &spec, method, &HighsSolver, &opts()).map_err(|e| format!("{method:?}: {e}"))?;
        totals.push(sol.total());
        corners.push(sol.worst_corner);
        suite.solved.push(sol);
    }
    let elapsed = start.elapsed();
    let delta = rel_delta(totals[0], totals[1]);
    let detail = format!("corners {corners:?}, rel delta {delta:.2e}, {:.1}s", elapsed.as_secs_f64());
    if corners.iter().all(|c| *c == Some((120.0, 1.0))) && delta <= ROBUST_REL_TOL && elapsed < ROBUST_TIME {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn no_investment_region() -> Outcome {
    let start = Instant::now();
    let taxes = [0.0, 30.0, 60.0, 90.0, 120.0];
    let prices = [0.0, 20.0, 40.0, 60.0, 80.0];
    let grid = run_sweep(&toy(), &taxes, &prices, SweepMode::Deterministic, &HighsSolver, &opts(), 0)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let region: Vec<_> = grid.cells.iter().filter(|c| c.price > c.tax).collect();
    let bad: Vec<_> = region
        .iter()
        .filter(|c| c.y_sum != Some(0))
        .map(|c| (c.tax, c.price, c.y_sum))
        .collect();
    let investing = grid.cells.iter().filter(|c| c.y_sum.is_some_and(|y| y > 0)).count();
    let detail = format!(
        "{} cells with price > tax, {} investing cells elsewhere, offenders {bad:?}, {:.1}s",
        region.len(),
        investing,
        elapsed.as_secs_f64()
    );
    if bad.is_empty() && elapsed < REGION_TIME {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn monotonicity_violations(grid: &SweepGrid) -> Vec<String> {
    let slack = |v: f64| 2.0 * SOLVER_GAP * v.abs();
    let mut out = Vec::new();
    let (nt, np) = (grid.tax_axis.len(), grid.price_axis.len());
    for i in 0..nt {
        for j in 0..np {
            let Some(here) = grid.cell(i, j).total_cost else {
                out.push(format!("unsolved cell ({i},{j})"));
                continue;
            };
            if i + 1 < nt {
                if let Some(next) = grid.cell(i + 1, j).total_cost {
                    if next < here - slack(here) {
                        out.push(format!("tax step at ({i},{j}): {here} -> {next}"));
                    }
                }
            }
            if j + 1 < np {
                if let Some(next) = grid.cell(i, j + 1).total_cost {
                    if next > here + slack(here) {
                        out.push(format!("price step at ({i},{j}): {here} -> {next}"));
                    }
                }
            }
        }
    }
    out
}

fn monotonicity() -> Outcome {
    let taxes = parse_axis("0:120:10").map_err(|e| e.to_string())?;
    let prices = parse_axis("0:80:10").map_err(|e| e.to_string())?;
    let grid = run_sweep(&toy(), &taxes, &prices, SweepMode::Deterministic, &HighsSolver, &opts(), 0)
        .map_err(|e| e.to_string())?;
    let bad = monotonicity_violations(&grid);
    let detail = format!("{}x{} grid, {} violations {:?}", taxes.len(), prices.len(), bad.len(), bad);
    if bad.is_empty() && grid.cells.len() == 117 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn stochastic_bounds(suite: &mut Suite) -> Outcome {
    let inst = toy();
    let err = |e: ccus_plan::PlanningError| e.to_string();
    let mut worst = 0.0_f64;
    for (tax, price) in [(50.0, 40.0), (120.0, 1.0), (60.0, 5.0)] {
        let det = solve_deterministic(&inst, tax, price, &HighsSolver, &opts()).map_err(err)?;
        let sto = solve_stochastic(&inst, &UncertaintySpec::single(tax, price), &HighsSolver, &opts()).map_err(err)?;
        worst = worst.max(rel_delta(det.total(), sto.total()));
        suite.solved.push(det);
        suite.solved.push(sto);
    }
    let grid = UncertaintySpec::default_grid();
    let rp = solve_stochastic(&inst, &grid, &HighsSolver, &opts()).map_err(err)?;
    let (mt, mp) = grid.mean();
    let mean = solve_deterministic(&inst, mt, mp, &HighsSolver, &opts()).map_err(err)?;
    let eev = expected_cost_of_first_stage(&inst, &mean.first_stage, &grid, &HighsSolver, &opts(), 0).map_err(err)?;
    let vss = eev - rp.total();
    let allowance = SOLVER_GAP * rp.total().abs();
    let detail = format!(
        "degenerate rel delta {worst:.2e}; RP {:.6}, EEV {eev:.6} (mean {mt}, {mp}), VSS {vss:.6}",
        rp.total()
    );
    suite.solved.push(rp);
    suite.solved.push(mean);
    if worst <= STOCH_REL_TOL && vss >= -allowance {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn series<'a>(schedule: &'a std::collections::BTreeMap<String, Vec<f64>>, key: &str) -> Result<&'a [f64], String> {
    schedule.get(key).map(Vec::as_slice).ok_or_else(|| format!("missing series {key}"))
}

fn carbon_conservation(suite: &Suite) -> Outcome {
    let mut checked = 0usize;
    let mut worst = 0.0_f64;
    let mut bad = Vec::new();
    for sol in &suite.solved {
        let ccpps: Vec<_> = sol.instance.generators.iter().filter(|g| g.ccpp_eligible).collect();
        for g in &ccpps {
            if g.emission_factor != EMISSION_FACTOR {
                bad.push(format!("{} has emission factor {}", g.id, g.emission_factor));
            }
        }
        if sol.mode == Mode::NoCcus {
            continue;
        }
        for sc in &sol.scenarios {
            for g in &ccpps {
                let id = &g.id;
                let p = series(&sc.schedule, &format!("P[{id}]"))?;
                let cc = series(&sc.schedule, &format!("Qcc[{id}]"))?;
                let cs = series(&sc.schedule, &format!("Qcs[{id}]"))?;
                let cu = series(&sc.schedule, &format!("Qcu[{id}]"))?;
                for t in 0..p.len() {
                    let emi = EMISSION_FACTOR * p[t];
                    let residuals = [
                        (cc[t] - cs[t] - cu[t]).abs(),
                        (-cc[t]).max(0.0),
                        (cc[t] - emi).max(0.0),
                    ];
                    let r = residuals.iter().copied().fold(0.0, f64::max);
                    worst = worst.max(r);
                    if r > CARBON_TOL {
                        bad.push(format!("{:?} {id} t{}: {residuals:?}", sol.mode, t + 1));
                    }
                    checked += 1;
                }
            }
        }
    }
    let detail = format!("{checked} plant-hours over {} solutions, worst residual {worst:.2e}", suite.solved.len());
    if bad.is_empty() && checked > 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; {bad:?}"))
    }
}

/// `f·|f|` interpolated between the breakpoints at fill levels `delta`.
fn chord_image(points: &[f64], delta: &[f64]) -> (f64, f64) {
    let g = |f: f64| f * f.abs();
    let mut flow = points[0];
    let mut image = g(points[0]);
    for (k, d) in delta.iter().enumerate() {
        flow += d * (points[k + 1] - points[k]);
        image += d * (g(points[k + 1]) - g(points[k]));
    }
    (flow, image)
}

fn pwl_certificate(suite: &Suite, rng: &mut ChaCha8Rng) -> Outcome {
    let inst = toy();
    let mut violations = 0usize;
    let mut samples = 0usize;
    let mut worst_ratio = 0.0_f64;
    for pipe in &inst.gas_pipelines {
        let points = compute_breakpoints(pipe, inst.pwl_segments).points;
        let k = points.len() - 1;
        let widest = points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let bound = widest * widest / 4.0;
        let mut check = |delta: &[f64]| {
            let (flow, image) = chord_image(&points, delta);
            let err = (image - flow * flow.abs()).abs();
            worst_ratio = worst_ratio.max(err / bound);
            if err > bound * (1.0 + 1e-9) {
                violations += 1;
            }
            samples += 1;
        };
        // Feasible incremental points: phi_k = 1 up to the active segment.
        for _ in 0..PWL_SAMPLES {
            let active = rng.gen_range(0..k);
            let theta: f64 = rng.gen();
            let delta: Vec<f64> = (0..k)
                .map(|s| match s.cmp(&active) {
                    std::cmp::Ordering::Less => 1.0,
                    std::cmp::Ordering::Equal => theta,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect();
            check(&delta);
        }
        for sol in &suite.solved {
            for sc in &sol.scenarios {
                let cols: Option<Vec<&Vec<f64>>> =
                    (1..=k).map(|s| sc.schedule.get(&format!("delta[{},k{s}]", pipe.id))).collect();
                let Some(cols) = cols else { continue };
                for t in 0..cols[0].len() {
                    let delta: Vec<f64> = cols.iter().map(|c| c[t].clamp(0.0, 1.0)).collect();
                    check(&delta);
                }
            }
        }
    }
    let detail = format!(
        "{samples} points over {} pipelines, {violations} violations, worst error {:.3} of bound",
        inst.gas_pipelines.len(),
        worst_ratio
    );
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Run-length check of a cold-started commitment: every run that starts
/// inside the horizon lasts its minimum length or reaches the end.
fn uc_violations(u: &[f64], v: &[f64], w: &[f64], min_up: usize, min_down: usize) -> Vec<String> {
    let mut out = Vec::new();
    let on: Vec<bool> = u.iter().map(|&x| x > 0.5).collect();
    for t in 0..on.len() {
        let prev = t > 0 && on[t - 1];
        let (start, stop) = (on[t] && !prev, !on[t] && prev);
        if (v[t] > 0.5) != start || (w[t] > 0.5) != stop {
            out.push(format!("switch flags at t{}", t + 1));
        }
        if (u[t] - u[t].round()).abs() > 1e-6 {
            out.push(format!("fractional commitment at t{}", t + 1));
        }
    }
    let mut t = 0;
    while t < on.len() {
        let state = on[t];
        let begin = t;
        while t < on.len() && on[t] == state {
            t += 1;
        }
        let length = t - begin;
        let reaches_end = t == on.len();
        let initial_off = begin == 0 && !state;
        let need = if state { min_up } else { min_down };
        if !reaches_end && !initial_off && length < need {
            out.push(format!("{} run of {length}h from t{} (min {need})", if state { "on" } else { "off" }, begin + 1));
        }
    }
    out
}

fn uc_validity(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Outcome {
    let base = toy();
    let mut checked = 0usize;
    let mut attempts = 0usize;
    let mut switching = 0usize;
    let mut bad = Vec::new();
    while checked < UC_SCHEDULES && attempts < 4 * UC_SCHEDULES {
        attempts += 1;
        let mut inst = base.clone();
        let scale: f64 = rng.gen_range(0.3..1.0);
        for bus in &mut inst.buses {
            for x in &mut bus.load.0 {
                *x *= scale * rng.gen_range(0.5..1.5);
            }
        }
        for g in &mut inst.generators {
            g.min_up = rng.gen_range(1..=4);
            g.min_down = rng.gen_range(1..=4);
        }
        let tax = rng.gen_range(0.0..120.0);
        let price = rng.gen_range(0.0..80.0);
        let Ok(sol) = solve_deterministic(&inst, tax, price, &HighsSolver, &opts()) else {
            continue;
        };
        let sc = &sol.scenarios[0];
        for g in &inst.generators {
            let id = &g.id;
            let u = series(&sc.schedule, &format!("u[{id}]"))?;
            let v = series(&sc.schedule, &format!("v[{id}]"))?;
            let w = series(&sc.schedule, &format!("w[{id}]"))?;
            if v.iter().chain(w).filter(|x| **x > 0.5).count() > 1 {
                switching += 1;
            }
            for e in uc_violations(u, v, w, g.min_up as usize, g.min_down as usize) {
                bad.push(format!("{id} (up {}, down {}): {e}", g.min_up, g.min_down));
            }
        }
        checked += 1;
        suite.solved.push(sol);
    }
    let detail = format!(
        "{checked} schedules from {attempts} random variants, {switching} unit schedules with cycling, {} violations",
        bad.len()
    );
    if checked == UC_SCHEDULES && bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {bad:?}"))
    }
}

fn annualization() -> Outcome {
    let (r, n) = (0.08_f64, 20);
    let growth = (1.0 + r).powi(n);
    let closed_form = r * growth / (growth - 1.0);
    let value = annualization_coefficient(r, n as u32);
    let detail = format!("{value:.9} vs closed form {closed_form:.9}, expected 0.101852");
    if (value - 0.101852).abs() <= ANNUALIZATION_TOL && (value - closed_form).abs() <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn superset_dominance(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Outcome {
    let inst = toy();
    let mut bad = Vec::new();
    let mut strict = 0usize;
    for _ in 0..DOMINANCE_PAIRS {
        let tax = rng.gen_range(0.0..120.0_f64).round();
        let price = rng.gen_range(0.0..80.0_f64).round();
        let with = solve_deterministic(&inst, tax, price, &HighsSolver, &opts()).map_err(|e| e.to_string())?;
        let without = solve_no_ccus(&inst, tax, &HighsSolver, &opts()).map_err(|e| e.to_string())?;
        if with.total() > without.total() + SOLVER_GAP * without.total().abs() {
            bad.push(format!("({tax}, {price}): {} > {}", with.total(), without.total()));
        }
        if with.total() < without.total() * (1.0 - SOLVER_GAP) {
            strict += 1;
        }
        suite.solved.push(with);
    }
    let detail = format!("{DOMINANCE_PAIRS} pairs, {strict} strictly cheaper with CCUS, violations {bad:?}");
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut suite = Suite {
        failed: 0,
        solved: Vec::new(),
    };
    let o = oracle_equivalence(&mut suite);
    suite.record("oracle_equivalence", o);
    let o = robust_worst_corner(&mut suite);
    suite.record("robust_worst_corner", o);
    suite.record("no_investment_region", no_investment_region());
    suite.record("monotonicity", monotonicity());
    let o = stochastic_bounds(&mut suite);
    suite.record("stochastic_bounds", o);
    let o = superset_dominance(&mut suite, &mut rng);
    suite.record("superset_dominance", o);
    let o = uc_validity(&mut suite, &mut rng);
    suite.record("uc_validity", o);
    let o = carbon_conservation(&suite);
    suite.record("carbon_conservation", o);
    let o = pwl_certificate(&suite, &mut rng);
    suite.record("pwl_certificate", o);
    suite.record("annualization", annualization());
    println!("{} failed", suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
