//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p txnav --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use txnav::baseline::run_gradient_episode;
use txnav::episode::Outcome;
use txnav::gridfn::ValueGrid;
use txnav::harness::{run_and_write, Controller, ExperimentSpec, ParamGrid, PnOptions, PtOptions};
use txnav::llr::{LlrConfig, SampleStore};
use txnav::numopt::{integrate, nelder_mead, NelderMeadSettings};
use txnav::pn::{
    fit_snr, plan_time_optimal, run_pn_episode, FitSettings, KnownParams, PlanCase, PlannerSettings, PnSettings,
    RadialModel, SnrParams,
};
use txnav::pt::{dp_full, dp_sweep_local, model_based_values, run_pt_episode, DpConfig, ObstacleKnowledge, PtMode};
use txnav::rng::derive_seed;
use txnav::world::{FadingModel, Position, Scenario};

/// Known upper bound on the two-transmitter expected rate.
const RATE_MAX: f64 = 10.2;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, detail: String) -> Verdict {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

fn pt_learning_config(radius: usize) -> DpConfig {
    DpConfig { radius, rate_max: Some(RATE_MAX), ..DpConfig::default() }
}

fn random_free_start(scenario: &Scenario, rng: &mut ChaCha8Rng) -> Position {
    let d = scenario.domain;
    loop {
        let p = Position::new(rng.random_range(d.x[0]..=d.x[1]), rng.random_range(d.y[0]..=d.y[1]));
        if !scenario.in_obstacle(p) {
            return p;
        }
    }
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let sc = Scenario::builtin("pt-obstacles").unwrap().with_initial(Position::new(40.0, 150.0), 1000.0);
    let cfg = DpConfig::default();
    let (grid, report) = model_based_values(&sc, &cfg).unwrap();
    let log = run_pt_episode(&sc, &cfg, PtMode::ModelBased(&grid), 0).unwrap();
    let steps = log.steps() as f64;
    let el = t.elapsed();
    check(
        log.outcome == Outcome::Emptied && (steps - 49.0).abs() <= 0.25 * 49.0 && within(el, 120),
        format!("model-based PT: {steps} steps (target 49 +/- 25%), {} value iterations, {el:.1?}", report.iterations),
    )
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let base = Scenario::builtin("pt-obstacles").unwrap();
    let (grid, _) = model_based_values(&base, &DpConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ratios = Vec::new();
    let mut collisions = 0;
    for i in 0..15 {
        let sc = base.clone().with_initial(random_free_start(&base, &mut rng), 1000.0);
        let seed = derive_seed(2, 0, i);
        let mb = run_pt_episode(&sc, &DpConfig::default(), PtMode::ModelBased(&grid), seed).unwrap();
        let lr = run_pt_episode(&sc, &pt_learning_config(4), PtMode::Learning(LlrConfig::new(1)), seed).unwrap();
        collisions += mb.collisions + lr.collisions;
        assert!(mb.terminated() && lr.terminated());
        ratios.push(lr.steps() as f64 / mb.steps() as f64);
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[7];
    let el = t.elapsed();
    check(
        median <= 2.0 && collisions == 0 && within(el, 600),
        format!("learning/model-based PT median step ratio {median:.3} over 15 starts (<= 2), {collisions} collisions, {el:.1?}"),
    )
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let sc = Scenario::builtin("pt-obstacles").unwrap().with_initial(Position::new(10.0, 170.0), 1000.0);
    let steps: Vec<usize> = (1..=6)
        .map(|r| {
            let log = run_pt_episode(&sc, &pt_learning_config(r), PtMode::Learning(LlrConfig::new(1)), 0).unwrap();
            assert!(log.terminated());
            log.steps()
        })
        .collect();
    let best = *steps.iter().min().unwrap() as f64;
    let at4 = steps[3] as f64;
    let el = t.elapsed();
    check(
        at4 <= 1.15 * best && within(el, 600),
        format!("PT tuning N=1, r_DP 1..6 steps {steps:?}; r_DP=4 gives {at4} vs best {best} (<= +15%), {el:.1?}"),
    )
}

fn criterion_4() -> Verdict {
    let t = Instant::now();
    let sc = Scenario::builtin("pt-obstacles").unwrap().with_initial(Position::new(10.0, 170.0), 1000.0);
    let cfg = pt_learning_config(6);
    let llr = PtMode::Learning(LlrConfig::new(1));
    let deterministic = run_pt_episode(&sc.clone().with_fading(None).unwrap(), &cfg, llr, 0).unwrap().steps() as f64;
    let faded = sc.with_fading(Some(15.0)).unwrap();
    let mut total = 0.0;
    let mut all_done = true;
    for run in 0..20 {
        let log = run_pt_episode(&faded, &cfg, llr, derive_seed(4, 0, run)).unwrap();
        all_done &= log.terminated();
        total += log.steps() as f64;
    }
    let mean = total / 20.0;
    let el = t.elapsed();
    check(
        all_done && mean <= 1.5 * deterministic && within(el, 600),
        format!("PT with fading v=15: mean {mean:.2} steps vs deterministic {deterministic} (<= 1.5x), all terminated: {all_done}, {el:.1?}"),
    )
}

fn pn_model_based_steps() -> (usize, Option<usize>, Outcome) {
    let sc = Scenario::builtin("pn-single")
        .unwrap()
        .with_fading(None)
        .unwrap()
        .with_initial(Position::new(30.0, 140.0), 250.0);
    let log = run_pn_episode(&sc, &PnSettings::model_based(), 0).unwrap();
    (log.steps(), log.emptied_at, log.outcome)
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let (steps, emptied, outcome) = pn_model_based_steps();
    let el = t.elapsed();
    let ok = outcome == Outcome::ReachedGoal
        && (steps as f64 - 57.0).abs() <= 0.2 * 57.0
        && emptied.is_some_and(|k| k <= steps)
        && within(el, 60);
    check(
        ok,
        format!(
            "model-based PN: goal in {steps} steps (target 57 +/- 20%), buffer empty at step {emptied:?}, {el:.1?}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let t = Instant::now();
    let (reference, _, _) = pn_model_based_steps();
    let sc = Scenario::builtin("pn-single")
        .unwrap()
        .with_fading(Some(15.0))
        .unwrap()
        .with_initial(Position::new(30.0, 140.0), 250.0);
    let mut steps = Vec::new();
    let mut reached = 0;
    for run in 0..30 {
        let log = run_pn_episode(&sc, &PnSettings::learning(), derive_seed(6, 0, run)).unwrap();
        if log.outcome == Outcome::ReachedGoal && log.steps() <= 1000 {
            reached += 1;
        }
        steps.push(log.steps() as f64);
    }
    let mean = steps.iter().sum::<f64>() / 30.0;
    let el = t.elapsed();
    check(
        reached == 30 && mean <= 3.0 * reference as f64 && within(el, 900),
        format!("learning PN v=15: {reached}/30 reached the goal, mean {mean:.1} steps vs 3 x {reference} allowed, {el:.1?}"),
    )
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let base = Scenario::builtin("pn-single").unwrap().with_fading(Some(15.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut wins = 0;
    let mut lines = Vec::new();
    for start in 0..5 {
        let sc = base.clone().with_initial(random_free_start(&base, &mut rng), 250.0);
        let (mut learn, mut grad) = (0.0, 0.0);
        for run in 0..30 {
            let seed = derive_seed(7, start, run);
            learn += run_pn_episode(&sc, &PnSettings::learning(), seed).unwrap().steps() as f64 / 30.0;
            grad += run_gradient_episode(&sc, &LlrConfig::new(3), seed).unwrap().steps() as f64 / 30.0;
        }
        if learn < grad {
            wins += 1;
        }
        lines.push(format!("{learn:.1}<{grad:.1}"));
    }
    let el = t.elapsed();
    check(
        wins >= 4 && within(el, 1800),
        format!("learning PN vs gradient mean steps per start [{}]: {wins}/5 wins (>= 4), {el:.1?}", lines.join(", ")),
    )
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let sc = Scenario::builtin("pn-single").unwrap();
    let truth = *sc.rate.single_antenna().unwrap();
    let model = RadialModel::new(truth, sc.max_speed()).unwrap();
    let ant = truth.position;
    let settings = PlannerSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let point = |rng: &mut ChaCha8Rng| Position::new(rng.random_range(0.0..=200.0), rng.random_range(0.0..=200.0));

    let mut sym = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (point(&mut rng), point(&mut rng));
        sym = sym.max((model.segment(a, b) - model.segment(b, a)).abs());
    }

    let (p0, goal) = (Position::new(30.0, 140.0), Position::new(160.0, 160.0));
    let small = model.segment(p0, goal);
    let large = model.segment(p0, ant) + model.segment(ant, goal);
    let straight = p0.distance(goal);
    let via = p0.distance(ant) + ant.distance(goal);
    let time = |b: f64| plan_time_optimal(p0, b, goal, &model, &settings).unwrap().time;
    let continuity = [
        (time(small * (1.0 - 1e-6)) - straight).abs(),
        (time(small * (1.0 + 1e-6)) - straight).abs(),
        (time(large * (1.0 - 1e-6)) - via).abs(),
        (time(large * (1.0 + 1e-6)) - via).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let sweep: Vec<f64> = (0..50).map(|i| time(1.2 * large * i as f64 / 49.0)).collect();
    let monotone = sweep.windows(2).all(|w| w[1] >= w[0]);

    let mut sandwich_ok = true;
    let mut feasible_ok = true;
    let mut intermediate = 0;
    for _ in 0..100 {
        let (p, g) = (point(&mut rng), point(&mut rng));
        let hi = model.segment(p, ant) + model.segment(ant, g);
        let b0 = rng.random_range(0.0..=1.2 * hi);
        let plan = plan_time_optimal(p, b0, g, &model, &settings).unwrap();
        let lower = p.distance(g);
        let upper = p.distance(ant) + ant.distance(g);
        if plan.case == PlanCase::Intermediate {
            intermediate += 1;
            sandwich_ok &= plan.time >= lower - 1e-9 && plan.time <= upper + 1e-9;
            feasible_ok &= model.polyline(&plan.path) >= b0 * (1.0 - 1e-6);
        }
    }
    let el = t.elapsed();
    check(
        sym <= 1e-9 && continuity <= 1e-3 && monotone && sandwich_ok && feasible_ok && within(el, 120),
        format!(
            "planner: symmetry {sym:.1e}, boundary gap {continuity:.1e}, monotone {monotone}, sandwich {sandwich_ok}, feasible {feasible_ok} ({intermediate} intermediate of 100), {el:.1?}"
        ),
    )
}

fn criterion_9() -> Verdict {
    let t = Instant::now();
    let mut worst_mean = 0.0f64;
    let mut inside = 0.0;
    for v in [0.0, 5.0, 10.0, 15.0, 20.0, 30.0] {
        let f = FadingModel::new(v).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut hits = 0usize;
        for _ in 0..n {
            let z = f.sample(&mut rng);
            sum += z;
            hits += usize::from((0.7..=1.3).contains(&z));
        }
        worst_mean = worst_mean.max((sum / n as f64 - 1.0).abs());
        if v == 15.0 {
            inside = hits as f64 / n as f64;
        }
    }

    let mut quad_err = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for degree in 0..=5 {
        let c: Vec<f64> = (0..=degree).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (a, b) = (-1.3, 2.7);
        let poly = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
        let anti =
            |x: f64| c.iter().enumerate().map(|(i, ci)| ci * x.powi(i as i32 + 1) / (i as f64 + 1.0)).sum::<f64>();
        let got = integrate(poly, a, b, 1e-12).unwrap();
        quad_err = quad_err.max((got - (anti(b) - anti(a))).abs());
    }

    let mut nm_err = 0.0f64;
    for _ in 0..10 {
        let target: Vec<f64> = (0..3).map(|_| rng.random_range(-4.0..4.0)).collect();
        let weights: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..5.0)).collect();
        let f = |x: &[f64]| x.iter().zip(&target).zip(&weights).map(|((x, t), w)| w * (x - t).powi(2)).sum::<f64>();
        let settings = NelderMeadSettings::new(vec![-5.0; 3], vec![5.0; 3]).with_tolerances(1e-12, 1e-10);
        let m = nelder_mead(f, &[0.0, 0.0, 0.0], &settings).unwrap();
        let inside_box = m.point.iter().all(|x| (-5.0..=5.0).contains(x));
        let err = m.point.iter().zip(&target).map(|(x, t)| (x - t).abs()).fold(0.0, f64::max);
        nm_err = nm_err.max(if inside_box { err } else { f64::INFINITY });
    }
    let el = t.elapsed();
    check(
        worst_mean <= 0.005 && inside >= 0.95 && quad_err <= 1e-8 && nm_err <= 1e-3 && within(el, 60),
        format!(
            "kernels: worst |E z - 1| {worst_mean:.2e}, P(0.7<=z<=1.3 | v=15) {inside:.4}, quadrature error {quad_err:.1e}, Nelder-Mead error {nm_err:.1e}, {el:.1?}"
        ),
    )
}

fn criterion_10() -> Verdict {
    let t = Instant::now();
    let sc = Scenario::builtin("pt-obstacles").unwrap();
    let cfg = DpConfig { grid_points: vec![5, 5, 5], max_iterations: Some(60), tolerance: 0.0, ..DpConfig::default() };
    let axes = |n: usize| ValueGrid::linspace(0.0, 200.0, n);
    let mut full = ValueGrid::new(vec![axes(5), axes(5), ValueGrid::linspace(0.0, 1000.0, 5)]).unwrap();
    let mut local = full.clone();
    let rate = |p: Position| sc.rate.expected_rate(p);
    let report = dp_full(&mut full, &sc, rate, &cfg).unwrap();
    let sub = local.full_subgrid();
    dp_sweep_local(&mut local, &sub, &sc, rate, report.iterations, ObstacleKnowledge::FullMap).unwrap();
    let identical = full.theta.iter().zip(&local.theta).all(|(a, b)| a.to_bits() == b.to_bits());

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut llr_err = 0.0f64;
    for n in [3, 4, 6, 10] {
        let cfg = LlrConfig::new(n);
        let (a, b, c) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-5.0..5.0));
        let field = |p: Position| a * p.x + b * p.y + c;
        let mut store = SampleStore::new();
        for _ in 0..20 {
            let p = Position::new(rng.random_range(0.0..200.0), rng.random_range(0.0..200.0));
            store.add_sample(p, field(p), &cfg);
        }
        for _ in 0..20 {
            let q = Position::new(rng.random_range(0.0..200.0), rng.random_range(0.0..200.0));
            llr_err = llr_err.max((store.estimate(q, &cfg).unwrap() - field(q)).abs());
        }
    }

    let pn = Scenario::builtin("pn-single").unwrap();
    let truth = *pn.rate.single_antenna().unwrap();
    let fit_error = |rng: &mut ChaCha8Rng| {
        let samples: Vec<(Position, f64)> = (0..50)
            .map(|_| {
                let p = Position::new(rng.random_range(0.0..=200.0), rng.random_range(0.0..=200.0));
                (p, truth.snr(p))
            })
            .collect();
        let start = SnrParams::initial_guess(&truth, KnownParams::POSITION_AND_OFFSET);
        fit_snr(&samples, &start, &pn.domain, &FitSettings::tight()).antenna.distance(truth.position)
    };
    let pos_err = fit_error(&mut rng);
    // Not part of the pass condition: how often other sample sets are recovered.
    let mut other = ChaCha8Rng::seed_from_u64(1010);
    let recovered = (0..40).filter(|_| fit_error(&mut other) < 1.0).count();
    let el = t.elapsed();
    check(
        identical && llr_err <= 1e-9 && pos_err < 1.0 && within(el, 60),
        format!(
            "oracles: local sweeps == full DP bit-for-bit {identical} ({} iterations), LLR affine error {llr_err:.1e}, fitted antenna off by {pos_err:.2e} m ({recovered}/40 other sample sets recovered), {el:.1?}",
            report.iterations
        ),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_11() -> Verdict {
    let t = Instant::now();
    let specs = [
        ExperimentSpec {
            name: "pn".into(),
            scenario: "pn-single".into(),
            controller: Controller::LearningPn,
            runs: 4,
            seed: 11,
            out: None,
            grid: ParamGrid {
                rice_v: vec![5.0, 15.0],
                random_starts: 2,
                random_buffer: Some(250.0),
                ..ParamGrid::default()
            },
            pt: PtOptions::default(),
            pn: PnOptions::default(),
        },
        ExperimentSpec {
            name: "pt".into(),
            scenario: "pt-obstacles".into(),
            controller: Controller::LearningPt,
            runs: 2,
            seed: 11,
            out: None,
            grid: ParamGrid { radius: vec![2, 4], rice_v: vec![15.0], ..ParamGrid::default() },
            pt: PtOptions { rate_max: Some(RATE_MAX), ..PtOptions::default() },
            pn: PnOptions::default(),
        },
        ExperimentSpec {
            name: "gradient".into(),
            scenario: "pt-free".into(),
            controller: Controller::Gradient,
            runs: 3,
            seed: 11,
            out: None,
            grid: ParamGrid { neighbors: vec![3], rice_v: vec![15.0], ..ParamGrid::default() },
            pt: PtOptions::default(),
            pn: PnOptions::default(),
        },
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut identical = true;
    for spec in &specs {
        run_and_write(spec, &a.path().join(&spec.name), Some(1)).unwrap();
        run_and_write(spec, &b.path().join(&spec.name), None).unwrap();
    }
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    identical &= ta == tb;
    files += ta.len();
    let el = t.elapsed();
    check(
        identical && files > 0 && within(el, 120),
        format!("determinism: {files} files byte-identical across repeats: {identical}, {el:.1?}"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
        ("11", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {id}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
