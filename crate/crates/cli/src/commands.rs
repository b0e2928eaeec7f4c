//! Subcommand implementations.

use std::fs::File;
use std::io::{Read, Write};

use rand::RngCore;
use serde::Serialize;
use serde_json::{json, Map, Value};
use spd_means::axioms::{check_alm_axioms, AxiomInputs, MeanSelector};
use spd_means::barycenter::{contractivity_check, wasserstein_coupling, DiscreteMeasure};
use spd_means::binary::{arithmetic_mean, harmonic_mean, riccati_residual};
use spd_means::linalg::{loewner_margin, DEFAULT_LOEWNER_SLACK};
use spd_means::metrics::{distance, npc_check, MetricTag, NPC_SLACK};
use spd_means::multi::{
    alm_mean, karcher_mean, karcher_via_power_limit, power_mean, weighted_arithmetic,
    weighted_harmonic, weighted_inductive_mean, yamazaki_check, SolverConfig,
};
use spd_means::random::{random_tuple, random_weight, rng_from_seed};
use spd_means::report::{Check, Tolerance};
use spd_means::stochastic::{deterministic_walk, sturm_walk, CheckpointValue, Recording};
use spd_means::{weighted_geometric, SpdMatrix, Weight};

use crate::input::{document_from_points, parse_input, Input};
use crate::{
    read_input, AxiomMean, Cli, CliError, Command, DistMetric, MeanKind, WalkTarget, EXIT_CHECKS,
    EXIT_OK,
};

#[derive(Serialize)]
struct Output<T: Serialize> {
    result: T,
    diagnostics: Value,
}

fn write_json(stdout: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

pub(crate) fn dispatch(
    cli: &Cli,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    match &cli.command {
        Command::Gen {
            dim,
            count,
            seed,
            spread,
        } => gen(*dim, *count, *seed, *spread, stdout),
        Command::Mean {
            kind,
            t,
            tol,
            max_iter,
        } => {
            let input = read_input(&cli.input, stdin)?;
            let cfg = solver_config(*tol, *max_iter)?;
            mean(&input, *kind, *t, &cfg, stdout)
        }
        Command::Dist { metric, other } => {
            let input = read_input(&cli.input, stdin)?;
            dist(&input, *metric, other.as_deref(), stdout)
        }
        Command::Walk {
            steps,
            seed,
            deterministic,
            target,
        } => {
            let input = read_input(&cli.input, stdin)?;
            walk(&input, *steps, *seed, *deterministic, *target, stdout)
        }
        Command::Axioms {
            mean,
            seed,
            trials,
            dim,
            n,
        } => axioms(*mean, *seed, *trials, *dim, *n, stdout),
        Command::Bench { schedule } => {
            let input = read_input(&cli.input, stdin)?;
            bench(&input, schedule, stdout)
        }
    }
}

fn solver_config(tol: Option<f64>, max_iter: Option<usize>) -> Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig::default();
    if let Some(tol) = tol {
        cfg.tol = tol;
    }
    if let Some(max_iter) = max_iter {
        cfg.max_iter = max_iter;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn gen(
    dim: usize,
    count: usize,
    seed: u64,
    spread: f64,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    if dim == 0 || count == 0 {
        return Err(CliError::Input("--dim and --count must be positive".into()));
    }
    if !spread.is_finite() {
        return Err(CliError::Input("--spread must be finite".into()));
    }
    let mut rng = rng_from_seed(seed);
    let points = random_tuple(count, dim, spread, &mut rng);
    let mut metadata = Map::new();
    metadata.insert("seed".into(), json!(seed));
    metadata.insert("spread".into(), json!(spread));
    write_json(stdout, &document_from_points(&points, Some(metadata)))?;
    Ok(EXIT_OK)
}

fn mean(
    input: &Input,
    kind: MeanKind,
    t: Option<f64>,
    cfg: &SolverConfig,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let (w, points) = (&input.weight, &input.points);
    let closed = |point: SpdMatrix, residual: f64| (point, 0usize, residual);
    let (point, iterations, residual) = match kind {
        MeanKind::Arithmetic => closed(weighted_arithmetic(w, points)?, 0.0),
        MeanKind::Harmonic => closed(weighted_harmonic(w, points)?, 0.0),
        MeanKind::Geometric => {
            if points.len() != 2 {
                return Err(CliError::Input(format!(
                    "the geometric mean takes two matrices, got {}",
                    points.len()
                )));
            }
            let g = weighted_geometric(&points[0], &points[1], w.entries()[1])?;
            let residual = if w.is_uniform() {
                riccati_residual(&points[0], &points[1], &g)?
            } else {
                0.0
            };
            closed(g, residual)
        }
        MeanKind::Alm => {
            if !w.is_uniform() {
                return Err(CliError::Input("the ALM mean needs uniform weights".into()));
            }
            let s = alm_mean(points, cfg)?;
            (s.point, s.iterations, s.residual)
        }
        MeanKind::Inductive => closed(weighted_inductive_mean(w, points)?, 0.0),
        MeanKind::Power => {
            let t =
                t.ok_or_else(|| CliError::Input("--t is required for the power mean".into()))?;
            let s = power_mean(t, w, points, cfg)?;
            (s.point, s.iterations, s.residual)
        }
        MeanKind::Karcher => {
            let s = karcher_mean(w, points, cfg)?;
            (s.point, s.iterations, s.residual)
        }
    };
    let kind_name = format!("{kind:?}").to_lowercase();
    write_json(
        stdout,
        &Output {
            result: point.to_rows(),
            diagnostics: json!({
                "kind": kind_name,
                "iterations": iterations,
                "residual": residual,
            }),
        },
    )?;
    Ok(EXIT_OK)
}

fn dist(
    input: &Input,
    metric: DistMetric,
    other: Option<&std::path::Path>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let tag = match metric {
        DistMetric::Riemannian => MetricTag::Riemannian,
        DistMetric::Thompson => MetricTag::Thompson,
        DistMetric::Wasserstein => {
            let path = other.ok_or_else(|| {
                CliError::Input("--other is required for the Wasserstein distance".into())
            })?;
            let file = File::open(path)
                .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
            let second = parse_input(file).map_err(CliError::Input)?;
            let mu = DiscreteMeasure::new(input.points.clone(), input.weight.entries().to_vec())?;
            let nu = DiscreteMeasure::new(second.points, second.weight.entries().to_vec())?;
            let coupling = wasserstein_coupling(&mu, &nu)?;
            write_json(
                stdout,
                &Output {
                    result: coupling.distance,
                    diagnostics: json!({ "metric": "wasserstein", "atoms": coupling.atoms }),
                },
            )?;
            return Ok(EXIT_OK);
        }
    };
    let n = input.points.len();
    let mut table = vec![vec![0.0; n]; n];
    for (i, a) in input.points.iter().enumerate() {
        for (j, b) in input.points.iter().enumerate().skip(i + 1) {
            let d = distance(tag, a, b)?;
            table[i][j] = d;
            table[j][i] = d;
        }
    }
    write_json(
        stdout,
        &Output {
            result: table,
            diagnostics: json!({ "metric": tag.to_string(), "count": n }),
        },
    )?;
    Ok(EXIT_OK)
}

/// Steps `1, 2, 5, 10, 20, 50, …` below `steps`, then `steps` itself.
pub fn checkpoint_schedule(steps: usize) -> Vec<usize> {
    let mut schedule = Vec::new();
    let mut scale = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let k = m * scale;
            if k >= steps {
                break 'outer;
            }
            schedule.push(k);
        }
        scale *= 10;
    }
    schedule.push(steps);
    schedule
}

fn walk(
    input: &Input,
    steps: usize,
    seed: Option<u64>,
    deterministic: bool,
    target: Option<WalkTarget>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    if steps == 0 {
        return Err(CliError::Input("--steps must be positive".into()));
    }
    let schedule = checkpoint_schedule(steps);
    let karcher = match target {
        Some(WalkTarget::Karcher) => {
            Some(karcher_mean(&input.weight, &input.points, &SolverConfig::default())?.point)
        }
        None => None,
    };
    let recording = match &karcher {
        Some(k) => Recording::Distance(k),
        None => Recording::Point,
    };
    let trace = if deterministic {
        deterministic_walk(&input.weight, &input.points, steps, &schedule, recording)?
    } else {
        let seed = seed.ok_or_else(|| {
            CliError::Input("--seed is required unless --deterministic is given".into())
        })?;
        sturm_walk(
            &input.weight,
            &input.points,
            steps,
            seed,
            &schedule,
            recording,
        )?
    };
    let mut writer = csv::Writer::from_writer(&mut *stdout);
    let dim = input.dim();
    let mut header = vec!["step".to_string()];
    if karcher.is_some() {
        header.push("distance".into());
    } else {
        for i in 0..dim {
            for j in 0..dim {
                header.push(format!("m{i}{j}"));
            }
        }
    }
    writer.write_record(&header)?;
    for c in &trace.checkpoints {
        let mut row = vec![c.step.to_string()];
        match &c.value {
            CheckpointValue::Distance(d) => row.push(d.to_string()),
            CheckpointValue::Point(p) => {
                row.extend(p.to_rows().iter().flatten().map(|x| x.to_string()))
            }
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(EXIT_OK)
}

/// One row of the axioms table, accumulated over trials.
struct Tally {
    name: String,
    worst: f64,
    tolerance: f64,
    passed: usize,
    total: usize,
}

fn tally(rows: &mut Vec<Tally>, check: &Check) {
    let row = match rows.iter_mut().find(|r| r.name == check.name) {
        Some(row) => row,
        None => {
            rows.push(Tally {
                name: check.name.clone(),
                worst: 0.0,
                tolerance: check.tolerance,
                passed: 0,
                total: 0,
            });
            rows.last_mut().expect("just pushed")
        }
    };
    row.worst = row.worst.max(check.residual);
    row.total += 1;
    if check.passed {
        row.passed += 1;
    }
}

/// The checks run by `axioms` for one trial.
pub fn axiom_trial(
    mean: MeanSelector,
    trial_seed: u64,
    dim: usize,
    n: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Check>, spd_means::Error> {
    let mut rng = rng_from_seed(trial_seed);
    let points = random_tuple(n, dim, 0.5, &mut rng);
    let weight = match mean {
        MeanSelector::Alm => Weight::uniform(n),
        MeanSelector::Karcher => random_weight(n, &mut rng),
    };
    let inputs = AxiomInputs::from_seed(weight.clone(), points.clone(), rng.next_u64())?;
    let mut checks = check_alm_axioms(&inputs, mean, cfg, Tolerance::default())?.checks;

    let triple = random_tuple(3, dim, 0.5, &mut rng);
    let npc = npc_check(&triple[0], &triple[1], &triple[2])?;
    checks.push(Check::flag(
        "NPC semiparallelogram law",
        (npc.lhs - npc.rhs).max(0.0),
        NPC_SLACK,
        npc.holds,
    ));

    let g = weighted_geometric(&points[0], &points[1], 0.5)?;
    let margin = loewner_margin(&harmonic_mean(&points[0], &points[1])?, &g)?.min(loewner_margin(
        &g,
        &arithmetic_mean(&points[0], &points[1])?,
    )?);
    checks.push(Check::order(
        "AGM inequality",
        margin,
        DEFAULT_LOEWNER_SLACK,
    ));

    let y = yamazaki_check(&weight, &points, cfg)?;
    let violation = if y.premise_holds {
        (-y.conclusion_margin).max(0.0)
    } else {
        0.0
    };
    checks.push(Check::flag(
        "Yamazaki implication",
        violation,
        spd_means::multi::YAMAZAKI_SLACK,
        y.implication_holds(),
    ));

    let mu = DiscreteMeasure::uniform(points)?;
    let nu = DiscreteMeasure::uniform(inputs.dominating.clone())?;
    let c = contractivity_check(&mu, &nu, cfg)?;
    checks.push(Check::flag(
        "barycenter contractivity",
        (c.lhs - c.rhs).max(0.0),
        spd_means::barycenter::CONTRACTIVITY_SLACK,
        c.holds,
    ));
    Ok(checks)
}

fn axioms(
    mean: AxiomMean,
    seed: u64,
    trials: usize,
    dim: usize,
    n: usize,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    if trials == 0 || dim == 0 || n < 2 {
        return Err(CliError::Input(
            "--trials and --dim must be positive and --n at least 2".into(),
        ));
    }
    let selector = match mean {
        AxiomMean::Alm => MeanSelector::Alm,
        AxiomMean::Karcher => MeanSelector::Karcher,
    };
    let cfg = SolverConfig::default();
    let mut seeds = rng_from_seed(seed);
    let mut rows = Vec::new();
    for _ in 0..trials {
        for check in axiom_trial(selector, seeds.next_u64(), dim, n, &cfg)? {
            tally(&mut rows, &check);
        }
    }
    writeln!(
        stdout,
        "{:<34} {:>14} {:>10} {:>9}  result",
        "check", "worst residual", "tolerance", "passed"
    )?;
    let mut failures = 0;
    for r in &rows {
        let ok = r.passed == r.total;
        if !ok {
            failures += 1;
        }
        writeln!(
            stdout,
            "{:<34} {:>14.3e} {:>10.1e} {:>9}  {}",
            r.name,
            r.worst,
            r.tolerance,
            format!("{}/{}", r.passed, r.total),
            if ok { "pass" } else { "FAIL" }
        )?;
    }
    writeln!(
        stdout,
        "mean={selector} seed={seed} trials={trials} dim={dim} n={n}: {}",
        if failures == 0 {
            "all checks passed".to_string()
        } else {
            format!("{failures} checks failed")
        }
    )?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_CHECKS })
}

fn bench(input: &Input, schedule: &[f64], stdout: &mut dyn Write) -> Result<i32, CliError> {
    let trace = karcher_via_power_limit(
        &input.weight,
        &input.points,
        &SolverConfig::default(),
        schedule,
    )?;
    let mut writer = csv::Writer::from_writer(&mut *stdout);
    writer.write_record(["t", "gap"])?;
    for (t, gap) in &trace.gaps {
        writer.write_record([t.to_string(), gap.to_string()])?;
    }
    writer.flush()?;
    Ok(EXIT_OK)
}
