use std::fmt::Write as _;
use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cascade_rd::discrete::{
    brute_force_boundary, cascade_rates, coordination_rates, multiuser_rates,
    trace_boundary, triangular_inner_search, triangular_rates, CascadeChannel, MultiuserChannel,
    OptimizedPoint, OptimizerOptions, RatePoint, TriangularChannel, DEFAULT_LAMBDAS,
};
use cascade_rd::gaussian::{
    cascade_r1, case_thresholds, format_sig12, oracle_max_sigma_z2, sample_instance, sweep_r2,
    test_channel_params, CaseThresholds, GaussianCascadeInstance, GaussianCase,
    GaussianRegionPoint, GaussianTestChannel, OracleGrid,
};
use cascade_rd::geometry::{pareto_frontier, RateVector};
use cascade_rd::prob::{DistortionMatrix, JointPmf};

use crate::{Command, Failure, Format, RunConfig};

const DEFAULT_TRIANGULAR_STEP: f64 = 0.1;
const DEFAULT_U_SIZE: usize = 2;

type Outcome = Result<(), Failure>;

pub fn run(config: &RunConfig) -> Outcome {
    match config.command {
        Command::GaussianPoint => gaussian_point(config),
        Command::GaussianSweep => gaussian_sweep(config),
        Command::GaussianVerify => gaussian_verify(config),
        Command::DiscreteEval => discrete_eval(config),
        Command::DiscreteBoundary => discrete_boundary(config),
        Command::TriangularSearch => triangular_search(config),
        Command::CoordinationEval => coordination_eval(config),
        Command::Pareto => pareto(config),
    }
}

fn read_input<T: DeserializeOwned>(config: &RunConfig) -> Result<T, Failure> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| Failure::Invalid(format!("--input is required for {:?}", config.command)))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn emit(config: &RunConfig, text: &str) -> Outcome {
    match &config.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(config: &RunConfig, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Invalid(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    emit(config, &text)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| format_sig12(v)).collect::<Vec<_>>().join(",")
}

fn numbered(prefix: &str, n: usize) -> String {
    (1..=n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(",")
}

/// Report for a single Gaussian instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub instance: GaussianCascadeInstance,
    pub thresholds: CaseThresholds,
    pub point: GaussianRegionPoint,
    pub test_channel: Option<GaussianTestChannel>,
}

fn gaussian_point(config: &RunConfig) -> Outcome {
    let instance: GaussianCascadeInstance = read_input(config)?;
    let point = cascade_r1(&instance)?;
    let report = PointReport {
        instance,
        thresholds: case_thresholds(&instance),
        point,
        test_channel: test_channel_params(&instance).ok(),
    };
    match config.format {
        Format::Json => emit_json(config, &report),
        Format::Csv => {
            let p = &report.point;
            let t = &report.thresholds;
            let text = format!(
                "r1,r2,r3,case,sigma_x_given_wy,feasibility,transition\n{},{},{},{},{},{},{}\n",
                format_sig12(p.r1),
                format_sig12(p.r2),
                format_sig12(p.r3),
                p.case,
                format_sig12(p.sigma_x_given_wy),
                format_sig12(t.feasibility),
                format_sig12(t.transition),
            );
            emit(config, &text)
        }
    }
}

fn r2_grid(config: &RunConfig, start: f64) -> Result<Vec<f64>, Failure> {
    let (lo, hi, step) = (config.r2_min.unwrap_or(start), config.r2_max, config.r2_step);
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) || !(step > 0.0 && step.is_finite()) {
        return Err(Failure::Invalid(format!(
            "sweep range r2 in [{lo}, {hi}] with step {step} is not valid"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn gaussian_sweep(config: &RunConfig) -> Outcome {
    let template: GaussianCascadeInstance = read_input(config)?;
    let r2s = r2_grid(config, template.r2())?;
    let sweep = sweep_r2(&template, &r2s)?;
    match config.format {
        Format::Json => emit_json(config, &sweep),
        Format::Csv => emit(config, &sweep.to_csv()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub instance: GaussianCascadeInstance,
    pub case: GaussianCase,
    pub r1_closed: f64,
    pub r1_oracle: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub instances: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub rows: Vec<VerifyRow>,
}

fn gaussian_verify(config: &RunConfig) -> Outcome {
    if config.instances == 0 {
        return Err(Failure::Invalid("--instances must be positive".into()));
    }
    if !(config.tolerance >= 0.0) {
        return Err(Failure::Invalid(format!("tolerance {} is not valid", config.tolerance)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let instances: Vec<GaussianCascadeInstance> =
        (0..config.instances).map(|_| sample_instance(&mut rng)).collect();
    let grid = OracleGrid::default();
    let rows = instances
        .par_iter()
        .map(|inst| {
            let closed = cascade_r1(inst)?;
            let oracle = oracle_max_sigma_z2(inst, &grid)?;
            Ok(VerifyRow {
                instance: *inst,
                case: closed.case,
                r1_closed: closed.r1,
                r1_oracle: oracle.r1,
                deviation: (closed.r1 - oracle.r1).abs(),
            })
        })
        .collect::<Result<Vec<_>, cascade_rd::Error>>()?;
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let passed = max_deviation <= config.tolerance;
    let report = VerifyReport {
        seed: config.seed,
        instances: config.instances,
        tolerance: config.tolerance,
        max_deviation,
        passed,
        rows,
    };
    let summary = format!(
        "{}: {} instances, max |Δ| = {:.3e} bits {} {} bits",
        if passed { "PASS" } else { "FAIL" },
        report.instances,
        max_deviation,
        if passed { "≤" } else { ">" },
        report.tolerance
    );
    match config.format {
        Format::Json => emit_json(config, &report)?,
        Format::Csv => {
            let mut text = String::from(
                "sigma_x2,sigma_z2,d1,d2,r2,case,r1_closed,r1_oracle,deviation\n",
            );
            for r in &report.rows {
                let i = &r.instance;
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{},{},{}",
                    format_sig12(i.sigma_x2()),
                    format_sig12(i.sigma_z2()),
                    format_sig12(i.d1()),
                    format_sig12(i.d2()),
                    format_sig12(i.r2()),
                    r.case,
                    format_sig12(r.r1_closed),
                    format_sig12(r.r1_oracle),
                    format_sig12(r.deviation),
                );
            }
            let _ = writeln!(text, "# {summary}");
            emit(config, &text)?;
        }
    }
    eprintln!("{summary}");
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(summary))
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum EvalRequest {
    Cascade {
        pxy: JointPmf,
        d1: DistortionMatrix,
        d2: DistortionMatrix,
        channel: CascadeChannel,
    },
    Triangular {
        pxy: JointPmf,
        d1: DistortionMatrix,
        d2: DistortionMatrix,
        channel: TriangularChannel,
    },
    Multiuser {
        pxy: JointPmf,
        k: usize,
        l: usize,
        distortions: Vec<DistortionMatrix>,
        channel: MultiuserChannel,
    },
}

fn point_csv(points: &[RatePoint]) -> String {
    let (nr, nd) = points.first().map_or((0, 0), |p| (p.rates.len(), p.distortions.len()));
    let mut header = numbered("r", nr);
    if nd > 0 {
        header.push(',');
        header.push_str(&numbered("d", nd));
    }
    let mut text = header + "\n";
    for p in points {
        let mut row = join(&p.rates);
        if !p.distortions.is_empty() {
            row.push(',');
            row.push_str(&join(&p.distortions));
        }
        let _ = writeln!(text, "{row}");
    }
    text
}

fn emit_point(config: &RunConfig, point: &RatePoint) -> Outcome {
    match config.format {
        Format::Json => emit_json(config, point),
        Format::Csv => emit(config, &point_csv(std::slice::from_ref(point))),
    }
}

fn discrete_eval(config: &RunConfig) -> Outcome {
    let point = match read_input::<EvalRequest>(config)? {
        EvalRequest::Cascade { pxy, d1, d2, channel } => cascade_rates(&pxy, &channel, &d1, &d2)?,
        EvalRequest::Triangular { pxy, d1, d2, channel } => {
            triangular_rates(&pxy, &channel, &d1, &d2)?
        }
        EvalRequest::Multiuser { pxy, k, l, distortions, channel } => {
            multiuser_rates(&pxy, &channel, k, l, &distortions)?
        }
    };
    emit_point(config, &point)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordinationRequest {
    p0: JointPmf,
    target: CascadeChannel,
}

fn coordination_eval(config: &RunConfig) -> Outcome {
    let req: CoordinationRequest = read_input(config)?;
    emit_point(config, &coordination_rates(&req.p0, &req.target)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Problem {
    pxy: JointPmf,
    d1: DistortionMatrix,
    d2: DistortionMatrix,
    #[serde(rename = "D1")]
    max_d1: f64,
    #[serde(rename = "D2")]
    max_d2: f64,
    #[serde(default)]
    lambdas: Option<Vec<f64>>,
    #[serde(default)]
    u_size: Option<usize>,
}

/// Optimizer sweep and, when requested, the lattice oracle frontier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub optimizer: Vec<OptimizedPoint>,
    pub oracle: Option<Vec<RatePoint>>,
}

fn boundary_row(lambda: &str, p: &RatePoint, converged: bool) -> String {
    format!("{lambda},{},{},{converged}", join(&p.rates), join(&p.distortions))
}

fn boundary_header(rates: usize) -> String {
    format!("lambda,{},d1,d2,converged\n", numbered("r", rates))
}

fn no_lattice_point(problem: &Problem) -> Failure {
    Failure::Infeasible(format!(
        "no lattice channel meets D1 = {}, D2 = {}",
        problem.max_d1, problem.max_d2
    ))
}

fn discrete_boundary(config: &RunConfig) -> Outcome {
    let problem: Problem = read_input(config)?;
    let lambdas = config
        .lambdas
        .clone()
        .or_else(|| problem.lambdas.clone())
        .unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
    let optimizer = trace_boundary(
        &problem.pxy,
        &problem.d1,
        &problem.d2,
        problem.max_d1,
        problem.max_d2,
        &lambdas,
        &OptimizerOptions::default(),
    )?;
    let oracle = match config.grid_step {
        Some(step) => {
            let points = brute_force_boundary(
                &problem.pxy,
                &problem.d1,
                &problem.d2,
                problem.max_d1,
                problem.max_d2,
                step,
            )?;
            if points.is_empty() {
                return Err(no_lattice_point(&problem));
            }
            Some(points)
        }
        None => None,
    };
    let report = BoundaryReport { optimizer, oracle };
    match config.format {
        Format::Json => emit_json(config, &report),
        Format::Csv => {
            let mut text = boundary_header(2);
            for p in &report.optimizer {
                let _ = writeln!(text, "{}", boundary_row(&format_sig12(p.lambda), &p.point, p.converged));
            }
            for p in report.oracle.iter().flatten() {
                let _ = writeln!(text, "{}", boundary_row("oracle", p, true));
            }
            emit(config, &text)
        }
    }
}

fn triangular_search(config: &RunConfig) -> Outcome {
    let problem: Problem = read_input(config)?;
    let u_size = config.u_size.or(problem.u_size).unwrap_or(DEFAULT_U_SIZE);
    let step = config.grid_step.unwrap_or(DEFAULT_TRIANGULAR_STEP);
    let points = triangular_inner_search(
        &problem.pxy,
        &problem.d1,
        &problem.d2,
        problem.max_d1,
        problem.max_d2,
        u_size,
        step,
    )?;
    if points.is_empty() {
        return Err(no_lattice_point(&problem));
    }
    match config.format {
        Format::Json => emit_json(config, &points),
        Format::Csv => {
            let mut text = boundary_header(3);
            for p in &points {
                let _ = writeln!(text, "{}", boundary_row("search", p, true));
            }
            emit(config, &text)
        }
    }
}

/// Input and output of the `pareto` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSet {
    pub points: Vec<RateVector>,
}

fn pareto(config: &RunConfig) -> Outcome {
    let input: PointSet = read_input(config)?;
    let frontier = PointSet { points: pareto_frontier(&input.points)? };
    match config.format {
        Format::Json => emit_json(config, &frontier),
        Format::Csv => {
            let dim = frontier.points.first().map_or(0, RateVector::dim);
            let mut text = numbered("r", dim) + "\n";
            for p in &frontier.points {
                let _ = writeln!(text, "{}", join(p.coords()));
            }
            emit(config, &text)
        }
    }
}
