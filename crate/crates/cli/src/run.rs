//! One CSV row per run point.

use std::f64::consts::FRAC_1_SQRT_2;

use dqd_sim::chain::{teleport_over_chain, ChainSpec};
use dqd_sim::evolve::RampDiagnostics;
use dqd_sim::metrics::concurrence;
use dqd_sim::protocol::{
    bell_evolution, couple_unknown, effective_bell_unitary, effective_rabi, encode_qubit, entangled_pair_reference, ghz_like,
    make_entangled_pair, teleport_end_to_end, wait_time, InputQubit, ProtocolParams, TeleportResult, ENCODER,
};
use dqd_sim::{fidelity, measure_qubit, MeasureMode, QubitId, Sampler, StateVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::config::{Experiment, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    /// Floats carry 12 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.11e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

pub type Row = Vec<(&'static str, Cell)>;

/// The full parameter tuple, first in every row.
fn param_cells(cfg: &RunConfig, experiment: Experiment, p: &ProtocolParams) -> Row {
    vec![
        ("experiment", Cell::Text(experiment.name().into())),
        ("mode", Cell::Text(p.mode.to_string())),
        ("seed", p.seed.map_or(Cell::Empty, |s| Cell::Text(s.to_string()))),
        ("w", p.w.into()),
        ("phi", p.phi.into()),
        ("U_max", p.u_max.into()),
        ("Uprime_max", p.uprime_max.into()),
        ("T_ent", p.t_ent.into()),
        ("T_couple", p.t_couple.into()),
        ("bell_U", p.bell_u.into()),
        ("wait_angle", p.wait_angle.into()),
        ("alpha_abs", cfg.alpha_abs.into()),
        ("n_support", Cell::Int(if experiment == Experiment::Chain { cfg.n_support as i64 } else { 2 })),
        ("shots", Cell::Int(cfg.shots as i64)),
    ]
}

fn ramp_cells(diag: Option<&RampDiagnostics>) -> Row {
    vec![
        ("min_gap", diag.map(|d| d.min_gap).into()),
        ("final_ground_overlap", diag.map(|d| d.final_ground_overlap).into()),
    ]
}

fn stage(res: &TeleportResult, name: &str) -> Cell {
    res.step_log.iter().find(|s| s.stage == name).map(|s| s.fidelity_to_reference).into()
}

fn bell_pair() -> StateVector {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    StateVector::from_slice(&[h, z, z, h]).expect("normalized")
}

fn results(cfg: &RunConfig, experiment: Experiment, p: &ProtocolParams) -> dqd_sim::Result<Row> {
    let q = InputQubit::from_alpha_abs(cfg.alpha_abs)?;
    Ok(match experiment {
        Experiment::Encode => {
            let enc = encode_qubit(&q, p.w, p.phi)?;
            vec![
                ("t_bar", enc.t_bar.into()),
                ("alpha_re", enc.achieved.alpha.re.into()),
                ("alpha_im", enc.achieved.alpha.im.into()),
                ("beta_re", enc.achieved.beta.re.into()),
                ("beta_im", enc.achieved.beta.im.into()),
                ("fidelity_to_target", fidelity(&enc.state, &q.state())?.into()),
            ]
        }
        Experiment::Entangle => {
            let (pair, diag) = make_entangled_pair(p)?;
            let a = pair.amplitudes();
            let mut row = vec![
                ("bell_overlap", fidelity(&pair, &bell_pair())?.into()),
                ("reference_overlap", fidelity(&pair, &entangled_pair_reference(p.u_max, p.w)?)?.into()),
                ("cross_ratio", ((a[1].norm() + a[2].norm()) / (a[0].norm() + a[3].norm())).into()),
                ("concurrence", concurrence(&pair.density_matrix())?.into()),
            ];
            row.extend(ramp_cells(diag.as_ref()));
            row
        }
        Experiment::Couple => {
            let enc = encode_qubit(&q, p.w, p.phi)?;
            let (pair, _) = make_entangled_pair(p)?;
            let (coupled, diag) = couple_unknown(&enc.state, &pair, p)?;
            let mut row = vec![("ghz_fidelity", fidelity(&coupled, &ghz_like(&enc.achieved, 3))?.into())];
            row.extend(ramp_cells(diag.as_ref()));
            row
        }
        Experiment::Bell => {
            let enc = encode_qubit(&q, p.w, p.phi)?;
            let (pair, _) = make_entangled_pair(p)?;
            let (coupled, _) = couple_unknown(&enc.state, &pair, p)?;
            let t = wait_time(p)?;
            let after = bell_evolution(&coupled, p, t)?;
            let ideal = ghz_like(&enc.achieved, 3).apply_unitary(&effective_bell_unitary(p.wait_angle), &[QubitId(0), QubitId(1)])?;
            let m = measure_qubit(&after, ENCODER, MeasureMode::Deterministic)?;
            let sampled = match (cfg.shots, p.seed) {
                (n, Some(seed)) if n > 0 => {
                    let mut s = Sampler::from_seed(seed);
                    let mut zeros = 0usize;
                    for _ in 0..n {
                        if measure_qubit(&after, ENCODER, MeasureMode::Sampled(&mut s))?.outcome == Some(0) {
                            zeros += 1;
                        }
                    }
                    Some(zeros as f64 / n as f64)
                }
                _ => None,
            };
            vec![
                ("omega", effective_rabi(p.w, p.bell_u)?.into()),
                ("t_wait", t.into()),
                ("p0", m.p0().into()),
                ("p1", m.p1().into()),
                ("p0_sampled", sampled.into()),
                ("bell_fidelity", fidelity(&after, &ideal)?.into()),
            ]
        }
        Experiment::Teleport => {
            let res = teleport_end_to_end(&q, p)?;
            let prob = |o: u8| res.branch(o).map_or(0.0, |b| b.probability);
            vec![
                ("outcome", Cell::Int(res.outcome.into())),
                ("sampled", Cell::Int(res.sampled.into())),
                ("fidelity", res.fidelity_to_input.into()),
                ("average_fidelity", res.average_fidelity.into()),
                ("infidelity", (1.0 - res.average_fidelity).into()),
                ("p0", prob(0).into()),
                ("p1", prob(1).into()),
                ("entangle_fidelity", stage(&res, "entangle")),
                ("couple_fidelity", stage(&res, "couple")),
                ("bell_fidelity", stage(&res, "bell")),
            ]
        }
        Experiment::Chain => {
            let res = teleport_over_chain(&q, &ChainSpec::new(cfg.n_support, *p)?)?;
            let readout: String = res.readout.iter().map(|b| char::from(b'0' + b)).collect();
            vec![
                ("outcome", Cell::Int(res.outcome.into())),
                ("readout", Cell::Text(readout)),
                ("sampled", Cell::Int(res.sampled.into())),
                ("fidelity", res.fidelity_to_input.into()),
                ("average_fidelity", res.average_fidelity.into()),
                ("infidelity", (1.0 - res.average_fidelity).into()),
                ("ghz_fidelity", stage(&res, "ghz")),
                ("couple_fidelity", stage(&res, "couple")),
                ("bell_fidelity", stage(&res, "bell_readout")),
            ]
        }
        Experiment::Sweep => unreachable!("validated: sweeps do not nest"),
    })
}

fn config_error(errors: Vec<String>) -> CliError {
    CliError::Config(errors)
}

fn run_point(cfg: &RunConfig, experiment: Experiment, point: Option<(&str, f64)>) -> Result<(ProtocolParams, Row), CliError> {
    let p = cfg.protocol_params(experiment, point).map_err(config_error)?;
    let mut row = param_cells(cfg, experiment, &p);
    row.extend(results(cfg, experiment, &p)?);
    Ok((p, row))
}

/// All rows of a validated run with the parameters each used; sweep rows come
/// back in ascending axis order whatever order the workers finish in.
pub fn run_rows(cfg: &RunConfig, threads: usize) -> Result<Vec<(ProtocolParams, Row)>, CliError> {
    let experiment = cfg.row_experiment().map_err(|e| config_error(vec![e]))?;
    let Some(sweep) = cfg.sweep.as_ref().filter(|_| cfg.experiment == "sweep") else {
        return Ok(vec![run_point(cfg, experiment, None)?]);
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let points = cfg.sweep_points();
    let rows: Vec<Result<(ProtocolParams, Row), CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(_, v)| {
                let (p, cells) = run_point(cfg, experiment, Some((sweep.axis.as_str(), v)))?;
                let mut row: Row = vec![("sweep_axis", Cell::Text(sweep.axis.clone()))];
                row.extend(cells);
                Ok((p, row))
            })
            .collect()
    });
    rows.into_iter().collect()
}
