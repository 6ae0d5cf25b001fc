//! Single solves and their CSV and summary outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gpvortex::{run_flow, run_ppncg, GpProblem64, Model, SteadyStateResult64};

use crate::error::{CliError, Result};
use crate::runspec::{RunSpec, Solver};

/// Number of uniform radial samples in the profile CSV.
pub const PROFILE_POINTS: usize = 1001;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: SteadyStateResult64,
    pub model: Model,
    pub solver: Solver,
    pub radius: f64,
}

impl Outcome {
    pub fn converged(&self) -> bool {
        self.result.converged()
    }

    pub fn energy(&self) -> f64 {
        self.result.energy()
    }

    pub fn mu(&self) -> f64 {
        self.result.chemical_potential()
    }

    pub fn masses(&self) -> &[f64] {
        &self.result.diagnostics.masses
    }

    pub fn exit_code(&self) -> i32 {
        if self.converged() {
            0
        } else {
            2
        }
    }
}

/// Solves `spec` from the default initial guess.
pub fn solve(spec: &RunSpec) -> Result<Outcome> {
    let params = spec.model_params();
    let problem = GpProblem64::new(params)?;
    let guess = problem.initial_guess()?;
    let result = match spec.flow_config() {
        Some(cfg) => run_flow(&problem, &cfg, &guess)?,
        None => run_ppncg(
            &problem,
            &guess,
            &spec.cg_config(),
            spec.perturb_config().as_ref(),
        )?,
    };
    Ok(Outcome {
        result,
        model: spec.model,
        solver: spec.solver,
        radius: spec.radius,
    })
}

/// Solves and, when `spec.out` is set, writes `history.csv`, `profile.csv`,
/// `summary.txt` and the resolved `spec.conf` there.
pub fn run(spec: &RunSpec) -> Result<Outcome> {
    let outcome = solve(spec)?;
    if let Some(dir) = &spec.out {
        write_outputs(dir, spec, &outcome)?;
    }
    Ok(outcome)
}

pub fn write_outputs(dir: &Path, spec: &RunSpec, outcome: &Outcome) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let files = [
        ("history.csv", history_csv(outcome)),
        ("profile.csv", profile_csv(outcome)),
        ("summary.txt", summary(outcome)),
        ("spec.conf", spec.to_config()),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

pub fn history_csv(outcome: &Outcome) -> String {
    let mut s = String::from("iter,energy,mu,residual\n");
    for h in &outcome.result.history {
        let _ = writeln!(
            s,
            "{},{:.10},{:.10},{:.10e}",
            h.iter, h.energy, h.mu, h.residual
        );
    }
    s
}

/// `r,phi1` for the single model, `r,phi1,phi2,H` for the binary one.
pub fn profile_csv(outcome: &Outcome) -> String {
    let state = &outcome.result.state;
    let field = &outcome.result.field;
    let binary = outcome.model == Model::Binary;
    let mut s = String::from(if binary { "r,phi1,phi2,H\n" } else { "r,phi1\n" });
    let last = (PROFILE_POINTS - 1) as f64;
    for k in 0..PROFILE_POINTS {
        let r = outcome.radius * k as f64 / last;
        let _ = write!(s, "{r:.10},{:.10e}", state.at_radius(0, r));
        if binary {
            let _ = write!(s, ",{:.10e},{:.10e}", state.at_radius(1, r), field.at_radius(r));
        }
        s.push('\n');
    }
    s
}

/// `key = value` record of the final diagnostics.
pub fn summary(outcome: &Outcome) -> String {
    let res = &outcome.result;
    let d = &res.diagnostics;
    let inv = &res.invariants;
    let mut s = String::new();
    let _ = writeln!(s, "solver = {}", outcome.solver);
    let _ = writeln!(s, "status = {}", res.status);
    let _ = writeln!(s, "converged = {}", res.converged());
    let _ = writeln!(s, "iterations = {}", res.iterations);
    let _ = writeln!(s, "energy = {:.10}", d.energy);
    let _ = writeln!(s, "mu = {:.10}", d.chemical_potential);
    let _ = writeln!(s, "residual = {:.10e}", d.residual_norm);
    for (j, m) in d.masses.iter().enumerate() {
        let _ = writeln!(s, "mass{} = {:.10}", j + 1, m);
    }
    let _ = writeln!(s, "norm_drift = {:.10e}", inv.norm_drift);
    let _ = writeln!(s, "orthogonality = {:.10e}", inv.orthogonality);
    let _ = writeln!(s, "identity_error = {:.10e}", inv.identity_error);
    let _ = writeln!(s, "energy_increase = {:.10e}", inv.energy_increase);
    let _ = writeln!(s, "tangency = {:.10e}", inv.tangency);
    if let Some(e) = res.escaped {
        let _ = writeln!(s, "escaped = {e}");
    }
    if let Some(m) = &res.message {
        let _ = writeln!(s, "message = {m}");
    }
    let _ = writeln!(s, "wall_seconds = {:.3}", res.wall_seconds);
    s
}
