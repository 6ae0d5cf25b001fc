//! Normalized gradient flows: GFLM and the two accelerated second-order
//! schemes ASGF-I and ASGF-II.
//!
//! Every step freezes `μ`, the forces and the field at level `n`, performs one
//! banded SPD solve per component and renormalizes the position jointly.
//! With `W = A + S²B`, `K = (2/R²)W` and `M = α₁C + (4α₂/R²)W` all system
//! matrices are combinations `c₁C + c₂W`.

use std::time::Instant;

use log::debug;

use crate::error::{Error, Result};
use crate::problem::{Evaluation, GpProblem, Model, WaveFunction};
use crate::result::{HistoryRecord, InvariantReport, SolveStatus, SteadyStateResult};
use crate::scalar::Real;
use crate::spectral::BandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Gflm,
    Asgf1,
    Asgf2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gflm => "gflm",
            Scheme::Asgf1 => "asgf1",
            Scheme::Asgf2 => "asgf2",
        }
    }
}

/// Damping `α₀`, mass `α₁` and elastic `α₂` coefficients of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inertia<T> {
    pub alpha0: T,
    pub alpha1: T,
    pub alpha2: T,
}

impl<T: Real> Inertia<T> {
    pub fn new(alpha0: T, alpha1: T, alpha2: T) -> Self {
        Self {
            alpha0,
            alpha1,
            alpha2,
        }
    }

    /// `(1, 0, 0)`, the first-order flow.
    pub fn first_order() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig<T> {
    pub scheme: Scheme,
    pub tau: T,
    /// Per component; the single model reads only the first entry.
    pub inertia: [Inertia<T>; 2],
    pub tol: T,
    pub max_iter: usize,
    /// Initial velocity `v⁰ = scale · u⁰`.
    pub initial_velocity_scale: T,
    /// Divide the velocity by the normalization factor along with the position.
    pub rescale_velocity: bool,
    /// Abort once `|E| > factor · max(|E⁰|, 1)`.
    pub divergence_factor: T,
}

impl<T: Real> FlowConfig<T> {
    pub fn new(scheme: Scheme, tau: T) -> Self {
        Self {
            scheme,
            tau,
            inertia: [Inertia::first_order(); 2],
            tol: T::lit(1e-10),
            max_iter: 20_000,
            initial_velocity_scale: T::zero(),
            rescale_velocity: false,
            divergence_factor: T::lit(1e3),
        }
    }

    /// Same coefficients for both components.
    pub fn with_inertia(mut self, inertia: Inertia<T>) -> Self {
        self.inertia = [inertia; 2];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.tau > T::zero()) || !self.tau.is_finite() {
            return fail(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.tol > T::zero()) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.divergence_factor > T::one()) {
            return fail("divergence_factor must exceed 1".into());
        }
        if !self.initial_velocity_scale.is_finite() {
            return fail("initial velocity scale must be finite".into());
        }
        for (j, a) in self.inertia.iter().enumerate() {
            let all = [a.alpha0, a.alpha1, a.alpha2];
            if all.iter().any(|&c| !(c >= T::zero()) || !c.is_finite()) {
                return fail(format!("inertia coefficients of component {} must be >= 0", j + 1));
            }
            if all.iter().all(|&c| c == T::zero()) {
                return fail(format!("inertia coefficients of component {} are all zero", j + 1));
            }
        }
        Ok(())
    }
}

/// Position and velocity of a flow.
#[derive(Debug, Clone)]
pub struct FlowState<T> {
    pub u: WaveFunction<T>,
    pub v: Vec<Vec<T>>,
    pub iteration: usize,
}

impl<T: Real> FlowState<T> {
    pub fn new(u: WaveFunction<T>, velocity_scale: T) -> Self {
        let v = u
            .components
            .iter()
            .map(|c| c.iter().map(|&x| velocity_scale * x).collect())
            .collect();
        Self {
            u,
            v,
            iteration: 0,
        }
    }
}

/// Scalar shift per component: the nodal maximum of the pointwise bound,
/// clipped at zero.
pub fn stabilization_shift<T: Real>(problem: &GpProblem<T>, ev: &Evaluation<T>) -> Vec<T> {
    let p = problem.params();
    let h = &ev.field.nodal;
    let half = T::lit(0.5);
    match p.model {
        Model::Single => {
            let u = &ev.nodal[0];
            let m = u
                .iter()
                .zip(h)
                .map(|(&x, &hk)| -half * (p.beta * x * x + hk + ev.mu))
                .fold(T::zero(), T::max);
            vec![m]
        }
        Model::Binary => {
            let v = problem.potential_nodal();
            let h0 = p.background_field;
            (0..2)
                .map(|j| {
                    let (other, sign) = if j == 0 {
                        (&ev.nodal[1], -T::one())
                    } else {
                        (&ev.nodal[0], T::one())
                    };
                    (0..h.len())
                        .map(|k| {
                            half * (v[j][k] + sign * p.eta - p.beta * other[k] * other[k]
                                + (h0 + h[k]).abs()
                                - ev.mu)
                        })
                        .fold(T::zero(), T::max)
                })
                .collect()
        }
    }
}

/// `a·C·x + b·W·x`
fn apply_pair<T: Real>(problem: &GpProblem<T>, a: T, b: T, x: &[T]) -> Vec<T> {
    let cx = problem.mass().matvec(x);
    let wx = problem.laplacian().matvec(x);
    cx.iter().zip(&wx).map(|(&c, &w)| a * c + b * w).collect()
}

fn pair_matrix<T: Real>(problem: &GpProblem<T>, a: T, b: T) -> BandedMatrix<T> {
    BandedMatrix::combination(&[(a, problem.mass()), (b, problem.laplacian())])
}

fn add_into<T: Real>(y: &mut [T], x: &[T]) {
    for (a, &b) in y.iter_mut().zip(x) {
        *a += b;
    }
}

/// Normalizes the new position and packages the next state.
fn finish_step<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    mut u: Vec<Vec<T>>,
    mut v: Vec<Vec<T>>,
    rescale_velocity: bool,
) -> Result<FlowState<T>> {
    if u.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            iteration: fs.iteration + 1,
        });
    }
    let norm = problem.project_coeffs(&mut u)?;
    if rescale_velocity {
        for c in v.iter_mut() {
            for x in c.iter_mut() {
                *x /= norm;
            }
        }
    }
    Ok(FlowState {
        u: fs.u.with_components(u),
        v,
        iteration: fs.iteration + 1,
    })
}

fn gflm_update<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
    ev: &Evaluation<T>,
) -> Result<FlowState<T>> {
    let tau = cfg.tau;
    let shifts = stabilization_shift(problem, ev);
    let two_r2 = T::lit(2.0) / (problem.radius() * problem.radius());
    let mut new_u = Vec::new();
    let mut new_v = Vec::new();
    for (j, u) in fs.u.components.iter().enumerate() {
        let c1 = tau.recip() + shifts[j];
        let factor = pair_matrix(problem, c1, two_r2).cholesky()?;
        let mut rhs = problem.mass().matvec(u);
        for x in rhs.iter_mut() {
            *x *= c1 + ev.mu;
        }
        add_into(&mut rhs, &ev.loads[j]);
        factor.solve_in_place(&mut rhs);
        new_v.push(rhs.iter().zip(u).map(|(&a, &b)| (a - b) / tau).collect());
        new_u.push(rhs);
    }
    finish_step(problem, fs, new_u, new_v, cfg.rescale_velocity)
}

fn asgf1_update<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
    ev: &Evaluation<T>,
) -> Result<FlowState<T>> {
    let tau = cfg.tau;
    let r2 = problem.radius() * problem.radius();
    let shifts = stabilization_shift(problem, ev);
    let mut new_u = Vec::new();
    let mut new_v = Vec::new();
    for (j, (u, v)) in fs.u.components.iter().zip(&fs.v).enumerate() {
        let a = cfg.inertia[j];
        let elastic = T::lit(4.0) * a.alpha2 / r2;
        let tau2 = tau * tau;
        let c_mass = a.alpha0 / tau + a.alpha1 / tau2 + shifts[j];
        let c_lap = elastic / tau2 + T::lit(2.0) / r2;
        let factor = pair_matrix(problem, c_mass, c_lap).cholesky()?;
        // M(uⁿ/τ² + vⁿ/τ)
        let w: Vec<T> = u.iter().zip(v).map(|(&x, &y)| x / tau2 + y / tau).collect();
        let mut rhs = apply_pair(problem, a.alpha1, elastic, &w);
        let cu = problem.mass().matvec(u);
        let cu_scale = a.alpha0 / tau + shifts[j] + ev.mu;
        for (r, &c) in rhs.iter_mut().zip(&cu) {
            *r += cu_scale * c;
        }
        add_into(&mut rhs, &ev.loads[j]);
        factor.solve_in_place(&mut rhs);
        new_v.push(rhs.iter().zip(u).map(|(&a, &b)| (a - b) / tau).collect());
        new_u.push(rhs);
    }
    finish_step(problem, fs, new_u, new_v, cfg.rescale_velocity)
}

fn asgf2_update<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
    ev: &Evaluation<T>,
) -> Result<FlowState<T>> {
    let tau = cfg.tau;
    let r2 = problem.radius() * problem.radius();
    let mut new_u = Vec::new();
    let mut new_v = Vec::new();
    for (j, (u, v)) in fs.u.components.iter().zip(&fs.v).enumerate() {
        let a = cfg.inertia[j];
        let elastic = T::lit(4.0) * a.alpha2 / r2;
        let factor =
            pair_matrix(problem, a.alpha0 + a.alpha1 / tau, elastic / tau).cholesky()?;
        // Mvⁿ/τ - Kuⁿ + μCuⁿ + load
        let mut rhs = apply_pair(problem, a.alpha1 / tau, elastic / tau, v);
        let rest = apply_pair(problem, ev.mu, -T::lit(2.0) / r2, u);
        add_into(&mut rhs, &rest);
        add_into(&mut rhs, &ev.loads[j]);
        factor.solve_in_place(&mut rhs);
        new_u.push(u.iter().zip(&rhs).map(|(&x, &y)| x + tau * y).collect());
        new_v.push(rhs);
    }
    finish_step(problem, fs, new_u, new_v, cfg.rescale_velocity)
}

fn update<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
    ev: &Evaluation<T>,
) -> Result<FlowState<T>> {
    match cfg.scheme {
        Scheme::Gflm => gflm_update(problem, fs, cfg, ev),
        Scheme::Asgf1 => asgf1_update(problem, fs, cfg, ev),
        Scheme::Asgf2 => asgf2_update(problem, fs, cfg, ev),
    }
}

/// One semi-implicit first-order step, independent of `cfg.inertia`.
pub fn gflm_step<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
) -> Result<FlowState<T>> {
    let ev = problem.evaluate(&fs.u)?;
    gflm_update(problem, fs, cfg, &ev)
}

/// One ASGF-I step with the stabilization shift.
pub fn asgf1_step<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
) -> Result<FlowState<T>> {
    let ev = problem.evaluate(&fs.u)?;
    asgf1_update(problem, fs, cfg, &ev)
}

/// One ASGF-II step (explicit right-hand side, no shift).
pub fn asgf2_step<T: Real>(
    problem: &GpProblem<T>,
    fs: &FlowState<T>,
    cfg: &FlowConfig<T>,
) -> Result<FlowState<T>> {
    let ev = problem.evaluate(&fs.u)?;
    asgf2_update(problem, fs, cfg, &ev)
}

/// Iterates the configured scheme until the residual drops below `cfg.tol`,
/// `cfg.max_iter` updates have been made, or the flow diverges.
pub fn run_flow<T: Real>(
    problem: &GpProblem<T>,
    cfg: &FlowConfig<T>,
    guess: &WaveFunction<T>,
) -> Result<SteadyStateResult<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let mut fs = FlowState::new(guess.clone(), cfg.initial_velocity_scale);
    let mut ev = problem.evaluate(&fs.u)?;
    let reference = ev.energy.abs().max(T::one());
    let mut invariants = InvariantReport::default();
    invariants.observe(problem, &fs.u.components, &ev, None);
    let mut history = Vec::new();
    let mut message = None;
    let status = loop {
        if ev.residual_norm < cfg.tol {
            break SolveStatus::Converged;
        }
        if fs.iteration >= cfg.max_iter {
            break SolveStatus::MaxIterations;
        }
        let next = match update(problem, &fs, cfg, &ev) {
            Ok(next) => next,
            Err(Error::NonFinite { iteration }) => {
                message = Some(format!("non-finite coefficients at iteration {iteration}"));
                break SolveStatus::Diverged;
            }
            Err(e) => return Err(e),
        };
        let next_ev = problem.evaluate(&next.u)?;
        invariants.observe(problem, &next.u.components, &next_ev, Some(ev.energy));
        fs = next;
        ev = next_ev;
        history.push(HistoryRecord {
            iter: fs.iteration,
            energy: ev.energy,
            mu: ev.mu,
            residual: ev.residual_norm,
        });
        if !ev.energy.is_finite() || !ev.residual_norm.is_finite() {
            message = Some(format!("non-finite energy at iteration {}", fs.iteration));
            break SolveStatus::Diverged;
        }
        if ev.energy.abs() > cfg.divergence_factor * reference {
            message = Some(format!(
                "energy {:e} exceeded the divergence bound at iteration {}",
                ev.energy, fs.iteration
            ));
            break SolveStatus::Diverged;
        }
        if fs.iteration % 500 == 0 {
            debug!(
                "{} iter {} E {} mu {} res {:e}",
                cfg.scheme.name(),
                fs.iteration,
                ev.energy,
                ev.mu,
                ev.residual_norm
            );
        }
    };
    let diagnostics = problem.diagnostics_from(&fs.u, &ev);
    Ok(SteadyStateResult {
        status,
        iterations: fs.iteration,
        wall_seconds: start.elapsed().as_secs_f64(),
        diagnostics,
        history,
        state: fs.u,
        field: ev.field,
        invariants,
        escaped: None,
        message,
    })
}
