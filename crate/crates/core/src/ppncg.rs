//! Perturbed preconditioned nonlinear conjugate gradient on the unit sphere
//! of the weighted `L²` norm.
//!
//! Each iteration preconditions the residual, mixes in the previous direction,
//! projects onto the tangent space at `φ`, and moves along the great circle
//! `cos θ φ + sin θ p̂` with `θ` from a line search on the energy. After
//! convergence an optional perturbation loop probes for a lower state nearby.

use std::cell::Cell;
use std::time::Instant;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::brent::brent_minimize;
use crate::error::{Error, Result};
use crate::problem::{Evaluation, GpProblem, WaveFunction};
use crate::result::{HistoryRecord, InvariantReport, SolveStatus, SteadyStateResult};
use crate::scalar::Real;
use crate::spectral::BandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Momentum {
    FletcherReeves,
    PolakRibierePlus,
}

impl Momentum {
    pub fn name(self) -> &'static str {
        match self {
            Momentum::FletcherReeves => "fr",
            Momentum::PolakRibierePlus => "pr+",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchConfig<T> {
    /// Step of the central difference for `g''(0)`.
    pub fd_step: T,
    /// Newton guesses below this angle skip the bracketing search.
    pub small_angle: T,
    pub theta_tol: T,
    pub max_evaluations: usize,
}

impl<T: Real> Default for LineSearchConfig<T> {
    fn default() -> Self {
        Self {
            fd_step: T::lit(1e-4),
            small_angle: T::lit(1e-2),
            theta_tol: T::lit(1e-10),
            max_evaluations: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgConfig<T> {
    pub tol: T,
    pub max_iter: usize,
    pub momentum: Momentum,
    pub line_search: LineSearchConfig<T>,
}

impl<T: Real> Default for CgConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_iter: 5_000,
            momentum: Momentum::PolakRibierePlus,
            line_search: LineSearchConfig::default(),
        }
    }
}

impl<T: Real> CgConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        let ls = &self.line_search;
        if !(ls.fd_step > T::zero()) || !(ls.theta_tol > T::zero()) || ls.max_evaluations < 4 {
            return Err(Error::InvalidParameter("invalid line search settings".into()));
        }
        Ok(())
    }
}

/// Settings of the saddle-escape loop.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbConfig<T> {
    pub noise_amplitude: T,
    pub probe_iterations: usize,
    /// Relative energy decrease that counts as an escape.
    pub escape_threshold: T,
    pub max_escape_rounds: usize,
    pub rng_seed: u64,
}

impl<T: Real> PerturbConfig<T> {
    pub fn new(
        noise_amplitude: T,
        probe_iterations: usize,
        escape_threshold: T,
        max_escape_rounds: usize,
        rng_seed: u64,
    ) -> Result<Self> {
        if !(noise_amplitude > T::zero()) || !noise_amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise amplitude must be positive, got {noise_amplitude}"
            )));
        }
        if probe_iterations == 0 {
            return Err(Error::InvalidParameter("probe_iterations must be at least 1".into()));
        }
        if !(escape_threshold >= T::zero()) {
            return Err(Error::InvalidParameter("escape threshold must be >= 0".into()));
        }
        Ok(Self {
            noise_amplitude,
            probe_iterations,
            escape_threshold,
            max_escape_rounds,
            rng_seed,
        })
    }

    /// `δ = 1e-2`, 7 probe iterations, threshold `1e-9`, 3 rounds.
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            noise_amplitude: T::lit(1e-2),
            probe_iterations: 7,
            escape_threshold: T::lit(1e-9),
            max_escape_rounds: 3,
            rng_seed,
        }
    }
}

/// Optimizer state: current point, its evaluation and the memory needed for
/// the momentum term.
#[derive(Debug, Clone)]
pub struct CgState<T> {
    pub phi: WaveFunction<T>,
    pub eval: Evaluation<T>,
    pub r_prev: Option<Vec<Vec<T>>>,
    pub pr_prev: Option<Vec<Vec<T>>>,
    pub d_prev: Option<Vec<Vec<T>>>,
    pub iteration: usize,
    pub history: Vec<HistoryRecord<T>>,
    pub momentum: Momentum,
    /// Consecutive iterations in which the line search made no progress.
    pub stagnations: usize,
    pub invariants: InvariantReport<T>,
    rng: ChaCha8Rng,
}

impl<T: Real> CgState<T> {
    pub fn new(
        problem: &GpProblem<T>,
        phi: WaveFunction<T>,
        momentum: Momentum,
        seed: u64,
    ) -> Result<Self> {
        let eval = problem.evaluate(&phi)?;
        let mut invariants = InvariantReport::default();
        invariants.observe(problem, &phi.components, &eval, None);
        Ok(Self {
            phi,
            eval,
            r_prev: None,
            pr_prev: None,
            d_prev: None,
            iteration: 0,
            history: Vec::new(),
            momentum,
            stagnations: 0,
            invariants,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn energy(&self) -> T {
        self.eval.energy
    }

    /// Restarts from a new point, keeping history, counters and the RNG.
    fn restart_at(&mut self, problem: &GpProblem<T>, phi: WaveFunction<T>) -> Result<()> {
        self.eval = problem.evaluate(&phi)?;
        self.phi = phi;
        self.r_prev = None;
        self.pr_prev = None;
        self.d_prev = None;
        self.stagnations = 0;
        Ok(())
    }
}

fn combine<T: Real>(a: T, x: &[Vec<T>], b: T, y: &[Vec<T>]) -> Vec<Vec<T>> {
    x.iter()
        .zip(y)
        .map(|(xc, yc)| xc.iter().zip(yc).map(|(&p, &q)| a * p + b * q).collect())
        .collect()
}

fn scaled<T: Real>(a: T, x: &[Vec<T>]) -> Vec<Vec<T>> {
    x.iter().map(|c| c.iter().map(|&v| a * v).collect()).collect()
}

/// Removes the component along the unit vector `phi`.
fn tangent<T: Real>(problem: &GpProblem<T>, d: &[Vec<T>], phi: &[Vec<T>]) -> Vec<Vec<T>> {
    let along = problem.inner(d, phi);
    combine(T::one(), d, -along, phi)
}

/// Solves `[cC + (2/R²)(A+S²B)] y = C r` with `c = π Σ ûᵀ(A+S²B)û`.
pub fn apply_preconditioner<T: Real>(
    problem: &GpProblem<T>,
    residual: &[Vec<T>],
    phi: &WaveFunction<T>,
) -> Result<Vec<Vec<T>>> {
    let w = problem.laplacian();
    let c: T = phi.components.iter().map(|u| w.bilinear(u, u)).sum::<T>() * T::PI();
    let r2 = problem.radius() * problem.radius();
    let factor = BandedMatrix::combination(&[(c, problem.mass()), (T::lit(2.0) / r2, w)])
        .cholesky()?;
    residual
        .iter()
        .map(|r| {
            if r.len() != problem.basis().dimension() {
                return Err(Error::DimensionMismatch {
                    expected: problem.basis().dimension(),
                    found: r.len(),
                });
            }
            let mut y = problem.mass().matvec(r);
            factor.solve_in_place(&mut y);
            Ok(y)
        })
        .collect()
}

/// Momentum coefficient of the conjugate direction.
pub fn momentum_beta<T: Real>(
    problem: &GpProblem<T>,
    r: &[Vec<T>],
    pr: &[Vec<T>],
    r_prev: &[Vec<T>],
    pr_prev: &[Vec<T>],
    variant: Momentum,
) -> Result<T> {
    let den = problem.inner(r_prev, pr_prev);
    if !(den > T::zero()) {
        return Err(Error::Breakdown("previous preconditioned residual vanished"));
    }
    Ok(match variant {
        Momentum::FletcherReeves => problem.inner(r, pr) / den,
        Momentum::PolakRibierePlus => {
            let diff = combine(T::one(), r, -T::one(), r_prev);
            (problem.inner(&diff, pr) / den).max(T::zero())
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch<T> {
    pub theta: T,
    pub energy: T,
    pub evaluations: usize,
    /// No decrease was possible along the direction.
    pub stagnated: bool,
}

/// Point on the great circle through `phi` with unit tangent `p_hat`.
pub fn great_circle<T: Real>(phi: &[Vec<T>], p_hat: &[Vec<T>], theta: T) -> Vec<Vec<T>> {
    combine(theta.cos(), phi, theta.sin(), p_hat)
}

/// `g'(θ) = 2⟨r(θ), t(θ)⟩`, `t = -sinθ φ + cosθ p̂` the unit tangent of the circle.
fn slope_at<T: Real>(problem: &GpProblem<T>, phi: &[Vec<T>], p_hat: &[Vec<T>], theta: T) -> Result<T> {
    let point = great_circle(phi, p_hat, theta);
    let ev = problem.evaluate_coeffs(&point)?;
    let t = combine(-theta.sin(), phi, theta.cos(), p_hat);
    Ok(T::lit(2.0) * problem.inner(&ev.residual, &t))
}

/// Minimizes `g(θ) = E(cos θ φ + sin θ p̂)` with the field re-solved at every
/// trial angle.
///
/// A Newton guess from `g'(0) = 2⟨r, p̂⟩` and a central difference for
/// `g''(0)` is accepted directly when small; otherwise the minimum is
/// bracketed and refined by Brent's method. A final secant step on `g'`
/// sharpens `θ` beyond what energy differences can resolve.
pub fn line_search_theta<T: Real>(
    problem: &GpProblem<T>,
    phi: &[Vec<T>],
    p_hat: &[Vec<T>],
    residual: &[Vec<T>],
    cfg: &LineSearchConfig<T>,
) -> Result<LineSearch<T>> {
    let count = Cell::new(0usize);
    let g = |theta: T| -> Result<T> {
        count.set(count.get() + 1);
        problem.energy_of(&great_circle(phi, p_hat, theta))
    };
    let g0 = g(T::zero())?;
    let slope = T::lit(2.0) * problem.inner(residual, p_hat);
    if !(slope < T::zero()) {
        return Ok(LineSearch {
            theta: T::zero(),
            energy: g0,
            evaluations: count.get(),
            stagnated: slope > T::zero(),
        });
    }
    let h = cfg.fd_step;
    let curvature = (g(h)? - T::lit(2.0) * g0 + g(-h)?) / (h * h);
    let cap = T::FRAC_PI_2() * T::lit(0.999);
    let roundoff = T::lit(64.0) * T::epsilon() * g0.abs().max(T::one());

    let guess = if curvature > T::zero() {
        Some((-slope / curvature).min(cap))
    } else {
        None
    };

    let (mut theta, mut energy) = match guess {
        Some(t) if t <= cfg.small_angle => (t, g(t)?),
        _ => {
            let mut c = guess.unwrap_or(T::lit(0.1));
            let mut gc = g(c)?;
            let upper = if gc < g0 {
                let mut next = (c * T::lit(1.618)).min(cap);
                let mut g_next = g(next)?;
                while g_next < gc && next < cap {
                    c = next;
                    gc = g_next;
                    next = (c * T::lit(1.618)).min(cap);
                    g_next = g(next)?;
                }
                next
            } else {
                c
            };
            let budget = cfg.max_evaluations.saturating_sub(count.get()).max(4);
            let m = brent_minimize(g, T::zero(), upper, cfg.theta_tol, budget)?;
            if m.fx <= gc || gc >= g0 {
                (m.x, m.fx)
            } else {
                (c, gc)
            }
        }
    };

    // Secant step on the exact slope through θ = 0 and θ.
    if theta > T::zero() {
        let s = slope_at(problem, phi, p_hat, theta)?;
        count.set(count.get() + 1);
        if s != slope {
            let refined = theta - s * theta / (s - slope);
            if refined > T::zero() && (refined - theta).abs() <= T::lit(0.5) * theta {
                let e = g(refined)?;
                if e <= energy + roundoff {
                    theta = refined;
                    energy = e;
                }
            }
        }
    }

    if energy > g0 + T::lit(1e-12) || !energy.is_finite() {
        return Ok(LineSearch {
            theta: T::zero(),
            energy: g0,
            evaluations: count.get(),
            stagnated: true,
        });
    }
    Ok(LineSearch {
        theta,
        energy,
        evaluations: count.get(),
        stagnated: false,
    })
}

/// One conjugate-gradient update.
pub fn cg_iterate<T: Real>(
    problem: &GpProblem<T>,
    state: &mut CgState<T>,
    cfg: &CgConfig<T>,
) -> Result<()> {
    let phi = &state.phi.components;
    let r = state.eval.residual.clone();
    let pr = apply_preconditioner(problem, &r, &state.phi)?;
    let steepest = scaled(-T::one(), &pr);

    let beta = match (&state.r_prev, &state.pr_prev, &state.d_prev) {
        (Some(rp), Some(prp), Some(_)) => momentum_beta(problem, &r, &pr, rp, prp, state.momentum)?,
        _ => T::zero(),
    };
    let mut d = match &state.d_prev {
        Some(dp) if beta > T::zero() => combine(T::one(), &steepest, beta, dp),
        _ => steepest.clone(),
    };
    let mut p = tangent(problem, &d, phi);
    if problem.inner(&r, &p) >= T::zero() {
        d = steepest;
        p = tangent(problem, &d, phi);
    }
    let p_norm = problem.norm_sq(&p).sqrt();
    let mut p_hat = if p_norm > T::zero() {
        scaled(p_norm.recip(), &p)
    } else {
        p
    };
    // Second projection pass against cancellation.
    p_hat = tangent(problem, &p_hat, phi);
    let n2 = problem.norm_sq(&p_hat);
    if n2 > T::zero() {
        p_hat = scaled(n2.sqrt().recip(), &p_hat);
    }
    state.invariants.observe_tangency(problem.inner(&p_hat, phi));

    let ls = if n2 > T::zero() {
        line_search_theta(problem, phi, &p_hat, &r, &cfg.line_search)?
    } else {
        LineSearch {
            theta: T::zero(),
            energy: state.eval.energy,
            evaluations: 0,
            stagnated: true,
        }
    };

    let previous_energy = state.eval.energy;
    if ls.stagnated || ls.theta == T::zero() {
        state.stagnations += 1;
        state.d_prev = None;
        state.r_prev = None;
        state.pr_prev = None;
    } else {
        let next = great_circle(phi, &p_hat, ls.theta);
        let ev = problem.evaluate_coeffs(&next)?;
        state.phi = state.phi.with_components(next);
        state.eval = ev;
        state.stagnations = 0;
        state.r_prev = Some(r);
        state.pr_prev = Some(pr);
        state.d_prev = Some(d);
    }
    state.iteration += 1;
    state
        .invariants
        .observe(problem, &state.phi.components, &state.eval, Some(previous_energy));
    state.history.push(HistoryRecord {
        iter: state.iteration,
        energy: state.eval.energy,
        mu: state.eval.mu,
        residual: state.eval.residual_norm,
    });
    Ok(())
}

/// Iterates until the residual drops below `cfg.tol`, the budget runs out,
/// or two consecutive line searches fail.
fn minimize<T: Real>(
    problem: &GpProblem<T>,
    state: &mut CgState<T>,
    cfg: &CgConfig<T>,
    budget: usize,
) -> Result<SolveStatus> {
    let start = state.iteration;
    loop {
        if state.eval.residual_norm < cfg.tol {
            return Ok(SolveStatus::Converged);
        }
        if state.iteration - start >= budget {
            return Ok(SolveStatus::MaxIterations);
        }
        cg_iterate(problem, state, cfg)?;
        if !state.eval.energy.is_finite() {
            return Ok(SolveStatus::Diverged);
        }
        if state.stagnations >= 2 {
            return Ok(SolveStatus::Stagnated);
        }
        if state.iteration % 100 == 0 {
            debug!(
                "ppncg iter {} E {} res {:e}",
                state.iteration, state.eval.energy, state.eval.residual_norm
            );
        }
    }
}

/// Tangent noise of unit norm drawn from the state's generator.
fn tangent_noise<T: Real>(problem: &GpProblem<T>, state: &mut CgState<T>) -> Vec<Vec<T>> {
    let raw: Vec<Vec<T>> = state
        .phi
        .components
        .iter()
        .map(|c| {
            c.iter()
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut state.rng);
                    T::lit(z)
                })
                .collect()
        })
        .collect();
    let xi = tangent(problem, &raw, &state.phi.components);
    let n = problem.norm_sq(&xi).sqrt();
    scaled(n.recip(), &xi)
}

/// Perturbs a converged state in its tangent space and keeps the perturbed
/// branch only if a short probe lowers the energy.
pub fn saddle_escape<T: Real>(
    problem: &GpProblem<T>,
    mut state: CgState<T>,
    pc: &PerturbConfig<T>,
    cfg: &CgConfig<T>,
) -> Result<(CgState<T>, bool)> {
    let mut escaped = false;
    for round in 0..pc.max_escape_rounds {
        let reference = state.eval.energy;
        let xi = tangent_noise(problem, &mut state);
        let mut moved = combine(T::one(), &state.phi.components, pc.noise_amplitude, &xi);
        problem.project_coeffs(&mut moved)?;
        let mut probe = state.clone();
        probe.restart_at(problem, state.phi.with_components(moved))?;
        minimize(problem, &mut probe, cfg, pc.probe_iterations)?;
        let drop = reference - probe.eval.energy;
        debug!("escape round {round}: energy drop {drop:e}");
        if drop > pc.escape_threshold * reference.abs().max(T::one()) {
            let remaining = cfg.max_iter.saturating_sub(probe.iteration);
            minimize(problem, &mut probe, cfg, remaining)?;
            state = probe;
            escaped = true;
        } else {
            // Keep the advanced generator so later rounds draw fresh noise.
            state.rng = probe.rng;
            break;
        }
    }
    Ok((state, escaped))
}

/// Runs the optimizer from `guess`, followed by the perturbation loop when
/// `perturb` is given and the first phase converged.
pub fn run_ppncg<T: Real>(
    problem: &GpProblem<T>,
    guess: &WaveFunction<T>,
    cfg: &CgConfig<T>,
    perturb: Option<&PerturbConfig<T>>,
) -> Result<SteadyStateResult<T>> {
    cfg.validate()?;
    let start = Instant::now();
    let seed = perturb.map(|p| p.rng_seed).unwrap_or(0);
    let mut state = CgState::new(problem, guess.clone(), cfg.momentum, seed)?;
    let mut status = minimize(problem, &mut state, cfg, cfg.max_iter)?;
    let mut escaped = None;
    if let (SolveStatus::Converged, Some(pc)) = (status, perturb) {
        let (next, esc) = saddle_escape(problem, state, pc, cfg)?;
        state = next;
        escaped = Some(esc);
        status = if state.eval.residual_norm < cfg.tol {
            SolveStatus::Converged
        } else {
            SolveStatus::MaxIterations
        };
    }
    let message = (status == SolveStatus::Stagnated)
        .then(|| format!("line search stagnated at iteration {}", state.iteration));
    let diagnostics = problem.diagnostics_from(&state.phi, &state.eval);
    Ok(SteadyStateResult {
        status,
        iterations: state.iteration,
        wall_seconds: start.elapsed().as_secs_f64(),
        diagnostics,
        history: state.history,
        state: state.phi,
        field: state.eval.field,
        invariants: state.invariants,
        escaped,
        message,
    })
}
