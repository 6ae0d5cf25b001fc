//! Outcome of a steady-state solve.

use std::fmt;

use crate::poisson::MagneticField;
use crate::problem::{Diagnostics, Evaluation, GpProblem, WaveFunction};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// Energy blew up or a non-finite value appeared.
    Diverged,
    /// The line search could not decrease the energy.
    Stagnated,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max-iterations",
            SolveStatus::Diverged => "diverged",
            SolveStatus::Stagnated => "stagnated",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of a convergence history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord<T> {
    pub iter: usize,
    pub energy: T,
    pub mu: T,
    pub residual: T,
}

/// Worst-case deviations from the structural invariants seen over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport<T> {
    /// `max |‖u‖² - 1|`
    pub norm_drift: T,
    /// `max |μ - (E - gap)|`
    pub identity_error: T,
    /// `max |⟨r, φ⟩|`
    pub orthogonality: T,
    /// `max (Eⁿ⁺¹ - Eⁿ)`, zero if the energy never rose.
    pub energy_increase: T,
    /// `max |⟨p̂, φ⟩|` over search directions; zero for flows.
    pub tangency: T,
}

impl<T: Real> Default for InvariantReport<T> {
    fn default() -> Self {
        Self {
            norm_drift: T::zero(),
            identity_error: T::zero(),
            orthogonality: T::zero(),
            energy_increase: T::zero(),
            tangency: T::zero(),
        }
    }
}

impl<T: Real> InvariantReport<T> {
    /// Records one iterate. `previous_energy` is the energy before the update.
    pub fn observe(
        &mut self,
        problem: &GpProblem<T>,
        components: &[Vec<T>],
        ev: &Evaluation<T>,
        previous_energy: Option<T>,
    ) {
        let drift = (problem.norm_sq(components) - T::one()).abs();
        self.norm_drift = self.norm_drift.max(drift);
        self.identity_error = self.identity_error.max(problem.identity_error(ev));
        let orth = problem.inner(&ev.residual, components).abs();
        self.orthogonality = self.orthogonality.max(orth);
        if let Some(e) = previous_energy {
            self.energy_increase = self.energy_increase.max(ev.energy - e);
        }
    }

    pub fn observe_tangency(&mut self, value: T) {
        self.tangency = self.tangency.max(value.abs());
    }

    pub fn merge(&mut self, other: &Self) {
        self.norm_drift = self.norm_drift.max(other.norm_drift);
        self.identity_error = self.identity_error.max(other.identity_error);
        self.orthogonality = self.orthogonality.max(other.orthogonality);
        self.energy_increase = self.energy_increase.max(other.energy_increase);
        self.tangency = self.tangency.max(other.tangency);
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult<T> {
    pub status: SolveStatus,
    pub iterations: usize,
    pub wall_seconds: f64,
    /// Diagnostics of the final state.
    pub diagnostics: Diagnostics<T>,
    /// One record per iteration, after each update.
    pub history: Vec<HistoryRecord<T>>,
    pub state: WaveFunction<T>,
    pub field: MagneticField<T>,
    pub invariants: InvariantReport<T>,
    /// Saddle-escape outcome for optimizers that probe for one.
    pub escaped: Option<bool>,
    pub message: Option<String>,
}

impl<T: Copy> SteadyStateResult<T> {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn energy(&self) -> T {
        self.diagnostics.energy
    }

    pub fn chemical_potential(&self) -> T {
        self.diagnostics.chemical_potential
    }

    pub fn residual_norm(&self) -> T {
        self.diagnostics.residual_norm
    }
}
