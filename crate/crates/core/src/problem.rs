//! The single and binary variational problems on the truncated disk.
//!
//! Everything is written in the mapped coordinate `x ∈ [-1, 1]`,
//! `r = R(x+1)/2`. With `W = A + S²B` the pieces are
//!
//! * weighted norm `‖u‖² = (πR²/2) ûᵀCû`
//! * kinetic energy `π Σ_j ûⱼᵀ W ûⱼ`
//! * stiffness `K = (2/R²) W`
//! * radial integrals `π∫ f r dr = (πR²/4) ∫ f (x+1) dx`, evaluated on the
//!   working Gauss-Lobatto grid.
//!
//! The residual of the Euler-Lagrange equation is returned as Galerkin
//! coefficients `r̂` with `C r̂ = Kû - load(f) - μCû`, where `f` collects the
//! nonlinear and potential terms ("forces") at the nodes.

use std::fmt;
use std::sync::Arc;

use log::warn;

use crate::error::{Error, Result};
use crate::poisson::{MagneticField, PoissonWorkspace};
use crate::scalar::{dot, Real};
use crate::spectral::{
    build_matrix_a, build_matrix_b, build_matrix_c, gauss_lobatto, BandedCholesky, BandedMatrix,
    BasisFamily, BasisKind, NodalOperator, SpectralField,
};

/// Critical single-model coupling for `S = 0..=15`. Above it no symmetric or
/// central vortex state exists.
pub const SINGLE_THRESHOLDS: [f64; 16] = [
    5.85, 24.16, 44.88, 66.21, 87.75, 109.38, 131.06, 152.76, 174.47, 196.20, 217.94, 239.68,
    261.42, 283.17, 304.92, 326.67,
];

/// Binary-model existence bound for `S = 0..=15`. States exist below it and
/// do not exist above twice its value.
pub const BINARY_THRESHOLDS: [f64; 16] = [
    11.70, 48.31, 89.75, 132.42, 175.50, 218.76, 262.11, 305.51, 348.94, 392.40, 435.87, 479.35,
    522.84, 566.33, 609.83, 653.34,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Single,
    Binary,
}

impl Model {
    pub fn components(self) -> usize {
        match self {
            Model::Single => 1,
            Model::Binary => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Single => "single",
            Model::Binary => "binary",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Radial external potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential<T> {
    None,
    /// `k r² / 2`
    Harmonic(T),
    /// `r²/2 + 25 sin²(πr/4)`
    Lattice,
}

impl<T: Real> Potential<T> {
    pub fn eval(&self, r: T) -> T {
        match *self {
            Potential::None => T::zero(),
            Potential::Harmonic(k) => k * r * r / T::lit(2.0),
            Potential::Lattice => potential_lattice(r),
        }
    }
}

impl<T: Real> fmt::Display for Potential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::None => f.write_str("none"),
            Potential::Harmonic(k) => write!(f, "harmonic:{k}"),
            Potential::Lattice => f.write_str("lattice"),
        }
    }
}

/// Harmonic trap with a superimposed radial lattice.
pub fn potential_lattice<T: Real>(r: T) -> T {
    let s = (T::PI() * r / T::lit(4.0)).sin();
    r * r / T::lit(2.0) + T::lit(25.0) * s * s
}

/// Physical and discretization parameters of one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub model: Model,
    pub winding: u32,
    pub beta: T,
    pub gamma: T,
    /// Detuning between the two components.
    pub eta: T,
    /// Background field `H₀`.
    pub background_field: T,
    /// Fraction of the mass placed in the first component of the initial guess.
    pub mass_split: T,
    pub potentials: [Potential<T>; 2],
    pub radius: T,
    pub modes: usize,
}

impl<T: Real> ModelParams<T> {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            winding: 0,
            beta: T::zero(),
            gamma: T::zero(),
            eta: T::zero(),
            background_field: T::zero(),
            mass_split: T::lit(0.5),
            potentials: [Potential::None; 2],
            radius: T::lit(16.0),
            modes: 160,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.radius > T::one()) {
            return fail(format!("radius must exceed 1, got {}", self.radius));
        }
        if self.modes < 8 {
            return fail(format!("modes must be at least 8, got {}", self.modes));
        }
        for (name, v) in [
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("background_field", self.background_field),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if !(self.mass_split >= T::zero() && self.mass_split <= T::one()) {
            return fail(format!("mass_split must lie in [0, 1], got {}", self.mass_split));
        }
        if self.model == Model::Single {
            if self.potentials.iter().any(|p| *p != Potential::None) {
                return fail("the single model has no external potential".into());
            }
            if self.eta != T::zero() || self.background_field != T::zero() {
                return fail("eta and background_field apply to the binary model only".into());
            }
        }
        for p in &self.potentials {
            if let Potential::Harmonic(k) = p {
                if !k.is_finite() {
                    return fail("harmonic strength must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Warning text when `beta` lies beyond the tabulated existence bound.
    pub fn existence_warning(&self) -> Option<String> {
        let s = self.winding as usize;
        let beta = self.beta.to_f64_lossy();
        match self.model {
            Model::Single => {
                let bound = *SINGLE_THRESHOLDS.get(s)?;
                (beta > bound).then(|| {
                    format!(
                        "beta = {beta} exceeds the critical value {bound} for S = {s}; \
                         no symmetric or central vortex state exists"
                    )
                })
            }
            Model::Binary => {
                let bound = *BINARY_THRESHOLDS.get(s)?;
                if beta > 2.0 * bound {
                    Some(format!(
                        "beta = {beta} exceeds 2 x {bound} for S = {s}; \
                         when beta > 2 beta_b there does not exist any steady state"
                    ))
                } else if beta > bound {
                    Some(format!(
                        "beta = {beta} exceeds the existence bound {bound} for S = {s}; \
                         a steady state is not guaranteed"
                    ))
                } else {
                    None
                }
            }
        }
    }
}

/// Radial profile(s) in the winding-dependent Dirichlet basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T> {
    pub winding: u32,
    pub radius: T,
    pub basis: Arc<BasisFamily<T>>,
    /// Coefficient vectors, one per component.
    pub components: Vec<Vec<T>>,
}

impl<T: Real> WaveFunction<T> {
    pub fn new(
        winding: u32,
        radius: T,
        basis: Arc<BasisFamily<T>>,
        components: Vec<Vec<T>>,
    ) -> Result<Self> {
        for c in &components {
            if c.len() != basis.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: basis.dimension(),
                    found: c.len(),
                });
            }
        }
        Ok(Self {
            winding,
            radius,
            basis,
            components,
        })
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> SpectralField<T> {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.components[j].clone(),
        }
    }

    /// Value of component `j` at physical radius `r`.
    pub fn at_radius(&self, j: usize, r: T) -> T {
        let x = T::lit(2.0) * r / self.radius - T::one();
        self.basis.eval_expansion(&self.components[j], x)
    }

    pub fn with_components(&self, components: Vec<Vec<T>>) -> Self {
        Self {
            components,
            ..self.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.is_finite())
    }
}

/// Scalar diagnostics of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    pub energy: T,
    pub chemical_potential: T,
    pub residual_norm: T,
    /// Per-component masses; a single entry for the single model.
    pub masses: Vec<T>,
}

/// Everything derived from one state: nodal values, field, energy, `μ`,
/// force loads and residual.
#[derive(Debug, Clone)]
pub struct Evaluation<T> {
    pub nodal: Vec<Vec<T>>,
    pub field: MagneticField<T>,
    pub kinetic: T,
    pub energy: T,
    pub mu: T,
    /// `load(f_j)` for each component.
    pub loads: Vec<Vec<T>>,
    pub residual: Vec<Vec<T>>,
    pub residual_norm: T,
}

/// Assembled discretization of one [`ModelParams`].
#[derive(Debug, Clone)]
pub struct GpProblem<T> {
    params: ModelParams<T>,
    basis: Arc<BasisFamily<T>>,
    nodal: NodalOperator<T>,
    mass: BandedMatrix<T>,
    mass_factor: BandedCholesky<T>,
    /// `A + S²B`
    laplacian: BandedMatrix<T>,
    stiffness: BandedMatrix<T>,
    poisson: PoissonWorkspace<T>,
    /// Potential values at the nodes, one row per component.
    potential_nodal: Vec<Vec<T>>,
}

impl<T: Real> GpProblem<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        params.validate()?;
        if let Some(msg) = params.existence_warning() {
            warn!("{msg}");
        }
        let n = params.modes;
        let radius = params.radius;
        let basis = Arc::new(BasisFamily::for_winding(params.winding, n)?);
        let grid = gauss_lobatto::<T>(n + 4)?;
        let nodal = NodalOperator::new(&basis, grid.clone())?;
        let a = build_matrix_a(&basis)?;
        let laplacian = if basis.kind() == BasisKind::DirichletBoth {
            let s2 = T::of((params.winding as usize).pow(2));
            BandedMatrix::combination(&[(T::one(), &a), (s2, &build_matrix_b(&basis)?)])
        } else {
            a
        };
        let mass = build_matrix_c(&basis)?;
        let mass_factor = mass.cholesky()?;
        let stiffness = laplacian.scaled(T::lit(2.0) / (radius * radius));
        let poisson = PoissonWorkspace::new(n, radius, grid.clone())?;
        let potential_nodal = params.potentials[..params.model.components()]
            .iter()
            .map(|p| {
                grid.nodes
                    .iter()
                    .map(|&x| p.eval(radius * (x + T::one()) / T::lit(2.0)))
                    .collect()
            })
            .collect();
        Ok(Self {
            params,
            basis,
            nodal,
            mass,
            mass_factor,
            laplacian,
            stiffness,
            poisson,
            potential_nodal,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn model(&self) -> Model {
        self.params.model
    }

    pub fn radius(&self) -> T {
        self.params.radius
    }

    pub fn basis(&self) -> &Arc<BasisFamily<T>> {
        &self.basis
    }

    pub fn nodal(&self) -> &NodalOperator<T> {
        &self.nodal
    }

    /// Mass matrix `C`.
    pub fn mass(&self) -> &BandedMatrix<T> {
        &self.mass
    }

    pub fn mass_factor(&self) -> &BandedCholesky<T> {
        &self.mass_factor
    }

    /// `A + S²B`
    pub fn laplacian(&self) -> &BandedMatrix<T> {
        &self.laplacian
    }

    /// `K = (2/R²)(A + S²B)`
    pub fn stiffness(&self) -> &BandedMatrix<T> {
        &self.stiffness
    }

    pub fn poisson(&self) -> &PoissonWorkspace<T> {
        &self.poisson
    }

    pub fn potential_nodal(&self) -> &[Vec<T>] {
        &self.potential_nodal
    }

    /// Nodal coordinates `r_k` of the working grid.
    pub fn radial_nodes(&self) -> Vec<T> {
        let r = self.radius();
        self.nodal
            .grid()
            .nodes
            .iter()
            .map(|&x| r * (x + T::one()) / T::lit(2.0))
            .collect()
    }

    /// `πR²/2`, the factor turning `ûᵀCv̂` into the weighted inner product.
    pub fn norm_factor(&self) -> T {
        T::PI() * self.radius() * self.radius() / T::lit(2.0)
    }

    pub fn wrap(&self, components: Vec<Vec<T>>) -> Result<WaveFunction<T>> {
        WaveFunction::new(self.params.winding, self.radius(), self.basis.clone(), components)
    }

    fn check_state(&self, components: &[Vec<T>]) -> Result<()> {
        if components.len() != self.params.model.components() {
            return Err(Error::DimensionMismatch {
                expected: self.params.model.components(),
                found: components.len(),
            });
        }
        for c in components {
            if c.len() != self.basis.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: self.basis.dimension(),
                    found: c.len(),
                });
            }
        }
        Ok(())
    }

    /// Weighted inner product summed over components.
    pub fn inner(&self, a: &[Vec<T>], b: &[Vec<T>]) -> T {
        let s: T = a
            .iter()
            .zip(b)
            .map(|(x, y)| self.mass.bilinear(x, y))
            .sum();
        self.norm_factor() * s
    }

    pub fn norm_sq(&self, a: &[Vec<T>]) -> T {
        self.inner(a, a)
    }

    /// Gaussian-vortex profile `r^S e^{-r²/2} / √(πS!)`, L²-projected onto the
    /// basis and normalized. The binary guess splits the mass as
    /// `(√α φ, √(1-α) φ)`.
    pub fn initial_guess(&self) -> Result<WaveFunction<T>> {
        let s = self.params.winding;
        let mut fact = T::one();
        for k in 2..=s as usize {
            fact *= T::of(k);
        }
        let norm = (T::PI() * fact).sqrt().recip();
        let profile =
            |r: T| norm * r.powi(s as i32) * (-(r * r) / T::lit(2.0)).exp();
        // A finer grid than the working one: the Gaussian is not a polynomial.
        let grid = gauss_lobatto::<T>(self.params.modes + 40)?;
        let op = NodalOperator::new(&self.basis, grid)?;
        let radius = self.radius();
        let samples: Vec<T> = op
            .grid()
            .nodes
            .iter()
            .map(|&x| profile(radius * (x + T::one()) / T::lit(2.0)))
            .collect();
        let u = self.mass_factor.solve(&op.load_vector(&samples)?);
        let components = match self.params.model {
            Model::Single => vec![u],
            Model::Binary => {
                let a = self.params.mass_split;
                let scaled = |c: T| u.iter().map(|&v| c * v).collect::<Vec<_>>();
                vec![scaled(a.sqrt()), scaled((T::one() - a).sqrt())]
            }
        };
        self.project(&self.wrap(components)?)
    }

    /// Rescales all components jointly to unit weighted norm.
    pub fn project(&self, state: &WaveFunction<T>) -> Result<WaveFunction<T>> {
        let mut components = state.components.clone();
        self.project_coeffs(&mut components)?;
        Ok(state.with_components(components))
    }

    pub(crate) fn project_coeffs(&self, components: &mut [Vec<T>]) -> Result<T> {
        let n2 = self.norm_sq(components);
        if !(n2 > T::zero()) || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = n2.sqrt().recip();
        for c in components.iter_mut() {
            for v in c.iter_mut() {
                *v *= inv;
            }
        }
        Ok(n2.sqrt())
    }

    /// Per-component masses of a binary state.
    pub fn masses(&self, state: &WaveFunction<T>) -> Result<(T, T)> {
        if self.params.model != Model::Binary || state.components.len() != 2 {
            return Err(Error::WrongModel { expected: "binary" });
        }
        let f = self.norm_factor();
        Ok((
            f * self.mass.bilinear(&state.components[0], &state.components[0]),
            f * self.mass.bilinear(&state.components[1], &state.components[1]),
        ))
    }

    fn component_masses(&self, components: &[Vec<T>]) -> Vec<T> {
        components
            .iter()
            .map(|c| self.norm_factor() * self.mass.bilinear(c, c))
            .collect()
    }

    fn nodal_state(&self, components: &[Vec<T>]) -> Vec<Vec<T>> {
        components
            .iter()
            .map(|c| self.nodal.nodal_values(c))
            .collect()
    }

    /// Poisson source: `u²` for the single model, `u₁u₂` for the binary one.
    fn source(&self, nodal: &[Vec<T>]) -> Vec<T> {
        match self.params.model {
            Model::Single => nodal[0].iter().map(|&u| u * u).collect(),
            Model::Binary => nodal[0].iter().zip(&nodal[1]).map(|(&a, &b)| a * b).collect(),
        }
    }

    fn field_from_nodal(&self, nodal: &[Vec<T>]) -> Result<MagneticField<T>> {
        if self.params.gamma == T::zero() {
            return Ok(self.poisson.zero_field(self.params.gamma));
        }
        self.poisson.solve_field(&self.source(nodal), self.params.gamma)
    }

    /// Solves the field generated by `state`.
    pub fn field_for_state(&self, state: &WaveFunction<T>) -> Result<MagneticField<T>> {
        self.check_state(&state.components)?;
        self.field_from_nodal(&self.nodal_state(&state.components))
    }

    fn kinetic(&self, components: &[Vec<T>]) -> T {
        let s: T = components
            .iter()
            .map(|c| self.laplacian.bilinear(c, c))
            .sum();
        T::PI() * s
    }

    /// Returns `(energy, mu)` from nodal values and the solved field.
    fn energy_and_mu(&self, kinetic: T, nodal: &[Vec<T>], h: &[T]) -> (T, T) {
        let p = &self.params;
        let w = self.nodal.jacobian_weights();
        let quarter = T::PI() * p.radius * p.radius / T::lit(4.0);
        match p.model {
            Model::Single => {
                let u = &nodal[0];
                let mut acc = T::zero();
                for k in 0..w.len() {
                    let u2 = u[k] * u[k];
                    acc += w[k] * (p.beta * u2 * u2 + h[k] * u2);
                }
                let interaction = quarter * acc;
                (kinetic - interaction, kinetic - T::lit(2.0) * interaction)
            }
            Model::Binary => {
                let (u1, u2) = (&nodal[0], &nodal[1]);
                let (v1, v2) = (&self.potential_nodal[0], &self.potential_nodal[1]);
                let h0 = p.background_field;
                let (mut pot, mut quartic, mut cross_bg, mut cross_h) =
                    (T::zero(), T::zero(), T::zero(), T::zero());
                for k in 0..w.len() {
                    let (a2, b2, ab) = (u1[k] * u1[k], u2[k] * u2[k], u1[k] * u2[k]);
                    pot += w[k] * (v1[k] * a2 + v2[k] * b2 - p.eta * (a2 - b2));
                    quartic += w[k] * p.beta * a2 * b2;
                    cross_bg += w[k] * h0 * ab;
                    cross_h += w[k] * h[k] * ab;
                }
                let half = quarter * T::lit(2.0);
                let two = T::lit(2.0);
                let base = kinetic + half * pot;
                let energy = base - half * (quartic + two * cross_bg + cross_h);
                let mu = base - half * (two * quartic + two * cross_bg + two * cross_h);
                (energy, mu)
            }
        }
    }

    /// Nodal forces `f_j`, so that the weak Euler-Lagrange equation reads
    /// `Kû = load(f) + μCû`.
    fn forces(&self, nodal: &[Vec<T>], h: &[T]) -> Vec<Vec<T>> {
        let p = &self.params;
        match p.model {
            Model::Single => vec![nodal[0]
                .iter()
                .zip(h)
                .map(|(&u, &hk)| (p.beta * u * u + hk) * u)
                .collect()],
            Model::Binary => {
                let (u1, u2) = (&nodal[0], &nodal[1]);
                let h0 = p.background_field;
                let n = u1.len();
                let mut f1 = Vec::with_capacity(n);
                let mut f2 = Vec::with_capacity(n);
                for k in 0..n {
                    let coupling = h0 + h[k];
                    let d1 = self.potential_nodal[0][k] - p.eta - p.beta * u2[k] * u2[k];
                    let d2 = self.potential_nodal[1][k] + p.eta - p.beta * u1[k] * u1[k];
                    f1.push(-d1 * u1[k] + coupling * u2[k]);
                    f2.push(-d2 * u2[k] + coupling * u1[k]);
                }
                vec![f1, f2]
            }
        }
    }

    /// Energy of raw coefficient blocks, with the field re-solved.
    pub fn energy_of(&self, components: &[Vec<T>]) -> Result<T> {
        self.check_state(components)?;
        let nodal = self.nodal_state(components);
        let field = self.field_from_nodal(&nodal)?;
        Ok(self.energy_and_mu(self.kinetic(components), &nodal, &field.nodal).0)
    }

    /// Full evaluation of raw coefficient blocks.
    pub fn evaluate_coeffs(&self, components: &[Vec<T>]) -> Result<Evaluation<T>> {
        self.check_state(components)?;
        let nodal = self.nodal_state(components);
        let field = self.field_from_nodal(&nodal)?;
        self.evaluate_with(components, nodal, field)
    }

    fn evaluate_with(
        &self,
        components: &[Vec<T>],
        nodal: Vec<Vec<T>>,
        field: MagneticField<T>,
    ) -> Result<Evaluation<T>> {
        let kinetic = self.kinetic(components);
        let (energy, mu) = self.energy_and_mu(kinetic, &nodal, &field.nodal);
        let loads = self
            .forces(&nodal, &field.nodal)
            .iter()
            .map(|f| self.nodal.load_vector(f))
            .collect::<Result<Vec<_>>>()?;
        let mut residual = Vec::with_capacity(components.len());
        let mut norm2 = T::zero();
        for (u, load) in components.iter().zip(&loads) {
            let ku = self.stiffness.matvec(u);
            let cu = self.mass.matvec(u);
            let mut rhs: Vec<T> = ku
                .iter()
                .zip(load)
                .zip(&cu)
                .map(|((&k, &l), &c)| k - l - mu * c)
                .collect();
            self.mass_factor.solve_in_place(&mut rhs);
            norm2 += self.mass.bilinear(&rhs, &rhs);
            residual.push(rhs);
        }
        let residual_norm = (self.norm_factor() * norm2).max(T::zero()).sqrt();
        Ok(Evaluation {
            nodal,
            field,
            kinetic,
            energy,
            mu,
            loads,
            residual,
            residual_norm,
        })
    }

    pub fn evaluate(&self, state: &WaveFunction<T>) -> Result<Evaluation<T>> {
        self.evaluate_coeffs(&state.components)
    }

    fn nodal_for(&self, state: &WaveFunction<T>, field: &MagneticField<T>) -> Result<Vec<Vec<T>>> {
        self.check_state(&state.components)?;
        if field.nodal.len() != self.nodal.num_points() {
            return Err(Error::DimensionMismatch {
                expected: self.nodal.num_points(),
                found: field.nodal.len(),
            });
        }
        Ok(self.nodal_state(&state.components))
    }

    /// Energy of `state` given its solved field.
    pub fn energy(&self, state: &WaveFunction<T>, field: &MagneticField<T>) -> Result<T> {
        let nodal = self.nodal_for(state, field)?;
        Ok(self
            .energy_and_mu(self.kinetic(&state.components), &nodal, &field.nodal)
            .0)
    }

    /// Chemical potential of `state` given its solved field.
    pub fn chemical_potential(
        &self,
        state: &WaveFunction<T>,
        field: &MagneticField<T>,
    ) -> Result<T> {
        let nodal = self.nodal_for(state, field)?;
        Ok(self
            .energy_and_mu(self.kinetic(&state.components), &nodal, &field.nodal)
            .1)
    }

    /// Residual coefficients and their weighted norm.
    pub fn residual(
        &self,
        state: &WaveFunction<T>,
        field: &MagneticField<T>,
    ) -> Result<(Vec<SpectralField<T>>, T)> {
        let nodal = self.nodal_for(state, field)?;
        let ev = self.evaluate_with(&state.components, nodal, field.clone())?;
        let fields = ev
            .residual
            .into_iter()
            .map(|coeffs| SpectralField {
                basis: self.basis.clone(),
                coeffs,
            })
            .collect();
        Ok((fields, ev.residual_norm))
    }

    pub fn diagnostics(&self, state: &WaveFunction<T>) -> Result<Diagnostics<T>> {
        let ev = self.evaluate(state)?;
        Ok(self.diagnostics_from(state, &ev))
    }

    pub fn diagnostics_from(&self, state: &WaveFunction<T>, ev: &Evaluation<T>) -> Diagnostics<T> {
        Diagnostics {
            energy: ev.energy,
            chemical_potential: ev.mu,
            residual_norm: ev.residual_norm,
            masses: self.component_masses(&state.components),
        }
    }

    /// The interaction integral linking `μ` and `E`:
    /// `π∫(βφ⁴ + Hφ²) r dr` or `2π∫(βφ₁²φ₂² + Hφ₁φ₂) r dr`.
    pub fn interaction_gap(&self, state: &WaveFunction<T>, field: &MagneticField<T>) -> Result<T> {
        let nodal = self.nodal_for(state, field)?;
        Ok(self.interaction_from_nodal(&nodal, &field.nodal))
    }

    fn interaction_from_nodal(&self, nodal: &[Vec<T>], h: &[T]) -> T {
        let p = &self.params;
        let w = self.nodal.jacobian_weights();
        let quarter = T::PI() * p.radius * p.radius / T::lit(4.0);
        let integrand: Vec<T> = match p.model {
            Model::Single => nodal[0]
                .iter()
                .zip(h)
                .map(|(&u, &hk)| p.beta * u.powi(4) + hk * u * u)
                .collect(),
            Model::Binary => (0..w.len())
                .map(|k| {
                    let (a, b) = (nodal[0][k], nodal[1][k]);
                    T::lit(2.0) * (p.beta * a * a * b * b + h[k] * a * b)
                })
                .collect(),
        };
        quarter * dot(&integrand, w)
    }

    /// `|μ - (E - gap)|`, with the gap integral recomputed independently.
    pub fn identity_error(&self, ev: &Evaluation<T>) -> T {
        let gap = self.interaction_from_nodal(&ev.nodal, &ev.field.nodal);
        (ev.mu - (ev.energy - gap)).abs()
    }
}
