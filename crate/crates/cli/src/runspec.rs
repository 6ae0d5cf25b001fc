//! Run specifications: defaults, `key = value` config files and the layering
//! of config entries under command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use gpvortex::{
    CgConfig64, FlowConfig64, Inertia, Model, ModelParams64, Momentum, PerturbConfig, Potential,
    Scheme,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Gflm,
    Asgf1,
    Asgf2,
    Ppncg,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Gflm, Solver::Asgf1, Solver::Asgf2, Solver::Ppncg];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Gflm => "gflm",
            Solver::Asgf1 => "asgf1",
            Solver::Asgf2 => "asgf2",
            Solver::Ppncg => "ppncg",
        }
    }

    pub fn scheme(self) -> Option<Scheme> {
        match self {
            Solver::Gflm => Some(Scheme::Gflm),
            Solver::Asgf1 => Some(Scheme::Asgf1),
            Solver::Asgf2 => Some(Scheme::Asgf2),
            Solver::Ppncg => None,
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recognized keys with their defaults, in print order.
///
/// Config files and flags share these names (`--background-field` on the
/// command line is `background-field = ...` in a file).
pub const KEYS: &[(&str, &str)] = &[
    ("model", "required: single | binary"),
    ("solver", "required: gflm | asgf1 | asgf2 | ppncg"),
    ("winding", "0"),
    ("beta", "0"),
    ("gamma", "0"),
    ("eta", "0"),
    ("background-field", "0"),
    ("mass-split", "0.5"),
    ("potential", "none"),
    ("radius", "16"),
    ("modes", "160"),
    ("tau", "0.1"),
    ("alpha0", "1"),
    ("alpha1", "0"),
    ("alpha2", "0"),
    ("tol", "1e-10"),
    ("max-iter", "20000"),
    ("velocity-scale", "0"),
    ("momentum", "pr+"),
    ("perturb-delta", "0 (no saddle escape)"),
    ("seed", "0"),
    ("out", "none (nothing written)"),
];

/// Everything needed to reproduce one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub model: Model,
    pub solver: Solver,
    pub winding: u32,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub background_field: f64,
    pub mass_split: f64,
    /// Applied to both components.
    pub potential: Potential<f64>,
    pub radius: f64,
    pub modes: usize,
    pub tau: f64,
    /// Per-component inertia coefficients; the single model reads index 0.
    pub alpha0: [f64; 2],
    pub alpha1: [f64; 2],
    pub alpha2: [f64; 2],
    pub tol: f64,
    pub max_iter: usize,
    pub velocity_scale: f64,
    pub momentum: Momentum,
    /// Noise amplitude of the saddle escape; zero disables it.
    pub perturb_delta: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(model: Model, solver: Solver) -> Self {
        Self {
            model,
            solver,
            winding: 0,
            beta: 0.0,
            gamma: 0.0,
            eta: 0.0,
            background_field: 0.0,
            mass_split: 0.5,
            potential: Potential::None,
            radius: 16.0,
            modes: 160,
            tau: 0.1,
            alpha0: [1.0; 2],
            alpha1: [0.0; 2],
            alpha2: [0.0; 2],
            tol: 1e-10,
            max_iter: 20000,
            velocity_scale: 0.0,
            momentum: Momentum::PolakRibierePlus,
            perturb_delta: 0.0,
            seed: 0,
            out: None,
        }
    }

    /// Sets the same inertia triple on both components.
    pub fn with_alpha(mut self, alpha0: f64, alpha1: f64, alpha2: f64) -> Self {
        self.alpha0 = [alpha0; 2];
        self.alpha1 = [alpha1; 2];
        self.alpha2 = [alpha2; 2];
        self
    }

    /// Builds a spec from resolved entries. `model` and `solver` must be
    /// present; every other key falls back to its default.
    pub fn from_entries(entries: &BTreeMap<String, String>) -> Result<Self> {
        for key in entries.keys() {
            if !KEYS.iter().any(|(k, _)| k == key) {
                return Err(CliError::UnknownKey(key.clone()));
            }
        }
        let missing: Vec<&str> = ["model", "solver"]
            .into_iter()
            .filter(|k| !entries.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            let flags: Vec<String> = missing.iter().map(|k| format!("--{k}")).collect();
            return Err(CliError::MissingRequired(flags.join(", ")));
        }
        let model = parse_model(&entries["model"])?;
        let solver = parse_solver(&entries["solver"])?;
        let mut spec = Self::new(model, solver);
        for (key, value) in entries {
            spec.set(key, value)?;
        }
        spec.check()?;
        Ok(spec)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = parse_model(value)?,
            "solver" => self.solver = parse_solver(value)?,
            "winding" => self.winding = parse_num(key, value)?,
            "beta" => self.beta = parse_real(key, value)?,
            "gamma" => self.gamma = parse_real(key, value)?,
            "eta" => self.eta = parse_real(key, value)?,
            "background-field" => self.background_field = parse_real(key, value)?,
            "mass-split" => self.mass_split = parse_real(key, value)?,
            "potential" => self.potential = parse_potential(value)?,
            "radius" => self.radius = parse_real(key, value)?,
            "modes" => self.modes = parse_num(key, value)?,
            "tau" => self.tau = parse_real(key, value)?,
            "alpha0" => self.alpha0 = parse_pair(key, value)?,
            "alpha1" => self.alpha1 = parse_pair(key, value)?,
            "alpha2" => self.alpha2 = parse_pair(key, value)?,
            "tol" => self.tol = parse_real(key, value)?,
            "max-iter" => self.max_iter = parse_num(key, value)?,
            "velocity-scale" => self.velocity_scale = parse_real(key, value)?,
            "momentum" => {
                self.momentum = match value {
                    "fr" => Momentum::FletcherReeves,
                    "pr+" => Momentum::PolakRibierePlus,
                    _ => return Err(CliError::invalid(key, value, "expected fr or pr+")),
                }
            }
            "perturb-delta" => self.perturb_delta = parse_real(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(CliError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        if self.model == Model::Single {
            for (key, pair) in [
                ("alpha0", self.alpha0),
                ("alpha1", self.alpha1),
                ("alpha2", self.alpha2),
            ] {
                if pair[0] != pair[1] {
                    return Err(CliError::invalid(
                        key,
                        &format_pair(pair),
                        "a comma pair applies to the binary model only",
                    ));
                }
            }
        }
        if self.perturb_delta < 0.0 {
            return Err(CliError::invalid(
                "perturb-delta",
                &format_real(self.perturb_delta),
                "must be non-negative",
            ));
        }
        self.model_params().validate()?;
        Ok(())
    }

    /// Every key with its value, in [`KEYS`] order. `out` is omitted when unset.
    pub fn to_entries(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("model", self.model.name().to_string()),
            ("solver", self.solver.name().to_string()),
            ("winding", self.winding.to_string()),
            ("beta", format_real(self.beta)),
            ("gamma", format_real(self.gamma)),
            ("eta", format_real(self.eta)),
            ("background-field", format_real(self.background_field)),
            ("mass-split", format_real(self.mass_split)),
            ("potential", format_potential(&self.potential)),
            ("radius", format_real(self.radius)),
            ("modes", self.modes.to_string()),
            ("tau", format_real(self.tau)),
            ("alpha0", format_pair(self.alpha0)),
            ("alpha1", format_pair(self.alpha1)),
            ("alpha2", format_pair(self.alpha2)),
            ("tol", format_real(self.tol)),
            ("max-iter", self.max_iter.to_string()),
            ("velocity-scale", format_real(self.velocity_scale)),
            ("momentum", self.momentum.name().to_string()),
            ("perturb-delta", format_real(self.perturb_delta)),
            ("seed", self.seed.to_string()),
        ];
        if let Some(out) = &self.out {
            v.push(("out", out.display().to_string()));
        }
        v
    }

    pub fn to_config(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_entries() {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    pub fn from_config(text: &str) -> Result<Self> {
        Self::from_entries(&parse_config(text)?)
    }

    pub fn model_params(&self) -> ModelParams64 {
        let mut p = ModelParams64::new(self.model);
        p.winding = self.winding;
        p.beta = self.beta;
        p.gamma = self.gamma;
        p.eta = self.eta;
        p.background_field = self.background_field;
        p.mass_split = self.mass_split;
        p.potentials = [self.potential; 2];
        p.radius = self.radius;
        p.modes = self.modes;
        p
    }

    /// Flow settings; `None` for the optimizer.
    pub fn flow_config(&self) -> Option<FlowConfig64> {
        let scheme = self.solver.scheme()?;
        let mut cfg = FlowConfig64::new(scheme, self.tau);
        cfg.inertia = [0, 1].map(|j| Inertia::new(self.alpha0[j], self.alpha1[j], self.alpha2[j]));
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.initial_velocity_scale = self.velocity_scale;
        Some(cfg)
    }

    pub fn cg_config(&self) -> CgConfig64 {
        let mut cfg = CgConfig64::default();
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.momentum = self.momentum;
        cfg
    }

    pub fn perturb_config(&self) -> Option<PerturbConfig<f64>> {
        (self.perturb_delta > 0.0).then(|| {
            let mut pc = PerturbConfig::with_seed(self.seed);
            pc.noise_amplitude = self.perturb_delta;
            pc
        })
    }
}

impl fmt::Display for RunSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_config())
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// underscores in keys are read as hyphens. Later lines win.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::ConfigSyntax {
            line: i + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = normalize_key(key.trim());
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::ConfigSyntax {
                line: i + 1,
                reason: "empty key or value".into(),
            });
        }
        out.insert(key, value.to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn normalize_key(key: &str) -> String {
    key.replace('_', "-")
}

/// Shortest decimal form that parses back to the same bits.
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}

fn format_pair(p: [f64; 2]) -> String {
    if p[0].to_bits() == p[1].to_bits() {
        format_real(p[0])
    } else {
        format!("{},{}", format_real(p[0]), format_real(p[1]))
    }
}

fn format_potential(p: &Potential<f64>) -> String {
    match p {
        Potential::Harmonic(k) => format!("harmonic:{}", format_real(*k)),
        other => other.to_string(),
    }
}

fn parse_model(value: &str) -> Result<Model> {
    match value {
        "single" => Ok(Model::Single),
        "binary" => Ok(Model::Binary),
        _ => Err(CliError::invalid("model", value, "expected single or binary")),
    }
}

fn parse_solver(value: &str) -> Result<Solver> {
    Solver::ALL
        .into_iter()
        .find(|s| s.name() == value)
        .ok_or_else(|| CliError::invalid("solver", value, "expected gflm, asgf1, asgf2 or ppncg"))
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .parse()
        .map_err(|_| CliError::invalid(key, value, "not a number"))?;
    if !x.is_finite() {
        return Err(CliError::invalid(key, value, "must be finite"));
    }
    Ok(x)
}

fn parse_num<N: std::str::FromStr>(key: &str, value: &str) -> Result<N> {
    value
        .parse()
        .map_err(|_| CliError::invalid(key, value, "not a non-negative integer"))
}

fn parse_pair(key: &str, value: &str) -> Result<[f64; 2]> {
    match value.split_once(',') {
        None => Ok([parse_real(key, value)?; 2]),
        Some((a, b)) => Ok([parse_real(key, a.trim())?, parse_real(key, b.trim())?]),
    }
}

fn parse_potential(value: &str) -> Result<Potential<f64>> {
    match value {
        "none" => Ok(Potential::None),
        "lattice" => Ok(Potential::Lattice),
        _ => match value.strip_prefix("harmonic:") {
            Some(k) => Ok(Potential::Harmonic(parse_real("potential", k)?)),
            None => Err(CliError::invalid(
                "potential",
                value,
                "expected none, harmonic:<k> or lattice",
            )),
        },
    }
}
