//! Parameter sweeps: one independent solve per value, run in parallel and
//! collected in input order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::run::{self, Outcome};
use crate::runspec::{normalize_key, RunSpec};

/// Keys that can be swept. Pairs and categorical keys are excluded.
pub const SWEEPABLE: &[&str] = &[
    "winding",
    "beta",
    "gamma",
    "eta",
    "background-field",
    "mass-split",
    "radius",
    "modes",
    "tau",
    "tol",
    "velocity-scale",
    "seed",
];

#[derive(Debug, Clone)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<String>,
    pub specs: Vec<RunSpec>,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub outcome: Outcome,
}

impl Sweep {
    /// Substitutes each value for `key` in `base` and validates every spec.
    pub fn new(base: &BTreeMap<String, String>, key: &str, values: Vec<String>) -> Result<Self> {
        let key = normalize_key(key);
        if !SWEEPABLE.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "cannot sweep `{key}`; sweepable keys: {}",
                SWEEPABLE.join(", ")
            )));
        }
        if values.is_empty() {
            return Err(CliError::Usage("sweep needs at least one value".into()));
        }
        let specs = values
            .iter()
            .map(|v| {
                let mut e = base.clone();
                e.insert(key.clone(), v.clone());
                e.remove("out");
                RunSpec::from_entries(&e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { key, values, specs })
    }

    pub fn run(&self) -> Result<Vec<SweepPoint>> {
        self.specs
            .par_iter()
            .zip(self.values.par_iter())
            .map(|(spec, value)| {
                run::solve(spec).map(|outcome| SweepPoint {
                    value: value.clone(),
                    outcome,
                })
            })
            .collect()
    }
}

/// `a,b,c` or an inclusive range `start:stop:step`.
pub fn parse_values(text: &str) -> Result<Vec<String>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [_] => Ok(text
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()),
        [a, b, c] => {
            let num = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::invalid("values", text, "range bounds must be numbers"))
            };
            let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
            if !(step > 0.0) || stop < start {
                return Err(CliError::invalid(
                    "values",
                    text,
                    "need start <= stop and a positive step",
                ));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|i| format!("{}", start + i as f64 * step))
                .collect())
        }
        _ => Err(CliError::invalid(
            "values",
            text,
            "expected a comma list or start:stop:step",
        )),
    }
}

/// One row per sweep value: status, diagnostics and component masses.
pub fn sweep_csv(key: &str, points: &[SweepPoint]) -> String {
    let comps = points.first().map_or(1, |p| p.outcome.masses().len());
    let mut s = format!("{key},status,iterations,energy,mu,residual");
    for j in 1..=comps {
        let _ = write!(s, ",mass{j}");
    }
    s.push('\n');
    for p in points {
        let r = &p.outcome.result;
        let _ = write!(
            s,
            "{},{},{},{:.10},{:.10},{:.10e}",
            p.value,
            r.status,
            r.iterations,
            r.energy(),
            r.chemical_potential(),
            r.residual_norm()
        );
        for m in p.outcome.masses() {
            let _ = write!(s, ",{m:.10}");
        }
        s.push('\n');
    }
    s
}

/// Writes `sweep.csv` plus one `profile_<index>.csv` per point.
pub fn write_sweep(dir: &Path, key: &str, points: &[SweepPoint]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("sweep.csv");
    fs::write(&path, sweep_csv(key, points)).map_err(|e| CliError::io(path, e))?;
    for (i, p) in points.iter().enumerate() {
        let path = dir.join(format!("profile_{i:03}.csv"));
        fs::write(&path, run::profile_csv(&p.outcome)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// Named starting points for the binary mass and energy sweeps: `S = 13`,
/// `β = 300`, `γ = 5π`, harmonic trap `5r²/8`, 80/20 initial split.
pub fn preset(name: &str) -> Result<(BTreeMap<String, String>, &'static str, &'static str)> {
    let mut e: BTreeMap<String, String> = [
        ("model", "binary"),
        ("solver", "ppncg"),
        ("winding", "13"),
        ("beta", "300"),
        ("gamma", "15.707963267948966"),
        ("mass-split", "0.8"),
        ("potential", "harmonic:1.25"),
        ("radius", "16"),
        ("modes", "160"),
        ("tol", "5e-10"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    match name {
        "eta" => {
            e.insert("background-field".into(), "10".into());
            Ok((e, "eta", "0:100:10"))
        }
        "background-field" => {
            e.insert("eta".into(), "0".into());
            Ok((e, "background-field", "0:100:10"))
        }
        _ => Err(CliError::Usage(format!(
            "unknown preset `{name}`; expected eta or background-field"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0, 10,20").unwrap(), ["0", "10", "20"]);
        assert_eq!(parse_values("0:100:25").unwrap(), ["0", "25", "50", "75", "100"]);
        assert_eq!(parse_values("0.1:0.3:0.1").unwrap().len(), 3);
        assert!(parse_values("1:0:1").is_err());
        assert!(parse_values("0:1").is_err());
        assert!(parse_values("0:x:1").is_err());
    }

    #[test]
    fn rejects_non_sweepable_keys() {
        let (base, _, _) = preset("eta").unwrap();
        assert!(Sweep::new(&base, "solver", vec!["gflm".into()]).is_err());
        assert!(Sweep::new(&base, "alpha0", vec!["1".into()]).is_err());
        assert!(Sweep::new(&base, "eta", vec![]).is_err());
        let s = Sweep::new(&base, "background_field", vec!["0".into(), "10".into()]).unwrap();
        assert_eq!(s.key, "background-field");
        assert_eq!(s.specs[1].background_field, 10.0);
    }

    #[test]
    fn presets() {
        for name in ["eta", "background-field"] {
            let (base, key, values) = preset(name).unwrap();
            assert_eq!(key, name);
            assert_eq!(parse_values(values).unwrap().len(), 11);
            let spec = RunSpec::from_entries(&base).unwrap();
            assert_eq!(spec.winding, 13);
        }
        assert!(preset("beta").is_err());
    }
}
