//! Argument parsing and subcommand dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, TABLES};
use crate::error::{CliError, Result};
use crate::run;
use crate::runspec::{read_config, RunSpec};
use crate::sweep::{self, Sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gpvortex", version, about = "Steady vortex states of magnetic Gross-Pitaevskii models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configuration.
    #[command(allow_negative_numbers = true)]
    Solve(SpecArgs),
    /// Solve one configuration per value of a swept key.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Key to vary, e.g. `eta` or `background-field`.
        #[arg(long)]
        over: Option<String>,
        /// Comma list or inclusive range `start:stop:step`.
        #[arg(long)]
        values: Option<String>,
        /// Starting configuration: `eta` or `background-field`.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Reproduce a reference table and grade it against the stored values.
    Bench {
        /// One of tab2..tab6, or `all`.
        table: String,
        /// Directory for `bench_<table>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by `solve` and `sweep`. Values stay textual until the
/// entries are merged with the config file.
#[derive(Debug, Default, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long)]
    pub winding: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub background_field: Option<String>,
    #[arg(long)]
    pub mass_split: Option<String>,
    /// none | harmonic:<k> | lattice
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub modes: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    /// One value, or a comma pair for the two binary components.
    #[arg(long)]
    pub alpha0: Option<String>,
    #[arg(long)]
    pub alpha1: Option<String>,
    #[arg(long)]
    pub alpha2: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub max_iter: Option<String>,
    #[arg(long)]
    pub velocity_scale: Option<String>,
    /// fr | pr+
    #[arg(long)]
    pub momentum: Option<String>,
    #[arg(long)]
    pub perturb_delta: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// `key = value` file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SpecArgs {
    fn flag_entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("solver", &self.solver),
            ("winding", &self.winding),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("eta", &self.eta),
            ("background-field", &self.background_field),
            ("mass-split", &self.mass_split),
            ("potential", &self.potential),
            ("radius", &self.radius),
            ("modes", &self.modes),
            ("tau", &self.tau),
            ("alpha0", &self.alpha0),
            ("alpha1", &self.alpha1),
            ("alpha2", &self.alpha2),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("velocity-scale", &self.velocity_scale),
            ("momentum", &self.momentum),
            ("perturb-delta", &self.perturb_delta),
            ("seed", &self.seed),
            ("out", &self.out),
        ]
    }

    /// `base`, then the config file, then the flags; later layers win.
    pub fn entries_over(&self, mut base: BTreeMap<String, String>) -> Result<BTreeMap<String, String>> {
        if let Some(path) = &self.config {
            base.extend(read_config(path)?);
        }
        for (key, value) in self.flag_entries() {
            if let Some(v) = value {
                base.insert(key.to_string(), v.clone());
            }
        }
        Ok(base)
    }

    pub fn resolve(&self) -> Result<RunSpec> {
        RunSpec::from_entries(&self.entries_over(BTreeMap::new())?)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Solve(args) => {
            let spec = args.resolve()?;
            let outcome = run::run(&spec)?;
            print!("{}", run::summary(&outcome));
            Ok(outcome.exit_code())
        }
        Command::Sweep {
            spec,
            over,
            values,
            preset,
        } => {
            let (base, preset_key, preset_values) = match &preset {
                Some(name) => {
                    let (b, k, v) = sweep::preset(name)?;
                    (b, Some(k), Some(v))
                }
                None => (BTreeMap::new(), None, None),
            };
            let entries = spec.entries_over(base)?;
            let key = over
                .as_deref()
                .or(preset_key)
                .ok_or_else(|| CliError::Usage("sweep needs --over <key> or --preset".into()))?;
            let list = values
                .as_deref()
                .or(preset_values)
                .ok_or_else(|| CliError::Usage("sweep needs --values".into()))?;
            let out = entries.get("out").map(PathBuf::from);
            let sweep = Sweep::new(&entries, key, sweep::parse_values(list)?)?;
            let points = sweep.run()?;
            let csv = sweep::sweep_csv(&sweep.key, &points);
            match &out {
                Some(dir) => sweep::write_sweep(dir, &sweep.key, &points)?,
                None => print!("{csv}"),
            }
            let all = points.iter().all(|p| p.outcome.converged());
            Ok(if all { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
        Command::Bench { table, out } => {
            let ids: Vec<&str> = if table == "all" {
                TABLES.to_vec()
            } else {
                vec![table.as_str()]
            };
            let mut ok = true;
            for id in ids {
                let report = bench::run_table(id)?;
                print!("{}", report.render());
                if let Some(dir) = &out {
                    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                    let path = dir.join(format!("bench_{id}.csv"));
                    fs::write(&path, report.to_csv()).map_err(|e| CliError::io(path, e))?;
                }
                ok &= report.passed();
            }
            Ok(if ok { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gpvortex::Model;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("gpvortex").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn reference_solve_flags() {
        let Command::Solve(a) = parse(&[
            "solve", "--model", "single", "--solver", "ppncg", "--winding", "2", "--beta", "30",
            "--gamma", "3.141592653589793", "--radius", "20", "--modes", "200",
        ]) else {
            panic!("expected solve");
        };
        let s = a.resolve().unwrap();
        assert_eq!(s.model, Model::Single);
        assert_eq!((s.winding, s.beta, s.radius, s.modes), (2, 30.0, 20.0, 200));
        assert_eq!(s.gamma, std::f64::consts::PI);
    }

    #[test]
    fn negative_values_are_accepted() {
        let Command::Solve(a) =
            parse(&["solve", "--model", "binary", "--solver", "gflm", "--eta", "-10"])
        else {
            panic!("expected solve");
        };
        assert_eq!(a.resolve().unwrap().eta, -10.0);
    }

    #[test]
    fn empty_solve_lists_required_flags() {
        let Command::Solve(a) = parse(&["solve"]) else {
            panic!("expected solve");
        };
        let msg = a.resolve().unwrap_err().to_string();
        assert_eq!(msg, "missing required flags: --model, --solver");
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(main_with(["gpvortex"]), EXIT_USAGE);
        assert_eq!(main_with(["gpvortex", "solve", "--bogus", "1"]), EXIT_USAGE);
        assert_eq!(main_with(["gpvortex", "solve"]), EXIT_USAGE);
        assert_eq!(main_with(["gpvortex", "bench", "tab9"]), EXIT_USAGE);
        assert_eq!(main_with(["gpvortex", "--help"]), EXIT_OK);
    }
}
