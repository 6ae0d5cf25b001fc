//! Acceptance suite. Each criterion yields one verdict line on stderr (written
//! past the test harness capture so it shows in plain `cargo test` output).
//!
//! A criterion that fails is only tolerated when its failing items are
//! exactly the documented deviations in `KNOWN_DEVIATIONS`; any other
//! failure, or a known one that starts passing, fails the test.

use std::collections::BTreeMap;
use std::f64::consts::{E as EULER, PI};
use std::io::Write;

use gpvortex::spectral::{
    build_matrix_a, build_matrix_b, build_matrix_c, build_matrix_hp, gauss_lobatto, BandedMatrix,
    BasisFamily,
};
use gpvortex::{
    run_flow, run_ppncg, CgConfig64, FlowConfig64, GpProblem64, Inertia, Model, ModelParams64,
    PerturbConfig, PoissonWorkspace, Potential, Scheme, SolveStatus, WaveFunction64,
};
use gpvortex_cli::bench::{self, BenchReport, Expect, GOLDEN_TOL, TABLES};
use gpvortex_cli::Solver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failing items that are recorded deviations, per criterion.
const KNOWN_DEVIATIONS: &[(u32, &[&str])] = &[(
    1,
    &[
        "asgf2 tau=0.01 (1e-5,0.001,0.002)",
        "asgf2 tau=0.01 (1e-6,0.001,0.0015)",
    ],
)];

struct Verdict {
    id: u32,
    title: &'static str,
    failures: Vec<String>,
    detail: String,
}

impl Verdict {
    fn new(id: u32, title: &'static str, failures: Vec<String>, detail: String) -> Self {
        Self {
            id,
            title,
            failures,
            detail,
        }
    }

    fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn known(&self) -> Option<&'static [&'static str]> {
        KNOWN_DEVIATIONS
            .iter()
            .find(|(id, _)| *id == self.id)
            .map(|(_, items)| *items)
    }

    fn line(&self) -> String {
        let mut s = format!(
            "acceptance {:>2} {} {}: {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        );
        if !self.passed() {
            s.push_str(&format!("; failing: {}", self.failures.join(" | ")));
            if self.known().is_some_and(|k| same_items(k, &self.failures)) {
                s.push_str(" (recorded deviation)");
            }
        }
        s
    }
}

fn same_items(known: &[&str], failures: &[String]) -> bool {
    let mut a: Vec<&str> = known.to_vec();
    let mut b: Vec<&str> = failures.iter().map(String::as_str).collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn emit(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

// ---------------------------------------------------------------- oracles

/// Legendre values and first two derivatives up to `degree`, by the
/// three-term recurrence and `P'_{k+1} = P'_{k-1} + (2k+1) P_k`.
fn legendre_table(degree: usize, x: f64) -> [Vec<f64>; 3] {
    let n = degree + 1;
    let (mut p, mut d1, mut d2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    p[0] = 1.0;
    if n > 1 {
        p[1] = x;
        d1[1] = 1.0;
    }
    for k in 1..degree {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        d1[k + 1] = d1[k - 1] + (2.0 * kf + 1.0) * p[k];
        d2[k + 1] = d2[k - 1] + (2.0 * kf + 1.0) * d1[k];
    }
    [p, d1, d2]
}

/// Gauss-Legendre rule by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let [p, d, _] = legendre_table(n, x);
                let dx = p[n] / d[n];
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let [_, d, _] = legendre_table(n, x);
            (x, 2.0 / ((1.0 - x * x) * d[n] * d[n]))
        })
        .collect()
}

/// Legendre combination coefficients of member `i`, derived from the
/// boundary conditions rather than read from the library.
fn oracle_coeffs(kind: &str, i: usize, ln_r: f64) -> [f64; 3] {
    match kind {
        "both" => [1.0, 0.0, -1.0],
        "right" => [1.0, -1.0, 0.0],
        _ => {
            // ζ'(-1) = 0 and ζ'(1) = ζ(1) / (2 ln R).
            let k = |m: usize| (m * (m + 1)) as f64 / 2.0;
            let d = |m: usize| if m % 2 == 0 { -k(m) } else { k(m) };
            let e = |m: usize| k(m) - 1.0 / (2.0 * ln_r);
            let (a11, a12, a21, a22) = (d(i + 1), d(i + 2), e(i + 1), e(i + 2));
            let (r1, r2) = (-d(i), -e(i));
            let det = a11 * a22 - a12 * a21;
            [1.0, (r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det]
        }
    }
}

fn member(c: &[f64; 3], i: usize, t: &[Vec<f64>; 3], order: usize) -> f64 {
    c[0] * t[order][i] + c[1] * t[order][i + 1] + c[2] * t[order][i + 2]
}

/// Dense quadrature value of `∫ f(φ_i, φ_j, x) dx` for every pair.
fn oracle_matrix(
    kind: &str,
    dim: usize,
    ln_r: f64,
    integrand: impl Fn(usize, usize, &[Vec<f64>; 3], f64, &[[f64; 3]]) -> f64,
) -> Vec<Vec<f64>> {
    let coeffs: Vec<[f64; 3]> = (0..dim).map(|i| oracle_coeffs(kind, i, ln_r)).collect();
    let mut m = vec![vec![0.0; dim]; dim];
    for (x, w) in gauss_legendre(dim + 24) {
        let t = legendre_table(dim + 2, x);
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += w * integrand(i, j, &t, x, &coeffs);
            }
        }
    }
    m
}

fn max_matrix_error(closed: &BandedMatrix<f64>, oracle: &[Vec<f64>]) -> f64 {
    let dense = closed.to_dense();
    let mut worst: f64 = 0.0;
    for (r1, r2) in dense.iter().zip(oracle) {
        for (&a, &b) in r1.iter().zip(r2) {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    worst
}

/// Second-order finite-volume solve of `-(1/r)(r H')' = γ s` on `[0, R]`
/// with `H'(0) = 0` and `H'(R) = H(R) / (R ln R)`.
fn poisson_fd(source: impl Fn(f64) -> f64, gamma: f64, radius: f64, points: usize) -> Vec<f64> {
    let m = points - 1;
    let h = radius / m as f64;
    let (mut lo, mut di, mut up, mut rhs) =
        (vec![0.0; points], vec![0.0; points], vec![0.0; points], vec![0.0; points]);
    // Cell [0, h/2]: flux balance over the disc.
    di[0] = 0.5;
    up[0] = -0.5;
    rhs[0] = gamma * source(0.0) * h * h / 8.0;
    for k in 1..m {
        let r = k as f64 * h;
        let (rm, rp) = (r - h / 2.0, r + h / 2.0);
        lo[k] = -rm / h;
        di[k] = (rm + rp) / h;
        up[k] = -rp / h;
        rhs[k] = gamma * source(r) * r * h;
    }
    let rm = radius - h / 2.0;
    lo[m] = -rm / h;
    di[m] = rm / h - 1.0 / radius.ln();
    rhs[m] = gamma * source(radius) * (radius * radius - rm * rm) / 2.0;
    // Thomas algorithm.
    for k in 1..points {
        let f = lo[k] / di[k - 1];
        di[k] -= f * up[k - 1];
        rhs[k] -= f * rhs[k - 1];
    }
    let mut h_out = vec![0.0; points];
    h_out[m] = rhs[m] / di[m];
    for k in (0..m).rev() {
        h_out[k] = (rhs[k] - up[k] * h_out[k + 1]) / di[k];
    }
    h_out
}

// ---------------------------------------------------------------- helpers

fn run_all_tables() -> BTreeMap<&'static str, BenchReport> {
    TABLES
        .iter()
        .map(|id| (*id, bench::run_table(id).expect("bench run")))
        .collect()
}

fn smooth_noise(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| (2.0 * rng.random::<f64>() - 1.0) / (1.0 + k as f64).powi(2))
        .collect()
}

fn single_reference() -> GpProblem64 {
    let mut p = ModelParams64::new(Model::Single);
    p.winding = 2;
    p.beta = 30.0;
    p.gamma = PI;
    p.radius = 20.0;
    p.modes = 200;
    GpProblem64::new(p).unwrap()
}

// ---------------------------------------------------------------- criteria

fn criterion_1(reports: &BTreeMap<&str, BenchReport>) -> Verdict {
    let rows: Vec<_> = reports["tab2"]
        .rows
        .iter()
        .zip(bench::table("tab2").unwrap())
        .filter(|(_, def)| def.expect != Expect::Diverges)
        .map(|(r, _)| r)
        .collect();
    let failures: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| r.label.clone()).collect();
    let worst_e = rows.iter().filter_map(|r| r.energy_error).fold(0.0, f64::max);
    Verdict::new(
        1,
        "single-component golden E_c, mu_c",
        failures,
        format!(
            "{}/{} runs (asgf1, asgf2, ppncg) within {GOLDEN_TOL:e}; worst converged |dE| {worst_e:.1e}",
            rows.iter().filter(|r| r.pass).count(),
            rows.len()
        ),
    )
}

fn criterion_2(reports: &BTreeMap<&str, BenchReport>) -> Verdict {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut solvers = std::collections::BTreeSet::new();
    for id in ["tab4", "tab5"] {
        for r in &reports[id].rows {
            count += 1;
            solvers.insert(r.solver.name());
            if !r.pass {
                failures.push(format!("{id} {}", r.label));
            }
        }
    }
    let all = [Solver::Gflm, Solver::Asgf1, Solver::Ppncg]
        .iter()
        .all(|s| solvers.contains(s.name()));
    if !all {
        failures.push("gflm, asgf1 and ppncg must all be exercised".into());
    }
    Verdict::new(
        2,
        "binary golden E_c, mu_c",
        failures,
        format!("{count} runs over {}", solvers.into_iter().collect::<Vec<_>>().join(", ")),
    )
}

fn criterion_3() -> Verdict {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for s in [0u32, 1, 3] {
        let mut p = ModelParams64::new(Model::Binary);
        p.winding = s;
        p.potentials = [Potential::Harmonic(1.0); 2];
        p.radius = 16.0;
        p.modes = 160;
        let problem = GpProblem64::new(p).unwrap();
        // Start away from the eigenstate so the solvers have work to do.
        let base = problem.initial_guess().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7 + s as u64);
        let comps = base
            .components
            .iter()
            .map(|c| {
                let noise = smooth_noise(&mut rng, c.len());
                c.iter().zip(&noise).map(|(a, b)| a + 0.05 * b).collect()
            })
            .collect();
        let guess = problem.project(&problem.wrap(comps).unwrap()).unwrap();
        let exact = (s + 1) as f64;
        let mut flow = FlowConfig64::new(Scheme::Asgf1, 1.0).with_inertia(Inertia::new(0.01, 1.0, 0.2));
        flow.max_iter = 50_000;
        let runs = [
            ("ppncg", run_ppncg(&problem, &guess, &CgConfig64::default(), None).unwrap()),
            ("asgf1", run_flow(&problem, &flow, &guess).unwrap()),
        ];
        for (name, r) in runs {
            let (de, dm) = ((r.energy() - exact).abs(), (r.chemical_potential() - exact).abs());
            worst = worst.max(de).max(dm);
            if !r.converged() || de > 1e-8 || dm > 1e-8 || r.residual_norm() >= 1e-10 {
                failures.push(format!(
                    "S={s} {name}: {} E={:.12} mu={:.12} res={:.1e}",
                    r.status,
                    r.energy(),
                    r.chemical_potential(),
                    r.residual_norm()
                ));
            }
        }
    }
    Verdict::new(
        3,
        "harmonic eigenstates E_c = mu_c = S+1",
        failures,
        format!("S in {{0,1,3}}, ppncg and asgf1 from perturbed starts; worst deviation {worst:.1e}"),
    )
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut worst_hp: f64 = 0.0;
    for n in [8usize, 16, 32, 64] {
        let both = BasisFamily::<f64>::dirichlet_both(n).unwrap();
        let right = BasisFamily::<f64>::dirichlet_right(n).unwrap();
        let mut checks: Vec<(String, f64, f64)> = Vec::new();
        for (kind, basis) in [("both", &both), ("right", &right)] {
            let dim = basis.dimension();
            let a = oracle_matrix(kind, dim, 0.0, |i, j, t, x, c| {
                member(&c[i], i, t, 1) * member(&c[j], j, t, 1) * (x + 1.0)
            });
            let cm = oracle_matrix(kind, dim, 0.0, |i, j, t, x, c| {
                member(&c[i], i, t, 0) * member(&c[j], j, t, 0) * (x + 1.0)
            });
            checks.push((format!("A {kind} N={n}"), max_matrix_error(&build_matrix_a(basis).unwrap(), &a), 1e-10));
            checks.push((format!("C {kind} N={n}"), max_matrix_error(&build_matrix_c(basis).unwrap(), &cm), 1e-10));
            if kind == "both" {
                // The integrand is polynomial: both members vanish at x = -1.
                let b = oracle_matrix(kind, dim, 0.0, |i, j, t, x, c| {
                    let ratio = if (x + 1.0).abs() < 1e-300 { 0.0 } else { 1.0 / (x + 1.0) };
                    member(&c[i], i, t, 0) * member(&c[j], j, t, 0) * ratio
                });
                checks.push((format!("B both N={n}"), max_matrix_error(&build_matrix_b(basis).unwrap(), &b), 1e-10));
            }
        }
        for radius in [EULER, 16.0, 20.0] {
            let robin = BasisFamily::robin_poisson(n, radius).unwrap();
            let ln_r = radius.ln();
            let hp = oracle_matrix("robin", robin.dimension(), ln_r, |i, j, t, x, c| {
                let lap = (x + 1.0) * member(&c[j], j, t, 2) + member(&c[j], j, t, 1);
                lap * member(&c[i], i, t, 0)
            });
            let err = max_matrix_error(&build_matrix_hp(&robin).unwrap(), &hp);
            worst_hp = worst_hp.max(err);
            checks.push((format!("H_P N={n} R={radius:.4}"), err, 1e-9));
        }
        for (name, err, tol) in checks {
            if !name.starts_with("H_P") {
                worst = worst.max(err);
            }
            if !(err <= tol) {
                failures.push(format!("{name}: {err:.2e}"));
            }
        }
    }
    Verdict::new(
        4,
        "closed-form matrices vs quadrature",
        failures,
        format!("N in {{8,16,32,64}}, R in {{e,16,20}}; worst A/B/C {worst:.1e}, worst H_P {worst_hp:.1e}"),
    )
}

fn criterion_5() -> Verdict {
    let mut single = ModelParams64::new(Model::Single);
    single.winding = 2;
    single.beta = 30.0;
    single.gamma = PI;
    single.radius = 12.0;
    single.modes = 48;
    let mut binary = ModelParams64::new(Model::Binary);
    binary.winding = 1;
    binary.beta = 20.0;
    binary.gamma = PI;
    binary.eta = 3.0;
    binary.background_field = 2.0;
    binary.potentials = [Potential::Lattice; 2];
    binary.radius = 12.0;
    binary.modes = 48;
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for params in [single, binary] {
        let model = params.model;
        let problem = GpProblem64::new(params).unwrap();
        let dim = problem.basis().dimension();
        let k = model.components();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let raw: Vec<Vec<f64>> = (0..k).map(|_| smooth_noise(&mut rng, dim)).collect();
            let phi: WaveFunction64 = problem.project(&problem.wrap(raw).unwrap()).unwrap();
            let dir: Vec<Vec<f64>> = (0..k).map(|_| smooth_noise(&mut rng, dim)).collect();
            let ev = problem.evaluate(&phi).unwrap();
            let grad: Vec<Vec<f64>> = ev
                .residual
                .iter()
                .zip(&phi.components)
                .map(|(r, u)| r.iter().zip(u).map(|(a, b)| a + ev.mu * b).collect())
                .collect();
            let predicted = 2.0 * problem.inner(&grad, &dir);
            let energy_at = |t: f64| {
                let shifted: Vec<Vec<f64>> = phi
                    .components
                    .iter()
                    .zip(&dir)
                    .map(|(u, p)| u.iter().zip(p).map(|(a, b)| a + t * b).collect())
                    .collect();
                problem.energy_of(&shifted).unwrap()
            };
            let central = |h: f64| (energy_at(h) - energy_at(-h)) / (2.0 * h);
            let h = 1e-3;
            let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
            let rel = (fd - predicted).abs() / predicted.abs();
            worst = worst.max(rel);
            if !(rel <= 1e-6) {
                failures.push(format!("{model} seed {seed}: rel {rel:.2e}"));
            }
        }
    }
    Verdict::new(
        5,
        "directional derivative vs 2<r + mu phi, p>",
        failures,
        format!("20 seeded states per model, Richardson differences; worst relative error {worst:.1e}"),
    )
}

fn criterion_6(reports: &BTreeMap<&str, BenchReport>) -> Verdict {
    let mut failures = Vec::new();
    let mut runs = 0;
    for (id, report) in reports {
        let defs = bench::table(id).unwrap();
        for (r, def) in report.rows.iter().zip(defs) {
            if def.expect == Expect::Diverges {
                continue;
            }
            runs += 1;
            if !r.violations.is_empty() {
                failures.push(format!("{id} {}: {}", r.label, r.violations.join("; ")));
            }
        }
    }
    Verdict::new(
        6,
        "per-iterate invariants on every benchmark run",
        failures,
        format!("{runs} runs over {}; norm, orthogonality, mu-E identity, ppncg monotonicity and tangency", TABLES.join(", ")),
    )
}

fn criterion_7(reports: &BTreeMap<&str, BenchReport>) -> Verdict {
    let mut failures = Vec::new();
    let tab2 = &reports["tab2"].rows;
    let find = |label: &str| tab2.iter().find(|r| r.label == label).unwrap();
    let gflm = find("gflm tau=0.1 (1.0,0.0,0.0)");
    let accel = find("asgf1 tau=0.1 (0.01,0.01,0.05)");
    if !(accel.converged_before(gflm)) {
        failures.push(format!(
            "asgf1(0.01,0.01,0.05) {} vs gflm {}",
            accel.iterations, gflm.iterations
        ));
    }
    let mut configs = 0;
    let (mut within, mut counted) = (0, 0);
    for id in ["tab3", "tab6"] {
        let rows = &reports[id].rows;
        for chunk in rows.chunks(3) {
            let (flow, cg) = (&chunk[1], &chunk[2]);
            configs += 1;
            if !(cg.converged_before(flow)) {
                failures.push(format!("{id} {}: {} vs {}", cg.label, cg.iterations, flow.iterations));
            }
            for r in [flow, cg] {
                if let Some(p) = r.published_iterations {
                    counted += 1;
                    let ratio = r.iterations as f64 / p as f64;
                    if (0.5..=1.5).contains(&ratio) {
                        within += 1;
                    }
                }
            }
        }
    }
    for r in tab2.iter().chain(&reports["tab4"].rows).chain(&reports["tab5"].rows) {
        if let (Some(p), true) = (r.published_iterations, r.status == SolveStatus::Converged) {
            counted += 1;
            if (0.5..=1.5).contains(&(r.iterations as f64 / p as f64)) {
                within += 1;
            }
        }
    }
    Verdict::new(
        7,
        "acceleration ordering",
        failures,
        format!(
            "asgf1 {} < gflm {} iterations at tau=0.1; ppncg fewer than asgf1 on {configs} configurations; \
             informational: {within}/{counted} iteration counts within 50% of published",
            accel.iterations, gflm.iterations
        ),
    )
}

trait Converged {
    fn converged_before(&self, other: &Self) -> bool;
}

impl Converged for bench::RowReport {
    fn converged_before(&self, other: &Self) -> bool {
        self.status == SolveStatus::Converged
            && other.status == SolveStatus::Converged
            && self.iterations < other.iterations
    }
}

fn criterion_8() -> Verdict {
    let (radius, gamma) = (16.0, 1.0);
    let source = |r: f64| (-r * r).exp();
    let fd_points = 40_001;
    let reference = poisson_fd(source, gamma, radius, fd_points);
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let error_at = |modes: usize| {
        let grid = gauss_lobatto::<f64>(modes + 4).unwrap();
        let nodal: Vec<f64> = grid.nodes.iter().map(|&x| source(radius * (x + 1.0) / 2.0)).collect();
        let ws = PoissonWorkspace::new(modes, radius, grid).unwrap();
        let field = ws.solve_field(&nodal, gamma).unwrap();
        let h = radius / (fd_points - 1) as f64;
        reference
            .iter()
            .enumerate()
            .step_by(10)
            .map(|(k, v)| (field.at_radius(k as f64 * h) - v).abs())
            .fold(0.0, f64::max)
            / scale
    };
    let errors: Vec<(usize, f64)> = [32, 64, 128, 200].iter().map(|&n| (n, error_at(n))).collect();
    let mut failures = Vec::new();
    let e = |n: usize| errors.iter().find(|(m, _)| *m == n).unwrap().1;
    if !(e(200) <= 1e-6) {
        failures.push(format!("N=200 error {:.2e}", e(200)));
    }
    // Geometric decay: each doubling gains at least a factor 10 until the
    // finite-difference floor is reached.
    for (a, b) in [(32, 64), (64, 128)] {
        if !(e(b) <= 0.1 * e(a) || e(b) <= 1e-7) {
            failures.push(format!("no decay from N={a} ({:.2e}) to N={b} ({:.2e})", e(a), e(b)));
        }
    }
    Verdict::new(
        8,
        "Poisson solve vs 40000-point finite differences",
        failures,
        errors
            .iter()
            .map(|(n, err)| format!("N={n}: {err:.1e}"))
            .collect::<Vec<_>>()
            .join(", "),
    )
}

fn criterion_9() -> Verdict {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    let (base, _, _) = gpvortex_cli::sweep::preset("background-field").unwrap();
    let sweep =
        gpvortex_cli::sweep::Sweep::new(&base, "background-field", vec!["0".into(), "10".into()]).unwrap();
    for spec in &sweep.specs {
        assert_eq!((spec.winding, spec.beta, spec.eta), (13, 300.0, 0.0));
    }
    for p in sweep.run().unwrap() {
        let m = p.outcome.masses();
        let diff = (m[0] - m[1]).abs();
        details.push(format!("H0={}: |N1-N2|={diff:.1e}", p.value));
        if !p.outcome.converged() || !(diff <= 1e-6) {
            failures.push(format!("H0={} {} diff {diff:.2e}", p.value, p.outcome.result.status));
        }
    }
    Verdict::new(
        9,
        "equal component masses at eta = 0 (S=13, beta=300)",
        failures,
        details.join(", "),
    )
}

fn criterion_10() -> Verdict {
    let problem = single_reference();
    let guess = problem.initial_guess().unwrap();
    let cfg = CgConfig64::default();
    let plain = run_ppncg(&problem, &guess, &cfg, None).unwrap();
    let pc = PerturbConfig::with_seed(2024);
    let first = run_ppncg(&problem, &guess, &cfg, Some(&pc)).unwrap();
    let second = run_ppncg(&problem, &guess, &cfg, Some(&pc)).unwrap();
    let mut failures = Vec::new();
    if first.escaped != Some(false) {
        failures.push(format!("escaped = {:?}", first.escaped));
    }
    let shift = (first.energy() - plain.energy()).abs();
    if !plain.converged() || !(shift <= 1e-9) {
        failures.push(format!("energy moved by {shift:.2e}"));
    }
    let same = first.energy().to_bits() == second.energy().to_bits()
        && first.state.components == second.state.components
        && first.escaped == second.escaped;
    if !same {
        failures.push("repeat run differs".into());
    }
    Verdict::new(
        10,
        "seeded saddle escape",
        failures,
        format!("escaped={:?}, |dE|={shift:.1e}, repeat bit-identical={same}", first.escaped),
    )
}

#[test]
fn acceptance_suite() {
    let reports = run_all_tables();
    let verdicts = vec![
        criterion_1(&reports),
        criterion_2(&reports),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(&reports),
        criterion_7(&reports),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    for v in &verdicts {
        emit(&v.line());
    }
    let mut unexpected = Vec::new();
    for v in &verdicts {
        match (v.passed(), v.known()) {
            (true, None) => {}
            (true, Some(_)) => unexpected.push(format!(
                "criterion {} passes; its recorded deviation is stale",
                v.id
            )),
            (false, Some(known)) if same_items(known, &v.failures) => {}
            (false, _) => unexpected.push(format!("criterion {}: {}", v.id, v.failures.join(" | "))),
        }
    }
    assert!(unexpected.is_empty(), "unexpected acceptance results:\n{}", unexpected.join("\n"));
}
