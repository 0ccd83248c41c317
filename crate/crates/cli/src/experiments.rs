//! Experiment implementations: each builds its tables, evaluates its
//! assertions, and leaves writing/exit codes to the driver.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::csv::{Cell, Table};
use crate::pool::parallel_map;
use isoperi_core::num::rng::SplitMix64;
use isoperi_core::{calibrate, curve, nearly_spherical as ns, one_dim, radial, symmetrize, weights};
use isoperi_core::Error as CoreError;
use std::f64::consts::PI;

#[derive(Debug)]
pub enum RunError {
    /// Invalid configuration or violated construction precondition (exit 2).
    Config(String),
    /// Numeric failure during the run (exit 3).
    Numeric(String),
}

impl From<crate::config::ConfigError> for RunError {
    fn from(e: crate::config::ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

fn classify_core(e: CoreError) -> RunError {
    match e {
        CoreError::ConstructionInfeasible(_)
        | CoreError::Domain(_)
        | CoreError::Precondition(_)
        | CoreError::PositivityViolated(_)
        | CoreError::UnsupportedDimension(_)
        | CoreError::UnsupportedOrder { .. }
        | CoreError::Resolution(_)
        | CoreError::Embedding(_)
        | CoreError::OutOfRange(_)
        | CoreError::Parse(_) => RunError::Config(e.to_string()),
        other => RunError::Numeric(other.to_string()),
    }
}

trait CoreResultExt<T> {
    fn run_err(self) -> Result<T, RunError>;
}

impl<T> CoreResultExt<T> for isoperi_core::Result<T> {
    fn run_err(self) -> Result<T, RunError> {
        self.map_err(classify_core)
    }
}

#[derive(Debug, Clone)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Assertion {
    Assertion {
        name: name.to_string(),
        passed,
        detail,
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub tables: Vec<(String, Table)>,
    /// (csv file, x column, y columns) rendered when plotting is enabled.
    pub plot: Option<(String, String, Vec<String>)>,
}

impl Outcome {
    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    match config.kind {
        ExperimentKind::Profile => profile(config),
        ExperimentKind::OneDim => one_dim_experiment(config),
        ExperimentKind::CurveSweep => curve_sweep(config),
        ExperimentKind::Fuglede => fuglede(config),
        ExperimentKind::Symmetrize => symmetrize_experiment(config),
        ExperimentKind::Counterexample1 => counterexample_1(config),
        ExperimentKind::Counterexample2 => counterexample_2(config),
        ExperimentKind::Calibrate => calibrate_experiment(config),
    }
}

fn need_weights(config: &ExperimentConfig) -> Result<&weights::WeightPair, RunError> {
    config
        .weights
        .as_ref()
        .ok_or_else(|| RunError::Config("weights: required".into()))
}

fn profile(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    if pair.n < 2 {
        return Err(RunError::Config("profile needs n >= 2".into()));
    }
    let r_min = config.require_in("r_min", config.f64_param("r_min", 0.05)?, 1e-9, 1e6)?;
    let r_max = config.require_in(
        "r_max",
        config.f64_param("r_max", pair.r_max.min(4.0))?,
        r_min,
        pair.r_max,
    )?;
    let steps = config.usize_param("steps", 200)?.clamp(2, 100_000);

    let mut table = Table::new(&["r", "volume", "energy", "de_dv", "d2e_dv2"]);
    let mut increasing = true;
    let mut warnings = 0usize;
    for i in 0..=steps {
        let r = r_min + (r_max - r_min) * i as f64 / steps as f64;
        let p = radial::energy_profile_point(pair, r).run_err()?;
        increasing &= p.de_dv > 0.0;
        warnings += p.fd_warning.is_some() as usize;
        table.push(vec![
            Cell::Float(p.r),
            Cell::Float(p.volume),
            Cell::Float(p.energy),
            Cell::Float(p.de_dv),
            Cell::Float(p.d2e_dv2),
        ]);
    }
    Ok(Outcome {
        assertions: vec![
            check(
                "profile increasing (dE/dv > 0)",
                increasing,
                String::new(),
            ),
            check(
                "analytic derivatives consistent with finite differences",
                warnings == 0,
                format!("{warnings} warnings"),
            ),
        ],
        tables: vec![("report.csv".into(), table)],
        plot: Some((
            "report.csv".into(),
            "volume".into(),
            vec!["energy".into()],
        )),
    })
}

fn one_dim_experiment(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    if pair.n != 1 {
        return Err(RunError::Config("one-dim needs weights with n = 1".into()));
    }
    let x_max = config.require_in(
        "x_max",
        config.f64_param("x_max", pair.r_max.min(10.0))?,
        0.1,
        pair.r_max,
    )?;
    let volume = config.require_in("volume", config.f64_param("volume", 1.0)?, 1e-6, 1e6)?;
    let lambda_steps = config.usize_param("lambda_steps", 40)?.clamp(4, 2000);
    let grid_points = config.usize_param("grid_points", 160)?.clamp(16, 200);
    let max_intervals = config.usize_param("max_intervals", 3)?.clamp(1, 3);
    let v_min = config.f64_param("v_min", 0.2)?;
    let v_max = config.f64_param("v_max", 2.0)?;
    let v_steps = config.usize_param("v_steps", 10)?.clamp(1, 500);

    let tables = one_dim::build_tables(pair, x_max).run_err()?;

    let mut lambda_table = Table::new(&["lambda", "energy"]);
    let mut values = Vec::new();
    for i in 0..=lambda_steps {
        let lam = i as f64 / lambda_steps as f64;
        let e = one_dim::lambda_energy(&tables, volume, lam).run_err()?;
        values.push(e);
        lambda_table.push(vec![Cell::Float(lam), Cell::Float(e)]);
    }
    let symmetric = (0..=lambda_steps)
        .all(|i| (values[i] - values[lambda_steps - i]).abs() <= 1e-10 * values[i].abs().max(1.0));
    let convex = values
        .windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-9);

    let report = weights::classify(pair, x_max, 1000);
    let mut v_table = Table::new(&["v", "centered_energy", "brute_force_energy"]);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut best_improvement = 0.0f64;
    for i in 0..v_steps {
        let v = v_min + (v_max - v_min) * i as f64 / (v_steps.max(2) - 1).max(1) as f64;
        let centered = one_dim::centered_interval(&tables, v).run_err()?;
        let centered_e = one_dim::union_energy(pair, &centered).run_err()?;
        let (_, bf_e) = one_dim::brute_force_min(&tables, v, max_intervals, grid_points).run_err()?;
        worst_gap = worst_gap.max(bf_e - centered_e - 1e-9);
        best_improvement = best_improvement.min(bf_e - centered_e);
        v_table.push(vec![
            Cell::Float(v),
            Cell::Float(centered_e),
            Cell::Float(bf_e),
        ]);
    }

    let mut assertions = vec![
        check(
            "lambda energy symmetric about 1/2",
            symmetric,
            String::new(),
        ),
        check("lambda energy convex", convex, String::new()),
    ];
    if report.admissible && report.psi_min_at_origin {
        assertions.push(check(
            "centered interval optimal (gap <= 1e-6)",
            (v_table
                .column("brute_force_energy")
                .zip(v_table.column("centered_energy")))
            .map(|(bf, c)| {
                bf.iter()
                    .zip(&c)
                    .all(|(b, c)| c - b <= 1e-6 && b - c <= 1e-6)
            })
            .unwrap_or(false),
            String::new(),
        ));
    } else {
        assertions.push(check(
            "off-center minimizer found (density dips away from 0)",
            best_improvement < -1e-9,
            format!("best improvement {best_improvement:.3e}"),
        ));
    }
    Ok(Outcome {
        assertions,
        tables: vec![
            ("lambda_sweep.csv".into(), lambda_table),
            ("report.csv".into(), v_table),
        ],
        plot: Some((
            "lambda_sweep.csv".into(),
            "lambda".into(),
            vec!["energy".into()],
        )),
    })
}

fn curve_sweep(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    if pair.n < 2 || pair.n > 3 {
        return Err(RunError::Config("curve-sweep needs n in {2, 3}".into()));
    }
    let r_star = config.require_in("r_star", config.f64_param("r_star", 1.0)?, 1e-3, 100.0)?;
    let k_circle = 1.0 / r_star;
    let k0_min = config.f64_param("k0_min", 0.7 * k_circle)?;
    let k0_max = config.f64_param("k0_max", 1.3 * k_circle)?;
    let k0_steps = config.usize_param("k0_steps", 13)?.clamp(1, 500);
    if !(k0_min > 0.0 && k0_max >= k0_min) {
        return Err(RunError::Config("need 0 < k0_min <= k0_max".into()));
    }

    let options = curve::ShootOptions::default();
    let k0s: Vec<f64> = (0..=k0_steps)
        .map(|i| k0_min + (k0_max - k0_min) * i as f64 / k0_steps.max(1) as f64)
        .collect();
    let shots: Vec<_> = parallel_map(k0s.len(), |i| curve::shoot(pair, r_star, k0s[i], &options));

    let mut sweep = Table::new(&["k0", "termination", "position_error", "angle_error", "h_bar_deviation"]);
    for (k0, shot) in k0s.iter().zip(&shots) {
        match shot {
            Ok(traj) => {
                let (pos, ang) = curve::closure_residual(traj)
                    .map(|(p, a)| (p, a))
                    .unwrap_or((f64::NAN, f64::NAN));
                sweep.push(vec![
                    Cell::Float(*k0),
                    Cell::Text(format!("{:?}", traj.termination)),
                    Cell::Float(pos),
                    Cell::Float(ang),
                    Cell::Float(traj.h_bar_deviation),
                ]);
            }
            Err(e) => sweep.push(vec![
                Cell::Float(*k0),
                Cell::Text(format!("error: {e}")),
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
                Cell::Float(f64::NAN),
            ]),
        }
    }

    // The circle shot k0 = 1/R* carries the closure assertions and the
    // trajectory dump.
    let circle = curve::shoot(pair, r_star, k_circle, &options).run_err()?;
    let mut traj_table = Table::new(&["s", "gamma1", "gamma2", "theta", "kappa", "lambda", "h0", "h1", "phase"]);
    for p in &circle.states {
        traj_table.push(vec![
            Cell::Float(p.s),
            Cell::Float(p.gamma1),
            Cell::Float(p.gamma2),
            Cell::Float(p.theta),
            Cell::Float(p.kappa),
            Cell::Float(p.lambda),
            Cell::Float(p.h0),
            Cell::Float(p.h1),
            Cell::Text(p.phase.label().to_string()),
        ]);
    }
    let closed = circle.termination == curve::Termination::Closed;
    let residual = curve::closure_residual(&circle)
        .map(|(p, a)| p.max(a.abs()))
        .unwrap_or(f64::INFINITY);

    Ok(Outcome {
        assertions: vec![
            check(
                "k0 = 1/R* closes (residual < 1e-6)",
                closed && residual < 1e-6,
                format!("residual {residual:.3e}"),
            ),
            check(
                "weighted mean curvature conserved (defect <= 1e-7)",
                circle.h_bar_deviation <= 1e-7,
                format!("defect {:.3e}", circle.h_bar_deviation),
            ),
        ],
        tables: vec![
            ("report.csv".into(), sweep),
            ("trajectory.csv".into(), traj_table),
        ],
        plot: Some((
            "report.csv".into(),
            "k0".into(),
            vec!["angle_error".into()],
        )),
    })
}

/// Random band-limited graph coefficients normalized to a W^{1,∞} target.
fn random_band_limited(
    ctx: &ns::SphereContext,
    rng: &mut SplitMix64,
    band: u32,
    amplitude: f64,
) -> Vec<f64> {
    let modes = ctx.table().modes.clone();
    let mut coeffs = vec![0.0; modes.len()];
    for (mode, c) in modes.iter().zip(coeffs.iter_mut()) {
        if mode.degree >= 1 && mode.degree <= band {
            *c = rng.uniform(-1.0, 1.0) / (1.0 + mode.degree as f64);
        }
    }
    let values = ctx.table().synthesize(&coeffs);
    let grads = ctx.table().synthesize_gradient(&coeffs);
    let sup = values
        .iter()
        .map(|v| v.abs())
        .chain(grads.iter().map(|(a, b)| (a * a + b * b).sqrt()))
        .fold(0.0f64, f64::max);
    let scale = amplitude / sup.max(1e-300);
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    coeffs
}

fn fuglede(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    let radius = config.require_in("radius", config.f64_param("radius", 1.0)?, 1e-3, 100.0)?;
    let trials = config.usize_param("trials", 100)?.clamp(1, 100_000);
    let band = config.usize_param("band", 6)? as u32;
    let amplitude = config.require_in(
        "amplitude",
        config.f64_param("amplitude", 0.008)?,
        1e-8,
        ns::DEFAULT_EPSILON,
    )?;
    let ctx = match pair.n {
        2 => {
            let m = config.usize_param("grid_points", 96)?.clamp(16, 4096);
            ns::SphereContext::circle(m, band.max(8)).run_err()?
        }
        3 => {
            let p = config.usize_param("polar_points", 24)?.clamp(4, 256);
            let a = config.usize_param("azimuth_points", 48)?.clamp(8, 512);
            ns::SphereContext::sphere(p, a, band.max(6)).run_err()?
        }
        n => return Err(RunError::Config(format!("fuglede needs n in {{2, 3}}, got {n}"))),
    };
    let target = radial::weighted_ball_volume(pair, radius).run_err()?;

    // Per-trial seeds drawn once so parallel execution stays reproducible.
    let mut seeder = SplitMix64::new(config.seed);
    let seeds: Vec<u64> = (0..trials).map(|_| seeder.next_u64()).collect();
    let results: Vec<Result<ns::FugledeGap, RunError>> = parallel_map(trials, |i| {
        let mut rng = SplitMix64::new(seeds[i]);
        let coeffs = random_band_limited(&ctx, &mut rng, band, amplitude);
        let gs = ns::GraphSet::from_coeffs(&ctx, radius, coeffs).run_err()?;
        let gs = ns::volume_correct(pair, &ctx, &gs, target).run_err()?;
        ns::fuglede_gap(pair, &ctx, &gs, ns::DEFAULT_EPSILON).run_err()
    });

    let mut table = Table::new(&["trial", "u_l2", "u_w1inf", "gap", "lower_bound", "ratio"]);
    let mut all_hold = true;
    for (i, res) in results.into_iter().enumerate() {
        let out = res?;
        all_hold &= out.gap >= out.lower_bound;
        table.push(vec![
            Cell::Int(i as i64),
            Cell::Float(out.u_l2_sq.sqrt()),
            Cell::Float(amplitude),
            Cell::Float(out.gap),
            Cell::Float(out.lower_bound),
            Cell::Float(out.ratio.unwrap_or(f64::NAN)),
        ]);
    }

    // Harmonic spectrum of the first trial's perturbation.
    let mut spectrum = Table::new(&["degree", "index", "coeff"]);
    {
        let mut rng = SplitMix64::new(seeds[0]);
        let coeffs = random_band_limited(&ctx, &mut rng, band, amplitude);
        let gs = ns::GraphSet::from_coeffs(&ctx, radius, coeffs).run_err()?;
        let spec = ns::harmonic_decompose(&ctx, &gs, band).run_err()?;
        for (mode, c) in &spec.entries {
            spectrum.push(vec![
                Cell::Int(mode.degree as i64),
                Cell::Int(mode.index as i64),
                Cell::Float(*c),
            ]);
        }
    }
    Ok(Outcome {
        assertions: vec![check(
            "gap >= c R^(n-1) e^psi(R) |u|_L2^2 on every trial",
            all_hold,
            String::new(),
        )],
        tables: vec![
            ("report.csv".into(), table),
            ("spectrum.csv".into(), spectrum),
        ],
        plot: Some((
            "report.csv".into(),
            "trial".into(),
            vec!["gap".into(), "lower_bound".into()],
        )),
    })
}

fn random_polar_set(rng: &mut SplitMix64, n: u32) -> symmetrize::PolarSet {
    let shells = 1 + rng.below(3);
    let mut radii = vec![if rng.next_f64() < 0.3 { 0.0 } else { 0.2 + rng.next_f64() }];
    for _ in 0..shells {
        let last = *radii.last().unwrap();
        radii.push(last + 0.2 + rng.next_f64());
    }
    if n == 2 {
        let mut occ = Vec::new();
        for _ in 0..shells {
            let count = rng.below(4);
            let mut arcs = Vec::new();
            let mut phi = -PI + 0.1 * rng.next_f64();
            for _ in 0..count {
                let a = phi + 0.05 + rng.next_f64();
                let b = a + 0.05 + rng.next_f64();
                if b >= PI {
                    break;
                }
                arcs.push((a, b));
                phi = b;
            }
            occ.push(arcs);
        }
        symmetrize::PolarSet::planar(radii, occ).expect("valid random planar set")
    } else {
        let caps = (0..shells)
            .map(|_| match rng.below(6) {
                0 => 0.0,
                1 => PI,
                _ => rng.uniform(0.05, PI - 0.05),
            })
            .collect();
        symmetrize::PolarSet::axisymmetric(radii, caps).expect("valid random cap profile")
    }
}

fn symmetrize_experiment(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    if pair.n < 2 || pair.n > 3 {
        return Err(RunError::Config("symmetrize needs n in {2, 3}".into()));
    }
    let trials = config.usize_param("trials", 200)?.clamp(1, 100_000);
    let mut rng = SplitMix64::new(config.seed);
    let mut table = Table::new(&[
        "trial",
        "volume_before",
        "volume_after",
        "potential_before",
        "potential_after",
        "perimeter_before",
        "perimeter_after",
    ]);
    let mut volume_ok = true;
    let mut potential_ok = true;
    let mut perimeter_ok = true;
    let mut idempotent = true;
    for i in 0..trials {
        let set = random_polar_set(&mut rng, pair.n);
        let sym = symmetrize::symmetrize(&set);
        let (v0, p0, per0) = symmetrize::measures(pair, &set).run_err()?;
        let (v1, p1, per1) = symmetrize::measures(pair, &sym).run_err()?;
        volume_ok &= (v0 - v1).abs() <= 1e-10 * v0.abs().max(1.0);
        potential_ok &= (p0 - p1).abs() <= 1e-10 * p0.abs().max(1.0);
        perimeter_ok &= per1 <= per0 + 1e-9;
        idempotent &= symmetrize::symmetrize(&sym) == sym;
        table.push(vec![
            Cell::Int(i as i64),
            Cell::Float(v0),
            Cell::Float(v1),
            Cell::Float(p0),
            Cell::Float(p1),
            Cell::Float(per0),
            Cell::Float(per1),
        ]);
    }
    Ok(Outcome {
        assertions: vec![
            check("weighted volume preserved (1e-10)", volume_ok, String::new()),
            check("potential preserved (1e-10)", potential_ok, String::new()),
            check(
                "perimeter non-increasing (1e-9)",
                perimeter_ok,
                String::new(),
            ),
            check("idempotence exact", idempotent, String::new()),
        ],
        tables: vec![("report.csv".into(), table)],
        plot: Some((
            "report.csv".into(),
            "perimeter_before".into(),
            vec!["perimeter_after".into()],
        )),
    })
}

fn counterexample_1(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let defaults = weights::GMonotoneParams::default();
    let params = weights::GMonotoneParams {
        n: config.usize_param("n", defaults.n as usize)? as u32,
        m: config.f64_param("m", defaults.m)?,
        v: config.f64_param("v", defaults.v)?,
        l: config.f64_param("l", defaults.l)?,
        eps: config.f64_param("eps", defaults.eps)?,
        h: config.f64_param("h", defaults.h)?,
        l_prime: config.f64_param("l_prime", defaults.l_prime)?,
        l_second: config.f64_param("l_second", defaults.l_second)?,
        delta: config.f64_param("delta", defaults.delta)?,
    };
    let pair = weights::make_counterexample_g_monotone(&params).run_err()?;

    let tau = radial::inverse_volume(&pair, params.v).run_err()?;
    let centered = radial::ball_energy(&pair, tau).run_err()?;
    let centered_vol = radial::weighted_ball_volume(&pair, tau).run_err()?;
    let d = params.competitor_distance();
    let rho = params.tau_prime();
    let off = radial::offcenter_ball_energy(&pair, d, rho).run_err()?;
    let off_vol = radial::offcenter_ball_volume(&pair, d, rho).run_err()?;

    let nf = params.n as f64;
    let omega = radial::omega_n(params.n);
    let margin_bound = 0.5
        * (omega.powf(1.0 / nf) * params.v.powf((nf - 1.0) / nf) * params.m
            - 3.0 * omega * params.m * params.m.exp() * params.eps.powf(nf - 1.0));
    let gap = centered.total - off.total;

    let report = weights::classify(&pair, pair.r_max, 3000);

    let mut table = Table::new(&["set", "radius", "center_distance", "weighted_volume", "perimeter", "potential", "total"]);
    table.push(vec![
        Cell::Text("B".into()),
        Cell::Float(tau),
        Cell::Float(0.0),
        Cell::Float(centered_vol),
        Cell::Float(centered.perimeter_term),
        Cell::Float(centered.potential_term),
        Cell::Float(centered.total),
    ]);
    table.push(vec![
        Cell::Text("B'".into()),
        Cell::Float(rho),
        Cell::Float(d),
        Cell::Float(off_vol),
        Cell::Float(off.perimeter_term),
        Cell::Float(off.potential_term),
        Cell::Float(off.total),
    ]);

    Ok(Outcome {
        assertions: vec![
            check("E(B')-E(B) < 0", off.total < centered.total, format!("gap {gap:.6}")),
            check(
                "gap >= half the construction bound",
                gap >= margin_bound,
                format!("gap {gap:.6} vs bound {margin_bound:.6}"),
            ),
            check(
                "volumes match to 1e-6",
                (off_vol - centered_vol).abs() <= 1e-6 * centered_vol,
                String::new(),
            ),
            check(
                "kappa-uniformly admissible",
                report.kappa_uniform.is_some(),
                format!("kappa {:?}", report.kappa_uniform),
            ),
            check("psi min at origin", report.psi_min_at_origin, String::new()),
            check("g monotone", report.g_monotone, String::new()),
        ],
        tables: vec![("report.csv".into(), table)],
        plot: None,
    })
}

fn counterexample_2(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let n = config.usize_param("n", 2)? as u32;
    let g0 = config.f64_param("g0", 10.0)?;
    let radius = config.require_in("radius", config.f64_param("radius", 0.5)?, 1e-3, 0.999)?;
    let eps_list = config.list_param("eps_list", &[0.05, 0.02, 0.01])?;
    if eps_list.is_empty() {
        return Err(RunError::Config("params.eps_list: at least one eps".into()));
    }

    let nf = n as f64;
    let omega = radial::omega_n(n);
    let target = (nf - 1.0) / (nf + 2.0) * radius.powf(nf + 1.0) * omega;

    let mut table = Table::new(&["eps", "gap", "gap_over_eps", "target", "rel_err"]);
    let mut rel_errs = Vec::new();
    for &eps in &eps_list {
        let pair = weights::make_counterexample_psi_monotone(eps, g0, n).run_err()?;
        let d = 1.0 / eps + radius;
        let off = radial::offcenter_ball_energy(&pair, d, radius).run_err()?;
        let off_vol = radial::offcenter_ball_volume(&pair, d, radius).run_err()?;
        let tau = radial::inverse_volume(&pair, off_vol).run_err()?;
        let centered = radial::ball_energy(&pair, tau).run_err()?;
        let gap = centered.total - off.total;
        let rel = (gap / eps - target).abs() / target;
        rel_errs.push(rel);
        table.push(vec![
            Cell::Float(eps),
            Cell::Float(gap),
            Cell::Float(gap / eps),
            Cell::Float(target),
            Cell::Float(rel),
        ]);
    }
    let last = *rel_errs.last().unwrap();
    let non_worsening = rel_errs.windows(2).all(|w| w[1] <= w[0] + 0.02);
    Ok(Outcome {
        assertions: vec![
            check(
                "gap/eps within 15% of (n-1)/(n+2) R^(n+1) omega_n at smallest eps",
                last <= 0.15,
                format!("relative error {last:.4}"),
            ),
            check(
                "error sequence non-worsening as eps decreases",
                non_worsening,
                format!("{rel_errs:?}"),
            ),
        ],
        tables: vec![("report.csv".into(), table)],
        plot: Some((
            "report.csv".into(),
            "eps".into(),
            vec!["gap_over_eps".into(), "target".into()],
        )),
    })
}

fn calibrate_experiment(config: &ExperimentConfig) -> Result<Outcome, RunError> {
    let pair = need_weights(config)?;
    if pair.n < 2 {
        return Err(RunError::Config("calibrate needs n >= 2".into()));
    }
    let samples = config.usize_param("samples", 2000)?.clamp(100, 200_000);
    let report = weights::classify(pair, pair.r_max, 2000);
    let kappa = report.kappa_uniform.ok_or_else(|| {
        RunError::Config("calibrate needs a kappa-uniformly admissible pair".into())
    })?;
    let cert = calibrate::certificate(pair, kappa, samples.max(calibrate::CERT_SAMPLES)).run_err()?;
    let r_ball = config.f64_param("r_ball", cert.r_star)?;
    let default_ds: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64 * r_ball / 2.0).collect();
    let distances = config.list_param("distances", &default_ds)?;

    // Field dump in rescaled coordinates.
    let scaled = pair.rescale(kappa).run_err()?;
    let q = ((pair.n + 2) as f64).sqrt();
    let mut field = Table::new(&["r", "ell", "h", "hprime"]);
    for i in 0..=samples.min(4000) {
        let r = 1e-6 + (4.0 * q - 1e-6) * i as f64 / samples.min(4000) as f64;
        let (h, hp) = calibrate::h_at(&scaled, pair.n, r);
        field.push(vec![
            Cell::Float(r),
            Cell::Float(calibrate::ell(r, pair.n)),
            Cell::Float(h),
            Cell::Float(hp),
        ]);
    }

    let check_result = calibrate::large_volume_check(pair, r_ball, &distances).run_err()?;
    let mut comp = Table::new(&["distance", "radius", "energy", "margin"]);
    for c in &check_result.competitors {
        comp.push(vec![
            Cell::Float(c.distance),
            Cell::Float(c.radius),
            Cell::Float(c.energy),
            Cell::Float(c.energy - check_result.centered_energy),
        ]);
    }

    let mut assertions = vec![check(
        "h >= -1e-10 and h' >= -1e-10 after rescaling",
        cert.certified,
        format!("h_min {:.3e}, h'_min {:.3e}", cert.h_min, cert.hprime_min),
    )];
    if check_result.covered {
        assertions.push(check(
            "centered ball beats all off-center competitors",
            check_result.centered_optimal,
            format!("worst margin {:?}", check_result.worst_margin),
        ));
    } else {
        assertions.push(check(
            "R below r*: outside the certified large-volume regime (no assertion)",
            true,
            format!("r* = {:.6}", check_result.report.r_star),
        ));
    }
    Ok(Outcome {
        assertions,
        tables: vec![
            ("report.csv".into(), field),
            ("competitors.csv".into(), comp),
        ],
        plot: Some((
            "report.csv".into(),
            "r".into(),
            vec!["h".into(), "hprime".into(), "ell".into()],
        )),
    })
}
