//! Graph sets over spheres and the quantitative stability inequality.
//!
//! A nearly spherical set has boundary {R·x·(1 + u(x)) : x ∈ S^{n-1}} with
//! sup|u| < 1. Its weighted functionals reduce to sphere quadratures of
//! one-dimensional radial integrals:
//!
//! ```text
//! P_f = R^{n-1} ∫ (1+u)^{n-1} √(1 + |∇u|²/(1+u)²) e^{ψ(R(1+u))}
//! |E|_f = ∫_{S^{n-1}} ∫₀^{R(1+u)} s^{n-1} e^{ψ(s)} ds
//! G_f  = ∫_{S^{n-1}} ∫₀^{R(1+u)} g(s) s^{n-1} e^{ψ(s)} ds
//! ```
//!
//! The module also evaluates the sphere-specialized second variation
//!
//! ```text
//! Q(u,u) = −f(R) ∫_{∂B_R} (Δ_τ u + (n−1)/R² · u) u + f(R)(ψ''(R)+g'(R)) ∫_{∂B_R} u²
//! ```
//!
//! spectrally, and checks the stability gap E(E) − E(B_R) against the lower
//! bound c·R^{n-1}·e^{ψ(R)}·‖u‖²_{L²(S^{n-1})} with the configured constant
//! c = 0.4·min(1, R²(ψ''(R)+g'(R))) (just under the proof's leading ½
//! factor, so it stays valid for every small perturbation).

use crate::num::quad;
use crate::num::roots::solve_increasing;
use crate::radial::{ball_energy, omega_n, weighted_ball_volume};
use crate::sphere::{eigenvalue, Mode, ModeTable, SphereGrid};
use crate::weights::WeightPair;
use crate::{Error, Result};

/// Configured constant of the stability lower bound.
pub fn stability_constant(pair: &WeightPair, radius: f64) -> f64 {
    0.4 * 1.0f64.min(radius * radius * pair.kappa(radius))
}

/// Default W^{1,∞} smallness threshold for the stability check.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Grid plus tabulated eigenbasis for one resolution.
#[derive(Debug, Clone)]
pub struct SphereContext {
    grid: SphereGrid,
    table: ModeTable,
}

impl SphereContext {
    pub fn circle(points: usize, l_max: u32) -> Result<Self> {
        let grid = SphereGrid::circle(points);
        let table = ModeTable::build(&grid, l_max)?;
        Ok(SphereContext { grid, table })
    }

    pub fn sphere(polar: usize, azimuth: usize, l_max: u32) -> Result<Self> {
        let grid = SphereGrid::sphere(polar, azimuth);
        let table = ModeTable::build(&grid, l_max)?;
        Ok(SphereContext { grid, table })
    }

    pub fn n(&self) -> u32 {
        self.grid.n
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn table(&self) -> &ModeTable {
        &self.table
    }
}

/// A nearly spherical set: base radius plus band-limited graph values.
#[derive(Debug, Clone)]
pub struct GraphSet {
    pub radius: f64,
    coeffs: Vec<f64>,
    values: Vec<f64>,
    grad: Vec<(f64, f64)>,
}

impl GraphSet {
    /// Build from basis coefficients (the constant mode is index 0 for
    /// n = 2 and the (0,0) mode for n = 3).
    pub fn from_coeffs(ctx: &SphereContext, radius: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != ctx.table.modes.len() {
            return Err(Error::Domain(format!(
                "expected {} coefficients, got {}",
                ctx.table.modes.len(),
                coeffs.len()
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::Domain("base radius must be positive".into()));
        }
        let values = ctx.table.synthesize(&coeffs);
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup >= 1.0 {
            return Err(Error::Embedding(format!(
                "sup|u| = {sup:.6} ≥ 1: boundary graph is not embedded"
            )));
        }
        let grad = ctx.table.synthesize_gradient(&coeffs);
        Ok(GraphSet {
            radius,
            coeffs,
            values,
            grad,
        })
    }

    /// Build from node values, projecting onto the grid band (exact for
    /// band-limited input).
    pub fn from_values(ctx: &SphereContext, radius: f64, values: &[f64]) -> Result<Self> {
        if values.len() != ctx.grid.len() {
            return Err(Error::Domain("values must match the grid".into()));
        }
        let coeffs = ctx.table.decompose(&ctx.grid, values);
        Self::from_coeffs(ctx, radius, coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ‖u‖²_{L²(S^{n-1})}.
    pub fn l2_norm_sq(&self, ctx: &SphereContext) -> f64 {
        ctx.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v * v)
            .sum()
    }

    /// max(sup|u|, sup|∇u|) over the grid.
    pub fn w1_inf_norm(&self) -> f64 {
        let sup_u = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sup_g = self
            .grad
            .iter()
            .fold(0.0f64, |m, (a, b)| m.max((a * a + b * b).sqrt()));
        sup_u.max(sup_g)
    }
}

fn cumulative_weighted<F: Fn(f64) -> f64>(pair: &WeightPair, extra: F, rho: f64) -> Result<f64> {
    let nf = pair.n as f64;
    let knots = pair.knots();
    quad::integrate(
        |s| extra(s) * s.powf(nf - 1.0) * pair.psi.eval_unchecked(s, 0).exp(),
        0.0,
        rho,
        1e-12,
        &knots,
    )
}

/// Weighted volume |E|_f of the graph set.
pub fn graph_volume(pair: &WeightPair, ctx: &SphereContext, gs: &GraphSet) -> Result<f64> {
    check_pair(pair, ctx)?;
    let mut total = 0.0;
    for (w, u) in ctx.grid.weights().iter().zip(&gs.values) {
        total += w * cumulative_weighted(pair, |_| 1.0, gs.radius * (1.0 + u))?;
    }
    Ok(total)
}

/// Weighted potential G_f of the graph set.
pub fn graph_potential(pair: &WeightPair, ctx: &SphereContext, gs: &GraphSet) -> Result<f64> {
    check_pair(pair, ctx)?;
    let mut total = 0.0;
    for (w, u) in ctx.grid.weights().iter().zip(&gs.values) {
        total += w
            * cumulative_weighted(
                pair,
                |s| pair.g.eval_unchecked(s, 0),
                gs.radius * (1.0 + u),
            )?;
    }
    Ok(total)
}

/// Weighted perimeter P_f of the graph set.
pub fn graph_perimeter(pair: &WeightPair, ctx: &SphereContext, gs: &GraphSet) -> Result<f64> {
    check_pair(pair, ctx)?;
    let nf = pair.n as f64;
    let rn = gs.radius.powf(nf - 1.0);
    let mut total = 0.0;
    for ((w, u), (gt, gp)) in ctx
        .grid
        .weights()
        .iter()
        .zip(&gs.values)
        .zip(&gs.grad)
    {
        let one_u = 1.0 + u;
        let grad_sq = gt * gt + gp * gp;
        let metric = (1.0 + grad_sq / (one_u * one_u)).sqrt();
        let density = pair.psi.eval_unchecked(gs.radius * one_u, 0).exp();
        total += w * one_u.powf(nf - 1.0) * metric * density;
    }
    Ok(rn * total)
}

/// Total energy P_f + G_f.
pub fn graph_energy(pair: &WeightPair, ctx: &SphereContext, gs: &GraphSet) -> Result<f64> {
    Ok(graph_perimeter(pair, ctx, gs)? + graph_potential(pair, ctx, gs)?)
}

fn check_pair(pair: &WeightPair, ctx: &SphereContext) -> Result<()> {
    if pair.n != ctx.n() {
        return Err(Error::Domain(format!(
            "pair dimension {} does not match grid dimension {}",
            pair.n,
            ctx.n()
        )));
    }
    Ok(())
}

/// Shift u by the constant c₀ that matches `target_volume` (scalar Newton
/// with a bisection bracket on the embedding range).
pub fn volume_correct(
    pair: &WeightPair,
    ctx: &SphereContext,
    gs: &GraphSet,
    target_volume: f64,
) -> Result<GraphSet> {
    check_pair(pair, ctx)?;
    let u_min = gs.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let u_max = gs.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = 1e-9;
    let lo = -1.0 - u_min + margin;
    let hi = 1.0 - u_max - margin;
    if lo >= hi {
        return Err(Error::CorrectionInfeasible(
            "no constant shift keeps the graph embedded".into(),
        ));
    }
    let nf = pair.n as f64;
    let volume_at = |c: f64| -> f64 {
        let mut total = 0.0;
        for (w, u) in ctx.grid.weights().iter().zip(&gs.values) {
            let rho = gs.radius * (1.0 + u + c);
            total += w * cumulative_weighted(pair, |_| 1.0, rho).unwrap_or(f64::NAN);
        }
        total
    };
    let dvolume = |c: f64| -> f64 {
        let mut total = 0.0;
        for (w, u) in ctx.grid.weights().iter().zip(&gs.values) {
            let rho = gs.radius * (1.0 + u + c);
            total += w * gs.radius * rho.powf(nf - 1.0) * pair.psi.eval_unchecked(rho, 0).exp();
        }
        total
    };
    let tol = 1e-10 * target_volume.max(1.0);
    let c0 = solve_increasing(volume_at, dvolume, lo, hi, target_volume, tol).map_err(|e| {
        Error::CorrectionInfeasible(format!("volume shift could not be bracketed: {e}"))
    })?;

    // Shift the constant mode: the constant c₀ has coefficient c₀·√(n ωₙ).
    let mut coeffs = gs.coeffs.clone();
    let zero_mode = ctx
        .table
        .modes
        .iter()
        .position(|m| m.degree == 0)
        .expect("constant mode present");
    coeffs[zero_mode] += c0 * (nf * omega_n(pair.n)).sqrt();
    GraphSet::from_coeffs(ctx, gs.radius, coeffs)
}

/// The constant shift needed to volume-correct, without applying it.
pub fn volume_shift(
    pair: &WeightPair,
    ctx: &SphereContext,
    gs: &GraphSet,
    target_volume: f64,
) -> Result<f64> {
    let corrected = volume_correct(pair, ctx, gs, target_volume)?;
    let zero_mode = ctx
        .table
        .modes
        .iter()
        .position(|m| m.degree == 0)
        .unwrap();
    let nf = pair.n as f64;
    Ok((corrected.coeffs[zero_mode] - gs.coeffs[zero_mode]) / (nf * omega_n(pair.n)).sqrt())
}

/// Per-condition report of the stability hypotheses at radius R.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub kappa_at_r: f64,
    /// ψ''(R) + g'(R) > 0.
    pub second_order_positive: bool,
    /// ψ'(R) + g(R) ≥ 0.
    pub first_order_nonneg: bool,
    /// ψ'(R) > −(n−2)(n−1) / (R²(ψ'(R)+g(R)) + (n−1)R).
    pub slope_condition: bool,
    /// The relaxed combined expression Λ; stability needs Λ > 0.
    pub lambda: f64,
    pub relaxed_condition: bool,
}

/// Evaluate the displayed stability conditions and the relaxed combined one.
pub fn stability_conditions(pair: &WeightPair, radius: f64) -> Result<StabilityReport> {
    if !(radius > 0.0) {
        return Err(Error::Domain("radius must be positive".into()));
    }
    let nf = pair.n as f64;
    let r = radius;
    let dpsi = pair.psi.eval_unchecked(r, 1);
    let g = pair.g.eval_unchecked(r, 0);
    let kappa = pair.kappa(r);
    let denom = r * r * (dpsi + g) + (nf - 1.0) * r;
    let slope_condition = if denom > 0.0 {
        dpsi > -(nf - 2.0) * (nf - 1.0) / denom
    } else {
        false
    };
    let lambda = (r * r * dpsi + r * (nf - 1.0)) * (dpsi + g)
        + r * (nf - 1.0) * dpsi
        + r * r * kappa
        + (nf - 1.0) * (nf - 2.0);
    Ok(StabilityReport {
        kappa_at_r: kappa,
        second_order_positive: kappa > 0.0,
        first_order_nonneg: dpsi + g >= 0.0,
        slope_condition,
        lambda,
        relaxed_condition: lambda > 0.0,
    })
}

/// Second variation Q(u, u) on the sphere of radius R, computed spectrally
/// from the harmonic expansion of the node values.
pub fn second_variation_q(
    pair: &WeightPair,
    ctx: &SphereContext,
    radius: f64,
    values: &[f64],
) -> Result<f64> {
    check_pair(pair, ctx)?;
    if values.len() != ctx.grid.len() {
        return Err(Error::Resolution(
            "values do not match the grid resolution".into(),
        ));
    }
    let coeffs = ctx.table.decompose(&ctx.grid, values);
    let nf = pair.n as f64;
    let f_r = pair.psi.eval_unchecked(radius, 0).exp();
    let kappa = pair.kappa(radius);
    let area_scale = radius.powf(nf - 1.0);
    let mut q = 0.0;
    for (mode, a) in ctx.table.modes.iter().zip(&coeffs) {
        let lam = eigenvalue(pair.n, mode.degree);
        q += a * a * ((lam - (nf - 1.0)) / (radius * radius) + kappa);
    }
    Ok(f_r * area_scale * q)
}

/// Stability gap result: measured gap, certified lower bound, and the ratio
/// gap / ‖u‖² (None for u ≡ 0).
#[derive(Debug, Clone)]
pub struct FugledeGap {
    pub gap: f64,
    pub lower_bound: f64,
    pub u_l2_sq: f64,
    pub constant: f64,
    pub ratio: Option<f64>,
}

/// Energy gap of a volume-corrected graph set against the centered ball,
/// compared with the stability lower bound.
///
/// Preconditions: the stability conditions hold at R (second-order strict,
/// first-order nonnegative, relaxed combined positive), ‖u‖_{W^{1,∞}} ≤
/// `epsilon`, and the set is volume-corrected to |B_R|_f.
pub fn fuglede_gap(
    pair: &WeightPair,
    ctx: &SphereContext,
    gs: &GraphSet,
    epsilon: f64,
) -> Result<FugledeGap> {
    check_pair(pair, ctx)?;
    let r = gs.radius;
    let stab = stability_conditions(pair, r)?;
    if !(stab.second_order_positive && stab.first_order_nonneg && stab.relaxed_condition) {
        return Err(Error::Precondition(format!(
            "stability conditions fail at R = {r}: {stab:?}"
        )));
    }
    let w1 = gs.w1_inf_norm();
    if w1 > epsilon {
        return Err(Error::Precondition(format!(
            "‖u‖_W1∞ = {w1:.3e} exceeds the configured ε = {epsilon:.3e}"
        )));
    }
    let target = weighted_ball_volume(pair, r)?;
    let vol = graph_volume(pair, ctx, gs)?;
    if (vol - target).abs() > 1e-8 * target.max(1.0) {
        return Err(Error::Precondition(format!(
            "graph set is not volume-corrected: |E|_f = {vol:.12e}, |B_R|_f = {target:.12e}"
        )));
    }

    let gap = graph_energy(pair, ctx, gs)? - ball_energy(pair, r)?.total;
    let u_l2_sq = gs.l2_norm_sq(ctx);
    let constant = stability_constant(pair, r);
    let nf = pair.n as f64;
    let lower_bound =
        constant * r.powf(nf - 1.0) * pair.psi.eval_unchecked(r, 0).exp() * u_l2_sq;
    let ratio = (u_l2_sq > 0.0).then(|| gap / u_l2_sq);
    Ok(FugledeGap {
        gap,
        lower_bound,
        u_l2_sq,
        constant,
        ratio,
    })
}

/// Spectrum of a graph function against the orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct HarmonicSpectrum {
    pub n: u32,
    pub entries: Vec<(Mode, f64)>,
}

impl HarmonicSpectrum {
    pub fn coeff(&self, degree: u32, index: i32) -> f64 {
        self.entries
            .iter()
            .find(|(m, _)| m.degree == degree && m.index == index)
            .map_or(0.0, |(_, c)| *c)
    }

    /// Σ a² (Parseval partner of ‖u‖²_{L²}).
    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c * c).sum()
    }
}

/// Expand the graph values over the eigenbasis up to degree `l_max`.
pub fn harmonic_decompose(
    ctx: &SphereContext,
    gs: &GraphSet,
    l_max: u32,
) -> Result<HarmonicSpectrum> {
    let table_band = ctx
        .table
        .modes
        .iter()
        .map(|m| m.degree)
        .max()
        .unwrap_or(0);
    if l_max > ctx.grid.max_degree().min(table_band) {
        return Err(Error::Resolution(format!(
            "degree {l_max} exceeds the resolved band {}",
            ctx.grid.max_degree().min(table_band)
        )));
    }
    let coeffs = ctx.table.decompose(&ctx.grid, &gs.values);
    let entries = ctx
        .table
        .modes
        .iter()
        .zip(&coeffs)
        .filter(|(m, _)| m.degree <= l_max)
        .map(|(m, &c)| (*m, c))
        .collect();
    Ok(HarmonicSpectrum {
        n: ctx.n(),
        entries,
    })
}
