//! Radial weight pairs (ψ, g) with exact derivatives.
//!
//! A weight pair carries the log-density ψ (f = e^ψ) and the potential g as
//! radial profiles on [0, ∞). Four profile kinds are supported: polynomials
//! in r, the quadratic a·r², clamped C² interpolating cubic splines, and
//! piecewise polynomials with smoothstep-blended curvature (the kind the
//! counterexample constructions emit). Every kind evaluates derivatives
//! analytically; there is no symbolic differentiation of user expressions.
//!
//! Classification samples κ(r) = ψ''(r) + g'(r) on a grid plus all knots and
//! reports the admissibility flags at grid resolution.

mod counterexample;
mod serialize;

pub use counterexample::{
    g_monotone_curvature_at_origin, make_counterexample_g_monotone,
    make_counterexample_psi_monotone, GMonotoneParams,
};
pub use serialize::{pair_from_text, pair_to_text};

use crate::num::poly::Poly;
use crate::{Error, Result};

/// Tolerance below which the grid minimum of κ still counts as admissible.
pub const KAPPA_TOL: f64 = 1e-10;

/// Piecewise polynomial on [0, ∞): piece `i` covers `[breaks[i], breaks[i+1])`
/// and stores its coefficients in the normalized local coordinate
/// τ = (r − breaksᵢ) / widthsᵢ; the last piece extends to +∞ with an
/// explicit normalization width.
///
/// The normalization keeps coefficients O(level) even for pieces a few
/// 1e-3 wide, so one-sided derivative limits at knots cancel among small
/// terms instead of among Δ/w^k-sized ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    pub breaks: Vec<f64>,
    pub widths: Vec<f64>,
    pub pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<f64>, widths: Vec<f64>, pieces: Vec<Poly>) -> Self {
        assert_eq!(breaks.len(), pieces.len());
        assert_eq!(breaks.len(), widths.len());
        assert!(!breaks.is_empty());
        assert_eq!(breaks[0], 0.0, "piecewise profiles start at r = 0");
        debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(widths.iter().all(|&w| w > 0.0));
        PiecewisePoly {
            breaks,
            widths,
            pieces,
        }
    }

    /// Interior-interval widths from the breaks, tail width as given.
    pub fn with_interval_widths(breaks: Vec<f64>, pieces: Vec<Poly>, tail_width: f64) -> Self {
        let mut widths: Vec<f64> = breaks.windows(2).map(|w| w[1] - w[0]).collect();
        widths.push(tail_width);
        Self::new(breaks, widths, pieces)
    }

    fn piece_index(&self, r: f64) -> usize {
        // partition_point returns the first index with break > r.
        self.breaks.partition_point(|&b| b <= r).saturating_sub(1)
    }

    pub fn eval_deriv(&self, r: f64, order: u32) -> f64 {
        let i = self.piece_index(r);
        let w = self.widths[i];
        self.pieces[i].eval_deriv((r - self.breaks[i]) / w, order) / w.powi(order as i32)
    }

    /// profile(r) ↦ value_scale · profile(r / lambda).
    pub fn rescale(&self, lambda: f64, value_scale: f64) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.iter().map(|b| b * lambda).collect(),
            widths: self.widths.iter().map(|w| w * lambda).collect(),
            pieces: self.pieces.iter().map(|p| p.scaled(value_scale)).collect(),
        }
    }

    /// Pointwise sum on the union of the break sets.
    pub fn add(&self, other: &PiecewisePoly) -> PiecewisePoly {
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut widths: Vec<f64> = breaks.windows(2).map(|w| w[1] - w[0]).collect();
        widths.push(
            self.widths
                .last()
                .unwrap()
                .max(*other.widths.last().unwrap()),
        );
        let pieces = breaks
            .iter()
            .zip(&widths)
            .map(|(&b, &w)| {
                let re = |pp: &PiecewisePoly| {
                    let i = pp.piece_index(b);
                    // p evaluated at τ_src = (b − b_i)/w_i + τ_new·(w/w_i)
                    pp.pieces[i]
                        .translate((b - pp.breaks[i]) / pp.widths[i])
                        .scale_arg(w / pp.widths[i])
                };
                re(self).add(&re(other))
            })
            .collect();
        PiecewisePoly {
            breaks,
            widths,
            pieces,
        }
    }
}

impl Poly {
    /// Taylor shift: returns q with q(t) = p(t + d).
    pub fn translate(&self, d: f64) -> Poly {
        if d == 0.0 {
            return self.clone();
        }
        let n = self.c.len();
        let mut out = vec![0.0; n];
        // Repeated synthetic division by (t - (-d)).
        let mut work = self.c.clone();
        for oi in out.iter_mut().take(n) {
            let mut carry = 0.0;
            for w in work.iter_mut().rev() {
                let v = *w + carry * d;
                carry = v;
                *w = v;
            }
            *oi = work[0];
            work.remove(0);
        }
        Poly::new(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Σ cᵢ rⁱ
    Polynomial(Poly),
    /// a·r²
    Gaussian(f64),
    /// Clamped C² interpolating cubic spline; extrapolates with the end cubic.
    Spline {
        x: Vec<f64>,
        y: Vec<f64>,
        slope_left: f64,
        slope_right: f64,
        compiled: PiecewisePoly,
    },
    Piecewise(PiecewisePoly),
}

/// One radial profile with analytic derivatives up to `max_derivative_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    repr: Repr,
    max_derivative_order: u32,
}

impl WeightProfile {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        WeightProfile {
            repr: Repr::Polynomial(Poly::new(coeffs)),
            max_derivative_order: 3,
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::polynomial(vec![v])
    }

    pub fn gaussian(a: f64) -> Self {
        WeightProfile {
            repr: Repr::Gaussian(a),
            max_derivative_order: 3,
        }
    }

    /// Clamped C² cubic spline through `(x[i], y[i])` with prescribed end
    /// slopes. Knots must start at 0 and strictly increase.
    pub fn cubic_spline(x: Vec<f64>, y: Vec<f64>, slope_left: f64, slope_right: f64) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Domain("spline needs at least two knots".into()));
        }
        if x[0] != 0.0 {
            return Err(Error::Domain("spline knots must start at r = 0".into()));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("spline knots must strictly increase".into()));
        }
        let compiled = solve_clamped_spline(&x, &y, slope_left, slope_right);
        Ok(WeightProfile {
            repr: Repr::Spline {
                x,
                y,
                slope_left,
                slope_right,
                compiled,
            },
            // C² across knots; third derivatives jump.
            max_derivative_order: 2,
        })
    }

    pub fn piecewise(pw: PiecewisePoly, max_derivative_order: u32) -> Self {
        debug_assert!(max_derivative_order >= 2);
        WeightProfile {
            repr: Repr::Piecewise(pw),
            max_derivative_order,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.repr {
            Repr::Polynomial(_) => "polynomial",
            Repr::Gaussian(_) => "gaussian",
            Repr::Spline { .. } => "cubic-spline",
            Repr::Piecewise(_) => "piecewise",
        }
    }

    pub fn max_derivative_order(&self) -> u32 {
        self.max_derivative_order
    }

    /// Interior knots, for quadrature splitting and classification grids.
    pub fn knots(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Polynomial(_) | Repr::Gaussian(_) => Vec::new(),
            Repr::Spline { compiled, .. } | Repr::Piecewise(compiled) => {
                compiled.breaks[1..].to_vec()
            }
        }
    }

    /// `order`-th derivative at r ≥ 0.
    pub fn eval(&self, r: f64, order: u32) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("profile evaluated at r = {r} < 0")));
        }
        if order > self.max_derivative_order {
            return Err(Error::UnsupportedOrder {
                requested: order,
                available: self.max_derivative_order,
            });
        }
        Ok(self.eval_unchecked(r, order))
    }

    /// Evaluation without the domain/order guards, for hot loops that have
    /// validated their inputs once.
    pub fn eval_unchecked(&self, r: f64, order: u32) -> f64 {
        match &self.repr {
            Repr::Polynomial(p) => p.eval_deriv(r, order),
            Repr::Gaussian(a) => match order {
                0 => a * r * r,
                1 => 2.0 * a * r,
                2 => 2.0 * a,
                _ => 0.0,
            },
            Repr::Spline { compiled, .. } | Repr::Piecewise(compiled) => {
                compiled.eval_deriv(r, order)
            }
        }
    }

    /// profile(r) ↦ value_scale · profile(r / lambda), exactly, same kind.
    pub fn rescale(&self, lambda: f64, value_scale: f64) -> WeightProfile {
        let repr = match &self.repr {
            Repr::Polynomial(p) => Repr::Polynomial(p.scale_arg(1.0 / lambda).scaled(value_scale)),
            Repr::Gaussian(a) => Repr::Gaussian(value_scale * a / (lambda * lambda)),
            Repr::Spline {
                x,
                y,
                slope_left,
                slope_right,
                ..
            } => {
                let nx: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                let ny: Vec<f64> = y.iter().map(|v| v * value_scale).collect();
                let sl = slope_left * value_scale / lambda;
                let sr = slope_right * value_scale / lambda;
                let compiled = solve_clamped_spline(&nx, &ny, sl, sr);
                Repr::Spline {
                    x: nx,
                    y: ny,
                    slope_left: sl,
                    slope_right: sr,
                    compiled,
                }
            }
            Repr::Piecewise(pw) => Repr::Piecewise(pw.rescale(lambda, value_scale)),
        };
        WeightProfile {
            repr,
            max_derivative_order: self.max_derivative_order,
        }
    }

    /// Largest mismatch of one-sided limits at interior knots for derivative
    /// orders 0..=max_derivative_order, relative to the derivative scale of
    /// the two adjoining pieces (one-sided limits cancel large interior
    /// coefficients, so the raw difference carries their rounding).
    pub fn knot_mismatch(&self) -> f64 {
        let compiled = match &self.repr {
            Repr::Spline { compiled, .. } | Repr::Piecewise(compiled) => compiled,
            _ => return 0.0,
        };
        let mut worst = 0.0f64;
        for j in 1..compiled.breaks.len() {
            let i = j - 1;
            let (wl, wr) = (compiled.widths[i], compiled.widths[j]);
            for order in 0..=self.max_derivative_order {
                let pw = |k: usize, tau: f64| {
                    compiled.pieces[k].eval_deriv(tau, order)
                        / compiled.widths[k].powi(order as i32)
                };
                let left = pw(i, 1.0);
                let right = pw(j, 0.0);
                // Derivative scale over both pieces (ends and midpoints).
                let mut scale = 1.0f64;
                for tau in [0.0, 0.5, 1.0] {
                    scale = scale.max(pw(i, tau).abs()).max(pw(j, tau).abs());
                }
                let _ = (wl, wr);
                worst = worst.max((left - right).abs() / scale);
            }
        }
        worst
    }
}

/// Clamped C² interpolating cubic spline solved by the tridiagonal system
/// for the knot second derivatives.
fn solve_clamped_spline(x: &[f64], y: &[f64], slope_left: f64, slope_right: f64) -> PiecewisePoly {
    let n = x.len();
    let mut h = vec![0.0; n - 1];
    for i in 0..n - 1 {
        h[i] = x[i + 1] - x[i];
    }

    // Tridiagonal system A·m = rhs for second derivatives m.
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    diag[0] = 2.0 * h[0];
    sup[0] = h[0];
    rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - slope_left);
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    sub[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (slope_right - (y[n - 1] - y[n - 2]) / h[n - 2]);

    // Thomas algorithm.
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }

    // Pieces in the normalized coordinate τ = (r − x_i)/h_i.
    let mut pieces = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let b = (y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
        pieces.push(Poly::new(vec![
            y[i],
            b * h[i],
            m[i] / 2.0 * h[i] * h[i],
            (m[i + 1] - m[i]) / 6.0 * h[i] * h[i],
        ]));
    }
    PiecewisePoly::with_interval_widths(x[..n - 1].to_vec(), pieces, h[n - 2])
}

/// A weight pair (ψ, g) in dimension n with a working radius.
///
/// Construction enforces ψ'(0) = 0 exactly (to 1e-12) and e^ψ > 0, g ≥ 0 on
/// [0, r_max] at sampling resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    pub psi: WeightProfile,
    pub g: WeightProfile,
    pub n: u32,
    pub r_max: f64,
}

impl WeightPair {
    pub fn new(psi: WeightProfile, g: WeightProfile, n: u32, r_max: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("dimension must be ≥ 1".into()));
        }
        if !(r_max > 0.0) {
            return Err(Error::Domain("r_max must be positive".into()));
        }
        let dpsi0 = psi.eval(0.0, 1)?;
        if dpsi0.abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "ψ'(0) = {dpsi0:.3e} ≠ 0 (radial log-density must be critical at the origin)"
            )));
        }
        let pair = WeightPair { psi, g, n, r_max };
        // g ≥ 0 spot check on knots plus a coarse grid.
        let mut pts = pair.g.knots();
        for i in 0..=64 {
            pts.push(r_max * i as f64 / 64.0);
        }
        for r in pts {
            if r <= r_max && pair.g.eval_unchecked(r, 0) < -1e-12 {
                return Err(Error::PositivityViolated(format!(
                    "g({r:.6}) = {:.3e} < 0",
                    pair.g.eval_unchecked(r, 0)
                )));
            }
        }
        Ok(pair)
    }

    /// f(r) = e^{ψ(r)}.
    pub fn f(&self, r: f64) -> f64 {
        self.psi.eval_unchecked(r, 0).exp()
    }

    /// κ(r) = ψ''(r) + g'(r).
    pub fn kappa(&self, r: f64) -> f64 {
        self.psi.eval_unchecked(r, 2) + self.g.eval_unchecked(r, 1)
    }

    /// Knots of both profiles, sorted, within [0, r_max].
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .psi
            .knots()
            .into_iter()
            .chain(self.g.knots())
            .filter(|&r| r > 0.0 && r < self.r_max)
            .collect();
        k.sort_by(|a, b| a.partial_cmp(b).unwrap());
        k.dedup();
        k
    }

    /// Dilation y = λx with λ = √κ: ψ̃(s) = ψ(s/λ), g̃(s) = g(s/λ)/λ.
    ///
    /// For a κ-uniformly admissible pair the result satisfies ψ̃'' + g̃' ≥ 1.
    pub fn rescale(&self, kappa: f64) -> Result<WeightPair> {
        if !(kappa > 0.0) {
            return Err(Error::Domain("rescale needs κ > 0".into()));
        }
        let lambda = kappa.sqrt();
        WeightPair::new(
            self.psi.rescale(lambda, 1.0),
            self.g.rescale(lambda, 1.0 / lambda),
            self.n,
            self.r_max * lambda,
        )
    }
}

/// Grid-certified admissibility flags for a weight pair.
///
/// `kappa_uniform` is the grid minimum of κ when it is strictly positive;
/// its presence implies `strict`, which implies `admissible`. The
/// `g_prime_origin` field records g'(0⁺): an even extension of g has a kink
/// at 0 when this is nonzero, which is reported but not rejected.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub strict: bool,
    pub kappa_uniform: Option<f64>,
    pub psi_monotone: bool,
    pub g_monotone: bool,
    pub psi_min_at_origin: bool,
    pub g_prime_origin: f64,
    pub grid_used: String,
}

/// Sample κ, ψ', g', ψ on `samples` uniform points of [0, r_max] plus all
/// knots and report the admissibility flags at grid resolution.
pub fn classify(pair: &WeightPair, r_max: f64, samples: usize) -> AdmissibilityReport {
    let samples = samples.max(100);
    let mut grid: Vec<f64> = (0..=samples)
        .map(|i| r_max * i as f64 / samples as f64)
        .collect();
    let knots = pair.knots();
    grid.extend(knots.iter().copied().filter(|&r| r <= r_max));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut kappa_min = f64::INFINITY;
    let mut dpsi_min = f64::INFINITY;
    let mut dg_min = f64::INFINITY;
    let mut psi_min = f64::INFINITY;
    let mut kappa_min_pos = f64::INFINITY; // over r > 0 only
    for &r in &grid {
        let k = pair.kappa(r);
        kappa_min = kappa_min.min(k);
        if r > 0.0 {
            kappa_min_pos = kappa_min_pos.min(k);
        }
        dpsi_min = dpsi_min.min(pair.psi.eval_unchecked(r, 1));
        dg_min = dg_min.min(pair.g.eval_unchecked(r, 1));
        psi_min = psi_min.min(pair.psi.eval_unchecked(r, 0));
    }
    let psi0 = pair.psi.eval_unchecked(0.0, 0);

    let admissible = kappa_min >= -KAPPA_TOL;
    let strict = admissible && kappa_min_pos > 0.0;
    let kappa_uniform = (kappa_min > 0.0).then_some(kappa_min);

    AdmissibilityReport {
        admissible,
        strict,
        kappa_uniform,
        psi_monotone: dpsi_min >= -KAPPA_TOL,
        g_monotone: dg_min >= -KAPPA_TOL,
        psi_min_at_origin: psi_min >= psi0 - KAPPA_TOL,
        g_prime_origin: pair.g.eval_unchecked(0.0, 1),
        grid_used: format!(
            "uniform {} samples on [0, {:.6}] plus {} knots",
            samples + 1,
            r_max,
            knots.len()
        ),
    }
}
