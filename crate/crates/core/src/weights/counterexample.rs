//! The two weight constructions for which centered balls fail to minimize.
//!
//! Both profiles are assembled from a continuous, piecewise-cubic curvature
//! shape whose level transitions are cubic smoothsteps with zero end slope.
//! Integrating the shape twice yields a piecewise-quintic ψ of class C³;
//! since every sign change of ψ'' happens at a knot where both ψ'' and ψ'''
//! vanish, the induced potential g (built from −min{ψ'', 0}) is C².

use super::{PiecewisePoly, WeightPair, WeightProfile};
use crate::num::poly::{smoothstep3, smoothstep5, Poly};
use crate::num::special::unit_ball_volume;
use crate::{Error, Result};

/// One segment of a curvature shape.
#[derive(Debug, Clone, Copy)]
enum Seg {
    /// Constant level over `width` (the final segment extends to +∞).
    Const { width: f64, level: f64 },
    /// Smoothstep from `from` to `to` over `width`; never changes sign
    /// strictly inside the segment because `from·to ≥ 0` by construction.
    Blend { width: f64, from: f64, to: f64 },
}

impl Seg {
    fn width(&self) -> f64 {
        match self {
            Seg::Const { width, .. } | Seg::Blend { width, .. } => *width,
        }
    }

    /// Piece polynomial in the normalized coordinate τ = (r − start)/width.
    fn poly(&self) -> Poly {
        match self {
            Seg::Const { level, .. } => Poly::constant(*level),
            Seg::Blend { from, to, .. } => smoothstep3()
                .scaled(to - from)
                .add(&Poly::constant(*from)),
        }
    }

    fn nonpositive(&self) -> bool {
        match self {
            Seg::Const { level, .. } => *level <= 0.0,
            Seg::Blend { from, to, .. } => *from <= 0.0 && *to <= 0.0,
        }
    }
}

fn curvature_pieces(segs: &[Seg]) -> PiecewisePoly {
    let mut breaks = Vec::with_capacity(segs.len());
    let mut widths = Vec::with_capacity(segs.len());
    let mut pieces = Vec::with_capacity(segs.len());
    let mut pos = 0.0;
    for s in segs {
        breaks.push(pos);
        widths.push(s.width());
        pieces.push(s.poly());
        pos += s.width();
    }
    PiecewisePoly::new(breaks, widths, pieces)
}

/// Antiderivative of a piecewise polynomial, continuous, with `value0` at 0.
///
/// In the normalized coordinate, ∫₀^t p dt' = wᵢ·∫₀^τ p dτ', so each piece
/// antiderivative is scaled by its width and chained at τ = 1.
fn integrate_once(pw: &PiecewisePoly, value0: f64) -> PiecewisePoly {
    let mut pieces = Vec::with_capacity(pw.pieces.len());
    let mut acc = value0;
    for i in 0..pw.pieces.len() {
        let p = pw.pieces[i].antiderivative(0.0).scaled(pw.widths[i]);
        let p = p.add(&Poly::constant(acc));
        if i + 1 < pw.breaks.len() {
            acc = p.eval(1.0);
        }
        pieces.push(p);
    }
    PiecewisePoly::new(pw.breaks.clone(), pw.widths.clone(), pieces)
}

fn integrate_twice(curv: &PiecewisePoly, slope0: f64, value0: f64) -> PiecewisePoly {
    integrate_once(&integrate_once(curv, slope0), value0)
}

/// g' contribution −min{ψ'', 0} for a curvature shape whose sign changes
/// only occur at segment boundaries.
fn negative_part(segs: &[Seg]) -> PiecewisePoly {
    let mut breaks = Vec::with_capacity(segs.len());
    let mut widths = Vec::with_capacity(segs.len());
    let mut pieces = Vec::with_capacity(segs.len());
    let mut pos = 0.0;
    for s in segs {
        breaks.push(pos);
        widths.push(s.width());
        pieces.push(if s.nonpositive() {
            s.poly().scaled(-1.0)
        } else {
            Poly::zero()
        });
        pos += s.width();
    }
    PiecewisePoly::new(breaks, widths, pieces)
}

/// Parameters of the g-monotone construction.
///
/// The density rises from 1 to e^M near the origin (over [0, eps]), stays
/// flat until L, drops to e^{M/2} across [L, L' = L + h], and stays flat on
/// [L', L'']. The potential g absorbs the concave parts of ψ so that
/// κ = ψ'' + g' ≥ 0, and a δ-linear term makes the pair κ-uniform.
#[derive(Debug, Clone)]
pub struct GMonotoneParams {
    pub n: u32,
    pub m: f64,
    pub v: f64,
    pub l: f64,
    pub eps: f64,
    pub h: f64,
    pub l_prime: f64,
    pub l_second: f64,
    pub delta: f64,
}

impl Default for GMonotoneParams {
    fn default() -> Self {
        GMonotoneParams {
            n: 2,
            m: 1.0,
            v: 1.0,
            l: 1.0,
            eps: 0.04,
            h: 3.0,
            l_prime: 4.0,
            l_second: 5.0,
            delta: 1e-3,
        }
    }
}

impl GMonotoneParams {
    /// Radius of the off-center competitor ball sitting in the flat annulus.
    pub fn tau_prime(&self) -> f64 {
        let omega = unit_ball_volume(self.n);
        ((-self.m / 2.0).exp() * self.v / omega).powf(1.0 / self.n as f64)
    }

    /// Center distance placing the competitor just inside the annulus.
    pub fn competitor_distance(&self) -> f64 {
        self.l_prime + self.tau_prime()
    }
}

/// Curvature level on [0, eps/4] of the constructed ψ (the constant `c`
/// that enters the κ-uniformity bound min{c, δ}).
pub fn g_monotone_curvature_at_origin(params: &GMonotoneParams) -> Result<f64> {
    let (rise_scale, _) = rise_and_fall_scales(params)?;
    Ok(rise_scale)
}

fn rise_and_fall_scales(p: &GMonotoneParams) -> Result<(f64, f64)> {
    let e8 = p.eps / 8.0;
    // Unit-level rise shape: positive area 7eps/16 over [0, eps/2],
    // balanced by a lobe of level −7/6 (areas match exactly because a
    // smoothstep transition integrates to width·(from + to)/2).
    let q = 7.0 / 6.0;
    let rise = [
        Seg::Const {
            width: 3.0 * e8,
            level: 1.0,
        },
        Seg::Blend {
            width: e8,
            from: 1.0,
            to: 0.0,
        },
        Seg::Blend {
            width: e8,
            from: 0.0,
            to: -q,
        },
        Seg::Const {
            width: 2.0 * e8,
            level: -q,
        },
        Seg::Blend {
            width: e8,
            from: -q,
            to: 0.0,
        },
    ];
    let unit = integrate_twice(&curvature_pieces(&rise), 0.0, 0.0);
    let unit_height = unit.eval_deriv(p.eps, 0);
    let rise_scale = p.m / unit_height;

    // Unit fall: antisymmetric lobes about the midpoint of [L, L'];
    // total drop is 3h²/16 at unit level.
    let fall_scale = (p.m / 2.0) / (3.0 * p.h * p.h / 16.0);
    Ok((rise_scale, fall_scale))
}

/// First construction: g strictly monotone, ψ with its unique minimum at
/// the origin, pair κ-uniformly admissible — yet the centered ball of
/// weighted volume v loses to an off-center ball in the flat annulus.
///
/// Fails with [`Error::ConstructionInfeasible`] naming the violated
/// inequality when the parameters do not satisfy the construction bounds.
pub fn make_counterexample_g_monotone(p: &GMonotoneParams) -> Result<WeightPair> {
    if p.n < 2 {
        return Err(Error::ConstructionInfeasible("n >= 2".into()));
    }
    let nf = p.n as f64;
    let omega = unit_ball_volume(p.n);
    if !(p.eps > 0.0 && p.eps < p.l && p.l < p.l_prime && p.l_prime < p.l_second) {
        return Err(Error::ConstructionInfeasible(
            "0 < eps < L < L' < L''".into(),
        ));
    }
    if (p.l_prime - (p.l + p.h)).abs() > 1e-12 * (1.0 + p.l_prime.abs()) {
        return Err(Error::ConstructionInfeasible("L' = L + h".into()));
    }
    if !(p.v > 0.0 && p.m > 0.0) {
        return Err(Error::ConstructionInfeasible("v > 0 and M > 0".into()));
    }
    if !(p.v < omega * p.m.exp() * p.l.powf(nf) / 2.0) {
        return Err(Error::ConstructionInfeasible(
            "v < omega_n e^M L^n / 2".into(),
        ));
    }
    if !(p.v < omega * (p.m / 2.0).exp() * (p.l_second - p.l_prime).powf(nf)) {
        return Err(Error::ConstructionInfeasible(
            "v < omega_n e^(M/2) (L'' - L')^n".into(),
        ));
    }
    let eps_bound = 0.25 * (-p.m).exp() * omega.powf((1.0 - nf) / nf) * p.v.powf((nf - 1.0) / nf);
    if !(p.eps.powf(nf - 1.0) <= eps_bound) {
        return Err(Error::ConstructionInfeasible(format!(
            "eps^(n-1) <= e^(-M) omega_n^((1-n)/n) v^((n-1)/n) / 4 = {eps_bound:.6}"
        )));
    }
    let h_bound = (p.v / omega) * (-p.m).exp() * p.eps.powf(1.0 - nf);
    if !(p.h >= h_bound) {
        return Err(Error::ConstructionInfeasible(format!(
            "h >= (v/omega_n) e^(-M) eps^(1-n) = {h_bound:.6}"
        )));
    }
    let delta_bound =
        0.25 * omega.powf(1.0 / nf) * p.v.powf((nf - 1.0) / nf) * p.m / (p.l_second * p.v);
    if !(p.delta > 0.0 && p.delta < delta_bound) {
        return Err(Error::ConstructionInfeasible(format!(
            "0 < delta < omega_n^(1/n) v^((n-1)/n) M / (4 L'' v) = {delta_bound:.6}"
        )));
    }

    let (s, d) = rise_and_fall_scales(p)?;
    let q = 7.0 / 6.0;
    let e8 = p.eps / 8.0;
    let h8 = p.h / 8.0;
    const TAIL_CURVATURE: f64 = 0.25;
    let segs = [
        Seg::Const {
            width: 3.0 * e8,
            level: s,
        },
        Seg::Blend {
            width: e8,
            from: s,
            to: 0.0,
        },
        Seg::Blend {
            width: e8,
            from: 0.0,
            to: -q * s,
        },
        Seg::Const {
            width: 2.0 * e8,
            level: -q * s,
        },
        Seg::Blend {
            width: e8,
            from: -q * s,
            to: 0.0,
        },
        Seg::Const {
            width: p.l - p.eps,
            level: 0.0,
        },
        Seg::Blend {
            width: h8,
            from: 0.0,
            to: -d,
        },
        Seg::Const {
            width: 2.0 * h8,
            level: -d,
        },
        Seg::Blend {
            width: h8,
            from: -d,
            to: 0.0,
        },
        Seg::Blend {
            width: h8,
            from: 0.0,
            to: d,
        },
        Seg::Const {
            width: 2.0 * h8,
            level: d,
        },
        Seg::Blend {
            width: h8,
            from: d,
            to: 0.0,
        },
        Seg::Const {
            width: p.l_second - p.l_prime,
            level: 0.0,
        },
        Seg::Blend {
            width: 1.0,
            from: 0.0,
            to: TAIL_CURVATURE,
        },
        Seg::Const {
            width: 1.0,
            level: TAIL_CURVATURE,
        },
    ];
    let curv = curvature_pieces(&segs);
    let psi_pw = integrate_twice(&curv, 0.0, 0.0);
    let psi = WeightProfile::piecewise(psi_pw, 3);

    // g' = −min{ψ'', 0} + α' + tail ramp, each piece C¹, hence g ∈ C².
    let ramp_width = p.eps / 4.0;
    let alpha_prime = PiecewisePoly::new(
        vec![0.0, ramp_width],
        vec![ramp_width, 1.0],
        vec![
            smoothstep5().scaled(p.delta),
            Poly::constant(p.delta),
        ],
    );
    let tail_ramp = PiecewisePoly::new(
        vec![0.0, p.l_second, p.l_second + 1.0],
        vec![p.l_second, 1.0, 1.0],
        vec![
            Poly::zero(),
            smoothstep3().scaled(1.0 - p.delta),
            Poly::constant(1.0 - p.delta),
        ],
    );
    let g_prime = negative_part(&segs).add(&alpha_prime).add(&tail_ramp);
    const G_BASE: f64 = 0.1;
    let g = WeightProfile::piecewise(integrate_once(&g_prime, G_BASE), 2);

    let r_max = p.l_second + 26.0;
    WeightPair::new(psi, g, p.n, r_max)
}

/// Second construction: ψ monotone nondecreasing with a long flat plateau
/// [0, 1/eps] followed by quadratic growth eps·(r − 1/eps)², and
/// g(r) = g0 − ψ'(r) + δr on [0, 10 + 1/eps] with δ = eps³.
///
/// A ball of radius R < 1 touching r = 1/eps from outside beats the
/// centered ball of equal weighted volume, with energy gap
/// ε·(n−1)/(n+2)·R^{n+1}·ωₙ + o(ε).
pub fn make_counterexample_psi_monotone(eps: f64, g0: f64, n: u32) -> Result<WeightPair> {
    if n < 2 {
        return Err(Error::Domain("n >= 2 required".into()));
    }
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 0.1]")));
    }
    let inv = 1.0 / eps;
    let w = eps * eps;
    // Connector curvature 0 → 3ε → 2ε over two half-width smoothsteps:
    // total slope gain (w/4)(3ε) + (w/4)(5ε) = 2ε·w, matching the quadratic
    // branch slope 2ε(r − 1/ε) exactly at the junction.
    let peak = 3.0 * eps;
    let plateau_end = 2.0 * eps;
    let segs = [
        Seg::Const {
            width: inv,
            level: 0.0,
        },
        Seg::Blend {
            width: w / 2.0,
            from: 0.0,
            to: peak,
        },
        Seg::Blend {
            width: w / 2.0,
            from: peak,
            to: plateau_end,
        },
        Seg::Const {
            width: 1.0,
            level: plateau_end,
        },
    ];
    let curv = curvature_pieces(&segs);
    let psi_pw = integrate_twice(&curv, 0.0, 0.0);

    // g' = δ − ψ'' on [0, X], then a smoothstep up to 1.
    let delta = eps * eps * eps;
    let x_end = 10.0 + inv;
    let mut gp_breaks = vec![0.0, inv, inv + w / 2.0, inv + w, x_end, x_end + 1.0];
    gp_breaks.dedup();
    let blend_up = smoothstep3().scaled(1.0 - (delta - 2.0 * eps));
    let gp_pieces = vec![
        Poly::constant(delta),
        segs[1].poly().scaled(-1.0).add(&Poly::constant(delta)),
        segs[2].poly().scaled(-1.0).add(&Poly::constant(delta)),
        Poly::constant(delta - 2.0 * eps),
        blend_up.add(&Poly::constant(delta - 2.0 * eps)),
        Poly::constant(1.0),
    ];
    let g_pw = integrate_once(
        &PiecewisePoly::with_interval_widths(gp_breaks, gp_pieces, 1.0),
        g0,
    );

    // Positivity of g over the working range.
    let r_max = x_end + 4.0;
    let mut g_min = f64::INFINITY;
    for i in 0..=4000 {
        let r = r_max * i as f64 / 4000.0;
        g_min = g_min.min(g_pw.eval_deriv(r, 0));
    }
    if g_min <= 0.0 {
        return Err(Error::PositivityViolated(format!(
            "g0 = {g0} too small: min g = {g_min:.6} on [0, {r_max:.3}]"
        )));
    }

    WeightPair::new(
        WeightProfile::piecewise(psi_pw, 3),
        WeightProfile::piecewise(g_pw, 2),
        n,
        r_max,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::classify;

    #[test]
    fn g_monotone_profile_bullets() {
        let p = GMonotoneParams::default();
        let pair = make_counterexample_g_monotone(&p).unwrap();
        let psi = &pair.psi;
        // ψ(0) = ψ'(0) = 0, ψ(eps) = M with zero slope, plateau at M,
        // second plateau at M/2.
        assert!(psi.eval(0.0, 0).unwrap().abs() < 1e-14);
        assert!(psi.eval(0.0, 1).unwrap().abs() < 1e-14);
        assert!((psi.eval(p.eps, 0).unwrap() - p.m).abs() < 1e-12);
        assert!(psi.eval(p.eps, 1).unwrap().abs() < 1e-11 * (1.0 + p.m / p.eps));
        assert!((psi.eval(0.6, 0).unwrap() - p.m).abs() < 1e-12);
        assert!((psi.eval(4.5, 0).unwrap() - p.m / 2.0).abs() < 1e-11);
        // Slope bounds 0 ≤ ψ' ≤ 2M/eps on the rise, 0 ≤ −ψ' ≤ M/h on the fall.
        for i in 0..=2000 {
            let r = p.eps * i as f64 / 2000.0;
            let s = psi.eval(r, 1).unwrap();
            assert!(s >= -1e-12 && s <= 2.0 * p.m / p.eps * (1.0 + 1e-12), "r = {r}");
        }
        for i in 0..=2000 {
            let r = p.l + p.h * i as f64 / 2000.0;
            let s = psi.eval(r, 1).unwrap();
            assert!(s <= 1e-12 && -s <= p.m / p.h * (1.0 + 1e-12), "r = {r}");
        }
        // Convexity pattern: ψ'' ≥ c > 0 on [0, eps/4], ≥ 0 up to eps/2,
        // ≤ 0 on [eps/2, eps].
        let c = g_monotone_curvature_at_origin(&p).unwrap();
        assert!(c > 0.0);
        for i in 0..=500 {
            let r = 0.25 * p.eps * i as f64 / 500.0;
            assert!(psi.eval(r, 2).unwrap() >= c - 1e-9);
        }
        for i in 0..=500 {
            let r = 0.25 * p.eps + 0.25 * p.eps * i as f64 / 500.0;
            assert!(psi.eval(r, 2).unwrap() >= -1e-12);
        }
        for i in 0..=500 {
            let r = 0.5 * p.eps + 0.5 * p.eps * i as f64 / 500.0;
            assert!(psi.eval(r, 2).unwrap() <= 1e-12);
        }
        // C³ joins for ψ, C² for g.
        assert!(psi.knot_mismatch() < 1e-12);
        assert!(pair.g.knot_mismatch() < 1e-12);
    }

    #[test]
    fn g_monotone_classification() {
        let p = GMonotoneParams::default();
        let pair = make_counterexample_g_monotone(&p).unwrap();
        let rep = classify(&pair, pair.r_max, 3000);
        let c = g_monotone_curvature_at_origin(&p).unwrap();
        let expected_kappa = c.min(p.delta);
        assert!(rep.admissible && rep.strict);
        let ku = rep.kappa_uniform.expect("kappa-uniform");
        assert!(
            (ku - expected_kappa).abs() < 1e-9,
            "kappa_uniform = {ku}, expected min(c, delta) = {expected_kappa}"
        );
        assert!(rep.psi_min_at_origin);
        assert!(!rep.psi_monotone);
        assert!(rep.g_monotone);
        assert!(rep.g_prime_origin.abs() < 1e-14);
    }

    #[test]
    fn g_monotone_feasibility_bounds() {
        // eps bound for the defaults: e^(-1) π^(-1/2) / 4 ≈ 0.0519.
        let bound = 0.25 * (-1.0f64).exp() * std::f64::consts::PI.powf(-0.5);
        assert!((bound - 0.051_9).abs() < 1e-4);
        let mut p = GMonotoneParams::default();
        p.eps = 0.1;
        let err = make_counterexample_g_monotone(&p).unwrap_err();
        match err {
            Error::ConstructionInfeasible(msg) => assert!(msg.contains("eps^(n-1)"), "{msg}"),
            other => panic!("unexpected error {other}"),
        }
        // Gap lower bound at the defaults: √π − 3πe·0.04 ≈ 0.7477 > 0.
        let gap = std::f64::consts::PI.sqrt()
            - 3.0 * std::f64::consts::PI * std::f64::consts::E * 0.04;
        assert!(gap > 0.74 && gap < 0.76);
    }

    #[test]
    fn g_monotone_h_bound() {
        let mut p = GMonotoneParams::default();
        p.h = 2.0;
        p.l_prime = 3.0; // keep L' = L + h
        let err = make_counterexample_g_monotone(&p).unwrap_err();
        assert!(matches!(err, Error::ConstructionInfeasible(m) if m.starts_with("h >=")));
    }

    #[test]
    fn psi_monotone_profile() {
        let eps = 0.05;
        let pair = make_counterexample_psi_monotone(eps, 10.0, 2).unwrap();
        let inv = 1.0 / eps;
        // Plateau, then quadratic branch with exact slope 2ε(r − 1/ε).
        assert!(pair.psi.eval(0.5 * inv, 0).unwrap().abs() < 1e-15);
        assert!(pair.psi.eval(inv, 1).unwrap().abs() < 1e-15);
        for r in [inv + 1.0, inv + 3.0, inv + 7.0] {
            let slope = pair.psi.eval(r, 1).unwrap();
            assert!((slope - 2.0 * eps * (r - inv)).abs() < 1e-12, "r = {r}");
            assert!((pair.psi.eval(r, 2).unwrap() - 2.0 * eps).abs() < 1e-14);
        }
        // ψ monotone; g not monotone; κ-uniform at level δ = ε³.
        let rep = classify(&pair, pair.r_max, 2000);
        assert!(rep.psi_monotone && rep.psi_min_at_origin);
        assert!(!rep.g_monotone);
        let ku = rep.kappa_uniform.expect("kappa-uniform");
        assert!((ku - eps.powi(3)).abs() < 1e-12, "kappa = {ku}");
        // One-sided g'(0) = δ is flagged, not rejected.
        assert!((rep.g_prime_origin - eps.powi(3)).abs() < 1e-15);
        assert!(pair.psi.knot_mismatch() < 1e-12);
        assert!(pair.g.knot_mismatch() < 1e-12);
    }

    #[test]
    fn psi_monotone_positivity_guard() {
        let err = make_counterexample_psi_monotone(0.05, 0.05, 2).unwrap_err();
        assert!(matches!(err, Error::PositivityViolated(_)));
        let err = make_counterexample_psi_monotone(0.2, 10.0, 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
