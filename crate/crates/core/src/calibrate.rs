//! Large-volume calibration certificate.
//!
//! For a pair rescaled to κ = 1 the radial field
//!
//! ```text
//! h(r) = ℓ'(r) + ℓ(r)·(ψ'(r) + g(r) + (n−1)/r),
//! ℓ(r) = 3/(2√(n+2)) · (r − r³/(3(n+2)))  for r ≤ √(n+2),  ℓ ≡ 1 beyond,
//! ```
//!
//! satisfies h ≥ 0 and h' ≥ 0, which makes the sublevel sets of h centered
//! balls and yields E(F) ≥ ∫_F h f dx for every competitor of finite
//! perimeter. The certificate here samples h and its analytic derivative on
//! a dense grid; optimality of centered balls above the threshold radius is
//! additionally checked against the off-center equal-volume ball family.
//!
//! ℓ(r)/r is evaluated from its polynomial closed form, so the (n−1)/r term
//! has no singularity at the origin.

use crate::radial::{
    ball_energy, offcenter_ball_energy_with, offcenter_radius_for_volume,
    weighted_ball_volume,
};
use crate::weights::{classify, WeightPair};
use crate::{Error, Result};

/// Sign tolerance for the certificate.
pub const CERT_TOL: f64 = 1e-10;

/// The cutoff profile ℓ(r) for dimension n.
pub fn ell(r: f64, n: u32) -> f64 {
    let q2 = (n + 2) as f64;
    let q = q2.sqrt();
    if r <= q {
        1.5 / q * (r - r * r * r / (3.0 * q2))
    } else {
        1.0
    }
}

/// ℓ'(r).
pub fn ell_prime(r: f64, n: u32) -> f64 {
    let q2 = (n + 2) as f64;
    let q = q2.sqrt();
    if r <= q {
        1.5 / q * (1.0 - r * r / q2)
    } else {
        0.0
    }
}

/// ℓ(r)/r, finite at r = 0 (→ 3/(2√(n+2))).
fn ell_over_r(r: f64, n: u32) -> f64 {
    let q2 = (n + 2) as f64;
    let q = q2.sqrt();
    if r <= q {
        1.5 / q * (1.0 - r * r / (3.0 * q2))
    } else {
        1.0 / r
    }
}

/// d/dr [ℓ(r)/r].
fn ell_over_r_prime(r: f64, n: u32) -> f64 {
    let q2 = (n + 2) as f64;
    let q = q2.sqrt();
    if r <= q {
        -r / (q2 * q)
    } else {
        -1.0 / (r * r)
    }
}

/// ℓ''(r) on each piece (jump at √(n+2); the left value is used there).
fn ell_second(r: f64, n: u32) -> f64 {
    let q2 = (n + 2) as f64;
    let q = q2.sqrt();
    if r <= q {
        -3.0 * r / (q2 * q)
    } else {
        0.0
    }
}

/// h(r) and its analytic derivative for a κ = 1 rescaled pair.
pub fn h_at(pair: &WeightPair, n: u32, r: f64) -> (f64, f64) {
    let dpsi = pair.psi.eval_unchecked(r, 1);
    let d2psi = pair.psi.eval_unchecked(r, 2);
    let g = pair.g.eval_unchecked(r, 0);
    let dg = pair.g.eval_unchecked(r, 1);
    let nm1 = (n - 1) as f64;
    let h = ell_prime(r, n) + ell(r, n) * (dpsi + g) + nm1 * ell_over_r(r, n);
    let hp = ell_second(r, n)
        + ell_prime(r, n) * (dpsi + g)
        + ell(r, n) * (d2psi + dg)
        + nm1 * ell_over_r_prime(r, n);
    (h, hp)
}

/// Sample h and h' on a grid (r = 0 excluded; ℓ/r handled in closed form).
pub fn h_field(pair_rescaled: &WeightPair, n: u32, grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut h = Vec::with_capacity(grid.len());
    let mut hp = Vec::with_capacity(grid.len());
    for &r in grid {
        let (a, b) = h_at(pair_rescaled, n, r);
        h.push(a);
        hp.push(b);
    }
    (h, hp)
}

/// Calibration certificate after κ-rescaling.
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub kappa: f64,
    /// Threshold radius √((n+2)/κ) in the original coordinates.
    pub r_star: f64,
    pub h_min: f64,
    pub hprime_min: f64,
    pub certified: bool,
}

/// Default grid density for the certificate.
pub const CERT_SAMPLES: usize = 10_000;

/// Rescale the pair by κ and certify h ≥ 0, h' ≥ 0 on [1e-6, 4√(n+2)]
/// (rescaled coordinates), sampling `samples` points plus the weight knots.
pub fn certificate(pair: &WeightPair, kappa: f64, samples: usize) -> Result<CalibrationReport> {
    if !(kappa > 0.0) {
        return Err(Error::Precondition(format!(
            "κ = {kappa} is not positive: pair is not κ-uniformly admissible"
        )));
    }
    let n = pair.n;
    let scaled = pair.rescale(kappa)?;
    let q = ((n + 2) as f64).sqrt();
    let lo = 1e-6;
    let hi = 4.0 * q;
    let mut grid: Vec<f64> = (0..=samples.max(100))
        .map(|i| lo + (hi - lo) * i as f64 / samples.max(100) as f64)
        .collect();
    grid.push(q);
    grid.extend(scaled.knots().into_iter().filter(|&r| r > lo && r < hi));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let (h, hp) = h_field(&scaled, n, &grid);
    let h_min = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let hprime_min = hp.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CalibrationReport {
        kappa,
        r_star: (((n + 2) as f64) / kappa).sqrt(),
        h_min,
        hprime_min,
        certified: h_min >= -CERT_TOL && hprime_min >= -CERT_TOL,
    })
}

/// ∫_{B_r} h f dx in rescaled coordinates; equals E(B_r) for r ≥ √(n+2)
/// when g vanishes inside the cutoff region (the perimeter part of the
/// calibration is always an equality there, the potential part pays the
/// factor ℓ ≤ 1).
pub fn calibration_lower_bound(pair_rescaled: &WeightPair, r: f64) -> Result<f64> {
    let n = pair_rescaled.n;
    let nf = n as f64;
    let omega = crate::radial::omega_n(n);
    let knots = pair_rescaled.knots();
    let integrand = |t: f64| {
        let (h, _) = h_at(pair_rescaled, n, t.max(1e-300));
        h * t.powf(nf - 1.0) * pair_rescaled.psi.eval_unchecked(t, 0).exp()
    };
    let est = crate::num::quad::fixed_gauss(&integrand, 0.0, r, 8, 4).abs();
    Ok(nf * omega * crate::num::quad::integrate(integrand, 0.0, r, 1e-12 * est.max(1.0), &knots)?)
}

/// One off-center competitor in the large-volume check.
#[derive(Debug, Clone)]
pub struct Competitor {
    pub distance: f64,
    pub radius: f64,
    pub energy: f64,
}

/// Outcome of the large-volume optimality check at radius R.
#[derive(Debug, Clone)]
pub struct LargeVolumeReport {
    pub report: CalibrationReport,
    /// R ≥ r_star: the certificate covers this radius; below it nothing is asserted.
    pub covered: bool,
    pub centered_energy: f64,
    pub competitors: Vec<Competitor>,
    /// min over competitors of (E(competitor) − E(B_R)); `None` when no
    /// competitor was evaluated.
    pub worst_margin: Option<f64>,
    pub centered_optimal: bool,
}

/// Certify the pair and compare the centered ball of radius R against
/// off-center balls of equal weighted volume at the given center distances.
pub fn large_volume_check(
    pair: &WeightPair,
    r_ball: f64,
    distances: &[f64],
) -> Result<LargeVolumeReport> {
    let rep = classify(pair, pair.r_max, 2000);
    let kappa = rep.kappa_uniform.ok_or_else(|| {
        Error::Precondition("pair is not κ-uniformly admissible on the grid".to_string())
    })?;
    let report = certificate(pair, kappa, CERT_SAMPLES)?;
    let covered = r_ball >= report.r_star - 1e-12;

    let centered = ball_energy(pair, r_ball)?;
    let target = weighted_ball_volume(pair, r_ball)?;
    let mut competitors = Vec::with_capacity(distances.len());
    let mut worst: Option<f64> = None;
    // Piecewise weights put sub-grid features inside large competitor
    // balls; the optimality margins are macroscopic, so the convergence
    // tolerance here is looser than the concentric 1e-9 default.
    for &d in distances {
        let rho = offcenter_radius_for_volume(pair, d, target, r_ball)?;
        let energy = offcenter_ball_energy_with(pair, d, rho, 64, 3e-5)?.total;
        let margin = energy - centered.total;
        worst = Some(worst.map_or(margin, |w: f64| w.min(margin)));
        competitors.push(Competitor {
            distance: d,
            radius: rho,
            energy,
        });
    }
    Ok(LargeVolumeReport {
        report,
        covered,
        centered_energy: centered.total,
        competitors,
        worst_margin: worst,
        centered_optimal: worst.map_or(true, |w| w >= -1e-7),
    })
}

/// Discrete level-set inequality: for cells with values `h` and measure
/// `mu`, the selected subset integrates h at least as much as the sublevel
/// set of equal measure.
///
/// Errors with [`Error::InfeasibleMass`] when no sorted prefix matches the
/// subset's measure to 1e-12 (relative).
pub fn levelset_check(h: &[f64], mu: &[f64], subset: &[bool]) -> Result<bool> {
    if h.len() != mu.len() || h.len() != subset.len() {
        return Err(Error::Domain("levelset arrays must have equal length".into()));
    }
    if mu.iter().any(|&m| m < 0.0) {
        return Err(Error::Domain("cell measures must be nonnegative".into()));
    }
    let mass: f64 = subset
        .iter()
        .zip(mu)
        .filter(|(s, _)| **s)
        .map(|(_, &m)| m)
        .sum();
    let subset_integral: f64 = subset
        .iter()
        .zip(h.iter().zip(mu))
        .filter(|(s, _)| **s)
        .map(|(_, (&hi, &mi))| hi * mi)
        .sum();

    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&i, &j| h[i].partial_cmp(&h[j]).unwrap());

    let tol = 1e-12 * mass.max(1.0);
    let mut acc_mass = 0.0;
    let mut acc_integral = 0.0;
    if mass <= tol {
        return Ok(subset_integral >= -tol);
    }
    for &i in &order {
        acc_mass += mu[i];
        acc_integral += h[i] * mu[i];
        if (acc_mass - mass).abs() <= tol {
            return Ok(subset_integral >= acc_integral - 1e-12 * acc_integral.abs().max(1.0));
        }
        if acc_mass > mass + tol {
            return Err(Error::InfeasibleMass(format!(
                "no sublevel set has measure {mass:.6e} (nearest prefix {acc_mass:.6e})"
            )));
        }
    }
    Err(Error::InfeasibleMass(format!(
        "subset measure {mass:.6e} exceeds the total measure"
    )))
}
