//! Quadrature grids on S^{n-1} and the real eigenbasis of the spherical
//! Laplacian (Fourier modes on the circle, real spherical harmonics on S²).
//!
//! Grids: uniform angles with equal weights for n = 2 (trapezoid rule, which
//! is spectrally accurate on the circle), Gauss–Legendre in cos(polar) ×
//! uniform azimuth for n = 3. Basis functions are orthonormal in the surface
//! measure; the eigenvalue of degree i is i(i + n − 2).

use crate::num::quad::gauss_legendre;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Quadrature grid on the unit sphere S^{n-1}, n ∈ {2, 3}.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub n: u32,
    /// (polar angle θ, azimuth φ); θ is fixed to π/2 for n = 2.
    angles: Vec<(f64, f64)>,
    weights: Vec<f64>,
    polar_points: usize,
    azimuth_points: usize,
}

impl SphereGrid {
    /// Uniform grid of m angles on the circle.
    pub fn circle(m: usize) -> Self {
        assert!(m >= 4);
        let angles = (0..m)
            .map(|j| (PI / 2.0, 2.0 * PI * j as f64 / m as f64 - PI))
            .collect();
        SphereGrid {
            n: 2,
            angles,
            weights: vec![2.0 * PI / m as f64; m],
            polar_points: 1,
            azimuth_points: m,
        }
    }

    /// Gauss–Legendre × uniform product grid on S².
    pub fn sphere(polar: usize, azimuth: usize) -> Self {
        assert!(polar >= 2 && azimuth >= 4);
        let (x, w) = gauss_legendre(polar);
        let mut angles = Vec::with_capacity(polar * azimuth);
        let mut weights = Vec::with_capacity(polar * azimuth);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.acos();
            for j in 0..azimuth {
                angles.push((theta, 2.0 * PI * j as f64 / azimuth as f64 - PI));
                weights.push(wi * 2.0 * PI / azimuth as f64);
            }
        }
        SphereGrid {
            n: 3,
            angles,
            weights,
            polar_points: polar,
            azimuth_points: azimuth,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    /// Cartesian coordinates of node `idx` (z = 0 on the circle).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let (theta, phi) = self.angles[idx];
        if self.n == 2 {
            [phi.cos(), phi.sin(), 0.0]
        } else {
            [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
        }
    }

    /// Σ w = n·ωₙ (2π or 4π).
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest harmonic degree the grid resolves without aliasing in
    /// products of two basis functions.
    pub fn max_degree(&self) -> u32 {
        if self.n == 2 {
            ((self.azimuth_points - 1) / 2) as u32
        } else {
            (self.polar_points - 1).min((self.azimuth_points - 1) / 2) as u32
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// One basis mode: degree i, and an index j enumerating the eigenspace.
/// For n = 2, j = 0 is the constant, j = +k the cosine and j = −k the sine
/// of frequency k; for n = 3, j = m ∈ [−i, i] with m < 0 the sine branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub degree: u32,
    pub index: i32,
}

/// Laplace–Beltrami eigenvalue i(i + n − 2) of degree i on S^{n-1}.
pub fn eigenvalue(n: u32, degree: u32) -> f64 {
    (degree * (degree + n - 2)) as f64
}

/// All modes up to degree `l_max` in a fixed order.
pub fn modes(n: u32, l_max: u32) -> Vec<Mode> {
    let mut out = Vec::new();
    if n == 2 {
        out.push(Mode { degree: 0, index: 0 });
        for k in 1..=l_max {
            out.push(Mode {
                degree: k,
                index: k as i32,
            });
            out.push(Mode {
                degree: k,
                index: -(k as i32),
            });
        }
    } else {
        for l in 0..=l_max {
            for m in -(l as i32)..=(l as i32) {
                out.push(Mode {
                    degree: l,
                    index: m,
                });
            }
        }
    }
    out
}

/// Associated Legendre values P_l^m(x) for all 0 ≤ m ≤ l ≤ l_max
/// (no Condon–Shortley phase), packed row-major by l.
fn legendre_table(l_max: usize, x: f64) -> Vec<f64> {
    let size = (l_max + 1) * (l_max + 2) / 2;
    let mut p = vec![0.0; size];
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    p[idx(0, 0)] = 1.0;
    for m in 0..l_max {
        // P_{m+1}^{m+1} = (2m+1) √(1−x²) P_m^m
        p[idx(m + 1, m + 1)] = (2.0 * m as f64 + 1.0) * somx2 * p[idx(m, m)];
        // P_{m+1}^m = (2m+1) x P_m^m
        p[idx(m + 1, m)] = (2.0 * m as f64 + 1.0) * x * p[idx(m, m)];
    }
    for l in 2..=l_max {
        for m in 0..l.saturating_sub(1) {
            let lf = l as f64;
            let mf = m as f64;
            p[idx(l, m)] = ((2.0 * lf - 1.0) * x * p[idx(l - 1, m)]
                - (lf + mf - 1.0) * p[idx(l - 2, m)])
                / (lf - mf);
        }
    }
    p
}

/// Basis values and tangential gradients tabulated on a grid.
///
/// Gradient components are (∂θ, ∂φ/sinθ) for n = 3 and (0, ∂φ) for n = 2, so
/// |∇u|² is the sum of the squared components in both cases.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub modes: Vec<Mode>,
    nodes: usize,
    values: Vec<f64>,
    grad_theta: Vec<f64>,
    grad_phi: Vec<f64>,
}

impl ModeTable {
    /// Tabulate the basis up to `l_max`; errors if the grid cannot resolve it.
    pub fn build(grid: &SphereGrid, l_max: u32) -> Result<Self> {
        if l_max > grid.max_degree() {
            return Err(Error::Resolution(format!(
                "degree {l_max} exceeds the grid band {}",
                grid.max_degree()
            )));
        }
        let modes = modes(grid.n, l_max);
        let nodes = grid.len();
        let mut values = vec![0.0; modes.len() * nodes];
        let mut grad_theta = vec![0.0; modes.len() * nodes];
        let mut grad_phi = vec![0.0; modes.len() * nodes];

        if grid.n == 2 {
            let c0 = 1.0 / (2.0 * PI).sqrt();
            let ck = 1.0 / PI.sqrt();
            for (node, &(_, phi)) in grid.angles().iter().enumerate() {
                for (mi, mode) in modes.iter().enumerate() {
                    let at = mi * nodes + node;
                    if mode.degree == 0 {
                        values[at] = c0;
                    } else {
                        let k = mode.degree as f64;
                        if mode.index > 0 {
                            values[at] = ck * (k * phi).cos();
                            grad_phi[at] = -ck * k * (k * phi).sin();
                        } else {
                            values[at] = ck * (k * phi).sin();
                            grad_phi[at] = ck * k * (k * phi).cos();
                        }
                    }
                }
            }
        } else {
            let lm = l_max as usize;
            let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
            // Orthonormalization constants.
            let mut norm = vec![0.0; (lm + 1) * (lm + 2) / 2];
            for l in 0..=lm {
                for m in 0..=l {
                    let mut ratio = 1.0; // (l−m)! / (l+m)!
                    for k in (l - m + 1)..=(l + m) {
                        ratio /= k as f64;
                    }
                    norm[idx(l, m)] =
                        ((2.0 * l as f64 + 1.0) / (4.0 * PI) * ratio).sqrt();
                }
            }
            for (node, &(theta, phi)) in grid.angles().iter().enumerate() {
                let x = theta.cos();
                let sin_t = theta.sin();
                let p = legendre_table(lm, x);
                for (mi, mode) in modes.iter().enumerate() {
                    let at = mi * nodes + node;
                    let l = mode.degree as usize;
                    let m = mode.index.unsigned_abs() as usize;
                    let nlm = norm[idx(l, m)];
                    let plm = p[idx(l, m)];
                    // dP_l^m/dθ = −[(l+m) P_{l−1}^m − l x P_l^m] / sinθ
                    let below = if m <= l.saturating_sub(1) && l >= 1 {
                        p[idx(l - 1, m)]
                    } else {
                        0.0
                    };
                    let dp_dtheta =
                        -(((l + m) as f64) * below - (l as f64) * x * plm) / sin_t;
                    let (ang, dang) = if mode.index >= 0 {
                        ((m as f64 * phi).cos(), -(m as f64) * (m as f64 * phi).sin())
                    } else {
                        ((m as f64 * phi).sin(), (m as f64) * (m as f64 * phi).cos())
                    };
                    let scale = if m == 0 { 1.0 } else { 2.0f64.sqrt() };
                    values[at] = scale * nlm * plm * ang;
                    grad_theta[at] = scale * nlm * dp_dtheta * ang;
                    grad_phi[at] = scale * nlm * plm * dang / sin_t;
                }
            }
        }
        Ok(ModeTable {
            modes,
            nodes,
            values,
            grad_theta,
            grad_phi,
        })
    }

    pub fn value(&self, mode: usize, node: usize) -> f64 {
        self.values[mode * self.nodes + node]
    }

    pub fn gradient(&self, mode: usize, node: usize) -> (f64, f64) {
        (
            self.grad_theta[mode * self.nodes + node],
            self.grad_phi[mode * self.nodes + node],
        )
    }

    /// Coefficients of `values` against the basis (grid inner products).
    pub fn decompose(&self, grid: &SphereGrid, values: &[f64]) -> Vec<f64> {
        let mut coeffs = vec![0.0; self.modes.len()];
        for (mi, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (node, (&v, &w)) in values.iter().zip(grid.weights()).enumerate() {
                acc += v * w * self.value(mi, node);
            }
            *c = acc;
        }
        coeffs
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes];
        for (mi, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (node, o) in out.iter_mut().enumerate() {
                *o += c * self.value(mi, node);
            }
        }
        out
    }

    /// Tangential gradient components of the synthesized function.
    pub fn synthesize_gradient(&self, coeffs: &[f64]) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.nodes];
        for (mi, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (node, o) in out.iter_mut().enumerate() {
                let (gt, gp) = self.gradient(mi, node);
                o.0 += c * gt;
                o.1 += c * gp;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rng::SplitMix64;

    #[test]
    fn grid_measures() {
        let c = SphereGrid::circle(64);
        assert!((c.total_measure() - 2.0 * PI).abs() < 1e-12);
        let s = SphereGrid::sphere(24, 48);
        assert!((s.total_measure() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_basis() {
        for (grid, l_max) in [(SphereGrid::circle(64), 8u32), (SphereGrid::sphere(16, 32), 6)] {
            let table = ModeTable::build(&grid, l_max).unwrap();
            let m = table.modes.len();
            for a in 0..m {
                for b in a..m {
                    let mut acc = 0.0;
                    for node in 0..grid.len() {
                        acc += grid.weights()[node] * table.value(a, node) * table.value(b, node);
                    }
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (acc - want).abs() < 1e-10,
                        "⟨{:?}, {:?}⟩ = {acc}",
                        table.modes[a],
                        table.modes[b]
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_recovers_eigenvalue() {
        // ∫ |∇Y|² = i(i + n − 2) for every normalized mode.
        for (grid, l_max, n) in [
            (SphereGrid::circle(64), 7u32, 2u32),
            (SphereGrid::sphere(18, 36), 6, 3),
        ] {
            let table = ModeTable::build(&grid, l_max).unwrap();
            for (mi, mode) in table.modes.iter().enumerate() {
                let mut acc = 0.0;
                for node in 0..grid.len() {
                    let (gt, gp) = table.gradient(mi, node);
                    acc += grid.weights()[node] * (gt * gt + gp * gp);
                }
                let want = eigenvalue(n, mode.degree);
                assert!(
                    (acc - want).abs() < 1e-8 * want.max(1.0),
                    "mode {mode:?}: {acc} vs {want}"
                );
            }
        }
    }

    #[test]
    fn decompose_pure_modes() {
        // u = cos φ on the circle → coefficient √π on (degree 1, cos).
        let grid = SphereGrid::circle(64);
        let table = ModeTable::build(&grid, 8).unwrap();
        let u: Vec<f64> = grid.angles().iter().map(|&(_, phi)| phi.cos()).collect();
        let coeffs = table.decompose(&grid, &u);
        for (mode, &c) in table.modes.iter().zip(&coeffs) {
            if mode.degree == 1 && mode.index == 1 {
                assert!((c - PI.sqrt()).abs() < 1e-12, "coefficient {c}");
            } else {
                assert!(c.abs() < 1e-12, "leak into {mode:?}: {c}");
            }
        }

        // u = x₃ = cos θ on S² → only the zonal degree-1 mode, eigenvalue 2.
        let grid = SphereGrid::sphere(16, 32);
        let table = ModeTable::build(&grid, 6).unwrap();
        let u: Vec<f64> = grid.angles().iter().map(|&(t, _)| t.cos()).collect();
        let coeffs = table.decompose(&grid, &u);
        for (mode, &c) in table.modes.iter().zip(&coeffs) {
            if mode.degree == 1 && mode.index == 0 {
                let want = (4.0 * PI / 3.0).sqrt();
                assert!((c - want).abs() < 1e-10, "coefficient {c} vs {want}");
                assert_eq!(eigenvalue(3, mode.degree), 2.0);
            } else {
                assert!(c.abs() < 1e-10, "leak into {mode:?}: {c}");
            }
        }
    }

    #[test]
    fn parseval_roundtrip() {
        let mut rng = SplitMix64::new(99);
        for (grid, l_max) in [(SphereGrid::circle(96), 9u32), (SphereGrid::sphere(20, 40), 7)] {
            let table = ModeTable::build(&grid, l_max).unwrap();
            let coeffs: Vec<f64> = (0..table.modes.len())
                .map(|_| rng.uniform(-1.0, 1.0))
                .collect();
            let u = table.synthesize(&coeffs);
            let back = table.decompose(&grid, &u);
            for (a, b) in coeffs.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10);
            }
            let norm_sq: f64 = grid
                .weights()
                .iter()
                .zip(&u)
                .map(|(w, v)| w * v * v)
                .sum();
            let coeff_sq: f64 = coeffs.iter().map(|c| c * c).sum();
            assert!((norm_sq - coeff_sq).abs() < 1e-8 * coeff_sq.max(1.0));
        }
    }

    #[test]
    fn resolution_guard() {
        let grid = SphereGrid::circle(16);
        assert!(ModeTable::build(&grid, 12).is_err());
    }
}
