//! Spherical symmetrization on exactly measurable polar sets.
//!
//! The representable class keeps every compared quantity a one-dimensional
//! integral: for n = 2 a set is a union of polar rectangles (radial shells ×
//! angular intervals), for n = 3 an axisymmetric cap profile α(r) per shell.
//! Shell-by-shell, symmetrization replaces the angular occupancy with the
//! single cap about the direction ξ = e₁ of equal slice measure, which
//! preserves weighted volume and potential exactly and never increases the
//! weighted perimeter on this class (arcs: symmetric differences of nested
//! caps are minimal; lateral edges: one cap needs the fewest endpoints).

use crate::num::quad;
use crate::weights::WeightPair;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Angular occupancy of one shell, n = 2: disjoint arcs on the circle.
///
/// Arcs are normalized into (−π, π]; an interval wrapping past π is split
/// and the two halves are treated as circularly adjacent (no boundary edge
/// at ±π).
#[derive(Debug, Clone, PartialEq)]
pub struct CircleUnion {
    /// Sorted disjoint (start, end) with −π ≤ start < end ≤ π.
    arcs: Vec<(f64, f64)>,
    /// The components at the ±π seam belong to one circular component.
    wraps: bool,
}

const ANGLE_TOL: f64 = 1e-12;

fn wrap_angle(mut a: f64) -> f64 {
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

impl CircleUnion {
    pub fn empty() -> Self {
        CircleUnion {
            arcs: Vec::new(),
            wraps: false,
        }
    }

    pub fn full() -> Self {
        CircleUnion {
            arcs: vec![(-PI, PI)],
            wraps: true,
        }
    }

    /// Normalize raw intervals (any real angles, length < 2π each) into a
    /// disjoint union; overlapping input is rejected.
    pub fn new(raw: &[(f64, f64)]) -> Result<Self> {
        let mut total: f64 = raw.iter().map(|&(a, b)| b - a).sum();
        if raw.iter().any(|&(a, b)| !(b > a)) {
            return Err(Error::Domain("angular interval needs a < b".into()));
        }
        if total >= 2.0 * PI - ANGLE_TOL {
            if total > 2.0 * PI + ANGLE_TOL {
                return Err(Error::Domain("angular intervals overlap (measure > 2π)".into()));
            }
            return Ok(CircleUnion::full());
        }
        let mut arcs: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in raw {
            let start = wrap_angle(a);
            let end = start + (b - a);
            if end > PI + ANGLE_TOL {
                arcs.push((start, PI));
                arcs.push((-PI, end - 2.0 * PI));
            } else {
                arcs.push((start, end.min(PI)));
            }
        }
        arcs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in arcs {
            match merged.last_mut() {
                Some(last) if a <= last.1 + ANGLE_TOL => {
                    if a < last.1 - ANGLE_TOL {
                        return Err(Error::Domain(format!(
                            "angular intervals overlap near φ = {a:.6}"
                        )));
                    }
                    last.1 = last.1.max(b);
                }
                _ => merged.push((a, b)),
            }
        }
        let wraps = merged.len() >= 2
            && (merged[0].0 + PI).abs() <= ANGLE_TOL
            && (merged.last().unwrap().1 - PI).abs() <= ANGLE_TOL;
        total = merged.iter().map(|&(a, b)| b - a).sum();
        if total >= 2.0 * PI - ANGLE_TOL {
            return Ok(CircleUnion::full());
        }
        Ok(CircleUnion {
            arcs: merged,
            wraps,
        })
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn is_full(&self) -> bool {
        self.measure() >= 2.0 * PI - ANGLE_TOL
    }

    /// Number of boundary angles (occupancy flips); the ±π seam of a
    /// wrapping component is not a boundary.
    pub fn edge_count(&self) -> usize {
        if self.arcs.is_empty() || self.is_full() {
            return 0;
        }
        let components = if self.wraps {
            self.arcs.len() - 1
        } else {
            self.arcs.len()
        };
        2 * components
    }

    pub fn contains(&self, phi: f64) -> bool {
        let p = wrap_angle(phi);
        self.arcs.iter().any(|&(a, b)| a <= p && p < b)
    }

    /// Measure of the symmetric difference with `other` by boundary sweep.
    pub fn symdiff_measure(&self, other: &CircleUnion) -> f64 {
        let mut cuts: Vec<f64> = vec![-PI, PI];
        for &(a, b) in self.arcs.iter().chain(other.arcs.iter()) {
            cuts.push(a);
            cuts.push(b);
        }
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < ANGLE_TOL);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.contains(mid) != other.contains(mid) {
                total += w[1] - w[0];
            }
        }
        total
    }
}

/// Per-shell occupancy.
#[derive(Debug, Clone, PartialEq)]
pub enum Occupancy {
    /// n = 2.
    Angular(Vec<CircleUnion>),
    /// n = 3: cap half-angle α ∈ [0, π] about ξ per shell.
    Cap(Vec<f64>),
}

/// A union of polar rectangles (n = 2) or an axisymmetric cap profile (n = 3).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSet {
    pub n: u32,
    /// Radial breakpoints r₀ < … < r_K.
    pub radii: Vec<f64>,
    pub occupancy: Occupancy,
}

impl PolarSet {
    pub fn planar(radii: Vec<f64>, shells: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        validate_radii(&radii, shells.len())?;
        let occ = shells
            .iter()
            .map(|raw| CircleUnion::new(raw))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolarSet {
            n: 2,
            radii,
            occupancy: Occupancy::Angular(occ),
        })
    }

    pub fn axisymmetric(radii: Vec<f64>, cap_angles: Vec<f64>) -> Result<Self> {
        validate_radii(&radii, cap_angles.len())?;
        if cap_angles.iter().any(|&a| !(0.0..=PI).contains(&a)) {
            return Err(Error::Domain("cap angles must lie in [0, π]".into()));
        }
        Ok(PolarSet {
            n: 3,
            radii,
            occupancy: Occupancy::Cap(cap_angles),
        })
    }

    pub fn shell_count(&self) -> usize {
        self.radii.len() - 1
    }

    fn shell_of(&self, r: f64) -> Result<usize> {
        let k = self.radii.len() - 1;
        if r < self.radii[0] - ANGLE_TOL || r > self.radii[k] + ANGLE_TOL {
            return Err(Error::Domain(format!(
                "r = {r} outside the shell range [{}, {}]",
                self.radii[0], self.radii[k]
            )));
        }
        Ok(self
            .radii
            .partition_point(|&b| b <= r)
            .clamp(1, k)
            .saturating_sub(1))
    }

    /// Angular measure of the slice at radius r (arc length for n = 2,
    /// solid angle for n = 3).
    pub fn slice_angular_measure(&self, r: f64) -> Result<f64> {
        let k = self.shell_of(r)?;
        Ok(match &self.occupancy {
            Occupancy::Angular(occ) => occ[k].measure(),
            Occupancy::Cap(caps) => 2.0 * PI * (1.0 - caps[k].cos()),
        })
    }
}

fn validate_radii(radii: &[f64], shells: usize) -> Result<()> {
    if radii.len() < 2 || radii.len() != shells + 1 {
        return Err(Error::Domain(
            "need K+1 radial breakpoints for K shells".into(),
        ));
    }
    if radii[0] < 0.0 {
        return Err(Error::Domain("radii must be nonnegative".into()));
    }
    if radii.windows(2).any(|w| w[1] - w[0] <= ANGLE_TOL) {
        return Err(Error::Domain("degenerate zero-width shell".into()));
    }
    Ok(())
}

/// H^{n-1} measure of F ∩ ∂B_r.
pub fn slice_area(set: &PolarSet, r: f64) -> Result<f64> {
    let m = set.slice_angular_measure(r)?;
    Ok(match set.n {
        2 => r * m,
        _ => r * r * m,
    })
}

/// Inverse of the cap-area function η on S^{n-1}: half-angle of the cap of
/// area `a` (η(s) = 2s for n = 2, η(s) = 2π(1 − cos s) for n = 3).
pub fn cap_angle_inverse(n: u32, a: f64) -> Result<f64> {
    let total = match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        other => return Err(Error::UnsupportedDimension(other)),
    };
    if !(0.0..=total + 1e-12).contains(&a) {
        return Err(Error::Domain(format!(
            "cap area {a} outside [0, {total:.6}]"
        )));
    }
    Ok(match n {
        2 => (a / 2.0).min(PI),
        _ => (1.0 - a / (2.0 * PI)).clamp(-1.0, 1.0).acos(),
    })
}

/// Spherical symmetrization about ξ = e₁: shell-by-shell replacement of the
/// occupancy by the cap of equal slice measure.
pub fn symmetrize(set: &PolarSet) -> PolarSet {
    match &set.occupancy {
        Occupancy::Angular(occ) => {
            let caps = occ
                .iter()
                .map(|u| {
                    let m = u.measure();
                    if m <= ANGLE_TOL {
                        CircleUnion::empty()
                    } else if m >= 2.0 * PI - ANGLE_TOL {
                        CircleUnion::full()
                    } else {
                        CircleUnion::new(&[(-m / 2.0, m / 2.0)]).expect("cap interval")
                    }
                })
                .collect();
            PolarSet {
                n: 2,
                radii: set.radii.clone(),
                occupancy: Occupancy::Angular(caps),
            }
        }
        Occupancy::Cap(caps) => PolarSet {
            n: 3,
            radii: set.radii.clone(),
            occupancy: Occupancy::Cap(caps.clone()),
        },
    }
}

/// Weighted (volume, potential, perimeter) of a polar set.
///
/// Volume and potential are shell integrals times angular measures; the
/// perimeter collects spherical pieces at the breakpoints (symmetric
/// difference of adjacent occupancies) plus the radial edges (n = 2) or
/// lateral cones (n = 3) inside each shell.
pub fn measures(pair: &WeightPair, set: &PolarSet) -> Result<(f64, f64, f64)> {
    if pair.n != set.n {
        return Err(Error::Domain(format!(
            "weight pair has n = {}, set has n = {}",
            pair.n, set.n
        )));
    }
    let nf = set.n as f64;
    let knots = pair.knots();
    let f = |t: f64| pair.psi.eval_unchecked(t, 0).exp();
    let gf = |t: f64| pair.g.eval_unchecked(t, 0) * f(t);
    let shells = set.shell_count();

    let mut volume = 0.0;
    let mut potential = 0.0;
    let mut perimeter = 0.0;

    for k in 0..shells {
        let (a, b) = (set.radii[k], set.radii[k + 1]);
        let angular = set.slice_angular_measure(0.5 * (a + b))?;
        if angular > 0.0 {
            let iv = quad::integrate(|t| t.powf(nf - 1.0) * f(t), a, b, 1e-12, &knots)?;
            let ip = quad::integrate(|t| t.powf(nf - 1.0) * gf(t), a, b, 1e-12, &knots)?;
            volume += angular * iv;
            potential += angular * ip;
        }
        // Lateral boundary inside the shell.
        match &set.occupancy {
            Occupancy::Angular(occ) => {
                let edges = occ[k].edge_count();
                if edges > 0 {
                    let j = quad::integrate(&f, a, b, 1e-12, &knots)?;
                    perimeter += edges as f64 * j;
                }
            }
            Occupancy::Cap(caps) => {
                let alpha = caps[k];
                if alpha > ANGLE_TOL && alpha < PI - ANGLE_TOL {
                    let j = quad::integrate(|t| t * f(t), a, b, 1e-12, &knots)?;
                    perimeter += 2.0 * PI * alpha.sin() * j;
                }
            }
        }
    }

    // Spherical pieces where occupancy differs across a breakpoint
    // (the outside of the outermost shell and the inside of r₀ are empty;
    // at r₀ = 0 the sphere is a point and contributes nothing).
    for k in 0..=shells {
        let r = set.radii[k];
        if r <= 0.0 {
            continue;
        }
        let diff = match &set.occupancy {
            Occupancy::Angular(occ) => {
                let below = if k == 0 {
                    CircleUnion::empty()
                } else {
                    occ[k - 1].clone()
                };
                let above = if k == shells {
                    CircleUnion::empty()
                } else {
                    occ[k].clone()
                };
                below.symdiff_measure(&above)
            }
            Occupancy::Cap(caps) => {
                let below = if k == 0 { 0.0 } else { caps[k - 1] };
                let above = if k == shells { 0.0 } else { caps[k] };
                2.0 * PI * (below.cos() - above.cos()).abs()
            }
        };
        perimeter += diff * r.powf(nf - 1.0) * f(r);
    }

    Ok((volume, potential, perimeter))
}

/// Total energy P_f + G_f of a polar set.
pub fn polar_energy(pair: &WeightPair, set: &PolarSet) -> Result<f64> {
    let (_, potential, perimeter) = measures(pair, set)?;
    Ok(perimeter + potential)
}

/// Serialize a polar set to structured text (17 significant digits, exact
/// round trip for the normalized representation).
pub fn set_to_text(set: &PolarSet) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let num = |x: f64| format!("{x:.16e}");
    let _ = writeln!(out, "[polar-set]");
    let _ = writeln!(out, "n = {}", set.n);
    let _ = writeln!(
        out,
        "radii = {}",
        set.radii.iter().map(|r| num(*r)).collect::<Vec<_>>().join(" ")
    );
    match &set.occupancy {
        Occupancy::Angular(occ) => {
            for (k, u) in occ.iter().enumerate() {
                let arcs: Vec<String> = u
                    .arcs
                    .iter()
                    .flat_map(|&(a, b)| [num(a), num(b)])
                    .collect();
                let _ = writeln!(out, "shell_{k} = {}", arcs.join(" "));
            }
        }
        Occupancy::Cap(caps) => {
            let _ = writeln!(
                out,
                "caps = {}",
                caps.iter().map(|a| num(*a)).collect::<Vec<_>>().join(" ")
            );
        }
    }
    out
}

/// Parse a polar set from the structured text form.
pub fn set_from_text(text: &str) -> Result<PolarSet> {
    let mut n: Option<u32> = None;
    let mut radii: Option<Vec<f64>> = None;
    let mut shells: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut caps: Option<Vec<f64>> = None;
    let parse_list = |s: &str| -> Result<Vec<f64>> {
        s.split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {t:?}")))
            })
            .collect()
    };
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected 'key = value', got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "n" {
            n = Some(
                value
                    .parse()
                    .map_err(|_| Error::Parse("bad dimension".into()))?,
            );
        } else if key == "radii" {
            radii = Some(parse_list(value)?);
        } else if key == "caps" {
            caps = Some(parse_list(value)?);
        } else if let Some(idx) = key.strip_prefix("shell_") {
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad shell index {key:?}")))?;
            shells.push((idx, parse_list(value)?));
        } else {
            return Err(Error::Parse(format!("unknown key {key:?}")));
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
    let radii = radii.ok_or_else(|| Error::Parse("missing radii".into()))?;
    match n {
        2 => {
            shells.sort_by_key(|(i, _)| *i);
            let mut occ = Vec::with_capacity(shells.len());
            for (expect, (idx, flat)) in shells.into_iter().enumerate() {
                if idx != expect {
                    return Err(Error::Parse(format!("missing shell_{expect}")));
                }
                if flat.len() % 2 != 0 {
                    return Err(Error::Parse("shell arcs need pairs of angles".into()));
                }
                occ.push(flat.chunks(2).map(|c| (c[0], c[1])).collect());
            }
            PolarSet::planar(radii, occ)
        }
        3 => PolarSet::axisymmetric(
            radii,
            caps.ok_or_else(|| Error::Parse("missing caps".into()))?,
        ),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rng::SplitMix64;
    use crate::weights::{WeightPair, WeightProfile};

    fn flat(n: u32) -> WeightPair {
        WeightPair::new(
            WeightProfile::constant(0.0),
            WeightProfile::constant(0.0),
            n,
            20.0,
        )
        .unwrap()
    }

    #[test]
    fn slice_areas() {
        let full = PolarSet::planar(vec![0.0, 2.5], vec![vec![(-PI, PI)]]).unwrap();
        assert!((slice_area(&full, 2.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        let half = PolarSet::planar(vec![0.0, 1.5], vec![vec![(0.0, PI)]]).unwrap();
        assert!((slice_area(&half, 1.0).unwrap() - PI).abs() < 1e-12);
        let hemi = PolarSet::axisymmetric(vec![0.0, 2.0], vec![PI / 2.0]).unwrap();
        assert!((slice_area(&hemi, 1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(slice_area(&hemi, 3.0).is_err());
    }

    #[test]
    fn cap_inverse_values() {
        assert!((cap_angle_inverse(2, PI).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((cap_angle_inverse(3, 2.0 * PI).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((cap_angle_inverse(3, 4.0 * PI).unwrap() - PI).abs() < 1e-14);
        assert!(cap_angle_inverse(3, 20.0).is_err());
        assert!(cap_angle_inverse(4, 1.0).is_err());
    }

    #[test]
    fn symmetrize_half_disk() {
        // Upper half-disk → right half-disk (cap of half-angle π/2 about e₁).
        let set = PolarSet::planar(vec![0.0, 1.0], vec![vec![(0.0, PI)]]).unwrap();
        let sym = symmetrize(&set);
        match &sym.occupancy {
            Occupancy::Angular(occ) => {
                assert_eq!(occ[0].arcs.len(), 1);
                let (a, b) = occ[0].arcs[0];
                assert!((a + PI / 2.0).abs() < 1e-12 && (b - PI / 2.0).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn symmetrize_two_sectors_cap_angle() {
        let set =
            PolarSet::planar(vec![0.0, 1.0], vec![vec![(0.5, 1.5), (2.5, 3.5)]]).unwrap();
        let sym = symmetrize(&set);
        assert!((sym.slice_angular_measure(0.5).unwrap() - 2.0).abs() < 1e-12);
        match &sym.occupancy {
            Occupancy::Angular(occ) => {
                let (a, b) = occ[0].arcs[0];
                assert!((a + 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn perimeter_two_sectors() {
        // Two unit sectors: arcs 2 + radial edges 4 = 6; symmetrized 2 + 2 = 4.
        let pair = flat(2);
        let set =
            PolarSet::planar(vec![0.0, 1.0], vec![vec![(0.5, 1.5), (2.5, 3.5)]]).unwrap();
        let (v, p, per) = measures(&pair, &set).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "volume {v}");
        assert_eq!(p, 0.0);
        assert!((per - 6.0).abs() < 1e-10, "perimeter {per}");
        let (v2, _, per2) = measures(&pair, &symmetrize(&set)).unwrap();
        assert!((v2 - v).abs() < 1e-12);
        assert!((per2 - 4.0).abs() < 1e-10, "perimeter {per2}");
    }

    #[test]
    fn potential_is_rearrangement_invariant() {
        // g = r, sector of angle 2 in the unit disk: potential 2/3.
        let pair = WeightPair::new(
            WeightProfile::constant(0.0),
            WeightProfile::polynomial(vec![0.0, 1.0]),
            2,
            10.0,
        )
        .unwrap();
        let set = PolarSet::planar(vec![0.0, 1.0], vec![vec![(0.3, 2.3)]]).unwrap();
        let (_, p, _) = measures(&pair, &set).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-11);
        let (_, p2, _) = measures(&pair, &symmetrize(&set)).unwrap();
        assert!((p2 - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn full_disk_perimeter() {
        let pair = WeightPair::new(
            WeightProfile::gaussian(0.5),
            WeightProfile::constant(0.0),
            2,
            10.0,
        )
        .unwrap();
        let set = PolarSet::planar(vec![0.0, 1.0], vec![vec![(-PI, PI)]]).unwrap();
        let (_, _, per) = measures(&pair, &set).unwrap();
        assert!((per - 2.0 * PI * 0.5f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn wrapping_interval_has_two_edges() {
        let u = CircleUnion::new(&[(2.5, 3.5)]).unwrap();
        assert_eq!(u.edge_count(), 2);
        assert!((u.measure() - 1.0).abs() < 1e-12);
        assert!(u.contains(3.3) && u.contains(-2.9) && !u.contains(0.0));
    }

    fn random_planar(rng: &mut SplitMix64) -> PolarSet {
        let shells = 1 + rng.below(3);
        let mut radii = vec![0.2 + rng.next_f64()];
        for _ in 0..shells {
            radii.push(radii.last().unwrap() + 0.2 + rng.next_f64());
        }
        if rng.next_f64() < 0.3 {
            radii[0] = 0.0;
        }
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
        PolarSet::planar(radii, occ).unwrap()
    }

    fn random_axisymmetric(rng: &mut SplitMix64) -> PolarSet {
        let shells = 1 + rng.below(3);
        let mut radii = vec![0.0];
        for _ in 0..shells {
            radii.push(radii.last().unwrap() + 0.2 + rng.next_f64());
        }
        let caps = (0..shells)
            .map(|_| match rng.below(6) {
                0 => 0.0,
                1 => PI,
                _ => rng.uniform(0.05, PI - 0.05),
            })
            .collect();
        PolarSet::axisymmetric(radii, caps).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let mut rng = SplitMix64::new(31);
        for trial in 0..40 {
            let set = if trial % 2 == 0 {
                random_planar(&mut rng)
            } else {
                random_axisymmetric(&mut rng)
            };
            let text = set_to_text(&set);
            let back = set_from_text(&text).unwrap();
            assert_eq!(set, back, "round trip changed the set:\n{text}");
        }
        assert!(set_from_text("n = 2").is_err());
    }

    #[test]
    fn symmetrization_properties_random() {
        let pair2 = WeightPair::new(
            WeightProfile::gaussian(0.2),
            WeightProfile::polynomial(vec![0.1, 0.4]),
            2,
            40.0,
        )
        .unwrap();
        let pair3 = WeightPair::new(
            WeightProfile::gaussian(0.2),
            WeightProfile::polynomial(vec![0.1, 0.4]),
            3,
            40.0,
        )
        .unwrap();
        let mut rng = SplitMix64::new(2024);
        for trial in 0..60 {
            let (pair, set) = if trial % 2 == 0 {
                (&pair2, random_planar(&mut rng))
            } else {
                (&pair3, random_axisymmetric(&mut rng))
            };
            let sym = symmetrize(&set);
            let (v, p, per) = measures(pair, &set).unwrap();
            let (v2, p2, per2) = measures(pair, &sym).unwrap();
            assert!((v - v2).abs() <= 1e-10 * v.abs().max(1.0), "volume drift");
            assert!((p - p2).abs() <= 1e-10 * p.abs().max(1.0), "potential drift");
            assert!(per2 <= per + 1e-9, "perimeter grew: {per2} > {per}");
            // Idempotence is exact.
            let twice = symmetrize(&sym);
            assert_eq!(twice, sym);
        }
    }
}
