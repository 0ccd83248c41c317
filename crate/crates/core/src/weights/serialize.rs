//! Structured-text serialization of weight pairs.
//!
//! Floats are written with 17 significant digits so the round trip is exact
//! for every parameter. The layout is line-based `key = value` under
//! `[pair]`, `[psi]`, `[g]` sections; list values are space-separated.

use super::{PiecewisePoly, WeightPair, WeightProfile};
use crate::num::poly::Poly;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(" ")
}

fn profile_section(out: &mut String, name: &str, p: &WeightProfile) {
    let _ = writeln!(out, "[{name}]");
    let _ = writeln!(out, "kind = {}", p.kind_name());
    match &p.repr {
        super::Repr::Polynomial(poly) => {
            let _ = writeln!(out, "coeffs = {}", fmt_list(&poly.c));
        }
        super::Repr::Gaussian(a) => {
            let _ = writeln!(out, "a = {}", fmt_f64(*a));
        }
        super::Repr::Spline {
            x,
            y,
            slope_left,
            slope_right,
            ..
        } => {
            let _ = writeln!(out, "knots_r = {}", fmt_list(x));
            let _ = writeln!(out, "knots_v = {}", fmt_list(y));
            let _ = writeln!(out, "slope_left = {}", fmt_f64(*slope_left));
            let _ = writeln!(out, "slope_right = {}", fmt_f64(*slope_right));
        }
        super::Repr::Piecewise(pw) => {
            let _ = writeln!(out, "max_order = {}", p.max_derivative_order);
            let _ = writeln!(out, "breaks = {}", fmt_list(&pw.breaks));
            let _ = writeln!(out, "widths = {}", fmt_list(&pw.widths));
            for (i, piece) in pw.pieces.iter().enumerate() {
                let _ = writeln!(out, "piece_{i} = {}", fmt_list(&piece.c));
            }
        }
    }
}

/// Serialize a weight pair to the structured text block.
pub fn pair_to_text(pair: &WeightPair) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[pair]");
    let _ = writeln!(out, "n = {}", pair.n);
    let _ = writeln!(out, "r_max = {}", fmt_f64(pair.r_max));
    let _ = writeln!(out);
    profile_section(&mut out, "psi", &pair.psi);
    let _ = writeln!(out);
    profile_section(&mut out, "g", &pair.g);
    out
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            current = name.trim().to_string();
            sections.entry(current.clone()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected 'key = value', got {line:?}", lineno + 1))
        })?;
        if current.is_empty() {
            return Err(Error::Parse(format!(
                "line {}: key outside any [section]",
                lineno + 1
            )));
        }
        sections
            .get_mut(&current)
            .unwrap()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(sections)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what}: bad float {s:?}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(|t| parse_f64(t, what)).collect()
}

fn profile_from_map(name: &str, map: &BTreeMap<String, String>) -> Result<WeightProfile> {
    let kind = map
        .get("kind")
        .ok_or_else(|| Error::Parse(format!("[{name}]: missing kind")))?;
    match kind.as_str() {
        "polynomial" => {
            let coeffs = parse_list(
                map.get("coeffs")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing coeffs")))?,
                "coeffs",
            )?;
            Ok(WeightProfile::polynomial(coeffs))
        }
        "gaussian" => {
            let a = parse_f64(
                map.get("a")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing a")))?,
                "a",
            )?;
            Ok(WeightProfile::gaussian(a))
        }
        "cubic-spline" => {
            let x = parse_list(
                map.get("knots_r")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing knots_r")))?,
                "knots_r",
            )?;
            let y = parse_list(
                map.get("knots_v")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing knots_v")))?,
                "knots_v",
            )?;
            let sl = parse_f64(
                map.get("slope_left")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing slope_left")))?,
                "slope_left",
            )?;
            let sr = parse_f64(
                map.get("slope_right")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing slope_right")))?,
                "slope_right",
            )?;
            WeightProfile::cubic_spline(x, y, sl, sr)
        }
        "piecewise" => {
            let max_order: u32 = map
                .get("max_order")
                .ok_or_else(|| Error::Parse(format!("[{name}]: missing max_order")))?
                .parse()
                .map_err(|_| Error::Parse("bad max_order".into()))?;
            let breaks = parse_list(
                map.get("breaks")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing breaks")))?,
                "breaks",
            )?;
            let widths = parse_list(
                map.get("widths")
                    .ok_or_else(|| Error::Parse(format!("[{name}]: missing widths")))?,
                "widths",
            )?;
            if widths.len() != breaks.len() {
                return Err(Error::Parse(format!(
                    "[{name}]: widths/breaks length mismatch"
                )));
            }
            let mut pieces = Vec::with_capacity(breaks.len());
            for i in 0..breaks.len() {
                let key = format!("piece_{i}");
                let coeffs = parse_list(
                    map.get(&key)
                        .ok_or_else(|| Error::Parse(format!("[{name}]: missing {key}")))?,
                    &key,
                )?;
                pieces.push(Poly::new(coeffs));
            }
            Ok(WeightProfile::piecewise(
                PiecewisePoly::new(breaks, widths, pieces),
                max_order,
            ))
        }
        other => Err(Error::Parse(format!("[{name}]: unknown kind {other:?}"))),
    }
}

/// Parse a weight pair from its structured text form.
pub fn pair_from_text(text: &str) -> Result<WeightPair> {
    let sections = parse_sections(text)?;
    let pair_sec = sections
        .get("pair")
        .ok_or_else(|| Error::Parse("missing [pair] section".into()))?;
    let n: u32 = pair_sec
        .get("n")
        .ok_or_else(|| Error::Parse("[pair]: missing n".into()))?
        .parse()
        .map_err(|_| Error::Parse("[pair]: bad n".into()))?;
    let r_max = parse_f64(
        pair_sec
            .get("r_max")
            .ok_or_else(|| Error::Parse("[pair]: missing r_max".into()))?,
        "r_max",
    )?;
    let psi = profile_from_map(
        "psi",
        sections
            .get("psi")
            .ok_or_else(|| Error::Parse("missing [psi] section".into()))?,
    )?;
    let g = profile_from_map(
        "g",
        sections
            .get("g")
            .ok_or_else(|| Error::Parse("missing [g] section".into()))?,
    )?;
    WeightPair::new(psi, g, n, r_max)
}
