//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is pinned in the assertions below; the random sweeps use
//! fixed SplitMix64 seeds so reruns are bit-reproducible.

use isoperi_core::num::rng::SplitMix64;
use isoperi_core::{calibrate, curve, nearly_spherical as ns, one_dim, radial, symmetrize, weights};
use std::f64::consts::PI;
use std::time::Instant;

fn gaussian_poly_pair(n: u32, a: f64, g_lin: f64, g_cub: f64, r_max: f64) -> weights::WeightPair {
    weights::WeightPair::new(
        weights::WeightProfile::gaussian(a),
        weights::WeightProfile::polynomial(vec![0.0, g_lin, 0.0, g_cub]),
        n,
        r_max,
    )
    .unwrap()
}

/// ψ = amp·(cos r − 1), g = amp·(r + sin r): strictly admissible with the
/// density dipping at r = π (κ ≡ amp up to spline error).
fn dip_pair(amp: f64) -> weights::WeightPair {
    let r_max = 14.0;
    let m = 560;
    let x: Vec<f64> = (0..=m).map(|i| r_max * i as f64 / m as f64).collect();
    let psi_y: Vec<f64> = x.iter().map(|&r| amp * (r.cos() - 1.0)).collect();
    let g_y: Vec<f64> = x.iter().map(|&r| amp * (r + r.sin())).collect();
    let psi =
        weights::WeightProfile::cubic_spline(x.clone(), psi_y, 0.0, -amp * r_max.sin()).unwrap();
    let g =
        weights::WeightProfile::cubic_spline(x, g_y, 2.0 * amp, amp * (1.0 + r_max.cos())).unwrap();
    weights::WeightPair::new(psi, g, 1, r_max).unwrap()
}

fn report(criterion: &str, passed: bool, detail: &str, t0: Instant) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!(
        "acceptance {criterion}: {status} — {detail} ({:.2}s)",
        t0.elapsed().as_secs_f64()
    );
    assert!(passed, "{criterion} failed: {detail}");
}

#[test]
fn criterion_1_profile_derivatives() {
    let t0 = Instant::now();
    // Exact values at ψ = g = 0, n = 2, r = 2.
    let flat = gaussian_poly_pair(2, 0.0, 0.0, 0.0, 20.0);
    let p = radial::energy_profile_point(&flat, 2.0).unwrap();
    let exact_ok =
        (p.de_dv - 0.5).abs() < 1e-12 && (p.d2e_dv2 + 1.0 / (16.0 * PI)).abs() < 1e-12;

    // 50 random (pair, r): the profile point embeds the finite-difference
    // cross-check at relative tolerance 1e-4 and flags any mismatch.
    let mut rng = SplitMix64::new(101);
    let mut worst: Option<String> = None;
    for _ in 0..50 {
        let n = if rng.next_f64() < 0.5 { 2 } else { 3 };
        let pair = gaussian_poly_pair(
            n,
            rng.uniform(0.05, 0.8),
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 0.2),
            10.0,
        );
        let r = rng.uniform(0.3, 2.5);
        let point = radial::energy_profile_point(&pair, r).unwrap();
        if let Some(w) = point.fd_warning {
            worst = Some(format!("n={n} r={r:.3}: {w}"));
        }
    }
    let passed = exact_ok && worst.is_none() && t0.elapsed().as_secs_f64() < 5.0;
    report(
        "1 (profile derivatives)",
        passed,
        &format!(
            "exact values ok = {exact_ok}, warnings = {}",
            worst.as_deref().unwrap_or("none")
        ),
        t0,
    );
}

#[test]
fn criterion_2_one_dim_minimizers() {
    let t0 = Instant::now();
    // 10 strictly admissible pairs with min ψ at the origin.
    let mut rng = SplitMix64::new(202);
    let mut max_gap = 0.0f64;
    for i in 0..10 {
        let pair = if i < 8 {
            gaussian_poly_pair(1, rng.uniform(0.05, 0.6), rng.uniform(0.1, 1.0), 0.0, 12.0)
        } else {
            // Clamped splines of smooth strictly admissible profiles.
            let m = 240;
            let x: Vec<f64> = (0..=m).map(|j| 12.0 * j as f64 / m as f64).collect();
            let a = rng.uniform(0.1, 0.4);
            let y: Vec<f64> = x.iter().map(|&r| a * r * r / (1.0 + 0.1 * r)).collect();
            let psi = weights::WeightProfile::cubic_spline(
                x.clone(),
                y,
                0.0,
                a * (2.0 * 12.0 * (1.0 + 1.2) - 12.0f64.powi(2) * 0.1) / (1.0 + 1.2f64).powi(2),
            )
            .unwrap();
            let g = weights::WeightProfile::polynomial(vec![0.0, rng.uniform(0.2, 1.0)]);
            weights::WeightPair::new(psi, g, 1, 12.0).unwrap()
        };
        let tables = one_dim::build_tables(&pair, 8.0).unwrap();
        let v = 1.0;
        let centered = one_dim::centered_interval(&tables, v).unwrap();
        let centered_e = one_dim::union_energy(&pair, &centered).unwrap();
        let (_, bf_e) = one_dim::brute_force_min(&tables, v, 3, 200).unwrap();
        let gap = (bf_e - centered_e).abs();
        max_gap = max_gap.max(gap);
        assert!(gap <= 1e-6, "pair {i}: gap {gap:.3e}");
    }

    // 3 pairs with ψ(x₀) < ψ(0): off-center wins at some v ≤ 0.5.
    let mut all_found = true;
    for amp in [1.0, 0.7, 0.5] {
        let pair = dip_pair(amp);
        let tables = one_dim::build_tables(&pair, 10.0).unwrap();
        let grid: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let v0 = one_dim::small_volume_counterexample(&tables, PI, &grid).unwrap();
        let mut beaten = v0.is_some();
        // Confirm with the oracle at the winning volume: the minimizer is a
        // genuinely off-center interval (the weights are even, so it may
        // land at either of the mirror dips ±π).
        if let Some(v) = v0 {
            let centered = one_dim::centered_interval(&tables, v).unwrap();
            let centered_e = one_dim::union_energy(&pair, &centered).unwrap();
            let (set, bf_e) = one_dim::brute_force_min(&tables, v, 3, 200).unwrap();
            let off_center = set.intervals().iter().all(|&(a, b)| a > 0.0 || b < 0.0);
            beaten = bf_e < centered_e - 1e-9 && off_center;
        }
        all_found &= beaten;
    }
    let passed = max_gap <= 1e-6 && all_found && t0.elapsed().as_secs_f64() < 60.0;
    report(
        "2 (1-D centered intervals)",
        passed,
        &format!("max centered gap {max_gap:.3e}, dips beaten = {all_found}"),
        t0,
    );
}

#[test]
fn criterion_3_counterexample_g_monotone() {
    let t0 = Instant::now();
    let params = weights::GMonotoneParams::default();
    let pair = weights::make_counterexample_g_monotone(&params).unwrap();

    let tau = radial::inverse_volume(&pair, params.v).unwrap();
    let centered = radial::ball_energy(&pair, tau).unwrap();
    let off = radial::offcenter_ball_energy(&pair, params.competitor_distance(), params.tau_prime())
        .unwrap();
    let gap = centered.total - off.total;
    let margin = 0.5 * (PI.sqrt() - 3.0 * PI * std::f64::consts::E * 0.04);
    assert!((margin - 0.3738).abs() < 1e-3);

    let rep = weights::classify(&pair, pair.r_max, 3000);
    let passed = gap >= margin
        && rep.kappa_uniform.is_some()
        && rep.psi_min_at_origin
        && rep.g_monotone
        && t0.elapsed().as_secs_f64() < 30.0;
    report(
        "3 (counterexample, g monotone)",
        passed,
        &format!(
            "E(B) - E(B') = {gap:.4} >= {margin:.4}, kappa = {:?}",
            rep.kappa_uniform
        ),
        t0,
    );
}

#[test]
fn criterion_4_counterexample_psi_monotone() {
    let t0 = Instant::now();
    let n = 2u32;
    let radius: f64 = 0.5;
    let target = (n as f64 - 1.0) / (n as f64 + 2.0)
        * radius.powi(n as i32 + 1)
        * radial::omega_n(n);
    assert!((target - PI / 32.0).abs() < 1e-15);

    let mut rels = Vec::new();
    for eps in [0.05, 0.02, 0.01] {
        let pair = weights::make_counterexample_psi_monotone(eps, 10.0, n).unwrap();
        let d = 1.0 / eps + radius;
        let off = radial::offcenter_ball_energy(&pair, d, radius).unwrap();
        let off_vol = radial::offcenter_ball_volume(&pair, d, radius).unwrap();
        let tau = radial::inverse_volume(&pair, off_vol).unwrap();
        let centered = radial::ball_energy(&pair, tau).unwrap();
        let gap = centered.total - off.total;
        rels.push((gap / eps - target).abs() / target);
    }
    let last = *rels.last().unwrap();
    let non_worsening = rels.windows(2).all(|w| w[1] <= w[0] + 0.02);
    let passed = last <= 0.15 && non_worsening && t0.elapsed().as_secs_f64() < 60.0;
    report(
        "4 (counterexample, psi monotone)",
        passed,
        &format!("gap/eps relative errors {rels:?} -> pi/32"),
        t0,
    );
}

#[test]
fn criterion_5_calibration_certificate() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(505);
    let mut worst_margin = f64::INFINITY;
    for i in 0..10 {
        let n = if i % 2 == 0 { 2 } else { 3 };
        let pair = gaussian_poly_pair(
            n,
            rng.uniform(0.25, 1.5),
            rng.uniform(0.0, 1.0),
            0.0,
            20.0,
        );
        let rep = weights::classify(&pair, pair.r_max, 1500);
        let kappa = rep.kappa_uniform.expect("family is kappa-uniform");
        let cert = calibrate::certificate(&pair, kappa, calibrate::CERT_SAMPLES).unwrap();
        assert!(
            cert.h_min >= -1e-10 && cert.hprime_min >= -1e-10,
            "pair {i}: h_min {:.3e}, h'_min {:.3e}",
            cert.h_min,
            cert.hprime_min
        );

        let r_ball = cert.r_star * 1.05;
        let ds: Vec<f64> = (1..=5).map(|k| 0.3 * k as f64 * r_ball / 1.5).collect();
        let check = calibrate::large_volume_check(&pair, r_ball, &ds).unwrap();
        assert!(check.covered && check.centered_optimal, "pair {i}: {check:?}");
        worst_margin = worst_margin.min(check.worst_margin.unwrap());
    }
    let passed = worst_margin > 0.0 && t0.elapsed().as_secs_f64() < 60.0;
    report(
        "5 (large-volume calibration)",
        passed,
        &format!("10 pairs certified; worst off-center margin {worst_margin:.4e}"),
        t0,
    );
}

#[test]
fn criterion_6_generating_curve() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(606);
    // Single shooting amplifies integrator noise like e^{√κ·πR*} (plus a
    // 1/γ₂ factor at the far pole for n ≥ 3), so the sweep keeps κ = 2a + b
    // below ~1 over R* ≤ 3 and runs the integrator at 1e-12.
    let options = curve::ShootOptions {
        tolerance: 1e-12,
        ..curve::ShootOptions::default()
    };
    let mut worst_residual = 0.0f64;
    let mut worst_defect = 0.0f64;
    for i in 0..20 {
        let n = if i % 2 == 0 { 2 } else { 3 };
        let pair = gaussian_poly_pair(
            n,
            rng.uniform(0.05, 0.3),
            rng.uniform(0.0, 0.3),
            0.0,
            20.0,
        );
        let r_star = rng.uniform(0.5, 3.0);
        let traj = curve::shoot(&pair, r_star, 1.0 / r_star, &options).unwrap();
        assert_eq!(
            traj.termination,
            curve::Termination::Closed,
            "pair {i} (n={n}, R*={r_star:.3}) did not close"
        );
        let (pos, ang) = curve::closure_residual(&traj).unwrap();
        let residual = pos.max(ang.abs());
        worst_residual = worst_residual.max(residual);
        assert!(residual < 1e-6, "pair {i}: residual {residual:.3e}");
        worst_defect = worst_defect.max(traj.h_bar_deviation);
        assert!(
            traj.h_bar_deviation <= 1e-7,
            "pair {i}: defect {:.3e}",
            traj.h_bar_deviation
        );

        for factor in [0.8, 0.9, 1.1, 1.2] {
            let probe = curve::shoot(&pair, r_star, factor / r_star, &options).unwrap();
            assert_ne!(
                probe.termination,
                curve::Termination::Closed,
                "pair {i}: k0 factor {factor} closed"
            );
            if let Ok((p, a)) = curve::closure_residual(&probe) {
                assert!(
                    p.max(a.abs()) >= 1e-4,
                    "pair {i}: k0 factor {factor} has residual {:.3e}",
                    p.max(a.abs())
                );
            }
        }
    }
    let passed = t0.elapsed().as_secs_f64() < 120.0;
    report(
        "6 (generating-curve shooting)",
        passed,
        &format!(
            "20 pairs: worst closure residual {worst_residual:.3e}, worst H defect {worst_defect:.3e}, perturbed k0 never closes"
        ),
        t0,
    );
}

#[test]
fn criterion_7_fuglede_stability() {
    let t0 = Instant::now();
    let radius = 1.0;
    let mut min_slack = f64::INFINITY;
    for n in [2u32, 3] {
        let pair = gaussian_poly_pair(n, 0.5, 0.25, 0.0, 10.0);
        let ctx = if n == 2 {
            ns::SphereContext::circle(96, 8).unwrap()
        } else {
            ns::SphereContext::sphere(24, 48, 6).unwrap()
        };
        let target = radial::weighted_ball_volume(&pair, radius).unwrap();
        let mut rng = SplitMix64::new(707 + n as u64);
        for trial in 0..100 {
            let mut coeffs = vec![0.0; ctx.table().modes.len()];
            for (mode, c) in ctx.table().modes.iter().zip(coeffs.iter_mut()) {
                if mode.degree >= 1 && mode.degree <= 5 {
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
            let scale = 0.009 / sup.max(1e-300);
            for c in coeffs.iter_mut() {
                *c *= scale;
            }
            let gs = ns::GraphSet::from_coeffs(&ctx, radius, coeffs).unwrap();
            let gs = ns::volume_correct(&pair, &ctx, &gs, target).unwrap();
            let out = ns::fuglede_gap(&pair, &ctx, &gs, ns::DEFAULT_EPSILON).unwrap();
            assert!(
                out.gap >= out.lower_bound,
                "n={n} trial {trial}: gap {:.4e} < bound {:.4e}",
                out.gap,
                out.lower_bound
            );
            if out.lower_bound > 0.0 {
                min_slack = min_slack.min(out.gap / out.lower_bound);
            }
        }

        // Finite gap vs ½ t² Q at t = 1e-3 for a degree-2 mode.
        let t = 1e-3;
        let mode_pos = ctx
            .table()
            .modes
            .iter()
            .position(|m| m.degree == 2 && m.index == if n == 2 { 2 } else { 0 })
            .unwrap();
        let mut coeffs = vec![0.0; ctx.table().modes.len()];
        coeffs[mode_pos] = t;
        let gs = ns::GraphSet::from_coeffs(&ctx, radius, coeffs).unwrap();
        let gs = ns::volume_correct(&pair, &ctx, &gs, target).unwrap();
        let gap = ns::graph_energy(&pair, &ctx, &gs).unwrap()
            - radial::ball_energy(&pair, radius).unwrap().total;
        let u = ctx.table().synthesize({
            let mut c = vec![0.0; ctx.table().modes.len()];
            c[mode_pos] = t;
            &c.clone()
        });
        let q = ns::second_variation_q(&pair, &ctx, radius, &u).unwrap();
        let rel = (gap - 0.5 * q).abs() / (0.5 * q);
        assert!(rel <= 0.10, "n={n}: gap {gap:.6e} vs Q/2 {:.6e} ({rel:.3})", 0.5 * q);
    }
    let passed = t0.elapsed().as_secs_f64() < 120.0;
    report(
        "7 (stability lower bound)",
        passed,
        &format!("200 trials hold; min gap/bound slack {min_slack:.3}"),
        t0,
    );
}

#[test]
fn criterion_8_symmetrization() {
    let t0 = Instant::now();
    let pair2 = gaussian_poly_pair(2, 0.2, 0.4, 0.0, 40.0);
    let pair3 = gaussian_poly_pair(3, 0.2, 0.4, 0.0, 40.0);
    let mut rng = SplitMix64::new(808);
    for trial in 0..200 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let pair = if n == 2 { &pair2 } else { &pair3 };
        let set = random_polar_set(&mut rng, n);
        let sym = symmetrize::symmetrize(&set);
        let (v0, p0, per0) = symmetrize::measures(pair, &set).unwrap();
        let (v1, p1, per1) = symmetrize::measures(pair, &sym).unwrap();
        assert!(
            (v0 - v1).abs() <= 1e-10 * v0.abs().max(1.0),
            "trial {trial}: volume {v0} -> {v1}"
        );
        assert!(
            (p0 - p1).abs() <= 1e-10 * p0.abs().max(1.0),
            "trial {trial}: potential {p0} -> {p1}"
        );
        assert!(per1 <= per0 + 1e-9, "trial {trial}: perimeter {per0} -> {per1}");
        assert_eq!(symmetrize::symmetrize(&sym), sym, "trial {trial}: idempotence");
    }
    let passed = t0.elapsed().as_secs_f64() < 30.0;
    report(
        "8 (spherical symmetrization)",
        passed,
        "200 random polar sets: measures preserved, perimeter non-increasing, idempotent",
        t0,
    );
}

fn random_polar_set(rng: &mut SplitMix64, n: u32) -> symmetrize::PolarSet {
    let shells = 1 + rng.below(3);
    let mut radii = vec![if rng.next_f64() < 0.3 {
        0.0
    } else {
        0.2 + rng.next_f64()
    }];
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
        symmetrize::PolarSet::planar(radii, occ).unwrap()
    } else {
        let caps = (0..shells)
            .map(|_| match rng.below(6) {
                0 => 0.0,
                1 => PI,
                _ => rng.uniform(0.05, PI - 0.05),
            })
            .collect();
        symmetrize::PolarSet::axisymmetric(radii, caps).unwrap()
    }
}

#[test]
fn criterion_9_second_variation_sign() {
    let t0 = Instant::now();
    let radius = 1.0;
    let mut rng = SplitMix64::new(909);
    for i in 0..20 {
        let n = if i % 2 == 0 { 2 } else { 3 };
        // Half the pairs have κ(R) > 0, half κ(R) < 0.
        let sign = if i < 10 { 1.0 } else { -1.0 };
        let a = sign * rng.uniform(0.1, 0.6);
        let pair = weights::WeightPair::new(
            weights::WeightProfile::gaussian(a),
            weights::WeightProfile::constant(rng.uniform(0.0, 0.5)),
            n,
            10.0,
        )
        .unwrap();
        let kappa = pair.kappa(radius);
        let ctx = if n == 2 {
            ns::SphereContext::circle(64, 6).unwrap()
        } else {
            ns::SphereContext::sphere(16, 32, 6).unwrap()
        };

        // Q over all mean-zero modes up to degree 6 is nonnegative iff
        // κ(R) ≥ 0 (the translation mode is the minimizer).
        let mut min_q = f64::INFINITY;
        let mut prev_degree_q = f64::NEG_INFINITY;
        for degree in 1..=6u32 {
            let pos = ctx
                .table()
                .modes
                .iter()
                .position(|m| m.degree == degree && m.index >= 0)
                .unwrap();
            let mut coeffs = vec![0.0; ctx.table().modes.len()];
            coeffs[pos] = 1.0;
            let u = ctx.table().synthesize(&coeffs);
            let q = ns::second_variation_q(&pair, &ctx, radius, &u).unwrap();
            min_q = min_q.min(q);
            // Mode monotonicity: Q nondecreasing in the degree.
            assert!(q >= prev_degree_q - 1e-10, "pair {i}: degree {degree}");
            prev_degree_q = q;
        }
        assert_eq!(
            min_q >= -1e-10,
            kappa >= 0.0,
            "pair {i}: min Q = {min_q:.4e}, kappa = {kappa:.4}"
        );

        // Translation-mode identity Q = f(R)(ψ''+g') ∫ w² with
        // ∫_{∂B_R} w² = ωₙ R^{n-1}.
        let w: Vec<f64> = (0..ctx.grid().len())
            .map(|j| {
                let (theta, phi) = ctx.grid().angles()[j];
                if n == 2 {
                    phi.cos()
                } else {
                    theta.cos()
                }
            })
            .collect();
        let q_tr = ns::second_variation_q(&pair, &ctx, radius, &w).unwrap();
        let f_r = pair.psi.eval_unchecked(radius, 0).exp();
        let expected = f_r * kappa * radial::omega_n(n) * radius.powi(n as i32 - 1);
        assert!(
            (q_tr - expected).abs() <= 1e-9 * expected.abs().max(1.0),
            "pair {i}: Q_translation {q_tr:.10e} vs {expected:.10e}"
        );
    }
    let passed = true;
    report(
        "9 (second-variation sign)",
        passed,
        "20 pairs: sign of min-mode Q matches sign of ψ''(R)+g'(R); translation identity to 1e-9",
        t0,
    );
}
