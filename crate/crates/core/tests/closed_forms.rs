//! Oracle-backed checks of the explicit solution families: scaling
//! covariance, derivative identities via finite differences, harmonicity
//! of the extensions via Richardson-extrapolated discrete Laplacians, and
//! the logarithmic asymptotics.

use approx::assert_abs_diff_eq;
use steklov_core::closed_forms::{Bubble, BubbleParams, HalfPlanePoint, RegularBubbleParams};

fn sample_grid() -> Vec<f64> {
    (1..=100).map(|i| -6.0 + 0.12 * i as f64).collect()
}

#[test]
fn scaling_covariance_u_rho_of_scaled_argument() {
    // u_rho(rho^{1/a} t) = u_1(t) - ln(rho) pointwise
    for &(alpha, rho) in &[(0.5, 0.3), (0.5, 2.0), (0.8, 5.0), (1.5, 0.7), (1.9, 3.3)] {
        let p_rho = BubbleParams::new(alpha, rho).unwrap();
        let p_one = BubbleParams::new(alpha, 1.0).unwrap();
        let s = rho.powf(1.0 / alpha);
        for &t in &sample_grid() {
            let lhs = p_rho.bubble_value(s * t);
            let rhs = p_one.bubble_value(t) - rho.ln();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }
}

#[test]
fn z_rho_matches_central_difference_of_bubble() {
    // (u_{rho+h} - u_{rho-h}) / 2h agrees with z_rho at O(h^2)
    for &(alpha, rho) in &[(0.4, 1.0), (0.7, 0.5), (1.3, 1.0), (1.6, 2.0)] {
        let p = BubbleParams::new(alpha, rho).unwrap();
        let mut worst_coarse: f64 = 0.0;
        let mut worst_fine: f64 = 0.0;
        for &x in &[-3.0, -1.2, -0.4, 0.0, 0.3, 1.0, 2.5, 8.0] {
            for (h, worst) in [(1e-3, &mut worst_coarse), (5e-4, &mut worst_fine)] {
                let up = BubbleParams::new(alpha, rho + h).unwrap();
                let dn = BubbleParams::new(alpha, rho - h).unwrap();
                let fd = (up.bubble_value(x) - dn.bubble_value(x)) / (2.0 * h);
                *worst = worst.max((fd - p.z_rho_value(x)).abs());
            }
        }
        // second-order: quartering the error when halving h
        assert!(worst_coarse < 1e-5, "fd defect {worst_coarse}");
        assert!(
            worst_fine <= worst_coarse / 3.0,
            "expected O(h^2): {worst_coarse} -> {worst_fine}"
        );
    }
}

#[test]
fn extension_rho_derivative_matches_central_difference() {
    let alpha = 1.4;
    let rho = 0.8;
    let p = BubbleParams::new(alpha, rho).unwrap();
    for &(x, y) in &[(0.5, 0.5), (-1.0, 2.0), (3.0, 0.1), (0.0, 1.0)] {
        let q = HalfPlanePoint::new(x, y).unwrap();
        let h = 1e-4;
        let up = BubbleParams::new(alpha, rho + h).unwrap();
        let dn = BubbleParams::new(alpha, rho - h).unwrap();
        let fd = (up.extension_value(q) - dn.extension_value(q)) / (2.0 * h);
        assert_abs_diff_eq!(fd, p.extension_rho_derivative(q), epsilon = 1e-7);
    }
}

/// Five-point discrete Laplacian at mesh width h.
fn discrete_laplacian<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
}

#[test]
fn extensions_are_harmonic_by_richardson() {
    // the discrete Laplacian is O(h^2); Richardson over h, h/2 must drop
    // to O(h^4), which certifies the true Laplacian is zero
    let p = BubbleParams::new(0.6, 1.2).unwrap();
    let u = |x: f64, y: f64| p.extension_value(HalfPlanePoint::new(x, y).unwrap());
    let z = |x: f64, y: f64| p.extension_rho_derivative(HalfPlanePoint::new(x, y).unwrap());
    for &(x, y) in &[(0.7, 0.9), (-1.3, 0.6), (0.2, 2.0), (2.0, 0.4)] {
        for f in [&u as &dyn Fn(f64, f64) -> f64, &z] {
            let h = 1e-2;
            let l1 = discrete_laplacian(&f, x, y, h);
            let l2 = discrete_laplacian(&f, x, y, 0.5 * h);
            // both small, and the h/2 value roughly 4x smaller
            assert!(l1.abs() < 1e-2, "Laplacian defect {l1}");
            assert!(
                l2.abs() <= l1.abs() / 2.5 + 1e-8,
                "not O(h^2): {l1} -> {l2}"
            );
            let extrapolated = (4.0 * l2 - l1) / 3.0;
            assert!(extrapolated.abs() < 1e-4, "Richardson value {extrapolated}");
        }
    }
}

#[test]
fn asymptotic_constant_converges_by_extrapolation() {
    // oracle: evaluate at increasing |x| and extrapolate in x^{-alpha};
    // the extrapolated limit matches ln(2 a rho sin(pi a/2)) to 1e-5
    let p = BubbleParams::new(0.5, 1.0).unwrap();
    let d1 = p.asymptotic_constant(1e6);
    let d2 = p.asymptotic_constant(1e8);
    // deviation - limit ~ C x^{-alpha}: x^{-1/2} drops 10x from 1e6 to 1e8
    let extrapolated = (10.0 * d2 - d1) / 9.0;
    let limit = (std::f64::consts::FRAC_PI_4.sin()).ln();
    assert_abs_diff_eq!(extrapolated, limit, epsilon = 1e-5);
    assert_abs_diff_eq!(limit, -0.346_573_590_279_972_7, epsilon = 1e-12);
    assert_abs_diff_eq!(p.tail_constant(), limit, epsilon = 1e-15);
}

#[test]
fn asymptotic_deviation_decreases_monotonically() {
    for &alpha in &[0.3, 0.8, 1.5] {
        let p = BubbleParams::new(alpha, 1.0).unwrap();
        let limit = p.tail_constant();
        let devs: Vec<f64> = (2..=6)
            .map(|k| (p.asymptotic_constant(10f64.powi(k)) - limit).abs())
            .collect();
        for w in devs.windows(2) {
            assert!(w[1] < w[0], "not monotone: {devs:?}");
        }
    }
}

#[test]
fn regular_family_asymptotics() {
    let p = RegularBubbleParams::new(1.0, 0.0).unwrap();
    let limit = 2.0_f64.ln();
    for &x in &[1e3, 1e5, 1e7] {
        assert!((p.asymptotic_constant(x) - limit).abs() < 1e-5);
    }
}

#[test]
fn z_rho_sign_structure() {
    // negative inside |x|^a < rho, positive outside, one sign change per
    // half-line
    for &(alpha, rho) in &[(0.5, 1.0), (1.5, 0.6), (0.9, 2.5)] {
        let p = BubbleParams::new(alpha, rho).unwrap();
        let cross = rho.powf(1.0 / alpha);
        let mut changes = 0;
        let mut prev = p.z_rho_value(1e-9);
        assert!(prev < 0.0);
        for i in 1..=2000 {
            let x = 1e-9 + (4.0 * cross - 1e-9) * i as f64 / 2000.0;
            let v = p.z_rho_value(x);
            if v != 0.0 {
                if prev.signum() != v.signum() {
                    changes += 1;
                }
                prev = v;
            }
            if x < cross {
                assert!(v < 0.0, "z must be negative at {x} < {cross}");
            }
            if x > cross * 1.001 {
                assert!(v > 0.0, "z must be positive at {x} > {cross}");
            }
        }
        assert_eq!(changes, 1);
    }
}

#[test]
fn trace_identities_on_dense_grid() {
    let b = Bubble::singular(1.7, 1.3).unwrap();
    for &x in &sample_grid() {
        let q = HalfPlanePoint::new(x, 0.0).unwrap();
        assert_abs_diff_eq!(b.extension(q), b.value(x), epsilon = 1e-12);
        assert_abs_diff_eq!(
            b.extension_scale_derivative(q),
            b.scale_derivative(x),
            epsilon = 1e-12
        );
    }
}

#[test]
fn singular_formula_at_alpha_one_matches_regular_family() {
    // Eq-level consistency: the singular formula evaluated at a -> 1
    // coincides with the centered regular bubble
    let reg = RegularBubbleParams::new(1.0, 0.0).unwrap();
    let close = BubbleParams::new(1.0 - 1e-9, 1.0).unwrap();
    for &x in &[-2.0, 0.0, 0.5, 3.0] {
        assert_abs_diff_eq!(close.bubble_value(x), reg.bubble_value(x), epsilon = 1e-7);
    }
}
