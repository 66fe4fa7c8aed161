//! Pointwise evaluation of the 1D half-Laplacian and the Poisson extension
//! for functions with logarithmic tails, by principal-value quadrature.
//!
//! The half-Laplacian is computed as the singular integral
//! `(1/pi) pv ∫ (u(x) - u(t)) / (x - t)^2 dt`. The near field is folded
//! symmetrically around `x`, which regularizes the integrand without
//! needing u'; the far field uses the closed antiderivative of the
//! declared logarithmic tail. Refinement levels double the panel counts
//! until two successive values agree to the target tolerance.

use thiserror::Error;

use crate::closed_forms::{Bubble, HalfPlanePoint};
use crate::parallel::par_map;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("tail model missing: truncation error cannot be bounded")]
    TailModelMissing,
    #[error("quadrature refinement stalled at {achieved:e} above target {target:e}")]
    NotConverged { achieved: f64, target: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("evaluation point {0} coincides with a kink of the integrand")]
    EvaluationAtKink(f64),
    #[error("tail model disagrees with the evaluator at the cutoff by {0:e}")]
    TailMismatch(f64),
}

/// Logarithmic tail `u(x) ≈ -beta ln|x| + constant` valid for |x| beyond
/// the owning function's cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub beta: f64,
    pub constant: f64,
}

/// A scalar function of one real variable plus the metadata the singular
/// quadrature needs: an optional tail model, the radius where it becomes
/// valid, and the points where the function loses smoothness.
pub struct SampledFunction {
    eval: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    tail: Option<TailModel>,
    cutoff: f64,
    kinks: Vec<f64>,
}

/// Tolerance for the construction-time check that the tail model matches
/// the evaluator at the cutoff.
const TAIL_CHECK_TOL: f64 = 0.15;

impl SampledFunction {
    pub fn new<F>(
        eval: F,
        tail: Option<TailModel>,
        cutoff: f64,
        kinks: Vec<f64>,
    ) -> Result<Self, QuadratureError>
    where
        F: Fn(f64) -> f64 + Sync + Send + 'static,
    {
        if !(cutoff > 0.0) {
            return Err(QuadratureError::InvalidSpec("cutoff must be positive".into()));
        }
        if let Some(t) = tail {
            for s in [-1.0, 1.0] {
                let x = s * cutoff;
                let dev = (eval(x) - (-t.beta * x.abs().ln() + t.constant)).abs();
                if !(dev <= TAIL_CHECK_TOL) {
                    return Err(QuadratureError::TailMismatch(dev));
                }
            }
        }
        Ok(Self {
            eval: Box::new(eval),
            tail,
            cutoff,
            kinks,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn tail(&self) -> Option<TailModel> {
        self.tail
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// The bubble profile as a quadrature-ready function. Fails only for
    /// exponents so small that the profile has not settled onto its tail
    /// within the supported cutoff range.
    pub fn from_bubble(b: &Bubble) -> Result<Self, QuadratureError> {
        let tail = TailModel {
            beta: 2.0 * b.alpha(),
            constant: b.tail_constant(),
        };
        let cutoff = default_cutoff(b);
        let kinks = bubble_kinks(b);
        let b = *b;
        Self::new(move |x| b.value(x), Some(tail), cutoff, kinks)
    }

    /// The scale derivative of the bubble (the candidate kernel of the
    /// linearization); tends to 1/scale at infinity.
    pub fn from_bubble_scale_derivative(b: &Bubble) -> Result<Self, QuadratureError> {
        let tail = TailModel {
            beta: 0.0,
            constant: 1.0 / b.scale(),
        };
        let cutoff = default_cutoff(b);
        let kinks = bubble_kinks(b);
        let b = *b;
        Self::new(move |x| b.scale_derivative(x), Some(tail), cutoff, kinks)
    }
}

/// Radius past which the bubble's tail expansion is accurate: the leading
/// correction is ~ 2 rho cos(pi a/2) |x|^{-a}, so small exponents need a
/// far larger cutoff.
fn default_cutoff(b: &Bubble) -> f64 {
    let rho = b.scale();
    let c = (0.5 * std::f64::consts::PI * b.alpha()).cos().abs();
    let k = 2.0 * c * (rho + 1.0 / rho) + 1e-9;
    (k / 0.01).powf(1.0 / b.alpha()).clamp(1.0e4, 1.0e12)
}

fn bubble_kinks(b: &Bubble) -> Vec<f64> {
    match b {
        Bubble::Singular(_) => vec![0.0],
        Bubble::Regular(_) => vec![],
    }
}

/// Quadrature layout: symmetric near field around the target, geometric
/// mid field, analytic tail beyond the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub near_field_halfwidth: f64,
    pub panel_order: usize,
    pub truncation_radius: f64,
    pub target_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            near_field_halfwidth: 0.5,
            panel_order: 16,
            truncation_radius: 1.0e6,
            target_tol: 1.0e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if self.panel_order < 4 {
            return Err(QuadratureError::InvalidSpec("panel_order must be >= 4".into()));
        }
        if !(self.near_field_halfwidth > 0.0)
            || !(self.truncation_radius > self.near_field_halfwidth)
        {
            return Err(QuadratureError::InvalidSpec(
                "need truncation_radius > near_field_halfwidth > 0".into(),
            ));
        }
        if !(self.target_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("target_tol must be positive".into()));
        }
        Ok(())
    }
}

const MAX_LEVEL: usize = 6;
/// Dyadic refinement depth toward kinks and log singularities.
const KINK_DEPTH: usize = 44;

/// Half-Laplacian at a fixed refinement level; exposed so convergence
/// studies can measure the order directly.
pub fn half_laplacian_at_level(
    u: &SampledFunction,
    x: f64,
    q: &QuadratureSpec,
    level: usize,
) -> Result<f64, QuadratureError> {
    q.validate()?;
    let tail = u.tail().ok_or(QuadratureError::TailModelMissing)?;
    let gl = GaussLegendre::new(q.panel_order);

    // Near field must stay clear of kinks.
    let mut a = q.near_field_halfwidth;
    for &k in u.kinks() {
        let d = (x - k).abs();
        if d == 0.0 {
            return Err(QuadratureError::EvaluationAtKink(x));
        }
        a = a.min(0.5 * d);
    }
    let big_t = q
        .truncation_radius
        .max(u.cutoff())
        .max(2.0 * x.abs() + 2.0 * a);

    let ux = u.value(x);

    // Symmetric near field: ∫_0^a (2u(x) - u(x+h) - u(x-h)) / h^2 dh.
    let n_near = 4 << level;
    let mut near = 0.0;
    for i in 0..n_near {
        let lo = a * i as f64 / n_near as f64;
        let hi = a * (i + 1) as f64 / n_near as f64;
        near += gl.integrate(lo, hi, |h| {
            (2.0 * ux - u.value(x + h) - u.value(x - h)) / (h * h)
        });
    }

    // Mid field on both sides, kink-aware.
    let integrand = |t: f64| (ux - u.value(t)) / ((x - t) * (x - t));
    let splits = 1usize << level;
    let right = integrate_panels(
        &gl,
        &breakpoints(x + a, big_t, a, u.kinks(), splits),
        &integrand,
    );
    let left = integrate_panels(
        &gl,
        &breakpoints(-big_t, x - a, a, u.kinks(), splits),
        &integrand,
    );

    // Analytic tail of (A + beta ln|t|)/(x-t)^2 beyond big_t on both sides.
    let aa = ux - tail.constant;
    let tail_val = tail_integral(aa, tail.beta, x, big_t) + tail_integral(aa, tail.beta, -x, big_t);

    Ok((near + left + right + tail_val) / std::f64::consts::PI)
}

/// `∫_T^∞ (A + beta ln t)/(x - t)^2 dt` in closed form.
fn tail_integral(a: f64, beta: f64, x: f64, t: f64) -> f64 {
    let lead = a / (t - x);
    if beta == 0.0 {
        return lead;
    }
    let log_term = if x.abs() < 1e-8 * t {
        // (1/x) ln(T/(T-x)) expanded for small x
        1.0 / t + x / (2.0 * t * t)
    } else {
        (t / (t - x)).ln() / x
    };
    lead + beta * (t.ln() / (t - x) + log_term)
}

/// Panel breakpoints for [lo, hi]: geometric growth away from the target
/// region of size `scale`, a split at every interior kink with dyadic
/// panels shrinking into it, and `splits`-fold uniform subdivision.
fn breakpoints(lo: f64, hi: f64, scale: f64, kinks: &[f64], splits: usize) -> Vec<f64> {
    assert!(lo < hi);
    let mut pts = vec![lo, hi];
    // geometric ladder from whichever end is nearer the target
    let near_lo = (hi - lo) > 0.0 && scale > 0.0;
    if near_lo {
        // ladder from both ends; extra points are harmless
        let mut step = scale;
        let mut t = lo + step;
        while t < hi {
            pts.push(t);
            step *= 2.0;
            t = lo + step;
        }
        let mut step = scale;
        let mut t = hi - step;
        while t > lo {
            pts.push(t);
            step *= 2.0;
            t = hi - step;
        }
    }
    for &k in kinks {
        if k > lo && k < hi {
            let reach = (k - lo).min(hi - k).min(1.0);
            pts.retain(|&p| (p - k).abs() > reach || p == lo || p == hi);
            pts.push(k);
            let mut d = reach;
            for _ in 0..KINK_DEPTH {
                if k + d < hi {
                    pts.push(k + d);
                }
                if k - d > lo {
                    pts.push(k - d);
                }
                d *= 0.5;
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if splits > 1 {
        let mut fine = Vec::with_capacity(pts.len() * splits);
        for w in pts.windows(2) {
            for j in 0..splits {
                fine.push(w[0] + (w[1] - w[0]) * j as f64 / splits as f64);
            }
        }
        fine.push(hi);
        fine
    } else {
        pts
    }
}

fn integrate_panels<F: Fn(f64) -> f64>(gl: &GaussLegendre, pts: &[f64], f: &F) -> f64 {
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += gl.integrate(w[0], w[1], f);
    }
    acc
}

/// Pointwise half-Laplacian, refined until two levels agree to the target
/// tolerance.
pub fn half_laplacian(
    u: &SampledFunction,
    x: f64,
    q: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let mut prev = half_laplacian_at_level(u, x, q, 0)?;
    for level in 1..=MAX_LEVEL {
        let cur = half_laplacian_at_level(u, x, q, level)?;
        if (cur - prev).abs() <= 0.5 * q.target_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(QuadratureError::NotConverged {
        achieved: prev.abs(),
        target: q.target_tol,
    })
}

/// Poisson extension at a fixed refinement level.
pub fn poisson_extend_at_level(
    u: &SampledFunction,
    p: HalfPlanePoint,
    q: &QuadratureSpec,
    level: usize,
) -> Result<f64, QuadratureError> {
    q.validate()?;
    if !(p.y() > 0.0) {
        return Err(QuadratureError::InvalidSpec(
            "Poisson extension needs y > 0".into(),
        ));
    }
    let tail = u.tail().ok_or(QuadratureError::TailModelMissing)?;
    let gl = GaussLegendre::new(q.panel_order);
    let (x, y) = (p.x(), p.y());
    let big_t = q
        .truncation_radius
        .max(u.cutoff())
        .max(2.0 * x.abs() + 2.0 * y);

    // subtract the global log profile; its extension is exact
    let h = |t: f64| u.value(t) - (-tail.beta * t.abs().ln() + tail.constant);
    let kernel = |t: f64| y / ((x - t) * (x - t) + y * y) * h(t);

    // singular points of h: declared kinks plus the log at the origin
    let mut kinks = u.kinks().to_vec();
    if tail.beta != 0.0 && !kinks.contains(&0.0) {
        kinks.push(0.0);
    }
    let pts = breakpoints(-big_t, big_t, y.min(1.0), &kinks, 1usize << level);
    // refine around the kernel peak at t = x
    let mut pts2 = pts;
    let reach = big_t;
    let mut d = y;
    while d < reach {
        if x + d < big_t {
            pts2.push(x + d);
        }
        if x - d > -big_t {
            pts2.push(x - d);
        }
        d *= 2.0;
    }
    if x > -big_t && x < big_t {
        pts2.push(x);
    }
    pts2.sort_by(f64::total_cmp);
    pts2.dedup();
    let numeric = integrate_panels(&gl, &pts2, &kernel) / std::f64::consts::PI;

    let r = x.hypot(y);
    Ok(numeric - tail.beta * r.ln() + tail.constant)
}

/// Poisson extension `(1/pi) ∫ y u(t) / ((x-t)^2 + y^2) dt` with the
/// logarithmic part handled in closed form.
pub fn poisson_extend(
    u: &SampledFunction,
    p: HalfPlanePoint,
    q: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let mut prev = poisson_extend_at_level(u, p, q, 0)?;
    for level in 1..=MAX_LEVEL {
        let cur = poisson_extend_at_level(u, p, q, level)?;
        if (cur - prev).abs() <= 0.5 * q.target_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(QuadratureError::NotConverged {
        achieved: prev.abs(),
        target: q.target_tol,
    })
}

/// Max-norm residual of the nonlinear equation over the grid:
/// `max |(-Δ)^{1/2} u - |x|^{a-1} e^u|`.
pub fn verify_bubble_residual(
    b: &Bubble,
    grid: &[f64],
    q: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let u = SampledFunction::from_bubble(b)?;
    let residuals = par_map(grid, |&x| {
        half_laplacian(&u, x, q).map(|v| (v - b.boundary_weight(x)).abs())
    });
    let mut worst = 0.0_f64;
    for r in residuals {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// Max-norm residual of the linearized equation on the scale derivative:
/// `max |(-Δ)^{1/2} z - |x|^{a-1} e^u z|`.
pub fn verify_linearized_residual(
    b: &Bubble,
    grid: &[f64],
    q: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let z = SampledFunction::from_bubble_scale_derivative(b)?;
    let residuals = par_map(grid, |&x| {
        half_laplacian(&z, x, q).map(|v| (v - b.boundary_weight(x) * b.scale_derivative(x)).abs())
    });
    let mut worst = 0.0_f64;
    for r in residuals {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// Same residual for the translation mode of the regular family, the
/// second kernel direction that exists only at alpha = 1.
pub fn verify_translation_residual(
    b: &crate::closed_forms::RegularBubbleParams,
    grid: &[f64],
    q: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    let bb = *b;
    let z = SampledFunction::new(
        move |x| bb.z_xi_value(x),
        Some(TailModel { beta: 0.0, constant: 0.0 }),
        1.0e4,
        vec![],
    )?;
    let bub = Bubble::Regular(*b);
    let residuals = par_map(grid, |&x| {
        half_laplacian(&z, x, q).map(|v| (v - bub.boundary_weight(x) * b.z_xi_value(x)).abs())
    });
    let mut worst = 0.0_f64;
    for r in residuals {
        worst = worst.max(r?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_maps_to_zero() {
        let u = SampledFunction::new(
            |_| 3.5,
            Some(TailModel { beta: 0.0, constant: 3.5 }),
            10.0,
            vec![],
        )
        .unwrap();
        let v = half_laplacian(&u, 0.7, &default_spec()).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn log_profile_is_half_harmonic_away_from_origin() {
        let u = SampledFunction::new(
            |t: f64| t.abs().ln(),
            Some(TailModel { beta: -1.0, constant: 0.0 }),
            10.0,
            vec![0.0],
        )
        .unwrap();
        for &x in &[0.5, 2.0, -3.0] {
            let v = half_laplacian(&u, x, &default_spec()).unwrap();
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn regular_bubble_equation_at_origin() {
        // (-Δ)^{1/2} u = e^u with u = ln(2/(1+x^2)): value 2 at x = 0
        let b = Bubble::regular(1.0, 0.0).unwrap();
        let u = SampledFunction::from_bubble(&b).unwrap();
        let v = half_laplacian(&u, 0.0, &default_spec()).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn regular_kernel_equation_at_origin() {
        // z = (x^2-1)/(1+x^2): (-Δ)^{1/2} z = e^u z = -2 at x = 0
        let b = Bubble::regular(1.0, 0.0).unwrap();
        let z = SampledFunction::from_bubble_scale_derivative(&b).unwrap();
        let v = half_laplacian(&z, 0.0, &default_spec()).unwrap();
        assert_abs_diff_eq!(v, -2.0, epsilon = 1e-6);
    }

    #[test]
    fn missing_tail_is_reported() {
        let u = SampledFunction::new(|t: f64| 1.0 / (1.0 + t * t), None, 10.0, vec![]).unwrap();
        assert_eq!(
            half_laplacian(&u, 0.0, &default_spec()),
            Err(QuadratureError::TailModelMissing)
        );
    }

    #[test]
    fn tail_mismatch_rejected_at_construction() {
        let r = SampledFunction::new(
            |t: f64| t.abs().ln(),
            Some(TailModel { beta: 2.0, constant: 0.0 }),
            100.0,
            vec![],
        );
        assert!(matches!(r, Err(QuadratureError::TailMismatch(_))));
    }

    #[test]
    fn poisson_of_log_is_log_of_radius() {
        let u = SampledFunction::new(
            |t: f64| t.abs().ln(),
            Some(TailModel { beta: -1.0, constant: 0.0 }),
            10.0,
            vec![0.0],
        )
        .unwrap();
        let p = HalfPlanePoint::new(3.0, 4.0).unwrap();
        let v = poisson_extend(&u, p, &default_spec()).unwrap();
        assert_abs_diff_eq!(v, 5.0_f64.ln(), epsilon = 1e-8);
    }

    #[test]
    fn poisson_kernel_normalization() {
        let u = SampledFunction::new(
            |_| 1.0,
            Some(TailModel { beta: 0.0, constant: 1.0 }),
            10.0,
            vec![],
        )
        .unwrap();
        for &(x, y) in &[(0.0, 0.5), (2.0, 1.0), (-1.0, 3.0)] {
            let p = HalfPlanePoint::new(x, y).unwrap();
            let v = poisson_extend(&u, p, &default_spec()).unwrap();
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut q = default_spec();
        q.panel_order = 2;
        assert!(q.validate().is_err());
        let mut q = default_spec();
        q.truncation_radius = 0.1;
        assert!(q.validate().is_err());
    }
}
