//! Closed-form solution families of the singular Liouville equation on the
//! line and their harmonic extensions to the upper half-plane.
//!
//! Two families live here: the one-parameter singular family `u_rho`
//! (exponent `alpha` in (0,1) or (1,2), scale `rho`) and the two-parameter
//! regular family at `alpha = 1` (scale `mu`, center `xi`). Everything is a
//! pure function of its inputs; no state, safe to call concurrently.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("alpha = {0} outside (0,1) ∪ (1,2); use the regular family for alpha = 1")]
    AlphaOutOfRange(f64),
    #[error("scale parameter must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("point ({0}, {1}) lies below the real axis")]
    LowerHalfPlane(f64, f64),
}

/// Parameters of the singular bubble family: exponent and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleParams {
    alpha: f64,
    rho: f64,
}

/// Parameters of the regular (alpha = 1) family: scale and center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularBubbleParams {
    mu: f64,
    xi: f64,
}

/// A point (x, y) with y >= 0; polar angle in [0, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self, ClosedFormError> {
        if !(y >= 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(ClosedFormError::LowerHalfPlane(x, y));
        }
        // normalize -0.0 so atan2 stays in [0, pi]
        let y = if y == 0.0 { 0.0 } else { y };
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// atan2(y, x), guaranteed in [0, pi].
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl BubbleParams {
    pub fn new(alpha: f64, rho: f64) -> Result<Self, ClosedFormError> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(ClosedFormError::AlphaOutOfRange(alpha));
        }
        if !(rho > 0.0) {
            return Err(ClosedFormError::NonPositiveScale(rho));
        }
        Ok(Self { alpha, rho })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn half_angle(&self) -> (f64, f64) {
        let h = 0.5 * PI * self.alpha;
        (h.cos(), h.sin())
    }

    /// |x|^{2a} + 2 rho |x|^a cos(pi a / 2) + rho^2, factored so it stays
    /// positive and cancellation-free when |x|^a is close to rho.
    fn denom(&self, x: f64) -> f64 {
        let (c, s) = self.half_angle();
        let xa = x.abs().powf(self.alpha);
        let u = xa + self.rho * c;
        u * u + (self.rho * s) * (self.rho * s)
    }

    /// u_rho(x) = ln(2 a rho sin(pi a/2) / (|x|^{2a} + 2 rho |x|^a cos(pi a/2) + rho^2)).
    pub fn bubble_value(&self, x: f64) -> f64 {
        let (_, s) = self.half_angle();
        (2.0 * self.alpha * self.rho * s).ln() - self.denom(x).ln()
    }

    /// z_rho(x) = d u_rho / d rho = (|x|^{2a} - rho^2) / (rho * denom).
    pub fn z_rho_value(&self, x: f64) -> f64 {
        let xa = x.abs().powf(self.alpha);
        (xa - self.rho) * (xa + self.rho) / (self.rho * self.denom(x))
    }

    /// Squared distance |z^a - z0|^2 with z0 = rho e^{i theta0},
    /// theta0 = pi a/2 + pi, written as (r^a - rho)^2 + 4 r^a rho sin^2(...).
    fn extension_denom(&self, q: HalfPlanePoint) -> f64 {
        let theta0 = 0.5 * PI * self.alpha + PI;
        let r = q.radius();
        let ra = r.powf(self.alpha);
        let half = 0.5 * (self.alpha * q.angle() - theta0);
        let d = ra - self.rho;
        d * d + 4.0 * ra * self.rho * half.sin() * half.sin()
    }

    /// Harmonic extension U_rho(x, y); its trace at y = 0 is `bubble_value`.
    pub fn extension_value(&self, q: HalfPlanePoint) -> f64 {
        let (_, s) = self.half_angle();
        (2.0 * self.alpha * self.rho * s).ln() - self.extension_denom(q).ln()
    }

    /// d U_rho / d rho = (|z|^{2a} - rho^2) / (rho |z^a - z0|^2); its trace
    /// at y = 0 is `z_rho_value`.
    pub fn extension_rho_derivative(&self, q: HalfPlanePoint) -> f64 {
        let ra = q.radius().powf(self.alpha);
        (ra - self.rho) * (ra + self.rho) / (self.rho * self.extension_denom(q))
    }

    /// u_rho(x) + 2 alpha ln |x|, the deviation from the logarithmic tail.
    /// Converges to [`Self::tail_constant`] as |x| -> infinity.
    pub fn asymptotic_constant(&self, x: f64) -> f64 {
        let (c, s) = self.half_angle();
        let ax = x.abs();
        let lead = (2.0 * self.alpha * self.rho * s).ln();
        if ax > 1.0 {
            // denom / x^{2a} evaluated via t = |x|^{-a} to dodge overflow
            let t = ax.powf(-self.alpha);
            let u = 1.0 + self.rho * c * t;
            lead - (u * u + (self.rho * s * t) * (self.rho * s * t)).ln()
        } else {
            lead - self.denom(x).ln() + 2.0 * self.alpha * ax.ln()
        }
    }

    /// ln(2 alpha rho sin(pi alpha / 2)), the limit of `asymptotic_constant`.
    pub fn tail_constant(&self) -> f64 {
        let (_, s) = self.half_angle();
        (2.0 * self.alpha * self.rho * s).ln()
    }
}

impl RegularBubbleParams {
    pub fn new(mu: f64, xi: f64) -> Result<Self, ClosedFormError> {
        if !(mu > 0.0) {
            return Err(ClosedFormError::NonPositiveScale(mu));
        }
        if !xi.is_finite() {
            return Err(ClosedFormError::NonPositiveScale(xi));
        }
        Ok(Self { mu, xi })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// u(x) = ln(2 mu / ((x - xi)^2 + mu^2)).
    pub fn bubble_value(&self, x: f64) -> f64 {
        let d = x - self.xi;
        (2.0 * self.mu).ln() - (d * d + self.mu * self.mu).ln()
    }

    /// d u / d mu = ((x - xi)^2 - mu^2) / (mu ((x - xi)^2 + mu^2)).
    pub fn z_mu_value(&self, x: f64) -> f64 {
        let d = x - self.xi;
        (d * d - self.mu * self.mu) / (self.mu * (d * d + self.mu * self.mu))
    }

    /// d u / d xi = 2 (x - xi) / ((x - xi)^2 + mu^2), the translation mode.
    pub fn z_xi_value(&self, x: f64) -> f64 {
        let d = x - self.xi;
        2.0 * d / (d * d + self.mu * self.mu)
    }

    pub fn extension_value(&self, q: HalfPlanePoint) -> f64 {
        let d = q.x() - self.xi;
        let e = q.y() + self.mu;
        (2.0 * self.mu).ln() - (d * d + e * e).ln()
    }

    pub fn extension_mu_derivative(&self, q: HalfPlanePoint) -> f64 {
        let d = q.x() - self.xi;
        let e = q.y() + self.mu;
        (d * d + q.y() * q.y() - self.mu * self.mu) / (self.mu * (d * d + e * e))
    }

    /// u(x) + 2 ln |x|; tends to ln(2 mu) as |x| -> infinity.
    pub fn asymptotic_constant(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > 1.0 {
            let d = 1.0 - self.xi / x;
            let t = self.mu / ax;
            (2.0 * self.mu).ln() - (d * d + t * t).ln()
        } else {
            self.bubble_value(x) + 2.0 * ax.ln()
        }
    }

    pub fn tail_constant(&self) -> f64 {
        (2.0 * self.mu).ln()
    }
}

/// Either solution family under one interface, so residual checks can run
/// the alpha = 1 control through the same code path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bubble {
    Singular(BubbleParams),
    Regular(RegularBubbleParams),
}

impl Bubble {
    pub fn singular(alpha: f64, rho: f64) -> Result<Self, ClosedFormError> {
        Ok(Self::Singular(BubbleParams::new(alpha, rho)?))
    }

    pub fn regular(mu: f64, xi: f64) -> Result<Self, ClosedFormError> {
        Ok(Self::Regular(RegularBubbleParams::new(mu, xi)?))
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Singular(p) => p.alpha(),
            Self::Regular(_) => 1.0,
        }
    }

    /// The scale parameter (rho, or mu for the regular family).
    pub fn scale(&self) -> f64 {
        match self {
            Self::Singular(p) => p.rho(),
            Self::Regular(p) => p.mu(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Singular(p) => p.bubble_value(x),
            Self::Regular(p) => p.bubble_value(x),
        }
    }

    /// Derivative of the profile with respect to its scale parameter.
    pub fn scale_derivative(&self, x: f64) -> f64 {
        match self {
            Self::Singular(p) => p.z_rho_value(x),
            Self::Regular(p) => p.z_mu_value(x),
        }
    }

    pub fn extension(&self, q: HalfPlanePoint) -> f64 {
        match self {
            Self::Singular(p) => p.extension_value(q),
            Self::Regular(p) => p.extension_value(q),
        }
    }

    pub fn extension_scale_derivative(&self, q: HalfPlanePoint) -> f64 {
        match self {
            Self::Singular(p) => p.extension_rho_derivative(q),
            Self::Regular(p) => p.extension_mu_derivative(q),
        }
    }

    /// |x|^{alpha-1} e^{u(x)}, the boundary weight of the linearized problem.
    pub fn boundary_weight(&self, x: f64) -> f64 {
        match self {
            Self::Singular(p) => x.abs().powf(p.alpha() - 1.0) * p.bubble_value(x).exp(),
            Self::Regular(p) => p.bubble_value(x).exp(),
        }
    }

    pub fn asymptotic_constant(&self, x: f64) -> f64 {
        match self {
            Self::Singular(p) => p.asymptotic_constant(x),
            Self::Regular(p) => p.asymptotic_constant(x),
        }
    }

    pub fn tail_constant(&self) -> f64 {
        match self {
            Self::Singular(p) => p.tail_constant(),
            Self::Regular(p) => p.tail_constant(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_invalid_parameters() {
        assert!(BubbleParams::new(1.0, 1.0).is_err());
        assert!(BubbleParams::new(0.0, 1.0).is_err());
        assert!(BubbleParams::new(2.0, 1.0).is_err());
        assert!(BubbleParams::new(2.5, 1.0).is_err());
        assert!(BubbleParams::new(0.5, 0.0).is_err());
        assert!(BubbleParams::new(0.5, -1.0).is_err());
        assert!(RegularBubbleParams::new(0.0, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.0, -0.5).is_err());
        assert!(BubbleParams::new(0.5, 1.0).is_ok());
        assert!(BubbleParams::new(1.5, 2.0).is_ok());
    }

    #[test]
    fn regular_bubble_at_origin_is_ln_two() {
        let p = RegularBubbleParams::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(p.bubble_value(0.0), 2.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn singular_bubble_at_origin() {
        // alpha = 0.5, rho = 1: u(0) = ln(2 * 0.5 * sin(pi/4)) = ln(sqrt(2)/2)
        let p = BubbleParams::new(0.5, 1.0).unwrap();
        let expected = (0.5_f64.sqrt()).ln();
        assert_abs_diff_eq!(p.bubble_value(0.0), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, -0.346_573_590_279_972_7, epsilon = 1e-12);
    }

    #[test]
    fn z_rho_vanishes_on_the_sphere_of_radius_rho() {
        let p = BubbleParams::new(0.7, 1.3).unwrap();
        let x = 1.3_f64.powf(1.0 / 0.7);
        assert_abs_diff_eq!(p.z_rho_value(x), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.z_rho_value(-x), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn z_rho_at_origin_is_minus_one_over_rho() {
        for (a, r) in [(0.3, 0.5), (0.5, 1.0), (1.5, 2.0), (1.9, 0.25)] {
            let p = BubbleParams::new(a, r).unwrap();
            assert_abs_diff_eq!(p.z_rho_value(0.0), -1.0 / r, epsilon = 1e-14);
        }
    }

    #[test]
    fn extension_trace_matches_bubble() {
        let p = BubbleParams::new(0.6, 0.8).unwrap();
        for &x in &[-3.0, -1.0, -0.2, 0.0, 0.4, 1.7, 9.0] {
            let q = HalfPlanePoint::new(x, 0.0).unwrap();
            assert_abs_diff_eq!(p.extension_value(q), p.bubble_value(x), epsilon = 1e-12);
            assert_abs_diff_eq!(
                p.extension_rho_derivative(q),
                p.z_rho_value(x),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn regular_extension_example() {
        // ln(2/(x^2 + (y+1)^2)) at (0, 1) is -ln 2
        let p = RegularBubbleParams::new(1.0, 0.0).unwrap();
        let q = HalfPlanePoint::new(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.extension_value(q), -(2.0_f64.ln()), epsilon = 1e-15);
    }

    #[test]
    fn extension_rho_derivative_vanishes_on_rho_sphere() {
        let p = BubbleParams::new(1.5, 0.7).unwrap();
        let r = 0.7_f64.powf(1.0 / 1.5);
        for &t in &[0.3_f64, 1.1, 2.9] {
            let q = HalfPlanePoint::new(r * t.cos(), r * t.sin()).unwrap();
            assert_abs_diff_eq!(p.extension_rho_derivative(q), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn evenness_is_exact() {
        let p = BubbleParams::new(1.3, 0.9).unwrap();
        for &x in &[0.1, 0.77, 2.5, 31.0] {
            assert_eq!(p.bubble_value(x), p.bubble_value(-x));
            assert_eq!(p.z_rho_value(x), p.z_rho_value(-x));
        }
    }

    #[test]
    fn regular_asymptotic_limit() {
        let p = RegularBubbleParams::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            p.asymptotic_constant(1e8),
            2.0_f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn angle_stays_in_upper_range() {
        let q = HalfPlanePoint::new(-2.0, 0.0).unwrap();
        assert_abs_diff_eq!(q.angle(), std::f64::consts::PI, epsilon = 0.0);
        let q = HalfPlanePoint::new(3.0, 0.0).unwrap();
        assert_eq!(q.angle(), 0.0);
    }
}
