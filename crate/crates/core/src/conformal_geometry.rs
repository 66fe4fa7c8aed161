//! The two conformal changes of variables connecting the half-plane problem
//! to a Steklov problem on a disk pair: the power map onto a cone and a
//! Möbius map onto the intersection or union of two disks, together with
//! the normalized unit-disk-pair geometry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::closed_forms::HalfPlanePoint;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("alpha = {0} outside (0,1) ∪ (1,2)")]
    AlphaOutOfRange(f64),
    #[error("map has a pole at xi")]
    PoleAtXi,
    #[error("inverse power map undefined at the origin")]
    OriginUndefined,
    #[error("point ({0}, {1}) lies outside the closed cone")]
    OutsideCone(f64, f64),
}

/// Anchor data for the conformal reduction at a given exponent: the pole
/// `xi`, the slope `tau`, and the distinguished Steklov eigenvalue
/// `mu_alpha` of the unnormalized domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalContext {
    alpha: f64,
    rho: f64,
    tau: f64,
    xi: [f64; 2],
    theta0: f64,
    mu_alpha: f64,
}

impl ConformalContext {
    /// Context with the default scale rho = 1.
    pub fn new(alpha: f64) -> Result<Self, GeometryError> {
        Self::with_rho(alpha, 1.0)
    }

    pub fn with_rho(alpha: f64, rho: f64) -> Result<Self, GeometryError> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 || !(rho > 0.0) {
            return Err(GeometryError::AlphaOutOfRange(alpha));
        }
        let half = 0.5 * PI * alpha;
        // (1 + cos a pi)/sin a pi in its cancellation-free half-angle form
        let tau = half.cos() / half.sin();
        let theta0 = half + PI;
        let xi = [rho * theta0.cos(), rho * theta0.sin()];
        Ok(Self {
            alpha,
            rho,
            tau,
            xi,
            theta0,
            mu_alpha: half.sin(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// tau = (1 + cos alpha pi) / sin alpha pi.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The pole of the Möbius map; xi_2 < 0 and xi_1/xi_2 = tau.
    pub fn xi(&self) -> [f64; 2] {
        self.xi
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// 1/sqrt(1 + tau^2) = sin(alpha pi / 2); also the homothety factor
    /// between the unnormalized domain and the unit-disk pair.
    pub fn mu_alpha(&self) -> f64 {
        self.mu_alpha
    }

    fn dist2_to_xi(&self, q: [f64; 2]) -> f64 {
        let dx = q[0] - self.xi[0];
        let dy = q[1] - self.xi[1];
        dx * dx + dy * dy
    }

    /// Möbius map G(x, y); conformal away from xi, sends the cone onto the
    /// unnormalized disk pair.
    pub fn mobius_map(&self, q: [f64; 2]) -> Result<[f64; 2], GeometryError> {
        let den = self.dist2_to_xi(q);
        if den == 0.0 {
            return Err(GeometryError::PoleAtXi);
        }
        let r2 = self.rho * self.rho - q[0] * q[0] - q[1] * q[1];
        let im = 2.0 * (q[1] * self.xi[0] - q[0] * self.xi[1]);
        Ok([r2 / den, im / den])
    }

    /// The same map evaluated as -(z + xi)/(z - xi) in complex arithmetic;
    /// kept as an independent algebraic route for cross-checks.
    pub fn mobius_map_complex(&self, q: [f64; 2]) -> Result<[f64; 2], GeometryError> {
        let z = Complex64::new(q[0], q[1]);
        let xi = Complex64::new(self.xi[0], self.xi[1]);
        if z == xi {
            return Err(GeometryError::PoleAtXi);
        }
        let g = -(z + xi) / (z - xi);
        Ok([g.re, g.im])
    }

    /// Jacobian determinant of the Möbius map: 4|xi|^2/|z - xi|^4.
    pub fn mobius_jacobian(&self, q: [f64; 2]) -> Result<f64, GeometryError> {
        let den = self.dist2_to_xi(q);
        if den == 0.0 {
            return Err(GeometryError::PoleAtXi);
        }
        Ok(4.0 * self.rho * self.rho / (den * den))
    }

    /// The cone weight W(x, y) = ln(2|xi_2| / |z - xi|^2); the boundary
    /// condition on the cone reads `normal derivative = e^W phi`.
    pub fn cone_weight(&self, q: [f64; 2]) -> Result<f64, GeometryError> {
        let den = self.dist2_to_xi(q);
        if den == 0.0 {
            return Err(GeometryError::PoleAtXi);
        }
        Ok((2.0 * self.xi[1].abs() / den).ln())
    }

    /// First coordinate of G(F(q)): the Steklov eigenfunction `x` pulled
    /// back to the half-plane. Equals -rho * dU/drho pointwise. The pole of
    /// G is unreachable from the closed half-plane for alpha < 2.
    pub fn pullback_eigenfunction(&self, q: HalfPlanePoint) -> f64 {
        let p = power_map(self.alpha, q);
        self.mobius_map(p).expect("pole lies outside the closed cone")[0]
    }
}

/// Power map F(x, y) = (r^a cos(a theta), r^a sin(a theta)) with the
/// half-plane branch theta in [0, pi].
pub fn power_map(alpha: f64, q: HalfPlanePoint) -> [f64; 2] {
    let r = q.radius();
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let ra = r.powf(alpha);
    let at = alpha * q.angle();
    [ra * at.cos(), ra * at.sin()]
}

/// Inverse of [`power_map`] on the closed cone (origin excluded).
pub fn power_map_inv(alpha: f64, p: [f64; 2]) -> Result<HalfPlanePoint, GeometryError> {
    let rr = p[0].hypot(p[1]);
    if rr == 0.0 {
        return Err(GeometryError::OriginUndefined);
    }
    let mut phi = p[1].atan2(p[0]);
    if phi < 0.0 {
        // cone opens past pi when alpha > 1
        phi += 2.0 * PI;
    }
    if phi > alpha * PI + 1e-9 {
        return Err(GeometryError::OutsideCone(p[0], p[1]));
    }
    let theta = (phi / alpha).min(PI);
    let r = rr.powf(1.0 / alpha);
    HalfPlanePoint::new(r * theta.cos(), r * theta.sin())
        .map_err(|_| GeometryError::OutsideCone(p[0], p[1]))
}

/// Intersection or union of the two unit disks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainMode {
    Intersection,
    Union,
}

impl std::fmt::Display for DomainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainMode::Intersection => write!(f, "intersection"),
            DomainMode::Union => write!(f, "union"),
        }
    }
}

/// One circular arc of a domain boundary, traversed with increasing angle
/// (counterclockwise around its own circle, which matches counterclockwise
/// traversal of the domain boundary).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub angle_from: f64,
    pub angle_to: f64,
}

impl ArcSpec {
    pub fn length(&self) -> f64 {
        self.radius * (self.angle_to - self.angle_from)
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        [
            self.center[0] + self.radius * theta.cos(),
            self.center[1] + self.radius * theta.sin(),
        ]
    }
}

/// The normalized geometry: two unit disks centered (0, ±ell), joined as an
/// intersection (lens) or a union.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPairDomain {
    ell: f64,
    mode: DomainMode,
}

impl DiskPairDomain {
    pub fn new(ell: f64, mode: DomainMode) -> Result<Self, GeometryError> {
        if !(ell > 0.0 && ell < 1.0) {
            return Err(GeometryError::AlphaOutOfRange(ell));
        }
        Ok(Self { ell, mode })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn mode(&self) -> DomainMode {
        self.mode
    }

    /// The two corner points (±sqrt(1 - ell^2), 0) shared by both circles.
    pub fn corners(&self) -> [[f64; 2]; 2] {
        let x = (1.0 - self.ell * self.ell).sqrt();
        [[x, 0.0], [-x, 0.0]]
    }

    /// Boundary arcs in counterclockwise order starting at the right corner.
    pub fn arcs(&self) -> [ArcSpec; 2] {
        let a = self.ell.asin();
        match self.mode {
            DomainMode::Intersection => [
                // upper arc lies on the circle centered (0, -ell)
                ArcSpec {
                    center: [0.0, -self.ell],
                    radius: 1.0,
                    angle_from: a,
                    angle_to: PI - a,
                },
                ArcSpec {
                    center: [0.0, self.ell],
                    radius: 1.0,
                    angle_from: PI + a,
                    angle_to: 2.0 * PI - a,
                },
            ],
            DomainMode::Union => [
                // upper arc lies on the circle centered (0, +ell)
                ArcSpec {
                    center: [0.0, self.ell],
                    radius: 1.0,
                    angle_from: -a,
                    angle_to: PI + a,
                },
                ArcSpec {
                    center: [0.0, -self.ell],
                    radius: 1.0,
                    angle_from: PI - a,
                    angle_to: 2.0 * PI + a,
                },
            ],
        }
    }

    /// 2(pi - 2 asin ell) for the intersection, 2 pi + 4 asin ell for the
    /// union.
    pub fn perimeter(&self) -> f64 {
        let a = self.ell.asin();
        match self.mode {
            DomainMode::Intersection => 2.0 * (PI - 2.0 * a),
            DomainMode::Union => 2.0 * PI + 4.0 * a,
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let dm = p[0] * p[0] + (p[1] + self.ell) * (p[1] + self.ell);
        let dp = p[0] * p[0] + (p[1] - self.ell) * (p[1] - self.ell);
        match self.mode {
            DomainMode::Intersection => dm < 1.0 && dp < 1.0,
            DomainMode::Union => dm < 1.0 || dp < 1.0,
        }
    }

    /// Signed distance-like margin to the boundary: positive inside,
    /// negative outside, linear in the distance near the boundary.
    pub fn boundary_margin(&self, p: [f64; 2]) -> f64 {
        let dm = 1.0 - (p[0] * p[0] + (p[1] + self.ell) * (p[1] + self.ell)).sqrt();
        let dp = 1.0 - (p[0] * p[0] + (p[1] - self.ell) * (p[1] - self.ell)).sqrt();
        match self.mode {
            DomainMode::Intersection => dm.min(dp),
            DomainMode::Union => dm.max(dp),
        }
    }

    pub fn to_document(&self) -> DomainDocument {
        DomainDocument {
            version: 1,
            mode: self.mode,
            ell: self.ell,
            corners: self.corners(),
            arcs: self.arcs().to_vec(),
        }
    }

    pub fn from_document(doc: &DomainDocument) -> Result<Self, GeometryError> {
        Self::new(doc.ell, doc.mode)
    }
}

/// Versioned serialization of a disk-pair domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDocument {
    pub version: u32,
    pub mode: DomainMode,
    pub ell: f64,
    pub corners: [[f64; 2]; 2],
    pub arcs: Vec<ArcSpec>,
}

/// The unit-disk-pair domain carrying the distinguished eigenvalue 1 for a
/// given exponent: ell = |cos(alpha pi / 2)|, intersection iff alpha < 1.
pub fn normalized_domain(alpha: f64) -> Result<DiskPairDomain, GeometryError> {
    if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
        return Err(GeometryError::AlphaOutOfRange(alpha));
    }
    let ell = (0.5 * PI * alpha).cos().abs();
    let mode = if alpha < 1.0 {
        DomainMode::Intersection
    } else {
        DomainMode::Union
    };
    DiskPairDomain::new(ell, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn context_invariants() {
        for &alpha in &[0.2, 0.5, 2.0 / 3.0, 0.9, 1.1, 1.5, 1.9] {
            let ctx = ConformalContext::new(alpha).unwrap();
            let xi = ctx.xi();
            assert!(xi[1] < 0.0);
            assert_abs_diff_eq!(xi[0] / xi[1], ctx.tau(), epsilon = 1e-14);
            assert_abs_diff_eq!(xi[0].hypot(xi[1]), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(
                ctx.mu_alpha(),
                1.0 / (1.0 + ctx.tau() * ctx.tau()).sqrt(),
                epsilon = 1e-14
            );
            // the raw (1 + cos a pi)/sin a pi expression agrees away from 1
            let raw = (1.0 + (alpha * PI).cos()) / (alpha * PI).sin();
            assert_abs_diff_eq!(ctx.tau(), raw, epsilon = 1e-12);
        }
        assert!(ConformalContext::new(1.0).is_err());
        assert!(ConformalContext::new(2.0).is_err());
    }

    #[test]
    fn power_map_polar_substitution() {
        let q = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let p = power_map(0.5, q);
        let c = (PI / 4.0).cos();
        assert_abs_diff_eq!(p[0], c, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], c, epsilon = 1e-15);
    }

    #[test]
    fn power_map_fixes_positive_axis() {
        for &x in &[0.25, 1.0, 7.0] {
            let q = HalfPlanePoint::new(x, 0.0).unwrap();
            let p = power_map(0.7, q);
            assert_abs_diff_eq!(p[0], x.powf(0.7), epsilon = 1e-13);
            assert_eq!(p[1], 0.0);
        }
    }

    #[test]
    fn power_map_inverse_rejects_origin() {
        assert_eq!(
            power_map_inv(0.5, [0.0, 0.0]),
            Err(GeometryError::OriginUndefined)
        );
    }

    #[test]
    fn mobius_sends_origin_to_one() {
        let ctx = ConformalContext::new(0.5).unwrap();
        let g = ctx.mobius_map([0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-15);
        assert_eq!(ctx.mobius_map(ctx.xi()), Err(GeometryError::PoleAtXi));
    }

    #[test]
    fn real_axis_maps_onto_lower_circle() {
        // |G(x,0) + (0, xi1/xi2)|^2 = |xi|^2/xi2^2
        for &alpha in &[0.4, 0.75, 1.3, 1.8] {
            let ctx = ConformalContext::new(alpha).unwrap();
            let xi = ctx.xi();
            let target = xi[0].hypot(xi[1]).powi(2) / (xi[1] * xi[1]);
            for &x in &[-11.0, -2.0, -0.3, 0.0, 0.5, 1.0, 6.0] {
                let g = ctx.mobius_map([x, 0.0]).unwrap();
                let d2 = g[0] * g[0] + (g[1] + xi[0] / xi[1]) * (g[1] + xi[0] / xi[1]);
                assert_abs_diff_eq!(d2, target, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn upper_ray_maps_onto_upper_circle() {
        for &alpha in &[0.4, 1.6] {
            let ctx = ConformalContext::new(alpha).unwrap();
            let xi = ctx.xi();
            let target = xi[0].hypot(xi[1]).powi(2) / (xi[1] * xi[1]);
            let phi = PI * alpha;
            for &r in &[0.1, 0.5, 1.0, 2.0, 10.0] {
                let g = ctx.mobius_map([r * phi.cos(), r * phi.sin()]).unwrap();
                let d2 = g[0] * g[0] + (g[1] - xi[0] / xi[1]) * (g[1] - xi[0] / xi[1]);
                assert_abs_diff_eq!(d2, target, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_at_origin() {
        let ctx = ConformalContext::new(0.5).unwrap();
        assert_abs_diff_eq!(ctx.mobius_jacobian([0.0, 0.0]).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobian_weight_identity() {
        // JG = (|xi|^2/xi2^2) e^{2W} on a grid
        for &alpha in &[0.3, 0.8, 1.2, 1.7] {
            let ctx = ConformalContext::new(alpha).unwrap();
            let xi = ctx.xi();
            let factor = 1.0 / (xi[1] * xi[1]);
            for i in 0..7 {
                for j in 0..7 {
                    let q = [-2.0 + 0.7 * i as f64, -1.5 + 0.6 * j as f64];
                    let jg = ctx.mobius_jacobian(q).unwrap();
                    let w = ctx.cone_weight(q).unwrap();
                    assert_abs_diff_eq!(
                        jg,
                        factor * (2.0 * w).exp(),
                        epsilon = 1e-12 * jg.max(1.0)
                    );
                }
            }
        }
    }

    #[test]
    fn cone_weight_simple_point() {
        let ctx = ConformalContext::new(0.5).unwrap();
        let xi = ctx.xi();
        let w = ctx.cone_weight([xi[0], 0.0]).unwrap();
        assert_abs_diff_eq!(w, (2.0 / xi[1].abs()).ln(), epsilon = 1e-14);
    }

    #[test]
    fn normalized_domain_examples() {
        let d = normalized_domain(0.5).unwrap();
        assert_abs_diff_eq!(d.ell(), 0.5_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(d.mode(), DomainMode::Intersection);

        let d = normalized_domain(1.5).unwrap();
        assert_abs_diff_eq!(d.ell(), 0.5_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(d.mode(), DomainMode::Union);

        let d = normalized_domain(2.0 / 3.0).unwrap();
        assert_abs_diff_eq!(d.ell(), 0.5, epsilon = 1e-15);
        assert_eq!(d.mode(), DomainMode::Intersection);

        assert!(normalized_domain(1.0).is_err());
        assert!(normalized_domain(2.3).is_err());
    }

    #[test]
    fn perimeter_examples() {
        let d = DiskPairDomain::new(0.5, DomainMode::Intersection).unwrap();
        assert_abs_diff_eq!(d.perimeter(), 4.0 * PI / 3.0, epsilon = 1e-14);
        let d = DiskPairDomain::new(0.5, DomainMode::Union).unwrap();
        assert_abs_diff_eq!(d.perimeter(), 8.0 * PI / 3.0, epsilon = 1e-14);
        assert!(d.perimeter() > 2.0 * PI);
        // both modes limit to the unit circle as ell -> 0
        for mode in [DomainMode::Intersection, DomainMode::Union] {
            let d = DiskPairDomain::new(1e-9, mode).unwrap();
            assert_abs_diff_eq!(d.perimeter(), 2.0 * PI, epsilon = 1e-7);
        }
    }

    #[test]
    fn corners_lie_on_both_circles() {
        for mode in [DomainMode::Intersection, DomainMode::Union] {
            let d = DiskPairDomain::new(0.35, mode).unwrap();
            for c in d.corners() {
                let rm = c[0] * c[0] + (c[1] + d.ell()) * (c[1] + d.ell());
                let rp = c[0] * c[0] + (c[1] - d.ell()) * (c[1] - d.ell());
                assert_abs_diff_eq!(rm, 1.0, epsilon = 1e-14);
                assert_abs_diff_eq!(rp, 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn arcs_agree_with_perimeter_and_mode() {
        for (mode, ell) in [
            (DomainMode::Intersection, 0.3),
            (DomainMode::Union, 0.3),
            (DomainMode::Intersection, 0.8),
            (DomainMode::Union, 0.8),
        ] {
            let d = DiskPairDomain::new(ell, mode).unwrap();
            let total: f64 = d.arcs().iter().map(|a| a.length()).sum();
            assert_abs_diff_eq!(total, d.perimeter(), epsilon = 1e-13);
            // per-circle arc span matches pi -/+ 2 asin(ell)
            let span = d.arcs()[0].angle_to - d.arcs()[0].angle_from;
            let expect = match mode {
                DomainMode::Intersection => PI - 2.0 * ell.asin(),
                DomainMode::Union => PI + 2.0 * ell.asin(),
            };
            assert_abs_diff_eq!(span, expect, epsilon = 1e-14);
            // arc endpoints are the corners
            let arcs = d.arcs();
            let right = d.corners()[0];
            let start = arcs[0].point(arcs[0].angle_from);
            assert_abs_diff_eq!(start[0], right[0], epsilon = 1e-14);
            assert_abs_diff_eq!(start[1], right[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn document_round_trip() {
        let d = DiskPairDomain::new(0.42, DomainMode::Union).unwrap();
        let doc = d.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: DomainDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(doc, back);
        assert_eq!(DiskPairDomain::from_document(&back).unwrap(), d);
    }

    #[test]
    fn pullback_simple_values() {
        let ctx = ConformalContext::new(0.5).unwrap();
        let q = HalfPlanePoint::new(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(ctx.pullback_eigenfunction(q), 1.0, epsilon = 1e-14);
        // points with (x^2+y^2)^alpha = rho^2 are zeros
        let r = 1.0; // rho = 1: the unit circle
        let q = HalfPlanePoint::new(r * 0.6, r * 0.8).unwrap();
        assert_abs_diff_eq!(ctx.pullback_eigenfunction(q), 0.0, epsilon = 1e-14);
    }
}
