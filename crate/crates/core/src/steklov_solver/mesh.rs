//! Boundary discretization: corner-graded panels on circular arcs with
//! Gauss–Legendre nodes, laid out symmetrically so both reflections act as
//! index permutations on the node set.

use crate::conformal_geometry::{ArcSpec, DiskPairDomain, DomainMode};
use crate::quadrature::GaussLegendre;
use std::f64::consts::PI;

use super::SolverError;

/// Admissible half-distance range for disk pairs; outside it the corner
/// geometry degenerates and the unit-disk reference takes over.
pub const ELL_MIN: f64 = 0.02;
pub const ELL_MAX: f64 = 0.98;

/// Domain selector for the solver: the unit disk reference or a disk pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    UnitDisk,
    Pair(DiskPairDomain),
}

impl DomainSpec {
    pub fn mode_name(&self) -> &'static str {
        match self {
            DomainSpec::UnitDisk => "disk",
            DomainSpec::Pair(d) => match d.mode() {
                DomainMode::Intersection => "intersection",
                DomainMode::Union => "union",
            },
        }
    }

    pub fn ell(&self) -> f64 {
        match self {
            DomainSpec::UnitDisk => 0.0,
            DomainSpec::Pair(d) => d.ell(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            DomainSpec::UnitDisk => 2.0 * PI,
            DomainSpec::Pair(d) => d.perimeter(),
        }
    }

    fn arcs(&self) -> Vec<ArcSpec> {
        match self {
            DomainSpec::UnitDisk => vec![ArcSpec {
                center: [0.0, 0.0],
                radius: 1.0,
                angle_from: -0.5 * PI,
                angle_to: 1.5 * PI,
            }],
            DomainSpec::Pair(d) => d.arcs().to_vec(),
        }
    }
}

/// One panel: a parameter subinterval of an arc.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub arc: usize,
    pub center: [f64; 2],
    pub radius: f64,
    pub theta0: f64,
    pub theta1: f64,
}

impl Panel {
    pub fn mid(&self) -> f64 {
        0.5 * (self.theta0 + self.theta1)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.theta1 - self.theta0)
    }

    pub fn arc_length(&self) -> f64 {
        self.radius * (self.theta1 - self.theta0)
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        [
            self.center[0] + self.radius * theta.cos(),
            self.center[1] + self.radius * theta.sin(),
        ]
    }
}

/// Panel/node/weight layout on the boundary, with reflection permutations.
/// Nodes are stored in counterclockwise boundary order.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    domain: DomainSpec,
    scale: f64,
    n_per_arc: usize,
    grading: f64,
    panel_order: usize,
    pub(crate) panels: Vec<Panel>,
    pub(crate) pos: Vec<[f64; 2]>,
    pub(crate) normal: Vec<[f64; 2]>,
    pub(crate) weight: Vec<f64>,
    pub(crate) theta: Vec<f64>,
    pub(crate) panel_of: Vec<usize>,
    pub(crate) perm_x: Vec<usize>,
    pub(crate) perm_y: Vec<usize>,
    pub(crate) gl: GaussLegendre,
}

pub const DEFAULT_PANEL_ORDER: usize = 12;

/// Symmetric two-sided graded partition point: fraction of the arc at
/// parameter s in [0, 1]. Algebraic of exponent `q` at both ends, chosen
/// so the first panel of an n-panel partition is below (1/n)^q.
fn graded_point(s: f64, q: f64) -> f64 {
    let half = |xi: f64| -> f64 {
        let c = q * 2.0_f64.powf(q);
        let num = xi.powf(q);
        num / (num + c * (1.0 - xi))
    };
    if s <= 0.5 {
        0.5 * half(2.0 * s)
    } else {
        1.0 - 0.5 * half(2.0 * (1.0 - s))
    }
}

/// Discretize with the default panel order.
pub fn discretize(
    domain: &DomainSpec,
    n_per_arc: usize,
    grading: f64,
) -> Result<BoundaryDiscretization, SolverError> {
    discretize_full(domain, n_per_arc, grading, DEFAULT_PANEL_ORDER, 1.0)
}

/// Discretize a homothetic copy (all lengths multiplied by `scale`).
pub fn discretize_scaled(
    domain: &DomainSpec,
    n_per_arc: usize,
    grading: f64,
    scale: f64,
) -> Result<BoundaryDiscretization, SolverError> {
    discretize_full(domain, n_per_arc, grading, DEFAULT_PANEL_ORDER, scale)
}

pub fn discretize_full(
    domain: &DomainSpec,
    n_per_arc: usize,
    grading: f64,
    panel_order: usize,
    scale: f64,
) -> Result<BoundaryDiscretization, SolverError> {
    if n_per_arc < 8 {
        return Err(SolverError::InvalidParam(format!(
            "n_per_arc must be >= 8, got {n_per_arc}"
        )));
    }
    if n_per_arc % 2 != 0 {
        return Err(SolverError::InvalidParam(format!(
            "n_per_arc must be even for the symmetric layout, got {n_per_arc}"
        )));
    }
    if !(2.0..=16.0).contains(&grading) {
        return Err(SolverError::InvalidParam(format!(
            "grading exponent must lie in [2, 16], got {grading}"
        )));
    }
    if !(4..=32).contains(&panel_order) {
        return Err(SolverError::InvalidParam(format!(
            "panel_order must lie in [4, 32], got {panel_order}"
        )));
    }
    if !(scale > 0.0) {
        return Err(SolverError::InvalidParam("scale must be positive".into()));
    }
    if let DomainSpec::Pair(d) = domain {
        if !(ELL_MIN..=ELL_MAX).contains(&d.ell()) {
            return Err(SolverError::DegenerateDomain(d.ell()));
        }
    }

    let arcs = domain.arcs();
    let gl = GaussLegendre::new(panel_order);
    let graded = matches!(domain, DomainSpec::Pair(_));

    let mut panels = Vec::with_capacity(arcs.len() * n_per_arc);
    for (ai, arc) in arcs.iter().enumerate() {
        let span = arc.angle_to - arc.angle_from;
        for j in 0..n_per_arc {
            let (u0, u1) = if graded {
                (
                    graded_point(j as f64 / n_per_arc as f64, grading),
                    graded_point((j + 1) as f64 / n_per_arc as f64, grading),
                )
            } else {
                (j as f64 / n_per_arc as f64, (j + 1) as f64 / n_per_arc as f64)
            };
            panels.push(Panel {
                arc: ai,
                center: [arc.center[0] * scale, arc.center[1] * scale],
                radius: arc.radius * scale,
                theta0: arc.angle_from + span * u0,
                theta1: arc.angle_from + span * u1,
            });
        }
    }

    let p = panel_order;
    let n_nodes = panels.len() * p;
    let mut pos = Vec::with_capacity(n_nodes);
    let mut normal = Vec::with_capacity(n_nodes);
    let mut weight = Vec::with_capacity(n_nodes);
    let mut theta = Vec::with_capacity(n_nodes);
    let mut panel_of = Vec::with_capacity(n_nodes);
    for (pi, panel) in panels.iter().enumerate() {
        let c = panel.mid();
        let h = panel.half_width();
        for q in 0..p {
            let th = c + h * gl.nodes[q];
            pos.push(panel.point(th));
            normal.push([th.cos(), th.sin()]);
            weight.push(panel.radius * h * gl.weights[q]);
            theta.push(th);
            panel_of.push(pi);
        }
    }

    // reflections as index permutations
    let n = n_per_arc;
    let arcs_count = arcs.len();
    let idx = |a: usize, j: usize, q: usize| (a * n + j) * p + q;
    let mut perm_x = vec![0usize; n_nodes];
    let mut perm_y = vec![0usize; n_nodes];
    for a in 0..arcs_count {
        for j in 0..n {
            for q in 0..p {
                let i = idx(a, j, q);
                if arcs_count == 2 {
                    perm_x[i] = idx(a, n - 1 - j, p - 1 - q);
                    perm_y[i] = idx(1 - a, n - 1 - j, p - 1 - q);
                } else {
                    perm_x[i] = idx(0, n - 1 - j, p - 1 - q);
                    perm_y[i] = idx(0, (3 * n / 2 - 1 - j) % n, p - 1 - q);
                }
            }
        }
    }

    let b = BoundaryDiscretization {
        domain: *domain,
        scale,
        n_per_arc,
        grading,
        panel_order,
        panels,
        pos,
        normal,
        weight,
        theta,
        panel_of,
        perm_x,
        perm_y,
        gl,
    };
    debug_assert!(b.check_mirror_layout());
    Ok(b)
}

impl BoundaryDiscretization {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn n_per_arc(&self) -> usize {
        self.n_per_arc
    }

    pub fn grading_exponent(&self) -> f64 {
        self.grading
    }

    pub fn panel_order(&self) -> usize {
        self.panel_order
    }

    pub fn node_count(&self) -> usize {
        self.pos.len()
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.pos
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normal
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn perm_x(&self) -> &[usize] {
        &self.perm_x
    }

    pub fn perm_y(&self) -> &[usize] {
        &self.perm_y
    }

    pub fn total_weight(&self) -> f64 {
        self.weight.iter().sum()
    }

    pub fn smallest_panel_arc_length(&self) -> f64 {
        self.panels
            .iter()
            .map(Panel::arc_length)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn largest_panel_arc_length(&self) -> f64 {
        self.panels.iter().map(Panel::arc_length).fold(0.0, f64::max)
    }

    /// A two-thirds-resolution layout of the same domain, used for
    /// a-posteriori error estimates.
    pub fn coarsened(&self) -> Result<Self, SolverError> {
        let mut n = (2 * self.n_per_arc / 3).max(8);
        if n % 2 == 1 {
            n += 1;
        }
        discretize_full(&self.domain, n, self.grading, self.panel_order, self.scale)
    }

    /// Trace of the coordinate function x at the nodes.
    pub fn coordinate_trace(&self) -> Vec<f64> {
        self.pos.iter().map(|p| p[0]).collect()
    }

    fn check_mirror_layout(&self) -> bool {
        let tol = 1e-12 * self.scale.max(1.0);
        self.pos.iter().enumerate().all(|(i, p)| {
            let mx = self.pos[self.perm_x[i]];
            let my = self.pos[self.perm_y[i]];
            (mx[0] + p[0]).abs() < tol
                && (mx[1] - p[1]).abs() < tol
                && (my[0] - p[0]).abs() < tol
                && (my[1] + p[1]).abs() < tol
                && (self.weight[self.perm_x[i]] - self.weight[i]).abs() < tol
                && (self.weight[self.perm_y[i]] - self.weight[i]).abs() < tol
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lens(ell: f64) -> DomainSpec {
        DomainSpec::Pair(DiskPairDomain::new(ell, DomainMode::Intersection).unwrap())
    }

    fn union(ell: f64) -> DomainSpec {
        DomainSpec::Pair(DiskPairDomain::new(ell, DomainMode::Union).unwrap())
    }

    #[test]
    fn disk_mesh_is_uniform_with_exact_weight() {
        let b = discretize(&DomainSpec::UnitDisk, 64, 3.0).unwrap();
        assert_abs_diff_eq!(b.total_weight(), 2.0 * PI, epsilon = 1e-12);
        let lens: Vec<f64> = b.panels().iter().map(Panel::arc_length).collect();
        for l in &lens {
            assert_abs_diff_eq!(*l, 2.0 * PI / 64.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn pair_mesh_weight_matches_perimeter() {
        for d in [lens(0.5), union(0.5), lens(0.9), union(0.13)] {
            let b = discretize(&d, 64, 3.0).unwrap();
            assert_abs_diff_eq!(
                b.total_weight(),
                d.perimeter(),
                epsilon = 1e-10 * d.perimeter()
            );
        }
    }

    #[test]
    fn grading_bound_on_smallest_panel() {
        for n in [16usize, 32, 64] {
            for &q in &[2.0, 3.0, 4.0] {
                let b = discretize(&lens(0.5), n, q).unwrap();
                let arc_len = b.domain().perimeter() / 2.0;
                let bound = (1.0 / n as f64).powf(q) * arc_len;
                assert!(
                    b.smallest_panel_arc_length() <= bound,
                    "n={n} q={q}: {} > {}",
                    b.smallest_panel_arc_length(),
                    bound
                );
            }
        }
    }

    #[test]
    fn panel_sizes_increase_away_from_corners() {
        let b = discretize(&lens(0.4), 32, 3.0).unwrap();
        let lens_sizes: Vec<f64> = b.panels()[0..16].iter().map(Panel::arc_length).collect();
        for w in lens_sizes.windows(2) {
            assert!(w[1] >= w[0] * 0.999);
        }
    }

    #[test]
    fn nodes_sit_on_their_circles() {
        let b = discretize(&union(0.35), 24, 3.0).unwrap();
        for (i, p) in b.positions().iter().enumerate() {
            let panel = &b.panels[b.panel_of[i]];
            let r = (p[0] - panel.center[0]).hypot(p[1] - panel.center[1]);
            assert_abs_diff_eq!(r, panel.radius, epsilon = 1e-14);
        }
    }

    #[test]
    fn degenerate_and_invalid_inputs_rejected() {
        assert!(matches!(
            discretize(&lens(0.01), 32, 3.0),
            Err(SolverError::DegenerateDomain(_))
        ));
        assert!(matches!(
            discretize(&lens(0.99), 32, 3.0),
            Err(SolverError::DegenerateDomain(_))
        ));
        assert!(discretize(&lens(0.5), 6, 3.0).is_err());
        assert!(discretize(&lens(0.5), 9, 3.0).is_err());
        assert!(discretize(&lens(0.5), 32, 1.0).is_err());
    }

    #[test]
    fn mirror_permutations_are_involutions() {
        for d in [lens(0.3), union(0.7), DomainSpec::UnitDisk] {
            let b = discretize(&d, 16, 3.0).unwrap();
            for i in 0..b.node_count() {
                assert_eq!(b.perm_x[b.perm_x[i]], i);
                assert_eq!(b.perm_y[b.perm_y[i]], i);
                assert_ne!(b.perm_x[i], i);
                assert_ne!(b.perm_y[i], i);
                // x then y commutes
                assert_eq!(b.perm_x[b.perm_y[i]], b.perm_y[b.perm_x[i]]);
            }
        }
    }

    #[test]
    fn scaled_mesh_scales_weight() {
        let b = discretize_scaled(&lens(0.5), 16, 3.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            b.total_weight(),
            2.0 * lens(0.5).perimeter(),
            epsilon = 1e-10
        );
    }
}
