//! Nyström assembly of the single-layer and adjoint-double-layer operators
//! on piecewise-circular boundaries.
//!
//! Circular arcs make the kernels unusually tractable: between points of
//! the same circle the adjoint double layer is exactly -1/(4 pi R), and the
//! single layer splits into an exact log-moment part plus an analytic
//! remainder. Only cross-circle interactions near a corner need adaptive
//! quadrature.

use faer::Mat;
use std::f64::consts::PI;

use super::mesh::BoundaryDiscretization;
use super::SolverError;
use crate::linalg;
use crate::parallel::par_map_range;
use crate::quadrature::{adaptive_gk, legendre_all, log_moments};

/// Product integration is used up to this |s0| (target in panel-local
/// coordinates); beyond it the forward moment recursion loses accuracy and
/// adaptive quadrature takes over until the kernel is smooth enough for
/// the plain rule.
const MOMENT_CUT: f64 = 1.4;
const ADAPTIVE_CUT: f64 = 4.0;
/// Cross-circle interactions closer than this many panel lengths are
/// integrated adaptively.
const NEAR_FACTOR: f64 = 2.0;
/// Target absolute error of an assembled matrix entry; the adaptive
/// tolerance per panel is this divided by the panel's length scale.
const ENTRY_TOL: f64 = 5e-14;

fn adaptive_tol(scale: f64) -> f64 {
    (ENTRY_TOL / scale.max(1e-300)).clamp(1e-13, 1e-3)
}

/// Dense single-layer (`v`) and adjoint-double-layer (`kp`) matrices.
pub struct Layers {
    pub v: Mat<f64>,
    pub kp: Mat<f64>,
}

/// Modal-from-nodal transform: row k holds (2k+1)/2 * w_q * P_k(x_q).
fn modal_matrix(b: &BoundaryDiscretization) -> Vec<Vec<f64>> {
    let p = b.panel_order();
    let mut c = vec![vec![0.0; p]; p];
    for q in 0..p {
        let pk = legendre_all(p - 1, b.gl.nodes[q]);
        for k in 0..p {
            c[k][q] = (2.0 * k as f64 + 1.0) / 2.0 * b.gl.weights[q] * pk[k];
        }
    }
    c
}

fn wrap_angle(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

/// ln(2 R |sin(d/2)| / |d|), the analytic part of the same-circle log
/// kernel; equals ln R at d = 0.
fn smooth_log_part(radius: f64, d: f64) -> f64 {
    if d.abs() < 1e-4 {
        radius.ln() - d * d / 24.0
    } else {
        (2.0 * radius * (0.5 * d).sin().abs() / d.abs()).ln()
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Distance from a point to a circular arc segment.
fn dist_to_panel(q: [f64; 2], panel: &super::mesh::Panel) -> f64 {
    let dx = q[0] - panel.center[0];
    let dy = q[1] - panel.center[1];
    let r = dx.hypot(dy);
    let phi = dy.atan2(dx);
    // shift phi by 2 pi into the vicinity of the panel interval
    let mid = panel.mid();
    let phi = phi + 2.0 * PI * ((mid - phi) / (2.0 * PI)).round();
    if phi >= panel.theta0 && phi <= panel.theta1 {
        (r - panel.radius).abs()
    } else {
        let p0 = panel.point(panel.theta0);
        let p1 = panel.point(panel.theta1);
        dist(q, p0).min(dist(q, p1))
    }
}

/// Assemble both layer matrices.
pub fn assemble_layers(b: &BoundaryDiscretization) -> Layers {
    let n = b.node_count();
    let p = b.panel_order();
    let modal = modal_matrix(b);

    let rows = par_map_range(n, |i| {
        let xi = b.pos[i];
        let ni = b.normal[i];
        let own_panel = &b.panels[b.panel_of[i]];
        let my_circle = own_panel.arc;
        let my_theta = b.theta[i];
        let mut row_v = vec![0.0; n];
        let mut row_k = vec![0.0; n];

        for (pi, panel) in b.panels.iter().enumerate() {
            let base = pi * p;
            let radius = panel.radius;
            let hw = panel.half_width();
            let scale = radius * hw / (2.0 * PI);
            if panel.arc == my_circle {
                // adjoint double layer between same-circle points is the
                // constant -1/(4 pi R)
                for q in 0..p {
                    row_k[base + q] = -b.weight[base + q] / (4.0 * PI * radius);
                }
                let dc = wrap_angle(my_theta - panel.mid());
                let s0 = dc / hw;
                if s0.abs() <= MOMENT_CUT {
                    let m = log_moments(p, s0);
                    for q in 0..p {
                        let delta = dc - hw * b.gl.nodes[q];
                        let mut log_part = 0.0;
                        for k in 0..p {
                            log_part += m[k] * modal[k][q];
                        }
                        let smooth =
                            b.gl.weights[q] * (hw.ln() + smooth_log_part(radius, delta));
                        row_v[base + q] = -scale * (log_part + smooth);
                    }
                } else if s0.abs() <= ADAPTIVE_CUT {
                    let f = |s: f64, out: &mut [f64]| {
                        let delta = dc - hw * s;
                        let kernel = (2.0 * radius * (0.5 * delta).sin().abs()).ln();
                        let pk = legendre_all(p - 1, s);
                        for k in 0..p {
                            out[k] = kernel * pk[k];
                        }
                    };
                    let ik = adaptive_gk(&f, -1.0, 1.0, p, adaptive_tol(scale));
                    for q in 0..p {
                        let mut acc = 0.0;
                        for k in 0..p {
                            acc += ik[k] * modal[k][q];
                        }
                        row_v[base + q] = -scale * acc;
                    }
                } else {
                    for q in 0..p {
                        let j = base + q;
                        row_v[j] = -b.weight[j] / (2.0 * PI) * dist(xi, b.pos[j]).ln();
                    }
                }
            } else if dist_to_panel(xi, panel) <= NEAR_FACTOR * panel.arc_length() {
                // near-corner cross-circle block: adaptive product
                // integration for both kernels at once
                let f = |s: f64, out: &mut [f64]| {
                    let th = panel.mid() + hw * s;
                    let y = panel.point(th);
                    let dx = xi[0] - y[0];
                    let dy = xi[1] - y[1];
                    let d2 = dx * dx + dy * dy;
                    let lnk = 0.5 * d2.ln();
                    let kpk = (dx * ni[0] + dy * ni[1]) / d2;
                    let pk = legendre_all(p - 1, s);
                    for k in 0..p {
                        out[k] = lnk * pk[k];
                        out[p + k] = kpk * pk[k];
                    }
                };
                let ik = adaptive_gk(&f, -1.0, 1.0, 2 * p, adaptive_tol(scale));
                for q in 0..p {
                    let mut acc_v = 0.0;
                    let mut acc_k = 0.0;
                    for k in 0..p {
                        acc_v += ik[k] * modal[k][q];
                        acc_k += ik[p + k] * modal[k][q];
                    }
                    row_v[base + q] = -scale * acc_v;
                    row_k[base + q] = -scale * acc_k;
                }
            } else {
                for q in 0..p {
                    let j = base + q;
                    let dx = xi[0] - b.pos[j][0];
                    let dy = xi[1] - b.pos[j][1];
                    let d2 = dx * dx + dy * dy;
                    let w = b.weight[j] / (2.0 * PI);
                    row_v[j] = -w * 0.5 * d2.ln();
                    row_k[j] = -w * (dx * ni[0] + dy * ni[1]) / d2;
                }
            }
        }
        (row_v, row_k)
    });

    let mut v = Mat::zeros(n, n);
    let mut kp = Mat::zeros(n, n);
    for (i, (rv, rk)) in rows.into_iter().enumerate() {
        for j in 0..n {
            v[(i, j)] = rv[j];
            kp[(i, j)] = rk[j];
        }
    }
    Layers { v, kp }
}

/// The discrete Dirichlet-to-Neumann operator together with the density
/// solve it is built from.
pub struct DtnOperator {
    pub(crate) lambda: Mat<f64>,
    sigma_from_trace: Mat<f64>,
    const_from_trace: Vec<f64>,
}

impl DtnOperator {
    /// Apply the DtN map to a boundary trace.
    pub fn apply(&self, trace: &[f64]) -> Vec<f64> {
        mat_vec(&self.lambda, trace)
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.lambda
    }

    /// Single-layer density and additive constant representing the
    /// harmonic extension of `trace`.
    pub fn representation(&self, trace: &[f64]) -> (Vec<f64>, f64) {
        let sigma = mat_vec(&self.sigma_from_trace, trace);
        let c = self
            .const_from_trace
            .iter()
            .zip(trace)
            .map(|(a, b)| a * b)
            .sum();
        (sigma, c)
    }

    /// Relative residual of the coordinate trace under the DtN map; the
    /// trace of x is an exact eigenfunction with eigenvalue 1/scale on
    /// every disk-pair domain scaled by `scale`.
    pub fn coordinate_residual(&self, b: &BoundaryDiscretization) -> f64 {
        let t = b.coordinate_trace();
        let lt = self.apply(&t);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..t.len() {
            let d = lt[i] - t[i] / b.scale();
            num += b.weight[i] * d * d;
            den += b.weight[i] * t[i] * t[i] / (b.scale() * b.scale());
        }
        (num / den).sqrt()
    }
}

fn mat_vec(m: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let (r, c) = (m.nrows(), m.ncols());
    assert_eq!(c, x.len());
    let mut out = vec![0.0; r];
    for i in 0..r {
        let mut acc = 0.0;
        for j in 0..c {
            acc += m[(i, j)] * x[j];
        }
        out[i] = acc;
    }
    out
}

/// Build the DtN operator: solve the bordered single-layer system for the
/// density, then take the interior normal-derivative trace.
pub fn assemble_dtn(b: &BoundaryDiscretization) -> Result<DtnOperator, SolverError> {
    let n = b.node_count();
    let layers = assemble_layers(b);

    // bordered system [V 1; w^T 0] handles the logarithmic-capacity kernel
    let mut bordered = Mat::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            bordered[(i, j)] = layers.v[(i, j)];
        }
        bordered[(i, n)] = 1.0;
        bordered[(n, i)] = b.weight[i];
    }
    let rhs = Mat::from_fn(n + 1, n, |i, j| if i == j { 1.0 } else { 0.0 });
    let x = linalg::solve_multi(&bordered, &rhs);
    let sigma_from_trace = x.as_ref().submatrix(0, 0, n, n).to_owned();
    let const_from_trace: Vec<f64> = (0..n).map(|j| x[(n, j)]).collect();

    // interior normal derivative of the single layer: (I/2 + K') sigma
    let mut a = layers.kp;
    for i in 0..n {
        a[(i, i)] += 0.5;
    }
    let lambda = linalg::mat_mul(&a, &sigma_from_trace);

    Ok(DtnOperator {
        lambda,
        sigma_from_trace,
        const_from_trace,
    })
}
