//! Eigensolves on top of the discrete DtN operator: full spectra, parity
//! sectors, symmetry classification, nodal counting, and interior
//! evaluation of eigenfunctions.
//!
//! The Nyström DtN matrix is similarity-balanced by the square roots of
//! the quadrature weights and handed to a dense real eigensolver as is.
//! Symmetrizing it first looks tempting but biases corner-domain
//! eigenvalues at the size of the (non-vanishing) adjointness defect near
//! the corners; the nonsymmetric spectrum converges cleanly instead.

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::assembly::{assemble_dtn, DtnOperator};
use super::mesh::BoundaryDiscretization;
use super::SolverError;

/// Parity class under the reflections x -> -x and y -> -y. The first
/// letter is the x-parity: `Oe` is odd in x, even in y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryLabel {
    Ee,
    Eo,
    Oe,
    Oo,
    Mixed,
}

impl std::fmt::Display for SymmetryLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SymmetryLabel::Ee => "ee",
            SymmetryLabel::Eo => "eo",
            SymmetryLabel::Oe => "oe",
            SymmetryLabel::Oo => "oo",
            SymmetryLabel::Mixed => "mixed",
        };
        write!(f, "{s}")
    }
}

/// A parity sector: signs of the two reflections (+1 even, -1 odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Ee,
    Eo,
    Oe,
    Oo,
}

impl Sector {
    pub fn signs(&self) -> (f64, f64) {
        match self {
            Sector::Ee => (1.0, 1.0),
            Sector::Eo => (1.0, -1.0),
            Sector::Oe => (-1.0, 1.0),
            Sector::Oo => (-1.0, -1.0),
        }
    }

    pub fn label(&self) -> SymmetryLabel {
        match self {
            Sector::Ee => SymmetryLabel::Ee,
            Sector::Eo => SymmetryLabel::Eo,
            Sector::Oe => SymmetryLabel::Oe,
            Sector::Oo => SymmetryLabel::Oo,
        }
    }

    pub const ALL: [Sector; 4] = [Sector::Ee, Sector::Eo, Sector::Oe, Sector::Oo];
}

/// Sorted Steklov eigenvalues with boundary-trace eigenvectors.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Boundary traces at the nodes, L2(boundary)-normalized, one per
    /// eigenvalue, in boundary node order.
    pub eigenvectors: Vec<Vec<f64>>,
    pub symmetry_labels: Vec<SymmetryLabel>,
    /// Consecutive differences of the eigenvalues.
    pub gaps: Vec<f64>,
    /// A-posteriori accuracy estimate from comparing two resolutions.
    pub est_error: f64,
}

impl SteklovSpectrum {
    /// Declares an eigenvalue simple when the gap to both neighbors
    /// exceeds `gap_tol`.
    pub fn is_simple(&self, idx: usize, gap_tol: f64) -> bool {
        let below = idx == 0 || self.eigenvalues[idx] - self.eigenvalues[idx - 1] > gap_tol;
        let above = idx + 1 >= self.eigenvalues.len()
            || self.eigenvalues[idx + 1] - self.eigenvalues[idx] > gap_tol;
        below && above
    }

    /// Number of eigenvalues within `window` of `value`.
    pub fn multiplicity_near(&self, value: f64, window: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&m| (m - value).abs() <= window)
            .count()
    }

    pub fn to_document(&self, b: &BoundaryDiscretization, tol: f64) -> SpectrumDocument {
        SpectrumDocument {
            domain: DomainSummary {
                mode: b.domain().mode_name().to_string(),
                ell: b.domain().ell(),
            },
            n_per_arc: b.n_per_arc(),
            tol,
            eigenvalues: self.eigenvalues.clone(),
            labels: self.symmetry_labels.iter().map(|l| l.to_string()).collect(),
            gaps: self.gaps.clone(),
            est_error: self.est_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub mode: String,
    pub ell: f64,
}

/// JSON form of a computed spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub domain: DomainSummary,
    pub n_per_arc: usize,
    pub tol: f64,
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<String>,
    pub gaps: Vec<f64>,
    pub est_error: f64,
}

/// W^{1/2} Λ W^{-1/2}: similar to the DtN matrix, with row/column scales
/// balanced by the quadrature weights.
fn balanced_operator(b: &BoundaryDiscretization, dtn: &DtnOperator) -> Mat<f64> {
    let n = b.node_count();
    let sqrt_w: Vec<f64> = b.weight.iter().map(|w| w.sqrt()).collect();
    let lam = dtn.matrix();
    Mat::from_fn(n, n, |i, j| lam[(i, j)] * sqrt_w[i] / sqrt_w[j])
}

/// Dense eigensolve of the (nearly symmetric) balanced operator. Returns
/// the k smallest eigenvalues by real part, eigenvectors still in the
/// W^{1/2} coordinates, and the largest imaginary part encountered.
fn eig_smallest_k(
    a: &Mat<f64>,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64), SolverError> {
    let n = a.nrows();
    let evd = crate::linalg::eigen_real(a)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| evd.S()[x].re.total_cmp(&evd.S()[y].re));
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    let mut max_imag: f64 = 0.0;
    // conjugate pairs share a column pair; take the real part for one
    // member and the imaginary part for the other
    let mut used_real: Vec<bool> = vec![false; n];
    for (rank, &col) in order.iter().enumerate().take(k) {
        let lam = evd.S()[col];
        max_imag = max_imag.max(lam.im.abs());
        let take_imag = lam.im != 0.0 && rank > 0 && {
            let prev = order[rank - 1];
            used_real[prev] && (evd.S()[prev].re - lam.re).abs() == 0.0
        };
        let v: Vec<f64> = (0..n)
            .map(|i| {
                let u = evd.U()[(i, col)];
                if take_imag {
                    u.im
                } else {
                    u.re
                }
            })
            .collect();
        used_real[col] = true;
        vals.push(lam.re);
        vecs.push(v);
    }
    Ok((vals, vecs, max_imag))
}

/// Eigenvalues within this relative distance are treated as one cluster
/// when orthonormalizing eigenvectors.
const CLUSTER_GAP: f64 = 1e-7;

fn solve_full(
    b: &BoundaryDiscretization,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64), SolverError> {
    let dtn = assemble_dtn(b)?;
    let a = balanced_operator(b, &dtn);
    let (vals, raw, max_imag) = eig_smallest_k(&a, k)?;
    let traces = lift_vectors(b, &vals, raw);
    Ok((vals, traces, max_imag))
}

/// Map W^{1/2}-space eigenvectors to boundary traces: scale by W^{-1/2},
/// orthonormalize inside degenerate clusters, normalize in L2(boundary),
/// and fix signs deterministically.
fn lift_vectors(
    b: &BoundaryDiscretization,
    vals: &[f64],
    mut vecs: Vec<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let n = b.node_count();
    for v in vecs.iter_mut() {
        for i in 0..n {
            v[i] /= b.weight[i].sqrt();
        }
        let nrm = w_dot(b, v, v).sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|x| *x /= nrm);
        }
    }
    // w-orthonormalize runs of (numerically) equal eigenvalues
    let mut start = 0;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len()
            && vals[end] - vals[end - 1] <= CLUSTER_GAP * vals[end].abs().max(1.0)
        {
            end += 1;
        }
        for i in start..end {
            for j in start..i {
                let dot = w_dot(b, &vecs[i], &vecs[j]);
                let (vi, vj) = borrow_two(&mut vecs, i, j);
                for t in 0..n {
                    vi[t] -= dot * vj[t];
                }
            }
            let nrm = w_dot(b, &vecs[i], &vecs[i]).sqrt();
            if nrm > 0.0 {
                vecs[i].iter_mut().for_each(|x| *x /= nrm);
            }
        }
        start = end;
    }
    for v in vecs.iter_mut() {
        fix_sign(v, b);
    }
    vecs
}

fn w_dot(b: &BoundaryDiscretization, x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(&b.weight)
        .map(|((a, c), w)| w * a * c)
        .sum()
}

fn borrow_two<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert!(i != j);
    if i > j {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &lo[j])
    } else {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &hi[0])
    }
}

/// Deterministic eigenvector sign: positive moment against the coordinate
/// trace when that moment is nonzero, else positive first node.
fn fix_sign(v: &mut [f64], b: &BoundaryDiscretization) {
    let mut m = 0.0;
    for i in 0..v.len() {
        m += v[i] * b.pos[i][0] * b.weight[i];
    }
    let s = if m.abs() > 1e-8 {
        m.signum()
    } else if v[0] != 0.0 {
        v[0].signum()
    } else {
        1.0
    };
    if s < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// First `k` Steklov eigenvalues and boundary eigenvectors, with an
/// a-posteriori error estimate from a half-resolution solve. Fails with
/// `NotConverged` when the two resolutions disagree by more than `tol`.
pub fn compute_spectrum(
    b: &BoundaryDiscretization,
    k: usize,
    tol: f64,
) -> Result<SteklovSpectrum, SolverError> {
    check_k(b, k)?;
    let (mus, traces, imag) = solve_full(b, k)?;
    let coarse = b.coarsened()?;
    let (mus_c, _, imag_c) = solve_full(&coarse, k.min(coarse.node_count() / 4))?;
    finish_spectrum(b, mus, traces, &mus_c, imag.max(imag_c), tol)
}

fn check_k(b: &BoundaryDiscretization, k: usize) -> Result<(), SolverError> {
    if k == 0 || k > b.node_count() / 4 {
        return Err(SolverError::InvalidParam(format!(
            "k must lie in 1..={} for this mesh, got {k}",
            b.node_count() / 4
        )));
    }
    Ok(())
}

fn finish_spectrum(
    b: &BoundaryDiscretization,
    mut mus: Vec<f64>,
    traces: Vec<Vec<f64>>,
    mus_coarse: &[f64],
    max_imag: f64,
    tol: f64,
) -> Result<SteklovSpectrum, SolverError> {
    let mut est: f64 = 1e-12_f64.max(max_imag);
    for (a, c) in mus.iter().zip(mus_coarse) {
        est = est.max((a - c).abs());
    }
    if est > tol {
        return Err(SolverError::NotConverged {
            est_error: est,
            tol,
        });
    }
    // the zero eigenvalue of the constants may round slightly negative
    for m in mus.iter_mut() {
        if *m < 0.0 {
            if *m < -10.0 * est {
                return Err(SolverError::NotConverged {
                    est_error: est,
                    tol,
                });
            }
            *m = 0.0;
        }
    }
    let labels = classify_symmetry(&traces, b);
    let gaps = mus.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(SteklovSpectrum {
        eigenvalues: mus,
        eigenvectors: traces,
        symmetry_labels: labels,
        gaps,
        est_error: est,
    })
}

/// Dominant parity class of each eigenvector; anything with less than 99%
/// of its norm in one class is flagged `Mixed` (a multiplicity cluster to
/// re-split by sector).
pub fn classify_symmetry(
    vectors: &[Vec<f64>],
    b: &BoundaryDiscretization,
) -> Vec<SymmetryLabel> {
    vectors
        .iter()
        .map(|v| {
            let mut norms = [0.0; 4];
            let mut total = 0.0;
            for i in 0..v.len() {
                let vx = v[b.perm_x[i]];
                let vy = v[b.perm_y[i]];
                let vxy = v[b.perm_x[b.perm_y[i]]];
                total += b.weight[i] * v[i] * v[i];
                for (si, sec) in Sector::ALL.iter().enumerate() {
                    let (sx, sy) = sec.signs();
                    let proj = 0.25 * (v[i] + sx * vx + sy * vy + sx * sy * vxy);
                    norms[si] += b.weight[i] * proj * proj;
                }
            }
            if total == 0.0 {
                return SymmetryLabel::Mixed;
            }
            let (best, &val) = norms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            if val / total >= 0.99 {
                Sector::ALL[best].label()
            } else {
                SymmetryLabel::Mixed
            }
        })
        .collect()
}

/// Orbits of the reflection group on the node set; every orbit has size 4
/// because no node sits on a symmetry axis.
fn orbits(b: &BoundaryDiscretization) -> Vec<[usize; 4]> {
    let n = b.node_count();
    let mut out = Vec::with_capacity(n / 4);
    for i in 0..n {
        let ix = b.perm_x[i];
        let iy = b.perm_y[i];
        let ixy = b.perm_x[iy];
        if i < ix && i < iy && i < ixy {
            out.push([i, ix, iy, ixy]);
        }
    }
    debug_assert_eq!(out.len() * 4, n);
    out
}

fn sector_solve(
    b: &BoundaryDiscretization,
    sector: Sector,
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, f64), SolverError> {
    let dtn = assemble_dtn(b)?;
    let a = balanced_operator(b, &dtn);
    let orbs = orbits(b);
    let m = orbs.len();
    let (sx, sy) = sector.signs();
    let signs = [1.0, sx, sy, sx * sy];
    // C = A B with the sparse orthonormal orbit basis B, then Bs = B^T C
    let n = b.node_count();
    let mut c = Mat::zeros(n, m);
    for (o, orb) in orbs.iter().enumerate() {
        for i in 0..n {
            let mut acc = 0.0;
            for t in 0..4 {
                acc += signs[t] * a[(i, orb[t])];
            }
            c[(i, o)] = 0.5 * acc;
        }
    }
    let mut bs = Mat::zeros(m, m);
    for (o, orb) in orbs.iter().enumerate() {
        for o2 in 0..m {
            let mut acc = 0.0;
            for t in 0..4 {
                acc += signs[t] * c[(orb[t], o2)];
            }
            bs[(o, o2)] = 0.5 * acc;
        }
    }
    let k = k.min(m);
    let (vals, small, max_imag) = eig_smallest_k(&bs, k)?;
    let mut raw = Vec::with_capacity(k);
    for sv in &small {
        let mut v = vec![0.0; n];
        for (o, orb) in orbs.iter().enumerate() {
            for t in 0..4 {
                v[orb[t]] += 0.5 * signs[t] * sv[o];
            }
        }
        raw.push(v);
    }
    let traces = lift_vectors(b, &vals, raw);
    Ok((vals, traces, max_imag))
}

/// Eigenvalues of the DtN operator restricted to one parity sector. The
/// multiset union over the four sectors reproduces the full spectrum.
pub fn compute_sector_spectrum(
    b: &BoundaryDiscretization,
    sector: Sector,
    k: usize,
    tol: f64,
) -> Result<SteklovSpectrum, SolverError> {
    check_k(b, k)?;
    let (mus, traces, imag) = sector_solve(b, sector, k)?;
    let coarse = b.coarsened()?;
    let (mus_c, _, imag_c) = sector_solve(&coarse, sector, k.min(coarse.node_count() / 4))?;
    let mut spec = finish_spectrum(b, mus, traces, &mus_c, imag.max(imag_c), tol)?;
    // membership in the sector is exact by construction
    spec.symmetry_labels = vec![sector.label(); spec.eigenvalues.len()];
    Ok(spec)
}

/// Sign changes of a boundary trace along the closed oriented boundary,
/// ignoring nodes with |value| below the threshold.
pub fn boundary_nodal_count(v: &[f64], threshold: f64) -> usize {
    let active: Vec<f64> = v.iter().copied().filter(|x| x.abs() > threshold).collect();
    if active.len() < 2 {
        return 0;
    }
    let mut count = 0;
    for i in 0..active.len() {
        let a = active[i];
        let b = active[(i + 1) % active.len()];
        if a.signum() != b.signum() {
            count += 1;
        }
    }
    count
}

/// Evaluates the harmonic extension of a boundary trace at interior
/// points, reusing the single-layer representation from assembly.
pub struct InteriorEvaluator<'a> {
    b: &'a BoundaryDiscretization,
    density: Vec<f64>,
    constant: f64,
    safe_distance: f64,
}

impl<'a> InteriorEvaluator<'a> {
    pub fn new(b: &'a BoundaryDiscretization, dtn: &DtnOperator, trace: &[f64]) -> Self {
        let (density, constant) = dtn.representation(trace);
        Self {
            b,
            density,
            constant,
            safe_distance: b.largest_panel_arc_length(),
        }
    }

    /// Value at a strictly interior point; errors when the point is within
    /// one panel length of the boundary, where the plain quadrature
    /// representation loses accuracy.
    pub fn eval(&self, q: [f64; 2]) -> Result<f64, SolverError> {
        let mut dmin = f64::INFINITY;
        for p in &self.b.pos {
            dmin = dmin.min((q[0] - p[0]).hypot(q[1] - p[1]));
        }
        if dmin <= self.safe_distance {
            return Err(SolverError::TooCloseToBoundary);
        }
        let mut acc = self.constant;
        for (j, p) in self.b.pos.iter().enumerate() {
            let d = (q[0] - p[0]).hypot(q[1] - p[1]);
            acc -= self.b.weight[j] / (2.0 * std::f64::consts::PI) * d.ln() * self.density[j];
        }
        Ok(acc)
    }
}

/// One-shot interior evaluation; prefer [`InteriorEvaluator`] for batches.
pub fn interior_eval(
    b: &BoundaryDiscretization,
    dtn: &DtnOperator,
    trace: &[f64],
    q: [f64; 2],
) -> Result<f64, SolverError> {
    InteriorEvaluator::new(b, dtn, trace).eval(q)
}
