//! Shared quadrature machinery: Gauss–Legendre rules, an adaptive
//! Gauss–Kronrod integrator for vector-valued integrands, Legendre
//! evaluation, and exact log-kernel moments for product integration.

use std::f64::consts::PI;

/// A Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights of the `n`-point rule, by Newton iteration on
    /// the Legendre recurrence. Accurate to machine precision for the
    /// orders used here (n <= 64).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            // Tricomi-style initial guess, then Newton.
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (p2, d2) = legendre_with_deriv(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            weights[k] = w;
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrate a scalar function over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// P_0(x), ..., P_{k_max}(x).
pub fn legendre_all(k_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(k_max + 1);
    p.push(1.0);
    if k_max == 0 {
        return p;
    }
    p.push(x);
    for k in 1..k_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p
}

/// Exact moments `m_k = ∫_{-1}^{1} P_k(s) ln|s0 - s| ds` for k = 0..p-1.
///
/// Valid for any real `s0`; the target may sit inside the panel (the
/// principal-value pieces cancel in the by-parts identity). Forward
/// recursion on the Legendre Q-functions is stable for |s0| <= ~1.5,
/// which is the only range assembly uses.
pub fn log_moments(p: usize, s0: f64) -> Vec<f64> {
    let lp = (s0 + 1.0).abs();
    let lm = (s0 - 1.0).abs();
    let xlnp = if lp == 0.0 { 0.0 } else { (s0 + 1.0) * lp.ln() };
    let xlnm = if lm == 0.0 { 0.0 } else { (s0 - 1.0) * lm.ln() };
    let mut m = vec![0.0; p];
    m[0] = xlnp - xlnm - 2.0;
    if p == 1 {
        return m;
    }
    // qh[k] = (1/2) pv ∫ P_k(s)/(s0-s) ds
    let mut qh = vec![0.0; p + 1];
    qh[0] = 0.5 * (lp.ln() - lm.ln());
    qh[1] = s0 * qh[0] - 1.0;
    for k in 1..p {
        let kf = k as f64;
        qh[k + 1] = ((2.0 * kf + 1.0) * s0 * qh[k] - kf * qh[k - 1]) / (kf + 1.0);
    }
    for k in 1..p {
        m[k] = 2.0 * (qh[k + 1] - qh[k - 1]) / (2.0 * k as f64 + 1.0);
    }
    m
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One GK15 panel for a vector-valued integrand. Returns the Kronrod
/// value per component and the max component-wise |K - G| estimate.
fn gk15_panel<F>(f: &F, a: f64, b: f64, dim: usize) -> (Vec<f64>, f64)
where
    F: Fn(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kr = vec![0.0; dim];
    let mut gs = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let wg = if j % 2 == 1 { Some(WG[j / 2]) } else { None };
        if x == 0.0 {
            buf.iter_mut().for_each(|v| *v = 0.0);
            f(c, &mut buf);
            for d in 0..dim {
                kr[d] += wk * buf[d];
                if let Some(w) = wg {
                    gs[d] += w * buf[d];
                }
            }
        } else {
            for t in [c - h * x, c + h * x] {
                buf.iter_mut().for_each(|v| *v = 0.0);
                f(t, &mut buf);
                for d in 0..dim {
                    kr[d] += wk * buf[d];
                    if let Some(w) = wg {
                        gs[d] += w * buf[d];
                    }
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        kr[d] *= h;
        err = err.max((kr[d] - gs[d] * h).abs());
    }
    (kr, err)
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand over
/// [a, b]. Bisects the worst panel until the summed error estimate drops
/// below `tol_abs` or the panel budget is exhausted; integrable endpoint
/// singularities (log, mild powers) converge within the budget.
pub fn adaptive_gk<F>(f: &F, a: f64, b: f64, dim: usize, tol_abs: f64) -> Vec<f64>
where
    F: Fn(f64, &mut [f64]),
{
    const MAX_PANELS: usize = 600;
    struct Seg {
        a: f64,
        b: f64,
        val: Vec<f64>,
        err: f64,
    }
    let (val, err) = gk15_panel(f, a, b, dim);
    let mut segs = vec![Seg { a, b, val, err }];
    let mut total_err = segs[0].err;
    while total_err > tol_abs && segs.len() < MAX_PANELS {
        // split the segment with the largest error estimate
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .unwrap();
        let Seg { a, b, err, .. } = segs[idx];
        let m = 0.5 * (a + b);
        if !(a < m && m < b) {
            break; // interval at floating-point resolution
        }
        let (v1, e1) = gk15_panel(f, a, m, dim);
        let (v2, e2) = gk15_panel(f, m, b, dim);
        total_err += e1 + e2 - err;
        segs[idx] = Seg { a, b: m, val: v1, err: e1 };
        segs.push(Seg { a: m, b, val: v2, err: e2 });
    }
    let mut out = vec![0.0; dim];
    for s in &segs {
        for d in 0..dim {
            out[d] += s.val[d];
        }
    }
    out
}

/// Scalar convenience wrapper over [`adaptive_gk`].
pub fn adaptive_gk_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_abs: f64) -> f64 {
    adaptive_gk(&|t, out: &mut [f64]| out[0] = f(t), a, b, 1, tol_abs)[0]
}
