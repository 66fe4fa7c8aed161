use steklov_core::closed_forms::{Bubble, HalfPlanePoint, RegularBubbleParams};
use steklov_core::fractional_ops::*;

fn main() {
    let q = QuadratureSpec { target_tol: 1e-6, ..Default::default() };
    let q4 = QuadratureSpec { target_tol: 1e-4, ..Default::default() };
    let grid = vec![-4.0, -1.0, -0.25, 0.25, 1.0, 4.0];
    let t0 = std::time::Instant::now();
    // alpha = 1 control
    let b1 = Bubble::regular(1.0, 0.0).unwrap();
    println!("alpha=1.0: bubble={:.2e} lin={:.2e}",
        verify_bubble_residual(&b1, &[-2.0, -1.0, 0.0, 1.0, 2.0], &q).unwrap(),
        verify_linearized_residual(&b1, &[-2.0, -1.0, 0.0, 1.0, 2.0], &q).unwrap());
    let reg = RegularBubbleParams::new(1.0, 0.0).unwrap();
    println!("alpha=1.0 translation={:.2e}", verify_translation_residual(&reg, &[-2.0, -1.0, 0.0, 1.0, 2.0], &q).unwrap());
    for alpha in [0.3, 0.5, 0.7, 1.3, 1.5, 1.7] {
        let b = Bubble::singular(alpha, 1.0).unwrap();
        let br = verify_bubble_residual(&b, &grid, &q4);
        let lr = verify_linearized_residual(&b, &grid, &q4);
        println!("alpha={alpha}: bubble={:?} lin={:?}", br.map(|v| format!("{v:.2e}")), lr.map(|v| format!("{v:.2e}")));
    }
    // rho != 1
    let b = Bubble::singular(1.5, 2.0).unwrap();
    println!("alpha=1.5 rho=2: bubble={:.2e}", verify_bubble_residual(&b, &grid, &q4).unwrap());
    let b = Bubble::singular(0.7, 0.5).unwrap();
    println!("alpha=0.7 rho=0.5: lin={:.2e}", verify_linearized_residual(&b, &grid, &q4).unwrap());
    // poisson
    let bb = Bubble::singular(0.5, 1.0).unwrap();
    let u = SampledFunction::from_bubble(&bb).unwrap();
    let p = HalfPlanePoint::new(1.0, 1.0).unwrap();
    let got = poisson_extend(&u, p, &q).unwrap();
    let want = bb.extension(p);
    println!("poisson bubble (1,1): got={got:.9} want={want:.9} diff={:.2e}", (got - want).abs());
    println!("fractional wall {:?}", t0.elapsed());
    // convergence order at low panel_order
    let qc = QuadratureSpec { panel_order: 4, near_field_halfwidth: 0.8, target_tol: 1e-12, ..Default::default() };
    let bb = Bubble::regular(0.4, 0.0).unwrap();
    let u = SampledFunction::from_bubble(&bb).unwrap();
    let x = 0.3;
    let exact = bb.boundary_weight(x);
    let mut prev_err = 0.0;
    for level in 0..4 {
        let v = half_laplacian_at_level(&u, x, &qc, level).unwrap();
        let err = (v - exact).abs();
        let rate = if level > 0 { (prev_err / err).log2() } else { 0.0 };
        println!("level {level}: err={err:.3e} rate={rate:.2}");
        prev_err = err;
    }
}
