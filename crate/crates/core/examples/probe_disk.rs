use steklov_core::steklov_solver::*;
use steklov_core::conformal_geometry::{DiskPairDomain, DomainMode};

fn main() {
    for n in [16usize, 32, 64, 128] {
        let t1 = std::time::Instant::now();
        let b = discretize(&DomainSpec::UnitDisk, n, 3.0).unwrap();
        let spec = compute_spectrum(&b, 7, 1e-3).unwrap();
        let exact = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        let err: f64 = spec.eigenvalues.iter().zip(&exact).map(|(a, e)| (a - e).abs()).fold(0.0, f64::max);
        println!("disk n={n:3} N={:5} err={err:.3e} est={:.3e} t={:?}", b.node_count(), spec.est_error, t1.elapsed());
    }
    for (mode, name, idx) in [(DomainMode::Intersection, "lens", 1usize), (DomainMode::Union, "union", 2)] {
        for n in [16usize, 24, 32, 48, 64] {
            let t1 = std::time::Instant::now();
            let d = DomainSpec::Pair(DiskPairDomain::new(0.5, mode).unwrap());
            let b = discretize(&d, n, 3.0).unwrap();
            match compute_spectrum(&b, 5, 1e-2) {
                Ok(spec) => println!("{name} n={n:3} N={:5} mu-1={:+.3e} est={:.3e} vals={} t={:?}", b.node_count(),
                    spec.eigenvalues[idx] - 1.0, spec.est_error,
                    spec.eigenvalues.iter().map(|v| format!("{v:.8}")).collect::<Vec<_>>().join(" "), t1.elapsed()),
                Err(e) => println!("{name} n={n:3} ERR {e}"),
            }
        }
    }
}
