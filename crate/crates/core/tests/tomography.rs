use uscpol::hopfield::mixing_angle;
use uscpol::tomography::{tomography_sweep, SweepOptions, TomographyGrids};
use uscpol::{CavityDispersion, SystemParams};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn weak_dressing_recovers_unit_tangent_at_resonance() {
    let p = SystemParams::new(0.1, 0.95, 0.02).unwrap().with_losses(0.001, 0.005, 0.005).unwrap();
    let grids = TomographyGrids {
        k: linspace(0.6, 1.4, 400),
        omega: linspace(0.6, 1.4, 4000),
        dispersion: CavityDispersion::default(),
    };
    // Only emitter frequencies whose branch crossing lies inside the k window;
    // closer to the gap the two polaritons themselves would be paired.
    let mut sweep = linspace(0.9, 0.97, 8);
    sweep.extend(linspace(1.03, 1.1, 8));
    let curve = tomography_sweep(&p, &sweep, &grids, &SweepOptions::default()).unwrap();
    let i = curve
        .k
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .unwrap()
        .0;
    assert!((curve.k[i] - 1.0).abs() < 0.05, "overlap {:?}", (curve.k[0], curve.k.last()));
    assert!((mixing_angle(&p, curve.k[i]).tan() - 1.0).abs() < 0.3);
    assert!((curve.tan_reconstructed[i] - 1.0).abs() < 0.15, "tan at k = {}: {}", curve.k[i], curve.tan_reconstructed[i]);
}

#[test]
fn sweep_is_deterministic_and_positive() {
    let p = SystemParams::new(1.0, 0.7, 0.2).unwrap().with_losses(0.01, 0.05, 0.05).unwrap();
    let grids = TomographyGrids {
        k: linspace(0.02, 3.0, 120),
        omega: linspace(0.0, 3.2, 600),
        dispersion: CavityDispersion::default(),
    };
    let mut sweep = linspace(0.3, 0.92, 8);
    sweep.extend(linspace(1.47, 2.8, 8));
    let a = tomography_sweep(&p, &sweep, &grids, &SweepOptions::default()).unwrap();
    let b = tomography_sweep(&p, &sweep, &grids, &SweepOptions::default()).unwrap();
    assert_eq!(a, b);
    assert!(a.tan_reconstructed.iter().chain(&a.tan_analytic).all(|&t| t > 0.0));
    for r in &a.records {
        assert!(r.omega_plus > r.omega_minus && r.rabi_bar >= 0.025);
    }
}
