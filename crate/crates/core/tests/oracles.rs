//! Reference values computed independently and frozen.

use oubv::analytic::{mean_falling, var_x_symmetric, MeanMethod};
use oubv::{ModelParams, Regime, SeriesControl};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn mean_falling_table() {
    // (x, E_0 T, E_1 T) for λ = a = γ = 1
    let table = [
        (1.2, 1.095_310_179_804_325, 0.18621927071341577),
        (1.5, 1.2231435513142098, 0.423_143_551_314_209_8),
        (2.0, 1.4054651081081644, 0.7387984414414977),
        (2.5, 1.5596157879354227, 0.9881872165068513),
        (10.0, 2.7047480922384252, 2.5229299104202434),
    ];
    let p = ModelParams::symmetric(1.0, 1.0, 1.0).unwrap();
    let ctl = SeriesControl::default();
    for (x, e0, e1) in table {
        let m0 = mean_falling(x, Regime::R0, &p, &ctl).unwrap();
        let m1 = mean_falling(x, Regime::R1, &p, &ctl).unwrap();
        let tol = if m0.method == MeanMethod::Series { 1e-12 } else { 1e-8 };
        assert!(close(m0.value, e0, tol), "x={x}: {} vs {e0}", m0.value);
        assert!(close(m1.value, e1, tol), "x={x}: {} vs {e1}", m1.value);
    }
}

#[test]
fn symmetric_variance_values() {
    let var = |lambda, t| var_x_symmetric(t, &ModelParams::symmetric(lambda, 1.0, 1.0).unwrap()).unwrap();
    assert!(close(var(0.5, 1.0), 0.16166179190846827, 1e-14));
    assert!(close(var(1.0, 2.0), 0.30297659873240608, 1e-14));
    assert!(close(var(1.0, 40.0), 1.0 / 3.0, 1e-14));
}
