use std::f64::consts::PI;

use num_complex::Complex64;
use resosc::coherent::{
    displace, husimi_grid, reproducing_check, toeplitz_element, transseries_energy, HoloPoly, InstantonParams,
    Measure, Symbol, ToeplitzSpec, TransSeriesParams,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn zeroth_order_transseries_is_the_rayleigh_quotient() {
    for g in [0.01, 0.05, 0.3] {
        for n in 0..4usize {
            let p = InstantonParams::new(1.0 / 3.0, g, 0.0).unwrap();
            let tp = TransSeriesParams { sigma: c(1.0, 0.0), lmax: 0, level: n };
            let r = transseries_energy(&tp, &p, None).unwrap();
            let nf = n as f64;
            let expected = nf + 0.5 + g * 0.75 * (2.0 * nf * nf + 2.0 * nf + 1.0);
            assert!((r.value - c(expected, 0.0)).norm() < 1e-13, "n={n} g={g}: {}", r.value);
            assert!(r.corrections.is_empty());
        }
    }
}

#[test]
fn stokes_constant_weights_each_sector() {
    let p = InstantonParams::new(1.0 / 3.0, 0.2, 0.0).unwrap();
    let base = TransSeriesParams { sigma: c(1.0, 0.0), lmax: 2, level: 0 };
    let r1 = transseries_energy(&base, &p, Some(0.6)).unwrap();
    let sigma = c(0.3, -0.2);
    let r2 = transseries_energy(&TransSeriesParams { sigma, ..base }, &p, Some(0.6)).unwrap();
    let expected = c(0.6, 0.0) + sigma * r1.corrections[0] + sigma * sigma * r1.corrections[1];
    assert!((r2.value - expected).norm() < 1e-15);
}

#[test]
fn displacement_composes_up_to_a_phase() {
    // D(α)D(β) = e^{i Im(α β̄)} D(α+β) on the vacuum
    let (a, b) = (c(0.4, 0.3), c(-0.2, 0.5));
    let vac = HoloPoly::basis(0);
    let two = displace(a, &displace(b, &vac).unwrap()).unwrap();
    let one = displace(a + b, &vac).unwrap();
    let phase = Complex64::from_polar(1.0, (a * b.conj()).im);
    assert!(two.distance(&one.scale(phase)) < 1e-11, "{}", two.distance(&one.scale(phase)));
}

#[test]
fn toeplitz_of_z_is_the_shift() {
    let spec = ToeplitzSpec { symbol: Symbol::Z, measure: Measure::Normalized };
    for n in 0..5 {
        for m in 0..5 {
            let v = toeplitz_element(&spec, m, n).unwrap().value;
            let expected = if m == n + 1 { ((n + 1) as f64).sqrt() } else { 0.0 };
            assert!((v - c(expected, 0.0)).norm() < 1e-9, "m={m} n={n}: {v}");
        }
    }
    let paper = ToeplitzSpec { symbol: Symbol::Z, measure: Measure::Paper };
    let v = toeplitz_element(&paper, 3, 2).unwrap().value;
    assert!((v - c(PI * 3f64.sqrt(), 0.0)).norm() < 1e-8);
}

#[test]
fn kernel_reproduces_polynomials() {
    let f = HoloPoly::new(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.0, 0.7), c(0.25, 0.0)]);
    for w in [c(0.0, 0.0), c(0.8, -0.4), c(-1.2, 0.9)] {
        let got = reproducing_check(&f, w).unwrap();
        assert!((got - f.eval(w)).norm() < 1e-9 * f.eval(w).norm().max(1.0), "w={w}");
    }
}

#[test]
fn husimi_grid_of_coherent_state_integrates_to_one() {
    let state = HoloPoly::coherent(c(1.0, 0.5)).unwrap();
    let grid = husimi_grid(&state, (-6.0, 6.0), (-6.0, 6.0), 200, 200).unwrap();
    assert!((grid.integral() - 1.0).abs() < 1e-5, "{}", grid.integral());
}
