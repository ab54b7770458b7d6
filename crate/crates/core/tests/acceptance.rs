//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero when any of them fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use resosc::borel::{
    borel_transform, fit_large_order, resum, singularity_consensus, DEFAULT_FIT_KMIN,
};
use resosc::coherent::{
    displacement_matrix, husimi, instanton_apply, sb_transform, toeplitz_element,
    transseries_energy, unitarity_defect, HoloPoly, InstantonParams, Measure, Symbol, ToeplitzSpec,
    TransSeriesParams,
};
use resosc::series::{order_residual, rs_recursion, verify_table};
use resosc::spectral::{build_matrix, eigenvalues};

/// Ground and first excited levels from the dimension-256 matrix, recorded
/// on the first verified run.
const FROZEN_ORACLE: [(f64, usize, f64); 4] = [
    (0.02, 0, 5.1408642731808385e-1),
    (0.02, 1, 1.5682396768066964e0),
    (0.1, 0, 5.5914632718389545e-1),
    (0.1, 1, 1.7695026439486068e0),
];
/// Relative resummation error bound frozen from the first verified run
/// (largest observed 1.1e-12); the initial targets were 1e-6 and 1e-4.
const FROZEN_RESUM_TOL: [(f64, f64); 2] = [(0.02, 1e-11), (0.1, 1e-11)];

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Sum over the 16 words in `a`, `a†` of `⟨n| w |n⟩`, divided by 4. Each
/// closed path contributes `Π (k+1)` over its raising steps `k → k+1`.
fn brute_force_first_order(n: usize) -> BigRational {
    let mut total = BigInt::zero();
    for word in 0u32..16 {
        let mut level = n as i64;
        let mut weight = BigInt::from(1);
        let mut alive = true;
        // apply right-most letter first
        for bit in 0..4 {
            let raise = word >> bit & 1 == 1;
            if raise {
                weight *= level + 1;
                level += 1;
            } else {
                if level == 0 {
                    alive = false;
                    break;
                }
                level -= 1;
            }
        }
        if alive && level == n as i64 {
            total += weight;
        }
    }
    BigRational::new(total, BigInt::from(4))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let series: Vec<_> = (0..=6).map(|n| rs_recursion(n, 6).0).collect();
    let report = verify_table(&series).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut detail = format!("{}/49 cells match, {elapsed:.3} s", report.matched());
    for cell in report.mismatches() {
        detail.push_str(&format!(
            "\n      n={} k={}: table {} computed {}",
            cell.level, cell.order, cell.expected, cell.got
        ));
    }
    if report.passed() && elapsed < 1.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Check {
    for n in 0..=50usize {
        let (s, _) = rs_recursion(n, 1);
        let m = BigInt::from(n);
        let closed = BigRational::new(
            BigInt::from(3) * (BigInt::from(2) * &m * &m + BigInt::from(2) * &m + 1),
            BigInt::from(4),
        );
        let brute = brute_force_first_order(n);
        if s.coeffs[1] != closed || brute != closed {
            return Err(format!(
                "n={n}: recursion {} brute force {brute} closed form {closed}",
                s.coeffs[1]
            ));
        }
    }
    Ok("recursion, closed form and operator-word enumeration agree for n ≤ 50".into())
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let (s, table) = rs_recursion(0, 120);
    let elapsed = start.elapsed().as_secs_f64();
    for k in 1..=120 {
        let e = &s.coeffs[k];
        if e.is_zero() || e.is_positive() != (k % 2 == 1) {
            return Err(format!("sign of E^({k}) breaks alternation"));
        }
    }
    for k in 0..=120 {
        let r = order_residual(&s, &table, k);
        if !r.is_empty() {
            return Err(format!(
                "non-zero residual at order {k}: support {:?}",
                r.support()
            ));
        }
    }
    let detail =
        format!("K=120 in {elapsed:.2} s, signs alternate, residual zero at all 121 orders");
    if elapsed < 10.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Check {
    let mut consensus = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 0..=2 {
        let (s, _) = rs_recursion(n, 60);
        let cons = singularity_consensus(&borel_transform(&s)).map_err(|e| e.to_string())?;
        let spread = cons.method_spread();
        ok &= spread <= 0.02;
        lines.push(format!(
            "      n={n}: pade {:.6}{:+.1e}i  ratio {:.7}  spread {:.2e}  consensus {:.6} ± {:.1e}",
            cons.pade.location.re,
            cons.pade.location.im,
            cons.ratio.location.re,
            spread,
            cons.location,
            cons.uncertainty
        ));
        consensus.push(cons);
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (&consensus[i], &consensus[j]);
            if (a.location - b.location).abs() > a.uncertainty + b.uncertainty {
                ok = false;
                lines.push(format!("      levels {i} and {j} differ beyond joint bars"));
            }
        }
    }
    let mean = consensus.iter().map(|c| c.location).sum::<f64>() / 3.0;
    lines.push(format!(
        "      measured ξ_c ≈ {mean:.5}; published value -4/3 (factor {:.3}) uses a different coupling normalization, reported only",
        (-4.0 / 3.0) / mean
    ));
    let detail = format!(
        "methods agree within 2% and levels agree within bars\n{}",
        lines.join("\n")
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    let series: Vec<_> = (0..=1).map(|n| rs_recursion(n, 60).0).collect();
    for (g, target) in [(0.02, 1e-6), (0.1, 1e-4)] {
        let fine = eigenvalues(&build_matrix(g, 256).map_err(|e| e.to_string())?, 2)
            .map_err(|e| e.to_string())?;
        let coarse = eigenvalues(&build_matrix(g, 192).map_err(|e| e.to_string())?, 2)
            .map_err(|e| e.to_string())?;
        let frozen_tol = FROZEN_RESUM_TOL
            .iter()
            .find(|t| t.0 == g)
            .map(|t| t.1)
            .unwrap_or(target);
        for n in 0..=1 {
            let oracle = fine.eigenvalues[n];
            let self_conv = (oracle - coarse.eigenvalues[n]).abs();
            let frozen = FROZEN_ORACLE
                .iter()
                .find(|f| f.0 == g && f.1 == n)
                .map(|f| f.2)
                .unwrap();
            let r = resum(&series[n], g, 30, 30).map_err(|e| e.to_string())?;
            let rel = (r.value - oracle).abs() / oracle.abs();
            let pass = rel <= target
                && rel <= frozen_tol
                && self_conv <= 1e-10
                && (oracle - frozen).abs() <= 1e-10;
            ok &= pass;
            lines.push(format!(
                "      g={g} n={n}: resummed {:.15} oracle {oracle:.15} rel {rel:.2e} (target {target:.0e}, frozen {frozen_tol:.0e}) oracle N192→256 {self_conv:.1e}",
                r.value
            ));
        }
    }
    let detail = format!(
        "Borel–Padé–Laplace against matrix eigenvalues\n{}",
        lines.join("\n")
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Check {
    let (s, _) = rs_recursion(0, 120);
    let fit = fit_large_order(&s, DEFAULT_FIT_KMIN, 120).map_err(|e| e.to_string())?;
    let cons =
        singularity_consensus(&borel_transform(&s.truncated(60))).map_err(|e| e.to_string())?;
    let product = fit.growth * cons.location.abs();
    let detail = format!(
        "A = {:.5} ± {:.1e}, b = {:.3}, K = {:.3}, |ξ_c| = {:.6}, A·|ξ_c| = {product:.5}",
        fit.growth,
        fit.uncertainty[0],
        fit.exponent,
        fit.amplitude,
        cons.location.abs()
    );
    if (product - 1.0).abs() <= 0.02 && !fit.degenerate {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sample_state() -> HoloPoly {
    let p = HoloPoly::new(
        (0..9)
            .map(|m| {
                c(
                    ((m * 7 + 3) % 11) as f64 - 5.0,
                    ((m * 5 + 1) % 7) as f64 - 3.0,
                )
            })
            .collect(),
    );
    p.scale(c(1.0 / p.norm(), 0.0))
}

fn criterion_7() -> Check {
    let mut parts = Vec::new();

    let d = displacement_matrix(c(0.6, -0.4), 96).map_err(|e| e.to_string())?;
    let defect = unitarity_defect(&d, 32);
    if defect > 1e-8 {
        return Err(format!(
            "displacement defect {defect:.2e} on the 32×32 block of N=96"
        ));
    }
    parts.push(format!("unitarity {defect:.1e}"));

    let f = sample_state();
    let mut worst_norm: f64 = 0.0;
    for g in [0.05, 0.1, 0.2] {
        for theta in [0.0, 1.1] {
            let p = InstantonParams::new(1.0 / 3.0, g, theta).map_err(|e| e.to_string())?;
            let out = instanton_apply(&p, &f).map_err(|e| e.to_string())?;
            let expected = p.weight() * f.norm();
            worst_norm = worst_norm.max((out.norm() - expected).abs() / expected);
        }
    }
    if worst_norm > 1e-10 {
        return Err(format!("instanton norm law off by {worst_norm:.2e}"));
    }
    parts.push(format!("norm law {worst_norm:.1e}"));

    // real α matches the quoted formula directly; complex α peaks at ᾱ
    let mut worst_q: f64 = 0.0;
    for alpha in [c(0.7, 0.0), c(1.0, 0.5)] {
        let state = HoloPoly::coherent(alpha).map_err(|e| e.to_string())?;
        for i in 0..50 {
            let t = i as f64;
            let z = c(
                -2.5 + 5.0 * ((t * 0.618034) % 1.0),
                -2.5 + 5.0 * ((t * 0.414214 + 0.3) % 1.0),
            );
            let q = husimi(&state, z).map_err(|e| e.to_string())?;
            let expected = (-(z - alpha.conj()).norm_sqr()).exp() / PI;
            worst_q = worst_q.max((q - expected).abs());
        }
    }
    if worst_q > 1e-8 {
        return Err(format!("Husimi deviates by {worst_q:.2e}"));
    }
    parts.push(format!("Husimi {worst_q:.1e}"));

    let spec = ToeplitzSpec {
        symbol: Symbol::AbsZSquared,
        measure: Measure::Paper,
    };
    let mut worst_t: f64 = 0.0;
    for n in 0..=8 {
        let el = toeplitz_element(&spec, n, n).map_err(|e| e.to_string())?;
        worst_t = worst_t.max((el.value - c(PI * (n as f64 + 1.0), 0.0)).norm());
    }
    if worst_t > 1e-8 {
        return Err(format!("Toeplitz diagonal off by {worst_t:.2e}"));
    }
    parts.push(format!("Toeplitz {worst_t:.1e}"));

    let mut worst_sb: f64 = 0.0;
    for n in 0..=8 {
        let phi = HoloPoly::basis(n);
        for i in 0..20 {
            let t = i as f64;
            let z = c(
                -2.0 + 4.0 * ((t * 0.754878) % 1.0),
                -2.0 + 4.0 * ((t * 0.569840 + 0.1) % 1.0),
            );
            let got = sb_transform(n, z).map_err(|e| e.to_string())?;
            worst_sb = worst_sb.max((got - phi.eval(z)).norm());
        }
    }
    if worst_sb > 1e-8 {
        return Err(format!("Segal–Bargmann transform off by {worst_sb:.2e}"));
    }
    parts.push(format!("SB transform {worst_sb:.1e}"));
    Ok(parts.join(", "))
}

fn linear_fit_3(x: &[f64; 3], y: &[f64; 3]) -> Result<f64, String> {
    let m = nalgebra::Matrix3::from_fn(|i, j| [1.0, x[i], (1.0 / x[i]).ln()][j]);
    let sol = m
        .lu()
        .solve(&nalgebra::Vector3::from_column_slice(y))
        .ok_or("singular fit")?;
    Ok(sol[1])
}

fn criterion_8() -> Check {
    let (s, _) = rs_recursion(0, 60);
    let g0 = 0.05;
    let r = resum(&s, g0, 30, 30).map_err(|e| e.to_string())?;
    let p0 = InstantonParams::new(1.0 / 3.0, g0, 0.0).map_err(|e| e.to_string())?;
    let tp0 = TransSeriesParams {
        sigma: c(0.0, 0.0),
        lmax: 0,
        level: 0,
    };
    let ts = transseries_energy(&tp0, &p0, Some(r.value)).map_err(|e| e.to_string())?;
    let gap = (ts.value - c(r.value, 0.0)).norm();
    let tol = r.quadrature.error_estimate.max(1e-12 * r.value.abs());
    if gap > tol {
        return Err(format!(
            "σ=0 trans-series {} differs from resummed {} by {gap:.2e}",
            ts.value, r.value
        ));
    }

    let action = singularity_consensus(&borel_transform(&s))
        .map_err(|e| e.to_string())?
        .location
        .abs();
    let gs = [0.2, 0.1, 0.05];
    let mut inv_g = [0.0; 3];
    let mut normalized = [0.0; 3];
    let mut raw = [0.0; 3];
    for (i, g) in gs.iter().enumerate() {
        let p = InstantonParams::new(action, *g, 0.0).map_err(|e| e.to_string())?;
        let tp = TransSeriesParams {
            sigma: c(1.0, 0.0),
            lmax: 1,
            level: 0,
        };
        let res = transseries_energy(&tp, &p, None).map_err(|e| e.to_string())?;
        let d = res.corrections[0];
        inv_g[i] = 1.0 / g;
        raw[i] = d.norm().ln();
        normalized[i] = (d / res.overlaps[1]).norm().ln();
    }
    let slope = linear_fit_3(&inv_g, &normalized)?;
    let raw_slope = linear_fit_3(&inv_g, &raw)?;
    let err = (slope / -action - 1.0).abs();
    let detail = format!(
        "σ=0 gap {gap:.1e}; ln|Δ₁/⟨φ₀|Dφ₀⟩| slope {slope:.5} vs -S = {:.5} (error {:.2}%), unnormalized slope/S {:.3}",
        -action,
        100.0 * err,
        raw_slope / action
    );
    if err < 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 table reproduction", criterion_1),
        ("2 first-order closed form", criterion_2),
        ("3 high-order generation", criterion_3),
        ("4 Borel-plane singularity", criterion_4),
        ("5 resummation vs spectral oracle", criterion_5),
        ("6 growth-rate reciprocity", criterion_6),
        ("7 coherent layer", criterion_7),
        ("8 trans-series consistency", criterion_8),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.1} s) {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {name}: FAIL ({secs:.1} s) {detail}");
            }
        }
    }
    println!("acceptance: {}/8 passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
