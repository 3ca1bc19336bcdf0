//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single `ACCEPTANCE n: PASS` line on success (visible with
//! `cargo test -- --nocapture`).

use g2ct_core::coframe_models::{builtin_model, default_samples, exterior_derivative};
use g2ct_core::exact;
use g2ct_core::form::Form;
use g2ct_core::g2_core::{check_eps_identities, eps3_nonzero_count};
use g2ct_core::jet::Jet;
use g2ct_core::rep_theory::{
    build_context, decompose_nabla_t, expm7, orbit_invariant, G2Context, Mat7,
};
use g2ct_core::torsion_curvature as tc;
use g2ct_core::{closure_checker, rat, rat_i};
use rand::{Rng, SeedableRng};
use std::process::Command;
use std::time::Instant;

fn ctx() -> G2Context {
    build_context()
}

fn pass(n: usize) {
    println!("ACCEPTANCE {n}: PASS");
}

fn val_form(f: &Form<Jet>) -> Form<f64> {
    f.map(|c| c.val())
}

const MODELS_WITH_TORSION: [&str; 4] = ["aso4", "cp2", "heis", "su21"];

#[test]
fn acceptance_01_eps_identity_suite() {
    let cx = ctx();
    assert_eq!(check_eps_identities(&cx.consts), 0);
    assert_eq!(eps3_nonzero_count(&cx.consts), 42);
    pass(1);
}

#[test]
fn acceptance_02_representation_dimensions() {
    let cx = ctx();
    assert_eq!(exact::rank(&cx.p2_7), 7);
    assert_eq!(exact::rank(&cx.p2_14), 14);
    assert_eq!(exact::rank(&cx.p3_1), 1);
    assert_eq!(exact::rank(&cx.p3_7), 7);
    assert_eq!(exact::rank(&cx.p3_27), 27);
    pass(2);
}

#[test]
fn acceptance_03_phi_tilde_is_closed() {
    for name in ["flat", "aso4", "cp2", "heis", "su21"] {
        let m = builtin_model(name).unwrap();
        for r in default_samples(&m) {
            let phi = m.phi_tilde(r).unwrap();
            let dphi = exterior_derivative(&m, &phi).unwrap();
            assert!(
                dphi.norm() <= 1e-10 * phi.norm(),
                "{name} at r = {r}: {}",
                dphi.norm()
            );
        }
    }
    pass(3);
}

#[test]
fn acceptance_04_scalar_curvature_closed_forms() {
    let cx = ctx();
    let closed_form = |name: &str, r: f64| -> f64 {
        match name {
            "flat" => 0.0,
            "aso4" => -48.0 / (r * r),
            "heis" => -75.0 / (r * r),
            "cp2" => (4.0 - 16.0 * r.cosh().powi(2)) / (3.0 * r.cosh().powf(2.0 / 3.0)),
            "su21" => (3.0 - 4.0 * r.cosh().powi(2)) / (3.0 * r.sinh().powf(2.0 / 3.0)),
            _ => unreachable!(),
        }
    };
    for name in ["flat", "aso4", "cp2", "heis", "su21"] {
        let m = builtin_model(name).unwrap();
        for r in default_samples(&m) {
            let want = closed_form(name, r);
            let scale = want.abs().max(1.0);
            let tau = tc::torsion_two_form(&cx, &m, r).unwrap();
            let t = tc::torsion_tensor(&cx, &tau, 1e-8).unwrap();
            let via_torsion = tc::scalar_curvature_from_t(&t);
            let via_riemann = tc::riemann_tensor(&m, r).unwrap().scal;
            assert!((via_torsion - want).abs() <= 1e-8 * scale, "{name} r={r} torsion route");
            assert!((via_riemann - want).abs() <= 1e-8 * scale, "{name} r={r} riemann route");
        }
    }
    pass(4);
}

#[test]
fn acceptance_05_conformal_flatness_and_negative_control() {
    for name in ["aso4", "cp2"] {
        let m = builtin_model(name).unwrap();
        for r in default_samples(&m) {
            let w = tc::conformal_flatness_residual(&m, r).unwrap();
            assert!(w <= 1e-7, "{name} r={r}: {w}");
        }
    }
    let m = builtin_model("su21").unwrap();
    assert!(tc::conformal_flatness_residual(&m, 1.0).unwrap() >= 1e-2);
    pass(5);
}

#[test]
fn acceptance_06_torsion_two_form_displays() {
    let cx = ctx();
    let t = 1.7;
    let (sh, ch) = (1.0f64.sinh(), 1.0f64.cosh());
    let cases: [(&str, f64, [f64; 3]); 3] = [
        ("aso4", t, [8.0 / t, -4.0 / t, -4.0 / t]),
        ("heis", t, [-10.0 / t, 5.0 / t, 5.0 / t]),
        (
            "cp2",
            1.0,
            [
                4.0 * sh / (3.0 * ch.powf(1.0 / 3.0)),
                (6.0 * ch - 2.0 * sh) / (3.0 * ch.powf(1.0 / 3.0)),
                -(6.0 * ch + 2.0 * sh) / (3.0 * ch.powf(1.0 / 3.0)),
            ],
        ),
    ];
    for (name, r, coeffs) in cases {
        let m = builtin_model(name).unwrap();
        let tau = val_form(&tc::torsion_two_form(&cx, &m, r).unwrap());
        let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for (pair, want) in [([1u8, 2], coeffs[0]), ([3, 4], coeffs[1]), ([5, 6], coeffs[2])] {
            assert!(
                (tau.coeff(&pair) - want).abs() <= 1e-9 * scale,
                "{name} coefficient on {pair:?}"
            );
        }
        // every other coefficient vanishes
        let mut named = tau.clone();
        for (pair, want) in [([1u8, 2], coeffs[0]), ([3, 4], coeffs[1]), ([5, 6], coeffs[2])] {
            named.add_term(&pair, -want);
        }
        assert!(named.norm() <= 1e-9 * scale, "{name} stray terms");
    }
    pass(6);
}

#[test]
fn acceptance_07_structure_equation_residuals() {
    let cx = ctx();
    let families: [(&str, f64, f64); 4] = [
        ("aso4", -0.125, 1.0),
        ("cp2", -0.125, 1.0),
        ("heis", 0.4, -0.08),
        ("su21", 0.4, -0.08),
    ];
    for (name, lambda, mu) in families {
        let m = builtin_model(name).unwrap();
        for r in [0.7, 1.3] {
            let sr = tc::structure_equation_residuals(&cx, &m, r, lambda, mu).unwrap();
            assert!(sr.d_omega <= 1e-7, "{name} r={r} d_omega {}", sr.d_omega);
            assert!(sr.d_t <= 1e-7, "{name} r={r} d_t {}", sr.d_t);
            assert!(sr.d_theta <= 1e-7, "{name} r={r} d_theta {}", sr.d_theta);
            // cross-family control: the other pair must fail loudly
            let (ol, om) = if lambda == -0.125 { (0.4, -0.08) } else { (-0.125, 1.0) };
            let bad = tc::structure_equation_residuals(&cx, &m, r, ol, om).unwrap();
            assert!(bad.d_theta >= 1e-2, "{name} r={r} control {}", bad.d_theta);
        }
    }
    pass(7);
}

#[test]
fn acceptance_08_lambda_quadratic() {
    let cx = ctx();
    for (name, lambda) in [("aso4", -0.125), ("cp2", -0.125), ("heis", 0.4), ("su21", 0.4)] {
        let m = builtin_model(name).unwrap();
        for r in [0.6, 1.0, 2.5] {
            let res = tc::lambda_quadratic_residual(&cx, &m, r, lambda).unwrap();
            assert!(res <= 1e-8, "{name} r={r}: {res}");
        }
    }
    let m = builtin_model("aso4").unwrap();
    assert!(tc::lambda_quadratic_residual(&cx, &m, 1.0, 1.0 / 6.0).unwrap() >= 1e-2);
    pass(8);
}

#[test]
fn acceptance_09_x_component_vanishes() {
    let cx = ctx();
    for name in MODELS_WITH_TORSION {
        let m = builtin_model(name).unwrap();
        for r in [0.8, 1.9] {
            let nt = tc::nabla_t_numeric(&cx, &m, r).unwrap();
            let scale = nt.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let inv = decompose_nabla_t(&cx, &nt).unwrap();
            let xn = inv.x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(xn <= 1e-8 * scale.max(1.0), "{name} r={r}: {xn}");
        }
    }
    pass(9);
}

#[test]
fn acceptance_10_orbit_invariants() {
    let cx = ctx();

    // aso4: (mu1, mu2) = (2/3t, 2/3t)
    let m = builtin_model("aso4").unwrap();
    let samples = default_samples(&m);
    for p in tc::orbit_curve(&cx, &m, &samples).unwrap() {
        let want = 2.0 / (3.0 * p.r);
        assert!((p.mu1 - want).abs() <= 1e-9 * want);
        assert!((p.mu2 - want).abs() <= 1e-9 * want);
    }

    // cp2: the cubic is constant in r, equal to -2/27 (tensor reading) and
    // -16 after the x216 rescaling to the tau coefficients
    let m = builtin_model("cp2").unwrap();
    let samples = default_samples(&m);
    let pts = tc::orbit_curve(&cx, &m, &samples).unwrap();
    let mean = pts.iter().map(|p| p.cubic).sum::<f64>() / pts.len() as f64;
    let var = pts.iter().map(|p| (p.cubic - mean).powi(2)).sum::<f64>() / pts.len() as f64;
    assert!(var.sqrt() <= 1e-9 * mean.abs(), "std {} mean {mean}", var.sqrt());
    assert!((mean + 2.0 / 27.0).abs() <= 1e-9);
    assert!((216.0 * mean + 16.0).abs() <= 1e-7);

    // conjugation invariance of the normal form over 100 random rotations
    let tau = tc::torsion_two_form(&cx, &m, 1.0).unwrap();
    let t = tc::torsion_tensor(&cx, &tau, 1e-8).unwrap();
    let (b1, b2) = orbit_invariant(&cx.consts, &t, 1e-6).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut a: Mat7 = [[0.0; 7]; 7];
        for g in &cx.g2_mats {
            let c: f64 = rng.gen_range(-0.5..0.5);
            for i in 0..7 {
                for j in 0..7 {
                    a[i][j] += c * g[i][j];
                }
            }
        }
        let u = expm7(&a);
        let mut tc_ = [[0.0; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                let mut s = 0.0;
                for k in 0..7 {
                    for l in 0..7 {
                        s += u[i][k] * t[k][l] * u[j][l];
                    }
                }
                tc_[i][j] = s;
            }
        }
        let (c1, c2) = orbit_invariant(&cx.consts, &tc_, 1e-6).unwrap();
        assert!((c1 - b1).abs() <= 1e-8 && (c2 - b2).abs() <= 1e-8);
    }
    pass(10);
}

#[test]
fn acceptance_11_closure_checker() {
    let start = Instant::now();
    let pairs = closure_checker::solve_consistency().unwrap();
    let solve_time = start.elapsed();
    assert!(solve_time.as_secs() < 60, "solve took {solve_time:?}");
    assert_eq!(pairs, vec![(rat(-1, 8), rat_i(1)), (rat(2, 5), rat(-2, 25))]);
    for (l, m) in &pairs {
        let (ro, rt, rth) = closure_checker::closure_residual(l, m).unwrap();
        assert!(ro == rat_i(0) && rt == rat_i(0) && rth == rat_i(0));
    }
    let (_, rt0, _) = closure_checker::closure_residual(&rat_i(0), &rat_i(0)).unwrap();
    assert!(rt0 != rat_i(0));
    pass(11);
}

#[test]
fn acceptance_12_cli_golden_and_exit_codes() {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_g2ct"))
            .args(args)
            .output()
            .expect("spawn g2ct")
    };
    let o = run(&[
        "verify", "--model", "cp2", "--lambda", "-0.125", "--mu", "1", "--samples", "3",
        "--jobs", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let got: String = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            if l.trim_start().starts_with("\"wall_time_ms\"") {
                "  \"wall_time_ms\": 0\n".to_string()
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    assert_eq!(got, include_str!("golden/verify_cp2.json"));

    let o = run(&["verify", "--model", "aso4", "--lambda", "0.4", "--mu", "-0.08", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["verify", "--model", "so8"]);
    assert_eq!(o.status.code(), Some(2));
    pass(12);
}
