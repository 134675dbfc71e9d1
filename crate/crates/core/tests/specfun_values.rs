//! Regression values for the special-function kernels, frozen from a
//! high-precision arbitrary-precision computation (40 significant digits,
//! rounded to f64 here).

// Pinned references keep all their computed digits.
#![allow(clippy::excessive_precision)]

use swipt_core::specfun;

fn assert_rel(got: f64, want: f64, rel: f64, what: &str) {
    let err = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
    assert!(err <= rel, "{what}: got {got:e}, want {want:e}, rel err {err:e} > {rel:e}");
}

#[test]
fn exponential_integral_reference_values() {
    let cases = [
        (0.001523, 5.9113799604815312968),
        (0.02, 3.3547077833097095101),
        (0.5, 0.55977359477616081175),
        (1.0, 0.21938393439552027368),
        (2.0, 0.048900510708061119567),
        (10.0, 4.1569689296853242774e-6),
        (30.0, 3.0215520106888125448e-15),
    ];
    for (x, want) in cases {
        assert_rel(specfun::exp_integral_e1(x), want, 1e-13, &format!("E1({x})"));
        // scaled variant agrees where the plain one does not underflow
        assert_rel(specfun::exe1(x), x.exp() * want, 1e-12, &format!("exe1({x})"));
    }
    // scaled form survives far past the e^-x underflow point
    let big = specfun::exe1(5000.0);
    assert!(big > 0.0 && big < 1.0 / 5000.0, "exe1(5000) = {big}");
    assert!(big > 1.0 / 5001.0, "asymptotic bracket 1/(x+1) < exe1(x) < 1/x");
}

#[test]
fn bessel_k_reference_values() {
    let cases = [
        (0.0, 1.0, 0.42102443824070833334),
        (0.5, 2.0, 0.11993777196806144737),
        (1.0, 0.5, 1.6564411200033008937),
        (2.0, 1.0, 1.6248388986351774828),
        (3.0, 4.0, 0.029884924416755671475),
        (4.0, 0.04, 18747500.249966694285),
        (5.0, 6.0, 0.008023718980129033413),
        (1.5, 2.5, 0.091092320415613984504),
        (10.0, 3.0, 2459.6204220569467739),
    ];
    for (nu, x, want) in cases {
        assert_rel(specfun::bessel_k(nu, x).unwrap(), want, 1e-10, &format!("K_{nu}({x})"));
    }
    // half-integer closed form K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
    let want = (std::f64::consts::PI / 4.0).sqrt() * (-2.0f64).exp();
    assert_rel(specfun::bessel_k(0.5, 2.0).unwrap(), want, 1e-12, "K_{1/2}(2) closed form");
}

#[test]
fn bessel_i_reference_values() {
    let cases = [
        (0.0, 1.0, 1.2660658777520083356),
        (2.0, 3.5, 3.8320120480778422468),
        (1.5, 10.0, 2500.9061549421178497),
    ];
    for (nu, x, want) in cases {
        assert_rel(specfun::bessel_i(nu, x), want, 1e-11, &format!("I_{nu}({x})"));
    }
}

#[test]
fn digamma_reference_values() {
    let euler = 0.57721566490153286061;
    assert_rel(specfun::digamma(1.0), -euler, 1e-13, "digamma(1)");
    assert_rel(specfun::digamma(2.0), 1.0 - euler, 1e-13, "digamma(2)");
    assert_rel(
        specfun::digamma(0.5),
        -euler - 2.0 * std::f64::consts::LN_2,
        1e-13,
        "digamma(1/2)",
    );
    assert_rel(specfun::digamma(4.6568), 1.4271332349371946021, 1e-13, "digamma(4.6568)");
    assert_rel(specfun::digamma(10.25), 2.2777047906867239693, 1e-13, "digamma(10.25)");
}

#[test]
fn upper_incomplete_gamma_reference_values() {
    let cases = [
        (1.0, 1.0, 0.3678794411714423216),
        (2.0, 0.5, 0.90979598956895013541),
        (3.0, 7.5, 0.040513430113328809962),
        (0.5, 0.2, 0.9342413831022496609),
        (2.5, 4.0, 0.20769032981158048375),
        (5.0, 2.0, 22.736327583750932238),
        (4.0, 30.0, 2.7966192004675745824e-9),
    ];
    for (a, x, want) in cases {
        assert_rel(
            specfun::upper_incomplete_gamma(a, x),
            want,
            1e-13,
            &format!("Gamma({a},{x})"),
        );
    }
}

#[test]
fn integer_upper_gamma_matches_finite_sum() {
    // Gamma(N, x) = (N-1)! e^{-x} sum_{k<N} x^k/k! for integer N
    for n in 1u32..=6 {
        for x in [0.3, 2.5, 9.0] {
            let mut sum = 0.0;
            let mut term = 1.0;
            for k in 0..n {
                if k > 0 {
                    term *= x / k as f64;
                }
                sum += term;
            }
            let want = specfun::factorial(n - 1) * (-x).exp() * sum;
            assert_rel(
                specfun::upper_incomplete_gamma(n as f64, x),
                want,
                1e-13,
                &format!("Gamma({n},{x}) finite sum"),
            );
        }
    }
}

#[test]
fn gamma_function_values() {
    assert_rel(specfun::gamma(0.5), std::f64::consts::PI.sqrt(), 1e-14, "gamma(1/2)");
    assert_eq!(specfun::gamma(1.0), 1.0);
    assert_eq!(specfun::gamma(5.0), 24.0);
    assert_eq!(specfun::factorial(10), 3628800.0);
    assert_rel(specfun::ln_gamma(101.0), (2..=100).map(|k| (k as f64).ln()).sum(), 1e-14, "ln_gamma(101)");
}

#[test]
fn erfc_and_normal_cdf_values() {
    assert_eq!(specfun::erfc(0.0), 1.0);
    assert_rel(specfun::erfc(1.0), 0.15729920705028513066, 1e-13, "erfc(1)");
    assert_rel(specfun::erfc(2.5), 0.00040695201744495893956, 1e-13, "erfc(2.5)");
    assert_eq!(specfun::normal_cdf(0.0), 0.5);
    assert_rel(specfun::normal_cdf(1.96), 0.97500210485177956379, 1e-13, "Phi(1.96)");
    assert_rel(specfun::normal_cdf(-3.0), 0.0013498980316300945267, 1e-13, "Phi(-3)");
}

#[test]
fn meijer_g_reference_values() {
    let cases = [
        (1u32, 1.0, 0.219383934395520274),
        (2, 0.5, 1.16630425448879424),
        (2, 3.0, 0.0628354494620609804),
        (1, 0.25, 1.04428263444373819),
        (3, 2.0, 0.774477437599185699),
        (4, 1.5, 5.23006831751971486),
        (2, 0.001, 7.3305398639695243),
        (1, 20.0, 9.83552529064988169e-11),
    ];
    for (n, x, want) in cases {
        assert_rel(specfun::meijer_g_special(n, x).unwrap(), want, 5e-12, &format!("G({n},{x})"));
    }
}

#[test]
fn meijer_g_reduces_to_exponential_integrals() {
    // G(1,x) = E1(x) and G(2,x) = E1(x) + e^{-x}
    for x in [0.05, 0.7, 3.0, 12.0] {
        let e1 = specfun::exp_integral_e1(x);
        assert_rel(specfun::meijer_g_special(1, x).unwrap(), e1, 1e-12, &format!("G(1,{x})"));
        assert_rel(
            specfun::meijer_g_special(2, x).unwrap(),
            e1 + (-x).exp(),
            1e-12,
            &format!("G(2,{x})"),
        );
    }
}
