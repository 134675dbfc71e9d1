//! Acceptance gate for the workspace: nine end-to-end checks, one test each,
//! covering closed-form fidelity, Monte Carlo agreement, matched-power beam
//! ordering, scaling endpoints, outage diversity, policy regime structure,
//! network throughput, and bitwise reproducibility of the CLI selftest.
//!
//! Each test prints a single PASS line with the measured numbers; a failure
//! message carries the offending configuration.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use swipt_core::altbeams::{
    brb_avg_power, brb_avg_rate_orderstat, brb_outage, urb_avg_power, urb_avg_rate, urb_outage,
};
use swipt_core::analytic::{
    avg_power_ps, avg_power_ts, avg_rate_ps, avg_rate_ts, ps_outage, ps_rate,
    solve_a_bar_for_block_power, solve_a_bar_for_power_scaling, ts_outage_asymptotic,
    ts_outage_exact, ts_power_scaling, ts_rate_closed_n1, ts_rate_closed_n2, ts_rate_quadrature,
    ts_rate_scaling,
};
use swipt_core::channel::RngStream;
use swipt_core::mcsim::{estimate_avg_re, estimate_power_outage, network_sweep};
use swipt_core::{BeamScheme, McConfig, NetworkSpec, PointSource, SwitchPolicy, SystemParams};
use swipt_cli::runner::solve_alt_a_bar_for_power_scaling;

const SIGMA2_W: f64 = 1e-7;

fn sys(p_tx_w: f64, n_t: u32, theta: f64) -> SystemParams {
    SystemParams { p_tx: p_tx_w, n_t, theta, sigma2: SIGMA2_W, zeta: 1.0 }
}

fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Least-squares slope of y against x.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[test]
fn a1_closed_rate_forms_match_quadrature_on_random_grid() {
    let t0 = Instant::now();
    let mut rng = RngStream::new(271, 0).rng();
    let mut worst1 = 0.0f64;
    let mut worst2 = 0.0f64;
    for i in 0..50 {
        let h = rng.gen_range(0.05..5.0);
        let a_bar = rng.gen_range(0.01..10.0);
        // receive SNR scale theta P / sigma2 log-uniform in [10, 1e4]
        let snr = 10f64.powf(rng.gen_range(1.0..4.0));
        let p = sys(snr * SIGMA2_W / 1e-4, 2, 1e-4);

        let q1 = ts_rate_quadrature(&p, h, 1, a_bar).unwrap();
        let c1 = ts_rate_closed_n1(&p, h, a_bar);
        let e1 = rel(c1, q1);
        assert!(e1 < 1e-8, "point {i}: N=1 closed vs quadrature rel err {e1:.3e} at h={h}, a_bar={a_bar}, snr={snr}");
        worst1 = worst1.max(e1);

        let q2 = ts_rate_quadrature(&p, h, 2, a_bar).unwrap();
        let c2 = ts_rate_closed_n2(&p, h, a_bar).unwrap();
        let e2 = rel(c2, q2);
        assert!(e2 < 1e-6, "point {i}: N=2 closed vs quadrature rel err {e2:.3e} at h={h}, a_bar={a_bar}, snr={snr}");
        worst2 = worst2.max(e2);
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(10), "grid took {dt:?}, budget 10 s");
    println!(
        "PASS: 50-point random grid, worst rel err N=1 {worst1:.2e} (tol 1e-8), N=2 {worst2:.2e} (tol 1e-6), {:.2} s",
        dt.as_secs_f64()
    );
}

struct McCell {
    label: String,
    params: SystemParams,
    scheme: BeamScheme,
    policy: SwitchPolicy,
    rate: f64,
    power: f64,
    outage: f64,
}

#[test]
fn a2_monte_carlo_confirms_average_and_outage_analytics() {
    let t0 = Instant::now();
    const Q_HAT_W: f64 = 3e-5;
    let a_bar = 0.5;

    let mut cells = Vec::new();
    for (n_t, n) in [(2u32, 1u32), (2, 2), (4, 1), (4, 2), (4, 4)] {
        let p = sys(1.0, n_t, 1e-4);
        cells.push(McCell {
            label: format!("gaussian TS N={n} n_t={n_t}"),
            params: p,
            scheme: BeamScheme::gaussian(n),
            policy: SwitchPolicy::Ts { a_bar },
            rate: avg_rate_ts(&p, n, a_bar).unwrap(),
            power: avg_power_ts(&p, n, a_bar).unwrap(),
            outage: ts_outage_exact(&p, n, a_bar, Q_HAT_W).unwrap(),
        });
    }
    for tau in [0.2, 0.8] {
        let p = sys(1.0, 2, 1e-4);
        cells.push(McCell {
            label: format!("PS tau={tau} n_t=2"),
            params: p,
            scheme: BeamScheme::gaussian(1),
            policy: SwitchPolicy::Ps { tau },
            rate: avg_rate_ps(&p, tau).unwrap(),
            power: avg_power_ps(&p, tau),
            outage: ps_outage(&p, tau, Q_HAT_W),
        });
    }
    let p2 = sys(1.0, 2, 1e-4);
    cells.push(McCell {
        label: "unitary TS N=1 n_t=2".into(),
        params: p2,
        scheme: BeamScheme::unitary(1),
        policy: SwitchPolicy::Ts { a_bar },
        rate: urb_avg_rate(&p2, a_bar).unwrap(),
        power: urb_avg_power(&p2, a_bar).unwrap(),
        outage: urb_outage(&p2, a_bar, Q_HAT_W).unwrap(),
    });
    cells.push(McCell {
        label: "binary TS N=1 n_t=2".into(),
        params: p2,
        scheme: BeamScheme::binary(1),
        policy: SwitchPolicy::Ts { a_bar },
        rate: brb_avg_rate_orderstat(&p2, a_bar).unwrap(),
        power: brb_avg_power(&p2, a_bar).unwrap(),
        outage: brb_outage(&p2, a_bar, Q_HAT_W).unwrap(),
    });

    let cfg_avg = McConfig {
        n_channel_draws: 1_000_000,
        n_subblock_draws: 4,
        base_seed: 2024,
        worker_count: 4,
    };
    let cfg_out = McConfig { n_subblock_draws: 1, base_seed: 2025, ..cfg_avg };

    let mut max_z = 0.0f64;
    for c in &cells {
        let mc = estimate_avg_re(&c.params, c.scheme, c.policy, &cfg_avg);
        let (se_r, se_q) = match mc.source {
            PointSource::MonteCarlo { stderr_rate, stderr_power } => (stderr_rate, stderr_power),
            PointSource::Analytic => unreachable!("estimator must report stderr"),
        };
        assert!(se_r > 0.0 && se_q > 0.0, "{}: degenerate stderr", c.label);
        let z_r = (mc.rate - c.rate).abs() / se_r;
        let z_q = (mc.power - c.power).abs() / se_q;
        assert!(z_r <= 3.0, "{}: rate z={z_r:.2} (mc {} vs analytic {})", c.label, mc.rate, c.rate);
        assert!(z_q <= 3.0, "{}: power z={z_q:.2} (mc {} vs analytic {})", c.label, mc.power, c.power);

        let out = estimate_power_outage(&c.params, c.scheme, c.policy, Q_HAT_W, &cfg_out).unwrap();
        assert!(out.stderr > 0.0, "{}: degenerate outage stderr", c.label);
        let z_o = (out.mean - c.outage).abs() / out.stderr;
        assert!(z_o <= 3.0, "{}: outage z={z_o:.2} (mc {} vs analytic {})", c.label, out.mean, c.outage);
        max_z = max_z.max(z_r).max(z_q).max(z_o);
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(120), "sweep took {dt:?}, budget 120 s");
    println!(
        "PASS: {} configurations x (rate, power, outage) at 1e6 draws, max |z| = {max_z:.2} (tol 3), {:.1} s",
        cells.len(),
        dt.as_secs_f64()
    );
}

#[test]
fn a3_fewer_beams_win_at_matched_average_power() {
    let mut checked = 0u32;
    for n_t in [2u32, 4] {
        for pi_tenths in 1..=9u32 {
            let pi = f64::from(pi_tenths) / 10.0;
            let mut prev = f64::INFINITY;
            for n in 1..=n_t {
                let a_bar = solve_a_bar_for_power_scaling(n_t, n, pi).unwrap();
                let pi_back = ts_power_scaling(n_t, n, a_bar).unwrap();
                assert!((pi_back - pi).abs() < 1e-9, "solver residual at n_t={n_t}, N={n}, Pi={pi}");
                let delta = ts_rate_scaling(n_t, n, a_bar).unwrap();
                assert!(
                    delta > 1.0 - pi + 1e-6,
                    "n_t={n_t}, N={n}, Pi={pi}: Delta={delta} does not beat the PS line {}",
                    1.0 - pi
                );
                assert!(
                    delta < prev - 1e-6,
                    "n_t={n_t}, N={n}, Pi={pi}: Delta={delta} not below the N-1 value {prev}"
                );
                prev = delta;
                checked += 1;
            }
        }
    }
    println!(
        "PASS: {checked} (n_t, N, Pi) cells: Delta > 1 - Pi and strictly decreasing in N at matched power"
    );
}

#[test]
fn a4_scaling_endpoints_are_exact() {
    for n_t in [2u32, 4] {
        for n in [1u32, 2] {
            let d0 = ts_rate_scaling(n_t, n, 0.0).unwrap();
            let p0 = ts_power_scaling(n_t, n, 0.0).unwrap();
            let d_inf = ts_rate_scaling(n_t, n, 1e4).unwrap();
            let p_inf = ts_power_scaling(n_t, n, 1e4).unwrap();
            assert!(d0.abs() <= 1e-9, "Delta(0)={d0} at n_t={n_t}, N={n}");
            assert!((p0 - 1.0).abs() <= 1e-9, "Pi(0)={p0} at n_t={n_t}, N={n}");
            assert!((d_inf - 1.0).abs() <= 1e-9, "Delta(1e4)={d_inf} at n_t={n_t}, N={n}");
            assert!(p_inf.abs() <= 1e-9, "Pi(1e4)={p_inf} at n_t={n_t}, N={n}");
        }
    }
    println!(
        "PASS: Delta(0)=0, Pi(0)=1, Delta(1e4)=1, Pi(1e4)=0 within 1e-9 for n_t in {{2,4}}, N in {{1,2}}"
    );
}

#[test]
fn a5_outage_slopes_match_antenna_count_and_ratio_law_drifts_slowly() {
    const Q_HAT_W: f64 = 1e-6;
    let p_dbm: Vec<f64> = (0..13).map(|i| 40.0 + 2.5 * f64::from(i)).collect();
    let ln_p: Vec<f64> = p_dbm.iter().map(|&d| dbm_to_w(d).ln()).collect();

    let mut slopes = Vec::new();
    for n_t in [2u32, 4] {
        let ps: Vec<f64> = p_dbm
            .iter()
            .map(|&d| ps_outage(&sys(dbm_to_w(d), n_t, 1e-4), 0.5, Q_HAT_W).ln())
            .collect();
        let d_ps = -ls_slope(&ln_p, &ps);
        assert!((d_ps - f64::from(n_t)).abs() < 0.15, "PS slope {d_ps:.4} at n_t={n_t}");

        let ts: Vec<f64> = p_dbm
            .iter()
            .map(|&d| ts_outage_exact(&sys(dbm_to_w(d), n_t, 1e-4), 1, 0.0, Q_HAT_W).unwrap().ln())
            .collect();
        let d_ts = -ls_slope(&ln_p, &ts);
        assert!((d_ts - f64::from(n_t)).abs() < 0.15, "TS a_bar=0 slope {d_ts:.4} at n_t={n_t}");
        slopes.push((n_t, d_ps, d_ts));
    }

    // a fixed positive threshold destroys the power-law decay: the local
    // slope collapses well below one and keeps flattening with P
    let out05: Vec<f64> = p_dbm
        .iter()
        .map(|&d| ts_outage_exact(&sys(dbm_to_w(d), 2, 1e-4), 1, 0.5, Q_HAT_W).unwrap().ln())
        .collect();
    let s_low = -ls_slope(&ln_p[..5], &out05[..5]);
    let s_top = -ls_slope(&ln_p[8..], &out05[8..]);
    assert!(s_top < 0.3, "top-decade slope {s_top:.4} should sit below 0.3");
    assert!(s_top < s_low, "slope must flatten with P: top {s_top:.4} vs low {s_low:.4}");

    // exact outage against the (N a_bar / ln(zeta theta P))^{n_t} law over a
    // deep-outage window; the ratio must drift slowly across the window
    let mut ratios = Vec::new();
    for i in 0..9 {
        let p = sys(dbm_to_w(60.0 + 5.0 * f64::from(i)), 2, 1.0);
        let exact = ts_outage_exact(&p, 1, 0.5, 0.5).unwrap();
        let asym = ts_outage_asymptotic(&p, 1, 0.5, 0.5);
        assert!(asym.in_regime, "asymptote out of regime at index {i}");
        ratios.push(exact / asym.value);
    }
    let drift = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 0.20, "ratio drift {drift:.4} over the window (limit 0.20)");

    println!(
        "PASS: diversity slopes PS/TS {:.3}/{:.3} (n_t=2), {:.3}/{:.3} (n_t=4); finite-threshold top slope {s_top:.3} < 0.3; ratio drift {drift:.3} < 0.20",
        slopes[0].1, slopes[0].2, slopes[1].1, slopes[1].2
    );
}

#[test]
fn a6_policy_regimes_order_as_ps_then_wide_then_narrow_ts() {
    // channel vector (1.0, 0.56) across two antennas
    let h = (1.0f64 + 0.56f64.powi(2)) / 2.0;
    let p = sys(1.0, 2, 1e-4);
    let q_cap_w = p.zeta * p.rx_power_w() * h;

    let m = 400usize;
    // guaranteed-power grid as a fraction of theta P, strictly inside (0, h)
    let fracs: Vec<f64> =
        (0..m).map(|i| (1e-4 + (0.999 - 1e-4) * i as f64 / (m - 1) as f64) * h).collect();

    let mut best = Vec::with_capacity(m);
    for &frac in &fracs {
        let q_w = frac * p.rx_power_w();
        let tau = 1.0 - q_w / q_cap_w;
        let r_ps = ps_rate(&p, h, tau);
        let a2 = solve_a_bar_for_block_power(&p, h, 2, q_w).unwrap();
        let r_ts2 = ts_rate_closed_n2(&p, h, a2)
            .unwrap_or_else(|_| ts_rate_quadrature(&p, h, 2, a2).unwrap());
        let a1 = solve_a_bar_for_block_power(&p, h, 1, q_w).unwrap();
        let r_ts1 = ts_rate_closed_n1(&p, h, a1);

        let cand = [r_ps, r_ts2, r_ts1];
        let mut k = 0;
        for j in 1..3 {
            if cand[j] > cand[k] {
                k = j;
            }
        }
        best.push(k);
    }

    let switches: Vec<usize> = (0..m - 1).filter(|&i| best[i] != best[i + 1]).collect();
    assert_eq!(best[0], 0, "PS must win as the power target vanishes");
    assert_eq!(best[m - 1], 2, "one-beam TS must win near the harvest cap");
    assert_eq!(switches.len(), 2, "expected exactly two regime changes, got {switches:?}");
    assert_eq!(best[switches[0] + 1], 1, "middle regime must be two-beam TS");

    let qth2 = fracs[switches[0]];
    let qth1 = fracs[switches[1]];
    assert!(0.0 < qth2 && qth2 < qth1 && qth1 < h);
    assert!((qth2 - 0.0395).abs() < 0.005, "first threshold {qth2:.4} vs expected 0.0395");
    assert!((qth1 - 0.2385).abs() < 0.005, "second threshold {qth1:.4} vs expected 0.2385");
    println!(
        "PASS: best policy runs PS -> two-beam TS -> one-beam TS; Q/(theta P) regime edges {qth2:.4} and {qth1:.4}"
    );
}

#[test]
fn a7_network_throughput_peaks_where_expected() {
    let t0 = Instant::now();
    let spec = NetworkSpec {
        n_users: 10,
        dist_range: (3.0, 10.0),
        pathloss_ref_db: -20.0,
        pathloss_exp: 3.0,
        shadow_sigma_db: 3.72,
        rate_target: 0.0,
        beam: BeamScheme::gaussian(1),
        params: SystemParams { p_tx: 1.0, n_t: 2, theta: 1.0, sigma2: SIGMA2_W, zeta: 0.5 },
    };
    let targets: Vec<f64> = (0..40).map(|i| 0.2 + (12.0 - 0.2) * f64::from(i) / 39.0).collect();
    let seeds: Vec<u64> = (0..24).collect();
    let cfg =
        McConfig { n_channel_draws: 4096, n_subblock_draws: 1, base_seed: 0, worker_count: 4 };

    let pts = network_sweep(&spec, &targets, &seeds, &cfg).unwrap();
    let (kmax, peak) = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.throughput.total_cmp(&b.1.throughput))
        .unwrap();
    let c_star = peak.throughput;
    let q_star = peak.avg_sum_power_w;

    assert!(kmax > 0 && kmax + 1 < pts.len(), "throughput peak must be interior, got index {kmax}");
    let c0 = pts[0].throughput;
    let ideal0 = f64::from(spec.n_users) * targets[0];
    assert!((c0 - ideal0).abs() < 0.1 * ideal0, "low-target throughput {c0:.3} vs ideal {ideal0:.3}");
    assert!(
        pts.last().unwrap().throughput < 0.5 * c_star,
        "throughput must collapse at aggressive targets"
    );
    assert!(rel(c_star, 46.8) < 0.15, "peak throughput {c_star:.2} vs reference 46.8");
    assert!(rel(q_star, 424e-6) < 0.15, "peak sum power {:.1} uW vs reference 424 uW", q_star * 1e6);
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(300), "sweep took {dt:?}, budget 300 s");
    println!(
        "PASS: peak {c_star:.1} bits/s/Hz at target {:.2} with sum power {:.1} uW ({:.1} s)",
        targets[kmax],
        q_star * 1e6,
        dt.as_secs_f64()
    );
}

#[test]
fn a8_beam_scheme_rate_ordering_at_matched_power() {
    let pi = 0.9;
    let a_g = solve_a_bar_for_power_scaling(2, 1, pi).unwrap();
    let a_u = solve_alt_a_bar_for_power_scaling(pi).unwrap();
    assert!((ts_power_scaling(2, 1, a_g).unwrap() - pi).abs() < 1e-12);
    assert!(((1.0 + a_u) * (-a_u).exp() - pi).abs() < 1e-12);
    let tau = 1.0 - pi;

    let mut min_gap_gu = f64::INFINITY;
    let mut min_gap_up = f64::INFINITY;
    let mut max_ub = 0.0f64;
    for p_dbm in 10..=40 {
        let p = sys(dbm_to_w(f64::from(p_dbm)), 2, 1e-4);
        let r_g = avg_rate_ts(&p, 1, a_g).unwrap();
        let r_u = urb_avg_rate(&p, a_u).unwrap();
        let r_b = brb_avg_rate_orderstat(&p, a_u).unwrap();
        let r_p = avg_rate_ps(&p, tau).unwrap();
        assert!(r_g > r_u, "gaussian {r_g} <= unitary {r_u} at {p_dbm} dBm");
        assert!((r_u - r_b).abs() <= 1e-10, "unitary {r_u} vs binary {r_b} at {p_dbm} dBm");
        assert!(r_u > r_p, "unitary {r_u} <= PS {r_p} at {p_dbm} dBm");
        min_gap_gu = min_gap_gu.min(r_g - r_u);
        min_gap_up = min_gap_up.min(r_u - r_p);
        max_ub = max_ub.max((r_u - r_b).abs());
    }
    println!(
        "PASS: gaussian > unitary = binary > PS at every P in 10..=40 dBm (thresholds {a_g:.6}/{a_u:.6}, min gaps {min_gap_gu:.3e}/{min_gap_up:.3e}, |U-B| <= {max_ub:.1e})"
    );
}

#[test]
fn a9_selftest_output_is_bitwise_reproducible() {
    let exe = env!("CARGO_BIN_EXE_expcli");
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, sub: &str| -> Vec<u8> {
        let out = dir.path().join(sub);
        let st = Command::new(exe)
            .args(["selftest", "--workers", workers, "--out-dir", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(
            st.status.success(),
            "selftest (workers {workers}) failed: {}",
            String::from_utf8_lossy(&st.stderr)
        );
        std::fs::read(out.join("selftest.csv")).unwrap()
    };
    let first = run("1", "w1a");
    let second = run("1", "w1b");
    let wide = run("8", "w8");
    assert!(!first.is_empty());
    assert_eq!(first, second, "repeat run with one worker must be byte-identical");
    assert_eq!(first, wide, "worker count must not change the bytes");
    println!(
        "PASS: selftest CSV byte-identical across a rerun and worker counts 1 vs 8 ({} bytes)",
        first.len()
    );
}
