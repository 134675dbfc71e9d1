//! Experiment dispatch: lowers a validated plan to CSV rows and a plot
//! script, per engine. Sweep points run in order; any parallelism lives
//! inside the core estimators, so output bytes never depend on timing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use swipt_core::altbeams;
use swipt_core::analytic;
use swipt_core::channel::ChannelRealization;
use swipt_core::mcsim::{self, McConfig};
use swipt_core::params::{BeamKind, BeamScheme, PointSource, REPoint, SwitchPolicy, SystemParams};
use swipt_core::rootfind;

use crate::csvout::{fmt_f64, CsvTable, Provenance};
use crate::errors::CliError;
use crate::plot::{write_script, PlotLine, PlotSpec};
use crate::spec::{watts_to_dbm, Engine, ExperimentSpec, PhysBase, Plan};

/// Threshold standing in for "never decode"; large enough that every scaling
/// and rate expression has converged to its limit at double precision.
const A_BAR_CAP: f64 = 1e4;

pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub plot_path: PathBuf,
    pub rows: usize,
    pub wall_secs: f64,
    /// Max |analytic - MC| / stderr over sweep points where both engines ran.
    pub max_mc_z: Option<f64>,
}

fn numeric_at(axis: &str, x: f64, e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("at {axis} = {x:.6}: {e}"))
}

/// Equal-gain coefficient vector with block channel power exactly `h`.
fn chan_of_gain(h: f64, n_t: u32) -> ChannelRealization {
    ChannelRealization::from_coefficients(vec![Complex64::new(h.sqrt(), 0.0); n_t as usize])
}

/// Maps the [0, 1] trace parameter to a TS threshold covering all-harvest
/// (u = 0) through effectively-always-decode (u = 1).
fn u_to_a_bar(u: f64) -> f64 {
    if u >= 1.0 {
        A_BAR_CAP
    } else {
        (u / (1.0 - u)).min(A_BAR_CAP)
    }
}

/// Gaussian-scheme block rate, routed to the tightest available form.
fn ts_block_rate(sys: &SystemParams, h: f64, n_beams: u32, a_bar: f64) -> Result<f64, CliError> {
    let r = match n_beams {
        1 => Ok(analytic::ts_rate_closed_n1(sys, h, a_bar)),
        2 => analytic::ts_rate_closed_n2(sys, h, a_bar)
            .or_else(|_| analytic::ts_rate_quadrature(sys, h, 2, a_bar)),
        n => analytic::ts_rate_quadrature(sys, h, n, a_bar),
    };
    r.map_err(|e| CliError::Numeric(format!("block rate at h = {h:.6}: {e}")))
}

fn mc_stderrs(p: &REPoint) -> (f64, f64) {
    match p.source {
        PointSource::MonteCarlo { stderr_rate, stderr_power } => (stderr_rate, stderr_power),
        PointSource::Analytic => (0.0, 0.0),
    }
}

#[derive(Default)]
struct ZTrack(Option<f64>);

impl ZTrack {
    fn update(&mut self, analytic: f64, mc: f64, stderr: f64) {
        if stderr > 0.0 && analytic.is_finite() && mc.is_finite() {
            let z = (analytic - mc).abs() / stderr;
            self.0 = Some(self.0.map_or(z, |m| m.max(z)));
        }
    }
}

pub fn run_experiment(
    spec: &ExperimentSpec,
    spec_bytes: &[u8],
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let plan = spec.plan()?;
    let prov = Provenance::new(&spec.name, spec.mc.base_seed, spec_bytes);
    let csv_path = out_dir.join(&spec.output);
    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.output.clone());

    let t0 = Instant::now();
    let (table, mut plot, z) = match plan {
        Plan::ReTradeoff { base, h_users, max_beams } => run_re_tradeoff(spec, &prov, base, &h_users, max_beams)?,
        Plan::RateVsH { base, n_beams, policy, h_fixed } => run_rate_vs_h(spec, &prov, base, n_beams, policy, h_fixed)?,
        Plan::PowerVsH { base, scheme, policy } => run_power_vs_h(spec, &prov, base, scheme, policy)?,
        Plan::ScalingTradeoff { n_t, max_beams } => run_scaling_tradeoff(spec, &prov, n_t, max_beams)?,
        Plan::OutageVsP { base, scheme, policy, q_hat_w } => {
            run_outage_vs_p(spec, &prov, base, scheme, policy, q_hat_w)?
        }
        Plan::RateVsPMatchedPower { base, pi_target } => run_matched_power(spec, &prov, base, pi_target)?,
        Plan::NetworkThroughput { net, seeds } => run_network(spec, &prov, &net, &seeds)?,
        Plan::BeamComparison { base, a_bar_fixed } => run_beam_comparison(spec, &prov, base, a_bar_fixed)?,
    };
    let wall_secs = t0.elapsed().as_secs_f64();

    table.write_to(&csv_path)?;
    plot.csv_file = csv_name;
    let plot_path = csv_path.with_extension("gnuplot");
    write_script(&plot, &plot_path)?;

    Ok(RunOutcome { csv_path, plot_path, rows: table.len(), wall_secs, max_mc_z: z.0 })
}

type KindOutput = (CsvTable, PlotSpec, ZTrack);

fn base_plot(title: &str, xlabel: &str, ylabel: &str) -> PlotSpec {
    PlotSpec {
        csv_file: String::new(),
        title: title.to_string(),
        xlabel: xlabel.to_string(),
        ylabel: ylabel.to_string(),
        logscale_y: false,
        lines: Vec::new(),
    }
}

fn run_re_tradeoff(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    h_users: &[f64],
    max_beams: u32,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "policy",
        "policy_param",
        "rate_bps_hz",
        "power_w",
        "stderr_rate_bps_hz",
        "stderr_power_w",
    ]);
    let sys = base.sys_fixed();
    let mut z = ZTrack::default();

    enum Trace {
        Ps,
        Ts(u32),
    }
    let mut traces = vec![("ps".to_string(), Trace::Ps)];
    for n in 1..=max_beams {
        traces.push((format!("ts_n{n}"), Trace::Ts(n)));
    }

    for (label, trace) in &traces {
        for &u in &spec.sweep.values() {
            let (policy, param, scheme) = match trace {
                Trace::Ps => (SwitchPolicy::Ps { tau: u }, u, BeamScheme::gaussian(1)),
                Trace::Ts(n) => {
                    let a = u_to_a_bar(u);
                    (SwitchPolicy::Ts { a_bar: a }, a, BeamScheme::gaussian(*n))
                }
            };

            // multicast: the common rate and the guaranteed harvest are both
            // limited by the worst user
            let mut a_rate = f64::INFINITY;
            let mut a_power = f64::INFINITY;
            for &h in h_users {
                let (r, q) = match (trace, policy) {
                    (Trace::Ps, SwitchPolicy::Ps { tau }) => {
                        (analytic::ps_rate(&sys, h, tau), analytic::ps_power(&sys, h, tau))
                    }
                    (Trace::Ts(n), SwitchPolicy::Ts { a_bar }) => {
                        (ts_block_rate(&sys, h, *n, a_bar)?, analytic::ts_power(&sys, h, *n, a_bar))
                    }
                    _ => unreachable!("trace kind fixes the policy kind"),
                };
                a_rate = a_rate.min(r);
                a_power = a_power.min(q);
            }
            if spec.has_engine(Engine::Analytic) {
                table.push_row(
                    prov,
                    Engine::Analytic.tag(),
                    vec![
                        label.clone(),
                        fmt_f64(param),
                        fmt_f64(a_rate),
                        fmt_f64(a_power),
                        fmt_f64(f64::NAN),
                        fmt_f64(f64::NAN),
                    ],
                );
            }

            if spec.has_engine(Engine::Montecarlo) {
                let mut m_rate = f64::INFINITY;
                let mut m_power = f64::INFINITY;
                let mut se_rate = 0.0;
                let mut se_power = 0.0;
                for &h in h_users {
                    let chan = chan_of_gain(h, base.n_t);
                    let pt = mcsim::estimate_block_re(&sys, scheme, policy, &chan, &spec.mc);
                    let (sr, sq) = mc_stderrs(&pt);
                    if pt.rate < m_rate {
                        m_rate = pt.rate;
                        se_rate = sr;
                    }
                    if pt.power < m_power {
                        m_power = pt.power;
                        se_power = sq;
                    }
                }
                z.update(a_rate, m_rate, se_rate);
                z.update(a_power, m_power, se_power);
                table.push_row(
                    prov,
                    Engine::Montecarlo.tag(),
                    vec![
                        label.clone(),
                        fmt_f64(param),
                        fmt_f64(m_rate),
                        fmt_f64(m_power),
                        fmt_f64(se_rate),
                        fmt_f64(se_power),
                    ],
                );
            }
        }
    }

    let mut plot = base_plot(&spec.name, "guaranteed harvested power [W]", "multicast rate [bit/s/Hz]");
    for (label, _) in &traces {
        if spec.has_engine(Engine::Analytic) {
            plot.lines.push(
                PlotLine::new("power_w", "rate_bps_hz", label)
                    .filter("engine", "analytic")
                    .filter("policy", label)
                    .style("lines"),
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            plot.lines.push(
                PlotLine::new("power_w", "rate_bps_hz", &format!("{label} (MC)"))
                    .filter("engine", "montecarlo")
                    .filter("policy", label)
                    .style("points"),
            );
        }
    }
    Ok((table, plot, z))
}

fn run_rate_vs_h(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    n_beams: u32,
    policy: SwitchPolicy,
    h_fixed: Option<f64>,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "h_linear",
        "p_dbm",
        "rate_bps_hz",
        "rate_highpower_bps_hz",
        "stderr_rate_bps_hz",
    ]);
    let mut z = ZTrack::default();
    let axis = spec.sweep.axis.clone();

    for &x in &spec.sweep.values() {
        let (h, p_w) = match h_fixed {
            Some(h) => (h, crate::spec::unit_convert(x, "dBm").expect("dBm is a known unit")),
            None => (x, base.p_w.expect("plan fixes p when h is swept")),
        };
        let sys = base.sys_at(p_w);

        let (a_rate, approx) = match policy {
            SwitchPolicy::Ps { tau } => (analytic::ps_rate(&sys, h, tau), f64::NAN),
            SwitchPolicy::Ts { a_bar } => {
                let rate = ts_block_rate(&sys, h, n_beams, a_bar).map_err(|e| numeric_at(&axis, x, e))?;
                let approx = if a_bar > 0.0 {
                    analytic::ts_rate_highpower_approx(&sys, h, n_beams, a_bar).unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                };
                (rate, approx)
            }
        };
        if spec.has_engine(Engine::Analytic) {
            table.push_row(
                prov,
                Engine::Analytic.tag(),
                vec![
                    fmt_f64(h),
                    fmt_f64(watts_to_dbm(p_w)),
                    fmt_f64(a_rate),
                    fmt_f64(approx),
                    fmt_f64(f64::NAN),
                ],
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            let chan = chan_of_gain(h, base.n_t);
            let pt = mcsim::estimate_block_re(&sys, BeamScheme::gaussian(n_beams), policy, &chan, &spec.mc);
            let (sr, _) = mc_stderrs(&pt);
            z.update(a_rate, pt.rate, sr);
            table.push_row(
                prov,
                Engine::Montecarlo.tag(),
                vec![
                    fmt_f64(h),
                    fmt_f64(watts_to_dbm(p_w)),
                    fmt_f64(pt.rate),
                    fmt_f64(f64::NAN),
                    fmt_f64(sr),
                ],
            );
        }
    }

    let x_col = if h_fixed.is_some() { "p_dbm" } else { "h_linear" };
    let xlabel = if h_fixed.is_some() { "transmit power [dBm]" } else { "block channel power (linear)" };
    let mut plot = base_plot(&spec.name, xlabel, "rate [bit/s/Hz]");
    if spec.has_engine(Engine::Analytic) {
        plot.lines
            .push(PlotLine::new(x_col, "rate_bps_hz", "exact").filter("engine", "analytic").style("lines"));
        if matches!(policy, SwitchPolicy::Ts { a_bar } if a_bar > 0.0) {
            plot.lines.push(
                PlotLine::new(x_col, "rate_highpower_bps_hz", "high-power approx")
                    .filter("engine", "analytic")
                    .style("lines dashtype 2"),
            );
        }
    }
    if spec.has_engine(Engine::Montecarlo) {
        plot.lines
            .push(PlotLine::new(x_col, "rate_bps_hz", "MC").filter("engine", "montecarlo").style("points"));
    }
    Ok((table, plot, z))
}

fn run_power_vs_h(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    scheme: BeamScheme,
    policy: SwitchPolicy,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&["h_linear", "power_w", "stderr_power_w"]);
    let sys = base.sys_fixed();
    let mut z = ZTrack::default();

    for &h in &spec.sweep.values() {
        let a_power = match (scheme.kind, policy) {
            (_, SwitchPolicy::Ps { tau }) => analytic::ps_power(&sys, h, tau),
            (BeamKind::Gaussian, SwitchPolicy::Ts { a_bar }) => analytic::ts_power(&sys, h, scheme.n_beams, a_bar),
            (BeamKind::Unitary, SwitchPolicy::Ts { a_bar }) => {
                altbeams::urb_block_power(&sys, h, a_bar).map_err(|e| numeric_at("h", h, e))?
            }
            (BeamKind::Binary, SwitchPolicy::Ts { .. }) => {
                unreachable!("plan rejects the binary scheme for this kind")
            }
        };
        if spec.has_engine(Engine::Analytic) {
            table.push_row(
                prov,
                Engine::Analytic.tag(),
                vec![fmt_f64(h), fmt_f64(a_power), fmt_f64(f64::NAN)],
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            let chan = chan_of_gain(h, base.n_t);
            let pt = mcsim::estimate_block_re(&sys, scheme, policy, &chan, &spec.mc);
            let (_, sq) = mc_stderrs(&pt);
            z.update(a_power, pt.power, sq);
            table.push_row(prov, Engine::Montecarlo.tag(), vec![fmt_f64(h), fmt_f64(pt.power), fmt_f64(sq)]);
        }
    }

    let mut plot = base_plot(&spec.name, "block channel power (linear)", "per-block harvested power [W]");
    if spec.has_engine(Engine::Analytic) {
        plot.lines
            .push(PlotLine::new("h_linear", "power_w", "exact").filter("engine", "analytic").style("lines"));
    }
    if spec.has_engine(Engine::Montecarlo) {
        plot.lines
            .push(PlotLine::new("h_linear", "power_w", "MC").filter("engine", "montecarlo").style("points"));
    }
    Ok((table, plot, z))
}

fn run_scaling_tradeoff(
    spec: &ExperimentSpec,
    prov: &Provenance,
    n_t: u32,
    max_beams: u32,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&["a_bar", "n_beams", "delta", "pi"]);
    for &a_bar in &spec.sweep.values() {
        for n in 1..=max_beams {
            let delta = analytic::ts_rate_scaling(n_t, n, a_bar).map_err(|e| numeric_at("a_bar", a_bar, e))?;
            let pi = analytic::ts_power_scaling(n_t, n, a_bar).map_err(|e| numeric_at("a_bar", a_bar, e))?;
            table.push_row(
                prov,
                Engine::Analytic.tag(),
                vec![fmt_f64(a_bar), n.to_string(), fmt_f64(delta), fmt_f64(pi)],
            );
        }
    }

    let mut plot = base_plot(&spec.name, "power scaling factor", "rate scaling factor");
    for n in 1..=max_beams {
        plot.lines.push(
            PlotLine::new("pi", "delta", &format!("N = {n}"))
                .filter("n_beams", &n.to_string())
                .style("linespoints"),
        );
    }
    Ok((table, plot, ZTrack::default()))
}

fn run_outage_vs_p(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    scheme: BeamScheme,
    policy: SwitchPolicy,
    q_hat_w: f64,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "p_dbm",
        "outage_prob",
        "outage_asymptotic",
        "asymptotic_in_regime",
        "stderr_outage",
    ]);
    let mut z = ZTrack::default();

    for &p_dbm in &spec.sweep.values() {
        let p_w = crate::spec::unit_convert(p_dbm, "dBm").expect("dBm is a known unit");
        let sys = base.sys_at(p_w);
        let ctx = |e: &dyn std::fmt::Display| numeric_at("p_dbm", p_dbm, e);

        let (exact, asym, in_regime) = match (scheme.kind, policy) {
            (BeamKind::Gaussian, SwitchPolicy::Ts { a_bar }) => {
                let exact = analytic::ts_outage_exact(&sys, scheme.n_beams, a_bar, q_hat_w)
                    .map_err(|e| ctx(&e))?;
                let asym = analytic::ts_outage_asymptotic(&sys, scheme.n_beams, a_bar, q_hat_w);
                (exact, asym.value, if asym.in_regime { 1.0 } else { 0.0 })
            }
            (BeamKind::Gaussian, SwitchPolicy::Ps { tau }) => {
                (analytic::ps_outage(&sys, tau, q_hat_w), f64::NAN, f64::NAN)
            }
            (BeamKind::Unitary, SwitchPolicy::Ts { a_bar }) => {
                (altbeams::urb_outage(&sys, a_bar, q_hat_w).map_err(|e| ctx(&e))?, f64::NAN, f64::NAN)
            }
            (BeamKind::Binary, SwitchPolicy::Ts { a_bar }) => {
                (altbeams::brb_outage(&sys, a_bar, q_hat_w).map_err(|e| ctx(&e))?, f64::NAN, f64::NAN)
            }
            _ => unreachable!("plan rejects PS with non-gaussian schemes"),
        };
        if spec.has_engine(Engine::Analytic) {
            table.push_row(
                prov,
                Engine::Analytic.tag(),
                vec![
                    fmt_f64(p_dbm),
                    fmt_f64(exact),
                    fmt_f64(asym),
                    fmt_f64(in_regime),
                    fmt_f64(f64::NAN),
                ],
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            let est = mcsim::estimate_power_outage(&sys, scheme, policy, q_hat_w, &spec.mc)
                .map_err(|e| numeric_at("p_dbm", p_dbm, e))?;
            z.update(exact, est.mean, est.stderr);
            table.push_row(
                prov,
                Engine::Montecarlo.tag(),
                vec![
                    fmt_f64(p_dbm),
                    fmt_f64(est.mean),
                    fmt_f64(f64::NAN),
                    fmt_f64(f64::NAN),
                    fmt_f64(est.stderr),
                ],
            );
        }
    }

    let mut plot = base_plot(&spec.name, "transmit power [dBm]", "power outage probability");
    plot.logscale_y = true;
    if spec.has_engine(Engine::Analytic) {
        plot.lines
            .push(PlotLine::new("p_dbm", "outage_prob", "exact").filter("engine", "analytic").style("lines"));
        if matches!((scheme.kind, policy), (BeamKind::Gaussian, SwitchPolicy::Ts { .. })) {
            plot.lines.push(
                PlotLine::new("p_dbm", "outage_asymptotic", "asymptotic")
                    .filter("engine", "analytic")
                    .style("lines dashtype 2"),
            );
        }
    }
    if spec.has_engine(Engine::Montecarlo) {
        plot.lines
            .push(PlotLine::new("p_dbm", "outage_prob", "MC").filter("engine", "montecarlo").style("points"));
    }
    Ok((table, plot, z))
}

/// Threshold giving the unitary/binary schemes the harvested-power fraction
/// `pi_target` at n_t = 2 with one beam, where that fraction is (1+a)e^{-a}.
pub fn solve_alt_a_bar_for_power_scaling(pi_target: f64) -> Result<f64, CliError> {
    assert!(pi_target > 0.0 && pi_target < 1.0, "pi_target must lie in (0,1)");
    let g = |a: f64| 1.0 - (1.0 + a) * (-a).exp();
    rootfind::bisect_increasing_expand(g, 0.0, 1.0, 1.0 - pi_target)
        .map_err(|e| CliError::Numeric(format!("matched-power threshold solve: {e}")))
}

fn run_matched_power(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    pi_target: f64,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "p_dbm",
        "a_bar_gaussian",
        "a_bar_unitary",
        "tau_ps",
        "rate_ts_gaussian_bps_hz",
        "rate_ts_unitary_bps_hz",
        "rate_ts_binary_bps_hz",
        "rate_ps_bps_hz",
        "stderr_ts_gaussian_bps_hz",
        "stderr_ts_unitary_bps_hz",
        "stderr_ts_binary_bps_hz",
        "stderr_ps_bps_hz",
    ]);
    let mut z = ZTrack::default();

    // the scaling factors do not depend on transmit power, so each scheme's
    // matched parameter is solved once for the whole sweep
    let a_g = analytic::solve_a_bar_for_power_scaling(base.n_t, 1, pi_target)
        .map_err(|e| CliError::Numeric(format!("matched-power threshold solve: {e}")))?;
    let a_u = solve_alt_a_bar_for_power_scaling(pi_target)?;
    let tau = 1.0 - pi_target;

    for &p_dbm in &spec.sweep.values() {
        let p_w = crate::spec::unit_convert(p_dbm, "dBm").expect("dBm is a known unit");
        let sys = base.sys_at(p_w);
        let ctx = |e: &dyn std::fmt::Display| numeric_at("p_dbm", p_dbm, e);

        let r_g = analytic::avg_rate_ts(&sys, 1, a_g).map_err(|e| ctx(&e))?;
        let r_u = altbeams::urb_avg_rate(&sys, a_u).map_err(|e| ctx(&e))?;
        let r_b = altbeams::brb_avg_rate_orderstat(&sys, a_u).map_err(|e| ctx(&e))?;
        let r_p = analytic::avg_rate_ps(&sys, tau).map_err(|e| ctx(&e))?;
        if spec.has_engine(Engine::Analytic) {
            table.push_row(
                prov,
                Engine::Analytic.tag(),
                vec![
                    fmt_f64(p_dbm),
                    fmt_f64(a_g),
                    fmt_f64(a_u),
                    fmt_f64(tau),
                    fmt_f64(r_g),
                    fmt_f64(r_u),
                    fmt_f64(r_b),
                    fmt_f64(r_p),
                    fmt_f64(f64::NAN),
                    fmt_f64(f64::NAN),
                    fmt_f64(f64::NAN),
                    fmt_f64(f64::NAN),
                ],
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            let runs = [
                (BeamScheme::gaussian(1), SwitchPolicy::Ts { a_bar: a_g }, r_g),
                (BeamScheme::unitary(1), SwitchPolicy::Ts { a_bar: a_u }, r_u),
                (BeamScheme::binary(1), SwitchPolicy::Ts { a_bar: a_u }, r_b),
                (BeamScheme::gaussian(1), SwitchPolicy::Ps { tau }, r_p),
            ];
            let mut rates = [0.0f64; 4];
            let mut errs = [0.0f64; 4];
            for (i, (scheme, policy, a_val)) in runs.iter().enumerate() {
                let pt = mcsim::estimate_avg_re(&sys, *scheme, *policy, &spec.mc);
                let (sr, _) = mc_stderrs(&pt);
                rates[i] = pt.rate;
                errs[i] = sr;
                z.update(*a_val, pt.rate, sr);
            }
            table.push_row(
                prov,
                Engine::Montecarlo.tag(),
                vec![
                    fmt_f64(p_dbm),
                    fmt_f64(a_g),
                    fmt_f64(a_u),
                    fmt_f64(tau),
                    fmt_f64(rates[0]),
                    fmt_f64(rates[1]),
                    fmt_f64(rates[2]),
                    fmt_f64(rates[3]),
                    fmt_f64(errs[0]),
                    fmt_f64(errs[1]),
                    fmt_f64(errs[2]),
                    fmt_f64(errs[3]),
                ],
            );
        }
    }

    let mut plot = base_plot(&spec.name, "transmit power [dBm]", "average rate [bit/s/Hz]");
    let schemes = [
        ("rate_ts_gaussian_bps_hz", "TS gaussian"),
        ("rate_ts_unitary_bps_hz", "TS unitary"),
        ("rate_ts_binary_bps_hz", "TS binary"),
        ("rate_ps_bps_hz", "PS"),
    ];
    for (col, label) in schemes {
        if spec.has_engine(Engine::Analytic) {
            plot.lines
                .push(PlotLine::new("p_dbm", col, label).filter("engine", "analytic").style("lines"));
        }
        if spec.has_engine(Engine::Montecarlo) {
            plot.lines.push(
                PlotLine::new("p_dbm", col, &format!("{label} (MC)"))
                    .filter("engine", "montecarlo")
                    .style("points"),
            );
        }
    }
    Ok((table, plot, z))
}

fn run_network(
    spec: &ExperimentSpec,
    prov: &Provenance,
    net: &swipt_core::NetworkSpec,
    seeds: &[u64],
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "rate_target_bps_hz",
        "throughput_bps_hz",
        "throughput_stderr_bps_hz",
        "sum_power_w",
        "sum_power_stderr_w",
        "mean_user_outage",
    ]);

    for &target in &spec.sweep.values() {
        let table_t = mcsim::build_network_table(net.params.n_t, net.beam, target)
            .map_err(|e| numeric_at("rate_target_bps_hz", target, e))?;
        let net_t = swipt_core::NetworkSpec { rate_target: target, ..net.clone() };
        let mut cs = Vec::with_capacity(seeds.len());
        let mut qs = Vec::with_capacity(seeds.len());
        let mut outage_sum = 0.0;
        for &seed in seeds {
            let cfg = McConfig { base_seed: seed, ..spec.mc };
            let r = mcsim::simulate_network_with_table(&net_t, &cfg, &table_t)
                .map_err(|e| numeric_at("rate_target_bps_hz", target, e))?;
            outage_sum += r.per_user_outage.iter().sum::<f64>() / r.per_user_outage.len() as f64;
            cs.push(r.throughput);
            qs.push(r.avg_sum_power_w);
        }
        let (c_mean, c_se) = mean_stderr(&cs);
        let (q_mean, q_se) = mean_stderr(&qs);
        table.push_row(
            prov,
            Engine::Montecarlo.tag(),
            vec![
                fmt_f64(target),
                fmt_f64(c_mean),
                fmt_f64(c_se),
                fmt_f64(q_mean),
                fmt_f64(q_se),
                fmt_f64(outage_sum / seeds.len() as f64),
            ],
        );
    }

    let mut plot = base_plot(&spec.name, "average sum harvested power [W]", "network throughput [bit/s/Hz]");
    plot.lines.push(PlotLine::new("sum_power_w", "throughput_bps_hz", "seed-averaged sweep").style("linespoints"));
    Ok((table, plot, ZTrack::default()))
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_beam_comparison(
    spec: &ExperimentSpec,
    prov: &Provenance,
    base: PhysBase,
    a_bar_fixed: Option<f64>,
) -> Result<KindOutput, CliError> {
    let mut table = CsvTable::new(&[
        "scheme",
        "a_bar",
        "p_dbm",
        "rate_bps_hz",
        "power_w",
        "stderr_rate_bps_hz",
        "stderr_power_w",
    ]);
    let mut z = ZTrack::default();
    let axis = spec.sweep.axis.clone();

    let schemes = [
        ("gaussian", BeamScheme::gaussian(1)),
        ("unitary", BeamScheme::unitary(1)),
        ("binary", BeamScheme::binary(1)),
    ];

    for (label, scheme) in schemes {
        for &x in &spec.sweep.values() {
            let (a_bar, p_w) = match a_bar_fixed {
                Some(a) => (a, crate::spec::unit_convert(x, "dBm").expect("dBm is a known unit")),
                None => (x, base.p_w.expect("plan fixes p when a_bar is swept")),
            };
            let sys = base.sys_at(p_w);
            let ctx = |e: &dyn std::fmt::Display| numeric_at(&axis, x, e);

            let (a_rate, a_power) = match scheme.kind {
                BeamKind::Gaussian => (
                    analytic::avg_rate_ts(&sys, 1, a_bar).map_err(|e| ctx(&e))?,
                    analytic::avg_power_ts(&sys, 1, a_bar).map_err(|e| ctx(&e))?,
                ),
                BeamKind::Unitary => (
                    altbeams::urb_avg_rate(&sys, a_bar).map_err(|e| ctx(&e))?,
                    altbeams::urb_avg_power(&sys, a_bar).map_err(|e| ctx(&e))?,
                ),
                BeamKind::Binary => (
                    altbeams::brb_avg_rate_orderstat(&sys, a_bar).map_err(|e| ctx(&e))?,
                    altbeams::brb_avg_power(&sys, a_bar).map_err(|e| ctx(&e))?,
                ),
            };
            if spec.has_engine(Engine::Analytic) {
                table.push_row(
                    prov,
                    Engine::Analytic.tag(),
                    vec![
                        label.to_string(),
                        fmt_f64(a_bar),
                        fmt_f64(watts_to_dbm(p_w)),
                        fmt_f64(a_rate),
                        fmt_f64(a_power),
                        fmt_f64(f64::NAN),
                        fmt_f64(f64::NAN),
                    ],
                );
            }
            if spec.has_engine(Engine::Montecarlo) {
                let pt = mcsim::estimate_avg_re(&sys, scheme, SwitchPolicy::Ts { a_bar }, &spec.mc);
                let (sr, sq) = mc_stderrs(&pt);
                z.update(a_rate, pt.rate, sr);
                z.update(a_power, pt.power, sq);
                table.push_row(
                    prov,
                    Engine::Montecarlo.tag(),
                    vec![
                        label.to_string(),
                        fmt_f64(a_bar),
                        fmt_f64(watts_to_dbm(p_w)),
                        fmt_f64(pt.rate),
                        fmt_f64(pt.power),
                        fmt_f64(sr),
                        fmt_f64(sq),
                    ],
                );
            }
        }
    }

    let x_col = if a_bar_fixed.is_some() { "p_dbm" } else { "a_bar" };
    let xlabel = if a_bar_fixed.is_some() { "transmit power [dBm]" } else { "switching threshold" };
    let mut plot = base_plot(&spec.name, xlabel, "average rate [bit/s/Hz]");
    for (label, _) in schemes {
        if spec.has_engine(Engine::Analytic) {
            plot.lines.push(
                PlotLine::new(x_col, "rate_bps_hz", label)
                    .filter("engine", "analytic")
                    .filter("scheme", label)
                    .style("lines"),
            );
        }
        if spec.has_engine(Engine::Montecarlo) {
            plot.lines.push(
                PlotLine::new(x_col, "rate_bps_hz", &format!("{label} (MC)"))
                    .filter("engine", "montecarlo")
                    .filter("scheme", label)
                    .style("points"),
            );
        }
    }
    Ok((table, plot, z))
}
