//! Built-in analytic-vs-Monte-Carlo regression grid. The grid is compiled
//! in and runs from a fixed seed, so its CSV is byte-identical across runs
//! and across worker counts.

use std::path::Path;

use swipt_core::altbeams;
use swipt_core::analytic;
use swipt_core::mcsim::{self, McConfig};
use swipt_core::params::{BeamScheme, PointSource, SwitchPolicy, SystemParams};

use crate::csvout::{fmt_f64, CsvTable, Provenance};
use crate::errors::CliError;

const SEED: u64 = 7;
const GRID_TAG: &[u8] = b"expcli-selftest-grid-v1";
/// Flags a broken estimator or expression, not sampling noise: at these
/// draw counts a healthy pair sits well under 5 standard errors.
const Z_LIMIT: f64 = 5.0;

fn sys(n_t: u32, p_w: f64) -> SystemParams {
    SystemParams { p_tx: p_w, n_t, theta: 1e-4, sigma2: 1e-7, zeta: 1.0 }
}

struct Case {
    label: &'static str,
    analytic: f64,
    mc: f64,
    stderr: f64,
}

fn avg_cases(workers: usize) -> Result<Vec<Case>, CliError> {
    let cfg = McConfig { n_channel_draws: 50_000, n_subblock_draws: 8, base_seed: SEED, worker_count: workers };
    let num = |e: analytic::AnalyticError| CliError::Numeric(format!("selftest analytic value: {e}"));
    let mut out = Vec::new();

    let mut push_re = |label_rate: &'static str,
                       label_power: &'static str,
                       want_rate: f64,
                       want_power: f64,
                       s: &SystemParams,
                       scheme: BeamScheme,
                       policy: SwitchPolicy| {
        let pt = mcsim::estimate_avg_re(s, scheme, policy, &cfg);
        let (sr, sq) = match pt.source {
            PointSource::MonteCarlo { stderr_rate, stderr_power } => (stderr_rate, stderr_power),
            PointSource::Analytic => (0.0, 0.0),
        };
        out.push(Case { label: label_rate, analytic: want_rate, mc: pt.rate, stderr: sr });
        out.push(Case { label: label_power, analytic: want_power, mc: pt.power, stderr: sq });
    };

    let s2 = sys(2, 1.0);
    push_re(
        "ts_gaussian_n1_rate",
        "ts_gaussian_n1_power",
        analytic::avg_rate_ts(&s2, 1, 0.5).map_err(num)?,
        analytic::avg_power_ts(&s2, 1, 0.5).map_err(num)?,
        &s2,
        BeamScheme::gaussian(1),
        SwitchPolicy::Ts { a_bar: 0.5 },
    );

    let s4 = sys(4, 1.0);
    push_re(
        "ts_gaussian_n2_nt4_rate",
        "ts_gaussian_n2_nt4_power",
        analytic::avg_rate_ts(&s4, 2, 0.8).map_err(num)?,
        analytic::avg_power_ts(&s4, 2, 0.8).map_err(num)?,
        &s4,
        BeamScheme::gaussian(2),
        SwitchPolicy::Ts { a_bar: 0.8 },
    );

    push_re(
        "ps_tau03_rate",
        "ps_tau03_power",
        analytic::avg_rate_ps(&s2, 0.3).map_err(num)?,
        analytic::avg_power_ps(&s2, 0.3),
        &s2,
        BeamScheme::gaussian(1),
        SwitchPolicy::Ps { tau: 0.3 },
    );

    push_re(
        "ts_unitary_rate",
        "ts_unitary_power",
        altbeams::urb_avg_rate(&s2, 0.8).map_err(num)?,
        altbeams::urb_avg_power(&s2, 0.8).map_err(num)?,
        &s2,
        BeamScheme::unitary(1),
        SwitchPolicy::Ts { a_bar: 0.8 },
    );

    push_re(
        "ts_binary_rate",
        "ts_binary_power",
        altbeams::brb_avg_rate_orderstat(&s2, 0.8).map_err(num)?,
        altbeams::brb_avg_power(&s2, 0.8).map_err(num)?,
        &s2,
        BeamScheme::binary(1),
        SwitchPolicy::Ts { a_bar: 0.8 },
    );

    Ok(out)
}

fn outage_cases(workers: usize) -> Result<Vec<Case>, CliError> {
    let cfg = McConfig { n_channel_draws: 100_000, n_subblock_draws: 1, base_seed: SEED, worker_count: workers };
    let s2 = sys(2, 1.0);
    let q_hat = 3e-5;
    let num = |e: &dyn std::fmt::Display| CliError::Numeric(format!("selftest analytic value: {e}"));

    let mut spec_cases = Vec::new();
    let runs: [(&'static str, BeamScheme, SwitchPolicy, f64); 4] = [
        (
            "outage_ts_gaussian",
            BeamScheme::gaussian(1),
            SwitchPolicy::Ts { a_bar: 0.5 },
            analytic::ts_outage_exact(&s2, 1, 0.5, q_hat).map_err(|e| num(&e))?,
        ),
        (
            "outage_ts_unitary",
            BeamScheme::unitary(1),
            SwitchPolicy::Ts { a_bar: 0.5 },
            altbeams::urb_outage(&s2, 0.5, q_hat).map_err(|e| num(&e))?,
        ),
        (
            "outage_ts_binary",
            BeamScheme::binary(1),
            SwitchPolicy::Ts { a_bar: 0.5 },
            altbeams::brb_outage(&s2, 0.5, q_hat).map_err(|e| num(&e))?,
        ),
        (
            "outage_ps_tau05",
            BeamScheme::gaussian(1),
            SwitchPolicy::Ps { tau: 0.5 },
            analytic::ps_outage(&s2, 0.5, q_hat),
        ),
    ];
    for (label, scheme, policy, want) in runs {
        let est = mcsim::estimate_power_outage(&s2, scheme, policy, q_hat, &cfg)
            .map_err(|e| num(&e))?;
        spec_cases.push(Case { label, analytic: want, mc: est.mean, stderr: est.stderr });
    }
    Ok(spec_cases)
}

pub struct SelftestOutcome {
    pub csv_path: std::path::PathBuf,
    pub cases: usize,
    pub max_abs_z: f64,
}

/// Runs the grid, writes `selftest.csv` under `out_dir`, and fails with a
/// numeric error if any case strays past the z limit.
pub fn run(out_dir: &Path, workers: usize) -> Result<SelftestOutcome, CliError> {
    if workers < 1 {
        return Err(CliError::Numeric("worker count must be >= 1".into()));
    }
    let mut cases = avg_cases(workers)?;
    cases.extend(outage_cases(workers)?);

    let prov = Provenance::new("selftest", SEED, GRID_TAG);
    let mut table = CsvTable::new(&["case", "analytic", "montecarlo", "stderr", "abs_z"]);
    let mut max_z = 0.0f64;
    let mut worst = "";
    for c in &cases {
        let z = if c.stderr > 0.0 { (c.analytic - c.mc).abs() / c.stderr } else { 0.0 };
        if z > max_z {
            max_z = z;
            worst = c.label;
        }
        table.push_row(
            &prov,
            "montecarlo",
            vec![
                c.label.to_string(),
                fmt_f64(c.analytic),
                fmt_f64(c.mc),
                fmt_f64(c.stderr),
                fmt_f64(z),
            ],
        );
    }

    let csv_path = out_dir.join("selftest.csv");
    table.write_to(&csv_path)?;

    if max_z > Z_LIMIT {
        return Err(CliError::Numeric(format!(
            "selftest case {worst} off by {max_z:.2} standard errors (limit {Z_LIMIT})"
        )));
    }
    Ok(SelftestOutcome { csv_path, cases: cases.len(), max_abs_z: max_z })
}
