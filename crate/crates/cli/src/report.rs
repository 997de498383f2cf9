//! Deterministic output records and number formatting.
//!
//! Output files must be byte-identical across repeated runs with the same
//! config and seed, so nothing time- or environment-dependent is written to
//! them; wall times go to stderr only.

use serde::Serialize;
use specsched::Action;

/// Formats with 6 significant digits, fixed-point.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Serialize)]
pub struct ActionRecord {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<usize>,
}

impl From<Action> for ActionRecord {
    fn from(action: Action) -> Self {
        match action {
            Action::Schedule(n) => ActionRecord {
                kind: "schedule",
                channel: Some(n),
            },
            Action::NoOp => ActionRecord {
                kind: "noop",
                channel: None,
            },
        }
    }
}

/// Result record of `specsched solve`.
#[derive(Debug, Serialize)]
pub struct SolveRecord {
    pub command: &'static str,
    pub policy: &'static str,
    pub mode: &'static str,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_action: Option<ActionRecord>,
    pub states: usize,
}

#[derive(Debug, Serialize)]
pub struct CountersRecord {
    pub scheduled_slots: u64,
    pub noop_slots: u64,
    pub collision_slots: u64,
    pub transmitted_minislots: u64,
    pub successful_minislots: u64,
}

/// Result record of `specsched simulate`.
#[derive(Debug, Serialize)]
pub struct SimulateRecord {
    pub command: &'static str,
    pub policy: &'static str,
    pub mode: &'static str,
    pub seed: u64,
    pub trajectories: u64,
    pub mean: f64,
    pub std_error: f64,
    pub degenerate_sample: bool,
    pub counters: CountersRecord,
    /// Exact value when the instance is exactly solvable, else null.
    pub exact_value: Option<f64>,
    /// |mean - exact| / std_error, when both are available.
    pub discrepancy_sigma: Option<f64>,
}

/// One row of a policy-comparison sweep.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonRow {
    pub sweep: f64,
    pub v_genie: f64,
    pub v_ori: f64,
    pub v_random: f64,
}

impl ComparisonRow {
    pub fn d_ga_ori(&self) -> f64 {
        self.v_genie - self.v_ori
    }

    pub fn pct_ga_ori(&self) -> f64 {
        100.0 * self.d_ga_ori() / self.v_genie
    }

    pub fn d_ori_rnd(&self) -> f64 {
        self.v_ori - self.v_random
    }

    pub fn pct_ori_rnd(&self) -> f64 {
        100.0 * self.d_ori_rnd() / self.v_ori
    }
}

/// CSV for a comparison sweep; `sweep_column` names the first column.
pub fn comparison_csv(sweep_column: &str, rows: &[ComparisonRow]) -> String {
    let mut out = format!(
        "{sweep_column},d_ga_ori,pct_ga_ori,d_ori_rnd,pct_ori_rnd,v_genie,v_ori,v_random\n"
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_sig6(row.sweep),
            format_sig6(row.d_ga_ori()),
            format_sig6(row.pct_ga_ori()),
            format_sig6(row.d_ori_rnd()),
            format_sig6(row.pct_ori_rnd()),
            format_sig6(row.v_genie),
            format_sig6(row.v_ori),
            format_sig6(row.v_random),
        ));
    }
    out
}

/// One conditional idle probability series with its flatness threshold.
#[derive(Debug, Clone)]
pub struct CurveSeries {
    pub exponent: u32,
    pub points: Vec<(u64, f64)>,
    /// Largest age whose successive probability drop is still >= 1e-2; beyond
    /// it the curve is flat at that resolution.
    pub threshold_x0: u64,
}

pub fn curves_csv(series: &[CurveSeries]) -> String {
    let mut out = String::from("u,x,p_idle,x0\n");
    for s in series {
        for &(x, p) in &s.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.exponent,
                x,
                format_sig6(p),
                s.threshold_x0
            ));
        }
    }
    out
}

/// Serializes a record as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(record: &T) -> String {
    let mut text = serde_json::to_string_pretty(record).expect("records serialize");
    text.push('\n');
    text
}
