//! Machine-readable estimate records and float formatting shared by the
//! text outputs.

use std::fmt::Write;

use crate::borel::{LargeOrderFit, LocationConsensus, ResummationResult, SingularityEstimate};

/// Shortest fixed layout with 17 significant digits (`d.dddddddddddddddde±x`).
/// Non-finite values are written as `NaN`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One numerical estimate with its provenance inside the pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRecord {
    pub level: usize,
    pub method: String,
    pub order_used: usize,
    pub value: f64,
    pub error_estimate: f64,
    pub stability: f64,
}

impl EstimateRecord {
    /// Flat JSON object with keys in the fixed order
    /// `level, method, order_used, value, error_estimate, stability`.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"level\":{},\"method\":{},\"order_used\":{},\"value\":{},\"error_estimate\":{},\"stability\":{}}}",
            self.level,
            json_string(&self.method),
            self.order_used,
            json_number(self.value),
            json_number(self.error_estimate),
            json_number(self.stability)
        )
    }
}

impl From<&SingularityEstimate> for EstimateRecord {
    fn from(e: &SingularityEstimate) -> Self {
        Self {
            level: e.level,
            method: e.method.name().to_string(),
            order_used: e.order_used,
            value: e.location.re,
            error_estimate: e.stability * e.location.norm(),
            stability: e.stability,
        }
    }
}

impl From<&LocationConsensus> for EstimateRecord {
    fn from(c: &LocationConsensus) -> Self {
        Self {
            level: c.level,
            method: "consensus".to_string(),
            order_used: c.pade.order_used,
            value: c.location,
            error_estimate: c.uncertainty,
            stability: c.pade.stability.max(c.ratio.stability),
        }
    }
}

impl From<&ResummationResult> for EstimateRecord {
    fn from(r: &ResummationResult) -> Self {
        Self {
            level: r.level,
            method: "borel-pade-laplace".to_string(),
            order_used: r.order_used,
            value: r.value,
            error_estimate: r.error_estimate,
            stability: r.stability(),
        }
    }
}

/// Growth rate, exponent and amplitude of a large-order fit as three records.
pub fn fit_records(f: &LargeOrderFit) -> Vec<EstimateRecord> {
    let names = [
        "large-order-growth",
        "large-order-exponent",
        "large-order-amplitude",
    ];
    let values = [f.growth, f.exponent, f.amplitude];
    (0..3)
        .map(|i| EstimateRecord {
            level: f.level,
            method: names[i].to_string(),
            order_used: f.k_max,
            value: values[i],
            error_estimate: f.uncertainty[i],
            stability: f.uncertainty[i] / values[i].abs(),
        })
        .collect()
}

/// JSON array, one record per line.
pub fn records_to_json(records: &[EstimateRecord]) -> String {
    let body: Vec<String> = records
        .iter()
        .map(|r| format!("  {}", r.to_json()))
        .collect();
    if body.is_empty() {
        "[]\n".to_string()
    } else {
        format!("[\n{}\n]\n", body.join(",\n"))
    }
}
