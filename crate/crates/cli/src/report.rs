//! Report views: JSON, aligned text and CSV.

use codebound_core::bounds::{BoundReport, ConvergenceTable, ExcessSensitivity, PerturbedCase};
use codebound_core::rational::{to_f64, RatioDisplay};
use num_rational::BigRational;
use serde::Serialize;

/// `f64` text that always shows a fractional part or exponent, e.g. `1.0`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn fmt_ratio(x: &BigRational) -> String {
    RatioDisplay(x).to_string()
}

/// `key  value` lines with values aligned in one column.
pub fn render_fields(fields: &[(&str, String)]) -> String {
    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    fields
        .iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

/// Column-aligned table with a header row.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct BoundView {
    pub family: String,
    pub radix: u32,
    pub n: u32,
    pub entropy: f64,
    pub block_avg: String,
    pub avg: String,
    pub avg_value: f64,
    pub bound: String,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub strict_upper: bool,
    pub lower_attained: bool,
    pub upper_attained: bool,
    pub excess: f64,
    pub exact_excess: Option<String>,
    pub bound_gap: f64,
    pub holds: bool,
}

impl From<&BoundReport> for BoundView {
    fn from(r: &BoundReport) -> Self {
        Self {
            family: r.family.name().to_string(),
            radix: r.radix,
            n: r.n,
            entropy: r.h_r,
            block_avg: fmt_ratio(&r.block_avg),
            avg: fmt_ratio(&r.avg_len_per_symbol),
            avg_value: to_f64(&r.avg_len_per_symbol),
            bound: fmt_ratio(&r.allowance()),
            lower_ok: r.lower_ok,
            upper_ok: r.upper_ok,
            strict_upper: r.strict_upper,
            lower_attained: r.lower_attained,
            upper_attained: r.upper_attained,
            excess: r.excess,
            exact_excess: r.exact_excess.as_ref().map(fmt_ratio),
            bound_gap: r.bound_gap,
            holds: r.holds(),
        }
    }
}

fn ok(flag: bool) -> String {
    if flag { "ok" } else { "FAILED" }.to_string()
}

pub fn bound_text(r: &BoundReport) -> String {
    let upper = if r.strict_upper {
        format!("avg < H + {}", fmt_ratio(&r.allowance()))
    } else {
        format!("avg <= H + {}", fmt_ratio(&r.allowance()))
    };
    let mut fields = vec![
        ("family", r.family.name().to_string()),
        ("radix", r.radix.to_string()),
        ("n", r.n.to_string()),
        ("entropy", fmt_f64(r.h_r)),
        (
            "avg",
            format!(
                "{} ({})",
                fmt_ratio(&r.avg_len_per_symbol),
                fmt_f64(to_f64(&r.avg_len_per_symbol))
            ),
        ),
        ("lower", format!("{} (H <= avg)", ok(r.lower_ok))),
        ("upper", format!("{} ({upper})", ok(r.upper_ok))),
        ("lower attained", r.lower_attained.to_string()),
        ("upper attained", r.upper_attained.to_string()),
        ("excess", fmt_f64(r.excess)),
    ];
    if let Some(e) = &r.exact_excess {
        fields.push(("exact excess", fmt_ratio(e)));
    }
    fields.push(("bound gap", fmt_f64(r.bound_gap)));
    fields.push(("verdict", verdict(r.holds())));
    render_fields(&fields)
}

fn verdict(holds: bool) -> String {
    if holds { "HOLDS" } else { "VIOLATION" }.to_string()
}

#[derive(Debug, Serialize)]
pub struct ConvergenceRowView {
    pub n: u32,
    pub avg: String,
    pub avg_value: f64,
    pub entropy: f64,
    pub excess: f64,
    pub exact_excess: Option<String>,
    pub bound: String,
    pub within_bound: bool,
}

#[derive(Debug, Serialize)]
pub struct ConvergenceView {
    pub radix: u32,
    pub rows: Vec<ConvergenceRowView>,
    pub all_within_bound: bool,
}

impl From<&ConvergenceTable> for ConvergenceView {
    fn from(t: &ConvergenceTable) -> Self {
        Self {
            radix: t.radix,
            rows: t
                .rows
                .iter()
                .map(|r| ConvergenceRowView {
                    n: r.n,
                    avg: fmt_ratio(&r.avg),
                    avg_value: to_f64(&r.avg),
                    entropy: r.h_r,
                    excess: r.excess,
                    exact_excess: r.exact_excess.as_ref().map(fmt_ratio),
                    bound: fmt_ratio(&r.bound),
                    within_bound: r.within_bound,
                })
                .collect(),
            all_within_bound: t.all_within_bound(),
        }
    }
}

/// CSV with columns `n,avg,entropy,excess,bound`, all numeric.
pub fn convergence_csv(t: &ConvergenceTable) -> String {
    let mut out = String::from("n,avg,entropy,excess,bound\n");
    for r in &t.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            fmt_f64(to_f64(&r.avg)),
            fmt_f64(r.h_r),
            fmt_f64(r.excess),
            fmt_f64(to_f64(&r.bound)),
        ));
    }
    out
}

pub fn convergence_text(t: &ConvergenceTable) -> String {
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_ratio(&r.avg),
                fmt_f64(r.h_r),
                fmt_f64(r.excess),
                fmt_ratio(&r.bound),
                if r.within_bound { "yes" } else { "NO" }.to_string(),
            ]
        })
        .collect();
    render_table(&["n", "avg", "entropy", "excess", "bound", "within"], &rows)
}

#[derive(Debug, Serialize)]
pub struct PerturbedView {
    pub probabilities: Vec<String>,
    pub lengths: Vec<u32>,
    pub avg: String,
    pub entropy: f64,
    pub excess: f64,
}

impl From<&PerturbedCase> for PerturbedView {
    fn from(c: &PerturbedCase) -> Self {
        Self {
            probabilities: c.source.probs().iter().map(fmt_ratio).collect(),
            lengths: c.lengths.clone(),
            avg: fmt_ratio(&c.avg),
            entropy: c.h_r,
            excess: c.excess,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SensitivityView {
    pub q: usize,
    pub radix: u32,
    pub epsilon: String,
    pub just_over: PerturbedView,
    pub just_under: PerturbedView,
    pub one_over_q: f64,
    pub q_minus_one_over_q: f64,
}

impl From<&ExcessSensitivity> for SensitivityView {
    fn from(s: &ExcessSensitivity) -> Self {
        let q = s.q as f64;
        Self {
            q: s.q,
            radix: s.radix,
            epsilon: fmt_ratio(&s.epsilon),
            just_over: (&s.just_over).into(),
            just_under: (&s.just_under).into(),
            one_over_q: 1.0 / q,
            q_minus_one_over_q: (q - 1.0) / q,
        }
    }
}

pub fn sensitivity_text(s: &ExcessSensitivity) -> String {
    let case = |name: &str, c: &PerturbedCase| {
        let lengths = c
            .lengths
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",");
        vec![
            name.to_string(),
            lengths,
            fmt_ratio(&c.avg),
            fmt_f64(c.h_r),
            fmt_f64(c.excess),
        ]
    };
    let mut out = render_fields(&[
        ("q", s.q.to_string()),
        ("radix", s.radix.to_string()),
        ("epsilon", fmt_ratio(&s.epsilon)),
    ]);
    out.push('\n');
    out.push_str(&render_table(
        &["case", "lengths", "avg", "entropy", "excess"],
        &[
            case("just over 1/q", &s.just_over),
            case("just under 1/q", &s.just_under),
        ],
    ));
    let q = s.q as f64;
    out.push_str(&format!(
        "\nnote: raising q-1 probabilities just over 1/q gives excess near 1/q = {}; \
         lowering them just under 1/q gives excess near (q-1)/q = {}\n",
        fmt_f64(1.0 / q),
        fmt_f64((q - 1.0) / q),
    ));
    out
}
