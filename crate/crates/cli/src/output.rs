//! Rendering of command results as JSON, CSV or aligned text.

use std::fmt::Write;

use clap::ValueEnum;
use hassett_core::enumeration::Strata;
use hassett_core::formulas::{heavy_light_reference, EulerReport, WeightSpec};
use hassett_core::graphs::GraphRecord;
use hassett_core::homology::BettiProfile;
use num_bigint::BigInt;
use serde::Serialize;

use crate::verify::VerifyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub type Rendered = String;

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Left-aligned columns separated by two spaces.
fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn tabular(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => csv(header, rows),
        _ => aligned(header, rows),
    }
}

#[derive(Serialize)]
struct StratumOut {
    edge_count: usize,
    dimension: usize,
    classes: usize,
    nondegenerate: usize,
    cells: Vec<GraphRecord>,
}

#[derive(Serialize)]
struct EnumerationOut {
    genus: u32,
    weights: Vec<String>,
    epsilon: Option<String>,
    max_edges: usize,
    strata: Vec<StratumOut>,
}

pub fn enumeration(spec: &WeightSpec, strata: &Strata, only: Option<usize>, format: Format) -> Rendered {
    let levels: Vec<StratumOut> = (1..=strata.max_edges())
        .filter(|k| only.is_none_or(|o| o == *k))
        .map(|k| {
            let cells = strata.stratum(k);
            StratumOut {
                edge_count: k,
                dimension: k - 1,
                classes: cells.len(),
                nondegenerate: cells.iter().filter(|c| !c.degenerate).count(),
                cells: cells.iter().map(|c| c.record()).collect(),
            }
        })
        .collect();
    match format {
        Format::Json => json(&EnumerationOut {
            genus: strata.genus,
            weights: spec.weights.entries().iter().map(|w| w.to_string()).collect(),
            epsilon: spec.epsilon.as_ref().map(|e| e.to_string()),
            max_edges: strata.max_edges(),
            strata: levels,
        }),
        _ => {
            let rows: Vec<Vec<String>> = levels
                .iter()
                .map(|l| vec![l.edge_count.to_string(), l.dimension.to_string(), l.classes.to_string(), l.nondegenerate.to_string()])
                .collect();
            tabular(format, &["edges", "dimension", "classes", "nondegenerate"], &rows)
        }
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn euler(report: &EulerReport, format: Format) -> Rendered {
    match format {
        Format::Json => json(report),
        _ => {
            let header = ["genus", "weights", "epsilon", "direct", "formula", "source", "agree", "unavailable"];
            let row = vec![
                report.genus.to_string(),
                report.weights.join(" "),
                opt(&report.epsilon),
                opt(&report.direct),
                opt(&report.formula),
                opt(&report.formula_source),
                opt(&report.agree),
                report.unavailable.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "),
            ];
            tabular(format, &header, &[row])
        }
    }
}

pub fn homology(profile: &BettiProfile, format: Format) -> Rendered {
    match format {
        Format::Json => json(profile),
        _ => {
            let mut rows = vec![vec![
                "-1".to_string(),
                "1".to_string(),
                "-".to_string(),
                profile.reduced_betti_minus_one.to_string(),
            ]];
            for p in 0..profile.chain_ranks.len() {
                rows.push(vec![
                    p.to_string(),
                    profile.chain_ranks[p].to_string(),
                    profile.unreduced(p).to_string(),
                    profile.reduced(p).to_string(),
                ]);
            }
            let mut out = tabular(format, &["degree", "rank", "betti", "reduced_betti"], &rows);
            if format == Format::Table {
                writeln!(out, "euler {}  reduced_euler {}  filter {}", profile.euler, profile.reduced_euler, profile.filter).unwrap();
            }
            out
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub genus: u32,
    pub n: usize,
    /// `values[m - 1]`; `None` where the formula does not apply.
    #[serde(serialize_with = "big_options")]
    pub values: Vec<Option<BigInt>>,
}

fn big_options<S: serde::Serializer>(values: &[Option<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&v.as_ref().map(|x| x.to_string()))?;
    }
    seq.end()
}

/// Cells where the computed value differs from the embedded reference. A
/// blank reference cell matches a computed 0: the space is empty.
pub fn check_table(rows: &[TableRow]) -> Vec<String> {
    let mut out = Vec::new();
    for row in rows {
        for (i, value) in row.values.iter().enumerate() {
            let m = i + 1;
            let Some(reference) = heavy_light_reference(row.genus, row.n, m) else { continue };
            let expected = reference.unwrap_or(0);
            let ok = value.as_ref().is_some_and(|v| *v == BigInt::from(expected));
            if !ok {
                out.push(format!("g={} n={} m={}: computed {} expected {}", row.genus, row.n, m, opt(value), expected));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct TableOut<'a> {
    epsilon_policy: &'static str,
    rows: &'a [TableRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckOut<'a>>,
}

#[derive(Serialize)]
struct CheckOut<'a> {
    reference: &'static str,
    passed: bool,
    mismatches: &'a [String],
}

const REFERENCE: &str = "reference heavy/light Euler characteristic table, g = 0..3, m = 1..4";

pub fn table(rows: &[TableRow], check: Option<&Vec<String>>, format: Format) -> Rendered {
    match format {
        Format::Json => json(&TableOut {
            epsilon_policy: "eps = 1/(m+1)",
            rows,
            check: check.map(|m| CheckOut { reference: REFERENCE, passed: m.is_empty(), mismatches: m }),
        }),
        _ => {
            let width = rows.iter().map(|r| r.values.len()).max().unwrap_or(0);
            let names: Vec<String> = (1..=width).map(|m| format!("m={m}")).collect();
            let mut header = vec!["g", "n"];
            header.extend(names.iter().map(String::as_str));
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut cells = vec![r.genus.to_string(), r.n.to_string()];
                    cells.extend(r.values.iter().enumerate().map(|(i, v)| match v {
                        Some(_) if heavy_light_reference(r.genus, r.n, i + 1) == Some(None) => "—".to_string(),
                        Some(x) => x.to_string(),
                        None => "—".to_string(),
                    }));
                    cells
                })
                .collect();
            let mut out = tabular(format, &header, &body);
            if let (Some(m), Format::Table) = (check, format) {
                if m.is_empty() {
                    writeln!(out, "check: all cells match the reference table").unwrap();
                } else {
                    for line in m {
                        writeln!(out, "check: MISMATCH {line}").unwrap();
                    }
                }
            }
            out
        }
    }
}

pub fn verification(report: &VerifyReport, format: Format) -> Rendered {
    match format {
        Format::Json => json(report),
        _ => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.genus.to_string(),
                        c.weights.clone(),
                        c.check.clone(),
                        if c.passed { "pass" } else { "FAIL" }.to_string(),
                        c.detail.clone(),
                    ]
                })
                .collect();
            let mut out = tabular(format, &["genus", "weights", "check", "result", "detail"], &rows);
            if format == Format::Table {
                writeln!(out, "{} checks, {} failed, {} spaces skipped over budget", report.checks.len(), report.failed, report.skipped.len()).unwrap();
            }
            out
        }
    }
}
