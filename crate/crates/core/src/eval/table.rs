use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EvalReport, ReportRow};
use crate::model::Variant;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Tsv,
    Text,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(TableFormat::Tsv),
            "text" | "txt" => Ok(TableFormat::Text),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Config(format!("unknown table format `{other}` (tsv, text, json)"))),
        }
    }
}

const MEAN: &str = "mean";

/// Three decimals when that is exact, otherwise the shortest repr that
/// parses back to the same value.
fn fmt_acc(x: f64) -> String {
    let short = format!("{x:.3}");
    if short.parse::<f64>() == Ok(x) {
        short
    } else {
        format!("{x}")
    }
}

/// A table line: one (source, target, seed) group with a cell per variant.
struct Line<'a> {
    source: &'a str,
    target: &'a str,
    seed: Option<u64>,
    cells: Vec<Option<&'a ReportRow>>,
}

fn layout(report: &EvalReport) -> Result<(Vec<Variant>, Vec<Line<'_>>)> {
    if report.rows.is_empty() {
        return Err(Error::Format("cannot render an empty report".into()));
    }
    let variants: Vec<Variant> = Variant::ALL
        .into_iter()
        .filter(|v| report.rows.iter().any(|r| r.variant == *v))
        .collect();
    let mut lines: Vec<Line> = Vec::new();
    for row in &report.rows {
        let col = variants.iter().position(|v| *v == row.variant).expect("collected above");
        let line = match lines
            .iter_mut()
            .find(|l| l.source == row.source && l.target == row.target && l.seed == row.seed)
        {
            Some(l) => l,
            None => {
                lines.push(Line {
                    source: &row.source,
                    target: &row.target,
                    seed: row.seed,
                    cells: vec![None; variants.len()],
                });
                lines.last_mut().expect("just pushed")
            }
        };
        if line.cells[col].is_some() {
            return Err(Error::Format(format!(
                "duplicate cell {} -> {} {} seed {:?}",
                row.source, row.target, row.variant, row.seed
            )));
        }
        line.cells[col] = Some(row);
    }
    Ok((variants, lines))
}

fn seed_cell(seed: Option<u64>) -> String {
    seed.map_or_else(|| MEAN.to_string(), |s| s.to_string())
}

/// Sample counts of a line: one number when all cells agree, otherwise a
/// comma list in column order with `-` for empty cells.
fn n_cell(line: &Line) -> String {
    let ns: Vec<Option<usize>> = line.cells.iter().map(|c| c.map(|r| r.n_eval)).collect();
    let present: Vec<usize> = ns.iter().flatten().copied().collect();
    if present.windows(2).all(|w| w[0] == w[1]) && present.len() == ns.len() {
        present[0].to_string()
    } else {
        ns.iter()
            .map(|n| n.map_or_else(|| "-".to_string(), |n| n.to_string()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn check_field(s: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(Error::Format(format!("name `{s}` cannot be written to a table")));
    }
    Ok(())
}

/// Renders a report with columns Source, Target, Seed, N and one column per
/// variant present. The text format drops Seed and N when every row is a
/// mean, which gives the layout of a published results table.
pub fn emit_table(report: &EvalReport, format: TableFormat) -> Result<String> {
    if format == TableFormat::Json {
        if report.rows.is_empty() {
            return Err(Error::Format("cannot render an empty report".into()));
        }
        let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }
    let (variants, lines) = layout(report)?;
    let with_seed = format == TableFormat::Tsv || lines.iter().any(|l| l.seed.is_some());

    let mut header: Vec<String> = vec!["Source".into(), "Target".into()];
    if with_seed {
        header.extend(["Seed".into(), "N".into()]);
    }
    header.extend(variants.iter().map(|v| v.name().to_string()));
    let mut table = vec![header];
    for line in &lines {
        check_field(line.source)?;
        check_field(line.target)?;
        let mut cells = vec![line.source.to_string(), line.target.to_string()];
        if with_seed {
            cells.push(seed_cell(line.seed));
            cells.push(n_cell(line));
        }
        cells.extend(
            line.cells
                .iter()
                .map(|c| {
                    c.map_or_else(
                        || "-".to_string(),
                        |r| match format {
                            TableFormat::Tsv => fmt_acc(r.accuracy),
                            _ => format!("{:.3}", r.accuracy),
                        },
                    )
                }),
        );
        table.push(cells);
    }

    let mut out = String::new();
    match format {
        TableFormat::Tsv => {
            for row in &table {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        _ => {
            let widths: Vec<usize> = (0..table[0].len())
                .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
                .collect();
            for row in &table {
                let mut line = String::new();
                for (c, (cell, w)) in row.iter().zip(&widths).enumerate() {
                    if c > 0 {
                        line.push_str("  ");
                    }
                    // Names left-aligned, numbers right-aligned.
                    if c < 2 {
                        let _ = write!(line, "{cell:<w$}");
                    } else {
                        let _ = write!(line, "{cell:>w$}");
                    }
                }
                out.push_str(line.trim_end());
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("TSV line {line}: {msg}"))
}

/// Inverse of [`emit_table`] with [`TableFormat::Tsv`].
pub fn parse_tsv(text: &str) -> Result<EvalReport> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let head: Vec<&str> = header.split('\t').collect();
    if head.len() < 5 || head[..4] != ["Source", "Target", "Seed", "N"] {
        return Err(bad(1, "expected header Source, Target, Seed, N, variants..."));
    }
    let variants = head[4..]
        .iter()
        .map(|h| h.parse::<Variant>())
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, line) in lines {
        let no = i + 1;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != head.len() {
            return Err(bad(no, format!("expected {} fields, got {}", head.len(), f.len())));
        }
        let seed = match f[2] {
            MEAN => None,
            s => Some(s.parse::<u64>().map_err(|e| bad(no, e))?),
        };
        let ns: Vec<Option<usize>> = if f[3].contains(',') {
            f[3].split(',')
                .map(|n| if n == "-" { Ok(None) } else { n.parse().map(Some) })
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(no, e))?
        } else {
            let n: usize = f[3].parse().map_err(|e| bad(no, e))?;
            vec![Some(n); variants.len()]
        };
        if ns.len() != variants.len() {
            return Err(bad(no, "N list length does not match the variant columns"));
        }
        for ((cell, &variant), n) in f[4..].iter().zip(&variants).zip(ns) {
            if *cell == "-" {
                continue;
            }
            let accuracy: f64 = cell.parse().map_err(|e| bad(no, e))?;
            let n_eval = n.ok_or_else(|| bad(no, "cell without a sample count"))?;
            rows.push(ReportRow {
                source: f[0].to_string(),
                target: f[1].to_string(),
                variant,
                accuracy,
                n_eval,
                seed,
            });
        }
    }
    Ok(EvalReport { rows })
}
