//! Aligned text tables from `summary.csv`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{BenchError, Result};
use crate::records::SummaryRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    Random,
    Pro2,
    Laplace,
    Uncon,
    Box,
    Termination,
}

impl FromStr for TableId {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" | "quad-random" => TableId::Random,
            "pro2" => TableId::Pro2,
            "laplace" => TableId::Laplace,
            "uncon" => TableId::Uncon,
            "box" => TableId::Box,
            "termination" => TableId::Termination,
            _ => return Err(BenchError::InvalidArgument(format!("unknown table `{s}`"))),
        })
    }
}

impl TableId {
    fn prefix(self) -> &'static str {
        match self {
            TableId::Random => "set",
            TableId::Pro2 => "pro2-",
            TableId::Laplace => "laplace-",
            TableId::Uncon => "uncon-",
            TableId::Box => "box-",
            TableId::Termination => "termination-",
        }
    }

    fn has_totals(self) -> bool {
        matches!(self, TableId::Random | TableId::Pro2 | TableId::Laplace)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTable {
    pub text: String,
    /// Cells with no summary row.
    pub missing: usize,
}

impl RenderedTable {
    pub fn is_partial(&self) -> bool {
        self.missing > 0
    }
}

fn row_label(table: TableId, group: &str) -> String {
    let rest = &group[table.prefix().len()..];
    match table {
        TableId::Random => format!("set {rest}"),
        TableId::Pro2 => rest.strip_prefix('k').map(|k| format!("kappa={k}")).unwrap_or_else(|| rest.into()),
        TableId::Termination => rest.strip_prefix('l').map(|l| format!("lambda={l}")).unwrap_or_else(|| rest.into()),
        _ => rest.to_string(),
    }
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn layout(header: Vec<String>, body: Vec<Vec<String>>) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| body.iter().map(|r| r[c].chars().count()).chain([header[c].chars().count()]).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    let line = |s: &mut String, cells: &[String]| {
        for (c, cell) in cells.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                let _ = write!(s, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(s, "  {}{cell}", " ".repeat(pad));
            }
        }
        s.push('\n');
    };
    line(&mut s, &header);
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len().saturating_sub(1));
    s.push_str(&"-".repeat(total));
    s.push('\n');
    for r in &body {
        line(&mut s, r);
    }
    s
}

/// Rows are `group × eps`, columns are methods, cells are mean iterations.
/// The termination table instead reports mean `‖g‖` and mean `f` per method.
pub fn render_table(rows: &[SummaryRow], table: TableId) -> Result<RenderedTable> {
    if rows.is_empty() {
        return Err(BenchError::InvalidArgument("summary is empty".into()));
    }
    let sel: Vec<&SummaryRow> = rows.iter().filter(|r| r.group.starts_with(table.prefix())).collect();
    if sel.is_empty() {
        return Err(BenchError::InvalidArgument(format!("summary has no rows for table {table:?}")));
    }
    let groups = first_seen(sel.iter().map(|r| r.group.clone()));
    let methods = first_seen(sel.iter().map(|r| r.method.clone()));
    let mut eps = first_seen(sel.iter().map(|r| r.eps.to_bits()));
    eps.sort_by(|a, b| f64::from_bits(*b).total_cmp(&f64::from_bits(*a)));
    let find = |g: &str, m: &str, e: u64| sel.iter().find(|r| r.group == g && r.method == m && r.eps.to_bits() == e);
    let mut missing = 0;
    let mut body = Vec::new();
    let header: Vec<String>;
    if table == TableId::Termination {
        header = std::iter::once("lambda".to_string())
            .chain(methods.iter().flat_map(|m| [format!("{m} |g|"), format!("{m} f")]))
            .collect();
        for g in &groups {
            let mut row = vec![row_label(table, g)];
            for m in &methods {
                match find(g, m, eps[0]) {
                    Some(r) => row.extend([format!("{:.4e}", r.mean_gnorm), format!("{:.4e}", r.mean_fval)]),
                    None => {
                        missing += 1;
                        row.extend(["-".to_string(), "-".to_string()]);
                    }
                }
            }
            body.push(row);
        }
    } else {
        header = ["problem".to_string(), "eps".to_string()].into_iter().chain(methods.iter().cloned()).collect();
        let mut totals = vec![vec![Some(0.0); methods.len()]; eps.len()];
        for g in &groups {
            for (ei, e) in eps.iter().enumerate() {
                let mut row = vec![row_label(table, g), format!("{:.0e}", f64::from_bits(*e))];
                for (mi, m) in methods.iter().enumerate() {
                    match find(g, m, *e) {
                        Some(r) => {
                            row.push(format!("{:.1}", r.mean_iters));
                            if let Some(t) = &mut totals[ei][mi] {
                                *t += r.mean_iters;
                            }
                        }
                        None => {
                            missing += 1;
                            totals[ei][mi] = None;
                            row.push("-".into());
                        }
                    }
                }
                body.push(row);
            }
        }
        if table.has_totals() {
            for (ei, e) in eps.iter().enumerate() {
                let mut row = vec!["total".to_string(), format!("{:.0e}", f64::from_bits(*e))];
                row.extend(totals[ei].iter().map(|t| t.map_or("-".to_string(), |v| format!("{v:.1}"))));
                body.push(row);
            }
        }
    }
    Ok(RenderedTable { text: layout(header, body), missing })
}
