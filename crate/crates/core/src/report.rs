//! Table rows as CSV and key–value structured text.

use std::fmt::Write as _;

use crate::qseries;
use crate::restrict::{NiemeierVerdict, RestrictionReport};
use crate::scalar::{format_rational, format_sig};
use crate::BigInt;

/// Significant digits of every printed float.
pub const FLOAT_DIGITS: usize = 8;

pub fn float(x: f64) -> String {
    format_sig(x, FLOAT_DIGITS)
}

/// One field's row: the restriction for every requested k, or the failure.
#[derive(Debug, Clone)]
pub struct TableRecord {
    pub label: String,
    pub disc: BigInt,
    pub reports: Vec<RestrictionReport>,
    pub verdict: Option<NiemeierVerdict>,
    pub error: Option<String>,
}

pub fn verdict_text(v: &NiemeierVerdict) -> String {
    match v {
        NiemeierVerdict::Independent => "Independent".to_string(),
        NiemeierVerdict::Inconclusive { n2, lattices } => format!("Inconclusive(N2={n2}:{})", lattices.join("|")),
    }
}

/// Number of non-leading coordinates for weight w.
fn coordinate_count(w: u32) -> usize {
    qseries::dim_mk(w as i64).map(|m| m.saturating_sub(1)).unwrap_or(0)
}

pub fn table_header(degree: usize, ks: &[u32], with_verdict: bool) -> Vec<String> {
    let mut h = vec!["label".to_string(), "disc".to_string()];
    for &k in ks {
        let n = coordinate_count(degree as u32 * k);
        for i in 1..=n {
            h.push(format!("k{k}_coord{i}"));
        }
        for i in 1..=n {
            h.push(format!("k{k}_diff{i}"));
        }
    }
    if with_verdict {
        h.push("verdict".to_string());
    }
    h.push("status".to_string());
    h
}

fn record_cells(degree: usize, ks: &[u32], with_verdict: bool, r: &TableRecord) -> Vec<String> {
    let mut cells = vec![r.label.clone(), r.disc.to_string()];
    for &k in ks {
        let n = coordinate_count(degree as u32 * k);
        match r.reports.iter().find(|x| x.k == k) {
            Some(rep) => {
                cells.extend(rep.coords.iter().skip(1).take(n).map(format_rational));
                cells.extend(rep.diffs.iter().skip(1).take(n).map(|d| float(*d)));
            }
            None => cells.extend(std::iter::repeat(String::new()).take(2 * n)),
        }
    }
    if with_verdict {
        cells.push(r.verdict.as_ref().map(verdict_text).unwrap_or_default());
    }
    cells.push(match &r.error {
        Some(e) => format!("error: {e}"),
        None => "ok".to_string(),
    });
    cells
}

pub fn table_csv(degree: usize, ks: &[u32], with_verdict: bool, records: &[TableRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(table_header(degree, ks, with_verdict)).expect("in-memory write");
    for r in records {
        w.write_record(record_cells(degree, ks, with_verdict, r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Blocks of `key: value` lines separated by blank lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TextReport {
    blocks: Vec<(String, Vec<(String, String)>)>,
}

impl TextReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, title: impl Into<String>) -> &mut Self {
        self.blocks.push((title.into(), Vec::new()));
        self
    }

    pub fn entry(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        if self.blocks.is_empty() {
            self.section("report");
        }
        self.blocks.last_mut().expect("a section exists").1.push((key.into(), value.into()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, (title, entries)) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            let _ = writeln!(s, "[{title}]");
            for (k, v) in entries {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
        s
    }
}

pub fn table_text(degree: usize, ks: &[u32], with_verdict: bool, records: &[TableRecord]) -> String {
    let header = table_header(degree, ks, with_verdict);
    let mut t = TextReport::new();
    for r in records {
        t.section(r.label.clone());
        for (k, v) in header.iter().zip(record_cells(degree, ks, with_verdict, r)).skip(1) {
            t.entry(k.clone(), v);
        }
    }
    t.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_layout() {
        let mut t = TextReport::new();
        t.section("a").entry("x", "1").entry("y", "2/3");
        t.section("b").entry("z", float(1.0 / 3.0));
        assert_eq!(t.render(), "[a]\nx: 1\ny: 2/3\n\n[b]\nz: 0.33333333\n");
    }

    #[test]
    fn header_shape() {
        let h = table_header(4, &[4, 6], false);
        assert_eq!(h.len(), 2 + 2 + 4 + 1);
        let h = table_header(6, &[2], true);
        assert_eq!(h, ["label", "disc", "k2_coord1", "k2_diff1", "verdict", "status"]);
    }
}
