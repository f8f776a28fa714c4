//! Rendering QRA results as text, markdown, CSV and JSON documents.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::QraReport;
use crate::precision::NORMALITY_CAVEAT;

pub const PRECISION_CSV_HEADER: &str = "object,measurand,n,mean,stdev,ci_lo,ci_hi,cv_star";
pub const MAX_DECIMALS: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderFormat {
    Text,
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub format: RenderFormat,
    pub decimals_cv: u8,
    pub decimals_stats: u8,
    pub include_caveats: bool,
    /// Order precision-table rows by ascending CV* instead of input order.
    pub sort_by_cv: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            format: RenderFormat::Text,
            decimals_cv: 3,
            decimals_stats: 2,
            include_caveats: true,
            sort_by_cv: false,
        }
    }
}

impl RenderSpec {
    pub fn new(format: RenderFormat) -> Self {
        RenderSpec {
            format,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, d) in [
            ("decimals_cv", self.decimals_cv),
            ("decimals_stats", self.decimals_stats),
        ] {
            if d > MAX_DECIMALS {
                return Err(format!("{name} must be in [0, {MAX_DECIMALS}], got {d}"));
            }
        }
        Ok(())
    }

    fn cv_places(&self) -> usize {
        self.decimals_cv.min(MAX_DECIMALS) as usize
    }

    fn stat_places(&self) -> usize {
        self.decimals_stats.min(MAX_DECIMALS) as usize
    }
}

/// Fixed-point formatting without a negative sign on zero.
pub fn fixed(v: f64, places: usize) -> String {
    let s = format!("{v:.places$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn values_cell(report: &QraReport) -> String {
    report
        .measurements
        .iter()
        .map(|m| m.value.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize, right: bool) -> String {
    let fill = " ".repeat(w.saturating_sub(width(s)));
    if right {
        format!("{fill}{s}")
    } else {
        format!("{s}{fill}")
    }
}

fn text_table(header: &[String], rows: &[Vec<String>], right_align: &[bool]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| width(h)).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(width(cell));
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .zip(right_align)
            .map(|((c, w), r)| pad(c, *w, *r))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(
        &widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

fn markdown_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn markdown_table(header: &[String], rows: &[Vec<String>], right_align: &[bool]) -> String {
    let join = |cells: Vec<String>| format!("| {} |\n", cells.join(" | "));
    let mut out = join(header.iter().map(|h| markdown_escape(h)).collect());
    out.push_str(&join(
        right_align
            .iter()
            .map(|r| {
                if *r {
                    "---:".to_string()
                } else {
                    "---".to_string()
                }
            })
            .collect(),
    ));
    for row in rows {
        out.push_str(&join(row.iter().map(|c| markdown_escape(c)).collect()));
    }
    out
}

fn csv_document(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn ordered<'a>(reports: &'a [QraReport], spec: &RenderSpec) -> Vec<&'a QraReport> {
    let mut refs: Vec<&QraReport> = reports.iter().collect();
    if spec.sort_by_cv {
        refs.sort_by(|a, b| a.precision.cv_star.total_cmp(&b.precision.cv_star));
    }
    refs
}

/// One row per report: values, sample size, mean, s*, its 95% CI, and CV*.
pub fn render_precision_table(reports: &[QraReport], spec: &RenderSpec) -> String {
    let reports = ordered(reports, spec);
    let (sp, cp) = (spec.stat_places(), spec.cv_places());

    match spec.format {
        RenderFormat::Json => {
            let mut doc = json!({ "reports": reports });
            if spec.include_caveats {
                doc["caveat"] = json!(NORMALITY_CAVEAT);
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        }
        RenderFormat::Csv => {
            let header: Vec<String> = PRECISION_CSV_HEADER.split(',').map(String::from).collect();
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let p = &r.precision;
                    vec![
                        r.object.id.clone(),
                        r.measurand.id.clone(),
                        p.n.to_string(),
                        fixed(p.mean, sp),
                        fixed(p.s_star, sp),
                        fixed(p.ci95.lo, sp),
                        fixed(p.ci95.hi, sp),
                        fixed(p.cv_star, cp),
                    ]
                })
                .collect();
            csv_document(&header, &rows)
        }
        RenderFormat::Text | RenderFormat::Markdown => {
            let header: Vec<String> = [
                "object",
                "measurand",
                "measured quantity values",
                "n",
                "mean",
                "stdev",
                "stdev 95% CI",
                "CV*",
            ]
            .map(String::from)
            .to_vec();
            let right = [false, false, false, true, true, true, true, true];
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let p = &r.precision;
                    vec![
                        r.object.display_name.clone(),
                        r.measurand.display_name.clone(),
                        values_cell(r),
                        p.n.to_string(),
                        fixed(p.mean, sp),
                        fixed(p.s_star, sp),
                        format!("[{}, {}]", fixed(p.ci95.lo, sp), fixed(p.ci95.hi, sp)),
                        fixed(p.cv_star, cp),
                    ]
                })
                .collect();
            let mut out = if spec.format == RenderFormat::Text {
                text_table(&header, &rows, &right)
            } else {
                markdown_table(&header, &rows, &right)
            };
            if spec.include_caveats {
                out.push('\n');
                out.push_str("Note: ");
                out.push_str(NORMALITY_CAVEAT);
                out.push('\n');
            }
            out
        }
    }
}

/// One row per measurement and one column per condition; unknown values
/// print as `?`. A footer gives the verdict per condition and the
/// classification.
pub fn render_condition_matrix(report: &QraReport, spec: &RenderSpec) -> String {
    let diff = &report.diff;
    let cells = |row: &[crate::model::ConditionValue]| {
        row.iter().map(|v| v.to_string()).collect::<Vec<_>>()
    };

    if spec.format == RenderFormat::Json {
        let rows: Vec<_> = report
            .measurements
            .iter()
            .zip(&diff.rows)
            .map(|(m, row)| json!({ "value": m.value, "source": m.source, "conditions": row }))
            .collect();
        let doc = json!({
            "object": report.object.id,
            "measurand": report.measurand.id,
            "conditions": diff.conditions,
            "rows": rows,
            "verdicts": diff.verdicts,
            "classification": report.classification,
            "excluded": report.excluded,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("matrix serializes");
        s.push('\n');
        return s;
    }

    let mut header: Vec<String> = vec!["#".into(), "value".into(), "source".into()];
    header.extend(diff.conditions.iter().cloned());
    let rows: Vec<Vec<String>> = report
        .measurements
        .iter()
        .zip(&diff.rows)
        .enumerate()
        .map(|(i, (m, row))| {
            let mut r = vec![(i + 1).to_string(), m.value.to_string(), m.source.clone()];
            r.extend(cells(row));
            r
        })
        .collect();
    let verdicts = diff
        .conditions
        .iter()
        .zip(&diff.verdicts)
        .map(|(c, v)| format!("{c}={}", v.as_str()))
        .collect::<Vec<_>>()
        .join(", ");
    let classification = format!("classification: {}", report.classification.as_str());

    if spec.format == RenderFormat::Csv {
        let mut rows = rows;
        let mut verdict_row = vec!["verdict".to_string(), String::new(), String::new()];
        verdict_row.extend(diff.verdicts.iter().map(|v| v.as_str().to_string()));
        rows.push(verdict_row);
        rows.push(vec![
            "classification".to_string(),
            report.classification.as_str().to_string(),
        ]);
        return csv_document(&header, &rows);
    }

    let right: Vec<bool> = (0..header.len()).map(|i| i < 2).collect();
    let title = format!(
        "{} / {} (n={})",
        report.object.display_name,
        report.measurand.display_name,
        report.measurements.len()
    );
    let (mut out, footer_prefix) = if spec.format == RenderFormat::Markdown {
        (
            format!("#### {title}\n\n{}", markdown_table(&header, &rows, &right)),
            "\n",
        )
    } else {
        (
            format!("{title}\n{}", text_table(&header, &rows, &right)),
            "",
        )
    };
    out.push_str(footer_prefix);
    out.push_str(&format!("verdicts: {verdicts}\n{classification}\n"));
    if !report.excluded.is_empty() {
        let list = report
            .excluded
            .iter()
            .map(|m| format!("{} ({})", m.value, m.source))
            .collect::<Vec<_>>()
            .join("; ");
        out.push_str(&format!("excluded by filter: {list}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_drops_negative_zero() {
        assert_eq!(fixed(-0.0001, 2), "0.00");
        assert_eq!(fixed(-0.004, 2), "0.00");
        assert_eq!(fixed(-0.11, 2), "-0.11");
        assert_eq!(fixed(1.5616, 3), "1.562");
        assert_eq!(fixed(2.0, 0), "2");
    }

    #[test]
    fn spec_validation() {
        assert!(RenderSpec::default().validate().is_ok());
        let spec = RenderSpec {
            decimals_cv: 11,
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }
}
