use std::fmt::Write;
use std::str::FromStr;

use super::run::Report;
use super::Definition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderOptions {
    /// Include wall-clock timings. Off by default so that reports are
    /// byte-identical across runs.
    pub timing: bool,
}

fn family(sets: &[Vec<String>]) -> String {
    if sets.is_empty() {
        return "none".into();
    }
    sets.iter()
        .map(|s| format!("({})", s.join(", ")))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Definitions that occur in at least one case, in canonical order.
fn columns(report: &Report) -> Vec<Definition> {
    Definition::ALL
        .into_iter()
        .filter(|d| {
            report
                .cases
                .iter()
                .any(|c| c.results.iter().any(|r| r.definition == *d))
        })
        .collect()
}

pub fn render_report(report: &Report, format: Format, opts: RenderOptions) -> String {
    match format {
        Format::Markdown => markdown(report, opts),
        Format::Csv => csv_text(report, opts),
        Format::Json => json(report, opts),
    }
}

fn markdown(report: &Report, opts: RenderOptions) -> String {
    let cols = columns(report);
    let mut out = String::new();
    out.push_str("| Case |");
    for d in &cols {
        let _ = write!(out, " {} |", d.title());
    }
    out.push_str(" Result |");
    if opts.timing {
        out.push_str(" Time (ms) |");
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &cols {
        out.push_str("---|");
    }
    out.push_str("---|");
    if opts.timing {
        out.push_str("---:|");
    }
    out.push('\n');
    for c in &report.cases {
        let _ = write!(out, "| {} |", c.id);
        for d in &cols {
            let cell = match c.results.iter().find(|r| r.definition == *d) {
                None => String::new(),
                Some(r) => match (&r.computed, r.pass) {
                    (Some(got), true) => family(got),
                    (Some(got), false) => {
                        format!("{} (expected {})", family(got), family(&r.expected))
                    }
                    (None, _) => format!("error (expected {})", family(&r.expected)),
                },
            };
            let _ = write!(out, " {cell} |");
        }
        let _ = write!(out, " {} |", if c.pass { "pass" } else { "FAIL" });
        if opts.timing {
            let _ = write!(out, " {:.1} |", c.elapsed.as_secs_f64() * 1e3);
        }
        out.push('\n');
    }
    let errors: Vec<_> = report.cases.iter().filter_map(|c| Some((c, c.error.as_ref()?))).collect();
    if !errors.is_empty() {
        out.push('\n');
        for (c, e) in errors {
            let _ = writeln!(out, "- {}: {e}", c.id);
        }
    }
    let _ = write!(out, "\n{}", report.summary());
    if opts.timing {
        let _ = write!(out, " in {:.1} ms", report.elapsed.as_secs_f64() * 1e3);
    }
    out.push('\n');
    out
}

fn csv_text(report: &Report, opts: RenderOptions) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["case", "file", "definition", "expected", "computed", "pass", "error"];
    if opts.timing {
        header.push("elapsed_ms");
    }
    w.write_record(&header).expect("writing to memory");
    for c in &report.cases {
        for r in &c.results {
            let mut rec = vec![
                c.id.clone(),
                c.file.clone(),
                r.definition.key().to_string(),
                family(&r.expected),
                r.computed.as_deref().map(family).unwrap_or_default(),
                r.pass.to_string(),
                c.error.clone().unwrap_or_default(),
            ];
            if opts.timing {
                rec.push(format!("{:.3}", c.elapsed.as_secs_f64() * 1e3));
            }
            w.write_record(&rec).expect("writing to memory");
        }
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
}

fn json(report: &Report, opts: RenderOptions) -> String {
    let mut v = serde_json::to_value(report).expect("report serializes");
    v["summary"] = report.summary().into();
    if opts.timing {
        v["elapsed_ms"] = (report.elapsed.as_secs_f64() * 1e3).into();
        if let Some(cases) = v["cases"].as_array_mut() {
            for (cv, c) in cases.iter_mut().zip(&report.cases) {
                cv["elapsed_ms"] = (c.elapsed.as_secs_f64() * 1e3).into();
            }
        }
    }
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}
