//! Sample tables, checks evaluated from those tables, and CSV/SVG output.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::regression::fit_loglog;

/// One sample. `series` groups rows that a check reads together.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub series: String,
    pub text: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub text_columns: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(text_columns: &[&str], columns: &[&str]) -> Self {
        Self {
            text_columns: text_columns.iter().map(|s| s.to_string()).collect(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, series: &str, text: Vec<String>, values: Vec<f64>) {
        assert_eq!(text.len(), self.text_columns.len(), "text column count");
        assert_eq!(values.len(), self.columns.len(), "value column count");
        self.rows.push(Row {
            series: series.to_string(),
            text,
            values,
        });
    }

    pub fn column(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    fn series_rows<'a>(&'a self, series: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.series == series)
    }
}

/// Quantity a check extracts from the rows of one series.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    /// Least-squares slope of `log y` against `log x`.
    LogLogSlope { x: String, y: String },
    Max(String),
    Min(String),
    /// `max / min` of a column.
    MaxOverMin(String),
    /// Consecutive ratios `y_i / y_{i+1}`; the check applies to each.
    StepRatios(String),
    /// `max |a - b|`.
    MaxAbsDiff(String, String),
    /// Rows whose two text columns differ.
    TextMismatches(String, String),
    /// Every value of a column is finite.
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparison {
    Within { target: f64, tol: f64 },
    Below(f64),
    Above(f64),
}

/// Plain decimal when short, otherwise scientific.
fn short(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 6 {
        plain
    } else if (1e-2..1e4).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:e}")
    }
}

impl Comparison {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Comparison::Within { target, tol } => (v - target).abs() <= tol,
            Comparison::Below(b) => v < b,
            Comparison::Above(b) => v > b,
        }
    }

    pub fn predicted(&self) -> f64 {
        match *self {
            Comparison::Within { target, .. } => target,
            Comparison::Below(b) | Comparison::Above(b) => b,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Comparison::Within { target, tol } => format!("{} +- {}", short(target), short(tol)),
            Comparison::Below(b) => format!("< {}", short(b)),
            Comparison::Above(b) => format!("> {}", short(b)),
        }
    }

    fn tolerance(&self) -> f64 {
        match *self {
            Comparison::Within { tol, .. } => tol,
            _ => 0.0,
        }
    }

    /// How far `v` is from failing; larger is worse.
    fn badness(&self, v: f64) -> f64 {
        match *self {
            Comparison::Within { target, .. } => (v - target).abs(),
            Comparison::Below(_) => v,
            Comparison::Above(_) => -v,
        }
    }
}

/// A predicted value with the statement it comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub series: String,
    pub statistic: Statistic,
    pub comparison: Comparison,
    pub anchor: String,
}

impl Check {
    pub fn new(name: &str, series: &str, statistic: Statistic, comparison: Comparison, anchor: &str) -> Self {
        Self {
            name: name.to_string(),
            series: series.to_string(),
            statistic,
            comparison,
            anchor: anchor.to_string(),
        }
    }

    /// Observed value (the worst one for multi-valued statistics), fit residual, verdict.
    pub fn evaluate(&self, table: &Table) -> Outcome {
        let rows: Vec<&Row> = table.series_rows(&self.series).collect();
        let col = |name: &str| -> Vec<f64> {
            let i = table.column(name);
            rows.iter().map(|r| r.values[i]).collect()
        };
        let mut residual = None;
        let observed: Vec<f64> = match &self.statistic {
            Statistic::LogLogSlope { x, y } => {
                let (xs, ys) = (col(x), col(y));
                if xs.len() < 2 || ys.iter().chain(&xs).any(|v| !(*v > 0.0) || !v.is_finite()) {
                    vec![f64::NAN]
                } else {
                    let fit = fit_loglog(&xs, &ys);
                    residual = Some(fit.residual);
                    vec![fit.slope]
                }
            }
            Statistic::Max(c) => vec![col(c).into_iter().fold(f64::NEG_INFINITY, f64::max)],
            Statistic::Min(c) => vec![col(c).into_iter().fold(f64::INFINITY, f64::min)],
            Statistic::MaxOverMin(c) => {
                let v = col(c);
                let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                vec![max / min]
            }
            Statistic::StepRatios(c) => col(c).windows(2).map(|w| w[0] / w[1]).collect(),
            Statistic::MaxAbsDiff(a, b) => {
                let (va, vb) = (col(a), col(b));
                vec![va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)]
            }
            Statistic::TextMismatches(a, b) => {
                let ia = table.text_columns.iter().position(|c| c == a).expect("text column");
                let ib = table.text_columns.iter().position(|c| c == b).expect("text column");
                vec![rows.iter().filter(|r| r.text[ia] != r.text[ib]).count() as f64]
            }
            Statistic::NonFinite(c) => vec![col(c).iter().filter(|v| !v.is_finite()).count() as f64],
        };
        let pass = !rows.is_empty() && !observed.is_empty() && observed.iter().all(|&v| self.comparison.holds(v));
        let worst = observed
            .iter()
            .copied()
            .fold(None, |acc: Option<f64>, v| match acc {
                None => Some(v),
                Some(a) if v.is_nan() || self.comparison.badness(v) > self.comparison.badness(a) => Some(v),
                keep => keep,
            })
            .unwrap_or(f64::NAN);
        Outcome {
            name: self.name.clone(),
            observed: worst,
            residual,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub observed: f64,
    pub residual: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Vec<(String, String)>,
    pub table: Table,
    pub checks: Vec<Check>,
    pub outcomes: Vec<Outcome>,
    /// Free-form lines printed after the summary.
    pub notes: Vec<String>,
    /// Wall time in seconds; kept out of the CSV.
    pub seconds: f64,
}

impl ExperimentReport {
    pub fn new(name: &str, config: Vec<(String, String)>, table: Table, checks: Vec<Check>) -> Self {
        let outcomes = checks.iter().map(|c| c.evaluate(&table)).collect();
        Self {
            name: name.to_string(),
            config,
            table,
            checks,
            outcomes,
            notes: Vec::new(),
            seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    fn series_check(&self, series: &str) -> Option<(&Check, &Outcome)> {
        self.checks.iter().zip(&self.outcomes).find(|(c, _)| c.series == series)
    }

    /// CSV: header, one record per sample, then `#` summary lines per check.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        let map = |e: csv::Error| Error::Io(e.to_string());
        let mut header = vec!["series".to_string()];
        header.extend(self.table.text_columns.iter().cloned());
        header.extend(self.table.columns.iter().cloned());
        header.extend(["check", "fitted", "predicted", "tolerance", "verdict"].map(String::from));
        out.write_record(&header).map_err(map)?;
        for row in &self.table.rows {
            let mut rec = vec![row.series.clone()];
            rec.extend(row.text.iter().cloned());
            rec.extend(row.values.iter().map(|v| fmt_num(*v)));
            match self.series_check(&row.series) {
                Some((c, o)) => rec.extend([
                    c.name.clone(),
                    fmt_num(o.observed),
                    fmt_num(c.comparison.predicted()),
                    fmt_num(c.comparison.tolerance()),
                    verdict(o.pass).to_string(),
                ]),
                None => rec.extend(["", "", "", "", ""].map(String::from)),
            }
            out.write_record(&rec).map_err(map)?;
        }
        let mut w = out.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        for (c, o) in self.checks.iter().zip(&self.outcomes) {
            writeln!(
                w,
                "# {}: observed {} expected {} [{}] {}",
                c.name,
                fmt_num(o.observed),
                c.comparison.describe(),
                c.anchor,
                verdict(o.pass)
            )?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }

    /// Re-reads a CSV written by [`write_csv`](Self::write_csv) and re-evaluates the checks
    /// from its rows alone.
    pub fn recheck(&self, csv_text: &str) -> Result<Vec<Outcome>> {
        let body: String = csv_text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let nt = self.table.text_columns.len();
        let nv = self.table.columns.len();
        let mut table = Table {
            text_columns: self.table.text_columns.clone(),
            columns: self.table.columns.clone(),
            rows: Vec::new(),
        };
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let get = |i: usize| rec.get(i).ok_or_else(|| Error::Format("short record".into()));
            let text = (0..nt).map(|i| get(1 + i).map(str::to_string)).collect::<Result<_>>()?;
            let values = (0..nv)
                .map(|i| {
                    let s = get(1 + nt + i)?;
                    s.parse::<f64>().map_err(|_| Error::Format(format!("bad number `{s}`")))
                })
                .collect::<Result<_>>()?;
            table.rows.push(Row {
                series: get(0)?.to_string(),
                text,
                values,
            });
        }
        Ok(self.checks.iter().map(|c| c.evaluate(&table)).collect())
    }

    /// Human-readable summary, one line per check.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (c, o) in self.checks.iter().zip(&self.outcomes) {
            let _ = write!(
                s,
                "{} {}/{}: observed {:.4e} expected {}",
                verdict(o.pass),
                self.name,
                c.name,
                o.observed,
                c.comparison.describe()
            );
            if let Some(r) = o.residual {
                let _ = write!(s, " (fit residual {r:.2e})");
            }
            s.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(s, "  {n}");
        }
        s
    }

    /// Log-log plot of every series carrying a slope check, with the fitted line.
    pub fn write_svg(&self, mut w: impl Write) -> Result<()> {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const M: f64 = 60.0;
        let mut series = Vec::new();
        for (c, o) in self.checks.iter().zip(&self.outcomes) {
            if let Statistic::LogLogSlope { x, y } = &c.statistic {
                let (ix, iy) = (self.table.column(x), self.table.column(y));
                let pts: Vec<(f64, f64)> = self
                    .table
                    .series_rows(&c.series)
                    .map(|r| (r.values[ix], r.values[iy]))
                    .filter(|(a, b)| *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite())
                    .map(|(a, b)| (a.log10(), b.log10()))
                    .collect();
                if pts.len() >= 2 {
                    series.push((c.series.clone(), x.clone(), y.clone(), pts, o.observed));
                }
            }
        }
        let all = series.iter().flat_map(|s| s.3.iter().copied());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (a, b) in all {
            x0 = x0.min(a);
            x1 = x1.max(a);
            y0 = y0.min(b);
            y1 = y1.max(b);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| if b - a < 1e-12 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        let px = |v: f64| M + (v - x0) / (x1 - x0) * (W - 2.0 * M);
        let py = |v: f64| H - M - (v - y0) / (y1 - y0) * (H - 2.0 * M);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * M,
            H - 2.0 * M
        );
        let (xl, yl) = series
            .first()
            .map(|s| (s.1.clone(), s.2.clone()))
            .unwrap_or_else(|| ("x".into(), "y".into()));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">log10 {xl}</text>"#, W / 2.0, H - 15.0);
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">log10 {yl}</text>"#,
            H / 2.0,
            H / 2.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle">{}</text>"#, W / 2.0, self.name);
        for (i, (name, _, _, pts, slope)) in series.iter().enumerate() {
            let col = colors[i % colors.len()];
            for (a, b) in pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{col}"/>"#, px(*a), py(*b));
            }
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let (a0, a1) = (pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min), pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max));
            let line = |a: f64| my + slope * (a - mx);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{col}"/>"#,
                px(a0),
                py(line(a0)),
                px(a1),
                py(line(a1))
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{col}">{name}: slope {slope:.3}</text>"#,
                M + 10.0,
                M + 18.0 * (i + 1) as f64
            );
        }
        s.push_str("</svg>\n");
        w.write_all(s.as_bytes())?;
        Ok(())
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// Shortest round-trip representation.
fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut t = Table::new(&["tag"], &["x", "y"]);
        for i in 1..=5 {
            let x = 2f64.powi(-i);
            t.push("a", vec![format!("p{i}")], vec![x, 3.0 * x.powf(-0.5)]);
        }
        t.push("b", vec!["q".into()], vec![1.0, 2.0]);
        let checks = vec![
            Check::new(
                "slope",
                "a",
                Statistic::LogLogSlope { x: "x".into(), y: "y".into() },
                Comparison::Within { target: -0.5, tol: 1e-9 },
                "power law",
            ),
            Check::new("small", "b", Statistic::Max("y".into()), Comparison::Below(1.5), "bound"),
        ];
        ExperimentReport::new("demo", vec![], t, checks)
    }

    #[test]
    fn verdicts_from_table() {
        let r = sample();
        assert!(r.outcomes[0].pass);
        assert!((r.outcomes[0].observed + 0.5).abs() < 1e-12);
        assert!(!r.outcomes[1].pass);
        assert!(!r.passed());
    }

    #[test]
    fn csv_recheck_matches() {
        let r = sample();
        let text = r.csv_string().unwrap();
        assert!(text.starts_with("series,tag,x,y,check,fitted,predicted,tolerance,verdict\n"));
        assert_eq!(r.recheck(&text).unwrap(), r.outcomes);
        let mut svg = Vec::new();
        r.write_svg(&mut svg).unwrap();
        assert!(String::from_utf8(svg).unwrap().contains("slope -0.500"));
    }

    #[test]
    fn step_ratios_report_worst() {
        let mut t = Table::new(&[], &["d"]);
        for v in [8.0, 4.0, 3.0] {
            t.push("s", vec![], vec![v]);
        }
        let c = Check::new("halves", "s", Statistic::StepRatios("d".into()), Comparison::Within { target: 2.0, tol: 0.4 }, "");
        let o = c.evaluate(&t);
        assert!(!o.pass);
        assert!((o.observed - 4.0 / 3.0).abs() < 1e-15);
    }
}
