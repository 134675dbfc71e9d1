//! Companion gnuplot scripts. The artifact never renders images; it emits a
//! standalone script next to each CSV so `gnuplot <script>` reproduces the
//! curve from the data file alone.

use crate::errors::CliError;
use std::path::Path;

/// One curve: named columns from the CSV, with optional row predicates on
/// the string columns (engine, policy, scheme).
#[derive(Debug, Clone)]
pub struct PlotLine {
    pub x_col: String,
    pub y_col: String,
    pub title: String,
    /// (column, value) pairs; a row contributes only when all match.
    pub filters: Vec<(String, String)>,
    pub style: &'static str,
}

impl PlotLine {
    pub fn new(x: &str, y: &str, title: &str) -> Self {
        PlotLine {
            x_col: x.to_string(),
            y_col: y.to_string(),
            title: title.to_string(),
            filters: Vec::new(),
            style: "linespoints",
        }
    }

    pub fn filter(mut self, col: &str, value: &str) -> Self {
        self.filters.push((col.to_string(), value.to_string()));
        self
    }

    pub fn style(mut self, style: &'static str) -> Self {
        self.style = style;
        self
    }

    fn using_expr(&self) -> String {
        if self.filters.is_empty() {
            return format!("(column(\"{}\")):(column(\"{}\"))", self.x_col, self.y_col);
        }
        let cond = self
            .filters
            .iter()
            .map(|(c, v)| format!("strcol(\"{c}\") eq \"{v}\""))
            .collect::<Vec<_>>()
            .join(" && ");
        // rows failing the predicate turn into NaN x-values, which gnuplot
        // drops via `set datafile missing`
        format!("(({cond}) ? column(\"{}\") : NaN):(column(\"{}\"))", self.x_col, self.y_col)
    }
}

pub struct PlotSpec {
    pub csv_file: String,
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub logscale_y: bool,
    pub lines: Vec<PlotLine>,
}

pub fn render(p: &PlotSpec) -> String {
    let mut s = String::new();
    s.push_str("#!/usr/bin/env gnuplot\n");
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set datafile missing \"nan\"\n");
    s.push_str(&format!("set title \"{}\"\n", p.title));
    s.push_str(&format!("set xlabel \"{}\"\n", p.xlabel));
    s.push_str(&format!("set ylabel \"{}\"\n", p.ylabel));
    if p.logscale_y {
        s.push_str("set logscale y\n");
    }
    s.push_str("set key outside right\n");
    s.push_str("set grid\n");
    let plots: Vec<String> = p
        .lines
        .iter()
        .map(|l| format!("  \"{}\" using {} with {} title \"{}\"", p.csv_file, l.using_expr(), l.style, l.title))
        .collect();
    s.push_str("plot \\\n");
    s.push_str(&plots.join(", \\\n"));
    s.push('\n');
    s.push_str("pause -1 \"press enter to close\"\n");
    s
}

pub fn write_script(p: &PlotSpec, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, render(p)).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtered_line_uses_nan_predicate() {
        let l = PlotLine::new("p_dbm", "outage_prob", "exact").filter("engine", "analytic");
        assert_eq!(
            l.using_expr(),
            "((strcol(\"engine\") eq \"analytic\") ? column(\"p_dbm\") : NaN):(column(\"outage_prob\"))"
        );
    }

    #[test]
    fn script_lists_every_line() {
        let p = PlotSpec {
            csv_file: "demo.csv".into(),
            title: "demo".into(),
            xlabel: "x".into(),
            ylabel: "y".into(),
            logscale_y: true,
            lines: vec![PlotLine::new("x", "y", "a"), PlotLine::new("x", "z", "b")],
        };
        let text = render(&p);
        assert!(text.contains("set logscale y"));
        assert_eq!(text.matches("\"demo.csv\" using").count(), 2);
    }
}
