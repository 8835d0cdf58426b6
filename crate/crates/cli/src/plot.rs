//! Charts from CSV columns. Rows with a nonempty `marker` cell are drawn as
//! labelled points instead of being part of the lines.

use std::path::Path;

use crate::error::{invalid, CliError, Result};
use crate::svg::{render, Chart, Series};
use crate::table::CsvData;

pub const MARKER_COLUMN: &str = "marker";

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotSpec {
    pub fn new(title: &str, x: &str, ys: &[&str], log_x: bool, log_y: bool) -> Self {
        PlotSpec {
            title: title.to_string(),
            x: x.to_string(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            log_x,
            log_y,
        }
    }
}

pub fn chart_from_csv(data: &CsvData, spec: &PlotSpec) -> Result<Chart> {
    if spec.ys.is_empty() {
        return invalid("no y columns given");
    }
    let marker_col = data.columns.iter().position(|c| c == MARKER_COLUMN);
    let (plain, marked): (Vec<usize>, Vec<usize>) = (0..data.rows.len())
        .partition(|r| marker_col.is_none_or(|m| data.rows[*r][m].is_empty()));
    let xs = data.numeric(&spec.x, &plain)?;
    let mut series = Vec::new();
    for y in &spec.ys {
        let ys = data.numeric(y, &plain)?;
        series.push(Series::line(y, xs.iter().copied().zip(ys).collect()));
    }
    if let Some(m) = marker_col {
        let mx = data.numeric(&spec.x, &marked)?;
        for y in &spec.ys {
            let my = data.numeric(y, &marked)?;
            for (i, r) in marked.iter().enumerate() {
                let label = &data.rows[*r][m];
                let name = if spec.ys.len() == 1 {
                    label.clone()
                } else {
                    format!("{label} ({y})")
                };
                series.push(Series::markers(&name, vec![(mx[i], my[i])]));
            }
        }
    }
    Ok(Chart {
        title: spec.title.clone(),
        x_label: spec.x.clone(),
        y_label: spec.ys.join(", "),
        log_x: spec.log_x,
        log_y: spec.log_y,
        series,
    })
}

/// Renders `spec` from the CSV at `csv_path` into `svg_path`.
pub fn plot_file(csv_path: &Path, spec: &PlotSpec, svg_path: &Path) -> Result<()> {
    let data = CsvData::read(csv_path)?;
    let svg = render(&chart_from_csv(&data, spec)?)?;
    std::fs::write(svg_path, svg).map_err(|e| CliError::io(svg_path, e))
}
