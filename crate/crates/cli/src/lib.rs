//! Experiment driver: reads a flat configuration, runs one experiment and
//! writes CSV tables, SVG charts and a JSON metadata sidecar.

pub mod config;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod plot;
pub mod svg;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use experiments::{run, ExperimentKind, ExperimentOutput};
pub use plot::{plot_file, PlotSpec};

use table::{Metadata, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub kind: ExperimentKind,
    pub config_text: String,
    pub out_dir: PathBuf,
    /// Overrides the configured seed.
    pub seed: Option<u64>,
    pub dump_matrices: bool,
}

/// Runs an experiment and writes its files; returns the paths written,
/// metadata last.
pub fn execute(req: &RunRequest) -> Result<Vec<PathBuf>> {
    let mut cfg = ExperimentConfig::parse(&req.config_text)?;
    if let Some(seed) = req.seed {
        cfg.seed = seed;
    }
    let output = run(req.kind, &cfg, cfg.seed)?;
    let matrices = if req.dump_matrices {
        experiments::operator_matrices(&cfg)?
    } else {
        Vec::new()
    };

    fs::create_dir_all(&req.out_dir).map_err(|e| CliError::io(&req.out_dir, e))?;
    let mut written = Vec::new();
    for named in &output.tables {
        let csv = req.out_dir.join(format!("{}.csv", named.stem));
        named.table.write_csv(&csv)?;
        written.push(csv.clone());
        if let Some(spec) = &named.plot {
            let svg = req.out_dir.join(format!("{}.svg", named.stem));
            plot_file(&csv, spec, &svg)?;
            written.push(svg);
        }
    }
    if !matrices.is_empty() {
        let dir = req.out_dir.join("matrices");
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        for (name, m) in &matrices {
            let path = dir.join(format!("{name}.csv"));
            Table::from_matrix(m).write_csv(&path)?;
            written.push(path);
        }
    }

    let meta_path = req.out_dir.join(format!("{}.meta.json", req.kind.name().replace('-', "_")));
    let meta = Metadata {
        tool: "dfn-osm",
        version: env!("CARGO_PKG_VERSION"),
        experiment: req.kind.name().to_string(),
        seed: cfg.seed,
        config: cfg.echo(),
        outputs: written.iter().map(|p| relative(p, &req.out_dir)).collect(),
        summary: output.summary,
    };
    meta.write(&meta_path)?;
    written.push(meta_path);
    Ok(written)
}

fn relative(path: &Path, base: &Path) -> String {
    path.strip_prefix(base)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}
