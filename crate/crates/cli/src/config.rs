//! Flat `key = value` experiment configuration. `#` starts a comment; keys
//! may appear at most once; unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dfn_osm_core::{BoundaryKind, Network, RobinParams, SourceTerm, TwoFractureGeometry};

use crate::error::{invalid, Result};
use crate::grid::{count, parse_count_grid, parse_real_grid, real};

const KEYS: &[&str] = &[
    "n_fractures",
    "length",
    "gamma1",
    "gamma2",
    "nu",
    "bc",
    "robin",
    "p",
    "h",
    "include_zero",
    "modes",
    "n_grid",
    "p_grid",
    "k_grid",
    "solver_h",
    "tol",
    "max_iter",
    "source",
    "source_amplitude",
    "source_wavenumber",
    "boundary_start",
    "boundary_end",
    "seed",
];

const DEFAULT_P_GRID: &str = "log:0.1:100:201";

#[derive(Debug, Clone, PartialEq)]
pub enum Diffusivity {
    Uniform(f64),
    PerFracture(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobinChoice {
    Uniform(f64),
    /// The two-fracture optimal pair `(s^-, s^+)` on every trace.
    TwoFracture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_fractures: usize,
    pub length: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nu: Diffusivity,
    pub bc: BoundaryKind,
    pub robin: RobinChoice,
    /// Mesh size fixing the mode range `k = 1..=ceil(L/h)`.
    pub h: f64,
    /// Whether mode sweeps add the `k = 0` (1D) operator; unset means
    /// only for Neumann configurations.
    pub include_zero: Option<bool>,
    /// Add per-mode (2D) columns to the N and p sweeps.
    pub modes: bool,
    pub n_grid: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub k_grid: Option<Vec<f64>>,
    /// Grid specifications as written, for the echo.
    grid_specs: BTreeMap<&'static str, String>,
    pub solver_h: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub source: SourceTerm,
    pub boundary_start: f64,
    pub boundary_end: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_fractures: 10,
            length: 1.0,
            gamma1: 0.2,
            gamma2: 0.6,
            nu: Diffusivity::Uniform(1.0),
            bc: BoundaryKind::DirichletEverywhere,
            robin: RobinChoice::Uniform(20.0),
            h: 0.01,
            include_zero: None,
            modes: false,
            n_grid: vec![10],
            p_grid: parse_real_grid("p_grid", DEFAULT_P_GRID).expect("valid default"),
            k_grid: None,
            grid_specs: BTreeMap::from([("p_grid", DEFAULT_P_GRID.to_string())]),
            solver_h: 1.0 / 160.0,
            tol: 1e-8,
            max_iter: 1000,
            source: SourceTerm::Zero,
            boundary_start: 0.0,
            boundary_end: 0.0,
            seed: 0,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => invalid(format!("{key}: expected true/false, got '{v}'")),
    }
}

fn raw_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return invalid(format!("line {}: expected 'key = value'", lineno + 1));
        };
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return invalid(format!("line {}: unknown key '{key}'", lineno + 1));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return invalid(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }
    Ok(map)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw = raw_pairs(text)?;
        let mut c = ExperimentConfig::default();
        let mut include_zero = None;
        let mut p = None;
        let mut robin_kind = None;
        let mut n_grid = None;
        let mut amplitude = 1.0;
        let mut wavenumber = 1.0;
        let mut source_kind = None;
        for (key, v) in &raw {
            let k = key.as_str();
            match k {
                "n_fractures" => c.n_fractures = count(k, v)?,
                "length" => c.length = real(k, v)?,
                "gamma1" => c.gamma1 = real(k, v)?,
                "gamma2" => c.gamma2 = real(k, v)?,
                "nu" => {
                    let vals = parse_real_grid(k, v)?;
                    c.nu = if vals.len() == 1 && !v.contains(',') {
                        Diffusivity::Uniform(vals[0])
                    } else {
                        Diffusivity::PerFracture(vals)
                    };
                }
                "bc" => {
                    c.bc = match v.as_str() {
                        "dirichlet" => BoundaryKind::DirichletEverywhere,
                        "neumann" => BoundaryKind::NeumannInterior,
                        _ => return invalid(format!("bc: expected dirichlet or neumann, got '{v}'")),
                    }
                }
                "robin" => robin_kind = Some(v.clone()),
                "p" => p = Some(real(k, v)?),
                "h" => c.h = real(k, v)?,
                "include_zero" => include_zero = Some(parse_bool(k, v)?),
                "modes" => c.modes = parse_bool(k, v)?,
                "n_grid" => {
                    n_grid = Some(parse_count_grid(k, v)?);
                    c.grid_specs.insert("n_grid", v.clone());
                }
                "p_grid" => {
                    c.p_grid = parse_real_grid(k, v)?;
                    c.grid_specs.insert("p_grid", v.clone());
                }
                "k_grid" => {
                    c.k_grid = Some(parse_real_grid(k, v)?);
                    c.grid_specs.insert("k_grid", v.clone());
                }
                "solver_h" => c.solver_h = real(k, v)?,
                "tol" => c.tol = real(k, v)?,
                "max_iter" => c.max_iter = count(k, v)?,
                "source" => source_kind = Some(v.clone()),
                "source_amplitude" => amplitude = real(k, v)?,
                "source_wavenumber" => wavenumber = real(k, v)?,
                "boundary_start" => c.boundary_start = real(k, v)?,
                "boundary_end" => c.boundary_end = real(k, v)?,
                "seed" => {
                    c.seed = v
                        .parse()
                        .map_err(|_| crate::error::CliError::Validation(format!("seed: bad value '{v}'")))?
                }
                _ => unreachable!("key list checked above"),
            }
        }
        c.robin = match robin_kind.as_deref() {
            None | Some("uniform") => RobinChoice::Uniform(p.unwrap_or(20.0)),
            Some("two-fracture") => {
                if p.is_some() {
                    return invalid("p: not used with robin = two-fracture");
                }
                RobinChoice::TwoFracture
            }
            Some(other) => return invalid(format!("robin: expected uniform or two-fracture, got '{other}'")),
        };
        c.source = match source_kind.as_deref() {
            None | Some("zero") => SourceTerm::Zero,
            Some("constant") => SourceTerm::Constant(amplitude),
            Some("sine") => SourceTerm::Sine { amplitude, wavenumber },
            Some(other) => return invalid(format!("source: expected zero, constant or sine, got '{other}'")),
        };
        c.include_zero = include_zero;
        c.n_grid = n_grid.unwrap_or(vec![c.n_fractures]);
        c.grid_specs.entry("n_grid").or_insert_with(|| c.n_fractures.to_string());
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        self.network(self.n_fractures)?;
        for n in &self.n_grid {
            self.network(*n)?;
        }
        if let RobinChoice::Uniform(p) = self.robin {
            if !(p > 0.0) {
                return invalid(format!("p: must be positive, got {p}"));
            }
        }
        if self.p_grid.iter().any(|p| !(*p > 0.0)) {
            return invalid("p_grid: values must be positive");
        }
        if let Some(k) = &self.k_grid {
            if k.iter().any(|k| *k < 0.0) {
                return invalid("k_grid: values must be nonnegative");
            }
        }
        for (key, v) in [("h", self.h), ("solver_h", self.solver_h)] {
            if !(v > 0.0 && v < self.length) {
                return invalid(format!("{key}: must lie in (0, length), got {v}"));
            }
        }
        if !(self.tol >= 0.0) {
            return invalid(format!("tol: must be nonnegative, got {}", self.tol));
        }
        Ok(())
    }

    /// Network with `n` fractures; a per-fracture `nu` list must have length `n`.
    pub fn network(&self, n: usize) -> Result<Network> {
        let nu = match &self.nu {
            Diffusivity::Uniform(v) => vec![*v; n],
            Diffusivity::PerFracture(list) => {
                if list.len() != n {
                    return invalid(format!(
                        "nu: {} values given for a network of {n} fractures",
                        list.len()
                    ));
                }
                list.clone()
            }
        };
        Network::build_staircase(n, self.length, self.gamma1, self.gamma2, nu, self.bc)
            .map_err(|e| crate::error::CliError::Validation(e.to_string()))
    }

    /// Two-fracture geometry built from the first two fractures.
    pub fn geometry(&self) -> Result<TwoFractureGeometry> {
        let net = self.network(self.n_fractures)?;
        Ok(TwoFractureGeometry::from_network(&net))
    }

    pub fn robin_params(&self, net: &Network) -> Result<RobinParams> {
        Ok(match self.robin {
            RobinChoice::Uniform(p) => RobinParams::Uniform(p),
            RobinChoice::TwoFracture => {
                let (sm, sp) = dfn_osm_core::optimal_params_1d(&TwoFractureGeometry::from_network(net));
                RobinParams::repeated_pair(sm, sp, net.trace_count())
            }
        })
    }

    pub fn include_zero_for(&self, bc: BoundaryKind) -> bool {
        self.include_zero.unwrap_or(bc == BoundaryKind::NeumannInterior)
    }

    /// Largest mode index `ceil(L/h)`.
    pub fn k_max(&self) -> f64 {
        (self.length / self.h).ceil()
    }

    /// Every setting, defaults included, in the input format.
    pub fn echo(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n_fractures", self.n_fractures.to_string());
        put("length", format!("{:?}", self.length));
        put("gamma1", format!("{:?}", self.gamma1));
        put("gamma2", format!("{:?}", self.gamma2));
        put(
            "nu",
            match &self.nu {
                Diffusivity::Uniform(v) => format!("{v:?}"),
                Diffusivity::PerFracture(v) => list(v),
            },
        );
        put(
            "bc",
            match self.bc {
                BoundaryKind::DirichletEverywhere => "dirichlet",
                BoundaryKind::NeumannInterior => "neumann",
            }
            .into(),
        );
        match self.robin {
            RobinChoice::Uniform(p) => {
                put("robin", "uniform".into());
                put("p", format!("{p:?}"));
            }
            RobinChoice::TwoFracture => put("robin", "two-fracture".into()),
        }
        put("h", format!("{:?}", self.h));
        if let Some(z) = self.include_zero {
            put("include_zero", z.to_string());
        }
        put("modes", self.modes.to_string());
        for (key, spec) in &self.grid_specs {
            put(key, spec.clone());
        }
        put("solver_h", format!("{:?}", self.solver_h));
        put("tol", format!("{:?}", self.tol));
        put("max_iter", self.max_iter.to_string());
        match self.source {
            SourceTerm::Zero => put("source", "zero".into()),
            SourceTerm::Constant(a) => {
                put("source", "constant".into());
                put("source_amplitude", format!("{a:?}"));
            }
            SourceTerm::Sine { amplitude, wavenumber } => {
                put("source", "sine".into());
                put("source_amplitude", format!("{amplitude:?}"));
                put("source_wavenumber", format!("{wavenumber:?}"));
            }
        }
        put("boundary_start", format!("{:?}", self.boundary_start));
        put("boundary_end", format!("{:?}", self.boundary_end));
        put("seed", self.seed.to_string());
        s
    }
}
