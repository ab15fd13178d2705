//! Flat key-value run configuration with flag overrides.
//!
//! The file format is `key = value` per line, `#` comments, schema_version 1.
//! Unknown keys are rejected by name; validation errors name the violated
//! invariant. Flags always override file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use fracstef::{FluxSpec, InitialData, StefanProblem};

pub const SCHEMA_VERSION: u32 = 1;

const KNOWN_KEYS: &[&str] = &[
    "schema_version",
    "alpha",
    "h_kind",
    "h0",
    "h_exponent",
    "h_table",
    "b",
    "u0",
    "t0",
    "horizon",
    "n_cells",
    "dt",
    "frames",
    "mode",
    "m_list",
    "output_dir",
    "ordering_tol",
    "fixed_point_tol",
    "fixed_point_max_iters",
    "workers",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub h_kind: String,
    pub h0: f64,
    pub h_exponent: f64,
    pub h_table: Option<PathBuf>,
    pub b: f64,
    pub u0: String,
    pub t0: f64,
    pub horizon: f64,
    pub n_cells: usize,
    pub dt: f64,
    pub frames: usize,
    pub mode: String,
    pub m_list: Vec<u32>,
    pub output_dir: PathBuf,
    pub ordering_tol: f64,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iters: usize,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.5,
            h_kind: "const".into(),
            h0: 1.0,
            h_exponent: 0.0,
            h_table: None,
            b: 0.25,
            u0: "zero".into(),
            t0: 0.0,
            horizon: 1.0,
            n_cells: 128,
            dt: 1e-3,
            frames: 40,
            mode: "time-marching".into(),
            m_list: vec![4, 8, 16, 32],
            output_dir: PathBuf::from("out"),
            ordering_tol: 1e-6,
            fixed_point_tol: 1e-7,
            fixed_point_max_iters: 60,
            workers: 0, // 0 = available parallelism
        }
    }
}

impl RunConfig {
    /// Apply a config file on top of the defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`, got {raw:?}", lineno + 1);
            };
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            bail!("unknown key {key:?}");
        }
        let f = |v: &str| -> Result<f64> {
            v.parse::<f64>().with_context(|| format!("key {key:?}: bad number {v:?}"))
        };
        match key {
            "schema_version" => {
                let v: u32 = value.parse().context("schema_version must be an integer")?;
                if v != SCHEMA_VERSION {
                    bail!("unsupported schema_version {v} (this build reads {SCHEMA_VERSION})");
                }
            }
            "alpha" => self.alpha = f(value)?,
            "h_kind" => self.h_kind = value.to_string(),
            "h0" => self.h0 = f(value)?,
            "h_exponent" => self.h_exponent = f(value)?,
            "h_table" => self.h_table = Some(PathBuf::from(value)),
            "b" => self.b = f(value)?,
            "u0" => self.u0 = value.to_string(),
            "t0" => self.t0 = f(value)?,
            "horizon" => self.horizon = f(value)?,
            "n_cells" => self.n_cells = value.parse().context("n_cells must be an integer")?,
            "dt" => self.dt = f(value)?,
            "frames" => self.frames = value.parse().context("frames must be an integer")?,
            "mode" => self.mode = value.to_string(),
            "m_list" => {
                self.m_list = value
                    .split(',')
                    .map(|v| v.trim().parse::<u32>().context("m_list entries must be integers"))
                    .collect::<Result<Vec<u32>>>()?;
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "ordering_tol" => self.ordering_tol = f(value)?,
            "fixed_point_tol" => self.fixed_point_tol = f(value)?,
            "fixed_point_max_iters" => {
                self.fixed_point_max_iters =
                    value.parse().context("fixed_point_max_iters must be an integer")?
            }
            "workers" => self.workers = value.parse().context("workers must be an integer")?,
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie in (0,1), got {}", self.alpha);
        }
        if !(self.horizon > 0.0) {
            bail!("horizon must be positive, got {}", self.horizon);
        }
        if self.n_cells < 16 {
            bail!("n_cells must be at least 16, got {}", self.n_cells);
        }
        if !(self.dt > 0.0) {
            bail!("dt must be positive, got {}", self.dt);
        }
        if !["const", "power", "table"].contains(&self.h_kind.as_str()) {
            bail!("h_kind must be const, power or table, got {:?}", self.h_kind);
        }
        if !["time-marching", "fixed-point"].contains(&self.mode.as_str()) {
            bail!("mode must be time-marching or fixed-point, got {:?}", self.mode);
        }
        self.flux_spec()?.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        self.initial_data()?;
        Ok(())
    }

    /// Build the flux law (reads the table file when `h_kind = table`).
    pub fn flux_spec(&self) -> Result<FluxSpec> {
        Ok(match self.h_kind.as_str() {
            "const" => FluxSpec::Constant(self.h0),
            "power" => FluxSpec::Power { h0: self.h0, exponent: self.h_exponent },
            "table" => {
                let path = self
                    .h_table
                    .as_ref()
                    .context("h_kind = table requires h_table = <path>")?;
                FluxSpec::Table(read_pair_table(path)?)
            }
            other => bail!("h_kind must be const, power or table, got {other:?}"),
        })
    }

    /// Parse the u0 selector: zero | envelope:<scale> | table:<path>.
    pub fn initial_data(&self) -> Result<InitialData> {
        if self.u0 == "zero" {
            return Ok(InitialData::Zero);
        }
        if let Some(scale) = self.u0.strip_prefix("envelope:") {
            let scale: f64 = scale.parse().context("u0 envelope scale must be a number")?;
            if !(0.0..=1.0).contains(&scale) {
                bail!("u0 envelope scale must lie in [0,1] to satisfy the comparison bound");
            }
            return Ok(InitialData::Envelope { scale });
        }
        if let Some(path) = self.u0.strip_prefix("table:") {
            return Ok(InitialData::PhysicalTable(read_pair_table(Path::new(path))?));
        }
        bail!("u0 must be zero, envelope:<scale> or table:<path>, got {:?}", self.u0)
    }

    pub fn problem(&self) -> Result<StefanProblem> {
        Ok(StefanProblem {
            alpha: self.alpha,
            h: self.flux_spec()?,
            b: self.b,
            u0: self.initial_data()?,
            horizon: self.horizon,
            t0: self.t0,
        })
    }

    /// Canonical text form: sorted key=value lines; the manifest hash is the
    /// SHA-256 of this string.
    pub fn canonical_string(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("schema_version", SCHEMA_VERSION.to_string());
        kv.insert("alpha", format!("{:e}", self.alpha));
        kv.insert("h_kind", self.h_kind.clone());
        kv.insert("h0", format!("{:e}", self.h0));
        kv.insert("h_exponent", format!("{:e}", self.h_exponent));
        if let Some(p) = &self.h_table {
            kv.insert("h_table", p.display().to_string());
        }
        kv.insert("b", format!("{:e}", self.b));
        kv.insert("u0", self.u0.clone());
        kv.insert("t0", format!("{:e}", self.t0));
        kv.insert("horizon", format!("{:e}", self.horizon));
        kv.insert("n_cells", self.n_cells.to_string());
        kv.insert("dt", format!("{:e}", self.dt));
        kv.insert("frames", self.frames.to_string());
        kv.insert("mode", self.mode.clone());
        kv.insert(
            "m_list",
            self.m_list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
        );
        kv.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_string().as_bytes());
        format!("{:x}", hasher.finalize())
    }
}

/// Two-column CSV (no header) of nonnegative breakpoints.
fn read_pair_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read table {}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let a: f64 = cols
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .with_context(|| format!("table {} line {}", path.display(), lineno + 1))?;
        let b: f64 = cols
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .with_context(|| format!("table {} line {}", path.display(), lineno + 1))?;
        rows.push((a, b));
    }
    Ok(rows)
}
