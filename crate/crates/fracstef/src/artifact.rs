//! Run artifacts: front/frames CSV and the JSON manifest.
//!
//! Numbers are written with 17 significant digits so binary64 round-trips
//! bit-exactly; files are written to a temp path and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbp::{FbpMode, FbpRun};
use crate::fracops::FracWeights;
use crate::problem::{FluxSpec, FrontPath};

/// 17-significant-digit decimal rendering (exact binary64 round-trip).
pub fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Row-major CSV dumps of the three weight tables.
pub fn weight_tables_csv(w: &FracWeights) -> Vec<(String, String)> {
    let dump = |m: &nalgebra::DMatrix<f64>| -> String {
        let mut out = String::new();
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format_f64(m[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    };
    vec![
        ("integral_weights.csv".into(), dump(w.integral_weights())),
        ("flux_weights.csv".into(), dump(w.flux_weights())),
        ("divergence_weights.csv".into(), dump(w.divergence_weights())),
    ]
}

/// (t, s, s_dot, residual) rows at the frame instants.
pub fn front_csv(run: &FbpRun) -> String {
    let mut out = String::from("t,s,s_dot,residual\n");
    for k in 0..run.field.n_frames() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_f64(run.field.times[k]),
            format_f64(run.field.front.values[k]),
            format_f64(run.field.front.velocities[k]),
            format_f64(run.residuals[k]),
        ));
    }
    out
}

/// (t, v_0..v_N) rows at the frame instants.
pub fn frames_csv(run: &FbpRun) -> String {
    let n = run.field.v_frames[0].len();
    let mut out = String::from("t");
    for j in 0..n {
        out.push_str(&format!(",p{j}"));
    }
    out.push('\n');
    for k in 0..run.field.n_frames() {
        out.push_str(&format_f64(run.field.times[k]));
        for j in 0..n {
            out.push(',');
            out.push_str(&format_f64(run.field.v_frames[k][j]));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub alpha: f64,
    pub b: f64,
    pub h_spec: FluxSpec,
    pub n_cells: usize,
    pub dt: f64,
    pub t0: f64,
    pub horizon: f64,
    pub mode: String,
    pub s_final: f64,
    pub max_residual: f64,
    pub iterations: usize,
    pub clamp_violation_max: f64,
    pub grid_spacing: f64,
}

impl RunManifest {
    pub fn from_run(run: &FbpRun, n_cells: usize, config_hash: &str) -> Self {
        RunManifest {
            schema_version: 1,
            config_hash: config_hash.to_string(),
            alpha: run.problem.alpha,
            b: run.problem.b,
            h_spec: run.problem.h.clone(),
            n_cells,
            dt: run.dt,
            t0: run.problem.t0,
            horizon: run.problem.horizon,
            mode: match run.mode {
                FbpMode::TimeMarching => "time-marching".into(),
                FbpMode::FixedPoint => "fixed-point".into(),
            },
            s_final: run.final_front(),
            max_residual: run.max_residual(),
            iterations: run.diagnostics.iterations,
            clamp_violation_max: run.diagnostics.clamp_violation_max,
            grid_spacing: 1.0 / n_cells as f64,
        }
    }
}

/// Everything `verify` needs back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub manifest: RunManifest,
    pub times: Vec<f64>,
    pub front: FrontPath,
    pub residuals: Vec<f64>,
    pub v_frames: Vec<Vec<f64>>,
}

/// Write the three artifacts of a run into `dir` with the given stem.
pub fn write_run(dir: &Path, stem: &str, run: &FbpRun, n_cells: usize, config_hash: &str) -> Result<Vec<PathBuf>> {
    let front_path = dir.join(format!("{stem}_front.csv"));
    let frames_path = dir.join(format!("{stem}_frames.csv"));
    let manifest_path = dir.join(format!("{stem}_manifest.json"));
    write_atomic(&front_path, front_csv(run).as_bytes())?;
    write_atomic(&frames_path, frames_csv(run).as_bytes())?;
    let manifest = RunManifest::from_run(run, n_cells, config_hash);
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::ArtifactFormat(e.to_string()))?;
    write_atomic(&manifest_path, json.as_bytes())?;
    Ok(vec![front_path, frames_path, manifest_path])
}

fn parse_f64(field: &str, context: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::ArtifactFormat(format!("bad number {field:?} in {context}")))
}

/// Read artifacts written by [`write_run`].
pub fn read_run(dir: &Path, stem: &str) -> Result<StoredRun> {
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(
        dir.join(format!("{stem}_manifest.json")),
    )?)
    .map_err(|e| Error::ArtifactFormat(format!("manifest: {e}")))?;

    let front_txt = fs::read_to_string(dir.join(format!("{stem}_front.csv")))?;
    let mut times = Vec::new();
    let mut s = Vec::new();
    let mut sd = Vec::new();
    let mut residuals = Vec::new();
    for (i, line) in front_txt.lines().enumerate() {
        if i == 0 {
            if line != "t,s,s_dot,residual" {
                return Err(Error::ArtifactFormat(format!("unexpected front header {line:?}")));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::ArtifactFormat(format!("front row {i} has {} columns", cols.len())));
        }
        times.push(parse_f64(cols[0], "front.t")?);
        s.push(parse_f64(cols[1], "front.s")?);
        sd.push(parse_f64(cols[2], "front.s_dot")?);
        residuals.push(parse_f64(cols[3], "front.residual")?);
    }

    let frames_txt = fs::read_to_string(dir.join(format!("{stem}_frames.csv")))?;
    let mut v_frames = Vec::new();
    for (i, line) in frames_txt.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let mut cols = line.split(',');
        let _t = parse_f64(cols.next().unwrap_or(""), "frames.t")?;
        let row: Result<Vec<f64>> = cols.map(|c| parse_f64(c, "frames.v")).collect();
        v_frames.push(row?);
    }
    if v_frames.len() != times.len() {
        return Err(Error::ArtifactFormat(format!(
            "frame count {} does not match front rows {}",
            v_frames.len(),
            times.len()
        )));
    }
    Ok(StoredRun {
        manifest,
        front: FrontPath::new(times.clone(), s, sd)?,
        times,
        residuals,
        v_frames,
    })
}
