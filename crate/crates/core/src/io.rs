//! Plain-text profiles, trajectory directories with a TOML manifest, and CSV
//! tables of α-scans.
//!
//! A profile file has one grid node per line with columns `x ψ [φ]`
//! (whitespace or comma separated, `φ = 1` when omitted) and `#` comments.
//! The nodes must be the uniform grid `x_j = jπ/m`.
//!
//! A trajectory directory holds `manifest.toml` and, for warped runs, one
//! profile file per snapshot. Round-sphere runs store their factors `c(t)` in
//! the manifest itself. Values are written in shortest round-trip form, so
//! reading a directory back gives bit-identical states.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::flow::{FlowConfig, FlowTrajectory, StopReason};
use crate::geometry::{make_round_sphere, make_warped, Form, MetricState, Profile};
use crate::norms::ScanRow;

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.toml";

/// The columns `x, ψ, φ` of a profile file.
pub fn parse_profile(text: &str, path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (mut xs, mut psi, mut phi) = (Vec::new(), Vec::new(), Vec::new());
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let cols = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if !(2..=3).contains(&cols.len()) {
            return Err(err(format!("expected 2 or 3 columns (x, ψ[, φ]), found {}", cols.len())));
        }
        if *width.get_or_insert(cols.len()) != cols.len() {
            return Err(err("every line needs the same number of columns".into()));
        }
        xs.push(cols[0]);
        psi.push(cols[1]);
        phi.push(cols.get(2).copied().unwrap_or(1.0));
    }
    let m = xs.len().saturating_sub(1);
    if m == 0 {
        return Err(Error::InvalidProfile(format!("{}: no nodes", path.display())));
    }
    for (j, x) in xs.iter().enumerate() {
        let want = PI * j as f64 / m as f64;
        if (x - want).abs() > 1e-9 {
            return Err(Error::InvalidProfile(format!(
                "{}: node {j} has x = {x}, expected the uniform grid value {want}",
                path.display()
            )));
        }
    }
    Ok((xs, psi, phi))
}

/// Reads a profile file as an `n`-dimensional warped state at `t = 0`.
pub fn read_profile(path: &Path, n: usize) -> Result<MetricState> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (_, psi, phi) = parse_profile(&text, path)?;
    make_warped(n, psi, phi, 0.0)
}

fn profile_text(p: &Profile, t: f64) -> String {
    let mut out = format!("# t = {t:e}\n# x psi phi\n");
    for j in 0..=p.cells() {
        out.push_str(&format!("{:e} {:e} {:e}\n", p.x(j), p.psi()[j], p.phi()[j]));
    }
    out
}

/// Writes a warped state as a profile file.
pub fn write_profile(path: &Path, state: &MetricState) -> Result<()> {
    let Form::Warped(p) = state.form() else {
        return Err(Error::InvalidParameter("only warped states have a profile file".into()));
    };
    fs::write(path, profile_text(p, state.t())).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoredForm {
    Round,
    Warped,
}

/// Contents of `manifest.toml`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub n: usize,
    pub form: StoredForm,
    pub singular: bool,
    pub stop_reason: StopReason,
    pub t_hat: Option<f64>,
    pub t_end: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `c(t)` per snapshot, for round runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<f64>,
    /// Profile file per snapshot, for warped runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<String>,
    pub flow: FlowConfig,
    /// The run configuration that produced the trajectory, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<toml::Table>,
}

impl Manifest {
    pub fn of(traj: &FlowTrajectory, run: Option<toml::Table>) -> Manifest {
        let round = traj.states()[0].is_round();
        let c = if round {
            traj.states()
                .iter()
                .map(|s| match s.form() {
                    Form::RoundSphere { c } => *c,
                    Form::Warped(_) => unreachable!("snapshots share their form"),
                })
                .collect()
        } else {
            Vec::new()
        };
        let snapshots = if round {
            Vec::new()
        } else {
            (0..traj.len()).map(|i| format!("snap_{i:05}.txt")).collect()
        };
        Manifest {
            format_version: FORMAT_VERSION,
            n: traj.n(),
            form: if round { StoredForm::Round } else { StoredForm::Warped },
            singular: traj.singular(),
            stop_reason: traj.stop_reason(),
            t_hat: traj.t_hat(),
            t_end: traj.t_end(),
            steps: traj.steps(),
            times: traj.times(),
            c,
            snapshots,
            flow: *traj.config(),
            run,
        }
    }
}

/// Writes `manifest.toml` and the snapshot files into `dir`, creating it.
pub fn write_trajectory(dir: &Path, traj: &FlowTrajectory, run: Option<toml::Table>) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = Manifest::of(traj, run);
    for (name, s) in manifest.snapshots.iter().zip(traj.states()) {
        write_profile(&dir.join(name), s)?;
    }
    let text = toml::to_string(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    if m.format_version != FORMAT_VERSION {
        return Err(Error::Manifest(format!(
            "format version {} is not supported (expected {FORMAT_VERSION})",
            m.format_version
        )));
    }
    let count = match m.form {
        StoredForm::Round => m.c.len(),
        StoredForm::Warped => m.snapshots.len(),
    };
    if count != m.times.len() {
        return Err(Error::Manifest(format!(
            "{} snapshot times but {count} stored snapshots",
            m.times.len()
        )));
    }
    Ok(m)
}

/// Reads a directory written by [`write_trajectory`].
pub fn read_trajectory(dir: &Path) -> Result<FlowTrajectory> {
    let m = read_manifest(dir)?;
    let states = match m.form {
        StoredForm::Round => m
            .c
            .iter()
            .zip(&m.times)
            .map(|(c, t)| make_round_sphere(m.n, *c, *t))
            .collect::<Result<Vec<_>>>()?,
        StoredForm::Warped => m
            .snapshots
            .iter()
            .zip(&m.times)
            .map(|(name, t)| {
                let path = dir.join(name);
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let (_, psi, phi) = parse_profile(&text, &path)?;
                if psi.len() < 5 {
                    return Err(Error::InvalidProfile(format!("{}: need at least 5 nodes", path.display())));
                }
                // stored snapshots come from a run; pole regularity was checked when it started
                Ok(MetricState::from_parts(m.n, *t, Form::Warped(Profile::from_parts(phi, psi))))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    FlowTrajectory::from_states(states, m.stop_reason, m.t_hat, m.flow, m.steps)
}

#[derive(serde::Serialize)]
struct ScanRecord {
    alpha: f64,
    eps: f64,
    partial_norm: f64,
    exponent: f64,
    classification: &'static str,
}

/// One CSV line per `(α, ε)` with header
/// `alpha,eps,partial_norm,exponent,classification`.
pub fn write_scan_csv<W: std::io::Write>(out: W, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["alpha", "eps", "partial_norm", "exponent", "classification"])?;
    for row in rows {
        for (eps, norm) in row.eps.iter().zip(&row.partial_norms) {
            w.serialize(ScanRecord {
                alpha: row.alpha,
                eps: *eps,
                partial_norm: *norm,
                exponent: row.exponent,
                classification: row.classification.name(),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
