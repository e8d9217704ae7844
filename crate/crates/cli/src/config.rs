//! Shared configuration plumbing: the distribution grammar, parameter
//! resolution against optional JSON config files, and run manifests.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use ubm::model::{Coefficients, DistributionSpec, PhaseModel};
use ubm::{Error, Result};

/// Distribution grammar:
/// `uniform` | `point:<c>` | `arc:<center>:<half_width>` |
/// `fourier:<A>:<B>:<c1,c2,...>` (real Fourier coefficients f̂(1), f̂(2), …).
pub fn parse_dist(text: &str) -> Result<DistributionSpec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = |msg: &str| Error::Config(format!("distribution '{text}': {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let spec = match parts[0] {
        "uniform" => DistributionSpec::UniformTorus,
        "point" => {
            if parts.len() != 2 {
                return Err(bad("expected point:<c>"));
            }
            DistributionSpec::PointMass(num(parts[1])?)
        }
        "arc" => {
            if parts.len() != 3 {
                return Err(bad("expected arc:<center>:<half_width>"));
            }
            DistributionSpec::UniformArc { center: num(parts[1])?, half_width: num(parts[2])? }
        }
        "fourier" => {
            if parts.len() != 4 {
                return Err(bad("expected fourier:<A>:<B>:<c1,c2,...>"));
            }
            let coeffs = parts[3]
                .split(',')
                .map(|c| Ok(ubm::scalar::c(num(c)?, 0.0)))
                .collect::<Result<Vec<_>>>()?;
            DistributionSpec::FourierDensity { amp: num(parts[1])?, decay: num(parts[2])?, coeffs }
        }
        other => return Err(bad(&format!("unknown kind '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// Build the phase model from optional flag strings: `--eta` selects the
/// i.i.d.-η variant, otherwise θ/α default to uniform.
pub fn resolve_model(
    theta: Option<&str>,
    alpha: Option<&str>,
    eta: Option<&str>,
) -> Result<PhaseModel<f64>> {
    if eta.is_some() && (theta.is_some() || alpha.is_some()) {
        return Err(Error::Config(
            "--eta (i.i.d. phases) conflicts with --theta/--alpha (two-field model)".into(),
        ));
    }
    let model = match eta {
        Some(e) => PhaseModel::IidEta { eta: parse_dist(e)? },
        None => PhaseModel::TwoField {
            theta: parse_dist(theta.unwrap_or("uniform"))?,
            alpha: parse_dist(alpha.unwrap_or("uniform"))?,
        },
    };
    model.validate()?;
    Ok(model)
}

pub fn resolve_params(r: Option<f64>, t: Option<f64>) -> Result<Coefficients<f64>> {
    match (r, t) {
        (None, None) => Ok(Coefficients::balanced()),
        (Some(r), None) => Coefficients::from_r(r),
        (Some(r), Some(t)) => Coefficients::new(r, t),
        (None, Some(t)) => {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("t must lie in (0,1), got {t}")));
            }
            Coefficients::new((1.0 - t * t).sqrt(), t)
        }
    }
}

/// Load a JSON config file into a per-command config struct.
pub fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
}

/// Output directory: flag, then UBM_OUT_DIR, then the working directory.
pub fn out_dir(flag: Option<&Path>) -> Result<PathBuf> {
    let dir = flag
        .map(|p| p.to_path_buf())
        .or_else(|| std::env::var_os("UBM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| Error::Config(format!("cannot create output dir {}: {e}", dir.display())))?;
    Ok(dir)
}

#[derive(Serialize)]
pub struct Manifest<C: Serialize> {
    pub command: &'static str,
    pub config: C,
    pub seed: u64,
    pub library_version: &'static str,
    pub wall_time_ms: u128,
    pub outputs: Vec<String>,
}

pub struct Run {
    started: Instant,
    pub dir: PathBuf,
    pub outputs: Vec<String>,
}

impl Run {
    pub fn new(dir: PathBuf) -> Self {
        Run { started: Instant::now(), dir, outputs: Vec::new() }
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn write_text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, body)
            .map_err(|e| Error::Numeric(format!("cannot write {}: {e}", path.display())))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let body = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Numeric(format!("serialization: {e}")))?;
        self.write_text(name, &body)
    }

    /// Write the manifest (holds the only timestamp-dependent field).
    pub fn finish<C: Serialize>(mut self, command: &'static str, config: C, seed: u64) -> Result<()> {
        let manifest = Manifest {
            command,
            config,
            seed,
            library_version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: self.started.elapsed().as_millis(),
            outputs: self.outputs.clone(),
        };
        let name = format!("{command}_manifest.json");
        self.write_json(&name, &manifest)
    }
}
