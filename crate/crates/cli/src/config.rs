use crate::error::{CliError, CliResult};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Flags shared by every subcommand; each may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// torus or planar.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Lattice size; repeat for several.
    #[arg(long = "L", value_name = "L")]
    pub l: Vec<usize>,
    /// Single error rate.
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<f64>,
    /// Error-rate grid start:stop:step, endpoints inclusive.
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// Scaling-variable grid start:stop:step (collapse).
    #[arg(long = "x-grid")]
    pub x_grid: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; never changes results.
    #[arg(long, env = "ISING_QEC_THREADS")]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Fit model: erf2, erf1, poly, poly_L, compare, g, stiffness, gaussian, tension.
    #[arg(long)]
    pub model: Option<String>,
    /// Input data file (fit).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Collapse spread tolerance.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Maximum error weight (failpoly).
    #[arg(long)]
    pub wmax: Option<usize>,
    /// Branch-and-bound node budget per shot.
    #[arg(long = "node-budget")]
    pub node_budget: Option<usize>,
    /// post or nonpost (pathcount).
    #[arg(long)]
    pub regime: Option<String>,
    /// Rescaling exponent for gap distributions.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Bootstrap resamples.
    #[arg(long)]
    pub resamples: Option<u64>,
    /// Include the capillary ½ ln L term (tension fits).
    #[arg(long)]
    pub capillary: bool,
}

/// Resolved run configuration, echoed into every output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub l_list: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Not echoed: outputs must not depend on it.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resamples: Option<u64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub capillary: bool,
}

impl RunConfig {
    /// Config file overlaid by explicit flags.
    pub fn resolve(command: &str, flags: &Flags) -> CliResult<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.command = Some(command.to_string());
        macro_rules! overlay {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    cfg.$field = Some(v);
                }
            };
        }
        overlay!(geometry, flags.geometry.clone());
        if !flags.l.is_empty() {
            cfg.l_list = flags.l.clone();
        }
        overlay!(p_spec, flags.p.map(|p| format!("{p}")).or_else(|| flags.p_grid.clone()));
        overlay!(x_spec, flags.x_grid.clone());
        overlay!(shots, flags.shots);
        overlay!(seed, flags.seed);
        overlay!(threads, flags.threads);
        overlay!(out_path, flags.out.clone());
        overlay!(format, flags.format.clone());
        overlay!(model, flags.model.clone());
        overlay!(input, flags.input.clone());
        overlay!(epsilon, flags.epsilon);
        overlay!(wmax, flags.wmax);
        overlay!(node_budget, flags.node_budget);
        overlay!(regime, flags.regime.clone());
        overlay!(theta, flags.theta);
        overlay!(resamples, flags.resamples);
        cfg.capillary |= flags.capillary;
        if cfg.shots == Some(0) {
            return Err(CliError::Usage("shots must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn sizes(&self, default: &[usize]) -> Vec<usize> {
        if self.l_list.is_empty() {
            default.to_vec()
        } else {
            self.l_list.clone()
        }
    }

    pub fn p_values(&self) -> CliResult<Vec<f64>> {
        let spec = self.p_spec.as_deref().ok_or_else(|| CliError::Usage("--p or --p-grid is required".into()))?;
        parse_grid(spec)
    }

    pub fn geometry(&self) -> CliResult<ising_qec::sim::GeometryKind> {
        let g = self.geometry.as_deref().unwrap_or("planar");
        ising_qec::sim::GeometryKind::parse(g).ok_or_else(|| CliError::Usage(format!("unknown geometry {g:?}")))
    }

    pub fn json_output(&self) -> CliResult<bool> {
        match self.format.as_deref().unwrap_or("csv") {
            "csv" => Ok(false),
            "json" => Ok(true),
            f => Err(CliError::Usage(format!("unknown format {f:?}"))),
        }
    }
}

/// A single value or `start:stop:step`, inclusive of `stop` within half a
/// step.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let num = |s: &str| -> CliResult<f64> {
        s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number {s:?} in grid {spec:?}")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let out = match parts.as_slice() {
        [v] => vec![num(v)?],
        [a, b, s] => {
            let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
            if !(step > 0.0) {
                return Err(CliError::Usage(format!("grid step must be positive in {spec:?}")));
            }
            let span = (stop - start) / step;
            if span < -0.5 {
                Vec::new()
            } else {
                let n = (span + 0.5).floor() as usize + 1;
                let scale = decimals(&parts).map(|d| 10f64.powi(d as i32));
                (0..n)
                    .map(|i| {
                        let v = start + i as f64 * step;
                        scale.map_or(v, |s| (v * s).round() / s)
                    })
                    .collect()
            }
        }
        _ => return Err(CliError::Usage(format!("grid {spec:?} is neither a value nor start:stop:step"))),
    };
    if out.is_empty() {
        return Err(CliError::Usage(format!("grid {spec:?} is empty")));
    }
    Ok(out)
}

/// Decimal places of plain-notation grid parts, so grid points print as
/// the decimals they denote.
fn decimals(parts: &[&str]) -> Option<usize> {
    let mut d = 0;
    for p in parts {
        let p = p.trim();
        if p.contains(['e', 'E']) {
            return None;
        }
        d = d.max(p.split_once('.').map_or(0, |(_, f)| f.len()));
    }
    (d <= 15).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1").unwrap(), vec![0.1]);
        let g = parse_grid("0.05:0.28:0.01").unwrap();
        assert_eq!(g.len(), 24);
        assert!((g[23] - 0.28).abs() < 1e-12);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
        assert_eq!(parse_grid("0.28:0.305:0.001").unwrap()[3], 0.283);
        assert!(parse_grid("0.3:0.1:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"geometry":"torus","l_list":[3,5],"shots":7,"threads":4}"#).unwrap();
        let flags = Flags { config: Some(path), shots: Some(9), ..Default::default() };
        let cfg = RunConfig::resolve("simulate", &flags).unwrap();
        assert_eq!(cfg.geometry.as_deref(), Some("torus"));
        assert_eq!(cfg.l_list, vec![3, 5]);
        assert_eq!(cfg.shots, Some(9));
        assert!(!cfg.echo().contains("threads"));
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"bogus":1}"#).unwrap();
        let flags = Flags { config: Some(path), ..Default::default() };
        assert!(matches!(RunConfig::resolve("exact", &flags), Err(CliError::Usage(_))));
    }
}
