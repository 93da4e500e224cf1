//! Experiment configuration: a flat TOML file with one `[system]` block,
//! one experiment-kind section matching the `experiment` key, and optional
//! `[noise]`/`[output]` blocks. Complex numbers are written either as a
//! plain float (imaginary part 0) or as a two-element array `[re, im]`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::conditioning::SystemParams;
use crate::error::{Error, Result};

/// Complex scalar in TOML: `1.5` or `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(&self) -> C64 {
        match *self {
            ComplexSpec::Real(re) => C64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub alpha: ComplexSpec,
    pub beta: ComplexSpec,
    pub k: f64,
    #[serde(default)]
    pub r: f64,
    pub tau: f64,
}

impl SystemSection {
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.alpha.value(), self.beta.value(), self.k, self.r, self.tau)
    }

    /// The same parameters at a different coupling.
    pub fn params_with_k(&self, k: f64) -> Result<SystemParams> {
        SystemParams::new(self.alpha.value(), self.beta.value(), k, self.r, self.tau)
    }
}

fn default_dtau() -> f64 {
    std::f64::consts::PI * 1e-5
}

fn default_n_traj() -> usize {
    500
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default = "default_dtau")]
    pub dtau: f64,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { dtau: default_dtau(), n_traj: default_n_traj() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomodyneList {
    pub x: f64,
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepK {
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    #[serde(default)]
    pub homodyne: Option<HomodyneList>,
    #[serde(default)]
    pub heterodyne: Option<Vec<ComplexSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepXTheta {
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    pub thetas: Vec<f64>,
    /// Locate the gap minimizer per θ by bracketed search and record it in
    /// the manifest.
    #[serde(default)]
    pub find_crossing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSigma {
    pub k_min: f64,
    pub k_max: f64,
    pub k_step: f64,
    pub sigmas: Vec<ComplexSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerGrid {
    #[serde(default)]
    pub homodyne_x: Option<f64>,
    #[serde(default)]
    pub homodyne_theta: Option<f64>,
    #[serde(default)]
    pub heterodyne_sigma: Option<ComplexSpec>,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
    /// When set, the grid is evaluated on the conditioned trajectory
    /// ensemble at this decay rate instead of the unitary state.
    #[serde(default)]
    pub kappa: Option<f64>,
    /// Thermal occupation of the initial mechanical state (0 = coherent).
    #[serde(default)]
    pub nbar: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityOpt {
    pub x: f64,
    pub thetas: Vec<f64>,
    /// "even" or "odd".
    pub parity: String,
    /// Fit `a + c sin(θ + b)` to I(θ) and record it in the manifest.
    #[serde(default)]
    pub fit_sinusoid: bool,
    /// Optional μ sweep of the reduced three-component state at the first
    /// θ, emitted as `<name>.musweep.csv`.
    #[serde(default)]
    pub mu_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dissipative {
    pub kappas: Vec<f64>,
    pub x: f64,
    pub theta: f64,
    /// Thermal occupation of the initial mechanical state.
    #[serde(default)]
    pub nbar: f64,
    /// Blocks for the Monte-Carlo error estimate.
    #[serde(default = "default_blocks")]
    pub blocks: usize,
}

fn default_blocks() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subtraction {
    #[serde(default)]
    pub table: Option<String>,
    #[serde(default)]
    pub synthetic_rows: Option<usize>,
}

/// A parsed experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSection,
    #[serde(default)]
    pub noise: Option<NoiseSection>,
    pub output: OutputSection,

    #[serde(default, rename = "sweep-k")]
    pub sweep_k: Option<SweepK>,
    #[serde(default, rename = "sweep-x-theta")]
    pub sweep_x_theta: Option<SweepXTheta>,
    #[serde(default, rename = "sweep-sigma")]
    pub sweep_sigma: Option<SweepSigma>,
    #[serde(default, rename = "wigner-grid")]
    pub wigner_grid: Option<WignerGrid>,
    #[serde(default, rename = "fidelity-opt")]
    pub fidelity_opt: Option<FidelityOpt>,
    #[serde(default)]
    pub dissipative: Option<Dissipative>,
    #[serde(default)]
    pub thermal: Option<Dissipative>,
    #[serde(default)]
    pub subtraction: Option<Subtraction>,
}

fn check_range(lo: f64, hi: f64, step: f64, what: &str) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("{what}: step must be positive (got {step})")));
    }
    if !(hi >= lo) {
        return Err(Error::Config(format!("{what}: empty range [{lo}, {hi}]")));
    }
    Ok(())
}

/// Inclusive grid `lo, lo+step, ...` up to `hi` (with end-point snapping).
pub fn range_values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1.5).floor() as usize;
    (0..n.max(1)).map(|i| lo + i as f64 * step).filter(|v| *v <= hi + 1e-12 * step).collect()
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Exactly one experiment-kind section, matching the `experiment` key,
    /// with non-empty positive-step ranges.
    pub fn validate(&self) -> Result<()> {
        self.system.params()?;
        if let Some(n) = &self.noise {
            if !(n.dtau > 0.0) || n.n_traj == 0 {
                return Err(Error::Config("noise: dtau must be > 0 and n_traj >= 1".into()));
            }
        }
        if self.output.name.is_empty()
            || self.output.name.contains(std::path::is_separator)
        {
            return Err(Error::Config("output.name must be a bare file stem".into()));
        }

        let kinds: [(&str, bool); 8] = [
            ("sweep-k", self.sweep_k.is_some()),
            ("sweep-x-theta", self.sweep_x_theta.is_some()),
            ("sweep-sigma", self.sweep_sigma.is_some()),
            ("wigner-grid", self.wigner_grid.is_some()),
            ("fidelity-opt", self.fidelity_opt.is_some()),
            ("dissipative", self.dissipative.is_some()),
            ("thermal", self.thermal.is_some()),
            ("subtraction", self.subtraction.is_some()),
        ];
        let present: Vec<&str> = kinds.iter().filter(|(_, p)| *p).map(|(n, _)| *n).collect();
        if present.len() != 1 {
            return Err(Error::Config(format!(
                "exactly one experiment section required, found {present:?}"
            )));
        }
        if present[0] != self.experiment {
            return Err(Error::Config(format!(
                "experiment = {:?} does not match the present section [{}]",
                self.experiment, present[0]
            )));
        }

        match self.experiment.as_str() {
            "sweep-k" => {
                let s = self.sweep_k.as_ref().unwrap();
                check_range(s.k_min, s.k_max, s.k_step, "sweep-k")?;
                match (&s.homodyne, &s.heterodyne) {
                    (Some(h), None) => {
                        if h.thetas.is_empty() {
                            return Err(Error::Config("sweep-k: thetas must be non-empty".into()));
                        }
                    }
                    (None, Some(sig)) => {
                        if sig.is_empty() {
                            return Err(Error::Config("sweep-k: sigmas must be non-empty".into()));
                        }
                    }
                    _ => {
                        return Err(Error::Config(
                            "sweep-k needs exactly one of homodyne / heterodyne".into(),
                        ))
                    }
                }
            }
            "sweep-x-theta" => {
                let s = self.sweep_x_theta.as_ref().unwrap();
                check_range(s.x_min, s.x_max, s.x_step, "sweep-x-theta")?;
                if s.thetas.is_empty() {
                    return Err(Error::Config("sweep-x-theta: thetas must be non-empty".into()));
                }
            }
            "sweep-sigma" => {
                let s = self.sweep_sigma.as_ref().unwrap();
                check_range(s.k_min, s.k_max, s.k_step, "sweep-sigma")?;
                if s.sigmas.is_empty() {
                    return Err(Error::Config("sweep-sigma: sigmas must be non-empty".into()));
                }
            }
            "wigner-grid" => {
                let g = self.wigner_grid.as_ref().unwrap();
                check_range(g.re_min, g.re_max, g.step, "wigner-grid re")?;
                check_range(g.im_min, g.im_max, g.step, "wigner-grid im")?;
                let hom = g.homodyne_x.is_some();
                let het = g.heterodyne_sigma.is_some();
                if hom == het {
                    return Err(Error::Config(
                        "wigner-grid needs exactly one of homodyne_x(+homodyne_theta) / heterodyne_sigma"
                            .into(),
                    ));
                }
                if let Some(k) = g.kappa {
                    if k < 0.0 {
                        return Err(Error::Config("wigner-grid: kappa must be >= 0".into()));
                    }
                }
                if g.nbar < 0.0 {
                    return Err(Error::Config("wigner-grid: nbar must be >= 0".into()));
                }
            }
            "fidelity-opt" => {
                let f = self.fidelity_opt.as_ref().unwrap();
                if f.thetas.is_empty() {
                    return Err(Error::Config("fidelity-opt: thetas must be non-empty".into()));
                }
                if f.parity != "even" && f.parity != "odd" {
                    return Err(Error::Config(format!(
                        "fidelity-opt: parity must be \"even\" or \"odd\" (got {:?})",
                        f.parity
                    )));
                }
                if let Some(mus) = &f.mu_values {
                    if mus.iter().any(|m| !(0.0..=1.0).contains(m)) {
                        return Err(Error::Config("fidelity-opt: mu values outside [0,1]".into()));
                    }
                }
            }
            "dissipative" | "thermal" => {
                let d = if self.experiment == "dissipative" {
                    self.dissipative.as_ref().unwrap()
                } else {
                    self.thermal.as_ref().unwrap()
                };
                if d.kappas.is_empty() {
                    return Err(Error::Config("kappas must be non-empty".into()));
                }
                if d.kappas.iter().any(|k| *k < 0.0) {
                    return Err(Error::Config("kappas must be >= 0".into()));
                }
                if d.nbar < 0.0 {
                    return Err(Error::Config("nbar must be >= 0".into()));
                }
                if d.blocks < 2 {
                    return Err(Error::Config("blocks must be >= 2".into()));
                }
                if self.experiment == "thermal" && d.nbar == 0.0 {
                    return Err(Error::Config(
                        "thermal experiment requires nbar > 0 (use dissipative otherwise)".into(),
                    ));
                }
            }
            "subtraction" => {
                let s = self.subtraction.as_ref().unwrap();
                match (&s.table, &s.synthetic_rows) {
                    (Some(_), None) => {}
                    (None, Some(r)) if *r >= 3 => {}
                    _ => {
                        return Err(Error::Config(
                            "subtraction needs exactly one of table = \"path\" / synthetic_rows >= 3"
                                .into(),
                        ))
                    }
                }
            }
            other => {
                return Err(Error::Config(format!("unknown experiment kind {other:?}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "sweep-k"
[system]
alpha = 0.8
beta = 2.0
k = 1.0
tau = 3.141592653589793
[output]
name = "run"
[sweep-k]
k_min = 0.1
k_max = 2.0
k_step = 0.1
[sweep-k.homodyne]
x = 0.0
thetas = [0.0]
"#;

    #[test]
    fn minimal_config_parses() {
        let cfg = ExperimentConfig::from_str(MINIMAL).unwrap();
        assert_eq!(cfg.experiment, "sweep-k");
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.system.r, 0.0);
        let ks = range_values(0.1, 2.0, 0.1);
        assert_eq!(ks.len(), 20);
        assert!((ks[19] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_spec_forms() {
        let cfg = ExperimentConfig::from_str(&MINIMAL.replace("alpha = 0.8", "alpha = [0.8, -0.1]"))
            .unwrap();
        assert_eq!(cfg.system.alpha.value(), C64::new(0.8, -0.1));
    }

    #[test]
    fn rejects_mismatched_or_multiple_kinds() {
        let bad = MINIMAL.replace("experiment = \"sweep-k\"", "experiment = \"sweep-sigma\"");
        assert!(matches!(ExperimentConfig::from_str(&bad), Err(Error::Config(_))));

        let two = format!(
            "{MINIMAL}\n[sweep-x-theta]\nx_min = 0.0\nx_max = 1.0\nx_step = 0.1\nthetas = [0.0]\n"
        );
        assert!(matches!(ExperimentConfig::from_str(&two), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_ranges_and_fields() {
        let bad = MINIMAL.replace("k_step = 0.1", "k_step = -0.1");
        assert!(ExperimentConfig::from_str(&bad).is_err());
        let unknown = format!("{MINIMAL}\nbogus_key = 1\n");
        assert!(ExperimentConfig::from_str(&unknown).is_err());
    }
}
