//! Run configuration: JSON schema, validation, and figure-style presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::niba::SusceptibilityMode;
use crate::params::{BathSpec, ModelParams};
use crate::sweep::AxisName;

/// CLI subcommand / run mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Spectrum,
    BesselMap,
    CouplingMap,
    Overlays,
    Ed,
    Qcheck,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::BesselMap => "bessel-map",
            Mode::CouplingMap => "coupling-map",
            Mode::Overlays => "overlays",
            Mode::Ed => "ed",
            Mode::Qcheck => "qcheck",
        }
    }
}

/// One sweep axis: `points` samples uniformly spaced on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: AxisSpec,
    #[serde(default)]
    pub axis2: Option<AxisSpec>,
}

/// Overlay branch `(m, l)`: `m` drive quanta and `l` resonator quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub m: i32,
    pub l: i32,
}

/// Tolerances, truncations, and resource knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// Relative tolerance scale of the kernel quadratures.
    pub quad_tol: f64,
    /// Matsubara-series stopping tolerance.
    pub mats_tol: f64,
    /// Oscillator-sum truncation of the diagonal corrections.
    pub k_max: u32,
    /// Floquet-sum truncation of the driven diagonal corrections.
    pub p_max: u32,
    /// Minimum |denominator| (units of delta) for perturbative sums.
    pub resonance_guard: f64,
    /// Include second-order diagonal corrections in overlays.
    pub corrections: bool,
    /// Fock truncation of the exact diagonalization.
    pub n_fock: usize,
    /// Worker threads; `None` falls back to RABISPEC_WORKERS, then the
    /// processor count.
    pub workers: Option<usize>,
    /// Correlation-table horizon override.
    pub tau_max: Option<f64>,
    /// Correlation-table resolution override.
    pub table_points: Option<usize>,
    /// Susceptibility variant.
    pub susceptibility: SusceptibilityMode,
    /// Substitute the bath-renormalized tunneling in overlay frequencies.
    pub renormalize: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            quad_tol: 1e-9,
            mats_tol: 1e-10,
            k_max: 60,
            p_max: 30,
            resonance_guard: 1e-6,
            corrections: false,
            n_fock: 10,
            workers: None,
            tau_max: None,
            table_points: None,
            susceptibility: SusceptibilityMode::Full,
            renormalize: true,
        }
    }
}

impl Numerics {
    /// Worker count after env fallback.
    pub fn resolved_workers(&self) -> usize {
        self.workers
            .or_else(|| std::env::var("RABISPEC_WORKERS").ok().and_then(|v| v.parse().ok()))
            .unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            })
    }
}

/// Complete run description; unknown keys are rejected everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub baths: BathSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub numerics: Numerics,
    /// Output path; the CLI defaults to `rabispec-<mode>.csv`.
    #[serde(default)]
    pub output: Option<String>,
    /// Overlay branches; `None` selects the defaults for the drive setting.
    #[serde(default)]
    pub branches: Option<Vec<BranchSpec>>,
}

impl RunConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Validate against the expectations of `mode`.
    pub fn validate(&self, mode: Mode) -> Result<()> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(Error::Config(format!(
                    "config mode '{}' does not match subcommand '{}'",
                    m.as_str(),
                    mode.as_str()
                )));
            }
        }
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.baths.validate().map_err(|e| Error::Config(e.to_string()))?;

        let axis_names = |s: &SweepSpec| (s.axis1.name, s.axis2.map(|a| a.name));
        let check_axis = |a: &AxisSpec| -> Result<()> {
            if a.points == 0 {
                return Err(Error::Config(format!("axis {} has zero points", a.name.as_str())));
            }
            if a.points > 1 && !(a.max > a.min) {
                return Err(Error::Config(format!(
                    "axis {} needs max > min, got [{}, {}]",
                    a.name.as_str(),
                    a.min,
                    a.max
                )));
            }
            if a.name == AxisName::OmegaP && a.min <= 0.0 {
                return Err(Error::Config("omega_p axis must be positive".into()));
            }
            if a.name == AxisName::G && a.min < 0.0 {
                return Err(Error::Config("g axis must be non-negative".into()));
            }
            Ok(())
        };
        if let Some(sweep) = &self.sweep {
            check_axis(&sweep.axis1)?;
            if let Some(a2) = &sweep.axis2 {
                check_axis(a2)?;
                if a2.name == sweep.axis1.name {
                    return Err(Error::Config("sweep axes must differ".into()));
                }
            }
        }

        let sweep = || {
            self.sweep
                .as_ref()
                .ok_or_else(|| Error::Config(format!("mode {} requires a sweep", mode.as_str())))
        };
        match mode {
            Mode::Spectrum => {
                let s = sweep()?;
                if axis_names(s) != (AxisName::Eps0, Some(AxisName::OmegaP)) {
                    return Err(Error::Config(
                        "spectrum requires axis1 = eps0, axis2 = omega_p".into(),
                    ));
                }
            }
            Mode::BesselMap => {
                let s = sweep()?;
                match axis_names(s) {
                    (AxisName::Eps0, Some(AxisName::EpsD)) => {
                        if !(self.model.omega_p > 0.0) {
                            return Err(Error::Config(
                                "bessel-map over (eps0, eps_d) needs a fixed model.omega_p > 0"
                                    .into(),
                            ));
                        }
                    }
                    (AxisName::OmegaP, Some(AxisName::EpsD)) => {}
                    _ => {
                        return Err(Error::Config(
                            "bessel-map requires axes (eps0, eps_d) or (omega_p, eps_d)".into(),
                        ))
                    }
                }
                if !(self.model.omega_d > 0.0) {
                    return Err(Error::Config("bessel-map requires omega_d > 0".into()));
                }
            }
            Mode::CouplingMap => {
                let s = sweep()?;
                if axis_names(s) != (AxisName::OmegaP, Some(AxisName::G)) {
                    return Err(Error::Config(
                        "coupling-map requires axis1 = omega_p, axis2 = g".into(),
                    ));
                }
            }
            Mode::Overlays | Mode::Ed => {
                let s = sweep()?;
                if s.axis1.name != AxisName::Eps0 || s.axis2.is_some() {
                    return Err(Error::Config(format!(
                        "{} requires a single eps0 axis",
                        mode.as_str()
                    )));
                }
            }
            Mode::Qcheck => {}
        }
        Ok(())
    }
}

/// Built-in figure-style presets.
///
/// `fig2b` panels sweep the coupling (`g = 0.2, 0.5, 1.0`); `fig3` panels
/// sweep the drive amplitude (`eps_d = 0, 2, 4`) at `g = 0.5`.  Both use the
/// strong-dissipation bath defaults.  `fig4a` maps bias against drive at
/// fixed probe frequency; `fig4b` maps the spectrum against drive at zero
/// bias and weak dissipation; `fig5a`/`fig5b` map the spectrum against the
/// coupling without and with drive.
pub fn preset(name: &str, panel: Option<usize>) -> Result<RunConfig> {
    let grid = |n1, min1, max1, n2, min2, max2, a1, a2| SweepSpec {
        axis1: AxisSpec { name: a1, min: min1, max: max1, points: n1 },
        axis2: Some(AxisSpec { name: a2, min: min2, max: max2, points: n2 }),
    };
    let strong = BathSpec::default(); // alpha1 = 0.1, kappa = 0.05
    let weak = BathSpec { alpha1: 0.05, kappa: 0.005, ..Default::default() };
    let panel_value = |values: &[f64], default: usize| -> Result<f64> {
        let idx = panel.unwrap_or(default);
        values.get(idx).copied().ok_or_else(|| {
            Error::Config(format!("panel {idx} out of range (preset has {})", values.len()))
        })
    };

    let cfg = match name {
        "fig2b" => {
            let g = panel_value(&[0.2, 0.5, 1.0], 1)?;
            RunConfig {
                mode: Some(Mode::Spectrum),
                model: ModelParams { g, eps_d: 0.0, omega_d: 2.7, ..Default::default() },
                baths: strong,
                sweep: Some(grid(
                    201, -3.0, 3.0, 201, 0.05, 1.5,
                    AxisName::Eps0, AxisName::OmegaP,
                )),
                numerics: Numerics::default(),
                output: None,
                branches: None,
            }
        }
        "fig3" => {
            let eps_d = panel_value(&[0.0, 2.0, 4.0], 0)?;
            RunConfig {
                mode: Some(Mode::Spectrum),
                model: ModelParams { g: 0.5, eps_d, omega_d: 2.7, ..Default::default() },
                baths: strong,
                sweep: Some(grid(
                    201, -3.0, 3.0, 201, 0.05, 1.5,
                    AxisName::Eps0, AxisName::OmegaP,
                )),
                numerics: Numerics::default(),
                output: None,
                branches: None,
            }
        }
        "fig4a" => RunConfig {
            mode: Some(Mode::BesselMap),
            model: ModelParams {
                g: 0.5,
                omega_d: 2.7,
                omega_p: 0.55,
                ..Default::default()
            },
            baths: strong,
            sweep: Some(grid(201, -3.0, 3.0, 201, 0.0, 8.0, AxisName::Eps0, AxisName::EpsD)),
            numerics: Numerics::default(),
            output: None,
            branches: None,
        },
        "fig4b" => RunConfig {
            mode: Some(Mode::BesselMap),
            model: ModelParams { g: 0.5, omega_d: 2.7, ..Default::default() },
            baths: weak,
            sweep: Some(grid(201, 0.05, 1.5, 201, 0.0, 8.0, AxisName::OmegaP, AxisName::EpsD)),
            numerics: Numerics::default(),
            output: None,
            branches: None,
        },
        "fig5a" | "fig5b" => RunConfig {
            mode: Some(Mode::CouplingMap),
            model: ModelParams {
                g: 0.5,
                eps_d: if name == "fig5b" { 4.0 } else { 0.0 },
                omega_d: 2.7,
                ..Default::default()
            },
            baths: weak,
            sweep: Some(grid(201, 0.05, 1.2, 201, 0.02, 1.5, AxisName::OmegaP, AxisName::G)),
            numerics: Numerics::default(),
            output: None,
            branches: None,
        },
        _ => {
            return Err(Error::Config(format!(
                "unknown preset '{name}' (available: fig2b, fig3, fig4a, fig4b, fig5a, fig5b)"
            )))
        }
    };
    Ok(cfg)
}

/// Default overlay branches: `(0, l)` for the static case, extended by the
/// drive resonances when a drive is present.
pub fn default_branches(eps_d: f64) -> Vec<BranchSpec> {
    let mut v = vec![
        BranchSpec { m: 0, l: 0 },
        BranchSpec { m: 0, l: 1 },
        BranchSpec { m: 0, l: -1 },
    ];
    if eps_d != 0.0 {
        v.extend([
            BranchSpec { m: 1, l: 0 },
            BranchSpec { m: -1, l: 0 },
            BranchSpec { m: 1, l: 1 },
            BranchSpec { m: -1, l: -1 },
        ]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let json = r#"{"model": {"delta": 1.0}, "swep": {}}"#;
        assert!(RunConfig::from_json(json).is_err());
        let json = r#"{"model": {"delta": 1.0, "bogus": 2}}"#;
        assert!(RunConfig::from_json(json).is_err());
    }

    #[test]
    fn presets_validate() {
        for (name, mode) in [
            ("fig2b", Mode::Spectrum),
            ("fig3", Mode::Spectrum),
            ("fig4a", Mode::BesselMap),
            ("fig4b", Mode::BesselMap),
            ("fig5a", Mode::CouplingMap),
            ("fig5b", Mode::CouplingMap),
        ] {
            let cfg = preset(name, None).unwrap();
            cfg.validate(mode).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("fig9", None).is_err());
        assert!(preset("fig2b", Some(7)).is_err());
    }

    #[test]
    fn fig3_first_panel_equals_fig2b_middle() {
        let a = preset("fig2b", Some(1)).unwrap();
        let b = preset("fig3", Some(0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_point_axis_rejected() {
        let mut cfg = preset("fig2b", None).unwrap();
        cfg.sweep.as_mut().unwrap().axis1.points = 0;
        assert!(matches!(cfg.validate(Mode::Spectrum), Err(Error::Config(_))));
    }

    #[test]
    fn mode_mismatch_rejected() {
        let cfg = preset("fig2b", None).unwrap();
        assert!(cfg.validate(Mode::Ed).is_err());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let cfg = preset("fig4b", None).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&json).unwrap();
        assert_eq!(cfg, back);
    }
}
