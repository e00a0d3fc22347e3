//! JSON-config command front end: single points, sweeps, contrast ratios,
//! peak searches, and randomized validation runs.
//!
//! All energies in a config are in units of gamma1, which is fixed to 1
//! internally and never configurable. Exactly one of `epsilon` / `delta`
//! selects the photon energy (`epsilon = E1 - E3 + delta`); commands whose
//! axes fix the energy per point may omit both.

use serde::Deserialize;
use serde_json::json;

use crate::analysis::{contrast, find_peaks, Objective, Peak, SearchAxis};
use crate::closed_form::{coefficients, Amplitudes, PortCoefficients};
use crate::error::{Error, Result};
use crate::model::{AxisVar, Port, Regime, ScatteringContext, SystemParams};
use crate::sweep::{run_sweep, Observable, SweepAxis, SweepSpec};
use crate::validate;

pub const DEFAULT_GRID_N: usize = 64;
pub const DEFAULT_REFINE_TOL: f64 = 1e-9;
pub const DEFAULT_VALIDATE_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Point,
    Sweep,
    Contrast,
    FindPeaks,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum PortName {
    #[serde(rename = "port1")]
    Port1,
    #[serde(rename = "port2")]
    Port2,
}

impl From<PortName> for Port {
    fn from(p: PortName) -> Self {
        match p {
            PortName::Port1 => Port::Port1,
            PortName::Port2 => Port::Port2,
        }
    }
}

fn port_label(port: Port) -> &'static str {
    match port {
        Port::Port1 => "port1",
        Port::Port2 => "port2",
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxisBlock {
    pub var: AxisVar,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakAxisBlock {
    pub var: AxisVar,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub x: SweepAxisBlock,
    pub y: SweepAxisBlock,
    pub observables: Vec<Observable>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeaksBlock {
    pub objective: Objective,
    pub x: PeakAxisBlock,
    pub y: PeakAxisBlock,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}

fn default_refine_tol() -> f64 {
    DEFAULT_REFINE_TOL
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateBlock {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_samples() -> usize {
    DEFAULT_VALIDATE_SAMPLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Parsed and semantically validated run configuration. Unknown keys are
/// rejected; defaults (theta = 0, tau = 0, port = port1) are applied here
/// and echoed in every output document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega_e: f64,
    pub xi: f64,
    #[serde(rename = "G")]
    pub chirality: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub port: Option<PortName>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub peaks: Option<PeaksBlock>,
    #[serde(default)]
    pub validate: Option<ValidateBlock>,
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::SchemaError {
        path: "<config>".into(),
        message: e.to_string(),
    })?;
    config.validate_semantics()?;
    Ok(config)
}

impl RunConfig {
    fn validate_semantics(&self) -> Result<()> {
        let schema_err = |path: &str, message: String| Error::SchemaError {
            path: path.into(),
            message,
        };
        for (path, value) in [
            ("omega_e", self.omega_e),
            ("xi", self.xi),
            ("G", self.chirality),
            ("theta", self.theta),
            ("tau", self.tau),
        ] {
            if !value.is_finite() {
                return Err(schema_err(path, format!("must be finite (got {value})")));
            }
        }
        if self.xi < 0.0 {
            return Err(schema_err("xi", format!("must be >= 0 (got {})", self.xi)));
        }
        if self.chirality < 0.0 {
            return Err(schema_err(
                "G",
                format!("must be >= 0 (got {})", self.chirality),
            ));
        }
        if self.tau < 0.0 {
            return Err(schema_err("tau", format!("must be >= 0 (got {})", self.tau)));
        }
        if self.delta.is_some() && self.epsilon.is_some() {
            return Err(Error::ConflictError(
                "give either `epsilon` or `delta`, not both".into(),
            ));
        }
        for opt in [("delta", self.delta), ("epsilon", self.epsilon)] {
            if let (path, Some(v)) = opt {
                if !v.is_finite() {
                    return Err(schema_err(path, format!("must be finite (got {v})")));
                }
            }
        }
        if let Some(p) = &self.peaks {
            if !p.refine_tol.is_finite() || p.refine_tol <= 0.0 {
                return Err(schema_err(
                    "peaks.refine_tol",
                    format!("must be > 0 (got {})", p.refine_tol),
                ));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<SystemParams<f64>> {
        SystemParams::symmetric(
            self.omega_e,
            self.xi,
            1.0,
            self.chirality,
            self.theta,
            self.tau,
        )
    }

    pub fn port(&self) -> Port {
        self.port.map(Port::from).unwrap_or(Port::Port1)
    }

    /// Photon energy from `epsilon` or `delta` (relative to E1 - E3).
    pub fn energy(&self) -> Result<Option<f64>> {
        let params = self.params()?;
        let spectrum = params.eigenspectrum();
        Ok(match (self.epsilon, self.delta) {
            (Some(e), None) => Some(e),
            (None, Some(d)) => Some(spectrum.e1 - spectrum.e3 + d),
            (None, None) => None,
            (Some(_), Some(_)) => unreachable!("rejected during validation"),
        })
    }

    fn required_energy(&self, axes_fix_energy: bool) -> Result<f64> {
        match self.energy()? {
            Some(e) => Ok(e),
            None if axes_fix_energy => {
                // placeholder, overridden per point by the energy axis
                let spectrum = self.params()?.eigenspectrum();
                Ok(spectrum.e1 - spectrum.e3)
            }
            None => Err(Error::SchemaError {
                path: "epsilon".into(),
                message: "one of `epsilon` or `delta` is required for this command".into(),
            }),
        }
    }
}

/// A finished command: the output document, what exit code to use, and any
/// diagnostics that belong on standard error.
#[derive(Debug, Clone)]
pub struct Output {
    pub document: String,
    pub exit_code: i32,
    pub notes: Vec<String>,
}

/// Runtime options carried in from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed_override: Option<u64>,
}

fn params_echo(config: &RunConfig) -> serde_json::Value {
    json!({
        "omega_e": config.omega_e,
        "xi": config.xi,
        "G": config.chirality,
        "gamma1": 1.0,
        "gamma2": config.chirality,
        "theta": config.theta,
        "tau": config.tau,
    })
}

fn regime_label(regime: Regime) -> &'static str {
    match regime {
        Regime::Markovian => "markovian",
        Regime::NonMarkovian => "non-markovian",
    }
}

fn complex_json(z: num_complex::Complex<f64>) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn amplitudes_json(amps: &Amplitudes<f64>) -> serde_json::Value {
    json!({
        "t_a": complex_json(amps.t_a),
        "r_a": complex_json(amps.r_a),
        "t_b": complex_json(amps.t_b),
        "r_b": complex_json(amps.r_b),
    })
}

fn coefficients_json(c: &PortCoefficients<f64>) -> serde_json::Value {
    json!({ "T_a": c.t_a, "R_a": c.r_a, "T_b": c.t_b, "R_b": c.r_b })
}

fn port_map_json(c: &PortCoefficients<f64>) -> (serde_json::Value, serde_json::Value) {
    let map = match c.input {
        Port::Port1 => json!({ "R_a": "port1", "T_a": "port2", "R_b": "port3", "T_b": "port4" }),
        Port::Port2 => json!({ "T_a": "port1", "R_a": "port2", "T_b": "port3", "R_b": "port4" }),
    };
    let by_port = c.by_output_port();
    let probs = json!({
        "port1": by_port[0].1,
        "port2": by_port[1].1,
        "port3": by_port[2].1,
        "port4": by_port[3].1,
    });
    (map, probs)
}

/// Runs one command against a validated config. Exit code 0 on success and
/// 1 when a validation run exceeds its bounds; config errors surface as
/// `Err` and map to exit code 2 in the binary.
pub fn dispatch(command: Command, config: &RunConfig, options: &RunOptions) -> Result<Output> {
    match command {
        Command::Point => run_point(config),
        Command::Contrast => run_contrast(config),
        Command::Sweep => run_sweep_command(config),
        Command::FindPeaks => run_find_peaks(config),
        Command::Validate => run_validate(config, options),
    }
}

fn run_point(config: &RunConfig) -> Result<Output> {
    let params = config.params()?;
    let epsilon = config.required_energy(false)?;
    let port = config.port();
    let ctx = ScatteringContext::new(params, epsilon, port)?;
    let (amps, method) = crate::amplitudes(&ctx)?;
    let coeffs = coefficients(&amps, port)?;
    let (map, probs) = port_map_json(&coeffs);
    let doc = json!({
        "command": "point",
        "params": params_echo(config),
        "epsilon": epsilon,
        "Delta": ctx.delta_cap,
        "delta": ctx.delta_small,
        "phi": ctx.phi,
        "port": port_label(port),
        "regime": regime_label(ctx.regime),
        "method": method.label(),
        "amplitudes": amplitudes_json(&amps),
        "coefficients": coefficients_json(&coeffs),
        "out_port_map": map,
        "port_probabilities": probs,
        "conservation_residual": coeffs.conservation_residual(),
    });
    Ok(Output {
        document: serde_json::to_string_pretty(&doc).expect("document serializes"),
        exit_code: 0,
        notes: Vec::new(),
    })
}

fn run_contrast(config: &RunConfig) -> Result<Output> {
    let params = config.params()?;
    let epsilon = config.required_energy(false)?;
    let ratios = contrast(&params, epsilon)?;
    let ctx1 = ScatteringContext::new(params, epsilon, Port::Port1)?;
    let ctx2 = ScatteringContext::new(params, epsilon, Port::Port2)?;
    let (a1, _) = crate::amplitudes(&ctx1)?;
    let (a2, _) = crate::amplitudes(&ctx2)?;
    let c1 = coefficients(&a1, Port::Port1)?;
    let c2 = coefficients(&a2, Port::Port2)?;
    let doc = json!({
        "command": "contrast",
        "params": params_echo(config),
        "epsilon": epsilon,
        "i_a": ratios.i_a,
        "i_b": ratios.i_b,
        "i_a_vacuous": ratios.a_vacuous,
        "i_b_vacuous": ratios.b_vacuous,
        "port1_coefficients": coefficients_json(&c1),
        "port2_coefficients": coefficients_json(&c2),
    });
    Ok(Output {
        document: serde_json::to_string_pretty(&doc).expect("document serializes"),
        exit_code: 0,
        notes: Vec::new(),
    })
}

fn run_sweep_command(config: &RunConfig) -> Result<Output> {
    let block = config.sweep.as_ref().ok_or_else(|| Error::SchemaError {
        path: "sweep".into(),
        message: "a `sweep` block is required for the sweep command".into(),
    })?;
    let axes_fix_energy = block.x.var.is_energy() || block.y.var.is_energy();
    let spec = SweepSpec {
        base: config.params()?,
        epsilon: config.required_energy(axes_fix_energy)?,
        port: config.port(),
        x_axis: SweepAxis {
            var: block.x.var,
            min: block.x.min,
            max: block.x.max,
            n: block.x.n,
        },
        y_axis: SweepAxis {
            var: block.y.var,
            min: block.y.min,
            max: block.y.max,
            n: block.y.n,
        },
        observables: block.observables.clone(),
    };
    let result = run_sweep(&spec)?;
    Ok(Output {
        document: result.to_csv_string(),
        exit_code: 0,
        notes: result.diagnostics,
    })
}

fn run_find_peaks(config: &RunConfig) -> Result<Output> {
    let block = config.peaks.as_ref().ok_or_else(|| Error::SchemaError {
        path: "peaks".into(),
        message: "a `peaks` block is required for the find-peaks command".into(),
    })?;
    let axes_fix_energy = block.x.var.is_energy() || block.y.var.is_energy();
    let params = config.params()?;
    let epsilon = config.required_energy(axes_fix_energy)?;
    let axes = [
        SearchAxis {
            var: block.x.var,
            min: block.x.min,
            max: block.x.max,
        },
        SearchAxis {
            var: block.y.var,
            min: block.y.min,
            max: block.y.max,
        },
    ];
    let peaks = find_peaks(
        block.objective,
        &params,
        epsilon,
        axes,
        block.grid_n,
        block.refine_tol,
    )?;
    let peaks_json: Vec<serde_json::Value> = peaks
        .iter()
        .map(|p: &Peak<f64>| {
            json!({
                block.x.var.label(): p.location[0],
                block.y.var.label(): p.location[1],
                "value": p.value,
                "converged": p.converged,
                "evaluations": p.evaluations,
            })
        })
        .collect();
    let doc = json!({
        "command": "find-peaks",
        "params": params_echo(config),
        "epsilon": epsilon,
        "objective": serde_json::to_value(block.objective).expect("objective serializes"),
        "grid_n": block.grid_n,
        "refine_tol": block.refine_tol,
        "axes": [
            { "var": block.x.var.label(), "min": block.x.min, "max": block.x.max },
            { "var": block.y.var.label(), "min": block.y.min, "max": block.y.max },
        ],
        "peaks": peaks_json,
    });
    Ok(Output {
        document: serde_json::to_string_pretty(&doc).expect("document serializes"),
        exit_code: 0,
        notes: Vec::new(),
    })
}

fn run_validate(config: &RunConfig, options: &RunOptions) -> Result<Output> {
    let block = config.validate.unwrap_or(ValidateBlock {
        samples: DEFAULT_VALIDATE_SAMPLES,
        seed: DEFAULT_SEED,
    });
    let seed = options.seed_override.unwrap_or(block.seed);
    let report = validate::run(config.omega_e, block.samples, seed)?;
    let exit_code = if report.pass { 0 } else { 1 };
    Ok(Output {
        document: serde_json::to_string_pretty(&report).expect("report serializes"),
        exit_code,
        notes: Vec::new(),
    })
}
