//! Rectangular 2-D parameter sweeps with a parallel, order-deterministic
//! evaluation contract and CSV serialization.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::contrast;

use crate::error::{Error, Result};
use crate::model::{apply_axes, AxisVar, Port, ScatteringContext, SystemParams};
use crate::scalar::Scalar;

/// Observables a sweep can record per grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "T_a")]
    Ta,
    #[serde(rename = "R_a")]
    Ra,
    #[serde(rename = "T_b")]
    Tb,
    #[serde(rename = "R_b")]
    Rb,
    #[serde(rename = "I_a")]
    Ia,
    #[serde(rename = "I_b")]
    Ib,
    #[serde(rename = "conservation_residual")]
    ConservationResidual,
}

impl Observable {
    pub fn label(self) -> &'static str {
        match self {
            Observable::Ta => "T_a",
            Observable::Ra => "R_a",
            Observable::Tb => "T_b",
            Observable::Rb => "R_b",
            Observable::Ia => "I_a",
            Observable::Ib => "I_b",
            Observable::ConservationResidual => "conservation_residual",
        }
    }

    fn needs_both_ports(self) -> bool {
        matches!(self, Observable::Ia | Observable::Ib)
    }
}

/// One sweep dimension: variable, inclusive range, and point count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis<T> {
    pub var: AxisVar,
    pub min: T,
    pub max: T,
    pub n: usize,
}

/// Full sweep description. The base parameter set and energy seed every
/// cell; axis values then override per point (an energy axis replaces
/// `epsilon`, with `delta` mapped through the current eigenspectrum).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub base: SystemParams<T>,
    pub epsilon: T,
    pub port: Port,
    pub x_axis: SweepAxis<T>,
    pub y_axis: SweepAxis<T>,
    pub observables: Vec<Observable>,
}

/// One grid cell: axis coordinates plus one value per requested observable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub x: T,
    pub y: T,
    pub values: Vec<T>,
}

/// Sweep output: `n_x * n_y` rows in row-major order with x varying fastest.
/// Cells where the solver failed are NaN-marked and listed in `diagnostics`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub spec: SweepSpec<T>,
    pub rows: Vec<SweepRow<T>>,
    pub diagnostics: Vec<String>,
}

/// Inclusive linearly spaced grid (both endpoints present).
pub fn linspace<T: Scalar>(min: T, max: T, n: usize) -> Vec<T> {
    debug_assert!(n >= 2);
    let step = (max - min) / T::from_f64((n - 1) as f64);
    (0..n)
        .map(|k| {
            if k == n - 1 {
                max
            } else {
                min + T::from_f64(k as f64) * step
            }
        })
        .collect()
}

fn validate_spec<T: Scalar>(spec: &SweepSpec<T>) -> Result<()> {
    spec.base.validate()?;
    if spec.observables.is_empty() {
        return Err(Error::InvalidSpec("observables must be nonempty".into()));
    }
    if spec.x_axis.var == spec.y_axis.var {
        return Err(Error::InvalidSpec(format!(
            "sweep axes must be distinct (both are {})",
            spec.x_axis.var.label()
        )));
    }
    if spec.x_axis.var.is_energy() && spec.y_axis.var.is_energy() {
        return Err(Error::InvalidSpec(
            "delta and epsilon axes conflict: both fix the photon energy".into(),
        ));
    }
    for axis in [&spec.x_axis, &spec.y_axis] {
        if !(axis.min.is_finite() && axis.max.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "axis {} must be finite",
                axis.var.label()
            )));
        }
        if axis.min >= axis.max {
            return Err(Error::InvalidSpec(format!(
                "axis {}: min must be < max",
                axis.var.label()
            )));
        }
        if axis.n < 2 {
            return Err(Error::InvalidSpec(format!(
                "axis {}: n must be >= 2",
                axis.var.label()
            )));
        }
        let nonnegative = matches!(axis.var, AxisVar::G | AxisVar::Xi | AxisVar::Tau);
        if nonnegative && axis.min < T::zero() {
            return Err(Error::InvalidSpec(format!(
                "axis {} cannot go negative",
                axis.var.label()
            )));
        }
    }
    Ok(())
}

/// Evaluates a single cell; identical to calling the point operations
/// directly with the same parameter assignments.
fn evaluate_cell<T: Scalar>(spec: &SweepSpec<T>, x: T, y: T) -> Result<Vec<T>> {
    let mut params = spec.base;
    let mut eps = spec.epsilon;
    apply_axes(
        &mut params,
        &mut eps,
        &[(spec.x_axis.var, x), (spec.y_axis.var, y)],
    )?;

    let ctx = ScatteringContext::new(params, eps, spec.port)?;
    let (amps, _) = crate::amplitudes(&ctx)?;
    let needs_contrast = spec.observables.iter().any(|o| o.needs_both_ports());
    let ratios = if needs_contrast {
        Some(contrast(&params, eps)?)
    } else {
        None
    };

    Ok(spec
        .observables
        .iter()
        .map(|obs| match obs {
            Observable::Ta => amps.t_a.norm_sqr(),
            Observable::Ra => amps.r_a.norm_sqr(),
            Observable::Tb => amps.t_b.norm_sqr(),
            Observable::Rb => amps.r_b.norm_sqr(),
            Observable::Ia => ratios.as_ref().unwrap().i_a,
            Observable::Ib => ratios.as_ref().unwrap().i_b,
            Observable::ConservationResidual => amps.conservation_residual(),
        })
        .collect())
}

/// Runs the sweep as a parallel map over cells. The result is identical for
/// any worker count: cells are independent and assembled in index order.
/// Failing cells never abort the sweep; they are NaN-marked and reported.
pub fn run_sweep<T: Scalar>(spec: &SweepSpec<T>) -> Result<SweepResult<T>> {
    validate_spec(spec)?;
    // closed forms power every cell: equal atom frequencies required up front
    ScatteringContext::new(spec.base, spec.epsilon, spec.port)?;

    let xs = linspace(spec.x_axis.min, spec.x_axis.max, spec.x_axis.n);
    let ys = linspace(spec.y_axis.min, spec.y_axis.max, spec.y_axis.n);
    let n_obs = spec.observables.len();

    let cells: Vec<(SweepRow<T>, Option<String>)> = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|idx| {
            let (ix, iy) = (idx % xs.len(), idx / xs.len());
            let (x, y) = (xs[ix], ys[iy]);
            match evaluate_cell(spec, x, y) {
                Ok(values) => (SweepRow { x, y, values }, None),
                Err(err) => (
                    SweepRow {
                        x,
                        y,
                        values: vec![T::nan(); n_obs],
                    },
                    Some(format!("cell ({ix}, {iy}) at x={x}, y={y}: {err}")),
                ),
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut diagnostics = Vec::new();
    for (row, diag) in cells {
        rows.push(row);
        if let Some(d) = diag {
            diagnostics.push(d);
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        diagnostics,
    })
}

impl<T: Scalar> SweepResult<T> {
    /// CSV with a header row; '.' decimal, ',' separator, '\n' line endings.
    /// Values print in shortest round-trip form, so parsing them back gives
    /// bit-identical floats.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(
            w,
            "{},{}",
            self.spec.x_axis.var.label(),
            self.spec.y_axis.var.label()
        )?;
        for obs in &self.spec.observables {
            write!(w, ",{}", obs.label())?;
        }
        writeln!(w)?;
        for row in &self.rows {
            write!(w, "{},{}", row.x, row.y)?;
            for v in &row.values {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}
