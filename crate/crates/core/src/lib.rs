//! Single-photon transport through a four-port router: two dipole-coupled
//! two-level atoms chirally coupled to a pair of one-dimensional waveguides.
//!
//! Scattering amplitudes come from two independent routes that must agree:
//! closed-form expressions ([`closed_form`]) and a direct solve of the
//! boundary-condition linear system ([`oracle`]). On top of those sit the
//! contrast-ratio / peak-search analysis ([`analysis`]), a parallel grid
//! sweep engine ([`sweep`]), and a JSON/CSV command-line front end ([`cli`]).
//!
//! All numerics are generic over the scalar type via [`Scalar`]; the type
//! aliases at the crate root pin the common `f64` instantiation. Units are
//! `hbar = v_g = 1`, energies in units of the left-mover coupling rate
//! `gamma1`, times in `1/gamma1`.

pub mod analysis;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::Scalar;

use closed_form::Amplitudes;
use model::{Port, ScatteringContext};

/// Which route produced a set of amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Oracle => "oracle",
        }
    }
}

/// Amplitudes for the context's injection port: closed forms first, falling
/// back to the linear solver at flagged degenerate points.
pub fn amplitudes<T: Scalar>(ctx: &ScatteringContext<T>) -> Result<(Amplitudes<T>, Method)> {
    let closed = match ctx.port {
        Port::Port1 => closed_form::amplitudes_port1(ctx),
        Port::Port2 => closed_form::amplitudes_port2(ctx),
    };
    match closed {
        Ok(amps) => Ok((amps, Method::ClosedForm)),
        Err(Error::DegeneratePoint { .. }) => {
            Ok((oracle::amplitudes_oracle(ctx)?, Method::Oracle))
        }
        Err(err) => Err(err),
    }
}

pub type SystemParams64 = model::SystemParams<f64>;
pub type Context64 = model::ScatteringContext<f64>;
pub type Amplitudes64 = closed_form::Amplitudes<f64>;
pub type PortCoefficients64 = closed_form::PortCoefficients<f64>;
pub type ContrastRatios64 = analysis::ContrastRatios<f64>;
pub type Peak64 = analysis::Peak<f64>;
pub type SweepSpec64 = sweep::SweepSpec<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;

pub type SystemParams32 = model::SystemParams<f32>;
pub type Context32 = model::ScatteringContext<f32>;
pub type Amplitudes32 = closed_form::Amplitudes<f32>;
