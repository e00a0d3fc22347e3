//! Physical parameters, the dimer eigenspectrum, and the per-evaluation
//! derived quantities shared by the closed forms and the linear solver.
//!
//! Units: hbar = v_g = 1 throughout. Energies and rates are expressed in
//! units of the left-mover coupling rate `gamma1`, times in `1/gamma1`.


use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Injection side of waveguide a: port 1 is its left end, port 2 its right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Port1,
    Port2,
}

/// `tau == 0` is exactly the Markovian regime (phi = theta); any nonzero
/// propagation delay makes the accumulated phase energy-dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Markovian,
    NonMarkovian,
}

/// All physical parameters of the two-atom, two-waveguide device.
///
/// `gamma1`/`gamma2` are the coupling rates of left-/right-moving photons to
/// either atom (identical for both waveguides and both atoms). `xi` is the
/// direct dipole coupling between the atoms, `theta` the constant part of the
/// inter-atom phase, and `tau` the photon propagation delay between the two
/// coupling points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub omega1: T,
    pub omega2: T,
    pub xi: T,
    pub gamma1: T,
    pub gamma2: T,
    pub theta: T,
    pub tau: T,
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(
        omega1: T,
        omega2: T,
        xi: T,
        gamma1: T,
        gamma2: T,
        theta: T,
        tau: T,
    ) -> Result<Self> {
        let params = Self {
            omega1,
            omega2,
            xi,
            gamma1,
            gamma2,
            theta,
            tau,
        };
        params.validate()?;
        Ok(params)
    }

    /// Both atoms at the same transition frequency `omega_e`.
    pub fn symmetric(omega_e: T, xi: T, gamma1: T, gamma2: T, theta: T, tau: T) -> Result<Self> {
        Self::new(omega_e, omega_e, xi, gamma1, gamma2, theta, tau)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega1,
            self.omega2,
            self.xi,
            self.gamma1,
            self.gamma2,
            self.theta,
            self.tau,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all fields must be finite".into()));
        }
        if self.gamma1 <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "gamma1 must be > 0 (got {})",
                self.gamma1
            )));
        }
        if self.gamma2 < T::zero() {
            return Err(Error::InvalidParams(format!(
                "gamma2 must be >= 0 (got {})",
                self.gamma2
            )));
        }
        if self.xi < T::zero() {
            return Err(Error::InvalidParams(format!(
                "xi must be >= 0 (got {})",
                self.xi
            )));
        }
        if self.tau < T::zero() {
            return Err(Error::InvalidParams(format!(
                "tau must be >= 0 (got {})",
                self.tau
            )));
        }
        Ok(())
    }

    /// Chirality G = gamma2 / gamma1. Always derived, never stored.
    pub fn chirality(&self) -> T {
        self.gamma2 / self.gamma1
    }

    pub fn regime(&self) -> Regime {
        if self.tau == T::zero() {
            Regime::Markovian
        } else {
            Regime::NonMarkovian
        }
    }

    pub fn eigenspectrum(&self) -> EigenSpectrum<T> {
        eigenspectrum(self.omega1, self.omega2, self.xi)
    }
}

/// Single- and double-excitation eigenenergies of the bare atom dimer, plus
/// the mixing angle of the one-excitation doublet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSpectrum<T> {
    /// Double excitation: e1 = omega1 + omega2.
    pub e1: T,
    /// Upper one-excitation level (+ root).
    pub e2: T,
    /// Lower one-excitation level (- root).
    pub e3: T,
    /// Ground state, e4 = 0.
    pub e4: T,
    /// Mixing angle psi = atan2(2 xi, omega1 - omega2).
    pub psi: T,
}

/// Diagonalizes the one-excitation block {{omega1, xi}, {xi, omega2}}.
///
/// Total on finite inputs. `psi` follows the atan2 convention, which puts it
/// in [0, pi] for xi >= 0 and reproduces the limits psi = pi/2 at
/// omega1 == omega2 and psi = 0 at xi = 0, omega1 > omega2.
pub fn eigenspectrum<T: Scalar>(omega1: T, omega2: T, xi: T) -> EigenSpectrum<T> {
    let two = T::from_f64(2.0);
    let sum = omega1 + omega2;
    let diff = omega1 - omega2;
    let split = (T::from_f64(4.0) * xi * xi + diff * diff).sqrt();
    EigenSpectrum {
        e1: sum,
        e2: (sum + split) / two,
        e3: (sum - split) / two,
        e4: T::zero(),
        psi: (two * xi).atan2(diff),
    }
}

/// Derived quantities for one scattering evaluation at photon energy
/// `epsilon`, injected at `port`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringContext<T> {
    pub params: SystemParams<T>,
    pub epsilon: T,
    pub port: Port,
    /// Detuning from the atomic line: Delta = epsilon - omega_e.
    pub delta_cap: T,
    /// Detuning from the upper dimer transition: delta = epsilon - (E1 - E3).
    pub delta_small: T,
    /// Accumulated inter-atom phase phi = tau * Delta + theta.
    pub phi: T,
    /// c1 = gamma1^2.
    pub c1: T,
    /// c2 = gamma2^2.
    pub c2: T,
    pub regime: Regime,
}

impl<T: Scalar> ScatteringContext<T> {
    /// Strict constructor used by the closed forms: rejects `omega1 != omega2`
    /// because the analytical amplitudes assume a single shared detuning.
    pub fn new(params: SystemParams<T>, epsilon: T, port: Port) -> Result<Self> {
        params.validate()?;
        if params.omega1 != params.omega2 {
            return Err(Error::UnequalAtomFrequencies {
                omega1: params.omega1.to_f64().unwrap_or(f64::NAN),
                omega2: params.omega2.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self::build(params, epsilon, port, params.omega1))
    }

    /// Constructor for the linear solver, which handles distinct atomic
    /// detunings. `delta_cap` (and with it `phi`) is referenced to the mean
    /// atom frequency; the solver rows use the per-atom detunings directly.
    pub fn with_unequal_frequencies(
        params: SystemParams<T>,
        epsilon: T,
        port: Port,
    ) -> Result<Self> {
        params.validate()?;
        let reference = (params.omega1 + params.omega2) / T::from_f64(2.0);
        Ok(Self::build(params, epsilon, port, reference))
    }

    fn build(params: SystemParams<T>, epsilon: T, port: Port, reference: T) -> Self {
        let delta_cap = epsilon - reference;
        let spectrum = params.eigenspectrum();
        Self {
            params,
            epsilon,
            port,
            delta_cap,
            delta_small: epsilon - (spectrum.e1 - spectrum.e3),
            phi: params.tau * delta_cap + params.theta,
            c1: params.gamma1 * params.gamma1,
            c2: params.gamma2 * params.gamma2,
            regime: params.regime(),
        }
    }

    /// Per-atom detunings (Delta_1, Delta_2) = (epsilon - omega1, epsilon - omega2).
    pub fn detunings(&self) -> (T, T) {
        (
            self.epsilon - self.params.omega1,
            self.epsilon - self.params.omega2,
        )
    }
}

/// Sweep / search variables. Values are interpreted in the usual scaled
/// units: `G = gamma2/gamma1`, `xi/gamma1`, `delta/gamma1`, `theta` in
/// radians, `gamma1*tau`, `epsilon/gamma1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AxisVar {
    G,
    #[serde(rename = "xi")]
    Xi,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "theta")]
    Theta,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "epsilon")]
    Epsilon,
}

impl AxisVar {
    pub fn label(self) -> &'static str {
        match self {
            AxisVar::G => "G",
            AxisVar::Xi => "xi",
            AxisVar::Delta => "delta",
            AxisVar::Theta => "theta",
            AxisVar::Tau => "tau",
            AxisVar::Epsilon => "epsilon",
        }
    }

    /// Energy-like axes fix the photon energy; the others modify parameters.
    pub fn is_energy(self) -> bool {
        matches!(self, AxisVar::Delta | AxisVar::Epsilon)
    }
}

/// Applies axis assignments to a parameter set and photon energy.
///
/// Parameter axes are applied before energy axes so that a `delta` axis sees
/// the already-updated eigenspectrum (`epsilon = (E1 - E3) + delta*gamma1`).
pub fn apply_axes<T: Scalar>(
    params: &mut SystemParams<T>,
    epsilon: &mut T,
    assignments: &[(AxisVar, T)],
) -> Result<()> {
    for &(var, value) in assignments.iter().filter(|(v, _)| !v.is_energy()) {
        match var {
            AxisVar::G => params.gamma2 = value * params.gamma1,
            AxisVar::Xi => params.xi = value * params.gamma1,
            AxisVar::Theta => params.theta = value,
            AxisVar::Tau => params.tau = value / params.gamma1,
            AxisVar::Delta | AxisVar::Epsilon => unreachable!(),
        }
    }
    params.validate()?;
    for &(var, value) in assignments.iter().filter(|(v, _)| v.is_energy()) {
        match var {
            AxisVar::Delta => {
                let spectrum = params.eigenspectrum();
                *epsilon = (spectrum.e1 - spectrum.e3) + value * params.gamma1;
            }
            AxisVar::Epsilon => *epsilon = value * params.gamma1,
            _ => unreachable!(),
        }
    }
    Ok(())
}
