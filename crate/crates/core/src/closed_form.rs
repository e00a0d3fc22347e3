//! Analytical single-photon scattering amplitudes for both injection ports.
//!
//! The four outer amplitudes are rational functions of the detuning Delta,
//! the dipole coupling xi, the coupling rates gamma1/gamma2 (entering through
//! c_i = gamma_i^2) and the accumulated phase phi, with the shared
//! denominator `A - C + D + B(2 - 4 e^{2 i phi})`. Both reflection
//! amplitudes in one scattering event coincide (r_b = r_a), and the overall
//! signs here are fixed so that every amplitude agrees componentwise with
//! the boundary-condition solver in [`crate::oracle`]; all probabilities are
//! unaffected by that choice.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Port, ScatteringContext};
use crate::scalar::Scalar;

/// Outer scattering amplitudes, plus the inner-region and atomic amplitudes
/// when produced by the linear solver (the closed forms leave them `None`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes<T> {
    pub t_a: Complex<T>,
    pub r_a: Complex<T>,
    pub t_b: Complex<T>,
    pub r_b: Complex<T>,
    pub inner: Option<InnerAmplitudes<T>>,
}

/// Amplitudes between the two coupling points and on the atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerAmplitudes<T> {
    pub t12a: Complex<T>,
    pub r12a: Complex<T>,
    pub t12b: Complex<T>,
    pub r12b: Complex<T>,
    pub u1: Complex<T>,
    pub u2: Complex<T>,
}

impl<T: Scalar> Amplitudes<T> {
    /// |t_a|^2 + |r_a|^2 + |t_b|^2 + |r_b|^2 (must be 1 for a lossless device).
    pub fn probability_sum(&self) -> T {
        self.t_a.norm_sqr() + self.r_a.norm_sqr() + self.t_b.norm_sqr() + self.r_b.norm_sqr()
    }

    pub fn conservation_residual(&self) -> T {
        (self.probability_sum() - T::one()).abs()
    }
}

/// Shared denominator terms. B and the square roots are real and nonnegative
/// because c_i = gamma_i^2 with gamma_i >= 0: sqrt(B) = sqrt(gamma1*gamma2)
/// and sqrt(A + 2B) = gamma1 + gamma2.
struct Terms<T> {
    delta: T,
    xi: T,
    g1: T,
    g2: T,
    sin_phi: T,
    cos_phi: T,
    /// e^{i phi}
    p: Complex<T>,
    /// e^{2 i phi}
    p2: Complex<T>,
    b: T,
    den: Complex<T>,
}

fn terms<T: Scalar>(ctx: &ScatteringContext<T>) -> Result<Terms<T>> {
    let two = T::from_f64(2.0);
    let i = Complex::<T>::i();
    let delta = ctx.delta_cap;
    let xi = ctx.params.xi;
    let g1 = ctx.params.gamma1;
    let g2 = ctx.params.gamma2;
    let (sin_phi, cos_phi) = ctx.phi.sin_cos();
    let p = Complex::new(cos_phi, sin_phi);
    let p2 = p * p;

    let a = ctx.c1 + ctx.c2;
    let b = g1 * g2;
    let c = delta * delta - xi * xi;
    let d = i * (g1 + g2) * (Complex::new(delta, T::zero()) - p * xi) * two;
    let ge = Complex::new(g1, delta);
    let e = ge * ge + Complex::new(ctx.c2 + xi * xi, T::zero());

    let den = Complex::new(a - c, T::zero())
        + d
        + (Complex::new(two, T::zero()) - p2 * T::from_f64(4.0)) * b;

    let scale = a.abs().max(c.abs()).max(e.norm()).max(T::one());
    let floor = T::degenerate_floor() * scale;
    if den.norm() < floor {
        return Err(Error::DegeneratePoint {
            denominator: den.norm().to_f64().unwrap_or(f64::NAN),
            floor: floor.to_f64().unwrap_or(f64::NAN),
        });
    }

    Ok(Terms {
        delta,
        xi,
        g1,
        g2,
        sin_phi,
        cos_phi,
        p,
        p2,
        b,
        den,
    })
}

/// Amplitudes for injection at port 1 (left end of waveguide a).
pub fn amplitudes_port1<T: Scalar>(ctx: &ScatteringContext<T>) -> Result<Amplitudes<T>> {
    let t = terms(ctx)?;
    Ok(port_amplitudes(&t, Port::Port1))
}

/// Amplitudes for injection at port 2 (right end of waveguide a). Relative to
/// port 1 the two coupling rates swap roles in the numerators and the
/// reflection prefactor carries e^{-i phi} instead of e^{i phi}.
pub fn amplitudes_port2<T: Scalar>(ctx: &ScatteringContext<T>) -> Result<Amplitudes<T>> {
    let t = terms(ctx)?;
    Ok(port_amplitudes(&t, Port::Port2))
}

/// Common body for both ports. `ga` is the rate along the incident
/// propagation direction (gamma1 for port 1, gamma2 for port 2), `gb` the
/// opposite one.
fn port_amplitudes<T: Scalar>(t: &Terms<T>, port: Port) -> Amplitudes<T> {
    let (ga, gb) = match port {
        Port::Port1 => (t.g1, t.g2),
        Port::Port2 => (t.g2, t.g1),
    };
    let two = T::from_f64(2.0);
    let i = Complex::<T>::i();
    let real = |v: T| Complex::new(v, T::zero());

    // E (port 1) / E' (port 2): c_opp + (g_inc + i Delta)^2 + xi^2
    let ge = Complex::new(ga, t.delta);
    let e = ge * ge + real(gb * gb + t.xi * t.xi);

    let t_a_num = t.p2 * (two * t.b) + i * t.p * (two * ga * t.xi)
        - real(two * t.sin_phi * gb * t.xi)
        - e;
    let t_a = -t_a_num / t.den;

    // both ports share the same reflection bracket; only the phase prefactor
    // differs (p for port 1, conj(p) for port 2)
    let bracket = t.delta * t.cos_phi - t.xi - (t.g1 + t.g2) * t.sin_phi;
    let prefactor = match port {
        Port::Port1 => t.p,
        Port::Port2 => t.p.conj(),
    };
    let r_a = -(i * prefactor * (two * t.b.sqrt() * bracket)) / t.den;

    let t_b_inner = real(t.delta - t.xi * t.cos_phi) - t.p * (two * ga * t.sin_phi);
    let t_b = -(i * t_b_inner * (two * gb)) / t.den;

    Amplitudes {
        t_a,
        r_a,
        t_b,
        r_b: r_a,
        inner: None,
    }
}

/// Transmission/reflection probabilities with their fixed output-port map.
///
/// The map is set by the injection side: for port-1 input, T_a exits port 2,
/// R_a port 1, T_b port 4 and R_b port 3; for port-2 input, T_a exits port 1,
/// R_a port 2, T_b port 3 and R_b port 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortCoefficients<T> {
    pub t_a: T,
    pub r_a: T,
    pub t_b: T,
    pub r_b: T,
    pub input: Port,
}

impl<T: Scalar> PortCoefficients<T> {
    pub fn sum(&self) -> T {
        self.t_a + self.r_a + self.t_b + self.r_b
    }

    pub fn conservation_residual(&self) -> T {
        (self.sum() - T::one()).abs()
    }

    /// Probabilities keyed by output port number 1..=4.
    pub fn by_output_port(&self) -> [(u8, T); 4] {
        match self.input {
            Port::Port1 => [(1, self.r_a), (2, self.t_a), (3, self.r_b), (4, self.t_b)],
            Port::Port2 => [(1, self.t_a), (2, self.r_a), (3, self.t_b), (4, self.r_b)],
        }
    }
}

/// Moduli squared of the outer amplitudes. Fails with
/// [`Error::ConservationViolation`] when the probabilities do not sum to 1,
/// which signals an upstream formula or solver bug rather than bad input.
pub fn coefficients<T: Scalar>(amps: &Amplitudes<T>, port: Port) -> Result<PortCoefficients<T>> {
    let coeffs = PortCoefficients {
        t_a: amps.t_a.norm_sqr(),
        r_a: amps.r_a.norm_sqr(),
        t_b: amps.t_b.norm_sqr(),
        r_b: amps.r_b.norm_sqr(),
        input: port,
    };
    let residual = coeffs.conservation_residual();
    if residual > T::conservation_tol() {
        return Err(Error::ConservationViolation {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(coeffs)
}
