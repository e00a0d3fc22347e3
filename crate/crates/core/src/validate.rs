//! Seeded randomized cross-validation of the two amplitude routes.
//!
//! Draw algorithm (fixed): a ChaCha12 stream seeded with the 64-bit seed;
//! each uniform double takes the high 53 bits of one `next_u64` call. Per
//! main-loop sample the draws are, in order: G in [0,5), xi in [0,10),
//! delta in [-50,50), theta in [0,2pi), tau in [0,3). The reciprocity loop
//! continues the same stream with draws of xi, delta, theta, tau.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::closed_form::{amplitudes_port1, amplitudes_port2, Amplitudes};
use crate::error::{Error, Result};
use crate::model::{Port, ScatteringContext, SystemParams};
use crate::oracle::{amplitudes_oracle, build_system};

/// Bounds a validation run must stay inside to pass.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationBounds {
    pub max_conservation_residual: f64,
    pub max_closed_vs_oracle_rel: f64,
    pub max_degenerate_fraction: f64,
    pub max_reciprocity_dev: f64,
}

impl Default for ValidationBounds {
    fn default() -> Self {
        Self {
            max_conservation_residual: 1e-10,
            max_closed_vs_oracle_rel: 1e-9,
            max_degenerate_fraction: 1e-3,
            max_reciprocity_dev: 1e-12,
        }
    }
}

/// Outcome of one validation run.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub omega_e: f64,
    pub max_conservation_residual: f64,
    pub max_closed_vs_oracle_rel: f64,
    pub degenerate_points: usize,
    pub reciprocity_samples: usize,
    pub reciprocity_max_dev: f64,
    /// Largest | |r| - |r~| | between the two injection ports, solver route.
    pub reflection_reciprocity_max_dev: f64,
    /// Data-driven verdict on whether reflections are port-reciprocal.
    pub reflection_reciprocity_verdict: String,
    pub max_pivot_ratio: f64,
    pub bounds: ValidationBounds,
    pub pass: bool,
}

struct Uniform {
    rng: ChaCha12Rng,
}

impl Uniform {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [lo, hi) from the high 53 bits of one u64 draw.
    fn draw(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        lo + unit * (hi - lo)
    }
}

/// Componentwise deviation between the outer amplitudes of the two routes,
/// relative to the larger route's largest amplitude magnitude (floored at
/// 1/2 by unitarity, so this never divides by a small number).
fn outer_deviation(a: &Amplitudes<f64>, b: &Amplitudes<f64>) -> f64 {
    let pairs = [
        (a.t_a, b.t_a),
        (a.r_a, b.r_a),
        (a.t_b, b.t_b),
        (a.r_b, b.r_b),
    ];
    let scale = pairs
        .iter()
        .map(|(_, y)| y.norm())
        .fold(0.0f64, f64::max)
        .max(0.5);
    pairs
        .iter()
        .map(|(x, y)| (x - y).norm())
        .fold(0.0f64, f64::max)
        / scale
}

fn draw_params(u: &mut Uniform, omega_e: f64, gamma2: Option<f64>) -> Result<(SystemParams<f64>, f64)> {
    let g = match gamma2 {
        Some(fixed) => fixed,
        None => u.draw(0.0, 5.0),
    };
    let xi = u.draw(0.0, 10.0);
    let delta = u.draw(-50.0, 50.0);
    let theta = u.draw(0.0, std::f64::consts::TAU);
    let tau = u.draw(0.0, 3.0);
    let params = SystemParams::symmetric(omega_e, xi, 1.0, g, theta, tau)?;
    // delta is relative to the upper dimer transition: epsilon = omega_e + xi + delta
    let epsilon = omega_e + xi + delta;
    Ok((params, epsilon))
}

/// Runs the full cross-validation: conservation and closed-form/solver
/// agreement over `samples` random draws (both ports), port reciprocity at
/// G = 1, and the reflection-reciprocity comparison with the solver as the
/// arbiter.
pub fn run(omega_e: f64, samples: usize, seed: u64) -> Result<ValidationReport> {
    run_with_bounds(omega_e, samples, seed, ValidationBounds::default())
}

pub fn run_with_bounds(
    omega_e: f64,
    samples: usize,
    seed: u64,
    bounds: ValidationBounds,
) -> Result<ValidationReport> {
    let mut u = Uniform::new(seed);
    let mut max_conservation = 0.0f64;
    let mut max_rel = 0.0f64;
    let mut max_reflection = 0.0f64;
    let mut max_pivot_ratio = 0.0f64;
    let mut degenerate = 0usize;

    for _ in 0..samples {
        let (params, epsilon) = draw_params(&mut u, omega_e, None)?;
        let ctx1 = ScatteringContext::new(params, epsilon, Port::Port1)?;
        let ctx2 = ScatteringContext::new(params, epsilon, Port::Port2)?;

        let or1 = amplitudes_oracle(&ctx1)?;
        let or2 = amplitudes_oracle(&ctx2)?;
        max_conservation = max_conservation
            .max(or1.conservation_residual())
            .max(or2.conservation_residual());
        max_reflection = max_reflection
            .max((or1.r_a.norm() - or2.r_a.norm()).abs())
            .max((or1.r_b.norm() - or2.r_b.norm()).abs());
        let (_, ratio1) = build_system(&ctx1).solve_with_condition()?;
        max_pivot_ratio = max_pivot_ratio.max(ratio1);

        match (amplitudes_port1(&ctx1), amplitudes_port2(&ctx2)) {
            (Ok(cf1), Ok(cf2)) => {
                max_conservation = max_conservation
                    .max(cf1.conservation_residual())
                    .max(cf2.conservation_residual());
                max_rel = max_rel
                    .max(outer_deviation(&cf1, &or1))
                    .max(outer_deviation(&cf2, &or2));
            }
            (Err(Error::DegeneratePoint { .. }), _) | (_, Err(Error::DegeneratePoint { .. })) => {
                degenerate += 1;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }

    // reciprocity at G = 1: coefficients must match between the two ports
    let reciprocity_samples = (samples / 10).max(1);
    let mut max_reciprocity = 0.0f64;
    for _ in 0..reciprocity_samples {
        let (params, epsilon) = draw_params(&mut u, omega_e, Some(1.0))?;
        let ctx1 = ScatteringContext::new(params, epsilon, Port::Port1)?;
        let ctx2 = ScatteringContext::new(params, epsilon, Port::Port2)?;
        let (a1, _) = crate::amplitudes(&ctx1)?;
        let (a2, _) = crate::amplitudes(&ctx2)?;
        for (x, y) in [
            (a1.t_a.norm_sqr(), a2.t_a.norm_sqr()),
            (a1.t_b.norm_sqr(), a2.t_b.norm_sqr()),
            (a1.r_a.norm_sqr(), a2.r_a.norm_sqr()),
            (a1.r_b.norm_sqr(), a2.r_b.norm_sqr()),
        ] {
            max_reciprocity = max_reciprocity.max((x - y).abs());
        }
    }

    let degenerate_fraction = degenerate as f64 / samples.max(1) as f64;
    let reflection_reciprocal = max_reflection < 1e-9;
    let pass = max_conservation < bounds.max_conservation_residual
        && max_rel < bounds.max_closed_vs_oracle_rel
        && degenerate_fraction < bounds.max_degenerate_fraction
        && max_reciprocity < bounds.max_reciprocity_dev;

    Ok(ValidationReport {
        samples,
        seed,
        omega_e,
        max_conservation_residual: max_conservation,
        max_closed_vs_oracle_rel: max_rel,
        degenerate_points: degenerate,
        reciprocity_samples,
        reciprocity_max_dev: max_reciprocity,
        reflection_reciprocity_max_dev: max_reflection,
        reflection_reciprocity_verdict: if reflection_reciprocal {
            format!(
                "reciprocal: |r| and |r~| agree to {max_reflection:.3e} across all draws"
            )
        } else {
            format!(
                "nonreciprocal: |r| vs |r~| differ by up to {max_reflection:.3e}"
            )
        },
        max_pivot_ratio,
        bounds,
        pass,
    })
}
