//! Nonreciprocity contrast ratios and peak location in 2-D parameter boxes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::coefficients;
use crate::error::{Error, Result};
use crate::model::{apply_axes, AxisVar, Port, ScatteringContext, SystemParams};
use crate::scalar::Scalar;

/// Normalized transmission differences between the two injection ports:
/// i_j = (T~_j - T_j) / (T~_j + T_j), one per waveguide.
///
/// When both transmissions vanish the ratio is 0/0; by convention the value
/// is 0 with the corresponding `*_vacuous` flag set, since nonreciprocity of
/// transmission is meaningless for a fully reflecting device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastRatios<T> {
    pub i_a: T,
    pub i_b: T,
    pub a_vacuous: bool,
    pub b_vacuous: bool,
}

/// (T~ - T) / (T~ + T) with the 0/0 convention above.
pub fn contrast_ratio<T: Scalar>(t: T, t_tilde: T) -> (T, bool) {
    let sum = t + t_tilde;
    if sum < T::contrast_zero() {
        (T::zero(), true)
    } else {
        ((t_tilde - t) / sum, false)
    }
}

/// Evaluates both ports at `epsilon` (closed forms, solver fallback at
/// degenerate points) and forms the contrast ratios.
pub fn contrast<T: Scalar>(params: &SystemParams<T>, epsilon: T) -> Result<ContrastRatios<T>> {
    let ctx1 = ScatteringContext::new(*params, epsilon, Port::Port1)?;
    let ctx2 = ScatteringContext::new(*params, epsilon, Port::Port2)?;
    let (a1, _) = crate::amplitudes(&ctx1)?;
    let (a2, _) = crate::amplitudes(&ctx2)?;
    let c1 = coefficients(&a1, Port::Port1)?;
    let c2 = coefficients(&a2, Port::Port2)?;
    let (i_a, a_vacuous) = contrast_ratio(c1.t_a, c2.t_a);
    let (i_b, b_vacuous) = contrast_ratio(c1.t_b, c2.t_b);
    Ok(ContrastRatios {
        i_a,
        i_b,
        a_vacuous,
        b_vacuous,
    })
}

/// Scalar figures of merit the peak finder can maximize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "T_a")]
    Ta,
    #[serde(rename = "T_b")]
    Tb,
    #[serde(rename = "T~_a", alias = "Tt_a")]
    TaTilde,
    #[serde(rename = "T~_b", alias = "Tt_b")]
    TbTilde,
    #[serde(rename = "abs_I_a")]
    AbsIa,
    #[serde(rename = "abs_I_b")]
    AbsIb,
}

impl Objective {
    pub fn evaluate<T: Scalar>(self, params: &SystemParams<T>, epsilon: T) -> Result<T> {
        match self {
            Objective::Ta | Objective::Tb => {
                let ctx = ScatteringContext::new(*params, epsilon, Port::Port1)?;
                let (amps, _) = crate::amplitudes(&ctx)?;
                Ok(match self {
                    Objective::Ta => amps.t_a.norm_sqr(),
                    _ => amps.t_b.norm_sqr(),
                })
            }
            Objective::TaTilde | Objective::TbTilde => {
                let ctx = ScatteringContext::new(*params, epsilon, Port::Port2)?;
                let (amps, _) = crate::amplitudes(&ctx)?;
                Ok(match self {
                    Objective::TaTilde => amps.t_a.norm_sqr(),
                    _ => amps.t_b.norm_sqr(),
                })
            }
            Objective::AbsIa => Ok(contrast(params, epsilon)?.i_a.abs()),
            Objective::AbsIb => Ok(contrast(params, epsilon)?.i_b.abs()),
        }
    }
}

/// One search dimension: a sweep variable and its closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchAxis<T> {
    pub var: AxisVar,
    pub min: T,
    pub max: T,
}

/// A located maximum. `location` is in axis coordinates, `value` is the
/// objective re-evaluated at that exact location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub location: [T; 2],
    pub value: T,
    pub converged: bool,
    pub evaluations: usize,
}

/// Locates maxima of `objective` over the box spanned by two axes: coarse
/// `grid_n`x`grid_n` scan, then a deterministic simplex refinement started
/// from every strict local-maximum cell. Peaks come back sorted by value
/// (descending, ties broken lexicographically by location) with duplicates
/// within 10x `refine_tol` (normalized coordinates) merged.
pub fn find_peaks<T: Scalar>(
    objective: Objective,
    base: &SystemParams<T>,
    epsilon: T,
    axes: [SearchAxis<T>; 2],
    grid_n: usize,
    refine_tol: T,
) -> Result<Vec<Peak<T>>> {
    base.validate()?;
    if base.omega1 != base.omega2 {
        return Err(Error::UnequalAtomFrequencies {
            omega1: base.omega1.to_f64().unwrap_or(f64::NAN),
            omega2: base.omega2.to_f64().unwrap_or(f64::NAN),
        });
    }
    if axes[0].var == axes[1].var {
        return Err(Error::InvalidSpec(format!(
            "search axes must be distinct (both are {})",
            axes[0].var.label()
        )));
    }
    if axes[0].var.is_energy() && axes[1].var.is_energy() {
        return Err(Error::InvalidSpec(
            "delta and epsilon axes conflict: both fix the photon energy".into(),
        ));
    }
    for axis in &axes {
        if axis.min >= axis.max {
            return Err(Error::EmptyBox {
                axis: axis.var.label(),
                min: axis.min.to_f64().unwrap_or(f64::NAN),
                max: axis.max.to_f64().unwrap_or(f64::NAN),
            });
        }
        let nonnegative = matches!(axis.var, AxisVar::G | AxisVar::Xi | AxisVar::Tau);
        if nonnegative && axis.min < T::zero() {
            return Err(Error::InvalidSpec(format!(
                "axis {} cannot go negative",
                axis.var.label()
            )));
        }
    }

    let base = *base;
    let f = move |x: T, y: T| -> T {
        let mut params = base;
        let mut eps = epsilon;
        let applied = apply_axes(
            &mut params,
            &mut eps,
            &[(axes[0].var, x), (axes[1].var, y)],
        );
        if applied.is_err() {
            return T::neg_infinity();
        }
        objective
            .evaluate(&params, eps)
            .unwrap_or_else(|_| T::neg_infinity())
    };
    find_peaks_fn(
        f,
        (axes[0].min, axes[0].max),
        (axes[1].min, axes[1].max),
        grid_n,
        refine_tol,
    )
}

/// Peak search over an arbitrary objective function of the two axis
/// coordinates. This is the engine behind [`find_peaks`], exposed so tests
/// can drive it with analytic objectives.
pub fn find_peaks_fn<T, F>(
    f: F,
    x_range: (T, T),
    y_range: (T, T),
    grid_n: usize,
    refine_tol: T,
) -> Result<Vec<Peak<T>>>
where
    T: Scalar,
    F: Fn(T, T) -> T + Sync,
{
    for (label, (lo, hi)) in [("x", x_range), ("y", y_range)] {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!("axis {label} must be finite")));
        }
        if lo >= hi {
            return Err(Error::EmptyBox {
                axis: if label == "x" { "x" } else { "y" },
                min: lo.to_f64().unwrap_or(f64::NAN),
                max: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    if grid_n < 8 {
        return Err(Error::InvalidSpec(format!(
            "grid_n must be >= 8 (got {grid_n})"
        )));
    }
    if !refine_tol.is_finite() || refine_tol <= T::zero() {
        return Err(Error::InvalidSpec("refine_tol must be > 0".into()));
    }

    let span_x = x_range.1 - x_range.0;
    let span_y = y_range.1 - y_range.0;
    let denorm = |u: [T; 2]| (x_range.0 + u[0] * span_x, y_range.0 + u[1] * span_y);
    let g = |u: [T; 2]| {
        let (x, y) = denorm(u);
        f(x, y)
    };

    // coarse scan on the unit square
    let n = grid_n;
    let h = T::one() / T::from_f64((n - 1) as f64);
    let grid: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|iy| {
            (0..n)
                .map(|ix| {
                    g([
                        T::from_f64(ix as f64) * h,
                        T::from_f64(iy as f64) * h,
                    ])
                })
                .collect()
        })
        .collect();

    // local-maximum cells over the 8-neighborhood (boundary cells compare
    // against the neighbors they have). Ties are kept as long as the cell
    // dominates at least one neighbor, so ridges and exactly symmetric tops
    // still seed a refinement; the global argmax cell always seeds.
    let mut seeds = Vec::new();
    let mut argmax: Option<(T, usize, usize)> = None;
    for iy in 0..n {
        for ix in 0..n {
            let v = grid[iy][ix];
            if !v.is_finite() {
                continue;
            }
            if argmax.is_none_or(|(best, _, _)| v > best) {
                argmax = Some((v, ix, iy));
            }
            let mut dominated = false;
            let mut dominates_one = false;
            'outer: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                    if jx < 0 || jy < 0 || jx >= n as i64 || jy >= n as i64 {
                        continue;
                    }
                    let w = grid[jy as usize][jx as usize];
                    if w > v {
                        dominated = true;
                        break 'outer;
                    }
                    if w < v {
                        dominates_one = true;
                    }
                }
            }
            if !dominated && dominates_one {
                seeds.push((ix, iy));
            }
        }
    }
    if let Some((_, ix, iy)) = argmax {
        if !seeds.contains(&(ix, iy)) {
            seeds.push((ix, iy));
        }
    }
    let seeds: Vec<[T; 2]> = seeds
        .into_iter()
        .map(|(ix, iy)| [T::from_f64(ix as f64) * h, T::from_f64(iy as f64) * h])
        .collect();

    let mut candidates: Vec<Peak<T>> = seeds
        .par_iter()
        .map(|&seed| {
            let (loc, _, converged, evaluations) =
                nelder_mead(&g, seed, h, refine_tol, MAX_REFINE_EVALS);
            let (x, y) = denorm(loc);
            // re-evaluate at the reported location so the stored value can
            // never go stale
            Peak {
                location: [x, y],
                value: f(x, y),
                converged,
                evaluations,
            }
        })
        .collect();

    candidates.retain(|p| p.value.is_finite());
    candidates.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap()
            .then(a.location[0].partial_cmp(&b.location[0]).unwrap())
            .then(a.location[1].partial_cmp(&b.location[1]).unwrap())
    });

    // merge duplicates within 10 * refine_tol in normalized coordinates
    let radius = T::from_f64(10.0) * refine_tol;
    let mut peaks: Vec<Peak<T>> = Vec::new();
    for cand in candidates {
        let u = [
            (cand.location[0] - x_range.0) / span_x,
            (cand.location[1] - y_range.0) / span_y,
        ];
        let dup = peaks.iter().any(|kept| {
            let ku = [
                (kept.location[0] - x_range.0) / span_x,
                (kept.location[1] - y_range.0) / span_y,
            ];
            (u[0] - ku[0]).abs().max((u[1] - ku[1]).abs()) < radius
        });
        if !dup {
            peaks.push(cand);
        }
    }
    Ok(peaks)
}

/// Hard cap on objective evaluations per refinement run.
const MAX_REFINE_EVALS: usize = 500;

/// Derivative-free simplex maximization on the unit square with projection
/// onto the box. Coefficients: reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2.
fn nelder_mead<T: Scalar>(
    g: &impl Fn([T; 2]) -> T,
    start: [T; 2],
    step: T,
    tol: T,
    max_evals: usize,
) -> ([T; 2], T, bool, usize) {
    let clamp = |p: [T; 2]| -> [T; 2] {
        [
            p[0].max(T::zero()).min(T::one()),
            p[1].max(T::zero()).min(T::one()),
        ]
    };
    let half = T::from_f64(0.5);
    let two = T::from_f64(2.0);

    let offset = |base: [T; 2], dim: usize| -> [T; 2] {
        let mut p = base;
        // step inward when the outward vertex would clamp onto the start
        p[dim] = if p[dim] + step <= T::one() {
            p[dim] + step
        } else {
            p[dim] - step
        };
        clamp(p)
    };

    let mut evals = 0usize;
    let mut simplex = [
        (clamp(start), T::zero()),
        (offset(start, 0), T::zero()),
        (offset(start, 1), T::zero()),
    ];
    for v in simplex.iter_mut() {
        v.1 = g(v.0);
        evals += 1;
    }

    let mut converged = false;
    loop {
        // best first
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let size = simplex[1..]
            .iter()
            .map(|v| {
                (v.0[0] - simplex[0].0[0])
                    .abs()
                    .max((v.0[1] - simplex[0].0[1]).abs())
            })
            .fold(T::zero(), T::max);
        if size < tol {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let (best, second, worst) = (simplex[0], simplex[1], simplex[2]);
        let centroid = [
            (best.0[0] + second.0[0]) * half,
            (best.0[1] + second.0[1]) * half,
        ];
        let reflect = clamp([
            centroid[0] + (centroid[0] - worst.0[0]),
            centroid[1] + (centroid[1] - worst.0[1]),
        ]);
        let f_reflect = g(reflect);
        evals += 1;

        if f_reflect > best.1 {
            let expand = clamp([
                centroid[0] + two * (centroid[0] - worst.0[0]),
                centroid[1] + two * (centroid[1] - worst.0[1]),
            ]);
            let f_expand = g(expand);
            evals += 1;
            simplex[2] = if f_expand > f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect > second.1 {
            simplex[2] = (reflect, f_reflect);
        } else {
            let (towards, f_towards) = if f_reflect > worst.1 {
                (reflect, f_reflect)
            } else {
                (worst.0, worst.1)
            };
            let contracted = clamp([
                centroid[0] + half * (towards[0] - centroid[0]),
                centroid[1] + half * (towards[1] - centroid[1]),
            ]);
            let f_contracted = g(contracted);
            evals += 1;
            if f_contracted > f_towards {
                simplex[2] = (contracted, f_contracted);
            } else {
                // shrink towards the best vertex
                for vertex in simplex.iter_mut().skip(1) {
                    let p = clamp([
                        best.0[0] + half * (vertex.0[0] - best.0[0]),
                        best.0[1] + half * (vertex.0[1] - best.0[1]),
                    ]);
                    let fp = g(p);
                    evals += 1;
                    *vertex = (p, fp);
                }
            }
        }
    }

    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    (simplex[0].0, simplex[0].1, converged, evals)
}
