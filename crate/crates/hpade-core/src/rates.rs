//! Empirical convergence rates and zero distributions of the computed
//! approximants, compared against the predicted decay exponents.

use rayon::prelude::*;
use rug::Float;

use crate::complex::{Complex, Point};
use crate::equilibrium::{predicted_slope, EquilibriumSolution, RateKind};
use crate::error::{CoreError, Result};
use crate::hp::{hp_type2, pade, HpSolution, SystemKind};
use crate::model::ModelParams;
use crate::poly::poly_roots;
use crate::potential::{measure_cdf, SegmentMeasure};
use crate::precision::PrecisionContext;

#[derive(Clone, Debug)]
pub struct RatePoint {
    pub index: usize,
    pub big_n: usize,
    pub log_error: Float,
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub kind: RateKind,
    pub z: Complex,
    pub fitted_slope: Float,
    pub predicted_slope: Float,
    /// |fitted - predicted| / |predicted|
    pub relative_gap: Float,
    pub points: Vec<RatePoint>,
    /// (index, reason) pairs excluded from the fit.
    pub skipped: Vec<(usize, String)>,
}

/// Solves the approximant of `kind` at `index` from the model's cached
/// Laurent coefficients.
pub fn solve_kind(model: &ModelParams, kind: RateKind, index: usize) -> Result<HpSolution> {
    let ctx = model.ctx();
    // a few spare coefficients let the solver verify the remainder order
    let window = match kind {
        RateKind::Pade => 2 * index + 1,
        RateKind::Hp2 => 3 * index + 1,
        RateKind::Hp3 => 4 * index + 1,
    } + 4;
    match kind {
        RateKind::Pade => {
            let cs = model.laurent_coeffs(window)?;
            pade(ctx, &cs, index)
        }
        RateKind::Hp2 => {
            let cs = model.laurent_coeffs(window)?;
            let ds = model.laurent_coeffs_power(window, 2)?;
            hp_type2(ctx, &cs, &ds, None, 2, index)
        }
        RateKind::Hp3 => {
            let cs = model.laurent_coeffs(window)?;
            let ds = model.laurent_coeffs_power(window, 2)?;
            let es = model.laurent_coeffs_power(window, 3)?;
            hp_type2(ctx, &cs, &ds, Some(&es), 3, index)
        }
    }
}

/// `|f(z) - P1(z)/Q(z)|` for an already computed approximant.
pub fn empirical_error_for(model: &ModelParams, sol: &HpSolution, z: &Complex) -> Result<Float> {
    let ctx = model.ctx();
    let f = model.eval_f(&Point::Finite(z.clone()), 1)?;
    let approx = sol.eval_rational(ctx, z)?;
    Ok(f.sub(&approx).abs())
}

/// `|f(z) - P1(z)/Q(z)|` solving the system on the fly.
pub fn empirical_error(
    model: &ModelParams,
    kind: RateKind,
    index: usize,
    z: &Complex,
) -> Result<Float> {
    let sol = solve_kind(model, kind, index)?;
    empirical_error_for(model, &sol, z)
}

/// Least-squares slope of log-error against N over an index window.
pub fn rate_fit(
    model: &ModelParams,
    kind: RateKind,
    indices: &[usize],
    z: &Complex,
    equilibrium: Option<&EquilibriumSolution>,
) -> Result<RateReport> {
    if indices.len() < 8 {
        return Err(CoreError::ParameterDomain(format!(
            "rate fit needs at least 8 indices, got {}",
            indices.len()
        )));
    }
    let ctx = model.ctx();
    // warm the coefficient cache once before going parallel
    let max_index = *indices.iter().max().unwrap();
    solve_kind(model, kind, max_index)?;

    let outcomes: Vec<(usize, std::result::Result<Float, String>)> = indices
        .par_iter()
        .map(|&idx| {
            let r = solve_kind(model, kind, idx)
                .and_then(|sol| empirical_error_for(model, &sol, z))
                .map_err(|e| e.to_string());
            (idx, r)
        })
        .collect();

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (idx, out) in outcomes {
        match out {
            Ok(err) => {
                if err.is_zero() {
                    skipped.push((idx, "exact interpolation, log undefined".into()));
                } else {
                    points.push(RatePoint {
                        index: idx,
                        big_n: kind.big_n(idx),
                        log_error: err.ln(),
                    });
                }
            }
            Err(reason) => skipped.push((idx, reason)),
        }
    }
    if points.len() < 8 {
        return Err(CoreError::NonConvergence(format!(
            "only {} usable rate points after skips",
            points.len()
        )));
    }

    let p = ctx.bits();
    let n = ctx.real(points.len() as u32);
    let mut sx = ctx.zero();
    let mut sy = ctx.zero();
    let mut sxx = ctx.zero();
    let mut sxy = ctx.zero();
    for pt in &points {
        let x = ctx.real(pt.big_n as u32);
        sx += &x;
        sy += &pt.log_error;
        sxx += Float::with_val(p, &x * &x);
        sxy += Float::with_val(p, &x * &pt.log_error);
    }
    let denom = Float::with_val(p, &n * &sxx) - Float::with_val(p, &sx * &sx);
    let fitted_slope =
        (Float::with_val(p, &n * &sxy) - Float::with_val(p, &sx * &sy)) / denom;
    let predicted = predicted_slope(ctx, kind, equilibrium, z)?;
    let relative_gap = Float::with_val(p, &fitted_slope - &predicted).abs()
        / predicted.clone().abs();
    Ok(RateReport {
        kind,
        z: z.clone(),
        fitted_slope,
        predicted_slope: predicted,
        relative_gap,
        points,
        skipped,
    })
}

/// Kolmogorov distance between the normalized zero-counting measure of the
/// denominator (real parts, inside (-1,1)) and a reference probability
/// measure on E.
pub fn zero_distribution_distance(
    model: &ModelParams,
    sol: &HpSolution,
    reference: &SegmentMeasure,
) -> Result<Float> {
    let ctx = model.ctx();
    let zeros = poly_roots(ctx, sol.denominator())?;
    let mass = reference.mass();
    let p = ctx.bits();
    if Float::with_val(p, &mass - 1u32).abs() > ctx.real(1e-6) {
        return Err(CoreError::ParameterDomain(
            "zero-distribution reference must be a probability measure".into(),
        ));
    }
    let mut xs: Vec<Float> = zeros.roots.iter().map(|r| r.re.clone()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    let mut dist = ctx.zero();
    for (i, x) in xs.iter().enumerate() {
        let clipped = x
            .clone()
            .clamp(&reference.segment.lo, &reference.segment.hi);
        let cdf = measure_cdf(reference, &clipped)?;
        let lo = Float::with_val(p, &cdf - Float::with_val(p, i as u32) / Float::with_val(p, n as u32))
            .abs();
        let hi = Float::with_val(
            p,
            &cdf - Float::with_val(p, (i + 1) as u32) / Float::with_val(p, n as u32),
        )
        .abs();
        if lo > dist {
            dist = lo;
        }
        if hi > dist {
            dist = hi;
        }
    }
    Ok(dist)
}

/// Counts sign changes of the remainder `R(y) = Q(y) f(y) - P1(y)` on the
/// open segment (a, b), with sampling refinement until the count stabilizes.
pub fn remainder_sign_changes_on_f(
    model: &ModelParams,
    sol: &HpSolution,
) -> Result<usize> {
    match sol.kind {
        SystemKind::Type2Pair | SystemKind::Type2Triple => {}
        _ => {
            return Err(CoreError::KindMismatch(format!(
                "sign-change counting applies to type II remainders, not {}",
                sol.kind.label()
            )))
        }
    }
    let ctx = model.ctx();
    let p = ctx.bits();
    let a = model.branch_a().clone();
    let b = model.branch_b().clone();
    let q = &sol.polys[0];
    let p1 = &sol.polys[1];
    let sample_count_base = 64 * sol.index.max(1);

    let count_at = |samples: usize| -> Result<usize> {
        let mut count = 0usize;
        let mut prev_sign = 0i8;
        for i in 0..samples {
            let y = Float::with_val(
                p,
                &a + Float::with_val(p, &b - &a) * Float::with_val(p, 2 * i as u32 + 1)
                    / Float::with_val(p, 2 * samples as u32),
            );
            let z = Complex::from_real(y.clone());
            let f = model.eval_f(&Point::Finite(z), 1)?;
            let r = Float::with_val(p, q.eval_real(&y) * &f.re) - p1.eval_real(&y);
            let sign = if r.is_zero() {
                0
            } else if r.is_sign_negative() {
                -1
            } else {
                1
            };
            if sign != 0 {
                if prev_sign != 0 && sign != prev_sign {
                    count += 1;
                }
                prev_sign = sign;
            }
        }
        Ok(count)
    };

    let mut samples = sample_count_base;
    let mut count = count_at(samples)?;
    for _ in 0..4 {
        let refined = count_at(samples * 2)?;
        if refined == count {
            return Ok(count);
        }
        samples *= 2;
        count = refined;
    }
    Err(CoreError::SamplingResolution(format!(
        "sign-change count still moving at {} samples ({} found)",
        samples, count
    )))
}

#[derive(Clone, Debug)]
pub struct OrderingReport {
    pub grid: Vec<Complex>,
    pub delta_violations: usize,
    /// minimum of (1 + 1/t1) G^{lF(t1)}_E - (1 + 1/t2) G^{lF(t2)}_E per pair
    pub min_gaps: Vec<((f64, f64), Float, Complex)>,
    pub deltas: Vec<(Float, Float, Float)>,
}

/// Verifies the strict ordering delta_3 < delta_2 < delta_1 and the
/// theta-monotony gaps on a grid of points off the cut.
pub fn theorem_ordering_check(
    model: &ModelParams,
    solutions: &[&EquilibriumSolution],
    grid: &[Complex],
) -> Result<OrderingReport> {
    let ctx = model.ctx();
    let sol3 = solutions
        .iter()
        .find(|s| (s.theta.to_f64() - 3.0).abs() < 1e-12)
        .ok_or_else(|| CoreError::ParameterDomain("need the theta = 3 solution".into()))?;
    let sol1 = solutions
        .iter()
        .find(|s| (s.theta.to_f64() - 1.0).abs() < 1e-12)
        .ok_or_else(|| CoreError::ParameterDomain("need the theta = 1 solution".into()))?;
    let mut delta_violations = 0usize;
    let mut deltas = Vec::with_capacity(grid.len());
    for z in grid {
        let d1 = crate::equilibrium::predicted_rate(ctx, RateKind::Pade, None, z)?;
        let d2 = crate::equilibrium::predicted_rate(ctx, RateKind::Hp2, Some(sol3), z)?;
        let d3 = crate::equilibrium::predicted_rate(ctx, RateKind::Hp3, Some(sol1), z)?;
        let ok = d3 > 0u32 && d3 < d2 && d2 < d1 && d1 < 1u32;
        if !ok {
            delta_violations += 1;
        }
        deltas.push((d1, d2, d3));
    }
    let mut min_gaps = Vec::new();
    let mut pairs: Vec<(&EquilibriumSolution, &EquilibriumSolution)> = Vec::new();
    for (i, s1) in solutions.iter().enumerate() {
        for s2 in solutions.iter().skip(i + 1) {
            let (t1, t2) = (s1.theta.to_f64(), s2.theta.to_f64());
            if t1 < t2 {
                pairs.push((s1, s2));
            } else if t2 < t1 {
                pairs.push((s2, s1));
            }
        }
    }
    for (s1, s2) in pairs {
        let mut min_gap: Option<(Float, Complex)> = None;
        for z in grid {
            let gap = crate::equilibrium::monotony_gap(ctx, s1, s2, z)?;
            let better = match &min_gap {
                None => true,
                Some((g, _)) => gap < *g,
            };
            if better {
                min_gap = Some((gap, z.clone()));
            }
        }
        let (gap, at) = min_gap.unwrap();
        min_gaps.push(((s1.theta.to_f64(), s2.theta.to_f64()), gap, at));
    }
    Ok(OrderingReport {
        grid: grid.to_vec(),
        delta_violations,
        min_gaps,
        deltas,
    })
}

/// Deterministic grid of `nx * ny` points in the upper half plane around the
/// two segments, all off the cut.
pub fn probe_grid(ctx: PrecisionContext, nx: usize, ny: usize) -> Vec<Complex> {
    let mut grid = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let re = -2.4 + 5.4 * ix as f64 / (nx as f64 - 1.0);
            let im = 0.15 + 1.35 * iy as f64 / (ny as f64 - 1.0);
            grid.push(Complex::from_f64(ctx, re, im));
        }
    }
    grid
}

/// Distance from a point to the segment [-1,1].
pub fn distance_to_cut(ctx: PrecisionContext, z: &Complex) -> Float {
    let p = ctx.bits();
    let clipped = z.re.clone().clamp(&ctx.real(-1), &ctx.real(1));
    let dx = Float::with_val(p, &z.re - &clipped);
    dx.hypot(&z.im)
}
