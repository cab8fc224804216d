//! Scalar mixed Green-logarithmic equilibrium problems on the two segments.
//!
//! On E = [-1,1]:  theta V^lambda(x) + G^lambda_F(x)               = c_E,
//! on F = [a,b]:   theta V^lambda(y) + G^lambda_E(y) + theta g_E(y) = c_F,
//! both for probability measures with full support, which holds for the
//! fields used here. The measure's Green potential splits as
//! G^lambda_S = V^lambda + smooth quadrature, so each problem collocates to a
//! dense linear system in the density values plus the constant.

use rayon::prelude::*;
use rug::Float;

use crate::complex::{Complex, Point};
use crate::error::{CoreError, Result};
use crate::linalg::solve_dense;
use crate::model::ModelParams;
use crate::potential::{
    chebyshev_angles, green_potential, green_segment, green_smooth_part, log_potential, Segment,
    SegmentMeasure,
};
use crate::precision::PrecisionContext;

pub const MIN_NODES: usize = 32;

/// Residual tolerance of the collocation solves, fixed relative to mass 1.
pub const SOLVER_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EquilibriumSolution {
    pub theta: Float,
    pub lambda_e: SegmentMeasure,
    pub lambda_f: SegmentMeasure,
    pub c_e: Float,
    pub c_f: Float,
    /// Sup-norm of the equilibrium equation residual at probe points between
    /// collocation nodes.
    pub residual_e: Float,
    pub residual_f: Float,
    /// Worst residual of the cross-identities at the off-segment samples.
    pub identity_residual: Float,
    /// Residual of the constants identity c_F = c_E + theta G^{lambda_E}_F(inf).
    pub consts_residual: Float,
}

pub fn segment_e(ctx: PrecisionContext) -> Segment {
    Segment::new(ctx.real(-1), ctx.real(1)).unwrap()
}

pub fn segment_f(model: &ModelParams) -> Segment {
    Segment::new(model.branch_a().clone(), model.branch_b().clone()).unwrap()
}

fn check_theta_nodes(theta: &Float, node_count: usize) -> Result<()> {
    if theta.is_sign_negative() && !theta.is_zero() {
        return Err(CoreError::ParameterDomain(format!(
            "theta must be >= 0, got {}",
            theta.to_f64()
        )));
    }
    if node_count < MIN_NODES {
        return Err(CoreError::ParameterDomain(format!(
            "node_count {node_count} below the minimum of {MIN_NODES}"
        )));
    }
    Ok(())
}

/// On-segment log-potential collocation matrix: row i gives
/// `V^mu(x_i)` from density node values, `V_mat[i][j] = log(2/h)/K +
/// sum_{n>=1} (2/K) cos(n t_j) cos(n t_i) / n`.
fn potential_matrix(ctx: PrecisionContext, seg: &Segment, k: usize) -> Vec<Vec<Float>> {
    let p = ctx.bits();
    let angles = chebyshev_angles(ctx, k);
    let cos1: Vec<Float> = angles.iter().map(|t| t.clone().cos()).collect();
    // cos_table[n][j] = cos(n t_j) by recurrence
    let mut cos_table: Vec<Vec<Float>> = Vec::with_capacity(k);
    cos_table.push(vec![ctx.one(); k]);
    if k > 1 {
        cos_table.push(cos1.clone());
    }
    for n in 2..k {
        let row: Vec<Float> = (0..k)
            .map(|j| {
                Float::with_val(
                    p,
                    Float::with_val(p, 2u32 * &cos1[j]) * &cos_table[n - 1][j] - &cos_table[n - 2][j],
                )
            })
            .collect();
        cos_table.push(row);
    }
    let log_2h = Float::with_val(p, 2u32 / &seg.halfwidth()).ln();
    let kf = Float::with_val(p, k as u32);
    (0..k)
        .into_par_iter()
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut acc = Float::with_val(p, &log_2h / &kf);
                    for n in 1..k {
                        let t = Float::with_val(p, &cos_table[n][i] * &cos_table[n][j])
                            / Float::with_val(p, n as u32);
                        acc += Float::with_val(p, &t * &Float::with_val(p, 2u32 / &kf));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

struct CollocationPieces {
    nodes: Vec<Float>,
    v_mat: Vec<Vec<Float>>,
    h_mat: Vec<Vec<Float>>,
}

/// Assembles V and the smooth Green part H for the equilibrium equation on
/// `own` with the Green term relative to `other`.
fn assemble(ctx: PrecisionContext, own: &Segment, other: &Segment, k: usize) -> CollocationPieces {
    let p = ctx.bits();
    let angles = chebyshev_angles(ctx, k);
    let nodes: Vec<Float> = angles
        .iter()
        .map(|t| own.point_from_unit(&t.clone().cos()))
        .collect();
    let v_mat = potential_matrix(ctx, own, k);
    let kf = Float::with_val(p, k as u32);
    let h_mat: Vec<Vec<Float>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let zi = Complex::from_real(nodes[i].clone());
            (0..k)
                .map(|j| {
                    let h = green_smooth_part(ctx, other, &Complex::from_real(nodes[j].clone()), &zi);
                    Float::with_val(p, &h / &kf)
                })
                .collect()
        })
        .collect();
    CollocationPieces { nodes, v_mat, h_mat }
}

/// Probe residual of `theta V + G + field - c` at 4K points between nodes.
fn probe_residual(
    ctx: PrecisionContext,
    mu: &SegmentMeasure,
    other: &Segment,
    theta: &Float,
    field: &dyn Fn(&Float) -> Float,
    c_val: &Float,
) -> Float {
    let p = ctx.bits();
    let probes = chebyshev_angles(ctx, 4 * mu.node_count());
    let mut worst = ctx.zero();
    for t in &probes {
        let x = mu.segment.point_from_unit(&t.clone().cos());
        let z = Complex::from_real(x.clone());
        let v = log_potential(mu, &z);
        let g = green_potential(mu, &Point::Finite(z), other).unwrap_or_else(|_| ctx.zero());
        let r = Float::with_val(
            p,
            Float::with_val(p, theta * &v) + &g + field(&x) - c_val,
        )
        .abs();
        if r > worst {
            worst = r;
        }
    }
    worst
}

fn solve_on_segment(
    ctx: PrecisionContext,
    own: &Segment,
    other: &Segment,
    theta: &Float,
    field: &dyn Fn(&Float) -> Float,
    node_count: usize,
) -> Result<(SegmentMeasure, Float, Float)> {
    let p = ctx.bits();
    let k = node_count;
    let pieces = assemble(ctx, own, other, k);
    let theta_plus_1 = Float::with_val(p, theta + 1u32);
    let mut mat: Vec<Vec<Float>> = Vec::with_capacity(k + 1);
    let mut rhs: Vec<Float> = Vec::with_capacity(k + 1);
    for i in 0..k {
        let mut row: Vec<Float> = Vec::with_capacity(k + 1);
        for j in 0..k {
            row.push(Float::with_val(
                p,
                Float::with_val(p, &theta_plus_1 * &pieces.v_mat[i][j]) + &pieces.h_mat[i][j],
            ));
        }
        row.push(ctx.real(-1));
        mat.push(row);
        rhs.push(-field(&pieces.nodes[i]));
    }
    // mass row: (1/K) sum u_j = 1
    let mut mass_row = vec![Float::with_val(p, 1u32) / Float::with_val(p, k as u32); k];
    mass_row.push(ctx.zero());
    mat.push(mass_row);
    rhs.push(ctx.one());

    let report = solve_dense(ctx, mat, rhs)?;
    if report.rank_defect > 0 {
        return Err(CoreError::NonConvergence(format!(
            "collocation system rank-deficient (defect {})",
            report.rank_defect
        )));
    }
    let mut values = report.solution;
    let c_val = values.pop().unwrap();
    for (j, v) in values.iter().enumerate() {
        if v.is_sign_negative() && !v.is_zero() {
            return Err(CoreError::NegativeDensity(format!(
                "node {j} of {k} has density {}; full-support assumption failed",
                v.to_f64()
            )));
        }
    }
    let mu = SegmentMeasure::from_values(ctx, own.clone(), values)?;
    let resid = probe_residual(ctx, &mu, other, theta, field, &c_val);
    let tol = ctx.real(SOLVER_TOL);
    if resid > tol {
        return Err(CoreError::NonConvergence(format!(
            "equilibrium probe residual {:.3e} above {SOLVER_TOL:.1e}",
            resid.to_f64()
        )));
    }
    Ok((mu, c_val, resid))
}

/// Solves the equilibrium problem on E with the Green term relative to F.
pub fn solve_lambda_e(
    model: &ModelParams,
    theta: &Float,
    node_count: usize,
) -> Result<(SegmentMeasure, Float, Float)> {
    check_theta_nodes(theta, node_count)?;
    let ctx = model.ctx();
    let e = segment_e(ctx);
    let f = segment_f(model);
    let zero_field = |_: &Float| ctx.zero();
    solve_on_segment(ctx, &e, &f, theta, &zero_field, node_count)
}

/// Solves the conjugate problem on F, external field `theta g_E(y, inf)`.
pub fn solve_lambda_f(
    model: &ModelParams,
    theta: &Float,
    node_count: usize,
) -> Result<(SegmentMeasure, Float, Float)> {
    check_theta_nodes(theta, node_count)?;
    let ctx = model.ctx();
    let e = segment_e(ctx);
    let f = segment_f(model);
    let p = ctx.bits();
    let e_for_field = e.clone();
    let field = move |y: &Float| -> Float {
        let g = green_segment(
            ctx,
            &Point::Finite(Complex::from_real(y.clone())),
            &Point::Infinity,
            &e_for_field,
        )
        .expect("F nodes lie off E");
        Float::with_val(p, theta * &g)
    };
    solve_on_segment(ctx, &f, &e, theta, &field, node_count)
}

/// Equilibrium problem `V^lambda + psi = c` on E for a continuous external
/// field, assuming full support (holds for the fields used here).
pub fn solve_external_field(
    ctx: PrecisionContext,
    field: &dyn Fn(&Float) -> Float,
    node_count: usize,
) -> Result<(SegmentMeasure, Float)> {
    if node_count < MIN_NODES {
        return Err(CoreError::ParameterDomain(format!(
            "node_count {node_count} below the minimum of {MIN_NODES}"
        )));
    }
    let p = ctx.bits();
    let e = segment_e(ctx);
    let k = node_count;
    let angles = chebyshev_angles(ctx, k);
    let nodes: Vec<Float> = angles.iter().map(|t| t.clone().cos()).collect();
    let v_mat = potential_matrix(ctx, &e, k);
    let mut mat: Vec<Vec<Float>> = Vec::with_capacity(k + 1);
    let mut rhs: Vec<Float> = Vec::with_capacity(k + 1);
    for i in 0..k {
        let mut row = v_mat[i].clone();
        row.push(ctx.real(-1));
        mat.push(row);
        rhs.push(-field(&nodes[i]));
    }
    let mut mass_row = vec![Float::with_val(p, 1u32) / Float::with_val(p, k as u32); k];
    mass_row.push(ctx.zero());
    mat.push(mass_row);
    rhs.push(ctx.one());
    let report = solve_dense(ctx, mat, rhs)?;
    let mut values = report.solution;
    let c_val = values.pop().unwrap();
    for v in &values {
        if v.is_sign_negative() && !v.is_zero() {
            return Err(CoreError::NegativeDensity(
                "external-field equilibrium density went negative".into(),
            ));
        }
    }
    Ok((SegmentMeasure::from_values(ctx, e, values)?, c_val))
}

/// Off-segment sample points for the identity checks: a ring around E u F.
pub fn identity_sample_points(ctx: PrecisionContext, count: usize) -> Vec<Complex> {
    let p = ctx.bits();
    let pi = ctx.pi();
    (0..count)
        .map(|k| {
            let ang = Float::with_val(p, 2u32 * &pi) * Float::with_val(p, k as u32)
                / Float::with_val(p, count as u32);
            let (sin, cos) = ang.sin_cos(Float::new(p));
            Complex::new(
                Float::with_val(p, Float::with_val(p, 2.2 * &cos) + 0.4f64),
                Float::with_val(p, 2.2 * &sin),
            )
        })
        .collect()
}

/// Solves both problems and verifies the cross-identities, the constants
/// identity, and the balayage connection.
pub fn solve_equilibrium(
    model: &ModelParams,
    theta: &Float,
    node_count: usize,
) -> Result<EquilibriumSolution> {
    let ctx = model.ctx();
    let p = ctx.bits();
    let e = segment_e(ctx);
    let f = segment_f(model);
    let (lambda_e, c_e, residual_e) = solve_lambda_e(model, theta, node_count)?;
    let (lambda_f, c_f, residual_f) = solve_lambda_f(model, theta, node_count)?;

    // consts: c_F = c_E + theta G^{lambda_E}_F(inf)
    let g_e_inf = green_potential(&lambda_e, &Point::Infinity, &f)?;
    let consts_residual = Float::with_val(
        p,
        &c_f - Float::with_val(p, &c_e + Float::with_val(p, theta * &g_e_inf)),
    )
    .abs();

    // cross identities on a ring of off-segment samples:
    //   theta V^{lF} + G^{lF}_E + theta g_E(z) + (1+theta) G^{lE}_F = c_F
    //   theta V^{lE} + G^{lE}_F + theta g_E(z) + G^{lF}_E          = c_E
    let samples = identity_sample_points(ctx, 20);
    let mut worst = ctx.zero();
    for z in &samples {
        let pt = Point::Finite(z.clone());
        let v_le = log_potential(&lambda_e, z);
        let v_lf = log_potential(&lambda_f, z);
        let g_lf_e = green_potential(&lambda_f, &pt, &e)?;
        let g_le_f = green_potential(&lambda_e, &pt, &f)?;
        let g_e = green_segment(ctx, &pt, &Point::Infinity, &e)?;
        let one_plus = Float::with_val(p, 1u32 + theta);
        let r1 = Float::with_val(
            p,
            Float::with_val(p, theta * &v_lf)
                + &g_lf_e
                + Float::with_val(p, theta * &g_e)
                + Float::with_val(p, &one_plus * &g_le_f)
                - &c_f,
        )
        .abs();
        let r2 = Float::with_val(
            p,
            Float::with_val(p, theta * &v_le)
                + &g_le_f
                + Float::with_val(p, theta * &g_e)
                + &g_lf_e
                - &c_e,
        )
        .abs();
        if r1 > worst {
            worst = r1;
        }
        if r2 > worst {
            worst = r2;
        }
    }
    let identity_tol = ctx.real(1e-7);
    if worst > identity_tol {
        return Err(CoreError::IdentityViolation {
            residual: worst.to_f64(),
            location: "cross-identity ring samples".into(),
        });
    }
    if consts_residual > identity_tol {
        return Err(CoreError::IdentityViolation {
            residual: consts_residual.to_f64(),
            location: "constants identity".into(),
        });
    }

    Ok(EquilibriumSolution {
        theta: theta.clone(),
        lambda_e,
        lambda_f,
        c_e,
        c_f,
        residual_e,
        residual_f,
        identity_residual: worst,
        consts_residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    Pade,
    Hp2,
    Hp3,
}

impl RateKind {
    pub fn label(self) -> &'static str {
        match self {
            RateKind::Pade => "pade",
            RateKind::Hp2 => "hp2",
            RateKind::Hp3 => "hp3",
        }
    }

    /// N as a function of the kind's index per the shared-window rule.
    pub fn big_n(self, index: usize) -> usize {
        match self {
            RateKind::Pade => 2 * index + 1,
            RateKind::Hp2 => 3 * index + 1,
            RateKind::Hp3 => 4 * index + 1,
        }
    }

    /// theta of the equilibrium solution entering this kind's prediction.
    pub fn theta_requirement(self) -> Option<u32> {
        match self {
            RateKind::Pade => None,
            RateKind::Hp2 => Some(3),
            RateKind::Hp3 => Some(1),
        }
    }
}

fn check_prediction_inputs(
    ctx: PrecisionContext,
    kind: RateKind,
    solution: Option<&EquilibriumSolution>,
    z: &Complex,
) -> Result<()> {
    let e = segment_e(ctx);
    let pad = ctx.pow10_neg(ctx.decimal_digits());
    if e.touches(z, &pad) {
        return Err(CoreError::ParameterDomain(format!(
            "prediction point {} lies on the cut",
            z
        )));
    }
    if let Some(required) = kind.theta_requirement() {
        let sol = solution.ok_or_else(|| {
            CoreError::ParameterDomain(format!(
                "{} prediction needs the theta = {required} equilibrium solution",
                kind.label()
            ))
        })?;
        let diff = Float::with_val(ctx.bits(), &sol.theta - Float::with_val(32, required)).abs();
        if diff > ctx.real(1e-12) {
            return Err(CoreError::ParameterDomain(format!(
                "{} prediction needs theta = {required}, got {}",
                kind.label(),
                sol.theta.to_f64()
            )));
        }
    }
    Ok(())
}

/// Per-N slope of the predicted geometric error law at `z`:
/// `-g_E` (pade), `-(1/3) G^{lambda_F(3)}_E - g_E` (hp2),
/// `-(1/2) G^{lambda_F(1)}_E - g_E` (hp3).
pub fn predicted_slope(
    ctx: PrecisionContext,
    kind: RateKind,
    solution: Option<&EquilibriumSolution>,
    z: &Complex,
) -> Result<Float> {
    check_prediction_inputs(ctx, kind, solution, z)?;
    let p = ctx.bits();
    let e = segment_e(ctx);
    let g_e = green_segment(ctx, &Point::Finite(z.clone()), &Point::Infinity, &e)?;
    let slope = match kind {
        RateKind::Pade => -g_e,
        RateKind::Hp2 => {
            let sol = solution.unwrap();
            let g = green_potential(&sol.lambda_f, &Point::Finite(z.clone()), &e)?;
            -Float::with_val(p, &g / &ctx.real(3)) - g_e
        }
        RateKind::Hp3 => {
            let sol = solution.unwrap();
            let g = green_potential(&sol.lambda_f, &Point::Finite(z.clone()), &e)?;
            -Float::with_val(p, &g / &ctx.real(2)) - g_e
        }
    };
    Ok(slope)
}

/// Predicted geometric factor `delta_kind(z) = exp(slope)` in (0,1).
pub fn predicted_rate(
    ctx: PrecisionContext,
    kind: RateKind,
    solution: Option<&EquilibriumSolution>,
    z: &Complex,
) -> Result<Float> {
    Ok(predicted_slope(ctx, kind, solution, z)?.exp())
}

/// Left-minus-right of the monotony inequality
/// `(1+1/t1) G^{lambda_F(t1)}_E(z) > (1+1/t2) G^{lambda_F(t2)}_E(z)`,
/// `1 <= t1 < t2 <= 3`.
pub fn monotony_gap(
    ctx: PrecisionContext,
    sol1: &EquilibriumSolution,
    sol2: &EquilibriumSolution,
    z: &Complex,
) -> Result<Float> {
    let p = ctx.bits();
    let one = ctx.one();
    let t1 = &sol1.theta;
    let t2 = &sol2.theta;
    if !(*t1 >= one) || !(*t2 > *t1) || *t2 > ctx.real(3) {
        return Err(CoreError::ParameterDomain(format!(
            "monotony needs 1 <= theta1 < theta2 <= 3, got {} and {}",
            t1.to_f64(),
            t2.to_f64()
        )));
    }
    let e = segment_e(ctx);
    let g1 = green_potential(&sol1.lambda_f, &Point::Finite(z.clone()), &e)?;
    let g2 = green_potential(&sol2.lambda_f, &Point::Finite(z.clone()), &e)?;
    let w1 = Float::with_val(p, 1u32 + t1.clone().recip());
    let w2 = Float::with_val(p, 1u32 + t2.clone().recip());
    Ok(Float::with_val(p, &w1 * &g1) - Float::with_val(p, &w2 * &g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{balayage_onto_segment, robin_measure};

    fn model() -> ModelParams {
        ModelParams::from_f64(2.0, 3.0, 60).unwrap()
    }

    // frozen on the prototype solve (96 nodes, 50 digits); the solver must
    // reproduce them at practical node counts
    const G_LF3_E_AT_2: &str = "1.88364989209021755182733589749";
    const G_LF1_E_AT_2: &str = "1.87694799686948580625902065856";
    const C_E_3: &str = "5.3530680550774005257";
    const C_E_1: &str = "3.8712010109078909291";

    #[test]
    fn rejects_bad_inputs() {
        let m = model();
        assert!(solve_lambda_e(&m, &m.ctx().real(-0.5), 64).is_err());
        assert!(solve_lambda_e(&m, &m.ctx().real(3), 16).is_err());
    }

    #[test]
    fn lambda_e_solves_and_matches_reference() {
        let m = model();
        let c = m.ctx();
        let (mu, c_e, resid) = solve_lambda_e(&m, &c.real(3), 64).unwrap();
        assert!((mu.mass().to_f64() - 1.0).abs() < 1e-12);
        assert!(resid.to_f64() < SOLVER_TOL);
        assert!(mu.is_nonnegative());
        let expect = c.parse(C_E_3).unwrap();
        assert!(
            Float::with_val(c.bits(), &c_e - &expect).abs() < c.real(1e-10),
            "c_E(3) = {} vs {}",
            c_e.to_f64(),
            expect.to_f64()
        );
    }

    #[test]
    fn lambda_f_solves_and_balayage_consistency() {
        let m = model();
        let c = m.ctx();
        let theta = c.real(3);
        let (lam_e, _, _) = solve_lambda_e(&m, &theta, 64).unwrap();
        let (lam_f, _, _) = solve_lambda_f(&m, &theta, 64).unwrap();
        assert!((lam_f.mass().to_f64() - 1.0).abs() < 1e-12);
        // beta_F(lambda_E) must equal lambda_F
        let swept = balayage_onto_segment(&lam_e, &segment_f(&m)).unwrap();
        let mut sup = 0f64;
        for (a, b) in swept.values().iter().zip(lam_f.values().iter()) {
            sup = sup.max((a.to_f64() - b.to_f64()).abs());
        }
        assert!(sup < 1e-6, "balayage consistency sup-diff {sup}");
    }

    #[test]
    fn predictions_match_reference_values() {
        let m = model();
        let c = m.ctx();
        let sol3 = solve_equilibrium(&m, &c.real(3), 64).unwrap();
        let sol1 = solve_equilibrium(&m, &c.real(1), 64).unwrap();
        let z2 = Complex::from_f64(c, 2.0, 0.0);
        let e = segment_e(c);
        let g3 = green_potential(&sol3.lambda_f, &Point::Finite(z2.clone()), &e).unwrap();
        let g1 = green_potential(&sol1.lambda_f, &Point::Finite(z2.clone()), &e).unwrap();
        let e3 = c.parse(G_LF3_E_AT_2).unwrap();
        let e1 = c.parse(G_LF1_E_AT_2).unwrap();
        assert!(
            Float::with_val(c.bits(), &g3 - &e3).abs() < c.real(1e-10),
            "G(3) {} vs {}",
            g3.to_f64(),
            e3.to_f64()
        );
        assert!(
            Float::with_val(c.bits(), &g1 - &e1).abs() < c.real(1e-10),
            "G(1) {} vs {}",
            g1.to_f64(),
            e1.to_f64()
        );
        let ce1 = c.parse(C_E_1).unwrap();
        assert!(Float::with_val(c.bits(), &sol1.c_e - &ce1).abs() < c.real(1e-10));
    }

    #[test]
    fn node_doubling_stability() {
        let m = model();
        let c = m.ctx();
        let theta = c.real(2);
        let (mu64, ce64, _) = solve_lambda_e(&m, &theta, 64).unwrap();
        let (mu128, ce128, _) = solve_lambda_e(&m, &theta, 128).unwrap();
        assert!(
            (ce64.to_f64() - ce128.to_f64()).abs() < 1e-8,
            "c_E drift {}",
            (ce64.to_f64() - ce128.to_f64()).abs()
        );
        // density sup-diff at shared evaluation points
        let mut sup = 0f64;
        for k in 0..=32 {
            let xi = c.real(-0.99 + 1.98 * k as f64 / 32.0);
            let d = (mu64.density_at_unit(&xi).to_f64() - mu128.density_at_unit(&xi).to_f64()).abs();
            sup = sup.max(d);
        }
        assert!(sup < 1e-6, "density drift {sup}");
    }

    #[test]
    fn positivity_across_theta_range() {
        let m = model();
        let c = m.ctx();
        for theta in [1.0, 1.5, 2.0, 2.5, 3.0] {
            let (mu, _, _) = solve_lambda_e(&m, &c.real(theta), MIN_NODES).unwrap();
            assert!(mu.is_nonnegative(), "negative density at theta {theta}");
            let (mf, _, _) = solve_lambda_f(&m, &c.real(theta), MIN_NODES).unwrap();
            assert!(mf.is_nonnegative());
        }
    }

    #[test]
    fn theta_zero_degenerates_gracefully() {
        let m = model();
        let c = m.ctx();
        let (mu, _, resid) = solve_lambda_e(&m, &c.zero(), 64).unwrap();
        assert!((mu.mass().to_f64() - 1.0).abs() < 1e-12);
        assert!(resid.to_f64() < SOLVER_TOL);
    }

    #[test]
    fn row_scaling_invariance() {
        // scaling the assembled equation by a constant must not move the
        // solution: solve theta V + G = c and (2 theta) V + 2 G = 2c via the
        // same code path by scaling theta and halving... the linear system is
        // scale-invariant only row-wise; verify by direct matrix scaling.
        let m = model();
        let c = m.ctx();
        let e = segment_e(c);
        let f = segment_f(&m);
        let k = MIN_NODES;
        let pieces = assemble(c, &e, &f, k);
        let theta = c.real(3);
        let p = c.bits();
        let build = |scale: f64| -> (Vec<Vec<Float>>, Vec<Float>) {
            let s = c.real(scale);
            let mut mat = Vec::new();
            let mut rhs = Vec::new();
            for i in 0..k {
                let mut row = Vec::new();
                for j in 0..k {
                    let v = Float::with_val(
                        p,
                        Float::with_val(p, Float::with_val(p, &theta + 1u32) * &pieces.v_mat[i][j])
                            + &pieces.h_mat[i][j],
                    );
                    row.push(Float::with_val(p, &v * &s));
                }
                row.push(Float::with_val(p, -1f64 * &s));
                mat.push(row);
                rhs.push(c.zero());
            }
            let mut mass_row = vec![Float::with_val(p, 1u32) / Float::with_val(p, k as u32); k];
            mass_row.push(c.zero());
            mat.push(mass_row);
            rhs.push(c.one());
            (mat, rhs)
        };
        let (m1, r1) = build(1.0);
        let (m2, r2) = build(7.5);
        let s1 = solve_dense(c, m1, r1).unwrap();
        let s2 = solve_dense(c, m2, r2).unwrap();
        for (a, b) in s1.solution.iter().zip(s2.solution.iter()) {
            assert!((a.to_f64() - b.to_f64()).abs() < 1e-20);
        }
    }

    #[test]
    fn solve_equilibrium_identities_hold() {
        let m = model();
        let c = m.ctx();
        let sol = solve_equilibrium(&m, &c.real(3), 64).unwrap();
        assert!(sol.identity_residual.to_f64() < 1e-7);
        assert!(sol.consts_residual.to_f64() < 1e-7);
        // c_E = G^{lE}_F(inf) + theta gamma_E + G^{lF}_E(inf)
        let p = c.bits();
        let e = segment_e(c);
        let f = segment_f(&m);
        let g_ef = green_potential(&sol.lambda_e, &Point::Infinity, &f).unwrap();
        let g_fe = green_potential(&sol.lambda_f, &Point::Infinity, &e).unwrap();
        let gamma_e = c.ln2();
        let expect = Float::with_val(p, &g_ef + Float::with_val(p, 3u32 * &gamma_e)) + &g_fe;
        assert!(
            Float::with_val(p, &sol.c_e - &expect).abs() < c.real(1e-9),
            "constants formula residual"
        );
    }

    #[test]
    fn predicted_rates_ordered_and_in_unit_interval() {
        let m = model();
        let c = m.ctx();
        let sol3 = solve_equilibrium(&m, &c.real(3), 64).unwrap();
        let sol1 = solve_equilibrium(&m, &c.real(1), 64).unwrap();
        for (re, im) in [(2.0, 0.0), (0.3, 0.8), (-1.7, 0.4), (1.46, 0.3)] {
            let z = Complex::from_f64(c, re, im);
            let d1 = predicted_rate(c, RateKind::Pade, None, &z).unwrap().to_f64();
            let d2 = predicted_rate(c, RateKind::Hp2, Some(&sol3), &z)
                .unwrap()
                .to_f64();
            let d3 = predicted_rate(c, RateKind::Hp3, Some(&sol1), &z)
                .unwrap()
                .to_f64();
            assert!(0.0 < d3 && d3 < d2 && d2 < d1 && d1 < 1.0, "ordering at ({re},{im}): {d3} {d2} {d1}");
        }
        // delta_1(2) = 1/(2+sqrt 3)
        let z2 = Complex::from_f64(c, 2.0, 0.0);
        let d1 = predicted_rate(c, RateKind::Pade, None, &z2).unwrap();
        assert!((d1.to_f64() - 1.0 / (2.0 + 3f64.sqrt())).abs() < 1e-15);
        // wrong theta rejected
        assert!(predicted_rate(c, RateKind::Hp2, Some(&sol1), &z2).is_err());
        // deltas approach 1 near the cut
        let near = Complex::from_f64(c, 0.2, 1e-6);
        let d1n = predicted_rate(c, RateKind::Pade, None, &near).unwrap().to_f64();
        assert!(d1n > 0.999);
    }

    #[test]
    fn monotony_gap_positive_and_vanishing_near_cut() {
        let m = model();
        let c = m.ctx();
        let sol1 = solve_equilibrium(&m, &c.real(1), 64).unwrap();
        let sol3 = solve_equilibrium(&m, &c.real(3), 64).unwrap();
        let gap = monotony_gap(c, &sol1, &sol3, &Complex::from_f64(c, 2.0, 0.0)).unwrap();
        assert!(gap.to_f64() > 0.0);
        // Corollary 1 combination at z = 2
        let e = segment_e(c);
        let g1 = green_potential(&sol1.lambda_f, &Point::Finite(Complex::from_f64(c, 2.0, 0.0)), &e)
            .unwrap();
        let g3 = green_potential(&sol3.lambda_f, &Point::Finite(Complex::from_f64(c, 2.0, 0.0)), &e)
            .unwrap();
        assert!(g1.to_f64() > 2.0 / 3.0 * g3.to_f64());
        let near = monotony_gap(c, &sol1, &sol3, &Complex::from_f64(c, 0.1, 1e-7)).unwrap();
        assert!(near.to_f64().abs() < 1e-4);
        // equal thetas rejected
        assert!(monotony_gap(c, &sol1, &sol1, &Complex::from_f64(c, 2.0, 0.0)).is_err());
    }

    #[test]
    fn corollary5_mixture_law() {
        // field psi = -t V^{tau_F}: solution is (1-t) tau_E + t beta_E(tau_F)
        let m = model();
        let c = m.ctx();
        let p = c.bits();
        let e = segment_e(c);
        let f = segment_f(&m);
        let (tau_f, _) = robin_measure(c, &f, 96).unwrap();
        let swept = balayage_onto_segment(&tau_f, &e).unwrap();
        let (tau_e, _) = robin_measure(c, &e, 96).unwrap();
        for t in [0.25, 0.5] {
            let tv = c.real(t);
            let field = {
                let tau_f = tau_f.clone();
                move |x: &Float| -> Float {
                    let v = log_potential(&tau_f, &Complex::from_real(x.clone()));
                    -Float::with_val(p, &tv * &v)
                }
            };
            let (lam, _) = solve_external_field(c, &field, 96).unwrap();
            let mix = SegmentMeasure::mix(&[
                (c.real(1.0 - t), &tau_e),
                (c.real(t), &swept),
            ])
            .unwrap();
            let mut sup = 0f64;
            for (a, b) in lam.values().iter().zip(mix.values().iter()) {
                sup = sup.max((a.to_f64() - b.to_f64()).abs());
            }
            assert!(sup < 1e-6, "mixture law sup-diff {sup} at t = {t}");
        }
    }
}
