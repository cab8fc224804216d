//! Linear-system construction of Pade and type I/II Hermite-Pade polynomials
//! from Laurent coefficients, plus discriminants and remainder-order checks.

use rug::Float;

use crate::complex::Complex;
use crate::error::{CoreError, Result};
use crate::linalg::solve_dense;
use crate::poly::Polynomial;
use crate::precision::PrecisionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    Pade,
    Type2Pair,
    Type2Triple,
    Type1Pair,
    Type1Triple,
}

impl SystemKind {
    pub fn label(self) -> &'static str {
        match self {
            SystemKind::Pade => "pade",
            SystemKind::Type2Pair => "type2_pair",
            SystemKind::Type2Triple => "type2_triple",
            SystemKind::Type1Pair => "type1_pair",
            SystemKind::Type1Triple => "type1_triple",
        }
    }

    /// Laurent coefficient count N each kind consumes at index t.
    pub fn window(self, index: usize) -> usize {
        match self {
            SystemKind::Pade => 2 * index + 1,
            SystemKind::Type2Pair => 3 * index + 1,
            SystemKind::Type2Triple => 4 * index + 1,
            SystemKind::Type1Pair => 3 * index + 2,
            SystemKind::Type1Triple => 4 * index + 3,
        }
    }
}

/// Verified vanishing order of the remainder Laurent tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemainderOrder {
    /// First nonvanishing tail coefficient sits at z^{-k}: order exactly k.
    Exact(usize),
    /// Every checkable tail coefficient vanishes; the window ended at k.
    /// For exactly rational inputs this is the plus-infinity sentinel.
    AtLeast(usize),
}

impl RemainderOrder {
    pub fn meets(self, required: usize) -> bool {
        match self {
            RemainderOrder::Exact(k) => k >= required,
            RemainderOrder::AtLeast(k) => k >= required,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HpSolution {
    pub kind: SystemKind,
    pub index: usize,
    /// N from the congruence rule of the kind.
    pub big_n: usize,
    /// `[Q, P]`, `[Q, P1, P2]`, `[Q, P1, P2, P3]`, `[Q0, Q1, Q2]`, or
    /// `[Q0..Q3]` depending on the kind.
    pub polys: Vec<Polynomial>,
    /// Verified order of the worst remainder, from coefficients beyond the
    /// defining window when available.
    pub residual_order: RemainderOrder,
    pub condition_estimate: Float,
    pub rank_defect: usize,
}

impl HpSolution {
    pub fn denominator(&self) -> &Polynomial {
        &self.polys[0]
    }

    /// P1/Q at `z` for the approximant kinds.
    pub fn eval_rational(&self, ctx: PrecisionContext, z: &Complex) -> Result<Complex> {
        match self.kind {
            SystemKind::Pade | SystemKind::Type2Pair | SystemKind::Type2Triple => {}
            _ => {
                return Err(CoreError::KindMismatch(format!(
                    "{} has no rational approximant",
                    self.kind.label()
                )))
            }
        }
        let q = &self.polys[0];
        let p1 = &self.polys[1];
        let qv = q.eval_complex(z);
        let guard = {
            let t = ctx.pow10_neg(ctx.decimal_digits() / 2);
            Float::with_val(ctx.bits(), &t * &q.norm_l1())
        };
        if qv.abs() < guard {
            return Err(CoreError::PoleProximity(format!(
                "|Q({})| = {:.3e}",
                z,
                qv.abs().to_f64()
            )));
        }
        Ok(p1.eval_complex(z).div(&qv))
    }
}

fn ensure_len(cs: &[Float], needed: usize) -> Result<()> {
    if cs.len() < needed {
        return Err(CoreError::InsufficientCoefficients {
            needed,
            available: cs.len(),
        });
    }
    Ok(())
}

/// Polynomial part of `Q(z) * sum c_k z^{-k}` up to degree `deg`:
/// coefficient of `z^i` is `sum_{j >= i} q_j c_{j-i}`.
fn polynomial_part(ctx: PrecisionContext, q: &[Float], cs: &[Float], deg: usize) -> Polynomial {
    let p = ctx.bits();
    let coeffs: Vec<Float> = (0..=deg)
        .map(|i| {
            let mut acc = Float::new(p);
            for (j, qj) in q.iter().enumerate().skip(i) {
                acc += Float::with_val(p, qj * &cs[j - i]);
            }
            acc
        })
        .collect();
    Polynomial::new(coeffs)
}

/// Tail coefficient of `Q f^pow - P` at `z^{-t}` (t >= 1): `sum_j q_j c_{j+t}`,
/// together with the magnitude scale `sum_j |q_j| |c_{j+t}|`.
fn tail_coefficient(ctx: PrecisionContext, q: &[Float], cs: &[Float], t: usize) -> Option<(Float, Float)> {
    let p = ctx.bits();
    if q.len() - 1 + t >= cs.len() {
        return None;
    }
    let mut acc = Float::new(p);
    let mut scale = Float::new(p);
    for (j, qj) in q.iter().enumerate() {
        acc += Float::with_val(p, qj * &cs[j + t]);
        scale += Float::with_val(p, qj.clone().abs() * cs[j + t].clone().abs());
    }
    Some((acc, scale))
}

/// Condensed type II solve shared by all approximant kinds: monic Q of degree
/// `deg`, remainder conditions `p = 1..=index` per coefficient row set.
fn solve_type2_core(
    ctx: PrecisionContext,
    kind: SystemKind,
    index: usize,
    rows: &[&[Float]],
) -> Result<HpSolution> {
    let deg = rows.len() * index; // 1*n, 2*m, or 3*l
    let p = ctx.bits();
    if index == 0 {
        // constant approximant: Q = 1, P_i = c^{(i)}_0
        let q = Polynomial::new(vec![ctx.one()]);
        let mut polys = vec![q];
        for cs in rows {
            polys.push(Polynomial::new(vec![cs[0].clone()]));
        }
        return verify_and_pack(ctx, kind, index, polys, ctx.one(), 0, rows);
    }
    let mut mat: Vec<Vec<Float>> = Vec::with_capacity(deg);
    let mut rhs: Vec<Float> = Vec::with_capacity(deg);
    for cs in rows {
        for t in 1..=index {
            let mut row = Vec::with_capacity(deg);
            for j in 0..deg {
                row.push(cs[j + t].clone());
            }
            mat.push(row);
            rhs.push(-Float::with_val(p, &cs[deg + t] * 1u32));
        }
    }
    let report = solve_dense(ctx, mat, rhs)?;
    let mut q_coeffs = report.solution;
    q_coeffs.push(ctx.one()); // monic
    let q = Polynomial::new(q_coeffs);
    let mut polys = vec![q.clone()];
    for cs in rows {
        polys.push(polynomial_part(ctx, q.coeffs(), cs, deg));
    }
    verify_and_pack(
        ctx,
        kind,
        index,
        polys,
        report.condition_estimate,
        report.rank_defect,
        rows,
    )
}

fn verify_and_pack(
    ctx: PrecisionContext,
    kind: SystemKind,
    index: usize,
    polys: Vec<Polynomial>,
    condition_estimate: Float,
    rank_defect: usize,
    rows: &[&[Float]],
) -> Result<HpSolution> {
    // precision-exhaustion gate: condition * 10^{-digits} must stay below 1e-20
    let cond_loss = Float::with_val(
        ctx.bits(),
        &condition_estimate * &ctx.pow10_neg(ctx.decimal_digits()),
    );
    if cond_loss > ctx.real(1e-20) {
        return Err(CoreError::PrecisionExhausted(format!(
            "{} index {index}: condition estimate {:.3e} too large for {} digits",
            kind.label(),
            condition_estimate.to_f64(),
            ctx.decimal_digits()
        )));
    }
    let q = polys[0].coeffs().to_vec();
    let vanish_tol = ctx.pow10_neg(ctx.decimal_digits() / 2);
    let mut order = RemainderOrder::AtLeast(usize::MAX);
    for cs in rows {
        let mut t = 1usize;
        let this = loop {
            match tail_coefficient(ctx, &q, cs, t) {
                None => break RemainderOrder::AtLeast(t),
                Some((val, scale)) => {
                    let gate = Float::with_val(ctx.bits(), &vanish_tol * &scale.max(&ctx.one()));
                    if val.clone().abs() > gate {
                        break RemainderOrder::Exact(t);
                    }
                }
            }
            t += 1;
        };
        order = match (order, this) {
            (RemainderOrder::AtLeast(a), RemainderOrder::AtLeast(b)) => {
                RemainderOrder::AtLeast(a.min(b))
            }
            (RemainderOrder::Exact(a), RemainderOrder::AtLeast(_))
            | (RemainderOrder::AtLeast(_), RemainderOrder::Exact(a)) => RemainderOrder::Exact(a),
            (RemainderOrder::Exact(a), RemainderOrder::Exact(b)) => RemainderOrder::Exact(a.min(b)),
        };
    }
    let required = index + 1;
    if !order.meets(required) {
        return Err(CoreError::NonConvergence(format!(
            "{} index {index}: verified remainder order {:?} below required {required}",
            kind.label(),
            order
        )));
    }
    Ok(HpSolution {
        kind,
        index,
        big_n: kind.window(index),
        polys,
        residual_order: order,
        condition_estimate,
        rank_defect,
    })
}

/// Diagonal Pade denominator/numerator: monic Q, ord(Qf - P) >= n+1.
pub fn pade(ctx: PrecisionContext, coeffs: &[Float], n: usize) -> Result<HpSolution> {
    ensure_len(coeffs, 2 * n + 1)?;
    solve_type2_core(ctx, SystemKind::Pade, n, &[coeffs])
}

/// Type II pair/triple: common monic denominator Q of degree 2m (resp. 3l),
/// all remainders of order >= m+1 (resp. l+1).
pub fn hp_type2(
    ctx: PrecisionContext,
    coeffs_f: &[Float],
    coeffs_f2: &[Float],
    coeffs_f3: Option<&[Float]>,
    order: u8,
    index: usize,
) -> Result<HpSolution> {
    match order {
        2 => {
            ensure_len(coeffs_f, 3 * index + 1)?;
            ensure_len(coeffs_f2, 3 * index + 1)?;
            solve_type2_core(ctx, SystemKind::Type2Pair, index, &[coeffs_f, coeffs_f2])
        }
        3 => {
            let f3 = coeffs_f3.ok_or_else(|| {
                CoreError::ParameterDomain("order 3 needs the f^3 coefficients".into())
            })?;
            ensure_len(coeffs_f, 4 * index + 1)?;
            ensure_len(coeffs_f2, 4 * index + 1)?;
            ensure_len(f3, 4 * index + 1)?;
            solve_type2_core(
                ctx,
                SystemKind::Type2Triple,
                index,
                &[coeffs_f, coeffs_f2, f3],
            )
        }
        _ => Err(CoreError::ParameterDomain(format!(
            "type II order must be 2 or 3, got {order}"
        ))),
    }
}

/// Laurent coefficient of `z^w` in `sum_j Q_j f^j` where `powers[j]` are the
/// coefficients of `f^j` (powers[0] = [1, 0, 0, ...]).
fn combination_coefficient(
    ctx: PrecisionContext,
    tuple: &[Vec<Float>],
    powers: &[Vec<Float>],
    w: i64,
) -> (Float, Float) {
    let p = ctx.bits();
    let mut acc = Float::new(p);
    let mut scale = Float::new(p);
    for (qs, cs) in tuple.iter().zip(powers.iter()) {
        for (i, qi) in qs.iter().enumerate() {
            let idx = i as i64 - w;
            if idx >= 0 && (idx as usize) < cs.len() {
                acc += Float::with_val(p, qi * &cs[idx as usize]);
                scale += Float::with_val(p, qi.clone().abs() * cs[idx as usize].clone().abs());
            }
        }
    }
    (acc, scale)
}

/// Type I pair/triple: polynomials `Q_0..Q_order` of degree <= index whose
/// combination with `(1, f, .., f^order)` vanishes to order
/// `(order)(index)+order` + index + 1 - 1 at infinity. Normalization: highest
/// polynomial's first nonzero leading coefficient set to 1, retrying lower
/// coefficients on rank defect.
pub fn hp_type1(
    ctx: PrecisionContext,
    coeffs_f: &[Float],
    coeffs_f2: &[Float],
    coeffs_f3: Option<&[Float]>,
    order: u8,
    index: usize,
) -> Result<HpSolution> {
    let (kind, rows): (SystemKind, Vec<&[Float]>) = match order {
        2 => (SystemKind::Type1Pair, vec![coeffs_f, coeffs_f2]),
        3 => {
            let f3 = coeffs_f3.ok_or_else(|| {
                CoreError::ParameterDomain("order 3 needs the f^3 coefficients".into())
            })?;
            (SystemKind::Type1Triple, vec![coeffs_f, coeffs_f2, f3])
        }
        _ => {
            return Err(CoreError::ParameterDomain(format!(
                "type I order must be 2 or 3, got {order}"
            )))
        }
    };
    let window = kind.window(index);
    for cs in &rows {
        ensure_len(cs, window)?;
    }
    let p = ctx.bits();
    let o = order as usize;
    let t = index;
    // powers[0] = coefficients of f^0 = 1
    let mut powers: Vec<Vec<Float>> = Vec::with_capacity(o + 1);
    let mut unit = vec![ctx.zero(); rows[0].len()];
    unit[0] = ctx.one();
    powers.push(unit);
    for cs in &rows {
        powers.push(cs.to_vec());
    }
    // conditions: coefficient of z^w vanishes for w = t down to -(o*t + o - 1)
    let w_lo = -((o * t + o - 1) as i64);
    let n_cond = (t as i64 - w_lo + 1) as usize; // (o+1)t + o
    let n_unknown = (o + 1) * (t + 1);
    debug_assert_eq!(n_cond + 1, n_unknown);

    // try normalizations: fix q_{o, t - shift} = 1
    let mut last_err: Option<CoreError> = None;
    for shift in 0..=t {
        let pinned = (o, t - shift);
        let mut mat: Vec<Vec<Float>> = Vec::with_capacity(n_cond);
        let mut rhs: Vec<Float> = Vec::with_capacity(n_cond);
        for wi in 0..n_cond {
            let w = t as i64 - wi as i64;
            let mut row = Vec::with_capacity(n_cond);
            let mut pinned_val = Float::new(p);
            for j in 0..=o {
                for i in 0..=t {
                    let idx = i as i64 - w;
                    let entry = if idx >= 0 && (idx as usize) < powers[j].len() {
                        powers[j][idx as usize].clone()
                    } else {
                        ctx.zero()
                    };
                    if (j, i) == pinned {
                        pinned_val = entry;
                    } else {
                        row.push(entry);
                    }
                }
            }
            mat.push(row);
            rhs.push(-pinned_val);
        }
        match solve_dense(ctx, mat, rhs) {
            Ok(report) if report.rank_defect == 0 => {
                let mut tuple: Vec<Vec<Float>> = Vec::with_capacity(o + 1);
                let mut cursor = report.solution.into_iter();
                for j in 0..=o {
                    let mut qs = Vec::with_capacity(t + 1);
                    for i in 0..=t {
                        if (j, i) == pinned {
                            qs.push(ctx.one());
                        } else {
                            qs.push(cursor.next().unwrap());
                        }
                    }
                    tuple.push(qs);
                }
                // verify the combination's tail beyond the defining window
                let vanish_tol = ctx.pow10_neg(ctx.decimal_digits() / 2);
                let defining = o * t + o; // O(z^{-(ot+o)}): first required zero set ends here
                let mut order_found = RemainderOrder::AtLeast((rows[0].len() - t) as usize);
                let mut w = w_lo - 1;
                loop {
                    let reach = (-w) as usize + t;
                    if reach >= rows[0].len() {
                        order_found = RemainderOrder::AtLeast((-w) as usize);
                        break;
                    }
                    let (val, scale) = combination_coefficient(ctx, &tuple, &powers, w);
                    let gate = Float::with_val(p, &vanish_tol * &scale.max(&ctx.one()));
                    if val.clone().abs() > gate {
                        order_found = RemainderOrder::Exact((-w) as usize);
                        break;
                    }
                    w -= 1;
                }
                if !order_found.meets(defining) {
                    return Err(CoreError::NonConvergence(format!(
                        "{} index {index}: verified combination order {:?} below required {defining}",
                        kind.label(),
                        order_found
                    )));
                }
                let polys = tuple.into_iter().map(Polynomial::new).collect();
                return Ok(HpSolution {
                    kind,
                    index,
                    big_n: window,
                    polys,
                    residual_order: order_found,
                    condition_estimate: report.condition_estimate,
                    rank_defect: if shift == 0 { 0 } else { shift },
                });
            }
            Ok(report) => {
                last_err = Some(CoreError::RankDeficient {
                    defect: report.rank_defect,
                    context: format!(
                        "{} index {index} with leading coefficient {} pinned",
                        kind.label(),
                        t - shift
                    ),
                });
            }
            Err(e) => {
                last_err = Some(e);
            }
        }
    }
    Err(last_err.unwrap_or_else(|| {
        CoreError::RankDeficient {
            defect: 0,
            context: format!("{} index {index}: no admissible normalization", kind.label()),
        }
    }))
}

/// Discriminant polynomial of the type I tuple: quadratic
/// `Q1^2 - 4 Q0 Q2`, or cubic
/// `18 Q3 Q2 Q1 Q0 - 4 Q2^3 Q0 + Q2^2 Q1^2 - 4 Q3 Q1^3 - 27 Q3^2 Q0^2`.
pub fn discriminant(ctx: PrecisionContext, sol: &HpSolution) -> Result<Polynomial> {
    match sol.kind {
        SystemKind::Type1Pair => {
            let q0 = &sol.polys[0];
            let q1 = &sol.polys[1];
            let q2 = &sol.polys[2];
            let four = ctx.real(4);
            Ok(q1.mul(q1).sub(&q0.mul(q2).scale(&four)))
        }
        SystemKind::Type1Triple => {
            let q0 = &sol.polys[0];
            let q1 = &sol.polys[1];
            let q2 = &sol.polys[2];
            let q3 = &sol.polys[3];
            let t1 = q3.mul(q2).mul(q1).mul(q0).scale(&ctx.real(18));
            let t2 = q2.mul(q2).mul(q2).mul(q0).scale(&ctx.real(4));
            let t3 = q2.mul(q2).mul(&q1.mul(q1));
            let t4 = q3.mul(q1).mul(q1).mul(q1).scale(&ctx.real(4));
            let t5 = q3.mul(q3).mul(&q0.mul(q0)).scale(&ctx.real(27));
            Ok(t1.sub(&t2).add(&t3).sub(&t4).sub(&t5))
        }
        _ => Err(CoreError::KindMismatch(format!(
            "discriminant needs a type I tuple, got {}",
            sol.kind.label()
        ))),
    }
}

/// Recomputes the verified remainder order of a solution against coefficient
/// windows, preferring windows longer than the solve used.
pub fn remainder_order(
    ctx: PrecisionContext,
    sol: &HpSolution,
    coeffs_f: &[Float],
    coeffs_f2: Option<&[Float]>,
    coeffs_f3: Option<&[Float]>,
) -> Result<RemainderOrder> {
    let vanish_tol = ctx.pow10_neg(ctx.decimal_digits() / 2);
    let p = ctx.bits();
    match sol.kind {
        SystemKind::Pade | SystemKind::Type2Pair | SystemKind::Type2Triple => {
            let mut rows: Vec<&[Float]> = vec![coeffs_f];
            if matches!(sol.kind, SystemKind::Type2Pair | SystemKind::Type2Triple) {
                rows.push(coeffs_f2.ok_or_else(|| CoreError::InsufficientCoefficients {
                    needed: sol.big_n,
                    available: 0,
                })?);
            }
            if matches!(sol.kind, SystemKind::Type2Triple) {
                rows.push(coeffs_f3.ok_or_else(|| CoreError::InsufficientCoefficients {
                    needed: sol.big_n,
                    available: 0,
                })?);
            }
            let q = sol.polys[0].coeffs();
            let deg = sol.polys[0].degree();
            let mut order = RemainderOrder::AtLeast(usize::MAX);
            for cs in rows {
                if cs.len() <= deg + 1 {
                    return Err(CoreError::InsufficientCoefficients {
                        needed: deg + 2,
                        available: cs.len(),
                    });
                }
                let mut t = 1usize;
                let this = loop {
                    match tail_coefficient(ctx, q, cs, t) {
                        None => break RemainderOrder::AtLeast(t),
                        Some((val, scale)) => {
                            let gate =
                                Float::with_val(p, &vanish_tol * &scale.max(&ctx.one()));
                            if val.clone().abs() > gate {
                                break RemainderOrder::Exact(t);
                            }
                        }
                    }
                    t += 1;
                };
                order = match (order, this) {
                    (RemainderOrder::AtLeast(a), RemainderOrder::AtLeast(b)) => {
                        RemainderOrder::AtLeast(a.min(b))
                    }
                    (RemainderOrder::Exact(a), RemainderOrder::AtLeast(_))
                    | (RemainderOrder::AtLeast(_), RemainderOrder::Exact(a)) => {
                        RemainderOrder::Exact(a)
                    }
                    (RemainderOrder::Exact(a), RemainderOrder::Exact(b)) => {
                        RemainderOrder::Exact(a.min(b))
                    }
                };
            }
            Ok(order)
        }
        SystemKind::Type1Pair | SystemKind::Type1Triple => {
            let o = if sol.kind == SystemKind::Type1Pair { 2 } else { 3 };
            let f2 = coeffs_f2.ok_or_else(|| CoreError::InsufficientCoefficients {
                needed: sol.big_n,
                available: 0,
            })?;
            let mut powers: Vec<Vec<Float>> = Vec::new();
            let mut unit = vec![ctx.zero(); coeffs_f.len()];
            unit[0] = ctx.one();
            powers.push(unit);
            powers.push(coeffs_f.to_vec());
            powers.push(f2.to_vec());
            if o == 3 {
                let f3 = coeffs_f3.ok_or_else(|| CoreError::InsufficientCoefficients {
                    needed: sol.big_n,
                    available: 0,
                })?;
                powers.push(f3.to_vec());
            }
            let tuple: Vec<Vec<Float>> = sol.polys.iter().map(|q| q.coeffs().to_vec()).collect();
            let t = sol.index;
            let mut w = -1i64;
            loop {
                let reach = (-w) as usize + t;
                if reach >= coeffs_f.len() {
                    return Ok(RemainderOrder::AtLeast((-w) as usize));
                }
                let (val, scale) = combination_coefficient(ctx, &tuple, &powers, w);
                let gate = Float::with_val(p, &vanish_tol * &scale.max(&ctx.one()));
                if val.clone().abs() > gate {
                    return Ok(RemainderOrder::Exact((-w) as usize));
                }
                w -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::poly::poly_roots;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(100).unwrap()
    }

    /// Laurent coefficients of 1/(z-2): c_0 = 0, c_k = 2^{k-1}.
    fn rational_coeffs(c: PrecisionContext, n: usize) -> Vec<Float> {
        let mut cs = vec![c.zero()];
        let mut pw = c.one();
        for _ in 1..n {
            cs.push(pw.clone());
            pw *= 2u32;
        }
        cs
    }

    #[test]
    fn pade_reproduces_rational_function() {
        let c = ctx();
        let cs = rational_coeffs(c, 12);
        let sol = pade(c, &cs, 1).unwrap();
        // Q = z - 2, P = 1
        assert_eq!(sol.denominator().degree(), 1);
        assert!((sol.denominator().coeffs()[0].to_f64() + 2.0).abs() < 1e-90);
        assert!((sol.denominator().coeffs()[1].to_f64() - 1.0).abs() < 1e-90);
        assert_eq!(sol.polys[1].degree(), 0);
        assert!((sol.polys[1].coeffs()[0].to_f64() - 1.0).abs() < 1e-90);
        // exact case: the verified order hits the window end (infinity sentinel)
        assert!(matches!(sol.residual_order, RemainderOrder::AtLeast(_)));
    }

    #[test]
    fn pade_constant_case() {
        let c = ctx();
        let m = ModelParams::from_f64(2.0, 3.0, 100).unwrap();
        let cs = m.laurent_coeffs(9).unwrap();
        let sol = pade(c, &cs, 0).unwrap();
        assert_eq!(sol.denominator().degree(), 0);
        assert_eq!(sol.polys[1].coeffs()[0], cs[0]);
    }

    #[test]
    fn pade_insufficient_coeffs_rejected() {
        let c = ctx();
        let cs = rational_coeffs(c, 5);
        assert!(matches!(
            pade(c, &cs, 3),
            Err(CoreError::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn pade_denominator_roots_inside_cut_and_simple() {
        let m = ModelParams::from_f64(2.0, 3.0, 120).unwrap();
        let c = m.ctx();
        let cs = m.laurent_coeffs(2 * 10 + 4).unwrap();
        let sol = pade(c, &cs, 10).unwrap();
        assert_eq!(sol.denominator().degree(), 10);
        // generic order is exactly n+1: no accidental extra interpolation
        assert_eq!(sol.residual_order, RemainderOrder::Exact(11));
        let zs = poly_roots(c, sol.denominator()).unwrap();
        let reals = zs.real_roots(&c.pow10_neg(25));
        assert_eq!(reals.len(), 10, "all roots real");
        for r in &reals {
            assert!(r.clone().abs() < 1u32, "root {} outside (-1,1)", r.to_f64());
        }
        assert!(zs.min_separation().to_f64() > 1e-6, "roots simple");
    }

    #[test]
    fn hp2_pair_defining_relations_and_roots() {
        let m = ModelParams::from_f64(2.0, 3.0, 120).unwrap();
        let c = m.ctx();
        let mm = 4;
        let n = 3 * mm + 6;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let sol = hp_type2(c, &cs, &ds, None, 2, mm).unwrap();
        assert_eq!(sol.kind, SystemKind::Type2Pair);
        assert_eq!(sol.denominator().degree(), 2 * mm);
        assert!(sol.residual_order.meets(mm + 1));
        let zs = poly_roots(c, sol.denominator()).unwrap();
        let reals = zs.real_roots(&c.pow10_neg(25));
        assert_eq!(reals.len(), 2 * mm);
        for r in &reals {
            assert!(r.clone().abs() < 1u32);
        }
        // remainder_order agrees with the packed order
        let ro = remainder_order(c, &sol, &cs, Some(&ds), None).unwrap();
        assert_eq!(ro, sol.residual_order);
    }

    #[test]
    fn hp3_triple_defining_relations_and_roots() {
        let m = ModelParams::from_f64(2.0, 3.0, 120).unwrap();
        let c = m.ctx();
        let l = 2;
        let n = 4 * l + 6;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let es = m.laurent_coeffs_power(n, 3).unwrap();
        let sol = hp_type2(c, &cs, &ds, Some(&es), 3, l).unwrap();
        assert_eq!(sol.denominator().degree(), 3 * l);
        assert!(sol.residual_order.meets(l + 1));
        let zs = poly_roots(c, sol.denominator()).unwrap();
        let reals = zs.real_roots(&c.pow10_neg(25));
        assert_eq!(reals.len(), 3 * l);
        for r in &reals {
            assert!(r.clone().abs() < 1u32);
        }
        assert!(zs.min_separation().to_f64() > 1e-6);
    }

    #[test]
    fn type1_pair_minimal_case_and_scaling() {
        let m = ModelParams::from_f64(2.0, 3.0, 100).unwrap();
        let c = m.ctx();
        // m = 0: Q0 + Q1 f + Q2 f^2 = O(z^-2), constants
        let n = 8;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let sol = hp_type1(c, &cs, &ds, None, 2, 0).unwrap();
        assert_eq!(sol.polys.len(), 3);
        for q in &sol.polys {
            assert_eq!(q.degree(), 0);
        }
        // brute-force check of the two defining equations
        let p = c.bits();
        let q0 = &sol.polys[0].coeffs()[0];
        let q1 = &sol.polys[1].coeffs()[0];
        let q2 = &sol.polys[2].coeffs()[0];
        let e0 = Float::with_val(p, q0 + Float::with_val(p, q1 * &cs[0])) + Float::with_val(p, q2 * &ds[0]);
        let e1 = Float::with_val(p, Float::with_val(p, q1 * &cs[1]) + Float::with_val(p, q2 * &ds[1]));
        assert!(e0.abs() < c.pow10_neg(80));
        assert!(e1.abs() < c.pow10_neg(80));
        // scaling invariance: the tuple scaled by 3 satisfies the same relations
        let scaled: Vec<Vec<Float>> = sol
            .polys
            .iter()
            .map(|q| q.scale(&c.real(3)).coeffs().to_vec())
            .collect();
        let mut powers: Vec<Vec<Float>> = Vec::new();
        let mut unit = vec![c.zero(); cs.len()];
        unit[0] = c.one();
        powers.push(unit);
        powers.push(cs.clone());
        powers.push(ds.clone());
        let (v, s) = super::combination_coefficient(c, &scaled, &powers, -1);
        assert!(v.abs() < Float::with_val(p, &c.pow10_neg(60) * &s.max(&c.one())));
    }

    #[test]
    fn type1_residual_window_verified() {
        let m = ModelParams::from_f64(2.0, 3.0, 140).unwrap();
        let c = m.ctx();
        let t = 3;
        let n = 3 * t + 10;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let sol = hp_type1(c, &cs, &ds, None, 2, t).unwrap();
        // defining order is 2t+2
        assert!(sol.residual_order.meets(2 * t + 2));
        let ro = remainder_order(c, &sol, &cs, Some(&ds), None).unwrap();
        assert_eq!(ro, sol.residual_order);
        // generic: exactly 2t+2
        assert_eq!(ro, RemainderOrder::Exact(2 * t + 2));
    }

    #[test]
    fn type1_triple_minimal() {
        let m = ModelParams::from_f64(2.0, 3.0, 140).unwrap();
        let c = m.ctx();
        let t = 1;
        let n = 4 * t + 9;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let es = m.laurent_coeffs_power(n, 3).unwrap();
        let sol = hp_type1(c, &cs, &ds, Some(&es), 3, t).unwrap();
        assert_eq!(sol.polys.len(), 4);
        assert!(sol.residual_order.meets(3 * t + 3));
    }

    #[test]
    fn discriminant_formula_cases() {
        let c = ctx();
        // type1 pair with Q0 = Q2 = 0, Q1 = 1: D = 1
        let sol = HpSolution {
            kind: SystemKind::Type1Pair,
            index: 0,
            big_n: 2,
            polys: vec![
                Polynomial::zero(c),
                Polynomial::constant(c.one()),
                Polynomial::zero(c),
            ],
            residual_order: RemainderOrder::AtLeast(2),
            condition_estimate: c.one(),
            rank_defect: 0,
        };
        let d = discriminant(c, &sol).unwrap();
        assert_eq!(d.degree(), 0);
        assert!((d.coeffs()[0].to_f64() - 1.0).abs() < 1e-90);
        // type1 triple with Q3 = 1, rest 0: D = 0
        let sol3 = HpSolution {
            kind: SystemKind::Type1Triple,
            index: 0,
            big_n: 3,
            polys: vec![
                Polynomial::zero(c),
                Polynomial::zero(c),
                Polynomial::zero(c),
                Polynomial::constant(c.one()),
            ],
            residual_order: RemainderOrder::AtLeast(2),
            condition_estimate: c.one(),
            rank_defect: 0,
        };
        let d3 = discriminant(c, &sol3).unwrap();
        assert!(d3.is_zero());
        // kind mismatch
        let bad = HpSolution {
            kind: SystemKind::Pade,
            index: 0,
            big_n: 1,
            polys: vec![Polynomial::constant(c.one()), Polynomial::zero(c)],
            residual_order: RemainderOrder::AtLeast(2),
            condition_estimate: c.one(),
            rank_defect: 0,
        };
        assert!(matches!(
            discriminant(c, &bad),
            Err(CoreError::KindMismatch(_))
        ));
    }

    #[test]
    fn brute_force_equivalence_small_indices() {
        // production condensed solves match an independent full-system null
        // vector for every kind at small index
        let m = ModelParams::from_f64(2.0, 3.0, 120).unwrap();
        let c = m.ctx();
        let n = 24;
        let cs = m.laurent_coeffs(n).unwrap();
        let ds = m.laurent_coeffs_power(n, 2).unwrap();
        let es = m.laurent_coeffs_power(n, 3).unwrap();
        let tol = c.pow10_neg(60);
        for idx in 1..=3usize {
            let sol = pade(c, &cs, idx).unwrap();
            let oracle = crate::oracle::hp_full_system(c, &[&cs], SystemKind::Pade, idx).unwrap();
            compare_polys(&sol.polys, &oracle, &tol);
            let sol = hp_type2(c, &cs, &ds, None, 2, idx).unwrap();
            let oracle =
                crate::oracle::hp_full_system(c, &[&cs, &ds], SystemKind::Type2Pair, idx).unwrap();
            compare_polys(&sol.polys, &oracle, &tol);
            let sol = hp_type2(c, &cs, &ds, Some(&es), 3, idx).unwrap();
            let oracle =
                crate::oracle::hp_full_system(c, &[&cs, &ds, &es], SystemKind::Type2Triple, idx)
                    .unwrap();
            compare_polys(&sol.polys, &oracle, &tol);
        }
    }

    fn compare_polys(a: &[Polynomial], b: &[Polynomial], tol: &Float) {
        assert_eq!(a.len(), b.len());
        for (pa, pb) in a.iter().zip(b.iter()) {
            assert_eq!(pa.degree(), pb.degree(), "degree mismatch");
            for (ca, cb) in pa.coeffs().iter().zip(pb.coeffs().iter()) {
                let d = Float::with_val(tol.prec(), ca - cb).abs();
                assert!(d < *tol, "coefficient differs by {:.3e}", d.to_f64());
            }
        }
    }
}
