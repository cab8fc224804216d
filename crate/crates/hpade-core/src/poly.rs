//! Dense polynomials over arbitrary-precision reals, plus a simultaneous
//! (Aberth-Ehrlich) root finder used for zero-counting measures.

use rug::ops::Pow;
use rug::Float;

use crate::complex::Complex;
use crate::error::{CoreError, Result};
use crate::precision::PrecisionContext;

/// Dense coefficients, ascending degree. Trailing exact zeros are trimmed, so
/// the leading coefficient is nonzero unless this is the zero polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Float>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Float>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::new(vec![ctx.zero()])
    }

    pub fn constant(c: Float) -> Self {
        Self::new(vec![c])
    }

    pub fn from_roots(ctx: PrecisionContext, roots: &[Float]) -> Self {
        let mut p = Self::new(vec![ctx.one()]);
        for r in roots {
            let linear = Self::new(vec![-r.clone(), ctx.one()]);
            p = p.mul(&linear);
        }
        p
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &Float {
        self.coeffs.last().unwrap()
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    /// Sum of coefficient magnitudes.
    pub fn norm_l1(&self) -> Float {
        let mut s = Float::new(self.prec());
        for c in &self.coeffs {
            s += c.clone().abs();
        }
        s
    }

    pub fn eval_real(&self, x: &Float) -> Float {
        let p = self.prec().max(x.prec());
        let mut acc = Float::new(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_add(x, c);
        }
        acc
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let mut acc = Complex::new(Float::new(self.prec()), Float::new(self.prec()));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add_real(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![Float::new(self.prec())]);
        }
        let p = self.prec();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Float::with_val(p, c * Float::with_val(32, k as u32)))
            .collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec().max(other.prec());
        let mut out = vec![Float::new(p); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Float::with_val(p, a * b);
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec().max(other.prec());
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Float::new(p); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            out[i] += b;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Float::with_val(32, -1)))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec().max(s.prec());
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Float::with_val(p, c * s))
                .collect(),
        )
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        assert!(!self.is_zero());
        let p = self.prec();
        let lead = self.leading().clone();
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Float::with_val(p, c / &lead))
                .collect(),
        )
    }
}

/// Root multiset together with the worst normalized residual reached.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub roots: Vec<Complex>,
    pub worst_residual: Float,
}

impl ZeroSet {
    /// Roots with negligible imaginary part, returned sorted by real part.
    pub fn real_roots(&self, im_tol: &Float) -> Vec<Float> {
        let mut xs: Vec<Float> = self
            .roots
            .iter()
            .filter(|r| r.im.clone().abs() <= *im_tol)
            .map(|r| r.re.clone())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs
    }

    /// Smallest pairwise distance; large for simple well-separated roots.
    pub fn min_separation(&self) -> Float {
        let prec = self
            .roots
            .first()
            .map(|r| r.re.prec())
            .unwrap_or(64);
        let mut best = Float::with_val(prec, f64::INFINITY);
        for i in 0..self.roots.len() {
            for j in (i + 1)..self.roots.len() {
                let d = self.roots[i].sub(&self.roots[j]).abs();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Magnitude estimate log2|x| that survives huge exponents.
fn log2_mag(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    x.get_exp().map(|e| e as f64).unwrap_or(0.0)
}

/// Starting radii from the Newton polygon: the upper convex hull of
/// `(k, log2|a_k|)` splits the degree into groups whose root magnitudes the
/// hull edge slopes estimate. Exact values are irrelevant, f64 is plenty.
fn newton_polygon_radii(coeffs: &[Float]) -> Vec<f64> {
    let deg = coeffs.len() - 1;
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as f64, log2_mag(c).clamp(-1.0e6, 1.0e6)))
        .collect();
    // upper hull, left to right
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut radii = Vec::with_capacity(deg);
    for e in hull.windows(2) {
        let (k1, y1) = e[0];
        let (k2, y2) = e[1];
        let r = 2f64.powf(((y1 - y2) / (k2 - k1)).clamp(-500.0, 500.0));
        for _ in 0..((k2 - k1) as usize) {
            radii.push(r);
        }
    }
    while radii.len() < deg {
        radii.push(*radii.last().unwrap_or(&1.0));
    }
    radii
}

/// All roots by damped Aberth-Ehrlich simultaneous iteration at the
/// polynomial's working precision. `digits` drives the residual target.
pub fn poly_roots(ctx: PrecisionContext, p: &Polynomial) -> Result<ZeroSet> {
    let deg = p.degree();
    if deg == 0 || p.is_zero() {
        return Err(CoreError::ParameterDomain(
            "root finding needs degree >= 1".into(),
        ));
    }
    let prec = ctx.bits();
    let pm = p.monic();
    let pd = pm.derivative();
    let norm = pm.norm_l1();

    let radii = newton_polygon_radii(pm.coeffs());
    let radius = ctx.real(radii.iter().cloned().fold(1.0f64, f64::max));

    let pi = ctx.pi();
    let mut zs: Vec<Complex> = (0..deg)
        .map(|k| {
            // irrational-looking fixed offset avoids symmetric stalls
            let ang = Float::with_val(prec, 2 * k as u32 + 1) * &pi / Float::with_val(prec, deg as u32)
                + Float::with_val(prec, 0.3612);
            let c = ang.clone().cos();
            let s = ang.sin();
            let r = ctx.real(radii[k]);
            Complex::new(
                Float::with_val(prec, &c * &r),
                Float::with_val(prec, &s * &r),
            )
        })
        .collect();

    let step_floor = {
        let two = ctx.real(2);
        two.pow(-(prec as i32) + 24)
    };
    // Steps bottom out above `step_floor` for clustered roots (the noise floor
    // scales with 1/|p'| at the root), so stagnation past half precision also
    // counts as settled; the residual check below is the real gate.
    let stagnation_gate = {
        let two = ctx.real(2);
        two.pow(-(prec as i32) / 2)
    };
    // residual target |P(root)| / (||P||_1 * max(1,|root|)^deg) < 10^{-digits/4}
    let tol = ctx.pow10_neg(ctx.decimal_digits() / 4);
    let max_sweeps = 400usize;

    // ---- phase A: damped Aberth-Ehrlich sweeps (global) ----
    let mut prev2: Vec<Complex> = zs.clone();
    let mut prev1: Vec<Complex> = zs.clone();
    {
        let mut best_step = Float::with_val(prec, f64::INFINITY);
        let mut stagnant = 0usize;
        for _sweep in 0..max_sweeps {
            let mut max_rel_step = ctx.zero();
            for i in 0..deg {
                let pv = pm.eval_complex(&zs[i]);
                if pv.abs().is_zero() {
                    continue;
                }
                let dv = pd.eval_complex(&zs[i]);
                if dv.abs().is_zero() {
                    zs[i].re += Float::with_val(prec, -1e-3) * &radius;
                    max_rel_step = ctx.one();
                    continue;
                }
                let newton = pv.div(&dv);
                let mut repel = Complex::zero(ctx);
                for j in 0..deg {
                    if j != i {
                        let diff = zs[i].sub(&zs[j]);
                        repel = repel.add(&diff.recip());
                    }
                }
                let denom = Complex::new(ctx.one(), ctx.zero()).sub(&newton.mul(&repel));
                let mut w = if denom.abs().is_zero() {
                    newton.clone()
                } else {
                    newton.div(&denom)
                };
                let scale = zs[i].abs().max(&ctx.one());
                let cap = Float::with_val(prec, &scale / &ctx.real(2));
                let wa = w.abs();
                if wa > cap {
                    w = w.mul_real(&Float::with_val(prec, &cap / &wa));
                }
                let candidate = zs[i].sub(&w);
                // break period-2 cycles: if we are about to land where we were
                // two sweeps ago, take half the step instead
                let cycle = candidate.sub(&prev2[i]).abs();
                let wa2 = w.abs();
                let final_z = if !wa2.is_zero()
                    && cycle < Float::with_val(prec, &wa2 / &ctx.real(8))
                {
                    zs[i].sub(&w.mul_real(&ctx.real(0.5)))
                } else {
                    candidate
                };
                let rel = Float::with_val(prec, w.abs() / scale);
                if rel > max_rel_step {
                    max_rel_step = rel;
                }
                prev2[i] = prev1[i].clone();
                prev1[i] = zs[i].clone();
                zs[i] = final_z;
            }
            if max_rel_step < step_floor {
                break;
            }
            if max_rel_step < stagnation_gate {
                let improved = Float::with_val(prec, &max_rel_step * &ctx.real(2)) < best_step;
                if improved {
                    stagnant = 0;
                } else {
                    stagnant += 1;
                    if stagnant >= 4 {
                        break;
                    }
                }
            }
            if max_rel_step < best_step {
                best_step = max_rel_step;
            }
        }
    }

    // ---- phase B: assignment repair (local) ----
    // Phase A can leave two iterates on one simple root and orphan another
    // (or a point in a period cycle). Split the iterates into distinct
    // "claimed" roots and "free" points, then drive each free point into an
    // unclaimed root by Maehly iteration (Newton deflated by the claimed set)
    // from deterministic candidates: gap midpoints of the claimed roots,
    // edge extensions, and polygon-circle samples.
    let normalized_residual = |z: &Complex, pm: &Polynomial| -> Float {
        let growth = z.abs().max(&ctx.one()).pow(deg as u32);
        let scale = Float::with_val(prec, &norm * &growth);
        Float::with_val(prec, pm.eval_complex(z).abs() / scale)
    };
    let sep_gate = ctx.pow10_neg(ctx.decimal_digits() / 8);

    for _repair in 0..3 {
        let mut order: Vec<usize> = (0..deg).collect();
        order.sort_by(|&a, &b| {
            zs[a].re
                .partial_cmp(&zs[b].re)
                .unwrap()
                .then(zs[a].im.partial_cmp(&zs[b].im).unwrap())
        });
        let mut claimed: Vec<usize> = Vec::new();
        let mut free: Vec<usize> = Vec::new();
        for &i in &order {
            let resid = normalized_residual(&zs[i], &pm);
            let duplicate = claimed.iter().any(|&j| {
                let gap = zs[i].sub(&zs[j]).abs();
                let scale = zs[i].abs().max(&ctx.one());
                gap < Float::with_val(prec, &sep_gate * &scale)
            });
            if resid <= tol && !duplicate {
                claimed.push(i);
            } else {
                free.push(i);
            }
        }
        if free.is_empty() {
            break;
        }

        // candidate starting points, most promising first (deflated magnitude)
        let claimed_pos: Vec<Complex> = claimed.iter().map(|&i| zs[i].clone()).collect();
        let mut candidates: Vec<Complex> = Vec::new();
        if claimed_pos.len() >= 2 {
            for w in claimed_pos.windows(2) {
                let mid = w[0].add(&w[1]).mul_real(&ctx.real(0.5));
                let gap = w[1].sub(&w[0]).abs();
                let half = Float::with_val(prec, &gap / &ctx.real(2));
                candidates.push(mid.clone());
                candidates.push(mid.add(&Complex::new(ctx.zero(), half.clone())));
                candidates.push(mid.sub(&Complex::new(ctx.zero(), half)));
            }
            let first = &claimed_pos[0];
            let second = &claimed_pos[1];
            candidates.push(first.sub(&second.sub(first)));
            let last = &claimed_pos[claimed_pos.len() - 1];
            let before = &claimed_pos[claimed_pos.len() - 2];
            candidates.push(last.add(&last.sub(before)));
        }
        for (ri, r) in radii.iter().enumerate() {
            for k in 0..8 {
                let ang = 2.399963 * (k as f64 + 1.0) + 0.17 * ri as f64;
                candidates.push(Complex::from_f64(ctx, r * ang.cos(), r * ang.sin()));
            }
        }

        let deflated_mag = |z: &Complex| -> f64 {
            let pv = pm.eval_complex(z).abs();
            let mut logmag = if pv.is_zero() {
                f64::NEG_INFINITY
            } else {
                pv.get_exp().map(|e| e as f64).unwrap_or(0.0)
            };
            for c in &claimed_pos {
                let d = z.sub(c).abs();
                if d.is_zero() {
                    return f64::INFINITY;
                }
                logmag -= d.get_exp().map(|e| e as f64).unwrap_or(0.0);
            }
            logmag
        };
        let mut scored: Vec<(f64, usize)> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (deflated_mag(c), i))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

        let mut fixed: Vec<Complex> = claimed_pos.clone();
        let mut cand_cursor = 0usize;
        for &fi in &free {
            // Maehly iteration from the best remaining candidates
            let mut placed = false;
            while cand_cursor < scored.len() && !placed {
                let mut z = candidates[scored[cand_cursor].1].clone();
                cand_cursor += 1;
                for _it in 0..120 {
                    let pv = pm.eval_complex(&z);
                    if pv.abs().is_zero() {
                        break;
                    }
                    let dv = pd.eval_complex(&z);
                    if dv.abs().is_zero() {
                        break;
                    }
                    let newton = pv.div(&dv);
                    let mut defl = Complex::zero(ctx);
                    for c in &fixed {
                        defl = defl.add(&z.sub(c).recip());
                    }
                    let denom = Complex::new(ctx.one(), ctx.zero()).sub(&newton.mul(&defl));
                    if denom.abs().is_zero() {
                        break;
                    }
                    let w = newton.div(&denom);
                    let scale = z.abs().max(&ctx.one());
                    z = z.sub(&w);
                    if w.abs() < Float::with_val(prec, &step_floor * &scale) {
                        break;
                    }
                }
                let resid = normalized_residual(&z, &pm);
                let dup = fixed.iter().any(|c| {
                    let gap = z.sub(c).abs();
                    let scale = z.abs().max(&ctx.one());
                    gap < Float::with_val(prec, &sep_gate * &scale)
                });
                if resid <= tol && !dup {
                    zs[fi] = z.clone();
                    fixed.push(z);
                    placed = true;
                }
            }
            if !placed {
                break;
            }
        }
    }

    // final gate
    let mut worst = ctx.zero();
    for z in &zs {
        let r = normalized_residual(z, &pm);
        if r > worst {
            worst = r;
        }
    }
    if worst > tol {
        return Err(CoreError::NonConvergence(format!(
            "root residual {:.3e} above target {:.3e} for degree {deg}",
            worst.to_f64(),
            tol.to_f64()
        )));
    }

    zs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(ZeroSet {
        roots: zs,
        worst_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(120).unwrap()
    }

    #[test]
    fn quadratic_roots() {
        let c = ctx();
        // z^2 - 1
        let p = Polynomial::new(vec![c.real(-1), c.zero(), c.one()]);
        let zs = poly_roots(c, &p).unwrap();
        assert_eq!(zs.roots.len(), 2);
        let reals = zs.real_roots(&c.pow10_neg(30));
        assert_eq!(reals.len(), 2);
        assert!((reals[0].to_f64() + 1.0).abs() < 1e-30);
        assert!((reals[1].to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn wilkinson_style_cluster_resolves() {
        let c = PrecisionContext::new(200).unwrap();
        let roots: Vec<Float> = (1..=15)
            .map(|k| c.real(k) / c.real(20))
            .collect();
        let p = Polynomial::from_roots(c, &roots);
        let zs = poly_roots(c, &p).unwrap();
        assert_eq!(zs.roots.len(), 15);
        let found = zs.real_roots(&c.pow10_neg(40));
        assert_eq!(found.len(), 15);
        for (f, r) in found.iter().zip(roots.iter()) {
            let d = Float::with_val(256, f - r).abs();
            assert!(d < c.pow10_neg(30), "root off by {:.3e}", d.to_f64());
        }
    }

    #[test]
    fn root_count_matches_degree() {
        let c = ctx();
        // (z^2+1)(z-3): one real root, one conjugate pair
        let p = Polynomial::new(vec![c.real(-3), c.one(), c.real(-3), c.one()]);
        let zs = poly_roots(c, &p).unwrap();
        assert_eq!(zs.roots.len(), p.degree());
        let reals = zs.real_roots(&c.pow10_neg(25));
        assert_eq!(reals.len(), 1);
        assert!((reals[0].to_f64() - 3.0).abs() < 1e-25);
    }

    #[test]
    fn zero_degree_rejected() {
        let c = ctx();
        let p = Polynomial::new(vec![c.real(5)]);
        assert!(poly_roots(c, &p).is_err());
    }

    #[test]
    fn mul_and_derivative_consistency() {
        let c = ctx();
        let p = Polynomial::new(vec![c.real(1), c.real(2), c.real(1)]); // (1+x)^2
        let q = Polynomial::new(vec![c.real(-1), c.one()]); // x-1
        let prod = p.mul(&q);
        let x = c.real(0.7);
        let lhs = prod.eval_real(&x);
        let rhs = Float::with_val(c.bits(), p.eval_real(&x) * q.eval_real(&x));
        assert!(Float::with_val(c.bits(), &lhs - &rhs).abs() < c.pow10_neg(100));
        // d/dx (1+x)^2 = 2(1+x)
        let d = p.derivative();
        let expect = Float::with_val(c.bits(), 2.0 * 1.7);
        assert!(Float::with_val(c.bits(), d.eval_real(&x) - expect).abs() < c.pow10_neg(100));
    }
}
