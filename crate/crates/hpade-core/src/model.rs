//! The model function family
//! `f(z) = [(A - 1/phi(z))(B - 1/phi(z))]^{-1/2}`, `phi(z) = z + sqrt(z^2-1)`,
//! on the branch with `phi(z) ~ 2z` and `f(infinity) = 1/sqrt(AB) > 0`.
//!
//! `f`, `f^2`, `f^3` are holomorphic off the cut `E = [-1,1]`; Laurent
//! coefficients at infinity come from trapezoidal contour integrals with
//! node doubling, cached per precision block so repeated queries return
//! bit-identical values regardless of call order.

use std::sync::{Arc, RwLock};

use rug::ops::Pow;
use rug::Float;

use crate::complex::{Complex, Point};
use crate::error::{CoreError, Result};
use crate::precision::PrecisionContext;

#[derive(Debug, Default)]
struct LaurentCache {
    f: Vec<Float>,
    f2: Vec<Float>,
    f3: Vec<Float>,
}

/// One member of the function family: parameters `1 < A < B`, branch points
/// `a = (A+1/A)/2`, `b = (B+1/B)/2`, cut `E = [-1,1]`, second segment `F = [a,b]`.
#[derive(Clone, Debug)]
pub struct ModelParams {
    ctx: PrecisionContext,
    param_a: Float,
    param_b: Float,
    a: Float,
    b: Float,
    cache: Arc<RwLock<LaurentCache>>,
}

impl ModelParams {
    pub fn new(ctx: PrecisionContext, param_a: Float, param_b: Float) -> Result<Self> {
        if !(param_a > 1u32) {
            return Err(CoreError::ParameterDomain(format!(
                "need A > 1, got A = {}",
                param_a.to_f64()
            )));
        }
        if !(param_b > param_a) {
            return Err(CoreError::ParameterDomain(format!(
                "need B > A, got A = {}, B = {}",
                param_a.to_f64(),
                param_b.to_f64()
            )));
        }
        let p = ctx.bits();
        let param_a = Float::with_val(p, param_a);
        let param_b = Float::with_val(p, param_b);
        let a = Float::with_val(p, &param_a + param_a.clone().recip()) / 2u32;
        let b = Float::with_val(p, &param_b + param_b.clone().recip()) / 2u32;
        Ok(Self {
            ctx,
            param_a,
            param_b,
            a,
            b,
            cache: Arc::new(RwLock::new(LaurentCache::default())),
        })
    }

    pub fn from_f64(param_a: f64, param_b: f64, digits: u32) -> Result<Self> {
        let ctx = PrecisionContext::new(digits)?;
        Self::new(ctx, ctx.real(param_a), ctx.real(param_b))
    }

    pub fn from_str(param_a: &str, param_b: &str, digits: u32) -> Result<Self> {
        let ctx = PrecisionContext::new(digits)?;
        Self::new(ctx, ctx.parse(param_a)?, ctx.parse(param_b)?)
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn param_a(&self) -> &Float {
        &self.param_a
    }

    pub fn param_b(&self) -> &Float {
        &self.param_b
    }

    /// Left endpoint of F.
    pub fn branch_a(&self) -> &Float {
        &self.a
    }

    /// Right endpoint of F.
    pub fn branch_b(&self) -> &Float {
        &self.b
    }

    /// `f(infinity) = 1/sqrt(AB)`.
    pub fn f_at_infinity(&self) -> Float {
        let p = self.ctx.bits();
        Float::with_val(p, &self.param_a * &self.param_b)
            .sqrt()
            .recip()
    }

    fn check_off_cut(&self, z: &Complex) -> Result<()> {
        let tol = self.ctx.pow10_neg(self.ctx.decimal_digits());
        let near_axis = z.im.clone().abs() <= tol;
        let on_span = z.re.clone().abs() <= Float::with_val(self.ctx.bits(), 1u32 + &tol);
        if near_axis && on_span {
            return Err(CoreError::BranchCut(format!(
                "z = {} lies on the cut [-1,1]",
                z
            )));
        }
        Ok(())
    }

    /// `phi(z) = z + sqrt(z^2-1)` on the branch with `|phi| > 1` off the cut.
    pub fn eval_phi(&self, z: &Complex) -> Result<Complex> {
        self.check_off_cut(z)?;
        Ok(phi_branch(z))
    }

    /// `f(z)^power` for `power` in 1..=3; accepts the point at infinity.
    pub fn eval_f(&self, z: &Point, power: u32) -> Result<Complex> {
        if !(1..=3).contains(&power) {
            return Err(CoreError::ParameterDomain(format!(
                "power must be 1, 2 or 3, got {power}"
            )));
        }
        match z {
            Point::Infinity => {
                let c0 = self.f_at_infinity();
                let mut v = c0.clone();
                for _ in 1..power {
                    v *= &c0;
                }
                Ok(Complex::from_real(v))
            }
            Point::Finite(z) => {
                self.check_off_cut(z)?;
                let f = self.f_value(z);
                let mut v = f.clone();
                for _ in 1..power {
                    v = v.mul(&f);
                }
                Ok(v)
            }
        }
    }

    fn f_value(&self, z: &Complex) -> Complex {
        let w = phi_branch(z).recip();
        let fa = Complex::from_real(self.param_a.clone()).sub(&w);
        let fb = Complex::from_real(self.param_b.clone()).sub(&w);
        fa.mul(&fb).sqrt().recip()
    }

    /// Boundary value `f(x + i0)` for `x` strictly inside `(-1,1)`.
    pub fn f_boundary_plus(&self, x: &Float) -> Result<Complex> {
        let one = self.ctx.one();
        if !(x.clone().abs() < one) {
            return Err(CoreError::Endpoint(format!(
                "boundary value needs x strictly inside (-1,1), got {}",
                x.to_f64()
            )));
        }
        let p = self.ctx.bits();
        let im = Float::with_val(p, 1u32 - x.clone().square()).sqrt();
        let phi_plus = Complex::new(x.clone(), im);
        let w = phi_plus.recip();
        let fa = Complex::from_real(self.param_a.clone()).sub(&w);
        let fb = Complex::from_real(self.param_b.clone()).sub(&w);
        Ok(fa.mul(&fb).sqrt().recip())
    }

    /// Density of the generating measure: `sigma'(x) = -(1/pi) Im f(x+i0)`.
    pub fn sigma_density(&self, x: &Float) -> Result<Float> {
        let f_plus = self.f_boundary_plus(x)?;
        let p = self.ctx.bits();
        Ok(-Float::with_val(p, &f_plus.im / &self.ctx.pi()))
    }

    /// First `n` Laurent coefficients of `f` at infinity.
    pub fn laurent_coeffs(&self, n: usize) -> Result<Vec<Float>> {
        self.ensure_coeffs(n)?;
        Ok(self.cache.read().unwrap().f[..n].to_vec())
    }

    /// First `n` Laurent coefficients of `f^power`, `power` in {2,3}.
    pub fn laurent_coeffs_power(&self, n: usize, power: u32) -> Result<Vec<Float>> {
        if power != 2 && power != 3 {
            return Err(CoreError::ParameterDomain(format!(
                "laurent power must be 2 or 3, got {power}"
            )));
        }
        self.ensure_coeffs(n)?;
        let cache = self.cache.read().unwrap();
        let src = if power == 2 { &cache.f2 } else { &cache.f3 };
        Ok(src[..n].to_vec())
    }

    fn ensure_coeffs(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(CoreError::ParameterDomain("need at least one coefficient".into()));
        }
        if self.cache.read().unwrap().f.len() >= n {
            return Ok(());
        }
        let mut cache = self.cache.write().unwrap();
        while cache.f.len() < n {
            let start = cache.f.len();
            let end = block_end(start);
            let (bf, bf2, bf3) = self.compute_block(start, end)?;
            cache.f.extend(bf);
            cache.f2.extend(bf2);
            cache.f3.extend(bf3);
        }
        Ok(())
    }

    /// Contour coefficients for indices `[start, end)`. The guard precision and
    /// node counts depend only on `end`, so a given index always gets the same
    /// bits no matter which call computed it.
    fn compute_block(&self, start: usize, end: usize) -> Result<(Vec<Float>, Vec<Float>, Vec<Float>)> {
        let digits = self.ctx.decimal_digits();
        // R = 2: aliasing decays like 2^{-M}; R^k amplifies absolute error by
        // k*log10(2) digits, hence the k-dependent guard.
        let guard = (0.302 * end as f64).ceil() as u32 + 30;
        let gctx = self.ctx.with_guard(guard);
        let target_nodes = ((gctx.decimal_digits() as f64 * 3.33) as usize + 64).next_power_of_two();

        let mut m = target_nodes;
        let mut vals = self.contour_values(gctx, m, None);
        let mut prev_block: Option<(Vec<Float>, Vec<Float>, Vec<Float>)> = None;
        let agree_tol = self.ctx.pow10_neg(digits / 2);
        loop {
            let block = extract_block(gctx, &vals, start, end);
            if let Some(prev) = &prev_block {
                let mut worst = gctx.zero();
                for (pa, pb) in prev.0.iter().zip(block.0.iter())
                    .chain(prev.1.iter().zip(block.1.iter()))
                    .chain(prev.2.iter().zip(block.2.iter()))
                {
                    let d = Float::with_val(gctx.bits(), pa - pb).abs();
                    if d > worst {
                        worst = d;
                    }
                }
                if worst <= agree_tol {
                    let p = self.ctx.bits();
                    let round = |v: Vec<Float>| -> Vec<Float> {
                        v.into_iter().map(|c| Float::with_val(p, c)).collect()
                    };
                    return Ok((round(block.0), round(block.1), round(block.2)));
                }
                if m >= (1 << 17) {
                    return Err(CoreError::PrecisionExhausted(format!(
                        "contour coefficients for indices {start}..{end} disagree by {:.3e} \
                         at {m} nodes (target {:.3e})",
                        worst.to_f64(),
                        agree_tol.to_f64()
                    )));
                }
            }
            prev_block = Some(block);
            m *= 2;
            vals = self.contour_values(gctx, m, Some(vals));
        }
    }

    /// `f` on the circle `|z| = 2` at `m` equispaced nodes; reuses the previous
    /// halving's values as the even-index nodes.
    fn contour_values(&self, gctx: PrecisionContext, m: usize, prev: Option<Vec<Complex>>) -> Vec<Complex> {
        let p = gctx.bits();
        let two_pi = Float::with_val(p, gctx.pi() * 2u32);
        let radius = gctx.real(2);
        let eval = |s: usize| -> Complex {
            let theta = Float::with_val(p, &two_pi * Float::with_val(p, s as u32)) / Float::with_val(p, m as u32);
            let (sin, cos) = theta.sin_cos(Float::new(p));
            let z = Complex::new(
                Float::with_val(p, &cos * &radius),
                Float::with_val(p, &sin * &radius),
            );
            let w = phi_branch(&z).recip();
            let fa = Complex::from_real(self.param_a.clone()).sub(&w);
            let fb = Complex::from_real(self.param_b.clone()).sub(&w);
            fa.mul(&fb).sqrt().recip()
        };
        match prev {
            Some(prev) => {
                assert_eq!(prev.len() * 2, m);
                let mut out = Vec::with_capacity(m);
                for (s, v) in prev.into_iter().enumerate() {
                    out.push(v);
                    out.push(eval(2 * s + 1));
                }
                out
            }
            None => (0..m).map(eval).collect(),
        }
    }

    /// Fixed-node contour extraction at an integer radius; reference path for
    /// cross-checking the cached coefficients.
    pub fn laurent_reference(&self, n: usize, radius: u32, m: usize) -> Result<Vec<Float>> {
        if radius < 2 {
            return Err(CoreError::ParameterDomain(
                "reference contour radius must be >= 2".into(),
            ));
        }
        let guard = (0.602 * n as f64).ceil() as u32 + 30;
        let gctx = self.ctx.with_guard(guard);
        let p = gctx.bits();
        let two_pi = Float::with_val(p, gctx.pi() * 2u32);
        let r = gctx.real(radius);
        let vals: Vec<Complex> = (0..m)
            .map(|s| {
                let theta = Float::with_val(p, &two_pi * Float::with_val(p, s as u32))
                    / Float::with_val(p, m as u32);
                let (sin, cos) = theta.sin_cos(Float::new(p));
                let z = Complex::new(
                    Float::with_val(p, &cos * &r),
                    Float::with_val(p, &sin * &r),
                );
                let w = phi_branch(&z).recip();
                let fa = Complex::from_real(self.param_a.clone()).sub(&w);
                let fb = Complex::from_real(self.param_b.clone()).sub(&w);
                fa.mul(&fb).sqrt().recip()
            })
            .collect();
        let rot: Vec<Complex> = (0..m)
            .map(|s| {
                let theta = Float::with_val(p, &two_pi * Float::with_val(p, s as u32))
                    / Float::with_val(p, m as u32);
                let (sin, cos) = theta.sin_cos(Float::new(p));
                Complex::new(cos, sin)
            })
            .collect();
        let mut acc = vals;
        let mut out = Vec::with_capacity(n);
        let mut r_pow = gctx.one();
        for _k in 0..n {
            let mut sum = gctx.zero();
            for v in &acc {
                sum += &v.re;
            }
            out.push(Float::with_val(
                self.ctx.bits(),
                sum / Float::with_val(p, m as u32) * &r_pow,
            ));
            r_pow *= &r;
            for (v, w) in acc.iter_mut().zip(rot.iter()) {
                *v = v.mul(w);
            }
        }
        Ok(out)
    }
}

/// `phi(z) = z + z*sqrt(1 - 1/z^2)` with the principal square root; analytic
/// off `[-1,1]` and `~ 2z` at infinity.
pub fn phi_branch(z: &Complex) -> Complex {
    let one = Complex::new(Float::with_val(z.re.prec(), 1), Float::new(z.re.prec()));
    let inv_sq = z.square().recip();
    let s = z.mul(&one.sub(&inv_sq).sqrt());
    z.add(&s)
}

fn block_end(k: usize) -> usize {
    let mut e = 64usize;
    while k >= e {
        e *= 2;
    }
    e
}

/// Extracts `c_k`, `d_k`, `e_k` (coefficients of `f`, `f^2`, `f^3`) for
/// `k` in `[start, end)` from circle values at radius 2.
fn extract_block(
    gctx: PrecisionContext,
    vals: &[Complex],
    start: usize,
    end: usize,
) -> (Vec<Float>, Vec<Float>, Vec<Float>) {
    let p = gctx.bits();
    let m = vals.len();
    let two_pi = Float::with_val(p, gctx.pi() * 2u32);
    let rot: Vec<Complex> = (0..m)
        .map(|s| {
            let theta = Float::with_val(p, &two_pi * Float::with_val(p, s as u32))
                / Float::with_val(p, m as u32);
            let (sin, cos) = theta.sin_cos(Float::new(p));
            Complex::new(cos, sin)
        })
        .collect();
    let mut out = (Vec::new(), Vec::new(), Vec::new());
    for (power, sink) in [(1u32, &mut out.0), (2, &mut out.1), (3, &mut out.2)] {
        let powered: Vec<Complex> = vals
            .iter()
            .map(|v| match power {
                1 => v.clone(),
                2 => v.square(),
                _ => v.square().mul(v),
            })
            .collect();
        // start the rotation at k = start: multiply by w^start via binary powers
        let mut acc = powered;
        if start > 0 {
            let start_rot: Vec<Complex> = rot.iter().map(|w| complex_pow(w, start)).collect();
            for (v, w) in acc.iter_mut().zip(start_rot.iter()) {
                *v = v.mul(w);
            }
        }
        let mut r_pow = Float::with_val(p, 2u32).pow(start as u32);
        for _k in start..end {
            let mut sum = gctx.zero();
            for v in &acc {
                sum += &v.re;
            }
            sink.push(Float::with_val(p, sum / Float::with_val(p, m as u32) * &r_pow));
            r_pow *= 2u32;
            for (v, w) in acc.iter_mut().zip(rot.iter()) {
                *v = v.mul(w);
            }
        }
    }
    out
}

fn complex_pow(w: &Complex, mut e: usize) -> Complex {
    let p = w.re.prec();
    let mut base = w.clone();
    let mut acc = Complex::new(Float::with_val(p, 1), Float::new(p));
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.square();
        e >>= 1;
    }
    acc
}
