//! Complex arithmetic over `rug::Float`.
//!
//! MPC is not linked in this build, so the handful of complex operations the
//! solvers need (field ops, principal sqrt, log, conjugation) live here.

use rug::Float;

use crate::precision::PrecisionContext;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

/// An evaluation point, with the point at infinity where an operation admits it.
#[derive(Clone, Debug)]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::new(ctx.zero(), ctx.zero())
    }

    pub fn from_f64(ctx: PrecisionContext, re: f64, im: f64) -> Self {
        Self::new(ctx.real(re), ctx.real(im))
    }

    fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Self::new(re, im)
    }

    pub fn mul_real(&self, s: &Float) -> Self {
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re * s),
            Float::with_val(p, &self.im * s),
        )
    }

    pub fn add_real(&self, s: &Float) -> Self {
        let mut out = self.clone();
        out.re += s;
        out
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        Self::new(
            Float::with_val(p, &self.re / &n),
            -Float::with_val(p, &self.im / &n),
        )
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    /// Principal branch square root, stable near the axes.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        let r = self.abs();
        if r.is_zero() {
            return Self::new(Float::new(p), Float::new(p));
        }
        // t = sqrt((r + |re|)/2)
        let t = Float::with_val(p, &r + self.re.clone().abs()).sqrt() / Float::with_val(p, 2).sqrt();
        if !self.re.is_sign_negative() {
            let im = Float::with_val(p, &self.im / &t) / 2u32;
            Self::new(t, im)
        } else {
            let re = Float::with_val(p, self.im.clone().abs() / &t) / 2u32;
            let im = if self.im.is_sign_negative() { -t } else { t };
            Self::new(re, im)
        }
    }

    /// Principal branch logarithm.
    pub fn ln(&self) -> Self {
        let re = self.abs().ln();
        let im = self.im.clone().atan2(&self.re);
        Self::new(re, im)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

impl std::fmt::Display for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} + {}i", self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(60).unwrap()
    }

    #[test]
    fn sqrt_squares_back() {
        let z = Complex::from_f64(ctx(), -3.5, 1.25);
        let s = z.sqrt();
        let back = s.square();
        assert!(Float::with_val(200, &back.re - &z.re).abs() < 1e-55);
        assert!(Float::with_val(200, &back.im - &z.im).abs() < 1e-55);
        assert!(!s.re.is_sign_negative());
    }

    #[test]
    fn sqrt_negative_real_is_positive_imag() {
        let z = Complex::from_f64(ctx(), -4.0, 0.0);
        let s = z.sqrt();
        assert!(s.re.is_zero());
        assert!((s.im.to_f64() - 2.0).abs() < 1e-50);
    }

    #[test]
    fn division_identity() {
        let a = Complex::from_f64(ctx(), 2.0, -1.5);
        let b = Complex::from_f64(ctx(), -0.25, 3.0);
        let q = a.div(&b);
        let back = q.mul(&b);
        assert!(back.sub(&a).abs() < 1e-55);
    }

    #[test]
    fn ln_of_exp_direction() {
        let z = Complex::from_f64(ctx(), 1.0, 1.0);
        let l = z.ln();
        // |z| = sqrt(2), arg = pi/4
        assert!((l.re.to_f64() - 0.5f64 * 2f64.ln()).abs() < 1e-15);
        assert!((l.im.to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }
}
