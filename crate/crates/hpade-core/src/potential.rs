//! Potential theory on real segments: Green functions of segment complements,
//! logarithmic and Green potentials, Robin (arcsine) measures, balayage, and
//! measure CDFs.
//!
//! Measures are densities against the arcsine reference weight of their
//! segment at Chebyshev midpoint nodes, so the 1/sqrt endpoint behavior of
//! equilibrium densities is exact and the smooth factor interpolates
//! spectrally. Potentials evaluate through the Chebyshev closed forms in the
//! exterior-map variable, valid on and off the segment.

use rug::Float;

use crate::complex::{Complex, Point};
use crate::error::{CoreError, Result};
use crate::precision::PrecisionContext;

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub lo: Float,
    pub hi: Float,
}

impl Segment {
    pub fn new(lo: Float, hi: Float) -> Result<Self> {
        if !(hi > lo) {
            return Err(CoreError::ParameterDomain(format!(
                "degenerate segment [{}, {}]",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn from_f64(ctx: PrecisionContext, lo: f64, hi: f64) -> Result<Self> {
        Self::new(ctx.real(lo), ctx.real(hi))
    }

    fn prec(&self) -> u32 {
        self.lo.prec()
    }

    pub fn midpoint(&self) -> Float {
        Float::with_val(self.prec(), &self.lo + &self.hi) / 2u32
    }

    pub fn halfwidth(&self) -> Float {
        Float::with_val(self.prec(), &self.hi - &self.lo) / 2u32
    }

    /// Unit coordinate (z - mid)/half.
    pub fn unit_coord(&self, z: &Complex) -> Complex {
        let p = self.prec();
        let mid = self.midpoint();
        let half = self.halfwidth();
        Complex::new(
            Float::with_val(p, &z.re - &mid) / &half,
            Float::with_val(p, &z.im) / &half,
        )
    }

    pub fn unit_coord_real(&self, x: &Float) -> Float {
        let p = self.prec();
        Float::with_val(p, x - &self.midpoint()) / self.halfwidth()
    }

    pub fn point_from_unit(&self, xi: &Float) -> Float {
        let p = self.prec();
        Float::with_val(p, self.midpoint() + self.halfwidth() * xi)
    }

    pub fn contains_real(&self, x: &Float, pad: &Float) -> bool {
        let p = self.prec();
        *x >= Float::with_val(p, &self.lo - pad) && *x <= Float::with_val(p, &self.hi + pad)
    }

    /// True when `z` lies on the segment (up to a tiny pad).
    pub fn touches(&self, z: &Complex, pad: &Float) -> bool {
        z.im.clone().abs() <= *pad && self.contains_real(&z.re, pad)
    }

    /// Robin constant `-log(cap) = log(4/(hi-lo)) = log(2/half)`.
    pub fn robin_constant(&self, ctx: PrecisionContext) -> Float {
        let half = self.halfwidth();
        Float::with_val(ctx.bits(), 2u32 / &half).ln()
    }
}

/// `sqrt(z^2-1)` on the branch `~ z` at infinity, analytic off `[-1,1]`.
pub fn sqrt_branch(z: &Complex) -> Complex {
    let p = z.re.prec();
    let one = Complex::new(Float::with_val(p, 1), Float::new(p));
    z.mul(&one.sub(&z.square().recip()).sqrt())
}

/// `phi(z) = z + sqrt(z^2-1)`, `|phi| > 1` off `[-1,1]`.
pub fn joukowski_exterior(z: &Complex) -> Complex {
    z.add(&sqrt_branch(z))
}

/// A positive measure on a segment: density values against the arcsine
/// reference weight at `K` Chebyshev midpoint nodes, plus the derived
/// Chebyshev coefficients of that density.
#[derive(Clone, Debug)]
pub struct SegmentMeasure {
    pub segment: Segment,
    values: Vec<Float>,
    coeffs: Vec<Float>,
    ctx: PrecisionContext,
}

/// Gauss-Chebyshev midpoint angles `(2j+1) pi / (2K)`.
pub fn chebyshev_angles(ctx: PrecisionContext, k: usize) -> Vec<Float> {
    let p = ctx.bits();
    let pi = ctx.pi();
    (0..k)
        .map(|j| {
            Float::with_val(p, &pi * Float::with_val(p, 2 * j as u32 + 1))
                / Float::with_val(p, 2 * k as u32)
        })
        .collect()
}

/// Discrete cosine transform of node values: coefficients of `sum a_n T_n`.
fn dct(ctx: PrecisionContext, values: &[Float]) -> Vec<Float> {
    let k = values.len();
    let p = ctx.bits();
    let angles = chebyshev_angles(ctx, k);
    let cos1: Vec<Float> = angles.iter().map(|t| t.clone().cos()).collect();
    let mut coeffs = Vec::with_capacity(k);
    // cos(n t) by recurrence per node
    let mut prev: Vec<Float> = vec![ctx.one(); k];
    let mut cur: Vec<Float> = cos1.clone();
    for n in 0..k {
        let mut acc = Float::new(p);
        let row: &[Float] = if n == 0 { &prev } else { &cur };
        for (v, c) in values.iter().zip(row.iter()) {
            acc += Float::with_val(p, v * c);
        }
        let scale = if n == 0 { 1u32 } else { 2u32 };
        coeffs.push(Float::with_val(p, &acc * Float::with_val(p, scale)) / Float::with_val(p, k as u32));
        if n >= 1 {
            // advance recurrence: next = 2*cos1*cur - prev
            let next: Vec<Float> = cur
                .iter()
                .zip(prev.iter())
                .zip(cos1.iter())
                .map(|((c, pv), c1)| {
                    Float::with_val(p, Float::with_val(p, 2u32 * c1) * c - pv)
                })
                .collect();
            prev = std::mem::take(&mut cur);
            cur = next;
        }
    }
    coeffs
}

impl SegmentMeasure {
    /// Builds a measure from density values (w.r.t. the arcsine reference
    /// weight) at the `K` Chebyshev midpoint nodes of the segment.
    pub fn from_values(ctx: PrecisionContext, segment: Segment, values: Vec<Float>) -> Result<Self> {
        if values.len() < 4 {
            return Err(CoreError::ParameterDomain(
                "a segment measure needs at least 4 density nodes".into(),
            ));
        }
        let coeffs = dct(ctx, &values);
        Ok(Self {
            segment,
            values,
            coeffs,
            ctx,
        })
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    /// Node abscissae on the segment, left to right order matches `values`.
    pub fn nodes(&self) -> Vec<Float> {
        chebyshev_angles(self.ctx, self.values.len())
            .into_iter()
            .map(|t| self.segment.point_from_unit(&t.cos()))
            .collect()
    }

    /// Total mass; equals the zeroth Chebyshev coefficient.
    pub fn mass(&self) -> Float {
        self.coeffs[0].clone()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_sign_negative() || v.is_zero())
    }

    /// Density (against the arcsine reference) at unit coordinate `xi`.
    pub fn density_at_unit(&self, xi: &Float) -> Float {
        let p = self.ctx.bits();
        // Clenshaw for sum a_n T_n(xi)
        let two_xi = Float::with_val(p, 2u32 * xi);
        let mut b1 = Float::new(p);
        let mut b2 = Float::new(p);
        for a in self.coeffs.iter().rev() {
            let b0 = Float::with_val(p, &two_xi * &b1) - &b2 + a;
            b2 = std::mem::replace(&mut b1, b0);
        }
        // T_0 correction: value = b1 - xi*b2
        Float::with_val(p, &b1 - Float::with_val(p, xi * &b2))
    }

    /// Linear mixture `sum w_i mu_i` of measures on the same segment with the
    /// same node count.
    pub fn mix(parts: &[(Float, &SegmentMeasure)]) -> Result<SegmentMeasure> {
        let first = parts
            .first()
            .ok_or_else(|| CoreError::ParameterDomain("empty mixture".into()))?
            .1;
        let ctx = first.ctx;
        let p = ctx.bits();
        let mut values = vec![Float::new(p); first.node_count()];
        for (w, m) in parts {
            if m.node_count() != first.node_count() || m.segment != first.segment {
                return Err(CoreError::ParameterDomain(
                    "mixture parts must share segment and node count".into(),
                ));
            }
            for (acc, v) in values.iter_mut().zip(m.values.iter()) {
                *acc += Float::with_val(p, w * v);
            }
        }
        SegmentMeasure::from_values(ctx, first.segment.clone(), values)
    }
}

fn on_segment_pad(ctx: PrecisionContext) -> Float {
    ctx.pow10_neg(ctx.decimal_digits())
}

/// Green function of the complement of `segment` with pole at `w`
/// (`Point::Infinity` for the pole at infinity).
pub fn green_segment(ctx: PrecisionContext, z: &Point, w: &Point, segment: &Segment) -> Result<Float> {
    let pad = on_segment_pad(ctx);
    let map = |pt: &Point| -> Result<Option<Complex>> {
        match pt {
            Point::Infinity => Ok(None),
            Point::Finite(z) => {
                if segment.touches(z, &pad) {
                    return Err(CoreError::ParameterDomain(format!(
                        "green function argument {} lies on the segment",
                        z
                    )));
                }
                Ok(Some(segment.unit_coord(z)))
            }
        }
    };
    let zu = map(z)?;
    let wu = map(w)?;
    let p = ctx.bits();
    match (zu, wu) {
        (None, None) => Err(CoreError::ParameterDomain(
            "green function with both arguments at infinity".into(),
        )),
        (Some(u), None) | (None, Some(u)) => Ok(joukowski_exterior(&u).abs().ln()),
        (Some(u), Some(v)) => {
            let pu = joukowski_exterior(&u);
            let pv = joukowski_exterior(&v);
            let one = Complex::new(Float::with_val(p, 1), Float::new(p));
            let num = pu.mul(&pv.conj()).sub(&one).abs().ln();
            let den = pu.sub(&pv).abs().ln();
            Ok(Float::with_val(p, num - den))
        }
    }
}

/// Logarithmic potential `V^mu(z) = int log(1/|z-t|) dmu(t)`, valid on and
/// off the support through the Chebyshev closed form.
pub fn log_potential(mu: &SegmentMeasure, z: &Complex) -> Float {
    let ctx = mu.ctx;
    let p = ctx.bits();
    let pad = on_segment_pad(ctx);
    let half = mu.segment.halfwidth();
    let log_2h = Float::with_val(p, 2u32 / &half).ln();
    if mu.segment.touches(z, &pad) {
        // on the segment: V = a0 log(2/h) + sum a_n T_n(xi)/n
        let xi = mu.segment.unit_coord_real(&z.re);
        let theta = xi.acos();
        let mut acc = Float::with_val(p, &mu.coeffs[0] * &log_2h);
        let mut cur = theta.clone().cos();
        let mut prev = ctx.one();
        let cos1 = cur.clone();
        for (n, a) in mu.coeffs.iter().enumerate().skip(1) {
            acc += Float::with_val(p, a * &cur) / Float::with_val(p, n as u32);
            let next = Float::with_val(p, Float::with_val(p, 2u32 * &cos1) * &cur - &prev);
            prev = std::mem::replace(&mut cur, next);
        }
        acc
    } else {
        // off the segment: V = a0 (log(2/h) - log|phi|) + sum a_n Re[phi^-n]/n
        let u = mu.segment.unit_coord(z);
        let phi = joukowski_exterior(&u);
        let log_abs_phi = phi.abs().ln();
        let mut acc = Float::with_val(p, &mu.coeffs[0] * Float::with_val(p, &log_2h - &log_abs_phi));
        let inv = phi.recip();
        let mut cur = inv.clone();
        for (n, a) in mu.coeffs.iter().enumerate().skip(1) {
            acc += Float::with_val(p, a * &cur.re) / Float::with_val(p, n as u32);
            cur = cur.mul(&inv);
        }
        acc
    }
}

/// Smooth part `h_S(t,z) = g_S(t,z) + log|t-z|` of the Green kernel, in a
/// cancellation-free form valid for `t`, `z` off the segment `S` (including
/// the diagonal `t = z`).
pub fn green_smooth_part(ctx: PrecisionContext, seg: &Segment, t: &Complex, z: &Complex) -> Float {
    let p = ctx.bits();
    let ut = seg.unit_coord(t);
    let uz = seg.unit_coord(z);
    let pt = joukowski_exterior(&ut);
    let pz = joukowski_exterior(&uz);
    let one = Complex::new(Float::with_val(p, 1), Float::new(p));
    let term1 = pt.mul(&pz.conj()).sub(&one).abs().ln();
    let st = sqrt_branch(&ut);
    let sz = sqrt_branch(&uz);
    // (phi(t)-phi(z))/(ut-uz) = 1 + (ut+uz)/(st+sz)
    let dd = one.add(&ut.add(&uz).div(&st.add(&sz)));
    let term2 = dd.abs().ln();
    let log_h = seg.halfwidth().ln();
    Float::with_val(p, Float::with_val(p, &term1 + &log_h) - &term2)
}

/// Green potential `G^mu_S(z) = int g_S(t,z) dmu(t)` for `supp mu` disjoint
/// from `S`; `z` may be anywhere off `S` (including on `supp mu`), or the
/// point at infinity.
pub fn green_potential(
    mu: &SegmentMeasure,
    z: &Point,
    pole_segment: &Segment,
) -> Result<Float> {
    let ctx = mu.ctx;
    let p = ctx.bits();
    let pad = on_segment_pad(ctx);
    let own = &mu.segment;
    let overlap = pole_segment.contains_real(&own.lo, &pad) || pole_segment.contains_real(&own.hi, &pad)
        || own.contains_real(&pole_segment.lo, &pad);
    if overlap {
        return Err(CoreError::Overlap(format!(
            "measure support [{}, {}] intersects the pole segment [{}, {}]",
            own.lo.to_f64(),
            own.hi.to_f64(),
            pole_segment.lo.to_f64(),
            pole_segment.hi.to_f64()
        )));
    }
    let k = mu.node_count();
    let nodes = mu.nodes();
    match z {
        Point::Infinity => {
            // G(infinity) = int g_S(t, infinity) dmu(t), node quadrature
            let mut acc = Float::new(p);
            for (t, v) in nodes.iter().zip(mu.values.iter()) {
                let tu = pole_segment.unit_coord(&Complex::from_real(t.clone()));
                let g = joukowski_exterior(&tu).abs().ln();
                acc += Float::with_val(p, &g * v);
            }
            Ok(acc / Float::with_val(p, k as u32))
        }
        Point::Finite(zf) => {
            if pole_segment.touches(zf, &pad) {
                // Green potentials vanish on the pole segment
                return Ok(ctx.zero());
            }
            // split: G = V + int h dmu, with h smooth across t = z
            let v = log_potential(mu, zf);
            let mut acc = Float::new(p);
            for (t, val) in nodes.iter().zip(mu.values.iter()) {
                let h = green_smooth_part(ctx, pole_segment, &Complex::from_real(t.clone()), zf);
                acc += Float::with_val(p, &h * val);
            }
            Ok(Float::with_val(p, &v + &(acc / Float::with_val(p, k as u32))))
        }
    }
}

/// Robin (arcsine) measure of a segment with its Robin constant.
pub fn robin_measure(
    ctx: PrecisionContext,
    segment: &Segment,
    node_count: usize,
) -> Result<(SegmentMeasure, Float)> {
    let values = vec![ctx.one(); node_count.max(4)];
    let m = SegmentMeasure::from_values(ctx, segment.clone(), values)?;
    let gamma = segment.robin_constant(ctx);
    Ok((m, gamma))
}

/// Balayage of `mu` onto a disjoint `target` segment via the explicit
/// harmonic-measure kernel; preserves mass and the potential on the target
/// up to a constant.
pub fn balayage_onto_segment(mu: &SegmentMeasure, target: &Segment) -> Result<SegmentMeasure> {
    let ctx = mu.ctx;
    let p = ctx.bits();
    let pad = on_segment_pad(ctx);
    if target.contains_real(&mu.segment.lo, &pad)
        || target.contains_real(&mu.segment.hi, &pad)
        || mu.segment.contains_real(&target.lo, &pad)
    {
        return Err(CoreError::Overlap(
            "balayage source and target segments intersect".into(),
        ));
    }
    let k = mu.node_count();
    let src_nodes = mu.nodes();
    // unit coordinates of the source nodes w.r.t. the target segment
    let zeta: Vec<Complex> = src_nodes
        .iter()
        .map(|t| target.unit_coord(&Complex::from_real(t.clone())))
        .collect();
    let s_of_zeta: Vec<Complex> = zeta.iter().map(sqrt_branch).collect();
    let angles = chebyshev_angles(ctx, k);
    let mut out_values = Vec::with_capacity(k);
    for t in &angles {
        let eta = t.clone().cos();
        let mut acc = Float::new(p);
        for ((zj, sj), vj) in zeta.iter().zip(s_of_zeta.iter()).zip(mu.values.iter()) {
            // kernel Re[ s(zeta)/(zeta - eta) ], the harmonic-measure density
            // against the target's arcsine weight
            let denom = zj.sub(&Complex::from_real(eta.clone()));
            let kernel = sj.div(&denom).re;
            acc += Float::with_val(p, &kernel * vj);
        }
        out_values.push(acc / Float::with_val(p, k as u32));
    }
    SegmentMeasure::from_values(ctx, target.clone(), out_values)
}

/// CDF of the measure at `x` inside its segment.
pub fn measure_cdf(mu: &SegmentMeasure, x: &Float) -> Result<Float> {
    let ctx = mu.ctx;
    let p = ctx.bits();
    let pad = on_segment_pad(ctx);
    if !mu.segment.contains_real(x, &pad) {
        return Err(CoreError::ParameterDomain(format!(
            "cdf argument {} outside segment",
            x.to_f64()
        )));
    }
    let xi = mu.segment.unit_coord_real(x);
    let xi = xi.clamp(&ctx.real(-1), &ctx.real(1));
    let theta = xi.acos();
    // cdf = (1/pi) [ a0 (pi - theta) - sum a_n sin(n theta)/n ]
    let pi = ctx.pi();
    let mut acc = Float::with_val(p, &mu.coeffs[0] * Float::with_val(p, &pi - &theta));
    let (sin1, cos1) = theta.clone().sin_cos(Float::new(p));
    let mut sin_prev = Float::new(p); // sin(0)
    let mut sin_cur = sin1.clone();
    let two_cos = Float::with_val(p, 2u32 * &cos1);
    for (n, a) in mu.coeffs.iter().enumerate().skip(1) {
        acc -= Float::with_val(p, a * &sin_cur) / Float::with_val(p, n as u32);
        let next = Float::with_val(p, &two_cos * &sin_cur) - &sin_prev;
        sin_prev = std::mem::replace(&mut sin_cur, next);
    }
    Ok(acc / pi)
}
