//! Independent reference routes used to cross-check the production solvers.
//!
//! These deliberately take a different path: the approximant systems are
//! solved as full null-vector problems over all unknowns (denominator and
//! numerators together), and the equilibrium energy is minimized as a
//! cell-discretized quadratic program in f64 instead of collocating the
//! stationarity equations.

use rug::Float;

use crate::error::{CoreError, Result};
use crate::hp::SystemKind;
use crate::linalg::null_vector;
use crate::poly::Polynomial;
use crate::precision::PrecisionContext;

/// Solves the defining linear system of a type II kind over all unknowns
/// (denominator plus numerators) as one homogeneous system, returning
/// `[Q, P1, ..]` normalized monic in Q.
pub fn hp_full_system(
    ctx: PrecisionContext,
    rows: &[&[Float]],
    kind: SystemKind,
    index: usize,
) -> Result<Vec<Polynomial>> {
    let r = rows.len();
    match (kind, r) {
        (SystemKind::Pade, 1) | (SystemKind::Type2Pair, 2) | (SystemKind::Type2Triple, 3) => {}
        _ => {
            return Err(CoreError::KindMismatch(format!(
                "full-system oracle: {} with {r} coefficient rows",
                kind.label()
            )))
        }
    }
    let deg = r * index;
    let cols = (r + 1) * (deg + 1);
    let p = ctx.bits();
    let mut mat: Vec<Vec<Float>> = Vec::new();
    for (pi, cs) in rows.iter().enumerate() {
        if cs.len() < deg + index + 1 {
            return Err(CoreError::InsufficientCoefficients {
                needed: deg + index + 1,
                available: cs.len(),
            });
        }
        // coefficient of z^w in Q f^{pi+1} - P_{pi+1}, w = deg .. -index
        for wi in 0..=(deg + index) {
            let w = deg as i64 - wi as i64;
            let mut row = vec![ctx.zero(); cols];
            for j in 0..=deg {
                let idx = j as i64 - w;
                if idx >= 0 && (idx as usize) < cs.len() {
                    row[j] = cs[idx as usize].clone();
                }
            }
            if w >= 0 {
                row[(deg + 1) * (pi + 1) + w as usize] = ctx.real(-1);
            }
            mat.push(row);
        }
    }
    debug_assert_eq!(mat.len() + 1, cols);
    let v = null_vector(ctx, mat)?;
    let lead = v[deg].clone();
    if lead.is_zero() {
        return Err(CoreError::RankDeficient {
            defect: 1,
            context: "oracle null vector has zero leading denominator coefficient".into(),
        });
    }
    let mut out = Vec::with_capacity(r + 1);
    for b in 0..=r {
        let coeffs: Vec<Float> = (0..=deg)
            .map(|j| Float::with_val(p, &v[b * (deg + 1) + j] / &lead))
            .collect();
        out.push(Polynomial::new(coeffs));
    }
    Ok(out)
}

/// f64 partial-pivot solve for the QP oracle.
fn lu_solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.len();
    for k in 0..n {
        let mut piv = k;
        for r in (k + 1)..n {
            if a[r][k].abs() > a[piv][k].abs() {
                piv = r;
            }
        }
        if a[piv][k] == 0.0 {
            return Err(CoreError::RankDeficient {
                defect: n - k,
                context: "energy QP KKT system singular".into(),
            });
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for r in (k + 1)..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in (k + 1)..n {
            acc -= a[k][c] * x[c];
        }
        x[k] = acc / a[k][k];
    }
    Ok(x)
}

fn s64(z: f64) -> f64 {
    z.signum() * (z * z - 1.0).sqrt()
}

fn phi64(z: f64) -> f64 {
    z + s64(z)
}

/// Direct minimization of the discretized mixed energy
/// `J(mu) = theta int int log(1/|x-y|) + int int g_F(x,y)` over nonnegative
/// point masses at Chebyshev cells of E summing to 1, via the KKT system of
/// the convex QP. Returns the recovered density against the arcsine weight
/// at the cell midpoints; errs if any mass comes out negative.
pub fn energy_minimizer_density(
    param_a: f64,
    param_b: f64,
    theta: f64,
    cells: usize,
) -> Result<Vec<f64>> {
    if !(param_a > 1.0 && param_b > param_a) {
        return Err(CoreError::ParameterDomain("need 1 < A < B".into()));
    }
    let a = 0.5 * (param_a + 1.0 / param_a);
    let b = 0.5 * (param_b + 1.0 / param_b);
    let mf = 0.5 * (a + b);
    let hf = 0.5 * (b - a);
    let m = cells;
    let pi = std::f64::consts::PI;
    let delta = pi / m as f64;
    let tau: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * delta).collect();
    let x: Vec<f64> = tau.iter().map(|t| t.cos()).collect();
    // smooth part of g_F on E x E
    let zeta: Vec<f64> = x.iter().map(|xi| (xi - mf) / hf).collect();
    let h_part = |i: usize, j: usize| -> f64 {
        let (zi, zj) = (zeta[i], zeta[j]);
        let (si, sj) = (s64(zi), s64(zj));
        (phi64(zi) * phi64(zj) - 1.0).abs().ln() + hf.ln()
            - (1.0 + (zi + zj) / (si + sj)).abs().ln()
    };
    // Cells are uniform in the angle, where the arcsine reference is flat and
    // the within-cell shape is right up to O(delta). The log kernel splits as
    //   ln(1/|cos t - cos t'|) = ln 2 - g(t - t') - g(t + t'),
    //   g(u) = ln|2 sin(u/2)| = ln|u| + q(u), q analytic near 0,
    // so rectangle averages of g need exactness only near u = 0 (difference
    // band, sum corners) and u = 2 pi (sum corners), where the double
    // antiderivative G2 = Phi + Q2 is available by series.
    let phi_anti = |u: f64| -> f64 {
        if u == 0.0 {
            0.0
        } else {
            0.5 * u * u * (u.abs().ln() - 1.5)
        }
    };
    // ln(sin v / v) = -sum zeta(2k)/(k pi^{2k}) v^{2k}, twice antidifferentiated
    let g2 = |u: f64| -> f64 {
        const ZETAS: [f64; 5] = [
            1.6449340668482264, // zeta(2)
            1.0823232337111382, // zeta(4)
            1.0173430619844491, // zeta(6)
            1.0040773561979443, // zeta(8)
            1.0009945751278181, // zeta(10)
        ];
        let mut q2 = 0.0;
        let v2 = (u / 2.0) * (u / 2.0);
        let mut v_pow = v2; // v^{2k}
        for (k0, z) in ZETAS.iter().enumerate() {
            let k = k0 as f64 + 1.0;
            // term -z/(k pi^{2k}) u^{2k} integrated twice: / ((2k+1)(2k+2)),
            // with u^{2k} = 4^k v^{2k}
            let coeff = -z / (k * pi.powf(2.0 * k));
            q2 += coeff * v_pow * 4f64.powf(k) * u * u / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            v_pow *= v2;
        }
        phi_anti(u) + q2
    };
    // Away from the band the pair difference has a triangular distribution of
    // half-width delta, so the rectangle average is the midpoint value plus
    // the curvature term (delta^2/12) g'', g''(u) = -1/(4 sin^2(u/2)); the
    // correction decays like 1/k^4 across the band seam, no kernel jump.
    let corrected_mid = |u: f64| -> f64 {
        let s = (u / 2.0).sin();
        (2.0 * s.abs()).ln() - delta * delta / (48.0 * s * s)
    };
    // rectangle average of g(t - t') over cell pair (i, j)
    let avg_minus = |i: usize, j: usize| -> f64 {
        let d = i as f64 - j as f64;
        if d.abs() <= 6.0 {
            let u = d * delta;
            (g2(u + delta) - 2.0 * g2(u) + g2(u - delta)) / (delta * delta)
        } else {
            corrected_mid(d.abs() * delta)
        }
    };
    // rectangle average of g(t + t'); g2 is used near both singular corners
    // of the sum variable (w = 0 and w = 2 pi, where g(2pi - w) = g(w) makes
    // the series form valid after reflection up to an irrelevant linear term
    // that the second difference kills only if the whole stencil reflects,
    // which it does: all three stencil points sit on the same side)
    let avg_plus = |i: usize, j: usize| -> f64 {
        let s = (i + j) as f64 + 1.0; // midpoint sum / delta
        if s <= 7.0 {
            let w0 = (i + j) as f64 * delta;
            (g2(w0 + 2.0 * delta) - 2.0 * g2(w0 + delta) + g2(w0)) / (delta * delta)
        } else if 2.0 * m as f64 - s <= 7.0 {
            let w0 = 2.0 * pi - ((i + j) as f64 + 2.0) * delta;
            (g2(w0 + 2.0 * delta) - 2.0 * g2(w0 + delta) + g2(w0)) / (delta * delta)
        } else {
            corrected_mid(s * delta)
        }
    };
    // KKT of min m^T K m  s.t.  sum m = 1:  [2K 1; 1^T 0][m; nu] = [0; 1]
    let n = m + 1;
    let mut mat = vec![vec![0.0f64; n]; n];
    for i in 0..m {
        for j in 0..m {
            let log_part = 2f64.ln() - avg_minus(i, j) - avg_plus(i, j);
            let kij = (theta + 1.0) * log_part + h_part(i, j);
            mat[i][j] = 2.0 * kij;
        }
        mat[i][m] = 1.0;
        mat[m][i] = 1.0;
    }
    let mut rhs = vec![0.0f64; n];
    rhs[m] = 1.0;
    let sol = lu_solve_f64(mat, rhs)?;
    let masses = &sol[..m];
    for (i, &mass) in masses.iter().enumerate() {
        if mass < 0.0 {
            return Err(CoreError::NegativeDensity(format!(
                "QP mass {mass:.3e} at cell {i}"
            )));
        }
    }
    // arcsine mass of each cell is exactly 1/M, so density = M * mass
    Ok(masses.iter().map(|&mm| mm * m as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::solve_lambda_e;
    use crate::model::ModelParams;
    use crate::potential::chebyshev_angles;

    #[test]
    fn energy_minimizer_matches_collocation() {
        let model = ModelParams::from_f64(2.0, 3.0, 60).unwrap();
        let c = model.ctx();
        let (mu, _, _) = solve_lambda_e(&model, &c.real(3), 96).unwrap();
        let cells = 1024;
        let density = energy_minimizer_density(2.0, 3.0, 3.0, cells).unwrap();
        let angles = chebyshev_angles(c, cells);
        let mut sup = 0f64;
        for (i, t) in angles.iter().enumerate() {
            let xi = t.clone().cos();
            let reference = mu.density_at_unit(&xi).to_f64();
            sup = sup.max((density[i] - reference).abs());
        }
        assert!(sup < 1e-4, "energy oracle sup-diff {sup}");
    }
}
