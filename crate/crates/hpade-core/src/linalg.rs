//! Dense elimination at working precision.
//!
//! The Hermite-Pade and collocation systems are small (a few hundred unknowns)
//! but brutally ill-conditioned, so everything stays in MPFR floats with
//! pivoted elimination and no cross-precision refinement.

use rayon::prelude::*;
use rug::Float;

use crate::error::{CoreError, Result};
use crate::precision::PrecisionContext;

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<Float>,
    /// Rough growth-based estimate: largest/smallest pivot magnitude.
    pub condition_estimate: Float,
    pub rank_defect: usize,
}

/// Solves `a x = b` by complete-pivot Gaussian elimination.
///
/// Pivots below `entry_max * 10^(-3/4 * digits)` are treated as zero: the
/// corresponding unknowns are fixed at zero (minimal solution) and counted in
/// `rank_defect` instead of aborting.
pub fn solve_dense(
    ctx: PrecisionContext,
    mut a: Vec<Vec<Float>>,
    mut b: Vec<Float>,
) -> Result<SolveReport> {
    let n = a.len();
    if n == 0 {
        return Err(CoreError::ParameterDomain("empty linear system".into()));
    }
    for row in &a {
        if row.len() != n {
            return Err(CoreError::ParameterDomain("non-square linear system".into()));
        }
    }
    let prec = ctx.bits();

    let mut entry_max = ctx.zero();
    for row in &a {
        for v in row {
            if v.cmp_abs(&entry_max) == Some(std::cmp::Ordering::Greater) {
                entry_max = v.clone().abs();
            }
        }
    }
    if entry_max.is_zero() {
        return Err(CoreError::RankDeficient {
            defect: n,
            context: "zero matrix".into(),
        });
    }
    let pivot_floor = Float::with_val(prec, &entry_max * &ctx.pow10_neg(ctx.decimal_digits() * 3 / 4));

    // column permutation: col_of[k] = original column eliminated at step k
    let mut col_of: Vec<usize> = (0..n).collect();
    let mut rank_defect = 0usize;
    let mut min_pivot = Float::with_val(prec, f64::INFINITY);
    let mut max_pivot = ctx.zero();

    for k in 0..n {
        // complete pivot search over the trailing block
        let (mut pr, mut pc) = (k, k);
        let mut best = a[k][col_of[k]].clone().abs();
        for r in k..n {
            for c in k..n {
                if a[r][col_of[c]].cmp_abs(&best) == Some(std::cmp::Ordering::Greater) {
                    best = a[r][col_of[c]].clone().abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= pivot_floor {
            // remaining block is numerically zero; free variables stay zero
            rank_defect = n - k;
            break;
        }
        a.swap(k, pr);
        b.swap(k, pr);
        col_of.swap(k, pc);

        if best.cmp_abs(&min_pivot) == Some(std::cmp::Ordering::Less) {
            min_pivot = best.clone();
        }
        if best.cmp_abs(&max_pivot) == Some(std::cmp::Ordering::Greater) {
            max_pivot = best.clone();
        }

        let pivot_col = col_of[k];
        let (pivot_row, tail) = {
            let (head, tail) = a.split_at_mut(k + 1);
            (&head[k], tail)
        };
        let pivot_val = pivot_row[pivot_col].clone();
        let b_k = b[k].clone();
        let col_slice = &col_of[k..n];
        let b_updates: Vec<(usize, Float)> = tail
            .par_iter_mut()
            .enumerate()
            .map(|(off, row)| {
                let factor = Float::with_val(prec, &row[pivot_col] / &pivot_val);
                for &c in col_slice {
                    let t = Float::with_val(prec, &factor * &pivot_row[c]);
                    row[c] -= t;
                }
                row[pivot_col] = Float::new(prec);
                let db = Float::with_val(prec, &factor * &b_k);
                (k + 1 + off, db)
            })
            .collect();
        for (r, db) in b_updates {
            b[r] -= db;
        }
    }

    let rank = n - rank_defect;
    let mut x = vec![ctx.zero(); n];
    for k in (0..rank).rev() {
        let mut acc = b[k].clone();
        for c in (k + 1)..n {
            let t = Float::with_val(prec, &a[k][col_of[c]] * &x[col_of[c]]);
            acc -= t;
        }
        x[col_of[k]] = Float::with_val(prec, &acc / &a[k][col_of[k]]);
    }

    let condition_estimate = if min_pivot.is_finite() && !min_pivot.is_zero() {
        Float::with_val(prec, &max_pivot / &min_pivot)
    } else {
        Float::with_val(prec, f64::INFINITY)
    };

    Ok(SolveReport {
        solution: x,
        condition_estimate,
        rank_defect,
    })
}

/// Null vector of a rectangular system with one more column than row rank
/// (complete pivoting; the last un-pivoted column is set to 1).
///
/// Reference path for cross-checking the condensed solvers.
pub fn null_vector(ctx: PrecisionContext, mut a: Vec<Vec<Float>>) -> Result<Vec<Float>> {
    let rows = a.len();
    if rows == 0 {
        return Err(CoreError::ParameterDomain("empty system".into()));
    }
    let cols = a[0].len();
    if cols != rows + 1 {
        return Err(CoreError::ParameterDomain(format!(
            "null_vector expects rows+1 columns, got {rows}x{cols}"
        )));
    }
    let prec = ctx.bits();
    let mut entry_max = ctx.zero();
    for row in &a {
        for v in row {
            if v.cmp_abs(&entry_max) == Some(std::cmp::Ordering::Greater) {
                entry_max = v.clone().abs();
            }
        }
    }
    let pivot_floor = Float::with_val(prec, &entry_max * &ctx.pow10_neg(ctx.decimal_digits() * 3 / 4));

    let mut col_of: Vec<usize> = (0..cols).collect();
    for k in 0..rows {
        let (mut pr, mut pc) = (k, k);
        let mut best = a[k][col_of[k]].clone().abs();
        for r in k..rows {
            for c in k..cols {
                if a[r][col_of[c]].cmp_abs(&best) == Some(std::cmp::Ordering::Greater) {
                    best = a[r][col_of[c]].clone().abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= pivot_floor {
            return Err(CoreError::RankDeficient {
                defect: rows - k,
                context: "null space dimension exceeds 1".into(),
            });
        }
        a.swap(k, pr);
        col_of.swap(k, pc);
        let pivot_col = col_of[k];
        let pivot_val = a[k][pivot_col].clone();
        let pivot_row = a[k].clone();
        for row in a.iter_mut().skip(k + 1) {
            let factor = Float::with_val(prec, &row[pivot_col] / &pivot_val);
            for &c in &col_of[k..cols] {
                let t = Float::with_val(prec, &factor * &pivot_row[c]);
                row[c] -= t;
            }
            row[pivot_col] = Float::new(prec);
        }
    }

    // free column = col_of[rows], value 1; back-substitute the rest
    let mut x = vec![ctx.zero(); cols];
    x[col_of[rows]] = ctx.one();
    for k in (0..rows).rev() {
        let mut acc = ctx.zero();
        for c in (k + 1)..cols {
            let t = Float::with_val(prec, &a[k][col_of[c]] * &x[col_of[c]]);
            acc -= t;
        }
        x[col_of[k]] = Float::with_val(prec, &acc / &a[k][col_of[k]]);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(60).unwrap()
    }

    #[test]
    fn solves_small_system() {
        let c = ctx();
        // x + 2y = 5 ; 3x - y = 1  =>  x = 1, y = 2
        let a = vec![
            vec![c.real(1), c.real(2)],
            vec![c.real(3), c.real(-1)],
        ];
        let b = vec![c.real(5), c.real(1)];
        let rep = solve_dense(c, a, b).unwrap();
        assert!(rep.rank_defect == 0);
        assert!((rep.solution[0].to_f64() - 1.0).abs() < 1e-50);
        assert!((rep.solution[1].to_f64() - 2.0).abs() < 1e-50);
    }

    #[test]
    fn reports_rank_defect_and_returns_minimal_solution() {
        let c = ctx();
        // second row is a multiple of the first
        let a = vec![
            vec![c.real(1), c.real(2)],
            vec![c.real(2), c.real(4)],
        ];
        let b = vec![c.real(3), c.real(6)];
        let rep = solve_dense(c, a, b).unwrap();
        assert_eq!(rep.rank_defect, 1);
        // returned solution still satisfies the consistent system
        let r0 = rep.solution[0].to_f64() + 2.0 * rep.solution[1].to_f64();
        assert!((r0 - 3.0).abs() < 1e-40);
    }

    #[test]
    fn null_vector_of_known_kernel() {
        let c = ctx();
        // kernel of [1 1 -1; 1 -1 0] is span{(1,1,2)}
        let a = vec![
            vec![c.real(1), c.real(1), c.real(-1)],
            vec![c.real(1), c.real(-1), c.zero()],
        ];
        let v = null_vector(c, a).unwrap();
        let scale = v[0].to_f64();
        assert!(scale.abs() > 0.0);
        assert!((v[1].to_f64() / scale - 1.0).abs() < 1e-40);
        assert!((v[2].to_f64() / scale - 2.0).abs() < 1e-40);
    }
}
