//! Small dense linear algebra over a field context.
//!
//! The geometry layer keeps its own RREF for subspaces; this module serves
//! the handful of places that need honest equation solving: projective frame
//! matrices (3×3), subline parameter changes (2×2), conic fitting, and the
//! Hermitian-form solver, all of which reduce to square solves or null
//! spaces of modest systems.

use crate::field::{Fel, FieldCtx};

/// Solve `A·x = b` for square `A`; `None` if `A` is singular.
pub fn solve_square(ctx: &FieldCtx, a: &[Vec<Fel>], b: &[Fel]) -> Option<Vec<Fel>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Fel>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != Fel::ZERO)?;
        m.swap(col, piv);
        let inv = ctx.inv(m[col][col]);
        for k in col..=n {
            m[col][k] = ctx.mul(inv, m[col][k]);
        }
        for r in 0..n {
            if r != col && m[r][col] != Fel::ZERO {
                let f = m[r][col];
                for k in col..=n {
                    let sub = ctx.mul(f, m[col][k]);
                    m[r][k] = ctx.sub(m[r][k], sub);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

/// Basis of the null space `{x : R·x = 0}` for an `m×ncols` system.
pub fn null_space(ctx: &FieldCtx, rows: &[Vec<Fel>], ncols: usize) -> Vec<Vec<Fel>> {
    // row-reduce a working copy
    let mut m: Vec<Vec<Fel>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..m.len()).find(|&r| m[r][col] != Fel::ZERO) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = ctx.inv(m[rank][col]);
        for k in 0..ncols {
            m[rank][k] = ctx.mul(inv, m[rank][k]);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != Fel::ZERO {
                let f = m[r][col];
                for k in 0..ncols {
                    let sub = ctx.mul(f, m[rank][k]);
                    m[r][k] = ctx.sub(m[r][k], sub);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Fel::ZERO; ncols];
        v[free] = Fel::ONE;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = ctx.neg(m[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Rank of the row space.
pub fn rank(ctx: &FieldCtx, rows: &[Vec<Fel>], ncols: usize) -> usize {
    ncols - null_space(ctx, rows, ncols).len()
}

/// Monomial row `[x², y², z², yz, xz, xy]` of a plane point, the evaluation
/// frame shared by [`conic_null_space`] and [`eval_conic`].
pub fn conic_row(ctx: &FieldCtx, v: &[Fel]) -> Vec<Fel> {
    let (x, y, z) = (v[0], v[1], v[2]);
    vec![
        ctx.mul(x, x),
        ctx.mul(y, y),
        ctx.mul(z, z),
        ctx.mul(y, z),
        ctx.mul(x, z),
        ctx.mul(x, y),
    ]
}

/// Coefficient vectors of all conics through the given plane points
/// (null space of the 6-monomial incidence system).
pub fn conic_null_space(ctx: &FieldCtx, pts: &[&[Fel]]) -> Vec<Vec<Fel>> {
    let rows: Vec<Vec<Fel>> = pts.iter().map(|v| conic_row(ctx, v)).collect();
    null_space(ctx, &rows, 6)
}

/// Evaluate a 6-coefficient conic at a plane point.
pub fn eval_conic(ctx: &FieldCtx, c: &[Fel], v: &[Fel]) -> Fel {
    conic_row(ctx, v)
        .iter()
        .zip(c)
        .fold(Fel::ZERO, |acc, (&m, &ci)| ctx.add(acc, ctx.mul(m, ci)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_solve_over_f9() {
        let ctx = FieldCtx::build_q(3).unwrap();
        // i = Fel(3): solve [[1, i], [i, 1]]·x = [2, 0]; det = 1 - i² = 2 ≠ 0
        let a = vec![vec![Fel(1), Fel(3)], vec![Fel(3), Fel(1)]];
        let b = vec![Fel(2), Fel(0)];
        let x = solve_square(&ctx, &a, &b).unwrap();
        for (row, &rhs) in a.iter().zip(&b) {
            let got = row
                .iter()
                .zip(&x)
                .fold(Fel::ZERO, |acc, (&c, &xi)| ctx.add(acc, ctx.mul(c, xi)));
            assert_eq!(got, rhs);
        }
        // singular system: second row is twice the first (2·2 = 1 in F_3)
        let s = vec![vec![Fel(1), Fel(2)], vec![Fel(2), Fel(1)]];
        assert!(solve_square(&ctx, &s, &b).is_none());
    }

    #[test]
    fn null_space_dimensions() {
        let ctx = FieldCtx::build_q(4).unwrap();
        // one independent equation in 3 unknowns over F_16
        let rows = vec![vec![Fel(1), Fel(5), Fel(9)], vec![Fel(2), Fel(10), Fel(1)]];
        let ns = null_space(&ctx, &rows, 3);
        assert_eq!(ns.len() + rank(&ctx, &rows, 3), 3);
        for v in &ns {
            for row in &rows {
                let got = row
                    .iter()
                    .zip(v)
                    .fold(Fel::ZERO, |acc, (&c, &xi)| ctx.add(acc, ctx.mul(c, xi)));
                assert_eq!(got, Fel::ZERO);
            }
        }
    }
}
