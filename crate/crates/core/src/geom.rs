//! Projective spaces `PG(n,q)` for `n ≤ 4` over either layer of the tower.
//!
//! Points are stored once in a canonical form — the leftmost nonzero
//! coordinate scaled to 1 — and addressed by dense ids in a fixed enumeration
//! order: first by pivot position, then by the remaining coordinates read as
//! a base-`order` number, most significant first. Ids are therefore stable
//! across runs and machines, and converting between ids and coordinate
//! vectors is O(1) arithmetic.
//!
//! For planes (`n = 2`) the geometry also carries the full line table. Lines
//! are exactly the dual points, so a line's id is the dense id of its
//! coefficient vector; joining two points and meeting two lines are cross
//! products. Higher-dimensional spaces get lines on demand from spans, which
//! is all the cap and spread machinery needs.
//!
//! Subspaces are reduced-row-echelon bases, which are unique per subspace and
//! make equality, membership, and quotients canonical. The quotient of
//! `PG(n,q)` by a subspace `S` re-expresses each point off `S` by reducing it
//! modulo the RREF basis and deleting the pivot coordinates; the result is an
//! honest `PG(m,q)` whose ids are again dense, with the canonical section
//! given by re-inserting zeros at the pivots.

use crate::bits::BitSet;
use crate::field::{Fel, FieldCtx};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Dense id of a point within one [`Geometry`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct PointId(pub u32);

/// Dense id of a line of a plane geometry (the id of its dual point).
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct LineId(pub u32);

/// A canonicalized point: its dense id plus the canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    pub id: PointId,
    pub coords: Vec<Fel>,
}

/// A projective subspace as a unique RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    /// RREF rows ordered by pivot column; empty for the empty subspace.
    pub basis: Vec<Vec<Fel>>,
    /// Pivot column of each basis row.
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Projective dimension (`-1` for the empty subspace).
    pub fn pdim(&self) -> isize {
        self.basis.len() as isize - 1
    }
}

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("zero vector does not define a projective point")]
    ZeroVector,
    #[error("coordinate vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("order {0} is neither q nor q² of the field context")]
    BadOrder(u32),
    #[error("operation requires a plane geometry (n = 2)")]
    NotAPlane,
    #[error("points are equal; they do not span a line")]
    EqualPoints,
    #[error("lines are equal; they do not meet in a single point")]
    EqualLines,
    #[error("point lies inside the subspace being quotiented")]
    InQuotientCenter,
}

/// Number of points of `PG(n, order)`.
pub fn pg_point_count(order: u32, n: usize) -> u64 {
    (0..=n).map(|i| (order as u64).pow(i as u32)).sum()
}

struct LineTable {
    /// Sorted point ids per line.
    points: Vec<Vec<PointId>>,
    /// Sorted line ids through each point.
    through: Vec<Vec<LineId>>,
    /// Point-membership bitset per line.
    masks: Vec<BitSet>,
}

/// One projective space over a fixed field layer.
pub struct Geometry {
    ctx: Arc<FieldCtx>,
    order: u32,
    dim: usize,
    points: Vec<Vec<Fel>>,
    /// `offsets[i]` = number of points whose pivot position precedes `i`.
    offsets: Vec<u64>,
    lines: Option<LineTable>,
}

impl Geometry {
    /// Build `PG(dim, order)`; `order` must be `q` or `q²` of the context.
    /// Planes get their full line table.
    pub fn new(ctx: Arc<FieldCtx>, order: u32, dim: usize) -> Result<Geometry, GeomError> {
        if order != ctx.q() && order != ctx.q2() {
            return Err(GeomError::BadOrder(order));
        }
        let n = dim;
        let mut offsets = Vec::with_capacity(n + 2);
        let mut acc = 0u64;
        for i in 0..=n {
            offsets.push(acc);
            acc += (order as u64).pow((n - i) as u32);
        }
        offsets.push(acc);

        // enumerate canonical points in id order
        let mut points = Vec::with_capacity(acc as usize);
        for pivot in 0..=n {
            let tail = n - pivot;
            for suffix in 0..(order as u64).pow(tail as u32) {
                let mut v = vec![Fel::ZERO; n + 1];
                v[pivot] = Fel::ONE;
                let mut rest = suffix;
                for k in (0..tail).rev() {
                    let base = (order as u64).pow(k as u32);
                    v[pivot + 1 + (tail - 1 - k)] = Fel((rest / base) as u16);
                    rest %= base;
                }
                points.push(v);
            }
        }
        debug_assert_eq!(points.len() as u64, pg_point_count(order, n));

        let mut geom = Geometry {
            ctx,
            order,
            dim,
            points,
            offsets,
            lines: None,
        };
        if dim == 2 {
            geom.lines = Some(geom.build_line_table());
        }
        Ok(geom)
    }

    fn build_line_table(&self) -> LineTable {
        let np = self.points.len();
        let mut points = Vec::with_capacity(np);
        let mut through: Vec<Vec<LineId>> = vec![Vec::new(); np];
        let mut masks = Vec::with_capacity(np);
        for lid in 0..np {
            let coeffs = &self.points[lid];
            // parametrize the solution space of c·x = 0 from its RREF
            let basis = self.null_space_of_functional(coeffs);
            let mut pts: Vec<PointId> = self
                .span_points_of_basis(&basis)
                .into_iter()
                .collect();
            pts.sort_unstable();
            debug_assert_eq!(pts.len() as u64, self.order as u64 + 1);
            let mask = BitSet::from_ids(np, pts.iter().map(|p| p.0 as usize));
            for &p in &pts {
                through[p.0 as usize].push(LineId(lid as u32));
            }
            points.push(pts);
            masks.push(mask);
        }
        LineTable {
            points,
            through,
            masks,
        }
    }

    /// Basis (as rows) of `{x : c·x = 0}` for a nonzero functional `c`.
    fn null_space_of_functional(&self, c: &[Fel]) -> Vec<Vec<Fel>> {
        let n1 = self.dim + 1;
        let pivot = c.iter().position(|&x| x != Fel::ZERO).expect("nonzero");
        let inv = self.ctx.inv(c[pivot]);
        let mut rows = Vec::with_capacity(n1 - 1);
        for j in 0..n1 {
            if j == pivot {
                continue;
            }
            let mut row = vec![Fel::ZERO; n1];
            row[j] = Fel::ONE;
            // choose x_pivot so that c·x = 0
            row[pivot] = self.ctx.neg(self.ctx.mul(inv, c[j]));
            rows.push(row);
        }
        rows
    }

    // ---- parameters ----

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn point_count(&self) -> usize {
        self.points.len()
    }
    pub fn points_iter(&self) -> impl Iterator<Item = PointId> {
        (0..self.points.len() as u32).map(PointId)
    }

    // ---- points ----

    /// Canonical coordinates of a point.
    pub fn coords(&self, p: PointId) -> &[Fel] {
        &self.points[p.0 as usize]
    }

    /// Scale so the leftmost nonzero coordinate is 1.
    pub fn normalize(&self, v: &[Fel]) -> Result<Vec<Fel>, GeomError> {
        if v.len() != self.dim + 1 {
            return Err(GeomError::BadLength {
                got: v.len(),
                expected: self.dim + 1,
            });
        }
        let pivot = v
            .iter()
            .position(|&x| x != Fel::ZERO)
            .ok_or(GeomError::ZeroVector)?;
        let inv = self.ctx.inv(v[pivot]);
        Ok(v.iter().map(|&x| self.ctx.mul(inv, x)).collect())
    }

    /// Canonicalize and locate a coordinate vector.
    pub fn normalize_point(&self, v: &[Fel]) -> Result<ProjPoint, GeomError> {
        let coords = self.normalize(v)?;
        let id = self.id_of_canonical(&coords);
        Ok(ProjPoint { id, coords })
    }

    /// Dense id of an arbitrary (nonzero) coordinate vector.
    pub fn point_id(&self, v: &[Fel]) -> Result<PointId, GeomError> {
        Ok(self.normalize_point(v)?.id)
    }

    fn id_of_canonical(&self, v: &[Fel]) -> PointId {
        let pivot = v.iter().position(|&x| x != Fel::ZERO).expect("canonical");
        debug_assert_eq!(v[pivot], Fel::ONE);
        let mut suffix = 0u64;
        for &c in &v[pivot + 1..] {
            suffix = suffix * self.order as u64 + c.0 as u64;
        }
        PointId((self.offsets[pivot] + suffix) as u32)
    }

    /// Build a point from raw `u16` encodings (test and CLI convenience).
    pub fn point_from_raw(&self, raw: &[u16]) -> Result<PointId, GeomError> {
        let v: Vec<Fel> = raw.iter().map(|&x| Fel(x)).collect();
        self.point_id(&v)
    }

    // ---- lines of planes ----

    fn table(&self) -> Result<&LineTable, GeomError> {
        self.lines.as_ref().ok_or(GeomError::NotAPlane)
    }

    pub fn line_count(&self) -> usize {
        self.lines.as_ref().map_or(0, |t| t.points.len())
    }

    /// Sorted points of a line.
    pub fn line_points(&self, l: LineId) -> &[PointId] {
        &self.lines.as_ref().expect("plane").points[l.0 as usize]
    }

    /// Sorted lines through a point.
    pub fn lines_through(&self, p: PointId) -> &[LineId] {
        &self.lines.as_ref().expect("plane").through[p.0 as usize]
    }

    /// Point-membership bitset of a line.
    pub fn line_mask(&self, l: LineId) -> &BitSet {
        &self.lines.as_ref().expect("plane").masks[l.0 as usize]
    }

    /// Dual coefficient vector of a line.
    pub fn line_coeffs(&self, l: LineId) -> &[Fel] {
        &self.points[l.0 as usize]
    }

    pub fn on_line(&self, l: LineId, p: PointId) -> bool {
        self.table().expect("plane").masks[l.0 as usize].contains(p.0 as usize)
    }

    fn cross(&self, a: &[Fel], b: &[Fel]) -> Vec<Fel> {
        let c = &self.ctx;
        vec![
            c.sub(c.mul(a[1], b[2]), c.mul(a[2], b[1])),
            c.sub(c.mul(a[2], b[0]), c.mul(a[0], b[2])),
            c.sub(c.mul(a[0], b[1]), c.mul(a[1], b[0])),
        ]
    }

    /// The line joining two distinct points of a plane.
    pub fn line_through(&self, a: PointId, b: PointId) -> Result<LineId, GeomError> {
        self.table()?;
        if a == b {
            return Err(GeomError::EqualPoints);
        }
        let c = self.cross(self.coords(a), self.coords(b));
        let id = self.point_id(&c)?;
        Ok(LineId(id.0))
    }

    /// The point where two distinct lines of a plane meet.
    pub fn meet(&self, a: LineId, b: LineId) -> Result<PointId, GeomError> {
        self.table()?;
        if a == b {
            return Err(GeomError::EqualLines);
        }
        let c = self.cross(self.line_coeffs(a), self.line_coeffs(b));
        self.point_id(&c)
    }

    /// Points of the line through `a` and `b` in any dimension, sorted.
    pub fn line_points_dynamic(&self, a: PointId, b: PointId) -> Result<Vec<PointId>, GeomError> {
        if a == b {
            return Err(GeomError::EqualPoints);
        }
        let va = self.coords(a).to_vec();
        let vb = self.coords(b).to_vec();
        let mut out = Vec::with_capacity(self.order as usize + 1);
        out.push(self.id_of_canonical(&vb));
        for lam in 0..self.order as u16 {
            let v: Vec<Fel> = va
                .iter()
                .zip(&vb)
                .map(|(&x, &y)| self.ctx.add(x, self.ctx.mul(Fel(lam), y)))
                .collect();
            out.push(self.point_id(&v)?);
        }
        out.sort_unstable();
        out.dedup();
        debug_assert_eq!(out.len(), self.order as usize + 1);
        Ok(out)
    }

    // ---- dual hyperplanes (any dimension) ----

    /// Hyperplanes are indexed by their dual point id.
    pub fn hyperplane_count(&self) -> usize {
        self.points.len()
    }

    pub fn hyperplane_coeffs(&self, idx: usize) -> &[Fel] {
        &self.points[idx]
    }

    pub fn on_hyperplane(&self, coeffs: &[Fel], p: PointId) -> bool {
        self.eval_functional(coeffs, p) == Fel::ZERO
    }

    pub fn eval_functional(&self, coeffs: &[Fel], p: PointId) -> Fel {
        let v = self.coords(p);
        let mut acc = Fel::ZERO;
        for (&c, &x) in coeffs.iter().zip(v) {
            acc = self.ctx.add(acc, self.ctx.mul(c, x));
        }
        acc
    }

    /// The subspace `{x : c·x = 0}` of a nonzero functional.
    pub fn hyperplane_subspace(&self, coeffs: &[Fel]) -> Subspace {
        self.rref(self.null_space_of_functional(coeffs))
    }

    // ---- subspaces ----

    fn rref(&self, mut rows: Vec<Vec<Fel>>) -> Subspace {
        let ctx = &self.ctx;
        let n1 = self.dim + 1;
        let mut basis: Vec<Vec<Fel>> = Vec::new();
        for row in rows.iter_mut() {
            let mut v = row.clone();
            // reduce against existing basis
            for b in &basis {
                let piv = b.iter().position(|&x| x != Fel::ZERO).expect("basis rows nonzero");
                let c = v[piv];
                if c != Fel::ZERO {
                    for k in 0..n1 {
                        v[k] = ctx.sub(v[k], ctx.mul(c, b[k]));
                    }
                }
            }
            if let Some(piv) = v.iter().position(|&x| x != Fel::ZERO) {
                let inv = ctx.inv(v[piv]);
                for x in v.iter_mut() {
                    *x = ctx.mul(inv, *x);
                }
                // clear this pivot column in earlier rows
                for b in basis.iter_mut() {
                    let c = b[piv];
                    if c != Fel::ZERO {
                        for k in 0..n1 {
                            b[k] = ctx.sub(b[k], ctx.mul(c, v[k]));
                        }
                    }
                }
                basis.push(v);
            }
        }
        basis.sort_by_key(|b| b.iter().position(|&x| x != Fel::ZERO).unwrap());
        let pivots = basis
            .iter()
            .map(|b| b.iter().position(|&x| x != Fel::ZERO).unwrap())
            .collect();
        Subspace { basis, pivots }
    }

    /// Span of a set of points as a canonical RREF subspace.
    pub fn span(&self, pts: &[PointId]) -> Subspace {
        let rows: Vec<Vec<Fel>> = pts.iter().map(|&p| self.coords(p).to_vec()).collect();
        self.rref(rows)
    }

    /// Span of raw coordinate vectors.
    pub fn span_vectors(&self, rows: Vec<Vec<Fel>>) -> Subspace {
        self.rref(rows)
    }

    /// Reduce `v` modulo the subspace basis; the result is zero iff `v ∈ S`.
    fn reduce_mod(&self, s: &Subspace, v: &[Fel]) -> Vec<Fel> {
        let ctx = &self.ctx;
        let mut out = v.to_vec();
        for (b, &piv) in s.basis.iter().zip(&s.pivots) {
            let c = out[piv];
            if c != Fel::ZERO {
                for k in 0..out.len() {
                    out[k] = ctx.sub(out[k], ctx.mul(c, b[k]));
                }
            }
        }
        out
    }

    pub fn subspace_contains(&self, s: &Subspace, p: PointId) -> bool {
        self.reduce_mod(s, self.coords(p))
            .iter()
            .all(|&x| x == Fel::ZERO)
    }

    fn span_points_of_basis(&self, basis: &[Vec<Fel>]) -> Vec<PointId> {
        let r = basis.len();
        let n1 = self.dim + 1;
        let mut out = Vec::new();
        // canonical projective coefficient classes: pivot-style enumeration
        for lead in 0..r {
            let tail = r - lead - 1;
            for suffix in 0..(self.order as u64).pow(tail as u32) {
                let mut coeff = vec![Fel::ZERO; r];
                coeff[lead] = Fel::ONE;
                let mut rest = suffix;
                for k in (0..tail).rev() {
                    let base = (self.order as u64).pow(k as u32);
                    coeff[lead + 1 + (tail - 1 - k)] = Fel((rest / base) as u16);
                    rest %= base;
                }
                let mut v = vec![Fel::ZERO; n1];
                for (ci, row) in coeff.iter().zip(basis) {
                    if *ci != Fel::ZERO {
                        for k in 0..n1 {
                            v[k] = self.ctx.add(v[k], self.ctx.mul(*ci, row[k]));
                        }
                    }
                }
                out.push(self.point_id(&v).expect("independent basis"));
            }
        }
        out
    }

    /// All points of a subspace, sorted by id.
    pub fn subspace_points(&self, s: &Subspace) -> Vec<PointId> {
        let mut out = self.span_points_of_basis(&s.basis);
        out.sort_unstable();
        debug_assert_eq!(
            out.len() as u64,
            if s.rank() == 0 {
                0
            } else {
                (0..s.rank()).map(|i| (self.order as u64).pow(i as u32)).sum()
            }
        );
        out
    }

    /// Quotient map `PG(n,q) → PG(n - rank(S), q)` modulo the subspace `S`.
    pub fn quotient(&self, s: &Subspace) -> Result<Quotient, GeomError> {
        let m = self.dim - s.rank(); // target projective dimension
        let target = Geometry::new(self.ctx.clone(), self.order, m)?;
        Ok(Quotient {
            center: s.clone(),
            target,
        })
    }
}

/// The quotient geometry `PG(n,q)/S` together with the projection and its
/// canonical section.
pub struct Quotient {
    center: Subspace,
    target: Geometry,
}

impl Quotient {
    pub fn center(&self) -> &Subspace {
        &self.center
    }

    pub fn target(&self) -> &Geometry {
        &self.target
    }

    /// Image of a source point; `Err` if the point lies in the center.
    pub fn project(&self, source: &Geometry, p: PointId) -> Result<PointId, GeomError> {
        let reduced = source.reduce_mod(&self.center, source.coords(p));
        if reduced.iter().all(|&x| x == Fel::ZERO) {
            return Err(GeomError::InQuotientCenter);
        }
        let kept: Vec<Fel> = reduced
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.center.pivots.contains(i))
            .map(|(_, &x)| x)
            .collect();
        self.target.point_id(&kept)
    }

    /// Canonical section: insert zeros at the deleted pivot coordinates.
    pub fn lift(&self, source: &Geometry, p: PointId) -> PointId {
        let tv = self.target.coords(p);
        let n1 = source.dim + 1;
        let mut v = Vec::with_capacity(n1);
        let mut it = tv.iter();
        for i in 0..n1 {
            if self.center.pivots.contains(&i) {
                v.push(Fel::ZERO);
            } else {
                v.push(*it.next().expect("length"));
            }
        }
        source.point_id(&v).expect("section of a point is a point")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geo(q_plane: u32, dim: usize) -> Geometry {
        // q_plane is the *field order* for this geometry; find the tower
        let ctx = match crate::field::split_prime_power(q_plane) {
            Ok((p, h)) if h % 2 == 0 => {
                // treat as extension layer of the tower over sqrt order
                Arc::new(FieldCtx::build(p, h / 2, None, None).unwrap())
            }
            _ => Arc::new(FieldCtx::build_q(q_plane).unwrap()),
        };
        let order = if ctx.q() == q_plane { ctx.q() } else { ctx.q2() };
        Geometry::new(ctx, order, dim).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(geo(9, 2).point_count(), 91); // PG(2,9)
        assert_eq!(geo(3, 4).point_count(), 121); // PG(4,3)
        assert_eq!(geo(4, 3).point_count(), 85); // PG(3,4)
        assert_eq!(geo(25, 2).point_count(), 651); // PG(2,25)
    }

    #[test]
    fn plane_line_structure() {
        let g = geo(9, 2);
        assert_eq!(g.line_count(), 91);
        for l in 0..g.line_count() {
            assert_eq!(g.line_points(LineId(l as u32)).len(), 10);
        }
        for p in g.points_iter() {
            assert_eq!(g.lines_through(p).len(), 10);
        }
    }

    #[test]
    fn normalize_example_over_f5() {
        let g = geo(5, 2);
        let v = [Fel(0), Fel(2), Fel(4)];
        let n = g.normalize(&v).unwrap();
        assert_eq!(n, vec![Fel(0), Fel(1), Fel(2)]);
        assert!(g.normalize(&[Fel(0), Fel(0), Fel(0)]).is_err());
    }

    #[test]
    fn id_coord_roundtrip() {
        let g = geo(4, 3);
        for p in g.points_iter() {
            let c = g.coords(p).to_vec();
            assert_eq!(g.point_id(&c).unwrap(), p);
        }
    }

    #[test]
    fn scalar_multiples_share_an_id() {
        let g = geo(4, 2);
        for p in g.points_iter() {
            for s in 1..4u16 {
                let v: Vec<Fel> = g
                    .coords(p)
                    .iter()
                    .map(|&x| g.ctx().mul(Fel(s), x))
                    .collect();
                assert_eq!(g.point_id(&v).unwrap(), p);
            }
        }
    }

    #[test]
    fn join_and_meet_agree_with_line_table() {
        let g = geo(4, 2);
        for l in 0..g.line_count() {
            let lid = LineId(l as u32);
            let pts = g.line_points(lid);
            assert_eq!(g.line_through(pts[0], pts[1]).unwrap(), lid);
        }
        let l1 = LineId(0);
        let l2 = LineId(5);
        let x = g.meet(l1, l2).unwrap();
        assert!(g.on_line(l1, x) && g.on_line(l2, x));
    }

    #[test]
    fn dynamic_line_matches_plane_table() {
        let g = geo(9, 2);
        let a = PointId(3);
        let b = PointId(40);
        let l = g.line_through(a, b).unwrap();
        let dynamic = g.line_points_dynamic(a, b).unwrap();
        assert_eq!(dynamic, g.line_points(l));
    }

    #[test]
    fn span_of_two_points_is_a_line() {
        let g = geo(3, 4);
        let a = PointId(0);
        let b = PointId(77);
        let s = g.span(&[a, b]);
        assert_eq!(s.pdim(), 1);
        let pts = g.subspace_points(&s);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts, g.line_points_dynamic(a, b).unwrap());
    }

    #[test]
    fn rref_is_generating_set_independent() {
        let g = geo(3, 4);
        let pts = [PointId(1), PointId(17), PointId(60)];
        let s1 = g.span(&pts);
        let all = g.subspace_points(&s1);
        // re-span from three other points of the same subspace
        let s2 = g.span(&[all[4], all[1], all[8]]);
        if s2.rank() == s1.rank() {
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn quotient_by_line_has_constant_fibers() {
        let g = geo(3, 4);
        let t = g.span(&[
            g.point_from_raw(&[0, 0, 1, 0, 0]).unwrap(),
            g.point_from_raw(&[0, 0, 0, 1, 0]).unwrap(),
        ]);
        assert_eq!(t.pdim(), 1);
        let quot = g.quotient(&t).unwrap();
        assert_eq!(quot.target().point_count(), 13); // PG(2,3)
        let mut fiber = vec![0usize; 13];
        for p in g.points_iter() {
            match quot.project(&g, p) {
                Ok(img) => fiber[img.0 as usize] += 1,
                Err(_) => assert!(g.subspace_contains(&t, p)),
            }
        }
        assert!(fiber.iter().all(|&c| c == 9), "fibers must all have q² = 9 points");
        // lift is a genuine section
        for img in quot.target().points_iter() {
            let up = quot.lift(&g, img);
            assert_eq!(quot.project(&g, up).unwrap(), img);
        }
    }

    #[test]
    fn quotient_preserves_collinearity() {
        let g = geo(3, 4);
        let v = g.point_from_raw(&[0, 0, 1, 0, 0]).unwrap();
        let center = g.span(&[v]);
        let quot = g.quotient(&center).unwrap();
        assert_eq!(quot.target().point_count(), 40); // PG(3,3)
        let a = g.point_from_raw(&[1, 0, 0, 0, 1]).unwrap();
        let b = g.point_from_raw(&[0, 1, 2, 1, 1]).unwrap();
        for &c in g.line_points_dynamic(a, b).unwrap().iter() {
            let (ia, ib, ic) = (
                quot.project(&g, a).unwrap(),
                quot.project(&g, b).unwrap(),
                quot.project(&g, c).unwrap(),
            );
            let s = quot.target().span(&[ia, ib, ic]);
            assert!(s.rank() <= 2, "images of collinear points stay collinear");
        }
    }

    #[test]
    fn hyperplane_scan_in_solid() {
        let g = geo(2, 3); // PG(3,2)
        assert_eq!(g.hyperplane_count(), 15);
        for idx in 0..g.hyperplane_count() {
            let coeffs = g.hyperplane_coeffs(idx).to_vec();
            let count = g
                .points_iter()
                .filter(|&p| g.on_hyperplane(&coeffs, p))
                .count();
            assert_eq!(count, 7); // PG(2,2) inside PG(3,2)
            let sub = g.hyperplane_subspace(&coeffs);
            assert_eq!(sub.pdim(), 2);
            assert_eq!(g.subspace_points(&sub).len(), 7);
        }
    }

    proptest! {
        #[test]
        fn span_is_idempotent_under_member_addition(seed in 0u64..5000) {
            let g = geo(3, 3);
            let n = g.point_count() as u64;
            let a = PointId(((seed * 7919) % n) as u32);
            let b = PointId(((seed * 104729 + 1) % n) as u32);
            let s = g.span(&[a, b]);
            let pts = g.subspace_points(&s);
            let extra = pts[(seed % pts.len() as u64) as usize];
            let s2 = g.span(&[a, b, extra]);
            prop_assert_eq!(s, s2);
        }
    }
}
