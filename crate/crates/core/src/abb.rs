//! The André/Bruck–Bose correspondence between `PG(2,q²)` and `PG(4,q)`.
//!
//! Fix the line `ℓ∞ = {Z = 0}` of the plane and the hyperplane
//! `H∞ = {Z = 0}` of the space, coordinates `(X : Y : Z)` over `F_{q²}` and
//! `(X₀ : X₁ : Y₀ : Y₁ : Z)` over `F_q`. Field reduction sends the point
//! `(a : b : 0)` of `ℓ∞` to the line `{(λa, λb) : λ ∈ F_{q²}}` read in
//! `F_q`-coordinates: the `q²+1` resulting lines form the Desarguesian
//! spread of `H∞`, and `(x : y : 1) ↦ (x₀ : x₁ : y₀ : y₁ : 1)` with
//! `x = x₀ + x₁ω` matches affine points bijectively. Lines of the plane
//! other than `ℓ∞` become the planes of `PG(4,q)` meeting `H∞` in exactly a
//! spread line. `T` denotes the spread line of the distinguished point
//! `P∞ = (0 : 1 : 0)`.
//!
//! Transfer of Baer subobjects:
//! - a subline tangent to `ℓ∞` ↔ a line of `PG(4,q)` with one point in `H∞`;
//! - an external subline ↔ a *Baer conic*: a `(q+1)`-arc in a plane meeting
//!   `H∞` in a spread line external to it;
//! - a subplane secant to `ℓ∞` ↔ a plane meeting `H∞` in a non-spread line;
//! - a subplane tangent to `ℓ∞` at `W` ↔ a *Baer ruled cubic*: `q+1`
//!   pairwise-disjoint generator lines, one through each point of the
//!   directrix `spread(W)`, each meeting a base Baer conic once.
//!
//! [`AbbModel::ruled_cubic_of`] mechanizes the dichotomy for two lines not
//! in `H∞`: through distinct points of a common spread line and skew, they
//! lie on a unique Baer ruled cubic; through the same point (necessarily
//! coplanar), they lie on a unique secant-subplane image. Both are built by
//! pulling the lines back to tangent sublines, spanning their unique Baer
//! subplane, and transferring it forward.

use crate::baer::{self, BaerError};
use crate::field::{Fel, FieldCtx};
use crate::geom::{Geometry, GeomError, LineId, PointId, Subspace};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AbbError {
    #[error("plane point lies on ℓ∞; its image is a spread line, not a point")]
    PlanePointAtInfinity,
    #[error("space point lies on H∞; it has no affine preimage")]
    SpacePointAtInfinity,
    #[error("ℓ∞ itself has no image plane")]
    LineIsInfinity,
    #[error("subline lies inside ℓ∞ and has no affine transfer")]
    SublineAtInfinity,
    #[error("points do not determine a single line of PG(4,q)")]
    NotALine,
    #[error("the two lines coincide")]
    SameLine,
    #[error("line lies inside H∞")]
    LineInHinf,
    #[error("infinite points lie on different spread lines; their join is not a spread line")]
    NotASpreadLine,
    #[error("lines meet affinely and span a plane through a spread line")]
    CoplanarThroughSpreadLine,
    #[error("lines span a plane meeting H∞ in a spread line; no secant subplane")]
    PlaneThroughSpreadLine,
    #[error("cached spread tables have the wrong shape for this field tower")]
    BadCacheTables,
    #[error(transparent)]
    Baer(#[from] BaerError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Image of a Baer subline under the correspondence.
#[derive(Clone, Debug)]
pub enum SublineTransfer {
    /// Tangent subline: a full line of `PG(4,q)`, one point in `H∞`.
    Line {
        points: Vec<PointId>,
        infinity_point: PointId,
        spread_index: usize,
    },
    /// External subline: a Baer conic, all `q+1` points affine. The index
    /// names the spread line in which the conic's plane meets `H∞`.
    Conic {
        points: Vec<PointId>,
        spread_index: usize,
    },
}

/// A Baer ruled cubic: the space model of a Baer subplane tangent to `ℓ∞`.
#[derive(Clone, Debug)]
pub struct RuledCubic {
    /// Index of the directrix in the spread.
    pub directrix_index: usize,
    /// The directrix spread line (`q+1` points of `H∞`).
    pub directrix: Vec<PointId>,
    /// The `q²+q` affine points, sorted.
    pub affine_points: Vec<PointId>,
    /// `q+1` pairwise-disjoint generator lines, ordered by their directrix
    /// point; each is a full space line (`q` affine points + 1 on the
    /// directrix).
    pub generators: Vec<Vec<PointId>>,
    /// A base Baer conic: a plane section avoiding the directrix that meets
    /// every generator exactly once.
    pub base_conic: Vec<PointId>,
    /// The tangent Baer subplane of the plane model this cubic represents.
    pub subplane: Vec<PointId>,
}

impl RuledCubic {
    /// Full point set: affine points plus directrix, sorted.
    pub fn points(&self) -> Vec<PointId> {
        let mut out = self.affine_points.clone();
        out.extend_from_slice(&self.directrix);
        out.sort_unstable();
        out
    }
}

/// Result of [`AbbModel::ruled_cubic_of`]: both branches of the two-line
/// dichotomy are constructions, not failures.
#[derive(Clone, Debug)]
pub enum RuledCubicOutcome {
    /// Distinct infinite points on a common spread line, lines skew.
    Cubic(RuledCubic),
    /// Same infinite point: the unique plane through both lines meets `H∞`
    /// in a non-spread line, i.e. it models a secant Baer subplane.
    SecantPlane {
        plane: Subspace,
        /// The secant Baer subplane of the plane model, sorted.
        subplane: Vec<PointId>,
    },
}

const NOT_IN_SPREAD: u32 = u32::MAX;

/// The fixed correspondence data: both geometries, the spread, and the maps.
pub struct AbbModel {
    ctx: Arc<FieldCtx>,
    plane: Geometry,
    space: Geometry,
    ell_inf: LineId,
    /// Spread lines in `ℓ∞`-point-id order; each sorted.
    spread: Vec<Vec<PointId>>,
    /// Spread index of each space point (`NOT_IN_SPREAD` for affine points).
    spread_of: Vec<u32>,
    /// Points of `ℓ∞` in id order; position = spread index.
    linf_points: Vec<PointId>,
    t_index: usize,
}

impl AbbModel {
    pub fn new(ctx: Arc<FieldCtx>) -> Result<AbbModel, AbbError> {
        let plane = Geometry::new(ctx.clone(), ctx.q2(), 2)?;
        let space = Geometry::new(ctx.clone(), ctx.q(), 4)?;
        let ell_inf = LineId(plane.point_id(&[Fel::ZERO, Fel::ZERO, Fel::ONE])?.0);
        let linf_points = plane.line_points(ell_inf).to_vec();

        let mut spread = Vec::with_capacity(linf_points.len());
        let mut spread_of = vec![NOT_IN_SPREAD; space.point_count()];
        for (i, &w) in linf_points.iter().enumerate() {
            let wc = plane.coords(w).to_vec();
            debug_assert_eq!(wc[2], Fel::ZERO);
            let mut pts = Vec::with_capacity(ctx.q() as usize + 1);
            for lam in ctx.elements().skip(1) {
                let (x0, x1) = ctx.split(ctx.mul(lam, wc[0]));
                let (y0, y1) = ctx.split(ctx.mul(lam, wc[1]));
                pts.push(space.point_id(&[x0, x1, y0, y1, Fel::ZERO])?);
            }
            pts.sort_unstable();
            pts.dedup();
            assert_eq!(pts.len(), ctx.q() as usize + 1, "field reduction gives a line");
            for &p in &pts {
                assert_eq!(
                    spread_of[p.0 as usize], NOT_IN_SPREAD,
                    "spread lines must be pairwise disjoint"
                );
                spread_of[p.0 as usize] = i as u32;
            }
            spread.push(pts);
        }
        // partition: membership in a spread line ⟺ membership in H∞
        debug_assert!(space.points_iter().all(|p| {
            (space.coords(p)[4] == Fel::ZERO) == (spread_of[p.0 as usize] != NOT_IN_SPREAD)
        }));

        let p_inf = plane.point_id(&[Fel::ZERO, Fel::ONE, Fel::ZERO])?;
        let t_index = linf_points.binary_search(&p_inf).expect("P∞ lies on ℓ∞");
        Ok(AbbModel {
            ctx,
            plane,
            space,
            ell_inf,
            spread,
            spread_of,
            linf_points,
            t_index,
        })
    }

    /// Rebuilds a model from a cached spread table, skipping the field
    /// reduction. The per-point index is rederived, so the only table that
    /// has to survive a round trip is the spread itself. Shape is checked
    /// (line count, line length, sortedness, disjointness); content
    /// integrity is the cache's job.
    pub(crate) fn from_parts(
        ctx: Arc<FieldCtx>,
        spread: Vec<Vec<PointId>>,
    ) -> Result<AbbModel, AbbError> {
        let plane = Geometry::new(ctx.clone(), ctx.q2(), 2)?;
        let space = Geometry::new(ctx.clone(), ctx.q(), 4)?;
        let ell_inf = LineId(plane.point_id(&[Fel::ZERO, Fel::ZERO, Fel::ONE])?.0);
        let linf_points = plane.line_points(ell_inf).to_vec();
        let line_len = ctx.q() as usize + 1;
        if spread.len() != linf_points.len()
            || spread
                .iter()
                .any(|l| l.len() != line_len || !l.windows(2).all(|w| w[0] < w[1]))
        {
            return Err(AbbError::BadCacheTables);
        }
        let mut spread_of = vec![NOT_IN_SPREAD; space.point_count()];
        for (i, line) in spread.iter().enumerate() {
            for &pt in line {
                let slot = spread_of
                    .get_mut(pt.0 as usize)
                    .ok_or(AbbError::BadCacheTables)?;
                if *slot != NOT_IN_SPREAD {
                    return Err(AbbError::BadCacheTables);
                }
                *slot = i as u32;
            }
        }
        let p_inf = plane.point_id(&[Fel::ZERO, Fel::ONE, Fel::ZERO])?;
        let t_index = linf_points.binary_search(&p_inf).expect("P∞ lies on ℓ∞");
        Ok(AbbModel {
            ctx,
            plane,
            space,
            ell_inf,
            spread,
            spread_of,
            linf_points,
            t_index,
        })
    }

    /// The one derived table worth caching: the spread lines, in ℓ∞ order.
    pub(crate) fn spread_lines(&self) -> &[Vec<PointId>] {
        &self.spread
    }

    // ---- structure accessors ----

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    pub fn plane(&self) -> &Geometry {
        &self.plane
    }
    pub fn space(&self) -> &Geometry {
        &self.space
    }
    pub fn ell_inf(&self) -> LineId {
        self.ell_inf
    }
    pub fn spread_count(&self) -> usize {
        self.spread.len()
    }
    pub fn spread_line(&self, i: usize) -> &[PointId] {
        &self.spread[i]
    }
    /// RREF subspace of a spread line (for quotients and spans).
    pub fn spread_subspace(&self, i: usize) -> Subspace {
        self.space.span(&self.spread[i][..2])
    }
    /// The `ℓ∞` point whose image the spread line is.
    pub fn linf_point(&self, i: usize) -> PointId {
        self.linf_points[i]
    }
    /// Index of the distinguished spread line `T`.
    pub fn t_index(&self) -> usize {
        self.t_index
    }
    /// The distinguished spread line `T = spread(P∞)`.
    pub fn t_line(&self) -> &[PointId] {
        &self.spread[self.t_index]
    }
    /// The distinguished point `P∞ = (0 : 1 : 0)`.
    pub fn p_infinity(&self) -> PointId {
        self.linf_points[self.t_index]
    }

    pub fn is_affine_plane_point(&self, p: PointId) -> bool {
        self.plane.coords(p)[2] != Fel::ZERO
    }
    pub fn is_affine_space_point(&self, p: PointId) -> bool {
        self.space.coords(p)[4] != Fel::ZERO
    }
    /// Which spread line an `H∞` point lies on.
    pub fn spread_index_of_space_point(&self, p: PointId) -> Option<usize> {
        match self.spread_of[p.0 as usize] {
            NOT_IN_SPREAD => None,
            i => Some(i as usize),
        }
    }
    /// Spread index of a point of `ℓ∞`.
    pub fn spread_index_of_linf_point(&self, w: PointId) -> Option<usize> {
        self.linf_points.binary_search(&w).ok()
    }

    // ---- point maps ----

    /// Affine plane point → affine space point.
    pub fn map_point(&self, p: PointId) -> Result<PointId, AbbError> {
        let c = self.plane.coords(p);
        if c[2] == Fel::ZERO {
            return Err(AbbError::PlanePointAtInfinity);
        }
        let zi = self.ctx.inv(c[2]);
        let (x0, x1) = self.ctx.split(self.ctx.mul(zi, c[0]));
        let (y0, y1) = self.ctx.split(self.ctx.mul(zi, c[1]));
        Ok(self.space.point_id(&[x0, x1, y0, y1, Fel::ONE])?)
    }

    /// Affine space point → affine plane point.
    pub fn map_point_back(&self, s: PointId) -> Result<PointId, AbbError> {
        let c = self.space.coords(s);
        if c[4] == Fel::ZERO {
            return Err(AbbError::SpacePointAtInfinity);
        }
        let zi = self.ctx.inv(c[4]);
        let x = self.ctx.join(self.ctx.mul(zi, c[0]), self.ctx.mul(zi, c[1]));
        let y = self.ctx.join(self.ctx.mul(zi, c[2]), self.ctx.mul(zi, c[3]));
        Ok(self.plane.point_id(&[x, y, Fel::ONE])?)
    }

    // ---- line maps ----

    /// Spread index of `m ∩ ℓ∞` for a plane line `m ≠ ℓ∞`.
    pub fn direction_of_line(&self, m: LineId) -> Result<usize, AbbError> {
        if m == self.ell_inf {
            return Err(AbbError::LineIsInfinity);
        }
        let w = self.plane.meet(m, self.ell_inf)?;
        Ok(self.spread_index_of_linf_point(w).expect("meet lies on ℓ∞"))
    }

    /// Image of a plane line `m ≠ ℓ∞`: the plane of `PG(4,q)` through the
    /// images of its affine points, meeting `H∞` in `spread(m ∩ ℓ∞)`.
    pub fn map_secant_line(&self, m: LineId) -> Result<Subspace, AbbError> {
        let idx = self.direction_of_line(m)?;
        let mut gens: Vec<PointId> = self.spread[idx][..2].to_vec();
        for &p in self.plane.line_points(m) {
            if self.is_affine_plane_point(p) {
                gens.push(self.map_point(p)?);
                if gens.len() == 4 {
                    break;
                }
            }
        }
        let s = self.space.span(&gens);
        debug_assert_eq!(s.pdim(), 2);
        Ok(s)
    }

    /// The full line of `PG(4,q)` through the given (≥ 2 distinct, collinear)
    /// space points, sorted.
    pub fn space_line(&self, pts: &[PointId]) -> Result<Vec<PointId>, AbbError> {
        let mut ded = pts.to_vec();
        ded.sort_unstable();
        ded.dedup();
        if ded.len() < 2 {
            return Err(AbbError::NotALine);
        }
        let full = self.space.line_points_dynamic(ded[0], ded[1])?;
        if !ded.iter().all(|p| full.binary_search(p).is_ok()) {
            return Err(AbbError::NotALine);
        }
        Ok(full)
    }

    /// The points of a space line lying in `H∞` (1 point, or `q+1` if the
    /// line is inside `H∞`).
    fn infinite_points_of(&self, line: &[PointId]) -> Vec<PointId> {
        line.iter()
            .copied()
            .filter(|&p| !self.is_affine_space_point(p))
            .collect()
    }

    // ---- subline transfer ----

    /// Image of a Baer subline not inside `ℓ∞`: a space line if tangent, a
    /// Baer conic if external.
    pub fn transfer_subline(&self, b: &[PointId]) -> Result<SublineTransfer, AbbError> {
        if !baer::is_baer_subline(&self.plane, b) {
            return Err(AbbError::Baer(BaerError::NotABaerSubline));
        }
        let mut sub = b.to_vec();
        sub.sort_unstable();
        let m = self.plane.line_through(sub[0], sub[1])?;
        if m == self.ell_inf {
            return Err(AbbError::SublineAtInfinity);
        }
        let idx = self.direction_of_line(m)?;
        let w = self.linf_points[idx];
        if sub.binary_search(&w).is_ok() {
            // tangent: q affine images complete to a line with one H∞ point
            let imgs: Vec<PointId> = sub
                .iter()
                .filter(|&&p| p != w)
                .map(|&p| self.map_point(p))
                .collect::<Result<_, _>>()?;
            let full = self.space.line_points_dynamic(imgs[0], imgs[1])?;
            debug_assert!(imgs.iter().all(|p| full.binary_search(p).is_ok()));
            let inf = self.infinite_points_of(&full);
            debug_assert_eq!(inf.len(), 1);
            debug_assert_eq!(self.spread_index_of_space_point(inf[0]), Some(idx));
            Ok(SublineTransfer::Line {
                points: full,
                infinity_point: inf[0],
                spread_index: idx,
            })
        } else {
            let mut imgs: Vec<PointId> = sub
                .iter()
                .map(|&p| self.map_point(p))
                .collect::<Result<_, _>>()?;
            imgs.sort_unstable();
            Ok(SublineTransfer::Conic {
                points: imgs,
                spread_index: idx,
            })
        }
    }

    /// Preimage of a space line not inside `H∞`: the tangent Baer subline
    /// through the affine preimages and the `ℓ∞`-point of the spread line
    /// met. Inverse of the tangent branch of [`Self::transfer_subline`].
    pub fn pull_back_line(&self, l: &[PointId]) -> Result<Vec<PointId>, AbbError> {
        let full = self.space_line(l)?;
        let inf = self.infinite_points_of(&full);
        if inf.len() > 1 {
            return Err(AbbError::LineInHinf);
        }
        let idx = self
            .spread_index_of_space_point(inf[0])
            .expect("H∞ point lies on a spread line");
        let mut out = vec![self.linf_points[idx]];
        for &p in &full {
            if self.is_affine_space_point(p) {
                out.push(self.map_point_back(p)?);
            }
        }
        out.sort_unstable();
        debug_assert!(baer::is_baer_subline(&self.plane, &out));
        Ok(out)
    }

    // ---- the two-line dichotomy ----

    /// The unique Baer ruled cubic (or secant-subplane image) through two
    /// lines not in `H∞`. See the module doc for the case split.
    pub fn ruled_cubic_of(
        &self,
        l1: &[PointId],
        l2: &[PointId],
    ) -> Result<RuledCubicOutcome, AbbError> {
        let f1 = self.space_line(l1)?;
        let f2 = self.space_line(l2)?;
        if f1 == f2 {
            return Err(AbbError::SameLine);
        }
        let inf1 = self.infinite_points_of(&f1);
        let inf2 = self.infinite_points_of(&f2);
        if inf1.len() > 1 || inf2.len() > 1 {
            return Err(AbbError::LineInHinf);
        }
        let (p1, p2) = (inf1[0], inf2[0]);

        if p1 == p2 {
            // two distinct lines through one point always span a plane
            let other = f2.iter().copied().find(|p| f1.binary_search(p).is_err()).unwrap();
            let plane_s = self.space.span(&[f1[0], f1[1], other]);
            debug_assert_eq!(plane_s.pdim(), 2);
            let trace: Vec<PointId> = self
                .space
                .subspace_points(&plane_s)
                .into_iter()
                .filter(|&p| !self.is_affine_space_point(p))
                .collect();
            let idx = self.spread_index_of_space_point(p1).expect("p1 in H∞");
            if trace == self.spread[idx] {
                return Err(AbbError::PlaneThroughSpreadLine);
            }
            // pull the plane back: affine preimages plus the ℓ∞-points of the
            // q+1 spread lines its H∞ trace meets
            let mut subplane = Vec::new();
            for p in self.space.subspace_points(&plane_s) {
                if self.is_affine_space_point(p) {
                    subplane.push(self.map_point_back(p)?);
                } else {
                    let i = self.spread_index_of_space_point(p).expect("H∞ point");
                    subplane.push(self.linf_points[i]);
                }
            }
            subplane.sort_unstable();
            subplane.dedup();
            let q = self.ctx.q() as usize;
            debug_assert_eq!(subplane.len(), q * q + q + 1);
            return Ok(RuledCubicOutcome::SecantPlane {
                plane: plane_s,
                subplane,
            });
        }

        let i1 = self.spread_index_of_space_point(p1).expect("p1 in H∞");
        let i2 = self.spread_index_of_space_point(p2).expect("p2 in H∞");
        if i1 != i2 {
            return Err(AbbError::NotASpreadLine);
        }
        let span = self.space.span(&[f1[0], f1[1], f2[0], f2[1]]);
        if span.rank() < 4 {
            return Err(AbbError::CoplanarThroughSpreadLine);
        }
        let b1 = self.pull_back_line(&f1)?;
        let b2 = self.pull_back_line(&f2)?;
        let pi = baer::baer_subplane_through(&self.plane, &b1, &b2)?;
        let cubic = self.cubic_from_subplane(&pi, i1)?;
        debug_assert!(cubic.generators.contains(&f1) && cubic.generators.contains(&f2));
        Ok(RuledCubicOutcome::Cubic(cubic))
    }

    /// Transfer a Baer subplane tangent to `ℓ∞` at the `ℓ∞`-point of spread
    /// line `idx` into its Baer ruled cubic.
    fn cubic_from_subplane(&self, pi: &[PointId], idx: usize) -> Result<RuledCubic, AbbError> {
        let w = self.linf_points[idx];
        let mut subplane = pi.to_vec();
        subplane.sort_unstable();
        debug_assert!(
            subplane
                .iter()
                .all(|&p| p == w || self.is_affine_plane_point(p)),
            "subplane must be tangent to ℓ∞ at w"
        );

        // group the affine subplane points by their line through w
        let mut pencil: BTreeMap<LineId, Vec<PointId>> = BTreeMap::new();
        let mut affine_points = Vec::new();
        for &p in subplane.iter().filter(|&&p| p != w) {
            pencil
                .entry(self.plane.line_through(w, p)?)
                .or_default()
                .push(p);
            affine_points.push(self.map_point(p)?);
        }
        affine_points.sort_unstable();

        let q = self.ctx.q() as usize;
        debug_assert_eq!(pencil.len(), q + 1);
        let mut generators = Vec::with_capacity(q + 1);
        for (_, mut grp) in pencil {
            grp.push(w);
            grp.sort_unstable();
            match self.transfer_subline(&grp)? {
                SublineTransfer::Line { points, .. } => generators.push(points),
                SublineTransfer::Conic { .. } => unreachable!("sublines through w are tangent"),
            }
        }
        // order generators along the directrix
        let directrix = self.spread[idx].clone();
        generators.sort_by_key(|g| self.infinite_points_of(g)[0]);

        // base conic: the lowest-id subplane line missing w, transferred
        let base_line = subplane
            .iter()
            .filter(|&&p| p != w)
            .flat_map(|&a| {
                subplane
                    .iter()
                    .filter(move |&&b| b != w && b > a)
                    .map(move |&b| self.plane.line_through(a, b))
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|&l| !self.plane.on_line(l, w))
            .min()
            .expect("a subplane has lines missing any fixed point");
        let trace: Vec<PointId> = subplane
            .iter()
            .copied()
            .filter(|&p| self.plane.on_line(base_line, p))
            .collect();
        debug_assert_eq!(trace.len(), q + 1);
        let base_conic = match self.transfer_subline(&trace)? {
            SublineTransfer::Conic { points, .. } => points,
            SublineTransfer::Line { .. } => unreachable!("trace misses w, so it is external"),
        };

        Ok(RuledCubic {
            directrix_index: idx,
            directrix,
            affine_points,
            generators,
            base_conic,
            subplane,
        })
    }
}
