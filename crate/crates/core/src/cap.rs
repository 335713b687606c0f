//! Caps and ovoids in projective 3-space.
//!
//! A *cap* is a point set with no three collinear points; in `PG(3,q)` a cap
//! has at most `q² + 1` points (for `q > 2`), and a cap of that size is an
//! *ovoid*. Every plane meets an ovoid in either one point (a *tangent
//! plane*) or an oval of `q + 1` points. Two families realize the maximum:
//!
//! * the **elliptic quadric** `{(x : y : N(x,y) : 1)} ∪ {(0 : 0 : 1 : 0)}`,
//!   where `N(x,y) = x² − c₁xy + c₀y²` is the norm form of the quadratic
//!   extension with `ω² + c₁ω + c₀ = 0` (anisotropic because a nonzero field
//!   element has nonzero norm) — it exists for every `q`;
//! * the **Suzuki–Tits ovoid** `{(s : t : s^(σ+2) + st + t^σ : 1)} ∪
//!   {(0 : 0 : 1 : 0)}` with `σ = 2^(e+1)`, which exists for
//!   `q = 2^(2e+1)`, `e ≥ 1`, and is the one family that is *not* a quadric:
//!   none of its plane sections is a conic.
//!
//! ## Completion search
//!
//! [`extend_cap`] enumerates **every** maximal cap containing a given cap.
//! The search adds points in ascending id order: a node branches only on
//! compatible points larger than the last one added, so each maximal
//! extension is produced along exactly one path., A node whose *full*
//! compatible set is empty records a completion. Reports carry the bound
//! under which a large cap is known to complete *uniquely* to an ovoid:
//! `|K| > (q² + q + 2)/2` for even `q`, `|K| > 2(q² + q + 2)/3` for odd `q`.
//!
//! ## Example
//!
//! ```
//! use std::sync::Arc;
//! use unital_forge::{cap, FieldCtx, Geometry};
//!
//! let ctx = Arc::new(FieldCtx::build_q(4).unwrap());
//! let g = Geometry::new(Arc::clone(&ctx), 4, 3).unwrap();
//! let ovoid = cap::elliptic_quadric(&g).unwrap();
//! assert_eq!(ovoid.len(), 17);
//! assert!(cap::is_cap(&g, &ovoid).is_ok());
//! ```

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::BitSet;
use crate::field::Fel;
use crate::geom::{GeomError, Geometry, PointId, Subspace};
use crate::linalg;

/// Errors raised by cap constructions and searches.
#[derive(Debug, thiserror::Error)]
pub enum CapError {
    #[error("ambient geometry must be a projective 3-space, got dimension {0}")]
    NotASolid(usize),
    #[error("point set contains a repeated point")]
    RepeatedPoint,
    #[error("points {0:?}, {1:?} and {2:?} are collinear")]
    Collinear(PointId, PointId, PointId),
    #[error("point is not a member of the cap")]
    NotOnCap,
    #[error("expected exactly one tangent plane, found {0}")]
    NoUniqueTangentPlane(usize),
    #[error("the Suzuki–Tits ovoid needs q = 2^(2e+1) with e ≥ 1, got q = {0}")]
    BadTitsOrder(u32),
    #[error("geometry order {got} is not the base order {base} of its field tower")]
    WrongLayer { got: u32, base: u32 },
    #[error("search budget of {budget} nodes exhausted after visiting {visited}")]
    BudgetExhausted { budget: u64, visited: u64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Checks that no three of the given points are collinear.
///
/// Works in any ambient dimension. On failure the error carries the first
/// violating triple found (two chosen points and a third member on their
/// line), so callers can report *which* collinearity broke a claimed cap.
pub fn is_cap(g: &Geometry, pts: &[PointId]) -> Result<(), CapError> {
    let mut sorted = pts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CapError::RepeatedPoint);
    }
    let mut mask = BitSet::new(g.point_count());
    for &p in &sorted {
        mask.insert(p.0 as usize);
    }
    for (i, &a) in sorted.iter().enumerate() {
        for &b in sorted.iter().skip(i + 1) {
            for p in g.line_points_dynamic(a, b)? {
                if p != a && p != b && mask.contains(p.0 as usize) {
                    return Err(CapError::Collinear(a, b, p));
                }
            }
        }
    }
    Ok(())
}

fn require_solid(g: &Geometry) -> Result<(), CapError> {
    if g.dim() != 3 {
        return Err(CapError::NotASolid(g.dim()));
    }
    if g.order() != g.ctx().q() {
        return Err(CapError::WrongLayer {
            got: g.order(),
            base: g.ctx().q(),
        });
    }
    Ok(())
}

/// The elliptic quadric ovoid `ZW = N(X,Y)` in `PG(3,q)`, as a sorted point
/// set of size `q² + 1`.
///
/// ## Algorithm
///
/// The norm form of the tower's quadratic layer, `N(x,y) = x² − c₁xy + c₀y²`
/// with `ω² + c₁ω + c₀ = 0`, vanishes only at `(0,0)`, so the quadric's
/// points are exactly the `q²` affine points `(x : y : N(x,y) : 1)` plus the
/// single infinite point `(0 : 0 : 1 : 0)`.
pub fn elliptic_quadric(g: &Geometry) -> Result<Vec<PointId>, CapError> {
    require_solid(g)?;
    let ctx = g.ctx();
    let (c0, c1) = ctx.poly_q2();
    let mut pts = vec![g.point_from_raw(&[0, 0, 1, 0])?];
    for x in ctx.base_elements() {
        for y in ctx.base_elements() {
            let f = ctx.sub(
                ctx.add(ctx.mul(x, x), ctx.mul(c0, ctx.mul(y, y))),
                ctx.mul(c1, ctx.mul(x, y)),
            );
            pts.push(g.point_from_raw(&[x.0, y.0, f.0, 1])?);
        }
    }
    pts.sort_unstable();
    Ok(pts)
}

/// The Suzuki–Tits ovoid in `PG(3,q)` for `q = 2^(2e+1)`, `e ≥ 1`, as a
/// sorted point set of size `q² + 1`.
///
/// With `σ = 2^(e+1)` (so `σ² = 2q`), the points are
/// `(s : t : s^(σ+2) + st + t^σ : 1)` for `s, t ∈ F_q` together with
/// `(0 : 0 : 1 : 0)`.
pub fn suzuki_tits(g: &Geometry) -> Result<Vec<PointId>, CapError> {
    require_solid(g)?;
    let ctx = g.ctx();
    let (p, h) = (ctx.p(), ctx.h());
    if p != 2 || h % 2 == 0 || h < 3 {
        return Err(CapError::BadTitsOrder(ctx.q()));
    }
    let sigma = 1u64 << ((h + 1) / 2);
    let mut pts = vec![g.point_from_raw(&[0, 0, 1, 0])?];
    for s in ctx.base_elements() {
        for t in ctx.base_elements() {
            let f = ctx.add(
                ctx.add(ctx.pow(s, sigma + 2), ctx.mul(s, t)),
                ctx.pow(t, sigma),
            );
            pts.push(g.point_from_raw(&[s.0, t.0, f.0, 1])?);
        }
    }
    pts.sort_unstable();
    Ok(pts)
}

/// The unique plane meeting the ovoid exactly in `{a}`.
///
/// Scans all planes through `a` and counts their members; errors if `a` is
/// not on the ovoid or the tangent plane is not unique (as happens for caps
/// that are far from complete).
pub fn tangent_plane_at(g: &Geometry, ovoid: &[PointId], a: PointId) -> Result<Subspace, CapError> {
    require_solid(g)?;
    if !ovoid.contains(&a) {
        return Err(CapError::NotOnCap);
    }
    let mut found: Vec<Subspace> = Vec::new();
    for idx in 0..g.hyperplane_count() {
        let coeffs = g.hyperplane_coeffs(idx).to_vec();
        if !g.on_hyperplane(&coeffs, a) {
            continue;
        }
        if ovoid.iter().all(|&p| p == a || !g.on_hyperplane(&coeffs, p)) {
            found.push(g.hyperplane_subspace(&coeffs));
        }
    }
    if found.len() == 1 {
        Ok(found.pop().unwrap())
    } else {
        Err(CapError::NoUniqueTangentPlane(found.len()))
    }
}

/// Distribution of plane-section sizes of a point set in `PG(3,q)`, with a
/// conic test on the sections of oval size `q + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SectionCensus {
    /// How many planes meet the set in each size (absent sizes meet none).
    pub by_size: BTreeMap<usize, usize>,
    /// Number of sections of size exactly `q + 1`.
    pub oval_sections: usize,
    /// How many of those lie on a conic of their plane. For `q ≥ 4` an oval
    /// section lies on a conic iff it *is* a conic; below five points the
    /// fit is underdetermined and every section counts.
    pub conic_sections: usize,
}

/// Classifies every plane of `PG(3,q)` by its intersection with `pts`.
///
/// ## Algorithm
///
/// Sections are taken against each hyperplane functional. A size-`(q+1)`
/// section is tested for being a conic by coordinatizing its plane through
/// the reduced-basis pivots — for `v` in the plane, the coefficient of the
/// `j`-th basis vector is `v[pivots[j]]` — and asking for a nonzero conic
/// form through all its points. A degenerate conic is a union of at most two
/// lines and cannot carry `q + 1 ≥ 5` points in general position, so a
/// nonzero fit is automatically nondegenerate.
pub fn section_census(g: &Geometry, pts: &[PointId]) -> Result<SectionCensus, CapError> {
    require_solid(g)?;
    let ctx = g.ctx();
    let oval = g.order() as usize + 1;
    let mut census = SectionCensus {
        by_size: BTreeMap::new(),
        oval_sections: 0,
        conic_sections: 0,
    };
    for idx in 0..g.hyperplane_count() {
        let coeffs = g.hyperplane_coeffs(idx).to_vec();
        let members: Vec<PointId> = pts
            .iter()
            .copied()
            .filter(|&p| g.on_hyperplane(&coeffs, p))
            .collect();
        *census.by_size.entry(members.len()).or_insert(0) += 1;
        if members.len() == oval {
            census.oval_sections += 1;
            let plane = g.hyperplane_subspace(&coeffs);
            let local: Vec<Vec<Fel>> = members
                .iter()
                .map(|&p| {
                    let v = g.coords(p);
                    plane.pivots.iter().map(|&j| v[j]).collect()
                })
                .collect();
            let refs: Vec<&[Fel]> = local.iter().map(|r| r.as_slice()).collect();
            if !linalg::conic_null_space(ctx, &refs).is_empty() {
                census.conic_sections += 1;
            }
        }
    }
    Ok(census)
}

/// Node limit for [`extend_cap`].
#[derive(Clone, Copy, Debug)]
pub struct ExtendBudget {
    pub max_nodes: u64,
}

impl Default for ExtendBudget {
    fn default() -> Self {
        ExtendBudget {
            max_nodes: 5_000_000,
        }
    }
}

/// Everything [`extend_cap`] finds: the complete list of maximal caps
/// containing the input, plus derived verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    /// Every maximal cap containing the input, each sorted, listed in
    /// lexicographic order. A complete input lists itself.
    pub completions: Vec<Vec<PointId>>,
    /// The input was already a maximal cap.
    pub input_complete: bool,
    /// Search-tree nodes visited.
    pub nodes_visited: u64,
    /// All completions have ovoid size `q² + 1`.
    pub all_ovoids: bool,
    /// Exactly one completion exists.
    pub unique_completion: bool,
    /// The input size clears the bound under which unique completion to an
    /// ovoid is guaranteed: `|K| > (q² + q + 2)/2` for even `q`,
    /// `|K| > 2(q² + q + 2)/3` for odd `q`.
    pub uniqueness_theorem_applies: bool,
}

/// Enumerates every maximal cap of `PG(3,q)` containing `cap`.
///
/// ## Algorithm
///
/// Backtracking over candidate points in ascending id order. A node keeps
/// the set of *all* points compatible with the current cap (off every secant
/// line); it records a completion when that set is empty, and branches only
/// on compatible points above the last added one, so each maximal extension
/// is visited exactly once. Exceeding `budget` aborts with
/// [`CapError::BudgetExhausted`] — deliberately distinct from the successful
/// "no extension exists" answer, which is a report with the input as its
/// only completion.
pub fn extend_cap(
    g: &Geometry,
    cap: &[PointId],
    budget: &ExtendBudget,
) -> Result<ExtensionReport, CapError> {
    if g.dim() != 3 {
        return Err(CapError::NotASolid(g.dim()));
    }
    is_cap(g, cap)?;
    let mut base = cap.to_vec();
    base.sort_unstable();

    let n = g.point_count();
    let mut forbidden = BitSet::new(n);
    for &p in &base {
        forbidden.insert(p.0 as usize);
    }
    for (i, &a) in base.iter().enumerate() {
        for &b in base.iter().skip(i + 1) {
            for p in g.line_points_dynamic(a, b)? {
                forbidden.insert(p.0 as usize);
            }
        }
    }
    let compatible: Vec<PointId> = (0..n)
        .filter(|&i| !forbidden.contains(i))
        .map(|i| PointId(i as u32))
        .collect();

    let mut report = ExtensionReport {
        completions: Vec::new(),
        input_complete: compatible.is_empty(),
        nodes_visited: 0,
        all_ovoids: false,
        unique_completion: false,
        uniqueness_theorem_applies: false,
    };
    let mut chosen: Vec<PointId> = Vec::new();
    search(g, &base, &mut chosen, &compatible, budget, &mut report)?;
    report.completions.sort();

    let ovoid_size = (g.order() as usize) * (g.order() as usize) + 1;
    report.all_ovoids = !report.completions.is_empty()
        && report.completions.iter().all(|c| c.len() == ovoid_size);
    report.unique_completion = report.completions.len() == 1;
    let s = base.len();
    let bound = (g.order() as usize) * (g.order() as usize) + g.order() as usize + 2;
    report.uniqueness_theorem_applies = if g.order() % 2 == 0 {
        2 * s > bound
    } else {
        3 * s > 2 * bound
    };
    Ok(report)
}

fn search(
    g: &Geometry,
    base: &[PointId],
    chosen: &mut Vec<PointId>,
    compatible: &[PointId],
    budget: &ExtendBudget,
    report: &mut ExtensionReport,
) -> Result<(), CapError> {
    report.nodes_visited += 1;
    if report.nodes_visited > budget.max_nodes {
        return Err(CapError::BudgetExhausted {
            budget: budget.max_nodes,
            visited: report.nodes_visited,
        });
    }
    if compatible.is_empty() {
        let mut full: Vec<PointId> = base.iter().chain(chosen.iter()).copied().collect();
        full.sort_unstable();
        report.completions.push(full);
        return Ok(());
    }
    let last = chosen.last().copied();
    for (i, &c) in compatible.iter().enumerate() {
        if let Some(l) = last {
            if c <= l {
                continue;
            }
        }
        let mut blocked = BitSet::new(g.point_count());
        for &s in base.iter().chain(chosen.iter()) {
            for p in g.line_points_dynamic(s, c)? {
                blocked.insert(p.0 as usize);
            }
        }
        let next: Vec<PointId> = compatible
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != i && !blocked.contains(p.0 as usize))
            .map(|(_, &p)| p)
            .collect();
        chosen.push(c);
        search(g, base, chosen, &next, budget, report)?;
        chosen.pop();
    }
    Ok(())
}

/// Embeds `PG(3,q)` points into the hyperplane `{Y₁ = 0}` of the
/// four-space `PG(4,q)` with coordinates `(X₀ : X₁ : Y₀ : Y₁ : Z)`:
/// `(a : b : c : d) ↦ (a : b : c : 0 : d)`.
///
/// The solid's infinite plane is `{Y₁ = 0, Z = 0}`, which meets the
/// transversal spread line `{(0 : 0 : u : v : 0)}` exactly in
/// `(0 : 0 : 1 : 0 : 0)` — the image of `(0 : 0 : 1 : 0)`. Embedding an
/// ovoid from [`elliptic_quadric`] or [`suzuki_tits`] therefore puts its
/// single infinite point on that line while keeping the solid off it, which
/// is exactly the position a Buekenhout–Metz base ovoid must occupy.
pub fn embed_in_solid(
    g3: &Geometry,
    g4: &Geometry,
    pts: &[PointId],
) -> Result<Vec<PointId>, CapError> {
    require_solid(g3)?;
    if g4.dim() != 4 {
        return Err(CapError::NotASolid(g4.dim()));
    }
    if g4.order() != g3.order() {
        return Err(CapError::WrongLayer {
            got: g4.order(),
            base: g3.order(),
        });
    }
    let mut out = Vec::with_capacity(pts.len());
    for &p in pts {
        let v = g3.coords(p);
        out.push(g4.point_from_raw(&[v[0].0, v[1].0, v[2].0, 0, v[3].0])?);
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abb::AbbModel;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn solid(q: u32) -> Geometry {
        let ctx = Arc::new(FieldCtx::build_q(q).unwrap());
        Geometry::new(Arc::clone(&ctx), q, 3).unwrap()
    }

    #[test]
    fn elliptic_quadric_is_an_ovoid() {
        for q in [2u32, 3, 4, 5] {
            let g = solid(q);
            let o = elliptic_quadric(&g).unwrap();
            assert_eq!(o.len(), (q * q + 1) as usize);
            is_cap(&g, &o).unwrap();
        }
    }

    #[test]
    fn quadric_sections_are_points_or_conics() {
        // PG(3,4) has 85 planes: 17 tangent (one per point), 68 secant, and
        // every secant section of the quadric is a conic.
        let g = solid(4);
        let o = elliptic_quadric(&g).unwrap();
        let census = section_census(&g, &o).unwrap();
        assert_eq!(census.by_size, BTreeMap::from([(1, 17), (5, 68)]));
        assert_eq!(census.oval_sections, 68);
        assert_eq!(census.conic_sections, 68);
        assert_eq!(g.hyperplane_count(), 85);
    }

    #[test]
    fn suzuki_tits_is_an_ovoid_with_no_conic_sections() {
        let g = solid(8);
        let o = suzuki_tits(&g).unwrap();
        assert_eq!(o.len(), 65);
        is_cap(&g, &o).unwrap();
        let census = section_census(&g, &o).unwrap();
        assert_eq!(census.by_size, BTreeMap::from([(1, 65), (9, 520)]));
        assert_eq!(census.conic_sections, 0);
        // the quadric over the same field has all 520 sections conic
        let e = elliptic_quadric(&g).unwrap();
        let ec = section_census(&g, &e).unwrap();
        assert_eq!(ec.conic_sections, 520);
    }

    #[test]
    fn suzuki_tits_rejects_wrong_orders() {
        for q in [2u32, 3, 4, 5] {
            let g = solid(q);
            assert!(matches!(suzuki_tits(&g), Err(CapError::BadTitsOrder(_))));
        }
    }

    #[test]
    fn tangent_planes_are_unique_and_distinct() {
        let g = solid(3);
        let o = elliptic_quadric(&g).unwrap();
        let mut planes: Vec<Vec<Vec<Fel>>> = Vec::new();
        for &a in &o {
            let t = tangent_plane_at(&g, &o, a).unwrap();
            assert_eq!(t.rank(), 3);
            planes.push(t.basis.clone());
        }
        planes.sort();
        planes.dedup();
        assert_eq!(planes.len(), o.len());
        let outside = (0..g.point_count() as u32)
            .map(PointId)
            .find(|p| !o.contains(p))
            .unwrap();
        assert!(matches!(
            tangent_plane_at(&g, &o, outside),
            Err(CapError::NotOnCap)
        ));
    }

    #[test]
    fn collinear_triples_and_repeats_are_reported() {
        let g = solid(3);
        let line = g.line_points_dynamic(PointId(0), PointId(1)).unwrap();
        match is_cap(&g, &line) {
            Err(CapError::Collinear(a, b, c)) => {
                assert!(line.contains(&a) && line.contains(&b) && line.contains(&c));
                let mut t = vec![a, b, c];
                t.sort();
                t.dedup();
                assert_eq!(t.len(), 3);
            }
            other => panic!("expected a collinearity witness, got {other:?}"),
        }
        assert!(matches!(
            is_cap(&g, &[PointId(0), PointId(1), PointId(0)]),
            Err(CapError::RepeatedPoint)
        ));
    }

    #[test]
    fn no_point_extends_a_complete_ovoid() {
        // every point off a complete cap lies on one of its secants, so a
        // cap of size q² + 2 can never validate
        let g = solid(3);
        let o = elliptic_quadric(&g).unwrap();
        for p in (0..g.point_count() as u32).map(PointId) {
            if o.contains(&p) {
                continue;
            }
            let mut bigger = o.clone();
            bigger.push(p);
            assert!(is_cap(&g, &bigger).is_err(), "{p:?} extended the ovoid");
        }
    }

    #[test]
    fn complete_cap_reports_itself() {
        let g = solid(4);
        let o = elliptic_quadric(&g).unwrap();
        let report = extend_cap(&g, &o, &ExtendBudget::default()).unwrap();
        assert!(report.input_complete);
        assert_eq!(report.completions, vec![o]);
        assert!(report.all_ovoids && report.unique_completion);
        assert!(report.uniqueness_theorem_applies);
    }

    #[test]
    fn deficient_quadric_recompletes_uniquely() {
        // removing 4 of 17 points at q = 4 stays above the even bound
        // (q² + q + 2)/2 = 11, so the quadric is the unique completion
        let g = solid(4);
        let o = elliptic_quadric(&g).unwrap();
        let k: Vec<PointId> = o.iter().copied().skip(4).collect();
        let report = extend_cap(&g, &k, &ExtendBudget::default()).unwrap();
        assert!(report.uniqueness_theorem_applies);
        assert!(!report.input_complete);
        assert_eq!(report.completions, vec![o]);
        assert!(report.all_ovoids && report.unique_completion);
    }

    #[test]
    fn shallow_deficit_may_recomplete_ambiguously() {
        // 9 points at q = 3 sit below the odd bound 2(q² + q + 2)/3 = 9.33;
        // the search still finds every completion and the original is one
        let g = solid(3);
        let o = elliptic_quadric(&g).unwrap();
        let k: Vec<PointId> = o.iter().copied().skip(1).collect();
        let report = extend_cap(&g, &k, &ExtendBudget::default()).unwrap();
        assert!(!report.uniqueness_theorem_applies);
        assert!(report.completions.contains(&o));
        assert!(report.all_ovoids);
        for c in &report.completions {
            is_cap(&g, c).unwrap();
            assert_eq!(c.len(), 10);
        }
    }

    #[test]
    fn budget_exhaustion_is_distinct_from_no_extension() {
        let g = solid(4);
        let o = elliptic_quadric(&g).unwrap();
        let k: Vec<PointId> = o.iter().copied().skip(4).collect();
        match extend_cap(&g, &k, &ExtendBudget { max_nodes: 2 }) {
            Err(CapError::BudgetExhausted { budget: 2, .. }) => {}
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn embedding_lands_in_the_transversal_solid() {
        let ctx = Arc::new(FieldCtx::build_q(3).unwrap());
        let abb = AbbModel::new(Arc::clone(&ctx)).unwrap();
        let g3 = Geometry::new(Arc::clone(&ctx), 3, 3).unwrap();
        let o = elliptic_quadric(&g3).unwrap();
        let emb = embed_in_solid(&g3, abb.space(), &o).unwrap();
        assert_eq!(emb.len(), 10);
        is_cap(abb.space(), &emb).unwrap();
        let infinite: Vec<PointId> = emb
            .iter()
            .copied()
            .filter(|&p| !abb.is_affine_space_point(p))
            .collect();
        assert_eq!(infinite.len(), 1);
        assert_eq!(
            infinite[0],
            abb.space().point_from_raw(&[0, 0, 1, 0, 0]).unwrap()
        );
        assert_eq!(
            abb.spread_index_of_space_point(infinite[0]),
            Some(abb.t_index())
        );
    }
}
