//! Labelled point sets in the quotient plane `Π = PG(4,q)/T`.
//!
//! A family `𝓛` of space lines, each meeting the infinite hyperplane in a
//! point of the transversal spread line `T`, is summarized by a *labelled
//! set*: every plane `⟨T, ℓ⟩` through `T` is a point of the quotient plane
//! `Π ≅ PG(2,q)`, and the point inherits as label the position on `T` where
//! `ℓ` meets it. When `𝓛` comes from the Baer secants of a unital through
//! its special point, the labelled set lands inside the affine part of `Π`
//! and obeys a *closure property*: a point on a line through two points of
//! one label carries that label too.
//!
//! Closure-satisfying sets of size `q² − ε`, `ε ≤ kq`, fall into a
//! trichotomy:
//!
//! * **(i)** all points carry the same label;
//! * **(ii)** two labels each occur at least `q − k` times, each such class
//!   lies on an affine line, and those two lines meet affinely;
//! * **(iii)** the classes of a label subset `𝒱*` each lie on affine lines
//!   that are all parallel — their completions pass through one direction
//!   `Q∞` at infinity — and the covered subset `S*` misses at most
//!   `ε + (k²+k)(k²+k−1) + 1` points of `AG(2,q)`.
//!
//! [`classify`] implements the trichotomy with precedence (i) > (ii) >
//! (iii) and lists every witness it finds; [`classify_oracle`] re-derives
//! the same report by brute force over all label pairs and all directions,
//! and the two must agree everywhere. Inputs violating the hypotheses are
//! still classified best-effort, with the violations flagged.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abb::{AbbError, AbbModel};
use crate::geom::{GeomError, Geometry, LineId, PointId, Quotient};

/// Errors raised while building or validating labelled sets.
#[derive(Debug, thiserror::Error)]
pub enum SlabelError {
    #[error("ambient must be a projective plane of order q, got dimension {dim} order {order}")]
    WrongAmbient { dim: usize, order: u32 },
    #[error("line lies inside the infinite hyperplane")]
    LineInsideInfinity,
    #[error("line meets the infinite hyperplane off the transversal spread line")]
    OffTransversal,
    #[error("two lines lie in the same plane through the transversal line (quotient point {point:?})")]
    TwoLinesInOnePlane { point: PointId },
    #[error("point {0:?} lies on the infinite line of the quotient plane")]
    NotAffine(PointId),
    #[error("label {label} out of range, the transversal line has {max} points")]
    BadLabel { label: usize, max: usize },
    #[error("point {0:?} listed twice")]
    DuplicatePoint(PointId),
    #[error(transparent)]
    Abb(#[from] AbbError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The default slack parameter `⌊√q/2⌋ − 2`, clamped at zero.
pub fn default_k(q: u32) -> u32 {
    let v = ((q as f64).sqrt() / 2.0).floor() as i64 - 2;
    v.max(0) as u32
}

/// The infinite line `{third coordinate = 0}` of a quotient plane — the
/// shadow of the infinite hyperplane under the quotient by the transversal
/// line.
pub fn infinite_line(pi: &Geometry) -> Result<LineId, SlabelError> {
    let a = pi.point_from_raw(&[1, 0, 0])?;
    let b = pi.point_from_raw(&[0, 1, 0])?;
    Ok(pi.line_through(a, b)?)
}

/// Points of `AG(2,q) ⊂ Π` with one label each, drawn from the `q + 1`
/// points of the transversal line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSet {
    q: u32,
    k: u32,
    entries: BTreeMap<PointId, usize>,
}

impl LabeledSet {
    /// Validates affineness, label range, and distinctness.
    pub fn new(
        pi: &Geometry,
        entries: &[(PointId, usize)],
        k: Option<u32>,
    ) -> Result<LabeledSet, SlabelError> {
        if pi.dim() != 2 || pi.order() != pi.ctx().q() {
            return Err(SlabelError::WrongAmbient {
                dim: pi.dim(),
                order: pi.order(),
            });
        }
        let q = pi.order();
        let mut map = BTreeMap::new();
        for &(p, label) in entries {
            if pi.coords(p)[2] == crate::field::Fel::ZERO {
                return Err(SlabelError::NotAffine(p));
            }
            if label > q as usize {
                return Err(SlabelError::BadLabel {
                    label,
                    max: q as usize,
                });
            }
            if map.insert(p, label).is_some() {
                return Err(SlabelError::DuplicatePoint(p));
            }
        }
        Ok(LabeledSet {
            q,
            k: k.unwrap_or_else(|| default_k(q)),
            entries: map,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }
    /// The slack parameter bounding the deficiency, `ε ≤ kq`.
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    /// The deficiency `ε = q² − |S|`.
    pub fn epsilon(&self) -> usize {
        (self.q * self.q) as usize - self.entries.len()
    }
    pub fn label(&self, p: PointId) -> Option<usize> {
        self.entries.get(&p).copied()
    }
    pub fn entries(&self) -> impl Iterator<Item = (PointId, usize)> + '_ {
        self.entries.iter().map(|(&p, &v)| (p, v))
    }
    /// Per-label point lists, ascending labels, each sorted.
    pub fn classes(&self) -> BTreeMap<usize, Vec<PointId>> {
        let mut out: BTreeMap<usize, Vec<PointId>> = BTreeMap::new();
        for (&p, &v) in &self.entries {
            out.entry(v).or_default().push(p);
        }
        out
    }
}

/// Builds the labelled set of a family of space lines, each meeting the
/// infinite hyperplane in one transversal point.
///
/// Returns the quotient by the transversal line alongside, so callers can
/// keep projecting and lifting in the same frame. Labels are positions in
/// the transversal line's sorted point list.
///
/// ## Algorithm
///
/// Each input is completed to a full space line and checked to leave the
/// infinite hyperplane and to meet it on the transversal line `T`. All its
/// affine points project to the single quotient point `⟨T, ℓ⟩/T`; two lines
/// sharing that plane is an error, matching the fact that a plane through
/// `T` carries at most one Baer-secant image.
pub fn build_slabels(
    abb: &AbbModel,
    lines: &[Vec<PointId>],
) -> Result<(LabeledSet, Quotient), SlabelError> {
    let space = abb.space();
    let t_sub = abb.spread_subspace(abb.t_index());
    let quot = space.quotient(&t_sub)?;
    let t_line = abb.t_line();

    let mut entries: Vec<(PointId, usize)> = Vec::with_capacity(lines.len());
    let mut seen: BTreeMap<PointId, ()> = BTreeMap::new();
    for raw in lines {
        let line = abb.space_line(raw)?;
        let affine: Vec<PointId> = line
            .iter()
            .copied()
            .filter(|&p| abb.is_affine_space_point(p))
            .collect();
        if affine.is_empty() {
            return Err(SlabelError::LineInsideInfinity);
        }
        let inf: Vec<PointId> = line
            .iter()
            .copied()
            .filter(|&p| !abb.is_affine_space_point(p))
            .collect();
        debug_assert_eq!(inf.len(), 1);
        let label = match t_line.binary_search(&inf[0]) {
            Ok(i) => i,
            Err(_) => return Err(SlabelError::OffTransversal),
        };
        let pi_point = quot.project(space, affine[0])?;
        debug_assert!(affine
            .iter()
            .all(|&p| quot.project(space, p).unwrap() == pi_point));
        if seen.insert(pi_point, ()).is_some() {
            return Err(SlabelError::TwoLinesInOnePlane { point: pi_point });
        }
        entries.push((pi_point, label));
    }
    let set = LabeledSet::new(quot.target(), &entries, None)?;
    Ok((set, quot))
}

/// A witnessed failure of the closure property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureViolation {
    /// The point that should have inherited the label but does not.
    pub point: PointId,
    pub point_label: usize,
    /// Two same-label points collinear with it.
    pub pair: (PointId, PointId),
    pub pair_label: usize,
}

/// Checks the closure property: a point of `S` on a line through two points
/// of `S` with one label must carry that label. Returns the first violation
/// in line order, or `None` if the property holds.
pub fn check_closure(pi: &Geometry, s: &LabeledSet) -> Option<ClosureViolation> {
    for l in 0..pi.line_count() {
        let line = LineId(l as u32);
        let members: Vec<(PointId, usize)> = pi
            .line_points(line)
            .iter()
            .filter_map(|&p| s.label(p).map(|v| (p, v)))
            .collect();
        if members.len() < 3 {
            continue;
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &(_, v) in &members {
            *counts.entry(v).or_default() += 1;
        }
        for (&v, &c) in &counts {
            if c < 2 {
                continue;
            }
            if let Some(&(p, w)) = members.iter().find(|&&(_, w)| w != v) {
                let pair: Vec<PointId> = members
                    .iter()
                    .filter(|&&(_, w)| w == v)
                    .map(|&(p, _)| p)
                    .take(2)
                    .collect();
                return Some(ClosureViolation {
                    point: p,
                    point_label: w,
                    pair: (pair[0], pair[1]),
                    pair_label: v,
                });
            }
        }
    }
    None
}

/// Which branch of the trichotomy a labelled set falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConfigKind {
    #[serde(rename = "i")]
    SameLabel,
    #[serde(rename = "ii")]
    TwoLines,
    #[serde(rename = "iii")]
    ParallelClasses,
    #[serde(rename = "none")]
    Unclassified,
}

/// Witness for configuration (ii).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoLineWitness {
    pub labels: (usize, usize),
    pub lines: (LineId, LineId),
    /// The affine point the two class lines share.
    pub meet: PointId,
}

/// Witness for configuration (iii).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelWitness {
    /// The common direction `Q∞` of the class lines.
    pub direction: PointId,
    /// Labels whose classes are collinear toward that direction, ascending.
    pub label_subset: Vec<usize>,
    /// All points carrying a label of the subset, sorted.
    pub star_points: Vec<PointId>,
    /// The guaranteed lower bound `q² − ε − (k²+k)(k²+k−1) − 1` on `|S*|`.
    pub size_bound: i64,
    /// Whether the witness actually clears the bound (reported, not gating).
    pub bound_satisfied: bool,
}

/// The classifier's full answer: one claimed configuration plus every
/// witness found and any hypothesis violations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigReport {
    pub kind: ConfigKind,
    /// Hypothesis violations; classification is best-effort when nonempty.
    pub warnings: Vec<String>,
    pub two: Option<TwoLineWitness>,
    pub three: Option<ParallelWitness>,
}

fn hypothesis_warnings(pi: &Geometry, s: &LabeledSet, k: u32) -> Vec<String> {
    let q = s.q();
    let mut w = Vec::new();
    let min_size = (q * q).saturating_sub(k * q) as usize;
    if s.len() < min_size {
        w.push(format!(
            "size {} below the hypothesis bound q²−kq = {min_size}",
            s.len()
        ));
    }
    if (k as f64) >= (q as f64).sqrt() - 1.0 {
        w.push(format!("k = {k} is not below √q − 1"));
    }
    if let Some(violation) = check_closure(pi, s) {
        w.push(format!(
            "closure fails: {:?} has label {} on a line with two points of label {}",
            violation.point, violation.point_label, violation.pair_label
        ));
    }
    w
}

fn parallel_witness(
    s: &LabeledSet,
    k: u32,
    direction: PointId,
    label_subset: Vec<usize>,
    mut star_points: Vec<PointId>,
) -> ParallelWitness {
    star_points.sort_unstable();
    let q = s.q() as i64;
    let kk = (k as i64) * (k as i64) + k as i64;
    let size_bound = q * q - s.epsilon() as i64 - kk * (kk - 1) - 1;
    let bound_satisfied = star_points.len() as i64 >= size_bound;
    ParallelWitness {
        direction,
        label_subset,
        star_points,
        size_bound,
        bound_satisfied,
    }
}

/// Classifies a labelled set into the trichotomy, best-effort outside the
/// hypotheses.
///
/// ## Algorithm
///
/// Each label class of size at least two is fitted with its spanning line
/// once (collinearity = all members on the line through the first two).
/// Configuration (ii) takes the lexicographically first label pair whose
/// classes are large enough, collinear on distinct lines, and meet
/// affinely. For (iii) every direction on the infinite line is scored in
/// parallel by the points covered by classes collinear toward it; the best
/// direction (largest cover, then smallest id) is the witness. Precedence
/// is (i) > (ii) > (iii); witnesses for the other shapes are still listed.
pub fn classify(pi: &Geometry, s: &LabeledSet, k: Option<u32>) -> ConfigReport {
    let q = s.q();
    let k = k.unwrap_or_else(|| s.k());
    let warnings = hypothesis_warnings(pi, s, k);
    let classes = s.classes();
    let inf = infinite_line(pi).expect("quotient plane has its infinite line");

    // spanning line of each class of size ≥ 2, when collinear
    let class_line: BTreeMap<usize, LineId> = classes
        .iter()
        .filter(|(_, pts)| pts.len() >= 2)
        .filter_map(|(&v, pts)| {
            let l = pi
                .line_through(pts[0], pts[1])
                .expect("class points are distinct");
            pts.iter().all(|&p| pi.on_line(l, p)).then_some((v, l))
        })
        .collect();

    let same_label = classes.len() == 1;

    let need = (q.saturating_sub(k)) as usize;
    let mut two = None;
    'outer: for (&v1, pts1) in &classes {
        if pts1.len() < need {
            continue;
        }
        let Some(&l1) = class_line.get(&v1) else {
            continue;
        };
        for (&v2, pts2) in classes.range(v1 + 1..) {
            if pts2.len() < need {
                continue;
            }
            let Some(&l2) = class_line.get(&v2) else {
                continue;
            };
            if l1 == l2 {
                continue;
            }
            let meet = pi.meet(l1, l2).expect("distinct lines meet");
            if pi.coords(meet)[2] != crate::field::Fel::ZERO {
                two = Some(TwoLineWitness {
                    labels: (v1, v2),
                    lines: (l1, l2),
                    meet,
                });
                break 'outer;
            }
        }
    }

    let best = pi
        .line_points(inf)
        .par_iter()
        .map(|&d| {
            let mut label_subset = Vec::new();
            let mut star = Vec::new();
            for (&v, l) in &class_line {
                if pi.on_line(*l, d) {
                    label_subset.push(v);
                    star.extend_from_slice(&classes[&v]);
                }
            }
            (star.len(), d, label_subset, star)
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    let three = best
        .filter(|(n, _, _, _)| *n > 0)
        .map(|(_, d, vs, star)| parallel_witness(s, k, d, vs, star));

    let kind = if same_label && !s.is_empty() {
        ConfigKind::SameLabel
    } else if two.is_some() {
        ConfigKind::TwoLines
    } else if three.is_some() {
        ConfigKind::ParallelClasses
    } else {
        ConfigKind::Unclassified
    };
    ConfigReport {
        kind,
        warnings,
        two,
        three,
    }
}

/// Brute-force re-derivation of [`classify`]; the two must agree on every
/// input.
///
/// ## Algorithm
///
/// Instead of fitting class lines once, every clause is re-checked from the
/// definitions: (ii) scans all label pairs and verifies collinearity
/// pairwise against the joining line; (iii) scans all `q + 1` directions
/// and, for each class, searches the pencil through the direction for a
/// line containing the whole class.
pub fn classify_oracle(pi: &Geometry, s: &LabeledSet, k: Option<u32>) -> ConfigReport {
    let q = s.q();
    let k = k.unwrap_or_else(|| s.k());
    let warnings = hypothesis_warnings(pi, s, k);
    let classes = s.classes();
    let inf = infinite_line(pi).expect("quotient plane has its infinite line");

    let same_label = classes.len() == 1;

    let collinear_on = |pts: &[PointId]| -> Option<LineId> {
        if pts.len() < 2 {
            return None;
        }
        let l = pi.line_through(pts[0], pts[1]).ok()?;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                if pi.line_through(a, b).ok()? != l {
                    return None;
                }
            }
        }
        Some(l)
    };

    let need = (q.saturating_sub(k)) as usize;
    let mut two = None;
    'outer: for (&v1, pts1) in &classes {
        for (&v2, pts2) in &classes {
            if v2 <= v1 {
                continue;
            }
            if pts1.len() < need || pts2.len() < need {
                continue;
            }
            let (Some(l1), Some(l2)) = (collinear_on(pts1), collinear_on(pts2)) else {
                continue;
            };
            if l1 == l2 {
                continue;
            }
            let meet = pi.meet(l1, l2).expect("distinct lines meet");
            if pi.coords(meet)[2] != crate::field::Fel::ZERO {
                two = Some(TwoLineWitness {
                    labels: (v1, v2),
                    lines: (l1, l2),
                    meet,
                });
                break 'outer;
            }
        }
    }

    let mut best: Option<(usize, PointId, Vec<usize>, Vec<PointId>)> = None;
    for &d in pi.line_points(inf) {
        let mut label_subset = Vec::new();
        let mut star = Vec::new();
        for (&v, pts) in &classes {
            if pts.len() < 2 {
                continue;
            }
            let through_d = pi
                .lines_through(d)
                .iter()
                .copied()
                .any(|l| l != inf && pts.iter().all(|&p| pi.on_line(l, p)));
            if through_d {
                label_subset.push(v);
                star.extend_from_slice(pts);
            }
        }
        let better = match &best {
            None => true,
            Some((n, bd, _, _)) => star.len() > *n || (star.len() == *n && d < *bd),
        };
        if better {
            best = Some((star.len(), d, label_subset, star));
        }
    }
    let three = best
        .filter(|(n, _, _, _)| *n > 0)
        .map(|(_, d, vs, star)| parallel_witness(s, k, d, vs, star));

    let kind = if same_label && !s.is_empty() {
        ConfigKind::SameLabel
    } else if two.is_some() {
        ConfigKind::TwoLines
    } else if three.is_some() {
        ConfigKind::ParallelClasses
    } else {
        ConfigKind::Unclassified
    };
    ConfigReport {
        kind,
        warnings,
        two,
        three,
    }
}

/// Draws a random labelled set that satisfies the closure property by
/// construction: same-label sets, all-distinct-label sets, two meeting
/// fully-labelled lines with off-line singletons, or parallel one-label
/// lines through a common direction.
pub fn random_closure_set<R: Rng>(pi: &Geometry, rng: &mut R) -> LabeledSet {
    let q = pi.order();
    let affine: Vec<PointId> = pi
        .points_iter()
        .filter(|&p| pi.coords(p)[2] != crate::field::Fel::ZERO)
        .collect();
    let inf = infinite_line(pi).expect("quotient plane has its infinite line");
    let labels: Vec<usize> = (0..=q as usize).collect();

    let mode = if q >= 4 { rng.gen_range(0..4) } else { rng.gen_range(0..2) };
    let entries: Vec<(PointId, usize)> = match mode {
        0 => {
            // one label on a random nonempty subset
            let v = *labels.choose(rng).unwrap();
            let n = rng.gen_range(1..=affine.len());
            affine
                .choose_multiple(rng, n)
                .map(|&p| (p, v))
                .collect()
        }
        1 => {
            // pairwise distinct labels: closure is vacuous
            let n = rng.gen_range(1..=labels.len().min(affine.len()));
            let mut vs = labels.clone();
            vs.shuffle(rng);
            affine
                .choose_multiple(rng, n)
                .zip(vs)
                .map(|(&p, v)| (p, v))
                .collect()
        }
        2 => {
            // two fully-labelled lines meeting affinely, plus singletons
            let c = *affine.choose(rng).unwrap();
            let through: Vec<LineId> = pi
                .lines_through(c)
                .iter()
                .copied()
                .filter(|&l| l != inf)
                .collect();
            let picked = through.choose_multiple(rng, 2).copied().collect::<Vec<_>>();
            let (l1, l2) = (picked[0], picked[1]);
            let mut vs = labels.clone();
            vs.shuffle(rng);
            let mut out = Vec::new();
            for (li, v) in [(l1, vs[0]), (l2, vs[1])] {
                let cands: Vec<PointId> = pi
                    .line_points(li)
                    .iter()
                    .copied()
                    .filter(|&p| p != c && pi.coords(p)[2] != crate::field::Fel::ZERO)
                    .collect();
                let n = rng.gen_range(2..=cands.len());
                out.extend(cands.choose_multiple(rng, n).map(|&p| (p, v)));
            }
            let off: Vec<PointId> = affine
                .iter()
                .copied()
                .filter(|&p| !pi.on_line(l1, p) && !pi.on_line(l2, p))
                .collect();
            let extra = rng.gen_range(0..=2usize.min(off.len()).min(vs.len() - 2));
            out.extend(
                off.choose_multiple(rng, extra)
                    .zip(vs[2..].iter())
                    .map(|(&p, &v)| (p, v)),
            );
            out
        }
        _ => {
            // one-label lines through a common direction
            let d = *pi.line_points(inf).choose(rng).unwrap();
            let through: Vec<LineId> = pi
                .lines_through(d)
                .iter()
                .copied()
                .filter(|&l| l != inf)
                .collect();
            let r = rng.gen_range(1..=through.len().min(labels.len()));
            let mut vs = labels.clone();
            vs.shuffle(rng);
            let mut out = Vec::new();
            for (&li, v) in through.choose_multiple(rng, r).zip(vs) {
                let cands: Vec<PointId> = pi
                    .line_points(li)
                    .iter()
                    .copied()
                    .filter(|&p| pi.coords(p)[2] != crate::field::Fel::ZERO)
                    .collect();
                let n = rng.gen_range(2..=cands.len());
                out.extend(cands.choose_multiple(rng, n).map(|&p| (p, v)));
            }
            out
        }
    };
    LabeledSet::new(pi, &entries, None).expect("generator produces valid sets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap;
    use crate::field::{Fel, FieldCtx};
    use crate::unital;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::Arc;

    fn pi_plane(q: u32) -> Geometry {
        let ctx = Arc::new(FieldCtx::build_q(q).unwrap());
        Geometry::new(Arc::clone(&ctx), q, 2).unwrap()
    }

    fn bm_setup(q: u32) -> (AbbModel, unital::Unital) {
        let ctx = Arc::new(FieldCtx::build_q(q).unwrap());
        let abb = AbbModel::new(Arc::clone(&ctx)).unwrap();
        let g3 = Geometry::new(Arc::clone(&ctx), q, 3).unwrap();
        let o = cap::elliptic_quadric(&g3).unwrap();
        let emb = cap::embed_in_solid(&g3, abb.space(), &o).unwrap();
        let vertex = abb.space().point_from_raw(&[0, 0, 0, 1, 0]).unwrap();
        let (u, _) = unital::bm_unital(&abb, &emb, vertex).unwrap();
        (abb, u)
    }

    fn baer_secant_lines(abb: &AbbModel, u: &unital::Unital) -> Vec<Vec<PointId>> {
        let census = unital::secant_census(u, abb.p_infinity()).unwrap();
        census
            .baer_secants
            .iter()
            .map(|&l| {
                let trace = u.trace(abb.plane(), l);
                match abb.transfer_subline(&trace).unwrap() {
                    crate::abb::SublineTransfer::Line { points, .. } => points,
                    crate::abb::SublineTransfer::Conic { .. } => {
                        panic!("secant through the special point transfers to a line")
                    }
                }
            })
            .collect()
    }

    #[test]
    fn bm_baer_secants_give_configuration_i() {
        let (abb, u) = bm_setup(3);
        let lines = baer_secant_lines(&abb, &u);
        assert_eq!(lines.len(), 9);
        let (s, _) = build_slabels(&abb, &lines).unwrap();
        assert_eq!(s.len(), 9);
        let vertex = abb.space().point_from_raw(&[0, 0, 0, 1, 0]).unwrap();
        let vertex_label = abb.t_line().binary_search(&vertex).unwrap();
        assert!(s.entries().all(|(_, v)| v == vertex_label));
        let pi = pi_plane(3);
        assert!(check_closure(&pi, &s).is_none());
        let report = classify(&pi, &s, None);
        assert_eq!(report.kind, ConfigKind::SameLabel);
        assert!(report.warnings.is_empty());
        assert_eq!(report, classify_oracle(&pi, &s, None));
    }

    #[test]
    fn chart_adapted_classical_unital_gives_configuration_i() {
        // a Hermitian form whose unital passes through the special point
        // with the infinite line as tangent: x·x^q + Tr(y^q z) = 0
        let ctx = Arc::new(FieldCtx::build_q(3).unwrap());
        let abb = AbbModel::new(Arc::clone(&ctx)).unwrap();
        let h = [
            [Fel::ONE, Fel::ZERO, Fel::ZERO],
            [Fel::ZERO, Fel::ZERO, Fel::ONE],
            [Fel::ZERO, Fel::ONE, Fel::ZERO],
        ];
        let u = unital::hermitian_unital(abb.plane(), &h).unwrap();
        assert!(u.contains(abb.p_infinity()));
        assert_eq!(u.tangent_of(abb.p_infinity()), Some(abb.ell_inf()));
        let lines = baer_secant_lines(&abb, &u);
        assert_eq!(lines.len(), 9);
        let (s, _) = build_slabels(&abb, &lines).unwrap();
        assert_eq!(s.len(), 9);
        let pi = pi_plane(3);
        assert!(check_closure(&pi, &s).is_none());
        assert_eq!(classify(&pi, &s, None).kind, ConfigKind::SameLabel);
    }

    #[test]
    fn build_rejects_degenerate_line_families() {
        let ctx = Arc::new(FieldCtx::build_q(3).unwrap());
        let abb = AbbModel::new(Arc::clone(&ctx)).unwrap();
        let space = abb.space();
        // the transversal line itself lies inside the infinite hyperplane
        assert!(matches!(
            build_slabels(&abb, &[abb.t_line().to_vec()]),
            Err(SlabelError::LineInsideInfinity)
        ));
        // a line reaching the infinite hyperplane off the transversal line
        let origin = space.point_from_raw(&[0, 0, 0, 0, 1]).unwrap();
        let sideways = space.point_from_raw(&[1, 0, 0, 0, 0]).unwrap();
        let bad = space.line_points_dynamic(origin, sideways).unwrap();
        assert!(matches!(
            build_slabels(&abb, &[bad]),
            Err(SlabelError::OffTransversal)
        ));
        // two lines inside one plane through the transversal line
        let v = space.point_from_raw(&[0, 0, 0, 1, 0]).unwrap();
        let x1 = space.point_from_raw(&[0, 0, 0, 0, 1]).unwrap();
        let x2 = space.point_from_raw(&[0, 0, 1, 0, 1]).unwrap();
        let l1 = space.line_points_dynamic(v, x1).unwrap();
        let l2 = space.line_points_dynamic(v, x2).unwrap();
        assert!(matches!(
            build_slabels(&abb, &[l1, l2]),
            Err(SlabelError::TwoLinesInOnePlane { .. })
        ));
        // a single line is fine and gives a singleton
        let l = space
            .line_points_dynamic(v, space.point_from_raw(&[1, 0, 0, 0, 1]).unwrap())
            .unwrap();
        let (s, _) = build_slabels(&abb, &[l]).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn closure_violation_is_witnessed() {
        let pi = pi_plane(3);
        let a = pi.point_from_raw(&[0, 0, 1]).unwrap();
        let b = pi.point_from_raw(&[1, 0, 1]).unwrap();
        let c = pi.point_from_raw(&[2, 0, 1]).unwrap();
        let s = LabeledSet::new(&pi, &[(a, 3), (b, 3), (c, 1)], None).unwrap();
        let v = check_closure(&pi, &s).expect("interleaved labels violate closure");
        assert_eq!(v.pair_label, 3);
        assert_eq!(v.point_label, 1);
        assert_eq!(v.point, c);
        let (p1, p2) = v.pair;
        let l = pi.line_through(p1, p2).unwrap();
        assert!(pi.on_line(l, v.point));
        // the warning shows up in best-effort classification
        let report = classify(&pi, &s, None);
        assert!(report.warnings.iter().any(|w| w.contains("closure")));
        assert_eq!(report, classify_oracle(&pi, &s, None));
    }

    #[test]
    fn labeled_set_validation_errors() {
        let pi = pi_plane(3);
        let inf_pt = pi.point_from_raw(&[1, 0, 0]).unwrap();
        let a = pi.point_from_raw(&[0, 0, 1]).unwrap();
        assert!(matches!(
            LabeledSet::new(&pi, &[(inf_pt, 0)], None),
            Err(SlabelError::NotAffine(_))
        ));
        assert!(matches!(
            LabeledSet::new(&pi, &[(a, 4)], None),
            Err(SlabelError::BadLabel { label: 4, max: 3 })
        ));
        assert!(matches!(
            LabeledSet::new(&pi, &[(a, 0), (a, 1)], None),
            Err(SlabelError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn synthetic_two_line_configuration() {
        // q = 9, k = 1: two classes of size 8 = q − k on lines through the
        // affine origin, plus two off-line singletons
        let pi = pi_plane(9);
        let mut entries = Vec::new();
        for x in 1..9u16 {
            entries.push((pi.point_from_raw(&[x, 0, 1]).unwrap(), 0));
            entries.push((pi.point_from_raw(&[0, x, 1]).unwrap(), 1));
        }
        entries.push((pi.point_from_raw(&[1, 1, 1]).unwrap(), 2));
        entries.push((pi.point_from_raw(&[2, 1, 1]).unwrap(), 3));
        let s = LabeledSet::new(&pi, &entries, None).unwrap();
        assert!(check_closure(&pi, &s).is_none());
        let report = classify(&pi, &s, Some(1));
        assert_eq!(report.kind, ConfigKind::TwoLines);
        let w = report.two.as_ref().unwrap();
        assert_eq!(w.labels, (0, 1));
        assert_eq!(w.meet, pi.point_from_raw(&[0, 0, 1]).unwrap());
        // undersized for the hypothesis, so flagged
        assert!(!report.warnings.is_empty());
        assert_eq!(report, classify_oracle(&pi, &s, Some(1)));
    }

    #[test]
    fn synthetic_parallel_configuration() {
        // three one-label classes on parallel lines y = 0, 1, 2 at q = 5
        let pi = pi_plane(5);
        let mut entries = Vec::new();
        for (y, n, v) in [(0u16, 3usize, 0usize), (1, 4, 1), (2, 2, 2)] {
            for x in 0..n as u16 {
                entries.push((pi.point_from_raw(&[x, y, 1]).unwrap(), v));
            }
        }
        let s = LabeledSet::new(&pi, &entries, None).unwrap();
        assert!(check_closure(&pi, &s).is_none());
        let report = classify(&pi, &s, None);
        assert_eq!(report.kind, ConfigKind::ParallelClasses);
        let w = report.three.as_ref().unwrap();
        assert_eq!(w.direction, pi.point_from_raw(&[1, 0, 0]).unwrap());
        assert_eq!(w.label_subset, vec![0, 1, 2]);
        assert_eq!(w.star_points.len(), 9);
        // ε = 16, k = 0: bound is 25 − 16 − 0 − 1 = 8 ≤ 9
        assert_eq!(w.size_bound, 8);
        assert!(w.bound_satisfied);
        assert_eq!(report, classify_oracle(&pi, &s, None));
    }

    #[test]
    fn same_label_takes_precedence_but_other_witnesses_are_listed() {
        // a single-label class on one line also fits shape (iii)
        let pi = pi_plane(5);
        let entries: Vec<(PointId, usize)> = (0..4u16)
            .map(|x| (pi.point_from_raw(&[x, 2, 1]).unwrap(), 5))
            .collect();
        let s = LabeledSet::new(&pi, &entries, None).unwrap();
        let report = classify(&pi, &s, None);
        assert_eq!(report.kind, ConfigKind::SameLabel);
        assert!(report.two.is_none());
        let w = report.three.as_ref().unwrap();
        assert_eq!(w.label_subset, vec![5]);
        assert_eq!(report, classify_oracle(&pi, &s, None));
    }

    #[test]
    fn classifier_agrees_with_oracle_on_random_sets() {
        for q in [5u32, 9] {
            let pi = pi_plane(q);
            let mut rng = ChaCha20Rng::seed_from_u64(0x5eed + q as u64);
            for _ in 0..400 {
                let s = random_closure_set(&pi, &mut rng);
                assert!(
                    check_closure(&pi, &s).is_none(),
                    "generator must satisfy closure"
                );
                let a = classify(&pi, &s, None);
                let b = classify_oracle(&pi, &s, None);
                assert_eq!(a, b);
            }
        }
    }
}
