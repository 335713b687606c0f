//! Text formats for point sets and labelled sets.
//!
//! Point-set files carry one projective point per line, coordinates as
//! field-element encodings joined by `:` (for example `0:1:0` in a plane or
//! `0:0:1:4:0` in four-space). Labelled-set files open with a header line
//! `q k` and continue with one `x y label` triple per line, each naming the
//! affine point `(x : y : 1)` of `AG(2,q)`. Both formats treat `#` as a
//! comment-to-end-of-line marker and ignore blank lines. Writers emit
//! points in ascending canonical order so files are byte-stable.

use crate::geom::{GeomError, Geometry, PointId};
use crate::slabels::{LabeledSet, SlabelError};

/// Errors raised while parsing point-set or labelled-set text.
#[derive(Debug, thiserror::Error)]
pub enum PtFileError {
    #[error("line {line}: expected {want} coordinates, got {got}")]
    WrongArity { line: usize, got: usize, want: usize },
    #[error("line {line}: bad field element `{token}`")]
    BadCoordinate { line: usize, token: String },
    #[error("line {line}: {source}")]
    BadPoint {
        line: usize,
        #[source]
        source: GeomError,
    },
    #[error("missing `q k` header line")]
    MissingHeader,
    #[error("bad `q k` header line `{0}`")]
    BadHeader(String),
    #[error("header names order {got}, expected {want}")]
    WrongOrder { got: u32, want: u32 },
    #[error("line {line}: expected `x y label`")]
    BadEntry { line: usize },
    #[error(transparent)]
    Slabel(#[from] SlabelError),
}

/// Strips a `#` comment and surrounding whitespace; `None` if nothing is left.
fn payload(line: &str) -> Option<&str> {
    let text = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let text = text.trim();
    (!text.is_empty()).then_some(text)
}

/// One point as `x:y:...` in canonical (leftmost-one) coordinates.
pub fn format_point(g: &Geometry, p: PointId) -> String {
    g.coords(p)
        .iter()
        .map(|c| c.0.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

/// A whole point set, one point per line, ascending ids.
pub fn write_points(g: &Geometry, pts: &[PointId]) -> String {
    let mut sorted = pts.to_vec();
    sorted.sort_unstable();
    let mut out = String::new();
    for p in sorted {
        out.push_str(&format_point(g, p));
        out.push('\n');
    }
    out
}

fn parse_coords(g: &Geometry, text: &str, line: usize) -> Result<PointId, PtFileError> {
    let toks: Vec<&str> = text.split(':').collect();
    let want = g.dim() + 1;
    if toks.len() != want {
        return Err(PtFileError::WrongArity {
            line,
            got: toks.len(),
            want,
        });
    }
    let mut raw = Vec::with_capacity(want);
    for t in &toks {
        let v: u16 = t.trim().parse().map_err(|_| PtFileError::BadCoordinate {
            line,
            token: t.trim().to_string(),
        })?;
        raw.push(v);
    }
    g.point_from_raw(&raw)
        .map_err(|source| PtFileError::BadPoint { line, source })
}

/// Parses a point-set file against a geometry; duplicates are kept as
/// written so callers can decide whether repetition is an error.
pub fn parse_points(g: &Geometry, text: &str) -> Result<Vec<PointId>, PtFileError> {
    let mut out = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let Some(body) = payload(raw_line) else {
            continue;
        };
        out.push(parse_coords(g, body, i + 1)?);
    }
    Ok(out)
}

/// A labelled set as a `q k` header plus `x y label` lines, ascending point
/// order.
pub fn write_labeled(pi: &Geometry, s: &LabeledSet) -> String {
    let mut out = format!("{} {}\n", s.q(), s.k());
    for (p, label) in s.entries() {
        let c = pi.coords(p);
        let z_inv = pi.ctx().inv(c[2]);
        let x = pi.ctx().mul(c[0], z_inv);
        let y = pi.ctx().mul(c[1], z_inv);
        out.push_str(&format!("{} {} {}\n", x.0, y.0, label));
    }
    out
}

/// Parses a labelled-set file against the quotient plane `Π = PG(2,q)`.
pub fn parse_labeled(pi: &Geometry, text: &str) -> Result<LabeledSet, PtFileError> {
    let mut header: Option<(u32, u32)> = None;
    let mut entries: Vec<(PointId, usize)> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let Some(body) = payload(raw_line) else {
            continue;
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        if header.is_none() {
            if toks.len() != 2 {
                return Err(PtFileError::BadHeader(body.to_string()));
            }
            let q: u32 = toks[0]
                .parse()
                .map_err(|_| PtFileError::BadHeader(body.to_string()))?;
            let k: u32 = toks[1]
                .parse()
                .map_err(|_| PtFileError::BadHeader(body.to_string()))?;
            if q != pi.order() {
                return Err(PtFileError::WrongOrder {
                    got: q,
                    want: pi.order(),
                });
            }
            header = Some((q, k));
            continue;
        }
        if toks.len() != 3 {
            return Err(PtFileError::BadEntry { line: i + 1 });
        }
        let mut nums = [0u16; 2];
        for (slot, t) in nums.iter_mut().zip(&toks[..2]) {
            *slot = t.parse().map_err(|_| PtFileError::BadCoordinate {
                line: i + 1,
                token: t.to_string(),
            })?;
        }
        let label: usize = toks[2]
            .parse()
            .map_err(|_| PtFileError::BadEntry { line: i + 1 })?;
        let p = pi
            .point_from_raw(&[nums[0], nums[1], 1])
            .map_err(|source| PtFileError::BadPoint {
                line: i + 1,
                source,
            })?;
        entries.push((p, label));
    }
    let (_, k) = header.ok_or(PtFileError::MissingHeader)?;
    Ok(LabeledSet::new(pi, &entries, Some(k))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use std::sync::Arc;

    fn plane(q: u32) -> Geometry {
        let ctx = Arc::new(FieldCtx::build_q(q).unwrap());
        Geometry::new(ctx, q, 2).unwrap()
    }

    #[test]
    fn point_sets_round_trip() {
        let g = plane(4);
        let pts: Vec<PointId> = g.points_iter().step_by(3).collect();
        let text = write_points(&g, &pts);
        let back = parse_points(&g, &text).unwrap();
        assert_eq!(back, pts);
        // comments and blank lines are ignored
        let noisy = format!("# header\n\n{text}# trailer\n");
        assert_eq!(parse_points(&g, &noisy).unwrap(), pts);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let g = plane(3);
        assert!(matches!(
            parse_points(&g, "1:2\n"),
            Err(PtFileError::WrongArity {
                line: 1,
                got: 2,
                want: 3
            })
        ));
        assert!(matches!(
            parse_points(&g, "0:0:1\nx:0:1\n"),
            Err(PtFileError::BadCoordinate { line: 2, .. })
        ));
        assert!(matches!(
            parse_points(&g, "0:0:0\n"),
            Err(PtFileError::BadPoint { line: 1, .. })
        ));
    }

    #[test]
    fn labelled_sets_round_trip() {
        let pi = plane(3);
        let a = pi.point_from_raw(&[0, 0, 1]).unwrap();
        let b = pi.point_from_raw(&[1, 2, 1]).unwrap();
        let s = crate::slabels::LabeledSet::new(&pi, &[(a, 0), (b, 3)], Some(1)).unwrap();
        let text = write_labeled(&pi, &s);
        assert!(text.starts_with("3 1\n"));
        let back = parse_labeled(&pi, &text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn labelled_set_headers_are_validated() {
        let pi = plane(3);
        assert!(matches!(
            parse_labeled(&pi, ""),
            Err(PtFileError::MissingHeader)
        ));
        assert!(matches!(
            parse_labeled(&pi, "nonsense\n"),
            Err(PtFileError::BadHeader(_))
        ));
        assert!(matches!(
            parse_labeled(&pi, "4 0\n"),
            Err(PtFileError::WrongOrder { got: 4, want: 3 })
        ));
        assert!(matches!(
            parse_labeled(&pi, "3 0\n1 1\n"),
            Err(PtFileError::BadEntry { line: 2 })
        ));
        // labels outside 0..=q are rejected by the labelled-set validator
        assert!(matches!(
            parse_labeled(&pi, "3 0\n1 1 9\n"),
            Err(PtFileError::Slabel(SlabelError::BadLabel { .. }))
        ));
    }
}
