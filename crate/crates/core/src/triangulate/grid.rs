//! Rotated square grid superposition.
//!
//! Grid lines are kept with exactly rational coefficients by representing
//! the rotation as a primitive integer direction (p, q): the two line
//! families are `p x + q y = o_A + i c` and `-q x + p y = o_B + j c`.

use num_traits::Signed;

use super::angles::Rotation;
use super::pslg::{node_segments, Pslg, RawSegment};
use super::TriangulateError;
use crate::geom::hull::convex_hull;
use crate::geom::point::Point;
use crate::rat::{rat_i, rational_approx, to_f64, Rat};

/// A rotated square grid.
#[derive(Clone, Debug)]
pub struct GridSpec {
    /// Requested cell diameter (diagonal), world units.
    pub cell_diameter: f64,
    /// Rotation angle in radians.
    pub rotation: f64,
    /// Primitive integer direction of one line family.
    pub dir: (i64, i64),
    /// Offset step between consecutive lines, in the scaled line form.
    pub spacing: Rat,
    /// Offsets of the two families.
    pub origin_a: Rat,
    pub origin_b: Rat,
}

impl GridSpec {
    /// Build a grid with cells of diameter at most `delta` at the given
    /// rotation. Offsets start at zero; `shift` nudges them for degeneracy
    /// avoidance.
    pub fn new(delta: f64, rotation: &Rotation, shift: u32) -> Result<GridSpec, TriangulateError> {
        if !(delta > 0.0) {
            return Err(TriangulateError::InvalidParameter(format!("cell diameter {delta} must be positive")));
        }
        let (p, q) = rotation.dir;
        let norm = ((p * p + q * q) as f64).sqrt();
        // Side length h = c / |(p,q)|; diameter = h * sqrt(2) <= delta.
        let c_target = delta * norm / std::f64::consts::SQRT_2;
        let mut c = rational_approx(c_target * 0.999, 1 << 16);
        if to_f64(&c) > c_target || !c.is_positive() {
            c = rational_approx(c_target * 0.5, 1 << 16);
        }
        if !c.is_positive() {
            return Err(TriangulateError::InvalidParameter("cell size underflow".into()));
        }
        let off = &c * Rat::new((shift as i64).into(), 1009.into());
        Ok(GridSpec {
            cell_diameter: delta,
            rotation: rotation.angle,
            dir: (p, q),
            spacing: c.clone(),
            origin_a: off.clone(),
            origin_b: off,
        })
    }

    fn proj_a(&self, pt: &Point) -> Rat {
        &pt.x * rat_i(self.dir.0) + &pt.y * rat_i(self.dir.1)
    }

    fn proj_b(&self, pt: &Point) -> Rat {
        &pt.x * rat_i(-self.dir.1) + &pt.y * rat_i(self.dir.0)
    }

    /// Does any of the given points lie exactly on a grid line?
    pub fn touches_any(&self, pts: &[Point]) -> bool {
        pts.iter().any(|p| {
            let ra = (self.proj_a(p) - &self.origin_a) / &self.spacing;
            let rb = (self.proj_b(p) - &self.origin_b) / &self.spacing;
            ra.is_integer() || rb.is_integer()
        })
    }

    /// Grid chords clipped to the convex hull of the given points.
    pub fn chords(&self, hull: &[Point]) -> Vec<(Point, Point)> {
        if hull.len() < 3 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for family in 0..2 {
            // Line: n . X = o + i c with n the family normal.
            let (proj, origin): (Box<dyn Fn(&Point) -> Rat>, &Rat) = if family == 0 {
                (Box::new(|p: &Point| self.proj_a(p)), &self.origin_a)
            } else {
                (Box::new(|p: &Point| self.proj_b(p)), &self.origin_b)
            };
            let vals: Vec<Rat> = hull.iter().map(|p| proj(p)).collect();
            let lo = vals.iter().min().unwrap().clone();
            let hi = vals.iter().max().unwrap().clone();
            let i_lo = ((&lo - origin) / &self.spacing).ceil().to_integer();
            let i_hi = ((&hi - origin) / &self.spacing).floor().to_integer();
            let mut i = i_lo;
            while i <= i_hi {
                let level = origin + &self.spacing * Rat::from_integer(i.clone());
                if let Some((a, b)) = line_hull_chord(hull, &vals, &level) {
                    out.push((a, b));
                }
                i += 1;
            }
        }
        out
    }
}

/// Intersect the level line {proj = level} with the hull boundary (convex,
/// CCW); returns the chord endpoints when the line crosses the interior.
fn line_hull_chord(hull: &[Point], vals: &[Rat], level: &Rat) -> Option<(Point, Point)> {
    let n = hull.len();
    let mut hits: Vec<Point> = Vec::new();
    for i in 0..n {
        let (va, vb) = (&vals[i], &vals[(i + 1) % n]);
        let (pa, pb) = (&hull[i], &hull[(i + 1) % n]);
        if (va < level && vb < level) || (va > level && vb > level) {
            continue;
        }
        if va == vb {
            // Edge lies on the line: take both endpoints.
            hits.push(pa.clone());
            hits.push(pb.clone());
            continue;
        }
        let t = (level - va) / (vb - va);
        if t.is_negative() || t > Rat::from_integer(1.into()) {
            continue;
        }
        hits.push(pa.lerp(pb, &t));
    }
    hits.sort();
    hits.dedup();
    if hits.len() < 2 {
        return None;
    }
    let a = hits.first().unwrap().clone();
    let b = hits.last().unwrap().clone();
    if a == b {
        None
    } else {
        Some((a, b))
    }
}

/// Superimpose a rotated square grid on the PSLG: grid chords are clipped to
/// the convex hull, and every grid/input crossing becomes a vertex.
/// Multiplicity tags survive on the sub-segments. When a degenerate
/// incidence (input vertex exactly on a grid line) is detected, the grid
/// offsets are shifted deterministically and the superposition retried.
pub fn superimpose_grid(pslg: &Pslg, delta: f64, rotation: &Rotation) -> Result<(Pslg, GridSpec), TriangulateError> {
    let hull = convex_hull(&pslg.vertices);
    if hull.len() < 3 {
        return Err(TriangulateError::InvalidPslg("grid superposition needs a 2-dimensional input".into()));
    }
    for shift in 0..1009u32 {
        let grid = GridSpec::new(delta, rotation, shift)?;
        if grid.touches_any(&pslg.vertices) {
            continue;
        }
        let chords = grid.chords(&hull);
        if chords.is_empty() {
            return Ok((pslg.clone(), grid));
        }
        let mut raw: Vec<RawSegment> = Vec::new();
        for s in &pslg.segments {
            raw.push(RawSegment {
                a: pslg.vertices[s.a].clone(),
                b: pslg.vertices[s.b].clone(),
                tags: s.tags.clone(),
            });
        }
        for (a, b) in chords {
            raw.push(RawSegment::untagged(a, b));
        }
        let noded = node_segments(&raw)?;
        // Degeneracy audit: a grid lattice point must not sit in the interior
        // of an input (tagged) segment; if it happened the noding would have
        // placed a vertex with both residues integral on a tagged segment.
        let lattice_on_input = noded.segments.iter().any(|s| {
            if s.tags.is_empty() {
                return false;
            }
            [s.a, s.b].iter().any(|&v| {
                let p = &noded.vertices[v];
                let ra = (grid.proj_a(p) - &grid.origin_a) / &grid.spacing;
                let rb = (grid.proj_b(p) - &grid.origin_b) / &grid.spacing;
                ra.is_integer() && rb.is_integer()
            })
        });
        if lattice_on_input {
            continue;
        }
        return Ok((noded, grid));
    }
    Err(TriangulateError::InvalidPslg("no non-degenerate grid offset found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulate::angles::{choose_rotation, forbidden_angles};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn horizontal_segment_under_rotated_grid() {
        // A triangle domain with one tagged interior-ish segment.
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(10, 0)),
            RawSegment::untagged(pt(10, 0), pt(5, 8)),
            RawSegment::untagged(pt(5, 8), pt(0, 0)),
            RawSegment::tagged(pt(2, 2), pt(7, 2), 0, 2),
        ])
        .unwrap();
        let rot = choose_rotation(&forbidden_angles(&pslg));
        let (noded, grid) = superimpose_grid(&pslg, 1.0, &rot).unwrap();
        noded.validate().unwrap();
        assert!(noded.vertices.len() > pslg.vertices.len());
        // The tagged segment splits into pieces each shorter than the cell
        // diameter, with total length preserved and tags intact.
        let mut total = 0.0;
        for s in &noded.segments {
            if let Some(t) = s.tags.iter().find(|t| t.source == 0) {
                assert_eq!(t.mult.abs(), 2);
                let (a, b) = noded.segment_points(
                    noded
                        .segments
                        .iter()
                        .position(|x| std::ptr::eq(x, s))
                        .unwrap(),
                );
                let len = a.dist_f64(b);
                assert!(len <= grid.cell_diameter + 1e-12);
                total += len;
            }
        }
        assert!((total - 5.0).abs() < 1e-9, "tagged length conserved, got {total}");
    }

    #[test]
    fn grid_cells_bounded_by_diameter() {
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(8, 0)),
            RawSegment::untagged(pt(8, 0), pt(8, 8)),
            RawSegment::untagged(pt(8, 8), pt(0, 8)),
            RawSegment::untagged(pt(0, 8), pt(0, 0)),
        ])
        .unwrap();
        let rot = choose_rotation(&forbidden_angles(&pslg));
        let (noded, _) = superimpose_grid(&pslg, 2.0, &rot).unwrap();
        noded.validate().unwrap();
        assert!(noded.vertices.len() > 16, "grid vertices present");
    }
}
