//! Planar straight line graphs with multiplicity tags, and exact noding.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::geom::point::Point;
use crate::geom::predicates::{segment_intersection, SegSeg};
use crate::rat::Rat;

use super::TriangulateError;

/// A tag tying a (sub)segment back to an input current: `source` identifies
/// the current, `mult` is its multiplicity along the segment's a -> b
/// direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegTag {
    pub source: u32,
    pub mult: i64,
}

#[derive(Clone, Debug)]
pub struct PslgSegment {
    pub a: usize,
    pub b: usize,
    pub tags: Vec<SegTag>,
}

/// A planar straight line graph: vertices plus non-crossing segments.
#[derive(Clone, Debug, Default)]
pub struct Pslg {
    pub vertices: Vec<Point>,
    pub segments: Vec<PslgSegment>,
}

impl Pslg {
    pub fn segment_points(&self, i: usize) -> (&Point, &Point) {
        let s = &self.segments[i];
        (&self.vertices[s.a], &self.vertices[s.b])
    }

    /// Total length of all segments (the 1-skeleton measure), f64.
    pub fn skeleton_length(&self) -> f64 {
        (0..self.segments.len())
            .map(|i| {
                let (a, b) = self.segment_points(i);
                a.dist_f64(b)
            })
            .sum()
    }

    pub fn bbox(&self) -> Option<(Point, Point)> {
        let mut it = self.vertices.iter();
        let first = it.next()?;
        let (mut lox, mut loy, mut hix, mut hiy) =
            (first.x.clone(), first.y.clone(), first.x.clone(), first.y.clone());
        for p in it {
            if p.x < lox {
                lox = p.x.clone();
            }
            if p.x > hix {
                hix = p.x.clone();
            }
            if p.y < loy {
                loy = p.y.clone();
            }
            if p.y > hiy {
                hiy = p.y.clone();
            }
        }
        Some((Point::new(lox, loy), Point::new(hix, hiy)))
    }

    /// Check PSLG invariants: segments meet only at shared vertices, no
    /// duplicates, no vertex interior to a segment. Candidate pairs come
    /// from a uniform bounding-box grid, so large graphs stay near-linear.
    pub fn validate(&self) -> Result<(), TriangulateError> {
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.segments.iter().enumerate() {
            if s.a == s.b {
                return Err(TriangulateError::InvalidPslg(format!("segment {i} is degenerate")));
            }
            if !seen.insert((s.a.min(s.b), s.a.max(s.b))) {
                return Err(TriangulateError::InvalidPslg(format!("segment {i} duplicates another")));
            }
        }
        let grid = SegGrid::build(self);
        for (i, j) in grid.candidate_pairs() {
            let (a1, b1) = self.segment_points(i);
            let (a2, b2) = self.segment_points(j);
            match segment_intersection(a1, b1, a2, b2) {
                SegSeg::None => {}
                SegSeg::Point(p) => {
                    let shared = (p == *a1 || p == *b1) && (p == *a2 || p == *b2);
                    if !shared {
                        return Err(TriangulateError::InvalidPslg(format!(
                            "segments {i} and {j} cross at {p:?}"
                        )));
                    }
                }
                SegSeg::Overlap(_, _) => {
                    return Err(TriangulateError::InvalidPslg(format!("segments {i} and {j} overlap")));
                }
            }
        }
        for (v, p) in self.vertices.iter().enumerate() {
            for i in grid.segments_near(p) {
                let s = &self.segments[i];
                if s.a != v && s.b != v {
                    let (a, b) = (&self.vertices[s.a], &self.vertices[s.b]);
                    if crate::geom::predicates::on_segment_interior(p, a, b) {
                        return Err(TriangulateError::InvalidPslg(format!(
                            "vertex {v} lies inside segment {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest angle between segments sharing an endpoint, in degrees.
    /// Returns None for graphs with no such incidences.
    pub fn min_input_angle_deg(&self) -> Option<f64> {
        let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, s) in self.segments.iter().enumerate() {
            incident.entry(s.a).or_default().push(i);
            incident.entry(s.b).or_default().push(i);
        }
        let mut min = f64::INFINITY;
        for (&v, segs) in &incident {
            for (k, &i) in segs.iter().enumerate() {
                for &j in &segs[k + 1..] {
                    let di = self.direction_from(v, i);
                    let dj = self.direction_from(v, j);
                    let dot = di.0 * dj.0 + di.1 * dj.1;
                    let cos = dot / (di.0.hypot(di.1) * dj.0.hypot(dj.1));
                    min = min.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
                }
            }
        }
        if min.is_finite() {
            Some(min)
        } else {
            None
        }
    }

    fn direction_from(&self, v: usize, seg: usize) -> (f64, f64) {
        let s = &self.segments[seg];
        let (from, to) = if s.a == v { (s.a, s.b) } else { (s.b, s.a) };
        let p = &self.vertices[from];
        let q = &self.vertices[to];
        (q.xf() - p.xf(), q.yf() - p.yf())
    }
}


/// Uniform grid over segment bounding boxes for candidate filtering.
struct SegGrid {
    lox: f64,
    loy: f64,
    cx: f64,
    cy: f64,
    nx: usize,
    ny: usize,
    cells: HashMap<(usize, usize), Vec<usize>>,
    boxes: Vec<(f64, f64, f64, f64)>,
}

impl SegGrid {
    fn build(pslg: &Pslg) -> SegGrid {
        let boxes: Vec<(f64, f64, f64, f64)> = (0..pslg.segments.len())
            .map(|i| {
                let (a, b) = pslg.segment_points(i);
                (
                    a.xf().min(b.xf()),
                    a.yf().min(b.yf()),
                    a.xf().max(b.xf()),
                    a.yf().max(b.yf()),
                )
            })
            .collect();
        let (mut lox, mut loy, mut hix, mut hiy) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut avg = 0.0;
        for b in &boxes {
            lox = lox.min(b.0);
            loy = loy.min(b.1);
            hix = hix.max(b.2);
            hiy = hiy.max(b.3);
            avg += (b.2 - b.0).max(b.3 - b.1);
        }
        if boxes.is_empty() {
            lox = 0.0;
            loy = 0.0;
            hix = 1.0;
            hiy = 1.0;
        }
        avg = (avg / boxes.len().max(1) as f64).max(1e-12);
        let nx = (((hix - lox) / avg).ceil() as usize).clamp(1, 1024);
        let ny = (((hiy - loy) / avg).ceil() as usize).clamp(1, 1024);
        let cx = ((hix - lox) / nx as f64).max(1e-300);
        let cy = ((hiy - loy) / ny as f64).max(1e-300);
        let mut grid = SegGrid { lox, loy, cx, cy, nx, ny, cells: HashMap::new(), boxes };
        for i in 0..grid.boxes.len() {
            let (i0, i1, j0, j1) = grid.span(grid.boxes[i]);
            for ii in i0..=i1 {
                for jj in j0..=j1 {
                    grid.cells.entry((ii, jj)).or_default().push(i);
                }
            }
        }
        grid
    }

    fn span(&self, b: (f64, f64, f64, f64)) -> (usize, usize, usize, usize) {
        let i0 = (((b.0 - self.lox) / self.cx) as usize).min(self.nx - 1);
        let i1 = (((b.2 - self.lox) / self.cx) as usize).min(self.nx - 1);
        let j0 = (((b.1 - self.loy) / self.cy) as usize).min(self.ny - 1);
        let j1 = (((b.3 - self.loy) / self.cy) as usize).min(self.ny - 1);
        (i0, i1, j0, j1)
    }

    fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = std::collections::BTreeSet::new();
        for bucket in self.cells.values() {
            for (k, &i) in bucket.iter().enumerate() {
                for &j in &bucket[k + 1..] {
                    let (i, j) = (i.min(j), i.max(j));
                    let (bi, bj) = (self.boxes[i], self.boxes[j]);
                    if bi.0 <= bj.2 && bj.0 <= bi.2 && bi.1 <= bj.3 && bj.1 <= bi.3 {
                        out.insert((i, j));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    fn segments_near(&self, p: &Point) -> Vec<usize> {
        let b = (p.xf(), p.yf(), p.xf(), p.yf());
        let (i0, i1, j0, j1) = self.span(b);
        let mut out = Vec::new();
        for ii in i0..=i1 {
            for jj in j0..=j1 {
                if let Some(v) = self.cells.get(&(ii, jj)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A raw tagged segment, pre-noding.
#[derive(Clone, Debug)]
pub struct RawSegment {
    pub a: Point,
    pub b: Point,
    pub tags: Vec<SegTag>,
}

impl RawSegment {
    pub fn untagged(a: Point, b: Point) -> Self {
        RawSegment { a, b, tags: Vec::new() }
    }

    pub fn tagged(a: Point, b: Point, source: u32, mult: i64) -> Self {
        RawSegment { a, b, tags: vec![SegTag { source, mult }] }
    }
}

/// Exact noding: split raw segments at every mutual intersection and touch
/// point, merge collinear duplicates (tags accumulate), and build a valid
/// PSLG. Zero-length inputs are dropped.
pub fn node_segments(inputs: &[RawSegment]) -> Result<Pslg, TriangulateError> {
    let inputs: Vec<&RawSegment> = inputs.iter().filter(|s| s.a != s.b).collect();
    let n = inputs.len();
    // Split points per segment, as parameters along a -> b.
    let mut cuts: Vec<Vec<Rat>> = vec![Vec::new(); n];
    let boxes: Vec<(f64, f64, f64, f64)> = inputs
        .iter()
        .map(|s| {
            (
                s.a.xf().min(s.b.xf()) - 1e-9,
                s.a.yf().min(s.b.yf()) - 1e-9,
                s.a.xf().max(s.b.xf()) + 1e-9,
                s.a.yf().max(s.b.yf()) + 1e-9,
            )
        })
        .collect();
    let param = |s: &RawSegment, p: &Point| -> Rat {
        let d = s.a.to(&s.b);
        let n2 = d.norm2();
        s.a.to(p).dot(&d) / n2
    };
    for i in 0..n {
        for j in i + 1..n {
            if boxes[i].2 < boxes[j].0 || boxes[j].2 < boxes[i].0 || boxes[i].3 < boxes[j].1 || boxes[j].3 < boxes[i].1 {
                continue;
            }
            match segment_intersection(&inputs[i].a, &inputs[i].b, &inputs[j].a, &inputs[j].b) {
                SegSeg::None => {}
                SegSeg::Point(p) => {
                    cuts[i].push(param(inputs[i], &p));
                    cuts[j].push(param(inputs[j], &p));
                }
                SegSeg::Overlap(p, q) => {
                    for pt in [&p, &q] {
                        cuts[i].push(param(inputs[i], pt));
                        cuts[j].push(param(inputs[j], pt));
                    }
                }
            }
        }
    }

    let mut vertex_ids: BTreeMap<Point, usize> = BTreeMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let vid = |p: Point, vertices: &mut Vec<Point>, vertex_ids: &mut BTreeMap<Point, usize>| -> usize {
        if let Some(&id) = vertex_ids.get(&p) {
            return id;
        }
        let id = vertices.len();
        vertices.push(p.clone());
        vertex_ids.insert(p, id);
        id
    };

    // Emit sub-segments; merge duplicates by canonical vertex pair.
    let mut merged: BTreeMap<(usize, usize), Vec<SegTag>> = BTreeMap::new();
    let zero = Rat::zero();
    let one = Rat::from_integer(1.into());
    for (i, seg) in inputs.iter().enumerate() {
        let mut ts = std::mem::take(&mut cuts[i]);
        ts.push(zero.clone());
        ts.push(one.clone());
        ts.sort();
        ts.dedup();
        ts.retain(|t| t >= &zero && t <= &one);
        for w in ts.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let pa = seg.a.lerp(&seg.b, &w[0]);
            let pb = seg.a.lerp(&seg.b, &w[1]);
            let ia = vid(pa, &mut vertices, &mut vertex_ids);
            let ib = vid(pb, &mut vertices, &mut vertex_ids);
            if ia == ib {
                continue;
            }
            // Canonical direction: low vertex id to high; flip tag signs
            // when the sub-segment runs the other way.
            let (lo, hi, flip) = if ia < ib { (ia, ib, false) } else { (ib, ia, true) };
            let entry = merged.entry((lo, hi)).or_default();
            for tag in &seg.tags {
                let mult = if flip { -tag.mult } else { tag.mult };
                if let Some(t) = entry.iter_mut().find(|t| t.source == tag.source) {
                    t.mult += mult;
                } else {
                    entry.push(SegTag { source: tag.source, mult });
                }
            }
        }
    }

    let segments = merged
        .into_iter()
        .map(|((a, b), mut tags)| {
            tags.retain(|t| t.mult != 0);
            tags.sort_by_key(|t| t.source);
            PslgSegment { a, b, tags }
        })
        .collect();
    let pslg = Pslg { vertices, segments };
    pslg.validate()?;
    Ok(pslg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn crossing_segments_gain_a_vertex() {
        let pslg = node_segments(&[
            RawSegment::tagged(pt(0, 0), pt(2, 2), 0, 1),
            RawSegment::tagged(pt(0, 2), pt(2, 0), 1, 2),
        ])
        .unwrap();
        assert_eq!(pslg.vertices.len(), 5);
        assert_eq!(pslg.segments.len(), 4);
        // Multiplicity tags survive on all pieces.
        for s in &pslg.segments {
            assert_eq!(s.tags.len(), 1);
        }
    }

    #[test]
    fn collinear_overlap_merges_tags() {
        let pslg = node_segments(&[
            RawSegment::tagged(pt(0, 0), pt(4, 0), 0, 1),
            RawSegment::tagged(pt(6, 0), pt(2, 0), 1, 1),
        ])
        .unwrap();
        // Pieces: [0,2],[2,4],[4,6] along the x axis.
        assert_eq!(pslg.segments.len(), 3);
        let both: Vec<_> = pslg.segments.iter().filter(|s| s.tags.len() == 2).collect();
        assert_eq!(both.len(), 1);
        // Opposite directions: source 1 runs negatively.
        let mid = both[0];
        let t0 = mid.tags.iter().find(|t| t.source == 0).unwrap();
        let t1 = mid.tags.iter().find(|t| t.source == 1).unwrap();
        assert_eq!(t0.mult, -t1.mult);
    }

    #[test]
    fn t_junction_splits_through_segment() {
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(4, 0)),
            RawSegment::untagged(pt(2, 0), pt(2, 3)),
        ])
        .unwrap();
        assert_eq!(pslg.vertices.len(), 4);
        assert_eq!(pslg.segments.len(), 3);
        pslg.validate().unwrap();
    }

    #[test]
    fn min_input_angle() {
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(10, 0)),
            RawSegment::untagged(pt(0, 0), pt(10, 10)),
        ])
        .unwrap();
        let a = pslg.min_input_angle_deg().unwrap();
        assert!((a - 45.0).abs() < 1e-9);
    }
}
