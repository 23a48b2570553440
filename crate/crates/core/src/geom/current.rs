//! Piecewise-linear 1- and 2-currents with integer multiplicities.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::point::{Point, Vec2};
use super::predicates::{orient2d_exact, segment_intersection, SegSeg};
use super::GeomError;
use crate::rat::{rat, sqrt_f64, to_f64, Rat};

/// One oriented segment with a nonzero integer multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub mult: i64,
}

impl Segment {
    pub fn new(a: Point, b: Point, mult: i64) -> Self {
        Segment { a, b, mult }
    }

    pub fn length_f64(&self) -> f64 {
        self.a.dist_f64(&self.b)
    }
}

/// A piecewise-linear 1-current: a finite sum of oriented segments with
/// integer multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PLCurrent {
    pub segments: Vec<Segment>,
}

impl PLCurrent {
    pub fn new(segments: Vec<Segment>) -> Result<Self, GeomError> {
        for s in &segments {
            if s.mult == 0 {
                return Err(GeomError::InvalidCurrent(format!("zero multiplicity on {:?}->{:?}", s.a, s.b)));
            }
            if s.a == s.b {
                return Err(GeomError::InvalidCurrent(format!("zero-length segment at {:?}", s.a)));
            }
        }
        Ok(PLCurrent { segments })
    }

    pub fn empty() -> Self {
        PLCurrent { segments: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Polyline through the given points (unit multiplicity).
    pub fn polyline(points: &[Point], mult: i64) -> Result<Self, GeomError> {
        let segs = points
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| Segment::new(w[0].clone(), w[1].clone(), mult))
            .collect();
        PLCurrent::new(segs)
    }

    /// Current negation (orientation reversal by sign).
    pub fn neg(&self) -> PLCurrent {
        self.scale_mult(-1)
    }

    pub fn scale_mult(&self, k: i64) -> PLCurrent {
        if k == 0 {
            return PLCurrent::empty();
        }
        PLCurrent {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.a.clone(), s.b.clone(), s.mult * k))
                .collect(),
        }
    }

    /// Formal sum of currents.
    pub fn add(&self, other: &PLCurrent) -> PLCurrent {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        PLCurrent { segments }
    }

    pub fn sub(&self, other: &PLCurrent) -> PLCurrent {
        self.add(&other.neg())
    }

    /// Mass of the canonicalized current (multiplicity-weighted length).
    pub fn mass(&self) -> f64 {
        self.canonicalized()
            .segments
            .iter()
            .map(|s| s.mult.unsigned_abs() as f64 * s.length_f64())
            .sum()
    }

    /// Net signed multiplicity per endpoint: the 0-current boundary.
    /// A segment a -> b contributes -mult at a and +mult at b.
    pub fn boundary(&self) -> BTreeMap<Point, i64> {
        let mut out: BTreeMap<Point, i64> = BTreeMap::new();
        for s in &self.segments {
            *out.entry(s.a.clone()).or_insert(0) -= s.mult;
            *out.entry(s.b.clone()).or_insert(0) += s.mult;
        }
        out.retain(|_, m| *m != 0);
        out
    }

    /// Scale coordinates about the origin by a positive factor.
    /// Mass scales linearly.
    pub fn dilate(&self, factor: &Rat) -> Result<PLCurrent, GeomError> {
        if !factor.is_positive() {
            return Err(GeomError::NonPositiveFactor(factor.to_string()));
        }
        Ok(PLCurrent {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.a.scale(factor), s.b.scale(factor), s.mult))
                .collect(),
        })
    }

    /// Canonical form: overlapping collinear pieces are fragmented at all
    /// endpoints and summed, zero pieces dropped, and adjacent equal-mult
    /// collinear fragments merged. Segments are oriented from the
    /// lexicographically smaller endpoint and sorted.
    pub fn canonicalized(&self) -> PLCurrent {
        let mut by_line: HashMap<LineKey, Vec<&Segment>> = HashMap::new();
        for s in &self.segments {
            by_line.entry(LineKey::through(&s.a, &s.b)).or_default().push(s);
        }
        let mut keys: Vec<&LineKey> = by_line.keys().collect();
        keys.sort();
        let mut out = Vec::new();
        for key in keys {
            canonicalize_line(&by_line[key], &mut out);
        }
        PLCurrent { segments: out }
    }

    pub fn bbox(&self) -> Option<(Point, Point)> {
        let mut pts = self.segments.iter().flat_map(|s| [&s.a, &s.b]);
        let first = pts.next()?.clone();
        let (mut lox, mut loy, mut hix, mut hiy) = (first.x.clone(), first.y.clone(), first.x, first.y);
        for p in pts {
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
}

/// Canonical key for the line through two distinct rational points:
/// integer triple (A, B, C) with Ax + By = C, gcd 1, leading sign positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct LineKey {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl LineKey {
    fn through(p: &Point, q: &Point) -> LineKey {
        let dx = &q.x - &p.x;
        let dy = &q.y - &p.y;
        // Normal (dy, -dx); constant = normal . p
        let a = dy;
        let b = -dx;
        let c = &a * &p.x + &b * &p.y;
        // Clear denominators.
        let lcm = a.denom().lcm(b.denom()).lcm(c.denom());
        let ai = (&a * Rat::from_integer(lcm.clone())).to_integer();
        let bi = (&b * Rat::from_integer(lcm.clone())).to_integer();
        let ci = (&c * Rat::from_integer(lcm)).to_integer();
        let g = ai.gcd(&bi).gcd(&ci);
        let (mut ai, mut bi, mut ci) = if g.is_zero() { (ai, bi, ci) } else { (&ai / &g, &bi / &g, &ci / &g) };
        let flip = if !ai.is_zero() { ai.is_negative() } else { bi.is_negative() };
        if flip {
            ai = -ai;
            bi = -bi;
            ci = -ci;
        }
        LineKey { a: ai, b: bi, c: ci }
    }
}

fn canonicalize_line(segs: &[&Segment], out: &mut Vec<Segment>) {
    // Canonical direction: from lexicographically smaller to larger points.
    // For the line with normal (A, B) that direction is (-B, A) or its
    // negation; pick the one with positive x (or zero x, positive y).
    let s0 = segs[0];
    let mut dir = Vec2::new(&s0.b.x - &s0.a.x, &s0.b.y - &s0.a.y);
    if dir.x.is_negative() || (dir.x.is_zero() && dir.y.is_negative()) {
        dir = dir.neg();
    }
    // Parameter of a point along the canonical direction.
    let param = |p: &Point| -> Rat { &p.x * &dir.x + &p.y * &dir.y };
    let mut events: BTreeMap<Rat, Point> = BTreeMap::new();
    for s in segs {
        events.insert(param(&s.a), s.a.clone());
        events.insert(param(&s.b), s.b.clone());
    }
    let params: Vec<Rat> = events.keys().cloned().collect();
    let index: HashMap<&Rat, usize> = params.iter().enumerate().map(|(i, t)| (t, i)).collect();
    // Multiplicity per elementary interval, via a difference array.
    let mut diff = vec![0i64; params.len()];
    for s in segs {
        let (ta, tb) = (param(&s.a), param(&s.b));
        let (lo, hi, m) = if ta < tb { (ta, tb, s.mult) } else { (tb, ta, -s.mult) };
        diff[index[&lo]] += m;
        diff[index[&hi]] -= m;
    }
    let mut run_start: Option<usize> = None;
    let mut cur = 0i64;
    for i in 0..params.len() {
        let prev = cur;
        cur += diff[i];
        if cur != prev {
            if let Some(s) = run_start.take() {
                if prev != 0 {
                    out.push(Segment::new(events[&params[s]].clone(), events[&params[i]].clone(), prev));
                }
            }
            if cur != 0 {
                run_start = Some(i);
            }
        }
    }
    debug_assert_eq!(cur, 0, "interval multiplicities must telescope to zero");
}

/// A piecewise-linear 2-current: simple polygons with integer multiplicities.
/// The polygon's traversal orientation is part of the datum; the represented
/// current is `mult` times the signed region swept by the traversal.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PLRegion {
    pub polygons: Vec<(Vec<Point>, i64)>,
}

impl PLRegion {
    pub fn new(polygons: Vec<(Vec<Point>, i64)>) -> Result<Self, GeomError> {
        for (poly, mult) in &polygons {
            if *mult == 0 {
                return Err(GeomError::InvalidRegion("zero multiplicity polygon".into()));
            }
            validate_simple_polygon(poly)?;
        }
        Ok(PLRegion { polygons })
    }

    pub fn empty() -> Self {
        PLRegion { polygons: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn neg(&self) -> PLRegion {
        PLRegion {
            polygons: self.polygons.iter().map(|(p, m)| (p.clone(), -m)).collect(),
        }
    }

    pub fn add(&self, other: &PLRegion) -> PLRegion {
        let mut polygons = self.polygons.clone();
        polygons.extend(other.polygons.iter().cloned());
        PLRegion { polygons }
    }

    pub fn sub(&self, other: &PLRegion) -> PLRegion {
        self.add(&other.neg())
    }

    /// Mass: multiplicity-weighted unsigned area, polygon by polygon.
    pub fn mass(&self) -> f64 {
        self.polygons
            .iter()
            .map(|(poly, m)| m.unsigned_abs() as f64 * to_f64(&polygon_signed_area(poly)).abs())
            .sum()
    }

    /// Oriented boundary: each polygon's traversal edges with the region's
    /// multiplicity, canonicalized (shared edges of adjacent polygons cancel).
    pub fn boundary(&self) -> PLCurrent {
        let mut segs = Vec::new();
        for (poly, mult) in &self.polygons {
            let n = poly.len();
            for i in 0..n {
                let a = poly[i].clone();
                let b = poly[(i + 1) % n].clone();
                if a != b {
                    segs.push(Segment::new(a, b, *mult));
                }
            }
        }
        PLCurrent { segments: segs }.canonicalized()
    }

    /// Scale coordinates about the origin; mass scales quadratically.
    pub fn dilate(&self, factor: &Rat) -> Result<PLRegion, GeomError> {
        if !factor.is_positive() {
            return Err(GeomError::NonPositiveFactor(factor.to_string()));
        }
        Ok(PLRegion {
            polygons: self
                .polygons
                .iter()
                .map(|(poly, m)| (poly.iter().map(|p| p.scale(factor)).collect(), *m))
                .collect(),
        })
    }
}

/// Exact signed area of a polygon (positive for CCW traversal).
pub fn polygon_signed_area(poly: &[Point]) -> Rat {
    let n = poly.len();
    let mut twice = Rat::zero();
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        twice += &p.x * &q.y - &q.x * &p.y;
    }
    twice * rat(1, 2)
}

fn validate_simple_polygon(poly: &[Point]) -> Result<(), GeomError> {
    if poly.len() < 3 {
        return Err(GeomError::InvalidRegion(format!("polygon needs >= 3 vertices, got {}", poly.len())));
    }
    let n = poly.len();
    for i in 0..n {
        if poly[i] == poly[(i + 1) % n] {
            return Err(GeomError::InvalidRegion(format!("repeated vertex {:?}", poly[i])));
        }
    }
    if polygon_signed_area(poly).is_zero() {
        return Err(GeomError::InvalidRegion("degenerate polygon (zero area)".into()));
    }
    for i in 0..n {
        let (a1, b1) = (&poly[i], &poly[(i + 1) % n]);
        for j in i + 1..n {
            let (a2, b2) = (&poly[j], &poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            match segment_intersection(a1, b1, a2, b2) {
                SegSeg::None => {}
                SegSeg::Point(p) => {
                    if !adjacent {
                        return Err(GeomError::InvalidRegion(format!("self-intersection at {p:?}")));
                    }
                    // Adjacent edges may only meet at their shared vertex.
                    let shared = if j == i + 1 { b1 } else { a1 };
                    if &p != shared {
                        return Err(GeomError::InvalidRegion(format!("adjacent edges overlap near {p:?}")));
                    }
                }
                SegSeg::Overlap(p, _) => {
                    return Err(GeomError::InvalidRegion(format!("collinear edge overlap near {p:?}")));
                }
            }
        }
    }
    Ok(())
}

/// Exact winding number of `p` with respect to the closed polygon, by summed
/// signed crossings. `p` must not lie on the boundary.
pub fn winding_number(p: &Point, poly: &[Point]) -> i64 {
    let n = poly.len();
    let mut w = 0i64;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        let upward = a.y <= p.y && b.y > p.y;
        let downward = b.y <= p.y && a.y > p.y;
        if upward || downward {
            let side = orient2d_exact(a, b, p);
            if upward && side.is_positive() {
                w += 1;
            } else if downward && side.is_negative() {
                w -= 1;
            }
        }
    }
    w
}

/// Multiplicity-weighted length as an f64, shared by chain and current mass
/// computations so the two agree bit for bit.
pub fn weighted_length(norm2: &Rat, mult_abs: u64) -> f64 {
    mult_abs as f64 * sqrt_f64(norm2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_i;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn boundary_single_segment() {
        let c = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(1, 0), 1)]).unwrap();
        let b = c.boundary();
        assert_eq!(b.get(&pt(0, 0)), Some(&-1));
        assert_eq!(b.get(&pt(1, 0)), Some(&1));
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn boundary_closed_loop_empty() {
        let c = PLCurrent::polyline(&[pt(0, 0), pt(1, 0), pt(0, 1), pt(0, 0)], 1).unwrap();
        assert!(c.boundary().is_empty());
    }

    #[test]
    fn boundary_two_chained_segments() {
        let c = PLCurrent::new(vec![
            Segment::new(pt(0, 0), pt(1, 0), 2),
            Segment::new(pt(1, 0), pt(2, 1), 2),
        ])
        .unwrap();
        let b = c.boundary();
        assert_eq!(b.get(&pt(0, 0)), Some(&-2));
        assert_eq!(b.get(&pt(2, 1)), Some(&2));
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn canonicalize_cancels_opposites() {
        let c = PLCurrent::new(vec![
            Segment::new(pt(0, 0), pt(2, 0), 1),
            Segment::new(pt(2, 0), pt(0, 0), 1),
        ])
        .unwrap();
        assert!(c.canonicalized().is_empty());
        assert_eq!(c.mass(), 0.0);
    }

    #[test]
    fn canonicalize_merges_and_fragments() {
        // [0,2] mult 1 plus [1,3] mult 1 -> [0,1] m1, [1,2] m2, [2,3] m1.
        let c = PLCurrent::new(vec![
            Segment::new(pt(0, 0), pt(2, 0), 1),
            Segment::new(pt(1, 0), pt(3, 0), 1),
        ])
        .unwrap();
        let canon = c.canonicalized();
        assert_eq!(canon.segments.len(), 3);
        assert_eq!(canon.mass(), 4.0);
        // Adjacent equal multiplicities merge back.
        let c2 = PLCurrent::new(vec![
            Segment::new(pt(0, 0), pt(1, 0), 3),
            Segment::new(pt(1, 0), pt(2, 0), 3),
        ])
        .unwrap();
        let canon2 = c2.canonicalized();
        assert_eq!(canon2.segments, vec![Segment::new(pt(0, 0), pt(2, 0), 3)]);
    }

    #[test]
    fn dilate_scales_mass() {
        let c = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(1, 0), 1)]).unwrap();
        assert_eq!(c.dilate(&rat_i(2)).unwrap().mass(), 2.0);
        assert!(c.dilate(&rat_i(0)).is_err());
        let sq = PLRegion::new(vec![(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)], 1)]).unwrap();
        assert_eq!(sq.dilate(&rat_i(3)).unwrap().mass(), 9.0);
    }

    #[test]
    fn square_boundary() {
        let sq = PLRegion::new(vec![(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)], 1)]).unwrap();
        let b = sq.boundary();
        assert_eq!(b.segments.len(), 4);
        assert_eq!(b.mass(), 4.0);
        assert!(b.boundary().is_empty());
        // Multiplicity -2 reverses and doubles.
        let sq2 = PLRegion::new(vec![(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)], -2)]).unwrap();
        assert_eq!(sq2.boundary().mass(), 8.0);
        assert_eq!(sq2.mass(), 2.0);
    }

    #[test]
    fn adjacent_squares_shared_edge_cancels() {
        let r = PLRegion::new(vec![
            (vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)], 1),
            (vec![pt(1, 0), pt(2, 0), pt(2, 1), pt(1, 1)], 1),
        ])
        .unwrap();
        let b = r.boundary();
        // Perimeter of the 2x1 rectangle: mass 6, shared edge gone.
        assert_eq!(b.mass(), 6.0);
        for s in &b.segments {
            assert!(!(s.a.x == rat_i(1) && s.b.x == rat_i(1)));
        }
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let bow = PLRegion::new(vec![(vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)], 1)]);
        assert!(bow.is_err());
    }

    #[test]
    fn winding_numbers() {
        let sq = vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 2)];
        assert_eq!(winding_number(&pt(1, 1), &sq), 1);
        assert_eq!(winding_number(&pt(3, 1), &sq), 0);
        let sq_cw: Vec<Point> = sq.iter().rev().cloned().collect();
        assert_eq!(winding_number(&pt(1, 1), &sq_cw), -1);
    }
}
