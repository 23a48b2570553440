//! Simplicial 2-complexes in the plane, chains, and boundary matrices.
//!
//! Orientation canon: edges run from lower to higher vertex index; triangles
//! are counterclockwise by signed area. Boundary matrices are derived from
//! these canons, so a complex determines its matrices uniquely.

pub mod regularity;
pub mod tu;

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::geom::current::{PLCurrent, Segment};
use crate::geom::point::Point;
use crate::geom::predicates::{on_segment_interior, orient2d_exact};
use crate::rat::{to_f64, Rat};

pub use regularity::{angle_regularity_bound, RegularityReport, SimplexQuality};
pub use tu::{tu_verify, TuVerdict};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("embedding violations:\n{}", .0.join("\n"))]
    Embedding(Vec<String>),
    #[error("degenerate simplex: {0}")]
    Degenerate(String),
    #[error("chain error: {0}")]
    Chain(String),
}

/// Sparse signed incidence matrix; rows index (k-1)-simplices, columns
/// k-simplices, entries in {-1, 0, +1}.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Nonzeros of each column, sorted by row.
    pub col_entries: Vec<Vec<(usize, i8)>>,
}

impl BoundaryMatrix {
    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.col_entries[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, s)| *s)
            .unwrap_or(0)
    }

    /// Dense i64 copy, for the brute-force checkers.
    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for (c, entries) in self.col_entries.iter().enumerate() {
            for &(r, s) in entries {
                m[r][c] = s as i64;
            }
        }
        m
    }
}

/// A sparse chain over the simplices of one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    pub dim: u8,
    pub coeffs: BTreeMap<usize, Rat>,
}

impl Chain {
    pub fn zero(dim: u8) -> Self {
        Chain { dim, coeffs: BTreeMap::new() }
    }

    pub fn from_integers(dim: u8, entries: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, c) in entries {
            if c != 0 {
                coeffs.insert(i, Rat::from_integer(c.into()));
            }
        }
        Chain { dim, coeffs }
    }

    pub fn set(&mut self, index: usize, value: Rat) {
        if value.is_zero() {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, value);
        }
    }

    pub fn get(&self, index: usize) -> Rat {
        self.coeffs.get(&index).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_assign(&mut self, index: usize, value: &Rat) {
        let v = self.get(index) + value;
        self.set(index, v);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// All coefficients integral?
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn scaled(&self, k: &Rat) -> Chain {
        if k.is_zero() {
            return Chain::zero(self.dim);
        }
        Chain {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.dim, other.dim, "chain dimensions differ");
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_assign(*i, c);
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scaled(&Rat::from_integer((-1).into())))
    }
}

/// A validated simplicial 2-complex embedded in the plane.
#[derive(Clone, Debug)]
pub struct Complex2 {
    vertices: Vec<Point>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    edge_index: HashMap<(usize, usize), usize>,
    boundary1: BoundaryMatrix,
    boundary2: BoundaryMatrix,
    /// Triangles incident to each edge, with the sign of the edge in the
    /// triangle's boundary.
    edge_triangles: Vec<Vec<(usize, i8)>>,
}

impl Complex2 {
    /// Build and fully validate a complex: structural checks plus the
    /// geometric embedding checks (no improper intersections, no
    /// vertex-in-edge junctions, no overlapping triangles).
    pub fn build(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, ComplexError> {
        let c = Self::assemble(vertices, triangles)?;
        let violations = c.embedding_violations();
        if !violations.is_empty() {
            return Err(ComplexError::Embedding(violations));
        }
        Ok(c)
    }

    /// Build with structural validation only. For meshes produced by the
    /// refinement pipeline, whose embedding is valid by construction.
    pub fn build_structural(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, ComplexError> {
        Self::assemble(vertices, triangles)
    }

    fn assemble(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, ComplexError> {
        for (i, p) in vertices.iter().enumerate() {
            for (j, q) in vertices.iter().enumerate().skip(i + 1) {
                if p == q {
                    return Err(ComplexError::Invalid(format!("duplicate vertices {i} and {j} at {p:?}")));
                }
            }
        }
        let mut tris: Vec<[usize; 3]> = Vec::with_capacity(triangles.len());
        let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            if a >= vertices.len() || b >= vertices.len() || c >= vertices.len() {
                return Err(ComplexError::Invalid(format!("triangle {t} references a missing vertex")));
            }
            if a == b || b == c || a == c {
                return Err(ComplexError::Invalid(format!("triangle {t} repeats a vertex")));
            }
            let area2 = orient2d_exact(&vertices[a], &vertices[b], &vertices[c]);
            if area2.is_zero() {
                return Err(ComplexError::Degenerate(format!("triangle {t} has zero area")));
            }
            // Normalize to CCW.
            let ccw = if area2.is_positive() { [a, b, c] } else { [a, c, b] };
            let mut key = ccw;
            key.sort_unstable();
            if let Some(prev) = seen.insert(key, t) {
                return Err(ComplexError::Invalid(format!("triangles {prev} and {t} are duplicates")));
            }
            tris.push(ccw);
        }

        // Derive edges in deterministic order: sorted canonical vertex pairs.
        let mut edge_set: Vec<(usize, usize)> = tris
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edge_set.sort_unstable();
        edge_set.dedup();
        let edges: Vec<[usize; 2]> = edge_set.iter().map(|&(a, b)| [a, b]).collect();
        let edge_index: HashMap<(usize, usize), usize> = edge_set.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        // Boundary of a triangle: its three traversal edges, signed against
        // the canonical edge direction.
        let mut col_entries2 = Vec::with_capacity(tris.len());
        let mut edge_triangles = vec![Vec::new(); edges.len()];
        for (t, tri) in tris.iter().enumerate() {
            let mut col: Vec<(usize, i8)> = (0..3)
                .map(|k| {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    let id = edge_index[&(a.min(b), a.max(b))];
                    let sign = if a < b { 1 } else { -1 };
                    (id, sign)
                })
                .collect();
            col.sort_unstable_by_key(|(r, _)| *r);
            for &(e, s) in &col {
                edge_triangles[e].push((t, s));
            }
            col_entries2.push(col);
        }
        let boundary2 = BoundaryMatrix {
            rows: edges.len(),
            cols: tris.len(),
            col_entries: col_entries2,
        };
        let boundary1 = BoundaryMatrix {
            rows: vertices.len(),
            cols: edges.len(),
            col_entries: edges.iter().map(|&[a, b]| vec![(a, -1i8), (b, 1i8)]).collect(),
        };
        Ok(Complex2 {
            vertices,
            edges,
            triangles: tris,
            edge_index,
            boundary1,
            boundary2,
            edge_triangles,
        })
    }

    /// Geometric embedding audit; empty means valid.
    pub fn embedding_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        // Edge pairs may share at most a common endpoint.
        let boxes: Vec<(f64, f64, f64, f64)> = self
            .edges
            .iter()
            .map(|&[a, b]| seg_bbox(&self.vertices[a], &self.vertices[b]))
            .collect();
        let candidates = bbox_pairs(&boxes);
        for (i, j) in candidates {
            let [a1, b1] = self.edges[i];
            let [a2, b2] = self.edges[j];
            use crate::geom::predicates::{segment_intersection, SegSeg};
            match segment_intersection(&self.vertices[a1], &self.vertices[b1], &self.vertices[a2], &self.vertices[b2]) {
                SegSeg::None => {}
                SegSeg::Point(p) => {
                    let shared = [a1, b1].iter().any(|v| [a2, b2].contains(v) && self.vertices[*v] == p);
                    if !shared {
                        out.push(format!("edges {i} and {j} intersect improperly at {p:?}"));
                    }
                }
                SegSeg::Overlap(p, q) => {
                    out.push(format!("edges {i} and {j} overlap between {p:?} and {q:?}"));
                }
            }
        }
        // No vertex interior to an edge.
        for (v, p) in self.vertices.iter().enumerate() {
            for (e, &[a, b]) in self.edges.iter().enumerate() {
                if v != a && v != b && on_segment_interior(p, &self.vertices[a], &self.vertices[b]) {
                    out.push(format!("vertex {v} lies in the interior of edge {e}"));
                }
            }
        }
        // Triangle interiors are disjoint: with proper edges this reduces to
        // containment, caught by a positive intersection area.
        let tboxes: Vec<(f64, f64, f64, f64)> = self.triangles.iter().map(|t| self.tri_bbox(t)).collect();
        for (i, j) in bbox_pairs(&tboxes) {
            let ti: Vec<Point> = self.triangles[i].iter().map(|&v| self.vertices[v].clone()).collect();
            let tj: Vec<Point> = self.triangles[j].iter().map(|&v| self.vertices[v].clone()).collect();
            if self.triangles[i].iter().filter(|v| self.triangles[j].contains(v)).count() == 3 {
                continue;
            }
            let a = crate::geom::clip::clipped_signed_area(&ti, &tj);
            if !a.is_zero() {
                out.push(format!("triangles {i} and {j} have overlapping interiors"));
            }
        }
        out
    }

    fn tri_bbox(&self, t: &[usize; 3]) -> (f64, f64, f64, f64) {
        let ps: Vec<&Point> = t.iter().map(|&v| &self.vertices[v]).collect();
        let xs: Vec<f64> = ps.iter().map(|p| p.xf()).collect();
        let ys: Vec<f64> = ps.iter().map(|p| p.yf()).collect();
        (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Triangles incident to an edge, with boundary signs.
    pub fn triangles_of_edge(&self, e: usize) -> &[(usize, i8)] {
        &self.edge_triangles[e]
    }

    pub fn triangle_points(&self, t: usize) -> [&Point; 3] {
        let [a, b, c] = self.triangles[t];
        [&self.vertices[a], &self.vertices[b], &self.vertices[c]]
    }

    pub fn edge_points(&self, e: usize) -> [&Point; 2] {
        let [a, b] = self.edges[e];
        [&self.vertices[a], &self.vertices[b]]
    }

    /// Exact squared length of an edge.
    pub fn edge_norm2(&self, e: usize) -> Rat {
        let [a, b] = self.edges[e];
        self.vertices[a].dist2(&self.vertices[b])
    }

    /// Exact unsigned area of a triangle.
    pub fn triangle_area(&self, t: usize) -> Rat {
        let [a, b, c] = self.triangles[t];
        orient2d_exact(&self.vertices[a], &self.vertices[b], &self.vertices[c]).abs() / Rat::from_integer(2.into())
    }

    /// The signed incidence matrix for dimension k (1 or 2).
    pub fn boundary_matrix(&self, k: u8) -> &BoundaryMatrix {
        match k {
            1 => &self.boundary1,
            2 => &self.boundary2,
            _ => panic!("boundary matrix only defined for k in {{1, 2}}"),
        }
    }

    /// Boundary of a chain via the appropriate matrix.
    pub fn apply_boundary(&self, chain: &Chain) -> Chain {
        assert!(chain.dim >= 1, "0-chains have no boundary");
        let matrix = self.boundary_matrix(chain.dim);
        let mut out = Chain::zero(chain.dim - 1);
        for (&col, coef) in &chain.coeffs {
            for &(row, sign) in &matrix.col_entries[col] {
                let delta = coef * Rat::from_integer(sign.into());
                out.add_assign(row, &delta);
            }
        }
        out
    }

    /// Mass of a chain: coefficient-weighted simplex measure
    /// (counting measure for vertices, length for edges, area for triangles).
    pub fn chain_mass(&self, chain: &Chain) -> f64 {
        match chain.dim {
            0 => chain.coeffs.values().map(|c| to_f64(c).abs()).sum(),
            1 => chain
                .coeffs
                .iter()
                .map(|(&e, c)| to_f64(c).abs() * crate::rat::sqrt_f64(&self.edge_norm2(e)))
                .sum(),
            2 => chain
                .coeffs
                .iter()
                .map(|(&t, c)| to_f64(c).abs() * to_f64(&self.triangle_area(t)))
                .sum(),
            _ => unreachable!(),
        }
    }

    /// Convert an integral 1-chain to the PL current it represents.
    pub fn chain_to_curve(&self, chain: &Chain) -> Result<PLCurrent, ComplexError> {
        if chain.dim != 1 {
            return Err(ComplexError::Chain(format!("expected a 1-chain, got dimension {}", chain.dim)));
        }
        if !chain.is_integral() {
            return Err(ComplexError::Chain("chain has non-integral coefficients".into()));
        }
        let mut segs = Vec::new();
        for (&e, c) in &chain.coeffs {
            let [a, b] = self.edges[e];
            let mult = to_f64(c).round() as i64;
            segs.push(Segment::new(self.vertices[a].clone(), self.vertices[b].clone(), mult));
        }
        PLCurrent::new(segs).map_err(|e| ComplexError::Chain(e.to_string()))
    }

    /// Express a mesh-conforming PL current exactly as a 1-chain. Every
    /// segment must be a union of mesh edges (up to fragmentation); errors
    /// otherwise.
    pub fn curve_to_chain(&self, current: &PLCurrent) -> Result<Chain, ComplexError> {
        let canon = current.canonicalized();
        let mut vertex_of: HashMap<&Point, usize> = HashMap::new();
        for (i, p) in self.vertices.iter().enumerate() {
            vertex_of.insert(p, i);
        }
        // Index vertices along each segment support to walk edge runs.
        let mut chain = Chain::zero(1);
        for seg in &canon.segments {
            // Collect mesh vertices on the segment, sorted by parameter.
            let dir = seg.a.to(&seg.b);
            let mut stops: Vec<(Rat, usize)> = Vec::new();
            for (i, p) in self.vertices.iter().enumerate() {
                if crate::geom::predicates::on_segment(p, &seg.a, &seg.b) {
                    stops.push((seg.a.to(p).dot(&dir), i));
                }
            }
            stops.sort_by(|a, b| a.0.cmp(&b.0));
            if stops.len() < 2
                || self.vertices[stops[0].1] != seg.a
                || self.vertices[stops.last().unwrap().1] != seg.b
            {
                return Err(ComplexError::Chain(format!(
                    "segment {:?} -> {:?} does not start and end at mesh vertices",
                    seg.a, seg.b
                )));
            }
            for w in stops.windows(2) {
                let (u, v) = (w[0].1, w[1].1);
                let e = self.edge_id(u, v).ok_or_else(|| {
                    ComplexError::Chain(format!("segment piece {u}-{v} is not a mesh edge"))
                })?;
                // Canonical edge direction is low index -> high index.
                let sign = if u < v { 1 } else { -1 };
                chain.add_assign(e, &Rat::from_integer((sign * seg.mult).into()));
            }
        }
        Ok(chain)
    }

    pub fn regularity(&self) -> Result<RegularityReport, ComplexError> {
        regularity::regularity(self)
    }
}

fn seg_bbox(a: &Point, b: &Point) -> (f64, f64, f64, f64) {
    (
        a.xf().min(b.xf()),
        a.yf().min(b.yf()),
        a.xf().max(b.xf()),
        a.yf().max(b.yf()),
    )
}

/// Candidate overlapping pairs from f64 bounding boxes, via a uniform grid.
fn bbox_pairs(boxes: &[(f64, f64, f64, f64)]) -> Vec<(usize, usize)> {
    if boxes.len() < 2 {
        return Vec::new();
    }
    let (mut lox, mut loy, mut hix, mut hiy) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut avg = 0.0;
    for b in boxes {
        lox = lox.min(b.0);
        loy = loy.min(b.1);
        hix = hix.max(b.2);
        hiy = hiy.max(b.3);
        avg += (b.2 - b.0).max(b.3 - b.1);
    }
    avg /= boxes.len() as f64;
    let cell = (avg * 2.0).max(1e-12);
    let nx = (((hix - lox) / cell).ceil() as usize).clamp(1, 2048);
    let ny = (((hiy - loy) / cell).ceil() as usize).clamp(1, 2048);
    let cx = (hix - lox).max(1e-300) / nx as f64;
    let cy = (hiy - loy).max(1e-300) / ny as f64;
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let span = |b: &(f64, f64, f64, f64)| {
        let i0 = (((b.0 - lox) / cx) as usize).min(nx - 1);
        let i1 = (((b.2 - lox) / cx) as usize).min(nx - 1);
        let j0 = (((b.1 - loy) / cy) as usize).min(ny - 1);
        let j1 = (((b.3 - loy) / cy) as usize).min(ny - 1);
        (i0, i1, j0, j1)
    };
    for (idx, b) in boxes.iter().enumerate() {
        let (i0, i1, j0, j1) = span(b);
        for i in i0..=i1 {
            for j in j0..=j1 {
                grid.entry((i, j)).or_default().push(idx);
            }
        }
    }
    let mut pairs = std::collections::BTreeSet::new();
    for bucket in grid.values() {
        for (a, &i) in bucket.iter().enumerate() {
            for &j in &bucket[a + 1..] {
                let (i, j) = (i.min(j), i.max(j));
                let (bi, bj) = (&boxes[i], &boxes[j]);
                if bi.0 <= bj.2 && bj.0 <= bi.2 && bi.1 <= bj.3 && bj.1 <= bi.3 {
                    pairs.insert((i, j));
                }
            }
        }
    }
    pairs.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    fn single_triangle() -> Complex2 {
        Complex2::build(vec![pt(0, 0), pt(1, 0), pt(0, 1)], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn single_triangle_counts() {
        let k = single_triangle();
        assert_eq!(k.edges().len(), 3);
        let b2 = k.boundary_matrix(2);
        assert_eq!((b2.rows, b2.cols), (3, 1));
        assert_eq!(b2.col_entries[0].len(), 3);
        for &(_, s) in &b2.col_entries[0] {
            assert!(s == 1 || s == -1);
        }
    }

    #[test]
    fn d1_after_d2_is_zero() {
        let k = Complex2::build(
            vec![pt(0, 0), pt(2, 0), pt(1, 2), pt(3, 2)],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        for t in 0..k.triangles().len() {
            let chain = Chain::from_integers(2, [(t, 1)]);
            let dd = k.apply_boundary(&k.apply_boundary(&chain));
            assert!(dd.is_zero());
        }
    }

    #[test]
    fn adjacent_triangles_cancel_shared_edge() {
        let k = Complex2::build(
            vec![pt(0, 0), pt(2, 0), pt(1, 2), pt(3, 2)],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let both = Chain::from_integers(2, [(0, 1), (1, 1)]);
        let b = k.apply_boundary(&both);
        // Shared edge (1,2) must vanish from the sum.
        let shared = k.edge_id(1, 2).unwrap();
        assert!(b.get(shared).is_zero());
        assert_eq!(b.coeffs.len(), 4);
    }

    #[test]
    fn t_junction_rejected() {
        // Second triangle's vertex 3 lies in the interior of edge (0,1).
        let r = Complex2::build(
            vec![pt(0, 0), pt(4, 0), pt(2, 3), pt(2, 0), pt(3, -2), pt(1, -2)],
            vec![[0, 1, 2], [5, 4, 3]],
        );
        match r {
            Err(ComplexError::Embedding(v)) => assert!(!v.is_empty()),
            other => panic!("expected embedding error, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_triangles_rejected() {
        let r = Complex2::build(
            vec![pt(0, 0), pt(4, 0), pt(2, 3), pt(1, 1), pt(3, 1), pt(2, 2)],
            vec![[0, 1, 2], [3, 4, 5]],
        );
        assert!(matches!(r, Err(ComplexError::Embedding(_))));
    }

    #[test]
    fn duplicate_triangle_rejected() {
        let r = Complex2::build(vec![pt(0, 0), pt(1, 0), pt(0, 1)], vec![[0, 1, 2], [1, 2, 0]]);
        assert!(matches!(r, Err(ComplexError::Invalid(_))));
    }

    #[test]
    fn chain_mass_examples() {
        let k = single_triangle();
        assert_eq!(k.chain_mass(&Chain::zero(2)), 0.0);
        let t = Chain::from_integers(2, [(0, 2)]);
        assert!((k.chain_mass(&t) - 1.0).abs() < 1e-15); // area 1/2, coefficient 2
    }

    #[test]
    fn chain_mass_absolutely_homogeneous() {
        let k = single_triangle();
        let mut c = Chain::zero(1);
        c.set(0, rat(3, 2));
        c.set(2, rat_i(-2));
        let m1 = k.chain_mass(&c);
        let m3 = k.chain_mass(&c.scaled(&rat_i(-3)));
        assert!((m3 - 3.0 * m1).abs() < 1e-12 * m1.abs().max(1.0));
    }

    #[test]
    fn chain_curve_roundtrip_mass_exact() {
        let k = Complex2::build(
            vec![pt(0, 0), pt(2, 0), pt(1, 2), pt(3, 2)],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let chain = Chain::from_integers(1, [(0, 2), (3, -1)]);
        let curve = k.chain_to_curve(&chain).unwrap();
        let mass_chain = k.chain_mass(&chain);
        let mass_curve = curve.mass();
        assert_eq!(mass_chain, mass_curve, "masses must agree bit for bit");
        let back = k.curve_to_chain(&curve).unwrap();
        assert_eq!(back, chain);
    }

    #[test]
    fn conforming_curve_to_chain_splits_runs() {
        // One long segment covering two collinear edges.
        let k = Complex2::build(
            vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(1, 1)],
            vec![[0, 1, 3], [1, 2, 3]],
        )
        .unwrap();
        let cur = PLCurrent::polyline(&[pt(0, 0), pt(2, 0)], 3).unwrap();
        let chain = k.curve_to_chain(&cur).unwrap();
        assert_eq!(chain.get(k.edge_id(0, 1).unwrap()), rat_i(3));
        assert_eq!(chain.get(k.edge_id(1, 2).unwrap()), rat_i(3));
        // Non-conforming segment errors.
        let bad = PLCurrent::polyline(&[pt(0, 0), pt(2, 1)], 1).unwrap();
        assert!(k.curve_to_chain(&bad).is_err());
    }
}
