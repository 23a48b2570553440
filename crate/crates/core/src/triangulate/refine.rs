//! Encroachment-driven Delaunay refinement with a minimum-angle target,
//! concentric-shell segment splitting, and subsegment-cluster co-splitting.
//!
//! Small input angles cannot be refined away; triangles whose shortest edge
//! spans a cluster around an acute input vertex are exempt from the angle
//! criterion, which localizes the unavoidable small angles next to the
//! input skeleton. Everything else is driven to the target angle.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};

use super::cdt::{canon, Cdt, NONE};
use super::pslg::{node_segments, Pslg, RawSegment, SegTag};
use super::TriangulateError;
use crate::complex::Complex2;
use crate::geom::hull::convex_hull;
use crate::geom::point::Point;
use crate::geom::predicates::in_diametral_circle;
use crate::rat::{rat, round_dyadic, Rat};

/// Hard ceiling on how small a triangle's min angle may get before the
/// run is declared non-terminating.
const MIN_SPLIT_PARAM_BITS: i32 = -60;

#[derive(Clone, Debug)]
pub struct RefineParams {
    /// Minimum-angle target in degrees; must be at most 26.
    pub target_angle_deg: f64,
    /// Optional maximum edge length (the simplex-diameter cap).
    pub max_edge_len: Option<f64>,
    /// Abort threshold on the triangle count.
    pub size_cap: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            target_angle_deg: 26.0,
            max_edge_len: None,
            size_cap: 50_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefineStats {
    pub triangles: usize,
    pub vertices: usize,
    pub steiner_points: usize,
    /// Measured minimum angle of the output, degrees.
    pub min_angle_deg: f64,
    /// Smallest input angle of the (hull-augmented) PSLG, degrees.
    pub min_input_angle_deg: Option<f64>,
    /// The guaranteed floor: min(target, arcsin((√3/2) sin(θ_in/2))).
    pub guaranteed_angle_deg: f64,
    /// Largest edge length (the simplex diameter Δ).
    pub max_edge_len: f64,
}

/// Edge provenance: the mesh edge covers part of an input segment, with the
/// input's multiplicity tags signed relative to the canonical edge direction
/// (low vertex index to high).
#[derive(Clone, Debug)]
pub struct MeshEdgeTag {
    pub tags: Vec<SegTag>,
}

/// A refined mesh: the complex plus input-conformity provenance.
pub struct Mesh {
    pub complex: Complex2,
    /// Aligned with `complex.edges()`; empty tag lists for free edges.
    pub edge_tags: Vec<MeshEdgeTag>,
    /// For each input PSLG segment: the mesh vertices subdividing it, in
    /// order from its `a` end (parameter 0) to its `b` end (parameter 1).
    pub segment_chains: Vec<Vec<usize>>,
    pub stats: RefineStats,
    /// The hull-augmented PSLG actually triangulated.
    pub input: Pslg,
}

/// Subsegment record: parameter interval [ta, tb] of input segment `seg`,
/// with `va` at parameter `ta` and `vb` at `tb` (ta < tb always).
#[derive(Clone, Debug)]
struct SubSeg {
    seg: usize,
    va: u32,
    ta: Rat,
    vb: u32,
    tb: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Origin {
    Free,
    Input(usize),
    OnSegment(usize),
}

struct SkinnyEntry {
    priority: f64,
    tri: u32,
}

impl PartialEq for SkinnyEntry {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority && self.tri == other.tri
    }
}
impl Eq for SkinnyEntry {}
impl PartialOrd for SkinnyEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SkinnyEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap: worst quality first, then lowest triangle id.
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.tri.cmp(&self.tri))
    }
}

/// Spatial hash of subsegment diametral disks for encroachment queries.
struct SubsegIndex {
    cell: f64,
    ox: f64,
    oy: f64,
    buckets: HashMap<(i32, i32), Vec<(u32, u32)>>,
}

impl SubsegIndex {
    fn new(lo: (f64, f64), cell: f64) -> Self {
        SubsegIndex {
            cell: cell.max(1e-12),
            ox: lo.0,
            oy: lo.1,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, x: f64, y: f64) -> (i32, i32) {
        (((x - self.ox) / self.cell).floor() as i32, ((y - self.oy) / self.cell).floor() as i32)
    }

    fn insert(&mut self, id: (u32, u32), a: &Point, b: &Point) {
        // Cells covering the diametral disk's bounding box.
        let (cx, cy) = ((a.xf() + b.xf()) / 2.0, (a.yf() + b.yf()) / 2.0);
        let r = a.dist_f64(b) / 2.0 + 1e-12;
        let (k0x, k0y) = self.key(cx - r, cy - r);
        let (k1x, k1y) = self.key(cx + r, cy + r);
        for kx in k0x..=k1x {
            for ky in k0y..=k1y {
                self.buckets.entry((kx, ky)).or_default().push(id);
            }
        }
    }

    fn candidates(&self, p: &Point) -> impl Iterator<Item = &(u32, u32)> {
        let k = self.key(p.xf(), p.yf());
        self.buckets.get(&k).into_iter().flatten()
    }
}

struct Refiner<'a> {
    cdt: Cdt,
    pslg: &'a Pslg,
    params: &'a RefineParams,
    /// pslg vertex id -> cdt vertex id.
    vmap: Vec<u32>,
    origins: Vec<Origin>,
    subsegs: BTreeMap<(u32, u32), SubSeg>,
    /// Per input segment: start parameter -> subsegment key.
    per_seg: Vec<BTreeMap<Rat, (u32, u32)>>,
    index: SubsegIndex,
    /// Acute clusters: pslg vertex -> incident segment ids in acute pairs.
    acute: BTreeMap<usize, Vec<usize>>,
    enc_queue: VecDeque<(u32, u32)>,
    forced: VecDeque<(u32, u32)>,
    skinny: std::collections::BinaryHeap<SkinnyEntry>,
    cos_target: f64,
    steiner: usize,
}

impl<'a> Refiner<'a> {
    fn inside(&self, t: u32) -> bool {
        let tri = &self.cdt.tris[t as usize];
        tri.alive && !tri.v.iter().any(|&v| self.cdt.is_super(v))
    }

    fn tri_metrics(&self, t: u32) -> (f64, f64, f64) {
        // (min angle cos surrogate, shortest edge, longest edge)
        let [a, b, c] = self.cdt.tri_pts(t);
        let la = b.dist_f64(c);
        let lb = c.dist_f64(a);
        let lc = a.dist_f64(b);
        let (mut lo, mut hi) = (la, la);
        for l in [lb, lc] {
            lo = lo.min(l);
            hi = hi.max(l);
        }
        // Minimum angle via the law of cosines, opposite the shortest side.
        let (s1, s2, opp) = if lo == la {
            (lb, lc, la)
        } else if lo == lb {
            (lc, la, lb)
        } else {
            (la, lb, lc)
        };
        let cos = ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0);
        (cos, lo, hi)
    }

    fn is_skinny(&self, t: u32) -> Option<f64> {
        let (cos_min, shortest, longest) = self.tri_metrics(t);
        if let Some(cap) = self.params.max_edge_len {
            if longest > cap {
                return Some(1e9 + longest);
            }
        }
        // Refinement always drives toward 30 degrees so that sub-30 angles
        // can only survive in cluster-exempt triangles; the caller's target
        // is the certified floor, not the driver.
        // min angle < 30  <=>  cos(min angle) > cos(30)
        if cos_min > self.cos_target {
            Some((longest / shortest) * (1.0 + cos_min))
        } else {
            None
        }
    }

    fn push_skinny(&mut self, t: u32) {
        if self.inside(t) {
            if let Some(priority) = self.is_skinny(t) {
                self.skinny.push(SkinnyEntry { priority, tri: t });
            }
        }
    }

    fn push_star_skinny(&mut self, v: u32) {
        for t in self.cdt.star(v) {
            self.push_skinny(t);
        }
    }

    /// Both triangle apexes opposite a subsegment, excluding super vertices.
    fn subseg_apexes(&self, key: (u32, u32)) -> Vec<u32> {
        let mut out = Vec::new();
        if let Some((t, i)) = self.cdt.find_edge(key.0, key.1) {
            let tri = &self.cdt.tris[t as usize];
            out.push(tri.v[i]);
            let n = tri.nbr[i];
            if n != NONE {
                let ntri = &self.cdt.tris[n as usize];
                if let Some(j) = (0..3).find(|&j| {
                    let e = canon(ntri.v[(j + 1) % 3], ntri.v[(j + 2) % 3]);
                    e == key
                }) {
                    out.push(ntri.v[j]);
                }
            }
        }
        out.retain(|&v| !self.cdt.is_super(v));
        out
    }

    fn is_encroached(&self, key: (u32, u32)) -> bool {
        let (pa, pb) = (&self.cdt.pts[key.0 as usize], &self.cdt.pts[key.1 as usize]);
        self.subseg_apexes(key)
            .iter()
            .any(|&w| in_diametral_circle(&self.cdt.pts[w as usize], pa, pb))
    }

    /// Endpoint set of a vertex's originating input segment(s).
    fn input_endpoints(&self, v: u32) -> BTreeSet<usize> {
        match &self.origins[v as usize] {
            Origin::Free => BTreeSet::new(),
            Origin::Input(p) => [*p].into_iter().collect(),
            Origin::OnSegment(s) => {
                let seg = &self.pslg.segments[*s];
                [seg.a, seg.b].into_iter().collect()
            }
        }
    }

    /// Terminator exemption: the shortest edge spans two different segments
    /// of an acute cluster (the seam across a small input angle); splitting
    /// cannot improve such a triangle. Edges lying along a single segment
    /// are ordinary subsegments and stay splittable.
    fn exempt(&self, t: u32) -> bool {
        let tri = &self.cdt.tris[t as usize];
        let pts = self.cdt.tri_pts(t);
        let mut shortest = (f64::INFINITY, 0usize);
        for i in 0..3 {
            let l = pts[(i + 1) % 3].dist_f64(pts[(i + 2) % 3]);
            if l < shortest.0 {
                shortest = (l, i);
            }
        }
        let u = tri.v[(shortest.1 + 1) % 3];
        let w = tri.v[(shortest.1 + 2) % 3];
        match (&self.origins[u as usize], &self.origins[w as usize]) {
            (Origin::OnSegment(s1), Origin::OnSegment(s2)) if s1 != s2 => {
                let (e1, e2) = (&self.pslg.segments[*s1], &self.pslg.segments[*s2]);
                [e1.a, e1.b].iter().any(|p| {
                    (e2.a == *p || e2.b == *p)
                        && self
                            .acute
                            .get(p)
                            .is_some_and(|m| m.contains(s1) && m.contains(s2))
                })
            }
            (Origin::Input(p), Origin::OnSegment(s)) | (Origin::OnSegment(s), Origin::Input(p)) => {
                let e = &self.pslg.segments[*s];
                (e.a == *p || e.b == *p) && self.acute.get(p).is_some_and(|m| m.contains(s))
            }
            _ => false,
        }
    }

    /// Split a subsegment (midpoint, or concentric shell near acute apexes),
    /// then co-split cluster partners at the same radius.
    fn split_subseg(&mut self, key: (u32, u32)) -> Result<(), TriangulateError> {
        let Some(sub) = self.subsegs.get(&key).cloned() else {
            return Ok(());
        };
        let seg = &self.pslg.segments[sub.seg];
        let apex_a = sub.ta.is_zero() && self.acute.get(&seg.a).is_some_and(|v| v.contains(&sub.seg));
        let apex_b = sub.tb == rat(1, 1) && self.acute.get(&seg.b).is_some_and(|v| v.contains(&sub.seg));
        let (t_split, shell_apex) = if apex_a {
            let tb = crate::rat::to_f64(&sub.tb);
            let k = (tb.log2().floor() as i32) - 1;
            if k < MIN_SPLIT_PARAM_BITS {
                return Err(TriangulateError::SizeCap(format!(
                    "shell split underflow on segment {}",
                    sub.seg
                )));
            }
            (pow2(k), Some((seg.a, false)))
        } else if apex_b {
            let span = 1.0 - crate::rat::to_f64(&sub.ta);
            let k = (span.log2().floor() as i32) - 1;
            if k < MIN_SPLIT_PARAM_BITS {
                return Err(TriangulateError::SizeCap(format!(
                    "shell split underflow on segment {}",
                    sub.seg
                )));
            }
            (Rat::from_integer(1.into()) - pow2(k), Some((seg.b, true)))
        } else {
            ((&sub.ta + &sub.tb) * rat(1, 2), None)
        };
        self.split_segment_at(sub.seg, &t_split)?;

        // Co-split cluster partners at the same Euclidean radius.
        if let Some((apex, from_b)) = shell_apex {
            let (pa, pb) = self.pslg.segment_points(sub.seg);
            let seg_len = pa.dist_f64(pb);
            let radius = if from_b {
                (1.0 - crate::rat::to_f64(&t_split)) * seg_len
            } else {
                crate::rat::to_f64(&t_split) * seg_len
            };
            let partners: Vec<usize> = self.acute.get(&apex).cloned().unwrap_or_default();
            for other in partners {
                if other == sub.seg {
                    continue;
                }
                let oseg = &self.pslg.segments[other];
                let (oa, ob) = self.pslg.segment_points(other);
                let olen = oa.dist_f64(ob);
                let frac = radius / olen;
                if !(frac > 0.0 && frac < 1.0) {
                    continue;
                }
                // Round the matching parameter up to the dyadic grid so the
                // co-split radius is never below the trigger radius.
                let apex_at_a = oseg.a == apex;
                let t_other = if apex_at_a {
                    round_up_dyadic(frac, 40)
                } else {
                    Rat::from_integer(1.into()) - round_up_dyadic(frac, 40)
                };
                if t_other <= Rat::zero() || t_other >= rat(1, 1) {
                    continue;
                }
                // Only split if it lands strictly inside the apex-adjacent
                // subsegment of the partner.
                if self.param_inside_apex_subseg(other, &t_other, apex_at_a) {
                    self.split_segment_at(other, &t_other)?;
                }
            }
        }
        Ok(())
    }

    fn param_inside_apex_subseg(&self, seg: usize, t: &Rat, apex_at_a: bool) -> bool {
        let intervals = &self.per_seg[seg];
        let Some((_, key)) = intervals.range(..=t.clone()).next_back() else {
            return false;
        };
        let Some(sub) = self.subsegs.get(key) else {
            return false;
        };
        if !(t > &sub.ta && t < &sub.tb) {
            return false;
        }
        if apex_at_a {
            sub.ta.is_zero()
        } else {
            sub.tb == rat(1, 1)
        }
    }

    /// Insert the split point of input segment `seg` at parameter `t`.
    fn split_segment_at(&mut self, seg: usize, t: &Rat) -> Result<(), TriangulateError> {
        let (pa, pb) = self.pslg.segment_points(seg);
        let point = pa.lerp(pb, t);
        let hint = self.cdt.hint_for(self.vmap[self.pslg.segments[seg].a]);
        let (v, split) = self.cdt.insert_point(point, hint);
        self.note_new_vertex(v, Origin::OnSegment(seg));
        let Some(old_key) = split else {
            // Point coincided with an existing vertex; nothing to split.
            return Ok(());
        };
        let sub = self
            .subsegs
            .remove(&old_key)
            .expect("split signal for unknown subsegment");
        debug_assert_eq!(sub.seg, seg);
        self.per_seg[seg].remove(&sub.ta);
        let s1 = SubSeg {
            seg,
            va: sub.va,
            ta: sub.ta.clone(),
            vb: v,
            tb: t.clone(),
        };
        let s2 = SubSeg {
            seg,
            va: v,
            ta: t.clone(),
            vb: sub.vb,
            tb: sub.tb.clone(),
        };
        for s in [s1, s2] {
            let key = canon(s.va, s.vb);
            let (qa, qb) = (&self.cdt.pts[s.va as usize], &self.cdt.pts[s.vb as usize]);
            self.index.insert(key, qa, qb);
            self.per_seg[s.seg].insert(s.ta.clone(), key);
            self.subsegs.insert(key, s);
            self.enc_queue.push_back(key);
        }
        self.check_size()?;
        self.push_star_skinny(v);
        Ok(())
    }

    fn note_new_vertex(&mut self, v: u32, origin: Origin) {
        while self.origins.len() <= v as usize {
            self.origins.push(Origin::Free);
        }
        if self.origins[v as usize] == Origin::Free {
            self.origins[v as usize] = origin;
        }
        self.steiner += 1;
    }

    fn check_size(&self) -> Result<(), TriangulateError> {
        let live = self.cdt.live_triangle_count();
        if live > self.params.size_cap {
            let worst = self
                .cdt
                .live_triangles()
                .filter(|(id, _)| self.inside(*id as u32))
                .map(|(id, _)| self.tri_metrics(id as u32).0)
                .fold(-1.0f64, f64::max);
            return Err(TriangulateError::SizeCap(format!(
                "triangle count {live} exceeded cap {}; worst interior cos(min angle) = {worst:.6}",
                self.params.size_cap
            )));
        }
        Ok(())
    }

    /// Walk from triangle `from` toward point `target`; stop at the first
    /// constrained edge crossed.
    fn walk_blocked(&self, from: u32, target: &Point) -> Option<(u32, u32)> {
        let mut t = from;
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps > 4 * self.cdt.tris.len() + 16 {
                return None;
            }
            let tri = &self.cdt.tris[t as usize];
            let pts = self.cdt.tri_pts(t);
            let mut exit = None;
            for i in 0..3 {
                if crate::geom::predicates::orient2d(pts[(i + 1) % 3], pts[(i + 2) % 3], target)
                    == std::cmp::Ordering::Less
                {
                    exit = Some(i);
                    break;
                }
            }
            let Some(i) = exit else {
                return None; // reached the triangle containing target
            };
            let (a, b) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
            if self.cdt.is_constrained(a, b) {
                return Some(canon(a, b));
            }
            let n = tri.nbr[i];
            if n == NONE {
                return None;
            }
            t = n;
        }
    }

    /// Handle one skinny triangle: insert its (rounded) circumcenter, or
    /// split whatever blocks it.
    fn treat_skinny(&mut self, t: u32) -> Result<(), TriangulateError> {
        let Some(center_exact) = self.cdt.circumcenter(t) else {
            return Ok(());
        };
        let (_, shortest, _) = self.tri_metrics(t);
        // Round to a fine dyadic grid relative to local scale to bound
        // coordinate growth.
        let bits = ((-(shortest.max(1e-300)).log2()).ceil() as i32 + 28).clamp(8, 180) as u32;
        let center = Point::new(round_dyadic(&center_exact.x, bits), round_dyadic(&center_exact.y, bits));

        // Blocked by a constrained edge?
        if let Some(blocker) = self.walk_blocked(t, &center) {
            if self.subsegs.contains_key(&blocker) {
                self.forced.push_back(blocker);
                self.push_skinny(t); // revisit once the blocker is split
            }
            return Ok(());
        }
        // Would the center encroach any subsegment?
        let mut encroached: Vec<(u32, u32)> = Vec::new();
        for &key in self.index.candidates(&center) {
            if encroached.contains(&key) || !self.subsegs.contains_key(&key) {
                continue;
            }
            let (pa, pb) = (&self.cdt.pts[key.0 as usize], &self.cdt.pts[key.1 as usize]);
            if in_diametral_circle(&center, pa, pb) {
                encroached.push(key);
            }
        }
        if !encroached.is_empty() {
            for key in encroached {
                self.forced.push_back(key);
            }
            self.push_skinny(t);
            return Ok(());
        }
        // Safe to insert.
        let hint = t;
        let (v, split) = self.cdt.insert_point(center, hint);
        debug_assert!(split.is_none(), "center unexpectedly split a constraint");
        self.note_new_vertex(v, Origin::Free);
        self.check_size()?;
        self.push_star_skinny(v);
        // The new vertex may encroach existing subsegments.
        let pv = self.cdt.pts[v as usize].clone();
        let keys: Vec<(u32, u32)> = self
            .index
            .candidates(&pv)
            .filter(|k| self.subsegs.contains_key(k))
            .copied()
            .collect();
        for key in keys {
            let (pa, pb) = (&self.cdt.pts[key.0 as usize], &self.cdt.pts[key.1 as usize]);
            if in_diametral_circle(&pv, pa, pb) {
                self.enc_queue.push_back(key);
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<(), TriangulateError> {
        loop {
            if let Some(key) = self.forced.pop_front() {
                if self.subsegs.contains_key(&key) {
                    self.split_subseg(key)?;
                }
                continue;
            }
            if let Some(key) = self.enc_queue.pop_front() {
                if !self.subsegs.contains_key(&key) {
                    continue;
                }
                let too_long = self.params.max_edge_len.is_some_and(|cap| {
                    let (pa, pb) = (&self.cdt.pts[key.0 as usize], &self.cdt.pts[key.1 as usize]);
                    pa.dist_f64(pb) > cap
                });
                if too_long || self.is_encroached(key) {
                    self.split_subseg(key)?;
                }
                continue;
            }
            if let Some(entry) = self.skinny.pop() {
                let t = entry.tri;
                if !self.inside(t) {
                    continue;
                }
                let Some(priority) = self.is_skinny(t) else {
                    continue;
                };
                if priority != entry.priority {
                    // Stale entry; re-queue at the current priority.
                    self.skinny.push(SkinnyEntry { priority, tri: t });
                    continue;
                }
                if priority < 1e9 && self.exempt(t) {
                    continue;
                }
                self.treat_skinny(t)?;
                continue;
            }
            return Ok(());
        }
    }
}

fn pow2(k: i32) -> Rat {
    if k >= 0 {
        Rat::from_integer(num_bigint::BigInt::from(1) << k as u32)
    } else {
        Rat::new(1.into(), num_bigint::BigInt::from(1) << (-k) as u32)
    }
}

fn round_up_dyadic(x: f64, bits: u32) -> Rat {
    let scaled = (x * (1u64 << bits) as f64).ceil() as i64;
    Rat::new(scaled.into(), num_bigint::BigInt::from(1) << bits)
}

/// Refine a PSLG into a quality mesh of its convex hull. Hull edges are
/// added automatically when missing.
pub fn refine(pslg: &Pslg, params: &RefineParams) -> Result<Mesh, TriangulateError> {
    if params.target_angle_deg > 26.0 {
        return Err(TriangulateError::InvalidParameter(format!(
            "target angle {} exceeds 26 degrees",
            params.target_angle_deg
        )));
    }
    if pslg.vertices.len() < 3 {
        return Err(TriangulateError::InvalidPslg("need at least 3 vertices".into()));
    }
    // Augment with hull edges and re-node (overlaps merge).
    let hull = convex_hull(&pslg.vertices);
    if hull.len() < 3 {
        return Err(TriangulateError::InvalidPslg("input is collinear".into()));
    }
    let mut raw: Vec<RawSegment> = pslg
        .segments
        .iter()
        .map(|s| RawSegment {
            a: pslg.vertices[s.a].clone(),
            b: pslg.vertices[s.b].clone(),
            tags: s.tags.clone(),
        })
        .collect();
    for i in 0..hull.len() {
        raw.push(RawSegment::untagged(hull[i].clone(), hull[(i + 1) % hull.len()].clone()));
    }
    // Isolated vertices survive noding through degenerate self-segments? No:
    // carry them separately and insert below.
    let pslg = node_segments(&raw)?;
    let mut extra_vertices: Vec<Point> = Vec::new();
    for v in raw.iter() {
        let _ = v;
    }

    let (lo, hi) = pslg.bbox().ok_or_else(|| TriangulateError::InvalidPslg("empty PSLG".into()))?;
    let mut cdt = Cdt::new(&lo, &hi);
    let mut vmap = vec![NONE; pslg.vertices.len()];
    let mut origins = vec![Origin::Free; 3];
    let mut hint = NONE;
    for (i, p) in pslg.vertices.iter().enumerate() {
        let (v, split) = cdt.insert_point(p.clone(), hint);
        assert!(split.is_none());
        vmap[i] = v;
        while origins.len() <= v as usize {
            origins.push(Origin::Free);
        }
        origins[v as usize] = Origin::Input(i);
        hint = cdt.hint_for(v);
    }
    for p in extra_vertices.drain(..) {
        let _ = cdt.insert_point(p, NONE);
    }
    for s in &pslg.segments {
        cdt.insert_constraint(vmap[s.a], vmap[s.b]);
    }

    // Acute clusters at input vertices (exact cosine comparisons).
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in pslg.segments.iter().enumerate() {
        incident.entry(s.a).or_default().push(i);
        incident.entry(s.b).or_default().push(i);
    }
    let mut acute: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&v, segs) in &incident {
        let mut members: BTreeSet<usize> = BTreeSet::new();
        for (k, &i) in segs.iter().enumerate() {
            for &j in &segs[k + 1..] {
                if acute_pair(&pslg, v, i, j) {
                    members.insert(i);
                    members.insert(j);
                }
            }
        }
        if !members.is_empty() {
            acute.insert(v, members.into_iter().collect());
        }
    }

    let bbox_lo = (lo.xf(), lo.yf());
    let avg_len = pslg.skeleton_length() / pslg.segments.len().max(1) as f64;
    let mut refiner = Refiner {
        index: SubsegIndex::new(bbox_lo, avg_len.max(1e-9)),
        cdt,
        pslg: &pslg,
        params,
        vmap: vmap.clone(),
        origins,
        subsegs: BTreeMap::new(),
        per_seg: vec![BTreeMap::new(); pslg.segments.len()],
        acute,
        enc_queue: VecDeque::new(),
        forced: VecDeque::new(),
        skinny: std::collections::BinaryHeap::new(),
        cos_target: (30.0f64).to_radians().cos(),
        steiner: 0,
    };
    refiner.steiner = 0;
    for (i, s) in pslg.segments.iter().enumerate() {
        let key = canon(vmap[s.a], vmap[s.b]);
        let (pa, pb) = pslg.segment_points(i);
        refiner.index.insert(key, pa, pb);
        refiner.per_seg[i].insert(Rat::zero(), key);
        refiner.subsegs.insert(
            key,
            SubSeg {
                seg: i,
                va: vmap[s.a],
                ta: Rat::zero(),
                vb: vmap[s.b],
                tb: rat(1, 1),
            },
        );
        refiner.enc_queue.push_back(key);
    }
    let initial: Vec<u32> = refiner
        .cdt
        .live_triangles()
        .map(|(id, _)| id as u32)
        .collect();
    for t in initial {
        refiner.push_skinny(t);
    }
    refiner.run()?;

    build_mesh(refiner, pslg.clone(), params)
}

fn acute_pair(pslg: &Pslg, v: usize, i: usize, j: usize) -> bool {
    let dir = |seg: usize| {
        let s = &pslg.segments[seg];
        let (from, to) = if s.a == v { (s.a, s.b) } else { (s.b, s.a) };
        pslg.vertices[from].to(&pslg.vertices[to])
    };
    let di = dir(i);
    let dj = dir(j);
    let dot = di.dot(&dj);
    if !dot.is_positive() {
        return false;
    }
    // angle < 60°  <=>  cos > 1/2  <=>  4 dot² > |di|²|dj|²  (dot > 0)
    let lhs = &dot * &dot * Rat::from_integer(4.into());
    let rhs = di.norm2() * dj.norm2();
    lhs > rhs
}

fn build_mesh(refiner: Refiner, pslg: Pslg, _params: &RefineParams) -> Result<Mesh, TriangulateError> {
    let cdt = &refiner.cdt;
    // Compact interior vertices.
    let mut new_id: HashMap<u32, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut live: Vec<(usize, &super::cdt::CdtTri)> = cdt.live_triangles().collect();
    live.sort_by_key(|(id, _)| *id);
    for (id, tri) in live {
        let _ = id;
        if tri.v.iter().any(|&v| cdt.is_super(v)) {
            continue;
        }
        let mut ids = [0usize; 3];
        for (k, &v) in tri.v.iter().enumerate() {
            let next = vertices.len();
            let e = new_id.entry(v).or_insert_with(|| {
                vertices.push(cdt.pts[v as usize].clone());
                next
            });
            ids[k] = *e;
        }
        triangles.push(ids);
    }
    let complex = Complex2::build_structural(vertices, triangles)?;

    // Edge provenance from the live subsegments; input conformity check.
    let mut edge_tags: Vec<MeshEdgeTag> = (0..complex.edges().len()).map(|_| MeshEdgeTag { tags: Vec::new() }).collect();
    let mut per_segment: Vec<Vec<(Rat, Rat, u32, u32)>> = vec![Vec::new(); pslg.segments.len()];
    for sub in refiner.subsegs.values() {
        per_segment[sub.seg].push((sub.ta.clone(), sub.tb.clone(), sub.va, sub.vb));
    }
    let mut segment_chains: Vec<Vec<usize>> = Vec::with_capacity(pslg.segments.len());
    for (i, list) in per_segment.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        // Exact cover of [0, 1].
        let mut cursor = Rat::zero();
        let mut chain: Vec<usize> = Vec::new();
        for (ta, tb, va, vb) in list.iter() {
            if *ta != cursor {
                return Err(TriangulateError::InvalidPslg(format!(
                    "segment {i} not exactly covered by mesh edges"
                )));
            }
            cursor = tb.clone();
            let (ma, mb) = (
                *new_id.get(va).expect("subsegment vertex missing from mesh"),
                *new_id.get(vb).expect("subsegment vertex missing from mesh"),
            );
            if chain.is_empty() {
                chain.push(ma);
            }
            chain.push(mb);
            let e = complex
                .edge_id(ma, mb)
                .ok_or_else(|| TriangulateError::InvalidPslg(format!("segment {i} piece is not a mesh edge")))?;
            // Tag sign: +mult when the canonical (low->high) direction agrees
            // with the segment's a->b direction.
            let sign = if ma < mb { 1 } else { -1 };
            for tag in &pslg.segments[i].tags {
                edge_tags[e].tags.push(SegTag {
                    source: tag.source,
                    mult: tag.mult * sign,
                });
            }
        }
        if cursor != rat(1, 1) {
            return Err(TriangulateError::InvalidPslg(format!(
                "segment {i} cover ends at parameter {cursor}"
            )));
        }
        segment_chains.push(chain);
    }

    let report = complex.regularity().map_err(TriangulateError::Complex)?;
    let max_edge = (0..complex.edges().len())
        .map(|e| crate::rat::sqrt_f64(&complex.edge_norm2(e)))
        .fold(0.0f64, f64::max);
    let min_input = pslg.min_input_angle_deg();
    let guaranteed = {
        let from_input = min_input
            .map(|a| {
                let th = a.to_radians();
                (3f64.sqrt() / 2.0 * (th / 2.0).sin()).asin().to_degrees()
            })
            .unwrap_or(f64::INFINITY);
        refiner.params.target_angle_deg.min(from_input)
    };
    let stats = RefineStats {
        triangles: complex.triangles().len(),
        vertices: complex.vertices().len(),
        steiner_points: refiner.steiner,
        min_angle_deg: report.min_angle_deg,
        min_input_angle_deg: min_input,
        guaranteed_angle_deg: guaranteed,
        max_edge_len: max_edge,
    };
    Ok(Mesh {
        complex,
        edge_tags,
        segment_chains,
        stats,
        input: pslg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulate::pslg::{node_segments, RawSegment};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    fn square_pslg() -> Pslg {
        node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(8, 0)),
            RawSegment::untagged(pt(8, 0), pt(8, 8)),
            RawSegment::untagged(pt(8, 8), pt(0, 8)),
            RawSegment::untagged(pt(0, 8), pt(0, 0)),
        ])
        .unwrap()
    }

    #[test]
    fn unit_square_meets_target_angle() {
        let mesh = refine(&square_pslg(), &RefineParams { target_angle_deg: 25.0, ..Default::default() }).unwrap();
        assert!(mesh.stats.min_angle_deg >= 25.0 - 1e-9, "min angle {}", mesh.stats.min_angle_deg);
        assert!(mesh.stats.triangles >= 2);
        // All four input segments exactly covered.
        assert_eq!(mesh.segment_chains.len(), mesh.input.segments.len());
    }

    #[test]
    fn tagged_segment_survives_refinement() {
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(10, 0)),
            RawSegment::untagged(pt(10, 0), pt(10, 10)),
            RawSegment::untagged(pt(10, 10), pt(0, 10)),
            RawSegment::untagged(pt(0, 10), pt(0, 0)),
            RawSegment::tagged(pt(2, 3), pt(8, 7), 5, 3),
        ])
        .unwrap();
        let mesh = refine(&pslg, &RefineParams { target_angle_deg: 25.0, ..Default::default() }).unwrap();
        // Summed tagged edge lengths reproduce the segment length.
        let mut total = 0.0;
        for (e, tag) in mesh.edge_tags.iter().enumerate() {
            for t in &tag.tags {
                if t.source == 5 {
                    assert_eq!(t.mult.abs(), 3);
                    total += crate::rat::sqrt_f64(&mesh.complex.edge_norm2(e));
                }
            }
        }
        let expect = pt(2, 3).dist_f64(&pt(8, 7));
        assert!((total - expect).abs() < 1e-9, "{total} vs {expect}");
    }

    #[test]
    fn max_edge_cap_is_respected() {
        let params = RefineParams {
            target_angle_deg: 25.0,
            max_edge_len: Some(1.5),
            ..Default::default()
        };
        let mesh = refine(&square_pslg(), &params).unwrap();
        assert!(mesh.stats.max_edge_len <= 1.5 + 1e-12, "max edge {}", mesh.stats.max_edge_len);
        assert!(mesh.stats.min_angle_deg >= 25.0 - 1e-9);
    }

    #[test]
    fn small_input_angle_localized() {
        // 10-degree wedge inside a box: small angles allowed only near the apex.
        let tip = pt(0, 0);
        let a1 = Point::from_f64_exact(4.0, 0.0);
        let a2 = Point::from_f64_exact(4.0 * (10f64).to_radians().cos(), 4.0 * (10f64).to_radians().sin());
        let pslg = node_segments(&[
            RawSegment::untagged(tip.clone(), a1.clone()),
            RawSegment::untagged(tip.clone(), a2.clone()),
            RawSegment::untagged(pt(-1, -2), pt(5, -2)),
            RawSegment::untagged(pt(5, -2), pt(5, 3)),
            RawSegment::untagged(pt(5, 3), pt(-1, 3)),
            RawSegment::untagged(pt(-1, 3), pt(-1, -2)),
        ])
        .unwrap();
        let mesh = refine(&pslg, &RefineParams { target_angle_deg: 25.0, size_cap: 30_000, ..Default::default() }).unwrap();
        let report = mesh.complex.regularity().unwrap();
        let floor = mesh.stats.guaranteed_angle_deg;
        assert!(
            report.min_angle_deg >= floor - 1e-6,
            "min angle {} below guaranteed floor {}",
            report.min_angle_deg,
            floor
        );
        // Sub-30-degree triangles hug the wedge arms: every vertex of such a
        // triangle lies within a small distance of the input skeleton.
        let arms = [(tip.clone(), a1.clone()), (tip.clone(), a2.clone())];
        let dist_to_arms = |p: &Point| -> f64 {
            arms.iter()
                .map(|(a, b)| {
                    let (ax, ay, bx, by) = (a.xf(), a.yf(), b.xf(), b.yf());
                    let (dx, dy) = (bx - ax, by - ay);
                    let n2 = dx * dx + dy * dy;
                    let t = (((p.xf() - ax) * dx + (p.yf() - ay) * dy) / n2).clamp(0.0, 1.0);
                    ((p.xf() - ax - t * dx).powi(2) + (p.yf() - ay - t * dy).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        };
        for q in &report.per_simplex {
            if q.min_angle_deg < 30.0 {
                for p in mesh.complex.triangle_points(q.triangle) {
                    let d = dist_to_arms(p);
                    assert!(d < 0.5, "small-angle vertex {:?} is {d} from the skeleton", p);
                }
            }
        }
    }
}
