//! Incremental constrained Delaunay triangulation over exact rational points.
//!
//! Lawson insertion (split + recursive legalization) inside a large bounding
//! triangle; constraint segments are enforced by corridor retriangulation and
//! are never flipped. All predicates are exact.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::geom::point::Point;
use crate::geom::predicates::{incircle, orient2d};
use crate::rat::{rat, Rat};

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CdtTri {
    /// Vertices, counterclockwise.
    pub v: [u32; 3],
    /// `nbr[i]` is across the edge opposite `v[i]`.
    pub nbr: [u32; 3],
    pub alive: bool,
}

/// Where a point sits in the triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loc {
    OnVertex(u32),
    /// Triangle and the index (0..3) of the vertex opposite the edge.
    OnEdge(u32, usize),
    Inside(u32),
}

pub struct Cdt {
    pub pts: Vec<Point>,
    pub tris: Vec<CdtTri>,
    live_count: usize,
    /// Constrained undirected edges by canonical (low, high) vertex pair.
    pub constrained: HashSet<(u32, u32)>,
    /// A live triangle touching each vertex, as a locate hint.
    vert_tri: Vec<u32>,
    /// The three synthetic bounding vertices.
    pub super_verts: [u32; 3],
}

pub fn canon(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl Cdt {
    /// Start from a bounding triangle that comfortably contains the box.
    pub fn new(lo: &Point, hi: &Point) -> Cdt {
        let one = rat(1, 1);
        let w0 = &hi.x - &lo.x;
        let w1 = &hi.y - &lo.y;
        let w = if w0 > w1 { w0 } else { w1 };
        let w = if w > one { w } else { one };
        let big = &w * rat(4096, 1);
        let cx = (&lo.x + &hi.x) * rat(1, 2);
        let cy = (&lo.y + &hi.y) * rat(1, 2);
        let p0 = Point::new(&cx - &big, &cy - &big);
        let p1 = Point::new(&cx + &big, &cy - &big);
        let p2 = Point::new(cx.clone(), &cy + &big + &big);
        let pts = vec![p0, p1, p2];
        let tris = vec![CdtTri { v: [0, 1, 2], nbr: [NONE, NONE, NONE], alive: true }];
        Cdt {
            pts,
            tris,
            live_count: 1,
            constrained: Default::default(),
            vert_tri: vec![0, 0, 0],
            super_verts: [0, 1, 2],
        }
    }

    pub fn is_super(&self, v: u32) -> bool {
        self.super_verts.contains(&v)
    }

    fn kill(&mut self, t: u32) {
        if self.tris[t as usize].alive {
            self.tris[t as usize].alive = false;
            self.live_count -= 1;
        }
    }

    pub fn live_triangle_count(&self) -> usize {
        self.live_count
    }

    pub fn is_constrained(&self, a: u32, b: u32) -> bool {
        self.constrained.contains(&canon(a, b))
    }

    pub fn live_triangles(&self) -> impl Iterator<Item = (usize, &CdtTri)> {
        self.tris.iter().enumerate().filter(|(_, t)| t.alive)
    }

    pub fn tri_pts(&self, t: u32) -> [&Point; 3] {
        let tri = &self.tris[t as usize];
        [
            &self.pts[tri.v[0] as usize],
            &self.pts[tri.v[1] as usize],
            &self.pts[tri.v[2] as usize],
        ]
    }

    fn index_of(&self, t: u32, v: u32) -> usize {
        let tri = &self.tris[t as usize];
        (0..3).find(|&i| tri.v[i] == v).expect("vertex not in triangle")
    }

    fn replace_nbr(&mut self, t: u32, old: u32, new: u32) {
        if t == NONE {
            return;
        }
        let tri = &mut self.tris[t as usize];
        let i = (0..3).find(|&i| tri.nbr[i] == old).expect("neighbor not adjacent");
        tri.nbr[i] = new;
    }

    fn new_tri(&mut self, v: [u32; 3], nbr: [u32; 3]) -> u32 {
        let id = self.tris.len() as u32;
        self.tris.push(CdtTri { v, nbr, alive: true });
        self.live_count += 1;
        for &vv in &v {
            self.vert_tri[vv as usize] = id;
        }
        id
    }

    /// All live triangles around a vertex, in rotation order.
    pub fn star(&self, v: u32) -> Vec<u32> {
        let start = self.hint_for(v);
        if start == NONE {
            return Vec::new();
        }
        let mut out = vec![start];
        // Rotate CCW: from triangle t with v at index i, cross the edge
        // opposite v[(i+2)%3] (the edge containing v and v[(i+1)%3]).
        let mut t = start;
        loop {
            let i = self.index_of(t, v);
            let next = self.tris[t as usize].nbr[(i + 2) % 3];
            if next == NONE || next == start {
                break;
            }
            out.push(next);
            t = next;
            if out.len() > self.tris.len() {
                panic!("star walk did not close around vertex {v}");
            }
        }
        if self.tris[t as usize].nbr[(self.index_of(t, v) + 2) % 3] != start {
            // Hit a boundary; rotate CW from start for the rest.
            let mut t = start;
            loop {
                let i = self.index_of(t, v);
                let next = self.tris[t as usize].nbr[(i + 1) % 3];
                if next == NONE || next == start {
                    break;
                }
                out.push(next);
                t = next;
                if out.len() > self.tris.len() {
                    panic!("star walk did not close around vertex {v}");
                }
            }
        }
        out
    }

    /// Walk to the triangle containing `p`, starting from a hint.
    pub fn locate(&self, p: &Point, hint: u32) -> Loc {
        let mut t = if hint != NONE && (hint as usize) < self.tris.len() && self.tris[hint as usize].alive {
            hint
        } else {
            self.tris.iter().position(|x| x.alive).expect("no live triangles") as u32
        };
        let mut steps: u64 = 0;
        loop {
            steps += 1;
            if steps as usize > 8 * self.tris.len() + 64 {
                for (id, _) in self.live_triangles() {
                    if let Some(loc) = self.classify_in_triangle(p, id as u32) {
                        return loc;
                    }
                }
                panic!("locate: point {p:?} not found in triangulation");
            }
            let tri = &self.tris[t as usize];
            let pts = self.tri_pts(t);
            let mut negatives: [usize; 3] = [usize::MAX; 3];
            let mut n_neg = 0;
            let mut on_edges: [usize; 3] = [usize::MAX; 3];
            let mut n_on = 0;
            for i in 0..3 {
                let a = pts[(i + 1) % 3];
                let b = pts[(i + 2) % 3];
                match orient2d(a, b, p) {
                    Ordering::Less => {
                        negatives[n_neg] = i;
                        n_neg += 1;
                    }
                    Ordering::Equal => {
                        on_edges[n_on] = i;
                        n_on += 1;
                    }
                    Ordering::Greater => {}
                }
            }
            if n_neg > 0 {
                // Stochastic-but-deterministic choice among exits avoids the
                // rare visibility-walk cycles in constrained triangulations.
                let pick = if n_neg == 1 {
                    negatives[0]
                } else {
                    negatives[(steps.wrapping_mul(2654435761) >> 7) as usize % n_neg]
                };
                let n = tri.nbr[pick];
                if n == NONE {
                    panic!("locate walked out of the bounding triangle at {p:?}");
                }
                t = n;
                continue;
            }
            return match n_on {
                0 => Loc::Inside(t),
                1 => Loc::OnEdge(t, on_edges[0]),
                _ => {
                    // On the vertex shared by the two edges.
                    let k = 3 - on_edges[0] - on_edges[1];
                    Loc::OnVertex(tri.v[k])
                }
            };
        }
    }

    fn classify_in_triangle(&self, p: &Point, t: u32) -> Option<Loc> {
        let tri = &self.tris[t as usize];
        let pts = self.tri_pts(t);
        let mut on_edges = Vec::new();
        for i in 0..3 {
            match orient2d(pts[(i + 1) % 3], pts[(i + 2) % 3], p) {
                Ordering::Less => return None,
                Ordering::Equal => on_edges.push(i),
                Ordering::Greater => {}
            }
        }
        Some(match on_edges.len() {
            0 => Loc::Inside(t),
            1 => Loc::OnEdge(t, on_edges[0]),
            _ => Loc::OnVertex(tri.v[3 - on_edges[0] - on_edges[1]]),
        })
    }

    /// Insert a point, restoring the constrained Delaunay property. Returns
    /// the vertex id and, when the point split a constrained edge, that
    /// edge's original canonical pair.
    pub fn insert_point(&mut self, p: Point, hint: u32) -> (u32, Option<(u32, u32)>) {
        match self.locate(&p, hint) {
            Loc::OnVertex(v) => (v, None),
            Loc::Inside(t) => {
                let v = self.push_vertex(p);
                self.split_triangle(t, v);
                (v, None)
            }
            Loc::OnEdge(t, i) => {
                let tri = &self.tris[t as usize];
                let (a, b) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                let split = canon(a, b);
                let was_constrained = self.is_constrained(a, b);
                let v = self.push_vertex(p);
                self.split_edge(t, i, v);
                if was_constrained {
                    self.constrained.remove(&split);
                    self.constrained.insert(canon(split.0, v));
                    self.constrained.insert(canon(v, split.1));
                    (v, Some(split))
                } else {
                    (v, None)
                }
            }
        }
    }

    fn push_vertex(&mut self, p: Point) -> u32 {
        let id = self.pts.len() as u32;
        self.pts.push(p);
        self.vert_tri.push(NONE);
        id
    }

    /// 1 -> 3 split of triangle `t` by interior vertex `v`, then legalize.
    fn split_triangle(&mut self, t: u32, v: u32) {
        let CdtTri { v: [a, b, c], nbr: [na, nb, nc], .. } = self.tris[t as usize].clone();
        self.kill(t);
        let t0 = self.new_tri([v, a, b], [NONE; 3]);
        let t1 = self.new_tri([v, b, c], [NONE; 3]);
        let t2 = self.new_tri([v, c, a], [NONE; 3]);
        // t0 = (v,a,b): opp v is (a,b) whose outside neighbor is nc.
        self.tris[t0 as usize].nbr = [nc, t1, t2];
        self.tris[t1 as usize].nbr = [na, t2, t0];
        self.tris[t2 as usize].nbr = [nb, t0, t1];
        self.replace_nbr(nc, t, t0);
        self.replace_nbr(na, t, t1);
        self.replace_nbr(nb, t, t2);
        self.legalize(t0, 0);
        self.legalize(t1, 0);
        self.legalize(t2, 0);
    }

    /// 2 -> 4 split when `v` lies on the edge of `t` opposite corner `i`.
    fn split_edge(&mut self, t: u32, i: usize, v: u32) {
        let tri = self.tris[t as usize].clone();
        let (apex, a, b) = (tri.v[i], tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
        let n = tri.nbr[i];
        let n_apex_a = tri.nbr[(i + 2) % 3]; // across (apex, a)
        let n_b_apex = tri.nbr[(i + 1) % 3]; // across (b, apex)
        self.kill(t);
        // Halves on t's side: (apex, a, v) and (apex, v, b), both CCW since
        // v lies on segment (a, b).
        let t0 = self.new_tri([apex, a, v], [NONE; 3]);
        let t1 = self.new_tri([apex, v, b], [NONE; 3]);
        if n == NONE {
            self.tris[t0 as usize].nbr = [NONE, t1, n_apex_a];
            self.tris[t1 as usize].nbr = [NONE, n_b_apex, t0];
            self.replace_nbr(n_apex_a, t, t0);
            self.replace_nbr(n_b_apex, t, t1);
            self.legalize(t0, 2);
            self.legalize(t1, 1);
        } else {
            let ntri = self.tris[n as usize].clone();
            let j = (0..3).find(|&j| ntri.nbr[j] == t).expect("mutual adjacency");
            let napex = ntri.v[j];
            // Neighbor triangle is (napex, b, a) in CCW order from its side.
            debug_assert_eq!(canon(ntri.v[(j + 1) % 3], ntri.v[(j + 2) % 3]), canon(a, b));
            let n_napex_b = ntri.nbr[(j + 2) % 3]; // across (napex, v[(j+1)])
            let n_a_napex = ntri.nbr[(j + 1) % 3]; // across (v[(j+2)], napex)
            self.kill(n);
            let t2 = self.new_tri([napex, b, v], [NONE; 3]);
            let t3 = self.new_tri([napex, v, a], [NONE; 3]);
            self.tris[t0 as usize].nbr = [t3, t1, n_apex_a];
            self.tris[t1 as usize].nbr = [t2, n_b_apex, t0];
            self.tris[t2 as usize].nbr = [t1, t3, n_napex_b];
            self.tris[t3 as usize].nbr = [t0, n_a_napex, t2];
            self.replace_nbr(n_apex_a, t, t0);
            self.replace_nbr(n_b_apex, t, t1);
            self.replace_nbr(n_napex_b, n, t2);
            self.replace_nbr(n_a_napex, n, t3);
            self.legalize(t0, 2);
            self.legalize(t1, 1);
            self.legalize(t2, 2);
            self.legalize(t3, 1);
        }
    }

    /// Restore the Delaunay property across the edge of `t` opposite
    /// `t.v[i]`, flipping recursively. Constrained edges are never flipped.
    fn legalize(&mut self, t: u32, i: usize) {
        let tri = self.tris[t as usize].clone();
        if !tri.alive {
            return;
        }
        let n = tri.nbr[i];
        if n == NONE {
            return;
        }
        let (a, b) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
        if self.is_constrained(a, b) {
            return;
        }
        let j = (0..3).find(|&j| self.tris[n as usize].nbr[j] == t).expect("mutual adjacency");
        let d = self.tris[n as usize].v[j];
        let [p0, p1, p2] = self.tri_pts(t);
        let pd = &self.pts[d as usize];
        if incircle(p0, p1, p2, pd) == Ordering::Greater {
            let apex = tri.v[i];
            let (u, w) = self.flip(t, i);
            // Re-test the quad edges now opposite the cascading apex.
            let ui = self.index_of(u, apex);
            self.legalize(u, ui);
            let wi = self.index_of(w, apex);
            self.legalize(w, wi);
        }
    }

    /// Flip the edge of `t` opposite `t.v[i]`. Returns the two new triangles,
    /// both containing the original apex `t.v[i]`.
    fn flip(&mut self, t: u32, i: usize) -> (u32, u32) {
        let tri = self.tris[t as usize].clone();
        let n = tri.nbr[i];
        debug_assert_ne!(n, NONE);
        let j = (0..3).find(|&j| self.tris[n as usize].nbr[j] == t).expect("mutual adjacency");
        let ntri = self.tris[n as usize].clone();
        let apex_t = tri.v[i];
        let apex_n = ntri.v[j];
        let a = tri.v[(i + 1) % 3];
        let b = tri.v[(i + 2) % 3];
        // t = (apex_t, a, b), n = (apex_n, b, a), both CCW.
        let t_apex_a = tri.nbr[(i + 2) % 3];
        let t_b_apex = tri.nbr[(i + 1) % 3];
        let n_apex_b = ntri.nbr[(j + 2) % 3];
        let n_a_apex = ntri.nbr[(j + 1) % 3];
        self.kill(t);
        self.kill(n);
        let u = self.new_tri([apex_t, a, apex_n], [NONE; 3]);
        let w = self.new_tri([apex_t, apex_n, b], [NONE; 3]);
        self.tris[u as usize].nbr = [n_a_apex, w, t_apex_a];
        self.tris[w as usize].nbr = [n_apex_b, t_b_apex, u];
        self.replace_nbr(t_apex_a, t, u);
        self.replace_nbr(t_b_apex, t, w);
        self.replace_nbr(n_apex_b, n, w);
        self.replace_nbr(n_a_apex, n, u);
        (u, w)
    }

    pub fn hint_for(&self, v: u32) -> u32 {
        let h = self.vert_tri[v as usize];
        if h != NONE && self.tris[h as usize].alive && self.tris[h as usize].v.contains(&v) {
            return h;
        }
        self.tris
            .iter()
            .position(|t| t.alive && t.v.contains(&v))
            .map(|i| i as u32)
            .unwrap_or(NONE)
    }

    /// Find a live triangle containing the undirected edge (a, b).
    pub fn find_edge(&self, a: u32, b: u32) -> Option<(u32, usize)> {
        for t in self.star(a) {
            let tri = &self.tris[t as usize];
            if tri.v.contains(&b) {
                let i = (0..3).find(|&i| tri.v[i] != a && tri.v[i] != b).unwrap();
                return Some((t, i));
            }
        }
        None
    }

    /// Force the segment (a, b) to appear as an edge, retriangulating the
    /// corridor of crossed triangles, then mark it constrained.
    /// Precondition: no vertex lies on the open segment and no constrained
    /// edge crosses it.
    pub fn insert_constraint(&mut self, a: u32, b: u32) {
        assert_ne!(a, b, "degenerate constraint");
        if self.find_edge(a, b).is_some() {
            self.constrained.insert(canon(a, b));
            return;
        }
        let pa = self.pts[a as usize].clone();
        let pb = self.pts[b as usize].clone();
        let mut upper: Vec<u32> = Vec::new();
        let mut lower: Vec<u32> = Vec::new();
        let mut corridor: Vec<u32> = Vec::new();
        // Starting triangle in a's star: the segment leaves through the edge
        // opposite a.
        let mut cur = NONE;
        for t in self.star(a) {
            let i = self.index_of(t, a);
            let tri = &self.tris[t as usize];
            let u = tri.v[(i + 1) % 3];
            let w = tri.v[(i + 2) % 3];
            let pu = &self.pts[u as usize];
            let pw = &self.pts[w as usize];
            // Strictly between the rays a->u and a->w (CCW from u to w).
            if orient2d(&pa, &pb, pu) == Ordering::Less && orient2d(&pa, &pb, pw) == Ordering::Greater {
                cur = t;
                lower.push(u);
                upper.push(w);
                break;
            }
        }
        assert_ne!(cur, NONE, "no corridor start for constraint");
        corridor.push(cur);
        loop {
            let u_last = *upper.last().unwrap();
            let l_last = *lower.last().unwrap();
            assert!(
                !self.is_constrained(u_last, l_last),
                "constraint crosses an existing constrained edge"
            );
            let tri = self.tris[cur as usize].clone();
            let k = (0..3)
                .find(|&k| tri.v[k] != u_last && tri.v[k] != l_last)
                .expect("corridor lost its chain");
            let next = tri.nbr[k];
            assert_ne!(next, NONE, "constraint corridor ran off the mesh");
            let ntri = self.tris[next as usize].clone();
            let opposite = *ntri
                .v
                .iter()
                .find(|&&v| v != u_last && v != l_last)
                .expect("degenerate corridor step");
            corridor.push(next);
            cur = next;
            if opposite == b {
                break;
            }
            match orient2d(&pa, &pb, &self.pts[opposite as usize]) {
                Ordering::Greater => upper.push(opposite),
                Ordering::Less => lower.push(opposite),
                Ordering::Equal => panic!("vertex {opposite} lies on constraint interior"),
            }
        }

        // Outer boundary edges of the corridor, for rewiring.
        let mut outer: HashMap<(u32, u32), u32> = HashMap::new();
        let corridor_set: HashSet<u32> = corridor.iter().copied().collect();
        for &t in &corridor {
            let tri = self.tris[t as usize].clone();
            for i in 0..3 {
                let n = tri.nbr[i];
                if n != NONE && !corridor_set.contains(&n) {
                    outer.insert(canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]), n);
                }
            }
        }
        for &t in &corridor {
            self.kill(t);
        }
        let first_new = self.tris.len();
        let mut lower_rev = lower.clone();
        lower_rev.reverse();
        let t_upper = self.fill_pseudopolygon(a, b, &upper);
        let t_lower = self.fill_pseudopolygon(b, a, &lower_rev);
        // Wire the two halves together along (a, b) and reattach the outside.
        self.set_half_nbr(t_upper, a, b, t_lower);
        self.set_half_nbr(t_lower, a, b, t_upper);
        for t in first_new..self.tris.len() {
            let tri = self.tris[t].clone();
            if !tri.alive {
                continue;
            }
            for i in 0..3 {
                if tri.nbr[i] == NONE {
                    let key = canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                    if let Some(&n) = outer.get(&key) {
                        self.tris[t].nbr[i] = n;
                        self.replace_nbr_if_dead(n, t as u32, key);
                    }
                }
            }
        }
        self.constrained.insert(canon(a, b));
    }

    /// Point the slot of `n` that currently references a dead triangle
    /// across `key` at `t`.
    fn replace_nbr_if_dead(&mut self, n: u32, t: u32, key: (u32, u32)) {
        let tri = &mut self.tris[n as usize];
        for i in 0..3 {
            let e = canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
            if e == key {
                tri.nbr[i] = t;
                return;
            }
        }
        panic!("rewire: edge not found on outer triangle");
    }

    /// Retriangulate the pseudo-polygon bounded by the directed edge (a, b)
    /// and the chain of vertices left of a->b, ordered from a to b.
    /// Returns the new triangle adjacent to (a, b).
    fn fill_pseudopolygon(&mut self, a: u32, b: u32, chain: &[u32]) -> u32 {
        debug_assert!(!chain.is_empty());
        let mut c_idx = 0;
        for k in 1..chain.len() {
            let pa = &self.pts[a as usize];
            let pb = &self.pts[b as usize];
            let pc = &self.pts[chain[c_idx] as usize];
            let pk = &self.pts[chain[k] as usize];
            if incircle_ccw(pa, pb, pc, pk) == Ordering::Greater {
                c_idx = k;
            }
        }
        let c = chain[c_idx];
        // (a, b, c) is CCW: c lies left of a->b.
        let t = self.new_tri([a, b, c], [NONE; 3]);
        if c_idx > 0 {
            let left = self.fill_pseudopolygon(a, c, &chain[..c_idx]);
            // Edge (c, a) of t is opposite v[1] = b.
            self.tris[t as usize].nbr[1] = left;
            self.set_half_nbr(left, a, c, t);
        }
        if c_idx + 1 < chain.len() {
            let right = self.fill_pseudopolygon(c, b, &chain[c_idx + 1..]);
            // Edge (b, c) of t is opposite v[0] = a.
            self.tris[t as usize].nbr[0] = right;
            self.set_half_nbr(right, c, b, t);
        }
        t
    }

    fn set_half_nbr(&mut self, t: u32, u: u32, w: u32, n: u32) {
        let tri = &self.tris[t as usize];
        let i = (0..3)
            .find(|&i| canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]) == canon(u, w))
            .expect("edge not on triangle");
        self.tris[t as usize].nbr[i] = n;
    }

    pub fn circumcenter(&self, t: u32) -> Option<Point> {
        let [a, b, c] = self.tri_pts(t);
        crate::geom::predicates::circumcenter(a, b, c)
    }

    /// Validate adjacency and orientation invariants (test aid).
    pub fn check_invariants(&self) {
        for (id, tri) in self.live_triangles() {
            let pts = self.tri_pts(id as u32);
            assert_eq!(orient2d(pts[0], pts[1], pts[2]), Ordering::Greater, "triangle {id} not CCW");
            for i in 0..3 {
                let n = tri.nbr[i];
                if n != NONE {
                    let ntri = &self.tris[n as usize];
                    assert!(ntri.alive, "triangle {id} points at dead neighbor {n}");
                    assert!(ntri.nbr.contains(&(id as u32)), "adjacency not mutual between {id} and {n}");
                    // The shared edge must agree.
                    let e = canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                    assert!(
                        ntri.v.contains(&e.0) && ntri.v.contains(&e.1),
                        "neighbor {n} does not share edge {e:?} with {id}"
                    );
                }
            }
        }
    }

    pub fn point_between(&self, a: u32, b: u32, t: &Rat) -> Point {
        self.pts[a as usize].lerp(&self.pts[b as usize], t)
    }
}

/// incircle with an explicit CCW normalization of (a, b, c).
fn incircle_ccw(a: &Point, b: &Point, c: &Point, d: &Point) -> Ordering {
    match orient2d(a, b, c) {
        Ordering::Greater => incircle(a, b, c, d),
        Ordering::Less => incircle(a, c, b, d),
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn insert_grid_points_stays_delaunay() {
        let mut cdt = Cdt::new(&pt(0, 0), &pt(4, 4));
        let mut hint = NONE;
        for x in 0..=4 {
            for y in 0..=4 {
                let (v, _) = cdt.insert_point(pt(x, y), hint);
                hint = cdt.hint_for(v);
            }
        }
        cdt.check_invariants();
        for (id, tri) in cdt.live_triangles() {
            if tri.v.iter().any(|&v| cdt.is_super(v)) {
                continue;
            }
            let [a, b, c] = tri.v;
            for v in 3..cdt.pts.len() as u32 {
                if v == a || v == b || v == c {
                    continue;
                }
                let r = incircle(
                    &cdt.pts[a as usize],
                    &cdt.pts[b as usize],
                    &cdt.pts[c as usize],
                    &cdt.pts[v as usize],
                );
                assert_ne!(r, Ordering::Greater, "triangle {id} contains vertex {v}");
            }
        }
    }

    #[test]
    fn duplicate_insert_returns_existing() {
        let mut cdt = Cdt::new(&pt(0, 0), &pt(2, 2));
        let (v1, _) = cdt.insert_point(pt(1, 1), NONE);
        let (v2, _) = cdt.insert_point(pt(1, 1), NONE);
        assert_eq!(v1, v2);
        cdt.check_invariants();
    }

    #[test]
    fn on_edge_insert_splits_constraint() {
        let mut cdt = Cdt::new(&pt(0, 0), &pt(4, 4));
        let (a, _) = cdt.insert_point(pt(0, 0), NONE);
        let (b, _) = cdt.insert_point(pt(4, 0), NONE);
        let _ = cdt.insert_point(pt(0, 4), NONE);
        cdt.insert_constraint(a, b);
        let (v, split) = cdt.insert_point(pt(2, 0), NONE);
        assert_eq!(split, Some(canon(a, b)));
        cdt.check_invariants();
        assert!(cdt.is_constrained(a, v));
        assert!(cdt.is_constrained(v, b));
        assert!(!cdt.is_constrained(a, b));
    }

    #[test]
    fn constraint_forces_edge_through_random_cloud() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut cdt = Cdt::new(&pt(0, 0), &pt(100, 100));
        let (a, _) = cdt.insert_point(pt(0, 50), NONE);
        let (b, _) = cdt.insert_point(pt(100, 50), NONE);
        for _ in 0..60 {
            let x = rng.gen_range(1..100i64);
            let mut y = rng.gen_range(0..100i64);
            if y == 50 {
                y = 51;
            }
            cdt.insert_point(pt(x, y), NONE);
        }
        cdt.insert_constraint(a, b);
        cdt.check_invariants();
        assert!(cdt.find_edge(a, b).is_some(), "constraint edge must exist");
        assert!(cdt.is_constrained(a, b));
        // And it survives later insertions nearby.
        for k in 1..20 {
            cdt.insert_point(pt(5 * k, 49), NONE);
        }
        cdt.check_invariants();
        assert!(cdt.find_edge(a, b).is_some());
    }

    #[test]
    fn star_closes_around_interior_vertex() {
        let mut cdt = Cdt::new(&pt(0, 0), &pt(4, 4));
        let (c, _) = cdt.insert_point(pt(2, 2), NONE);
        for p in [pt(0, 0), pt(4, 0), pt(4, 4), pt(0, 4)] {
            cdt.insert_point(p, NONE);
        }
        let star = cdt.star(c);
        assert!(star.len() >= 4);
        for t in star {
            assert!(cdt.tris[t as usize].v.contains(&c));
        }
    }

    #[test]
    fn locate_classifications() {
        let mut cdt = Cdt::new(&pt(0, 0), &pt(8, 8));
        let (a, _) = cdt.insert_point(pt(0, 0), NONE);
        let (b, _) = cdt.insert_point(pt(8, 0), NONE);
        let _ = cdt.insert_point(pt(0, 8), NONE);
        match cdt.locate(&pt(4, 0), NONE) {
            Loc::OnEdge(t, i) => {
                let tri = &cdt.tris[t as usize];
                assert_eq!(canon(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]), canon(a, b));
            }
            other => panic!("expected OnEdge, got {other:?}"),
        }
        assert_eq!(cdt.locate(&pt(0, 0), NONE), Loc::OnVertex(a));
        assert!(matches!(cdt.locate(&pt(2, 2), NONE), Loc::Inside(_)));
    }
}
