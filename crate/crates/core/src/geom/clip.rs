//! Exact clipping against convex windows.

use num_traits::{Signed, Zero};

use super::current::polygon_signed_area;
use super::point::Point;
use super::predicates::orient2d_exact;
use crate::rat::Rat;

/// Clip a simple polygon (any orientation) against a convex CCW window,
/// Sutherland-Hodgman. The result is a single polygon vertex list; for
/// subjects whose intersection with the window is disconnected the output
/// may contain degenerate zero-width bridges along the window boundary,
/// which is harmless for signed-area and integral purposes.
pub fn clip_polygon_convex(subject: &[Point], window: &[Point]) -> Vec<Point> {
    debug_assert!(polygon_signed_area(window).is_positive(), "window must be CCW");
    let mut cur: Vec<Point> = subject.to_vec();
    let n = window.len();
    for i in 0..n {
        if cur.is_empty() {
            return cur;
        }
        let a = &window[i];
        let b = &window[(i + 1) % n];
        let mut next: Vec<Point> = Vec::with_capacity(cur.len() + 2);
        let m = cur.len();
        for j in 0..m {
            let p = &cur[j];
            let q = &cur[(j + 1) % m];
            let sp = orient2d_exact(a, b, p);
            let sq = orient2d_exact(a, b, q);
            let p_in = !sp.is_negative();
            let q_in = !sq.is_negative();
            if p_in {
                next.push(p.clone());
            }
            if p_in != q_in {
                // Edge crosses the clip line; sp != sq guaranteed here.
                let t = &sp / (&sp - &sq);
                next.push(p.lerp(q, &t));
            }
        }
        cur = next;
        dedup_cyclic(&mut cur);
    }
    cur
}

fn dedup_cyclic(poly: &mut Vec<Point>) {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
}

/// Exact signed area of `subject ∩ window` for a simple subject polygon and
/// convex CCW window; the sign follows the subject's traversal orientation.
pub fn clipped_signed_area(subject: &[Point], window: &[Point]) -> Rat {
    let clipped = clip_polygon_convex(subject, window);
    if clipped.len() < 3 {
        return Rat::zero();
    }
    polygon_signed_area(&clipped)
}

/// Clip the parameterized segment a + t(b-a), t in [0,1], to a convex CCW
/// window. Returns the surviving closed parameter interval, if any.
pub fn clip_segment_convex(a: &Point, b: &Point, window: &[Point]) -> Option<(Rat, Rat)> {
    let mut t0 = Rat::zero();
    let mut t1 = Rat::from_integer(1.into());
    let n = window.len();
    for i in 0..n {
        let w0 = &window[i];
        let w1 = &window[(i + 1) % n];
        // Signed distance-like values relative to the inward side.
        let sa = orient2d_exact(w0, w1, a);
        let sb = orient2d_exact(w0, w1, b);
        let da = sa.clone();
        let db = &sb - &sa;
        if db.is_zero() {
            if da.is_negative() {
                return None;
            }
            continue;
        }
        let t = -&da / &db;
        if db.is_positive() {
            // Entering: constraint t >= t
            if t > t0 {
                t0 = t;
            }
        } else {
            // Leaving: constraint t <= t
            if t < t1 {
                t1 = t;
            }
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}
