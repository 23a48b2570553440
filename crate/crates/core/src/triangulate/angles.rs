//! Grid rotation selection: forbidden direction angles and the largest-gap
//! rotation with a rational-slope snap.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::pslg::Pslg;
use crate::rat::Rat;

/// The set E of directions to avoid: every segment direction together with
/// its perpendicular, reduced to primitive integer vectors.
#[derive(Clone, Debug)]
pub struct AngleSet {
    /// Sorted angles of E in [0, π) (degrees are derived for reports).
    pub angles: Vec<f64>,
    /// Cardinality of E.
    pub eta: usize,
    /// Exclusion half-width π/(2η); infinity when E is empty.
    pub theta_guard: f64,
}

/// Primitive integer direction of a rational vector, sign-normalized so the
/// first nonzero coordinate is positive (i.e. directions mod π).
fn primitive_dir(dx: &Rat, dy: &Rat) -> (BigInt, BigInt) {
    let lcm = dx.denom().lcm(dy.denom());
    let mut ix = (dx * Rat::from_integer(lcm.clone())).to_integer();
    let mut iy = (dy * Rat::from_integer(lcm)).to_integer();
    let g = ix.gcd(&iy);
    if !g.is_zero() {
        ix /= &g;
        iy /= &g;
    }
    let flip = if !ix.is_zero() { ix.is_negative() } else { iy.is_negative() };
    if flip {
        ix = -ix;
        iy = -iy;
    }
    (ix, iy)
}

/// Directions present in the PSLG together with their perpendiculars.
pub fn forbidden_angles(pslg: &Pslg) -> AngleSet {
    let mut dirs: BTreeSet<(BigInt, BigInt)> = BTreeSet::new();
    for s in &pslg.segments {
        let (a, b) = (&pslg.vertices[s.a], &pslg.vertices[s.b]);
        let dx = &b.x - &a.x;
        let dy = &b.y - &a.y;
        let d = primitive_dir(&dx, &dy);
        // Perpendicular before moving d.
        let perp = primitive_dir(&-&dy.clone(), &dx);
        dirs.insert(d);
        dirs.insert(perp);
    }
    let mut angles: Vec<f64> = dirs
        .iter()
        .map(|(x, y)| {
            let a = crate::rat::to_f64(&Rat::from_integer(y.clone()))
                .atan2(crate::rat::to_f64(&Rat::from_integer(x.clone())));
            // Normalize to [0, π).
            let a = if a < 0.0 { a + std::f64::consts::PI } else { a };
            if a >= std::f64::consts::PI {
                a - std::f64::consts::PI
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let eta = angles.len();
    let theta_guard = if eta == 0 {
        f64::INFINITY
    } else {
        std::f64::consts::PI / (2.0 * eta as f64)
    };
    AngleSet { angles, eta, theta_guard }
}

/// A chosen grid rotation: the midpoint of the largest direction gap,
/// snapped to a rational slope so grid lines keep rational coefficients.
#[derive(Clone, Debug)]
pub struct Rotation {
    /// Rotation angle in radians, in [0, π/2).
    pub angle: f64,
    /// Primitive integer direction (p, q) with q/p = tan(angle).
    pub dir: (i64, i64),
    /// Guaranteed minimum crossing angle against every direction in E
    /// (radians); `None` when E is empty (no crossings exist).
    pub crossing_guarantee: Option<f64>,
}

/// Pick a rotation outside the guarded neighborhoods of E: deterministic,
/// the midpoint of the largest gap of E reduced mod π/2, snapped to the
/// best rational slope with denominator at most 10^4.
pub fn choose_rotation(set: &AngleSet) -> Rotation {
    let quarter = std::f64::consts::FRAC_PI_2;
    if set.eta == 0 {
        return Rotation { angle: 0.0, dir: (1, 0), crossing_guarantee: None };
    }
    // Reduce E mod π/2 (the grid has period π/2).
    let mut reduced: Vec<f64> = set.angles.iter().map(|a| a.rem_euclid(quarter)).collect();
    reduced.sort_by(f64::total_cmp);
    reduced.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    // Largest circular gap in [0, π/2).
    let mut best_gap = 0.0;
    let mut best_mid = 0.0;
    for i in 0..reduced.len() {
        let a = reduced[i];
        let b = if i + 1 < reduced.len() { reduced[i + 1] } else { reduced[0] + quarter };
        let gap = b - a;
        if gap > best_gap {
            best_gap = gap;
            best_mid = (a + b) / 2.0;
        }
    }
    let target = best_mid.rem_euclid(quarter);
    // Snap to a rational tangent without leaving the gap: error stays below
    // ~1e-8 rad, negligible against any positive clearance.
    let dir = rational_slope(target);
    let angle = (dir.1 as f64).atan2(dir.0 as f64);
    // Measured clearance of the snapped rotation against the reduced set.
    let mut clearance = f64::INFINITY;
    for &e in &reduced {
        for k in [-1.0f64, 0.0, 1.0] {
            clearance = clearance.min((angle - e + k * quarter).abs());
        }
    }
    Rotation {
        angle,
        dir,
        crossing_guarantee: Some(clearance),
    }
}

/// Best rational approximation p/q of tan(angle) with denominator <= 10^4,
/// as a primitive direction vector. Angles near π/2 use the cotangent side.
fn rational_slope(angle: f64) -> (i64, i64) {
    let quarter = std::f64::consts::FRAC_PI_2;
    debug_assert!((0.0..quarter + 1e-12).contains(&angle));
    if angle > quarter * 0.5 {
        // Approximate cot and swap axes: direction (q, p) with p/q ~ cot.
        let (p, q) = rational_slope(quarter - angle);
        return (q, p);
    }
    let t = angle.tan();
    let r = crate::rat::rational_approx(t, 10_000);
    let p = crate::rat::to_f64(&Rat::from_integer(r.denom().clone())) as i64;
    let q = crate::rat::to_f64(&Rat::from_integer(r.numer().clone())) as i64;
    if p == 0 {
        (1, 0)
    } else {
        (p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point::Point;
    use crate::triangulate::pslg::{node_segments, RawSegment};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn horizontal_segment_angles() {
        let pslg = node_segments(&[RawSegment::untagged(pt(0, 0), pt(4, 0))]).unwrap();
        let set = forbidden_angles(&pslg);
        assert_eq!(set.eta, 2);
        assert!((set.angles[0] - 0.0).abs() < 1e-12);
        assert!((set.angles[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let rot = choose_rotation(&set);
        assert_eq!(rot.dir, (1, 1), "45 degrees is exactly representable");
        let g = rot.crossing_guarantee.unwrap();
        assert!(g >= set.theta_guard - 1e-12, "guarantee {g} vs guard {}", set.theta_guard);
    }

    #[test]
    fn empty_pslg_angles() {
        let set = forbidden_angles(&Pslg::default());
        assert_eq!(set.eta, 0);
        let rot = choose_rotation(&set);
        assert_eq!(rot.angle, 0.0);
        assert!(rot.crossing_guarantee.is_none());
    }

    #[test]
    fn square_boundary_collapses() {
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(1, 0)),
            RawSegment::untagged(pt(1, 0), pt(1, 1)),
            RawSegment::untagged(pt(1, 1), pt(0, 1)),
            RawSegment::untagged(pt(0, 1), pt(0, 0)),
        ])
        .unwrap();
        let set = forbidden_angles(&pslg);
        assert_eq!(set.eta, 2, "axis directions and perpendiculars collapse");
    }

    #[test]
    fn eta_four_guarantee() {
        // Directions at 0° and 30° -> E has 4 members, guard = π/8.
        let pslg = node_segments(&[
            RawSegment::untagged(pt(0, 0), pt(100, 0)),
            RawSegment::untagged(pt(0, 10), Point::from_f64_exact(86.60254037844386, 60.0)),
        ])
        .unwrap();
        let set = forbidden_angles(&pslg);
        assert_eq!(set.eta, 4);
        assert!((set.theta_guard - std::f64::consts::PI / 8.0).abs() < 1e-12);
        let rot = choose_rotation(&set);
        assert!(rot.crossing_guarantee.unwrap() >= set.theta_guard - 1e-6);
    }
}
