//! Exact geometric predicates with a floating-point interval fast path.
//!
//! Coordinates are arbitrary rationals, so the usual adaptive-precision
//! tricks for f64 inputs do not apply directly. Instead every predicate is
//! evaluated first in directed-rounding interval arithmetic on f64
//! enclosures of the rationals; when the interval sign is ambiguous the
//! predicate falls back to exact rational arithmetic.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::point::Point;
use crate::rat::Rat;

/// Closed f64 interval enclosing an exact value.
#[derive(Clone, Copy, Debug)]
pub struct Iv {
    pub lo: f64,
    pub hi: f64,
}

#[inline]
fn bump_down(x: f64) -> f64 {
    if x.is_finite() {
        f64::from_bits(if x > 0.0 {
            x.to_bits() - 1
        } else if x < 0.0 {
            x.to_bits() + 1
        } else {
            (-f64::MIN_POSITIVE).to_bits()
        })
    } else {
        x
    }
}

#[inline]
fn bump_up(x: f64) -> f64 {
    if x.is_finite() {
        f64::from_bits(if x > 0.0 {
            x.to_bits() + 1
        } else if x < 0.0 {
            x.to_bits() - 1
        } else {
            f64::MIN_POSITIVE.to_bits()
        })
    } else {
        x
    }
}

impl Iv {
    pub fn from_rat(x: &Rat) -> Iv {
        let v = crate::rat::to_f64(x);
        if v.is_finite() {
            // to_f64 rounds to nearest; one ulp each way is a safe enclosure.
            Iv { lo: bump_down(v), hi: bump_up(v) }
        } else {
            Iv { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
        }
    }

    pub fn point(v: f64) -> Iv {
        Iv { lo: v, hi: v }
    }

    #[inline]
    pub fn add(self, o: Iv) -> Iv {
        Iv { lo: bump_down(self.lo + o.lo), hi: bump_up(self.hi + o.hi) }
    }

    #[inline]
    pub fn sub(self, o: Iv) -> Iv {
        Iv { lo: bump_down(self.lo - o.hi), hi: bump_up(self.hi - o.lo) }
    }

    #[inline]
    pub fn mul(self, o: Iv) -> Iv {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = c[0];
        let mut hi = c[0];
        for &v in &c[1..] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Iv { lo: bump_down(lo), hi: bump_up(hi) }
    }

    /// Sign of the enclosed value, if unambiguous.
    #[inline]
    pub fn sign(self) -> Option<Ordering> {
        if self.lo > 0.0 {
            Some(Ordering::Greater)
        } else if self.hi < 0.0 {
            Some(Ordering::Less)
        } else if self.lo == 0.0 && self.hi == 0.0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

fn sign_of(x: &Rat) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Orientation of the triple (a, b, c): `Greater` when counterclockwise,
/// `Less` when clockwise, `Equal` when collinear.
pub fn orient2d(a: &Point, b: &Point, c: &Point) -> Ordering {
    let (ax, ay) = (Iv::from_rat(&a.x), Iv::from_rat(&a.y));
    let (bx, by) = (Iv::from_rat(&b.x), Iv::from_rat(&b.y));
    let (cx, cy) = (Iv::from_rat(&c.x), Iv::from_rat(&c.y));
    let det = bx.sub(ax).mul(cy.sub(ay)).sub(by.sub(ay).mul(cx.sub(ax)));
    if let Some(s) = det.sign() {
        return s;
    }
    sign_of(&orient2d_exact(a, b, c))
}

/// Exact signed orientation determinant (twice the signed triangle area).
pub fn orient2d_exact(a: &Point, b: &Point, c: &Point) -> Rat {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// In-circle test: for a CCW triangle (a, b, c), `Greater` when d is strictly
/// inside the circumcircle, `Less` when strictly outside, `Equal` on it.
pub fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> Ordering {
    debug_assert_ne!(orient2d(a, b, c), Ordering::Less, "incircle expects CCW triangle");
    let iv = |p: &Point| (Iv::from_rat(&p.x), Iv::from_rat(&p.y));
    let (dx, dy) = iv(d);
    let row = |p: &Point| {
        let (px, py) = iv(p);
        let ex = px.sub(dx);
        let ey = py.sub(dy);
        let m = ex.mul(ex).add(ey.mul(ey));
        (ex, ey, m)
    };
    let (ax, ay, am) = row(a);
    let (bx, by, bm) = row(b);
    let (cx, cy, cm) = row(c);
    let det = ax
        .mul(by.mul(cm).sub(bm.mul(cy)))
        .sub(ay.mul(bx.mul(cm).sub(bm.mul(cx))))
        .add(am.mul(bx.mul(cy).sub(by.mul(cx))));
    if let Some(s) = det.sign() {
        return s;
    }
    let row = |p: &Point| {
        let ex = &p.x - &d.x;
        let ey = &p.y - &d.y;
        let m = &ex * &ex + &ey * &ey;
        (ex, ey, m)
    };
    let (ax, ay, am) = row(a);
    let (bx, by, bm) = row(b);
    let (cx, cy, cm) = row(c);
    let det = &ax * (&by * &cm - &bm * &cy) - &ay * (&bx * &cm - &bm * &cx) + &am * (&bx * &cy - &by * &cx);
    sign_of(&det)
}

/// Whether p lies on the closed segment [a, b].
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient2d(a, b, p) != Ordering::Equal {
        return false;
    }
    let ap = a.to(p);
    let ab = a.to(b);
    let t = ap.dot(&ab);
    !t.is_negative() && t <= ab.norm2()
}

/// Whether p lies strictly inside the open segment (a, b).
pub fn on_segment_interior(p: &Point, a: &Point, b: &Point) -> bool {
    on_segment(p, a, b) && p != a && p != b
}

/// Diametral-circle (encroachment) test: strictly positive when `p` lies
/// strictly inside the circle having [a, b] as diameter.
pub fn in_diametral_circle(p: &Point, a: &Point, b: &Point) -> bool {
    // p inside iff angle apb is obtuse iff (a-p)·(b-p) < 0.
    let pa = p.to(a);
    let pb = p.to(b);
    pa.dot(&pb).is_negative()
}

/// Exact circumcenter of a non-degenerate triangle.
pub fn circumcenter(a: &Point, b: &Point, c: &Point) -> Option<Point> {
    let d = orient2d_exact(a, b, c);
    if d.is_zero() {
        return None;
    }
    let two_d = &d + &d;
    let ab2 = b.dist2(a);
    let ac2 = c.dist2(a);
    let bx = &b.x - &a.x;
    let by = &b.y - &a.y;
    let cx = &c.x - &a.x;
    let cy = &c.y - &a.y;
    let ux = (&ab2 * &cy - &ac2 * &by) / &two_d;
    let uy = (&ac2 * &bx - &ab2 * &cx) / &two_d;
    Some(Point::new(&a.x + &ux, &a.y + &uy))
}

/// Intersection classification for a pair of closed segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegSeg {
    /// Disjoint closures.
    None,
    /// A single common point.
    Point(Point),
    /// A shared collinear piece of positive length.
    Overlap(Point, Point),
}

/// Exact intersection of the closed segments [a, b] and [c, d].
pub fn segment_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> SegSeg {
    let ab = a.to(b);
    let cd = c.to(d);
    let denom = ab.cross(&cd);
    if denom.is_zero() {
        // Parallel. Either disjoint lines or a collinear overlap.
        if !orient2d_exact(a, b, c).is_zero() {
            return SegSeg::None;
        }
        if ab.is_zero() && cd.is_zero() {
            return if a == c { SegSeg::Point(a.clone()) } else { SegSeg::None };
        }
        // Project onto the longer direction.
        let dir = if ab.is_zero() { &cd } else { &ab };
        let t = |p: &Point| a.to(p).dot(dir);
        let (mut s0, mut s1) = (t(a), t(b));
        if s0 > s1 {
            std::mem::swap(&mut s0, &mut s1);
        }
        let (mut u0p, mut u1p) = (c.clone(), d.clone());
        let (mut u0, mut u1) = (t(c), t(d));
        if u0 > u1 {
            std::mem::swap(&mut u0, &mut u1);
            std::mem::swap(&mut u0p, &mut u1p);
        }
        let lo = s0.clone().max(u0);
        let hi = s1.clone().min(u1);
        match lo.cmp(&hi) {
            Ordering::Greater => SegSeg::None,
            Ordering::Equal => {
                let n2 = dir.norm2();
                let tt = &lo / &n2;
                SegSeg::Point(a.add(&dir.scale(&tt)))
            }
            Ordering::Less => {
                let n2 = dir.norm2();
                let p = a.add(&dir.scale(&(&lo / &n2)));
                let q = a.add(&dir.scale(&(&hi / &n2)));
                SegSeg::Overlap(p, q)
            }
        }
    } else {
        let ac = a.to(c);
        let t = &ac.cross(&cd) / &denom;
        let u = &ac.cross(&ab) / &denom;
        let zero = Rat::zero();
        let one = Rat::from_integer(1.into());
        if t < zero || t > one || u < zero || u > one {
            SegSeg::None
        } else {
            SegSeg::Point(a.lerp(b, &t))
        }
    }
}
