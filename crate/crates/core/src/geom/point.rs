//! Exact rational points and vectors in the plane.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::rat::{rat_i, sqrt_f64, to_f64, Rat};

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Points order lexicographically (x, then y).
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    /// Point from integer coordinates.
    pub fn from_i64(x: i64, y: i64) -> Self {
        Point::new(rat_i(x), rat_i(y))
    }

    /// Point from f64 coordinates, taken exactly (every f64 is rational).
    pub fn from_f64_exact(x: f64, y: f64) -> Self {
        Point::new(crate::rat::rational_approx_exact(x), crate::rat::rational_approx_exact(y))
    }

    pub fn xf(&self) -> f64 {
        to_f64(&self.x)
    }

    pub fn yf(&self) -> f64 {
        to_f64(&self.y)
    }

    /// Displacement vector `other - self`.
    pub fn to(&self, other: &Point) -> Vec2 {
        Vec2 {
            x: &other.x - &self.x,
            y: &other.y - &self.y,
        }
    }

    pub fn add(&self, v: &Vec2) -> Point {
        Point::new(&self.x + &v.x, &self.y + &v.y)
    }

    /// Affine interpolation `self + t*(other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rat) -> Point {
        Point::new(&self.x + t * (&other.x - &self.x), &self.y + t * (&other.y - &self.y))
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        self.lerp(other, &crate::rat::rat(1, 2))
    }

    /// Squared Euclidean distance, exact.
    pub fn dist2(&self, other: &Point) -> Rat {
        self.to(other).norm2()
    }

    /// Euclidean distance as f64 (for reported measures).
    pub fn dist_f64(&self, other: &Point) -> f64 {
        sqrt_f64(&self.dist2(other))
    }

    /// Lexicographic (x, then y) order; the canonical tie-break everywhere.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }

    /// Scale about the origin.
    pub fn scale(&self, f: &Rat) -> Point {
        Point::new(&self.x * f, &self.y * f)
    }
}

/// A displacement vector with exact rational components.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(&self, o: &Vec2) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Vec2) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Rat {
        self.dot(self)
    }

    pub fn norm_f64(&self) -> f64 {
        sqrt_f64(&self.norm2())
    }

    pub fn scale(&self, f: &Rat) -> Vec2 {
        Vec2::new(&self.x * f, &self.y * f)
    }

    pub fn neg(&self) -> Vec2 {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn perp(&self) -> Vec2 {
        Vec2::new(-self.y.clone(), self.x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Direction angle in [0, 2π) as f64, for reports.
    pub fn angle_f64(&self) -> f64 {
        let a = to_f64(&self.y).atan2(to_f64(&self.x));
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }
}

/// True when `b` and `c` point into the same open half-line from the origin
/// (parallel, same direction, both nonzero).
pub fn same_direction(b: &Vec2, c: &Vec2) -> bool {
    !b.is_zero() && !c.is_zero() && b.cross(c).is_zero() && b.dot(c).is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn lerp_midpoint() {
        let a = Point::from_i64(0, 0);
        let b = Point::from_i64(4, 2);
        assert_eq!(a.midpoint(&b), Point::from_i64(2, 1));
        assert_eq!(a.lerp(&b, &rat(1, 4)), Point::new(rat_i(1), rat(1, 2)));
    }

    #[test]
    fn cross_sign() {
        let u = Vec2::new(rat_i(1), rat_i(0));
        let v = Vec2::new(rat_i(0), rat_i(1));
        assert!(u.cross(&v).is_positive());
        assert!(same_direction(&u, &u.scale(&rat(3, 2))));
        assert!(!same_direction(&u, &u.neg()));
    }
}
