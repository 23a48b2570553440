//! Exact convex hull (Andrew's monotone chain).

use std::cmp::Ordering;

use super::point::Point;
use super::predicates::orient2d;

/// Convex hull of a point set, counterclockwise, collinear interior points
/// dropped. Returns fewer than 3 points for degenerate inputs.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient2d(&lower[lower.len() - 2], &lower[lower.len() - 1], p) != Ordering::Greater {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient2d(&upper[upper.len() - 2], &upper[upper.len() - 1], p) != Ordering::Greater {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::current::polygon_signed_area;
    use crate::rat::rat_i;
    use num_traits::Signed;

    #[test]
    fn hull_of_square_with_interior() {
        let pts = vec![
            Point::from_i64(0, 0),
            Point::from_i64(2, 0),
            Point::from_i64(2, 2),
            Point::from_i64(0, 2),
            Point::from_i64(1, 1),
            Point::from_i64(1, 0), // collinear on an edge
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(polygon_signed_area(&h).is_positive());
        assert_eq!(polygon_signed_area(&h), rat_i(4));
    }

    #[test]
    fn degenerate_hull() {
        let pts = vec![Point::from_i64(0, 0), Point::from_i64(1, 1)];
        assert_eq!(convex_hull(&pts).len(), 2);
    }
}
