//! Polynomial differential forms and exact pairing with PL currents.
//!
//! These are the test functionals behind every current identity in the
//! suite: two currents are compared by pairing both against random
//! polynomial forms, and Stokes' theorem `<boundary S, psi> = <S, d psi>`
//! holds as an exact rational identity.

use num_traits::Zero;
use rand::Rng;

use super::current::{PLCurrent, PLRegion};
use super::point::Point;
use super::GeomError;
use crate::rat::{rat, rat_i, Rat};

/// Default maximum polynomial degree for test forms.
pub const DEFAULT_FORM_DEGREE: usize = 3;

/// A polynomial in x and y with rational coefficients.
/// `coeffs[i][j]` multiplies `x^i y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly2 {
    pub coeffs: Vec<Vec<Rat>>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { coeffs: vec![vec![Rat::zero()]] }
    }

    pub fn constant(c: Rat) -> Self {
        Poly2 { coeffs: vec![vec![c]] }
    }

    /// Monomial `c * x^i y^j`.
    pub fn monomial(c: Rat, i: usize, j: usize) -> Self {
        let mut coeffs = vec![vec![Rat::zero(); j + 1]; i + 1];
        coeffs[i][j] = c;
        Poly2 { coeffs }
    }

    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut xp = Rat::from_integer(1.into());
        for row in &self.coeffs {
            let mut yp = xp.clone();
            for c in row {
                if !c.is_zero() {
                    acc += c * &yp;
                }
                yp *= y;
            }
            xp *= x;
        }
        acc
    }

    /// Partial derivative in x.
    pub fn dx(&self) -> Poly2 {
        if self.coeffs.len() <= 1 {
            return Poly2::zero();
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|c| c * rat_i(i as i64 + 1)).collect())
            .collect();
        Poly2 { coeffs }
    }

    /// Partial derivative in y.
    pub fn dy(&self) -> Poly2 {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                if row.len() <= 1 {
                    vec![Rat::zero()]
                } else {
                    row[1..].iter().enumerate().map(|(j, c)| c * rat_i(j as i64 + 1)).collect()
                }
            })
            .collect();
        Poly2 { coeffs }
    }

    /// Antiderivative in x (constant of integration zero).
    pub fn integrate_x(&self) -> Poly2 {
        let mut coeffs = vec![vec![Rat::zero()]];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, row)| row.iter().map(|c| c / rat_i(i as i64 + 1)).collect::<Vec<_>>()),
        );
        Poly2 { coeffs }
    }

    /// Restrict to the parameterized segment `p + t (q - p)`, producing
    /// univariate coefficients in t.
    fn on_segment(&self, p: &Point, q: &Point) -> Vec<Rat> {
        // Univariate polynomial arithmetic over the rationals.
        let xs = poly1_affine(&p.x, &(&q.x - &p.x));
        let ys = poly1_affine(&p.y, &(&q.y - &p.y));
        let mut acc = vec![Rat::zero()];
        let mut xpow: Vec<Vec<Rat>> = vec![vec![Rat::from_integer(1.into())]];
        for i in 1..self.coeffs.len() {
            let prev = xpow[i - 1].clone();
            xpow.push(poly1_mul(&prev, &xs));
        }
        for (i, row) in self.coeffs.iter().enumerate() {
            let mut ypow = vec![Rat::from_integer(1.into())];
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    ypow = poly1_mul(&ypow, &ys);
                }
                if !c.is_zero() {
                    let term = poly1_scale(&poly1_mul(&xpow[i], &ypow), c);
                    acc = poly1_add(&acc, &term);
                }
            }
        }
        acc
    }

    /// Random polynomial of degree at most `max_deg` with small rational
    /// coefficients, for property tests.
    pub fn random<R: Rng>(rng: &mut R, max_deg: usize) -> Poly2 {
        let mut coeffs = vec![vec![Rat::zero(); max_deg + 1]; max_deg + 1];
        for (i, row) in coeffs.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                if i + j <= max_deg {
                    let num = rng.gen_range(-6i64..=6);
                    let den = rng.gen_range(1i64..=4);
                    *slot = rat(num, den);
                }
            }
        }
        Poly2 { coeffs }
    }
}

fn poly1_affine(c0: &Rat, c1: &Rat) -> Vec<Rat> {
    vec![c0.clone(), c1.clone()]
}

fn poly1_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly1_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    out
}

fn poly1_scale(a: &[Rat], s: &Rat) -> Vec<Rat> {
    a.iter().map(|c| c * s).collect()
}

/// Exact integral over t in [0, 1].
fn poly1_integral_01(a: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, c) in a.iter().enumerate() {
        acc += c / rat_i(i as i64 + 1);
    }
    acc
}

/// A polynomial differential form: either a 1-form `f dx + g dy` or a
/// 2-form `h dx^dy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyForm {
    One { f: Poly2, g: Poly2 },
    Two { h: Poly2 },
}

impl PolyForm {
    pub fn one(f: Poly2, g: Poly2) -> Self {
        PolyForm::One { f, g }
    }

    pub fn two(h: Poly2) -> Self {
        PolyForm::Two { h }
    }

    pub fn degree(&self) -> usize {
        match self {
            PolyForm::One { f, g } => f.degree().max(g.degree()),
            PolyForm::Two { h } => h.degree(),
        }
    }

    /// Exterior derivative of a 1-form: `(dg/dx - df/dy) dx^dy`.
    pub fn d(&self) -> Result<PolyForm, GeomError> {
        match self {
            PolyForm::One { f, g } => {
                let gx = g.dx();
                let fy = f.dy();
                let mut coeffs = poly2_sub(&gx, &fy);
                trim(&mut coeffs);
                Ok(PolyForm::Two { h: Poly2 { coeffs } })
            }
            PolyForm::Two { .. } => Err(GeomError::DimensionMismatch("exterior derivative of a 2-form vanishes in the plane".into())),
        }
    }

    /// Random 1-form for Stokes-style property tests.
    pub fn random_one<R: Rng>(rng: &mut R, max_deg: usize) -> PolyForm {
        PolyForm::One {
            f: Poly2::random(rng, max_deg),
            g: Poly2::random(rng, max_deg),
        }
    }
}

fn poly2_sub(a: &Poly2, b: &Poly2) -> Vec<Vec<Rat>> {
    let rows = a.coeffs.len().max(b.coeffs.len());
    let cols = a
        .coeffs
        .iter()
        .chain(b.coeffs.iter())
        .map(|r| r.len())
        .max()
        .unwrap_or(1);
    let mut out = vec![vec![Rat::zero(); cols]; rows];
    for (i, row) in a.coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            out[i][j] += c;
        }
    }
    for (i, row) in b.coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            out[i][j] -= c;
        }
    }
    out
}

fn trim(coeffs: &mut Vec<Vec<Rat>>) {
    while coeffs.len() > 1 && coeffs.last().unwrap().iter().all(|c| c.is_zero()) {
        coeffs.pop();
    }
}

/// Exact line integral of a 1-form over a PL 1-current.
pub fn pair_curve(current: &PLCurrent, form: &PolyForm) -> Result<Rat, GeomError> {
    let (f, g) = match form {
        PolyForm::One { f, g } => (f, g),
        PolyForm::Two { .. } => {
            return Err(GeomError::DimensionMismatch("2-form paired with a 1-current".into()));
        }
    };
    let mut acc = Rat::zero();
    for s in &current.segments {
        acc += rat_i(s.mult) * segment_integral(f, g, &s.a, &s.b);
    }
    Ok(acc)
}

fn segment_integral(f: &Poly2, g: &Poly2, a: &Point, b: &Point) -> Rat {
    let dx = &b.x - &a.x;
    let dy = &b.y - &a.y;
    let ft = f.on_segment(a, b);
    let gt = g.on_segment(a, b);
    poly1_integral_01(&ft) * dx + poly1_integral_01(&gt) * dy
}

/// Exact area integral of a 2-form over a PL 2-current, via Green's theorem:
/// with H the x-antiderivative of h, the integral over the region equals the
/// boundary integral of `H dy`.
pub fn pair_region(region: &PLRegion, form: &PolyForm) -> Result<Rat, GeomError> {
    let h = match form {
        PolyForm::Two { h } => h,
        PolyForm::One { .. } => {
            return Err(GeomError::DimensionMismatch("1-form paired with a 2-current".into()));
        }
    };
    let big_h = h.integrate_x();
    let zero = Poly2::zero();
    let mut acc = Rat::zero();
    for (poly, mult) in &region.polygons {
        let n = poly.len();
        let mut edge_sum = Rat::zero();
        for i in 0..n {
            edge_sum += segment_integral(&zero, &big_h, &poly[i], &poly[(i + 1) % n]);
        }
        acc += rat_i(*mult) * edge_sum;
    }
    Ok(acc)
}

/// Exact area integral of a 2-form over one traversed polygon (multiplicity 1),
/// without the PLRegion simplicity validation. Used on overlay cells.
pub fn pair_polygon(poly: &[Point], form: &PolyForm) -> Result<Rat, GeomError> {
    let h = match form {
        PolyForm::Two { h } => h,
        PolyForm::One { .. } => {
            return Err(GeomError::DimensionMismatch("1-form paired with a polygon".into()));
        }
    };
    let big_h = h.integrate_x();
    let zero = Poly2::zero();
    let n = poly.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        acc += segment_integral(&zero, &big_h, &poly[i], &poly[(i + 1) % n]);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::current::Segment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    #[test]
    fn unit_displacement_pairs_to_one() {
        let c = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(1, 0), 1)]).unwrap();
        let form = PolyForm::one(Poly2::constant(rat_i(1)), Poly2::zero());
        assert_eq!(pair_curve(&c, &form).unwrap(), rat_i(1));
    }

    #[test]
    fn unit_square_area_pairs_to_one() {
        let sq = PLRegion::new(vec![(vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)], 1)]).unwrap();
        let form = PolyForm::two(Poly2::constant(rat_i(1)));
        assert_eq!(pair_region(&sq, &form).unwrap(), rat_i(1));
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let c = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(1, 0), 1)]).unwrap();
        let form = PolyForm::two(Poly2::constant(rat_i(1)));
        assert!(pair_curve(&c, &form).is_err());
    }

    #[test]
    fn stokes_exact_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let region = PLRegion::new(vec![
            (vec![pt(0, 0), pt(3, 1), pt(2, 3), pt(-1, 2)], 2),
            (vec![pt(5, 5), pt(7, 5), pt(6, 8)], -1),
        ])
        .unwrap();
        for _ in 0..20 {
            let psi = PolyForm::random_one(&mut rng, DEFAULT_FORM_DEGREE);
            let lhs = pair_curve(&region.boundary(), &psi).unwrap();
            let rhs = pair_region(&region, &psi.d().unwrap()).unwrap();
            assert_eq!(lhs, rhs, "Stokes identity must hold exactly");
        }
    }

    #[test]
    fn pairing_linear_in_multiplicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = PolyForm::random_one(&mut rng, 3);
        let c1 = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(2, 1), 1)]).unwrap();
        let c3 = PLCurrent::new(vec![Segment::new(pt(0, 0), pt(2, 1), 3)]).unwrap();
        assert_eq!(pair_curve(&c3, &psi).unwrap(), pair_curve(&c1, &psi).unwrap() * rat_i(3));
    }

    #[test]
    fn derivative_of_known_form() {
        // d(x^2 y dx + x y dy) = (y - x^2) dx^dy
        let f = Poly2::monomial(rat_i(1), 2, 1);
        let g = Poly2::monomial(rat_i(1), 1, 1);
        let d = PolyForm::one(f, g).d().unwrap();
        match d {
            PolyForm::Two { h } => {
                assert_eq!(h.eval(&rat_i(2), &rat_i(3)), rat_i(3 - 4));
            }
            _ => unreachable!(),
        }
    }
}
