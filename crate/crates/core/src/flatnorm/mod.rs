//! The simplicial flat norm with scale as an exact linear program.
//!
//! `F_K(t; λ) = min { M(x) + λ M(s) : t = x + ∂s, x, s chains on K }`,
//! solved in split-variable standard form. The constraint matrix
//! `[I, -I, ∂, -∂]` is totally unimodular, so the optimal basic solution is
//! integral whenever `t` is — that integrality is certified, not assumed.
//! Objective weights are rational approximations of lengths and areas
//! (tolerance 1e-12); approximating weights cannot break integrality because
//! vertex integrality depends only on the constraint matrix.

pub mod oracle;
pub mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::{Chain, Complex2};
use crate::rat::{round_to_int, to_f64, Rat};
use simplex::{SimplexError, SparseCol};

/// Weight denominator: lengths and areas are rounded to this dyadic grid,
/// an absolute tolerance of 2^-49 (far below the 1e-12 contract).
pub const WEIGHT_BITS: u32 = 48;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("chain is not integral: {0}")]
    NonIntegralChain(String),
    #[error("negative scale parameter {0}")]
    NegativeLambda(String),
    #[error("chain dimension {0} not supported by this formulation")]
    BadDimension(u8),
    #[error("coefficient overflow: {0}")]
    Overflow(String),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("internal: {0}")]
    Internal(String),
}

/// The flat norm LP in standard form, ready to solve.
pub struct LPProblem {
    /// Dimension d of the input chain (0 or 1).
    pub dim: u8,
    pub lambda: Rat,
    /// Rational weights of the d-simplices (the `x` variables).
    pub x_weights: Vec<Rat>,
    /// Rational weights of the (d+1)-simplices (the `s` variables),
    /// without the λ factor.
    pub s_weights: Vec<Rat>,
    /// The input chain as a dense integer vector over d-simplices.
    pub rhs: Vec<i64>,
    cols: Vec<SparseCol>,
    costs: Vec<i128>,
    /// Common denominator of all costs: 2^WEIGHT_BITS * denom(λ).
    cost_den: BigInt,
}

impl LPProblem {
    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_variables(&self) -> usize {
        self.cols.len()
    }
}

/// Optimal decomposition `t = x + ∂s` with certificates.
#[derive(Clone, Debug)]
pub struct FlatNormResult {
    pub lambda: Rat,
    /// Optimal value under the approximated rational weights, exact.
    pub value: Rat,
    pub value_f64: f64,
    pub x: Chain,
    pub s: Chain,
    /// All solution coefficients exactly integral (certificate, re-checked).
    pub integral: bool,
    /// `t = x + ∂s` verified in integer arithmetic.
    pub residual_ok: bool,
    /// Simplex pivot count (basis diagnostics).
    pub iterations: usize,
}

/// Scaled-integer weight of a squared length: round(sqrt(norm2) * 2^48).
/// Exact when the length is rational; otherwise within one ulp of the f64
/// square root, far inside the 1e-12 tolerance.
fn length_weight(norm2: &Rat) -> BigInt {
    let num = norm2.numer();
    let den = norm2.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        let len = Rat::new(sn, sd);
        return round_to_int(&(len * Rat::from_integer(BigInt::one() << WEIGHT_BITS)));
    }
    let len = crate::rat::sqrt_f64(norm2);
    let scaled = len * (1u64 << WEIGHT_BITS) as f64;
    BigInt::from(scaled.round() as i128)
}

/// Scaled-integer weight of an exact rational area.
fn area_weight(area: &Rat) -> BigInt {
    round_to_int(&(area * Rat::from_integer(BigInt::one() << WEIGHT_BITS)))
}

fn to_i128(b: &BigInt, what: &str) -> Result<i128, LpError> {
    b.to_i128().ok_or_else(|| LpError::Overflow(what.to_string()))
}

/// Build the LP for a d-chain on K (d = 1 for the flat norm of 1-currents,
/// d = 0 for the vertex-level norm used by boundary-commutation checks).
pub fn formulate(t: &Chain, k: &Complex2, lambda: &Rat) -> Result<LPProblem, LpError> {
    if lambda.is_negative() {
        return Err(LpError::NegativeLambda(lambda.to_string()));
    }
    if t.dim > 1 {
        return Err(LpError::BadDimension(t.dim));
    }
    if !t.is_integral() {
        return Err(LpError::NonIntegralChain(
            "integrality certificates are undefined for fractional inputs".into(),
        ));
    }
    let d = t.dim;
    let (num_x, num_s) = match d {
        0 => (k.vertices().len(), k.edges().len()),
        1 => (k.edges().len(), k.triangles().len()),
        _ => unreachable!(),
    };
    // Mass weights.
    let x_weights: Vec<Rat> = match d {
        0 => vec![Rat::one(); num_x],
        _ => (0..num_x)
            .map(|e| {
                let w = length_weight(&k.edge_norm2(e));
                Rat::new(w, BigInt::one() << WEIGHT_BITS)
            })
            .collect(),
    };
    let s_weights: Vec<Rat> = match d {
        0 => (0..num_s)
            .map(|e| Rat::new(length_weight(&k.edge_norm2(e)), BigInt::one() << WEIGHT_BITS))
            .collect(),
        _ => (0..num_s)
            .map(|t| Rat::new(area_weight(&k.triangle_area(t)), BigInt::one() << WEIGHT_BITS))
            .collect(),
    };

    let mut rhs = vec![0i64; num_x];
    for (&i, c) in &t.coeffs {
        if i >= num_x {
            return Err(LpError::Internal(format!("chain index {i} out of range")));
        }
        let v = c.to_integer();
        rhs[i] = to_i128(&v, "chain coefficient")? as i64;
    }

    // Costs on the common denominator 2^48 * denom(λ).
    let lam_num = lambda.numer().clone();
    let lam_den = lambda.denom().clone();
    let mut costs: Vec<i128> = Vec::with_capacity(2 * num_x + 2 * num_s);
    let mut cols: Vec<SparseCol> = Vec::with_capacity(2 * num_x + 2 * num_s);
    for sign in [1i8, -1i8] {
        for r in 0..num_x {
            cols.push(SparseCol { entries: vec![(r as u32, sign)] });
            let w = (&x_weights[r] * Rat::from_integer(BigInt::one() << WEIGHT_BITS)).to_integer() * &lam_den;
            costs.push(to_i128(&w, "edge cost")?);
        }
    }
    let boundary = k.boundary_matrix(d + 1);
    for sign in [1i8, -1i8] {
        for c in 0..num_s {
            let entries = boundary.col_entries[c]
                .iter()
                .map(|&(r, s)| (r as u32, s * sign))
                .collect();
            cols.push(SparseCol { entries });
            let w = (&s_weights[c] * Rat::from_integer(BigInt::one() << WEIGHT_BITS)).to_integer() * &lam_num;
            costs.push(to_i128(&w, "simplex cost")?);
        }
    }

    Ok(LPProblem {
        dim: d,
        lambda: lambda.clone(),
        x_weights,
        s_weights,
        rhs,
        cols,
        costs,
        cost_den: (BigInt::one() << WEIGHT_BITS) * lam_den,
    })
}

/// Solve a formulated problem to a certified optimal basic solution.
pub fn solve(problem: &LPProblem) -> Result<FlatNormResult, LpError> {
    let m = problem.rhs.len();
    let initial: Vec<usize> = (0..m)
        .map(|r| if problem.rhs[r] >= 0 { r } else { m + r })
        .collect();
    let sol = simplex::solve_tu_lp(&problem.cols, &problem.costs, &problem.rhs, &initial)?;

    let num_x = m;
    let num_s = problem.s_weights.len();
    let mut x = Chain::zero(problem.dim);
    for e in 0..num_x {
        let v = sol.values[e] - sol.values[num_x + e];
        if v != 0 {
            x.set(e, Rat::from_integer(v.into()));
        }
    }
    let mut s = Chain::zero(problem.dim + 1);
    for c in 0..num_s {
        let v = sol.values[2 * num_x + c] - sol.values[2 * num_x + num_s + c];
        if v != 0 {
            s.set(c, Rat::from_integer(v.into()));
        }
    }

    // Residual in pure integer arithmetic: t - x - ∂s = 0.
    let mut resid: Vec<i64> = problem.rhs.clone();
    for (j, col) in problem.cols.iter().enumerate() {
        if sol.values[j] != 0 {
            for &(r, sg) in &col.entries {
                resid[r as usize] -= sol.values[j] * sg as i64;
            }
        }
    }
    let residual_ok = resid.iter().all(|&v| v == 0);

    // Exact objective value under the approximated weights.
    let mut num = BigInt::zero();
    for (j, &v) in sol.values.iter().enumerate() {
        if v != 0 {
            num += BigInt::from(problem.costs[j]) * BigInt::from(v);
        }
    }
    let value = Rat::new(num, problem.cost_den.clone());
    let value_f64 = to_f64(&value);
    let integral = x.is_integral() && s.is_integral();

    Ok(FlatNormResult {
        lambda: problem.lambda.clone(),
        value,
        value_f64,
        x,
        s,
        integral,
        residual_ok,
        iterations: sol.iterations,
    })
}

/// Formulate, solve, and independently re-verify `t = x + ∂s` against the
/// complex's boundary matrix.
pub fn flat_norm_decompose(t: &Chain, k: &Complex2, lambda: &Rat) -> Result<FlatNormResult, LpError> {
    let problem = formulate(t, k, lambda)?;
    let mut result = solve(&problem)?;
    let recomposed = result.x.add(&k.apply_boundary(&result.s));
    if &recomposed != t {
        result.residual_ok = false;
        return Err(LpError::Internal("t = x + ∂s failed exact recheck".into()));
    }
    Ok(result)
}

/// Flat distance between two chains on the same complex.
pub fn simplicial_flat_distance(t1: &Chain, t2: &Chain, k: &Complex2, lambda: &Rat) -> Result<FlatNormResult, LpError> {
    flat_norm_decompose(&t1.sub(t2), k, lambda)
}

/// One sweep row.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub lambda: Rat,
    pub result: FlatNormResult,
    pub x_mass: f64,
    pub s_mass: f64,
}

/// Sweep outcome: per-λ results plus detected support-change thresholds.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// (λ_lo, λ_hi) intervals between which the optimal support changed.
    pub thresholds: Vec<(Rat, Rat)>,
    /// Value nondecreasing in λ.
    pub monotone_value: bool,
    /// mass(s) nonincreasing in λ.
    pub monotone_s_mass: bool,
    /// Discrete concavity of value(λ) (pointwise min of linear functions).
    pub concave_value: bool,
}

/// Solve across an ascending λ grid and flag where the optimal support moves.
pub fn sweep(t: &Chain, k: &Complex2, lambdas: &[Rat]) -> Result<SweepResult, LpError> {
    if lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(LpError::Internal("lambda list must be ascending".into()));
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(lambdas.len());
    for lam in lambdas {
        let result = flat_norm_decompose(t, k, lam)?;
        rows.push(SweepRow {
            lambda: lam.clone(),
            x_mass: k.chain_mass(&result.x),
            s_mass: k.chain_mass(&result.s),
            result,
        });
    }
    let mut thresholds = Vec::new();
    for w in rows.windows(2) {
        let support = |r: &SweepRow| {
            (
                r.result.x.coeffs.keys().cloned().collect::<Vec<_>>(),
                r.result.s.coeffs.keys().cloned().collect::<Vec<_>>(),
            )
        };
        if support(&w[0]) != support(&w[1]) {
            thresholds.push((w[0].lambda.clone(), w[1].lambda.clone()));
        }
    }
    let monotone_value = rows.windows(2).all(|w| w[0].result.value <= w[1].result.value);
    let monotone_s_mass = rows
        .windows(2)
        .all(|w| w[0].s_mass >= w[1].s_mass - 1e-9 * (1.0 + w[0].s_mass.abs()));
    // value(λ) is a pointwise min of affine functions of λ, hence concave.
    let mut concave_value = true;
    for w in rows.windows(3) {
        let (l0, l1, l2) = (to_f64(&w[0].lambda), to_f64(&w[1].lambda), to_f64(&w[2].lambda));
        let (v0, v1, v2) = (w[0].result.value_f64, w[1].result.value_f64, w[2].result.value_f64);
        if l2 > l0 {
            let interp = v0 + (v2 - v0) * (l1 - l0) / (l2 - l0);
            if v1 < interp - 1e-9 * (1.0 + v1.abs()) {
                concave_value = false;
            }
        }
    }
    Ok(SweepResult {
        rows,
        thresholds,
        monotone_value,
        monotone_s_mass,
        concave_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point::Point;
    use crate::rat::{rat, rat_i};

    fn near_equilateral() -> (Complex2, Chain) {
        let h = crate::rat::rational_approx(3f64.sqrt() / 2.0, 10_000_000);
        let k = Complex2::build(
            vec![Point::from_i64(0, 0), Point::from_i64(1, 0), Point::new(rat(1, 2), h)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let t = k.apply_boundary(&Chain::from_integers(2, [(0, 1)]));
        (k, t)
    }

    #[test]
    fn formulate_counts() {
        let (k, t) = near_equilateral();
        let p = formulate(&t, &k, &rat_i(1)).unwrap();
        assert_eq!(p.num_constraints(), 3);
        assert_eq!(p.num_variables(), 8);
    }

    #[test]
    fn triangle_boundary_fills_at_lambda_one() {
        let (k, t) = near_equilateral();
        let r = flat_norm_decompose(&t, &k, &rat_i(1)).unwrap();
        assert!(r.integral && r.residual_ok);
        assert!(r.x.is_zero(), "x should vanish, filling is cheap");
        assert_eq!(r.s.coeffs.len(), 1);
        let area = 3f64.sqrt() / 4.0;
        assert!((r.value_f64 - area).abs() < 1e-9, "value {} vs {}", r.value_f64, area);
    }

    #[test]
    fn triangle_boundary_keeps_at_lambda_ten() {
        let (k, t) = near_equilateral();
        let r = flat_norm_decompose(&t, &k, &rat_i(10)).unwrap();
        assert!(r.s.is_zero());
        assert_eq!(r.x, t);
        assert!((r.value_f64 - 3.0).abs() < 1e-9);
    }

    #[test]
    fn triangle_threshold_at_4_sqrt3() {
        // Both decompositions tie at λ* = 3 / (sqrt(3)/4) = 4 sqrt(3).
        let (k, t) = near_equilateral();
        let lam_star = crate::rat::rational_approx(4.0 * 3f64.sqrt(), 10_000_000);
        let below = flat_norm_decompose(&t, &k, &(lam_star.clone() * rat(99, 100))).unwrap();
        let above = flat_norm_decompose(&t, &k, &(lam_star.clone() * rat(101, 100))).unwrap();
        assert!(!below.s.is_zero());
        assert!(above.s.is_zero());
        let at = flat_norm_decompose(&t, &k, &lam_star).unwrap();
        assert!((at.value_f64 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn zero_chain_is_free() {
        let (k, _) = near_equilateral();
        let r = flat_norm_decompose(&Chain::zero(1), &k, &rat_i(1)).unwrap();
        assert!(r.value.is_zero() && r.x.is_zero() && r.s.is_zero());
    }

    #[test]
    fn lambda_zero_remains_bounded() {
        let (k, t) = near_equilateral();
        let r = flat_norm_decompose(&t, &k, &rat_i(0)).unwrap();
        assert!(r.value.is_zero());
        assert!(r.x.is_zero());
    }

    #[test]
    fn non_integral_chain_rejected() {
        let (k, _) = near_equilateral();
        let mut t = Chain::zero(1);
        t.set(0, rat(1, 2));
        assert!(matches!(formulate(&t, &k, &rat_i(1)), Err(LpError::NonIntegralChain(_))));
    }

    #[test]
    fn negative_lambda_rejected() {
        let (k, t) = near_equilateral();
        assert!(matches!(formulate(&t, &k, &rat_i(-1)), Err(LpError::NegativeLambda(_))));
    }

    #[test]
    fn sweep_detects_triangle_transition() {
        let (k, t) = near_equilateral();
        let lam_star = crate::rat::rational_approx(4.0 * 3f64.sqrt(), 1_000_000);
        let lams = vec![rat_i(1), lam_star, rat_i(10)];
        let sw = sweep(&t, &k, &lams).unwrap();
        assert!(sw.monotone_value && sw.monotone_s_mass && sw.concave_value);
        assert!(!sw.thresholds.is_empty());
        assert!(sw.rows[0].s_mass > 0.0 && sw.rows[2].s_mass == 0.0);
    }

    #[test]
    fn flat_distance_of_equal_chains_is_zero() {
        let (k, t) = near_equilateral();
        let r = simplicial_flat_distance(&t, &t, &k, &rat_i(1)).unwrap();
        assert!(r.value.is_zero());
    }

    #[test]
    fn distance_triangle_inequality_sampled() {
        // Two triangles sharing an edge; distances among three 1-chains.
        let k = Complex2::build(
            vec![
                Point::from_i64(0, 0),
                Point::from_i64(2, 0),
                Point::from_i64(1, 2),
                Point::from_i64(3, 2),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let chains = [
            Chain::from_integers(1, [(0, 1), (1, 1)]),
            Chain::from_integers(1, [(2, 1), (3, -1)]),
            Chain::from_integers(1, [(4, 1)]),
        ];
        let lam = rat_i(1);
        let d = |a: &Chain, b: &Chain| simplicial_flat_distance(a, b, &k, &lam).unwrap().value_f64;
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    assert!(d(&chains[i], &chains[l]) <= d(&chains[i], &chains[j]) + d(&chains[j], &chains[l]) + 1e-9);
                }
            }
        }
    }
}
