//! Exact primal simplex for totally unimodular equality systems.
//!
//! The constraint matrix columns live in {-1, 0, +1} and every basis is a
//! nonsingular submatrix of a TU matrix, so the entire tableau stays in
//! {-1, 0, +1}, every pivot element is ±1, and basic solutions stay integral.
//! Costs are exact scaled integers, so pricing and optimality are exact
//! integer arithmetic with no divisions anywhere.
//!
//! Anti-cycling is Bland's rule: entering column is the lowest index with a
//! negative reduced cost, leaving row breaks ratio ties by the lowest basic
//! column index. The basis inverse is kept in product form (eta file).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("objective unbounded below (entering column {0} has no positive tableau entry)")]
    Unbounded(usize),
    #[error("iteration guard tripped after {0} pivots")]
    IterationGuard(usize),
    #[error("tableau entry out of {{-1,0,1}}: the system is not totally unimodular")]
    NotTotallyUnimodular,
    #[error("invalid problem: {0}")]
    Invalid(String),
}

/// A sparse column with entries in {-1, 0, +1}.
#[derive(Clone, Debug, Default)]
pub struct SparseCol {
    pub entries: Vec<(u32, i8)>,
}

struct Eta {
    pivot_row: u32,
    /// The FTRAN'd entering column at pivot time; includes the pivot entry.
    col: Vec<(u32, i8)>,
}

/// Result of a solved LP.
pub struct SimplexSolution {
    /// Value of every structural variable at the optimum.
    pub values: Vec<i64>,
    pub iterations: usize,
}

/// Minimize `costs . v` subject to `A v = rhs`, `v >= 0`, where column `j`
/// of A is `cols[j]`. `initial_basis[r]` must name a singleton ±1 column
/// with its entry in row `r` and sign matching `rhs[r]`'s sign (so the
/// start is primal feasible).
pub fn solve_tu_lp(
    cols: &[SparseCol],
    costs: &[i128],
    rhs: &[i64],
    initial_basis: &[usize],
) -> Result<SimplexSolution, SimplexError> {
    let m = rhs.len();
    let n = cols.len();
    if costs.len() != n {
        return Err(SimplexError::Invalid("costs/columns length mismatch".into()));
    }
    if initial_basis.len() != m {
        return Err(SimplexError::Invalid("initial basis size mismatch".into()));
    }

    // Initial basis signs: B = diag(signs).
    let mut basis: Vec<usize> = initial_basis.to_vec();
    let mut in_basis = vec![false; n];
    let mut init_sign = vec![0i8; m];
    let mut x_b = vec![0i64; m];
    for r in 0..m {
        let j = basis[r];
        let col = &cols[j];
        if col.entries.len() != 1 || col.entries[0].0 as usize != r {
            return Err(SimplexError::Invalid(format!("initial basis column {j} is not a unit column for row {r}")));
        }
        let s = col.entries[0].1;
        init_sign[r] = s;
        x_b[r] = rhs[r] * s as i64;
        if x_b[r] < 0 {
            return Err(SimplexError::Invalid(format!("initial basis infeasible in row {r}")));
        }
        in_basis[j] = true;
    }

    // Duals y = c_B B^-1; for the diagonal start y_r = c_{B(r)} * sign_r.
    let mut y: Vec<i128> = (0..m).map(|r| costs[basis[r]] * init_sign[r] as i128).collect();

    let mut etas: Vec<Eta> = Vec::new();
    // Dense scratch vectors with touched lists.
    let mut scratch = vec![0i8; m];
    let mut touched: Vec<u32> = Vec::new();
    let mut row_scratch = vec![0i64; m];

    let reduced_cost = |j: usize, y: &[i128]| -> i128 {
        let mut d = costs[j];
        for &(r, s) in &cols[j].entries {
            d -= y[r as usize] * s as i128;
        }
        d
    };

    const MAX_ITER: usize = 40_000_000;
    let mut iterations = 0usize;
    loop {
        // Bland entering rule: lowest index with negative reduced cost.
        let mut entering = None;
        for j in 0..n {
            if !in_basis[j] && reduced_cost(j, &y) < 0 {
                entering = Some(j);
                break;
            }
        }
        let Some(q) = entering else {
            break;
        };
        let d_q = reduced_cost(q, &y);

        // FTRAN: alpha = B^-1 A_q, entries stay in {-1, 0, +1}.
        for &t in &touched {
            scratch[t as usize] = 0;
        }
        touched.clear();
        for &(r, s) in &cols[q].entries {
            // B_0^-1 = diag(init_sign)
            let v = s * init_sign[r as usize];
            if scratch[r as usize] == 0 && v != 0 {
                touched.push(r);
            }
            scratch[r as usize] = v;
        }
        for eta in &etas {
            let p = eta.pivot_row as usize;
            let vp = scratch[p];
            if vp == 0 {
                continue;
            }
            // E^-1 v: v_p' = v_p / alpha_p ; v_i' = v_i - alpha_i * v_p'.
            let alpha_p = eta.col.iter().find(|(r, _)| *r as usize == p).map(|(_, s)| *s).unwrap();
            let vp_new = vp * alpha_p; // alpha_p in {1,-1}: division == multiplication
            scratch[p] = vp_new;
            for &(r, s) in &eta.col {
                let r_us = r as usize;
                if r_us == p {
                    continue;
                }
                let old = scratch[r_us];
                let newv = old - s * vp_new;
                if !(-1..=1).contains(&newv) {
                    return Err(SimplexError::NotTotallyUnimodular);
                }
                if old == 0 && newv != 0 {
                    touched.push(r);
                }
                scratch[r_us] = newv;
            }
        }

        // Ratio test: candidates have alpha_r = +1, ratio = x_b[r].
        let mut theta: Option<i64> = None;
        let mut leave_row: Option<usize> = None;
        for &r in &touched {
            let r = r as usize;
            if scratch[r] == 1 {
                let ratio = x_b[r];
                let better = match theta {
                    None => true,
                    Some(t) => ratio < t || (ratio == t && basis[r] < basis[leave_row.unwrap()]),
                };
                if better {
                    theta = Some(ratio);
                    leave_row = Some(r);
                }
            }
        }
        let Some(rl) = leave_row else {
            return Err(SimplexError::Unbounded(q));
        };
        let theta = theta.unwrap();

        // Primal update.
        if theta != 0 {
            for &r in &touched {
                let r = r as usize;
                x_b[r] -= theta * scratch[r] as i64;
            }
        }
        x_b[rl] = theta;

        // Dual update: y += d_q * (row rl of B^-1)  (pivot is +1).
        // BTRAN e_rl through the eta file, then through B_0^-1.
        for v in row_scratch.iter_mut() {
            *v = 0;
        }
        row_scratch[rl] = 1;
        for eta in etas.iter().rev() {
            let p = eta.pivot_row as usize;
            // w_p' = (w_p - sum_{i != p} w_i alpha_i) / alpha_p
            let mut acc: i64 = 0;
            let mut alpha_p = 1i8;
            for &(r, s) in &eta.col {
                let r_us = r as usize;
                if r_us == p {
                    alpha_p = s;
                } else {
                    acc += row_scratch[r_us] * s as i64;
                }
            }
            row_scratch[p] = (row_scratch[p] - acc) * alpha_p as i64;
        }
        for (r, v) in row_scratch.iter_mut().enumerate() {
            *v *= init_sign[r] as i64;
        }
        for (r, v) in row_scratch.iter().enumerate() {
            if *v != 0 {
                y[r] += d_q * *v as i128;
            }
        }

        // Record the eta and swap basis members.
        etas.push(Eta {
            pivot_row: rl as u32,
            col: touched.iter().map(|&r| (r, scratch[r as usize])).filter(|(_, s)| *s != 0).collect(),
        });
        in_basis[basis[rl]] = false;
        in_basis[q] = true;
        basis[rl] = q;

        iterations += 1;
        if iterations >= MAX_ITER {
            return Err(SimplexError::IterationGuard(iterations));
        }
    }

    // Exact optimality audit: every reduced cost nonnegative.
    debug_assert!((0..n).all(|j| in_basis[j] || reduced_cost(j, &y) >= 0));

    let mut values = vec![0i64; n];
    for r in 0..m {
        values[basis[r]] = x_b[r];
    }
    Ok(SimplexSolution { values, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Assemble the [I | -I | C | -C] column structure used by the flat
    /// norm problems: unit columns first, then the given extra columns.
    fn build_cols(m: usize, extra: &[Vec<(u32, i8)>]) -> Vec<SparseCol> {
        let mut cols = Vec::new();
        for r in 0..m {
            cols.push(SparseCol { entries: vec![(r as u32, 1)] });
        }
        for r in 0..m {
            cols.push(SparseCol { entries: vec![(r as u32, -1)] });
        }
        for e in extra {
            cols.push(SparseCol { entries: e.clone() });
            cols.push(SparseCol {
                entries: e.iter().map(|&(r, s)| (r, -s)).collect(),
            });
        }
        cols
    }

    fn initial_basis(m: usize, rhs: &[i64]) -> Vec<usize> {
        (0..m).map(|r| if rhs[r] >= 0 { r } else { m + r }).collect()
    }

    #[test]
    fn identity_start_already_optimal() {
        // min |x| with x = b and no alternatives: value = b.
        let cols = build_cols(2, &[]);
        let costs = vec![10, 10, 10, 10];
        let rhs = vec![3, -4];
        let sol = solve_tu_lp(&cols, &costs, &rhs, &initial_basis(2, &rhs)).unwrap();
        assert_eq!(&sol.values, &[3, 0, 0, 4]);
    }

    #[test]
    fn cheap_triangle_column_wins() {
        // Rows = 3 edges of a triangle boundary; one "triangle" column with
        // all +1 entries costs less than paying for the three edges.
        let extra = vec![vec![(0u32, 1i8), (1, 1), (2, 1)]];
        let cols = build_cols(3, &extra);
        // edge cost 10 each, triangle cost 5.
        let costs = vec![10, 10, 10, 10, 10, 10, 5, 5];
        let rhs = vec![1, 1, 1];
        let sol = solve_tu_lp(&cols, &costs, &rhs, &initial_basis(3, &rhs)).unwrap();
        assert_eq!(sol.values[6], 1, "triangle column should carry the solution");
        assert_eq!(sol.values[..6].iter().sum::<i64>(), 0);
    }

    #[test]
    fn expensive_triangle_column_ignored() {
        let extra = vec![vec![(0u32, 1i8), (1, 1), (2, 1)]];
        let cols = build_cols(3, &extra);
        let costs = vec![10, 10, 10, 10, 10, 10, 500, 500];
        let rhs = vec![1, 1, 1];
        let sol = solve_tu_lp(&cols, &costs, &rhs, &initial_basis(3, &rhs)).unwrap();
        assert_eq!(&sol.values[..3], &[1, 1, 1]);
        assert_eq!(sol.values[6], 0);
    }

    #[test]
    fn mixed_signs_and_cancellation() {
        // rhs with negatives; optimal uses the signed triangle column.
        let extra = vec![vec![(0u32, 1i8), (1, -1), (2, 1)]];
        let cols = build_cols(3, &extra);
        let costs = vec![7, 9, 11, 7, 9, 11, 3, 3];
        let rhs = vec![2, -2, 2];
        let sol = solve_tu_lp(&cols, &costs, &rhs, &initial_basis(3, &rhs)).unwrap();
        // Using the extra column twice clears everything at cost 6 < 2*(7+9+11).
        assert_eq!(sol.values[6], 2);
    }

    #[test]
    fn duals_stay_consistent_on_random_problems() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let m = rng.gen_range(2..7);
            let ncols = rng.gen_range(1..4);
            // Random "path" columns: contiguous runs with alternating signs
            // stay TU together with the identity columns (interval matrices).
            let mut extra = Vec::new();
            for _ in 0..ncols {
                let lo = rng.gen_range(0..m);
                let hi = rng.gen_range(lo..m);
                let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
                extra.push((lo..=hi).map(|r| (r as u32, sign)).collect::<Vec<_>>());
            }
            let cols = build_cols(m, &extra);
            let costs: Vec<i128> = (0..cols.len()).map(|_| rng.gen_range(0..100) as i128).collect();
            let rhs: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let sol = solve_tu_lp(&cols, &costs, &rhs, &initial_basis(m, &rhs)).unwrap();
            // Feasibility: A v = rhs.
            let mut lhs = vec![0i64; m];
            for (j, col) in cols.iter().enumerate() {
                for &(r, s) in &col.entries {
                    lhs[r as usize] += sol.values[j] * s as i64;
                }
            }
            assert_eq!(lhs, rhs);
            // Optimality vs brute force over the extra columns' net usage.
            let brute = brute_force_min(&cols, &costs, &rhs, m);
            let got: i128 = sol.values.iter().zip(&costs).map(|(v, c)| *v as i128 * c).sum();
            assert_eq!(got, brute, "simplex value must match brute force");
        }
    }

    /// Brute force: enumerate net values of the non-identity column pairs,
    /// fill the rest with the identity columns. Vertex solutions of the TU
    /// system are bounded by m * max|rhs|, so the window covers the optimum.
    fn brute_force_min(cols: &[SparseCol], costs: &[i128], rhs: &[i64], m: usize) -> i128 {
        let nextra = (cols.len() - 2 * m) / 2;
        let mut best = i128::MAX;
        let mut assign = vec![0i64; nextra];
        fn rec(
            k: usize,
            assign: &mut Vec<i64>,
            cols: &[SparseCol],
            costs: &[i128],
            rhs: &[i64],
            m: usize,
            best: &mut i128,
        ) {
            if k == assign.len() {
                let mut resid: Vec<i64> = rhs.to_vec();
                let mut cost: i128 = 0;
                for (i, &v) in assign.iter().enumerate() {
                    let jplus = 2 * m + 2 * i;
                    for &(r, s) in &cols[jplus].entries {
                        resid[r as usize] -= v * s as i64;
                    }
                    cost += v.unsigned_abs() as i128 * costs[if v >= 0 { jplus } else { jplus + 1 }];
                }
                for (r, &x) in resid.iter().enumerate() {
                    cost += x.unsigned_abs() as i128 * costs[if x >= 0 { r } else { m + r }];
                }
                *best = (*best).min(cost);
                return;
            }
            for v in -18..=18i64 {
                assign[k] = v;
                rec(k + 1, assign, cols, costs, rhs, m, best);
            }
        }
        rec(0, &mut assign, cols, costs, rhs, m, &mut best);
        best
    }
}
