//! Exhaustive flat-norm oracle for small complexes.
//!
//! Enumerates every triangle chain s with coefficients in a window and takes
//! x = t - ∂s, evaluating the objective directly from the boundary matrix.
//! Deliberately independent of the simplex path: no shared solver state,
//! just the same rational weights converted once to f64.

use crate::complex::{Chain, Complex2};
use crate::rat::{to_f64, Rat};

/// Minimum objective over s in {-range..range}^T with x = t - ∂s forced.
/// Cost grows as (2·range+1)^T; callers keep T small (about 12).
pub fn brute_force_value(t: &Chain, k: &Complex2, lambda: &Rat, range: i64) -> f64 {
    assert_eq!(t.dim, 1, "oracle covers 1-chains");
    let num_e = k.edges().len();
    let num_t = k.triangles().len();
    let w_edge: Vec<f64> = (0..num_e).map(|e| crate::rat::sqrt_f64(&k.edge_norm2(e))).collect();
    let w_tri: Vec<f64> = (0..num_t).map(|t| to_f64(&k.triangle_area(t))).collect();
    let lam = to_f64(lambda);

    let mut resid: Vec<f64> = vec![0.0; num_e];
    for (&e, c) in &t.coeffs {
        resid[e] = to_f64(c);
    }
    let boundary = k.boundary_matrix(2);

    // DFS with incremental objective updates: edge_cost tracks Σ w|resid|,
    // tri_cost tracks λ Σ a|s|.
    let mut edge_cost: f64 = resid.iter().zip(&w_edge).map(|(r, w)| r.abs() * w).sum();
    let mut tri_cost = 0.0;
    let mut best = f64::INFINITY;
    let mut s = vec![0i64; num_t];

    fn rec(
        idx: usize,
        s: &mut [i64],
        resid: &mut [f64],
        edge_cost: &mut f64,
        tri_cost: &mut f64,
        best: &mut f64,
        k_boundary: &crate::complex::BoundaryMatrix,
        w_edge: &[f64],
        w_tri: &[f64],
        lam: f64,
        range: i64,
    ) {
        if idx == s.len() {
            let total = *edge_cost + *tri_cost;
            if total < *best {
                *best = total;
            }
            return;
        }
        // Try s[idx] = v for v in -range..=range, updating incrementally.
        let entries = &k_boundary.col_entries[idx];
        let apply = |delta: i64, resid: &mut [f64], edge_cost: &mut f64| {
            for &(e, sg) in entries {
                let old = resid[e];
                let new = old - delta as f64 * sg as f64;
                *edge_cost += (new.abs() - old.abs()) * w_edge[e];
                resid[e] = new;
            }
        };
        for v in -range..=range {
            let delta = v - s[idx];
            if delta != 0 {
                apply(delta, resid, edge_cost);
                *tri_cost += (v.abs() - s[idx].abs()) as f64 * lam * w_tri[idx];
                s[idx] = v;
            }
            rec(idx + 1, s, resid, edge_cost, tri_cost, best, k_boundary, w_edge, w_tri, lam, range);
        }
        // Restore s[idx] = 0.
        let delta = -s[idx];
        if delta != 0 {
            apply(delta, resid, edge_cost);
            *tri_cost -= s[idx].abs() as f64 * lam * w_tri[idx];
            s[idx] = 0;
        }
    }

    rec(
        0,
        &mut s,
        &mut resid,
        &mut edge_cost,
        &mut tri_cost,
        &mut best,
        boundary,
        &w_edge,
        &w_tri,
        lam,
        range,
    );
    best
}
