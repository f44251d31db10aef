//! Rank, conditioning and leverage of a design matrix.
//!
//! Up to `dense_limit` columns these come from a dense SVD. Beyond it the
//! exact integer Gram matrix `A^T A` is factored by pivoted Cholesky for the
//! rank, and `σ_min`, `σ_max` are found by inverse and direct power
//! iteration; leverage is not computed on that path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DesignError, DesignMatrix, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    Svd,
    Gram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub method: RankMethod,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    pub tolerance: f64,
    pub sigma_max: f64,
    /// Smallest nonzero singular value.
    pub sigma_min: f64,
    /// Spectral norm of the pseudoinverse, `1 / sigma_min`.
    pub pinv_norm: Option<f64>,
    pub condition: Option<f64>,
    /// Diagonal of the hat matrix, one entry per row.
    #[serde(skip, default)]
    pub leverage: Option<Vec<f64>>,
    /// Unidentifiable variable combinations, one per null vector.
    pub null_combinations: Vec<String>,
}

impl RankReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.columns
    }

    pub fn require_full_rank(&self) -> Result<(), DesignError> {
        if self.full_rank() {
            return Ok(());
        }
        const SHOWN: usize = 20;
        let mut combinations: Vec<String> = self.null_combinations.iter().take(SHOWN).cloned().collect();
        if self.null_combinations.len() > SHOWN {
            combinations.push(format!("... and {} more", self.null_combinations.len() - SHOWN));
        }
        Err(DesignError::RankDeficient { rank: self.rank, columns: self.columns, combinations: combinations.join("\n") })
    }
}

fn render_combination(a: &DesignMatrix, v: &[f64]) -> String {
    let top = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut terms: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > 1e-8 * top)
        .map(|(i, &x)| (i, x / top))
        .collect();
    terms.sort_by(|l, r| r.1.abs().total_cmp(&l.1.abs()).then(l.0.cmp(&r.0)));
    // fix the overall sign so the largest term is positive
    let flip = if terms.first().is_some_and(|t| t.1 < 0.0) { -1.0 } else { 1.0 };
    const TERMS: usize = 12;
    let mut text = terms
        .iter()
        .take(TERMS)
        .map(|&(i, x)| format!("{:+.4} [{}]", flip * x, a.columns()[i]))
        .collect::<Vec<_>>()
        .join(" ");
    if terms.len() > TERMS {
        text.push_str(&format!(" ... ({} smaller terms)", terms.len() - TERMS));
    }
    text
}

fn analyze_svd(a: &DesignMatrix) -> RankReport {
    let (m, n) = (a.row_count(), a.column_count());
    let mut dense = a.to_dense();
    if m < n {
        // pad so that the thin SVD still spans the whole column space
        dense = dense.resize_vertically(n, 0.0);
    }
    let svd = dense.svd(true, true);
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let tolerance = m.max(n) as f64 * f64::EPSILON * sigma_max;
    let kept: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > tolerance).collect();
    let rank = kept.len();
    let sigma_min = kept.iter().map(|&i| sigma[i]).fold(f64::INFINITY, f64::min);
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    let leverage = (0..m).map(|mu| kept.iter().map(|&i| u[(mu, i)].powi(2)).sum()).collect();
    let null_combinations = (0..sigma.len())
        .filter(|&i| sigma[i] <= tolerance)
        .map(|i| render_combination(a, v_t.row(i).transpose().as_slice()))
        .collect();
    RankReport {
        method: RankMethod::Svd,
        rows: m,
        columns: n,
        rank,
        tolerance,
        sigma_max,
        sigma_min: if rank > 0 { sigma_min } else { 0.0 },
        pinv_norm: (rank > 0).then(|| 1.0 / sigma_min),
        condition: (rank > 0).then(|| sigma_max / sigma_min),
        leverage: Some(leverage),
        null_combinations,
    }
}

/// Exact `A^T A`, row-major.
fn gram(a: &DesignMatrix) -> Vec<u32> {
    let n = a.column_count();
    let mut g = vec![0u32; n * n];
    for mu in 0..a.row_count() {
        let row = a.row(mu);
        for &(i, ki) in row {
            for &(j, kj) in row {
                g[i as usize * n + j as usize] += ki * kj;
            }
        }
    }
    g
}

/// Pivoted Cholesky `P^T G P = L L^T`, stopping once the largest remaining
/// pivot is at most `tol`. Returns the pivot order and `L` with row `i`
/// holding the factor row of pivot `i`.
struct PivotedCholesky {
    n: usize,
    rank: usize,
    perm: Vec<usize>,
    /// Row-major by original index; row `j` holds `L[j][0..rank]`.
    l: Vec<f64>,
}

fn pivoted_cholesky(g: &[u32], n: usize, tol: f64) -> PivotedCholesky {
    let mut l = vec![0.0f64; n * n];
    let mut diag: Vec<f64> = (0..n).map(|j| g[j * n + j] as f64).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut perm = Vec::with_capacity(n);
    let mut pivot_row = vec![0.0; n];
    for k in 0..n {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| diag[*x.1].total_cmp(&diag[*y.1]).then(y.0.cmp(&x.0)))
            .expect("remaining columns");
        if diag[p] <= tol {
            break;
        }
        remaining.swap_remove(pos);
        perm.push(p);
        let lpp = diag[p].sqrt();
        l[p * n + k] = lpp;
        pivot_row[..k].copy_from_slice(&l[p * n..p * n + k]);
        let grow = &g[p * n..p * n + n];
        let pr = &pivot_row[..k];
        let updates: Vec<(usize, f64)> = remaining
            .par_iter()
            .map(|&j| {
                let lj = &l[j * n..j * n + k];
                let dot: f64 = lj.iter().zip(pr).map(|(a, b)| a * b).sum();
                (j, (grow[j] as f64 - dot) / lpp)
            })
            .collect();
        for (j, v) in updates {
            l[j * n + k] = v;
            diag[j] -= v * v;
        }
    }
    let rank = perm.len();
    perm.extend(remaining);
    PivotedCholesky { n, rank, perm, l }
}

impl PivotedCholesky {
    fn at(&self, i: usize, t: usize) -> f64 {
        self.l[self.perm[i] * self.n + t]
    }

    /// Solve `L11 L11^T y = rhs` in pivot coordinates.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let r = self.rank;
        let mut z = rhs.to_vec();
        for i in 0..r {
            let s: f64 = (0..i).map(|t| self.at(i, t) * z[t]).sum();
            z[i] = (z[i] - s) / self.at(i, i);
        }
        for i in (0..r).rev() {
            z[i] /= self.at(i, i);
            let zi = z[i];
            for t in 0..i {
                z[t] -= self.at(i, t) * zi;
            }
        }
        z
    }
}

fn power_iteration(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
    let mut estimate = 0.0;
    for _ in 0..500 {
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let y = apply(&x);
        let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        x = y;
        if (next - estimate).abs() <= 1e-10 * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Relative pivot tolerance of the Gram path.
const GRAM_PIVOT_TOL: f64 = 1e-9;

fn factor_gram(a: &DesignMatrix) -> PivotedCholesky {
    let n = a.column_count();
    let g = gram(a);
    let max_diag = (0..n).map(|j| g[j * n + j]).max().unwrap_or(0) as f64;
    pivoted_cholesky(&g, n, GRAM_PIVOT_TOL * max_diag)
}

/// Rank from the pivoted Cholesky factorization of `A^T A`.
pub fn gram_rank(a: &DesignMatrix) -> usize {
    if a.column_count() == 0 {
        return 0;
    }
    factor_gram(a).rank
}

fn analyze_gram(a: &DesignMatrix) -> RankReport {
    let (m, n) = (a.row_count(), a.column_count());
    let chol = factor_gram(a);
    let rank = chol.rank;
    let sigma_max = power_iteration(n, |x| a.apply_transpose(&a.apply(x))).sqrt();
    // each unpivoted column is a combination of the pivoted ones
    let mut null_combinations = Vec::new();
    if rank < n {
        let g = gram(a);
        for &j in &chol.perm[rank..] {
            let rhs: Vec<f64> = chol.perm[..rank].iter().map(|&p| g[p * n + j] as f64).collect();
            let y = chol.solve(&rhs);
            let mut v = vec![0.0; n];
            for (i, &p) in chol.perm[..rank].iter().enumerate() {
                v[p] = -y[i];
            }
            v[j] = 1.0;
            null_combinations.push(render_combination(a, &v));
        }
    }
    let sigma_min = if rank == n && n > 0 {
        let inv_max = power_iteration(rank, |x| chol.solve(x));
        1.0 / inv_max.sqrt()
    } else {
        0.0
    };
    let full = rank == n && n > 0;
    RankReport {
        method: RankMethod::Gram,
        rows: m,
        columns: n,
        rank,
        tolerance: GRAM_PIVOT_TOL,
        sigma_max,
        sigma_min,
        pinv_norm: full.then(|| 1.0 / sigma_min),
        condition: full.then(|| sigma_max / sigma_min),
        leverage: None,
        null_combinations,
    }
}

/// Rank and conditioning of `a`, by dense SVD up to `dense_limit` columns.
pub fn analyze(a: &DesignMatrix, dense_limit: usize) -> RankReport {
    if a.column_count() <= dense_limit {
        analyze_svd(a)
    } else {
        analyze_gram(a)
    }
}

/// Everything reported about one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rank: RankReport,
    pub residual_norm: f64,
    pub residual_norm_untruncated: f64,
    pub dropped_rows: usize,
    pub truncated_variables: usize,
    pub clipped_gates: usize,
    pub lsqr_iterations: usize,
    pub max_leverage: Option<f64>,
}

/// Rank analysis of the rows kept by `solution`, with its fit statistics.
pub fn diagnostics(a: &DesignMatrix, solution: &Solution, dense_limit: usize) -> Diagnostics {
    let dropped: std::collections::HashSet<usize> = solution.dropped_rows.iter().copied().collect();
    let kept: Vec<usize> = (0..a.row_count()).filter(|mu| !dropped.contains(mu)).collect();
    Diagnostics::new(analyze(&a.select_rows(&kept), dense_limit), solution)
}

impl Diagnostics {
    pub fn new(rank: RankReport, solution: &Solution) -> Diagnostics {
        let max_leverage = rank.leverage.as_ref().map(|l| l.iter().copied().fold(0.0, f64::max));
        Diagnostics {
            rank,
            residual_norm: solution.residual_norm,
            residual_norm_untruncated: solution.residual_norm_untruncated,
            dropped_rows: solution.dropped_rows.len(),
            truncated_variables: solution.truncated,
            clipped_gates: solution.clipped_gates(),
            lsqr_iterations: solution.iterations,
            max_leverage,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::GateIdentity;
    use crate::design::{RowKey, Variable};
    use crate::pauli::{PauliIndex, PauliString};

    fn matrix(rows: &[&[u32]]) -> DesignMatrix {
        let n = rows[0].len();
        let columns = (0..n)
            .map(|q| Variable { gate: GateIdentity::meas(q), label: PauliIndex(1) })
            .collect();
        let keys = (0..rows.len()).map(|i| RowKey { circuit_id: i, input: PauliString::identity(1) }).collect();
        let entries = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, k)| **k > 0).map(|(c, &k)| (c as u32, k)).collect())
            .collect();
        DesignMatrix::from_parts(keys, columns, entries)
    }

    #[test]
    fn identity_design() {
        let a = matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        for r in [analyze(&a, 100), analyze(&a, 0)] {
            assert_eq!(r.rank, 3);
            assert!((r.pinv_norm.unwrap() - 1.0).abs() < 1e-9);
            assert!((r.condition.unwrap() - 1.0).abs() < 1e-9);
        }
        assert_eq!(analyze(&a, 100).leverage.unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn rank_deficiency_lists_null_space() {
        // columns 0 and 1 only ever appear together
        let a = matrix(&[&[1, 1, 0], &[2, 2, 1], &[0, 0, 1]]);
        for r in [analyze(&a, 100), analyze(&a, 0)] {
            assert_eq!(r.rank, 2);
            assert_eq!(r.null_combinations.len(), 1);
            let c = &r.null_combinations[0];
            assert!(c.contains("+1.0000 [MEAS") && c.contains("-1.0000 [MEAS"), "{c}");
            assert!(r.require_full_rank().is_err());
        }
        let wide = matrix(&[&[1, 0, 1]]);
        assert_eq!(analyze(&wide, 100).rank, 1);
        assert_eq!(analyze(&wide, 100).null_combinations.len(), 2);
        assert_eq!(gram_rank(&wide), 1);
    }

    #[test]
    fn paths_agree_on_conditioning() {
        let a = matrix(&[&[1, 2, 0, 1], &[0, 1, 3, 0], &[1, 0, 1, 1], &[2, 1, 0, 0], &[0, 0, 1, 4]]);
        let svd = analyze(&a, 100);
        let gram = analyze(&a, 0);
        assert_eq!(svd.rank, 4);
        assert_eq!(gram.rank, 4);
        assert!((svd.sigma_max - gram.sigma_max).abs() < 1e-6 * svd.sigma_max);
        assert!((svd.sigma_min - gram.sigma_min).abs() < 1e-6 * svd.sigma_min);
        let lev: f64 = svd.leverage.unwrap().iter().sum();
        assert!((lev - 4.0).abs() < 1e-9);
    }
}
