//! LSQR (Paige and Saunders) for sparse least squares `min ‖A x - b‖`.

#[derive(Debug, Clone, PartialEq)]
pub struct LsqrResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Estimate of `‖A x - b‖`.
    pub residual: f64,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scale(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

/// Solve with `apply(x) = A x` and `apply_t(y) = A^T y`. Stops when either
/// `‖r‖ ≤ btol ‖b‖ + atol ‖A‖ ‖x‖` or `‖A^T r‖ ≤ atol ‖A‖ ‖r‖`.
pub fn lsqr(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    n: usize,
    atol: f64,
    btol: f64,
    max_iterations: usize,
) -> LsqrResult {
    let mut x = vec![0.0; n];
    let mut u = b.to_vec();
    let bnorm = norm(&u);
    if bnorm == 0.0 {
        return LsqrResult { x, iterations: 0, residual: 0.0, converged: true };
    }
    let mut beta = bnorm;
    scale(&mut u, 1.0 / beta);
    let mut v = apply_t(&u);
    let mut alpha = norm(&v);
    if alpha == 0.0 {
        return LsqrResult { x, iterations: 0, residual: bnorm, converged: true };
    }
    scale(&mut v, 1.0 / alpha);
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;
    let mut anorm_sq = 0.0;
    for it in 1..=max_iterations {
        let av = apply(&v);
        u.iter_mut().zip(&av).for_each(|(ui, ai)| *ui = ai - alpha * *ui);
        beta = norm(&u);
        anorm_sq += alpha * alpha + beta * beta;
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            let atu = apply_t(&u);
            v.iter_mut().zip(&atu).for_each(|(vi, ai)| *vi = ai - beta * *vi);
            alpha = norm(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        }
        let rho = rhobar.hypot(beta);
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;
        let t1 = phi / rho;
        let t2 = -theta / rho;
        for i in 0..n {
            x[i] += t1 * w[i];
            w[i] = v[i] + t2 * w[i];
        }
        let anorm = anorm_sq.sqrt();
        let rnorm = phibar;
        let arnorm = phibar * alpha * c.abs();
        if rnorm <= btol * bnorm + atol * anorm * norm(&x) || arnorm <= atol * anorm * rnorm || alpha == 0.0 {
            return LsqrResult { x, iterations: it, residual: rnorm, converged: true };
        }
    }
    let residual = phibar;
    LsqrResult { x, iterations: max_iterations, residual, converged: false }
}
