//! Legendre polynomials, Gauss-Legendre quadrature and the closed-form
//! Christoffel polynomial of the uniform probability measure on `[-1, 1]`.
//!
//! The three-term recurrence reaches degrees far beyond what a monomial
//! moment matrix tolerates in double precision, which makes this module the
//! independent reference for the matrix-based evaluation path.

/// Evaluate the Legendre polynomial `P_n(x)` by the three-term recurrence
/// `(k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}`.
pub fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * curr - k as f64 * prev) / (k + 1) as f64;
        prev = curr;
        curr = next;
    }
    curr
}

/// Christoffel polynomial of degree `n` for the uniform probability measure
/// on `[-1, 1]`: the sum of squared orthonormal Legendre values
/// `Σ_{k≤n} (2k+1) P_k(x)²`.
pub fn uniform_interval_christoffel(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    let mut sum = 1.0;
    if n == 0 {
        return sum;
    }
    let mut curr = x;
    sum += 3.0 * curr * curr;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * curr - k as f64 * prev) / (k + 1) as f64;
        prev = curr;
        curr = next;
        sum += (2 * (k + 1) + 1) as f64 * curr * curr;
    }
    sum
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`,
/// exact for polynomials of degree `2m - 1`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton on P_m
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut prev = 1.0;
            let mut curr = x;
            for k in 1..m {
                let next = ((2 * k + 1) as f64 * x * curr - k as f64 * prev) / (k + 1) as f64;
                prev = curr;
                curr = next;
            }
            dp = m as f64 * (x * curr - prev) / (x * x - 1.0);
            let dx = curr / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (nodes, weights)
}
