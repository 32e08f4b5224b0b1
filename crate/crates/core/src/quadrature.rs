//! Scalar quadrature rules: double-exponential (tanh-sinh) for integrands
//! with endpoint singularities, and Gauss-Legendre panels.

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of `f` over `[a, b]`, refined level by level until
/// two successive estimates agree to `tol` (relative, with an absolute floor).
///
/// The integrand is never evaluated at the endpoints. The second argument
/// passed to `f` is the distance to the nearest endpoint, computed without
/// cancellation, for integrands singular there.
pub fn tanh_sinh(f: impl Fn(f64, f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (ch * ch);
        // 1 - |tanh(u)| = 2 / (exp(2|u|) + 1)
        let gap = half * 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        if gap <= 0.0 {
            return 0.0;
        }
        let x = if u >= 0.0 { b - gap } else { a + gap };
        if x <= a || x >= b {
            return 0.0;
        }
        weight * f(x, gap)
    };
    let t_max = 3.5;
    let mut step = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * step <= t_max {
        let t = k as f64 * step;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = half * step * sum;
    for _ in 0..12 {
        step *= 0.5;
        // add the new odd nodes
        let mut k = 1;
        while (k as f64) * step <= t_max {
            let t = k as f64 * step;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = half * step * sum;
        let done = (next - estimate).abs() <= tol * next.abs().max(1e-300) || (next - estimate).abs() < 1e-300;
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule on `panels` equal panels of `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussPanels {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussPanels {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let c = lo + 0.5 * width;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(c + 0.5 * width * x);
            }
            total += 0.5 * width * s;
        }
        total
    }
}
