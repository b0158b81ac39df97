//! Fixed-order Gauss-Legendre quadrature for piecewise-smooth complex
//! integrands.
//!
//! The azimuthal integrands in this crate jump at the plate dislocations, so
//! every integral is split at those angles and each smooth segment is
//! integrated with a fixed Gauss-Legendre rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Number of nodes of the default rule.
pub const DEFAULT_ORDER: usize = 48;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial `P_n`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th root (descending order).
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum();
        sum * half
    }

    /// Integrates `f` over `[lo, hi]`, splitting at every breakpoint that
    /// falls strictly inside the interval.
    pub fn integrate_piecewise<F>(&self, lo: f64, hi: f64, breakpoints: &[f64], f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| self.integrate(w[0], w[1], &f))
            .sum()
    }
}

/// Shared default rule.
pub fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(DEFAULT_ORDER))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 32, 48, 64] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}: {total}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        // x^9 is odd, x^8 integrates to 2/9 on [-1, 1].
        let v = rule.integrate(-1.0, 1.0, |x| Complex64::new(x.powi(8) + x.powi(9), 0.0));
        assert!((v.re - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_exponential() {
        // int_0^{2pi} e^{i 3.5 x} dx = (e^{i 7 pi} - 1) / (3.5 i) = 2i/3.5
        let rule = default_rule();
        let v = rule.integrate(0.0, 2.0 * PI, |x| Complex64::from_polar(1.0, 3.5 * x));
        assert!((v - Complex64::new(0.0, 2.0 / 3.5)).norm() < 1e-12);
    }

    #[test]
    fn piecewise_step_function() {
        let rule = default_rule();
        let v = rule.integrate_piecewise(0.0, 2.0 * PI, &[1.0, 1.0, 9.0], |x| {
            Complex64::new(if x < 1.0 { 2.0 } else { -1.0 }, 0.0)
        });
        assert!((v.re - (2.0 - (2.0 * PI - 1.0))).abs() < 1e-13);
    }
}
