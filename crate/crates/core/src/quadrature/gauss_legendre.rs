use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`; exact for polynomials of degree
    /// `2n - 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Cached rule for the current thread.
    pub(crate) fn cached(n: usize) -> Rc<GaussLegendre> {
        thread_local! {
            static RULES: RefCell<HashMap<usize, Rc<GaussLegendre>>> = RefCell::new(HashMap::new());
        }
        RULES.with(|rules| {
            rules
                .borrow_mut()
                .entry(n)
                .or_insert_with(|| Rc::new(GaussLegendre::new(n)))
                .clone()
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Apply the rule on [a, b] to a plain function.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
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
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [2, 3, 7, 16, 31] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}: {s}");
        }
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let r = GaussLegendre::new(16);
        for i in 0..16 {
            assert!((r.nodes()[i] + r.nodes()[15 - i]).abs() < 1e-15);
        }
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_up_to_degree_2n_minus_1() {
        let n = 16;
        let r = GaussLegendre::new(n);
        for deg in 0..(2 * n) as i32 {
            let got = r.integrate(|x| x.powi(deg), 0.0, 1.0);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn three_point_rule_matches_closed_form() {
        let r = GaussLegendre::new(3);
        let x = (0.6f64).sqrt();
        assert!((r.nodes()[2] - x).abs() < 1e-15);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((r.weights()[0] - 5.0 / 9.0).abs() < 1e-15);
    }
}
