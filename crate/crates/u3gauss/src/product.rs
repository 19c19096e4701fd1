//! Product rules on the sphere from 1D quadrature: an m-point Legendre rule
//! along the polar axis crossed with 2m equally weighted Chebyshev angles of
//! longitude gives a 2m²-point rule of degree 2m-1.

use crate::rule::PointRule;
use std::f64::consts::PI;

/// A 1D quadrature rule on (-1, 1) with strictly increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// The m-point Gauss-Legendre rule, exact for polynomials of degree 2m-1 on
/// [-1, 1]. Nodes by Newton iteration on the three-term recurrence from the
/// classical initial guesses cos(pi (i - 1/4) / (m + 1/2)).
pub fn gauss_legendre(m: usize) -> Rule1D {
    assert!(m >= 1);
    if m == 1 {
        return Rule1D {
            nodes: vec![0.0],
            weights: vec![2.0],
        };
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 1..=m {
        let mut x = (PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (value, d) = legendre_and_derivative(m, x);
            derivative = d;
            let step = value / derivative;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        // refresh the derivative at the converged node
        let (_, d) = legendre_and_derivative(m, x);
        derivative = if d != 0.0 { d } else { derivative };
        nodes[m - i] = x; // classical ordering is descending; store ascending
        weights[m - i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
    }
    Rule1D { nodes, weights }
}

/// Value and derivative of the degree-m Legendre polynomial at `x`.
fn legendre_and_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut previous = 1.0;
    let mut current = x;
    for k in 2..=m {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * current - (k - 1.0) * previous) / k;
        previous = current;
        current = next;
    }
    let derivative = m as f64 * (x * current - previous) / (x * x - 1.0);
    (current, derivative)
}

/// The m-point Gauss-Chebyshev rule of the first kind: nodes
/// cos((2i-1) pi / 2m), constant weights pi/m.
pub fn chebyshev_first(m: usize) -> Rule1D {
    assert!(m >= 1);
    let mut nodes: Vec<f64> = (1..=m)
        .map(|i| ((2 * i - 1) as f64 * PI / (2.0 * m as f64)).cos())
        .collect();
    nodes.reverse(); // ascending
    if m % 2 == 1 {
        nodes[m / 2] = 0.0; // cos(pi/2) exactly
    }
    Rule1D {
        weights: vec![PI / m as f64; m],
        nodes,
    }
}

/// The 2m²-point product rule of degree 2m-1 on the unit sphere. The
/// longitude index runs over the full circle (2m angles), which realizes
/// every sign combination of the closed-form point coordinates; the Legendre
/// node set is itself symmetric about the equator.
pub fn u3_product_rule(m: usize) -> PointRule {
    assert!(m >= 1);
    let legendre = gauss_legendre(m);
    let mut points = Vec::with_capacity(2 * m * m);
    let mut weights = Vec::with_capacity(2 * m * m);
    for i1 in 1..=2 * m {
        let angle = (2 * i1 - 1) as f64 * PI / (2.0 * m as f64);
        let (sin_a, cos_a) = angle.sin_cos();
        for (&z, &w) in legendre.nodes.iter().zip(&legendre.weights) {
            let radius = (1.0 - z * z).sqrt();
            points.push([radius * sin_a, radius * cos_a, z]);
            weights.push(PI / m as f64 * w);
        }
    }
    let rule = PointRule::new(points, weights).expect("finite by construction");
    debug_assert!(distinct(&rule), "product points must be distinct");
    rule
}

fn distinct(rule: &PointRule) -> bool {
    let mut keys: Vec<[u64; 3]> = rule
        .points()
        .iter()
        .map(|p| p.map(f64::to_bits))
        .collect();
    keys.sort_unstable();
    keys.windows(2).all(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::monomial_integral_f64;

    #[test]
    fn legendre_small_cases() {
        let rule = gauss_legendre(1);
        assert_eq!(rule.nodes, vec![0.0]);
        assert_eq!(rule.weights, vec![2.0]);

        let rule = gauss_legendre(2);
        let node = 1.0 / 3f64.sqrt();
        assert!((rule.nodes[0] + node).abs() < 1e-15);
        assert!((rule.nodes[1] - node).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-14);
        assert!((rule.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_degree_exactness() {
        for m in 1..=12 {
            let rule = gauss_legendre(m);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "m = {m}");
            for degree in 0..=(2 * m - 1) as u32 {
                let approx: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(degree as i32))
                    .sum();
                let exact = if degree % 2 == 0 {
                    2.0 / (degree as f64 + 1.0)
                } else {
                    0.0
                };
                assert!((approx - exact).abs() < 1e-13, "m = {m}, degree = {degree}");
            }
        }
    }

    #[test]
    fn legendre_five_point_power_check() {
        // degree-8 monomial on 5 points
        let rule = gauss_legendre(5);
        let approx: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(8))
            .sum();
        assert!((approx - 2.0 / 9.0).abs() <= 1e-14);
    }

    #[test]
    fn chebyshev_closed_form() {
        let rule = chebyshev_first(1);
        assert_eq!(rule.nodes, vec![0.0]);
        assert_eq!(rule.weights, vec![PI]);

        let rule = chebyshev_first(2);
        let node = 2f64.sqrt() / 2.0;
        assert!((rule.nodes[0] + node).abs() < 1e-15);
        assert!((rule.nodes[1] - node).abs() < 1e-15);
        assert!(rule.weights.iter().all(|&w| w == PI / 2.0));

        let rule = chebyshev_first(4);
        assert_eq!(rule.len(), 4);
        assert!(rule.weights.iter().all(|&w| w == PI / 4.0));
    }

    #[test]
    fn product_rule_counts_and_weight_sum() {
        for m in 1..=10 {
            let rule = u3_product_rule(m);
            assert_eq!(rule.len(), 2 * m * m);
            assert!((rule.weight_sum() - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            for p in rule.points() {
                let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                assert!((norm - 1.0).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn product_rule_degree() {
        for m in [2usize, 5] {
            let rule = u3_product_rule(m);
            let degree = (2 * m - 1) as u32;
            for a in 0..=degree {
                for b in 0..=degree - a {
                    for c in 0..=degree - a - b {
                        let approx = rule
                            .integrate(|p| {
                                p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                            })
                            .unwrap();
                        let exact = monomial_integral_f64(a, b, c);
                        assert!(
                            (approx - exact).abs() < 1e-12 * 4.0 * PI,
                            "m = {m}, monomial ({a},{b},{c})"
                        );
                    }
                }
            }
        }
    }
}
