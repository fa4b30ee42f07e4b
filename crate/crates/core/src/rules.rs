//! One-dimensional Gauss rules used by the tensor quadrature engine.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Result};
use crate::math::log_gamma_unchecked;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Generalized Gauss–Laguerre rule for `∫₀^∞ g(x) x^a e^{−x} dx`, exact for
/// polynomials of degree `2n − 1`.
///
/// Newton iteration on the three-term recurrence; weights from the Christoffel
/// formula so that the smallest weights keep full relative accuracy.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<Rule> {
    if n == 0 {
        return Err(domain("rule needs at least one node"));
    }
    if !(a > -1.0) {
        return Err(domain(format!(
            "Laguerre parameter must exceed -1, got {a}"
        )));
    }
    let nf = n as f64;
    let log_scale = log_gamma_unchecked(a + nf) - log_gamma_unchecked(nf);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => (1.0 + a) * (3.0 + 0.92 * a) / (1.0 + 2.4 * nf + 1.8 * a),
            1 => z + (15.0 + 6.25 * a) / (1.0 + 0.9 * a + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * a / (1.0 + 3.5 * ai))
                    * (z - nodes[i - 2])
                    / (1.0 + 0.3 * a)
            }
        };
        let mut pp = 0.0;
        let mut p_prev = 0.0;
        for _ in 0..200 {
            let (p_n, p_nm1) = laguerre_pair(n, a, z);
            pp = (nf * p_n - (nf + a) * p_nm1) / z;
            p_prev = p_nm1;
            let step = p_n / pp;
            z -= step;
            if step.abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
                break;
            }
        }
        // Refresh derivative data at the converged node.
        let (p_n, p_nm1) = laguerre_pair(n, a, z);
        if p_n.is_finite() {
            pp = (nf * p_n - (nf + a) * p_nm1) / z;
            p_prev = p_nm1;
        }
        nodes[i] = z;
        weights[i] = -log_scale.exp() / (pp * nf * p_prev);
    }
    Ok(Rule { nodes, weights })
}

/// `(L_n^a(x), L_{n−1}^a(x))` by the upward recurrence.
fn laguerre_pair(n: usize, a: f64, x: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf + 1.0 + a - x) * p2 - (jf + a) * p3) / (jf + 1.0);
    }
    (p1, p2)
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `(1 − x)^a x^b`.
///
/// Golub–Welsch: eigen-decomposition of the symmetric Jacobi matrix.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(domain("rule needs at least one node"));
    }
    if !(a > -1.0) || !(b > -1.0) {
        return Err(domain(format!(
            "Jacobi parameters must exceed -1, got ({a}, {b})"
        )));
    }
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jm[(k, k)] = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let off = if k == 0 {
                (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
            } else {
                let t = 2.0 * j + ab;
                (4.0 * j * (j + a) * (j + b) * (j + ab) / (t * t * (t + 1.0) * (t - 1.0))).sqrt()
            };
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    // Total mass of (1-x)^a x^b on [0, 1].
    let mass = (log_gamma_unchecked(a + 1.0) + log_gamma_unchecked(b + 1.0)
        - log_gamma_unchecked(ab + 2.0))
    .exp();
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + eig.eigenvalues[i]) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Equal-weight rule on the circle, `θ_j = 2πj/n`; exact for trigonometric
/// polynomials of degree below `n`.
pub fn periodic_trapezoid(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(domain("rule needs at least one node"));
    }
    let h = 2.0 * PI / n as f64;
    Ok(Rule {
        nodes: (0..n).map(|j| j as f64 * h).collect(),
        weights: vec![h; n],
    })
}
