//! Gauss–Legendre quadrature with adaptive bisection.
//!
//! Used as an independent numerical oracle for the closed-form integrals
//! (beta functions, normalisation constants, marginal densities).

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Roots of P_n are found by Newton iteration from the Chebyshev-like
/// initial guess cos(π (i + 3/4) / (n + 1/2)).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A fixed Gauss–Legendre rule mapped onto arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

const ADAPTIVE_ORDER: usize = 15;
const MAX_DEPTH: u32 = 48;

/// Adaptive Gauss–Legendre integration of `f` over [a, b] to absolute
/// tolerance `tol`.
///
/// Each panel is accepted once the 15-point rule on the panel agrees with the
/// sum over its two halves; the tolerance is split evenly between halves.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = GaussLegendre::new(ADAPTIVE_ORDER);
    let whole = rule.integrate(&f, a, b);
    adapt(&rule, &f, a, b, whole, tol, 0)
}

fn adapt<F: Fn(f64) -> f64>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || depth >= MAX_DEPTH {
        return refined;
    }
    adapt(rule, f, a, mid, left, 0.5 * tol, depth + 1) + adapt(rule, f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Tensor-product Gauss–Legendre integration over a box, each axis split into
/// `panels` equal panels of an `order`-point rule.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(f: F, bounds: &[(f64, f64)], order: usize, panels: usize) -> f64 {
    let rule = GaussLegendre::new(order);
    let axes: Vec<Vec<(f64, f64)>> = bounds
        .iter()
        .map(|&(a, b)| {
            let width = (b - a) / panels as f64;
            (0..panels)
                .flat_map(|i| {
                    let lo = a + width * i as f64;
                    rule.mapped(lo, lo + width).collect::<Vec<_>>()
                })
                .collect()
        })
        .collect();
    let mut point = vec![0.0; bounds.len()];
    tensor_sum(&f, &axes, 0, 1.0, &mut point)
}

fn tensor_sum<F: Fn(&[f64]) -> f64>(
    f: &F,
    axes: &[Vec<(f64, f64)>],
    axis: usize,
    weight: f64,
    point: &mut Vec<f64>,
) -> f64 {
    if axis == axes.len() {
        return weight * f(point);
    }
    let mut acc = 0.0;
    for &(x, w) in &axes[axis] {
        point[axis] = x;
        acc += tensor_sum(f, axes, axis + 1, weight * w, point);
    }
    acc
}
