//! Gauss rules on intervals and triangles, and the regularizing rules for singular
//! triangle-pair integrals.
//!
//! Triangles are parametrized over the reference simplex `S = {u, v ≥ 0, u + v ≤ 1}`.
//! Pair rules return points `(x̂, ŷ) ∈ S × S` whose weights sum to `|S|² = 1/4`; callers
//! multiply by both Jacobians `2|τ|·2|τ'|`.

/// Gauss–Legendre rule with `n` points on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one quadrature point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { t } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pm) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = 0.5 * (1.0 - t);
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrianglePoint {
    pub uv: [f64; 2],
    pub weight: f64,
}

/// Collapsed Gauss rule on `S` with `order` points per direction; weights sum to 1/2.
pub fn triangle_rule(order: usize) -> Vec<TrianglePoint> {
    let (x, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * order);
    for (&a, &wa) in x.iter().zip(&w) {
        for (&b, &wb) in x.iter().zip(&w) {
            out.push(TrianglePoint { uv: [a, (1.0 - a) * b], weight: wa * wb * (1.0 - a) });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPoint {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub weight: f64,
}

/// Product of two triangle rules, for well-separated panels.
pub fn regular_pair_rule(order: usize) -> Vec<PairPoint> {
    let t = triangle_rule(order);
    let mut out = Vec::with_capacity(t.len() * t.len());
    for p in &t {
        for q in &t {
            out.push(PairPoint { x: p.uv, y: q.uv, weight: p.weight * q.weight });
        }
    }
    out
}

/// Both points on the same panel.
///
/// The difference `z = ŷ − x̂` ranges over a hexagon; it is split into six sectors on
/// which the hexagon gauge is linear, and for fixed `z` the admissible `x̂` form a
/// scaled copy of `S`. Each sector is halved in angle, which keeps the angular
/// integrand far from its complex singularities.
pub fn identical_pair_rule(order: usize) -> Vec<PairPoint> {
    const HEX: [[f64; 2]; 6] = [[1.0, 0.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, -1.0]];
    let (g, gw) = gauss_legendre(order);
    let tri = triangle_rule(order);
    let mut out = Vec::with_capacity(12 * order * order * tri.len());
    let angles: Vec<(f64, f64)> = (0..2)
        .flat_map(|h| g.iter().zip(&gw).map(move |(&t, &w)| (0.5 * (h as f64 + t), 0.5 * w)))
        .collect();
    for s in 0..6 {
        let (p, q) = (HEX[s], HEX[(s + 1) % 6]);
        for (&xi, &wxi) in g.iter().zip(&gw) {
            for &(t, wt) in &angles {
                let z = [xi * ((1.0 - t) * p[0] + t * q[0]), xi * ((1.0 - t) * p[1] + t * q[1])];
                let x0 = [(-z[0]).max(0.0), (-z[1]).max(0.0)];
                let base = wxi * wt * xi * (1.0 - xi) * (1.0 - xi);
                for r in &tri {
                    let x = [x0[0] + (1.0 - xi) * r.uv[0], x0[1] + (1.0 - xi) * r.uv[1]];
                    out.push(PairPoint { x, y: [x[0] + z[0], x[1] + z[1]], weight: base * r.weight });
                }
            }
        }
    }
    out
}

/// Panels sharing the edge from local vertex 0 to local vertex 1 of both (`v = 0`).
///
/// Coordinates `(v, v', w = u' − u)` are split into six simplicial cones on which the
/// gauge `max(v, v' + w) + max(0, −w)` is linear; `u` is then integrated over an interval
/// of length `1 − gauge`.
pub fn edge_adjacent_pair_rule(order: usize) -> Vec<PairPoint> {
    const CONES: [[[f64; 3]; 3]; 6] = [
        [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]],
        [[0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]],
        [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
        [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, -1.0]],
        [[1.0, 0.0, 0.0], [0.0, 1.0, -1.0], [0.0, 0.0, -1.0]],
        [[0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, -1.0]],
    ];
    let (g, gw) = gauss_legendre(order);
    let tri = triangle_rule(order);
    let mut out = Vec::with_capacity(6 * order * order * tri.len());
    for [p, q, r] in &CONES {
        let det = crate::geometry::det3(*p, *q, *r).abs();
        for (&xi, &wxi) in g.iter().zip(&gw) {
            for e in &tri {
                let [e1, e2] = e.uv;
                let z: Vec<f64> = (0..3).map(|c| xi * (p[c] + e1 * (q[c] - p[c]) + e2 * (r[c] - p[c]))).collect();
                let (v, vp, w) = (z[0], z[1], z[2]);
                let base = wxi * e.weight * xi * xi * (1.0 - xi) * det;
                for (&s, &ws) in g.iter().zip(&gw) {
                    let u = (-w).max(0.0) + (1.0 - xi) * s;
                    out.push(PairPoint { x: [u, v], y: [u + w, vp], weight: base * ws });
                }
            }
        }
    }
    out
}

/// Panels sharing only local vertex 0 of both.
pub fn vertex_adjacent_pair_rule(order: usize) -> Vec<PairPoint> {
    let (g, gw) = gauss_legendre(order);
    let tri = triangle_rule(order);
    let mut out = Vec::with_capacity(2 * order * order * tri.len());
    for (&xi, &wxi) in g.iter().zip(&gw) {
        for (&a, &wa) in g.iter().zip(&gw) {
            let outer = [xi * (1.0 - a), xi * a];
            for r in &tri {
                let inner = [xi * r.uv[0], xi * r.uv[1]];
                let weight = wxi * wa * r.weight * xi * xi * xi;
                out.push(PairPoint { x: outer, y: inner, weight });
                out.push(PairPoint { x: inner, y: outer, weight });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..10 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_exact_for_low_degree() {
        // ∫_S u^a v^b = a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let rule = triangle_rule(4);
        for a in 0..4u32 {
            for b in 0..(4 - a) {
                let s: f64 = rule.iter().map(|p| p.weight * p.uv[0].powi(a as i32) * p.uv[1].powi(b as i32)).sum();
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((s - exact).abs() < 1e-15);
            }
        }
    }

    fn inside(p: [f64; 2]) -> bool {
        p[0] >= -1e-14 && p[1] >= -1e-14 && p[0] + p[1] <= 1.0 + 1e-14
    }

    fn smooth(p: &PairPoint) -> f64 {
        let [a, b] = p.x;
        let [c, d] = p.y;
        1.0 + a * c - 2.0 * b * b + 0.5 * a * d * c + b * c * c - d
    }

    fn check_covers_product(rule: &[PairPoint]) {
        let reference = regular_pair_rule(6);
        let exact: f64 = reference.iter().map(|p| p.weight * smooth(p)).sum();
        let got: f64 = rule.iter().map(|p| p.weight * smooth(p)).sum();
        assert!((got - exact).abs() < 1e-12, "{got} vs {exact}");
        assert!(rule.iter().all(|p| inside(p.x) && inside(p.y) && p.weight > 0.0));
    }

    #[test]
    fn singular_rules_partition_the_product_domain() {
        check_covers_product(&identical_pair_rule(5));
        check_covers_product(&edge_adjacent_pair_rule(5));
        check_covers_product(&vertex_adjacent_pair_rule(5));
    }

    #[test]
    fn identical_rule_handles_inverse_distance() {
        // ∫_S∫_S 1/|x−y| over the reference triangle, compared between orders
        let f = |r: &[PairPoint]| -> f64 {
            r.iter().map(|p| p.weight / ((p.x[0] - p.y[0]).hypot(p.x[1] - p.y[1]))).sum()
        };
        let a = f(&identical_pair_rule(6));
        let b = f(&identical_pair_rule(10));
        assert!((a - b).abs() < 1e-8 * b.abs(), "{a} {b}");
    }
}
