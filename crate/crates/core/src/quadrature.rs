//! Quadrature on nonuniform radial grids.

/// Integral over `[a, b]` of the quadratic through `(x0,f0), (x1,f1), (x2,f2)`.
pub fn quadratic_segment(x: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    // Newton form p(x) = f0 + c1 (x - x0) + c2 (x - x0)(x - x1)
    let c1 = (f[1] - f[0]) / (x[1] - x[0]);
    let c12 = (f[2] - f[1]) / (x[2] - x[1]);
    let c2 = (c12 - c1) / (x[2] - x[0]);
    let prim = |t: f64| {
        let s = t - x[0];
        // (x - x0)(x - x1) = s^2 - s (x1 - x0)
        f[0] * s + 0.5 * c1 * s * s + c2 * (s * s * s / 3.0 - 0.5 * s * s * (x[1] - x[0]))
    };
    prim(b) - prim(a)
}

/// Composite Simpson rule on arbitrary increasing nodes; an odd number of
/// intervals is closed with a quadratic segment over the last interval.
pub fn simpson(x: &[f64], f: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, f.len());
    match n {
        0 | 1 => return 0.0,
        2 => return 0.5 * (x[1] - x[0]) * (f[0] + f[1]),
        _ => {}
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        total += quadratic_segment([x[i], x[i + 1], x[i + 2]], [f[i], f[i + 1], f[i + 2]], x[i], x[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        total += quadratic_segment(
            [x[n - 3], x[n - 2], x[n - 1]],
            [f[n - 3], f[n - 2], f[n - 1]],
            x[n - 2],
            x[n - 1],
        );
    }
    total
}

/// Running integral `F_i = int_{x_0}^{x_i} f`, third order per interval.
pub fn cumulative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
        return out;
    }
    for i in 0..n - 1 {
        let j = if i + 2 < n { i } else { n - 3 };
        out[i + 1] = out[i] + quadratic_segment([x[j], x[j + 1], x[j + 2]], [f[j], f[j + 1], f[j + 2]], x[i], x[i + 1]);
    }
    out
}

/// Derivative at interior node `i` from the quadratic through nodes
/// `i-1, i, i+1`; second order on nonuniform grids.
pub fn centered_derivative(x: &[f64], f: &[f64], i: usize) -> f64 {
    let h0 = x[i] - x[i - 1];
    let h1 = x[i + 1] - x[i];
    (-h1 / (h0 * (h0 + h1))) * f[i - 1] + ((h1 - h0) / (h0 * h1)) * f[i] + (h0 / (h1 * (h0 + h1))) * f[i + 1]
}

/// Weights `w` with `sum w_j f(x_j) ~ f'(x0)` for arbitrary distinct nodes
/// (Fornberg's recursion).
pub fn derivative_weights(x0: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    // c[j][k]: weight of node j for the k-th derivative, k <= 1
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Fourth-order derivative at node `i` from the five nodes around it,
/// falling back to [`centered_derivative`] next to the ends.
pub fn centered_derivative5(x: &[f64], f: &[f64], i: usize) -> f64 {
    if i < 2 || i + 2 >= x.len() {
        return centered_derivative(x, f, i);
    }
    let w = derivative_weights(x[i], &x[i - 2..=i + 2]);
    w.iter().zip(&f[i - 2..=i + 2]).map(|(a, b)| a * b).sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `int_a^b f` with an `m`-point Gauss–Legendre rule.
pub fn gauss_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let (x, w) = gauss_legendre(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

/// Surface measure `2 pi^{d/2} / Gamma(d/2)` of the unit sphere in `R^d`.
pub fn sphere_area(d: u32) -> f64 {
    use std::f64::consts::PI;
    // Gamma(d/2) for integer and half-integer arguments
    let gamma_half = if d.is_multiple_of(2) {
        (1..d / 2).map(|k| k as f64).product::<f64>()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < d as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    };
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half
}
