//! Finite-difference derivatives of sampled curves on arbitrary grids.

/// Fornberg weights for derivatives `0..=max_order` at `x0` over `nodes`.
///
/// `w[m][k]` is the weight of `f(nodes[k])` in the `m`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut w = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return w;
    }
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Index window of `width` nodes around `i`, clipped to `0..n`.
pub fn window(i: usize, n: usize, width: usize) -> std::ops::Range<usize> {
    let width = width.min(n);
    let start = i.saturating_sub(width / 2).min(n - width);
    start..start + width
}

/// First and second derivatives of a sampled series at sample `i`, from the
/// five nearest samples.
pub fn derivatives_at(tau: &[f64], values: &[f64], i: usize) -> (f64, f64) {
    let idx = window(i, tau.len(), 5);
    let w = fornberg_weights(tau[i], &tau[idx.clone()], 2);
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (k, j) in idx.enumerate() {
        d1 += w[1][k] * values[j];
        d2 += w[2][k] * values[j];
    }
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn exact_on_quartics_nonuniform() {
        let tau = [0.0, 0.1, 0.25, 0.3, 0.5, 0.65, 0.9];
        let f = |x: f64| 1.0 - 2.0 * x + 3.0 * x.powi(3) - x.powi(4);
        let vals: Vec<f64> = tau.iter().map(|&x| f(x)).collect();
        for i in 0..tau.len() {
            let x = tau[i];
            let (d1, d2) = derivatives_at(&tau, &vals, i);
            assert!((d1 - (-2.0 + 9.0 * x * x - 4.0 * x.powi(3))).abs() < 1e-10);
            assert!((d2 - (18.0 * x - 12.0 * x * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn window_clipping() {
        assert_eq!(window(0, 10, 5), 0..5);
        assert_eq!(window(9, 10, 5), 5..10);
        assert_eq!(window(4, 10, 5), 2..7);
        assert_eq!(window(1, 3, 5), 0..3);
    }
}
