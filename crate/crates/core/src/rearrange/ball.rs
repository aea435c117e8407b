//! Distribution and rearrangement of `y -> y_1` on the unit ball.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::beta::beta_reg;

/// `mu(sigma) = |{|y_1| > sigma}| / |B|` for the unit ball in R^n.
pub fn ball_mu(n: usize, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 1.0;
    }
    if sigma >= 1.0 {
        return 0.0;
    }
    match n {
        1 => 1.0 - sigma,
        2 => {
            // (x - sin x) / pi with x = 2 acos(sigma), by series for small x
            let x = 2.0 * sigma.acos();
            let d = if x < 0.1 {
                let x2 = x * x;
                x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
            } else {
                x - x.sin()
            };
            d / std::f64::consts::PI
        }
        3 => 0.5 * (1.0 - sigma).powi(2) * (2.0 + sigma),
        _ => beta_reg((n as f64 + 1.0) / 2.0, 0.5, (1.0 - sigma) * (1.0 + sigma)),
    }
}

/// `f*(t)` for `y -> y_1` on the unit ball, by bisection on the closed form.
pub fn ball_fstar(n: usize, t: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if ball_mu(n, mid) <= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `f*_{u,B}(1/2)`, which does not depend on `u`.
pub fn ball_half(n: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    *cache.lock().unwrap().entry(n).or_insert_with(|| ball_fstar(n, 0.5))
}

/// Unit-ball `f*` at the cell midpoints `(k + 1/2) / cells`, cached.
pub fn ball_midpoints(n: usize, cells: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(n, cells)) {
        return v.clone();
    }
    let table: Arc<Vec<f64>> =
        Arc::new((0..cells).map(|k| ball_fstar(n, (k as f64 + 0.5) / cells as f64)).collect());
    cache.lock().unwrap().insert((n, cells), table.clone());
    table
}

/// Unit-ball `f*` at the midpoints of [`super::quadrature_cells`], cached.
pub fn ball_cell_values(n: usize, cells: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(n, cells)) {
        return v.clone();
    }
    let table: Arc<Vec<f64>> =
        Arc::new(super::quadrature_cells(cells).iter().map(|(a, b)| ball_fstar(n, 0.5 * (a + b))).collect());
    cache.lock().unwrap().insert((n, cells), table.clone());
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_agree_with_beta() {
        for n in [2usize, 3] {
            for s in [0.05, 0.3, 0.5, 0.9] {
                let b = beta_reg((n as f64 + 1.0) / 2.0, 0.5, 1.0 - s * s);
                assert!((ball_mu(n, s) - b).abs() < 1e-12, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn disk_tail_is_monotone() {
        let mut prev = 1.0;
        for k in 1..140 {
            let sigma = 1.0 - 0.8f64.powi(k);
            let m = ball_mu(2, sigma);
            assert!(m > 0.0 && m < prev, "sigma = {sigma}");
            prev = m;
        }
        let e: f64 = 1e-10;
        // two caps, mu ~ (8 sqrt 2 / 3 pi) e^{3/2}
        let lead = 8.0 * 2f64.sqrt() / (3.0 * std::f64::consts::PI) * e.powf(1.5);
        assert!((ball_mu(2, 1.0 - e) / lead - 1.0).abs() < 1e-5);
    }

    #[test]
    fn disk_values() {
        let expect = 2.0 * (0.5f64.acos() - 0.5 * 0.75f64.sqrt()) / std::f64::consts::PI;
        assert!((ball_mu(2, 0.5) - expect).abs() < 1e-15);
        assert!((ball_mu(2, 0.5) - 0.39100).abs() < 1e-5);
        let h = ball_half(2);
        assert!((h - 0.40397).abs() < 1e-5, "{h}");
        assert!((ball_mu(2, h) - 0.5).abs() < 1e-13);
    }
}
