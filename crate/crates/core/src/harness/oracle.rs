//! Exact answers computed centrally from the full data set.

use crate::error::{Error, Result};
use crate::ranktrim::TrimInterval;
use crate::values::{distance, NodeValues};

/// The `k`-th smallest value, 1-based.
pub fn order_statistic(data: &[f64], k: usize) -> f64 {
    assert!(k >= 1 && k <= data.len());
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    s[k - 1]
}

/// Unique minimiser of `sum_k L_alpha(a_k - x)`: the `ceil(alpha n)`-th order
/// statistic. When `alpha n` is an integer the minimisers form an interval and
/// an error is returned.
pub fn exact_quantile(data: &[f64], alpha: f64) -> Result<f64> {
    if data.is_empty() || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("quantile needs data and alpha in (0, 1)"));
    }
    let pos = alpha * data.len() as f64;
    if (pos - pos.round()).abs() < 1e-12 {
        return Err(Error::NonUniqueTarget(format!("alpha * n = {pos} is an integer")));
    }
    Ok(order_statistic(data, pos.ceil() as usize))
}

/// Minimiser set `[lo, hi]` of `sum_k L_alpha(a_k - x)`; a single point
/// unless `alpha n` is an integer.
pub fn quantile_interval(data: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if data.is_empty() || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("quantile needs data and alpha in (0, 1)"));
    }
    let pos = alpha * data.len() as f64;
    if (pos - pos.round()).abs() < 1e-12 {
        let k = pos.round() as usize;
        return Ok((order_statistic(data, k), order_statistic(data, k + 1)));
    }
    let q = order_statistic(data, pos.ceil() as usize);
    Ok((q, q))
}

/// Average of the order statistics with ranks `m + 1 ..= n - m`.
pub fn trimmed_mean(data: &[f64], alpha: f64) -> Result<f64> {
    let iv = TrimInterval::new(data.len(), alpha)?;
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let kept = &s[iv.m..data.len() - iv.m];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

/// Reference weights for the quantile rule: `1{q_alpha <= a_k <= q_(1-alpha)}`.
pub fn quantile_weights(data: &[f64], alpha: f64) -> Result<Vec<bool>> {
    let lo = exact_quantile(data, alpha)?;
    let hi = exact_quantile(data, 1.0 - alpha)?;
    Ok(data.iter().map(|&a| lo <= a && a <= hi).collect())
}

/// Reference weights for the rank rule: `1{r_k in [b1, b2]}`.
pub fn rank_weights(data: &[f64], alpha: f64) -> Result<Vec<bool>> {
    let iv = TrimInterval::new(data.len(), alpha)?;
    Ok(crate::ranktrim::true_ranks(data)?.into_iter().map(|r| iv.contains(r as f64)).collect())
}

/// Sum of distances and its (sub)gradient norm at `x`. At an anchor the
/// minimum-norm subgradient is used.
pub fn geometric_median_gradient(data: &NodeValues, x: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    let mut at_anchor = 0usize;
    for a in data.rows() {
        let d = distance(x, a);
        if d == 0.0 {
            at_anchor += 1;
            continue;
        }
        for c in 0..x.len() {
            g[c] += (x[c] - a[c]) / d;
        }
    }
    let len = crate::values::norm(&g);
    (len - at_anchor as f64).max(0.0)
}

/// Weiszfeld iteration with the Vardi-Zhang modification, so iterates that
/// land on a data point can still leave it.
pub fn weiszfeld(data: &NodeValues, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let (n, dim) = (data.len(), data.dim());
    if n == 0 {
        return Err(Error::invalid("no data"));
    }
    // Weiszfeld only creeps towards an optimal data point, so test those first.
    for a in data.rows() {
        if geometric_median_gradient(data, a) == 0.0 {
            return Ok(a.to_vec());
        }
    }
    let mut x = vec![0.0; dim];
    for a in data.rows() {
        for c in 0..dim {
            x[c] += a[c] / n as f64;
        }
    }
    for _ in 0..max_iter {
        let mut num = vec![0.0; dim];
        let mut den = 0.0;
        let mut pull = vec![0.0; dim];
        let mut eta = 0.0;
        for a in data.rows() {
            let d = distance(&x, a);
            if d == 0.0 {
                eta += 1.0;
                continue;
            }
            for c in 0..dim {
                num[c] += a[c] / d;
                pull[c] += (a[c] - x[c]) / d;
            }
            den += 1.0 / d;
        }
        if den == 0.0 {
            return Ok(x);
        }
        let t: Vec<f64> = num.iter().map(|v| v / den).collect();
        let r = crate::values::norm(&pull);
        let next: Vec<f64> = if eta == 0.0 {
            t
        } else if r <= eta {
            return Ok(x);
        } else {
            let w = eta / r;
            t.iter().zip(&x).map(|(ti, xi)| (1.0 - w) * ti + w * xi).collect()
        };
        let step = distance(&next, &x);
        x = next;
        if step <= tol * (1.0 + crate::values::norm(&x)) {
            break;
        }
    }
    Ok(x)
}
