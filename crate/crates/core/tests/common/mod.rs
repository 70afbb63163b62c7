//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use gossipq::NodeValues;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// `argmin_w f(w) + (w - z)^2 / (2 gamma)` for a convex piecewise-linear `f`
/// known only through values.
///
/// Golden section localises the minimiser, which near a quadratic minimum is
/// only accurate to about the square root of machine precision. The local
/// slopes of `f` on either side are then read off by finite differences, and
/// the minimiser is recomputed exactly from the two linear pieces: either a
/// stationary point of one piece or the kink between them.
pub fn prox_oracle_1d(f: impl Fn(f64) -> f64, z: f64, gamma: f64) -> f64 {
    let obj = |w: f64| f(w) + (w - z) * (w - z) / (2.0 * gamma);
    let span = 10.0 + z.abs() + 10.0 * gamma;
    let w_g = golden_section(obj, z - span, z + span, 1e-9);

    let h = 1e-4;
    let (l1, l0) = (w_g - 2.0 * h, w_g - h);
    let (r0, r1) = (w_g + h, w_g + 2.0 * h);
    let s_l = (f(l0) - f(l1)) / h;
    let s_r = (f(r1) - f(r0)) / h;
    if (s_l - s_r).abs() < 1e-6 {
        return z - gamma * 0.5 * (s_l + s_r);
    }
    // Intersection of the two affine pieces.
    let kink = (f(r0) - s_r * r0 - f(l0) + s_l * l0) / (s_l - s_r);
    let mut best = kink;
    for (w, valid) in [(z - gamma * s_l, z - gamma * s_l <= kink), (z - gamma * s_r, z - gamma * s_r >= kink)] {
        if valid && obj(w) < obj(best) {
            best = w;
        }
    }
    best
}

/// `argmin_w g(w) + |w - v|^2 / (2 lambda)` in any dimension by golden-section
/// coordinate descent along a rotating orthonormal frame.
pub fn prox_oracle_nd(g: impl Fn(&[f64]) -> f64, v: &[f64], lambda: f64) -> Vec<f64> {
    let d = v.len();
    let obj = |w: &[f64]| g(w) + w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (2.0 * lambda);
    let mut w = v.to_vec();
    let scale = 2.0 * (1.0 + v.iter().map(|x| x.abs()).fold(0.0, f64::max) + lambda);
    for sweep in 0..400 {
        let prev = w.clone();
        let theta = 0.37 * sweep as f64;
        for axis in 0..d {
            let dir = rotated_axis(d, axis, theta);
            let line = |t: f64| {
                let p: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
                obj(&p)
            };
            let t = golden_section(line, -scale, scale, 1e-11);
            for (a, b) in w.iter_mut().zip(&dir) {
                *a += t * b;
            }
        }
        let moved = w.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-12 {
            break;
        }
    }
    w
}

/// Unit vector `axis` of the frame rotated by `theta` in the (0, 1) plane.
fn rotated_axis(d: usize, axis: usize, theta: f64) -> Vec<f64> {
    let mut e = vec![0.0; d];
    match axis {
        0 if d >= 2 => {
            e[0] = theta.cos();
            e[1] = theta.sin();
        }
        1 => {
            e[0] = -theta.sin();
            e[1] = theta.cos();
        }
        _ => e[axis] = 1.0,
    }
    e
}

/// Sample quantile by sorting: the `ceil(alpha n)`-th order statistic.
pub fn sorted_quantile(data: &[f64], alpha: f64) -> f64 {
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let k = ((alpha * s.len() as f64).ceil() as usize).max(1);
    s[k - 1]
}

/// L2 depth by direct double loop.
pub fn brute_depths(data: &NodeValues) -> Vec<f64> {
    let n = data.len();
    (0..n)
        .map(|k| {
            let mean = (0..n)
                .map(|l| data.row(k).iter().zip(data.row(l)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .sum::<f64>()
                / n as f64;
            1.0 / (1.0 + mean)
        })
        .collect()
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
