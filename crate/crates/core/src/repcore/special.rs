//! Special functions behind the SOAP expansion.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

/// Gauss–Legendre nodes and weights mapped onto `[a, b]`.
pub(crate) fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Exponentially scaled modified spherical Bessel functions of the first kind,
/// `e^{-x} i_l(x)` for `l = 0..=l_max`, `x ≥ 0`.
pub(crate) fn scaled_bessel_i(l_max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > l_max);
    if x < 1.0 + l_max as f64 {
        let scale = (-x).exp();
        let half_x2 = 0.5 * x * x;
        // x^l / (2l+1)!!
        let mut lead = 1.0;
        for (l, o) in out.iter_mut().enumerate().take(l_max + 1) {
            if l > 0 {
                lead *= x / (2 * l + 1) as f64;
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..200 {
                term *= half_x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            *o = scale * lead * sum;
        }
    } else {
        let e2 = (-2.0 * x).exp();
        out[0] = (1.0 - e2) / (2.0 * x);
        if l_max >= 1 {
            out[1] = (1.0 + e2) / (2.0 * x) - out[0] / x;
        }
        for l in 1..l_max {
            out[l + 1] = out[l - 1] - (2 * l + 1) as f64 / x * out[l];
        }
    }
}

/// Real spherical harmonics `Y_lm(r̂)` for `l ≤ l_max`, stored at index
/// `l² + l + m` (`m = -l..=l`). `dir` need not be normalised but must be non-zero.
pub(crate) fn real_spherical_harmonics(l_max: usize, dir: [f64; 3], out: &mut [f64]) {
    debug_assert!(out.len() >= (l_max + 1) * (l_max + 1));
    let r = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    let ct = (dir[2] / r).clamp(-1.0, 1.0);
    let st = (1.0 - ct * ct).max(0.0).sqrt();
    let phi = dir[1].atan2(dir[0]);

    // Associated Legendre P_l^m(ct) without the Condon–Shortley phase.
    let size = l_max + 1;
    let mut p = vec![0.0; size * size];
    let idx = |l: usize, m: usize| l * size + m;
    p[idx(0, 0)] = 1.0;
    for m in 1..=l_max {
        p[idx(m, m)] = p[idx(m - 1, m - 1)] * (2 * m - 1) as f64 * st;
    }
    for m in 0..l_max {
        p[idx(m + 1, m)] = ct * (2 * m + 1) as f64 * p[idx(m, m)];
    }
    for m in 0..=l_max {
        for l in (m + 2)..=l_max {
            p[idx(l, m)] = (ct * (2 * l - 1) as f64 * p[idx(l - 1, m)]
                - (l + m - 1) as f64 * p[idx(l - 2, m)])
                / (l - m) as f64;
        }
    }

    for l in 0..=l_max {
        let base = l * l + l;
        let k0 = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
        out[base] = k0 * p[idx(l, 0)];
        // (l-m)!/(l+m)! built up incrementally.
        let mut ratio = 1.0;
        for m in 1..=l {
            ratio /= ((l + m) * (l - m + 1)) as f64;
            let k = core::f64::consts::SQRT_2 * k0 * ratio.sqrt() * p[idx(l, m)];
            let (s, c) = (m as f64 * phi).sin_cos();
            out[base + m] = k * c;
            out[base - m] = k * s;
        }
    }
}
