//! Reference implementations written independently of the library.

#![allow(dead_code)]

/// ℓ′ for the losses used in the oracles, from their textbook definitions.
pub fn sqrt_loss_deriv(s: f64) -> f64 {
    s / (1.0 + s * s).sqrt()
}

/// ℓ(s) = ln(2 cosh(s/2)), so ℓ′(s) = tanh(s/2)/2.
pub fn sym_logistic_deriv(s: f64) -> f64 {
    0.5 * (0.5 * s).tanh()
}

/// Classical RK4 for y′ = f(y) in R^N with a fixed step.
pub fn rk4<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], y0: [f64; N], t_end: f64, steps: usize) -> [f64; N] {
    let h = t_end / steps as f64;
    let axpy = |y: &[f64; N], k: &[f64; N], a: f64| -> [f64; N] { std::array::from_fn(|i| y[i] + a * k[i]) };
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, &k1, 0.5 * h));
        let k3 = f(&axpy(&y, &k2, 0.5 * h));
        let k4 = f(&axpy(&y, &k3, h));
        y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    y
}

/// Gradient flow of ℓ(xy).
pub fn single_neuron_flow(deriv: fn(f64) -> f64, x0: f64, y0: f64, t_end: f64, steps: usize) -> (f64, f64) {
    let [x, y] = rk4(
        |s| {
            let g = deriv(s[0] * s[1]);
            [-g * s[1], -g * s[0]]
        },
        [x0, y0],
        t_end,
        steps,
    );
    (x, y)
}

pub fn normal_pdf(b: f64) -> f64 {
    (-0.5 * b * b).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ(b) = ½ + φ(b)·Σ b^(2k+1)/(1·3·…·(2k+1)), accurate for moderate |b|.
pub fn normal_cdf_series(b: f64) -> f64 {
    let mut term = b;
    let mut sum = b;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) {
        term *= b * b / (2.0 * k + 1.0);
        sum += term;
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    0.5 + normal_pdf(b) * sum
}

/// g(b) = φ(b) + bΦ(b).
pub fn smoothed_relu(b: f64) -> f64 {
    normal_pdf(b) + b * normal_cdf_series(b)
}

/// Gradient flow of the mean model in (A, b) for dimension d.
pub fn mean_model_flow(d: f64, a0: f64, b0: f64, t_end: f64, steps: usize) -> (f64, f64) {
    let [a, b] = rk4(
        |s| {
            let g = smoothed_relu(s[1]);
            let l1 = sym_logistic_deriv(s[0] * g);
            [-2.0 * d * d * l1 * g, -l1 * s[0] * normal_cdf_series(s[1])]
        },
        [a0, b0],
        t_end,
        steps,
    );
    (a, b)
}

/// ½A² − 2d²κ(b) with κ(b) = b²/2 + ln(2Φ(b)).
pub fn mean_model_invariant(d: f64, a: f64, b: f64) -> f64 {
    0.5 * a * a - 2.0 * d * d * (0.5 * b * b + (2.0 * normal_cdf_series(b)).ln())
}

/// Largest eigenvalue of a symmetric matrix by shifted power iteration.
pub fn power_iteration<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    // Shift by a Gershgorin bound so the top eigenvalue dominates in modulus.
    let shift: f64 = m.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut v: [f64; N] = std::array::from_fn(|i| 1.0 + 0.1 * i as f64);
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let w: [f64; N] = std::array::from_fn(|i| (0..N).map(|j| m[i][j] * v[j]).sum::<f64>() + shift * v[i]);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return -shift;
        }
        let next: [f64; N] = std::array::from_fn(|i| w[i] / norm);
        let rayleigh: f64 = (0..N).map(|i| next[i] * (0..N).map(|j| m[i][j] * next[j]).sum::<f64>()).sum();
        let done = (rayleigh - lambda).abs() <= 1e-15 * rayleigh.abs().max(1.0)
            && next.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-13);
        v = next;
        lambda = rayleigh;
        if done {
            break;
        }
    }
    lambda
}

/// Central difference of a scalar function.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central-difference gradient in R^N.
pub fn fd_gradient<const N: usize>(f: impl Fn(&[f64; N]) -> f64, x: &[f64; N], h: f64) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut up = *x;
        let mut dn = *x;
        up[i] += h;
        dn[i] -= h;
        (f(&up) - f(&dn)) / (2.0 * h)
    })
}

/// f(x) = a⁻ Σ ReLU(b − x_i) + a⁺ Σ ReLU(x_i + b).
pub fn relu_output(a_minus: f64, a_plus: f64, b: f64, x: &[f64]) -> f64 {
    x.iter().map(|&xi| a_minus * (b - xi).max(0.0) + a_plus * (xi + b).max(0.0)).sum()
}

/// Mean logistic loss ln(1 + e^(−y f)).
pub fn relu_mean_loss(params: &[f64; 3], xs: &[f64], ys: &[f64], d: usize) -> f64 {
    let n = ys.len();
    (0..n)
        .map(|i| {
            let m = ys[i] * relu_output(params[0], params[1], params[2], &xs[i * d..(i + 1) * d]);
            if m > 0.0 {
                (-m).exp().ln_1p()
            } else {
                -m + m.exp().ln_1p()
            }
        })
        .sum::<f64>()
        / n as f64
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}
