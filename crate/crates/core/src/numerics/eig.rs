use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Largest eigenvalue of a symmetric 2×2 or 3×3 matrix in closed form.
///
/// Symmetry is checked to `1e-12` relative to the largest entry (absolute
/// for entries below one).
pub fn sym_eig_max<const N: usize>(m: &[[f64; N]; N]) -> Result<f64> {
    let scale = m.iter().flat_map(|row| row.iter()).fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let asym = (0..N)
        .flat_map(|i| (i + 1..N).map(move |j| (i, j)))
        .fold(0.0_f64, |acc, (i, j)| acc.max((m[i][j] - m[j][i]).abs()));
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    match N {
        1 => Ok(m[0][0]),
        2 => Ok(eig_max_2(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])),
        3 => {
            let sym = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i]);
            Ok(eig_max_3([
                [m[0][0], sym(0, 1), sym(0, 2)],
                [sym(0, 1), m[1][1], sym(1, 2)],
                [sym(0, 2), sym(1, 2), m[2][2]],
            ]))
        }
        _ => Err(Error::InvalidInput(format!("closed-form eigenvalues need a 2x2 or 3x3 matrix, got {N}x{N}"))),
    }
}

#[inline]
fn eig_max_2(a: f64, b: f64, d: f64) -> f64 {
    0.5 * (a + d) + (0.5 * (a - d)).hypot(b)
}

// Trigonometric solution of the characteristic cubic (Smith 1961).
fn eig_max_3(a: [[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if p1 == 0.0 {
        return a[0][0].max(a[1][1]).max(a[2][2]);
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let d0 = a[0][0] - q;
    let d1 = a[1][1] - q;
    let d2 = a[2][2] - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b =
        [[d0 / p, a[0][1] / p, a[0][2] / p], [a[0][1] / p, d1 / p, a[1][2] / p], [a[0][2] / p, a[1][2] / p, d2 / p]];
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (0.5 * det).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}
