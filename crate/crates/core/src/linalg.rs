//! Small dense helpers shared by the tensor and optimizer code.

use std::ops::{Add, Mul};

use num_traits::Zero;

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn axpy(a: f64, x: &Vec3, b: f64, y: &Vec3) -> Vec3 {
    [a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]
}

/// Unit vector from polar angle `theta` and azimuth `phi`.
pub(crate) fn spherical(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Contracts every mode of a tensor with its own matrix.
///
/// `input` has `n` modes of extent `d_in` with the last mode fastest;
/// `mats[j]` is a row-major `d_out × d_in` matrix applied to mode `j`. The
/// result has `n` modes of extent `d_out`, same ordering. Summation order is
/// fixed, so the result does not depend on scheduling.
pub(crate) fn contract_modes<T, M>(input: &[T], n: usize, d_in: usize, d_out: usize, mats: &[M]) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T>,
    M: AsRef<[T]>,
{
    debug_assert_eq!(input.len(), d_in.pow(n as u32));
    debug_assert_eq!(mats.len(), n);
    let mut cur = input.to_vec();
    // Mode j is contracted while modes < j already have extent d_out.
    for (j, mat) in mats.iter().enumerate() {
        let mat = mat.as_ref();
        debug_assert_eq!(mat.len(), d_out * d_in);
        let outer = d_out.pow(j as u32);
        let inner = d_in.pow((n - j - 1) as u32);
        let mut next = vec![T::zero(); outer * d_out * inner];
        for o in 0..outer {
            let src = &cur[o * d_in * inner..(o + 1) * d_in * inner];
            let dst = &mut next[o * d_out * inner..(o + 1) * d_out * inner];
            for r in 0..d_out {
                let row = &mat[r * d_in..(r + 1) * d_in];
                let out = &mut dst[r * inner..(r + 1) * inner];
                for (c, &w) in row.iter().enumerate() {
                    let col = &src[c * inner..(c + 1) * inner];
                    for (y, &x) in out.iter_mut().zip(col) {
                        *y = *y + w * x;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_matches_explicit_sum() {
        // 2 modes of extent 3 -> extent 2.
        let t: Vec<f64> = (0..9).map(|i| i as f64 + 1.0).collect();
        let a = [1.0, 2.0, 0.0, 0.0, -1.0, 3.0];
        let b = [0.5, 0.0, 1.0, 2.0, 1.0, -1.0];
        let out = contract_modes(&t, 2, 3, 2, &[a, b]);
        for i in 0..2 {
            for k in 0..2 {
                let mut s = 0.0;
                for x in 0..3 {
                    for y in 0..3 {
                        s += a[i * 3 + x] * b[k * 3 + y] * t[x * 3 + y];
                    }
                }
                assert!((out[i * 2 + k] - s).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_is_right_handed() {
        assert_eq!(cross(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
    }
}
