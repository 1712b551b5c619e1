//! Seeded random isometries.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub(crate) struct GaussianSource {
    rng: ChaCha8Rng,
}

impl GaussianSource {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn uniform(&mut self) -> f64 {
        // (0, 1], never zero so the logarithm below is finite
        ((self.rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex normal sample (Box-Muller).
    pub(crate) fn complex(&mut self) -> Complex64 {
        let r = libm::sqrt(-libm::log(self.uniform()));
        let phi = 2.0 * core::f64::consts::PI * self.uniform();
        Complex64::new(r * libm::cos(phi), r * libm::sin(phi))
    }
}

/// Row-major `rows x cols` matrix with orthonormal columns when `rows >= cols`
/// (orthonormal rows otherwise), from modified Gram-Schmidt on a Gaussian
/// matrix.
pub(crate) fn random_isometry(
    rows: usize,
    cols: usize,
    src: &mut GaussianSource,
) -> Vec<Complex64> {
    if rows >= cols {
        let mut cols_vecs: Vec<Vec<Complex64>> = (0..cols)
            .map(|_| (0..rows).map(|_| src.complex()).collect())
            .collect();
        orthonormalize(&mut cols_vecs, src);
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); rows * cols];
        for (c, v) in cols_vecs.iter().enumerate() {
            for (r, &x) in v.iter().enumerate() {
                out[r * cols + c] = x;
            }
        }
        out
    } else {
        let mut row_vecs: Vec<Vec<Complex64>> = (0..rows)
            .map(|_| (0..cols).map(|_| src.complex()).collect())
            .collect();
        orthonormalize(&mut row_vecs, src);
        row_vecs.into_iter().flatten().collect()
    }
}

fn orthonormalize(vecs: &mut [Vec<Complex64>], src: &mut GaussianSource) {
    for i in 0..vecs.len() {
        loop {
            // two passes of projection keep the result orthogonal to machine precision
            for _ in 0..2 {
                for j in 0..i {
                    let (head, tail) = vecs.split_at_mut(i);
                    let proj: Complex64 = head[j]
                        .iter()
                        .zip(tail[0].iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    for (x, a) in tail[0].iter_mut().zip(head[j].iter()) {
                        *x -= proj * a;
                    }
                }
            }
            let norm = libm::sqrt(vecs[i].iter().map(|x| x.norm_sqr()).sum::<f64>());
            if norm > 1e-8 {
                for x in vecs[i].iter_mut() {
                    *x /= norm;
                }
                break;
            }
            for x in vecs[i].iter_mut() {
                *x = src.complex();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(m: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
        let mut g = alloc::vec![Complex64::new(0.0, 0.0); cols * cols];
        for a in 0..cols {
            for b in 0..cols {
                g[a * cols + b] = (0..rows)
                    .map(|r| m[r * cols + a].conj() * m[r * cols + b])
                    .sum();
            }
        }
        g
    }

    #[test]
    fn isometry_columns_orthonormal() {
        let mut src = GaussianSource::new(7);
        for (rows, cols) in [(4, 2), (8, 8), (16, 3), (1, 1)] {
            let w = random_isometry(rows, cols, &mut src);
            let g = gram(&w, rows, cols);
            for a in 0..cols {
                for b in 0..cols {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((g[a * cols + b] - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wide_matrix_has_orthonormal_rows() {
        let mut src = GaussianSource::new(3);
        let w = random_isometry(2, 5, &mut src);
        for a in 0..2 {
            for b in 0..2 {
                let s: Complex64 = (0..5).map(|c| w[a * 5 + c] * w[b * 5 + c].conj()).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s.re - expect).abs() < 1e-12 && s.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn seeded_is_deterministic() {
        let a = random_isometry(4, 2, &mut GaussianSource::new(11));
        let b = random_isometry(4, 2, &mut GaussianSource::new(11));
        assert_eq!(a, b);
    }
}
