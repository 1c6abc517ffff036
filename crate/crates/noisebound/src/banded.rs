//! Banded LU factorization with partial pivoting.
//!
//! The truncated-chain generator, linearized in mixed-radix order, is a
//! banded matrix whose half-bandwidth equals the largest coordinate stride.
//! LAPACK-style band storage is used: column j lives in a strip of height
//! `2*kl + ku + 1`, the extra `kl` rows holding fill-in from row swaps.

use thiserror::Error;

#[derive(Debug, Error)]
#[error("matrix is numerically singular at column {col}")]
pub struct SingularError {
    pub col: usize,
}

pub struct BandedMatrix {
    m: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    /// Column-major strips: entry (i, j) at `ab[j * ldab + (kl + ku + i - j)]`.
    ab: Vec<f64>,
}

pub struct BandedLu {
    mat: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedMatrix {
    pub fn zeros(m: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix {
            m,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * m],
        }
    }

    /// Bytes of storage a factorization of this shape needs.
    pub fn storage_bytes(m: usize, kl: usize, ku: usize) -> usize {
        (2 * kl + ku + 1) * m * std::mem::size_of::<f64>()
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.m && j < self.m);
        debug_assert!(i + self.kl + self.ku >= j && j + self.kl >= i);
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.ab[o] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.ab[o] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + self.kl + self.ku < j || j + self.kl < i {
            return 0.0;
        }
        self.ab[self.offset(i, j)]
    }

    /// Factor in place. After pivoting the effective upper bandwidth is
    /// `kl + ku`.
    pub fn factor(mut self) -> Result<BandedLu, SingularError> {
        let m = self.m;
        let kl = self.kl;
        let kb = self.kl + self.ku; // upper bandwidth after pivoting
        let mut ipiv = vec![0usize; m];
        for j in 0..m {
            let row_end = (j + kl).min(m - 1);
            let mut p = j;
            let mut best = self.ab[self.offset(j, j)].abs();
            for i in (j + 1)..=row_end {
                let v = self.ab[self.offset(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            ipiv[j] = p;
            if best == 0.0 {
                return Err(SingularError { col: j });
            }
            if p != j {
                let col_end = (j + kb).min(m - 1);
                for k in j..=col_end {
                    let a = self.offset(j, k);
                    let b = self.offset(p, k);
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.offset(j, j)];
            let col_end = (j + kb).min(m - 1);
            for i in (j + 1)..=row_end {
                let oij = self.offset(i, j);
                let l = self.ab[oij] / pivot;
                self.ab[oij] = l;
                if l != 0.0 {
                    for k in (j + 1)..=col_end {
                        let u = self.ab[self.offset(j, k)];
                        if u != 0.0 {
                            let o = self.offset(i, k);
                            self.ab[o] -= l * u;
                        }
                    }
                }
            }
        }
        Ok(BandedLu { mat: self, ipiv })
    }
}

impl BandedLu {
    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        let m = self.mat.m;
        assert_eq!(b.len(), m);
        let kl = self.mat.kl;
        let kb = self.mat.kl + self.mat.ku;
        // forward substitution with row swaps
        for j in 0..m {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                let row_end = (j + kl).min(m - 1);
                for i in (j + 1)..=row_end {
                    b[i] -= self.mat.ab[self.mat.offset(i, j)] * bj;
                }
            }
        }
        // back substitution
        for j in (0..m).rev() {
            let x = b[j] / self.mat.ab[self.mat.offset(j, j)];
            b[j] = x;
            if x != 0.0 {
                let i_start = j.saturating_sub(kb);
                for i in i_start..j {
                    b[i] -= self.mat.ab[self.mat.offset(i, j)] * x;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_solve(a: &mut [Vec<f64>], b: &mut [f64]) {
        let m = b.len();
        for j in 0..m {
            let mut p = j;
            for i in (j + 1)..m {
                if a[i][j].abs() > a[p][j].abs() {
                    p = i;
                }
            }
            a.swap(j, p);
            b.swap(j, p);
            for i in (j + 1)..m {
                let l = a[i][j] / a[j][j];
                for k in j..m {
                    a[i][k] -= l * a[j][k];
                }
                b[i] -= l * b[j];
            }
        }
        for j in (0..m).rev() {
            b[j] /= a[j][j];
            for i in 0..j {
                b[i] -= a[i][j] * b[j];
            }
        }
    }

    #[test]
    fn matches_dense_elimination_on_random_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &(m, kl, ku) in &[(8usize, 1usize, 1usize), (20, 3, 2), (35, 5, 5), (12, 11, 11)] {
            let mut band = BandedMatrix::zeros(m, kl, ku);
            let mut dense = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in 0..m {
                    if i + ku >= j && j + kl >= i {
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        band.set(i, j, v);
                        dense[i][j] = v;
                    }
                }
                dense[i][i] += 4.0; // keep well conditioned
                band.add(i, i, 4.0);
            }
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut x_band = b.clone();
            let lu = band.factor().unwrap();
            lu.solve(&mut x_band);
            let mut x_dense = b.clone();
            let mut d = dense.clone();
            dense_solve(&mut d, &mut x_dense);
            for (xb, xd) in x_band.iter().zip(&x_dense) {
                assert!((xb - xd).abs() < 1e-10, "band vs dense mismatch");
            }
            // residual check against the original matrix
            for i in 0..m {
                let mut r = -b[i];
                for j in 0..m {
                    r += dense[i][j] * x_band[j];
                }
                assert!(r.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut band = BandedMatrix::zeros(3, 1, 1);
        band.set(0, 0, 1.0);
        band.set(1, 1, 0.0);
        band.set(2, 2, 1.0);
        assert!(band.factor().is_err());
    }
}
