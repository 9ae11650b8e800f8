//! Small dense complex matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from a flat row-major slice.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect();
        CMatrix { dim: N, data }
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        CMatrix { dim: N, data }
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `<v|self|v>` for a (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        inner(v, &self.apply(v))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if a[pivot * n + col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        write!(f, "]")
    }
}

/// Hermitian matrix. Every constructor symmetrizes `(A + A†)/2`, so the
/// stored entries satisfy `a_ij == conj(a_ji)` exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn symmetrized(m: &CMatrix) -> Self {
        let n = m.dim();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        HermitianMatrix(out)
    }

    /// Accepts `m` only if it is Hermitian to within `tol`, then symmetrizes.
    pub fn try_from_matrix(m: &CMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermitian_defect();
        if defect.is_nan() || defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrized(m))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(CMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Real linear combination of Hermitian matrices stays Hermitian.
    pub fn add_scaled(&self, other: &HermitianMatrix, s: f64) -> Self {
        HermitianMatrix::symmetrized(&(&self.0 + &other.0.scale(s)))
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn kron(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix::symmetrized(&self.0.kron(&other.0))
    }

    /// `U† H U` for a unitary `U`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        HermitianMatrix::symmetrized(&(&(&u.adjoint() * &self.0) * u))
    }

    /// Real expectation `<v|H|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.0.quadratic_form(v).re
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Multiplies by a global phase so the first amplitude with modulus above
/// `1e-8` is real and positive.
pub fn fix_global_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Distance between two unit vectors modulo a global phase:
/// `min_φ ‖a − e^{iφ} b‖`.
pub fn phase_distance(a: &[C64], b: &[C64]) -> f64 {
    let overlap = inner(a, b).norm();
    (norm(a).powi(2) + norm(b).powi(2) - 2.0 * overlap).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(i2.kron(&i2), CMatrix::identity(4));
    }

    #[test]
    fn kron_layout_is_left_major() {
        let a = CMatrix::from_diagonal(&[1.0, 0.0]);
        let b = CMatrix::from_diagonal(&[0.0, 1.0]);
        // |0><0| ⊗ |1><1| = |01><01|
        assert_eq!(a.kron(&b), CMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn determinant_matches_product_of_diagonal() {
        let m = CMatrix::from_real_rows([[2.0, 1.0, 0.0], [0.0, 3.0, 5.0], [0.0, 0.0, -1.0]]);
        assert!((m.determinant() - C64::new(-6.0, 0.0)).norm() < 1e-14);
        let swapped = CMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
        assert!((swapped.determinant() + ONE).norm() < 1e-15);
    }

    #[test]
    fn symmetrization_is_exact() {
        let m = CMatrix::from_rows([
            [C64::new(1.0, 0.3), C64::new(0.2, 0.1)],
            [C64::new(0.25, -0.1), C64::new(-2.0, 0.0)],
        ]);
        let h = HermitianMatrix::symmetrized(&m);
        assert_eq!(h.matrix().hermitian_defect(), 0.0);
        assert_eq!(h[(0, 0)].im, 0.0);
        assert!(HermitianMatrix::try_from_matrix(&m, 1e-12).is_err());
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rot = C64::from_polar(1.0, 1.234);
        let b: Vec<C64> = a.iter().map(|z| z * rot).collect();
        assert!(phase_distance(&a, &b) < 1e-12);
        let mut c = b.clone();
        fix_global_phase(&mut c);
        assert!((c[0] - a[0]).norm() < 1e-12 && (c[1] - a[1]).norm() < 1e-12);
    }
}
