//! Spectral decomposition of small Hermitian matrices and quantum bounds of
//! Bell operators.

mod closed_form;

use serde::Serialize;

pub use closed_form::{
    cardano_eigenvalues, cardano_eigenvalues_with, o22_closed_form, o33_block_decompose, CardanoCoefficients,
    CardanoReading, BLOCK_TOL,
};

use crate::error::{Error, Result};
use crate::linalg::{fix_global_phase, CMatrix, HermitianMatrix, C64};
use crate::qops::{Basis, BellOperator};

pub const MAX_DIM: usize = 16;
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this form one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Tie-break window for the maximal eigenvalue.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
    /// `max_k ‖H v_k − λ_k v_k‖` of the rotation output, before cluster
    /// bases are canonicalized.
    pub residual: f64,
    /// Index ranges of eigenvalue clusters with more than one member.
    pub degenerate: Vec<std::ops::Range<usize>>,
}

impl Spectrum {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Full eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvectors of a degenerate cluster are re-derived by Gram–Schmidt of
/// the cluster projector applied to `e_0, e_1, ...`, and every vector has its
/// first non-negligible amplitude made real positive, so the output does not
/// depend on rotation order.
pub fn eigen(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::invalid(format!(
            "eigen supports dimensions 1..={MAX_DIM}, got {n}"
        )));
    }
    let scale = 1.0f64.max(h.matrix().frobenius_norm());
    if !scale.is_finite() {
        return Err(Error::numeric("matrix has non-finite entries"));
    }
    let (diag, v) = jacobi(h.matrix().clone(), scale)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors: Vec<Vec<C64>> = order.iter().map(|&k| v.column(k)).collect();

    // Checked before canonicalization, since mixing a near-degenerate cluster
    // moves the residual by up to the cluster width.
    let residual = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, v)| {
            let hv = h.matrix().apply(v);
            hv.iter()
                .zip(v)
                .map(|(a, b)| (a - b * l).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    if residual > 1e-10 * scale {
        return Err(Error::numeric(format!("eigen residual {residual:e} too large")));
    }

    let mut degenerate = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || eigenvalues[k] - eigenvalues[k - 1] >= DEGENERACY_GAP * scale {
            if k - start > 1 {
                let basis = canonical_eigenbasis(&eigenvectors[start..k]);
                eigenvectors.splice(start..k, basis);
                degenerate.push(start..k);
            }
            start = k;
        }
    }
    eigenvectors.iter_mut().for_each(|v| fix_global_phase(v));

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual,
        degenerate,
    })
}

/// Like [`eigen`] for a raw matrix; rejects input that is not Hermitian.
pub fn eigen_checked(m: &CMatrix) -> Result<Spectrum> {
    let tol = 1e-12 * 1.0f64.max(m.frobenius_norm());
    eigen(&HermitianMatrix::try_from_matrix(m, tol)?)
}

/// Returns the diagonal after convergence and the accumulated rotation.
fn jacobi(mut a: CMatrix, scale: f64) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.dim();
    let mut v = CMatrix::identity(n);
    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let target = 1e-14 * scale;
    let mut sweeps = 0;
    while off(&a) >= target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let z = a[(p, q)];
                let r = z.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = (z / r).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let (upp, upq, uqp, uqq) = (C64::new(c, 0.0), C64::new(s, 0.0), phase * (-s), phase * c);

                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * upp + y * uqp;
                    a[(k, q)] = x * upq + y * uqq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * upp + y * uqp;
                    v[(k, q)] = x * upq + y * uqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = upp.conj() * x + uqp.conj() * y;
                    a[(q, k)] = upq.conj() * x + uqq.conj() * y;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    Ok(((0..n).map(|k| a[(k, k)].re).collect(), v))
}

/// Orthonormal basis of `span(vectors)` obtained from `P e_0, P e_1, ...`.
fn canonical_eigenbasis(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = vectors[0].len();
    let m = vectors.len();
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(m);
    for e in 0..n {
        if out.len() == m {
            break;
        }
        // P e = Σ v (v† e)
        let mut w = vec![C64::new(0.0, 0.0); n];
        for v in vectors {
            let coef = v[e].conj();
            w.iter_mut().zip(v).for_each(|(x, y)| *x += y * coef);
        }
        for _ in 0..2 {
            for u in &out {
                let proj = crate::linalg::inner(u, &w);
                w.iter_mut().zip(u).for_each(|(x, y)| *x -= y * proj);
            }
        }
        let nw = crate::linalg::norm(&w);
        if nw > 1e-6 {
            out.push(w.into_iter().map(|x| x / nw).collect());
        }
    }
    if out.len() < m {
        return vectors.to_vec();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumBound {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `max |λ|`.
    pub norm: f64,
    /// Eigenvector of `lambda_max`, expressed in the operator's basis.
    pub argmax_state: Vec<C64>,
    pub basis: Basis,
    /// Number of eigenvalues within the tie window of `lambda_max`.
    pub multiplicity: usize,
}

pub fn quantum_bound(o: &BellOperator) -> Result<QuantumBound> {
    let s = eigen(&o.matrix)?;
    let lambda_max = s.max();
    let first = s.eigenvalues.iter().position(|&l| l >= lambda_max - TIE_TOL).unwrap();
    Ok(QuantumBound {
        lambda_min: s.min(),
        lambda_max,
        norm: s.min().abs().max(lambda_max.abs()),
        argmax_state: s.eigenvectors[first].clone(),
        basis: o.basis,
        multiplicity: s.eigenvalues.len() - first,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, norm};
    use crate::presets;
    use crate::qops::{self, sigma, Angle};
    use std::f64::consts::PI;

    #[test]
    fn diagonal_input() {
        let s = eigen(&HermitianMatrix::symmetrized(&CMatrix::from_diagonal(&[3.0, 1.0, 2.0]))).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.eigenvectors[0][1], C64::new(1.0, 0.0));
    }

    #[test]
    fn near_degenerate_cluster_is_accepted() {
        let d = [0.0, 1.0, 1.0 + 6e-10, 1.0 + 1.2e-9];
        let h =
            HermitianMatrix::symmetrized(&CMatrix::from_diagonal(&d)).conjugate_by(&crate::qops::bell_basis_unitary());
        let s = eigen(&h).unwrap();
        assert_eq!(s.degenerate, vec![1..4]);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn sigma_spectrum() {
        for k in 0..20 {
            let s = eigen(&sigma(Angle(k as f64 * 0.37))).unwrap();
            assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14 && (s.eigenvalues[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn o11_is_zero_one() {
        let st = presets::single_direction();
        for k in 0..50 {
            let th = k as f64 * 0.13;
            let angles = [(1, Angle(0.0)), (2, Angle(th))].into_iter().collect();
            let o = qops::bell_operator(&presets::trivial_inequality(), &angles, &st).unwrap();
            let s = eigen(&o.matrix).unwrap();
            // identity block plus the rank-one projector F(θ)
            for (l, e) in s.eigenvalues.iter().zip([0.0, 1.0, 1.0, 1.0]) {
                assert!((l - e).abs() < 1e-12);
            }
            assert_eq!(s.degenerate, vec![1..4]);
        }
    }

    #[test]
    fn complex_matrix() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = CMatrix::from_rows([
            [C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            [C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ]);
        let s = eigen_checked(&m).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14 && (s.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(s.residual < 1e-14);
        assert!(inner(&s.eigenvectors[0], &s.eigenvectors[1]).norm() < 1e-14);
        assert!(s.eigenvectors.iter().all(|v| (norm(v) - 1.0).abs() < 1e-14));
        assert!(s.eigenvectors.iter().all(|v| v[0].im == 0.0 && v[0].re > 0.0));
    }

    #[test]
    fn rejects_non_hermitian_and_oversized() {
        let m = CMatrix::from_real_rows([[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(eigen_checked(&m), Err(Error::NotHermitian(_))));
        assert!(eigen(&HermitianMatrix::identity(17)).is_err());
    }

    #[test]
    fn degenerate_basis_is_canonical() {
        let s = eigen(&HermitianMatrix::identity(3)).unwrap();
        for (k, v) in s.eigenvectors.iter().enumerate() {
            for (j, z) in v.iter().enumerate() {
                assert!((z - C64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn landmark_bounds() {
        let o = qops::chsh_operator(Angle(0.0), Angle(PI / 2.0), Angle(PI / 4.0), Angle(3.0 * PI / 4.0));
        let b = quantum_bound(&o).unwrap();
        assert!((b.norm - 2.0 * 2f64.sqrt()).abs() < 1e-12);

        let s = presets::three_by_three();
        let angles = presets::i33_symmetric_schedule().angles_at(PI / 3.0);
        let o = qops::bell_operator(&presets::i33_inequality(), &angles, &s).unwrap();
        let b = quantum_bound(&o).unwrap();
        assert!((b.lambda_max - 0.25).abs() < 1e-12);
        assert_eq!(b.multiplicity, 1);
    }
}
