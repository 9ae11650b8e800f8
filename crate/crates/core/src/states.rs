//! Pure two-qubit states: Schmidt decomposition, entanglement, and the states
//! attaining quantum bounds.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fix_global_phase, norm, CMatrix, HermitianMatrix, C64};
use crate::qops::{bell_basis_unitary, Angle, Basis, BellOperator};
use crate::spectra;

pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct PureState {
    basis: Basis,
    amplitudes: [C64; 4],
}

#[derive(Deserialize)]
struct RawState {
    basis: Basis,
    amplitudes: [C64; 4],
}

impl TryFrom<RawState> for PureState {
    type Error = Error;
    fn try_from(r: RawState) -> Result<Self> {
        PureState::new(r.amplitudes, r.basis)
    }
}

impl PureState {
    pub fn new(amplitudes: [C64; 4], basis: Basis) -> Result<Self> {
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm {n} differs from 1")));
        }
        Ok(PureState { basis, amplitudes })
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(amplitudes: &[C64], basis: Basis) -> Result<Self> {
        let v: [C64; 4] = amplitudes
            .try_into()
            .map_err(|_| Error::invalid(format!("expected 4 amplitudes, got {}", amplitudes.len())))?;
        let n = norm(&v);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Ok(PureState {
            basis,
            amplitudes: v.map(|z| z / n),
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amplitudes
    }

    pub fn to_computational(&self) -> PureState {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Bell => self.rotated(&bell_basis_unitary(), Basis::Computational),
        }
    }

    pub fn to_bell(&self) -> PureState {
        match self.basis {
            Basis::Bell => self.clone(),
            Basis::Computational => self.rotated(&bell_basis_unitary().adjoint(), Basis::Bell),
        }
    }

    fn rotated(&self, u: &CMatrix, basis: Basis) -> PureState {
        let v = u.apply(&self.amplitudes);
        PureState {
            basis,
            amplitudes: [v[0], v[1], v[2], v[3]],
        }
    }

    /// Same state with the first non-negligible amplitude real positive.
    pub fn with_canonical_phase(&self) -> PureState {
        let mut out = self.clone();
        fix_global_phase(&mut out.amplitudes);
        out
    }

    /// Amplitudes as the 2×2 matrix `M[i][j] = <ij|ψ>` (left index first).
    fn amplitude_matrix(&self) -> [[C64; 2]; 2] {
        let a = self.to_computational().amplitudes;
        [[a[0], a[1]], [a[2], a[3]]]
    }
}

pub fn bell_state(k: usize) -> PureState {
    let mut a = [C64::new(0.0, 0.0); 4];
    a[k] = C64::new(1.0, 0.0);
    PureState {
        basis: Basis::Bell,
        amplitudes: a,
    }
    .to_computational()
}

pub fn singlet() -> PureState {
    bell_state(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtData {
    /// Descending, nonnegative, squares summing to one.
    pub coefficients: [f64; 2],
    pub left_basis: [[C64; 2]; 2],
    pub right_basis: [[C64; 2]; 2],
}

impl SchmidtData {
    /// `Σ_k λ_k |l_k> ⊗ |r_k>` in the computational basis.
    pub fn reconstruct(&self) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j] += self.left_basis[k][i] * self.right_basis[k][j] * self.coefficients[k];
                }
            }
        }
        out
    }
}

pub fn schmidt(psi: &PureState) -> Result<SchmidtData> {
    let n = norm(&psi.amplitudes);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!("state norm {n} differs from 1")));
    }
    let m = psi.amplitude_matrix();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    // λ1² + λ2² = 1 and λ1 λ2 = |det M|
    let disc = (1.0 - 4.0 * det * det).max(0.0).sqrt();
    let coefficients = [((1.0 + disc) / 2.0).sqrt(), ((1.0 - disc) / 2.0).max(0.0).sqrt()];

    let mm = CMatrix::from_rows([
        [
            m[0][0] * m[0][0].conj() + m[0][1] * m[0][1].conj(),
            m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj(),
        ],
        [
            m[1][0] * m[0][0].conj() + m[1][1] * m[0][1].conj(),
            m[1][0] * m[1][0].conj() + m[1][1] * m[1][1].conj(),
        ],
    ]);
    let s = spectra::eigen(&HermitianMatrix::symmetrized(&mm))?;
    let left = [s.eigenvectors[1].clone(), s.eigenvectors[0].clone()];
    let mut left_basis = [[C64::new(0.0, 0.0); 2]; 2];
    let mut right_basis = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..2 {
        left_basis[k] = [left[k][0], left[k][1]];
    }
    // r_k[j] = Σ_i conj(l_k[i]) M[i][j] / λ_k
    let project = |l: &[C64; 2]| -> [C64; 2] {
        [
            l[0].conj() * m[0][0] + l[1].conj() * m[1][0],
            l[0].conj() * m[0][1] + l[1].conj() * m[1][1],
        ]
    };
    let r0 = project(&left_basis[0]);
    let n0 = norm(&r0);
    right_basis[0] = [r0[0] / n0, r0[1] / n0];
    let r1 = project(&left_basis[1]);
    let n1 = norm(&r1);
    right_basis[1] = if n1 > 1e-8 {
        [r1[0] / n1, r1[1] / n1]
    } else {
        [-right_basis[0][1].conj(), right_basis[0][0].conj()]
    };
    Ok(SchmidtData {
        coefficients,
        left_basis,
        right_basis,
    })
}

/// Concurrence `2 λ₁ λ₂`, computed as `2 |det M|`.
pub fn entanglement(psi: &PureState) -> Result<f64> {
    let n = norm(&psi.amplitudes);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid(format!("state norm {n} differs from 1")));
    }
    let m = psi.amplitude_matrix();
    Ok((2.0 * (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm()).min(1.0))
}

/// `(U(θ) ⊗ 1)|ψ⁻>` with `U(θ) = [[sin θ, −cos θ], [cos θ, sin θ]]`.
pub fn max_violation_family(theta: Angle) -> PureState {
    let (s, c) = theta.0.sin_cos();
    let h = FRAC_1_SQRT_2;
    // ψ⁻ has amplitude matrix [[0, h], [−h, 0]]
    let m = [[c * h, s * h], [-s * h, c * h]];
    PureState {
        basis: Basis::Computational,
        amplitudes: [m[0][0], m[0][1], m[1][0], m[1][1]].map(|x| C64::new(x, 0.0)),
    }
}

/// `√3/2 |φ⁻> + 1/2 |ψ⁺>`, in the Bell basis.
pub fn psi_max_33() -> PureState {
    PureState {
        basis: Basis::Bell,
        amplitudes: [0.0, 0.5, 0.0, 3f64.sqrt() / 2.0].map(|x| C64::new(x, 0.0)),
    }
}

/// Entanglement across the eigenspace of the maximal eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenspaceEntanglement {
    pub lambda_max: f64,
    pub multiplicity: usize,
    /// One value per basis vector of the eigenspace.
    pub per_vector: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

const SCAN: usize = 48;

/// For a degenerate top eigenspace the extremes are scanned over
/// `cos a |v_i> + e^{iφ} sin a |v_j>` for every pair of basis vectors.
pub fn eigenspace_entanglement(o: &BellOperator) -> Result<EigenspaceEntanglement> {
    let s = spectra::eigen(&o.matrix)?;
    let lambda_max = s.max();
    let first = s
        .eigenvalues
        .iter()
        .position(|&l| l >= lambda_max - spectra::DEGENERACY_GAP)
        .unwrap();
    let vecs: Vec<PureState> = s.eigenvectors[first..]
        .iter()
        .map(|v| PureState::normalized(v, o.basis))
        .collect::<Result<_>>()?;
    let per_vector = vecs.iter().map(entanglement).collect::<Result<Vec<_>>>()?;
    let (mut min, mut max) = per_vector
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            for ka in 0..=SCAN {
                let a = std::f64::consts::FRAC_PI_2 * ka as f64 / SCAN as f64;
                for kp in 0..2 * SCAN {
                    let phase = C64::from_polar(1.0, std::f64::consts::PI * kp as f64 / SCAN as f64);
                    let mix: Vec<C64> = vecs[i]
                        .amplitudes
                        .iter()
                        .zip(&vecs[j].amplitudes)
                        .map(|(x, y)| x * a.cos() + y * phase * a.sin())
                        .collect();
                    let e = entanglement(&PureState::normalized(&mix, o.basis)?)?;
                    min = min.min(e);
                    max = max.max(e);
                }
            }
        }
    }
    Ok(EigenspaceEntanglement {
        lambda_max,
        multiplicity: vecs.len(),
        per_vector,
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_distance;
    use crate::presets;
    use crate::qops::{bell_operator, to_bell_basis};
    use crate::schedule::AngleSchedule;
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn product_and_singlet() {
        let p = PureState::new([c(1.0), c(0.0), c(0.0), c(0.0)], Basis::Computational).unwrap();
        let s = schmidt(&p).unwrap();
        assert_eq!(s.coefficients, [1.0, 0.0]);
        assert_eq!(entanglement(&p).unwrap(), 0.0);
        assert!(phase_distance(&s.reconstruct(), p.amplitudes()) < 1e-12);

        let s = schmidt(&singlet()).unwrap();
        assert!(s.coefficients.iter().all(|x| (x - FRAC_1_SQRT_2).abs() < 1e-12));
        assert!(phase_distance(&s.reconstruct(), singlet().amplitudes()) < 1e-12);
        for k in 0..4 {
            assert!((entanglement(&bell_state(k)).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(PureState::new([c(1.0), c(1.0), c(0.0), c(0.0)], Basis::Computational).is_err());
        let json = r#"{"basis":"computational","amplitudes":[[1,0],[1,0],[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<PureState>(json).is_err());
    }

    #[test]
    fn family_at_half_pi_is_singlet() {
        let s = max_violation_family(Angle(PI / 2.0));
        assert!(phase_distance(s.amplitudes(), singlet().amplitudes()) < 1e-15);
        for k in 0..30 {
            let e = entanglement(&max_violation_family(Angle(0.21 * k as f64))).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    fn family_best(o: &BellOperator) -> f64 {
        let value = |t: f64| o.matrix.expectation(max_violation_family(Angle(t)).amplitudes());
        let n = 2000;
        let k = (0..n)
            .max_by(|&a, &b| value(a as f64 * PI / n as f64).total_cmp(&value(b as f64 * PI / n as f64)))
            .unwrap();
        let (mut lo, mut hi) = ((k as f64 - 1.0) * PI / n as f64, (k as f64 + 1.0) * PI / n as f64);
        for _ in 0..100 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if value(m1) < value(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        value(0.5 * (lo + hi))
    }

    #[test]
    fn family_attains_ch_bound_up_to_orientation() {
        let bound = (2f64.sqrt() - 1.0) / 2.0;
        // the CH sweep schedule with the right-hand directions mirrored
        let mirrored: AngleSchedule = "a=0,b=2t,c=-t,d=-3t".parse().unwrap();
        let o = bell_operator(
            &presets::ch_inequality(),
            &mirrored.angles_at(PI / 4.0),
            &presets::clauser_horne(),
        )
        .unwrap();
        assert!((family_best(&o) - bound).abs() < 1e-9);

        // as written, the optimum has det M < 0, outside U(θ)⊗1|ψ⁻>
        let o = bell_operator(
            &presets::ch_inequality(),
            &presets::ch_sweep_schedule().angles_at(PI / 4.0),
            &presets::clauser_horne(),
        )
        .unwrap();
        assert!((family_best(&o) + 0.5).abs() < 1e-9);
        let flip = CMatrix::from_diagonal(&[1.0, -1.0, 1.0, -1.0]);
        let best = (0..2000)
            .map(|k| {
                let v = flip.apply(max_violation_family(Angle(PI * k as f64 / 1000.0)).amplitudes());
                o.matrix.expectation(&v)
            })
            .fold(f64::MIN, f64::max);
        assert!((best - bound).abs() < 1e-5);
    }

    #[test]
    fn psi_max_landmarks() {
        let psi = psi_max_33();
        assert!((entanglement(&psi).unwrap() - 1.0).abs() < 1e-12);
        let angles = presets::i33_symmetric_schedule().angles_at(PI / 3.0);
        let o = bell_operator(&presets::i33_inequality(), &angles, &presets::three_by_three()).unwrap();
        let b = to_bell_basis(&o).unwrap();
        assert!((b.matrix.expectation(psi.amplitudes()) - 0.25).abs() < 1e-12);
        assert!((o.matrix.expectation(psi.to_computational().amplitudes()) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn basis_round_trip() {
        let p = PureState::normalized(
            &[c(0.3), C64::new(0.1, -0.4), c(-0.2), C64::new(0.0, 0.7)],
            Basis::Computational,
        )
        .unwrap();
        let back = p.to_bell().to_computational();
        for (a, b) in back.amplitudes().iter().zip(p.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn degenerate_top_eigenspace() {
        let st = presets::single_direction();
        let angles = [(1, Angle(0.0)), (2, Angle(0.7))].into_iter().collect();
        let o = bell_operator(&presets::trivial_inequality(), &angles, &st).unwrap();
        let e = eigenspace_entanglement(&o).unwrap();
        // span{|00>, |01>, |1>⊗F(θ)-range}: product and entangled members
        assert_eq!(e.multiplicity, 3);
        assert!(e.per_vector.iter().all(|&x| x < 1e-12));
        assert!(e.min < 1e-12 && e.max > 0.9, "{e:?}");
    }
}
