//! Closed-form spectra: the radical form for the CH operator and the
//! trigonometric Cardano solution for the 3×3 block of the I33 operator.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qops::{Angle, Basis, BellOperator};

/// Off-block and imaginary parts tolerated by [`o33_block_decompose`].
pub const BLOCK_TOL: f64 = 1e-10;

/// Eigenvalues `(±√(1 ± s) − 1)/2`, `s = sin(α−β)·sin(γ−δ)`, ascending.
pub fn o22_closed_form(alpha: Angle, beta: Angle, gamma: Angle, delta: Angle) -> [f64; 4] {
    let s = (alpha.0 - beta.0).sin() * (gamma.0 - delta.0).sin();
    let (rp, rm) = ((1.0 + s).max(0.0).sqrt(), (1.0 - s).max(0.0).sqrt());
    let mut out = [(-rp - 1.0) / 2.0, (-rm - 1.0) / 2.0, (rm - 1.0) / 2.0, (rp - 1.0) / 2.0];
    out.sort_by(f64::total_cmp);
    out
}

/// Splits a Bell-basis operator into its `(0,0)` entry and trailing 3×3 block.
pub fn o33_block_decompose(o: &BellOperator) -> Result<(f64, [[f64; 3]; 3])> {
    if o.basis != Basis::Bell {
        return Err(Error::BasisMismatch {
            expected: "bell".into(),
            got: "computational".into(),
        });
    }
    if o.dim() != 4 {
        return Err(Error::invalid("block decomposition needs a 4×4 operator"));
    }
    let m = o.matrix.matrix();
    for k in 1..4 {
        let off = m[(0, k)].norm().max(m[(k, 0)].norm());
        if off > BLOCK_TOL {
            return Err(Error::numeric(format!("off-block entry ({},{}) = {off:e}", 1, k + 1)));
        }
    }
    let mut o3 = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let z = m[(i + 1, j + 1)];
            if z.im.abs() > BLOCK_TOL {
                return Err(Error::numeric(format!("block entry ({},{}) is not real", i + 2, j + 2)));
            }
            o3[i][j] = z.re;
        }
    }
    Ok((m[(0, 0)].re, o3))
}

/// Characteristic polynomial `λ³ + bλ² + cλ + d` of a 3×3 block and the
/// Cardano quantities derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CardanoCoefficients {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub u: f64,
    /// Angle whose cosine is `(9bc − 2b³ − 27d) / (54 u √|u|)`; 0 when `u = 0`.
    pub xi: f64,
}

impl CardanoCoefficients {
    /// The polynomial is formed exactly from the (binary) entries, and `ξ`
    /// is taken from exact `cos² ξ` and `sin² ξ = 1 − cos² ξ`. Near double
    /// roots `cos ξ → ±1`, where `acos` of a rounded cosine would lose half
    /// the digits.
    pub fn new(o3: &[[f64; 3]; 3]) -> Self {
        let q = |x: f64| BigRational::from_float(x).expect("finite block entry");
        let a: Vec<Vec<BigRational>> = o3.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let tr = &a[0][0] + &a[1][1] + &a[2][2];
        let mut tr_sq = BigRational::zero();
        for (i, row) in a.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                tr_sq += x * &a[j][i];
            }
        }
        let minor = |i: usize, j: usize, k: usize, l: usize| &a[i][k] * &a[j][l] - &a[i][l] * &a[j][k];
        let det = &a[0][0] * minor(1, 2, 1, 2) - &a[0][1] * minor(1, 2, 0, 2) + &a[0][2] * minor(1, 2, 0, 1);

        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let b = -tr.clone();
        let c = (&tr * &tr - tr_sq) / &two;
        let d = -det;
        let u = (&three * &c - &b * &b) / BigRational::from_integer(9.into());
        // u√|u| cos ξ = (9bc − 2b³ − 27d)/54 =: m, so cos² ξ = m² / |u|³
        let m = (BigRational::from_integer(9.into()) * &b * &c
            - &two * &b * &b * &b
            - BigRational::from_integer(27.into()) * &d)
            / BigRational::from_integer(54.into());
        let xi = if u.is_zero() {
            0.0
        } else {
            let abs_u = u.abs();
            let cos2 = (&m * &m) / (&abs_u * &abs_u * &abs_u);
            let sin2 = (BigRational::one() - &cos2).max(BigRational::zero());
            let sign = if m.is_negative() == u.is_negative() { 1.0 } else { -1.0 };
            let cos = sign * f(&cos2).min(1.0).sqrt();
            f(&sin2).sqrt().atan2(cos)
        };
        CardanoCoefficients {
            b: f(&b),
            c: f(&c),
            d: f(&d),
            u: f(&u),
            xi,
        }
    }
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// How to read the `λ₃,₄` branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CardanoReading {
    /// `√|u|(cos(ξ/3) ± √3 sin(ξ/3)) − b/3`.
    Standard,
    /// `√|u|(cos(ξ/3) ± sin(ξ/3)) − b/3`, kept for comparison only.
    AsPrinted,
}

/// Roots `[λ₂, λ₃, λ₄]` with `λ₂ = −2√|u| cos(ξ/3) − b/3`.
pub fn cardano_eigenvalues(o3: &[[f64; 3]; 3]) -> [f64; 3] {
    cardano_eigenvalues_with(o3, CardanoReading::Standard)
}

pub fn cardano_eigenvalues_with(o3: &[[f64; 3]; 3], reading: CardanoReading) -> [f64; 3] {
    let k = CardanoCoefficients::new(o3);
    let shift = -k.b / 3.0;
    if k.u == 0.0 {
        return [shift; 3];
    }
    let r = k.u.abs().sqrt();
    let (s, c) = (k.xi / 3.0).sin_cos();
    let f = match reading {
        CardanoReading::Standard => 3f64.sqrt(),
        CardanoReading::AsPrinted => 1.0,
    };
    [-2.0 * r * c + shift, r * (c + f * s) + shift, r * (c - f * s) + shift]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, HermitianMatrix};
    use crate::presets;
    use crate::qops::{bell_operator, to_bell_basis};
    use crate::spectra::eigen;
    use std::f64::consts::PI;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    fn o33(theta: f64) -> BellOperator {
        let angles = presets::i33_symmetric_schedule().angles_at(theta);
        let o = bell_operator(&presets::i33_inequality(), &angles, &presets::three_by_three()).unwrap();
        to_bell_basis(&o).unwrap()
    }

    #[test]
    fn o22_collapses_when_alpha_equals_beta() {
        assert_eq!(
            o22_closed_form(Angle(0.4), Angle(0.4), Angle(1.0), Angle(2.0)),
            [-1.0, -1.0, 0.0, 0.0]
        );
        let top = o22_closed_form(Angle(0.0), Angle(PI / 2.0), Angle(PI / 4.0), Angle(3.0 * PI / 4.0))[3];
        assert!((top - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_block() {
        let v = sorted(cardano_eigenvalues(&[[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.5]]).to_vec());
        assert!(
            v.iter().zip([-1.0, 0.5, 3.0]).all(|(a, b)| (a - b).abs() < 1e-12),
            "{v:?}"
        );
        assert_eq!(
            cardano_eigenvalues(&[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]),
            [2.0; 3]
        );
    }

    #[test]
    fn o33_blocks_and_cardano() {
        for k in 0..=100 {
            let th = PI * k as f64 / 100.0;
            let o = o33(th);
            let (o1, o3) = o33_block_decompose(&o).unwrap();
            assert!((o1 + th.sin().powi(2)).abs() < 1e-12);
            let mut all = cardano_eigenvalues(&o3).to_vec();
            all.push(o1);
            let numeric = eigen(&o.matrix).unwrap().eigenvalues;
            for (a, b) in sorted(all).iter().zip(&numeric) {
                assert!((a - b).abs() < 1e-9, "theta {th}: {a} vs {b}");
            }
        }
        let (_, o3) = o33_block_decompose(&o33(PI / 3.0)).unwrap();
        let top = cardano_eigenvalues(&o3).into_iter().fold(f64::MIN, f64::max);
        assert!((top - 0.25).abs() < 1e-12);
    }

    #[test]
    fn printed_reading_does_not_match() {
        let (_, o3) = o33_block_decompose(&o33(1.0)).unwrap();
        let h = HermitianMatrix::symmetrized(&CMatrix::from_real_rows(o3));
        let numeric = eigen(&h).unwrap().eigenvalues;
        let err = |r| {
            sorted(cardano_eigenvalues_with(&o3, r).to_vec())
                .iter()
                .zip(&numeric)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(CardanoReading::Standard) < 1e-12);
        assert!(err(CardanoReading::AsPrinted) > 1e-2);
    }

    #[test]
    fn block_decompose_rejects_bad_input() {
        let angles = presets::i33_symmetric_schedule().angles_at(1.0);
        let o = bell_operator(&presets::i33_inequality(), &angles, &presets::three_by_three()).unwrap();
        assert!(o33_block_decompose(&o).is_err());
        let ch = bell_operator(
            &presets::ch_inequality(),
            &presets::ch_sweep_schedule().angles_at(0.3),
            &presets::clauser_horne(),
        )
        .unwrap();
        assert!(o33_block_decompose(&to_bell_basis(&ch).unwrap()).is_err());
    }
}
