//! Spin measurements in the x–z plane and the Bell operators obtained by
//! replacing classical probabilities with projectors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::polytope::{rational_to_f64, EventStructure, Inequality, TermKey};
use crate::spectra;

pub use crate::linalg::HermitianMatrix;

/// Measurement direction in the x–z plane, radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() {
            Ok(Angle(theta))
        } else {
            Err(Error::invalid(format!("angle {theta} is not finite")))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in `[0, 2π)`.
    pub fn canonical(self) -> f64 {
        self.0.rem_euclid(2.0 * PI)
    }
}

/// Event index → measurement direction.
pub type AngleMap = BTreeMap<usize, Angle>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Computational,
    Bell,
}

impl Basis {
    fn name(self) -> &'static str {
        match self {
            Basis::Computational => "computational",
            Basis::Bell => "bell",
        }
    }
}

/// `σ(θ) = [[cos θ, sin θ], [sin θ, -cos θ]]`.
pub fn sigma(theta: Angle) -> HermitianMatrix {
    let (s, c) = theta.0.sin_cos();
    HermitianMatrix::symmetrized(&CMatrix::from_real_rows([[c, s], [s, -c]]))
}

/// Spin-up projector `F(θ) = (1 + σ(θ)) / 2`.
pub fn projector(theta: Angle) -> HermitianMatrix {
    let (s, c) = theta.0.sin_cos();
    HermitianMatrix::symmetrized(&CMatrix::from_real_rows([
        [0.5 * (1.0 + c), 0.5 * s],
        [0.5 * s, 0.5 * (1.0 - c)],
    ]))
}

/// Single-particle measurement embedded in the two-qubit space.
pub fn single_site(theta: Angle, side: Side) -> HermitianMatrix {
    let id = HermitianMatrix::identity(2);
    match side {
        Side::Left => projector(theta).kron(&id),
        Side::Right => id.kron(&projector(theta)),
    }
}

/// Coincidence measurement `F(θ) ⊗ F(θ')`.
pub fn joint(left: Angle, right: Angle) -> HermitianMatrix {
    projector(left).kron(&projector(right))
}

/// Hermitian operator built from an inequality and an angle assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct BellOperator {
    pub matrix: HermitianMatrix,
    pub basis: Basis,
    pub source: Option<Inequality>,
    pub angles: AngleMap,
}

impl BellOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Substitutes `p_i → q_i(θ_i)` and `p_ij → q_ij(θ_i, θ_j)`.
///
/// The structure must have exactly two sides; side 0 acts on the left qubit.
pub fn bell_operator(ineq: &Inequality, angles: &AngleMap, structure: &EventStructure) -> Result<BellOperator> {
    if structure.sides().len() != 2 {
        return Err(Error::invalid(format!(
            "Bell operators need a bipartite structure, got {} sides",
            structure.sides().len()
        )));
    }
    let side = |e: usize| -> Result<Side> {
        match structure.side_of(e) {
            Some(0) => Ok(Side::Left),
            Some(_) => Ok(Side::Right),
            None => Err(Error::invalid(format!("event {e} is not in the structure"))),
        }
    };
    let angle = |e: usize| angles.get(&e).copied().ok_or(Error::MissingAngle(e));

    let mut acc = CMatrix::zeros(4);
    for (&key, &c) in ineq.coeffs() {
        let term = match key {
            TermKey::Single(i) => single_site(angle(i)?, side(i)?),
            TermKey::Joint(i, j) => match (side(i)?, side(j)?) {
                (Side::Left, Side::Right) => joint(angle(i)?, angle(j)?),
                (Side::Right, Side::Left) => joint(angle(j)?, angle(i)?),
                _ => return Err(Error::invalid(format!("joint term {key} lies on one side"))),
            },
        };
        acc = &acc + &term.matrix().scale(rational_to_f64(c));
    }
    Ok(BellOperator {
        matrix: HermitianMatrix::symmetrized(&acc),
        basis: Basis::Computational,
        source: Some(ineq.clone()),
        angles: angles.clone(),
    })
}

/// `σ(α)⊗σ(γ) + σ(β)⊗σ(γ) + σ(β)⊗σ(δ) − σ(α)⊗σ(δ)`.
pub fn chsh_operator(alpha: Angle, beta: Angle, gamma: Angle, delta: Angle) -> BellOperator {
    let corr = |l: Angle, r: Angle| sigma(l).kron(&sigma(r));
    let m = corr(alpha, gamma)
        .add_scaled(&corr(beta, gamma), 1.0)
        .add_scaled(&corr(beta, delta), 1.0)
        .add_scaled(&corr(alpha, delta), -1.0);
    BellOperator {
        matrix: m,
        basis: Basis::Computational,
        source: None,
        angles: [(1, alpha), (2, beta), (3, gamma), (4, delta)].into_iter().collect(),
    }
}

/// Two-qubit density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    basis: Basis,
}

pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-12;

impl DensityMatrix {
    /// Validates trace and positivity of a computational-basis matrix.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        Self::in_basis(matrix, Basis::Computational)
    }

    pub fn in_basis(matrix: HermitianMatrix, basis: Basis) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} differs from 1")));
        }
        let min = spectra::eigen(&matrix)?.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix { matrix, basis })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(matrix: HermitianMatrix) -> Self {
        DensityMatrix {
            matrix,
            basis: Basis::Computational,
        }
    }

    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let n = crate::linalg::norm(amplitudes);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("state norm {n} differs from 1")));
        }
        Ok(DensityMatrix {
            matrix: HermitianMatrix::symmetrized(&CMatrix::outer(amplitudes)),
            basis: Basis::Computational,
        })
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            matrix: HermitianMatrix::identity(4).scale(0.25),
            basis: Basis::Computational,
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }
}

/// `Tr[W O]`.
pub fn expectation(w: &DensityMatrix, o: &BellOperator) -> Result<f64> {
    if w.basis != o.basis {
        return Err(Error::BasisMismatch {
            expected: o.basis.name().into(),
            got: w.basis.name().into(),
        });
    }
    if w.matrix.dim() != o.dim() {
        return Err(Error::invalid("state and operator dimensions differ"));
    }
    let value = trace_of_product(w.matrix.matrix(), o.matrix.matrix());
    let scale = 1.0f64.max(o.matrix.matrix().frobenius_norm());
    if value.im.abs() > 1e-12 * scale {
        return Err(Error::numeric(format!("expectation has imaginary part {:e}", value.im)));
    }
    Ok(value.re)
}

/// `Tr[A B]` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Columns `|φ+>, |ψ+>, |ψ->, |φ->` in the computational basis.
pub fn bell_basis_unitary() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    CMatrix::from_real_rows([[h, 0.0, 0.0, h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0], [h, 0.0, 0.0, -h]])
}

/// Re-expresses the operator in the Bell basis `{φ+, ψ+, ψ-, φ-}`.
pub fn to_bell_basis(o: &BellOperator) -> Result<BellOperator> {
    if o.basis == Basis::Bell {
        return Err(Error::BasisMismatch {
            expected: "computational".into(),
            got: "bell".into(),
        });
    }
    if o.dim() != 4 {
        return Err(Error::invalid("Bell basis is defined for two qubits only"));
    }
    Ok(BellOperator {
        matrix: o.matrix.conjugate_by(&bell_basis_unitary()),
        basis: Basis::Bell,
        source: o.source.clone(),
        angles: o.angles.clone(),
    })
}

/// Wire form: dimension, basis tag, row-major `[re, im]` entries.
#[derive(Serialize, Deserialize)]
struct BellOperatorJson {
    dim: usize,
    basis: Basis,
    entries: Vec<C64>,
}

impl Serialize for BellOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BellOperatorJson {
            dim: self.dim(),
            basis: self.basis,
            entries: self.matrix.matrix().as_slice().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BellOperatorJson::deserialize(d)?;
        let m = CMatrix::from_row_major(raw.dim, raw.entries).map_err(D::Error::custom)?;
        let matrix = HermitianMatrix::try_from_matrix(&m, 1e-12).map_err(D::Error::custom)?;
        Ok(BellOperator {
            matrix,
            basis: raw.basis,
            source: None,
            angles: AngleMap::new(),
        })
    }
}
