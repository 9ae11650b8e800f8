//! Correlation polytopes: vertices from truth tables, facets from the hull
//! problem, and brute-force checks of candidate inequalities.

mod hull;
mod inequality;
mod structure;

use num_rational::Rational64;
use serde::Serialize;

pub use hull::{affine_dimension, half_spaces, HalfSpaces, HullBudget};
pub use inequality::{rational_to_f64, Inequality};
pub use structure::{enumerate_vertices, EventStructure, TermKey, Vertex, MAX_SINGLE_EVENTS};

use crate::error::{Error, Result};

/// Vertex set of a correlation polytope, with facets once computed.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub structure: EventStructure,
    pub vertices: Vec<Vertex>,
    pub facets: Option<Vec<Inequality>>,
}

impl Polytope {
    pub fn new(structure: EventStructure) -> Result<Self> {
        let vertices = enumerate_vertices(&structure)?;
        Ok(Polytope {
            structure,
            vertices,
            facets: None,
        })
    }

    pub fn compute_facets(&mut self, budget: &HullBudget) -> Result<&[Inequality]> {
        if self.facets.is_none() {
            self.facets = Some(hull_facets(&self.structure, &self.vertices, budget)?);
        }
        Ok(self.facets.as_deref().unwrap())
    }

    pub fn classical_range(&self, ineq: &Inequality) -> Result<(Rational64, Rational64)> {
        classical_range(ineq, &self.structure, &self.vertices)
    }

    pub fn verify_facet(&self, ineq: &Inequality) -> Result<FacetReport> {
        verify_facet(ineq, &self.structure, &self.vertices)
    }
}

/// Facets of `conv(vertices)` as canonical inequalities, sorted. For vertex
/// sets that are not full-dimensional the affine hull equations are returned
/// first, as inequalities with `lower == upper`.
pub fn hull_facets(structure: &EventStructure, vertices: &[Vertex], budget: &HullBudget) -> Result<Vec<Inequality>> {
    let dim = structure.dim();
    if vertices.iter().any(|v| v.coords.len() != dim) {
        return Err(Error::invalid("vertex dimension does not match the event structure"));
    }
    let points: Vec<Vec<i64>> = vertices.iter().map(Vertex::coords_i64).collect();
    let hs = half_spaces(&points, budget)?;
    let keys = structure.term_keys();
    let to_ineq = |h: &[i64], equation: bool| -> Result<Inequality> {
        let bound = Some(Rational64::from_integer(-h[0]));
        let coeffs = keys
            .iter()
            .zip(&h[1..])
            .map(|(&k, &c)| (k, Rational64::from_integer(c)));
        let ineq = Inequality::new(coeffs, bound, if equation { bound } else { None })?;
        Ok(ineq.canonical())
    };
    let mut equations = hs
        .equations
        .iter()
        .map(|h| to_ineq(h, true))
        .collect::<Result<Vec<_>>>()?;
    let mut facets = hs
        .facets
        .iter()
        .map(|h| to_ineq(h, false))
        .collect::<Result<Vec<_>>>()?;
    equations.sort();
    facets.sort();
    equations.extend(facets);
    Ok(equations)
}

/// Exact minimum and maximum of the inequality's linear form over the
/// vertices, which are the classical bounds over the whole polytope.
pub fn classical_range(
    ineq: &Inequality,
    structure: &EventStructure,
    vertices: &[Vertex],
) -> Result<(Rational64, Rational64)> {
    let coeffs = ineq.coefficient_vector(structure)?;
    let mut values = vertices.iter().map(|v| ineq.evaluate(&coeffs, v));
    let first = values.next().ok_or_else(|| Error::invalid("no vertices"))?;
    Ok(values.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideReport {
    pub side: BoundSide,
    #[serde(serialize_with = "ser_rational")]
    pub bound: Rational64,
    pub tight_count: usize,
    pub is_facet: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub vertex: Vertex,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational64,
}

/// Outcome of checking an inequality against every vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetReport {
    pub valid: bool,
    /// Vertices attaining one of the bounds.
    pub tight_count: usize,
    /// Valid, and every finite bound defines a facet.
    pub is_facet: bool,
    pub sides: Vec<SideReport>,
    /// Number of vertices violating a bound.
    pub violations: usize,
    /// First vertex (in enumeration order) violating the inequality.
    pub witness: Option<Witness>,
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_i64(r.to_integer())
    } else {
        s.serialize_str(&r.to_string())
    }
}

pub fn verify_facet(ineq: &Inequality, structure: &EventStructure, vertices: &[Vertex]) -> Result<FacetReport> {
    let coeffs = ineq.coefficient_vector(structure)?;
    let values: Vec<Rational64> = vertices.iter().map(|v| ineq.evaluate(&coeffs, v)).collect();
    let violates = |x: &Rational64| ineq.lower().is_some_and(|l| *x < l) || ineq.upper().is_some_and(|u| *x > u);
    let violations = values.iter().filter(|x| violates(x)).count();
    let witness = values
        .iter()
        .zip(vertices)
        .find(|(x, _)| violates(x))
        .map(|(x, v)| Witness {
            vertex: v.clone(),
            value: *x,
        });
    let valid = witness.is_none();

    let points: Vec<Vec<i64>> = vertices.iter().map(Vertex::coords_i64).collect();
    let polytope_dim = affine_dimension(points.iter().map(|p| p.as_slice()));

    let mut sides = Vec::new();
    let mut tight_any = vec![false; vertices.len()];
    for (side, bound) in [(BoundSide::Lower, ineq.lower()), (BoundSide::Upper, ineq.upper())] {
        let Some(bound) = bound else { continue };
        let tight: Vec<usize> = (0..vertices.len()).filter(|&k| values[k] == bound).collect();
        tight.iter().for_each(|&k| tight_any[k] = true);
        let tight_dim = affine_dimension(tight.iter().map(|&k| points[k].as_slice()));
        sides.push(SideReport {
            side,
            bound,
            tight_count: tight.len(),
            is_facet: valid && polytope_dim > 0 && tight_dim == polytope_dim - 1,
        });
    }
    Ok(FacetReport {
        valid,
        tight_count: tight_any.iter().filter(|&&t| t).count(),
        is_facet: valid && !sides.is_empty() && sides.iter().all(|s| s.is_facet),
        sides,
        violations,
        witness,
    })
}
