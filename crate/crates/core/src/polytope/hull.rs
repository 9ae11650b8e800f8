//! Facet enumeration by the double description method over the integers.
//!
//! The facets of `conv(P)` are the extreme rays of the cone
//! `{ (a0, a) : a0 + a·p >= 0 for all p in P }`. Rows `(1, p)` are added one
//! at a time; rays on opposite sides of the new hyperplane are combined only
//! when they are adjacent (combinatorial test on zero sets). All vectors are
//! kept as primitive integer vectors, so no tolerance is involved anywhere.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Limits on the size of a hull computation.
#[derive(Clone, Copy, Debug)]
pub struct HullBudget {
    /// Ambient dimension (coordinates per point).
    pub max_dim: usize,
    pub max_vertices: usize,
    /// Cap on intermediate rays held by the double description loop.
    pub max_rays: usize,
    pub exec: Exec,
}

impl Default for HullBudget {
    fn default() -> Self {
        HullBudget {
            max_dim: 16,
            max_vertices: 128,
            max_rays: 250_000,
            exec: Exec::default(),
        }
    }
}

/// Half-space description of a point set, homogenized: each vector
/// `(a0, a1, .., ad)` reads `a0 + a·x >= 0` (facets) or `= 0` (equations).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpaces {
    pub equations: Vec<Vec<i64>>,
    pub facets: Vec<Vec<i64>>,
}

fn make_primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Incremental integer Gauss–Jordan elimination. Stored rows are kept with
/// zeros in every other stored row's pivot column.
#[derive(Default)]
pub(crate) struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    fn reduce(&self, mut r: Vec<i128>) -> Vec<i128> {
        for (c, e) in &self.rows {
            if r[*c] != 0 {
                let (ec, rc) = (e[*c], r[*c]);
                for (x, y) in r.iter_mut().zip(e) {
                    *x = ec * *x - rc * y;
                }
                make_primitive(&mut r);
            }
        }
        r
    }

    /// Adds `row` if it is independent of the stored rows.
    pub(crate) fn insert(&mut self, row: &[i64]) -> bool {
        let r = self.reduce(row.iter().map(|&x| x as i128).collect());
        let Some(c) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        for (_, e) in self.rows.iter_mut() {
            if e[c] != 0 {
                let (rc, ec) = (r[c], e[c]);
                for (x, y) in e.iter_mut().zip(&r) {
                    *x = rc * *x - ec * y;
                }
                make_primitive(e);
            }
        }
        self.rows.push((c, r));
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(c, _)| *c).collect();
        p.sort_unstable();
        p
    }

    /// Integer basis of `{ x : row·x = 0 for every stored row }`.
    fn nullspace(&self, width: usize) -> Vec<Vec<i128>> {
        let pivots = self.pivots();
        (0..width)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                // x_free = L, x_pivot = -e[free] * L / e[pivot]
                let l = self.rows.iter().fold(1i128, |acc, (c, e)| acc.lcm(&e[*c].abs()));
                let mut x = vec![0i128; width];
                x[free] = l;
                for (c, e) in &self.rows {
                    x[*c] = -e[free] * (l / e[*c]);
                }
                make_primitive(&mut x);
                x
            })
            .collect()
    }
}

/// Affine rank of a set of integer points (dimension of their affine hull),
/// `-1` for the empty set.
pub fn affine_dimension<'a>(points: impl IntoIterator<Item = &'a [i64]>) -> isize {
    let mut ech = Echelon::default();
    for p in points {
        let mut row = Vec::with_capacity(p.len() + 1);
        row.push(1);
        row.extend_from_slice(p);
        ech.insert(&row);
    }
    ech.rank() as isize - 1
}

/// Solves `B X = I` exactly and returns the columns of `X` as primitive
/// integer vectors (each scaled by a positive factor).
fn inverse_columns(b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    type Q = Ratio<i128>;
    let n = b.len();
    let mut aug: Vec<Vec<Q>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|&x| Q::from_integer(x as i128)).collect();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or_else(|| Error::numeric("initial basis is singular"))?;
        aug.swap(col, piv);
        let p = aug[col][col];
        aug[col].iter_mut().for_each(|x| *x /= p);
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col];
                let pivot_row = aug[col].clone();
                for (x, y) in aug[r].iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    (0..n)
        .map(|j| {
            let col: Vec<Q> = (0..n).map(|i| aug[i][n + j]).collect();
            let l = col.iter().fold(1i128, |acc, q| acc.lcm(q.denom()));
            let mut ints: Vec<i128> = col.iter().map(|q| (q * l).to_integer()).collect();
            make_primitive(&mut ints);
            to_i64(&ints)
        })
        .collect()
}

fn to_i64(v: &[i128]) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| i64::try_from(x).map_err(|_| Error::numeric("hull coefficient overflow")))
        .collect()
}

#[derive(Clone, Debug)]
struct Ray {
    v: Vec<i64>,
    /// Processed rows on which this ray is tight.
    zeros: u128,
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Extreme rays of the pointed cone `{ y : A y >= 0 }`, `A` of full column
/// rank with at most 128 rows.
fn extreme_rays(a: &[Vec<i64>], budget: &HullBudget) -> Result<Vec<Vec<i64>>> {
    let width = a[0].len();
    debug_assert!(a.len() <= 128);

    let mut ech = Echelon::default();
    let mut basis = Vec::with_capacity(width);
    for (i, row) in a.iter().enumerate() {
        if ech.insert(row) {
            basis.push(i);
            if basis.len() == width {
                break;
            }
        }
    }
    if basis.len() < width {
        return Err(Error::numeric("constraint matrix is not of full column rank"));
    }

    let b: Vec<Vec<i64>> = basis.iter().map(|&i| a[i].clone()).collect();
    let all_basis: u128 = basis.iter().fold(0, |m, &i| m | (1u128 << i));
    let mut rays: Vec<Ray> = inverse_columns(&b)?
        .into_iter()
        .enumerate()
        .map(|(j, v)| Ray {
            v,
            zeros: all_basis & !(1u128 << basis[j]),
        })
        .collect();

    // Rays are only ever combined along edges; an edge lies in at least
    // width - 2 independent tight rows.
    let min_common = width.saturating_sub(2) as u32;

    for (i, row) in a.iter().enumerate() {
        if all_basis & (1u128 << i) != 0 {
            continue;
        }
        let bit = 1u128 << i;
        let slack: Vec<i128> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| slack[k] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| slack[k] < 0).collect();
        if neg.is_empty() {
            for (r, s) in rays.iter_mut().zip(&slack) {
                if *s == 0 {
                    r.zeros |= bit;
                }
            }
            continue;
        }

        let current = &rays;
        let created: Vec<Result<Vec<Ray>>> = budget.exec.map_slice(&pos, |&p| {
            let mut out = Vec::new();
            for &n in &neg {
                let common = current[p].zeros & current[n].zeros;
                if common.count_ones() < min_common {
                    continue;
                }
                let adjacent = current
                    .iter()
                    .enumerate()
                    .all(|(t, r)| t == p || t == n || r.zeros & common != common);
                if !adjacent {
                    continue;
                }
                let (sp, sn) = (slack[p], slack[n]);
                let mut v: Vec<i128> = current[n]
                    .v
                    .iter()
                    .zip(&current[p].v)
                    .map(|(&x, &y)| sp * x as i128 - sn * y as i128)
                    .collect();
                make_primitive(&mut v);
                out.push(Ray {
                    v: to_i64(&v)?,
                    zeros: common | bit,
                });
            }
            Ok(out)
        });

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (r, s) in rays.iter().zip(&slack) {
            if *s > 0 {
                next.push(r.clone());
            } else if *s == 0 {
                next.push(Ray {
                    v: r.v.clone(),
                    zeros: r.zeros | bit,
                });
            }
        }
        for batch in created {
            next.extend(batch?);
        }
        if next.len() > budget.max_rays {
            return Err(Error::Budget(format!(
                "double description exceeded {} intermediate rays",
                budget.max_rays
            )));
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// Complete irredundant half-space description of `conv(points)`.
pub fn half_spaces(points: &[Vec<i64>], budget: &HullBudget) -> Result<HalfSpaces> {
    let Some(first) = points.first() else {
        return Err(Error::invalid("hull of an empty point set"));
    };
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::invalid("points have differing dimensions"));
    }
    if d > budget.max_dim {
        return Err(Error::Budget(format!(
            "dimension {d} exceeds hull budget {}",
            budget.max_dim
        )));
    }
    if points.len() > budget.max_vertices.min(128) {
        return Err(Error::Budget(format!(
            "{} vertices exceed hull budget {}",
            points.len(),
            budget.max_vertices.min(128)
        )));
    }

    let homog: Vec<Vec<i64>> = points
        .iter()
        .map(|p| std::iter::once(1).chain(p.iter().copied()).collect())
        .collect();
    let mut ech = Echelon::default();
    for h in &homog {
        ech.insert(h);
    }
    let equations = ech
        .nullspace(d + 1)
        .iter()
        .map(|v| to_i64(v))
        .collect::<Result<Vec<_>>>()?;

    // Restrict to the pivot columns: the projection is injective on the
    // affine hull, and the restricted cone is pointed.
    let pivots = ech.pivots();
    let facets = if pivots.len() == 1 {
        // a single point: no facets
        Vec::new()
    } else {
        let reduced: Vec<Vec<i64>> = homog.iter().map(|h| pivots.iter().map(|&c| h[c]).collect()).collect();
        extreme_rays(&reduced, budget)?
            .into_iter()
            .map(|y| {
                let mut full = vec![0i64; d + 1];
                for (k, &c) in pivots.iter().enumerate() {
                    full[c] = y[k];
                }
                full
            })
            .collect()
    };
    Ok(HalfSpaces { equations, facets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(d: usize) -> Vec<Vec<i64>> {
        (0..1u32 << d)
            .map(|m| (0..d).map(|i| ((m >> i) & 1) as i64).collect())
            .collect()
    }

    #[test]
    fn square_has_four_facets() {
        let hs = half_spaces(&cube(2), &HullBudget::default()).unwrap();
        assert!(hs.equations.is_empty());
        let mut f = hs.facets.clone();
        f.sort();
        // x >= 0, y >= 0, 1 - x >= 0, 1 - y >= 0
        assert_eq!(f, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, -1, 0], vec![1, 0, -1]]);
    }

    #[test]
    fn hypercube_facet_count() {
        for d in 1..=6 {
            let hs = half_spaces(&cube(d), &HullBudget::default()).unwrap();
            assert_eq!(hs.facets.len(), 2 * d, "d = {d}");
        }
    }

    #[test]
    fn simplex_in_higher_dimension_reports_equation() {
        // triangle in the plane x + y + z = 1
        let pts = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let hs = half_spaces(&pts, &HullBudget::default()).unwrap();
        assert_eq!(hs.equations.len(), 1);
        let e = &hs.equations[0];
        for p in &pts {
            assert_eq!(e[0] + e[1] * p[0] + e[2] * p[1] + e[3] * p[2], 0);
        }
        assert_eq!(hs.facets.len(), 3);
    }

    #[test]
    fn single_point_has_only_equations() {
        let hs = half_spaces(&[vec![0, 0]], &HullBudget::default()).unwrap();
        assert_eq!(hs.equations.len(), 2);
        assert!(hs.facets.is_empty());
    }

    #[test]
    fn budget_errors() {
        let tight = HullBudget {
            max_dim: 2,
            ..HullBudget::default()
        };
        assert!(matches!(half_spaces(&cube(3), &tight), Err(Error::Budget(_))));
        let few_rays = HullBudget {
            max_rays: 3,
            ..HullBudget::default()
        };
        assert!(matches!(half_spaces(&cube(4), &few_rays), Err(Error::Budget(_))));
    }

    #[test]
    fn affine_dimension_counts() {
        let pts = cube(3);
        assert_eq!(affine_dimension(pts.iter().map(|p| p.as_slice())), 3);
        assert_eq!(affine_dimension(pts[..2].iter().map(|p| p.as_slice())), 1);
        assert_eq!(affine_dimension(std::iter::empty()), -1);
    }
}
