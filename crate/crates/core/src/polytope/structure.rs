use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of single events accepted by vertex enumeration.
pub const MAX_SINGLE_EVENTS: usize = 20;

/// Probability term: a single event `p_i` or a joint event `p_ij` (`i < j`).
///
/// Ordering puts all singles before all joints, which is the order used for
/// canonical facet forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKey {
    Single(usize),
    Joint(usize, usize),
}

impl TermKey {
    /// Joint key with indices sorted.
    pub fn joint(i: usize, j: usize) -> Self {
        TermKey::Joint(i.min(j), i.max(j))
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermKey::Single(i) => write!(f, "{i}"),
            TermKey::Joint(i, j) => write!(f, "{i},{j}"),
        }
    }
}

impl FromStr for TermKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad term key {s:?}")))
        };
        match s.split_once(',') {
            None => Ok(TermKey::Single(parse(s)?)),
            Some((a, b)) => {
                let (i, j) = (parse(a)?, parse(b)?);
                if i == j {
                    return Err(Error::invalid(format!("joint key {s:?} repeats an event")));
                }
                Ok(TermKey::joint(i, j))
            }
        }
    }
}

/// Which single events exist, how they split between observers, and which
/// joint products are recorded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure", into = "RawStructure")]
pub struct EventStructure {
    n_single: usize,
    sides: Vec<Vec<usize>>,
    joints: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawStructure {
    n_single: usize,
    sides: Vec<Vec<usize>>,
    joints: Vec<[usize; 2]>,
}

impl TryFrom<RawStructure> for EventStructure {
    type Error = Error;
    fn try_from(raw: RawStructure) -> Result<Self> {
        EventStructure::new(
            raw.n_single,
            raw.sides,
            raw.joints.into_iter().map(|[i, j]| (i, j)).collect(),
        )
    }
}

impl From<EventStructure> for RawStructure {
    fn from(s: EventStructure) -> Self {
        RawStructure {
            n_single: s.n_single,
            sides: s.sides,
            joints: s.joints.into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl EventStructure {
    /// Validates and builds a structure. Events are numbered `1..=n_single`;
    /// `sides` must partition them and every joint pair must straddle two
    /// sides. Joint pairs are stored with the smaller index first.
    pub fn new(n_single: usize, sides: Vec<Vec<usize>>, joints: Vec<(usize, usize)>) -> Result<Self> {
        if n_single == 0 {
            return Err(Error::invalid("structure needs at least one event"));
        }
        let mut seen = vec![false; n_single + 1];
        for &e in sides.iter().flatten() {
            if e == 0 || e > n_single {
                return Err(Error::invalid(format!("event {e} outside 1..={n_single}")));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::invalid(format!("event {e} listed on more than one side")));
            }
        }
        if let Some(e) = (1..=n_single).find(|&e| !seen[e]) {
            return Err(Error::invalid(format!("event {e} is not assigned to a side")));
        }
        let mut structure = EventStructure {
            n_single,
            sides,
            joints: Vec::with_capacity(joints.len()),
        };
        let mut dedup = BTreeSet::new();
        for (i, j) in joints {
            let (a, b) = (i.min(j), i.max(j));
            let (sa, sb) = (structure.side_of(a), structure.side_of(b));
            match (sa, sb) {
                (Some(x), Some(y)) if x != y => {}
                (Some(_), Some(_)) => return Err(Error::invalid(format!("joint ({i},{j}) lies on a single side"))),
                _ => return Err(Error::invalid(format!("joint ({i},{j}) references an unknown event"))),
            }
            if !dedup.insert((a, b)) {
                return Err(Error::invalid(format!("duplicate joint ({a},{b})")));
            }
            structure.joints.push((a, b));
        }
        Ok(structure)
    }

    /// Two observers with `left` and `right` settings and every cross pair
    /// recorded. Left events come first.
    pub fn bipartite(left: usize, right: usize) -> Result<Self> {
        let sides = vec![(1..=left).collect(), (left + 1..=left + right).collect()];
        let joints = (1..=left)
            .flat_map(|i| (left + 1..=left + right).map(move |j| (i, j)))
            .collect();
        Self::new(left + right, sides, joints)
    }

    pub fn n_single(&self) -> usize {
        self.n_single
    }

    pub fn sides(&self) -> &[Vec<usize>] {
        &self.sides
    }

    pub fn joints(&self) -> &[(usize, usize)] {
        &self.joints
    }

    /// Index of the side containing `event`.
    pub fn side_of(&self, event: usize) -> Option<usize> {
        self.sides.iter().position(|s| s.contains(&event))
    }

    /// Coordinates of a vertex: `n_single` singles then the joints in order.
    pub fn dim(&self) -> usize {
        self.n_single + self.joints.len()
    }

    pub fn term_keys(&self) -> Vec<TermKey> {
        (1..=self.n_single)
            .map(TermKey::Single)
            .chain(self.joints.iter().map(|&(i, j)| TermKey::Joint(i, j)))
            .collect()
    }

    pub fn coordinate_of(&self, key: TermKey) -> Option<usize> {
        match key {
            TermKey::Single(i) if (1..=self.n_single).contains(&i) => Some(i - 1),
            TermKey::Single(_) => None,
            TermKey::Joint(i, j) => self.joints.iter().position(|&p| p == (i, j)).map(|k| self.n_single + k),
        }
    }
}

/// Truth-table row of a correlation polytope: 0/1 singles followed by their
/// products for the recorded joints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex {
    pub coords: Vec<u8>,
}

impl Vertex {
    pub fn coords_i64(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| c as i64).collect()
    }
}

/// All `2^n` vertices, in binary counting order with `t_1` most significant.
pub fn enumerate_vertices(structure: &EventStructure) -> Result<Vec<Vertex>> {
    let n = structure.n_single();
    if n > MAX_SINGLE_EVENTS {
        return Err(Error::Budget(format!(
            "{n} single events would give 2^{n} vertices (limit {MAX_SINGLE_EVENTS})"
        )));
    }
    let vertices = (0u64..1 << n)
        .map(|row| {
            let t = |i: usize| ((row >> (n - i)) & 1) as u8;
            let coords = (1..=n)
                .map(t)
                .chain(structure.joints().iter().map(|&(i, j)| t(i) * t(j)))
                .collect();
            Vertex { coords }
        })
        .collect();
    Ok(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[u8]) -> Vertex {
        Vertex { coords: c.to_vec() }
    }

    #[test]
    fn single_direction_vertices() {
        let s = EventStructure::new(2, vec![vec![1], vec![2]], vec![(1, 2)]).unwrap();
        let vs = enumerate_vertices(&s).unwrap();
        assert_eq!(vs, vec![v(&[0, 0, 0]), v(&[0, 1, 0]), v(&[1, 0, 0]), v(&[1, 1, 1])]);
    }

    #[test]
    fn one_event_no_joints() {
        let s = EventStructure::new(1, vec![vec![1]], vec![]).unwrap();
        assert_eq!(enumerate_vertices(&s).unwrap(), vec![v(&[0]), v(&[1])]);
    }

    #[test]
    fn clauser_horne_has_sixteen_vertices_in_eight_dimensions() {
        let s = EventStructure::new(4, vec![vec![1, 2], vec![3, 4]], vec![(1, 3), (2, 3), (2, 4), (1, 4)]).unwrap();
        let vs = enumerate_vertices(&s).unwrap();
        assert_eq!(vs.len(), 16);
        assert!(vs.iter().all(|x| x.coords.len() == 8));
        // products hold on every row
        for x in &vs {
            for (k, &(i, j)) in s.joints().iter().enumerate() {
                assert_eq!(x.coords[4 + k], x.coords[i - 1] * x.coords[j - 1]);
            }
        }
    }

    #[test]
    fn explosion_guard() {
        let s = EventStructure::bipartite(11, 10).unwrap();
        assert!(matches!(enumerate_vertices(&s), Err(Error::Budget(_))));
    }

    #[test]
    fn rejects_malformed_structures() {
        assert!(EventStructure::new(2, vec![vec![1, 2]], vec![(1, 2)]).is_err());
        assert!(EventStructure::new(2, vec![vec![1], vec![2]], vec![(1, 2), (2, 1)]).is_err());
        assert!(EventStructure::new(2, vec![vec![1], vec![1, 2]], vec![]).is_err());
        assert!(EventStructure::new(3, vec![vec![1], vec![2]], vec![]).is_err());
        assert!(EventStructure::new(2, vec![vec![1], vec![2]], vec![(1, 3)]).is_err());
    }

    #[test]
    fn json_schema() {
        let s: EventStructure = serde_json::from_str(r#"{"n_single":2,"sides":[[1],[2]],"joints":[[2,1]]}"#).unwrap();
        assert_eq!(s.joints(), &[(1, 2)]);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"n_single":2,"sides":[[1],[2]],"joints":[[1,2]]}"#
        );
        assert!(serde_json::from_str::<EventStructure>(r#"{"n_single":2,"sides":[[1,2]],"joints":[[1,2]]}"#).is_err());
    }

    #[test]
    fn term_keys_parse_and_print() {
        assert_eq!("3".parse::<TermKey>().unwrap(), TermKey::Single(3));
        assert_eq!("4,1".parse::<TermKey>().unwrap(), TermKey::Joint(1, 4));
        assert_eq!(TermKey::Joint(1, 4).to_string(), "1,4");
        assert!("2,2".parse::<TermKey>().is_err());
        assert!(TermKey::Single(9) < TermKey::Joint(1, 2));
    }
}
