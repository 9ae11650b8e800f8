//! Built-in event structures and inequalities.
//!
//! Bipartite numbering puts the left observer's settings first:
//! CH uses events 1, 2 (α, β) on the left and 3, 4 (γ, δ) on the right;
//! the 3×3 case uses 1..=3 left and 4..=6 right.

use crate::error::{Error, Result};
use crate::polytope::{EventStructure, Inequality, TermKey};
use crate::schedule::AngleSchedule;
use TermKey::{Joint, Single};

/// One setting per side, joint `p12` recorded.
pub fn single_direction() -> EventStructure {
    EventStructure::new(2, vec![vec![1], vec![2]], vec![(1, 2)]).unwrap()
}

/// Two settings per side; coordinates `(p1..p4, p13, p23, p24, p14)`.
pub fn clauser_horne() -> EventStructure {
    EventStructure::new(4, vec![vec![1, 2], vec![3, 4]], vec![(1, 3), (2, 3), (2, 4), (1, 4)]).unwrap()
}

/// Three settings per side with all nine joints.
pub fn three_by_three() -> EventStructure {
    EventStructure::bipartite(3, 3).unwrap()
}

/// `p1 + p2 - p12 <= 1`.
pub fn trivial_inequality() -> Inequality {
    Inequality::from_ints(&[(Single(1), 1), (Single(2), 1), (Joint(1, 2), -1)], None, Some(1)).unwrap()
}

/// `-1 <= p13 + p14 + p23 - p24 - p1 - p3 <= 0`.
pub fn ch_inequality() -> Inequality {
    Inequality::from_ints(
        &[
            (Joint(1, 3), 1),
            (Joint(1, 4), 1),
            (Joint(2, 3), 1),
            (Joint(2, 4), -1),
            (Single(1), -1),
            (Single(3), -1),
        ],
        Some(-1),
        Some(0),
    )
    .unwrap()
}

/// CH form with `-p1 - p4` instead of `-p1 - p3`. Not valid classically.
pub fn ch_inequality_as_printed() -> Inequality {
    Inequality::from_ints(
        &[
            (Joint(1, 3), 1),
            (Joint(1, 4), 1),
            (Joint(2, 3), 1),
            (Joint(2, 4), -1),
            (Single(1), -1),
            (Single(4), -1),
        ],
        Some(-1),
        Some(0),
    )
    .unwrap()
}

/// The 3×3 inequality
/// `p14 + p15 + p16 + p24 + p25 - p26 + p34 - p35 - p1 - 2 p4 - p5 <= 0`.
pub fn i33_inequality() -> Inequality {
    Inequality::from_ints(
        &[
            (Joint(1, 4), 1),
            (Joint(1, 5), 1),
            (Joint(1, 6), 1),
            (Joint(2, 4), 1),
            (Joint(2, 5), 1),
            (Joint(2, 6), -1),
            (Joint(3, 4), 1),
            (Joint(3, 5), -1),
            (Single(1), -1),
            (Single(4), -2),
            (Single(5), -1),
        ],
        None,
        Some(0),
    )
    .unwrap()
}

/// α = 0, β = 2t, γ = t, δ = 3t.
pub fn ch_sweep_schedule() -> AngleSchedule {
    "a=0,b=2t,c=t,d=3t".parse().unwrap()
}

/// Symmetric directions (0, t, 2t | 0, t, 2t) for the 3×3 operator.
pub fn i33_symmetric_schedule() -> AngleSchedule {
    "1=0,2=t,3=2t,4=0,5=t,6=2t".parse().unwrap()
}

pub fn structure_by_name(name: &str) -> Result<EventStructure> {
    match name {
        "single" => Ok(single_direction()),
        "ch" => Ok(clauser_horne()),
        "3x3" | "i33" => Ok(three_by_three()),
        _ => Err(Error::invalid(format!(
            "unknown built-in structure {name:?} (single, ch, 3x3)"
        ))),
    }
}

pub fn inequality_by_name(name: &str) -> Result<Inequality> {
    match name {
        "trivial" => Ok(trivial_inequality()),
        "ch" => Ok(ch_inequality()),
        "ch-printed" => Ok(ch_inequality_as_printed()),
        "i33" => Ok(i33_inequality()),
        _ => Err(Error::invalid(format!(
            "unknown built-in inequality {name:?} (trivial, ch, ch-printed, i33)"
        ))),
    }
}
