//! Exhaustive enumeration of small cycle sets.

use crate::cycleset::{dedup_isomorphic, CycleSet, ISO_CAP};
use crate::error::{Error, Result};

use super::model::{build_model, Diagonal, ModelSpec};
use super::solver::{solve, Budget, Mode, Status};

/// Largest size enumerated without a diagonal constraint.
pub const RAW_CAP: usize = 5;
/// Largest size enumerated with a diagonal constraint.
pub const DIAGONAL_CAP: usize = 8;

/// Every cycle set on `0..n` (with the given diagonal), sorted by serialized
/// table. With `dedup`, one representative per isomorphism class is kept,
/// the first in that order.
pub fn enumerate_cyclesets(n: usize, diagonal: Diagonal, dedup: bool) -> Result<Vec<CycleSet>> {
    let cap = if diagonal == Diagonal::None { RAW_CAP } else { DIAGONAL_CAP };
    if n > cap {
        return Err(Error::SizeCapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut spec = ModelSpec::new(n);
    spec.diagonal = diagonal;
    spec.require_all_solutions = true;
    let out = solve(&build_model(spec)?, Mode::All, Budget::unlimited());
    debug_assert_ne!(out.status, Status::Timeout);
    if dedup {
        debug_assert!(n <= ISO_CAP);
        dedup_isomorphic(out.solutions)
    } else {
        Ok(out.solutions)
    }
}

/// All isomorphism classes of size at most `max_n`, by increasing size.
pub fn corpus(max_n: usize) -> Result<Vec<CycleSet>> {
    let mut all = Vec::new();
    for n in 1..=max_n {
        all.extend(enumerate_cyclesets(n, Diagonal::None, true)?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_cyclesets(1, Diagonal::None, false).unwrap().len(), 1);
        let two = enumerate_cyclesets(2, Diagonal::None, false).unwrap();
        assert_eq!(two.len(), 2);
        assert!(two.contains(&CycleSet::trivial(2)));
        let classes: Vec<usize> =
            (1..=4).map(|n| enumerate_cyclesets(n, Diagonal::None, true).unwrap().len()).collect();
        assert_eq!(classes, [1, 2, 5, 23]);
    }

    #[test]
    fn size_caps() {
        assert!(matches!(
            enumerate_cyclesets(6, Diagonal::None, false),
            Err(Error::SizeCapExceeded { n: 6, cap: 5 })
        ));
        assert!(matches!(
            enumerate_cyclesets(9, Diagonal::FullCycle, false),
            Err(Error::SizeCapExceeded { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn full_cycle_four_has_one_irretractable_class() {
        let sets = enumerate_cyclesets(4, Diagonal::FullCycle, true).unwrap();
        let irr: Vec<_> = sets.iter().filter(|x| !x.is_retractable()).collect();
        assert_eq!(irr.len(), 1);
        assert!(irr[0].are_isomorphic(&CycleSet::x4_19()).unwrap().is_some());
    }

    #[test]
    fn order_is_deterministic() {
        let a = enumerate_cyclesets(3, Diagonal::None, false).unwrap();
        let b = enumerate_cyclesets(3, Diagonal::None, false).unwrap();
        assert_eq!(a, b);
        let keys: Vec<String> = a.iter().map(|x| x.serialize()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
