//! Structure selection for the moment system: consistency constraints, the
//! point-count cost function, the LP relaxation lower bound, and exhaustive
//! enumeration of feasible integer structures ordered into consecutive
//! minima.

use crate::simplex::{self, Constraint, Relation};
use crate::symmetry::{p_nu, ClassType};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("lower-bound program unexpectedly infeasible for m = {0}")]
    Infeasible(u32),
}

/// Generator counts per class type, `K0..K6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleStructure {
    counts: [u32; 7],
}

impl RuleStructure {
    pub fn new(counts: [u32; 7]) -> RuleStructure {
        RuleStructure { counts }
    }

    /// A surface structure: `K0 = 0` and the given `K1..K6`.
    pub fn u3(counts: [u32; 6]) -> RuleStructure {
        let mut all = [0u32; 7];
        all[1..].copy_from_slice(&counts);
        RuleStructure { counts: all }
    }

    pub fn counts(&self) -> [u32; 7] {
        self.counts
    }

    pub fn u3_counts(&self) -> [u32; 6] {
        let mut k = [0u32; 6];
        k.copy_from_slice(&self.counts[1..]);
        k
    }

    pub fn count(&self, class: ClassType) -> u32 {
        self.counts[class.index()]
    }

    /// Total number of points: `K0 + 6 K1 + 12 K2 + 24 K3 + 8 K4 + 24 K5 + 48 K6`.
    pub fn cost(&self) -> u64 {
        ClassType::ALL
            .iter()
            .map(|c| u64::from(c.orbit_size()) * u64::from(self.counts[c.index()]))
            .sum()
    }

    /// Number of unknowns in the moment system:
    /// `K0 + 2 K1 + 2 K2 + 3 K3 + 2 K4 + 3 K5 + 4 K6`.
    pub fn var_count(&self) -> u64 {
        ClassType::ALL
            .iter()
            .map(|c| (1 + c.param_count() as u64) * u64::from(self.counts[c.index()]))
            .sum()
    }

    /// Total number of generators.
    pub fn generator_count(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Surface-rule invariants: no origin generator, and at most one
    /// generator each of the classes whose position is fully determined.
    pub fn is_valid_u3(&self) -> bool {
        self.counts[0] == 0 && self.counts[1] <= 1 && self.counts[2] <= 1 && self.counts[4] <= 1
    }
}

impl std::fmt::Display for RuleStructure {
    /// The `K1..K6` form used in rule names, e.g. `1,0,1,1,0,0`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = self.u3_counts();
        write!(f, "{},{},{},{},{},{}", k[0], k[1], k[2], k[3], k[4], k[5])
    }
}

/// Right-hand sides of the four surface consistency constraints for degree
/// `2m+1`. Each is a value of `p_3`, stepping down by three in the argument:
/// `(p3(m+3), p3(m), p3(m-3), p3(m-6))`.
pub fn u3_rhs(m: u32) -> [u64; 4] {
    let p3 = |r: i64| -> u64 {
        if r >= 3 {
            p_nu(3, r as u32)
        } else {
            0
        }
    };
    let m = i64::from(m);
    [p3(m + 3), p3(m), p3(m - 3), p3(m - 6)]
}

/// The four surface consistency conditions, with `u3_rhs` right-hand sides:
///
/// ```text
/// K1 +  K2 + 2K3 + K4 + 2K5 + 3K6 >= rhs[0]
///                  K4 + 2K5 + 3K6 >= rhs[1]
///       2K3             +    3K6 >= rhs[2]
///                            3K6 >= rhs[3]
/// ```
pub fn satisfies_u3(structure: &RuleStructure, m: u32) -> bool {
    let [_, k1, k2, k3, k4, k5, k6] = structure.counts.map(u64::from);
    let rhs = u3_rhs(m);
    k1 + k2 + 2 * k3 + k4 + 2 * k5 + 3 * k6 >= rhs[0]
        && k4 + 2 * k5 + 3 * k6 >= rhs[1]
        && 2 * k3 + 3 * k6 >= rhs[2]
        && 3 * k6 >= rhs[3]
}

/// Sum of `expr(r)` for `r = lo..=m`, clamped at zero term-wise only where the
/// construction guarantees nonnegative sums (the callers' sums may go
/// negative overall, so this returns a signed value).
fn range_sum(lo: u32, m: u32, expr: impl Fn(u32) -> i64) -> i64 {
    if m < lo {
        return 0; // empty-sum convention
    }
    (lo..=m).map(expr).sum()
}

/// The thirteen consistency conditions for a general fully symmetric
/// 3D region (of which the four surface conditions are the specialization).
pub fn satisfies_general3d(structure: &RuleStructure, m: u32) -> bool {
    let [k0, k1, k2, k3, k4, k5, k6] = structure.counts.map(i64::from);
    if k0 > 1 {
        return false;
    }
    let p = |nu: u32, r: u32| p_nu(nu, r) as i64;
    let p23 = |r: u32| p(2, r) + p(3, r);

    let lhs_rhs: [(i64, i64); 12] = [
        (3 * k5 + 4 * k6, range_sum(3, m, |r| p(3, r) - 1)),
        (2 * k4 + 3 * k5 + 4 * k6, range_sum(3, m, |r| p(3, r))),
        (3 * k3 + 3 * k5 + 4 * k6, range_sum(3, m, |r| p23(r) - 2)),
        (
            3 * k3 + 2 * k4 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r) - 1),
        ),
        (
            2 * k2 + 3 * k3 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r) - 1),
        ),
        (
            2 * k1 + 3 * k3 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r) - 1),
        ),
        (
            2 * k2 + 3 * k3 + 2 * k4 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r)),
        ),
        (
            2 * k1 + 3 * k3 + 2 * k4 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r)),
        ),
        (
            2 * k1 + 2 * k2 + 3 * k3 + 3 * k5 + 4 * k6,
            range_sum(2, m, |r| p23(r)),
        ),
        (4 * k6, range_sum(9, m, |r| p(3, r) - (i64::from(r) - 3))),
        (
            3 * k3 + 4 * k6,
            range_sum(6, m, |r| p23(r) - (i64::from(r) - 1)),
        ),
        (
            k0 + 2 * k1 + 2 * k2 + 3 * k3 + 2 * k4 + 3 * k5 + 4 * k6,
            1 + range_sum(1, m, |r| p(1, r) + p23(r)),
        ),
    ];
    lhs_rhs.iter().all(|&(lhs, rhs)| lhs >= rhs)
}

/// Result of relaxing the integrality requirement: a lower bound on the
/// point count and one optimal fractional structure. Only the bound is
/// contractual; the fractional counts are informational since the optimum
/// may be degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRelaxationResult {
    pub n_lb: f64,
    pub fractional_k: [f64; 7],
}

/// Minimize the point count over nonnegative real `K1..K6` subject to the
/// four surface conditions and `K1, K2, K4 <= 1`.
pub fn lp_lower_bound(m: u32) -> Result<LpRelaxationResult, SearchError> {
    let rhs = u3_rhs(m);
    let objective = [6.0, 12.0, 24.0, 8.0, 24.0, 48.0];
    let mut constraints = vec![
        Constraint {
            coefficients: vec![1.0, 1.0, 2.0, 1.0, 2.0, 3.0],
            relation: Relation::Ge,
            rhs: rhs[0] as f64,
        },
        Constraint {
            coefficients: vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0],
            relation: Relation::Ge,
            rhs: rhs[1] as f64,
        },
        Constraint {
            coefficients: vec![0.0, 0.0, 2.0, 0.0, 0.0, 3.0],
            relation: Relation::Ge,
            rhs: rhs[2] as f64,
        },
        Constraint {
            coefficients: vec![0.0, 0.0, 0.0, 0.0, 0.0, 3.0],
            relation: Relation::Ge,
            rhs: rhs[3] as f64,
        },
    ];
    for bounded in [0usize, 1, 3] {
        let mut coefficients = vec![0.0; 6];
        coefficients[bounded] = 1.0;
        constraints.push(Constraint {
            coefficients,
            relation: Relation::Le,
            rhs: 1.0,
        });
    }
    let (n_lb, k) =
        simplex::minimize(&objective, &constraints).map_err(|_| SearchError::Infeasible(m))?;
    let mut fractional_k = [0.0; 7];
    fractional_k[1..].copy_from_slice(&k);
    Ok(LpRelaxationResult { n_lb, fractional_k })
}

/// A feasible integer structure, ranked by point count. `minimum_index` is
/// the 1-based rank of its `N` among the distinct feasible values and
/// `lexical_index` the 1-based position within its `N` group (ascending
/// lexicographic order of `K1..K6`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureSolution {
    pub structure: RuleStructure,
    pub n: u64,
    pub v: u64,
    pub minimum_index: u32,
    pub lexical_index: u32,
}

fn enumerate_where(
    m: u32,
    k_bound: u32,
    n_min: u64,
    n_max: u64,
    feasible: impl Fn(&RuleStructure, u32) -> bool,
) -> Vec<StructureSolution> {
    let mut found: Vec<(u64, [u32; 6], u64)> = Vec::new();
    for k1 in 0..=1u32 {
        for k2 in 0..=1u32 {
            for k3 in 0..=k_bound {
                for k4 in 0..=1u32 {
                    for k5 in 0..=k_bound {
                        for k6 in 0..=k_bound {
                            let n = 6 * u64::from(k1)
                                + 12 * u64::from(k2)
                                + 24 * u64::from(k3)
                                + 8 * u64::from(k4)
                                + 24 * u64::from(k5)
                                + 48 * u64::from(k6);
                            if n < n_min || n > n_max {
                                continue;
                            }
                            let k = [k1, k2, k3, k4, k5, k6];
                            let structure = RuleStructure::u3(k);
                            if feasible(&structure, m) {
                                found.push((n, k, structure.var_count()));
                            }
                        }
                    }
                }
            }
        }
    }
    found.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut solutions = Vec::with_capacity(found.len());
    let mut minimum_index = 0u32;
    let mut lexical_index = 0u32;
    let mut last_n = None;
    for (n, k, v) in found {
        if Some(n) != last_n {
            minimum_index += 1;
            lexical_index = 1;
            last_n = Some(n);
        } else {
            lexical_index += 1;
        }
        solutions.push(StructureSolution {
            structure: RuleStructure::u3(k),
            n,
            v,
            minimum_index,
            lexical_index,
        });
    }
    solutions
}

/// Every surface-feasible structure with `ceil(N_lb) <= N <= n_max` and
/// `K3, K5, K6 <= k_bound`, sorted by `(N, K1..K6)`, with minima indices
/// assigned. Empty when `n_max` is below the lower bound.
pub fn enumerate_structures(m: u32, k_bound: u32, n_max: u64) -> Vec<StructureSolution> {
    let n_lb = match lp_lower_bound(m) {
        Ok(lp) => lp.n_lb.ceil() as u64,
        Err(_) => return Vec::new(),
    };
    enumerate_where(m, k_bound, n_lb, n_max, satisfies_u3)
}

/// Like [`enumerate_structures`] but against the thirteen general
/// consistency conditions (still over surface structures, `K0 = 0`), with no
/// lower bound on `N`.
pub fn enumerate_structures_general3d(m: u32, k_bound: u32, n_max: u64) -> Vec<StructureSolution> {
    enumerate_where(m, k_bound, 0, n_max, satisfies_general3d)
}

fn first_minima_where(
    k_bound: u32,
    count: u32,
    enumerate: impl Fn(u64) -> Vec<StructureSolution>,
) -> Vec<StructureSolution> {
    // with K3, K5, K6 capped there are finitely many structures at all
    let n_ceiling = 26 + 96 * u64::from(k_bound);
    let mut n_max = 96;
    loop {
        let all = enumerate(n_max);
        let distinct = all.last().map_or(0, |s| s.minimum_index);
        // the count-th minimum is complete once the bound clears it by the
        // largest orbit size
        let complete = all
            .iter()
            .find(|s| s.minimum_index == count)
            .map_or(false, |s| s.n + 48 <= n_max);
        if (distinct >= count && complete) || n_max > n_ceiling {
            return all
                .into_iter()
                .filter(|s| s.minimum_index <= count)
                .collect();
        }
        n_max += n_max / 2 + 48;
    }
}

/// The solutions forming the first `count` consecutive minima in `N`,
/// growing the search bound as needed.
pub fn first_minima(m: u32, k_bound: u32, count: u32) -> Vec<StructureSolution> {
    first_minima_where(k_bound, count, |n_max| {
        enumerate_structures(m, k_bound, n_max)
    })
}

/// First `count` minima under the general 3D conditions.
pub fn first_minima_general3d(m: u32, k_bound: u32, count: u32) -> Vec<StructureSolution> {
    first_minima_where(k_bound, count, |n_max| {
        enumerate_structures_general3d(m, k_bound, n_max)
    })
}

/// Rank of a structure among the feasible solutions for `m`, as
/// `(minimum_index, lexical_index)`, when it is feasible.
pub fn minima_indices(m: u32, structure: &RuleStructure) -> Option<(u32, u32)> {
    if !structure.is_valid_u3() || !satisfies_u3(structure, m) {
        return None;
    }
    let n = structure.cost();
    let k_bound = structure.u3_counts().iter().copied().max().unwrap_or(0).max(20);
    enumerate_structures(m, k_bound, n)
        .into_iter()
        .find(|s| s.structure == *structure)
        .map(|s| (s.minimum_index, s.lexical_index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_and_var_count() {
        assert_eq!(RuleStructure::new([0, 1, 0, 0, 1, 0, 0]).cost(), 14);
        assert_eq!(RuleStructure::new([0, 0, 0, 0, 0, 0, 0]).cost(), 0);
        assert_eq!(RuleStructure::new([0, 1, 1, 1, 1, 1, 0]).cost(), 74);
        assert_eq!(RuleStructure::new([0, 1, 0, 0, 1, 0, 0]).var_count(), 4);
        assert_eq!(RuleStructure::new([0, 1, 0, 1, 1, 2, 0]).var_count(), 13);
        assert_eq!(RuleStructure::new([0, 0, 0, 0, 0, 0, 0]).var_count(), 0);
    }

    #[test]
    fn rhs_reference_values() {
        assert_eq!(u3_rhs(1), [1, 0, 0, 0]);
        assert_eq!(u3_rhs(9), [12, 7, 3, 1]);
        assert_eq!(u3_rhs(20), [44, 33, 24, 16]);
    }

    #[test]
    fn rhs_monotone_in_m() {
        let mut previous = [0u64; 4];
        for m in 1..=20 {
            let rhs = u3_rhs(m);
            for i in 0..4 {
                assert!(rhs[i] >= previous[i]);
            }
            previous = rhs;
        }
    }

    #[test]
    fn u3_feasibility_examples() {
        assert!(satisfies_u3(&RuleStructure::u3([1, 0, 0, 1, 0, 0]), 2));
        assert!(!satisfies_u3(&RuleStructure::u3([1, 0, 0, 0, 0, 0]), 2));
        assert!(satisfies_u3(&RuleStructure::u3([1, 1, 0, 1, 3, 1]), 9));
    }

    #[test]
    fn general3d_examples() {
        assert!(satisfies_general3d(
            &RuleStructure::new([1, 1, 0, 0, 0, 0, 0]),
            1
        ));
        assert!(!satisfies_general3d(
            &RuleStructure::new([0, 0, 0, 0, 0, 0, 0]),
            1
        ));
        assert!(!satisfies_general3d(
            &RuleStructure::new([2, 5, 5, 5, 5, 5, 5]),
            1
        ));
    }

    #[test]
    fn lower_bound_examples() {
        let lp = lp_lower_bound(1).unwrap();
        assert!((lp.n_lb - 6.0).abs() < 1e-9);
        assert!((lp.fractional_k[1] - 1.0).abs() < 1e-9);

        let lp = lp_lower_bound(4).unwrap();
        assert!((lp.n_lb - 38.0).abs() < 1e-9);

        let lp = lp_lower_bound(20).unwrap();
        assert!((lp.n_lb - 582.0).abs() < 1e-9);
    }

    #[test]
    fn enumeration_first_minima_small_m() {
        let rows = first_minima(1, 20, 5);
        assert_eq!(rows[0].structure, RuleStructure::u3([1, 0, 0, 0, 0, 0]));
        assert_eq!(rows[0].n, 6);
        assert_eq!((rows[0].minimum_index, rows[0].lexical_index), (1, 1));

        let rows = first_minima(2, 20, 5);
        assert_eq!(rows.len(), 6);
        let ns: Vec<u64> = rows.iter().map(|s| s.n).collect();
        assert_eq!(ns, vec![14, 18, 20, 24, 24, 26]);

        let rows = first_minima(4, 20, 5);
        let first: Vec<_> = rows.iter().filter(|s| s.minimum_index == 1).collect();
        assert_eq!(first.len(), 2);
        assert_eq!(first[0].structure, RuleStructure::u3([1, 0, 0, 1, 1, 0]));
        assert_eq!(first[1].structure, RuleStructure::u3([1, 0, 1, 1, 0, 0]));
    }

    #[test]
    fn enumerated_structures_are_feasible_and_bounded() {
        for m in [1u32, 3, 6] {
            let lp = lp_lower_bound(m).unwrap();
            let rows = enumerate_structures(m, 20, (2.0 * lp.n_lb) as u64);
            assert!(!rows.is_empty());
            for s in &rows {
                assert!(s.structure.is_valid_u3());
                assert!(satisfies_u3(&s.structure, m));
                assert!(s.n as f64 >= lp.n_lb - 1e-9);
                assert_eq!(s.n, s.structure.cost());
                assert_eq!(s.v, s.structure.var_count());
            }
        }
    }

    #[test]
    fn minima_indices_lookup() {
        let idx = minima_indices(4, &RuleStructure::u3([1, 0, 1, 1, 0, 0]));
        assert_eq!(idx, Some((1, 2)));
        let idx = minima_indices(6, &RuleStructure::u3([1, 0, 1, 0, 2, 0]));
        assert_eq!(idx, Some((2, 1)));
        assert_eq!(minima_indices(2, &RuleStructure::u3([1, 0, 0, 0, 0, 0])), None);
    }
}
