//! Rule data model: generator-form cubature rules, explicit point rules,
//! canonical naming, expansion, integration, and exactness verification.

mod builtin;
mod io;

pub use builtin::{builtin, builtin_rules, BUILTIN_ALIASES};
pub use io::{load, load_str, save, save_str, RuleFile};

use crate::moments::monomial_integral_f64;
use crate::search::RuleStructure;
use crate::symmetry::{orbit, ClassType, Generator};
use std::f64::consts::PI;
use thiserror::Error;

/// Default verification tolerance, scaled to the surface area (the moments
/// are all of magnitude up to `4 pi`, and reference data carries 14 digits).
pub const VERIFY_TOL: f64 = 1e-10 * (4.0 * PI);

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("malformed rule file: {0}")]
    Format(String),
    #[error("rule violates an invariant: {0}")]
    Invariant(String),
    #[error("integrand returned a non-finite value at point {0:?}")]
    NonFinite([f64; 3]),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Bundled,
    Solved,
    Imported,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Bundled => "bundled",
            Provenance::Solved => "solved",
            Provenance::Imported => "imported",
        }
    }

    pub fn from_str(s: &str) -> Option<Provenance> {
        match s {
            "bundled" => Some(Provenance::Bundled),
            "solved" => Some(Provenance::Solved),
            "imported" => Some(Provenance::Imported),
            _ => None,
        }
    }
}

/// One generator of a rule: its orbit weight and free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub weight: f64,
    pub params: Vec<f64>,
}

/// A fully symmetric rule in generator form. The blocks are stored per class
/// type (classes 1..=6; the origin class never occurs on the surface).
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    m: u32,
    degree: u32,
    structure: RuleStructure,
    blocks: [Vec<Block>; 6],
    name: String,
    provenance: Provenance,
}

/// On-sphere slack allowed for generator parameters.
const SPHERE_TOL: f64 = 1e-12;

fn sphere_deviation(class: ClassType, params: &[f64]) -> f64 {
    let norm2: f64 = params
        .iter()
        .zip(class.multiplicities())
        .map(|(p, &mult)| f64::from(mult) * p * p)
        .sum();
    (norm2 - 1.0).abs()
}

impl CubatureRule {
    /// Assemble and validate a rule. Block counts must match the structure,
    /// every generator must be non-degenerate, and every generator must lie
    /// on the unit sphere to within `1e-12`.
    pub fn new(
        m: u32,
        structure: RuleStructure,
        blocks: [Vec<Block>; 6],
        name: String,
        provenance: Provenance,
    ) -> Result<CubatureRule, RuleError> {
        if m == 0 {
            return Err(RuleError::Invariant("m must be at least 1".into()));
        }
        if !structure.is_valid_u3() {
            return Err(RuleError::Invariant(format!(
                "structure ({structure}) is not a valid surface structure"
            )));
        }
        for (index, class_blocks) in blocks.iter().enumerate() {
            let class = ClassType::from_index(index + 1).unwrap();
            let expected = structure.count(class) as usize;
            if class_blocks.len() != expected {
                return Err(RuleError::Invariant(format!(
                    "class {} has {} blocks, structure says {}",
                    class.label(),
                    class_blocks.len(),
                    expected
                )));
            }
            for (i, block) in class_blocks.iter().enumerate() {
                if !block.weight.is_finite() {
                    return Err(RuleError::Invariant(format!(
                        "weight {}{} is not finite",
                        class.weight_symbol(),
                        i + 1
                    )));
                }
                Generator::from_unordered(class, &block.params).map_err(|e| {
                    RuleError::Invariant(format!("block {} of class {}: {e}", i + 1, class.label()))
                })?;
                let deviation = sphere_deviation(class, &block.params);
                if deviation > SPHERE_TOL {
                    return Err(RuleError::Invariant(format!(
                        "block {} of class {} lies off the sphere by {deviation:.3e}",
                        i + 1,
                        class.label()
                    )));
                }
            }
        }
        Ok(CubatureRule {
            m,
            degree: 2 * m + 1,
            structure,
            blocks,
            name,
            provenance,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn structure(&self) -> &RuleStructure {
        &self.structure
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: String) {
        self.name = name;
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Blocks of one class (class index 1..=6).
    pub fn class_blocks(&self, class: ClassType) -> &[Block] {
        &self.blocks[class.index() - 1]
    }

    /// All blocks in class order with their class types.
    pub fn blocks(&self) -> impl Iterator<Item = (ClassType, usize, &Block)> {
        self.blocks.iter().enumerate().flat_map(|(index, blocks)| {
            let class = ClassType::from_index(index + 1).unwrap();
            blocks
                .iter()
                .enumerate()
                .map(move |(i, block)| (class, i, block))
        })
    }

    pub fn generator(&self, class: ClassType, i: usize) -> Generator {
        Generator::from_unordered(class, &self.class_blocks(class)[i].params)
            .expect("validated at construction")
    }

    /// Expand to the explicit point rule: every orbit concatenated, with the
    /// orbit's weight repeated per point. The point count equals the
    /// structure's cost.
    pub fn expand(&self) -> PointRule {
        let mut points = Vec::with_capacity(self.structure.cost() as usize);
        let mut weights = Vec::with_capacity(self.structure.cost() as usize);
        for (class, i, block) in self.blocks() {
            let orbit = orbit(&self.generator(class, i));
            for p in &orbit {
                points.push(*p);
                weights.push(block.weight);
            }
        }
        PointRule { points, weights }
    }

    /// Equivalent rule in canonical form: parameter magnitudes, ascending
    /// order inside equal-multiplicity classes, and the blocks of each class
    /// sorted by first parameter. Weights follow their blocks. Used when
    /// comparing solutions that may differ by sign flips or block order.
    pub fn canonicalized(&self) -> CubatureRule {
        let mut rule = self.clone();
        for (index, class_blocks) in rule.blocks.iter_mut().enumerate() {
            let class = ClassType::from_index(index + 1).unwrap();
            for block in class_blocks.iter_mut() {
                block.params = Generator::from_unordered(class, &block.params)
                    .expect("validated at construction")
                    .params()
                    .to_vec();
            }
            class_blocks.sort_by(|a, b| a.params[0].total_cmp(&b.params[0]));
        }
        rule
    }

    /// Flat variable vector of the canonical form: per class, weights and
    /// parameters block by block.
    pub fn flat_canonical(&self) -> Vec<f64> {
        let canonical = self.canonicalized();
        let mut flat = Vec::new();
        for (_, _, block) in canonical.blocks() {
            flat.push(block.weight);
            flat.extend_from_slice(&block.params);
        }
        flat
    }

    /// Largest component-wise distance between the canonical forms of two
    /// rules with the same structure; `None` when structures differ.
    pub fn canonical_distance(&self, other: &CubatureRule) -> Option<f64> {
        if self.structure != other.structure {
            return None;
        }
        let a = self.flat_canonical();
        let b = other.flat_canonical();
        Some(
            a.iter()
                .zip(&b)
                .fold(0.0, |acc, (x, y)| acc.max((x - y).abs())),
        )
    }
}

/// Canonical rule name: `U3:(2m+1)-i.j(K1,...,K6)-N`.
pub fn rule_name(m: u32, structure: &RuleStructure, i: u32, j: u32) -> String {
    format!(
        "U3:{}-{}.{}({})-{}",
        2 * m + 1,
        i,
        j,
        structure,
        structure.cost()
    )
}

/// An explicit list of points and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl PointRule {
    pub fn new(points: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<PointRule, RuleError> {
        if points.len() != weights.len() {
            return Err(RuleError::Invariant(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().flatten().any(|x| !x.is_finite())
            || weights.iter().any(|w| !w.is_finite())
        {
            return Err(RuleError::Invariant(
                "points and weights must be finite".into(),
            ));
        }
        Ok(PointRule { points, weights })
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Apply the rule to `f`. Summation is compensated so the result does not
    /// depend on accumulation error growth; evaluation failures are reported,
    /// not propagated as NaN.
    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> Result<f64, RuleError> {
        let mut sum = 0.0;
        let mut compensation = 0.0;
        for (&p, &w) in self.points.iter().zip(&self.weights) {
            let value = f(p);
            if !value.is_finite() {
                return Err(RuleError::NonFinite(p));
            }
            let term = w * value;
            let t = sum + term;
            // Neumaier update
            compensation += if sum.abs() >= term.abs() {
                (sum - t) + term
            } else {
                (term - t) + sum
            };
            sum = t;
        }
        Ok(sum + compensation)
    }

    pub fn weight_sum(&self) -> f64 {
        self.integrate(|_| 1.0).expect("constant integrand")
    }
}

/// Outcome of exactness verification against the exact moments.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claimed_degree: u32,
    /// Worst error over even monomials up to the claimed degree.
    pub max_even_error: f64,
    /// Worst magnitude over monomials with an odd exponent (exact value 0).
    pub max_odd_error: f64,
    pub weight_min: f64,
    pub max_norm_deviation: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Check a point rule against every monomial of total degree up to
/// `claimed_degree` with the default tolerance [`VERIFY_TOL`].
pub fn verify(rule: &PointRule, claimed_degree: u32) -> VerificationReport {
    verify_with_tol(rule, claimed_degree, VERIFY_TOL)
}

pub fn verify_with_tol(rule: &PointRule, claimed_degree: u32, tolerance: f64) -> VerificationReport {
    let mut max_even_error: f64 = 0.0;
    let mut max_odd_error: f64 = 0.0;
    for a in 0..=claimed_degree {
        for b in 0..=claimed_degree - a {
            for c in 0..=claimed_degree - a - b {
                let approx = rule
                    .integrate(|p| {
                        p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                    })
                    .expect("monomials are finite on the sphere");
                let error = (approx - monomial_integral_f64(a, b, c)).abs();
                if a % 2 == 0 && b % 2 == 0 && c % 2 == 0 {
                    max_even_error = max_even_error.max(error);
                } else {
                    max_odd_error = max_odd_error.max(error);
                }
            }
        }
    }
    let weight_min = rule.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let max_norm_deviation = rule
        .points
        .iter()
        .map(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    VerificationReport {
        claimed_degree,
        max_even_error,
        max_odd_error,
        weight_min,
        max_norm_deviation,
        tolerance,
        passes: max_even_error <= tolerance && max_odd_error <= tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::canonicalize;

    #[test]
    fn names_match_reference() {
        assert_eq!(
            rule_name(2, &RuleStructure::u3([1, 0, 0, 1, 0, 0]), 1, 1),
            "U3:5-1.1(1,0,0,1,0,0)-14"
        );
        assert_eq!(
            rule_name(6, &RuleStructure::u3([1, 0, 1, 0, 2, 0]), 2, 1),
            "U3:13-2.1(1,0,1,0,2,0)-78"
        );
        assert_eq!(
            rule_name(1, &RuleStructure::u3([1, 0, 0, 0, 0, 0]), 1, 1),
            "U3:3-1.1(1,0,0,0,0,0)-6"
        );
    }

    #[test]
    fn expand_counts_match_cost() {
        for rule in builtin_rules() {
            let expanded = rule.expand();
            assert_eq!(expanded.len() as u64, rule.structure().cost());
        }
    }

    #[test]
    fn integrate_examples() {
        let rule = builtin("m1").unwrap().expand();
        let total = rule.integrate(|_| 1.0).unwrap();
        assert!((total - 4.0 * PI).abs() < 1e-10);
        let x_sq = rule.integrate(|p| p[0] * p[0]).unwrap();
        assert!((x_sq - 4.0 * PI / 3.0).abs() < 1e-12);

        let rule = builtin("m3").unwrap().expand();
        let odd = rule.integrate(|p| p[0] * p[1] * p[2] * p[2]).unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn integrate_reports_non_finite() {
        let rule = builtin("m1").unwrap().expand();
        let result = rule.integrate(|p| 1.0 / (p[0] - 1.0));
        assert!(matches!(result, Err(RuleError::NonFinite(_))));
    }

    #[test]
    fn verify_detects_degree_overclaim() {
        let rule = builtin("m1").unwrap().expand();
        assert!(verify(&rule, 3).passes);
        let overclaimed = verify(&rule, 5);
        assert!(!overclaimed.passes);
        // I^N[x^4] = 4pi/3 while the exact value is 4pi/5
        let expected_gap = 4.0 * PI / 3.0 - 4.0 * PI / 5.0;
        assert!((overclaimed.max_even_error - expected_gap).abs() < 1e-10);
    }

    #[test]
    fn expansion_recovers_generators_and_weights() {
        // group expanded points by their canonical generator: the original
        // blocks reappear, each with a constant weight over its orbit
        let rule = builtin("m5").unwrap();
        let expanded = rule.expand();
        let mut groups: Vec<(crate::symmetry::Generator, f64, usize)> = Vec::new();
        for (&p, &w) in expanded.points().iter().zip(expanded.weights()) {
            let g = canonicalize(p);
            match groups.iter_mut().find(|(existing, _, _)| *existing == g) {
                Some((_, weight, count)) => {
                    assert_eq!(*weight, w);
                    *count += 1;
                }
                None => groups.push((g, w, 1)),
            }
        }
        assert_eq!(groups.len() as u32, rule.structure().generator_count());
        for (g, _, count) in &groups {
            assert_eq!(*count as u32, g.class().orbit_size());
        }
    }

    #[test]
    fn invalid_rules_rejected() {
        let blocks: [Vec<Block>; 6] = Default::default();
        // block count mismatch
        assert!(CubatureRule::new(
            1,
            RuleStructure::u3([1, 0, 0, 0, 0, 0]),
            blocks.clone(),
            "x".into(),
            Provenance::Imported,
        )
        .is_err());

        // off-sphere generator
        let mut blocks: [Vec<Block>; 6] = Default::default();
        blocks[4] = vec![Block {
            weight: 1.0,
            params: vec![0.6, 0.6],
        }];
        assert!(CubatureRule::new(
            1,
            RuleStructure::u3([0, 0, 0, 0, 1, 0]),
            blocks,
            "x".into(),
            Provenance::Imported,
        )
        .is_err());
    }

    #[test]
    fn canonical_form_ignores_signs_and_block_order() {
        // two tilted-pair blocks, out of order, one with a negative parameter
        let mut blocks: [Vec<Block>; 6] = Default::default();
        blocks[4] = vec![
            Block {
                weight: 0.2,
                params: vec![0.5, -0.5f64.sqrt()],
            },
            Block {
                weight: 0.1,
                params: vec![1.0 / 11f64.sqrt(), 3.0 / 11f64.sqrt()],
            },
        ];
        let rule = CubatureRule::new(
            5,
            RuleStructure::u3([0, 0, 0, 0, 2, 0]),
            blocks,
            "test".into(),
            Provenance::Imported,
        )
        .unwrap();
        let canonical = rule.canonicalized();
        let blocks: Vec<_> = canonical.blocks().collect();
        assert!(blocks[0].2.params[0] < blocks[1].2.params[0]);
        assert_eq!(blocks[0].2.weight, 0.1);
        assert!(blocks.iter().all(|(_, _, b)| b.params.iter().all(|&p| p > 0.0)));
    }
}
