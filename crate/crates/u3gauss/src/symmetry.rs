//! Octahedral (fully symmetric) equivalence classes of points in 3D.
//!
//! Every point of `R^3` belongs to an equivalence class under the 48-element
//! group of coordinate permutations and sign changes. A class is represented
//! by its *generator*: the absolute values of the nonzero coordinates, grouped
//! by multiplicity. For 3D there are exactly seven class types, and the class
//! type together with the free parameters determines the whole orbit.
//!
//! This module also provides the counting functions used when sizing the
//! moment system: `p_nu` (ordered positive solutions of a fixed-length sum),
//! the cumulative equation count, and the number of class types in dimension
//! `n` (which grows like the summed partition function).

use num_bigint::BigUint;
use thiserror::Error;

/// Default absolute tolerance for treating a coordinate as zero during
/// canonicalization. Pass `0.0` to [`canonicalize_with_tol`] for exact mode.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("invalid multiplicities {mults:?} for dimension {n}")]
    InvalidMultiplicities { n: u32, mults: Vec<u32> },
    #[error("degenerate generator: {0}")]
    DegenerateGenerator(String),
    #[error("orbit size overflows u128")]
    Overflow,
}

/// The seven class types for 3D, in Table-1 order. The variant names mirror
/// the multiplicity strings of the nonzero coordinates: `TwoOne` is the class
/// of points like (z, z, h) with z repeated and h distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassType {
    /// `[0]` — the origin; orbit size 1.
    Zero,
    /// `[1]` — one nonzero coordinate (a, 0, 0); orbit size 6.
    One,
    /// `[2]` — two equal nonzero coordinates (b, b, 0); orbit size 12.
    Two,
    /// `[1,1]` — two distinct nonzero coordinates (g, d, 0); orbit size 24.
    OneOne,
    /// `[3]` — three equal nonzero coordinates (e, e, e); orbit size 8.
    Three,
    /// `[2,1]` — a repeated pair and a distinct value (z, z, h); orbit size 24.
    TwoOne,
    /// `[1,1,1]` — three distinct nonzero coordinates; orbit size 48.
    OneOneOne,
}

impl ClassType {
    pub const ALL: [ClassType; 7] = [
        ClassType::Zero,
        ClassType::One,
        ClassType::Two,
        ClassType::OneOne,
        ClassType::Three,
        ClassType::TwoOne,
        ClassType::OneOneOne,
    ];

    /// Class number 0..=6 in the standard ordering.
    pub fn index(self) -> usize {
        match self {
            ClassType::Zero => 0,
            ClassType::One => 1,
            ClassType::Two => 2,
            ClassType::OneOne => 3,
            ClassType::Three => 4,
            ClassType::TwoOne => 5,
            ClassType::OneOneOne => 6,
        }
    }

    pub fn from_index(index: usize) -> Option<ClassType> {
        ClassType::ALL.get(index).copied()
    }

    /// The multiplicity-string label, e.g. `"[2,1]"`.
    pub fn label(self) -> &'static str {
        match self {
            ClassType::Zero => "[0]",
            ClassType::One => "[1]",
            ClassType::Two => "[2]",
            ClassType::OneOne => "[1,1]",
            ClassType::Three => "[3]",
            ClassType::TwoOne => "[2,1]",
            ClassType::OneOneOne => "[1,1,1]",
        }
    }

    /// Number of points in an orbit of this class.
    pub fn orbit_size(self) -> u32 {
        match self {
            ClassType::Zero => 1,
            ClassType::One => 6,
            ClassType::Two => 12,
            ClassType::OneOne => 24,
            ClassType::Three => 8,
            ClassType::TwoOne => 24,
            ClassType::OneOneOne => 48,
        }
    }

    /// Number of free parameters of a generator of this class.
    pub fn param_count(self) -> usize {
        match self {
            ClassType::Zero => 0,
            ClassType::One | ClassType::Two | ClassType::Three => 1,
            ClassType::OneOne | ClassType::TwoOne => 2,
            ClassType::OneOneOne => 3,
        }
    }

    /// Multiplicities of the distinct nonzero coordinates, largest first.
    pub fn multiplicities(self) -> &'static [u32] {
        match self {
            ClassType::Zero => &[],
            ClassType::One => &[1],
            ClassType::Two => &[2],
            ClassType::OneOne => &[1, 1],
            ClassType::Three => &[3],
            ClassType::TwoOne => &[2, 1],
            ClassType::OneOneOne => &[1, 1, 1],
        }
    }

    /// Class type for a multiplicity string sorted in non-increasing order.
    pub fn from_multiplicities(mults: &[u32]) -> Option<ClassType> {
        ClassType::ALL
            .into_iter()
            .find(|c| c.multiplicities() == mults)
    }

    /// Conventional weight symbol: o, a, b, c, d, e, f.
    pub fn weight_symbol(self) -> char {
        b"oabcdef"[self.index()] as char
    }

    /// ASCII names of the generator parameters.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ClassType::Zero => &[],
            ClassType::One => &["alpha"],
            ClassType::Two => &["beta"],
            ClassType::OneOne => &["gamma", "delta"],
            ClassType::Three => &["epsilon"],
            ClassType::TwoOne => &["zeta", "eta"],
            ClassType::OneOneOne => &["theta", "mu", "lambda"],
        }
    }

    /// Greek glyphs for the generator parameters, used by the renderer.
    pub fn param_glyphs(self) -> &'static [&'static str] {
        match self {
            ClassType::Zero => &[],
            ClassType::One => &["α"],
            ClassType::Two => &["β"],
            ClassType::OneOne => &["γ", "δ"],
            ClassType::Three => &["ε"],
            ClassType::TwoOne => &["ζ", "η"],
            ClassType::OneOneOne => &["θ", "μ", "λ"],
        }
    }
}

/// Canonical representative of an equivalence class: the class type plus the
/// distinct nonzero coordinate magnitudes.
///
/// For `OneOne` and `OneOneOne` the parameters are strictly increasing; for
/// `TwoOne` the repeated value comes first and need not be the smaller one.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    class: ClassType,
    params: Vec<f64>,
}

impl Generator {
    /// Build a generator, rejecting parameter lists that belong to a
    /// different class type (zero, negative, or coincident values).
    pub fn new(class: ClassType, params: Vec<f64>) -> Result<Generator, SymmetryError> {
        if params.len() != class.param_count() {
            return Err(SymmetryError::DegenerateGenerator(format!(
                "class {} takes {} parameters, got {}",
                class.label(),
                class.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(SymmetryError::DegenerateGenerator(format!(
                "class {} parameters must be finite and positive: {params:?}",
                class.label()
            )));
        }
        let distinct_ok = match class {
            ClassType::OneOne => params[0] < params[1],
            ClassType::TwoOne => params[0] != params[1],
            ClassType::OneOneOne => params[0] < params[1] && params[1] < params[2],
            _ => true,
        };
        if !distinct_ok {
            return Err(SymmetryError::DegenerateGenerator(format!(
                "class {} parameters must be distinct ({params:?}); equal values belong to another class",
                class.label()
            )));
        }
        Ok(Generator { class, params })
    }

    /// Like [`Generator::new`] but accepts parameters in any order and of any
    /// sign: values are replaced by their magnitudes and the equal-multiplicity
    /// classes are sorted ascending. For `TwoOne` the first value stays the
    /// repeated one.
    pub fn from_unordered(class: ClassType, params: &[f64]) -> Result<Generator, SymmetryError> {
        let mut p: Vec<f64> = params.iter().map(|x| x.abs()).collect();
        match class {
            ClassType::OneOne | ClassType::OneOneOne => p.sort_by(f64::total_cmp),
            _ => {}
        }
        Generator::new(class, p)
    }

    pub fn class(&self) -> ClassType {
        self.class
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// The canonical coordinate vector: parameters repeated according to
    /// their multiplicities, padded with zeros.
    pub fn canonical_point(&self) -> [f64; 3] {
        let mut point = [0.0; 3];
        let mut k = 0;
        for (value, mult) in self.params.iter().zip(self.class.multiplicities()) {
            for _ in 0..*mult {
                point[k] = *value;
                k += 1;
            }
        }
        point
    }
}

/// All distinct points of an equivalence class.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    points: Vec<[f64; 3]>,
}

impl Orbit {
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<'a> IntoIterator for &'a Orbit {
    type Item = &'a [f64; 3];
    type IntoIter = std::slice::Iter<'a, [f64; 3]>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Canonicalize with the default zero tolerance [`ZERO_TOL`].
pub fn canonicalize(point: [f64; 3]) -> Generator {
    canonicalize_with_tol(point, ZERO_TOL)
}

/// Map a point to the generator of its equivalence class: magnitudes sorted,
/// entries within `tol` of zero dropped, equal values grouped. Grouping uses
/// exact equality of the magnitudes, so orbit points (which carry the exact
/// parameter values) always map back to their generator.
pub fn canonicalize_with_tol(point: [f64; 3], tol: f64) -> Generator {
    let mut values: Vec<f64> = point
        .iter()
        .map(|x| x.abs())
        .filter(|&x| x > tol)
        .collect();
    values.sort_by(f64::total_cmp);

    let mut groups: Vec<(f64, u32)> = Vec::new();
    for v in values {
        match groups.last_mut() {
            Some((g, count)) if *g == v => *count += 1,
            _ => groups.push((v, 1)),
        }
    }
    // Largest multiplicity first; stable sort keeps equal-multiplicity groups
    // in ascending value order.
    groups.sort_by(|a, b| b.1.cmp(&a.1));

    let mults: Vec<u32> = groups.iter().map(|g| g.1).collect();
    let class = ClassType::from_multiplicities(&mults)
        .expect("a 3-vector always yields one of the seven class types");
    Generator {
        class,
        params: groups.into_iter().map(|g| g.0).collect(),
    }
}

/// Expand a generator to its full orbit: all distinct images under the 48
/// signed permutations. Points are deduplicated exactly.
pub fn orbit(generator: &Generator) -> Orbit {
    let base = generator.canonical_point();
    let mut seen = std::collections::BTreeSet::new();
    let mut points = Vec::new();
    for perm in PERMUTATIONS {
        let permuted = [base[perm[0]], base[perm[1]], base[perm[2]]];
        for signs in 0..8u32 {
            let mut p = permuted;
            for (axis, value) in p.iter_mut().enumerate() {
                if signs >> axis & 1 == 1 {
                    *value = -*value;
                }
                if *value == 0.0 {
                    *value = 0.0; // normalize -0.0
                }
            }
            if seen.insert(p.map(f64::to_bits)) {
                points.push(p);
            }
        }
    }
    Orbit { points }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Size of the class with the given nonzero-coordinate multiplicities in
/// dimension `n`: `2^r * n! / ((n-r)! * l_1! ... l_p!)` where `r` is the sum
/// of the multiplicities.
pub fn orbit_size_formula(n: u32, multiplicities: &[u32]) -> Result<u128, SymmetryError> {
    let invalid = || SymmetryError::InvalidMultiplicities {
        n,
        mults: multiplicities.to_vec(),
    };
    if multiplicities.iter().any(|&l| l == 0) {
        return Err(invalid());
    }
    let r: u32 = multiplicities.iter().sum();
    if r > n {
        return Err(invalid());
    }
    let mut size = BigUint::from(1u32);
    for k in 0..r {
        size *= BigUint::from(n - k); // falling factorial n!/(n-r)!
    }
    for &l in multiplicities {
        for k in 2..=l {
            size /= BigUint::from(k);
        }
    }
    size <<= r; // times 2^r
    u128::try_from(size).map_err(|_| SymmetryError::Overflow)
}

/// Number of partitions of `r` into exactly `parts` positive parts.
fn partitions_exact(r: u32, parts: u32) -> u64 {
    let (r, parts) = (r as usize, parts as usize);
    if parts == 0 {
        return (r == 0) as u64;
    }
    if r < parts {
        return 0;
    }
    // table[x][j] = partitions of x into exactly j parts
    let mut table = vec![vec![0u64; parts + 1]; r + 1];
    table[0][0] = 1;
    for x in 1..=r {
        for j in 1..=parts.min(x) {
            table[x][j] = table[x - 1][j - 1] + if x >= j { table[x - j][j] } else { 0 };
        }
    }
    table[r][parts]
}

/// The per-degree equation multiplicities of the moment system: for
/// `nu >= 1` this counts ordered solutions `1 <= k_1 <= ... <= k_nu` of
/// `k_1 + ... + k_nu = r` (partitions of `r` into exactly `nu` parts); for
/// `nu = 0` there is a single solution at `r = 1` and none otherwise, which
/// accounts for the lone `I[1]` equation.
pub fn p_nu(nu: u32, r: u32) -> u64 {
    if nu == 0 {
        (r == 1) as u64
    } else {
        partitions_exact(r, nu)
    }
}

/// Total number of moment equations for a rule of degree `2m+1`:
/// the sum of `p_nu(r)` over `r = 1..=m` and `nu = 0..=3`.
pub fn equation_count(m: u32) -> u64 {
    (1..=m)
        .map(|r| (0..=3).map(|nu| p_nu(nu, r)).sum::<u64>())
        .sum()
}

/// Partition counts P(0)..P(n) by Euler's pentagonal-number recurrence.
pub fn partition_counts(n: u32) -> Vec<BigUint> {
    let n = n as usize;
    let mut p: Vec<BigUint> = Vec::with_capacity(n + 1);
    p.push(BigUint::from(1u32));
    for x in 1..=n {
        let mut acc = num_bigint::BigInt::from(0);
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 > x && g2 > x {
                break;
            }
            let sign = if k % 2 == 0 { -1 } else { 1 };
            if g1 <= x {
                acc += sign * num_bigint::BigInt::from(p[x - g1].clone());
            }
            if g2 <= x {
                acc += sign * num_bigint::BigInt::from(p[x - g2].clone());
            }
            k += 1;
        }
        p.push(acc.try_into().expect("partition counts are positive"));
    }
    p
}

/// Number of class types of fully symmetric point sets in dimension `n`
/// (the origin class included). Equal to the number of non-increasing
/// strings of positive integers with sum at most `n`, i.e. the sum of the
/// partition counts P(0) + ... + P(n).
pub fn count_class_types(n: u32) -> BigUint {
    partition_counts(n).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_table_matches_reference() {
        let sizes = [1, 6, 12, 24, 8, 24, 48];
        let params = [0, 1, 1, 2, 1, 2, 3];
        for (i, class) in ClassType::ALL.into_iter().enumerate() {
            assert_eq!(class.index(), i);
            assert_eq!(class.orbit_size(), sizes[i]);
            assert_eq!(class.param_count(), params[i]);
            assert_eq!(
                orbit_size_formula(3, class.multiplicities()).unwrap(),
                sizes[i] as u128
            );
        }
    }

    #[test]
    fn canonicalize_examples() {
        let origin = canonicalize([0.0, 0.0, 0.0]);
        assert_eq!(origin.class(), ClassType::Zero);
        assert!(origin.params().is_empty());

        let axis = canonicalize([0.0, -1.0, 0.0]);
        assert_eq!(axis.class(), ClassType::One);
        assert_eq!(axis.params(), &[1.0]);

        // repeated magnitude first, the distinct value second
        let mixed = canonicalize([0.3, -0.3, 0.9]);
        assert_eq!(mixed.class(), ClassType::TwoOne);
        assert_eq!(mixed.params(), &[0.3, 0.9]);
        let in_orbit = orbit(&Generator::new(ClassType::TwoOne, vec![0.3, 0.9]).unwrap());
        assert!(in_orbit.points().contains(&[0.3, -0.3, 0.9]));
    }

    #[test]
    fn canonicalize_zero_tolerance() {
        let nudged = canonicalize([1e-13, -1.0, 0.0]);
        assert_eq!(nudged.class(), ClassType::One);
        let exact = canonicalize_with_tol([1e-13, -1.0, 0.0], 0.0);
        assert_eq!(exact.class(), ClassType::OneOne);
    }

    #[test]
    fn orbit_sizes_and_closure() {
        let cases = [
            Generator::new(ClassType::One, vec![1.0]).unwrap(),
            Generator::new(ClassType::Two, vec![std::f64::consts::FRAC_1_SQRT_2]).unwrap(),
            Generator::new(ClassType::OneOne, vec![0.3, 0.9]).unwrap(),
            Generator::new(ClassType::Three, vec![0.5]).unwrap(),
            Generator::new(ClassType::TwoOne, vec![0.7, 0.2]).unwrap(),
            Generator::new(ClassType::OneOneOne, vec![0.2, 0.3, 0.9]).unwrap(),
        ];
        for generator in cases {
            let orb = orbit(&generator);
            assert_eq!(orb.len() as u32, generator.class().orbit_size());
            for p in &orb {
                assert_eq!(canonicalize(*p), generator);
            }
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(Generator::new(ClassType::OneOne, vec![0.5, 0.5]).is_err());
        assert!(Generator::new(ClassType::TwoOne, vec![0.5, 0.5]).is_err());
        assert!(Generator::new(ClassType::One, vec![0.0]).is_err());
        assert!(Generator::new(ClassType::OneOneOne, vec![0.2, 0.2, 0.9]).is_err());
    }

    #[test]
    fn from_unordered_sorts_magnitudes() {
        let g = Generator::from_unordered(ClassType::OneOne, &[0.9, -0.3]).unwrap();
        assert_eq!(g.params(), &[0.3, 0.9]);
        // TwoOne keeps the repeated coordinate first even when larger
        let g = Generator::from_unordered(ClassType::TwoOne, &[0.7, 0.2]).unwrap();
        assert_eq!(g.params(), &[0.7, 0.2]);
    }

    #[test]
    fn orbit_size_formula_cases() {
        assert_eq!(orbit_size_formula(3, &[]).unwrap(), 1);
        assert_eq!(orbit_size_formula(3, &[2, 1]).unwrap(), 24);
        assert_eq!(orbit_size_formula(4, &[1, 1, 1, 1]).unwrap(), 384);
        assert!(orbit_size_formula(3, &[2, 2]).is_err());
        assert!(orbit_size_formula(3, &[0]).is_err());
    }

    #[test]
    fn p_nu_spot_values() {
        assert_eq!(p_nu(3, 3), 1);
        assert_eq!(p_nu(2, 5), 2);
        assert_eq!(p_nu(3, 9), 7);
        assert_eq!(p_nu(0, 1), 1);
        assert_eq!(p_nu(0, 4), 0);
        assert_eq!(p_nu(1, 17), 1);
    }

    #[test]
    fn equation_count_examples() {
        assert_eq!(equation_count(1), 2);
        assert_eq!(equation_count(4), 11);
        assert_eq!(equation_count(20), 358);
    }

    #[test]
    fn class_type_counts() {
        assert_eq!(count_class_types(3), BigUint::from(7u32));
        assert_eq!(count_class_types(10), BigUint::from(139u32));
        assert_eq!(count_class_types(100), BigUint::from(1642992568u64));
    }

    #[test]
    fn canonicalize_idempotent_on_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let p = [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5];
            let g = canonicalize(p);
            assert_eq!(canonicalize(g.canonical_point()), g);
        }
    }
}
