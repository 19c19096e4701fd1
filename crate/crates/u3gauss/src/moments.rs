//! Exact monomial moments over the unit sphere.
//!
//! `I[x^(2j1) y^(2j2) z^(2j3)]` is a rational multiple of pi. The separated
//! form of the surface integral evaluates in closed form through Wallis-type
//! double factorials:
//!
//! ```text
//! I = 4 pi (2j1-1)!! (2j2-1)!! (2j3-1)!! / (2j1+2j2+2j3+1)!!
//! ```
//!
//! All arithmetic is exact (big rationals); floating point only enters when a
//! caller asks for the `f64` value. Any monomial with an odd exponent
//! integrates to exactly zero by symmetry.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;

type Rational = Ratio<BigInt>;

/// An exact moment: `value = numerator/denominator * pi` for the monomial
/// `x^(2j1) y^(2j2) z^(2j3)` with `exponents = (j1, j2, j3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moment {
    exponents: [u32; 3],
    coefficient: Rational,
}

impl Moment {
    /// Half-exponents of the monomial.
    pub fn exponents(&self) -> [u32; 3] {
        self.exponents
    }

    /// The rational coefficient of pi, in lowest terms.
    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn numerator(&self) -> &BigInt {
        self.coefficient.numer()
    }

    /// Always positive.
    pub fn denominator(&self) -> &BigInt {
        self.coefficient.denom()
    }

    /// The floating-point value `numerator/denominator * pi`.
    pub fn as_f64(&self) -> f64 {
        self.coefficient
            .to_f64()
            .expect("moment coefficients are finite")
            * PI
    }

    /// True when the coefficient equals `num/den` exactly.
    pub fn equals_fraction(&self, num: i64, den: u64) -> bool {
        self.coefficient == Rational::new(BigInt::from(num), BigInt::from(den))
    }
}

fn double_factorial(n: i64) -> BigInt {
    debug_assert!(n >= -1);
    let mut result = BigInt::from(1);
    let mut k = n;
    while k > 1 {
        result *= k;
        k -= 2;
    }
    result
}

/// Exact moment of `x^(2j1) y^(2j2) z^(2j3)` over the unit sphere.
/// Invariant under permutation of the exponents.
pub fn moment(j1: u32, j2: u32, j3: u32) -> Moment {
    let total = i64::from(j1) + i64::from(j2) + i64::from(j3);
    let numer = BigInt::from(4)
        * double_factorial(2 * i64::from(j1) - 1)
        * double_factorial(2 * i64::from(j2) - 1)
        * double_factorial(2 * i64::from(j3) - 1);
    let denom = double_factorial(2 * total + 1);
    Moment {
        exponents: [j1, j2, j3],
        coefficient: Rational::new(numer, denom),
    }
}

/// Exact integral of the raw monomial `x^a y^b z^c` over the unit sphere:
/// exactly zero whenever any exponent is odd.
pub fn monomial_integral(a: u32, b: u32, c: u32) -> Moment {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        Moment {
            exponents: [a / 2, b / 2, c / 2],
            coefficient: Rational::zero(),
        }
    } else {
        moment(a / 2, b / 2, c / 2)
    }
}

/// Floating-point value of `I[x^a y^b z^c]` for raw exponents.
pub fn monomial_integral_f64(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        0.0
    } else {
        moment(a / 2, b / 2, c / 2).as_f64()
    }
}

/// All moments with sorted half-exponent triples `j1 <= j2 <= j3` and
/// `j1 + j2 + j3 <= m`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    m: u32,
    entries: BTreeMap<[u32; 3], Moment>,
}

impl MomentTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Look up by half-exponents in any order.
    pub fn get(&self, j1: u32, j2: u32, j3: u32) -> Option<&Moment> {
        let mut key = [j1, j2, j3];
        key.sort_unstable();
        self.entries.get(&key)
    }

    /// Entries in ascending lexicographic order of the sorted triple.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32; 3], &Moment)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Build the complete table of moments up to total half-degree `m`.
pub fn moment_table(m: u32) -> MomentTable {
    let mut entries = BTreeMap::new();
    for j1 in 0..=m {
        for j2 in j1..=m.saturating_sub(j1) {
            for j3 in j2..=m.saturating_sub(j1 + j2) {
                entries.insert([j1, j2, j3], moment(j1, j2, j3));
            }
        }
    }
    MomentTable { m, entries }
}

/// Positive part of the coefficient as `(numerator, denominator)` strings,
/// handy for machine-readable output.
pub fn coefficient_strings(moment: &Moment) -> (String, String) {
    (
        moment.numerator().to_string(),
        moment.denominator().to_string(),
    )
}

/// Render a moment the way the tables print them, e.g. `4π/3` or `4π`.
pub fn display_value(moment: &Moment) -> String {
    let num = moment.numerator();
    let den = moment.denominator();
    if num.is_zero() {
        "0".to_string()
    } else if den == &BigInt::from(1) {
        format!("{num}π")
    } else {
        format!("{num}π/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!(moment(0, 0, 0).equals_fraction(4, 1));
        assert!(moment(0, 0, 1).equals_fraction(4, 3));
        assert!(moment(1, 1, 1).equals_fraction(4, 105));
        assert!(moment(0, 1, 1).equals_fraction(4, 15));
        assert!(moment(0, 0, 2).equals_fraction(4, 5));
        assert!(moment(3, 3, 4).equals_fraction(20, 2909907));
    }

    #[test]
    fn permutation_invariance() {
        for (a, b, c) in [(0u32, 1u32, 3u32), (2, 2, 5), (1, 4, 4)] {
            let reference = moment(a, b, c);
            for (x, y, z) in [(a, c, b), (b, a, c), (c, b, a), (b, c, a), (c, a, b)] {
                assert_eq!(moment(x, y, z).coefficient(), reference.coefficient());
            }
        }
    }

    #[test]
    fn odd_exponents_vanish() {
        assert!(monomial_integral(1, 2, 2).coefficient().is_zero());
        assert!(monomial_integral(0, 3, 4).coefficient().is_zero());
        assert_eq!(monomial_integral_f64(5, 0, 0), 0.0);
        assert!(monomial_integral(2, 0, 4).equals_fraction(4, 35));
    }

    #[test]
    fn table_completeness() {
        let table = moment_table(1);
        assert_eq!(table.len(), 2);
        assert!(table.get(0, 0, 0).unwrap().equals_fraction(4, 1));
        assert!(table.get(1, 0, 0).unwrap().equals_fraction(4, 3));

        let table = moment_table(2);
        assert!(table.get(0, 1, 1).unwrap().equals_fraction(4, 15));
        assert!(table.get(0, 0, 2).unwrap().equals_fraction(4, 5));

        // multisets {j1 <= j2 <= j3} with sum <= 10, 67 of them
        let table = moment_table(10);
        assert_eq!(table.len(), 67);
        assert!(table.get(3, 3, 4).unwrap().equals_fraction(20, 2909907));
    }

    #[test]
    fn display_formats() {
        assert_eq!(display_value(&moment(0, 0, 0)), "4π");
        assert_eq!(display_value(&moment(0, 0, 1)), "4π/3");
        assert_eq!(display_value(&monomial_integral(1, 0, 0)), "0");
    }

    #[test]
    fn f64_value_matches_direct_evaluation() {
        let m = moment(0, 0, 1);
        assert!((m.as_f64() - 4.0 * PI / 3.0).abs() < 1e-15);
    }
}
