//! The reference rules of degrees 3 through 17, in generator form.
//!
//! Values with known closed forms are evaluated from those forms (rational
//! multiples of pi, reciprocal square roots); the rest carry the published
//! 14-digit decimals. The degree-13 entry comes in two variants: the minimal
//! rule (which has a negative weight) and the good rule on four more points.

use super::{rule_name, Block, CubatureRule, Provenance};
use crate::search::RuleStructure;
use std::f64::consts::PI;

fn rule(
    m: u32,
    minima: (u32, u32),
    counts: [u32; 6],
    class_blocks: &[(usize, f64, &[f64])],
) -> CubatureRule {
    let structure = RuleStructure::u3(counts);
    let mut blocks: [Vec<Block>; 6] = Default::default();
    for &(class_index, weight, params) in class_blocks {
        blocks[class_index - 1].push(Block {
            weight,
            params: params.to_vec(),
        });
    }
    let name = rule_name(m, &structure, minima.0, minima.1);
    CubatureRule::new(m, structure, blocks, name, Provenance::Bundled)
        .expect("reference rules satisfy the invariants")
}

/// All bundled reference rules: one per degree 3..=17, plus the non-good
/// minimal variant at degree 13 (nine rules in total).
pub fn builtin_rules() -> Vec<CubatureRule> {
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let inv_sqrt11 = 1.0 / 11f64.sqrt();

    let mut rules = Vec::with_capacity(9);

    rules.push(rule(
        1,
        (1, 1),
        [1, 0, 0, 0, 0, 0],
        &[(1, 2.0 * PI / 3.0, &[1.0])],
    ));

    rules.push(rule(
        2,
        (1, 1),
        [1, 0, 0, 1, 0, 0],
        &[
            (1, 4.0 * PI / 15.0, &[1.0]),
            (4, 3.0 * PI / 10.0, &[inv_sqrt3]),
        ],
    ));

    rules.push(rule(
        3,
        (1, 1),
        [1, 1, 0, 1, 0, 0],
        &[
            (1, 4.0 * PI / 21.0, &[1.0]),
            (2, 16.0 * PI / 105.0, &[inv_sqrt2]),
            (4, 9.0 * PI / 70.0, &[inv_sqrt3]),
        ],
    ));

    let gamma = (0.5 * (1.0 - inv_sqrt3)).sqrt();
    let delta = (0.5 * (1.0 + inv_sqrt3)).sqrt();
    rules.push(rule(
        4,
        (1, 2),
        [1, 0, 1, 1, 0, 0],
        &[
            (1, 4.0 * PI / 105.0, &[1.0]),
            (3, 4.0 * PI / 35.0, &[gamma, delta]),
            (4, 9.0 * PI / 70.0, &[inv_sqrt3]),
        ],
    ));

    rules.push(rule(
        5,
        (1, 1),
        [1, 1, 0, 1, 1, 0],
        &[
            (1, 16.0 * PI / 315.0, &[1.0]),
            (2, 256.0 * PI / 2835.0, &[inv_sqrt2]),
            (4, 27.0 * PI / 320.0, &[inv_sqrt3]),
            (5, 14641.0 * PI / 181440.0, &[inv_sqrt11, 3.0 * inv_sqrt11]),
        ],
    ));

    // degree 13, minimal but not good: the space-diagonal weight is negative
    rules.push(rule(
        6,
        (1, 1),
        [1, 1, 1, 1, 1, 0],
        &[
            (1, 0.00644739233053, &[1.0]),
            (2, 0.20865289186971, &[inv_sqrt2]),
            (3, 0.20762372406088, &[0.32077264898077, 0.94715622136259]),
            (4, -0.37178913059595, &[inv_sqrt3]),
            (5, 0.33396646771858, &[0.48038446141531, 0.73379938570528]),
        ],
    ));

    // degree 13, good, from the second minimum
    rules.push(rule(
        6,
        (2, 1),
        [1, 0, 1, 0, 2, 0],
        &[
            (1, 0.05571838151106, &[1.0]),
            (3, 0.18861500631211, &[0.33370053800545, 0.94267913466612]),
            (5, 0.12537551702973, &[0.70117074174860, 0.12930267526790]),
            (5, 0.19567865687870, &[0.43948383947130, 0.78339511722191]),
        ],
    ));

    rules.push(rule(
        7,
        (1, 1),
        [1, 0, 1, 1, 2, 0],
        &[
            (1, 0.14506632743849, &[1.0]),
            (3, 0.14843778669299, &[0.92733065715117, 0.37424303909034]),
            (4, 0.15009158815708, &[inv_sqrt3]),
            (5, 0.13961936079093, &[0.36960284645415, 0.85251831170127]),
            (5, 0.14924451686907, &[0.69435400660267, 0.18906355288540]),
        ],
    ));

    rules.push(rule(
        8,
        (1, 1),
        [1, 0, 1, 1, 3, 0],
        &[
            (1, 0.04810746585109, &[1.0]),
            (3, 0.12183091738552, &[0.87815891060407, 0.47836902881214]),
            (4, 0.12307173528176, &[inv_sqrt3]),
            (5, 0.10319173408833, &[0.18511563534456, 0.96512403508666]),
            (5, 0.12058024902856, &[0.39568947305584, 0.82876998125269]),
            (5, 0.12494509687253, &[0.69042104838229, 0.21595729184587]),
        ],
    ));

    rules
}

/// Look up a bundled rule by alias (`m1`..`m8`, `m6fsm`, `m6fsgm`) or full
/// name. `m6` resolves to the good degree-13 rule.
pub fn builtin(key: &str) -> Option<CubatureRule> {
    let rules = builtin_rules();
    let index = match key {
        "m1" => 0,
        "m2" => 1,
        "m3" => 2,
        "m4" => 3,
        "m5" => 4,
        "m6fsm" => 5,
        "m6" | "m6fsgm" => 6,
        "m7" => 7,
        "m8" => 8,
        name => return rules.into_iter().find(|r| r.name() == name),
    };
    rules.into_iter().nth(index)
}

/// Aliases in the order of [`builtin_rules`].
pub const BUILTIN_ALIASES: [&str; 9] = [
    "m1", "m2", "m3", "m4", "m5", "m6fsm", "m6fsgm", "m7", "m8",
];
