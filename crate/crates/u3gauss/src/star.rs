//! The moment system for a chosen degree and structure: assembly, residual
//! and Jacobian evaluation, multi-start damped least-squares solving, a
//! goodness check for solved rules, and human-readable rendering.
//!
//! Variables are laid out per class type in ascending class order; within a
//! class the orbit weights come first, then the first parameter of every
//! generator, then the second, and so on. The on-sphere conditions are kept
//! as explicit equations (the fixed values are pinned in the initial point
//! instead of eliminated), so the residual of a correct rule is zero row by
//! row.

use crate::linalg::Matrix;
use crate::lm::{self, LmOptions};
use crate::moments::moment;
use crate::rule::{Block, CubatureRule, Provenance, RuleError};
use crate::search::RuleStructure;
use crate::symmetry::{equation_count, ClassType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StarError {
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("variable vector has length {got}, system has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
}

/// One row of the system.
#[derive(Debug, Clone, PartialEq)]
pub enum Equation {
    /// `sum over orbits of x^(2j[0]) y^(2j[1]) z^(2j[2])  =  rhs`.
    /// The number of nonzero entries of `j` names the subsystem (I, II, III);
    /// `j = [0,0,0]` is the surface-area row.
    Moment { j: [u32; 3], rhs: f64 },
    /// A parameter pinned by the on-sphere condition: `x - value = 0`
    /// (alpha = 1, beta = 1/sqrt(2), epsilon = 1/sqrt(3)).
    Pin {
        class: ClassType,
        generator: usize,
        value: f64,
    },
    /// Quadratic on-sphere condition of generator `generator`:
    /// `sum of mult * param^2 - 1 = 0`.
    UnitNorm { class: ClassType, generator: usize },
}

/// The assembled system for one `(m, structure)` pair.
#[derive(Debug, Clone)]
pub struct StarSystem {
    m: u32,
    structure: RuleStructure,
    offsets: [usize; 6],
    nvars: usize,
    equations: Vec<Equation>,
}

/// Classes that contribute to each subsystem, with the row coefficients of
/// the expanded orbit sums.
const SURFACE_CLASSES: [ClassType; 6] = [
    ClassType::One,
    ClassType::Two,
    ClassType::OneOne,
    ClassType::Three,
    ClassType::TwoOne,
    ClassType::OneOneOne,
];

/// Build the moment system. Subsystem I holds the area row and the pure
/// powers up to `x^(2m)`; subsystem II the two-variable rows with
/// `1 <= j <= k`, `j + k <= m`; subsystem III the three-variable rows with
/// `1 <= j <= k <= l`, `j + k + l <= m` (void for `m < 3`, as is II for
/// `m < 2`). One constraint row follows per generator.
pub fn assemble(m: u32, structure: RuleStructure) -> Result<StarSystem, StarError> {
    if m == 0 {
        return Err(StarError::InvalidStructure("m must be at least 1".into()));
    }
    if !structure.is_valid_u3() {
        return Err(StarError::InvalidStructure(format!(
            "({structure}) violates the surface invariants (K0 = 0, K1, K2, K4 <= 1)"
        )));
    }

    let mut offsets = [0usize; 6];
    let mut nvars = 0usize;
    for class in SURFACE_CLASSES {
        offsets[class.index() - 1] = nvars;
        nvars += (1 + class.param_count()) * structure.count(class) as usize;
    }

    let mut equations = Vec::new();
    equations.push(Equation::Moment {
        j: [0, 0, 0],
        rhs: 4.0 * PI,
    });
    for j in 1..=m {
        equations.push(Equation::Moment {
            j: [j, 0, 0],
            rhs: moment(j, 0, 0).as_f64(),
        });
    }
    for j in 1..=m {
        for k in j..=m.saturating_sub(j) {
            equations.push(Equation::Moment {
                j: [j, k, 0],
                rhs: moment(j, k, 0).as_f64(),
            });
        }
    }
    for j in 1..=m {
        for k in j..=m.saturating_sub(j) {
            for l in k..=m.saturating_sub(j + k) {
                equations.push(Equation::Moment {
                    j: [j, k, l],
                    rhs: moment(j, k, l).as_f64(),
                });
            }
        }
    }
    for class in SURFACE_CLASSES {
        for generator in 0..structure.count(class) as usize {
            equations.push(match class {
                ClassType::One => Equation::Pin {
                    class,
                    generator,
                    value: 1.0,
                },
                ClassType::Two => Equation::Pin {
                    class,
                    generator,
                    value: 1.0 / 2f64.sqrt(),
                },
                ClassType::Three => Equation::Pin {
                    class,
                    generator,
                    value: 1.0 / 3f64.sqrt(),
                },
                _ => Equation::UnitNorm { class, generator },
            });
        }
    }

    debug_assert_eq!(
        equations.len() as u64,
        equation_count(m) + u64::from(structure.generator_count())
    );

    Ok(StarSystem {
        m,
        structure,
        offsets,
        nvars,
        equations,
    })
}

impl StarSystem {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn structure(&self) -> &RuleStructure {
        &self.structure
    }

    pub fn var_count(&self) -> usize {
        self.nvars
    }

    /// Total number of rows, moment rows plus constraint rows.
    pub fn equation_count(&self) -> usize {
        self.equations.len()
    }

    /// Number of moment rows (the structure determines only the columns).
    pub fn moment_row_count(&self) -> usize {
        self.equations
            .iter()
            .filter(|e| matches!(e, Equation::Moment { .. }))
            .count()
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Index of the orbit weight of generator `i` of `class`.
    pub fn weight_index(&self, class: ClassType, i: usize) -> usize {
        self.offsets[class.index() - 1] + i
    }

    /// Index of parameter `p` of generator `i` of `class`.
    pub fn param_index(&self, class: ClassType, i: usize, p: usize) -> usize {
        let count = self.structure.count(class) as usize;
        self.offsets[class.index() - 1] + count * (1 + p) + i
    }

    /// ASCII variable names in layout order (`a1, alpha1, b1, beta1, ...`).
    pub fn variable_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.nvars];
        for class in SURFACE_CLASSES {
            let count = self.structure.count(class) as usize;
            for i in 0..count {
                names[self.weight_index(class, i)] = format!("{}{}", class.weight_symbol(), i + 1);
                for (p, pname) in class.param_names().iter().enumerate() {
                    names[self.param_index(class, i, p)] = format!("{pname}{}", i + 1);
                }
            }
        }
        names
    }

    fn check_len(&self, x: &[f64]) -> Result<(), StarError> {
        if x.len() != self.nvars {
            Err(StarError::LengthMismatch {
                expected: self.nvars,
                got: x.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Row values at `x`: orbit sums minus moments, constraint expressions
    /// minus their constants.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>, StarError> {
        self.check_len(x)?;
        Ok(self
            .equations
            .iter()
            .map(|equation| match equation {
                Equation::Moment { j, rhs } => self.moment_row(*j, x, None) - rhs,
                Equation::Pin {
                    class,
                    generator,
                    value,
                } => x[self.param_index(*class, *generator, 0)] - value,
                Equation::UnitNorm { class, generator } => {
                    let norm2: f64 = class
                        .multiplicities()
                        .iter()
                        .enumerate()
                        .map(|(p, &mult)| {
                            let v = x[self.param_index(*class, *generator, p)];
                            f64::from(mult) * v * v
                        })
                        .sum();
                    norm2 - 1.0
                }
            })
            .collect())
    }

    /// Entrywise partial derivatives of the residual at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix, StarError> {
        self.check_len(x)?;
        let mut jac = Matrix::zeros(self.equations.len(), self.nvars);
        let mut row_grad = vec![0.0; self.nvars];
        for (row, equation) in self.equations.iter().enumerate() {
            match equation {
                Equation::Moment { j, .. } => {
                    row_grad.fill(0.0);
                    self.moment_row(*j, x, Some(&mut row_grad));
                    for (col, &g) in row_grad.iter().enumerate() {
                        if g != 0.0 {
                            jac.set(row, col, g);
                        }
                    }
                }
                Equation::Pin {
                    class, generator, ..
                } => {
                    jac.set(row, self.param_index(*class, *generator, 0), 1.0);
                }
                Equation::UnitNorm { class, generator } => {
                    for (p, &mult) in class.multiplicities().iter().enumerate() {
                        let index = self.param_index(*class, *generator, p);
                        jac.set(row, index, 2.0 * f64::from(mult) * x[index]);
                    }
                }
            }
        }
        Ok(jac)
    }

    /// Value of one moment row; when `grad` is given, the row gradient is
    /// accumulated into it.
    fn moment_row(&self, j: [u32; 3], x: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let mut total = 0.0;
        for class in SURFACE_CLASSES {
            let count = self.structure.count(class) as usize;
            for i in 0..count {
                let weight_index = self.weight_index(class, i);
                let weight = x[weight_index];
                let mut params = [0.0; 3];
                for p in 0..class.param_count() {
                    params[p] = x[self.param_index(class, i, p)];
                }
                let (coefficient, phi, dphi) = class_term(class, j, &params);
                total += coefficient * weight * phi;
                if let Some(grad) = grad.as_deref_mut() {
                    grad[weight_index] += coefficient * phi;
                    for p in 0..class.param_count() {
                        grad[self.param_index(class, i, p)] += coefficient * weight * dphi[p];
                    }
                }
            }
        }
        total
    }

    /// Deterministic starting point for one restart: uniform in (0, 1) per
    /// variable, with the pinned parameters set to their exact values.
    pub fn initial_point(&self, seed: u64, restart: u32) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(restart));
        let mut x: Vec<f64> = (0..self.nvars).map(|_| rng.gen::<f64>()).collect();
        for (class, value) in [
            (ClassType::One, 1.0),
            (ClassType::Two, 1.0 / 2f64.sqrt()),
            (ClassType::Three, 1.0 / 3f64.sqrt()),
        ] {
            if self.structure.count(class) > 0 {
                x[self.param_index(class, 0, 0)] = value;
            }
        }
        x
    }
}

/// Per-class row contribution for the monomial with half-exponents `j`
/// (ascending, zeros first trimmed to the subsystem): returns the orbit-sum
/// coefficient, the parameter factor `phi`, and `d phi / d params`.
fn class_term(class: ClassType, j: [u32; 3], params: &[f64; 3]) -> (f64, f64, [f64; 3]) {
    let mut dphi = [0.0; 3];
    let nonzero = j.iter().filter(|&&v| v > 0).count();
    // powers as i32 exponents; all are even and >= 2 where used
    let (ja, jb, jc) = (2 * j[0] as i32, 2 * j[1] as i32, 2 * j[2] as i32);
    let [u, v, w] = *params;
    match (nonzero, class) {
        // area row: the orbit sizes themselves
        (0, c) => (f64::from(c.orbit_size()), 1.0, dphi),

        // subsystem I
        (1, ClassType::One) => {
            dphi[0] = df(u, ja);
            (2.0, u.powi(ja), dphi)
        }
        (1, ClassType::Two) => {
            dphi[0] = df(u, ja);
            (8.0, u.powi(ja), dphi)
        }
        (1, ClassType::OneOne) => {
            dphi[0] = df(u, ja);
            dphi[1] = df(v, ja);
            (8.0, u.powi(ja) + v.powi(ja), dphi)
        }
        (1, ClassType::Three) => {
            dphi[0] = df(u, ja);
            (8.0, u.powi(ja), dphi)
        }
        (1, ClassType::TwoOne) => {
            dphi[0] = 2.0 * df(u, ja);
            dphi[1] = df(v, ja);
            (8.0, 2.0 * u.powi(ja) + v.powi(ja), dphi)
        }
        (1, ClassType::OneOneOne) => {
            dphi[0] = df(u, ja);
            dphi[1] = df(v, ja);
            dphi[2] = df(w, ja);
            (16.0, u.powi(ja) + v.powi(ja) + w.powi(ja), dphi)
        }

        // subsystem II
        (2, ClassType::Two) => {
            dphi[0] = df(u, ja + jb);
            (4.0, u.powi(ja + jb), dphi)
        }
        (2, ClassType::OneOne) => {
            let phi = u.powi(ja) * v.powi(jb) + u.powi(jb) * v.powi(ja);
            dphi[0] = df(u, ja) * v.powi(jb) + df(u, jb) * v.powi(ja);
            dphi[1] = u.powi(ja) * df(v, jb) + u.powi(jb) * df(v, ja);
            (4.0, phi, dphi)
        }
        (2, ClassType::Three) => {
            dphi[0] = df(u, ja + jb);
            (8.0, u.powi(ja + jb), dphi)
        }
        (2, ClassType::TwoOne) => {
            let phi = u.powi(ja + jb) + u.powi(ja) * v.powi(jb) + u.powi(jb) * v.powi(ja);
            dphi[0] = df(u, ja + jb) + df(u, ja) * v.powi(jb) + df(u, jb) * v.powi(ja);
            dphi[1] = u.powi(ja) * df(v, jb) + u.powi(jb) * df(v, ja);
            (8.0, phi, dphi)
        }
        (2, ClassType::OneOneOne) => {
            let phi = u.powi(ja) * v.powi(jb)
                + u.powi(jb) * v.powi(ja)
                + u.powi(ja) * w.powi(jb)
                + u.powi(jb) * w.powi(ja)
                + v.powi(ja) * w.powi(jb)
                + v.powi(jb) * w.powi(ja);
            dphi[0] = df(u, ja) * (v.powi(jb) + w.powi(jb)) + df(u, jb) * (v.powi(ja) + w.powi(ja));
            dphi[1] = df(v, jb) * (u.powi(ja) + w.powi(ja)) + df(v, ja) * (u.powi(jb) + w.powi(jb));
            dphi[2] = df(w, jb) * (u.powi(ja) + v.powi(ja)) + df(w, ja) * (u.powi(jb) + v.powi(jb));
            (8.0, phi, dphi)
        }

        // subsystem III
        (3, ClassType::Three) => {
            dphi[0] = df(u, ja + jb + jc);
            (8.0, u.powi(ja + jb + jc), dphi)
        }
        (3, ClassType::TwoOne) => {
            let phi = u.powi(ja + jb) * v.powi(jc)
                + u.powi(ja + jc) * v.powi(jb)
                + u.powi(jb + jc) * v.powi(ja);
            dphi[0] = df(u, ja + jb) * v.powi(jc)
                + df(u, ja + jc) * v.powi(jb)
                + df(u, jb + jc) * v.powi(ja);
            dphi[1] = u.powi(ja + jb) * df(v, jc)
                + u.powi(ja + jc) * df(v, jb)
                + u.powi(jb + jc) * df(v, ja);
            (8.0, phi, dphi)
        }
        (3, ClassType::OneOneOne) => {
            let mut phi = 0.0;
            for (ea, eb, ec) in [
                (ja, jb, jc),
                (ja, jc, jb),
                (jb, ja, jc),
                (jb, jc, ja),
                (jc, ja, jb),
                (jc, jb, ja),
            ] {
                phi += u.powi(ea) * v.powi(eb) * w.powi(ec);
                dphi[0] += df(u, ea) * v.powi(eb) * w.powi(ec);
                dphi[1] += u.powi(ea) * df(v, eb) * w.powi(ec);
                dphi[2] += u.powi(ea) * v.powi(eb) * df(w, ec);
            }
            (8.0, phi, dphi)
        }

        // classes whose orbits cannot produce the monomial
        _ => (0.0, 0.0, dphi),
    }
}

/// d(x^n)/dx for even n >= 2.
fn df(x: f64, n: i32) -> f64 {
    f64::from(n) * x.powi(n - 1)
}

#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub seed: u64,
    pub restarts: u32,
    pub max_iterations: u32,
    pub residual_tol: f64,
    pub step_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 1,
            restarts: 100,
            max_iterations: 10_000,
            residual_tol: 1e-12,
            step_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub best_x: Vec<f64>,
    /// Max-norm of the residual at `best_x`.
    pub best_residual_norm: f64,
    pub converged: bool,
    /// Restart that produced the best point.
    pub restart_index: u32,
}

fn lm_options(config: &SolveConfig) -> LmOptions {
    LmOptions {
        max_iterations: config.max_iterations,
        residual_tol: config.residual_tol,
        step_tol: config.step_tol,
    }
}

fn run_restart(system: &StarSystem, config: &SolveConfig, restart: u32) -> lm::LmResult {
    let x0 = system.initial_point(config.seed, restart);
    lm::minimize(
        |x| system.residual(x).expect("length fixed by the system"),
        |x| system.jacobian(x).expect("length fixed by the system"),
        x0,
        &lm_options(config),
    )
}

/// Multi-start solve: `restarts` independent damped least-squares runs from
/// seeded random points, keeping the best. Deterministic for a fixed config;
/// ties in the residual go to the lower restart index.
pub fn solve(system: &StarSystem, config: &SolveConfig) -> SolveOutcome {
    let mut best: Option<SolveOutcome> = None;
    for restart in 0..config.restarts {
        let result = run_restart(system, config, restart);
        let replace = best
            .as_ref()
            .map_or(true, |b| result.residual_inf < b.best_residual_norm);
        if replace {
            best = Some(SolveOutcome {
                best_x: result.x,
                best_residual_norm: result.residual_inf,
                converged: result.converged,
                restart_index: restart,
            });
        }
    }
    best.expect("at least one restart")
}

/// Like [`solve`] but retains up to `max_solutions` distinct converged
/// solutions, ordered by residual. Two solutions are distinct when their
/// canonical rule forms differ by more than `1e-6` in any component.
pub fn solve_collect(
    system: &StarSystem,
    config: &SolveConfig,
    max_solutions: usize,
) -> Vec<SolveOutcome> {
    let mut converged: Vec<SolveOutcome> = Vec::new();
    for restart in 0..config.restarts {
        let result = run_restart(system, config, restart);
        if result.converged {
            converged.push(SolveOutcome {
                best_x: result.x,
                best_residual_norm: result.residual_inf,
                converged: true,
                restart_index: restart,
            });
        }
    }
    converged.sort_by(|a, b| {
        a.best_residual_norm
            .total_cmp(&b.best_residual_norm)
            .then(a.restart_index.cmp(&b.restart_index))
    });
    let mut distinct: Vec<(SolveOutcome, CubatureRule)> = Vec::new();
    for outcome in converged {
        let Ok(rule) = rule_from_solution(system, &outcome.best_x, Provenance::Solved) else {
            continue; // degenerate limit (coincident parameters); not a rule
        };
        let is_new = distinct
            .iter()
            .all(|(_, seen)| match rule.canonical_distance(seen) {
                Some(distance) => distance > 1e-6,
                None => true,
            });
        if is_new {
            distinct.push((outcome, rule));
            if distinct.len() == max_solutions {
                break;
            }
        }
    }
    distinct.into_iter().map(|(outcome, _)| outcome).collect()
}

/// Interpret a solution vector as a rule in generator form.
pub fn rule_from_solution(
    system: &StarSystem,
    x: &[f64],
    provenance: Provenance,
) -> Result<CubatureRule, RuleError> {
    let structure = *system.structure();
    let mut blocks: [Vec<Block>; 6] = Default::default();
    for class in SURFACE_CLASSES {
        for i in 0..structure.count(class) as usize {
            blocks[class.index() - 1].push(Block {
                weight: x[system.weight_index(class, i)],
                params: (0..class.param_count())
                    .map(|p| x[system.param_index(class, i, p)])
                    .collect(),
            });
        }
    }
    let name = format!("U3:{}-({})-{}", 2 * system.m() + 1, structure, structure.cost());
    CubatureRule::new(system.m(), structure, blocks, name, provenance)
}

/// Whether a rule is *good*: positive weights and every point on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodnessReport {
    pub all_weights_positive: bool,
    pub all_points_on_sphere: bool,
    pub min_weight: f64,
    pub max_norm_deviation: f64,
    /// Name and value of a violating weight, when there is one.
    pub offending_weight: Option<(String, f64)>,
}

impl GoodnessReport {
    pub fn good(&self) -> bool {
        self.all_weights_positive && self.all_points_on_sphere
    }
}

/// Classify a (verified) rule. `tol` bounds the allowed distance of expanded
/// points from the sphere.
pub fn classify(rule: &CubatureRule, tol: f64) -> GoodnessReport {
    let mut min_weight = f64::INFINITY;
    let mut offending_weight = None;
    for (class, i, block) in rule.blocks() {
        if block.weight < min_weight {
            min_weight = block.weight;
            if block.weight <= 0.0 && offending_weight.is_none() {
                offending_weight = Some((
                    format!("{}{}", class.weight_symbol(), i + 1),
                    block.weight,
                ));
            }
        }
    }
    let expanded = rule.expand();
    let max_norm_deviation = expanded
        .points()
        .iter()
        .map(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    GoodnessReport {
        all_weights_positive: min_weight > 0.0,
        all_points_on_sphere: max_norm_deviation <= tol,
        min_weight,
        max_norm_deviation,
        offending_weight,
    }
}

// ---------------------------------------------------------------------------
// rendering

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Text,
    Latex,
}

fn digits(n: u32, glyphs: &[char; 10]) -> String {
    n.to_string()
        .chars()
        .map(|c| glyphs[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn latex_glyph(glyph: &str) -> &'static str {
    match glyph {
        "α" => "\\alpha",
        "β" => "\\beta",
        "γ" => "\\gamma",
        "δ" => "\\delta",
        "ε" => "\\epsilon",
        "ζ" => "\\zeta",
        "η" => "\\eta",
        "θ" => "\\theta",
        "μ" => "\\mu",
        "λ" => "\\lambda",
        "a" => "a",
        "b" => "b",
        "c" => "c",
        "d" => "d",
        "e" => "e",
        "f" => "f",
        _ => unreachable!("unknown symbol"),
    }
}

fn monomial_label(j: [u32; 3], style: Style) -> String {
    if j == [0, 0, 0] {
        return match style {
            Style::Text => "I[1]".to_string(),
            Style::Latex => "I [ 1 ]".to_string(),
        };
    }
    let mut parts = Vec::new();
    for (variable, half) in ["x", "y", "z"].iter().zip(j) {
        if half > 0 {
            parts.push(match style {
                Style::Text => format!("{variable}{}", digits(2 * half, &SUPERSCRIPTS)),
                Style::Latex => format!("{variable}^{{{}}}", 2 * half),
            });
        }
    }
    match style {
        Style::Text => format!("I[{}]", parts.join("")),
        Style::Latex => format!("I [ {} ]", parts.join(" ")),
    }
}

/// `a₁`, `ζ₂`, ... and the power `ζ₂⁴`.
fn var(glyph: &str, i: usize, style: Style) -> String {
    match style {
        Style::Text => format!("{glyph}{}", digits(i as u32 + 1, &SUBSCRIPTS)),
        Style::Latex => format!("{}_{}", latex_glyph(glyph), i + 1),
    }
}

fn power(glyph: &str, i: usize, exponent: i32, style: Style) -> String {
    match style {
        Style::Text => format!(
            "{}{}",
            var(glyph, i, style),
            digits(exponent as u32, &SUPERSCRIPTS)
        ),
        Style::Latex => format!("{}^{{{exponent}}}", var(glyph, i, style)),
    }
}

/// Symbolic form of one class's contribution to a moment row, or `None` when
/// the class cannot produce the monomial.
fn term_text(class: ClassType, i: usize, j: [u32; 3], style: Style) -> Option<String> {
    let nonzero = j.iter().filter(|&&v| v > 0).count();
    let (ja, jb, jc) = (2 * j[0] as i32, 2 * j[1] as i32, 2 * j[2] as i32);
    let weight = var(&class.weight_symbol().to_string(), i, style);
    let glyph = class.param_glyphs();
    let p = |g: usize, e: i32| power(glyph[g], i, e, style);
    let body = match (nonzero, class) {
        (0, c) => return Some(format!("{} {weight}", c.orbit_size())),
        (1, ClassType::One) => format!("2 {weight} {}", p(0, ja)),
        (1, ClassType::Two) => format!("8 {weight} {}", p(0, ja)),
        (1, ClassType::OneOne) => format!("8 {weight} ({} + {})", p(0, ja), p(1, ja)),
        (1, ClassType::Three) => format!("8 {weight} {}", p(0, ja)),
        (1, ClassType::TwoOne) => format!("8 {weight} (2 {} + {})", p(0, ja), p(1, ja)),
        (1, ClassType::OneOneOne) => {
            format!("16 {weight} ({} + {} + {})", p(0, ja), p(1, ja), p(2, ja))
        }
        (2, ClassType::Two) => format!("4 {weight} {}", p(0, ja + jb)),
        (2, ClassType::OneOne) => format!(
            "4 {weight} ({} {} + {} {})",
            p(0, ja),
            p(1, jb),
            p(0, jb),
            p(1, ja)
        ),
        (2, ClassType::Three) => format!("8 {weight} {}", p(0, ja + jb)),
        (2, ClassType::TwoOne) => format!(
            "8 {weight} ({} + {} {} + {} {})",
            p(0, ja + jb),
            p(0, ja),
            p(1, jb),
            p(0, jb),
            p(1, ja)
        ),
        (2, ClassType::OneOneOne) => format!(
            "8 {weight} ({} {} + {} {} + {} {} + {} {} + {} {} + {} {})",
            p(0, ja),
            p(1, jb),
            p(0, jb),
            p(1, ja),
            p(0, ja),
            p(2, jb),
            p(0, jb),
            p(2, ja),
            p(1, ja),
            p(2, jb),
            p(1, jb),
            p(2, ja)
        ),
        (3, ClassType::Three) => format!("8 {weight} {}", p(0, ja + jb + jc)),
        (3, ClassType::TwoOne) => format!(
            "8 {weight} ({} {} + {} {} + {} {})",
            p(0, ja + jb),
            p(1, jc),
            p(0, ja + jc),
            p(1, jb),
            p(0, jb + jc),
            p(1, ja)
        ),
        (3, ClassType::OneOneOne) => {
            let perms = [
                (ja, jb, jc),
                (ja, jc, jb),
                (jb, ja, jc),
                (jb, jc, ja),
                (jc, ja, jb),
                (jc, jb, ja),
            ];
            let terms: Vec<String> = perms
                .iter()
                .map(|&(ea, eb, ec)| format!("{} {} {}", p(0, ea), p(1, eb), p(2, ec)))
                .collect();
            format!("8 {weight} ({})", terms.join(" + "))
        }
        _ => return None,
    };
    Some(body)
}

fn equation_lines(system: &StarSystem, style: Style) -> Vec<String> {
    let mut lines = Vec::new();
    for equation in &system.equations {
        match equation {
            Equation::Moment { j, .. } => {
                let mut terms = Vec::new();
                for class in SURFACE_CLASSES {
                    for i in 0..system.structure.count(class) as usize {
                        if let Some(term) = term_text(class, i, *j, style) {
                            terms.push(term);
                        }
                    }
                }
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" + ")
                };
                lines.push((monomial_label(*j, style), rhs));
            }
            Equation::Pin {
                class, generator, ..
            } => {
                let value = match (class, style) {
                    (ClassType::One, _) => "1",
                    (ClassType::Two, Style::Text) => "1/√2",
                    (ClassType::Two, Style::Latex) => "1/\\sqrt{2}",
                    (_, Style::Text) => "1/√3",
                    (_, Style::Latex) => "1/\\sqrt{3}",
                };
                lines.push((
                    value.to_string(),
                    var(class.param_glyphs()[0], *generator, style),
                ));
            }
            Equation::UnitNorm { class, generator } => {
                let glyph = class.param_glyphs();
                let expr = match class {
                    ClassType::OneOne => format!(
                        "{} + {}",
                        power(glyph[0], *generator, 2, style),
                        power(glyph[1], *generator, 2, style)
                    ),
                    ClassType::TwoOne => format!(
                        "2 {} + {}",
                        power(glyph[0], *generator, 2, style),
                        power(glyph[1], *generator, 2, style)
                    ),
                    _ => format!(
                        "{} + {} + {}",
                        power(glyph[0], *generator, 2, style),
                        power(glyph[1], *generator, 2, style),
                        power(glyph[2], *generator, 2, style)
                    ),
                };
                lines.push(("1".to_string(), expr));
            }
        }
    }
    match style {
        Style::Text => lines
            .into_iter()
            .map(|(lhs, rhs)| format!("{lhs} = {rhs}"))
            .collect(),
        Style::Latex => lines
            .into_iter()
            .map(|(lhs, rhs)| format!("  {lhs} & = & {rhs}"))
            .collect(),
    }
}

/// Human-readable listing of the system, one equation per line, subsystems
/// in order, constraints last, with a closing count line.
pub fn render_star(system: &StarSystem) -> String {
    let mut lines = equation_lines(system, Style::Text);
    lines.push(format!(
        "There are a total of {} equations.",
        system.equations.len()
    ));
    lines.join("\n")
}

/// The same listing as a LaTeX `eqnarray*` display.
pub fn render_star_latex(system: &StarSystem) -> String {
    format!(
        "\\begin{{eqnarray*}}\n{}\n\\end{{eqnarray*}}\n\nThere are a total of {} equations.\n",
        equation_lines(system, Style::Latex).join(" \\\\\n"),
        system.equations.len()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inf_norm;
    use crate::rule::builtin;

    fn system(m: u32, k: [u32; 6]) -> StarSystem {
        assemble(m, RuleStructure::u3(k)).unwrap()
    }

    #[test]
    fn assembled_row_counts() {
        assert_eq!(system(4, [1, 0, 1, 1, 0, 0]).equation_count(), 14);
        let s = system(1, [1, 0, 0, 0, 0, 0]);
        assert_eq!(s.moment_row_count(), 2);
        assert_eq!(s.equation_count(), 3);
        let s = system(2, [1, 0, 0, 1, 0, 0]);
        assert_eq!(s.moment_row_count(), 4);
        assert_eq!(s.equation_count(), 6);
    }

    #[test]
    fn moment_row_count_is_structure_independent() {
        for m in 1..=6 {
            let expected = equation_count(m);
            for k in [
                [1, 0, 0, 0, 0, 0],
                [1, 1, 1, 1, 1, 0],
                [0, 0, 2, 1, 3, 1],
                [1, 0, 1, 1, 3, 0],
            ] {
                assert_eq!(system(m, k).moment_row_count() as u64, expected);
            }
        }
    }

    #[test]
    fn residual_vanishes_at_reference_rules() {
        // degree 3: x = (2pi/3, 1)
        let s = system(1, [1, 0, 0, 0, 0, 0]);
        let r = s.residual(&[2.0 * PI / 3.0, 1.0]).unwrap();
        assert!(inf_norm(&r) < 1e-14);

        // degree 5: x = (4pi/15, 1, 3pi/10, 1/sqrt 3)
        let s = system(2, [1, 0, 0, 1, 0, 0]);
        let x = [4.0 * PI / 15.0, 1.0, 3.0 * PI / 10.0, 1.0 / 3f64.sqrt()];
        let r = s.residual(&x).unwrap();
        assert!(inf_norm(&r) <= 1e-15 * 4.0 * PI);
    }

    #[test]
    fn residual_at_zero_is_minus_the_moments() {
        let s = system(2, [1, 0, 0, 1, 0, 0]);
        let r = s.residual(&vec![0.0; s.var_count()]).unwrap();
        assert!((r[0] + 4.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let s = system(1, [1, 0, 0, 0, 0, 0]);
        assert!(matches!(
            s.residual(&[1.0]),
            Err(StarError::LengthMismatch { expected: 2, got: 1 })
        ));
        assert!(s.jacobian(&[1.0]).is_err());
    }

    #[test]
    fn invalid_structures_rejected() {
        assert!(assemble(3, RuleStructure::u3([2, 0, 0, 0, 0, 0])).is_err());
        assert!(assemble(3, RuleStructure::new([1, 1, 0, 0, 0, 0, 0])).is_err());
    }

    #[test]
    fn jacobian_reference_entries() {
        let s = system(2, [1, 0, 0, 1, 0, 0]);
        let x = [1.0, 1.0, 1.0, 1.0];
        let jac = s.jacobian(&x).unwrap();
        // area row, weight column: the orbit size
        assert_eq!(jac.get(0, s.weight_index(ClassType::One, 0)), 6.0);
        // I[x^2] row, alpha column: d(2 a alpha^2) = 4 at a = alpha = 1
        assert_eq!(jac.get(1, s.param_index(ClassType::One, 0, 0)), 4.0);

        let s = system(3, [0, 0, 0, 0, 1, 0]);
        let eta = 3.0 / 11f64.sqrt();
        let x = [0.5, 1.0 / 11f64.sqrt(), eta];
        let jac = s.jacobian(&x).unwrap();
        let unit_norm_row = s.equation_count() - 1;
        let col = s.param_index(ClassType::TwoOne, 0, 1);
        assert!((jac.get(unit_norm_row, col) - 6.0 / 11f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = system(4, [1, 0, 1, 1, 1, 1]);
        for _ in 0..5 {
            let x: Vec<f64> = (0..s.var_count()).map(|_| rng.gen::<f64>()).collect();
            let jac = s.jacobian(&x).unwrap();
            let h = 1e-6;
            for col in 0..s.var_count() {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[col] += h;
                minus[col] -= h;
                let rp = s.residual(&plus).unwrap();
                let rm = s.residual(&minus).unwrap();
                for row in 0..s.equation_count() {
                    let fd = (rp[row] - rm[row]) / (2.0 * h);
                    assert!(
                        (jac.get(row, col) - fd).abs() <= 1e-5,
                        "row {row} col {col}: {} vs {fd}",
                        jac.get(row, col)
                    );
                }
            }
        }
    }

    #[test]
    fn solve_recovers_the_degree3_rule() {
        let s = system(1, [1, 0, 0, 0, 0, 0]);
        let config = SolveConfig {
            restarts: 3,
            ..SolveConfig::default()
        };
        let outcome = solve(&s, &config);
        assert!(outcome.converged);
        assert!((outcome.best_x[0] - 2.0 * PI / 3.0).abs() < 1e-10);
        assert!((outcome.best_x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn solve_is_deterministic() {
        let s = system(2, [1, 0, 0, 1, 0, 0]);
        let config = SolveConfig {
            restarts: 5,
            ..SolveConfig::default()
        };
        let a = solve(&s, &config);
        let b = solve(&s, &config);
        assert_eq!(a.best_x, b.best_x);
        assert_eq!(a.best_residual_norm, b.best_residual_norm);
        assert_eq!(a.restart_index, b.restart_index);
    }

    #[test]
    fn classify_flags_the_negative_weight() {
        let report = classify(&builtin("m6fsm").unwrap(), 1e-10);
        assert!(!report.good());
        let (name, value) = report.offending_weight.unwrap();
        assert_eq!(name, "d1");
        assert!(value < 0.0);

        let report = classify(&builtin("m6").unwrap(), 1e-10);
        assert!(report.good());
        let report = classify(&builtin("m5").unwrap(), 1e-10);
        assert!(report.good());
    }

    #[test]
    fn render_matches_reference_listing() {
        let s = system(4, [1, 0, 1, 1, 0, 0]);
        let text = render_star(&s);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 15); // 14 equations + count line
        assert_eq!(lines[0], "I[1] = 6 a₁ + 24 c₁ + 8 d₁");
        assert!(text.contains("I[x²y²z⁴] = 8 d₁ ε₁⁸"));
        assert!(text.contains("1 = γ₁² + δ₁²"));
        assert_eq!(*lines.last().unwrap(), "There are a total of 14 equations.");

        let s = system(2, [1, 0, 0, 1, 0, 0]);
        assert!(render_star(&s).contains("I[x²y²] = 8 d₁ ε₁⁴"));

        let s = system(1, [1, 0, 0, 0, 0, 0]);
        assert_eq!(render_star(&s).lines().count(), 4);
    }

    #[test]
    fn latex_rendering_mentions_every_equation() {
        let s = system(4, [1, 0, 1, 1, 0, 0]);
        let latex = render_star_latex(&s);
        assert!(latex.contains("\\begin{eqnarray*}"));
        assert!(latex.contains("8 d_1 \\epsilon_1^{8}"));
        assert!(latex.contains("I [ x^{2} y^{2} z^{4} ]"));
        assert!(latex.contains("There are a total of 14 equations."));
    }
}
