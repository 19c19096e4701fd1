//! Self-contained two-phase dense simplex for the tiny linear programs used
//! by the structure search (six variables, at most eight constraints).
//! Bland's rule keeps the pivoting cycle-free.

use thiserror::Error;

const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplexError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Minimize `objective . x` subject to the constraints and `x >= 0`.
/// Returns the optimal value and one optimal point.
pub fn minimize(
    objective: &[f64],
    constraints: &[Constraint],
) -> Result<(f64, Vec<f64>), SimplexError> {
    let n = objective.len();
    let m = constraints.len();

    // Normalize rows to nonnegative right-hand sides, then add one slack or
    // surplus column per row and artificials where the basis needs them.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(m);
    for c in constraints {
        assert_eq!(c.coefficients.len(), n);
        if c.rhs < 0.0 {
            let flipped = match c.relation {
                Relation::Ge => Relation::Le,
                Relation::Le => Relation::Ge,
            };
            rows.push((c.coefficients.iter().map(|v| -v).collect(), flipped, -c.rhs));
        } else {
            rows.push((c.coefficients.clone(), c.relation, c.rhs));
        }
    }

    let num_artificial = rows
        .iter()
        .filter(|(_, rel, _)| *rel == Relation::Ge)
        .count();
    let total = n + m + num_artificial;

    // tableau[i] = row i of [A | slack | artificial | b]
    let mut tableau = vec![vec![0.0; total + 1]; m];
    let mut basis = vec![0usize; m];
    let mut artificial_index = n + m;
    for (i, (coeffs, relation, rhs)) in rows.iter().enumerate() {
        tableau[i][..n].copy_from_slice(coeffs);
        tableau[i][total] = *rhs;
        match relation {
            Relation::Le => {
                tableau[i][n + i] = 1.0;
                basis[i] = n + i;
            }
            Relation::Ge => {
                tableau[i][n + i] = -1.0;
                tableau[i][artificial_index] = 1.0;
                basis[i] = artificial_index;
                artificial_index += 1;
            }
        }
    }

    // Phase 1: minimize the sum of artificials.
    if num_artificial > 0 {
        let mut cost = vec![0.0; total];
        for j in n + m..total {
            cost[j] = 1.0;
        }
        let value = run_simplex(&mut tableau, &mut basis, &cost)?;
        if value > EPS {
            return Err(SimplexError::Infeasible);
        }
        // pivot any artificial still in the basis out on a nonzero column
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| tableau[i][j].abs() > EPS) {
                    pivot(&mut tableau, &mut basis, i, j);
                }
            }
        }
        for row in tableau.iter_mut() {
            for j in n + m..total {
                row[j] = 0.0;
            }
        }
    }

    // Phase 2: the real objective.
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(objective);
    let value = run_simplex(&mut tableau, &mut basis, &cost)?;

    let mut x = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tableau[i][total];
        }
    }
    Ok((value, x))
}

/// Standard revised iteration on an explicit tableau with Bland's rule.
/// Returns the objective value at the optimum.
fn run_simplex(
    tableau: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
) -> Result<f64, SimplexError> {
    let m = tableau.len();
    let total = cost.len();
    loop {
        // reduced costs: c_j - c_B . B^-1 A_j
        let mut entering = None;
        for j in 0..total {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = cost[j];
            for i in 0..m {
                reduced -= cost[basis[i]] * tableau[i][j];
            }
            if reduced < -EPS {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else {
            let mut value = 0.0;
            for i in 0..m {
                value += cost[basis[i]] * tableau[i][total];
            }
            return Ok(value);
        };

        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            if tableau[i][j] > EPS {
                let ratio = tableau[i][total] / tableau[i][j];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - EPS || (ratio < lr + EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leaving else {
            return Err(SimplexError::Unbounded);
        };
        pivot(tableau, basis, i, j);
    }
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let m = tableau.len();
    let width = tableau[0].len();
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    for i in 0..m {
        if i != row {
            let factor = tableau[i][col];
            if factor != 0.0 {
                for j in 0..width {
                    tableau[i][j] -= factor * tableau[row][j];
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(coefficients: Vec<f64>, rhs: f64) -> Constraint {
        Constraint {
            coefficients,
            relation: Relation::Ge,
            rhs,
        }
    }

    fn le(coefficients: Vec<f64>, rhs: f64) -> Constraint {
        Constraint {
            coefficients,
            relation: Relation::Le,
            rhs,
        }
    }

    #[test]
    fn simple_bound() {
        // min x + y  s.t. x + y >= 2, x <= 1
        let (value, x) = minimize(
            &[1.0, 1.0],
            &[ge(vec![1.0, 1.0], 2.0), le(vec![1.0, 0.0], 1.0)],
        )
        .unwrap();
        assert!((value - 2.0).abs() < 1e-9);
        assert!((x[0] + x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_optimum() {
        // min 3x + 2y s.t. x + y >= 1, x - y >= -0.5: vertex (1/4, 3/4)
        let (value, x) = minimize(
            &[3.0, 2.0],
            &[ge(vec![1.0, 1.0], 1.0), ge(vec![1.0, -1.0], -0.5)],
        )
        .unwrap();
        assert!((value - 2.25).abs() < 1e-9);
        assert!((x[0] - 0.25).abs() < 1e-9 && (x[1] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let result = minimize(
            &[1.0],
            &[ge(vec![1.0], 2.0), le(vec![1.0], 1.0)],
        );
        assert_eq!(result, Err(SimplexError::Infeasible));
    }

    #[test]
    fn unbounded_detected() {
        // min -x with x >= 1 and no upper bound
        let result = minimize(&[-1.0], &[ge(vec![1.0], 1.0)]);
        assert_eq!(result, Err(SimplexError::Unbounded));
    }
}
