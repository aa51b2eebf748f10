//! Dense bounded-variable primal simplex over exact rationals.
//!
//! Nonbasic variables sit at one of their bounds. Entering and leaving
//! variables follow Bland's smallest-index rule, which rules out cycling.
//! A phase with artificial variables finds the first feasible basis.

use num_traits::{Signed, Zero};

use super::lp::{LinearProgram, LpStatus, Optimum, Relation};
use super::SolverError;
use crate::rational::Rational;

const ITERATION_LIMIT: usize = 200_000;

#[derive(Debug, Clone)]
struct Bound {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

struct Tableau {
    /// `rows[i]` is row `i` of `B⁻¹A` over all columns.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    values: Vec<Rational>,
    bounds: Vec<Bound>,
    iterations: usize,
}

enum Step {
    Optimal,
    Moved,
}

impl Tableau {
    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut reduced = costs.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if costs[b].is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= &costs[b] * a;
                }
            }
        }
        reduced
    }

    fn step(&mut self, costs: &[Rational]) -> Result<Step, SolverError> {
        self.iterations += 1;
        if self.iterations > ITERATION_LIMIT {
            return Err(SolverError::IterationLimit);
        }
        let reduced = self.reduced_costs(costs);
        let mut is_basic = vec![false; self.values.len()];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        // Bland: smallest improving index.
        let entering = (0..self.values.len()).find(|&j| {
            if is_basic[j] {
                return false;
            }
            let bound = &self.bounds[j];
            let can_increase = bound.upper.as_ref().is_none_or(|u| self.values[j] < *u);
            let can_decrease = bound.lower.as_ref().is_none_or(|l| self.values[j] > *l);
            (reduced[j].is_negative() && can_increase) || (reduced[j].is_positive() && can_decrease)
        });
        let Some(entering) = entering else {
            return Ok(Step::Optimal);
        };
        let increasing = reduced[entering].is_negative();

        // Ratio test. Candidates are (step length, variable index, row or None for a bound flip).
        let mut best: Option<(Rational, usize, Option<usize>)> = None;
        let mut consider = |theta: Rational, var: usize, row: Option<usize>| {
            let better = match &best {
                None => true,
                Some((t, v, _)) => theta < *t || (theta == *t && var < *v),
            };
            if better {
                best = Some((theta, var, row));
            }
        };
        let own = &self.bounds[entering];
        if let (Some(l), Some(u)) = (&own.lower, &own.upper) {
            consider(u - l, entering, None);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[entering];
            if a.is_zero() {
                continue;
            }
            // Basic variable i moves at `rate` per unit step.
            let rate = if increasing { -a } else { a.clone() };
            let b = self.basis[i];
            let bound = &self.bounds[b];
            if rate.is_negative() {
                if let Some(l) = &bound.lower {
                    consider((&self.values[b] - l) / -&rate, b, Some(i));
                }
            } else if let Some(u) = &bound.upper {
                consider((u - &self.values[b]) / &rate, b, Some(i));
            }
        }
        let Some((theta, _, pivot_row)) = best else {
            return Err(SolverError::Unbounded);
        };

        if increasing {
            self.values[entering] += &theta;
        } else {
            self.values[entering] -= &theta;
        }
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let a = &row[entering];
            if a.is_zero() {
                continue;
            }
            let delta = a * &theta;
            if increasing {
                self.values[b] -= delta;
            } else {
                self.values[b] += delta;
            }
        }
        if let Some(r) = pivot_row {
            self.pivot(r, entering);
        }
        Ok(Step::Moved)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let leaving = self.basis[r];
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[r] = col;
        // Snap the leaving variable exactly onto the bound it reached.
        let bound = &self.bounds[leaving];
        if let Some(l) = &bound.lower {
            if self.values[leaving] <= *l {
                self.values[leaving] = l.clone();
            }
        }
        if let Some(u) = &bound.upper {
            if self.values[leaving] >= *u {
                self.values[leaving] = u.clone();
            }
        }
    }

    fn run(&mut self, costs: &[Rational]) -> Result<(), SolverError> {
        while let Step::Moved = self.step(costs)? {}
        Ok(())
    }
}

/// Solves `lp` exactly. Returns `Infeasible` when no point satisfies all
/// constraints.
pub fn solve(lp: &LinearProgram) -> Result<LpStatus<Vec<Rational>>, SolverError> {
    let n = lp.var_count();
    let m = lp.rows.len();
    for (lo, hi) in lp.lower.iter().zip(&lp.upper) {
        if lo > hi {
            return Ok(LpStatus::Infeasible);
        }
    }

    let mut bounds: Vec<Bound> = lp
        .lower
        .iter()
        .zip(&lp.upper)
        .map(|(l, u)| Bound {
            lower: Some(l.clone()),
            upper: Some(u.clone()),
        })
        .collect();
    let mut values: Vec<Rational> = lp.lower.clone();

    // Slack s_i with a_i·v + s_i = b_i.
    for row in &lp.rows {
        bounds.push(match row.relation {
            Relation::Le => Bound {
                lower: Some(Rational::zero()),
                upper: None,
            },
            Relation::Ge => Bound {
                lower: None,
                upper: Some(Rational::zero()),
            },
            Relation::Eq => Bound {
                lower: Some(Rational::zero()),
                upper: Some(Rational::zero()),
            },
        });
    }

    let mut residuals = Vec::with_capacity(m);
    for row in &lp.rows {
        let lhs: Rational = row.coefficients.iter().zip(&values).map(|(a, v)| a * v).sum();
        residuals.push(&row.rhs - lhs);
    }
    let needs_artificial: Vec<bool> = residuals
        .iter()
        .zip(&bounds[n..])
        .map(|(r, b)| b.lower.as_ref().is_some_and(|l| r < l) || b.upper.as_ref().is_some_and(|u| r > u))
        .collect();
    let artificial_count = needs_artificial.iter().filter(|&&x| x).count();
    let total = n + m + artificial_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_artificial = n + m;
    for (i, row) in lp.rows.iter().enumerate() {
        let mut full = vec![Rational::zero(); total];
        for (j, a) in row.coefficients.iter().enumerate() {
            full[j] = a.clone();
        }
        full[n + i] = Rational::from_integer(1.into());
        if needs_artificial[i] {
            // Slack rests at zero (its only finite bound); the artificial absorbs the residual.
            values.push(Rational::zero());
            let residual = &residuals[i];
            let sign = if residual.is_negative() { -1 } else { 1 };
            full[next_artificial] = Rational::from_integer(sign.into());
            for v in full.iter_mut() {
                *v = &*v * Rational::from_integer(sign.into());
            }
            basis.push(next_artificial);
            next_artificial += 1;
        } else {
            values.push(residuals[i].clone());
            basis.push(n + i);
        }
        rows.push(full);
    }
    for (i, &flag) in needs_artificial.iter().enumerate() {
        if flag {
            bounds.push(Bound {
                lower: Some(Rational::zero()),
                upper: None,
            });
            values.push(residuals[i].abs());
        }
    }

    let mut tableau = Tableau {
        rows,
        basis,
        values,
        bounds,
        iterations: 0,
    };

    if artificial_count > 0 {
        let mut phase_one = vec![Rational::zero(); total];
        for c in phase_one.iter_mut().skip(n + m) {
            *c = Rational::from_integer(1.into());
        }
        tableau.run(&phase_one)?;
        let infeasibility: Rational = tableau.values[n + m..].iter().cloned().sum();
        if infeasibility.is_positive() {
            return Ok(LpStatus::Infeasible);
        }
        for bound in tableau.bounds.iter_mut().skip(n + m) {
            bound.upper = Some(Rational::zero());
        }
    }

    let mut costs = lp.objective.clone();
    costs.resize(total, Rational::zero());
    tableau.run(&costs)?;

    let point: Vec<Rational> = tableau.values[..n].to_vec();
    debug_assert!(lp.is_feasible(&point), "simplex produced an infeasible point");
    let objective = lp.value(&point);
    Ok(LpStatus::Optimal(Optimum { point, objective }))
}
