//! Vertex-enumeration oracle for tiny linear programs.
//!
//! Independent of the simplex and the flow solver: every vertex of a bounded
//! polyhedron is the unique solution of the equality rows plus some set of
//! tight bounds and tight inequality rows, so trying all such systems and
//! keeping the best feasible solution gives the exact optimum.

use num_traits::Zero;

use super::lp::{LinearProgram, LpStatus, Optimum, Relation};
use super::SolverError;
use crate::rational::Rational;

pub const ORACLE_MAX_VARS: usize = 6;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Lower,
    Upper,
    Free,
}

/// Row-reduces `matrix` (augmented with `rhs`) and returns the rank of the
/// coefficient part, or `None` if the system is inconsistent.
fn reduce(matrix: &mut [Vec<Rational>], rhs: &mut [Rational]) -> Option<usize> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, pivot);
        rhs.swap(rank, pivot);
        let p = matrix[rank][col].clone();
        for v in matrix[rank].iter_mut() {
            *v = &*v / &p;
        }
        rhs[rank] = &rhs[rank] / &p;
        for r in 0..rows {
            if r == rank || matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone();
            let pivot_row = matrix[rank].clone();
            for (cell, p) in matrix[r].iter_mut().zip(&pivot_row) {
                *cell -= &factor * p;
            }
            let delta = &factor * &rhs[rank];
            rhs[r] -= delta;
        }
        rank += 1;
    }
    if rhs[rank..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(rank)
}

/// The unique solution of `matrix · v = rhs`, if there is exactly one.
fn solve_unique(mut matrix: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, cols: usize) -> Option<Vec<Rational>> {
    if cols == 0 {
        return rhs.iter().all(|v| v.is_zero()).then(Vec::new);
    }
    let rank = reduce(&mut matrix, &mut rhs)?;
    if rank < cols {
        return None;
    }
    // Reduced row echelon form with full column rank: row i holds variable i.
    Some(rhs[..cols].to_vec())
}

fn rank_of(matrix: &[Vec<Rational>]) -> usize {
    let mut copy = matrix.to_vec();
    let mut zeros = vec![Rational::zero(); copy.len()];
    reduce(&mut copy, &mut zeros).expect("homogeneous systems are consistent")
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if current.len() == k {
            visit(current);
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            go(i + 1, n, k, current, visit);
            current.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), &mut visit);
}

/// Exact optimum by enumerating basic solutions. At most
/// [`ORACLE_MAX_VARS`] variables.
pub fn lp_oracle_enumerate(lp: &LinearProgram) -> Result<LpStatus<Vec<Rational>>, SolverError> {
    let n = lp.var_count();
    if n > ORACLE_MAX_VARS {
        return Err(SolverError::TooLarge {
            size: n,
            cap: ORACLE_MAX_VARS,
        });
    }
    if lp.lower.iter().zip(&lp.upper).any(|(l, u)| l > u) {
        return Ok(LpStatus::Infeasible);
    }

    let equalities: Vec<usize> = (0..lp.rows.len())
        .filter(|&i| lp.rows[i].relation == Relation::Eq)
        .collect();
    let inequalities: Vec<usize> = (0..lp.rows.len())
        .filter(|&i| lp.rows[i].relation != Relation::Eq)
        .collect();

    let mut best: Option<Optimum<Vec<Rational>>> = None;
    let mut statuses = vec![Status::Lower; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for s in statuses.iter_mut() {
            *s = match c % 3 {
                0 => Status::Lower,
                1 => Status::Upper,
                _ => Status::Free,
            };
            c /= 3;
        }
        if (0..n).any(|j| statuses[j] == Status::Upper && lp.lower[j] == lp.upper[j]) {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|&j| statuses[j] == Status::Free).collect();
        let mut fixed = vec![Rational::zero(); n];
        for j in 0..n {
            fixed[j] = match statuses[j] {
                Status::Lower => lp.lower[j].clone(),
                Status::Upper => lp.upper[j].clone(),
                Status::Free => Rational::zero(),
            };
        }
        // Restrict a row to the free columns and move fixed terms to the right.
        let restrict = |row: usize| -> (Vec<Rational>, Rational) {
            let r = &lp.rows[row];
            let coeffs: Vec<Rational> = free.iter().map(|&j| r.coefficients[j].clone()).collect();
            let shift: Rational = (0..n)
                .filter(|&j| statuses[j] != Status::Free)
                .map(|j| &r.coefficients[j] * &fixed[j])
                .sum();
            (coeffs, &r.rhs - shift)
        };
        let eq_rows: Vec<(Vec<Rational>, Rational)> = equalities.iter().map(|&i| restrict(i)).collect();
        let eq_matrix: Vec<Vec<Rational>> = eq_rows.iter().map(|(c, _)| c.clone()).collect();
        let eq_rank = if free.is_empty() { 0 } else { rank_of(&eq_matrix) };
        let needed = free.len() - eq_rank;
        if needed > inequalities.len() {
            continue;
        }
        combinations(inequalities.len(), needed, |chosen| {
            let mut matrix = eq_matrix.clone();
            let mut rhs: Vec<Rational> = eq_rows.iter().map(|(_, b)| b.clone()).collect();
            for &k in chosen {
                let (c, b) = restrict(inequalities[k]);
                matrix.push(c);
                rhs.push(b);
            }
            let Some(solution) = solve_unique(matrix, rhs, free.len()) else {
                return;
            };
            let mut point = fixed.clone();
            for (&j, v) in free.iter().zip(solution) {
                point[j] = v;
            }
            if !lp.is_feasible(&point) {
                return;
            }
            let objective = lp.value(&point);
            if best.as_ref().is_none_or(|b| objective < b.objective) {
                best = Some(Optimum { point, objective });
            }
        });
    }
    Ok(match best {
        Some(opt) => LpStatus::Optimal(opt),
        None => LpStatus::Infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use num_traits::One;

    fn identity(n: usize) -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn parallel_arc_program() {
        let mut lp = LinearProgram::new(vec![int(0), int(1)], vec![int(0); 2], vec![int(2); 2]);
        lp.add_row(vec![int(1), int(1)], Relation::Eq, int(2));
        let opt = lp_oracle_enumerate(&lp).unwrap().into_optimum().unwrap();
        assert_eq!(opt.point, vec![int(2), int(0)]);
        assert_eq!(opt.objective, int(0));
    }

    #[test]
    fn empty_region() {
        let mut lp = LinearProgram::new(vec![int(1), int(1)], vec![int(0); 2], vec![int(1); 2]);
        lp.add_row(vec![int(1), int(1)], Relation::Ge, int(3));
        assert_eq!(lp_oracle_enumerate(&lp).unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn optimum_on_a_face_has_unique_value() {
        // min x + y on x + y >= 1: every point of the facet is optimal.
        let mut lp = LinearProgram::new(vec![int(1), int(1)], vec![int(0); 2], vec![int(1); 2]);
        lp.add_row(vec![int(1), int(1)], Relation::Ge, int(1));
        let opt = lp_oracle_enumerate(&lp).unwrap().into_optimum().unwrap();
        assert_eq!(opt.objective, int(1));
        let simplex = super::super::simplex::solve(&lp).unwrap();
        assert_eq!(simplex.objective(), Some(&int(1)));
    }

    #[test]
    fn fractional_vertex() {
        // max x + y (min -x - y) s.t. 2x + y <= 2, x + 3y <= 3.
        let mut lp = LinearProgram::new(vec![int(-1), int(-1)], vec![int(0); 2], vec![int(5); 2]);
        lp.add_row(vec![int(2), int(1)], Relation::Le, int(2));
        lp.add_row(vec![int(1), int(3)], Relation::Le, int(3));
        let opt = lp_oracle_enumerate(&lp).unwrap().into_optimum().unwrap();
        assert_eq!(opt.point, vec![ratio(3, 5), ratio(4, 5)]);
        assert_eq!(opt.objective, ratio(-7, 5));
    }

    #[test]
    fn caps_variable_count() {
        let lp = LinearProgram::new(vec![int(0); 7], vec![int(0); 7], vec![int(1); 7]);
        assert!(matches!(
            lp_oracle_enumerate(&lp),
            Err(SolverError::TooLarge { size: 7, cap: 6 })
        ));
    }

    #[test]
    fn unique_solve() {
        let solution = solve_unique(identity(2), vec![int(3), int(4)], 2).unwrap();
        assert_eq!(solution, vec![int(3), int(4)]);
        let singular = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(solve_unique(singular, vec![int(1), int(2)], 2).is_none());
    }
}
