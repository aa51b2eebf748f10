use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn is_satisfied(&self, point: &[Rational]) -> bool {
        let lhs = dot(&self.coefficients, point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// `min cᵀv  s.t.  rows,  lower <= v <= upper`. All bounds are finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>, lower: Vec<Rational>, upper: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), lower.len());
        assert_eq!(objective.len(), upper.len());
        LinearProgram {
            objective,
            lower,
            upper,
            rows: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coefficients.len(), self.var_count());
        self.rows.push(Row {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.var_count()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
            && self.rows.iter().all(|r| r.is_satisfied(point))
    }

    pub fn value(&self, point: &[Rational]) -> Rational {
        dot(&self.objective, point)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum<P> {
    pub point: P,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpStatus<P> {
    Optimal(Optimum<P>),
    Infeasible,
}

impl<P> LpStatus<P> {
    pub fn objective(&self) -> Option<&Rational> {
        match self {
            LpStatus::Optimal(opt) => Some(&opt.objective),
            LpStatus::Infeasible => None,
        }
    }

    pub fn into_optimum(self) -> Option<Optimum<P>> {
        match self {
            LpStatus::Optimal(opt) => Some(opt),
            LpStatus::Infeasible => None,
        }
    }
}
