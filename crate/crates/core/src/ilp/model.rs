use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// A bounded integer variable with its objective coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// `minimize Σ cost_j x_j` over integer `x` within bounds, subject to the constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: i64, upper: i64, cost: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            cost,
        });
        self.variables.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> usize {
        self.add_variable(name, 0, 1, cost)
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) {
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Checks that every term refers to a declared variable and bounds are ordered.
    pub fn validate(&self) -> Result<()> {
        for (j, v) in self.variables.iter().enumerate() {
            if v.lower > v.upper {
                return Err(Error::Model(format!("variable {j} ({}) has lower > upper", v.name)));
            }
            if !v.cost.is_finite() {
                return Err(Error::Model(format!("variable {j} ({}) has a non-finite cost", v.name)));
            }
        }
        for c in &self.constraints {
            if let Some(&(j, _)) = c.terms.iter().find(|&&(j, _)| j >= self.variables.len()) {
                return Err(Error::Model(format!(
                    "constraint {} references undeclared variable {j}",
                    c.name
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[i64]) -> f64 {
        self.variables.iter().zip(x).map(|(v, &xi)| v.cost * xi as f64).sum()
    }

    /// Exact integer check of bounds and constraints.
    pub fn is_feasible(&self, x: &[i64]) -> bool {
        if x.len() != self.variables.len() {
            return false;
        }
        let in_bounds = self
            .variables
            .iter()
            .zip(x)
            .all(|(v, &xi)| v.lower <= xi && xi <= v.upper);
        in_bounds
            && self.constraints.iter().all(|c| {
                let lhs: i64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
                c.sense.holds(lhs, c.rhs)
            })
    }

    /// True when every cost is an integer, so objective values of integer
    /// points are integral.
    pub(crate) fn has_integral_costs(&self) -> bool {
        self.variables.iter().all(|v| (v.cost - v.cost.round()).abs() < 1e-12)
    }
}
