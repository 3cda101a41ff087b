//! In-memory MIP model: variables, linear rows and a minimization objective.
//!
//! Models are built incrementally through [`MipModel::add_variable`] and
//! [`MipModel::add_constraint`], which enforce the structural invariants
//! (bounds ordered, binaries in `[0, 1]`, rows referencing existing columns
//! with finite non-zero coefficients and no duplicates). After construction a
//! model is treated as immutable and is freely shared across threads.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance for row and bound feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-6;
/// Default tolerance for integrality of binary and integer columns.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Dense column index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

/// Dense row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RowId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl RowId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
    /// Objective coefficient (minimization).
    pub cost: f64,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.kind == VarKind::Binary
    }
}

/// Column description handed to [`MipModel::add_variable`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
    pub cost: f64,
}

impl VariableSpec {
    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Binary,
            lb: 0.0,
            ub: 1.0,
            cost: 0.0,
        }
    }

    pub fn integer(name: impl Into<String>, lb: f64, ub: f64) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Integer,
            lb,
            ub,
            cost: 0.0,
        }
    }

    pub fn continuous(name: impl Into<String>, lb: f64, ub: f64) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Continuous,
            lb,
            ub,
            cost: 0.0,
        }
    }

    pub fn with_cost(mut self, cost: f64) -> Self {
        self.cost = cost;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub id: RowId,
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `activity` violates the row (0 when satisfied).
    pub fn violation(&self, activity: f64) -> f64 {
        match self.sense {
            Sense::Le => (activity - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - activity).max(0.0),
            Sense::Eq => (activity - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable `{name}`: inconsistent bounds [{lb}, {ub}]")]
    InconsistentBounds { name: String, lb: f64, ub: f64 },
    #[error("binary variable `{name}` must have bounds [0, 1], got [{lb}, {ub}]")]
    BinaryBounds { name: String, lb: f64, ub: f64 },
    #[error("variable `{name}`: non-finite objective coefficient {cost}")]
    NonFiniteCost { name: String, cost: f64 },
    #[error("row `{row}` references unknown variable {var}")]
    UnknownVariable { row: String, var: usize },
    #[error("row `{row}` lists variable {var} more than once")]
    DuplicateTerm { row: String, var: usize },
    #[error("row `{row}`: coefficient {coef} for variable {var} must be finite and non-zero")]
    BadCoefficient { row: String, var: usize, coef: f64 },
    #[error("row `{row}`: right-hand side {rhs} is not finite")]
    BadRhs { row: String, rhs: f64 },
    #[error("dimension mismatch: model has {expected} variables, got {got} values")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A mixed-integer linear program in minimization form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MipModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    pub objective_constant: f64,
}

impl MipModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn constraint(&self, id: RowId) -> &LinearConstraint {
        &self.constraints[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }

    pub fn binary_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables.iter().filter(|v| v.is_binary()).map(|v| v.id)
    }

    pub fn costs(&self) -> Vec<f64> {
        self.variables.iter().map(|v| v.cost).collect()
    }

    pub fn add_variable(&mut self, spec: VariableSpec) -> Result<VarId, ModelError> {
        let VariableSpec {
            name,
            kind,
            lb,
            ub,
            cost,
        } = spec;
        if lb.is_nan() || ub.is_nan() || lb > ub || lb == f64::INFINITY || ub == f64::NEG_INFINITY
        {
            return Err(ModelError::InconsistentBounds { name, lb, ub });
        }
        if kind == VarKind::Binary && (lb != 0.0 || ub != 1.0) {
            return Err(ModelError::BinaryBounds { name, lb, ub });
        }
        if !cost.is_finite() {
            return Err(ModelError::NonFiniteCost { name, cost });
        }
        let id = VarId(self.variables.len());
        self.variables.push(Variable {
            id,
            name,
            kind,
            lb,
            ub,
            cost,
        });
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<RowId, ModelError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(ModelError::BadRhs { row: name, rhs });
        }
        let mut seen = vec![false; self.variables.len()];
        for &(var, coef) in &terms {
            if var.0 >= self.variables.len() {
                return Err(ModelError::UnknownVariable {
                    row: name,
                    var: var.0,
                });
            }
            if seen[var.0] {
                return Err(ModelError::DuplicateTerm {
                    row: name,
                    var: var.0,
                });
            }
            seen[var.0] = true;
            if !coef.is_finite() || coef == 0.0 {
                return Err(ModelError::BadCoefficient {
                    row: name,
                    var: var.0,
                    coef,
                });
            }
        }
        let id = RowId(self.constraints.len());
        self.constraints.push(LinearConstraint {
            id,
            name,
            terms,
            sense,
            rhs,
        });
        Ok(id)
    }

    /// Change a column's objective coefficient.
    pub fn set_cost(&mut self, var: VarId, cost: f64) {
        self.variables[var.0].cost = cost;
    }

    /// Tighten or relax the bounds of a column. Binaries keep their kind only
    /// when the new bounds stay inside `[0, 1]`.
    pub fn set_bounds(&mut self, var: VarId, lb: f64, ub: f64) -> Result<(), ModelError> {
        let v = &mut self.variables[var.0];
        if lb.is_nan() || ub.is_nan() || lb > ub {
            return Err(ModelError::InconsistentBounds {
                name: v.name.clone(),
                lb,
                ub,
            });
        }
        if v.kind == VarKind::Binary && (lb < 0.0 || ub > 1.0) {
            return Err(ModelError::BinaryBounds {
                name: v.name.clone(),
                lb,
                ub,
            });
        }
        v.lb = lb;
        v.ub = ub;
        Ok(())
    }

    pub fn objective_value(&self, values: &[f64]) -> Result<f64, ModelError> {
        self.check_dim(values)?;
        Ok(self.objective_unchecked(values))
    }

    pub(crate) fn objective_unchecked(&self, values: &[f64]) -> f64 {
        self.objective_constant
            + self
                .variables
                .iter()
                .zip(values)
                .map(|(v, x)| v.cost * x)
                .sum::<f64>()
    }

    /// Check bounds, integrality and every row at absolute tolerance `tol`.
    pub fn check_feasible(
        &self,
        values: &[f64],
        tol: f64,
    ) -> Result<FeasibilityReport, ModelError> {
        self.check_dim(values)?;
        let mut violations = Vec::new();
        for (v, &x) in self.variables.iter().zip(values) {
            if !x.is_finite() || x < v.lb - tol || x > v.ub + tol {
                violations.push(Violation::Bound {
                    var: v.id,
                    value: x,
                    lb: v.lb,
                    ub: v.ub,
                });
            }
            if v.kind.is_integral() && x.is_finite() && (x - x.round()).abs() > tol {
                violations.push(Violation::Integrality { var: v.id, value: x });
            }
        }
        for row in &self.constraints {
            let activity = row.activity(values);
            let amount = row.violation(activity);
            if amount > tol || activity.is_nan() {
                violations.push(Violation::Row {
                    row: row.id,
                    activity,
                    amount,
                });
            }
        }
        Ok(FeasibilityReport { violations })
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        self.check_feasible(values, tol)
            .map(|r| r.is_feasible())
            .unwrap_or(false)
    }

    fn check_dim(&self, values: &[f64]) -> Result<(), ModelError> {
        if values.len() != self.variables.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.variables.len(),
                got: values.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Bound {
        var: VarId,
        value: f64,
        lb: f64,
        ub: f64,
    },
    Integrality {
        var: VarId,
        value: f64,
    },
    /// `amount` is the absolute slack by which the row is violated.
    Row {
        row: RowId,
        activity: f64,
        amount: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn row_violations(&self) -> impl Iterator<Item = (RowId, f64)> + '_ {
        self.violations.iter().filter_map(|v| match *v {
            Violation::Row { row, amount, .. } => Some((row, amount)),
            _ => None,
        })
    }

    pub fn integrality_violations(&self) -> impl Iterator<Item = VarId> + '_ {
        self.violations.iter().filter_map(|v| match *v {
            Violation::Integrality { var, .. } => Some(var),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition() -> MipModel {
        let mut m = MipModel::new("p");
        let x = m.add_variable(VariableSpec::binary("x").with_cost(2.0)).unwrap();
        let y = m.add_variable(VariableSpec::binary("y").with_cost(3.0)).unwrap();
        m.add_constraint("c1", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 1.0)
            .unwrap();
        m
    }

    #[test]
    fn add_variable_assigns_dense_ids() {
        let mut m = MipModel::new("t");
        let id = m.add_variable(VariableSpec::binary("x1")).unwrap();
        assert_eq!(id, VarId(0));
        assert_eq!((m.variable(id).lb, m.variable(id).ub), (0.0, 1.0));
        let free = m
            .add_variable(VariableSpec::continuous("f", f64::NEG_INFINITY, f64::INFINITY))
            .unwrap();
        assert_eq!(free, VarId(1));
    }

    #[test]
    fn binary_with_bad_bounds_is_rejected() {
        let mut m = MipModel::new("t");
        let mut spec = VariableSpec::binary("b");
        spec.lb = 2.0;
        assert!(matches!(
            m.add_variable(spec),
            Err(ModelError::InconsistentBounds { .. }) | Err(ModelError::BinaryBounds { .. })
        ));
        let spec = VariableSpec {
            ub: 2.0,
            ..VariableSpec::binary("b")
        };
        assert!(matches!(
            m.add_variable(spec),
            Err(ModelError::BinaryBounds { .. })
        ));
        assert!(m
            .add_variable(VariableSpec::integer("i", 3.0, 1.0))
            .is_err());
    }

    #[test]
    fn constraint_validation() {
        let mut m = partition();
        let x = VarId(0);
        assert!(matches!(
            m.add_constraint("d", vec![(x, 1.0), (x, 2.0)], Sense::Le, 1.0),
            Err(ModelError::DuplicateTerm { .. })
        ));
        assert!(matches!(
            m.add_constraint("z", vec![(x, 0.0)], Sense::Le, 1.0),
            Err(ModelError::BadCoefficient { .. })
        ));
        assert!(matches!(
            m.add_constraint("u", vec![(VarId(9), 1.0)], Sense::Le, 1.0),
            Err(ModelError::UnknownVariable { .. })
        ));
    }

    #[test]
    fn check_feasible_examples() {
        let m = partition();
        assert!(m.check_feasible(&[1.0, 0.0], 1e-6).unwrap().is_feasible());

        let half = m.check_feasible(&[0.5, 0.5], 1e-6).unwrap();
        let frac: Vec<_> = half.integrality_violations().collect();
        assert_eq!(frac, vec![VarId(0), VarId(1)]);
        assert_eq!(half.row_violations().count(), 0);

        let both = m.check_feasible(&[1.0, 1.0], 1e-6).unwrap();
        let rows: Vec<_> = both.row_violations().collect();
        assert_eq!(rows, vec![(RowId(0), 1.0)]);

        assert!(matches!(
            m.check_feasible(&[1.0], 1e-6),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn objective_examples() {
        let m = partition();
        assert_eq!(m.objective_value(&[1.0, 0.0]).unwrap(), 2.0);

        let mut z = MipModel::new("z");
        z.add_variable(VariableSpec::binary("a")).unwrap();
        z.add_variable(VariableSpec::binary("b")).unwrap();
        z.objective_constant = 4.5;
        assert_eq!(z.objective_value(&[1.0, 1.0]).unwrap(), 4.5);
        assert!(z.objective_value(&[1.0]).is_err());
    }
}
