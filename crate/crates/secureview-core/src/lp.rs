//! Exact rational LP/IP kernel and builders for the secure-view program
//! formulations.
//!
//! The solver is a dense two-phase simplex over arbitrary-precision
//! rationals with Bland's anti-cycling rule, plus depth-first branch and
//! bound for integer programs. Everything is deterministic: identical
//! programs yield identical solutions bit for bit.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::error::Error;
use crate::model::{Costs, Workflow};
use crate::rational::{rat_int, Rational};
use crate::solvers::{RequirementList, Requirements};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    /// `[0, 1]`
    ZeroOne,
    /// `[0, ∞)`
    Nonneg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl std::fmt::Display for Cmp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        })
    }
}

#[derive(Debug, Clone)]
struct VarDef {
    name: String,
    bound: VarBound,
    integral: bool,
    objective: Rational,
}

#[derive(Debug, Clone)]
struct Constraint {
    terms: Vec<(usize, Rational)>,
    cmp: Cmp,
    rhs: Rational,
}

/// A minimization program over named variables with bounds `[0,1]` or
/// `[0,∞)`, linear constraints, and per-variable integrality flags (used
/// only by [`solve_ip_exact`]).
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    vars: Vec<VarDef>,
    names: BTreeMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        LinearProgram::default()
    }

    /// Declares a variable. Names must be unique; the normative scheme is
    /// `x:<attr>`, `r:<mod>:<j>`, `y:<attr>:<mod>:<j>`, `z:<attr>:<mod>:<j>`,
    /// `w:<mod>`.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        bound: VarBound,
        integral: bool,
        objective: Rational,
    ) -> usize {
        let name = name.into();
        let idx = self.vars.len();
        assert!(
            self.names.insert(name.clone(), idx).is_none(),
            "duplicate variable `{name}`"
        );
        self.vars.push(VarDef {
            name,
            bound,
            integral,
            objective,
        });
        idx
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) {
        for &(v, _) in &terms {
            assert!(v < self.vars.len(), "constraint references unknown variable");
        }
        self.constraints.push(Constraint { terms, cmp, rhs });
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn var_name(&self, idx: usize) -> &str {
        &self.vars[idx].name
    }

    pub fn integral_vars(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vars.len()).filter(|&i| self.vars[i].integral)
    }

    pub fn objective_of(&self, values: &[Rational]) -> Rational {
        let mut z = Rational::zero();
        for (var, value) in self.vars.iter().zip(values) {
            if !var.objective.is_zero() {
                z += &var.objective * value;
            }
        }
        z
    }

    /// Human-readable LP-text export for external cross-checks.
    pub fn to_text(&self) -> String {
        let term = |terms: &[(usize, Rational)]| {
            if terms.is_empty() {
                return "0".to_string();
            }
            terms
                .iter()
                .map(|(v, c)| format!("{c} {}", self.vars[*v].name))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let mut out = String::from("minimize\n  ");
        let obj: Vec<(usize, Rational)> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.objective.is_zero())
            .map(|(i, v)| (i, v.objective.clone()))
            .collect();
        out.push_str(&term(&obj));
        out.push_str("\nsubject to\n");
        for (i, c) in self.constraints.iter().enumerate() {
            out.push_str(&format!("  c{i}: {} {} {}\n", term(&c.terms), c.cmp, c.rhs));
        }
        out.push_str("bounds\n");
        for v in &self.vars {
            let range = match v.bound {
                VarBound::ZeroOne => "[0,1]",
                VarBound::Nonneg => "[0,inf)",
            };
            let flag = if v.integral { " integer" } else { "" };
            out.push_str(&format!("  {} in {range}{flag}\n", v.name));
        }
        out
    }

    fn with_bound_cut(&self, var: usize, cmp: Cmp, value: Rational) -> LinearProgram {
        let mut next = self.clone();
        next.add_constraint(vec![(var, rat_int(1))], cmp, value);
        next
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Exact solution: on `Optimal`, `values` satisfies every constraint with
/// zero violation and `objective` is the exact optimum.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<Rational>,
    pub objective: Rational,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            status,
            values: Vec::new(),
            objective: Rational::zero(),
        }
    }

    pub fn value(&self, program: &LinearProgram, name: &str) -> Option<&Rational> {
        program.var(name).and_then(|i| self.values.get(i))
    }
}

/// Solves the LP relaxation (integrality flags ignored) by two-phase
/// dense simplex with Bland's rule over exact rationals.
pub fn solve_lp(program: &LinearProgram) -> LpSolution {
    Tableau::build(program).solve(program)
}

struct Tableau {
    /// `rows x (n_cols + 1)`; last column is the rhs.
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n_cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(program: &LinearProgram) -> Tableau {
        // Collect rows: declared constraints plus an upper-bound row per
        // [0,1] variable. Normalize to nonnegative rhs.
        let n = program.n_vars();
        let mut rows: Vec<(Vec<(usize, Rational)>, Cmp, Rational)> = Vec::new();
        for c in &program.constraints {
            rows.push((c.terms.clone(), c.cmp, c.rhs.clone()));
        }
        for (i, v) in program.vars.iter().enumerate() {
            if v.bound == VarBound::ZeroOne {
                rows.push((vec![(i, rat_int(1))], Cmp::Le, rat_int(1)));
            }
        }
        for row in &mut rows {
            if row.2.is_negative() {
                for term in &mut row.0 {
                    term.1 = -term.1.clone();
                }
                row.2 = -row.2.clone();
                row.1 = match row.1 {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
            }
        }
        let n_slack = rows
            .iter()
            .filter(|r| matches!(r.1, Cmp::Le | Cmp::Ge))
            .count();
        let n_art = rows
            .iter()
            .filter(|r| matches!(r.1, Cmp::Ge | Cmp::Eq))
            .count();
        let n_cols = n + n_slack + n_art;
        let mut a = vec![vec![Rational::zero(); n_cols + 1]; rows.len()];
        let mut basis = vec![0usize; rows.len()];
        let mut next_slack = n;
        let mut next_art = n + n_slack;
        for (i, (terms, cmp, rhs)) in rows.iter().enumerate() {
            for (v, coeff) in terms {
                a[i][*v] += coeff;
            }
            a[i][n_cols] = rhs.clone();
            match cmp {
                Cmp::Le => {
                    a[i][next_slack] = rat_int(1);
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Cmp::Ge => {
                    a[i][next_slack] = rat_int(-1);
                    next_slack += 1;
                    a[i][next_art] = rat_int(1);
                    basis[i] = next_art;
                    next_art += 1;
                }
                Cmp::Eq => {
                    a[i][next_art] = rat_int(1);
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Tableau {
            a,
            basis,
            n_cols,
            first_artificial: n + n_slack,
        }
    }

    fn pivot(&mut self, prow: usize, pcol: usize, cost: &mut [Rational]) {
        let pivot = self.a[prow][pcol].clone();
        debug_assert!(!pivot.is_zero());
        if !pivot.is_one() {
            for c in 0..=self.n_cols {
                if !self.a[prow][c].is_zero() {
                    self.a[prow][c] /= &pivot;
                }
            }
        }
        let nonzero_cols: Vec<usize> = (0..=self.n_cols)
            .filter(|&c| !self.a[prow][c].is_zero())
            .collect();
        for r in 0..self.a.len() {
            if r == prow || self.a[r][pcol].is_zero() {
                continue;
            }
            let factor = self.a[r][pcol].clone();
            for &c in &nonzero_cols {
                let delta = &factor * &self.a[prow][c];
                self.a[r][c] -= delta;
            }
        }
        if !cost[pcol].is_zero() {
            let factor = cost[pcol].clone();
            for &c in &nonzero_cols {
                if c < self.n_cols {
                    let delta = &factor * &self.a[prow][c];
                    cost[c] -= delta;
                }
            }
            cost[pcol] = Rational::zero();
        }
        self.basis[prow] = pcol;
    }

    /// Bland's rule: entering variable is the lowest-index column with a
    /// negative reduced cost; leaving row is the minimum-ratio row, ties
    /// broken by lowest basis variable index. Returns false on
    /// unboundedness.
    fn run(&mut self, cost: &mut [Rational], allow_artificial: bool) -> bool {
        loop {
            let limit = if allow_artificial {
                self.n_cols
            } else {
                self.first_artificial
            };
            let Some(pcol) = (0..limit).find(|&c| cost[c].is_negative()) else {
                return true;
            };
            let mut prow: Option<usize> = None;
            let mut best_ratio: Option<Rational> = None;
            for r in 0..self.a.len() {
                if self.a[r][pcol].is_positive() {
                    let ratio = &self.a[r][self.n_cols] / &self.a[r][pcol];
                    let better = match &best_ratio {
                        None => true,
                        Some(best) => {
                            ratio < *best
                                || (ratio == *best
                                    && self.basis[r] < self.basis[prow.unwrap()])
                        }
                    };
                    if better {
                        best_ratio = Some(ratio);
                        prow = Some(r);
                    }
                }
            }
            match prow {
                Some(r) => self.pivot(r, pcol, cost),
                None => return false,
            }
        }
    }

    /// Reduced-cost row for the given objective, canonicalized against the
    /// current basis.
    fn canonical_cost(&self, objective: impl Fn(usize) -> Rational) -> Vec<Rational> {
        let mut cost: Vec<Rational> = (0..self.n_cols).map(&objective).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                let factor = cost[b].clone();
                for c in 0..self.n_cols {
                    if !self.a[r][c].is_zero() {
                        let delta = &factor * &self.a[r][c];
                        cost[c] -= delta;
                    }
                }
                cost[b] = Rational::zero();
            }
        }
        cost
    }

    fn solve(mut self, program: &LinearProgram) -> LpSolution {
        // Phase 1: drive the artificials to zero.
        if self.first_artificial < self.n_cols {
            let first_art = self.first_artificial;
            let mut cost =
                self.canonical_cost(|c| if c >= first_art { rat_int(1) } else { Rational::zero() });
            let bounded = self.run(&mut cost, true);
            debug_assert!(bounded, "phase 1 objective is bounded below by zero");
            let infeasibility: Rational = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= first_art)
                .map(|(r, _)| self.a[r][self.n_cols].clone())
                .sum();
            if !infeasibility.is_zero() {
                return LpSolution::non_optimal(LpStatus::Infeasible);
            }
            // Pivot surviving artificials out of the basis where possible;
            // rows with no structural support are redundant and stay inert.
            for r in 0..self.a.len() {
                if self.basis[r] >= first_art {
                    if let Some(c) = (0..first_art).find(|&c| !self.a[r][c].is_zero()) {
                        let mut dummy = vec![Rational::zero(); self.n_cols];
                        self.pivot(r, c, &mut dummy);
                    }
                }
            }
        }

        // Phase 2: the real objective.
        let mut cost = self.canonical_cost(|c| {
            if c < program.n_vars() {
                program.vars[c].objective.clone()
            } else {
                Rational::zero()
            }
        });
        if !self.run(&mut cost, false) {
            return LpSolution::non_optimal(LpStatus::Unbounded);
        }

        let mut values = vec![Rational::zero(); program.n_vars()];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < program.n_vars() {
                values[b] = self.a[r][self.n_cols].clone();
            }
        }
        let objective = program.objective_of(&values);
        LpSolution {
            status: LpStatus::Optimal,
            values,
            objective,
        }
    }
}

/// Optimal integral solution by depth-first branch and bound on the LP
/// relaxation: branch on the lowest-index fractional flagged variable,
/// down-branch first, prune on rational bound comparison against the
/// incumbent. Errors when the node budget is exhausted.
pub fn solve_ip_exact(program: &LinearProgram, budget: &Budget) -> Result<LpSolution> {
    let mut nodes: u64 = 0;
    let mut incumbent: Option<LpSolution> = None;
    let mut stack: Vec<LinearProgram> = vec![program.clone()];
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > budget.max_ip_nodes {
            return Err(Error::BudgetExceeded(format!(
                "branch and bound exceeded {} nodes",
                budget.max_ip_nodes
            )));
        }
        let relaxed = solve_lp(&node);
        match relaxed.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                // Can only happen at the root: children are restrictions.
                return Ok(LpSolution::non_optimal(LpStatus::Unbounded));
            }
            LpStatus::Optimal => {}
        }
        if let Some(best) = &incumbent {
            if relaxed.objective >= best.objective {
                continue;
            }
        }
        let fractional = program
            .integral_vars()
            .find(|&v| !relaxed.values[v].is_integer());
        match fractional {
            None => incumbent = Some(relaxed),
            Some(v) => {
                let floor: BigInt = relaxed.values[v].floor().to_integer();
                let down = Rational::from(floor.clone());
                let up = Rational::from(floor + BigInt::one());
                // Pushed up-branch first so the down-branch pops first.
                stack.push(node.with_bound_cut(v, Cmp::Ge, up));
                stack.push(node.with_bound_cut(v, Cmp::Le, down));
            }
        }
    }
    Ok(incumbent.unwrap_or_else(|| LpSolution::non_optimal(LpStatus::Infeasible)))
}

fn attr_cost(costs: &Costs, name: &str) -> Rational {
    costs.attribute[name].clone()
}

/// Cardinality-constraint IP: variables `x_b`, `r_ij`, `y_bij`, `z_bij`,
/// all binary.
///
/// ```text
/// min Σ_b c_b x_b   s.t.
///   Σ_j r_ij              >= 1            ∀i
///   Σ_{b∈I_i} y_bij       >= r_ij α_i^j   ∀i,j
///   Σ_{b∈O_i} z_bij       >= r_ij β_i^j   ∀i,j
///   Σ_j y_bij             <= x_b          ∀i, b∈I_i
///   Σ_j z_bij             <= x_b          ∀i, b∈O_i
///   y_bij                 <= r_ij         ∀i,j,b∈I_i
///   z_bij                 <= r_ij         ∀i,j,b∈O_i
/// ```
pub fn build_cardinality_ip(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
) -> Result<LinearProgram> {
    requirements.validate(workflow)?;
    costs.check_coverage(workflow)?;
    let mut p = LinearProgram::new();
    let x: Vec<usize> = workflow
        .attributes()
        .iter()
        .map(|a| {
            p.add_var(
                format!("x:{}", a.name),
                VarBound::ZeroOne,
                true,
                attr_cost(costs, &a.name),
            )
        })
        .collect();

    for (m, module) in workflow.modules().iter().enumerate() {
        let Some(list) = requirements.modules.get(&module.name) else {
            continue;
        };
        let RequirementList::Cardinality(pairs) = list else {
            return Err(Error::Precondition(format!(
                "module `{}` carries set requirements; cardinality form expected",
                module.name
            )));
        };
        let r: Vec<usize> = (0..pairs.len())
            .map(|j| {
                p.add_var(
                    format!("r:{}:{j}", module.name),
                    VarBound::ZeroOne,
                    true,
                    Rational::zero(),
                )
            })
            .collect();
        p.add_constraint(
            r.iter().map(|&v| (v, rat_int(1))).collect(),
            Cmp::Ge,
            rat_int(1),
        );

        let mut y = BTreeMap::new();
        let mut z = BTreeMap::new();
        for (j, &(alpha, beta)) in pairs.iter().enumerate() {
            let mut y_terms = Vec::new();
            for &b in workflow.inputs_of(m) {
                let name = &workflow.attributes()[b].name;
                let v = p.add_var(
                    format!("y:{name}:{}:{j}", module.name),
                    VarBound::ZeroOne,
                    true,
                    Rational::zero(),
                );
                y.insert((b, j), v);
                y_terms.push((v, rat_int(1)));
                // y_bij <= r_ij
                p.add_constraint(
                    vec![(v, rat_int(1)), (r[j], rat_int(-1))],
                    Cmp::Le,
                    Rational::zero(),
                );
            }
            y_terms.push((r[j], rat_int(-(alpha as i64))));
            p.add_constraint(y_terms, Cmp::Ge, Rational::zero());

            let mut z_terms = Vec::new();
            for &b in workflow.outputs_of(m) {
                let name = &workflow.attributes()[b].name;
                let v = p.add_var(
                    format!("z:{name}:{}:{j}", module.name),
                    VarBound::ZeroOne,
                    true,
                    Rational::zero(),
                );
                z.insert((b, j), v);
                z_terms.push((v, rat_int(1)));
                p.add_constraint(
                    vec![(v, rat_int(1)), (r[j], rat_int(-1))],
                    Cmp::Le,
                    Rational::zero(),
                );
            }
            z_terms.push((r[j], rat_int(-(beta as i64))));
            p.add_constraint(z_terms, Cmp::Ge, Rational::zero());
        }
        // Σ_j y_bij <= x_b and Σ_j z_bij <= x_b
        for &b in workflow.inputs_of(m) {
            let mut terms: Vec<(usize, Rational)> = (0..pairs.len())
                .map(|j| (y[&(b, j)], rat_int(1)))
                .collect();
            terms.push((x[b], rat_int(-1)));
            p.add_constraint(terms, Cmp::Le, Rational::zero());
        }
        for &b in workflow.outputs_of(m) {
            let mut terms: Vec<(usize, Rational)> = (0..pairs.len())
                .map(|j| (z[&(b, j)], rat_int(1)))
                .collect();
            terms.push((x[b], rat_int(-1)));
            p.add_constraint(terms, Cmp::Le, Rational::zero());
        }
    }
    Ok(p)
}

/// Set-constraint IP: variables `x_b` and `r_ij` only.
///
/// ```text
/// min Σ_b c_b x_b   s.t.   Σ_j r_ij >= 1  ∀i;   x_b >= r_ij  ∀i,j, b ∈ Ī_i^j ∪ Ō_i^j
/// ```
pub fn build_set_ip(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
) -> Result<LinearProgram> {
    build_set_program(workflow, requirements, costs, false)
}

/// General-workflow set-constraint IP: [`build_set_ip`] plus one binary
/// `w_i` per public module with objective `pvt_i` and constraints
/// `w_i >= x_b` for every attribute `b` of that module.
pub fn build_general_set_ip(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
) -> Result<LinearProgram> {
    build_set_program(workflow, requirements, costs, true)
}

fn build_set_program(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    with_privatization: bool,
) -> Result<LinearProgram> {
    requirements.validate(workflow)?;
    costs.check_coverage(workflow)?;
    let mut p = LinearProgram::new();
    let x: Vec<usize> = workflow
        .attributes()
        .iter()
        .map(|a| {
            p.add_var(
                format!("x:{}", a.name),
                VarBound::ZeroOne,
                true,
                attr_cost(costs, &a.name),
            )
        })
        .collect();

    for module in workflow.modules() {
        let Some(list) = requirements.modules.get(&module.name) else {
            continue;
        };
        let RequirementList::Sets(options) = list else {
            return Err(Error::Precondition(format!(
                "module `{}` carries cardinality requirements; set form expected",
                module.name
            )));
        };
        let r: Vec<usize> = (0..options.len())
            .map(|j| {
                p.add_var(
                    format!("r:{}:{j}", module.name),
                    VarBound::ZeroOne,
                    true,
                    Rational::zero(),
                )
            })
            .collect();
        p.add_constraint(
            r.iter().map(|&v| (v, rat_int(1))).collect(),
            Cmp::Ge,
            rat_int(1),
        );
        for (j, (hide_in, hide_out)) in options.iter().enumerate() {
            for name in hide_in.iter().chain(hide_out) {
                let b = workflow.attr(name)?;
                // x_b >= r_ij
                p.add_constraint(
                    vec![(x[b], rat_int(1)), (r[j], rat_int(-1))],
                    Cmp::Ge,
                    Rational::zero(),
                );
            }
        }
    }

    if with_privatization {
        for (idx, module) in workflow.public_modules() {
            let w = p.add_var(
                format!("w:{}", module.name),
                VarBound::ZeroOne,
                true,
                costs.privatization[&module.name].clone(),
            );
            for &b in workflow
                .inputs_of(idx)
                .iter()
                .chain(workflow.outputs_of(idx))
            {
                // w_i >= x_b
                p.add_constraint(
                    vec![(w, rat_int(1)), (x[b], rat_int(-1))],
                    Cmp::Ge,
                    Rational::zero(),
                );
            }
        }
    }
    Ok(p)
}

/// Hidden attribute names in a 0/1 solution of any builder above.
pub fn hidden_attrs_of_solution(
    workflow: &Workflow,
    program: &LinearProgram,
    solution: &LpSolution,
) -> BTreeSet<String> {
    workflow
        .attributes()
        .iter()
        .filter(|a| {
            program
                .var(&format!("x:{}", a.name))
                .map(|v| solution.values[v].is_one())
                .unwrap_or(false)
        })
        .map(|a| a.name.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn minimize_single_bounded_var() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::Nonneg, false, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Ge, rat_int(1));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values[x], rat_int(1));
        assert_eq!(s.objective, rat_int(1));
    }

    #[test]
    fn infeasible_system_detected() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::Nonneg, false, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Ge, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Le, Rational::zero());
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::Nonneg, false, rat_int(-1));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Ge, rat_int(1));
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // min x+y s.t. x+2y >= 2, 2x+y >= 2 has optimum x = y = 2/3.
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::Nonneg, true, rat_int(1));
        let y = p.add_var("y", VarBound::Nonneg, true, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1)), (y, rat_int(2))], Cmp::Ge, rat_int(2));
        p.add_constraint(vec![(x, rat_int(2)), (y, rat_int(1))], Cmp::Ge, rat_int(2));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values[x], rat(2, 3));
        assert_eq!(s.values[y], rat(2, 3));
        assert_eq!(s.objective, rat(4, 3));
    }

    #[test]
    fn branch_and_bound_closes_the_gap() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::ZeroOne, true, rat_int(1));
        let y = p.add_var("y", VarBound::ZeroOne, true, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1)), (y, rat_int(2))], Cmp::Ge, rat_int(2));
        p.add_constraint(vec![(x, rat_int(2)), (y, rat_int(1))], Cmp::Ge, rat_int(2));
        let relaxed = solve_lp(&p);
        let integral = solve_ip_exact(&p, &Budget::default()).unwrap();
        assert_eq!(integral.status, LpStatus::Optimal);
        assert_eq!(integral.objective, rat_int(2));
        assert!(relaxed.objective < integral.objective);
        assert_eq!(integral.values[x], rat_int(1));
        assert_eq!(integral.values[y], rat_int(1));
    }

    #[test]
    fn ip_with_integral_relaxation_matches_lp() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::ZeroOne, true, rat_int(3));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Ge, rat_int(1));
        let lp = solve_lp(&p);
        let ip = solve_ip_exact(&p, &Budget::default()).unwrap();
        assert_eq!(lp.objective, ip.objective);
    }

    #[test]
    fn ip_infeasible_reported() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::ZeroOne, true, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Ge, rat(1, 2));
        p.add_constraint(vec![(x, rat_int(1))], Cmp::Le, rat(3, 4));
        // LP feasible, IP not: x must be 1/2..3/4, no integer fits.
        assert_eq!(solve_lp(&p).status, LpStatus::Optimal);
        let ip = solve_ip_exact(&p, &Budget::default()).unwrap();
        assert_eq!(ip.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_constraints_honored() {
        let mut p = LinearProgram::new();
        let x = p.add_var("x", VarBound::Nonneg, false, rat_int(2));
        let y = p.add_var("y", VarBound::Nonneg, false, rat_int(1));
        p.add_constraint(vec![(x, rat_int(1)), (y, rat_int(1))], Cmp::Eq, rat_int(3));
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.values[y], rat_int(3));
        assert_eq!(s.objective, rat_int(3));
    }

    #[test]
    fn determinism_bit_for_bit() {
        let mut p = LinearProgram::new();
        for i in 0..6 {
            p.add_var(format!("v{i}"), VarBound::ZeroOne, true, rat(i + 1, 2));
        }
        for i in 0..5usize {
            p.add_constraint(
                vec![(i, rat_int(1)), (i + 1, rat_int(1))],
                Cmp::Ge,
                rat_int(1),
            );
        }
        let a = solve_lp(&p);
        let b = solve_lp(&p);
        assert_eq!(a.values, b.values);
        let ia = solve_ip_exact(&p, &Budget::default()).unwrap();
        let ib = solve_ip_exact(&p, &Budget::default()).unwrap();
        assert_eq!(ia.values, ib.values);
        assert_eq!(ia.objective, ib.objective);
    }
}
