//! Secure-view solvers: requirement lists, solutions, and the
//! algorithms — exact IP baseline, randomized LP rounding for cardinality
//! requirements, threshold rounding for set requirements, the (γ+1)
//! greedy for bounded data sharing, the privatization variant for
//! workflows with public modules, and the union-of-standalone baseline.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::lp::{
    build_cardinality_ip, build_general_set_ip, build_set_ip, hidden_attrs_of_solution, solve_ip_exact,
    solve_lp, LpStatus,
};
use crate::model::{Costs, Workflow};
use crate::rational::{NumDen, Rational};
use crate::rng::SplitMix64;
use crate::standalone::SafeSubsetReport;
use crate::Result;

/// Safe hidden options for one module: either cardinality pairs
/// `(α, β)` — hide at least α inputs and β outputs — or explicit
/// attribute-set pairs `(Ī, Ō)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequirementList {
    /// Non-redundant, sorted by increasing α (hence decreasing β).
    Cardinality(Vec<(usize, usize)>),
    Sets(Vec<(BTreeSet<String>, BTreeSet<String>)>),
}

impl RequirementList {
    pub fn len(&self) -> usize {
        match self {
            RequirementList::Cardinality(l) => l.len(),
            RequirementList::Sets(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-module requirement lists. Modules absent from the map carry no
/// requirement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Requirements {
    pub modules: BTreeMap<String, RequirementList>,
}

impl Requirements {
    /// Length of the longest list.
    pub fn l_max(&self) -> usize {
        self.modules.values().map(RequirementList::len).max().unwrap_or(0)
    }

    pub fn any_cardinality(&self) -> bool {
        self.modules
            .values()
            .any(|l| matches!(l, RequirementList::Cardinality(_)))
    }

    pub fn any_sets(&self) -> bool {
        self.modules
            .values()
            .any(|l| matches!(l, RequirementList::Sets(_)))
    }

    /// Checks the structural invariants against a workflow: listed modules
    /// exist, are private and carry non-empty lists; set options stay
    /// within the module's attributes; cardinality pairs stay within its
    /// arities and are normalized (increasing α, decreasing β).
    pub fn validate(&self, workflow: &Workflow) -> Result<()> {
        for (name, list) in &self.modules {
            let idx = workflow.module(name)?;
            if workflow.modules()[idx].is_public() {
                return Err(Error::Precondition(format!(
                    "requirement list given for public module `{name}`"
                )));
            }
            if list.is_empty() {
                return Err(Error::Precondition(format!(
                    "module `{name}` has an empty requirement list"
                )));
            }
            let n_in = workflow.inputs_of(idx).len();
            let n_out = workflow.outputs_of(idx).len();
            match list {
                RequirementList::Cardinality(pairs) => {
                    for &(alpha, beta) in pairs {
                        if alpha > n_in || beta > n_out {
                            return Err(Error::Precondition(format!(
                                "module `{name}`: pair ({alpha},{beta}) exceeds arities ({n_in},{n_out})"
                            )));
                        }
                    }
                    for pair in pairs.windows(2) {
                        let ((a1, b1), (a2, b2)) = (pair[0], pair[1]);
                        if a2 <= a1 || b2 >= b1 {
                            return Err(Error::Precondition(format!(
                                "module `{name}`: cardinality list not normalized at ({a1},{b1}), ({a2},{b2})"
                            )));
                        }
                    }
                }
                RequirementList::Sets(options) => {
                    let ins: BTreeSet<&str> = workflow
                        .inputs_of(idx)
                        .iter()
                        .map(|&a| workflow.attributes()[a].name.as_str())
                        .collect();
                    let outs: BTreeSet<&str> = workflow
                        .outputs_of(idx)
                        .iter()
                        .map(|&a| workflow.attributes()[a].name.as_str())
                        .collect();
                    for (hide_in, hide_out) in options {
                        if let Some(bad) = hide_in.iter().find(|a| !ins.contains(a.as_str())) {
                            return Err(Error::Precondition(format!(
                                "module `{name}`: `{bad}` is not one of its inputs"
                            )));
                        }
                        if let Some(bad) = hide_out.iter().find(|a| !outs.contains(a.as_str())) {
                            return Err(Error::Precondition(format!(
                                "module `{name}`: `{bad}` is not one of its outputs"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_entries(&self) -> Vec<RequirementsEntry> {
        self.modules
            .iter()
            .map(|(module, list)| match list {
                RequirementList::Cardinality(pairs) => RequirementsEntry {
                    module: module.clone(),
                    cardinality: Some(pairs.clone()),
                    sets: None,
                },
                RequirementList::Sets(options) => RequirementsEntry {
                    module: module.clone(),
                    cardinality: None,
                    sets: Some(
                        options
                            .iter()
                            .map(|(i, o)| SetOption {
                                inputs: i.iter().cloned().collect(),
                                outputs: o.iter().cloned().collect(),
                            })
                            .collect(),
                    ),
                },
            })
            .collect()
    }

    pub fn from_entries(entries: Vec<RequirementsEntry>) -> Result<Self> {
        let mut modules = BTreeMap::new();
        for entry in entries {
            let list = match (entry.cardinality, entry.sets) {
                (Some(pairs), None) => RequirementList::Cardinality(pairs),
                (None, Some(options)) => RequirementList::Sets(
                    options
                        .into_iter()
                        .map(|o| {
                            (
                                o.inputs.into_iter().collect(),
                                o.outputs.into_iter().collect(),
                            )
                        })
                        .collect(),
                ),
                _ => {
                    return Err(Error::Precondition(format!(
                        "module `{}` must carry exactly one of `cardinality` or `sets`",
                        entry.module
                    )))
                }
            };
            if modules.insert(entry.module.clone(), list).is_some() {
                return Err(Error::Precondition(format!(
                    "duplicate requirements entry for module `{}`",
                    entry.module
                )));
            }
        }
        Ok(Requirements { modules })
    }
}

/// One line of a requirements file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequirementsEntry {
    pub module: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<SetOption>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetOption {
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "card-round")]
    CardinalityRounding,
    #[serde(rename = "set-round")]
    SetRounding,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "general-set")]
    GeneralSet,
    #[serde(rename = "union-standalone")]
    UnionStandalone,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::CardinalityRounding => "card-round",
            Method::SetRounding => "set-round",
            Method::Greedy => "greedy",
            Method::GeneralSet => "general-set",
            Method::UnionStandalone => "union-standalone",
        })
    }
}

/// A secure-view solution: the hidden attributes `V̄`, the privatized
/// public modules `P̄`, and the total cost `cost(V̄) + pvt(P̄)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub method: Method,
    pub seed: Option<u64>,
    pub hidden_attributes: BTreeSet<String>,
    pub hidden_modules: BTreeSet<String>,
    pub cost: Rational,
    pub feasible: bool,
    pub satisfied_option: BTreeMap<String, usize>,
}

impl Solution {
    pub fn to_data(&self) -> Result<SolutionData> {
        Ok(SolutionData {
            method: self.method,
            seed: self.seed,
            hidden_attributes: self.hidden_attributes.iter().cloned().collect(),
            hidden_modules: self.hidden_modules.iter().cloned().collect(),
            cost: NumDen::from_rational(&self.cost).map_err(Error::Precondition)?,
            feasible: self.feasible,
            satisfied_option: self.satisfied_option.clone(),
        })
    }

    pub fn from_data(data: SolutionData) -> Result<Self> {
        Ok(Solution {
            method: data.method,
            seed: data.seed,
            hidden_attributes: data.hidden_attributes.into_iter().collect(),
            hidden_modules: data.hidden_modules.into_iter().collect(),
            cost: data.cost.to_rational().map_err(Error::Precondition)?,
            feasible: data.feasible,
            satisfied_option: data.satisfied_option,
        })
    }
}

/// JSON form of a solution file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionData {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub hidden_attributes: Vec<String>,
    #[serde(default)]
    pub hidden_modules: Vec<String>,
    pub cost: NumDen,
    pub feasible: bool,
    #[serde(default)]
    pub satisfied_option: BTreeMap<String, usize>,
}

/// Checks a candidate against the requirements: every listed module needs
/// some option satisfied by the hidden attributes, and every public
/// module adjacent to a hidden attribute must itself be hidden. Returns
/// the per-module satisfied option index alongside the verdict.
pub fn verify_solution(
    workflow: &Workflow,
    requirements: &Requirements,
    hidden_attributes: &BTreeSet<String>,
    hidden_modules: &BTreeSet<String>,
) -> Result<(bool, BTreeMap<String, usize>)> {
    for name in hidden_attributes {
        workflow.attr(name)?;
    }
    for name in hidden_modules {
        let idx = workflow.module(name)?;
        if !workflow.modules()[idx].is_public() {
            return Err(Error::Precondition(format!(
                "`{name}` is private and cannot be privatized"
            )));
        }
    }

    let mut satisfied = BTreeMap::new();
    let mut ok = true;
    for (name, list) in &requirements.modules {
        let idx = workflow.module(name)?;
        match satisfied_option(workflow, idx, list, hidden_attributes) {
            Some(j) => {
                satisfied.insert(name.clone(), j);
            }
            None => ok = false,
        }
    }
    for (idx, module) in workflow.public_modules() {
        if hidden_modules.contains(&module.name) {
            continue;
        }
        let touches_hidden = workflow
            .attrs_of(idx)
            .iter()
            .any(|&a| hidden_attributes.contains(&workflow.attributes()[a].name));
        if touches_hidden {
            ok = false;
        }
    }
    Ok((ok, satisfied))
}

/// Lowest option index satisfied by the hidden set, if any.
fn satisfied_option(
    workflow: &Workflow,
    module: usize,
    list: &RequirementList,
    hidden: &BTreeSet<String>,
) -> Option<usize> {
    match list {
        RequirementList::Cardinality(pairs) => {
            let count = |attrs: &[usize]| {
                attrs
                    .iter()
                    .filter(|&&a| hidden.contains(&workflow.attributes()[a].name))
                    .count()
            };
            let hidden_in = count(workflow.inputs_of(module));
            let hidden_out = count(workflow.outputs_of(module));
            pairs
                .iter()
                .position(|&(alpha, beta)| hidden_in >= alpha && hidden_out >= beta)
        }
        RequirementList::Sets(options) => options.iter().position(|(hide_in, hide_out)| {
            hide_in.iter().all(|a| hidden.contains(a))
                && hide_out.iter().all(|a| hidden.contains(a))
        }),
    }
}

/// Public modules forced into `P̄` because a hidden attribute touches
/// them.
pub fn forced_hidden_publics(
    workflow: &Workflow,
    hidden_attributes: &BTreeSet<String>,
) -> BTreeSet<String> {
    workflow
        .public_modules()
        .filter(|(idx, _)| {
            workflow
                .attrs_of(*idx)
                .iter()
                .any(|&a| hidden_attributes.contains(&workflow.attributes()[a].name))
        })
        .map(|(_, m)| m.name.clone())
        .collect()
}

fn total_cost(
    costs: &Costs,
    hidden_attributes: &BTreeSet<String>,
    hidden_modules: &BTreeSet<String>,
) -> Rational {
    costs.hidden_cost(hidden_attributes.iter())
        + costs.privatization_cost(hidden_modules.iter())
}

fn assemble(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    method: Method,
    seed: Option<u64>,
    hidden_attributes: BTreeSet<String>,
    hidden_modules: BTreeSet<String>,
) -> Result<Solution> {
    let (feasible, satisfied_option) =
        verify_solution(workflow, requirements, &hidden_attributes, &hidden_modules)?;
    let cost = total_cost(costs, &hidden_attributes, &hidden_modules);
    Ok(Solution {
        method,
        seed,
        hidden_attributes,
        hidden_modules,
        cost,
        feasible,
        satisfied_option,
    })
}

/// Attribute names of a module's inputs (resp. outputs) sorted by
/// (cost, name); the realization order for cardinality requirements.
fn by_cheapest(workflow: &Workflow, attrs: &[usize], costs: &Costs) -> Vec<String> {
    let mut names: Vec<String> = attrs
        .iter()
        .map(|&a| workflow.attributes()[a].name.clone())
        .collect();
    names.sort_by(|a, b| {
        (costs.attr_cost(a), a.as_str()).cmp(&(costs.attr_cost(b), b.as_str()))
    });
    names
}

/// Cheapest realization of each option of a list; returns
/// `(option index, attribute set, cost)` minimizing cost, ties to the
/// lowest index.
fn min_cost_option(
    workflow: &Workflow,
    module: usize,
    list: &RequirementList,
    costs: &Costs,
) -> (usize, BTreeSet<String>, Rational) {
    let realizations: Vec<BTreeSet<String>> = match list {
        RequirementList::Cardinality(pairs) => {
            let cheap_in = by_cheapest(workflow, workflow.inputs_of(module), costs);
            let cheap_out = by_cheapest(workflow, workflow.outputs_of(module), costs);
            pairs
                .iter()
                .map(|&(alpha, beta)| {
                    cheap_in[..alpha]
                        .iter()
                        .chain(&cheap_out[..beta])
                        .cloned()
                        .collect()
                })
                .collect()
        }
        RequirementList::Sets(options) => options
            .iter()
            .map(|(i, o)| i.iter().chain(o).cloned().collect())
            .collect(),
    };
    let mut best: Option<(usize, BTreeSet<String>, Rational)> = None;
    for (j, set) in realizations.into_iter().enumerate() {
        let cost = costs.hidden_cost(set.iter());
        if best.as_ref().map(|(_, _, c)| cost < *c).unwrap_or(true) {
            best = Some((j, set, cost));
        }
    }
    best.expect("requirement lists are non-empty after validation")
}

fn require_all_private(workflow: &Workflow, what: &str) -> Result<()> {
    if let Some((_, m)) = workflow.public_modules().next() {
        return Err(Error::Unsupported(format!(
            "{what} requires an all-private workflow; `{}` is public",
            m.name
        )));
    }
    Ok(())
}

/// Optimal solution via the exact IP on the matching formulation:
/// cardinality or set constraints for all-private workflows, the
/// privatization program for workflows with public modules (set
/// constraints only — the paper gives no cardinality formulation there).
pub fn solve_exact(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    budget: &Budget,
) -> Result<Solution> {
    requirements.validate(workflow)?;
    if requirements.any_cardinality() && requirements.any_sets() {
        return Err(Error::Unsupported(
            "mixed cardinality and set requirement lists".into(),
        ));
    }
    let has_public = workflow.public_modules().next().is_some();
    let program = if has_public {
        if requirements.any_cardinality() {
            return Err(Error::Unsupported(
                "cardinality requirements with public modules".into(),
            ));
        }
        build_general_set_ip(workflow, requirements, costs)?
    } else if requirements.any_cardinality() {
        build_cardinality_ip(workflow, requirements, costs)?
    } else {
        build_set_ip(workflow, requirements, costs)?
    };
    let solution = solve_ip_exact(&program, budget)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!(
            "exact program unexpectedly {:?}",
            solution.status
        )));
    }
    let hidden = hidden_attrs_of_solution(workflow, &program, &solution);
    let hidden_modules = forced_hidden_publics(workflow, &hidden);
    assemble(
        workflow,
        requirements,
        costs,
        Method::Exact,
        None,
        hidden,
        hidden_modules,
    )
}

/// Randomized LP rounding for cardinality requirements:
///
/// 1. solve the LP relaxation of the cardinality IP;
/// 2. hide each attribute `b` independently with probability
///    `min{1, 16·x_b·ln n}`, `n` being the number of modules with
///    requirement lists;
/// 3. for every module still unsatisfied, add its cheapest realization
///    `B_i^min` (modules scanned in declaration order).
///
/// Always returns a feasible solution; the seed is recorded for replay.
pub fn solve_cardinality_rounding(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    seed: u64,
    _budget: &Budget,
) -> Result<Solution> {
    requirements.validate(workflow)?;
    require_all_private(workflow, "cardinality rounding")?;
    if requirements.any_sets() {
        return Err(Error::Precondition(
            "cardinality rounding needs cardinality requirement lists".into(),
        ));
    }
    let program = build_cardinality_ip(workflow, requirements, costs)?;
    let relaxed = solve_lp(&program);
    if relaxed.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!(
            "cardinality LP unexpectedly {:?}",
            relaxed.status
        )));
    }

    let n = requirements.modules.len();
    let ln_n = (n as f64).ln();
    let mut rng = SplitMix64::new(seed);
    let mut hidden: BTreeSet<String> = BTreeSet::new();
    for attr in workflow.attributes() {
        let x_b = relaxed
            .value(&program, &format!("x:{}", attr.name))
            .map(crate::rational::to_f64)
            .unwrap_or(0.0);
        let p = (16.0 * x_b * ln_n).min(1.0);
        if rng.next_f64() < p {
            hidden.insert(attr.name.clone());
        }
    }
    for (m, module) in workflow.modules().iter().enumerate() {
        let Some(list) = requirements.modules.get(&module.name) else {
            continue;
        };
        if satisfied_option(workflow, m, list, &hidden).is_none() {
            let (_, patch, _) = min_cost_option(workflow, m, list, costs);
            hidden.extend(patch);
        }
    }
    let solution = assemble(
        workflow,
        requirements,
        costs,
        Method::CardinalityRounding,
        Some(seed),
        hidden,
        BTreeSet::new(),
    )?;
    debug_assert!(solution.feasible);
    Ok(solution)
}

/// Threshold rounding for set requirements: solve the LP relaxation and
/// hide every attribute with `x_b ≥ 1/ℓ_max`. Feasible by construction
/// and within a factor ℓ_max of the LP objective.
pub fn solve_set_rounding(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    budget: &Budget,
) -> Result<Solution> {
    require_all_private(workflow, "set rounding")?;
    let (hidden, _) = round_set_lp(workflow, requirements, costs, false, budget)?;
    assemble(
        workflow,
        requirements,
        costs,
        Method::SetRounding,
        None,
        hidden,
        BTreeSet::new(),
    )
}

/// Set-requirements rounding for general workflows: the LP gains one
/// `w_i` per public module (objective `pvt_i`, `w_i ≥ x_b` on its
/// attributes); after thresholding, every public module adjacent to a
/// hidden attribute is privatized. Total cost stays within ℓ_max times
/// the LP objective.
pub fn solve_general_set(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    budget: &Budget,
) -> Result<Solution> {
    let (hidden, _) = round_set_lp(workflow, requirements, costs, true, budget)?;
    let hidden_modules = forced_hidden_publics(workflow, &hidden);
    assemble(
        workflow,
        requirements,
        costs,
        Method::GeneralSet,
        None,
        hidden,
        hidden_modules,
    )
}

fn round_set_lp(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    with_privatization: bool,
    _budget: &Budget,
) -> Result<(BTreeSet<String>, Rational)> {
    requirements.validate(workflow)?;
    if requirements.any_cardinality() {
        return Err(Error::Precondition(
            "set rounding needs set requirement lists".into(),
        ));
    }
    let program = if with_privatization {
        build_general_set_ip(workflow, requirements, costs)?
    } else {
        build_set_ip(workflow, requirements, costs)?
    };
    let relaxed = solve_lp(&program);
    if relaxed.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!(
            "set LP unexpectedly {:?}",
            relaxed.status
        )));
    }
    let l_max = requirements.l_max().max(1);
    let threshold = Rational::new(1.into(), (l_max as i64).into());
    let hidden: BTreeSet<String> = workflow
        .attributes()
        .iter()
        .filter(|a| {
            relaxed
                .value(&program, &format!("x:{}", a.name))
                .map(|v| *v >= threshold)
                .unwrap_or(false)
        })
        .map(|a| a.name.clone())
        .collect();
    Ok((hidden, relaxed.objective))
}

/// The (γ+1)-approximation for γ-bounded data sharing: hide the union of
/// each module's cheapest option. Cardinality pairs are realized by the
/// cheapest attributes.
pub fn solve_greedy_bounded(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
) -> Result<Solution> {
    requirements.validate(workflow)?;
    let mut hidden = BTreeSet::new();
    for (m, module) in workflow.modules().iter().enumerate() {
        if let Some(list) = requirements.modules.get(&module.name) {
            let (_, set, _) = min_cost_option(workflow, m, list, costs);
            hidden.extend(set);
        }
    }
    let hidden_modules = forced_hidden_publics(workflow, &hidden);
    assemble(
        workflow,
        requirements,
        costs,
        Method::Greedy,
        None,
        hidden,
        hidden_modules,
    )
}

/// The naive baseline: hide the union of the per-module minimum-cost
/// standalone-safe hidden sets. Safety follows from the composition
/// theorem, so no requirement list is consulted; `satisfied_option` is
/// left empty.
pub fn union_of_standalone(
    workflow: &Workflow,
    reports: &[SafeSubsetReport],
    costs: &Costs,
) -> Result<Solution> {
    let mut hidden: BTreeSet<String> = BTreeSet::new();
    for report in reports {
        workflow.module(&report.module)?;
        if report.safe_hidden_sets.is_empty() {
            return Err(Error::InfeasibleStandalone {
                module: report.module.clone(),
                gamma: report.gamma,
            });
        }
        hidden.extend(report.min_cost_hidden.iter().cloned());
    }
    let hidden_modules = forced_hidden_publics(workflow, &hidden);
    let cost = total_cost(costs, &hidden, &hidden_modules);
    Ok(Solution {
        method: Method::UnionStandalone,
        seed: None,
        hidden_attributes: hidden,
        hidden_modules,
        cost,
        feasible: true,
        satisfied_option: BTreeMap::new(),
    })
}

/// Builds one report per listed module from a requirement list alone: the
/// minimum-cost realization of each option stands in for the safe-set
/// antichain, and `gamma` is 0 to mark the synthetic origin. This is the
/// union baseline for instances whose requirement lists are given rather
/// than derived from tables.
pub fn synthetic_reports_from_requirements(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
) -> Result<Vec<SafeSubsetReport>> {
    requirements.validate(workflow)?;
    let mut reports = Vec::new();
    for (m, module) in workflow.modules().iter().enumerate() {
        let Some(list) = requirements.modules.get(&module.name) else {
            continue;
        };
        let realizations: Vec<BTreeSet<String>> = match list {
            RequirementList::Cardinality(pairs) => {
                let cheap_in = by_cheapest(workflow, workflow.inputs_of(m), costs);
                let cheap_out = by_cheapest(workflow, workflow.outputs_of(m), costs);
                pairs
                    .iter()
                    .map(|&(alpha, beta)| {
                        cheap_in[..alpha]
                            .iter()
                            .chain(&cheap_out[..beta])
                            .cloned()
                            .collect()
                    })
                    .collect()
            }
            RequirementList::Sets(options) => options
                .iter()
                .map(|(i, o)| i.iter().chain(o).cloned().collect())
                .collect(),
        };
        let (_, min_set, min_cost) = min_cost_option(workflow, m, list, costs);
        reports.push(SafeSubsetReport {
            module: module.name.clone(),
            gamma: 0,
            safe_hidden_sets: realizations,
            min_cost_hidden: min_set,
            min_cost,
        });
    }
    Ok(reports)
}

/// LP objective of the relaxation matching `requirements` — the reference
/// value for the rounding-bound checks.
pub fn lp_bound(
    workflow: &Workflow,
    requirements: &Requirements,
    costs: &Costs,
    with_privatization: bool,
) -> Result<Rational> {
    let program = if requirements.any_cardinality() {
        build_cardinality_ip(workflow, requirements, costs)?
    } else if with_privatization {
        build_general_set_ip(workflow, requirements, costs)?
    } else {
        build_set_ip(workflow, requirements, costs)?
    };
    let relaxed = solve_lp(&program);
    if relaxed.status != LpStatus::Optimal {
        return Err(Error::Precondition(format!(
            "LP relaxation unexpectedly {:?}",
            relaxed.status
        )));
    }
    Ok(relaxed.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{
        gen_example41, gen_public_counterexample, gen_random_instance, three_gate_sample,
        RandomParams,
    };
    use crate::privacy::{is_workflow_safe, CheckMode, Gammas, Verdict, View};
    use crate::rational::{rat, rat_int};
    use crate::standalone::RequirementForm;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fanout_family_exact_and_union_costs() {
        let inst = gen_example41(8, &rat(1, 4)).unwrap();
        let exact = solve_exact(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
            .unwrap();
        assert_eq!(exact.cost, rat(9, 4));
        assert!(exact.feasible);
        assert!(exact.hidden_attributes.contains("a2"));
        assert_eq!(exact.hidden_attributes.len(), 2);

        let reports =
            synthetic_reports_from_requirements(&inst.workflow, &inst.requirements, &inst.costs)
                .unwrap();
        let union = union_of_standalone(&inst.workflow, &reports, &inst.costs).unwrap();
        assert_eq!(union.cost, rat_int(9));
        let (feasible, _) = verify_solution(
            &inst.workflow,
            &inst.requirements,
            &union.hidden_attributes,
            &union.hidden_modules,
        )
        .unwrap();
        assert!(feasible);

        let greedy =
            solve_greedy_bounded(&inst.workflow, &inst.requirements, &inst.costs).unwrap();
        assert_eq!(greedy.cost, rat_int(9));
        assert!(greedy.feasible);
    }

    #[test]
    fn verify_solution_examples() {
        let inst = gen_example41(4, &rat(1, 4)).unwrap();
        let (ok, satisfied) = verify_solution(
            &inst.workflow,
            &inst.requirements,
            &set(&["a2", "b1"]),
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(ok);
        assert_eq!(satisfied["m"], 0); // (0,1) satisfied by hiding a2
        assert_eq!(satisfied["m1"], 0); // (0,1) satisfied by hiding b1
        assert_eq!(satisfied["m2"], 1); // only (1,0) works: b2 is visible
        let (ok, _) = verify_solution(
            &inst.workflow,
            &inst.requirements,
            &set(&["a1"]),
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(!ok); // mp unsatisfied

        // Empty requirements: everything is feasible at cost zero.
        let (ok, satisfied) = verify_solution(
            &inst.workflow,
            &Requirements::default(),
            &BTreeSet::new(),
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(ok);
        assert!(satisfied.is_empty());
    }

    #[test]
    fn exact_on_single_module_picks_cheapest_output() {
        let wf = three_gate_sample();
        let mut costs = Costs::from_workflow(&wf);
        costs.attribute.insert("a6".into(), rat_int(3));
        let mut reqs = Requirements::default();
        reqs.modules.insert(
            "m2".into(),
            RequirementList::Cardinality(vec![(0, 1)]),
        );
        let sol = solve_exact(&wf, &reqs, &costs, &Budget::default()).unwrap();
        assert_eq!(sol.cost, rat_int(3));
        assert_eq!(sol.hidden_attributes, set(&["a6"]));
    }

    #[test]
    fn exact_matches_brute_force_on_random_instances() {
        for seed in 0..8u64 {
            let inst = gen_random_instance(&RandomParams {
                seed,
                n_modules: 3,
                max_inputs: 2,
                max_outputs: 2,
                gamma_bound: 2,
                l_max: 2,
                form: if seed % 2 == 0 {
                    RequirementForm::Cardinality
                } else {
                    RequirementForm::Set
                },
            })
            .unwrap();
            let exact =
                solve_exact(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
                    .unwrap();
            // Brute force over every hidden subset.
            let names: Vec<String> = inst
                .workflow
                .attributes()
                .iter()
                .map(|a| a.name.clone())
                .collect();
            let mut best: Option<Rational> = None;
            for mask in 0u64..(1 << names.len()) {
                let hidden: BTreeSet<String> = names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, n)| n.clone())
                    .collect();
                let (ok, _) = verify_solution(
                    &inst.workflow,
                    &inst.requirements,
                    &hidden,
                    &BTreeSet::new(),
                )
                .unwrap();
                if ok {
                    let cost = inst.costs.hidden_cost(hidden.iter());
                    if best.as_ref().map(|b| cost < *b).unwrap_or(true) {
                        best = Some(cost);
                    }
                }
            }
            assert_eq!(exact.cost, best.unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn cardinality_rounding_is_feasible_and_deterministic() {
        let inst = gen_example41(8, &rat(1, 4)).unwrap();
        let a = solve_cardinality_rounding(
            &inst.workflow,
            &inst.requirements,
            &inst.costs,
            1,
            &Budget::default(),
        )
        .unwrap();
        assert!(a.feasible);
        assert_eq!(a.seed, Some(1));
        let lp = lp_bound(&inst.workflow, &inst.requirements, &inst.costs, false).unwrap();
        assert!(lp <= a.cost);
        let b = solve_cardinality_rounding(
            &inst.workflow,
            &inst.requirements,
            &inst.costs,
            1,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn saturated_probability_keeps_the_lp_support() {
        // With an integral LP optimum and 16 ln n >= 1, every supported
        // attribute is hidden before patching, so the rounded solution is
        // exactly the LP support.
        let wf = three_gate_sample();
        let costs = Costs::from_workflow(&wf);
        let mut reqs = Requirements::default();
        for (module, pair) in [("m1", (2, 0)), ("m2", (0, 1)), ("m3", (0, 1))] {
            reqs.modules
                .insert(module.into(), RequirementList::Cardinality(vec![pair]));
        }
        for seed in 0..5 {
            let sol =
                solve_cardinality_rounding(&wf, &reqs, &costs, seed, &Budget::default()).unwrap();
            assert!(sol.hidden_attributes.is_superset(&set(&["a1", "a2", "a6", "a7"])));
            assert!(sol.feasible);
        }
    }

    #[test]
    fn set_rounding_respects_the_l_max_bound() {
        for seed in 0..10u64 {
            let inst = gen_random_instance(&RandomParams {
                seed: 100 + seed,
                n_modules: 4,
                max_inputs: 2,
                max_outputs: 2,
                gamma_bound: 3,
                l_max: 3,
                form: RequirementForm::Set,
            })
            .unwrap();
            let sol = solve_set_rounding(
                &inst.workflow,
                &inst.requirements,
                &inst.costs,
                &Budget::default(),
            )
            .unwrap();
            assert!(sol.feasible, "seed {seed}");
            let lp = lp_bound(&inst.workflow, &inst.requirements, &inst.costs, false).unwrap();
            let l_max = rat_int(inst.requirements.l_max() as i64);
            assert!(sol.cost <= l_max * lp, "seed {seed}");
        }
    }

    #[test]
    fn set_rounding_with_unit_lists_is_exact() {
        for seed in 0..6u64 {
            let inst = gen_random_instance(&RandomParams {
                seed: 200 + seed,
                n_modules: 3,
                max_inputs: 2,
                max_outputs: 2,
                gamma_bound: 2,
                l_max: 1,
                form: RequirementForm::Set,
            })
            .unwrap();
            let rounded = solve_set_rounding(
                &inst.workflow,
                &inst.requirements,
                &inst.costs,
                &Budget::default(),
            )
            .unwrap();
            let exact =
                solve_exact(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
                    .unwrap();
            assert_eq!(rounded.cost, exact.cost, "seed {seed}");
        }
    }

    #[test]
    fn greedy_single_module_is_exact() {
        let wf = three_gate_sample();
        let costs = Costs::from_workflow(&wf);
        let mut reqs = Requirements::default();
        reqs.modules.insert(
            "m1".into(),
            RequirementList::Cardinality(vec![(0, 2), (1, 1)]),
        );
        let greedy = solve_greedy_bounded(&wf, &reqs, &costs).unwrap();
        let exact = solve_exact(&wf, &reqs, &costs, &Budget::default()).unwrap();
        assert_eq!(greedy.cost, exact.cost);
        assert!(greedy.feasible);
    }

    #[test]
    fn general_set_matches_set_rounding_on_all_private() {
        let inst = gen_random_instance(&RandomParams {
            seed: 77,
            n_modules: 3,
            max_inputs: 2,
            max_outputs: 2,
            gamma_bound: 2,
            l_max: 2,
            form: RequirementForm::Set,
        })
        .unwrap();
        let a = solve_set_rounding(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
            .unwrap();
        let b = solve_general_set(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
            .unwrap();
        assert_eq!(a.hidden_attributes, b.hidden_attributes);
        assert_eq!(a.cost, b.cost);
        assert!(b.hidden_modules.is_empty());
    }

    #[test]
    fn general_set_privatizes_touched_publics_and_certifies() {
        let inst = gen_public_counterexample(3, 2).unwrap();
        let sol = solve_general_set(
            &inst.workflow,
            &inst.requirements,
            &inst.costs,
            &Budget::default(),
        )
        .unwrap();
        assert!(sol.feasible);
        // Whichever attribute is hidden, its adjacent public module is
        // privatized.
        for name in &sol.hidden_attributes {
            if name.starts_with('c') {
                assert!(sol.hidden_modules.contains("msrc"));
            }
            if name.starts_with('d') {
                assert!(sol.hidden_modules.contains("msink"));
            }
        }
        let lp = lp_bound(&inst.workflow, &inst.requirements, &inst.costs, true).unwrap();
        let l_max = rat_int(inst.requirements.l_max() as i64);
        assert!(sol.cost <= l_max * lp);

        // The solution is certifiable by the composition theorem.
        let rel = crate::model::execute_workflow(&inst.workflow, None).unwrap();
        let view = View {
            hidden_attributes: sol.hidden_attributes.clone(),
            hidden_modules: sol.hidden_modules.clone(),
        };
        let cert = is_workflow_safe(
            &inst.workflow,
            &rel,
            &view,
            &Gammas::per_module([("mid".to_string(), 2)].into_iter().collect()),
            CheckMode::Compositional,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::SafeByTheorem);
    }

    #[test]
    fn exact_never_loses_to_other_methods() {
        for seed in 0..6u64 {
            let inst = gen_random_instance(&RandomParams {
                seed: 300 + seed,
                n_modules: 3,
                max_inputs: 2,
                max_outputs: 2,
                gamma_bound: 2,
                l_max: 2,
                form: RequirementForm::Set,
            })
            .unwrap();
            let exact =
                solve_exact(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
                    .unwrap();
            let rounded = solve_set_rounding(
                &inst.workflow,
                &inst.requirements,
                &inst.costs,
                &Budget::default(),
            )
            .unwrap();
            let greedy =
                solve_greedy_bounded(&inst.workflow, &inst.requirements, &inst.costs).unwrap();
            assert!(exact.cost <= rounded.cost);
            assert!(exact.cost <= greedy.cost);
        }
    }

    #[test]
    fn requirements_entries_round_trip() {
        let inst = gen_example41(2, &rat(1, 4)).unwrap();
        let entries = inst.requirements.to_entries();
        let json = serde_json::to_string(&entries).unwrap();
        let back: Vec<RequirementsEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(Requirements::from_entries(back).unwrap(), inst.requirements);
    }

    #[test]
    fn solution_data_round_trip() {
        let inst = gen_example41(2, &rat(1, 4)).unwrap();
        let sol = solve_exact(&inst.workflow, &inst.requirements, &inst.costs, &Budget::default())
            .unwrap();
        let data = sol.to_data().unwrap();
        let json = serde_json::to_string(&data).unwrap();
        let back = Solution::from_data(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, sol);
    }

    #[test]
    fn mixed_forms_rejected() {
        let inst = gen_example41(2, &rat(1, 4)).unwrap();
        let mut reqs = inst.requirements.clone();
        reqs.modules.insert(
            "mp".into(),
            RequirementList::Sets(vec![(set(&["b1"]), BTreeSet::new())]),
        );
        assert!(matches!(
            solve_exact(&inst.workflow, &reqs, &inst.costs, &Budget::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
