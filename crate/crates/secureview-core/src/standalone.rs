//! Standalone secure-view: minimum-cost safe subsets for a single module
//! and extraction of the per-module requirement lists consumed by the
//! workflow solvers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::model::{Costs, ModuleRelation};
use crate::privacy::is_standalone_safe;
use crate::rational::{NumDen, Rational};
use crate::solvers::RequirementList;
use crate::Result;

/// Outcome of analyzing one module: the antichain of minimal safe hidden
/// sets and a minimum-cost safe hidden set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeSubsetReport {
    pub module: String,
    pub gamma: u64,
    /// Minimal safe hidden sets, ordered by (size, lexicographic names).
    pub safe_hidden_sets: Vec<BTreeSet<String>>,
    pub min_cost_hidden: BTreeSet<String>,
    pub min_cost: Rational,
}

/// JSON form of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SafeSubsetReportData {
    pub module: String,
    pub gamma: u64,
    pub safe_hidden_sets: Vec<BTreeSet<String>>,
    pub min_cost_hidden: BTreeSet<String>,
    pub min_cost: NumDen,
}

impl SafeSubsetReport {
    pub fn to_data(&self) -> Result<SafeSubsetReportData> {
        Ok(SafeSubsetReportData {
            module: self.module.clone(),
            gamma: self.gamma,
            safe_hidden_sets: self.safe_hidden_sets.clone(),
            min_cost_hidden: self.min_cost_hidden.clone(),
            min_cost: NumDen::from_rational(&self.min_cost).map_err(Error::Precondition)?,
        })
    }
}

/// Attribute names of the module sorted lexicographically; subset search
/// and tie-breaks run over this order.
fn sorted_names(rel: &ModuleRelation) -> Vec<String> {
    let mut names: Vec<String> = rel.attrs.iter().map(|a| a.name.clone()).collect();
    names.sort();
    names
}

fn check_size(rel: &ModuleRelation, budget: &Budget) -> Result<()> {
    let k = rel.attrs.len();
    if k > budget.max_standalone_attrs {
        return Err(Error::BudgetExceeded(format!(
            "module `{}` has {k} attributes (subset-search limit {})",
            rel.module, budget.max_standalone_attrs
        )));
    }
    Ok(())
}

/// Visits k-choose-size index combinations in lexicographic order.
fn for_each_combination(
    k: usize,
    size: usize,
    mut f: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<()> {
    if size > k {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !f(&idx)? {
            return Ok(());
        }
        // Advance to the next combination.
        let mut i = size;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] + 1 <= k - (size - i) {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Minimum-cost safe hidden set, by increasing subset size with cost
/// pruning against the incumbent. Exact; ties go to the smaller set, then
/// to lexicographic attribute order (the traversal order). Errors when no
/// hidden set is safe, which happens exactly when the output range is
/// smaller than Γ.
pub fn min_cost_safe_subset(
    rel: &ModuleRelation,
    costs: &Costs,
    gamma: u64,
    budget: &Budget,
) -> Result<(BTreeSet<String>, Rational)> {
    check_size(rel, budget)?;
    let names = sorted_names(rel);
    let all_hidden: BTreeSet<String> = names.iter().cloned().collect();
    if !is_standalone_safe(rel, &all_hidden, gamma)? {
        return Err(Error::InfeasibleStandalone {
            module: rel.module.clone(),
            gamma,
        });
    }
    let mut incumbent: Option<(Rational, BTreeSet<String>)> = None;
    for size in 0..=names.len() {
        for_each_combination(names.len(), size, |idx| {
            let hidden: BTreeSet<String> = idx.iter().map(|&i| names[i].clone()).collect();
            let cost = costs.hidden_cost(hidden.iter());
            if let Some((best, _)) = &incumbent {
                if cost >= *best {
                    return Ok(true);
                }
            }
            if is_standalone_safe(rel, &hidden, gamma)? {
                incumbent = Some((cost, hidden));
            }
            Ok(true)
        })?;
    }
    let (cost, hidden) = incumbent.expect("hiding everything is safe");
    Ok((hidden, cost))
}

/// The antichain of minimal safe hidden sets: every safe hidden set is a
/// superset of some returned set, every returned set is safe, and
/// removing any attribute from a returned set breaks safety.
pub fn enumerate_safe_hidden_sets(
    rel: &ModuleRelation,
    gamma: u64,
    budget: &Budget,
) -> Result<Vec<BTreeSet<String>>> {
    check_size(rel, budget)?;
    let names = sorted_names(rel);
    let mut minimal: Vec<BTreeSet<usize>> = Vec::new();
    for size in 0..=names.len() {
        for_each_combination(names.len(), size, |idx| {
            let candidate: BTreeSet<usize> = idx.iter().copied().collect();
            if minimal.iter().any(|m| m.is_subset(&candidate)) {
                return Ok(true);
            }
            let hidden: BTreeSet<String> = idx.iter().map(|&i| names[i].clone()).collect();
            if is_standalone_safe(rel, &hidden, gamma)? {
                minimal.push(candidate);
            }
            Ok(true)
        })?;
    }
    if minimal.is_empty() {
        return Err(Error::InfeasibleStandalone {
            module: rel.module.clone(),
            gamma,
        });
    }
    Ok(minimal
        .into_iter()
        .map(|m| m.into_iter().map(|i| names[i].clone()).collect())
        .collect())
}

/// Full analysis of one module at one Γ.
pub fn analyze_module(
    rel: &ModuleRelation,
    costs: &Costs,
    gamma: u64,
    budget: &Budget,
) -> Result<SafeSubsetReport> {
    let safe_hidden_sets = enumerate_safe_hidden_sets(rel, gamma, budget)?;
    let (min_cost_hidden, min_cost) = min_cost_safe_subset(rel, costs, gamma, budget)?;
    Ok(SafeSubsetReport {
        module: rel.module.clone(),
        gamma,
        safe_hidden_sets,
        min_cost_hidden,
        min_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequirementForm {
    Set,
    Cardinality,
}

/// Converts a report's antichain into a requirement list.
///
/// The set form splits each minimal safe set into its input and output
/// parts. The cardinality form is available only when the antichain is
/// closed under attribute renaming — every set with the same shape
/// (hidden-input count, hidden-output count) as an antichain member must
/// itself be safe; this is checked, and refused otherwise. The resulting
/// pair list is non-redundant and sorted by increasing α, decreasing β.
pub fn to_requirements(
    rel: &ModuleRelation,
    report: &SafeSubsetReport,
    form: RequirementForm,
) -> Result<RequirementList> {
    let input_names: BTreeSet<String> = rel
        .input_attrs()
        .iter()
        .map(|a| a.name.clone())
        .collect();
    let output_names: BTreeSet<String> = rel
        .output_attrs()
        .iter()
        .map(|a| a.name.clone())
        .collect();
    let split = |set: &BTreeSet<String>| -> (BTreeSet<String>, BTreeSet<String>) {
        (
            set.intersection(&input_names).cloned().collect(),
            set.intersection(&output_names).cloned().collect(),
        )
    };
    match form {
        RequirementForm::Set => Ok(RequirementList::Sets(
            report.safe_hidden_sets.iter().map(split).collect(),
        )),
        RequirementForm::Cardinality => {
            let dominated = |candidate: &BTreeSet<String>| {
                report
                    .safe_hidden_sets
                    .iter()
                    .any(|m| m.is_subset(candidate))
            };
            let shapes: BTreeSet<(usize, usize)> = report
                .safe_hidden_sets
                .iter()
                .map(|set| {
                    let (i, o) = split(set);
                    (i.len(), o.len())
                })
                .collect();
            let inputs: Vec<&String> = input_names.iter().collect();
            let outputs: Vec<&String> = output_names.iter().collect();
            for &(alpha, beta) in &shapes {
                let mut failure: Option<BTreeSet<String>> = None;
                for_each_combination(inputs.len(), alpha, |in_idx| {
                    let hidden_in: BTreeSet<String> =
                        in_idx.iter().map(|&i| inputs[i].clone()).collect();
                    for_each_combination(outputs.len(), beta, |out_idx| {
                        let mut candidate = hidden_in.clone();
                        candidate.extend(out_idx.iter().map(|&i| outputs[i].clone()));
                        if !dominated(&candidate) {
                            failure = Some(candidate);
                            return Ok(false);
                        }
                        Ok(true)
                    })?;
                    Ok(failure.is_none())
                })?;
                if let Some(bad) = failure {
                    return Err(Error::CardinalityFormUnavailable {
                        module: rel.module.clone(),
                        reason: format!(
                            "shape ({alpha},{beta}) is not closed under renaming: {bad:?} is unsafe"
                        ),
                    });
                }
            }
            // Drop dominated pairs, sort increasing α (β then strictly
            // decreases).
            let mut pairs: Vec<(usize, usize)> = shapes
                .iter()
                .filter(|&&(a, b)| {
                    !shapes
                        .iter()
                        .any(|&(a2, b2)| (a2, b2) != (a, b) && a2 <= a && b2 <= b)
                })
                .copied()
                .collect();
            pairs.sort();
            Ok(RequirementList::Cardinality(pairs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{gen_majority_workflow, gen_oneone_chain, three_gate_sample};
    use crate::model::{
        validate_workflow, AttributeDef, Behavior, ModuleDef, ModuleKind, ModuleRelation,
        Workflow, WorkflowDef,
    };
    use crate::rational::rat_int;

    fn m1_relation() -> (Workflow, ModuleRelation) {
        let wf = three_gate_sample();
        let rel = ModuleRelation::from_behavior(&wf, 0, 1 << 12).unwrap();
        (wf, rel)
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn min_cost_for_the_gate_module_is_two() {
        let (wf, m1) = m1_relation();
        let costs = Costs::from_workflow(&wf);
        let (hidden, cost) = min_cost_safe_subset(&m1, &costs, 4, &Budget::default()).unwrap();
        assert_eq!(cost, rat_int(2));
        assert!(is_standalone_safe(&m1, &hidden, 4).unwrap());
        // Deterministic under the stated tie-break.
        let (again, _) = min_cost_safe_subset(&m1, &costs, 4, &Budget::default()).unwrap();
        assert_eq!(hidden, again);
    }

    #[test]
    fn gamma_one_hides_nothing() {
        let (wf, m1) = m1_relation();
        let costs = Costs::from_workflow(&wf);
        let (hidden, cost) = min_cost_safe_subset(&m1, &costs, 1, &Budget::default()).unwrap();
        assert!(hidden.is_empty());
        assert_eq!(cost, rat_int(0));
    }

    #[test]
    fn one_one_module_needs_k_hidden() {
        let chain = gen_oneone_chain(2).unwrap();
        let rel = ModuleRelation::from_behavior(&chain, 0, 1 << 12).unwrap();
        let costs = Costs::from_workflow(&chain);
        let (hidden, cost) = min_cost_safe_subset(&rel, &costs, 4, &Budget::default()).unwrap();
        assert_eq!(cost, rat_int(2));
        assert!(hidden == set(&["s1", "s2"]) || hidden == set(&["t1", "t2"]));
    }

    #[test]
    fn antichain_matches_brute_force() {
        let (_, m1) = m1_relation();
        let antichain = enumerate_safe_hidden_sets(&m1, 4, &Budget::default()).unwrap();
        for expected in [
            set(&["a4", "a5"]),
            set(&["a3", "a4"]),
            set(&["a3", "a5"]),
            set(&["a2", "a4"]),
        ] {
            assert!(antichain.contains(&expected), "{expected:?} missing");
        }
        assert!(!antichain.contains(&set(&["a1", "a2"])));

        // Brute force: a hidden set is safe iff it dominates some member;
        // members are minimal.
        let names: Vec<String> = m1.attrs.iter().map(|a| a.name.clone()).collect();
        for mask in 0u32..(1 << names.len()) {
            let candidate: BTreeSet<String> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| n.clone())
                .collect();
            let safe = is_standalone_safe(&m1, &candidate, 4).unwrap();
            let dominated = antichain.iter().any(|m| m.is_subset(&candidate));
            assert_eq!(safe, dominated, "{candidate:?}");
        }
        for member in &antichain {
            for drop in member {
                let mut smaller = member.clone();
                smaller.remove(drop);
                assert!(!is_standalone_safe(&m1, &smaller, 4).unwrap());
            }
        }
    }

    #[test]
    fn majority_antichain_and_cardinality_form() {
        let wf = gen_majority_workflow(2).unwrap();
        let rel = ModuleRelation::from_behavior(&wf, 0, 1 << 12).unwrap();
        let antichain = enumerate_safe_hidden_sets(&rel, 2, &Budget::default()).unwrap();
        assert!(antichain.contains(&set(&["o"])));
        assert!(antichain.contains(&set(&["i1", "i2", "i3"])));
        // All k+1 = 3 input subsets plus the output singleton.
        assert_eq!(antichain.len(), 1 + 4);
        let report = analyze_module(&rel, &Costs::from_workflow(&wf), 2, &Budget::default()).unwrap();
        let list = to_requirements(&rel, &report, RequirementForm::Cardinality).unwrap();
        assert_eq!(
            list,
            RequirementList::Cardinality(vec![(0, 1), (3, 0)])
        );
    }

    #[test]
    fn one_one_mixed_safe_sets_block_the_cardinality_form() {
        // A 2-bit one-one module is 4-private when both inputs or both
        // outputs are hidden, but some mixed input/output pairs are safe
        // too (for the identity, {s1,t2} keeps four possible outputs) and
        // their shape is not closed under renaming ({s1,t1} pins the
        // output down to two). The shape check must therefore refuse.
        let chain = gen_oneone_chain(2).unwrap();
        let rel = ModuleRelation::from_behavior(&chain, 0, 1 << 12).unwrap();
        let report =
            analyze_module(&rel, &Costs::from_workflow(&chain), 4, &Budget::default()).unwrap();
        assert!(report.safe_hidden_sets.contains(&set(&["s1", "s2"])));
        assert!(report.safe_hidden_sets.contains(&set(&["t1", "t2"])));
        assert!(report.safe_hidden_sets.contains(&set(&["s1", "t2"])));
        assert!(matches!(
            to_requirements(&rel, &report, RequirementForm::Cardinality),
            Err(Error::CardinalityFormUnavailable { .. })
        ));
    }

    #[test]
    fn gate_module_set_form_and_cardinality_form() {
        let (_, m1) = m1_relation();
        let report = analyze_module(
            &m1,
            &Costs::from_workflow(&three_gate_sample()),
            4,
            &Budget::default(),
        )
        .unwrap();
        let RequirementList::Sets(options) =
            to_requirements(&m1, &report, RequirementForm::Set).unwrap()
        else {
            panic!("expected set form");
        };
        assert!(options.contains(&(BTreeSet::new(), set(&["a4", "a5"]))));
        assert!(options.contains(&(set(&["a2"]), set(&["a4"]))));
        // Every 2-subset except {a1,a2} is safe, so the shapes (0,2) and
        // (1,1) are closed under renaming and the cardinality form exists.
        let list = to_requirements(&m1, &report, RequirementForm::Cardinality).unwrap();
        assert_eq!(list, RequirementList::Cardinality(vec![(0, 2), (1, 1)]));
    }

    #[test]
    fn cardinality_form_refused_when_not_symmetric() {
        // m(x1, x2) = x2: hiding x2 is safe at Γ=2, hiding x1 is not.
        let attributes = vec![
            AttributeDef::boolean("x1", rat_int(1)),
            AttributeDef::boolean("x2", rat_int(1)),
            AttributeDef::boolean("y", rat_int(1)),
        ];
        let modules = vec![ModuleDef {
            name: "proj".into(),
            kind: ModuleKind::Private,
            inputs: vec!["x1".into(), "x2".into()],
            outputs: vec!["y".into()],
            behavior: Behavior::gates(&[("y", "x2")]),
            privatization_cost: None,
        }];
        let wf = validate_workflow(WorkflowDef {
            attributes,
            modules,
        })
        .unwrap();
        let rel = ModuleRelation::from_behavior(&wf, 0, 1 << 12).unwrap();
        let report =
            analyze_module(&rel, &Costs::from_workflow(&wf), 2, &Budget::default()).unwrap();
        assert_eq!(
            report.safe_hidden_sets,
            vec![set(&["x2"]), set(&["y"])]
        );
        assert!(matches!(
            to_requirements(&rel, &report, RequirementForm::Cardinality),
            Err(Error::CardinalityFormUnavailable { .. })
        ));
    }

    #[test]
    fn constant_with_singleton_range_is_infeasible() {
        let attributes = vec![
            AttributeDef::boolean("x", rat_int(1)),
            AttributeDef {
                name: "y".into(),
                domain: vec!["k".into()],
                cost: rat_int(1),
            },
        ];
        let modules = vec![ModuleDef {
            name: "konst".into(),
            kind: ModuleKind::Private,
            inputs: vec!["x".into()],
            outputs: vec!["y".into()],
            behavior: Behavior::constant(&["k"]),
            privatization_cost: None,
        }];
        let wf = validate_workflow(WorkflowDef {
            attributes,
            modules,
        })
        .unwrap();
        let rel = ModuleRelation::from_behavior(&wf, 0, 1 << 12).unwrap();
        assert!(matches!(
            enumerate_safe_hidden_sets(&rel, 2, &Budget::default()),
            Err(Error::InfeasibleStandalone { .. })
        ));
        assert!(matches!(
            min_cost_safe_subset(&rel, &Costs::from_workflow(&wf), 2, &Budget::default()),
            Err(Error::InfeasibleStandalone { .. })
        ));
    }

    #[test]
    fn min_cost_agrees_with_antichain_minimum() {
        let (wf, m1) = m1_relation();
        let mut costs = Costs::from_workflow(&wf);
        // Skew the costs so the cheapest safe set is not the unit-cost one.
        costs.attribute.insert("a4".into(), rat_int(5));
        costs.attribute.insert("a1".into(), rat_int(2));
        let (hidden, cost) = min_cost_safe_subset(&m1, &costs, 4, &Budget::default()).unwrap();
        let antichain = enumerate_safe_hidden_sets(&m1, 4, &Budget::default()).unwrap();
        let best = antichain
            .iter()
            .map(|s| costs.hidden_cost(s.iter()))
            .min()
            .unwrap();
        assert_eq!(cost, best);
        assert!(is_standalone_safe(&m1, &hidden, 4).unwrap());
    }

    #[test]
    fn attr_bound_enforced() {
        let (wf, m1) = m1_relation();
        let tight = Budget {
            max_standalone_attrs: 3,
            ..Budget::default()
        };
        assert!(matches!(
            min_cost_safe_subset(&m1, &Costs::from_workflow(&wf), 4, &tight),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
