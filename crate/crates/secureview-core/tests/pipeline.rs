//! End-to-end pipeline: analyze each module standalone, extract
//! requirement lists, solve, verify, and certify the result.

use std::collections::BTreeMap;

use secureview_core::budget::Budget;
use secureview_core::harness::three_gate_sample;
use secureview_core::model::{execute_workflow, Costs, ModuleRelation};
use secureview_core::privacy::{is_workflow_safe, CheckMode, Gammas, Verdict, View};
use secureview_core::solvers::{
    solve_exact, solve_greedy_bounded, union_of_standalone, verify_solution, Requirements,
};
use secureview_core::standalone::{analyze_module, to_requirements, RequirementForm};

#[test]
fn standalone_reports_drive_the_workflow_solvers() {
    let wf = three_gate_sample();
    let costs = Costs::from_workflow(&wf);
    let budget = Budget::default();
    // Γ = 4 for the three-output module, 2 for the single-output gates.
    let gammas: BTreeMap<String, u64> = [
        ("m1".to_string(), 4u64),
        ("m2".to_string(), 2),
        ("m3".to_string(), 2),
    ]
    .into_iter()
    .collect();

    let mut reports = Vec::new();
    let mut requirements = Requirements::default();
    for (idx, module) in wf.modules().iter().enumerate() {
        let table = ModuleRelation::from_behavior(&wf, idx, budget.max_table_rows).unwrap();
        let report = analyze_module(&table, &costs, gammas[&module.name], &budget).unwrap();
        let list = to_requirements(&table, &report, RequirementForm::Set).unwrap();
        requirements.modules.insert(module.name.clone(), list);
        reports.push(report);
    }

    // The union baseline is reproducible and never beats the exact
    // optimum on the extracted requirements.
    let union = union_of_standalone(&wf, &reports, &costs).unwrap();
    let exact = solve_exact(&wf, &requirements, &costs, &budget).unwrap();
    assert!(exact.feasible);
    assert!(exact.cost <= union.cost);
    let (union_ok, _) = verify_solution(
        &wf,
        &requirements,
        &union.hidden_attributes,
        &union.hidden_modules,
    )
    .unwrap();
    assert!(union_ok);

    let greedy = solve_greedy_bounded(&wf, &requirements, &costs).unwrap();
    assert!(greedy.feasible);
    assert!(exact.cost <= greedy.cost);

    // Every produced hidden set certifies compositionally and exactly.
    let rel = execute_workflow(&wf, None).unwrap();
    let gammas = Gammas::per_module(gammas);
    for solution in [&union, &exact, &greedy] {
        let view = View {
            hidden_attributes: solution.hidden_attributes.clone(),
            hidden_modules: solution.hidden_modules.clone(),
        };
        let compositional =
            is_workflow_safe(&wf, &rel, &view, &gammas, CheckMode::Compositional, &budget)
                .unwrap();
        assert_eq!(compositional.verdict, Verdict::SafeByTheorem);
        let exact_check =
            is_workflow_safe(&wf, &rel, &view, &gammas, CheckMode::Exact, &budget).unwrap();
        assert_eq!(exact_check.verdict, Verdict::Safe);
    }
}
