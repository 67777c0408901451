//! Property tests for the small algebraic invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use secureview_core::model::{execute_workflow, Relation, Value};
use secureview_core::privacy::{flip_tuple, standalone_out_set, FlipPair};
use secureview_core::harness::gen_random_module;
use secureview_core::model::ModuleRelation;

fn tuple_strategy(len: usize, domain: u16) -> impl Strategy<Value = Vec<Value>> {
    proptest::collection::vec(0..domain, len)
}

proptest! {
    #[test]
    fn flip_is_an_involution(
        x in tuple_strategy(5, 3),
        p in tuple_strategy(3, 3),
        q in tuple_strategy(3, 3),
    ) {
        let attrs: Vec<String> = (0..5).map(|i| format!("a{i}")).collect();
        // The pair covers a subset of the tuple's attributes plus one
        // foreign attribute.
        let pair = FlipPair {
            attrs: vec!["a1".into(), "a3".into(), "zz".into()],
            p,
            q,
        };
        let once = flip_tuple(&pair, &attrs, &x);
        prop_assert_eq!(flip_tuple(&pair, &attrs, &once), x);
    }

    #[test]
    fn flip_preserves_agreeing_positions(
        x in tuple_strategy(4, 2),
        p in tuple_strategy(4, 2),
    ) {
        // p = q: flipping is the identity.
        let attrs: Vec<String> = (0..4).map(|i| format!("a{i}")).collect();
        let pair = FlipPair { attrs: attrs.clone(), p: p.clone(), q: p };
        prop_assert_eq!(flip_tuple(&pair, &attrs, &x), x);
    }

    #[test]
    fn projection_keeps_row_count_and_column_subset(
        rows in proptest::collection::vec(tuple_strategy(4, 2), 1..8),
        mask in 0u32..16,
    ) {
        let attributes: Vec<String> = (0..4).map(|i| format!("a{i}")).collect();
        let rel = Relation { attributes: attributes.clone(), rows };
        let keep: BTreeSet<String> = attributes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        let projected = rel.project(&keep).unwrap();
        prop_assert_eq!(projected.rows.len(), rel.rows.len());
        prop_assert_eq!(projected.attributes.len(), keep.len());
    }
}

#[test]
fn out_sets_shrink_as_views_grow() {
    // Prop-2.6 restated at out-set level, over random modules and nested
    // views.
    for seed in 0..30u64 {
        let wf = gen_random_module(seed, 2, 2).unwrap();
        let table = ModuleRelation::from_behavior(&wf, 0, 1 << 12).unwrap();
        let names: Vec<String> = table.attrs.iter().map(|a| a.name.clone()).collect();
        for mask in 0u32..(1 << names.len()) {
            let hidden: BTreeSet<String> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| n.clone())
                .collect();
            for (extra_idx, extra) in names.iter().enumerate() {
                if mask & (1 << extra_idx) != 0 {
                    continue;
                }
                let mut bigger = hidden.clone();
                bigger.insert(extra.clone());
                for x in table.realized_inputs() {
                    let small = standalone_out_set(&table, &hidden, &x).unwrap();
                    let large = standalone_out_set(&table, &bigger, &x).unwrap();
                    assert!(large.outputs.is_superset(&small.outputs));
                }
            }
        }
    }
}

#[test]
fn executions_always_satisfy_every_fd() {
    for seed in 0..40u64 {
        let wf = secureview_core::harness::gen_random_private_workflow(seed).unwrap();
        let rel = execute_workflow(&wf, None).unwrap();
        rel.check_fds(&wf).unwrap();
    }
}
