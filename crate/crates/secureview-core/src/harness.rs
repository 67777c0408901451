//! Instance generators for the example families and random workflows,
//! plus approximation-ratio measurement and reporting.

use std::collections::BTreeSet;
use std::time::Instant;

use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::error::Error;
use crate::model::{
    validate_workflow, AttributeDef, Behavior, Costs, ModuleDef, ModuleKind, Workflow, WorkflowDef,
};
use crate::rational::{rat_int, to_f64, Rational};
use crate::rng::SplitMix64;
use crate::solvers::{
    self, Method, RequirementList, Requirements, Solution,
};
use crate::standalone::RequirementForm;
use crate::Result;

/// A generated problem instance: workflow, per-module requirement lists
/// and a cost model.
#[derive(Debug, Clone)]
pub struct Instance {
    pub workflow: Workflow,
    pub requirements: Requirements,
    pub costs: Costs,
}

fn boolean(name: &str, cost: Rational) -> AttributeDef {
    AttributeDef::boolean(name, cost)
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

fn private(name: &str, inputs: &[&str], outputs: &[&str], behavior: Behavior) -> ModuleDef {
    ModuleDef {
        name: name.to_string(),
        kind: ModuleKind::Private,
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        behavior,
        privatization_cost: None,
    }
}

fn public(
    name: &str,
    inputs: &[&str],
    outputs: &[&str],
    behavior: Behavior,
    pvt: Rational,
) -> ModuleDef {
    ModuleDef {
        name: name.to_string(),
        kind: ModuleKind::Public,
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        behavior,
        privatization_cost: Some(pvt),
    }
}

/// The three-gate boolean sample workflow: `m1` computes
/// `a3 = a1 ∨ a2`, `a4 = ¬(a1 ∧ a2)`, `a5 = ¬(a1 ⊕ a2)`; `m2` and `m3`
/// are NAND gates over `(a3,a4)` and `(a4,a5)`. Unit attribute costs.
pub fn three_gate_sample() -> Workflow {
    let attributes = (1..=7)
        .map(|i| boolean(&format!("a{i}"), rat_int(1)))
        .collect();
    let modules = vec![
        private(
            "m1",
            &["a1", "a2"],
            &["a3", "a4", "a5"],
            Behavior::gates(&[
                ("a3", "or(a1,a2)"),
                ("a4", "not(and(a1,a2))"),
                ("a5", "not(xor(a1,a2))"),
            ]),
        ),
        private(
            "m2",
            &["a3", "a4"],
            &["a6"],
            Behavior::gates(&[("a6", "not(and(a3,a4))")]),
        ),
        private(
            "m3",
            &["a4", "a5"],
            &["a7"],
            Behavior::gates(&[("a7", "not(and(a4,a5))")]),
        ),
    ];
    validate_workflow(WorkflowDef {
        attributes,
        modules,
    })
    .expect("sample workflow is valid")
}

/// Restricts a workflow to a single module (over that module's
/// attributes), turning it into a standalone one-module workflow.
pub fn isolate_module(workflow: &Workflow, module: &str) -> Result<Workflow> {
    let idx = workflow.module(module)?;
    let keep: BTreeSet<usize> = workflow.attrs_of(idx).into_iter().collect();
    let attributes = workflow
        .attributes()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, a)| a.clone())
        .collect();
    validate_workflow(WorkflowDef {
        attributes,
        modules: vec![workflow.modules()[idx].clone()],
    })
}

/// The fan-out family: module `m` maps `a1` to `a2` (costs 1 and 1+ε),
/// `a2` feeds every `m_i` producing `b_i` (cost 1), and `mp` folds all
/// `b_i` into `c`. Every module accepts hiding one input or one output,
/// except `mp` which needs a hidden input.
pub fn gen_example41(n: usize, eps: &Rational) -> Result<Instance> {
    if n < 1 {
        return Err(Error::Precondition("family needs n >= 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let mut attributes = vec![
        boolean("a1", rat_int(1)),
        boolean("a2", rat_int(1) + eps),
    ];
    for i in 1..=n {
        attributes.push(boolean(&format!("b{i}"), rat_int(1)));
    }
    attributes.push(boolean("c", rat_int(1)));

    let mut modules = vec![private("m", &["a1"], &["a2"], Behavior::identity())];
    for i in 1..=n {
        modules.push(private(
            &format!("m{i}"),
            &["a2"],
            &[&format!("b{i}")],
            Behavior::identity(),
        ));
    }
    let b_names: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let b_refs: Vec<&str> = b_names.iter().map(|s| s.as_str()).collect();
    let fold = if n == 1 {
        "b1".to_string()
    } else {
        format!("xor({})", b_names.join(","))
    };
    modules.push(private("mp", &b_refs, &["c"], Behavior::gates(&[("c", &fold)])));

    let workflow = validate_workflow(WorkflowDef {
        attributes,
        modules,
    })?;
    let mut requirements = Requirements::default();
    requirements.modules.insert(
        "m".into(),
        RequirementList::Cardinality(vec![(0, 1), (1, 0)]),
    );
    for i in 1..=n {
        requirements.modules.insert(
            format!("m{i}"),
            RequirementList::Cardinality(vec![(0, 1), (1, 0)]),
        );
    }
    requirements
        .modules
        .insert("mp".into(), RequirementList::Cardinality(vec![(1, 0)]));
    let costs = Costs::from_workflow(&workflow);
    Ok(Instance {
        workflow,
        requirements,
        costs,
    })
}

/// Two one-one modules in a chain: `m1` is the identity on `k` bits
/// (`s* -> t*`), `m2` reverses them (`t* -> u*`). Unit costs.
pub fn gen_oneone_chain(k: usize) -> Result<Workflow> {
    if k < 1 {
        return Err(Error::Precondition("chain needs k >= 1".into()));
    }
    let mut attributes = Vec::new();
    for prefix in ["s", "t", "u"] {
        for i in 1..=k {
            attributes.push(boolean(&format!("{prefix}{i}"), rat_int(1)));
        }
    }
    let names = |prefix: &str| -> Vec<String> {
        (1..=k).map(|i| format!("{prefix}{i}")).collect()
    };
    let s = names("s");
    let t = names("t");
    let u = names("u");
    let modules = vec![
        private("m1", &as_refs(&s), &as_refs(&t), Behavior::identity()),
        private("m2", &as_refs(&t), &as_refs(&u), Behavior::bit_reversal()),
    ];
    validate_workflow(WorkflowDef {
        attributes,
        modules,
    })
}

/// A single majority gate over `2k` boolean inputs. Unit costs.
pub fn gen_majority_workflow(k: usize) -> Result<Workflow> {
    if k < 1 {
        return Err(Error::Precondition("majority needs k >= 1".into()));
    }
    let mut attributes: Vec<AttributeDef> = (1..=2 * k)
        .map(|i| boolean(&format!("i{i}"), rat_int(1)))
        .collect();
    attributes.push(boolean("o", rat_int(1)));
    let input_names: Vec<String> = (1..=2 * k).map(|i| format!("i{i}")).collect();
    let input_refs: Vec<&str> = input_names.iter().map(|s| s.as_str()).collect();
    let modules = vec![private("maj", &input_refs, &["o"], Behavior::majority())];
    validate_workflow(WorkflowDef {
        attributes,
        modules,
    })
}

/// The public-module counterexample chain: a public constant source
/// `msrc` feeds a private one-one module `mid` whose outputs feed a
/// public invertible one-one sink `msink`. Hiding `log Γ` inputs of
/// `mid` is standalone-safe yet workflow-unsafe while `msrc` is visible.
#[derive(Debug, Clone)]
pub struct PublicCounterexample {
    pub workflow: Workflow,
    pub requirements: Requirements,
    pub costs: Costs,
    /// log2(Γ)
    pub h: usize,
    /// The suggested hidden set: the first `h` inputs of `mid`.
    pub hidden_inputs: BTreeSet<String>,
}

pub fn gen_public_counterexample(k: usize, gamma: u64) -> Result<PublicCounterexample> {
    if k < 1 {
        return Err(Error::Precondition("counterexample needs k >= 1".into()));
    }
    if !gamma.is_power_of_two() {
        return Err(Error::Precondition("gamma must be a power of two".into()));
    }
    let h = gamma.trailing_zeros() as usize;
    if h > k {
        return Err(Error::Precondition(format!(
            "gamma {gamma} exceeds 2^{k}"
        )));
    }
    let mut attributes = vec![boolean("p", rat_int(1))];
    for prefix in ["c", "d", "e"] {
        for i in 1..=k {
            attributes.push(boolean(&format!("{prefix}{i}"), rat_int(1)));
        }
    }
    let names = |prefix: &str| -> Vec<String> {
        (1..=k).map(|i| format!("{prefix}{i}")).collect()
    };
    let c = names("c");
    let d = names("d");
    let e = names("e");

    let constant: Vec<&str> = (1..=k).map(|i| if i % 2 == 1 { "1" } else { "0" }).collect();
    let modules = vec![
        public(
            "msrc",
            &["p"],
            &as_refs(&c),
            Behavior::constant(&constant),
            rat_int(2),
        ),
        private(
            "mid",
            &as_refs(&c),
            &as_refs(&d),
            Behavior::one_one(1000 + k as u64),
        ),
        public(
            "msink",
            &as_refs(&d),
            &as_refs(&e),
            Behavior::one_one(2000 + k as u64),
            rat_int(2),
        ),
    ];
    let workflow = validate_workflow(WorkflowDef {
        attributes,
        modules,
    })?;

    // Safe options for the private one-one module at Γ = 2^h: any h
    // hidden inputs, or any h hidden outputs.
    let mut options: Vec<(BTreeSet<String>, BTreeSet<String>)> = Vec::new();
    for combo in combinations(&c, h) {
        options.push((combo.into_iter().collect(), BTreeSet::new()));
    }
    for combo in combinations(&d, h) {
        options.push((BTreeSet::new(), combo.into_iter().collect()));
    }
    let mut requirements = Requirements::default();
    requirements
        .modules
        .insert("mid".into(), RequirementList::Sets(options));
    let costs = Costs::from_workflow(&workflow);
    Ok(PublicCounterexample {
        workflow,
        requirements,
        costs,
        h,
        hidden_inputs: c[..h].iter().cloned().collect(),
    })
}

fn combinations(items: &[String], size: usize) -> Vec<Vec<String>> {
    if size > items.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + 1 <= items.len() - (size - i) {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A single private module with a uniformly random boolean truth table.
pub fn gen_random_module(seed: u64, n_in: usize, n_out: usize) -> Result<Workflow> {
    let mut rng = SplitMix64::new(seed);
    let mut attributes = Vec::new();
    for i in 1..=n_in {
        attributes.push(boolean(&format!("x{i}"), rat_int(1)));
    }
    for i in 1..=n_out {
        attributes.push(boolean(&format!("y{i}"), rat_int(1)));
    }
    let mut table = Vec::new();
    for row in 0..(1u32 << n_in) {
        let input: Vec<String> = (0..n_in)
            .map(|b| ((row >> (n_in - 1 - b)) & 1).to_string())
            .collect();
        let output: Vec<String> = (0..n_out)
            .map(|_| (rng.next_below(2)).to_string())
            .collect();
        table.push((input, output));
    }
    let ins: Vec<String> = (1..=n_in).map(|i| format!("x{i}")).collect();
    let outs: Vec<String> = (1..=n_out).map(|i| format!("y{i}")).collect();
    let modules = vec![private(
        "m",
        &ins.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        &outs.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        Behavior::table_from_values(table),
    )];
    validate_workflow(WorkflowDef {
        attributes,
        modules,
    })
}

/// A small random all-private workflow of 2-3 table modules over boolean
/// attributes, two initial inputs, arities at most 2. Suited to exact
/// world enumeration.
pub fn gen_random_private_workflow(seed: u64) -> Result<Workflow> {
    let mut rng = SplitMix64::new(seed);
    let n_modules = rng.next_range(2, 3);
    let mut attributes: Vec<AttributeDef> = Vec::new();
    let mut pool: Vec<String> = Vec::new();
    let mut n_initial = 0usize;
    let mut n_derived = 0usize;
    let mut modules = Vec::new();
    for m in 0..n_modules {
        let n_in = rng.next_range(1, 2);
        let mut input_pool = pool.clone();
        let mut inputs = Vec::new();
        for _ in 0..n_in {
            // Mint a fresh initial input (capped at two to keep the
            // execution relation small) or reuse an upstream attribute.
            let mint = n_initial < 2 && (input_pool.is_empty() || rng.next_below(3) == 0);
            if mint {
                n_initial += 1;
                let name = format!("x{n_initial}");
                attributes.push(boolean(&name, rat_int(1)));
                inputs.push(name);
            } else if input_pool.is_empty() {
                break;
            } else {
                let pick = rng.next_below(input_pool.len() as u64) as usize;
                inputs.push(input_pool.remove(pick));
            }
        }
        let n_out = rng.next_range(1, 2);
        let mut outputs = Vec::new();
        for _ in 0..n_out {
            n_derived += 1;
            let name = format!("v{n_derived}");
            attributes.push(boolean(&name, rat_int(1)));
            outputs.push(name);
        }
        let mut table = Vec::new();
        for row in 0..(1u32 << inputs.len()) {
            let input: Vec<String> = (0..inputs.len())
                .map(|b| ((row >> (inputs.len() - 1 - b)) & 1).to_string())
                .collect();
            let output: Vec<String> = (0..n_out)
                .map(|_| rng.next_below(2).to_string())
                .collect();
            table.push((input, output));
        }
        modules.push(private(
            &format!("m{}", m + 1),
            &inputs.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            &outputs.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            Behavior::table_from_values(table),
        ));
        pool.extend(inputs);
        pool.extend(outputs);
        pool.sort();
        pool.dedup();
    }
    validate_workflow(WorkflowDef {
        attributes,
        modules,
    })
}

/// Parameters for the random solver-instance generator.
#[derive(Debug, Clone)]
pub struct RandomParams {
    pub seed: u64,
    pub n_modules: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Data-sharing bound γ: an attribute feeds at most this many modules.
    pub gamma_bound: usize,
    pub l_max: usize,
    pub form: RequirementForm,
}

/// Deterministic random instance: a DAG of explicit-table boolean modules
/// with bounded data sharing, random costs in 1..=8, and non-redundant
/// random requirement lists of length at most `l_max`.
pub fn gen_random_instance(params: &RandomParams) -> Result<Instance> {
    if params.n_modules < 1
        || params.max_inputs < 1
        || params.max_inputs > 4
        || params.max_outputs < 1
        || params.gamma_bound < 1
        || params.l_max < 1
    {
        return Err(Error::Precondition(
            "unsatisfiable random-instance parameters".into(),
        ));
    }
    let mut rng = SplitMix64::new(params.seed);
    let mut attributes: Vec<AttributeDef> = Vec::new();
    let mut consumers: Vec<usize> = Vec::new(); // per attribute
    let mut pool: Vec<usize> = Vec::new();
    let fresh = |attributes: &mut Vec<AttributeDef>,
                     consumers: &mut Vec<usize>,
                     rng: &mut SplitMix64|
     -> usize {
        let idx = attributes.len();
        let cost = rat_int(rng.next_range(1, 8) as i64);
        attributes.push(boolean(&format!("d{}", idx + 1), cost));
        consumers.push(0);
        idx
    };

    let mut modules = Vec::new();
    for m in 0..params.n_modules {
        let n_in = rng.next_range(1, params.max_inputs);
        let mut inputs: Vec<usize> = Vec::new();
        for _ in 0..n_in {
            let available: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|&a| consumers[a] < params.gamma_bound && !inputs.contains(&a))
                .collect();
            // Half the picks reuse an existing attribute to create data
            // flow; the rest are fresh initial inputs.
            let reuse = !available.is_empty() && rng.next_below(2) == 0;
            let attr = if reuse {
                available[rng.next_below(available.len() as u64) as usize]
            } else {
                let a = fresh(&mut attributes, &mut consumers, &mut rng);
                pool.push(a);
                a
            };
            consumers[attr] += 1;
            inputs.push(attr);
        }
        let n_out = rng.next_range(1, params.max_outputs);
        let mut outputs = Vec::new();
        for _ in 0..n_out {
            let a = fresh(&mut attributes, &mut consumers, &mut rng);
            pool.push(a);
            outputs.push(a);
        }
        let mut table = Vec::new();
        for row in 0..(1u32 << inputs.len()) {
            let input: Vec<String> = (0..inputs.len())
                .map(|b| ((row >> (inputs.len() - 1 - b)) & 1).to_string())
                .collect();
            let output: Vec<String> = (0..n_out)
                .map(|_| rng.next_below(2).to_string())
                .collect();
            table.push((input, output));
        }
        let in_names: Vec<String> = inputs
            .iter()
            .map(|&a| attributes[a].name.clone())
            .collect();
        let out_names: Vec<String> = outputs
            .iter()
            .map(|&a| attributes[a].name.clone())
            .collect();
        modules.push(private(
            &format!("m{}", m + 1),
            &in_names.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            &out_names.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            Behavior::table_from_values(table),
        ));
    }
    let workflow = validate_workflow(WorkflowDef {
        attributes,
        modules,
    })?;
    debug_assert!(workflow.data_sharing_degree() <= params.gamma_bound);

    let mut requirements = Requirements::default();
    for (m, module) in workflow.modules().iter().enumerate() {
        let n_in = workflow.inputs_of(m).len();
        let n_out = workflow.outputs_of(m).len();
        let targets = rng.next_range(1, params.l_max);
        let list = match params.form {
            RequirementForm::Cardinality => {
                let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
                for _ in 0..targets {
                    let alpha = rng.next_range(0, n_in);
                    let beta = rng.next_range(0, n_out);
                    if (alpha, beta) != (0, 0) {
                        pairs.insert((alpha, beta));
                    }
                }
                if pairs.is_empty() {
                    pairs.insert((1, 0));
                }
                let minimal: Vec<(usize, usize)> = pairs
                    .iter()
                    .filter(|&&(a, b)| {
                        !pairs
                            .iter()
                            .any(|&(a2, b2)| (a2, b2) != (a, b) && a2 <= a && b2 <= b)
                    })
                    .copied()
                    .collect();
                RequirementList::Cardinality(minimal)
            }
            RequirementForm::Set => {
                let attrs = workflow.attrs_of(m);
                let mut options: Vec<BTreeSet<String>> = Vec::new();
                for _ in 0..targets {
                    let mut set = BTreeSet::new();
                    for &a in &attrs {
                        if rng.next_below(3) == 0 {
                            set.insert(workflow.attributes()[a].name.clone());
                        }
                    }
                    if set.is_empty() {
                        let pick = attrs[rng.next_below(attrs.len() as u64) as usize];
                        set.insert(workflow.attributes()[pick].name.clone());
                    }
                    options.push(set);
                }
                // Non-redundant: drop options whose union contains another.
                let minimal: Vec<BTreeSet<String>> = options
                    .iter()
                    .enumerate()
                    .filter(|(i, set)| {
                        !options.iter().enumerate().any(|(j, other)| {
                            other.is_subset(set) && (other != *set || j < *i)
                        })
                    })
                    .map(|(_, set)| set.clone())
                    .collect();
                let ins: BTreeSet<String> = workflow
                    .inputs_of(m)
                    .iter()
                    .map(|&a| workflow.attributes()[a].name.clone())
                    .collect();
                RequirementList::Sets(
                    minimal
                        .into_iter()
                        .map(|set| {
                            let hide_in: BTreeSet<String> =
                                set.iter().filter(|a| ins.contains(*a)).cloned().collect();
                            let hide_out: BTreeSet<String> =
                                set.into_iter().filter(|a| !ins.contains(a)).collect();
                            (hide_in, hide_out)
                        })
                        .collect(),
                )
            }
        };
        requirements.modules.insert(module.name.clone(), list);
    }
    let costs = Costs::from_workflow(&workflow);
    Ok(Instance {
        workflow,
        requirements,
        costs,
    })
}

/// Covering-shaped instance: a hub module `z` emits one attribute per
/// subset; each element module needs one of the subsets containing it
/// hidden. Data sharing is unbounded, which is exactly what defeats the
/// greedy baseline.
pub fn gen_setcover_shape(seed: u64, n_elems: usize, n_sets: usize) -> Result<Instance> {
    if n_elems < 1 || n_sets < 1 {
        return Err(Error::Precondition("covering shape needs elements and sets".into()));
    }
    let mut rng = SplitMix64::new(seed);
    // Membership: every element joins one random set, then extras.
    let mut members: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_sets];
    for e in 0..n_elems {
        members[rng.next_below(n_sets as u64) as usize].insert(e);
        for (s, set) in members.iter_mut().enumerate() {
            if rng.next_below(3) == 0 && s < n_sets {
                set.insert(e);
            }
        }
    }
    let mut attributes = vec![boolean("bs", rat_int(1))];
    for s in 1..=n_sets {
        attributes.push(boolean(&format!("a{s}"), rat_int(1)));
    }
    for e in 1..=n_elems {
        attributes.push(boolean(&format!("b{e}"), rat_int(1)));
    }
    let a_names: Vec<String> = (1..=n_sets).map(|s| format!("a{s}")).collect();
    let mut gates: Vec<(String, String)> = Vec::new();
    for (s, name) in a_names.iter().enumerate() {
        let expr = if s % 2 == 0 { "bs" } else { "not(bs)" };
        gates.push((name.clone(), expr.to_string()));
    }
    let gate_refs: Vec<(&str, &str)> = gates
        .iter()
        .map(|(a, e)| (a.as_str(), e.as_str()))
        .collect();
    let mut modules = vec![private(
        "z",
        &["bs"],
        &a_names.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        Behavior::gates(&gate_refs),
    )];
    for e in 0..n_elems {
        let feeding: Vec<String> = (0..n_sets)
            .filter(|&s| members[s].contains(&e))
            .map(|s| format!("a{}", s + 1))
            .collect();
        let out = format!("b{}", e + 1);
        let expr = if feeding.len() == 1 {
            feeding[0].clone()
        } else {
            format!("xor({})", feeding.join(","))
        };
        modules.push(private(
            &format!("f{}", e + 1),
            &feeding.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            &[out.as_str()],
            Behavior::gates(&[(out.as_str(), expr.as_str())]),
        ));
    }
    let workflow = validate_workflow(WorkflowDef {
        attributes,
        modules,
    })?;
    let mut requirements = Requirements::default();
    requirements
        .modules
        .insert("z".into(), RequirementList::Cardinality(vec![(0, 1)]));
    for e in 1..=n_elems {
        requirements
            .modules
            .insert(format!("f{e}"), RequirementList::Cardinality(vec![(1, 0)]));
    }
    let costs = Costs::from_workflow(&workflow);
    Ok(Instance {
        workflow,
        requirements,
        costs,
    })
}

/// One line of a comparison report.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub instance: String,
    pub method: Method,
    pub seed: Option<u64>,
    pub cost: Rational,
    /// cost / exact cost, when the exact baseline is available.
    pub ratio: Option<Rational>,
    pub feasible: bool,
    pub millis: u128,
}

#[derive(Debug, Clone, Default)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub errors: Vec<String>,
}

impl ComparisonReport {
    /// `instance,method,cost_num,cost_den,ratio,feasible,millis`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,method,cost_num,cost_den,ratio,feasible,millis\n");
        for row in &self.rows {
            let nd = crate::rational::NumDen::from_rational(&row.cost)
                .unwrap_or(crate::rational::NumDen { num: 0, den: 1 });
            let ratio = row
                .ratio
                .as_ref()
                .map(|r| format!("{:.6}", to_f64(r)))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.instance, row.method, nd.num, nd.den, ratio, row.feasible, row.millis
            ));
        }
        out
    }

    /// Max and mean ratio per method, in deterministic order.
    pub fn summary(&self) -> String {
        let mut methods: Vec<Method> = self.rows.iter().map(|r| r.method).collect();
        methods.sort();
        methods.dedup();
        let mut out = String::new();
        for method in methods {
            let ratios: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| r.method == method)
                .filter_map(|r| r.ratio.as_ref().map(to_f64))
                .collect();
            let feasible = self
                .rows
                .iter()
                .filter(|r| r.method == method)
                .all(|r| r.feasible);
            if ratios.is_empty() {
                out.push_str(&format!("{method}: all runs feasible={feasible}\n"));
            } else {
                let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
                let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
                out.push_str(&format!(
                    "{method}: max ratio {max:.4}, mean ratio {mean:.4}, all feasible={feasible}\n"
                ));
            }
        }
        for err in &self.errors {
            out.push_str(&format!("error: {err}\n"));
        }
        out
    }
}

/// Runs every method on every instance and reports costs, ratios to the
/// exact baseline, feasibility and timings. Per-instance failures are
/// recorded and the run continues.
pub fn run_comparison(
    instances: &[(String, Instance)],
    methods: &[Method],
    seeds: &[u64],
    budget: &Budget,
) -> ComparisonReport {
    let mut report = ComparisonReport::default();
    for (name, instance) in instances {
        let exact_cost = if methods.contains(&Method::Exact) {
            match solvers::solve_exact(&instance.workflow, &instance.requirements, &instance.costs, budget)
            {
                Ok(sol) => Some(sol.cost.clone()),
                Err(e) => {
                    report.errors.push(format!("{name}/exact: {e}"));
                    None
                }
            }
        } else {
            None
        };
        for &method in methods {
            let runs: Vec<Option<u64>> = match method {
                Method::CardinalityRounding => seeds.iter().map(|&s| Some(s)).collect(),
                _ => vec![None],
            };
            for seed in runs {
                let started = Instant::now();
                let solved: Result<Solution> = match method {
                    Method::Exact => solvers::solve_exact(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                        budget,
                    ),
                    Method::CardinalityRounding => solvers::solve_cardinality_rounding(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                        seed.unwrap_or(0),
                        budget,
                    ),
                    Method::SetRounding => solvers::solve_set_rounding(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                        budget,
                    ),
                    Method::Greedy => solvers::solve_greedy_bounded(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                    ),
                    Method::GeneralSet => solvers::solve_general_set(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                        budget,
                    ),
                    Method::UnionStandalone => solvers::synthetic_reports_from_requirements(
                        &instance.workflow,
                        &instance.requirements,
                        &instance.costs,
                    )
                    .and_then(|reports| {
                        solvers::union_of_standalone(&instance.workflow, &reports, &instance.costs)
                    }),
                };
                let millis = started.elapsed().as_millis();
                match solved {
                    Ok(sol) => {
                        let ratio = exact_cost.as_ref().and_then(|e| {
                            if e.is_zero() {
                                None
                            } else {
                                Some(&sol.cost / e)
                            }
                        });
                        report.rows.push(ComparisonRow {
                            instance: name.clone(),
                            method,
                            seed,
                            cost: sol.cost,
                            ratio,
                            feasible: sol.feasible,
                            millis,
                        });
                    }
                    Err(e) => report.errors.push(format!("{name}/{method}: {e}")),
                }
            }
        }
    }
    report
}

#[allow(unused)]
fn _unused(r: &Rational) -> bool {
    r.is_one()
}
