//! Possible-world semantics: out-sets, safety checks for standalone
//! modules and workflows, flip-based certificate worlds, and world
//! counting.
//!
//! A possible world of a workflow relation `R` under a view is a relation
//! that agrees with `R` on every visible cell (row-aligned on the initial
//! input key), satisfies every module FD, and — for every *visible*
//! public module — still computes that module's function. Hiding a public
//! module's identity drops the third constraint for it.
//!
//! Out-set semantics follow the two definitions they implement:
//!
//! * standalone (existential): `y ∈ Out_{x,m}` iff some world contains a
//!   row with input `x` and output `y`;
//! * workflow (universal): `y ∈ Out_{x,W}` iff some world maps every row
//!   with input `x` to `y`. A world in which `x` does not occur at all
//!   satisfies the quantifier vacuously and therefore contributes the
//!   whole output range. This reading is what makes the compositional
//!   theorems sound in the presence of constant upstream modules.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::Error;
use crate::model::{domain_product, ModuleRelation, Relation, Value, Workflow};
use crate::Result;

/// Partition of the attributes into visible and hidden, plus the hidden
/// (privatized) public modules. Stored as the hidden sets; the visible
/// sets are derived.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct View {
    pub hidden_attributes: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub hidden_modules: BTreeSet<String>,
}

impl View {
    pub fn hide<I, S>(attrs: I) -> View
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        View {
            hidden_attributes: attrs.into_iter().map(Into::into).collect(),
            hidden_modules: BTreeSet::new(),
        }
    }

    pub fn with_hidden_modules<I, S>(mut self, modules: I) -> View
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.hidden_modules = modules.into_iter().map(Into::into).collect();
        self
    }

    /// Checks that all names exist and that hidden modules are public.
    pub fn validate(&self, workflow: &Workflow) -> Result<()> {
        for name in &self.hidden_attributes {
            workflow.attr(name)?;
        }
        for name in &self.hidden_modules {
            let idx = workflow.module(name)?;
            if !workflow.modules()[idx].is_public() {
                return Err(Error::Precondition(format!(
                    "module `{name}` is private; only public modules can be privatized"
                )));
            }
        }
        Ok(())
    }

    pub fn is_hidden(&self, attr: &str) -> bool {
        self.hidden_attributes.contains(attr)
    }

    pub fn visible_attrs(&self, workflow: &Workflow) -> BTreeSet<String> {
        workflow
            .attributes()
            .iter()
            .map(|a| a.name.clone())
            .filter(|a| !self.is_hidden(a))
            .collect()
    }

    /// Indices of visible public modules (the set `P`).
    pub fn visible_publics(&self, workflow: &Workflow) -> Vec<usize> {
        workflow
            .public_modules()
            .filter(|(_, m)| !self.hidden_modules.contains(&m.name))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Per-module privacy requirements Γ. Modules without an entry default to
/// the uniform value (or 1, which requires nothing).
#[derive(Debug, Clone)]
pub struct Gammas {
    uniform: u64,
    per_module: BTreeMap<String, u64>,
}

impl Gammas {
    pub fn uniform(gamma: u64) -> Self {
        Gammas {
            uniform: gamma,
            per_module: BTreeMap::new(),
        }
    }

    pub fn per_module(map: BTreeMap<String, u64>) -> Self {
        Gammas {
            uniform: 1,
            per_module: map,
        }
    }

    pub fn for_module(&self, name: &str) -> u64 {
        self.per_module.get(name).copied().unwrap_or(self.uniform)
    }
}

impl From<u64> for Gammas {
    fn from(gamma: u64) -> Self {
        Gammas::uniform(gamma)
    }
}

/// The possible outputs of one module input under a view, in token form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutSet {
    pub module: String,
    pub input: Vec<String>,
    pub outputs: BTreeSet<Vec<String>>,
}

impl OutSet {
    pub fn size(&self) -> usize {
        self.outputs.len()
    }
}

struct ModuleVisibility {
    vis_in_cols: Vec<usize>,
    vis_out_cols: Vec<usize>,
    hid_out_cols: Vec<usize>,
}

fn module_visibility(rel: &ModuleRelation, hidden: &BTreeSet<String>) -> ModuleVisibility {
    let mut v = ModuleVisibility {
        vis_in_cols: Vec::new(),
        vis_out_cols: Vec::new(),
        hid_out_cols: Vec::new(),
    };
    for (col, attr) in rel.attrs.iter().enumerate() {
        let is_hidden = hidden.contains(&attr.name);
        if col < rel.n_inputs {
            if !is_hidden {
                v.vis_in_cols.push(col);
            }
        } else if is_hidden {
            v.hid_out_cols.push(col);
        } else {
            v.vis_out_cols.push(col);
        }
    }
    v
}

fn require_realized(rel: &ModuleRelation, x: &[Value]) -> Result<()> {
    if x.len() != rel.n_inputs || rel.output_for(x).is_none() {
        return Err(Error::InputNotRealized(
            x.iter().map(|v| format!("#{v}")).collect(),
        ));
    }
    Ok(())
}

/// Distinct visible-output patterns over inputs that agree with `x` on the
/// visible input attributes.
fn visible_patterns(
    rel: &ModuleRelation,
    vis: &ModuleVisibility,
    x: &[Value],
) -> BTreeSet<Vec<Value>> {
    let mut patterns = BTreeSet::new();
    for row in &rel.rows {
        if vis.vis_in_cols.iter().all(|&c| row[c] == x[c]) {
            patterns.insert(vis.vis_out_cols.iter().map(|&c| row[c]).collect());
        }
    }
    patterns
}

/// `|Out_{x,m}|` under the view hiding `hidden`: the number of distinct
/// visible output patterns of visible-input-consistent rows, times the
/// product of the hidden output domains.
pub fn standalone_out_size(
    rel: &ModuleRelation,
    hidden: &BTreeSet<String>,
    x: &[Value],
) -> Result<u128> {
    require_realized(rel, x)?;
    let vis = module_visibility(rel, hidden);
    let patterns = visible_patterns(rel, &vis, x);
    let completions: u128 = vis
        .hid_out_cols
        .iter()
        .map(|&c| rel.attrs[c].domain.len() as u128)
        .product();
    Ok(patterns.len() as u128 * completions)
}

/// Materialized `Out_{x,m}`: every visible-consistent output of a
/// visible-consistent input, extended over all hidden-output completions.
pub fn standalone_out_set(
    rel: &ModuleRelation,
    hidden: &BTreeSet<String>,
    x: &[Value],
) -> Result<OutSet> {
    require_realized(rel, x)?;
    let vis = module_visibility(rel, hidden);
    let patterns = visible_patterns(rel, &vis, x);
    let completions: u128 = vis
        .hid_out_cols
        .iter()
        .map(|&c| rel.attrs[c].domain.len() as u128)
        .product();
    let total = patterns.len() as u128 * completions;
    let cap = Budget::default().max_out_tuples;
    if total > u128::from(cap) {
        return Err(Error::BudgetExceeded(format!(
            "out-set has {total} tuples (materialization limit {cap})"
        )));
    }

    let n_out = rel.attrs.len() - rel.n_inputs;
    let hidden_sizes: Vec<u64> = vis
        .hid_out_cols
        .iter()
        .map(|&c| rel.attrs[c].domain.len() as u64)
        .collect();
    let mut outputs = BTreeSet::new();
    for pattern in &patterns {
        for completion in domain_product(&hidden_sizes) {
            let mut y = vec![0 as Value; n_out];
            for (&c, &v) in vis.vis_out_cols.iter().zip(pattern) {
                y[c - rel.n_inputs] = v;
            }
            for (&c, &v) in vis.hid_out_cols.iter().zip(&completion) {
                y[c - rel.n_inputs] = v;
            }
            outputs.insert(rel.tokens_of(&y, rel.n_inputs));
        }
    }
    Ok(OutSet {
        module: rel.module.clone(),
        input: rel.tokens_of(x, 0),
        outputs,
    })
}

/// Γ-standalone-privacy: every realized input keeps at least Γ possible
/// outputs.
pub fn is_standalone_safe(
    rel: &ModuleRelation,
    hidden: &BTreeSet<String>,
    gamma: u64,
) -> Result<bool> {
    if gamma == 0 {
        return Err(Error::Precondition("gamma must be at least 1".into()));
    }
    for x in rel.realized_inputs() {
        if standalone_out_size(rel, hidden, &x)? < u128::from(gamma) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum out-set size over all realized inputs, with the input
/// attaining it.
pub fn standalone_min_out(
    rel: &ModuleRelation,
    hidden: &BTreeSet<String>,
) -> Result<(u128, Vec<Value>)> {
    let mut best: Option<(u128, Vec<Value>)> = None;
    for x in rel.realized_inputs() {
        let size = standalone_out_size(rel, hidden, &x)?;
        if best.as_ref().map(|(b, _)| size < *b).unwrap_or(true) {
            best = Some((size, x));
        }
    }
    best.ok_or_else(|| Error::Precondition("module relation has no rows".into()))
}

/// Streaming enumeration of possible worlds, row-aligned with the base
/// relation: row `i` of every world agrees with row `i` of `R` on all
/// visible cells; hidden cells range over their domains subject to the
/// FDs and to the visible public modules recomputing their function.
struct WorldScan<'a> {
    workflow: &'a Workflow,
    base: &'a Relation,
    hidden_cols: Vec<usize>,
    visible_publics: Vec<usize>,
}

impl<'a> WorldScan<'a> {
    fn new(
        workflow: &'a Workflow,
        relation: &'a Relation,
        view: &View,
        budget: &Budget,
    ) -> Result<Self> {
        view.validate(workflow)?;
        check_full_relation(workflow, relation)?;
        let hidden_cols: Vec<usize> = (0..workflow.attributes().len())
            .filter(|&a| view.is_hidden(&workflow.attributes()[a].name))
            .collect();
        let cells = relation.rows.len() as u64 * hidden_cols.len() as u64;
        if cells > budget.max_hidden_cells {
            return Err(Error::BudgetExceeded(format!(
                "{cells} hidden cells exceed the enumeration budget of {}",
                budget.max_hidden_cells
            )));
        }
        let mut candidates: u128 = 1;
        for _row in &relation.rows {
            for &c in &hidden_cols {
                candidates = candidates.saturating_mul(u128::from(workflow.domain_size(c)));
                if candidates > u128::from(budget.max_world_candidates) {
                    return Err(Error::BudgetExceeded(format!(
                        "candidate worlds exceed the enumeration budget of {}",
                        budget.max_world_candidates
                    )));
                }
            }
        }
        Ok(WorldScan {
            workflow,
            base: relation,
            hidden_cols,
            visible_publics: view.visible_publics(workflow),
        })
    }

    /// Row `r` is consistent with rows before it: FDs hold pairwise and
    /// visible public modules compute their declared function on row `r`.
    fn row_consistent(&self, r: usize, rows: &[Vec<Value>]) -> bool {
        let wf = self.workflow;
        for m in 0..wf.modules().len() {
            let ins = wf.inputs_of(m);
            let outs = wf.outputs_of(m);
            for s in 0..r {
                if ins.iter().all(|&a| rows[s][a] == rows[r][a])
                    && !outs.iter().all(|&a| rows[s][a] == rows[r][a])
                {
                    return false;
                }
            }
        }
        for &m in &self.visible_publics {
            let input: Vec<Value> = wf.inputs_of(m).iter().map(|&a| rows[r][a]).collect();
            let expected = wf.eval_module(m, &input);
            if !wf
                .outputs_of(m)
                .iter()
                .zip(&expected)
                .all(|(&a, &v)| rows[r][a] == v)
            {
                return false;
            }
        }
        true
    }

    fn for_each_world(&self, f: &mut dyn FnMut(&[Vec<Value>])) -> u64 {
        let mut rows = self.base.rows.clone();
        let mut accepted = 0u64;
        self.scan_row(0, &mut rows, &mut accepted, f);
        accepted
    }

    fn scan_row(
        &self,
        r: usize,
        rows: &mut Vec<Vec<Value>>,
        accepted: &mut u64,
        f: &mut dyn FnMut(&[Vec<Value>]),
    ) {
        if r == rows.len() {
            *accepted += 1;
            f(rows);
            return;
        }
        if self.hidden_cols.is_empty() {
            if self.row_consistent(r, rows) {
                self.scan_row(r + 1, rows, accepted, f);
            }
            return;
        }
        for &c in &self.hidden_cols {
            rows[r][c] = 0;
        }
        loop {
            if self.row_consistent(r, rows) {
                self.scan_row(r + 1, rows, accepted, f);
            }
            // Odometer over the hidden cells of this row.
            let mut k = self.hidden_cols.len();
            loop {
                if k == 0 {
                    break;
                }
                let c = self.hidden_cols[k - 1];
                if u64::from(rows[r][c]) + 1 < self.workflow.domain_size(c) {
                    rows[r][c] += 1;
                    break;
                }
                rows[r][c] = 0;
                k -= 1;
            }
            if k == 0 {
                break;
            }
        }
        for &c in &self.hidden_cols {
            rows[r][c] = self.base.rows[r][c];
        }
    }

    /// Worlds are multisets of rows; when two base rows share all visible
    /// values, distinct assignments can encode the same multiset.
    fn needs_dedup(&self) -> bool {
        let visible: Vec<usize> = (0..self.workflow.attributes().len())
            .filter(|c| !self.hidden_cols.contains(c))
            .collect();
        let mut seen = BTreeSet::new();
        self.base
            .rows
            .iter()
            .any(|row| !seen.insert(visible.iter().map(|&c| row[c]).collect::<Vec<_>>()))
    }
}

fn check_full_relation(workflow: &Workflow, relation: &Relation) -> Result<()> {
    let expected: Vec<&str> = workflow
        .attributes()
        .iter()
        .map(|a| a.name.as_str())
        .collect();
    let got: Vec<&str> = relation.attributes.iter().map(|s| s.as_str()).collect();
    if expected != got {
        return Err(Error::Precondition(
            "relation must span all workflow attributes in declaration order".into(),
        ));
    }
    relation.check_fds(workflow)
}

fn canonical_world(rows: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted
}

/// Every possible world, each with rows sorted lexicographically, in
/// deterministic order. Exceeding the budget is an error; callers must
/// use the certificate path instead.
pub fn enumerate_worlds_exact(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    budget: &Budget,
) -> Result<Vec<Relation>> {
    let scan = WorldScan::new(workflow, relation, view, budget)?;
    let mut worlds = BTreeSet::new();
    scan.for_each_world(&mut |rows| {
        worlds.insert(canonical_world(rows));
    });
    Ok(worlds
        .into_iter()
        .map(|rows| Relation {
            attributes: relation.attributes.clone(),
            rows,
        })
        .collect())
}

/// `|Worlds(R, V)|` by exact enumeration.
pub fn count_worlds(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    budget: &Budget,
) -> Result<u64> {
    let scan = WorldScan::new(workflow, relation, view, budget)?;
    if scan.needs_dedup() {
        let mut worlds = BTreeSet::new();
        scan.for_each_world(&mut |rows| {
            worlds.insert(canonical_world(rows));
        });
        Ok(worlds.len() as u64)
    } else {
        Ok(scan.for_each_world(&mut |_| {}))
    }
}

struct ModuleOuts {
    xs: Vec<Vec<Value>>,
    realized: Vec<BTreeSet<Vec<Value>>>,
    /// Some world has no row with this input.
    vacuous: Vec<bool>,
}

/// One streaming enumeration pass collecting, per module and per realized
/// input of the base relation, the outputs seen across worlds and whether
/// some world omits the input entirely.
pub struct OutAnalysis {
    pub worlds_examined: u64,
    modules: Vec<ModuleOuts>,
}

pub fn analyze_workflow_outs(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    budget: &Budget,
) -> Result<OutAnalysis> {
    let scan = WorldScan::new(workflow, relation, view, budget)?;
    let mut modules: Vec<ModuleOuts> = (0..workflow.modules().len())
        .map(|m| {
            let ins = workflow.inputs_of(m);
            let mut seen = BTreeSet::new();
            let mut xs = Vec::new();
            for row in &relation.rows {
                let x: Vec<Value> = ins.iter().map(|&a| row[a]).collect();
                if seen.insert(x.clone()) {
                    xs.push(x);
                }
            }
            let n = xs.len();
            ModuleOuts {
                xs,
                realized: vec![BTreeSet::new(); n],
                vacuous: vec![false; n],
            }
        })
        .collect();

    let worlds_examined = scan.for_each_world(&mut |rows| {
        for (m, outs) in modules.iter_mut().enumerate() {
            let ins = workflow.inputs_of(m);
            let out_cols = workflow.outputs_of(m);
            for (k, x) in outs.xs.iter().enumerate() {
                let mut found = false;
                for row in rows {
                    if ins.iter().zip(x).all(|(&a, &v)| row[a] == v) {
                        outs.realized[k]
                            .insert(out_cols.iter().map(|&a| row[a]).collect());
                        found = true;
                        break; // FD: all rows with this input agree
                    }
                }
                if !found {
                    outs.vacuous[k] = true;
                }
            }
        }
    });
    Ok(OutAnalysis {
        worlds_examined,
        modules,
    })
}

impl OutAnalysis {
    fn slot(&self, module: usize, x: &[Value]) -> Option<usize> {
        self.modules[module].xs.iter().position(|v| v == x)
    }

    /// Existential (standalone-definition) out-set: outputs realized for
    /// `x` in some world.
    pub fn realized_out(&self, module: usize, x: &[Value]) -> Option<&BTreeSet<Vec<Value>>> {
        self.slot(module, x)
            .map(|k| &self.modules[module].realized[k])
    }

    pub fn has_vacuous_world(&self, module: usize, x: &[Value]) -> Option<bool> {
        self.slot(module, x).map(|k| self.modules[module].vacuous[k])
    }

    /// Universal (workflow-definition) out-set size: when some world omits
    /// `x`, every output tuple qualifies vacuously.
    pub fn out_size(&self, workflow: &Workflow, module: usize, x: &[Value]) -> Option<u128> {
        self.slot(module, x).map(|k| {
            if self.modules[module].vacuous[k] {
                workflow
                    .outputs_of(module)
                    .iter()
                    .map(|&a| u128::from(workflow.domain_size(a)))
                    .product()
            } else {
                self.modules[module].realized[k].len() as u128
            }
        })
    }

    /// Minimum out-size over the realized inputs of a module, with the
    /// input attaining it. `None` when the module never runs.
    pub fn min_out(&self, workflow: &Workflow, module: usize) -> Option<(u128, Vec<Value>)> {
        let outs = &self.modules[module];
        let mut best: Option<(u128, Vec<Value>)> = None;
        for x in &outs.xs {
            let size = self.out_size(workflow, module, x).unwrap();
            if best.as_ref().map(|(b, _)| size < *b).unwrap_or(true) {
                best = Some((size, x.clone()));
            }
        }
        best
    }
}

/// `Out_{x,W}` by exact enumeration, materialized in token form.
pub fn workflow_out_set_exact(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    module_name: &str,
    x: &[Value],
    budget: &Budget,
) -> Result<OutSet> {
    let m = workflow.module(module_name)?;
    let analysis = analyze_workflow_outs(workflow, relation, view, budget)?;
    let Some(slot) = analysis.slot(m, x) else {
        return Err(Error::InputNotRealized(
            x.iter()
                .zip(workflow.inputs_of(m))
                .map(|(&v, &a)| workflow.token(a, v).to_string())
                .collect(),
        ));
    };
    let outs = &analysis.modules[m];
    let out_attrs = workflow.outputs_of(m);
    let mut outputs: BTreeSet<Vec<String>> = BTreeSet::new();
    let tokens = |y: &[Value]| -> Vec<String> {
        y.iter()
            .zip(out_attrs)
            .map(|(&v, &a)| workflow.token(a, v).to_string())
            .collect()
    };
    if outs.vacuous[slot] {
        let sizes: Vec<u64> = out_attrs.iter().map(|&a| workflow.domain_size(a)).collect();
        let total: u128 = sizes.iter().map(|&s| u128::from(s)).product();
        if total > u128::from(budget.max_out_tuples) {
            return Err(Error::BudgetExceeded(format!(
                "out-set has {total} tuples (materialization limit {})",
                budget.max_out_tuples
            )));
        }
        for y in domain_product(&sizes) {
            outputs.insert(tokens(&y));
        }
    } else {
        for y in &outs.realized[slot] {
            outputs.insert(tokens(y));
        }
    }
    Ok(OutSet {
        module: module_name.to_string(),
        input: x
            .iter()
            .zip(workflow.inputs_of(m))
            .map(|(&v, &a)| workflow.token(a, v).to_string())
            .collect(),
        outputs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    Exact,
    Compositional,
    /// Per-module standalone semantics (the SafeView decision problem).
    Standalone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Safe,
    Unsafe,
    SafeByTheorem,
    /// Compositional preconditions unmet; explicitly not a safety verdict.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleWitness {
    pub module: String,
    pub min_out_size: u64,
    pub witness_input: Vec<String>,
}

/// Result of a workflow safety check, serializable as the certificate
/// JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SafetyCertificate {
    pub verdict: Verdict,
    pub mode: CheckMode,
    pub per_module: Vec<ModuleWitness>,
    pub worlds_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SafetyCertificate {
    pub fn is_safe(&self) -> bool {
        matches!(self.verdict, Verdict::Safe | Verdict::SafeByTheorem)
    }
}

/// Γ-workflow-privacy check.
///
/// Exact mode enumerates possible worlds and reports `safe`/`unsafe` with
/// a per-module minimum out-size and witness input. Compositional mode
/// applies the union theorem — every private module's hidden restriction
/// must be standalone-safe and every visible public module fully visible
/// — and reports `safe-by-theorem`; when its preconditions fail it
/// reports `not-applicable`, never a safety verdict.
pub fn is_workflow_safe(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    gammas: &Gammas,
    mode: CheckMode,
    budget: &Budget,
) -> Result<SafetyCertificate> {
    match mode {
        CheckMode::Exact => {
            let analysis = analyze_workflow_outs(workflow, relation, view, budget)?;
            let mut per_module = Vec::new();
            let mut safe = true;
            for (m, module) in workflow.modules().iter().enumerate() {
                if module.is_public() {
                    continue;
                }
                let gamma = gammas.for_module(&module.name);
                let Some((min, witness)) = analysis.min_out(workflow, m) else {
                    continue;
                };
                if min < u128::from(gamma) {
                    safe = false;
                }
                per_module.push(ModuleWitness {
                    module: module.name.clone(),
                    min_out_size: u64::try_from(min).unwrap_or(u64::MAX),
                    witness_input: witness
                        .iter()
                        .zip(workflow.inputs_of(m))
                        .map(|(&v, &a)| workflow.token(a, v).to_string())
                        .collect(),
                });
            }
            Ok(SafetyCertificate {
                verdict: if safe { Verdict::Safe } else { Verdict::Unsafe },
                mode,
                per_module,
                worlds_examined: analysis.worlds_examined,
                reason: None,
            })
        }
        CheckMode::Compositional => {
            view.validate(workflow)?;
            check_full_relation(workflow, relation)?;
            let not_applicable = |reason: String| SafetyCertificate {
                verdict: Verdict::NotApplicable,
                mode,
                per_module: Vec::new(),
                worlds_examined: 0,
                reason: Some(reason),
            };
            for &m in &view.visible_publics(workflow) {
                let hidden_attr = workflow.attrs_of(m).into_iter().find(|&a| {
                    view.is_hidden(&workflow.attributes()[a].name)
                });
                if let Some(a) = hidden_attr {
                    return Ok(not_applicable(format!(
                        "visible public module `{}` has hidden attribute `{}`",
                        workflow.modules()[m].name,
                        workflow.attributes()[a].name
                    )));
                }
            }
            let mut per_module = Vec::new();
            for (m, module) in workflow.modules().iter().enumerate() {
                if module.is_public() {
                    continue;
                }
                let gamma = gammas.for_module(&module.name);
                let table = ModuleRelation::from_behavior(workflow, m, budget.max_table_rows)?;
                let hidden_i: BTreeSet<String> = table
                    .attrs
                    .iter()
                    .map(|a| a.name.clone())
                    .filter(|n| view.is_hidden(n))
                    .collect();
                let (min, witness) = standalone_min_out(&table, &hidden_i)?;
                if min < u128::from(gamma) {
                    return Ok(not_applicable(format!(
                        "hidden restriction of module `{}` is not standalone-safe at gamma {gamma}",
                        module.name
                    )));
                }
                per_module.push(ModuleWitness {
                    module: module.name.clone(),
                    min_out_size: u64::try_from(min).unwrap_or(u64::MAX),
                    witness_input: table.tokens_of(&witness, 0),
                });
            }
            Ok(SafetyCertificate {
                verdict: Verdict::SafeByTheorem,
                mode,
                per_module,
                worlds_examined: 0,
            reason: None,
            })
        }
    }
}

/// Per-module standalone safety of a view: every private module's own
/// relation (its full behavior table) must keep at least Γ possible
/// outputs under the view restricted to its attributes.
///
/// This is the standalone notion, with its existential quantifier —
/// hiding every input of a module is *unsafe* here whenever fewer than Γ
/// distinct outputs remain visible, even though the workflow notion may
/// accept the same view through worlds that omit the input.
pub fn check_standalone_view(
    workflow: &Workflow,
    view: &View,
    gammas: &Gammas,
    budget: &Budget,
) -> Result<SafetyCertificate> {
    view.validate(workflow)?;
    let mut per_module = Vec::new();
    let mut safe = true;
    for (m, module) in workflow.modules().iter().enumerate() {
        if module.is_public() {
            continue;
        }
        let gamma = gammas.for_module(&module.name);
        let table = ModuleRelation::from_behavior(workflow, m, budget.max_table_rows)?;
        let hidden: BTreeSet<String> = table
            .attrs
            .iter()
            .map(|a| a.name.clone())
            .filter(|n| view.is_hidden(n))
            .collect();
        let (min, witness) = standalone_min_out(&table, &hidden)?;
        if min < u128::from(gamma) {
            safe = false;
        }
        per_module.push(ModuleWitness {
            module: module.name.clone(),
            min_out_size: u64::try_from(min).unwrap_or(u64::MAX),
            witness_input: table.tokens_of(&witness, 0),
        });
    }
    Ok(SafetyCertificate {
        verdict: if safe { Verdict::Safe } else { Verdict::Unsafe },
        mode: CheckMode::Standalone,
        per_module,
        worlds_examined: 0,
        reason: None,
    })
}

/// A pair of tuples over a designated module's attributes, agreeing on
/// every visible one; flipping swaps their values attribute-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipPair {
    pub attrs: Vec<String>,
    pub p: Vec<Value>,
    pub q: Vec<Value>,
}

/// Attribute-wise swap: positions of `x` named in the pair move `p[a] ->
/// q[a]`, `q[a] -> p[a]`, all other values unchanged. An involution.
pub fn flip_tuple(pair: &FlipPair, attrs: &[String], x: &[Value]) -> Vec<Value> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            match pair.attrs.iter().position(|a| *a == attrs[i]) {
                Some(k) if v == pair.p[k] => pair.q[k],
                Some(k) if v == pair.q[k] => pair.p[k],
                _ => v,
            }
        })
        .collect()
}

/// A certificate world: the flipped re-execution together with the public
/// modules whose function the flip redefined (they must be hidden).
#[derive(Debug, Clone)]
pub struct FlipWorld {
    pub relation: Relation,
    pub redefined_public: Vec<String>,
    pub pair: FlipPair,
}

/// Builds the possible world realizing `(x, y)` at `module_name` by
/// flipping every module against the witness pair and re-executing on the
/// initial inputs of `relation`.
///
/// Preconditions: `y` lies in the standalone out-set of the module's
/// realized relation under the view; every public module touched by the
/// flip is hidden; and the initial-input rows are closed under the flip
/// (full-product relations always are).
pub fn flip_world(
    workflow: &Workflow,
    relation: &Relation,
    view: &View,
    module_name: &str,
    x: &[Value],
    y: &[Value],
) -> Result<FlipWorld> {
    view.validate(workflow)?;
    check_full_relation(workflow, relation)?;
    let m = workflow.module(module_name)?;
    let rel_m = ModuleRelation::from_workflow_relation(workflow, relation, m)?;
    require_realized(&rel_m, x)?;
    let n_out = rel_m.attrs.len() - rel_m.n_inputs;
    if y.len() != n_out {
        return Err(Error::Precondition(format!(
            "output tuple has arity {}, expected {n_out}",
            y.len()
        )));
    }

    let hidden: BTreeSet<String> = rel_m
        .attrs
        .iter()
        .map(|a| a.name.clone())
        .filter(|n| view.is_hidden(n))
        .collect();
    let vis = module_visibility(&rel_m, &hidden);

    // Witness input x' that is visible-consistent with x and whose output
    // is visible-consistent with y; prefer x itself so that y = m(x)
    // degenerates to p = q and the world to R.
    let candidates = {
        let mut xs = rel_m.realized_inputs();
        if let Some(pos) = xs.iter().position(|v| v == x) {
            let own = xs.remove(pos);
            xs.insert(0, own);
        }
        xs
    };
    let witness = candidates.into_iter().find(|x_prime| {
        vis.vis_in_cols.iter().all(|&c| x_prime[c] == x[c]) && {
            let y_prime = rel_m.output_for(x_prime).unwrap();
            vis.vis_out_cols
                .iter()
                .all(|&c| y_prime[c - rel_m.n_inputs] == y[c - rel_m.n_inputs])
        }
    });
    let Some(x_prime) = witness else {
        return Err(Error::Precondition(format!(
            "({x:?}, {y:?}) is not certified by the standalone out-set of `{module_name}`"
        )));
    };
    let y_prime = rel_m.output_for(&x_prime).unwrap().to_vec();

    let attrs = rel_m.attr_names();
    let mut p: Vec<Value> = x.to_vec();
    p.extend_from_slice(y);
    let mut q: Vec<Value> = x_prime.clone();
    q.extend_from_slice(&y_prime);
    let pair = FlipPair { attrs, p, q };

    // Public modules touched by a flipped attribute must be hidden.
    let flipped: BTreeSet<&String> = pair
        .attrs
        .iter()
        .zip(pair.p.iter().zip(&pair.q))
        .filter(|(_, (pv, qv))| pv != qv)
        .map(|(a, _)| a)
        .collect();
    let mut redefined_public = Vec::new();
    for (i, module) in workflow.public_modules() {
        let touched = workflow
            .attrs_of(i)
            .iter()
            .any(|&a| flipped.contains(&workflow.attributes()[a].name));
        if touched {
            if !view.hidden_modules.contains(&module.name) {
                return Err(Error::Precondition(format!(
                    "flip redefines visible public module `{}`",
                    module.name
                )));
            }
            redefined_public.push(module.name.clone());
        }
    }

    // The flip permutes initial inputs; the base relation must be closed
    // under it or the flipped execution leaves the view.
    let init = workflow.initial_inputs();
    let init_names: Vec<String> = init
        .iter()
        .map(|&a| workflow.attributes()[a].name.clone())
        .collect();
    let init_rows: BTreeSet<Vec<Value>> = relation
        .rows
        .iter()
        .map(|row| init.iter().map(|&a| row[a]).collect())
        .collect();
    for row in &init_rows {
        let flipped_row = flip_tuple(&pair, &init_names, row);
        if !init_rows.contains(&flipped_row) {
            return Err(Error::Precondition(
                "initial inputs are not closed under the flip; supply the full domain product"
                    .into(),
            ));
        }
    }

    // Re-execute with every module m_j replaced by Flip ∘ m_j ∘ Flip.
    let width = workflow.attributes().len();
    let mut rows = Vec::with_capacity(relation.rows.len());
    for base_row in &relation.rows {
        let mut full = vec![0 as Value; width];
        for &a in init {
            full[a] = base_row[a];
        }
        for &j in workflow.topo_order() {
            let in_names: Vec<String> = workflow
                .inputs_of(j)
                .iter()
                .map(|&a| workflow.attributes()[a].name.clone())
                .collect();
            let out_names: Vec<String> = workflow
                .outputs_of(j)
                .iter()
                .map(|&a| workflow.attributes()[a].name.clone())
                .collect();
            let input: Vec<Value> = workflow.inputs_of(j).iter().map(|&a| full[a]).collect();
            let flipped_in = flip_tuple(&pair, &in_names, &input);
            let raw_out = workflow.eval_module(j, &flipped_in);
            let output = flip_tuple(&pair, &out_names, &raw_out);
            for (&a, &v) in workflow.outputs_of(j).iter().zip(&output) {
                full[a] = v;
            }
        }
        rows.push(full);
    }
    let world = Relation {
        attributes: relation.attributes.clone(),
        rows,
    };

    // Guaranteed by construction; kept as a hard check because the result
    // is used as a privacy certificate.
    let visible_cols: Vec<usize> = (0..width)
        .filter(|&a| !view.is_hidden(&workflow.attributes()[a].name))
        .collect();
    let project = |r: &Relation| -> Vec<Vec<Value>> {
        let mut rows: Vec<Vec<Value>> = r
            .rows
            .iter()
            .map(|row| visible_cols.iter().map(|&c| row[c]).collect())
            .collect();
        rows.sort_unstable();
        rows
    };
    if project(&world) != project(relation) {
        return Err(Error::Precondition(
            "flip world does not project to the base view".into(),
        ));
    }
    world.check_fds(workflow)?;

    Ok(FlipWorld {
        relation: world,
        redefined_public,
        pair,
    })
}
