//! Core data model: attributes, modules, workflows, execution relations
//! and cost models.
//!
//! Domain values are opaque string tokens with the order given by
//! `AttributeDef::domain`; internally a value is the index of its token.
//! Booleans are the tokens `"0"`, `"1"`.

mod behavior;

pub use behavior::{
    compile_behavior, eval_behavior, parse_gate_expr, Behavior, BuiltinKind, BuiltinParams,
    CompiledBehavior, GateExpr,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{self, Rational};
use crate::Result;

/// Index of a token within its attribute's domain.
pub type Value = u16;

/// An attribute: a named column with a finite ordered domain and the
/// penalty of hiding it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AttributeDef {
    pub name: String,
    pub domain: Vec<String>,
    #[serde(with = "crate::rational::serde_numden")]
    pub cost: Rational,
}

impl AttributeDef {
    pub fn boolean(name: &str, cost: Rational) -> Self {
        AttributeDef {
            name: name.to_string(),
            domain: vec!["0".into(), "1".into()],
            cost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    Private,
    Public,
}

/// A module: a total function from its input attributes to its output
/// attributes. Public modules additionally carry the cost of hiding
/// their identity.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModuleDef {
    pub name: String,
    pub kind: ModuleKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub behavior: Behavior,
    #[serde(
        default,
        with = "crate::rational::serde_numden_opt",
        skip_serializing_if = "Option::is_none"
    )]
    pub privatization_cost: Option<Rational>,
}

impl ModuleDef {
    pub fn is_public(&self) -> bool {
        matches!(self.kind, ModuleKind::Public)
    }
}

/// A workflow definition as read from a file: the attribute universe and
/// the modules. Edges are implied by shared attribute names.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WorkflowDef {
    pub attributes: Vec<AttributeDef>,
    pub modules: Vec<ModuleDef>,
}

/// A validated workflow with compiled behaviors, attribute/module indices
/// and a topological order. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Workflow {
    def: WorkflowDef,
    attr_index: BTreeMap<String, usize>,
    module_index: BTreeMap<String, usize>,
    topo_order: Vec<usize>,
    module_inputs: Vec<Vec<usize>>,
    module_outputs: Vec<Vec<usize>>,
    initial_inputs: Vec<usize>,
    compiled: Vec<CompiledBehavior>,
}

/// Validates a workflow definition. On success the workflow carries a
/// topological module order; on failure every violation found is
/// reported, each with the offending names.
pub fn validate_workflow(def: WorkflowDef) -> Result<Workflow> {
    let mut violations = Vec::new();

    let mut attr_index = BTreeMap::new();
    for (i, attr) in def.attributes.iter().enumerate() {
        if attr_index.insert(attr.name.clone(), i).is_some() {
            violations.push(format!("duplicate attribute `{}`", attr.name));
        }
        if attr.domain.is_empty() {
            violations.push(format!("attribute `{}` has an empty domain", attr.name));
        }
        if attr.domain.len() > usize::from(Value::MAX) {
            violations.push(format!("attribute `{}` domain too large", attr.name));
        }
        let distinct: BTreeSet<&String> = attr.domain.iter().collect();
        if distinct.len() != attr.domain.len() {
            violations.push(format!("attribute `{}` has duplicate domain tokens", attr.name));
        }
        if let Err(e) = rational::check_nonnegative(&attr.cost, "attribute cost") {
            violations.push(format!("attribute `{}`: {e}", attr.name));
        }
    }

    let mut module_index = BTreeMap::new();
    let mut module_inputs = Vec::with_capacity(def.modules.len());
    let mut module_outputs = Vec::with_capacity(def.modules.len());
    let mut producer: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, module) in def.modules.iter().enumerate() {
        if module_index.insert(module.name.clone(), i).is_some() {
            violations.push(format!("duplicate module `{}`", module.name));
        }
        let mut resolve = |names: &[String], role: &str| -> Vec<usize> {
            let mut seen = BTreeSet::new();
            let mut out = Vec::with_capacity(names.len());
            for name in names {
                match attr_index.get(name) {
                    Some(&idx) => {
                        if !seen.insert(idx) {
                            violations.push(format!(
                                "module `{}`: duplicate {role} attribute `{name}`",
                                module.name
                            ));
                        }
                        out.push(idx);
                    }
                    None => violations.push(format!(
                        "module `{}`: undefined attribute `{name}`",
                        module.name
                    )),
                }
            }
            out
        };
        let ins = resolve(&module.inputs, "input");
        let outs = resolve(&module.outputs, "output");
        for idx in &outs {
            if ins.contains(idx) {
                violations.push(format!(
                    "module `{}`: attribute `{}` is both input and output",
                    module.name, def.attributes[*idx].name
                ));
            }
            if let Some(prev) = producer.insert(*idx, i) {
                violations.push(format!(
                    "duplicate producer {}: modules `{}` and `{}`",
                    def.attributes[*idx].name, def.modules[prev].name, module.name
                ));
            }
        }
        match (module.is_public(), &module.privatization_cost) {
            (true, None) => violations.push(format!(
                "public module `{}` is missing privatization_cost",
                module.name
            )),
            (true, Some(c)) => {
                if let Err(e) = rational::check_nonnegative(c, "privatization cost") {
                    violations.push(format!("module `{}`: {e}", module.name));
                }
            }
            (false, Some(_)) => violations.push(format!(
                "private module `{}` must not declare privatization_cost",
                module.name
            )),
            (false, None) => {}
        }
        module_inputs.push(ins);
        module_outputs.push(outs);
    }

    // Every declared attribute must belong to some module.
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for list in module_inputs.iter().chain(module_outputs.iter()) {
        used.extend(list.iter().copied());
    }
    for (i, attr) in def.attributes.iter().enumerate() {
        if !used.contains(&i) {
            violations.push(format!(
                "attribute `{}` is not an input or output of any module",
                attr.name
            ));
        }
    }

    // Topological order over the implied data-flow edges (Kahn, stable by
    // module index so the order is deterministic).
    let n = def.modules.len();
    let mut indegree = vec![0usize; n];
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (consumer, ins) in module_inputs.iter().enumerate() {
        for attr in ins {
            if let Some(&prod) = producer.get(attr) {
                if successors[prod].insert(consumer) {
                    indegree[consumer] += 1;
                }
            }
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut topo_order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        topo_order.push(next);
        for &succ in &successors[next] {
            indegree[succ] -= 1;
            if indegree[succ] == 0 {
                ready.insert(succ);
            }
        }
    }
    if topo_order.len() != n {
        let stuck: Vec<&str> = (0..n)
            .filter(|i| !topo_order.contains(i))
            .map(|i| def.modules[i].name.as_str())
            .collect();
        violations.push(format!("cycle involving modules {}", stuck.join(", ")));
    }

    // Compile behaviors last so arity problems above are reported first.
    let mut compiled = Vec::with_capacity(n);
    if violations.is_empty() {
        for (i, module) in def.modules.iter().enumerate() {
            let ins: Vec<&AttributeDef> =
                module_inputs[i].iter().map(|&a| &def.attributes[a]).collect();
            let outs: Vec<&AttributeDef> =
                module_outputs[i].iter().map(|&a| &def.attributes[a]).collect();
            if let Some(c) =
                compile_behavior(&module.name, &module.behavior, &ins, &outs, &mut violations)
            {
                compiled.push(c);
            }
        }
    }

    if !violations.is_empty() {
        return Err(Error::InvalidWorkflow(violations));
    }

    let initial_inputs: Vec<usize> = (0..def.attributes.len())
        .filter(|i| used.contains(i) && !producer.contains_key(i))
        .collect();

    Ok(Workflow {
        def,
        attr_index,
        module_index,
        topo_order,
        module_inputs,
        module_outputs,
        initial_inputs,
        compiled,
    })
}

impl Workflow {
    pub fn def(&self) -> &WorkflowDef {
        &self.def
    }

    pub fn attributes(&self) -> &[AttributeDef] {
        &self.def.attributes
    }

    pub fn modules(&self) -> &[ModuleDef] {
        &self.def.modules
    }

    pub fn attr(&self, name: &str) -> Result<usize> {
        self.attr_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn module(&self, name: &str) -> Result<usize> {
        self.module_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownModule(name.to_string()))
    }

    /// Module indices in topological order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn inputs_of(&self, module: usize) -> &[usize] {
        &self.module_inputs[module]
    }

    pub fn outputs_of(&self, module: usize) -> &[usize] {
        &self.module_outputs[module]
    }

    /// Attribute indices (in declaration order) of `I_i ∪ O_i`.
    pub fn attrs_of(&self, module: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.module_inputs[module]
            .iter()
            .chain(&self.module_outputs[module])
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    /// Initial workflow inputs `I_0`: consumed by some module, produced by
    /// none.
    pub fn initial_inputs(&self) -> &[usize] {
        &self.initial_inputs
    }

    pub fn domain_size(&self, attr: usize) -> u64 {
        self.def.attributes[attr].domain.len() as u64
    }

    pub fn token(&self, attr: usize, value: Value) -> &str {
        &self.def.attributes[attr].domain[usize::from(value)]
    }

    pub fn value_of_token(&self, attr: usize, token: &str) -> Result<Value> {
        self.def.attributes[attr]
            .domain
            .iter()
            .position(|t| t == token)
            .map(|i| i as Value)
            .ok_or_else(|| Error::ValueOutsideDomain {
                attribute: self.def.attributes[attr].name.clone(),
                value: token.to_string(),
            })
    }

    pub fn public_modules(&self) -> impl Iterator<Item = (usize, &ModuleDef)> {
        self.def.modules.iter().enumerate().filter(|(_, m)| m.is_public())
    }

    /// Input radix of a module (domain sizes of its inputs, in order).
    pub fn input_radix(&self, module: usize) -> Vec<u64> {
        self.module_inputs[module]
            .iter()
            .map(|&a| self.domain_size(a))
            .collect()
    }

    /// Evaluates one module on an input tuple given in its input order.
    pub fn eval_module(&self, module: usize, input: &[Value]) -> Vec<Value> {
        eval_behavior(&self.compiled[module], input, &self.input_radix(module))
    }

    /// Maximum number of functional dependencies any attribute appears on
    /// the left-hand side of; the data-sharing degree γ.
    pub fn data_sharing_degree(&self) -> usize {
        (0..self.def.attributes.len())
            .map(|a| {
                self.module_inputs
                    .iter()
                    .filter(|ins| ins.contains(&a))
                    .count()
            })
            .max()
            .unwrap_or(0)
    }
}

/// A finite table of executions over a subset of the workflow attributes.
/// Values are domain indices; duplicate rows are allowed and kept in
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub attributes: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Relation {
    pub fn column_of(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Projection onto a set of attributes, keeping this relation's column
    /// order and all rows (duplicates retained in input order).
    pub fn project(&self, attrs: &BTreeSet<String>) -> Result<Relation> {
        for name in attrs {
            if !self.attributes.contains(name) {
                return Err(Error::UnknownAttribute(name.clone()));
            }
        }
        let cols: Vec<usize> = self
            .attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| attrs.contains(*a))
            .map(|(i, _)| i)
            .collect();
        Ok(Relation {
            attributes: cols.iter().map(|&i| self.attributes[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| cols.iter().map(|&i| row[i]).collect())
                .collect(),
        })
    }

    /// Rows as a set (for the comparisons that are set-based).
    pub fn row_set(&self) -> BTreeSet<Vec<Value>> {
        self.rows.iter().cloned().collect()
    }

    /// Checks every module FD `I_i -> O_i` whose attributes all occur in
    /// this relation: rows agreeing on the inputs must agree on the
    /// outputs.
    pub fn check_fds(&self, workflow: &Workflow) -> Result<()> {
        for (i, module) in workflow.modules().iter().enumerate() {
            let names = |attrs: &[usize]| -> Option<Vec<usize>> {
                attrs
                    .iter()
                    .map(|&a| {
                        let name = &workflow.attributes()[a].name;
                        self.attributes.iter().position(|x| x == name)
                    })
                    .collect()
            };
            let (Some(in_cols), Some(out_cols)) = (
                names(workflow.inputs_of(i)),
                names(workflow.outputs_of(i)),
            ) else {
                continue;
            };
            let mut seen: BTreeMap<Vec<Value>, Vec<Value>> = BTreeMap::new();
            for row in &self.rows {
                let key: Vec<Value> = in_cols.iter().map(|&c| row[c]).collect();
                let val: Vec<Value> = out_cols.iter().map(|&c| row[c]).collect();
                if let Some(prev) = seen.get(&key) {
                    if *prev != val {
                        return Err(Error::Precondition(format!(
                            "functional dependency of module `{}` violated for input {key:?}",
                            module.name
                        )));
                    }
                } else {
                    seen.insert(key, val);
                }
            }
        }
        Ok(())
    }
}

/// Upper bound on rows when defaulting the initial-input relation to the
/// full domain product of `I_0`.
const MAX_DEFAULT_EXECUTIONS: u128 = 1 << 12;

/// Executes a workflow: one output row per initial-input row, modules
/// evaluated in topological order. When `initial_inputs` is `None` the
/// full domain product of `I_0` is used.
///
/// The result spans every workflow attribute in declaration order and
/// satisfies every module FD by construction.
pub fn execute_workflow(
    workflow: &Workflow,
    initial_inputs: Option<&Relation>,
) -> Result<Relation> {
    let init_attrs = workflow.initial_inputs();
    let init_rows: Vec<Vec<Value>> = match initial_inputs {
        Some(rel) => {
            let expected: BTreeSet<&str> = init_attrs
                .iter()
                .map(|&a| workflow.attributes()[a].name.as_str())
                .collect();
            let got: BTreeSet<&str> = rel.attributes.iter().map(|s| s.as_str()).collect();
            if expected != got {
                return Err(Error::Precondition(format!(
                    "initial inputs must cover exactly {expected:?}, got {got:?}"
                )));
            }
            let cols: Vec<usize> = init_attrs
                .iter()
                .map(|&a| rel.column_of(&workflow.attributes()[a].name))
                .collect::<Result<_>>()?;
            let mut seen = BTreeSet::new();
            let mut rows = Vec::with_capacity(rel.rows.len());
            for row in &rel.rows {
                let reordered: Vec<Value> = cols.iter().map(|&c| row[c]).collect();
                for (v, &a) in reordered.iter().zip(init_attrs) {
                    if u64::from(*v) >= workflow.domain_size(a) {
                        return Err(Error::ValueOutsideDomain {
                            attribute: workflow.attributes()[a].name.clone(),
                            value: format!("#{v}"),
                        });
                    }
                }
                if !seen.insert(reordered.clone()) {
                    return Err(Error::Precondition(format!(
                        "duplicate initial-input row {reordered:?}"
                    )));
                }
                rows.push(reordered);
            }
            rows
        }
        None => {
            let total: u128 = init_attrs
                .iter()
                .map(|&a| u128::from(workflow.domain_size(a)))
                .product();
            if total > MAX_DEFAULT_EXECUTIONS {
                return Err(Error::BudgetExceeded(format!(
                    "full initial-input product has {total} rows (limit {MAX_DEFAULT_EXECUTIONS})"
                )));
            }
            domain_product(
                &init_attrs
                    .iter()
                    .map(|&a| workflow.domain_size(a))
                    .collect::<Vec<_>>(),
            )
        }
    };

    let width = workflow.attributes().len();
    let mut rows = Vec::with_capacity(init_rows.len());
    for init in init_rows {
        let mut full = vec![0 as Value; width];
        for (v, &a) in init.iter().zip(init_attrs) {
            full[a] = *v;
        }
        for &m in workflow.topo_order() {
            let input: Vec<Value> = workflow.inputs_of(m).iter().map(|&a| full[a]).collect();
            let output = workflow.eval_module(m, &input);
            for (v, &a) in output.iter().zip(workflow.outputs_of(m)) {
                full[a] = *v;
            }
        }
        rows.push(full);
    }
    Ok(Relation {
        attributes: workflow
            .attributes()
            .iter()
            .map(|a| a.name.clone())
            .collect(),
        rows,
    })
}

/// All tuples over the given domain sizes, first position most
/// significant.
pub fn domain_product(sizes: &[u64]) -> Vec<Vec<Value>> {
    let mut rows = vec![Vec::new()];
    for &size in sizes {
        let mut next = Vec::with_capacity(rows.len() * size as usize);
        for row in &rows {
            for v in 0..size {
                let mut r = row.clone();
                r.push(v as Value);
                next.push(r);
            }
        }
        rows = next;
    }
    rows
}

/// A standalone module compiled to an indexed relation over `I ∪ O`
/// (inputs first). Satisfies the FD `I -> O` by construction.
#[derive(Debug, Clone)]
pub struct ModuleRelation {
    pub module: String,
    pub attrs: Vec<AttributeDef>,
    pub n_inputs: usize,
    pub rows: Vec<Vec<Value>>,
}

impl ModuleRelation {
    /// The module's full relation: one row per element of the input
    /// domain product.
    pub fn from_behavior(workflow: &Workflow, module: usize, max_rows: u64) -> Result<Self> {
        let def = &workflow.modules()[module];
        let radix = workflow.input_radix(module);
        let total: u128 = radix.iter().map(|&r| u128::from(r)).product();
        if total > u128::from(max_rows) {
            return Err(Error::BudgetExceeded(format!(
                "module `{}` table has {total} rows (limit {max_rows})",
                def.name
            )));
        }
        let rows = domain_product(&radix)
            .into_iter()
            .map(|input| {
                let mut row = input.clone();
                row.extend(workflow.eval_module(module, &input));
                row
            })
            .collect();
        Ok(ModuleRelation {
            module: def.name.clone(),
            attrs: attr_defs(workflow, module),
            n_inputs: workflow.inputs_of(module).len(),
            rows,
        })
    }

    /// The module's relation as realized inside a workflow relation:
    /// `π_{I∪O}(R)` with duplicates removed in first-occurrence order.
    pub fn from_workflow_relation(
        workflow: &Workflow,
        relation: &Relation,
        module: usize,
    ) -> Result<Self> {
        let def = &workflow.modules()[module];
        let cols: Vec<usize> = workflow
            .inputs_of(module)
            .iter()
            .chain(workflow.outputs_of(module))
            .map(|&a| relation.column_of(&workflow.attributes()[a].name))
            .collect::<Result<_>>()?;
        let mut seen = BTreeSet::new();
        let mut rows = Vec::new();
        for row in &relation.rows {
            let projected: Vec<Value> = cols.iter().map(|&c| row[c]).collect();
            if seen.insert(projected.clone()) {
                rows.push(projected);
            }
        }
        Ok(ModuleRelation {
            module: def.name.clone(),
            attrs: attr_defs(workflow, module),
            n_inputs: workflow.inputs_of(module).len(),
            rows,
        })
    }

    pub fn input_attrs(&self) -> &[AttributeDef] {
        &self.attrs[..self.n_inputs]
    }

    pub fn output_attrs(&self) -> &[AttributeDef] {
        &self.attrs[self.n_inputs..]
    }

    pub fn attr_names(&self) -> Vec<String> {
        self.attrs.iter().map(|a| a.name.clone()).collect()
    }

    /// `∏_{a ∈ O} |Δ_a|`: the range size an out-set can never exceed.
    pub fn output_domain_product(&self) -> u128 {
        self.output_attrs()
            .iter()
            .map(|a| a.domain.len() as u128)
            .product()
    }

    /// Distinct realized inputs, in row order.
    pub fn realized_inputs(&self) -> Vec<Vec<Value>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for row in &self.rows {
            let x = row[..self.n_inputs].to_vec();
            if seen.insert(x.clone()) {
                out.push(x);
            }
        }
        out
    }

    /// Output tuple for a realized input, if present.
    pub fn output_for(&self, input: &[Value]) -> Option<&[Value]> {
        self.rows
            .iter()
            .find(|row| &row[..self.n_inputs] == input)
            .map(|row| &row[self.n_inputs..])
    }

    pub fn tokens_of(&self, tuple: &[Value], offset: usize) -> Vec<String> {
        tuple
            .iter()
            .enumerate()
            .map(|(i, &v)| self.attrs[offset + i].domain[usize::from(v)].clone())
            .collect()
    }
}

fn attr_defs(workflow: &Workflow, module: usize) -> Vec<AttributeDef> {
    workflow
        .inputs_of(module)
        .iter()
        .chain(workflow.outputs_of(module))
        .map(|&a| workflow.attributes()[a].clone())
        .collect()
}

/// Penalties for hiding attributes and privatizing public modules. Always
/// covers every attribute and public module of its workflow.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub attribute_costs: BTreeMap<String, crate::rational::NumDen>,
    #[serde(default)]
    pub privatization_costs: BTreeMap<String, crate::rational::NumDen>,
}

/// Resolved cost model with rational values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Costs {
    pub attribute: BTreeMap<String, Rational>,
    pub privatization: BTreeMap<String, Rational>,
}

impl Costs {
    /// Costs as declared on the workflow itself.
    pub fn from_workflow(workflow: &Workflow) -> Self {
        Costs {
            attribute: workflow
                .attributes()
                .iter()
                .map(|a| (a.name.clone(), a.cost.clone()))
                .collect(),
            privatization: workflow
                .modules()
                .iter()
                .filter_map(|m| {
                    m.privatization_cost
                        .clone()
                        .map(|c| (m.name.clone(), c))
                })
                .collect(),
        }
    }

    /// Parses a cost file and checks coverage of the workflow.
    pub fn from_model(workflow: &Workflow, model: &CostModel) -> Result<Self> {
        let mut attribute = BTreeMap::new();
        for (name, nd) in &model.attribute_costs {
            workflow.attr(name)?;
            let value = nd.to_rational().map_err(Error::Precondition)?;
            rational::check_nonnegative(&value, "attribute cost").map_err(Error::Precondition)?;
            attribute.insert(name.clone(), value);
        }
        let mut privatization = BTreeMap::new();
        for (name, nd) in &model.privatization_costs {
            let idx = workflow.module(name)?;
            if !workflow.modules()[idx].is_public() {
                return Err(Error::Precondition(format!(
                    "privatization cost given for private module `{name}`"
                )));
            }
            let value = nd.to_rational().map_err(Error::Precondition)?;
            rational::check_nonnegative(&value, "privatization cost")
                .map_err(Error::Precondition)?;
            privatization.insert(name.clone(), value);
        }
        let costs = Costs {
            attribute,
            privatization,
        };
        costs.check_coverage(workflow)?;
        Ok(costs)
    }

    pub fn check_coverage(&self, workflow: &Workflow) -> Result<()> {
        for attr in workflow.attributes() {
            if !self.attribute.contains_key(&attr.name) {
                return Err(Error::Precondition(format!(
                    "cost model misses attribute `{}`",
                    attr.name
                )));
            }
        }
        for (_, module) in workflow.public_modules() {
            if !self.privatization.contains_key(&module.name) {
                return Err(Error::Precondition(format!(
                    "cost model misses public module `{}`",
                    module.name
                )));
            }
        }
        Ok(())
    }

    pub fn attr_cost(&self, name: &str) -> &Rational {
        &self.attribute[name]
    }

    pub fn hidden_cost<'a>(&self, hidden: impl IntoIterator<Item = &'a String>) -> Rational {
        rational::sum(hidden.into_iter().map(|name| &self.attribute[name]))
    }

    pub fn privatization_cost<'a>(
        &self,
        hidden_modules: impl IntoIterator<Item = &'a String>,
    ) -> Rational {
        rational::sum(hidden_modules.into_iter().map(|m| &self.privatization[m]))
    }

    pub fn to_model(&self) -> CostModel {
        let to_nd = |v: &Rational| crate::rational::NumDen::from_rational(v).expect("small cost");
        CostModel {
            attribute_costs: self.attribute.iter().map(|(k, v)| (k.clone(), to_nd(v))).collect(),
            privatization_costs: self
                .privatization
                .iter()
                .map(|(k, v)| (k.clone(), to_nd(v)))
                .collect(),
        }
    }
}

/// Token form of a relation, the JSON exchange format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationData {
    pub attributes: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RelationData {
    pub fn from_relation(workflow: &Workflow, relation: &Relation) -> Result<Self> {
        let cols: Vec<usize> = relation
            .attributes
            .iter()
            .map(|name| workflow.attr(name))
            .collect::<Result<_>>()?;
        Ok(RelationData {
            attributes: relation.attributes.clone(),
            rows: relation
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&cols)
                        .map(|(&v, &a)| workflow.token(a, v).to_string())
                        .collect()
                })
                .collect(),
        })
    }

    pub fn to_relation(&self, workflow: &Workflow) -> Result<Relation> {
        let cols: Vec<usize> = self
            .attributes
            .iter()
            .map(|name| workflow.attr(name))
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            if row.len() != cols.len() {
                return Err(Error::Precondition(format!(
                    "row {row:?} has {} values, expected {}",
                    row.len(),
                    cols.len()
                )));
            }
            rows.push(
                row.iter()
                    .zip(&cols)
                    .map(|(tok, &a)| workflow.value_of_token(a, tok))
                    .collect::<Result<_>>()?,
            );
        }
        Ok(Relation {
            attributes: self.attributes.clone(),
            rows,
        })
    }
}
