//! Module behaviors: explicit function tables and the builtin families
//! (identity, bit reversal, constants, boolean gate networks, majority,
//! seeded one-one permutations).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{AttributeDef, Value};
use crate::rng::SplitMix64;

/// Declared behavior of a module, as it appears in workflow files: either
/// an explicit total table or a named builtin with parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Behavior {
    Table {
        /// `[[in-tuple, out-tuple], ...]`, covering every input exactly once.
        table: Vec<(Vec<String>, Vec<String>)>,
    },
    Builtin {
        builtin: BuiltinKind,
        #[serde(default, skip_serializing_if = "BuiltinParams::is_empty")]
        params: BuiltinParams,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    Identity,
    BitReversal,
    Constant,
    Gates,
    Majority,
    OneOne,
}

/// Parameters accepted by builtins. Which fields are required depends on
/// the kind; unknown fields are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BuiltinParams {
    /// `constant`: the output tuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Vec<String>>,
    /// `gates`: boolean expression per output attribute, e.g.
    /// `"not(and(a1,a2))"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<BTreeMap<String, String>>,
    /// `one_one`: permutation seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl BuiltinParams {
    fn is_empty(&self) -> bool {
        self.value.is_none() && self.outputs.is_none() && self.seed.is_none()
    }
}

impl Behavior {
    pub fn gates(pairs: &[(&str, &str)]) -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::Gates,
            params: BuiltinParams {
                outputs: Some(
                    pairs
                        .iter()
                        .map(|(a, e)| (a.to_string(), e.to_string()))
                        .collect(),
                ),
                ..BuiltinParams::default()
            },
        }
    }

    pub fn identity() -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::Identity,
            params: BuiltinParams::default(),
        }
    }

    pub fn bit_reversal() -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::BitReversal,
            params: BuiltinParams::default(),
        }
    }

    pub fn constant(value: &[&str]) -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::Constant,
            params: BuiltinParams {
                value: Some(value.iter().map(|v| v.to_string()).collect()),
                ..BuiltinParams::default()
            },
        }
    }

    pub fn majority() -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::Majority,
            params: BuiltinParams::default(),
        }
    }

    pub fn one_one(seed: u64) -> Behavior {
        Behavior::Builtin {
            builtin: BuiltinKind::OneOne,
            params: BuiltinParams {
                seed: Some(seed),
                ..BuiltinParams::default()
            },
        }
    }

    pub fn table_from_values(table: Vec<(Vec<String>, Vec<String>)>) -> Behavior {
        Behavior::Table { table }
    }
}

/// Behavior compiled against concrete input/output attribute definitions;
/// evaluation is a pure function of the input tuple.
#[derive(Debug, Clone)]
pub enum CompiledBehavior {
    Table(BTreeMap<Vec<Value>, Vec<Value>>),
    Identity,
    BitReversal,
    Constant(Vec<Value>),
    /// One expression per output, inputs referenced by position.
    Gates(Vec<GateExpr>),
    Majority,
    /// Permutation of input ranks, decoded into the output domains.
    OneOne { perm: Vec<u64>, out_radix: Vec<u64> },
}

impl CompiledBehavior {
    fn eval(&self, input: &[Value]) -> Vec<Value> {
        match self {
            CompiledBehavior::Table(map) => map
                .get(input)
                .cloned()
                .expect("table validated total over the input domain"),
            CompiledBehavior::Identity => input.to_vec(),
            CompiledBehavior::BitReversal => input.iter().rev().copied().collect(),
            CompiledBehavior::Constant(out) => out.clone(),
            CompiledBehavior::Gates(exprs) => exprs
                .iter()
                .map(|e| Value::from(e.eval(input)))
                .collect(),
            CompiledBehavior::Majority => {
                let ones = input.iter().filter(|&&v| v == 1).count();
                vec![Value::from(ones * 2 >= input.len())]
            }
            CompiledBehavior::OneOne { .. } => {
                unreachable!("one_one is evaluated through eval_behavior")
            }
        }
    }
}

/// Boolean expression over module inputs (by position).
#[derive(Debug, Clone)]
pub enum GateExpr {
    Input(usize),
    Const(bool),
    Not(Box<GateExpr>),
    And(Vec<GateExpr>),
    Or(Vec<GateExpr>),
    Xor(Vec<GateExpr>),
}

impl GateExpr {
    pub fn eval(&self, input: &[Value]) -> bool {
        match self {
            GateExpr::Input(i) => input[*i] == 1,
            GateExpr::Const(b) => *b,
            GateExpr::Not(e) => !e.eval(input),
            GateExpr::And(es) => es.iter().all(|e| e.eval(input)),
            GateExpr::Or(es) => es.iter().any(|e| e.eval(input)),
            GateExpr::Xor(es) => es.iter().fold(false, |acc, e| acc ^ e.eval(input)),
        }
    }
}

/// Parses a gate expression such as `not(and(a1,a2))` or `xor(a1,a2,a3)`.
/// `inputs` maps attribute names to positions.
pub fn parse_gate_expr(src: &str, inputs: &BTreeMap<String, usize>) -> Result<GateExpr, String> {
    let mut parser = ExprParser {
        src: src.as_bytes(),
        pos: 0,
        inputs,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(format!("trailing input at byte {} in `{src}`", parser.pos));
    }
    Ok(expr)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    inputs: &'a BTreeMap<String, usize>,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected identifier at byte {start}"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expect(&mut self, ch: u8) -> Result<(), String> {
        self.skip_ws();
        if self.pos < self.src.len() && self.src[self.pos] == ch {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{}` at byte {}", ch as char, self.pos))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<GateExpr, String> {
        let name = self.ident()?;
        if self.peek() == Some(b'(') {
            self.expect(b'(')?;
            let mut args = vec![self.expr()?];
            while self.peek() == Some(b',') {
                self.expect(b',')?;
                args.push(self.expr()?);
            }
            self.expect(b')')?;
            return match (name.as_str(), args.len()) {
                ("not", 1) => Ok(GateExpr::Not(Box::new(args.pop().unwrap()))),
                ("not", n) => Err(format!("not takes one argument, got {n}")),
                ("and", n) if n >= 2 => Ok(GateExpr::And(args)),
                ("or", n) if n >= 2 => Ok(GateExpr::Or(args)),
                ("xor", n) if n >= 2 => Ok(GateExpr::Xor(args)),
                (other, _) => Err(format!("unknown gate `{other}`")),
            };
        }
        match name.as_str() {
            "0" => Ok(GateExpr::Const(false)),
            "1" => Ok(GateExpr::Const(true)),
            attr => self
                .inputs
                .get(attr)
                .map(|&i| GateExpr::Input(i))
                .ok_or_else(|| format!("`{attr}` is not an input of this module")),
        }
    }
}

/// Compiles a behavior against the module's attribute definitions,
/// reporting every violation found.
pub fn compile_behavior(
    module: &str,
    behavior: &Behavior,
    inputs: &[&AttributeDef],
    outputs: &[&AttributeDef],
    violations: &mut Vec<String>,
) -> Option<CompiledBehavior> {
    let is_boolean =
        |a: &AttributeDef| a.domain.len() == 2 && a.domain[0] == "0" && a.domain[1] == "1";
    match behavior {
        Behavior::Table { table } => {
            let mut map = BTreeMap::new();
            let mut ok = true;
            for (in_tokens, out_tokens) in table {
                let key = encode_tuple(module, "input", in_tokens, inputs, violations);
                let val = encode_tuple(module, "output", out_tokens, outputs, violations);
                match (key, val) {
                    (Some(k), Some(v)) => {
                        if map.insert(k, v).is_some() {
                            violations.push(format!(
                                "module `{module}`: duplicate table entry for input {in_tokens:?}"
                            ));
                            ok = false;
                        }
                    }
                    _ => ok = false,
                }
            }
            let expected: u128 = inputs.iter().map(|a| a.domain.len() as u128).product();
            if ok && map.len() as u128 != expected {
                violations.push(format!(
                    "module `{module}`: non-total table ({} rows, input domain product {expected})",
                    map.len()
                ));
                ok = false;
            }
            ok.then_some(CompiledBehavior::Table(map))
        }
        Behavior::Builtin { builtin, params } => {
            let reject_params = |used: &[bool], violations: &mut Vec<String>| {
                let names = ["value", "outputs", "seed"];
                let present = [
                    params.value.is_some(),
                    params.outputs.is_some(),
                    params.seed.is_some(),
                ];
                let mut ok = true;
                for i in 0..3 {
                    if present[i] && !used[i] {
                        violations.push(format!(
                            "module `{module}`: builtin does not accept param `{}`",
                            names[i]
                        ));
                        ok = false;
                    }
                }
                ok
            };
            match builtin {
                BuiltinKind::Identity | BuiltinKind::BitReversal => {
                    if !reject_params(&[false, false, false], violations) {
                        return None;
                    }
                    if inputs.len() != outputs.len() {
                        violations.push(format!(
                            "module `{module}`: identity/bit_reversal needs equal arities"
                        ));
                        return None;
                    }
                    let reversed = matches!(builtin, BuiltinKind::BitReversal);
                    for (k, out) in outputs.iter().enumerate() {
                        let src = if reversed {
                            inputs[inputs.len() - 1 - k]
                        } else {
                            inputs[k]
                        };
                        if src.domain != out.domain {
                            violations.push(format!(
                                "module `{module}`: domain of `{}` differs from `{}`",
                                out.name, src.name
                            ));
                            return None;
                        }
                    }
                    Some(if reversed {
                        CompiledBehavior::BitReversal
                    } else {
                        CompiledBehavior::Identity
                    })
                }
                BuiltinKind::Constant => {
                    if !reject_params(&[true, false, false], violations) {
                        return None;
                    }
                    let Some(value) = &params.value else {
                        violations
                            .push(format!("module `{module}`: constant requires param `value`"));
                        return None;
                    };
                    encode_tuple(module, "constant value", value, outputs, violations)
                        .map(CompiledBehavior::Constant)
                }
                BuiltinKind::Gates => {
                    if !reject_params(&[false, true, false], violations) {
                        return None;
                    }
                    let Some(exprs) = &params.outputs else {
                        violations
                            .push(format!("module `{module}`: gates requires param `outputs`"));
                        return None;
                    };
                    for a in inputs.iter().chain(outputs.iter()) {
                        if !is_boolean(a) {
                            violations.push(format!(
                                "module `{module}`: gates requires boolean domains, `{}` is not",
                                a.name
                            ));
                            return None;
                        }
                    }
                    let index: BTreeMap<String, usize> = inputs
                        .iter()
                        .enumerate()
                        .map(|(i, a)| (a.name.clone(), i))
                        .collect();
                    let mut compiled = Vec::with_capacity(outputs.len());
                    for out in outputs {
                        let Some(src) = exprs.get(&out.name) else {
                            violations.push(format!(
                                "module `{module}`: no gate expression for output `{}`",
                                out.name
                            ));
                            return None;
                        };
                        match parse_gate_expr(src, &index) {
                            Ok(e) => compiled.push(e),
                            Err(e) => {
                                violations
                                    .push(format!("module `{module}`: bad expression: {e}"));
                                return None;
                            }
                        }
                    }
                    for name in exprs.keys() {
                        if !outputs.iter().any(|o| &o.name == name) {
                            violations.push(format!(
                                "module `{module}`: gate expression for non-output `{name}`"
                            ));
                            return None;
                        }
                    }
                    Some(CompiledBehavior::Gates(compiled))
                }
                BuiltinKind::Majority => {
                    if !reject_params(&[false, false, false], violations) {
                        return None;
                    }
                    if inputs.is_empty() || inputs.len() % 2 != 0 {
                        violations.push(format!(
                            "module `{module}`: majority needs an even, positive input arity"
                        ));
                        return None;
                    }
                    if outputs.len() != 1 {
                        violations
                            .push(format!("module `{module}`: majority needs a single output"));
                        return None;
                    }
                    for a in inputs.iter().chain(outputs.iter()) {
                        if !is_boolean(a) {
                            violations.push(format!(
                                "module `{module}`: majority requires boolean domains, `{}` is not",
                                a.name
                            ));
                            return None;
                        }
                    }
                    Some(CompiledBehavior::Majority)
                }
                BuiltinKind::OneOne => {
                    if !reject_params(&[false, false, true], violations) {
                        return None;
                    }
                    let seed = params.seed.unwrap_or(0);
                    let in_size: u128 = inputs.iter().map(|a| a.domain.len() as u128).product();
                    let out_size: u128 = outputs.iter().map(|a| a.domain.len() as u128).product();
                    if in_size != out_size {
                        violations.push(format!(
                            "module `{module}`: one_one needs equal domain products ({in_size} vs {out_size})"
                        ));
                        return None;
                    }
                    const MAX_ONE_ONE: u128 = 1 << 16;
                    if in_size > MAX_ONE_ONE {
                        violations.push(format!(
                            "module `{module}`: one_one domain product {in_size} exceeds {MAX_ONE_ONE}"
                        ));
                        return None;
                    }
                    let mut perm: Vec<u64> = (0..in_size as u64).collect();
                    SplitMix64::new(seed).shuffle(&mut perm);
                    Some(CompiledBehavior::OneOne {
                        perm,
                        out_radix: outputs.iter().map(|a| a.domain.len() as u64).collect(),
                    })
                }
            }
        }
    }
}

fn encode_tuple(
    module: &str,
    what: &str,
    tokens: &[String],
    attrs: &[&AttributeDef],
    violations: &mut Vec<String>,
) -> Option<Vec<Value>> {
    if tokens.len() != attrs.len() {
        violations.push(format!(
            "module `{module}`: {what} tuple {tokens:?} has arity {}, expected {}",
            tokens.len(),
            attrs.len()
        ));
        return None;
    }
    let mut out = Vec::with_capacity(tokens.len());
    for (tok, attr) in tokens.iter().zip(attrs) {
        match attr.domain.iter().position(|d| d == tok) {
            Some(i) => out.push(i as Value),
            None => {
                violations.push(format!(
                    "module `{module}`: {what} value `{tok}` outside domain of `{}`",
                    attr.name
                ));
                return None;
            }
        }
    }
    Some(out)
}

/// Evaluates a compiled behavior; one-one needs the input radix to rank
/// the tuple, so evaluation goes through here rather than
/// `CompiledBehavior::eval` directly.
pub fn eval_behavior(
    behavior: &CompiledBehavior,
    input: &[Value],
    in_radix: &[u64],
) -> Vec<Value> {
    match behavior {
        CompiledBehavior::OneOne { perm, out_radix } => {
            let mut rank: u64 = 0;
            for (v, r) in input.iter().zip(in_radix) {
                rank = rank * r + u64::from(*v);
            }
            let mut image = perm[rank as usize];
            let mut out = vec![0 as Value; out_radix.len()];
            for (k, r) in out_radix.iter().enumerate().rev() {
                out[k] = (image % r) as Value;
                image /= r;
            }
            out
        }
        other => other.eval(input),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn boolean(name: &str) -> AttributeDef {
        AttributeDef {
            name: name.to_string(),
            domain: vec!["0".into(), "1".into()],
            cost: rat_int(1),
        }
    }

    fn compile(
        behavior: &Behavior,
        inputs: &[&AttributeDef],
        outputs: &[&AttributeDef],
    ) -> CompiledBehavior {
        let mut violations = Vec::new();
        let compiled = compile_behavior("m", behavior, inputs, outputs, &mut violations);
        assert!(violations.is_empty(), "{violations:?}");
        compiled.unwrap()
    }

    #[test]
    fn gate_network_matches_hand_evaluation() {
        let a1 = boolean("a1");
        let a2 = boolean("a2");
        let a3 = boolean("a3");
        let b = Behavior::gates(&[("a3", "not(xor(a1,a2))")]);
        let c = compile(&b, &[&a1, &a2], &[&a3]);
        assert_eq!(eval_behavior(&c, &[0, 0], &[2, 2]), vec![1]);
        assert_eq!(eval_behavior(&c, &[0, 1], &[2, 2]), vec![0]);
        assert_eq!(eval_behavior(&c, &[1, 1], &[2, 2]), vec![1]);
    }

    #[test]
    fn gate_parser_rejects_garbage() {
        let index: BTreeMap<String, usize> = [("a".to_string(), 0)].into_iter().collect();
        assert!(parse_gate_expr("and(a)", &index).is_err());
        assert!(parse_gate_expr("nand(a,a)", &index).is_err());
        assert!(parse_gate_expr("a)", &index).is_err());
        assert!(parse_gate_expr("b", &index).is_err());
        assert!(parse_gate_expr("xor(a, a, a)", &index).is_ok());
    }

    #[test]
    fn majority_threshold_is_half() {
        let ins: Vec<AttributeDef> = (0..4).map(|i| boolean(&format!("i{i}"))).collect();
        let out = boolean("o");
        let refs: Vec<&AttributeDef> = ins.iter().collect();
        let c = compile(&Behavior::majority(), &refs, &[&out]);
        assert_eq!(eval_behavior(&c, &[1, 1, 0, 0], &[2; 4]), vec![1]);
        assert_eq!(eval_behavior(&c, &[1, 0, 0, 0], &[2; 4]), vec![0]);
        assert_eq!(eval_behavior(&c, &[1, 1, 1, 0], &[2; 4]), vec![1]);
    }

    #[test]
    fn one_one_is_a_bijection() {
        let ins = [boolean("x1"), boolean("x2"), boolean("x3")];
        let outs = [boolean("y1"), boolean("y2"), boolean("y3")];
        let in_refs: Vec<&AttributeDef> = ins.iter().collect();
        let out_refs: Vec<&AttributeDef> = outs.iter().collect();
        let c = compile(&Behavior::one_one(11), &in_refs, &out_refs);
        let mut seen = std::collections::BTreeSet::new();
        for rank in 0..8u16 {
            let input = vec![(rank >> 2) & 1, (rank >> 1) & 1, rank & 1];
            seen.insert(eval_behavior(&c, &input, &[2, 2, 2]));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn table_totality_enforced() {
        let a = boolean("a");
        let b = boolean("b");
        let behavior = Behavior::table_from_values(vec![(
            vec!["0".to_string()],
            vec!["1".to_string()],
        )]);
        let mut violations = Vec::new();
        let compiled = compile_behavior("m", &behavior, &[&a], &[&b], &mut violations);
        assert!(compiled.is_none());
        assert!(violations.iter().any(|v| v.contains("non-total")));
    }

    #[test]
    fn behavior_json_shapes() {
        let b: Behavior = serde_json::from_str(
            r#"{"builtin":"gates","params":{"outputs":{"a3":"or(a1,a2)"}}}"#,
        )
        .unwrap();
        assert!(matches!(
            b,
            Behavior::Builtin {
                builtin: BuiltinKind::Gates,
                ..
            }
        ));
        let t: Behavior =
            serde_json::from_str(r#"{"table":[[["0"],["1"]],[["1"],["0"]]]}"#).unwrap();
        assert!(matches!(t, Behavior::Table { .. }));
        assert!(serde_json::from_str::<Behavior>(r#"{"builtin":"nope"}"#).is_err());
    }
}
