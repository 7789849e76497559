//! Elementary process specifications: typed I/O channels, one-element input
//! buffers, and the behavior clauses (ending predicate, per-tick calculation,
//! restart assignments, environment assumptions).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{infer_interval_type, infer_type, Expr, ExprError, IntervalExpr, TypeEnv};
use crate::stream::{Message, MessageType};

/// Names reserved for the implicit entry and exit channels.
pub const ENTRY_PORT: &str = "start";
pub const EXIT_PORT: &str = "stop";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    pub msg_type: MessageType,
    pub direction: Direction,
}

impl ChannelDecl {
    pub fn input(name: impl Into<String>, msg_type: MessageType) -> Self {
        ChannelDecl { name: name.into(), msg_type, direction: Direction::Input }
    }

    pub fn output(name: impl Into<String>, msg_type: MessageType) -> Self {
        ChannelDecl { name: name.into(), msg_type, direction: Direction::Output }
    }
}

/// One-element buffer attached to a data input channel; it retains the
/// latest received message while the process is inactive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BufferDecl {
    pub for_input: String,
    pub init_value: Message,
}

/// Name of the buffer variable backing an input channel.
pub fn buffer_var(input: &str) -> String {
    format!("{input}Buf")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub name: String,
    pub msg_type: MessageType,
    /// Once-only initial value; constant over params.
    pub init: Expr,
}

/// Effect of one active tick: emitted output intervals plus next buffer and
/// local values. Unassigned outputs emit the empty interval; unassigned
/// buffers and locals keep their value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EffectSpec {
    pub outputs: BTreeMap<String, IntervalExpr>,
    /// Keyed by input channel name.
    pub buffers: BTreeMap<String, Expr>,
    pub locals: BTreeMap<String, Expr>,
}

/// One conjunct of the environment assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssumptionClause {
    /// `msg(bound, channel)`: at most `bound` messages per interval.
    MsgBound { channel: String, bound: usize },
    /// Per-interval predicate over the raw input streams; evaluated only on
    /// ticks where every channel it reads via `ft` is nonempty.
    PerTick(Expr),
}

impl fmt::Display for AssumptionClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionClause::MsgBound { channel, bound } => write!(f, "msg({bound},{channel})"),
            AssumptionClause::PerTick(_) => write!(f, "per-tick predicate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorSpec {
    /// The process-finishing condition over current inputs, buffers, locals.
    pub ending: Expr,
    /// Calculation performed on every non-final active tick.
    pub calc: EffectSpec,
    /// Calculation for the terminating tick; `None` reuses `calc`.
    pub calc_final: Option<EffectSpec>,
    /// Assignments re-applied at every (re)start, constant over params.
    pub init_process: BTreeMap<String, Expr>,
    pub assumptions: Vec<AssumptionClause>,
    pub locals: Vec<LocalDecl>,
}

impl Default for BehaviorSpec {
    fn default() -> Self {
        BehaviorSpec {
            ending: Expr::Bool(true),
            calc: EffectSpec::default(),
            calc_final: None,
            init_process: BTreeMap::new(),
            assumptions: Vec::new(),
            locals: Vec::new(),
        }
    }
}

impl BehaviorSpec {
    pub fn final_effect(&self) -> &EffectSpec {
        self.calc_final.as_ref().unwrap_or(&self.calc)
    }
}

/// Declarative record of an elementary process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryProcessSpec {
    pub name: String,
    /// Named constants usable in every expression.
    pub params: BTreeMap<String, Message>,
    pub channels: Vec<ChannelDecl>,
    pub buffers: Vec<BufferDecl>,
    pub behavior: BehaviorSpec,
    pub declared_wcet: Option<u64>,
    /// Enumeration types in scope, by type name.
    pub enums: BTreeMap<String, Vec<String>>,
}

impl ElementaryProcessSpec {
    pub fn new(name: impl Into<String>) -> Self {
        ElementaryProcessSpec {
            name: name.into(),
            params: BTreeMap::new(),
            channels: Vec::new(),
            buffers: Vec::new(),
            behavior: BehaviorSpec::default(),
            declared_wcet: None,
            enums: BTreeMap::new(),
        }
    }

    pub fn inputs(&self) -> impl Iterator<Item = &ChannelDecl> {
        self.channels.iter().filter(|c| c.direction == Direction::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &ChannelDecl> {
        self.channels.iter().filter(|c| c.direction == Direction::Output)
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelDecl> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn buffer_for(&self, input: &str) -> Option<&BufferDecl> {
        self.buffers.iter().find(|b| b.for_input == input)
    }

    /// Type environment for behavior expressions.
    pub fn type_env(&self) -> TypeEnv {
        TypeEnv {
            params: self
                .params
                .iter()
                .map(|(k, v)| (k.clone(), v.message_type()))
                .collect(),
            locals: self
                .behavior
                .locals
                .iter()
                .map(|l| (l.name.clone(), l.msg_type.clone()))
                .collect(),
            buffers: self
                .buffers
                .iter()
                .filter_map(|b| {
                    self.channel(&b.for_input)
                        .map(|c| (buffer_var(&b.for_input), c.msg_type.clone()))
                })
                .collect(),
            inputs: self
                .inputs()
                .map(|c| (c.name.clone(), c.msg_type.clone()))
                .collect(),
            enums: self.enums.clone(),
        }
    }
}

/// A single validation finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    MissingBuffer(String),
    UnresolvedSymbol(String),
    TypeMismatch { expected: String, found: String, at: String },
    DuplicateName(String),
    ReservedName(String),
    BufferWithoutInput(String),
    DuplicateBuffer(String),
    NotALocal(String),
    NotAnOutput(String),
    NotAnInput(String),
    UnknownEnum(String),
    SymbolCollision(String),
    NonConstantInit(String),
    InvalidWcet,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::MissingBuffer(c) => write!(f, "input `{c}` has no buffer"),
            Diagnostic::UnresolvedSymbol(s) => write!(f, "unresolved symbol `{s}`"),
            Diagnostic::TypeMismatch { expected, found, at } => {
                write!(f, "type mismatch in {at}: expected {expected}, found {found}")
            }
            Diagnostic::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            Diagnostic::ReservedName(n) => write!(f, "`{n}` is reserved for the entry/exit channels"),
            Diagnostic::BufferWithoutInput(c) => write!(f, "buffer declared for `{c}`, which is not an input channel"),
            Diagnostic::DuplicateBuffer(c) => write!(f, "input `{c}` has more than one buffer"),
            Diagnostic::NotALocal(n) => write!(f, "`{n}` is not a local variable"),
            Diagnostic::NotAnOutput(n) => write!(f, "`{n}` is not an output channel"),
            Diagnostic::NotAnInput(n) => write!(f, "`{n}` is not an input channel"),
            Diagnostic::UnknownEnum(n) => write!(f, "unknown enumeration type `{n}`"),
            Diagnostic::SymbolCollision(s) => write!(f, "symbol `{s}` is declared more than once"),
            Diagnostic::NonConstantInit(n) => {
                write!(f, "initializer of `{n}` must be constant over params")
            }
            Diagnostic::InvalidWcet => write!(f, "declared wcet must be at least 1 tick"),
        }
    }
}

fn expr_diag(err: ExprError) -> Diagnostic {
    match err {
        ExprError::UnresolvedSymbol(s) => Diagnostic::UnresolvedSymbol(s),
        ExprError::UnknownChannel(c) => Diagnostic::NotAnInput(c),
        ExprError::TypeMismatch { expected, found, at } => {
            Diagnostic::TypeMismatch { expected, found, at }
        }
    }
}

/// In constant contexts any stream access or state reference means the
/// expression is not constant.
fn const_expr_diag(err: ExprError, locals: &BTreeSet<String>, buffers: &BTreeSet<String>) -> Diagnostic {
    match err {
        ExprError::UnresolvedSymbol(s) if locals.contains(&s) || buffers.contains(&s) => {
            Diagnostic::NonConstantInit(s)
        }
        ExprError::UnknownChannel(c) => Diagnostic::NonConstantInit(c),
        other => expr_diag(other),
    }
}

/// Check every invariant of a process specification. An empty result means
/// the spec is well-formed.
pub fn validate(spec: &ElementaryProcessSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    // Channel names: unique, not reserved.
    let mut seen = BTreeSet::new();
    for c in &spec.channels {
        if c.name == ENTRY_PORT || c.name == EXIT_PORT {
            diags.push(Diagnostic::ReservedName(c.name.clone()));
        }
        if !seen.insert(c.name.clone()) {
            diags.push(Diagnostic::DuplicateName(c.name.clone()));
        }
        if let MessageType::Enum(e) = &c.msg_type {
            if !spec.enums.contains_key(e) {
                diags.push(Diagnostic::UnknownEnum(e.clone()));
            }
        }
    }

    // Exactly one buffer per data input.
    let input_names: BTreeSet<String> = spec.inputs().map(|c| c.name.clone()).collect();
    let mut buffered = BTreeSet::new();
    for b in &spec.buffers {
        if !input_names.contains(&b.for_input) {
            diags.push(Diagnostic::BufferWithoutInput(b.for_input.clone()));
            continue;
        }
        if !buffered.insert(b.for_input.clone()) {
            diags.push(Diagnostic::DuplicateBuffer(b.for_input.clone()));
            continue;
        }
        let chan_ty = &spec.channel(&b.for_input).unwrap().msg_type;
        let init_ty = b.init_value.message_type();
        if &init_ty != chan_ty {
            diags.push(Diagnostic::TypeMismatch {
                expected: chan_ty.to_string(),
                found: init_ty.to_string(),
                at: format!("buffer for `{}`", b.for_input),
            });
        }
    }
    for input in &input_names {
        if !buffered.contains(input) {
            diags.push(Diagnostic::MissingBuffer(input.clone()));
        }
    }

    // Name spaces: params, locals, buffer vars, enum symbols must not collide.
    let buffer_vars: BTreeSet<String> = input_names.iter().map(|i| buffer_var(i)).collect();
    let mut names: BTreeSet<String> = spec.params.keys().cloned().collect();
    for bv in &buffer_vars {
        if !names.insert(bv.clone()) {
            diags.push(Diagnostic::DuplicateName(bv.clone()));
        }
    }
    let local_names: BTreeSet<String> =
        spec.behavior.locals.iter().map(|l| l.name.clone()).collect();
    for l in &spec.behavior.locals {
        if !names.insert(l.name.clone()) {
            diags.push(Diagnostic::DuplicateName(l.name.clone()));
        }
        if let MessageType::Enum(e) = &l.msg_type {
            if !spec.enums.contains_key(e) {
                diags.push(Diagnostic::UnknownEnum(e.clone()));
            }
        }
    }
    let mut all_symbols = BTreeSet::new();
    for symbols in spec.enums.values() {
        for s in symbols {
            if names.contains(s) || !all_symbols.insert(s.clone()) {
                diags.push(Diagnostic::SymbolCollision(s.clone()));
            }
            if s == "ev" || s == "true" || s == "false" {
                diags.push(Diagnostic::ReservedName(s.clone()));
            }
        }
    }

    if spec.declared_wcet == Some(0) {
        diags.push(Diagnostic::InvalidWcet);
    }

    // Behavior typing. Skip when the structural half already failed badly.
    let env = spec.type_env();
    let const_env = TypeEnv {
        params: env.params.clone(),
        enums: env.enums.clone(),
        ..Default::default()
    };
    let to_diag = expr_diag;
    let to_const_diag = |e: ExprError| const_expr_diag(e, &local_names, &buffer_vars);

    // Once-only local initializers.
    for l in &spec.behavior.locals {
        match infer_type(&l.init, &const_env) {
            Err(e) => diags.push(to_const_diag(e)),
            Ok(t) if t != l.msg_type => diags.push(Diagnostic::TypeMismatch {
                expected: l.msg_type.to_string(),
                found: t.to_string(),
                at: format!("initializer of `{}`", l.name),
            }),
            Ok(_) => {}
        }
    }

    // Ending predicate.
    match infer_type(&spec.behavior.ending, &env) {
        Err(e) => diags.push(to_diag(e)),
        Ok(MessageType::Bool) => {}
        Ok(t) => diags.push(Diagnostic::TypeMismatch {
            expected: MessageType::Bool.to_string(),
            found: t.to_string(),
            at: "ending predicate".to_string(),
        }),
    }

    // Effects.
    let check_effect = |effect: &EffectSpec, at: &str, diags: &mut Vec<Diagnostic>| {
        for (chan, ie) in &effect.outputs {
            match spec.channel(chan) {
                Some(c) if c.direction == Direction::Output => {
                    match infer_interval_type(ie, &env) {
                        Err(e) => diags.push(to_diag(e)),
                        Ok(Some(t)) if t != c.msg_type => diags.push(Diagnostic::TypeMismatch {
                            expected: c.msg_type.to_string(),
                            found: t.to_string(),
                            at: format!("{at} output `{chan}`"),
                        }),
                        Ok(_) => {}
                    }
                }
                _ => diags.push(Diagnostic::NotAnOutput(chan.clone())),
            }
        }
        for (input, e) in &effect.buffers {
            match spec.channel(input) {
                Some(c) if c.direction == Direction::Input => match infer_type(e, &env) {
                    Err(err) => diags.push(to_diag(err)),
                    Ok(t) if t != c.msg_type => diags.push(Diagnostic::TypeMismatch {
                        expected: c.msg_type.to_string(),
                        found: t.to_string(),
                        at: format!("{at} buffer update for `{input}`"),
                    }),
                    Ok(_) => {}
                },
                _ => diags.push(Diagnostic::NotAnInput(input.clone())),
            }
        }
        for (local, e) in &effect.locals {
            match spec.behavior.locals.iter().find(|l| &l.name == local) {
                Some(l) => match infer_type(e, &env) {
                    Err(err) => diags.push(to_diag(err)),
                    Ok(t) if t != l.msg_type => diags.push(Diagnostic::TypeMismatch {
                        expected: l.msg_type.to_string(),
                        found: t.to_string(),
                        at: format!("{at} update of `{local}`"),
                    }),
                    Ok(_) => {}
                },
                None => diags.push(Diagnostic::NotALocal(local.clone())),
            }
        }
    };
    check_effect(&spec.behavior.calc, "calc", &mut diags);
    if let Some(final_effect) = &spec.behavior.calc_final {
        check_effect(final_effect, "calcF", &mut diags);
    }

    // Restart assignments target locals and are constant over params.
    for (local, e) in &spec.behavior.init_process {
        match spec.behavior.locals.iter().find(|l| &l.name == local) {
            Some(l) => match infer_type(e, &const_env) {
                Err(err) => diags.push(to_const_diag(err)),
                Ok(t) if t != l.msg_type => diags.push(Diagnostic::TypeMismatch {
                    expected: l.msg_type.to_string(),
                    found: t.to_string(),
                    at: format!("initProcess `{local}`"),
                }),
                Ok(_) => {}
            },
            None => diags.push(Diagnostic::NotALocal(local.clone())),
        }
    }

    // Assumptions range over the raw input streams only.
    let asm_env = TypeEnv {
        params: env.params.clone(),
        inputs: env.inputs.clone(),
        enums: env.enums.clone(),
        ..Default::default()
    };
    for clause in &spec.behavior.assumptions {
        match clause {
            AssumptionClause::MsgBound { channel, .. } => {
                if !input_names.contains(channel) {
                    diags.push(Diagnostic::NotAnInput(channel.clone()));
                }
            }
            AssumptionClause::PerTick(e) => match infer_type(e, &asm_env) {
                Err(err) => diags.push(to_diag(err)),
                Ok(MessageType::Bool) => {}
                Ok(t) => diags.push(Diagnostic::TypeMismatch {
                    expected: MessageType::Bool.to_string(),
                    found: t.to_string(),
                    at: "assumption".to_string(),
                }),
            },
        }
    }

    diags
}
