//! Total expression language for process behaviors: ending predicates,
//! per-tick calculations, restart assignments, and per-interval assumption
//! predicates. No loops, no recursion; every expression evaluates to a value.

use std::collections::BTreeMap;
use std::fmt;

use crate::stream::{Message, MessageType, TimeInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

/// Expression over params, locals, buffers and the current input intervals.
/// Bare identifiers are resolved in that order, falling back to enum symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Event,
    /// Reference to a param, local, buffer, or enum symbol.
    Ref(String),
    /// First message of the named input channel's current interval; when the
    /// interval is empty this falls back to the channel's buffer value, so
    /// `ft` always denotes the latest available message.
    Ft(String),
    /// True iff the named input channel's current interval is nonempty.
    NonEmpty(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Input channels the expression reads via `ft`.
    pub fn ft_channels(&self, out: &mut Vec<String>) {
        match self {
            Expr::Ft(c) => out.push(c.clone()),
            Expr::Unary(_, e) => e.ft_channels(out),
            Expr::Binary(_, l, r) => {
                l.ft_channels(out);
                r.ft_channels(out);
            }
            Expr::If(c, t, e) => {
                c.ft_channels(out);
                t.ft_channels(out);
                e.ft_channels(out);
            }
            _ => {}
        }
    }
}

/// Right-hand side of an output-channel assignment: the interval emitted at
/// the current tick. Processes emit at most one message per tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervalExpr {
    Empty,
    Singleton(Expr),
    If(Expr, Box<IntervalExpr>, Box<IntervalExpr>),
}

/// Errors found while resolving or typing an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    UnresolvedSymbol(String),
    UnknownChannel(String),
    TypeMismatch {
        expected: String,
        found: String,
        at: String,
    },
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::UnresolvedSymbol(s) => write!(f, "unresolved symbol `{s}`"),
            ExprError::UnknownChannel(c) => write!(f, "`{c}` is not an input channel"),
            ExprError::TypeMismatch { expected, found, at } => {
                write!(f, "type mismatch in {at}: expected {expected}, found {found}")
            }
        }
    }
}

/// Symbol environment for type checking.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    pub params: BTreeMap<String, MessageType>,
    pub locals: BTreeMap<String, MessageType>,
    /// Keyed by buffer variable name (e.g. `xBuf`).
    pub buffers: BTreeMap<String, MessageType>,
    /// Input channels readable via `ft`/`nonempty`.
    pub inputs: BTreeMap<String, MessageType>,
    pub enums: BTreeMap<String, Vec<String>>,
}

impl TypeEnv {
    fn resolve_ref(&self, name: &str) -> Option<MessageType> {
        if let Some(t) = self.params.get(name) {
            return Some(t.clone());
        }
        if let Some(t) = self.locals.get(name) {
            return Some(t.clone());
        }
        if let Some(t) = self.buffers.get(name) {
            return Some(t.clone());
        }
        for (ty, symbols) in &self.enums {
            if symbols.iter().any(|s| s == name) {
                return Some(MessageType::Enum(ty.clone()));
            }
        }
        None
    }
}

/// Infer the type of an expression, or report why it is ill-formed.
pub fn infer_type(expr: &Expr, env: &TypeEnv) -> Result<MessageType, ExprError> {
    match expr {
        Expr::Int(_) => Ok(MessageType::Int),
        Expr::Bool(_) => Ok(MessageType::Bool),
        Expr::Event => Ok(MessageType::Event),
        Expr::Ref(name) => env
            .resolve_ref(name)
            .ok_or_else(|| ExprError::UnresolvedSymbol(name.clone())),
        Expr::Ft(chan) | Expr::NonEmpty(chan) => {
            let ty = env
                .inputs
                .get(chan)
                .cloned()
                .ok_or_else(|| ExprError::UnknownChannel(chan.clone()))?;
            match expr {
                Expr::Ft(_) => Ok(ty),
                _ => Ok(MessageType::Bool),
            }
        }
        Expr::Unary(op, e) => {
            let t = infer_type(e, env)?;
            let expected = match op {
                UnaryOp::Neg => MessageType::Int,
                UnaryOp::Not => MessageType::Bool,
            };
            if t == expected {
                Ok(expected)
            } else {
                Err(ExprError::TypeMismatch {
                    expected: expected.to_string(),
                    found: t.to_string(),
                    at: format!("unary {op:?}"),
                })
            }
        }
        Expr::Binary(op, l, r) => {
            let lt = infer_type(l, env)?;
            let rt = infer_type(r, env)?;
            match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
                    expect(&lt, &MessageType::Int, op.symbol())?;
                    expect(&rt, &MessageType::Int, op.symbol())?;
                    Ok(MessageType::Int)
                }
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                    expect(&lt, &MessageType::Int, op.symbol())?;
                    expect(&rt, &MessageType::Int, op.symbol())?;
                    Ok(MessageType::Bool)
                }
                BinOp::Eq | BinOp::Ne => {
                    if lt == rt {
                        Ok(MessageType::Bool)
                    } else {
                        Err(ExprError::TypeMismatch {
                            expected: lt.to_string(),
                            found: rt.to_string(),
                            at: format!("operands of {}", op.symbol()),
                        })
                    }
                }
                BinOp::And | BinOp::Or => {
                    expect(&lt, &MessageType::Bool, op.symbol())?;
                    expect(&rt, &MessageType::Bool, op.symbol())?;
                    Ok(MessageType::Bool)
                }
            }
        }
        Expr::If(c, t, e) => {
            let ct = infer_type(c, env)?;
            expect(&ct, &MessageType::Bool, "if condition")?;
            let tt = infer_type(t, env)?;
            let et = infer_type(e, env)?;
            if tt == et {
                Ok(tt)
            } else {
                Err(ExprError::TypeMismatch {
                    expected: tt.to_string(),
                    found: et.to_string(),
                    at: "if branches".to_string(),
                })
            }
        }
    }
}

fn expect(found: &MessageType, expected: &MessageType, at: &str) -> Result<(), ExprError> {
    if found == expected {
        Ok(())
    } else {
        Err(ExprError::TypeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
            at: at.to_string(),
        })
    }
}

/// Infer the type an interval expression emits, if any message at all.
pub fn infer_interval_type(
    ie: &IntervalExpr,
    env: &TypeEnv,
) -> Result<Option<MessageType>, ExprError> {
    match ie {
        IntervalExpr::Empty => Ok(None),
        IntervalExpr::Singleton(e) => infer_type(e, env).map(Some),
        IntervalExpr::If(c, t, e) => {
            expect(&infer_type(c, env)?, &MessageType::Bool, "if condition")?;
            let tt = infer_interval_type(t, env)?;
            let et = infer_interval_type(e, env)?;
            match (tt, et) {
                (Some(a), Some(b)) if a != b => Err(ExprError::TypeMismatch {
                    expected: a.to_string(),
                    found: b.to_string(),
                    at: "interval if branches".to_string(),
                }),
                (Some(a), _) => Ok(Some(a)),
                (None, b) => Ok(b),
            }
        }
    }
}

/// Runtime environment for evaluation. Evaluation is total: a type-checked
/// expression always produces a value (division and remainder by zero
/// yield 0, integer arithmetic wraps).
pub struct EvalEnv<'a> {
    pub params: &'a BTreeMap<String, Message>,
    pub locals: &'a BTreeMap<String, Message>,
    pub buffers: &'a BTreeMap<String, Message>,
    pub inputs: &'a BTreeMap<String, TimeInterval>,
    /// Maps an input channel to its buffer variable for the `ft` fallback.
    pub buffer_of: &'a BTreeMap<String, String>,
    pub enums: &'a BTreeMap<String, Vec<String>>,
}

pub fn eval(expr: &Expr, env: &EvalEnv<'_>) -> Message {
    match expr {
        Expr::Int(v) => Message::Int(*v),
        Expr::Bool(v) => Message::Bool(*v),
        Expr::Event => Message::Event,
        Expr::Ref(name) => {
            if let Some(v) = env.params.get(name) {
                return v.clone();
            }
            if let Some(v) = env.locals.get(name) {
                return v.clone();
            }
            if let Some(v) = env.buffers.get(name) {
                return v.clone();
            }
            for (ty, symbols) in env.enums {
                if symbols.iter().any(|s| s == name) {
                    return Message::Sym {
                        ty: ty.clone(),
                        symbol: name.clone(),
                    };
                }
            }
            // Unreachable after type checking; keep evaluation total anyway.
            Message::Int(0)
        }
        Expr::Ft(chan) => {
            let interval = env.inputs.get(chan);
            if let Some(m) = interval.and_then(|i| i.messages().first()) {
                return m.clone();
            }
            env.buffer_of
                .get(chan)
                .and_then(|buf| env.buffers.get(buf))
                .cloned()
                .unwrap_or(Message::Int(0))
        }
        Expr::NonEmpty(chan) => {
            Message::Bool(env.inputs.get(chan).is_some_and(|i| !i.is_empty()))
        }
        Expr::Unary(op, e) => {
            let v = eval(e, env);
            match (op, v) {
                (UnaryOp::Neg, Message::Int(n)) => Message::Int(n.wrapping_neg()),
                (UnaryOp::Not, Message::Bool(b)) => Message::Bool(!b),
                (_, v) => v,
            }
        }
        Expr::Binary(op, l, r) => {
            let lv = eval(l, env);
            let rv = eval(r, env);
            eval_binop(*op, lv, rv)
        }
        Expr::If(c, t, e) => {
            if eval(c, env) == Message::Bool(true) {
                eval(t, env)
            } else {
                eval(e, env)
            }
        }
    }
}

fn eval_binop(op: BinOp, l: Message, r: Message) -> Message {
    use Message::*;
    match (op, &l, &r) {
        (BinOp::Add, Int(a), Int(b)) => Int(a.wrapping_add(*b)),
        (BinOp::Sub, Int(a), Int(b)) => Int(a.wrapping_sub(*b)),
        (BinOp::Mul, Int(a), Int(b)) => Int(a.wrapping_mul(*b)),
        (BinOp::Div, Int(a), Int(b)) => Int(if *b == 0 { 0 } else { a.wrapping_div(*b) }),
        (BinOp::Rem, Int(a), Int(b)) => Int(if *b == 0 { 0 } else { a.wrapping_rem(*b) }),
        (BinOp::Eq, _, _) => Bool(l == r),
        (BinOp::Ne, _, _) => Bool(l != r),
        (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
        (BinOp::Le, Int(a), Int(b)) => Bool(a <= b),
        (BinOp::Gt, Int(a), Int(b)) => Bool(a > b),
        (BinOp::Ge, Int(a), Int(b)) => Bool(a >= b),
        (BinOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
        (BinOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
        // Ill-typed operands only occur on unchecked expressions.
        _ => Bool(false),
    }
}

/// Evaluate an interval expression to the interval it emits this tick.
pub fn eval_interval(ie: &IntervalExpr, env: &EvalEnv<'_>) -> TimeInterval {
    match ie {
        IntervalExpr::Empty => TimeInterval::empty(),
        IntervalExpr::Singleton(e) => TimeInterval::singleton(eval(e, env)),
        IntervalExpr::If(c, t, e) => {
            if eval(c, env) == Message::Bool(true) {
                eval_interval(t, env)
            } else {
                eval_interval(e, env)
            }
        }
    }
}
