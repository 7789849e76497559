//! Recursive-descent parser for `.pspec` documents.
//!
//! Syntax errors stop the parse and report position plus the expected
//! tokens; reference errors (unknown process names, colliding symbols) are
//! collected after a successful parse.

use super::lexer::{lex, Pos, Tok};
use super::{
    CompositionDecl, CompositionExpr, EnumDecl, EnvDecl, EnvEntry, MessageLit, SpecDocument,
};
use crate::component::RestartPolicy;
use crate::expr::{BinOp, Expr, IntervalExpr, UnaryOp};
use crate::process::{
    buffer_var, AssumptionClause, BufferDecl, ChannelDecl, Direction, ElementaryProcessSpec,
    LocalDecl,
};
use crate::stream::{Message, MessageType};

/// A parse-time problem with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

type PResult<T> = Result<T, ParseDiagnostic>;

/// Parse a document. On failure every diagnostic carries line and column.
pub fn parse(src: &str) -> Result<SpecDocument, Vec<ParseDiagnostic>> {
    let toks = lex(src).map_err(|e| {
        vec![ParseDiagnostic {
            line: e.pos.line,
            col: e.pos.col,
            message: e.message,
            expected: vec![],
        }]
    })?;
    let mut parser = Parser { toks, i: 0 };
    let doc = parser.document().map_err(|d| vec![d])?;
    let issues = resolve_document(&doc);
    if issues.is_empty() {
        Ok(doc)
    } else {
        Err(issues)
    }
}

/// Post-parse checks: unique names, resolvable references, disjoint enum
/// symbols.
fn resolve_document(doc: &SpecDocument) -> Vec<ParseDiagnostic> {
    let mut issues = Vec::new();
    fn report(issues: &mut Vec<ParseDiagnostic>, message: String) {
        issues.push(ParseDiagnostic { line: 0, col: 0, message, expected: vec![] })
    }

    let mut enum_names = std::collections::BTreeSet::new();
    let mut symbols = std::collections::BTreeSet::new();
    for e in &doc.enums {
        if !enum_names.insert(&e.name) {
            report(&mut issues, format!("duplicate type `{}`", e.name));
        }
        for s in &e.symbols {
            if !symbols.insert(s.clone()) {
                report(&mut issues, format!("enum symbol `{s}` is declared more than once"));
            }
        }
    }
    let mut names = std::collections::BTreeSet::new();
    for p in &doc.processes {
        if !names.insert(&p.name) {
            report(&mut issues, format!("duplicate process `{}`", p.name));
        }
    }
    let mut compose_names = std::collections::BTreeSet::new();
    for c in &doc.compositions {
        if !compose_names.insert(&c.name) {
            report(&mut issues, format!("duplicate composition `{}`", c.name));
        }
        check_refs(&c.expr, doc, &mut issues);
    }
    let mut env_names = std::collections::BTreeSet::new();
    for e in &doc.envs {
        if !env_names.insert(&e.name) {
            report(&mut issues, format!("duplicate env `{}`", e.name));
        }
    }
    issues
}

fn check_refs(expr: &CompositionExpr, doc: &SpecDocument, issues: &mut Vec<ParseDiagnostic>) {
    match expr {
        CompositionExpr::Ref(name) => {
            if !doc.processes.iter().any(|p| &p.name == name) {
                issues.push(ParseDiagnostic {
                    line: 0,
                    col: 0,
                    message: format!("unresolved reference to process `{name}`"),
                    expected: vec![],
                });
            }
        }
        CompositionExpr::Seq(l, r) | CompositionExpr::Par(l, r) | CompositionExpr::Alt(l, r) => {
            check_refs(l, doc, issues);
            check_refs(r, doc, issues);
        }
        CompositionExpr::LoopAuto(b, _) | CompositionExpr::LoopNonAuto(b, _) => {
            check_refs(b, doc, issues);
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, expected: &[&str]) -> PResult<T> {
        let pos = self.pos();
        Err(ParseDiagnostic {
            line: pos.line,
            col: pos.col,
            message: format!("unexpected {}", self.peek().describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.err(&[what])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(&[what]),
        }
    }

    fn integer(&mut self, what: &str) -> PResult<i64> {
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.err(&[what]),
        }
    }

    fn document(&mut self) -> PResult<SpecDocument> {
        let mut doc = SpecDocument::default();
        loop {
            match self.peek() {
                Tok::Type => doc.enums.push(self.type_decl()?),
                Tok::Process => doc.processes.push(self.process_decl()?),
                Tok::Compose => doc.compositions.push(self.compose_decl()?),
                Tok::Env => doc.envs.push(self.env_decl()?),
                Tok::Eof => break,
                _ => return self.err(&["`type`", "`process`", "`compose`", "`env`"]),
            }
        }
        // Every process carries the document's enum types.
        let enums = doc.enum_map();
        for p in &mut doc.processes {
            p.enums = enums.clone();
        }
        Ok(doc)
    }

    fn type_decl(&mut self) -> PResult<EnumDecl> {
        self.expect(Tok::Type, "`type`")?;
        let name = self.ident("type name")?;
        self.expect(Tok::Assign, "`=`")?;
        let mut symbols = vec![self.ident("enum symbol")?];
        while self.eat(&Tok::Pipe) {
            symbols.push(self.ident("enum symbol")?);
        }
        self.expect(Tok::Semi, "`;`")?;
        Ok(EnumDecl { name, symbols })
    }

    fn msg_type(&mut self) -> PResult<MessageType> {
        let name = self.ident("type")?;
        Ok(match name.as_str() {
            "Event" => MessageType::Event,
            "Int" => MessageType::Int,
            "Bool" => MessageType::Bool,
            _ => MessageType::Enum(name),
        })
    }

    fn message_lit(&mut self) -> PResult<MessageLit> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(MessageLit::Int(v))
            }
            Tok::Minus => {
                self.bump();
                let v = self.integer("integer")?;
                Ok(MessageLit::Int(-v))
            }
            Tok::True => {
                self.bump();
                Ok(MessageLit::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(MessageLit::Bool(false))
            }
            Tok::Ev => {
                self.bump();
                Ok(MessageLit::Event)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(MessageLit::Sym(s))
            }
            _ => self.err(&["message literal"]),
        }
    }

    fn process_decl(&mut self) -> PResult<ElementaryProcessSpec> {
        self.expect(Tok::Process, "`process`")?;
        let name = self.ident("process name")?;
        let mut spec = ElementaryProcessSpec::new(name);
        self.expect(Tok::LParen, "`(`")?;
        if !self.eat(&Tok::RParen) {
            loop {
                let pname = self.ident("parameter name")?;
                self.expect(Tok::Assign, "`=`")?;
                let lit = self.message_lit()?;
                let pos = self.pos();
                let value = self.param_value(lit, pos)?;
                spec.params.insert(pname, value);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        self.expect(Tok::LBrace, "`{`")?;

        // io
        while matches!(self.peek(), Tok::In | Tok::Out) {
            let direction = if self.eat(&Tok::In) {
                Direction::Input
            } else {
                self.bump();
                Direction::Output
            };
            let cname = self.ident("channel name")?;
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.msg_type()?;
            self.expect(Tok::Semi, "`;`")?;
            spec.channels.push(ChannelDecl { name: cname, msg_type: ty, direction });
        }
        // buf
        while self.eat(&Tok::Buf) {
            let input = self.ident("input channel")?;
            self.expect(Tok::Assign, "`=`")?;
            let lit = self.message_lit()?;
            let pos = self.pos();
            let init_value = self.buffer_value(lit, &spec, &input, pos)?;
            self.expect(Tok::Semi, "`;`")?;
            spec.buffers.push(BufferDecl { for_input: input, init_value });
        }
        // init (once-only locals)
        while self.eat(&Tok::Init) {
            let lname = self.ident("local name")?;
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.msg_type()?;
            self.expect(Tok::Assign, "`=`")?;
            let init = self.expr()?;
            self.expect(Tok::Semi, "`;`")?;
            spec.behavior.locals.push(LocalDecl { name: lname, msg_type: ty, init });
        }
        // initProcess (per-restart assignments)
        while self.eat(&Tok::InitProcess) {
            let lname = self.ident("local name")?;
            self.expect(Tok::Assign, "`=`")?;
            let value = self.expr()?;
            self.expect(Tok::Semi, "`;`")?;
            spec.behavior.init_process.insert(lname, value);
        }
        // asm
        if self.eat(&Tok::Asm) {
            loop {
                spec.behavior.assumptions.push(self.asm_clause()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        // wcet
        if self.eat(&Tok::Wcet) {
            let ticks = self.integer("tick count")?;
            self.expect(Tok::Semi, "`;`")?;
            spec.declared_wcet = Some(ticks.max(0) as u64);
        }
        // ending
        self.expect(Tok::Ending, "`ending`")?;
        self.expect(Tok::Colon, "`:`")?;
        spec.behavior.ending = self.expr()?;
        self.expect(Tok::Semi, "`;`")?;
        // calc
        self.expect(Tok::Calc, "`calc`")?;
        let calc = self.effect_block(&spec)?;
        spec.behavior.calc = calc;
        // calcF
        if self.eat(&Tok::CalcF) {
            spec.behavior.calc_final = Some(self.effect_block(&spec)?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(spec)
    }

    fn param_value(&mut self, lit: MessageLit, pos: Pos) -> PResult<Message> {
        match lit {
            MessageLit::Int(v) => Ok(Message::Int(v)),
            MessageLit::Bool(v) => Ok(Message::Bool(v)),
            MessageLit::Event => Ok(Message::Event),
            MessageLit::Sym(s) => Err(ParseDiagnostic {
                line: pos.line,
                col: pos.col,
                message: format!("parameter values must be Int, Bool or ev (got `{s}`)"),
                expected: vec![],
            }),
        }
    }

    fn buffer_value(
        &mut self,
        lit: MessageLit,
        spec: &ElementaryProcessSpec,
        input: &str,
        pos: Pos,
    ) -> PResult<Message> {
        match lit {
            MessageLit::Int(v) => Ok(Message::Int(v)),
            MessageLit::Bool(v) => Ok(Message::Bool(v)),
            MessageLit::Event => Ok(Message::Event),
            MessageLit::Sym(s) => {
                // Needs the channel's enum type; full typing happens in
                // validation, this only pins the symbol's type name.
                match spec.channel(input).map(|c| &c.msg_type) {
                    Some(MessageType::Enum(ty)) => {
                        Ok(Message::Sym { ty: ty.clone(), symbol: s })
                    }
                    _ => Err(ParseDiagnostic {
                        line: pos.line,
                        col: pos.col,
                        message: format!(
                            "buffer literal `{s}` needs an enum-typed input channel `{input}`"
                        ),
                        expected: vec![],
                    }),
                }
            }
        }
    }

    fn asm_clause(&mut self) -> PResult<AssumptionClause> {
        if self.eat(&Tok::Msg) {
            self.expect(Tok::LParen, "`(`")?;
            let bound = self.integer("message bound")?;
            self.expect(Tok::Comma, "`,`")?;
            let channel = self.ident("channel name")?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(AssumptionClause::MsgBound { channel, bound: bound.max(0) as usize })
        } else {
            Ok(AssumptionClause::PerTick(self.expr()?))
        }
    }

    fn effect_block(&mut self, spec: &ElementaryProcessSpec) -> PResult<crate::process::EffectSpec> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut effect = crate::process::EffectSpec::default();
        while !self.eat(&Tok::RBrace) {
            let target = self.ident("assignment target")?;
            if self.eat(&Tok::Prime) {
                // Next-value assignment to a buffer variable or local.
                self.expect(Tok::Assign, "`=`")?;
                let value = self.expr()?;
                self.expect(Tok::Semi, "`;`")?;
                let as_buffer = spec
                    .inputs()
                    .find(|c| buffer_var(&c.name) == target)
                    .map(|c| c.name.clone());
                if let Some(input) = as_buffer {
                    effect.buffers.insert(input, value);
                } else {
                    effect.locals.insert(target, value);
                }
            } else {
                self.expect(Tok::Assign, "`=`")?;
                let interval = self.interval_expr()?;
                self.expect(Tok::Semi, "`;`")?;
                effect.outputs.insert(target, interval);
            }
        }
        Ok(effect)
    }

    // Expressions, loosest to tightest: or, and, not, comparison, additive,
    // multiplicative, unary minus, atoms.
    fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let right = self.and_expr()?;
            left = Expr::bin(BinOp::Or, left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut left = self.not_expr()?;
        while self.eat(&Tok::And) {
            let right = self.not_expr()?;
            left = Expr::bin(BinOp::And, left, right);
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Not) {
            Ok(Expr::Unary(UnaryOp::Not, Box::new(self.not_expr()?)))
        } else {
            self.cmp_expr()
        }
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let left = self.add_expr()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(left),
        };
        self.bump();
        let right = self.add_expr()?;
        Ok(Expr::bin(op, left, right))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut left = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let right = self.mul_expr()?;
            left = Expr::bin(op, left, right);
        }
        Ok(left)
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut left = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Rem,
                _ => break,
            };
            self.bump();
            let right = self.unary_expr()?;
            left = Expr::bin(op, left, right);
        }
        Ok(left)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            // Fold a negated literal so `-3` round-trips as one node.
            if let Tok::Int(v) = *self.peek() {
                self.bump();
                return Ok(Expr::Int(-v));
            }
            Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary_expr()?)))
        } else {
            self.atom_expr()
        }
    }

    fn atom_expr(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Ev => {
                self.bump();
                Ok(Expr::Event)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Ref(name))
            }
            Tok::Ft => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let chan = self.ident("channel name")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Ft(chan))
            }
            Tok::NonEmpty => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let chan = self.ident("channel name")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::NonEmpty(chan))
            }
            Tok::If => {
                self.bump();
                let cond = self.expr()?;
                self.expect(Tok::Then, "`then`")?;
                let then_branch = self.expr()?;
                self.expect(Tok::Else, "`else`")?;
                let else_branch = self.expr()?;
                Ok(Expr::If(Box::new(cond), Box::new(then_branch), Box::new(else_branch)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.err(&["expression"]),
        }
    }

    /// Interval expression: `<>`, `<e>` (expression without a bare
    /// comparison; parenthesize to compare), or a conditional.
    fn interval_expr(&mut self) -> PResult<IntervalExpr> {
        match self.peek() {
            Tok::If => {
                self.bump();
                let cond = self.expr()?;
                self.expect(Tok::Then, "`then`")?;
                let t = self.interval_expr()?;
                self.expect(Tok::Else, "`else`")?;
                let e = self.interval_expr()?;
                Ok(IntervalExpr::If(cond, Box::new(t), Box::new(e)))
            }
            Tok::Lt | Tok::IntervalOpen => {
                let unicode = self.peek() == &Tok::IntervalOpen;
                self.bump();
                let close = if unicode { Tok::IntervalClose } else { Tok::Gt };
                if self.eat(&close) {
                    return Ok(IntervalExpr::Empty);
                }
                let e = self.add_expr()?;
                self.expect(close, "interval close")?;
                Ok(IntervalExpr::Singleton(e))
            }
            _ => self.err(&["`<`", "`if`"]),
        }
    }

    fn compose_decl(&mut self) -> PResult<CompositionDecl> {
        self.expect(Tok::Compose, "`compose`")?;
        let name = self.ident("composition name")?;
        self.expect(Tok::Assign, "`=`")?;
        let expr = self.compose_expr()?;
        Ok(CompositionDecl { name, expr })
    }

    /// `;` binds tighter than `||` and `(+)`, which share a level; all
    /// operators associate to the left.
    fn compose_expr(&mut self) -> PResult<CompositionExpr> {
        let mut left = self.compose_seq()?;
        loop {
            if self.eat(&Tok::Pipe2) {
                let right = self.compose_seq()?;
                left = CompositionExpr::Par(Box::new(left), Box::new(right));
            } else if self.eat(&Tok::AltOp) {
                let right = self.compose_seq()?;
                left = CompositionExpr::Alt(Box::new(left), Box::new(right));
            } else {
                break;
            }
        }
        Ok(left)
    }

    fn compose_seq(&mut self) -> PResult<CompositionExpr> {
        let mut left = self.compose_atom()?;
        while self.eat(&Tok::Semi) {
            let right = self.compose_atom()?;
            left = CompositionExpr::Seq(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn compose_atom(&mut self) -> PResult<CompositionExpr> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(CompositionExpr::Ref(name))
            }
            Tok::LParen => {
                self.bump();
                let e = self.compose_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Loop => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let spec = if self.eat(&Tok::Auto) {
                    let delay = self.integer("delay ticks")?;
                    LoopSpec::Auto(delay.max(0) as u64)
                } else if self.eat(&Tok::Manual) {
                    let mut policy = RestartPolicy::default();
                    if self.eat(&Tok::Restart) {
                        policy.allow_restart_while_running = true;
                    }
                    if self.eat(&Tok::Gap) {
                        self.expect(Tok::Assign, "`=`")?;
                        policy.min_gap_ticks = self.integer("gap ticks")?.max(0) as u64;
                    }
                    LoopSpec::Manual(policy)
                } else {
                    return self.err(&["`auto`", "`manual`"]);
                };
                self.expect(Tok::RParen, "`)`")?;
                let body = self.compose_atom()?;
                Ok(match spec {
                    LoopSpec::Auto(d) => CompositionExpr::LoopAuto(Box::new(body), d),
                    LoopSpec::Manual(p) => CompositionExpr::LoopNonAuto(Box::new(body), p),
                })
            }
            _ => self.err(&["process name", "`(`", "`loop`"]),
        }
    }

    fn env_decl(&mut self) -> PResult<EnvDecl> {
        self.expect(Tok::Env, "`env`")?;
        let name = self.ident("env name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let mut channel = self.ident("channel name")?;
            if self.eat(&Tok::Dot) {
                let port = self.ident("port name")?;
                channel = format!("{channel}.{port}");
            }
            self.expect(Tok::AtSign, "`@`")?;
            let tick = self.integer("tick")?;
            self.expect(Tok::Assign, "`=`")?;
            let messages = self.interval_lit()?;
            self.expect(Tok::Semi, "`;`")?;
            entries.push(EnvEntry { channel, tick: tick.max(0) as usize, messages });
        }
        Ok(EnvDecl { name, entries })
    }

    fn interval_lit(&mut self) -> PResult<Vec<MessageLit>> {
        let unicode = match self.peek() {
            Tok::Lt => false,
            Tok::IntervalOpen => true,
            _ => return self.err(&["`<`"]),
        };
        self.bump();
        let close = if unicode { Tok::IntervalClose } else { Tok::Gt };
        let mut messages = Vec::new();
        if self.eat(&close) {
            return Ok(messages);
        }
        loop {
            messages.push(self.message_lit()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(close, "interval close")?;
        Ok(messages)
    }
}

enum LoopSpec {
    Auto(u64),
    Manual(RestartPolicy),
}

/// Convenience for tests and tools: parse a single expression.
pub fn parse_expr(src: &str) -> Result<Expr, Vec<ParseDiagnostic>> {
    let toks = lex(src).map_err(|e| {
        vec![ParseDiagnostic { line: e.pos.line, col: e.pos.col, message: e.message, expected: vec![] }]
    })?;
    let mut parser = Parser { toks, i: 0 };
    let e = parser.expr().map_err(|d| vec![d])?;
    parser.expect(Tok::Eof, "end of input").map_err(|d| vec![d])?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinOp;

    const MINIMAL: &str = "\
process P() {
  in a: Int;
  out y: Int;
  buf a = 0;
  ending: true;
  calc { y = <ft(a)>; }
}
";

    #[test]
    fn minimal_process_parses() {
        let doc = parse(MINIMAL).unwrap();
        assert_eq!(doc.processes.len(), 1);
        let p = &doc.processes[0];
        assert_eq!(p.name, "P");
        assert_eq!(p.channels.len(), 2);
        assert_eq!(p.buffers.len(), 1);
        assert_eq!(p.behavior.ending, Expr::Bool(true));
        assert!(crate::process::validate(p).is_empty());
    }

    #[test]
    fn missing_ending_clause_is_named() {
        let src = "process P() { in a: Int; buf a = 0; calc { } }";
        let err = parse(src).unwrap_err();
        assert!(err[0].expected.contains(&"`ending`".to_string()), "{:?}", err);
    }

    #[test]
    fn compose_precedence_seq_over_par() {
        let src = format!("{MINIMAL}compose M = P ; P || P\n");
        // Reference checks run after parse; P resolves.
        let doc = parse(&src).unwrap();
        let expr = &doc.compositions[0].expr;
        match expr {
            CompositionExpr::Par(l, _) => {
                assert!(matches!(**l, CompositionExpr::Seq(_, _)));
            }
            other => panic!("expected Par at the top, got {other:?}"),
        }
    }

    #[test]
    fn parenthesized_compose() {
        let src = format!("{MINIMAL}compose M = (P ; P) (+) P\n");
        let doc = parse(&src).unwrap();
        assert!(matches!(doc.compositions[0].expr, CompositionExpr::Alt(_, _)));
    }

    #[test]
    fn unresolved_process_reference() {
        let src = "compose M = Nope";
        let err = parse(src).unwrap_err();
        assert!(err[0].message.contains("unresolved reference"));
    }

    #[test]
    fn loops_parse_with_specifiers() {
        let src = format!("{MINIMAL}compose A = loop(auto 3) P\ncompose B = loop(manual restart gap = 2) P\n");
        let doc = parse(&src).unwrap();
        assert!(matches!(doc.compositions[0].expr, CompositionExpr::LoopAuto(_, 3)));
        match &doc.compositions[1].expr {
            CompositionExpr::LoopNonAuto(_, policy) => {
                assert!(policy.allow_restart_while_running);
                assert_eq!(policy.min_gap_ticks, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn env_entries_parse() {
        let src = format!("{MINIMAL}env E {{ entry @ 0 = <ev>; P.a @ 3 = <1, 2>; P.a @ 5 = <>; }}\n");
        let doc = parse(&src).unwrap();
        let env = &doc.envs[0];
        assert_eq!(env.entries.len(), 3);
        assert_eq!(env.entries[0].channel, "entry");
        assert_eq!(env.entries[1].channel, "P.a");
        assert_eq!(env.entries[1].messages, vec![MessageLit::Int(1), MessageLit::Int(2)]);
        assert_eq!(env.entries[2].messages, vec![]);
    }

    #[test]
    fn expression_precedence() {
        let e = parse_expr("1 + 2 * 3 == 7 and not false").unwrap();
        // (((1 + (2*3)) == 7) and (not false))
        match e {
            Expr::Binary(BinOp::And, l, _) => {
                assert!(matches!(*l, Expr::Binary(BinOp::Eq, _, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_expr("-3").unwrap(), Expr::Int(-3));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("process P() { in a: Int buf }").unwrap_err();
        assert_eq!(err[0].line, 1);
        assert!(err[0].col > 0);
    }

    #[test]
    fn type_decls_parse_and_attach() {
        let src = "type Color = red | green;\nprocess P() {\n  in a: Color;\n  buf a = red;\n  ending: ft(a) == green;\n  calc { }\n}\n";
        let doc = parse(src).unwrap();
        assert_eq!(doc.enums[0].symbols, vec!["red", "green"]);
        let p = &doc.processes[0];
        assert_eq!(p.enums.len(), 1);
        assert_eq!(
            p.buffers[0].init_value,
            Message::Sym { ty: "Color".into(), symbol: "red".into() }
        );
        assert!(crate::process::validate(p).is_empty());
    }
}
