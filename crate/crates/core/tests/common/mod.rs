//! Shared test support: an independent reference interpreter for the
//! component formulas, plus seeded generators for specs, envs, composition
//! trees, and whole documents.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pspec::component::{ChooserPolicy, RestartPolicy};
use pspec::compose::ProcessExpr;
use pspec::dsl::{
    CompositionDecl, CompositionExpr, EnumDecl, EnvDecl, EnvEntry, MessageLit, SpecDocument,
};
use pspec::expr::{eval, eval_interval, BinOp, EvalEnv, Expr, IntervalExpr, UnaryOp};
use pspec::process::{
    buffer_var, AssumptionClause, BufferDecl, ChannelDecl, Direction, EffectSpec,
    ElementaryProcessSpec, LocalDecl,
};
use pspec::stream::{Message, MessageType, TimeInterval, TimedStream};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Reference interpreter: a direct fold over the component formulas, kept
// independent of the production step machine.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    EndingFires,
    ActiveStep,
    IdleNoStart,
    IdleStart,
}

#[derive(Debug)]
pub struct ReferenceRun {
    /// Per tick, per output port (`stop` plus data outputs).
    pub outputs: Vec<BTreeMap<String, TimeInterval>>,
    /// Pre-step activity per tick.
    pub modes: Vec<bool>,
    /// Buffer values after each tick, keyed by buffer variable.
    pub buffers: Vec<BTreeMap<String, Message>>,
    /// Local values after each tick.
    pub locals: Vec<BTreeMap<String, Message>>,
    pub fired: Vec<Formula>,
}

/// Fold the formula set over port-keyed input streams. Panics if the guard
/// set is not exhaustive and exclusive; that property is the point of the
/// acceptance check.
pub fn reference_run(
    spec: &ElementaryProcessSpec,
    inputs: &BTreeMap<String, TimedStream>,
    horizon: usize,
) -> ReferenceRun {
    let empty_values: BTreeMap<String, Message> = BTreeMap::new();
    let empty_intervals: BTreeMap<String, TimeInterval> = BTreeMap::new();
    let empty_buffer_of: BTreeMap<String, String> = BTreeMap::new();

    let data_inputs: Vec<String> = spec.inputs().map(|c| c.name.clone()).collect();
    let data_outputs: Vec<String> = spec.outputs().map(|c| c.name.clone()).collect();
    let buffer_of: BTreeMap<String, String> = data_inputs
        .iter()
        .map(|i| (i.clone(), buffer_var(i)))
        .collect();

    let const_env = EvalEnv {
        params: &spec.params,
        locals: &empty_values,
        buffers: &empty_values,
        inputs: &empty_intervals,
        buffer_of: &empty_buffer_of,
        enums: &spec.enums,
    };
    let mut buffers: BTreeMap<String, Message> = spec
        .buffers
        .iter()
        .map(|b| (buffer_var(&b.for_input), b.init_value.clone()))
        .collect();
    let mut locals: BTreeMap<String, Message> = spec
        .behavior
        .locals
        .iter()
        .map(|l| (l.name.clone(), eval(&l.init, &const_env)))
        .collect();
    let mut active = false;

    let mut run = ReferenceRun {
        outputs: Vec::new(),
        modes: Vec::new(),
        buffers: Vec::new(),
        locals: Vec::new(),
        fired: Vec::new(),
    };

    for t in 0..horizon {
        let at = |port: &str| -> TimeInterval {
            inputs
                .get(port)
                .map(|s| s.interval_at(t).expect("within horizon").clone())
                .unwrap_or_else(TimeInterval::empty)
        };
        let current: BTreeMap<String, TimeInterval> =
            data_inputs.iter().map(|i| (i.clone(), at(i))).collect();
        let start_nonempty = !at("start").is_empty();

        let env = EvalEnv {
            params: &spec.params,
            locals: &locals,
            buffers: &buffers,
            inputs: &current,
            buffer_of: &buffer_of,
            enums: &spec.enums,
        };
        let ending = eval(&spec.behavior.ending, &env) == Message::Bool(true);

        // The four guards, evaluated independently; exactly one must hold.
        let g1 = active && ending;
        let g2 = active && !ending;
        let g3 = !active && !start_nonempty;
        let g4 = !active && start_nonempty;
        let held = [g1, g2, g3, g4].iter().filter(|g| **g).count();
        assert_eq!(held, 1, "guards must be exhaustive and exclusive at tick {t}");

        run.modes.push(active);
        let mut outputs: BTreeMap<String, TimeInterval> = data_outputs
            .iter()
            .map(|o| (o.clone(), TimeInterval::empty()))
            .chain([("stop".to_string(), TimeInterval::empty())])
            .collect();

        if g1 || g2 {
            let effect = if g1 {
                spec.behavior.final_effect()
            } else {
                &spec.behavior.calc
            };
            for (chan, ie) in &effect.outputs {
                outputs.insert(chan.clone(), eval_interval(ie, &env));
            }
            let next_buffers: Vec<(String, Message)> = effect
                .buffers
                .iter()
                .map(|(input, e)| (buffer_var(input), eval(e, &env)))
                .collect();
            let next_locals: Vec<(String, Message)> = effect
                .locals
                .iter()
                .map(|(name, e)| (name.clone(), eval(e, &env)))
                .collect();
            for (k, v) in next_buffers {
                buffers.insert(k, v);
            }
            for (k, v) in next_locals {
                locals.insert(k, v);
            }
            if g1 {
                outputs.insert("stop".to_string(), TimeInterval::singleton(Message::Event));
                active = false;
                run.fired.push(Formula::EndingFires);
            } else {
                run.fired.push(Formula::ActiveStep);
            }
        } else {
            // Buffer refresh clauses apply on every inactive tick.
            for input in &data_inputs {
                let interval = &current[input];
                if let Ok(m) = interval.ft() {
                    buffers.insert(buffer_var(input), m.clone());
                }
            }
            if g4 {
                let init_env = EvalEnv {
                    params: &spec.params,
                    locals: &empty_values,
                    buffers: &empty_values,
                    inputs: &empty_intervals,
                    buffer_of: &empty_buffer_of,
                    enums: &spec.enums,
                };
                let assigns: Vec<(String, Message)> = spec
                    .behavior
                    .init_process
                    .iter()
                    .map(|(name, e)| (name.clone(), eval(e, &init_env)))
                    .collect();
                for (k, v) in assigns {
                    locals.insert(k, v);
                }
                active = true;
                run.fired.push(Formula::IdleStart);
            } else {
                run.fired.push(Formula::IdleNoStart);
            }
        }

        run.outputs.push(outputs);
        run.buffers.push(buffers.clone());
        run.locals.push(locals.clone());
    }
    run
}

// ---------------------------------------------------------------------------
// Spec and env generators.
// ---------------------------------------------------------------------------

pub fn color_enum() -> BTreeMap<String, Vec<String>> {
    BTreeMap::from([(
        "Color".to_string(),
        vec!["red".to_string(), "green".to_string(), "blue".to_string()],
    )])
}

fn random_type(rng: &mut ChaCha8Rng, with_enum: bool) -> MessageType {
    match rng.random_range(0..if with_enum { 4 } else { 3 }) {
        0 => MessageType::Int,
        1 => MessageType::Bool,
        2 => MessageType::Event,
        _ => MessageType::Enum("Color".to_string()),
    }
}

fn random_value(rng: &mut ChaCha8Rng, ty: &MessageType) -> Message {
    match ty {
        MessageType::Int => Message::Int(rng.random_range(-5..10)),
        MessageType::Bool => Message::Bool(rng.random()),
        MessageType::Event => Message::Event,
        MessageType::Enum(name) => {
            let symbols = ["red", "green", "blue"];
            Message::Sym {
                ty: name.clone(),
                symbol: symbols[rng.random_range(0..symbols.len())].to_string(),
            }
        }
    }
}

struct SymbolPool {
    params: Vec<(String, MessageType)>,
    locals: Vec<(String, MessageType)>,
    buffers: Vec<(String, MessageType)>,
    inputs: Vec<(String, MessageType)>,
}

impl SymbolPool {
    fn of_type<'a>(
        items: &'a [(String, MessageType)],
        ty: &MessageType,
    ) -> Vec<&'a String> {
        items.iter().filter(|(_, t)| t == ty).map(|(n, _)| n).collect()
    }
}

/// Random expression of the requested type over the pool's symbols.
fn gen_expr(rng: &mut ChaCha8Rng, ty: &MessageType, pool: &SymbolPool, depth: usize) -> Expr {
    // Leaves: literals or symbol references of the right type.
    let leaf = |rng: &mut ChaCha8Rng| -> Expr {
        let mut candidates: Vec<Expr> = Vec::new();
        for name in SymbolPool::of_type(&pool.params, ty) {
            candidates.push(Expr::Ref(name.clone()));
        }
        for name in SymbolPool::of_type(&pool.locals, ty) {
            candidates.push(Expr::Ref(name.clone()));
        }
        for name in SymbolPool::of_type(&pool.buffers, ty) {
            candidates.push(Expr::Ref(name.clone()));
        }
        for name in SymbolPool::of_type(&pool.inputs, ty) {
            candidates.push(Expr::Ft(name.clone()));
        }
        match ty {
            MessageType::Int => candidates.push(Expr::Int(rng.random_range(-4..8))),
            MessageType::Bool => {
                candidates.push(Expr::Bool(rng.random()));
                for (name, _) in &pool.inputs {
                    candidates.push(Expr::NonEmpty(name.clone()));
                }
            }
            MessageType::Event => candidates.push(Expr::Event),
            MessageType::Enum(_) => {
                let symbols = ["red", "green", "blue"];
                candidates.push(Expr::Ref(symbols[rng.random_range(0..3)].to_string()));
            }
        }
        candidates[rng.random_range(0..candidates.len())].clone()
    };
    if depth == 0 {
        return leaf(rng);
    }
    match ty {
        MessageType::Int => match rng.random_range(0..6) {
            0 => leaf(rng),
            1..=3 => {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul][rng.random_range(0..3)];
                Expr::bin(
                    op,
                    gen_expr(rng, ty, pool, depth - 1),
                    gen_expr(rng, ty, pool, depth - 1),
                )
            }
            4 => Expr::bin(
                BinOp::Div,
                gen_expr(rng, ty, pool, depth - 1),
                gen_expr(rng, ty, pool, depth - 1),
            ),
            _ => Expr::If(
                Box::new(gen_expr(rng, &MessageType::Bool, pool, depth - 1)),
                Box::new(gen_expr(rng, ty, pool, depth - 1)),
                Box::new(gen_expr(rng, ty, pool, depth - 1)),
            ),
        },
        MessageType::Bool => match rng.random_range(0..6) {
            0 => leaf(rng),
            1 => Expr::bin(
                [BinOp::And, BinOp::Or][rng.random_range(0..2)],
                gen_expr(rng, ty, pool, depth - 1),
                gen_expr(rng, ty, pool, depth - 1),
            ),
            2 => Expr::Unary(UnaryOp::Not, Box::new(gen_expr(rng, ty, pool, depth - 1))),
            3..=4 => {
                let op = [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge][rng.random_range(0..4)];
                Expr::bin(
                    op,
                    gen_expr(rng, &MessageType::Int, pool, depth - 1),
                    gen_expr(rng, &MessageType::Int, pool, depth - 1),
                )
            }
            _ => {
                let operand_ty = random_type(rng, true);
                Expr::bin(
                    [BinOp::Eq, BinOp::Ne][rng.random_range(0..2)],
                    gen_expr(rng, &operand_ty, pool, 0),
                    gen_expr(rng, &operand_ty, pool, 0),
                )
            }
        },
        MessageType::Event | MessageType::Enum(_) => {
            if rng.random_bool(0.3) {
                Expr::If(
                    Box::new(gen_expr(rng, &MessageType::Bool, pool, depth - 1)),
                    Box::new(leaf(rng)),
                    Box::new(leaf(rng)),
                )
            } else {
                leaf(rng)
            }
        }
    }
}

/// Random well-formed elementary process: up to 3 inputs, up to 2 outputs,
/// behavior expressions of depth at most 3.
pub fn gen_spec(rng: &mut ChaCha8Rng, name: &str) -> ElementaryProcessSpec {
    let mut spec = ElementaryProcessSpec::new(name);
    spec.enums = color_enum();

    let n_inputs = rng.random_range(0..=3);
    let n_outputs = rng.random_range(0..=2);
    for i in 0..n_inputs {
        let ty = random_type(rng, true);
        spec.channels.push(ChannelDecl::input(format!("x{i}"), ty.clone()));
        spec.buffers.push(BufferDecl {
            for_input: format!("x{i}"),
            init_value: random_value(rng, &ty),
        });
    }
    for i in 0..n_outputs {
        let ty = random_type(rng, true);
        spec.channels.push(ChannelDecl::output(format!("y{i}"), ty));
    }
    let n_params = rng.random_range(0..=2);
    for i in 0..n_params {
        spec.params
            .insert(format!("k{i}"), Message::Int(rng.random_range(0..6)));
    }
    let n_locals = rng.random_range(0..=2);
    for i in 0..n_locals {
        let ty = if rng.random_bool(0.7) { MessageType::Int } else { MessageType::Bool };
        spec.behavior.locals.push(LocalDecl {
            name: format!("v{i}"),
            msg_type: ty.clone(),
            init: const_literal(rng, &ty),
        });
    }

    let pool = SymbolPool {
        params: spec
            .params
            .iter()
            .map(|(k, v)| (k.clone(), v.message_type()))
            .collect(),
        locals: spec
            .behavior
            .locals
            .iter()
            .map(|l| (l.name.clone(), l.msg_type.clone()))
            .collect(),
        buffers: spec
            .inputs()
            .map(|c| (buffer_var(&c.name), c.msg_type.clone()))
            .collect(),
        inputs: spec
            .inputs()
            .map(|c| (c.name.clone(), c.msg_type.clone()))
            .collect(),
    };

    spec.behavior.ending = gen_expr(rng, &MessageType::Bool, &pool, 3);

    let gen_effect = |rng: &mut ChaCha8Rng, spec: &ElementaryProcessSpec| -> EffectSpec {
        let mut effect = EffectSpec::default();
        for c in spec.outputs() {
            match rng.random_range(0..3) {
                0 => {}
                1 => {
                    effect.outputs.insert(
                        c.name.clone(),
                        IntervalExpr::Singleton(gen_expr(rng, &c.msg_type, &pool, 2)),
                    );
                }
                _ => {
                    effect.outputs.insert(
                        c.name.clone(),
                        IntervalExpr::If(
                            gen_expr(rng, &MessageType::Bool, &pool, 1),
                            Box::new(IntervalExpr::Singleton(gen_expr(rng, &c.msg_type, &pool, 1))),
                            Box::new(IntervalExpr::Empty),
                        ),
                    );
                }
            }
        }
        for c in spec.inputs().collect::<Vec<_>>() {
            if rng.random_bool(0.4) {
                effect
                    .buffers
                    .insert(c.name.clone(), gen_expr(rng, &c.msg_type, &pool, 2));
            }
        }
        for l in &spec.behavior.locals {
            if rng.random_bool(0.7) {
                effect
                    .locals
                    .insert(l.name.clone(), gen_expr(rng, &l.msg_type, &pool, 2));
            }
        }
        effect
    };
    spec.behavior.calc = gen_effect(rng, &spec);
    if rng.random_bool(0.4) {
        spec.behavior.calc_final = Some(gen_effect(rng, &spec));
    }
    // Restart assignments over a subset of locals, constant over params.
    let local_decls = spec.behavior.locals.clone();
    for l in &local_decls {
        if rng.random_bool(0.6) {
            let value = match &l.msg_type {
                MessageType::Int => {
                    if !spec.params.is_empty() && rng.random_bool(0.4) {
                        let keys: Vec<&String> = spec.params.keys().collect();
                        Expr::Ref(keys[rng.random_range(0..keys.len())].clone())
                    } else {
                        Expr::Int(rng.random_range(0..5))
                    }
                }
                MessageType::Bool => Expr::Bool(rng.random()),
                _ => continue,
            };
            spec.behavior.init_process.insert(l.name.clone(), value);
        }
    }
    spec
}

/// Literal expression of the given type, for constant initializers.
fn const_literal(rng: &mut ChaCha8Rng, ty: &MessageType) -> Expr {
    match ty {
        MessageType::Int => Expr::Int(rng.random_range(0..5)),
        MessageType::Bool => Expr::Bool(rng.random()),
        MessageType::Event => Expr::Event,
        MessageType::Enum(_) => Expr::Ref("red".to_string()),
    }
}

/// Port-keyed random input streams for a single process, including `start`.
pub fn gen_process_inputs(
    rng: &mut ChaCha8Rng,
    spec: &ElementaryProcessSpec,
    horizon: usize,
) -> BTreeMap<String, TimedStream> {
    let mut streams = BTreeMap::new();
    let mut start = TimedStream::new(MessageType::Event, horizon);
    for t in 0..horizon {
        if rng.random_bool(0.2) {
            start
                .set_interval(t, TimeInterval::singleton(Message::Event))
                .unwrap();
        }
    }
    streams.insert("start".to_string(), start);
    for c in spec.inputs() {
        let mut s = TimedStream::new(c.msg_type.clone(), horizon);
        for t in 0..horizon {
            if rng.random_bool(0.3) {
                let n = rng.random_range(1..=2);
                let msgs = (0..n).map(|_| random_value(rng, &c.msg_type)).collect();
                s.set_interval(t, TimeInterval::from_messages(msgs)).unwrap();
            }
        }
        streams.insert(c.name.clone(), s);
    }
    streams
}

// ---------------------------------------------------------------------------
// Fixed-duration processes and composition trees for the wcet suite.
// ---------------------------------------------------------------------------

/// Process that runs for exactly `d` active ticks once started.
pub fn fixed_duration_spec(name: &str, d: u64) -> ElementaryProcessSpec {
    let mut spec = ElementaryProcessSpec::new(name);
    spec.params.insert("d".into(), Message::Int(d as i64));
    spec.behavior.locals.push(LocalDecl {
        name: "n".into(),
        msg_type: MessageType::Int,
        init: Expr::Ref("d".into()),
    });
    spec.behavior.init_process.insert("n".into(), Expr::Ref("d".into()));
    spec.behavior.ending = Expr::bin(BinOp::Eq, Expr::Ref("n".into()), Expr::Int(1));
    spec.behavior.calc.locals.insert(
        "n".into(),
        Expr::bin(BinOp::Sub, Expr::Ref("n".into()), Expr::Int(1)),
    );
    spec.declared_wcet = Some(d);
    spec
}

/// Process whose ending predicate holds on its first active tick.
pub fn immediate_spec(name: &str) -> ElementaryProcessSpec {
    let mut spec = ElementaryProcessSpec::new(name);
    spec.declared_wcet = Some(1);
    spec
}

/// Random Seq/Par/Alt tree over fixed-duration leaves with durations 1..=6.
/// Leaf names are unique within the tree.
pub fn gen_wcet_tree(rng: &mut ChaCha8Rng, depth: usize, counter: &mut usize) -> ProcessExpr {
    if depth == 0 || (depth < 3 && rng.random_bool(0.25)) {
        *counter += 1;
        let d = rng.random_range(1..=6);
        return ProcessExpr::elem(fixed_duration_spec(&format!("P{counter}"), d));
    }
    let l = gen_wcet_tree(rng, depth - 1, counter);
    let r = gen_wcet_tree(rng, depth - 1, counter);
    match rng.random_range(0..3) {
        0 => ProcessExpr::seq(l, r),
        1 => ProcessExpr::par(l, r),
        _ => ProcessExpr::alt(l, r, ChooserPolicy::RoundRobin),
    }
}

/// All Seq/Par/Alt shapes of depth at most 2 (49 shapes), durations drawn
/// from the seeded generator.
pub fn all_shapes_depth2(rng: &mut ChaCha8Rng) -> Vec<ProcessExpr> {
    fn shapes(depth: usize, rng: &mut ChaCha8Rng, counter: &mut usize) -> Vec<ProcessExpr> {
        let mut out = Vec::new();
        *counter += 1;
        let d = rng.random_range(1..=6);
        out.push(ProcessExpr::elem(fixed_duration_spec(
            &format!("S{counter}"),
            d,
        )));
        if depth == 0 {
            return out;
        }
        let subs = |rng: &mut ChaCha8Rng, counter: &mut usize| shapes(depth - 1, rng, counter);
        for op in 0..3 {
            for l in subs(rng, counter) {
                for r in subs(rng, counter) {
                    out.push(match op {
                        0 => ProcessExpr::seq(l.clone(), r.clone()),
                        1 => ProcessExpr::par(l.clone(), r.clone()),
                        _ => ProcessExpr::alt(l.clone(), r.clone(), ChooserPolicy::RoundRobin),
                    });
                }
            }
        }
        out
    }
    let mut counter = 0;
    shapes(2, rng, &mut counter)
}

/// Does the tree contain an alternate composition?
pub fn has_alt(expr: &ProcessExpr) -> bool {
    match expr {
        ProcessExpr::Elem(_) => false,
        ProcessExpr::Alt(..) => true,
        ProcessExpr::Seq(l, r) | ProcessExpr::Par(l, r) => has_alt(l) || has_alt(r),
        ProcessExpr::LoopAuto(b, _) | ProcessExpr::LoopNonAuto(b, _) => has_alt(b),
    }
}

// ---------------------------------------------------------------------------
// Document generator for parser round-trips.
// ---------------------------------------------------------------------------

pub fn gen_document(rng: &mut ChaCha8Rng) -> SpecDocument {
    let mut doc = SpecDocument::default();
    doc.enums.push(EnumDecl {
        name: "Color".to_string(),
        symbols: vec!["red".to_string(), "green".to_string(), "blue".to_string()],
    });
    let n_procs = rng.random_range(1..=3);
    for i in 0..n_procs {
        let mut spec = gen_spec(rng, &format!("Proc{i}"));
        if rng.random_bool(0.5) {
            spec.declared_wcet = Some(rng.random_range(1..=9));
        }
        if rng.random_bool(0.4) {
            let targets: Vec<String> = spec.inputs().map(|c| c.name.clone()).collect();
            if !targets.is_empty() {
                let t = &targets[rng.random_range(0..targets.len())];
                spec.behavior.assumptions.push(AssumptionClause::MsgBound {
                    channel: t.clone(),
                    bound: rng.random_range(1..=2),
                });
            }
        }
        doc.processes.push(spec);
    }
    let n_comps = rng.random_range(0..=2);
    for i in 0..n_comps {
        let expr = gen_comp_expr(rng, &doc, 2);
        doc.compositions.push(CompositionDecl { name: format!("M{i}"), expr });
    }
    let n_envs = rng.random_range(0..=2);
    for i in 0..n_envs {
        let mut entries = Vec::new();
        entries.push(EnvEntry {
            channel: "entry".to_string(),
            tick: rng.random_range(0..5),
            messages: vec![MessageLit::Event],
        });
        for p in &doc.processes {
            for c in p.channels.iter().filter(|c| c.direction == Direction::Input) {
                if rng.random_bool(0.4) {
                    let lit = match &c.msg_type {
                        MessageType::Int => MessageLit::Int(rng.random_range(-3..9)),
                        MessageType::Bool => MessageLit::Bool(rng.random()),
                        MessageType::Event => MessageLit::Event,
                        MessageType::Enum(_) => MessageLit::Sym("green".to_string()),
                    };
                    entries.push(EnvEntry {
                        channel: format!("{}.{}", p.name, c.name),
                        tick: rng.random_range(0..20),
                        messages: vec![lit],
                    });
                }
            }
        }
        doc.envs.push(EnvDecl { name: format!("E{i}"), entries });
    }
    doc
}

fn gen_comp_expr(rng: &mut ChaCha8Rng, doc: &SpecDocument, depth: usize) -> CompositionExpr {
    if depth == 0 || rng.random_bool(0.3) {
        let i = rng.random_range(0..doc.processes.len());
        return CompositionExpr::Ref(doc.processes[i].name.clone());
    }
    match rng.random_range(0..5) {
        0 => CompositionExpr::Seq(
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
        ),
        1 => CompositionExpr::Par(
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
        ),
        2 => CompositionExpr::Alt(
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
        ),
        3 => CompositionExpr::LoopAuto(
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
            rng.random_range(1..=5),
        ),
        _ => CompositionExpr::LoopNonAuto(
            Box::new(gen_comp_expr(rng, doc, depth - 1)),
            RestartPolicy {
                allow_restart_while_running: rng.random(),
                min_gap_ticks: rng.random_range(1..=3),
            },
        ),
    }
}
