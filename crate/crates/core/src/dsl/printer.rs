//! Canonical text form of a document. `parse(print(doc))` reconstructs the
//! same document, so the printer is deliberately conservative with
//! parentheses.

use std::fmt::Write;

use super::{CompositionExpr, SpecDocument};
use crate::expr::{BinOp, Expr, IntervalExpr, UnaryOp};
use crate::process::{AssumptionClause, Direction, ElementaryProcessSpec};
use crate::stream::{Message, MessageType};

/// Binding strength used for parenthesization; higher binds tighter.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Or, ..) => 1,
        Expr::Binary(BinOp::And, ..) => 2,
        Expr::Unary(UnaryOp::Not, _) => 3,
        Expr::Binary(
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge,
            ..,
        ) => 4,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 5,
        Expr::Binary(BinOp::Mul | BinOp::Div | BinOp::Rem, ..) => 6,
        Expr::Unary(UnaryOp::Neg, _) => 7,
        // Conditionals read ambiguously inside operators; parenthesize.
        Expr::If(..) => 0,
        _ => 8,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_level: u8) {
    let lv = level(e);
    let parens = lv < min_level;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Bool(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Event => out.push_str("ev"),
        Expr::Ref(name) => out.push_str(name),
        Expr::Ft(chan) => {
            let _ = write!(out, "ft({chan})");
        }
        Expr::NonEmpty(chan) => {
            let _ = write!(out, "nonempty({chan})");
        }
        Expr::Unary(UnaryOp::Not, inner) => {
            out.push_str("not ");
            write_expr(out, inner, 3);
        }
        Expr::Unary(UnaryOp::Neg, inner) => {
            out.push('-');
            write_expr(out, inner, 7);
        }
        Expr::Binary(op, l, r) => {
            let (left_min, right_min) = match op {
                BinOp::Or => (1, 2),
                BinOp::And => (2, 3),
                BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => (5, 5),
                BinOp::Add | BinOp::Sub => (5, 6),
                BinOp::Mul | BinOp::Div | BinOp::Rem => (6, 7),
            };
            write_expr(out, l, left_min);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, right_min);
        }
        Expr::If(c, t, e) => {
            out.push_str("if ");
            write_expr(out, c, 1);
            out.push_str(" then ");
            write_expr(out, t, 1);
            out.push_str(" else ");
            write_expr(out, e, 1);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_interval(out: &mut String, ie: &IntervalExpr) {
    match ie {
        IntervalExpr::Empty => out.push_str("<>"),
        IntervalExpr::Singleton(e) => {
            out.push('<');
            // Additive level: bare comparisons inside `<...>` would be
            // ambiguous with the closing bracket.
            write_expr(out, e, 5);
            out.push('>');
        }
        IntervalExpr::If(c, t, e) => {
            out.push_str("if ");
            write_expr(out, c, 1);
            out.push_str(" then ");
            write_interval(out, t);
            out.push_str(" else ");
            write_interval(out, e);
        }
    }
}

fn type_name(ty: &MessageType) -> String {
    ty.to_string()
}

fn message_lit(m: &Message) -> String {
    m.to_string()
}

fn write_process(out: &mut String, p: &ElementaryProcessSpec) {
    let _ = write!(out, "process {}(", p.name);
    let params: Vec<String> = p
        .params
        .iter()
        .map(|(k, v)| format!("{k} = {}", message_lit(v)))
        .collect();
    out.push_str(&params.join(", "));
    out.push_str(") {\n");
    for c in &p.channels {
        let dir = match c.direction {
            Direction::Input => "in",
            Direction::Output => "out",
        };
        let _ = writeln!(out, "  {dir} {}: {};", c.name, type_name(&c.msg_type));
    }
    for b in &p.buffers {
        let _ = writeln!(out, "  buf {} = {};", b.for_input, message_lit(&b.init_value));
    }
    for l in &p.behavior.locals {
        let _ = writeln!(
            out,
            "  init {}: {} = {};",
            l.name,
            type_name(&l.msg_type),
            expr_to_string(&l.init)
        );
    }
    for (name, e) in &p.behavior.init_process {
        let _ = writeln!(out, "  initProcess {name} = {};", expr_to_string(e));
    }
    if !p.behavior.assumptions.is_empty() {
        let clauses: Vec<String> = p
            .behavior
            .assumptions
            .iter()
            .map(|a| match a {
                AssumptionClause::MsgBound { channel, bound } => format!("msg({bound}, {channel})"),
                AssumptionClause::PerTick(e) => expr_to_string(e),
            })
            .collect();
        let _ = writeln!(out, "  asm {};", clauses.join(", "));
    }
    if let Some(w) = p.declared_wcet {
        let _ = writeln!(out, "  wcet {w};");
    }
    let _ = writeln!(out, "  ending: {};", expr_to_string(&p.behavior.ending));
    out.push_str("  calc {\n");
    write_effect(out, &p.behavior.calc);
    out.push_str("  }\n");
    if let Some(final_effect) = &p.behavior.calc_final {
        out.push_str("  calcF {\n");
        write_effect(out, final_effect);
        out.push_str("  }\n");
    }
    out.push_str("}\n");
}

fn write_effect(out: &mut String, effect: &crate::process::EffectSpec) {
    for (chan, ie) in &effect.outputs {
        let _ = write!(out, "    {chan} = ");
        write_interval(out, ie);
        out.push_str(";\n");
    }
    for (input, e) in &effect.buffers {
        let _ = writeln!(
            out,
            "    {}' = {};",
            crate::process::buffer_var(input),
            expr_to_string(e)
        );
    }
    for (local, e) in &effect.locals {
        let _ = writeln!(out, "    {local}' = {};", expr_to_string(e));
    }
}

/// Composition operators: `;` binds tighter than `||`/`(+)`; all operators
/// are left-associative, so right operands at the same level need parens.
fn compose_level(e: &CompositionExpr) -> u8 {
    match e {
        CompositionExpr::Par(..) | CompositionExpr::Alt(..) => 1,
        CompositionExpr::Seq(..) => 2,
        CompositionExpr::Ref(_) | CompositionExpr::LoopAuto(..) | CompositionExpr::LoopNonAuto(..) => 3,
    }
}

fn write_compose(out: &mut String, e: &CompositionExpr, min_level: u8) {
    let lv = compose_level(e);
    let parens = lv < min_level;
    if parens {
        out.push('(');
    }
    match e {
        CompositionExpr::Ref(name) => out.push_str(name),
        CompositionExpr::Seq(l, r) => {
            write_compose(out, l, 2);
            out.push_str(" ; ");
            write_compose(out, r, 3);
        }
        CompositionExpr::Par(l, r) => {
            write_compose(out, l, 1);
            out.push_str(" || ");
            write_compose(out, r, 2);
        }
        CompositionExpr::Alt(l, r) => {
            write_compose(out, l, 1);
            out.push_str(" (+) ");
            write_compose(out, r, 2);
        }
        CompositionExpr::LoopAuto(body, d) => {
            let _ = write!(out, "loop(auto {d}) ");
            write_compose(out, body, 3);
        }
        CompositionExpr::LoopNonAuto(body, policy) => {
            out.push_str("loop(manual");
            if policy.allow_restart_while_running {
                out.push_str(" restart");
            }
            if policy.min_gap_ticks != 1 {
                let _ = write!(out, " gap = {}", policy.min_gap_ticks);
            }
            out.push_str(") ");
            write_compose(out, body, 3);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Render a document in canonical form.
pub fn print(doc: &SpecDocument) -> String {
    let mut out = String::new();
    for e in &doc.enums {
        let _ = writeln!(out, "type {} = {};", e.name, e.symbols.join(" | "));
    }
    for p in &doc.processes {
        write_process(&mut out, p);
    }
    for c in &doc.compositions {
        let _ = write!(out, "compose {} = ", c.name);
        write_compose(&mut out, &c.expr, 0);
        out.push('\n');
    }
    for env in &doc.envs {
        let _ = writeln!(out, "env {} {{", env.name);
        for entry in &env.entries {
            let msgs: Vec<String> = entry.messages.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(
                out,
                "  {} @ {} = <{}>;",
                entry.channel,
                entry.tick,
                msgs.join(", ")
            );
        }
        out.push_str("}\n");
    }
    out
}
