//! Exporters: line-oriented and structured trace formats, DOT graphs, and
//! the PNML control-flow skeleton.

pub mod dot;
pub mod pnml;

use serde_json::{json, Map, Value};

use crate::sim::Trace;
use crate::stream::Message;

/// One line per tick: `t | chan=⟨m1,m2⟩ | chan=⟨⟩ …`, channels in name order.
pub fn trace_to_text(trace: &Trace) -> String {
    let mut out = String::new();
    for t in 0..trace.horizon {
        out.push_str(&t.to_string());
        for (name, stream) in &trace.channels {
            let interval = stream.interval_at(t).expect("trace covers its horizon");
            out.push_str(" | ");
            out.push_str(name);
            out.push('=');
            out.push_str(&interval.to_string());
        }
        out.push('\n');
    }
    out
}

fn message_json(m: &Message) -> Value {
    match m {
        Message::Event => Value::String("ev".to_string()),
        Message::Int(v) => json!(v),
        Message::Bool(v) => json!(v),
        Message::Sym { symbol, .. } => Value::String(symbol.clone()),
    }
}

/// Structured export: `{horizon, channels, modes, warnings}` with one message
/// array per tick per channel.
pub fn trace_to_json(trace: &Trace) -> Value {
    let mut channels = Map::new();
    for (name, stream) in &trace.channels {
        let ticks: Vec<Value> = stream
            .iter()
            .map(|interval| Value::Array(interval.messages().iter().map(message_json).collect()))
            .collect();
        channels.insert(name.clone(), Value::Array(ticks));
    }
    let mut modes = Map::new();
    for (name, history) in &trace.modes {
        let ticks: Vec<Value> = history
            .iter()
            .map(|m| Value::String(m.to_string()))
            .collect();
        modes.insert(name.clone(), Value::Array(ticks));
    }
    let warnings: Vec<Value> = trace
        .warnings
        .iter()
        .map(|w| {
            json!({
                "tick": w.tick,
                "kind": w.kind.to_string(),
                "location": w.location,
            })
        })
        .collect();
    json!({
        "horizon": trace.horizon,
        "channels": Value::Object(channels),
        "modes": Value::Object(modes),
        "warnings": warnings,
    })
}

/// Stable string form of the structured export.
pub fn trace_to_json_string(trace: &Trace) -> String {
    serde_json::to_string_pretty(&trace_to_json(trace)).expect("trace serializes")
}
