//! DOT rendering of a compiled network: one node per component, one edge per
//! wire. Control-flow channels and connector nodes are drawn in orange, the
//! convention for entry/exit plumbing.

use std::fmt::Write;

use crate::compose::Network;
use crate::process::{ENTRY_PORT, EXIT_PORT};

fn is_control(from_port: &str, to_port: &str) -> bool {
    from_port == EXIT_PORT
        || to_port == ENTRY_PORT
        || matches!(from_port, "entD" | "z" | "left" | "right")
        || matches!(to_port, "entP" | "extD" | "ent" | "x" | "y")
}

/// Render the network. Output is deterministic: identical networks produce
/// byte-identical text.
pub fn export_dot(network: &Network) -> String {
    let mut out = String::new();
    out.push_str("digraph network {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box];\n");
    for c in network.components() {
        if c.is_process() {
            let _ = writeln!(out, "  \"{}\";", c.name());
        } else {
            let _ = writeln!(
                out,
                "  \"{}\" [style=filled, fillcolor=orange];",
                c.name()
            );
        }
    }
    // External inputs enter from plaintext stubs; the entry point is orange.
    for name in network.external_input_names() {
        let entry = network.entry_channel() == Some(name);
        let color = if entry { ", fontcolor=orange" } else { "" };
        let _ = writeln!(out, "  \"{name}\" [shape=plaintext{color}];");
        for (sink, bindings) in network.components().iter().zip(network.in_bindings.iter()) {
            for (port, &chan) in bindings {
                if network.channels()[chan].name == name {
                    let style = if entry || port == ENTRY_PORT {
                        " [color=orange]"
                    } else {
                        ""
                    };
                    let _ = writeln!(out, "  \"{name}\" -> \"{}\"{style};", sink.name());
                }
            }
        }
    }
    for wire in network.wires() {
        let style = if is_control(&wire.from.1, &wire.to.1) {
            ", color=orange"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"{}];",
            wire.from.0, wire.to.0, wire.channel, style
        );
    }
    // Dangling outputs (including the exit point) leave to stubs.
    for name in network.external_output_names() {
        let exit = network.exit_channel() == Some(name);
        let Some(idx) = network.channel_index(name) else { continue };
        let Some((source, _)) = &network.channels()[idx].source else { continue };
        let color = if exit { ", fontcolor=orange" } else { "" };
        let _ = writeln!(out, "  \"out:{name}\" [shape=plaintext, label=\"{name}\"{color}];");
        let style = if exit { " [color=orange]" } else { "" };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"out:{name}\"{style};",
            network.components()[*source].name()
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{compile, ProcessExpr};
    use crate::process::ElementaryProcessSpec;

    fn p(name: &str) -> ProcessExpr {
        ProcessExpr::elem(ElementaryProcessSpec::new(name))
    }

    #[test]
    fn seq_renders_two_nodes_and_a_control_edge() {
        let n = compile(&ProcessExpr::seq(p("P"), p("Q"))).unwrap();
        let dot = export_dot(&n);
        assert!(dot.contains("\"P\";"));
        assert!(dot.contains("\"Q\";"));
        assert!(dot.contains("\"P\" -> \"Q\" [label=\"P.stop\", color=orange];"));
    }

    #[test]
    fn par_includes_the_join_connector() {
        let n = compile(&ProcessExpr::par(p("P"), p("Q"))).unwrap();
        let dot = export_dot(&n);
        assert!(dot.contains("\"amp_1\" [style=filled, fillcolor=orange];"));
        assert_eq!(n.components().len(), 3);
    }

    #[test]
    fn output_is_deterministic() {
        let expr = ProcessExpr::alt(
            p("P"),
            p("Q"),
            crate::component::ChooserPolicy::RoundRobin,
        );
        let a = export_dot(&compile(&expr).unwrap());
        let b = export_dot(&compile(&expr).unwrap());
        assert_eq!(a, b);
    }
}
