//! Schematic Petri-net view of a composition: the control-flow skeleton with
//! data channels dropped. Each elementary process becomes one transition
//! between its entry and exit places; sequencing shares a place, parallel
//! composition forks and joins, alternate composition is a free choice, and
//! loops cycle through a delay transition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

use crate::compose::{compile, ComposeError, ProcessExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub name: String,
    pub initial_marking: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// Source process instance or connector this transition stands for.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnArc {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PetriNetModel {
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    pub arcs: Vec<PnArc>,
}

impl PetriNetModel {
    fn add_place(&mut self, name: impl Into<String>, marking: u32) -> usize {
        let id = format!("p{}", self.places.len());
        self.places.push(Place { id, name: name.into(), initial_marking: marking });
        self.places.len() - 1
    }

    fn add_transition(&mut self, name: impl Into<String>) -> usize {
        let id = format!("t{}", self.transitions.len());
        self.transitions.push(Transition { id, name: name.into() });
        self.transitions.len() - 1
    }

    fn arc_pt(&mut self, place: usize, transition: usize) {
        let id = format!("a{}", self.arcs.len());
        self.arcs.push(PnArc {
            id,
            source: self.places[place].id.clone(),
            target: self.transitions[transition].id.clone(),
        });
    }

    fn arc_tp(&mut self, transition: usize, place: usize) {
        let id = format!("a{}", self.arcs.len());
        self.arcs.push(PnArc {
            id,
            source: self.transitions[transition].id.clone(),
            target: self.places[place].id.clone(),
        });
    }

    /// Arcs must connect a place with a transition, never two nodes of the
    /// same kind.
    pub fn is_bipartite(&self) -> bool {
        let places: BTreeSet<&str> = self.places.iter().map(|p| p.id.as_str()).collect();
        let transitions: BTreeSet<&str> =
            self.transitions.iter().map(|t| t.id.as_str()).collect();
        self.arcs.iter().all(|a| {
            (places.contains(a.source.as_str()) && transitions.contains(a.target.as_str()))
                || (transitions.contains(a.source.as_str()) && places.contains(a.target.as_str()))
        })
    }
}

struct NetBuilder {
    model: PetriNetModel,
    connector_counters: BTreeMap<&'static str, u64>,
    used: BTreeSet<String>,
}

impl NetBuilder {
    fn new() -> Self {
        NetBuilder {
            model: PetriNetModel::default(),
            connector_counters: BTreeMap::new(),
            used: BTreeSet::new(),
        }
    }

    // Mirrors the instance naming used by `compile`, so transition names line
    // up with simulated component names.
    fn instance(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        let mut k = 2u64;
        loop {
            let candidate = format!("{base}_{k}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
            k += 1;
        }
    }

    fn connector(&mut self, kind: &'static str) -> String {
        let counter = self.connector_counters.entry(kind).or_insert(0);
        loop {
            *counter += 1;
            let candidate = format!("{kind}_{counter}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    fn build(&mut self, expr: &ProcessExpr, entry: usize, exit: usize) {
        match expr {
            ProcessExpr::Elem(spec) => {
                let name = self.instance(&spec.name);
                let t = self.model.add_transition(name);
                self.model.arc_pt(entry, t);
                self.model.arc_tp(t, exit);
            }
            ProcessExpr::Seq(l, r) => {
                let mid = self.model.add_place("seq", 0);
                self.build(l, entry, mid);
                self.build(r, mid, exit);
            }
            ProcessExpr::Par(l, r) => {
                let fork_name = self.connector("fork");
                let fork = self.model.add_transition(fork_name);
                let pre_l = self.model.add_place("par-pre", 0);
                let pre_r = self.model.add_place("par-pre", 0);
                let post_l = self.model.add_place("par-post", 0);
                let post_r = self.model.add_place("par-post", 0);
                self.model.arc_pt(entry, fork);
                self.model.arc_tp(fork, pre_l);
                self.model.arc_tp(fork, pre_r);
                self.build(l, pre_l, post_l);
                self.build(r, pre_r, post_r);
                let join_name = self.connector("amp");
                let join = self.model.add_transition(join_name);
                self.model.arc_pt(post_l, join);
                self.model.arc_pt(post_r, join);
                self.model.arc_tp(join, exit);
            }
            ProcessExpr::Alt(l, r, _) => {
                // Free choice at the entry place; both branches merge into
                // the shared exit place.
                self.build(l, entry, exit);
                self.build(r, entry, exit);
            }
            ProcessExpr::LoopNonAuto(body, _) => {
                let delay_name = self.connector("delay");
                let delay = self.model.add_transition(delay_name);
                let pre = self.model.add_place("loop-body", 0);
                self.model.arc_pt(entry, delay);
                self.model.arc_tp(delay, pre);
                self.build(body, pre, exit);
            }
            // Nested autonomous loops were already rejected by `compile`.
            ProcessExpr::LoopAuto(..) => unreachable!("checked by compile"),
        }
    }
}

/// Build the control-flow net of an expression. The structural rules match
/// `compile`, so this fails on exactly the expressions `compile` rejects.
pub fn export_petri_net(expr: &ProcessExpr) -> Result<PetriNetModel, ComposeError> {
    compile(expr)?;
    let mut b = NetBuilder::new();
    let (entry_marking, entry_name) = match expr {
        // Self-starting loops begin with a marked body place.
        ProcessExpr::LoopAuto(..) => (1, "self-start"),
        _ => (1, "entry"),
    };
    let entry = b.model.add_place(entry_name, entry_marking);
    let exit_name = match expr {
        ProcessExpr::LoopAuto(..) => "loop-exit",
        _ => "exit",
    };
    let exit = b.model.add_place(exit_name, 0);
    match expr {
        ProcessExpr::LoopAuto(body, _) => {
            // entry here is the marked self-start place feeding the body
            // directly; the delay transition cycles the exit back into it.
            let delay_name = b.connector("delay");
            let delay = b.model.add_transition(delay_name);
            b.build(body, entry, exit);
            b.model.arc_pt(exit, delay);
            b.model.arc_tp(delay, entry);
        }
        _ => b.build(expr, entry, exit),
    }
    Ok(b.model)
}

/// PNML Core serialization (place/transition nets).
pub fn to_pnml_xml(model: &PetriNetModel) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n");
    out.push_str("  <net id=\"net0\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n");
    out.push_str("    <page id=\"page0\">\n");
    for p in &model.places {
        let _ = writeln!(out, "      <place id=\"{}\">", p.id);
        let _ = writeln!(out, "        <name><text>{}</text></name>", p.name);
        if p.initial_marking > 0 {
            let _ = writeln!(
                out,
                "        <initialMarking><text>{}</text></initialMarking>",
                p.initial_marking
            );
        }
        out.push_str("      </place>\n");
    }
    for t in &model.transitions {
        let _ = writeln!(out, "      <transition id=\"{}\">", t.id);
        let _ = writeln!(out, "        <name><text>{}</text></name>", t.name);
        out.push_str("      </transition>\n");
    }
    for a in &model.arcs {
        let _ = writeln!(
            out,
            "      <arc id=\"{}\" source=\"{}\" target=\"{}\"/>",
            a.id, a.source, a.target
        );
    }
    out.push_str("    </page>\n");
    out.push_str("  </net>\n");
    out.push_str("</pnml>\n");
    out
}

/// Result of exhaustive exploration of the reachable markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reachability {
    /// Names of transitions enabled in some reachable marking.
    pub fireable: BTreeSet<String>,
    pub marking_count: usize,
    /// True when exploration stopped at the marking cap.
    pub truncated: bool,
}

/// Breadth-first exploration from the initial marking.
pub fn reachability(model: &PetriNetModel, max_markings: usize) -> Reachability {
    let place_pos: BTreeMap<&str, usize> = model
        .places
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    // Per transition: input and output place indices.
    let mut inputs: Vec<Vec<usize>> = vec![Vec::new(); model.transitions.len()];
    let mut outputs: Vec<Vec<usize>> = vec![Vec::new(); model.transitions.len()];
    let trans_pos: BTreeMap<&str, usize> = model
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), i))
        .collect();
    for a in &model.arcs {
        if let (Some(&p), Some(&t)) = (place_pos.get(a.source.as_str()), trans_pos.get(a.target.as_str())) {
            inputs[t].push(p);
        }
        if let (Some(&t), Some(&p)) = (trans_pos.get(a.source.as_str()), place_pos.get(a.target.as_str())) {
            outputs[t].push(p);
        }
    }
    let initial: Vec<u32> = model.places.iter().map(|p| p.initial_marking).collect();
    let mut seen = BTreeSet::from([initial.clone()]);
    let mut queue = VecDeque::from([initial]);
    let mut fireable = BTreeSet::new();
    let mut truncated = false;
    while let Some(marking) = queue.pop_front() {
        for (t, transition) in model.transitions.iter().enumerate() {
            let enabled = inputs[t].iter().all(|&p| marking[p] > 0);
            if !enabled {
                continue;
            }
            fireable.insert(transition.name.clone());
            let mut next = marking.clone();
            for &p in &inputs[t] {
                next[p] -= 1;
            }
            for &p in &outputs[t] {
                next[p] += 1;
            }
            if seen.len() >= max_markings {
                truncated = true;
                continue;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Reachability { fireable, marking_count: seen.len(), truncated }
}

/// Enumerate complete firing sequences (no transition enabled at the end),
/// up to a depth cap. Intended for small acyclic fixtures.
pub fn maximal_runs(model: &PetriNetModel, max_depth: usize) -> Vec<Vec<String>> {
    let place_pos: BTreeMap<&str, usize> = model
        .places
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let trans_pos: BTreeMap<&str, usize> = model
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), i))
        .collect();
    let mut inputs: Vec<Vec<usize>> = vec![Vec::new(); model.transitions.len()];
    let mut outputs: Vec<Vec<usize>> = vec![Vec::new(); model.transitions.len()];
    for a in &model.arcs {
        if let (Some(&p), Some(&t)) = (place_pos.get(a.source.as_str()), trans_pos.get(a.target.as_str())) {
            inputs[t].push(p);
        }
        if let (Some(&t), Some(&p)) = (trans_pos.get(a.source.as_str()), place_pos.get(a.target.as_str())) {
            outputs[t].push(p);
        }
    }
    let initial: Vec<u32> = model.places.iter().map(|p| p.initial_marking).collect();
    let mut runs = Vec::new();
    let mut path = Vec::new();
    explore(
        model, &inputs, &outputs, initial, &mut path, &mut runs, max_depth,
    );
    runs.sort();
    runs.dedup();
    runs
}

#[allow(clippy::too_many_arguments)]
fn explore(
    model: &PetriNetModel,
    inputs: &[Vec<usize>],
    outputs: &[Vec<usize>],
    marking: Vec<u32>,
    path: &mut Vec<String>,
    runs: &mut Vec<Vec<String>>,
    depth_left: usize,
) {
    let enabled: Vec<usize> = (0..model.transitions.len())
        .filter(|&t| inputs[t].iter().all(|&p| marking[p] > 0))
        .collect();
    if enabled.is_empty() || depth_left == 0 {
        runs.push(path.clone());
        return;
    }
    for t in enabled {
        let mut next = marking.clone();
        for &p in &inputs[t] {
            next[p] -= 1;
        }
        for &p in &outputs[t] {
            next[p] += 1;
        }
        path.push(model.transitions[t].name.clone());
        explore(model, inputs, outputs, next, path, runs, depth_left - 1);
        path.pop();
    }
}
