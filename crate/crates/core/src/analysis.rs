//! Trace-level activity predicates and the compositional worst-case
//! execution time calculus, with a simulation-based measurement oracle.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::component::{Causality, ChooserPolicy, Side};
use crate::compose::{compile, ComposeError, Network, ProcessExpr};
use crate::sim::{run, EnvInputs, SimError, Trace};
use crate::stream::disjoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("`{stream}` is not an output stream of `{component}`")]
    UnknownStream { component: String, stream: String },
    #[error("tick {tick} is outside the trace horizon {horizon}")]
    HorizonExceeded { tick: usize, horizon: usize },
    #[error("bound {rb} exceeds the {limit} available stream(s)/component(s)")]
    InvalidBound { rb: usize, limit: usize },
    #[error("no wcet bound for elementary process `{0}`")]
    MissingBound(String),
    #[error("measurement inconclusive: no exit within the horizon for env #{env_index}")]
    MeasurementInconclusive { env_index: usize },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn outputs_of<'a>(trace: &'a Trace, component: &str) -> Result<&'a [String], AnalysisError> {
    trace
        .outputs_of(component)
        .ok_or_else(|| AnalysisError::UnknownComponent(component.to_string()))
}

fn nonempty_at(trace: &Trace, channel: &str, t: usize) -> Result<bool, AnalysisError> {
    let stream = trace
        .channels
        .get(channel)
        .ok_or_else(|| AnalysisError::UnknownComponent(channel.to_string()))?;
    let interval = stream
        .interval_at(t)
        .map_err(|_| AnalysisError::HorizonExceeded { tick: t, horizon: trace.horizon })?;
    Ok(!interval.is_empty())
}

/// Component `c` is active on output stream `x` at tick `t` iff that stream
/// is nonempty there.
pub fn active_on(trace: &Trace, component: &str, t: usize, stream: &str) -> Result<bool, AnalysisError> {
    let outputs = outputs_of(trace, component)?;
    if !outputs.iter().any(|s| s == stream) {
        return Err(AnalysisError::UnknownStream {
            component: component.to_string(),
            stream: stream.to_string(),
        });
    }
    nonempty_at(trace, stream, t)
}

/// Active only on `x`: that stream is nonempty and every other output of the
/// component is empty.
pub fn active_only_on(
    trace: &Trace,
    component: &str,
    t: usize,
    stream: &str,
) -> Result<bool, AnalysisError> {
    if !active_on(trace, component, t, stream)? {
        return Ok(false);
    }
    for other in outputs_of(trace, component)? {
        if other != stream && nonempty_at(trace, other, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Active at tick `t`: at least one output stream is nonempty.
pub fn active(trace: &Trace, component: &str, t: usize) -> Result<bool, AnalysisError> {
    for stream in outputs_of(trace, component)? {
        if nonempty_at(trace, stream, t)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

fn count_matches(kind: BoundKind, count: usize, rb: usize) -> bool {
    match kind {
        BoundKind::Lower => count >= rb,
        BoundKind::Upper => count <= rb,
        BoundKind::Exact => count == rb,
    }
}

/// Restricted activity: the number of nonempty output streams at tick `t`
/// compared against `rb`.
pub fn active_bounded(
    trace: &Trace,
    component: &str,
    t: usize,
    kind: BoundKind,
    rb: usize,
) -> Result<bool, AnalysisError> {
    let outputs = outputs_of(trace, component)?;
    let mut count = 0;
    for stream in outputs {
        if nonempty_at(trace, stream, t)? {
            count += 1;
        }
    }
    Ok(count_matches(kind, count, rb))
}

/// How a component counts towards a set-level bound. The stream-existential
/// form counts components with some nonempty output stream; the
/// component-active form counts components satisfying the activity predicate.
/// Both are implemented to mirror the two written definitions and compared
/// in tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountingMode {
    StreamExistential,
    ComponentActive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetQuery {
    /// Some component of the set is active.
    Any,
    Bounded { kind: BoundKind, rb: usize, counting: CountingMode },
}

/// Set-level activity over a set of components at tick `t`.
pub fn active_set(
    trace: &Trace,
    components: &[&str],
    t: usize,
    query: SetQuery,
) -> Result<bool, AnalysisError> {
    match query {
        SetQuery::Any => {
            for c in components {
                if active(trace, c, t)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        SetQuery::Bounded { kind, rb, counting } => {
            let mut count = 0;
            for c in components {
                let qualifies = match counting {
                    CountingMode::StreamExistential => {
                        let mut any = false;
                        for stream in outputs_of(trace, c)? {
                            if nonempty_at(trace, stream, t)? {
                                any = true;
                                break;
                            }
                        }
                        any
                    }
                    CountingMode::ComponentActive => active(trace, c, t)?,
                };
                if qualifies {
                    count += 1;
                }
            }
            Ok(count_matches(kind, count, rb))
        }
    }
}

/// True iff exactly one output stream of the component is nonempty at every
/// tick; this implies the outputs are pairwise disjoint, which is verified
/// independently against the stream-level predicate.
pub fn disjoint_outputs_check(trace: &Trace, component: &str) -> Result<bool, AnalysisError> {
    let mut exact_one_everywhere = true;
    for t in 0..trace.horizon {
        if !active_bounded(trace, component, t, BoundKind::Exact, 1)? {
            exact_one_everywhere = false;
            break;
        }
    }
    let streams: Vec<_> = outputs_of(trace, component)?
        .iter()
        .filter_map(|s| trace.channels.get(s))
        .collect();
    let streams_disjoint = disjoint(&streams).unwrap_or(false);
    debug_assert!(
        !exact_one_everywhere || streams_disjoint,
        "exactly-one activity at every tick must imply disjoint outputs"
    );
    Ok(exact_one_everywhere)
}

/// A parsed activity query, as accepted by the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityQuery {
    pub subject: Vec<String>,
    pub set_subject: bool,
    pub tick: usize,
    pub variant: ActivityVariant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActivityVariant {
    Any,
    OnStream(String),
    OnlyOnStream(String),
    Bounded { kind: BoundKind, rb: usize },
    SetAny,
    SetBounded { kind: BoundKind, rb: usize, counting: CountingMode },
}

impl ActivityQuery {
    pub fn eval(&self, trace: &Trace) -> Result<bool, AnalysisError> {
        if self.tick >= trace.horizon {
            return Err(AnalysisError::HorizonExceeded {
                tick: self.tick,
                horizon: trace.horizon,
            });
        }
        match &self.variant {
            ActivityVariant::Any => active(trace, &self.subject[0], self.tick),
            ActivityVariant::OnStream(s) => active_on(trace, &self.subject[0], self.tick, s),
            ActivityVariant::OnlyOnStream(s) => {
                active_only_on(trace, &self.subject[0], self.tick, s)
            }
            ActivityVariant::Bounded { kind, rb } => {
                let limit = outputs_of(trace, &self.subject[0])?.len();
                if *rb > limit {
                    return Err(AnalysisError::InvalidBound { rb: *rb, limit });
                }
                active_bounded(trace, &self.subject[0], self.tick, *kind, *rb)
            }
            ActivityVariant::SetAny => {
                let subjects: Vec<&str> = self.subject.iter().map(String::as_str).collect();
                active_set(trace, &subjects, self.tick, SetQuery::Any)
            }
            ActivityVariant::SetBounded { kind, rb, counting } => {
                if *rb > self.subject.len() {
                    return Err(AnalysisError::InvalidBound { rb: *rb, limit: self.subject.len() });
                }
                let subjects: Vec<&str> = self.subject.iter().map(String::as_str).collect();
                active_set(
                    trace,
                    &subjects,
                    self.tick,
                    SetQuery::Bounded { kind: *kind, rb: *rb, counting: *counting },
                )
            }
        }
    }
}

/// Whether connector latency contributes to composed bounds. The connectors
/// here are weak-causal, so their measured cost is zero; the measured mode
/// exists to make that checkable rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectorCostMode {
    Zero,
    Measured,
}

/// Per-connector tick costs used by the calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConnectorCosts {
    pub amp: u64,
    pub at: u64,
    pub plus: u64,
}

/// Measure connector latencies by stepping each connector on simultaneous
/// arrivals and reading off the output tick.
pub fn measured_connector_costs() -> ConnectorCosts {
    use crate::component::{amp_connector, at_connector, plus_connector};
    use crate::stream::{Message, TimeInterval};
    let event = || TimeInterval::singleton(Message::Event);

    let mut amp = amp_connector();
    let inputs = BTreeMap::from([("x".to_string(), event()), ("y".to_string(), event())]);
    let amp_cost = (0..8)
        .find(|&t| {
            let step_inputs = if t == 0 { inputs.clone() } else { BTreeMap::new() };
            !amp.step(t, &step_inputs).outputs["z"].is_empty()
        })
        .unwrap_or(0);

    let mut at = at_connector(ChooserPolicy::Fixed(Side::Left));
    let at_inputs = BTreeMap::from([("ent".to_string(), event())]);
    let at_cost = (0..8)
        .find(|&t| {
            let step_inputs = if t == 0 { at_inputs.clone() } else { BTreeMap::new() };
            !at.step(t, &step_inputs).outputs["left"].is_empty()
        })
        .unwrap_or(0);

    let mut plus = plus_connector();
    let plus_inputs = BTreeMap::from([("x".to_string(), event())]);
    let plus_cost = (0..8)
        .find(|&t| {
            let step_inputs = if t == 0 { plus_inputs.clone() } else { BTreeMap::new() };
            !plus.step(t, &step_inputs).outputs["z"].is_empty()
        })
        .unwrap_or(0);

    ConnectorCosts { amp: amp_cost as u64, at: at_cost as u64, plus: plus_cost as u64 }
}

/// One node of a wcet derivation, mirroring the composition tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcetNode {
    pub label: String,
    pub bound: u64,
    pub children: Vec<WcetNode>,
    pub note: Option<String>,
}

/// Result of the compositional wcet calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcetReport {
    pub bound: u64,
    pub mode: ConnectorCostMode,
    pub derivation: WcetNode,
}

impl WcetReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        fn walk(node: &WcetNode, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&format!("{} = {}", node.label, node.bound));
            if let Some(note) = &node.note {
                out.push_str(&format!("  [{note}]"));
            }
            out.push('\n');
            for child in &node.children {
                walk(child, depth + 1, out);
            }
        }
        walk(&self.derivation, 0, &mut out);
        out
    }
}

/// Fold the four composition rules over the tree: sequence adds, parallel
/// and alternate take the slower branch plus connector costs, loops keep the
/// body's bound.
pub fn wcet(
    expr: &ProcessExpr,
    elementary_bounds: &BTreeMap<String, u64>,
    mode: ConnectorCostMode,
) -> Result<WcetReport, AnalysisError> {
    let costs = match mode {
        ConnectorCostMode::Zero => ConnectorCosts::default(),
        ConnectorCostMode::Measured => measured_connector_costs(),
    };
    let derivation = wcet_node(expr, elementary_bounds, &costs)?;
    Ok(WcetReport { bound: derivation.bound, mode, derivation })
}

fn wcet_node(
    expr: &ProcessExpr,
    bounds: &BTreeMap<String, u64>,
    costs: &ConnectorCosts,
) -> Result<WcetNode, AnalysisError> {
    match expr {
        ProcessExpr::Elem(spec) => {
            let bound = bounds
                .get(&spec.name)
                .copied()
                .ok_or_else(|| AnalysisError::MissingBound(spec.name.clone()))?;
            Ok(WcetNode { label: spec.name.clone(), bound, children: vec![], note: None })
        }
        ProcessExpr::Seq(l, r) => {
            let left = wcet_node(l, bounds, costs)?;
            let right = wcet_node(r, bounds, costs)?;
            let bound = left.bound + right.bound;
            Ok(WcetNode { label: "seq".into(), bound, children: vec![left, right], note: None })
        }
        ProcessExpr::Par(l, r) => {
            let left = wcet_node(l, bounds, costs)?;
            let right = wcet_node(r, bounds, costs)?;
            let bound = left.bound.max(right.bound) + costs.amp;
            Ok(WcetNode { label: "par".into(), bound, children: vec![left, right], note: None })
        }
        ProcessExpr::Alt(l, r, _) => {
            let left = wcet_node(l, bounds, costs)?;
            let right = wcet_node(r, bounds, costs)?;
            let slack = left.bound.abs_diff(right.bound);
            let bound = left.bound.max(right.bound) + costs.at + costs.plus;
            let note = (slack > 0).then(|| {
                format!("branches {} / {}; a fixed chooser may run {slack} tick(s) under the bound",
                    left.bound, right.bound)
            });
            Ok(WcetNode { label: "alt".into(), bound, children: vec![left, right], note })
        }
        ProcessExpr::LoopAuto(body, _) | ProcessExpr::LoopNonAuto(body, _) => {
            let child = wcet_node(body, bounds, costs)?;
            let bound = child.bound;
            Ok(WcetNode { label: "loop".into(), bound, children: vec![child], note: None })
        }
    }
}

/// Collect declared per-process bounds from the leaves.
pub fn declared_bounds(expr: &ProcessExpr) -> Result<BTreeMap<String, u64>, AnalysisError> {
    let mut bounds = BTreeMap::new();
    for spec in expr.leaves() {
        match spec.declared_wcet {
            Some(b) => {
                bounds.insert(spec.name.clone(), b);
            }
            None => return Err(AnalysisError::MissingBound(spec.name.clone())),
        }
    }
    Ok(bounds)
}

/// Measure each elementary leaf on its own with a single activation.
pub fn measured_bounds(
    expr: &ProcessExpr,
    horizon: usize,
) -> Result<BTreeMap<String, u64>, AnalysisError> {
    let mut bounds = BTreeMap::new();
    for spec in expr.leaves() {
        if bounds.contains_key(&spec.name) {
            continue;
        }
        let leaf = ProcessExpr::Elem(spec.clone());
        let network = compile(&leaf)?;
        let env = activation_env(&network, horizon)?;
        let measured = measure_wcet(&leaf, &[env], horizon)?;
        bounds.insert(spec.name.clone(), measured);
    }
    Ok(bounds)
}

/// An env with one entry event at tick 0 and silence everywhere else.
pub fn activation_env(network: &Network, horizon: usize) -> Result<EnvInputs, AnalysisError> {
    let mut env = EnvInputs::for_network(network, horizon);
    if let Some(entry) = network.entry_channel() {
        let entry = entry.to_string();
        env.set_event(&entry, 0)?;
    }
    Ok(env)
}

fn first_event(trace: &Trace, channel: &str, from: usize) -> Option<usize> {
    trace
        .channels
        .get(channel)?
        .nonempty_ticks()
        .into_iter()
        .find(|&t| t >= from)
}

/// Worst observed entry-to-exit latency of one activation over the given
/// envs. For autonomous loops, which expose no entry or exit, the first body
/// activation is measured instead.
pub fn measure_wcet(
    expr: &ProcessExpr,
    envs: &[EnvInputs],
    horizon: usize,
) -> Result<u64, AnalysisError> {
    let mut network = compile(expr)?;
    let (entry, exit) = match expr {
        ProcessExpr::LoopAuto(..) => {
            // The delay is the only strict component; its output channel
            // starts the body and its `extD` input carries the body's exit.
            let delay = network
                .components()
                .iter()
                .find(|c| c.causality() == Causality::Strict)
                .map(|c| c.name().to_string())
                .ok_or_else(|| ComposeError::NoEntryPoint("no delay in autonomous loop".into()))?;
            let entry = network
                .output_channel(&delay, "entD")
                .map(str::to_string)
                .ok_or_else(|| ComposeError::NoEntryPoint(delay.clone()))?;
            let exit = network
                .input_channel(&delay, "extD")
                .map(str::to_string)
                .ok_or_else(|| ComposeError::NoExitPoint(delay.clone()))?;
            (entry, exit)
        }
        _ => {
            let entry = network
                .entry_channel()
                .map(str::to_string)
                .ok_or_else(|| ComposeError::NoEntryPoint("measurement".into()))?;
            let exit = network
                .exit_channel()
                .map(str::to_string)
                .ok_or_else(|| ComposeError::NoExitPoint("measurement".into()))?;
            (entry, exit)
        }
    };
    let mut worst = None;
    for (env_index, env) in envs.iter().enumerate() {
        let trace = run(&mut network, env, horizon)?;
        let Some(start) = first_event(&trace, &entry, 0) else {
            return Err(AnalysisError::MeasurementInconclusive { env_index });
        };
        let Some(end) = first_event(&trace, &exit, start) else {
            return Err(AnalysisError::MeasurementInconclusive { env_index });
        };
        let latency = (end - start) as u64;
        worst = Some(worst.map_or(latency, |w: u64| w.max(latency)));
    }
    worst.ok_or(AnalysisError::MeasurementInconclusive { env_index: 0 })
}

/// Rewrite every alternate node so its chooser is pinned to the slower
/// branch, turning the calculus bound into an achievable run.
pub fn force_slower_branch(
    expr: &ProcessExpr,
    bounds: &BTreeMap<String, u64>,
) -> Result<ProcessExpr, AnalysisError> {
    Ok(match expr {
        ProcessExpr::Elem(_) => expr.clone(),
        ProcessExpr::Seq(l, r) => ProcessExpr::seq(
            force_slower_branch(l, bounds)?,
            force_slower_branch(r, bounds)?,
        ),
        ProcessExpr::Par(l, r) => ProcessExpr::par(
            force_slower_branch(l, bounds)?,
            force_slower_branch(r, bounds)?,
        ),
        ProcessExpr::Alt(l, r, _) => {
            let costs = ConnectorCosts::default();
            let lb = wcet_node(l, bounds, &costs)?.bound;
            let rb = wcet_node(r, bounds, &costs)?.bound;
            let side = if lb >= rb { Side::Left } else { Side::Right };
            ProcessExpr::alt(
                force_slower_branch(l, bounds)?,
                force_slower_branch(r, bounds)?,
                ChooserPolicy::Fixed(side),
            )
        }
        ProcessExpr::LoopAuto(b, d) => {
            ProcessExpr::loop_auto(force_slower_branch(b, bounds)?, *d)
        }
        ProcessExpr::LoopNonAuto(b, p) => {
            ProcessExpr::loop_non_auto(force_slower_branch(b, bounds)?, p.clone())
        }
    })
}

/// Parse the command-line query syntax:
/// `active(P, 3)`, `active(P, 3, on=y)`, `active(P, 3, only=y)`,
/// `active(P, 3, lower=2)`, `active({P,Q}, 3)`,
/// `active({P,Q}, 3, exact=1)`, `active({P,Q}, 3, lower_comp=2)`.
pub fn parse_activity_query(src: &str) -> Result<ActivityQuery, String> {
    let src = src.trim();
    let inner = src
        .strip_prefix("active(")
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(|| "query must have the form active(...)".to_string())?;

    // Split on top-level commas; `{...}` groups the subject set.
    let mut parts: Vec<String> = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '{' => {
                depth += 1;
                cur.push(c);
            }
            '}' => {
                depth = depth.saturating_sub(1);
                cur.push(c);
            }
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    if parts.len() < 2 || parts.len() > 3 {
        return Err("expected active(subject, tick[, variant])".to_string());
    }

    let (subject, set_subject) = if let Some(body) =
        parts[0].strip_prefix('{').and_then(|s| s.strip_suffix('}'))
    {
        let names: Vec<String> = body
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if names.is_empty() {
            return Err("empty component set".to_string());
        }
        (names, true)
    } else {
        (vec![parts[0].clone()], false)
    };

    let tick: usize = parts[1]
        .parse()
        .map_err(|_| format!("`{}` is not a tick", parts[1]))?;

    let variant = match parts.get(2) {
        None => {
            if set_subject {
                ActivityVariant::SetAny
            } else {
                ActivityVariant::Any
            }
        }
        Some(opt) => {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| format!("`{opt}` is not key=value"))?;
            let key = key.trim();
            let value = value.trim();
            let parse_rb = || -> Result<usize, String> {
                value.parse().map_err(|_| format!("`{value}` is not a bound"))
            };
            if set_subject {
                let (kind, counting) = match key {
                    "lower" => (BoundKind::Lower, CountingMode::StreamExistential),
                    "upper" => (BoundKind::Upper, CountingMode::StreamExistential),
                    "exact" => (BoundKind::Exact, CountingMode::StreamExistential),
                    "lower_comp" => (BoundKind::Lower, CountingMode::ComponentActive),
                    "upper_comp" => (BoundKind::Upper, CountingMode::ComponentActive),
                    "exact_comp" => (BoundKind::Exact, CountingMode::ComponentActive),
                    other => return Err(format!("unknown set variant `{other}`")),
                };
                ActivityVariant::SetBounded { kind, rb: parse_rb()?, counting }
            } else {
                match key {
                    "on" => ActivityVariant::OnStream(value.to_string()),
                    "only" => ActivityVariant::OnlyOnStream(value.to_string()),
                    "lower" => ActivityVariant::Bounded { kind: BoundKind::Lower, rb: parse_rb()? },
                    "upper" => ActivityVariant::Bounded { kind: BoundKind::Upper, rb: parse_rb()? },
                    "exact" => ActivityVariant::Bounded { kind: BoundKind::Exact, rb: parse_rb()? },
                    other => return Err(format!("unknown variant `{other}`")),
                }
            }
        }
    };

    Ok(ActivityQuery { subject, set_subject, tick, variant })
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
            BoundKind::Exact => "exact",
        };
        write!(f, "{s}")
    }
}
