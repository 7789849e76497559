//! Composition of processes into component networks. Sequential composition
//! wires exit to entry directly; parallel composition joins exits with `&`;
//! alternate composition splits the entry with `@` and merges exits with `+`;
//! loops close the control flow through a strict-causal delay.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::component::{
    amp_connector, at_connector, delay_component, plus_connector, to_component, ChooserPolicy,
    Component, ComponentError, DelayMode, RestartPolicy,
};
use crate::process::{Direction, ElementaryProcessSpec, ENTRY_PORT, EXIT_PORT};
use crate::stream::MessageType;

/// Composition tree over elementary processes. Leaves hold their full
/// process specification.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ProcessExpr {
    Elem(ElementaryProcessSpec),
    Seq(Box<ProcessExpr>, Box<ProcessExpr>),
    Par(Box<ProcessExpr>, Box<ProcessExpr>),
    Alt(Box<ProcessExpr>, Box<ProcessExpr>, ChooserPolicy),
    /// Self-starting loop, repeated `delay` ticks after each exit.
    LoopAuto(Box<ProcessExpr>, u64),
    /// Externally started loop, restart-gated by the policy.
    LoopNonAuto(Box<ProcessExpr>, RestartPolicy),
}

impl ProcessExpr {
    pub fn elem(spec: ElementaryProcessSpec) -> Self {
        ProcessExpr::Elem(spec)
    }

    pub fn seq(l: ProcessExpr, r: ProcessExpr) -> Self {
        ProcessExpr::Seq(Box::new(l), Box::new(r))
    }

    pub fn par(l: ProcessExpr, r: ProcessExpr) -> Self {
        ProcessExpr::Par(Box::new(l), Box::new(r))
    }

    pub fn alt(l: ProcessExpr, r: ProcessExpr, policy: ChooserPolicy) -> Self {
        ProcessExpr::Alt(Box::new(l), Box::new(r), policy)
    }

    pub fn loop_auto(body: ProcessExpr, delay: u64) -> Self {
        ProcessExpr::LoopAuto(Box::new(body), delay)
    }

    pub fn loop_non_auto(body: ProcessExpr, policy: RestartPolicy) -> Self {
        ProcessExpr::LoopNonAuto(Box::new(body), policy)
    }

    pub fn depth(&self) -> usize {
        match self {
            ProcessExpr::Elem(_) => 0,
            ProcessExpr::Seq(l, r) | ProcessExpr::Par(l, r) | ProcessExpr::Alt(l, r, _) => {
                1 + l.depth().max(r.depth())
            }
            ProcessExpr::LoopAuto(b, _) | ProcessExpr::LoopNonAuto(b, _) => 1 + b.depth(),
        }
    }

    /// Leaf specs in left-to-right order.
    pub fn leaves(&self) -> Vec<&ElementaryProcessSpec> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a ProcessExpr, out: &mut Vec<&'a ElementaryProcessSpec>) {
            match e {
                ProcessExpr::Elem(s) => out.push(s),
                ProcessExpr::Seq(l, r) | ProcessExpr::Par(l, r) | ProcessExpr::Alt(l, r, _) => {
                    walk(l, out);
                    walk(r, out);
                }
                ProcessExpr::LoopAuto(b, _) | ProcessExpr::LoopNonAuto(b, _) => walk(b, out),
            }
        }
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error("name collision on `{0}`")]
    NameCollision(String),
    #[error("wire type mismatch on `{channel}`: expected {expected}, found {found}")]
    TypeMismatch { channel: String, expected: String, found: String },
    #[error("component `{component}` has no port `{port}`")]
    UnknownPort { component: String, port: String },
    #[error("port `{port}` of `{component}` is not wired")]
    UnboundPort { component: String, port: String },
    #[error("channel `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("no entry point: {0}")]
    NoEntryPoint(String),
    #[error("no exit point: {0}")]
    NoExitPoint(String),
}

/// One channel of a network. A channel without a source is an external
/// input, fed by the environment.
#[derive(Debug, Clone)]
pub struct ChannelInfo {
    pub name: String,
    pub msg_type: MessageType,
    pub source: Option<(usize, String)>,
}

/// A directed wire derived from two ports sharing a channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub channel: String,
    pub from: (String, String),
    pub to: (String, String),
}

/// A wired set of components with well-defined external inputs and optional
/// entry/exit points.
#[derive(Debug)]
pub struct Network {
    pub(crate) components: Vec<Component>,
    pub(crate) channels: Vec<ChannelInfo>,
    pub(crate) in_bindings: Vec<BTreeMap<String, usize>>,
    pub(crate) out_bindings: Vec<BTreeMap<String, usize>>,
    pub(crate) external_inputs: Vec<usize>,
    pub(crate) entry: Option<usize>,
    pub(crate) exit: Option<usize>,
}

impl Network {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn channels(&self) -> &[ChannelInfo] {
        &self.channels
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name() == name)
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.name == name)
    }

    pub fn external_input_names(&self) -> Vec<&str> {
        self.external_inputs
            .iter()
            .map(|&i| self.channels[i].name.as_str())
            .collect()
    }

    /// Channels that are produced but consumed by no component, plus the
    /// exit point.
    pub fn external_output_names(&self) -> Vec<&str> {
        let mut read = BTreeSet::new();
        for bindings in &self.in_bindings {
            read.extend(bindings.values().copied());
        }
        let mut out: Vec<&str> = self
            .channels
            .iter()
            .enumerate()
            .filter(|(i, c)| c.source.is_some() && !read.contains(i))
            .map(|(_, c)| c.name.as_str())
            .collect();
        if let Some(exit) = self.exit {
            let name = self.channels[exit].name.as_str();
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn entry_channel(&self) -> Option<&str> {
        self.entry.map(|i| self.channels[i].name.as_str())
    }

    pub fn exit_channel(&self) -> Option<&str> {
        self.exit.map(|i| self.channels[i].name.as_str())
    }

    /// The channel a component input port reads from.
    pub fn input_channel(&self, component: &str, port: &str) -> Option<&str> {
        let idx = self.component_index(component)?;
        self.in_bindings[idx]
            .get(port)
            .map(|&c| self.channels[c].name.as_str())
    }

    /// The channel a component output port drives.
    pub fn output_channel(&self, component: &str, port: &str) -> Option<&str> {
        let idx = self.component_index(component)?;
        self.out_bindings[idx]
            .get(port)
            .map(|&c| self.channels[c].name.as_str())
    }

    /// All wires, ordered by channel then sink.
    pub fn wires(&self) -> Vec<Wire> {
        let mut wires = Vec::new();
        for (ci, info) in self.channels.iter().enumerate() {
            let Some((src, src_port)) = &info.source else { continue };
            for (sink, bindings) in self.in_bindings.iter().enumerate() {
                for (port, &chan) in bindings {
                    if chan == ci {
                        wires.push(Wire {
                            channel: info.name.clone(),
                            from: (self.components[*src].name().to_string(), src_port.clone()),
                            to: (self.components[sink].name().to_string(), port.clone()),
                        });
                    }
                }
            }
        }
        wires
    }
}

/// Incremental construction of a (possibly hand-wired) network.
#[derive(Default)]
pub struct NetworkBuilder {
    components: Vec<Component>,
    channels: Vec<ChannelInfo>,
    channel_index: BTreeMap<String, usize>,
    in_bindings: Vec<BTreeMap<String, usize>>,
    out_bindings: Vec<BTreeMap<String, usize>>,
    entry: Option<usize>,
    exit: Option<usize>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        NetworkBuilder::default()
    }

    pub fn add_component(&mut self, component: Component) -> Result<usize, ComposeError> {
        if self.components.iter().any(|c| c.name() == component.name()) {
            return Err(ComposeError::NameCollision(component.name().to_string()));
        }
        self.components.push(component);
        self.in_bindings.push(BTreeMap::new());
        self.out_bindings.push(BTreeMap::new());
        Ok(self.components.len() - 1)
    }

    pub fn add_channel(
        &mut self,
        name: impl Into<String>,
        msg_type: MessageType,
    ) -> Result<usize, ComposeError> {
        let name = name.into();
        if self.channel_index.contains_key(&name) {
            return Err(ComposeError::NameCollision(name));
        }
        let idx = self.channels.len();
        self.channel_index.insert(name.clone(), idx);
        self.channels.push(ChannelInfo { name, msg_type, source: None });
        Ok(idx)
    }

    fn port_decl(
        &self,
        component: usize,
        port: &str,
        direction: Direction,
    ) -> Result<MessageType, ComposeError> {
        let c = &self.components[component];
        let ports = match direction {
            Direction::Input => c.in_ports(),
            Direction::Output => c.out_ports(),
        };
        ports
            .iter()
            .find(|p| p.name == port)
            .map(|p| p.msg_type.clone())
            .ok_or_else(|| ComposeError::UnknownPort {
                component: c.name().to_string(),
                port: port.to_string(),
            })
    }

    pub fn bind_input(
        &mut self,
        component: usize,
        port: &str,
        channel: usize,
    ) -> Result<(), ComposeError> {
        let ty = self.port_decl(component, port, Direction::Input)?;
        let info = &self.channels[channel];
        if ty != info.msg_type {
            return Err(ComposeError::TypeMismatch {
                channel: info.name.clone(),
                expected: info.msg_type.to_string(),
                found: ty.to_string(),
            });
        }
        self.in_bindings[component].insert(port.to_string(), channel);
        Ok(())
    }

    pub fn bind_output(
        &mut self,
        component: usize,
        port: &str,
        channel: usize,
    ) -> Result<(), ComposeError> {
        let ty = self.port_decl(component, port, Direction::Output)?;
        let info = &mut self.channels[channel];
        if ty != info.msg_type {
            return Err(ComposeError::TypeMismatch {
                channel: info.name.clone(),
                expected: info.msg_type.to_string(),
                found: ty.to_string(),
            });
        }
        if info.source.is_some() {
            return Err(ComposeError::MultipleDrivers(info.name.clone()));
        }
        info.source = Some((component, port.to_string()));
        self.out_bindings[component].insert(port.to_string(), channel);
        Ok(())
    }

    pub fn set_entry(&mut self, channel: usize) {
        self.entry = Some(channel);
    }

    pub fn set_exit(&mut self, channel: usize) {
        self.exit = Some(channel);
    }

    pub fn build(self) -> Result<Network, ComposeError> {
        // Every port must be wired.
        for (idx, c) in self.components.iter().enumerate() {
            for p in c.in_ports() {
                if !self.in_bindings[idx].contains_key(&p.name) {
                    return Err(ComposeError::UnboundPort {
                        component: c.name().to_string(),
                        port: p.name.clone(),
                    });
                }
            }
            for p in c.out_ports() {
                if !self.out_bindings[idx].contains_key(&p.name) {
                    return Err(ComposeError::UnboundPort {
                        component: c.name().to_string(),
                        port: p.name.clone(),
                    });
                }
            }
        }
        // Entry and exit points carry events.
        for point in [self.entry, self.exit].into_iter().flatten() {
            let info = &self.channels[point];
            if info.msg_type != MessageType::Event {
                return Err(ComposeError::TypeMismatch {
                    channel: info.name.clone(),
                    expected: MessageType::Event.to_string(),
                    found: info.msg_type.to_string(),
                });
            }
        }
        let external_inputs = self
            .channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.source.is_none())
            .map(|(i, _)| i)
            .collect();
        Ok(Network {
            components: self.components,
            channels: self.channels,
            in_bindings: self.in_bindings,
            out_bindings: self.out_bindings,
            external_inputs,
            entry: self.entry,
            exit: self.exit,
        })
    }
}

#[derive(Default)]
struct Namer {
    used: BTreeSet<String>,
    counters: BTreeMap<&'static str, u64>,
}

impl Namer {
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
        let counter = self.counters.entry(kind).or_insert(0);
        loop {
            *counter += 1;
            let candidate = format!("{kind}_{counter}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Name of the external entry channel created by `compile`.
pub const ENTRY_CHANNEL: &str = "entry";

/// Compile a composition tree into a wired network. Instance and channel
/// names are made unique deterministically, so repeated compilation of the
/// same expression yields an identical network.
pub fn compile(expr: &ProcessExpr) -> Result<Network, ComposeError> {
    let mut builder = NetworkBuilder::new();
    let mut namer = Namer::default();
    let entry = match expr {
        ProcessExpr::LoopAuto(..) => None,
        _ => Some(builder.add_channel(ENTRY_CHANNEL, MessageType::Event)?),
    };
    let exit = build(expr, &mut builder, &mut namer, entry, "the composition root")?;
    if let Some(e) = entry {
        builder.set_entry(e);
    }
    if let Some(x) = exit {
        builder.set_exit(x);
    }
    builder.build()
}

fn build(
    expr: &ProcessExpr,
    b: &mut NetworkBuilder,
    namer: &mut Namer,
    entry: Option<usize>,
    at: &str,
) -> Result<Option<usize>, ComposeError> {
    match expr {
        ProcessExpr::Elem(spec) => {
            let mut component = to_component(spec)?;
            let instance = namer.instance(&spec.name);
            component.rename(instance.clone());
            let data_ins: Vec<(String, MessageType)> = spec
                .inputs()
                .map(|c| (c.name.clone(), c.msg_type.clone()))
                .collect();
            let data_outs: Vec<(String, MessageType)> = spec
                .outputs()
                .map(|c| (c.name.clone(), c.msg_type.clone()))
                .collect();
            let idx = b.add_component(component)?;
            let entry = entry
                .ok_or_else(|| ComposeError::NoEntryPoint(format!("`{instance}` inside {at}")))?;
            b.bind_input(idx, ENTRY_PORT, entry)?;
            for (port, ty) in data_ins {
                let chan = b.add_channel(format!("{instance}.{port}"), ty)?;
                b.bind_input(idx, &port, chan)?;
            }
            let stop = b.add_channel(format!("{instance}.{EXIT_PORT}"), MessageType::Event)?;
            b.bind_output(idx, EXIT_PORT, stop)?;
            for (port, ty) in data_outs {
                let chan = b.add_channel(format!("{instance}.{port}"), ty)?;
                b.bind_output(idx, &port, chan)?;
            }
            Ok(Some(stop))
        }
        ProcessExpr::Seq(left, right) => {
            // Exit of the left operand drives the right operand's entry; no
            // auxiliary components.
            let left_exit = build(left, b, namer, entry, "a sequential composition")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err(at)))?;
            build(right, b, namer, Some(left_exit), "a sequential composition")
        }
        ProcessExpr::Par(left, right) => {
            // The same entry stream activates both operands; exits join in `&`.
            let left_exit = build(left, b, namer, entry, "a parallel composition")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err(at)))?;
            let right_exit = build(right, b, namer, entry, "a parallel composition")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err(at)))?;
            let mut amp = amp_connector();
            let name = namer.connector("amp");
            amp.rename(name.clone());
            let idx = b.add_component(amp)?;
            b.bind_input(idx, "x", left_exit)?;
            b.bind_input(idx, "y", right_exit)?;
            let z = b.add_channel(format!("{name}.z"), MessageType::Event)?;
            b.bind_output(idx, "z", z)?;
            Ok(Some(z))
        }
        ProcessExpr::Alt(left, right, policy) => {
            let entry = entry
                .ok_or_else(|| ComposeError::NoEntryPoint("an alternate composition".into()))?;
            let mut at_comp = at_connector(policy.clone());
            let at_name = namer.connector("at");
            at_comp.rename(at_name.clone());
            let at_idx = b.add_component(at_comp)?;
            b.bind_input(at_idx, "ent", entry)?;
            let left_entry = b.add_channel(format!("{at_name}.left"), MessageType::Event)?;
            let right_entry = b.add_channel(format!("{at_name}.right"), MessageType::Event)?;
            b.bind_output(at_idx, "left", left_entry)?;
            b.bind_output(at_idx, "right", right_entry)?;

            let left_exit = build(left, b, namer, Some(left_entry), "an alternate composition")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err("an alternate composition")))?;
            let right_exit = build(right, b, namer, Some(right_entry), "an alternate composition")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err("an alternate composition")))?;

            let mut plus = plus_connector();
            let plus_name = namer.connector("plus");
            plus.rename(plus_name.clone());
            let plus_idx = b.add_component(plus)?;
            b.bind_input(plus_idx, "x", left_exit)?;
            b.bind_input(plus_idx, "y", right_exit)?;
            let z = b.add_channel(format!("{plus_name}.z"), MessageType::Event)?;
            b.bind_output(plus_idx, "z", z)?;
            Ok(Some(z))
        }
        ProcessExpr::LoopAuto(body, delay) => {
            if entry.is_some() {
                return Err(ComposeError::NoEntryPoint(format!(
                    "an autonomous loop starts itself and cannot be activated from {at}"
                )));
            }
            let mut d = delay_component(*delay, DelayMode::Autonomous)?;
            let name = namer.connector("delay");
            d.rename(name.clone());
            let idx = b.add_component(d)?;
            let body_entry = b.add_channel(format!("{name}.entD"), MessageType::Event)?;
            b.bind_output(idx, "entD", body_entry)?;
            let body_exit = build(body, b, namer, Some(body_entry), "an autonomous loop")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err("an autonomous loop")))?;
            b.bind_input(idx, "extD", body_exit)?;
            Ok(None)
        }
        ProcessExpr::LoopNonAuto(body, policy) => {
            let entry = entry
                .ok_or_else(|| ComposeError::NoEntryPoint("a non-autonomous loop".into()))?;
            let mut d = delay_component(1, DelayMode::NonAutonomous(policy.clone()))?;
            let name = namer.connector("delay");
            d.rename(name.clone());
            let idx = b.add_component(d)?;
            b.bind_input(idx, "entP", entry)?;
            let body_entry = b.add_channel(format!("{name}.entD"), MessageType::Event)?;
            b.bind_output(idx, "entD", body_entry)?;
            let body_exit = build(body, b, namer, Some(body_entry), "a non-autonomous loop")?
                .ok_or_else(|| ComposeError::NoExitPoint(exit_err("a non-autonomous loop")))?;
            // The body's exit is both the loop's exit point and the delay's
            // completion signal; the pass-through costs no ticks.
            b.bind_input(idx, "extD", body_exit)?;
            Ok(Some(body_exit))
        }
    }
}

fn exit_err(at: &str) -> String {
    format!("an autonomous loop inside {at} has no exit point")
}

/// The channel that activates the composed process.
pub fn entry_of(expr: &ProcessExpr) -> Result<String, ComposeError> {
    let network = compile(expr)?;
    network
        .entry_channel()
        .map(str::to_string)
        .ok_or_else(|| ComposeError::NoEntryPoint("autonomous loops start themselves".into()))
}

/// The channel that signals termination of the composed process.
pub fn exit_of(expr: &ProcessExpr) -> Result<String, ComposeError> {
    let network = compile(expr)?;
    network
        .exit_channel()
        .map(str::to_string)
        .ok_or_else(|| ComposeError::NoExitPoint("autonomous loops never terminate".into()))
}

impl fmt::Display for ProcessExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessExpr::Elem(s) => write!(f, "{}", s.name),
            ProcessExpr::Seq(l, r) => write!(f, "({l} ; {r})"),
            ProcessExpr::Par(l, r) => write!(f, "({l} || {r})"),
            ProcessExpr::Alt(l, r, _) => write!(f, "({l} (+) {r})"),
            ProcessExpr::LoopAuto(b, d) => write!(f, "loop(auto {d}) {b}"),
            ProcessExpr::LoopNonAuto(b, _) => write!(f, "loop(manual) {b}"),
        }
    }
}
