//! Deterministic synchronous execution of a network over a finite horizon.
//! One global tick is one time interval: every component steps once per tick,
//! weak-causal components reading current-tick inputs in topological order,
//! strict-causal components reading the previous tick.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::component::{Causality, ProcessMode, WarningKind};
use crate::compose::Network;
use crate::expr::{eval, EvalEnv, Expr};
use crate::process::AssumptionClause;
use crate::stream::{Message, StreamError, TimeInterval, TimedStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("causality cycle with no strict-causal component through {components:?}")]
    CausalityCycle { components: Vec<String> },
    #[error("horizon mismatch: env covers {env} ticks, run asked for {run}")]
    HorizonMismatch { env: usize, run: usize },
    #[error("env does not cover external input `{0}`")]
    MissingEnvChannel(String),
    #[error("`{0}` is not an external input of the network")]
    UnknownEnvChannel(String),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// A warning recorded while stepping components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceWarning {
    pub tick: usize,
    pub kind: WarningKind,
    pub location: String,
}

/// Everything observable about one run: every channel's stream over the
/// horizon, the mode history of every process-derived component, and the
/// warnings raised along the way.
#[derive(Debug, Clone)]
pub struct Trace {
    pub horizon: usize,
    pub channels: BTreeMap<String, TimedStream>,
    pub modes: BTreeMap<String, Vec<ProcessMode>>,
    pub warnings: Vec<TraceWarning>,
    component_outputs: BTreeMap<String, Vec<String>>,
}

impl Trace {
    /// Output channels of a component, in port order.
    pub fn outputs_of(&self, component: &str) -> Option<&[String]> {
        self.component_outputs.get(component).map(|v| v.as_slice())
    }

    pub fn component_names(&self) -> impl Iterator<Item = &String> {
        self.component_outputs.keys()
    }

    /// Build a trace directly from channel streams, for analysis of data
    /// that did not come out of `run`.
    pub fn from_channels(
        horizon: usize,
        channels: BTreeMap<String, TimedStream>,
        component_outputs: BTreeMap<String, Vec<String>>,
    ) -> Result<Self, SimError> {
        for s in channels.values() {
            if s.horizon() != horizon {
                return Err(SimError::HorizonMismatch { env: s.horizon(), run: horizon });
            }
        }
        Ok(Trace {
            horizon,
            channels,
            modes: BTreeMap::new(),
            warnings: Vec::new(),
            component_outputs,
        })
    }
}

/// The environment's streams for every external input channel.
#[derive(Debug, Clone)]
pub struct EnvInputs {
    horizon: usize,
    streams: BTreeMap<String, TimedStream>,
}

impl EnvInputs {
    /// Empty streams covering exactly the network's external inputs.
    pub fn for_network(network: &Network, horizon: usize) -> Self {
        let streams = network
            .channels()
            .iter()
            .filter(|c| c.source.is_none())
            .map(|c| (c.name.clone(), TimedStream::new(c.msg_type.clone(), horizon)))
            .collect();
        EnvInputs { horizon, streams }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn streams(&self) -> &BTreeMap<String, TimedStream> {
        &self.streams
    }

    pub fn set_interval(
        &mut self,
        channel: &str,
        tick: usize,
        interval: TimeInterval,
    ) -> Result<(), SimError> {
        let stream = self
            .streams
            .get_mut(channel)
            .ok_or_else(|| SimError::UnknownEnvChannel(channel.to_string()))?;
        stream.set_interval(tick, interval)?;
        Ok(())
    }

    /// Place a single event on an Event-typed channel.
    pub fn set_event(&mut self, channel: &str, tick: usize) -> Result<(), SimError> {
        self.set_interval(channel, tick, TimeInterval::singleton(Message::Event))
    }
}

/// Evaluation order over same-tick dependencies. Strict components read the
/// previous tick, so only wires into weak components order the tick; a cycle
/// that contains no strict component is rejected.
pub fn schedule(network: &Network) -> Result<Vec<usize>, SimError> {
    let n = network.components.len();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (sink, bindings) in network.in_bindings.iter().enumerate() {
        if network.components[sink].causality() == Causality::Strict {
            continue;
        }
        for &chan in bindings.values() {
            if let Some((source, _)) = network.channels[chan].source {
                if source == sink {
                    // A weak component feeding itself is the smallest
                    // possible cycle.
                    return Err(SimError::CausalityCycle {
                        components: vec![network.components[sink].name().to_string()],
                    });
                }
                successors[source].push(sink);
                indegree[sink] += 1;
            }
        }
    }
    let mut queue: std::collections::VecDeque<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &next in &successors[i] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                queue.push_back(next);
            }
        }
    }
    if order.len() < n {
        let stuck: Vec<String> = (0..n)
            .filter(|i| !order.contains(i))
            .map(|i| network.components[i].name().to_string())
            .collect();
        return Err(SimError::CausalityCycle { components: stuck });
    }
    Ok(order)
}

/// Run the network for `horizon` ticks. Components are reset first, so
/// identical inputs always yield identical traces.
pub fn run(network: &mut Network, env: &EnvInputs, horizon: usize) -> Result<Trace, SimError> {
    if env.horizon != horizon {
        return Err(SimError::HorizonMismatch { env: env.horizon, run: horizon });
    }
    // The env must cover the external inputs exactly.
    for &chan in &network.external_inputs {
        let info = &network.channels[chan];
        if !env.streams.contains_key(&info.name) {
            return Err(SimError::MissingEnvChannel(info.name.clone()));
        }
    }
    for name in env.streams.keys() {
        let external = network
            .channel_index(name)
            .is_some_and(|i| network.channels[i].source.is_none());
        if !external {
            return Err(SimError::UnknownEnvChannel(name.clone()));
        }
    }
    let order = schedule(network)?;
    for c in &mut network.components {
        c.reset();
    }

    let nchannels = network.channels.len();
    let mut recorded: Vec<Vec<TimeInterval>> = vec![Vec::with_capacity(horizon); nchannels];
    let mut prev: Vec<TimeInterval> = vec![TimeInterval::empty(); nchannels];
    let mut modes: BTreeMap<String, Vec<ProcessMode>> = BTreeMap::new();
    let mut warnings = Vec::new();

    for t in 0..horizon {
        let mut current: Vec<TimeInterval> = vec![TimeInterval::empty(); nchannels];
        for &chan in &network.external_inputs {
            let name = &network.channels[chan].name;
            current[chan] = env.streams[name].interval_at(t)?.clone();
        }
        for &ci in &order {
            let strict = network.components[ci].causality() == Causality::Strict;
            let inputs: BTreeMap<String, TimeInterval> = network.in_bindings[ci]
                .iter()
                .map(|(port, &chan)| {
                    let interval = if strict { &prev[chan] } else { &current[chan] };
                    (port.clone(), interval.clone())
                })
                .collect();
            let result = network.components[ci].step(t, &inputs);
            for (port, &chan) in &network.out_bindings[ci] {
                if let Some(interval) = result.outputs.get(port) {
                    current[chan] = interval.clone();
                }
            }
            let name = network.components[ci].name().to_string();
            if let Some(mode) = result.mode {
                modes.entry(name.clone()).or_default().push(mode);
            }
            warnings.extend(result.warnings.into_iter().map(|kind| TraceWarning {
                tick: t,
                kind,
                location: name.clone(),
            }));
        }
        for (chan, interval) in current.iter().enumerate() {
            recorded[chan].push(interval.clone());
        }
        prev = current;
    }

    let mut channels = BTreeMap::new();
    for (chan, intervals) in recorded.into_iter().enumerate() {
        let info = &network.channels[chan];
        channels.insert(
            info.name.clone(),
            TimedStream::from_intervals(info.msg_type.clone(), intervals)?,
        );
    }
    let component_outputs = network
        .components
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let outs = c
                .out_ports()
                .iter()
                .filter_map(|p| network.out_bindings[ci].get(&p.name))
                .map(|&chan| network.channels[chan].name.clone())
                .collect();
            (c.name().to_string(), outs)
        })
        .collect();

    Ok(Trace { horizon, channels, modes, warnings, component_outputs })
}

/// A failed assumption: which component assumed what, and when it broke.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionViolation {
    pub component: String,
    pub tick: usize,
    pub predicate: String,
}

/// Evaluate every component's assumption against the recorded input streams.
/// The trace stays valid as a record; guarantees are void from the first
/// violation tick onward.
pub fn check_assumptions(network: &Network, trace: &Trace) -> Vec<AssumptionViolation> {
    let mut violations = Vec::new();
    let empty_params = BTreeMap::new();
    let empty_values = BTreeMap::new();
    let empty_buffer_of = BTreeMap::new();
    for (ci, component) in network.components.iter().enumerate() {
        if component.assumptions().is_empty() {
            continue;
        }
        let port_streams: BTreeMap<String, &TimedStream> = network.in_bindings[ci]
            .iter()
            .filter_map(|(port, &chan)| {
                trace
                    .channels
                    .get(&network.channels[chan].name)
                    .map(|s| (port.clone(), s))
            })
            .collect();
        for clause in component.assumptions() {
            match clause {
                AssumptionClause::MsgBound { channel, bound } => {
                    let Some(stream) = port_streams.get(channel) else { continue };
                    for t in 0..trace.horizon {
                        if stream.interval_at(t).is_ok_and(|i| i.len() > *bound) {
                            violations.push(AssumptionViolation {
                                component: component.name().to_string(),
                                tick: t,
                                predicate: format!("msg({bound},{channel})"),
                            });
                        }
                    }
                }
                AssumptionClause::PerTick(expr) => {
                    let mut ft_refs = Vec::new();
                    expr.ft_channels(&mut ft_refs);
                    for t in 0..trace.horizon {
                        let inputs: BTreeMap<String, TimeInterval> = port_streams
                            .iter()
                            .filter_map(|(port, s)| {
                                s.interval_at(t).ok().map(|i| (port.clone(), i.clone()))
                            })
                            .collect();
                        // Per-interval predicates hold vacuously on ticks
                        // where a read channel carries no message.
                        if ft_refs
                            .iter()
                            .any(|c| inputs.get(c).is_none_or(|i| i.is_empty()))
                        {
                            continue;
                        }
                        let env = EvalEnv {
                            params: &empty_params,
                            locals: &empty_values,
                            buffers: &empty_values,
                            inputs: &inputs,
                            buffer_of: &empty_buffer_of,
                            enums: component.enums(),
                        };
                        if eval(expr, &env) != Message::Bool(true) {
                            violations.push(AssumptionViolation {
                                component: component.name().to_string(),
                                tick: t,
                                predicate: describe_expr(expr),
                            });
                        }
                    }
                }
            }
        }
    }
    violations.sort_by(|a, b| (a.tick, &a.component).cmp(&(b.tick, &b.component)));
    violations
}

fn describe_expr(expr: &Expr) -> String {
    crate::dsl::printer::expr_to_string(expr)
}
