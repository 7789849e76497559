//! Executable components: named ports, local state, and a deterministic step
//! function driven once per tick. A process becomes a component by adding the
//! entry/exit channels and the inactive-phase behavior around its own clauses.

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::{eval, eval_interval, EvalEnv};
use crate::process::{
    buffer_var, validate, AssumptionClause, ChannelDecl, Diagnostic, ElementaryProcessSpec,
    ENTRY_PORT, EXIT_PORT,
};
use crate::stream::{Message, MessageType, TimeInterval};
use thiserror::Error;

/// Whether tick-`t` outputs may depend on tick-`t` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causality {
    Weak,
    /// Strict components read the previous tick's inputs, which is what
    /// breaks feedback cycles.
    Strict,
}

/// The two phases of a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessMode {
    pub active: bool,
}

impl fmt::Display for ProcessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.active { "active" } else { "inactive" })
    }
}

/// Named mutable values of a component.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    values: BTreeMap<String, Message>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: Message) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Message> {
        self.values.get(name)
    }

    pub fn get_bool(&self, name: &str) -> bool {
        matches!(self.values.get(name), Some(Message::Bool(true)))
    }

    pub fn get_int(&self, name: &str) -> i64 {
        match self.values.get(name) {
            Some(Message::Int(v)) => *v,
            _ => 0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Message)> {
        self.values.iter()
    }
}

/// Warnings a component can raise while stepping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningKind {
    /// A start event arrived while the process was already active; the event
    /// is ignored.
    RestartWhileActive,
    /// Both inputs of a `+` merge carried events in the same interval.
    MergeCollision,
    /// A restart request was dropped by a non-autonomous delay.
    RestartDropped,
}

impl fmt::Display for WarningKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WarningKind::RestartWhileActive => "restart-while-active",
            WarningKind::MergeCollision => "merge-collision",
            WarningKind::RestartDropped => "restart-dropped",
        };
        write!(f, "{s}")
    }
}

/// Result of stepping a component for one tick.
#[derive(Debug, Clone, Default)]
pub struct StepResult {
    pub outputs: BTreeMap<String, TimeInterval>,
    pub warnings: Vec<WarningKind>,
    /// The phase in which this tick was processed; only process-derived
    /// components report a mode.
    pub mode: Option<ProcessMode>,
}

/// Deterministic policy for the `@` choice connector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChooserPolicy {
    RoundRobin,
    Fixed(Side),
    SeededRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Restart behavior of the non-autonomous delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestartPolicy {
    pub allow_restart_while_running: bool,
    pub min_gap_ticks: u64,
}

impl Default for RestartPolicy {
    fn default() -> Self {
        RestartPolicy { allow_restart_while_running: false, min_gap_ticks: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayMode {
    Autonomous,
    NonAutonomous(RestartPolicy),
}

pub type StepFn =
    dyn FnMut(&mut State, usize, &BTreeMap<String, TimeInterval>) -> BTreeMap<String, TimeInterval>
        + Send;

enum Kernel {
    Process(Box<ProcessKernel>),
    Amp,
    At(ChooserPolicy),
    Plus,
    DelayAuto { delay: u64 },
    DelayNonAuto { delay: u64, policy: RestartPolicy },
    Custom(Box<StepFn>),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Process(p) => write!(f, "Process({})", p.spec.name),
            Kernel::Amp => write!(f, "Amp"),
            Kernel::At(p) => write!(f, "At({p:?})"),
            Kernel::Plus => write!(f, "Plus"),
            Kernel::DelayAuto { delay } => write!(f, "DelayAuto({delay})"),
            Kernel::DelayNonAuto { delay, policy } => write!(f, "DelayNonAuto({delay}, {policy:?})"),
            Kernel::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A step machine with named input and output ports.
#[derive(Debug)]
pub struct Component {
    name: String,
    in_ports: Vec<ChannelDecl>,
    out_ports: Vec<ChannelDecl>,
    causality: Causality,
    assumptions: Vec<AssumptionClause>,
    enums: BTreeMap<String, Vec<String>>,
    state: State,
    initial_state: State,
    kernel: Kernel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComponentError {
    #[error("invalid process spec `{name}`: {} diagnostic(s)", .diagnostics.len())]
    InvalidSpec { name: String, diagnostics: Vec<Diagnostic> },
    #[error("a delay of {0} tick(s) risks Zeno runs; at least one tick is required")]
    ZenoRisk(u64),
}

impl Component {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn in_ports(&self) -> &[ChannelDecl] {
        &self.in_ports
    }

    pub fn out_ports(&self) -> &[ChannelDecl] {
        &self.out_ports
    }

    pub fn causality(&self) -> Causality {
        self.causality
    }

    pub fn assumptions(&self) -> &[AssumptionClause] {
        &self.assumptions
    }

    /// Enumeration types referenced by the assumptions, if any.
    pub fn enums(&self) -> &BTreeMap<String, Vec<String>> {
        &self.enums
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    /// True for components obtained from a process spec; only these have a
    /// mode history.
    pub fn is_process(&self) -> bool {
        matches!(self.kernel, Kernel::Process(_))
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Restore the construction-time state.
    pub fn reset(&mut self) {
        self.state = self.initial_state.clone();
    }

    /// Advance one tick. `inputs` must provide an interval for every input
    /// port; missing ports read as empty.
    pub fn step(&mut self, tick: usize, inputs: &BTreeMap<String, TimeInterval>) -> StepResult {
        let empty = TimeInterval::empty();
        let get = |port: &str| inputs.get(port).unwrap_or(&empty).clone();
        match &mut self.kernel {
            Kernel::Process(kernel) => kernel.step(&mut self.state, inputs),
            Kernel::Amp => {
                let x = self.state.get_bool("xReady") || !get("x").is_empty();
                let y = self.state.get_bool("yReady") || !get("y").is_empty();
                let mut outputs = BTreeMap::new();
                if x && y {
                    outputs.insert("z".to_string(), TimeInterval::singleton(Message::Event));
                    self.state.set("xReady", Message::Bool(false));
                    self.state.set("yReady", Message::Bool(false));
                } else {
                    outputs.insert("z".to_string(), TimeInterval::empty());
                    self.state.set("xReady", Message::Bool(x));
                    self.state.set("yReady", Message::Bool(y));
                }
                StepResult { outputs, ..Default::default() }
            }
            Kernel::At(policy) => {
                let mut outputs = BTreeMap::from([
                    ("left".to_string(), TimeInterval::empty()),
                    ("right".to_string(), TimeInterval::empty()),
                ]);
                if !get("ent").is_empty() {
                    let side = match policy {
                        ChooserPolicy::Fixed(side) => *side,
                        ChooserPolicy::RoundRobin => {
                            let side = if self.state.get_bool("nextLeft") {
                                Side::Left
                            } else {
                                Side::Right
                            };
                            self.state
                                .set("nextLeft", Message::Bool(side == Side::Right));
                            side
                        }
                        ChooserPolicy::SeededRandom(_) => {
                            let s = self.state.get_int("rngState") as u64;
                            let (next, out) = splitmix64(s);
                            self.state.set("rngState", Message::Int(next as i64));
                            if out & 1 == 0 {
                                Side::Left
                            } else {
                                Side::Right
                            }
                        }
                    };
                    let port = match side {
                        Side::Left => "left",
                        Side::Right => "right",
                    };
                    outputs.insert(port.to_string(), TimeInterval::singleton(Message::Event));
                }
                StepResult { outputs, ..Default::default() }
            }
            Kernel::Plus => {
                let x = !get("x").is_empty();
                let y = !get("y").is_empty();
                let mut warnings = Vec::new();
                if x && y {
                    warnings.push(WarningKind::MergeCollision);
                }
                let z = if x || y {
                    TimeInterval::singleton(Message::Event)
                } else {
                    TimeInterval::empty()
                };
                StepResult {
                    outputs: BTreeMap::from([("z".to_string(), z)]),
                    warnings,
                    mode: None,
                }
            }
            Kernel::DelayAuto { delay } => {
                // Inputs are previous-tick intervals (strict causality). An
                // exit event at tick t-1 schedules the next start at t-1+d.
                if !get("extD").is_empty() {
                    self.state.set("remaining", Message::Int(*delay as i64 - 1));
                }
                let remaining = self.state.get_int("remaining");
                let mut out = TimeInterval::empty();
                if remaining == 0 {
                    out = TimeInterval::singleton(Message::Event);
                    self.state.set("remaining", Message::Int(-1));
                } else if remaining > 0 {
                    self.state.set("remaining", Message::Int(remaining - 1));
                }
                StepResult {
                    outputs: BTreeMap::from([("entD".to_string(), out)]),
                    ..Default::default()
                }
            }
            Kernel::DelayNonAuto { delay, policy } => {
                let tick = tick as i64;
                let mut warnings = Vec::new();
                if !get("extD").is_empty() {
                    self.state.set("running", Message::Bool(false));
                }
                if !get("entP").is_empty() {
                    let running = self.state.get_bool("running");
                    let pending = self.state.get_int("pending");
                    let scheduled = pending >= 0;
                    if scheduled || (running && !policy.allow_restart_while_running) {
                        warnings.push(WarningKind::RestartDropped);
                    } else {
                        // The start event arrived at tick-1.
                        let earliest = tick - 1 + *delay as i64;
                        let last = self.state.get_int("lastEmit");
                        let at = if last < 0 {
                            earliest
                        } else {
                            earliest.max(last + policy.min_gap_ticks as i64)
                        };
                        self.state.set("pending", Message::Int(at));
                    }
                }
                let mut out = TimeInterval::empty();
                if self.state.get_int("pending") == tick {
                    out = TimeInterval::singleton(Message::Event);
                    self.state.set("pending", Message::Int(-1));
                    self.state.set("lastEmit", Message::Int(tick));
                    self.state.set("running", Message::Bool(true));
                }
                StepResult {
                    outputs: BTreeMap::from([("entD".to_string(), out)]),
                    warnings,
                    mode: None,
                }
            }
            Kernel::Custom(f) => {
                let outputs = f(&mut self.state, tick, inputs);
                StepResult { outputs, ..Default::default() }
            }
        }
    }

    /// Build a component with a caller-supplied step function. Intended for
    /// hand-built networks; all state must live in `init_state` for `reset`
    /// to work.
    pub fn from_step_fn(
        name: impl Into<String>,
        in_ports: Vec<ChannelDecl>,
        out_ports: Vec<ChannelDecl>,
        causality: Causality,
        init_state: State,
        step: impl FnMut(&mut State, usize, &BTreeMap<String, TimeInterval>) -> BTreeMap<String, TimeInterval>
            + Send
            + 'static,
    ) -> Self {
        Component {
            name: name.into(),
            in_ports,
            out_ports,
            causality,
            assumptions: Vec::new(),
            enums: BTreeMap::new(),
            state: init_state.clone(),
            initial_state: init_state,
            kernel: Kernel::Custom(Box::new(step)),
        }
    }
}

fn splitmix64(state: u64) -> (u64, u64) {
    let next = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = next;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (next, z ^ (z >> 31))
}

fn event_port(name: &str, direction: crate::process::Direction) -> ChannelDecl {
    ChannelDecl {
        name: name.to_string(),
        msg_type: MessageType::Event,
        direction,
    }
}

/// The `&` join: fires its output exactly when both inputs have fired, either
/// simultaneously or one after another, then rearms.
pub fn amp_connector() -> Component {
    use crate::process::Direction::*;
    let mut state = State::new();
    state.set("xReady", Message::Bool(false));
    state.set("yReady", Message::Bool(false));
    Component {
        name: "amp".to_string(),
        in_ports: vec![event_port("x", Input), event_port("y", Input)],
        out_ports: vec![event_port("z", Output)],
        causality: Causality::Weak,
        assumptions: vec![
            AssumptionClause::MsgBound { channel: "x".into(), bound: 1 },
            AssumptionClause::MsgBound { channel: "y".into(), bound: 1 },
        ],
        enums: BTreeMap::new(),
        state: state.clone(),
        initial_state: state,
        kernel: Kernel::Amp,
    }
}

/// The `@` split: forwards each incoming event to exactly one of its two
/// outputs, chosen by the policy.
pub fn at_connector(policy: ChooserPolicy) -> Component {
    use crate::process::Direction::*;
    let mut state = State::new();
    match &policy {
        ChooserPolicy::RoundRobin => state.set("nextLeft", Message::Bool(true)),
        ChooserPolicy::SeededRandom(seed) => state.set("rngState", Message::Int(*seed as i64)),
        ChooserPolicy::Fixed(_) => {}
    }
    Component {
        name: "at".to_string(),
        in_ports: vec![event_port("ent", Input)],
        out_ports: vec![event_port("left", Output), event_port("right", Output)],
        causality: Causality::Weak,
        assumptions: vec![AssumptionClause::MsgBound { channel: "ent".into(), bound: 1 }],
        enums: BTreeMap::new(),
        state: state.clone(),
        initial_state: state,
        kernel: Kernel::At(policy),
    }
}

/// The `+` merge: forwards events from either input; simultaneous events are
/// merged into one and flagged, since alternate branches guarantee disjoint
/// exits.
pub fn plus_connector() -> Component {
    use crate::process::Direction::*;
    Component {
        name: "plus".to_string(),
        in_ports: vec![event_port("x", Input), event_port("y", Input)],
        out_ports: vec![event_port("z", Output)],
        causality: Causality::Weak,
        assumptions: vec![
            AssumptionClause::MsgBound { channel: "x".into(), bound: 1 },
            AssumptionClause::MsgBound { channel: "y".into(), bound: 1 },
        ],
        enums: BTreeMap::new(),
        state: State::new(),
        initial_state: State::new(),
        kernel: Kernel::Plus,
    }
}

/// Strict-causal loop timer. An autonomous delay starts the loop body by
/// itself at tick 0 and re-starts it `delay` ticks after each exit event; a
/// non-autonomous delay forwards external starts with a `delay`-tick lag,
/// gated by the restart policy. A zero delay is rejected because it would
/// permit Zeno runs.
pub fn delay_component(delay: u64, mode: DelayMode) -> Result<Component, ComponentError> {
    use crate::process::Direction::*;
    if delay < 1 {
        return Err(ComponentError::ZenoRisk(delay));
    }
    if let DelayMode::NonAutonomous(policy) = &mode {
        if policy.min_gap_ticks < 1 {
            return Err(ComponentError::ZenoRisk(policy.min_gap_ticks));
        }
    }
    let mut state = State::new();
    let (in_ports, kernel, assumptions) = match mode {
        DelayMode::Autonomous => {
            // Fires at tick 0 by itself.
            state.set("remaining", Message::Int(0));
            (
                vec![event_port("extD", Input)],
                Kernel::DelayAuto { delay },
                vec![AssumptionClause::MsgBound { channel: "extD".into(), bound: 1 }],
            )
        }
        DelayMode::NonAutonomous(policy) => {
            state.set("running", Message::Bool(false));
            state.set("pending", Message::Int(-1));
            state.set("lastEmit", Message::Int(-1));
            (
                vec![event_port("entP", Input), event_port("extD", Input)],
                Kernel::DelayNonAuto { delay, policy },
                vec![
                    AssumptionClause::MsgBound { channel: "entP".into(), bound: 1 },
                    AssumptionClause::MsgBound { channel: "extD".into(), bound: 1 },
                ],
            )
        }
    };
    Ok(Component {
        name: "delay".to_string(),
        in_ports,
        out_ports: vec![event_port("entD", Output)],
        causality: Causality::Strict,
        assumptions,
        enums: BTreeMap::new(),
        state: state.clone(),
        initial_state: state,
        kernel,
    })
}

/// Transform a process specification into its component: the ports are the
/// process's data channels plus the entry/exit channels, and the step
/// function realizes the active/inactive phase behavior.
pub fn to_component(spec: &ElementaryProcessSpec) -> Result<Component, ComponentError> {
    let diagnostics = validate(spec);
    if !diagnostics.is_empty() {
        return Err(ComponentError::InvalidSpec { name: spec.name.clone(), diagnostics });
    }
    let mut in_ports = vec![event_port(ENTRY_PORT, crate::process::Direction::Input)];
    in_ports.extend(spec.inputs().cloned());
    let mut out_ports = vec![event_port(EXIT_PORT, crate::process::Direction::Output)];
    out_ports.extend(spec.outputs().cloned());

    let mut state = State::new();
    state.set("active", Message::Bool(false));
    for b in &spec.buffers {
        state.set(buffer_var(&b.for_input), b.init_value.clone());
    }
    let const_params = &spec.params;
    let empty_inputs = BTreeMap::new();
    let empty_buffers = BTreeMap::new();
    let empty_locals = BTreeMap::new();
    let empty_buffer_of = BTreeMap::new();
    for l in &spec.behavior.locals {
        let env = EvalEnv {
            params: const_params,
            locals: &empty_locals,
            buffers: &empty_buffers,
            inputs: &empty_inputs,
            buffer_of: &empty_buffer_of,
            enums: &spec.enums,
        };
        state.set(l.name.clone(), eval(&l.init, &env));
    }

    let mut assumptions = vec![AssumptionClause::MsgBound { channel: ENTRY_PORT.into(), bound: 1 }];
    assumptions.extend(spec.behavior.assumptions.iter().cloned());

    let kernel = ProcessKernel::new(spec.clone());
    Ok(Component {
        name: spec.name.clone(),
        in_ports,
        out_ports,
        causality: Causality::Weak,
        assumptions,
        enums: spec.enums.clone(),
        state: state.clone(),
        initial_state: state,
        kernel: Kernel::Process(Box::new(kernel)),
    })
}

/// Step machine for a process-derived component.
#[derive(Debug)]
struct ProcessKernel {
    spec: ElementaryProcessSpec,
    data_inputs: Vec<(String, String)>,
    data_outputs: Vec<String>,
    buffer_of: BTreeMap<String, String>,
    local_names: Vec<String>,
}

impl ProcessKernel {
    fn new(spec: ElementaryProcessSpec) -> Self {
        let data_inputs: Vec<(String, String)> = spec
            .inputs()
            .map(|c| (c.name.clone(), buffer_var(&c.name)))
            .collect();
        let data_outputs = spec.outputs().map(|c| c.name.clone()).collect();
        let buffer_of = data_inputs.iter().cloned().collect();
        let local_names = spec.behavior.locals.iter().map(|l| l.name.clone()).collect();
        ProcessKernel { spec, data_inputs, data_outputs, buffer_of, local_names }
    }

    fn step(&self, state: &mut State, inputs: &BTreeMap<String, TimeInterval>) -> StepResult {
        let active = state.get_bool("active");
        let mode = Some(ProcessMode { active });
        let empty = TimeInterval::empty();
        let start_nonempty = !inputs.get(ENTRY_PORT).unwrap_or(&empty).is_empty();

        let mut outputs: BTreeMap<String, TimeInterval> = BTreeMap::new();
        outputs.insert(EXIT_PORT.to_string(), TimeInterval::empty());
        for out in &self.data_outputs {
            outputs.insert(out.clone(), TimeInterval::empty());
        }
        let mut warnings = Vec::new();

        if active {
            if start_nonempty {
                warnings.push(WarningKind::RestartWhileActive);
            }
            let buffers: BTreeMap<String, Message> = self
                .data_inputs
                .iter()
                .map(|(_, buf)| (buf.clone(), state.get(buf).cloned().unwrap_or(Message::Int(0))))
                .collect();
            let locals: BTreeMap<String, Message> = self
                .local_names
                .iter()
                .map(|l| (l.clone(), state.get(l).cloned().unwrap_or(Message::Int(0))))
                .collect();
            let data_intervals: BTreeMap<String, TimeInterval> = self
                .data_inputs
                .iter()
                .map(|(input, _)| {
                    (input.clone(), inputs.get(input).unwrap_or(&empty).clone())
                })
                .collect();
            let env = EvalEnv {
                params: &self.spec.params,
                locals: &locals,
                buffers: &buffers,
                inputs: &data_intervals,
                buffer_of: &self.buffer_of,
                enums: &self.spec.enums,
            };

            let ending = eval(&self.spec.behavior.ending, &env) == Message::Bool(true);
            let effect = if ending {
                self.spec.behavior.final_effect()
            } else {
                &self.spec.behavior.calc
            };

            // Evaluate everything against the pre-state, then commit.
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
                .map(|(local, e)| (local.clone(), eval(e, &env)))
                .collect();
            for (name, value) in next_buffers.into_iter().chain(next_locals) {
                state.set(name, value);
            }

            if ending {
                outputs.insert(EXIT_PORT.to_string(), TimeInterval::singleton(Message::Event));
                state.set("active", Message::Bool(false));
            }
        } else {
            // Inactive: every output stays empty; buffers absorb current
            // inputs (also on the activation tick, before the first active
            // tick reads them).
            for (input, buf) in &self.data_inputs {
                let interval = inputs.get(input).unwrap_or(&empty);
                if let Some(m) = interval.messages().first() {
                    state.set(buf.clone(), m.clone());
                }
            }
            if start_nonempty {
                let empty_locals = BTreeMap::new();
                let empty_buffers = BTreeMap::new();
                let empty_intervals = BTreeMap::new();
                let empty_buffer_of = BTreeMap::new();
                let env = EvalEnv {
                    params: &self.spec.params,
                    locals: &empty_locals,
                    buffers: &empty_buffers,
                    inputs: &empty_intervals,
                    buffer_of: &empty_buffer_of,
                    enums: &self.spec.enums,
                };
                let assigns: Vec<(String, Message)> = self
                    .spec
                    .behavior
                    .init_process
                    .iter()
                    .map(|(local, e)| (local.clone(), eval(e, &env)))
                    .collect();
                for (name, value) in assigns {
                    state.set(name, value);
                }
                state.set("active", Message::Bool(true));
            }
        }

        StepResult { outputs, warnings, mode }
    }
}
