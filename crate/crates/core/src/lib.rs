//! Processes as timed-stream components: a specification DSL, a mechanical
//! process-to-component transformation, composition operators with explicit
//! connectors, a deterministic synchronous simulator, activity and WCET
//! analysis, and DOT/PNML exporters.

pub mod analysis;
pub mod component;
pub mod compose;
pub mod dsl;
pub mod export;
pub mod expr;
pub mod process;
pub mod sim;
pub mod stream;

pub use component::{
    amp_connector, at_connector, delay_component, plus_connector, to_component, Causality,
    ChooserPolicy, Component, ComponentError, DelayMode, ProcessMode, RestartPolicy, Side, State,
    StepResult, WarningKind,
};
pub use compose::{compile, entry_of, exit_of, ComposeError, Network, ProcessExpr};
pub use expr::{BinOp, Expr, IntervalExpr, UnaryOp};
pub use process::{
    buffer_var, validate, AssumptionClause, BehaviorSpec, BufferDecl, ChannelDecl, Diagnostic,
    Direction, EffectSpec, ElementaryProcessSpec, LocalDecl,
};
pub use sim::{check_assumptions, run, schedule, AssumptionViolation, EnvInputs, SimError, Trace};
pub use stream::{disjoint, msg_bound, Message, MessageType, StreamError, TimeInterval, TimedStream};
