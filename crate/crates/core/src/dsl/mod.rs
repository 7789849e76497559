//! The `.pspec` specification language: parser, printer, and the document
//! model tying process declarations, compositions, and environments together.

pub mod lexer;
pub mod parser;
pub mod printer;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::component::{ChooserPolicy, RestartPolicy};
use crate::compose::{Network, ProcessExpr};
use crate::process::ElementaryProcessSpec;
use crate::sim::{EnvInputs, SimError};
use crate::stream::{Message, MessageType};

/// A user enumeration type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDecl {
    pub name: String,
    pub symbols: Vec<String>,
}

/// Composition expression over process names, as written in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositionExpr {
    Ref(String),
    Seq(Box<CompositionExpr>, Box<CompositionExpr>),
    Par(Box<CompositionExpr>, Box<CompositionExpr>),
    Alt(Box<CompositionExpr>, Box<CompositionExpr>),
    LoopAuto(Box<CompositionExpr>, u64),
    LoopNonAuto(Box<CompositionExpr>, RestartPolicy),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionDecl {
    pub name: String,
    pub expr: CompositionExpr,
}

/// Untyped message literal; the channel type resolves it when the env is
/// bound to a network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessageLit {
    Int(i64),
    Bool(bool),
    Event,
    Sym(String),
}

impl fmt::Display for MessageLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageLit::Int(v) => write!(f, "{v}"),
            MessageLit::Bool(v) => write!(f, "{v}"),
            MessageLit::Event => write!(f, "ev"),
            MessageLit::Sym(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvEntry {
    pub channel: String,
    pub tick: usize,
    pub messages: Vec<MessageLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvDecl {
    pub name: String,
    pub entries: Vec<EnvEntry>,
}

/// A parsed `.pspec` document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecDocument {
    pub enums: Vec<EnumDecl>,
    pub processes: Vec<ElementaryProcessSpec>,
    pub compositions: Vec<CompositionDecl>,
    pub envs: Vec<EnvDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("unknown composition `{0}`")]
    UnknownComposition(String),
    #[error("unknown env `{0}`")]
    UnknownEnv(String),
    #[error("env entry `{channel}` has no matching external input")]
    UnknownChannel { channel: String },
    #[error("literal `{lit}` does not fit channel `{channel}`")]
    BadLiteral { channel: String, lit: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl SpecDocument {
    pub fn process(&self, name: &str) -> Result<&ElementaryProcessSpec, DocError> {
        self.processes
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| DocError::UnknownProcess(name.to_string()))
    }

    pub fn composition_decl(&self, name: &str) -> Result<&CompositionDecl, DocError> {
        self.compositions
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DocError::UnknownComposition(name.to_string()))
    }

    pub fn env_decl(&self, name: &str) -> Result<&EnvDecl, DocError> {
        self.envs
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| DocError::UnknownEnv(name.to_string()))
    }

    /// Resolve a composition declaration into a process expression. `@`
    /// choices default to deterministic round robin.
    pub fn composition(&self, name: &str) -> Result<ProcessExpr, DocError> {
        let decl = self.composition_decl(name)?;
        self.resolve(&decl.expr)
    }

    fn resolve(&self, expr: &CompositionExpr) -> Result<ProcessExpr, DocError> {
        Ok(match expr {
            CompositionExpr::Ref(name) => ProcessExpr::Elem(self.process(name)?.clone()),
            CompositionExpr::Seq(l, r) => {
                ProcessExpr::seq(self.resolve(l)?, self.resolve(r)?)
            }
            CompositionExpr::Par(l, r) => {
                ProcessExpr::par(self.resolve(l)?, self.resolve(r)?)
            }
            CompositionExpr::Alt(l, r) => ProcessExpr::alt(
                self.resolve(l)?,
                self.resolve(r)?,
                ChooserPolicy::RoundRobin,
            ),
            CompositionExpr::LoopAuto(b, d) => ProcessExpr::loop_auto(self.resolve(b)?, *d),
            CompositionExpr::LoopNonAuto(b, p) => {
                ProcessExpr::loop_non_auto(self.resolve(b)?, p.clone())
            }
        })
    }

    /// Instantiate an env declaration against a compiled network. Channels
    /// not mentioned stay empty; entries must name external inputs.
    pub fn bind_env(
        &self,
        env_name: &str,
        network: &Network,
        horizon: usize,
    ) -> Result<EnvInputs, DocError> {
        let decl = self.env_decl(env_name)?;
        let mut env = EnvInputs::for_network(network, horizon);
        for entry in &decl.entries {
            let chan = network
                .channel_index(&entry.channel)
                .map(|i| &network.channels()[i])
                .filter(|c| c.source.is_none())
                .ok_or_else(|| DocError::UnknownChannel { channel: entry.channel.clone() })?;
            let messages: Vec<Message> = entry
                .messages
                .iter()
                .map(|lit| self.resolve_literal(lit, &chan.msg_type, &entry.channel))
                .collect::<Result<_, _>>()?;
            env.set_interval(
                &entry.channel,
                entry.tick,
                crate::stream::TimeInterval::from_messages(messages),
            )?;
        }
        Ok(env)
    }

    fn resolve_literal(
        &self,
        lit: &MessageLit,
        ty: &MessageType,
        channel: &str,
    ) -> Result<Message, DocError> {
        let bad = || DocError::BadLiteral { channel: channel.to_string(), lit: lit.to_string() };
        match (lit, ty) {
            (MessageLit::Int(v), MessageType::Int) => Ok(Message::Int(*v)),
            (MessageLit::Bool(v), MessageType::Bool) => Ok(Message::Bool(*v)),
            (MessageLit::Event, MessageType::Event) => Ok(Message::Event),
            (MessageLit::Sym(s), MessageType::Enum(ty_name)) => {
                let known = self
                    .enums
                    .iter()
                    .find(|e| &e.name == ty_name)
                    .is_some_and(|e| e.symbols.iter().any(|sym| sym == s));
                if known {
                    Ok(Message::Sym { ty: ty_name.clone(), symbol: s.clone() })
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }

    /// Enum types as a name-to-symbols map, the form process specs embed.
    pub fn enum_map(&self) -> BTreeMap<String, Vec<String>> {
        self.enums
            .iter()
            .map(|e| (e.name.clone(), e.symbols.clone()))
            .collect()
    }
}

pub use parser::{parse, ParseDiagnostic};
pub use printer::print;
