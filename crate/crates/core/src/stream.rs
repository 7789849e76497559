//! Timed streams: sequences of time intervals, each carrying finitely many
//! messages. One stream is the valuation of one channel over the whole
//! simulation horizon.

use std::fmt;

use thiserror::Error;

/// Message type tag carried by every channel declaration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageType {
    /// Single-element control type; its only inhabitant is the event `ev`.
    Event,
    Int,
    Bool,
    /// User-declared enumeration, identified by its type name.
    Enum(String),
}

impl fmt::Display for MessageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageType::Event => write!(f, "Event"),
            MessageType::Int => write!(f, "Int"),
            MessageType::Bool => write!(f, "Bool"),
            MessageType::Enum(name) => write!(f, "{name}"),
        }
    }
}

/// One message on a channel. `Event` carries no payload, so any two event
/// messages compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Message {
    Event,
    Int(i64),
    Bool(bool),
    /// Value of a user enumeration: type name plus symbol.
    Sym { ty: String, symbol: String },
}

impl Message {
    pub fn message_type(&self) -> MessageType {
        match self {
            Message::Event => MessageType::Event,
            Message::Int(_) => MessageType::Int,
            Message::Bool(_) => MessageType::Bool,
            Message::Sym { ty, .. } => MessageType::Enum(ty.clone()),
        }
    }

    /// Default value of a type, used where a total expression needs a
    /// fallback (e.g. division by zero keeps the result an `Int`).
    pub fn zero_of(ty: &MessageType, enums: &std::collections::BTreeMap<String, Vec<String>>) -> Message {
        match ty {
            MessageType::Event => Message::Event,
            MessageType::Int => Message::Int(0),
            MessageType::Bool => Message::Bool(false),
            MessageType::Enum(name) => Message::Sym {
                ty: name.clone(),
                symbol: enums
                    .get(name)
                    .and_then(|syms| syms.first().cloned())
                    .unwrap_or_default(),
            },
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Event => write!(f, "ev"),
            Message::Int(v) => write!(f, "{v}"),
            Message::Bool(v) => write!(f, "{v}"),
            Message::Sym { symbol, .. } => write!(f, "{symbol}"),
        }
    }
}

/// Errors raised by stream operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("no first element: the interval is empty")]
    NoFirstElement,
    #[error("tick {tick} is outside the stream horizon {horizon}")]
    HorizonExceeded { tick: usize, horizon: usize },
    #[error("streams have different horizons ({left} vs {right})")]
    HorizonMismatch { left: usize, right: usize },
    #[error("message `{found}` does not match channel type {expected}")]
    TypeMismatch { expected: MessageType, found: Message },
}

/// The finite message sequence observed on a channel during one tick.
/// Intra-interval order is preserved by every operation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    messages: Vec<Message>,
}

impl TimeInterval {
    /// The empty interval.
    pub fn empty() -> Self {
        TimeInterval { messages: Vec::new() }
    }

    /// Interval holding exactly one message.
    pub fn singleton(m: Message) -> Self {
        TimeInterval { messages: vec![m] }
    }

    pub fn from_messages(messages: Vec<Message>) -> Self {
        TimeInterval { messages }
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// First message of the interval (`ft`).
    pub fn ft(&self) -> Result<&Message, StreamError> {
        self.messages.first().ok_or(StreamError::NoFirstElement)
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\u{27e8}")?;
        for (i, m) in self.messages.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "\u{27e9}")
    }
}

/// A typed channel valuation over a finite horizon. Streams are conceptually
/// infinite; here they are finite prefixes, and indexing past the horizon is
/// a hard error rather than silent emptiness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedStream {
    msg_type: MessageType,
    intervals: Vec<TimeInterval>,
}

impl TimedStream {
    /// All-empty stream of the given type and horizon.
    pub fn new(msg_type: MessageType, horizon: usize) -> Self {
        TimedStream {
            msg_type,
            intervals: vec![TimeInterval::empty(); horizon],
        }
    }

    /// Build from explicit intervals, checking every message against the
    /// channel type.
    pub fn from_intervals(
        msg_type: MessageType,
        intervals: Vec<TimeInterval>,
    ) -> Result<Self, StreamError> {
        for interval in &intervals {
            check_interval_type(&msg_type, interval)?;
        }
        Ok(TimedStream { msg_type, intervals })
    }

    pub fn msg_type(&self) -> &MessageType {
        &self.msg_type
    }

    pub fn horizon(&self) -> usize {
        self.intervals.len()
    }

    /// The `t`-th time interval of the stream.
    pub fn interval_at(&self, t: usize) -> Result<&TimeInterval, StreamError> {
        self.intervals.get(t).ok_or(StreamError::HorizonExceeded {
            tick: t,
            horizon: self.intervals.len(),
        })
    }

    /// Replace the interval at tick `t`, checking type and horizon.
    pub fn set_interval(&mut self, t: usize, interval: TimeInterval) -> Result<(), StreamError> {
        check_interval_type(&self.msg_type, &interval)?;
        let horizon = self.intervals.len();
        match self.intervals.get_mut(t) {
            Some(slot) => {
                *slot = interval;
                Ok(())
            }
            None => Err(StreamError::HorizonExceeded { tick: t, horizon }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimeInterval> {
        self.intervals.iter()
    }

    /// True iff every interval carries at most `n` messages.
    pub fn msg_bound(&self, n: usize) -> bool {
        self.intervals.iter().all(|i| i.len() <= n)
    }

    /// Ticks at which the stream is nonempty.
    pub fn nonempty_ticks(&self) -> Vec<usize> {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(_, i)| !i.is_empty())
            .map(|(t, _)| t)
            .collect()
    }
}

fn check_interval_type(ty: &MessageType, interval: &TimeInterval) -> Result<(), StreamError> {
    for m in interval.messages() {
        if &m.message_type() != ty {
            return Err(StreamError::TypeMismatch {
                expected: ty.clone(),
                found: m.clone(),
            });
        }
    }
    Ok(())
}

/// `msg(n, s)`: the stream has at most `n` messages in each time interval.
pub fn msg_bound(n: usize, s: &TimedStream) -> bool {
    s.msg_bound(n)
}

/// Streams are disjoint iff on every tick at most one of them carries
/// messages. The empty set is vacuously disjoint.
pub fn disjoint(streams: &[&TimedStream]) -> Result<bool, StreamError> {
    let Some(first) = streams.first() else {
        return Ok(true);
    };
    let horizon = first.horizon();
    for s in streams {
        if s.horizon() != horizon {
            return Err(StreamError::HorizonMismatch {
                left: horizon,
                right: s.horizon(),
            });
        }
    }
    for t in 0..horizon {
        let nonempty = streams
            .iter()
            .filter(|s| !s.intervals[t].is_empty())
            .count();
        if nonempty > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event_stream(horizon: usize, ticks: &[usize]) -> TimedStream {
        let mut s = TimedStream::new(MessageType::Event, horizon);
        for &t in ticks {
            s.set_interval(t, TimeInterval::singleton(Message::Event)).unwrap();
        }
        s
    }

    #[test]
    fn empty_interval_has_no_messages() {
        let i = TimeInterval::empty();
        assert_eq!(i.len(), 0);
        assert_eq!(i.ft(), Err(StreamError::NoFirstElement));
    }

    #[test]
    fn singleton_holds_one_message() {
        let i = TimeInterval::singleton(Message::Event);
        assert_eq!(i.len(), 1);
        assert_eq!(i.ft(), Ok(&Message::Event));
        assert_eq!(TimeInterval::singleton(Message::Int(7)).ft(), Ok(&Message::Int(7)));
    }

    #[test]
    fn ft_returns_head() {
        let i = TimeInterval::from_messages(vec![Message::Int(5), Message::Int(9)]);
        assert_eq!(i.ft(), Ok(&Message::Int(5)));
    }

    #[test]
    fn interval_at_reads_back_and_bounds_check() {
        let s = event_stream(5, &[4]);
        assert_eq!(s.interval_at(4).unwrap(), &TimeInterval::singleton(Message::Event));
        assert!(s.interval_at(3).unwrap().is_empty());
        assert_eq!(
            s.interval_at(5),
            Err(StreamError::HorizonExceeded { tick: 5, horizon: 5 })
        );
    }

    #[test]
    fn stream_rejects_mistyped_messages() {
        let mut s = TimedStream::new(MessageType::Int, 3);
        let err = s.set_interval(0, TimeInterval::singleton(Message::Event));
        assert_eq!(
            err,
            Err(StreamError::TypeMismatch {
                expected: MessageType::Int,
                found: Message::Event,
            })
        );
    }

    #[test]
    fn msg_bound_counts_per_interval() {
        let mut s = TimedStream::new(MessageType::Int, 4);
        s.set_interval(1, TimeInterval::singleton(Message::Int(1))).unwrap();
        assert!(msg_bound(1, &s));
        s.set_interval(2, TimeInterval::from_messages(vec![Message::Int(1), Message::Int(2)]))
            .unwrap();
        assert!(!msg_bound(1, &s));
        assert!(msg_bound(2, &s));
    }

    #[test]
    fn msg_bound_zero_on_all_empty() {
        let s = TimedStream::new(MessageType::Int, 6);
        assert!(msg_bound(0, &s));
    }

    #[test]
    fn disjoint_simple_cases() {
        let s1 = event_stream(10, &[0, 2, 4, 6, 8]);
        let s2 = event_stream(10, &[1, 3, 5, 7, 9]);
        assert_eq!(disjoint(&[&s1, &s2]), Ok(true));

        let s3 = event_stream(10, &[5]);
        let s4 = event_stream(10, &[5]);
        assert_eq!(disjoint(&[&s3, &s4]), Ok(false));
    }

    #[test]
    fn disjoint_singletons_at_distinct_ticks() {
        // Enumerating ticks 0..=3: at most one stream nonempty per tick.
        let s1 = event_stream(4, &[2]);
        let s2 = event_stream(4, &[3]);
        assert_eq!(disjoint(&[&s1, &s2]), Ok(true));
    }

    #[test]
    fn disjoint_requires_matching_horizons() {
        let s1 = event_stream(4, &[]);
        let s2 = event_stream(5, &[]);
        assert_eq!(
            disjoint(&[&s1, &s2]),
            Err(StreamError::HorizonMismatch { left: 4, right: 5 })
        );
    }

    #[test]
    fn disjoint_single_stream_always_true() {
        let s = event_stream(8, &[0, 1, 2, 3]);
        assert_eq!(disjoint(&[&s]), Ok(true));
    }
}
