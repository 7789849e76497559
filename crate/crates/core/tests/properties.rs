//! Property tests for the stream algebra, connector contracts, and network
//! frame behavior.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{fixed_duration_spec, gen_spec, rng};
use pspec::component::{at_connector, ChooserPolicy, Side};
use pspec::compose::{compile, ProcessExpr};
use pspec::sim::{run, EnvInputs};
use pspec::stream::{disjoint, msg_bound, Message, MessageType, TimeInterval, TimedStream};
use rand::prelude::*;

fn event_stream(horizon: usize, ticks: &[usize]) -> TimedStream {
    let mut s = TimedStream::new(MessageType::Event, horizon);
    for &t in ticks {
        if t < horizon {
            s.set_interval(t, TimeInterval::singleton(Message::Event)).unwrap();
        }
    }
    s
}

fn int_stream(horizon: usize, fills: &[(usize, u8)]) -> TimedStream {
    let mut s = TimedStream::new(MessageType::Int, horizon);
    for &(t, n) in fills {
        if t < horizon {
            let msgs = (0..n).map(|k| Message::Int(k as i64)).collect();
            s.set_interval(t, TimeInterval::from_messages(msgs)).unwrap();
        }
    }
    s
}

proptest! {
    /// `ft` of a nonempty interval is its first message.
    #[test]
    fn ft_is_the_head(values in proptest::collection::vec(-100i64..100, 1..6)) {
        let interval = TimeInterval::from_messages(
            values.iter().map(|&v| Message::Int(v)).collect(),
        );
        prop_assert_eq!(interval.ft().unwrap(), &Message::Int(values[0]));
    }

    /// `msg_bound` is monotone in the bound.
    #[test]
    fn msg_bound_is_monotone(
        fills in proptest::collection::vec((0usize..20, 0u8..4), 0..12),
        n in 0usize..4,
    ) {
        let s = int_stream(20, &fills);
        prop_assert!(!msg_bound(n, &s) || msg_bound(n + 1, &s));
    }

    /// Disjointness is symmetric and shrinks monotonically: removing a
    /// stream never destroys it.
    #[test]
    fn disjoint_is_symmetric_and_antitone(
        a in proptest::collection::vec(0usize..15, 0..8),
        b in proptest::collection::vec(0usize..15, 0..8),
        c in proptest::collection::vec(0usize..15, 0..8),
    ) {
        let (sa, sb, sc) = (event_stream(15, &a), event_stream(15, &b), event_stream(15, &c));
        let abc = disjoint(&[&sa, &sb, &sc]).unwrap();
        let cba = disjoint(&[&sc, &sb, &sa]).unwrap();
        prop_assert_eq!(abc, cba);
        if abc {
            prop_assert!(disjoint(&[&sa, &sb]).unwrap());
            prop_assert!(disjoint(&[&sa, &sc]).unwrap());
            prop_assert!(disjoint(&[&sb, &sc]).unwrap());
        }
    }

    /// A single stream is disjoint with itself as a set of one.
    #[test]
    fn single_stream_is_disjoint(ticks in proptest::collection::vec(0usize..15, 0..10)) {
        let s = event_stream(15, &ticks);
        prop_assert_eq!(disjoint(&[&s]), Ok(true));
    }

    /// Three random streams over 20 ticks: `disjoint` agrees with the
    /// literal for-all-ticks, for-all-pairs scan.
    #[test]
    fn disjoint_matches_the_brute_force_scan(
        a in proptest::collection::vec(0usize..20, 0..10),
        b in proptest::collection::vec(0usize..20, 0..10),
        c in proptest::collection::vec(0usize..20, 0..10),
    ) {
        let streams = [event_stream(20, &a), event_stream(20, &b), event_stream(20, &c)];
        let refs: Vec<&TimedStream> = streams.iter().collect();
        let mut oracle = true;
        for t in 0..20 {
            for i in 0..streams.len() {
                for j in 0..streams.len() {
                    if i != j
                        && !streams[i].interval_at(t).unwrap().is_empty()
                        && !streams[j].interval_at(t).unwrap().is_empty()
                    {
                        oracle = false;
                    }
                }
            }
        }
        prop_assert_eq!(disjoint(&refs), Ok(oracle));
    }

    /// `@` exclusivity: for every policy and event pattern, at most one of
    /// the two outputs carries an event per tick, and the outputs are
    /// disjoint streams.
    #[test]
    fn at_connector_outputs_are_disjoint(
        ticks in proptest::collection::vec(0usize..20, 0..12),
        policy_pick in 0u8..4,
        seed in any::<u64>(),
    ) {
        let policy = match policy_pick {
            0 => ChooserPolicy::RoundRobin,
            1 => ChooserPolicy::Fixed(Side::Left),
            2 => ChooserPolicy::Fixed(Side::Right),
            _ => ChooserPolicy::SeededRandom(seed),
        };
        let horizon = 20;
        let mut at = at_connector(policy);
        let ent = event_stream(horizon, &ticks);
        let mut left = TimedStream::new(MessageType::Event, horizon);
        let mut right = TimedStream::new(MessageType::Event, horizon);
        for t in 0..horizon {
            let inputs = BTreeMap::from([
                ("ent".to_string(), ent.interval_at(t).unwrap().clone()),
            ]);
            let res = at.step(t, &inputs);
            prop_assert!(!(!res.outputs["left"].is_empty() && !res.outputs["right"].is_empty()));
            left.set_interval(t, res.outputs["left"].clone()).unwrap();
            right.set_interval(t, res.outputs["right"].clone()).unwrap();
        }
        prop_assert!(disjoint(&[&left, &right]).unwrap());
        // Every incoming event is forwarded exactly once.
        let forwarded = left.nonempty_ticks().len() + right.nonempty_ticks().len();
        prop_assert_eq!(forwarded, ent.nonempty_ticks().len());
    }
}

/// Frame property: without entry events (and without a self-starting delay),
/// data on the inputs alone never produces output or control traffic.
#[test]
fn frame_property_data_without_start_stays_silent() {
    let mut r = rng(0xF7A);
    for case in 0..60 {
        let p = gen_spec(&mut r, "Left");
        let q = gen_spec(&mut r, "Right");
        let expr = if case % 2 == 0 {
            ProcessExpr::seq(ProcessExpr::elem(p.clone()), ProcessExpr::elem(q.clone()))
        } else {
            ProcessExpr::par(ProcessExpr::elem(p.clone()), ProcessExpr::elem(q.clone()))
        };
        let mut network = compile(&expr).unwrap();
        let horizon = 20;
        let mut env = EnvInputs::for_network(&network, horizon);
        // Random data, but never an entry event.
        let data_channels: Vec<String> = network
            .external_input_names()
            .iter()
            .filter(|n| **n != "entry")
            .map(|n| n.to_string())
            .collect();
        for chan in &data_channels {
            for t in 0..horizon {
                if r.random_bool(0.3) {
                    let ty = network.channels()[network.channel_index(chan).unwrap()]
                        .msg_type
                        .clone();
                    let msg = match ty {
                        MessageType::Int => Message::Int(r.random_range(0..9)),
                        MessageType::Bool => Message::Bool(r.random()),
                        MessageType::Event => Message::Event,
                        MessageType::Enum(e) => Message::Sym { ty: e, symbol: "red".into() },
                    };
                    env.set_interval(chan, t, TimeInterval::singleton(msg)).unwrap();
                }
            }
        }
        let trace = run(&mut network, &env, horizon).unwrap();
        for (name, stream) in &trace.channels {
            if data_channels.contains(name) {
                continue; // env echo
            }
            assert!(
                stream.nonempty_ticks().is_empty(),
                "case {case}: channel {name} must stay empty without a start"
            );
        }
    }
}

/// Parallel re-activation: a completed pair is required before the join
/// fires, so the join never outruns the slower branch.
#[test]
fn par_join_fires_at_most_once_per_completed_pair() {
    for (dp, dq) in [(1u64, 3u64), (2, 2), (1, 5), (4, 2)] {
        let expr = ProcessExpr::par(
            ProcessExpr::elem(fixed_duration_spec("P", dp)),
            ProcessExpr::elem(fixed_duration_spec("Q", dq)),
        );
        let mut network = compile(&expr).unwrap();
        let horizon = 60;
        let mut env = EnvInputs::for_network(&network, horizon);
        // Flood with starts faster than the slower branch completes.
        for t in (0..horizon).step_by(2) {
            env.set_event("entry", t).unwrap();
        }
        let trace = run(&mut network, &env, horizon).unwrap();
        let p_stops = trace.channels["P.stop"].nonempty_ticks().len();
        let q_stops = trace.channels["Q.stop"].nonempty_ticks().len();
        let joins = trace.channels["amp_1.z"].nonempty_ticks().len();
        assert!(
            joins <= p_stops.min(q_stops),
            "dp={dp} dq={dq}: {joins} joins but only {p_stops}/{q_stops} completions"
        );
        assert!(joins >= 1, "the pair completes at least once");
    }
}

/// A 100-tick stream filled with at most two messages per tick satisfies the
/// corresponding bound.
#[test]
fn generated_streams_respect_their_generator_bound() {
    let mut r = rng(0x99);
    for _ in 0..50 {
        let mut s = TimedStream::new(MessageType::Int, 100);
        for t in 0..100 {
            let n = r.random_range(0..=2);
            let msgs = (0..n).map(Message::Int).collect();
            s.set_interval(t, TimeInterval::from_messages(msgs)).unwrap();
        }
        assert!(msg_bound(2, &s));
        assert!(msg_bound(3, &s));
    }
}

/// Envs whose control intervals are generated as singletons never violate
/// the default message-bound assumptions.
#[test]
fn singleton_control_envs_pass_assumption_checks() {
    let mut r = rng(0xA55);
    for case in 0..60 {
        let p = gen_spec(&mut r, "Left");
        let q = gen_spec(&mut r, "Right");
        let expr = ProcessExpr::par(ProcessExpr::elem(p), ProcessExpr::elem(q));
        let mut network = compile(&expr).unwrap();
        let horizon = 25;
        let mut env = EnvInputs::for_network(&network, horizon);
        for t in 0..horizon {
            if r.random_bool(0.2) {
                env.set_event("entry", t).unwrap();
            }
        }
        let trace = run(&mut network, &env, horizon).unwrap();
        assert_eq!(
            pspec::sim::check_assumptions(&network, &trace),
            vec![],
            "case {case}"
        );
    }
}

/// Minimal latency: a start at tick t never produces the exit before t+1.
#[test]
fn stop_never_fires_on_the_start_tick() {
    let mut r = rng(0x11A);
    for case in 0..100 {
        let spec = gen_spec(&mut r, "Solo");
        let expr = ProcessExpr::elem(spec);
        let mut network = compile(&expr).unwrap();
        let horizon = 20;
        let mut env = EnvInputs::for_network(&network, horizon);
        let start_tick = r.random_range(0..horizon / 2);
        env.set_event("entry", start_tick).unwrap();
        let trace = run(&mut network, &env, horizon).unwrap();
        let stops = trace.channels["Solo.stop"].nonempty_ticks();
        if let Some(first) = stops.first() {
            assert!(
                *first > start_tick,
                "case {case}: stop at {first} not after start {start_tick}"
            );
        }
    }
}
