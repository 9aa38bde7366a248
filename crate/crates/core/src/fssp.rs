//! The firing squad synchronization program for simplex channels.
//!
//! Three phases run on top of the generic engine:
//!
//! 1. a first broadcast of `x(k, j)` from the general, which gives every cell
//!    its depth `n(k)` and its parents `p(j)` in the BFS dag;
//! 2. a virtual convergecast: each cell reports its max-depth to each dag
//!    parent with an addressed message `a(parent, sender, k)` flooded over the
//!    digraph, and answers non-dag parents with a payload-0 message so they
//!    can count one report per outgoing arc (`c` outstanding, `e` received);
//! 3. a countdown broadcast `f(k)` started by the general with its
//!    eccentricity; every cell fires when it holds `f(0)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{
    CellState, Engine, Granularity, HaltReason, Selection, SystemConfiguration, Trace,
};
use crate::error::{SimulationError, TopologyError};
use crate::multiset::Multiset;
use crate::pattern::dsl::{above, atom, int, pat, plus, var};
use crate::pattern::Pattern;
use crate::rule::{Program, Rule, RuleMode, StateId};
use crate::symbol::{Arg, CellId, Symbol};
use crate::topology::Digraph;

/// State names of the cell prototype.
pub mod states {
    pub const S0: &str = "S0";
    pub const S1: &str = "S1";
    pub const S2: &str = "S2";
    pub const S3: &str = "S3";
    pub const S4: &str = "S4";
    pub const MAX: &str = "Max";
    pub const S5: &str = "S5";
    pub const FIRED: &str = "Sf";

    pub const ALL: [&str; 8] = [S0, S1, S2, S3, S4, MAX, S5, FIRED];
}

/// Functor names and arities of every symbol the program uses.
pub mod alphabet {
    /// Cell id, `iota(#i)`.
    pub const IOTA: (&str, usize) = ("iota", 1);
    /// Start order held by the general.
    pub const START: (&str, usize) = ("a", 0);
    pub const GENERAL: (&str, usize) = ("g", 0);
    /// First-broadcast message `x(depth, sender)`.
    pub const X: (&str, usize) = ("x", 2);
    pub const DEPTH: (&str, usize) = ("n", 1);
    pub const MAX_DEPTH: (&str, usize) = ("m", 1);
    pub const DEPTH_AUX: (&str, usize) = ("l", 1);
    pub const PARENT: (&str, usize) = ("p", 1);
    /// Request to send payload `k` to cell `j`: `y(#j, k)`.
    pub const SEND: (&str, usize) = ("y", 2);
    /// Convergecast message `a(destination, sender, payload)`.
    pub const REPORT: (&str, usize) = ("a", 3);
    /// Passage record `v(destination, sender)`.
    pub const PASSED: (&str, usize) = ("v", 2);
    pub const MAX_AUX: (&str, usize) = ("s", 1);
    pub const OUTSTANDING: (&str, usize) = ("c", 0);
    pub const RECEIVED: (&str, usize) = ("e", 0);
    pub const DONE: (&str, usize) = ("b", 0);
    pub const COUNTDOWN_AUX: (&str, usize) = ("t", 0);
    pub const COUNTDOWN: (&str, usize) = ("f", 1);
    /// Produced on entering `Max`, never consumed.
    pub const RESIDUE: (&str, usize) = ("w", 0);

    pub const ALL: [(&str, usize); 18] = [
        IOTA,
        START,
        GENERAL,
        X,
        DEPTH,
        MAX_DEPTH,
        DEPTH_AUX,
        PARENT,
        SEND,
        REPORT,
        PASSED,
        MAX_AUX,
        OUTSTANDING,
        RECEIVED,
        DONE,
        COUNTDOWN_AUX,
        COUNTDOWN,
        RESIDUE,
    ];

    pub fn contains(functor: &str, arity: usize) -> bool {
        ALL.contains(&(functor, arity))
    }
}

pub fn iota(cell: CellId) -> Symbol {
    Symbol::new("iota", vec![Arg::Cell(cell)])
}

fn iota_i() -> Pattern {
    pat("iota", [var("i")])
}

/// The cell prototype's rule set, in priority order.
pub fn build_fssp_program() -> Program {
    use states::*;
    let r = Rule::new;

    let mut rules = vec![
        // S0: start, or record depth and parents and pass the broadcast on.
        r("0.1", S0, S1)
            .consume([atom("a")])
            .produce([atom("g"), pat("n", [int(0)]), pat("m", [int(0)])])
            .send([pat("x", [int(1), var("i")])])
            .promote([iota_i()])
            .mode(RuleMode::MIN_MIN),
        r("0.2", S0, S1)
            .consume([pat("x", [var("k"), var("j")])])
            .produce([pat("l", [var("k")]), pat("p", [var("j")])])
            .send([pat("x", [plus("k", 1), var("i")])])
            .promote([iota_i()])
            .mode(RuleMode::MAX_MIN),
        r("0.3", S0, S1)
            .consume([pat("x", [var("k"), var("j")])])
            .produce([pat("p", [var("j")])])
            .promote([iota_i()])
            .mode(RuleMode::MAX_MAX),
        // S1: settle depth, answer late parents, relay reports.
        r("1.1", S1, S1)
            .consume([pat("l", [var("k")])])
            .produce([pat("n", [var("k")]), pat("m", [var("k")])])
            .mode(RuleMode::MAX_MIN),
        r("1.2", S1, S1)
            .consume([pat("l", [var("k")])])
            .mode(RuleMode::MAX_MAX),
        r("1.3", S1, S1)
            .consume([pat("x", [var("k"), var("j")])])
            .produce([pat("y", [var("j"), int(0)])])
            .mode(RuleMode::MAX_MIN),
        r("1.4", S1, S1)
            .consume([pat("x", [var("k"), var("j")])])
            .mode(RuleMode::MAX_MAX),
        r("1.5", S1, MAX)
            .consume([pat("s", [var("k")])])
            .produce([atom("w"), pat("m", [var("k")])])
            .mode(RuleMode::MIN_MIN),
    ];
    rules.extend(report_rules(S1));

    rules.extend([
        // S2: hand the countdown over, otherwise the same relay duties.
        r("2.1", S2, S5)
            .consume([atom("t")])
            .send([atom("t")])
            .mode(RuleMode::MIN_MIN),
        r("2.1a", S2, S2)
            .consume([pat("x", [var("k"), var("j")])])
            .produce([pat("y", [var("j"), int(0)])])
            .mode(RuleMode::MAX_MIN),
        r("2.1b", S2, S2)
            .consume([pat("x", [var("k"), var("j")])])
            .mode(RuleMode::MAX_MAX),
        r("2.2", S2, MAX)
            .consume([pat("s", [var("k")])])
            .produce([atom("w"), pat("m", [var("k")])])
            .mode(RuleMode::MIN_MIN),
    ]);
    rules.extend(report_rules(S2));

    rules.extend([
        // S3: one outstanding child fewer.
        r("3.1", S3, S1)
            .consume([atom("c"), atom("c")])
            .produce([atom("c"), atom("e")])
            .mode(RuleMode::MIN_MIN),
        r("3.2", S3, S4)
            .consume([atom("c")])
            .produce([atom("e"), atom("b")])
            .mode(RuleMode::MIN_MIN),
        // S4: the general launches the countdown, other cells report upward.
        r("4.1", S4, S2)
            .produce([atom("t"), pat("f", [var("k")])])
            .send([atom("t")])
            .promote([atom("g"), atom("b"), pat("m", [var("k")])])
            .mode(RuleMode::MAX_MIN),
        r("4.2", S4, S2)
            .produce([pat("y", [var("j"), var("k")])])
            .promote([pat("p", [var("j")]), pat("m", [var("k")])])
            .mode(RuleMode::MAX_MIN),
        // Max: drop every dominated max-depth, then leave.
        r("Max.1", MAX, S3)
            .consume([pat("m", [var("k")])])
            .promote([pat("m", [above("k", "l")])])
            .mode(RuleMode::MAX_MAX),
        r("Max.2", MAX, S3).mode(RuleMode::MIN_MIN),
    ]);

    // S5: fire on f(0) erasing bookkeeping, otherwise erase and count down.
    let garbage = || {
        [
            (pat("v", [var("k"), var("l")]), RuleMode::MAX_MAX),
            (pat("p", [var("k")]), RuleMode::MAX_MAX),
            (pat("n", [var("k")]), RuleMode::MAX_MAX),
            (pat("m", [var("k")]), RuleMode::MAX_MAX),
            (atom("e"), RuleMode::MIN_MAX),
            (atom("b"), RuleMode::MIN_MAX),
        ]
    };
    for (idx, (p, mode)) in garbage().into_iter().enumerate() {
        rules.push(
            Rule::new(format!("5.{}", idx + 1), S5, FIRED)
                .consume([p])
                .promote([pat("f", [int(0)])])
                .mode(mode),
        );
    }
    rules.push(
        r("5.7", S5, FIRED)
            .promote([pat("f", [int(0)])])
            .mode(RuleMode::MIN_MIN),
    );
    for (idx, (p, mode)) in garbage().into_iter().enumerate() {
        rules.push(
            Rule::new(format!("5.{}", idx + 8), S5, S5)
                .consume([p])
                .promote([pat("f", [var("k")])])
                .mode(mode),
        );
    }
    rules.extend([
        r("5.14", S5, S5)
            .consume([pat("f", [var("k")])])
            .produce([pat("f", [plus("k", -1)])])
            .send([pat("f", [plus("k", -1)])])
            .mode(RuleMode::MAX_MIN),
        r("5.15", S5, S5)
            .consume([pat("f", [var("k")])])
            .mode(RuleMode::MAX_MAX),
        r("5.16", S5, S5)
            .consume([atom("t")])
            .mode(RuleMode::MAX_MAX),
    ]);

    Program::new(rules).expect("the FSSP program binds every variable")
}

/// Convergecast relay rules shared by `S1` (labels 1.6–1.9) and `S2`
/// (2.3–2.6).
fn report_rules(state: &'static str) -> Vec<Rule> {
    let base = if state == states::S1 { (1, 6) } else { (2, 3) };
    let label = |n: u32| format!("{}.{}", base.0, base.1 + n);
    vec![
        // Emit a requested report.
        Rule::new(label(0), state, state)
            .consume([pat("y", [var("j"), var("k")])])
            .produce([pat("v", [var("j"), var("i")])])
            .send([pat("a", [var("j"), var("i"), var("k")])])
            .promote([iota_i()])
            .mode(RuleMode::MAX_MIN),
        // Already seen: absorb.
        Rule::new(label(1), state, state)
            .consume([pat("a", [var("j"), var("k"), var("l")])])
            .promote([pat("v", [var("j"), var("k")])])
            .mode(RuleMode::MAX_MAX),
        // Addressed here: record and keep the payload.
        Rule::new(label(2), state, state)
            .consume([pat("a", [var("i"), var("j"), var("k")])])
            .produce([pat("v", [var("i"), var("j")]), pat("s", [var("k")])])
            .promote([iota_i()])
            .mode(RuleMode::MAX_MIN),
        // Anything else: record and forward.
        Rule::new(label(3), state, state)
            .consume([pat("a", [var("j"), var("k"), var("l")])])
            .produce([pat("v", [var("j"), var("k")])])
            .send([pat("a", [var("j"), var("k"), var("l")])])
            .mode(RuleMode::MAX_MIN),
    ]
}

/// Every cell in `S0` holding its id and one `c` per outgoing arc; the general
/// also holds the start order `a`.
pub fn initial_configuration(
    digraph: &Digraph,
    general: CellId,
) -> Result<SystemConfiguration, TopologyError> {
    if !digraph.contains(general) {
        return Err(TopologyError::UnknownGeneral(general));
    }
    let cells = digraph.nodes().map(|id| {
        let mut contents = Multiset::new();
        contents.insert(iota(id));
        contents.insert_n(Symbol::atom("c"), digraph.outdegree(id) as u32);
        if id == general {
            contents.insert(Symbol::atom("a"));
        }
        CellState {
            id,
            state: StateId::new(states::S0),
            contents,
        }
    });
    Ok(SystemConfiguration::new(cells))
}

/// Why a run did not synchronize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncFailure {
    /// The trace ends before the system halted.
    Incomplete,
    /// Some cell never entered the firing state.
    NotAllFired,
    /// Cells entered the firing state at different steps.
    Divergent,
    /// Some cell left the firing state and entered it again.
    Reentered,
}

/// Verdict on simultaneous, first-time firing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SyncReport {
    pub fired: bool,
    pub firing_step: Option<u64>,
    pub simultaneous: bool,
    pub first_time: bool,
    pub per_cell_firing_step: BTreeMap<CellId, Option<u64>>,
    pub failure: Option<SyncFailure>,
}

/// Firing verdict from a per-step history of cell states.
pub fn sync_from_states<'a>(
    history: impl IntoIterator<Item = (u64, &'a BTreeMap<CellId, StateId>)>,
    halted: bool,
) -> SyncReport {
    let fired_state = StateId::new(states::FIRED);
    let mut first: BTreeMap<CellId, Option<u64>> = BTreeMap::new();
    let mut entries: BTreeMap<CellId, u32> = BTreeMap::new();
    let mut previous: BTreeMap<CellId, bool> = BTreeMap::new();
    let mut all_fired_at = None;
    for (step, states) in history {
        let mut all = !states.is_empty();
        for (&id, state) in states {
            let now = *state == fired_state;
            let before = previous.insert(id, now).unwrap_or(false);
            let slot = first.entry(id).or_insert(None);
            if now && !before {
                *entries.entry(id).or_insert(0) += 1;
                slot.get_or_insert(step);
            }
            all &= now;
        }
        if all && all_fired_at.is_none() {
            all_fired_at = Some(step);
        }
    }
    let steps: BTreeSet<Option<u64>> = first.values().copied().collect();
    let every_cell_fired = first.values().all(Option::is_some);
    let simultaneous = every_cell_fired && steps.len() == 1;
    let first_time = entries.values().all(|&n| n <= 1);
    let failure = if !halted {
        Some(SyncFailure::Incomplete)
    } else if !every_cell_fired {
        Some(SyncFailure::NotAllFired)
    } else if !simultaneous {
        Some(SyncFailure::Divergent)
    } else if !first_time {
        Some(SyncFailure::Reentered)
    } else {
        None
    };
    let fired = failure.is_none() && all_fired_at.is_some();
    SyncReport {
        fired,
        firing_step: if simultaneous { all_fired_at } else { None },
        simultaneous,
        first_time,
        per_cell_firing_step: first,
        failure,
    }
}

/// Judges a recorded run.
pub fn check_synchronization(trace: &Trace) -> SyncReport {
    sync_from_states(
        trace.records.iter().map(|r| (r.step_index, &r.states)),
        trace.halt == HaltReason::Halted,
    )
}

/// Step budget used when none is given: `10·N²`.
pub fn default_budget(cells: usize) -> u64 {
    10 * (cells as u64).pow(2)
}

/// Runs the program on `digraph` from its general and judges the outcome.
pub fn simulate(
    digraph: &Digraph,
    selection: Selection,
    max_steps: u64,
    granularity: Granularity,
) -> Result<(Trace, SyncReport), SimulationError> {
    let program = build_fssp_program();
    let initial = initial_configuration(digraph, digraph.general())?;
    let trace = Engine::new(&program, digraph)
        .with_selection(selection)
        .run(initial, max_steps, granularity)?;
    let report = check_synchronization(&trace);
    Ok((trace, report))
}
