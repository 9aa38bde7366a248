//! Synchronous P-system semantics: weak-priority rule application per cell,
//! broadcast to children, next-step delivery.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimulationError;
use crate::multiset::Multiset;
use crate::rule::{GroundRule, Multiplicity, Program, Rule, StateId};
use crate::symbol::CellId;
use crate::topology::Digraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellState {
    pub id: CellId,
    pub state: StateId,
    pub contents: Multiset,
}

/// The global state between two steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfiguration {
    pub cells: BTreeMap<CellId, CellState>,
    /// Messages sent during the previous step, merged into contents at the
    /// start of the next one.
    pub in_flight: BTreeMap<CellId, Multiset>,
    pub step_index: u64,
}

impl SystemConfiguration {
    pub fn new(cells: impl IntoIterator<Item = CellState>) -> Self {
        let cells: BTreeMap<CellId, CellState> = cells.into_iter().map(|c| (c.id, c)).collect();
        let in_flight = cells.keys().map(|&id| (id, Multiset::new())).collect();
        SystemConfiguration {
            cells,
            in_flight,
            step_index: 0,
        }
    }

    pub fn cell(&self, id: CellId) -> Option<&CellState> {
        self.cells.get(&id)
    }

    pub fn states(&self) -> BTreeMap<CellId, StateId> {
        self.cells
            .iter()
            .map(|(&id, c)| (id, c.state.clone()))
            .collect()
    }

    pub fn nothing_in_flight(&self) -> bool {
        self.in_flight.values().all(Multiset::is_empty)
    }
}

/// How a once-instantiated generic rule picks among its valid instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Selection {
    /// The lowest instance in structural order.
    #[default]
    Lowest,
    /// Uniformly at random, from a stream derived from the seed, the step
    /// index and the cell id, so results do not depend on evaluation order.
    Seeded(u64),
}

/// Per-cell, per-step source of instance choices.
#[derive(Debug, Clone)]
pub struct Chooser {
    rng: Option<ChaCha8Rng>,
}

impl Chooser {
    pub fn lowest() -> Self {
        Chooser { rng: None }
    }

    pub fn for_cell(selection: Selection, step: u64, cell: CellId) -> Self {
        match selection {
            Selection::Lowest => Chooser::lowest(),
            Selection::Seeded(seed) => {
                let mixed = splitmix(
                    seed ^ splitmix(step.wrapping_mul(0x9E37_79B9) ^ splitmix(cell.0 as u64)),
                );
                Chooser {
                    rng: Some(ChaCha8Rng::seed_from_u64(mixed)),
                }
            }
        }
    }

    fn pick(&mut self, n: usize) -> usize {
        match &mut self.rng {
            None => 0,
            Some(rng) => rng.gen_range(0..n),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ground rules a generic rule contributes against `contents`: one chosen
/// instance under once-instantiation, every distinct instance otherwise.
pub fn instantiate(rule: &Rule, contents: &Multiset, chooser: &mut Chooser) -> Vec<GroundRule> {
    let mut all = rule.instances(contents);
    match rule.mode.instantiation {
        Multiplicity::Max => all,
        Multiplicity::Once if all.is_empty() => all,
        Multiplicity::Once => {
            let i = chooser.pick(all.len());
            vec![all.swap_remove(i)]
        }
    }
}

/// One ground rule firing inside a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub priority: usize,
    pub label: String,
    pub target: StateId,
    pub ground: GroundRule,
    pub times: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellOutcome {
    pub cell: CellState,
    pub broadcast: Multiset,
    pub applied: Vec<Applied>,
}

/// Evolves one cell for one step.
///
/// Rules of the cell's state are tried in priority order against the contents
/// not yet consumed this step. The first rule that fires fixes the target
/// state; later rules fire only if they name the same target. Anything
/// produced or broadcast is held back until the step ends.
pub fn apply_cell(cell: &CellState, program: &Program, chooser: &mut Chooser) -> CellOutcome {
    let mut remaining = cell.contents.clone();
    let mut produced = Multiset::new();
    let mut broadcast = Multiset::new();
    let mut target: Option<StateId> = None;
    let mut applied = Vec::new();

    for (priority, rule) in program.rules_for(&cell.state) {
        if target.as_ref().is_some_and(|t| *t != rule.target) {
            continue;
        }
        for ground in instantiate(rule, &remaining, chooser) {
            let times = match rule.mode.application {
                Multiplicity::Once => u32::from(ground.applicable(&remaining)),
                Multiplicity::Max => ground.max_applications(&remaining),
            };
            if times == 0 {
                continue;
            }
            for (sym, n) in ground.consumed.iter() {
                remaining.remove_n(sym, n * times);
            }
            produced.add_scaled(&ground.produced, times);
            broadcast.add_scaled(&ground.broadcast, times);
            target.get_or_insert_with(|| rule.target.clone());
            applied.push(Applied {
                priority,
                label: rule.label.clone(),
                target: rule.target.clone(),
                ground,
                times,
            });
        }
    }

    remaining.union_with(&produced);
    CellOutcome {
        cell: CellState {
            id: cell.id,
            state: target.unwrap_or_else(|| cell.state.clone()),
            contents: remaining,
        },
        broadcast,
        applied,
    }
}

/// Whether some rule of the cell's current state has a valid instance.
pub fn has_applicable_rule(cell: &CellState, program: &Program) -> bool {
    program
        .rules_for(&cell.state)
        .any(|(_, rule)| !rule.instances(&cell.contents).is_empty())
}

/// What a step did, for inspection and tests.
#[derive(Debug, Clone)]
pub struct StepLog {
    pub config: SystemConfiguration,
    pub applied: BTreeMap<CellId, Vec<Applied>>,
    pub broadcasts: BTreeMap<CellId, Multiset>,
}

/// Snapshot density of a recorded run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Granularity {
    /// A full configuration for every step.
    #[default]
    Full,
    /// Full configurations every `k` steps plus the last one; cell states
    /// are still kept for every step. `Sampled(0)` keeps only the last.
    Sampled(u64),
}

impl Granularity {
    pub fn keeps(&self, step: u64) -> bool {
        match self {
            Granularity::Full => true,
            Granularity::Sampled(k) => *k > 0 && step.is_multiple_of(*k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    /// No cell could evolve and nothing was in flight.
    Halted,
    /// The step budget ran out first.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step_index: u64,
    pub states: BTreeMap<CellId, StateId>,
    pub snapshot: Option<SystemConfiguration>,
}

/// A recorded run. `records[0]` is the initial configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<StepRecord>,
    pub halt: HaltReason,
    pub final_config: SystemConfiguration,
}

impl Trace {
    pub fn steps_taken(&self) -> u64 {
        self.final_config.step_index
    }
}

/// A program bound to a digraph.
#[derive(Debug, Clone)]
pub struct Engine<'a> {
    pub program: &'a Program,
    pub digraph: &'a Digraph,
    pub selection: Selection,
}

impl<'a> Engine<'a> {
    pub fn new(program: &'a Program, digraph: &'a Digraph) -> Self {
        Engine {
            program,
            digraph,
            selection: Selection::Lowest,
        }
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    fn check_cells(&self, config: &SystemConfiguration) -> Result<(), SimulationError> {
        let same = config.cells.len() == self.digraph.len()
            && self.digraph.nodes().all(|n| config.cells.contains_key(&n));
        if same {
            Ok(())
        } else {
            Err(SimulationError::CellMismatch)
        }
    }

    pub fn step(&self, config: &SystemConfiguration) -> SystemConfiguration {
        self.step_logged(config).config
    }

    /// One synchronous step: deliver, rewrite every cell independently, route
    /// broadcasts to children.
    pub fn step_logged(&self, config: &SystemConfiguration) -> StepLog {
        let step = config.step_index + 1;
        let outcomes: Vec<CellOutcome> = config
            .cells
            .par_iter()
            .map(|(&id, cell)| {
                let mut merged = cell.clone();
                if let Some(inbox) = config.in_flight.get(&id) {
                    merged.contents.union_with(inbox);
                }
                let mut chooser = Chooser::for_cell(self.selection, step, id);
                apply_cell(&merged, self.program, &mut chooser)
            })
            .collect();

        let mut in_flight: BTreeMap<CellId, Multiset> = config
            .cells
            .keys()
            .map(|&id| (id, Multiset::new()))
            .collect();
        let mut cells = BTreeMap::new();
        let mut applied = BTreeMap::new();
        let mut broadcasts = BTreeMap::new();
        for out in outcomes {
            let id = out.cell.id;
            if !out.broadcast.is_empty() {
                for child in self.digraph.children(id) {
                    if let Some(inbox) = in_flight.get_mut(child) {
                        inbox.union_with(&out.broadcast);
                    }
                }
            }
            cells.insert(id, out.cell);
            applied.insert(id, out.applied);
            broadcasts.insert(id, out.broadcast);
        }
        StepLog {
            config: SystemConfiguration {
                cells,
                in_flight,
                step_index: step,
            },
            applied,
            broadcasts,
        }
    }

    /// True iff nothing is in flight and no cell has an applicable rule.
    pub fn is_halted(&self, config: &SystemConfiguration) -> bool {
        config.nothing_in_flight()
            && config
                .cells
                .values()
                .all(|c| !has_applicable_rule(c, self.program))
    }

    /// Steps until halted or until `max_steps` steps were taken.
    pub fn run(
        &self,
        initial: SystemConfiguration,
        max_steps: u64,
        granularity: Granularity,
    ) -> Result<Trace, SimulationError> {
        if max_steps == 0 {
            return Err(SimulationError::ZeroBudget);
        }
        self.check_cells(&initial)?;
        let start = initial.step_index;
        let mut records = vec![StepRecord {
            step_index: start,
            states: initial.states(),
            snapshot: Some(initial.clone()),
        }];
        let mut config = initial;
        let halt = loop {
            if self.is_halted(&config) {
                break HaltReason::Halted;
            }
            if config.step_index - start >= max_steps {
                break HaltReason::BudgetExhausted;
            }
            config = self.step(&config);
            records.push(StepRecord {
                step_index: config.step_index,
                states: config.states(),
                snapshot: granularity.keeps(config.step_index).then(|| config.clone()),
            });
        };
        if let Some(last) = records.last_mut() {
            last.snapshot.get_or_insert_with(|| config.clone());
        }
        Ok(Trace {
            records,
            halt,
            final_config: config,
        })
    }
}
