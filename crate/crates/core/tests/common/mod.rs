#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fssp_core::engine::StepLog;
use fssp_core::pattern::dsl::{atom, cell, int, pat, plus, var};
use fssp_core::topology::random_strongly_connected;
use fssp_core::*;

/// Steps the FSSP program to a halt (or `budget`), keeping every step log
/// together with the configuration it started from.
pub fn logged_run(
    d: &Digraph,
    selection: Selection,
    budget: u64,
) -> Vec<(SystemConfiguration, StepLog)> {
    let program = build_fssp_program();
    let engine = Engine::new(&program, d).with_selection(selection);
    let mut config = initial_configuration(d, d.general()).unwrap();
    let mut out = Vec::new();
    while !engine.is_halted(&config) && config.step_index < budget {
        let log = engine.step_logged(&config);
        let next = log.config.clone();
        out.push((config, log));
        config = next;
    }
    out
}

/// Contents a cell works on during the step that starts from `config`.
pub fn merged(config: &SystemConfiguration, id: CellId) -> Multiset {
    let mut m = config.cells[&id].contents.clone();
    m.union_with(&config.in_flight[&id]);
    m
}

/// A fixed spread of small random strongly connected digraphs.
pub fn random_digraphs() -> Vec<Digraph> {
    let mut out = Vec::new();
    for seed in 0..6u64 {
        for (n, frac) in [(4, 0.2), (7, 0.1), (12, 0.05), (18, 0.03)] {
            out.push(random_strongly_connected(n, frac, seed).unwrap());
        }
    }
    out
}

/// BFS distance of every cell from the general, by plain relaxation over the
/// arc list.
pub fn bfs(d: &Digraph) -> BTreeMap<CellId, u32> {
    let mut dist: BTreeMap<CellId, u32> = BTreeMap::from([(d.general(), 0)]);
    loop {
        let mut changed = false;
        for (p, c) in d.arcs() {
            if let Some(&dp) = dist.get(&p) {
                if dist.get(&c).is_none_or(|&dc| dp + 1 < dc) {
                    dist.insert(c, dp + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Checks one step log against the engine contract: exact multiset
/// accounting, promoters kept by the rule that used them, a single target
/// with no applicable rule skipped, and broadcasts copied to every child.
pub fn check_step(
    program: &Program,
    d: &Digraph,
    before: &SystemConfiguration,
    log: &StepLog,
) -> Result<(), String> {
    for (&id, applied) in &log.applied {
        let start = merged(before, id);
        let state = &before.cells[&id].state;

        let mut expect = start.clone();
        let mut produced = Multiset::new();
        for a in applied {
            for (s, n) in a.ground.consumed.iter() {
                if expect.remove_n(s, n * a.times) != n * a.times {
                    return Err(format!(
                        "{id}: rule {} consumed {s} it did not have",
                        a.label
                    ));
                }
            }
            // a later rule of the same step may still consume it
            let not_consumed = a.ground.promoters.difference(&a.ground.consumed);
            if !expect.includes(&not_consumed) {
                return Err(format!("{id}: rule {} lost a promoter", a.label));
            }
            produced.add_scaled(&a.ground.produced, a.times);
        }
        expect.union_with(&produced);
        if log.config.cells[&id].contents != expect {
            return Err(format!(
                "{id}: contents are not before - consumed + produced"
            ));
        }

        let targets: BTreeSet<_> = applied.iter().map(|a| a.target.clone()).collect();
        if targets.len() > 1 {
            return Err(format!("{id}: several targets {targets:?}"));
        }
        let mut remaining = start;
        let mut target: Option<StateId> = None;
        for (priority, rule) in program.rules_for(state) {
            let fired: Vec<_> = applied.iter().filter(|a| a.priority == priority).collect();
            if fired.is_empty() {
                let compatible = target.as_ref().is_none_or(|t| *t == rule.target);
                if compatible && !rule.instances(&remaining).is_empty() {
                    return Err(format!("{id}: applicable rule {} was skipped", rule.label));
                }
                continue;
            }
            target.get_or_insert(rule.target.clone());
            for a in fired {
                for (s, n) in a.ground.consumed.iter() {
                    remaining.remove_n(s, n * a.times);
                }
            }
        }
        if target.unwrap_or_else(|| state.clone()) != log.config.cells[&id].state {
            return Err(format!("{id}: state does not follow the first fired rule"));
        }
    }

    for child in d.nodes() {
        let mut expect = Multiset::new();
        for (p, c) in d.arcs() {
            if c == child {
                expect.union_with(&log.broadcasts[&p]);
            }
        }
        if log.config.in_flight[&child] != expect {
            return Err(format!(
                "{child}: in-flight messages differ from its parents' broadcasts"
            ));
        }
    }
    Ok(())
}

pub fn small_symbol(functor: u8, k: u32, j: u32) -> Symbol {
    match functor {
        0 => Symbol::atom("a"),
        1 => Symbol::new("n", vec![Arg::Int(k)]),
        2 => Symbol::new("x", vec![Arg::Int(k % 3), Arg::Cell(CellId(j))]),
        _ => Symbol::new("y", vec![Arg::Cell(CellId(j)), Arg::Int(k % 3)]),
    }
}

/// Generic rules the oracle is checked on.
pub fn oracle_rules() -> Vec<Rule> {
    let r = |label: &str| Rule::new(label, "S", "S").mode(RuleMode::MAX_MAX);
    vec![
        r("single").consume([pat("n", [var("j")])]),
        r("answer")
            .consume([pat("x", [var("k"), var("j")])])
            .produce([pat("y", [var("j"), var("k")])])
            .promote([pat("n", [var("k")])]),
        r("offset").consume([pat("x", [var("k"), var("j")]), pat("n", [plus("k", 1)])]),
        r("shared")
            .consume([atom("a"), pat("n", [var("j")])])
            .promote([pat("n", [var("j")])]),
        r("pair").consume([
            pat("x", [var("k"), var("j")]),
            pat("x", [var("k"), var("l")]),
        ]),
        r("cross")
            .consume([pat("y", [var("j"), var("k")])])
            .promote([pat("x", [var("k"), var("j")])]),
        r("literal").consume([pat("x", [int(1), var("j")]), pat("y", [cell(2), var("k")])]),
    ]
}

/// Brute-force oracle for max-instantiation: try every assignment of the
/// rule's variables over a value domain, keep the ground rules whose consumed
/// part and promoters are present.
pub fn brute_force(rule: &Rule, contents: &Multiset) -> BTreeSet<GroundRule> {
    let mut domain: BTreeSet<Arg> = (0..6).map(Arg::Int).collect();
    for (s, _) in contents.iter() {
        domain.extend(s.args().iter().cloned());
    }
    let domain: Vec<Arg> = domain.into_iter().collect();
    let mut vars: Vec<Var> = rule
        .consumed
        .iter()
        .chain(&rule.promoters)
        .flat_map(|p| p.vars())
        .collect();
    vars.sort();
    vars.dedup();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let bindings: Bindings = vars
            .iter()
            .zip(&idx)
            .map(|(&v, &i)| (v, domain[i].clone()))
            .collect();
        if let Some(g) = rule.ground(&bindings) {
            if contents.includes(&g.consumed) && contents.includes(&g.promoters) {
                out.insert(g);
            }
        }
        // odometer over assignments
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < domain.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Eccentricity of the general and diameter by Floyd–Warshall.
pub fn floyd(d: &Digraph) -> (u32, Option<u32>) {
    let ids: Vec<CellId> = d.nodes().collect();
    let n = ids.len();
    let idx = |c: CellId| ids.iter().position(|&x| x == c).unwrap();
    const INF: u32 = u32::MAX / 4;
    let mut m = vec![vec![INF; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (p, c) in d.arcs() {
        m[idx(p)][idx(c)] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] + m[k][j] < m[i][j] {
                    m[i][j] = m[i][k] + m[k][j];
                }
            }
        }
    }
    let ecc = m[idx(d.general())].iter().copied().max().unwrap();
    let diam = m.iter().flatten().copied().max().unwrap();
    (ecc, (diam < INF).then_some(diam))
}

/// What the first two phases left behind, read off a logged run.
pub struct PhaseRecord {
    /// Index of the first `n(k)` each cell held.
    pub depth: BTreeMap<CellId, u32>,
    /// Every `p(j)` each cell ever held.
    pub parents: BTreeMap<CellId, BTreeSet<CellId>>,
    /// The general's `m(k)` indices when it launched the countdown, one entry
    /// per launch.
    pub launches: Vec<Vec<u32>>,
}

pub fn phase_record(d: &Digraph, selection: Selection) -> PhaseRecord {
    let mut rec = PhaseRecord {
        depth: BTreeMap::new(),
        parents: BTreeMap::new(),
        launches: Vec::new(),
    };
    let args = |m: &Multiset, f: &str| -> Vec<Arg> {
        m.iter()
            .filter(|(s, _)| s.functor() == f && s.arity() == 1)
            .map(|(s, _)| s.args()[0].clone())
            .collect()
    };
    for (before, log) in logged_run(d, selection, 10 * (d.len() as u64).pow(2)) {
        for (&id, cell) in &log.config.cells {
            if let Some(k) = args(&cell.contents, "n").first().and_then(Arg::as_int) {
                rec.depth.entry(id).or_insert(k);
            }
            let ps = args(&cell.contents, "p")
                .into_iter()
                .filter_map(|a| a.as_cell());
            rec.parents.entry(id).or_default().extend(ps);
        }
        let g = d.general();
        if log.applied[&g].iter().any(|a| a.label == "4.1") {
            rec.launches.push(
                args(&merged(&before, g), "m")
                    .iter()
                    .filter_map(Arg::as_int)
                    .collect(),
            );
        }
    }
    rec
}

/// Cells one arc before `id` on a shortest path from the general.
pub fn bfs_parents(d: &Digraph, dist: &BTreeMap<CellId, u32>, id: CellId) -> BTreeSet<CellId> {
    d.arcs()
        .filter(|&(p, c)| c == id && dist[&p] + 1 == dist[&id])
        .map(|(p, _)| p)
        .collect()
}
