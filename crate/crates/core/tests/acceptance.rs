//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    bfs, bfs_parents, brute_force, check_step, floyd, logged_run, oracle_rules, phase_record,
    small_symbol,
};
use fssp_core::experiments::{reproduce_tables, Family, EXPECTED};
use fssp_core::topology::{random_strongly_connected, sample_ten};
use fssp_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// The eleven random digraphs: sizes up to 70, fixed seeds.
fn random_suite() -> Vec<Digraph> {
    [8, 12, 16, 20, 25, 30, 40, 50, 60, 65, 70]
        .into_iter()
        .zip(101u64..)
        .map(|(n, seed)| random_strongly_connected(n, 0.05, seed).unwrap())
        .collect()
}

fn table_digraphs() -> Vec<Digraph> {
    EXPECTED
        .iter()
        .map(|r| r.family.build(r.n).unwrap())
        .collect()
}

fn fire(d: &Digraph, sel: Selection) -> SyncReport {
    simulate(d, sel, default_budget(d.len()), Granularity::Sampled(0))
        .unwrap()
        .1
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let rows = reproduce_tables(Selection::Lowest).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} N={}: expected {} steps, e_g={}; got {:?} steps, e_g={}",
                r.expected.family.name(),
                r.expected.n,
                r.expected.steps,
                r.expected.eccentricity,
                r.observed.steps,
                r.observed.eccentricity
            )
        })
        .collect();
    if !failed.is_empty() {
        return Err(failed.join("; "));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("35/35 rows exact but took {elapsed:.1?}"));
    }
    Ok(format!(
        "35/35 rows fire at the printed step ({elapsed:.1?})"
    ))
}

fn closed_form() -> Outcome {
    // quadratic through the printed rows N = 2, 3, 4
    let printed: BTreeMap<u32, i64> = EXPECTED
        .iter()
        .filter(|r| r.family == Family::Ring)
        .map(|r| (r.n, r.steps as i64))
        .collect();
    let (y2, y3, y4) = (printed[&2], printed[&3], printed[&4]);
    let a2 = y4 - 2 * y3 + y2; // 2a
    let b = (y3 - y2) - a2 * 5 / 2;
    let c = y2 - a2 * 2 - 2 * b;
    if (a2, b, c) != (2, 6, 2) {
        return Err(format!(
            "fit gave 2a={a2} b={b} c={c}, expected N² + 6N + 2"
        ));
    }
    for n in 2..=15u32 {
        let d = Family::Ring.build(n).unwrap();
        let got = fire(&d, Selection::Lowest).firing_step.map(|s| s as i64);
        let n = n as i64;
        let want = a2 / 2 * n * n + b * n + c;
        if got != Some(want) {
            return Err(format!(
                "ring N={n}: observed {got:?}, N² + 6N + 2 = {want}"
            ));
        }
    }
    Ok("ring steps = N² + 6N + 2 for 2 ≤ N ≤ 15".into())
}

fn random_synchronization() -> Outcome {
    let suite = random_suite();
    for d in &suite {
        let r = fire(d, Selection::Lowest);
        if !(r.fired && r.simultaneous && r.first_time) {
            return Err(format!("N={}: {r:?}", d.len()));
        }
        let step = r.firing_step.unwrap();
        if step > default_budget(d.len()) {
            return Err(format!("N={} fired at {step}, beyond the budget", d.len()));
        }
    }
    let largest = suite.iter().map(Digraph::len).max().unwrap();
    Ok(format!(
        "{} random digraphs up to {largest} cells fire simultaneously, once",
        suite.len()
    ))
}

fn seed_independence() -> Outcome {
    let all: Vec<Digraph> = table_digraphs()
        .into_iter()
        .chain(random_suite())
        .chain([sample_ten()])
        .collect();
    for d in &all {
        let base = fire(d, Selection::Lowest).firing_step;
        for seed in [1, 7, 42, 1000, 65_537] {
            let s = fire(d, Selection::Seeded(seed)).firing_step;
            if s != base || s.is_none() {
                return Err(format!("N={} seed {seed}: {s:?} vs {base:?}", d.len()));
            }
        }
    }
    Ok(format!(
        "{} topologies, 5 seeds each, identical firing steps",
        all.len()
    ))
}

fn oracles() -> Outcome {
    // depths, parents and the launched index against BFS
    let mut checked = 0;
    for d in table_digraphs()
        .iter()
        .chain(&random_suite()[..6])
        .chain([&sample_ten()])
    {
        let dist = bfs(d);
        let rec = phase_record(d, Selection::Lowest);
        for id in d.nodes() {
            if rec.depth.get(&id) != Some(&dist[&id]) {
                return Err(format!(
                    "N={}: depth of {id} is {:?}, BFS says {}",
                    d.len(),
                    rec.depth.get(&id),
                    dist[&id]
                ));
            }
            if rec.parents[&id] != bfs_parents(d, &dist, id) {
                return Err(format!(
                    "N={}: parents of {id} differ from the BFS dag",
                    d.len()
                ));
            }
        }
        let e_g = *dist.values().max().unwrap();
        if rec.launches != vec![vec![e_g]] {
            return Err(format!(
                "N={}: launched with {:?}, eccentricity {e_g}",
                d.len(),
                rec.launches
            ));
        }
        checked += 1;
    }

    // max-instantiation against brute force
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rules = oracle_rules();
    for _ in 0..2000 {
        let len = rng.gen_range(0..=10);
        let contents: Multiset = (0..len)
            .map(|_| {
                small_symbol(
                    rng.gen_range(0..4),
                    rng.gen_range(0..4),
                    rng.gen_range(1..4),
                )
            })
            .collect();
        let rule = &rules[rng.gen_range(0..rules.len())];
        let got: std::collections::BTreeSet<GroundRule> =
            rule.instances(&contents).into_iter().collect();
        if got != brute_force(rule, &contents) {
            return Err(format!(
                "rule {} on {contents}: instances differ from brute force",
                rule.label
            ));
        }
    }

    // metrics against Floyd–Warshall
    for seed in 0..200u64 {
        let d = random_strongly_connected(1 + (seed % 12) as u32, (seed % 7) as f64 * 0.05, seed)
            .unwrap();
        let m = d.metrics().map_err(|e| e.to_string())?;
        if (m.eccentricity, Some(m.diameter)) != floyd(&d) {
            return Err(format!(
                "seed {seed}: metrics {m:?} vs Floyd–Warshall {:?}",
                floyd(&d)
            ));
        }
    }
    Ok(format!("BFS depth/parents/e_g on {checked} runs, 2000 brute-force instantiations, 200 Floyd–Warshall checks"))
}

fn negative_and_quiescence() -> Outcome {
    let file = DigraphFile {
        nodes: vec![1, 2],
        arcs: vec![(1, 2)],
        general: 1,
    };
    if topology::validate(&file).strongly_connected {
        return Err("single arc accepted as strongly connected".into());
    }
    let d = Digraph::try_from(file).map_err(|e| e.to_string())?;
    if d.metrics().is_ok() {
        return Err("metrics accepted a non-strongly-connected digraph".into());
    }
    if fire(&d, Selection::Lowest).fired {
        return Err("a non-strongly-connected digraph fired".into());
    }
    let program = build_fssp_program();
    for d in table_digraphs().iter().chain([&sample_ten()]) {
        let mut init = initial_configuration(d, d.general()).unwrap();
        let g = init.cells.get_mut(&d.general()).unwrap();
        g.contents.remove_n(&Symbol::atom("a"), 1);
        if !Engine::new(&program, d).is_halted(&init) {
            return Err(format!("N={}: not halted at step 0 without a", d.len()));
        }
    }
    Ok(
        "non-strongly-connected input rejected and never fires; no start order, halted at step 0"
            .into(),
    )
}

fn engine_semantics() -> Outcome {
    let program = build_fssp_program();
    let mut steps = 0;
    for d in random_suite()[..5]
        .iter()
        .chain([&sample_ten(), &Family::IncreasingRings.build(9).unwrap()])
    {
        for sel in [Selection::Lowest, Selection::Seeded(9)] {
            for (before, log) in logged_run(d, sel, default_budget(d.len())) {
                check_step(&program, d, &before, &log)
                    .map_err(|e| format!("N={} step {}: {e}", d.len(), log.config.step_index))?;
                steps += 1;
            }
        }
    }

    // same-step isolation with a sentinel that would fire on fresh output
    let sentinel = Program::new(vec![
        Rule::new("make", "S", "S")
            .consume([pattern::dsl::atom("a")])
            .produce([pattern::dsl::atom("b")]),
        Rule::new("sentinel", "S", "S")
            .consume([pattern::dsl::atom("b")])
            .produce([pattern::dsl::atom("z")]),
    ])
    .map_err(|e| e.to_string())?;
    let mut contents = Multiset::new();
    contents.insert(Symbol::atom("a"));
    let cell = CellState {
        id: CellId(1),
        state: StateId::new("S"),
        contents,
    };
    let out = engine::apply_cell(&cell, &sentinel, &mut engine::Chooser::lowest());
    if out.cell.contents.contains(&Symbol::atom("z")) {
        return Err("sentinel matched a symbol produced in the same step".into());
    }
    Ok(format!("{steps} logged steps: promoters kept, one target, nothing skipped, broadcasts replicated; sentinel idle"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("table reproduction", table_reproduction),
        ("closed-form growth", closed_form),
        ("random digraph synchronization", random_synchronization),
        ("seed independence", seed_independence),
        ("oracle suites", oracles),
        ("negative tests and quiescence", negative_and_quiescence),
        ("engine semantics", engine_semantics),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {failures} of {} criteria failed",
            criteria.len()
        );
        ExitCode::FAILURE
    }
}
