//! Benchmark inputs shared by the criterion targets.

use fssp_core::experiments::Family;
use fssp_core::topology::random_strongly_connected;
use fssp_core::Digraph;

/// One digraph per table family, at a mid-sized row, plus a random one.
pub fn workloads() -> Vec<(String, Digraph)> {
    let mut out: Vec<(String, Digraph)> = [
        (Family::Ring, 20),
        (Family::SizeTwoRings, 20),
        (Family::SizeThreeRings, 20),
        (Family::IncreasingRings, 20),
    ]
    .into_iter()
    .map(|(f, n)| (format!("{}-{n}", f.name()), f.build(n).expect("table size")))
    .collect();
    out.push((
        "random-30".to_string(),
        random_strongly_connected(30, 0.05, 7).expect("valid parameters"),
    ));
    out
}
