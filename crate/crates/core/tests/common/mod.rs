//! Shared generators and brute-force references for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mcflow::netmodel::{EdgeId, Network, NodeId};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random simple-digraph-ish network (parallel edges allowed, no self-loops)
/// with `commodities` distinct-endpoint pairs.
pub fn random_network(
    rng: &mut impl Rng,
    nodes: std::ops::RangeInclusive<usize>,
    edges: std::ops::RangeInclusive<usize>,
    max_capacity: u64,
    commodities: std::ops::RangeInclusive<usize>,
) -> Network {
    let mut net = Network::new();
    let n = rng.gen_range(nodes);
    for i in 0..n {
        net.add_node(format!("v{i}"));
    }
    let m = rng.gen_range(edges);
    for _ in 0..m {
        let tail = rng.gen_range(0..n);
        let mut head = rng.gen_range(0..n - 1);
        if head >= tail {
            head += 1;
        }
        net.add_edge(NodeId(tail), NodeId(head), rng.gen_range(0..=max_capacity));
    }
    let k = rng.gen_range(commodities);
    for _ in 0..k {
        let s = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        net.add_commodity(NodeId(s), NodeId(t));
    }
    net
}

/// Minimum `s`-`t` cut capacity by enumerating every source side.
pub fn brute_force_min_cut(net: &Network, s: NodeId, t: NodeId) -> u64 {
    let others: Vec<usize> = (0..net.node_count())
        .filter(|&v| v != s.0 && v != t.0)
        .collect();
    let mut best = u64::MAX;
    for mask in 0u64..(1 << others.len()) {
        let mut side = vec![false; net.node_count()];
        side[s.0] = true;
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                side[v] = true;
            }
        }
        let cap = net
            .edges()
            .iter()
            .filter(|e| side[e.tail.0] && !side[e.head.0])
            .map(|e| e.capacity)
            .sum();
        best = best.min(cap);
    }
    best
}

/// Inclusion–exclusion evaluated literally: every nonempty subset, explicit
/// set intersection, alternating sign.
pub fn brute_force_inclusion_exclusion(sets: &[BTreeSet<EdgeId>], caps: &[u64]) -> i64 {
    let mut total = 0i64;
    for mask in 1u32..(1 << sets.len()) {
        let members: Vec<usize> = (0..sets.len()).filter(|i| mask >> i & 1 == 1).collect();
        let mut inter = sets[members[0]].clone();
        for &i in &members[1..] {
            inter = inter.intersection(&sets[i]).copied().collect();
        }
        let sum: i64 = inter.iter().map(|e| caps[e.0] as i64).sum();
        let sign = if members.len() % 2 == 1 { 1 } else { -1 };
        total += sign * sum;
    }
    total
}

pub const WORKED_FIXTURE: &str = include_str!("../fixtures/worked_example.net");
