//! Property tests over randomly generated networks.

mod common;

use std::collections::BTreeSet;

use clap::Parser;
use mcflow::cli::{parse_structured, run, RunConfig};
use mcflow::heuristic::validate_assignment;
use mcflow::maxflow::{augment, decompose_cut_paths, find_augmenting_path, max_flow, FlowState};
use mcflow::netmodel::{parse_network, render_network, validate, EdgeId, Network};
use mcflow::oracle::{optimal_value, optimize, OracleLimits, PathCatalog};
use mcflow::tableaux::{PathId, PathStatus, TableauxBundle};
use mcflow::{greedy_solve, initialize};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn single(seed: u64) -> Network {
    common::random_network(&mut common::rng(seed), 2..=8, 1..=14, 10, 1..=1)
}

fn multi(seed: u64) -> Network {
    common::random_network(&mut common::rng(seed), 2..=7, 1..=12, 8, 2..=3)
}

fn limits() -> OracleLimits {
    OracleLimits {
        max_paths: 64,
        max_candidates: 2_000_000,
    }
}

/// Same network with its edges listed in a different order.
fn permuted(net: &Network, seed: u64) -> Network {
    let mut order: Vec<usize> = (0..net.edge_count()).collect();
    order.shuffle(&mut common::rng(seed));
    let mut out = Network::new();
    for name in net.nodes() {
        out.add_node(name.clone());
    }
    for i in order {
        let e = net.edge(EdgeId(i));
        out.add_edge(e.tail, e.head, e.capacity);
    }
    for c in net.commodities() {
        out.add_commodity(c.source, c.sink);
    }
    out
}

/// Whether another non-discarded path uses an edge of `id`.
fn shares_edge(bundle: &TableauxBundle, id: PathId) -> bool {
    let path = &bundle.paths()[id.0];
    bundle
        .paths()
        .iter()
        .filter(|q| q.id != id && q.status != PathStatus::Discarded)
        .any(|q| q.edges.iter().any(|e| path.edges.contains(e)))
}

/// Exhaustive optimum over the catalog with no pruning.
fn brute_optimum(catalog: &PathCatalog, caps: &mut [u64], k: usize) -> u64 {
    let paths: Vec<_> = catalog.flat().collect();
    if k == paths.len() {
        return 0;
    }
    let top = paths[k].edges.iter().map(|e| caps[e.0]).min().unwrap_or(0);
    let mut best = 0;
    for amount in 0..=top {
        for e in &paths[k].edges {
            caps[e.0] -= amount;
        }
        best = best.max(amount + brute_optimum(catalog, caps, k + 1));
        for e in &paths[k].edges {
            caps[e.0] += amount;
        }
    }
    best
}

fn cli(args: &[&str], text: &str) -> (i32, String) {
    let mut argv = vec!["mcflow", "--format", "structured"];
    argv.extend_from_slice(args);
    let config = RunConfig::try_parse_from(argv).unwrap();
    let out = run(&config, text);
    (out.code, out.stdout)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let net = multi(seed);
        let text = render_network(&net);
        let back = parse_network(&text).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert!(validate(&back).is_empty());
    }

    #[test]
    fn every_augmentation_keeps_the_flow_feasible(seed in any::<u64>()) {
        let net = single(seed);
        let c = &net.commodities()[0];
        let mut f = FlowState::zero(&net, c.source, c.sink);
        let mut steps = 0u64;
        while let Some(a) = find_augmenting_path(&net, &f, c.source, c.sink).unwrap() {
            prop_assert!(a.leeway > 0);
            let next = augment(&net, &f, &a).unwrap();
            prop_assert_eq!(next.value, f.value + a.leeway);
            prop_assert!(next.feasibility_errors(&net).is_empty());
            f = next;
            steps += 1;
        }
        let out_of_source: u64 = net
            .edges()
            .iter()
            .filter(|e| e.tail == c.source)
            .map(|e| e.capacity)
            .sum();
        prop_assert!(steps <= out_of_source);
        let mf = max_flow(&net, c.source, c.sink).unwrap();
        prop_assert_eq!(mf.value(), f.value);
        prop_assert!(mf.augmentations as u64 <= out_of_source);
    }

    #[test]
    fn decomposition_replays_within_the_flow(seed in any::<u64>()) {
        let net = single(seed);
        let c = &net.commodities()[0];
        let mf = max_flow(&net, c.source, c.sink).unwrap();
        let paths = decompose_cut_paths(&net, &mf.flow).unwrap();
        let mut replay = vec![0u64; net.edge_count()];
        for p in &paths {
            for e in &p.edges {
                replay[e.0] += p.amount;
            }
            prop_assert!(mf.min_cut.cut_edges.contains(&p.cut_edge));
        }
        for (e, &r) in replay.iter().enumerate() {
            prop_assert!(r <= mf.flow.edge_flow[e]);
        }
        prop_assert_eq!(paths.iter().map(|p| p.amount).sum::<u64>(), mf.value());
    }

    #[test]
    fn tables_stay_consistent_through_greedy_steps(seed in any::<u64>()) {
        let net = multi(seed);
        let mut bundle = initialize(&net).unwrap();
        prop_assert!(bundle.audit().is_empty(), "{:?}", bundle.audit());
        loop {
            for p in bundle.paths() {
                if p.status != PathStatus::Discarded && bundle.pcbv[p.id.0] == 1 {
                    prop_assert!(!shares_edge(&bundle, p.id), "{} shares an edge", p.label());
                }
            }
            let Some(id) = bundle
                .active()
                .min_by_key(|p| (bundle.pcbv[p.id.0], p.commodity, p.ordinal))
                .map(|p| p.id)
            else {
                break;
            };
            let amount = bundle.mecbv[id.0];
            bundle.apply_shipment(id, amount).unwrap();
            prop_assert!(bundle.audit().is_empty(), "{:?}", bundle.audit());
        }
    }

    #[test]
    fn greedy_respects_each_commodity_max_flow(seed in any::<u64>()) {
        let net = multi(seed);
        let mut bundle = initialize(&net).unwrap();
        let a = greedy_solve(&mut bundle).unwrap();
        prop_assert!(validate_assignment(&net, &a).unwrap().is_empty());
        for (i, c) in net.commodities().iter().enumerate() {
            let alone = max_flow(&net, c.source, c.sink).unwrap().value();
            prop_assert!(a.per_commodity_value[i] <= alone);
        }
    }

    #[test]
    fn single_commodity_oracle_is_max_flow(seed in any::<u64>()) {
        let net = common::random_network(&mut common::rng(seed), 2..=6, 1..=10, 6, 1..=1);
        let Ok(res) = optimal_value(&net, limits()) else {
            return Err(TestCaseError::reject("too many paths"));
        };
        prop_assume!(!res.truncated);
        let c = &net.commodities()[0];
        prop_assert_eq!(res.optimum, max_flow(&net, c.source, c.sink).unwrap().value());
    }

    #[test]
    fn oracle_ignores_edge_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let net = multi(seed);
        let a = optimal_value(&net, limits());
        let b = optimal_value(&permuted(&net, shuffle), limits());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assume!(!a.truncated && !b.truncated);
            prop_assert_eq!(a.optimum, b.optimum);
        }
    }

    #[test]
    fn oracle_matches_unpruned_enumeration(seed in any::<u64>()) {
        let net = common::random_network(&mut common::rng(seed), 2..=5, 1..=8, 4, 2..=3);
        let res = optimal_value(&net, limits()).unwrap();
        prop_assume!(res.catalog.len() <= 8 && !res.truncated);
        let mut caps: Vec<u64> = net.edges().iter().map(|e| e.capacity).collect();
        prop_assert_eq!(res.optimum, brute_optimum(&res.catalog, &mut caps, 0));
        let witness = res.assignment(&net);
        prop_assert!(validate_assignment(&net, &witness).unwrap().is_empty());
        prop_assert_eq!(witness.total_value, res.optimum);
    }

    #[test]
    fn restricted_oracle_dominates_greedy(seed in any::<u64>()) {
        let net = multi(seed);
        let mut bundle = initialize(&net).unwrap();
        let catalog = PathCatalog::from_bundle(&net, &bundle);
        let heuristic = greedy_solve(&mut bundle).unwrap().total_value;
        let res = optimize(&net, catalog, limits().max_candidates);
        prop_assume!(!res.truncated);
        prop_assert!(res.optimum >= heuristic);
    }

    #[test]
    fn structured_output_round_trips(seed in any::<u64>()) {
        let net = multi(seed);
        let text = render_network(&net);

        let (code, out) = cli(&["solve"], &text);
        prop_assert_eq!(code, 0);
        let report = parse_structured(&out).unwrap();
        let mut bundle = initialize(&net).unwrap();
        let a = greedy_solve(&mut bundle).unwrap();
        prop_assert_eq!(report.get("total").unwrap().parse::<u64>().unwrap(), a.total_value);
        let values: Vec<u64> = report
            .all("commodity_value")
            .iter()
            .map(|v| v.split(' ').nth(1).unwrap().parse().unwrap())
            .collect();
        prop_assert_eq!(&values, &a.per_commodity_value);
        let amounts: Vec<u64> = report
            .all("shipment")
            .iter()
            .map(|v| v.split(' ').nth(1).unwrap().parse().unwrap())
            .collect();
        let shipped: Vec<u64> = a.shipments.iter().map(|s| s.amount).collect();
        prop_assert_eq!(amounts, shipped);

        let (code, out) = cli(&["maxflow", "--commodity", "1"], &text);
        prop_assert_eq!(code, 0);
        let report = parse_structured(&out).unwrap();
        let c = &net.commodities()[0];
        let mf = max_flow(&net, c.source, c.sink).unwrap();
        prop_assert_eq!(report.get("value").unwrap().parse::<u64>().unwrap(), mf.value());
        prop_assert_eq!(
            report.get("cut_capacity").unwrap().parse::<u64>().unwrap(),
            mf.min_cut.capacity
        );
        let cut: BTreeSet<String> = report
            .all("cut_edge")
            .iter()
            .map(|v| v.split(' ').next().unwrap().to_string())
            .collect();
        let want: BTreeSet<String> = mf.min_cut.cut_edges.iter().map(|e| e.to_string()).collect();
        prop_assert_eq!(cut, want);

        let (code, out) = cli(&["gap", "--max-candidates", "2000000"], &text);
        if code == 0 {
            let report = parse_structured(&out).unwrap();
            let get = |k: &str| report.get(k).unwrap().parse::<i64>().unwrap();
            prop_assert_eq!(get("heuristic"), a.total_value as i64);
            prop_assert_eq!(get("gap"), get("optimum") - get("heuristic"));
            let bundle = initialize(&net).unwrap();
            let sum: u64 = bundle.commodities.iter().map(|r| r.max_flow).sum();
            prop_assert_eq!(get("sum_individual"), sum as i64);
        } else {
            prop_assert_eq!(code, 3);
        }
    }
}

#[test]
fn identical_commodities_keep_their_order() {
    let net = parse_network(
        "node s\nnode m\nnode t\nedge s m 3\nedge m t 2\ncommodity s t\ncommodity s t\n",
    )
    .unwrap();
    let mut bundle = initialize(&net).unwrap();
    let a = greedy_solve(&mut bundle).unwrap();
    assert_eq!(a.per_commodity_value, [2, 0]);
    assert_eq!(a.discarded.len(), 1);
}
