//! Shared fixtures: random small networks and instances, and a brute-force
//! optimum written independently of the branch-and-bound.
#![allow(dead_code)]

use ecoroute::instance::{ContainerSpec, Instance, InstanceParts, NetworkRef};
use ecoroute::network::{Arc, Network, NodeId};
use ecoroute::rng::SeededRng;
use ecoroute::Lambda;

/// Ring `1 -> 2 -> ... -> n -> 1` plus random two-way chords, lengths 1..=20.
pub fn random_network(rng: &mut SeededRng, n: u32) -> Network {
    let mut arcs = Vec::new();
    let mut has = std::collections::HashSet::new();
    let mut add = |arcs: &mut Vec<Arc>, from: u32, to: u32, length: u64| {
        if from != to && has.insert((from, to)) {
            arcs.push(Arc { from: NodeId(from), to: NodeId(to), length });
        }
    };
    for i in 1..=n {
        let len = u64::from(rng.uniform_inclusive(1, 20));
        add(&mut arcs, i, i % n + 1, len);
    }
    for _ in 0..n {
        let (a, b) = (rng.uniform_inclusive(1, n), rng.uniform_inclusive(1, n));
        let len = u64::from(rng.uniform_inclusive(1, 20));
        add(&mut arcs, a, b, len);
        add(&mut arcs, b, a, len);
    }
    Network::new(format!("ring-{n}"), arcs).unwrap()
}

/// Random instance with `m` demand nodes on a fresh random network.
pub fn random_instance(seed: u64, m: usize, modalities: usize, max_kg: u32, spec: ContainerSpec) -> Instance {
    let mut rng = SeededRng::new(seed);
    let n = m as u32 + 1 + rng.uniform_inclusive(0, 3);
    let net = random_network(&mut rng, n);
    let mut ids: Vec<u32> = (1..=n).collect();
    for i in (1..ids.len()).rev() {
        let j = rng.uniform_inclusive(0, i as u32) as usize;
        ids.swap(i, j);
    }
    let depot = NodeId(ids[0]);
    let demand_nodes: Vec<NodeId> = ids[1..=m].iter().map(|&i| NodeId(i)).collect();
    loop {
        let demands: Vec<Vec<u32>> =
            (0..m).map(|_| (0..modalities).map(|_| rng.uniform_inclusive(0, max_kg)).collect()).collect();
        if demands.iter().flatten().all(|&w| w == 0) {
            continue;
        }
        return Instance::new(InstanceParts {
            name: format!("random-{seed}"),
            network: NetworkRef::inline(net),
            depot,
            demand_nodes,
            modalities,
            demands,
            container: spec,
            lambda: Lambda::ONE,
            seed: Some(seed),
        })
        .unwrap();
    }
}

/// Exhaustive optimum of `den * Z3` over all ways to split the demand into
/// routes.
///
/// A route is a set of stops with positive pickups at each; its length is
/// the best visiting order, found by trying all permutations. The optimum
/// over route multisets is computed by recursion on the residual demand,
/// trying every route that fits the residual.
pub fn brute_force_optimum(inst: &Instance, lambda: Lambda) -> u128 {
    let m = inst.demand_nodes().len();
    let k = inst.modalities();
    let c = inst.container().block_capacity();
    let blocks = inst.container().block_count();
    assert!(m <= 6, "brute force is exponential");

    // Floyd-Warshall over the raw arcs.
    let net = inst.network();
    let nodes = net.nodes();
    let idx = |n: NodeId| nodes.iter().position(|&x| x == n).unwrap();
    let size = nodes.len();
    let mut d = vec![vec![u64::MAX / 4; size]; size];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for a in net.arcs() {
        let (f, t) = (idx(a.from), idx(a.to));
        d[f][t] = d[f][t].min(a.length);
    }
    for via in 0..size {
        for i in 0..size {
            for j in 0..size {
                let through = d[i][via] + d[via][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    let depot = idx(inst.depot());
    let at: Vec<usize> = inst.demand_nodes().iter().map(|&n| idx(n)).collect();

    let tour = |set: &[usize]| -> u64 {
        let mut best = u64::MAX;
        permute(&mut set.to_vec(), 0, &mut |order| {
            let mut len = d[depot][at[order[0]]] + d[at[order[order.len() - 1]]][depot];
            for w in order.windows(2) {
                len += d[at[w[0]]][at[w[1]]];
            }
            best = best.min(len);
        });
        best
    };

    let demand: Vec<u32> = inst.demands().iter().flatten().copied().collect();
    let cells = m * k;
    let radix: Vec<usize> = demand.iter().map(|&w| w as usize + 1).collect();
    let encode = |v: &[u32]| v.iter().zip(&radix).rev().fold(0usize, |acc, (&x, &r)| acc * r + x as usize);

    // Every route pattern: a stop set and a pickup vector within demand.
    let mut patterns: Vec<(Vec<u32>, u128)> = Vec::new();
    for mask in 1u32..(1 << m) {
        let set: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let length = tour(&set);
        let free: Vec<usize> = set.iter().flat_map(|&j| (0..k).map(move |q| j * k + q)).collect();
        let mut amounts = vec![0u32; cells];
        enumerate(&free, 0, &demand, &mut amounts, &mut |v| {
            if set.iter().any(|&j| (0..k).all(|q| v[j * k + q] == 0)) {
                return;
            }
            let loads: Vec<u32> = (0..k).map(|q| (0..m).map(|j| v[j * k + q]).sum()).collect();
            if loads.iter().map(|&l| l.div_ceil(c)).sum::<u32>() > blocks {
                return;
            }
            let used = loads.iter().filter(|&&l| l > 0).count() as u64;
            patterns.push((v.to_vec(), lambda.scaled(used, length)));
        });
    }

    let total = radix.iter().product::<usize>();
    let mut best = vec![u128::MAX; total];
    best[0] = 0;
    let mut state = vec![0u32; cells];
    for code in 1..total {
        let mut rest = code;
        for (s, &r) in state.iter_mut().zip(&radix) {
            *s = (rest % r) as u32;
            rest /= r;
        }
        for (p, cost) in &patterns {
            if p.iter().zip(&state).all(|(a, s)| a <= s) {
                let after: Vec<u32> = state.iter().zip(p).map(|(s, a)| s - a).collect();
                let sub = best[encode(&after)];
                if sub != u128::MAX {
                    best[code] = best[code].min(sub + cost);
                }
            }
        }
    }
    best[encode(&demand)]
}

fn permute(v: &mut Vec<usize>, from: usize, visit: &mut impl FnMut(&[usize])) {
    if from == v.len() {
        visit(v);
        return;
    }
    for i in from..v.len() {
        v.swap(from, i);
        permute(v, from + 1, visit);
        v.swap(from, i);
    }
}

fn enumerate(free: &[usize], at: usize, cap: &[u32], v: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if at == free.len() {
        visit(v);
        return;
    }
    let cell = free[at];
    for x in 0..=cap[cell] {
        v[cell] = x;
        enumerate(free, at + 1, cap, v, visit);
    }
    v[cell] = 0;
}
