//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's constructions.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

/// Stretch per canonical pair of the tiny composed instance when the first
/// edge of every inner segment is deleted; `None` means disconnected.
/// Frozen from [`tiny_one_edge_per_copy_oracle`].
pub const TINY_ONE_EDGE_PER_COPY: [Option<u64>; 16] = [
    None,
    None,
    None,
    Some(168),
    None,
    Some(168),
    None,
    Some(168),
    None,
    Some(168),
    None,
    None,
    None,
    None,
    None,
    None,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Inner { copy: (i64, i64), at: (i64, i64) },
    Sub { from: (i64, i64), to: (i64, i64), k: usize },
}

fn add(adj: &mut HashMap<Node, Vec<Node>>, a: Node, b: Node) {
    adj.entry(a).or_default().push(b);
    adj.entry(b).or_default().push(a);
}

fn bfs(adj: &HashMap<Node, Vec<Node>>, removed: &HashSet<(Node, Node)>, s: Node, t: Node) -> Option<u64> {
    let mut dist = HashMap::from([(s, 0u64)]);
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        if u == t {
            return Some(dist[&u]);
        }
        for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if removed.contains(&(u, v)) || removed.contains(&(v, u)) || dist.contains_key(&v) {
                continue;
            }
            dist.insert(v, dist[&u] + 1);
            q.push_back(v);
        }
    }
    None
}

/// Straight-line walk from `s` by `w`, as far as the `x` by `y` grid allows.
fn walk(s: (i64, i64), w: (i64, i64), x: i64, y: i64) -> Vec<(i64, i64)> {
    let mut out = vec![s];
    loop {
        let p = *out.last().unwrap();
        let q = (p.0 + w.0, p.1 + w.1);
        if q.0 > x || q.1 > y {
            return out;
        }
        out.push(q);
    }
}

/// Rebuilds the tiny instance from its definition: a 26 x 52 inner grid
/// with vectors (3, 3) and (4, 2) and 104 critical pairs (so z = 13), an
/// 8 x 16 outer grid with vectors (1, 0) and (2, 1), and each outer vector
/// routed through the inner pair from (1, 1) along the matching inner
/// vector.
pub fn tiny_one_edge_per_copy_oracle() -> Vec<Option<u64>> {
    let inner_w = [(3, 3), (4, 2)];
    let outer_w = [(1, 0), (2, 1)];
    let z = (26 * 52) / (2 * 26 * 2);
    assert_eq!(z, 13);
    let inner_paths: Vec<Vec<(i64, i64)>> = inner_w.iter().map(|&w| walk((1, 1), w, 26, 52)).collect();

    let mut adj: HashMap<Node, Vec<Node>> = HashMap::new();
    let mut outer_paths = Vec::new();
    for row in 1..=8 {
        for (vi, &v) in outer_w.iter().enumerate() {
            let op = walk((1, row), v, 8, 16);
            let ip = &inner_paths[vi];
            for step in op.windows(2) {
                let (u, w) = (step[0], step[1]);
                for e in ip.windows(2) {
                    add(&mut adj, Node::Inner { copy: u, at: e[0] }, Node::Inner { copy: u, at: e[1] });
                }
                let mut chain = vec![Node::Inner { copy: u, at: *ip.last().unwrap() }];
                chain.extend((0..z - 1).map(|k| Node::Sub { from: u, to: w, k }));
                chain.push(Node::Inner { copy: w, at: ip[0] });
                for e in chain.windows(2) {
                    add(&mut adj, e[0], e[1]);
                }
            }
            outer_paths.push((op, vi));
        }
    }
    outer_paths
        .iter()
        .map(|(op, vi)| {
            let ip = &inner_paths[*vi];
            let s = Node::Inner { copy: op[0], at: ip[0] };
            let t = Node::Inner { copy: *op.last().unwrap(), at: ip[0] };
            let before = bfs(&adj, &HashSet::new(), s, t).expect("canonical pair is connected");
            let removed: HashSet<(Node, Node)> = op[..op.len() - 1]
                .iter()
                .map(|&u| (Node::Inner { copy: u, at: ip[0] }, Node::Inner { copy: u, at: ip[1] }))
                .collect();
            bfs(&adj, &removed, s, t).map(|after| after - before)
        })
        .collect()
}
