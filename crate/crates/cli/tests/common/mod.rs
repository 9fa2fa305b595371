//! Brute-force reference oracles shared by the acceptance criteria. These
//! deliberately avoid the library's max-flow and simplex code paths: path
//! counts come from exhaustive enumeration over all path families, and the
//! diamond objective is evaluated on an explicit grid.

use one21_core::netmodel::{EdgeId, Network, Rat};

/// Every simple source-destination path, by depth-first search in edge-id
/// order.
pub fn all_simple_paths(net: &Network) -> Vec<Vec<EdgeId>> {
    let mut found = Vec::new();
    let mut stack: Vec<EdgeId> = Vec::new();
    let mut visited = vec![false; net.node_count()];
    visited[net.source()] = true;
    fn dfs(
        net: &Network,
        at: usize,
        visited: &mut Vec<bool>,
        stack: &mut Vec<EdgeId>,
        found: &mut Vec<Vec<EdgeId>>,
    ) {
        if at == net.destination() {
            found.push(stack.clone());
            return;
        }
        for (id, e) in net.edges().iter().enumerate() {
            if e.tail == at && !visited[e.head] {
                visited[e.head] = true;
                stack.push(id);
                dfs(net, e.head, visited, stack, found);
                stack.pop();
                visited[e.head] = false;
            }
        }
    }
    dfs(net, net.source(), &mut visited, &mut stack, &mut found);
    found
}

/// Size of the largest pairwise non-conflicting path family, by exhaustive
/// pick-or-skip recursion with a simple remaining-count bound.
fn max_disjoint_family(paths: &[Vec<EdgeId>], conflict: &dyn Fn(usize, usize) -> bool) -> usize {
    fn recurse(
        paths: &[Vec<EdgeId>],
        conflict: &dyn Fn(usize, usize) -> bool,
        idx: usize,
        chosen: &mut Vec<usize>,
        best: &mut usize,
    ) {
        *best = (*best).max(chosen.len());
        if idx == paths.len() || chosen.len() + (paths.len() - idx) <= *best {
            return;
        }
        // Take paths[idx] when it fits.
        if chosen.iter().all(|&c| !conflict(c, idx)) {
            chosen.push(idx);
            recurse(paths, conflict, idx + 1, chosen, best);
            chosen.pop();
        }
        // Or skip it.
        recurse(paths, conflict, idx + 1, chosen, best);
    }
    let mut best = 0;
    recurse(paths, conflict, 0, &mut Vec::new(), &mut best);
    best
}

/// Edge connectivity by enumeration over all path families.
pub fn brute_force_edge_disjoint(net: &Network) -> usize {
    let paths = all_simple_paths(net);
    let conflict = |a: usize, b: usize| paths[a].iter().any(|e| paths[b].contains(e));
    max_disjoint_family(&paths, &conflict)
}

/// Vertex connectivity by enumeration: paths conflict when they share an
/// intermediate node.
pub fn brute_force_vertex_disjoint(net: &Network) -> usize {
    let paths = all_simple_paths(net);
    let inner: Vec<Vec<usize>> = paths
        .iter()
        .map(|p| {
            p.iter()
                .take(p.len().saturating_sub(1))
                .map(|&e| net.edge(e).head)
                .collect()
        })
        .collect();
    let conflict = |a: usize, b: usize| inner[a].iter().any(|v| inner[b].contains(v));
    max_disjoint_family(&paths, &conflict)
}

/// Best diamond objective over the grid of allocations with the given
/// denominator (all f with f_i = g_i / denom, sum g_i = denom).
pub fn grid_best_objective(caps: &[Rat], k: usize, denom: u64) -> Rat {
    fn recurse(
        caps: &[Rat],
        k: usize,
        denom: u64,
        idx: usize,
        left: u64,
        g: &mut Vec<u64>,
        best: &mut Option<Rat>,
    ) {
        if idx + 1 == caps.len() {
            g.push(left);
            let f: Vec<Rat> = g
                .iter()
                .map(|&x| Rat::new((x as i64).into(), (denom as i64).into()))
                .collect();
            let value = one21_core::diamond::objective(caps, &f, k);
            if best.as_ref().is_none_or(|b| value > *b) {
                *best = Some(value);
            }
            g.pop();
            return;
        }
        for take in 0..=left {
            g.push(take);
            recurse(caps, k, denom, idx + 1, left - take, g, best);
            g.pop();
        }
    }
    let mut best = None;
    recurse(caps, k, denom, 0, denom, &mut Vec::new(), &mut best);
    best.expect("grid is nonempty")
}
