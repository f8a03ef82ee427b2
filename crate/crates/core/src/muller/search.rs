//! Search for accepting cycles in finite graphs under an Emerson–Lei condition.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::family::Conj;

pub(crate) struct Graph {
    pub succ: Vec<Vec<usize>>,
    pub init: Vec<usize>,
}

/// A stem from an initial node to the cycle entry (inclusive), and a cycle
/// starting at that entry. Consecutive nodes are joined by edges, as is the
/// last cycle node to the first.
#[derive(Debug, Clone)]
pub(crate) struct Witness {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl Graph {
    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.succ.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &i in &self.init {
            if !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Shortest path from any of `from` to a node satisfying `goal`, moving
    /// only through `allowed` nodes and taking at least `min_steps` edges.
    fn path(&self, from: &[usize], allowed: &[bool], goal: &dyn Fn(usize) -> bool, min_steps: usize) -> Option<Vec<usize>> {
        if min_steps == 0 {
            if let Some(&s) = from.iter().find(|&&s| goal(s)) {
                return Some(vec![s]);
            }
        }
        // parent[w] = (predecessor, predecessor is a start node)
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; self.succ.len()];
        let mut queue = VecDeque::new();
        for &s in from {
            for &w in &self.succ[s] {
                if allowed[w] && parent[w].is_none() {
                    parent[w] = Some((s, true));
                    queue.push_back(w);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            if goal(v) {
                let mut path = vec![v];
                let mut cur = v;
                loop {
                    let (p, is_start) = parent[cur].expect("discovered nodes have parents");
                    path.push(p);
                    if is_start {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.succ[v] {
                if allowed[w] && parent[w].is_none() {
                    parent[w] = Some((v, false));
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Finds a reachable cycle whose node set satisfies one of the disjuncts.
pub(crate) fn find_accepting(g: &Graph, dnf: &[Conj]) -> Option<Witness> {
    let n = g.succ.len();
    let reach = g.reachable();
    for conj in dnf {
        let allowed: Vec<bool> = (0..n).map(|v| reach[v] && !conj.fin[v]).collect();
        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            graph.add_node(());
        }
        for v in (0..n).filter(|&v| allowed[v]) {
            for &w in &g.succ[v] {
                if allowed[w] {
                    graph.add_edge(NodeIndex::new(v), NodeIndex::new(w), ());
                }
            }
        }
        for scc in tarjan_scc(&graph) {
            let nodes: Vec<usize> = scc.iter().map(|ix| ix.index()).collect();
            if !allowed[nodes[0]] {
                continue;
            }
            let nontrivial = nodes.len() > 1 || g.succ[nodes[0]].contains(&nodes[0]);
            if !nontrivial {
                continue;
            }
            if conj.infs.iter().all(|inf| nodes.iter().any(|&v| inf[v])) {
                return Some(witness(g, &reach, &nodes));
            }
        }
    }
    None
}

fn witness(g: &Graph, reach: &[bool], component: &[usize]) -> Witness {
    let n = g.succ.len();
    let mut inside = vec![false; n];
    for &v in component {
        inside[v] = true;
    }
    let entry_set = inside.clone();
    let stem = g
        .path(&g.init, reach, &|v| entry_set[v], 0)
        .expect("component is reachable");
    let entry = *stem.last().unwrap();

    // Visit every node of the component, then return to the entry.
    let mut cycle = vec![entry];
    let mut visited = vec![false; n];
    visited[entry] = true;
    let mut current = entry;
    for &target in component {
        if visited[target] {
            continue;
        }
        let leg = g.path(&[current], &inside, &|v| v == target, 1).expect("component is strongly connected");
        for &v in &leg[1..] {
            visited[v] = true;
            cycle.push(v);
        }
        current = target;
    }
    let back = g.path(&[current], &inside, &|v| v == entry, 1).expect("component is strongly connected");
    cycle.extend(&back[1..back.len() - 1]);
    Witness { stem, cycle }
}
