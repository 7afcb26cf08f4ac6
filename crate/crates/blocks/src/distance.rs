//! Exact fault distance: the minimum number of fallible edges forming a
//! syndrome-free error chain that flips a mask.
//!
//! Such a chain is a closed walk in the syndrome graph (the virtual sink is
//! an ordinary node) with odd mask overlap. We search the parity double cover:
//! a node is (check, mask parity so far); the answer is the shortest path
//! from (u, 0) to (u, 1), minimized over endpoints u of mask edges.

use crate::graph::{Mask, SyndromeGraph};
use std::collections::VecDeque;

pub fn fault_distance(g: &SyndromeGraph, mask: &Mask) -> Option<usize> {
    let n = g.checks.len();
    let sink = n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (ei, e) in g.edges.iter().enumerate() {
        if e.perfect {
            continue;
        }
        let b = e.b.unwrap_or(sink);
        adj[e.a].push((b, ei));
        adj[b].push((e.a, ei));
    }
    let mut starts: Vec<usize> = Vec::new();
    for (ei, e) in g.edges.iter().enumerate() {
        if mask.edges[ei] && !e.perfect {
            starts.push(e.a);
        }
    }
    starts.sort_unstable();
    starts.dedup();

    let mut best: Option<usize> = None;
    let mut dist = vec![u32::MAX; 2 * (n + 1)];
    for &s in &starts {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        let idx = |v: usize, p: usize| 2 * v + p;
        let mut q = VecDeque::new();
        dist[idx(s, 0)] = 0;
        q.push_back((s, 0usize));
        'bfs: while let Some((v, p)) = q.pop_front() {
            let dv = dist[idx(v, p)];
            if let Some(b) = best {
                if dv as usize >= b {
                    break;
                }
            }
            for &(w, ei) in &adj[v] {
                // a self-loop in the double cover still flips parity
                let np = p ^ (mask.edges[ei] as usize);
                if dist[idx(w, np)] == u32::MAX {
                    dist[idx(w, np)] = dv + 1;
                    if w == s && np == 1 {
                        best = Some(best.map_or(dv as usize + 1, |b| b.min(dv as usize + 1)));
                        break 'bfs;
                    }
                    q.push_back((w, np));
                }
            }
        }
    }
    best
}

/// Minimum fault distance over a family of masks.
pub fn block_distance(g: &SyndromeGraph, masks: &[Mask]) -> Option<usize> {
    masks.iter().filter_map(|m| fault_distance(g, m)).min()
}
