//! Erasure-aware union-find decoder.
//!
//! Erased edges are pre-grown; clusters with odd defect parity that do not
//! touch the virtual sink grow their frontier by half an edge per round and
//! merge on contact. Once every cluster is even or grounded, a spanning
//! forest of each cluster's grown edges is peeled leaf-first to produce the
//! correction.

use crate::graph::SyndromeGraph;

pub struct Decoder {
    /// node count: checks plus the virtual sink (last index)
    n: usize,
    /// node -> (neighbor, edge index), fallible edges only
    adj: Vec<Vec<(usize, usize)>>,
    /// edge -> (a, b) node endpoints
    ends: Vec<(usize, usize)>,
    fallible: Vec<bool>,
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), rank: vec![0; n] }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    /// returns (new root, absorbed root) or None if already joined
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        Some((hi, lo))
    }
}

impl Decoder {
    pub fn new(g: &SyndromeGraph) -> Self {
        let n = g.checks.len() + 1;
        let sink = n - 1;
        let mut adj = vec![Vec::new(); n];
        let mut ends = Vec::with_capacity(g.edges.len());
        let mut fallible = vec![false; g.edges.len()];
        for (ei, e) in g.edges.iter().enumerate() {
            let b = e.b.unwrap_or(sink);
            ends.push((e.a, b));
            if e.perfect {
                continue;
            }
            fallible[ei] = true;
            adj[e.a].push((b, ei));
            adj[b].push((e.a, ei));
        }
        Decoder { n, adj, ends, fallible }
    }

    pub fn sink(&self) -> usize {
        self.n - 1
    }

    /// Syndrome has one bit per check (virtual sink excluded).
    pub fn decode(&self, erased: &[bool], syndrome: &[bool]) -> Vec<bool> {
        let sink = self.sink();
        let ne = self.ends.len();
        let mut support = vec![0u8; ne];
        let mut dsu = Dsu::new(self.n);
        // cluster bookkeeping, indexed by DSU root
        let mut parity: Vec<bool> = syndrome.to_vec();
        parity.push(false);
        let mut grounded = vec![false; self.n];
        grounded[sink] = true;
        let mut frontier: Vec<Vec<usize>> = (0..self.n)
            .map(|v| self.adj[v].iter().map(|&(_, ei)| ei).collect())
            .collect();

        let merge = |dsu: &mut Dsu,
                         parity: &mut Vec<bool>,
                         grounded: &mut Vec<bool>,
                         frontier: &mut Vec<Vec<usize>>,
                         a: usize,
                         b: usize| {
            if let Some((hi, lo)) = dsu.union(a, b) {
                let p = parity[lo];
                parity[hi] ^= p;
                grounded[hi] |= grounded[lo];
                let moved = std::mem::take(&mut frontier[lo]);
                frontier[hi].extend(moved);
            }
        };

        for (ei, &(a, b)) in self.ends.iter().enumerate() {
            if self.fallible[ei] && erased[ei] {
                support[ei] = 2;
                merge(&mut dsu, &mut parity, &mut grounded, &mut frontier, a, b);
            }
        }

        loop {
            let mut active: Vec<usize> = (0..self.n)
                .filter(|&v| dsu.find(v) == v && parity[v] && !grounded[v])
                .collect();
            if active.is_empty() {
                break;
            }
            // grow each active cluster by half an edge on its whole frontier
            let mut to_join: Vec<usize> = Vec::new();
            for &root in &active {
                let mut keep = Vec::new();
                let fr = std::mem::take(&mut frontier[root]);
                for ei in fr {
                    if support[ei] == 2 {
                        continue;
                    }
                    let (a, b) = self.ends[ei];
                    let (ra, rb) = (dsu.find(a), dsu.find(b));
                    if ra == rb {
                        continue;
                    }
                    support[ei] += 1;
                    if support[ei] == 2 {
                        to_join.push(ei);
                    } else {
                        keep.push(ei);
                    }
                }
                frontier[root] = keep;
            }
            if to_join.is_empty() {
                // all frontier edges already internal; clusters were stuck,
                // which cannot happen on a connected graph with a sink
                active.clear();
                break;
            }
            for ei in to_join {
                let (a, b) = self.ends[ei];
                merge(&mut dsu, &mut parity, &mut grounded, &mut frontier, a, b);
            }
        }

        self.peel(&support, syndrome)
    }

    /// Peel a spanning forest of the grown subgraph, rooted at the sink where
    /// possible, clearing defects leaf-first.
    fn peel(&self, support: &[u8], syndrome: &[bool]) -> Vec<bool> {
        let sink = self.sink();
        let mut defect: Vec<bool> = syndrome.to_vec();
        defect.push(false);
        let mut correction = vec![false; self.ends.len()];
        let mut visited = vec![false; self.n];
        let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; self.n]; // (parent, edge)
        let mut order: Vec<usize> = Vec::new();

        // roots: sink first so grounded clusters hang off it
        let mut roots: Vec<usize> = vec![sink];
        roots.extend(0..self.n - 1);
        for root in roots {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                order.push(v);
                for &(w, ei) in &self.adj[v] {
                    if support[ei] == 2 && !visited[w] {
                        visited[w] = true;
                        parent_edge[w] = Some((v, ei));
                        stack.push(w);
                    }
                }
            }
        }
        for &v in order.iter().rev() {
            if defect[v] {
                if let Some((p, ei)) = parent_edge[v] {
                    correction[ei] = true;
                    defect[v] = false;
                    defect[p] ^= true;
                }
                // a defective root other than the sink means an odd cluster
                // survived; leave it, the trial counts as whatever the masks say
            }
        }
        correction
    }
}
