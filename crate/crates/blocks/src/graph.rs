//! Syndrome graph: measurement outcomes become edges, checks become
//! vertices, under-claimed outcomes attach to a single virtual sink.
//!
//! Every edge also carries the unwrapped positions of the two cells that
//! would claim it under the bulk rule; mask recipes are geometric predicates
//! on those positions.

use crate::checks::Check;
use crate::fusion::{ring_axis, ring_positive, Basis, CompileError, FusionNetwork, Site};
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct Edge {
    /// Measurement index and outcome class (0: X-type, 1: Z-type).
    pub meas: usize,
    pub class: u8,
    /// Endpoint check indices; `None` is the virtual sink. Unclaimed port
    /// outcomes keep an edge for membrane bookkeeping with `a` set to the
    /// sink index `checks.len()`.
    pub a: usize,
    pub b: Option<usize>,
    /// Perfect edges never carry errors (open port outcomes).
    pub perfect: bool,
    /// Nominal claiming cells under the bulk rule, unwrapped.
    pub p0: [i32; 3],
    pub p1: [i32; 3],
}

pub struct SyndromeGraph {
    pub checks: Vec<Check>,
    /// Deterministic outcome products confined to a single port that cannot
    /// be claimed as graph vertices; used only for membrane certification.
    pub sheets: Vec<Vec<(usize, u8)>>,
    pub edges: Vec<Edge>,
    /// check index -> incident edge indices (parallel edges listed once each)
    pub adj: Vec<Vec<usize>>,
}

/// Bulk-rule claiming cells of an axis-aligned edge outcome.
/// `base` is the lower endpoint of the (possibly would-be) lattice edge.
pub fn nominal_cells(axis: usize, base: [i32; 3], class: u8) -> ([i32; 3], [i32; 3]) {
    let [x, y, z] = base;
    match (axis, class) {
        (0, 0) => ([x, y, z], [x, y - 1, z - 1]),
        (0, _) => ([x, y - 1, z], [x, y, z - 1]),
        (1, 0) => ([x - 1, y, z], [x, y, z - 1]),
        (1, _) => ([x, y, z], [x - 1, y, z - 1]),
        (2, 0) => ([x - 1, y, z], [x, y - 1, z]),
        (2, _) => ([x, y, z], [x - 1, y - 1, z]),
        _ => unreachable!(),
    }
}

fn site_geometry(m: &crate::fusion::Measurement, class: u8) -> ([i32; 3], [i32; 3]) {
    match m.site {
        Site::Fuse(e) => nominal_cells(e.edge_axis(), e.pos, class),
        Site::FuseLong(p, a) => nominal_cells(a, p.pos, class),
        Site::Stub(v, r) => {
            let a = ring_axis(r);
            let mut base = v.pos;
            if !ring_positive(r) {
                base[a] -= 1;
            }
            let cls = match m.basis {
                Basis::X | Basis::Y => 0,
                Basis::Z => 1,
                _ => class,
            };
            nominal_cells(a, base, cls)
        }
    }
}

pub fn build_graph(
    net: &FusionNetwork,
    checks: Vec<Check>,
    sheets: Vec<Vec<(usize, u8)>>,
) -> Result<SyndromeGraph, CompileError> {
    let mut claims: HashMap<(usize, u8), Vec<usize>> = HashMap::new();
    for (ci, c) in checks.iter().enumerate() {
        for &o in &c.outcomes {
            claims.entry(o).or_default().push(ci);
        }
    }
    let mut edges = Vec::new();
    for (mi, m) in net.measurements.iter().enumerate() {
        let classes: &[u8] = match m.basis {
            Basis::Fusion | Basis::Port(_) => &[0, 1],
            _ => &[0],
        };
        for &class in classes {
            let claimants = claims.get(&(mi, class)).map(|v| v.as_slice()).unwrap_or(&[]);
            let (a, b) = match claimants {
                // open port outcomes stay as sink-only edges so membranes can
                // terminate on them; other unclaimed outcomes are pure gauge
                // (no deterministic correlation uses them) and drop
                [] if matches!(m.basis, Basis::Port(_)) => (checks.len(), None),
                [] => continue,
                [a] => (*a, None),
                [a, b] => (*a, Some(*b)),
                more => {
                    return Err(CompileError::OverClaimed(
                        format!("{:?} class {class}", m.site),
                        more.len(),
                    ))
                }
            };
            let (p0, p1) = site_geometry(m, class);
            edges.push(Edge {
                meas: mi,
                class,
                a,
                b,
                perfect: matches!(m.basis, Basis::Port(_)),
                p0,
                p1,
            });
        }
    }
    let mut adj = vec![Vec::new(); checks.len()];
    for (ei, e) in edges.iter().enumerate() {
        if e.a >= checks.len() {
            continue;
        }
        adj[e.a].push(ei);
        if let Some(b) = e.b {
            if b != e.a {
                adj[b].push(ei);
            }
        }
    }
    Ok(SyndromeGraph { checks, sheets, edges, adj })
}

/// A logical membrane mask: a set of edges with even overlap with every
/// check's edge star. Odd overlap with the realized error chain flips the
/// logical outcome.
#[derive(Clone, Debug)]
pub struct Mask {
    pub name: String,
    pub edges: Vec<bool>,
}

impl Mask {
    pub fn from_predicate(
        name: &str,
        g: &SyndromeGraph,
        pred: impl Fn(&Edge) -> bool,
    ) -> Mask {
        Mask {
            name: name.to_string(),
            edges: g.edges.iter().map(|e| pred(e)).collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.edges.iter().filter(|&&b| b).count()
    }

    /// Check indices with odd overlap (must be empty for a valid mask).
    pub fn odd_checks(&self, g: &SyndromeGraph) -> Vec<usize> {
        let mut par = vec![0u8; g.checks.len()];
        for (ei, e) in g.edges.iter().enumerate() {
            if !self.edges[ei] {
                continue;
            }
            if e.a < par.len() {
                par[e.a] ^= 1;
            }
            if let Some(b) = e.b {
                par[b] ^= 1;
            }
        }
        (0..par.len()).filter(|&i| par[i] == 1).collect()
    }
}

/// Does an edge cross the lattice plane normal to `axis` between coordinates
/// `low` and `low+1`, identified modulo the extent when the axis wraps?
pub fn crosses_plane(
    e: &Edge,
    axis: usize,
    low: i32,
    extents: [usize; 3],
    periodic: [bool; 3],
) -> bool {
    let n = extents[axis] as i32;
    let (c0, c1) = (e.p0[axis], e.p1[axis]);
    let (m, hi) = (c0.min(c1), c0.max(c1));
    if hi != m + 1 {
        return false;
    }
    if periodic[axis] {
        (m - low).rem_euclid(n) == 0
    } else {
        m == low
    }
}

pub fn cell_parity(p: [i32; 3]) -> u8 {
    ((p[0] + p[1] + p[2]).rem_euclid(2)) as u8
}

/// Human-readable deterministic dump of a graph, for golden tests.
pub fn dump_graph(net: &FusionNetwork, g: &SyndromeGraph) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    writeln!(s, "checks {}", g.checks.len()).unwrap();
    for c in &g.checks {
        writeln!(s, "  {:?} deg {}", c.kind, c.outcomes.len()).unwrap();
    }
    writeln!(s, "edges {}", g.edges.len()).unwrap();
    for e in &g.edges {
        let m = &net.measurements[e.meas];
        let site = match m.site {
            Site::Fuse(c) => format!("fuse {:?} a{}", c.pos, c.edge_axis()),
            Site::FuseLong(c, a) => format!("long {:?} a{}", c.pos, a),
            Site::Stub(v, r) => format!("stub {:?} r{}", v.pos, r),
        };
        writeln!(
            s,
            "  {site} c{} {:?} -> {} {}",
            e.class,
            m.basis,
            e.a,
            e.b.map(|b| b.to_string()).unwrap_or_else(|| "virt".into()),
        )
        .unwrap();
    }
    s
}

/// Degree histogram over real checks, for structural tests.
pub fn degree_histogram(g: &SyndromeGraph) -> HashMap<usize, usize> {
    let mut h = HashMap::new();
    for a in &g.adj {
        *h.entry(a.len()).or_insert(0) += 1;
    }
    h
}


