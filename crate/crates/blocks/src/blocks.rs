//! Block library: constructors for the supported logical blocks, their
//! compilation to syndrome graphs, and membrane mask extraction.
//!
//! Mask extraction is mostly algorithmic rather than hard-coded geometry:
//! a logical string is seeded on an input port's perfect edges and swept
//! through the block layer by layer, toggling edges so every real check keeps
//! even overlap. Whatever surface the sweep produces is then certified
//! independently: it must have even overlap with every check and its
//! outcome product must reduce, modulo the resource-state span, to Pauli
//! letters supported on port qubits only.

use crate::cell::CellId;
use crate::checks::build_checks;
use crate::fusion::{assign_measurements, CompileError, FusionNetwork};
use crate::graph::{build_graph, cell_parity, crosses_plane, Edge, Mask, SyndromeGraph};
use crate::verify::{independent_masks, logical_masks, solve_membranes, verify_membrane};
use crate::template::{
    BlockKind, FaceLabel, Port, Template, TemplateError,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum BlockError {
    #[error("template: {0}")]
    Template(#[from] TemplateError),
    #[error("compile: {0}")]
    Compile(#[from] CompileError),
    #[error("mask extraction: {0}")]
    Mask(String),
    #[error("unsupported distance {1} for {0}: {2}")]
    BadDistance(BlockKind, u32, String),
}

pub struct Block {
    pub kind: BlockKind,
    pub d: u32,
    pub template: Template,
    pub net: FusionNetwork,
    pub graph: SyndromeGraph,
    pub masks: Vec<Mask>,
}

pub fn compile(t: &Template) -> Result<(FusionNetwork, SyndromeGraph), BlockError> {
    let net = assign_measurements(t)?;
    let (checks, sheets) = build_checks(t, &net)?;
    let graph = build_graph(&net, checks, sheets)?;
    Ok((net, graph))
}

pub fn build_block(kind: BlockKind, d: u32) -> Result<Block, BlockError> {
    let template = build_template(kind, d)?;
    template.validate()?;
    let (net, graph) = compile(&template)?;
    let masks = extract_masks(kind, d, &template, &net, &graph)?;
    for m in &masks {
        let odd = m.odd_checks(&graph);
        if !odd.is_empty() {
            return Err(BlockError::Mask(format!(
                "mask {} has odd overlap with {} checks (first: {:?})",
                m.name,
                odd.len(),
                graph.checks[odd[0]].kind
            )));
        }
    }
    Ok(Block { kind, d, template, net, graph, masks })
}

// ---------------------------------------------------------------------------
// Template constructors
// ---------------------------------------------------------------------------

/// Remove a region of volumes from the live block: a vertex dies when every
/// volume incident to it is either carved out or outside the complex.
fn carve_voids(t: &mut Template, void: impl Fn([i32; 3]) -> bool) {
    let ext = t.complex.extents;
    let inside = |p: [i32; 3]| -> bool {
        (0..3).all(|a| p[a] >= 0 && p[a] < ext[a] as i32)
    };
    for x in 0..=ext[0] as i32 {
        for y in 0..=ext[1] as i32 {
            for z in 0..=ext[2] as i32 {
                let v = [x, y, z];
                let all_gone = (0..8).all(|i| {
                    let c = [v[0] - (i & 1), v[1] - ((i >> 1) & 1), v[2] - ((i >> 2) & 1)];
                    !inside(c) || void(c)
                });
                if all_gone {
                    t.voids.insert(CellId::vertex(v));
                }
            }
        }
    }
}

fn base_template(kind: BlockKind, d: u32, extents: [usize; 3], periodic: [bool; 3]) -> Template {
    Template {
        kind,
        distance: d as usize,
        complex: crate::cell::CubicalComplex { extents, periodic },
        faces: BTreeMap::new(),
        voids: Default::default(),
        ports: Vec::new(),
    }
}

/// Label a full axis-normal rectangle of faces.
fn label_rect(
    t: &mut Template,
    normal: usize,
    plane: i32,
    lo: [i32; 2],
    hi: [i32; 2],
    label: impl Fn([i32; 3]) -> Option<FaceLabel>,
) {
    let tang: Vec<usize> = (0..3).filter(|&a| a != normal).collect();
    for u in lo[0]..hi[0] {
        for v in lo[1]..hi[1] {
            let mut pos = [0i32; 3];
            pos[normal] = plane;
            pos[tang[0]] = u;
            pos[tang[1]] = v;
            if let Some(l) = label(pos) {
                t.faces.insert(CellId::face(pos, normal), l);
            }
        }
    }
}

fn add_port(t: &mut Template, id: u8, axis: usize, plane: i32, lo: [i32; 2], hi: [i32; 2]) {
    label_rect(t, axis, plane, lo, hi, |_| Some(FaceLabel::Port(id)));
    t.ports.push(Port { id, axis, plane, side: if plane == 0 { -1 } else { 1 } });
}

pub fn build_template(kind: BlockKind, d: u32) -> Result<Template, BlockError> {
    if d < 2 {
        return Err(BlockError::BadDistance(kind, d, "d must be at least 2".into()));
    }
    // open blocks use a d-cell cross-section: the cheapest undetectable
    // chains hug a boundary at cost equal to the extent, so the extent is
    // what sets the fault distance
    let n = d as i32;
    let nu = n as usize;
    Ok(match kind {
        BlockKind::Torus3 => {
            if d % 2 != 0 {
                return Err(BlockError::BadDistance(
                    kind,
                    d,
                    "3-torus needs even d for a consistent checkerboard".into(),
                ));
            }
            base_template(kind, d, [d as usize; 3], [true; 3])
        }
        BlockKind::Identity => {
            let mut t = base_template(kind, d, [nu; 3], [false; 3]);
            add_port(&mut t, 1, 2, 0, [0, 0], [n, n]);
            add_port(&mut t, 2, 2, n, [0, 0], [n, n]);
            for plane in [0, n] {
                label_rect(&mut t, 0, plane, [0, 0], [n, n], |_| Some(FaceLabel::PrimalBoundary));
                label_rect(&mut t, 1, plane, [0, 0], [n, n], |_| Some(FaceLabel::DualBoundary));
            }
            t
        }
        BlockKind::Phase => {
            // long identity block with a spacelike half-sheet wall ending in a
            // twist row; boundary labels swap in the region swept past the wall
            let (wy, wz) = (2 * n, 2 * n);
            let (y_t, z_w) = (n, n);
            let mut t = base_template(kind, d, [nu, 2 * nu, 2 * nu], [false; 3]);
            add_port(&mut t, 1, 2, 0, [0, 0], [n, wy]);
            add_port(&mut t, 2, 2, wz, [0, 0], [n, wy]);
            label_rect(&mut t, 2, z_w, [0, 0], [n, y_t], |_| Some(FaceLabel::DomainWall));
            let swapped = |pos: [i32; 3]| pos[2] >= z_w && pos[1] < y_t;
            for plane in [0, n] {
                label_rect(&mut t, 0, plane, [0, 0], [wy, wz], |p| {
                    Some(if swapped(p) { FaceLabel::DualBoundary } else { FaceLabel::PrimalBoundary })
                });
            }
            for plane in [0, wy] {
                label_rect(&mut t, 1, plane, [0, 0], [n, wz], |p| {
                    Some(if swapped(p) { FaceLabel::PrimalBoundary } else { FaceLabel::DualBoundary })
                });
            }
            t
        }
        BlockKind::Hadamard => {
            // boundary types rotate a quarter turn around the block as the
            // time coordinate advances: four cornerlines migrate in staircases
            let mut t = base_template(kind, d, [nu; 3], [false; 3]);
            add_port(&mut t, 1, 2, 0, [0, 0], [n, n]);
            add_port(&mut t, 2, 2, n, [0, 0], [n, n]);
            let pb = FaceLabel::PrimalBoundary;
            let db = FaceLabel::DualBoundary;
            // south face y=0: SW cornerline migrates +x with z
            label_rect(&mut t, 1, 0, [0, 0], [n, n], |p| {
                Some(if p[0] < p[2] { pb } else { db })
            });
            // east face x=n: SE cornerline migrates +y with z
            label_rect(&mut t, 0, n, [0, 0], [n, n], |p| {
                Some(if p[1] < p[2] { db } else { pb })
            });
            // north face y=n: NE cornerline migrates -x with z
            label_rect(&mut t, 1, n, [0, 0], [n, n], |p| {
                Some(if p[0] >= n - p[2] { pb } else { db })
            });
            // west face x=0: NW cornerline migrates -y with z
            label_rect(&mut t, 0, 0, [0, 0], [n, n], |p| {
                Some(if p[1] >= n - p[2] { db } else { pb })
            });
            t
        }
        BlockKind::LatticeSurgeryX(q) | BlockKind::LatticeSurgeryZ(q) => {
            let q = q as i32;
            if q < 1 {
                return Err(BlockError::BadDistance(kind, d, "need at least one patch".into()));
            }
            let swap = matches!(kind, BlockKind::LatticeSurgeryZ(_));
            let pb = if swap { FaceLabel::DualBoundary } else { FaceLabel::PrimalBoundary };
            let db = if swap { FaceLabel::PrimalBoundary } else { FaceLabel::DualBoundary };
            let gap = 2i32;
            let width = q * n + (q - 1) * gap;
            let (z1, z2) = (n, 2 * n);
            let mut t = base_template(kind, d, [width as usize, nu, 3 * nu], [false; 3]);
            let patch_lo = |i: i32| i * (n + gap);
            // voids: gap columns outside the merge window
            let in_gap = move |x: i32| (0..q - 1).any(|i| (patch_lo(i) + n..patch_lo(i + 1)).contains(&x));
            carve_voids(&mut t, move |p| in_gap(p[0]) && !(z1..z2).contains(&p[2]));
            for i in 0..q {
                let (lo, hi) = (patch_lo(i), patch_lo(i) + n);
                add_port(&mut t, (2 * i + 1) as u8, 2, 0, [lo, 0], [hi, n]);
                add_port(&mut t, (2 * i + 2) as u8, 2, 3 * n, [lo, 0], [hi, n]);
            }
            // outer side walls
            label_rect(&mut t, 0, 0, [0, 0], [n, 3 * n], |_| Some(pb));
            label_rect(&mut t, 0, width, [0, 0], [n, 3 * n], |_| Some(pb));
            // patch-facing gap walls outside the merge window
            for i in 0..q - 1 {
                for plane in [patch_lo(i) + n, patch_lo(i + 1)] {
                    label_rect(&mut t, 0, plane, [0, 0], [n, 3 * n], |p| {
                        if (z1..z2).contains(&p[2]) { None } else { Some(pb) }
                    });
                }
            }
            // y walls: over patches everywhere, over gaps only in the window
            for plane in [0, n] {
                label_rect(&mut t, 1, plane, [0, 0], [width, 3 * n], |p| {
                    let in_patch = (0..q).any(|i| (patch_lo(i)..patch_lo(i) + n).contains(&p[0]));
                    if in_patch || (z1..z2).contains(&p[2]) { Some(db) } else { None }
                });
            }
            // spacelike caps closing the merged gaps
            for i in 0..q - 1 {
                for plane in [z1, z2] {
                    label_rect(&mut t, 2, plane, [patch_lo(i) + n, 0], [patch_lo(i + 1), n], |_| {
                        Some(pb)
                    });
                }
            }
            t
        }
        BlockKind::Cx => {
            // target tube runs timelike (z), control tube spacelike (x),
            // crossing in a shared cube; the rest of the bounding box is void
            let w = 3 * n;
            let mut t = base_template(kind, d, [w as usize, nu, w as usize], [false; 3]);
            let tx = n..2 * n; // target tube x range
            let cz = n..2 * n; // control tube z range
            { let (tx, cz) = (tx.clone(), cz.clone()); carve_voids(&mut t, move |p| !(tx.contains(&p[0]) || cz.contains(&p[2]))); }
            add_port(&mut t, 1, 2, 0, [n, 0], [2 * n, n]); // target in
            add_port(&mut t, 2, 2, w, [n, 0], [2 * n, n]); // target out
            add_port(&mut t, 3, 0, 0, [0, n], [n, 2 * n]); // control in  (tang y,z)
            add_port(&mut t, 4, 0, w, [0, n], [n, 2 * n]); // control out
            let pb = FaceLabel::PrimalBoundary;
            let db = FaceLabel::DualBoundary;
            // y walls across the whole cross
            for plane in [0, n] {
                label_rect(&mut t, 1, plane, [0, 0], [w, w], |p| {
                    if tx.contains(&p[0]) || cz.contains(&p[2]) { Some(db) } else { None }
                });
            }
            // target tube side walls (x planes), outside the junction
            for plane in [n, 2 * n] {
                label_rect(&mut t, 0, plane, [0, 0], [n, w], |p| {
                    if cz.contains(&p[2]) { None } else { Some(pb) }
                });
            }
            // control tube side walls (z planes), outside the junction
            for plane in [n, 2 * n] {
                label_rect(&mut t, 2, plane, [0, 0], [w, n], |p| {
                    if tx.contains(&p[0]) { None } else { Some(pb) }
                });
            }
            t
        }
    })
}

// ---------------------------------------------------------------------------
// Mask extraction
// ---------------------------------------------------------------------------

fn plane_mask(
    g: &SyndromeGraph,
    name: &str,
    extents: [usize; 3],
    periodic: [bool; 3],
    axis: usize,
    low: i32,
    want: impl Fn(&Edge) -> bool,
) -> Mask {
    Mask::from_predicate(name, g, |e| {
        crosses_plane(e, axis, low, extents, periodic) && want(e)
    })
}

/// Solver candidates for a sheet through one lattice plane: the edges
/// crossing it, plus every stub and port edge so the sheet can terminate on
/// boundaries and ports while keeping boundary checks even.
fn crossing_edges(
    net: &FusionNetwork,
    g: &SyndromeGraph,
    cx: &crate::cell::CubicalComplex,
    axis: usize,
    low: i32,
) -> Vec<usize> {
    (0..g.edges.len())
        .filter(|&ei| {
            let e = &g.edges[ei];
            crosses_plane(e, axis, low, cx.extents, cx.periodic)
                || !matches!(net.measurements[e.meas].site, crate::fusion::Site::Fuse(_))
        })
        .collect()
}

/// Reduce pooled candidates to the masks that adjudicate independently,
/// verify each survivor, and insist on an exact generator count.
fn certify(
    kind: BlockKind,
    net: &FusionNetwork,
    g: &SyndromeGraph,
    found: Vec<Mask>,
    expect: usize,
) -> Result<Vec<Mask>, BlockError> {
    let kept = independent_masks(g, found);
    let kept =
        logical_masks(net, g, kept).map_err(|e| BlockError::Mask(format!("{kind}: {e}")))?;
    if kept.len() != expect {
        return Err(BlockError::Mask(format!(
            "{kind}: expected {expect} membrane generators, certified {}",
            kept.len()
        )));
    }
    for m in &kept {
        verify_membrane(net, g, m)
            .map_err(|e| BlockError::Mask(format!("{kind}: {e}")))?;
    }
    Ok(kept)
}

fn extract_masks(
    kind: BlockKind,
    d: u32,
    t: &Template,
    net: &FusionNetwork,
    g: &SyndromeGraph,
) -> Result<Vec<Mask>, BlockError> {
    let cx = &t.complex;
    let n = d as i32 - 1;
    let mut masks = Vec::new();
    match kind {
        BlockKind::Torus3 => {
            for axis in 0..3 {
                for par in 0..2u8 {
                    masks.push(plane_mask(
                        g,
                        &format!("sheet_a{axis}_p{par}"),
                        cx.extents,
                        cx.periodic,
                        axis,
                        0,
                        |e| cell_parity(e.p0) == par,
                    ));
                }
            }
        }
        BlockKind::Identity | BlockKind::Phase | BlockKind::Hadamard => {
            let cand: Vec<usize> = (0..g.edges.len()).collect();
            let found = solve_membranes(net, g, &cand, "membrane");
            masks.extend(certify(kind, net, g, found, 2)?);
        }
        BlockKind::LatticeSurgeryX(q) | BlockKind::LatticeSurgeryZ(q) => {
            let cand: Vec<usize> = (0..g.edges.len()).collect();
            let found = solve_membranes(net, g, &cand, "membrane");
            masks.extend(certify(kind, net, g, found, 2 * q as usize)?);
        }
        BlockKind::Cx => {
            // branched membranes are not confined to one plane: solve over
            // the full edge set
            let cand: Vec<usize> = (0..g.edges.len()).collect();
            let found = solve_membranes(net, g, &cand, "membrane");
            masks.extend(certify(kind, net, g, found, 4)?);
        }
    }
    Ok(masks)
}
