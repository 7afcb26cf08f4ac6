//! Check construction: cell checks, wall-merged checks, boundary face checks
//! and port phantom checks, each decomposed onto measurement outcomes.
//!
//! A cell check is the product of the eight corner operators of a unit cell;
//! in the bulk it decomposes into six XX and six ZZ fusion outcomes. Cells cut
//! by a domain wall merge with their mirror partner across it; cells behind a
//! kept boundary face or behind a port survive as truncated products over
//! their live corners, picking up single-qubit and port outcomes.

use crate::cell::{CellId, AXES};
use crate::fusion::{corner_letters, face_volumes, Basis, CompileError, FusionNetwork};
use crate::template::{parity_color, Color, FaceLabel, Template};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Bulk cell, all eight corners live.
    Cell([i32; 3]),
    /// Pair of cells merged across a wall: lower cell position, wall axis.
    Merged([i32; 3], usize),
    /// Kept boundary face and the phantom cell behind it.
    Face(CellId, [i32; 3]),
    /// Phantom cell behind a port face.
    Port(CellId, [i32; 3]),
    /// Phantom cell of the thickened complex (rims, cornerlines) whose
    /// truncated corner product happens to be fully measured.
    Rim([i32; 3]),
    /// Chain of kept faces merged along a cornerline that runs inside a
    /// surface plane; the corner stubs are measured in Y.
    Seam([i32; 3], [i32; 3]),
}

#[derive(Clone, Debug)]
pub struct Check {
    pub kind: CheckKind,
    /// Representative position for diagnostics and mask geometry.
    pub rep: [i32; 3],
    /// Claimed measurement outcomes: (measurement index, class).
    pub outcomes: Vec<(usize, u8)>,
}

/// XOR a Pauli letter onto a sparse word keyed by qubit index.
fn xor_letter(word: &mut BTreeMap<usize, (bool, bool)>, q: usize, x: bool, z: bool) {
    let e = word.entry(q).or_insert((false, false));
    e.0 ^= x;
    e.1 ^= z;
    if !e.0 && !e.1 {
        word.remove(&q);
    }
}

fn letter_bits(l: crate::pauli::Letter) -> (bool, bool) {
    match l {
        crate::pauli::Letter::X => (true, false),
        crate::pauli::Letter::Z => (false, true),
        crate::pauli::Letter::Y => (true, true),
    }
}

/// Add the corner operators of `cell` (unwrapped position) over its live
/// corners into `word`. Returns how many corners were live.
pub fn add_live_corners(
    net: &FusionNetwork,
    cell: [i32; 3],
    word: &mut BTreeMap<usize, (bool, bool)>,
) -> usize {
    let cx = &net.complex;
    let mut live = 0;
    for dx in 0..2 {
        for dy in 0..2 {
            for dz in 0..2 {
                let delta = [dx, dy, dz];
                let p = [cell[0] + dx, cell[1] + dy, cell[2] + dz];
                let v = CellId::vertex(cx.canon(p));
                if !cx.contains(&v) || net.dead.contains(&v) {
                    continue;
                }
                live += 1;
                let vi = net.vertex_index[&v];
                for (ring, l) in corner_letters(delta) {
                    let (x, z) = letter_bits(l);
                    xor_letter(word, vi * 6 + ring as usize, x, z);
                }
            }
        }
    }
    live
}

/// Decompose a Pauli word onto measurement outcomes. Fails if the word does
/// not factor through the measured bases.
pub fn decompose(
    net: &FusionNetwork,
    word: &BTreeMap<usize, (bool, bool)>,
) -> Result<Vec<(usize, u8)>, String> {
    let mut by_site: HashMap<usize, Vec<(usize, (bool, bool))>> = HashMap::new();
    for (&q, &l) in word {
        let mi = *net
            .qubit_site
            .get(&q)
            .ok_or_else(|| format!("qubit {q} unmeasured"))?;
        by_site.entry(mi).or_default().push((q, l));
    }
    let mut out = Vec::new();
    for (mi, qs) in by_site {
        let m = &net.measurements[mi];
        match m.basis {
            Basis::Fusion => {
                if qs.len() != 2 {
                    return Err(format!("dangling letter on fusion {:?}", m.site));
                }
                let (l0, l1) = (qs[0].1, qs[1].1);
                if l0 != l1 {
                    return Err(format!("mismatched letters {:?} on {:?}", (l0, l1), m.site));
                }
                match l0 {
                    (true, false) => out.push((mi, 0)),
                    (false, true) => out.push((mi, 1)),
                    (true, true) => {
                        out.push((mi, 0));
                        out.push((mi, 1));
                    }
                    _ => unreachable!(),
                }
            }
            Basis::X | Basis::Z | Basis::Y => {
                let want = match m.basis {
                    Basis::X => (true, false),
                    Basis::Z => (false, true),
                    _ => (true, true),
                };
                if qs.len() != 1 || qs[0].1 != want {
                    return Err(format!("letter {:?} on stub {:?} measured {:?}", qs[0].1, m.site, m.basis));
                }
                out.push((mi, 0));
            }
            Basis::Port(_) => {
                if qs.len() != 1 {
                    return Err("multiple letters on one port qubit".into());
                }
                match qs[0].1 {
                    (true, false) => out.push((mi, 0)),
                    (false, true) => out.push((mi, 1)),
                    (true, true) => {
                        out.push((mi, 0));
                        out.push((mi, 1));
                    }
                    _ => unreachable!(),
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Obstructions to decomposing `word` onto the measured bases, as a set of
/// GF(2) bits keyed by (measurement, component). Decomposability is linear in
/// the word: a fusion needs equal letters on its two halves (two bits), a
/// stub needs the letter to lie in {I, basis} (one bit), ports accept
/// anything. A word decomposes iff its signature is empty.
pub fn mismatch_signature(
    net: &FusionNetwork,
    word: &BTreeMap<usize, (bool, bool)>,
) -> std::collections::BTreeSet<(usize, u8)> {
    let mut acc: HashMap<usize, (bool, bool)> = HashMap::new();
    let mut sig = std::collections::BTreeSet::new();
    for (q, &(x, z)) in word {
        let Some(&mi) = net.qubit_site.get(q) else { continue };
        let e = acc.entry(mi).or_default();
        e.0 ^= x;
        e.1 ^= z;
    }
    for (mi, (x, z)) in acc {
        let bits = match net.measurements[mi].basis {
            Basis::Fusion => (x, z),
            Basis::X => (false, z),
            Basis::Z => (x, false),
            Basis::Y => (x ^ z, false),
            Basis::Port(_) => (false, false),
        };
        if bits.0 {
            sig.insert((mi, 0));
        }
        if bits.1 {
            sig.insert((mi, 1));
        }
    }
    sig
}

/// Is this unwrapped volume position a fully live cell?
fn is_live_cell(net: &FusionNetwork, pos: [i32; 3]) -> bool {
    let cx = &net.complex;
    let c = CellId::volume(cx.canon(pos));
    if !cx.contains(&c) {
        return false;
    }
    for dx in 0..2 {
        for dy in 0..2 {
            for dz in 0..2 {
                let v = CellId::vertex(cx.canon([pos[0] + dx, pos[1] + dy, pos[2] + dz]));
                if net.dead.contains(&v) {
                    return false;
                }
            }
        }
    }
    true
}

/// Corner deltas of `cell` whose vertex is dead (but inside the complex).
fn dead_corners(net: &FusionNetwork, cell: [i32; 3]) -> Vec<[i32; 3]> {
    let cx = &net.complex;
    let mut out = Vec::new();
    for dx in 0..2 {
        for dy in 0..2 {
            for dz in 0..2 {
                let v = CellId::vertex(cx.canon([cell[0] + dx, cell[1] + dy, cell[2] + dz]));
                if cx.contains(&v) && net.dead.contains(&v) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn all_wall(net: &FusionNetwork, cell: [i32; 3], deltas: &[[i32; 3]]) -> bool {
    let cx = &net.complex;
    deltas.iter().all(|d| {
        let v = CellId::vertex(cx.canon([cell[0] + d[0], cell[1] + d[1], cell[2] + d[2]]));
        net.wall.contains(&v)
    })
}

pub fn build_checks(
    t: &Template,
    net: &FusionNetwork,
) -> Result<(Vec<Check>, Vec<Vec<(usize, u8)>>), CompileError> {
    let cx = &net.complex;
    let mut checks = Vec::new();
    let mut sheets: Vec<Vec<(usize, u8)>> = Vec::new();
    let err = |kind: &CheckKind, e: String| CompileError::BadCheck(format!("{kind:?}"), e);

    // Cell checks and wall-merged checks.
    for c in cx.cells(3) {
        let pos = c.pos;
        let dead = dead_corners(net, pos);
        if dead.is_empty() {
            let kind = CheckKind::Cell(pos);
            let mut word = BTreeMap::new();
            add_live_corners(net, pos, &mut word);
            let outcomes = decompose(net, &word).map_err(|e| err(&kind, e))?;
            checks.push(Check { kind, rep: pos, outcomes });
            continue;
        }
        if !all_wall(net, pos, &dead) {
            continue; // cut by a void; surviving structure comes from face checks
        }
        // merge across the wall; emit only from the lower side
        let Some(axis) = AXES.into_iter().find(|&a| dead.iter().all(|d| d[a] == 1)) else {
            continue;
        };
        let mut partner = pos;
        partner[axis] += 1;
        let pdead = dead_corners(net, partner);
        if pdead.is_empty() || !pdead.iter().all(|d| d[axis] == 0) || !all_wall(net, partner, &pdead)
        {
            continue;
        }
        let kind = CheckKind::Merged(pos, axis);
        let mut word = BTreeMap::new();
        add_live_corners(net, pos, &mut word);
        add_live_corners(net, partner, &mut word);
        let outcomes = decompose(net, &word).map_err(|e| err(&kind, e))?;
        checks.push(Check { kind, rep: pos, outcomes });
    }

    // Boundary face checks and port phantom checks. Wall-dead corners do not
    // make a volume phantom here: the wall only thins it, and the truncated
    // corner product is still a stabilizer.
    let live_thinned = |pos: [i32; 3]| -> bool {
        let c = CellId::volume(cx.canon(pos));
        cx.contains(&c)
            && (0..8).all(|i| {
                let p = [pos[0] + (i & 1), pos[1] + ((i >> 1) & 1), pos[2] + ((i >> 2) & 1)];
                let v = CellId::vertex(cx.canon(p));
                !net.dead.contains(&v) || net.wall.contains(&v)
            })
    };
    let mut pending: Vec<([i32; 3], BTreeMap<usize, (bool, bool)>)> = Vec::new();
    // two labeled faces can expose the same phantom volume (a void corner
    // under a cap); the corner product is the same, so emit it once
    let mut phantom_seen: std::collections::BTreeSet<[i32; 3]> = Default::default();
    for (f, label) in &t.faces {
        let (lo, hi) = face_volumes(f);
        let lo_live = live_thinned(lo);
        let hi_live = live_thinned(hi);
        let phantom = match (lo_live, hi_live) {
            (true, false) => hi,
            (false, true) => lo,
            _ => continue,
        };
        let keep = match label {
            FaceLabel::Port(_) => true,
            FaceLabel::DomainWall => false,
            _ => label.boundary_color() == Some(parity_color(phantom)),
        };
        if !keep {
            continue;
        }
        // skip truncated faces at void rims: their in-plane corners die.
        // Wall-dead corners only truncate the product, which stays a valid
        // stabilizer and can terminate a seam at a transparent corner.
        let n = f.face_normal();
        let in_plane_void = (0..4).any(|i| {
            let mut p = f.pos;
            let tang: Vec<usize> = AXES.iter().copied().filter(|&a| a != n).collect();
            p[tang[0]] += i & 1;
            p[tang[1]] += (i >> 1) & 1;
            let v = CellId::vertex(cx.canon(p));
            !cx.contains(&v) || (net.dead.contains(&v) && !net.wall.contains(&v))
        });
        if in_plane_void {
            continue;
        }
        if !phantom_seen.insert(phantom) {
            continue;
        }
        let kind = match label {
            FaceLabel::Port(_) => CheckKind::Port(*f, phantom),
            _ => CheckKind::Face(*f, phantom),
        };
        let mut word = BTreeMap::new();
        let live = add_live_corners(net, phantom, &mut word);
        if live == 0 {
            continue;
        }
        match decompose(net, &word) {
            Ok(outcomes) => checks.push(Check { kind, rep: phantom, outcomes }),
            // a cornerline running inside this surface plane leaves Y-measured
            // corner stubs that no single face product matches; such faces
            // merge into a seam check below
            Err(e) => {
                if mismatch_signature(net, &word).is_empty() {
                    return Err(err(&kind, e));
                }
                pending.push((phantom, word));
            }
        }
    }

    // Seam checks: faces along a cornerline that runs inside a surface plane
    // (or against a domain wall) do not decompose one by one, but suitable
    // products of them do. Decomposability is linear in the word, so the
    // seams are exactly a nullspace basis of the stashed mismatch signatures.
    // Corner stubs end up inside a single seam, claimed once, so the line
    // absorbs composite excitations the way a twist does.
    type Sig = std::collections::BTreeSet<(usize, u8)>;
    let mut pivots: BTreeMap<(usize, u8), (Sig, std::collections::BTreeSet<usize>)> =
        BTreeMap::new();
    for i in 0..pending.len() {
        let mut sig = mismatch_signature(net, &pending[i].1);
        let mut combo: std::collections::BTreeSet<usize> = [i].into();
        while let Some(&p) = sig.iter().next() {
            let Some((psig, pcombo)) = pivots.get(&p) else { break };
            sig = sig.symmetric_difference(psig).copied().collect();
            combo = combo.symmetric_difference(pcombo).copied().collect();
        }
        if let Some(&p) = sig.iter().next() {
            pivots.insert(p, (sig, combo));
            continue;
        }
        let mut word = BTreeMap::new();
        for &j in &combo {
            for (&q, &(x, z)) in &pending[j].1 {
                xor_letter(&mut word, q, x, z);
            }
        }
        let reps: Vec<[i32; 3]> = combo.iter().map(|&j| pending[j].0).collect();
        let kind = CheckKind::Seam(reps[0], *reps.last().unwrap());
        let outcomes = decompose(net, &word).map_err(|e| err(&kind, e))?;
        checks.push(Check { kind, rep: reps[0], outcomes });
    }

    // Completion: walk every phantom cell of the thickened complex (one layer
    // past each open axis, so rim and cornerline diagonals are included) and
    // keep its truncated corner product whenever it decomposes onto measured
    // outcomes. This picks up cornerline tube checks and port-rim checks that
    // no labeled face produces. A candidate is added only if it is linearly
    // independent of the checks so far and claims no outcome a third time.
    let mut claim_count: HashMap<(usize, u8), usize> = HashMap::new();
    for c in &checks {
        for &o in &c.outcomes {
            *claim_count.entry(o).or_default() += 1;
        }
    }
    let mut basis: BTreeMap<(usize, u8), std::collections::BTreeSet<(usize, u8)>> = BTreeMap::new();
    let reduce = |mut row: std::collections::BTreeSet<(usize, u8)>,
                  basis: &BTreeMap<(usize, u8), std::collections::BTreeSet<(usize, u8)>>| {
        while let Some(&p) = row.iter().next() {
            match basis.get(&p) {
                Some(b) => row = row.symmetric_difference(b).copied().collect(),
                None => break,
            }
        }
        row
    };
    for c in &checks {
        let row = reduce(c.outcomes.iter().copied().collect(), &basis);
        if let Some(&p) = row.iter().next() {
            basis.insert(p, row);
        }
    }
    let range = |a: usize| -> std::ops::Range<i32> {
        let n = cx.extents[a] as i32;
        if cx.periodic[a] {
            0..n
        } else {
            -1..n + 1
        }
    };
    // candidates: decomposable phantom words, plus signature-null products of
    // the non-decomposable ones (a cornerline that ends on a port or rim
    // leaves Y corner stubs spanning several phantom cells)
    let mut candidates: Vec<([i32; 3], Vec<(usize, u8)>)> = Vec::new();
    let mut stash: Vec<([i32; 3], BTreeMap<usize, (bool, bool)>)> = Vec::new();
    for x in range(0) {
        for y in range(1) {
            for z in range(2) {
                let pos = [x, y, z];
                if is_live_cell(net, pos) {
                    continue;
                }
                let mut word = BTreeMap::new();
                if add_live_corners(net, pos, &mut word) == 0 {
                    continue;
                }
                match decompose(net, &word) {
                    Ok(outcomes) => candidates.push((pos, outcomes)),
                    Err(_) => stash.push((pos, word)),
                }
            }
        }
    }
    // The per-port merge pool also carries the seam stash and the built
    // checks: a port stabilizer can be a mixed product of all three.
    let mut from_check = vec![false; stash.len()];
    for (pos, word) in &pending {
        stash.push((*pos, word.clone()));
        from_check.push(false);
    }
    for c in &checks {
        let mut word = BTreeMap::new();
        for &(mi, class) in &c.outcomes {
            let m = &net.measurements[mi];
            let qs = net.site_qubits(m);
            let (x, z) = match m.basis {
                Basis::Fusion | Basis::Port(_) => {
                    if class == 0 { (true, false) } else { (false, true) }
                }
                Basis::X => (true, false),
                Basis::Z => (false, true),
                Basis::Y => (true, true),
            };
            match m.basis {
                Basis::Fusion => {
                    xor_letter(&mut word, qs[0], x, z);
                    xor_letter(&mut word, qs[1], x, z);
                }
                _ => xor_letter(&mut word, qs[0], x, z),
            }
        }
        stash.push((c.rep, word));
        from_check.push(true);
    }
    // Merge the stash once per port, eliminating the mismatch bits together
    // with the letters on every other port: the surviving products decompose
    // and touch at most one port, so they are output-patch stabilizers rather
    // than logical correlations and are safe to promote to checks.
    let all_ports: std::collections::BTreeSet<u8> = net
        .measurements
        .iter()
        .filter_map(|m| match m.basis {
            Basis::Port(p) => Some(p),
            _ => None,
        })
        .collect();
    for &port in &all_ports {
        let confined_sig = |word: &BTreeMap<usize, (bool, bool)>| -> Sig {
            let mut sig = mismatch_signature(net, word);
            for (&q, &(x, z)) in word {
                let Some(&mi) = net.qubit_site.get(&q) else { continue };
                if let Basis::Port(p) = net.measurements[mi].basis {
                    if p != port {
                        if x {
                            sig.insert((mi, 0));
                        }
                        if z {
                            sig.insert((mi, 1));
                        }
                    }
                }
            }
            sig
        };
        let mut pivots: BTreeMap<(usize, u8), (Sig, std::collections::BTreeSet<usize>)> =
            BTreeMap::new();
        for i in 0..stash.len() {
            let mut sig = confined_sig(&stash[i].1);
            let mut combo: std::collections::BTreeSet<usize> = [i].into();
            while let Some(&p) = sig.iter().next() {
                let Some((psig, pcombo)) = pivots.get(&p) else { break };
                sig = sig.symmetric_difference(psig).copied().collect();
                combo = combo.symmetric_difference(pcombo).copied().collect();
            }
            if let Some(&p) = sig.iter().next() {
                pivots.insert(p, (sig, combo));
                continue;
            }
            if combo.iter().all(|&j| from_check[j]) {
                continue; // already in the span of the built checks
            }
            let mut word = BTreeMap::new();
            for &j in &combo {
                for (&q, &(x, z)) in &stash[j].1 {
                    xor_letter(&mut word, q, x, z);
                }
            }
            if let Ok(outcomes) = decompose(net, &word) {
                candidates.push((stash[*combo.iter().next().unwrap()].0, outcomes));
            }
        }
    }
    for (pos, outcomes) in candidates {
        {
            {
                // cancel outcomes that already have two claimants by
                // multiplying with an existing check that claims them; the
                // product is still a check
                let mut set: std::collections::BTreeSet<(usize, u8)> =
                    outcomes.iter().copied().collect();
                let mut ok = false;
                for _ in 0..24 {
                    let full: Vec<(usize, u8)> = set
                        .iter()
                        .copied()
                        .filter(|o| claim_count.get(o).copied().unwrap_or(0) >= 2)
                        .collect();
                    if full.is_empty() {
                        ok = true;
                        break;
                    }
                    let before = set.clone();
                    for o in full {
                        if !set.contains(&o) {
                            continue;
                        }
                        if let Some(c) = checks.iter().find(|c| c.outcomes.contains(&o)) {
                            set = set
                                .symmetric_difference(&c.outcomes.iter().copied().collect())
                                .copied()
                                .collect();
                        }
                    }
                    if set == before || set.is_empty() {
                        break;
                    }
                }
                if set.is_empty() {
                    continue;
                }
                if !ok {
                    // deterministic but not claimable as a graph vertex:
                    // record it for membrane certification only
                    sheets.push(outcomes);
                    continue;
                }
                let row = reduce(set.clone(), &basis);
                let Some(&p) = row.iter().next() else { continue };
                basis.insert(p, row);
                for &o in &set {
                    *claim_count.entry(o).or_default() += 1;
                }
                let outcomes: Vec<(usize, u8)> = set.into_iter().collect();
                checks.push(Check { kind: CheckKind::Rim(pos), rep: pos, outcomes });
            }
        }
    }

    Ok((checks, sheets))
}

/// Color of a check by the parity of its representative cell.
pub fn check_color(c: &Check) -> Color {
    parity_color(c.rep)
}
