//! Independent algebraic verification of the compiled network.
//!
//! The resource-state stabilizer group is a direct product of one six-qubit
//! ring group per vertex, so membership and reduction factor per vertex:
//! a Pauli word is reduced modulo the span of the six ring generators on each
//! vertex independently. Each check's claimed outcomes are multiplied back
//! into a word and must reduce to the identity; a membrane mask's outcome
//! product must reduce to letters supported on open port qubits only, where
//! it is the logical correlation the membrane defines. None of this consults
//! the corner-operator tables used by the compiler.

use crate::fusion::{Basis, FusionNetwork};
use crate::graph::{Mask, SyndromeGraph};
use crate::pauli::{Letter, PauliWord};

/// Ring generator i as a 12-bit word on one vertex: x-part bits 0..6,
/// z-part bits 6..12. K_i = Z_{i-1} X_i Z_{i+1}.
fn ring_gen(i: usize) -> u16 {
    let x = 1u16 << i;
    let z = (1u16 << ((i + 5) % 6)) | (1u16 << ((i + 1) % 6));
    x | (z << 6)
}

/// Row-echelon basis of the six ring generators, computed once.
fn ring_echelon() -> [u16; 6] {
    let mut rows: Vec<u16> = (0..6).map(ring_gen).collect();
    let mut basis: Vec<u16> = Vec::new();
    for mut r in rows.drain(..) {
        for &b in &basis {
            let pivot = 15 - b.leading_zeros() as i32;
            if (r >> pivot) & 1 == 1 {
                r ^= b;
            }
        }
        if r != 0 {
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut out = [0u16; 6];
    out[..basis.len()].copy_from_slice(&basis);
    out
}

/// Reduce a 12-bit one-vertex word modulo the ring span.
fn reduce_vertex(mut w: u16, basis: &[u16; 6]) -> u16 {
    for &b in basis {
        if b == 0 {
            continue;
        }
        let pivot = 15 - b.leading_zeros() as i32;
        if (w >> pivot) & 1 == 1 {
            w ^= b;
        }
    }
    w
}

/// Reduce a full word modulo the resource group (vertex by vertex).
pub fn reduce_mod_resource(net: &FusionNetwork, w: &PauliWord) -> PauliWord {
    let basis = ring_echelon();
    let mut out = PauliWord::identity(w.n);
    for vi in 0..net.vertices.len() {
        let mut local = 0u16;
        for r in 0..6 {
            let q = vi * 6 + r;
            if let Some(l) = w.letter(q) {
                let (x, z) = match l {
                    Letter::X => (1, 0),
                    Letter::Z => (0, 1),
                    Letter::Y => (1, 1),
                };
                local |= (x as u16) << r;
                local |= (z as u16) << (6 + r);
            }
        }
        if local == 0 {
            continue;
        }
        let red = reduce_vertex(local, &basis);
        for r in 0..6 {
            let x = (red >> r) & 1 == 1;
            let z = (red >> (6 + r)) & 1 == 1;
            if let Some(l) = Letter::from_bits(x, z) {
                out.xor_letter(vi * 6 + r, l);
            }
        }
    }
    out
}

/// The Pauli operator whose eigenvalue a given outcome reports.
pub fn outcome_operator(net: &FusionNetwork, meas: usize, class: u8) -> PauliWord {
    let n = net.vertices.len() * 6;
    let m = &net.measurements[meas];
    let qs = net.site_qubits(m);
    let mut w = PauliWord::identity(n);
    match m.basis {
        Basis::Fusion => {
            let l = if class == 0 { Letter::X } else { Letter::Z };
            w.xor_letter(qs[0], l);
            w.xor_letter(qs[1], l);
        }
        Basis::X => w.xor_letter(qs[0], Letter::X),
        Basis::Z => w.xor_letter(qs[0], Letter::Z),
        Basis::Y => w.xor_letter(qs[0], Letter::Y),
        Basis::Port(_) => {
            let l = if class == 0 { Letter::X } else { Letter::Z };
            w.xor_letter(qs[0], l);
        }
    }
    w
}

/// Reconstruct a check's word from its claimed outcomes.
pub fn check_word(net: &FusionNetwork, g: &SyndromeGraph, ci: usize) -> PauliWord {
    let n = net.vertices.len() * 6;
    let mut w = PauliWord::identity(n);
    for &(mi, class) in &g.checks[ci].outcomes {
        w.mul_assign(&outcome_operator(net, mi, class));
    }
    w
}

/// Indices of checks that are not resource-state stabilizers (must be empty).
pub fn bad_checks(net: &FusionNetwork, g: &SyndromeGraph) -> Vec<usize> {
    (0..g.checks.len())
        .filter(|&ci| !reduce_mod_resource(net, &check_word(net, g, ci)).is_identity())
        .collect()
}

/// Qubit indices left open on ports, with their port id.
pub fn port_qubits(net: &FusionNetwork) -> Vec<(usize, u8)> {
    net.measurements
        .iter()
        .filter_map(|m| match m.basis {
            Basis::Port(p) => Some((net.site_qubits(m)[0], p)),
            _ => None,
        })
        .collect()
}

/// Port ring of each vertex that hosts an open port qubit.
fn port_rings(net: &FusionNetwork) -> std::collections::HashMap<usize, usize> {
    let mut out = std::collections::HashMap::new();
    for m in &net.measurements {
        if let (crate::fusion::Site::Stub(v, r), Basis::Port(_)) = (m.site, m.basis) {
            out.insert(net.vertex_index[&v], r as usize);
        }
    }
    out
}

/// Multiply out a mask's outcome operators and align the result with the open
/// port qubits: on each vertex the word must lie in the coset of the ring
/// span picked out by a single letter on the vertex's port ring (identity on
/// vertices without one). Returns that port-supported representative.
pub fn membrane_residue(
    net: &FusionNetwork,
    g: &SyndromeGraph,
    mask: &Mask,
) -> Result<PauliWord, String> {
    let n = net.vertices.len() * 6;
    let mut w = PauliWord::identity(n);
    for (ei, e) in g.edges.iter().enumerate() {
        if mask.edges[ei] {
            w.mul_assign(&outcome_operator(net, e.meas, e.class));
        }
    }
    let basis = ring_echelon();
    let ports = port_rings(net);
    let mut out = PauliWord::identity(n);
    let mut leaks = 0usize;
    for vi in 0..net.vertices.len() {
        let mut local = 0u16;
        for r in 0..6 {
            if let Some(l) = w.letter(vi * 6 + r) {
                let (x, z) = match l {
                    Letter::X => (1u16, 0u16),
                    Letter::Z => (0, 1),
                    Letter::Y => (1, 1),
                };
                local |= x << r;
                local |= z << (6 + r);
            }
        }
        if reduce_vertex(local, &basis) == 0 {
            continue;
        }
        let Some(&p) = ports.get(&vi) else {
            leaks += 1;
            continue;
        };
        let cands = [
            (Letter::X, 1u16 << p),
            (Letter::Z, 1u16 << (6 + p)),
            (Letter::Y, (1u16 << p) | (1u16 << (6 + p))),
        ];
        match cands.iter().find(|&&(_, c)| reduce_vertex(local ^ c, &basis) == 0) {
            Some(&(l, _)) => out.xor_letter(vi * 6 + p, l),
            None => leaks += 1,
        }
    }
    if leaks > 0 {
        return Err(format!("residue leaks onto {leaks} non-port vertices"));
    }
    Ok(out)
}

/// Restriction of a residue to one port: (qubit, letter) pairs.
pub fn port_restriction(net: &FusionNetwork, w: &PauliWord, port: u8) -> Vec<(usize, Letter)> {
    port_qubits(net)
        .into_iter()
        .filter(|&(_, p)| p == port)
        .filter_map(|(q, _)| w.letter(q).map(|l| (q, l)))
        .collect()
}

/// True when the word is supported on port qubits only.
pub fn port_supported(net: &FusionNetwork, w: &PauliWord) -> bool {
    let ports: std::collections::HashSet<usize> =
        port_qubits(net).into_iter().map(|(q, _)| q).collect();
    w.support().iter().all(|(q, _)| ports.contains(q))
}

/// Find every membrane supported on a candidate edge set, by linear algebra.
///
/// Unknowns are candidate-edge memberships. Constraints: each real check
/// stays even, and on each touched vertex the accumulated outcome letters lie
/// in the ring span (extended by single-letter freedom on the vertex's port
/// ring). Every nullspace vector is therefore a membrane; the full basis is
/// returned, mixing logical sheets with small ones whose residue is merely a
/// stabilizer of the output patch. Use [`independent_masks`] to quotient the
/// latter out.
pub fn solve_membranes(
    net: &FusionNetwork,
    g: &SyndromeGraph,
    candidates: &[usize],
    prefix: &str,
) -> Vec<Mask> {
    let mut cand: Vec<usize> = candidates.to_vec();
    cand.sort_unstable();
    cand.dedup();
    let n = cand.len();
    if n == 0 {
        return Vec::new();
    }
    let ports = port_rings(net);

    // letters each candidate deposits on each vertex, as 12-bit words
    let mut vertex_letters: std::collections::BTreeMap<usize, Vec<(usize, u16)>> =
        std::collections::BTreeMap::new();
    for (j, &ei) in cand.iter().enumerate() {
        let e = &g.edges[ei];
        let w = outcome_operator(net, e.meas, e.class);
        let mut per_v: std::collections::BTreeMap<usize, u16> = std::collections::BTreeMap::new();
        for (q, l) in w.support() {
            let (x, z) = match l {
                Letter::X => (1u16, 0u16),
                Letter::Z => (0, 1),
                Letter::Y => (1, 1),
            };
            let r = q % 6;
            let entry = per_v.entry(q / 6).or_insert(0);
            *entry |= x << r;
            *entry |= z << (6 + r);
        }
        for (v, bits) in per_v {
            vertex_letters.entry(v).or_default().push((j, bits));
        }
    }

    let words = n.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = Vec::new();

    // per-vertex subspace constraints
    for (&v, letters) in &vertex_letters {
        let mut allowed: Vec<u16> = (0..6).map(ring_gen).collect();
        if let Some(&p) = ports.get(&v) {
            allowed.push(1u16 << p);
            allowed.push(1u16 << (6 + p));
        }
        for h in orthogonal_complement(&allowed) {
            let mut row = vec![0u64; words];
            let mut nz = false;
            for &(j, bits) in letters {
                if (h & bits).count_ones() % 2 == 1 {
                    row[j / 64] ^= 1u64 << (j % 64);
                    nz = true;
                }
            }
            if nz {
                rows.push(row);
            }
        }
    }
    // check parity constraints
    let nc = g.checks.len();
    let mut check_rows: std::collections::BTreeMap<usize, Vec<u64>> =
        std::collections::BTreeMap::new();
    for (j, &ei) in cand.iter().enumerate() {
        let e = &g.edges[ei];
        for end in [Some(e.a), e.b] {
            if let Some(c) = end {
                if c < nc {
                    check_rows.entry(c).or_insert_with(|| vec![0u64; words])[j / 64] ^=
                        1u64 << (j % 64);
                }
            }
        }
    }
    rows.extend(check_rows.into_values().filter(|r| r.iter().any(|&w| w != 0)));

    // nullspace of the row system
    let basis = nullspace(&mut rows, n, words);

    let mut out: Vec<Mask> = Vec::new();
    for (k, sol) in basis.iter().enumerate() {
        let mut edges = vec![false; g.edges.len()];
        for (j, &ei) in cand.iter().enumerate() {
            if (sol[j / 64] >> (j % 64)) & 1 == 1 {
                edges[ei] = true;
            }
        }
        out.push(Mask { name: format!("{prefix}_{k}"), edges });
    }
    out
}

/// Row-reduced GF(2) span over bitset rows, for incremental rank tests.
struct BitSpan {
    words: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl BitSpan {
    fn new(words: usize) -> Self {
        BitSpan { words, rows: Vec::new(), pivots: Vec::new() }
    }

    fn reduce(&self, v: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if (v[p / 64] >> (p % 64)) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
    }

    /// Reduce and insert; returns false when the vector was already spanned.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
        else {
            return false;
        };
        for row in &mut self.rows {
            if (row[p / 64] >> (p % 64)) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
        }
        debug_assert_eq!(self.words, v.len());
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

/// Keep the masks that adjudicate independently.
///
/// Two masks flip together on every undetectable error pattern exactly when
/// their fallible-edge indicators differ by a sum of check stars, so each
/// indicator is reduced modulo the check-star row space and masks with
/// dependent residues are dropped. This quotients out sheets that only
/// measure a stabilizer of the output patch.
pub fn independent_masks(g: &SyndromeGraph, masks: Vec<Mask>) -> Vec<Mask> {
    let ne = g.edges.len();
    let words = ne.div_ceil(64).max(1);
    let mut span = BitSpan::new(words);
    for (c, _) in g.checks.iter().enumerate() {
        let mut row = vec![0u64; words];
        for (ei, e) in g.edges.iter().enumerate() {
            if !e.perfect && (e.a == c || e.b == Some(c)) {
                row[ei / 64] ^= 1u64 << (ei % 64);
            }
        }
        span.insert(row);
    }
    let mut out = Vec::new();
    for mask in masks {
        let mut v = vec![0u64; words];
        for (ei, e) in g.edges.iter().enumerate() {
            if mask.edges[ei] && !e.perfect {
                v[ei / 64] ^= 1u64 << (ei % 64);
            }
        }
        if span.insert(v) {
            out.push(mask);
        }
    }
    out
}

/// Drop masks whose residue carries no logical action on the ports.
///
/// A residue can be a stabilizer sheet of the output patches: it is confined
/// to the ports but acts trivially on the encoded qubits, so the mask is a
/// check of the composite network rather than a membrane. The stabilizer
/// group of the joint output state is spanned by the port restrictions of
/// the built checks (including check products that link the ports), so a
/// residue is trivial exactly when it lies in that span. Returns a basis of
/// masks whose residues are independent modulo the trivial span.
pub fn logical_masks(
    net: &FusionNetwork,
    g: &SyndromeGraph,
    masks: Vec<Mask>,
) -> Result<Vec<Mask>, String> {
    if masks.is_empty() {
        return Ok(masks);
    }
    let ports = port_qubits(net);
    let index: std::collections::HashMap<usize, usize> =
        ports.iter().enumerate().map(|(i, &(q, _))| (q, i)).collect();
    let words = (2 * ports.len()).div_ceil(64);
    // symplectic coordinates over the port qubits: bit 2i is X, 2i+1 is Z
    let to_bits = |w: &PauliWord| -> Vec<u64> {
        let mut v = vec![0u64; words];
        for (q, l) in w.support() {
            if let Some(&i) = index.get(&q) {
                if matches!(l, Letter::X | Letter::Y) {
                    v[2 * i / 64] ^= 1 << (2 * i % 64);
                }
                if matches!(l, Letter::Z | Letter::Y) {
                    v[(2 * i + 1) / 64] ^= 1 << ((2 * i + 1) % 64);
                }
            }
        }
        v
    };
    let mut span = BitSpan::new(words);
    let outcome_sets = g
        .checks
        .iter()
        .map(|c| c.outcomes.as_slice())
        .chain(g.sheets.iter().map(|s| s.as_slice()));
    for outcomes in outcome_sets {
        let mut w = PauliWord::identity(net.vertices.len() * 6);
        for &(meas, class) in outcomes {
            w.mul_assign(&outcome_operator(net, meas, class));
        }
        span.insert(to_bits(&w));
    }
    for &p in ports.iter().map(|(_, p)| p).collect::<std::collections::BTreeSet<_>>().iter() {
        for v in port_sheet_span(net, *p, &index, words) {
            span.insert(v);
        }
    }
    let mut out = Vec::new();
    for m in masks {
        // the raw mask word is itself a measurable product, so its letters on
        // the port qubits are directly comparable with the trivial span; the
        // canonical residue is gauge-shifted by unmeasured ring elements
        let mut w = PauliWord::identity(net.vertices.len() * 6);
        for (ei, e) in g.edges.iter().enumerate() {
            if m.edges[ei] {
                w.mul_assign(&outcome_operator(net, e.meas, e.class));
            }
        }
        let r = membrane_residue(net, g, &m)?;
        w.mul_assign(&r);
        if span.insert(to_bits(&w)) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Port restrictions of every deterministic measurement product confined to
/// `port`: products of resource six-ring generators whose mismatch bits and
/// letters on all other ports cancel. These span the stabilizer group of the
/// output patch on `port`, whether or not the products are claimable checks.
/// Rows track only (obstruction bits, port letters), so the elimination never
/// materializes the bulk words.
fn port_sheet_span(
    net: &FusionNetwork,
    port: u8,
    index: &std::collections::HashMap<usize, usize>,
    words: usize,
) -> Vec<Vec<u64>> {
    type Sig = std::collections::BTreeSet<(usize, u8)>;
    let dead: std::collections::HashSet<usize> = net
        .dead
        .iter()
        .filter_map(|v| net.vertex_index.get(v).copied())
        .collect();
    let mut pivots: std::collections::BTreeMap<(usize, u8), (Sig, Vec<u64>)> = Default::default();
    let mut out = Vec::new();
    for vi in 0..net.vertices.len() {
        if dead.contains(&vi) {
            continue;
        }
        for i in 0..6usize {
            // K_i = Z_{i-1} X_i Z_{i+1} on the rings of vertex vi
            let mut sig: Sig = Default::default();
            let mut bits = vec![0u64; words];
            for (r, x, z) in
                [(i, true, false), ((i + 5) % 6, false, true), ((i + 1) % 6, false, true)]
            {
                let q = vi * 6 + r;
                let Some(&mi) = net.qubit_site.get(&q) else { continue };
                let (b0, b1) = match net.measurements[mi].basis {
                    Basis::Fusion => (x, z),
                    Basis::X => (false, z),
                    Basis::Z => (x, false),
                    Basis::Y => (x ^ z, false),
                    Basis::Port(p) if p == port => {
                        let pi = index[&q];
                        if x {
                            bits[2 * pi / 64] ^= 1 << (2 * pi % 64);
                        }
                        if z {
                            bits[(2 * pi + 1) / 64] ^= 1 << ((2 * pi + 1) % 64);
                        }
                        (false, false)
                    }
                    Basis::Port(_) => (x, z),
                };
                if b0 {
                    let e = sig.insert((mi, 0));
                    if !e {
                        sig.remove(&(mi, 0));
                    }
                }
                if b1 {
                    let e = sig.insert((mi, 1));
                    if !e {
                        sig.remove(&(mi, 1));
                    }
                }
            }
            loop {
                let Some(&p) = sig.iter().next() else {
                    out.push(bits);
                    break;
                };
                match pivots.get(&p) {
                    Some((psig, pbits)) => {
                        sig = sig.symmetric_difference(psig).copied().collect();
                        for (a, b) in bits.iter_mut().zip(pbits) {
                            *a ^= b;
                        }
                    }
                    None => {
                        pivots.insert(p, (sig, bits));
                        break;
                    }
                }
            }
        }
    }
    out
}

/// Vectors h with h . v = 0 for every v in the span of `gens` (12-bit words).
fn orthogonal_complement(gens: &[u16]) -> Vec<u16> {
    // nullspace of the gens-by-12 matrix
    let mut rows: Vec<u16> = gens.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for col in 0..12 {
        if let Some(p) = (r..rows.len()).find(|&i| (rows[i] >> col) & 1 == 1) {
            rows.swap(r, p);
            let row = rows[r];
            for (i, other) in rows.iter_mut().enumerate() {
                if i != r && (*other >> col) & 1 == 1 {
                    *other ^= row;
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    rows.truncate(r);
    let mut out = Vec::new();
    for free in (0..12).filter(|c| !pivots.contains(c)) {
        let mut h = 1u16 << free;
        for (i, &p) in pivots.iter().enumerate() {
            if (rows[i] >> free) & 1 == 1 {
                h |= 1u16 << p;
            }
        }
        out.push(h);
    }
    out
}

/// Nullspace basis of a GF(2) row system over `n` unknowns.
fn nullspace(rows: &mut Vec<Vec<u64>>, n: usize, words: usize) -> Vec<Vec<u64>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0usize;
    for col in 0..n {
        let (w, b) = (col / 64, col % 64);
        if let Some(p) = (rank..rows.len()).find(|&i| (rows[i][w] >> b) & 1 == 1) {
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (i, other) in rows.iter_mut().enumerate() {
                if i != rank && (other[w] >> b) & 1 == 1 {
                    for (o, pv) in other.iter_mut().zip(&pivot_row) {
                        *o ^= pv;
                    }
                }
            }
            pivot_of_col[col] = Some(rank);
            rank += 1;
        }
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| pivot_of_col[c].is_none()) {
        let mut sol = vec![0u64; words];
        sol[free / 64] |= 1u64 << (free % 64);
        for col in 0..n {
            if let Some(r) = pivot_of_col[col] {
                if (rows[r][free / 64] >> (free % 64)) & 1 == 1 {
                    sol[col / 64] |= 1u64 << (col % 64);
                }
            }
        }
        basis.push(sol);
    }
    basis
}

/// Full membrane certificate: mask is a cycle and its residue sits on ports.
pub fn verify_membrane(net: &FusionNetwork, g: &SyndromeGraph, mask: &Mask) -> Result<PauliWord, String> {
    let odd = mask.odd_checks(g);
    if !odd.is_empty() {
        return Err(format!("mask {} odd on {} checks", mask.name, odd.len()));
    }
    membrane_residue(net, g, mask).map_err(|e| format!("mask {}: {e}", mask.name))
}
