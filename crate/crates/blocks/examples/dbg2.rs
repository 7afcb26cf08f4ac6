//! Scratch: reduce residues modulo check port-restrictions.
use blocks::blocks::{build_template, compile};
use blocks::template::BlockKind;
use blocks::verify::{independent_masks, membrane_residue, outcome_operator, port_qubits, solve_membranes};

fn main() {
    let d: u32 = std::env::args().nth(1).unwrap().parse().unwrap();
    let t = build_template(BlockKind::Identity, d).unwrap();
    let (net, g) = compile(&t).unwrap();
    let pq: Vec<(usize, u8)> = port_qubits(&net);
    let index: std::collections::HashMap<usize, usize> =
        pq.iter().enumerate().map(|(i, &(q, _))| (q, i)).collect();
    let nb = pq.len() * 2;
    let to_vec = |w: &blocks::pauli::PauliWord| -> Vec<u64> {
        let mut v = vec![0u64; nb.div_ceil(64)];
        for (&(q, _), &i) in pq.iter().zip(index.values()) {
            let _ = (q, i);
        }
        for (q, l) in w.support() {
            if let Some(&i) = index.get(&q) {
                let (x, z) = match l {
                    blocks::pauli::Letter::X => (1, 0),
                    blocks::pauli::Letter::Z => (0, 1),
                    blocks::pauli::Letter::Y => (1, 1),
                };
                if x == 1 { v[(2 * i) / 64] ^= 1 << ((2 * i) % 64); }
                if z == 1 { v[(2 * i + 1) / 64] ^= 1 << ((2 * i + 1) % 64); }
            }
        }
        v
    };
    // echelon span
    let mut span: Vec<Vec<u64>> = Vec::new();
    let reduce = |mut v: Vec<u64>, span: &Vec<Vec<u64>>| -> Vec<u64> {
        for s in span {
            let p = s.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| (i, w.trailing_zeros())).unwrap();
            if v[p.0] >> p.1 & 1 == 1 {
                for (a, b) in v.iter_mut().zip(s) { *a ^= b; }
            }
        }
        v
    };
    let mut insert = |v: Vec<u64>, span: &mut Vec<Vec<u64>>| -> bool {
        let v = reduce(v, span);
        if v.iter().all(|w| *w == 0) { return false; }
        span.push(v);
        span.sort_by_key(|s| s.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| (i as u32) * 64 + w.trailing_zeros()).unwrap());
        true
    };
    for c in &g.checks {
        let mut w = blocks::pauli::PauliWord::identity(net.vertices.len() * 6);
        for &(mi, cl) in &c.outcomes {
            w.mul_assign(&outcome_operator(&net, mi, cl));
        }
        insert(to_vec(&w), &mut span);
    }
    println!("patch stabilizer span rank {}", span.len());
    let cand: Vec<usize> = (0..g.edges.len()).collect();
    let found = solve_membranes(&net, &g, &cand, "membrane");
    for m in independent_masks(&g, found) {
        let r = membrane_residue(&net, &g, &m).unwrap();
        let v = reduce(to_vec(&r), &span);
        let wt = v.iter().map(|w| w.count_ones()).sum::<u32>();
        println!("{}: residue reduced weight {wt}", m.name);
    }
}
