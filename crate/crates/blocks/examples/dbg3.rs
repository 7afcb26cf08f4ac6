//! Scratch: find deterministic sheets missing from the built check group.
use blocks::blocks::{build_template, compile};
use blocks::checks::mismatch_signature;
use blocks::template::BlockKind;
use blocks::verify::{outcome_operator, port_qubits};
use std::collections::BTreeMap;

fn main() {
    let kind: String = std::env::args().nth(1).unwrap();
    let d: u32 = std::env::args().nth(2).unwrap().parse().unwrap();
    let kind = match kind.as_str() {
        "identity" => BlockKind::Identity,
        "phase" => BlockKind::Phase,
        _ => panic!(),
    };
    let t = build_template(kind, d).unwrap();
    let (net, g) = compile(&t).unwrap();
    let pq = port_qubits(&net);
    let pindex: BTreeMap<usize, usize> = pq.iter().enumerate().map(|(i, &(q, _))| (q, i)).collect();
    let nsig = 2 * net.measurements.len();
    let nport = 2 * pq.len();
    let ngen = net.vertices.len() * 6;
    let nbits = nsig + nport + ngen;
    let words = nbits.div_ceil(64);
    let set = |v: &mut Vec<u64>, b: usize| v[b / 64] ^= 1 << (b % 64);

    // generator words: K_r at each live vertex
    let dead_q: std::collections::HashSet<usize> = net
        .dead
        .iter()
        .filter_map(|v| net.vertex_index.get(v))
        .flat_map(|&vi| (0..6).map(move |r| vi * 6 + r))
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for vi in 0..net.vertices.len() {
        if dead_q.contains(&(vi * 6)) {
            continue;
        }
        for i in 0..6usize {
            let mut word: BTreeMap<usize, (bool, bool)> = BTreeMap::new();
            let mut xor = |q: usize, x: bool, z: bool| {
                let e = word.entry(q).or_insert((false, false));
                e.0 ^= x;
                e.1 ^= z;
                if *e == (false, false) { word.remove(&q); }
            };
            xor(vi * 6 + i, true, false);
            xor(vi * 6 + (i + 5) % 6, false, true);
            xor(vi * 6 + (i + 1) % 6, false, true);
            let mut v = vec![0u64; words];
            for (mi, bit) in mismatch_signature(&net, &word) {
                set(&mut v, 2 * mi + bit as usize);
            }
            for (&q, &(x, z)) in &word {
                if let Some(&pi) = pindex.get(&q) {
                    if x { set(&mut v, nsig + 2 * pi); }
                    if z { set(&mut v, nsig + 2 * pi + 1); }
                }
            }
            set(&mut v, nsig + nport + vi * 6 + i);
            rows.push(v);
        }
    }
    // echelon, pivots = lowest set bit (sig region first)
    let pivot = |v: &Vec<u64>| -> Option<usize> {
        (0..nsig).find(|&b| v[b / 64] >> (b % 64) & 1 == 1)
    };
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot, row)
    let mut zero_sig: Vec<Vec<u64>> = Vec::new();
    for mut v in rows {
        loop {
            match pivot(&v) {
                None => { zero_sig.push(v); break; }
                Some(p) => {
                    if let Some((_, b)) = basis.iter().find(|(bp, _)| *bp == p) {
                        let b = b.clone();
                        for (a, bb) in v.iter_mut().zip(&b) { *a ^= bb; }
                    } else {
                        basis.push((p, v));
                        break;
                    }
                }
            }
        }
    }
    // zero_sig rows with pivot in PORT region vs fully zero restriction:
    // re-echelonize zero_sig on port bits; rows with zero port part are pure-bulk sheets (ignore)
    let port_pivot = |v: &Vec<u64>| -> Option<usize> {
        (nsig..nsig + nport).find(|&b| v[b / 64] >> (b % 64) & 1 == 1)
    };
    let mut det: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut v in zero_sig {
        loop {
            match port_pivot(&v) {
                None => break,
                Some(p) => {
                    if let Some((_, b)) = det.iter().find(|(bp, _)| *bp == p) {
                        let b = b.clone();
                        for (a, bb) in v.iter_mut().zip(&b) { *a ^= bb; }
                    } else {
                        det.push((p, v));
                        break;
                    }
                }
            }
        }
    }
    println!("deterministic port-restriction rank {}", det.len());
    // built-check port restrictions
    let mut built: Vec<(usize, Vec<u64>)> = Vec::new();
    for c in &g.checks {
        let mut w = blocks::pauli::PauliWord::identity(net.vertices.len() * 6);
        for &(mi, cl) in &c.outcomes {
            w.mul_assign(&outcome_operator(&net, mi, cl));
        }
        let mut v = vec![0u64; words];
        for (q, l) in w.support() {
            if let Some(&pi) = pindex.get(&q) {
                let (x, z) = l.bits();
                if x { set(&mut v, nsig + 2 * pi); }
                if z { set(&mut v, nsig + 2 * pi + 1); }
            }
        }
        loop {
            match port_pivot(&v) {
                None => break,
                Some(p) => {
                    if let Some((_, b)) = built.iter().find(|(bp, _)| *bp == p) {
                        let b = b.clone();
                        for (a, bb) in v.iter_mut().zip(&b) { *a ^= bb; }
                    } else {
                        built.push((p, v));
                        break;
                    }
                }
            }
        }
    }
    println!("built port-restriction rank {}", built.len());
    // reduce each det row against built; print survivors' bulk support
    let built0 = built.clone();
    let mut missing = 0;
    let mut survivors: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
    for (_, row) in &det {
        let mut v = row.clone();
        loop {
            match port_pivot(&v) {
                None => break,
                Some(p) => match built.iter().find(|(bp, _)| *bp == p) {
                    Some((_, b)) => { let b = b.clone(); for (a, bb) in v.iter_mut().zip(&b) { *a ^= bb; } }
                    None => break,
                },
            }
        }
        if port_pivot(&v).is_none() {
            continue;
        }
        built.push((port_pivot(&v).unwrap(), v.clone()));
        survivors.push((v.clone(), row.clone()));
        missing += 1;
        println!("--- missing deterministic element {missing}");
        // port support
        for (pi, &(q, port)) in pq.iter().enumerate() {
            let x = v[(nsig + 2 * pi) / 64] >> ((nsig + 2 * pi) % 64) & 1 == 1;
            let z = v[(nsig + 2 * pi + 1) / 64] >> ((nsig + 2 * pi + 1) % 64) & 1 == 1;
            if x || z {
                let vi = q / 6;
                let p = net.vertices[vi].pos;
                let l = match (x, z) { (true, false) => "X", (false, true) => "Z", _ => "Y" };
                println!("  port{port} {:?} {l}", p);
            }
        }
        // bulk combo support: which vertices contribute generators (use original row combo)
        let mut verts: std::collections::BTreeSet<[i32; 3]> = Default::default();
        for b in nsig + nport..nbits {
            if row[b / 64] >> (b % 64) & 1 == 1 {
                let vi = (b - nsig - nport) / 6;
                verts.insert(net.vertices[vi].pos);
            }
        }
        let zs: std::collections::BTreeSet<i32> = verts.iter().map(|p| p[2]).collect();
        println!("  combo verts {} z-layers {:?}", verts.len(), zs);
    }

    // find combinations of survivors supported on a single port
    for c in 1..(1u32 << survivors.len()) {
        let mut v = vec![0u64; words];
        let mut combo = vec![0u64; words];
        for (i, (sv, row)) in survivors.iter().enumerate() {
            if c >> i & 1 == 1 {
                for (a, b) in v.iter_mut().zip(sv) { *a ^= b; }
                for (a, b) in combo.iter_mut().zip(row) { *a ^= b; }
            }
        }
        for b in nsig..nsig + nport {
            if v[b / 64] >> (b % 64) & 1 == 1 {
                if let Some((_, bb)) = built0.iter().find(|(bp, _)| *bp == b) {
                    let bb = bb.clone();
                    for (a, w) in v.iter_mut().zip(&bb) { *a ^= w; }
                }
            }
        }
        let ports_touched: std::collections::BTreeSet<u8> = pq
            .iter()
            .enumerate()
            .filter(|(pi, _)| {
                v[(nsig + 2 * pi) / 64] >> ((nsig + 2 * pi) % 64) & 1 == 1
                    || v[(nsig + 2 * pi + 1) / 64] >> ((nsig + 2 * pi + 1) % 64) & 1 == 1
            })
            .map(|(_, &(_, port))| port)
            .collect();
        if ports_touched.len() == 1 {
            println!("=== combo {c:b} single-port {:?}", ports_touched);
            for (pi, &(q, port)) in pq.iter().enumerate() {
                let x = v[(nsig + 2 * pi) / 64] >> ((nsig + 2 * pi) % 64) & 1 == 1;
                let z = v[(nsig + 2 * pi + 1) / 64] >> ((nsig + 2 * pi + 1) % 64) & 1 == 1;
                if x || z {
                    let l = match (x, z) { (true, false) => "X", (false, true) => "Z", _ => "Y" };
                    println!("  port{port} {:?} {l}", net.vertices[q / 6].pos);
                }
            }
            let mut verts: std::collections::BTreeMap<[i32; 3], Vec<usize>> = Default::default();
            for b in nsig + nport..nbits {
                if combo[b / 64] >> (b % 64) & 1 == 1 {
                    let vi = (b - nsig - nport) / 6;
                    verts.entry(net.vertices[vi].pos).or_default().push((b - nsig - nport) % 6);
                }
            }
            println!("  combo {} verts:", verts.len());
            for (p, rs) in &verts {
                println!("    {:?} rings {:?}", p, rs);
            }
        }
    }
}
