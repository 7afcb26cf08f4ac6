//! Scratch: per-kind membrane certification and fault distance sweep.
use blocks::blocks::build_block;
use blocks::distance::fault_distance;
use blocks::template::BlockKind;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind = match args[0].as_str() {
        "identity" => BlockKind::Identity,
        "phase" => BlockKind::Phase,
        "hadamard" => BlockKind::Hadamard,
        "torus3" => BlockKind::Torus3,
        "lsz" => BlockKind::LatticeSurgeryZ(args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2)),
        "lsx" => BlockKind::LatticeSurgeryX(args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2)),
        "cx" => BlockKind::Cx,
        k => panic!("unknown kind {k}"),
    };
    for d in 2..=args[1].parse::<u32>().unwrap() {
        match build_block(kind, d) {
            Ok(b) => {
                let dists: Vec<_> =
                    b.masks.iter().map(|m| fault_distance(&b.graph, m)).collect();
                println!("--- d={d}: {} masks, distances {dists:?}", b.masks.len());
            }
            Err(e) => println!("--- d={d}: ERROR {e}"),
        }
    }
}
