//! Scratch: list checks claiming a given outcome.
use blocks::blocks::build_template;
use blocks::checks::build_checks;
use blocks::fusion::assign_measurements;
use blocks::template::BlockKind;

fn main() {
    let t = build_template(BlockKind::LatticeSurgeryZ(2), 2).unwrap();
    t.validate().unwrap();
    let net = assign_measurements(&t).unwrap();
    let (checks, _) = build_checks(&t, &net).unwrap();
    for c in &checks {
        for &(mi, cl) in &c.outcomes {
            let m = &net.measurements[mi];
            if format!("{:?}", m.site).contains("pos: [2, 0, 1], axes: 2") && cl == 1 {
                println!("{:?}", c.kind);
            }
        }
    }
}
