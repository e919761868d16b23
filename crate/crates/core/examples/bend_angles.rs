//! Distance to bend angle, clamping, and order-preserving finger association.

use fingerangle::angle::{associate, bend_angle};

fn main() {
    let d_ref = 90.0;
    for d in [95.0, 90.0, 75.0, 60.0, 45.0, 30.0, 20.0] {
        let b = bend_angle(d, d_ref).unwrap();
        println!("d {d:5.1} / d_ref {d_ref}: a1 {:5.1}  a2 {:5.1}  clamp {:?}", b.a1, b.a2, b.clamp);
    }

    // four tips seen for five reference fingers: the third finger is folded away
    let reference = [80.0, 95.0, 100.0, 92.0, 70.0];
    let observed = [79.0, 94.0, 91.0, 71.0];
    let assoc = associate(&observed, &reference);
    for m in &assoc.matched {
        println!("observed {} -> finger {}", m.observed, m.finger);
    }
    println!("absent fingers: {:?}", assoc.absent);
}
