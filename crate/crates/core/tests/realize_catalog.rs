use std::time::Instant;

use sonobe::catalog::{Catalog, Tag};
use sonobe::realize::{dihedral_angles, realize, RealizeOptions};

#[test]
fn convex_solids_realize_from_scratch() {
    let t = Instant::now();
    for e in Catalog::builtin().entries().iter().filter(|e| e.has_tag(Tag::Convex)) {
        let r = realize(&e.mesh, None, &RealizeOptions::default()).unwrap();
        let max = dihedral_angles(&e.mesh, &r.embedding)
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max);
        eprintln!(
            "{:32} restarts {:2} energy {:.1e} max dihedral {:.3}",
            e.name, r.restarts_used, r.final_energy, max
        );
        assert!(r.converged && !r.self_intersecting, "{}", e.name);
        assert!(r.max_edge_deviation < 1e-4);
        assert!(max < 180.0, "{} realized nonconvex", e.name);
    }
    eprintln!("{:?}", t.elapsed());
}
