//! Catalog entry through to buildable artifacts.

use sonobe::augment::{augment, cap_feasibility};
use sonobe::blueprint::{assembly_plan, color_modules, module_count, vertex_diagram, ColoringOutcome};
use sonobe::catalog::{get, Catalog, Tag};
use sonobe::net::{refold, unfold, UnfoldOptions};
use sonobe::realize::{dihedral_angles, realize, RealizeOptions};
use sonobe::surface::{euler_characteristic, genus};

#[test]
fn every_sphere_goes_end_to_end() {
    for e in Catalog::builtin().entries().iter().filter(|e| !e.has_tag(Tag::Torus)) {
        let emb = e.reference_embedding.as_ref().unwrap();
        let model = augment(&e.mesh, emb).unwrap();
        assert!(cap_feasibility(&model).feasible, "{}", e.name);
        let surface = model.surface().unwrap();
        assert_eq!(surface.face_count(), 3 * e.mesh.face_count());
        assert_eq!(euler_characteristic(&surface), 2);

        let plan = assembly_plan(&e.mesh, None).unwrap();
        assert_eq!(plan.total_modules, module_count(&e.mesh));
        let layout = vertex_diagram(&e.mesh).with_layout().unwrap();
        assert!(layout.layout.unwrap().planar, "{}", e.name);

        let net = unfold(&e.mesh, emb, &UnfoldOptions::default());
        assert!(net.overlap_free(), "{}", e.name);
        let folded = refold(&net, &e.mesh, emb).unwrap();
        for (f, tri) in folded.iter().enumerate() {
            for (k, p) in tri.iter().enumerate() {
                assert!((p - emb.point(e.mesh.face(f)[k])).norm() < 1e-8, "{}", e.name);
            }
        }
    }
}

#[test]
fn optimizer_recovers_nonconvex_reference_shapes() {
    // starting from the reference keeps the optimizer on the nonconvex branch
    for name in ["tetra_capped_12", "cube_capped_24"] {
        let e = get(name).unwrap();
        let r = realize(&e.mesh, e.reference_embedding.as_ref(), &RealizeOptions::default()).unwrap();
        assert!(r.converged && !r.self_intersecting);
        let d = dihedral_angles(&e.mesh, &r.embedding).unwrap();
        assert!(d.iter().any(|&x| x > 180.0), "{name}");
    }
}

#[test]
fn torus_entries() {
    let e = get("csaszar_torus").unwrap();
    assert_eq!(genus(&e.mesh).unwrap(), 1);
    assert!(e.reference_embedding.is_none());
    assert!(matches!(
        color_modules(&e.mesh, 3).unwrap(),
        ColoringOutcome::Colored(_)
    ));
    let d = vertex_diagram(&e.mesh).with_layout().unwrap();
    assert!(!d.layout.unwrap().planar);
}
