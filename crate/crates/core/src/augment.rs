//! Sonobe caps and cap collision checks.
//!
//! Three Sonobe modules close up into a low triangular pyramid whose lateral
//! faces are right isosceles triangles with the right angle at the apex. Over
//! an equilateral face of side `s` the apex therefore sits at distance
//! `s / sqrt(2)` from each corner, at height `s / sqrt(6)` above the centroid,
//! and each lateral face rises `atan(sqrt(2))` above the base plane.
//!
//! Two caps meeting across a base edge collide once the exterior wedge
//! `360 - delta` drops below twice that rise angle, i.e. once the interior
//! dihedral `delta` exceeds `360 - 2 atan(sqrt(2))`, about 250.5288 degrees.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::geom::{classify_pair, unit_normal, Contact, Vec3, EPS_GEOM};
use crate::realize::{dihedral_angles, Embedding, RealizeError};
use crate::surface::{build_mesh, MeshError, TriangleMesh};

/// Half-width of the band around the critical dihedral reported as boundary contact.
pub const EPS_ANGLE_DEG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error("triangle is degenerate or too obtuse to carry a Sonobe cap")]
    DegenerateTriangle,
    #[error("face {face}: triangle is degenerate or too obtuse to carry a Sonobe cap")]
    DegenerateFace { face: usize },
    #[error(transparent)]
    Realize(#[from] RealizeError),
}

/// Angle between a cap's lateral face and its base face, in degrees.
pub fn cap_rise_angle() -> f64 {
    2f64.sqrt().atan().to_degrees()
}

/// Interior dihedral beyond which caps across an edge collide, in degrees.
pub fn critical_dihedral() -> f64 {
    360.0 - 2.0 * cap_rise_angle()
}

fn circumcenter(t: &[Vec3; 3]) -> Option<Vec3> {
    let u = t[1] - t[0];
    let w = t[2] - t[0];
    let n = u.cross(&w);
    let n2 = n.norm_squared();
    if n2 < EPS_GEOM * EPS_GEOM {
        return None;
    }
    Some(t[0] + (w.cross(&n) * u.norm_squared() + n.cross(&u) * w.norm_squared()) / (2.0 * n2))
}

/// Apex of the Sonobe cap over `triangle`, on the side of `outward_normal`.
///
/// The apex lies on the axis through the circumcentre, at distance
/// `mean_edge / sqrt(2)` from each corner; for an equilateral triangle this is
/// the centroid lifted by `s / sqrt(6)`.
pub fn cap_apex(triangle: &[Vec3; 3], outward_normal: &Vec3) -> Result<Vec3, AugmentError> {
    let center = circumcenter(triangle).ok_or(AugmentError::DegenerateTriangle)?;
    let mut n = unit_normal(triangle).ok_or(AugmentError::DegenerateTriangle)?;
    let side = n.dot(outward_normal);
    if side.abs() < EPS_GEOM {
        return Err(AugmentError::DegenerateTriangle);
    }
    if side < 0.0 {
        n = -n;
    }
    let mean_edge = (0..3)
        .map(|i| (triangle[(i + 1) % 3] - triangle[i]).norm())
        .sum::<f64>()
        / 3.0;
    let slant = mean_edge * FRAC_1_SQRT_2;
    let r2 = (triangle[0] - center).norm_squared();
    let h2 = slant * slant - r2;
    if h2 <= EPS_GEOM {
        return Err(AugmentError::DegenerateTriangle);
    }
    Ok(center + n * h2.sqrt())
}

/// A base embedding with one cap apex per face.
///
/// Vertex numbering of the capped surface: base vertices first, then apex `f`
/// as vertex `V + f`.
#[derive(Debug, Clone)]
pub struct AugmentedModel {
    pub base_mesh: TriangleMesh,
    pub base: Embedding,
    pub apexes: Vec<Vec3>,
    /// Three lateral triangles per base face, face `f` at `3f..3f+3`.
    pub cap_faces: Vec<[usize; 3]>,
}

/// Cap every face of an outward-oriented embedding.
pub fn augment(mesh: &TriangleMesh, emb: &Embedding) -> Result<AugmentedModel, AugmentError> {
    if emb.len() != mesh.vertex_count() {
        return Err(RealizeError::SizeMismatch {
            expected: mesh.vertex_count(),
            found: emb.len(),
        }
        .into());
    }
    let v = mesh.vertex_count();
    let mut apexes = Vec::with_capacity(mesh.face_count());
    let mut cap_faces = Vec::with_capacity(3 * mesh.face_count());
    for f in 0..mesh.face_count() {
        let tri = emb.face_points(mesh, f);
        let normal = unit_normal(&tri).ok_or(AugmentError::DegenerateFace { face: f })?;
        let apex = cap_apex(&tri, &normal).map_err(|_| AugmentError::DegenerateFace { face: f })?;
        apexes.push(apex);
        let [a, b, c] = mesh.face(f);
        let p = v + f;
        cap_faces.extend([[a, b, p], [b, c, p], [c, a, p]]);
    }
    Ok(AugmentedModel {
        base_mesh: mesh.clone(),
        base: emb.clone(),
        apexes,
        cap_faces,
    })
}

impl AugmentedModel {
    pub fn vertex_count(&self) -> usize {
        self.base.len() + self.apexes.len()
    }

    /// Base points followed by apexes.
    pub fn points(&self) -> Vec<Vec3> {
        self.base.points().iter().chain(&self.apexes).copied().collect()
    }

    /// The capped surface as a mesh: `V + F` vertices, `3F` faces, `E + 3F` edges.
    pub fn surface(&self) -> Result<TriangleMesh, MeshError> {
        build_mesh(self.vertex_count(), self.cap_faces.clone())
    }

    /// Height of each apex above its base face plane.
    pub fn apex_heights(&self) -> Vec<f64> {
        (0..self.apexes.len())
            .map(|f| {
                let tri = self.base.face_points(&self.base_mesh, f);
                let n = unit_normal(&tri).unwrap_or_else(Vec3::zeros);
                n.dot(&(self.apexes[f] - tri[0]))
            })
            .collect()
    }

    /// Distances from each apex to its three base corners.
    pub fn apex_distances(&self) -> Vec<[f64; 3]> {
        (0..self.apexes.len())
            .map(|f| {
                self.base
                    .face_points(&self.base_mesh, f)
                    .map(|p| (self.apexes[f] - p).norm())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgeClass {
    Feasible,
    /// Lateral faces meet flat within the angular tolerance.
    Boundary,
    Infeasible,
}

/// Per-edge collision test from the interior dihedral angle alone.
pub fn wedge_precheck(interior_dihedral: f64) -> WedgeClass {
    let critical = critical_dihedral();
    if (interior_dihedral - critical).abs() <= EPS_ANGLE_DEG {
        WedgeClass::Boundary
    } else if interior_dihedral > critical {
        WedgeClass::Infeasible
    } else {
        WedgeClass::Feasible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapReport {
    pub feasible: bool,
    /// Base face pairs whose caps intersect, sorted.
    pub colliding_pairs: Vec<(usize, usize)>,
    /// `360 - dihedral` per edge id, in degrees.
    pub edge_wedge_angles: Vec<f64>,
    /// Edges where neighbouring caps meet flat.
    pub boundary_contacts: Vec<usize>,
}

/// Decide whether the caps of `model` can all be folded without collision.
///
/// Caps across an edge flagged by [`wedge_precheck`] as infeasible are
/// reported directly; every other pair of lateral faces from distinct caps is
/// tested geometrically. Flat contact (boundary edges, touching faces) is not
/// a collision.
pub fn cap_feasibility(model: &AugmentedModel) -> CapReport {
    let mesh = &model.base_mesh;
    let dihedrals = dihedral_angles(mesh, &model.base).unwrap_or_else(|_| vec![f64::NAN; mesh.edge_count()]);
    let edge_wedge_angles: Vec<f64> = dihedrals.iter().map(|d| 360.0 - d).collect();

    let mut collisions = BTreeSet::new();
    let mut boundary_contacts = Vec::new();
    for (e, &d) in dihedrals.iter().enumerate() {
        let [f, g] = mesh.edge_faces(e);
        match wedge_precheck(d) {
            WedgeClass::Infeasible => {
                collisions.insert((f.min(g), f.max(g)));
            }
            WedgeClass::Boundary => boundary_contacts.push(e),
            WedgeClass::Feasible => {}
        }
    }

    let points = model.points();
    let tris: Vec<[Vec3; 3]> = model.cap_faces.iter().map(|t| t.map(|v| points[v])).collect();
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            let (f, g) = (i / 3, j / 3);
            if f == g || collisions.contains(&(f, g)) {
                continue;
            }
            let c = classify_pair(&tris[i], &model.cap_faces[i], &tris[j], &model.cap_faces[j], EPS_GEOM);
            if c == Contact::Crossing {
                collisions.insert((f, g));
            }
        }
    }
    let colliding_pairs: Vec<_> = collisions.into_iter().collect();
    CapReport {
        feasible: colliding_pairs.is_empty(),
        colliding_pairs,
        edge_wedge_angles,
        boundary_contacts,
    }
}

/// Two unit equilateral triangles hinged along a common edge, each carrying
/// a Sonobe cap. Used to probe the collision threshold directly.
#[derive(Debug, Clone)]
pub struct HingeRig {
    /// Points a, b (hinge), c, d (free corners), then the two apexes.
    pub points: [Vec3; 6],
}

impl HingeRig {
    /// Rig whose interior dihedral along the hinge is `delta` degrees.
    pub fn new(delta: f64) -> Self {
        let t = delta.to_radians();
        let h = 3f64.sqrt() / 2.0;
        let a = Vec3::new(0.0, 0.0, 0.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let c = Vec3::new(0.5, h, 0.0);
        let d = Vec3::new(0.5, h * t.cos(), h * t.sin());
        // the solid occupies the wedge swept from c towards d
        let out_f = Vec3::new(0.0, 0.0, -1.0);
        let out_g = Vec3::new(0.0, -t.sin(), t.cos());
        let pf = cap_apex(&[a, b, c], &out_f).expect("unit triangle");
        let pg = cap_apex(&[a, b, d], &out_g).expect("unit triangle");
        Self {
            points: [a, b, c, d, pf, pg],
        }
    }

    /// Lateral faces of the two caps, by point index.
    pub fn cap_faces() -> [[[usize; 3]; 3]; 2] {
        [[[0, 1, 4], [1, 2, 4], [2, 0, 4]], [[0, 1, 5], [1, 3, 5], [3, 0, 5]]]
    }

    /// Strongest contact between any lateral face of one cap and any of the other.
    pub fn contact(&self) -> Contact {
        let [first, second] = Self::cap_faces();
        let mut worst = Contact::Disjoint;
        for s in &first {
            for t in &second {
                let ts = s.map(|v| self.points[v]);
                let tt = t.map(|v| self.points[v]);
                worst = worst.max(classify_pair(&ts, s, &tt, t, EPS_GEOM));
            }
        }
        worst
    }

    pub fn caps_collide(&self) -> bool {
        self.contact() == Contact::Crossing
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle_apex() {
        let h = 3f64.sqrt() / 2.0;
        let tri = [Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(0.5, h, 0.)];
        let up = cap_apex(&tri, &Vec3::z()).unwrap();
        let expected = Vec3::new(0.5, 3f64.sqrt() / 6.0, 1.0 / 6f64.sqrt());
        assert!((up - expected).norm() < 1e-15);
        assert!((up.z - 0.408_248_290_463_863).abs() < 1e-12);
        let down = cap_apex(&tri, &-Vec3::z()).unwrap();
        assert!((down.z + 0.408_248_290_463_863).abs() < 1e-12);
        for p in tri {
            assert!(((up - p).norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn lateral_faces_are_right_isosceles() {
        let h = 3f64.sqrt() / 2.0;
        let tri = [Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(0.5, h, 0.)];
        let p = cap_apex(&tri, &Vec3::z()).unwrap();
        for i in 0..3 {
            let u = tri[i] - p;
            let w = tri[(i + 1) % 3] - p;
            let angle = (u.dot(&w) / (u.norm() * w.norm())).acos();
            assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_triangle_has_no_apex() {
        let tri = [Vec3::new(0., 0., 0.), Vec3::new(1., 0., 0.), Vec3::new(2., 0., 0.)];
        assert_eq!(cap_apex(&tri, &Vec3::z()), Err(AugmentError::DegenerateTriangle));
    }

    #[test]
    fn wedge_classes() {
        assert!((critical_dihedral() - 250.528_779_365_509_3).abs() < 1e-9);
        assert_eq!(wedge_precheck(109.4712), WedgeClass::Feasible);
        assert_eq!(wedge_precheck(critical_dihedral()), WedgeClass::Boundary);
        assert_eq!(wedge_precheck(250.5287), WedgeClass::Feasible);
        assert_eq!(wedge_precheck(250.5288), WedgeClass::Infeasible);
        assert_eq!(wedge_precheck(300.0), WedgeClass::Infeasible);
    }

    #[test]
    fn hinge_rig_matches_precheck_away_from_threshold() {
        for k in 1..12 {
            let delta = 30.0 * k as f64;
            let rig = HingeRig::new(delta);
            let expected = wedge_precheck(delta) == WedgeClass::Infeasible;
            assert_eq!(rig.caps_collide(), expected, "delta = {delta}");
        }
        assert_eq!(HingeRig::new(critical_dihedral()).contact(), Contact::Touching);
    }

    #[test]
    fn hinge_rig_faces_are_unit_caps() {
        let rig = HingeRig::new(140.0);
        let [a, b, c, d, pf, pg] = rig.points;
        for p in [a, b, c] {
            assert!(((pf - p).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        }
        for p in [a, b, d] {
            assert!(((pg - p).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert!(((d - a).norm() - 1.0).abs() < 1e-12);
    }
}
