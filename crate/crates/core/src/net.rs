//! Planar nets: faces laid out in the plane along a spanning tree of the dual
//! graph, each child hinged open across the edge it shares with its parent.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{Isometry3, Matrix3, Rotation3, Translation3, Unit, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geom::{sat_penetration, unit_normal, Vec2, Vec3, EPS_GEOM};
use crate::realize::{dihedral_angles, Embedding, RealizeError};
use crate::surface::TriangleMesh;
use crate::svg::SvgDoc;

/// Spanning trees tried before giving up on an overlap-free net.
pub const DEFAULT_TREE_BUDGET: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacedFace {
    pub face: usize,
    /// Corner positions, in the face's vertex order (counterclockwise).
    pub points: [[f64; 2]; 3],
    /// Edge ids of the sides (p0,p1), (p1,p2), (p2,p0).
    #[serde(skip)]
    pub edges: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarNet {
    /// Indexed by face id.
    pub placements: Vec<PlacedFace>,
    /// Parent face and hinge edge of each face in the dual tree.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Faces in placement order, root first.
    pub order: Vec<usize>,
    /// Fold edges (dual tree edges), ascending.
    pub tree_edges: Vec<usize>,
    /// Cut edges, ascending.
    pub boundary_edges: Vec<usize>,
    pub root_face: usize,
    /// Overlapping face pairs of this layout.
    pub overlaps: Vec<(usize, usize)>,
    /// Number of spanning trees tried.
    pub attempts: usize,
}

impl PlanarNet {
    pub fn overlap_free(&self) -> bool {
        self.overlaps.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct UnfoldOptions {
    pub root_face: Option<usize>,
    pub seed: u64,
    pub max_trees: usize,
}

impl Default for UnfoldOptions {
    fn default() -> Self {
        Self {
            root_face: None,
            seed: 0,
            max_trees: DEFAULT_TREE_BUDGET,
        }
    }
}

/// Unfold `emb` into the plane.
///
/// Tree 0 is the breadth-first tree from the root face; later attempts grow
/// the tree from a randomly chosen frontier hinge each step. The first
/// overlap-free net is returned, otherwise the net with fewest overlapping
/// pairs (earliest on ties).
pub fn unfold(mesh: &TriangleMesh, emb: &Embedding, opts: &UnfoldOptions) -> PlanarNet {
    assert_eq!(emb.len(), mesh.vertex_count(), "embedding does not match mesh");
    let root = opts.root_face.unwrap_or(0).min(mesh.face_count() - 1);
    let mut best: Option<PlanarNet> = None;
    for attempt in 0..opts.max_trees.max(1) {
        let parent = if attempt == 0 {
            bfs_tree(mesh, root)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(attempt as u64);
            random_tree(mesh, root, &mut rng)
        };
        let mut net = lay_out(mesh, emb, root, parent);
        net.overlaps = net_overlaps(&net);
        net.attempts = attempt + 1;
        if net.overlap_free() {
            return net;
        }
        if best.as_ref().is_none_or(|b| net.overlaps.len() < b.overlaps.len()) {
            best = Some(net);
        }
    }
    let mut net = best.expect("at least one tree");
    net.attempts = opts.max_trees.max(1);
    net
}

type Tree = (Vec<usize>, Vec<Option<(usize, usize)>>);

fn bfs_tree(mesh: &TriangleMesh, root: usize) -> Tree {
    let mut parent = vec![None; mesh.face_count()];
    let mut seen = vec![false; mesh.face_count()];
    let mut order = vec![root];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        for (g, e) in mesh.face_neighbors(f).into_iter().zip(mesh.face_edges(f)) {
            if !seen[g] {
                seen[g] = true;
                parent[g] = Some((f, e));
                order.push(g);
                queue.push_back(g);
            }
        }
    }
    (order, parent)
}

fn random_tree(mesh: &TriangleMesh, root: usize, rng: &mut ChaCha8Rng) -> Tree {
    let mut parent = vec![None; mesh.face_count()];
    let mut seen = vec![false; mesh.face_count()];
    let mut order = vec![root];
    seen[root] = true;
    let mut frontier: Vec<(usize, usize, usize)> = Vec::new();
    let push = |f: usize, frontier: &mut Vec<(usize, usize, usize)>| {
        for (g, e) in mesh.face_neighbors(f).into_iter().zip(mesh.face_edges(f)) {
            frontier.push((f, g, e));
        }
    };
    push(root, &mut frontier);
    while !frontier.is_empty() {
        let (f, g, e) = frontier.swap_remove(rng.random_range(0..frontier.len()));
        if seen[g] {
            continue;
        }
        seen[g] = true;
        parent[g] = Some((f, e));
        order.push(g);
        push(g, &mut frontier);
    }
    (order, parent)
}

fn third_point(a: Vec2, b: Vec2, lac: f64, lbc: f64, left: bool) -> Vec2 {
    let ab = b - a;
    let lab = ab.norm();
    let t = ab / lab;
    let nl = Vec2::new(-t.y, t.x);
    let x = (lab * lab + lac * lac - lbc * lbc) / (2.0 * lab);
    let y = (lac * lac - x * x).max(0.0).sqrt();
    if left {
        a + t * x + nl * y
    } else {
        a + t * x - nl * y
    }
}

fn lay_out(mesh: &TriangleMesh, emb: &Embedding, root: usize, (order, parent): Tree) -> PlanarNet {
    let dist = |u: usize, v: usize| (emb.point(u) - emb.point(v)).norm();
    let mut pos: Vec<Option<[Vec2; 3]>> = vec![None; mesh.face_count()];
    for &f in &order {
        let face = mesh.face(f);
        let placed = match parent[f] {
            None => {
                let p0 = Vec2::zeros();
                let p1 = Vec2::new(dist(face[0], face[1]), 0.0);
                let p2 = third_point(p0, p1, dist(face[0], face[2]), dist(face[1], face[2]), true);
                [p0, p1, p2]
            }
            Some((p, e)) => {
                let [a, b] = mesh.edge(e);
                let pf = mesh.face(p);
                let pp = pos[p].expect("parent placed first");
                let at = |v: usize| pp[pf.iter().position(|&u| u == v).unwrap()];
                // orient the hinge as the parent traverses it
                let (a, b) = if (0..3).any(|i| pf[i] == a && pf[(i + 1) % 3] == b) {
                    (a, b)
                } else {
                    (b, a)
                };
                let c = face.into_iter().find(|&v| v != a && v != b).unwrap();
                let pc = third_point(at(a), at(b), dist(a, c), dist(b, c), false);
                face.map(|v| {
                    if v == a {
                        at(a)
                    } else if v == b {
                        at(b)
                    } else {
                        pc
                    }
                })
            }
        };
        pos[f] = Some(placed);
    }
    let placements: Vec<PlacedFace> = pos
        .into_iter()
        .enumerate()
        .map(|(f, p)| PlacedFace {
            face: f,
            points: p.unwrap().map(|q| [q.x, q.y]),
            edges: mesh.face_edges(f),
        })
        .collect();
    let tree: BTreeSet<usize> = parent.iter().flatten().map(|&(_, e)| e).collect();
    let boundary_edges = (0..mesh.edge_count()).filter(|e| !tree.contains(e)).collect();
    PlanarNet {
        placements,
        parent,
        order,
        tree_edges: tree.into_iter().collect(),
        boundary_edges,
        root_face: root,
        overlaps: Vec::new(),
        attempts: 1,
    }
}

/// Pairs of placed faces whose interiors overlap.
pub fn net_overlaps(net: &PlanarNet) -> Vec<(usize, usize)> {
    let tris: Vec<[Vec2; 3]> = net
        .placements
        .iter()
        .map(|p| p.points.map(|q| Vec2::new(q[0], q[1])))
        .collect();
    let mut out = Vec::new();
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            if sat_penetration(&tris[i], &tris[j]) > EPS_GEOM {
                out.push((net.placements[i].face, net.placements[j].face));
            }
        }
    }
    out
}

/// SVG of the net: cut edges solid, fold edges dashed, faces labelled with
/// their id. The view box is the bounding box plus a 5% margin.
pub fn net_svg(net: &PlanarNet) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in net.placements.iter().flat_map(|p| p.points) {
        let q = [p[0], -p[1]];
        for k in 0..2 {
            lo[k] = lo[k].min(q[k]);
            hi[k] = hi[k].max(q[k]);
        }
    }
    let margin = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut doc = SvgDoc::new(
        lo[0] - margin,
        lo[1] - margin,
        hi[0] - lo[0] + 2.0 * margin,
        hi[1] - lo[1] + 2.0 * margin,
    );
    let flip = |p: [f64; 2]| [p[0], -p[1]];
    let tree: BTreeSet<usize> = net.tree_edges.iter().copied().collect();
    let mut drawn = BTreeSet::new();
    for placed in &net.placements {
        for i in 0..3 {
            let e = placed.edges[i];
            let (a, b) = (flip(placed.points[i]), flip(placed.points[(i + 1) % 3]));
            if tree.contains(&e) {
                if drawn.insert(e) {
                    doc.line(
                        a,
                        b,
                        r#"class="fold" stroke="black" stroke-width="0.01" stroke-dasharray="0.05 0.03""#,
                    );
                }
            } else {
                doc.line(a, b, r#"class="cut" stroke="black" stroke-width="0.01""#);
            }
        }
    }
    for placed in &net.placements {
        let c = placed
            .points
            .iter()
            .fold([0.0, 0.0], |acc, p| [acc[0] + p[0] / 3.0, acc[1] + p[1] / 3.0]);
        doc.text(flip(c), 0.15, &placed.face.to_string());
    }
    doc.finish()
}

#[derive(Serialize)]
struct PlacementRecord<'a> {
    face: usize,
    points: &'a [[f64; 2]; 3],
}

/// JSON array of `{face, points}` records in face order.
pub fn placements_json(net: &PlanarNet) -> String {
    let records: Vec<PlacementRecord> = net
        .placements
        .iter()
        .map(|p| PlacementRecord {
            face: p.face,
            points: &p.points,
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("plain data serializes")
}

/// Fold the net back up: pin the root face to its 3D position, then rotate
/// each child about its hinge by `180 - dihedral` degrees, composing down the
/// tree. Returns the refolded corner positions per face.
pub fn refold(net: &PlanarNet, mesh: &TriangleMesh, emb: &Embedding) -> Result<Vec<[Vec3; 3]>, RealizeError> {
    let dihedral = dihedral_angles(mesh, emb)?;
    let lift = |p: [f64; 2]| Vec3::new(p[0], p[1], 0.0);
    let root = net.root_face;
    let root_3d = emb.face_points(mesh, root);
    let root_2d = net.placements[root].points.map(lift);
    let frame = |o: Vec3, x: Vec3, n: Vec3| {
        let e1 = (x - o).normalize();
        let e3 = n;
        let e2 = e3.cross(&e1);
        Matrix3::from_columns(&[e1, e2, e3])
    };
    let n3 = unit_normal(&root_3d).ok_or(RealizeError::DegenerateNormal { face: root })?;
    let r = frame(root_3d[0], root_3d[1], n3) * frame(root_2d[0], root_2d[1], Vec3::z()).transpose();
    let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(r));
    let root_iso = Isometry3::from_parts(Translation3::from(root_3d[0] - rot * root_2d[0]), rot);

    let mut iso: Vec<Option<Isometry3<f64>>> = vec![None; mesh.face_count()];
    iso[root] = Some(root_iso);
    for &f in &net.order {
        let Some((p, e)) = net.parent[f] else { continue };
        let [a, b] = mesh.edge(e);
        let pf = mesh.face(p);
        let (a, b) = if (0..3).any(|i| pf[i] == a && pf[(i + 1) % 3] == b) {
            (a, b)
        } else {
            (b, a)
        };
        let at = |v: usize| lift(net.placements[p].points[pf.iter().position(|&u| u == v).unwrap()]);
        let (pa, pb) = (at(a), at(b));
        let angle = (180.0 - dihedral[e]).to_radians();
        let hinge = UnitQuaternion::from_axis_angle(&Unit::new_normalize(pb - pa), angle);
        let local = Isometry3::from_parts(Translation3::from(pa - hinge * pa), hinge);
        iso[f] = Some(iso[p].expect("parent folded first") * local);
    }
    Ok(net
        .placements
        .iter()
        .map(|pl| {
            let m = iso[pl.face].expect("every face reached");
            pl.points.map(|q| m.transform_point(&lift(q).into()).coords)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_mesh;

    fn tetrahedron() -> (TriangleMesh, Embedding) {
        let mesh = build_mesh(4, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]).unwrap();
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let mut pts = vec![
            Vec3::new(s, s, s),
            Vec3::new(s, -s, -s),
            Vec3::new(-s, s, -s),
            Vec3::new(-s, -s, s),
        ];
        let emb = Embedding::new(pts.clone()).unwrap();
        if emb.signed_volume(&mesh) < 0.0 {
            pts.iter_mut().for_each(|p| p.x = -p.x);
        }
        (mesh, Embedding::new(pts).unwrap())
    }

    #[test]
    fn tetrahedron_net() {
        let (mesh, emb) = tetrahedron();
        let net = unfold(&mesh, &emb, &UnfoldOptions::default());
        assert!(net.overlap_free());
        assert_eq!(net.attempts, 1);
        assert_eq!(net.tree_edges.len(), 3);
        assert_eq!(net.boundary_edges.len(), 3);
        assert!(net_overlaps(&net).is_empty());
        let p = net.placements[net.root_face].points;
        assert_eq!(p[0], [0.0, 0.0]);
        assert!(p[1][1].abs() < 1e-15);
    }

    #[test]
    fn placed_triangles_keep_side_lengths() {
        let (mesh, emb) = tetrahedron();
        let net = unfold(&mesh, &emb, &UnfoldOptions::default());
        for pl in &net.placements {
            let face = mesh.face(pl.face);
            for i in 0..3 {
                let j = (i + 1) % 3;
                let d2 = Vec2::new(pl.points[i][0] - pl.points[j][0], pl.points[i][1] - pl.points[j][1]).norm();
                let d3 = (emb.point(face[i]) - emb.point(face[j])).norm();
                assert!((d2 - d3).abs() < EPS_GEOM);
            }
        }
    }

    #[test]
    fn refold_recovers_the_solid() {
        let (mesh, emb) = tetrahedron();
        let net = unfold(&mesh, &emb, &UnfoldOptions::default());
        let folded = refold(&net, &mesh, &emb).unwrap();
        for (f, tri) in folded.iter().enumerate() {
            for (k, p) in tri.iter().enumerate() {
                assert!((p - emb.point(mesh.face(f)[k])).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn corrupted_placement_overlaps() {
        let (mesh, emb) = tetrahedron();
        let mut net = unfold(&mesh, &emb, &UnfoldOptions::default());
        let root = net.root_face;
        let other = (root + 1) % 4;
        net.placements[other].points = net.placements[root].points;
        let pairs = net_overlaps(&net);
        assert!(pairs.contains(&(root.min(other), root.max(other))));
    }

    #[test]
    fn svg_counts() {
        let (mesh, emb) = tetrahedron();
        let net = unfold(&mesh, &emb, &UnfoldOptions::default());
        let svg = net_svg(&net);
        assert_eq!(svg.matches(r#"class="fold""#).count(), 3);
        assert_eq!(svg.matches(r#"class="cut""#).count(), 6);
        assert_eq!(svg.matches("<text").count(), 4);
        assert_eq!(svg, net_svg(&unfold(&mesh, &emb, &UnfoldOptions::default())));
    }
}
