//! Construction artifacts for the augmented model: module counts, the vertex
//! diagram, a breadth-first assembly plan and an optional module colouring.
//!
//! Each Sonobe module is identified with one base edge, so a model needs
//! `E = 3F/2` modules. In the capped model every original vertex of degree
//! `d` carries `d` valley edges (the base edges) and `d` mountain edges (to
//! cap apexes).

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::geom::{segments_cross, Vec2};
use crate::surface::{genus, vertex_degrees, TriangleMesh};
use crate::svg::SvgDoc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlueprintError {
    #[error("barycentric layout system is singular; the skeleton is not 3-connected")]
    LayoutFailed,
    #[error("module colouring needs at least 3 colours, got {k}")]
    TooFewColors { k: usize },
    #[error("start vertex {vertex} is out of range")]
    BadStartVertex { vertex: usize },
}

/// Number of Sonobe modules: three halves of the face count.
pub fn module_count(mesh: &TriangleMesh) -> usize {
    3 * mesh.face_count() / 2
}

/// Original vertices, valley edges and the number of pyramids at each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexDiagram {
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    pub pyramids_at: Vec<usize>,
    /// Faces of the underlying surface, used to pick the outer face.
    pub faces: Vec<[usize; 3]>,
    pub genus: u32,
    pub layout: Option<DiagramLayout>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramLayout {
    pub positions: Vec<[f64; 2]>,
    /// True for a crossing-free barycentric drawing.
    pub planar: bool,
}

pub fn vertex_diagram(mesh: &TriangleMesh) -> VertexDiagram {
    VertexDiagram {
        vertex_count: mesh.vertex_count(),
        edges: mesh.edges().to_vec(),
        pyramids_at: vertex_degrees(mesh),
        faces: mesh.faces().to_vec(),
        genus: genus(mesh).unwrap_or(u32::MAX),
        layout: None,
    }
}

impl VertexDiagram {
    pub fn with_layout(mut self) -> Result<Self, BlueprintError> {
        self.layout = Some(diagram_layout(&self)?);
        Ok(self)
    }

    /// SVG in a unit-square view box: valley edges as solid lines, vertices
    /// as circles labelled with their id and pyramid count.
    pub fn to_svg(&self) -> Result<String, BlueprintError> {
        let layout = match &self.layout {
            Some(l) => l.clone(),
            None => diagram_layout(self)?,
        };
        let pos = fit_unit_square(&layout.positions, 0.08);
        let mut doc = SvgDoc::new(0.0, 0.0, 1.0, 1.0);
        doc.raw(r#"  <rect x="0" y="0" width="1" height="1" fill="white"/>"#);
        for &[a, b] in &self.edges {
            doc.line(pos[a], pos[b], r#"stroke="black" stroke-width="0.006""#);
        }
        for (v, p) in pos.iter().enumerate() {
            doc.circle(*p, 0.03, r#"fill="white" stroke="black" stroke-width="0.004""#);
            doc.text(*p, 0.025, &format!("{v}:{}", self.pyramids_at[v]));
        }
        Ok(doc.finish())
    }
}

fn fit_unit_square(points: &[[f64; 2]], margin: f64) -> Vec<[f64; 2]> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (1.0 - 2.0 * margin) / span;
    let offset = [
        margin + ((1.0 - 2.0 * margin) - (hi[0] - lo[0]) * scale) / 2.0,
        margin + ((1.0 - 2.0 * margin) - (hi[1] - lo[1]) * scale) / 2.0,
    ];
    points
        .iter()
        // flip y so the drawing is upright in SVG coordinates
        .map(|p| {
            [
                offset[0] + (p[0] - lo[0]) * scale,
                1.0 - offset[1] - (p[1] - lo[1]) * scale,
            ]
        })
        .collect()
}

/// Straight-line drawing of the diagram.
///
/// Genus 0: Tutte barycentric embedding with face 0 pinned to an equilateral
/// triangle and every other vertex at the average of its neighbours. Higher
/// genus: deterministic force-directed layout, flagged non-planar.
pub fn diagram_layout(diagram: &VertexDiagram) -> Result<DiagramLayout, BlueprintError> {
    if diagram.genus == 0 {
        tutte_layout(diagram)
    } else {
        Ok(DiagramLayout {
            positions: force_layout(diagram.vertex_count, &diagram.edges),
            planar: false,
        })
    }
}

fn tutte_layout(diagram: &VertexDiagram) -> Result<DiagramLayout, BlueprintError> {
    let n = diagram.vertex_count;
    let outer = diagram.faces[0];
    let mut pos = vec![[0.0; 2]; n];
    let mut fixed = vec![false; n];
    for (k, &v) in outer.iter().enumerate() {
        // counterclockwise from the top
        let angle = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 3.0;
        pos[v] = [angle.cos(), angle.sin()];
        fixed[v] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if !free.is_empty() {
        let mut index = vec![usize::MAX; n];
        for (i, &v) in free.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); n];
        for &[a, b] in &diagram.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let m = free.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DMatrix::<f64>::zeros(m, 2);
        for (i, &v) in free.iter().enumerate() {
            mat[(i, i)] = adj[v].len() as f64;
            for &u in &adj[v] {
                if fixed[u] {
                    rhs[(i, 0)] += pos[u][0];
                    rhs[(i, 1)] += pos[u][1];
                } else {
                    mat[(i, index[u])] -= 1.0;
                }
            }
        }
        let lu = mat.lu();
        let sol = lu.solve(&rhs).ok_or(BlueprintError::LayoutFailed)?;
        if sol.iter().any(|x| !x.is_finite()) {
            return Err(BlueprintError::LayoutFailed);
        }
        for (i, &v) in free.iter().enumerate() {
            pos[v] = [sol[(i, 0)], sol[(i, 1)]];
        }
    }
    Ok(DiagramLayout {
        positions: pos,
        planar: true,
    })
}

/// Fruchterman-Reingold from a circle, fixed iteration count.
fn force_layout(n: usize, edges: &[[usize; 2]]) -> Vec<[f64; 2]> {
    let mut pos: Vec<Vec2> = (0..n)
        .map(|v| {
            let a = v as f64 * std::f64::consts::TAU / n as f64;
            Vec2::new(a.cos(), a.sin())
        })
        .collect();
    let k = (4.0 / n as f64).sqrt();
    let mut temperature = 0.1;
    for _ in 0..300 {
        let mut disp = vec![Vec2::zeros(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = pos[i] - pos[j];
                    let len = d.norm().max(1e-6);
                    disp[i] += d / len * (k * k / len);
                }
            }
        }
        for &[a, b] in edges {
            let d = pos[a] - pos[b];
            let len = d.norm().max(1e-6);
            let f = d / len * (len * len / k);
            disp[a] -= f;
            disp[b] += f;
        }
        for i in 0..n {
            let len = disp[i].norm();
            if len > 0.0 {
                pos[i] += disp[i] / len * len.min(temperature);
            }
        }
        temperature *= 0.98;
    }
    pos.iter().map(|p| [p.x, p.y]).collect()
}

/// Pairs of diagram edges (by index) that cross in `positions`.
pub fn edge_crossings(positions: &[[f64; 2]], edges: &[[usize; 2]]) -> Vec<(usize, usize)> {
    let p = |v: usize| Vec2::new(positions[v][0], positions[v][1]);
    let mut out = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let [a, b] = edges[i];
            let [c, d] = edges[j];
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(p(a), p(b), p(c), p(d), 1e-12) {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssemblyStep {
    pub vertex: usize,
    /// Edge ids of the modules inserted at this step, ascending.
    pub modules_added: Vec<usize>,
    /// Faces whose three modules are all in place after this step.
    pub pyramids_completed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssemblyPlan {
    pub steps: Vec<AssemblyStep>,
    pub total_modules: usize,
}

/// Breadth-first build order over the original vertices.
///
/// Visiting vertex `v` inserts every missing module on the faces around `v`:
/// first the cycle of valley edges at `v`, then the opposite edges closing
/// each pyramid. Neighbours are queued in ascending id order. Visits that add
/// nothing are omitted, and the plan stops once every module is placed.
pub fn assembly_plan(mesh: &TriangleMesh, start_vertex: Option<usize>) -> Result<AssemblyPlan, BlueprintError> {
    let start = start_vertex.unwrap_or(0);
    if start >= mesh.vertex_count() {
        return Err(BlueprintError::BadStartVertex { vertex: start });
    }
    let adjacency = mesh.adjacency();
    let vertex_faces = mesh.vertex_faces();
    let mut placed = vec![false; mesh.edge_count()];
    let mut completed = vec![false; mesh.face_count()];
    let mut remaining = mesh.edge_count();
    let mut visited = vec![false; mesh.vertex_count()];
    let mut queue = VecDeque::from([start]);
    visited[start] = true;
    let mut steps = Vec::new();

    while let Some(v) = queue.pop_front() {
        if remaining == 0 {
            break;
        }
        let mut added: Vec<usize> = vertex_faces[v]
            .iter()
            .flat_map(|&f| mesh.face_edges(f))
            .filter(|&e| !placed[e])
            .collect();
        added.sort_unstable();
        added.dedup();
        if !added.is_empty() {
            for &e in &added {
                placed[e] = true;
            }
            remaining -= added.len();
            let mut done: Vec<usize> = added
                .iter()
                .flat_map(|&e| mesh.edge_faces(e))
                .filter(|&f| !completed[f] && mesh.face_edges(f).iter().all(|&e| placed[e]))
                .collect();
            done.sort_unstable();
            done.dedup();
            for &f in &done {
                completed[f] = true;
            }
            steps.push(AssemblyStep {
                vertex: v,
                modules_added: added,
                pyramids_completed: done,
            });
        }
        for &u in &adjacency[v] {
            if !visited[u] {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    Ok(AssemblyPlan {
        total_modules: steps.iter().map(|s| s.modules_added.len()).sum(),
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleColoring {
    /// Colour index per edge id.
    pub color_of: Vec<usize>,
    pub colors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringOutcome {
    Colored(ModuleColoring),
    NoColoring,
}

/// Colour modules with `k` colours so that every pyramid uses three distinct
/// colours. Backtracking over edges in id order, colours tried ascending.
pub fn color_modules(mesh: &TriangleMesh, k: usize) -> Result<ColoringOutcome, BlueprintError> {
    if k < 3 {
        return Err(BlueprintError::TooFewColors { k });
    }
    let e = mesh.edge_count();
    // the other two edges of each face containing edge i
    let conflicts: Vec<Vec<usize>> = (0..e)
        .map(|i| {
            mesh.edge_faces(i)
                .iter()
                .flat_map(|&f| mesh.face_edges(f))
                .filter(|&j| j != i)
                .collect()
        })
        .collect();
    let mut color = vec![usize::MAX; e];
    let mut i = 0usize;
    loop {
        if i == e {
            return Ok(ColoringOutcome::Colored(ModuleColoring {
                color_of: color,
                colors: k,
            }));
        }
        let next = if color[i] == usize::MAX { 0 } else { color[i] + 1 };
        match (next..k).find(|&c| conflicts[i].iter().all(|&j| color[j] != c)) {
            Some(c) => {
                color[i] = c;
                i += 1;
            }
            None => {
                color[i] = usize::MAX;
                if i == 0 {
                    return Ok(ColoringOutcome::NoColoring);
                }
                i -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_mesh;

    fn octahedron() -> TriangleMesh {
        build_mesh(
            6,
            vec![
                [0, 2, 4],
                [0, 3, 5],
                [0, 4, 3],
                [0, 5, 2],
                [1, 2, 5],
                [1, 3, 4],
                [1, 4, 2],
                [1, 5, 3],
            ],
        )
        .unwrap()
    }

    fn tetrahedron() -> TriangleMesh {
        build_mesh(4, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]).unwrap()
    }

    fn pentagonal_dipyramid() -> TriangleMesh {
        let mut faces = Vec::new();
        for k in 0..5 {
            let (p, q) = (2 + k, 2 + (k + 1) % 5);
            faces.push([0, p, q]);
            faces.push([1, q, p]);
        }
        build_mesh(7, faces).unwrap()
    }

    fn torus7() -> TriangleMesh {
        let mut faces = Vec::new();
        for i in 0..7 {
            faces.push([i, (i + 1) % 7, (i + 3) % 7]);
            faces.push([i, (i + 2) % 7, (i + 3) % 7]);
        }
        build_mesh(7, faces).unwrap()
    }

    #[test]
    fn module_counts() {
        assert_eq!(module_count(&pentagonal_dipyramid()), 15);
        assert_eq!(module_count(&octahedron()), 12);
        assert_eq!(module_count(&tetrahedron()), 6);
    }

    #[test]
    fn diagrams() {
        let d = vertex_diagram(&octahedron());
        assert_eq!((d.vertex_count, d.edges.len()), (6, 12));
        assert_eq!(d.pyramids_at, vec![4; 6]);
        let d = vertex_diagram(&tetrahedron());
        assert_eq!(d.pyramids_at, vec![3; 4]);
        let d = vertex_diagram(&pentagonal_dipyramid());
        assert_eq!(d.pyramids_at.iter().filter(|&&p| p == 5).count(), 2);
        assert_eq!(d.pyramids_at.iter().filter(|&&p| p == 4).count(), 5);
    }

    #[test]
    fn tutte_layouts_are_planar() {
        for mesh in [octahedron(), tetrahedron(), pentagonal_dipyramid()] {
            let d = vertex_diagram(&mesh);
            let layout = diagram_layout(&d).unwrap();
            assert!(layout.planar);
            assert!(edge_crossings(&layout.positions, &d.edges).is_empty());
        }
    }

    #[test]
    fn tetrahedron_layout_has_centred_vertex() {
        let d = vertex_diagram(&tetrahedron());
        let layout = diagram_layout(&d).unwrap();
        // face 0 is (0,1,2); vertex 3 sits at the barycentre of the outer triangle
        let c = layout.positions[3];
        assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
    }

    #[test]
    fn torus_layout_is_flagged() {
        let d = vertex_diagram(&torus7());
        assert_eq!(d.genus, 1);
        let layout = diagram_layout(&d).unwrap();
        assert!(!layout.planar);
        assert!(layout.positions.iter().flatten().all(|x| x.is_finite()));
    }

    #[test]
    fn octahedron_plan() {
        let mesh = octahedron();
        for start in 0..6 {
            let plan = assembly_plan(&mesh, Some(start)).unwrap();
            assert_eq!(plan.steps[0].modules_added.len(), 8);
            assert_eq!(plan.steps[0].pyramids_completed.len(), 4);
            assert_eq!(plan.total_modules, 12);
        }
    }

    #[test]
    fn dipyramid_plan_from_apex() {
        let plan = assembly_plan(&pentagonal_dipyramid(), Some(0)).unwrap();
        assert_eq!(plan.steps[0].modules_added.len(), 10);
        let rest: usize = plan.steps[1..].iter().map(|s| s.modules_added.len()).sum();
        assert_eq!(rest, 5);
        assert_eq!(plan.total_modules, 15);
    }

    #[test]
    fn tetrahedron_plan_is_one_step() {
        let plan = assembly_plan(&tetrahedron(), None).unwrap();
        assert_eq!(plan.steps.len(), 1);
        assert_eq!(plan.steps[0].modules_added.len(), 6);
        assert_eq!(plan.steps[0].pyramids_completed, vec![0, 1, 2, 3]);
    }

    #[test]
    fn plan_rejects_bad_start() {
        assert_eq!(
            assembly_plan(&tetrahedron(), Some(9)),
            Err(BlueprintError::BadStartVertex { vertex: 9 })
        );
    }

    #[test]
    fn colorings_are_rainbow() {
        for mesh in [octahedron(), tetrahedron(), pentagonal_dipyramid()] {
            let ColoringOutcome::Colored(c) = color_modules(&mesh, 3).unwrap() else {
                panic!("no colouring");
            };
            for f in 0..mesh.face_count() {
                let [a, b, d] = mesh.face_edges(f).map(|e| c.color_of[e]);
                assert!(a != b && b != d && a != d);
            }
        }
        assert_eq!(
            color_modules(&octahedron(), 2),
            Err(BlueprintError::TooFewColors { k: 2 })
        );
    }

    #[test]
    fn diagram_svg_is_deterministic() {
        let d = vertex_diagram(&octahedron());
        let a = d.to_svg().unwrap();
        assert_eq!(a, d.to_svg().unwrap());
        assert!(a.starts_with("<svg") && a.contains(r#"viewBox="0.00000 0.00000 1.00000 1.00000""#));
        assert_eq!(a.matches("<line").count(), 12);
        assert_eq!(a.matches("<circle").count(), 6);
    }
}
