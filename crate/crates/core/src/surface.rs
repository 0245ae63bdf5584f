//! Closed triangulated surfaces.
//!
//! A [`TriangleMesh`] is the combinatorial skeleton of a candidate deltahedron:
//! a vertex count and a list of oriented triangles. Construction validates that
//! the triangles form a connected, closed, orientable 2-manifold and repairs
//! mixed windings by flipping faces outward from face 0.
//!
//! Edges are derived, canonicalized as `(min, max)` and sorted
//! lexicographically. The index of an edge in [`TriangleMesh::edges`] is its
//! edge id; every other module refers to edges by this id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("mesh has no faces")]
    Empty,
    #[error("face {face} references vertex {vertex}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("face {face} has a repeated vertex")]
    DegenerateFace { face: usize },
    #[error("faces {first} and {second} have the same vertex set")]
    DuplicateFace { first: usize, second: usize },
    #[error("NonManifoldEdge: edge ({a}, {b}) lies in {count} faces, expected 2")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("vertex {vertex} is not a manifold vertex (its faces do not form a single fan)")]
    NonManifoldVertex { vertex: usize },
    #[error("vertex {vertex} belongs to no face")]
    IsolatedVertex { vertex: usize },
    #[error("face adjacency graph is disconnected")]
    Disconnected,
    #[error("surface is not orientable")]
    Unorientable,
    #[error("face {face} has {size} sides; only triangles and hexagons are supported")]
    UnsupportedFaceSize { face: usize, size: usize },
    #[error("Euler characteristic {chi} is odd")]
    OddEulerCharacteristic { chi: i64 },
}

/// A validated, consistently oriented, closed triangulated surface.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// For edge `[a, b]` (a < b): the face holding the directed edge a->b,
    /// then the face holding b->a.
    edge_faces: Vec<[usize; 2]>,
    /// Edge ids of (f0,f1), (f1,f2), (f2,f0).
    face_edges: Vec<[usize; 3]>,
    flat_edges: Vec<usize>,
    name: Option<String>,
}

/// Structural equality: same vertex count and the same oriented face list.
impl PartialEq for TriangleMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.faces == other.faces
    }
}

impl Eq for TriangleMesh {}

/// Validate `faces` and build a [`TriangleMesh`].
///
/// Face windings are made globally consistent by propagating flips from
/// face 0, whose winding is kept.
pub fn build_mesh(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<TriangleMesh, MeshError> {
    if faces.is_empty() || vertex_count == 0 {
        return Err(MeshError::Empty);
    }
    for (f, face) in faces.iter().enumerate() {
        if let Some(&vertex) = face.iter().find(|&&v| v >= vertex_count) {
            return Err(MeshError::IndexOutOfRange {
                face: f,
                vertex,
                vertex_count,
            });
        }
        if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
            return Err(MeshError::DegenerateFace { face: f });
        }
    }

    let mut incidence: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
    for (f, face) in faces.iter().enumerate() {
        for i in 0..3 {
            incidence
                .entry(canonical(face[i], face[(i + 1) % 3]))
                .or_default()
                .push(f);
        }
    }
    if let Some((&[a, b], fs)) = incidence.iter().find(|(_, fs)| fs.len() != 2) {
        return Err(MeshError::NonManifoldEdge { a, b, count: fs.len() });
    }

    let mut seen: BTreeMap<[usize; 3], usize> = BTreeMap::new();
    for (f, face) in faces.iter().enumerate() {
        let mut key = *face;
        key.sort_unstable();
        if let Some(&first) = seen.get(&key) {
            return Err(MeshError::DuplicateFace { first, second: f });
        }
        seen.insert(key, f);
    }

    let mut used = vec![false; vertex_count];
    faces.iter().flatten().for_each(|&v| used[v] = true);
    if let Some(vertex) = used.iter().position(|u| !u) {
        return Err(MeshError::IsolatedVertex { vertex });
    }

    let faces = orient_faces(&faces, &incidence)?;

    let edges: Vec<[usize; 2]> = incidence.keys().copied().collect();
    let mut edge_faces = vec![[usize::MAX; 2]; edges.len()];
    let mut face_edges = vec![[0usize; 3]; faces.len()];
    for (f, face) in faces.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (face[i], face[(i + 1) % 3]);
            let id = edges.binary_search(&canonical(a, b)).expect("edge derived from faces");
            face_edges[f][i] = id;
            edge_faces[id][usize::from(a > b)] = f;
        }
    }

    let mesh = TriangleMesh {
        vertex_count,
        faces,
        edges,
        edge_faces,
        face_edges,
        flat_edges: Vec::new(),
        name: None,
    };
    mesh.check_vertex_fans()?;
    Ok(mesh)
}

fn canonical(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn contains_directed(face: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|i| face[i] == a && face[(i + 1) % 3] == b)
}

/// BFS over the face adjacency graph, flipping neighbours so that every
/// shared edge is traversed in opposite directions.
fn orient_faces(
    faces: &[[usize; 3]],
    incidence: &BTreeMap<[usize; 2], Vec<usize>>,
) -> Result<Vec<[usize; 3]>, MeshError> {
    let mut oriented: Vec<Option<[usize; 3]>> = vec![None; faces.len()];
    oriented[0] = Some(faces[0]);
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(f) = queue.pop_front() {
        let face = oriented[f].expect("queued faces are oriented");
        for i in 0..3 {
            let (a, b) = (face[i], face[(i + 1) % 3]);
            let pair = &incidence[&canonical(a, b)];
            let g = if pair[0] == f { pair[1] } else { pair[0] };
            match oriented[g] {
                Some(other) => {
                    if contains_directed(&other, a, b) {
                        return Err(MeshError::Unorientable);
                    }
                }
                None => {
                    let raw = faces[g];
                    oriented[g] = Some(if contains_directed(&raw, a, b) {
                        [raw[0], raw[2], raw[1]]
                    } else {
                        raw
                    });
                    reached += 1;
                    queue.push_back(g);
                }
            }
        }
    }
    if reached != faces.len() {
        return Err(MeshError::Disconnected);
    }
    Ok(oriented.into_iter().map(|f| f.unwrap()).collect())
}

impl TriangleMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    /// Canonical `(min, max)` edges, sorted; the index is the edge id.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> [usize; 2] {
        self.edges[id]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&canonical(a, b)).ok()
    }

    /// The two faces on edge `id`: first the one traversing it min->max.
    pub fn edge_faces(&self, id: usize) -> [usize; 2] {
        self.edge_faces[id]
    }

    /// Edge ids of a face, in the order (f0,f1), (f1,f2), (f2,f0).
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// Faces sharing an edge with `f`, in face-edge order.
    pub fn face_neighbors(&self, f: usize) -> [usize; 3] {
        self.face_edges[f].map(|e| {
            let [g, h] = self.edge_faces[e];
            if g == f {
                h
            } else {
                g
            }
        })
    }

    /// Edges whose dihedral angle is 180 degrees by construction (interior
    /// edges of dissected hexagons).
    pub fn flat_edges(&self) -> &[usize] {
        &self.flat_edges
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub(crate) fn with_flat_edges(mut self, mut flat: Vec<usize>) -> Self {
        flat.sort_unstable();
        flat.dedup();
        self.flat_edges = flat;
        self
    }

    /// Same surface with every face reversed. Edge ids are unchanged.
    pub fn flipped(&self) -> TriangleMesh {
        let mut out = self.clone();
        for face in &mut out.faces {
            face.swap(1, 2);
        }
        for ef in &mut out.edge_faces {
            ef.swap(0, 1);
        }
        for (f, face) in out.faces.iter().enumerate() {
            out.face_edges[f] = [0, 1, 2].map(|i| self.edge_id(face[i], face[(i + 1) % 3]).expect("flip keeps edges"));
        }
        out
    }

    /// Sorted neighbour list of every vertex.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|n| n.sort_unstable());
        adj
    }

    /// Ids of the faces incident to each vertex, ascending.
    pub fn vertex_faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                out[v].push(f);
            }
        }
        out
    }

    /// Every vertex's incident faces must form one closed fan.
    fn check_vertex_fans(&self) -> Result<(), MeshError> {
        for (v, incident) in self.vertex_faces().iter().enumerate() {
            // link edge of face (v, x, y) runs x -> y
            let next: BTreeMap<usize, usize> = incident
                .iter()
                .map(|&f| {
                    let face = self.faces[f];
                    let i = face.iter().position(|&u| u == v).unwrap();
                    (face[(i + 1) % 3], face[(i + 2) % 3])
                })
                .collect();
            let start = *next.keys().next().unwrap();
            let mut cur = start;
            let mut steps = 0;
            loop {
                cur = next[&cur];
                steps += 1;
                if cur == start {
                    break;
                }
            }
            if steps != incident.len() {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
        Ok(())
    }
}

/// V - E + F.
pub fn euler_characteristic(mesh: &TriangleMesh) -> i64 {
    mesh.vertex_count() as i64 - mesh.edge_count() as i64 + mesh.face_count() as i64
}

/// Genus of a closed orientable surface, (2 - chi) / 2.
pub fn genus(mesh: &TriangleMesh) -> Result<u32, MeshError> {
    let chi = euler_characteristic(mesh);
    if chi % 2 != 0 {
        return Err(MeshError::OddEulerCharacteristic { chi });
    }
    Ok(((2 - chi) / 2) as u32)
}

/// Number of edges (equivalently faces) at each vertex.
pub fn vertex_degrees(mesh: &TriangleMesh) -> Vec<usize> {
    let mut deg = vec![0; mesh.vertex_count()];
    for &[a, b] in mesh.edges() {
        deg[a] += 1;
        deg[b] += 1;
    }
    deg
}

/// A closed polyhedral surface whose faces are triangles or hexagons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedFacePolyhedron {
    vertex_count: usize,
    faces: Vec<Vec<usize>>,
}

impl MixedFacePolyhedron {
    pub fn new(vertex_count: usize, faces: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        if faces.is_empty() || vertex_count == 0 {
            return Err(MeshError::Empty);
        }
        let mut incidence: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for (f, face) in faces.iter().enumerate() {
            if face.len() != 3 && face.len() != 6 {
                return Err(MeshError::UnsupportedFaceSize {
                    face: f,
                    size: face.len(),
                });
            }
            if let Some(&vertex) = face.iter().find(|&&v| v >= vertex_count) {
                return Err(MeshError::IndexOutOfRange {
                    face: f,
                    vertex,
                    vertex_count,
                });
            }
            if face.iter().collect::<BTreeSet<_>>().len() != face.len() {
                return Err(MeshError::DegenerateFace { face: f });
            }
            for i in 0..face.len() {
                *incidence
                    .entry(canonical(face[i], face[(i + 1) % face.len()]))
                    .or_default() += 1;
            }
        }
        if let Some((&[a, b], &count)) = incidence.iter().find(|(_, &c)| c != 2) {
            return Err(MeshError::NonManifoldEdge { a, b, count });
        }
        Ok(Self { vertex_count, faces })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn hexagon_count(&self) -> usize {
        self.faces.iter().filter(|f| f.len() == 6).count()
    }

    pub fn edge_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }
}

/// Split every hexagon into six triangles around a new centre vertex.
///
/// Centre vertices are numbered after the original vertices, in hexagon
/// order. The spokes to the centres are recorded as flat edges on the result.
pub fn dissect_hexagons(poly: &MixedFacePolyhedron) -> Result<TriangleMesh, MeshError> {
    let mut next_vertex = poly.vertex_count;
    let mut faces = Vec::new();
    let mut spokes = Vec::new();
    for face in &poly.faces {
        match face.len() {
            3 => faces.push([face[0], face[1], face[2]]),
            _ => {
                let c = next_vertex;
                next_vertex += 1;
                for i in 0..6 {
                    faces.push([face[i], face[(i + 1) % 6], c]);
                    spokes.push((face[i], c));
                }
            }
        }
    }
    let mesh = build_mesh(next_vertex, faces)?;
    let flat = spokes
        .into_iter()
        .map(|(a, b)| mesh.edge_id(a, b).expect("spoke is a mesh edge"))
        .collect();
    Ok(mesh.with_flat_edges(flat))
}
