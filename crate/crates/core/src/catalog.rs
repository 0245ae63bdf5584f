//! Built-in shapes, torus generators and OFF file I/O.
//!
//! Face lists ship as OFF files under `data/` and are compiled in. Reference
//! embeddings are closed-form where one exists; the snub disphenoid is
//! realized once by the optimizer on first use.
//!
//! OFF files here may omit the coordinate block: after the counts line, a
//! line with exactly three tokens starts `V` coordinate lines, anything else
//! is the first face line.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::geom::Vec3;
use crate::realize::{edge_energy, realize, Embedding, RealizeOptions};
use crate::surface::{build_mesh, dissect_hexagons, genus, MeshError, MixedFacePolyhedron, TriangleMesh};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("OFF syntax error on line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: {size}-sided face; only triangles and hexagons are supported")]
    UnsupportedFaceSize { line: usize, size: usize },
    #[error("torus grid {m}x{n} is too small; both sides must be at least 3")]
    InvalidGrid { m: usize, n: usize },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Convex,
    Nonconvex,
    DegenerateFlatEdges,
    Torus,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub mesh: TriangleMesh,
    /// Unit-edge embedding, outward oriented for spheres.
    pub reference_embedding: Option<Embedding>,
    pub tags: BTreeSet<Tag>,
    pub notes: String,
    /// The polyhedron before hexagon dissection, when there was one.
    pub undissected: Option<MixedFacePolyhedron>,
}

impl CatalogEntry {
    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

/// One-line description of an entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogSummary {
    pub name: String,
    pub vertices: usize,
    pub faces: usize,
    pub edges: usize,
    pub genus: u32,
    pub tags: Vec<Tag>,
    pub has_reference_embedding: bool,
}

impl From<&CatalogEntry> for CatalogSummary {
    fn from(e: &CatalogEntry) -> Self {
        Self {
            name: e.name.clone(),
            vertices: e.mesh.vertex_count(),
            faces: e.mesh.face_count(),
            edges: e.mesh.edge_count(),
            genus: genus(&e.mesh).unwrap_or(0),
            tags: e.tags.iter().copied().collect(),
            has_reference_embedding: e.reference_embedding.is_some(),
        }
    }
}

struct Builtin {
    name: &'static str,
    off: &'static str,
    tags: &'static [Tag],
    notes: &'static str,
}

macro_rules! builtin {
    ($name:literal, $tags:expr, $notes:literal) => {
        Builtin {
            name: $name,
            off: include_str!(concat!("../data/", $name, ".off")),
            tags: $tags,
            notes: $notes,
        }
    };
}

const CONVEX: &[Tag] = &[Tag::Convex];
const NONCONVEX: &[Tag] = &[Tag::Nonconvex];

const BUILTINS: &[Builtin] = &[
    builtin!("tetrahedron", CONVEX, "4 faces"),
    builtin!("triangular_dipyramid", CONVEX, "6 faces; two tetrahedra sharing a face"),
    builtin!("octahedron", CONVEX, "8 faces; 12 modules"),
    builtin!("pentagonal_dipyramid", CONVEX, "10 faces; 15 modules"),
    builtin!(
        "snub_disphenoid",
        CONVEX,
        "12 faces; no simple closed form, reference embedding is an optimizer output"
    ),
    builtin!("triaugmented_triangular_prism", CONVEX, "14 faces"),
    builtin!("gyroelongated_square_dipyramid", CONVEX, "16 faces"),
    builtin!("icosahedron", CONVEX, "20 faces"),
    builtin!(
        "tetra_capped_12",
        NONCONVEX,
        "tetrahedron with a regular tetrahedron on each face; the caps rise s*sqrt(2/3), \
         the height of a regular tetrahedron, not the Sonobe cap height s/sqrt(6)"
    ),
    builtin!(
        "cube_capped_24",
        NONCONVEX,
        "cube with an equilateral square pyramid on each face"
    ),
    builtin!(
        "truncated_tetrahedron",
        &[Tag::Nonconvex, Tag::DegenerateFlatEdges],
        "truncated tetrahedron with each hexagon cut into six triangles; the spokes \
         have 180 degree dihedrals and models built this way seem to be less stable"
    ),
    builtin!(
        "csaszar_torus",
        &[Tag::Torus],
        "7-vertex torus, faces {i,i+1,i+3} and {i,i+2,i+3} mod 7; no embedding is supplied"
    ),
];

/// Result of parsing an OFF file.
#[derive(Debug, Clone)]
pub struct OffFile {
    pub surface: OffSurface,
    /// Coordinates, when the file carries them.
    pub coordinates: Option<Vec<Vec3>>,
}

#[derive(Debug, Clone)]
pub enum OffSurface {
    Triangles(TriangleMesh),
    Mixed(MixedFacePolyhedron),
}

impl OffFile {
    /// The triangle mesh, dissecting hexagons if there are any.
    pub fn triangle_mesh(&self) -> Result<TriangleMesh, MeshError> {
        match &self.surface {
            OffSurface::Triangles(m) => Ok(m.clone()),
            OffSurface::Mixed(p) => dissect_hexagons(p),
        }
    }

    /// Coordinates for [`OffFile::triangle_mesh`]: the file's points followed
    /// by the centroid of each hexagon.
    pub fn triangle_coordinates(&self) -> Option<Vec<Vec3>> {
        let mut pts = self.coordinates.clone()?;
        if let OffSurface::Mixed(p) = &self.surface {
            let base = pts.clone();
            for hex in p.faces().iter().filter(|f| f.len() == 6) {
                pts.push(hex.iter().map(|&v| base[v]).sum::<Vec3>() / 6.0);
            }
        }
        Some(pts)
    }
}

pub fn parse_off(text: &str) -> Result<OffFile, CatalogError> {
    let end = text.lines().count() + 1;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let syntax = |line: usize, message: &str| CatalogError::SyntaxError {
        line,
        message: message.to_string(),
    };

    let (line, header) = lines.next().ok_or_else(|| syntax(1, "empty file"))?;
    if header != "OFF" {
        return Err(syntax(line, "expected OFF header"));
    }
    let (counts_line, counts) = lines.next().ok_or_else(|| syntax(line + 1, "missing counts line"))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| syntax(counts_line, "counts must be non-negative integers"))?;
    let [v, f, e] = counts[..] else {
        return Err(syntax(counts_line, "expected \"V F E\""));
    };

    let mut lines = lines.peekable();
    let mut coordinates = None;
    if lines.peek().is_some_and(|(_, l)| l.split_whitespace().count() == 3) {
        let mut pts = Vec::with_capacity(v);
        for _ in 0..v {
            let (line, l) = lines.next().ok_or_else(|| syntax(end, "missing coordinate lines"))?;
            let xyz: Vec<f64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| syntax(line, "bad coordinate"))?;
            let [x, y, z] = xyz[..] else {
                return Err(syntax(line, "expected three coordinates"));
            };
            pts.push(Vec3::new(x, y, z));
        }
        coordinates = Some(pts);
    }

    let mut faces = Vec::with_capacity(f);
    for _ in 0..f {
        let (line, l) = lines.next().ok_or_else(|| syntax(end, "missing face lines"))?;
        let nums: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| syntax(line, "face entries must be non-negative integers"))?;
        let (&k, idx) = nums.split_first().expect("line is non-empty");
        if idx.len() != k {
            return Err(syntax(
                line,
                &format!("face declares {k} vertices but lists {}", idx.len()),
            ));
        }
        if k != 3 && k != 6 {
            return Err(CatalogError::UnsupportedFaceSize { line, size: k });
        }
        faces.push(idx.to_vec());
    }
    if let Some((line, _)) = lines.next() {
        return Err(syntax(line, "unexpected trailing data"));
    }

    let surface = if faces.iter().all(|f| f.len() == 3) {
        OffSurface::Triangles(build_mesh(v, faces.into_iter().map(|f| [f[0], f[1], f[2]]).collect())?)
    } else {
        OffSurface::Mixed(MixedFacePolyhedron::new(v, faces)?)
    };
    let edges = match &surface {
        OffSurface::Triangles(m) => m.edge_count(),
        OffSurface::Mixed(p) => p.edge_count(),
    };
    if e != 0 && e != edges {
        return Err(syntax(counts_line, &format!("declares {e} edges, faces give {edges}")));
    }
    Ok(OffFile { surface, coordinates })
}

/// Serialize a mesh, with coordinates when an embedding is given.
pub fn write_off(mesh: &TriangleMesh, emb: Option<&Embedding>) -> String {
    let mut out = String::from("OFF\n");
    if let Some(name) = mesh.name() {
        writeln!(out, "# {name}").unwrap();
    }
    writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.face_count(),
        mesh.edge_count()
    )
    .unwrap();
    if let Some(emb) = emb {
        for p in emb.points() {
            writeln!(out, "{:?} {:?} {:?}", p.x, p.y, p.z).unwrap();
        }
    }
    for [a, b, c] in mesh.faces() {
        writeln!(out, "3 {a} {b} {c}").unwrap();
    }
    out
}

pub fn load_off_file(path: &Path) -> Result<OffFile, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_off(&text)
}

/// m x n grid on a torus, each square split along the (i,j)-(i+1,j+1)
/// diagonal. V = mn, F = 2mn, E = 3mn.
pub fn torus_grid(m: usize, n: usize) -> Result<TriangleMesh, CatalogError> {
    if m < 3 || n < 3 {
        return Err(CatalogError::InvalidGrid { m, n });
    }
    let v = |i: usize, j: usize| (i % m) * n + (j % n);
    let mut faces = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            faces.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            faces.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    Ok(build_mesh(m * n, faces)?.with_name(format!("torus_grid_{m}x{n}")))
}

/// The catalog: built-in entries, optionally with face lists read from a
/// directory instead.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            let entries = BUILTINS
                .iter()
                .map(|b| entry(b, b.off).expect("built-in catalog data is valid"))
                .collect();
            Catalog { entries }
        })
    }

    /// Like [`Catalog::builtin`], but `dir/<name>.off` replaces the built-in
    /// face list when present. Coordinates in such a file become the reference
    /// embedding; otherwise the closed form is used if it fits the new mesh.
    pub fn from_dir(dir: &Path) -> Result<Catalog, CatalogError> {
        let mut entries = Vec::new();
        for b in BUILTINS {
            let path = dir.join(format!("{}.off", b.name));
            if !path.exists() {
                entries.push(Catalog::builtin().get(b.name)?.clone());
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| CatalogError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            entries.push(entry(b, &text)?);
        }
        Ok(Catalog { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| CatalogError::UnknownName(name.to_string()))
    }

    pub fn summaries(&self) -> Vec<CatalogSummary> {
        self.entries.iter().map(CatalogSummary::from).collect()
    }
}

pub fn list_catalog() -> Vec<CatalogSummary> {
    Catalog::builtin().summaries()
}

pub fn get(name: &str) -> Result<CatalogEntry, CatalogError> {
    Catalog::builtin().get(name).cloned()
}

fn entry(b: &Builtin, text: &str) -> Result<CatalogEntry, CatalogError> {
    let off = parse_off(text)?;
    let mesh = off.triangle_mesh()?.with_name(b.name);
    let undissected = match &off.surface {
        OffSurface::Mixed(p) => Some(p.clone()),
        OffSurface::Triangles(_) => None,
    };
    let candidate = match off.triangle_coordinates() {
        Some(pts) => Some(pts),
        None => reference_points(b.name, &mesh),
    };
    let reference_embedding = candidate
        .filter(|p| p.len() == mesh.vertex_count())
        .and_then(|p| Embedding::new(p).ok())
        .filter(|emb| edge_energy(&mesh, emb) < 1e-10)
        .map(|emb| {
            let emb = emb.centered();
            if emb.signed_volume(&mesh) < 0.0 {
                emb.mirrored()
            } else {
                emb
            }
        });
    Ok(CatalogEntry {
        name: b.name.to_string(),
        mesh,
        reference_embedding,
        tags: b.tags.iter().copied().collect(),
        notes: b.notes.to_string(),
        undissected,
    })
}

fn polar(r: f64, angle: f64, z: f64) -> Vec3 {
    Vec3::new(r * angle.cos(), r * angle.sin(), z)
}

fn tetrahedron_points() -> Vec<Vec3> {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    vec![
        Vec3::new(s, s, s),
        Vec3::new(s, -s, -s),
        Vec3::new(-s, s, -s),
        Vec3::new(-s, -s, s),
    ]
}

/// Put each vertex past `base.len()` at the centroid of its base neighbours,
/// lifted by `height` away from the origin.
fn cap_base(mesh: &TriangleMesh, base: Vec<Vec3>, height: f64) -> Vec<Vec3> {
    let adjacency = mesh.adjacency();
    let mut pts = base.clone();
    for neighbours in &adjacency[base.len()..] {
        let feet: Vec<Vec3> = neighbours
            .iter()
            .filter(|&&u| u < base.len())
            .map(|&u| base[u])
            .collect();
        let c = feet.iter().sum::<Vec3>() / feet.len() as f64;
        pts.push(c + c.normalize() * height);
    }
    pts
}

fn reference_points(name: &str, mesh: &TriangleMesh) -> Option<Vec<Vec3>> {
    let third = 2.0 * PI / 3.0;
    let r3 = 1.0 / 3f64.sqrt();
    let pts = match name {
        "tetrahedron" => tetrahedron_points(),
        "triangular_dipyramid" => {
            let h = (2.0f64 / 3.0).sqrt();
            let mut p = vec![Vec3::new(0.0, 0.0, h), Vec3::new(0.0, 0.0, -h)];
            p.extend((0..3).map(|k| polar(r3, third * k as f64, 0.0)));
            p
        }
        "octahedron" => {
            let s = FRAC_1_SQRT_2;
            vec![
                Vec3::new(s, 0.0, 0.0),
                Vec3::new(-s, 0.0, 0.0),
                Vec3::new(0.0, s, 0.0),
                Vec3::new(0.0, -s, 0.0),
                Vec3::new(0.0, 0.0, s),
                Vec3::new(0.0, 0.0, -s),
            ]
        }
        "pentagonal_dipyramid" => {
            let r = 1.0 / (2.0 * (PI / 5.0).sin());
            let h = (1.0 - r * r).sqrt();
            let mut p = vec![Vec3::new(0.0, 0.0, h), Vec3::new(0.0, 0.0, -h)];
            p.extend((0..5).map(|k| polar(r, 2.0 * PI * k as f64 / 5.0, 0.0)));
            p
        }
        "triaugmented_triangular_prism" => {
            let mut p: Vec<Vec3> = [0.5, -0.5]
                .iter()
                .flat_map(|&z| (0..3).map(move |k| polar(r3, third * k as f64, z)))
                .collect();
            let d = r3 * (PI / 3.0).cos() + FRAC_1_SQRT_2;
            p.extend((0..3).map(|k| polar(d, third * k as f64 + PI / 3.0, 0.0)));
            p
        }
        "gyroelongated_square_dipyramid" => {
            // square antiprism with unit edges has height 2^(-1/4)
            let s = FRAC_1_SQRT_2;
            let h = 2f64.powf(-0.25);
            let mut p = vec![Vec3::new(0.0, 0.0, h / 2.0 + s), Vec3::new(0.0, 0.0, -h / 2.0 - s)];
            p.extend((0..4).map(|k| polar(s, PI / 2.0 * k as f64, h / 2.0)));
            p.extend((0..4).map(|k| polar(s, PI / 2.0 * k as f64 + PI / 4.0, -h / 2.0)));
            p
        }
        "icosahedron" => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            let mut p = Vec::new();
            for a in [-1.0, 1.0] {
                for b in [-1.0, 1.0] {
                    p.push(Vec3::new(0.0, a, b * phi) / 2.0);
                    p.push(Vec3::new(a, b * phi, 0.0) / 2.0);
                    p.push(Vec3::new(b * phi, 0.0, a) / 2.0);
                }
            }
            p
        }
        "snub_disphenoid" => {
            let opts = RealizeOptions::default();
            let report = realize(mesh, None, &opts).ok()?;
            (report.converged && !report.self_intersecting).then(|| report.embedding.points().to_vec())?
        }
        "tetra_capped_12" => cap_base(mesh, tetrahedron_points(), (2.0f64 / 3.0).sqrt()),
        "cube_capped_24" => {
            let mut cube = Vec::new();
            for x in [-0.5, 0.5] {
                for y in [-0.5, 0.5] {
                    for z in [-0.5, 0.5] {
                        cube.push(Vec3::new(x, y, z));
                    }
                }
            }
            cap_base(mesh, cube, FRAC_1_SQRT_2)
        }
        "truncated_tetrahedron" => {
            let raw: [[f64; 3]; 12] = [
                [-3., -1., 1.],
                [-3., 1., -1.],
                [-1., -3., 1.],
                [-1., -1., 3.],
                [-1., 1., -3.],
                [-1., 3., -1.],
                [1., -3., -1.],
                [1., -1., -3.],
                [1., 1., 3.],
                [1., 3., 1.],
                [3., -1., -1.],
                [3., 1., 1.],
            ];
            let scale = 1.0 / (2.0 * 2f64.sqrt());
            let base: Vec<Vec3> = raw.iter().map(|p| Vec3::from(*p) * scale).collect();
            // hexagon centres sit in the hexagon planes, so the lift is zero
            cap_base(mesh, base, 0.0)
        }
        _ => return None,
    };
    Some(pts)
}

/// Vertex degree histogram, degree -> count.
pub fn degree_histogram(mesh: &TriangleMesh) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in crate::surface::vertex_degrees(mesh) {
        *h.entry(d).or_default() += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realize::{dihedral_angles, self_intersects};
    use crate::surface::{euler_characteristic, vertex_degrees};

    #[test]
    fn catalog_contents() {
        let all = list_catalog();
        assert_eq!(all.len(), 12);
        let convex: Vec<usize> = all
            .iter()
            .filter(|s| s.tags.contains(&Tag::Convex))
            .map(|s| s.faces)
            .collect();
        assert_eq!(convex, vec![4, 6, 8, 10, 12, 14, 16, 20]);
        for s in &all {
            assert_eq!(2 * s.edges, 3 * s.faces, "{}", s.name);
            assert_eq!(s.faces % 2, 0);
        }
    }

    #[test]
    fn named_counts() {
        let p = get("pentagonal_dipyramid").unwrap();
        assert_eq!(
            (p.mesh.vertex_count(), p.mesh.face_count(), p.mesh.edge_count()),
            (7, 10, 15)
        );
        let c = get("cube_capped_24").unwrap();
        assert_eq!(
            (c.mesh.vertex_count(), c.mesh.face_count(), c.mesh.edge_count()),
            (14, 24, 36)
        );
        assert_eq!(euler_characteristic(&c.mesh), 2);
        let o = get("octahedron").unwrap();
        assert!(vertex_degrees(&o.mesh).iter().all(|&d| d == 4));
        assert_eq!(edge_energy(&o.mesh, o.reference_embedding.as_ref().unwrap()), 0.0);
        let s = get("snub_disphenoid").unwrap();
        assert_eq!(degree_histogram(&s.mesh), BTreeMap::from([(4, 4), (5, 4)]));
        assert_eq!(
            get("nosuchshape").unwrap_err(),
            CatalogError::UnknownName("nosuchshape".into())
        );
    }

    #[test]
    fn reference_embeddings() {
        for e in Catalog::builtin().entries() {
            let Some(emb) = &e.reference_embedding else {
                assert!(e.has_tag(Tag::Torus), "{} lacks an embedding", e.name);
                continue;
            };
            assert!(edge_energy(&e.mesh, emb) < 1e-20, "{}", e.name);
            assert!(emb.signed_volume(&e.mesh) > 0.0, "{}", e.name);
            assert!(!self_intersects(&e.mesh, emb).intersecting, "{}", e.name);
            let d = dihedral_angles(&e.mesh, emb).unwrap();
            let max = d.iter().cloned().fold(0.0, f64::max);
            if e.has_tag(Tag::Convex) {
                assert!(max < 180.0, "{}: {max}", e.name);
            } else {
                assert!(max > 180.0 - 1e-6, "{}: {max}", e.name);
            }
        }
    }

    #[test]
    fn capped_shapes_are_reflex() {
        for name in ["tetra_capped_12", "cube_capped_24"] {
            let e = get(name).unwrap();
            let d = dihedral_angles(&e.mesh, e.reference_embedding.as_ref().unwrap()).unwrap();
            assert!(d.iter().any(|&x| x > 180.0 + 1.0), "{name}");
        }
    }

    #[test]
    fn dissected_truncated_tetrahedron() {
        let e = get("truncated_tetrahedron").unwrap();
        assert!(e.has_tag(Tag::DegenerateFlatEdges));
        assert_eq!(
            (e.mesh.vertex_count(), e.mesh.face_count(), e.mesh.edge_count()),
            (16, 28, 42)
        );
        assert_eq!(e.undissected.as_ref().unwrap().hexagon_count(), 4);
        let d = dihedral_angles(&e.mesh, e.reference_embedding.as_ref().unwrap()).unwrap();
        assert_eq!(e.mesh.flat_edges().len(), 24);
        for &f in e.mesh.flat_edges() {
            assert!((d[f] - 180.0).abs() < 1e-6);
        }
    }

    #[test]
    fn torus_grids() {
        let t = torus_grid(3, 3).unwrap();
        assert_eq!((t.vertex_count(), t.face_count(), t.edge_count()), (9, 18, 27));
        assert_eq!(euler_characteristic(&t), 0);
        let t = torus_grid(4, 5).unwrap();
        assert_eq!((t.vertex_count(), t.face_count(), t.edge_count()), (20, 40, 60));
        assert_eq!(genus(&t).unwrap(), 1);
        assert_eq!(torus_grid(2, 3).unwrap_err(), CatalogError::InvalidGrid { m: 2, n: 3 });
        let c = get("csaszar_torus").unwrap();
        assert_eq!(genus(&c.mesh).unwrap(), 1);
        assert!(vertex_degrees(&c.mesh).iter().all(|&d| d == 6));
    }

    #[test]
    fn off_with_coordinates() {
        let text = "OFF\n6 8 12\n2 0 0\n-2 0 0\n0 2 0\n0 -2 0\n0 0 2\n0 0 -2\n\
                    3 0 2 4\n3 0 3 5\n3 0 4 3\n3 0 5 2\n3 1 2 5\n3 1 3 4\n3 1 4 2\n3 1 5 3\n";
        let off = parse_off(text).unwrap();
        let mesh = off.triangle_mesh().unwrap();
        let emb = Embedding::new(off.coordinates.unwrap()).unwrap();
        assert!(edge_energy(&mesh, &emb) > 1.0);
        assert!(edge_energy(&mesh, &emb.normalized_to_unit_edges(&mesh)) < 1e-28);
    }

    #[test]
    fn mixed_off_with_coordinates() {
        let e = get("truncated_tetrahedron").unwrap();
        let emb = e.reference_embedding.as_ref().unwrap();
        let poly = e.undissected.as_ref().unwrap();
        let mut text = String::from("OFF\n12 8 18\n");
        for p in &emb.points()[..12] {
            text += &format!("{:?} {:?} {:?}\n", p.x, p.y, p.z);
        }
        for f in poly.faces() {
            text += &format!(
                "{} {}\n",
                f.len(),
                f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            );
        }
        let off = parse_off(&text).unwrap();
        let pts = off.triangle_coordinates().unwrap();
        assert_eq!(pts.len(), 16);
        let mesh = off.triangle_mesh().unwrap();
        assert!(edge_energy(&mesh, &Embedding::new(pts).unwrap()) < 1e-28);
    }

    #[test]
    fn off_errors() {
        let quad = "OFF\n4 1 4\n4 0 1 2 3\n";
        assert_eq!(
            parse_off(quad).unwrap_err(),
            CatalogError::UnsupportedFaceSize { line: 3, size: 4 }
        );
        assert!(matches!(
            parse_off("OFX\n"),
            Err(CatalogError::SyntaxError { line: 1, .. })
        ));
        assert!(matches!(
            parse_off("OFF\n# c\n4 4 6\n3 0 1 2 3\n"),
            Err(CatalogError::SyntaxError { line: 4, .. })
        ));
        let bad = "OFF\n4 4 6\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n3 0 1 2\n";
        assert!(matches!(parse_off(bad), Err(CatalogError::SyntaxError { line: 7, .. })));
        let nm = "OFF\n5 6 0\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n3 0 1 4\n3 1 0 4\n";
        assert!(matches!(
            parse_off(nm),
            Err(CatalogError::Mesh(MeshError::NonManifoldEdge { .. }))
        ));
    }

    #[test]
    fn round_trip() {
        for e in Catalog::builtin().entries() {
            let text = write_off(&e.mesh, e.reference_embedding.as_ref());
            let back = parse_off(&text).unwrap();
            assert_eq!(back.triangle_mesh().unwrap(), e.mesh, "{}", e.name);
            if let Some(emb) = &e.reference_embedding {
                assert_eq!(back.coordinates.as_deref(), Some(emb.points()));
            }
        }
    }

    #[test]
    fn non_manifold_vertex() {
        // glue an icosahedron vertex to its antipode: two fans meet at one point
        let ico = get("icosahedron").unwrap();
        let adj = ico.mesh.adjacency();
        let far = (1..12)
            .find(|&v| !adj[0].contains(&v) && adj[0].iter().all(|&u| !adj[v].contains(&u)))
            .unwrap();
        let last = 11;
        let faces: Vec<[usize; 3]> = ico
            .mesh
            .faces()
            .iter()
            .map(|f| {
                f.map(|v| {
                    if v == far {
                        0
                    } else if v == last {
                        far
                    } else {
                        v
                    }
                })
            })
            .collect();
        assert_eq!(
            build_mesh(11, faces).unwrap_err(),
            MeshError::NonManifoldVertex { vertex: 0 }
        );
    }
}
