//! Unit-edge embeddings of triangulated surfaces.
//!
//! A deltahedron is a triangulated surface embedded with every edge of
//! length 1. [`realize`] searches for such an embedding by minimizing
//!
//! ```text
//! E(p) = sum over edges (a, b) of (|p_a - p_b| - 1)^2
//! ```
//!
//! with a damped Gauss-Newton (Levenberg-Marquardt) iteration. The rigid
//! motion gauge is left free; the damping term keeps the normal equations
//! positive definite. Several starts are tried in a fixed order and the
//! first converged, non-self-intersecting result wins.

use nalgebra::{DMatrix, DVector, Rotation3, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::geom::{classify_pair, unit_normal, Contact, Vec3, EPS_GEOM};
use crate::surface::{genus, TriangleMesh};

/// Energy below which a realization counts as converged.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Accepted deviation of any edge length from 1 in a converged embedding.
pub const EDGE_LENGTH_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizeError {
    #[error("embedding has {found} points, mesh has {expected} vertices")]
    SizeMismatch { expected: usize, found: usize },
    #[error("embedding contains a non-finite coordinate")]
    NonFinite,
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("face {face} is degenerate, its normal is undefined")]
    DegenerateNormal { face: usize },
    #[error("embedding encloses zero volume")]
    ZeroVolume,
}

/// One 3D point per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    points: Vec<Vec3>,
}

impl Embedding {
    pub fn new(points: Vec<Vec3>) -> Result<Self, RealizeError> {
        if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(RealizeError::NonFinite);
        }
        Ok(Self { points })
    }

    /// Checks the point count against `mesh` as well.
    pub fn for_mesh(mesh: &TriangleMesh, points: Vec<Vec3>) -> Result<Self, RealizeError> {
        if points.len() != mesh.vertex_count() {
            return Err(RealizeError::SizeMismatch {
                expected: mesh.vertex_count(),
                found: points.len(),
            });
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, v: usize) -> Vec3 {
        self.points[v]
    }

    pub fn face_points(&self, mesh: &TriangleMesh, f: usize) -> [Vec3; 3] {
        mesh.face(f).map(|v| self.points[v])
    }

    pub fn edge_lengths(&self, mesh: &TriangleMesh) -> Vec<f64> {
        mesh.edges()
            .iter()
            .map(|&[a, b]| (self.points[a] - self.points[b]).norm())
            .collect()
    }

    pub fn max_edge_deviation(&self, mesh: &TriangleMesh) -> f64 {
        self.edge_lengths(mesh)
            .into_iter()
            .map(|l| (l - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Sum over faces of the scalar triple product, divided by 6.
    pub fn signed_volume(&self, mesh: &TriangleMesh) -> f64 {
        mesh.faces()
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|v| self.points[v]);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn centroid(&self) -> Vec3 {
        self.points.iter().sum::<Vec3>() / self.points.len() as f64
    }

    pub fn centered(&self) -> Embedding {
        let c = self.centroid();
        Embedding {
            points: self.points.iter().map(|p| p - c).collect(),
        }
    }

    /// Reflect through the plane x = 0.
    pub fn mirrored(&self) -> Embedding {
        Embedding {
            points: self.points.iter().map(|p| Vec3::new(-p.x, p.y, p.z)).collect(),
        }
    }

    pub fn transformed(&self, rotation: &Rotation3<f64>, translation: &Vec3) -> Embedding {
        Embedding {
            points: self.points.iter().map(|p| rotation * p + translation).collect(),
        }
    }

    /// Scale about the centroid so the mean edge length is 1.
    pub fn normalized_to_unit_edges(&self, mesh: &TriangleMesh) -> Embedding {
        let lengths = self.edge_lengths(mesh);
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        let c = self.centroid();
        Embedding {
            points: self.points.iter().map(|p| c + (p - c) / mean).collect(),
        }
    }
}

fn check_size(mesh: &TriangleMesh, emb: &Embedding) {
    assert_eq!(emb.len(), mesh.vertex_count(), "embedding does not match mesh");
}

/// Sum over edges of the squared deviation of the edge length from 1.
pub fn edge_energy(mesh: &TriangleMesh, emb: &Embedding) -> f64 {
    check_size(mesh, emb);
    emb.edge_lengths(mesh).into_iter().map(|l| (l - 1.0) * (l - 1.0)).sum()
}

/// Analytic gradient of [`edge_energy`], one vector per vertex.
pub fn energy_gradient(mesh: &TriangleMesh, emb: &Embedding) -> Result<Vec<Vec3>, RealizeError> {
    check_size(mesh, emb);
    let mut grad = vec![Vec3::zeros(); mesh.vertex_count()];
    for (id, &[a, b]) in mesh.edges().iter().enumerate() {
        let d = emb.points[a] - emb.points[b];
        let len = d.norm();
        if len == 0.0 {
            return Err(RealizeError::ZeroLengthEdge { edge: id });
        }
        let g = d * (2.0 * (len - 1.0) / len);
        grad[a] += g;
        grad[b] -= g;
    }
    Ok(grad)
}

#[derive(Debug, Clone)]
pub struct RealizeOptions {
    /// Convergence threshold on the edge energy.
    pub tolerance: f64,
    /// Number of starts to try, including the supplied and spectral ones.
    pub max_restarts: usize,
    pub seed: u64,
    /// Levenberg-Marquardt iterations per start.
    pub max_iterations: usize,
    /// Try the Laplacian eigenvector embedding before random starts.
    pub spectral_start: bool,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_restarts: 64,
            seed: 0,
            max_iterations: 400,
            spectral_start: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RealizationReport {
    pub embedding: Embedding,
    pub final_energy: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub self_intersecting: bool,
    pub max_edge_deviation: f64,
}

/// Search for a unit-edge embedding of `mesh`.
///
/// Starts are tried in order: `init` (if given), the spectral start (if
/// enabled), then seeded Gaussian starts with standard deviation `sqrt(F)/4`.
/// The first converged embedding without self-intersections is returned.
/// Failing that, the first converged one (flagged self-intersecting), and
/// failing that the lowest-energy result with `converged == false`.
///
/// Genus-0 results are centred and, if needed, mirrored so the mesh
/// orientation faces outward.
pub fn realize(
    mesh: &TriangleMesh,
    init: Option<&Embedding>,
    opts: &RealizeOptions,
) -> Result<RealizationReport, RealizeError> {
    if let Some(init) = init {
        if init.len() != mesh.vertex_count() {
            return Err(RealizeError::SizeMismatch {
                expected: mesh.vertex_count(),
                found: init.len(),
            });
        }
    }
    let spherical = genus(mesh).map(|g| g == 0).unwrap_or(false);
    let sigma = (mesh.face_count() as f64).sqrt() / 4.0;
    let spectral = if opts.spectral_start {
        spectral_start(mesh)
    } else {
        None
    };
    let mut fixed: Vec<Vec<Vec3>> = Vec::new();
    if let Some(init) = init {
        fixed.push(init.points.clone());
    }
    if let Some(s) = spectral {
        fixed.push(s.points);
    }

    let mut first_converged: Option<RealizationReport> = None;
    let mut best: Option<RealizationReport> = None;
    let total = opts.max_restarts.max(1);
    for start in 0..total {
        let x0 = match fixed.get(start) {
            Some(p) => p.clone(),
            None => random_start(mesh.vertex_count(), sigma, opts.seed, start as u64),
        };
        let (points, energy) = levenberg_marquardt(mesh, x0, opts);
        let mut emb = Embedding { points }.centered();
        if spherical && emb.signed_volume(mesh) < 0.0 {
            emb = emb.mirrored();
        }
        let converged = energy < opts.tolerance;
        let self_intersecting = converged && self_intersects(mesh, &emb).intersecting;
        let report = RealizationReport {
            max_edge_deviation: emb.max_edge_deviation(mesh),
            embedding: emb,
            final_energy: energy,
            converged,
            restarts_used: start + 1,
            self_intersecting,
        };
        if converged && !self_intersecting {
            return Ok(report);
        }
        if converged && first_converged.is_none() {
            first_converged = Some(report.clone());
        }
        if best.as_ref().is_none_or(|b| report.final_energy < b.final_energy) {
            best = Some(report);
        }
    }
    let mut out = first_converged.or(best).expect("at least one start");
    out.restarts_used = total;
    Ok(out)
}

fn random_start(n: usize, sigma: f64, seed: u64, stream: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = Normal::new(0.0, sigma).expect("positive sigma");
    (0..n)
        .map(|_| {
            Vec3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            )
        })
        .collect()
}

/// Coordinates from the three smallest nontrivial eigenvectors of the graph
/// Laplacian, scaled to unit mean edge length.
pub fn spectral_start(mesh: &TriangleMesh) -> Option<Embedding> {
    let n = mesh.vertex_count();
    if n < 4 {
        return None;
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &[a, b] in mesh.edges() {
        lap[(a, b)] -= 1.0;
        lap[(b, a)] -= 1.0;
        lap[(a, a)] += 1.0;
        lap[(b, b)] += 1.0;
    }
    let eig = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let cols = [order[1], order[2], order[3]];
    let points: Vec<Vec3> = (0..n)
        .map(|v| {
            Vec3::new(
                eig.eigenvectors[(v, cols[0])],
                eig.eigenvectors[(v, cols[1])],
                eig.eigenvectors[(v, cols[2])],
            )
        })
        .collect();
    let emb = Embedding { points };
    let lengths = emb.edge_lengths(mesh);
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    (mean > 1e-9).then(|| emb.normalized_to_unit_edges(mesh))
}

/// Damped Gauss-Newton on the edge residuals r_e = |p_a - p_b| - 1.
///
/// Iterates well past `opts.tolerance` (down to round-off) so converged
/// embeddings have edge lengths accurate to near machine precision.
fn levenberg_marquardt(mesh: &TriangleMesh, mut x: Vec<Vec3>, opts: &RealizeOptions) -> (Vec<Vec3>, f64) {
    const FLOOR: f64 = 1e-28;
    let n = 3 * x.len();
    let energy_of = |x: &[Vec3]| -> f64 {
        mesh.edges()
            .iter()
            .map(|&[a, b]| {
                let r = (x[a] - x[b]).norm() - 1.0;
                r * r
            })
            .sum()
    };
    let mut energy = energy_of(&x);
    let mut lambda = 1e-3;
    let mut stalled = 0;
    for _ in 0..opts.max_iterations {
        if energy < FLOOR {
            break;
        }
        let mut jtj = DMatrix::<f64>::zeros(n, n);
        let mut jtr = DVector::<f64>::zeros(n);
        for &[a, b] in mesh.edges() {
            let d = x[a] - x[b];
            let len = d.norm();
            let u = if len > 1e-12 { d / len } else { Vec3::x() };
            let r = len - 1.0;
            let uu = u * u.transpose();
            for i in 0..3 {
                jtr[3 * a + i] += r * u[i];
                jtr[3 * b + i] -= r * u[i];
                for j in 0..3 {
                    jtj[(3 * a + i, 3 * a + j)] += uu[(i, j)];
                    jtj[(3 * b + i, 3 * b + j)] += uu[(i, j)];
                    jtj[(3 * a + i, 3 * b + j)] -= uu[(i, j)];
                    jtj[(3 * b + i, 3 * a + j)] -= uu[(i, j)];
                }
            }
        }
        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = jtj.clone();
            for i in 0..n {
                damped[(i, i)] += lambda;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&jtr));
            let trial: Vec<Vec3> = x
                .iter()
                .enumerate()
                .map(|(v, p)| p + Vec3::new(step[3 * v], step[3 * v + 1], step[3 * v + 2]))
                .collect();
            let e = energy_of(&trial);
            if e < energy {
                if energy - e < 1e-10 * energy {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                x = trial;
                energy = e;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        // round-off floor or a flat local minimum
        if !accepted || (stalled > 20 && energy > opts.tolerance) {
            break;
        }
    }
    (x, energy)
}

/// Result of [`self_intersects`]: offending face pairs, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfIntersection {
    pub intersecting: bool,
    pub pairs: Vec<(usize, usize)>,
}

/// Face pairs that meet beyond their shared vertex or edge, including
/// touching contact. Coplanar neighbours across an edge are fine.
pub fn self_intersects(mesh: &TriangleMesh, emb: &Embedding) -> SelfIntersection {
    check_size(mesh, emb);
    let tris: Vec<[Vec3; 3]> = (0..mesh.face_count()).map(|f| emb.face_points(mesh, f)).collect();
    let mut pairs = Vec::new();
    for f in 0..mesh.face_count() {
        for g in f + 1..mesh.face_count() {
            let c = classify_pair(&tris[f], &mesh.face(f), &tris[g], &mesh.face(g), EPS_GEOM);
            if c != Contact::Disjoint {
                pairs.push((f, g));
            }
        }
    }
    SelfIntersection {
        intersecting: !pairs.is_empty(),
        pairs,
    }
}

/// Interior dihedral angle at every edge, in degrees, indexed by edge id.
///
/// Assumes faces are wound counterclockwise seen from outside. Convex edges
/// are below 180, flat edges 180, reflex edges above.
pub fn dihedral_angles(mesh: &TriangleMesh, emb: &Embedding) -> Result<Vec<f64>, RealizeError> {
    check_size(mesh, emb);
    let normals = (0..mesh.face_count())
        .map(|f| unit_normal(&emb.face_points(mesh, f)).ok_or(RealizeError::DegenerateNormal { face: f }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..mesh.edge_count())
        .map(|e| {
            let [a, b] = mesh.edge(e);
            let [f, g] = mesh.edge_faces(e);
            let d = mesh.face(g).into_iter().find(|&v| v != a && v != b).unwrap();
            let (nf, ng) = (normals[f], normals[g]);
            let bend = nf.cross(&ng).norm().atan2(nf.dot(&ng)).to_degrees();
            if nf.dot(&(emb.point(d) - emb.point(a))) <= 0.0 {
                180.0 - bend
            } else {
                180.0 + bend
            }
        })
        .collect())
}

/// Flip all faces if the embedding encloses negative signed volume.
pub fn canonicalize_orientation(mesh: &TriangleMesh, emb: &Embedding) -> Result<TriangleMesh, RealizeError> {
    check_size(mesh, emb);
    let vol = emb.signed_volume(mesh);
    if vol.abs() < EPS_GEOM {
        return Err(RealizeError::ZeroVolume);
    }
    Ok(if vol < 0.0 { mesh.flipped() } else { mesh.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_mesh;

    fn octahedron() -> (TriangleMesh, Embedding) {
        let mesh = build_mesh(
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
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pts = vec![
            Vec3::new(s, 0., 0.),
            Vec3::new(-s, 0., 0.),
            Vec3::new(0., s, 0.),
            Vec3::new(0., -s, 0.),
            Vec3::new(0., 0., s),
            Vec3::new(0., 0., -s),
        ];
        (mesh, Embedding::new(pts).unwrap())
    }

    #[test]
    fn octahedron_energy() {
        let (mesh, emb) = octahedron();
        assert!(edge_energy(&mesh, &emb) < 1e-12);
        let doubled = Embedding::new(emb.points().iter().map(|p| p * 2.0).collect()).unwrap();
        assert!((edge_energy(&mesh, &doubled) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_minimum() {
        let (mesh, emb) = octahedron();
        let g = energy_gradient(&mesh, &emb).unwrap();
        let norm: f64 = g.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        assert!(norm < 1e-10);
    }

    #[test]
    fn stretched_edge_gradient_is_antisymmetric() {
        // every edge has unit length except 0-1, which is 1.2
        let tet = build_mesh(4, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]]).unwrap();
        let z3 = (0.64f64 - 0.175 * 0.175).sqrt();
        let pts = vec![
            Vec3::new(-0.6, 0., 0.),
            Vec3::new(0.6, 0., 0.),
            Vec3::new(0., 0.8, 0.),
            Vec3::new(0., 0.175, z3),
        ];
        let emb = Embedding::new(pts).unwrap();
        let g = energy_gradient(&tet, &emb).unwrap();
        assert!((g[0] + g[1]).norm() < 1e-14);
        assert!((g[0] - Vec3::new(-0.4, 0., 0.)).norm() < 1e-14);
        assert!(g[2].norm() < 1e-14 && g[3].norm() < 1e-14);
    }

    #[test]
    fn zero_length_edge_is_an_error() {
        let (mesh, emb) = octahedron();
        let mut pts = emb.points().to_vec();
        pts[2] = pts[0];
        let emb = Embedding::new(pts).unwrap();
        assert!(matches!(
            energy_gradient(&mesh, &emb),
            Err(RealizeError::ZeroLengthEdge { .. })
        ));
    }

    #[test]
    fn octahedron_dihedrals() {
        let (mesh, emb) = octahedron();
        let expected = (-1.0f64 / 3.0).acos().to_degrees();
        for d in dihedral_angles(&mesh, &emb).unwrap() {
            assert!((d - expected).abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn orientation_canonicalization() {
        let (mesh, emb) = octahedron();
        assert!(emb.signed_volume(&mesh) > 0.0);
        let reversed = mesh.flipped();
        assert!(emb.signed_volume(&reversed) < 0.0);
        let fixed = canonicalize_orientation(&reversed, &emb).unwrap();
        assert_eq!(fixed, mesh);
        assert_eq!(canonicalize_orientation(&mesh, &emb).unwrap(), mesh);
        let flat = Embedding::new(emb.points().iter().map(|p| Vec3::new(p.x, p.y, 0.0)).collect()).unwrap();
        assert_eq!(canonicalize_orientation(&mesh, &flat), Err(RealizeError::ZeroVolume));
    }

    #[test]
    fn realizes_octahedron_from_random_starts() {
        let (mesh, _) = octahedron();
        let opts = RealizeOptions {
            spectral_start: false,
            ..Default::default()
        };
        let r = realize(&mesh, None, &opts).unwrap();
        assert!(r.converged && !r.self_intersecting);
        assert!(r.final_energy < 1e-10);
        assert!(r.max_edge_deviation < 1e-4);
        assert!(r.embedding.signed_volume(&mesh) > 0.0);
    }

    #[test]
    fn crossing_pyramids_self_intersect() {
        let (mesh, emb) = octahedron();
        let mut pts = emb.points().to_vec();
        // drag the +z apex below and aside of the -z apex: the two pyramids cross
        pts[4] = Vec3::new(0.6, 0.0, -0.8);
        let emb = Embedding::new(pts).unwrap();
        assert!(self_intersects(&mesh, &emb).intersecting);
        let (mesh, emb) = octahedron();
        assert!(!self_intersects(&mesh, &emb).intersecting);
    }
}
