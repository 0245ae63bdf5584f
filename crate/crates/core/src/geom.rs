//! Tolerance-aware geometric predicates shared by the realization, cap and
//! net code.
//!
//! Triangle pairs are classified relative to the simplex they share (by
//! vertex index): contact on the shared vertex or edge is never reported.

use nalgebra::{Vector2, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// Tolerance for geometric predicates, in units of the target edge length.
pub const EPS_GEOM: f64 = 1e-9;

/// How two triangles meet beyond their shared simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Contact {
    Disjoint,
    /// The triangles touch without either passing through the other.
    Touching,
    /// Interiors cross or overlap with positive area.
    Crossing,
}

pub fn triangle_normal(t: &[Vec3; 3]) -> Vec3 {
    (t[1] - t[0]).cross(&(t[2] - t[0]))
}

pub fn unit_normal(t: &[Vec3; 3]) -> Option<Vec3> {
    let n = triangle_normal(t);
    let len = n.norm();
    (len > EPS_GEOM).then(|| n / len)
}

fn aabb_overlap(a: &[Vec3; 3], b: &[Vec3; 3], eps: f64) -> bool {
    (0..3).all(|k| {
        let (amin, amax) = min_max(a.iter().map(|p| p[k]));
        let (bmin, bmax) = min_max(b.iter().map(|p| p[k]));
        amin <= bmax + eps && bmin <= amax + eps
    })
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn sign(x: f64, eps: f64) -> i8 {
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

/// Classify a pair of triangles given their vertex ids. Triangles sharing all
/// three ids are treated as the same face and reported [`Contact::Disjoint`].
pub fn classify_pair(t1: &[Vec3; 3], ids1: &[usize; 3], t2: &[Vec3; 3], ids2: &[usize; 3], eps: f64) -> Contact {
    let shared: Vec<(usize, usize)> = (0..3)
        .filter_map(|i| ids2.iter().position(|&v| v == ids1[i]).map(|j| (i, j)))
        .collect();
    match shared.len() {
        0 => {
            if !aabb_overlap(t1, t2, eps) {
                return Contact::Disjoint;
            }
            classify_unshared(t1, t2, eps)
        }
        1 => {
            let (i, j) = shared[0];
            classify_shared_vertex(&rotate(t1, i), &rotate(t2, j), eps)
        }
        2 => {
            let i = (0..3).find(|i| !shared.iter().any(|s| s.0 == *i)).unwrap();
            let j = (0..3).find(|j| !shared.iter().any(|s| s.1 == *j)).unwrap();
            classify_shared_edge(t1[(i + 1) % 3], t1[(i + 2) % 3], t1[i], t2[j], eps)
        }
        _ => Contact::Disjoint,
    }
}

fn rotate(t: &[Vec3; 3], first: usize) -> [Vec3; 3] {
    [t[first], t[(first + 1) % 3], t[(first + 2) % 3]]
}

/// Triangles with no vertex in common.
fn classify_unshared(t1: &[Vec3; 3], t2: &[Vec3; 3], eps: f64) -> Contact {
    let (Some(n1), Some(n2)) = (unit_normal(t1), unit_normal(t2)) else {
        return Contact::Disjoint;
    };
    let d2 = t2.map(|p| n1.dot(&(p - t1[0])));
    let d1 = t1.map(|p| n2.dot(&(p - t2[0])));
    let s2 = d2.map(|d| sign(d, eps));
    let s1 = d1.map(|d| sign(d, eps));
    let one_side = |s: &[i8; 3]| s.iter().all(|&x| x > 0) || s.iter().all(|&x| x < 0);
    if one_side(&s1) || one_side(&s2) {
        return Contact::Disjoint;
    }
    if s1.iter().all(|&x| x == 0) || s2.iter().all(|&x| x == 0) {
        return classify_coplanar(t1, t2, &n1, eps);
    }
    let dir = n1.cross(&n2);
    if dir.norm() < eps {
        return classify_coplanar(t1, t2, &n1, eps);
    }
    let dir = dir.normalize();
    let (lo1, hi1) = plane_interval(t1, &d1, &s1, &dir);
    let (lo2, hi2) = plane_interval(t2, &d2, &s2, &dir);
    let overlap = hi1.min(hi2) - lo1.max(lo2);
    if overlap < -eps {
        return Contact::Disjoint;
    }
    let straddles = |s: &[i8; 3]| s.contains(&1) && s.contains(&-1);
    if overlap > eps && straddles(&s1) && straddles(&s2) {
        Contact::Crossing
    } else {
        Contact::Touching
    }
}

/// Interval of `t` on the line through the other plane, parametrized along `dir`.
fn plane_interval(t: &[Vec3; 3], d: &[f64; 3], s: &[i8; 3], dir: &Vec3) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut push = |p: Vec3| {
        let x = dir.dot(&p);
        lo = lo.min(x);
        hi = hi.max(x);
    };
    for i in 0..3 {
        let j = (i + 1) % 3;
        if s[i] == 0 {
            push(t[i]);
        }
        if s[i] * s[j] < 0 {
            let w = d[i] / (d[i] - d[j]);
            push(t[i] + (t[j] - t[i]) * w);
        }
    }
    (lo, hi)
}

fn classify_coplanar(t1: &[Vec3; 3], t2: &[Vec3; 3], n: &Vec3, eps: f64) -> Contact {
    let (e1, e2) = plane_basis(n);
    let project = |t: &[Vec3; 3]| t.map(|p| Vec2::new(e1.dot(&p), e2.dot(&p)));
    let depth = sat_penetration(&project(t1), &project(t2));
    if depth < -eps {
        Contact::Disjoint
    } else if depth <= eps {
        Contact::Touching
    } else {
        Contact::Crossing
    }
}

fn plane_basis(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Triangles `(v, a, b)` and `(v, c, d)` sharing only `v`. Their intersection
/// is convex and contains `v`, so it extends beyond `v` exactly when the two
/// planar cones at `v` do.
fn classify_shared_vertex(t1: &[Vec3; 3], t2: &[Vec3; 3], eps: f64) -> Contact {
    let v = t1[0];
    let (Some(u1), Some(u2), Some(w1), Some(w2)) = (unit(t1[1] - v), unit(t1[2] - v), unit(t2[1] - v), unit(t2[2] - v))
    else {
        return Contact::Touching;
    };
    let (Some(n1), Some(n2)) = (unit(u1.cross(&u2)), unit(w1.cross(&w2))) else {
        return Contact::Touching;
    };
    let axis = n1.cross(&n2);
    if axis.norm() < eps {
        // coplanar cones: compare angular sectors
        let (e1, e2) = (u1, n1.cross(&u1));
        let angle = |u: &Vec3| u.dot(&e2).atan2(u.dot(&e1)).rem_euclid(std::f64::consts::TAU);
        let span1 = angle(&u2);
        let (p, q) = (angle(&w1), angle(&w2));
        let fwd = (q - p).rem_euclid(std::f64::consts::TAU);
        let (start, span2) = if fwd <= std::f64::consts::PI {
            (p, fwd)
        } else {
            (q, std::f64::consts::TAU - fwd)
        };
        let overlap = [-1.0, 0.0, 1.0]
            .iter()
            .map(|k| {
                let s = start + k * std::f64::consts::TAU;
                span1.min(s + span2) - s.max(0.0)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        return if overlap > eps {
            Contact::Crossing
        } else if overlap >= -eps {
            Contact::Touching
        } else {
            Contact::Disjoint
        };
    }
    let axis = axis.normalize();
    let mut best = Contact::Disjoint;
    for dir in [axis, -axis] {
        let c1 = cone_coords(&u1, &u2, &dir);
        let c2 = cone_coords(&w1, &w2, &dir);
        let m1 = c1.0.min(c1.1);
        let m2 = c2.0.min(c2.1);
        let class = if m1 > eps && m2 > eps {
            Contact::Crossing
        } else if m1 >= -eps && m2 >= -eps {
            Contact::Touching
        } else {
            Contact::Disjoint
        };
        best = best.max(class);
    }
    best
}

fn unit(v: Vec3) -> Option<Vec3> {
    let n = v.norm();
    (n > EPS_GEOM).then(|| v / n)
}

/// Coefficients `(x, y)` with `dir = x * u + y * w`, for `dir` in the plane of `u, w`.
fn cone_coords(u: &Vec3, w: &Vec3, dir: &Vec3) -> (f64, f64) {
    let (uu, uw, ww) = (u.dot(u), u.dot(w), w.dot(w));
    let (du, dw) = (dir.dot(u), dir.dot(w));
    let det = uu * ww - uw * uw;
    ((du * ww - dw * uw) / det, (dw * uu - du * uw) / det)
}

/// Triangles sharing an edge: they overlap beyond it only when folded flat
/// onto each other.
fn classify_shared_edge(a: Vec3, b: Vec3, apex1: Vec3, apex2: Vec3, eps: f64) -> Contact {
    let Some(n) = unit_normal(&[a, b, apex1]) else {
        return Contact::Touching;
    };
    if n.dot(&(apex2 - a)).abs() > eps {
        return Contact::Disjoint;
    }
    let e = b - a;
    let s1 = e.cross(&(apex1 - a)).dot(&n);
    let s2 = e.cross(&(apex2 - a)).dot(&n);
    if s1 * s2 > 0.0 {
        Contact::Touching
    } else {
        Contact::Disjoint
    }
}

/// Minimum overlap of the two triangles' projections over all edge normals.
/// Negative means separated, zero touching, positive overlapping interiors.
pub fn sat_penetration(a: &[Vec2; 3], b: &[Vec2; 3]) -> f64 {
    let mut depth = f64::INFINITY;
    for tri in [a, b] {
        for i in 0..3 {
            let e = tri[(i + 1) % 3] - tri[i];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let axis = Vec2::new(-e.y, e.x) / len;
            let (lo1, hi1) = min_max(a.iter().map(|p| axis.dot(p)));
            let (lo2, hi2) = min_max(b.iter().map(|p| axis.dot(p)));
            depth = depth.min(hi1.min(hi2) - lo1.max(lo2));
        }
    }
    depth
}

/// Whether segments `p1p2` and `q1q2` cross at a point interior to both.
pub fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2, eps: f64) -> bool {
    let orient = |a: Vec2, b: Vec2, c: Vec2| (b - a).perp(&(c - a));
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [Vec3; 3] {
        [Vec3::from(a), Vec3::from(b), Vec3::from(c)]
    }

    const A: [usize; 3] = [0, 1, 2];
    const B: [usize; 3] = [3, 4, 5];

    #[test]
    fn piercing_triangles_cross() {
        let t1 = tri([0., 0., 0.], [2., 0., 0.], [0., 2., 0.]);
        let t2 = tri([0.5, 0.5, -1.], [0.5, 0.5, 1.], [3., 3., 0.5]);
        assert_eq!(classify_pair(&t1, &A, &t2, &B, EPS_GEOM), Contact::Crossing);
    }

    #[test]
    fn separated_triangles_are_disjoint() {
        let t1 = tri([0., 0., 0.], [1., 0., 0.], [0., 1., 0.]);
        let t2 = tri([0., 0., 1.], [1., 0., 1.], [0., 1., 1.]);
        assert_eq!(classify_pair(&t1, &A, &t2, &B, EPS_GEOM), Contact::Disjoint);
        let t3 = tri([2., 0., -1.], [2., 0., 1.], [3., 1., 0.]);
        assert_eq!(classify_pair(&t1, &A, &t3, &B, EPS_GEOM), Contact::Disjoint);
    }

    #[test]
    fn vertex_on_face_touches() {
        let t1 = tri([0., 0., 0.], [2., 0., 0.], [0., 2., 0.]);
        let t2 = tri([0.5, 0.5, 0.], [0.5, 0.5, 1.], [1., 0.5, 1.]);
        assert_eq!(classify_pair(&t1, &A, &t2, &B, EPS_GEOM), Contact::Touching);
    }

    #[test]
    fn coincident_triangles_with_distinct_ids_cross() {
        let t = tri([0., 0., 0.], [1., 0., 0.], [0., 1., 0.]);
        assert_eq!(classify_pair(&t, &A, &t, &B, EPS_GEOM), Contact::Crossing);
    }

    #[test]
    fn shared_vertex_cases() {
        let t1 = tri([0., 0., 0.], [1., 0., 0.], [0., 1., 0.]);
        // fan neighbour on the other side of the y axis
        let t2 = tri([0., 0., 0.], [-1., 0.2, 0.3], [-1., -0.5, 0.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &t2, &[0, 3, 4], EPS_GEOM),
            Contact::Disjoint
        );
        // passes through t1 near the shared vertex
        let t3 = tri([0., 0., 0.], [0.3, 0.3, 1.], [0.3, 0.3, -1.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &t3, &[0, 3, 4], EPS_GEOM),
            Contact::Crossing
        );
        // coplanar, overlapping sectors
        let t4 = tri([0., 0., 0.], [1., 1., 0.], [-1., 1., 0.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &t4, &[0, 3, 4], EPS_GEOM),
            Contact::Crossing
        );
        // coplanar, disjoint sectors
        let t5 = tri([0., 0., 0.], [-1., 0.1, 0.], [-1., -1., 0.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &t5, &[0, 3, 4], EPS_GEOM),
            Contact::Disjoint
        );
        // lies on t1 along a ray but stays on one side
        let t6 = tri([0., 0., 0.], [0.5, 0.5, 0.], [0., 0., 1.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &t6, &[0, 3, 4], EPS_GEOM),
            Contact::Touching
        );
    }

    #[test]
    fn shared_edge_cases() {
        let t1 = tri([0., 0., 0.], [1., 0., 0.], [0.5, 1., 0.]);
        let flat = tri([1., 0., 0.], [0., 0., 0.], [0.5, -1., 0.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &flat, &[1, 0, 3], EPS_GEOM),
            Contact::Disjoint
        );
        let folded = tri([1., 0., 0.], [0., 0., 0.], [0.5, 0.7, 0.]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &folded, &[1, 0, 3], EPS_GEOM),
            Contact::Touching
        );
        let bent = tri([1., 0., 0.], [0., 0., 0.], [0.5, 0.7, 0.2]);
        assert_eq!(
            classify_pair(&t1, &[0, 1, 2], &bent, &[1, 0, 3], EPS_GEOM),
            Contact::Disjoint
        );
    }

    #[test]
    fn sat_and_segments() {
        let a = [Vec2::new(0., 0.), Vec2::new(1., 0.), Vec2::new(0., 1.)];
        let b = [Vec2::new(1., 0.), Vec2::new(0., 1.), Vec2::new(1., 1.)];
        assert!(sat_penetration(&a, &b).abs() < 1e-12);
        let c = [Vec2::new(0.2, 0.2), Vec2::new(2., 0.2), Vec2::new(0.2, 2.)];
        assert!(sat_penetration(&a, &c) > 0.1);
        assert!(segments_cross(a[0], b[2], a[1], a[2], 1e-12));
        assert!(!segments_cross(a[0], a[1], a[1], a[2], 1e-12));
    }
}
