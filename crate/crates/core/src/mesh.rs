//! Conforming triangulations of the catalog domains, uniform red refinement
//! and the `tevmesh 1` text format.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::params::{DomainKind, DomainSpec};

/// How new boundary vertices are placed during refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryShape {
    /// Midpoints stay on the straight edge.
    Polygonal,
    /// Midpoints are projected radially onto the unit circle.
    UnitCircle,
}

/// A conforming triangulation with its boundary and the interior/boundary
/// node partition.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    interior_nodes: Vec<usize>,
    boundary_nodes: Vec<usize>,
    /// `interior_slot[v]` is the position of `v` in `interior_nodes`, or
    /// `usize::MAX` for boundary vertices.
    interior_slot: Vec<usize>,
    shape: BoundaryShape,
    level: u32,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.triangles == other.triangles && self.boundary_edges == other.boundary_edges
    }
}

/// Unique undirected edges of a triangle list.
pub(crate) struct EdgeTable {
    /// `(lo, hi)` vertex pairs, sorted.
    pub edges: Vec<[usize; 2]>,
    /// Number of incident triangles per edge.
    pub counts: Vec<u32>,
    /// Edge ids of each triangle, opposite to local vertex 2, 0, 1: i.e.
    /// `(v0,v1)`, `(v1,v2)`, `(v2,v0)`.
    pub tri_edges: Vec<[usize; 3]>,
}

impl EdgeTable {
    pub fn build(triangles: &[[usize; 3]]) -> Self {
        let mut half: Vec<([usize; 2], usize, usize)> = Vec::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for local in 0..3 {
                let (a, b) = (tri[local], tri[(local + 1) % 3]);
                half.push(([a.min(b), a.max(b)], t, local));
            }
        }
        half.sort_unstable();
        let mut edges = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        let mut tri_edges = alloc::vec![[0usize; 3]; triangles.len()];
        for (key, t, local) in half {
            if edges.last() != Some(&key) {
                edges.push(key);
                counts.push(0);
            }
            let id = edges.len() - 1;
            counts[id] += 1;
            tri_edges[t][local] = id;
        }
        EdgeTable { edges, counts, tri_edges }
    }
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    libm::hypot(q[0] - p[0], q[1] - p[1])
}

impl Mesh {
    /// Validate and build. Boundary edges are stored with sorted endpoints
    /// in ascending order.
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<[usize; 2]>) -> Result<Self> {
        Self::with_shape(vertices, triangles, boundary_edges, BoundaryShape::Polygonal, 0)
    }

    fn with_shape(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<[usize; 2]>,
        shape: BoundaryShape,
        level: u32,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::Validation("mesh has no triangles".into()));
        }
        if let Some(i) = vertices.iter().position(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::Validation(format!("vertex {i} has a non-finite coordinate")));
        }
        let mut used = alloc::vec![false; nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::Validation(format!("triangle {t} references vertex {v} of {nv}")));
                }
                used[v] = true;
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::Validation(format!(
                    "triangle {t} {tri:?} has nonpositive signed area {area}"
                )));
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Validation(format!("vertex {v} is not used by any triangle")));
        }
        let table = EdgeTable::build(&triangles);
        if let Some(e) = table.counts.iter().position(|&c| c > 2) {
            return Err(Error::Validation(format!(
                "edge {:?} is shared by {} triangles",
                table.edges[e], table.counts[e]
            )));
        }
        let open: Vec<[usize; 2]> = table
            .edges
            .iter()
            .zip(&table.counts)
            .filter(|(_, &c)| c == 1)
            .map(|(e, _)| *e)
            .collect();
        let mut given: Vec<[usize; 2]> = boundary_edges.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        given.sort_unstable();
        if given.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate boundary edge".into()));
        }
        if given != open {
            let missing = open.iter().find(|e| given.binary_search(e).is_err());
            let extra = given.iter().find(|e| open.binary_search(e).is_err());
            return Err(Error::Validation(format!(
                "boundary edge list does not match the triangulation (unlisted open edge {missing:?}, listed interior edge {extra:?})"
            )));
        }

        let mut on_boundary = alloc::vec![false; nv];
        for e in &given {
            on_boundary[e[0]] = true;
            on_boundary[e[1]] = true;
        }
        let mut interior_nodes = Vec::new();
        let mut boundary_nodes = Vec::new();
        let mut interior_slot = alloc::vec![usize::MAX; nv];
        for v in 0..nv {
            if on_boundary[v] {
                boundary_nodes.push(v);
            } else {
                interior_slot[v] = interior_nodes.len();
                interior_nodes.push(v);
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
            boundary_edges: given,
            interior_nodes,
            boundary_nodes,
            interior_slot,
            shape,
            level,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    /// Position of vertex `v` among the interior unknowns.
    pub fn interior_slot(&self, v: usize) -> Option<usize> {
        let s = self.interior_slot[v];
        (s != usize::MAX).then_some(s)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        EdgeTable::build(&self.triangles).edges.len()
    }

    pub fn boundary_shape(&self) -> BoundaryShape {
        self.shape
    }

    /// Number of red refinements applied since generation or loading.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|&[a, b]| dist(self.vertices[a], self.vertices[b]))
            .sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(p, q)| dist(self.vertices[p], self.vertices[q]))
            .fold(0.0, f64::max)
    }

    /// Uniform red refinement: every triangle splits into four through its
    /// edge midpoints. Vertex `v` keeps its index; the midpoint of edge `e`
    /// (in [`EdgeTable`] order) becomes vertex `V + e`.
    pub fn refine(&self) -> Mesh {
        let table = EdgeTable::build(&self.triangles);
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.reserve(table.edges.len());
        for (e, &[a, b]) in table.edges.iter().enumerate() {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            let mut mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            if self.shape == BoundaryShape::UnitCircle && table.counts[e] == 1 {
                let r = libm::hypot(mid[0], mid[1]);
                mid = [mid[0] / r, mid[1] / r];
            }
            vertices.push(mid);
        }
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (tri, ids) in self.triangles.iter().zip(&table.tri_edges) {
            let [a, b, c] = *tri;
            let (ab, bc, ca) = (nv + ids[0], nv + ids[1], nv + ids[2]);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for &[a, b] in &self.boundary_edges {
            let e = table.edges.binary_search(&[a, b]).expect("boundary edge is a mesh edge");
            boundary_edges.push([a, nv + e]);
            boundary_edges.push([b, nv + e]);
        }
        Mesh::with_shape(vertices, triangles, boundary_edges, self.shape, self.level + 1).expect("red refinement preserves validity")
    }

    /// `tevmesh 1` text: vertices with 17 significant digits, 0-based CCW
    /// triangles, boundary edges. LF line endings.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(64 * self.vertices.len() + 32 * self.triangles.len());
        s.push_str("tevmesh 1\n");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.16e} {:.16e}", v[0], v[1]);
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "boundary_edges {}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
        s
    }

    /// Parse `tevmesh 1` text. Lines starting with `#` and blank lines are
    /// skipped. The result is validated like [`Mesh::new`].
    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: text.lines().count() + 1,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let (line, header) = next("header")?;
        if header.split_whitespace().collect::<Vec<_>>() != ["tevmesh", "1"] {
            return Err(Error::Parse {
                line,
                msg: format!("expected \"tevmesh 1\", found {header:?}"),
            });
        }
        let count = |line: usize, l: &str, key: &str| -> Result<usize> {
            let mut it = l.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(k), Some(n), None) if k == key => n.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad count {n:?}"),
                }),
                _ => Err(Error::Parse {
                    line,
                    msg: format!("expected \"{key} <count>\", found {l:?}"),
                }),
            }
        };
        fn fields<T: core::str::FromStr, const N: usize>(line: usize, l: &str) -> Result<[T; N]> {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != N {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {N} fields, found {}", parts.len()),
                });
            }
            let mut out: Vec<T> = Vec::with_capacity(N);
            for p in parts {
                out.push(p.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("cannot parse {p:?}"),
                })?);
            }
            out.try_into().map_err(|_| Error::Parse {
                line,
                msg: "field count".into(),
            })
        }

        let (line, l) = next("vertex count")?;
        let nv = count(line, l, "vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, l) = next("vertex")?;
            vertices.push(fields::<f64, 2>(line, l)?);
        }
        let (line, l) = next("triangle count")?;
        let nt = count(line, l, "triangles")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, l) = next("triangle")?;
            triangles.push(fields::<usize, 3>(line, l)?);
        }
        let (line, l) = next("boundary edge count")?;
        let nb = count(line, l, "boundary_edges")?;
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (line, l) = next("boundary edge")?;
            boundary.push(fields::<usize, 2>(line, l)?);
        }
        if let Some((line, l)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: format!("trailing content {l:?}"),
            });
        }
        Mesh::new(vertices, triangles, boundary)
    }
}

/// Build the mesh for a catalog domain at the requested refinement level.
pub fn generate(domain: &DomainSpec) -> Result<Mesh> {
    let mut mesh = match &domain.kind {
        DomainKind::UnitSquare => grid_mesh(false),
        DomainKind::LShape => grid_mesh(true),
        DomainKind::UnitDisk => disk_fan(),
        DomainKind::ExternalMesh(path) => {
            return Err(Error::Config(format!(
                "mesh: external mesh {path:?} must be loaded from file, not generated"
            )))
        }
    };
    for _ in 0..domain.refinement {
        mesh = mesh.refine();
    }
    Ok(mesh)
}

/// 4x4 cells on `(-1/2, 1/2)^2`, two triangles per cell with the diagonal
/// direction alternating like a union jack. The L-shape drops the cells in
/// `[0, 1/2]^2`.
fn grid_mesh(lshape: bool) -> Mesh {
    const CELLS: usize = 4;
    let h = 1.0 / CELLS as f64;
    let id = |i: usize, j: usize| j * (CELLS + 1) + i;
    let mut triangles = Vec::new();
    for j in 0..CELLS {
        for i in 0..CELLS {
            if lshape && i >= CELLS / 2 && j >= CELLS / 2 {
                continue;
            }
            let (sw, se, ne, nw) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([sw, se, ne]);
                triangles.push([sw, ne, nw]);
            } else {
                triangles.push([sw, se, nw]);
                triangles.push([se, ne, nw]);
            }
        }
    }
    let mut all = Vec::with_capacity((CELLS + 1) * (CELLS + 1));
    for j in 0..=CELLS {
        for i in 0..=CELLS {
            all.push([-0.5 + i as f64 * h, -0.5 + j as f64 * h]);
        }
    }
    compact(all, triangles, BoundaryShape::Polygonal)
}

/// Centre plus 16 vertices on the unit circle.
fn disk_fan() -> Mesh {
    const SPOKES: usize = 16;
    let mut vertices = alloc::vec![[0.0, 0.0]];
    for j in 0..SPOKES {
        let theta = 2.0 * core::f64::consts::PI * j as f64 / SPOKES as f64;
        vertices.push([libm::cos(theta), libm::sin(theta)]);
    }
    let triangles = (0..SPOKES).map(|j| [0, 1 + j, 1 + (j + 1) % SPOKES]).collect();
    compact(vertices, triangles, BoundaryShape::UnitCircle)
}

/// Drop unreferenced vertices and derive the boundary from open edges.
fn compact(vertices: Vec<[f64; 2]>, mut triangles: Vec<[usize; 3]>, shape: BoundaryShape) -> Mesh {
    let mut remap = alloc::vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for tri in &mut triangles {
        for v in tri.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = kept.len();
                kept.push(vertices[*v]);
            }
            *v = remap[*v];
        }
    }
    let table = EdgeTable::build(&triangles);
    let boundary = table
        .edges
        .iter()
        .zip(&table.counts)
        .filter(|(_, &c)| c == 1)
        .map(|(e, _)| *e)
        .collect();
    Mesh::with_shape(kept, triangles, boundary, shape, 0).expect("catalog mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: DomainKind, r: u32) -> DomainSpec {
        DomainSpec::new(kind, r)
    }

    #[test]
    fn square_level_zero_counts() {
        let m = generate(&spec(DomainKind::UnitSquare, 0)).unwrap();
        assert_eq!(m.num_vertices(), 25);
        assert_eq!(m.triangles().len(), 32);
        assert_eq!(m.boundary_edges().len(), 16);
        assert_eq!(m.interior_nodes().len(), 9);
        assert!(libm::fabs(m.area() - 1.0) < 1e-14);
    }

    #[test]
    fn lshape_counts_and_area() {
        let m = generate(&spec(DomainKind::LShape, 0)).unwrap();
        assert_eq!(m.num_vertices(), 21);
        assert_eq!(m.triangles().len(), 24);
        assert_eq!(m.boundary_edges().len(), 16);
        assert!(libm::fabs(m.area() - 0.75) < 1e-14);
        // reentrant corner is a boundary vertex
        let corner = m.vertices().iter().position(|v| v == &[0.0, 0.0]).unwrap();
        assert!(m.interior_slot(corner).is_none());
    }

    #[test]
    fn refinement_multiplies_counts() {
        for kind in [DomainKind::UnitSquare, DomainKind::LShape, DomainKind::UnitDisk] {
            let coarse = generate(&spec(kind.clone(), 1)).unwrap();
            let fine = coarse.refine();
            assert_eq!(fine.triangles().len(), 4 * coarse.triangles().len());
            assert_eq!(fine.boundary_edges().len(), 2 * coarse.boundary_edges().len());
            assert_eq!(fine.num_vertices(), coarse.num_vertices() + coarse.num_edges());
            for &v in coarse.interior_nodes() {
                assert!(fine.interior_slot(v).is_some());
                assert_eq!(fine.vertices()[v], coarse.vertices()[v]);
            }
            assert_eq!(fine.level(), 2);
        }
    }

    #[test]
    fn euler_relation_holds() {
        for kind in [DomainKind::UnitSquare, DomainKind::LShape, DomainKind::UnitDisk] {
            for r in 0..3 {
                let m = generate(&spec(kind.clone(), r)).unwrap();
                let (v, e, t) = (m.num_vertices() as i64, m.num_edges() as i64, m.triangles().len() as i64);
                assert_eq!(v - e + t, 1, "{kind:?} r={r}");
            }
        }
    }

    #[test]
    fn boundary_nodes_match_coordinate_test() {
        for kind in [DomainKind::UnitSquare, DomainKind::LShape] {
            let m = generate(&spec(kind.clone(), 2)).unwrap();
            for (v, p) in m.vertices().iter().enumerate() {
                let on_outer = (0..2).any(|c| libm::fabs(libm::fabs(p[c]) - 0.5) < 1e-12);
                let on_notch = kind == DomainKind::LShape
                    && ((libm::fabs(p[0]) < 1e-12 && p[1] > -1e-12) || (libm::fabs(p[1]) < 1e-12 && p[0] > -1e-12));
                assert_eq!(m.interior_slot(v).is_none(), on_outer || on_notch, "{kind:?} {p:?}");
            }
        }
    }

    #[test]
    fn disk_boundary_on_circle_and_area_converges() {
        let mut prev_err = f64::INFINITY;
        for r in 0..5 {
            let m = generate(&spec(DomainKind::UnitDisk, r)).unwrap();
            for &b in m.boundary_nodes() {
                let p = m.vertices()[b];
                assert!(libm::fabs(libm::hypot(p[0], p[1]) - 1.0) < 1e-14);
            }
            let err = core::f64::consts::PI - m.area();
            assert!(err > 0.0);
            let sides = 16.0 * (1u32 << r) as f64;
            let polygon = 0.5 * sides * libm::sin(2.0 * core::f64::consts::PI / sides);
            assert!(libm::fabs(m.area() - polygon) < 1e-12);
            if r > 0 {
                // O(h^2): each level cuts the error by about 4
                assert!(err < 0.3 * prev_err);
            }
            prev_err = err;
        }
    }

    #[test]
    fn max_edge_halves() {
        let mut h = generate(&spec(DomainKind::UnitSquare, 0)).unwrap().max_edge_length();
        let mut m = generate(&spec(DomainKind::UnitSquare, 0)).unwrap();
        for _ in 0..3 {
            m = m.refine();
            let h2 = m.max_edge_length();
            assert!(libm::fabs(h2 - 0.5 * h) < 1e-14);
            h = h2;
        }
        let mut m = generate(&spec(DomainKind::UnitDisk, 1)).unwrap();
        let mut h = m.max_edge_length();
        for _ in 0..3 {
            m = m.refine();
            let h2 = m.max_edge_length();
            assert!(h2 < 0.55 * h && h2 > 0.45 * h);
            h = h2;
        }
    }

    #[test]
    fn text_round_trip() {
        let m = generate(&spec(DomainKind::UnitSquare, 0)).unwrap();
        let back = Mesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        let d = generate(&spec(DomainKind::UnitDisk, 2)).unwrap();
        let back = Mesh::from_text(&d.to_text()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn comments_are_ignored() {
        let text = "# a square\ntevmesh 1\nvertices 4\n0 0\n1 0\n# mid-list comment\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\nboundary_edges 4\n0 1\n1 2\n2 3\n3 0\n";
        let m = Mesh::from_text(text).unwrap();
        assert_eq!(m.interior_nodes().len(), 0);
        assert!(libm::fabs(m.area() - 1.0) < 1e-15);
    }

    #[test]
    fn zero_area_triangle_rejected() {
        let text = "tevmesh 1\nvertices 3\n0 0\n1 0\n2 0\ntriangles 1\n0 1 2\nboundary_edges 3\n0 1\n1 2\n2 0\n";
        assert!(matches!(Mesh::from_text(text), Err(Error::Validation(_))));
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let text = "tevmesh 1\nvertices 3\n0 0\n1 0\n0 1\ntriangles 1\n0 2 1\nboundary_edges 3\n0 1\n1 2\n2 0\n";
        assert!(matches!(Mesh::from_text(text), Err(Error::Validation(_))));
    }

    #[test]
    fn non_manifold_edge_rejected() {
        // three triangles on the edge (0,1)
        let text = "tevmesh 1\nvertices 5\n0 0\n1 0\n0.5 1\n0.5 2\n0.5 3\ntriangles 3\n0 1 2\n0 1 3\n0 1 4\nboundary_edges 0\n";
        assert!(matches!(Mesh::from_text(text), Err(Error::Validation(m)) if m.contains("shared by 3")));
    }

    #[test]
    fn wrong_boundary_list_rejected() {
        let text = "tevmesh 1\nvertices 4\n0 0\n1 0\n1 1\n0 1\ntriangles 2\n0 1 2\n0 2 3\nboundary_edges 4\n0 1\n1 2\n2 3\n0 2\n";
        assert!(matches!(Mesh::from_text(text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "tevmesh 1\nvertices 2\n0 0\n1 x\n";
        match Mesh::from_text(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Mesh::from_text("tevmesh 2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Mesh::from_text("tevmesh 1\nvertices 3\n0 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn external_kind_cannot_be_generated() {
        assert!(matches!(
            generate(&spec(DomainKind::ExternalMesh("x".into()), 0)),
            Err(Error::Config(_))
        ));
    }
}
