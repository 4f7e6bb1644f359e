//! Finite CAT(0) cube complexes reconstructed from their 1-skeleton.
//!
//! The input graph must be a median graph. Hyperplanes are the classes of
//! edges under the relation generated by "opposite sides of a square", and
//! cubes are grown dimension by dimension from edges by translating a cube
//! across a hyperplane. Everything that depends on the base vertex (sides,
//! far corners, SAH sets, blocks) is derived once at build time.

pub mod generate;
mod graph;
mod median;

pub use graph::{Graph, Vertex};
pub use median::{require_median, validate_median, validate_median_with, MedianCheck};

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CubeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HyperplaneId(pub usize);

/// A class of dual edges together with the two halfspaces it bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub id: HyperplaneId,
    pub dual_edges: Vec<usize>,
    /// Vertices on the same side as the base vertex.
    pub near_side: Vec<Vertex>,
    pub far_side: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cube {
    pub id: CubeId,
    pub vertices: Vec<Vertex>,
    pub dim: usize,
    /// Hyperplanes cutting through the cube, ascending.
    pub mid: Vec<HyperplaneId>,
    /// The unique vertex separated from the base by every hyperplane in `mid`.
    pub far_corner: Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub max_dim: usize,
    pub max_cubes: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_dim: 6,
            max_cubes: 1_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CubeComplex {
    graph: Graph,
    options: BuildOptions,
    cubes: Vec<Cube>,
    hyperplanes: Vec<Hyperplane>,
    edge_hyperplane: Vec<HyperplaneId>,
    /// `is_far[h][v]`: vertex `v` lies on the far side of hyperplane `h`.
    is_far: Vec<Vec<bool>>,
    across: HashMap<(Vertex, HyperplaneId), Vertex>,
    cube_index: HashMap<Vec<Vertex>, CubeId>,
    sah: Vec<Vec<HyperplaneId>>,
    coface: HashMap<(CubeId, HyperplaneId), CubeId>,
    blocks: Vec<Vec<CubeId>>,
    dim_offsets: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl CubeComplex {
    pub fn build(graph: Graph) -> Result<Self> {
        Self::build_with(graph, BuildOptions::default(), Execution::default())
    }

    pub fn build_with(graph: Graph, options: BuildOptions, exec: Execution) -> Result<Self> {
        require_median(&graph, exec)?;
        let adj = graph.adjacency();
        let (hyperplane_edges, edge_hyperplane) = square_classes(&graph, &adj);

        let n = graph.vertex_count();
        let mut across = HashMap::new();
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let h = edge_hyperplane[e];
            if across.insert((u, h), v).is_some() || across.insert((v, h), u).is_some() {
                return Err(Error::InvariantViolation(format!(
                    "two edges of hyperplane {} meet at a vertex",
                    h.0
                )));
            }
        }

        let mut hyperplanes = Vec::with_capacity(hyperplane_edges.len());
        let mut is_far = Vec::with_capacity(hyperplane_edges.len());
        for (h, dual_edges) in hyperplane_edges.into_iter().enumerate() {
            let id = HyperplaneId(h);
            let far = sides(&graph, &adj, &edge_hyperplane, id)?;
            let (far_side, near_side): (Vec<Vertex>, Vec<Vertex>) = (0..n).partition(|&v| far[v]);
            hyperplanes.push(Hyperplane {
                id,
                dual_edges,
                near_side,
                far_side,
            });
            is_far.push(far);
        }

        let raw = enumerate_cubes(&graph, &across, &edge_hyperplane, options)?;
        let mut dim_offsets = vec![0];
        let mut cubes = Vec::with_capacity(raw.iter().map(BTreeMap::len).sum());
        for level in raw {
            for (vertices, mid) in level {
                let id = CubeId(cubes.len());
                let corners: Vec<Vertex> = vertices
                    .iter()
                    .copied()
                    .filter(|&v| mid.iter().all(|h| is_far[h.0][v]))
                    .collect();
                let [far_corner] = corners[..] else {
                    return Err(Error::InvariantViolation(format!(
                        "cube {vertices:?} has {} far corners",
                        corners.len()
                    )));
                };
                cubes.push(Cube {
                    id,
                    dim: mid.len(),
                    vertices,
                    mid,
                    far_corner,
                });
            }
            dim_offsets.push(cubes.len());
        }
        let cube_index: HashMap<Vec<Vertex>, CubeId> =
            cubes.iter().map(|c| (c.vertices.clone(), c.id)).collect();

        let mut sah = vec![Vec::new(); cubes.len()];
        let mut coface = HashMap::new();
        for cube in &cubes {
            for &h in &cube.mid {
                let face: Vec<Vertex> = cube
                    .vertices
                    .iter()
                    .copied()
                    .filter(|&v| is_far[h.0][v])
                    .collect();
                let face_id = *cube_index.get(&face).ok_or_else(|| {
                    Error::InvariantViolation(format!("face {face:?} of {:?} missing", cube.id))
                })?;
                coface.insert((face_id, h), cube.id);
                sah[face_id.0].push(h);
            }
        }
        for list in &mut sah {
            list.sort_unstable();
        }

        let mut blocks = vec![Vec::new(); n];
        for cube in &cubes {
            blocks[cube.far_corner].push(cube.id);
        }

        Ok(CubeComplex {
            graph,
            options,
            cubes,
            hyperplanes,
            edge_hyperplane,
            is_far,
            across,
            cube_index,
            sah,
            coface,
            blocks,
            dim_offsets,
        })
    }

    /// The same complex with a different base vertex. Cube and hyperplane ids
    /// do not depend on the base, so operators on both complexes share a basis.
    pub fn rebased(&self, base: Vertex) -> Result<Self> {
        Self::build_with(self.graph.with_base(base)?, self.options, Execution::Sequential)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn base(&self) -> Vertex {
        self.graph.base()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn cube(&self, id: CubeId) -> &Cube {
        &self.cubes[id.0]
    }

    pub fn cube_count(&self) -> usize {
        self.cubes.len()
    }

    /// Cubes of dimension `q`, as a contiguous id range.
    pub fn cubes_of_dim(&self, q: usize) -> &[Cube] {
        match (self.dim_offsets.get(q), self.dim_offsets.get(q + 1)) {
            (Some(&a), Some(&b)) => &self.cubes[a..b],
            _ => &[],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim_offsets.len().saturating_sub(2)
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn hyperplane(&self, id: HyperplaneId) -> &Hyperplane {
        &self.hyperplanes[id.0]
    }

    pub fn hyperplane_count(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn edge_hyperplane(&self, edge: usize) -> HyperplaneId {
        self.edge_hyperplane[edge]
    }

    pub fn vertex_cube(&self, v: Vertex) -> CubeId {
        CubeId(v)
    }

    pub fn cube_with_vertices(&self, vertices: &[Vertex]) -> Option<CubeId> {
        let mut key = vertices.to_vec();
        key.sort_unstable();
        self.cube_index.get(&key).copied()
    }

    /// The neighbour of `v` across hyperplane `h`, if `h` is dual to an edge at `v`.
    pub fn across(&self, v: Vertex, h: HyperplaneId) -> Option<Vertex> {
        self.across.get(&(v, h)).copied()
    }

    pub fn is_far(&self, h: HyperplaneId, v: Vertex) -> bool {
        self.is_far[h.0][v]
    }

    pub fn separates(&self, h: HyperplaneId, u: Vertex, v: Vertex) -> bool {
        self.is_far[h.0][u] != self.is_far[h.0][v]
    }

    pub fn separating_hyperplanes(&self, u: Vertex, v: Vertex) -> Vec<HyperplaneId> {
        (0..self.hyperplanes.len())
            .map(HyperplaneId)
            .filter(|&h| self.separates(h, u, v))
            .collect()
    }

    /// Number of hyperplanes separating `u` and `v`.
    pub fn distance(&self, u: Vertex, v: Vertex) -> usize {
        self.is_far.iter().filter(|side| side[u] != side[v]).count()
    }

    pub fn mid(&self, c: CubeId) -> &[HyperplaneId] {
        &self.cubes[c.0].mid
    }

    /// Hyperplanes adjacent to `c` that separate it from the base vertex.
    pub fn sah(&self, c: CubeId) -> &[HyperplaneId] {
        &self.sah[c.0]
    }

    /// The cube one dimension up that contains `c` as a face and is cut by `h`.
    pub fn coface(&self, c: CubeId, h: HyperplaneId) -> Result<CubeId> {
        self.coface.get(&(c, h)).copied().ok_or(Error::NotAdjacent {
            cube: c,
            hyperplane: h,
        })
    }

    pub fn far_corner(&self, c: CubeId) -> Vertex {
        self.cubes[c.0].far_corner
    }

    /// Cubes whose far corner is `q`; these are the faces of `first_cube(q)`
    /// that contain `q`.
    pub fn block(&self, q: Vertex) -> &[CubeId] {
        &self.blocks[q]
    }

    /// The cube at `q` spanned by the edges dual to `sah(q)`.
    pub fn first_cube(&self, q: Vertex) -> Result<CubeId> {
        let want = self.sah(CubeId(q));
        self.blocks[q]
            .iter()
            .copied()
            .find(|&c| self.mid(c) == want)
            .ok_or_else(|| {
                Error::InvariantViolation(format!("SAH of vertex {q} does not span a cube"))
            })
    }

    /// Vertex of cube `c` diagonally opposite `v`.
    pub fn opposite_corner(&self, c: CubeId, v: Vertex) -> Vertex {
        let cube = &self.cubes[c.0];
        cube.mid
            .iter()
            .fold(v, |u, &h| self.across(u, h).expect("cube edges exist"))
    }

    /// Cubes visited going from `q` to the base vertex, each step jumping to
    /// the opposite corner of the current first cube.
    pub fn normal_cube_path(&self, q: Vertex) -> Result<Vec<CubeId>> {
        let mut path = Vec::new();
        let mut current = q;
        while current != self.base() {
            let cube = self.first_cube(current)?;
            let next = self.opposite_corner(cube, current);
            if self.distance(next, self.base()) >= self.distance(current, self.base()) {
                return Err(Error::InvariantViolation(format!(
                    "normal cube path does not approach the base at vertex {current}"
                )));
            }
            path.push(cube);
            current = next;
        }
        Ok(path)
    }
}

/// Square-equivalence classes of edges, ordered by their smallest edge index.
fn square_classes(graph: &Graph, adj: &[Vec<Vertex>]) -> (Vec<Vec<usize>>, Vec<HyperplaneId>) {
    let m = graph.edges().len();
    let mut uf = UnionFind((0..m).collect());
    let edge = |u, v| graph.edge_index(u, v).expect("edge");
    for a in 0..graph.vertex_count() {
        let nbrs = &adj[a];
        for (i, &b) in nbrs.iter().enumerate() {
            for &c in &nbrs[i + 1..] {
                for &d in common(&adj[b], &adj[c]).iter().filter(|&&d| d != a) {
                    uf.union(edge(a, b), edge(c, d));
                    uf.union(edge(a, c), edge(b, d));
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..m {
        classes.entry(uf.find(e)).or_default().push(e);
    }
    // roots are class minima, so BTreeMap order is "smallest edge first"
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let mut edge_hyperplane = vec![HyperplaneId(0); m];
    for (h, class) in classes.iter().enumerate() {
        for &e in class {
            edge_hyperplane[e] = HyperplaneId(h);
        }
    }
    (classes, edge_hyperplane)
}

fn common(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Far-side indicator of `h`: components of the graph with `h`'s edges removed.
fn sides(
    graph: &Graph,
    adj: &[Vec<Vertex>],
    edge_hyperplane: &[HyperplaneId],
    h: HyperplaneId,
) -> Result<Vec<bool>> {
    let n = graph.vertex_count();
    let crosses = |u: Vertex, v: Vertex| edge_hyperplane[graph.edge_index(u, v).unwrap()] == h;
    let component = |start: Vertex| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] && !crosses(u, v) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    };
    let near = component(graph.base());
    let far: Vec<bool> = near.iter().map(|&x| !x).collect();
    let Some(far_start) = far.iter().position(|&x| x) else {
        return Err(Error::InvariantViolation(format!(
            "hyperplane {} does not separate the graph",
            h.0
        )));
    };
    let far_component = component(far_start);
    if far_component != far {
        return Err(Error::InvariantViolation(format!(
            "complement of hyperplane {} has more than two components",
            h.0
        )));
    }
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if edge_hyperplane[e] == h && far[u] == far[v] {
            return Err(Error::InvariantViolation(format!(
                "dual edge ({u}, {v}) of hyperplane {} does not cross it",
                h.0
            )));
        }
    }
    Ok(far)
}

type Level = BTreeMap<Vec<Vertex>, Vec<HyperplaneId>>;

/// Cubes of every dimension keyed by sorted vertex list.
fn enumerate_cubes(
    graph: &Graph,
    across: &HashMap<(Vertex, HyperplaneId), Vertex>,
    edge_hyperplane: &[HyperplaneId],
    options: BuildOptions,
) -> Result<Vec<Level>> {
    let mut total = graph.vertex_count() + graph.edges().len();
    let overflow = |count: usize| Error::SizeOverflow {
        count: count as u128,
        cap: options.max_cubes as u128,
    };
    if total > options.max_cubes {
        return Err(overflow(total));
    }
    let vertices: Level = (0..graph.vertex_count()).map(|v| (vec![v], Vec::new())).collect();
    let edges: Level = graph
        .edges()
        .iter()
        .zip(edge_hyperplane)
        .map(|(&(u, v), &h)| (vec![u, v], vec![h]))
        .collect();
    let mut incident = vec![Vec::new(); graph.vertex_count()];
    for (&(u, v), &h) in graph.edges().iter().zip(edge_hyperplane) {
        incident[u].push(h);
        incident[v].push(h);
    }
    for list in &mut incident {
        list.sort_unstable();
    }
    let mut levels = vec![vertices];
    if !edges.is_empty() {
        if options.max_dim == 0 {
            return Err(Error::DimensionExceeded { limit: 0 });
        }
        levels.push(edges);
    }
    loop {
        let current = levels.last().unwrap();
        let mut next = Level::new();
        for (vertices, mid) in current {
            if mid.is_empty() {
                break;
            }
            let candidates = incident[vertices[0]].iter().filter(|h| !mid.contains(h));
            for &h in candidates {
                let image: Option<Vec<Vertex>> =
                    vertices.iter().map(|&v| across.get(&(v, h)).copied()).collect();
                let Some(mut image) = image else { continue };
                image.sort_unstable();
                if !current.contains_key(&image) {
                    continue;
                }
                let mut union = vertices.clone();
                union.extend(image);
                union.sort_unstable();
                if next.contains_key(&union) {
                    continue;
                }
                let mut next_mid = mid.clone();
                next_mid.push(h);
                next_mid.sort_unstable();
                next.insert(union, next_mid);
            }
        }
        if next.is_empty() {
            break;
        }
        if levels.len() > options.max_dim {
            return Err(Error::DimensionExceeded {
                limit: options.max_dim,
            });
        }
        total += next.len();
        if total > options.max_cubes {
            return Err(overflow(total));
        }
        levels.push(next);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(g: Graph) -> CubeComplex {
        CubeComplex::build(g).unwrap()
    }

    fn square() -> CubeComplex {
        // 4-cycle 0–1–3–2–0
        build(Graph::new(4, &[(0, 1), (1, 3), (3, 2), (2, 0)], 0).unwrap())
    }

    /// Edge classes by iterating "opposite sides of a 4-cycle" to a fixpoint
    /// over all vertex quadruples.
    fn square_closure_oracle(g: &Graph) -> Vec<Vec<usize>> {
        let m = g.edges().len();
        let n = g.vertex_count();
        let mut label: Vec<usize> = (0..m).collect();
        let e = |u, v| g.edge_index(u, v);
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let distinct = a != c && b != d && a != b && a != d && b != c && c != d;
                            if !distinct {
                                continue;
                            }
                            if let (Some(ab), Some(bc), Some(cd), Some(da)) =
                                (e(a, b), e(b, c), e(c, d), e(d, a))
                            {
                                for (x, y) in [(ab, cd), (bc, da)] {
                                    let l = label[x].min(label[y]);
                                    if label[x] != l || label[y] != l {
                                        let (lx, ly) = (label[x], label[y]);
                                        for t in label.iter_mut() {
                                            if *t == lx || *t == ly {
                                                *t = l;
                                            }
                                        }
                                        changed = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (edge, l) in label.into_iter().enumerate() {
            classes.entry(l).or_default().push(edge);
        }
        classes.into_values().collect()
    }

    #[test]
    fn path_complex() {
        let x = build(generate::path(2).unwrap());
        assert_eq!(x.vertex_count(), 3);
        assert_eq!(x.cubes_of_dim(1).len(), 2);
        assert_eq!(x.hyperplane_count(), 2);
        let (h01, h12) = (HyperplaneId(0), HyperplaneId(1));
        assert!(x.separates(h01, 0, 2));
        assert!(!x.separates(h01, 1, 2));
        assert_eq!(x.distance(0, 2), 2);
        assert_eq!(x.distance(1, 1), 0);
        assert_eq!(x.sah(CubeId(2)), &[h12]);
        assert_eq!(x.sah(CubeId(0)), &[] as &[HyperplaneId]);
        let e01 = x.cube_with_vertices(&[0, 1]).unwrap();
        let e12 = x.cube_with_vertices(&[1, 2]).unwrap();
        assert_eq!(x.coface(CubeId(1), h01).unwrap(), e01);
        assert!(matches!(x.coface(CubeId(2), h01), Err(Error::NotAdjacent { .. })));
        assert_eq!(x.normal_cube_path(2).unwrap(), vec![e12, e01]);
        assert_eq!(x.block(1), &[CubeId(1), e01]);
        assert_eq!(x.dimension(), 1);
    }

    #[test]
    fn square_complex() {
        let x = square();
        assert_eq!(x.cubes_of_dim(2).len(), 1);
        assert_eq!(x.hyperplane_count(), 2);
        for h in x.hyperplanes() {
            assert_eq!(h.dual_edges.len(), 2);
        }
        assert_eq!(square_closure_oracle(x.graph()).len(), 2);
        let (h0, h1) = (HyperplaneId(0), HyperplaneId(1));
        assert!(x.separates(h0, 0, 3));
        assert_eq!(x.sah(CubeId(3)), &[h0, h1]);
        let top = x.cube_with_vertices(&[0, 1, 2, 3]).unwrap();
        let e13 = x.cube_with_vertices(&[1, 3]).unwrap();
        let e23 = x.cube_with_vertices(&[2, 3]).unwrap();
        assert_eq!(x.edge_hyperplane(x.graph().edge_index(1, 3).unwrap()), h1);
        assert_eq!(x.coface(e13, h0).unwrap(), top);
        assert_eq!(x.coface(CubeId(3), h0).unwrap(), e23);
        assert_eq!(x.first_cube(3).unwrap(), top);
        assert_eq!(x.normal_cube_path(3).unwrap(), vec![top]);
        assert_eq!(x.opposite_corner(top, 3), 0);
        assert_eq!(x.block(3), &[CubeId(3), e13, e23, top]);
        assert_eq!(x.block(0), &[CubeId(0)]);
        assert_eq!(x.far_corner(top), 3);
        assert!(x.normal_cube_path(0).unwrap().is_empty());
    }

    #[test]
    fn rejects_non_median() {
        let c5 = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 0).unwrap();
        assert!(matches!(CubeComplex::build(c5), Err(Error::NotMedian { .. })));
        let split = Graph::new(4, &[(0, 1), (2, 3)], 0).unwrap();
        assert!(matches!(CubeComplex::build(split), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn generated_counts() {
        let q3 = build(generate::hypercube(3).unwrap());
        assert_eq!(
            (q3.vertex_count(), q3.cubes_of_dim(1).len(), q3.hyperplane_count(), q3.cube_count()),
            (8, 12, 3, 27)
        );
        assert_eq!(q3.distance(0, 7), 3);
        let grid = build(generate::product(&generate::path(2).unwrap(), &generate::path(2).unwrap()).unwrap());
        assert_eq!((grid.vertex_count(), grid.hyperplane_count()), (9, 4));
        let tree = build(generate::tree(2, 2).unwrap());
        assert_eq!((tree.vertex_count(), tree.hyperplane_count()), (7, 6));
    }

    #[test]
    fn hyperplanes_match_closure_oracle() {
        for g in [
            generate::hypercube(3).unwrap(),
            generate::grid(3, 4).unwrap(),
            generate::product(&generate::tree(2, 1).unwrap(), &generate::path(2).unwrap()).unwrap(),
        ] {
            let x = build(g.clone());
            let classes: Vec<Vec<usize>> = x.hyperplanes().iter().map(|h| h.dual_edges.clone()).collect();
            assert_eq!(classes, square_closure_oracle(&g));
        }
    }

    #[test]
    fn dimension_cap() {
        let g = generate::hypercube(3).unwrap();
        let opts = BuildOptions {
            max_dim: 2,
            ..BuildOptions::default()
        };
        assert_eq!(
            CubeComplex::build_with(g.clone(), opts, Execution::Sequential).unwrap_err(),
            Error::DimensionExceeded { limit: 2 }
        );
        let opts = BuildOptions {
            max_cubes: 20,
            ..BuildOptions::default()
        };
        assert!(matches!(
            CubeComplex::build_with(g, opts, Execution::Sequential),
            Err(Error::SizeOverflow { .. })
        ));
    }

    #[test]
    fn rebasing_keeps_ids() {
        let x = square();
        let y = x.rebased(3).unwrap();
        assert_eq!(x.cubes().len(), y.cubes().len());
        for (a, b) in x.cubes().iter().zip(y.cubes()) {
            assert_eq!((&a.vertices, &a.mid), (&b.vertices, &b.mid));
        }
        assert_eq!(y.far_corner(x.cube_with_vertices(&[0, 1, 2, 3]).unwrap()), 0);
    }
}
