//! Automorphisms of a cube complex and the signed permutations they induce
//! on the cube basis.

use serde::Serialize;

use crate::complex::{CubeComplex, CubeId, HyperplaneId, Vertex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::julg_valette::jv_operator;
use crate::linalg::symmetric_norm;
use crate::operator::{GradedOperator, Grading};
use crate::scalar::Scalar;
use crate::weights::{WeightFn, WeightValues};

/// Largest vertex count for which the automorphism group is enumerated.
pub const ENUMERATION_LIMIT: usize = 10;

/// A graph automorphism with its induced maps on edges, hyperplanes and cubes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    vertex_map: Vec<Vertex>,
    edge_map: Vec<usize>,
    hyperplane_map: Vec<HyperplaneId>,
    cube_map: Vec<CubeId>,
}

impl Automorphism {
    pub fn validate(x: &CubeComplex, perm: &[Vertex]) -> Result<Self> {
        let n = x.vertex_count();
        if perm.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "expected {n} entries, got {}",
                perm.len()
            )));
        }
        let mut hit = vec![false; n];
        for &v in perm {
            if v >= n || std::mem::replace(&mut hit[v], true) {
                return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
            }
        }
        let graph = x.graph();
        let edge_map = graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                graph
                    .edge_index(perm[u], perm[v])
                    .ok_or(Error::NotAutomorphism { edge: (u, v) })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut hyperplane_map = vec![None; x.hyperplane_count()];
        for (e, &ge) in edge_map.iter().enumerate() {
            let (h, gh) = (x.edge_hyperplane(e), x.edge_hyperplane(ge));
            match hyperplane_map[h.0] {
                None => hyperplane_map[h.0] = Some(gh),
                Some(prev) if prev != gh => {
                    return Err(Error::InvariantViolation(format!(
                        "hyperplane {} has dual edges mapped to different hyperplanes",
                        h.0
                    )))
                }
                Some(_) => {}
            }
        }
        let hyperplane_map = hyperplane_map
            .into_iter()
            .map(|h| h.expect("every hyperplane has a dual edge"))
            .collect();

        let cube_map = x
            .cubes()
            .iter()
            .map(|c| {
                let image: Vec<Vertex> = c.vertices.iter().map(|&v| perm[v]).collect();
                x.cube_with_vertices(&image).ok_or_else(|| {
                    Error::InvariantViolation(format!("image of cube {:?} is not a cube", c.id))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Automorphism {
            vertex_map: perm.to_vec(),
            edge_map,
            hyperplane_map,
            cube_map,
        })
    }

    pub fn identity(x: &CubeComplex) -> Self {
        let perm: Vec<Vertex> = (0..x.vertex_count()).collect();
        Self::validate(x, &perm).expect("identity is an automorphism")
    }

    pub fn vertex_map(&self) -> &[Vertex] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.edge_map
    }

    pub fn hyperplane_map(&self) -> &[HyperplaneId] {
        &self.hyperplane_map
    }

    pub fn cube_map(&self) -> &[CubeId] {
        &self.cube_map
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        self.vertex_map[v]
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, x: &CubeComplex, other: &Automorphism) -> Result<Automorphism> {
        let perm: Vec<Vertex> = other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect();
        Automorphism::validate(x, &perm)
    }

    pub fn inverse(&self, x: &CubeComplex) -> Result<Automorphism> {
        let mut perm = vec![0; self.vertex_map.len()];
        for (v, &gv) in self.vertex_map.iter().enumerate() {
            perm[gv] = v;
        }
        Automorphism::validate(x, &perm)
    }
}

/// Every automorphism of a complex with at most [`ENUMERATION_LIMIT`]
/// vertices, by backtracking over degree-compatible vertex images.
pub fn enumerate_automorphisms(x: &CubeComplex) -> Result<Vec<Automorphism>> {
    let n = x.vertex_count();
    if n > ENUMERATION_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "automorphism enumeration is limited to {ENUMERATION_LIMIT} vertices, complex has {n}"
        )));
    }
    let adj = x.graph().adjacency();
    let graph = x.graph();
    let mut found = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn extend(
        perm: &mut Vec<Vertex>,
        used: &mut [bool],
        adj: &[Vec<Vertex>],
        graph: &crate::Graph,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let v = perm.len();
        if v == adj.len() {
            out.push(perm.clone());
            return;
        }
        for image in 0..adj.len() {
            if used[image] || adj[image].len() != adj[v].len() {
                continue;
            }
            let consistent = (0..v).all(|u| graph.has_edge(u, v) == graph.has_edge(perm[u], image));
            if consistent {
                used[image] = true;
                perm.push(image);
                extend(perm, used, adj, graph, out);
                perm.pop();
                used[image] = false;
            }
        }
    }
    extend(&mut perm, &mut used, &adj, graph, &mut found);
    found.into_iter().map(|p| Automorphism::validate(x, &p)).collect()
}

/// Orthogonal signed permutation `ω_C ↦ ±ω_{gC}` on the cube basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedPermutation {
    pub target: Vec<CubeId>,
    pub sign: Vec<i8>,
}

impl SignedPermutation {
    pub fn to_operator<T: Scalar>(&self, degrees: Vec<usize>) -> GradedOperator<T> {
        let mut u = GradedOperator::zero(degrees, Grading::PRESERVE);
        for (c, (&t, &s)) in self.target.iter().zip(&self.sign).enumerate() {
            let v = if s > 0 { T::one() } else { -T::one() };
            u.add_entry(t.0, c, v);
        }
        u
    }

    /// `U · op · Uᵀ`.
    pub fn conjugate<T: Scalar>(&self, op: &GradedOperator<T>) -> GradedOperator<T> {
        let mut out = GradedOperator::zero(op.degrees().to_vec(), op.grading());
        for ((r, c), v) in op.entries() {
            let s = self.sign[r] * self.sign[c];
            let v = if s > 0 { v.clone() } else { -v.clone() };
            out.add_entry(self.target[r].0, self.target[c].0, v);
        }
        out
    }
}

/// Parity of the permutation that sorts `values` (inversion count).
fn sorting_sign(values: &[HyperplaneId]) -> i8 {
    let inversions = (0..values.len())
        .flat_map(|i| (i + 1..values.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| values[i] > values[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `ω_C ↦ ω_{gC}`: `dx_{gH1} ∧ … ∧ dx_{gHq}` reordered to ascending.
pub fn unitary(x: &CubeComplex, g: &Automorphism) -> SignedPermutation {
    let (target, sign) = x
        .cubes()
        .iter()
        .map(|c| {
            let image: Vec<HyperplaneId> = c.mid.iter().map(|h| g.hyperplane_map[h.0]).collect();
            (g.cube_map[c.id.0], sorting_sign(&image))
        })
        .unzip();
    SignedPermutation { target, sign }
}

/// `gw(H) = w(g⁻¹H)` for a weight slice.
pub fn push_weights<T: Clone>(w: &[T], g: &Automorphism) -> Vec<T> {
    let mut out = w.to_vec();
    for (h, gh) in g.hyperplane_map.iter().enumerate() {
        out[gh.0] = w[h].clone();
    }
    out
}

/// `U_g D_{w,P} U_gᵀ`, checked against direct assembly of `D_{gw,gP}`.
pub fn translated_jv<T: Scalar>(x: &CubeComplex, g: &Automorphism, w: &[T]) -> Result<GradedOperator<T>> {
    let moved = unitary(x, g).conjugate(&jv_operator(x, w));
    let rebased = x.rebased(g.apply(x.base()))?;
    let direct = jv_operator(&rebased, &push_weights(w, g));
    first_mismatch(&moved, &direct).map_or(Ok(moved), |(row, col)| {
        Err(Error::IdentityViolated { row, col })
    })
}

pub(crate) fn first_mismatch<T: Scalar>(a: &GradedOperator<T>, b: &GradedOperator<T>) -> Option<(usize, usize)> {
    a.entries()
        .chain(b.entries())
        .map(|(k, _)| k)
        .find(|&(r, c)| !a.get(r, c).approx_eq(&b.get(r, c)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceReport {
    /// `‖g(D) − D‖`.
    pub norm: f64,
    /// `sup_H |gw(H) − w(H)|`.
    pub weight_gap: f64,
    /// `max{w(H) : H separates P and gP}`, zero when `gP = P`.
    pub separating_max: f64,
    /// `norm / (weight_gap + separating_max)`, absent when both vanish.
    pub ratio: Option<f64>,
    pub moves_base: bool,
    pub support_entries: usize,
}

/// The hyperplane cutting `big` but not its codimension-one face `small`.
fn mediating_hyperplane(x: &CubeComplex, a: usize, b: usize) -> Option<HyperplaneId> {
    let (ca, cb) = (x.cube(CubeId(a)), x.cube(CubeId(b)));
    let (big, small) = if ca.dim > cb.dim { (ca, cb) } else { (cb, ca) };
    if big.dim != small.dim + 1 || !small.vertices.iter().all(|v| big.vertices.contains(v)) {
        return None;
    }
    big.mid.iter().copied().find(|h| !small.mid.contains(h))
}

fn difference_generic<T: Scalar>(x: &CubeComplex, g: &Automorphism, w: &[T]) -> Result<DifferenceReport> {
    let d = jv_operator(x, w);
    let moved = translated_jv(x, g, w)?;
    let diff = moved.sub(&d).pruned();
    let gw = push_weights(w, g);
    let (p, gp) = (x.base(), g.apply(x.base()));
    for ((r, c), _) in diff.entries() {
        let allowed = mediating_hyperplane(x, r, c)
            .is_some_and(|h| x.separates(h, p, gp) || !gw[h.0].approx_eq(&w[h.0]));
        if !allowed {
            return Err(Error::SupportViolated { row: r, col: c });
        }
    }
    let norm = symmetric_norm(&diff.to_f64(), Execution::default())?;
    let weight_gap = w
        .iter()
        .zip(&gw)
        .map(|(a, b)| a.deviation(b))
        .fold(0.0, f64::max);
    let separating_max = x
        .separating_hyperplanes(p, gp)
        .into_iter()
        .map(|h| w[h.0].to_f64())
        .fold(0.0, f64::max);
    let denom = weight_gap + separating_max;
    Ok(DifferenceReport {
        norm,
        weight_gap,
        separating_max,
        ratio: (denom > 0.0).then(|| norm / denom),
        moves_base: gp != p,
        support_entries: diff.nnz(),
    })
}

pub fn difference_report(x: &CubeComplex, g: &Automorphism, w: &WeightFn) -> Result<DifferenceReport> {
    match w.values() {
        WeightValues::Exact(v) => difference_generic(x, g, v),
        WeightValues::Float(v) => difference_generic(x, g, v),
    }
}
