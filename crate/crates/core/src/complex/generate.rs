//! Generators for standard families of median graphs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::graph::Graph;

/// A generator recipe. The textual form is `path:L`, `tree:ARITY:DEPTH`,
/// `grid:RxC`, `hypercube:D`, and `A*B` for the box product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenSpec {
    Path(usize),
    Tree { arity: usize, depth: usize },
    Grid { rows: usize, cols: usize },
    Hypercube(usize),
    Product(Box<GenSpec>, Box<GenSpec>),
}

impl GenSpec {
    /// Total number of cubes of all dimensions in the generated complex.
    pub fn cube_count(&self) -> u128 {
        match *self {
            GenSpec::Path(len) => 2 * len as u128 + 1,
            GenSpec::Tree { arity, depth } => 2 * tree_size(arity, depth) - 1,
            GenSpec::Grid { rows, cols } => (2 * rows as u128 - 1) * (2 * cols as u128 - 1),
            GenSpec::Hypercube(d) => 3u128.saturating_pow(d as u32),
            GenSpec::Product(ref a, ref b) => a.cube_count().saturating_mul(b.cube_count()),
        }
    }

    pub fn generate(&self, max_cubes: usize) -> Result<Graph> {
        let count = self.cube_count();
        if count > max_cubes as u128 {
            return Err(Error::SizeOverflow {
                count,
                cap: max_cubes as u128,
            });
        }
        match *self {
            GenSpec::Path(len) => path(len),
            GenSpec::Tree { arity, depth } => tree(arity, depth),
            GenSpec::Grid { rows, cols } => grid(rows, cols),
            GenSpec::Hypercube(d) => hypercube(d),
            GenSpec::Product(ref a, ref b) => product(&a.generate(max_cubes)?, &b.generate(max_cubes)?),
        }
    }
}

fn tree_size(arity: usize, depth: usize) -> u128 {
    (0..=depth as u32)
        .map(|i| (arity as u128).saturating_pow(i))
        .fold(0u128, u128::saturating_add)
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized generator spec {s:?}"));
        let factors: Vec<&str> = s.split('*').map(str::trim).collect();
        if factors.len() > 1 {
            let mut specs = factors.into_iter().map(GenSpec::from_str);
            let first = specs.next().unwrap()?;
            return specs.try_fold(first, |acc, next| {
                Ok(GenSpec::Product(Box::new(acc), Box::new(next?)))
            });
        }
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let args: Vec<&str> = parts.collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let spec = match (kind, args.as_slice()) {
            ("path", [len]) => GenSpec::Path(num(len)?),
            ("tree", [arity, depth]) => GenSpec::Tree {
                arity: num(arity)?,
                depth: num(depth)?,
            },
            ("grid", [dims]) => {
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                GenSpec::Grid {
                    rows: num(r)?,
                    cols: num(c)?,
                }
            }
            ("hypercube", [d]) => GenSpec::Hypercube(num(d)?),
            _ => return Err(bad()),
        };
        match spec {
            GenSpec::Tree { arity: 0, .. } | GenSpec::Grid { rows: 0, .. } | GenSpec::Grid { cols: 0, .. } => {
                Err(Error::InvalidParameter(format!("size parameters must be positive in {s:?}")))
            }
            spec => Ok(spec),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Path(len) => write!(f, "path:{len}"),
            GenSpec::Tree { arity, depth } => write!(f, "tree:{arity}:{depth}"),
            GenSpec::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            GenSpec::Hypercube(d) => write!(f, "hypercube:{d}"),
            GenSpec::Product(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

/// Path with `len` edges, based at one end.
pub fn path(len: usize) -> Result<Graph> {
    let edges: Vec<_> = (0..len).map(|i| (i, i + 1)).collect();
    Graph::new(len + 1, &edges, 0)
}

/// Rooted tree where every internal vertex has `arity` children; vertices in
/// breadth-first order, base at the root.
pub fn tree(arity: usize, depth: usize) -> Result<Graph> {
    if arity == 0 {
        return Err(Error::InvalidParameter("tree arity must be positive".into()));
    }
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1;
    for _ in 0..depth {
        let mut next_level = Vec::with_capacity(level.len() * arity);
        for &parent in &level {
            for _ in 0..arity {
                edges.push((parent, next_id));
                next_level.push(next_id);
                next_id += 1;
            }
        }
        level = next_level;
    }
    Graph::new(next_id, &edges, 0)
}

/// `rows × cols` vertex grid, based at a corner.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("grid sides must be positive".into()));
    }
    product(&path(rows - 1)?, &path(cols - 1)?)
}

/// 1-skeleton of the `d`-cube; vertex bits are coordinates, base at 0.
pub fn hypercube(d: usize) -> Result<Graph> {
    let n = 1usize << d;
    let edges: Vec<_> = (0..n)
        .flat_map(|v| (0..d).filter(move |&i| v & (1 << i) == 0).map(move |i| (v, v | (1 << i))))
        .collect();
    Graph::new(n, &edges, 0)
}

/// Box product; vertex `(a, b)` gets id `a * |V(right)| + b`, base is the
/// pair of bases.
pub fn product(left: &Graph, right: &Graph) -> Result<Graph> {
    let (n1, n2) = (left.vertex_count(), right.vertex_count());
    let id = |a: usize, b: usize| a * n2 + b;
    let mut edges = Vec::with_capacity(left.edges().len() * n2 + right.edges().len() * n1);
    for &(u, v) in left.edges() {
        edges.extend((0..n2).map(|b| (id(u, b), id(v, b))));
    }
    for &(u, v) in right.edges() {
        edges.extend((0..n1).map(|a| (id(a, u), id(a, v))));
    }
    Graph::new(n1 * n2, &edges, id(left.base(), right.base()))
}
