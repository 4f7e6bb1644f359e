//! Brute-force median-graph recognition.
//!
//! A connected graph is the 1-skeleton of a finite CAT(0) cube complex exactly
//! when every vertex triple has a unique median. Intervals `I(u, v)` are kept
//! as bitsets so that a triple costs three word-wise intersections.

use crate::error::{Error, Result};
use crate::exec::Execution;

use super::graph::{Graph, Vertex};

/// Outcome of [`validate_median`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MedianCheck {
    Ok,
    Witness {
        triple: [Vertex; 3],
        median_count: usize,
    },
}

struct Intervals {
    words: usize,
    n: usize,
    bits: Vec<u64>,
}

impl Intervals {
    fn new(dist: &[Vec<u32>]) -> Self {
        let n = dist.len();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * n * words];
        for u in 0..n {
            for v in 0..n {
                let duv = dist[u][v];
                let row = &mut bits[(u * n + v) * words..(u * n + v + 1) * words];
                for m in 0..n {
                    if dist[u][m] + dist[m][v] == duv {
                        row[m / 64] |= 1 << (m % 64);
                    }
                }
            }
        }
        Intervals { words, n, bits }
    }

    fn get(&self, u: usize, v: usize) -> &[u64] {
        let start = (u * self.n + v) * self.words;
        &self.bits[start..start + self.words]
    }
}

pub fn validate_median(graph: &Graph) -> Result<MedianCheck> {
    validate_median_with(graph, Execution::default())
}

/// Checks every triple `u < v < x`; returns the lexicographically first
/// triple whose median set is not a singleton.
pub fn validate_median_with(graph: &Graph, exec: Execution) -> Result<MedianCheck> {
    graph.check_connected()?;
    let n = graph.vertex_count();
    let dist = graph.distance_matrix();
    let intervals = Intervals::new(&dist);
    let witness = exec.find_first(n, |u| {
        for v in u + 1..n {
            let uv = intervals.get(u, v);
            for x in v + 1..n {
                let ux = intervals.get(u, x);
                let vx = intervals.get(v, x);
                let count: u32 = (0..intervals.words)
                    .map(|k| (uv[k] & ux[k] & vx[k]).count_ones())
                    .sum();
                if count != 1 {
                    return Some(([u, v, x], count as usize));
                }
            }
        }
        None
    });
    Ok(match witness {
        None => MedianCheck::Ok,
        Some((triple, median_count)) => MedianCheck::Witness {
            triple,
            median_count,
        },
    })
}

/// [`validate_median`] with a violation turned into [`Error::NotMedian`].
pub fn require_median(graph: &Graph, exec: Execution) -> Result<()> {
    match validate_median_with(graph, exec)? {
        MedianCheck::Ok => Ok(()),
        MedianCheck::Witness {
            triple,
            median_count,
        } => Err(Error::NotMedian {
            triple,
            median_count,
        }),
    }
}
