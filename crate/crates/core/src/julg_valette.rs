//! The Julg–Valette operator `D = d + δ` on the space spanned by one
//! top-degree form `ω_C` per cube `C`.
//!
//! Each cube's form is oriented as `dx_{H1} ∧ … ∧ dx_{Hq}` with its cutting
//! hyperplanes in ascending id order, so every sign below is a wedge
//! reordering parity. The diagonal law for `D²` is the detector of sign bugs.

use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

use crate::complex::{CubeComplex, CubeId, HyperplaneId};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{block_eigen, rank_exact, rank_float};
use crate::operator::{GradedOperator, Grading};
use crate::scalar::Scalar;
use crate::weights::{WeightFn, WeightValues};

/// `(-1)^{#{H' ∈ mid : H' < h}}`: the sign of moving `dx_h` into place.
pub fn wedge_sign<T: Scalar>(mid: &[HyperplaneId], h: HyperplaneId) -> T {
    if mid.iter().filter(|&&m| m < h).count() % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `d ω_C = Σ_{H ∈ SAH(C)} ± w(H) ω_{coface(C, H)}`.
pub fn assemble_d<T: Scalar>(x: &CubeComplex, w: &[T]) -> GradedOperator<T> {
    let mut d = GradedOperator::on_complex(x, Grading::RAISE);
    for cube in x.cubes() {
        for &h in x.sah(cube.id) {
            let target = x.coface(cube.id, h).expect("SAH hyperplanes have cofaces");
            let sign: T = wedge_sign(&cube.mid, h);
            d.add_entry(target.0, cube.id.0, sign * w[h.0].clone());
        }
    }
    d
}

/// `δ ω_D = Σ_{H ∈ Mid(D)} ± w(H) ω_{C}` where `C` is the face of `D` on the
/// far side of `H`; the sign is that of contracting `dx_H` out of `ω_D`.
pub fn assemble_delta<T: Scalar>(x: &CubeComplex, w: &[T]) -> GradedOperator<T> {
    let mut delta = GradedOperator::on_complex(x, Grading::LOWER);
    for cube in x.cubes() {
        for (position, &h) in cube.mid.iter().enumerate() {
            let face: Vec<_> = cube
                .vertices
                .iter()
                .copied()
                .filter(|&v| x.is_far(h, v))
                .collect();
            let face = x.cube_with_vertices(&face).expect("faces are cubes");
            let sign = if position % 2 == 0 { T::one() } else { -T::one() };
            delta.add_entry(face.0, cube.id.0, sign * w[h.0].clone());
        }
    }
    delta
}

pub fn jv_operator<T: Scalar>(x: &CubeComplex, w: &[T]) -> GradedOperator<T> {
    assemble_d(x, w).add(&assemble_delta(x, w))
}

/// Predicted diagonal of `D²`: `Σ_{SAH(C)} w² + Σ_{Mid(C)} w²`.
pub fn d_squared_diagonal<T: Scalar>(x: &CubeComplex, w: &[T]) -> Vec<T> {
    x.cubes()
        .iter()
        .map(|c| {
            x.sah(c.id)
                .iter()
                .chain(&c.mid)
                .fold(T::zero(), |acc, h| acc + w[h.0].clone() * w[h.0].clone())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DSquaredReport {
    pub exact: bool,
    pub max_deviation: f64,
    pub diagonal: Vec<f64>,
}

/// Compares `D²` entrywise against the diagonal law.
pub fn d_squared_law_check<T: Scalar>(x: &CubeComplex, w: &[T]) -> Result<DSquaredReport> {
    let d = jv_operator(x, w);
    let square = d.compose(&d);
    let diagonal = d_squared_diagonal(x, w);
    let mut row_dev: Vec<f64> = diagonal
        .iter()
        .enumerate()
        .map(|(i, v)| square.get(i, i).deviation(v))
        .collect();
    for ((r, c), v) in square.entries() {
        if r != c {
            row_dev[r] = row_dev[r].max(v.deviation(&T::zero()));
        }
    }
    let mut worst: f64 = 0.0;
    for (c, &dev) in row_dev.iter().enumerate() {
        if dev.is_nan() || dev > T::TOLERANCE {
            return Err(Error::LawViolated {
                cube: CubeId(c),
                deviation: dev,
            });
        }
        worst = worst.max(dev);
    }
    Ok(DSquaredReport {
        exact: T::EXACT,
        max_deviation: worst,
        diagonal: diagonal.iter().map(Scalar::to_f64).collect(),
    })
}

/// Matrix of `d` from degree `q` to degree `q + 1`, rows = (q+1)-cubes.
fn differential_block<T: Scalar>(x: &CubeComplex, d: &GradedOperator<T>, q: usize) -> Vec<Vec<T>> {
    let (rows, cols) = (x.cubes_of_dim(q + 1), x.cubes_of_dim(q));
    let (row0, col0) = match (rows.first(), cols.first()) {
        (Some(r), Some(c)) => (r.id.0, c.id.0),
        _ => return Vec::new(),
    };
    let mut m = vec![vec![T::zero(); cols.len()]; rows.len()];
    for ((r, c), v) in d.entries() {
        if (col0..col0 + cols.len()).contains(&c) {
            m[r - row0][c - col0] = v.clone();
        }
    }
    m
}

/// `dim ker d^q − rank d^{q−1}` for each degree, with the given rank oracle.
fn cohomology_with<T: Scalar>(x: &CubeComplex, w: &[T], rank: impl Fn(&[Vec<T>]) -> usize) -> Vec<usize> {
    let d = assemble_d(x, w);
    let top = x.dimension();
    let ranks: Vec<usize> = (0..top).map(|q| rank(&differential_block(x, &d, q))).collect();
    (0..=top)
        .map(|q| {
            let n_q = x.cubes_of_dim(q).len();
            let out_rank = ranks.get(q).copied().unwrap_or(0);
            let in_rank = q.checked_sub(1).map_or(0, |p| ranks[p]);
            n_q - out_rank - in_rank
        })
        .collect()
}

pub fn cohomology_dims_exact(x: &CubeComplex, w: &[Rational64]) -> Vec<usize> {
    cohomology_with(x, w, rank_exact)
}

pub fn cohomology_dims_float(x: &CubeComplex, w: &[f64]) -> Vec<usize> {
    cohomology_with(x, w, |rows| {
        let ncols = rows.first().map_or(0, Vec::len);
        let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        rank_float(&m, f64::TOLERANCE)
    })
}

/// Exact ranks for rational weights, numerical ranks otherwise.
pub fn cohomology_dims(x: &CubeComplex, w: &WeightFn) -> Vec<usize> {
    match w.values() {
        WeightValues::Exact(v) => cohomology_dims_exact(x, v),
        WeightValues::Float(v) => cohomology_dims_float(x, v),
    }
}

/// `F = D (1 + D²)^{-1/2}` computed block by block from eigendecompositions.
#[derive(Debug, Clone)]
pub struct BoundedTransform {
    pub operator: GradedOperator<f64>,
    /// Eigenvalues `λ` of the input, ascending.
    pub source_eigenvalues: Vec<f64>,
}

impl BoundedTransform {
    /// `λ / √(1 + λ²)` for each source eigenvalue.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.source_eigenvalues
            .iter()
            .map(|l| l / (1.0 + l * l).sqrt())
            .collect()
    }

    /// Eigenvalues of `1 − F²`, i.e. `1 / (1 + λ²)`.
    pub fn defect_eigenvalues(&self) -> Vec<f64> {
        self.source_eigenvalues
            .iter()
            .map(|l| 1.0 / (1.0 + l * l))
            .collect()
    }
}

pub fn bounded_transform(op: &GradedOperator<f64>) -> Result<BoundedTransform> {
    bounded_transform_with(op, Execution::default())
}

pub fn bounded_transform_with(op: &GradedOperator<f64>, exec: Execution) -> Result<BoundedTransform> {
    let blocks = block_eigen(op, exec)?;
    let mut operator = GradedOperator::zero(op.degrees().to_vec(), op.grading());
    let mut source_eigenvalues = Vec::with_capacity(op.dim());
    for block in &blocks {
        let f = block.values.map(|l| l / (1.0 + l * l).sqrt());
        let dense = &block.vectors * DMatrix::from_diagonal(&f) * block.vectors.transpose();
        for (i, &gi) in block.indices.iter().enumerate() {
            for (j, &gj) in block.indices.iter().enumerate() {
                if dense[(i, j)].abs() > 1e-14 {
                    operator.add_entry(gi, gj, dense[(i, j)]);
                }
            }
        }
        source_eigenvalues.extend(block.values.iter());
    }
    source_eigenvalues.sort_by(f64::total_cmp);
    Ok(BoundedTransform {
        operator,
        source_eigenvalues,
    })
}
