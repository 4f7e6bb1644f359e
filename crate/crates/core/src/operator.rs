//! Sparse operators on the cube-indexed basis, graded by cube dimension.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex::CubeComplex;
use crate::scalar::Scalar;

/// How an operator moves the dimension grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Grading {
    /// Maps degree `q` into degree `q + k`.
    Shift(i32),
    /// Only changes degree by odd (`true`) or even (`false`) amounts.
    Parity(bool),
    Ungraded,
}

impl Grading {
    pub const RAISE: Grading = Grading::Shift(1);
    pub const LOWER: Grading = Grading::Shift(-1);
    pub const PRESERVE: Grading = Grading::Shift(0);
    pub const ODD: Grading = Grading::Parity(true);

    fn parity(self) -> Option<bool> {
        match self {
            Grading::Shift(k) => Some(k.rem_euclid(2) == 1),
            Grading::Parity(p) => Some(p),
            Grading::Ungraded => None,
        }
    }

    fn sum(self, other: Grading) -> Grading {
        match (self, other) {
            (a, b) if a == b => a,
            (a, b) => match (a.parity(), b.parity()) {
                (Some(p), Some(q)) if p == q => Grading::Parity(p),
                _ => Grading::Ungraded,
            },
        }
    }

    fn compose(self, other: Grading) -> Grading {
        match (self, other) {
            (Grading::Shift(a), Grading::Shift(b)) => Grading::Shift(a + b),
            (a, b) => match (a.parity(), b.parity()) {
                (Some(p), Some(q)) => Grading::Parity(p ^ q),
                _ => Grading::Ungraded,
            },
        }
    }

    fn transpose(self) -> Grading {
        match self {
            Grading::Shift(k) => Grading::Shift(-k),
            other => other,
        }
    }

    pub fn allows(self, from: usize, to: usize) -> bool {
        let diff = to as i64 - from as i64;
        match self {
            Grading::Shift(k) => diff == k as i64,
            Grading::Parity(p) => (diff.rem_euclid(2) == 1) == p,
            Grading::Ungraded => true,
        }
    }
}

/// Sparse square matrix; entry `(row, col)` is the coefficient of basis
/// element `row` in the image of basis element `col`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator<T> {
    degrees: Vec<usize>,
    grading: Grading,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> GradedOperator<T> {
    pub fn zero(degrees: Vec<usize>, grading: Grading) -> Self {
        GradedOperator {
            degrees,
            grading,
            entries: BTreeMap::new(),
        }
    }

    /// Empty operator on the cube basis of `x`.
    pub fn on_complex(x: &CubeComplex, grading: Grading) -> Self {
        Self::zero(x.cubes().iter().map(|c| c.dim).collect(), grading)
    }

    pub fn identity(degrees: Vec<usize>) -> Self {
        let mut op = Self::zero(degrees, Grading::PRESERVE);
        for i in 0..op.dim() {
            op.entries.insert((i, i), T::one());
        }
        op
    }

    /// Adds `value` to entry `(row, col)`, dropping it if the sum is exactly zero.
    pub fn add_entry(&mut self, row: usize, col: usize, value: T) {
        let slot = self.entries.entry((row, col)).or_insert_with(T::zero);
        *slot = slot.clone() + value;
        if slot.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn transpose(&self) -> Self {
        GradedOperator {
            degrees: self.degrees.clone(),
            grading: self.grading.transpose(),
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degrees, other.degrees, "operators on different bases");
        let mut out = self.clone();
        out.grading = self.grading.sum(other.grading);
        for (&(r, c), v) in &other.entries {
            out.add_entry(r, c, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v = v.clone() * factor.clone();
        }
        out.entries.retain(|_, v| !v.is_zero());
        out
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degrees, other.degrees, "operators on different bases");
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.dim()];
        for (&(r, c), v) in &other.entries {
            rows[r].push((c, v.clone()));
        }
        let mut out = Self::zero(self.degrees.clone(), self.grading.compose(other.grading));
        for (&(i, k), a) in &self.entries {
            for (j, b) in &rows[k] {
                out.add_entry(i, *j, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GradedOperator<U> {
        let mut out = GradedOperator::zero(self.degrees.clone(), self.grading);
        for (&(r, c), v) in &self.entries {
            out.add_entry(r, c, f(v));
        }
        out
    }

    pub fn to_f64(&self) -> GradedOperator<f64> {
        self.map(Scalar::to_f64)
    }

    /// Drops entries within the scalar tolerance of zero.
    pub fn pruned(&self) -> Self {
        let mut out = self.clone();
        out.entries.retain(|_, v| !v.is_negligible());
        out
    }

    /// First nonzero entry that moves degrees in a way the grading forbids.
    pub fn grading_violation(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_negligible())
            .map(|(&k, _)| k)
            .find(|&(r, c)| !self.grading.allows(self.degrees[c], self.degrees[r]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries
            .iter()
            .all(|(&(r, c), v)| v.approx_eq(&self.get(c, r)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries
            .iter()
            .all(|(&(r, c), v)| r == c || v.is_negligible())
    }

    /// Largest entrywise `|self - other|`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|&(r, c)| self.get(r, c).deviation(&other.get(r, c)))
            .fold(0.0, f64::max)
    }

    /// Sign pattern of the nonzero entries.
    pub fn sign_pattern(&self) -> BTreeMap<(usize, usize), i8> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_negligible())
            .map(|(&k, v)| (k, if v.to_f64() > 0.0 { 1 } else { -1 }))
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = v.to_f64();
        }
        m
    }

    /// Dense submatrix on the given basis indices.
    pub fn restrict(&self, indices: &[usize]) -> DMatrix<f64> {
        let n = indices.len();
        DMatrix::from_fn(n, n, |i, j| self.get(indices[i], indices[j]).to_f64())
    }

    /// Connected components of the (symmetrized) sparsity graph, each sorted,
    /// ordered by smallest index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c) in self.entries.keys() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn compose_and_transpose() {
        let mut a = GradedOperator::zero(vec![0, 0, 1], Grading::RAISE);
        a.add_entry(2, 0, r(1, 2));
        a.add_entry(2, 1, r(-3, 2));
        let at = a.transpose();
        assert_eq!(at.grading(), Grading::LOWER);
        let aat = a.compose(&at);
        assert_eq!(aat.get(2, 2), r(10, 4));
        assert_eq!(aat.nnz(), 1);
        let d = a.add(&at);
        assert_eq!(d.grading(), Grading::ODD);
        assert!(d.is_symmetric());
        assert_eq!(d.grading_violation(), None);
        assert_eq!(a.compose(&a).nnz(), 0);
    }

    #[test]
    fn cancellation_removes_entries() {
        let mut a = GradedOperator::<Rational64>::zero(vec![0, 1], Grading::RAISE);
        a.add_entry(1, 0, r(1, 1));
        a.add_entry(1, 0, r(-1, 1));
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn grading_violation_detected() {
        let mut a = GradedOperator::<f64>::zero(vec![0, 1], Grading::RAISE);
        a.add_entry(0, 1, 1.0);
        assert_eq!(a.grading_violation(), Some((0, 1)));
    }

    #[test]
    fn components_split_blocks() {
        let mut a = GradedOperator::<f64>::zero(vec![0; 5], Grading::Ungraded);
        a.add_entry(0, 3, 1.0);
        a.add_entry(4, 1, 1.0);
        assert_eq!(a.components(), vec![vec![0, 3], vec![1, 4], vec![2]]);
    }
}
