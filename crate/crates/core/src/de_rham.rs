//! Spectrum of the squared Witten–de Rham operator.
//!
//! The operator is block diagonal over vertices `Q`, and on the block of `Q`
//! it is a graded tensor product of one interval factor per hyperplane in
//! `SAH(Q)`. Each factor has squared spectrum
//! `{½w(1 − e^{−2w})} ⊔ {π²k² + w² : k ≥ 1}`, so block spectra are sums of
//! one term per factor. The finite-difference routines at the bottom
//! reproduce the single-factor lists independently.

use std::f64::consts::PI;

use serde::Serialize;

use crate::complex::{CubeComplex, CubeId, Vertex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{bisect_eigenvalues, relative_error, simpson, solve_tridiagonal, SymTridiagonal};
use crate::weights::WeightFn;

pub const DEFAULT_TRUNCATION_CAP: usize = 1_000_000;

/// `½w(1 − e^{−2w})`, the lowest squared eigenvalue of one interval factor.
pub fn base_term(w: f64) -> f64 {
    -0.5 * w * (-2.0 * w).exp_m1()
}

/// Squared spectrum of the interval factor for one hyperplane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorSpectrum {
    pub weight: f64,
}

impl FactorSpectrum {
    pub fn new(weight: f64) -> Self {
        FactorSpectrum { weight }
    }

    pub fn base_term(&self) -> f64 {
        base_term(self.weight)
    }

    /// `π²k² + w²` for `k ≥ 1`.
    pub fn series(&self, k: u64) -> f64 {
        let k = k as f64;
        PI * PI * k * k + self.weight * self.weight
    }
}

/// Sorted multiset of eigenvalues no larger than `truncation`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralList {
    entries: Vec<(f64, usize)>,
    truncation: f64,
}

impl SpectralList {
    /// Sorts `values` and merges those within `rel_tol` (relative to
    /// `max(1, |v|)`) of the previous distinct value.
    pub fn from_values(mut values: Vec<f64>, truncation: f64, rel_tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        let mut entries: Vec<(f64, usize)> = Vec::new();
        for v in values {
            match entries.last_mut() {
                Some((last, mult)) if (v - *last).abs() <= rel_tol * last.abs().max(1.0) => *mult += 1,
                _ => entries.push((v, 1)),
            }
        }
        SpectralList { entries, truncation }
    }

    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn count(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.entries.first().map(|e| e.0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Eigenvalues with multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect()
    }
}

/// All sums of one term per factor that stay at or below `lambda_max`.
pub fn factor_sums(weights: &[f64], lambda_max: f64, cap: usize) -> Result<SpectralList> {
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let factors: Vec<FactorSpectrum> = weights.iter().map(|&w| FactorSpectrum::new(w)).collect();
    // min_rest[i]: smallest possible contribution of factors i..
    let mut min_rest = vec![0.0; factors.len() + 1];
    for i in (0..factors.len()).rev() {
        min_rest[i] = min_rest[i + 1] + factors[i].base_term();
    }

    fn descend(
        i: usize,
        partial: f64,
        factors: &[FactorSpectrum],
        min_rest: &[f64],
        lambda_max: f64,
        cap: usize,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        if i == factors.len() {
            if out.len() >= cap {
                return Err(Error::TruncationOverflow { cap });
            }
            out.push(partial);
            return Ok(());
        }
        let rest = min_rest[i + 1];
        let f = factors[i];
        if partial + f.base_term() + rest <= lambda_max {
            descend(i + 1, partial + f.base_term(), factors, min_rest, lambda_max, cap, out)?;
        }
        let mut k = 1;
        while partial + f.series(k) + rest <= lambda_max {
            descend(i + 1, partial + f.series(k), factors, min_rest, lambda_max, cap, out)?;
            k += 1;
        }
        Ok(())
    }

    let mut values = Vec::new();
    descend(0, 0.0, &factors, &min_rest, lambda_max, cap, &mut values)?;
    Ok(SpectralList::from_values(values, lambda_max, 1e-12))
}

fn sah_weights(x: &CubeComplex, w: &WeightFn, q: Vertex) -> Vec<f64> {
    x.sah(CubeId(q)).iter().map(|&h| w.get(h)).collect()
}

/// Squared spectrum of the de Rham operator on the block of vertex `q`.
pub fn block_spectrum(x: &CubeComplex, w: &WeightFn, q: Vertex, lambda_max: f64) -> Result<SpectralList> {
    factor_sums(&sah_weights(x, w, q), lambda_max, DEFAULT_TRUNCATION_CAP)
}

/// `Σ_{H ∈ SAH(q)} ½w(H)(1 − e^{−2w(H)})`.
pub fn block_lower_bound(x: &CubeComplex, w: &WeightFn, q: Vertex) -> f64 {
    sah_weights(x, w, q).into_iter().map(base_term).sum()
}

/// Eigenvalue counting function `N(λ)` summed over all blocks.
pub fn global_counting(x: &CubeComplex, w: &WeightFn, lambda: f64) -> Result<usize> {
    global_counting_with(x, w, lambda, Execution::default())
}

pub fn global_counting_with(x: &CubeComplex, w: &WeightFn, lambda: f64, exec: Execution) -> Result<usize> {
    exec.map_range(x.vertex_count(), |q| block_spectrum(x, w, q, lambda).map(|s| s.count()))
        .into_iter()
        .sum()
}

/// Every block spectrum, indexed by block vertex.
pub fn all_block_spectra(x: &CubeComplex, w: &WeightFn, lambda_max: f64, exec: Execution) -> Result<Vec<SpectralList>> {
    exec.map_range(x.vertex_count(), |q| block_spectrum(x, w, q, lambda_max))
        .into_iter()
        .collect()
}

// Finite-difference model of a single edge [0, 1].
//
// 0-forms f live on interior nodes (Dirichlet), 1-forms g·dx on cell
// midpoints, and d_w f = (f' + w f) dx is discretized by a centred difference
// plus the midpoint average. In orthonormal coordinates the operator
// d_w + d_w^* interleaves as a symmetric tridiagonal matrix with zero
// diagonal on (g_0, f_1, g_1, …, f_{n−1}, g_{n−1}).

fn check_grid(w: f64, n: usize) -> Result<()> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("grid size must be at least 16, got {n}")));
    }
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight must be non-negative, got {w}")));
    }
    Ok(())
}

/// The `(2n − 1)`-point interleaved interval operator.
pub fn interval_operator(w: f64, n: usize) -> Result<SymTridiagonal> {
    check_grid(w, n)?;
    let h = 1.0 / n as f64;
    let forward = 1.0 / h + 0.5 * w;
    let backward = -1.0 / h + 0.5 * w;
    let off = (0..2 * n - 2)
        .map(|i| if i % 2 == 0 { forward } else { backward })
        .collect();
    Ok(SymTridiagonal::new(vec![0.0; 2 * n - 1], off))
}

/// Midpoint samples of `w e^{w(x − 1)}`, scaled to orthonormal coordinates,
/// placed on the 1-form slots of the interleaved ordering.
pub fn vertex_coupling(w: f64, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (0..2 * n - 1)
        .map(|i| {
            if i % 2 == 0 {
                let x = (i / 2) as f64 * h + 0.5 * h;
                w * (w * (x - 1.0)).exp() * h.sqrt()
            } else {
                0.0
            }
        })
        .collect()
}

fn squared_spectrum(count: impl Fn(f64) -> usize, lambda_max: f64) -> Result<SpectralList> {
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let r = lambda_max.sqrt();
    let pad = 1e-9 * r.max(1.0);
    // Asymmetric bracket: the first bisection midpoint must not land on the
    // (possibly singular) shift 0.
    let values: Vec<f64> = bisect_eigenvalues(count, -r - pad, r + 3.0 * pad)
        .into_iter()
        .map(|l| l * l)
        .filter(|&v| v <= lambda_max)
        .collect();
    Ok(SpectralList::from_values(values, lambda_max, 1e-9))
}

/// Squared eigenvalues up to `lambda_max` of the discretized one-edge
/// Witten operator; approximates `{0} ⊔ {π²k² + w²}` (each series value twice).
pub fn galerkin_interval(w: f64, n: usize, lambda_max: f64) -> Result<SpectralList> {
    let t = interval_operator(w, n)?;
    squared_spectrum(|mu| t.count_below(mu), lambda_max)
}

/// The interval operator with the vertex 0-form appended and coupled through
/// `1 ↦ w e^{w(x−1)} dx`; its lowest squared eigenvalue approximates
/// `½w(1 − e^{−2w})`.
pub fn galerkin_two_cell(w: f64, n: usize, lambda_max: f64) -> Result<SpectralList> {
    let t = interval_operator(w, n)?;
    let border = vertex_coupling(w, n);
    squared_spectrum(|mu| t.bordered_count_below(&border, 0.0, mu), lambda_max)
}

/// Kernel 1-form of the discrete interval operator by inverse iteration on
/// the 1-form block of its square; unit norm, positive orientation.
pub fn galerkin_kernel_vector(w: f64, n: usize) -> Result<Vec<f64>> {
    check_grid(w, n)?;
    let h = 1.0 / n as f64;
    let (forward, backward) = (1.0 / h + 0.5 * w, -1.0 / h + 0.5 * w);
    // (A Aᵀ)_{ii}: node i (if interior) and node i+1 (if interior)
    let shift = 1e-6;
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i >= 1 { backward * backward } else { 0.0 };
            let right = if i < n - 1 { forward * forward } else { 0.0 };
            left + right + shift
        })
        .collect();
    let off = vec![forward * backward; n - 1];
    let t = SymTridiagonal::new(diag, off);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..6 {
        v = solve_tridiagonal(&t, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::EigenFailure("inverse iteration diverged".into()));
        }
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign / norm);
    }
    Ok(v)
}

/// Cosine similarity between the discrete kernel and samples of `e^{wx}`.
pub fn kernel_alignment(w: f64, n: usize) -> Result<f64> {
    let v = galerkin_kernel_vector(w, n)?;
    let h = 1.0 / n as f64;
    let reference: Vec<f64> = (0..n).map(|i| (w * (i as f64 + 0.5) * h).exp()).collect();
    let dot: f64 = v.iter().zip(&reference).map(|(a, b)| a * b).sum();
    let norm_r = reference.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_v = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(dot / (norm_r * norm_v))
}

/// One row of a grid-refinement study for the first series eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub computed: f64,
    pub analytic: f64,
    pub relative_error: f64,
}

/// First nonzero squared eigenvalue of the interval operator against
/// `π² + w²`, at `n` and each doubling up to `levels` rows.
pub fn convergence_table(w: f64, n: usize, levels: usize) -> Result<Vec<ConvergenceRow>> {
    let analytic = FactorSpectrum::new(w).series(1);
    (0..levels)
        .map(|level| {
            let n = n << level;
            let spectrum = galerkin_interval(w, n, analytic * 1.5)?;
            let computed = spectrum
                .entries()
                .iter()
                .map(|e| e.0)
                .find(|&v| v > 0.5 * analytic)
                .ok_or_else(|| Error::EigenFailure("first series eigenvalue not found".into()))?;
            Ok(ConvergenceRow {
                n,
                computed,
                analytic,
                relative_error: relative_error(computed, analytic),
            })
        })
        .collect()
}

/// Observed order `log₂(e(n) / e(2n))` between consecutive rows.
pub fn observed_orders(rows: &[ConvergenceRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|p| (p[0].relative_error / p[1].relative_error).log2())
        .collect()
}

/// `w² ∫₀¹ e^{2w(x−1)} dx` by composite Simpson.
pub fn quadrature_base_term(w: f64) -> f64 {
    w * w * simpson(|x| (2.0 * w * (x - 1.0)).exp(), 0.0, 1.0, 4096)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarEstimateReport {
    /// Largest `|w e^{−wx} − (w+m) e^{−(w+m)x}|` on the grid.
    pub calculus_max: f64,
    pub calculus_bound: f64,
    pub calculus_slack: f64,
    /// Largest `x e^{−x}` on the grid, against the bound 1.
    pub xexp_max: f64,
    pub xexp_slack: f64,
}

/// Checks `|w e^{−wx} − (w+m) e^{−(w+m)x}| ≤ 2M` for `0 ≤ m ≤ M` and
/// `sup x e^{−x} ≤ 1` on the sample grid `weights × [0, x_max]`.
pub fn scalar_estimates(
    big_m: f64,
    m: f64,
    weights: &[f64],
    x_max: f64,
    x_points: usize,
) -> Result<ScalarEstimateReport> {
    let ordered = 0.0 <= m && m <= big_m;
    if !ordered || x_points < 2 || x_max.is_nan() || x_max <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= m <= M, x_max > 0 and at least two grid points (m = {m}, M = {big_m})"
        )));
    }
    let xs: Vec<f64> = (0..x_points)
        .map(|i| x_max * i as f64 / (x_points - 1) as f64)
        .collect();
    let calculus_max = Execution::default()
        .map(weights, |&w| {
            xs.iter()
                .map(|&x| (w * (-w * x).exp() - (w + m) * (-(w + m) * x).exp()).abs())
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max);
    let xexp_max = xs.iter().map(|&x| x * (-x).exp()).fold(0.0, f64::max);
    let calculus_bound = 2.0 * big_m;
    if calculus_max > calculus_bound {
        return Err(Error::EstimateViolated(format!(
            "calculus estimate reached {calculus_max} > 2M = {calculus_bound}"
        )));
    }
    if xexp_max > 1.0 {
        return Err(Error::EstimateViolated(format!("x e^-x reached {xexp_max} > 1")));
    }
    Ok(ScalarEstimateReport {
        calculus_max,
        calculus_bound,
        calculus_slack: calculus_bound - calculus_max,
        xexp_max,
        xexp_slack: 1.0 - xexp_max,
    })
}
