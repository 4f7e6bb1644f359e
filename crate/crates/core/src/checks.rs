//! Named invariant checks over one complex and weight, as run by `verify-all`.

use serde::Serialize;

use crate::complex::{validate_median_with, MedianCheck};
use crate::complex::{CubeComplex, CubeId};
use crate::de_rham::{base_term, block_lower_bound, block_spectrum, scalar_estimates};
use crate::error::Error;
use crate::exec::Execution;
use crate::group_action::{difference_report, enumerate_automorphisms, translated_jv, unitary, ENUMERATION_LIMIT};
use crate::homotopy::{convergence_scan, deformed_block_law};
use crate::julg_valette::{assemble_d, assemble_delta, bounded_transform_with, cohomology_dims, d_squared_law_check, jv_operator};
use crate::operator::GradedOperator;
use crate::scalar::Scalar;
use crate::weights::{WeightFn, WeightSpec, WeightValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    /// Worst measured deviation (or violation count for combinatorial checks).
    pub measured: f64,
    pub tolerance: f64,
    /// `tolerance − measured`; negative on failure.
    pub slack: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn measure(name: &'static str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if measured <= tolerance { Status::Pass } else { Status::Fail };
        CheckOutcome {
            name,
            status,
            measured,
            tolerance,
            slack: tolerance - measured,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        CheckOutcome {
            name,
            status: Status::Fail,
            measured: f64::INFINITY,
            tolerance: 0.0,
            slack: f64::NEG_INFINITY,
            detail: err.to_string(),
        }
    }

    fn skipped(name: &'static str, why: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            status: Status::Skipped,
            measured: 0.0,
            tolerance: 0.0,
            slack: 0.0,
            detail: why.into(),
        }
    }

    fn from_result(name: &'static str, r: crate::Result<CheckOutcome>) -> Self {
        r.unwrap_or_else(|e| Self::failed(name, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub exact: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Names of the weight-dependent checks, in run order.
const WEIGHTED: [&str; 13] = [
    "d_squared_zero",
    "delta_is_transpose",
    "d_squared_law",
    "cohomology",
    "bounded_transform",
    "spectral_lower_bound",
    "base_term_inequality",
    "homotopy_bound",
    "deformed_block_law",
    "unitary_orthogonal",
    "conjugation_identity",
    "difference_support",
    "scalar_estimates",
];

fn structural(x: &CubeComplex, exec: Execution) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    out.push(match validate_median_with(x.graph(), exec) {
        Ok(MedianCheck::Ok) => CheckOutcome::measure("median_graph", 0.0, 0.0, "every triple has one median"),
        Ok(MedianCheck::Witness { triple, median_count }) => CheckOutcome::measure(
            "median_graph",
            1.0,
            0.0,
            format!("triple {triple:?} has {median_count} medians"),
        ),
        Err(e) => CheckOutcome::failed("median_graph", e),
    });

    let bfs = x.graph().distance_matrix();
    let n = x.vertex_count();
    let bad = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| bfs[u][v] as usize != x.distance(u, v))
        .count();
    out.push(CheckOutcome::measure(
        "hyperplane_distance",
        bad as f64,
        0.0,
        "graph distance equals number of separating hyperplanes",
    ));

    let mut seen = vec![0usize; x.cube_count()];
    let mut bad = 0;
    for q in 0..n {
        for c in x.block(q) {
            seen[c.0] += 1;
        }
        bad += (x.block(q).len() != 1 << x.sah(CubeId(q)).len()) as usize;
    }
    bad += seen.iter().filter(|&&k| k != 1).count();
    out.push(CheckOutcome::measure(
        "block_partition",
        bad as f64,
        0.0,
        "blocks partition the cubes with sizes 2^|SAH(Q)|",
    ));

    let bad = x
        .cubes()
        .iter()
        .filter(|c| {
            let q = CubeId(x.far_corner(c.id));
            let want: Vec<_> = x.sah(q).iter().copied().filter(|h| !c.mid.contains(h)).collect();
            x.sah(c.id) != want.as_slice()
        })
        .count();
    out.push(CheckOutcome::measure("sah_law", bad as f64, 0.0, "SAH(C) = SAH(Q) minus Mid(C)"));

    let bad = (0..n).filter(|&q| x.normal_cube_path(q).is_err()).count();
    out.push(CheckOutcome::measure(
        "normal_cube_path",
        bad as f64,
        0.0,
        "first cubes are spanned by SAH(Q) and paths reach the base",
    ));
    out
}

fn operator_checks<T: Scalar>(x: &CubeComplex, w: &[T]) -> Vec<CheckOutcome> {
    let d = assemble_d(x, w);
    let zero: GradedOperator<T> = GradedOperator::zero(d.degrees().to_vec(), d.grading());
    let d2 = d.compose(&d).max_deviation(&zero);
    let transpose = assemble_delta(x, w).max_deviation(&d.transpose());
    let law = match d_squared_law_check(x, w) {
        Ok(r) => CheckOutcome::measure("d_squared_law", r.max_deviation, T::TOLERANCE, "D^2 is diagonal with SAH + Mid weights"),
        Err(e) => CheckOutcome::failed("d_squared_law", e),
    };
    vec![
        CheckOutcome::measure("d_squared_zero", d2, T::TOLERANCE, "d∘d = 0"),
        CheckOutcome::measure("delta_is_transpose", transpose, T::TOLERANCE, "δ = dᵀ"),
        law,
    ]
}

fn weighted(x: &CubeComplex, w: &WeightFn, exec: Execution) -> Vec<CheckOutcome> {
    let mut out = match w.values() {
        WeightValues::Exact(v) => operator_checks(x, v),
        WeightValues::Float(v) => operator_checks(x, v),
    };
    let weights = w.to_f64_vec();

    let dims = cohomology_dims(x, w);
    let bad = dims.iter().enumerate().filter(|&(q, &k)| k != (q == 0) as usize).count();
    out.push(CheckOutcome::measure("cohomology", bad as f64, 0.0, format!("dimensions {dims:?}")));

    out.push(CheckOutcome::from_result(
        "bounded_transform",
        bounded_transform_with(&jv_operator(x, &weights), exec).map(|f| {
            let largest = f.eigenvalues().iter().fold(0.0f64, |m, l| m.max(l.abs()));
            let kernel = f.source_eigenvalues.iter().filter(|l| l.abs() < 1e-8).count();
            let f_kernel = f.eigenvalues().iter().filter(|l| l.abs() < 1e-8).count();
            let symmetric = f.operator.max_deviation(&f.operator.transpose());
            let measured = if kernel == f_kernel && largest < 1.0 { symmetric } else { f64::INFINITY };
            CheckOutcome::measure(
                "bounded_transform",
                measured,
                1e-12,
                format!("‖F‖ = {largest}, kernel dimension {kernel}"),
            )
        }),
    ));

    out.push(CheckOutcome::from_result("spectral_lower_bound", (|| {
        let mut worst: f64 = 0.0;
        for q in 0..x.vertex_count() {
            let lb = block_lower_bound(x, w, q);
            let spectrum = block_spectrum(x, w, q, lb + 1.0)?;
            let min = spectrum.min().unwrap_or(f64::INFINITY);
            worst = worst.max((min - lb).abs());
        }
        Ok(CheckOutcome::measure("spectral_lower_bound", worst, 1e-12, "block minima equal the lower bound"))
    })()));

    let worst = weights.iter().map(|&v| base_term(v) - v * v).fold(f64::NEG_INFINITY, f64::max);
    out.push(CheckOutcome::measure(
        "base_term_inequality",
        worst.max(-1.0),
        0.0,
        "½w(1 − e^{−2w}) ≤ w²",
    ));

    out.push(CheckOutcome::from_result(
        "homotopy_bound",
        convergence_scan(x, w, &[1.0, 0.5, 0.1, 0.01]).map(|rows| {
            let slack = rows.iter().map(|r| r.bound - r.max_deviation).fold(f64::INFINITY, f64::min);
            CheckOutcome::measure("homotopy_bound", -slack, 0.0, "|deformed − w| ≤ s·w²/2 for s in {1, 0.5, 0.1, 0.01}")
        }),
    ));

    out.push(CheckOutcome::from_result(
        "deformed_block_law",
        deformed_block_law(x, w, 0.5).map(|dev| {
            CheckOutcome::measure("deformed_block_law", dev, 1e-10, "deformed square is block-constant at s = 0.5")
        }),
    ));

    out.extend(equivariance(x, w));

    let max = weights.iter().copied().fold(0.0, f64::max);
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let m = if weights.is_empty() { 0.0 } else { max - min };
    out.push(CheckOutcome::from_result(
        "scalar_estimates",
        scalar_estimates(max, m, &weights, 10.0, 2001).map(|r| {
            CheckOutcome::measure(
                "scalar_estimates",
                -r.calculus_slack.min(r.xexp_slack),
                0.0,
                format!("calculus max {} ≤ {}, x e^-x max {}", r.calculus_max, r.calculus_bound, r.xexp_max),
            )
        }),
    ));
    out
}

fn equivariance(x: &CubeComplex, w: &WeightFn) -> Vec<CheckOutcome> {
    let names = ["unitary_orthogonal", "conjugation_identity", "difference_support"];
    if x.vertex_count() > ENUMERATION_LIMIT {
        let why = format!("more than {ENUMERATION_LIMIT} vertices; automorphisms not enumerated");
        return names.iter().map(|n| CheckOutcome::skipped(n, why.clone())).collect();
    }
    let group = match enumerate_automorphisms(x) {
        Ok(g) => g,
        Err(e) => return names.iter().map(|n| CheckOutcome::failed(n, &e)).collect(),
    };
    let degrees: Vec<usize> = x.cubes().iter().map(|c| c.dim).collect();
    let identity: GradedOperator<f64> = GradedOperator::identity(degrees.clone());
    let mut orth: f64 = 0.0;
    let (mut conj, mut support) = (None::<Error>, None::<Error>);
    for g in &group {
        let u: GradedOperator<f64> = unitary(x, g).to_operator(degrees.clone());
        orth = orth.max(u.compose(&u.transpose()).max_deviation(&identity));
        let result = match w.values() {
            WeightValues::Exact(v) => translated_jv(x, g, v).map(drop),
            WeightValues::Float(v) => translated_jv(x, g, v).map(drop),
        };
        if let Err(e) = result {
            conj.get_or_insert(e);
            continue;
        }
        if let Err(e) = difference_report(x, g, w) {
            support.get_or_insert(e);
        }
    }
    let count = group.len();
    let outcome = |name, err: Option<Error>, what: &str| match err {
        None => CheckOutcome::measure(name, 0.0, 0.0, format!("{what} over {count} automorphisms")),
        Some(e) => CheckOutcome::failed(name, e),
    };
    vec![
        CheckOutcome::measure("unitary_orthogonal", orth, 0.0, format!("U Uᵀ = I over {count} automorphisms")),
        outcome("conjugation_identity", conj, "U D Uᵀ = D_{gw,gP}"),
        outcome("difference_support", support, "g(D) − D supported on mediating hyperplanes"),
    ]
}

/// Runs every check. A weight spec that does not resolve to a positive
/// weight fails `weight_positivity` and skips the weight-dependent checks.
pub fn verify_all(x: &CubeComplex, weights: &WeightSpec, exec: Execution) -> SuiteReport {
    let mut checks = structural(x, exec);
    let mut exact = false;
    match weights.resolve(x) {
        Ok(w) => {
            checks.push(CheckOutcome::measure(
                "weight_positivity",
                -w.min().min(1.0),
                0.0,
                format!("minimum weight {}", w.min()),
            ));
            exact = w.is_exact();
            checks.extend(weighted(x, &w, exec));
        }
        Err(e) => {
            checks.push(CheckOutcome::failed("weight_positivity", e));
            checks.extend(WEIGHTED.iter().map(|n| CheckOutcome::skipped(n, "weights rejected")));
        }
    }
    SuiteReport {
        passed: checks.iter().all(|c| c.status != Status::Fail),
        exact,
        checks,
    }
}
