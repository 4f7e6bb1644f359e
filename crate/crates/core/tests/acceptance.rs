//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use cubespec::checks::verify_all;
use cubespec::complex::generate::GenSpec;
use cubespec::complex::{validate_median_with, CubeComplex, CubeId, Graph, MedianCheck};
use cubespec::de_rham::{
    block_lower_bound, block_spectrum, convergence_table, galerkin_interval, galerkin_two_cell, kernel_alignment,
    observed_orders, scalar_estimates,
};
use cubespec::group_action::{difference_report, enumerate_automorphisms, push_weights, translated_jv, unitary};
use cubespec::homotopy::{assemble_deformed, convergence_scan};
use cubespec::julg_valette::{assemble_d, assemble_delta, cohomology_dims, d_squared_law_check, jv_operator};
use cubespec::operator::GradedOperator;
use cubespec::weights::{distance_weight, WeightSpec};
use cubespec::{Error, Execution, WeightFn};
use num_rational::Rational64;
use num_traits::Zero;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

const SUITE: [&str; 6] = ["path:6", "tree:2:3", "grid:3x3", "grid:4x4", "hypercube:3", "tree:2:2*tree:2:2"];

fn suite() -> Vec<(&'static str, CubeComplex)> {
    SUITE
        .iter()
        .map(|s| {
            let g = s.parse::<GenSpec>().unwrap().generate(1_000_000).unwrap();
            (*s, CubeComplex::build(g).unwrap())
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn exact_weights(x: &CubeComplex) -> Vec<Rational64> {
    distance_weight(x).exact_values().unwrap().to_vec()
}

fn ac1() -> Check {
    for (name, x) in suite() {
        let w = exact_weights(&x);
        let d = assemble_d(&x, &w);
        ensure(d.compose(&d).nnz() == 0, || format!("{name}: d² ≠ 0"))?;
        ensure(assemble_delta(&x, &w) == d.transpose(), || format!("{name}: δ ≠ dᵀ"))?;
        let report = d_squared_law_check(&x, &w).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.exact && report.max_deviation == 0.0, || format!("{name}: D² law inexact"))?;
    }
    Ok(format!("d² = 0, δ = dᵀ, D² law exact in rational mode on {} complexes", SUITE.len()))
}

fn ac2() -> Check {
    for (name, x) in suite() {
        let dims = cohomology_dims(&x, &distance_weight(&x));
        let mut want = vec![0; x.dimension() + 1];
        want[0] = 1;
        ensure(dims == want, || format!("{name}: dims {dims:?}"))?;
    }
    Ok("cohomology [1, 0, …, 0] with exact ranks on every suite complex".into())
}

fn ac3() -> Check {
    for (name, x) in suite() {
        let w = exact_weights(&x);
        let d = jv_operator(&x, &w);
        let square = d.compose(&d);
        let mut seen = vec![false; x.cube_count()];
        for q in 0..x.vertex_count() {
            let sah = x.sah(CubeId(q));
            ensure(x.block(q).len() == 1 << sah.len(), || format!("{name}: block {q} size"))?;
            let level = sah.iter().fold(Rational64::zero(), |a, h| a + w[h.0] * w[h.0]);
            for &c in x.block(q) {
                ensure(!seen[c.0], || format!("{name}: cube {c:?} in two blocks"))?;
                seen[c.0] = true;
                let want: Vec<_> = sah.iter().copied().filter(|h| !x.mid(c).contains(h)).collect();
                ensure(x.sah(c) == want.as_slice(), || format!("{name}: SAH law at {c:?}"))?;
                ensure(square.get(c.0, c.0) == level, || format!("{name}: D² not constant on block {q}"))?;
            }
        }
        ensure(seen.iter().all(|&s| s), || format!("{name}: blocks do not cover"))?;
        ensure(square.entries().all(|((r, c), _)| r == c), || format!("{name}: D² not diagonal"))?;
    }
    Ok("block sizes 2^|SAH(Q)|, SAH(C) = SAH(Q)∖Mid(C), D² = Σ_SAH(Q) w²·I per block".into())
}

fn ac4() -> Check {
    let mut worst: f64 = 0.0;
    for (_, x) in suite() {
        let w = distance_weight(&x);
        for q in 0..x.vertex_count() {
            let lb = block_lower_bound(&x, &w, q);
            let s = block_spectrum(&x, &w, q, lb + 1.0).map_err(|e| e.to_string())?;
            worst = worst.max((s.min().unwrap() - lb).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("block minimum vs lower bound off by {worst}"))?;

    let square = CubeComplex::build(cubespec::complex::generate::hypercube(2).unwrap()).unwrap();
    let s = block_spectrum(&square, &distance_weight(&square), 3, 12.0).map_err(|e| e.to_string())?;
    // ½·0.5·(1 − e^{−1}) per factor: twice for the base pair, once plus π² + 0.25 for the mixed pair
    let base = 0.25 * (1.0 - (-1.0f64).exp());
    let want = [(0.316061, 2.0 * base, 1), (10.277634, base + PI * PI + 0.25, 2)];
    let got = s.entries();
    ensure(got.len() == 2, || format!("square block(3) has {} entries", got.len()))?;
    for (&(v, m), &(literal, formula, mult)) in got.iter().zip(&want) {
        ensure((v - literal).abs() < 1e-6 && (v - formula).abs() < 1e-12 && m == mult, || {
            format!("square block(3) entry {v} ×{m}, expected {literal} ×{mult}")
        })?;
    }
    Ok(format!(
        "minima = lower bound to {worst:.1e} (≤ 1e-12); square block(3) = {{{:.6} ×1, {:.6} ×2}} \
         (the listed 10.277664 disagrees with its own formula 0.158030 + π² + 0.25 = 10.277634)",
        got[0].0, got[1].0
    ))
}

fn ac5() -> Check {
    let mut summary = Vec::new();
    for w in [0.5, 1.0, 2.0] {
        let series = PI * PI + w * w;
        let s = galerkin_interval(w, 2000, series * 1.2).map_err(|e| e.to_string())?;
        let kernel = s.entries()[0].0;
        ensure(kernel.abs() < 1e-6, || format!("w={w}: kernel eigenvalue {kernel}"))?;
        let first = s.entries()[1].0;
        let rel = (first - series).abs() / series;
        ensure(rel < 1e-3, || format!("w={w}: first series eigenvalue {first}, rel {rel}"))?;
        let base = 0.5 * w * (1.0 - (-2.0 * w).exp());
        let lowest = galerkin_two_cell(w, 2000, 1.0 + base).map_err(|e| e.to_string())?.min().unwrap();
        ensure((lowest - base).abs() < 1e-3, || format!("w={w}: two-cell lowest {lowest} vs {base}"))?;
        let cos = kernel_alignment(w, 2000).map_err(|e| e.to_string())?;
        ensure(cos >= 0.9999, || format!("w={w}: kernel alignment {cos}"))?;
        let rows = convergence_table(w, 2000, 2).map_err(|e| e.to_string())?;
        let order = observed_orders(&rows)[0];
        ensure((1.8..=2.2).contains(&order), || format!("w={w}: order {order}"))?;
        summary.push(format!("w={w}: rel {rel:.1e}, order {order:.3}"));
    }
    Ok(summary.join("; "))
}

fn ac6() -> Check {
    let s_list = [1.0, 0.5, 0.1, 0.01];
    let mut worst_identity: f64 = 0.0;
    for (name, x) in suite() {
        let w = distance_weight(&x);
        let rows = convergence_scan(&x, &w, &s_list).map_err(|e| format!("{name}: {e}"))?;
        for r in &rows {
            ensure(r.max_deviation <= r.bound, || format!("{name}: s={} deviation {}", r.s, r.max_deviation))?;
            worst_identity = worst_identity.max(r.identity_residual);
        }
        let pattern = assemble_d(&x, &w.to_f64_vec()).sign_pattern();
        for s in s_list {
            let op = assemble_deformed(&x, &w, s).map_err(|e| e.to_string())?;
            ensure(op.differential.sign_pattern() == pattern, || format!("{name}: pattern differs at s={s}"))?;
        }
    }
    ensure(worst_identity <= 1e-12, || format!("identity residual {worst_identity}"))?;
    Ok(format!("|deformed − w| ≤ s·w²/2, identity residual {worst_identity:.1e}, pattern/sign = d on all suite complexes"))
}

fn ac7() -> Check {
    let mut total = 0;
    for spec in ["hypercube:2", "hypercube:3", "grid:3x3"] {
        let x = CubeComplex::build(spec.parse::<GenSpec>().unwrap().generate(1000).unwrap()).unwrap();
        let wf = distance_weight(&x);
        let w = exact_weights(&x);
        let degrees: Vec<usize> = x.cubes().iter().map(|c| c.dim).collect();
        let identity: GradedOperator<Rational64> = GradedOperator::identity(degrees.clone());
        let group = enumerate_automorphisms(&x).map_err(|e| e.to_string())?;
        for g in &group {
            let u: GradedOperator<Rational64> = unitary(&x, g).to_operator(degrees.clone());
            ensure(u.compose(&u.transpose()) == identity, || format!("{spec}: U not orthogonal"))?;
            translated_jv(&x, g, &w).map_err(|e| format!("{spec}: {e}"))?;
            let report = difference_report(&x, g, &wf).map_err(|e| format!("{spec}: {e}"))?;
            let fixes = g.apply(x.base()) == x.base() && push_weights(&w, g) == w;
            ensure(!fixes || report.support_entries == 0, || format!("{spec}: nonzero difference for a stabilizer"))?;
        }
        total += group.len();
    }
    Ok(format!("{total} automorphisms: U orthogonal, conjugation identity exact, support law holds"))
}

fn ac8() -> Check {
    let weights: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
    let mut slack = f64::INFINITY;
    for (big_m, m) in [(1.0, 0.0), (1.0, 1.0), (3.0, 0.5), (0.2, 0.1)] {
        let r = scalar_estimates(big_m, m, &weights, 10.0, 10_000).map_err(|e| e.to_string())?;
        slack = slack.min(r.calculus_slack);
        ensure((r.xexp_max - (-1.0f64).exp()).abs() < 1e-6, || format!("sup x e^-x = {}", r.xexp_max))?;
    }
    let w3 = scalar_estimates(1.0, 1.0, &[3.0], 10.0, 10_000).map_err(|e| e.to_string())?;
    ensure(w3.calculus_max <= 2.0, || format!("w=3 maximum {}", w3.calculus_max))?;
    Ok(format!("calculus estimate min slack {slack:.4}, sup x e^-x = {:.6} ≤ 1", (-1.0f64).exp()))
}

fn ac9() -> Check {
    let c5 = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 0).unwrap();
    let k23 = Graph::new(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)], 0).unwrap();
    let mut lines = Vec::new();
    for (name, g) in [("5-cycle", c5), ("K_{2,3}", k23)] {
        match validate_median_with(&g, Execution::default()) {
            Ok(MedianCheck::Witness { triple, median_count }) => {
                ensure(median_count != 1, || format!("{name}: witness has one median"))?;
                lines.push(format!("{name} witness {triple:?} ({median_count} medians)"));
            }
            other => return Err(format!("{name}: not rejected ({other:?})")),
        }
        ensure(matches!(CubeComplex::build(g), Err(Error::NotMedian { .. })), || format!("{name}: built"))?;
    }
    let square = CubeComplex::build(cubespec::complex::generate::hypercube(2).unwrap()).unwrap();
    ensure(matches!(WeightFn::explicit(&square, vec![0.5, 0.0]), Err(Error::NonPositiveWeight { hyperplane: 1, .. })), || {
        "zero weight accepted".into()
    })?;
    let report = verify_all(&square, &WeightSpec::Explicit { values: vec![0.5, 0.0] }, Execution::default());
    let failed: Vec<_> = report.failures().map(|c| c.name).collect();
    ensure(failed == ["weight_positivity"], || format!("suite failures {failed:?}"))?;
    lines.push("zero weight rejected (weight_positivity)".into());
    Ok(lines.join("; "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exactness", ac1, Duration::from_secs(5)),
        ("cohomology", ac2, Duration::from_secs(5)),
        ("block structure", ac3, Duration::from_secs(5)),
        ("de Rham spectra", ac4, Duration::from_secs(1)),
        ("Galerkin oracle", ac5, Duration::from_secs(30)),
        ("homotopy convergence", ac6, Duration::from_secs(2)),
        ("equivariance", ac7, Duration::from_secs(10)),
        ("scalar estimates", ac8, Duration::from_secs(1)),
        ("negative controls", ac9, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= *limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?} > {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("AC{} PASS {name} [{elapsed:.2?}]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("AC{} FAIL {name} [{elapsed:.2?}]: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
