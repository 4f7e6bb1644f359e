//! The `A_s` shadow of the deformation from de Rham to Julg–Valette.
//!
//! `A_s(C)` is spanned by `e^{s w_C} dx_{H1} ∧ … ∧ dx_{Hq}` with
//! `w_C = Σ w(H) x_H`. In the normalized basis the operator
//! `s⁻¹(e_{sw} + e_{sw}^*)` has the same pattern and signs as `d + δ`, with
//! `w(H)` replaced by `w(H)·√((1 − e^{−2sw})/(2sw))`, which tends to `w(H)`
//! as `s → 0`.

use serde::Serialize;

use crate::complex::{CubeComplex, CubeId, Vertex};
use crate::de_rham::base_term;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::group_action::{first_mismatch, push_weights, unitary, Automorphism};
use crate::julg_valette::wedge_sign;
use crate::operator::{GradedOperator, Grading};
use crate::weights::WeightFn;

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s must lie in (0, 1], got {s}")))
    }
}

/// `(e^{2t} − 1)/(2t)`, with the removable singularity at 0 filled in.
fn growth_ratio(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (2.0 * t).exp_m1() / (2.0 * t)
    }
}

/// L² norm of `e^{s w_C} dx_{H1} ∧ … ∧ dx_{Hq}` on the cube `C`.
pub fn a_s_norm(x: &CubeComplex, c: CubeId, s: f64, w: &WeightFn) -> Result<f64> {
    check_s(s)?;
    Ok(x.mid(c).iter().map(|&h| growth_ratio(s * w.get(h)).sqrt()).product())
}

/// Normalized coefficient of `s⁻¹ e_{sw}` across a hyperplane of weight `w`.
pub fn deformed_entry(s: f64, w: f64) -> Result<f64> {
    check_s(s)?;
    let t = s * w;
    if t == 0.0 {
        return Ok(w);
    }
    Ok(w * (-(-2.0 * t).exp_m1() / (2.0 * t)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedOperator {
    pub s: f64,
    /// The raising part `s⁻¹ e_{sw}` in the normalized basis.
    pub differential: GradedOperator<f64>,
    /// `s⁻¹(e_{sw} + e_{sw}^*)`.
    pub matrix: GradedOperator<f64>,
    /// `a_s(C)` per cube.
    pub norms: Vec<f64>,
}

/// Assembles the normalized operator from the raw coefficient `s w e^{−sw}`
/// (exterior multiplication by `d(e^{s w(H) x_H})` restricted to `x_H = 1`
/// faces) and the ratio of basis norms.
pub fn assemble_deformed(x: &CubeComplex, w: &WeightFn, s: f64) -> Result<DeformedOperator> {
    check_s(s)?;
    let norms = x
        .cubes()
        .iter()
        .map(|c| a_s_norm(x, c.id, s, w))
        .collect::<Result<Vec<_>>>()?;
    let mut differential = GradedOperator::on_complex(x, Grading::RAISE);
    for cube in x.cubes() {
        for &h in x.sah(cube.id) {
            let target = x.coface(cube.id, h)?;
            let wh = w.get(h);
            let raw = s * wh * (-s * wh).exp();
            let value = raw * norms[target.0] / norms[cube.id.0] / s;
            let sign: f64 = wedge_sign(&cube.mid, h);
            differential.add_entry(target.0, cube.id.0, sign * value);
        }
    }
    let matrix = differential.add(&differential.transpose());
    Ok(DeformedOperator {
        s,
        differential,
        matrix,
        norms,
    })
}

/// Largest deviation of the squared deformed operator on any block from
/// `(Σ_{SAH(Q)} deformed_entry²)·I`, and from zero off the blocks.
pub fn deformed_block_law(x: &CubeComplex, w: &WeightFn, s: f64) -> Result<f64> {
    let op = assemble_deformed(x, w, s)?.matrix;
    let square = op.compose(&op);
    let mut worst: f64 = 0.0;
    for c in x.cubes() {
        let expected = x
            .sah(c.id)
            .iter()
            .chain(&c.mid)
            .map(|&h| deformed_entry(s, w.get(h)).map(|e| e * e))
            .sum::<Result<f64>>()?;
        let mut dev = (square.get(c.id.0, c.id.0) - expected).abs();
        for ((r, col), v) in square.entries() {
            if r == c.id.0 && col != r {
                dev = dev.max(v.abs());
            }
        }
        if dev > 1e-10 {
            return Err(Error::LawViolated { cube: c.id, deviation: dev });
        }
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// `U_g M_{w,P,s} U_gᵀ` compared against direct assembly for `(gw, gP)`.
pub fn translated_deformed(x: &CubeComplex, g: &Automorphism, w: &WeightFn, s: f64) -> Result<GradedOperator<f64>> {
    let moved = unitary(x, g).conjugate(&assemble_deformed(x, w, s)?.matrix);
    let rebased = x.rebased(g.apply(x.base()))?;
    let pushed = WeightFn::float(push_weights(&w.to_f64_vec(), g))?;
    let direct = assemble_deformed(&rebased, &pushed, s)?.matrix;
    first_mismatch(&moved, &direct).map_or(Ok(moved), |(row, col)| {
        Err(Error::IdentityViolated { row, col })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub s: f64,
    /// `max_H |deformed_entry(s, H) − w(H)|`.
    pub max_deviation: f64,
    /// `max_H s·w(H)²/2`.
    pub bound: f64,
    /// `max_H |deformed_entry² − s⁻²·base_term(s·w)|`.
    pub identity_residual: f64,
    /// `max_Q |Σ_{SAH(Q)} (deformed_entry² − w²)|`.
    pub block_error: f64,
    /// `max_Q s·Σ_{SAH(Q)} w³`.
    pub block_bound: f64,
}

const IDENTITY_TOLERANCE: f64 = 1e-12;

fn scan_row(x: &CubeComplex, w: &[f64], s: f64) -> Result<ScanRow> {
    check_s(s)?;
    let mut row = ScanRow {
        s,
        max_deviation: 0.0,
        bound: 0.0,
        identity_residual: 0.0,
        block_error: 0.0,
        block_bound: 0.0,
    };
    let mut entries = Vec::with_capacity(w.len());
    for &wh in w {
        let e = deformed_entry(s, wh)?;
        let deviation = (e - wh).abs();
        let bound = s * wh * wh / 2.0;
        if deviation > bound {
            return Err(Error::BoundViolated { s, deviation, bound });
        }
        let residual = (e * e - base_term(s * wh) / (s * s)).abs();
        if residual > IDENTITY_TOLERANCE * wh.max(1.0).powi(2) {
            return Err(Error::InvariantViolation(format!(
                "deformed entry identity fails at s = {s}, w = {wh}: residual {residual}"
            )));
        }
        row.max_deviation = row.max_deviation.max(deviation);
        row.bound = row.bound.max(bound);
        row.identity_residual = row.identity_residual.max(residual);
        entries.push(e);
    }
    for q in 0..x.vertex_count() as Vertex {
        let sah = x.sah(x.vertex_cube(q));
        let error: f64 = sah.iter().map(|h| w[h.0] * w[h.0] - entries[h.0] * entries[h.0]).sum();
        let bound: f64 = s * sah.iter().map(|h| w[h.0].powi(3)).sum::<f64>();
        if error.abs() > bound {
            return Err(Error::BoundViolated { s, deviation: error.abs(), bound });
        }
        row.block_error = row.block_error.max(error.abs());
        row.block_bound = row.block_bound.max(bound);
    }
    Ok(row)
}

/// Deviation table over `s_list`, sorted by decreasing `s`; also checks the
/// deviation does not grow as `s` shrinks.
pub fn convergence_scan(x: &CubeComplex, w: &WeightFn, s_list: &[f64]) -> Result<Vec<ScanRow>> {
    convergence_scan_with(x, w, s_list, Execution::default())
}

pub fn convergence_scan_with(x: &CubeComplex, w: &WeightFn, s_list: &[f64], exec: Execution) -> Result<Vec<ScanRow>> {
    let weights = w.to_f64_vec();
    let mut rows = exec
        .map(s_list, |&s| scan_row(x, &weights, s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.s.total_cmp(&a.s));
    for pair in rows.windows(2) {
        if pair[1].max_deviation > pair[0].max_deviation {
            return Err(Error::InvariantViolation(format!(
                "deviation grows from {} at s = {} to {} at s = {}",
                pair[0].max_deviation, pair[0].s, pair[1].max_deviation, pair[1].s
            )));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;
    use crate::group_action::enumerate_automorphisms;
    use crate::julg_valette::{assemble_d, jv_operator};
    use crate::weights::distance_weight;

    fn path() -> (CubeComplex, WeightFn) {
        let x = CubeComplex::build(generate::path(2).unwrap()).unwrap();
        let w = distance_weight(&x);
        (x, w)
    }

    #[test]
    fn norms() {
        let (x, w) = path();
        let one = WeightFn::float(vec![1.0, 1.0]).unwrap();
        assert_eq!(a_s_norm(&x, CubeId(0), 1.0, &w).unwrap(), 1.0);
        assert!((a_s_norm(&x, CubeId(3), 1.0, &one).unwrap() - 1.787324).abs() < 1e-6);
        assert!((a_s_norm(&x, CubeId(3), 1e-9, &one).unwrap() - 1.0).abs() < 1e-8);
        assert!(a_s_norm(&x, CubeId(3), 0.0, &one).is_err());
        assert!(a_s_norm(&x, CubeId(3), 1.5, &one).is_err());
    }

    #[test]
    fn entries() {
        assert!((deformed_entry(1.0, 0.5).unwrap() - 0.397530).abs() < 1e-6);
        assert!((deformed_entry(0.5, 1.5).unwrap() - 1.079493).abs() < 1e-6);
        assert!((deformed_entry(1e-8, 1.5).unwrap() - 1.5).abs() < 1e-7);
        // monotone in s, bounded by w
        let mut last = 1.5;
        for i in 1..=100 {
            let e = deformed_entry(i as f64 / 100.0, 1.5).unwrap();
            assert!(e > 0.0 && e <= last);
            last = e;
        }
    }

    #[test]
    fn path_deformed_matrix() {
        let (x, w) = path();
        let op = assemble_deformed(&x, &w, 1.0).unwrap();
        // edges are cubes 3 and 4; hyperplane 0 (w = 0.5) on edge 0-1
        assert!((op.matrix.get(3, 1).abs() - 0.397530).abs() < 1e-6);
        let h1 = 1.5 * ((1.0 - (-3.0f64).exp()) / 3.0).sqrt();
        assert!((op.matrix.get(4, 2).abs() - h1).abs() < 1e-12);
        assert!((h1 - 0.844192).abs() < 1e-6);
    }

    #[test]
    fn pattern_and_sign_match_jv() {
        let x = CubeComplex::build(generate::grid(3, 3).unwrap()).unwrap();
        let w = distance_weight(&x);
        let d = assemble_d(&x, &w.to_f64_vec());
        for s in [1.0, 0.5, 0.01] {
            let op = assemble_deformed(&x, &w, s).unwrap();
            assert_eq!(op.differential.sign_pattern(), d.sign_pattern());
            let de: Vec<f64> = w.to_f64_vec().iter().map(|&v| deformed_entry(s, v).unwrap()).collect();
            assert!(op.matrix.max_deviation(&jv_operator(&x, &de)) < 1e-12);
        }
        let small = assemble_deformed(&x, &w, 1e-9).unwrap();
        assert!(small.matrix.max_deviation(&jv_operator(&x, &w.to_f64_vec())) < 1e-7);
    }

    #[test]
    fn block_law() {
        let x = CubeComplex::build(generate::hypercube(3).unwrap()).unwrap();
        let w = distance_weight(&x);
        for s in [1.0, 0.3] {
            assert!(deformed_block_law(&x, &w, s).unwrap() < 1e-12);
        }
    }

    #[test]
    fn scan() {
        let (x, w) = path();
        let rows = convergence_scan(&x, &w, &[0.01, 1.0, 0.5, 0.1]).unwrap();
        assert_eq!(rows.iter().map(|r| r.s).collect::<Vec<_>>(), vec![1.0, 0.5, 0.1, 0.01]);
        assert!(rows[3].max_deviation <= 0.01125);
        let one = WeightFn::float(vec![0.5, 0.5]).unwrap();
        let r = &convergence_scan(&x, &one, &[1.0]).unwrap()[0];
        assert!((r.max_deviation - 0.102470).abs() < 1e-6 && r.bound == 0.125);
        assert_eq!(
            convergence_scan_with(&x, &w, &[1.0, 0.2], Execution::Sequential).unwrap(),
            convergence_scan_with(&x, &w, &[1.0, 0.2], Execution::Parallel).unwrap()
        );
        assert!(convergence_scan(&x, &w, &[0.0]).is_err());
    }

    #[test]
    fn equivariance() {
        let x = CubeComplex::build(generate::hypercube(2).unwrap()).unwrap();
        let w = distance_weight(&x);
        for g in enumerate_automorphisms(&x).unwrap() {
            translated_deformed(&x, &g, &w, 0.7).unwrap();
        }
    }
}
