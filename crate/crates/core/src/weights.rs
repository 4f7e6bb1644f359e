//! Positive weight functions on hyperplanes.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{CubeComplex, HyperplaneId};
use crate::error::{Error, Result};
use crate::group_action::Automorphism;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightValues {
    Exact(Vec<Rational64>),
    Float(Vec<f64>),
}

/// A strictly positive weight per hyperplane, indexed by hyperplane id.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFn {
    values: WeightValues,
}

impl WeightFn {
    pub fn exact(values: Vec<Rational64>) -> Result<Self> {
        if let Some(h) = values.iter().position(|v| *v <= Rational64::zero()) {
            return Err(Error::NonPositiveWeight {
                hyperplane: h,
                value: values[h].to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(WeightFn {
            values: WeightValues::Exact(values),
        })
    }

    pub fn float(values: Vec<f64>) -> Result<Self> {
        if let Some(h) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonPositiveWeight {
                hyperplane: h,
                value: values[h],
            });
        }
        Ok(WeightFn {
            values: WeightValues::Float(values),
        })
    }

    pub fn constant(x: &CubeComplex, value: f64) -> Result<Self> {
        Self::float(vec![value; x.hyperplane_count()])
    }

    pub fn explicit(x: &CubeComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != x.hyperplane_count() {
            return Err(Error::WeightCount {
                expected: x.hyperplane_count(),
                got: values.len(),
            });
        }
        Self::float(values)
    }

    pub fn values(&self) -> &WeightValues {
        &self.values
    }

    pub fn len(&self) -> usize {
        match &self.values {
            WeightValues::Exact(v) => v.len(),
            WeightValues::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, WeightValues::Exact(_))
    }

    pub fn exact_values(&self) -> Option<&[Rational64]> {
        match &self.values {
            WeightValues::Exact(v) => Some(v),
            WeightValues::Float(_) => None,
        }
    }

    pub fn get(&self, h: HyperplaneId) -> f64 {
        match &self.values {
            WeightValues::Exact(v) => v[h.0].to_f64().unwrap_or(f64::NAN),
            WeightValues::Float(v) => v[h.0],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|h| self.get(HyperplaneId(h))).collect()
    }

    pub fn min(&self) -> f64 {
        self.to_f64_vec().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Weight pushed forward along a hyperplane map: `result[map[h]] = self[h]`.
    /// With `map` the action of `g`, this is `gw(H) = w(g⁻¹H)`.
    pub fn pushed_forward(&self, map: &[HyperplaneId]) -> WeightFn {
        fn push<T: Clone>(values: &[T], map: &[HyperplaneId]) -> Vec<T> {
            let mut out = values.to_vec();
            for (h, target) in map.iter().enumerate() {
                out[target.0] = values[h].clone();
            }
            out
        }
        let values = match &self.values {
            WeightValues::Exact(v) => WeightValues::Exact(push(v, map)),
            WeightValues::Float(v) => WeightValues::Float(push(v, map)),
        };
        WeightFn { values }
    }
}

/// `1/2` plus the distance from the base vertex to the nearest near-side
/// endpoint of a dual edge. Half-integral, stored exactly.
pub fn distance_weight(x: &CubeComplex) -> WeightFn {
    let p = x.base();
    let values = x
        .hyperplanes()
        .iter()
        .map(|hyp| {
            let nearest = hyp
                .dual_edges
                .iter()
                .map(|&e| {
                    let (u, v) = x.graph().edges()[e];
                    let near = if x.is_far(hyp.id, u) { v } else { u };
                    x.distance(p, near)
                })
                .min()
                .expect("hyperplanes have dual edges");
            Rational64::new(2 * nearest as i64 + 1, 2)
        })
        .collect();
    WeightFn::exact(values).expect("distance weights are positive")
}

/// Number of hyperplanes with weight at most `bound`.
pub fn properness_profile(w: &WeightFn, bound: f64) -> usize {
    w.to_f64_vec().into_iter().filter(|&v| v <= bound).count()
}

/// `sup_H |w(H) - w(gH)|`.
pub fn adaptedness_gap(w: &WeightFn, g: &Automorphism) -> f64 {
    g.hyperplane_map()
        .iter()
        .enumerate()
        .map(|(h, &gh)| (w.get(HyperplaneId(h)) - w.get(gh)).abs())
        .fold(0.0, f64::max)
}

/// Weight selection as it appears in complex input files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum WeightSpec {
    #[default]
    Distance,
    Constant { value: f64 },
    Explicit { values: Vec<f64> },
}

impl WeightSpec {
    pub fn resolve(&self, x: &CubeComplex) -> Result<WeightFn> {
        match self {
            WeightSpec::Distance => Ok(distance_weight(x)),
            WeightSpec::Constant { value } => WeightFn::constant(x, *value),
            WeightSpec::Explicit { values } => WeightFn::explicit(x, values.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::generate;

    fn build(g: crate::Graph) -> CubeComplex {
        CubeComplex::build(g).unwrap()
    }

    #[test]
    fn distance_weight_examples() {
        let path = build(generate::path(2).unwrap());
        assert_eq!(path.hyperplane_count(), 2);
        assert_eq!(distance_weight(&path).to_f64_vec(), vec![0.5, 1.5]);

        let square = build(generate::hypercube(2).unwrap());
        assert_eq!(distance_weight(&square).to_f64_vec(), vec![0.5, 0.5]);

        let grid = build(generate::grid(3, 3).unwrap());
        let mut w = distance_weight(&grid).to_f64_vec();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![0.5, 0.5, 1.5, 1.5]);
    }

    #[test]
    fn properness_examples() {
        let path = build(generate::path(2).unwrap());
        let w = distance_weight(&path);
        assert_eq!(properness_profile(&w, 0.25), 0);
        assert_eq!(properness_profile(&w, 1.0), 1);
        assert_eq!(properness_profile(&w, 2.0), 2);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(
            WeightFn::float(vec![1.0, 0.0]),
            Err(Error::NonPositiveWeight { hyperplane: 1, .. })
        ));
        assert!(WeightFn::float(vec![f64::NAN]).is_err());
        assert!(WeightFn::exact(vec![Rational64::new(-1, 2)]).is_err());
        let square = build(generate::hypercube(2).unwrap());
        assert!(matches!(
            WeightFn::explicit(&square, vec![1.0]),
            Err(Error::WeightCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn spec_json() {
        let spec: WeightSpec = serde_json::from_str(r#"{"mode": "constant", "value": 2.5}"#).unwrap();
        assert_eq!(spec, WeightSpec::Constant { value: 2.5 });
        let spec: WeightSpec = serde_json::from_str(r#"{"mode": "distance"}"#).unwrap();
        assert_eq!(spec, WeightSpec::Distance);
        let spec: WeightSpec =
            serde_json::from_str(r#"{"mode": "explicit", "values": [1, 2]}"#).unwrap();
        assert_eq!(spec, WeightSpec::Explicit { values: vec![1.0, 2.0] });
    }
}
