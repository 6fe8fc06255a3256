//! LDPC degree distributions and derived quantities.
//!
//! A [`DegreeDistribution`] holds the node-perspective polynomials: the
//! fraction of variable nodes of each degree (coefficients of `Lambda(x)`)
//! and the fraction of check nodes of each degree (coefficients of `P(x)`).
//! The edge perspective `lambda`/`rho`, the design rate, the Shannon
//! threshold, and the matching-condition margin are all computed from it.
//!
//! JSON form uses string keys for degrees:
//! `{"lambda_nodes": {"3": 1.0}, "rho_nodes": {"6": 1.0}}`.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("degree {degree} on the {side} side is below the minimum {min}")]
    DegreeTooSmall { side: &'static str, degree: u32, min: u32 },
    #[error("variable degree {dl} >= check degree {dr} gives a nonpositive design rate")]
    NonPositiveRate { dl: u32, dr: u32 },
    #[error("coefficient {value} for degree {degree} is negative")]
    NegativeCoefficient { degree: u32, value: f64 },
    #[error("{side} coefficients sum to {sum}, not 1")]
    NotNormalized { side: &'static str, sum: f64 },
    #[error("a distribution needs at least one degree on each side")]
    Empty,
}

/// Node-perspective degree distribution of an LDPC ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    var_node_coeffs: BTreeMap<u32, f64>,
    check_node_coeffs: BTreeMap<u32, f64>,
}

/// Edge-perspective coefficients. The entry for node degree `i` is the
/// probability that a uniformly chosen edge attaches to a degree-`i` node,
/// i.e. the coefficient of `x^(i-1)` in `lambda(x)` or `rho(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePerspective {
    pub lambda: BTreeMap<u32, f64>,
    pub rho: BTreeMap<u32, f64>,
}

impl EdgePerspective {
    /// lambda(x) = sum_i lambda_i x^(i-1).
    pub fn lambda_at(&self, x: f64) -> f64 {
        poly_edge_eval(&self.lambda, x)
    }

    /// rho(x) = sum_i rho_i x^(i-1).
    pub fn rho_at(&self, x: f64) -> f64 {
        poly_edge_eval(&self.rho, x)
    }

    /// Coefficient of `x` in lambda (mass on degree-2 variable nodes).
    pub fn lambda_2(&self) -> f64 {
        self.lambda.get(&2).copied().unwrap_or(0.0)
    }

    /// Mass on degree-1 variable nodes (constant term of lambda).
    pub fn lambda_1(&self) -> f64 {
        self.lambda.get(&1).copied().unwrap_or(0.0)
    }

    /// rho'(1) = sum_i (i-1) rho_i.
    pub fn rho_prime_at_one(&self) -> f64 {
        self.rho.iter().map(|(&d, &c)| (d - 1) as f64 * c).sum()
    }
}

fn poly_edge_eval(coeffs: &BTreeMap<u32, f64>, x: f64) -> f64 {
    coeffs
        .iter()
        .map(|(&deg, &c)| c * x.powi(deg as i32 - 1))
        .sum()
}

fn validate_side(
    coeffs: &BTreeMap<u32, f64>,
    side: &'static str,
    min_degree: u32,
) -> Result<(), EnsembleError> {
    if coeffs.is_empty() {
        return Err(EnsembleError::Empty);
    }
    let mut sum = 0.0;
    for (&degree, &value) in coeffs {
        if degree < min_degree {
            return Err(EnsembleError::DegreeTooSmall { side, degree, min: min_degree });
        }
        if value < 0.0 {
            return Err(EnsembleError::NegativeCoefficient { degree, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(EnsembleError::NotNormalized { side, sum });
    }
    Ok(())
}

impl DegreeDistribution {
    /// Builds and validates a distribution from node-perspective coefficient
    /// maps (degree -> fraction of nodes).
    pub fn new(
        var_node_coeffs: BTreeMap<u32, f64>,
        check_node_coeffs: BTreeMap<u32, f64>,
    ) -> Result<Self, EnsembleError> {
        validate_side(&var_node_coeffs, "variable", 1)?;
        validate_side(&check_node_coeffs, "check", 2)?;
        Ok(DegreeDistribution { var_node_coeffs, check_node_coeffs })
    }

    /// The (d_l, d_r)-regular ensemble: Lambda(x) = x^d_l, P(x) = x^d_r.
    pub fn regular(dl: u32, dr: u32) -> Result<Self, EnsembleError> {
        if dl < 2 {
            return Err(EnsembleError::DegreeTooSmall { side: "variable", degree: dl, min: 2 });
        }
        if dr < 2 {
            return Err(EnsembleError::DegreeTooSmall { side: "check", degree: dr, min: 2 });
        }
        if dl >= dr {
            return Err(EnsembleError::NonPositiveRate { dl, dr });
        }
        DegreeDistribution::new(BTreeMap::from([(dl, 1.0)]), BTreeMap::from([(dr, 1.0)]))
    }

    pub fn var_node_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.var_node_coeffs
    }

    pub fn check_node_coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.check_node_coeffs
    }

    /// `Some((d_l, d_r))` when both sides are single-degree.
    pub fn as_regular(&self) -> Option<(u32, u32)> {
        if self.var_node_coeffs.len() == 1 && self.check_node_coeffs.len() == 1 {
            let dl = *self.var_node_coeffs.keys().next().unwrap();
            let dr = *self.check_node_coeffs.keys().next().unwrap();
            Some((dl, dr))
        } else {
            None
        }
    }

    /// Average variable-node degree, Lambda'(1).
    pub fn avg_var_degree(&self) -> f64 {
        self.var_node_coeffs.iter().map(|(&d, &c)| d as f64 * c).sum()
    }

    /// Average check-node degree, P'(1).
    pub fn avg_check_degree(&self) -> f64 {
        self.check_node_coeffs.iter().map(|(&d, &c)| d as f64 * c).sum()
    }

    /// Edge-perspective coefficients: lambda_i proportional to i*Lambda_i,
    /// normalized to sum 1; likewise rho from P.
    pub fn edge_perspective(&self) -> EdgePerspective {
        let to_edge = |coeffs: &BTreeMap<u32, f64>| {
            let total: f64 = coeffs.iter().map(|(&d, &c)| d as f64 * c).sum();
            coeffs.iter().map(|(&d, &c)| (d, d as f64 * c / total)).collect()
        };
        EdgePerspective {
            lambda: to_edge(&self.var_node_coeffs),
            rho: to_edge(&self.check_node_coeffs),
        }
    }

    /// Design rate, 1 - Lambda'(1)/P'(1).
    pub fn design_rate(&self) -> f64 {
        1.0 - self.avg_var_degree() / self.avg_check_degree()
    }

    /// Design rate from the edge-perspective integrals,
    /// 1 - (int_0^1 rho)/(int_0^1 lambda). Agrees with [`design_rate`]
    /// because int_0^1 lambda = 1/Lambda'(1) and likewise for rho.
    ///
    /// [`design_rate`]: DegreeDistribution::design_rate
    pub fn design_rate_edge_integral(&self) -> f64 {
        let edge = self.edge_perspective();
        let integral = |coeffs: &BTreeMap<u32, f64>| -> f64 {
            // int_0^1 x^(i-1) dx = 1/i
            coeffs.iter().map(|(&d, &c)| c / d as f64).sum()
        };
        1.0 - integral(&edge.rho) / integral(&edge.lambda)
    }

    /// Largest erasure probability any rate-matched code could tolerate:
    /// 1 - design rate.
    pub fn shannon_threshold(&self) -> f64 {
        1.0 - self.design_rate()
    }

    /// Maximum of `eps*lambda(1 - rho(1-x)) - x` over a uniform grid of
    /// `grid_size` points on (0, eps]. A negative value certifies that
    /// density evolution started at eps converges to zero on the grid; a
    /// positive value indicates a crossing. For `eps == 0` the grid covers
    /// (0, 1] instead (the margin there is simply `-x`).
    pub fn matching_margin(&self, eps: f64, grid_size: usize) -> f64 {
        assert!(grid_size >= 100, "matching margin needs at least 100 grid points");
        assert!((0.0..=1.0).contains(&eps));
        let edge = self.edge_perspective();
        let hi = if eps > 0.0 { eps } else { 1.0 };
        let mut max = f64::NEG_INFINITY;
        for k in 1..=grid_size {
            let x = hi * k as f64 / grid_size as f64;
            let m = eps * edge.lambda_at(1.0 - edge.rho_at(1.0 - x)) - x;
            if m > max {
                max = m;
            }
        }
        max
    }
}

#[derive(Serialize, Deserialize)]
struct DegreeDistributionRepr {
    lambda_nodes: BTreeMap<String, f64>,
    rho_nodes: BTreeMap<String, f64>,
}

impl Serialize for DegreeDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let stringify =
            |m: &BTreeMap<u32, f64>| m.iter().map(|(&d, &c)| (d.to_string(), c)).collect();
        DegreeDistributionRepr {
            lambda_nodes: stringify(&self.var_node_coeffs),
            rho_nodes: stringify(&self.check_node_coeffs),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DegreeDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DegreeDistributionRepr::deserialize(deserializer)?;
        let parse = |m: BTreeMap<String, f64>| -> Result<BTreeMap<u32, f64>, D::Error> {
            m.into_iter()
                .map(|(k, v)| {
                    k.parse::<u32>()
                        .map(|d| (d, v))
                        .map_err(|_| D::Error::custom(format!("bad degree key {k:?}")))
                })
                .collect()
        };
        DegreeDistribution::new(parse(repr.lambda_nodes)?, parse(repr.rho_nodes)?)
            .map_err(D::Error::custom)
    }
}
