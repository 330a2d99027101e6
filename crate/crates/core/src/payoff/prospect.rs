//! Subjective (prospect-theoretic) payoffs: Prelec probability weighting
//! plus reference-dependent value functions for each player.

use serde::{Deserialize, Serialize};

use super::{check_inputs, MatrixKind, PayoffError, PayoffMatrix};
use crate::graph::{IncidenceMatrix, NodeIndex, Path, SecurityGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    /// Path-choosing evader; minimizes delivery time.
    Vendor,
    /// Node-choosing interdictor; maximizes delivery time.
    Attacker,
}

/// Prospect-theory parameters of one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProspectParams {
    /// Prelec rationality exponent, in (0, 1].
    pub gamma: f64,
    /// Loss multiplier, at least 1.
    pub lambda: f64,
    /// Gain exponent.
    pub alpha: f64,
    /// Loss exponent.
    pub beta: f64,
    /// Reference delivery time in minutes.
    pub reference: f64,
    /// Relaxes `alpha` and `beta` from (0, 1] to any positive value.
    pub exploratory: bool,
}

impl Default for ProspectParams {
    fn default() -> Self {
        ProspectParams {
            gamma: 1.0,
            lambda: 5.0,
            alpha: 0.2,
            beta: 0.8,
            reference: 30.0,
            exploratory: false,
        }
    }
}

impl ProspectParams {
    pub fn with_gamma(gamma: f64) -> Self {
        ProspectParams {
            gamma,
            ..Default::default()
        }
    }

    /// Parameters under which the subjective matrices equal the objective one.
    pub fn neutral() -> Self {
        ProspectParams {
            gamma: 1.0,
            lambda: 1.0,
            alpha: 1.0,
            beta: 1.0,
            reference: 0.0,
            exploratory: false,
        }
    }

    pub fn validate(&self) -> Result<(), PayoffError> {
        let bad = |name, value, reason| Err(PayoffError::InvalidParameter { name, value, reason });
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma", self.gamma, "must lie in (0, 1]");
        }
        if !(self.lambda >= 1.0 && self.lambda.is_finite()) {
            return bad("lambda", self.lambda, "must be a finite value >= 1");
        }
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(value > 0.0 && value.is_finite()) {
                return bad(name, value, "must be positive");
            }
            if !self.exploratory && value > 1.0 {
                return bad(name, value, "must lie in (0, 1] unless exploratory is set");
            }
        }
        if !self.reference.is_finite() {
            return bad("reference", self.reference, "must be finite");
        }
        Ok(())
    }
}

/// Prelec weighting `w(p) = exp(-(-ln p)^gamma)`, with `w(0) = 0` and
/// `w(1) = 1`.
pub fn prelec_weight(p: f64, gamma: f64) -> Result<f64, PayoffError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PayoffError::ProbabilityDomain(p));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(PayoffError::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be positive",
        });
    }
    Ok(if p == 0.0 || p == 1.0 || gamma == 1.0 {
        p
    } else {
        (-(-p.ln()).powf(gamma)).exp()
    })
}

/// `a^e` for `a >= 0`.
fn pow_nonneg(a: f64, e: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        (e * a.ln()).exp()
    }
}

/// Vendor value function. The vendor minimizes, so `a >= 0` (late relative
/// to the reference) is a loss and is amplified by `lambda`.
pub fn value_vendor(a: f64, params: &ProspectParams) -> f64 {
    if a >= 0.0 {
        params.lambda * pow_nonneg(a, params.beta)
    } else {
        -pow_nonneg(-a, params.alpha)
    }
}

/// Attacker value function. The attacker maximizes, so `a < 0` (early
/// relative to the reference) is a loss.
pub fn value_attacker(a: f64, params: &ProspectParams) -> f64 {
    if a < 0.0 {
        -params.lambda * pow_nonneg(-a, params.beta)
    } else {
        pow_nonneg(a, params.alpha)
    }
}

/// Builds a player's subjective matrix with cells
/// `v(l[h][n] * w(p_n) * f_h(n) + f_h(D) - R)`.
pub fn build_pt_matrix(
    player: Player,
    graph: &SecurityGraph,
    paths: &[Path],
    incidence: &IncidenceMatrix,
    params: &ProspectParams,
) -> Result<PayoffMatrix, PayoffError> {
    check_inputs(graph, paths, incidence)?;
    params.validate()?;
    let n = graph.node_count();
    let weights = (0..n)
        .map(|i| prelec_weight(graph.attack_probability(NodeIndex(i)), params.gamma))
        .collect::<Result<Vec<_>, _>>()?;

    let mut entries = Vec::with_capacity(paths.len() * n);
    for (h, path) in paths.iter().enumerate() {
        let total = path.total_time();
        for (node, w) in weights.iter().enumerate() {
            let delay = if incidence.get(h, node) {
                let reached = path
                    .arrival_time(NodeIndex(node))
                    .map_err(|e| PayoffError::DimensionMismatch(e.to_string()))?;
                w * reached
            } else {
                0.0
            };
            let a = delay + total - params.reference;
            entries.push(match player {
                Player::Vendor => value_vendor(a, params),
                Player::Attacker => value_attacker(a, params),
            });
        }
    }
    let kind = match player {
        Player::Vendor => MatrixKind::VendorSubjective,
        Player::Attacker => MatrixKind::AttackerSubjective,
    };
    PayoffMatrix::new(kind, paths.len(), n, entries)
}
