use super::GeometryError;
use serde::{Deserialize, Serialize};

const DIMENSION: f64 = 2.0;

/// The boundary-parameter schedule α(ε).
///
/// `Constant` keeps α fixed; `FlexPower` uses `α(ε) = ε^{−d(p₀−1)/(d−p₀)}`
/// with d = 2, the critical growth that pins the dual-norm transition to p₀.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlphaSchedule {
    Constant { alpha: f64 },
    FlexPower { p0: f64 },
}

impl AlphaSchedule {
    pub fn alpha(&self, eps: f64) -> Result<f64, GeometryError> {
        match *self {
            AlphaSchedule::Constant { alpha } => {
                if !(alpha > 0.0) {
                    return Err(GeometryError::InvalidParameter(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
                Ok(alpha)
            }
            AlphaSchedule::FlexPower { p0 } => {
                let exponent = Self::flex_exponent(p0)?;
                Ok(eps.powf(-exponent))
            }
        }
    }

    /// Positive exponent q with α(ε) = ε^{−q}, i.e. q = d(p₀−1)/(d−p₀).
    pub fn flex_exponent(p0: f64) -> Result<f64, GeometryError> {
        let upper = DIMENSION / (DIMENSION - 1.0);
        if !(p0 > 1.0 && p0 < upper) {
            return Err(GeometryError::InvalidExponent { p0 });
        }
        Ok(DIMENSION * (p0 - 1.0) / (DIMENSION - p0))
    }
}

/// One probe row of a schedule report.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleRow {
    pub eps: f64,
    pub alpha: f64,
    /// α(ε)⁻¹·ε, which must tend to zero for the radii to shrink fast enough.
    pub inv_alpha_eps: f64,
    /// α(ε)·ε^{d(p−1)/(d−p)} per requested p, which must tend to zero for the
    /// measures to converge in the dual of W^{1,p}.
    pub growth_products: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub ps: Vec<f64>,
    pub rows: Vec<ScheduleRow>,
    /// True when the α⁻¹ε sequence fails to decrease towards zero.
    pub shrink_flagged: bool,
    /// Per requested p: true when the growth product fails to decrease
    /// towards zero over the probe list.
    pub growth_flagged: Vec<bool>,
}

/// Heuristic trend check: non-increasing along the probe list and decayed by
/// at least 10% overall.
fn tends_to_zero(values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let monotone = values
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    monotone && values[values.len() - 1] < 0.9 * values[0]
}

/// Evaluate the two admissibility sequences of the α window over a probe
/// list of strictly decreasing ε.
pub fn validate_schedule(
    schedule: &AlphaSchedule,
    probe_eps: &[f64],
    ps: &[f64],
) -> Result<ScheduleReport, GeometryError> {
    if probe_eps.windows(2).any(|w| w[1] >= w[0]) || probe_eps.iter().any(|&e| e <= 0.0) {
        return Err(GeometryError::InvalidParameter(
            "probe eps list must be strictly decreasing and positive".into(),
        ));
    }
    if let AlphaSchedule::FlexPower { p0 } = schedule {
        AlphaSchedule::flex_exponent(*p0)?;
    }
    for &p in ps {
        if !(p > 1.0 && p < DIMENSION) {
            return Err(GeometryError::InvalidParameter(format!(
                "dual exponent p must lie in (1, {DIMENSION}), got {p}"
            )));
        }
    }
    let mut rows = Vec::new();
    for &eps in probe_eps {
        let alpha = schedule.alpha(eps)?;
        let growth_products = ps
            .iter()
            .map(|&p| alpha * eps.powf(DIMENSION * (p - 1.0) / (DIMENSION - p)))
            .collect();
        rows.push(ScheduleRow {
            eps,
            alpha,
            inv_alpha_eps: eps / alpha,
            growth_products,
        });
    }
    let shrink: Vec<f64> = rows.iter().map(|r| r.inv_alpha_eps).collect();
    let growth_flagged = (0..ps.len())
        .map(|j| {
            let seq: Vec<f64> = rows.iter().map(|r| r.growth_products[j]).collect();
            !tends_to_zero(&seq)
        })
        .collect();
    Ok(ScheduleReport {
        ps: ps.to_vec(),
        rows,
        shrink_flagged: !tends_to_zero(&shrink),
        growth_flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROBES: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

    #[test]
    fn constant_schedule_passes_for_all_p() {
        let report = validate_schedule(
            &AlphaSchedule::Constant { alpha: 1.0 },
            &PROBES,
            &[1.1, 1.5, 1.9],
        )
        .unwrap();
        assert!(!report.shrink_flagged);
        assert!(report.growth_flagged.iter().all(|f| !f));
    }

    #[test]
    fn flex_power_at_its_own_exponent_is_flagged_constant() {
        // α·ε^{2(p−1)/(2−p)} ≡ 1 exactly at p = p0.
        let report = validate_schedule(
            &AlphaSchedule::FlexPower { p0: 1.5 },
            &PROBES,
            &[1.5],
        )
        .unwrap();
        for row in &report.rows {
            assert!((row.growth_products[0] - 1.0).abs() < 1e-12);
        }
        assert!(report.growth_flagged[0]);
        assert!(!report.shrink_flagged);
    }

    #[test]
    fn flex_power_above_p0_tends_to_zero() {
        let report = validate_schedule(
            &AlphaSchedule::FlexPower { p0: 1.5 },
            &PROBES,
            &[1.6],
        )
        .unwrap();
        assert!(!report.growth_flagged[0]);
        let seq: Vec<f64> = report.rows.iter().map(|r| r.growth_products[0]).collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn invalid_exponent_rejected() {
        assert!(matches!(
            AlphaSchedule::flex_exponent(2.5),
            Err(GeometryError::InvalidExponent { .. })
        ));
        assert!(matches!(
            AlphaSchedule::flex_exponent(1.0),
            Err(GeometryError::InvalidExponent { .. })
        ));
    }

    #[test]
    fn flex_power_one_point_five_is_inverse_square() {
        let s = AlphaSchedule::FlexPower { p0: 1.5 };
        let alpha = s.alpha(0.1).unwrap();
        assert!((alpha - 100.0).abs() < 1e-9);
    }
}
