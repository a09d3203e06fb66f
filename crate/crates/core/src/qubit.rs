//! Closed forms for the qubit two-outcome measurement without feedback.
//!
//! The state is `rho = (I + a . sigma)/2` and the measurement is `(E, I - E)`
//! with `E = alpha (I + b . sigma)/2`. Only the moduli `a`, `b`, the trace
//! `alpha` and `z = cos` of the angle between the two Bloch vectors enter.
//! All changes are measured with the impurity `P`.

use crate::error::{Error, Result};
use crate::matcore::bloch_operator;
use crate::measure::Povm;
use crate::search::grid;
use crate::states::{from_bloch, BlochVector, DensityOperator};

/// Slack on the box constraints of the parameters.
const RANGE_TOL: f64 = 1e-12;
/// Denominators below this are treated as vanishing.
const SINGULAR_TOL: f64 = 1e-12;
/// `r0^2` below this is treated as zero.
const R0_SQ_FLOOR: f64 = 1e-14;
/// Grid used to bracket the crossings `|z0| = 1` before bisection.
const REGIME_SCAN: usize = 4000;
/// Printed endpoints further than this from the bisection result are flagged.
const ENDPOINT_TOL: f64 = 1e-6;

/// Largest admissible `alpha = tr E` for Bloch modulus `b`.
pub fn alpha_cap(b: f64) -> f64 {
    2.0 / (1.0 + b)
}

fn in_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo - RANGE_TOL && value <= hi + RANGE_TOL {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value,
            range: format!("[{lo}, {hi}]"),
        })
    }
}

/// Scalars describing one state/measurement orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitProblem {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub z: f64,
}

impl QubitProblem {
    pub fn new(a: f64, b: f64, alpha: f64, z: f64) -> Result<Self> {
        in_range("a", a, 0.0, 1.0)?;
        in_range("b", b, 0.0, 1.0)?;
        in_range("alpha", alpha, 0.0, alpha_cap(b))?;
        in_range("z", z, -1.0, 1.0)?;
        Ok(Self { a, b, alpha, z })
    }

    /// State with `a` along the z axis; the effect's Bloch vector is tilted
    /// in the x-z plane so that its cosine with `a` is `z`.
    pub fn operators(&self) -> Result<(DensityOperator, Povm)> {
        let rho = from_bloch(BlochVector::new(0.0, 0.0, self.a))?;
        let sin = (1.0 - self.z * self.z).max(0.0).sqrt();
        let half = 0.5 * self.alpha;
        let e = bloch_operator(half, [half * self.b * sin, 0.0, half * self.b * self.z]);
        Ok((rho, Povm::binary(e)?))
    }
}

/// `r0^2` where `sqrt(E(I - E)) = r0 I + r . sigma`.
pub fn r0_squared(alpha: f64, b: f64) -> Result<f64> {
    in_range("b", b, 0.0, 1.0)?;
    in_range("alpha", alpha, 0.0, alpha_cap(b))?;
    let c = 1.0 - b * b;
    let radicand = (c * (4.0 - 4.0 * alpha + c * alpha * alpha)).max(0.0);
    let r0_sq = (alpha / 8.0) * (2.0 - alpha - alpha * b * b + radicand.sqrt());
    let g = 0.5 * alpha * (1.0 - alpha) * b;
    if r0_sq < R0_SQ_FLOOR && g.abs() > 1e-7 {
        return Err(Error::DegenerateSqrt(r0_sq));
    }
    Ok(r0_sq.max(0.0))
}

/// `(r0, r)` with `sqrt(G) = r0 I + r . sigma` for an effect of trace
/// `alpha` and Bloch vector `b_vec`.
pub fn sqrt_g(alpha: f64, b_vec: [f64; 3]) -> Result<(f64, [f64; 3])> {
    let b = b_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r0_sq = r0_squared(alpha, b)?;
    let r0 = r0_sq.sqrt();
    if r0 == 0.0 {
        return Ok((0.0, [0.0; 3]));
    }
    let k = alpha * (1.0 - alpha) / (4.0 * r0);
    Ok((r0, b_vec.map(|x| k * x)))
}

/// The measurer's average impurity decrease.
pub fn delta_in_closed(p: &QubitProblem) -> Result<f64> {
    let QubitProblem { a, b, alpha, z } = *p;
    let abz = a * b * z;
    let d1 = 1.0 + abz;
    let d2 = 2.0 - alpha - alpha * abz;
    let num = alpha * b * b * (1.0 - a * a) * (1.0 - a * a * z * z);
    if num == 0.0 {
        return Ok(0.0);
    }
    if d1 < SINGULAR_TOL || d2 < SINGULAR_TOL {
        return Err(Error::SingularDenominator);
    }
    Ok(num / (2.0 * d1 * d2))
}

/// The bystander's impurity increase.
pub fn delta_out_closed(p: &QubitProblem) -> Result<f64> {
    let QubitProblem { a, b, alpha, z } = *p;
    let s = 1.0 - z * z;
    if s == 0.0 || a == 0.0 || b == 0.0 || alpha == 0.0 {
        return Ok(0.0);
    }
    let r0_sq = r0_squared(alpha, b)?;
    if r0_sq < R0_SQ_FLOOR {
        return Err(Error::SingularR0);
    }
    let ratio_sq = (alpha * a * b).powi(2) / (4.0 * r0_sq);
    Ok(0.5 * ratio_sq * ((1.0 - alpha).powi(2) + 4.0 * r0_sq) * s)
}

/// Range of `delta_in` traced by the symmetric (`alpha = 1`) curve, from
/// the commuting orientation to the mutually unbiased one.
pub fn symmetric_domain(a: f64, b: f64) -> (f64, f64) {
    let one_minus = 1.0 - a * a;
    let lo = if a * b >= 1.0 {
        0.0
    } else {
        0.5 * b * b * one_minus * one_minus / (1.0 - a * a * b * b)
    };
    (lo, 0.5 * b * b * one_minus)
}

/// `delta_out` as a function of `delta_in` on the symmetric curve.
pub fn symmetric_tradeoff(delta_in: f64, a: f64, b: f64) -> Result<f64> {
    in_range("a", a, 0.0, 1.0)?;
    in_range("b", b, 0.0, 1.0)?;
    let (lo, hi) = symmetric_domain(a, b);
    if hi - lo <= 0.0 {
        return Err(Error::DegenerateCurve);
    }
    let slack = 1e-12 * hi.max(1e-300);
    if !(delta_in >= lo - slack && delta_in <= hi + slack) {
        return Err(Error::OutOfCurveDomain {
            value: delta_in,
            lo,
            hi,
        });
    }
    let one_minus = 1.0 - a * a;
    let num = 2.0 * (1.0 - a * a * b * b) * delta_in - b * b * one_minus * one_minus;
    let den = 2.0 * (one_minus - 2.0 * delta_in);
    Ok((num / den).max(0.0))
}

/// Unclipped maximizer of `delta_in` over `z`.
///
/// Uses the rationalized form
/// `z0 = -2 b (1 - alpha) / (a (2 - alpha(1 + b^2) + R))`,
/// `R = sqrt((1 - b^2)(4 - 4 alpha + (1 - b^2) alpha^2))`, which equals
/// `(4 r0^2 - alpha(2 - alpha - alpha b^2)) / (alpha (1 - alpha) a b)` but
/// has no 0/0 at `alpha = 1`.
pub fn z0(a: f64, b: f64, alpha: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "a",
            value: a,
            range: "(0, 1]".into(),
        });
    }
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "b",
            value: b,
            range: "(0, 1]".into(),
        });
    }
    in_range("alpha", alpha, 0.0, alpha_cap(b))?;
    let c = 1.0 - b * b;
    let radical = (c * (4.0 - 4.0 * alpha + c * alpha * alpha))
        .max(0.0)
        .sqrt();
    let den = a * (2.0 - alpha * (1.0 + b * b) + radical);
    if den <= 0.0 {
        // b = 1 and alpha = 1: delta_in does not depend on z.
        return Ok(0.0);
    }
    Ok(-2.0 * b * (1.0 - alpha) / den)
}

/// Maximizer of `delta_in` over `z in [-1, 1]`. `delta_in` has a single
/// stationary point in `z`, so this is `z0` clipped to the interval.
pub fn z_opt(a: f64, b: f64, alpha: f64) -> Result<f64> {
    Ok(z0(a, b, alpha)?.clamp(-1.0, 1.0))
}

/// `alpha` forcing `z0 = +1`, as a closed expression in `a` and `b`.
pub fn alpha_at_z0_plus(a: f64, b: f64) -> Option<f64> {
    let den = b * (1.0 + a * a) + a * (1.0 + b * b);
    (den != 0.0).then(|| (b * (1.0 + a * a) + 2.0 * a) / den)
}

/// `alpha` forcing `z0 = -1`, as a closed expression in `a` and `b`.
pub fn alpha_at_z0_minus(a: f64, b: f64) -> Option<f64> {
    let den = b * (1.0 + a * a) - a * (1.0 + b * b);
    (den != 0.0).then(|| (b * (1.0 + a * a) - 2.0 * a) / den)
}

/// Where in `alpha` the optimal orientation leaves the boundary `z = +-1`.
///
/// For `alpha in [0, alpha_lo]` and `alpha in [alpha_hi, alpha_cap]` the
/// measurer's gain is maximized by a commuting measurement; strictly
/// between them the optimum disturbs the bystander.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeThresholds {
    pub a: f64,
    pub b: f64,
    pub alpha_cap: f64,
    /// Crossing `z0 = -1` located by bisection, or 0 when `z0 > -1` on the
    /// whole range.
    pub alpha_lo: f64,
    /// Crossing `z0 = +1` located by bisection, or `alpha_cap` when
    /// `z0 < 1` on the whole range.
    pub alpha_hi: f64,
    pub closed_alpha_plus: Option<f64>,
    pub closed_alpha_minus: Option<f64>,
    /// Discrepancies between closed-form endpoints and bisection.
    pub warnings: Vec<String>,
}

impl RegimeThresholds {
    /// Intervals of `alpha` with no tradeoff.
    pub fn no_tradeoff_ranges(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if self.alpha_lo > 0.0 {
            out.push((0.0, self.alpha_lo));
        }
        out.push((self.alpha_hi, self.alpha_cap));
        out
    }
}

/// Regime of a single `(a, b, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub alpha: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub z_star: f64,
    pub has_tradeoff: bool,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locates the `alpha` thresholds for `0 < a < 1`, `0 < b < 1` by
/// scanning `z0(alpha)` and bisecting each crossing of `+-1`; the closed
/// endpoint expressions are evaluated alongside and checked against them.
pub fn classify_regime(a: f64, b: f64) -> Result<RegimeThresholds> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::ParamOutOfRange {
                name,
                value: v,
                range: "(0, 1)".into(),
            });
        }
    }
    let cap = alpha_cap(b);
    let z0_at = |alpha: f64| z0(a, b, alpha.clamp(0.0, cap)).expect("parameters validated");
    let grid: Vec<f64> = (0..=REGIME_SCAN)
        .map(|i| cap * i as f64 / REGIME_SCAN as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&al| z0_at(al)).collect();

    let crossings = |level: f64| -> Vec<f64> {
        let g = |al: f64| z0_at(al) - level;
        grid.windows(2)
            .zip(values.windows(2))
            .filter(|(_, v)| (v[0] - level > 0.0) != (v[1] - level > 0.0))
            .map(|(x, _)| bisect(g, x[0], x[1]))
            .collect()
    };
    let lower = crossings(-1.0);
    let upper = crossings(1.0);
    let alpha_lo = lower.first().copied().unwrap_or(0.0);
    let alpha_hi = upper.last().copied().unwrap_or(cap);

    let closed_alpha_plus = alpha_at_z0_plus(a, b);
    let closed_alpha_minus = alpha_at_z0_minus(a, b);
    let mut warnings = Vec::new();
    if lower.len() > 1 || upper.len() > 1 {
        warnings.push(format!(
            "z0 crosses -1 {} times and +1 {} times",
            lower.len(),
            upper.len()
        ));
    }
    if let (Some(&hi), Some(plus)) = (upper.last(), closed_alpha_plus) {
        if (hi - plus).abs() > ENDPOINT_TOL {
            warnings.push(format!(
                "alpha at z0=+1: closed form {plus:.12} vs bisection {hi:.12}"
            ));
        }
    }
    if let Some(minus) = closed_alpha_minus {
        let lower_end = minus.max(0.0);
        if (lower_end - alpha_lo).abs() > ENDPOINT_TOL {
            warnings.push(format!(
                "lower no-tradeoff range ends at {alpha_lo:.12} (bisection), not at \
                 max(0, z0=-1 expression) = {lower_end:.12}"
            ));
        }
    }
    // The upper no-tradeoff range starts at the z0 = +1 crossing; the
    // z0 = -1 expression does not bound it.
    match closed_alpha_minus {
        Some(minus) if (minus - alpha_hi).abs() > ENDPOINT_TOL => warnings.push(format!(
            "upper no-tradeoff range starts at {alpha_hi:.12} (bisection), not at the \
             z0=-1 expression {minus:.12}"
        )),
        None => warnings.push(format!(
            "z0=-1 expression has a vanishing denominator; upper no-tradeoff range starts at \
             {alpha_hi:.12} (bisection)"
        )),
        _ => {}
    }
    Ok(RegimeThresholds {
        a,
        b,
        alpha_cap: cap,
        alpha_lo,
        alpha_hi,
        closed_alpha_plus,
        closed_alpha_minus,
        warnings,
    })
}

/// Thresholds plus the optimum orientation at a specific `alpha`.
pub fn regime_report(a: f64, b: f64, alpha: f64) -> Result<RegimeReport> {
    let t = classify_regime(a, b)?;
    let z_star = z_opt(a, b, alpha)?;
    Ok(RegimeReport {
        alpha,
        alpha_lo: t.alpha_lo,
        alpha_hi: t.alpha_hi,
        z_star,
        has_tradeoff: z_star.abs() < 1.0,
    })
}

/// One orientation's `(delta_in, delta_out)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub z: f64,
    pub delta_in: f64,
    pub delta_out: f64,
}

pub fn tradeoff_point(a: f64, b: f64, alpha: f64, z: f64) -> Result<TradeoffPoint> {
    let p = QubitProblem::new(a, b, alpha, z)?;
    Ok(TradeoffPoint {
        z,
        delta_in: delta_in_closed(&p)?,
        delta_out: delta_out_closed(&p)?,
    })
}

/// `n` orientations with `z` uniform over `[-1, 1]`, ascending.
pub fn orientation_sweep(a: f64, b: f64, alpha: f64, n: usize) -> Result<Vec<TradeoffPoint>> {
    if n < 2 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            range: ">= 2".into(),
        });
    }
    grid(-1.0, 1.0, n)
        .into_iter()
        .map(|z| tradeoff_point(a, b, alpha, z))
        .collect()
}

/// The tradeoff curve: `n` orientations uniform in `z` from the commuting
/// orientation on the optimum's side (`z = +-1`) to the optimum `z_star`.
///
/// Along the result `delta_in` and `delta_out` both increase. Without a
/// tradeoff (`|z_star| = 1`) every point coincides and `delta_out = 0`.
pub fn sample_curve(a: f64, b: f64, alpha: f64, n: usize) -> Result<Vec<TradeoffPoint>> {
    if n < 2 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            range: ">= 2".into(),
        });
    }
    QubitProblem::new(a, b, alpha, 0.0)?;
    let z_star = if a == 0.0 || b == 0.0 {
        0.0
    } else {
        z_opt(a, b, alpha)?
    };
    let z_end = if z_star >= 0.0 { 1.0 } else { -1.0 };
    grid(z_end, z_star, n)
        .into_iter()
        .map(|z| tradeoff_point(a, b, alpha, z))
        .collect()
}
