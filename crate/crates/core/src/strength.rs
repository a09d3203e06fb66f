//! Fixed-strength maximization of the measurer's gain on a qubit.
//!
//! The strength of a measurement is twice its impurity gain on the
//! maximally mixed state, `k = alpha b^2 / (2 - alpha)`. For fixed `k` the
//! gain on a state of Bloch modulus `a` is maximized by a measurement that
//! commutes with the state, which leaves a bystander's state unchanged.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{delta_out, EfficientMeasurement};
use crate::qubit::{alpha_cap, delta_in_closed, QubitProblem};
use crate::search::{golden_section_max, grid};
use crate::states::Functional;

const RANGE_TOL: f64 = 1e-12;

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (-RANGE_TOL..=1.0 + RANGE_TOL).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value,
            range: "[0, 1]".into(),
        })
    }
}

/// Strength `k` and state modulus `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthProblem {
    pub k: f64,
    pub a: f64,
}

impl StrengthProblem {
    pub fn new(k: f64, a: f64) -> Result<Self> {
        unit_interval("k", k)?;
        unit_interval("a", a)?;
        Ok(Self {
            k: k.clamp(0.0, 1.0),
            a: a.clamp(0.0, 1.0),
        })
    }
}

pub fn strength_k(alpha: f64, b: f64) -> Result<f64> {
    unit_interval("b", b)?;
    if !(alpha.is_finite() && alpha >= 0.0 && alpha <= alpha_cap(b) + RANGE_TOL) {
        return Err(Error::ParamOutOfRange {
            name: "alpha",
            value: alpha,
            range: format!("[0, {}]", alpha_cap(b)),
        });
    }
    if alpha >= 2.0 {
        return Err(Error::SingularAlpha);
    }
    Ok(alpha * b * b / (2.0 - alpha))
}

/// Trace of the effect with Bloch modulus `b` and strength `k`. Requires
/// `k <= b`.
pub fn alpha_for_strength(k: f64, b: f64) -> Result<f64> {
    unit_interval("k", k)?;
    unit_interval("b", b)?;
    if b < k - RANGE_TOL {
        return Err(Error::BOutOfRange { b, k });
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * k / (b * b + k)).min(alpha_cap(b)))
}

/// Largest gain at fixed orientation `z` and the `b` achieving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxAtZ {
    pub value: f64,
    pub b_star: f64,
}

/// Maximum over `b in [k, 1]` at fixed `z`: attained at `b = k` for
/// `z >= 0` and at `b = 1` for `z < 0`.
pub fn max_delta_in_at_z(k: f64, a: f64, z: f64) -> Result<MaxAtZ> {
    let p = StrengthProblem::new(k, a)?;
    if !(z.is_finite() && (-1.0..=1.0).contains(&z)) {
        return Err(Error::ParamOutOfRange {
            name: "z",
            value: z,
            range: "[-1, 1]".into(),
        });
    }
    let az = p.a * z.abs();
    Ok(MaxAtZ {
        value: 0.5 * p.k * (1.0 - p.a * p.a) * (1.0 + az) / (1.0 + p.k * az),
        b_star: if z >= 0.0 { p.k } else { 1.0 },
    })
}

/// The absolute maximum of the gain at fixed strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrengthMaximum {
    pub value: f64,
    pub z_star: f64,
    pub b_star: f64,
    pub alpha_star: f64,
    /// Bystander's impurity change at the maximizer, from the matrices.
    pub delta_out_at_max: f64,
}

fn delta_out_brute(a: f64, b: f64, alpha: f64, z: f64) -> Result<f64> {
    let (rho, povm) = QubitProblem::new(a, b, alpha, z)?.operators()?;
    let m = EfficientMeasurement::without_feedback(povm);
    delta_out(&rho, &m, Functional::Impurity)
}

/// `k (1 - a^2)(1 + a) / (2 (1 + a k))`, attained at `z = 1`, `b = k`.
pub fn max_delta_in(k: f64, a: f64) -> Result<StrengthMaximum> {
    let p = StrengthProblem::new(k, a)?;
    let at = max_delta_in_at_z(p.k, p.a, 1.0)?;
    let alpha_star = alpha_for_strength(p.k, at.b_star)?;
    Ok(StrengthMaximum {
        value: at.value,
        z_star: 1.0,
        b_star: at.b_star,
        alpha_star,
        delta_out_at_max: delta_out_brute(p.a, at.b_star, alpha_star, 1.0)?,
    })
}

/// Result of the numerical maximization over `(b, z)`.
///
/// At `k = 1` every orientation attains the maximum, so `z` and
/// `delta_out` reflect whichever maximizer the search lands on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMaximum {
    pub value: f64,
    pub b: f64,
    pub z: f64,
    pub delta_out: f64,
}

fn gain(k: f64, a: f64, b: f64, z: f64) -> Option<f64> {
    let alpha = alpha_for_strength(k, b).ok()?;
    let p = QubitProblem::new(a, b, alpha, z).ok()?;
    delta_in_closed(&p).ok()
}

/// Maximizes the closed-form gain over an `n x n` grid in
/// `(b, z) in [k, 1] x [-1, 1]`, then refines by alternating golden-section
/// searches within the neighbouring grid cells. Points where the closed
/// form is singular are skipped.
pub fn grid_search_max(k: f64, a: f64, n: usize) -> Result<GridMaximum> {
    let p = StrengthProblem::new(k, a)?;
    if n < 2 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: n as f64,
            range: ">= 2".into(),
        });
    }
    let bs = grid(p.k, 1.0, n);
    let zs = grid(-1.0, 1.0, n);
    let row_best: Vec<Option<(f64, usize, usize)>> = bs
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            zs.iter()
                .enumerate()
                .filter_map(|(j, &z)| gain(p.k, p.a, b, z).map(|v| (v, i, j)))
                .fold(None, |best: Option<(f64, usize, usize)>, c| match best {
                    Some(bb) if bb.0 >= c.0 => Some(bb),
                    _ => Some(c),
                })
        })
        .collect();
    let (mut value, i, j) = row_best
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(f64, usize, usize)>, c| match best {
            Some(bb) if bb.0 >= c.0 => Some(bb),
            _ => Some(c),
        })
        .ok_or(Error::DegenerateCurve)?;

    let (mut b, mut z) = (bs[i], zs[j]);
    let b_lo = bs[i.saturating_sub(1)];
    let b_hi = bs[(i + 1).min(n - 1)];
    let z_lo = zs[j.saturating_sub(1)];
    let z_hi = zs[(j + 1).min(n - 1)];
    let score = |b: f64, z: f64| gain(p.k, p.a, b, z).unwrap_or(f64::NEG_INFINITY);
    for _ in 0..4 {
        let (zc, vz) = golden_section_max(|zz| score(b, zz), z_lo, z_hi, 1e-13);
        if vz > value {
            z = zc;
            value = vz;
        }
        let (bc, vb) = golden_section_max(|bb| score(bb, z), b_lo, b_hi, 1e-13);
        if vb > value {
            b = bc;
            value = vb;
        }
    }
    let alpha = alpha_for_strength(p.k, b)?;
    Ok(GridMaximum {
        value,
        b,
        z,
        delta_out: delta_out_brute(p.a, b, alpha, z)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strength_examples() {
        assert_eq!(strength_k(1.3, 0.0).unwrap(), 0.0);
        assert!((strength_k(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((strength_k(1.0, 0.9).unwrap() - 0.81).abs() < 1e-15);
        assert_eq!(strength_k(2.0, 0.0), Err(Error::SingularAlpha));
    }

    #[test]
    fn strength_is_twice_gain_on_mixed_state() {
        for &(alpha, b) in &[(0.4, 0.3), (1.0, 0.9), (1.5, 0.2)] {
            let p = QubitProblem::new(0.0, b, alpha, 0.3).unwrap();
            let din = delta_in_closed(&p).unwrap();
            assert!((strength_k(alpha, b).unwrap() - 2.0 * din).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_for_strength_examples() {
        assert!((alpha_for_strength(0.25, 0.5).unwrap() - 1.0).abs() < 1e-15);
        let k = 0.4;
        assert!((alpha_for_strength(k, k).unwrap() - 2.0 / (1.0 + k)).abs() < 1e-15);
        assert_eq!(alpha_for_strength(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(
            alpha_for_strength(0.5, 0.3),
            Err(Error::BOutOfRange { b: 0.3, k: 0.5 })
        );
        for &(k, b) in &[(0.1, 0.5), (0.5, 0.7), (0.9, 0.95), (1.0, 1.0)] {
            let alpha = alpha_for_strength(k, b).unwrap();
            assert!((strength_k(alpha, b).unwrap() - k).abs() < 1e-12);
            assert!(alpha <= alpha_cap(b) + 1e-15);
        }
    }

    #[test]
    fn max_at_z_examples() {
        let m = max_delta_in_at_z(0.5, 0.8, 0.0).unwrap();
        assert!((m.value - 0.5 * 0.5 * 0.36).abs() < 1e-15);
        assert_eq!(m.b_star, 0.5);
        for z in [-1.0, -0.2, 0.6] {
            assert!((max_delta_in_at_z(0.3, 0.0, z).unwrap().value - 0.15).abs() < 1e-15);
        }
        let m = max_delta_in_at_z(0.5, 0.8, 1.0).unwrap();
        assert!((m.value - 0.5 * 0.5 * 0.36 * 1.8 / 1.4).abs() < 1e-15);
    }

    #[test]
    fn max_at_z_dominates_b_grid() {
        for &(k, a) in &[(0.3, 0.5), (0.7, 0.9), (0.1, 0.2)] {
            for zi in 0..=20 {
                let z = -1.0 + zi as f64 / 10.0;
                let m = max_delta_in_at_z(k, a, z).unwrap();
                let at_star = gain(k, a, m.b_star, z).unwrap();
                assert!((at_star - m.value).abs() < 1e-12);
                for b in grid(k, 1.0, 201) {
                    assert!(gain(k, a, b, z).unwrap() <= m.value + 1e-8);
                }
            }
        }
    }

    #[test]
    fn max_at_z_monotone_in_abs_z() {
        let mut prev = 0.0;
        for i in 0..=50 {
            let v = max_delta_in_at_z(0.6, 0.7, i as f64 / 50.0).unwrap().value;
            assert!(v >= prev - 1e-15);
            prev = v;
            let w = max_delta_in_at_z(0.6, 0.7, -(i as f64) / 50.0)
                .unwrap()
                .value;
            assert!((v - w).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_in_b_opposes_z() {
        let (k, a, h) = (0.3, 0.7, 1e-5);
        for b in grid(0.35, 0.95, 7) {
            for z in [-0.9, -0.4, 0.4, 0.9] {
                let d = gain(k, a, b + h, z).unwrap() - gain(k, a, b - h, z).unwrap();
                assert_eq!(d.signum(), -z.signum(), "b={b} z={z}");
            }
        }
    }

    #[test]
    fn absolute_maximum_examples() {
        let m = max_delta_in(1.0, 0.8).unwrap();
        assert!((m.value - 0.18).abs() < 1e-15);
        assert!(m.delta_out_at_max.abs() < 1e-12);
        assert_eq!(max_delta_in(0.0, 0.5).unwrap().value, 0.0);
        assert!((max_delta_in(0.6, 0.0).unwrap().value - 0.3).abs() < 1e-15);
        let m = max_delta_in(0.5, 0.8).unwrap();
        assert!((m.value - 0.115_714_285_714_285_7).abs() < 1e-12);
        assert_eq!(m.z_star, 1.0);
    }

    #[test]
    fn grid_search_agrees() {
        for &(k, a) in &[(0.5, 0.8), (0.2, 0.25), (1.0, 0.9)] {
            let g = grid_search_max(k, a, 401).unwrap();
            let m = max_delta_in(k, a).unwrap();
            assert!((g.value - m.value).abs() < 1e-8);
            assert!(m.delta_out_at_max.abs() < 1e-12);
            if k < 1.0 {
                assert!(g.delta_out.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projective_gain_is_orientation_free() {
        for z in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert!((gain(1.0, 0.9, 1.0, z).unwrap() - 0.5 * (1.0 - 0.81)).abs() < 1e-15);
        }
    }
}
