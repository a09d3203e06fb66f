//! POVMs, efficient measurements and the inside/outside state updates.
//!
//! An efficient measurement has one Kraus operator per outcome,
//! `A_b = U_b E_b^{1/2}`. The observer who sees outcome `b` updates to
//! `rho_b = A_b rho A_b^dagger / p_b`; a bystander who only knows the
//! measurement was made updates to `sum_b A_b rho A_b^dagger`.

use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, psd_sqrt, ComplexMatrix, HERMITIAN_TOL, PSD_TOL, UNITARY_TOL};
use crate::states::{DensityOperator, Functional};

/// Tolerance on `sum_b E_b = I`.
pub const RESOLUTION_TOL: f64 = 1e-10;
/// Outcomes with probability at or below this are dropped from averages.
pub const PROB_FLOOR: f64 = 1e-14;
/// Relative eigenvalue threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;
/// Effects whose largest eigenvalue is at most this count as vanishing.
const ZERO_EFFECT_TOL: f64 = 1e-12;

/// A positive operator valued measure.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

/// Checks positivity of every effect and the resolution of the identity.
pub fn validate(effects: &[ComplexMatrix]) -> Result<()> {
    let first = effects.first().ok_or(Error::EmptyMeasurement)?;
    let d = first.dim();
    let mut total = ComplexMatrix::zeros(d)?;
    for e in effects {
        if e.dim() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: e.dim(),
            });
        }
        let eig = eig_hermitian(e, HERMITIAN_TOL)?;
        let min = eig.values.values().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        total = &total + e;
    }
    let dev = total.max_abs_diff(&ComplexMatrix::identity(d)?);
    if dev > RESOLUTION_TOL {
        return Err(Error::NotResolution(dev));
    }
    Ok(())
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        validate(&effects)?;
        Ok(Self {
            effects: effects.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(dim)?])
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix) -> Result<Self> {
        let defect = basis.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        let effects = (0..basis.dim())
            .map(|j| ComplexMatrix::projector(&basis.column(j)))
            .collect::<Result<_>>()?;
        Self::new(effects)
    }

    pub fn computational_basis(dim: usize) -> Result<Self> {
        Self::projective(&ComplexMatrix::identity(dim)?)
    }

    /// The two-outcome measurement `(E, I - E)`.
    pub fn binary(effect: ComplexMatrix) -> Result<Self> {
        let rest = &ComplexMatrix::identity(effect.dim())? - &effect;
        Self::new(vec![effect, rest])
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }
}

/// True when every nonvanishing effect has full numerical rank.
pub fn is_finite_strength(m: &Povm) -> bool {
    m.effects().iter().all(|e| {
        let eig = match eig_hermitian(e, HERMITIAN_TOL) {
            Ok(eig) => eig,
            Err(_) => return false,
        };
        let v = eig.values.values();
        let (max, min) = (v[0], v[v.len() - 1]);
        max <= ZERO_EFFECT_TOL || min > RANK_TOL * max
    })
}

/// `p m1 + (1 - p) m2`, padding the shorter POVM with zero effects.
pub fn convex_combine(m1: &Povm, m2: &Povm, p: f64) -> Result<Povm> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimMismatch {
            expected: m1.dim(),
            got: m2.dim(),
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]".into(),
        });
    }
    let zero = ComplexMatrix::zeros(m1.dim())?;
    let n = m1.len().max(m2.len());
    let effects = (0..n)
        .map(|b| {
            let e = m1.effects().get(b).unwrap_or(&zero);
            let f = m2.effects().get(b).unwrap_or(&zero);
            &e.scale_real(p) + &f.scale_real(1.0 - p)
        })
        .collect();
    Povm::new(effects)
}

/// `(U E_b U^dagger)_b`.
pub fn conjugate(m: &Povm, u: &ComplexMatrix) -> Result<Povm> {
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    if u.dim() != m.dim() {
        return Err(Error::DimMismatch {
            expected: m.dim(),
            got: u.dim(),
        });
    }
    Povm::new(m.effects().iter().map(|e| e.conjugate_by(u)).collect())
}

/// `p_b = tr(rho E_b)`, clamped into `[0, 1]`.
pub fn outcome_probability(rho: &DensityOperator, m: &Povm, b: usize) -> Result<f64> {
    let e = m.effects().get(b).ok_or(Error::IndexOutOfRange {
        index: b,
        len: m.len(),
    })?;
    if e.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: e.dim(),
        });
    }
    Ok(rho.matrix().trace_product(e).re.clamp(0.0, 1.0))
}

/// A POVM together with feedback unitaries; Kraus operators
/// `A_b = U_b E_b^{1/2}` are precomputed.
#[derive(Debug, Clone)]
pub struct EfficientMeasurement {
    povm: Povm,
    feedback: Option<Vec<ComplexMatrix>>,
    kraus: Vec<ComplexMatrix>,
}

impl EfficientMeasurement {
    pub fn new(povm: Povm, feedback: Vec<ComplexMatrix>) -> Result<Self> {
        if feedback.len() != povm.len() {
            return Err(Error::DimMismatch {
                expected: povm.len(),
                got: feedback.len(),
            });
        }
        for u in &feedback {
            if u.dim() != povm.dim() {
                return Err(Error::DimMismatch {
                    expected: povm.dim(),
                    got: u.dim(),
                });
            }
            let defect = u.unitarity_defect();
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary(defect));
            }
        }
        let roots = Self::roots(&povm)?;
        let kraus = feedback.iter().zip(&roots).map(|(u, r)| u * r).collect();
        Ok(Self {
            povm,
            feedback: Some(feedback),
            kraus,
        })
    }

    /// All `U_b = I`.
    pub fn without_feedback(povm: Povm) -> Self {
        let kraus = Self::roots(&povm).expect("validated POVM effects are PSD");
        Self {
            povm,
            feedback: None,
            kraus,
        }
    }

    fn roots(povm: &Povm) -> Result<Vec<ComplexMatrix>> {
        povm.effects()
            .iter()
            .map(|e| psd_sqrt(e, PSD_TOL))
            .collect()
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn feedback(&self) -> Option<&[ComplexMatrix]> {
        self.feedback.as_deref()
    }

    /// False when every feedback unitary is the identity.
    pub fn has_feedback(&self) -> bool {
        match &self.feedback {
            None => false,
            Some(us) => {
                let id = ComplexMatrix::identity(self.povm.dim()).expect("validated dimension");
                us.iter().any(|u| u.max_abs_diff(&id) > UNITARY_TOL)
            }
        }
    }

    /// Largest entrywise deviation of `sum_b A_b^dagger A_b` from `I`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.povm.dim();
        let mut total = ComplexMatrix::zeros(d).expect("validated dimension");
        for a in &self.kraus {
            total = &total + &(&a.adjoint() * a);
        }
        total.max_abs_diff(&ComplexMatrix::identity(d).expect("validated dimension"))
    }
}

/// Outcome index, its probability and the measurer's updated state.
#[derive(Debug, Clone)]
pub struct MeasurementOutcomeRecord {
    pub outcome_index: usize,
    pub probability: f64,
    pub posterior: DensityOperator,
}

fn check_dims(rho: &DensityOperator, m: &EfficientMeasurement) -> Result<()> {
    if rho.dim() != m.povm().dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: m.povm().dim(),
        });
    }
    Ok(())
}

/// `rho_b = A_b rho A_b^dagger / p_b`.
pub fn posterior(
    rho: &DensityOperator,
    m: &EfficientMeasurement,
    b: usize,
) -> Result<MeasurementOutcomeRecord> {
    check_dims(rho, m)?;
    let p = outcome_probability(rho, m.povm(), b)?;
    if p <= PROB_FLOOR {
        return Err(Error::ZeroProbabilityOutcome(b));
    }
    let a = &m.kraus()[b];
    let unnormalized = (&(a * rho.matrix()) * &a.adjoint()).hermitian_part();
    Ok(MeasurementOutcomeRecord {
        outcome_index: b,
        probability: p,
        posterior: DensityOperator::from_unnormalized(&unnormalized)?,
    })
}

/// Posteriors for every outcome above the probability floor.
pub fn outcome_records(
    rho: &DensityOperator,
    m: &EfficientMeasurement,
) -> Result<Vec<MeasurementOutcomeRecord>> {
    check_dims(rho, m)?;
    let mut out = Vec::with_capacity(m.povm().len());
    for b in 0..m.povm().len() {
        match posterior(rho, m, b) {
            Ok(rec) => out.push(rec),
            Err(Error::ZeroProbabilityOutcome(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The bystander's state `sum_b A_b rho A_b^dagger`.
pub fn outside_state(rho: &DensityOperator, m: &EfficientMeasurement) -> Result<DensityOperator> {
    check_dims(rho, m)?;
    let mut total = ComplexMatrix::zeros(rho.dim())?;
    for a in m.kraus() {
        total = &total + &(&(a * rho.matrix()) * &a.adjoint());
    }
    DensityOperator::from_unnormalized(&total)
}

/// `F(rho) - sum_b p_b F(rho_b)`: the measurer's average gain.
pub fn delta_in(rho: &DensityOperator, m: &EfficientMeasurement, f: Functional) -> Result<f64> {
    let records = outcome_records(rho, m)?;
    let avg: f64 = records
        .iter()
        .map(|r| r.probability * f.evaluate(&r.posterior))
        .sum();
    Ok(f.evaluate(rho) - avg)
}

/// `F(rho_tilde) - F(rho)`: the bystander's loss.
pub fn delta_out(rho: &DensityOperator, m: &EfficientMeasurement, f: Functional) -> Result<f64> {
    let tilde = outside_state(rho, m)?;
    Ok(f.evaluate(&tilde) - f.evaluate(rho))
}
