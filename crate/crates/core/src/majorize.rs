//! Majorization of spectra and the theorem that measurement can only
//! sharpen a state's spectrum on average.
//!
//! Two independent routes compute the averaged spectrum: the posteriors
//! `A_b rho A_b^dagger / p_b`, and the operators
//! `omega_b = rho^{1/2} E_b rho^{1/2} / p_b`, which decompose `rho` itself
//! and share the posteriors' eigenvalues.

use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, psd_sqrt, ComplexMatrix, Spectrum, HERMITIAN_TOL, PSD_TOL};
use crate::measure::{
    outcome_probability, outcome_records, EfficientMeasurement, Povm, PROB_FLOOR,
};
use crate::states::DensityOperator;

/// Slack on partial sums and totals.
pub const MAJORIZATION_TOL: f64 = 1e-10;

/// A spectrum `lhs` claimed to be majorized by `rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationPair {
    pub lhs: Spectrum,
    pub rhs: Spectrum,
}

impl MajorizationPair {
    pub fn new(lhs: Spectrum, rhs: Spectrum) -> Result<Self> {
        if lhs.len() != rhs.len() {
            return Err(Error::LengthMismatch(lhs.len(), rhs.len()));
        }
        Ok(Self { lhs, rhs })
    }

    /// Largest amount by which a partial sum of `lhs` exceeds that of
    /// `rhs`, or by which the totals differ. Non-positive when `lhs` is
    /// majorized by `rhs`.
    pub fn gap(&self) -> f64 {
        let l = self.lhs.partial_sums();
        let r = self.rhs.partial_sums();
        let total = (l.last().unwrap_or(&0.0) - r.last().unwrap_or(&0.0)).abs();
        l.iter().zip(&r).map(|(a, b)| a - b).fold(total, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.gap() <= tol
    }
}

/// Whether `rhs` majorizes `lhs`: every descending partial sum of `lhs`
/// is at most that of `rhs`, and the totals agree.
pub fn majorizes(rhs: &Spectrum, lhs: &Spectrum, tol: f64) -> Result<bool> {
    Ok(MajorizationPair::new(lhs.clone(), rhs.clone())?.holds(tol))
}

/// Sum of the `k` largest eigenvalues, which is the maximum of `tr(P H)`
/// over rank-`k` projectors `P`.
pub fn ky_fan_sum(h: &ComplexMatrix, k: usize) -> Result<f64> {
    let d = h.dim();
    if k == 0 || k > d {
        return Err(Error::BadRank { k, dim: d });
    }
    let eig = eig_hermitian(h, HERMITIAN_TOL)?;
    Ok(eig.values.values()[..k].iter().sum())
}

fn weighted_sum(dim: usize, terms: impl Iterator<Item = (f64, Spectrum)>) -> Spectrum {
    let mut acc = vec![0.0; dim];
    for (p, s) in terms {
        for (a, v) in acc.iter_mut().zip(s.values()) {
            *a += p * v;
        }
    }
    Spectrum::new(acc)
}

/// `sum_b p_b lambda(rho_b)`, each posterior spectrum sorted before
/// averaging.
pub fn average_posterior_spectrum(
    rho: &DensityOperator,
    m: &EfficientMeasurement,
) -> Result<Spectrum> {
    let records = outcome_records(rho, m)?;
    Ok(weighted_sum(
        rho.dim(),
        records
            .into_iter()
            .map(|r| (r.probability, r.posterior.spectrum().clone())),
    ))
}

/// `lambda(rho)` is majorized by the averaged posterior spectrum.
pub fn verify_majorization_theorem(
    rho: &DensityOperator,
    m: &EfficientMeasurement,
) -> Result<bool> {
    let avg = average_posterior_spectrum(rho, m)?;
    majorizes(&avg, rho.spectrum(), MAJORIZATION_TOL)
}

/// One term `p_b omega_b` of the decomposition of `rho`.
#[derive(Debug, Clone)]
pub struct OmegaTerm {
    pub outcome_index: usize,
    pub probability: f64,
    pub omega: DensityOperator,
}

/// `rho = sum_b p_b omega_b` with `omega_b = rho^{1/2} E_b rho^{1/2} / p_b`.
/// Outcomes with vanishing probability are skipped.
pub fn omega_decomposition(rho: &DensityOperator, povm: &Povm) -> Result<Vec<OmegaTerm>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: povm.dim(),
        });
    }
    let root = psd_sqrt(rho.matrix(), PSD_TOL)?;
    let mut out = Vec::with_capacity(povm.len());
    for (b, e) in povm.effects().iter().enumerate() {
        let p = outcome_probability(rho, povm, b)?;
        if p <= PROB_FLOOR {
            continue;
        }
        let w = (&(&root * e) * &root).hermitian_part();
        out.push(OmegaTerm {
            outcome_index: b,
            probability: p,
            omega: DensityOperator::from_unnormalized(&w)?,
        });
    }
    Ok(out)
}

/// `sum_b p_b lambda(omega_b)`.
pub fn omega_average_spectrum(rho: &DensityOperator, povm: &Povm) -> Result<Spectrum> {
    let terms = omega_decomposition(rho, povm)?;
    Ok(weighted_sum(
        rho.dim(),
        terms
            .into_iter()
            .map(|t| (t.probability, t.omega.spectrum().clone())),
    ))
}

/// Both routes evaluated on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub direct_gap: f64,
    pub omega_gap: f64,
}

impl TheoremCheck {
    pub fn direct_holds(&self) -> bool {
        self.direct_gap <= MAJORIZATION_TOL
    }

    pub fn omega_holds(&self) -> bool {
        self.omega_gap <= MAJORIZATION_TOL
    }

    pub fn routes_agree(&self) -> bool {
        self.direct_holds() == self.omega_holds()
    }
}

pub fn check_theorem(rho: &DensityOperator, m: &EfficientMeasurement) -> Result<TheoremCheck> {
    let lambda = rho.spectrum().clone();
    let direct = MajorizationPair::new(lambda.clone(), average_posterior_spectrum(rho, m)?)?;
    let omega = MajorizationPair::new(lambda, omega_average_spectrum(rho, m.povm())?)?;
    Ok(TheoremCheck {
        direct_gap: direct.gap(),
        omega_gap: omega.gap(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{
        haar_unitary, instance_rng, random_density, random_density_any_rank,
        random_efficient_measurement, random_psd,
    };
    use crate::measure::posterior;
    use rand::Rng;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec())
    }

    fn counterexample() -> (DensityOperator, EfficientMeasurement) {
        let rho = DensityOperator::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let e = ComplexMatrix::real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let m = EfficientMeasurement::without_feedback(Povm::binary(e).unwrap());
        (rho, m)
    }

    #[test]
    fn majorizes_examples() {
        assert!(majorizes(&spec(&[1.0, 0.0]), &spec(&[0.5, 0.5]), 1e-10).unwrap());
        assert!(!majorizes(&spec(&[0.5, 0.5]), &spec(&[1.0, 0.0]), 1e-10).unwrap());
        let v = spec(&[0.5, 0.3, 0.2]);
        assert!(majorizes(&v, &v, 0.0).unwrap());
        assert!(!majorizes(&spec(&[0.5, 0.5]), &spec(&[0.6, 0.4]), 1e-10).unwrap());
        assert!(!majorizes(&spec(&[0.7, 0.4]), &spec(&[0.6, 0.4]), 1e-10).unwrap());
        assert_eq!(
            majorizes(&spec(&[1.0]), &spec(&[0.5, 0.5]), 1e-10),
            Err(Error::LengthMismatch(2, 1))
        );
    }

    #[test]
    fn ky_fan_examples() {
        let id = ComplexMatrix::identity(2).unwrap();
        assert!((ky_fan_sum(&id, 1).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::real_diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((ky_fan_sum(&d, 1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(ky_fan_sum(&d, 0), Err(Error::BadRank { k: 0, dim: 2 }));
        assert_eq!(ky_fan_sum(&d, 3), Err(Error::BadRank { k: 3, dim: 2 }));
    }

    #[test]
    fn ky_fan_dominates_random_projectors() {
        let mut rng = instance_rng(11, 0);
        for d in 2..=4 {
            let h = random_psd(d, d, &mut rng).unwrap();
            let h = &h - &ComplexMatrix::identity(d).unwrap().scale_real(0.7);
            assert!((ky_fan_sum(&h, d).unwrap() - h.trace().re).abs() < 1e-10);
            for k in 1..=d {
                let top = ky_fan_sum(&h, k).unwrap();
                for _ in 0..100 {
                    let u = haar_unitary(d, &mut rng).unwrap();
                    let mut p = ComplexMatrix::zeros(d).unwrap();
                    for j in 0..k {
                        p = &p + &ComplexMatrix::projector(&u.column(j)).unwrap();
                    }
                    assert!(p.trace_product(&h).re <= top + 1e-10);
                }
            }
        }
    }

    #[test]
    fn ky_fan_subadditivity() {
        let mut rng = instance_rng(12, 0);
        for _ in 0..50 {
            let d = rng.random_range(2..=4);
            let a = random_psd(d, d, &mut rng).unwrap();
            let b = &random_psd(d, d, &mut rng).unwrap() - &ComplexMatrix::identity(d).unwrap();
            let la = eig_hermitian(&a, HERMITIAN_TOL).unwrap().values;
            let lb = eig_hermitian(&b, HERMITIAN_TOL).unwrap().values;
            let sum = eig_hermitian(&(&a + &b), HERMITIAN_TOL).unwrap().values;
            let added = Spectrum::new(
                la.values()
                    .iter()
                    .zip(lb.values())
                    .map(|(x, y)| x + y)
                    .collect(),
            );
            assert!(majorizes(&added, &sum, 1e-10).unwrap());
        }
    }

    #[test]
    fn counterexample_average_spectrum() {
        let (rho, m) = counterexample();
        let avg = average_posterior_spectrum(&rho, &m).unwrap();
        assert!((avg.values()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((avg.values()[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!(verify_majorization_theorem(&rho, &m).unwrap());

        let terms = omega_decomposition(&rho, m.povm()).unwrap();
        let half = ComplexMatrix::real_diagonal(&[0.5, 0.5]).unwrap();
        assert!(terms[0].omega.matrix().max_abs_diff(&half) < 1e-12);
        assert!((terms[0].probability - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_and_projective_measurements() {
        let mut rng = instance_rng(13, 0);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let trivial = EfficientMeasurement::without_feedback(Povm::trivial(3).unwrap());
        let avg = average_posterior_spectrum(&rho, &trivial).unwrap();
        for (x, y) in avg.values().iter().zip(rho.spectrum().values()) {
            assert!((x - y).abs() < 1e-12);
        }
        let terms = omega_decomposition(&rho, trivial.povm()).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].omega.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        let proj = EfficientMeasurement::without_feedback(Povm::computational_basis(3).unwrap());
        let avg = average_posterior_spectrum(&rho, &proj).unwrap();
        assert!((avg.values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_is_trivially_majorized() {
        let mut rng = instance_rng(14, 0);
        let rho = random_density(3, 1, &mut rng).unwrap();
        let m = random_efficient_measurement(3, true, &mut rng).unwrap();
        let avg = average_posterior_spectrum(&rho, &m).unwrap();
        assert!((avg.values()[0] - 1.0).abs() < 1e-10);
        assert!(verify_majorization_theorem(&rho, &m).unwrap());
    }

    #[test]
    fn omega_route_agrees_with_posteriors() {
        let mut rng = instance_rng(15, 0);
        for i in 0..200 {
            let d = 2 + i % 3;
            let rho = random_density_any_rank(d, &mut rng).unwrap();
            let m = random_efficient_measurement(d, i % 2 == 0, &mut rng).unwrap();
            let terms = omega_decomposition(&rho, m.povm()).unwrap();
            let mut total = ComplexMatrix::zeros(d).unwrap();
            for t in &terms {
                total = &total + &t.omega.matrix().scale_real(t.probability);
                let post = posterior(&rho, &m, t.outcome_index).unwrap();
                for (x, y) in t
                    .omega
                    .spectrum()
                    .values()
                    .iter()
                    .zip(post.posterior.spectrum().values())
                {
                    assert!((x - y).abs() < 1e-10);
                }
            }
            assert!(total.max_abs_diff(rho.matrix()) < 1e-10);
            let check = check_theorem(&rho, &m).unwrap();
            assert!(check.direct_holds() && check.omega_holds());
        }
    }

    #[test]
    fn feedback_does_not_change_spectra() {
        let mut rng = instance_rng(16, 0);
        let rho = random_density(3, 3, &mut rng).unwrap();
        let base = random_efficient_measurement(3, false, &mut rng).unwrap();
        let feedback = (0..base.povm().len())
            .map(|_| haar_unitary(3, &mut rng))
            .collect::<Result<Vec<_>>>()
            .unwrap();
        let with = EfficientMeasurement::new(base.povm().clone(), feedback).unwrap();
        let a = average_posterior_spectrum(&rho, &base).unwrap();
        let b = average_posterior_spectrum(&rho, &with).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
