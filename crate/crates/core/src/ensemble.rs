//! Seeded random ensembles: Haar unitaries, density operators, POVMs and
//! efficient measurements.
//!
//! Every sampler takes an explicit `Rng`. Batch drivers derive one
//! independent ChaCha stream per instance index so results do not depend
//! on how instances are scheduled across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matcore::{norm_sqr, psd_inv_sqrt, ComplexMatrix, PSD_TOL};
use crate::measure::{EfficientMeasurement, Povm};
use crate::states::{BlochVector, DensityOperator};

/// Default seed when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// The RNG for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// `dim x dim` matrix of iid standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    ComplexMatrix::from_fn(dim, |_, _| gaussian(rng))
}

/// Haar-random unitary: Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let g = ginibre(dim, rng)?;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // Two passes of modified Gram-Schmidt keep orthogonality at roundoff.
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = norm_sqr(&v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Random PSD matrix `G P G^dagger` of the given rank, `P` projecting onto
/// the first `rank` coordinates.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let g = ginibre(dim, rng)?;
    let mut m = ComplexMatrix::zeros(dim)?;
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = (0..rank.min(dim))
                .map(|k| g[(i, k)] * g[(j, k)].conj())
                .sum();
        }
    }
    Ok(m.hermitian_part())
}

/// Random density operator of the given rank (Ginibre-induced measure).
pub fn random_density<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    let m = random_psd(dim, rank, rng)?;
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr))
}

/// Random density operator whose rank is itself drawn uniformly.
pub fn random_density_any_rank<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    let rank = rng.random_range(1..=dim);
    random_density(dim, rank, rng)
}

/// Random probability vector, uniform on the simplex.
pub fn random_spectrum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Random Bloch vector, uniform in the unit ball.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return BlochVector::new(v[0], v[1], v[2]);
        }
    }
}

/// Random POVM: draw PSD matrices `M_b` and normalize them as
/// `S^{-1/2} M_b S^{-1/2}` with `S = sum_b M_b`.
///
/// When `full_rank` is false each seed matrix gets a random rank (the
/// ranks always sum to at least `dim`), so infinite-strength measurements
/// appear in the ensemble too.
pub fn random_povm<R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    full_rank: bool,
    rng: &mut R,
) -> Result<Povm> {
    let mut ranks: Vec<usize> = (0..outcomes)
        .map(|_| {
            if full_rank {
                dim
            } else {
                rng.random_range(1..=dim)
            }
        })
        .collect();
    // The seeds must span the whole space for S to be invertible.
    let total_rank: usize = ranks.iter().sum();
    if total_rank < dim {
        if let Some(last) = ranks.last_mut() {
            *last += dim - total_rank;
        }
    }
    let seeds: Vec<ComplexMatrix> = ranks
        .into_iter()
        .map(|rank| random_psd(dim, rank, rng))
        .collect::<Result<_>>()?;
    let mut total = ComplexMatrix::zeros(dim)?;
    for m in &seeds {
        total = &total + m;
    }
    let w = psd_inv_sqrt(&total, PSD_TOL)?;
    let effects = seeds
        .iter()
        .map(|m| (&(&w * m) * &w).hermitian_part())
        .collect();
    Povm::new(effects)
}

/// Random efficient measurement with 2..=4 outcomes; feedback unitaries
/// are Haar-random when `with_feedback` is set, identities otherwise.
pub fn random_efficient_measurement<R: Rng + ?Sized>(
    dim: usize,
    with_feedback: bool,
    rng: &mut R,
) -> Result<EfficientMeasurement> {
    let outcomes = rng.random_range(2..=4);
    let full_rank = rng.random_bool(0.5);
    let povm = random_povm(dim, outcomes, full_rank, rng)?;
    if with_feedback {
        let feedback = (0..outcomes)
            .map(|_| haar_unitary(dim, rng))
            .collect::<Result<_>>()?;
        EfficientMeasurement::new(povm, feedback)
    } else {
        Ok(EfficientMeasurement::without_feedback(povm))
    }
}
