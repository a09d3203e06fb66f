//! Density operators, qubit Bloch vectors and the knowledge functionals.
//!
//! All entropies are in bits. The functionals depend on the state only
//! through its spectrum, which is computed once when a [`DensityOperator`]
//! is validated.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::ensemble::haar_unitary;
use crate::error::{Error, Result};
use crate::matcore::{bloch_operator, eig_hermitian, ComplexMatrix, Spectrum};
use crate::measure::Povm;

/// Tolerance for the Hermitian, unit-trace and PSD checks on states.
pub const STATE_TOL: f64 = 1e-12;

/// Eigenvalues below this are treated as exact zeros by the subentropy.
const SUBENTROPY_ZERO: f64 = 1e-20;

/// A validated `d x d` density operator.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-12).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eig = eig_hermitian(&matrix, STATE_TOL)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min = eig.values.values().last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            spectrum: eig.values,
        })
    }

    /// Normalizes a PSD operator by its trace.
    pub(crate) fn from_unnormalized(m: &ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        Self::new(m.hermitian_part().scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::real_diagonal(probs)?)
    }

    /// `|psi><psi|` for a nonzero vector (normalized here).
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(psi)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u).hermitian_part())
    }

    /// `p self + (1 - p) other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(&self.matrix.scale_real(p) + &other.matrix.scale_real(1.0 - p))
    }
}

/// Real Bloch vector of a qubit state, `rho = (I + a . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn modulus(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

pub fn from_bloch(v: BlochVector) -> Result<DensityOperator> {
    let a = v.modulus();
    if a > 1.0 + STATE_TOL {
        return Err(Error::BlochOutOfBall(a));
    }
    let half = [0.5 * v.x, 0.5 * v.y, 0.5 * v.z];
    DensityOperator::new(bloch_operator(0.5, half))
}

/// Bloch vector of a qubit state, `a_i = tr(rho sigma_i)`.
pub fn to_bloch(rho: &DensityOperator) -> Result<BlochVector> {
    bloch_components(rho.matrix())
        .map(|(_, v)| BlochVector::new(2.0 * v[0], 2.0 * v[1], 2.0 * v[2]))
}

/// Decomposes a Hermitian qubit operator as `c0 I + v . sigma`.
pub fn bloch_components(m: &ComplexMatrix) -> Result<(f64, [f64; 3])> {
    if m.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            got: m.dim(),
        });
    }
    let c0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let vz = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let off = m[(1, 0)];
    Ok((c0, [off.re, off.im, vz]))
}

/// `P(rho) = 1 - tr rho^2`.
pub fn impurity(rho: &DensityOperator) -> f64 {
    1.0 - rho.purity()
}

/// Von Neumann entropy in bits; zero eigenvalues contribute nothing.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    von_neumann_of_spectrum(&rho.spectrum().clamped())
}

pub fn von_neumann_of_spectrum(probs: &[f64]) -> f64 {
    shannon_of_probs(probs)
}

fn shannon_of_probs(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy (bits) of the outcome distribution of `povm` on `rho`.
pub fn shannon_entropy(rho: &DensityOperator, povm: &Povm) -> Result<f64> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: povm.dim(),
        });
    }
    let probs: Vec<f64> = povm
        .effects()
        .iter()
        .map(|e| rho.matrix().trace_product(e).re.clamp(0.0, 1.0))
        .collect();
    Ok(shannon_of_probs(&probs))
}

/// Subentropy in bits.
///
/// Evaluated through the integral representation
///
/// ```text
/// Q = (1/ln 2) * int_0^inf  sum_{k>=2} e_k(lambda) w^(k-2)
///                           / ((1 + w) prod_i (1 + lambda_i w))  dw
/// ```
///
/// where `e_k` are the elementary symmetric polynomials of the
/// eigenvalues. It equals the divided-difference form
/// `-sum_k prod_{i!=k} lambda_k/(lambda_k - lambda_i) lambda_k log lambda_k`
/// for distinct eigenvalues and its continuous extension when some
/// coincide, so degenerate spectra need no special handling.
pub fn subentropy(rho: &DensityOperator) -> f64 {
    subentropy_of_spectrum(&rho.spectrum().clamped())
}

pub fn subentropy_of_spectrum(probs: &[f64]) -> f64 {
    let total: f64 = probs.iter().map(|&p| p.max(0.0)).sum();
    let lam: Vec<f64> = probs
        .iter()
        .map(|&p| p.max(0.0) / total)
        .filter(|&p| p > SUBENTROPY_ZERO)
        .collect();
    if lam.len() < 2 {
        return 0.0;
    }
    // Elementary symmetric polynomials e_0..e_r.
    let mut e = vec![0.0; lam.len() + 1];
    e[0] = 1.0;
    for &l in &lam {
        for k in (1..e.len()).rev() {
            e[k] += l * e[k - 1];
        }
    }
    let lam_min = lam.iter().copied().fold(f64::INFINITY, f64::min);

    // Substituting w = exp(v) makes the integrand analytic in the strip
    // |Im v| < pi, so the trapezoid rule converges geometrically. It
    // decays like exp(v) on the left and exp(-2v) right of -ln(lam_min).
    const STEP: f64 = 0.4;
    let v_lo = -45.0;
    let v_hi = (-lam_min.ln()).max(0.0) + 25.0;
    let n = ((v_hi - v_lo) / STEP).ceil() as usize;
    let mut acc = 0.0;
    for i in 0..=n {
        let v = v_lo + STEP * i as f64;
        let w = v.exp();
        let mut num = 0.0;
        for &ek in e[2..].iter().rev() {
            num = num * w + ek;
        }
        let den = (1.0 + w) * lam.iter().map(|&l| 1.0 + l * w).product::<f64>();
        acc += w * num / den;
    }
    (acc * STEP / std::f64::consts::LN_2).max(0.0)
}

/// `1/2 + 1/3 + ... + 1/d`.
pub fn harmonic_tail(dim: usize) -> f64 {
    (2..=dim).map(|k| 1.0 / k as f64).sum()
}

/// Mean outcome entropy over Haar-random projective measurements, in bits.
pub fn mean_measurement_entropy(rho: &DensityOperator) -> f64 {
    mean_entropy_of_spectrum(&rho.spectrum().clamped())
}

pub fn mean_entropy_of_spectrum(probs: &[f64]) -> f64 {
    harmonic_tail(probs.len()) / std::f64::consts::LN_2 + subentropy_of_spectrum(probs)
}

/// Monte Carlo estimate of the mean outcome entropy over Haar-random
/// orthonormal bases. Returns `(mean, standard error)`.
pub fn monte_carlo_mean_entropy<R: Rng + ?Sized>(
    rho: &DensityOperator,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let d = rho.dim();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut probs = vec![0.0; d];
    for _ in 0..samples {
        let u = haar_unitary(d, rng)?;
        for (j, p) in probs.iter_mut().enumerate() {
            let col = u.column(j);
            let rc = rho.matrix().matvec(&col);
            *p = col
                .iter()
                .zip(&rc)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .re
                .clamp(0.0, 1.0);
        }
        let h = shannon_of_probs(&probs);
        sum += h;
        sum_sq += h * h;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// The unitarily invariant functionals measuring ignorance of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    /// `P`, the impurity `1 - tr rho^2`.
    Impurity,
    /// `S`, the von Neumann entropy.
    VonNeumann,
    /// `Q`, the subentropy.
    Subentropy,
    /// `Hbar`, the mean measurement entropy.
    MeanEntropy,
}

impl Functional {
    pub const CONCAVE: [Functional; 3] = [
        Functional::Impurity,
        Functional::VonNeumann,
        Functional::Subentropy,
    ];

    pub fn evaluate(self, rho: &DensityOperator) -> f64 {
        match self {
            Functional::Impurity => impurity(rho),
            Functional::VonNeumann => von_neumann_entropy(rho),
            Functional::Subentropy => subentropy(rho),
            Functional::MeanEntropy => mean_measurement_entropy(rho),
        }
    }

    /// Evaluates on a probability vector interpreted as a spectrum.
    pub fn of_spectrum(self, probs: &[f64]) -> f64 {
        match self {
            Functional::Impurity => 1.0 - probs.iter().map(|p| p * p).sum::<f64>(),
            Functional::VonNeumann => von_neumann_of_spectrum(probs),
            Functional::Subentropy => subentropy_of_spectrum(probs),
            Functional::MeanEntropy => mean_entropy_of_spectrum(probs),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Functional::Impurity => "P",
            Functional::VonNeumann => "S",
            Functional::Subentropy => "Q",
            Functional::MeanEntropy => "Hbar",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Functional {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "P" | "p" | "impurity" => Ok(Functional::Impurity),
            "S" | "s" | "entropy" => Ok(Functional::VonNeumann),
            "Q" | "q" | "subentropy" => Ok(Functional::Subentropy),
            "Hbar" | "hbar" | "H" => Ok(Functional::MeanEntropy),
            other => Err(format!(
                "unknown functional '{other}' (expected P, S, Q or Hbar)"
            )),
        }
    }
}
