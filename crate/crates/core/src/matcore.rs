//! Small dense complex matrices and Hermitian eigendecomposition.
//!
//! Everything here targets dimensions 2..=8. The eigensolver is cyclic
//! Jacobi on the complex Hermitian matrix; PSD functions (square roots,
//! inverse square roots) are built on top of it by spectral mapping.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest supported dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension.
pub const MAX_DIM: usize = 8;
/// Default Hermiticity tolerance (max entrywise |H - H^dagger|).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL` are treated as zero when taking roots.
pub const PSD_TOL: f64 = 1e-12;
/// Unitarity tolerance (max entrywise |U^dagger U - I|).
pub const UNITARY_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square `dim x dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimOutOfRange(dim))
    }
}

impl ComplexMatrix {
    /// Build from row-major entries. Fails on unsupported dimension, wrong
    /// entry count or non-finite entries.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Build from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::new(dim, data)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::real_diagonal(&vec![1.0; dim])
    }

    pub fn real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimMismatch {
                expected: u.len(),
                got: v.len(),
            });
        }
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Projector onto the span of a (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        let norm2 = norm_sqr(v);
        Ok(Self::outer(v, v)?.scale_real(1.0 / norm2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.data[i * d + j] = self.data[j * d + i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `(self + self^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&adj.data)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `H - H^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise modulus of `U^dagger U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = &self.adjoint() * self;
        let id = Self::identity(self.dim).expect("dimension already validated");
        gram.max_abs_diff(&id)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Frobenius inner product `tr(self^dagger other)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self.data[i * d + k] * other.data[k * d + i];
            }
        }
        acc
    }

    /// `U self U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        ComplexMatrix { dim: d, data }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of a Hermitian operator, sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts the values into non-increasing order.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `sum_{i<=k} lambda_i` for `k = 1..=len`.
    pub fn partial_sums(&self) -> Vec<f64> {
        self.0
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    }

    /// Values clamped at zero; used by entropy-like functionals.
    pub fn clamped(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x.max(0.0)).collect()
    }
}

/// Eigendecomposition `H = V diag(lambda) V^dagger`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Spectrum,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.vectors.dim();
        let mapped: Vec<f64> = self.values.values().iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(d).expect("dimension already validated");
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for (k, &lam) in mapped.iter().enumerate() {
                    if lam != 0.0 {
                        acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * lam;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before iterating, so `tol` only gates the
/// Hermiticity check.
pub fn eig_hermitian(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let defect = h.hermiticity_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let d = h.dim();
    let mut a = h.hermitian_part();
    for i in 0..d {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(d)?;

    let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(HermitianEigen {
            values: Spectrum::new(vec![0.0; d]),
            vectors: v,
        });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off: f64 = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        // A sweep can stall at roundoff level without reaching the strict
        // threshold; accept anything within a few ulps of the scale.
        if off > 1e-14 * scale {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, j| v[(i, order[j])])?;
    Ok(HermitianEigen {
        values: Spectrum(values),
        vectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`: `a <- G^dagger a G`, `v <- v G`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane.
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;
    let g_qq = Complex64::new(c, 0.0);

    let d = a.dim();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

fn psd_eigen(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let eig = eig_hermitian(m, tol.max(HERMITIAN_TOL))?;
    let min = eig.values.values().last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPsd(min));
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix. Eigenvalues below `tol` are
/// clamped to zero, so projectors map to themselves.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eigen(m, tol)?;
    Ok(eig.map_values(|x| if x <= tol { 0.0 } else { x.sqrt() }))
}

/// Inverse square root of a positive definite matrix.
pub fn psd_inv_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = psd_eigen(m, tol)?;
    let min = eig.values.values().last().copied().unwrap_or(0.0);
    if min <= tol {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map_values(|x| 1.0 / x.sqrt()))
}

/// Pauli matrices `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).expect("static"),
        ComplexMatrix::new(2, vec![ZERO, -i, i, ZERO]).expect("static"),
        ComplexMatrix::new(2, vec![ONE, ZERO, ZERO, -ONE]).expect("static"),
    ]
}

/// `c0 I + v . sigma` on a qubit.
pub fn bloch_operator(c0: f64, v: [f64; 3]) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::new(
        2,
        vec![
            Complex64::new(c0 + v[2], 0.0),
            v[0] - i * v[1],
            v[0] + i * v[1],
            Complex64::new(c0 - v[2], 0.0),
        ],
    )
    .expect("finite inputs")
}

/// A unitary sending the unit vector `from` to the unit vector `to`.
///
/// Built as a Householder reflection times a global phase.
pub fn unitary_sending(from: &[Complex64], to: &[Complex64]) -> Result<ComplexMatrix> {
    let d = from.len();
    if to.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: to.len(),
        });
    }
    let overlap: Complex64 = to.iter().zip(from).map(|(t, f)| t.conj() * f).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    // Reflection H with H from = phase * to, then U = conj(phase) H.
    let target: Vec<Complex64> = to.iter().map(|t| t * phase).collect();
    let w: Vec<Complex64> = from.iter().zip(&target).map(|(f, t)| f - t).collect();
    let wn = norm_sqr(&w);
    let id = ComplexMatrix::identity(d)?;
    let h = if wn < 1e-28 {
        id
    } else {
        &id - &ComplexMatrix::outer(&w, &w)?.scale_real(2.0 / wn)
    };
    Ok(h.scale(phase.conj()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let eig = eig_hermitian(&ComplexMatrix::identity(2).unwrap(), HERMITIAN_TOL).unwrap();
        assert_eq!(eig.values.values(), &[1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let m = ComplexMatrix::real_diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let eig = eig_hermitian(&m, HERMITIAN_TOL).unwrap();
        assert_eq!(eig.values.values(), &[2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn complex_two_by_two() {
        // sigma_y has eigenvalues +-1.
        let [_, sy, _] = pauli();
        let eig = eig_hermitian(&sy, HERMITIAN_TOL).unwrap();
        assert!((eig.values.values()[0] - 1.0).abs() < 1e-15);
        assert!((eig.values.values()[1] + 1.0).abs() < 1e-15);
        assert!(eig.reconstruct().max_abs_diff(&sy) < 1e-14);
        assert!(eig.vectors.is_unitary(1e-14));
    }

    #[test]
    fn three_by_three_reconstruction() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let eig = eig_hermitian(&m, HERMITIAN_TOL).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&m) < 1e-13);
        let total: f64 = eig.values.total();
        assert!((total - 1.5).abs() < 1e-13);
        let v = eig.values.values();
        assert!(v.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real(2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            eig_hermitian(&m, HERMITIAN_TOL),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn zero_matrix() {
        let eig = eig_hermitian(&ComplexMatrix::zeros(3).unwrap(), HERMITIAN_TOL).unwrap();
        assert_eq!(eig.values.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let id = ComplexMatrix::identity(2).unwrap();
        assert!(psd_sqrt(&id, PSD_TOL).unwrap().max_abs_diff(&id) < 1e-15);
        let m = ComplexMatrix::real_diagonal(&[4.0, 9.0]).unwrap();
        let r = psd_sqrt(&m, PSD_TOL).unwrap();
        let expect = ComplexMatrix::real_diagonal(&[2.0, 3.0]).unwrap();
        assert!(r.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::real_diagonal(&[1.0, -0.1]).unwrap();
        assert!(matches!(psd_sqrt(&m, PSD_TOL), Err(Error::NotPsd(_))));
    }

    #[test]
    fn sqrt_of_projector_is_projector() {
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let p = ComplexMatrix::projector(&v).unwrap();
        assert!(psd_sqrt(&p, PSD_TOL).unwrap().max_abs_diff(&p) < 1e-14);
    }

    #[test]
    fn inverse_sqrt() {
        let m = ComplexMatrix::real_diagonal(&[4.0, 0.25]).unwrap();
        let r = psd_inv_sqrt(&m, PSD_TOL).unwrap();
        let expect = ComplexMatrix::real_diagonal(&[0.5, 2.0]).unwrap();
        assert!(r.max_abs_diff(&expect) < 1e-15);
        let singular = ComplexMatrix::real_diagonal(&[1.0, 0.0]).unwrap();
        assert!(psd_inv_sqrt(&singular, PSD_TOL).is_err());
    }

    #[test]
    fn bloch_operator_matches_pauli_sum() {
        let [sx, sy, sz] = pauli();
        let id = ComplexMatrix::identity(2).unwrap();
        let expect = &(&(&id.scale_real(0.5) + &sx.scale_real(0.1)) + &sy.scale_real(-0.2))
            + &sz.scale_real(0.3);
        assert!(bloch_operator(0.5, [0.1, -0.2, 0.3]).max_abs_diff(&expect) < 1e-16);
    }

    #[test]
    fn householder_sends_vector() {
        let from = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let s = 1.0 / 3f64.sqrt();
        let to = [c(s, 0.0), c(0.0, s), c(-s, 0.0)];
        let u = unitary_sending(&from, &to).unwrap();
        assert!(u.is_unitary(1e-14));
        let img = u.matvec(&from);
        for (a, b) in img.iter().zip(&to) {
            assert!((a - b).norm() < 1e-14);
        }
        let same = unitary_sending(&to, &to).unwrap();
        let img = same.matvec(&to);
        for (a, b) in img.iter().zip(&to) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn dimension_bounds() {
        assert!(matches!(
            ComplexMatrix::zeros(1),
            Err(Error::DimOutOfRange(1))
        ));
        assert!(matches!(
            ComplexMatrix::zeros(9),
            Err(Error::DimOutOfRange(9))
        ));
        assert!(ComplexMatrix::from_real(2, &[1.0, 2.0, 3.0]).is_err());
        assert!(matches!(
            ComplexMatrix::from_real(2, &[1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn spectrum_partial_sums() {
        let s = Spectrum::new(vec![0.2, 0.5, 0.3]);
        assert_eq!(s.values(), &[0.5, 0.3, 0.2]);
        let ps = s.partial_sums();
        assert!((ps[2] - 1.0).abs() < 1e-15);
        assert!((ps[0] - 0.5).abs() < 1e-15);
    }
}
