//! Dense complex linear algebra for the 2-, 4- and 8-dimensional operators
//! used throughout the crate.
//!
//! Everything here is value-semantic: operations take references and return
//! new matrices. The two-qubit basis order is `{|11⟩, |10⟩, |01⟩, |00⟩}` and
//! the single-qubit order is `{|1⟩, |0⟩}` with `|1⟩` = spin up, so
//! `σᶻ = diag(1, -1)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Tolerance for structural checks (Hermiticity, unit trace, positivity).
pub const STRUCTURE_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = real(1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from rows of real entries. Panics on ragged input;
    /// meant for literal constants.
    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        let data = rows.iter().flatten().map(|&x| real(x)).collect();
        Self {
            rows: rows.len(),
            cols: N,
            data,
        }
    }

    pub fn from_rows<const N: usize>(rows: &[[Complex; N]]) -> Self {
        let data = rows.iter().flatten().copied().collect();
        Self {
            rows: rows.len(),
            cols: N,
            data,
        }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = real(v);
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Complex], b: &[Complex]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[Complex]) -> Self {
        Self::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Checks the density-matrix contract: Hermitian, unit trace and
    /// positive semidefinite, all to [`STRUCTURE_TOL`].
    pub fn validate_density(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}x{} is not square",
                self.rows, self.cols
            )));
        }
        let dev = self.hermiticity_deviation();
        if dev > STRUCTURE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = self.trace();
        if (tr - real(1.0)).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let eig = hermitian_eig(self)?;
        let min = eig.values[0];
        if min < -STRUCTURE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub mod pauli {
    use super::{c, real, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[real(0.0), c(0.0, -1.0)], [c(0.0, 1.0), real(0.0)]])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
    }
}

/// Kronecker product; the first factor indexes blocks.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors.
pub fn kron_vec(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists subsystem dimensions with the first entry most significant,
/// matching [`kron`]. The kept subsystems appear in the result in increasing
/// index order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not multiply to {}",
            m.rows
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem index {k} out of range for {} subsystems",
                dims.len()
            )));
        }
        if kept[k] {
            return Err(Error::DimensionMismatch(format!("subsystem {k} listed twice")));
        }
        kept[k] = true;
    }

    let kept_dims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let traced_dims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_dim: usize = traced_dims.iter().product();

    // Full index from a kept multi-index and a traced multi-index.
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut k_digits = digits(kept_idx, &kept_dims);
        let mut t_digits = digits(traced_idx, &traced_dims);
        k_digits.reverse();
        t_digits.reverse();
        let mut full = 0;
        for (i, &d) in dims.iter().enumerate() {
            let digit = if kept[i] {
                k_digits.pop().unwrap()
            } else {
                t_digits.pop().unwrap()
            };
            full = full * d + digit;
        }
        full
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for col in 0..out_dim {
            let mut acc = Complex::new(0.0, 0.0);
            for t in 0..traced_dim {
                acc += m[(compose(r, t), compose(col, t))];
            }
            out[(r, col)] = acc;
        }
    }
    Ok(out)
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V·diag(f(λ))·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * weights[k]).sum();
            }
        }
        out
    }
}

/// Eigendecomposition of a small Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > STRUCTURE_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows;
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = real(m[(i, i)].re);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(Eigen { values, vectors })
}

/// Applies one Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible against both diagonal entries: zero it outright.
    if mag <= f64::EPSILON * 1e-3 * app.abs().min(aqq.abs()) {
        a[(p, q)] = real(0.0);
        a[(q, p)] = real(0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let n = a.rows;

    // G = D·J with D = diag(1, e^{-iα}) on (p, q): G_pp = c, G_pq = s,
    // G_qp = -s e^{-iα}, G_qq = c e^{-iα}.
    let g_qp = -phase.conj() * sn;
    let g_qq = phase.conj() * cs;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs + akq * g_qp;
        a[(k, q)] = akp * sn + akq * g_qq;

        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs + vkq * g_qp;
        v[(k, q)] = vkp * sn + vkq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs + aqk * g_qp.conj();
        a[(q, k)] = apk * sn + aqk * g_qq.conj();
    }
    a[(p, q)] = real(0.0);
    a[(q, p)] = real(0.0);
    a[(p, p)] = real(a[(p, p)].re);
    a[(q, q)] = real(a[(q, q)].re);
}

/// Applies `f` to the spectrum of a Hermitian matrix. Fails if `f` yields a
/// non-finite value on any eigenvalue.
pub fn matrix_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&bad) = eig.values.iter().find(|&&l| !f(l).is_finite()) {
        return Err(Error::FunctionDomain { eigenvalue: bad });
    }
    Ok(eig.reconstruct_with(f))
}

/// Square root of a positive semidefinite matrix; eigenvalues in
/// `[-STRUCTURE_TOL, 0)` are treated as zero.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function(m, clamped_sqrt)
}

pub(crate) fn clamped_sqrt(x: f64) -> f64 {
    if x >= 0.0 {
        x.sqrt()
    } else if x >= -STRUCTURE_TOL {
        0.0
    } else {
        f64::NAN
    }
}

/// Singular values in descending order, read off the spectrum of the
/// Hermitian dilation `[[0, A], [A†, 0]]`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (r, cl) = (a.rows, a.cols);
    let n = r + cl;
    let mut dilation = ComplexMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..cl {
            dilation[(i, r + j)] = a[(i, j)];
            dilation[(r + j, i)] = a[(i, j)].conj();
        }
    }
    let eig = hermitian_eig(&dilation)?;
    let k = r.min(cl);
    Ok(eig.values.iter().rev().take(k).map(|&s| s.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_psi_minus() -> Vec<Complex> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![real(0.0), real(h), real(-h), real(0.0)]
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i4 = kron(&pauli::identity(), &pauli::identity());
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma_z_identity_is_block_diagonal() {
        let m = kron(&pauli::z(), &pauli::identity());
        assert_eq!(m, ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let rho = ComplexMatrix::projector(&bell_psi_minus());
        let reduced = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        let reduced = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_keeps_last_factor() {
        let a = ComplexMatrix::diag_real(&[0.3, 0.7]);
        let b = ComplexMatrix::from_rows(&[[real(0.6), c(0.1, 0.2)], [c(0.1, -0.2), real(0.4)]]);
        let cc = ComplexMatrix::from_rows(&[[real(0.25), c(0.0, 0.3)], [c(0.0, -0.3), real(0.75)]]);
        let abc = kron(&kron(&a, &b), &cc);
        let reduced = partial_trace(&abc, &[2, 2, 2], &[2]).unwrap();
        assert!(reduced.max_abs_diff(&cc) < 1e-15);
        let reduced = partial_trace(&abc, &[2, 2, 2], &[0, 2]).unwrap();
        assert!(reduced.max_abs_diff(&kron(&a, &cc)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[2]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&ComplexMatrix::zeros(2, 4), &[2, 2], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn eig_of_diagonal_sorts_and_permutes_basis() {
        let eig = hermitian_eig(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(eig.vectors.column(0), vec![real(0.0), real(1.0), real(0.0)]);
        assert_eq!(eig.vectors.column(1), vec![real(0.0), real(0.0), real(1.0)]);
        assert_eq!(eig.vectors.column(2), vec![real(1.0), real(0.0), real(0.0)]);
    }

    #[test]
    fn pauli_spectra() {
        for p in [pauli::x(), pauli::y(), pauli::z()] {
            let eig = hermitian_eig(&p).unwrap();
            assert!((eig.values[0] + 1.0).abs() < 1e-14);
            assert!((eig.values[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn matrix_function_basic_cases() {
        let e = matrix_function(&ComplexMatrix::zeros(3, 3), f64::exp).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let s = matrix_function(&ComplexMatrix::diag_real(&[4.0, 9.0]), f64::sqrt).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn matrix_function_reports_domain_errors() {
        let m = ComplexMatrix::diag_real(&[1.0, -0.5]);
        assert!(matches!(
            matrix_function(&m, f64::sqrt),
            Err(Error::FunctionDomain { eigenvalue }) if eigenvalue == -0.5
        ));
        // Roundoff-sized negatives are clamped by the PSD square root.
        let m = ComplexMatrix::diag_real(&[1.0, -1e-14]);
        let s = sqrt_psd(&m).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn singular_values_of_known_matrix() {
        let a = ComplexMatrix::from_real_rows(&[[3.0, 0.0], [0.0, -4.0]]);
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn validate_density_catches_each_defect() {
        assert!(ComplexMatrix::identity(2).scale(0.5).validate_density().is_ok());
        assert!(ComplexMatrix::identity(2).validate_density().is_err());
        assert!(ComplexMatrix::diag_real(&[1.5, -0.5]).validate_density().is_err());
        let skew = ComplexMatrix::from_real_rows(&[[0.5, 0.1], [0.0, 0.5]]);
        assert!(skew.validate_density().is_err());
    }
}
