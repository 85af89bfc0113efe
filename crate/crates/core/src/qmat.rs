//! Small dense complex linear algebra: Kronecker products, order-aware partial
//! traces over labelled qubits, and a cyclic Jacobi eigensolver for Hermitian
//! matrices.
//!
//! Basis ordering follows ket notation: the leftmost qubit of a register is
//! the most significant bit of a basis index.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermiticity tolerance shared by every check in the crate.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below this magnitude count as zero when determining rank.
pub const RANK_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Subsystem names used by the inertial parties and the Rindler modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Qubit {
    A,
    B,
    C,
    /// Region-I mode of the accelerated party (single-mode channel).
    I,
    /// Region-II mode, inaccessible to the accelerated party.
    II,
    IPlus,
    IMinus,
    IIPlus,
    IIMinus,
}

impl Qubit {
    pub fn as_str(self) -> &'static str {
        match self {
            Qubit::A => "A",
            Qubit::B => "B",
            Qubit::C => "C",
            Qubit::I => "I",
            Qubit::II => "II",
            Qubit::IPlus => "I+",
            Qubit::IMinus => "I-",
            Qubit::IIPlus => "II+",
            Qubit::IIMinus => "II-",
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Qubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "A" | "a" => Qubit::A,
            "B" | "b" => Qubit::B,
            "C" | "c" => Qubit::C,
            "I" => Qubit::I,
            "II" => Qubit::II,
            "I+" | "I⁺" => Qubit::IPlus,
            "I-" | "I⁻" => Qubit::IMinus,
            "II+" | "II⁺" => Qubit::IIPlus,
            "II-" | "II⁻" => Qubit::IIMinus,
            other => return Err(Error::Parse(format!("unknown qubit label {other:?}"))),
        })
    }
}

impl TryFrom<String> for Qubit {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Qubit> for String {
    fn from(q: Qubit) -> String {
        q.as_str().to_string()
    }
}

/// An ordered list of distinct qubit labels. The position of a label is its
/// index in the tensor ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Qubit>", into = "Vec<Qubit>")]
pub struct Register(Vec<Qubit>);

impl Register {
    pub fn new(labels: Vec<Qubit>) -> Result<Self> {
        for (i, q) in labels.iter().enumerate() {
            if labels[..i].contains(q) {
                return Err(Error::DuplicateLabel(*q));
            }
        }
        Ok(Register(labels))
    }

    pub fn abc() -> Self {
        Register(vec![Qubit::A, Qubit::B, Qubit::C])
    }

    pub fn ab() -> Self {
        Register(vec![Qubit::A, Qubit::B])
    }

    /// The first `n` of A, B, C.
    pub fn parties(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Register(vec![Qubit::A])),
            2 => Ok(Self::ab()),
            3 => Ok(Self::abc()),
            _ => Err(Error::InvalidParams(format!(
                "party registers have 1 to 3 qubits, got {n}"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.0.len()
    }

    pub fn labels(&self) -> &[Qubit] {
        &self.0
    }

    pub fn position(&self, q: Qubit) -> Result<usize> {
        self.0.iter().position(|&x| x == q).ok_or(Error::UnknownLabel(q))
    }

    pub fn contains(&self, q: Qubit) -> bool {
        self.0.contains(&q)
    }

    /// Bit shift of the qubit at `position` inside a basis index.
    pub fn shift(&self, position: usize) -> usize {
        self.0.len() - 1 - position
    }

    pub(crate) fn replace(&mut self, old: Qubit, new: Qubit) -> Result<()> {
        let pos = self.position(old)?;
        if self.contains(new) {
            return Err(Error::DuplicateLabel(new));
        }
        self.0[pos] = new;
        Ok(())
    }

    pub(crate) fn push(&mut self, q: Qubit) -> Result<()> {
        if self.contains(q) {
            return Err(Error::DuplicateLabel(q));
        }
        self.0.push(q);
        Ok(())
    }
}

impl TryFrom<Vec<Qubit>> for Register {
    type Error = Error;

    fn try_from(v: Vec<Qubit>) -> Result<Self> {
        Register::new(v)
    }
}

impl From<Register> for Vec<Qubit> {
    fn from(r: Register) -> Vec<Qubit> {
        r.0
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.0 {
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `M = M†`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
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

/// Kronecker product; `a` indexes the slow-varying blocks.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Kronecker product of two state vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Reduce `rho` onto `keep`, summing over every other qubit of `register`.
///
/// Kept qubits appear in the order they have in `register`, irrespective of
/// the order of `keep`. The returned register lists them in that order.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[Qubit], register: &Register) -> Result<(ComplexMatrix, Register)> {
    let n = register.len();
    if !rho.is_square() || rho.rows() != register.dim() {
        return Err(Error::DimensionMismatch {
            expected: register.dim(),
            actual: rho.rows(),
        });
    }
    for q in keep {
        register.position(*q)?;
    }
    let kept_pos: Vec<usize> = (0..n).filter(|&p| keep.contains(&register.labels()[p])).collect();
    let traced_pos: Vec<usize> = (0..n).filter(|p| !kept_pos.contains(p)).collect();
    let kept_register = Register::new(kept_pos.iter().map(|&p| register.labels()[p]).collect())?;

    // Scatter a compact index over `positions` into a full basis index.
    let scatter = |compact: usize, positions: &[usize]| -> usize {
        let m = positions.len();
        positions.iter().enumerate().fold(0, |acc, (k, &p)| {
            let bit = (compact >> (m - 1 - k)) & 1;
            acc | (bit << register.shift(p))
        })
    };

    let dk = 1 << kept_pos.len();
    let dt = 1 << traced_pos.len();
    let kept_idx: Vec<usize> = (0..dk).map(|i| scatter(i, &kept_pos)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| scatter(t, &traced_pos)).collect();

    let out = ComplexMatrix::from_fn(dk, dk, |i, j| {
        traced_idx
            .iter()
            .map(|&t| rho[(kept_idx[i] | t, kept_idx[j] | t)])
            .sum()
    });
    Ok((out, kept_register))
}

/// Result of [`eig_hermitian`]: eigenvalues in descending order, eigenvectors
/// as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    pub fn rank(&self) -> usize {
        self.values.iter().filter(|w| w.abs() > RANK_TOL).count()
    }

    /// `Σ f(w_k) v_k v_k†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            if fw == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * fw;
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigen { values, vectors })
}

/// One two-sided rotation `A ← U†AU`, `V ← VU` zeroing `A[p][q]`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b < 1e-300 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let u_pp = c64(c, 0.0);
    let u_pq = c64(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = c64(0.0, 0.0);
    a[(q, p)] = c64(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues within `-RANK_TOL` of zero are clamped.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    if let Some(&w) = eig.values.last() {
        if w < -RANK_TOL {
            return Err(Error::InvariantViolation(format!(
                "matrix is not positive semidefinite (eigenvalue {w:e})"
            )));
        }
    }
    Ok(eig.reconstruct_with(|w| w.max(0.0).sqrt()))
}

/// Singular values in descending order by one-sided Jacobi, which keeps
/// small singular values accurate to roughly machine precision times the
/// largest one.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(&cols[p]);
                let beta = norm_sqr(&cols[q]);
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < 1e-300 {
                    continue;
                }
                rotated = true;
                // rephase column q so the pair's Gram matrix is real
                let ph = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = c * t;
                let (head, tail) = cols.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (a, b) = (*x, *y * ph);
                    *x = a * c - b * s;
                    *y = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)]).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ket(bits: &[usize]) -> Vec<Complex64> {
        let idx = bits.iter().fold(0, |acc, b| (acc << 1) | b);
        let mut v = vec![c64(0.0, 0.0); 1 << bits.len()];
        v[idx] = c64(1.0, 0.0);
        v
    }

    fn random_hermitian(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
        let mut it = entries.iter().cycle();
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            let (re, im) = it.next().unwrap();
            c64(*re, *im)
        });
        &raw + &raw.adjoint()
    }

    fn random_density(n_qubits: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
        let n = 1 << n_qubits;
        let mut it = entries.iter().cycle();
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            let (re, im) = it.next().unwrap();
            c64(*re, *im)
        });
        let rho = &g * &g.adjoint();
        let tr = rho.trace().re;
        rho.scale(c64(1.0 / tr, 0.0))
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));

        let p0 = ComplexMatrix::outer(&ket(&[0]));
        let p1 = ComplexMatrix::outer(&ket(&[1]));
        assert_eq!(tensor(&p0, &p1), ComplexMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn sigma_y_kron_sigma_y_is_antidiagonal() {
        let yy = tensor(&pauli_y(), &pauli_y());
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert!(yy.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)];
        let (red, reg) = partial_trace(&ComplexMatrix::outer(&bell), &[Qubit::A], &Register::ab()).unwrap();
        assert_eq!(reg.labels(), &[Qubit::A]);
        assert!(red.max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_register_order() {
        // |0⟩_A |1⟩_B |+⟩_C, keep [C, A] -> order A, C
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![c64(s, 0.0), c64(s, 0.0)];
        let psi = tensor_vec(&tensor_vec(&ket(&[0]), &ket(&[1])), &plus);
        let (red, reg) = partial_trace(&ComplexMatrix::outer(&psi), &[Qubit::C, Qubit::A], &Register::abc()).unwrap();
        assert_eq!(reg.labels(), &[Qubit::A, Qubit::C]);
        let expected = tensor(&ComplexMatrix::outer(&ket(&[0])), &ComplexMatrix::outer(&plus));
        assert!(red.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&rho, &[Qubit::A], &Register::abc()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            partial_trace(&rho, &[Qubit::C], &Register::ab()),
            Err(Error::UnknownLabel(Qubit::C))
        ));
    }

    #[test]
    fn eig_diagonal_and_maximally_mixed() {
        let e = eig_hermitian(&ComplexMatrix::diag(&[0.25, 0.75])).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);

        let e = eig_hermitian(&ComplexMatrix::identity(4).scale(c64(0.25, 0.0))).unwrap();
        for w in e.values {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_complex_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let m =
            ComplexMatrix::from_vec(2, 2, vec![c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)]).unwrap();
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = e.vector(0);
        let mv = m.mul_vec(&v);
        for k in 0..2 {
            assert!((mv[k] - v[k] * 3.0).norm() < 1e-13);
        }
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let rho = random_density(2, &[(0.3, 0.1), (-0.7, 0.2), (0.5, -0.4), (0.9, 0.05), (0.1, 0.6)]);
        let s = sqrt_psd(&rho).unwrap();
        assert!((&s * &s).max_abs_diff(&rho) < 1e-12);
    }

    fn entries(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
    }

    proptest! {
        #[test]
        fn partial_trace_preserves_trace_and_hermiticity(e in entries(64), mask in 0usize..8) {
            let rho = random_density(3, &e);
            let reg = Register::abc();
            let keep: Vec<Qubit> = reg.labels().iter().enumerate()
                .filter(|(p, _)| mask >> p & 1 == 1).map(|(_, q)| *q).collect();
            let (red, _) = partial_trace(&rho, &keep, &reg).unwrap();
            prop_assert!((red.trace() - rho.trace()).norm() < 1e-12);
            prop_assert!(red.hermitian_deviation() == 0.0 || red.hermitian_deviation() < 1e-15);
        }

        #[test]
        fn partial_trace_extremes(e in entries(16)) {
            let rho = random_density(2, &e);
            let reg = Register::ab();
            let (all, _) = partial_trace(&rho, &[Qubit::A, Qubit::B], &reg).unwrap();
            prop_assert_eq!(&all, &rho);
            let (none, r) = partial_trace(&rho, &[], &reg).unwrap();
            prop_assert!(r.is_empty());
            prop_assert_eq!(none.rows(), 1);
            prop_assert!((none[(0, 0)] - rho.trace()).norm() < 1e-15);
        }

        #[test]
        fn eig_reconstructs(e in entries(64), n in 1usize..9) {
            let m = random_hermitian(n, &e);
            let eig = eig_hermitian(&m).unwrap();
            prop_assert!(eig.reconstruct_with(|w| w).max_abs_diff(&m) < 1e-9);
            prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
            let vtv = &eig.vectors.adjoint() * &eig.vectors;
            prop_assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
            for k in 0..n {
                let v = eig.vector(k);
                let mv = m.mul_vec(&v);
                for i in 0..n {
                    prop_assert!((mv[i] - v[i] * eig.values[k]).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn tensor_is_associative(a in entries(4), b in entries(9), c in entries(4)) {
            let ma = ComplexMatrix::from_vec(2, 2, a.iter().map(|(x, y)| c64(*x, *y)).collect()).unwrap();
            let mb = ComplexMatrix::from_vec(3, 3, b.iter().map(|(x, y)| c64(*x, *y)).collect()).unwrap();
            let mc = ComplexMatrix::from_vec(2, 2, c.iter().map(|(x, y)| c64(*x, *y)).collect()).unwrap();
            let left = tensor(&tensor(&ma, &mb), &mc);
            let right = tensor(&ma, &tensor(&mb, &mc));
            prop_assert!(left.max_abs_diff(&right) < 1e-15);
        }
    }
}
