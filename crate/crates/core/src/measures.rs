//! Concurrence, three-tangle and the monogamy residual.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{self, c64, tensor, ComplexMatrix, Qubit, RANK_TOL};
use crate::states::{AcinParams, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Concurrence,
    ThreeTangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureResult {
    pub value: f64,
    pub kind: MeasureKind,
    pub provenance: Provenance,
}

impl MeasureResult {
    pub(crate) fn new(value: f64, kind: MeasureKind, provenance: Provenance) -> Result<Self> {
        if !(value.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&value)) {
            return Err(Error::InvariantViolation(format!(
                "{kind} value {value} outside [0, 1]"
            )));
        }
        Ok(MeasureResult {
            value: value.max(0.0),
            kind,
            provenance,
        })
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::ThreeTangle => "three-tangle",
        })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Optimized => "optimized",
        })
    }
}

fn require_qubits(n: usize, expected: usize) -> Result<()> {
    if n != expected {
        return Err(Error::WrongRegisterSize { expected, actual: n });
    }
    Ok(())
}

/// `2|a00 a11 − a01 a10|`.
pub fn concurrence_pure(psi: &PureState) -> Result<MeasureResult> {
    require_qubits(psi.num_qubits(), 2)?;
    let a = psi.amplitudes();
    let v = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
    MeasureResult::new(v, MeasureKind::Concurrence, Provenance::Analytic)
}

/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = tensor(&qmat::pauli_y(), &qmat::pauli_y());
    &(&yy * &rho.conj()) * &yy
}

/// Roughly `n·ε` for the 4×4 eigensolver; eigenvalues below this are roundoff.
pub const SPECTRAL_NOISE_FLOOR: f64 = 1e-14;

/// Eigenvalues of `ρρ̃` in descending order.
///
/// With `ρ = WW†`, `W = V√Λ`, they are the squared singular values of the
/// symmetric matrix `Wᵀ(σy⊗σy)W`. Working with singular values avoids the
/// `√ε` error that small eigenvalues of `√ρ ρ̃ √ρ` would carry into the
/// concurrence. Eigenvalues of `ρ` below [`SPECTRAL_NOISE_FLOOR`] are taken
/// as exact zeros: near the boundary of the separable set the concurrence
/// moves by `O(√μ)` under a perturbation of size `μ`, so roundoff-level
/// eigenvalues would otherwise surface at the `1e-9` level.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    require_qubits(rho.num_qubits(), 2)?;
    let eig = rho.eigen();
    if let Some(&w) = eig.values.last() {
        if w < -RANK_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix has eigenvalue {w:e}"
            )));
        }
    }
    let floor = SPECTRAL_NOISE_FLOOR * rho.matrix().trace().re.abs().max(1.0);
    let roots: Vec<f64> = eig
        .values
        .iter()
        .map(|&w| if w > floor { w.sqrt() } else { 0.0 })
        .collect();
    let w = ComplexMatrix::from_fn(4, 4, |i, j| eig.vectors[(i, j)] * roots[j]);
    let yy = tensor(&qmat::pauli_y(), &qmat::pauli_y());
    let wt = ComplexMatrix::from_fn(4, 4, |i, j| w[(j, i)]);
    let tau = &(&wt * &yy) * &w;
    Ok(qmat::singular_values(&tau).into_iter().map(|s| s * s).collect())
}

/// Wootters concurrence `max(0, √w1 − √w2 − √w3 − √w4)`.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<MeasureResult> {
    let w = wootters_spectrum(rho)?;
    let s: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let v = (s[0] - s[1] - s[2] - s[3]).max(0.0);
    MeasureResult::new(v, MeasureKind::Concurrence, Provenance::Analytic)
}

/// Coefficients of the Cayley hyperdeterminant of a three-qubit amplitude
/// vector (first qubit is the most significant bit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperdetCoefficients {
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl HyperdetCoefficients {
    pub fn from_amplitudes(a: &[Complex64]) -> Self {
        assert_eq!(a.len(), 8);
        let [a000, a001, a010, a011, a100, a101, a110, a111] = [a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]];
        let sq = |z: Complex64| z * z;
        let d1 = sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011);
        let d2 = a000 * a111 * a011 * a100
            + a000 * a111 * a101 * a010
            + a000 * a111 * a110 * a001
            + a011 * a100 * a101 * a010
            + a011 * a100 * a110 * a001
            + a101 * a010 * a110 * a001;
        let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
        HyperdetCoefficients { d1, d2, d3 }
    }

    /// `d1 − 2d2 + 4d3`.
    pub fn hyperdeterminant(&self) -> Complex64 {
        self.d1 - self.d2 * 2.0 + self.d3 * 4.0
    }
}

/// `4|d1 − 2d2 + 4d3|` of an unnormalized amplitude vector; homogeneous of degree 4.
pub fn tangle_of_vector(a: &[Complex64]) -> f64 {
    4.0 * HyperdetCoefficients::from_amplitudes(a).hyperdeterminant().norm()
}

pub fn three_tangle_pure(psi: &PureState) -> Result<MeasureResult> {
    require_qubits(psi.num_qubits(), 3)?;
    MeasureResult::new(
        tangle_of_vector(psi.amplitudes()),
        MeasureKind::ThreeTangle,
        Provenance::Analytic,
    )
}

/// `4λ0²λ4²`.
pub fn three_tangle_acin(p: &AcinParams) -> MeasureResult {
    let l = p.lambda();
    MeasureResult::new(
        4.0 * l[0] * l[0] * l[4] * l[4],
        MeasureKind::ThreeTangle,
        Provenance::Analytic,
    )
    .expect("canonical weights are bounded")
}

/// `C²_{f(rest)} − C²_{f,x} − C²_{f,y}` for a pure three-qubit state, with
/// `C_{f(rest)} = 2√det ρ_f`.
pub fn monogamy_residual(psi: &PureState, focus: Qubit) -> Result<f64> {
    require_qubits(psi.num_qubits(), 3)?;
    psi.register().position(focus)?;
    let rho = psi.projector();
    let single = rho.partial_trace(&[focus])?;
    let m = single.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    let c_one_rest_sq = 4.0 * det;
    let mut pair_sq = 0.0;
    for &other in psi.register().labels() {
        if other == focus {
            continue;
        }
        let pair = rho.partial_trace(&[focus, other])?;
        pair_sq += concurrence_mixed(&pair)?.value.powi(2);
    }
    Ok(c_one_rest_sq - pair_sq)
}

/// Apply a 2×2 matrix to the qubit at `position` of an amplitude vector.
pub fn apply_local(a: &[Complex64], n_qubits: usize, position: usize, u: &ComplexMatrix) -> Vec<Complex64> {
    let shift = n_qubits - 1 - position;
    let mut out = vec![c64(0.0, 0.0); a.len()];
    for (idx, amp) in a.iter().enumerate() {
        let bit = (idx >> shift) & 1;
        let base = idx & !(1 << shift);
        for new_bit in 0..2 {
            out[base | (new_bit << shift)] += u[(new_bit, bit)] * amp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::Register;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_concurrence_examples() {
        assert!((concurrence_pure(&PureState::bell00()).unwrap().value - 1.0).abs() < 1e-15);
        let p01 = PureState::from_real(Register::ab(), &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(concurrence_pure(&p01).unwrap().value, 0.0);
        let s = PureState::from_real(Register::ab(), &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]).unwrap();
        assert!((concurrence_pure(&s).unwrap().value - 0.8).abs() < 1e-15);
        assert!(matches!(
            concurrence_pure(&PureState::ghz()),
            Err(Error::WrongRegisterSize { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn mixed_concurrence_examples() {
        let mm = DensityMatrix::maximally_mixed(Register::ab());
        assert_eq!(concurrence_mixed(&mm).unwrap().value, 0.0);
        for seed in 0..20 {
            let psi = PureState::random(Register::ab(), seed);
            let c_pure = concurrence_pure(&psi).unwrap().value;
            let c_mixed = concurrence_mixed(&psi.projector()).unwrap().value;
            assert!((c_pure - c_mixed).abs() < 1e-10, "seed {seed}: {c_pure} vs {c_mixed}");
        }
    }

    #[test]
    fn tangle_examples() {
        assert!((three_tangle_pure(&PureState::ghz()).unwrap().value - 1.0).abs() < 1e-15);
        let w = three_tangle_pure(&PureState::w()).unwrap().value;
        assert_eq!(w, 0.0);
        let hd = HyperdetCoefficients::from_amplitudes(PureState::ghz().amplitudes());
        assert!((hd.d1 - 0.25).norm() < 1e-15 && hd.d2.norm() == 0.0 && hd.d3.norm() == 0.0);
    }

    #[test]
    fn acin_shortcut() {
        assert!((three_tangle_acin(&AcinParams::ghz()).value - 1.0).abs() < 1e-15);
        let p = AcinParams::new([0.6, 0.0, 0.0, 0.8, 0.0], 0.0).unwrap();
        assert_eq!(three_tangle_acin(&p).value, 0.0);
        let l4 = (1.0f64 - 0.86).sqrt();
        let p = AcinParams::new([0.6, 0.3, 0.4, l4, 0.5], 0.0).unwrap();
        assert!((three_tangle_acin(&p).value - 0.36).abs() < 1e-15);
    }

    #[test]
    fn acin_shortcut_matches_hyperdeterminant() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..100 {
            let p = AcinParams::random(&mut rng);
            let direct = three_tangle_pure(&PureState::from_acin(&p)).unwrap().value;
            assert!((direct - three_tangle_acin(&p).value).abs() < 1e-12);
            let swapped = three_tangle_pure(&PureState::from_acin(&p.swap_bc())).unwrap().value;
            assert!((direct - swapped).abs() < 1e-12);
        }
    }

    #[test]
    fn monogamy_examples() {
        assert!((monogamy_residual(&PureState::ghz(), Qubit::A).unwrap() - 1.0).abs() < 1e-12);
        assert!(monogamy_residual(&PureState::w(), Qubit::A).unwrap().abs() < 1e-9);
        for seed in 0..30 {
            let psi = PureState::random(Register::abc(), seed);
            let tau = three_tangle_pure(&psi).unwrap().value;
            for focus in [Qubit::A, Qubit::B, Qubit::C] {
                let res = monogamy_residual(&psi, focus).unwrap();
                assert!((res - tau).abs() < 1e-8, "seed {seed} focus {focus}: {res} vs {tau}");
            }
        }
    }

    #[test]
    fn w_pair_concurrences() {
        let rho = PureState::w().projector();
        let pair = rho.partial_trace(&[Qubit::A, Qubit::B]).unwrap();
        assert!((concurrence_mixed(&pair).unwrap().value.powi(2) - 4.0 / 9.0).abs() < 1e-12);
    }

    /// Characteristic polynomial coefficients by Faddeev–LeVerrier.
    fn charpoly(m: &ComplexMatrix) -> Vec<Complex64> {
        let n = m.rows();
        let mut coeffs = vec![c64(1.0, 0.0)];
        let mut mk = ComplexMatrix::zeros(n, n);
        let id = ComplexMatrix::identity(n);
        for k in 1..=n {
            let prev = coeffs[k - 1];
            mk = &(m * &mk) + &id.scale(prev);
            let ck = -(m * &mk).trace() / k as f64;
            coeffs.push(ck);
        }
        coeffs
    }

    fn random_density(seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // rank-3 mixture of random pure states
        let states: Vec<_> = (0..3)
            .map(|_| PureState::random_with(Register::ab(), &mut rng))
            .collect();
        DensityMatrix::mixture(&[0.5, 0.3, 0.2], &states).unwrap()
    }

    #[test]
    fn hermitian_similarity_has_the_spin_flip_spectrum() {
        for seed in 0..25 {
            let rho = random_density(seed);
            let r = rho.matrix() * &spin_flip(rho.matrix());
            let expected = charpoly(&r);
            let w = wootters_spectrum(&rho).unwrap();
            let from_w = charpoly(&ComplexMatrix::diag(&w));
            for (a, b) in expected.iter().zip(&from_w) {
                assert!((a - b).norm() < 1e-10, "seed {seed}: {a} vs {b}");
            }
        }
    }

    fn random_unitary(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let psi = PureState::random_with(Register::ab(), rng);
        let a = psi.amplitudes();
        // columns (a0, a1) and its orthogonal complement, times a phase
        let n = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        let (u, v) = (a[0] / n, a[1] / n);
        let ph = a[2] / a[2].norm();
        ComplexMatrix::from_vec(2, 2, vec![u, -v.conj() * ph, v, u.conj() * ph]).unwrap()
    }

    proptest! {
        #[test]
        fn tangle_is_permutation_invariant(seed in 0u64..10_000) {
            let psi = PureState::random(Register::abc(), seed);
            let t = three_tangle_pure(&psi).unwrap().value;
            for order in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let tp = three_tangle_pure(&psi.permute(&order).unwrap()).unwrap().value;
                prop_assert!((t - tp).abs() < 1e-12);
            }
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&t));
        }

        #[test]
        fn tangle_is_local_unitary_invariant(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = PureState::random_with(Register::abc(), &mut rng);
            let mut a = psi.amplitudes().to_vec();
            for pos in 0..3 {
                let u = random_unitary(&mut rng);
                a = apply_local(&a, 3, pos, &u);
            }
            let t0 = three_tangle_pure(&psi).unwrap().value;
            prop_assert!((tangle_of_vector(&a) - t0).abs() < 1e-10);
        }

        #[test]
        fn spin_flip_spectrum_is_nonnegative(seed in 0u64..10_000) {
            let rho = random_density(seed);
            let w = wootters_spectrum(&rho).unwrap();
            prop_assert!(w.iter().all(|x| *x >= 0.0));
            let c = concurrence_mixed(&rho).unwrap().value;
            prop_assert!((0.0..=1.0 + 1e-9).contains(&c));
        }
    }
}
