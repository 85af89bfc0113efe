//! Pure and mixed states over labelled qubit registers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{self, c64, eig_hermitian, ComplexMatrix, Qubit, Register, HERMITIAN_TOL, RANK_TOL};

/// Canonical five-term parameters `λ0|000⟩ + λ1 e^{iφ}|100⟩ + λ2|101⟩ + λ3|110⟩ + λ4|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcinParams {
    lambda: [f64; 5],
    phi: f64,
}

impl AcinParams {
    const NORM_TOL: f64 = 1e-12;

    /// Validates the weights. `phi` may be any real and is folded into `[0, 2π)`.
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidParams(format!(
                "canonical weights must be finite and nonnegative, got {lambda:?}"
            )));
        }
        let sum: f64 = lambda.iter().map(|l| l * l).sum();
        if (sum - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidParams(format!(
                "canonical weights must satisfy Σλ² = 1, got {sum}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParams("phase must be finite".into()));
        }
        Ok(AcinParams {
            lambda,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn ghz() -> Self {
        AcinParams {
            lambda: [FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2],
            phi: 0.0,
        }
    }

    /// Weights drawn as normalized absolute Gaussians, phase uniform on `[0, π]`.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut lambda = [0.0; 5];
        for l in &mut lambda {
            let g: f64 = rng.sample(StandardNormal);
            *l = g.abs();
        }
        let n = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
        lambda.iter_mut().for_each(|l| *l /= n);
        AcinParams {
            lambda,
            phi: rng.random_range(0.0..=PI),
        }
    }

    pub fn lambda(&self) -> [f64; 5] {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The same state with Bob and Charlie exchanged.
    pub fn swap_bc(&self) -> Self {
        let [l0, l1, l2, l3, l4] = self.lambda;
        AcinParams {
            lambda: [l0, l1, l3, l2, l4],
            phi: self.phi,
        }
    }

    /// Read the canonical parameters back from a state in canonical form.
    /// Fails if any non-canonical amplitude is nonzero or a real weight has
    /// a phase.
    pub fn from_state(psi: &PureState) -> Result<Self> {
        if psi.num_qubits() != 3 {
            return Err(Error::WrongRegisterSize {
                expected: 3,
                actual: psi.num_qubits(),
            });
        }
        let a = psi.amplitudes();
        for i in [0b001, 0b010, 0b011] {
            if a[i].norm() > 1e-12 {
                return Err(Error::InvalidParams("state is not in canonical form".into()));
            }
        }
        for i in [0b000, 0b101, 0b110, 0b111] {
            if a[i].im.abs() > 1e-12 || a[i].re < -1e-12 {
                return Err(Error::InvalidParams("state is not in canonical form".into()));
            }
        }
        let l1 = a[0b100].norm();
        let phi = if l1 > 0.0 { a[0b100].arg() } else { 0.0 };
        AcinParams::new(
            [
                a[0b000].re.max(0.0),
                l1,
                a[0b101].re.max(0.0),
                a[0b110].re.max(0.0),
                a[0b111].re.max(0.0),
            ],
            phi,
        )
    }
}

/// A normalized state vector over a register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Register,
    amplitudes: Vec<Complex64>,
    normalization: f64,
}

impl PureState {
    /// Normalizes `amps`; the divisor is kept and reported by [`PureState::normalization`].
    pub fn from_amplitudes(register: Register, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                actual: amps.len(),
            });
        }
        let n = qmat::norm(&amps);
        if !n.is_finite() {
            return Err(Error::InvalidParams("amplitudes must be finite".into()));
        }
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(PureState {
            register,
            amplitudes: amps.into_iter().map(|a| a / n).collect(),
            normalization: n,
        })
    }

    pub fn from_real(register: Register, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(register, amps.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn from_acin(p: &AcinParams) -> Self {
        let [l0, l1, l2, l3, l4] = p.lambda;
        let mut a = vec![c64(0.0, 0.0); 8];
        a[0b000] = c64(l0, 0.0);
        a[0b100] = Complex64::from_polar(l1, p.phi);
        a[0b101] = c64(l2, 0.0);
        a[0b110] = c64(l3, 0.0);
        a[0b111] = c64(l4, 0.0);
        // Σλ² = 1 already holds to 1e-12; renormalize the residue away.
        PureState::from_amplitudes(Register::abc(), a).expect("canonical parameters are normalized")
    }

    /// Haar-random state: i.i.d. standard complex Gaussians, normalized.
    pub fn random(register: Register, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(register, &mut rng)
    }

    pub fn random_with(register: Register, rng: &mut impl Rng) -> Self {
        let amps = (0..register.dim())
            .map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        PureState::from_amplitudes(register, amps).expect("Gaussian vector is nonzero")
    }

    pub fn ghz() -> Self {
        PureState::from_acin(&AcinParams::ghz())
    }

    /// `(|001⟩ + |010⟩ + |100⟩)/√3`.
    pub fn w() -> Self {
        PureState::from_real(Register::abc(), &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).expect("nonzero")
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell00() -> Self {
        PureState::from_real(Register::ab(), &[1.0, 0.0, 0.0, 1.0]).expect("nonzero")
    }

    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ghz" => Ok(Self::ghz()),
            "w" => Ok(Self::w()),
            "bell00" | "bell" => Ok(Self::bell00()),
            other => Err(Error::Parse(format!(
                "unknown named state {other:?} (expected ghz, w or bell00)"
            ))),
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Norm of the vector the state was built from (1 for generated states).
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn overlap(&self, other: &PureState) -> Complex64 {
        qmat::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            register: self.register.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }

    /// Relabel/reorder qubits: `order[k]` is the old position placed at new position `k`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.num_qubits();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidParams(format!(
                "{order:?} is not a permutation of 0..{n}"
            )));
        }
        let labels = order.iter().map(|&p| self.register.labels()[p]).collect();
        let mut out = vec![c64(0.0, 0.0); self.amplitudes.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let new_idx = order.iter().enumerate().fold(0, |acc, (k, &p)| {
                let bit = (idx >> (n - 1 - p)) & 1;
                acc | (bit << (n - 1 - k))
            });
            out[new_idx] = *a;
        }
        Ok(PureState {
            register: Register::new(labels)?,
            amplitudes: out,
            normalization: 1.0,
        })
    }

    pub(crate) fn from_parts_unchecked(register: Register, amplitudes: Vec<Complex64>) -> Self {
        PureState {
            register,
            amplitudes,
            normalization: 1.0,
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over a register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = 1e-10;

    pub fn new(register: Register, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != register.dim() {
            return Err(Error::DimensionMismatch {
                expected: register.dim(),
                actual: matrix.rows(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > Self::TRACE_TOL {
            return Err(Error::InvariantViolation(format!("trace is {tr}, not 1")));
        }
        let eig = eig_hermitian(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -Self::PSD_TOL {
            return Err(Error::InvariantViolation(format!(
                "smallest eigenvalue {min:e} is negative"
            )));
        }
        Ok(DensityMatrix { register, matrix })
    }

    pub fn maximally_mixed(register: Register) -> Self {
        let d = register.dim();
        DensityMatrix {
            matrix: ComplexMatrix::identity(d).scale(c64(1.0 / d as f64, 0.0)),
            register,
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn partial_trace(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let (m, reg) = qmat::partial_trace(&self.matrix, keep, &self.register)?;
        Ok(DensityMatrix {
            register: reg,
            matrix: m,
        })
    }

    pub fn eigen(&self) -> qmat::Eigen {
        eig_hermitian(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn rank(&self) -> usize {
        self.eigen().rank()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `Σ wᵢ |ψᵢ⟩⟨ψᵢ|` over equally-registered states.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidParams("empty ensemble".into()))?;
        let d = first.register.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.register != first.register {
                return Err(Error::InvalidParams("ensemble states use different registers".into()));
            }
            m = &m + &ComplexMatrix::outer(&s.amplitudes).scale(c64(*w, 0.0));
        }
        DensityMatrix::new(first.register.clone(), m)
    }

    pub(crate) fn from_parts_unchecked(register: Register, matrix: ComplexMatrix) -> Self {
        DensityMatrix { register, matrix }
    }

    /// Numerical rank with the crate-wide threshold.
    pub fn is_rank_at_most(&self, k: usize) -> bool {
        self.eigen().values.iter().filter(|w| **w > RANK_TOL).count() <= k
    }
}

/// On-disk state description. Either raw amplitudes over a register or the
/// canonical parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Amplitudes {
        register: Register,
        amplitudes: Vec<[f64; 2]>,
    },
    Acin {
        acin: AcinSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcinSpec {
    pub lambda: [f64; 5],
    pub phi: f64,
}

/// A state loaded from disk, keeping its canonical parameters when given.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Raw(PureState),
    Acin(AcinParams),
}

impl LoadedState {
    pub fn pure(&self) -> PureState {
        match self {
            LoadedState::Raw(p) => p.clone(),
            LoadedState::Acin(a) => PureState::from_acin(a),
        }
    }
}

impl StateFile {
    pub fn from_state(psi: &PureState) -> Self {
        StateFile::Amplitudes {
            register: psi.register.clone(),
            amplitudes: psi.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_acin(p: &AcinParams) -> Self {
        StateFile::Acin {
            acin: AcinSpec {
                lambda: p.lambda,
                phi: p.phi,
            },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    pub fn load(&self) -> Result<LoadedState> {
        match self {
            StateFile::Amplitudes { register, amplitudes } => {
                let amps = amplitudes.iter().map(|[re, im]| c64(*re, *im)).collect();
                Ok(LoadedState::Raw(PureState::from_amplitudes(register.clone(), amps)?))
            }
            StateFile::Acin { acin } => Ok(LoadedState::Acin(AcinParams::new(acin.lambda, acin.phi)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acin_ghz_and_product() {
        let ghz = PureState::from_acin(&AcinParams::ghz());
        let s = FRAC_1_SQRT_2;
        let expected = [s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, s];
        for (a, e) in ghz.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-15);
        }
        let p = PureState::from_acin(&AcinParams::new([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap());
        assert_eq!(p.amplitudes()[0], c64(1.0, 0.0));
        assert!(p.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn acin_five_term_state() {
        let l4 = (1.0f64 - 0.86).sqrt();
        let p = AcinParams::new([0.6, 0.3, 0.4, 0.5, l4], PI / 3.0).unwrap();
        let psi = PureState::from_acin(&p);
        assert!((qmat::norm(psi.amplitudes()) - 1.0).abs() < 1e-12);
        let a = psi.amplitudes();
        assert!((a[0b100] - Complex64::from_polar(0.3, PI / 3.0)).norm() < 1e-12);
        assert!((a[0b111].re - l4).abs() < 1e-12);
    }

    #[test]
    fn acin_read_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = AcinParams::random(&mut rng);
            let back = AcinParams::from_state(&PureState::from_acin(&p)).unwrap();
            for (x, y) in p.lambda().iter().zip(back.lambda()) {
                assert!((x - y).abs() < 1e-12);
            }
            if p.lambda()[1] > 1e-6 {
                assert!((p.phi() - back.phi()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn acin_validation() {
        assert!(AcinParams::new([0.5, 0.5, 0.5, 0.5, 0.5], 0.0).is_err());
        assert!(AcinParams::new([-0.6, 0.0, 0.0, 0.0, 0.8], 0.0).is_err());
        let folded = AcinParams::new([0.6, 0.0, 0.0, 0.0, 0.8], -PI / 2.0).unwrap();
        assert!((folded.phi() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn amplitudes_normalize_and_report_factor() {
        let ghz = PureState::from_real(Register::abc(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((ghz.normalization() - 2f64.sqrt()).abs() < 1e-15);
        assert!((ghz.overlap(&PureState::ghz()).norm() - 1.0).abs() < 1e-15);

        let w = PureState::from_real(Register::abc(), &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((1.0 / w.normalization() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn amplitude_errors() {
        assert_eq!(
            PureState::from_real(Register::abc(), &[0.0; 8]).unwrap_err(),
            Error::ZeroVector
        );
        assert!(matches!(
            PureState::from_real(Register::abc(), &[1.0; 4]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_is_deterministic_and_normalized() {
        let a = PureState::random(Register::abc(), 42);
        let b = PureState::random(Register::abc(), 42);
        assert_eq!(a, b);
        let c = PureState::random(Register::ab(), 7);
        assert!((qmat::norm(c.amplitudes()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_seed_battery_is_distinct_and_pure() {
        let states: Vec<_> = (1..=100).map(|s| PureState::random(Register::abc(), s)).collect();
        for (i, a) in states.iter().enumerate() {
            assert!((a.projector().purity() - 1.0).abs() < 1e-12);
            for b in &states[i + 1..] {
                assert!(a.overlap(b).norm() < 1.0 - 1e-6);
            }
        }
    }

    #[test]
    fn random_first_moment_matches_uniform_sphere() {
        // E|a_000|² = 1/8; Var = (1/8)(7/8)/(8+1) for the uniform measure on C^8.
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|s| PureState::random(Register::abc(), 1_000_000 + s).amplitudes()[0].norm_sqr())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = (1.0 / 8.0) * (7.0 / 8.0) / 9.0;
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.125).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn permute_swaps_qubits() {
        let psi = PureState::from_acin(&AcinParams::new([0.6, 0.0, 0.8, 0.0, 0.0], 0.0).unwrap());
        let swapped = psi.permute(&[0, 2, 1]).unwrap();
        assert_eq!(swapped.register().labels(), &[Qubit::A, Qubit::C, Qubit::B]);
        assert!((swapped.amplitudes()[0b110].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let reg = Register::ab();
        assert!(DensityMatrix::new(reg.clone(), ComplexMatrix::identity(4)).is_err());
        assert!(DensityMatrix::new(reg.clone(), ComplexMatrix::diag(&[1.5, -0.5, 0.0, 0.0])).is_err());
        let rho = DensityMatrix::new(reg.clone(), ComplexMatrix::diag(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        assert_eq!(rho.rank(), 2);
        assert!((DensityMatrix::maximally_mixed(reg).purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn state_file_round_trip() {
        let psi = PureState::random(Register::abc(), 11);
        let text = StateFile::from_state(&psi).to_json();
        let loaded = StateFile::parse(&text).unwrap().load().unwrap().pure();
        assert!((loaded.overlap(&psi).norm() - 1.0).abs() < 1e-14);

        let text = r#"{"acin": {"lambda": [0.6, 0, 0, 0, 0.8], "phi": 0.0}}"#;
        match StateFile::parse(text).unwrap().load().unwrap() {
            LoadedState::Acin(p) => assert_eq!(p.lambda()[4], 0.8),
            other => panic!("expected canonical parameters, got {other:?}"),
        }

        let text = r#"{"register": ["A", "B"], "amplitudes": [[1, 0], [0, 0], [0, 0], [0, 1]]}"#;
        let psi = StateFile::parse(text).unwrap().load().unwrap().pure();
        assert_eq!(psi.register(), &Register::ab());
        assert!((psi.amplitudes()[3] - c64(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);

        assert!(StateFile::parse(r#"{"register": ["A", "A"], "amplitudes": []}"#).is_err());
    }
}
