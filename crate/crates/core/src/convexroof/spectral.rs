use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{monogamy_residual, tangle_of_vector};
use crate::qmat::{self, c64, Qubit, RANK_TOL};
use crate::states::{DensityMatrix, PureState};
use crate::unruh::{kraus_branches, reduced_state, RindlerParams};

/// Equal-weight two-element decomposition of the reduced state of an
/// arbitrary three-qubit input, built from its numerical eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    /// Larger eigenvalue of the reduced state.
    pub p: f64,
    pub reduced: DensityMatrix,
    /// Eigenvectors, phase-aligned so that their `K₀ψ` components are real.
    pub eigenvectors: [PureState; 2],
    /// `|F, π/2⟩` and `|F, 3π/2⟩`, or the single eigenvector when the reduced
    /// state is pure.
    pub members: Vec<PureState>,
    pub weights: Vec<f64>,
}

impl SpectralFamily {
    /// `Σ wᵢ τ3(ψᵢ)` over the members.
    pub fn average_tangle(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.members)
            .map(|(w, s)| w * tangle_of_vector(s.amplitudes()))
            .sum()
    }

    /// `Σ wᵢ (C²_{f(rest)} − C²_{f,x} − C²_{f,y})(ψᵢ)` with `f` the accelerated slot.
    pub fn average_monogamy_residual(&self) -> Result<f64> {
        let mut total = 0.0;
        for (w, s) in self.weights.iter().zip(&self.members) {
            total += w * monogamy_residual(s, Qubit::I)?;
        }
        Ok(total)
    }
}

/// Spectrally decompose `tr_II` of the channel output and form the
/// equal-weight family at `θ = π/2`.
///
/// Eigenvector phases are not canonical; each eigenvector `√w_j μ_j` is
/// written as `c_j K₀ψ + d_j K₁ψ` over the two Kraus branches of the channel
/// and rephased so that `c_j ≥ 0`. In that gauge `θ = π/2` attains the roof.
pub fn spectral_family(psi: &PureState, accelerated: Qubit, r: &RindlerParams) -> Result<SpectralFamily> {
    if psi.num_qubits() != 3 {
        return Err(Error::WrongRegisterSize {
            expected: 3,
            actual: psi.num_qubits(),
        });
    }
    let reduced = reduced_state(psi, accelerated, r)?;
    let eig = reduced.eigen();
    let rank = eig.rank();
    if rank > 2 {
        return Err(Error::RankTooHigh(rank));
    }
    let register = reduced.register().clone();
    let mu0 = eig.vector(0);
    let mut mu1 = eig.vector(1);
    // keep the pair exactly orthonormal when the weights nearly coincide
    let ov = qmat::inner(&mu0, &mu1);
    mu1.iter_mut().zip(&mu0).for_each(|(b, a)| *b -= ov * a);
    let n1 = qmat::norm(&mu1);
    mu1.iter_mut().for_each(|b| *b /= n1);

    let w0 = eig.values[0].max(0.0);
    let w1 = eig.values[1].max(0.0);
    let total = w0 + w1;
    let (w0, w1) = (w0 / total, w1 / total);

    let make = |v: Vec<Complex64>| PureState::from_parts_unchecked(register.clone(), v);

    if rank <= 1 || w1 <= RANK_TOL {
        // at r = 0 the channel is the identity and K₀ψ is the input itself
        let top = if r.r() == 0.0 {
            let [k0, _] = kraus_branches(psi, accelerated, r)?;
            make(k0.amplitudes().to_vec())
        } else {
            make(mu0.clone())
        };
        return Ok(SpectralFamily {
            p: 1.0,
            reduced,
            eigenvectors: [top.clone(), make(mu1)],
            members: vec![top],
            weights: vec![1.0],
        });
    }

    let [k0, k1] = kraus_branches(psi, accelerated, r)?;
    let (k0, k1) = (k0.amplitudes(), k1.amplitudes());
    // dual functional picking the K₀ψ coefficient inside span{K₀ψ, K₁ψ}
    let k1k1 = qmat::inner(k1, k1).re;
    let proj = qmat::inner(k1, k0) / k1k1;
    let dual: Vec<Complex64> = k0.iter().zip(k1).map(|(a, b)| a - proj * b).collect();
    let dual_k0 = qmat::inner(&dual, k0);
    let align = |mu: &mut Vec<Complex64>| {
        let coeff = qmat::inner(&dual, mu) / dual_k0;
        let n = coeff.norm();
        if n > 0.0 {
            let ph = (coeff / n).conj();
            mu.iter_mut().for_each(|z| *z *= ph);
        }
    };
    let mut mu0 = mu0;
    align(&mut mu0);
    align(&mut mu1);

    let (s0, s1) = (w0.sqrt(), w1.sqrt());
    let member =
        |ph: Complex64| -> Vec<Complex64> { mu0.iter().zip(&mu1).map(|(a, b)| a * s0 + ph * b * s1).collect() };
    let f_plus = make(member(c64(0.0, 1.0)));
    let f_minus = make(member(c64(0.0, -1.0)));

    Ok(SpectralFamily {
        p: w0,
        reduced,
        eigenvectors: [make(mu0.clone()), make(mu1.clone())],
        members: vec![f_plus, f_minus],
        weights: vec![0.5, 0.5],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::three_tangle_pure;
    use crate::qmat::Register;

    #[test]
    fn raw_states_degrade_by_cos_squared() {
        for seed in 0..30 {
            let psi = PureState::random(Register::abc(), 500 + seed);
            let tau0 = three_tangle_pure(&psi).unwrap().value;
            for party in [Qubit::A, Qubit::B, Qubit::C] {
                let r = RindlerParams::from_angle(0.1 + 0.02 * seed as f64).unwrap();
                let fam = spectral_family(&psi, party, &r).unwrap();
                let expected = tau0 * r.r().cos().powi(2);
                assert!((fam.average_tangle() - expected).abs() < 1e-8);
                assert!((fam.average_monogamy_residual().unwrap() - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn members_reproduce_the_reduced_state() {
        let psi = PureState::random(Register::abc(), 3);
        let r = RindlerParams::from_angle(0.6).unwrap();
        let fam = spectral_family(&psi, Qubit::B, &r).unwrap();
        let mix = DensityMatrix::mixture(&fam.weights, &fam.members).unwrap();
        assert!((mix.matrix() - fam.reduced.matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn zero_angle_returns_the_pure_state() {
        let psi = PureState::random(Register::abc(), 4);
        let fam = spectral_family(&psi, Qubit::A, &RindlerParams::from_angle(0.0).unwrap()).unwrap();
        assert_eq!(fam.members.len(), 1);
        let tau0 = three_tangle_pure(&psi).unwrap().value;
        assert_eq!(fam.average_tangle(), tau0);
    }
}
