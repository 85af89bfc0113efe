//! Rindler-frame channels for one accelerated party.
//!
//! The single-mode channel sends the accelerated qubit to a region-I qubit
//! entangled with a region-II partner that is then traced out. The
//! beyond-single-mode dictionary replaces it with four qubits
//! `I⁺, I⁻, II⁺, II⁻`. New qubits are always appended after the inertial
//! parties; the accelerated slot is relabelled in place.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{c64, ComplexMatrix, Qubit, Register};
use crate::states::{AcinParams, DensityMatrix, PureState};

/// Slack allowed above `π/4` when accepting a user-supplied angle.
const R_SLACK: f64 = 1e-9;

/// Statistical angle of the Fermi-Dirac Unruh channel, `r ∈ [0, π/4]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerParams {
    r: f64,
    physical: Option<(f64, f64, f64)>,
}

impl RindlerParams {
    /// Angles within `1e-9` of the interval are clamped onto it.
    pub fn from_angle(r: f64) -> Result<Self> {
        if !r.is_finite() || !(-R_SLACK..=FRAC_PI_4 + R_SLACK).contains(&r) {
            return Err(Error::InvalidParams(format!("r = {r} lies outside [0, π/4]")));
        }
        Ok(RindlerParams {
            r: r.clamp(0.0, FRAC_PI_4),
            physical: None,
        })
    }

    pub fn from_acceleration(a: f64, omega: f64, c: f64) -> Result<Self> {
        Ok(RindlerParams {
            r: r_from_acceleration(a, omega, c)?,
            physical: Some((a, omega, c)),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `(a, ω, c)` when the angle was derived from an acceleration.
    pub fn physical(&self) -> Option<(f64, f64, f64)> {
        self.physical
    }
}

/// `r` with `cos r = 1/√(1 + exp(−2πωc/a))`.
///
/// Evaluated as `atan(exp(−πωc/a))`, which is the same angle but keeps full
/// relative precision when `r` is tiny. `a = +∞` is accepted and gives `π/4`.
pub fn r_from_acceleration(a: f64, omega: f64, c: f64) -> Result<f64> {
    for (name, v) in [("acceleration", a), ("omega", omega), ("c", c)] {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
        }
    }
    if !omega.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParams("omega and c must be finite".into()));
    }
    let x = 2.0 * PI * omega * c / a;
    Ok((-0.5 * x).exp().atan())
}

fn check_slot(psi: &PureState, accelerated: Qubit) -> Result<usize> {
    let pos = psi.register().position(accelerated)?;
    if !matches!(accelerated, Qubit::A | Qubit::B | Qubit::C) {
        return Err(Error::InvalidParams(format!(
            "only inertial parties can be accelerated, got {accelerated}"
        )));
    }
    Ok(pos)
}

/// Apply a per-basis isometry on the accelerated qubit: `images[b]` is the
/// image of `|b⟩` over `1 + extra` qubits (the relabelled slot first, then the
/// appended ones).
fn embed(psi: &PureState, pos: usize, extra: usize, images: [&[Complex64]; 2], register: Register) -> PureState {
    let n = psi.num_qubits();
    let shift = n - 1 - pos;
    let local = 1usize << extra;
    let mut out = vec![c64(0.0, 0.0); psi.amplitudes().len() << extra];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let bit = (idx >> shift) & 1;
        let rest = idx & !(1 << shift);
        for (k, coeff) in images[bit].iter().enumerate() {
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let slot_bit = k >> extra;
            let tail = k & (local - 1);
            let new_idx = ((rest | (slot_bit << shift)) << extra) | tail;
            out[new_idx] += amp * coeff;
        }
    }
    PureState::from_parts_unchecked(register, out)
}

/// Single-mode channel on `accelerated`:
/// `|0⟩ → cos r |0⟩_I|0⟩_II + sin r |1⟩_I|1⟩_II`, `|1⟩ → |1⟩_I|0⟩_II`.
///
/// The accelerated slot is relabelled `I` and `II` is appended last.
pub fn apply_single_mode_channel(psi: &PureState, accelerated: Qubit, r: &RindlerParams) -> Result<PureState> {
    let pos = check_slot(psi, accelerated)?;
    let mut register = psi.register().clone();
    register.replace(accelerated, Qubit::I)?;
    register.push(Qubit::II)?;
    let (s, c) = r.r().sin_cos();
    // local basis |I, II⟩
    let zero = [c64(c, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)];
    let one = [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
    Ok(embed(psi, pos, 1, [&zero, &one], register))
}

/// The two Kraus images `K₀ψ`, `K₁ψ` of the single-mode channel, over the
/// register with the accelerated slot relabelled `I`.
pub fn kraus_branches(psi: &PureState, accelerated: Qubit, r: &RindlerParams) -> Result<[PureState; 2]> {
    let pos = check_slot(psi, accelerated)?;
    let mut register = psi.register().clone();
    register.replace(accelerated, Qubit::I)?;
    let (s, c) = r.r().sin_cos();
    let k0 = [[c64(c, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(1.0, 0.0)]];
    let k1 = [[c64(0.0, 0.0), c64(s, 0.0)], [c64(0.0, 0.0), c64(0.0, 0.0)]];
    Ok([k0, k1].map(|k| embed(psi, pos, 0, [&k[0], &k[1]], register.clone())))
}

/// `tr_II` of the single-mode channel output.
pub fn reduced_state(psi: &PureState, accelerated: Qubit, r: &RindlerParams) -> Result<DensityMatrix> {
    let out = apply_single_mode_channel(psi, accelerated, r)?;
    let keep: Vec<Qubit> = out
        .register()
        .labels()
        .iter()
        .copied()
        .filter(|&q| q != Qubit::II)
        .collect();
    out.projector().partial_trace(&keep)
}

/// Unruh-mode weights `q_R`, `q_L` (with `|q_R|² + |q_L|² = 1`) and the mode angle `r_Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnruhModeParams {
    q_r: Complex64,
    q_l: Complex64,
    r_omega: f64,
}

impl UnruhModeParams {
    pub fn new(q_r: Complex64, q_l: Complex64, r_omega: f64) -> Result<Self> {
        let n = q_r.norm_sqr() + q_l.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("|q_R|² + |q_L|² = {n}, not 1")));
        }
        let r_omega = RindlerParams::from_angle(r_omega)?.r();
        Ok(UnruhModeParams { q_r, q_l, r_omega })
    }

    /// Real `q_R ∈ [0, 1]` with `q_L = √(1 − q_R²)`.
    pub fn real(q_r: f64, r_omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_r) {
            return Err(Error::InvalidParams(format!("q_R = {q_r} must lie in [0, 1]")));
        }
        Self::new(c64(q_r, 0.0), c64((1.0 - q_r * q_r).sqrt(), 0.0), r_omega)
    }

    pub fn q_r(&self) -> Complex64 {
        self.q_r
    }

    pub fn q_l(&self) -> Complex64 {
        self.q_l
    }

    pub fn r_omega(&self) -> f64 {
        self.r_omega
    }
}

/// Which half of the accelerated party's Hilbert space is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Keep `I⁺`; trace `I⁻, II⁺, II⁻`.
    Particle,
    /// Keep `I⁻`; trace `I⁺, II⁺, II⁻`.
    Antiparticle,
}

/// Beyond-single-mode expansion on `accelerated`. The slot becomes `I⁺` and
/// `I⁻, II⁺, II⁻` are appended in that order.
pub fn apply_unruh_mode(psi: &PureState, accelerated: Qubit, params: &UnruhModeParams) -> Result<PureState> {
    let pos = check_slot(psi, accelerated)?;
    let mut register = psi.register().clone();
    register.replace(accelerated, Qubit::IPlus)?;
    for q in [Qubit::IMinus, Qubit::IIPlus, Qubit::IIMinus] {
        register.push(q)?;
    }
    let (s, c) = params.r_omega.sin_cos();
    // Local index bits: I⁺ (8), I⁻ (4), II⁺ (2), II⁻ (1).
    let idx = |ip: usize, im: usize, iip: usize, iim: usize| (ip << 3) | (im << 2) | (iip << 1) | iim;
    let mut zero = [c64(0.0, 0.0); 16];
    let mut one = [c64(0.0, 0.0); 16];
    // |0⟩_R = c|0⟩_I⁺|0⟩_II⁻ + s|1⟩_I⁺|1⟩_II⁻ ; |0⟩_L = c|0⟩_I⁻|0⟩_II⁺ − s|1⟩_I⁻|1⟩_II⁺
    let zero_r = [((0, 0), c), ((1, 1), s)];
    let zero_l = [((0, 0), c), ((1, 1), -s)];
    for ((ip, iim), a) in zero_r {
        for ((im, iip), b) in zero_l {
            zero[idx(ip, im, iip, iim)] += c64(a * b, 0.0);
        }
    }
    // |1⟩_U⁺ = q_R |1⟩_R|0⟩_L + q_L |0⟩_R|1⟩_L with |1⟩_R = |1⟩_I⁺|0⟩_II⁻, |1⟩_L = |0⟩_I⁻|1⟩_II⁺
    for ((im, iip), b) in zero_l {
        one[idx(1, im, iip, 0)] += params.q_r * b;
    }
    for ((ip, iim), a) in zero_r {
        one[idx(ip, 0, 1, iim)] += params.q_l * a;
    }
    Ok(embed(psi, pos, 3, [&zero, &one], register))
}

/// Reduce the beyond-single-mode state onto the inertial parties plus one
/// region-I sector of the accelerated party.
pub fn sector_state(
    psi: &PureState,
    accelerated: Qubit,
    params: &UnruhModeParams,
    sector: Sector,
) -> Result<DensityMatrix> {
    let out = apply_unruh_mode(psi, accelerated, params)?;
    let kept_mode = match sector {
        Sector::Particle => Qubit::IPlus,
        Sector::Antiparticle => Qubit::IMinus,
    };
    let keep: Vec<Qubit> = out
        .register()
        .labels()
        .iter()
        .copied()
        .filter(|&q| matches!(q, Qubit::A | Qubit::B | Qubit::C) || q == kept_mode)
        .collect();
    out.projector().partial_trace(&keep)
}

/// `ρ_ABI⁺` for Charlie accelerated, built by expanding the canonical state
/// through the Unruh-mode dictionary and tracing `I⁻, II⁺, II⁻`.
pub fn particle_sector_state(p: &AcinParams, params: &UnruhModeParams) -> Result<DensityMatrix> {
    sector_state(&PureState::from_acin(p), Qubit::C, params, Sector::Particle)
}

/// Closed-form entries of `ρ_ABI⁺` (basis `|A B I⁺⟩`).
pub fn particle_sector_closed_form(p: &AcinParams, params: &UnruhModeParams) -> DensityMatrix {
    let [l0, l1, l2, l3, l4] = p.lambda();
    let e = Complex64::from_polar(1.0, p.phi());
    let ec = e.conj();
    let (s, c) = params.r_omega.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let qr = params.q_r;
    let qrc = qr.conj();
    let ql2 = params.q_l.norm_sqr();
    let qr2 = qr.norm_sqr();
    let re = |x: f64| c64(x, 0.0);

    let t1 = l1 * l1 + ql2 * l2 * l2;
    let t2 = e * (l1 * l3) + ql2 * l2 * l4;
    let t3 = l1 * l1 + l2 * l2;
    let t4 = qr2 * l2 * l2;
    let t5 = e * (l1 * l3) + l2 * l4;
    let t6 = qr2 * l2 * l4;
    let t7 = l3 * l3 + ql2 * l4 * l4;
    let t8 = l3 * l3 + l4 * l4;
    let t9 = qr2 * l4 * l4;

    let z = re(0.0);
    let rows: [[Complex64; 8]; 8] = [
        [
            re(l0 * l0 * c2),
            z,
            z,
            z,
            ec * (l0 * l1 * c2),
            qrc * (l0 * l2 * c),
            re(l0 * l3 * c2),
            qrc * (l0 * l4 * c),
        ],
        [z, re(l0 * l0 * s2), z, z, z, ec * (l0 * l1 * s2), z, re(l0 * l3 * s2)],
        [z; 8],
        [z; 8],
        [
            e * (l0 * l1 * c2),
            z,
            z,
            z,
            re(t1 * c2),
            qrc * e * (l1 * l2 * c),
            t2 * c2,
            qrc * e * (l1 * l4 * c),
        ],
        [
            qr * (l0 * l2 * c),
            e * (l0 * l1 * s2),
            z,
            z,
            qr * ec * (l1 * l2 * c),
            re(t3 * s2 + t4 * c2),
            qr * (l2 * l3 * c),
            t5 * s2 + t6 * c2,
        ],
        [
            re(l0 * l3 * c2),
            z,
            z,
            z,
            t2.conj() * c2,
            qrc * (l2 * l3 * c),
            re(t7 * c2),
            qrc * (l3 * l4 * c),
        ],
        [
            qr * (l0 * l4 * c),
            re(l0 * l3 * s2),
            z,
            z,
            qr * ec * (l1 * l4 * c),
            t5.conj() * s2 + t6 * c2,
            qr * (l3 * l4 * c),
            re(t8 * s2 + t9 * c2),
        ],
    ];
    let matrix = ComplexMatrix::from_fn(8, 8, |i, j| rows[i][j]);
    let register = Register::new(vec![Qubit::A, Qubit::B, Qubit::IPlus]).expect("distinct");
    DensityMatrix::from_parts_unchecked(register, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::Register;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_6;

    fn rp(r: f64) -> RindlerParams {
        RindlerParams::from_angle(r).unwrap()
    }

    #[test]
    fn acceleration_limits() {
        let tiny = r_from_acceleration(1e-6, 1.0, 1.0).unwrap();
        assert_eq!(tiny, 0.0);
        let huge = r_from_acceleration(f64::INFINITY, 1.0, 1.0).unwrap();
        assert_eq!(huge, FRAC_PI_4);
        // 2πωc/a = ln 3  ⇒ cos²r = 3/4
        let a = 2.0 * PI / 3f64.ln();
        let r = r_from_acceleration(a, 1.0, 1.0).unwrap();
        assert!((r - FRAC_PI_6).abs() < 1e-15);
        assert!((r.cos().powi(2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn acceleration_matches_defining_relation() {
        for &a in &[0.1, 1.0, 3.7, 50.0, 1e4] {
            let (omega, c) = (0.8, 1.3);
            let r = r_from_acceleration(a, omega, c).unwrap();
            let expected = 1.0 / (1.0 + (-2.0 * PI * omega * c / a).exp()).sqrt();
            assert!((r.cos() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn acceleration_rejects_non_positive() {
        assert!(r_from_acceleration(0.0, 1.0, 1.0).is_err());
        assert!(r_from_acceleration(1.0, -1.0, 1.0).is_err());
        assert!(r_from_acceleration(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn angle_validation() {
        assert!(RindlerParams::from_angle(1.0).is_err());
        assert_eq!(RindlerParams::from_angle(0.7853981634).unwrap().r(), FRAC_PI_4);
    }

    #[test]
    fn channel_on_canonical_state_alice() {
        let p = AcinParams::new([0.6, 0.3, 0.4, 0.5, (1.0f64 - 0.86).sqrt()], 1.0).unwrap();
        let [l0, l1, l2, l3, l4] = p.lambda();
        let r = 0.5;
        let out = apply_single_mode_channel(&PureState::from_acin(&p), Qubit::A, &rp(r)).unwrap();
        assert_eq!(out.register().labels(), &[Qubit::I, Qubit::B, Qubit::C, Qubit::II]);
        let mut expected = vec![c64(0.0, 0.0); 16];
        // index = (abc << 1) | ii
        expected[0b0000] = c64(l0 * r.cos(), 0.0);
        expected[0b1000] = Complex64::from_polar(l1, 1.0);
        expected[0b1010] = c64(l2, 0.0);
        expected[0b1100] = c64(l3, 0.0);
        expected[0b1110] = c64(l4, 0.0);
        expected[0b1001] = c64(l0 * r.sin(), 0.0);
        for (a, b) in out.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn channel_identity_at_zero_and_one_state() {
        let psi = PureState::random(Register::abc(), 5);
        let out = apply_single_mode_channel(&psi, Qubit::B, &rp(0.0)).unwrap();
        for (k, a) in psi.amplitudes().iter().enumerate() {
            assert_eq!(out.amplitudes()[k << 1], *a);
            assert_eq!(out.amplitudes()[(k << 1) | 1], c64(0.0, 0.0));
        }

        let one = PureState::from_real(Register::new(vec![Qubit::A]).unwrap(), &[0.0, 1.0]).unwrap();
        let out = apply_single_mode_channel(&one, Qubit::A, &rp(0.6)).unwrap();
        assert_eq!(
            out.amplitudes(),
            &[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]
        );
    }

    #[test]
    fn channel_rejects_unknown_label() {
        let psi = PureState::bell00();
        assert_eq!(
            apply_single_mode_channel(&psi, Qubit::C, &rp(0.2)).unwrap_err(),
            Error::UnknownLabel(Qubit::C)
        );
    }

    #[test]
    fn ghz_at_horizon_has_three_quarter_weight() {
        let rho = reduced_state(&PureState::ghz(), Qubit::A, &rp(FRAC_PI_4)).unwrap();
        let w = rho.eigen().values;
        assert!((w[0] - 0.75).abs() < 1e-14);
        assert!((w[1] - 0.25).abs() < 1e-14);
        assert!(w[2..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn reduced_state_at_zero_is_the_input_projector() {
        let psi = PureState::random(Register::abc(), 8);
        let rho = reduced_state(&psi, Qubit::C, &rp(0.0)).unwrap();
        assert!(rho.matrix().max_abs_diff(psi.projector().matrix()) < 1e-15);
    }

    #[test]
    fn kraus_branches_sum_to_reduced_state() {
        let psi = PureState::random(Register::abc(), 12);
        let r = rp(0.4);
        let [k0, k1] = kraus_branches(&psi, Qubit::B, &r).unwrap();
        let sum = k0.projector().matrix() + k1.projector().matrix();
        let rho = reduced_state(&psi, Qubit::B, &r).unwrap();
        assert!(sum.max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn unruh_mode_one_particle_with_unit_qr() {
        let one = PureState::from_real(Register::new(vec![Qubit::A]).unwrap(), &[0.0, 1.0]).unwrap();
        let params = UnruhModeParams::real(1.0, 0.5).unwrap();
        let out = apply_unruh_mode(&one, Qubit::A, &params).unwrap();
        // q_R |1⟩_I⁺|0⟩_II⁻ ⊗ |0⟩_L
        let (s, c) = 0.5f64.sin_cos();
        let mut expected = vec![c64(0.0, 0.0); 16];
        expected[0b1000] = c64(c, 0.0);
        expected[0b1110] = c64(-s, 0.0);
        for (a, b) in out.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn unruh_mode_identity_embedding() {
        let psi = PureState::random(Register::abc(), 21);
        let params = UnruhModeParams::real(1.0, 0.0).unwrap();
        let out = apply_unruh_mode(&psi, Qubit::A, &params).unwrap();
        for (k, a) in psi.amplitudes().iter().enumerate() {
            assert_eq!(out.amplitudes()[k << 3], *a);
        }
        assert!((crate::qmat::norm(out.amplitudes()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unruh_mode_is_norm_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..10 {
            let psi = PureState::random(Register::abc(), seed);
            let q = rand::Rng::random_range(&mut rng, 0.0..1.0);
            let phase = Complex64::from_polar(1.0, 0.7);
            let params = UnruhModeParams::new(phase * q, c64((1.0f64 - q * q).sqrt(), 0.0), 0.3).unwrap();
            let out = apply_unruh_mode(&psi, Qubit::B, &params).unwrap();
            assert!((crate::qmat::norm(out.amplitudes()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn antiparticle_sector_is_a_state() {
        let p = AcinParams::random(&mut ChaCha8Rng::seed_from_u64(9));
        let params = UnruhModeParams::real(0.7, 0.5).unwrap();
        let rho = sector_state(&PureState::from_acin(&p), Qubit::C, &params, Sector::Antiparticle).unwrap();
        assert_eq!(rho.register().labels(), &[Qubit::A, Qubit::B, Qubit::IMinus]);
        assert!((rho.matrix().trace() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn closed_form_vanishing_rows() {
        let p = AcinParams::new([0.6, 0.0, 0.0, 0.0, 0.8], 0.4).unwrap();
        let params = UnruhModeParams::real(0.6, 0.3).unwrap();
        let m = particle_sector_closed_form(&p, &params);
        for i in 2..6 {
            for j in 0..8 {
                assert_eq!(m.matrix()[(i, j)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn closed_form_at_zero_angle_is_canonical_projector() {
        let p = AcinParams::random(&mut ChaCha8Rng::seed_from_u64(31));
        let params = UnruhModeParams::real(1.0, 0.0).unwrap();
        let m = particle_sector_closed_form(&p, &params);
        let psi = PureState::from_acin(&p);
        assert!(m.matrix().max_abs_diff(psi.projector().matrix()) < 1e-15);
    }
}
