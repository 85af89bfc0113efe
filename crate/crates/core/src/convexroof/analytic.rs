use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{three_tangle_acin, MeasureKind, MeasureResult, Provenance};
use crate::qmat::{self, c64, Qubit, Register};
use crate::states::{AcinParams, PureState};
use crate::unruh::{kraus_branches, RindlerParams};

/// `√Δ` (or `√σ`) at or above this counts as a rank-1 reduced state.
const RANK_ONE_TOL: f64 = 1e-12;
/// Below this norm the explicit minus-state coefficients cancel badly and the
/// orthogonal-complement form is used instead.
const MINUS_NORM_FLOOR: f64 = 1e-6;
/// Internal agreement required between the bracket and its closed form.
const BRACKET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Alice,
    Bob,
    Charlie,
}

impl Branch {
    pub fn from_party(q: Qubit) -> Result<Self> {
        match q {
            Qubit::A => Ok(Branch::Alice),
            Qubit::B => Ok(Branch::Bob),
            Qubit::C => Ok(Branch::Charlie),
            other => Err(Error::InvalidParams(format!("{other} is not an inertial party"))),
        }
    }

    pub fn party(self) -> Qubit {
        match self {
            Branch::Alice => Qubit::A,
            Branch::Bob => Qubit::B,
            Branch::Charlie => Qubit::C,
        }
    }
}

/// Closed-form intermediates of a two-term decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intermediates {
    Alice {
        z_plus: f64,
        z_minus: f64,
        y_plus: Complex64,
        y_minus: Complex64,
        n_plus: f64,
        n_minus: f64,
    },
    /// Also used for Charlie, evaluated with `λ2 ↔ λ3`.
    Bob {
        x: f64,
        y: f64,
        z: f64,
        n_plus: f64,
        n_minus: f64,
    },
}

/// `ρ = p|+⟩⟨+| + (1−p)|−⟩⟨−|` for the reduced canonical state.
#[derive(Debug, Clone)]
pub struct Rank2Decomposition {
    pub branch: Branch,
    pub p: f64,
    pub state_plus: PureState,
    pub state_minus: PureState,
    /// `Δ` for Alice, `σ` for Bob and Charlie.
    pub discriminant: f64,
    pub intermediates: Intermediates,
    /// The phase the roof minimum selects.
    pub theta: f64,
    /// Amplitude ratios `z±/N±` (Alice) or `(c ± √σ)/N±` (Bob); real.
    pub ratio_plus: f64,
    pub ratio_minus: f64,
    /// `4λ0²λ4² cos²r`.
    pub tangle_scale: f64,
}

impl Rank2Decomposition {
    /// Closed-form tangles of `|+⟩` and `|−⟩`: `scale · ratio⁴`.
    pub fn closed_form_tangles(&self) -> (f64, f64) {
        (
            self.tangle_scale * self.ratio_plus.powi(4),
            self.tangle_scale * self.ratio_minus.powi(4),
        )
    }

    /// Closed-form tangle of the family member `√p|+⟩ + e^{iθ}√(1−p)|−⟩`.
    pub fn family_tangle(&self, theta: f64) -> f64 {
        let p = self.p;
        let (kp, km) = (self.ratio_plus, self.ratio_minus);
        match self.intermediates {
            Intermediates::Alice { .. } => {
                let amp = p * kp * kp + (1.0 - p) * km * km + 2.0 * (p * (1.0 - p)).sqrt() * kp * km * theta.cos();
                self.tangle_scale * amp * amp
            }
            Intermediates::Bob { x, y, z, .. } => {
                let c = theta.cos();
                self.tangle_scale * ((x - y).powi(2) + z * z + 4.0 * x * y * c * c - 2.0 * z * (x + y) * c)
            }
        }
    }

    /// Average tangle of the equal-weight pair at `θ`, divided by `4λ0²λ4² cos²r`.
    pub fn roof_bracket(&self, theta: f64) -> f64 {
        let p = self.p;
        let (kp, km) = (self.ratio_plus, self.ratio_minus);
        let c2 = theta.cos().powi(2);
        match self.intermediates {
            Intermediates::Alice { .. } => {
                let a = p * kp * kp + (1.0 - p) * km * km;
                a * a + 4.0 * p * (1.0 - p) * kp * kp * km * km * c2
            }
            Intermediates::Bob { x, y, z, .. } => (x - y).powi(2) + z * z + 4.0 * x * y * c2,
        }
    }
}

/// Reduced canonical state with Alice accelerated.
pub fn alice_decomposition(params: &AcinParams, r: &RindlerParams) -> Result<Rank2Decomposition> {
    let [l0, l1, l2, l3, l4] = params.lambda();
    let phase = Complex64::from_polar(1.0, params.phi());
    let (s, cr) = r.r().sin_cos();
    let s2 = s * s;

    let c0 = 1.0 - 2.0 * l0 * l0 * s2;
    let delta = c0 * c0 + 4.0 * l0 * l0 * l1 * l1 * s2;
    let sd = delta.sqrt();
    if l0 == 0.0 || sd >= 1.0 - RANK_ONE_TOL {
        return Err(Error::Degenerate("reduced state has rank 1".into()));
    }
    if c0 + sd <= RANK_ONE_TOL {
        return Err(Error::Degenerate("reduced state has two equal eigenvalues".into()));
    }
    // 1 − λ0² sin²r − λ1², written without cancellation
    let rest = l0 * l0 * cr * cr + l2 * l2 + l3 * l3 + l4 * l4;
    let z_plus = c0 + sd;
    let z_minus = -4.0 * l0 * l0 * l1 * l1 * s2 / (c0 + sd);
    let y_plus = phase * (l1 * (1.0 + sd));
    let y_minus = phase * (l1 * 4.0 * l0 * l0 * s2 * rest / (1.0 + sd));

    let vector = |z: f64, y: Complex64| {
        let mut a = vec![c64(0.0, 0.0); 8];
        a[0b000] = c64(l0 * cr * z, 0.0);
        a[0b100] = y;
        a[0b101] = c64(l2 * z, 0.0);
        a[0b110] = c64(l3 * z, 0.0);
        a[0b111] = c64(l4 * z, 0.0);
        a
    };
    let register = Register::new(vec![Qubit::I, Qubit::B, Qubit::C])?;
    let vp = vector(z_plus, y_plus);
    let n_plus = qmat::norm(&vp);
    let vm = vector(z_minus, y_minus);
    let n_minus = qmat::norm(&vm);

    let state_plus = normalized(register.clone(), vp, n_plus);
    let (state_minus, ratio_minus) = if n_minus == 0.0 {
        // λ1 = 0: the minus state is the |100⟩ direction itself.
        let mut a = vec![c64(0.0, 0.0); 8];
        a[0b100] = phase;
        (PureState::from_parts_unchecked(register, a), 0.0)
    } else {
        (normalized(register, vm, n_minus), z_minus / n_minus)
    };

    Ok(Rank2Decomposition {
        branch: Branch::Alice,
        p: (1.0 + sd) / 2.0,
        state_plus,
        state_minus,
        discriminant: delta,
        intermediates: Intermediates::Alice {
            z_plus,
            z_minus,
            y_plus,
            y_minus,
            n_plus,
            n_minus,
        },
        theta: FRAC_PI_2,
        ratio_plus: z_plus / n_plus,
        ratio_minus,
        tangle_scale: three_tangle_acin(params).value * cr * cr,
    })
}

/// Reduced canonical state with Bob accelerated.
pub fn bob_decomposition(params: &AcinParams, r: &RindlerParams) -> Result<Rank2Decomposition> {
    let [l0, l1, l2, l3, l4] = params.lambda();
    let phase = Complex64::from_polar(1.0, params.phi());
    let (s, cr) = r.r().sin_cos();
    let s2 = s * s;

    let big_l = l0 * l0 + l1 * l1 + l2 * l2;
    let c = 1.0 - 2.0 * s2 * big_l;
    // g = sin r (λ1λ3 e^{iφ} + λ2λ4); q = |g|²/sin²r
    let g_unit = phase * (l1 * l3) + l2 * l4;
    let q = g_unit.norm_sqr();
    let sigma = c * c + 4.0 * s2 * q;
    let sd = sigma.sqrt();
    if sd >= 1.0 - RANK_ONE_TOL {
        return Err(Error::Degenerate("reduced state has rank 1".into()));
    }
    if c + sd <= RANK_ONE_TOL {
        return Err(Error::Degenerate("reduced state has two equal eigenvalues".into()));
    }
    let p = (1.0 + sd) / 2.0;
    let e_plus = c + sd;
    let e_minus = -4.0 * s2 * q / (c + sd);

    let a010 = (phase.conj() * (l1 * l3) + l2 * l4) * (2.0 * l0 * s2);
    let vector = |e: f64| {
        let mut a = vec![c64(0.0, 0.0); 8];
        a[0b000] = c64(l0 * cr * e, 0.0);
        a[0b010] = a010;
        a[0b100] = phase * (l1 * cr * e);
        a[0b101] = c64(l2 * cr * e, 0.0);
        a[0b110] = c64(l3 * (e + 2.0 * s2 * l1 * l1), 0.0) + phase * (2.0 * l1 * l2 * l4 * s2);
        a[0b111] = c64(l4 * (e + 2.0 * s2 * l2 * l2), 0.0) + phase.conj() * (2.0 * l1 * l2 * l3 * s2);
        a
    };
    let register = Register::new(vec![Qubit::A, Qubit::I, Qubit::C])?;
    let vp = vector(e_plus);
    let n_plus = qmat::norm(&vp);
    let vm = vector(e_minus);
    let n_minus = qmat::norm(&vm);

    let state_plus = normalized(register.clone(), vp, n_plus);
    let (state_minus, ratio_minus, z) = if n_minus >= MINUS_NORM_FLOOR {
        let z = 8.0 * s2 * (p * (1.0 - p)).sqrt() * q / (n_plus * n_minus);
        (normalized(register.clone(), vm, n_minus), e_minus / n_minus, z)
    } else {
        // e^{-i arg g} (−2g K0ψ + (c + √σ) K1ψ), the same ray as the explicit
        // coefficients, without their cancellation near g = 0.
        let [k0, k1] = kraus_branches(&PureState::from_acin(params), Qubit::B, r)?;
        let g = g_unit * s;
        let gabs = g.norm();
        let rephase = if gabs > 0.0 { (g / gabs).conj() } else { c64(1.0, 0.0) };
        let v: Vec<Complex64> = k0
            .amplitudes()
            .iter()
            .zip(k1.amplitudes())
            .map(|(a, b)| rephase * (-g * 2.0 * a + b * (c + sd)))
            .collect();
        let nv = qmat::norm(&v);
        let z = 4.0 * (p * (1.0 - p)).sqrt() * gabs * (c + sd) / (n_plus * nv);
        (normalized(register.clone(), v, nv), -2.0 * gabs / nv, z)
    };
    let ratio_plus = e_plus / n_plus;

    Ok(Rank2Decomposition {
        branch: Branch::Bob,
        p,
        state_plus,
        state_minus,
        discriminant: sigma,
        intermediates: Intermediates::Bob {
            x: p * ratio_plus * ratio_plus,
            y: (1.0 - p) * ratio_minus * ratio_minus,
            z,
            n_plus,
            n_minus,
        },
        theta: FRAC_PI_2,
        ratio_plus,
        ratio_minus,
        tangle_scale: three_tangle_acin(params).value * cr * cr,
    })
}

/// Charlie accelerated: Bob's decomposition of the `λ2 ↔ λ3` state with B and C exchanged.
pub fn charlie_decomposition(params: &AcinParams, r: &RindlerParams) -> Result<Rank2Decomposition> {
    let mut d = bob_decomposition(&params.swap_bc(), r)?;
    let register = Register::new(vec![Qubit::A, Qubit::B, Qubit::I])?;
    let relabel = |s: &PureState| -> Result<PureState> {
        let swapped = s.permute(&[0, 2, 1])?;
        Ok(PureState::from_parts_unchecked(
            register.clone(),
            swapped.amplitudes().to_vec(),
        ))
    };
    d.state_plus = relabel(&d.state_plus)?;
    d.state_minus = relabel(&d.state_minus)?;
    d.branch = Branch::Charlie;
    Ok(d)
}

pub fn decomposition(params: &AcinParams, r: &RindlerParams, party: Qubit) -> Result<Rank2Decomposition> {
    match Branch::from_party(party)? {
        Branch::Alice => alice_decomposition(params, r),
        Branch::Bob => bob_decomposition(params, r),
        Branch::Charlie => charlie_decomposition(params, r),
    }
}

fn normalized(register: Register, v: Vec<Complex64>, n: f64) -> PureState {
    PureState::from_parts_unchecked(register, v.into_iter().map(|a| a / n).collect())
}

/// `(|F,θ⟩, |F,θ+π⟩)`; their equal mixture reproduces the decomposed state.
pub fn equal_weight_family(d: &Rank2Decomposition, theta: f64) -> (PureState, PureState) {
    let sp = d.p.sqrt();
    let sm = (1.0 - d.p).max(0.0).sqrt();
    let member = |th: f64| {
        let ph = Complex64::from_polar(sm, th);
        let amps = d
            .state_plus
            .amplitudes()
            .iter()
            .zip(d.state_minus.amplitudes())
            .map(|(a, b)| a * sp + ph * b)
            .collect();
        PureState::from_parts_unchecked(d.state_plus.register().clone(), amps)
    };
    (member(theta), member(theta + std::f64::consts::PI))
}

/// Roof bracket at `θ` (1 at `θ = π/2` for every non-degenerate input).
pub fn mixed_tangle_bracket(params: &AcinParams, r: &RindlerParams, party: Qubit, theta: f64) -> Result<f64> {
    Ok(decomposition(params, r, party)?.roof_bracket(theta))
}

/// `τ3 = 4λ0²λ4² cos²r`, after checking that the roof bracket of the
/// closed-form decomposition equals one at `θ = π/2`. For the Bob and Charlie
/// branches this is the identity `(X − Y)² + Z² = 1`.
pub fn analytic_mixed_tangle(params: &AcinParams, r: &RindlerParams, party: Qubit) -> Result<MeasureResult> {
    let scale = three_tangle_acin(params).value * r.r().cos().powi(2);
    match decomposition(params, r, party) {
        Ok(d) => {
            let bracket = d.roof_bracket(FRAC_PI_2);
            if (bracket - 1.0).abs() > BRACKET_TOL {
                return Err(Error::InvariantViolation(format!(
                    "roof bracket at θ = π/2 is {bracket}, expected 1"
                )));
            }
        }
        // rank 1 (the state is pure) or equal weights with λ4 = 0: nothing to cross-check
        Err(Error::Degenerate(_)) => {}
        Err(e) => return Err(e),
    }
    MeasureResult::new(scale, MeasureKind::ThreeTangle, Provenance::Analytic)
}
