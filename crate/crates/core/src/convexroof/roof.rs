use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{monogamy_residual, tangle_of_vector};
use crate::qmat::{self, c64, Qubit, Register};
use crate::states::{DensityMatrix, PureState};

/// Pure-state quantity averaged over a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoofObjective {
    /// `4|d1 − 2d2 + 4d3|`.
    #[default]
    Hyperdeterminant,
    /// `C²_{f(rest)} − C²_{f,x} − C²_{f,y}` about the focus qubit. Equal to the
    /// hyperdeterminant form on pure states, but far slower to evaluate.
    MonogamyResidual(Qubit),
}

#[derive(Debug, Clone)]
pub struct RoofOptions {
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop a start once a full sweep improves the objective by less than this.
    pub tolerance: f64,
    pub seed: u64,
    pub objective: RoofObjective,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions {
            starts: 16,
            max_iterations: 500,
            tolerance: 1e-10,
            seed: 0x5eed,
            objective: RoofObjective::Hyperdeterminant,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoofCandidate {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
    pub average_tangle: f64,
}

impl RoofCandidate {
    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.weights, &self.states)
    }
}

/// [`optimize_roof_with`] under the default options.
pub fn optimize_roof(rho: &DensityMatrix, m: usize) -> Result<RoofCandidate> {
    optimize_roof_with(rho, m, &RoofOptions::default())
}

/// Minimize `Σ wᵢ τ3(ψᵢ)` over `m`-element decompositions of a rank ≤ 2 state.
///
/// Element `i` is `U_{i0} √λ0 |μ0⟩ + U_{i1} √λ1 |μ1⟩` for an `m × 2` isometry
/// `U` built from Givens rotations; its weight is its squared norm.
pub fn optimize_roof_with(rho: &DensityMatrix, m: usize, opts: &RoofOptions) -> Result<RoofCandidate> {
    if !(2..=4).contains(&m) {
        return Err(Error::InvalidParams(format!(
            "decomposition size must be 2, 3 or 4, got {m}"
        )));
    }
    if rho.num_qubits() != 3 {
        return Err(Error::WrongRegisterSize {
            expected: 3,
            actual: rho.num_qubits(),
        });
    }
    if opts.starts == 0 {
        return Err(Error::InvalidParams("at least one start is required".into()));
    }
    let eig = rho.eigen();
    let rank = eig.rank();
    if rank > 2 {
        return Err(Error::RankTooHigh(rank));
    }
    let register = rho.register().clone();
    let mu0 = eig.vector(0);

    if rank <= 1 {
        let state = PureState::from_parts_unchecked(register.clone(), mu0);
        let average_tangle = element_value(&register, state.amplitudes(), 1.0, opts.objective)?;
        return Ok(RoofCandidate {
            weights: vec![1.0],
            states: vec![state],
            average_tangle,
        });
    }

    let mut mu1 = eig.vector(1);
    let ov = qmat::inner(&mu0, &mu1);
    mu1.iter_mut().zip(&mu0).for_each(|(b, a)| *b -= ov * a);
    let n1 = qmat::norm(&mu1);
    mu1.iter_mut().for_each(|b| *b /= n1);

    let w0 = eig.values[0].max(0.0);
    let w1 = eig.values[1].max(0.0);
    let total = w0 + w1;
    let v0: Vec<Complex64> = mu0.iter().map(|z| z * (w0 / total).sqrt()).collect();
    let v1: Vec<Complex64> = mu1.iter().map(|z| z * (w1 / total).sqrt()).collect();

    let problem = Problem {
        register: &register,
        m,
        v0: &v0,
        v1: &v1,
        objective: opts.objective,
    };
    let n_params = 4 * m - 5;

    let runs: Vec<(f64, Vec<f64>)> = (0..opts.starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(start as u64);
            let x0: Vec<f64> = (0..n_params).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            coordinate_descent(&problem, x0, opts.max_iterations, opts.tolerance)
        })
        .collect();

    // first strictly-best start wins, so the result does not depend on scheduling
    let (best_value, best_x) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one start");
    if !best_value.is_finite() {
        return Err(Error::InvariantViolation("roof objective is not finite".into()));
    }

    let elements = problem.elements(&best_x);
    let mut weights = Vec::with_capacity(m);
    let mut states = Vec::with_capacity(m);
    for xi in elements {
        let w = qmat::norm_sqr(&xi);
        if w <= 1e-300 {
            continue;
        }
        let n = w.sqrt();
        weights.push(w);
        states.push(PureState::from_parts_unchecked(
            register.clone(),
            xi.into_iter().map(|z| z / n).collect(),
        ));
    }
    let wsum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= wsum);

    Ok(RoofCandidate {
        weights,
        states,
        average_tangle: best_value,
    })
}

/// `w · f(ξ/‖ξ‖)` for an unnormalized element `ξ` of squared norm `w`.
fn element_value(register: &Register, xi: &[Complex64], w: f64, objective: RoofObjective) -> Result<f64> {
    match objective {
        // τ is homogeneous of degree four, so w·τ(ξ/√w) = τ(ξ)/w
        RoofObjective::Hyperdeterminant => Ok(tangle_of_vector(xi) / w),
        RoofObjective::MonogamyResidual(focus) => {
            let n = w.sqrt();
            let psi = PureState::from_parts_unchecked(register.clone(), xi.iter().map(|z| z / n).collect());
            Ok(w * monogamy_residual(&psi, focus)?)
        }
    }
}

struct Problem<'a> {
    register: &'a Register,
    m: usize,
    v0: &'a [Complex64],
    v1: &'a [Complex64],
    objective: RoofObjective,
}

impl Problem<'_> {
    /// Columns of the `m × 2` isometry.
    fn isometry(&self, x: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = self.m;
        let mut col0 = vec![c64(0.0, 0.0); m];
        col0[0] = c64(1.0, 0.0);
        let mut col1 = vec![c64(0.0, 0.0); m];
        col1[1] = c64(1.0, 0.0);

        let (first, rest) = x.split_at(2 * (m - 1));
        let (second, beta) = rest.split_at(2 * (m - 2));
        // rotations fixing e0 spread e1 over span{e1, …}
        for (k, pair) in second.chunks_exact(2).enumerate() {
            givens(&mut col1, k + 1, pair[0], pair[1]);
        }
        for (k, pair) in first.chunks_exact(2).enumerate() {
            givens(&mut col0, k, pair[0], pair[1]);
            givens(&mut col1, k, pair[0], pair[1]);
        }
        let ph = Complex64::from_polar(1.0, beta[0]);
        col1.iter_mut().for_each(|z| *z *= ph);
        (col0, col1)
    }

    fn elements(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        let (c0, c1) = self.isometry(x);
        (0..self.m)
            .map(|i| {
                self.v0
                    .iter()
                    .zip(self.v1)
                    .map(|(a, b)| c0[i] * a + c1[i] * b)
                    .collect()
            })
            .collect()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for xi in self.elements(x) {
            let w = qmat::norm_sqr(&xi);
            if w <= 1e-300 {
                continue;
            }
            total += element_value(self.register, &xi, w, self.objective).unwrap_or(f64::INFINITY);
        }
        total
    }
}

/// `(x_k, x_{k+1}) ← [[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]] (x_k, x_{k+1})`.
fn givens(v: &mut [Complex64], k: usize, theta: f64, phi: f64) {
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let (a, b) = (v[k], v[k + 1]);
    v[k] = a * c - e.conj() * b * s;
    v[k + 1] = e * a * s + b * c;
}

const GRID_POINTS: usize = 16;
const GOLDEN_TOL: f64 = 1e-9;

fn coordinate_descent(problem: &Problem<'_>, mut x: Vec<f64>, max_iterations: usize, tol: f64) -> (f64, Vec<f64>) {
    let mut f = problem.value(&x);
    for _ in 0..max_iterations {
        let f_start = f;
        for k in 0..x.len() {
            let (t, ft) = line_search(problem, &mut x, k, f);
            if ft < f {
                x[k] = t;
                f = ft;
            }
        }
        if f_start - f < tol {
            break;
        }
    }
    (f, x)
}

/// Grid scan over one period of coordinate `k`, refined by golden-section search.
fn line_search(problem: &Problem<'_>, x: &mut [f64], k: usize, f_now: f64) -> (f64, f64) {
    let x_k = x[k];
    let mut eval = |t: f64| {
        x[k] = t;
        problem.value(x)
    };
    let step = 2.0 * PI / GRID_POINTS as f64;
    let mut best = (x_k, f_now);
    for i in 1..GRID_POINTS {
        let t = x_k + step * i as f64;
        let ft = eval(t);
        if ft < best.1 {
            best = (t, ft);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while hi - lo > GOLDEN_TOL {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = eval(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = eval(d);
        }
    }
    for (t, ft) in [(c, fc), (d, fd)] {
        if ft < best.1 {
            best = (t, ft);
        }
    }
    x[k] = x_k;
    (best.0.rem_euclid(2.0 * PI), best.1)
}
