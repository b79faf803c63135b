//! Driven non-Hermitian Schrödinger evolution, the Lindblad master-equation
//! oracle, and steady-window time averages.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::hamiltonian::{Generator, HamiltonianTerms};
use crate::hilbert::OperatorMatrix;
pub use crate::integrator::IntegrationStats;
use crate::integrator::integrate;
use crate::observables::{expectation, expectation_density};
use crate::scalar::{lit, to_f64, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig<T> {
    pub t_start: T,
    pub t_end: T,
    /// Spacing of stored output points.
    pub output_interval: T,
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub max_steps: usize,
    /// Eigenvalues of ρ below −shift abort a Lindblad run.
    pub positivity_shift: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            t_start: T::zero(),
            t_end: lit(500.0),
            output_interval: lit(0.5),
            rtol: lit(1e-9),
            atol: lit(1e-12),
            max_step: T::infinity(),
            max_steps: 100_000_000,
            positivity_shift: lit(1e-8),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn span(t_end: T, output_interval: T) -> Self {
        Self { t_end, output_interval, ..Self::default() }
    }

    pub fn with_tolerances(mut self, rtol: T, atol: T) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start) || !self.t_end.is_finite() || !self.t_start.is_finite() {
            return Err(SimError::InvalidConfig("t_end must exceed t_start"));
        }
        if !(self.rtol > T::zero() && self.atol > T::zero()) {
            return Err(SimError::InvalidConfig("tolerances must be positive"));
        }
        if !(self.output_interval > T::zero()) || !self.output_interval.is_finite() {
            return Err(SimError::InvalidConfig("output_interval must be positive"));
        }
        if !(self.max_step > T::zero()) {
            return Err(SimError::InvalidConfig("max_step must be positive"));
        }
        Ok(())
    }
}

/// State vectors on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<C<T>>>,
    /// ⟨ψ|ψ⟩ at each output time.
    pub norms: Vec<T>,
    pub stats: IntegrationStats,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[C<T>] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Normalized expectation value of `op` at every output time.
    pub fn series(&self, op: &OperatorMatrix<T>) -> Result<Vec<T>> {
        self.states.iter().map(|s| expectation(op, s).map(|z| z.re)).collect()
    }
}

/// Density matrices (row-major, `dim × dim`) on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrajectory<T> {
    pub dim: usize,
    pub times: Vec<T>,
    pub states: Vec<Vec<C<T>>>,
    pub traces: Vec<T>,
    pub stats: IntegrationStats,
}

impl<T: Real> DensityTrajectory<T> {
    pub fn series(&self, op: &OperatorMatrix<T>) -> Result<Vec<T>> {
        self.states.iter().map(|r| expectation_density(op, r).map(|z| z.re)).collect()
    }
}

/// |ψ⟩⟨ψ| as a row-major dense matrix.
pub fn pure_density<T: Real>(psi: &[C<T>]) -> Vec<C<T>> {
    psi.iter().flat_map(|a| psi.iter().map(move |b| *a * b.conj())).collect()
}

fn squared_norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_initial<T: Real>(gen: &Generator<T>, len: usize) -> Result<()> {
    if len != gen.dim() {
        return Err(SimError::DimensionMismatch { expected: gen.dim(), found: len });
    }
    Ok(())
}

/// Solves i∂ψ/∂t = H(t)ψ with the non-Hermitian H (decay included).
pub fn evolve_schrodinger<T: Real>(
    h: &HamiltonianTerms<T>,
    psi0: &[C<T>],
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    let gen = h.compile()?;
    check_initial(&gen, psi0.len())?;
    let n0 = squared_norm(psi0);
    if n0 == T::zero() {
        return Err(SimError::ZeroNorm);
    }
    if (n0 - T::one()).abs() > lit(1e-8) {
        return Err(SimError::InvalidConfig("initial state must be normalized"));
    }
    let mut hv = gen.scratch();
    let minus_i = C::new(T::zero(), -T::one());
    let rhs = |t: T, y: &[C<T>], dy: &mut [C<T>]| {
        gen.assemble(t, &mut hv);
        gen.matvec(&hv, y, dy);
        dy.iter_mut().for_each(|d| *d = *d * minus_i);
    };
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new(), norms: Vec::new(), stats: Default::default() };
    let stats = integrate(rhs, psi0.to_vec(), cfg, |t, y| {
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SimError::NonFinite { t: to_f64(t) });
        }
        traj.times.push(t);
        traj.norms.push(squared_norm(y));
        traj.states.push(y.to_vec());
        Ok(())
    })?;
    traj.stats = stats;
    Ok(traj)
}

/// Lindblad evolution using the Hermitian part of `h` and one collapse
/// operator √Γ_m·b_m per mode with a nonzero decay rate in `h`.
pub fn evolve_lindblad<T: Real>(
    h: &HamiltonianTerms<T>,
    rho0: &[C<T>],
    cfg: &IntegratorConfig<T>,
) -> Result<DensityTrajectory<T>> {
    let gen = h.compile()?;
    let dim = gen.dim();
    if rho0.len() != dim * dim {
        return Err(SimError::DimensionMismatch { expected: dim * dim, found: rho0.len() });
    }
    // jumps[m] = (rate, [(row, col, √n)]) for each decaying mode
    let jumps: Vec<(T, Vec<(usize, usize, T)>)> = gen
        .mode_decay_rates()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > T::zero())
        .map(|(m, &g)| {
            let occ = gen.occupations();
            let lowered: Vec<_> = occ
                .iter()
                .enumerate()
                .filter(|(_, o)| o[m] > 0)
                .filter_map(|(j, o)| {
                    let mut target = *o;
                    target[m] -= 1;
                    let i = occ.iter().position(|x| *x == target)?;
                    Some((i, j, lit::<T>(o[m] as f64).sqrt()))
                })
                .collect();
            (g, lowered)
        })
        .collect();

    let mut hv = gen.scratch();
    let i_unit = C::new(T::zero(), T::one());
    let rhs = |t: T, rho: &[C<T>], out: &mut [C<T>]| {
        gen.assemble(t, &mut hv);
        out.iter_mut().for_each(|z| *z = C::zero());
        // −i(H ρ − ρ H†) with the non-Hermitian H carries the anticommutator part
        for r in 0..dim {
            for (k, v) in gen.row(&hv, r) {
                let coeff = -i_unit * v;
                let src = &rho[k * dim..(k + 1) * dim];
                for (o, s) in out[r * dim..(r + 1) * dim].iter_mut().zip(src) {
                    *o = *o + coeff * s;
                }
            }
        }
        for j in 0..dim {
            for (k, v) in gen.row(&hv, j) {
                let coeff = i_unit * v.conj();
                for r in 0..dim {
                    out[r * dim + j] = out[r * dim + j] + coeff * rho[r * dim + k];
                }
            }
        }
        for (rate, lowered) in &jumps {
            for &(i, k, a) in lowered {
                for &(j, l, b) in lowered {
                    out[i * dim + j] = out[i * dim + j] + rho[k * dim + l] * (*rate * a * b);
                }
            }
        }
    };
    let shift = cfg.positivity_shift;
    let mut traj = DensityTrajectory { dim, times: Vec::new(), states: Vec::new(), traces: Vec::new(), stats: Default::default() };
    let stats = integrate(rhs, rho0.to_vec(), cfg, |t, rho| {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SimError::NonFinite { t: to_f64(t) });
        }
        if !crate::operator::is_positive_with_shift(rho, dim, shift) {
            return Err(SimError::NotPositive { t: to_f64(t), shift: to_f64(shift) });
        }
        traj.times.push(t);
        traj.traces.push((0..dim).map(|i| rho[i * dim + i].re).sum());
        traj.states.push(rho.to_vec());
        Ok(())
    })?;
    traj.stats = stats;
    Ok(traj)
}

/// Trapezoidal time average over the final fraction of an output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowAverager<T> {
    start: usize,
    weights: Vec<T>,
}

impl<T: Real> WindowAverager<T> {
    pub fn new(times: &[T], window_fraction: T) -> Result<Self> {
        if !(window_fraction > T::zero() && window_fraction <= T::one()) || times.len() < 2 {
            return Err(SimError::EmptyWindow);
        }
        let (t0, t1) = (times[0], times[times.len() - 1]);
        let from = t1 - window_fraction * (t1 - t0);
        let slack = (t1 - t0) * lit(1e-12);
        let start = times.iter().position(|&t| t >= from - slack).unwrap_or(times.len());
        let w = &times[start..];
        if w.len() < 2 {
            return Err(SimError::EmptyWindow);
        }
        let total = w[w.len() - 1] - w[0];
        let half = lit::<T>(0.5);
        let mut weights = vec![T::zero(); w.len()];
        for k in 0..w.len() - 1 {
            let dt = (w[k + 1] - w[k]) * half / total;
            weights[k] = weights[k] + dt;
            weights[k + 1] = weights[k + 1] + dt;
        }
        Ok(Self { start, weights })
    }

    /// Index of the first output point inside the window.
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn average(&self, values: &[T]) -> T {
        values[self.start..].iter().zip(&self.weights).map(|(v, w)| *v * *w).sum()
    }
}

/// Time averages of normalized expectation values over the final
/// `window_fraction` of the trajectory.
pub fn steady_window_stats<T: Real>(
    traj: &Trajectory<T>,
    window_fraction: T,
    observables: &[&OperatorMatrix<T>],
) -> Result<Vec<T>> {
    let avg = WindowAverager::new(&traj.times, window_fraction)?;
    observables
        .iter()
        .map(|op| {
            let mut series = vec![T::zero(); traj.len()];
            for k in avg.start()..traj.len() {
                series[k] = expectation(op, &traj.states[k])?.re;
            }
            Ok(avg.average(&series))
        })
        .collect()
}
