//! Expectation values, g²(0), polariton populations, the χ̄ = 0 transmission
//! spectrum and the cosθ sweep.

use log::warn;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_schrodinger, DensityTrajectory, IntegratorConfig, Trajectory, WindowAverager};
use crate::error::{Result, SimError};
use crate::hamiltonian::{add_atomic_decay, build_h_eit, build_with_atomic_decay, HamiltonianKind};
use crate::hilbert::{Basis, Mode, OperatorMatrix, Truncation};
use crate::model::{derive_params, DerivedParams, PhysicalParams};
use crate::scalar::{lit, re, Real, C};

/// Environment variable capping the worker count of sweeps and spectra.
pub const THREADS_ENV: &str = "POLARITON_SIM_THREADS";

/// ⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩.
pub fn expectation<T: Real>(op: &OperatorMatrix<T>, psi: &[C<T>]) -> Result<C<T>> {
    if psi.len() != op.dim() {
        return Err(SimError::DimensionMismatch { expected: op.dim(), found: psi.len() });
    }
    let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
    if norm == T::zero() {
        return Err(SimError::ZeroNorm);
    }
    Ok(op.sandwich(psi, psi) / norm)
}

/// Tr(Oρ) / Tr(ρ) for a row-major density matrix.
pub fn expectation_density<T: Real>(op: &OperatorMatrix<T>, rho: &[C<T>]) -> Result<C<T>> {
    let dim = op.dim();
    if rho.len() != dim * dim {
        return Err(SimError::DimensionMismatch { expected: dim * dim, found: rho.len() });
    }
    let trace: T = (0..dim).map(|i| rho[i * dim + i].re).sum();
    if trace == T::zero() {
        return Err(SimError::ZeroNorm);
    }
    let mut acc = C::zero();
    for (r, c, v) in op.triplets() {
        acc = acc + v * rho[c * dim + r];
    }
    Ok(acc / trace)
}

/// Windowed g²(0) of the dark polariton together with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Estimate<T> {
    /// NaN when the mean population vanishes.
    pub value: T,
    /// Window average of ⟨b₀†b₀⟩.
    pub mean_population: T,
    /// Window average of ⟨b₀†b₀†b₀b₀⟩.
    pub mean_correlation: T,
}

impl<T: Real> G2Estimate<T> {
    fn from_means(mean_correlation: T, mean_population: T) -> Self {
        let value = if mean_population > lit(1e-300f64.max(T::min_positive_value().to_f64().unwrap_or(0.0))) {
            mean_correlation / (mean_population * mean_population)
        } else {
            T::nan()
        };
        Self { value, mean_population, mean_correlation }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_finite()
    }
}

fn windowed<T: Real>(
    times: &[T],
    window: T,
    len: usize,
    mut eval: impl FnMut(usize) -> Result<(T, T)>,
) -> Result<G2Estimate<T>> {
    let avg = WindowAverager::new(times, window)?;
    let mut corr = vec![T::zero(); len];
    let mut pop = vec![T::zero(); len];
    for k in avg.start()..len {
        let (c, p) = eval(k)?;
        corr[k] = c;
        pop[k] = p;
    }
    Ok(G2Estimate::from_means(avg.average(&corr), avg.average(&pop)))
}

/// Ratio of the window-averaged ⟨b₀†b₀†b₀b₀⟩ to the squared window-averaged
/// ⟨b₀†b₀⟩, both on normalized states.
pub fn g2_zero<T: Real>(traj: &Trajectory<T>, basis: &Basis, window: T) -> Result<G2Estimate<T>> {
    let corr_op = basis.pair_correlation_operator::<T>(Mode::B0);
    let n_op = basis.number_operator::<T>(Mode::B0);
    windowed(&traj.times, window, traj.len(), |k| {
        Ok((expectation(&corr_op, &traj.states[k])?.re, expectation(&n_op, &traj.states[k])?.re))
    })
}

/// Same estimator on a Lindblad trajectory.
pub fn g2_zero_density<T: Real>(traj: &DensityTrajectory<T>, basis: &Basis, window: T) -> Result<G2Estimate<T>> {
    let corr_op = basis.pair_correlation_operator::<T>(Mode::B0);
    let n_op = basis.number_operator::<T>(Mode::B0);
    windowed(&traj.times, window, traj.states.len(), |k| {
        Ok((
            expectation_density(&corr_op, &traj.states[k])?.re,
            expectation_density(&n_op, &traj.states[k])?.re,
        ))
    })
}

/// Cavity annihilation operator in the polariton basis, carried into the
/// interaction frame at time `t`:
/// a(t) = cosθ b₀ + sinθ (e^{−iE₁t} b₁ + e^{−iE₂t} b₂)/√2.
pub fn photon_operator<T: Real>(basis: &Basis, dp: &DerivedParams<T>, t: T) -> OperatorMatrix<T> {
    let s = dp.sin_theta / lit::<T>(2.0).sqrt();
    let e1 = if dp.e1.is_finite() { dp.e1 } else { T::zero() };
    let b0 = basis.annihilator::<T>(Mode::B0).scale(re(dp.cos_theta));
    let b1 = basis.annihilator::<T>(Mode::B1).scale(C::from_polar(s, -e1 * t));
    let b2 = basis.annihilator::<T>(Mode::B2).scale(C::from_polar(s, e1 * t));
    b0.add(&b1).add(&b2)
}

/// ⟨a†a⟩ = ‖aψ‖²/‖ψ‖².
pub fn photon_number<T: Real>(a: &OperatorMatrix<T>, psi: &[C<T>]) -> Result<T> {
    let apsi = a.apply(psi)?;
    let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
    if norm == T::zero() {
        return Err(SimError::ZeroNorm);
    }
    Ok(apsi.iter().map(|z| z.norm_sqr()).sum::<T>() / norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries<T> {
    pub times: Vec<T>,
    pub n0: Vec<T>,
    pub n1: Vec<T>,
    pub n2: Vec<T>,
    pub np: Vec<T>,
    pub photon: Vec<T>,
    pub norm: Vec<T>,
}

impl<T: Real> PopulationSeries<T> {
    pub fn column(&self, name: &str) -> Option<&[T]> {
        match name {
            "n0" => Some(&self.n0),
            "n1" => Some(&self.n1),
            "n2" => Some(&self.n2),
            "np" => Some(&self.np),
            "photon" => Some(&self.photon),
            "norm" => Some(&self.norm),
            _ => None,
        }
    }
}

pub fn population_series<T: Real>(traj: &Trajectory<T>, basis: &Basis, dp: &DerivedParams<T>) -> Result<PopulationSeries<T>> {
    let ops = Mode::ALL.map(|m| basis.number_operator::<T>(m));
    let mut out = PopulationSeries {
        times: traj.times.clone(),
        n0: Vec::with_capacity(traj.len()),
        n1: Vec::with_capacity(traj.len()),
        n2: Vec::with_capacity(traj.len()),
        np: Vec::with_capacity(traj.len()),
        photon: Vec::with_capacity(traj.len()),
        norm: traj.norms.clone(),
    };
    for (t, psi) in traj.times.iter().zip(&traj.states) {
        out.n0.push(expectation(&ops[0], psi)?.re.max(T::zero()));
        out.n1.push(expectation(&ops[1], psi)?.re.max(T::zero()));
        out.n2.push(expectation(&ops[2], psi)?.re.max(T::zero()));
        out.np.push(expectation(&ops[3], psi)?.re.max(T::zero()));
        out.photon.push(photon_number(&photon_operator(basis, dp, *t), psi)?);
    }
    Ok(out)
}

/// One grid point of a sweep or spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    /// cosθ for sweeps, Δ for spectra.
    pub x: T,
    pub g2: T,
    pub n0_mean: T,
    pub n1_max: T,
    pub n2_max: T,
    pub photon_mean: T,
    pub n_tot_max: usize,
    pub window: T,
    pub t_end: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub points: Vec<SweepPoint<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn xs(&self) -> Vec<T> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn g2(&self) -> Vec<T> {
        self.points.iter().map(|p| p.g2).collect()
    }

    pub fn photon(&self) -> Vec<T> {
        self.points.iter().map(|p| p.photon_mean).collect()
    }

    /// g²(0) strictly increasing along the grid (grid assumed ascending).
    pub fn g2_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].g2 > w[0].g2)
    }
}

/// Pipeline settings shared by single runs, sweeps and spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct RunSettings<T> {
    pub hamiltonian: HamiltonianKind,
    pub truncation: Truncation,
    pub integrator: IntegratorConfig<T>,
    /// Fraction of the trajectory (from the end) used for time averages.
    pub window: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl<T: Real> Default for RunSettings<T> {
    fn default() -> Self {
        Self {
            hamiltonian: HamiltonianKind::Full,
            truncation: Truncation::default(),
            integrator: IntegratorConfig::default(),
            window: lit(0.5),
            threads: None,
        }
    }
}

/// Evolves one parameter point from the vacuum and summarizes it.
pub fn simulate_point<T: Real>(p: &PhysicalParams<T>, settings: &RunSettings<T>) -> Result<(SweepPoint<T>, Trajectory<T>, Basis)> {
    let dp = derive_params(p)?;
    let basis = Basis::build(settings.truncation);
    let h = build_with_atomic_decay(settings.hamiltonian, &dp, &basis);
    let traj = evolve_schrodinger(&h, &basis.vacuum(), &settings.integrator)?;
    let point = summarize(p.cos_theta, &traj, &basis, &dp, settings)?;
    Ok((point, traj, basis))
}

fn summarize<T: Real>(
    x: T,
    traj: &Trajectory<T>,
    basis: &Basis,
    dp: &DerivedParams<T>,
    settings: &RunSettings<T>,
) -> Result<SweepPoint<T>> {
    let g2 = g2_zero(traj, basis, settings.window)?;
    let pops = population_series(traj, basis, dp)?;
    let avg = WindowAverager::new(&traj.times, settings.window)?;
    let max = |v: &[T]| v.iter().copied().fold(T::zero(), T::max);
    Ok(SweepPoint {
        x,
        g2: g2.value,
        n0_mean: g2.mean_population,
        n1_max: max(&pops.n1),
        n2_max: max(&pops.n2),
        photon_mean: avg.average(&pops.photon),
        n_tot_max: basis.truncation().n_tot_max,
        window: settings.window,
        t_end: traj.times.last().copied().unwrap_or_else(T::zero),
    })
}

/// Worker pool sized to `threads`, else the environment cap, else all cores.
pub fn worker_pool(threads: Option<usize>) -> rayon::ThreadPool {
    let from_env = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    let n = threads.or(from_env).filter(|&n| n > 0).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool construction")
}

/// g²(0) and populations across a cosθ grid; results follow grid order.
pub fn sweep_costheta<T: Real>(p: &PhysicalParams<T>, grid: &[T], settings: &RunSettings<T>) -> Result<SweepResult<T>> {
    for &c in grid {
        if !(c > T::zero() && c < T::one()) {
            return Err(SimError::InvalidParameter {
                name: "cos_theta",
                value: c.to_f64().unwrap_or(f64::NAN),
                reason: "sweep grid values must lie in (0, 1)",
            });
        }
    }
    let pool = worker_pool(settings.threads);
    let points: Result<Vec<_>> = pool.install(|| {
        grid.par_iter()
            .map(|&c| {
                let q = PhysicalParams { cos_theta: c, ..*p };
                simulate_point(&q, settings).map(|(pt, _, _)| pt)
            })
            .collect()
    });
    Ok(SweepResult { points: points? })
}

/// Settings of the quasi-steady transmission scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSettings<T> {
    /// Integrate for this many lifetimes of the most resonant polariton...
    pub settle_lifetimes: T,
    /// ...but never longer than this.
    pub horizon: T,
    /// Output points per run.
    pub samples: usize,
    pub window: T,
    pub rtol: T,
    pub atol: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl<T: Real> Default for SpectrumSettings<T> {
    fn default() -> Self {
        Self {
            settle_lifetimes: lit(10.0),
            horizon: lit(400.0),
            samples: 400,
            window: lit(0.5),
            rtol: lit(1e-8),
            atol: lit(1e-11),
            threads: None,
        }
    }
}

/// Integration time used at detuning Δ.
pub fn spectrum_run_time<T: Real>(dp: &DerivedParams<T>, delta: T, s: &SpectrumSettings<T>) -> T {
    let rates = [dp.k0 + dp.gamma_r, dp.k1 + dp.gamma_e, dp.k2 + dp.gamma_e];
    let energies = dp.energies();
    let k = (0..3)
        .min_by(|&a, &b| {
            (delta - energies[a])
                .abs()
                .partial_cmp(&(delta - energies[b]).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let t = if rates[k] > T::zero() { s.settle_lifetimes / rates[k] } else { s.horizon };
    t.min(s.horizon)
}

/// Quasi-steady cavity photon number versus drive detuning with the
/// interaction switched off.
pub fn transmission_spectrum<T: Real>(
    dp: &DerivedParams<T>,
    basis: &Basis,
    delta_grid: &[T],
    settings: &SpectrumSettings<T>,
) -> Result<SweepResult<T>> {
    if dp.chi_bar != T::zero() {
        warn!("transmission spectrum ignores chi_bar = {} (interaction-free regime)", dp.chi_bar);
    }
    let (lo, hi) = delta_grid
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if !dp.energies().iter().any(|&e| e >= lo && e <= hi) {
        warn!("delta grid [{lo}, {hi}] covers no polariton resonance");
    }
    let pool = worker_pool(settings.threads);
    let run_settings = RunSettings {
        hamiltonian: HamiltonianKind::Eit,
        truncation: basis.truncation(),
        integrator: IntegratorConfig::default(),
        window: settings.window,
        threads: None,
    };
    let points: Result<Vec<_>> = pool.install(|| {
        delta_grid
            .par_iter()
            .map(|&delta| {
                let dpd = dp.with_delta(delta);
                let t_end = spectrum_run_time(&dpd, delta, settings);
                let cfg = IntegratorConfig {
                    t_end,
                    output_interval: t_end / lit(settings.samples.max(2) as f64),
                    ..IntegratorConfig::default()
                }
                .with_tolerances(settings.rtol, settings.atol);
                let h = add_atomic_decay(build_h_eit(&dpd, basis), &dpd);
                let traj = evolve_schrodinger(&h, &basis.vacuum(), &cfg)?;
                summarize(delta, &traj, basis, &dpd, &RunSettings { integrator: cfg, ..run_settings })
            })
            .collect()
    });
    Ok(SweepResult { points: points? })
}

/// Local maximum on a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    pub index: usize,
    /// Vertex of the parabola through the three samples around the maximum.
    pub position: T,
    pub height: T,
}

/// Local maxima higher than `min_relative_height` times the global maximum.
pub fn find_peaks<T: Real>(xs: &[T], ys: &[T], min_relative_height: T) -> Vec<Peak<T>> {
    let top = ys.iter().copied().fold(T::zero(), T::max);
    let floor = top * min_relative_height;
    let n = ys.len();
    let mut peaks = Vec::new();
    for i in 0..n {
        let left = if i > 0 { ys[i - 1] } else { T::neg_infinity() };
        let right = if i + 1 < n { ys[i + 1] } else { T::neg_infinity() };
        if ys[i] > left && ys[i] >= right && ys[i] > floor {
            let position = if i > 0 && i + 1 < n {
                parabolic_vertex([xs[i - 1], xs[i], xs[i + 1]], [ys[i - 1], ys[i], ys[i + 1]])
            } else {
                xs[i]
            };
            peaks.push(Peak { index: i, position, height: ys[i] });
        }
    }
    peaks
}

fn parabolic_vertex<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv >= T::zero() {
        return x[1];
    }
    let half = lit::<T>(0.5);
    let v = half * (x[0] + x[1]) - d1 / (lit::<T>(2.0) * curv);
    v.max(x[0]).min(x[2])
}

/// Full width at half of `ys[peak]`, by linear interpolation of the
/// half-height crossings on either side. None if a side never drops below half.
pub fn full_width_half_max<T: Real>(xs: &[T], ys: &[T], peak: usize) -> Option<T> {
    let half = ys[peak] * lit(0.5);
    let cross = |a: usize, b: usize| xs[a] + (half - ys[a]) * (xs[b] - xs[a]) / (ys[b] - ys[a]);
    let left = (0..peak).rev().find(|&i| ys[i] < half).map(|i| cross(i, i + 1))?;
    let right = (peak + 1..ys.len()).find(|&i| ys[i] < half).map(|i| cross(i - 1, i))?;
    Some(right - left)
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace<T: Real>(start: T, stop: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / lit((count - 1) as f64);
            (0..count).map(|k| if k == count - 1 { stop } else { start + step * lit(k as f64) }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::BasisState;

    fn basis4() -> Basis {
        Basis::build(Truncation::new(4))
    }

    #[test]
    fn normalized_expectations() {
        let b = basis4();
        let n0 = b.number_operator::<f64>(Mode::B0);
        assert_eq!(expectation(&n0, &b.vacuum()).unwrap().re, 0.0);
        let one = b.ket::<f64>(BasisState::new(1, 0, 0, 0)).unwrap();
        assert_eq!(expectation(&n0, &one).unwrap().re, 1.0);
        // (|0⟩ + |2⟩)/√2, left unnormalized on purpose
        let mut sup = b.vacuum::<f64>();
        sup[b.index_of(&BasisState::new(2, 0, 0, 0)).unwrap()] = C::new(1.0, 0.0);
        assert!((expectation(&n0, &sup).unwrap().re - 1.0).abs() < 1e-15);
        assert_eq!(expectation(&n0, &vec![C::zero(); b.dim()]).unwrap_err(), SimError::ZeroNorm);
        let rho = crate::dynamics::pure_density(&one);
        assert_eq!(expectation_density(&n0, &rho).unwrap().re, 1.0);
    }

    fn frozen_trajectory(psi: Vec<C<f64>>) -> Trajectory<f64> {
        let times: Vec<f64> = (0..11).map(|k| k as f64).collect();
        Trajectory {
            norms: vec![1.0; times.len()],
            states: vec![psi; times.len()],
            times,
            stats: Default::default(),
        }
    }

    #[test]
    fn coherent_state_has_unit_g2() {
        let b = Basis::build(Truncation::new(30).with_cap(Mode::B1, 0).with_cap(Mode::B2, 0).with_cap(Mode::Pair, 0));
        let alpha: f64 = 0.2;
        let mut psi = vec![C::zero(); b.dim()];
        let mut amp = (-alpha * alpha / 2.0).exp();
        for n in 0..=30 {
            psi[b.index_of(&BasisState::new(n, 0, 0, 0)).unwrap()] = C::new(amp, 0.0);
            amp *= alpha / ((n + 1) as f64).sqrt();
        }
        let g2 = g2_zero(&frozen_trajectory(psi), &b, 0.5).unwrap();
        assert!((g2.value - 1.0).abs() < 0.02, "{}", g2.value);
    }

    #[test]
    fn single_photon_cap_gives_zero_g2() {
        let b = Basis::build(Truncation::new(4).with_cap(Mode::B0, 1));
        let mut psi = b.vacuum::<f64>();
        psi[b.index_of(&BasisState::new(1, 0, 0, 0)).unwrap()] = C::new(0.3, 0.1);
        let g2 = g2_zero(&frozen_trajectory(psi), &b, 0.5).unwrap();
        assert_eq!(g2.value, 0.0);
        let vac = g2_zero(&frozen_trajectory(b.vacuum()), &b, 0.5).unwrap();
        assert!(!vac.is_defined());
    }

    #[test]
    fn photon_operator_matches_polariton_decomposition() {
        let dp = derive_params(&PhysicalParams::<f64>::blockade_reference()).unwrap();
        let b = basis4();
        let a = photon_operator(&b, &dp, 0.0);
        let psi: Vec<C<f64>> = (0..b.dim()).map(|i| C::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos())).collect();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let direct = a.adjoint().matmul(&a).sandwich(&psi, &psi).re / norm;
        assert!((photon_number(&a, &psi).unwrap() - direct).abs() < 1e-12);
        // diagonal part of the identity: cos²θ n0 + sin²θ (n1 + n2)/2
        let diag = expectation(&b.number_operator(Mode::B0), &psi).unwrap().re * dp.cos_theta.powi(2)
            + (expectation(&b.number_operator(Mode::B1), &psi).unwrap().re
                + expectation(&b.number_operator(Mode::B2), &psi).unwrap().re)
                * dp.sin_theta.powi(2)
                / 2.0;
        let one = b.ket::<f64>(BasisState::new(0, 1, 0, 0)).unwrap();
        assert!((photon_number(&a, &one).unwrap() - dp.sin_theta.powi(2) / 2.0).abs() < 1e-14);
        assert!(diag > 0.0);
    }

    #[test]
    fn peaks_and_widths_of_lorentzians() {
        let xs = linspace(-10.0, 10.0, 2001);
        let lor = |x: f64, x0: f64, w: f64, a: f64| a * (w / 2.0).powi(2) / ((x - x0).powi(2) + (w / 2.0).powi(2));
        let ys: Vec<f64> = xs.iter().map(|&x| lor(x, -5.0, 1.0, 1.0) + lor(x, 0.0, 0.2, 3.0) + lor(x, 5.0, 1.0, 1.0)).collect();
        let peaks = find_peaks(&xs, &ys, 0.05);
        assert_eq!(peaks.len(), 3);
        for (p, x0) in peaks.iter().zip([-5.0, 0.0, 5.0]) {
            assert!((p.position - x0).abs() < 0.01);
        }
        let w = full_width_half_max(&xs, &ys, peaks[1].index).unwrap();
        assert!((w - 0.2).abs() < 0.01, "{w}");
        assert!(full_width_half_max(&xs[..1001], &ys[..1001], 1000).is_none());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.04, 0.3, 14).len(), 14);
        assert_eq!(*linspace(0.04, 0.3, 14).last().unwrap(), 0.3);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn sweep_rejects_out_of_range_grid() {
        let p = PhysicalParams::<f64>::blockade_reference();
        assert!(sweep_costheta(&p, &[0.5, 1.0], &RunSettings::default()).is_err());
    }
}
