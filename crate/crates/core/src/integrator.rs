//! Dormand–Prince 5(4) with embedded error control over complex state vectors.

use num_traits::Zero;

use crate::dynamics::IntegratorConfig;
use crate::error::{Result, SimError};
use crate::scalar::{eps, lit, to_f64, Real, C};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

/// Output times t_start, t_start + Δ, …, always ending exactly at t_end.
pub(crate) fn output_times<T: Real>(cfg: &IntegratorConfig<T>) -> Vec<T> {
    let span = cfg.t_end - cfg.t_start;
    let n = (span / cfg.output_interval - eps::<T>(64.0) * (span / cfg.output_interval))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let mut times: Vec<T> = (0..n).map(|k| cfg.t_start + cfg.output_interval * lit(k as f64)).collect();
    times.push(cfg.t_end);
    times
}

fn axpy<T: Real>(out: &mut [C<T>], y: &[C<T>], h: T, terms: &[(f64, &[C<T>])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C::zero();
        for (a, k) in terms {
            if *a != 0.0 {
                acc = acc + k[i] * lit::<T>(*a);
            }
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates dy/dt = f(t, y) from `cfg.t_start`, calling `observe` at each
/// output time (including the initial point).
pub(crate) fn integrate<T, F, O>(mut f: F, y0: Vec<C<T>>, cfg: &IntegratorConfig<T>, mut observe: O) -> Result<IntegrationStats>
where
    T: Real,
    F: FnMut(T, &[C<T>], &mut [C<T>]),
    O: FnMut(T, &[C<T>]) -> Result<()>,
{
    cfg.validate()?;
    let n = y0.len();
    let outputs = output_times(cfg);
    let mut stats = IntegrationStats::default();
    let mut y = y0;
    let mut t = cfg.t_start;
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SimError::NonFinite { t: to_f64(t) });
    }
    observe(t, &y)?;

    let zero = vec![C::<T>::zero(); n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone());
    let mut tmp = zero.clone();
    let mut y_new = zero;

    f(t, &y, &mut k1);
    stats.rhs_evaluations += 1;

    let scale = |a: &C<T>, b: &C<T>| cfg.atol + cfg.rtol * a.norm().max(b.norm());
    let rms = |v: &[C<T>], y: &[C<T>]| -> T {
        let s: T = v.iter().zip(y).map(|(d, yy)| (d.norm() / scale(yy, yy)).powi(2)).sum();
        (s / lit(n.max(1) as f64)).sqrt()
    };
    let mut h = {
        let d0 = rms(&y, &y);
        let d1 = rms(&k1, &y);
        let guess = if d0 < lit(1e-5) || d1 < lit(1e-5) { lit(1e-6) } else { lit::<T>(0.01) * d0 / d1 };
        guess.min(cfg.max_step).min(cfg.output_interval)
    };
    if h <= T::zero() || !h.is_finite() {
        h = cfg.output_interval.min(cfg.max_step);
    }

    let safety = lit::<T>(0.9);
    let fac_min = lit::<T>(0.2);
    let fac_max = lit::<T>(5.0);
    let order_exp = lit::<T>(-0.2);

    for &t_out in outputs.iter().skip(1) {
        while t < t_out {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(SimError::TooManySteps { t: to_f64(t) });
            }
            let remaining = t_out - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            if step < eps::<T>(16.0) * t.abs().max(T::one()) {
                return Err(SimError::StepUnderflow { t: to_f64(t) });
            }

            axpy(&mut tmp, &y, step, &[(A21, &k1)]);
            f(t + step * lit(C2), &tmp, &mut k2);
            axpy(&mut tmp, &y, step, &[(A31, &k1), (A32, &k2)]);
            f(t + step * lit(C3), &tmp, &mut k3);
            axpy(&mut tmp, &y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + step * lit(C4), &tmp, &mut k4);
            axpy(&mut tmp, &y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + step * lit(C5), &tmp, &mut k5);
            axpy(&mut tmp, &y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + step, &tmp, &mut k6);
            axpy(&mut y_new, &y, step, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + step, &y_new, &mut k7);
            stats.rhs_evaluations += 6;

            let mut acc = T::zero();
            for i in 0..n {
                let e = (k1[i] * lit::<T>(E1)
                    + k3[i] * lit::<T>(E3)
                    + k4[i] * lit::<T>(E4)
                    + k5[i] * lit::<T>(E5)
                    + k6[i] * lit::<T>(E6)
                    + k7[i] * lit::<T>(E7))
                    * step;
                acc = acc + (e.norm() / scale(&y[i], &y_new[i])).powi(2);
            }
            let err = (acc / lit(n.max(1) as f64)).sqrt();
            if !err.is_finite() {
                return Err(SimError::NonFinite { t: to_f64(t) });
            }

            let factor = if err == T::zero() { fac_max } else { (safety * err.powf(order_exp)).max(fac_min).min(fac_max) };
            if err <= T::one() {
                stats.accepted += 1;
                t = if clamped { t_out } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                // a step shortened only to land on an output time says nothing about h
                if !clamped || step * factor > h {
                    h = (step * factor).min(cfg.max_step);
                }
            } else {
                stats.rejected += 1;
                h = step * factor.min(T::one());
            }
        }
        observe(t, &y)?;
    }
    Ok(stats)
}
