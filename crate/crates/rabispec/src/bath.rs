//! Spectral densities and bath correlation functions
//! `Q(t) = Q'(t) + i Q''(t)`.
//!
//! The qubit couples to two baths: an Ohmic one with exponential cutoff
//! (closed form in the scaling limit) and the structured effective bath of
//! the damped resonator (closed form plus a Matsubara series).  A generic
//! quadrature of the defining integral serves as the independent oracle, and
//! [`CorrelationTable`] tabulates the total `Q` for the kernel integrals.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{effective_bath, BathSpec, EffectiveBath, ModelParams};
use crate::quad::adaptive_c;

/// Continuum bath spectral density `G(omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    /// `2 alpha1 omega exp(-omega/omega_c)`
    OhmicExpCutoff { alpha1: f64, omega_c: f64 },
    /// `2 alpha2 omega Omega^4 / [(Omega^2 - omega^2)^2 + (gamma omega)^2]`
    EffectiveStructured { alpha2: f64, omega_r: f64, gamma: f64 },
}

impl SpectralDensity {
    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            Self::OhmicExpCutoff { alpha1, omega_c } => {
                2.0 * alpha1 * omega * (-omega / omega_c).exp()
            }
            Self::EffectiveStructured { alpha2, omega_r, gamma } => {
                let d = omega_r * omega_r - omega * omega;
                let gw = gamma * omega;
                2.0 * alpha2 * omega * omega_r.powi(4) / (d * d + gw * gw)
            }
        }
    }

    /// Ohmic slope `G(omega)/omega` at `omega -> 0`.
    fn low_freq_slope(&self) -> f64 {
        match *self {
            Self::OhmicExpCutoff { alpha1, .. } => 2.0 * alpha1,
            Self::EffectiveStructured { alpha2, .. } => 2.0 * alpha2,
        }
    }
}

/// `ln(sinh(y)/y)`, overflow-safe.
fn ln_sinhc(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y < 1e-3 {
        y * y / 6.0 - y.powi(4) / 180.0
    } else {
        // sinh(y)/y = exp(y) (1 - exp(-2y)) / (2y)
        y + (-(-2.0 * y).exp()).ln_1p() - (2.0 * y).ln()
    }
}

/// Scaling-limit correlation function of the Ohmic bath with exponential
/// cutoff.  Returns `(Q1', Q1'')`.
pub fn q1(t: f64, alpha1: f64, omega_c: f64, temp1: f64) -> (f64, f64) {
    debug_assert!(t >= 0.0 && temp1 > 0.0);
    if alpha1 == 0.0 || t == 0.0 {
        return (0.0, 0.0);
    }
    let y = PI * t * temp1;
    let re = 2.0 * alpha1 * (0.5 * (omega_c * omega_c * t * t).ln_1p() + ln_sinhc(y));
    let im = 2.0 * alpha1 * (omega_c * t).atan();
    (re, im)
}

/// Closed-form correlation function of the effective structured bath.
#[derive(Debug, Clone, Copy)]
pub struct Q2Value {
    pub re: f64,
    pub im: f64,
    /// Matsubara terms summed.
    pub mats_terms: usize,
    /// Bound on the truncated Matsubara tail.
    pub mats_tail: f64,
}

/// `Q_2(t)` for the structured bath: damped-oscillation closed form plus the
/// Matsubara series, summed until both the last term and an analytic tail
/// bound fall below `mats_tol` relative to the running value.
pub fn q2(t: f64, eb: &EffectiveBath, temp2: f64, mats_tol: f64) -> Result<Q2Value> {
    debug_assert!(t >= 0.0);
    if !(temp2 > 0.0) {
        return Err(Error::InvalidParam("q2 requires temp2 > 0".into()));
    }
    let EffectiveBath { alpha2, gamma, omega_bar, omega_r } = *eb;
    if alpha2 == 0.0 {
        return Ok(Q2Value { re: 0.0, im: 0.0, mats_terms: 0, mats_tail: 0.0 });
    }
    if gamma >= 2.0 * omega_r {
        return Err(Error::Overdamped { kappa: gamma / (2.0 * PI * omega_r) });
    }
    if t == 0.0 {
        return Ok(Q2Value { re: 0.0, im: 0.0, mats_terms: 0, mats_tail: 0.0 });
    }

    let beta = 1.0 / temp2;
    let pa2 = PI * alpha2;
    let n_coef = (gamma * gamma / 2.0 - omega_r * omega_r) / (gamma * omega_bar);

    // L and Z degenerate to N pi alpha2 and pi alpha2 once sinh/cosh saturate.
    let (l_coef, z_coef) = {
        let x = beta * omega_bar;
        if x > 35.0 {
            (pa2 * n_coef, pa2)
        } else {
            let (sh, ch) = (x.sinh(), x.cosh());
            let (s, c) = ((beta * gamma / 2.0).sin(), (beta * gamma / 2.0).cos());
            let den = ch - c;
            (pa2 * (n_coef * sh + s) / den, pa2 * (sh - n_coef * s) / den)
        }
    };

    let x_rate = 2.0 * pa2 * temp2;
    let damp = (-gamma * t / 2.0).exp();
    let (sin_t, cos_t) = (omega_bar * t).sin_cos();

    let (mats, mats_terms, mats_tail) = q2_matsubara(t, alpha2, omega_r, gamma, temp2, mats_tol)?;

    let re = x_rate * t + l_coef * (damp * cos_t - 1.0) - z_coef * damp * sin_t + mats;
    let im = pa2 - damp * pa2 * (cos_t + n_coef * sin_t);
    Ok(Q2Value { re, im, mats_terms, mats_tail })
}

fn q2_matsubara(
    t: f64,
    alpha2: f64,
    omega_r: f64,
    gamma: f64,
    temp2: f64,
    tol: f64,
) -> Result<(f64, usize, f64)> {
    let nu1 = 2.0 * PI * temp2;
    let pref = 4.0 * PI * alpha2 * omega_r.powi(4) * temp2;
    let om2 = omega_r * omega_r;
    let mut sum = 0.0;
    let mut n = 0usize;
    loop {
        n += 1;
        if n > 200_000 {
            return Err(Error::NonConvergence(format!(
                "Matsubara series for Q2 did not reach tol {tol} within {n} terms"
            )));
        }
        let nu = nu1 * n as f64;
        let den = (om2 + nu * nu).powi(2) - gamma * gamma * nu * nu;
        // (1 - exp(-nu t))/nu without cancellation
        let term = -(-nu * t).exp_m1() / nu / den;
        sum += term;
        if nu >= 2.0 * omega_r && n >= 4 {
            // for nu >= 2 Omega the summand is below 2/nu^5
            let tail = 2.0 / (nu1.powi(5) * 4.0 * (n as f64).powi(4));
            let scale = sum.abs().max(1e-300);
            if term / scale < tol && tail / scale < tol {
                return Ok((pref * sum, n, pref * tail));
            }
        }
    }
}

/// Result of the direct quadrature of the defining correlation integral.
#[derive(Debug, Clone, Copy)]
pub struct QNumeric {
    pub re: f64,
    pub im: f64,
    pub abs_error: f64,
}

/// Quadrature oracle for `Q(t)`:
/// `Int_0^inf dw G(w)/w^2 [coth(w beta/2)(1 - cos wt) + i sin wt]`.
///
/// The integration range is split at the structure points of `G` and at the
/// oscillation scale `1/t`; the integrable `w -> 0` endpoint is evaluated by
/// series.  The neglected high-frequency tail enters the error report (with
/// its smooth part added back analytically for the structured bath).
pub fn q_numeric(t: f64, sd: &SpectralDensity, temp: f64, tol_abs: f64) -> Result<QNumeric> {
    if !(temp > 0.0) || t < 0.0 {
        return Err(Error::InvalidParam("q_numeric requires t >= 0, temp > 0".into()));
    }
    if t == 0.0 {
        return Ok(QNumeric { re: 0.0, im: 0.0, abs_error: 0.0 });
    }
    let beta = 1.0 / temp;
    let slope = sd.low_freq_slope();

    let mut integrand = |w: f64| -> Complex64 {
        let u = sd.eval(w) / w; // -> slope as w -> 0
        let x = 0.5 * beta * w;
        // coth(x)/w * 2 sin^2(wt/2), stable for small arguments
        let s = (0.5 * w * t).sin();
        let re = if x < 1e-4 {
            let sinc2 = if w * t < 1e-8 { t * t } else { (2.0 * s / w) * (2.0 * s / w) };
            u * (1.0 + x * x / 3.0) * temp * sinc2
        } else {
            u / x.tanh() * 2.0 * s * s / w
        };
        let im = if w * t < 1e-8 { u * t } else { u * (w * t).sin() / w };
        Complex64::new(re, im)
    };

    // segment boundaries and high-frequency cutoff
    let (w_max, tail_re, tail_err) = match *sd {
        SpectralDensity::OhmicExpCutoff { alpha1, omega_c } => {
            let w_max = 45.0 * omega_c;
            (w_max, 0.0, 4.0 * alpha1 * (-45.0f64).exp())
        }
        SpectralDensity::EffectiveStructured { alpha2, omega_r, gamma } => {
            let w_max = (60.0 * omega_r).max(10.0 * gamma).max(20.0 * temp);
            let c = 2.0 * alpha2 * omega_r.powi(4);
            // smooth part of Int_W^inf (1 - cos wt)/w^5 is 1/(4 W^4)
            let tail_re = c / (4.0 * w_max.powi(4));
            let osc = c / (w_max.powi(5) * t) + c / (w_max.powi(4) * 4.0) * 0.01;
            (w_max, tail_re, 2.0 * osc)
        }
    };
    let mut splits = vec![0.0, (1.0 / t).min(w_max)];
    if let SpectralDensity::EffectiveStructured { omega_r, gamma, .. } = *sd {
        for s in [omega_r - gamma, omega_r, omega_r + gamma, 2.0 * omega_r] {
            if s > 0.0 && s < w_max {
                splits.push(s);
            }
        }
    } else if let SpectralDensity::OhmicExpCutoff { omega_c, .. } = *sd {
        if omega_c < w_max {
            splits.push(omega_c);
        }
    }
    splits.push(w_max);
    splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
    splits.dedup();

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = tail_err;
    let n_seg = splits.len() - 1;
    for s in splits.windows(2) {
        let (v, e) = adaptive_c(&mut integrand, s[0], s[1], tol_abs / n_seg as f64, 38)?;
        total += v;
        err += e;
    }
    // w -> 0 endpoint: series value slope * (t^2 T + i t) over [0, w0] is
    // already covered by the stable integrand; nothing extra to add.
    let _ = slope;
    Ok(QNumeric { re: total.re + tail_re, im: total.im, abs_error: err })
}

/// `Int_0^inf G(w) dw` with an analytic tail correction (sum-rule checks).
pub fn integrate_spectral_density(sd: &SpectralDensity, tol_abs: f64) -> Result<(f64, f64)> {
    let (w_max, tail, tail_err) = match *sd {
        SpectralDensity::OhmicExpCutoff { alpha1, omega_c } => {
            (45.0 * omega_c, 0.0, 4.0 * alpha1 * omega_c * (-45.0f64).exp())
        }
        SpectralDensity::EffectiveStructured { alpha2, omega_r, gamma } => {
            let w = (200.0 * omega_r).max(20.0 * gamma);
            let c = 2.0 * alpha2 * omega_r.powi(4);
            let tail = c / (2.0 * w * w);
            let err = c * (2.0 * omega_r * omega_r + gamma * gamma) / (4.0 * w.powi(4)) * 4.0;
            (w, tail, err)
        }
    };
    let mut f = |w: f64| Complex64::new(sd.eval(w), 0.0);
    let mut splits = vec![0.0];
    if let SpectralDensity::EffectiveStructured { omega_r, gamma, .. } = *sd {
        for s in [omega_r - gamma, omega_r, omega_r + gamma, 4.0 * omega_r] {
            if s > 0.0 && s < w_max {
                splits.push(s);
            }
        }
    }
    splits.push(w_max);
    let mut total = 0.0;
    let mut err = tail_err;
    for s in splits.windows(2) {
        let (v, e) = adaptive_c(&mut f, s[0], s[1], tol_abs / (splits.len() - 1) as f64, 38)?;
        total += v.re;
        err += e;
    }
    Ok((total + tail, err))
}

/// Tabulated total correlation function `Q(tau) = Q_1(tau) + Q_2(tau)` on a
/// two-zone grid (fine head resolving the cutoff and oscillation scales,
/// uniform tail), with cubic interpolation between nodes.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    head_step: f64,
    head_n: usize,
    tail_step: f64,
    n_nodes: usize,
    tau_max: f64,
    q_re: Vec<f64>,
    q_im: Vec<f64>,
    /// Asymptotic slope of `Q'`: `2 pi (alpha1 T1 + alpha2 T2)`.
    pub decay_rate: f64,
    /// Oscillation period `2 pi / omega_bar` of the structured bath, if any.
    pub osc_period: Option<f64>,
}

impl CorrelationTable {
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn q_re_at_tau_max(&self) -> f64 {
        *self.q_re.last().unwrap()
    }

    fn tau_of(&self, i: usize) -> f64 {
        if i <= self.head_n {
            i as f64 * self.head_step
        } else {
            self.head_n as f64 * self.head_step + (i - self.head_n) as f64 * self.tail_step
        }
    }

    /// Grid nodes (for export and diagnostics).
    pub fn tau_grid(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.tau_of(i)).collect()
    }

    /// Interpolated `(Q'(tau), Q''(tau))`.
    ///
    /// Four-point cubic (Lagrange) interpolation on the stencil around the
    /// bracketing interval; `tau` must lie in `[0, tau_max]`.
    pub fn eval(&self, tau: f64) -> (f64, f64) {
        debug_assert!((0.0..=self.tau_max * (1.0 + 1e-12)).contains(&tau));
        let head_end = self.head_n as f64 * self.head_step;
        let i = if tau < head_end {
            (tau / self.head_step) as usize
        } else {
            self.head_n + (((tau - head_end) / self.tail_step) as usize).min(self.n_nodes - self.head_n - 2)
        };
        let base = i.saturating_sub(1).min(self.n_nodes - 4);
        let x0 = self.tau_of(base);
        let x1 = self.tau_of(base + 1);
        let x2 = self.tau_of(base + 2);
        let x3 = self.tau_of(base + 3);
        let (d0, d1, d2, d3) = (tau - x0, tau - x1, tau - x2, tau - x3);
        let w0 = d1 * d2 * d3 / ((x0 - x1) * (x0 - x2) * (x0 - x3));
        let w1 = d0 * d2 * d3 / ((x1 - x0) * (x1 - x2) * (x1 - x3));
        let w2 = d0 * d1 * d3 / ((x2 - x0) * (x2 - x1) * (x2 - x3));
        let w3 = d0 * d1 * d2 / ((x3 - x0) * (x3 - x1) * (x3 - x2));
        let re = w0 * self.q_re[base]
            + w1 * self.q_re[base + 1]
            + w2 * self.q_re[base + 2]
            + w3 * self.q_re[base + 3];
        let im = w0 * self.q_im[base]
            + w1 * self.q_im[base + 1]
            + w2 * self.q_im[base + 2]
            + w3 * self.q_im[base + 3];
        (re, im)
    }
}

/// Truncation horizon from the known asymptotic slope:
/// `max(50/delta, 20/decay_rate)` capped at `1e4/delta`.
pub fn recommended_tau_max(delta: f64, decay_rate: f64) -> Result<f64> {
    let cap = 1e4 / delta;
    if !(decay_rate > 0.0) {
        return Err(Error::SlowDecay { required: f64::INFINITY, cap });
    }
    let required = (50.0 / delta).max(20.0 / decay_rate);
    if required > cap {
        return Err(Error::SlowDecay { required, cap });
    }
    Ok(required)
}

/// Number of table nodes giving a tail resolution of about `0.02/delta`.
pub fn default_table_points(delta: f64, tau_max: f64, omega_c: f64) -> usize {
    let head_span = head_span(tau_max, omega_c, None);
    let n = ((16.0 * head_span + (tau_max - head_span)) / (0.02 / delta)).ceil() as usize;
    n.clamp(2000, 400_000)
}

fn head_span(tau_max: f64, omega_c: f64, osc_period: Option<f64>) -> f64 {
    let mut span = 8.0 / omega_c;
    if let Some(p) = osc_period {
        span = span.max(1.5 * p);
    }
    span.min(tau_max / 2.0)
}

/// Build the total-correlation table.
///
/// Requires `tau_max` deep enough that `exp(-Q'(tau_max)) < 1e-8`; use
/// [`recommended_tau_max`] to pick it.
pub fn tabulate_q_total(
    params: &ModelParams,
    baths: &BathSpec,
    tau_max: f64,
    n_points: usize,
    mats_tol: f64,
) -> Result<CorrelationTable> {
    baths.validate()?;
    if !(tau_max > 0.0) || n_points < 16 {
        return Err(Error::InvalidParam(
            "tabulate_q_total requires tau_max > 0 and n_points >= 16".into(),
        ));
    }
    let eb = effective_bath(params.g, params.omega_r, baths.kappa)?;
    let decay_rate = 2.0 * PI * (baths.alpha1 * baths.temp1 + eb.alpha2 * baths.temp2);
    let osc_period = (eb.alpha2 > 0.0).then(|| 2.0 * PI / eb.omega_bar);

    let span = head_span(tau_max, baths.omega_c, osc_period);
    let tail_step = (16.0 * span + (tau_max - span)) / n_points as f64;
    let head_step = tail_step / 16.0;
    let head_n = (span / head_step).ceil() as usize;
    let head_end = head_n as f64 * head_step;
    let tail_n = ((tau_max - head_end) / tail_step).ceil() as usize;
    let n_nodes = head_n + tail_n + 1;
    let tau_max_actual = head_end + tail_n as f64 * tail_step;

    let mut q_re = Vec::with_capacity(n_nodes);
    let mut q_im = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let tau = if i <= head_n {
            i as f64 * head_step
        } else {
            head_end + (i - head_n) as f64 * tail_step
        };
        let (r1, i1) = q1(tau, baths.alpha1, baths.omega_c, baths.temp1);
        let v2 = q2(tau, &eb, baths.temp2, mats_tol)?;
        q_re.push(r1 + v2.re);
        q_im.push(i1 + v2.im);
    }

    let q_end = *q_re.last().unwrap();
    if q_end < -(1e-8f64).ln() {
        let required = if decay_rate > 0.0 { 20.0 / decay_rate } else { f64::INFINITY };
        return Err(Error::SlowDecay { required, cap: tau_max });
    }

    Ok(CorrelationTable {
        head_step,
        head_n,
        tail_step,
        n_nodes,
        tau_max: tau_max_actual,
        q_re,
        q_im,
        decay_rate,
        osc_period,
    })
}

/// Strong-dissipation figure preset: table for the given model/baths with
/// defaulted horizon and resolution.
pub fn tabulate_default(params: &ModelParams, baths: &BathSpec, mats_tol: f64) -> Result<CorrelationTable> {
    let eb = effective_bath(params.g, params.omega_r, baths.kappa)?;
    let rate = 2.0 * PI * (baths.alpha1 * baths.temp1 + eb.alpha2 * baths.temp2);
    let tau_max = recommended_tau_max(params.delta, rate)?;
    let n = default_table_points(params.delta, tau_max, baths.omega_c);
    tabulate_q_total(params, baths, tau_max, n, mats_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2b_model() -> (ModelParams, BathSpec) {
        (ModelParams { g: 0.5, ..Default::default() }, BathSpec::default())
    }

    #[test]
    fn q1_endpoints() {
        assert_eq!(q1(0.0, 0.1, 10.0, 0.1), (0.0, 0.0));
        let (_, im) = q1(1e9, 0.1, 10.0, 0.1);
        assert_relative_eq!(im, PI * 0.1, epsilon = 1e-8);
    }

    #[test]
    fn q1_matches_quadrature_oracle() {
        // The scaling-limit Q1' sits above the finite-cutoff integral by the
        // thermal cutoff correction, which grows from 4e-5 (t = 0.5) to
        // 2.3e-3 (t = 10) at these parameters; Q1'' is exact for the
        // exponential cutoff.  Bounds frozen from an independent
        // high-precision quadrature of the defining integral.
        let sd = SpectralDensity::OhmicExpCutoff { alpha1: 0.1, omega_c: 10.0 };
        for &(t, bound) in &[(0.5, 1e-4), (2.0, 4e-4), (5.0, 1.3e-3), (10.0, 2.5e-3)] {
            let (re, im) = q1(t, 0.1, 10.0, 0.1);
            let num = q_numeric(t, &sd, 0.1, 1e-10).unwrap();
            let dev = re - num.re;
            assert!(
                dev >= 0.0 && dev <= bound * num.re.abs(),
                "Q1' at t = {t}: closed {re} vs quad {} (rel {:.2e}, bound {bound:.0e})",
                num.re,
                dev / num.re
            );
            assert!(
                (im - num.im).abs() <= 1e-10 * num.im.abs(),
                "Q1'' at t = {t}: closed {im} vs quad {}",
                num.im
            );
        }
    }

    #[test]
    fn q2_endpoints_and_late_time() {
        let eb = effective_bath(0.5, 1.5, 0.05).unwrap();
        let v0 = q2(0.0, &eb, 0.1, 1e-10).unwrap();
        assert_eq!((v0.re, v0.im), (0.0, 0.0));
        let vlate = q2(500.0, &eb, 0.1, 1e-10).unwrap();
        assert_relative_eq!(vlate.im, PI * eb.alpha2, epsilon = 1e-10);
    }

    #[test]
    fn q2_matches_quadrature_oracle() {
        let eb = effective_bath(0.5, 1.5, 0.05).unwrap();
        let sd = SpectralDensity::EffectiveStructured {
            alpha2: eb.alpha2,
            omega_r: 1.5,
            gamma: eb.gamma,
        };
        for &t in &[0.5, 2.0, 10.0] {
            let v = q2(t, &eb, 0.1, 1e-12).unwrap();
            let num = q_numeric(t, &sd, 0.1, 1e-12).unwrap();
            assert!(
                (v.re - num.re).abs() <= 1e-6 * num.re.abs(),
                "Q2' at t = {t}: closed {} vs quad {} (err {})",
                v.re,
                num.re,
                num.abs_error
            );
            assert!(
                (v.im - num.im).abs() <= 1e-6 * num.im.abs().max(1e-3),
                "Q2'' at t = {t}: closed {} vs quad {}",
                v.im,
                num.im
            );
        }
    }

    #[test]
    fn q2_matsubara_self_consistency() {
        let eb = effective_bath(0.5, 1.5, 0.05).unwrap();
        for &t in &[0.3, 3.0, 30.0] {
            let coarse = q2(t, &eb, 0.1, 1e-8).unwrap();
            let fine = q2(t, &eb, 0.1, 5e-9).unwrap();
            assert!(
                (coarse.re - fine.re).abs() <= coarse.mats_tail + 1e-8 * coarse.re.abs(),
                "halving mats_tol moved Q2' by more than the reported tail at t = {t}"
            );
        }
    }

    #[test]
    fn effective_density_sum_rule() {
        // Int G_2 = 4 g^2 (1 + O(kappa))
        let g = 0.5;
        let eb = effective_bath(g, 1.5, 0.005).unwrap();
        let sd = SpectralDensity::EffectiveStructured {
            alpha2: eb.alpha2,
            omega_r: 1.5,
            gamma: eb.gamma,
        };
        let (integral, _) = integrate_spectral_density(&sd, 1e-10).unwrap();
        assert!(
            (integral - 4.0 * g * g).abs() < 0.01 * 4.0 * g * g,
            "sum rule: {integral} vs {}",
            4.0 * g * g
        );
    }

    #[test]
    fn q_numeric_zero_time() {
        let sd = SpectralDensity::OhmicExpCutoff { alpha1: 0.1, omega_c: 10.0 };
        let v = q_numeric(0.0, &sd, 0.1, 1e-10).unwrap();
        assert_eq!((v.re, v.im), (0.0, 0.0));
    }

    #[test]
    fn q_imaginary_part_bounds() {
        let (params, baths) = fig2b_model();
        let eb = effective_bath(params.g, params.omega_r, baths.kappa).unwrap();
        let n_coef = (eb.gamma * eb.gamma / 2.0 - params.omega_r * params.omega_r)
            / (eb.gamma * eb.omega_bar);
        let bound2 = PI * eb.alpha2 * (1.0 + n_coef.abs());
        for i in 0..2000 {
            let t = 0.05 * i as f64;
            let (_, i1) = q1(t, baths.alpha1, baths.omega_c, baths.temp1);
            assert!((-1e-12..PI * baths.alpha1 + 1e-9).contains(&i1), "Q1'' out of bounds at t = {t}");
            let v2 = q2(t, &eb, baths.temp2, 1e-10).unwrap();
            assert!(v2.im.abs() <= bound2 + 1e-9, "Q2'' = {} beyond bound {bound2}", v2.im);
        }
    }

    #[test]
    fn asymptotic_slope() {
        let (params, baths) = fig2b_model();
        let eb = effective_bath(params.g, params.omega_r, baths.kappa).unwrap();
        let expected = 2.0 * PI * (baths.alpha1 * baths.temp1 + eb.alpha2 * baths.temp2);
        let t = 400.0;
        let h = 1.0;
        let f = |t: f64| {
            q1(t, baths.alpha1, baths.omega_c, baths.temp1).0
                + q2(t, &eb, baths.temp2, 1e-12).unwrap().re
        };
        let slope = (f(t + h) - f(t - h)) / (2.0 * h);
        assert!((slope - expected).abs() < 1e-3, "slope {slope} vs {expected}");
    }

    #[test]
    fn table_limits_and_additivity() {
        let (params, baths) = fig2b_model();

        // kappa = 0: table equals q1 alone
        let b1 = BathSpec { kappa: 0.0, ..baths };
        let t1 = tabulate_default(&params, &b1, 1e-10).unwrap();
        for &tau in &[0.3, 5.0, 40.0] {
            let (re, im) = t1.eval(tau);
            let (r, i) = q1(tau, b1.alpha1, b1.omega_c, b1.temp1);
            assert_relative_eq!(re, r, epsilon = 1e-9, max_relative = 1e-9);
            assert_relative_eq!(im, i, epsilon = 1e-9, max_relative = 1e-9);
        }

        // alpha1 = 0: table equals q2 alone
        let b2 = BathSpec { alpha1: 0.0, ..baths };
        let t2 = tabulate_default(&params, &b2, 1e-10).unwrap();
        let eb = effective_bath(params.g, params.omega_r, b2.kappa).unwrap();
        for &tau in &[0.3, 5.0, 40.0] {
            let (re, im) = t2.eval(tau);
            let v = q2(tau, &eb, b2.temp2, 1e-10).unwrap();
            assert_relative_eq!(re, v.re, epsilon = 1e-9, max_relative = 1e-9);
            assert_relative_eq!(im, v.im, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn table_interpolation_error() {
        let (params, baths) = fig2b_model();
        let table = tabulate_default(&params, &baths, 1e-10).unwrap();
        let eb = effective_bath(params.g, params.omega_r, baths.kappa).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let tau = rng.gen_range(0.0..table.tau_max());
            let (re, im) = table.eval(tau);
            let (r1, i1) = q1(tau, baths.alpha1, baths.omega_c, baths.temp1);
            let v2 = q2(tau, &eb, baths.temp2, 1e-12).unwrap();
            worst = worst.max((re - (r1 + v2.re)).abs()).max((im - (i1 + v2.im)).abs());
        }
        assert!(worst < 1e-8, "interpolation error {worst}");
    }

    #[test]
    fn table_rejects_zero_dissipation() {
        assert!(matches!(
            recommended_tau_max(1.0, 0.0),
            Err(Error::SlowDecay { .. })
        ));
    }

    #[test]
    fn table_start_is_zero() {
        let (params, baths) = fig2b_model();
        let table = tabulate_default(&params, &baths, 1e-10).unwrap();
        let (re, im) = table.eval(0.0);
        assert_eq!(re, 0.0);
        assert_eq!(im, 0.0);
        assert!(table.q_re_at_tau_max() > -(1e-8f64).ln());
    }
}
