//! Drive-averaged kernels of the population-difference master equation,
//! their half-sided Fourier transforms, the steady-state population, and the
//! linear susceptibility of the probed qubit.
//!
//! The kernels are nonperturbative in the coupling to both baths; the
//! high-frequency drive enters through its period average, which dresses the
//! kernels with `J_0[2 (eps_d/omega_d) sin(omega_d tau / 2)]`.  The probe is
//! stripped out analytically: the susceptibility returned here is already
//! per unit probe amplitude, so no `eps_p` enters any signature.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::bath::CorrelationTable;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::panels_c;
use crate::specfun::j0_fast;

/// How the strong drive enters the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveFactor {
    /// Plain undriven kernels (independent code path, no Bessel factor).
    Undriven,
    /// Period-averaged drive: multiply by `J_0[two_x sin(omega_d tau / 2)]`.
    Averaged { two_x: f64, omega_d: f64 },
}

/// Kernel pair selector; `Plus` pairs with `cos`, `Minus` with `sin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSign {
    Plus,
    Minus,
}

/// Susceptibility variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SusceptibilityMode {
    /// Full frequency-dependent kernel `k0^+(-i omega_p)` in the denominator.
    Full,
    /// Markovian limit: `k0^+(0)` instead.
    Markov,
}

/// One half-sided kernel transform with its accumulated quadrature error
/// (including the truncation-tail bound).
#[derive(Debug, Clone, Copy)]
pub struct KernelIntegral {
    pub value: Complex64,
    pub quad_error: f64,
}

/// Steady-state population difference `p0 = k0^-(0) / k0^+(0)`.
#[derive(Debug, Clone, Copy)]
pub struct SteadyPopulation {
    pub p0: f64,
    /// Spurious imaginary residue of the ratio (roundoff scale).
    pub imag_residue: f64,
}

/// Linear susceptibility at one probe frequency, with the kernel transforms
/// it was assembled from.
#[derive(Debug, Clone, Copy)]
pub struct SusceptibilityPoint {
    pub omega_p: f64,
    pub chi: Complex64,
    pub k0_plus_at_minus_i_omega_p: Complex64,
    pub k0_plus_0: Complex64,
    pub k0_minus_0: Complex64,
    pub kappa1_plus: Complex64,
    pub kappa1_minus: Complex64,
    pub quad_error: f64,
}

/// Kernel evaluator bound to a correlation table.
pub struct NibaEngine<'a> {
    delta: f64,
    delta2: f64,
    eps0: f64,
    drive: DriveFactor,
    table: &'a CorrelationTable,
    quad_tol: f64,
}

impl<'a> NibaEngine<'a> {
    /// Engine for the given model; the drive average is applied whenever
    /// `eps_d != 0`.
    pub fn new(params: &ModelParams, table: &'a CorrelationTable, quad_tol: f64) -> Result<Self> {
        let drive = if params.eps_d == 0.0 {
            DriveFactor::Undriven
        } else {
            DriveFactor::Averaged {
                two_x: 2.0 * params.eps_d / params.omega_d,
                omega_d: params.omega_d,
            }
        };
        Self::with_drive(params, table, quad_tol, drive)
    }

    /// Engine with an explicit drive treatment (the averaged path with
    /// `two_x = 0` must reproduce the undriven one).
    pub fn with_drive(
        params: &ModelParams,
        table: &'a CorrelationTable,
        quad_tol: f64,
        drive: DriveFactor,
    ) -> Result<Self> {
        if let DriveFactor::Averaged { two_x, omega_d } = drive {
            if !(omega_d > 0.0) {
                return Err(Error::InvalidParam("drive averaging requires omega_d > 0".into()));
            }
            if two_x.abs() > crate::specfun::BESSEL_X_MAX {
                return Err(Error::AccuracyRange(format!(
                    "drive ratio 2 eps_d / omega_d = {two_x} exceeds the validated Bessel range"
                )));
            }
        }
        if !(table.decay_rate > 0.0) {
            return Err(Error::SlowDecay { required: f64::INFINITY, cap: table.tau_max() });
        }
        Ok(Self {
            delta: params.delta,
            delta2: params.delta * params.delta,
            eps0: params.eps0,
            drive,
            table,
            quad_tol,
        })
    }

    fn drive_factor(&self, tau: f64) -> f64 {
        match self.drive {
            DriveFactor::Undriven => 1.0,
            DriveFactor::Averaged { two_x, omega_d } => {
                j0_fast(two_x * (0.5 * omega_d * tau).sin())
            }
        }
    }

    /// Damped kernel prefactors
    /// `h^+/-(tau) = delta^2 e^{-Q'} {cos, sin}(Q'') J_0[...]`.
    pub fn kernel_h(&self, tau: f64) -> (f64, f64) {
        let (q_re, q_im) = self.table.eval(tau);
        let envelope = self.delta2 * (-q_re).exp() * self.drive_factor(tau);
        let (s, c) = q_im.sin_cos();
        (envelope * c, envelope * s)
    }

    // Panel widths come from the drive-independent frequencies only, so the
    // averaged path at zero drive shares the exact quadrature layout with the
    // undriven one; drive oscillations are resolved by panel bisection.
    fn periods(&self, extra: &[f64]) -> f64 {
        let mut f_max: f64 = 0.0;
        if let Some(p) = self.table.osc_period {
            f_max = f_max.max(TAU / p);
        }
        f_max = f_max.max(self.eps0.abs());
        for &w in extra {
            f_max = f_max.max(w.abs());
        }
        if f_max > 0.0 {
            TAU / f_max
        } else {
            self.table.tau_max() / 4.0
        }
    }

    fn tol_abs(&self) -> f64 {
        self.quad_tol * self.delta2.max(1e-300) * self.table.tau_max().min(2.0 / self.table.decay_rate)
    }

    fn tail_bound(&self) -> f64 {
        self.delta2 * (-self.table.q_re_at_tau_max()).exp() * 2.0 / self.table.decay_rate
    }

    /// Half-sided transform
    /// `k0^{+/-}(lambda) = Int_0^inf e^{-lambda tau} h^{+/-} c^{+/-}(eps0 tau) dtau`
    /// for `Re lambda >= 0`.
    pub fn k_hat_0(&self, lambda: Complex64, sign: KernelSign) -> Result<KernelIntegral> {
        if lambda.re < 0.0 {
            return Err(Error::InvalidParam("k_hat_0 requires Re lambda >= 0".into()));
        }
        let eps0 = self.eps0;
        let min_period = self.periods(&[lambda.im]);
        let mut f = |tau: f64| -> Complex64 {
            let (hp, hm) = self.kernel_h(tau);
            let (s, c) = (eps0 * tau).sin_cos();
            let k = match sign {
                KernelSign::Plus => hp * c,
                KernelSign::Minus => hm * s,
            };
            (-lambda * tau).exp() * k
        };
        let (value, err) = panels_c(&mut f, self.table.tau_max(), min_period, self.tol_abs())?;
        Ok(KernelIntegral { value, quad_error: err + self.tail_bound() })
    }

    /// Probe-stripped first-harmonic kernels
    /// `kappa1^{+/-} = -/+ Int_0^inf e^{i w_p tau/2} h^{+/-} sin(w_p tau/2) c^{-/+}(eps0 tau) dtau`.
    ///
    /// The leading probe factor `eps_p / omega_p` is divided out, so the
    /// susceptibility built from these needs no probe amplitude.
    pub fn kappa_hat_1(&self, omega_p: f64, sign: KernelSign) -> Result<KernelIntegral> {
        let eps0 = self.eps0;
        let min_period = self.periods(&[omega_p]);
        let pref = match sign {
            KernelSign::Plus => -1.0,
            KernelSign::Minus => 1.0,
        };
        let mut f = |tau: f64| -> Complex64 {
            let (hp, hm) = self.kernel_h(tau);
            let (se, ce) = (eps0 * tau).sin_cos();
            let k = match sign {
                KernelSign::Plus => hp * se,
                KernelSign::Minus => hm * ce,
            };
            let half = 0.5 * omega_p * tau;
            let (sp, cp) = half.sin_cos();
            Complex64::new(cp, sp) * (sp * pref * k)
        };
        let (value, err) = panels_c(&mut f, self.table.tau_max(), min_period, self.tol_abs())?;
        Ok(KernelIntegral { value, quad_error: err + self.tail_bound() })
    }

    /// Steady-state population difference of the unprobed system.
    pub fn steady_population(&self) -> Result<SteadyPopulation> {
        let k0p = self.k_hat_0(Complex64::new(0.0, 0.0), KernelSign::Plus)?;
        let k0m = self.k_hat_0(Complex64::new(0.0, 0.0), KernelSign::Minus)?;
        if k0p.value.norm() < 1e-12 * self.delta2 {
            return Err(Error::DegenerateKernel { magnitude: k0p.value.norm() });
        }
        let ratio = k0m.value / k0p.value;
        Ok(SteadyPopulation { p0: ratio.re, imag_residue: ratio.im.abs() })
    }

    /// Linear susceptibility at probe frequency `omega_p`.
    pub fn susceptibility(
        &self,
        omega_p: f64,
        mode: SusceptibilityMode,
    ) -> Result<SusceptibilityPoint> {
        let k0p0 = self.k_hat_0(Complex64::new(0.0, 0.0), KernelSign::Plus)?;
        let k0m0 = self.k_hat_0(Complex64::new(0.0, 0.0), KernelSign::Minus)?;
        self.susceptibility_with_k0(omega_p, mode, k0p0, k0m0)
    }

    /// [`Self::susceptibility`] with the probe-independent zero-frequency
    /// kernels supplied by the caller (grid sweeps share them across a whole
    /// probe-frequency column).
    pub fn susceptibility_with_k0(
        &self,
        omega_p: f64,
        mode: SusceptibilityMode,
        k0p0: KernelIntegral,
        k0m0: KernelIntegral,
    ) -> Result<SusceptibilityPoint> {
        if !(omega_p > 0.0) {
            return Err(Error::InvalidParam(format!(
                "susceptibility requires omega_p > 0, got {omega_p}"
            )));
        }
        if self.delta == 0.0 {
            // kernels all carry delta^2; the kernel ratio stays finite but the
            // response itself vanishes
            let zero = Complex64::new(0.0, 0.0);
            return Ok(SusceptibilityPoint {
                omega_p,
                chi: zero,
                k0_plus_at_minus_i_omega_p: zero,
                k0_plus_0: zero,
                k0_minus_0: zero,
                kappa1_plus: zero,
                kappa1_minus: zero,
                quad_error: 0.0,
            });
        }
        if k0p0.value.norm() < 1e-12 * self.delta2 {
            return Err(Error::DegenerateKernel { magnitude: k0p0.value.norm() });
        }
        let k0p_iw = match mode {
            SusceptibilityMode::Full => {
                self.k_hat_0(Complex64::new(0.0, -omega_p), KernelSign::Plus)?
            }
            SusceptibilityMode::Markov => k0p0,
        };
        let kap_p = self.kappa_hat_1(omega_p, KernelSign::Plus)?;
        let kap_m = self.kappa_hat_1(omega_p, KernelSign::Minus)?;

        let p0 = k0m0.value / k0p0.value;
        let denom = Complex64::new(0.0, -omega_p) + k0p_iw.value;
        let chi = (kap_m.value - kap_p.value * p0) / denom / omega_p;
        Ok(SusceptibilityPoint {
            omega_p,
            chi,
            k0_plus_at_minus_i_omega_p: k0p_iw.value,
            k0_plus_0: k0p0.value,
            k0_minus_0: k0m0.value,
            kappa1_plus: kap_p.value,
            kappa1_minus: kap_m.value,
            quad_error: k0p0.quad_error
                + k0m0.quad_error
                + k0p_iw.quad_error
                + kap_p.quad_error
                + kap_m.quad_error,
        })
    }
}
