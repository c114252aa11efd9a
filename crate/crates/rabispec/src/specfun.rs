//! Special functions and dressed tunneling elements.
//!
//! Generalized Laguerre polynomials by the three-term recurrence, Bessel
//! functions of the first kind by a series / downward-recurrence hybrid, and
//! the Laguerre- and Bessel-dressed tunneling matrix elements built from
//! them.

use crate::error::{Error, Result};

/// Validated argument range of [`bessel_j`].
pub const BESSEL_X_MAX: f64 = 50.0;
/// Validated order range of [`bessel_j`].
pub const BESSEL_N_MAX: i32 = 60;

/// Generalized Laguerre polynomial `L^k_j(x)`.
///
/// Three-term recurrence seeded with `L^k_0 = 1`, `L^k_1 = 1 + k - x`.
pub fn laguerre(k: u32, j: u32, x: f64) -> f64 {
    let kf = k as f64;
    if j == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + kf - x;
    for i in 1..j {
        let i = i as f64;
        let next = ((2.0 * i + 1.0 + kf - x) * l - (i + kf) * lm1) / (i + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Bessel function of the first kind `J_n(x)`.
///
/// Accurate to at least 10 significant digits for `|x| <= 50`, `|n| <= 60`;
/// arguments outside that validated window are rejected.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > BESSEL_X_MAX || n.abs() > BESSEL_N_MAX {
        return Err(Error::AccuracyRange(format!(
            "bessel_j validated for |x| <= {BESSEL_X_MAX}, |n| <= {BESSEL_N_MAX}; got n = {n}, x = {x}"
        )));
    }
    Ok(bessel_j_raw(n, x))
}

fn bessel_j_raw(n: i32, x: f64) -> f64 {
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    let mut sign = 1.0;
    let nu = if n < 0 {
        if n % 2 != 0 {
            sign = -sign;
        }
        (-n) as u32
    } else {
        n as u32
    };
    let ax = if x < 0.0 {
        if nu % 2 != 0 {
            sign = -sign;
        }
        -x
    } else {
        x
    };
    if ax == 0.0 {
        return if nu == 0 { sign } else { 0.0 };
    }
    if ax <= 4.0 {
        sign * bessel_series(nu, ax)
    } else {
        sign * bessel_j_all_raw(nu as usize, ax)[nu as usize]
    }
}

/// Ascending series; alternating-term cancellation stays below ~1e2 for x <= 4.
fn bessel_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^n / n!, built with interleaved division to dodge overflow
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let q = half * half;
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= -q / (k * (n as f64 + k));
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// All of `J_0(x) ... J_nmax(x)` in one pass.
///
/// Downward (Miller) recurrence normalized with `J_0 + 2 sum J_2k = 1`,
/// rescaled on the fly to avoid overflow.  Requires `x > 0`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || x > BESSEL_X_MAX || n_max > BESSEL_N_MAX as usize {
        return Err(Error::AccuracyRange(format!(
            "bessel_j_all requires 0 < x <= {BESSEL_X_MAX}, n_max <= {BESSEL_N_MAX}; got n_max = {n_max}, x = {x}"
        )));
    }
    Ok(bessel_j_all_raw(n_max, x))
}

fn bessel_j_all_raw(n_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let base = n_max.max(x.ceil() as usize).max(1);
    let mut m = base + 15 + (160.0 * base as f64).sqrt().ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0;
    let mut bjp = 0.0_f64; // order k+1
    let mut bj = 1.0_f64; // order k
    let mut k = m;
    loop {
        if k <= n_max {
            out[k] = bj;
        }
        if k % 2 == 0 {
            norm += if k == 0 { bj } else { 2.0 * bj };
        }
        if k == 0 {
            break;
        }
        let bjm = (2.0 * k as f64 / x) * bj - bjp;
        bjp = bj;
        bj = bjm;
        k -= 1;
        if bj.abs() > 1e250 {
            bj *= 1e-250;
            bjp *= 1e-250;
            norm *= 1e-250;
            for v in &mut out {
                *v *= 1e-250;
            }
        }
    }
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Fast `J_0` for kernel evaluation; caller guarantees `|x| <= 50`.
pub(crate) fn j0_fast(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        1.0
    } else if ax <= 4.0 {
        bessel_series(0, ax)
    } else {
        bessel_j_all_raw(0, ax)[0]
    }
}

/// Displaced-oscillator overlap factor
/// `D^k_j(a) = a^(k/2) sqrt(j!/(j+k)!) L^k_j(a) exp(-a/2)`.
///
/// The factorial ratio is accumulated in log space so high oscillator
/// indices do not overflow.
pub fn dressing_factor(k: u32, j: u32, alpha_tilde: f64) -> f64 {
    debug_assert!(alpha_tilde >= 0.0);
    if alpha_tilde == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // log of a^(k/2) sqrt(j!/(j+k)!)
    let mut log_pref = 0.5 * k as f64 * alpha_tilde.ln();
    for i in (j + 1)..=(j + k) {
        log_pref -= 0.5 * (i as f64).ln();
    }
    laguerre(k, j, alpha_tilde) * (log_pref - 0.5 * alpha_tilde).exp()
}

/// Dressed tunneling element `Delta_j^{j'}` between displaced oscillator
/// states with `j` and `j'` quanta.
pub fn dressed_delta_static(delta: f64, j: u32, j_prime: u32, alpha_tilde: f64) -> f64 {
    let k = j.abs_diff(j_prime);
    // sgn(j'-j)^|j'-j| with the 0^0 = 1 convention
    let sign = if j_prime < j && k % 2 == 1 { -1.0 } else { 1.0 };
    delta * sign * dressing_factor(k, j.min(j_prime), alpha_tilde)
}

/// Tunneling element dressed by both the resonator and the classical drive:
/// `J_{n'-n}(eps_d/omega_d) Delta_j^{j'}`.
pub fn dressed_delta_driven(
    delta: f64,
    n: i32,
    n_prime: i32,
    j: u32,
    j_prime: u32,
    alpha_tilde: f64,
    drive_ratio: f64,
) -> f64 {
    bessel_j_raw(n_prime - n, drive_ratio) * dressed_delta_static(delta, j, j_prime, alpha_tilde)
}
