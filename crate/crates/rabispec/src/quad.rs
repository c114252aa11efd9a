//! Gauss-Kronrod quadrature primitives shared by the bath and kernel
//! integrators.

use num_complex::Complex64;

use crate::error::{Error, Result};

// 15-point Kronrod nodes (positive half, descending) with the embedded
// 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod 15(7) panel for a complex-valued integrand.
/// Returns `(kronrod value, error estimate)`.
pub fn gk15_c<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = WGK[7] * fc.norm();
    let mut samples = [Complex64::default(); 15];
    samples[7] = fc;

    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[i] = f1;
        samples[14 - i] = f2;
        let sum = f1 + f2;
        kronrod += WGK[i] * sum;
        res_abs += WGK[i] * (f1.norm() + f2.norm());
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for i in 0..7 {
        res_asc += WGK[i] * ((samples[i] - mean).norm() + (samples[14 - i] - mean).norm());
    }

    let value = kronrod * half;
    let err = rescale_error(
        ((kronrod - gauss) * half).norm(),
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    (value, err)
}

/// Adaptive bisection on GK15 panels until the absolute-error budget for
/// `[a, b]` is met.  Errors out with the achieved error if the depth cap is
/// reached first.
pub fn adaptive_c<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol_abs: f64,
    max_depth: u32,
) -> Result<(Complex64, f64)> {
    fn recurse<F: FnMut(f64) -> Complex64>(
        f: &mut F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> (Complex64, f64) {
        let (v, e) = gk15_c(&mut *f, a, b);
        if e <= tol || depth == 0 {
            return (v, e);
        }
        let mid = 0.5 * (a + b);
        let (v1, e1) = recurse(f, a, mid, 0.5 * tol, depth - 1);
        let (v2, e2) = recurse(f, mid, b, 0.5 * tol, depth - 1);
        (v1 + v2, e1 + e2)
    }
    let (value, achieved) = recurse(f, a, b, tol_abs, max_depth);
    if achieved > tol_abs.max(1e-14 * value.norm()) * 4.0 {
        return Err(Error::ToleranceNotMet { achieved, requested: tol_abs });
    }
    Ok((value, achieved))
}

/// Compensated (Kahan) accumulator for complex panel sums.
#[derive(Default, Clone, Copy)]
pub struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    pub fn add(&mut self, v: Complex64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Integrate an exponentially damped, multi-frequency integrand over
/// `[0, tau_max]` with fixed-width Gauss-Kronrod panels an eighth of the
/// shortest period wide, bisecting panels that fail their local error test.
pub fn panels_c<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    tau_max: f64,
    min_period: f64,
    tol_abs: f64,
) -> Result<(Complex64, f64)> {
    fn panel<F: FnMut(f64) -> Complex64>(
        f: &mut F,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
        acc: &mut KahanC,
        err: &mut f64,
    ) {
        let (v, e) = gk15_c(&mut *f, a, b);
        if e <= tol || depth == 0 {
            acc.add(v);
            *err += e;
            return;
        }
        let mid = 0.5 * (a + b);
        panel(f, a, mid, 0.5 * tol, depth - 1, acc, err);
        panel(f, mid, b, 0.5 * tol, depth - 1, acc, err);
    }

    let width = (min_period / 8.0).min(tau_max / 16.0).max(tau_max * 1e-9);
    let n_panels = (tau_max / width).ceil() as usize;
    let width = tau_max / n_panels as f64;
    let local_tol = tol_abs / n_panels as f64;

    let mut acc = KahanC::default();
    let mut err = 0.0;
    for i in 0..n_panels {
        let a = i as f64 * width;
        let b = if i + 1 == n_panels { tau_max } else { (i + 1) as f64 * width };
        panel(f, a, b, local_tol, 14, &mut acc, &mut err);
    }
    if err > tol_abs * 8.0 {
        return Err(Error::ToleranceNotMet { achieved: err, requested: tol_abs });
    }
    Ok((acc.value(), err))
}
