//! Small numerical kernels: adaptive Simpson quadrature, bracketed root and
//! minimum search, and compensated summation.

use crate::error::{Error, Result};

/// Absolute tolerance of the slot integrals, on the integrand scale.
pub const QUAD_TOL: f64 = 1e-9;
/// Maximum bisection depth of adaptive Simpson.
pub const QUAD_MAX_DEPTH: u32 = 30;

#[derive(Debug, Clone, Copy)]
struct SimpsonPanel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl SimpsonPanel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64) -> Self {
        let m = 0.5 * (a + b);
        let fm = f(m);
        SimpsonPanel {
            a,
            b,
            fa,
            fm,
            fb,
            whole: (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        }
    }
}

fn simpson_recurse<F: Fn(f64) -> f64>(f: &F, p: SimpsonPanel, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (p.a + p.b);
    let left = SimpsonPanel::new(f, p.a, m, p.fa, p.fm);
    let right = SimpsonPanel::new(f, m, p.b, p.fm, p.fb);
    let delta = left.whole + right.whole - p.whole;
    if delta.abs() <= 15.0 * tol {
        // Richardson extrapolation
        return Ok(left.whole + right.whole + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "error estimate {:.3e} above {:.3e} on [{}, {}] at maximum depth",
            delta.abs() / 15.0,
            tol,
            p.a,
            p.b
        )));
    }
    Ok(simpson_recurse(f, left, 0.5 * tol, depth - 1)?
        + simpson_recurse(f, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let p = SimpsonPanel::new(&f, a, b, f(a), f(b));
    simpson_recurse(&f, p, tol, max_depth)
}

/// Splits `[a, b]` into `panels` equal pieces and runs adaptive Simpson on
/// each, sharing the tolerance budget. Starting from several panels keeps the
/// first Simpson estimate from aliasing an oscillatory integrand.
pub fn integrate_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let per_panel_tol = tol / panels as f64;
    let mut total = NeumaierSum::default();
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels {
            b
        } else {
            a + h * (i + 1) as f64
        };
        total.add(adaptive_simpson(&f, lo, hi, per_panel_tol, max_depth)?);
    }
    Ok(total.sum())
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Stops when the bracket is
/// narrower than `x_tol`.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NotBracketed(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol {
            return Ok(mid);
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!(
        "bisection bracket still {:.3e} wide after {max_iter} steps",
        (hi - lo).abs()
    )))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= x_tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// sin(x)/x with the removable point handled.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Trapezoid rule over tabulated samples on an arbitrary ascending grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .collect::<NeumaierSum>()
        .sum()
}
