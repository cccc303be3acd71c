//! Scaling-law extraction: least-squares slopes, convergence orders, and
//! adaptive quadrature for kernel-bound checks.

use crate::scalar::Real;

/// Least-squares line through a point cloud, with its coefficient of
/// determination. For power-law data use [`log_log_fit`].
#[derive(Clone, Copy, Debug)]
pub struct SlopeFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub n: usize,
}

/// Ordinary least squares y ≈ slope·x + intercept. `None` if fewer than two
/// points, non-finite input, or degenerate abscissae.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Option<SlopeFit<T>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return None;
    }
    let n = T::of(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy > T::zero() {
        (T::one() - ss_res / syy).max(T::zero())
    } else {
        T::one()
    };
    Some(SlopeFit { slope, intercept, r_squared, n: xs.len() })
}

/// Power-law exponent: least squares on (ln x, ln y). Requires strictly
/// positive data.
pub fn log_log_fit<T: Real>(xs: &[T], ys: &[T]) -> Option<SlopeFit<T>> {
    if xs.iter().chain(ys).any(|&v| v <= T::zero()) {
        return None;
    }
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Observed convergence order from three values at step h, h/2, h/4:
/// log₂ of the ratio of successive differences. NaN when a difference
/// vanishes (already converged past the comparison).
pub fn richardson_order<T: Real>(coarse: T, mid: T, fine: T) -> T {
    let d1 = (coarse - mid).abs();
    let d2 = (mid - fine).abs();
    if d1 <= T::zero() || d2 <= T::zero() {
        return T::nan();
    }
    (d1 / d2).ln() / T::of(2.0).ln()
}

/// ⟨x⟩ = (1 + x²)^{1/2}, the weight underlying all decay envelopes here.
pub fn bracket<T: Real>(x: T) -> T {
    (T::one() + x * x).sqrt()
}

const SIMPSON_MAX_DEPTH: usize = 40;

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let m = (a + b) / T::of(2.0);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::of(6.0) * (fa + T::of(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> T {
    let m = (a + b) / T::of(2.0);
    let lm = (a + m) / T::of(2.0);
    let rm = (m + b) / T::of(2.0);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= T::of(15.0) * tol {
        return left + right + err / T::of(15.0);
    }
    let half = tol / T::of(2.0);
    adapt(f, a, m, fa, flm, fm, left, half, depth - 1)
        + adapt(f, m, b, fm, frm, fb, right, half, depth - 1)
}

/// ∫₀^s ⟨(s−s')/ε⟩^{−3/2} ds', the single-kernel convolution bound subject.
pub fn kernel_integral_single<T: Real>(s: T, epsilon: T, tol: T) -> T {
    integrate_adaptive(
        &|sp: T| bracket((s - sp) / epsilon).powf(T::of(-1.5)),
        T::zero(),
        s,
        tol,
    )
}

/// ∫₀^s ⟨(s−s')/ε⟩^{−3/2} ⟨s'/ε⟩^{−3/2} ds', the double-kernel subject.
pub fn kernel_integral_double<T: Real>(s: T, epsilon: T, tol: T) -> T {
    integrate_adaptive(
        &|sp: T| {
            bracket((s - sp) / epsilon).powf(T::of(-1.5))
                * bracket(sp / epsilon).powf(T::of(-1.5))
        },
        T::zero(),
        s,
        tol,
    )
}
