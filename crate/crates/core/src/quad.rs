//! Adaptive quadrature for 1D/2D normalization checks and evidence oracles.

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_1d(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson over `[a, b]` pre-split into equal panels. Needed for
/// sharply peaked integrands where a single coarse pass would miss the mass.
pub fn integrate_1d_panels(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let panel_tol = tol / n as f64;
    (0..n)
        .map(|i| integrate_1d(f, a + i as f64 * h, a + (i + 1) as f64 * h, panel_tol))
        .sum()
}

/// 2D tensor-product quadrature with panel pre-splitting on both axes.
pub fn integrate_2d_panels(
    f: &dyn Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
    panels: usize,
) -> f64 {
    let inner_tol = tol / (x_range.1 - x_range.0).max(1.0) * 0.1;
    let g = move |x: f64| {
        integrate_1d_panels(&|y| f(x, y), y_range.0, y_range.1, inner_tol, panels)
    };
    integrate_1d_panels(&g, x_range.0, x_range.1, tol, panels)
}

/// Tensor-product adaptive Simpson over a rectangle.
pub fn integrate_2d(
    f: &dyn Fn(f64, f64) -> f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    tol: f64,
) -> f64 {
    let inner_tol = tol / (x_range.1 - x_range.0).max(1.0) * 0.1;
    let g = move |x: f64| integrate_1d(&|y| f(x, y), y_range.0, y_range.1, inner_tol);
    integrate_1d(&g, x_range.0, x_range.1, tol)
}
