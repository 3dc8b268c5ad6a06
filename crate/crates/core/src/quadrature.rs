//! Composite Newton-Cotes rules on uniformly spaced samples.

/// Integral of uniformly spaced samples `y` with spacing `h`.
///
/// Composite Simpson for an even panel count; with an odd count the last
/// three panels use the Simpson 3/8 rule so the whole result stays
/// fourth order. A single panel falls back to the trapezoid rule.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let panels = n - 1;
    if panels == 1 {
        return 0.5 * h * (y[0] + y[1]);
    }
    let (even_end, tail) = if panels % 2 == 0 { (panels, 0.0) } else { (panels - 3, simpson38(&y[panels - 3..], h)) };
    let mut s = 0.0;
    if even_end > 0 {
        s = y[0] + y[even_end];
        for i in 1..even_end {
            s += if i % 2 == 1 { 4.0 * y[i] } else { 2.0 * y[i] };
        }
        s *= h / 3.0;
    }
    s + tail
}

fn simpson38(y: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3])
}

/// Integral of `f` over `[a, b]` with `panels` Simpson panels (rounded up
/// to even).
pub fn simpson_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let y: Vec<f64> = (0..=n).map(|i| f(a + i as f64 * h)).collect();
    simpson(&y, h)
}

/// Value at `x` of the cubic through four equally spaced samples at
/// `x0, x0 + h, x0 + 2h, x0 + 3h`.
pub(crate) fn lagrange4(y: [f64; 4], x0: f64, h: f64, x: f64) -> f64 {
    let t = (x - x0) / h;
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3]
}
