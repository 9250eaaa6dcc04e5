//! Bracketed scalar root finding and 1-D minimization.

use crate::error::Result;

/// Convergence settings for [`bisect_secant`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Bisection runs until the bracket is narrower than this.
    pub bisect_width: f64,
    /// Target `|f(x)|` for the secant polish.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            bisect_width: 1e-6,
            f_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

/// Root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign (or
/// one of them zero). Bisection shrinks the bracket to `bisect_width`, then an
/// Illinois-modified secant iteration polishes inside the bracket.
pub fn bisect_secant<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    opts: &RootOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = if flo.abs() <= fhi.abs() {
        Root {
            x: lo,
            fx: flo,
            evaluations: 0,
        }
    } else {
        Root {
            x: hi,
            fx: fhi,
            evaluations: 0,
        }
    };
    if flo == 0.0 || fhi == 0.0 {
        return Ok(best);
    }
    debug_assert!(flo.signum() != fhi.signum(), "root not bracketed");
    let mut evals = 0usize;

    while hi - lo > opts.bisect_width && evals < opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        evals += 1;
        if fm.abs() < best.fx.abs() {
            best = Root {
                x: mid,
                fx: fm,
                evaluations: evals,
            };
        }
        if fm == 0.0 {
            best.evaluations = evals;
            return Ok(best);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }

    // Illinois: halve the stale endpoint's value when the same side is kept twice.
    let mut side = 0i8;
    let target = 1e-3 * opts.f_tol;
    while evals < opts.max_iter {
        let mut x = hi - fhi * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        evals += 1;
        let prev_best = best.fx.abs();
        if fx.abs() < prev_best {
            best = Root {
                x,
                fx,
                evaluations: evals,
            };
        }
        if fx == 0.0 {
            break;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        let width = hi - lo;
        let floor = 4.0 * f64::EPSILON * x.abs().max(1.0);
        if width <= floor {
            break;
        }
        if best.fx.abs() <= opts.f_tol && (best.fx.abs() <= target || fx.abs() >= prev_best) {
            break;
        }
    }
    best.evaluations = evals;
    Ok(best)
}

/// Expand a bracket around `center` for an increasing function `g` until
/// `g(lo) < 0 < g(hi)`. Returns `(lo, hi, g(lo), g(hi))`, or `None` after
/// `max_doublings` expansions on either side.
pub fn expand_increasing<F>(
    mut g: F,
    center: f64,
    half_width: f64,
    max_doublings: u32,
) -> Result<Option<(f64, f64, f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut step = half_width;
    let mut lo = center - step;
    let mut glo = g(lo)?;
    let mut n = 0;
    while glo > 0.0 {
        if n >= max_doublings {
            return Ok(None);
        }
        step *= 2.0;
        lo = center - step;
        glo = g(lo)?;
        n += 1;
    }
    let mut step = half_width;
    let mut hi = center + step;
    let mut ghi = g(hi)?;
    let mut n = 0;
    while ghi < 0.0 {
        if n >= max_doublings {
            return Ok(None);
        }
        step *= 2.0;
        hi = center + step;
        ghi = g(hi)?;
        n += 1;
    }
    Ok(Some((lo, hi, glo, ghi)))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_minimize<F>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > x_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let f = |x: f64| Ok(x * x - 2.0);
        let r = bisect_secant(f, 0.0, 2.0, -2.0, 2.0, &RootOptions::default()).unwrap();
        assert!((r.x - 2.0_f64.sqrt()).abs() < 1e-13);
        assert!(r.fx.abs() <= 1e-10);
    }

    #[test]
    fn handles_flat_tail_with_illinois() {
        // Convex, steep on one side: plain regula falsi stalls here.
        let f = |x: f64| Ok(x.powi(9) - 1e-3);
        let r = bisect_secant(
            f,
            0.0,
            1.5,
            -1e-3,
            1.5f64.powi(9) - 1e-3,
            &RootOptions::default(),
        )
        .unwrap();
        assert!((r.x - 1e-3f64.powf(1.0 / 9.0)).abs() < 1e-9);
    }

    #[test]
    fn expands_bracket_outward() {
        let g = |x: f64| Ok(x - 37.0);
        let (lo, hi, glo, ghi) = expand_increasing(g, 0.0, 1.0, 64).unwrap().unwrap();
        assert!(lo < 37.0 && hi > 37.0);
        assert!(glo < 0.0 && ghi > 0.0);
    }

    #[test]
    fn bracket_expansion_gives_up() {
        let g = |_x: f64| Ok(1.0);
        assert!(expand_increasing(g, 0.0, 1.0, 5).unwrap().is_none());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_minimize(|x| Ok((x - 0.3).powi(2)), -1.0, 2.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-16);
    }
}
