//! One-dimensional searches shared by the local optimizers.

const GOLD: f64 = 1.618034;
const CGOLD: f64 = 0.381966;
const GROW_LIMIT: f64 = 110.0;
const TINY: f64 = 1e-21;
const MIN_TOL: f64 = 1e-11;
const BRACKET_ITERS: usize = 60;
const BRENT_ITERS: usize = 500;

/// Best point found by a line minimization: step `alpha` and value.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LinePoint {
    pub alpha: f64,
    pub f: f64,
}

/// Downhill bracket `a, b, c` with `f(b) ≤ f(a), f(c)`, starting from steps 0 and 1.
/// Returns `None` (with the best point seen) if no bracket forms in the budget.
fn bracket(phi: &mut dyn FnMut(f64) -> f64, f0: f64) -> Result<[(f64, f64); 3], LinePoint> {
    let (mut a, mut fa) = (0.0, f0);
    let (mut b, mut fb) = (1.0, phi(1.0));
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = phi(c);
    let mut iters = 0;
    while fc < fb {
        iters += 1;
        if iters > BRACKET_ITERS || !c.is_finite() {
            return Err(LinePoint { alpha: c, f: fc });
        }
        let tmp1 = (b - a) * (fb - fc);
        let tmp2 = (b - c) * (fb - fa);
        let val = tmp2 - tmp1;
        let denom = 2.0 * if val.abs() < TINY { TINY.copysign(val) } else { val };
        let mut w = b - ((b - c) * tmp2 - (b - a) * tmp1) / denom;
        let wlim = b + GROW_LIMIT * (c - b);
        let fw;
        if (w - c) * (b - w) > 0.0 {
            let fw_in = phi(w);
            if fw_in < fc {
                return Ok([(b, fb), (w, fw_in), (c, fc)]);
            } else if fw_in > fb {
                return Ok([(a, fa), (b, fb), (w, fw_in)]);
            }
            w = c + GOLD * (c - b);
            fw = phi(w);
        } else if (w - wlim) * (wlim - c) >= 0.0 {
            w = wlim;
            fw = phi(w);
        } else if (w - wlim) * (c - w) > 0.0 {
            let fw_in = phi(w);
            if fw_in < fc {
                b = c;
                c = w;
                w = c + GOLD * (c - b);
                fb = fc;
                fc = fw_in;
                fw = phi(w);
            } else {
                fw = fw_in;
            }
        } else {
            w = c + GOLD * (c - b);
            fw = phi(w);
        }
        a = b;
        b = c;
        c = w;
        fa = fb;
        fb = fc;
        fc = fw;
    }
    Ok([(a, fa), (b, fb), (c, fc)])
}

/// Brent's parabolic/golden minimization inside a bracket.
fn brent(phi: &mut dyn FnMut(f64) -> f64, br: [(f64, f64); 3], tol: f64) -> LinePoint {
    let [(ax, _), (bx, fb), (cx, _)] = br;
    let (mut a, mut b) = if ax < cx { (ax, cx) } else { (cx, ax) };
    let (mut x, mut w, mut v) = (bx, bx, bx);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..BRENT_ITERS {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + MIN_TOL;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = phi(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, w, x) = (w, x, u);
            (fv, fw, fx) = (fw, fx, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, w) = (w, u);
                (fv, fw) = (fw, fu);
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    LinePoint { alpha: x, f: fx }
}

/// Minimizes `phi` along a line starting from `phi(0) = f0`. The returned
/// value never exceeds `f0`.
pub(crate) fn line_minimize(phi: &mut dyn FnMut(f64) -> f64, f0: f64, tol: f64) -> LinePoint {
    let best = match bracket(phi, f0) {
        Ok(br) => brent(phi, br, tol),
        Err(p) => p,
    };
    if best.f <= f0 {
        best
    } else {
        LinePoint { alpha: 0.0, f: f0 }
    }
}

/// Armijo backtracking with safeguarded quadratic interpolation. `slope` is
/// the directional derivative at step 0 and must be negative.
pub(crate) fn backtrack(
    phi: &mut dyn FnMut(f64) -> f64,
    f0: f64,
    slope: f64,
    c1: f64,
    max_halvings: usize,
) -> Option<LinePoint> {
    let mut alpha = 1.0;
    for _ in 0..=max_halvings {
        let fa = phi(alpha);
        if fa <= f0 + c1 * alpha * slope {
            return Some(LinePoint { alpha, f: fa });
        }
        let denom = 2.0 * (fa - f0 - alpha * slope);
        let trial = if denom > 0.0 && denom.is_finite() {
            -slope * alpha * alpha / denom
        } else {
            0.5 * alpha
        };
        alpha = trial.clamp(0.1 * alpha, 0.5 * alpha);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_parabola_vertex() {
        let mut phi = |a: f64| (a - 2.7).powi(2) + 1.0;
        let f0 = phi(0.0);
        let p = line_minimize(&mut phi, f0, 1e-8);
        assert!((p.alpha - 2.7).abs() < 1e-8);
        assert!((p.f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_search_handles_reverse_direction() {
        let mut phi = |a: f64| (a + 0.4).powi(2);
        let f0 = phi(0.0);
        let p = line_minimize(&mut phi, f0, 1e-8);
        assert!((p.alpha + 0.4).abs() < 1e-8);
    }

    #[test]
    fn line_search_never_worsens() {
        let mut phi = |a: f64| -(-a * a).exp() + 0.01 * (40.0 * a).sin();
        let f0 = phi(0.0);
        assert!(line_minimize(&mut phi, f0, 1e-4).f <= f0);
    }

    #[test]
    fn backtracking_exact_on_quadratic() {
        // φ(α) = (1 − 3α)², slope −6; the interpolated step is exact.
        let mut phi = |a: f64| (1.0 - 3.0 * a).powi(2);
        let p = backtrack(&mut phi, 1.0, -6.0, 1e-4, 30).unwrap();
        assert!(p.f <= 1.0 - 1e-4 * p.alpha * 6.0);
    }
}
