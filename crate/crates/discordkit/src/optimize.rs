//! Derivative-free minimization and bracketed root finding used by the
//! correlation optimizers and the boundary-curve solvers.

/// Result of a simplex minimization.
pub(crate) struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Nelder-Mead with the classic (1, 2, 1/2, 1/2) coefficients.
///
/// Converged means the simplex value spread fell below `ftol`. The returned
/// value is the best vertex ever evaluated, so it is always a valid upper
/// bound for a minimization.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    ftol: f64,
) -> NmResult {
    let dim = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if vals[worst] - vals[best] < ftol {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut cx = vec![0.0; dim];
        for (i, p) in pts.iter().enumerate() {
            if i == worst {
                continue;
            }
            for (cc, &v) in cx.iter_mut().zip(p.iter()) {
                *cc += v;
            }
        }
        for cc in cx.iter_mut() {
            *cc /= dim as f64;
        }

        let refl: Vec<f64> = cx
            .iter()
            .zip(pts[worst].iter())
            .map(|(&cc, &w)| 2.0 * cc - w)
            .collect();
        let f_refl = f(&refl);

        if f_refl < vals[best] {
            let exp: Vec<f64> = cx
                .iter()
                .zip(pts[worst].iter())
                .map(|(&cc, &w)| 3.0 * cc - 2.0 * w)
                .collect();
            let f_exp = f(&exp);
            if f_exp < f_refl {
                pts[worst] = exp;
                vals[worst] = f_exp;
            } else {
                pts[worst] = refl;
                vals[worst] = f_refl;
            }
        } else if f_refl < vals[second_worst] {
            pts[worst] = refl;
            vals[worst] = f_refl;
        } else {
            let contr: Vec<f64> = cx
                .iter()
                .zip(pts[worst].iter())
                .map(|(&cc, &w)| 0.5 * (cc + w))
                .collect();
            let f_contr = f(&contr);
            if f_contr < vals[worst] {
                pts[worst] = contr;
                vals[worst] = f_contr;
            } else {
                // shrink toward the best vertex
                let best_pt = pts[best].clone();
                for i in 0..=dim {
                    if i == best {
                        continue;
                    }
                    for (p, &bp) in pts[i].iter_mut().zip(best_pt.iter()) {
                        *p = 0.5 * (*p + bp);
                    }
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }

    let mut bi = 0;
    for i in 1..=dim {
        if vals[i] < vals[bi] {
            bi = i;
        }
    }
    NmResult {
        x: pts[bi].clone(),
        value: vals[bi],
        converged,
    }
}

/// 2-D minimization over the measurement angles: coarse grid over
/// [0, pi/2] x [0, pi) followed by simplex refinement from the best cells.
pub(crate) struct Min2dResult {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
    pub converged: bool,
}

pub(crate) fn minimize_measurement<F: Fn(f64, f64) -> f64>(
    f: F,
    grid: usize,
    n_starts: usize,
    max_iter: usize,
    ftol: f64,
) -> Min2dResult {
    let theta_span = std::f64::consts::FRAC_PI_2;
    let phi_span = std::f64::consts::PI;
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let th = (i as f64 + 0.5) / grid as f64 * theta_span;
        for j in 0..grid {
            let ph = (j as f64 + 0.5) / grid as f64 * phi_span;
            cells.push((f(th, ph), th, ph));
        }
    }
    cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut best = Min2dResult {
        value: cells[0].0,
        theta: cells[0].1,
        phi: cells[0].2,
        converged: false,
    };
    let step = theta_span / grid as f64 * 0.7;
    let mut any_converged = false;
    for &(_, th, ph) in cells.iter().take(n_starts) {
        let r = nelder_mead(|x| f(x[0], x[1]), &[th, ph], step, max_iter, ftol);
        any_converged |= r.converged;
        if r.value < best.value {
            best.value = r.value;
            best.theta = r.x[0];
            best.phi = r.x[1];
        }
    }
    best.converged = any_converged;
    best
}

/// Brent's method on a bracketing interval. `f(a)` and `f(b)` must have
/// opposite signs.
pub(crate) fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic / secant step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Some(b)
}

/// Scans `[lo, hi]` on `n` points and returns every sign-change bracket.
pub(crate) fn bracket_roots<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            out.push((x_prev, x_prev));
        } else if f_prev * fx < 0.0 {
            out.push((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}
