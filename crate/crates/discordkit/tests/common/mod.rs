//! Independent oracle implementations for cross-checking the library.
//!
//! The conditional entropy here is computed the long way: explicit 4x4
//! projectors, full matrix products, a loop-written partial trace and a
//! generic eigensolver. It shares no code with the optimized path in the
//! library.

use discordkit::qcore::{c, cr, ComplexMatrix2, ComplexMatrix4, Subsystem};
use discordkit::TwoQubitState;
use nalgebra::linalg::SymmetricEigen;

/// I (x) P or P (x) I depending on the measured side.
fn embed_projector(p: &ComplexMatrix2, measured: Subsystem) -> ComplexMatrix4 {
    let mut out = ComplexMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let v = match measured {
                        // projector acts on B (second factor)
                        Subsystem::B => {
                            if i == j {
                                p[(k, l)]
                            } else {
                                c(0.0, 0.0)
                            }
                        }
                        Subsystem::A => {
                            if k == l {
                                p[(i, j)]
                            } else {
                                c(0.0, 0.0)
                            }
                        }
                    };
                    out[(2 * i + k, 2 * j + l)] = v;
                }
            }
        }
    }
    out
}

/// Loop-written partial trace keeping the side opposite to `measured`.
fn reduce_keeping_other(m: &ComplexMatrix4, measured: Subsystem) -> ComplexMatrix2 {
    let mut out = ComplexMatrix2::zeros();
    match measured {
        Subsystem::B => {
            // keep A: sum over the B index
            for a in 0..2 {
                for ap in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for b in 0..2 {
                        acc += m[(2 * a + b, 2 * ap + b)];
                    }
                    out[(a, ap)] = acc;
                }
            }
        }
        Subsystem::A => {
            for b in 0..2 {
                for bp in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for a in 0..2 {
                        acc += m[(2 * a + b, 2 * a + bp)];
                    }
                    out[(b, bp)] = acc;
                }
            }
        }
    }
    out
}

fn entropy2_eigen(m: &ComplexMatrix2) -> f64 {
    let eig = SymmetricEigen::new(*m);
    let mut s = 0.0;
    for i in 0..2 {
        let l = eig.eigenvalues[i];
        if l > 1e-15 {
            s -= l * l.log2();
        }
    }
    s
}

/// Conditional entropy of the unmeasured qubit for the projective pair at
/// (theta, phi) on `measured`, via the full-matrix route.
pub fn oracle_conditional_entropy(
    state: &TwoQubitState,
    theta: f64,
    phi: f64,
    measured: Subsystem,
) -> f64 {
    let v1 = nalgebra::Vector2::new(cr(theta.cos()), c(phi.cos(), phi.sin()) * theta.sin());
    let p1: ComplexMatrix2 = v1 * v1.adjoint();
    let p2: ComplexMatrix2 = ComplexMatrix2::identity() - p1;
    let mut total = 0.0;
    for proj in [p1, p2] {
        let big = embed_projector(&proj, measured);
        let post = big * state.matrix() * big;
        let prob = post.trace().re;
        if prob <= 1e-12 {
            continue;
        }
        let reduced = reduce_keeping_other(&post, measured) / cr(prob);
        total += prob * entropy2_eigen(&reduced);
    }
    total
}

/// Dense-grid minimum of the oracle conditional entropy over
/// theta in [0, pi/2], phi in [0, pi).
pub fn oracle_grid_min_conditional_entropy(
    state: &TwoQubitState,
    measured: Subsystem,
    n_grid: usize,
) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=n_grid {
        let theta = i as f64 / n_grid as f64 * std::f64::consts::FRAC_PI_2;
        for j in 0..n_grid {
            let phi = j as f64 / n_grid as f64 * std::f64::consts::PI;
            let v = oracle_conditional_entropy(state, theta, phi, measured);
            if v < best {
                best = v;
            }
        }
    }
    best
}

/// Discord via the dense-grid oracle.
pub fn oracle_grid_discord(state: &TwoQubitState, measured: Subsystem, n_grid: usize) -> f64 {
    let s_measured = state.partial_trace(measured).entropy();
    (s_measured - state.entropy() + oracle_grid_min_conditional_entropy(state, measured, n_grid))
        .max(0.0)
}
