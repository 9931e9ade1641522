//! The extremal mixed-state families that maximize discord at fixed
//! classical correlations, their closed forms, and the three-branch
//! boundary curve in the (J, delta) plane.
//!
//! Family R2: eps |phi~+><phi~+| + (1-eps) |01><01| with
//! |phi~+> = sqrt(p)|00> + sqrt(1-p)|11>. Family R3:
//! eps |phi+><phi+| + (1-eps)(m |01><01| + (1-m) |10><10|).

use crate::correlations::{self, CorrelationError, OptimizerSettings};
use crate::optimize::{bracket_roots, brent_root};
use crate::qcore::{binary_entropy, cr, ComplexMatrix4, Subsystem, TwoQubitState};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MdmsError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("degenerate point: a constraint partial is below 1e-12")]
    DegeneratePoint,
    #[error("no root of the extremality condition in the search interval")]
    NoRoot,
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Mixing weight and Bell-asymmetry weight of the rank-2 family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R2Params {
    pub epsilon: f64,
    pub p: f64,
}

/// Mixing weight and parity-sector weight of the rank-3 family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R3Params {
    pub epsilon: f64,
    pub m: f64,
}

fn check_unit(name: &'static str, value: f64) -> Result<f64, MdmsError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(MdmsError::ParamOutOfRange { name, value })
    }
}

/// eps |phi+><phi+| + (1-eps) |01><01|.
pub fn symmetric_r2_state(epsilon: f64) -> Result<TwoQubitState, MdmsError> {
    r2_state(R2Params {
        epsilon,
        p: 0.5,
    })
}

/// The asymmetric rank-2 family; already in spectral form with eigenvalues
/// eps and 1 - eps.
pub fn r2_state(params: R2Params) -> Result<TwoQubitState, MdmsError> {
    let eps = check_unit("epsilon", params.epsilon)?;
    let p = check_unit("p", params.p)?;
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let mut m = ComplexMatrix4::zeros();
    m[(0, 0)] = cr(eps * p);
    m[(0, 3)] = cr(eps * sp * sq);
    m[(3, 0)] = cr(eps * sp * sq);
    m[(3, 3)] = cr(eps * (1.0 - p));
    m[(1, 1)] = cr(1.0 - eps);
    Ok(TwoQubitState::validate(m).expect("family matrix is a valid state"))
}

/// The rank-3 family mixing a Bell state with both opposite-parity basis
/// states.
pub fn r3_state(params: R3Params) -> Result<TwoQubitState, MdmsError> {
    let eps = check_unit("epsilon", params.epsilon)?;
    let m = check_unit("m", params.m)?;
    let mut rho = ComplexMatrix4::zeros();
    rho[(0, 0)] = cr(eps / 2.0);
    rho[(0, 3)] = cr(eps / 2.0);
    rho[(3, 0)] = cr(eps / 2.0);
    rho[(3, 3)] = cr(eps / 2.0);
    rho[(1, 1)] = cr((1.0 - eps) * m);
    rho[(2, 2)] = cr((1.0 - eps) * (1.0 - m));
    Ok(TwoQubitState::validate(rho).expect("family matrix is a valid state"))
}

/// Equal-weight mixture of |phi+>, |01> and |10|; the junction of the two
/// rank-3 branches.
pub fn cusp_state() -> TwoQubitState {
    r3_state(R3Params {
        epsilon: 1.0 / 3.0,
        m: 0.5,
    })
    .expect("cusp parameters are in range")
}

// ---------------------------------------------------------------------------
// closed forms, rank-2 family

/// min over bases of the conditional entropy as a function of
/// y = eps (1-eps) (1-p) (measured B) or y = eps (1-eps) p (measured A);
/// equals h((1 + sqrt(1-4y))/2).
fn conditional_entropy_from_y(y: f64) -> f64 {
    let x = (1.0 - 4.0 * y).max(0.0).sqrt();
    binary_entropy((1.0 + x) / 2.0)
}

/// Closed-form minimal conditional entropy of the rank-2 family, attained at
/// theta = pi/4 (any phi).
pub fn r2_conditional_entropy_closed(
    params: R2Params,
    measured: Subsystem,
) -> Result<f64, MdmsError> {
    let eps = check_unit("epsilon", params.epsilon)?;
    let p = check_unit("p", params.p)?;
    let y = match measured {
        Subsystem::B => eps * (1.0 - eps) * (1.0 - p),
        Subsystem::A => eps * (1.0 - eps) * p,
    };
    Ok(conditional_entropy_from_y(y))
}

/// Closed-form discord of the rank-2 family for the given measured side.
pub fn r2_discord_closed(params: R2Params, measured: Subsystem) -> Result<f64, MdmsError> {
    let eps = params.epsilon;
    let p = params.p;
    let cond = r2_conditional_entropy_closed(params, measured)?;
    let s = binary_entropy(eps);
    let s_measured = match measured {
        Subsystem::B => binary_entropy(eps * p),
        Subsystem::A => binary_entropy(eps * (1.0 - p)),
    };
    Ok((s_measured - s + cond).max(0.0))
}

/// Closed-form classical correlations of the rank-2 family.
pub fn r2_classical_closed(params: R2Params, measured: Subsystem) -> Result<f64, MdmsError> {
    let eps = params.epsilon;
    let p = params.p;
    let cond = r2_conditional_entropy_closed(params, measured)?;
    let s_other = match measured {
        Subsystem::B => binary_entropy(eps * (1.0 - p)),
        Subsystem::A => binary_entropy(eps * p),
    };
    Ok((s_other - cond).max(0.0))
}

/// Closed-form concurrence 2 eps sqrt(p(1-p)) of the rank-2 family.
pub fn r2_concurrence_closed(params: R2Params) -> f64 {
    2.0 * params.epsilon * (params.p * (1.0 - params.p)).sqrt()
}

/// Closed-form concurrence max(0, eps - 2(1-eps) sqrt(m(1-m))) of the rank-3
/// family.
pub fn r3_concurrence_closed(params: R3Params) -> f64 {
    (params.epsilon - 2.0 * (1.0 - params.epsilon) * (params.m * (1.0 - params.m)).sqrt()).max(0.0)
}

const FD_STEP: f64 = 1e-5;

/// Extremality residual d_eps(delta) d_p(J) - d_p(delta) d_eps(J) for the
/// rank-2 family, with central finite differences on the closed forms.
pub fn r2_lagrange_residual(params: R2Params) -> Result<f64, MdmsError> {
    let eps = params.epsilon;
    let p = params.p;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(MdmsError::ParamOutOfRange {
            name: "epsilon",
            value: eps,
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(MdmsError::ParamOutOfRange { name: "p", value: p });
    }
    let h = FD_STEP;
    let at = |e: f64, pp: f64| -> (f64, f64) {
        let prm = R2Params { epsilon: e, p: pp };
        (
            r2_discord_closed(prm, Subsystem::B).expect("interior point"),
            r2_classical_closed(prm, Subsystem::B).expect("interior point"),
        )
    };
    let (d_ep, j_ep) = at(eps + h, p);
    let (d_em, j_em) = at(eps - h, p);
    let (d_pp, j_pp) = at(eps, p + h);
    let (d_pm, j_pm) = at(eps, p - h);
    let dd_de = (d_ep - d_em) / (2.0 * h);
    let dj_de = (j_ep - j_em) / (2.0 * h);
    let dd_dp = (d_pp - d_pm) / (2.0 * h);
    let dj_dp = (j_pp - j_pm) / (2.0 * h);
    if dj_de.abs() < 1e-12 || dj_dp.abs() < 1e-12 {
        return Err(MdmsError::DegeneratePoint);
    }
    Ok(dd_de * dj_dp - dd_dp * dj_de)
}

const ROOT_SCAN_POINTS: usize = 200;
const ROOT_XTOL: f64 = 1e-8;

/// All extremality roots in eps for fixed p, each refined by Brent's method.
fn r2_residual_roots(p: f64) -> Vec<f64> {
    let f = |e: f64| {
        r2_lagrange_residual(R2Params { epsilon: e, p }).unwrap_or(f64::NAN)
    };
    let lo = 2.0 * FD_STEP;
    let hi = 1.0 - 2.0 * FD_STEP;
    bracket_roots(f, lo, hi, ROOT_SCAN_POINTS)
        .into_iter()
        .filter_map(|(a, b)| brent_root(f, a, b, ROOT_XTOL))
        .collect()
}

/// The optimal mixing weight for fixed p: the extremality root whose curve
/// point has the largest discord. Dominated mirror-sheet roots are ignored.
pub fn r2_optimal_epsilon(p: f64) -> Result<f64, MdmsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MdmsError::ParamOutOfRange { name: "p", value: p });
    }
    r2_residual_roots(p)
        .into_iter()
        .max_by(|&a, &b| {
            let da = r2_discord_closed(R2Params { epsilon: a, p }, Subsystem::B).unwrap_or(0.0);
            let db = r2_discord_closed(R2Params { epsilon: b, p }, Subsystem::B).unwrap_or(0.0);
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(MdmsError::NoRoot)
}

// ---------------------------------------------------------------------------
// closed forms, rank-3 family

/// Conditional entropy of the rank-3 family at theta = 0 (computational
/// basis on B).
pub fn r3_conditional_entropy_theta0(params: R3Params) -> Result<f64, MdmsError> {
    let eps = check_unit("epsilon", params.epsilon)?;
    let m = check_unit("m", params.m)?;
    let p0 = eps / 2.0 + (1.0 - eps) * (1.0 - m);
    let p1 = eps / 2.0 + (1.0 - eps) * m;
    let mut s = 0.0;
    if p0 > 0.0 {
        s += p0 * binary_entropy(eps / 2.0 / p0);
    }
    if p1 > 0.0 {
        s += p1 * binary_entropy(eps / 2.0 / p1);
    }
    Ok(s)
}

/// Conditional entropy of the rank-3 family at theta = pi/4, phi = 0.
pub fn r3_conditional_entropy_theta_pi4(params: R3Params) -> Result<f64, MdmsError> {
    let eps = check_unit("epsilon", params.epsilon)?;
    let m = check_unit("m", params.m)?;
    let x = ((1.0 - eps) * (1.0 - eps) * (2.0 * m - 1.0) * (2.0 * m - 1.0) + eps * eps).sqrt();
    Ok(binary_entropy((1.0 + x) / 2.0))
}

fn r3_entropies(eps: f64, m: f64) -> (f64, f64) {
    // (S(rho), S of either marginal); the marginals share one spectrum
    let probs = [eps, (1.0 - eps) * m, (1.0 - eps) * (1.0 - m)];
    let mut s = 0.0;
    for &q in &probs {
        if q > 0.0 {
            s -= q * q.log2();
        }
    }
    let marg = eps / 2.0 + (1.0 - eps) * m;
    (s, binary_entropy(marg))
}

/// Discord of the rank-3 family under its two optimal measurement angles,
/// min(delta_0, delta_{pi/4}); symmetric in the measured side.
pub fn r3_discord_two_angle(params: R3Params) -> Result<f64, MdmsError> {
    let s0 = r3_conditional_entropy_theta0(params)?;
    let s4 = r3_conditional_entropy_theta_pi4(params)?;
    let (s, s_marg) = r3_entropies(params.epsilon, params.m);
    Ok((s_marg - s + s0.min(s4)).max(0.0))
}

/// Classical correlations of the rank-3 family under the two optimal angles.
pub fn r3_classical_two_angle(params: R3Params) -> Result<f64, MdmsError> {
    let s0 = r3_conditional_entropy_theta0(params)?;
    let s4 = r3_conditional_entropy_theta_pi4(params)?;
    let (_, s_marg) = r3_entropies(params.epsilon, params.m);
    Ok((s_marg - s0.min(s4)).max(0.0))
}

/// The optimal mixing weight for fixed m: the root of
/// delta_0(eps, m) = delta_{pi/4}(eps, m), restricted to eps in [0, 1/3].
///
/// At m = 0 or 1 the family degenerates to a classical mixture and the
/// optimum is eps = 0.
pub fn r3_optimal_epsilon(m: f64) -> Result<f64, MdmsError> {
    let m = check_unit("m", m)?;
    if m == 0.0 || m == 1.0 {
        return Ok(0.0);
    }
    let g = |e: f64| {
        let prm = R3Params { epsilon: e, m };
        r3_conditional_entropy_theta0(prm).unwrap_or(f64::NAN)
            - r3_conditional_entropy_theta_pi4(prm).unwrap_or(f64::NAN)
    };
    // The root sits in (0, 1/3]; widen the bracket slightly so the cusp
    // root at exactly 1/3 (m = 1/2) is interior.
    let hi = (1.0f64 / 3.0 + 1e-3).min(1.0);
    let brackets = bracket_roots(g, 1e-9, hi, ROOT_SCAN_POINTS);
    let root = brackets
        .into_iter()
        .filter_map(|(a, b)| brent_root(g, a, b, ROOT_XTOL))
        .next_back()
        .ok_or(MdmsError::NoRoot)?;
    Ok(root.min(1.0 / 3.0 + 1e-6))
}

// ---------------------------------------------------------------------------
// boundary curve

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MdmsBranch {
    Rank3Lower,
    Rank3Middle,
    Rank2,
}

impl std::fmt::Display for MdmsBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MdmsBranch::Rank3Lower => write!(f, "Rank3Lower"),
            MdmsBranch::Rank3Middle => write!(f, "Rank3Middle"),
            MdmsBranch::Rank2 => write!(f, "Rank2"),
        }
    }
}

/// One sample of the boundary curve. `param2` is m on the rank-3 branches
/// and p on the rank-2 branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MdmsPoint {
    pub branch: MdmsBranch,
    pub epsilon: f64,
    pub param2: f64,
    #[serde(rename = "J")]
    pub classical_j: f64,
    #[serde(rename = "delta")]
    pub delta: f64,
    #[serde(rename = "E")]
    pub concurrence: f64,
}

/// Junction data between the middle and rank-2 branches.
#[derive(Debug, Clone, Copy)]
pub struct BranchJunction {
    /// Upper end of the Rank3Middle branch in eps.
    pub epsilon_middle: f64,
    /// Lower end of the Rank2 branch in eps.
    pub epsilon_rank2: f64,
    /// Classical correlations at the handoff.
    pub classical_j: f64,
}

struct Rank2Samples {
    // sorted by J ascending; fields (J, delta, eps, p)
    pts: Vec<(f64, f64, f64, f64)>,
}

impl Rank2Samples {
    fn build(p_lo: f64, p_hi: f64, n: usize) -> Self {
        let mut pts = Vec::new();
        for i in 0..=n {
            let p = p_lo + (p_hi - p_lo) * i as f64 / n as f64;
            if let Ok(eps) = r2_optimal_epsilon(p) {
                let prm = R2Params { epsilon: eps, p };
                let d = r2_discord_closed(prm, Subsystem::B).unwrap();
                let j = r2_classical_closed(prm, Subsystem::B).unwrap();
                if d > j {
                    pts.push((j, d, eps, p));
                }
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Rank2Samples { pts }
    }

    fn delta_at(&self, j: f64) -> Option<f64> {
        self.interp(j).map(|(d, _, _)| d)
    }

    fn interp(&self, j: f64) -> Option<(f64, f64, f64)> {
        if self.pts.is_empty() || j < self.pts[0].0 || j > self.pts[self.pts.len() - 1].0 {
            return None;
        }
        let idx = self
            .pts
            .partition_point(|x| x.0 < j)
            .clamp(1, self.pts.len() - 1);
        let (j0, d0, e0, p0) = self.pts[idx - 1];
        let (j1, d1, e1, p1) = self.pts[idx];
        if j1 <= j0 {
            return Some((d0, e0, p0));
        }
        let t = (j - j0) / (j1 - j0);
        Some((d0 + t * (d1 - d0), e0 + t * (e1 - e0), p0 + t * (p1 - p0)))
    }
}

fn middle_branch_point(
    eps: f64,
    settings: &OptimizerSettings,
) -> Result<(f64, f64), MdmsError> {
    // (J, delta) of the m = 1/2 rank-3 state from the generic optimizer
    let state = r3_state(R3Params { epsilon: eps, m: 0.5 })?;
    let (d, _) = correlations::discord_projective_with(&state, Subsystem::B, settings)?;
    let (j, _) = correlations::classical_correlations_with(&state, Subsystem::B, settings)?;
    Ok((j, d))
}

/// Locates the dominance exchange between the Rank3Middle and Rank2 branches
/// in the (J, delta) plane.
pub fn locate_branch_junction(settings: &OptimizerSettings) -> Result<BranchJunction, MdmsError> {
    let samples = Rank2Samples::build(0.27, 0.42, 900);
    if samples.pts.is_empty() {
        return Err(MdmsError::NoRoot);
    }
    let diff = |eps: f64| -> f64 {
        match middle_branch_point(eps, settings) {
            Ok((j, d)) => match samples.delta_at(j) {
                Some(dc) => d - dc,
                // rank-2 sheet absent here: middle branch dominates
                None => 1.0,
            },
            Err(_) => f64::NAN,
        }
    };
    let brackets = bracket_roots(diff, 1.0 / 3.0 + 1e-4, 0.46, 80);
    let (a, b) = *brackets.first().ok_or(MdmsError::NoRoot)?;
    let eps_middle = brent_root(diff, a, b, 1e-6).ok_or(MdmsError::NoRoot)?;
    let (j_star, _) = middle_branch_point(eps_middle, settings)?;
    let (_, epsilon_rank2, _) = samples.interp(j_star).ok_or(MdmsError::NoRoot)?;
    Ok(BranchJunction {
        epsilon_middle: eps_middle,
        epsilon_rank2,
        classical_j: j_star,
    })
}

/// Traces the three boundary branches with `n_points_per_branch` samples
/// each: the solved rank-3 branch up to the cusp, the m = 1/2 rank-3 branch
/// up to the junction, and the solved rank-2 branch up to the pure Bell
/// state. Points are ordered by increasing J.
pub fn trace_mdms_curve(n_points_per_branch: usize) -> Result<Vec<MdmsPoint>, MdmsError> {
    trace_mdms_curve_with(n_points_per_branch, &OptimizerSettings::default())
}

pub fn trace_mdms_curve_with(
    n_points_per_branch: usize,
    settings: &OptimizerSettings,
) -> Result<Vec<MdmsPoint>, MdmsError> {
    assert!(n_points_per_branch >= 2, "need at least two points per branch");
    let n = n_points_per_branch;
    let mut out = Vec::with_capacity(3 * n + 1);

    // (a) solved rank-3 branch, m in [0, 1/2]; J runs from 0 to the cusp.
    // The m <-> 1-m half retraces the same curve and is omitted.
    for i in 0..n {
        let m = 0.5 * i as f64 / (n - 1) as f64;
        let eps = r3_optimal_epsilon(m)?;
        let prm = R3Params { epsilon: eps, m };
        let state = r3_state(prm)?;
        out.push(MdmsPoint {
            branch: MdmsBranch::Rank3Lower,
            epsilon: eps,
            param2: m,
            classical_j: r3_classical_two_angle(prm)?,
            delta: r3_discord_two_angle(prm)?,
            concurrence: correlations::concurrence(&state),
        });
    }

    let junction = locate_branch_junction(settings)?;

    // (b) m = 1/2 branch from the cusp to the junction, generic optimizer.
    for i in 0..n {
        let eps = 1.0 / 3.0
            + (junction.epsilon_middle - 1.0 / 3.0) * i as f64 / (n - 1) as f64;
        let state = r3_state(R3Params { epsilon: eps, m: 0.5 })?;
        let (d, _) = correlations::discord_projective_with(&state, Subsystem::B, settings)?;
        let (j, _) = correlations::classical_correlations_with(&state, Subsystem::B, settings)?;
        out.push(MdmsPoint {
            branch: MdmsBranch::Rank3Middle,
            epsilon: eps,
            param2: 0.5,
            classical_j: j,
            delta: d,
            concurrence: correlations::concurrence(&state),
        });
    }

    // (c) solved rank-2 branch from the junction to the pure Bell state,
    // emitted roughly uniformly in J.
    let dense = Rank2Samples::build(0.27, 0.4999, (6 * n).max(600));
    let j_hi = dense.pts.last().map(|x| x.0).unwrap_or(1.0);
    for i in 0..n {
        let j_target =
            junction.classical_j + (j_hi - junction.classical_j) * i as f64 / (n - 1) as f64;
        let Some((_, _, p_guess)) = dense.interp(j_target) else {
            continue;
        };
        let Ok(eps) = r2_optimal_epsilon(p_guess) else {
            continue;
        };
        let prm = R2Params { epsilon: eps, p: p_guess };
        let state = r2_state(prm)?;
        let (d, _) = correlations::discord_projective_with(&state, Subsystem::B, settings)?;
        let (j, _) = correlations::classical_correlations_with(&state, Subsystem::B, settings)?;
        out.push(MdmsPoint {
            branch: MdmsBranch::Rank2,
            epsilon: eps,
            param2: p_guess,
            classical_j: j,
            delta: d,
            concurrence: correlations::concurrence(&state),
        });
    }
    // pure Bell endpoint
    out.push(MdmsPoint {
        branch: MdmsBranch::Rank2,
        epsilon: 1.0,
        param2: 0.5,
        classical_j: 1.0,
        delta: 1.0,
        concurrence: 1.0,
    });

    Ok(out)
}

/// Piecewise-linear upper envelope delta(J) of a traced curve, for
/// dominance checks against scatter data.
pub struct CurveEnvelope {
    pts: Vec<(f64, f64)>,
}

impl CurveEnvelope {
    pub fn new(points: &[MdmsPoint]) -> Self {
        let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.classical_j, p.delta)).collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // keep the max delta among near-duplicate J values
        let mut dedup: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (j, d) in pts {
            match dedup.last_mut() {
                Some((jl, dl)) if (j - *jl).abs() < 1e-9 => *dl = dl.max(d),
                _ => dedup.push((j, d)),
            }
        }
        CurveEnvelope { pts: dedup }
    }

    /// Interpolated boundary discord at classical correlations `j`.
    pub fn delta_at(&self, j: f64) -> f64 {
        let pts = &self.pts;
        if j <= pts[0].0 {
            return pts[0].1;
        }
        if j >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = pts.partition_point(|x| x.0 < j).clamp(1, pts.len() - 1);
        let (j0, d0) = pts[idx - 1];
        let (j1, d1) = pts[idx];
        if j1 <= j0 {
            return d0.max(d1);
        }
        d0 + (d1 - d0) * (j - j0) / (j1 - j0)
    }
}

/// Writes traced points as CSV with header
/// `branch,epsilon,param2,J,delta,E`.
pub fn write_curve_csv<W: Write>(mut w: W, points: &[MdmsPoint]) -> std::io::Result<()> {
    writeln!(w, "branch,epsilon,param2,J,delta,E")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.branch, p.epsilon, p.param2, p.classical_j, p.delta, p.concurrence
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{concurrence, conditional_entropy, MeasurementBasis};

    #[test]
    fn r2_family_limits() {
        let bell = r2_state(R2Params { epsilon: 1.0, p: 0.5 }).unwrap();
        let want = TwoQubitState::bell_phi_plus();
        for i in 0..4 {
            for j in 0..4 {
                assert!((bell.matrix()[(i, j)] - want.matrix()[(i, j)]).norm() < 1e-12);
            }
        }
        let zero = r2_state(R2Params { epsilon: 0.0, p: 0.3 }).unwrap();
        assert_eq!(zero.rank(), 1);
        let basis00 = r2_state(R2Params { epsilon: 1.0, p: 1.0 }).unwrap();
        assert!((basis00.matrix()[(0, 0)] - cr(1.0)).norm() < 1e-12);
        assert!(r2_state(R2Params { epsilon: 1.2, p: 0.5 }).is_err());
    }

    #[test]
    fn r2_interior_rank_is_two() {
        let s = r2_state(R2Params { epsilon: 0.6, p: 0.3 }).unwrap();
        assert_eq!(s.rank(), 2);
        // spectral form: eigenvalues eps and 1 - eps
        let evs = s.eigenvalues();
        assert!((evs[0] - 0.6).abs() < 1e-12);
        assert!((evs[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn r3_family_limits() {
        let cusp = cusp_state();
        assert_eq!(cusp.rank(), 3);
        assert!((cusp.purity() - 1.0 / 3.0).abs() < 1e-12);
        let degenerate = r3_state(R3Params { epsilon: 0.4, m: 1.0 }).unwrap();
        assert_eq!(degenerate.rank(), 2);
        // m = 1 reduces to the symmetric rank-2 family
        let symm = symmetric_r2_state(0.4).unwrap();
        let mapped = degenerate.matrix();
        // |01> component sits at index 1 in both
        assert!((mapped[(1, 1)] - symm.matrix()[(1, 1)]).norm() < 1e-12);
    }

    #[test]
    fn closed_form_limits() {
        // y = 0: pure-state limit
        let v = r2_conditional_entropy_closed(
            R2Params { epsilon: 1.0, p: 0.3 },
            Subsystem::B,
        )
        .unwrap();
        assert!(v.abs() < 1e-12);
        // y = 1/4: x = 0 limit, value 1
        let v = conditional_entropy_from_y(0.25);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_paper_expression_interior() {
        // (x log2((1-x)/(1+x)) - log2 y) / 2 at interior points
        for &(eps, p) in &[(0.6, 0.3), (0.35, 0.7), (0.8, 0.45)] {
            let y = eps * (1.0 - eps) * (1.0 - p);
            let x = (1.0f64 - 4.0 * y).sqrt();
            let literal = (x * ((1.0 - x) / (1.0 + x)).log2() - y.log2()) / 2.0;
            let ours = r2_conditional_entropy_closed(R2Params { epsilon: eps, p }, Subsystem::B)
                .unwrap();
            assert!(
                (literal - ours).abs() < 1e-12,
                "eps={eps} p={p}: {literal} vs {ours}"
            );
        }
    }

    #[test]
    fn closed_form_matches_numeric_basis_value() {
        // the numeric conditional entropy at theta = pi/4 must agree
        for &(eps, p) in &[(0.6, 0.3), (0.2, 0.8), (0.9, 0.1)] {
            let prm = R2Params { epsilon: eps, p };
            let state = r2_state(prm).unwrap();
            let basis = MeasurementBasis::new(std::f64::consts::FRAC_PI_4, 0.0);
            let numeric = conditional_entropy(&state, &basis, Subsystem::B);
            let closed = r2_conditional_entropy_closed(prm, Subsystem::B).unwrap();
            assert!((numeric - closed).abs() < 1e-9, "eps={eps} p={p}");
        }
    }

    #[test]
    fn r3_two_angle_entropies_match_numeric() {
        for &(eps, m) in &[(0.25, 0.3), (0.333, 0.5), (0.15, 0.1)] {
            let prm = R3Params { epsilon: eps, m };
            let state = r3_state(prm).unwrap();
            let s0 = conditional_entropy(&state, &MeasurementBasis::new(0.0, 0.0), Subsystem::B);
            let s4 = conditional_entropy(
                &state,
                &MeasurementBasis::new(std::f64::consts::FRAC_PI_4, 0.0),
                Subsystem::B,
            );
            assert!((s0 - r3_conditional_entropy_theta0(prm).unwrap()).abs() < 1e-12);
            assert!((s4 - r3_conditional_entropy_theta_pi4(prm).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_closed_forms_match_wootters() {
        for &(eps, p) in &[(0.5, 0.5), (0.7, 0.2), (0.3, 0.9), (1.0, 0.5)] {
            let prm = R2Params { epsilon: eps, p };
            let s = r2_state(prm).unwrap();
            assert!(
                (concurrence(&s) - r2_concurrence_closed(prm)).abs() < 1e-10,
                "r2 eps={eps} p={p}"
            );
        }
        for &(eps, m) in &[(1.0 / 3.0, 0.5), (0.6, 0.3), (0.2, 0.5), (0.8, 0.9)] {
            let prm = R3Params { epsilon: eps, m };
            let s = r3_state(prm).unwrap();
            assert!(
                (concurrence(&s) - r3_concurrence_closed(prm)).abs() < 1e-10,
                "r3 eps={eps} m={m}"
            );
        }
    }

    #[test]
    fn r3_optimal_epsilon_examples() {
        // m = 1/2 gives the cusp
        let e = r3_optimal_epsilon(0.5).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-7, "cusp eps {e}");
        // m = 0 degenerates
        assert_eq!(r3_optimal_epsilon(0.0).unwrap(), 0.0);
        // discord equals the Bell weight on the solved curve
        for &m in &[0.2, 0.35, 0.5] {
            let eps = r3_optimal_epsilon(m).unwrap();
            let d = r3_discord_two_angle(R3Params { epsilon: eps, m }).unwrap();
            assert!((d - eps).abs() < 1e-6, "m={m}: delta {d} vs eps {eps}");
        }
    }

    #[test]
    fn symmetric_family_discord_is_side_independent() {
        let s = symmetric_r2_state(0.5).unwrap();
        let (dab, _) = correlations::discord_projective(&s, Subsystem::B).unwrap();
        let (dba, _) = correlations::discord_projective(&s, Subsystem::A).unwrap();
        assert!((dab - dba).abs() < 1e-9, "{dab} vs {dba}");
    }

    #[test]
    fn lagrange_residual_probe_sign() {
        // fixed interior non-optimal probes; signs frozen from an
        // independent finite-difference evaluation of the closed forms
        // (+8.145e-2 and -6.160e-1)
        let r = r2_lagrange_residual(R2Params { epsilon: 0.5, p: 0.4 }).unwrap();
        assert!(r > 0.0, "probe residual {r}");
        let r2 = r2_lagrange_residual(R2Params { epsilon: 0.99, p: 0.4 }).unwrap();
        assert!(r2 < 0.0, "probe residual {r2}");
    }

    #[test]
    fn residual_rejects_boundary() {
        assert!(matches!(
            r2_lagrange_residual(R2Params { epsilon: 1.0, p: 0.5 }),
            Err(MdmsError::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn optimal_epsilon_near_junction() {
        // the solver locates the root the curve is built from
        let eps = r2_optimal_epsilon(0.3).unwrap();
        let r = r2_lagrange_residual(R2Params { epsilon: eps, p: 0.3 }).unwrap();
        assert!(r.abs() < 1e-6, "residual at root {r}");
        assert!(r2_optimal_epsilon(0.05).is_err(), "no root expected at p=0.05");
    }
}
