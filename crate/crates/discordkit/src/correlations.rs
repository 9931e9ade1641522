//! Mutual information, measurement-conditional entropy, quantum discord
//! (projective and POVM), classical correlations and Wootters concurrence.
//!
//! Conventions: `measured = B` yields the quantities written delta_{A:B} and
//! J_{A:B}, i.e. system B is measured to learn about A. The two orderings are
//! never silently symmetrized.

use crate::optimize::{self, minimize_measurement};
use crate::qcore::{
    c, cr, hermitian2_eigenvalues, spinor, C64, ComplexMatrix2, ComplexMatrix4, Subsystem,
    TwoQubitState,
};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Outcomes with probability at or below this floor contribute zero
/// conditional entropy (the 0 log 0 convention).
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Final correlation values in [-NEGATIVE_CLIP, 0) are clipped to zero;
/// anything more negative is an optimizer failure.
pub const NEGATIVE_CLIP: f64 = 1e-9;
/// Completeness residual allowed for a rank-1 POVM.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("optimization failed: {reason}")]
    OptimizationFailed { reason: String },
}

#[derive(Debug, Error)]
pub enum PovmError {
    #[error("a rank-1 POVM needs 2 to 4 elements, got {0}")]
    BadElementCount(usize),
    #[error("POVM element {index} has non-positive or oversized weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("POVM completeness residual {residual:.3e} exceeds tolerance")]
    Incomplete { residual: f64 },
}

/// Settings for the projective-measurement minimizer: a coarse
/// `grid` x `grid` scan over (theta, phi) followed by simplex refinement
/// started from the `n_starts` best cells.
#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    pub grid: usize,
    pub n_starts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            grid: 48,
            n_starts: 5,
            max_iters: 200,
            f_tol: 1e-12,
        }
    }
}

/// Projective measurement pair on one qubit.
///
/// The projectors are |psi1><psi1| and |psi2><psi2| with
/// |psi1> = cos(theta)|0> + e^{i phi} sin(theta)|1> and
/// |psi2> = -e^{-i phi} sin(theta)|0> + cos(theta)|1>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

impl MeasurementBasis {
    /// Canonicalizes arbitrary finite angles into theta in [0, pi/2] and
    /// phi in [0, 2 pi); the projector pair is unchanged.
    pub fn new(theta: f64, phi: f64) -> Self {
        assert!(theta.is_finite() && phi.is_finite(), "angles must be finite");
        let (mut nx, mut ny, mut nz) = (
            (2.0 * theta).sin() * phi.cos(),
            (2.0 * theta).sin() * phi.sin(),
            (2.0 * theta).cos(),
        );
        // The pair {n, -n} defines the measurement; pick the ny >= 0
        // representative (ties broken toward nx >= 0, then nz >= 0).
        let flip = ny < 0.0 || (ny == 0.0 && (nx < 0.0 || (nx == 0.0 && nz < 0.0)));
        if flip {
            nx = -nx;
            ny = -ny;
            nz = -nz;
        }
        let t = 0.5 * nz.clamp(-1.0, 1.0).acos();
        let p = if ny.abs() + nx.abs() < 1e-15 {
            0.0
        } else {
            let raw = ny.atan2(nx);
            if raw < 0.0 {
                raw + 2.0 * std::f64::consts::PI
            } else {
                raw
            }
        };
        MeasurementBasis { theta: t, phi: p }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Bloch vector of the first projector.
    pub fn bloch(&self) -> [f64; 3] {
        [
            (2.0 * self.theta).sin() * self.phi.cos(),
            (2.0 * self.theta).sin() * self.phi.sin(),
            (2.0 * self.theta).cos(),
        ]
    }

    /// The two rank-1 projectors; they sum to the identity.
    pub fn projectors(&self) -> (ComplexMatrix2, ComplexMatrix2) {
        let v1 = spinor(self.theta, self.phi);
        let p1 = v1 * v1.adjoint();
        (p1, ComplexMatrix2::identity() - p1)
    }
}

/// Per-state bundle of correlation quantities.
///
/// `delta_ab` and `classical_j` come from measuring B, `delta_ba` from
/// measuring A; entropic fields are in bits.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CorrelationRecord {
    pub delta_ab: f64,
    pub delta_ba: f64,
    #[serde(rename = "J")]
    pub classical_j: f64,
    #[serde(rename = "I")]
    pub mutual_i: f64,
    #[serde(rename = "E")]
    pub concurrence: f64,
    pub purity: f64,
    pub rank: u8,
}

/// I(rho) = S(rho_A) + S(rho_B) - S(rho), in [0, 2].
pub fn mutual_information(state: &TwoQubitState) -> f64 {
    let sa = state.partial_trace(Subsystem::A).entropy();
    let sb = state.partial_trace(Subsystem::B).entropy();
    let v = sa + sb - state.entropy();
    if v < 0.0 {
        0.0f64.min(v.max(-NEGATIVE_CLIP))
    } else {
        v
    }
}

/// p * S(m / p) for an unnormalized PSD 2x2 block with trace p.
#[inline]
fn weighted_block_entropy(m: &ComplexMatrix2) -> f64 {
    let p = m[(0, 0)].re + m[(1, 1)].re;
    if p <= PROBABILITY_FLOOR {
        return 0.0;
    }
    let (lo, hi) = hermitian2_eigenvalues(m);
    let mut s = 0.0;
    if lo > 0.0 {
        s -= lo * (lo / p).log2();
    }
    if hi > 0.0 {
        s -= hi * (hi / p).log2();
    }
    s
}

/// Unnormalized conditional block of the unmeasured qubit for measurement
/// direction `v` on `measured`.
#[inline]
fn conditional_block(
    rho: &ComplexMatrix4,
    v: &Vector2<C64>,
    measured: Subsystem,
) -> ComplexMatrix2 {
    let mut m = ComplexMatrix2::zeros();
    match measured {
        Subsystem::B => {
            for a in 0..2 {
                for ap in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for b in 0..2 {
                        for bp in 0..2 {
                            acc += v[b].conj() * rho[(2 * a + b, 2 * ap + bp)] * v[bp];
                        }
                    }
                    m[(a, ap)] = acc;
                }
            }
        }
        Subsystem::A => {
            for b in 0..2 {
                for bp in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for a in 0..2 {
                        for ap in 0..2 {
                            acc += v[a].conj() * rho[(2 * a + b, 2 * ap + bp)] * v[ap];
                        }
                    }
                    m[(b, bp)] = acc;
                }
            }
        }
    }
    m
}

#[inline]
fn conditional_entropy_angles(
    rho: &ComplexMatrix4,
    reduced_other: &ComplexMatrix2,
    theta: f64,
    phi: f64,
    measured: Subsystem,
) -> f64 {
    let v = spinor(theta, phi);
    let m1 = conditional_block(rho, &v, measured);
    let m2 = reduced_other - m1;
    weighted_block_entropy(&m1) + weighted_block_entropy(&m2)
}

/// S(X | {Pi}) = sum_i p_i S(rho_{X|i}) for the projective pair `basis`
/// measured on `measured`; X is the other qubit.
pub fn conditional_entropy(
    state: &TwoQubitState,
    basis: &MeasurementBasis,
    measured: Subsystem,
) -> f64 {
    let reduced_other = *state.partial_trace(measured.other()).matrix();
    conditional_entropy_angles(
        state.matrix(),
        &reduced_other,
        basis.theta,
        basis.phi,
        measured,
    )
}

fn optimal_conditional_entropy(
    state: &TwoQubitState,
    measured: Subsystem,
    settings: &OptimizerSettings,
) -> Result<(f64, MeasurementBasis), CorrelationError> {
    let rho = *state.matrix();
    let reduced_other = *state.partial_trace(measured.other()).matrix();
    let r = minimize_measurement(
        |t, p| conditional_entropy_angles(&rho, &reduced_other, t, p, measured),
        settings.grid,
        settings.n_starts,
        settings.max_iters,
        settings.f_tol,
    );
    if !r.converged {
        return Err(CorrelationError::OptimizationFailed {
            reason: format!(
                "conditional entropy refinement (measured {measured}) hit the iteration budget"
            ),
        });
    }
    Ok((r.value, MeasurementBasis::new(r.theta, r.phi)))
}

fn clip_correlation(v: f64, what: &str) -> Result<f64, CorrelationError> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVE_CLIP {
        Ok(0.0)
    } else {
        Err(CorrelationError::OptimizationFailed {
            reason: format!("{what} came out {v:.3e}, below the roundoff window"),
        })
    }
}

/// Quantum discord with the conditional entropy minimized over projective
/// measurement pairs on `measured`. Returns the value and the minimizing
/// basis.
pub fn discord_projective(
    state: &TwoQubitState,
    measured: Subsystem,
) -> Result<(f64, MeasurementBasis), CorrelationError> {
    discord_projective_with(state, measured, &OptimizerSettings::default())
}

pub fn discord_projective_with(
    state: &TwoQubitState,
    measured: Subsystem,
    settings: &OptimizerSettings,
) -> Result<(f64, MeasurementBasis), CorrelationError> {
    let (min_cond, basis) = optimal_conditional_entropy(state, measured, settings)?;
    let s_measured = state.partial_trace(measured).entropy();
    let delta = clip_correlation(s_measured - state.entropy() + min_cond, "discord")?;
    Ok((delta, basis))
}

/// Classical correlations J = max over bases of S(rho_other) - S(other|{Pi}),
/// maximized over projective pairs on `measured`.
pub fn classical_correlations(
    state: &TwoQubitState,
    measured: Subsystem,
) -> Result<(f64, MeasurementBasis), CorrelationError> {
    classical_correlations_with(state, measured, &OptimizerSettings::default())
}

pub fn classical_correlations_with(
    state: &TwoQubitState,
    measured: Subsystem,
    settings: &OptimizerSettings,
) -> Result<(f64, MeasurementBasis), CorrelationError> {
    let (min_cond, basis) = optimal_conditional_entropy(state, measured, settings)?;
    let s_other = state.partial_trace(measured.other()).entropy();
    let j = clip_correlation(s_other - min_cond, "classical correlations")?;
    Ok((j, basis))
}

/// Wootters concurrence: max(0, l1 - l2 - l3 - l4) over the decreasing
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
///
/// Computed as the singular values of sqrt(rho) (sy x sy) conj(sqrt(rho)).
pub fn concurrence(state: &TwoQubitState) -> f64 {
    let vals = state.eigenvalues();
    let vecs = state.eigenvectors();
    let mut d = ComplexMatrix4::zeros();
    // eigenvalues at the solver noise floor are true zeros; taking their
    // square root would inject ~1e-8 spurious singular values
    let noise_floor = 8.0 * f64::EPSILON;
    for i in 0..4 {
        if vals[i] > noise_floor {
            d[(i, i)] = cr(vals[i].sqrt());
        }
    }
    let sqrt_rho = vecs * d * vecs.adjoint();
    // sigma_y x sigma_y is real: antidiagonal (-1, 1, 1, -1)
    let mut yy = ComplexMatrix4::zeros();
    yy[(0, 3)] = cr(-1.0);
    yy[(1, 2)] = cr(1.0);
    yy[(2, 1)] = cr(1.0);
    yy[(3, 0)] = cr(-1.0);
    let b = sqrt_rho * yy * sqrt_rho.map(|z| z.conj());
    let svd = b.svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (s[0] - s[1] - s[2] - s[3]).max(0.0)
}

/// Bundles all correlation quantities computed with the projective
/// optimizers; `mutual_i = delta_ab + classical_j` holds by construction.
pub fn correlation_record(state: &TwoQubitState) -> Result<CorrelationRecord, CorrelationError> {
    correlation_record_with(state, &OptimizerSettings::default())
}

pub fn correlation_record_with(
    state: &TwoQubitState,
    settings: &OptimizerSettings,
) -> Result<CorrelationRecord, CorrelationError> {
    let s = state.entropy();
    let sa = state.partial_trace(Subsystem::A).entropy();
    let sb = state.partial_trace(Subsystem::B).entropy();
    let (m_b, _) = optimal_conditional_entropy(state, Subsystem::B, settings)?;
    let (m_a, _) = optimal_conditional_entropy(state, Subsystem::A, settings)?;
    Ok(CorrelationRecord {
        delta_ab: clip_correlation(sb - s + m_b, "delta_ab")?,
        delta_ba: clip_correlation(sa - s + m_a, "delta_ba")?,
        classical_j: clip_correlation(sa - m_b, "classical_j")?,
        mutual_i: clip_correlation(sa + sb - s, "mutual_i")?,
        concurrence: concurrence(state),
        purity: state.purity(),
        rank: state.rank(),
    })
}

// ---------------------------------------------------------------------------
// rank-1 POVMs

/// One POVM effect mu |v(n)><v(n)| given by weight and unit Bloch vector.
#[derive(Debug, Clone, Copy)]
pub struct PovmElement {
    pub weight: f64,
    pub bloch: [f64; 3],
}

/// A rank-1 POVM with 2 to 4 elements summing to the identity.
#[derive(Debug, Clone)]
pub struct RankOnePovm {
    elements: Vec<PovmElement>,
}

impl RankOnePovm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self, PovmError> {
        if elements.len() < 2 || elements.len() > 4 {
            return Err(PovmError::BadElementCount(elements.len()));
        }
        for (index, e) in elements.iter().enumerate() {
            if !(e.weight > 0.0 && e.weight <= 1.0 + POVM_COMPLETENESS_TOL) {
                return Err(PovmError::BadWeight {
                    index,
                    weight: e.weight,
                });
            }
        }
        let mut wsum = 0.0;
        let mut vsum = [0.0f64; 3];
        for e in &elements {
            let n = (e.bloch[0] * e.bloch[0] + e.bloch[1] * e.bloch[1] + e.bloch[2] * e.bloch[2])
                .sqrt();
            if (n - 1.0).abs() > 1e-6 {
                return Err(PovmError::Incomplete { residual: (n - 1.0).abs() });
            }
            wsum += e.weight;
            for (vs, &b) in vsum.iter_mut().zip(e.bloch.iter()) {
                *vs += e.weight * b / n;
            }
        }
        let residual = ((wsum - 2.0).powi(2)
            + vsum[0] * vsum[0]
            + vsum[1] * vsum[1]
            + vsum[2] * vsum[2])
            .sqrt();
        if residual > POVM_COMPLETENESS_TOL {
            return Err(PovmError::Incomplete { residual });
        }
        Ok(RankOnePovm { elements })
    }

    /// Builds a valid POVM from unconstrained 3-vectors by projecting out the
    /// mean and rescaling the total weight to 2. Vanishing vectors are
    /// dropped.
    pub fn from_unconstrained(raw: &[[f64; 3]]) -> Result<Self, PovmError> {
        if raw.len() < 2 || raw.len() > 4 {
            return Err(PovmError::BadElementCount(raw.len()));
        }
        let n = raw.len() as f64;
        let mut mean = [0.0f64; 3];
        for x in raw {
            for (m, &v) in mean.iter_mut().zip(x.iter()) {
                *m += v / n;
            }
        }
        let mut projected: Vec<[f64; 3]> = raw
            .iter()
            .map(|x| [x[0] - mean[0], x[1] - mean[1], x[2] - mean[2]])
            .collect();
        let total: f64 = projected
            .iter()
            .map(|x| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
            .sum();
        if total < 1e-12 {
            return Err(PovmError::Incomplete { residual: 2.0 });
        }
        let scale = 2.0 / total;
        projected.retain(|x| {
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() * scale > 1e-12
        });
        let elements: Vec<PovmElement> = projected
            .iter()
            .map(|x| {
                let len = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                PovmElement {
                    weight: scale * len,
                    bloch: [x[0] / len, x[1] / len, x[2] / len],
                }
            })
            .collect();
        Self::new(elements)
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    /// The effects as 2x2 matrices.
    pub fn effects(&self) -> Vec<ComplexMatrix2> {
        self.elements
            .iter()
            .map(|e| {
                let p = projector_of_bloch(&e.bloch);
                p * cr(e.weight)
            })
            .collect()
    }

    /// sum_i p_i S(rho_{other|i}) under this POVM on `measured`.
    pub fn conditional_entropy(&self, state: &TwoQubitState, measured: Subsystem) -> f64 {
        let rho = state.matrix();
        self.elements
            .iter()
            .map(|e| {
                let v = spinor_of_bloch(&e.bloch);
                let m = conditional_block(rho, &v, measured) * cr(e.weight);
                weighted_block_entropy(&m)
            })
            .sum()
    }
}

fn spinor_of_bloch(n: &[f64; 3]) -> Vector2<C64> {
    let alpha = n[2].clamp(-1.0, 1.0).acos();
    let beta = n[1].atan2(n[0]);
    Vector2::new(
        cr((alpha / 2.0).cos()),
        c(beta.cos(), beta.sin()) * (alpha / 2.0).sin(),
    )
}

fn projector_of_bloch(n: &[f64; 3]) -> ComplexMatrix2 {
    let v = spinor_of_bloch(n);
    v * v.adjoint()
}

/// Discord minimized over rank-1 POVMs with 2 to `max_elements` elements on
/// `measured`. The projective (2-element) optimum is always a candidate, so
/// the result never exceeds the projective discord.
pub fn discord_povm(
    state: &TwoQubitState,
    measured: Subsystem,
    max_elements: usize,
) -> Result<f64, CorrelationError> {
    discord_povm_with(state, measured, max_elements, &OptimizerSettings::default())
}

pub fn discord_povm_with(
    state: &TwoQubitState,
    measured: Subsystem,
    max_elements: usize,
    settings: &OptimizerSettings,
) -> Result<f64, CorrelationError> {
    assert!(
        (2..=4).contains(&max_elements),
        "rank-1 POVMs for a qubit need 2 to 4 elements"
    );
    let (min_cond_proj, proj_basis) = optimal_conditional_entropy(state, measured, settings)?;
    let mut best_cond = min_cond_proj;
    for n_elements in 3..=max_elements {
        let v = minimize_povm_conditional(state, measured, n_elements, &proj_basis);
        if v < best_cond {
            best_cond = v;
        }
    }
    let s_measured = state.partial_trace(measured).entropy();
    clip_correlation(s_measured - state.entropy() + best_cond, "POVM discord")
}

/// Deterministic seed directions roughly spread over the sphere.
fn sphere_direction(k: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let z = 1.0 - 2.0 * ((k as f64 + 0.5) / 8.0);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let th = golden * k as f64;
    [r * th.cos(), r * th.sin(), z]
}

fn minimize_povm_conditional(
    state: &TwoQubitState,
    measured: Subsystem,
    n_elements: usize,
    proj_basis: &MeasurementBasis,
) -> f64 {
    let rho = *state.matrix();
    let objective = |xs: &[f64]| -> f64 {
        let mut raw = [[0.0f64; 3]; 4];
        for i in 0..n_elements {
            raw[i] = [xs[3 * i], xs[3 * i + 1], xs[3 * i + 2]];
        }
        match RankOnePovm::from_unconstrained(&raw[..n_elements]) {
            Ok(povm) => povm
                .elements
                .iter()
                .map(|e| {
                    let v = spinor_of_bloch(&e.bloch);
                    let m = conditional_block(&rho, &v, measured) * cr(e.weight);
                    weighted_block_entropy(&m)
                })
                .sum(),
            Err(_) => f64::INFINITY,
        }
    };

    let nb = proj_basis.bloch();
    // an axis not aligned with the projective direction
    let mut u = if nb[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    // orthogonalize
    let dot = u[0] * nb[0] + u[1] * nb[1] + u[2] * nb[2];
    for (ui, &ni) in u.iter_mut().zip(nb.iter()) {
        *ui -= dot * ni;
    }
    let ul = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt().max(1e-12);
    for ui in u.iter_mut() {
        *ui /= ul;
    }

    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for &eta in &[0.3f64, 0.03] {
        let mut s = Vec::with_capacity(3 * n_elements);
        s.extend_from_slice(&nb);
        s.extend_from_slice(&[-nb[0], -nb[1], -nb[2]]);
        if n_elements >= 3 {
            s.extend_from_slice(&[eta * u[0], eta * u[1], eta * u[2]]);
        }
        if n_elements == 4 {
            s.extend_from_slice(&[-eta * u[0], -eta * u[1], -eta * u[2]]);
        }
        seeds.push(s);
    }
    for start in 0..3usize {
        let mut s = Vec::with_capacity(3 * n_elements);
        for i in 0..n_elements {
            s.extend_from_slice(&sphere_direction(3 * start + i + 1));
        }
        seeds.push(s);
    }

    let mut best = f64::INFINITY;
    for seed in &seeds {
        best = best.min(objective(seed));
        let r = optimize::nelder_mead(objective, seed, 0.2, 600, 1e-12);
        if r.value < best {
            best = r.value;
        }
    }
    best
}
