//! Seeded random two-qubit states: Haar pure states and rank-constrained
//! density matrices, reproducible across platforms and worker counts.
//!
//! Two rank-k ensembles are provided. `Ginibre` is the induced
//! (Hilbert-Schmidt for k = 4) measure rho = G G^dag / tr with a 4 x k
//! complex Gaussian G. `HaarSimplex` draws eigenvalues uniformly from the
//! k-simplex and eigenvectors as Haar frame columns; this is the ensemble
//! the survey statistics are anchored to.

use crate::qcore::{c, cr, ComplexMatrix4, TwoQubitState};
use nalgebra::Vector4;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Random-state ensemble for rank-constrained draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ensemble {
    /// rho = G G^dag / tr(G G^dag), G a 4 x k complex Gaussian.
    Ginibre,
    /// Haar eigenvector frame with eigenvalues uniform on the k-simplex.
    HaarSimplex,
}

impl std::fmt::Display for Ensemble {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ensemble::Ginibre => write!(f, "ginibre"),
            Ensemble::HaarSimplex => write!(f, "haar-simplex"),
        }
    }
}

/// Deterministic generator: identical (master_seed, stream_id, draw index)
/// yields identical output on every platform and worker layout.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededGenerator {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        SeededGenerator {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform in [0, 1) from the top 53 bits of the stream.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn complex_normal(&mut self) -> nalgebra::Complex<f64> {
        c(self.normal(), self.normal())
    }
}

/// Haar-uniform pure state as a rank-1 projector.
pub fn random_pure(gen: &mut SeededGenerator) -> TwoQubitState {
    loop {
        let v = Vector4::new(
            gen.complex_normal(),
            gen.complex_normal(),
            gen.complex_normal(),
            gen.complex_normal(),
        );
        if v.norm() > 1e-12 {
            if let Ok(s) = TwoQubitState::from_pure(&v) {
                return s;
            }
        }
    }
}

/// Rank-k state from the Ginibre construction rho = G G^dag / tr(G G^dag).
///
/// The returned state always has the requested rank; draws whose clipped
/// spectrum misses it (a roundoff-rare event) are redrawn from the same
/// stream, keeping the output deterministic.
pub fn random_density(rank: u8, gen: &mut SeededGenerator) -> TwoQubitState {
    assert!((1..=4).contains(&rank), "rank must be 1..=4");
    loop {
        let k = rank as usize;
        let mut g = [[c(0.0, 0.0); 4]; 4];
        for col in g.iter_mut().take(k) {
            for e in col.iter_mut() {
                *e = gen.complex_normal();
            }
        }
        let mut w = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = c(0.0, 0.0);
                for col in g.iter().take(k) {
                    acc += col[i] * col[j].conj();
                }
                w[(i, j)] = acc;
            }
        }
        let tr = w.trace().re;
        if tr <= 1e-12 {
            continue;
        }
        if let Ok(s) = TwoQubitState::validate(w / cr(tr)) {
            if s.rank() == rank {
                return s;
            }
        }
    }
}

/// Rank-k state with Haar eigenvectors and eigenvalues uniform on the
/// k-simplex.
pub fn random_density_haar_simplex(rank: u8, gen: &mut SeededGenerator) -> TwoQubitState {
    assert!((1..=4).contains(&rank), "rank must be 1..=4");
    loop {
        let k = rank as usize;
        let mut lam = [0.0f64; 4];
        let mut total = 0.0;
        for l in lam.iter_mut().take(k) {
            *l = -(1.0 - gen.uniform()).ln();
            total += *l;
        }
        if total <= 0.0 {
            continue;
        }
        for l in lam.iter_mut().take(k) {
            *l /= total;
        }
        let u = random_unitary4(gen);
        let mut rho = ComplexMatrix4::zeros();
        for (idx, l) in lam.iter().enumerate().take(k) {
            let col = u.column(idx);
            for i in 0..4 {
                for j in 0..4 {
                    rho[(i, j)] += col[i] * col[j].conj() * cr(*l);
                }
            }
        }
        if let Ok(s) = TwoQubitState::validate(rho) {
            if s.rank() == rank {
                return s;
            }
        }
    }
}

/// Draws from the chosen ensemble.
pub fn random_density_in(
    ensemble: Ensemble,
    rank: u8,
    gen: &mut SeededGenerator,
) -> TwoQubitState {
    match ensemble {
        Ensemble::Ginibre => random_density(rank, gen),
        Ensemble::HaarSimplex => random_density_haar_simplex(rank, gen),
    }
}

/// Haar-random 4x4 unitary via QR of a Ginibre matrix with phase fixing.
pub fn random_unitary4(gen: &mut SeededGenerator) -> ComplexMatrix4 {
    let mut g = ComplexMatrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = gen.complex_normal();
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..4 {
        let d = r[(j, j)];
        let n = d.norm();
        let ph = if n > 0.0 { d / cr(n) } else { cr(1.0) };
        for i in 0..4 {
            u[(i, j)] *= ph;
        }
    }
    u
}

/// Haar-random 2x2 unitary.
pub fn random_unitary2(gen: &mut SeededGenerator) -> crate::qcore::ComplexMatrix2 {
    let mut g = crate::qcore::ComplexMatrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            g[(i, j)] = gen.complex_normal();
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..2 {
        let d = r[(j, j)];
        let n = d.norm();
        let ph = if n > 0.0 { d / cr(n) } else { cr(1.0) };
        for i in 0..2 {
            u[(i, j)] *= ph;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_draws_are_rank_one() {
        let mut g = SeededGenerator::new(11, 0);
        for _ in 0..50 {
            let s = random_pure(&mut g);
            assert_eq!(s.rank(), 1);
            assert!((s.purity() - 1.0).abs() < 1e-10);
            assert!(s.entropy().abs() < 1e-10);
        }
    }

    #[test]
    fn density_rank_matches_request() {
        let mut g = SeededGenerator::new(5, 3);
        for rank in 1..=4u8 {
            for _ in 0..25 {
                assert_eq!(random_density(rank, &mut g).rank(), rank);
                assert_eq!(random_density_haar_simplex(rank, &mut g).rank(), rank);
            }
        }
    }

    #[test]
    fn same_seed_and_stream_reproduce() {
        let mut g1 = SeededGenerator::new(99, 7);
        let mut g2 = SeededGenerator::new(99, 7);
        for _ in 0..5 {
            let a = random_density(4, &mut g1);
            let b = random_density(4, &mut g2);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(a.matrix()[(i, j)], b.matrix()[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn rank2_draws_are_never_separable() {
        let mut g = SeededGenerator::new(61, 0);
        for _ in 0..150 {
            let s = random_density(2, &mut g);
            assert!(
                crate::correlations::concurrence(&s) > 1e-9,
                "separable rank-2 draw"
            );
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut g = SeededGenerator::new(2, 0);
        let u = random_unitary4(&mut g);
        let dev: f64 = (u.adjoint() * u - ComplexMatrix4::identity())
            .iter()
            .map(|z| z.norm())
            .sum();
        assert!(dev < 1e-12);
    }

    #[test]
    fn disjoint_streams_are_uncorrelated() {
        // lag-0 cross-correlation of purities across two streams
        let n = 4000;
        let mut g1 = SeededGenerator::new(42, 1);
        let mut g2 = SeededGenerator::new(42, 2);
        let xs: Vec<f64> = (0..n).map(|_| random_density(4, &mut g1).purity()).collect();
        let ys: Vec<f64> = (0..n).map(|_| random_density(4, &mut g2).purity()).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let mut num = 0.0;
        let mut dx = 0.0;
        let mut dy = 0.0;
        for i in 0..n {
            num += (xs[i] - mx) * (ys[i] - my);
            dx += (xs[i] - mx) * (xs[i] - mx);
            dy += (ys[i] - my) * (ys[i] - my);
        }
        let r = num / (dx * dy).sqrt();
        assert!(r.abs() < 3.0 / (n as f64).sqrt(), "cross-correlation {r}");
    }

    #[test]
    fn ensemble_mean_is_maximally_mixed() {
        // first-moment check for the Ginibre rank-4 ensemble
        let n = 20000;
        let mut g = SeededGenerator::new(7, 0);
        let mut acc = ComplexMatrix4::zeros();
        for _ in 0..n {
            acc += random_density(4, &mut g).matrix();
        }
        acc /= cr(n as f64);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                // entry standard error is below 2e-3 at this n
                assert!(
                    (acc[(i, j)] - cr(want)).norm() < 6e-3,
                    "mean[{i}{j}] = {:?}",
                    acc[(i, j)]
                );
            }
        }
    }
}
