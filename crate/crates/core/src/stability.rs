//! Stability certificates for the flat closed loops.
//!
//! The statical controller is certified by a Hurwitz test on
//! `A − B (CS)⁻¹ CR`. The dynamical controller on integrator chains has a
//! speedup threshold `α_p` above which the coupled matrix is Hurwitz, and a
//! Lyapunov-based ball radius `K_S` inside which the nonlinear loop converges.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flat::{FlatPredictor, FlatSystem};
use crate::linalg::{
    char_poly, lyapunov_solve, norm2, routh_hurwitz, symmetric_eigenvalues, Matrix, Polynomial,
    StabilityVerdict, Vector,
};
use crate::plants::Plant;

pub const DEFAULT_ALPHA_MAX: f64 = 1e6;
/// Number of log-spaced probes in the coarse monotonicity sweep.
pub const COARSE_PROBES: usize = 16;
/// Bisection stops once the bracket is this narrow relative to its upper end.
pub const BRACKET_RTOL: f64 = 1e-4;
/// Relative offset at which a returned threshold is re-verified.
pub const VERIFY_RTOL: f64 = 1e-3;
/// Lowest probed alpha, relative to the ceiling.
pub const FLOOR_RATIO: f64 = 1e-12;
pub const MIN_USABLE_SAMPLES: usize = 10;
/// Samples this close to the origin are skipped when estimating ratio constants.
const MIN_SAMPLE_NORM: f64 = 1e-9;
const FD_STEP: f64 = 1e-6;

/// Characteristic polynomial of `A − B (CS)⁻¹ CR`.
pub fn snrc_closed_loop_poly(fs: &FlatSystem, horizon: f64) -> Result<Polynomial> {
    let fp = FlatPredictor::new(fs, horizon)?;
    char_poly(&fp.closed_loop_matrix(fs)?)
}

pub fn snrc_hurwitz_check(fs: &FlatSystem, horizon: f64) -> Result<StabilityVerdict> {
    routh_hurwitz(&snrc_closed_loop_poly(fs, horizon)?)
}

/// Routh verdict of the coupled matrix `[[A, B], [−α (CS)⁻¹ CR, −α I]]`.
pub fn dnrc_verdict(fs: &FlatSystem, fp: &FlatPredictor, alpha: f64) -> Result<StabilityVerdict> {
    routh_hurwitz(&char_poly(&fp.combined_dnrc_matrix(fs, alpha)?)?)
}

/// Coupled matrix with the controller switched off, `[[A, B], [0, 0]]`.
fn open_coupled_matrix(fs: &FlatSystem) -> Matrix {
    let n = fs.state_dim();
    let m = fs.input_dim();
    let mut out = Matrix::zeros(n + m, n + m);
    out.set_block(0, 0, fs.a());
    out.set_block(0, n, fs.b());
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// Stable at every probed alpha down to `floor`, and only marginal at `α = 0`.
    Zero { floor: f64 },
    /// Stable above `alpha`, not stable below it.
    Finite { alpha: f64, lower: f64, upper: f64 },
    NoneFound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaThreshold {
    pub order: Option<usize>,
    pub horizon: f64,
    pub threshold: Threshold,
    pub search_ceiling: f64,
}

impl AlphaThreshold {
    pub fn value(&self) -> Option<f64> {
        match self.threshold {
            Threshold::Zero { .. } => Some(0.0),
            Threshold::Finite { alpha, .. } => Some(alpha),
            Threshold::NoneFound => None,
        }
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Threshold search on an arbitrary flat system.
pub fn alpha_threshold_search_flat(
    fs: &FlatSystem,
    horizon: f64,
    alpha_max: f64,
) -> Result<AlphaThreshold> {
    if !(alpha_max > 0.0) || !alpha_max.is_finite() {
        return Err(Error::InvalidArgument("alpha_max must be positive"));
    }
    let fp = FlatPredictor::new(fs, horizon)?;
    let stable = |alpha: f64| dnrc_verdict(fs, &fp, alpha).map(StabilityVerdict::is_stable);
    let floor = alpha_max * FLOOR_RATIO;
    let probes = log_spaced(floor, alpha_max, COARSE_PROBES);
    let verdicts = probes.iter().map(|&a| stable(a)).collect::<Result<Vec<_>>>()?;

    // A single transition from not-stable to stable is the only accepted shape.
    if verdicts.windows(2).any(|w| w[0] && !w[1]) {
        return Err(Error::NonMonotoneVerdict);
    }
    let threshold = match verdicts.iter().position(|&s| s) {
        None => Threshold::NoneFound,
        Some(0) => Threshold::Zero { floor },
        Some(k) => {
            let (mut lo, mut hi) = (probes[k - 1], probes[k]);
            while (hi - lo) > BRACKET_RTOL * hi {
                let mid = (lo * hi).sqrt();
                if stable(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Threshold::Finite {
                alpha: 0.5 * (lo + hi),
                lower: lo,
                upper: hi,
            }
        }
    };
    Ok(AlphaThreshold {
        order: None,
        horizon,
        threshold,
        search_ceiling: alpha_max,
    })
}

/// Smallest speedup `α_p` making the dynamical controller stable on the
/// chain of `order` integrators.
pub fn alpha_threshold_search(order: usize, horizon: f64, alpha_max: f64) -> Result<AlphaThreshold> {
    if order == 0 || order > 6 {
        return Err(Error::InvalidArgument("chain order must be within 1..=6"));
    }
    let fs = FlatSystem::integrator_chain(order)?;
    let mut out = alpha_threshold_search_flat(&fs, horizon, alpha_max)?;
    out.order = Some(order);
    Ok(out)
}

/// Re-checks a search result: a finite threshold must be stable at
/// `α(1 + 1e-3)` and not stable at `α(1 − 1e-3)`; a zero threshold must be
/// stable at the floor and not stable at `α = 0`; "none found" must be
/// unstable at the ceiling.
pub fn verify_bracket(fs: &FlatSystem, result: &AlphaThreshold) -> Result<bool> {
    let fp = FlatPredictor::new(fs, result.horizon)?;
    let stable = |alpha: f64| dnrc_verdict(fs, &fp, alpha).map(StabilityVerdict::is_stable);
    Ok(match result.threshold {
        Threshold::Finite { alpha, .. } => {
            stable(alpha * (1.0 + VERIFY_RTOL))? && !stable(alpha * (1.0 - VERIFY_RTOL))?
        }
        Threshold::Zero { floor } => {
            let open = routh_hurwitz(&char_poly(&open_coupled_matrix(fs))?)?;
            stable(floor)? && !open.is_stable()
        }
        Threshold::NoneFound => !stable(result.search_ceiling)?,
    })
}

/// Region-of-attraction estimate for the dynamical controller around the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RoaEstimate {
    pub alpha: f64,
    pub horizon: f64,
    pub k_s: f64,
    pub k_l: f64,
    /// Certified radius, `0.9 K_S`.
    pub delta: f64,
    pub l1: f64,
    pub l2: f64,
    pub lambda_min_q: f64,
    pub lambda_max_p: f64,
    /// Last diagonal entry of `P`.
    pub p0: f64,
    pub b_bar_norm: f64,
    pub samples: usize,
    pub usable_samples: usize,
    pub seed: u64,
    pub p: Matrix,
}

impl RoaEstimate {
    /// `K_S ≤ α K_L`
    pub fn ks_within_alpha_kl(&self) -> bool {
        self.k_s <= self.alpha * self.k_l + 1e-9
    }

    /// `λ_min(Q) ≤ 2 α P₀`
    pub fn q_bound_holds(&self) -> bool {
        self.lambda_min_q <= 2.0 * self.alpha * self.p0 * (1.0 + 1e-9)
    }

    /// `P₀ ≤ λ_max(P)`
    pub fn p0_bound_holds(&self) -> bool {
        self.p0 <= self.lambda_max_p * (1.0 + 1e-9)
    }
}

/// Central-difference `∂Γ/∂x`.
fn dgamma_dx(plant: &dyn Plant, x: &[f64], u: &[f64]) -> Result<Matrix> {
    let n = x.len();
    let m = plant.input_dim();
    let mut jac = Matrix::zeros(m, n);
    let mut xp = Vector::from_slice(x);
    for j in 0..n {
        let h = FD_STEP * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let gp = plant.gamma_fwd(&xp, u)?;
        xp[j] = x[j] - h;
        let gm = plant.gamma_fwd(&xp, u)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// `λ_max(Mᵀ M)^{1/2}` through the symmetric eigenvalue routine.
fn operator_norm(a: &Matrix) -> Result<f64> {
    let gram = &a.transpose() * a;
    let eig = symmetric_eigenvalues(&gram)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Ratio constants `L1 = max ‖∂Γ/∂x‖ / ‖(x, u)‖` and `L2 = max ‖f‖ / ‖(z, v)‖`
/// over uniform samples of the valid region.
fn sample_lipschitz(
    plant: &dyn Plant,
    sample_budget: usize,
    seed: u64,
) -> Result<(f64, f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut l1, mut l2, mut usable) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..sample_budget {
        let (x, u) = plant.sample_valid(&mut rng);
        let xu = Vector::concat(&x, &u);
        let xu_norm = xu.norm();
        if xu_norm < MIN_SAMPLE_NORM {
            continue;
        }
        let (Ok(z), Ok(v), Ok(jac), Ok(f)) = (
            plant.phi(&x),
            plant.gamma_fwd(&x, &u),
            dgamma_dx(plant, &x, &u),
            plant.dynamics(&x, &u),
        ) else {
            continue;
        };
        let zhat_norm = norm2(&Vector::concat(&z, &v));
        if zhat_norm < MIN_SAMPLE_NORM {
            continue;
        }
        let jn = operator_norm(&jac)?;
        if !jn.is_finite() || !f.is_finite() {
            continue;
        }
        l1 = l1.max(jn / xu_norm);
        l2 = l2.max(f.norm() / zhat_norm);
        usable += 1;
    }
    if usable < MIN_USABLE_SAMPLES {
        return Err(Error::SamplingDegenerate { usable });
    }
    Ok((l1, l2, usable))
}

/// Lyapunov certificate for the dynamical controller on `plant`.
///
/// `P` solves `ĀᵀP + PĀ = −Q` for the coupled flat matrix `Ā`; `K_S` and
/// `K_L` combine its spectral bounds with ratio constants sampled from the
/// plant's valid region using a ChaCha8 stream seeded by `seed`.
pub fn roa_estimate(
    plant: &dyn Plant,
    fp: &FlatPredictor,
    alpha: f64,
    q: &Matrix,
    sample_budget: usize,
    seed: u64,
) -> Result<RoaEstimate> {
    let fs = plant.flat_system();
    let abar = fp.combined_dnrc_matrix(fs, alpha)?;
    if !routh_hurwitz(&char_poly(&abar)?)?.is_stable() {
        return Err(Error::NotHurwitz);
    }
    let p = lyapunov_solve(&abar, q)?;
    let lambda_min_q = symmetric_eigenvalues(q)?[0];
    let lambda_max_p = *symmetric_eigenvalues(&p)?.last().ok_or(Error::DegenerateInput)?;
    let last = p.rows() - 1;
    let p0 = p[(last, last)];

    // B̄ = [0, I]ᵀ has orthonormal columns.
    let b_bar_norm = 1.0;
    let (l1, l2, usable) = sample_lipschitz(plant, sample_budget, seed)?;
    let (k_s, k_l) = if l1 * l2 > 0.0 {
        (
            lambda_min_q / (2.0 * l1 * l2 * lambda_max_p * b_bar_norm),
            1.0 / (l1 * l2 * b_bar_norm),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(RoaEstimate {
        alpha,
        horizon: fp.horizon(),
        k_s,
        k_l,
        delta: 0.9 * k_s,
        l1,
        l2,
        lambda_min_q,
        lambda_max_p,
        p0,
        b_bar_norm,
        samples: sample_budget,
        usable_samples: usable,
        seed,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plants::{IntegratorChain, Pendulum};

    #[test]
    fn double_integrator_snrc_polynomial() {
        let fs = FlatSystem::integrator_chain(2).unwrap();
        let poly = snrc_closed_loop_poly(&fs, 0.5).unwrap().monic();
        let expect = [1.0, 4.0, 8.0];
        for (c, e) in poly.coeffs().iter().zip(expect) {
            assert!((c - e).abs() < 1e-9, "{:?}", poly.coeffs());
        }
        assert_eq!(snrc_hurwitz_check(&fs, 0.5).unwrap(), StabilityVerdict::Stable);
    }

    #[test]
    fn first_order_snrc_is_stable() {
        let fs = FlatSystem::integrator_chain(1).unwrap();
        for t in [0.01, 1.0, 50.0] {
            let poly = snrc_closed_loop_poly(&fs, t).unwrap();
            assert!((poly.monic().coeffs()[1] - 1.0 / t).abs() < 1e-9 / t);
            assert!(snrc_hurwitz_check(&fs, t).unwrap().is_stable());
        }
    }

    #[test]
    fn second_order_threshold_is_one() {
        // s³ + αs² + 2αs + 2α: Hurwitz iff α·2α > 2α, i.e. α > 1
        let res = alpha_threshold_search(2, 1.0, DEFAULT_ALPHA_MAX).unwrap();
        let a = res.value().unwrap();
        assert!((a - 1.0).abs() < 1e-3, "{res:?}");
        let fs = FlatSystem::integrator_chain(2).unwrap();
        assert!(verify_bracket(&fs, &res).unwrap());
    }

    #[test]
    fn first_order_threshold_is_zero() {
        let res = alpha_threshold_search(1, 1.0, DEFAULT_ALPHA_MAX).unwrap();
        assert!(matches!(res.threshold, Threshold::Zero { .. }));
        let fs = FlatSystem::integrator_chain(1).unwrap();
        assert!(verify_bracket(&fs, &res).unwrap());
    }

    #[test]
    fn fifth_order_has_no_threshold() {
        let res = alpha_threshold_search(5, 1.0, DEFAULT_ALPHA_MAX).unwrap();
        assert_eq!(res.threshold, Threshold::NoneFound);
    }

    #[test]
    fn roa_is_invariant_to_scaling_q() {
        let plant = Pendulum::default();
        let fp = FlatPredictor::new(Plant::flat_system(&plant), 0.3).unwrap();
        let q = Matrix::identity(3);
        let a = roa_estimate(&plant, &fp, 100.0, &q, 400, 7).unwrap();
        let b = roa_estimate(&plant, &fp, 100.0, &q.scale(5.0), 400, 7).unwrap();
        assert!((a.k_s - b.k_s).abs() <= 1e-6 * a.k_s);
        assert!(a.ks_within_alpha_kl() && a.q_bound_holds() && a.p0_bound_holds());
        assert!(a.delta < a.k_s);
    }

    #[test]
    fn roa_requires_stable_alpha() {
        let plant = IntegratorChain::new(3).unwrap();
        let fp = FlatPredictor::new(Plant::flat_system(&plant), 1.0).unwrap();
        let err = roa_estimate(&plant, &fp, 0.5, &Matrix::identity(4), 100, 0).unwrap_err();
        assert_eq!(err, Error::NotHurwitz);
    }

    #[test]
    fn roa_is_reproducible_for_a_seed() {
        let plant = Pendulum::default();
        let fp = FlatPredictor::new(Plant::flat_system(&plant), 0.6).unwrap();
        let q = Matrix::identity(3);
        let a = roa_estimate(&plant, &fp, 100.0, &q, 200, 42).unwrap();
        let b = roa_estimate(&plant, &fp, 100.0, &q, 200, 42).unwrap();
        assert_eq!(a, b);
    }
}
