//! Dense-matrix helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::BimatError;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Entrywise conjugate.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Conjugate transpose.
pub fn herm(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn re(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn from_parts(re: &RMat, im: &RMat) -> CMat {
    assert_eq!(re.shape(), im.shape());
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    })
}

/// Real embedding of the complex-linear map `x ↦ m·x`:
/// `[[Re m, -Im m], [Im m, Re m]]`.
pub fn embed_complex(m: &CMat) -> RMat {
    let (n, c) = m.shape();
    let mut out = RMat::zeros(2 * n, 2 * c);
    out.view_mut((0, 0), (n, c)).copy_from(&re(m));
    out.view_mut((0, c), (n, c)).copy_from(&(-im(m)));
    out.view_mut((n, 0), (n, c)).copy_from(&im(m));
    out.view_mut((n, c), (n, c)).copy_from(&re(m));
    out
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frob_r(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// All entries finite.
pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn all_finite_r(m: &RMat) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// Numerical rank from singular values with a relative threshold.
pub fn rank_r(m: &RMat, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    sv.iter()
        .filter(|&&s| s > rel_tol * smax.max(1e-300))
        .count()
}

pub fn rank_c(m: &CMat, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    sv.iter()
        .filter(|&&s| s > rel_tol * smax.max(1e-300))
        .count()
}

/// 2-norm condition number estimate via SVD.
pub fn cond_r(m: &RMat) -> f64 {
    let sv = m.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solve `m · x = rhs` by LU, reporting the condition estimate on failure.
pub fn solve_r(m: &RMat, rhs: &RMat, context: &'static str) -> Result<RMat, BimatError> {
    let lu = m.clone().lu();
    match lu.solve(rhs) {
        Some(x) => Ok(x),
        None => Err(BimatError::Singular {
            context,
            cond: cond_r(m),
        }),
    }
}

/// Eigenvalues of a real square matrix (complex in general).
///
/// Runs the QR iteration with a bounded sweep count (the unbounded variant
/// can spin forever on matrices with tightly clustered eigenvalues, which
/// real representations produce routinely). Non-convergent cases are retried
/// under an exact diagonal rescaling combined with a real spectral shift;
/// both transformations are reversed exactly apart from one rounding in the
/// shift. Returns NaNs only if every attempt fails, which callers surface as
/// a numeric error.
pub fn eigenvalues_r(m: &RMat) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let max_sweeps = 40 * n.max(16);
    let scale = frob_r(m).max(1e-300);
    let shift_factors = [0.0, 0.2731, -0.5287, 0.7118, -0.3817, 0.6143];
    for (attempt, &factor) in shift_factors.iter().enumerate() {
        let sigma = factor * scale;
        let mut work = m.clone();
        for i in 0..n {
            work[(i, i)] -= sigma;
        }
        if attempt > 0 {
            // exact power-of-two equilibration, deterministic per attempt
            let mut rng = randomize_tests_rng(0xe16 + attempt as u64);
            let d: Vec<f64> = (0..n).map(|_| 2f64.powi(rng.random_range(-2..3))).collect();
            for i in 0..n {
                for j in 0..n {
                    work[(i, j)] = work[(i, j)] * d[j] / d[i];
                }
            }
        }
        if let Some(schur) = work.try_schur(f64::EPSILON, max_sweeps) {
            let eigs = schur.complex_eigenvalues();
            if eigs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return eigs
                    .iter()
                    .map(|z| z + Complex64::new(sigma, 0.0))
                    .collect();
            }
        }
    }
    vec![Complex64::new(f64::NAN, f64::NAN); n]
}

/// Eigenvalues of a complex square matrix whose spectrum is closed under
/// conjugation (complex liftings, products of the form conj(M)·M, ...).
///
/// The real embedding has spectrum λ(m) ∪ conj(λ(m)); for a conjugation
/// symmetric λ(m) that is λ(m) with every multiplicity doubled, so pairing
/// nearest duplicates and averaging recovers λ(m) without a complex QR
/// iteration. The duplicates are semisimple whenever the underlying
/// eigenvalue is simple, so the split between paired copies stays at
/// rounding level.
pub fn eigenvalues_c_symmetric(m: &CMat) -> Vec<Complex64> {
    let p = m.nrows();
    let mut pool = eigenvalues_r(&embed_complex(m));
    let mut out = Vec::with_capacity(p);
    while out.len() < p && !pool.is_empty() {
        let lam = pool.swap_remove(0);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, mu) in pool.iter().enumerate() {
            let d = (mu - lam).norm();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        let twin = if pool.is_empty() {
            lam
        } else {
            pool.swap_remove(best)
        };
        out.push((lam + twin) * 0.5);
    }
    out
}

/// Greedy minimal-distance matching between two eigenvalue multisets.
/// Returns the largest matched distance, or `None` if sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for lam in a {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, mu) in pool.iter().enumerate() {
            let d = (mu - lam).norm();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        pool.swap_remove(best);
        worst = worst.max(best_d);
    }
    Some(worst)
}

/// Multiset comparison aware of repeated eigenvalues.
///
/// A k-fold defective eigenvalue computed by a backward-stable solver splits
/// by O(ε^(1/k)), while the cluster mean stays O(ε)-accurate. So expected
/// values are grouped into clusters, the k nearest computed eigenvalues are
/// assigned to each, the cluster *mean* must hit the expected value within
/// `tol_abs + tol_rel·|λ|`, and the intra-cluster spread may not exceed the
/// defectiveness allowance `20·(ε·scale)^(1/k)·(1+|λ|)`.
///
/// Returns `(matched, worst mean defect)`.
pub fn spectra_match_clustered(
    computed: &[Complex64],
    expected: &[Complex64],
    tol_abs: f64,
    tol_rel: f64,
    scale: f64,
) -> (bool, f64) {
    if computed.len() != expected.len() {
        return (false, f64::INFINITY);
    }
    // group expected values into clusters
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &lam in expected {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - lam).norm() <= 1e-8 * (1.0 + lam.norm()))
        {
            Some((_, k)) => *k += 1,
            None => clusters.push((lam, 1)),
        }
    }
    let eps_scale = f64::EPSILON * scale.max(1.0);
    let mut pool: Vec<Complex64> = computed.to_vec();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (lam, k) in clusters {
        let mut members = Vec::with_capacity(k);
        for _ in 0..k {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, mu) in pool.iter().enumerate() {
                let d = (mu - lam).norm();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            members.push(pool.swap_remove(best));
        }
        let mean = members.iter().sum::<Complex64>() / k as f64;
        let mean_defect = (mean - lam).norm();
        worst = worst.max(mean_defect);
        if mean_defect > tol_abs + tol_rel * lam.norm() {
            ok = false;
        }
        let allowance = 20.0 * eps_scale.powf(1.0 / k as f64) * (1.0 + lam.norm());
        for m in &members {
            if (m - mean).norm() > allowance.max(tol_abs) {
                ok = false;
            }
        }
    }
    (ok, worst)
}

/// Multisets match under `tol_abs + tol_rel·|λ|`.
pub fn multisets_match(a: &[Complex64], b: &[Complex64], tol_abs: f64, tol_rel: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    for lam in a {
        let mut best: Option<usize> = None;
        let mut best_d = f64::INFINITY;
        for (k, mu) in pool.iter().enumerate() {
            let d = (mu - lam).norm();
            if d < best_d {
                best_d = d;
                best = Some(k);
            }
        }
        match best {
            Some(k) if best_d <= tol_abs + tol_rel * lam.norm() => {
                pool.swap_remove(k);
            }
            _ => return false,
        }
    }
    true
}

/// Deterministic RNG for seeded randomized tests and draws.
pub fn randomize_tests_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random real matrix with standard normal entries.
pub fn random_r<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random complex matrix with independent standard normal real/imag parts.
pub fn random_c<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}
