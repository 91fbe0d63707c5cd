//! Full-state-feedback pole assignment for complex-valued linear systems.
//!
//! The design pipeline: realize a conjugation-symmetric target spectrum as a
//! real matrix and its bimatrix, compute a right coprime factorization of the
//! plant, solve the homogeneous generalized Sylvester equation for a free
//! parameter `{Z1, Z2}` until the transforming solution `X` is nonsingular,
//! and read the gain off `K = Y·X^{-1}`. The closed loop is then similar to
//! the target bimatrix, which is what the verification report checks.

use num_complex::Complex64;

use crate::bimatrix::Bimatrix;
use crate::error::BimatError;
use crate::mat::{self, CMat, RMat};
use crate::poly::{self, CoprimeFactorization};
use crate::solve::{self, AntiMode, GSylSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDomain {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    General,
    Normal,
    Antilinear,
}

/// Plant `x⁺ = {A1,A2}x + {B1,B2}u`.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub a: Bimatrix,
    pub b: Bimatrix,
    pub time_domain: TimeDomain,
    pub structure: Structure,
}

impl SystemModel {
    pub fn new(
        a: Bimatrix,
        b: Bimatrix,
        time_domain: TimeDomain,
        structure: Structure,
    ) -> Result<Self, BimatError> {
        if !a.is_square() {
            return Err(BimatError::dim("state bimatrix must be square"));
        }
        if b.nrows() != a.nrows() {
            return Err(BimatError::dim(format!(
                "input bimatrix has {} rows, state dimension is {}",
                b.nrows(),
                a.nrows()
            )));
        }
        match structure {
            Structure::Normal => {
                if mat::frob(a.p2()) != 0.0 || mat::frob(b.p2()) != 0.0 {
                    return Err(BimatError::Precondition(
                        "normal structure requires A2 = 0 and B2 = 0".into(),
                    ));
                }
            }
            Structure::Antilinear => {
                if mat::frob(a.p1()) != 0.0 || mat::frob(b.p1()) != 0.0 {
                    return Err(BimatError::Precondition(
                        "antilinear structure requires A1 = 0 and B1 = 0".into(),
                    ));
                }
            }
            Structure::General => {}
        }
        Ok(SystemModel {
            a,
            b,
            time_domain,
            structure,
        })
    }

    /// Constructor that infers the structure flag from the zero blocks.
    pub fn detect(a: Bimatrix, b: Bimatrix, time_domain: TimeDomain) -> Result<Self, BimatError> {
        let structure = if mat::frob(a.p2()) == 0.0 && mat::frob(b.p2()) == 0.0 {
            Structure::Normal
        } else if mat::frob(a.p1()) == 0.0 && mat::frob(b.p1()) == 0.0 {
            Structure::Antilinear
        } else {
            Structure::General
        };
        SystemModel::new(a, b, time_domain, structure)
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    /// Controllability of the real-representation pair.
    pub fn is_controllable(&self) -> bool {
        let ar = self.a.to_real().m;
        let br = self.b.to_real().m;
        poly::controllability_rank(&ar, &br) == ar.nrows()
    }
}

/// Second-order plant `M·ξ̈ + D·ξ̇ + K·ξ = G·v`.
#[derive(Debug, Clone)]
pub struct SecondOrderModel {
    pub mass: RMat,
    pub damping: RMat,
    pub stiffness: RMat,
    pub input: RMat,
}

impl SecondOrderModel {
    pub fn new(
        mass: RMat,
        damping: RMat,
        stiffness: RMat,
        input: RMat,
    ) -> Result<Self, BimatError> {
        let n = mass.nrows();
        if !mass.is_square() || damping.shape() != (n, n) || stiffness.shape() != (n, n) {
            return Err(BimatError::dim("second-order coefficient shapes"));
        }
        if input.nrows() != n {
            return Err(BimatError::dim(
                "input matrix rows must match state dimension",
            ));
        }
        let cond = mat::cond_r(&mass);
        if !cond.is_finite() || cond > crate::SINGULARITY_COND {
            return Err(BimatError::InvalidInput(format!(
                "mass matrix is singular (condition {cond:.3e})"
            )));
        }
        Ok(SecondOrderModel {
            mass,
            damping,
            stiffness,
            input,
        })
    }

    /// Companion form `[[0, I], [-M⁻¹K, -M⁻¹D]]` with input `[0; M⁻¹G]`.
    pub fn companion(&self) -> Result<(RMat, RMat), BimatError> {
        let n = self.mass.nrows();
        let q = self.input.ncols();
        let mk = mat::solve_r(&self.mass, &self.stiffness, "mass solve")?;
        let md = mat::solve_r(&self.mass, &self.damping, "mass solve")?;
        let mg = mat::solve_r(&self.mass, &self.input, "mass solve")?;
        let mut a = RMat::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).copy_from(&RMat::identity(n, n));
        a.view_mut((n, 0), (n, n)).copy_from(&(-&mk));
        a.view_mut((n, n), (n, n)).copy_from(&(-&md));
        let mut b = RMat::zeros(2 * n, q);
        b.view_mut((n, 0), (n, q)).copy_from(&mg);
        Ok((a, b))
    }
}

/// How second-order inputs map onto complex inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// Split `G = [G1, G2]` and pair `u = v1 + j·v2`; `m = q/2` after padding
    /// `G` with a zero column when `q` is odd.
    Paired,
    /// Keep all `q` columns and feed `u = v + j·w`; `m = q`.
    Padded,
}

/// Fold a second-order plant into a complex-valued first-order system of the
/// same dimension: with `x = ξ + j·ξ̇`,
/// `A1 = -½M⁻¹D - (j/2)(I + M⁻¹K)`, `A2 = ½M⁻¹D - (j/2)(I - M⁻¹K)`,
/// and `B2 = -B1` in both input modes.
pub fn second_order_to_complex(
    m2: &SecondOrderModel,
    input_mode: InputMode,
) -> Result<SystemModel, BimatError> {
    let n = m2.mass.nrows();
    let md = mat::solve_r(&m2.mass, &m2.damping, "mass solve")?;
    let mk = mat::solve_r(&m2.mass, &m2.stiffness, "mass solve")?;
    let mg = mat::solve_r(&m2.mass, &m2.input, "mass solve")?;
    let eye = RMat::identity(n, n);
    let a1 = mat::from_parts(&(-0.5 * &md), &(-0.5 * (&eye + &mk)));
    let a2 = mat::from_parts(&(0.5 * &md), &(-0.5 * (&eye - &mk)));
    let a = Bimatrix::new(a1, a2)?;

    let b1 = match input_mode {
        InputMode::Paired => {
            let mut g = mg.clone();
            if g.ncols() % 2 == 1 {
                g = pad_zero_column(&g);
            }
            let m = g.ncols() / 2;
            let g1 = g.view((0, 0), (n, m)).into_owned();
            let g2 = g.view((0, m), (n, m)).into_owned();
            mat::from_parts(&(0.5 * &g2), &(0.5 * &g1))
        }
        InputMode::Padded => mat::from_parts(&RMat::zeros(n, mg.ncols()), &(0.5 * &mg)),
    };
    let b2 = -&b1;
    let b = Bimatrix::new(b1, b2)?;
    SystemModel::new(a, b, TimeDomain::Continuous, Structure::General)
}

fn pad_zero_column(g: &RMat) -> RMat {
    let (n, q) = g.shape();
    let mut out = RMat::zeros(n, q + 1);
    out.view_mut((0, 0), (n, q)).copy_from(g);
    out
}

// ---------------------------------------------------------------------------
// Target spectra
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMode {
    General,
    /// `F2 = 0`: closed loop similar to a normal linear system.
    Normalize,
    /// `F1 = 0`: closed loop stays an antilinear system (discrete time only).
    AntiPreserve,
}

/// A realized target spectrum: the desired eigenvalue multiset, a real matrix
/// carrying it, and the unique bimatrix with that real representation.
#[derive(Debug, Clone)]
pub struct TargetSpectrum {
    pub gamma_set: Vec<Complex64>,
    pub f_real: RMat,
    pub f_bimatrix: Bimatrix,
    pub mode: SpectrumMode,
}

fn is_real_eig(z: &Complex64) -> bool {
    z.im.abs() <= 1e-10 * (1.0 + z.re.abs())
}

/// Split a conjugation-symmetric multiset into reals and representative
/// (positive-imaginary) pair members. Errors when pairing fails.
fn split_conjugate(gamma: &[Complex64]) -> Result<(Vec<f64>, Vec<Complex64>), BimatError> {
    let mut reals = Vec::new();
    let mut pairs = Vec::new();
    let mut pool: Vec<Complex64> = gamma.to_vec();
    pool.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    while let Some(z) = pool.pop() {
        if is_real_eig(&z) {
            reals.push(z.re);
            continue;
        }
        let mut best: Option<usize> = None;
        let mut best_d = f64::INFINITY;
        for (k, w) in pool.iter().enumerate() {
            let d = (w.conj() - z).norm();
            if d < best_d {
                best_d = d;
                best = Some(k);
            }
        }
        match best {
            Some(k) if best_d <= 1e-8 * (1.0 + z.norm()) => {
                let w = pool.swap_remove(k);
                let re = 0.5 * (z.re + w.re);
                let im = 0.5 * (z.im.abs() + w.im.abs());
                pairs.push(Complex64::new(re, im));
            }
            _ => {
                return Err(BimatError::InvalidInput(format!(
                    "spectrum is not symmetric with respect to the real axis: \
                     no conjugate partner for {z}"
                )))
            }
        }
    }
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pairs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok((reals, pairs))
}

/// Real block-diagonal realization: 1×1 blocks for real eigenvalues, 2×2
/// rotation blocks for conjugate pairs.
fn realize_blocks(reals: &[f64], pairs: &[Complex64], dim: usize) -> RMat {
    let mut f = RMat::zeros(dim, dim);
    let mut k = 0;
    for &r in reals {
        f[(k, k)] = r;
        k += 1;
    }
    for z in pairs {
        f[(k, k)] = z.re;
        f[(k, k + 1)] = z.im;
        f[(k + 1, k)] = -z.im;
        f[(k + 1, k + 1)] = z.re;
        k += 2;
    }
    f
}

/// Build a target spectrum from an eigenvalue multiset.
pub fn build_target(
    gamma: &[Complex64],
    mode: SpectrumMode,
    time_domain: TimeDomain,
) -> Result<TargetSpectrum, BimatError> {
    if !gamma.len().is_multiple_of(2) {
        return Err(BimatError::InvalidInput(
            "target multiset must have even size 2n".into(),
        ));
    }
    let f_real = match mode {
        SpectrumMode::General => {
            let (reals, pairs) = split_conjugate(gamma)?;
            realize_blocks(&reals, &pairs, gamma.len())
        }
        SpectrumMode::Normalize => {
            // F = diag(F0, F0): the multiset must split into two identical
            // conjugation-symmetric halves.
            let half = halve_multiset(gamma)?;
            let (reals, pairs) = split_conjugate(&half)?;
            let f0 = realize_blocks(&reals, &pairs, half.len());
            let n = half.len();
            let mut f = RMat::zeros(2 * n, 2 * n);
            f.view_mut((0, 0), (n, n)).copy_from(&f0);
            f.view_mut((n, n), (n, n)).copy_from(&f0);
            f
        }
        SpectrumMode::AntiPreserve => {
            if time_domain == TimeDomain::Continuous {
                return Err(BimatError::Precondition(
                    "anti-preserving targets need discrete time: a continuous-time \
                     antilinear system cannot be asymptotically stable"
                        .into(),
                ));
            }
            realize_antilinear_target(gamma)?
        }
    };
    target_from_f_real(&f_real, mode, time_domain)
}

/// Build a target spectrum from an explicit real matrix realization.
pub fn target_from_f_real(
    f_real: &RMat,
    mode: SpectrumMode,
    time_domain: TimeDomain,
) -> Result<TargetSpectrum, BimatError> {
    if !f_real.is_square() || !f_real.nrows().is_multiple_of(2) {
        return Err(BimatError::dim(
            "target realization must be square, even-dimensional",
        ));
    }
    let f_bimatrix = Bimatrix::from_real_mat(f_real)?;
    match mode {
        SpectrumMode::Normalize => {
            if mat::frob(f_bimatrix.p2()) != 0.0 {
                return Err(BimatError::Precondition(
                    "normalize mode requires a realization with F2 = 0".into(),
                ));
            }
        }
        SpectrumMode::AntiPreserve => {
            if time_domain == TimeDomain::Continuous {
                return Err(BimatError::Precondition(
                    "anti-preserving targets need discrete time: a continuous-time \
                     antilinear system cannot be asymptotically stable"
                        .into(),
                ));
            }
            if mat::frob(f_bimatrix.p1()) != 0.0 {
                return Err(BimatError::Precondition(
                    "anti-preserving mode requires a realization with F1 = 0".into(),
                ));
            }
            let f2 = f_bimatrix.p2();
            let rho = mat::eigenvalues_c_symmetric(&(f2 * mat::conj(f2)))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if rho >= 1.0 {
                return Err(BimatError::Precondition(format!(
                    "anti-preserving target unstable: ρ(F2·conj F2) = {rho:.6} ≥ 1"
                )));
            }
        }
        SpectrumMode::General => {}
    }
    let gamma_set = mat::eigenvalues_r(f_real);
    Ok(TargetSpectrum {
        gamma_set,
        f_real: f_real.clone(),
        f_bimatrix,
        mode,
    })
}

fn halve_multiset(gamma: &[Complex64]) -> Result<Vec<Complex64>, BimatError> {
    let mut pool: Vec<Complex64> = gamma.to_vec();
    pool.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut half = Vec::with_capacity(gamma.len() / 2);
    while let Some(z) = pool.pop() {
        let mut best: Option<usize> = None;
        let mut best_d = f64::INFINITY;
        for (k, w) in pool.iter().enumerate() {
            let d = (w - z).norm();
            if d < best_d {
                best_d = d;
                best = Some(k);
            }
        }
        match best {
            Some(k) if best_d <= 1e-8 * (1.0 + z.norm()) => {
                pool.swap_remove(k);
                half.push(z);
            }
            _ => {
                return Err(BimatError::InvalidInput(format!(
                    "normalize mode needs every eigenvalue with even multiplicity; \
                     {z} is unpaired"
                )))
            }
        }
    }
    Ok(half)
}

/// Realize a negation- and conjugation-closed multiset as `to_real({0, F2})`
/// with a real block-diagonal `F2`.
fn realize_antilinear_target(gamma: &[Complex64]) -> Result<RMat, BimatError> {
    let mut pool: Vec<Complex64> = gamma.to_vec();
    pool.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut blocks: Vec<RMat> = Vec::new();
    let take = |pool: &mut Vec<Complex64>, target: Complex64| -> bool {
        let mut best: Option<usize> = None;
        let mut best_d = f64::INFINITY;
        for (k, w) in pool.iter().enumerate() {
            let d = (w - target).norm();
            if d < best_d {
                best_d = d;
                best = Some(k);
            }
        }
        match best {
            Some(k) if best_d <= 1e-8 * (1.0 + target.norm()) => {
                pool.swap_remove(k);
                true
            }
            _ => false,
        }
    };
    while let Some(z) = pool.pop() {
        if is_real_eig(&z) {
            if !take(&mut pool, -z) {
                return Err(BimatError::InvalidInput(format!(
                    "anti-preserving target must be closed under negation; -({}) missing",
                    z.re
                )));
            }
            blocks.push(RMat::from_element(1, 1, z.re));
        } else if z.re.abs() > 1e-10 * (1.0 + z.norm()) {
            // complex quadruple {±z, ±conj(z)}
            if !(take(&mut pool, z.conj()) && take(&mut pool, -z) && take(&mut pool, -z.conj())) {
                return Err(BimatError::InvalidInput(format!(
                    "anti-preserving target needs the full quadruple ±{z}, ±conj"
                )));
            }
            let (a, b) = (z.re, z.im.abs());
            blocks.push(RMat::from_row_slice(2, 2, &[a, b, -b, a]));
        } else {
            // purely imaginary: needs doubled pairs
            if !(take(&mut pool, z.conj()) && take(&mut pool, z) && take(&mut pool, z.conj())) {
                return Err(BimatError::InvalidInput(format!(
                    "purely imaginary anti-preserving eigenvalues need multiplicity 2: {z}"
                )));
            }
            let b = z.im.abs();
            blocks.push(RMat::from_row_slice(2, 2, &[0.0, b, -b, 0.0]));
        }
    }
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut f2 = RMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        f2.view_mut((off, off), b.shape()).copy_from(&b);
        off += b.nrows();
    }
    Ok(Bimatrix::from_antilinear(mat::to_complex(&f2)).to_real().m)
}

// ---------------------------------------------------------------------------
// Assignment pipeline
// ---------------------------------------------------------------------------

/// Verification record attached to every produced design.
#[derive(Debug, Clone)]
pub struct DesignReport {
    pub closed_spectrum: Vec<Complex64>,
    pub spectrum_defect: f64,
    pub similarity_residual: f64,
    pub gsyl_residual: f64,
    pub x_condition: f64,
    pub retries: usize,
}

/// A state-feedback design: gain bimatrix, transforming solution, and its
/// physically realizable real gain.
#[derive(Debug, Clone)]
pub struct FeedbackDesign {
    pub k: Bimatrix,
    pub x: Bimatrix,
    pub real_gain: RMat,
    pub report: DesignReport,
}

/// Free-parameter policy for the assignment search.
#[derive(Debug, Clone)]
pub enum ZChoice {
    /// Draw `{Z1, Z2}` with standard normal real/imaginary entries, retrying
    /// until the transforming solution is acceptably conditioned.
    Seed(u64),
    /// Use the given pair, failing if `X` turns out singular.
    Explicit(CMat, CMat),
}

const MAX_Z_DRAWS: usize = 32;
const X_COND_LIMIT: f64 = 1e10;

/// Closed-loop bimatrix `{A} + {B}{K}`.
pub fn closed_loop(sys: &SystemModel, k: &Bimatrix) -> Result<Bimatrix, BimatError> {
    sys.a.add(&sys.b.multiply(k)?)
}

/// A gain bimatrix realized as the real feedback matrix acting on stacked
/// position/velocity (or real/imaginary) coordinates.
pub fn realize_feedback(k: &Bimatrix) -> RMat {
    k.to_real().m
}

/// Pole assignment with an internally computed coprime factorization.
pub fn assign_poles(
    sys: &SystemModel,
    target: &TargetSpectrum,
    z: ZChoice,
) -> Result<FeedbackDesign, BimatError> {
    let coprime = poly::coprime_factorization(sys)?;
    assign_with_factorization(sys, target, &coprime, z)
}

/// Pole assignment with a caller-supplied certified factorization.
pub fn assign_with_factorization(
    sys: &SystemModel,
    target: &TargetSpectrum,
    coprime: &CoprimeFactorization,
    z: ZChoice,
) -> Result<FeedbackDesign, BimatError> {
    if !sys.is_controllable() {
        let ar = sys.a.to_real().m;
        let br = sys.b.to_real().m;
        return Err(BimatError::Uncontrollable {
            rank: poly::controllability_rank(&ar, &br),
            expected: ar.nrows(),
        });
    }
    let n = sys.state_dim();
    if target.f_bimatrix.nrows() != n {
        return Err(BimatError::dim(format!(
            "target dimension {} does not match state dimension {n}",
            target.f_bimatrix.nrows()
        )));
    }
    let m = sys.input_dim();

    let solve_for = |z1: &CMat, z2: &CMat| -> Result<GSylSolution, BimatError> {
        match (sys.structure, target.mode) {
            (Structure::Antilinear, SpectrumMode::Normalize) => {
                let mode = AntiMode::Normalize {
                    f1: target.f_bimatrix.p1().clone(),
                };
                solve::solve_antilinear(sys, &mode, coprime, z1, z2)
            }
            (Structure::Antilinear, SpectrumMode::AntiPreserve) => {
                let mode = AntiMode::AntiPreserve {
                    f2: target.f_bimatrix.p2().clone(),
                };
                solve::solve_antilinear(sys, &mode, coprime, z1, z2)
            }
            _ => solve::solve_gsyl(sys, &target.f_bimatrix, coprime, z1, z2),
        }
    };

    let mut best_cond = f64::INFINITY;
    let attempt_limit;
    let mut draws: Box<dyn FnMut(usize) -> (CMat, CMat)> = match z {
        ZChoice::Explicit(z1, z2) => {
            attempt_limit = 1;
            Box::new(move |_| (z1.clone(), z2.clone()))
        }
        ZChoice::Seed(seed) => {
            attempt_limit = MAX_Z_DRAWS;
            let mut rng = mat::randomize_tests_rng(seed);
            Box::new(move |_| (mat::random_c(&mut rng, m, n), mat::random_c(&mut rng, m, n)))
        }
    };

    // Every returned design is verified: nonsingular transform, small design
    // equation residual, closed-loop spectrum and similarity both within the
    // eigenvalue tolerance. Draws failing any check are retried.
    for attempt in 0..attempt_limit {
        let (z1, z2) = draws(attempt);
        let sol = solve_for(&z1, &z2)?;
        let xr = sol.x.to_real().m;
        let cond = mat::cond_r(&xr);
        best_cond = best_cond.min(cond);
        if !cond.is_finite() || cond > X_COND_LIMIT {
            continue;
        }
        if sol.residual > crate::EIGEN_TOL {
            continue;
        }
        let k = sol.y.multiply(&sol.x.inverse()?)?;
        let closed = closed_loop(sys, &k)?;
        let closed_spec = closed.spectrum()?.eigenvalues;
        let scale = mat::frob_r(&closed.to_real().m);
        let (spectrum_ok, spectrum_defect) = mat::spectra_match_clustered(
            &closed_spec,
            &target.gamma_set,
            crate::EIGEN_TOL,
            crate::EIGEN_TOL,
            scale,
        );
        // similarity check X^{-1}(A+BK)X = {F}
        let xinv = sol.x.inverse()?;
        let sim = xinv.multiply(&closed)?.multiply(&sol.x)?;
        let fscale = target.f_bimatrix.norm().max(1.0);
        let similarity_residual = sim.sub(&target.f_bimatrix)?.norm() / fscale;
        if !spectrum_ok || similarity_residual > crate::EIGEN_TOL {
            continue;
        }
        let report = DesignReport {
            closed_spectrum: closed_spec,
            spectrum_defect,
            similarity_residual,
            gsyl_residual: sol.residual,
            x_condition: cond,
            retries: attempt,
        };
        return Ok(FeedbackDesign {
            real_gain: realize_feedback(&k),
            k,
            x: sol.x,
            report,
        });
    }
    Err(BimatError::SearchExhausted {
        attempts: attempt_limit,
        best_cond,
    })
}

// ---------------------------------------------------------------------------
// Spacecraft rendezvous demo model
// ---------------------------------------------------------------------------

/// Clohessy–Wiltshire relative-motion plant and the closed-form reference
/// design used as a regression target for the pipeline.
pub mod rendezvous {
    use super::*;
    use crate::poly::{FactorVariant, PolyBimatrix};

    /// C-W second-order model: unit masses, `2ω` velocity coupling, `3ω²`
    /// and `-ω²` stiffness terms. By default only the along-track and
    /// cross-track accelerations actuate (`q = 2`); `include_radial` adds the
    /// radial thruster and pads the input to `q = 4`.
    pub fn model(omega: f64, include_radial: bool) -> Result<SecondOrderModel, BimatError> {
        if omega <= 0.0 {
            return Err(BimatError::InvalidInput(format!(
                "orbit rate must be positive, got {omega}"
            )));
        }
        let mass = RMat::identity(3, 3);
        let damping = RMat::from_row_slice(
            3,
            3,
            &[0.0, -2.0 * omega, 0.0, 2.0 * omega, 0.0, 0.0, 0.0, 0.0, 0.0],
        );
        let stiffness = RMat::from_row_slice(
            3,
            3,
            &[
                -3.0 * omega * omega,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                0.0,
                omega * omega,
            ],
        );
        let input = if include_radial {
            // all three thrusters, padded to an even input count
            RMat::from_row_slice(
                3,
                4,
                &[
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 1.0, 0.0, 0.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            )
        } else {
            RMat::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0])
        };
        SecondOrderModel::new(mass, damping, stiffness, input)
    }

    /// The C-W plant folded into a 3-state complex-valued system (`m = 1`).
    pub fn system(omega: f64) -> Result<SystemModel, BimatError> {
        second_order_to_complex(&model(omega, false)?, InputMode::Paired)
    }

    /// Shifted-spectrum target `{-γ, -γ, -γ±ωj, -γ±ωj}` realized with the
    /// same block layout as the reference design (a Jordan block for the
    /// double real eigenvalue and two rotation blocks).
    pub fn reference_target(omega: f64, gamma: f64) -> Result<TargetSpectrum, BimatError> {
        let mut f = RMat::zeros(6, 6);
        f[(0, 1)] = 1.0;
        f[(2, 3)] = omega;
        f[(3, 2)] = -omega;
        f[(4, 5)] = omega;
        f[(5, 4)] = -omega;
        for i in 0..6 {
            f[(i, i)] -= gamma;
        }
        target_from_f_real(&f, SpectrumMode::General, TimeDomain::Continuous)
    }

    /// Closed-form coprime factorization of the C-W complex system:
    /// degree-3 numerator, degree-4 denominator.
    pub fn reference_factorization(omega: f64) -> Result<CoprimeFactorization, BimatError> {
        let w = omega;
        let j = Complex64::new(0.0, 1.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        let zero = Complex64::new(0.0, 0.0);

        // N1 rows: [ω·s(1 + j·s); -(1 + j·s)(3ω² - s²)/2; s/2 - j/2]
        let mut n1 = vec![CMat::zeros(3, 1); 4];
        n1[1][(0, 0)] = re(w);
        n1[2][(0, 0)] = j * w;
        n1[0][(1, 0)] = re(-1.5 * w * w);
        n1[1][(1, 0)] = -j * 1.5 * w * w;
        n1[2][(1, 0)] = re(0.5);
        n1[3][(1, 0)] = j * 0.5;
        n1[0][(2, 0)] = -j * 0.5;
        n1[1][(2, 0)] = re(0.5);

        // N2 rows: [-ω·s(-1 + j·s); j(3ω² - s²)(s + j)/2; -s/2 - j/2]
        let mut n2 = vec![CMat::zeros(3, 1); 4];
        n2[1][(0, 0)] = re(w);
        n2[2][(0, 0)] = -j * w;
        n2[0][(1, 0)] = re(-1.5 * w * w);
        n2[1][(1, 0)] = j * 1.5 * w * w;
        n2[2][(1, 0)] = re(0.5);
        n2[3][(1, 0)] = -j * 0.5;
        n2[0][(2, 0)] = -j * 0.5;
        n2[1][(2, 0)] = re(-0.5);

        // D1 = (s²+1)(ω²+s²)/2, D2 = (s²-1)(ω²+s²)/2
        let mut d1 = vec![CMat::zeros(1, 1); 5];
        d1[0][(0, 0)] = re(0.5 * w * w);
        d1[2][(0, 0)] = re(0.5 * (1.0 + w * w));
        d1[4][(0, 0)] = re(0.5);
        let mut d2 = vec![CMat::zeros(1, 1); 5];
        d2[0][(0, 0)] = re(-0.5 * w * w);
        d2[2][(0, 0)] = re(0.5 * (w * w - 1.0));
        d2[4][(0, 0)] = re(0.5);
        let _ = zero;

        let n = PolyBimatrix::new(
            (0..4)
                .map(|i| Bimatrix::new(n1[i].clone(), n2[i].clone()))
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        let d = PolyBimatrix::new(
            (0..5)
                .map(|i| Bimatrix::new(d1[i].clone(), d2[i].clone()))
                .collect::<Result<Vec<_>, _>>()?,
        )?;

        let sys = system(omega)?;
        let residual = poly::factorization_residual(&sys.a, &sys.b, &n, &d);
        let stacked = n.vstack_with(&d);
        let report = poly::certify_stacked(&stacked, residual, false);
        let certified = report.pass && residual < 1e-9;
        if !certified {
            return Err(BimatError::NotCoprime {
                failures: report.failures,
            });
        }
        Ok(CoprimeFactorization {
            n,
            d,
            variant: FactorVariant::General,
            certified,
            report,
            anti_pair: None,
        })
    }

    /// The reference free parameters `Z1 = [1+j, 0, 0]`, `Z2 = [0, 0, 1]`.
    pub fn reference_parameters() -> (CMat, CMat) {
        let mut z1 = CMat::zeros(1, 3);
        z1[(0, 0)] = Complex64::new(1.0, 1.0);
        let mut z2 = CMat::zeros(1, 3);
        z2[(0, 2)] = Complex64::new(1.0, 0.0);
        (z1, z2)
    }

    /// Closed-form reference gain for the parameters above.
    pub fn reference_gain(omega: f64, gamma: f64) -> Bimatrix {
        let w = omega;
        let g = gamma;
        let j = Complex64::new(0.0, 1.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        let k11 =
            j * g.powi(4) - re(12.0 * g.powi(3) * w * w) + j * 19.0 * g * g * w * w + re(g * g)
                - re(42.0 * g * w.powi(4))
                + j * 6.0 * g * w * w
                + re(4.0 * w * w);
        let k21 = -j * g.powi(4) + re(12.0 * g.powi(3) * w * w) - j * 19.0 * g * g * w * w
            + re(g * g)
            + re(42.0 * g * w.powi(4))
            + j * 6.0 * g * w * w
            + re(4.0 * w * w);
        let k12 = re(g.powi(4) + g * g * w * w) - j * g * g + j * 12.0 * g * w * w - j * w * w;
        let k22 = re(g.powi(4) + g * g * w * w) + j * g * g + j * 12.0 * g * w * w + j * w * w;
        let tail = Complex64::new(2.0, g) * (0.5 * g);
        let mut k1 = CMat::zeros(1, 3);
        k1[(0, 0)] = k11 / (12.0 * w.powi(3));
        k1[(0, 1)] = k12 / (6.0 * w * w);
        k1[(0, 2)] = -tail;
        let mut k2 = CMat::zeros(1, 3);
        k2[(0, 0)] = -k21 / (12.0 * w.powi(3));
        k2[(0, 1)] = k22 / (6.0 * w * w);
        k2[(0, 2)] = tail;
        Bimatrix::new(k1, k2).expect("1×3 components")
    }

    /// Outcome of the full demo run.
    #[derive(Debug, Clone)]
    pub struct DemoReport {
        pub omega: f64,
        pub gamma: f64,
        pub open_spectrum: Vec<Complex64>,
        pub open_expected: Vec<Complex64>,
        pub open_defect: f64,
        pub design: FeedbackDesign,
        pub gain_reference: Bimatrix,
        pub gain_rel_error: f64,
        pub pipeline_design: FeedbackDesign,
        pub pipeline_defect: f64,
    }

    /// Run the full rendezvous design: reproduce the closed-form reference
    /// gain with the reference factorization and parameters, then run the
    /// self-contained pipeline (computed factorization, drawn parameters)
    /// against the same target.
    pub fn demo(omega: f64, gamma: f64, seed: u64) -> Result<DemoReport, BimatError> {
        let sys = system(omega)?;
        let open = sys.a.spectrum()?;
        let mut open_expected = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        for sgn in [1.0, -1.0] {
            open_expected.push(Complex64::new(0.0, sgn * omega));
            open_expected.push(Complex64::new(0.0, sgn * omega));
        }
        let (_, open_defect) = mat::spectra_match_clustered(
            &open.eigenvalues,
            &open_expected,
            crate::EIGEN_TOL,
            crate::EIGEN_TOL,
            mat::frob_r(&sys.a.to_real().m),
        );

        let target = reference_target(omega, gamma)?;
        let coprime = reference_factorization(omega)?;
        let (z1, z2) = reference_parameters();
        let design = assign_with_factorization(&sys, &target, &coprime, ZChoice::Explicit(z1, z2))?;
        let reference = reference_gain(omega, gamma);
        let gain_rel_error = max_componentwise_rel_error(&design.k, &reference);

        let pipeline_design = assign_poles(&sys, &target, ZChoice::Seed(seed))?;
        let pipeline_defect = pipeline_design.report.spectrum_defect;

        Ok(DemoReport {
            omega,
            gamma,
            open_spectrum: open.eigenvalues,
            open_expected,
            open_defect,
            design,
            gain_reference: reference,
            gain_rel_error,
            pipeline_design,
            pipeline_defect,
        })
    }

    /// Largest componentwise relative error between two bimatrices.
    pub fn max_componentwise_rel_error(a: &Bimatrix, b: &Bimatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, y) in a.p1().iter().zip(b.p1().iter()) {
            worst = worst.max((x - y).norm() / y.norm().max(1e-30));
        }
        for (x, y) in a.p2().iter().zip(b.p2().iter()) {
            worst = worst.max((x - y).norm() / y.norm().max(1e-30));
        }
        worst
    }
}


#[cfg(test)]
mod golden_tests {
    use super::*;
    use crate::mat::randomize_tests_rng;
    use crate::poly;
    use rand::Rng as _;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rendezvous_system_matrices_closed_form() {
        let w = 1.3f64;
        let sys = rendezvous::system(w).unwrap();
        let a1 = sys.a.p1();
        let a2 = sys.a.p2();
        let b1 = sys.b.p1();
        let b2 = sys.b.p2();
        // A1 = [[(3ω²-1)j/2, ω, 0], [-ω, -j/2, 0], [0, 0, -(ω²+1)j/2]]
        assert!((a1[(0, 0)] - c(0.0, 0.5 * (3.0 * w * w - 1.0))).norm() < 1e-14);
        assert!((a1[(0, 1)] - c(w, 0.0)).norm() < 1e-14);
        assert!((a1[(1, 0)] - c(-w, 0.0)).norm() < 1e-14);
        assert!((a1[(1, 1)] - c(0.0, -0.5)).norm() < 1e-14);
        assert!((a1[(2, 2)] - c(0.0, -0.5 * (w * w + 1.0))).norm() < 1e-14);
        // A2 = [[-(3ω²+1)j/2, -ω, 0], [ω, -j/2, 0], [0, 0, (ω²-1)j/2]]
        assert!((a2[(0, 0)] - c(0.0, -0.5 * (3.0 * w * w + 1.0))).norm() < 1e-14);
        assert!((a2[(0, 1)] - c(-w, 0.0)).norm() < 1e-14);
        assert!((a2[(1, 0)] - c(w, 0.0)).norm() < 1e-14);
        assert!((a2[(2, 2)] - c(0.0, 0.5 * (w * w - 1.0))).norm() < 1e-14);
        // B1 = [0; j/2; 1/2], B2 = -B1
        assert!((b1[(1, 0)] - c(0.0, 0.5)).norm() < 1e-14);
        assert!((b1[(2, 0)] - c(0.5, 0.0)).norm() < 1e-14);
        assert!(b1[(0, 0)].norm() < 1e-14);
        assert!(mat::frob(&(b1 + b2)) < 1e-14);
    }

    #[test]
    fn computed_factorization_spans_reference() {
        // Both factorizations generate the same solution module: stacking
        // them pointwise cannot raise the rank beyond one factorization's
        // column count.
        let omega = 1.0;
        let sys = rendezvous::system(omega).unwrap();
        let mine = poly::coprime_factorization(&sys).unwrap();
        let reference = rendezvous::reference_factorization(omega).unwrap();
        let mine_stack = mine.n.vstack_with(&mine.d);
        let ref_stack = reference.n.vstack_with(&reference.d);
        let mut rng = randomize_tests_rng(61);
        for _ in 0..20 {
            let s = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lm = mine_stack.eval_lifting(s);
            let lr = ref_stack.eval_lifting(s);
            let mut joined = CMat::zeros(lm.nrows(), lm.ncols() + lr.ncols());
            joined.view_mut((0, 0), lm.shape()).copy_from(&lm);
            joined.view_mut((0, lm.ncols()), lr.shape()).copy_from(&lr);
            let rank = mat::rank_c(&joined, 1e-8);
            assert_eq!(rank, 2, "joined rank {rank} at {s}");
        }
    }

    #[test]
    fn normal_chain_keeps_gain_exactly_normal() {
        // normal plant, F2 = 0 target, Z2 = 0: the whole chain stays in the
        // {·, 0} subalgebra, so K2 is exactly zero
        let mut rng = randomize_tests_rng(67);
        let a = Bimatrix::from_linear(mat::random_c(&mut rng, 3, 3));
        let b = Bimatrix::from_linear(mat::random_c(&mut rng, 3, 1));
        let sys = SystemModel::new(a, b, TimeDomain::Continuous, Structure::Normal).unwrap();
        assert!(sys.is_controllable());
        let cf = poly::coprime_factorization(&sys).unwrap();
        let gamma = vec![
            c(-1.0, 0.0),
            c(-1.0, 0.0),
            c(-2.0, 1.0),
            c(-2.0, -1.0),
            c(-2.0, 1.0),
            c(-2.0, -1.0),
        ];
        let target = build_target(&gamma, SpectrumMode::Normalize, TimeDomain::Continuous).unwrap();
        assert_eq!(mat::frob(target.f_bimatrix.p2()), 0.0);
        let z1 = mat::random_c(&mut rng, 1, 3);
        let design =
            assign_with_factorization(&sys, &target, &cf, ZChoice::Explicit(z1, CMat::zeros(1, 3)))
                .unwrap();
        assert_eq!(
            mat::frob(design.k.p2()),
            0.0,
            "gain must be exactly normal state feedback"
        );
        assert!(design.report.spectrum_defect < 1e-8);
        // nonzero Z2 gives genuine full state feedback
        let z1b = mat::random_c(&mut rng, 1, 3);
        let z2b = mat::random_c(&mut rng, 1, 3);
        let design2 =
            assign_with_factorization(&sys, &target, &cf, ZChoice::Explicit(z1b, z2b)).unwrap();
        // with a real F1, conjugation symmetry forces K2 = 0 for any Z2
        assert!(mat::frob(design2.k.p2()) < 1e-10);
        assert!(design2.report.spectrum_defect < 1e-8);

        // a complex F1 (still F2 = 0) with Z2 != 0 yields genuine full
        // state feedback
        let f1c = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(-1.0, 0.5),
            c(-2.0, -0.3),
            c(-1.5, 0.1),
        ]));
        let f_real = Bimatrix::from_linear(f1c).to_real().m;
        let target_c =
            target_from_f_real(&f_real, SpectrumMode::Normalize, TimeDomain::Continuous).unwrap();
        let z1c = mat::random_c(&mut rng, 1, 3);
        let z2c = mat::random_c(&mut rng, 1, 3);
        let design3 =
            assign_with_factorization(&sys, &target_c, &cf, ZChoice::Explicit(z1c, z2c)).unwrap();
        assert!(
            mat::frob(design3.k.p2()) > 1e-6,
            "complex F1 with Z2 != 0 must produce full state feedback"
        );
        assert!(design3.report.spectrum_defect < 1e-8);
    }
}
