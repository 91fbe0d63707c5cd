//! Bimatrix value types and dense algebra.
//!
//! A bimatrix `{P1, P2}` acts on `x ∈ C^m` as `P1·x + conj(P2)·conj(x)`.
//! Every analytic notion here (spectrum, inverse, exponential, positive
//! definiteness) is defined through the real representation, the 2n×2m real
//! matrix realizing the action on stacked real/imaginary parts. The real
//! representation is a multiplicative homomorphism, which makes those
//! definitions the unique consistent choice and keeps each one independently
//! testable.

use num_complex::Complex64;

use crate::error::BimatError;
use crate::mat::{self, CMat, CVec, RMat};

/// Ordered pair of equally shaped complex matrices `{p1, p2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bimatrix {
    p1: CMat,
    p2: CMat,
}

/// Real representation of a bimatrix: a 2n×2m real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRep {
    pub m: RMat,
    pub n_rows: usize,
    pub m_cols: usize,
}

/// Eigenvalue data of a square bimatrix: the 2n eigenvalues of its real
/// representation together with the spectral radius and abscissa.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub rho: f64,
    pub mu: f64,
}

impl Spectrum {
    fn from_eigenvalues(eigenvalues: Vec<Complex64>) -> Self {
        let rho = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mu = eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        Spectrum {
            eigenvalues,
            rho,
            mu,
        }
    }

    /// Largest distance between the multiset and its conjugate mirror.
    /// Eigenvalues of a real matrix are conjugation-closed, so this is a
    /// numerical sanity figure.
    pub fn conjugation_defect(&self) -> f64 {
        let conj: Vec<Complex64> = self.eigenvalues.iter().map(|z| z.conj()).collect();
        mat::multiset_distance(&self.eigenvalues, &conj).unwrap_or(f64::INFINITY)
    }
}

impl Bimatrix {
    pub fn new(p1: CMat, p2: CMat) -> Result<Self, BimatError> {
        if p1.shape() != p2.shape() {
            return Err(BimatError::dim(format!(
                "bimatrix components differ: {:?} vs {:?}",
                p1.shape(),
                p2.shape()
            )));
        }
        if !mat::all_finite(&p1) || !mat::all_finite(&p2) {
            return Err(BimatError::InvalidInput(
                "bimatrix entries must be finite".into(),
            ));
        }
        Ok(Bimatrix { p1, p2 })
    }

    pub fn identity(n: usize) -> Self {
        Bimatrix {
            p1: CMat::identity(n, n),
            p2: CMat::zeros(n, n),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Bimatrix {
            p1: CMat::zeros(rows, cols),
            p2: CMat::zeros(rows, cols),
        }
    }

    /// `{m, 0}` — a plain complex matrix viewed as a bimatrix.
    pub fn from_linear(m: CMat) -> Self {
        let z = CMat::zeros(m.nrows(), m.ncols());
        Bimatrix { p1: m, p2: z }
    }

    /// `{0, m}` — a purely antilinear bimatrix.
    pub fn from_antilinear(m: CMat) -> Self {
        let z = CMat::zeros(m.nrows(), m.ncols());
        Bimatrix { p1: z, p2: m }
    }

    pub fn p1(&self) -> &CMat {
        &self.p1
    }

    pub fn p2(&self) -> &CMat {
        &self.p2
    }

    pub fn shape(&self) -> (usize, usize) {
        self.p1.shape()
    }

    pub fn nrows(&self) -> usize {
        self.p1.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.p1.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.p1.is_square()
    }

    pub fn norm(&self) -> f64 {
        (mat::frob(&self.p1).powi(2) + mat::frob(&self.p2).powi(2)).sqrt()
    }

    /// Action `p1·x + conj(p2)·conj(x)`.
    pub fn apply(&self, x: &CVec) -> Result<CVec, BimatError> {
        if x.len() != self.ncols() {
            return Err(BimatError::dim(format!(
                "apply: bimatrix is {:?}, vector has length {}",
                self.shape(),
                x.len()
            )));
        }
        let xc = x.map(|z| z.conj());
        Ok(&self.p1 * x + self.p2.map(|z| z.conj()) * xc)
    }

    /// Composition `{a}{b}` with
    /// `r1 = a1·b1 + conj(a2)·b2`, `r2 = a2·b1 + conj(a1)·b2`,
    /// so that `apply(a·b, x) == apply(a, apply(b, x))`.
    pub fn multiply(&self, other: &Bimatrix) -> Result<Bimatrix, BimatError> {
        if self.ncols() != other.nrows() {
            return Err(BimatError::dim(format!(
                "multiply: {:?} × {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let r1 = &self.p1 * &other.p1 + mat::conj(&self.p2) * &other.p2;
        let r2 = &self.p2 * &other.p1 + mat::conj(&self.p1) * &other.p2;
        Ok(Bimatrix { p1: r1, p2: r2 })
    }

    pub fn add(&self, other: &Bimatrix) -> Result<Bimatrix, BimatError> {
        if self.shape() != other.shape() {
            return Err(BimatError::dim(format!(
                "add: {:?} + {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Bimatrix {
            p1: &self.p1 + &other.p1,
            p2: &self.p2 + &other.p2,
        })
    }

    pub fn sub(&self, other: &Bimatrix) -> Result<Bimatrix, BimatError> {
        if self.shape() != other.shape() {
            return Err(BimatError::dim(format!(
                "sub: {:?} - {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Bimatrix {
            p1: &self.p1 - &other.p1,
            p2: &self.p2 - &other.p2,
        })
    }

    pub fn neg(&self) -> Bimatrix {
        Bimatrix {
            p1: -&self.p1,
            p2: -&self.p2,
        }
    }

    /// Scale by a real factor (the bimatrix action is only real-linear, so a
    /// real scalar is the natural scaling).
    pub fn scale(&self, t: f64) -> Bimatrix {
        Bimatrix {
            p1: self.p1.scale(t),
            p2: self.p2.scale(t),
        }
    }

    /// Adjoint `{conj-transpose(p1), transpose(p2)}` — the unique pair with
    /// `to_real(adjoint(b)) == transpose(to_real(b))`.
    pub fn adjoint(&self) -> Bimatrix {
        Bimatrix {
            p1: self.p1.adjoint(),
            p2: self.p2.transpose(),
        }
    }

    /// Real representation
    /// `[[Re(p1+p2), -Im(p1+p2)], [Im(p1-p2), Re(p1-p2)]]`.
    pub fn to_real(&self) -> RealRep {
        let (n, m) = self.shape();
        let sum = &self.p1 + &self.p2;
        let dif = &self.p1 - &self.p2;
        let mut out = RMat::zeros(2 * n, 2 * m);
        out.view_mut((0, 0), (n, m)).copy_from(&mat::re(&sum));
        out.view_mut((0, m), (n, m)).copy_from(&(-mat::im(&sum)));
        out.view_mut((n, 0), (n, m)).copy_from(&mat::im(&dif));
        out.view_mut((n, m), (n, m)).copy_from(&mat::re(&dif));
        RealRep {
            m: out,
            n_rows: n,
            m_cols: m,
        }
    }

    /// Inverse bimatrix of `{f11+f22)/2 + j(f21-f12)/2, ...}` — recovers the
    /// unique bimatrix whose real representation is the given real matrix.
    pub fn from_real(r: &RealRep) -> Result<Bimatrix, BimatError> {
        Self::from_real_mat(&r.m)
    }

    /// As [`Bimatrix::from_real`], accepting a bare real matrix with even
    /// dimensions.
    pub fn from_real_mat(f: &RMat) -> Result<Bimatrix, BimatError> {
        let (rr, cc) = f.shape();
        if rr % 2 != 0 || cc % 2 != 0 {
            return Err(BimatError::dim(format!(
                "from_real requires even dimensions, got {rr}×{cc}"
            )));
        }
        if !mat::all_finite_r(f) {
            return Err(BimatError::InvalidInput(
                "real representation entries must be finite".into(),
            ));
        }
        let (n, m) = (rr / 2, cc / 2);
        let f11 = f.view((0, 0), (n, m));
        let f12 = f.view((0, m), (n, m));
        let f21 = f.view((n, 0), (n, m));
        let f22 = f.view((n, m), (n, m));
        let p1 = CMat::from_fn(n, m, |i, j| {
            Complex64::new(
                0.5 * (f11[(i, j)] + f22[(i, j)]),
                0.5 * (f21[(i, j)] - f12[(i, j)]),
            )
        });
        let p2 = CMat::from_fn(n, m, |i, j| {
            Complex64::new(
                0.5 * (f11[(i, j)] - f22[(i, j)]),
                -0.5 * (f12[(i, j)] + f21[(i, j)]),
            )
        });
        Ok(Bimatrix { p1, p2 })
    }

    /// Complex lifting `[[p1, conj(p2)], [p2, conj(p1)]]`, similar in
    /// spectrum to the real representation.
    pub fn complex_lifting(&self) -> CMat {
        let (n, m) = self.shape();
        let mut out = CMat::zeros(2 * n, 2 * m);
        out.view_mut((0, 0), (n, m)).copy_from(&self.p1);
        out.view_mut((0, m), (n, m)).copy_from(&mat::conj(&self.p2));
        out.view_mut((n, 0), (n, m)).copy_from(&self.p2);
        out.view_mut((n, m), (n, m)).copy_from(&mat::conj(&self.p1));
        out
    }

    /// Eigenvalues (of the real representation), spectral radius and abscissa.
    pub fn spectrum(&self) -> Result<Spectrum, BimatError> {
        if !self.is_square() {
            return Err(BimatError::dim(format!(
                "spectrum requires a square bimatrix, got {:?}",
                self.shape()
            )));
        }
        let eigs = mat::eigenvalues_r(&self.to_real().m);
        if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(BimatError::Numeric(
                "eigensolver returned non-finite values".into(),
            ));
        }
        Ok(Spectrum::from_eigenvalues(eigs))
    }

    /// Inverse through the real representation, guarded by a condition
    /// estimate of `1/(1e3·eps)`. Purely linear bimatrices (`p2 == 0`) are
    /// inverted on the complex component directly so the zero block stays
    /// exactly zero.
    pub fn inverse(&self) -> Result<Bimatrix, BimatError> {
        if !self.is_square() {
            return Err(BimatError::dim(format!(
                "inverse requires a square bimatrix, got {:?}",
                self.shape()
            )));
        }
        if mat::frob(&self.p2) == 0.0 {
            let r = self.to_real().m;
            let cond = mat::cond_r(&r);
            let limit = 1.0 / (1e3 * f64::EPSILON);
            if !cond.is_finite() || cond > limit {
                return Err(BimatError::Singular {
                    context: "bimatrix inverse",
                    cond,
                });
            }
            let inv = self.p1.clone().try_inverse().ok_or(BimatError::Singular {
                context: "bimatrix inverse",
                cond,
            })?;
            return Ok(Bimatrix::from_linear(inv));
        }
        let r = self.to_real().m;
        let cond = mat::cond_r(&r);
        let limit = 1.0 / (1e3 * f64::EPSILON);
        if !cond.is_finite() || cond > limit {
            return Err(BimatError::Singular {
                context: "bimatrix inverse",
                cond,
            });
        }
        let inv = r.clone().try_inverse().ok_or(BimatError::Singular {
            context: "bimatrix inverse",
            cond,
        })?;
        Bimatrix::from_real_mat(&inv)
    }

    /// `exp(t·b)` through the real representation (scaling-and-squaring).
    pub fn exponential(&self, t: f64) -> Result<Bimatrix, BimatError> {
        if !self.is_square() {
            return Err(BimatError::dim(format!(
                "exponential requires a square bimatrix, got {:?}",
                self.shape()
            )));
        }
        let e = (self.to_real().m * t).exp();
        Bimatrix::from_real_mat(&e)
    }

    /// True iff the real representation is symmetric (1e-10 relative) with
    /// positive minimum eigenvalue.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let r = self.to_real().m;
        let asym = mat::frob_r(&(&r - &r.transpose()));
        let scale = mat::frob_r(&r).max(1e-300);
        if asym > 1e-10 * scale {
            return false;
        }
        let sym = (&r + &r.transpose()).scale(0.5);
        let eigs = sym.symmetric_eigenvalues();
        eigs.iter().all(|&l| l > 0.0)
    }

    /// `b^k` by repeated composition.
    pub fn pow(&self, k: usize) -> Result<Bimatrix, BimatError> {
        if !self.is_square() {
            return Err(BimatError::dim("pow requires a square bimatrix"));
        }
        let mut acc = Bimatrix::identity(self.nrows());
        for _ in 0..k {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Tolerance-based nonsingularity via singular values of the real
    /// representation.
    pub fn is_nonsingular(&self) -> bool {
        if !self.is_square() || self.nrows() == 0 {
            return self.nrows() == 0;
        }
        let cond = mat::cond_r(&self.to_real().m);
        cond.is_finite() && cond < crate::SINGULARITY_COND
    }
}

impl RealRep {
    pub fn new(m: RMat) -> Result<Self, BimatError> {
        if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
            return Err(BimatError::dim(format!(
                "real representation must have even dimensions, got {:?}",
                m.shape()
            )));
        }
        if !mat::all_finite_r(&m) {
            return Err(BimatError::InvalidInput(
                "real representation entries must be finite".into(),
            ));
        }
        let n_rows = m.nrows() / 2;
        let m_cols = m.ncols() / 2;
        Ok(RealRep { m, n_rows, m_cols })
    }
}

/// Stack a complex vector as `[Re x; Im x]`.
pub fn stack_vec(x: &CVec) -> nalgebra::DVector<f64> {
    let n = x.len();
    nalgebra::DVector::from_fn(2 * n, |i, _| if i < n { x[i].re } else { x[i - n].im })
}

/// Rebuild a complex vector from `[Re x; Im x]`.
pub fn unstack_vec(v: &nalgebra::DVector<f64>) -> CVec {
    let n = v.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(v[i], v[i + n]))
}

/// Stack the columns of a complex matrix as `[Re m; Im m]` (2n×m real).
pub fn stack_mat(m: &CMat) -> RMat {
    let (n, c) = m.shape();
    let mut out = RMat::zeros(2 * n, c);
    out.view_mut((0, 0), (n, c)).copy_from(&mat::re(m));
    out.view_mut((n, 0), (n, c)).copy_from(&mat::im(m));
    out
}

/// Rebuild a complex matrix from stacked real/imaginary halves.
pub fn unstack_mat(m: &RMat) -> CMat {
    let n = m.nrows() / 2;
    let c = m.ncols();
    CMat::from_fn(n, c, |i, j| Complex64::new(m[(i, j)], m[(i + n, j)]))
}

#[allow(unused)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<Bimatrix>();
    check::<RealRep>();
    check::<Spectrum>();
}
