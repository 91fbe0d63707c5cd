//! Closed-form and series solvers for the bimatrix equation families, plus a
//! vectorized brute-force oracle.
//!
//! Every bimatrix equation here is linear over the reals in the real and
//! imaginary parts of the unknown components, which is what the oracle
//! exploits: it assembles the full real operator column by column and solves
//! or rank-analyzes it directly. The closed-form paths are independent of
//! that machinery, so the two routes check each other.

use num_complex::Complex64;

use crate::bimatrix::Bimatrix;
use crate::error::BimatError;
use crate::mat::{self, CMat, RMat};
use crate::poly::{CoprimeFactorization, PolyCMat};

/// Monic polynomial with real coefficients, lowest degree first.
#[derive(Debug, Clone)]
pub struct CharPoly {
    pub coefficients: Vec<f64>,
    pub degree: usize,
}

impl CharPoly {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Cayley–Hamilton residual `‖Σ c_k M^k‖ / Σ |c_k|·‖M‖^k` for the matrix
    /// the polynomial was computed from.
    pub fn cayley_hamilton_residual(&self, m: &RMat) -> f64 {
        let n = m.nrows();
        let mut acc = RMat::zeros(n, n);
        let mut p = RMat::identity(n, n);
        let mut scale = 0.0;
        let mnorm = mat::frob_r(m).max(1.0);
        for (k, &c) in self.coefficients.iter().enumerate() {
            acc += &p * c;
            scale += c.abs() * mnorm.powi(k as i32);
            p = &p * m;
        }
        mat::frob_r(&acc) / scale.max(1.0)
    }
}

/// Monic real-coefficient polynomial from a conjugation-closed root multiset.
fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut coeffs = vec![1.0f64];
    let mut pool: Vec<Complex64> = roots.to_vec();
    let mul = |coeffs: &mut Vec<f64>, factor: &[f64]| {
        let mut out = vec![0.0; coeffs.len() + factor.len() - 1];
        for (i, &a) in coeffs.iter().enumerate() {
            for (j, &b) in factor.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        *coeffs = out;
    };
    while let Some(lam) = pool.pop() {
        if lam.im.abs() <= 1e-12 * (1.0 + lam.re.abs()) {
            mul(&mut coeffs, &[-lam.re, 1.0]);
        } else {
            // pull the nearest conjugate partner and form a real quadratic
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, mu) in pool.iter().enumerate() {
                let d = (mu.conj() - lam).norm();
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            let mu = if pool.is_empty() {
                lam.conj()
            } else {
                pool.swap_remove(best)
            };
            let re = 0.5 * (lam.re + mu.re);
            let modsq = (lam.norm() * mu.norm()).max(0.0);
            mul(&mut coeffs, &[modsq, -2.0 * re, 1.0]);
        }
    }
    // ascending order
    coeffs
}

/// Characteristic polynomial of a square bimatrix: the (real-coefficient,
/// degree 2p) characteristic polynomial of its real representation.
pub fn char_poly(b: &Bimatrix) -> Result<CharPoly, BimatError> {
    if !b.is_square() {
        return Err(BimatError::dim("char_poly requires a square bimatrix"));
    }
    let eigs = mat::eigenvalues_r(&b.to_real().m);
    let coefficients = poly_from_roots(&eigs);
    let degree = coefficients.len() - 1;
    Ok(CharPoly {
        coefficients,
        degree,
    })
}

/// Characteristic polynomial of a complex matrix by the Faddeev–LeVerrier
/// recursion, with the (analytically real) coefficients projected real.
/// Suitable for the small orders this crate targets.
pub fn char_poly_complex(m: &CMat) -> CharPoly {
    let p = m.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); p + 1];
    coeffs[p] = Complex64::new(1.0, 0.0);
    let mut mk = m.clone();
    let mut ck = Complex64::new(1.0, 0.0);
    for k in 1..=p {
        ck = -mk.trace() / (k as f64);
        coeffs[p - k] = ck;
        if k < p {
            let adj = &mk + CMat::identity(p, p).map(|z| z * ck);
            mk = m * adj;
        }
    }
    let _ = ck;
    CharPoly {
        coefficients: coeffs.iter().map(|z| z.re).collect(),
        degree: p,
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    /// `{A}X + {B}Y = X{F}` (homogeneous).
    GsylHomog,
    /// `{A}X - X{F} = {C}`.
    Sylvester,
    /// `X = {A}X{F} + {C}`.
    Stein,
}

/// Outcome of the vectorized-real reference solve.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub unique: bool,
    pub nullspace_dim: usize,
    /// Least-squares/unique solution for the non-homogeneous kinds.
    pub solution: Option<Bimatrix>,
}

/// Real basis enumeration of an n×p bimatrix space (dimension 4np).
fn bimatrix_basis(n: usize, p: usize) -> Vec<Bimatrix> {
    let mut out = Vec::with_capacity(4 * n * p);
    for comp in 0..2 {
        for part in 0..2 {
            for i in 0..n {
                for j in 0..p {
                    let mut m = CMat::zeros(n, p);
                    m[(i, j)] = if part == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                    let b = if comp == 0 {
                        Bimatrix::from_linear(m)
                    } else {
                        Bimatrix::from_antilinear(m)
                    };
                    out.push(b);
                }
            }
        }
    }
    out
}

fn vectorize(b: &Bimatrix) -> nalgebra::DVector<f64> {
    let (n, p) = b.shape();
    let mut v = nalgebra::DVector::zeros(4 * n * p);
    let mut idx = 0;
    for m in [b.p1(), b.p2()] {
        for part in 0..2 {
            for i in 0..n {
                for j in 0..p {
                    v[idx] = if part == 0 {
                        m[(i, j)].re
                    } else {
                        m[(i, j)].im
                    };
                    idx += 1;
                }
            }
        }
    }
    v
}

fn devectorize(v: &nalgebra::DVector<f64>, n: usize, p: usize) -> Bimatrix {
    let block = n * p;
    let get = |o: usize, i: usize, j: usize| v[o + i * p + j];
    let p1 = CMat::from_fn(n, p, |i, j| Complex64::new(get(0, i, j), get(block, i, j)));
    let p2 = CMat::from_fn(n, p, |i, j| {
        Complex64::new(get(2 * block, i, j), get(3 * block, i, j))
    });
    Bimatrix::new(p1, p2).expect("shapes agree")
}

/// Assemble the full real operator of a bimatrix equation and solve or
/// rank-analyze it directly. This is the reference implementation the
/// closed-form solvers are tested against.
pub fn oracle_solve(
    kind: EquationKind,
    a: &Bimatrix,
    b_input: Option<&Bimatrix>,
    f: &Bimatrix,
    c: Option<&Bimatrix>,
    unknown_shape: (usize, usize),
) -> Result<OracleOutcome, BimatError> {
    let (n, p) = unknown_shape;
    if a.nrows() != n || !a.is_square() || !f.is_square() || f.nrows() != p {
        return Err(BimatError::dim("oracle: coefficient shapes do not conform"));
    }
    let apply_op = |x: &Bimatrix, y: Option<&Bimatrix>| -> Bimatrix {
        match kind {
            EquationKind::Sylvester => a
                .multiply(x)
                .and_then(|ax| ax.sub(&x.multiply(f).unwrap()))
                .unwrap(),
            EquationKind::Stein => x.sub(&a.multiply(x).unwrap().multiply(f).unwrap()).unwrap(),
            EquationKind::GsylHomog => {
                let bm = b_input.expect("gsyl needs B");
                let ax = a.multiply(x).unwrap();
                let by = bm.multiply(y.expect("gsyl needs Y")).unwrap();
                let xf = x.multiply(f).unwrap();
                ax.add(&by).unwrap().sub(&xf).unwrap()
            }
        }
    };

    let x_basis = bimatrix_basis(n, p);
    let mut columns: Vec<nalgebra::DVector<f64>> = Vec::new();
    match kind {
        EquationKind::GsylHomog => {
            let bm = b_input.ok_or_else(|| BimatError::dim("gsyl oracle needs B"))?;
            let m = bm.ncols();
            let y_zero = Bimatrix::zeros(m, p);
            for e in &x_basis {
                columns.push(vectorize(&apply_op(e, Some(&y_zero))));
            }
            let x_zero = Bimatrix::zeros(n, p);
            for e in &bimatrix_basis(m, p) {
                columns.push(vectorize(&apply_op(&x_zero, Some(e))));
            }
        }
        _ => {
            for e in &x_basis {
                columns.push(vectorize(&apply_op(e, None)));
            }
        }
    }
    let op = RMat::from_columns(&columns);
    let svd = op.clone().svd(true, true);
    let smax = svd.singular_values.max().max(1e-300);
    let tol = 1e-10 * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let nullspace_dim = op.ncols() - rank;

    match kind {
        EquationKind::GsylHomog => Ok(OracleOutcome {
            unique: nullspace_dim == 0,
            nullspace_dim,
            solution: None,
        }),
        _ => {
            let cmat = c.ok_or_else(|| BimatError::dim("oracle needs C"))?;
            if cmat.shape() != (n, p) {
                return Err(BimatError::dim("oracle: C shape mismatch"));
            }
            let rhs = vectorize(cmat);
            let sol = svd
                .solve(&rhs, tol)
                .map_err(|e| BimatError::Numeric(e.to_string()))?;
            let resid = (&op * &sol - &rhs).norm();
            if resid > 1e-8 * rhs.norm().max(1.0) {
                return Err(BimatError::NoSolution { residual: resid });
            }
            Ok(OracleOutcome {
                unique: nullspace_dim == 0,
                nullspace_dim,
                solution: Some(devectorize(&sol, n, p)),
            })
        }
    }
}

/// Nullspace dimension of the homogeneous generalized Sylvester operator.
pub fn oracle_gsyl_nullspace_dim(
    a: &Bimatrix,
    b: &Bimatrix,
    f: &Bimatrix,
) -> Result<usize, BimatError> {
    let out = oracle_solve(
        EquationKind::GsylHomog,
        a,
        Some(b),
        f,
        None,
        (a.nrows(), f.nrows()),
    )?;
    Ok(out.nullspace_dim)
}

// ---------------------------------------------------------------------------
// Generalized Sylvester solvers (coprime-factorization route)
// ---------------------------------------------------------------------------

/// Solution record of `{A}X + {B}Y = X{F}`.
#[derive(Debug, Clone)]
pub struct GSylSolution {
    pub x: Bimatrix,
    pub y: Bimatrix,
    pub z_used: (CMat, CMat),
    pub nonsingular_x: bool,
    pub residual: f64,
}

/// Relative residual of `{A}X + {B}Y = X{F}`.
pub fn gsyl_residual(a: &Bimatrix, b: &Bimatrix, f: &Bimatrix, x: &Bimatrix, y: &Bimatrix) -> f64 {
    let lhs = a.multiply(x).unwrap().add(&b.multiply(y).unwrap()).unwrap();
    let rhs = x.multiply(f).unwrap();
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    lhs.sub(&rhs).unwrap().norm() / scale
}

/// Complete parametrized solutions `X = Σ {N_i}{Z}{F}^i`, `Y = Σ {D_i}{Z}{F}^i`
/// of the generalized Sylvester equation, driven by a certified coprime
/// factorization and a free parameter bimatrix `{Z1, Z2}`.
pub fn solve_gsyl(
    sys: &crate::assign::SystemModel,
    f: &Bimatrix,
    coprime: &CoprimeFactorization,
    z1: &CMat,
    z2: &CMat,
) -> Result<GSylSolution, BimatError> {
    if !coprime.certified {
        return Err(BimatError::Precondition(
            "coprime factorization is not certified".into(),
        ));
    }
    let n = sys.a.nrows();
    let m = sys.b.ncols();
    let p = f.nrows();
    if !f.is_square() {
        return Err(BimatError::dim("F must be square"));
    }
    if z1.shape() != (m, p) || z2.shape() != (m, p) {
        return Err(BimatError::dim(format!(
            "Z must be {m}×{p}, got {:?} and {:?}",
            z1.shape(),
            z2.shape()
        )));
    }
    let z = Bimatrix::new(z1.clone(), z2.clone())?;
    let mut x = Bimatrix::zeros(n, p);
    let mut y = Bimatrix::zeros(m, p);
    let mut fpow = Bimatrix::identity(p);
    let omega = coprime.n.degree().max(coprime.d.degree());
    for i in 0..=omega {
        let zf = z.multiply(&fpow)?;
        x = x.add(&coprime.n.coeff(i).multiply(&zf)?)?;
        y = y.add(&coprime.d.coeff(i).multiply(&zf)?)?;
        fpow = fpow.multiply(f)?;
    }
    let residual = gsyl_residual(&sys.a, &sys.b, f, &x, &y);
    let nonsingular_x = x.is_square() && x.is_nonsingular();
    Ok(GSylSolution {
        x,
        y,
        z_used: (z1.clone(), z2.clone()),
        nonsingular_x,
        residual,
    })
}

/// Decoupled solution pair for block-diagonal targets.
#[derive(Debug, Clone)]
pub struct DecoupledSolution {
    pub x_plus: CMat,
    pub y_plus: CMat,
    pub x_minus: CMat,
    pub y_minus: CMat,
    pub assembled: GSylSolution,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

fn real_to_c(m: &RMat) -> CMat {
    mat::to_complex(m)
}

/// Solve the decoupled pair for a target `F = diag(f11, f22)`:
/// `X± = ½ Σ (N±_i (Z± + conj Z±) + N∓_i (Z± - conj Z±)) (F1±F2)^i`,
/// reducing to `Σ N±_i Z± (F1±F2)^i` when `Z±` is real.
pub fn solve_gsyl_decoupled(
    sys: &crate::assign::SystemModel,
    f11: &RMat,
    f22: &RMat,
    coprime: &CoprimeFactorization,
    z_plus: &CMat,
    z_minus: &CMat,
) -> Result<DecoupledSolution, BimatError> {
    if !coprime.certified {
        return Err(BimatError::Precondition(
            "coprime factorization is not certified".into(),
        ));
    }
    if !f11.is_square() || f11.shape() != f22.shape() {
        return Err(BimatError::Precondition(
            "f11/f22 must be square real matrices of equal size".into(),
        ));
    }
    let p = f11.nrows();
    let m = sys.b.ncols();
    if z_plus.shape() != (m, p) || z_minus.shape() != (m, p) {
        return Err(BimatError::dim("Z± must be m×p"));
    }
    let f1 = (f11 + f22).scale(0.5);
    let f2 = (f11 - f22).scale(0.5);
    let g_plus = real_to_c(&(&f1 + &f2)); // = f11
    let g_minus = real_to_c(&(&f1 - &f2)); // = f22
    let (np, dp, nm, dm) = coprime.plus_minus_parts();
    let omega = np
        .degree()
        .max(nm.degree())
        .max(dp.degree())
        .max(dm.degree());
    let np = np.padded(omega);
    let dp = dp.padded(omega);
    let nm = nm.padded(omega);
    let dm = dm.padded(omega);

    let is_real = |z: &CMat| z.iter().all(|v| v.im == 0.0);
    let run = |nn: &PolyCMat,
               dd: &PolyCMat,
               n_other: &PolyCMat,
               d_other: &PolyCMat,
               z: &CMat,
               g: &CMat|
     -> (CMat, CMat) {
        let rows_n = nn.shape().0;
        let rows_d = dd.shape().0;
        let mut x = CMat::zeros(rows_n, p);
        let mut y = CMat::zeros(rows_d, p);
        let mut gpow = CMat::identity(p, p);
        let zc = mat::conj(z);
        if is_real(z) {
            for i in 0..=omega {
                x += &nn.coeffs[i] * z * &gpow;
                y += &dd.coeffs[i] * z * &gpow;
                gpow = &gpow * g;
            }
        } else {
            let sum = (z + &zc).map(|v| v * 0.5);
            let dif = (z - &zc).map(|v| v * 0.5);
            for i in 0..=omega {
                x += (&nn.coeffs[i] * &sum + &n_other.coeffs[i] * &dif) * &gpow;
                y += (&dd.coeffs[i] * &sum + &d_other.coeffs[i] * &dif) * &gpow;
                gpow = &gpow * g;
            }
        }
        (x, y)
    };

    let (x_plus, y_plus) = run(&np, &dp, &nm, &dm, z_plus, &g_plus);
    let (x_minus, y_minus) = run(&nm, &dm, &np, &dp, z_minus, &g_minus);

    // residuals of the decoupled equations
    let a1 = sys.a.p1();
    let a2c = mat::conj(sys.a.p2());
    let b1 = sys.b.p1();
    let b2c = mat::conj(sys.b.p2());
    let resid = |x: &CMat, y: &CMat, sign: f64, g: &CMat| -> f64 {
        let lhs = a1 * x
            + (&a2c * mat::conj(x)).map(|v| v * sign)
            + b1 * y
            + (&b2c * mat::conj(y)).map(|v| v * sign);
        let rhs = x * g;
        let scale = mat::frob(&lhs).max(mat::frob(&rhs)).max(1.0);
        mat::frob(&(&lhs - &rhs)) / scale
    };
    let residual_plus = resid(&x_plus, &y_plus, 1.0, &g_plus);
    let residual_minus = resid(&x_minus, &y_minus, -1.0, &g_minus);

    // assemble {X1,X2} = ((X+ + X-)/2, conj(X+ - X-)/2)
    let x = Bimatrix::new(
        (&x_plus + &x_minus).map(|v| v * 0.5),
        mat::conj(&(&x_plus - &x_minus)).map(|v| v * 0.5),
    )?;
    let y = Bimatrix::new(
        (&y_plus + &y_minus).map(|v| v * 0.5),
        mat::conj(&(&y_plus - &y_minus)).map(|v| v * 0.5),
    )?;
    let mut f_real = RMat::zeros(2 * p, 2 * p);
    f_real.view_mut((0, 0), (p, p)).copy_from(f11);
    f_real.view_mut((p, p), (p, p)).copy_from(f22);
    let f = Bimatrix::from_real_mat(&f_real)?;
    let residual = gsyl_residual(&sys.a, &sys.b, &f, &x, &y);
    let nonsingular_x = x.is_square() && x.is_nonsingular();
    let z1 = (z_plus + z_minus).map(|v| v * 0.5);
    let z2 = mat::conj(&(z_plus - z_minus)).map(|v| v * 0.5);
    Ok(DecoupledSolution {
        x_plus,
        y_plus,
        x_minus,
        y_minus,
        assembled: GSylSolution {
            x,
            y,
            z_used: (z1, z2),
            nonsingular_x,
            residual,
        },
        residual_plus,
        residual_minus,
    })
}

/// Design mode for antilinear systems.
#[derive(Debug, Clone)]
pub enum AntiMode {
    /// Block-diagonal target `F = diag(f11, f22)` (both real).
    General { f11: RMat, f22: RMat },
    /// `F2 = 0`: the closed loop is equivalent to a normal linear system.
    Normalize { f1: CMat },
    /// `F1 = 0`: the closed loop stays equivalent to an antilinear system.
    AntiPreserve { f2: CMat },
}

/// Parity-split solutions for antilinear systems, driven by the
/// anti-right-coprime pair `(N0, D0)` of the factorization.
pub fn solve_antilinear(
    sys: &crate::assign::SystemModel,
    mode: &AntiMode,
    anti: &CoprimeFactorization,
    z1: &CMat,
    z2: &CMat,
) -> Result<GSylSolution, BimatError> {
    use crate::poly::FactorVariant;
    if anti.variant != FactorVariant::Anti || anti.anti_pair.is_none() {
        return Err(BimatError::Precondition(
            "solve_antilinear needs an anti-variant factorization".into(),
        ));
    }
    if sys.structure != crate::assign::Structure::Antilinear {
        return Err(BimatError::Precondition(
            "solve_antilinear needs an antilinear system".into(),
        ));
    }
    let (n0, d0) = anti.anti_pair.as_ref().unwrap();
    let n = sys.a.nrows();
    let m = sys.b.ncols();
    let omega = n0.degree().max(d0.degree());

    let (x, y, f) = match mode {
        AntiMode::General { f11, f22 } => {
            if !f11.is_square() || f11.shape() != f22.shape() {
                return Err(BimatError::Precondition("f11/f22 must be square".into()));
            }
            let p = f11.nrows();
            if z1.shape() != (m, p) || z2.shape() != (m, p) {
                return Err(BimatError::dim("Z must be m×p"));
            }
            let f1 = (f11 + f22).scale(0.5);
            let f2 = (f11 - f22).scale(0.5);
            let z_plus = z1 + mat::conj(z2);
            let z_minus = z1 - mat::conj(z2);
            let run = |z: &CMat, g: &RMat, sign: f64| -> (CMat, CMat) {
                let gc = real_to_c(g);
                let zc = mat::conj(z);
                let mut x = CMat::zeros(n, p);
                let mut y = CMat::zeros(m, p);
                let mut gpow = CMat::identity(p, p);
                for i in 0..=omega {
                    if i % 2 == 0 {
                        x += &n0.coeff(i) * z * &gpow;
                        y += &d0.coeff(i) * z * &gpow;
                    } else {
                        x += (&n0.coeff(i) * &zc * &gpow).map(|v| v * sign);
                        y += (&d0.coeff(i) * &zc * &gpow).map(|v| v * sign);
                    }
                    gpow = &gpow * &gc;
                }
                (x, y)
            };
            let (xp, yp) = run(&z_plus, &(&f1 + &f2), 1.0);
            let (xm, ym) = run(&z_minus, &(&f1 - &f2), -1.0);
            let x = Bimatrix::new(
                (&xp + &xm).map(|v| v * 0.5),
                mat::conj(&(&xp - &xm)).map(|v| v * 0.5),
            )?;
            let y = Bimatrix::new(
                (&yp + &ym).map(|v| v * 0.5),
                mat::conj(&(&yp - &ym)).map(|v| v * 0.5),
            )?;
            let f = Bimatrix::new(real_to_c(&f1), real_to_c(&f2))?;
            (x, y, f)
        }
        AntiMode::Normalize { f1 } => {
            if !f1.is_square() {
                return Err(BimatError::Precondition("f1 must be square".into()));
            }
            let p = f1.nrows();
            if z1.shape() != (m, p) || z2.shape() != (m, p) {
                return Err(BimatError::dim("Z must be m×p"));
            }
            // X1,Y1: even coefficients carry Z1, odd carry Z2, powers of F1.
            let mut x1 = CMat::zeros(n, p);
            let mut y1 = CMat::zeros(m, p);
            let mut x2 = CMat::zeros(n, p);
            let mut y2 = CMat::zeros(m, p);
            let mut fpow = CMat::identity(p, p);
            for i in 0..=omega {
                let (za, zb) = if i % 2 == 0 { (z1, z2) } else { (z2, z1) };
                x1 += &n0.coeff(i) * za * &fpow;
                y1 += &d0.coeff(i) * za * &fpow;
                x2 += mat::conj(&n0.coeff(i)) * zb * &fpow;
                y2 += mat::conj(&d0.coeff(i)) * zb * &fpow;
                fpow = &fpow * f1;
            }
            let x = Bimatrix::new(x1, x2)?;
            let y = Bimatrix::new(y1, y2)?;
            let f = Bimatrix::new(f1.clone(), CMat::zeros(p, p))?;
            (x, y, f)
        }
        AntiMode::AntiPreserve { f2 } => {
            if !f2.is_square() {
                return Err(BimatError::Precondition("f2 must be square".into()));
            }
            let p = f2.nrows();
            if z1.shape() != (m, p) || z2.shape() != (m, p) {
                return Err(BimatError::dim("Z must be m×p"));
            }
            let gram = mat::conj(f2) * f2; // conj(F2)·F2
            let mut x1 = CMat::zeros(n, p);
            let mut y1 = CMat::zeros(m, p);
            let mut x2 = CMat::zeros(n, p);
            let mut y2 = CMat::zeros(m, p);
            let z1c = mat::conj(z1);
            let z2c = mat::conj(z2);
            let mut gpow = CMat::identity(p, p); // (conj(F2)F2)^(i/2) for even i
            for i in 0..=omega {
                if i % 2 == 0 {
                    x1 += &n0.coeff(i) * z1 * &gpow;
                    y1 += &d0.coeff(i) * z1 * &gpow;
                    x2 += mat::conj(&n0.coeff(i)) * z2 * &gpow;
                    y2 += mat::conj(&d0.coeff(i)) * z2 * &gpow;
                    // prepare F2·(conj(F2)F2)^(i/2) for the following odd index
                } else {
                    let odd = f2 * &gpow;
                    x1 += &n0.coeff(i) * &z1c * &odd;
                    y1 += &d0.coeff(i) * &z1c * &odd;
                    x2 += mat::conj(&n0.coeff(i)) * &z2c * &odd;
                    y2 += mat::conj(&d0.coeff(i)) * &z2c * &odd;
                    gpow = &gpow * &gram;
                }
            }
            let x = Bimatrix::new(x1, x2)?;
            let y = Bimatrix::new(y1, y2)?;
            let f = Bimatrix::new(CMat::zeros(p, p), f2.clone())?;
            (x, y, f)
        }
    };
    let residual = gsyl_residual(&sys.a, &sys.b, &f, &x, &y);
    let nonsingular_x = x.is_square() && x.is_nonsingular();
    Ok(GSylSolution {
        x,
        y,
        z_used: (z1.clone(), z2.clone()),
        nonsingular_x,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Sylvester / Stein closed forms
// ---------------------------------------------------------------------------

/// `D(k) = Σ_{i=0}^{k-1} {A}^i {C} {F}^{k-1-i}` for k = 1..=kmax (direct sums).
pub fn sylvester_dk_direct(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
    kmax: usize,
) -> Result<Vec<Bimatrix>, BimatError> {
    let mut apow = vec![Bimatrix::identity(a.nrows())];
    let mut fpow = vec![Bimatrix::identity(f.nrows())];
    for i in 0..kmax {
        apow.push(apow[i].multiply(a)?);
        fpow.push(fpow[i].multiply(f)?);
    }
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut acc = Bimatrix::zeros(c.nrows(), c.ncols());
        for i in 0..k {
            acc = acc.add(&apow[i].multiply(c)?.multiply(&fpow[k - 1 - i])?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Same sequence by the recursion `D(k+1) = {A}D(k) + {C}{F}^k`, `D(1) = C`.
pub fn sylvester_dk_recursive(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
    kmax: usize,
) -> Result<Vec<Bimatrix>, BimatError> {
    let mut out = Vec::with_capacity(kmax);
    let mut fpow = Bimatrix::identity(f.nrows());
    let mut d = c.clone();
    for _ in 1..=kmax {
        out.push(d.clone());
        fpow = fpow.multiply(f)?;
        d = a.multiply(&d)?.add(&c.multiply(&fpow)?)?;
    }
    Ok(out)
}

/// `D(k) = Σ_{i=0}^{k-1} {A}^i {C} {F}^i` (Stein version, direct sums).
pub fn stein_dk_direct(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
    kmax: usize,
) -> Result<Vec<Bimatrix>, BimatError> {
    let mut apow = vec![Bimatrix::identity(a.nrows())];
    let mut fpow = vec![Bimatrix::identity(f.nrows())];
    for i in 0..kmax {
        apow.push(apow[i].multiply(a)?);
        fpow.push(fpow[i].multiply(f)?);
    }
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut acc = Bimatrix::zeros(c.nrows(), c.ncols());
        for i in 0..k {
            acc = acc.add(&apow[i].multiply(c)?.multiply(&fpow[i])?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Stein sequence by the recursion `D(k+1) = {A}D(k){F} + {C}`, `D(1) = C`.
///
/// The additive `{C}` term is required for consistency with the direct sum;
/// dropping it breaks `D(2) = C + {A}C{F}` already.
pub fn stein_dk_recursive(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
    kmax: usize,
) -> Result<Vec<Bimatrix>, BimatError> {
    let mut out = Vec::with_capacity(kmax);
    let mut d = c.clone();
    for _ in 1..=kmax {
        out.push(d.clone());
        d = a.multiply(&d)?.multiply(f)?.add(c)?;
    }
    Ok(out)
}

fn spectra_gap_sylvester(a: &Bimatrix, f: &Bimatrix) -> Result<f64, BimatError> {
    let ea = a.spectrum()?.eigenvalues;
    let ef = f.spectrum()?.eigenvalues;
    let mut gap = f64::INFINITY;
    for la in &ea {
        for lf in &ef {
            gap = gap.min((la - lf).norm());
        }
    }
    Ok(gap)
}

fn spectra_margin_stein(a: &Bimatrix, f: &Bimatrix) -> Result<f64, BimatError> {
    let ea = a.spectrum()?.eigenvalues;
    let ef = f.spectrum()?.eigenvalues;
    let mut margin = f64::INFINITY;
    for la in &ea {
        for lf in &ef {
            margin = margin.min((la * lf - Complex64::new(1.0, 0.0)).norm());
        }
    }
    Ok(margin)
}

/// Unique solution of `{A}X - X{F} = {C}` by the characteristic-polynomial
/// closed form: `X = β({A})^{-1} · Σ_{k≥1} β_k D(k)` with β the
/// characteristic polynomial of `{F}`. The prefactor is applied by linear
/// solve on the real representation, never by explicit inversion.
pub fn solve_sylvester(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix) -> Result<Bimatrix, BimatError> {
    solve_sylvester_full(a, f, c).map(|(x, _)| x)
}

/// As [`solve_sylvester`], also returning the condition estimate of the
/// polynomial prefactor (reported, never regularized).
pub fn solve_sylvester_full(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
) -> Result<(Bimatrix, f64), BimatError> {
    check_sylvester_shapes(a, f, c)?;
    let gap = spectra_gap_sylvester(a, f)?;
    if gap < 1e-8 {
        return Err(BimatError::NoUniqueSolution {
            condition: "spectra of {A} and {F} intersect",
            margin: gap,
        });
    }
    let beta = char_poly(f)?;
    let deg = beta.degree;
    let dks = sylvester_dk_recursive(a, f, c, deg)?;
    // prefactor β({A}) by Horner in {A}
    let n = a.nrows();
    let mut pref = Bimatrix::from_linear(CMat::identity(n, n).map(|z| z * beta.coefficients[deg]));
    for k in (0..deg).rev() {
        pref = pref.multiply(a)?;
        pref = pref.add(&Bimatrix::from_linear(
            CMat::identity(n, n).map(|z| z * beta.coefficients[k]),
        ))?;
    }
    let mut rhs = Bimatrix::zeros(c.nrows(), c.ncols());
    for k in 1..=deg {
        rhs = rhs.add(&dks[k - 1].scale(beta.coefficients[k]))?;
    }
    let pref_real = pref.to_real().m;
    let prefactor_cond = mat::cond_r(&pref_real);
    let x_real = mat::solve_r(&pref_real, &rhs.to_real().m, "sylvester prefactor")?;
    let x = Bimatrix::from_real_mat(&x_real)?;
    let resid = sylvester_residual(a, f, c, &x);
    if resid > 1e-6 {
        return Err(BimatError::Numeric(format!(
            "sylvester closed form residual {resid:.3e}"
        )));
    }
    Ok((x, prefactor_cond))
}

fn check_sylvester_shapes(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix) -> Result<(), BimatError> {
    if !a.is_square() || !f.is_square() || c.nrows() != a.nrows() || c.ncols() != f.nrows() {
        return Err(BimatError::dim(format!(
            "sylvester shapes: A {:?}, F {:?}, C {:?}",
            a.shape(),
            f.shape(),
            c.shape()
        )));
    }
    Ok(())
}

pub fn sylvester_residual(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix, x: &Bimatrix) -> f64 {
    let lhs = a.multiply(x).unwrap().sub(&x.multiply(f).unwrap()).unwrap();
    let scale = a.norm() * x.norm() + x.norm() * f.norm() + c.norm();
    lhs.sub(c).unwrap().norm() / scale.max(1.0)
}

/// Unique solution of `X = {A}X{F} + {C}` by the closed form
/// `X = (Σ_k β_k {A}^{2p-k})^{-1} Σ_{k≥1} β_k {A}^{2p-k} D(k)`.
pub fn solve_stein(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix) -> Result<Bimatrix, BimatError> {
    solve_stein_full(a, f, c).map(|(x, _)| x)
}

/// As [`solve_stein`], also returning the prefactor condition estimate.
pub fn solve_stein_full(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
) -> Result<(Bimatrix, f64), BimatError> {
    check_sylvester_shapes(a, f, c)?;
    let margin = spectra_margin_stein(a, f)?;
    if margin < 1e-8 {
        return Err(BimatError::NoUniqueSolution {
            condition: "λi{A}·λj{F} = 1 for some pair",
            margin,
        });
    }
    let beta = char_poly(f)?;
    let deg = beta.degree;
    let dks = stein_dk_recursive(a, f, c, deg)?;
    let mut apow = vec![Bimatrix::identity(a.nrows())];
    for i in 0..deg {
        apow.push(apow[i].multiply(a)?);
    }
    let mut pref = Bimatrix::zeros(a.nrows(), a.nrows());
    let mut rhs = Bimatrix::zeros(c.nrows(), c.ncols());
    for k in 0..=deg {
        pref = pref.add(&apow[deg - k].scale(beta.coefficients[k]))?;
        if k >= 1 {
            rhs = rhs.add(
                &apow[deg - k]
                    .multiply(&dks[k - 1])?
                    .scale(beta.coefficients[k]),
            )?;
        }
    }
    let pref_real = pref.to_real().m;
    let prefactor_cond = mat::cond_r(&pref_real);
    let x_real = mat::solve_r(&pref_real, &rhs.to_real().m, "stein prefactor")?;
    let x = Bimatrix::from_real_mat(&x_real)?;
    let resid = stein_residual(a, f, c, &x);
    if resid > 1e-6 {
        return Err(BimatError::Numeric(format!(
            "stein closed form residual {resid:.3e}"
        )));
    }
    Ok((x, prefactor_cond))
}

pub fn stein_residual(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix, x: &Bimatrix) -> f64 {
    let rhs = a.multiply(x).unwrap().multiply(f).unwrap().add(c).unwrap();
    let scale = x.norm().max(rhs.norm()).max(1.0);
    x.sub(&rhs).unwrap().norm() / scale
}

// ---------------------------------------------------------------------------
// Schur kernel and Lyapunov solvers
// ---------------------------------------------------------------------------

/// Bartels–Stewart: solve `a·x + x·b = c` for real dense matrices by real
/// Schur reduction of both coefficients and quasi-triangular back-substitution.
pub fn bartels_stewart(a: &RMat, b: &RMat, c: &RMat) -> Result<RMat, BimatError> {
    let n = a.nrows();
    let m = b.nrows();
    if !a.is_square() || !b.is_square() || c.shape() != (n, m) {
        return Err(BimatError::dim("bartels_stewart shapes"));
    }
    let sa = a
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or_else(|| BimatError::Numeric("Schur iteration failed for A".into()))?;
    let sb = b
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or_else(|| BimatError::Numeric("Schur iteration failed for B".into()))?;
    let (qa, ta) = sa.unpack();
    let (qb, tb) = sb.unpack();
    let ct = qa.transpose() * c * &qb;

    let blocks_a = quasi_blocks(&ta);
    let blocks_b = quasi_blocks(&tb);
    let mut x = RMat::zeros(n, m);
    for &(j0, jw) in blocks_b.iter() {
        for &(i0, iw) in blocks_a.iter().rev() {
            // rhs = ct[I,J] - Σ_{i'>i} Ta[I,I']·X[I',J] - Σ_{j'<j} X[I,J']·Tb[J',J]
            let mut rhs = ct.view((i0, j0), (iw, jw)).into_owned();
            if i0 + iw < n {
                let ta_right = ta.view((i0, i0 + iw), (iw, n - i0 - iw));
                let x_below = x.view((i0 + iw, j0), (n - i0 - iw, jw));
                rhs -= ta_right * x_below;
            }
            if j0 > 0 {
                let x_left = x.view((i0, 0), (iw, j0));
                let tb_up = tb.view((0, j0), (j0, jw));
                rhs -= x_left * tb_up;
            }
            // solve Ta[I,I]·Xij + Xij·Tb[J,J] = rhs (Kronecker, ≤4×4)
            let taii = ta.view((i0, i0), (iw, iw)).into_owned();
            let tbjj = tb.view((j0, j0), (jw, jw)).into_owned();
            let dim = iw * jw;
            let mut small = RMat::zeros(dim, dim);
            // vec ordering: column-major over Xij (col j, row i) -> idx j*iw + i
            for cj in 0..jw {
                for ci in 0..iw {
                    let col = cj * iw + ci;
                    for ri in 0..iw {
                        small[(cj * iw + ri, col)] += taii[(ri, ci)];
                    }
                    for rj in 0..jw {
                        small[(rj * iw + ci, col)] += tbjj[(cj, rj)];
                    }
                }
            }
            let mut rv = nalgebra::DVector::<f64>::zeros(dim);
            for cj in 0..jw {
                for ci in 0..iw {
                    rv[cj * iw + ci] = rhs[(ci, cj)];
                }
            }
            let lu = small.clone().lu();
            let sol = lu.solve(&rv).ok_or(BimatError::NoUniqueSolution {
                condition: "λi(A) + λj(B) = 0 in the Schur kernel",
                margin: 0.0,
            })?;
            for cj in 0..jw {
                for ci in 0..iw {
                    x[(i0 + ci, j0 + cj)] = sol[cj * iw + ci];
                }
            }
        }
    }
    Ok(qa * x * qb.transpose())
}

/// Diagonal block layout (offset, width) of a real quasi-triangular matrix.
fn quasi_blocks(t: &RMat) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

/// Solve `{A}X + X{F} = -{C}` on the real representation with the Schur
/// kernel. This is the algebraic counterpart of the convergent integral
/// `∫ e^{tA} C e^{tF} dt`, which exists when μ{A} + μ{F} < 0.
pub fn solve_sylvester_integral_form(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
) -> Result<Bimatrix, BimatError> {
    check_sylvester_shapes(a, f, c)?;
    let mu = a.spectrum()?.mu + f.spectrum()?.mu;
    if mu >= 0.0 {
        return Err(BimatError::Precondition(format!(
            "μ{{A}} + μ{{F}} = {mu:.3e} must be negative"
        )));
    }
    let x = bartels_stewart(&a.to_real().m, &f.to_real().m, &(-c.to_real().m))?;
    Bimatrix::from_real_mat(&x)
}

/// Continuous-time Lyapunov: `adjoint(A)·P + P·A = -Q` via the Schur kernel,
/// requiring μ{A} < 0.
pub fn solve_lyapunov_ct(a: &Bimatrix, q: &Bimatrix) -> Result<Bimatrix, BimatError> {
    if !a.is_square() || a.shape() != q.shape() {
        return Err(BimatError::dim("lyapunov shapes"));
    }
    let mu = a.spectrum()?.mu;
    if mu >= 0.0 {
        return Err(BimatError::Precondition(format!(
            "μ{{A}} = {mu:.3e}: A must be asymptotically stable"
        )));
    }
    let ar = a.to_real().m;
    let x = bartels_stewart(&ar.transpose(), &ar, &(-q.to_real().m))?;
    Bimatrix::from_real_mat(&x)
}

/// Truncated series `X = Σ_k {A}^k {C} {F}^k`, valid when ρ{A}·ρ{F} < 1.
/// Terms are accumulated until `‖term‖ ≤ 1e-14·‖partial sum‖` or a
/// ρ-based geometric bound certifies the tail below 1e-12.
pub fn stein_series(a: &Bimatrix, f: &Bimatrix, c: &Bimatrix) -> Result<Bimatrix, BimatError> {
    check_sylvester_shapes(a, f, c)?;
    let rho = a.spectrum()?.rho * f.spectrum()?.rho;
    if rho >= 1.0 {
        return Err(BimatError::Precondition(format!(
            "ρ{{A}}·ρ{{F}} = {rho:.3e} must be < 1"
        )));
    }
    let mut acc = c.clone();
    let mut term = c.clone();
    for k in 0..100_000 {
        term = a.multiply(&term)?.multiply(f)?;
        let t = term.norm();
        acc = acc.add(&term)?;
        let s = acc.norm().max(1e-300);
        if t <= 1e-14 * s {
            return Ok(acc);
        }
        // geometric tail bound once the contraction regime is reached
        if k > 8 && rho < 1.0 {
            let tail = t * rho / (1.0 - rho);
            if tail <= 1e-12 * s {
                return Ok(acc);
            }
        }
    }
    Err(BimatError::Numeric("stein series did not converge".into()))
}

/// Discrete-time Lyapunov: `P = adjoint(A)·P·A + Q` by the truncated series,
/// requiring ρ{A} < 1.
pub fn solve_lyapunov_dt(a: &Bimatrix, q: &Bimatrix) -> Result<Bimatrix, BimatError> {
    if !a.is_square() || a.shape() != q.shape() {
        return Err(BimatError::dim("lyapunov shapes"));
    }
    let rho = a.spectrum()?.rho;
    if rho >= 1.0 {
        return Err(BimatError::Precondition(format!(
            "ρ{{A}} = {rho:.3e}: A must be Schur stable"
        )));
    }
    stein_series(&a.adjoint(), a, q)
}

// ---------------------------------------------------------------------------
// Quadrature oracles for the integral forms
// ---------------------------------------------------------------------------

/// Adaptive-Simpson evaluation of `∫_0^∞ e^{t·ar}·cr·e^{t·fr} dt` on real
/// representations. A validation device for the algebraic paths, not a
/// production solver.
pub fn quadrature_integral_real(ar: &RMat, fr: &RMat, cr: &RMat, tol: f64) -> RMat {
    let integrand = |t: f64| -> RMat { (ar * t).exp() * cr * (fr * t).exp() };
    // integrate on doubling windows until the last window stops contributing
    let mut acc = RMat::zeros(cr.nrows(), cr.ncols());
    let mut t0 = 0.0;
    let mut h = 1.0;
    for _ in 0..60 {
        let seg = adaptive_simpson(&integrand, t0, t0 + h, tol / 8.0, 0);
        let seg_norm = mat::frob_r(&seg);
        acc += seg;
        t0 += h;
        h *= 2.0;
        if seg_norm <= tol * mat::frob_r(&acc).max(1.0) && t0 > 4.0 {
            break;
        }
    }
    acc
}

fn adaptive_simpson<F: Fn(f64) -> RMat>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> RMat {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (&fa + &fm * 4.0 + &fb) * ((b - a) / 6.0);
    simpson_refine(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_refine<F: Fn(f64) -> RMat>(
    f: &F,
    a: f64,
    b: f64,
    fa: RMat,
    fm: RMat,
    fb: RMat,
    whole: RMat,
    tol: f64,
    depth: usize,
) -> RMat {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (&fa + &flm * 4.0 + &fm) * ((m - a) / 6.0);
    let right = (&fm + &frm * 4.0 + &fb) * ((b - m) / 6.0);
    let sum = &left + &right;
    let err = mat::frob_r(&(&sum - &whole));
    if depth >= 24 || err <= 15.0 * tol {
        let corr = (&sum - &whole) / 15.0;
        return sum + corr;
    }
    simpson_refine(f, a, m, fa, flm, fm.clone(), left, tol / 2.0, depth + 1)
        + simpson_refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
}

/// Quadrature of the Sylvester-form integral as a bimatrix.
pub fn quadrature_sylvester_integral(
    a: &Bimatrix,
    f: &Bimatrix,
    c: &Bimatrix,
    tol: f64,
) -> Result<Bimatrix, BimatError> {
    let mu = a.spectrum()?.mu + f.spectrum()?.mu;
    if mu >= 0.0 {
        return Err(BimatError::Precondition(
            "integral diverges: μ{A} + μ{F} ≥ 0".into(),
        ));
    }
    let xr = quadrature_integral_real(&a.to_real().m, &f.to_real().m, &c.to_real().m, tol);
    Bimatrix::from_real_mat(&xr)
}

/// Quadrature of the Lyapunov integral `∫ e^{t·adj(A)} Q e^{t·A} dt`.
pub fn quadrature_lyapunov_integral(
    a: &Bimatrix,
    q: &Bimatrix,
    tol: f64,
) -> Result<Bimatrix, BimatError> {
    quadrature_sylvester_integral(&a.adjoint(), a, q, tol)
}

// ---------------------------------------------------------------------------
// Conjugate matrix equation specializations
// ---------------------------------------------------------------------------

/// Jameson-form solve of the ordinary complex Sylvester equation
/// `m·x - x·n = w` through the characteristic polynomial of `n`.
fn complex_sylvester_jameson(m: &CMat, n: &CMat, w: &CMat) -> Result<CMat, BimatError> {
    let gamma = char_poly_complex(n);
    let p = gamma.degree;
    // D(k+1) = m·D(k) + w·n^k
    let mut dks = Vec::with_capacity(p);
    let mut npow = CMat::identity(n.nrows(), n.ncols());
    let mut d = w.clone();
    for _ in 1..=p {
        dks.push(d.clone());
        npow = &npow * n;
        d = m * &d + w * &npow;
    }
    // prefactor γ(m)
    let sz = m.nrows();
    let mut pref = CMat::identity(sz, sz).map(|z| z * gamma.coefficients[p]);
    for k in (0..p).rev() {
        pref = &pref * m + CMat::identity(sz, sz).map(|z| z * gamma.coefficients[k]);
    }
    let mut rhs = CMat::zeros(w.nrows(), w.ncols());
    for k in 1..=p {
        rhs += dks[k - 1].map(|z| z * gamma.coefficients[k]);
    }
    let lu = pref.clone().lu();
    lu.solve(&rhs).ok_or(BimatError::Singular {
        context: "conjugate-sylvester prefactor",
        cond: f64::INFINITY,
    })
}

/// Unique solution of `conj(A2)·X - conj(X)·F2 = C2`.
///
/// Pairing the equation with its conjugate eliminates the conjugated unknown
/// and leaves the ordinary Sylvester equation
/// `A2·conj(A2)·X - X·conj(F2)·F2 = A2·C2 + conj(C2)·F2`, solved in closed
/// form through the characteristic polynomial of `conj(F2)·F2`.
pub fn solve_conjugate_sylvester(a2: &CMat, f2: &CMat, c2: &CMat) -> Result<CMat, BimatError> {
    if !a2.is_square() || !f2.is_square() || c2.shape() != (a2.nrows(), f2.nrows()) {
        return Err(BimatError::dim("conjugate sylvester shapes"));
    }
    let m = a2 * mat::conj(a2);
    let n = mat::conj(f2) * f2;
    let gap = {
        let em = mat::eigenvalues_c_symmetric(&m);
        let en = mat::eigenvalues_c_symmetric(&n);
        let mut g = f64::INFINITY;
        for x in &em {
            for y in &en {
                g = g.min((x - y).norm());
            }
        }
        g
    };
    if gap < 1e-8 {
        return Err(BimatError::NoUniqueSolution {
            condition: "spectra of conj(A2)A2 and conj(F2)F2 intersect",
            margin: gap,
        });
    }
    let w = a2 * c2 + mat::conj(c2) * f2;
    let x = complex_sylvester_jameson(&m, &n, &w)?;
    // confirm the original (conjugate-coupled) equation
    let resid = mat::frob(&(mat::conj(a2) * &x - mat::conj(&x) * f2 - c2))
        / (mat::frob(c2) + mat::frob(&x)).max(1.0);
    if resid > 1e-6 {
        return Err(BimatError::NoSolution { residual: resid });
    }
    Ok(x)
}

/// Unique solution of `X = A2·conj(X)·F2 + C2`.
///
/// Substituting the conjugated equation into itself gives the ordinary Stein
/// equation `X = A2·conj(A2)·X·conj(F2)·F2 + C2 + A2·conj(C2)·F2`, solved in
/// closed form through the characteristic polynomial of `conj(F2)·F2`.
pub fn solve_conjugate_stein(a2: &CMat, f2: &CMat, c2: &CMat) -> Result<CMat, BimatError> {
    if !a2.is_square() || !f2.is_square() || c2.shape() != (a2.nrows(), f2.nrows()) {
        return Err(BimatError::dim("conjugate stein shapes"));
    }
    let m = a2 * mat::conj(a2);
    let n = mat::conj(f2) * f2;
    let margin = {
        let em = mat::eigenvalues_c_symmetric(&m);
        let en = mat::eigenvalues_c_symmetric(&n);
        let mut g = f64::INFINITY;
        for x in &em {
            for y in &en {
                g = g.min((x * y - Complex64::new(1.0, 0.0)).norm());
            }
        }
        g
    };
    if margin < 1e-8 {
        return Err(BimatError::NoUniqueSolution {
            condition: "λi(A2·conj A2)·λj(conj(F2)·F2) = 1",
            margin,
        });
    }
    let w = c2 + a2 * mat::conj(c2) * f2;
    let gamma = char_poly_complex(&n);
    let p = gamma.degree;
    // D(k+1) = m·D(k)·n + w
    let mut dks = Vec::with_capacity(p);
    let mut d = w.clone();
    for _ in 1..=p {
        dks.push(d.clone());
        d = &m * &d * &n + &w;
    }
    let mut mpow = vec![CMat::identity(m.nrows(), m.ncols())];
    for i in 0..p {
        mpow.push(&mpow[i] * &m);
    }
    let mut pref = CMat::zeros(m.nrows(), m.ncols());
    let mut rhs = CMat::zeros(w.nrows(), w.ncols());
    for k in 0..=p {
        pref += mpow[p - k].map(|z| z * gamma.coefficients[k]);
        if k >= 1 {
            rhs += (&mpow[p - k] * &dks[k - 1]).map(|z| z * gamma.coefficients[k]);
        }
    }
    let lu = pref.clone().lu();
    let x = lu.solve(&rhs).ok_or(BimatError::Singular {
        context: "conjugate-stein prefactor",
        cond: f64::INFINITY,
    })?;
    let resid =
        mat::frob(&(&x - a2 * mat::conj(&x) * f2 - c2)) / (mat::frob(c2) + mat::frob(&x)).max(1.0);
    if resid > 1e-6 {
        return Err(BimatError::NoSolution { residual: resid });
    }
    Ok(x)
}

/// Series form of the conjugate-Stein solution, valid when
/// `ρ(A2·conj A2)·ρ(conj(F2)·F2) < 1`.
pub fn conjugate_stein_series(a2: &CMat, f2: &CMat, c2: &CMat) -> Result<CMat, BimatError> {
    let m = a2 * mat::conj(a2);
    let n = mat::conj(f2) * f2;
    let rho_m = mat::eigenvalues_c_symmetric(&m)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let rho_n = mat::eigenvalues_c_symmetric(&n)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if rho_m * rho_n >= 1.0 {
        return Err(BimatError::Precondition(
            "conjugate-stein series: spectral radius product ≥ 1".into(),
        ));
    }
    let w = c2 + a2 * mat::conj(c2) * f2;
    let mut acc = w.clone();
    let mut term = w;
    for _ in 0..100_000 {
        term = &m * &term * &n;
        acc += &term;
        if mat::frob(&term) <= 1e-14 * mat::frob(&acc).max(1e-300) {
            return Ok(acc);
        }
    }
    Err(BimatError::Numeric("conjugate stein series stalled".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::{Structure, SystemModel, TimeDomain};
    use crate::mat::randomize_tests_rng;
    use crate::poly::coprime_factorization;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(z: Complex64, w: Complex64) -> Bimatrix {
        Bimatrix::new(CMat::from_element(1, 1, z), CMat::from_element(1, 1, w)).unwrap()
    }

    #[test]
    fn char_poly_nilpotent_and_rotation() {
        // {0,0} scalar → s²
        let p = char_poly(&Bimatrix::zeros(1, 1)).unwrap();
        assert_eq!(p.degree, 2);
        assert!(p.coefficients[0].abs() < 1e-14);
        assert!(p.coefficients[1].abs() < 1e-14);
        assert!((p.coefficients[2] - 1.0).abs() < 1e-14);

        // {jω, 0} scalar → s² + ω²
        let om = 1.7;
        let p = char_poly(&scalar(c(0.0, om), c(0.0, 0.0))).unwrap();
        assert!((p.coefficients[0] - om * om).abs() < 1e-12);
        assert!(p.coefficients[1].abs() < 1e-12);
        assert!((p.coefficients[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn char_poly_roots_match_spectrum() {
        let mut rng = randomize_tests_rng(1);
        for _ in 0..10 {
            let b = Bimatrix::new(mat::random_c(&mut rng, 3, 3), mat::random_c(&mut rng, 3, 3))
                .unwrap();
            let p = char_poly(&b).unwrap();
            let spec = b.spectrum().unwrap();
            // companion-matrix roots of the monic polynomial
            let deg = p.degree;
            let mut comp = RMat::zeros(deg, deg);
            for i in 1..deg {
                comp[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                comp[(i, deg - 1)] = -p.coefficients[i];
            }
            let roots = mat::eigenvalues_r(&comp.transpose());
            let d = mat::multiset_distance(&roots, &spec.eigenvalues).unwrap();
            assert!(d < 1e-7, "root/spectrum distance {d}");
            // Cayley-Hamilton residual
            assert!(p.cayley_hamilton_residual(&b.to_real().m) < 1e-8);
        }
    }

    #[test]
    fn oracle_scalar_examples() {
        // sylvester: A={2,0}, F={0,0}, C={1,0} → X = {1/2, 0}
        let out = oracle_solve(
            EquationKind::Sylvester,
            &scalar(c(2.0, 0.0), c(0.0, 0.0)),
            None,
            &Bimatrix::zeros(1, 1),
            Some(&scalar(c(1.0, 0.0), c(0.0, 0.0))),
            (1, 1),
        )
        .unwrap();
        assert!(out.unique);
        let x = out.solution.unwrap();
        assert!((x.p1()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(x.p2()[(0, 0)].norm() < 1e-12);

        // stein with A = 0 → X == C
        let cc = scalar(c(0.3, -0.4), c(1.1, 0.2));
        let out = oracle_solve(
            EquationKind::Stein,
            &Bimatrix::zeros(1, 1),
            None,
            &scalar(c(0.7, 0.1), c(0.0, 0.3)),
            Some(&cc),
            (1, 1),
        )
        .unwrap();
        assert!(out.solution.unwrap().sub(&cc).unwrap().norm() < 1e-12);
    }

    #[test]
    fn oracle_dense_4x4_case() {
        // A={j,1}, F={0,1/2}, C={1,0} scalars: the closed-form solver must
        // match the value fixed by the dense real solve
        let a = scalar(c(0.0, 1.0), c(1.0, 0.0));
        let f = scalar(c(0.0, 0.0), c(0.5, 0.0));
        let cc = scalar(c(1.0, 0.0), c(0.0, 0.0));
        let oracle =
            oracle_solve(EquationKind::Sylvester, &a, None, &f, Some(&cc), (1, 1)).unwrap();
        let x = solve_sylvester(&a, &f, &cc).unwrap();
        let xo = oracle.solution.unwrap();
        assert!(x.sub(&xo).unwrap().norm() < 1e-10);
        assert!(sylvester_residual(&a, &f, &cc, &x) < 1e-12);
    }

    #[test]
    fn gsyl_zero_parameter_gives_zero() {
        let mut rng = randomize_tests_rng(5);
        let a =
            Bimatrix::new(mat::random_c(&mut rng, 2, 2), mat::random_c(&mut rng, 2, 2)).unwrap();
        let b =
            Bimatrix::new(mat::random_c(&mut rng, 2, 1), mat::random_c(&mut rng, 2, 1)).unwrap();
        let sys = SystemModel::new(a, b, TimeDomain::Continuous, Structure::General).unwrap();
        if !sys.is_controllable() {
            return;
        }
        let cf = coprime_factorization(&sys).unwrap();
        let f = Bimatrix::identity(2);
        let sol = solve_gsyl(&sys, &f, &cf, &CMat::zeros(1, 2), &CMat::zeros(1, 2)).unwrap();
        assert_eq!(sol.x.norm(), 0.0);
        assert_eq!(sol.y.norm(), 0.0);
        assert!(!sol.nonsingular_x);
    }

    #[test]
    fn gsyl_normal_system_z2_zero_keeps_second_components_zero() {
        let mut rng = randomize_tests_rng(7);
        let a = Bimatrix::from_linear(mat::random_c(&mut rng, 3, 3));
        let b = Bimatrix::from_linear(mat::random_c(&mut rng, 3, 1));
        let sys = SystemModel::new(a, b, TimeDomain::Continuous, Structure::Normal).unwrap();
        let cf = coprime_factorization(&sys).unwrap();
        // F2 = 0 target
        let f = Bimatrix::from_linear(mat::random_c(&mut rng, 3, 3));
        let z1 = mat::random_c(&mut rng, 1, 3);
        let sol = solve_gsyl(&sys, &f, &cf, &z1, &CMat::zeros(1, 3)).unwrap();
        assert_eq!(mat::frob(sol.x.p2()), 0.0);
        assert_eq!(mat::frob(sol.y.p2()), 0.0);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn gsyl_decoupled_one_sided() {
        let mut rng = randomize_tests_rng(11);
        let a =
            Bimatrix::new(mat::random_c(&mut rng, 2, 2), mat::random_c(&mut rng, 2, 2)).unwrap();
        let b =
            Bimatrix::new(mat::random_c(&mut rng, 2, 1), mat::random_c(&mut rng, 2, 1)).unwrap();
        let sys = SystemModel::new(a, b, TimeDomain::Continuous, Structure::General).unwrap();
        if !sys.is_controllable() {
            return;
        }
        let cf = coprime_factorization(&sys).unwrap();
        let f11 = mat::random_r(&mut rng, 2, 2);
        let f22 = mat::random_r(&mut rng, 2, 2);
        let zp = mat::random_c(&mut rng, 1, 2);
        let sol = solve_gsyl_decoupled(&sys, &f11, &f22, &cf, &zp, &CMat::zeros(1, 2)).unwrap();
        // z_minus = 0 → X- = 0, Y- = 0 and X1 = conj(X2)
        assert_eq!(mat::frob(&sol.x_minus), 0.0);
        assert_eq!(mat::frob(&sol.y_minus), 0.0);
        let d = mat::frob(&(sol.assembled.x.p1() - mat::conj(sol.assembled.x.p2())));
        assert!(d < 1e-14, "X1 = conj(X2) structure violated: {d}");
        assert!(sol.residual_plus < 1e-10);
    }

    #[test]
    fn gsyl_decoupled_simplified_matches_general() {
        let mut rng = randomize_tests_rng(13);
        let a =
            Bimatrix::new(mat::random_c(&mut rng, 3, 3), mat::random_c(&mut rng, 3, 3)).unwrap();
        let b =
            Bimatrix::new(mat::random_c(&mut rng, 3, 2), mat::random_c(&mut rng, 3, 2)).unwrap();
        let sys = SystemModel::new(a, b, TimeDomain::Continuous, Structure::General).unwrap();
        if !sys.is_controllable() {
            return;
        }
        let cf = coprime_factorization(&sys).unwrap();
        let f11 = mat::random_r(&mut rng, 2, 2);
        let f22 = mat::random_r(&mut rng, 2, 2);
        // real parameters through the simplified path
        let zp_real = mat::random_r(&mut rng, 2, 2);
        let zm_real = mat::random_r(&mut rng, 2, 2);
        let zp = zp_real.map(|x| c(x, 0.0));
        let zm = zm_real.map(|x| c(x, 0.0));
        let simplified = solve_gsyl_decoupled(&sys, &f11, &f22, &cf, &zp, &zm).unwrap();
        // nudge the imaginary part below roundoff to force the general path
        let eps = 1e-200;
        let zp_g = zp.map(|z| z + c(0.0, eps));
        let zm_g = zm.map(|z| z + c(0.0, eps));
        let general = solve_gsyl_decoupled(&sys, &f11, &f22, &cf, &zp_g, &zm_g).unwrap();
        let dx = mat::frob(&(&simplified.x_plus - &general.x_plus));
        let dy = mat::frob(&(&simplified.y_minus - &general.y_minus));
        assert!(dx < 1e-12 && dy < 1e-12, "dual formula mismatch {dx} {dy}");
    }

    #[test]
    fn sylvester_scalar_and_assumption1() {
        // scalar: a={2,0}, f={0,0}, c={1,0} → X = {1/2, 0}
        let x = solve_sylvester(
            &scalar(c(2.0, 0.0), c(0.0, 0.0)),
            &Bimatrix::zeros(1, 1),
            &scalar(c(1.0, 0.0), c(0.0, 0.0)),
        )
        .unwrap();
        assert!((x.p1()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);

        // Assumption-1 instance: A2=F2=C2=0 → X2 = 0 and X1 solves the
        // ordinary Sylvester equation
        let mut rng = randomize_tests_rng(17);
        let a1 = mat::random_c(&mut rng, 3, 3);
        let f1 = mat::random_c(&mut rng, 2, 2).map(|z| z + c(10.0, 0.0));
        let c1 = mat::random_c(&mut rng, 3, 2);
        let x = solve_sylvester(
            &Bimatrix::from_linear(a1.clone()),
            &Bimatrix::from_linear(f1.clone()),
            &Bimatrix::from_linear(c1.clone()),
        )
        .unwrap();
        assert!(mat::frob(x.p2()) < 1e-9, "X2 must vanish");
        let resid = mat::frob(&(&a1 * x.p1() - x.p1() * &f1 - &c1));
        assert!(resid < 1e-8);
    }

    #[test]
    fn sylvester_rejects_intersecting_spectra() {
        // A = F = {1,0}: spectra coincide
        let one = scalar(c(1.0, 0.0), c(0.0, 0.0));
        match solve_sylvester(&one, &one, &one) {
            Err(BimatError::NoUniqueSolution { margin, .. }) => assert!(margin < 1e-8),
            other => panic!("expected no-unique-solution, got {other:?}"),
        }
    }

    #[test]
    fn sylvester_dk_recursion_matches_direct() {
        let mut rng = randomize_tests_rng(19);
        let a =
            Bimatrix::new(mat::random_c(&mut rng, 2, 2), mat::random_c(&mut rng, 2, 2)).unwrap();
        let f =
            Bimatrix::new(mat::random_c(&mut rng, 2, 2), mat::random_c(&mut rng, 2, 2)).unwrap();
        let cc =
            Bimatrix::new(mat::random_c(&mut rng, 2, 2), mat::random_c(&mut rng, 2, 2)).unwrap();
        let direct = sylvester_dk_direct(&a, &f, &cc, 5).unwrap();
        let rec = sylvester_dk_recursive(&a, &f, &cc, 5).unwrap();
        for (d, r) in direct.iter().zip(rec.iter()) {
            let rel = d.sub(r).unwrap().norm() / d.norm().max(1.0);
            assert!(rel < 1e-12);
        }
        let sd = stein_dk_direct(&a, &f, &cc, 5).unwrap();
        let sr = stein_dk_recursive(&a, &f, &cc, 5).unwrap();
        for (d, r) in sd.iter().zip(sr.iter()) {
            let rel = d.sub(r).unwrap().norm() / d.norm().max(1.0);
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn lyapunov_ct_scalar_and_positivity() {
        // a = {-I, 0}, q = {I, 0} → P = {I/2, 0}
        let a = Bimatrix::from_linear(-CMat::identity(2, 2));
        let q = Bimatrix::identity(2);
        let p = solve_lyapunov_ct(&a, &q).unwrap();
        let expect = Bimatrix::from_linear(CMat::identity(2, 2).map(|z| z * 0.5));
        assert!(p.sub(&expect).unwrap().norm() < 1e-12);

        // stable random a: P > 0 for Q = {I,0}
        let mut rng = randomize_tests_rng(23);
        let raw =
            Bimatrix::new(mat::random_c(&mut rng, 3, 3), mat::random_c(&mut rng, 3, 3)).unwrap();
        let mu = raw.spectrum().unwrap().mu;
        let a = raw
            .sub(&Bimatrix::from_linear(
                CMat::identity(3, 3).map(|z| z * (mu + 0.5)),
            ))
            .unwrap();
        let p = solve_lyapunov_ct(&a, &Bimatrix::identity(3)).unwrap();
        assert!(p.is_positive_definite());
    }

    #[test]
    fn lyapunov_ct_rejects_unstable() {
        let a = Bimatrix::identity(2);
        assert!(matches!(
            solve_lyapunov_ct(&a, &Bimatrix::identity(2)),
            Err(BimatError::Precondition(_))
        ));
    }

    #[test]
    fn lyapunov_dt_scalar_geometric() {
        // a = {0,0} → P = Q
        let q = Bimatrix::identity(2);
        let p = solve_lyapunov_dt(&Bimatrix::zeros(2, 2), &q).unwrap();
        assert!(p.sub(&q).unwrap().norm() < 1e-13);

        // a = {I/2, 0}, q = {I,0} → P = 4/3·I (geometric series)
        let a = Bimatrix::from_linear(CMat::identity(2, 2).map(|z| z * 0.5));
        let p = solve_lyapunov_dt(&a, &q).unwrap();
        let expect = Bimatrix::from_linear(CMat::identity(2, 2).map(|z| z * (4.0 / 3.0)));
        // truncation certifies the tail below 1e-12 of the accumulated sum
        assert!(p.sub(&expect).unwrap().norm() < 1e-11 * expect.norm());
    }

    #[test]
    fn stein_scalar_examples() {
        // a = {0,0} → X == C
        let cc = scalar(c(0.7, 0.2), c(-0.3, 0.5));
        let f = scalar(c(0.4, 0.0), c(0.1, 0.0));
        let x = solve_stein(&Bimatrix::zeros(1, 1), &f, &cc).unwrap();
        assert!(x.sub(&cc).unwrap().norm() < 1e-12);
    }

    #[test]
    fn stein_assumption1_reduces() {
        let mut rng = randomize_tests_rng(29);
        let a1 = mat::random_c(&mut rng, 2, 2).map(|z| z * 0.4);
        let f1 = mat::random_c(&mut rng, 2, 2).map(|z| z * 0.4);
        let c1 = mat::random_c(&mut rng, 2, 2);
        let x = solve_stein(
            &Bimatrix::from_linear(a1.clone()),
            &Bimatrix::from_linear(f1.clone()),
            &Bimatrix::from_linear(c1.clone()),
        )
        .unwrap();
        assert!(mat::frob(x.p2()) < 1e-9);
        let resid = mat::frob(&(x.p1() - &a1 * x.p1() * &f1 - &c1));
        assert!(resid < 1e-9);
    }

    #[test]
    fn conjugate_sylvester_scalar() {
        // a2=2, f2=0, c2=2 → X = 1
        let a2 = CMat::from_element(1, 1, c(2.0, 0.0));
        let f2 = CMat::zeros(1, 1);
        let c2 = CMat::from_element(1, 1, c(2.0, 0.0));
        let x = solve_conjugate_sylvester(&a2, &f2, &c2).unwrap();
        assert!((x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conjugate_stein_scalar_fixed_point() {
        // a2 = f2 = 1/2, c2 = 1 → X = 4/3
        let a2 = CMat::from_element(1, 1, c(0.5, 0.0));
        let f2 = CMat::from_element(1, 1, c(0.5, 0.0));
        let c2 = CMat::from_element(1, 1, c(1.0, 0.0));
        let x = solve_conjugate_stein(&a2, &f2, &c2).unwrap();
        assert!((x[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-12);
        let xs = conjugate_stein_series(&a2, &f2, &c2).unwrap();
        assert!((xs[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn antilinear_anti_preserve_z2_zero_is_normal_feedback() {
        // Z2 = 0 → X2 = 0, Y2 = 0: the gain reduces to normal state feedback
        let mut rng = randomize_tests_rng(31);
        for _ in 0..8 {
            let a = Bimatrix::from_antilinear(mat::random_c(&mut rng, 2, 2));
            let b = Bimatrix::from_antilinear(mat::random_c(&mut rng, 2, 1));
            let sys = SystemModel::new(a, b, TimeDomain::Discrete, Structure::Antilinear).unwrap();
            if !sys.is_controllable() {
                continue;
            }
            let cf = crate::poly::anti_coprime_factorization(&sys).unwrap();
            let f2 = mat::random_r(&mut rng, 2, 2).map(|x| c(0.3 * x, 0.0));
            let z1 = mat::random_c(&mut rng, 1, 2);
            let sol = solve_antilinear(
                &sys,
                &AntiMode::AntiPreserve { f2 },
                &cf,
                &z1,
                &CMat::zeros(1, 2),
            )
            .unwrap();
            assert_eq!(mat::frob(sol.x.p2()), 0.0);
            assert_eq!(mat::frob(sol.y.p2()), 0.0);
            assert!(sol.residual < 1e-9);
            return;
        }
        panic!("no controllable antilinear draw");
    }

    #[test]
    fn antilinear_normalize_scalar_plant() {
        // scalar antilinear A2 = 1, B2 = 1: residual of the normalization
        // equations vanishes
        let sys = SystemModel::new(
            Bimatrix::from_antilinear(CMat::from_element(1, 1, c(1.0, 0.0))),
            Bimatrix::from_antilinear(CMat::from_element(1, 1, c(1.0, 0.0))),
            TimeDomain::Discrete,
            Structure::Antilinear,
        )
        .unwrap();
        let cf = crate::poly::anti_coprime_factorization(&sys).unwrap();
        let f1 = CMat::from_element(1, 1, c(0.5, 0.0));
        let mut rng = randomize_tests_rng(37);
        let z1 = mat::random_c(&mut rng, 1, 1);
        let z2 = mat::random_c(&mut rng, 1, 1);
        let sol = solve_antilinear(&sys, &AntiMode::Normalize { f1 }, &cf, &z1, &z2).unwrap();
        assert!(sol.residual < 1e-12, "residual {}", sol.residual);
    }

    #[test]
    fn bartels_stewart_random_residual() {
        let mut rng = randomize_tests_rng(41);
        for _ in 0..10 {
            let a = mat::random_r(&mut rng, 5, 5);
            let b = mat::random_r(&mut rng, 4, 4);
            let cc = mat::random_r(&mut rng, 5, 4);
            match bartels_stewart(&a, &b, &cc) {
                Ok(x) => {
                    let resid = mat::frob_r(&(&a * &x + &x * &b - &cc))
                        / (mat::frob_r(&x) + mat::frob_r(&cc)).max(1.0);
                    assert!(resid < 1e-11, "residual {resid}");
                }
                Err(BimatError::NoUniqueSolution { .. }) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}
