//! JSON schemas for problems, designs and reports, plus a deterministic
//! emitter.
//!
//! Wire conventions: a complex scalar is a two-element array `[re, im]`, a
//! complex matrix is a row-major nested array of those, a bimatrix is
//! `{"p1": matrix, "p2": matrix}`, and a polynomial bimatrix is
//! `{"coeffs": [bimatrix, ...]}` lowest degree first. Reports embed the
//! problem they were produced from so they can be re-verified later.
//!
//! Emission is byte-deterministic: object keys are sorted, floats are
//! printed with 17 significant digits in scientific notation (enough for
//! exact f64 round-trips), and the text layout is fixed.

use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::assign::{
    self, InputMode, SecondOrderModel, SpectrumMode, Structure, SystemModel, TargetSpectrum,
    TimeDomain, ZChoice,
};
use crate::bimatrix::Bimatrix;
use crate::error::BimatError;
use crate::mat::{self, CMat, RMat};
use crate::solve;

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

pub fn complex_to_value(z: Complex64) -> Value {
    Value::Array(vec![Value::from(z.re), Value::from(z.im)])
}

pub fn cmat_to_value(m: &CMat) -> Value {
    let rows = (0..m.nrows())
        .map(|i| {
            Value::Array(
                (0..m.ncols())
                    .map(|j| complex_to_value(m[(i, j)]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

pub fn rmat_to_value(m: &RMat) -> Value {
    let rows = (0..m.nrows())
        .map(|i| Value::Array((0..m.ncols()).map(|j| Value::from(m[(i, j)])).collect()))
        .collect();
    Value::Array(rows)
}

pub fn bimatrix_to_value(b: &Bimatrix) -> Value {
    let mut o = Map::new();
    o.insert("p1".into(), cmat_to_value(b.p1()));
    o.insert("p2".into(), cmat_to_value(b.p2()));
    Value::Object(o)
}

pub fn spectrum_to_value(eigs: &[Complex64]) -> Value {
    let mut sorted: Vec<Complex64> = eigs.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Value::Array(sorted.into_iter().map(complex_to_value).collect())
}

pub fn poly_bimatrix_to_value(p: &crate::poly::PolyBimatrix) -> Value {
    let mut o = Map::new();
    o.insert(
        "coeffs".into(),
        Value::Array(p.coeffs.iter().map(bimatrix_to_value).collect()),
    );
    Value::Object(o)
}

pub fn coprime_report_to_value(r: &crate::poly::CoprimeReport) -> Value {
    let mut o = Map::new();
    o.insert("pass".into(), Value::Bool(r.pass));
    o.insert(
        "failures".into(),
        Value::Array(r.failures.iter().map(|&z| complex_to_value(z)).collect()),
    );
    o.insert("residual".into(), Value::from(r.residual));
    o.insert("min_sv_ratio".into(), Value::from(r.min_sv_ratio));
    o.insert("padded".into(), Value::Bool(r.padded));
    Value::Object(o)
}

// ---------------------------------------------------------------------------
// Decoding (with location-carrying errors)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at {}: {}", self.path, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        path: path.to_string(),
        message: message.into(),
    })
}

pub fn complex_from_value(v: &Value, path: &str) -> Result<Complex64, ParseError> {
    let arr = match v.as_array() {
        Some(a) if a.len() == 2 => a,
        _ => return err(path, "complex scalar must be a two-element array [re, im]"),
    };
    let re = arr[0].as_f64().ok_or_else(|| ParseError {
        path: format!("{path}[0]"),
        message: "expected a number".into(),
    })?;
    let im = arr[1].as_f64().ok_or_else(|| ParseError {
        path: format!("{path}[1]"),
        message: "expected a number".into(),
    })?;
    Ok(Complex64::new(re, im))
}

pub fn cmat_from_value(v: &Value, path: &str) -> Result<CMat, ParseError> {
    let rows = match v.as_array() {
        Some(r) if !r.is_empty() => r,
        _ => return err(path, "expected a non-empty array of rows"),
    };
    let mut data: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let cols = match row.as_array() {
            Some(c) if !c.is_empty() => c,
            _ => return err(&format!("{path}[{i}]"), "expected a non-empty row array"),
        };
        let mut out = Vec::with_capacity(cols.len());
        for (j, cell) in cols.iter().enumerate() {
            out.push(complex_from_value(cell, &format!("{path}[{i}][{j}]"))?);
        }
        data.push(out);
    }
    let ncols = data[0].len();
    if data.iter().any(|r| r.len() != ncols) {
        return err(path, "rows have inconsistent lengths");
    }
    Ok(CMat::from_fn(data.len(), ncols, |i, j| data[i][j]))
}

pub fn rmat_from_value(v: &Value, path: &str) -> Result<RMat, ParseError> {
    let rows = match v.as_array() {
        Some(r) if !r.is_empty() => r,
        _ => return err(path, "expected a non-empty array of rows"),
    };
    let mut data: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let cols = match row.as_array() {
            Some(c) if !c.is_empty() => c,
            _ => return err(&format!("{path}[{i}]"), "expected a non-empty row array"),
        };
        let mut out = Vec::with_capacity(cols.len());
        for (j, cell) in cols.iter().enumerate() {
            match cell.as_f64() {
                Some(x) => out.push(x),
                None => return err(&format!("{path}[{i}][{j}]"), "expected a number"),
            }
        }
        data.push(out);
    }
    let ncols = data[0].len();
    if data.iter().any(|r| r.len() != ncols) {
        return err(path, "rows have inconsistent lengths");
    }
    Ok(RMat::from_fn(data.len(), ncols, |i, j| data[i][j]))
}

pub fn bimatrix_from_value(v: &Value, path: &str) -> Result<Bimatrix, ParseError> {
    let obj = match v.as_object() {
        Some(o) => o,
        None => {
            return err(
                path,
                "bimatrix must be an object {\"p1\": ..., \"p2\": ...}",
            )
        }
    };
    let p1 = cmat_from_value(
        obj.get("p1").ok_or_else(|| ParseError {
            path: path.to_string(),
            message: "missing field p1".into(),
        })?,
        &format!("{path}.p1"),
    )?;
    let p2 = cmat_from_value(
        obj.get("p2").ok_or_else(|| ParseError {
            path: path.to_string(),
            message: "missing field p2".into(),
        })?,
        &format!("{path}.p2"),
    )?;
    Bimatrix::new(p1, p2).map_err(|e| ParseError {
        path: path.to_string(),
        message: e.to_string(),
    })
}

pub fn poly_bimatrix_from_value(
    v: &Value,
    path: &str,
) -> Result<crate::poly::PolyBimatrix, ParseError> {
    let obj = match v.as_object() {
        Some(o) => o,
        None => return err(path, "polynomial bimatrix must be an object with coeffs"),
    };
    let coeffs = match obj.get("coeffs").and_then(|c| c.as_array()) {
        Some(c) if !c.is_empty() => c,
        _ => {
            return err(
                path,
                "coeffs must be a non-empty array, lowest degree first",
            )
        }
    };
    let parsed = coeffs
        .iter()
        .enumerate()
        .map(|(i, b)| bimatrix_from_value(b, &format!("{path}.coeffs[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    crate::poly::PolyBimatrix::new(parsed).map_err(|e| ParseError {
        path: path.to_string(),
        message: e.to_string(),
    })
}

pub fn system_from_value(v: &Value, path: &str) -> Result<SystemModel, ParseError> {
    let obj = match v.as_object() {
        Some(o) => o,
        None => return err(path, "system must be an object"),
    };
    let a = bimatrix_from_value(
        obj.get("a").ok_or_else(|| ParseError {
            path: path.to_string(),
            message: "missing field a".into(),
        })?,
        &format!("{path}.a"),
    )?;
    let b = bimatrix_from_value(
        obj.get("b").ok_or_else(|| ParseError {
            path: path.to_string(),
            message: "missing field b".into(),
        })?,
        &format!("{path}.b"),
    )?;
    let td = match obj.get("time_domain").and_then(|v| v.as_str()) {
        None | Some("continuous") => TimeDomain::Continuous,
        Some("discrete") => TimeDomain::Discrete,
        Some(other) => {
            return err(
                &format!("{path}.time_domain"),
                format!("unknown time domain {other:?}"),
            )
        }
    };
    let result = match obj.get("structure").and_then(|v| v.as_str()) {
        None => SystemModel::detect(a, b, td),
        Some("general") => SystemModel::new(a, b, td, Structure::General),
        Some("normal") => SystemModel::new(a, b, td, Structure::Normal),
        Some("antilinear") => SystemModel::new(a, b, td, Structure::Antilinear),
        Some(other) => {
            return err(
                &format!("{path}.structure"),
                format!("unknown structure {other:?}"),
            )
        }
    };
    result.map_err(|e| ParseError {
        path: path.to_string(),
        message: e.to_string(),
    })
}

pub fn system_to_value(sys: &SystemModel) -> Value {
    let mut o = Map::new();
    o.insert("a".into(), bimatrix_to_value(&sys.a));
    o.insert("b".into(), bimatrix_to_value(&sys.b));
    o.insert(
        "time_domain".into(),
        Value::String(
            match sys.time_domain {
                TimeDomain::Continuous => "continuous",
                TimeDomain::Discrete => "discrete",
            }
            .into(),
        ),
    );
    o.insert(
        "structure".into(),
        Value::String(
            match sys.structure {
                Structure::General => "general",
                Structure::Normal => "normal",
                Structure::Antilinear => "antilinear",
            }
            .into(),
        ),
    );
    Value::Object(o)
}

pub fn second_order_from_value(
    v: &Value,
    path: &str,
) -> Result<(SecondOrderModel, InputMode), ParseError> {
    let obj = match v.as_object() {
        Some(o) => o,
        None => return err(path, "second_order must be an object"),
    };
    let field = |name: &str| -> Result<RMat, ParseError> {
        rmat_from_value(
            obj.get(name).ok_or_else(|| ParseError {
                path: path.to_string(),
                message: format!("missing field {name}"),
            })?,
            &format!("{path}.{name}"),
        )
    };
    let model = SecondOrderModel::new(
        field("mass")?,
        field("damping")?,
        field("stiffness")?,
        field("input")?,
    )
    .map_err(|e| ParseError {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let mode = match obj.get("input_mode").and_then(|v| v.as_str()) {
        None | Some("paired") => InputMode::Paired,
        Some("padded") => InputMode::Padded,
        Some(other) => {
            return err(
                &format!("{path}.input_mode"),
                format!("unknown input mode {other:?}"),
            )
        }
    };
    Ok((model, mode))
}

// ---------------------------------------------------------------------------
// Problem dispatch (the `solve` verb)
// ---------------------------------------------------------------------------

/// Solve an equation problem given as parsed JSON; returns the report value.
pub fn solve_problem(v: &Value, seed: u64) -> Result<Value, BimatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| BimatError::InvalidInput("problem must be a JSON object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| BimatError::InvalidInput("missing string field kind".into()))?;

    let get_bimatrix = |name: &str| -> Result<Bimatrix, BimatError> {
        let val = obj.get(name).ok_or_else(|| {
            BimatError::InvalidInput(format!("missing field {name} for kind {kind}"))
        })?;
        bimatrix_from_value(val, name).map_err(|e| BimatError::InvalidInput(e.to_string()))
    };
    let get_cmat = |name: &str| -> Result<CMat, BimatError> {
        let val = obj.get(name).ok_or_else(|| {
            BimatError::InvalidInput(format!("missing field {name} for kind {kind}"))
        })?;
        cmat_from_value(val, name).map_err(|e| BimatError::InvalidInput(e.to_string()))
    };

    let mut report = Map::new();
    report.insert("kind".into(), Value::String(kind.into()));
    report.insert("problem".into(), v.clone());

    match kind {
        "sylvester" => {
            let (a, f, c) = (get_bimatrix("a")?, get_bimatrix("f")?, get_bimatrix("c")?);
            let (x, cond) = solve::solve_sylvester_full(&a, &f, &c)?;
            report.insert("solution".into(), bimatrix_to_value(&x));
            report.insert(
                "residual".into(),
                Value::from(solve::sylvester_residual(&a, &f, &c, &x)),
            );
            report.insert("prefactor_condition".into(), Value::from(cond));
        }
        "stein" => {
            let (a, f, c) = (get_bimatrix("a")?, get_bimatrix("f")?, get_bimatrix("c")?);
            let (x, cond) = solve::solve_stein_full(&a, &f, &c)?;
            report.insert("solution".into(), bimatrix_to_value(&x));
            report.insert(
                "residual".into(),
                Value::from(solve::stein_residual(&a, &f, &c, &x)),
            );
            report.insert("prefactor_condition".into(), Value::from(cond));
        }
        "lyapunov_ct" => {
            let (a, q) = (get_bimatrix("a")?, get_bimatrix("q")?);
            let p = solve::solve_lyapunov_ct(&a, &q)?;
            let resid = lyapunov_ct_residual(&a, &q, &p);
            report.insert("solution".into(), bimatrix_to_value(&p));
            report.insert("residual".into(), Value::from(resid));
            report.insert(
                "positive_definite".into(),
                Value::Bool(p.is_positive_definite()),
            );
        }
        "lyapunov_dt" => {
            let (a, q) = (get_bimatrix("a")?, get_bimatrix("q")?);
            let p = solve::solve_lyapunov_dt(&a, &q)?;
            let resid = lyapunov_dt_residual(&a, &q, &p);
            report.insert("solution".into(), bimatrix_to_value(&p));
            report.insert("residual".into(), Value::from(resid));
            report.insert(
                "positive_definite".into(),
                Value::Bool(p.is_positive_definite()),
            );
        }
        "conj_sylvester" => {
            let (a2, f2, c2) = (get_cmat("a2")?, get_cmat("f2")?, get_cmat("c2")?);
            let x = solve::solve_conjugate_sylvester(&a2, &f2, &c2)?;
            let resid = conj_sylvester_residual(&a2, &f2, &c2, &x);
            report.insert("solution".into(), cmat_to_value(&x));
            report.insert("residual".into(), Value::from(resid));
        }
        "conj_stein" => {
            let (a2, f2, c2) = (get_cmat("a2")?, get_cmat("f2")?, get_cmat("c2")?);
            let x = solve::solve_conjugate_stein(&a2, &f2, &c2)?;
            let resid = conj_stein_residual(&a2, &f2, &c2, &x);
            report.insert("solution".into(), cmat_to_value(&x));
            report.insert("residual".into(), Value::from(resid));
        }
        "gsyl" => {
            let sys = system_from_value(
                obj.get("system")
                    .ok_or_else(|| BimatError::InvalidInput("gsyl needs a system field".into()))?,
                "system",
            )
            .map_err(|e| BimatError::InvalidInput(e.to_string()))?;
            let f = get_bimatrix("f")?;
            let m = sys.input_dim();
            let p = f.nrows();
            let (z1, z2) = match (obj.get("Z1"), obj.get("Z2")) {
                (Some(z1), Some(z2)) => (
                    cmat_from_value(z1, "Z1")
                        .map_err(|e| BimatError::InvalidInput(e.to_string()))?,
                    cmat_from_value(z2, "Z2")
                        .map_err(|e| BimatError::InvalidInput(e.to_string()))?,
                ),
                _ => {
                    let mut rng = mat::randomize_tests_rng(seed);
                    (mat::random_c(&mut rng, m, p), mat::random_c(&mut rng, m, p))
                }
            };
            let cf = crate::poly::coprime_factorization(&sys)?;
            let sol = solve::solve_gsyl(&sys, &f, &cf, &z1, &z2)?;
            let mut s = Map::new();
            s.insert("x".into(), bimatrix_to_value(&sol.x));
            s.insert("y".into(), bimatrix_to_value(&sol.y));
            report.insert("solution".into(), Value::Object(s));
            report.insert("residual".into(), Value::from(sol.residual));
            report.insert("nonsingular_x".into(), Value::Bool(sol.nonsingular_x));
            report.insert("z1_used".into(), cmat_to_value(&z1));
            report.insert("z2_used".into(), cmat_to_value(&z2));
            report.insert(
                "factorization_report".into(),
                coprime_report_to_value(&cf.report),
            );
        }
        other => {
            return Err(BimatError::InvalidInput(format!(
                "unknown problem kind {other:?}"
            )))
        }
    }
    Ok(Value::Object(report))
}

pub fn lyapunov_ct_residual(a: &Bimatrix, q: &Bimatrix, p: &Bimatrix) -> f64 {
    let lhs = a
        .adjoint()
        .multiply(p)
        .unwrap()
        .add(&p.multiply(a).unwrap())
        .unwrap();
    lhs.add(q).unwrap().norm() / (p.norm() + q.norm()).max(1.0)
}

pub fn lyapunov_dt_residual(a: &Bimatrix, q: &Bimatrix, p: &Bimatrix) -> f64 {
    let rhs = a
        .adjoint()
        .multiply(p)
        .unwrap()
        .multiply(a)
        .unwrap()
        .add(q)
        .unwrap();
    p.sub(&rhs).unwrap().norm() / (p.norm() + q.norm()).max(1.0)
}

pub fn conj_sylvester_residual(a2: &CMat, f2: &CMat, c2: &CMat, x: &CMat) -> f64 {
    mat::frob(&(mat::conj(a2) * x - mat::conj(x) * f2 - c2))
        / (mat::frob(c2) + mat::frob(x)).max(1.0)
}

pub fn conj_stein_residual(a2: &CMat, f2: &CMat, c2: &CMat, x: &CMat) -> f64 {
    mat::frob(&(x - a2 * mat::conj(x) * f2 - c2)) / (mat::frob(c2) + mat::frob(x)).max(1.0)
}

// ---------------------------------------------------------------------------
// Design dispatch (the `assign` verb)
// ---------------------------------------------------------------------------

/// Run the pole assignment pipeline on a parsed design request.
pub fn run_design(v: &Value, default_seed: u64) -> Result<Value, BimatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| BimatError::InvalidInput("design request must be an object".into()))?;
    let sys_val = obj
        .get("system")
        .ok_or_else(|| BimatError::InvalidInput("missing field system".into()))?;
    let sys = if let Some(so) = sys_val.get("second_order") {
        let (model, mode) = second_order_from_value(so, "system.second_order")
            .map_err(|e| BimatError::InvalidInput(e.to_string()))?;
        assign::second_order_to_complex(&model, mode)?
    } else {
        system_from_value(sys_val, "system").map_err(|e| BimatError::InvalidInput(e.to_string()))?
    };

    let target_val = obj
        .get("target")
        .ok_or_else(|| BimatError::InvalidInput("missing field target".into()))?;
    let tobj = target_val
        .as_object()
        .ok_or_else(|| BimatError::InvalidInput("target must be an object".into()))?;
    let mode = match tobj.get("mode").and_then(|m| m.as_str()) {
        None | Some("general") => SpectrumMode::General,
        Some("normalize") => SpectrumMode::Normalize,
        Some("anti_preserve") => SpectrumMode::AntiPreserve,
        Some(other) => {
            return Err(BimatError::InvalidInput(format!(
                "unknown target mode {other:?}"
            )))
        }
    };
    let target: TargetSpectrum = if let Some(g) = tobj.get("gamma") {
        let arr = g
            .as_array()
            .ok_or_else(|| BimatError::InvalidInput("target.gamma must be an array".into()))?;
        let mut gamma = Vec::with_capacity(arr.len());
        for (i, z) in arr.iter().enumerate() {
            gamma.push(
                complex_from_value(z, &format!("target.gamma[{i}]"))
                    .map_err(|e| BimatError::InvalidInput(e.to_string()))?,
            );
        }
        assign::build_target(&gamma, mode, sys.time_domain)?
    } else if let Some(fv) = tobj.get("f_real") {
        let f = rmat_from_value(fv, "target.f_real")
            .map_err(|e| BimatError::InvalidInput(e.to_string()))?;
        assign::target_from_f_real(&f, mode, sys.time_domain)?
    } else {
        return Err(BimatError::InvalidInput(
            "target needs either gamma or f_real".into(),
        ));
    };

    let seed = obj
        .get("seed")
        .and_then(|s| s.as_u64())
        .unwrap_or(default_seed);
    let z = match (obj.get("z1"), obj.get("z2")) {
        (Some(z1), Some(z2)) => ZChoice::Explicit(
            cmat_from_value(z1, "z1").map_err(|e| BimatError::InvalidInput(e.to_string()))?,
            cmat_from_value(z2, "z2").map_err(|e| BimatError::InvalidInput(e.to_string()))?,
        ),
        _ => ZChoice::Seed(seed),
    };

    let design = assign::assign_poles(&sys, &target, z)?;
    Ok(design_report_value(v, &sys, &target, &design))
}

pub fn design_report_value(
    request: &Value,
    sys: &SystemModel,
    target: &TargetSpectrum,
    design: &assign::FeedbackDesign,
) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), Value::String("design".into()));
    o.insert("request".into(), request.clone());
    o.insert("system".into(), system_to_value(sys));
    o.insert("k".into(), bimatrix_to_value(&design.k));
    o.insert("real_gain".into(), rmat_to_value(&design.real_gain));
    o.insert("transform_x".into(), bimatrix_to_value(&design.x));
    o.insert("f_real".into(), rmat_to_value(&target.f_real));
    o.insert(
        "target_spectrum".into(),
        spectrum_to_value(&target.gamma_set),
    );
    o.insert(
        "achieved_spectrum".into(),
        spectrum_to_value(&design.report.closed_spectrum),
    );
    let mut r = Map::new();
    r.insert(
        "spectrum_defect".into(),
        Value::from(design.report.spectrum_defect),
    );
    r.insert(
        "similarity".into(),
        Value::from(design.report.similarity_residual),
    );
    r.insert("gsyl".into(), Value::from(design.report.gsyl_residual));
    o.insert("residuals".into(), Value::Object(r));
    o.insert("x_condition".into(), Value::from(design.report.x_condition));
    o.insert("retries".into(), Value::from(design.report.retries as u64));
    Value::Object(o)
}

// ---------------------------------------------------------------------------
// Verification of stored reports (the `verify` verb)
// ---------------------------------------------------------------------------

/// Re-check a stored report: recompute residuals/spectra from the embedded
/// problem and solution. Returns the worst residual found.
pub fn verify_report(v: &Value) -> Result<f64, BimatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| BimatError::InvalidInput("report must be an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| BimatError::InvalidInput("report missing kind".into()))?;
    let get = |name: &str| -> Result<&Value, BimatError> {
        obj.get(name)
            .ok_or_else(|| BimatError::InvalidInput(format!("report missing field {name}")))
    };
    let pe = |e: ParseError| BimatError::InvalidInput(e.to_string());

    match kind {
        "sylvester" | "stein" => {
            let prob = get("problem")?;
            let a = bimatrix_from_value(&prob["a"], "problem.a").map_err(pe)?;
            let f = bimatrix_from_value(&prob["f"], "problem.f").map_err(pe)?;
            let c = bimatrix_from_value(&prob["c"], "problem.c").map_err(pe)?;
            let x = bimatrix_from_value(get("solution")?, "solution").map_err(pe)?;
            Ok(if kind == "sylvester" {
                solve::sylvester_residual(&a, &f, &c, &x)
            } else {
                solve::stein_residual(&a, &f, &c, &x)
            })
        }
        "lyapunov_ct" | "lyapunov_dt" => {
            let prob = get("problem")?;
            let a = bimatrix_from_value(&prob["a"], "problem.a").map_err(pe)?;
            let q = bimatrix_from_value(&prob["q"], "problem.q").map_err(pe)?;
            let p = bimatrix_from_value(get("solution")?, "solution").map_err(pe)?;
            Ok(if kind == "lyapunov_ct" {
                lyapunov_ct_residual(&a, &q, &p)
            } else {
                lyapunov_dt_residual(&a, &q, &p)
            })
        }
        "conj_sylvester" | "conj_stein" => {
            let prob = get("problem")?;
            let a2 = cmat_from_value(&prob["a2"], "problem.a2").map_err(pe)?;
            let f2 = cmat_from_value(&prob["f2"], "problem.f2").map_err(pe)?;
            let c2 = cmat_from_value(&prob["c2"], "problem.c2").map_err(pe)?;
            let x = cmat_from_value(get("solution")?, "solution").map_err(pe)?;
            Ok(if kind == "conj_sylvester" {
                conj_sylvester_residual(&a2, &f2, &c2, &x)
            } else {
                conj_stein_residual(&a2, &f2, &c2, &x)
            })
        }
        "gsyl" => {
            let prob = get("problem")?;
            let sys = system_from_value(&prob["system"], "problem.system").map_err(pe)?;
            let f = bimatrix_from_value(&prob["f"], "problem.f").map_err(pe)?;
            let sol = get("solution")?;
            let x = bimatrix_from_value(&sol["x"], "solution.x").map_err(pe)?;
            let y = bimatrix_from_value(&sol["y"], "solution.y").map_err(pe)?;
            Ok(solve::gsyl_residual(&sys.a, &sys.b, &f, &x, &y))
        }
        "design" => {
            let sys = system_from_value(get("system")?, "system").map_err(pe)?;
            let k = bimatrix_from_value(get("k")?, "k").map_err(pe)?;
            let f_real = rmat_from_value(get("f_real")?, "f_real").map_err(pe)?;
            let x = bimatrix_from_value(get("transform_x")?, "transform_x").map_err(pe)?;
            let closed = assign::closed_loop(&sys, &k)?;
            let spec = closed.spectrum()?.eigenvalues;
            let expected = mat::eigenvalues_r(&f_real);
            let (_, defect) = mat::spectra_match_clustered(
                &spec,
                &expected,
                crate::EIGEN_TOL,
                crate::EIGEN_TOL,
                mat::frob_r(&closed.to_real().m),
            );
            // similarity residual X^{-1}(A+BK)X = {F}
            let fb = Bimatrix::from_real_mat(&f_real)?;
            let sim = x.inverse()?.multiply(&closed)?.multiply(&x)?;
            let sim_resid = sim.sub(&fb)?.norm() / fb.norm().max(1.0);
            Ok(defect.max(sim_resid))
        }
        "demo_rendezvous" => {
            let gain_err = obj
                .get("gain_rel_error")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| {
                    BimatError::InvalidInput("demo report missing gain_rel_error".into())
                })?;
            let k = bimatrix_from_value(get("k")?, "k").map_err(pe)?;
            let omega = obj
                .get("omega")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| BimatError::InvalidInput("demo report missing omega".into()))?;
            let gamma = obj
                .get("gamma")
                .and_then(|x| x.as_f64())
                .ok_or_else(|| BimatError::InvalidInput("demo report missing gamma".into()))?;
            let reference = assign::rendezvous::reference_gain(omega, gamma);
            let recomputed = assign::rendezvous::max_componentwise_rel_error(&k, &reference);
            Ok(recomputed.max(gain_err))
        }
        other => Err(BimatError::InvalidInput(format!(
            "cannot verify report kind {other:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Demo report
// ---------------------------------------------------------------------------

pub fn demo_report_value(rep: &assign::rendezvous::DemoReport) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), Value::String("demo_rendezvous".into()));
    o.insert("omega".into(), Value::from(rep.omega));
    o.insert("gamma".into(), Value::from(rep.gamma));
    o.insert(
        "open_spectrum".into(),
        spectrum_to_value(&rep.open_spectrum),
    );
    o.insert(
        "open_expected".into(),
        spectrum_to_value(&rep.open_expected),
    );
    o.insert("open_defect".into(), Value::from(rep.open_defect));
    o.insert("k".into(), bimatrix_to_value(&rep.design.k));
    o.insert("real_gain".into(), rmat_to_value(&rep.design.real_gain));
    o.insert("reference_k".into(), bimatrix_to_value(&rep.gain_reference));
    o.insert("gain_rel_error".into(), Value::from(rep.gain_rel_error));
    o.insert(
        "achieved_spectrum".into(),
        spectrum_to_value(&rep.design.report.closed_spectrum),
    );
    o.insert(
        "pipeline_spectrum".into(),
        spectrum_to_value(&rep.pipeline_design.report.closed_spectrum),
    );
    o.insert("pipeline_defect".into(), Value::from(rep.pipeline_defect));
    o.insert(
        "pass".into(),
        Value::Bool(
            rep.gain_rel_error < 1e-9 && rep.open_defect < 1e-8 && rep.pipeline_defect < 1e-8,
        ),
    );
    Value::Object(o)
}

// ---------------------------------------------------------------------------
// Deterministic emission
// ---------------------------------------------------------------------------

/// Serialize with sorted keys and 17-significant-digit scientific floats.
/// Identical values always produce identical bytes.
pub fn emit(v: &Value) -> String {
    let mut out = String::new();
    emit_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn emit_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    // collapse negative zero so equal values emit equal bytes
                    let x = if x == 0.0 { 0.0 } else { x };
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serialization")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items
                .iter()
                .all(|x| matches!(x, Value::Number(_) | Value::Bool(_) | Value::Null));
            if flat {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    emit_value(item, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (k, item) in items.iter().enumerate() {
                    push_indent(indent + 1, out);
                    emit_value(item, indent + 1, out);
                    if k + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                push_indent(indent, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push_str(": ");
                emit_value(&map[*key], indent + 1, out);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(n: usize, out: &mut String) {
    for _ in 0..n {
        out.push_str("  ");
    }
}
