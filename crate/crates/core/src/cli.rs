//! The `birefl` command: read JSON inputs, run one operation, and emit a
//! certificate, a verification report or a structured refusal.
//!
//! Exit status 0 on success, 2 on a refusal or a failed verification, 1 on
//! I/O and parse errors.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::algebra::AlgebraRep;
use crate::decomp::{
    bireflectional_decompose, square_zero_decompose, verify_bireflectional, verify_square_zero, BireflectionalCert,
    SquareZeroCert,
};
use crate::error::Error;
use crate::hensel::{sqrt_element, Branch};
use crate::json::{
    residual_map, AlgebraJson, CertKind, CertificateJson, MatrixJson, RefusalJson, StarJson, VerificationJson,
};
use crate::matrix::Matrix;
use crate::report::{Check, VerificationReport};
use crate::scalar::TolerancePolicy;
use crate::staru::{unitary_fourth_root_product, verify_product, verify_unitary, StarMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sqrt,
    Birefl,
    Szero,
    Unitary4,
    Verify,
}

/// `transpose` or `form:<path>` (a matrix file holding the form `G`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarArg {
    Transpose,
    Form(PathBuf),
}

impl FromStr for StarArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "transpose" => Ok(StarArg::Transpose),
            Some(("form", path)) if !path.is_empty() => Ok(StarArg::Form(PathBuf::from(path))),
            _ => Err(format!("expected `transpose` or `form:<path>`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub algebra: Option<PathBuf>,
    pub star: Option<StarArg>,
    pub cert: Option<PathBuf>,
    /// Sets both `tau_eq` and `tau_rank`.
    pub tol: Option<f64>,
    pub seed: u64,
    pub max_retries: Option<usize>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            algebra: None,
            star: None,
            cert: None,
            tol: None,
            seed: 0,
            max_retries: None,
        }
    }

    fn policy(&self) -> Result<TolerancePolicy, Failure> {
        let mut policy = TolerancePolicy::default();
        if let Some(tol) = self.tol {
            policy.tau_eq = tol;
            policy.tau_rank = tol;
        }
        if let Some(r) = self.max_retries {
            policy.max_retries = r;
        }
        policy.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(policy)
    }
}

/// Exit status and the JSON text for stdout (or `--out`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub output: String,
}

enum Failure {
    /// I/O, parse and usage problems: exit 1.
    Usage(String),
    /// Library refusals: exit 2.
    Refusal(RefusalJson),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => Failure::Usage(msg),
            other => Failure::Refusal(RefusalJson::from(&other)),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Sqrt => "sqrt",
            Command::Birefl => "birefl",
            Command::Szero => "szero",
            Command::Unitary4 => "unitary4",
            Command::Verify => "verify",
        })
    }
}

pub fn run(job: &JobSpec) -> Outcome {
    match execute(job) {
        Ok((status, output)) => Outcome { status, output },
        Err(Failure::Usage(msg)) => Outcome {
            status: 1,
            output: to_json(&serde_json::json!({ "error": "usage", "message": msg })),
        },
        Err(Failure::Refusal(r)) => Outcome {
            status: 2,
            output: to_json(&r),
        },
    }
}

fn execute(job: &JobSpec) -> Result<(i32, String), Failure> {
    let policy = job.policy()?;
    if job.command == Command::Verify {
        let path = job.cert.as_deref().ok_or_else(|| usage("verify needs --cert"))?;
        let cert: CertificateJson = read_json(path)?;
        let tol = job.tol.unwrap_or(cert.tolerance.tau_eq);
        let report = recheck(&cert, tol)?;
        let status = if report.pass { 0 } else { 2 };
        return Ok((status, to_json(&VerificationJson::new(cert.kind, tol, &report))));
    }

    let path = job
        .input
        .as_deref()
        .ok_or_else(|| usage(&format!("{} needs --input", job.command)))?;
    let x = read_json::<MatrixJson>(path)?.to_matrix()?;
    let algebra_json = match &job.algebra {
        Some(p) => Some(read_json::<AlgebraJson>(p)?),
        None => None,
    };
    let algebra = build_algebra(algebra_json.as_ref(), x.dim(), &policy)?;
    let mut cert = CertificateJson {
        kind: CertKind::Sqrt,
        x: MatrixJson::from(&x),
        factors: Vec::new(),
        intertwiner: None,
        idempotents: None,
        algebra: algebra_json,
        star: None,
        path: None,
        seed: job.seed,
        tolerance: policy,
        residuals: Default::default(),
        pass: false,
    };
    let report = match job.command {
        Command::Sqrt => {
            let w = sqrt_element(&algebra, &x, &Branch::Principal, &policy)?.element;
            cert.factors = vec![MatrixJson::from(&w)];
            verify_sqrt(&algebra, &w, &x, policy.tau_eq)
        }
        Command::Birefl => {
            let c = bireflectional_decompose(&algebra, &x, &policy, job.seed)?;
            cert.kind = CertKind::Bireflectional;
            cert.factors = vec![MatrixJson::from(&c.a), MatrixJson::from(&c.b)];
            cert.intertwiner = Some(MatrixJson::from(&c.intertwiner));
            c.report
        }
        Command::Szero => {
            let c = square_zero_decompose(&algebra, &x, &policy, job.seed)?;
            cert.kind = CertKind::Squarezero;
            cert.factors = vec![MatrixJson::from(&c.a), MatrixJson::from(&c.b)];
            cert.intertwiner = Some(MatrixJson::from(&c.involution));
            cert.idempotents = Some(vec![MatrixJson::from(&c.p), MatrixJson::from(&c.q)]);
            c.report
        }
        Command::Unitary4 => {
            let star_json = match &job.star {
                Some(StarArg::Transpose) => StarJson::Transpose,
                Some(StarArg::Form(p)) => StarJson::Form { g: read_json(p)? },
                None => return Err(usage("unitary4 needs --star")),
            };
            let star = star_json.to_star(&algebra, &policy)?;
            let pair = unitary_fourth_root_product(&star, &x, &policy, job.seed)?;
            cert.kind = CertKind::Unitary4;
            cert.factors = vec![MatrixJson::from(&pair.cert.y), MatrixJson::from(&pair.w)];
            cert.star = Some(star_json);
            cert.path = Some(pair.cert.path.name().to_string());
            merge(pair.cert.report, pair.report)
        }
        Command::Verify => unreachable!("handled above"),
    };
    cert.residuals = residual_map(&report);
    cert.pass = report.pass;
    if !report.pass {
        // Emitting a certificate that fails its own check would break the
        // verify round trip.
        let failed: Vec<String> = report.failures().iter().map(|c| c.name.clone()).collect();
        let mut refusal = RefusalJson::from(&Error::NumericalBreakdown(format!(
            "certificate residuals above tolerance: {}",
            failed.join(", ")
        )));
        refusal.details.insert("failed".into(), serde_json::json!(failed));
        refusal
            .details
            .insert("certificate".into(), serde_json::to_value(&cert).expect("serializable"));
        return Err(Failure::Refusal(refusal));
    }
    Ok((0, to_json(&cert)))
}

/// Recomputes every check of a certificate at tolerance `tol`.
pub fn recheck(cert: &CertificateJson, tol: f64) -> Result<VerificationReport, Error> {
    let policy = TolerancePolicy {
        tau_eq: tol,
        ..cert.tolerance
    };
    let x = cert.x.to_matrix()?;
    let algebra = build_algebra(cert.algebra.as_ref(), x.dim(), &policy).map_err(|f| match f {
        Failure::Usage(m) => Error::InvalidInput(m),
        Failure::Refusal(r) => Error::InvalidInput(r.message),
    })?;
    let factors: Vec<Matrix> = cert
        .factors
        .iter()
        .map(MatrixJson::to_matrix)
        .collect::<Result<_, _>>()?;
    let expect = |k: usize| -> Result<(), Error> {
        if factors.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "expected {k} factors, found {}",
                factors.len()
            )))
        }
    };
    let missing = |what: &str| Error::InvalidInput(format!("certificate has no {what}"));
    Ok(match cert.kind {
        CertKind::Sqrt => {
            expect(1)?;
            verify_sqrt(&algebra, &factors[0], &x, tol)
        }
        CertKind::Bireflectional => {
            expect(2)?;
            let j = cert
                .intertwiner
                .as_ref()
                .ok_or_else(|| missing("intertwiner"))?
                .to_matrix()?;
            let c = BireflectionalCert {
                x: x.clone(),
                a: factors[0].clone(),
                b: factors[1].clone(),
                intertwiner: j.clone(),
                conjugator: j,
                report: VerificationReport::new(Vec::new()),
            };
            verify_bireflectional(&algebra, &c, &x, tol)
        }
        CertKind::Squarezero => {
            expect(2)?;
            let i = cert
                .intertwiner
                .as_ref()
                .ok_or_else(|| missing("involution"))?
                .to_matrix()?;
            let pq = cert.idempotents.as_ref().ok_or_else(|| missing("idempotents"))?;
            if pq.len() != 2 {
                return Err(Error::InvalidInput("expected two idempotents".into()));
            }
            let c = SquareZeroCert {
                x: x.clone(),
                a: factors[0].clone(),
                b: factors[1].clone(),
                involution: i.clone(),
                p: pq[0].to_matrix()?,
                q: pq[1].to_matrix()?,
                conjugator: i,
                report: VerificationReport::new(Vec::new()),
            };
            verify_square_zero(&algebra, &c, &x, tol)
        }
        CertKind::Unitary4 => {
            expect(2)?;
            let star: StarMap = cert
                .star
                .as_ref()
                .ok_or_else(|| missing("star"))?
                .to_star(&algebra, &policy)?;
            merge(
                verify_unitary(&star, &factors[0], &x, tol),
                verify_product(&star, &factors[0], &factors[1], &x, tol),
            )
        }
    })
}

/// `w^2 = z` and membership of `w`.
pub fn verify_sqrt(algebra: &AlgebraRep, w: &Matrix, z: &Matrix, tol: f64) -> VerificationReport {
    if w.dim() != z.dim() {
        return VerificationReport::new(vec![Check::from_residual("dimensions agree", f64::INFINITY, 0.0, 0.0)]);
    }
    let nw = w.norm();
    VerificationReport::new(vec![
        Check::identity("w^2 = z", &(w * w), z, nw * nw, tol),
        Check::membership("w in A", algebra, w, tol),
    ])
}

fn merge(first: VerificationReport, second: VerificationReport) -> VerificationReport {
    let mut checks = first.checks;
    for c in second.checks {
        if !checks.iter().any(|d| d.name == c.name) {
            checks.push(c);
        }
    }
    VerificationReport::new(checks)
}

fn build_algebra(json: Option<&AlgebraJson>, n: usize, policy: &TolerancePolicy) -> Result<AlgebraRep, Failure> {
    let algebra = match json {
        Some(a) => a.to_algebra(policy)?,
        None => AlgebraRep::full(n),
    };
    if algebra.ambient_dim() != n {
        return Err(Failure::Refusal(RefusalJson::from(&Error::DimensionMismatch {
            expected: algebra.ambient_dim(),
            found: n,
        })));
    }
    Ok(algebra)
}

fn usage(msg: &str) -> Failure {
    Failure::Usage(msg.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(&format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(&format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_argument_forms() {
        assert_eq!("transpose".parse::<StarArg>().unwrap(), StarArg::Transpose);
        assert_eq!(
            "form:g.json".parse::<StarArg>().unwrap(),
            StarArg::Form(PathBuf::from("g.json"))
        );
        assert!("form:".parse::<StarArg>().is_err());
        assert!("adjoint".parse::<StarArg>().is_err());
    }

    #[test]
    fn missing_input_is_a_usage_error() {
        let out = run(&JobSpec::new(Command::Birefl));
        assert_eq!(out.status, 1);
    }

    #[test]
    fn nonpositive_tolerance_is_a_usage_error() {
        let mut job = JobSpec::new(Command::Verify);
        job.tol = Some(-1.0);
        assert_eq!(run(&job).status, 1);
    }
}
