use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use super::report::{Report, Tolerances, Verdict};
use super::schema::{tuple_from_json, tuple_to_json, CertificateJson, MatrixJson, Payload, PencilJson, ProblemFile};
use crate::algebra::HermitianTuple;
use crate::cp::{interpolate, Interpolation, InterpolationMode};
use crate::error::{Error, Result};
use crate::free::{
    dominates, drop_membership, drop_polar_membership, hull_of_union, is_bounded, monicize, polar_membership,
    spectrahedron_membership, Domination, DominationForm, PolarForm,
};
use crate::possatz::{search_certificate, verify_certificate};
use crate::sdp::SolverOptions;
use crate::tracial::{exsitu_dual_membership, hull_of_set_membership, tracial_membership};

/// Command-line overrides; they win over the file's own options.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub mode: Option<String>,
}

fn parse_mode<T>(mode: Option<&str>, default: T, table: &[(&str, T)]) -> Result<T>
where
    T: Copy,
{
    let Some(m) = mode else { return Ok(default) };
    let lower = m.to_ascii_lowercase();
    table
        .iter()
        .find(|(name, _)| *name == lower)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            Error::At {
                field: "options.mode".into(),
                source: Box::new(Error::Invalid(format!("unknown mode {m:?}; expected one of {}", names.join(", ")))),
            }
        })
}

struct Out {
    status: Verdict,
    margin: Option<f64>,
    message: String,
    values: BTreeMap<String, f64>,
    witnesses: BTreeMap<String, Value>,
}

impl Out {
    fn new(status: Verdict, margin: Option<f64>, message: impl Into<String>) -> Self {
        Out {
            status,
            margin: margin.filter(|m| m.is_finite()),
            message: message.into(),
            values: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    fn value(mut self, k: &str, v: f64) -> Self {
        if v.is_finite() {
            self.values.insert(k.to_string(), v);
        }
        self
    }

    fn witness(mut self, k: &str, v: Value) -> Self {
        self.witnesses.insert(k.to_string(), v);
        self
    }
}

fn matrix(m: &crate::algebra::CMat) -> Value {
    serde_json::to_value(MatrixJson::from_cmat(m)).expect("plain data")
}

fn tuple(t: &HermitianTuple) -> Value {
    serde_json::to_value(tuple_to_json(t)).expect("plain data")
}

fn from_interpolation(r: &Interpolation) -> Out {
    let mut out = Out::new(r.status.into(), Some(r.margin), r.message.clone()).value("residual", r.residual);
    if let Some(ch) = &r.choi {
        out = out.witness("choi", matrix(ch.matrix().as_matrix()));
    }
    out
}

fn from_domination(d: &Domination) -> Out {
    let mut out = Out::new(d.status.into(), Some(d.margin), d.message.clone());
    out.message = format!(
        "{} ({} form)",
        out.message,
        match d.form {
            DominationForm::Isometry => "isometry",
            _ => "contraction",
        }
    );
    if let Some(c) = &d.certificate {
        out = out
            .witness("v", matrix(&c.v))
            .witness("s_square", matrix(&c.s_square))
            .value("mu", c.mu as f64);
    }
    out
}

/// Runs one problem. `Err` means an input error (exit code 4); solver
/// failures come back as a report with status ERROR.
pub fn run(problem: &ProblemFile, overrides: &Overrides) -> Result<Report> {
    let mut opts = SolverOptions::default();
    if let Some(t) = overrides.tol.or(problem.options.tol) {
        opts.tol = t;
    }
    if let Some(m) = overrides.max_iter.or(problem.options.max_iter) {
        opts.max_iter = m;
    }
    let mode = overrides.mode.as_deref().or(problem.options.mode.as_deref());
    let start = Instant::now();
    let out = dispatch(&problem.payload, mode, &opts)?;
    Ok(Report {
        kind: problem.payload.kind().to_string(),
        status: out.status,
        margin: out.margin,
        message: out.message,
        values: out.values,
        witnesses: out.witnesses,
        tolerances: Tolerances::from_options(&opts),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        input: problem.clone(),
    })
}

fn dispatch(p: &Payload, mode: Option<&str>, opts: &SolverOptions) -> Result<Out> {
    let interp_modes = [
        ("cp", InterpolationMode::Cp),
        ("unital", InterpolationMode::Unital),
        ("channel", InterpolationMode::Channel),
        ("operation", InterpolationMode::Operation),
    ];
    Ok(match p {
        Payload::Membership { pencil, point } => {
            let l = pencil.to_pencil("payload.pencil")?;
            let x = tuple_from_json(point, "payload.point")?;
            let m = spectrahedron_membership(&l, &x)?;
            let v = if m.member { Verdict::Feasible } else { Verdict::Infeasible };
            Out::new(v, Some(m.lambda_min), "pointwise eigenvalue test").value("lambda_min", m.lambda_min)
        }
        Payload::Interpolate { a, b } => {
            let mode = parse_mode(mode, InterpolationMode::Cp, &interp_modes)?;
            let r = interpolate(&tuple_from_json(a, "payload.a")?, &tuple_from_json(b, "payload.b")?, mode, opts)?;
            from_interpolation(&r)
        }
        Payload::Dominate { dominating, dominated } => {
            let form = parse_mode(
                mode,
                DominationForm::Auto,
                &[
                    ("auto", DominationForm::Auto),
                    ("contraction", DominationForm::Contraction),
                    ("isometry", DominationForm::Isometry),
                ],
            )?;
            let la = dominating.to_pencil("payload.dominating")?;
            let lb = dominated.to_pencil("payload.dominated")?;
            from_domination(&dominates(&la, &lb, form, opts)?)
        }
        Payload::Polar { omega, point } => {
            let o = tuple_from_json(omega, "payload.omega")?;
            let x = tuple_from_json(point, "payload.point")?;
            from_domination(&polar_membership(&o, &x, opts)?)
        }
        Payload::Drop { drop, point } => {
            let k = drop.to_drop("payload.drop")?;
            let x = tuple_from_json(point, "payload.point")?;
            let r = drop_membership(&k, &x, opts)?;
            let mut out = Out::new(r.status.into(), Some(r.margin), r.message.clone()).value("lambda_min", r.lambda_min);
            if let Some(w) = &r.witness {
                if w.g() > 0 {
                    out = out.witness("y", tuple(w));
                }
            }
            out
        }
        Payload::DropPolar { drop, point } => {
            let form = parse_mode(
                mode,
                PolarForm::Contraction,
                &[("contraction", PolarForm::Contraction), ("bounded", PolarForm::Bounded)],
            )?;
            let k = drop.to_drop("payload.drop")?;
            let a = tuple_from_json(point, "payload.point")?;
            from_domination(&drop_polar_membership(&k, &a, form, opts)?)
        }
        Payload::Tracial { b, y } => {
            let r = tracial_membership(&tuple_from_json(b, "payload.b")?, &tuple_from_json(y, "payload.y")?, opts)?;
            let mut out = Out::new(r.status.into(), Some(r.margin), r.message.clone());
            if let Some(w) = &r.witness {
                out = out.witness("t", matrix(w.t.as_matrix()));
            }
            out
        }
        Payload::Thull { generators, target } | Payload::Cthull { generators, target } => {
            let mode = if matches!(p, Payload::Thull { .. }) {
                InterpolationMode::Channel
            } else {
                InterpolationMode::Operation
            };
            let gens = generators
                .iter()
                .enumerate()
                .map(|(i, g)| tuple_from_json(g, &format!("payload.generators[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let b = tuple_from_json(target, "payload.target")?;
            let (hit, all) = hull_of_set_membership(&gens, &b, mode, opts)?;
            match hit {
                Some(i) => from_interpolation(&all[i]).value("generator", i as f64),
                None => {
                    // worst case across generators decides the reported status
                    let worst = all
                        .iter()
                        .max_by_key(|r| match r.status {
                            crate::sdp::SolveStatus::Error => 3,
                            crate::sdp::SolveStatus::Marginal => 2,
                            _ => 1,
                        })
                        .expect("nonempty");
                    let margin = all.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max);
                    let mut out = Out::new(worst.status.into(), Some(margin), worst.message.clone());
                    for (i, r) in all.iter().enumerate() {
                        out = out.value(&format!("margin_{i}"), r.margin);
                    }
                    out
                }
            }
        }
        Payload::Exsitu { omega, y } => {
            let r = exsitu_dual_membership(&tuple_from_json(omega, "payload.omega")?, &tuple_from_json(y, "payload.y")?, opts)?;
            from_interpolation(&r)
        }
        Payload::PossatzVerify {
            polynomial,
            certificate,
            pencil,
        } => {
            let poly = polynomial.to_polynomial("payload.polynomial")?;
            let cert = certificate.to_certificate("payload.certificate")?;
            let l = pencil.to_pencil("payload.pencil")?;
            let c = verify_certificate(&poly, &cert, &l)?;
            let v = if c.valid { Verdict::Valid } else { Verdict::Invalid };
            let msg = match &c.worst_word {
                Some(w) if !c.valid => format!("largest discrepancy at word {:?}", w.letters()),
                _ => String::new(),
            };
            Out::new(v, None, msg)
                .value("residual", c.residual)
                .value("annihilation", c.annihilation)
                .value("min_eigenvalue", c.min_eigenvalue)
        }
        Payload::PossatzSearch { polynomial, pencil, r } => {
            let poly = polynomial.to_polynomial("payload.polynomial")?;
            let l = pencil.to_pencil("payload.pencil")?;
            let s = search_certificate(&poly, &l, *r, opts)?;
            let mut out = Out::new(s.status.into(), Some(s.margin), s.message.clone());
            if let Some(c) = &s.check {
                out = out.value("residual", c.residual).value("annihilation", c.annihilation);
            }
            if let Some(c) = &s.certificate {
                out = out.witness("certificate", serde_json::to_value(CertificateJson::from_certificate(c)).expect("plain data"));
            }
            out
        }
        Payload::Bounded { pencil } => {
            let l = pencil.to_pencil("payload.pencil")?;
            let b = is_bounded(&l, opts)?;
            let v = match (b.status, b.bounded) {
                (crate::sdp::SolveStatus::Feasible, true) => Verdict::Bounded,
                (crate::sdp::SolveStatus::Feasible, false) => Verdict::Unbounded,
                (s, _) => s.into(),
            };
            let mut out = Out::new(v, None, "");
            if let Some(d) = &b.direction {
                out = out.witness("direction", json!(d));
            }
            out
        }
        Payload::Monicize { pencil, point } => {
            let l = pencil.to_pencil("payload.pencil")?;
            let m = monicize(&l, point)?;
            Out::new(Verdict::Done, None, "")
                .witness("pencil", serde_json::to_value(PencilJson::from_pencil(&m.pencil)).expect("plain data"))
                .witness("shift", json!(m.shift))
        }
        Payload::HullUnion { drops, point } => {
            let ks = drops
                .iter()
                .enumerate()
                .map(|(i, d)| d.to_drop(&format!("payload.drops[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let x = tuple_from_json(point, "payload.point")?;
            let hull = hull_of_union(&ks, opts)?;
            let r = drop_membership(&hull, &x, opts)?;
            Out::new(r.status.into(), Some(r.margin), r.message.clone()).value("lambda_min", r.lambda_min)
        }
    })
}

/// Exit code for a failed run: solver failures are 3, everything else is an
/// input error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Solver(_) => 3,
        _ => super::report::EXIT_INPUT_ERROR,
    }
}
