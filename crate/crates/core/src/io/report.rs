use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use super::schema::ProblemFile;
use crate::sdp::{SolveStatus, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Marginal,
    Error,
    Bounded,
    Unbounded,
    Valid,
    Invalid,
    Done,
}

impl Verdict {
    /// 0 decided, 2 MARGINAL, 3 solver ERROR.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Marginal => 2,
            Verdict::Error => 3,
            _ => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "FEASIBLE",
            Verdict::Infeasible => "INFEASIBLE",
            Verdict::Marginal => "MARGINAL",
            Verdict::Error => "ERROR",
            Verdict::Bounded => "BOUNDED",
            Verdict::Unbounded => "UNBOUNDED",
            Verdict::Valid => "VALID",
            Verdict::Invalid => "INVALID",
            Verdict::Done => "DONE",
        }
    }
}

impl From<SolveStatus> for Verdict {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Feasible => Verdict::Feasible,
            SolveStatus::Infeasible => Verdict::Infeasible,
            SolveStatus::Marginal => Verdict::Marginal,
            SolveStatus::Error => Verdict::Error,
        }
    }
}

/// Exit code for input errors (parse, schema, preconditions).
pub const EXIT_INPUT_ERROR: i32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub max_iter: usize,
    pub feas_tol: f64,
    pub verify_residual: f64,
    pub verify_eigenvalue: f64,
    pub witness_tol: f64,
    pub membership_tol: f64,
}

impl Tolerances {
    pub fn from_options(o: &SolverOptions) -> Self {
        Tolerances {
            tol: o.tol,
            max_iter: o.max_iter,
            feas_tol: o.feas_tol,
            verify_residual: o.verify_residual,
            verify_eigenvalue: o.verify_eigenvalue,
            witness_tol: crate::cp::WITNESS_TOL,
            membership_tol: crate::free::MEMBERSHIP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub status: Verdict,
    /// Phase-I margin or minimum eigenvalue, where meaningful.
    pub margin: Option<f64>,
    pub message: String,
    pub values: BTreeMap<String, f64>,
    pub witnesses: BTreeMap<String, serde_json::Value>,
    pub tolerances: Tolerances,
    pub elapsed_ms: f64,
    pub input: ProblemFile,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("kind: {}\n", self.kind));
        s.push_str(&format!("status: {}\n", self.status.as_str()));
        if let Some(m) = self.margin {
            s.push_str(&format!("margin: {}\n", fmt17(m)));
        }
        if !self.message.is_empty() {
            s.push_str(&format!("message: {}\n", self.message));
        }
        for (k, v) in &self.values {
            s.push_str(&format!("{k}: {}\n", fmt17(*v)));
        }
        for (k, v) in &self.witnesses {
            s.push_str(&format!("witness {k}: {}\n", to_json_compact(v)));
        }
        let t = &self.tolerances;
        s.push_str(&format!(
            "tolerances: tol {} feas_tol {} verify_residual {} witness_tol {} max_iter {}\n",
            fmt17(t.tol),
            fmt17(t.feas_tol),
            fmt17(t.verify_residual),
            fmt17(t.witness_tol),
            t.max_iter
        ));
        s.push_str(&format!("elapsed_ms: {:.3}\n", self.elapsed_ms));
        s
    }
}

/// 17 significant digits in scientific notation; valid JSON and exact on
/// round trip.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

struct Sig17<F>(F);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $t:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $t)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// Pretty JSON with every float printed by [`fmt17`].
pub fn to_json_string<T: Serialize>(v: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17(PrettyFormatter::with_indent(b"  ")));
    v.serialize(&mut ser).expect("serializing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn to_json_compact<T: Serialize>(v: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17(serde_json::ser::CompactFormatter));
    v.serialize(&mut ser).expect("serializing to memory");
    String::from_utf8(out).expect("JSON is UTF-8")
}
