use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::report::{to_json_string, Verdict};
use super::schema::{tuple_to_json, CertificateJson, DropJson, Payload, PencilJson, PolynomialJson, ProblemFile};
use crate::algebra::{HermitianMatrix, HermitianTuple, LinearPencil, NCPolynomial, NCWord};
use crate::catalog::{
    dual_grid, free_cube, free_interval, near_tv_dual_boundary, no_tracial_extension, scalar_pencil, tv_dual_q, tv_lift,
    tv_monic_drop,
};
use crate::error::{Error, Result};
use crate::free::{drop_polar_membership, PolarForm, Spectrahedrop};
use crate::possatz::Certificate;
use crate::sdp::{SolveStatus, SolverOptions};

/// Width of the band around the zero curve of `q` excluded from grid
/// comparisons.
pub const GRID_BAND: f64 = 1e-3;
pub const GRID_POINTS: usize = 41;
pub const GRID_RADIUS: f64 = 1.5;
pub const GRID_FILE: &str = "tv-dual-grid.csv";

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub problem: ProblemFile,
    pub expected: Verdict,
}

fn t(ms: Vec<HermitianMatrix>) -> HermitianTuple {
    HermitianTuple::from_mats(ms).expect("nonempty, equal sizes")
}

fn diag(d: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(d)
}

fn linear(a: &[f64]) -> NCPolynomial {
    let mut p = NCPolynomial::identity(a.len(), 1);
    for (j, &c) in a.iter().enumerate() {
        p.add_term(NCWord::letter(j), HermitianMatrix::scalar(-c).into_matrix()).expect("1x1");
    }
    p
}

fn pen(l: &LinearPencil) -> PencilJson {
    PencilJson::from_pencil(l)
}

fn entry(name: &'static str, payload: Payload, expected: Verdict) -> CorpusEntry {
    CorpusEntry {
        name,
        problem: ProblemFile::new(payload),
        expected,
    }
}

fn moded(name: &'static str, payload: Payload, mode: &str, expected: Verdict) -> CorpusEntry {
    CorpusEntry {
        name,
        problem: ProblemFile::new(payload).with_mode(mode),
        expected,
    }
}

/// The worked examples as problem files with their expected outcomes.
pub fn corpus() -> Vec<CorpusEntry> {
    use Verdict::*;
    let one_plus_x = scalar_pencil(1.0, 1.0);
    let one_plus_2x = scalar_pencil(1.0, 2.0);
    let (nte_a, nte_b) = no_tracial_extension();
    let tv = DropJson::from_drop(&Spectrahedrop::new(tv_lift()));
    let tv_monic = DropJson::from_drop(&tv_monic_drop());
    let square = DropJson::from_drop(&Spectrahedrop::new(free_cube(2, 0.5)));
    let pt = |xs: &[f64]| tuple_to_json(&HermitianTuple::scalars(xs));
    let nocon_a = t(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]);
    let nocon_b = t(vec![diag(&[0.0, -1.0]), diag(&[-1.0, 0.0])]);
    let nocon_d = nocon_a.add(&nocon_b).expect("same shape").scale(0.5);
    let fails_cert = Certificate::new(1, 0, HermitianMatrix::scalar(0.5), HermitianMatrix::scalar(0.5));
    let fails_poly = NCPolynomial::scalar(1, &[(1.0, &[]), (1.0, &[0])]).expect("valid");
    let omega = t(vec![diag(&[1.0, -1.0])]);
    let b1 = HermitianTuple::scalars(&[1.0]);
    let square_point = t(vec![
        HermitianMatrix::from_real(2, &[0.3, 0.1, 0.1, -0.2]).expect("symmetric"),
        diag(&[0.4, -0.4]),
    ]);
    vec![
        entry(
            "ex-fails-dominate",
            Payload::Dominate {
                dominating: pen(&one_plus_x),
                dominated: pen(&one_plus_2x),
            },
            Feasible,
        ),
        moded(
            "ex-fails-dominate-isometry",
            Payload::Dominate {
                dominating: pen(&one_plus_x),
                dominated: pen(&one_plus_2x),
            },
            "isometry",
            Infeasible,
        ),
        entry("ex-fails-bounded", Payload::Bounded { pencil: pen(&one_plus_2x) }, Unbounded),
        entry(
            "ex-fails-possatz-verify",
            Payload::PossatzVerify {
                polynomial: PolynomialJson::from_polynomial(&fails_poly),
                certificate: CertificateJson::from_certificate(&fails_cert),
                pencil: pen(&one_plus_2x),
            },
            Valid,
        ),
        entry(
            "ex-fails-possatz-search",
            Payload::PossatzSearch {
                polynomial: PolynomialJson::from_polynomial(&fails_poly),
                pencil: pen(&one_plus_2x),
                r: 0,
            },
            Feasible,
        ),
        moded(
            "no-tracial-extension-cp",
            Payload::Interpolate {
                a: tuple_to_json(&nte_a),
                b: tuple_to_json(&nte_b),
            },
            "cp",
            Feasible,
        ),
        moded(
            "no-tracial-extension-operation",
            Payload::Interpolate {
                a: tuple_to_json(&nte_a),
                b: tuple_to_json(&nte_b),
            },
            "operation",
            Infeasible,
        ),
        entry(
            "nocon-thull",
            Payload::Thull {
                generators: vec![
                    tuple_to_json(&t(vec![diag(&[1.0, 0.0])])),
                    tuple_to_json(&t(vec![diag(&[0.0, -1.0])])),
                ],
                target: tuple_to_json(&t(vec![diag(&[0.5, -0.5])])),
            },
            Infeasible,
        ),
        entry(
            "nocon-cthull",
            Payload::Cthull {
                generators: vec![tuple_to_json(&nocon_a), tuple_to_json(&nocon_b)],
                target: tuple_to_json(&nocon_d),
            },
            Infeasible,
        ),
        entry(
            "nocon-cthull-scaled",
            Payload::Cthull {
                generators: vec![tuple_to_json(&nocon_a), tuple_to_json(&nocon_b)],
                target: tuple_to_json(&nocon_a.scale(0.5)),
            },
            Feasible,
        ),
        entry(
            "tvscreen-drop",
            Payload::Drop {
                drop: tv.clone(),
                point: pt(&[0.0, 0.0]),
            },
            Feasible,
        ),
        entry(
            "tvscreen-drop-outside",
            Payload::Drop {
                drop: tv.clone(),
                point: pt(&[1.05, 0.3]),
            },
            Infeasible,
        ),
        entry(
            "tvscreen-drop-polar",
            Payload::DropPolar {
                drop: tv_monic.clone(),
                point: pt(&[0.5, 0.5]),
            },
            Feasible,
        ),
        entry(
            "tvscreen-drop-polar-outside",
            Payload::DropPolar {
                drop: tv_monic.clone(),
                point: pt(&[1.2, 0.0]),
            },
            Infeasible,
        ),
        entry(
            "tvscreen-monicize",
            Payload::Monicize {
                pencil: pen(&tv_lift()),
                point: vec![0.0, 0.0, 0.5],
            },
            Done,
        ),
        entry("tvscreen-bounded", Payload::Bounded { pencil: pen(&tv_lift()) }, Bounded),
        entry(
            "tvscreen-possatz-search",
            Payload::PossatzSearch {
                polynomial: PolynomialJson::from_polynomial(&linear(&[0.5, 0.5])),
                pencil: tv_monic.lift.clone(),
                r: 0,
            },
            Feasible,
        ),
        entry(
            "tvscreen-possatz-search-outside",
            Payload::PossatzSearch {
                polynomial: PolynomialJson::from_polynomial(&linear(&[1.2, 0.0])),
                pencil: tv_monic.lift.clone(),
                r: 0,
            },
            Infeasible,
        ),
        entry(
            "free-square-membership",
            Payload::Membership {
                pencil: pen(&free_cube(2, 0.5)),
                point: tuple_to_json(&square_point),
            },
            Feasible,
        ),
        entry(
            "free-interval-polar",
            Payload::Polar {
                omega: tuple_to_json(&free_interval().omega()),
                point: pt(&[0.5]),
            },
            Feasible,
        ),
        entry(
            "free-interval-polar-outside",
            Payload::Polar {
                omega: tuple_to_json(&free_interval().omega()),
                point: pt(&[1.5]),
            },
            Infeasible,
        ),
        entry(
            "tracial-positive-part",
            Payload::Tracial {
                b: tuple_to_json(&b1),
                y: tuple_to_json(&t(vec![diag(&[0.6, -5.0])])),
            },
            Feasible,
        ),
        entry(
            "tracial-positive-part-outside",
            Payload::Tracial {
                b: tuple_to_json(&b1),
                y: tuple_to_json(&t(vec![diag(&[0.6, 0.6])])),
            },
            Infeasible,
        ),
        entry(
            "exsitu-scalar",
            Payload::Exsitu {
                omega: tuple_to_json(&omega),
                y: pt(&[0.5]),
            },
            Feasible,
        ),
        entry(
            "exsitu-scalar-outside",
            Payload::Exsitu {
                omega: tuple_to_json(&omega),
                y: pt(&[1.5]),
            },
            Infeasible,
        ),
        entry(
            "hull-union-tv-square",
            Payload::HullUnion {
                drops: vec![tv_monic.clone(), square.clone()],
                point: pt(&[0.9, 0.5]),
            },
            Feasible,
        ),
        entry(
            "hull-union-tv-square-outside",
            Payload::HullUnion {
                drops: vec![tv_monic, square],
                point: pt(&[1.1, 0.0]),
            },
            Infeasible,
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub kind: String,
    pub expected: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub file: String,
    pub points_per_axis: usize,
    pub radius: f64,
    pub band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub problems: Vec<ManifestEntry>,
    pub dual_grid: GridInfo,
}

/// Reference sign of `q` over the dual grid; `0` marks points inside the
/// excluded band.
pub fn reference_grid(n: usize, r: f64) -> Vec<(f64, f64, f64, i8)> {
    dual_grid(n, r)
        .into_iter()
        .map(|(c1, c2)| {
            let q = tv_dual_q(c1, c2);
            let sign = if near_tv_dual_boundary(c1, c2, GRID_BAND) {
                0
            } else if q > 0.0 {
                1
            } else {
                -1
            };
            (c1, c2, q, sign)
        })
        .collect()
}

/// Writes every corpus problem, `manifest.json`, and the reference dual
/// grid into `dir`.
pub fn emit_corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Invalid(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let mut problems = Vec::new();
    for e in corpus() {
        let file = format!("{}.json", e.name);
        let path = dir.join(&file);
        fs::write(&path, to_json_string(&e.problem)).map_err(io)?;
        written.push(path);
        problems.push(ManifestEntry {
            file,
            kind: e.problem.payload.kind().to_string(),
            expected: e.expected,
        });
    }
    let mut csv = String::from("c1,c2,q,q_sign\n");
    for (c1, c2, q, s) in reference_grid(GRID_POINTS, GRID_RADIUS) {
        csv.push_str(&format!("{c1:.16e},{c2:.16e},{q:.16e},{s}\n"));
    }
    let grid = dir.join(GRID_FILE);
    fs::write(&grid, csv).map_err(io)?;
    written.push(grid);
    let manifest = Manifest {
        version: super::schema::FORMAT_VERSION.to_string(),
        problems,
        dual_grid: GridInfo {
            file: GRID_FILE.to_string(),
            points_per_axis: GRID_POINTS,
            radius: GRID_RADIUS,
            band: GRID_BAND,
        },
    };
    let path = dir.join("manifest.json");
    fs::write(&path, to_json_string(&manifest)).map_err(io)?;
    written.push(path);
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub c1: f64,
    pub c2: f64,
    pub status: SolveStatus,
    /// Reference sign of `q`, `0` inside the excluded band.
    pub q_sign: i8,
}

/// Decides polar membership of every grid point for the TV screen.
pub fn dual_grid_statuses(n: usize, r: f64, opts: &SolverOptions) -> Result<Vec<GridPoint>> {
    let k = tv_monic_drop();
    reference_grid(n, r)
        .into_iter()
        .map(|(c1, c2, _, s)| {
            let d = drop_polar_membership(&k, &HermitianTuple::scalars(&[c1, c2]), PolarForm::Contraction, opts)?;
            Ok(GridPoint {
                c1,
                c2,
                status: d.status,
                q_sign: s,
            })
        })
        .collect()
}

pub fn grid_csv(points: &[GridPoint]) -> String {
    let mut s = String::from("c1,c2,status,q_sign\n");
    for p in points {
        let st = Verdict::from(p.status).as_str();
        s.push_str(&format!("{:.16e},{:.16e},{st},{}\n", p.c1, p.c2, p.q_sign));
    }
    s
}
