use std::path::Path;

use bidisc_core::bipoly::{classify_poly, det_pencil};
use bidisc_core::certificate::Verdict;
use bidisc_core::decomp::{decompose_gamma_unitary, decompose_pure_isometry_banded};
use bidisc_core::dilation::{build_toeplitz_model, build_truncated_dilation, verify_dilation_identity};
use bidisc_core::geometry::classify_point;
use bidisc_core::json::JsonMatrix;
use bidisc_core::linalg::{c, cr, diag, from_real_rows, identity, zeros};
use bidisc_core::opcore::{
    certify_gamma_contraction, certify_gamma_unitary, fundamental_operator, fundamental_operator_adjoint,
};
use bidisc_core::{BiPoly, Certificate, CommutingPair, Error, PencilOrder, PolyTag};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::input::{parse_point, read_json};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// What a subcommand hands back: the JSON result and the exit code.
pub struct Outcome {
    pub result: Value,
    pub code: i32,
}

/// A failed command. `Fail` carries a mathematical negative raised as a
/// library error; `Input` covers unreadable or invalid input.
pub enum Failure {
    Fail(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Fail(_) => EXIT_FAIL,
            Failure::Input(_) => EXIT_INPUT,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Fail(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotGammaContraction(_)
            | Error::ClosedFormMismatch { .. }
            | Error::AnnihilationPreconditionFailed(_)
            | Error::ResidualTooLarge { .. }
            | Error::IncompleteDecomposition(_) => Failure::Fail(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Input(m)
    }
}

type CmdResult = Result<Outcome, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail | Verdict::Inconclusive => EXIT_FAIL,
    }
}

fn certified(result: Value, cert: &Certificate) -> Outcome {
    Outcome {
        result,
        code: verdict_code(cert.verdict),
    }
}

pub fn classify_point_cmd(point: &str, cfg: &RunConfig) -> CmdResult {
    let pt = parse_point(point)?;
    if !pt.is_finite() {
        return Err(Failure::Input("point coordinates must be finite".into()));
    }
    let class = classify_point(pt, cfg.tol);
    Ok(Outcome {
        result: serde_json::json!({ "point": pt, "class": class }),
        code: EXIT_PASS,
    })
}

pub fn classify_poly_cmd(path: &str, cfg: &RunConfig) -> CmdResult {
    let p: BiPoly = read_json(path)?;
    let verdict = classify_poly(&p, &cfg.sampler())?;
    let code = if verdict.tag == PolyTag::GammaDistinguished {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Ok(Outcome {
        result: serde_json::json!({ "polynomial": p, "verdict": verdict }),
        code,
    })
}

pub fn certify_cmd(path: &str, unitary: bool, cfg: &RunConfig) -> CmdResult {
    let pair: CommutingPair = read_json(path)?;
    let cert = if unitary {
        certify_gamma_unitary(&pair, cfg.tol)?
    } else {
        certify_gamma_contraction(&pair, &cfg.certify())
    };
    let kind = if unitary { "gamma_unitary" } else { "gamma_contraction" };
    Ok(certified(
        serde_json::json!({ "property": kind, "certificate": cert }),
        &cert,
    ))
}

pub fn fundamental_cmd(path: &str, adjoint: bool, cfg: &RunConfig) -> CmdResult {
    let pair: CommutingPair = read_json(path)?;
    let solve = if adjoint {
        fundamental_operator_adjoint(&pair, cfg.rank_tol)?
    } else {
        fundamental_operator(&pair, cfg.rank_tol)?
    };
    Ok(Outcome {
        result: serde_json::json!({ "adjoint": adjoint, "solve": solve }),
        code: EXIT_PASS,
    })
}

pub fn dilate_cmd(path: &str, cfg: &RunConfig) -> CmdResult {
    let pair: CommutingPair = read_json(path)?;
    let n = cfg.truncation;
    let td = build_truncated_dilation(&pair, n, &cfg.certify())?;
    let mut cert = Certificate::new();
    for total in 0..=n {
        for i in 0..=total {
            let j = total - i;
            let mono = BiPoly::from_real_terms(&[(i, j, 1.0)]);
            cert.absorb(&format!("z1^{i}z2^{j}"), &verify_dilation_identity(&td, &mono));
        }
    }
    cert.note(format!("compression checked for every monomial of total degree at most {n}"));
    Ok(certified(
        serde_json::json!({ "dilation": td, "certificate": cert }),
        &cert,
    ))
}

/// Symbol φ(z) = C0 + C1·z of a pure model.
#[derive(Deserialize)]
struct Symbol {
    #[serde(rename = "C0")]
    c0: JsonMatrix,
    #[serde(rename = "C1")]
    c1: JsonMatrix,
}

pub fn decompose_cmd(pair: Option<&str>, symbol: Option<&str>, factors: &[String], cfg: &RunConfig) -> CmdResult {
    let polys = factors
        .iter()
        .map(|f| read_json::<BiPoly>(f))
        .collect::<Result<Vec<_>, _>>()?;
    let result = match (pair, symbol) {
        (Some(path), None) => {
            let pair: CommutingPair = read_json(path)?;
            decompose_gamma_unitary(&pair, &polys, &cfg.decomp())?
        }
        (None, Some(path)) => {
            let sym: Symbol = read_json(path)?;
            let tm = build_toeplitz_model(&sym.c0.0, &sym.c1.0, cfg.truncation)?;
            decompose_pure_isometry_banded(&tm, &polys, cfg.probe_degree, &cfg.decomp())?
        }
        _ => return Err(Failure::Input("give exactly one of a pair file or --symbol".into())),
    };
    Ok(Outcome {
        result: to_value(&result),
        code: EXIT_PASS,
    })
}

fn write_fixture<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String, Failure> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).expect("fixtures serialize") + "\n";
    std::fs::write(&path, text).map_err(|e| Failure::Input(format!("writing {}: {e}", path.display())))?;
    Ok(name.to_string())
}

/// Writes the reference fixtures into `dir`.
pub fn fixtures_cmd(dir: &str) -> CmdResult {
    let dir = Path::new(dir);
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("creating {}: {e}", dir.display())))?;
    let mut files = Vec::new();

    let quadratic = BiPoly::from_real_terms(&[(0, 1, 4.0), (2, 0, -1.0)]);
    files.push(write_fixture(dir, "quadratic_4z2_minus_z1sq.json", &quadratic)?);

    let a = from_real_rows(3, 3, &[0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let boundary_pair = CommutingPair::new(a, zeros(3, 3))?;
    files.push(write_fixture(dir, "numerical_radius_one_pair.json", &boundary_pair)?);

    for r in [0.25, 0.5, 0.75] {
        let pair = CommutingPair::new(identity(3).scale(2.0 * r), identity(3).scale(r * r))?;
        files.push(write_fixture(dir, &format!("scalar_family_r{r:.2}.json"), &pair)?);
    }

    let mut nil = zeros(2, 2);
    nil[(1, 0)] = cr(1.0);
    files.push(write_fixture(dir, "nilpotent_pencil_matrix.json", &JsonMatrix(nil.clone()))?);
    files.push(write_fixture(
        dir,
        "nilpotent_pencil.json",
        &det_pencil(&nil, PencilOrder::AFirst),
    )?);

    let s = diag(&[c(1.0, 1.0), cr(-2.0)]);
    let p = diag(&[c(0.0, 1.0), cr(1.0)]);
    let pair = CommutingPair::new(s, p)?;
    files.push(write_fixture(dir, "diagonal_gamma_unitary.json", &pair)?);

    Ok(Outcome {
        result: serde_json::json!({ "directory": dir.display().to_string(), "files": files }),
        code: EXIT_PASS,
    })
}
