//! JSON problem and result documents, and the operations the CLI exposes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hankel::{check, riesz_eval, MatrixMomentSequence, MomentVerdict, ProblemKind};
use crate::linalg::{Matrix, SymmetricMatrix, Tolerance};
use crate::measure::{
    decide_sequence, decide_truncated, nodes_from_roots, reconstruct_raw, reconstruction_residual, recover_measure_raw,
    AtomicMeasure, MeasureOutcome, RawAtomicMeasure, TruncatedDecision,
};
use crate::poly::{roots, RealPolynomial, Root};
use crate::recurrence::{minimal_polynomial_raw, RawRecurrenceSpec, RecurrenceSpec};

pub type Rows = Vec<Vec<f64>>;

pub const ENV_TOL_PSD: &str = "MATMOMENT_TOL_PSD";
pub const ENV_TOL_ROOT: &str = "MATMOMENT_TOL_ROOT";
pub const ENV_TOL_RESIDUAL: &str = "MATMOMENT_TOL_RESIDUAL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sequence,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceDocument {
    pub order: usize,
    pub coeffs: Vec<f64>,
    pub initials: Vec<Rows>,
}

/// Partial tolerance settings; unset fields fall through to the next source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_eps: Option<f64>,
}

impl ToleranceOverrides {
    fn or(self, fallback: Self) -> Self {
        Self {
            psd_eps: self.psd_eps.or(fallback.psd_eps),
            root_eps: self.root_eps.or(fallback.root_eps),
            residual_eps: self.residual_eps.or(fallback.residual_eps),
        }
    }

    /// Reads the `MATMOMENT_TOL_*` variables through `lookup`.
    pub fn from_env(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let read = |name: &str| -> Result<Option<f64>> {
            lookup(name)
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidTolerance(format!("{name}={s:?} is not a number")))
                })
                .transpose()
        };
        Ok(Self {
            psd_eps: read(ENV_TOL_PSD)?,
            root_eps: read(ENV_TOL_ROOT)?,
            residual_eps: read(ENV_TOL_RESIDUAL)?,
        })
    }

    fn resolve(self) -> Result<Tolerance> {
        let d = Tolerance::default();
        Tolerance::new(
            self.psd_eps.unwrap_or(d.psd_eps),
            self.root_eps.unwrap_or(d.root_eps),
            self.residual_eps.unwrap_or(d.residual_eps),
        )
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub mode: Mode,
    pub dim: usize,
    #[serde(default = "default_true")]
    pub symmetric_mode: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<RecurrenceDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// Validated numeric content of a [`ProblemDocument`].
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Sequence(MatrixMomentSequence),
    Recurrence(RecurrenceSpec),
    RawSequence(Vec<Matrix>),
    RawRecurrence(RawRecurrenceSpec),
}

fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(e.to_string()),
        Category::Io => Error::Io(e.to_string()),
        Category::Syntax | Category::Eof => Error::Parse(e.to_string()),
    }
}

fn from_bytes<T: serde::de::DeserializeOwned>(text: &[u8]) -> Result<T> {
    let text = std::str::from_utf8(text).map_err(|e| Error::Parse(format!("input is not UTF-8: {e}")))?;
    serde_json::from_str(text).map_err(json_error)
}

fn check_square(rows: &Rows, dim: usize, what: &str) -> Result<()> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rows.len(),
        });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: r.len(),
        });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// Parses and structurally validates a problem document.
pub fn parse_document(text: &[u8]) -> Result<ProblemDocument> {
    let doc: ProblemDocument = from_bytes(text)?;
    doc.validate()?;
    Ok(doc)
}

impl ProblemDocument {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Schema("dim must be at least 1".into()));
        }
        match (self.mode, &self.moments, &self.recurrence) {
            (Mode::Sequence, Some(moments), None) => {
                if moments.is_empty() {
                    return Err(Error::InsufficientMoments {
                        needed: 1,
                        available: 0,
                    });
                }
                for (k, m) in moments.iter().enumerate() {
                    check_square(m, self.dim, &format!("moments[{k}]"))?;
                }
            }
            (Mode::Recurrence, None, Some(rec)) => {
                if rec.order == 0 {
                    return Err(Error::Schema("recurrence order must be at least 1".into()));
                }
                if rec.coeffs.len() != rec.order || rec.initials.len() != rec.order {
                    return Err(Error::Schema(format!(
                        "recurrence of order {} needs {0} coefficients and {0} initials, got {} and {}",
                        rec.order,
                        rec.coeffs.len(),
                        rec.initials.len()
                    )));
                }
                if rec.coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite("recurrence coefficients".into()));
                }
                if rec.coeffs[rec.order - 1] == 0.0 {
                    return Err(Error::Schema(format!(
                        "last recurrence coefficient a_{} must be nonzero",
                        rec.order - 1
                    )));
                }
                for (k, m) in rec.initials.iter().enumerate() {
                    check_square(m, self.dim, &format!("initials[{k}]"))?;
                }
            }
            (Mode::Sequence, _, _) => {
                return Err(Error::Schema(
                    "sequence mode requires `moments` and no `recurrence`".into(),
                ))
            }
            (Mode::Recurrence, _, _) => {
                return Err(Error::Schema(
                    "recurrence mode requires `recurrence` and no `moments`".into(),
                ))
            }
        }
        if let Some(t) = &self.tolerances {
            t.resolve()?;
        }
        Ok(())
    }

    /// Tolerances with precedence flag > document > environment > default.
    pub fn tolerance(&self, flags: ToleranceOverrides, env: ToleranceOverrides) -> Result<Tolerance> {
        flags.or(self.tolerances.unwrap_or_default()).or(env).resolve()
    }

    /// Builds the numeric problem. Symmetric mode symmetrizes every matrix and
    /// reports nonzero defects; defects at or above `residual_eps` are errors.
    pub fn problem(&self, tol: &Tolerance) -> Result<(Problem, Vec<String>)> {
        self.validate()?;
        let mut diagnostics = Vec::new();
        let mut symmetric = |rows: &Rows, label: String| -> Result<SymmetricMatrix> {
            let m = Matrix::from_rows(rows)?;
            let s = SymmetricMatrix::from_matrix_checked(&m, tol.residual_eps)?;
            let defect = m.asymmetry_defect();
            if defect > 0.0 {
                diagnostics.push(format!("{label} symmetrized (asymmetry defect {defect:e})"));
            }
            Ok(s)
        };
        let problem = match (self.symmetric_mode, &self.moments, &self.recurrence) {
            (true, Some(moments), _) => Problem::Sequence(MatrixMomentSequence::new(
                moments
                    .iter()
                    .enumerate()
                    .map(|(k, m)| symmetric(m, format!("S_{k}")))
                    .collect::<Result<_>>()?,
            )?),
            (true, None, Some(rec)) => Problem::Recurrence(RecurrenceSpec::new(
                rec.coeffs.clone(),
                rec.initials
                    .iter()
                    .enumerate()
                    .map(|(k, m)| symmetric(m, format!("S_{k}")))
                    .collect::<Result<_>>()?,
            )?),
            (false, Some(moments), _) => {
                Problem::RawSequence(moments.iter().map(|m| Matrix::from_rows(m)).collect::<Result<_>>()?)
            }
            (false, None, Some(rec)) => Problem::RawRecurrence(RecurrenceSpec::new(
                rec.coeffs.clone(),
                rec.initials
                    .iter()
                    .map(|m| Matrix::from_rows(m))
                    .collect::<Result<_>>()?,
            )?),
            (_, None, None) => unreachable!("validated above"),
        };
        Ok((problem, diagnostics))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDocument {
    pub node: f64,
    pub weight: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDocument {
    pub dim: usize,
    pub atoms: Vec<AtomDocument>,
}

impl MeasureDocument {
    pub fn from_measure<W: AsRef<Matrix>>(m: &AtomicMeasure<W>) -> Self {
        Self {
            dim: m.dim(),
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomDocument {
                    node: a.node,
                    weight: a.weight.as_ref().to_rows(),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self) -> Result<RawAtomicMeasure> {
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                check_square(&a.weight, self.dim, &format!("atoms[{i}].weight"))?;
                Ok((a.node, Matrix::from_rows(&a.weight)?))
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(self.dim, atoms)
    }
}

/// Accepts a bare measure document or any JSON object carrying one under `measure`.
pub fn parse_measure(text: &[u8]) -> Result<MeasureDocument> {
    let value: Value = from_bytes(text)?;
    let inner = match value.get("measure") {
        Some(m) if value.get("atoms").is_none() => m.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(json_error)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDocument {
    /// Ascending: `coeffs[i]` multiplies `X^i`.
    pub coeffs: Vec<f64>,
    pub roots: Vec<Root>,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OutcomeDocument {
    Recovered { atoms: usize },
    RepeatedRoots { root: f64, multiplicity: usize },
    ComplexRoots { re: f64, im: f64 },
}

/// Both sides of the positivity equivalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceDocument {
    pub order: usize,
    pub hankel_psd: bool,
    pub hankel_min_eigenvalue: f64,
    pub hankel_threshold: f64,
    pub all_weights_psd: bool,
    pub weight_min_eigenvalues: Vec<f64>,
    pub weight_thresholds: Vec<f64>,
    pub boundary_atoms: Vec<usize>,
    pub numerical_disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub command: String,
    /// `None` when the command has no yes/no answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, MomentVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_polynomial: Option<PolynomialDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<OutcomeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riesz: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub residuals: BTreeMap<String, f64>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorDocument>,
}

impl ResultDocument {
    fn new(command: &str, diagnostics: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            diagnostics,
            ..Self::default()
        }
    }

    pub fn from_error(command: &str, e: &Error) -> Self {
        Self {
            command: command.to_string(),
            error: Some(ErrorDocument {
                kind: e.kind().to_string(),
                message: e.to_string(),
            }),
            ..Self::default()
        }
    }

    /// 0 satisfied (or no verdict), 1 refuted, 2 error.
    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.satisfied) {
            (Some(_), _) => 2,
            (None, Some(false)) => 1,
            _ => 0,
        }
    }

    /// Serializes, refusing documents with non-finite numbers.
    pub fn to_value(&self) -> Result<Value> {
        let value = serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))?;
        // every optional field is skipped when absent, so a null can only be a NaN or infinity
        if let Some(path) = find_null(&value, String::new()) {
            return Err(Error::NonFinite(format!("result field {path}")));
        }
        Ok(value)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_value()?).map_err(|e| Error::Io(e.to_string()))
    }
}

fn find_null(v: &Value, path: String) -> Option<String> {
    match v {
        Value::Null => Some(if path.is_empty() { "<root>".into() } else { path }),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .find_map(|(i, x)| find_null(x, format!("{path}[{i}]"))),
        Value::Object(map) => map.iter().find_map(|(k, x)| find_null(x, format!("{path}.{k}"))),
        _ => None,
    }
}

fn polynomial_document(p: &RealPolynomial, tol: &Tolerance) -> Result<PolynomialDocument> {
    Ok(PolynomialDocument {
        coeffs: p.coeffs().to_vec(),
        roots: roots(p, tol)?.roots,
        display: p.to_string(),
    })
}

fn sequence_for(problem: &Problem) -> Result<MatrixMomentSequence> {
    match problem {
        Problem::Sequence(s) => Ok(s.clone()),
        Problem::Recurrence(spec) => Ok(spec.extend(spec.history_len() - 1)),
        Problem::RawSequence(_) | Problem::RawRecurrence(_) => Err(Error::Schema(
            "moment checks need symmetric matrices; set symmetric_mode to true".into(),
        )),
    }
}

/// Runs one truncated moment check. Recurrences are extended to `4r` terms.
pub fn run_check(doc: &ProblemDocument, kind: ProblemKind, tol: &Tolerance) -> Result<ResultDocument> {
    let (problem, diagnostics) = doc.problem(tol)?;
    let seq = sequence_for(&problem)?;
    let verdict = check(kind, &seq, tol)?;
    let mut out = ResultDocument::new("check", diagnostics);
    for c in &verdict.checked {
        if c.psd && c.min_eigenvalue.abs() <= c.threshold {
            out.diagnostics.push(format!(
                "{} is PSD only within tolerance (min eigenvalue {:e})",
                c.matrix, c.min_eigenvalue
            ));
        }
    }
    out.satisfied = Some(verdict.satisfied);
    out.verdicts.insert(kind.name().to_string(), verdict);
    Ok(out)
}

fn decision_document(d: TruncatedDecision, tol: &Tolerance, mut out: ResultDocument) -> Result<ResultDocument> {
    out.minimal_polynomial = Some(polynomial_document(&d.minimal_polynomial, tol)?);
    out.satisfied = Some(d.admits_psd_measure && d.hankel_psd);
    out.diagnostics.extend(d.diagnostics);
    let (weight_min_eigenvalues, weight_thresholds, boundary_atoms) = match &d.outcome {
        MeasureOutcome::Recovered(r) => (
            r.per_atom_min_eig.clone(),
            r.per_atom_threshold.clone(),
            r.boundary_atoms.clone(),
        ),
        _ => Default::default(),
    };
    out.equivalence = Some(EquivalenceDocument {
        order: d.order,
        hankel_psd: d.hankel_psd,
        hankel_min_eigenvalue: d.hankel_min_eigenvalue,
        hankel_threshold: d.hankel_threshold,
        all_weights_psd: d.admits_psd_measure,
        weight_min_eigenvalues,
        weight_thresholds,
        boundary_atoms,
        numerical_disagreement: d.numerical_disagreement,
    });
    out.outcome = Some(match d.outcome {
        MeasureOutcome::Recovered(r) => {
            out.residuals.insert("reconstruction".into(), r.reconstruction_residual);
            out.measure = Some(MeasureDocument::from_measure(&r.measure));
            OutcomeDocument::Recovered { atoms: r.measure.len() }
        }
        MeasureOutcome::RepeatedRoots { root, multiplicity } => OutcomeDocument::RepeatedRoots { root, multiplicity },
        MeasureOutcome::ComplexRoots { re, im } => OutcomeDocument::ComplexRoots { re, im },
    });
    Ok(out)
}

fn raw_solve(seq: &[Matrix], p: RealPolynomial, tol: &Tolerance, mut out: ResultDocument) -> Result<ResultDocument> {
    let doc = polynomial_document(&p, tol)?;
    let multiset = roots(&p, tol)?;
    out.minimal_polynomial = Some(doc);
    match nodes_from_roots(&multiset) {
        Ok(_) => {
            let m = recover_measure_raw(seq, &p, tol)?;
            let residual = reconstruction_residual(&m, seq);
            if residual > tol.residual_eps {
                out.diagnostics.push(format!(
                    "reconstruction residual {residual:e} exceeds residual_eps {:e}",
                    tol.residual_eps
                ));
            }
            out.residuals.insert("reconstruction".into(), residual);
            out.outcome = Some(OutcomeDocument::Recovered { atoms: m.len() });
            out.measure = Some(MeasureDocument::from_measure(&m));
            out.satisfied = Some(true);
        }
        Err(Error::RepeatedRoots { root, multiplicity }) => {
            out.outcome = Some(OutcomeDocument::RepeatedRoots { root, multiplicity });
            out.satisfied = Some(false);
        }
        Err(Error::ComplexRoots { re, im }) => {
            out.outcome = Some(OutcomeDocument::ComplexRoots { re, im });
            out.satisfied = Some(false);
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Minimal polynomial, roots and representing measure. In symmetric mode the
/// answer is "has a PSD atomic measure"; in raw mode it is "has any real
/// atomic measure" and no positivity is tested.
pub fn run_solve(doc: &ProblemDocument, tol: &Tolerance) -> Result<ResultDocument> {
    let (problem, diagnostics) = doc.problem(tol)?;
    let out = ResultDocument::new("solve", diagnostics);
    match problem {
        Problem::Sequence(seq) => decision_document(decide_sequence(&seq, tol)?, tol, out),
        Problem::Recurrence(spec) => decision_document(decide_truncated(&spec, tol)?, tol, out),
        Problem::RawSequence(seq) => {
            let p = minimal_polynomial_raw(&seq, tol)?;
            raw_solve(&seq, p, tol, out)
        }
        Problem::RawRecurrence(spec) => {
            let seq = spec.extend_matrices(spec.history_len() - 1);
            let p = spec.minimal_polynomial(tol)?;
            raw_solve(&seq, p, tol, out)
        }
    }
}

/// `S_0..S_n` of a measure.
pub fn run_reconstruct(measure: &MeasureDocument, n: usize) -> Result<ResultDocument> {
    let m = measure.to_measure()?;
    let mut out = ResultDocument::new("reconstruct", Vec::new());
    out.moments = Some(reconstruct_raw(&m, n).iter().map(Matrix::to_rows).collect());
    Ok(out)
}

/// Riesz functional of the matrix polynomial with ascending coefficients `poly`.
pub fn run_riesz(doc: &ProblemDocument, poly: &[Rows], tol: &Tolerance) -> Result<ResultDocument> {
    let (problem, diagnostics) = doc.problem(tol)?;
    let seq = match &problem {
        Problem::Recurrence(spec) => spec.extend(poly.len().max(spec.order()).saturating_sub(1)),
        _ => sequence_for(&problem)?,
    };
    let coeffs = poly
        .iter()
        .enumerate()
        .map(|(k, rows)| {
            check_square(rows, seq.dim(), &format!("poly[{k}]"))?;
            SymmetricMatrix::from_rows_checked(rows, tol.residual_eps)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ResultDocument::new("riesz", diagnostics);
    out.riesz = Some(riesz_eval(&seq, &coeffs)?);
    Ok(out)
}

pub fn parse_polynomial(text: &[u8]) -> Result<Vec<Rows>> {
    from_bytes(text)
}
