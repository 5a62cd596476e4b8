use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// First line of every CSV report.
pub const CSV_HEADER_COMMENT: &str = "# ballkit-report v1";

/// Column order of the CSV format.
pub const CSV_COLUMNS: [&str; 19] = [
    "name",
    "d",
    "k",
    "l",
    "r",
    "lambda",
    "n",
    "seed",
    "trial",
    "lhs",
    "rhs",
    "stderr_lhs",
    "stderr_rhs",
    "slack",
    "pass",
    "path",
    "vP",
    "vQ",
    "theorem_applicable",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalPath {
    #[serde(rename = "exact2d")]
    Exact2d,
    #[serde(rename = "mc")]
    Mc,
}

impl EvalPath {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalPath::Exact2d => "exact2d",
            EvalPath::Mc => "mc",
        }
    }

    /// `Mc` if either side is.
    pub fn join(self, other: EvalPath) -> EvalPath {
        if self == EvalPath::Mc || other == EvalPath::Mc {
            EvalPath::Mc
        } else {
            EvalPath::Exact2d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Parameters attached to a report; unset entries are left blank.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trial: Option<usize>,
}

impl Params {
    pub fn dim(d: usize) -> Self {
        Params {
            d: Some(d),
            ..Params::default()
        }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn trial(mut self, trial: usize) -> Self {
        self.trial = Some(trial);
        self
    }
}

/// Outcome of one numerical comparison `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub params: Params,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr_lhs: f64,
    pub stderr_rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub path: EvalPath,
    #[serde(rename = "vP", skip_serializing_if = "Option::is_none", default)]
    pub v_p: Option<f64>,
    #[serde(rename = "vQ", skip_serializing_if = "Option::is_none", default)]
    pub v_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theorem_applicable: Option<bool>,
}

/// `lhs <= rhs + 3 (se_lhs + se_rhs) + 1e-9 max(1, |rhs|)`; NaN never passes.
pub fn passes(lhs: f64, rhs: f64, stderr_lhs: f64, stderr_rhs: f64) -> bool {
    lhs <= rhs + 3.0 * (stderr_lhs + stderr_rhs) + 1e-9 * rhs.abs().max(1.0)
}

impl InequalityReport {
    pub fn new(
        name: &str,
        params: Params,
        lhs: f64,
        rhs: f64,
        stderr_lhs: f64,
        stderr_rhs: f64,
        path: EvalPath,
    ) -> Self {
        InequalityReport {
            name: name.to_string(),
            params,
            lhs,
            rhs,
            stderr_lhs,
            stderr_rhs,
            slack: rhs - lhs,
            pass: passes(lhs, rhs, stderr_lhs, stderr_rhs),
            path,
            v_p: None,
            v_q: None,
            theorem_applicable: None,
        }
    }

    pub fn exact(name: &str, params: Params, lhs: f64, rhs: f64) -> Self {
        InequalityReport::new(name, params, lhs, rhs, 0.0, 0.0, EvalPath::Exact2d)
    }

    /// `slack / max(|rhs|, tiny)`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / self.rhs.abs().max(f64::MIN_POSITIVE)
    }

    fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let p = &self.params;
        let cells = [
            self.name.clone(),
            opt(p.d),
            opt(p.k),
            opt(p.l),
            opt(p.r.map(num)),
            opt(p.lambda.map(num)),
            opt(p.n),
            opt(p.seed),
            opt(p.trial),
            num(self.lhs),
            num(self.rhs),
            num(self.stderr_lhs),
            num(self.stderr_rhs),
            num(self.slack),
            self.pass.to_string(),
            self.path.as_str().to_string(),
            opt(self.v_p.map(num)),
            opt(self.v_q.map(num)),
            opt(self.theorem_applicable),
        ];
        cells.join(",")
    }
}

// shortest round-trip form, switching to exponent notation for extreme magnitudes
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(mut out: W, reports: &[InequalityReport]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER_COMMENT}")?;
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_json_lines<W: Write>(mut out: W, reports: &[InequalityReport]) -> io::Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).map_err(io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_reports<W: Write>(
    out: W,
    reports: &[InequalityReport],
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(out, reports),
        Format::Json => write_json_lines(out, reports),
    }
}
