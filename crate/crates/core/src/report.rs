//! Named residual statistics with pass/fail verdicts.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    /// Exact identities and certifications.
    Hard,
    /// Discretisation residuals whose size depends on the mesh width.
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualEntry {
    pub name: String,
    pub max_abs: f64,
    pub rms: f64,
    pub tol: f64,
    pub pass: bool,
    pub kind: GateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub count: usize,
}

impl ResidualEntry {
    /// Summarises the magnitudes of `values`. NaN entries force a failure.
    pub fn from_values<I>(name: &str, values: I, tol: f64, kind: GateKind, h: Option<f64>) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let mut max_abs: f64 = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0;
        let mut nan = false;
        for v in values {
            nan |= v.is_nan();
            max_abs = max_abs.max(v.abs());
            sum_sq += v * v;
            count += 1;
        }
        if nan {
            max_abs = f64::NAN;
        }
        let rms = if count > 0 { (sum_sq / count as f64).sqrt() } else { 0.0 };
        Self {
            name: name.to_string(),
            max_abs,
            rms,
            tol,
            pass: max_abs <= tol,
            kind,
            h,
            count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_meta: Option<GridMeta>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_meta(meta: GridMeta) -> Self {
        Self {
            entries: Vec::new(),
            grid_meta: Some(meta),
        }
    }

    pub fn record<I>(&mut self, name: &str, values: I, tol: f64, kind: GateKind, h: Option<f64>) -> &ResidualEntry
    where
        I: IntoIterator<Item = f64>,
    {
        self.entries.push(ResidualEntry::from_values(name, values, tol, kind, h));
        self.entries.last().unwrap()
    }

    pub fn push(&mut self, entry: ResidualEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn hard_pass(&self) -> bool {
        self.entries.iter().filter(|e| e.kind == GateKind::Hard).all(|e| e.pass)
    }
}
