//! Dataset representation, CSV ingestion, sampling designs, and
//! cross-validation fold machinery.
//!
//! A dataset holds the triplet (X, L, LY): a feature matrix, a binary label
//! indicator, and a binary outcome observed only on labeled rows.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Dense row-major matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { data, rows, cols })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { data, rows: nrows, cols: ncols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// New matrix containing the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { data, rows: idx.len(), cols: self.cols }
    }
}

/// Observed data: features X, label indicator L, and outcome Y present
/// exactly on labeled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    label: Vec<bool>,
    outcome: Vec<Option<bool>>,
}

impl Dataset {
    /// Validates the LY structure: outcome present iff labeled, at least one
    /// labeled and one unlabeled unit, all features finite.
    pub fn new(features: Matrix, label: Vec<bool>, outcome: Vec<Option<bool>>) -> Result<Self> {
        let n = features.rows();
        if label.len() != n || outcome.len() != n {
            return Err(Error::InvalidArgument(format!(
                "length mismatch: {} feature rows, {} labels, {} outcomes",
                n,
                label.len(),
                outcome.len()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("need at least 2 units".into()));
        }
        for (i, (&l, o)) in label.iter().zip(&outcome).enumerate() {
            match (l, o) {
                (true, None) => {
                    return Err(Error::Consistency(format!("row {i}: labeled but outcome missing")))
                }
                (false, Some(_)) => {
                    return Err(Error::Consistency(format!("row {i}: outcome present but unlabeled")))
                }
                _ => {}
            }
        }
        let n1 = label.iter().filter(|&&l| l).count();
        if n1 == 0 || n1 == n {
            return Err(Error::Consistency(
                "need at least one labeled and one unlabeled unit".into(),
            ));
        }
        for i in 0..n {
            if features.row(i).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("row {i}: non-finite feature")));
            }
        }
        Ok(Self { features, label, outcome })
    }

    /// Bypasses invariant checks; for internal tests of degenerate inputs.
    #[cfg(test)]
    pub(crate) fn new_unchecked(
        features: Matrix,
        label: Vec<bool>,
        outcome: Vec<Option<bool>>,
    ) -> Self {
        Self { features, label, outcome }
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn feature_row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn is_labeled(&self, i: usize) -> bool {
        self.label[i]
    }

    pub fn label_f64(&self, i: usize) -> f64 {
        if self.label[i] {
            1.0
        } else {
            0.0
        }
    }

    pub fn labels(&self) -> &[bool] {
        &self.label
    }

    pub fn outcome(&self, i: usize) -> Option<bool> {
        self.outcome[i]
    }

    /// Outcome as 0/1, or 0 when unobserved. Every use site multiplies by L,
    /// so the fill value never leaks.
    pub fn outcome_f64(&self, i: usize) -> f64 {
        match self.outcome[i] {
            Some(true) => 1.0,
            _ => 0.0,
        }
    }

    pub fn labeled_count(&self) -> usize {
        self.label.iter().filter(|&&l| l).count()
    }
}

/// How labeled units entered the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingDesign {
    /// Units sampled i.i.d. from the population; rho is estimated.
    Random,
    /// k labeled units sampled per unlabeled unit; rho = k/(k+1) by design.
    MatchedCohort { k: u32 },
}

impl std::str::FromStr for SamplingDesign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("random") {
            return Ok(SamplingDesign::Random);
        }
        if let Some(rest) = s.strip_prefix("matched:") {
            let k: u32 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("invalid matched-cohort k: {rest:?}")))?;
            return Ok(SamplingDesign::MatchedCohort { k });
        }
        Err(Error::Parse(format!("unknown design {s:?}; expected 'random' or 'matched:K'")))
    }
}

/// Probability that a unit is labeled, under the given design.
///
/// Matched-cohort designs fix rho = k/(k+1) regardless of the realized
/// labeled fraction; random sampling uses the empirical fraction.
pub fn estimate_rho(dataset: &Dataset, design: SamplingDesign) -> Result<f64> {
    match design {
        SamplingDesign::MatchedCohort { k } => {
            if k == 0 {
                return Err(Error::InvalidArgument("matched-cohort k must be >= 1".into()));
            }
            Ok(f64::from(k) / f64::from(k + 1))
        }
        SamplingDesign::Random => {
            let n1 = dataset.labeled_count();
            if n1 == 0 || n1 == dataset.n() {
                return Err(Error::DegenerateDesign(
                    "all units share the same label under random sampling".into(),
                ));
            }
            Ok(n1 as f64 / dataset.n() as f64)
        }
    }
}

/// Partition of {0..n-1} into J validation folds of near-equal size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    num_folds: usize,
}

impl FoldAssignment {
    pub fn num_folds(&self) -> usize {
        self.num_folds
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    /// Fold index (0-based) of unit i.
    pub fn fold_of(&self, i: usize) -> usize {
        self.fold_of[i]
    }

    pub fn validation_indices(&self, j: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == j).collect()
    }

    pub fn training_indices(&self, j: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != j).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_folds];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_fold_args(n: usize, j: usize) -> Result<()> {
    if j < 2 || j > n {
        return Err(Error::InvalidFolds(format!("need 2 <= J <= n, got J={j}, n={n}")));
    }
    Ok(())
}

/// Random partition into J folds with sizes differing by at most one.
pub fn make_folds<R: Rng>(n: usize, j: usize, rng: &mut R) -> Result<FoldAssignment> {
    check_fold_args(n, j)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    deal_round_robin(&order, n, j)
}

/// Random partition stratified on the label, so labeled units are spread
/// across folds as evenly as possible. Fold sizes still differ by at most one
/// because the shuffled strata are concatenated and dealt round-robin.
pub fn make_stratified_folds<R: Rng>(
    labels: &[bool],
    j: usize,
    rng: &mut R,
) -> Result<FoldAssignment> {
    let n = labels.len();
    check_fold_args(n, j)?;
    let mut labeled: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
    let mut unlabeled: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
    labeled.shuffle(rng);
    unlabeled.shuffle(rng);
    labeled.extend_from_slice(&unlabeled);
    deal_round_robin(&labeled, n, j)
}

fn deal_round_robin(order: &[usize], n: usize, j: usize) -> Result<FoldAssignment> {
    let mut fold_of = vec![0usize; n];
    for (pos, &unit) in order.iter().enumerate() {
        fold_of[unit] = pos % j;
    }
    Ok(FoldAssignment { fold_of, num_folds: j })
}

/// Column naming for CSV ingestion and export.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub label: String,
    pub outcome: String,
    /// Feature columns, in order. `None` means every other column, in header
    /// order.
    pub features: Option<Vec<String>>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self { label: "L".into(), outcome: "Y".into(), features: None }
    }
}

fn parse_binary(raw: &str, what: &str, row: usize) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {row}: {what} {raw:?} is not numeric")))?;
    if v != 0.0 && v != 1.0 {
        return Err(Error::Parse(format!("row {row}: {what} must be 0 or 1, got {raw:?}")));
    }
    Ok(v)
}

/// Load a dataset from a headed CSV file.
///
/// Empty outcome cells (or the literal `NA`) mark unlabeled rows' missing Y.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
    };
    let label_idx = find(&schema.label)?;
    let outcome_idx = find(&schema.outcome)?;
    let feature_idx: Vec<usize> = match &schema.features {
        Some(names) => names.iter().map(|n| find(n)).collect::<Result<_>>()?,
        None => (0..headers.len()).filter(|&i| i != label_idx && i != outcome_idx).collect(),
    };
    if feature_idx.is_empty() {
        return Err(Error::Schema("no feature columns".into()));
    }

    let mut rows = Vec::new();
    let mut label = Vec::new();
    let mut outcome = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let get = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| Error::Parse(format!("row {r}: short record")))
        };
        let l = parse_binary(get(label_idx)?, "label", r)? == 1.0;
        let raw_y = get(outcome_idx)?.trim();
        let y = if raw_y.is_empty() || raw_y.eq_ignore_ascii_case("na") {
            None
        } else {
            Some(parse_binary(raw_y, "outcome", r)? == 1.0)
        };
        match (l, y) {
            (true, None) => {
                return Err(Error::Consistency(format!("row {r}: labeled row has no outcome")))
            }
            (false, Some(_)) => {
                return Err(Error::Consistency(format!("row {r}: unlabeled row carries an outcome")))
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(feature_idx.len());
        for &i in &feature_idx {
            let raw = get(i)?;
            let v: f64 = raw.trim().parse().map_err(|_| {
                Error::Parse(format!("row {r}: feature {:?} = {raw:?} is not numeric", headers[i]))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {r}: non-finite feature {raw:?}")));
            }
            row.push(v);
        }
        rows.push(row);
        label.push(l);
        outcome.push(y);
    }
    Dataset::new(Matrix::from_rows(rows)?, label, outcome)
}

/// Write a dataset as CSV. Feature columns take the schema names when given,
/// `x1..xd` otherwise; missing outcomes are empty cells. Values round-trip
/// exactly through `load_csv`.
pub fn write_csv(dataset: &Dataset, path: &Path, schema: &CsvSchema) -> Result<()> {
    let d = dataset.d();
    let names: Vec<String> = match &schema.features {
        Some(names) if names.len() == d => names.clone(),
        Some(names) => {
            return Err(Error::Schema(format!(
                "schema names {} columns, dataset has {d}",
                names.len()
            )))
        }
        None => (1..=d).map(|j| format!("x{j}")).collect(),
    };
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = names;
    header.push(schema.label.clone());
    header.push(schema.outcome.clone());
    writer.write_record(&header)?;
    for i in 0..dataset.n() {
        let mut record: Vec<String> =
            dataset.feature_row(i).iter().map(|v| format!("{v}")).collect();
        record.push(if dataset.is_labeled(i) { "1".into() } else { "0".into() });
        record.push(match dataset.outcome(i) {
            Some(true) => "1".into(),
            Some(false) => "0".into(),
            None => String::new(),
        });
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
