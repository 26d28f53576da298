//! Labeled data containers, candidate/test partitions, file ingestion and
//! run configuration.
//!
//! The single ingestion format is CSV with a mandatory first column of row
//! identifiers and an optional header row of column identifiers. Identifier
//! comparison is exact byte equality after trimming surrounding whitespace.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::solution::SubsetSolution;

/// Dense numeric matrix with row identifiers and optional column
/// identifiers. Immutable after construction; safe to share across worker
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    row_ids: Vec<String>,
    col_ids: Option<Vec<String>>,
    values: Matrix,
}

impl LabeledMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Option<Vec<String>>, values: Matrix) -> Result<Self> {
        if row_ids.len() != values.rows() {
            return Err(Error::Dimension(format!(
                "{} row ids for {} rows",
                row_ids.len(),
                values.rows()
            )));
        }
        check_unique(&row_ids)?;
        if let Some(cols) = &col_ids {
            if cols.len() != values.cols() {
                return Err(Error::Dimension(format!(
                    "{} column ids for {} columns",
                    cols.len(),
                    values.cols()
                )));
            }
            check_unique(cols)?;
        }
        Ok(Self {
            row_ids,
            col_ids,
            values,
        })
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> Option<&[String]> {
        self.col_ids.as_deref()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn nrows(&self) -> usize {
        self.values.rows()
    }

    pub fn ncols(&self) -> usize {
        self.values.cols()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.row_ids.iter().position(|r| r == id)
    }

    /// Transposed copy: column ids become row ids. Columns without ids get
    /// synthetic c1..cN names so the result still satisfies the invariants.
    pub fn transposed(&self) -> LabeledMatrix {
        let new_rows = match &self.col_ids {
            Some(ids) => ids.clone(),
            None => (1..=self.ncols()).map(|i| format!("c{i}")).collect(),
        };
        let t = Matrix::from_dmatrix(self.values.dmat().transpose());
        LabeledMatrix {
            row_ids: new_rows,
            col_ids: Some(self.row_ids.clone()),
            values: t,
        }
    }
}

fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if id.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty identifier".into(),
            });
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

/// Reads a labeled matrix from CSV. The first column holds row identifiers;
/// when `has_col_header` is set the first row holds column identifiers (its
/// first cell names the id column and is ignored).
pub fn load_labeled_matrix(path: impl AsRef<Path>, has_col_header: bool) -> Result<LabeledMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_labeled_matrix(file, has_col_header)
}

/// Same as [`load_labeled_matrix`] but from any reader.
pub fn read_labeled_matrix(reader: impl std::io::Read, has_col_header: bool) -> Result<LabeledMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let mut line = 0usize;

    let col_ids = if has_col_header {
        line += 1;
        match records.next() {
            Some(rec) => {
                let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
                if rec.len() < 2 {
                    return Err(parse_err(line, "header needs at least one column id".into()));
                }
                Some(rec.iter().skip(1).map(str::to_owned).collect::<Vec<_>>())
            }
            None => return Err(Error::EmptyInput),
        }
    } else {
        None
    };

    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    for rec in records {
        line += 1;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        if rec.len() == 1 && rec.get(0).map_or(true, str::is_empty) {
            continue; // blank line
        }
        if rec.len() < 2 {
            return Err(parse_err(line, "row needs an id and at least one value".into()));
        }
        let ncols = rec.len() - 1;
        match width {
            None => width = Some(ncols),
            Some(w) if w != ncols => {
                return Err(parse_err(
                    line,
                    format!("ragged row: {ncols} values, expected {w}"),
                ))
            }
            _ => {}
        }
        let id = rec.get(0).unwrap_or("").to_owned();
        if id.is_empty() {
            return Err(parse_err(line, "empty row identifier".into()));
        }
        row_ids.push(id);
        for cell in rec.iter().skip(1) {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric cell '{cell}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite cell '{cell}'")));
            }
            data.push(v);
        }
    }

    if row_ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let width = width.unwrap();
    if let Some(cols) = &col_ids {
        if cols.len() != width {
            return Err(parse_err(
                1,
                format!("header has {} ids for {width} value columns", cols.len()),
            ));
        }
    }
    let values = Matrix::from_row_major(row_ids.len(), width, data)?;
    LabeledMatrix::new(row_ids, col_ids, values)
}

fn parse_err(line: usize, msg: String) -> Error {
    Error::Parse { line, msg }
}

/// Writes a labeled matrix as CSV, bit-exact for round-tripping (shortest
/// round-trip float formatting).
pub fn write_labeled_matrix(path: impl AsRef<Path>, m: &LabeledMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(cols) = m.col_ids() {
        writeln!(out, "id,{}", cols.join(",")).map_err(io_err)?;
    }
    for (i, id) in m.row_ids().iter().enumerate() {
        let mut row = String::from(id.as_str());
        for j in 0..m.ncols() {
            row.push(',');
            row.push_str(&format!("{}", m.values().get(i, j)));
        }
        writeln!(out, "{row}").map_err(io_err)?;
    }
    Ok(())
}

/// Candidate/test split plus the number of rows to select.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    candidates: Vec<String>,
    test: Option<Vec<String>>,
    ntoselect: usize,
}

impl PartitionPlan {
    /// Candidate identifiers in canonical (byte-sorted) order.
    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn test(&self) -> Option<&[String]> {
        self.test.as_deref()
    }

    pub fn ntoselect(&self) -> usize {
        self.ntoselect
    }
}

/// Validates a partition against the labeled matrix. When `candidates` is
/// omitted it defaults to all row ids of P minus the test set.
pub fn validate_partition(
    p: &LabeledMatrix,
    candidates: Option<&[String]>,
    test: Option<&[String]>,
    ntoselect: usize,
) -> Result<PartitionPlan> {
    let known: HashSet<&str> = p.row_ids().iter().map(String::as_str).collect();
    if let Some(test) = test {
        for id in test {
            if !known.contains(id.as_str()) {
                return Err(Error::UnknownId(id.clone()));
            }
        }
    }
    let test_set: HashSet<&str> = test
        .map(|t| t.iter().map(String::as_str).collect())
        .unwrap_or_default();

    let mut cand: Vec<String> = match candidates {
        Some(list) => {
            let mut seen = HashSet::new();
            let mut out = Vec::with_capacity(list.len());
            for id in list {
                if !known.contains(id.as_str()) {
                    return Err(Error::UnknownId(id.clone()));
                }
                if test_set.contains(id.as_str()) {
                    return Err(Error::Overlap(id.clone()));
                }
                if seen.insert(id.as_str()) {
                    out.push(id.clone());
                }
            }
            out
        }
        None => p
            .row_ids()
            .iter()
            .filter(|id| !test_set.contains(id.as_str()))
            .cloned()
            .collect(),
    };
    cand.sort_unstable();

    if ntoselect == 0 || ntoselect > cand.len() {
        return Err(Error::Size {
            ntoselect,
            navail: cand.len(),
        });
    }

    let test = test.map(|t| {
        let mut t: Vec<String> = t.to_vec();
        t.sort_unstable();
        t.dedup();
        t
    });

    Ok(PartitionPlan {
        candidates: cand,
        test,
        ntoselect,
    })
}

/// Extracts rows by identifier, in the order given. Column labels are
/// preserved.
pub fn subset_rows(p: &LabeledMatrix, ids: &[String]) -> Result<LabeledMatrix> {
    let mut index = std::collections::HashMap::with_capacity(p.nrows());
    for (i, id) in p.row_ids().iter().enumerate() {
        index.insert(id.as_str(), i);
    }
    let mut rows = Vec::with_capacity(ids.len());
    for id in ids {
        match index.get(id.as_str()) {
            Some(&i) => rows.push(i),
            None => return Err(Error::UnknownId(id.clone())),
        }
    }
    let values = p.values().select_rows(&rows);
    LabeledMatrix::new(ids.to_vec(), p.col_ids().map(<[String]>::to_vec), values)
}

/// All genetic-algorithm parameters. Defaults follow the package's
/// suggested settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub npop: usize,
    pub nelite: usize,
    pub keepbest: bool,
    pub tabu: bool,
    pub tabumemsize: usize,
    pub mutprob: f64,
    /// Mean of the Poisson draw deciding the number of swaps per mutation.
    pub mutintensity: f64,
    pub niterations: usize,
    pub minitbefstop: usize,
    /// Look-ahead regression is applied during the first `niterreg`
    /// iterations.
    pub niterreg: usize,
    /// Shrinkage parameter forwarded to the criterion.
    pub lambda: f64,
    pub tolconv: f64,
    pub workers: usize,
    pub seed: u64,
    pub init_pop: Option<Vec<SubsetSolution>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            npop: 100,
            nelite: 5,
            keepbest: true,
            tabu: false,
            tabumemsize: 1,
            mutprob: 0.8,
            mutintensity: 1.0,
            niterations: 500,
            minitbefstop: 100,
            niterreg: 5,
            lambda: 1e-6,
            tolconv: 1e-7,
            workers: 1,
            seed: 0,
            init_pop: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.npop < 2 {
            return Err(Error::Config("npop must be at least 2".into()));
        }
        if self.nelite == 0 || self.nelite >= self.npop {
            return Err(Error::Config(
                "nelite must satisfy 1 <= nelite < npop".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutprob) {
            return Err(Error::Config("mutprob must be in [0, 1]".into()));
        }
        if self.mutintensity < 0.0 {
            return Err(Error::Config("mutintensity must be nonnegative".into()));
        }
        if self.niterations == 0 {
            return Err(Error::Config("niterations must be positive".into()));
        }
        if self.lambda <= 0.0 {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if self.tolconv <= 0.0 {
            return Err(Error::Config("tolconv must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Loads overrides from a TOML file whose keys match the field names
    /// exactly, then applies them over the defaults. Unknown keys are
    /// rejected.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let overrides: ConfigOverrides =
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        let mut config = RunConfig::default();
        overrides.apply(&mut config)?;
        Ok(config)
    }
}

/// Partial configuration as read from a config file; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub npop: Option<usize>,
    pub nelite: Option<usize>,
    pub keepbest: Option<bool>,
    pub tabu: Option<bool>,
    pub tabumemsize: Option<usize>,
    pub mutprob: Option<f64>,
    pub mutintensity: Option<f64>,
    pub niterations: Option<usize>,
    pub minitbefstop: Option<usize>,
    pub niterreg: Option<usize>,
    pub lambda: Option<f64>,
    pub tolconv: Option<f64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub init_pop: Option<Vec<Vec<String>>>,
}

impl ConfigOverrides {
    pub fn apply(self, config: &mut RunConfig) -> Result<()> {
        macro_rules! set {
            ($f:ident) => {
                if let Some(v) = self.$f {
                    config.$f = v;
                }
            };
        }
        set!(npop);
        set!(nelite);
        set!(keepbest);
        set!(tabu);
        set!(tabumemsize);
        set!(mutprob);
        set!(mutintensity);
        set!(niterations);
        set!(minitbefstop);
        set!(niterreg);
        set!(lambda);
        set!(tolconv);
        set!(workers);
        set!(seed);
        if let Some(pop) = self.init_pop {
            let mut solutions = Vec::with_capacity(pop.len());
            for ids in pop {
                solutions.push(SubsetSolution::new(ids)?);
            }
            config.init_pop = Some(solutions);
        }
        Ok(())
    }
}

/// A ranked solution paired with its criterion value.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSolution {
    pub solution: SubsetSolution,
    pub value: f64,
}

/// Result of a run: the `nelite` best solutions in ascending criterion
/// order plus the per-iteration best-criterion trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub ranked: Vec<RankedSolution>,
    pub trace: Vec<f64>,
    pub seed_used: u64,
    pub evaluations: u64,
}

impl RunResult {
    pub fn best(&self) -> &RankedSolution {
        &self.ranked[0]
    }
}
