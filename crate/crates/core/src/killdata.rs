//! Domain model for mutation analysis results and their on-disk format.
//!
//! A dataset directory holds four tab-separated files, each with a header row:
//!
//! | file             | columns                                                          |
//! |------------------|------------------------------------------------------------------|
//! | `mutants.tsv`    | `mutant_id  file_path  line_number  operator`                    |
//! | `tests.tsv`      | `test_id  suite  name  original_outcome  original_error_signature` |
//! | `executions.tsv` | `mutant_id  test_id  outcome  error_signature`                   |
//! | `faults.tsv`     | `file_path  line_number` (optional)                              |
//!
//! Executions are sparse: a `(mutant, test)` pair without a record behaved
//! exactly like the original program.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MUTANTS_FILE: &str = "mutants.tsv";
pub const TESTS_FILE: &str = "tests.tsv";
pub const EXECUTIONS_FILE: &str = "executions.tsv";
pub const FAULTS_FILE: &str = "faults.tsv";

const MUTANTS_HEADER: [&str; 4] = ["mutant_id", "file_path", "line_number", "operator"];
const TESTS_HEADER: [&str; 5] = [
    "test_id",
    "suite",
    "name",
    "original_outcome",
    "original_error_signature",
];
const EXECUTIONS_HEADER: [&str; 4] = ["mutant_id", "test_id", "outcome", "error_signature"];
const FAULTS_HEADER: [&str; 2] = ["file_path", "line_number"];

/// A program statement, identified by its file and 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Statement {
    pub file: String,
    pub line: u32,
}

impl Statement {
    pub fn new(file: impl Into<String>, line: u32) -> Self {
        Self {
            file: file.into(),
            line,
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantMeta {
    pub mutant_id: String,
    pub file_path: String,
    pub line_number: u32,
    pub operator: String,
}

impl MutantMeta {
    pub fn statement(&self) -> Statement {
        Statement::new(self.file_path.clone(), self.line_number)
    }
}

/// Outcome of a test on the original program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a test on a mutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    Timeout,
    Crash,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "PASS" => Ok(Verdict::Pass),
            "FAIL" => Ok(Verdict::Fail),
            other => Err(format!("expected PASS or FAIL, found {other:?}")),
        }
    }
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Timeout => "TIMEOUT",
            Outcome::Crash => "CRASH",
        }
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "PASS" => Ok(Outcome::Pass),
            "FAIL" => Ok(Outcome::Fail),
            "TIMEOUT" => Ok(Outcome::Timeout),
            "CRASH" => Ok(Outcome::Crash),
            other => Err(format!(
                "expected PASS, FAIL, TIMEOUT or CRASH, found {other:?}"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestMeta {
    pub test_id: String,
    pub suite: String,
    pub name: String,
    pub original_outcome: Verdict,
    /// Only present for originally failing tests.
    pub original_error_signature: Option<String>,
}

impl TestMeta {
    pub fn is_failing(&self) -> bool {
        self.original_outcome == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionRecord {
    pub mutant_id: String,
    pub test_id: String,
    pub outcome: Outcome,
    pub error_signature: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub faulty_statements: BTreeSet<Statement>,
}

impl GroundTruth {
    pub fn new(faulty_statements: impl IntoIterator<Item = Statement>) -> Self {
        Self {
            faulty_statements: faulty_statements.into_iter().collect(),
        }
    }

    pub fn contains(&self, statement: &Statement) -> bool {
        self.faulty_statements.contains(statement)
    }

    pub fn is_empty(&self) -> bool {
        self.faulty_statements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.faulty_statements.len()
    }
}

/// A validated set of mutation analysis results.
///
/// Construct through [`Dataset::new`] or [`load_dataset`]; both enforce id
/// uniqueness and referential integrity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    mutants: Vec<MutantMeta>,
    tests: Vec<TestMeta>,
    executions: Vec<ExecutionRecord>,
    ground_truth: Option<GroundTruth>,
}

impl Dataset {
    pub fn new(
        mutants: Vec<MutantMeta>,
        tests: Vec<TestMeta>,
        executions: Vec<ExecutionRecord>,
        ground_truth: Option<GroundTruth>,
    ) -> Result<Self> {
        let mut mutant_ids = HashSet::with_capacity(mutants.len());
        for (i, m) in mutants.iter().enumerate() {
            let line = i + 2;
            check_field(MUTANTS_FILE, line, "mutant_id", &m.mutant_id)?;
            if m.line_number == 0 {
                return Err(malformed(MUTANTS_FILE, line, "line_number must be >= 1"));
            }
            if !mutant_ids.insert(m.mutant_id.as_str()) {
                return Err(Error::DuplicateId {
                    file: MUTANTS_FILE.into(),
                    line,
                    id: m.mutant_id.clone(),
                });
            }
        }

        let mut test_ids = HashSet::with_capacity(tests.len());
        for (i, t) in tests.iter().enumerate() {
            let line = i + 2;
            check_field(TESTS_FILE, line, "test_id", &t.test_id)?;
            match (&t.original_outcome, &t.original_error_signature) {
                (Verdict::Pass, Some(_)) => {
                    return Err(malformed(
                        TESTS_FILE,
                        line,
                        "passing test carries an error signature",
                    ))
                }
                (_, Some(sig)) if sig.is_empty() => {
                    return Err(malformed(
                        TESTS_FILE,
                        line,
                        "empty signature must be absent",
                    ))
                }
                _ => {}
            }
            if !test_ids.insert(t.test_id.as_str()) {
                return Err(Error::DuplicateId {
                    file: TESTS_FILE.into(),
                    line,
                    id: t.test_id.clone(),
                });
            }
        }

        let mut pairs = HashSet::with_capacity(executions.len());
        for (i, e) in executions.iter().enumerate() {
            let line = i + 2;
            if !mutant_ids.contains(e.mutant_id.as_str()) {
                return Err(Error::DanglingReference {
                    file: EXECUTIONS_FILE.into(),
                    line,
                    id: e.mutant_id.clone(),
                });
            }
            if !test_ids.contains(e.test_id.as_str()) {
                return Err(Error::DanglingReference {
                    file: EXECUTIONS_FILE.into(),
                    line,
                    id: e.test_id.clone(),
                });
            }
            if matches!(&e.error_signature, Some(s) if s.is_empty()) {
                return Err(malformed(
                    EXECUTIONS_FILE,
                    line,
                    "empty signature must be absent",
                ));
            }
            if !pairs.insert((e.mutant_id.as_str(), e.test_id.as_str())) {
                return Err(Error::DuplicateId {
                    file: EXECUTIONS_FILE.into(),
                    line,
                    id: format!("({}, {})", e.mutant_id, e.test_id),
                });
            }
        }

        Ok(Self {
            mutants,
            tests,
            executions,
            ground_truth,
        })
    }

    pub fn mutants(&self) -> &[MutantMeta] {
        &self.mutants
    }

    pub fn tests(&self) -> &[TestMeta] {
        &self.tests
    }

    pub fn executions(&self) -> &[ExecutionRecord] {
        &self.executions
    }

    pub fn ground_truth(&self) -> Option<&GroundTruth> {
        self.ground_truth.as_ref()
    }

    pub fn with_ground_truth(mut self, ground_truth: Option<GroundTruth>) -> Self {
        self.ground_truth = ground_truth;
        self
    }

    pub fn failing_test_count(&self) -> usize {
        self.tests.iter().filter(|t| t.is_failing()).count()
    }

    /// Writes the dataset in the directory format read by [`load_dataset`].
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;

        let mut out = header(&MUTANTS_HEADER);
        for m in &self.mutants {
            push_row(
                &mut out,
                &[
                    &m.mutant_id,
                    &m.file_path,
                    &m.line_number.to_string(),
                    &m.operator,
                ],
            )?;
        }
        fs::write(dir.join(MUTANTS_FILE), out)?;

        let mut out = header(&TESTS_HEADER);
        for t in &self.tests {
            push_row(
                &mut out,
                &[
                    &t.test_id,
                    &t.suite,
                    &t.name,
                    t.original_outcome.as_str(),
                    t.original_error_signature.as_deref().unwrap_or(""),
                ],
            )?;
        }
        fs::write(dir.join(TESTS_FILE), out)?;

        let mut out = header(&EXECUTIONS_HEADER);
        for e in &self.executions {
            push_row(
                &mut out,
                &[
                    &e.mutant_id,
                    &e.test_id,
                    e.outcome.as_str(),
                    e.error_signature.as_deref().unwrap_or(""),
                ],
            )?;
        }
        fs::write(dir.join(EXECUTIONS_FILE), out)?;

        if let Some(truth) = &self.ground_truth {
            write_ground_truth(dir.join(FAULTS_FILE), truth)?;
        }
        Ok(())
    }
}

pub fn write_ground_truth(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    let mut out = header(&FAULTS_HEADER);
    for s in &truth.faulty_statements {
        push_row(&mut out, &[&s.file, &s.line.to_string()])?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Loads and validates a dataset directory.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();

    let mutants = parse_table(&dir.join(MUTANTS_FILE), &MUTANTS_HEADER, |cells, line| {
        Ok(MutantMeta {
            mutant_id: cells[0].to_owned(),
            file_path: cells[1].to_owned(),
            line_number: parse_line_number(MUTANTS_FILE, line, cells[2])?,
            operator: cells[3].to_owned(),
        })
    })?;

    let tests = parse_table(&dir.join(TESTS_FILE), &TESTS_HEADER, |cells, line| {
        Ok(TestMeta {
            test_id: cells[0].to_owned(),
            suite: cells[1].to_owned(),
            name: cells[2].to_owned(),
            original_outcome: cells[3]
                .parse()
                .map_err(|e: String| malformed(TESTS_FILE, line, e))?,
            original_error_signature: non_empty(cells[4]),
        })
    })?;

    let executions = parse_table(
        &dir.join(EXECUTIONS_FILE),
        &EXECUTIONS_HEADER,
        |cells, line| {
            Ok(ExecutionRecord {
                mutant_id: cells[0].to_owned(),
                test_id: cells[1].to_owned(),
                outcome: cells[2]
                    .parse()
                    .map_err(|e: String| malformed(EXECUTIONS_FILE, line, e))?,
                error_signature: non_empty(cells[3]),
            })
        },
    )?;

    let faults_path = dir.join(FAULTS_FILE);
    let ground_truth = if faults_path.exists() {
        Some(load_ground_truth(&faults_path)?)
    } else {
        None
    };

    Dataset::new(mutants, tests, executions, ground_truth)
}

/// Reads a `faults.tsv` file on its own.
pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let rows = parse_table(path, &FAULTS_HEADER, |cells, line| {
        Ok((
            line,
            Statement::new(cells[0], parse_line_number(FAULTS_FILE, line, cells[1])?),
        ))
    })?;
    let mut truth = GroundTruth::default();
    for (line, statement) in rows {
        if !truth.faulty_statements.insert(statement.clone()) {
            return Err(Error::DuplicateId {
                file: FAULTS_FILE.into(),
                line,
                id: statement.to_string(),
            });
        }
    }
    Ok(truth)
}

/// Returns the deterministic mutant (row) and test (column) orders.
///
/// Mutants sort by `(file_path, line_number, mutant_id)`. Tests are grouped by
/// suite in lexicographic suite order and sorted by `(name, test_id)` inside
/// each suite.
pub fn order_axes(dataset: &Dataset) -> (Vec<String>, Vec<String>) {
    let mut mutants: Vec<&MutantMeta> = dataset.mutants.iter().collect();
    mutants.sort_by(|a, b| {
        (&a.file_path, a.line_number, &a.mutant_id).cmp(&(
            &b.file_path,
            b.line_number,
            &b.mutant_id,
        ))
    });
    let mut tests: Vec<&TestMeta> = dataset.tests.iter().collect();
    tests.sort_by(|a, b| (&a.suite, &a.name, &a.test_id).cmp(&(&b.suite, &b.name, &b.test_id)));
    (
        mutants.into_iter().map(|m| m.mutant_id.clone()).collect(),
        tests.into_iter().map(|t| t.test_id.clone()).collect(),
    )
}

/// Index from mutant id to its metadata.
pub(crate) fn mutant_index(dataset: &Dataset) -> HashMap<&str, &MutantMeta> {
    dataset
        .mutants
        .iter()
        .map(|m| (m.mutant_id.as_str(), m))
        .collect()
}

fn parse_table<T>(
    path: &Path,
    expected_header: &[&str],
    mut parse_row: impl FnMut(&[&str], usize) -> Result<T>,
) -> Result<Vec<T>> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => return Err(e.into()),
    };

    let body = text.strip_suffix('\n').unwrap_or(&text);
    let mut lines = body.split('\n');
    let header_line = lines.next().unwrap_or("");
    let header: Vec<&str> = header_line.split('\t').collect();
    if header != expected_header {
        return Err(malformed(
            &file_name,
            1,
            format!("expected header {:?}", expected_header.join("\t")),
        ));
    }

    let mut rows = Vec::new();
    if body.len() == header_line.len() {
        return Ok(rows);
    }
    for (i, raw) in lines.enumerate() {
        let line = i + 2;
        if raw.ends_with('\r') {
            return Err(malformed(
                &file_name,
                line,
                "CR line endings are not supported",
            ));
        }
        let cells: Vec<&str> = raw.split('\t').collect();
        if cells.len() != expected_header.len() {
            return Err(malformed(
                &file_name,
                line,
                format!(
                    "expected {} fields, found {}",
                    expected_header.len(),
                    cells.len()
                ),
            ));
        }
        rows.push(parse_row(&cells, line)?);
    }
    Ok(rows)
}

fn parse_line_number(file: &str, line: usize, raw: &str) -> Result<u32> {
    match raw.parse::<u32>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(malformed(
            file,
            line,
            format!("line_number must be a positive integer, found {raw:?}"),
        )),
    }
}

fn check_field(file: &str, line: usize, name: &str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(malformed(file, line, format!("{name} is empty")));
    }
    Ok(())
}

fn non_empty(raw: &str) -> Option<String> {
    (!raw.is_empty()).then(|| raw.to_owned())
}

fn malformed(file: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedRow {
        file: file.to_owned(),
        line,
        reason: reason.into(),
    }
}

fn header(columns: &[&str]) -> String {
    let mut out = columns.join("\t");
    out.push('\n');
    out
}

pub(crate) fn push_row(out: &mut String, cells: &[&str]) -> Result<()> {
    for (i, cell) in cells.iter().enumerate() {
        if cell.contains(['\t', '\n', '\r']) {
            return Err(Error::UnwritableField((*cell).to_owned()));
        }
        if i > 0 {
            out.push('\t');
        }
        out.push_str(cell);
    }
    out.push('\n');
    Ok(())
}
