//! Weak/strong kill classification and kill matrix construction.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::killdata::{order_axes, push_row, Dataset, ExecutionRecord, Outcome, TestMeta, Verdict};
use crate::matrix::Matrix;
use crate::Result;

/// Kill relation between one mutant and one test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum KillClass {
    Survive = 0,
    /// Same outcome as the original run, different error signature.
    Weak = 1,
    /// The pass/fail outcome itself changed.
    Strong = 2,
}

impl KillClass {
    pub fn is_killed(self) -> bool {
        self != KillClass::Survive
    }
}

/// Numeric view of a matrix cell, so the denoiser accepts any kill matrix.
pub trait CellValue: Copy {
    fn value(self) -> f64;
}

impl CellValue for bool {
    fn value(self) -> f64 {
        if self {
            1.0
        } else {
            0.0
        }
    }
}

impl CellValue for KillClass {
    fn value(self) -> f64 {
        self as u8 as f64
    }
}

impl CellValue for f64 {
    fn value(self) -> f64 {
        self
    }
}

/// A mutant x test matrix on ordered axes, with the original-run failing
/// flags aligned to the columns.
#[derive(Debug, Clone, PartialEq)]
pub struct KillMatrix<T> {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub fail_vector: Vec<bool>,
    pub cells: Matrix<T>,
}

pub type BooleanKillMatrix = KillMatrix<bool>;
pub type EnhancedKillMatrix = KillMatrix<KillClass>;

impl<T: CellValue> KillMatrix<T> {
    pub fn values(&self) -> Matrix<f64> {
        self.cells.map(|c| c.value())
    }
}

impl<T> KillMatrix<T> {
    pub fn with_cells<U>(&self, cells: Matrix<U>) -> KillMatrix<U> {
        debug_assert_eq!(cells.shape(), self.cells.shape());
        KillMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            fail_vector: self.fail_vector.clone(),
            cells,
        }
    }
}

/// Normalized (pass/fail, signature) view of a mutant run. Abnormal
/// terminations count as failures carrying a fixed signature.
fn normalize(record: &ExecutionRecord) -> (Verdict, Option<&str>) {
    match record.outcome {
        Outcome::Pass => (Verdict::Pass, record.error_signature.as_deref()),
        Outcome::Fail => (Verdict::Fail, record.error_signature.as_deref()),
        Outcome::Timeout => (Verdict::Fail, Some("TIMEOUT")),
        Outcome::Crash => (Verdict::Fail, Some("CRASH")),
    }
}

pub fn classify_kill(record: Option<&ExecutionRecord>, test: &TestMeta) -> KillClass {
    let Some(record) = record else {
        return KillClass::Survive;
    };
    let (verdict, signature) = normalize(record);
    if verdict != test.original_outcome {
        KillClass::Strong
    } else if signature != test.original_error_signature.as_deref() {
        KillClass::Weak
    } else {
        KillClass::Survive
    }
}

fn classify_all(dataset: &Dataset) -> KillMatrix<KillClass> {
    let (rows, cols) = order_axes(dataset);
    let row_of: HashMap<&str, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let tests: HashMap<&str, &TestMeta> = dataset
        .tests()
        .iter()
        .map(|t| (t.test_id.as_str(), t))
        .collect();
    let col_of: HashMap<&str, usize> = cols
        .iter()
        .enumerate()
        .map(|(j, id)| (id.as_str(), j))
        .collect();

    let mut cells = Matrix::filled(rows.len(), cols.len(), KillClass::Survive);
    for record in dataset.executions() {
        let i = row_of[record.mutant_id.as_str()];
        let j = col_of[record.test_id.as_str()];
        cells[(i, j)] = classify_kill(Some(record), tests[record.test_id.as_str()]);
    }
    let fail_vector = cols
        .iter()
        .map(|id| tests[id.as_str()].is_failing())
        .collect();

    KillMatrix {
        rows,
        cols,
        fail_vector,
        cells,
    }
}

/// Boolean weak-kill matrix: a cell is set for weak and strong kills alike.
pub fn build_weak_matrix(dataset: &Dataset) -> BooleanKillMatrix {
    let enhanced = classify_all(dataset);
    let cells = enhanced.cells.map(|c| c.is_killed());
    enhanced.with_cells(cells)
}

/// Hybrid matrix over {0, 1, 2}: survive, weak kill, strong kill.
pub fn build_enhanced_matrix(dataset: &Dataset) -> EnhancedKillMatrix {
    classify_all(dataset)
}

/// Dense TSV dump: header row of test ids, first column mutant id.
///
/// Integer-valued cells are written as integers; fractional cells with 9
/// significant digits.
pub fn write_matrix_tsv<T: CellValue>(matrix: &KillMatrix<T>) -> Result<String> {
    let mut out = String::new();
    let mut header = vec!["mutant_id"];
    header.extend(matrix.cols.iter().map(String::as_str));
    push_row(&mut out, &header)?;
    let mut cells = Vec::with_capacity(matrix.cols.len() + 1);
    for (id, row) in matrix.rows.iter().zip(matrix.cells.iter_rows()) {
        cells.clear();
        cells.push(id.clone());
        cells.extend(row.iter().map(|c| format_cell(c.value())));
        let refs: Vec<&str> = cells.iter().map(String::as_str).collect();
        push_row(&mut out, &refs)?;
    }
    Ok(out)
}

fn format_cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let mut s = String::new();
        // 9 significant digits
        let _ = write!(s, "{:.*e}", 8, v);
        s.parse::<f64>().map(|x| x.to_string()).unwrap_or(s)
    }
}

/// Parses a dense matrix dump. The fail vector is unknown and left all-false.
pub fn parse_matrix_tsv(text: &str) -> std::result::Result<KillMatrix<f64>, String> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header: Vec<&str> = lines.next().unwrap_or("").split('\t').collect();
    if header.first() != Some(&"mutant_id") {
        return Err("line 1: header must start with mutant_id".into());
    }
    let cols: Vec<String> = header[1..].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols.len() + 1 {
            return Err(format!(
                "line {}: expected {} fields, found {}",
                i + 2,
                cols.len() + 1,
                fields.len()
            ));
        }
        rows.push(fields[0].to_owned());
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| format!("line {}: invalid cell value {f:?}", i + 2))?;
            data.push(v);
        }
    }
    let cells = Matrix::from_vec(rows.len(), cols.len(), data).map_err(|e| e.to_string())?;
    Ok(KillMatrix {
        fail_vector: vec![false; cols.len()],
        rows,
        cols,
        cells,
    })
}
