//! CSV tables: a header row, then one row per record, LF line ends.
//! Integers are written as-is, reals with six significant digits.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::export::{format_sig6, write_text};

/// A value that knows its CSV rendering.
pub trait CsvCell {
    fn render(&self) -> String;
}

impl CsvCell for u64 {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl CsvCell for f64 {
    fn render(&self) -> String {
        format_sig6(*self)
    }
}

impl CsvCell for String {
    fn render(&self) -> String {
        self.clone()
    }
}

impl CsvCell for &str {
    fn render(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// Row labels down the first column, `corner` above them, column labels
    /// across the header.
    pub fn from_matrix<T: CsvCell>(corner: &str, row_labels: &[String], col_labels: &[String], values: &Array2<T>) -> Self {
        let mut t = Table::new(std::iter::once(corner.to_string()).chain(col_labels.iter().cloned()));
        for (label, row) in row_labels.iter().zip(values.rows()) {
            let mut cells = Vec::with_capacity(row.len() + 1);
            cells.push(label.clone());
            cells.extend(row.iter().map(CsvCell::render));
            t.push_row(cells);
        }
        t
    }
}

pub fn format_csv(table: &Table) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::InvalidArgument(format!("csv encoding failed: {e}"));
    w.write_record(&table.header).map_err(to_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output of UTF-8 input is UTF-8"))
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    write_text(path, &format_csv(table)?)
}

pub fn parse_csv(text: &str, origin: &Path) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let to_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::parse(origin, line, e.to_string())
    };
    let header = r.headers().map_err(to_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(to_err)?.iter().map(String::from).collect());
    }
    Ok(Table { header, rows })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
    parse_csv(&text, path)
}

/// A labelled matrix read back from a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledMatrix<T> {
    pub corner: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Array2<T>,
}

pub fn table_to_matrix<T>(table: &Table, origin: &Path) -> Result<LabelledMatrix<T>>
where
    T: FromStr + Clone + Default,
{
    let (corner, col_labels) = table
        .header
        .split_first()
        .ok_or_else(|| Error::parse(origin, 1, "empty header"))?;
    let mut values = Array2::<T>::default((table.rows.len(), col_labels.len()));
    let mut row_labels = Vec::with_capacity(table.rows.len());
    for (r, row) in table.rows.iter().enumerate() {
        let line = r + 2;
        let (label, cells) = row
            .split_first()
            .ok_or_else(|| Error::parse(origin, line, "empty row"))?;
        if cells.len() != col_labels.len() {
            return Err(Error::parse(origin, line, format!("expected {} values, found {}", col_labels.len(), cells.len())));
        }
        for (c, cell) in cells.iter().enumerate() {
            values[[r, c]] = cell
                .parse()
                .map_err(|_| Error::parse(origin, line, format!("bad value '{cell}'")))?;
        }
        row_labels.push(label.clone());
    }
    Ok(LabelledMatrix {
        corner: corner.clone(),
        row_labels,
        col_labels: col_labels.to_vec(),
        values,
    })
}

pub fn read_matrix_csv<T>(path: &Path) -> Result<LabelledMatrix<T>>
where
    T: FromStr + Clone + Default,
{
    table_to_matrix(&read_csv(path)?, path)
}
