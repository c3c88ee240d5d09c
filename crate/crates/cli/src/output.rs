use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Fixed-point text with 17 significant digits, enough to round-trip an f64.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub struct Sink {
    label: PathBuf,
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Sink, CliError> {
        match path {
            Some(p) => {
                let file = File::create(p).map_err(|e| CliError::io(p, e))?;
                Ok(Sink {
                    label: p.to_path_buf(),
                    inner: Box::new(BufWriter::new(file)),
                })
            }
            None => Ok(Sink {
                label: PathBuf::from("<stdout>"),
                inner: Box::new(io::stdout().lock()),
            }),
        }
    }

    pub fn write_json(mut self, value: &serde_json::Value) -> Result<(), CliError> {
        let label = self.label.clone();
        serde_json::to_writer_pretty(&mut self.inner, value)
            .map_err(|e| CliError::io(&label, e.into()))?;
        writeln!(self.inner)
            .and_then(|_| self.inner.flush())
            .map_err(|e| CliError::io(&label, e))
    }
}

/// CSV writer with LF line endings that flushes on request.
pub struct Table {
    label: PathBuf,
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn new(sink: Sink, header: &[&str]) -> Result<Table, CliError> {
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink.inner);
        let mut table = Table {
            label: sink.label,
            writer,
        };
        table.row(header.iter().map(|s| s.to_string()))?;
        Ok(table)
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<(), CliError> {
        let fields: Vec<String> = fields.into_iter().collect();
        self.writer.write_record(&fields).map_err(|e| self.error(e))
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::io(&self.label, e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.flush()
    }

    fn error(&self, e: csv::Error) -> CliError {
        CliError::io(&self.label, io::Error::other(e.to_string()))
    }
}
