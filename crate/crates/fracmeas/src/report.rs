//! CSV output with `#`-prefixed run manifests.
//!
//! Every number is written with 17 significant digits, and timestamps honour
//! `SOURCE_DATE_EPOCH`, so identical inputs give byte-identical files.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when it is set.
pub fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub input_sha256: Option<String>,
    pub started: u64,
    pub finished: u64,
}

impl Manifest {
    pub fn start(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            args: Vec::new(),
            seed: None,
            input_sha256: None,
            started: timestamp(),
            finished: 0,
        }
    }

    pub fn arg(mut self, name: &str, value: impl ToString) -> Self {
        self.args.push((name.to_owned(), value.to_string()));
        self
    }

    pub fn finish(&mut self) {
        self.finished = timestamp();
    }

    pub fn write_header<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# command: {}", self.command)?;
        let args: Vec<String> = self.args.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "# args: {}", args.join(" "))?;
        match self.seed {
            Some(s) => writeln!(w, "# seed: {s}")?,
            None => writeln!(w, "# seed: none")?,
        }
        writeln!(
            w,
            "# versions: fracmeas {}, fracmeas-core {}",
            env!("CARGO_PKG_VERSION"),
            fracmeas_core::VERSION
        )?;
        writeln!(w, "# input_sha256: {}", self.input_sha256.as_deref().unwrap_or("none"))?;
        writeln!(w, "# started_unix: {}", self.started)?;
        writeln!(w, "# finished_unix: {}", self.finished)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, manifest: &Manifest, mut w: W) -> Result<(), CliError> {
        manifest.write_header(&mut w)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Column-aligned plain text.
    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| self.rows.iter().map(|r| r[c].len()).chain([self.header[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| -> String {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_owned()
        };
        let mut s = line(self.header.clone());
        s.push('\n');
        for r in &self.rows {
            s.push_str(&line(r.iter().map(String::as_str).collect()));
            s.push('\n');
        }
        s
    }
}
