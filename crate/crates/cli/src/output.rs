use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::commands::CliError;

/// Destination for a table: a file or stdout.
pub struct Sink {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink { path: path.map(Path::to_path_buf), inner })
    }

    fn fail(&self, e: io::Error) -> CliError {
        CliError::io(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e)
    }

    /// `# key: value` lines ahead of the CSV header.
    pub fn comments(&mut self, lines: &[(String, String)]) -> Result<(), CliError> {
        for (k, v) in lines {
            writeln!(self.inner, "# {k}: {v}").map_err(|e| self.fail(e))?;
        }
        Ok(())
    }

    pub fn csv<I, R>(&mut self, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(&mut self.inner);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::io(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| self.fail(e))
    }
}

/// Generator line, bounds and equivalence, plus a timestamp unless
/// suppressed.
pub fn meta_lines(bounds: String, equivalence: String, no_meta: bool) -> Vec<(String, String)> {
    let mut lines = vec![
        ("generator".to_string(), format!("covertab {}", covertab::VERSION)),
        ("bounds".to_string(), bounds),
        ("equivalence".to_string(), equivalence),
    ];
    if !no_meta {
        lines.push(("generated".to_string(), timestamp()));
    }
    lines
}

pub fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("unix:{secs}")
}

/// `println!` that ends the process quietly when stdout has been closed.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let mut out = std::io::stdout().lock();
        if let Err(e) = writeln!(out, $($arg)*).and_then(|()| out.flush()) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}
pub(crate) use say;
