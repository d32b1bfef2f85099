use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use cskpa_core::io::{write_csv, write_json};
use cskpa_core::{Result, VERSION};

/// Where results go: files under a directory, or stdout.
pub struct Output {
    dir: Option<PathBuf>,
}

/// Enough metadata to re-run a command.
#[derive(Serialize)]
struct Summary<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
    results: R,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Output { dir }
    }

    fn file(&self, name: &str) -> Result<Option<BufWriter<File>>> {
        match &self.dir {
            None => Ok(None),
            Some(dir) => {
                fs::create_dir_all(dir)?;
                Ok(Some(BufWriter::new(File::create(dir.join(name))?)))
            }
        }
    }

    pub fn csv<T: Serialize>(&self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        match self.file(&format!("{name}.csv"))? {
            Some(mut f) => {
                write_csv(&mut f, rows)?;
                f.flush()?;
            }
            None => write_csv(io::stdout().lock(), rows)?,
        }
        Ok(())
    }

    /// Plain JSON result: `<name>.json` or stdout.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        match self.file(&format!("{name}.json"))? {
            Some(mut f) => {
                write_json(&mut f, value)?;
                f.flush()?;
            }
            None => write_json(io::stdout().lock(), value)?,
        }
        Ok(())
    }

    /// `<name>.summary.json`, or stderr when writing CSV to stdout.
    pub fn summary<C: Serialize, R: Serialize>(
        &self,
        name: &str,
        config: &C,
        results: R,
    ) -> Result<()> {
        let s = Summary {
            command: name,
            version: VERSION,
            config,
            results,
        };
        match self.file(&format!("{name}.summary.json"))? {
            Some(mut f) => {
                write_json(&mut f, &s)?;
                f.flush()?;
            }
            None => write_json(io::stderr().lock(), &s)?,
        }
        Ok(())
    }
}
