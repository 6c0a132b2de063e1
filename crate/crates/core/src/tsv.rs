//! Line-oriented text file helpers shared by the readers and writers.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn source_name(path: &Path) -> String {
    path.display().to_string()
}

/// Non-blank lines with 1-based line numbers; a trailing `\r` is removed.
pub fn numbered_lines<'a, R: BufRead + 'a>(
    reader: R,
    source_name: &'a str,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader.lines().enumerate().filter_map(move |(idx, line)| match line {
        Ok(mut line) => {
            if line.ends_with('\r') {
                line.pop();
            }
            if line.trim().is_empty() {
                None
            } else {
                Some(Ok((idx + 1, line)))
            }
        }
        Err(e) => Some(Err(Error::parse(source_name, idx + 1, e.to_string()))),
    })
}

/// Splits a line into exactly `n` tab-separated fields.
pub fn fields<'a>(line: &'a str, n: usize, source_name: &str, line_no: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = line.split('\t').collect();
    if parts.len() != n {
        return Err(Error::parse(
            source_name,
            line_no,
            format!("expected {n} tab-separated fields, found {}", parts.len()),
        ));
    }
    Ok(parts)
}

pub fn parse_number<T: std::str::FromStr>(raw: &str, what: &str, source_name: &str, line_no: usize) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(source_name, line_no, format!("invalid {what}: {raw:?}")))
}

/// A set of output files that only become visible once every one of them has
/// been rendered. Nothing touches the output directory before `commit`.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, String)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in &self.files {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            let tmp = tmp_path(path);
            let mut file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            file.write_all(contents.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
            staged.push((tmp, path.clone()));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, path) in staged {
            fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}
