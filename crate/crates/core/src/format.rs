//! Line-oriented text format for matrix sets.
//!
//! ```text
//! NOJD v1 N K
//! <K blocks of N lines, each 2N floats: re im re im …>
//! TRUTH
//! <N lines for A>
//! <K lines of 2N floats: the diagonals>
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::embedding::{TargetSet, Truth};
use crate::error::{NojdError, Result};
use crate::linalg::CMatrix;

const MAGIC: &str = "NOJD";
const VERSION: &str = "v1";

fn push_row(out: &mut String, row: impl Iterator<Item = Complex64>) {
    let mut first = true;
    for z in row {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{:.16e} {:.16e}", z.re, z.im);
    }
    out.push('\n');
}

/// Serialize to the text format with 17 significant digits.
pub fn to_string(set: &TargetSet) -> String {
    let (n, k) = (set.n(), set.k());
    let mut out = format!("{MAGIC} {VERSION} {n} {k}\n");
    for m in set.matrices() {
        for r in 0..n {
            push_row(&mut out, (0..n).map(|c| m.get(r, c)));
        }
    }
    if let Some(t) = set.truth() {
        out.push_str("TRUTH\n");
        for r in 0..n {
            push_row(&mut out, (0..n).map(|c| t.mixing.get(r, c)));
        }
        for d in &t.diagonals {
            push_row(&mut out, d.iter().copied());
        }
    }
    out
}

pub fn write(set: &TargetSet, mut w: impl Write) -> Result<()> {
    w.write_all(to_string(set).as_bytes())?;
    Ok(())
}

pub fn write_file(set: &TargetSet, path: &Path) -> Result<()> {
    std::fs::write(path, to_string(set))?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<String>> {
        loop {
            match self.inner.next() {
                None => return Ok(None),
                Some(l) => {
                    self.line += 1;
                    let l = l?;
                    if !l.trim().is_empty() {
                        return Ok(Some(l));
                    }
                }
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> NojdError {
        NojdError::Parse { line: self.line, msg: msg.into() }
    }

    fn row(&mut self, n: usize) -> Result<Vec<Complex64>> {
        let l = self.next()?.ok_or_else(|| self.err("unexpected end of input"))?;
        let vals: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| self.err(format!("bad number `{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * n {
            return Err(self.err(format!("expected {} numbers, found {}", 2 * n, vals.len())));
        }
        Ok(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
    }

    fn matrix(&mut self, n: usize) -> Result<CMatrix> {
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            for (c, z) in self.row(n)?.into_iter().enumerate() {
                m.set(r, c, z);
            }
        }
        Ok(m)
    }
}

pub fn read(r: impl BufRead) -> Result<TargetSet> {
    let mut lines = Lines { inner: r.lines(), line: 0 };
    let header = lines.next()?.ok_or_else(|| lines.err("empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(lines.err(format!("expected `{MAGIC} {VERSION} N K` header")));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|e| lines.err(format!("bad size `{s}`: {e}")));
    let (n, k) = (parse(fields[2])?, parse(fields[3])?);
    let matrices = (0..k).map(|_| lines.matrix(n)).collect::<Result<Vec<_>>>()?;
    let set = TargetSet::new(matrices)?;
    match lines.next()? {
        None => Ok(set),
        Some(l) if l.trim() == "TRUTH" => {
            let mixing = lines.matrix(n)?;
            let diagonals = (0..k).map(|_| lines.row(n)).collect::<Result<Vec<_>>>()?;
            if lines.next()?.is_some() {
                return Err(lines.err("trailing data after TRUTH section"));
            }
            set.with_truth(Truth { mixing, diagonals })
        }
        Some(_) => Err(lines.err("expected TRUTH or end of input")),
    }
}

pub fn read_file(path: &Path) -> Result<TargetSet> {
    let f = std::fs::File::open(path)?;
    read(std::io::BufReader::new(f))
}
