//! The `.rbq` text container for RB matrices.
//!
//! ```text
//! rbq 2 3
//! a0 row 1 (3 comma separated values)
//! a0 row 2
//!
//! a1 rows ...
//!
//! a2 rows ...
//!
//! a3 rows ...
//! ```
//!
//! A file may hold several containers back to back; a problem file is `A`
//! followed by `B`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::RbMatrix;

pub fn write_rbq<W: Write>(mut w: W, a: &RbMatrix) -> std::io::Result<()> {
    let (m, n) = a.shape();
    writeln!(w, "rbq {m} {n}")?;
    for (t, part) in a.parts().iter().enumerate() {
        if t > 0 {
            writeln!(w)?;
        }
        write_real_csv(&mut w, part)?;
    }
    Ok(())
}

/// Rows of `x` as comma separated values at full round-trip precision.
pub fn write_real_csv<W: Write>(mut w: W, x: &DMatrix<f64>) -> std::io::Result<()> {
    for i in 0..x.nrows() {
        let line: Vec<String> = x.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads every container in `r`.
pub fn read_rbq_all<R: BufRead>(r: R) -> Result<Vec<RbMatrix>> {
    let lines: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut parser = Parser {
        lines: &lines,
        pos: 0,
    };
    let mut out = Vec::new();
    while parser.skip_blank() {
        out.push(parser.container()?);
    }
    Ok(out)
}

/// Reads a stream holding exactly one container.
pub fn read_rbq<R: BufRead>(r: R) -> Result<RbMatrix> {
    let mut all = read_rbq_all(r)?;
    match all.len() {
        1 => Ok(all.pop().expect("one matrix")),
        k => Err(Error::Parse {
            line: 0,
            msg: format!("expected one rbq container, found {k}"),
        }),
    }
}

pub fn write_rbq_file(path: impl AsRef<Path>, mats: &[&RbMatrix]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (k, a) in mats.iter().enumerate() {
        if k > 0 {
            writeln!(w)?;
        }
        write_rbq(&mut w, a)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a problem file: the matrix `A` followed by the right-hand side `B`.
pub fn read_problem_file(path: impl AsRef<Path>) -> Result<(RbMatrix, RbMatrix)> {
    let mats = read_rbq_all(BufReader::new(File::open(path)?))?;
    match <[RbMatrix; 2]>::try_from(mats) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => Err(Error::Parse {
            line: 0,
            msg: format!("a problem file holds A and B, found {} matrices", v.len()),
        }),
    }
}

struct Parser<'a> {
    lines: &'a [String],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.pos + 1,
            msg: msg.into(),
        }
    }

    /// Advances past blank lines; false at end of input.
    fn skip_blank(&mut self) -> bool {
        while self.pos < self.lines.len() && self.lines[self.pos].trim().is_empty() {
            self.pos += 1;
        }
        self.pos < self.lines.len()
    }

    fn at_separator(&self) -> bool {
        self.pos >= self.lines.len() || self.lines[self.pos].trim().is_empty()
    }

    fn container(&mut self) -> Result<RbMatrix> {
        let header: Vec<&str> = self.lines[self.pos].split_whitespace().collect();
        let (m, n) = match header.as_slice() {
            ["rbq", m, n] => (
                m.parse::<usize>()
                    .map_err(|e| self.err(format!("bad row count: {e}")))?,
                n.parse::<usize>()
                    .map_err(|e| self.err(format!("bad column count: {e}")))?,
            ),
            _ => return Err(self.err("expected header `rbq m n`")),
        };
        if m == 0 || n == 0 {
            return Err(self.err("matrix dimensions must be positive"));
        }
        self.pos += 1;

        let mut parts = Vec::with_capacity(4);
        for t in 0..4 {
            if t > 0 {
                if !self.at_separator() {
                    return Err(
                        self.err(format!("component block {} has more than {m} rows", t - 1))
                    );
                }
                if !self.skip_blank() {
                    return Err(self.err(format!("missing component block {t}")));
                }
            }
            let mut block = DMatrix::zeros(m, n);
            for i in 0..m {
                if self.at_separator() {
                    return Err(self.err(format!("component block {t} has {i} rows, expected {m}")));
                }
                let fields: Vec<&str> = self.lines[self.pos].split(',').map(str::trim).collect();
                if fields.len() != n {
                    return Err(self.err(format!("expected {n} values, found {}", fields.len())));
                }
                for (j, f) in fields.iter().enumerate() {
                    block[(i, j)] = f
                        .parse::<f64>()
                        .map_err(|e| self.err(format!("bad value `{f}`: {e}")))?;
                }
                self.pos += 1;
            }
            parts.push(block);
        }
        if !self.at_separator() {
            return Err(self.err(format!("component block 3 has more than {m} rows")));
        }
        let [a0, a1, a2, a3]: [DMatrix<f64>; 4] = parts.try_into().expect("four blocks");
        RbMatrix::from_parts(a0, a1, a2, a3)
    }
}
