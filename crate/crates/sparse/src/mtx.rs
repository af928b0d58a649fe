//! Matrix Market coordinate and array I/O.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::csr::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a sparse matrix in coordinate format. Symmetric files are expanded.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

pub fn parse_matrix_market(reader: impl BufRead) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field '{}'", tokens[3])));
    }
    let sym = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        s => return Err(parse_err(1, format!("unsupported symmetry '{s}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if f.len() != 3 {
                    return Err(parse_err(lineno, "expected 'rows cols nnz'"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lineno, e.to_string()));
                let s = (p(f[0])?, p(f[1])?, p(f[2])?);
                trip.reserve(if sym == Symmetry::Symmetric { 2 * s.2 } else { s.2 });
                size = Some(s);
            }
            Some((nr, nc, _)) => {
                if f.len() != 3 {
                    return Err(parse_err(lineno, "expected 'row col value'"));
                }
                let i: usize = f[0].parse().map_err(|_| parse_err(lineno, "bad row index"))?;
                let j: usize = f[1].parse().map_err(|_| parse_err(lineno, "bad column index"))?;
                let v: f64 = f[2].parse().map_err(|_| parse_err(lineno, "bad value"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(parse_err(lineno, format!("index ({i}, {j}) out of range")));
                }
                trip.push((i - 1, j - 1, v));
                if sym == Symmetry::Symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = if sym == Symmetry::Symmetric {
        trip.iter().filter(|t| t.0 >= t.1).count()
    } else {
        trip.len()
    };
    if stored != nnz {
        return Err(parse_err(0, format!("header announces {nnz} entries, found {stored}")));
    }
    SparseMatrix::from_triplets(nr, nc, &trip)
}

/// Writes a matrix in coordinate format; `symmetric` stores the lower triangle.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix, symmetric: bool) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market_to(&mut w, a, symmetric)?;
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market_to(w: &mut impl Write, a: &SparseMatrix, symmetric: bool) -> Result<()> {
    if symmetric && a.n_rows() != a.n_cols() {
        return Err(Error::Dimension("symmetric storage of a non-square matrix".into()));
    }
    let keep = |i: usize, j: usize| !symmetric || i >= j;
    let nnz = (0..a.n_rows())
        .map(|i| a.row(i).0.iter().filter(|&&j| keep(i, j)).count())
        .sum::<usize>();
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{} {} {}", a.n_rows(), a.n_cols(), nnz)?;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if keep(i, j) {
                writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
            }
        }
    }
    Ok(())
}

/// Reads a dense column vector stored as a Matrix Market array.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut size: Option<(usize, usize)> = None;
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let t = line.trim();
        if k == 0 {
            let lower = t.to_ascii_lowercase();
            if !lower.starts_with("%%matrixmarket matrix array") {
                return Err(parse_err(1, "missing %%MatrixMarket matrix array header"));
            }
            continue;
        }
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        match size {
            None => {
                let f: Vec<usize> = t
                    .split_whitespace()
                    .map(|s| s.parse().map_err(|_| parse_err(lineno, "bad size")))
                    .collect::<Result<_>>()?;
                if f.len() != 2 || f[1] != 1 {
                    return Err(parse_err(lineno, "expected 'n 1'"));
                }
                size = Some((f[0], f[1]));
            }
            Some(_) => out.push(t.parse().map_err(|_| parse_err(lineno, "bad value"))?),
        }
    }
    let (n, _) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if out.len() != n {
        return Err(parse_err(0, format!("expected {n} values, found {}", out.len())));
    }
    Ok(out)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}
