//! Far-field matrices on equispaced directions and their text file format.
//!
//! ```text
//! ffmat 1
//! k <decimal>
//! N <integer>
//! <re>,<im> <re>,<im> ...      (N rows of N entries, row-major)
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linops::ComplexMatrix;
use crate::scalar::{Cx, Real};

pub const FORMAT_TAG: &str = "ffmat";
pub const FORMAT_VERSION: u32 = 1;

/// `theta_i = 2 pi i / n` for `i = 0..n` as unit vectors.
pub fn directions<T: Real>(n: usize) -> Vec<Point<T>> {
    (0..n)
        .map(|i| {
            let theta = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let (s, c) = theta.sin_cos();
            [c, s]
        })
        .collect()
}

/// `u_inf(x_i, y_j)` on the grid `x_i = y_i = (cos theta_i, sin theta_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix<T> {
    pub k: T,
    pub entries: ComplexMatrix<T>,
}

impl<T: Real> FarFieldMatrix<T> {
    pub fn new(k: T, entries: ComplexMatrix<T>) -> Result<Self> {
        if !entries.is_square() || entries.rows() < 2 {
            return Err(Error::Metadata(format!(
                "far-field matrix must be square with N >= 2, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        if !entries.is_finite() {
            return Err(Error::Metadata("far-field matrix has non-finite entries".into()));
        }
        if !(k > T::zero()) {
            return Err(Error::Metadata(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { k, entries })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn directions(&self) -> Vec<Point<T>> {
        directions(self.n())
    }

    pub fn to_text(&self) -> String {
        let n = self.n();
        let mut out = String::with_capacity(48 * n * n + 64);
        let _ = writeln!(out, "{FORMAT_TAG} {FORMAT_VERSION}");
        let _ = writeln!(out, "k {:.16e}", self.k.to_f64().unwrap_or(f64::NAN));
        let _ = writeln!(out, "N {n}");
        for i in 0..n {
            for (j, v) in self.entries.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(
                    out,
                    "{:.16e},{:.16e}",
                    v.re.to_f64().unwrap_or(f64::NAN),
                    v.im.to_f64().unwrap_or(f64::NAN)
                );
            }
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(r: impl Read) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();
        let mut next_line = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((_, Err(e))) => Err(Error::from(e)),
                None => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                }),
            }
        };

        let (ln, header) = next_line("header")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(FORMAT_TAG) {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected `{FORMAT_TAG} {FORMAT_VERSION}` header"),
            });
        }
        match parts.next().map(str::parse::<u32>) {
            Some(Ok(FORMAT_VERSION)) => {}
            other => {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("unsupported format version {other:?}"),
                })
            }
        }
        let (ln, kline) = next_line("`k` line")?;
        let k = keyed_value(&kline, "k", ln)?
            .parse::<f64>()
            .map_err(|e| Error::Parse { line: ln, msg: format!("bad wavenumber: {e}") })?;
        let (ln, nline) = next_line("`N` line")?;
        let n = keyed_value(&nline, "N", ln)?
            .parse::<usize>()
            .map_err(|e| Error::Parse { line: ln, msg: format!("bad N: {e}") })?;

        let mut data = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (ln, row) = next_line("matrix row")?;
            let before = data.len();
            for tok in row.split_whitespace() {
                data.push(parse_entry::<T>(tok, ln)?);
            }
            if data.len() - before != n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected {n} entries, found {}", data.len() - before),
                });
            }
        }
        Self::new(T::lit(k), ComplexMatrix::from_row_major(n, n, data)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(file)
    }
}

fn keyed_value<'a>(line: &'a str, key: &str, ln: usize) -> Result<&'a str> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => Ok(v),
        _ => Err(Error::Parse {
            line: ln,
            msg: format!("expected `{key} <value>`"),
        }),
    }
}

fn parse_entry<T: Real>(tok: &str, ln: usize) -> Result<Cx<T>> {
    let bad = || Error::Parse {
        line: ln,
        msg: format!("bad entry `{tok}`, expected `<re>,<im>`"),
    };
    let (a, b) = tok.split_once(',').ok_or_else(bad)?;
    let re = a.parse::<f64>().map_err(|_| bad())?;
    let im = b.parse::<f64>().map_err(|_| bad())?;
    Ok(Cx::new(T::lit(re), T::lit(im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FarFieldMatrix<f64> {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            Cx::new((i as f64 + 0.1).sin() / 3.0, -(j as f64 * 1.7).exp() * 1e-9)
        });
        FarFieldMatrix::new(2.0, m).unwrap()
    }

    #[test]
    fn text_layout() {
        let text = sample().to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "ffmat 1");
        assert_eq!(lines[1], "k 2.0000000000000000e0");
        assert_eq!(lines[2], "N 3");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[3].split_whitespace().count(), 3);
    }

    #[test]
    fn round_trip_is_lossless() {
        let ff = sample();
        let back = FarFieldMatrix::<f64>::read_from(ff.to_text().as_bytes()).unwrap();
        assert_eq!(back, ff);
    }

    #[test]
    fn rejects_malformed_input() {
        let bad_header = "ffmat 2\nk 1\nN 2\n0,0 0,0\n0,0 0,0\n";
        assert!(FarFieldMatrix::<f64>::read_from(bad_header.as_bytes()).is_err());
        let short_row = "ffmat 1\nk 1\nN 2\n0,0 0,0\n0,0\n";
        assert!(matches!(
            FarFieldMatrix::<f64>::read_from(short_row.as_bytes()),
            Err(Error::Parse { line: 5, .. })
        ));
        let truncated = "ffmat 1\nk 1\nN 2\n0,0 0,0\n";
        assert!(FarFieldMatrix::<f64>::read_from(truncated.as_bytes()).is_err());
        let bad_entry = "ffmat 1\nk 1\nN 2\n0;0 0,0\n0,0 0,0\n";
        assert!(FarFieldMatrix::<f64>::read_from(bad_entry.as_bytes()).is_err());
    }

    #[test]
    fn directions_are_equispaced() {
        let d = directions::<f64>(4);
        assert!((d[1][0]).abs() < 1e-16 && (d[1][1] - 1.0).abs() < 1e-16);
        assert!((d[2][0] + 1.0).abs() < 1e-16);
    }
}
