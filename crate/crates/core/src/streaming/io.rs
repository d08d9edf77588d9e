//! Stream files: one decimal id per line, or packed little-endian `u64`s.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// On-disk stream encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamFormat {
    Lines,
    Binary,
}

impl std::str::FromStr for StreamFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(Self::Lines),
            "binary" => Ok(Self::Binary),
            other => Err(Error::InvalidParameter(format!(
                "unknown stream format {other:?}, expected lines or binary"
            ))),
        }
    }
}

pub fn write_stream<W: Write>(
    mut w: W,
    items: impl IntoIterator<Item = u64>,
    format: StreamFormat,
) -> Result<()> {
    for j in items {
        match format {
            StreamFormat::Lines => writeln!(w, "{j}")?,
            StreamFormat::Binary => w.write_all(&j.to_le_bytes())?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a whole stream. Blank lines are skipped in the line format.
pub fn read_stream<R: BufRead>(mut r: R, format: StreamFormat) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    match format {
        StreamFormat::Lines => {
            for (idx, line) in r.lines().enumerate() {
                let line = line?;
                let t = line.trim();
                if t.is_empty() {
                    continue;
                }
                out.push(t.parse().map_err(|e| Error::Parse {
                    line: idx as u64 + 1,
                    message: format!("{t:?}: {e}"),
                })?);
            }
        }
        StreamFormat::Binary => {
            let mut buf = Vec::new();
            r.read_to_end(&mut buf)?;
            if buf.len() % 8 != 0 {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("binary stream length {} is not a multiple of 8", buf.len()),
                });
            }
            out.extend(
                buf.chunks_exact(8)
                    .map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8"))),
            );
        }
    }
    Ok(out)
}
