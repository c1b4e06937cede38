//! Treatments are stored one treated vertex per line; partitions (and type
//! partitions) one block per line with space-separated indices.

use std::io::{BufRead, Write};

use crate::{Error, Result};

pub fn write_treatment<W: Write>(treated: &[usize], mut out: W) -> Result<()> {
    for v in treated {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub fn read_treatment<R: BufRead>(input: R) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(
            t.parse()
                .map_err(|e| Error::parse(idx + 1, format!("{e}")))?,
        );
    }
    Ok(out)
}

pub fn write_blocks<W: Write>(blocks: &[Vec<usize>], mut out: W) -> Result<()> {
    for block in blocks {
        let line: Vec<String> = block.iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_blocks<R: BufRead>(input: R) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let block = t
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|e| Error::parse(idx + 1, format!("{e}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        out.push(block);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_roundtrip() {
        let blocks = vec![vec![3, 0], vec![1, 2]];
        let mut buf = Vec::new();
        write_blocks(&blocks, &mut buf).unwrap();
        assert_eq!(std::str::from_utf8(&buf).unwrap(), "3 0\n1 2\n");
        assert_eq!(read_blocks(buf.as_slice()).unwrap(), blocks);
    }

    #[test]
    fn treatment_parse() {
        assert_eq!(read_treatment("4\n\n1\n".as_bytes()).unwrap(), vec![4, 1]);
        assert!(read_treatment("x\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        write_treatment(&[2, 5], &mut buf).unwrap();
        assert_eq!(buf, b"2\n5\n");
    }
}
