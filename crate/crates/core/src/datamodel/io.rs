//! Text and packed binary dataset formats.
//!
//! Text (UTF-8, SNP-major):
//!
//! ```text
//! #SNPS=<M> SAMPLES=<N>
//! <N genotype tokens in {0,1,2}>   (M lines)
//! <N phenotype tokens in {0,1}>
//! ```
//!
//! Packed: magic `EPI3`, u32 version 1, u64 M, u64 N0, u64 N1, then for each
//! SNP: controls plane 0, controls plane 1, cases plane 0, cases plane 1. Each
//! plane is `ceil(N_c / 64)` little-endian u64 words; bit `b` of word `w` is
//! sample `64 w + b` of that class; padding bits are zero.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::bitplane::{words_for, BitPlaneDataset, Class, Word};
use super::matrix::GenotypeMatrix;

pub const PACKED_MAGIC: [u8; 4] = *b"EPI3";
pub const PACKED_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 * 3;

pub fn write_text(path: impl AsRef<Path>, matrix: &GenotypeMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_text_to(&mut out, matrix)?;
    out.flush()?;
    Ok(())
}

pub fn write_text_to(out: &mut impl Write, matrix: &GenotypeMatrix) -> Result<()> {
    writeln!(
        out,
        "#SNPS={} SAMPLES={}",
        matrix.num_snps(),
        matrix.num_samples()
    )?;
    let mut line = String::with_capacity(2 * matrix.num_samples());
    let rows = (0..matrix.num_snps())
        .map(|i| matrix.snp_row(i))
        .chain(std::iter::once(matrix.phenotype()));
    for row in rows {
        line.clear();
        for (k, &v) in row.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push((b'0' + v) as char);
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_text(path: impl AsRef<Path>) -> Result<GenotypeMatrix> {
    read_text_from(BufReader::new(File::open(path)?))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.trim_end().strip_prefix("#SNPS=")?;
    let (m, n) = rest.split_once(" SAMPLES=")?;
    Some((m.parse().ok()?, n.parse().ok()?))
}

fn parse_row(line: &str, lineno: usize, n: usize, max: u8, out: &mut Vec<u8>) -> Result<()> {
    let start = out.len();
    for tok in line.split_ascii_whitespace() {
        let v = match tok.as_bytes() {
            [d @ b'0'..=b'9'] if d - b'0' <= max => d - b'0',
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("invalid token {tok:?}, expected 0..={max}"),
                })
            }
        };
        out.push(v);
    }
    let got = out.len() - start;
    if got != n {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {n} tokens, found {got}"),
        });
    }
    Ok(())
}

pub fn read_text_from(reader: impl BufRead) -> Result<GenotypeMatrix> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let (m, n) = parse_header(&header).ok_or_else(|| Error::Parse {
        line: 1,
        msg: format!("bad header {header:?}, expected #SNPS=<M> SAMPLES=<N>"),
    })?;
    let mut genotypes = Vec::with_capacity(m.saturating_mul(n).min(1 << 28));
    let mut phenotype = Vec::with_capacity(n.min(1 << 28));
    for row in 0..=m {
        let lineno = row + 2;
        let line = lines.next().transpose()?.ok_or(Error::Parse {
            line: lineno,
            msg: "unexpected end of file".into(),
        })?;
        if row < m {
            parse_row(&line, lineno, n, 2, &mut genotypes)?;
        } else {
            parse_row(&line, lineno, n, 1, &mut phenotype)?;
        }
    }
    for (k, extra) in lines.enumerate() {
        if !extra?.trim().is_empty() {
            return Err(Error::Parse {
                line: m + 3 + k,
                msg: "trailing content after phenotype line".into(),
            });
        }
    }
    GenotypeMatrix::new(m, n, genotypes, phenotype)
}

pub fn encode_packed(ds: &BitPlaneDataset) -> Vec<u8> {
    let payload: usize = Class::ALL.iter().map(|&c| ds.class_storage(c).len() * 8).sum();
    let mut buf = Vec::with_capacity(HEADER_LEN + payload);
    buf.extend_from_slice(&PACKED_MAGIC);
    buf.extend_from_slice(&PACKED_VERSION.to_le_bytes());
    buf.extend_from_slice(&(ds.num_snps() as u64).to_le_bytes());
    for class in Class::ALL {
        buf.extend_from_slice(&(ds.class_len(class) as u64).to_le_bytes());
    }
    for snp in 0..ds.num_snps() {
        for class in Class::ALL {
            let (p0, p1) = ds.planes(snp, class);
            for &w in p0.iter().chain(p1) {
                buf.extend_from_slice(&w.to_le_bytes());
            }
        }
    }
    buf
}

pub fn write_packed(path: impl AsRef<Path>, ds: &BitPlaneDataset) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&encode_packed(ds))?;
    out.flush()?;
    Ok(())
}

struct PackedHeader {
    num_snps: usize,
    class_len: [usize; 2],
    payload_bytes: u64,
}

fn parse_packed_header(bytes: &[u8], total_len: u64) -> Result<PackedHeader> {
    let n = bytes.len().min(PACKED_MAGIC.len());
    if bytes[..n] != PACKED_MAGIC[..n] {
        return Err(Error::MagicMismatch);
    }
    // a prefix of the magic is a cut-off file rather than a foreign one
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile {
            expected: HEADER_LEN as u64,
            found: total_len,
        });
    }
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != PACKED_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let (m, n0, n1) = (u64_at(8), u64_at(16), u64_at(24));
    let too_big = || Error::CorruptData("header sizes overflow".into());
    let to_usize = |v: u64| usize::try_from(v).map_err(|_| too_big());
    let (num_snps, class_len) = (to_usize(m)?, [to_usize(n0)?, to_usize(n1)?]);
    let words_per_snp = words_for(class_len[0])
        .checked_add(words_for(class_len[1]))
        .ok_or_else(too_big)?;
    let payload_bytes = (words_per_snp as u64)
        .checked_mul(2 * 8)
        .and_then(|b| b.checked_mul(m))
        .ok_or_else(too_big)?;
    let expected = payload_bytes.checked_add(HEADER_LEN as u64).ok_or_else(too_big)?;
    if total_len < expected {
        return Err(Error::TruncatedFile {
            expected,
            found: total_len,
        });
    }
    if total_len > expected {
        return Err(Error::CorruptData(format!(
            "{} trailing bytes after payload",
            total_len - expected
        )));
    }
    Ok(PackedHeader {
        num_snps,
        class_len,
        payload_bytes,
    })
}

fn planes_from_payload(header: &PackedHeader, payload: &[u8]) -> Result<BitPlaneDataset> {
    let words = header.class_len.map(words_for);
    let mut planes = words.map(|w| Vec::<Word>::with_capacity(2 * w * header.num_snps));
    let mut chunks = payload
        .chunks_exact(8)
        .map(|c| Word::from_le_bytes(c.try_into().unwrap()));
    for _ in 0..header.num_snps {
        for c in 0..2 {
            planes[c].extend(chunks.by_ref().take(2 * words[c]));
        }
    }
    BitPlaneDataset::from_planes(header.num_snps, header.class_len, planes)
}

/// Decodes an in-memory packed image.
pub fn decode_packed(bytes: &[u8]) -> Result<BitPlaneDataset> {
    let header = parse_packed_header(bytes, bytes.len() as u64)?;
    planes_from_payload(&header, &bytes[HEADER_LEN..])
}

/// Reads a packed file. Sizes are checked against the file length before the
/// payload is allocated.
pub fn read_packed(path: impl AsRef<Path>) -> Result<BitPlaneDataset> {
    let mut file = File::open(path)?;
    let total_len = file.metadata()?.len();
    let mut head = Vec::with_capacity(HEADER_LEN);
    Read::by_ref(&mut file)
        .take(HEADER_LEN as u64)
        .read_to_end(&mut head)?;
    let header = parse_packed_header(&head, total_len)?;
    let mut payload = vec![0u8; header.payload_bytes as usize];
    file.read_exact(&mut payload)?;
    planes_from_payload(&header, &payload)
}

/// A dataset loaded from either format.
pub enum Loaded {
    Text(GenotypeMatrix),
    Packed(BitPlaneDataset),
}

impl Loaded {
    pub fn to_bitplanes(&self) -> BitPlaneDataset {
        match self {
            Loaded::Text(m) => super::binarize(m),
            Loaded::Packed(ds) => ds.clone(),
        }
    }

    /// Genotype matrix view; packed inputs decode with controls first.
    pub fn to_matrix(&self) -> GenotypeMatrix {
        match self {
            Loaded::Text(m) => m.clone(),
            Loaded::Packed(ds) => ds.decode(),
        }
    }
}

/// Sniffs the packed magic and dispatches to the matching reader.
pub fn read_any(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let mut magic = [0u8; 4];
    let n = File::open(path)?.read(&mut magic)?;
    if n == 4 && magic == PACKED_MAGIC {
        Ok(Loaded::Packed(read_packed(path)?))
    } else {
        Ok(Loaded::Text(read_text(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{binarize, generate_synthetic};

    #[test]
    fn text_round_trip() {
        let m = generate_synthetic(7, 33, 0.3, 5, None).unwrap();
        let mut buf = Vec::new();
        write_text_to(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#SNPS=7 SAMPLES=33\n"));
        assert_eq!(read_text_from(&buf[..]).unwrap(), m);
    }

    #[test]
    fn bad_token_reports_line() {
        let text = "#SNPS=3 SAMPLES=2\n0 1\n2 4\n0 0\n1 0\n";
        let err = read_text_from(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn phenotype_token_limited_to_binary() {
        let text = "#SNPS=3 SAMPLES=2\n0 1\n2 1\n0 0\n1 2\n";
        let err = read_text_from(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn short_row_and_missing_lines() {
        let err = read_text_from("#SNPS=3 SAMPLES=2\n0 1\n2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = read_text_from("#SNPS=3 SAMPLES=2\n0 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = read_text_from("SNPS=3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn packed_round_trip_and_layout() {
        let m = generate_synthetic(4, 100, 0.3, 9, None).unwrap();
        let ds = binarize(&m);
        let bytes = encode_packed(&ds);
        let [n0, n1] = m.class_counts();
        let words = words_for(n0) + words_for(n1);
        assert_eq!(bytes.len(), 32 + 4 * 2 * words * 8);
        assert_eq!(&bytes[..4], b"EPI3");
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), n0 as u64);
        // first payload word is SNP 0, controls, plane 0
        let w0 = u64::from_le_bytes(bytes[32..40].try_into().unwrap());
        assert_eq!(w0, ds.plane(0, Class::Control, 0)[0]);
        assert_eq!(decode_packed(&bytes).unwrap(), ds);
    }

    #[test]
    fn packed_errors() {
        let ds = binarize(&generate_synthetic(4, 100, 0.3, 9, None).unwrap());
        let bytes = encode_packed(&ds);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_packed(&bad), Err(Error::MagicMismatch)));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(decode_packed(&bad), Err(Error::UnsupportedVersion(2))));

        assert!(matches!(
            decode_packed(&bytes[..bytes.len() - 1]),
            Err(Error::TruncatedFile { .. })
        ));
        assert!(matches!(
            decode_packed(&bytes[..10]),
            Err(Error::TruncatedFile { .. })
        ));

        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(decode_packed(&bad), Err(Error::CorruptData(_))));

        // absurd snp count must fail on arithmetic, not allocation
        let mut bad = bytes.clone();
        bad[8..16].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode_packed(&bad).is_err());
    }
}
