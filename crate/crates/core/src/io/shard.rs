//! Little-endian binary shards.
//!
//! ```text
//! header:  "S2SH"  u16 version
//! record:  u8 M  u8 N  u16 L  f32 X[M*L]  f32 Y[N*L]  u32 text_len  text
//! ```
//!
//! `text` is UTF-8 with one newline-terminated `y<k> = ...` line per output.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::generator::SeriesPair;

pub const SHARD_MAGIC: &[u8; 4] = b"S2SH";
pub const SHARD_VERSION: u16 = 1;

pub struct ShardWriter<W: Write = BufWriter<File>> {
    out: W,
    records: usize,
}

impl ShardWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> ShardWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        out.write_all(SHARD_MAGIC)?;
        out.write_all(&SHARD_VERSION.to_le_bytes())?;
        Ok(Self { out, records: 0 })
    }

    pub fn write_pair(&mut self, pair: &SeriesPair) -> Result<()> {
        let (m, n, len) = (pair.m(), pair.n(), pair.len());
        if m == 0 || m > u8::MAX as usize || n == 0 || n > u8::MAX as usize {
            return Err(Error::arg(format!("cannot store M={m}, N={n} in a shard")));
        }
        if len == 0 || len > u16::MAX as usize {
            return Err(Error::arg(format!("cannot store series length {len} in a shard")));
        }
        if pair.channels().any(|c| c.len() != len) {
            return Err(Error::arg("ragged channels"));
        }
        if pair.expr_texts.len() != n || pair.expr_texts.iter().any(|t| t.contains('\n')) {
            return Err(Error::arg("expression texts must be one line per output"));
        }
        let mut text = String::new();
        for t in &pair.expr_texts {
            text.push_str(t);
            text.push('\n');
        }
        let text_len = u32::try_from(text.len()).map_err(|_| Error::arg("expression block too long"))?;

        self.out.write_all(&[m as u8, n as u8])?;
        self.out.write_all(&(len as u16).to_le_bytes())?;
        let mut buf = Vec::with_capacity((m + n) * len * 4);
        for v in pair.channels().flatten() {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        self.out.write_all(&buf)?;
        self.out.write_all(&text_len.to_le_bytes())?;
        self.out.write_all(text.as_bytes())?;
        self.records += 1;
        Ok(())
    }

    pub fn records(&self) -> usize {
        self.records
    }

    /// Flushes and returns the underlying writer.
    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Streaming record reader; yields `None` at a clean end of file and an
/// error (then nothing) on any malformed record.
pub struct ShardReader<R: Read = BufReader<File>> {
    input: R,
    path: PathBuf,
    record: usize,
    floats: usize,
    done: bool,
}

pub fn read_shard(path: &Path) -> Result<ShardReader> {
    ShardReader::new(BufReader::new(File::open(path)?), path)
}

impl<R: Read> ShardReader<R> {
    pub fn new(mut input: R, path: &Path) -> Result<Self> {
        let mut header = [0u8; 6];
        let format_err = |message: String| Error::ShardFormat {
            path: path.to_path_buf(),
            record: 0,
            message,
        };
        input.read_exact(&mut header).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => format_err("file shorter than the header".into()),
            _ => Error::Io(e),
        })?;
        if &header[..4] != SHARD_MAGIC {
            return Err(format_err(format!("bad magic {:?}", &header[..4])));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != SHARD_VERSION {
            return Err(format_err(format!("unsupported version {version}")));
        }
        Ok(Self {
            input,
            path: path.to_path_buf(),
            record: 0,
            floats: 0,
            done: false,
        })
    }

    /// Records successfully read so far.
    pub fn records(&self) -> usize {
        self.record
    }

    /// f32 values successfully read so far.
    pub fn float_count(&self) -> usize {
        self.floats
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ShardFormat {
            path: self.path.clone(),
            record: self.record,
            message: message.into(),
        }
    }

    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        self.input.read_exact(buf).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => self.err(format!("truncated while reading {what}")),
            _ => Error::Io(e),
        })
    }

    fn read_record(&mut self) -> Result<Option<SeriesPair>> {
        let mut first = [0u8; 1];
        loop {
            match self.input.read(&mut first) {
                Ok(0) => return Ok(None),
                Ok(_) => break,
                Err(e) if e.kind() == ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            }
        }
        let mut rest = [0u8; 3];
        self.fill(&mut rest, "record header")?;
        let (m, n) = (first[0] as usize, rest[0] as usize);
        let len = u16::from_le_bytes([rest[1], rest[2]]) as usize;
        if m == 0 || n == 0 || len == 0 {
            return Err(self.err(format!("empty dimensions M={m}, N={n}, L={len}")));
        }
        let mut data = vec![0u8; (m + n) * len * 4];
        self.fill(&mut data, "series values")?;
        let mut channels: Vec<Vec<f64>> = data
            .chunks_exact(len * 4)
            .map(|c| {
                c.chunks_exact(4)
                    .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
                    .collect()
            })
            .collect();
        let y = channels.split_off(m);
        let mut tl = [0u8; 4];
        self.fill(&mut tl, "text length")?;
        let mut text = vec![0u8; u32::from_le_bytes(tl) as usize];
        self.fill(&mut text, "expression text")?;
        let text = String::from_utf8(text).map_err(|_| self.err("expression text is not UTF-8"))?;
        let lines: Vec<String> = match text.strip_suffix('\n') {
            Some(body) => body.split('\n').map(str::to_string).collect(),
            None => return Err(self.err("expression block is not newline-terminated")),
        };
        if lines.len() != n {
            return Err(self.err(format!("{} expression lines for N={n}", lines.len())));
        }
        self.floats += (m + n) * len;
        self.record += 1;
        Ok(Some(SeriesPair {
            x: channels,
            y,
            expr_texts: lines,
            provenance: None,
        }))
    }
}

impl<R: Read> Iterator for ShardReader<R> {
    type Item = Result<SeriesPair>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.read_record().transpose();
        if !matches!(out, Some(Ok(_))) {
            self.done = true;
        }
        out
    }
}

impl<R: Read> std::iter::FusedIterator for ShardReader<R> {}
