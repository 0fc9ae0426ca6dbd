//! File-writing and binary-reading helpers shared by the on-disk formats.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Write a file atomically: the payload goes to a sibling temp file that
/// is renamed over the target only after a successful flush, so a failed
/// write never leaves a partial artifact behind.
pub(crate) fn atomic_write(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let stem = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if stem.is_empty() {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"),
        });
    }
    let tag = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    let tmp = dir.join(format!(".{stem}.{}.{tag}.tmp", std::process::id()));

    let result = (|| -> Result<()> {
        let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut out = BufWriter::new(file);
        write(&mut out)?;
        out.flush().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Atomically write a text file: temp then rename, like every other
/// writer in the crate.
pub fn write_text_atomic(path: &Path, text: &str) -> Result<()> {
    atomic_write(path, |out| out.write_all(text.as_bytes()).map_err(|e| Error::io(path, e)))
}

/// Buffered reader that turns short reads into truncation errors tagged
/// with the file path and byte counts.
pub(crate) struct FileReader {
    path: PathBuf,
    inner: BufReader<File>,
}

impl FileReader {
    pub(crate) fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(FileReader { path: path.to_path_buf(), inner: BufReader::new(file) })
    }

    pub(crate) fn read_exact(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::Truncated(format!("{} ended while reading {what}", self.path.display()))
            } else {
                Error::io(&self.path, e)
            }
        })
    }

    pub(crate) fn read_u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    pub(crate) fn read_u64(&mut self, what: &str) -> Result<u64> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b, what)?;
        Ok(u64::from_le_bytes(b))
    }

    /// Read exactly `len` bytes. Grows the buffer as the bytes arrive
    /// rather than trusting a header-declared length with an allocation.
    pub(crate) fn read_block(&mut self, len: u64, what: &str) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        let got = (&mut self.inner)
            .take(len)
            .read_to_end(&mut buf)
            .map_err(|e| Error::io(&self.path, e))?;
        if (got as u64) != len {
            return Err(Error::Truncated(format!(
                "{} ended inside {what}: {got} of {len} bytes present",
                self.path.display()
            )));
        }
        Ok(buf)
    }

    /// Error if any payload bytes remain unconsumed.
    pub(crate) fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe) {
            Ok(0) => Ok(()),
            Ok(_) => Err(Error::Format(format!(
                "{} has trailing bytes after the declared payload",
                self.path.display()
            ))),
            Err(e) => Err(Error::io(&self.path, e)),
        }
    }
}
