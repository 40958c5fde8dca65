//! Metadata block that opens every output: tool version, effective config and
//! input checksums.

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use crc::{Crc, Digest, CRC_64_XZ};
use hyperlex::RunConfig;
use serde::Serialize;

use crate::CliError;

pub const TOOL: &str = "hyperlex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

static CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub crc64: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub inputs: Vec<InputDigest>,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        Metadata {
            tool: TOOL,
            version: VERSION,
            config: config.clone(),
            inputs: Vec::new(),
        }
    }

    pub fn push_input(&mut self, path: &Path, crc: u64) {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            crc64: format!("{crc:016x}"),
        });
    }

    pub fn config_json(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }

    /// `key value` lines, used as `#` comments in TSV and XML comments in SVG.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("{} {}", self.tool, self.version),
            format!("config {}", self.config_json()),
        ];
        for i in &self.inputs {
            out.push(format!("input {} crc64={}", i.path, i.crc64));
        }
        out
    }

    pub fn tsv_header(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }
}

/// Reader that checksums everything passing through it.
pub struct CrcReader<R> {
    inner: R,
    digest: Digest<'static, u64>,
}

impl<R: Read> CrcReader<R> {
    pub fn new(inner: R) -> Self {
        CrcReader {
            inner,
            digest: CRC64.digest(),
        }
    }

    pub fn finish(self) -> u64 {
        self.digest.finalize()
    }
}

impl<R: Read> Read for CrcReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.digest.update(&buf[..n]);
        Ok(n)
    }
}

pub fn crc64(bytes: &[u8]) -> u64 {
    CRC64.checksum(bytes)
}

pub fn open(path: &Path) -> Result<BufReader<CrcReader<File>>, CliError> {
    let f = File::open(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(BufReader::with_capacity(1 << 16, CrcReader::new(f)))
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
