//! Reading sources from distribution files or raw bytes.

use std::io::{self, Read};
use std::path::{Path, PathBuf};

use codebound_core::source::{empirical_distribution, SourceDistribution, SourceError};

use crate::formats::{parse_distribution, FormatError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestMode {
    DistJson,
    RawBytes,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{0}: input is empty")]
    EmptyInput(PathBuf),
    #[error("{path}: distribution file is not UTF-8")]
    NotUtf8 { path: PathBuf },
}

/// Reads all of `path`, with `-` meaning `stdin`.
pub fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<Vec<u8>, IngestError> {
    let result = if path == Path::new("-") {
        let mut buf = Vec::new();
        stdin.read_to_end(&mut buf).map(|_| buf)
    } else {
        std::fs::read(path)
    };
    result.map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ingest(
    path: &Path,
    mode: IngestMode,
    stdin: &mut dyn Read,
) -> Result<SourceDistribution, IngestError> {
    let bytes = read_input(path, stdin)?;
    ingest_bytes(path, &bytes, mode)
}

/// Same as [`ingest`] for bytes already in memory; `path` labels errors.
pub fn ingest_bytes(
    path: &Path,
    bytes: &[u8],
    mode: IngestMode,
) -> Result<SourceDistribution, IngestError> {
    match mode {
        IngestMode::RawBytes => empirical_distribution(bytes).map_err(|e| match e {
            SourceError::EmptyInput => IngestError::EmptyInput(path.to_path_buf()),
            other => IngestError::Format {
                path: path.to_path_buf(),
                source: other.into(),
            },
        }),
        IngestMode::DistJson => {
            if bytes.iter().all(u8::is_ascii_whitespace) {
                return Err(IngestError::EmptyInput(path.to_path_buf()));
            }
            let text = std::str::from_utf8(bytes).map_err(|_| IngestError::NotUtf8 {
                path: path.to_path_buf(),
            })?;
            parse_distribution(text).map_err(|source| IngestError::Format {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}
