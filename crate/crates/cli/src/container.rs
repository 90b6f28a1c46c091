//! The `ENC1` encoded-file container.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content                         |
//! |-------|---------------------------------|
//! | 4     | magic `ENC1`                    |
//! | 1     | radix                           |
//! | 4     | codebook JSON length `m`        |
//! | m     | codebook JSON                   |
//! | 8     | payload digit count             |
//! | rest  | packed digits                   |

use codebound_core::codec::{CodecError, DigitStream};
use codebound_core::coding::Codebook;

use crate::formats::{codebook_from_json, codebook_to_json, FormatError};

pub const MAGIC: &[u8; 4] = b"ENC1";

#[derive(Debug, thiserror::Error)]
pub enum ContainerError {
    #[error("not an ENC1 container")]
    BadMagic,
    #[error("container truncated while reading {0}")]
    Truncated(&'static str),
    #[error("codebook block is not UTF-8")]
    BookNotUtf8,
    #[error("codebook block: {0}")]
    Book(#[from] FormatError),
    #[error("header radix {header} disagrees with codebook radix {book}")]
    RadixMismatch { header: u32, book: u32 },
    #[error("radix {0} does not fit the one-byte header field")]
    RadixTooLarge(u32),
    #[error("digit count {0} does not fit in memory")]
    CountTooLarge(u64),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

pub fn write_container(book: &Codebook, stream: &DigitStream) -> Result<Vec<u8>, ContainerError> {
    let radix =
        u8::try_from(book.radix()).map_err(|_| ContainerError::RadixTooLarge(book.radix()))?;
    if stream.radix() != book.radix() {
        return Err(CodecError::RadixMismatch {
            stream: stream.radix(),
            book: book.radix(),
        }
        .into());
    }
    let json = codebook_to_json(book);
    let packed = stream.pack();
    let mut out = Vec::with_capacity(4 + 1 + 4 + json.len() + 8 + packed.len());
    out.extend_from_slice(MAGIC);
    out.push(radix);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(json.as_bytes());
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    out.extend_from_slice(&packed);
    Ok(out)
}

pub fn read_container(bytes: &[u8]) -> Result<(Codebook, DigitStream), ContainerError> {
    let mut rest = bytes;
    let magic = take(&mut rest, 4, "magic")?;
    if magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let header_radix = u32::from(take(&mut rest, 1, "radix")?[0]);
    let book_len = u32::from_le_bytes(take(&mut rest, 4, "codebook length")?.try_into().unwrap());
    let json = take(&mut rest, book_len as usize, "codebook")?;
    let json = std::str::from_utf8(json).map_err(|_| ContainerError::BookNotUtf8)?;
    let book = codebook_from_json(json)?;
    if book.radix() != header_radix {
        return Err(ContainerError::RadixMismatch {
            header: header_radix,
            book: book.radix(),
        });
    }
    let count = u64::from_le_bytes(take(&mut rest, 8, "digit count")?.try_into().unwrap());
    let count = usize::try_from(count).map_err(|_| ContainerError::CountTooLarge(count))?;
    let stream = DigitStream::unpack(header_radix, rest, count)?;
    Ok((book, stream))
}

fn take<'a>(rest: &mut &'a [u8], n: usize, what: &'static str) -> Result<&'a [u8], ContainerError> {
    if rest.len() < n {
        return Err(ContainerError::Truncated(what));
    }
    let (head, tail) = rest.split_at(n);
    *rest = tail;
    Ok(head)
}
