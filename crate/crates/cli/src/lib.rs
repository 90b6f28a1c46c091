//! File formats, the `ENC1` container, report rendering and the `codebound`
//! command line, on top of `codebound-core`.

pub mod app;
pub mod container;
pub mod formats;
pub mod ingest;
pub mod report;

pub use app::run;
