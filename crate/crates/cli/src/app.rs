//! Command-line front end.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use codebound_core::bounds::{
    check_code_bounding, check_compression, convergence_table, excess_sensitivity,
    good_code_bound_check, BoundError,
};
use codebound_core::codec::{encode_indices, CodecError, Decoder};
use codebound_core::coding::{
    average_length, canonical_codewords, is_good_code, kraft_sum, lengths_for, CodeFamily,
    CodingError, MAX_CODEBOOK_RADIX,
};
use codebound_core::entropy::{
    boltzmann_entropy, entropy_bits, entropy_radix, gibbs_entropy, is_zero_entropy,
    physical_to_bits, EntropyError, PhysicalEntropy,
};
use codebound_core::rational::{parse_ratio, to_f64};
use codebound_core::source::{label_byte, nth_extension, SourceDistribution, SourceError};
use codebound_core::DEFAULT_EXTENSION_CAP;
use num_rational::BigRational;
use serde::Serialize;

use crate::container::{read_container, write_container, ContainerError};
use crate::formats::{codebook_to_json, distribution_to_json, CodebookFile};
use crate::ingest::{ingest, read_input, IngestError, IngestMode};
use crate::report::{
    bound_text, convergence_csv, convergence_text, fmt_f64, fmt_ratio, render_fields, render_table,
    sensitivity_text, to_json, BoundView, ConvergenceView, SensitivityView,
};

#[derive(Debug, Parser)]
#[command(
    name = "codebound",
    version,
    about = "Entropy, source codes and their bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Distribution file (`{"symbols":[{"label":..,"p":"n/d"}]}`); `-` for stdin.
    #[arg(long, value_name = "PATH")]
    dist: Option<PathBuf>,
    /// Any file; its byte frequencies become the source.
    #[arg(long, value_name = "PATH")]
    raw: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct OptionalInput {
    #[arg(long, value_name = "PATH")]
    dist: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    raw: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Radix {
    /// Code radix.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    radix: u32,
}

#[derive(Debug, Args)]
struct Cap {
    /// Largest number of extension tuples to enumerate.
    #[arg(long, default_value_t = DEFAULT_EXTENSION_CAP)]
    cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Classic,
    Extended,
    Block,
    Huffman,
}

impl From<Family> for CodeFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Classic => CodeFamily::ClassicShannon,
            Family::Extended => CodeFamily::ExtendedShannon,
            Family::Block => CodeFamily::Block,
            Family::Huffman => CodeFamily::Huffman,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of a source.
    Entropy {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        radix: Radix,
        #[arg(long)]
        json: bool,
    },
    /// Build a code and report its lengths, codewords and average length.
    Code {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        radix: Radix,
        #[arg(long, value_enum, default_value_t = Family::Huffman)]
        family: Family,
        /// Also write the codebook JSON here.
        #[arg(long, value_name = "PATH")]
        codebook_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check H <= avg <= H + 1/n; exits 2 on a violation.
    Bounds {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        radix: Radix,
        #[arg(long, value_enum, default_value_t = Family::Extended)]
        family: Family,
        /// Extension order.
        #[arg(short, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[command(flatten)]
        cap: Cap,
        #[arg(long)]
        json: bool,
    },
    /// The n-th extension of a source, or with --table its convergence table.
    Extend {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        radix: Radix,
        #[arg(short, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// CSV rows `n,avg,entropy,excess,bound` for orders 1..=n.
        #[arg(long)]
        table: bool,
        /// Print the table as aligned columns instead of CSV.
        #[arg(long, requires = "table")]
        aligned: bool,
        #[command(flatten)]
        cap: Cap,
        #[arg(long)]
        json: bool,
    },
    /// Compress a file into an ENC1 container.
    Encode {
        /// File to compress.
        #[arg(long, value_name = "PATH")]
        raw: PathBuf,
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
        #[command(flatten)]
        radix: Radix,
        #[arg(long, value_enum, default_value_t = Family::Huffman)]
        family: Family,
        #[arg(long)]
        json: bool,
    },
    /// Restore a file from an ENC1 container.
    Decode {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Physical entropy conversions.
    #[command(group(
        ArgGroup::new("mode")
            .required(true)
            .args(["gibbs_from_dist", "boltzmann", "to_bits"])
    ))]
    Physics {
        #[command(flatten)]
        input: OptionalInput,
        /// Gibbs entropy of the --dist or --raw source.
        #[arg(long)]
        gibbs_from_dist: bool,
        /// Boltzmann entropy of OMEGA equally likely microstates.
        #[arg(long, value_name = "OMEGA")]
        boltzmann: Option<u64>,
        /// Convert an entropy in J/K to bits.
        #[arg(long, value_name = "VALUE", allow_negative_numbers = true)]
        to_bits: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Classic Shannon excess of a nudged uniform source, both directions.
    Sensitivity {
        #[arg(short)]
        q: usize,
        #[command(flatten)]
        radix: Radix,
        #[arg(long, default_value = "1/1000")]
        epsilon: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("{path}: {source}")]
    Container {
        path: PathBuf,
        #[source]
        source: ContainerError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Violation,
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 1 on usage or validation errors, 2 when a bound check
/// fails.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let mut out = String::new();
    let status = dispatch(cli.command, stdin, &mut out);
    if stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return 1;
    }
    match status {
        Ok(Status::Ok) => 0,
        Ok(Status::Violation) => {
            let _ = writeln!(stderr, "bound violation");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn Read, out: &mut String) -> Result<Status, AppError> {
    match command {
        Command::Entropy { input, radix, json } => {
            let source = load(&input.dist, &input.raw, stdin)?;
            entropy_cmd(&source, radix.radix, json, out)
        }
        Command::Code {
            input,
            radix,
            family,
            codebook_out,
            json,
        } => {
            let source = load(&input.dist, &input.raw, stdin)?;
            code_cmd(
                &source,
                radix.radix,
                family.into(),
                codebook_out.as_deref(),
                json,
                out,
            )
        }
        Command::Bounds {
            input,
            radix,
            family,
            n,
            cap,
            json,
        } => {
            let source = load(&input.dist, &input.raw, stdin)?;
            bounds_cmd(&source, radix.radix, family.into(), n, cap.cap, json, out)
        }
        Command::Extend {
            input,
            radix,
            n,
            table,
            aligned,
            cap,
            json,
        } => {
            let source = load(&input.dist, &input.raw, stdin)?;
            let format = match (table, json, aligned) {
                (false, _, _) => None,
                (true, true, _) => Some(TableFormat::Json),
                (true, false, true) => Some(TableFormat::Aligned),
                (true, false, false) => Some(TableFormat::Csv),
            };
            extend_cmd(&source, radix.radix, n, format, cap.cap, json, out)
        }
        Command::Encode {
            raw,
            output,
            radix,
            family,
            json,
        } => encode_cmd(&raw, &output, radix.radix, family.into(), json, stdin, out),
        Command::Decode {
            input,
            output,
            json,
        } => decode_cmd(&input, &output, json, stdin, out),
        Command::Physics {
            input,
            gibbs_from_dist,
            boltzmann,
            to_bits,
            json,
        } => {
            let physical = if gibbs_from_dist {
                if input.dist.is_none() && input.raw.is_none() {
                    return Err(AppError::Usage(
                        "--gibbs-from-dist needs --dist or --raw".into(),
                    ));
                }
                gibbs_entropy(&load(&input.dist, &input.raw, stdin)?)
            } else if let Some(omega) = boltzmann {
                boltzmann_entropy(omega)?
            } else {
                let value = to_bits.expect("clap enforces one mode");
                if !value.is_finite() || value < 0.0 {
                    return Err(AppError::Usage(format!(
                        "entropy must be a finite non-negative number of J/K, got {value}"
                    )));
                }
                PhysicalEntropy {
                    joules_per_kelvin: value,
                }
            };
            physics_out(physical, json, out);
            Ok(Status::Ok)
        }
        Command::Sensitivity {
            q,
            radix,
            epsilon,
            json,
        } => {
            let epsilon =
                parse_ratio(&epsilon).map_err(|e| AppError::Usage(format!("--epsilon: {e}")))?;
            let s = excess_sensitivity(q, radix.radix, &epsilon)?;
            out.push_str(&if json {
                to_json(&SensitivityView::from(&s))
            } else {
                sensitivity_text(&s)
            });
            Ok(Status::Ok)
        }
    }
}

fn load(
    dist: &Option<PathBuf>,
    raw: &Option<PathBuf>,
    stdin: &mut dyn Read,
) -> Result<SourceDistribution, AppError> {
    let (path, mode) = match (dist, raw) {
        (Some(p), _) => (p, IngestMode::DistJson),
        (None, Some(p)) => (p, IngestMode::RawBytes),
        (None, None) => return Err(AppError::Usage("one of --dist or --raw is required".into())),
    };
    Ok(ingest(path, mode, stdin)?)
}

#[derive(Serialize)]
struct EntropyView {
    q: usize,
    radix: u32,
    entropy: f64,
    entropy_bits: f64,
    zero_entropy: bool,
}

fn entropy_cmd(
    source: &SourceDistribution,
    radix: u32,
    json: bool,
    out: &mut String,
) -> Result<Status, AppError> {
    let view = EntropyView {
        q: source.q(),
        radix,
        entropy: entropy_radix(source, radix)?.value,
        entropy_bits: entropy_bits(source).value,
        zero_entropy: is_zero_entropy(source),
    };
    out.push_str(&if json {
        to_json(&view)
    } else {
        render_fields(&[
            ("symbols", view.q.to_string()),
            ("radix", view.radix.to_string()),
            ("entropy", fmt_f64(view.entropy)),
            ("entropy bits", fmt_f64(view.entropy_bits)),
            ("zero entropy", view.zero_entropy.to_string()),
        ])
    });
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct SymbolView {
    label: String,
    p: String,
    length: u32,
    codeword: Option<String>,
}

#[derive(Serialize)]
struct CodeView {
    family: String,
    radix: u32,
    symbols: Vec<SymbolView>,
    average_length: String,
    average_length_value: f64,
    entropy: f64,
    kraft_sum: String,
    good: bool,
    good_margin: String,
    holds_with_log_q: bool,
    holds_with_one: Option<bool>,
    codebook: Option<CodebookFile>,
}

fn code_cmd(
    source: &SourceDistribution,
    radix: u32,
    family: CodeFamily,
    codebook_out: Option<&Path>,
    json: bool,
    out: &mut String,
) -> Result<Status, AppError> {
    let profile = lengths_for(source, radix, family)?;
    let book = if radix <= MAX_CODEBOOK_RADIX {
        Some(canonical_codewords(&profile, source.labels())?)
    } else {
        None
    };
    if let Some(path) = codebook_out {
        let book = book.as_ref().ok_or_else(|| {
            AppError::Usage(format!(
                "codebooks support radix up to {MAX_CODEBOOK_RADIX}"
            ))
        })?;
        let mut text = codebook_to_json(book);
        text.push('\n');
        write_file(path, text.as_bytes())?;
    }
    let avg = average_length(source, &profile)?;
    let good = is_good_code(source, &profile)?;
    let lemma = good_code_bound_check(source, radix, &profile)?;
    let view = CodeView {
        family: family.name().to_string(),
        radix,
        symbols: source
            .labels()
            .iter()
            .zip(source.probs())
            .zip(profile.lengths())
            .enumerate()
            .map(|(i, ((label, p), &length))| SymbolView {
                label: label.clone(),
                p: fmt_ratio(p),
                length,
                codeword: book.as_ref().and_then(|b| b.render(i)),
            })
            .collect(),
        average_length_value: to_f64(&avg),
        average_length: fmt_ratio(&avg),
        entropy: lemma.h_r,
        kraft_sum: fmt_ratio(&kraft_sum(&profile)),
        good: good.good,
        good_margin: fmt_ratio(&good.margin),
        holds_with_log_q: lemma.holds_with_log_q,
        holds_with_one: lemma.holds_with_one,
        codebook: book.as_ref().map(CodebookFile::from_codebook),
    };
    if json {
        out.push_str(&to_json(&view));
        return Ok(Status::Ok);
    }
    let rows: Vec<Vec<String>> = view
        .symbols
        .iter()
        .map(|s| {
            vec![
                s.label.clone(),
                s.p.clone(),
                s.length.to_string(),
                s.codeword.clone().unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    out.push_str(&render_table(&["label", "p", "length", "codeword"], &rows));
    out.push('\n');
    out.push_str(&render_fields(&[
        ("family", view.family.clone()),
        ("radix", radix.to_string()),
        (
            "average length",
            format!(
                "{} ({})",
                view.average_length,
                fmt_f64(view.average_length_value)
            ),
        ),
        ("entropy", fmt_f64(view.entropy)),
        ("kraft sum", view.kraft_sum.clone()),
        (
            "good",
            format!("{} (margin {})", view.good, view.good_margin),
        ),
        ("H <= avg <= H + log_r q", view.holds_with_log_q.to_string()),
        (
            "H <= avg <= H + 1",
            view.holds_with_one.map_or("n/a".into(), |b| b.to_string()),
        ),
    ]));
    Ok(Status::Ok)
}

fn bounds_cmd(
    source: &SourceDistribution,
    radix: u32,
    family: CodeFamily,
    n: u32,
    cap: usize,
    json: bool,
    out: &mut String,
) -> Result<Status, AppError> {
    let report = match (family, n) {
        (_, 1) => check_code_bounding(source, radix, family)?,
        (CodeFamily::ExtendedShannon, _) => check_compression(source, radix, n, cap)?,
        _ => {
            return Err(AppError::Usage(
                "extension orders above 1 are checked with --family extended".into(),
            ))
        }
    };
    out.push_str(&if json {
        to_json(&BoundView::from(&report))
    } else {
        bound_text(&report)
    });
    Ok(if report.holds() {
        Status::Ok
    } else {
        Status::Violation
    })
}

#[derive(Debug, Clone, Copy)]
enum TableFormat {
    Csv,
    Aligned,
    Json,
}

fn extend_cmd(
    source: &SourceDistribution,
    radix: u32,
    n: u32,
    table: Option<TableFormat>,
    cap: usize,
    json: bool,
    out: &mut String,
) -> Result<Status, AppError> {
    if let Some(format) = table {
        let t = convergence_table(source, radix, n, cap)?;
        out.push_str(&match format {
            TableFormat::Json => to_json(&ConvergenceView::from(&t)),
            TableFormat::Aligned => convergence_text(&t),
            TableFormat::Csv => convergence_csv(&t),
        });
        return Ok(if t.all_within_bound() {
            Status::Ok
        } else {
            Status::Violation
        });
    }
    let ext = nth_extension(source, n, cap)?.as_distribution()?;
    if json {
        out.push_str(&distribution_to_json(&ext));
        out.push('\n');
    } else {
        let rows: Vec<Vec<String>> = ext
            .labels()
            .iter()
            .zip(ext.probs())
            .map(|(l, p)| vec![l.clone(), fmt_ratio(p)])
            .collect();
        out.push_str(&render_table(&["label", "p"], &rows));
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct EncodeView {
    family: String,
    radix: u32,
    symbols: usize,
    input_bytes: usize,
    digits: usize,
    container_bytes: usize,
    expected_digits_per_symbol: String,
    actual_digits_per_symbol: String,
}

fn encode_cmd(
    raw: &Path,
    output: &Path,
    radix: u32,
    family: CodeFamily,
    json: bool,
    stdin: &mut dyn Read,
    out: &mut String,
) -> Result<Status, AppError> {
    if radix > MAX_CODEBOOK_RADIX {
        return Err(AppError::Usage(format!(
            "encode supports radix up to {MAX_CODEBOOK_RADIX}"
        )));
    }
    let data = read_input(raw, stdin)?;
    let source = crate::ingest::ingest_bytes(raw, &data, IngestMode::RawBytes)?;
    let profile = lengths_for(&source, radix, family)?;
    let book = canonical_codewords(&profile, source.labels())?;
    let mut index = [usize::MAX; 256];
    for (i, label) in source.labels().iter().enumerate() {
        let byte = label_byte(label).expect("byte labels round-trip");
        index[byte as usize] = i;
    }
    let message: Vec<usize> = data.iter().map(|&b| index[b as usize]).collect();
    let stream = encode_indices(&message, &book)?;
    let container = write_container(&book, &stream).map_err(|source| AppError::Container {
        path: output.to_path_buf(),
        source,
    })?;
    write_file(output, &container)?;
    let view = EncodeView {
        family: family.name().to_string(),
        radix,
        symbols: source.q(),
        input_bytes: data.len(),
        digits: stream.len(),
        container_bytes: container.len(),
        expected_digits_per_symbol: fmt_ratio(&average_length(&source, &profile)?),
        actual_digits_per_symbol: fmt_ratio(&BigRational::new(
            stream.len().into(),
            data.len().into(),
        )),
    };
    out.push_str(&if json {
        to_json(&view)
    } else {
        render_fields(&[
            ("family", view.family.clone()),
            ("radix", radix.to_string()),
            ("symbols", view.symbols.to_string()),
            ("input bytes", view.input_bytes.to_string()),
            ("digits", view.digits.to_string()),
            ("container bytes", view.container_bytes.to_string()),
            (
                "expected digits/symbol",
                view.expected_digits_per_symbol.clone(),
            ),
            (
                "actual digits/symbol",
                view.actual_digits_per_symbol.clone(),
            ),
        ])
    });
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct DecodeView {
    radix: u32,
    symbols: usize,
    digits: usize,
    output_bytes: usize,
}

fn decode_cmd(
    input: &Path,
    output: &Path,
    json: bool,
    stdin: &mut dyn Read,
    out: &mut String,
) -> Result<Status, AppError> {
    let bytes = read_input(input, stdin)?;
    let (book, stream) = read_container(&bytes).map_err(|source| AppError::Container {
        path: input.to_path_buf(),
        source,
    })?;
    let table = book
        .labels()
        .iter()
        .map(|l| {
            label_byte(l).ok_or_else(|| {
                AppError::Usage(format!("codebook label `{l}` does not name a byte"))
            })
        })
        .collect::<Result<Vec<u8>, _>>()?;
    let decoded: Vec<u8> = Decoder::new(&book)?
        .decode_indices(&stream)?
        .into_iter()
        .map(|i| table[i])
        .collect();
    write_file(output, &decoded)?;
    let view = DecodeView {
        radix: book.radix(),
        symbols: book.labels().len(),
        digits: stream.len(),
        output_bytes: decoded.len(),
    };
    out.push_str(&if json {
        to_json(&view)
    } else {
        render_fields(&[
            ("radix", view.radix.to_string()),
            ("symbols", view.symbols.to_string()),
            ("digits", view.digits.to_string()),
            ("output bytes", view.output_bytes.to_string()),
        ])
    });
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct PhysicsView {
    joules_per_kelvin: f64,
    bits: f64,
}

fn physics_out(physical: PhysicalEntropy, json: bool, out: &mut String) {
    let view = PhysicsView {
        joules_per_kelvin: physical.joules_per_kelvin,
        bits: physical_to_bits(physical).value,
    };
    out.push_str(&if json {
        to_json(&view)
    } else {
        render_fields(&[
            ("J/K", format!("{:e}", view.joules_per_kelvin)),
            ("bits", fmt_f64(view.bits)),
        ])
    });
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    std::fs::write(path, bytes).map_err(|source| AppError::Io {
        path: path.to_path_buf(),
        source,
    })
}
