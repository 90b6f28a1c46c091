//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p codebound-cli --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use codebound_cli::container::{read_container, write_container};
use codebound_core::bounds::{
    check_code_bounding, check_compression, convergence_table, excess_sensitivity,
    random_distribution,
};
use codebound_core::certified::entropy_gap;
use codebound_core::codec::{decode, encode_indices, DigitStream};
use codebound_core::coding::{
    average_length, canonical_codewords, classic_shannon_lengths, huffman_lengths, lengths_for,
    CodeFamily, LengthProfile,
};
use codebound_core::entropy::{
    boltzmann_entropy, entropy_bits, entropy_radix, g_n, gibbs_entropy, physical_to_bits,
};
use codebound_core::source::nth_extension;
use codebound_core::{SequenceModel, SourceDistribution, DEFAULT_EXTENSION_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_SEED: u64 = 0xacce_0001;
const SUITE_SIZE: usize = 1200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn f(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// `H_r` straight from the definition.
fn oracle_entropy(probs: &[BigRational], radix: u32) -> f64 {
    -probs
        .iter()
        .map(f)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
        / f64::from(radix).ln()
}

/// Smallest `l` with `r^l >= 1/p`: a float guess, corrected exactly.
fn oracle_shannon_length(p: &BigRational, radix: u32) -> u32 {
    let (num, den) = (p.numer(), p.denom());
    let r = BigInt::from(radix);
    let guess = ((den.to_f64().unwrap().ln() - num.to_f64().unwrap().ln()) / f64::from(radix).ln())
        .ceil()
        .max(0.0) as u32;
    let mut l = guess;
    while l > 0 && num * r.pow(l - 1) >= *den {
        l -= 1;
    }
    while num * r.pow(l) < *den {
        l += 1;
    }
    l
}

fn oracle_average(probs: &[BigRational], lengths: &[u32]) -> BigRational {
    probs
        .iter()
        .zip(lengths)
        .map(|(p, &l)| p * int(l.into()))
        .sum()
}

fn suite() -> Vec<SourceDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    (0..SUITE_SIZE)
        .map(|_| random_distribution(&mut rng, 16))
        .collect()
}

fn timed(limit: Duration, elapsed: Duration, detail: String) -> Outcome {
    if elapsed < limit {
        Ok(format!("{detail}; {elapsed:.2?} < {limit:?}"))
    } else {
        Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn zero_entropy_boundary() -> Outcome {
    let start = Instant::now();
    let s =
        SourceDistribution::from_ratios(&["s1", "s2", "s3"], &[(1, 1), (0, 1), (0, 1)]).unwrap();
    let classic = check_code_bounding(&s, 2, CodeFamily::ClassicShannon).unwrap();
    let extended = check_code_bounding(&s, 2, CodeFamily::ExtendedShannon).unwrap();
    let elapsed = start.elapsed();

    ensure!(
        classic.avg_len_per_symbol.is_zero(),
        "classic avg {}",
        classic.avg_len_per_symbol
    );
    ensure!(
        classic.exact_excess == Some(BigRational::zero()),
        "classic excess not exactly 0"
    );
    ensure!(
        classic.lower_attained && classic.holds(),
        "classic verdicts {classic:?}"
    );
    ensure!(
        extended.avg_len_per_symbol.is_one(),
        "extended avg {}",
        extended.avg_len_per_symbol
    );
    ensure!(
        extended.exact_excess == Some(BigRational::one()),
        "extended excess not exactly 1"
    );
    ensure!(
        extended.upper_attained && extended.holds(),
        "extended verdicts {extended:?}"
    );
    timed(
        Duration::from_millis(1),
        elapsed,
        "classic L = 0 = H, extended L = 1 = H + 1".into(),
    )
}

fn compression_boundary() -> Outcome {
    let s = SourceDistribution::from_ratios(&["s1", "s2"], &[(1, 1), (0, 1)]).unwrap();
    let start = Instant::now();
    let table = convergence_table(&s, 2, 8, DEFAULT_EXTENSION_CAP).unwrap();
    let elapsed = start.elapsed();

    let excesses: Vec<BigRational> = table
        .rows
        .iter()
        .map(|r| r.exact_excess.clone().unwrap_or_else(|| int(-1)))
        .collect();
    let expected: Vec<BigRational> = (1..=8).map(|n| ratio(1, n)).collect();
    ensure!(table.rows.len() == 8, "{} rows", table.rows.len());
    for (row, want) in table.rows.iter().zip(&expected) {
        ensure!(&row.avg == want, "n = {}: avg {} != {want}", row.n, row.avg);
        ensure!(row.within_bound, "n = {} outside bound", row.n);
    }
    ensure!(excesses == expected, "excess sequence {excesses:?}");
    timed(
        Duration::from_millis(10),
        elapsed,
        "avg = excess = 1/n exactly for n = 1..8".into(),
    )
}

fn code_bounding_sweep() -> Outcome {
    let sources = suite();
    let start = Instant::now();
    let mut checks = 0;
    let mut classic_checks = 0;
    for (i, s) in sources.iter().enumerate() {
        for radix in [2, 3, 4] {
            let h = oracle_entropy(s.probs(), radix);

            let ext = check_code_bounding(s, radix, CodeFamily::ExtendedShannon).unwrap();
            let mut lengths: Vec<u32> = s
                .probs()
                .iter()
                .map(|p| {
                    if p.is_zero() {
                        0
                    } else {
                        oracle_shannon_length(p, radix)
                    }
                })
                .collect();
            if s.is_certain() {
                let i = s.probs().iter().position(One::is_one).unwrap();
                lengths[i] = 1;
            }
            let want = oracle_average(s.probs(), &lengths);
            ensure!(
                ext.avg_len_per_symbol == want,
                "source {i}, r = {radix}: extended avg"
            );
            let avg = f(&want);
            ensure!(
                h - 1e-9 <= avg && avg <= h + 1.0 + 1e-9,
                "source {i}, r = {radix}: extended avg {avg} vs H {h}"
            );
            ensure!(
                ext.holds(),
                "source {i}, r = {radix}: extended report {ext:?}"
            );
            checks += 1;

            if s.probs().iter().all(|p| !p.is_zero()) {
                let classic = check_code_bounding(s, radix, CodeFamily::ClassicShannon).unwrap();
                let lengths: Vec<u32> = s
                    .probs()
                    .iter()
                    .map(|p| oracle_shannon_length(p, radix))
                    .collect();
                let want = oracle_average(s.probs(), &lengths);
                ensure!(
                    classic.avg_len_per_symbol == want,
                    "source {i}, r = {radix}: classic avg"
                );
                ensure!(
                    classic.strict_upper && classic.upper_ok && classic.lower_ok,
                    "source {i}, r = {radix}: classic report {classic:?}"
                );
                ensure!(
                    f(&want) - h < 1.0 + 1e-9,
                    "source {i}, r = {radix}: classic excess {}",
                    f(&want) - h
                );
                classic_checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    timed(
        Duration::from_secs(5),
        elapsed,
        format!(
            "{} sources x r in {{2,3,4}}: {checks} extended, {classic_checks} strict classic checks",
            sources.len()
        ),
    )
}

/// `S^n` probabilities by direct product enumeration, independent of the
/// library's extension code.
fn oracle_tuple_probs(probs: &[BigRational], n: u32) -> Vec<BigRational> {
    (0..n).fold(vec![BigRational::one()], |acc, _| {
        acc.iter()
            .flat_map(|a| probs.iter().map(move |p| a * p))
            .collect()
    })
}

fn code_compression_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 2);
    let sources: Vec<SourceDistribution> =
        (0..100).map(|_| random_distribution(&mut rng, 5)).collect();
    let mut library = Duration::ZERO;
    let wall = Instant::now();
    let mut worst: f64 = f64::NEG_INFINITY;
    for (i, s) in sources.iter().enumerate() {
        let radix = [2, 3, 4][i % 3];
        for n in 1..=6u32 {
            let start = Instant::now();
            let report = check_compression(s, radix, n, DEFAULT_EXTENSION_CAP).unwrap();
            let ext = nth_extension(s, n, DEFAULT_EXTENSION_CAP).unwrap();
            let h_ext = entropy_radix(&ext.as_distribution().unwrap(), radix)
                .unwrap()
                .value;
            let h = entropy_radix(s, radix).unwrap().value;
            library += start.elapsed();

            let bound = 1.0 / f64::from(n);
            ensure!(
                report.excess <= bound + 1e-9 && report.holds(),
                "source {i}, r = {radix}, n = {n}: excess {} > {bound}",
                report.excess
            );
            worst = worst.max(report.excess - bound);

            let n_h = f64::from(n) * h;
            ensure!(
                (h_ext - n_h).abs() <= 1e-9 * h_ext.abs().max(n_h.abs()),
                "source {i}, n = {n}: H(S^n) {h_ext} vs n H(S) {n_h}"
            );

            let tuple_probs = oracle_tuple_probs(s.probs(), n);
            ensure!(
                ext.probs().eq(tuple_probs.iter()),
                "source {i}, n = {n}: extension probabilities differ from direct products"
            );
            ensure!(
                (oracle_entropy(&tuple_probs, radix) - h_ext).abs() <= 1e-9 * h_ext.abs().max(1.0),
                "source {i}, n = {n}: H(S^n) vs oracle"
            );
            let direct: BigRational = tuple_probs
                .iter()
                .filter(|p| !p.is_zero())
                .map(|p| {
                    let l = if p.is_one() {
                        1
                    } else {
                        oracle_shannon_length(p, radix)
                    };
                    p * int(l.into())
                })
                .sum();
            ensure!(
                direct == report.block_avg,
                "source {i}, n = {n}: L(S^n) mismatch"
            );
            ensure!(
                report.block_avg == &report.avg_len_per_symbol * int(n.into()),
                "source {i}, n = {n}: L(S^n) != n * per-symbol average"
            );
        }
    }
    timed(
        Duration::from_secs(30),
        library,
        format!(
            "100 sources, n = 1..6, excess <= 1/n, H(S^n) = n H(S), L(S^n) = n L exactly; \
             max (excess - 1/n) = {worst:.3e}; with oracle cross-checks {:.2?}; library time",
            wall.elapsed()
        ),
    )
}

fn equality_case() -> Outcome {
    let mut seen = Vec::new();
    for (radix, ks) in [(2u32, 1..=4u32), (3, 1..=2)] {
        for k in ks {
            let q = radix.pow(k) as usize;
            let s = SourceDistribution::uniform(q).unwrap();
            let profile = classic_shannon_lengths(&s, radix).unwrap();
            ensure!(
                profile.lengths().iter().all(|&l| l == k),
                "q = {q}: lengths {:?}",
                profile.lengths()
            );
            let report = check_code_bounding(&s, radix, CodeFamily::ClassicShannon).unwrap();
            ensure!(
                report.avg_len_per_symbol == int(k.into()),
                "q = {q}: avg {}",
                report.avg_len_per_symbol
            );
            ensure!(
                entropy_gap(&report.avg_len_per_symbol, &s, radix).is_exactly_zero(),
                "q = {q}: L - H_r not exactly zero"
            );
            ensure!(
                report.lower_attained && report.holds(),
                "q = {q}: {report:?}"
            );
            ensure!(
                (report.h_r - f64::from(k)).abs() < 1e-12,
                "q = {q}: H_r {}",
                report.h_r
            );
            seen.push(format!("{radix}^{k}"));
        }
    }
    Ok(format!(
        "L = H_r = k, excess exactly 0 for q = {}",
        seen.join(", ")
    ))
}

fn excess_sensitivity_case() -> Outcome {
    let eps = ratio(1, 1000);
    let s = excess_sensitivity(4, 2, &eps).unwrap();

    // Lengths from the definition: 251/1000 -> 2, 247/1000 -> 3,
    // 249/1000 -> 3, 253/1000 -> 2.
    let over_probs = [
        ratio(251, 1000),
        ratio(251, 1000),
        ratio(251, 1000),
        ratio(247, 1000),
    ];
    let under_probs = [
        ratio(249, 1000),
        ratio(249, 1000),
        ratio(249, 1000),
        ratio(253, 1000),
    ];
    let over_excess =
        f(&oracle_average(&over_probs, &[2, 2, 2, 3])) - oracle_entropy(&over_probs, 2);
    let under_excess =
        f(&oracle_average(&under_probs, &[3, 3, 3, 2])) - oracle_entropy(&under_probs, 2);

    ensure!(
        s.just_over.source.probs() == over_probs,
        "just-over probabilities"
    );
    ensure!(
        s.just_under.source.probs() == under_probs,
        "just-under probabilities"
    );
    ensure!(
        s.just_over.lengths == [2, 2, 2, 3],
        "just-over lengths {:?}",
        s.just_over.lengths
    );
    ensure!(
        s.just_under.lengths == [3, 3, 3, 2],
        "just-under lengths {:?}",
        s.just_under.lengths
    );
    ensure!(
        (s.just_over.excess - over_excess).abs() < 1e-12,
        "just-over excess vs oracle"
    );
    ensure!(
        (s.just_under.excess - under_excess).abs() < 1e-12,
        "just-under excess vs oracle"
    );
    ensure!(
        (s.just_under.excess - 0.75).abs() <= 0.01,
        "just under: excess {} not within 0.01 of 3/4",
        s.just_under.excess
    );
    ensure!(
        (s.just_over.excess - 0.25).abs() <= 0.01,
        "just over: excess {} not within 0.01 of 1/4",
        s.just_over.excess
    );
    Ok(format!(
        "just under: {:.6} (~(q-1)/q = 0.75), just over: {:.6} (~1/q = 0.25); \
         note: the (q-1)/q excess comes from the just-under direction, not just-over",
        s.just_under.excess, s.just_over.excess
    ))
}

/// Minimum average over all length profiles in `1..=q` satisfying Kraft.
fn brute_force_optimum(probs: &[BigRational]) -> BigRational {
    let q = probs.len() as u32;
    let mut best: Option<BigRational> = None;
    let mut lengths = vec![1u32; probs.len()];
    loop {
        let kraft: BigRational = lengths
            .iter()
            .map(|&l| BigRational::new(BigInt::one(), BigInt::from(2).pow(l)))
            .sum();
        if kraft <= BigRational::one() {
            let avg = oracle_average(probs, &lengths);
            if best.as_ref().is_none_or(|b| avg < *b) {
                best = Some(avg);
            }
        }
        let mut pos = 0;
        loop {
            if pos == lengths.len() {
                return best.expect("the block profile is feasible");
            }
            lengths[pos] += 1;
            if lengths[pos] <= q {
                break;
            }
            lengths[pos] = 1;
            pos += 1;
        }
    }
}

fn huffman_dominance() -> Outcome {
    let sources = suite();
    let mut compared = 0;
    let mut single_symbol = 0;
    for (i, s) in sources.iter().enumerate() {
        if s.probs().iter().any(Zero::is_zero) {
            continue;
        }
        for radix in [2, 3, 4] {
            let huff = average_length(s, &huffman_lengths(s, radix).unwrap()).unwrap();
            let classic = average_length(s, &classic_shannon_lengths(s, radix).unwrap()).unwrap();
            if s.q() == 1 {
                // One symbol: Huffman keeps a length-1 codeword, classic
                // Shannon gives the certain event length 0.
                ensure!(
                    huff.is_one() && classic.is_zero(),
                    "source {i}: single-symbol averages {huff} / {classic}"
                );
                single_symbol += 1;
                continue;
            }
            ensure!(
                huff <= classic,
                "source {i}, r = {radix}: Huffman {huff} > classic {classic}"
            );
            compared += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 7);
    let small: Vec<SourceDistribution> = sources
        .iter()
        .filter(|s| s.q() <= 5)
        .cloned()
        .chain((0..300).map(|_| random_distribution(&mut rng, 5)))
        .filter(|s| s.probs().iter().all(|p| !p.is_zero()))
        .collect();
    for (i, s) in small.iter().enumerate() {
        let huff = average_length(s, &huffman_lengths(s, 2).unwrap()).unwrap();
        let best = brute_force_optimum(s.probs());
        ensure!(
            huff == best,
            "small source {i}: Huffman {huff} != optimum {best}"
        );
    }
    Ok(format!(
        "{compared} (source, radix) pairs with q >= 2 and all p > 0; \
         {} q <= 5 sources match the brute-force optimum; \
         excluded {single_symbol} single-symbol pairs (Huffman 1 > classic 0 by the length-1 rule)",
        small.len()
    ))
}

fn codec_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 8);
    let families = [
        CodeFamily::ClassicShannon,
        CodeFamily::ExtendedShannon,
        CodeFamily::Block,
        CodeFamily::Huffman,
    ];
    let mut digits_total = 0usize;
    for trial in 0..10_000 {
        let radix = rng.gen_range(2..=8u32);
        let s = random_distribution(&mut rng, 12);
        let family = families[rng.gen_range(0..families.len())];
        let profile: LengthProfile = lengths_for(&s, radix, family).unwrap();
        let book = canonical_codewords(&profile, s.labels()).unwrap();
        let usable: Vec<usize> = (0..s.q()).filter(|&i| book.codeword(i).is_some()).collect();
        let message: Vec<usize> = if usable.is_empty() {
            Vec::new()
        } else {
            (0..rng.gen_range(0..=64))
                .map(|_| usable[rng.gen_range(0..usable.len())])
                .collect()
        };

        let stream = encode_indices(&message, &book).unwrap();
        let concatenated: Vec<u8> = message
            .iter()
            .flat_map(|&i| book.codeword(i).unwrap().iter().copied())
            .collect();
        let length_sum: usize = message.iter().map(|&i| profile.lengths()[i] as usize).sum();
        ensure!(
            stream.digits() == concatenated,
            "trial {trial}: digits differ from concatenation"
        );
        ensure!(
            stream.len() == length_sum,
            "trial {trial}: length {} != {length_sum}",
            stream.len()
        );

        let decoded = decode(&stream, &book).unwrap();
        let expected: Vec<&str> = message.iter().map(|&i| s.labels()[i].as_str()).collect();
        ensure!(decoded == expected, "trial {trial}: decode(encode(m)) != m");

        let bytes = write_container(&book, &stream).unwrap();
        let (book2, stream2) = read_container(&bytes).unwrap();
        ensure!(stream2 == stream, "trial {trial}: container stream differs");
        ensure!(
            book2.entries().collect::<Vec<_>>().len() == book.entries().count()
                && book.entries().all(|(l, w)| book2.get(l) == Some(w)),
            "trial {trial}: container codebook differs"
        );
        ensure!(
            write_container(&book2, &stream2).unwrap() == bytes,
            "trial {trial}: container bytes not reproduced"
        );
        let repacked = DigitStream::unpack(radix, &stream.pack(), stream.len()).unwrap();
        ensure!(repacked == stream, "trial {trial}: pack/unpack");
        digits_total += stream.len();
    }
    Ok(format!(
        "10000 (book, message) pairs, {digits_total} digits, containers byte-exact"
    ))
}

fn physical_entropy() -> Outcome {
    let sources = suite();
    let mut worst: f64 = 0.0;
    for (i, s) in sources.iter().enumerate() {
        let bits = physical_to_bits(gibbs_entropy(s)).value;
        let direct = entropy_bits(s).value;
        let oracle = oracle_entropy(s.probs(), 2);
        ensure!(
            (bits - direct).abs() <= 1e-12,
            "source {i}: {bits} vs {direct}"
        );
        ensure!(
            (direct - oracle).abs() <= 1e-12,
            "source {i}: entropy_bits vs oracle"
        );
        worst = worst.max((bits - direct).abs());
    }
    for k in 0..=20u32 {
        let bits = physical_to_bits(boltzmann_entropy(1u64 << k).unwrap()).value;
        ensure!(
            (bits - f64::from(k)).abs() <= 1e-12,
            "Omega = 2^{k}: {bits} bits"
        );
        worst = worst.max((bits - f64::from(k)).abs());
    }
    Ok(format!(
        "{} sources and Omega = 2^0..2^20; max deviation {worst:.1e} bits",
        sources.len()
    ))
}

fn block_entropy_estimator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED ^ 10);
    let mut cases = 0;
    for i in 0..60 {
        let s = random_distribution(&mut rng, 3);
        let h = oracle_entropy(s.probs(), 2);
        let model = SequenceModel::Iid(s);
        for n in 1..=6 {
            let g = g_n(&model, n, DEFAULT_EXTENSION_CAP).unwrap().value;
            ensure!(
                (g - h).abs() <= 1e-12,
                "iid source {i}, N = {n}: G_N {g} vs H {h}"
            );
            cases += 1;
        }
    }

    let model = SequenceModel::stationary_markov(vec![
        vec![ratio(3, 4), ratio(1, 4)],
        vec![ratio(1, 3), ratio(2, 3)],
    ])
    .unwrap();
    let g: Vec<f64> = (1..=6)
        .map(|n| g_n(&model, n, DEFAULT_EXTENSION_CAP).unwrap().value)
        .collect();
    for w in g.windows(2) {
        ensure!(w[1] <= w[0], "Markov G_N increased: {g:?}");
    }
    let shown: Vec<String> = g.iter().map(|x| format!("{x:.6}")).collect();
    Ok(format!(
        "{cases} iid (source, N) cases; stationary Markov G_1..G_6 = {}",
        shown.join(" >= ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("zero-entropy boundary", zero_entropy_boundary),
        ("compression boundary", compression_boundary),
        ("code bounding sweep", code_bounding_sweep),
        ("code compression sweep", code_compression_sweep),
        ("uniform equality case", equality_case),
        ("excess sensitivity", excess_sensitivity_case),
        ("Huffman dominance", huffman_dominance),
        ("codec round trips", codec_round_trips),
        ("physical entropy", physical_entropy),
        ("block entropy estimator", block_entropy_estimator),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
