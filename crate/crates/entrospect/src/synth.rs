//! Deterministic synthetic corpus generator.
//!
//! Files are assembled from segments in five entropy regimes (padding,
//! text, native code, packed, encrypted), realized as skewed byte
//! distributions rather than real compressors: downstream analysis only
//! sees entropy, so matching each regime's expected 256-byte chunk entropy
//! is sufficient and keeps generation seed-reproducible. The skew parameter
//! of each regime is calibrated once by bisection against the measured
//! chunk entropy of its own output.
//!
//! Dirty (label 1) files embed at least one packed-or-encrypted segment of
//! four or more chunks, camouflaged by padding and native flanks; clean
//! files carry the same background regimes plus occasional single-chunk
//! high-entropy spikes, so no segment of concealed payload scale appears in
//! them. Payloads and spikes are always placed inside the file's largest
//! dyadic prefix, where wavelet analysis can see them.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use crate::entropy::{chunk_entropy, DEFAULT_CHUNK_SIZE};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Chunk size the generator is calibrated for.
pub const CHUNK: usize = DEFAULT_CHUNK_SIZE;

/// Content regime of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Regime {
    Padding,
    Text,
    Native,
    Packed,
    Encrypted,
}

impl Regime {
    /// Expected 256-byte chunk entropy of the regime, in bits.
    pub fn target_entropy(self) -> f64 {
        match self {
            Regime::Padding => 0.0,
            Regime::Text => 4.34,
            Regime::Native => 5.09,
            Regime::Packed => 6.80,
            Regime::Encrypted => 7.17,
        }
    }

    pub fn all() -> [Regime; 5] {
        [
            Regime::Padding,
            Regime::Text,
            Regime::Native,
            Regime::Packed,
            Regime::Encrypted,
        ]
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Regime::Padding => "padding",
            Regime::Text => "text",
            Regime::Native => "native",
            Regime::Packed => "packed",
            Regime::Encrypted => "encrypted",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "padding" => Ok(Regime::Padding),
            "text" => Ok(Regime::Text),
            "native" => Ok(Regime::Native),
            "packed" => Ok(Regime::Packed),
            "encrypted" => Ok(Regime::Encrypted),
            other => Err(Error::invalid(format!("unknown regime {other:?}"))),
        }
    }
}

/// One generated segment: a regime over a whole number of chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeSpec {
    pub regime: Regime,
    /// Always a multiple of [`CHUNK`] so regime boundaries align with
    /// entropy chunks.
    pub length_bytes: usize,
}

impl RegimeSpec {
    pub fn from_chunks(regime: Regime, chunks: usize) -> Self {
        RegimeSpec {
            regime,
            length_bytes: chunks * CHUNK,
        }
    }

    pub fn chunks(&self) -> usize {
        self.length_bytes / CHUNK
    }
}

/// Recipe for one synthetic file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSpec {
    pub segments: Vec<RegimeSpec>,
    /// 1 = dirty.
    pub label: u8,
    pub seed: u64,
}

impl FileSpec {
    pub fn total_len(&self) -> usize {
        self.segments.iter().map(|s| s.length_bytes).sum()
    }

    /// Compact `regime:chunks+...` description, e.g. `native:8+encrypted:4`.
    pub fn summary(&self) -> String {
        self.segments
            .iter()
            .map(|s| format!("{}:{}", s.regime, s.chunks()))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Parses a [`FileSpec::summary`] string back into segments.
pub fn parse_summary(s: &str, label: u8, seed: u64) -> Result<FileSpec> {
    let mut segments = Vec::new();
    for part in s.split('+') {
        let (regime, chunks) = part
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("malformed segment {part:?}")))?;
        let regime: Regime = regime.parse()?;
        let chunks: usize = chunks
            .parse()
            .map_err(|_| Error::parse("bad segment chunk count"))?;
        segments.push(RegimeSpec::from_chunks(regime, chunks));
    }
    Ok(FileSpec {
        segments,
        label,
        seed,
    })
}

/// Byte sampling order per regime: the text regime concentrates its mass on
/// printable characters so synthetic "text" also yields plausible strings;
/// everything else uses the identity order (mass at low byte values, like
/// zero-heavy native code).
fn symbol_order(regime: Regime) -> [u8; 256] {
    let mut order = [0u8; 256];
    match regime {
        Regime::Text => {
            let mut at = 0;
            for b in b'a'..=b'z' {
                order[at] = b;
                at += 1;
            }
            order[at] = b' ';
            at += 1;
            for b in b'A'..=b'Z' {
                order[at] = b;
                at += 1;
            }
            for b in b'0'..=b'9' {
                order[at] = b;
                at += 1;
            }
            for b in 0x21..=0x7eu8 {
                if !b.is_ascii_alphanumeric() {
                    order[at] = b;
                    at += 1;
                }
            }
            for b in 0..=0xffu8 {
                if !(0x20..=0x7e).contains(&b) {
                    order[at] = b;
                    at += 1;
                }
            }
            debug_assert_eq!(at, 256);
        }
        _ => {
            for (i, slot) in order.iter_mut().enumerate() {
                *slot = i as u8;
            }
        }
    }
    order
}

/// Cumulative distribution with `p(rank) proportional to rho^rank`.
fn cumulative_probs(rho: f64) -> [f64; 256] {
    let mut cum = [0.0f64; 256];
    let mut weight = 1.0;
    let mut total = 0.0;
    for c in cum.iter_mut() {
        total += weight;
        *c = total;
        weight *= rho;
        if weight < 1e-300 {
            weight = 0.0;
        }
    }
    for c in cum.iter_mut() {
        *c /= total;
    }
    cum
}

fn sample_chunk(cum: &[f64; 256], order: &[u8; 256], rng: &mut Rng, out: &mut [u8]) {
    for slot in out.iter_mut() {
        let u = rng.next_f64();
        let rank = cum.partition_point(|c| *c <= u).min(255);
        *slot = order[rank];
    }
}

/// Mean measured chunk entropy of the skew parameter `rho`, over a fixed
/// sampling budget. Deterministic in `rho`.
fn measured_entropy(rho: f64) -> f64 {
    const PROBE_CHUNKS: usize = 48;
    let cum = cumulative_probs(rho);
    let order = symbol_order(Regime::Native);
    let mut rng = Rng::new(0x5e9_c0de);
    let mut chunk = [0u8; CHUNK];
    let mut sum = 0.0;
    for _ in 0..PROBE_CHUNKS {
        sample_chunk(&cum, &order, &mut rng, &mut chunk);
        sum += chunk_entropy(&chunk).unwrap();
    }
    sum / PROBE_CHUNKS as f64
}

/// Bisects the skew parameter until the measured chunk entropy hits the
/// target. Measured entropy is monotone increasing in `rho`.
fn calibrate_rho(target: f64) -> f64 {
    if target >= measured_entropy(1.0) {
        return 1.0;
    }
    let mut lo = 1e-4;
    let mut hi = 1.0;
    for _ in 0..48 {
        let mid = (lo + hi) / 2.0;
        if measured_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

static REGIME_RHO: LazyLock<[f64; 5]> = LazyLock::new(|| {
    let mut rho = [0.0; 5];
    for regime in Regime::all() {
        if regime != Regime::Padding {
            rho[regime as usize] = calibrate_rho(regime.target_entropy());
        }
    }
    rho
});

/// Generates one segment's bytes. Padding is exact zeros; other regimes
/// sample their calibrated byte distribution.
pub fn generate_segment(spec: &RegimeSpec, seed: u64) -> Result<Vec<u8>> {
    if spec.length_bytes == 0 || !spec.length_bytes.is_multiple_of(CHUNK) {
        return Err(Error::invalid(format!(
            "segment length {} must be a positive multiple of {CHUNK}",
            spec.length_bytes
        )));
    }
    if spec.regime == Regime::Padding {
        return Ok(vec![0u8; spec.length_bytes]);
    }
    let rho = REGIME_RHO[spec.regime as usize];
    let cum = cumulative_probs(rho);
    let order = symbol_order(spec.regime);
    let mut rng = Rng::new(seed);
    let mut out = vec![0u8; spec.length_bytes];
    sample_chunk(&cum, &order, &mut rng, &mut out);
    Ok(out)
}

/// Generates the full byte stream of a file spec; each segment gets an
/// independent generator derived from the file seed.
pub fn generate_file(spec: &FileSpec) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(spec.total_len());
    for (i, segment) in spec.segments.iter().enumerate() {
        let seed = Rng::derive(spec.seed, i as u64).next_u64();
        out.extend(generate_segment(segment, seed)?);
    }
    Ok(out)
}

/// Corpus generation parameters.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_clean: usize,
    pub n_dirty: usize,
    /// File lengths in chunks, drawn log-uniformly from this range.
    pub min_chunks: usize,
    pub max_chunks: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_clean: 100,
            n_dirty: 100,
            min_chunks: 16,
            max_chunks: 256,
            seed: 0,
        }
    }
}

/// One generated corpus member.
#[derive(Debug, Clone)]
pub struct GeneratedFile {
    pub id: String,
    pub bytes: Vec<u8>,
    /// 1 = dirty.
    pub label: u8,
    pub spec: FileSpec,
}

fn log_uniform(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    let (lo_f, hi_f) = (lo as f64, hi as f64 + 1.0);
    let x = (lo_f.ln() + rng.next_f64() * (hi_f.ln() - lo_f.ln())).exp();
    (x as usize).clamp(lo, hi)
}

/// Paints `regime` over `chunks[at..at+len]`, clamped to the array.
fn paint(chunks: &mut [Regime], at: usize, len: usize, regime: Regime) {
    let start = at.min(chunks.len());
    let end = (at + len).min(chunks.len());
    for c in &mut chunks[start..end] {
        *c = regime;
    }
}

fn compress_segments(chunks: &[Regime]) -> Vec<RegimeSpec> {
    let mut segments: Vec<RegimeSpec> = Vec::new();
    for &regime in chunks {
        match segments.last_mut() {
            Some(last) if last.regime == regime => last.length_bytes += CHUNK,
            _ => segments.push(RegimeSpec::from_chunks(regime, 1)),
        }
    }
    segments
}

/// Background of alternating native and text runs with occasional padding.
fn paint_background(chunks: &mut [Regime], rng: &mut Rng) {
    let l = chunks.len();
    let mut at = 0;
    let mut regime = if rng.next_f64() < 0.7 {
        Regime::Native
    } else {
        Regime::Text
    };
    while at < l {
        let run = 3 + rng.next_below((l / 3).max(2) as u64) as usize;
        paint(chunks, at, run, regime);
        at += run;
        regime = if regime == Regime::Native && rng.next_f64() < 0.45 {
            Regime::Text
        } else {
            Regime::Native
        };
    }
    // Padding runs appear in both classes, so zero-entropy mass alone does
    // not mark a file dirty.
    for _ in 0..rng.next_below(3) {
        let len = 1 + rng.next_below((l / 8).max(1) as u64) as usize;
        let pos = rng.next_below((l - len.min(l) + 1) as u64) as usize;
        paint(chunks, pos, len, Regime::Padding);
    }
}

fn build_clean(l: usize, rng: &mut Rng) -> Vec<Regime> {
    let mut chunks = vec![Regime::Native; l];
    paint_background(&mut chunks, rng);
    // Single-chunk high-entropy spikes: legitimate files may carry small
    // compressed resources, never payload-scale runs.
    let l_trunc = 1usize << l.ilog2();
    let n_spikes = rng.next_below((l as u64 / 8).max(3)) as usize;
    let mut spike_positions: Vec<usize> = Vec::new();
    for _ in 0..n_spikes {
        let pos = rng.next_below(l_trunc as u64) as usize;
        // Adjacent spikes would merge into a payload-scale run.
        if spike_positions.iter().any(|&p| p.abs_diff(pos) <= 1) {
            continue;
        }
        let regime = if rng.next_f64() < 0.5 {
            Regime::Encrypted
        } else {
            Regime::Packed
        };
        paint(&mut chunks, pos, 1, regime);
        spike_positions.push(pos);
    }
    chunks
}

fn build_dirty(l: usize, rng: &mut Rng) -> Vec<Regime> {
    let mut chunks = vec![Regime::Native; l];
    paint_background(&mut chunks, rng);
    let l_trunc = 1usize << l.ilog2();
    // Concealed payload: at least 4 contiguous high-entropy chunks, sized as
    // a fraction of the analyzable prefix so the energy lands at coarse
    // resolution levels.
    let frac = 0.05 + 0.40 * rng.next_f64();
    let payload = ((l_trunc as f64 * frac) as usize).clamp(4, l_trunc - 1);
    let pos = rng.next_below((l_trunc - payload + 1) as u64) as usize;
    let regime = if rng.next_f64() < 0.6 {
        Regime::Encrypted
    } else {
        Regime::Packed
    };
    // Padding camouflage flanking the payload.
    if rng.next_f64() < 0.7 {
        let before = rng.next_below((l as u64 / 10).max(1)) as usize;
        let after = rng.next_below((l as u64 / 10).max(1)) as usize;
        paint(&mut chunks, pos.saturating_sub(before), before, Regime::Padding);
        paint(&mut chunks, pos + payload, after, Regime::Padding);
    }
    paint(&mut chunks, pos, payload, regime);
    // The payload is always flanked by native or padding, never text.
    for neighbor in [pos.wrapping_sub(1), pos + payload] {
        if chunks.get(neighbor) == Some(&Regime::Text) {
            paint(&mut chunks, neighbor, 1, Regime::Native);
        }
    }
    chunks
}

/// Generates a labeled corpus, deterministic in the seed: clean files first
/// (`clean_00000`, ...), then dirty files.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<Vec<GeneratedFile>> {
    if cfg.n_clean == 0 || cfg.n_dirty == 0 {
        return Err(Error::invalid(
            "both clean and dirty file counts must be at least 1",
        ));
    }
    if cfg.min_chunks < 8 || cfg.max_chunks < cfg.min_chunks {
        return Err(Error::invalid(
            "chunk range must satisfy 8 <= min_chunks <= max_chunks",
        ));
    }
    let mut out = Vec::with_capacity(cfg.n_clean + cfg.n_dirty);
    for i in 0..cfg.n_clean + cfg.n_dirty {
        let dirty = i >= cfg.n_clean;
        let mut rng = Rng::derive(cfg.seed, i as u64);
        let l = log_uniform(&mut rng, cfg.min_chunks, cfg.max_chunks);
        let chunks = if dirty {
            build_dirty(l, &mut rng)
        } else {
            build_clean(l, &mut rng)
        };
        let spec = FileSpec {
            segments: compress_segments(&chunks),
            label: u8::from(dirty),
            seed: rng.next_u64(),
        };
        let bytes = generate_file(&spec)?;
        let id = if dirty {
            format!("dirty_{:05}", i - cfg.n_clean)
        } else {
            format!("clean_{i:05}")
        };
        out.push(GeneratedFile {
            id,
            bytes,
            label: spec.label,
            spec,
        });
    }
    Ok(out)
}
