//! Sparse binary feature engineering: string dictionary, wavelet-energy
//! group layout, per-section summary entropy statistics, and quantile
//! binning.
//!
//! A [`FeatureDictionary`] is learned from the training split only and then
//! frozen; featurizing is a pure function of `(bytes, dictionary)`. Feature
//! ids are dense `0..P` and partitioned into contiguous blocks in the fixed
//! order strings | wavelet bins | entropy bins, with blocks present
//! according to the dictionary mode.
//!
//! Wavelet energies are laid out per size group: with groups `J = 1..J_max`
//! the continuous layout has `J_max (J_max + 1) / 2` slots and a file of
//! group `J` populates only its own `J`-slot block, so files of different
//! lengths never share wavelet slots. Each continuous slot is discretized
//! into `K + 1` indicator bins by `K` quantile cut points learned from the
//! nonzero training values; intervals are left-open right-closed with open
//! first and last bins. A present value activates exactly one bin; slots
//! belonging to other size groups are structural zeros and activate none.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::binformat::{extract_strings, section_entropy_streams};
use crate::entropy::entropy_stream;
use crate::error::{Error, Result};
use crate::wavelet::{dwt_haar, energy_spectrum, EnergySpectrum};

/// Which feature blocks a dictionary carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    Strings,
    StringsWavelet,
    StringsEntropy,
    StringsEntropyWavelet,
}

impl FeatureMode {
    pub fn has_wavelet(self) -> bool {
        matches!(self, FeatureMode::StringsWavelet | FeatureMode::StringsEntropyWavelet)
    }

    pub fn has_entropy(self) -> bool {
        matches!(self, FeatureMode::StringsEntropy | FeatureMode::StringsEntropyWavelet)
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            FeatureMode::Strings => "strings",
            FeatureMode::StringsWavelet => "strings+wavelet",
            FeatureMode::StringsEntropy => "strings+entropy",
            FeatureMode::StringsEntropyWavelet => "strings+entropy+wavelet",
        })
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strings" => Ok(FeatureMode::Strings),
            "strings+wavelet" => Ok(FeatureMode::StringsWavelet),
            "strings+entropy" => Ok(FeatureMode::StringsEntropy),
            "strings+entropy+wavelet" => Ok(FeatureMode::StringsEntropyWavelet),
            other => Err(Error::invalid(format!("unknown feature mode {other:?}"))),
        }
    }
}

/// Block a feature id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureBlock {
    Strings,
    Wavelet,
    Entropy,
}

impl fmt::Display for FeatureBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            FeatureBlock::Strings => "strings",
            FeatureBlock::Wavelet => "wavelet",
            FeatureBlock::Entropy => "entropy",
        })
    }
}

/// Names of the per-section summary statistics, in slot order.
pub const ENTROPY_STAT_NAMES: [&str; 8] = [
    "mean", "std", "snr", "max", "pct_high", "pct_zero", "len", "len_sq",
];

/// Chunk entropy at or above this many bits counts as "high".
pub const HIGH_ENTROPY_BITS: f64 = 6.5;

/// One continuous feature slot with its learned bin cut points.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSlot {
    pub name: String,
    /// Strictly increasing; `len + 1` bins.
    pub thresholds: Vec<f64>,
}

impl ContinuousSlot {
    pub fn bin_count(&self) -> usize {
        self.thresholds.len() + 1
    }
}

/// Sparse binary sample: the ids of its active features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// Strictly increasing, all below the dictionary's feature count.
    pub indices: Vec<u32>,
    pub sample_id: String,
    pub label: u8,
}

/// Learned, frozen mapping from file content to sparse feature ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDictionary {
    mode: FeatureMode,
    chunk_size: usize,
    min_string_len: usize,
    strings: Vec<String>,
    j_max: usize,
    wavelet_slots: Vec<ContinuousSlot>,
    section_names: Vec<String>,
    entropy_slots: Vec<ContinuousSlot>,
    // Derived, rebuilt on construction.
    string_ids: HashMap<String, u32>,
    wavelet_offsets: Vec<usize>,
    entropy_offsets: Vec<usize>,
    wavelet_bins: usize,
    entropy_bins: usize,
}

fn cumulative_offsets(slots: &[ContinuousSlot]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(slots.len());
    let mut at = 0;
    for slot in slots {
        offsets.push(at);
        at += slot.bin_count();
    }
    (offsets, at)
}

impl FeatureDictionary {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        mode: FeatureMode,
        chunk_size: usize,
        min_string_len: usize,
        strings: Vec<String>,
        j_max: usize,
        wavelet_slots: Vec<ContinuousSlot>,
        section_names: Vec<String>,
        entropy_slots: Vec<ContinuousSlot>,
    ) -> Result<Self> {
        if chunk_size == 0 {
            return Err(Error::invalid("chunk size must be positive"));
        }
        let expected_wavelet = if mode.has_wavelet() { j_max * (j_max + 1) / 2 } else { 0 };
        if wavelet_slots.len() != expected_wavelet {
            return Err(Error::invalid(format!(
                "expected {expected_wavelet} wavelet slots, got {}",
                wavelet_slots.len()
            )));
        }
        let expected_entropy = if mode.has_entropy() {
            section_names.len() * ENTROPY_STAT_NAMES.len()
        } else {
            0
        };
        if entropy_slots.len() != expected_entropy {
            return Err(Error::invalid(format!(
                "expected {expected_entropy} entropy slots, got {}",
                entropy_slots.len()
            )));
        }
        for slot in wavelet_slots.iter().chain(&entropy_slots) {
            let finite = slot.thresholds.iter().all(|t| t.is_finite());
            let increasing = slot.thresholds.windows(2).all(|w| w[0] < w[1]);
            if !finite || !increasing {
                return Err(Error::invalid(format!(
                    "thresholds for slot {:?} are not finite and strictly increasing",
                    slot.name
                )));
            }
        }
        if section_names.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("section names must be sorted and unique"));
        }
        let string_ids = strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect::<HashMap<_, _>>();
        if string_ids.len() != strings.len() {
            return Err(Error::invalid("duplicate strings in dictionary"));
        }
        let (wavelet_offsets, wavelet_bins) = cumulative_offsets(&wavelet_slots);
        let (entropy_offsets, entropy_bins) = cumulative_offsets(&entropy_slots);
        Ok(FeatureDictionary {
            mode,
            chunk_size,
            min_string_len,
            strings,
            j_max,
            wavelet_slots,
            section_names,
            entropy_slots,
            string_ids,
            wavelet_offsets,
            entropy_offsets,
            wavelet_bins,
            entropy_bins,
        })
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    pub fn min_string_len(&self) -> usize {
        self.min_string_len
    }

    pub fn strings(&self) -> &[String] {
        &self.strings
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn wavelet_slots(&self) -> &[ContinuousSlot] {
        &self.wavelet_slots
    }

    pub fn section_names(&self) -> &[String] {
        &self.section_names
    }

    pub fn entropy_slots(&self) -> &[ContinuousSlot] {
        &self.entropy_slots
    }

    pub fn string_id(&self, s: &str) -> Option<u32> {
        self.string_ids.get(s).copied()
    }

    /// First feature id of the wavelet block.
    pub fn wavelet_base(&self) -> usize {
        self.strings.len()
    }

    /// First feature id of the entropy block.
    pub fn entropy_base(&self) -> usize {
        self.strings.len() + self.wavelet_bins
    }

    /// Total number of features `P`.
    pub fn feature_count(&self) -> usize {
        self.strings.len() + self.wavelet_bins + self.entropy_bins
    }

    /// Sizes of the blocks present in this dictionary, in id order.
    pub fn block_sizes(&self) -> Vec<(FeatureBlock, usize)> {
        let mut out = vec![(FeatureBlock::Strings, self.strings.len())];
        if self.mode.has_wavelet() {
            out.push((FeatureBlock::Wavelet, self.wavelet_bins));
        }
        if self.mode.has_entropy() {
            out.push((FeatureBlock::Entropy, self.entropy_bins));
        }
        out
    }

    /// Block owning a feature id.
    pub fn block_of(&self, id: u32) -> Result<FeatureBlock> {
        let id = id as usize;
        if id < self.wavelet_base() {
            Ok(FeatureBlock::Strings)
        } else if id < self.entropy_base() {
            Ok(FeatureBlock::Wavelet)
        } else if id < self.feature_count() {
            Ok(FeatureBlock::Entropy)
        } else {
            Err(Error::invalid(format!(
                "feature id {id} out of range 0..{}",
                self.feature_count()
            )))
        }
    }
}

/// Build configuration for [`build_dictionary`].
#[derive(Debug, Clone)]
pub struct DictionaryConfig {
    pub mode: FeatureMode,
    /// Keep the `top_n` strings by document frequency.
    pub top_n_strings: usize,
    /// Bins per continuous feature (cut points = bins - 1).
    pub bins_per_feature: usize,
    pub min_string_len: usize,
    pub chunk_size: usize,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig {
            mode: FeatureMode::StringsEntropyWavelet,
            top_n_strings: 20_000,
            bins_per_feature: 10,
            min_string_len: crate::binformat::DEFAULT_MIN_STRING_LEN,
            chunk_size: crate::entropy::DEFAULT_CHUNK_SIZE,
        }
    }
}

/// Midpoint-quantile cut points over sorted values: the cut at fraction
/// `k/bins` is the midpoint of the two straddling order statistics when the
/// position is integral and the next order statistic otherwise. Duplicates
/// are collapsed so the result is strictly increasing.
fn quantile_thresholds(values: &mut [f64], bins: usize) -> Vec<f64> {
    if bins < 2 || values.is_empty() {
        return Vec::new();
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut cuts: Vec<f64> = Vec::with_capacity(bins - 1);
    for k in 1..bins {
        let numer = k * n;
        let t = if numer.is_multiple_of(bins) {
            let i = numer / bins;
            if i >= n {
                values[n - 1]
            } else {
                (values[i - 1] + values[i]) / 2.0
            }
        } else {
            values[numer / bins]
        };
        if cuts.last().is_none_or(|last| t > *last) {
            cuts.push(t);
        }
    }
    cuts
}

/// Bin index of `value` among `thresholds`: intervals are
/// `(-inf, t_1], (t_1, t_2], ..., (t_K, inf)`.
pub fn bin_index(value: f64, thresholds: &[f64]) -> usize {
    thresholds.partition_point(|t| *t < value)
}

/// Activates one bin per present value; `None` marks a structural zero that
/// activates nothing. Returns flat indices local to the slot array.
pub fn bin_features(values: &[Option<f64>], slots: &[ContinuousSlot]) -> Vec<usize> {
    debug_assert_eq!(values.len(), slots.len());
    let (offsets, _) = cumulative_offsets(slots);
    values
        .iter()
        .zip(slots)
        .zip(&offsets)
        .filter_map(|((v, slot), offset)| v.map(|v| offset + bin_index(v, &slot.thresholds)))
        .collect()
}

/// Dense wavelet layout of length `j_max (j_max + 1) / 2` with the spectrum
/// written into its size group's block and zeros elsewhere.
pub fn wavelet_group_features(spectrum: &EnergySpectrum, j_max: usize) -> Result<Vec<f64>> {
    let j = spectrum.j();
    if j > j_max {
        return Err(Error::UnseenSizeGroup { got: j, j_max });
    }
    let mut out = vec![0.0; j_max * (j_max + 1) / 2];
    let offset = j * (j - 1) / 2;
    out[offset..offset + j].copy_from_slice(spectrum.as_slice());
    Ok(out)
}

/// Summary statistics of an entropy stream, in [`ENTROPY_STAT_NAMES`] order:
/// mean, population standard deviation, signal-to-noise ratio (0 when the
/// deviation is degenerate), maximum, fraction of chunks at or above
/// [`HIGH_ENTROPY_BITS`], fraction of exactly-zero chunks, length, and
/// squared length.
pub fn summary_entropy_features(values: &[f64]) -> Result<[f64; 8]> {
    if values.is_empty() {
        return Err(Error::invalid("summary statistics need a non-empty stream"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let snr = if std > 1e-12 { mean / std } else { 0.0 };
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pct_high = values.iter().filter(|v| **v >= HIGH_ENTROPY_BITS).count() as f64 / n;
    let pct_zero = values.iter().filter(|v| **v == 0.0).count() as f64 / n;
    Ok([mean, std, snr, max, pct_high, pct_zero, n, n * n])
}

fn whole_file_spectrum(bytes: &[u8], chunk_size: usize) -> Option<EnergySpectrum> {
    let stream = entropy_stream(bytes, chunk_size, "").ok()?;
    let decomp = dwt_haar(stream.values()).ok()?;
    Some(energy_spectrum(&decomp))
}

fn wavelet_slot_name(group: usize, level: usize) -> String {
    format!("wavelet_j{group}_e{level}")
}

fn entropy_slot_name(section: &str, stat: usize) -> String {
    format!("entropy_{section}_{}", ENTROPY_STAT_NAMES[stat])
}

/// Learns a dictionary from the training files: string document
/// frequencies, the wavelet group layout with per-slot quantile bins, and
/// per-section entropy-statistic bins. `files` yields `(sample id, bytes)`
/// pairs; the iterator may produce errors, which abort the build.
pub fn build_dictionary<I>(files: I, cfg: &DictionaryConfig) -> Result<FeatureDictionary>
where
    I: IntoIterator<Item = Result<(String, Vec<u8>)>>,
{
    let mut n_files = 0usize;
    let mut string_counts: HashMap<String, u32> = HashMap::new();
    // (group, level) -> observed energies; section -> per-stat observations.
    let mut wavelet_values: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut entropy_values: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();

    for file in files {
        let (_, bytes) = file?;
        n_files += 1;

        let mut seen: BTreeSet<String> = BTreeSet::new();
        for s in extract_strings(&bytes, cfg.min_string_len) {
            seen.insert(s);
        }
        for s in seen {
            *string_counts.entry(s).or_insert(0) += 1;
        }

        if cfg.mode.has_wavelet() {
            if let Some(spectrum) = whole_file_spectrum(&bytes, cfg.chunk_size) {
                let j = spectrum.j();
                for (level, &e) in spectrum.as_slice().iter().enumerate() {
                    if e != 0.0 {
                        wavelet_values.entry((j, level + 1)).or_default().push(e);
                    }
                }
            }
        }

        if cfg.mode.has_entropy() {
            let streams = section_entropy_streams(&bytes, cfg.chunk_size)?;
            for s in streams.streams {
                let stats = summary_entropy_features(s.stream.values())?;
                let per_stat = entropy_values
                    .entry(s.section.name)
                    .or_insert_with(|| vec![Vec::new(); ENTROPY_STAT_NAMES.len()]);
                for (i, &v) in stats.iter().enumerate() {
                    if v != 0.0 {
                        per_stat[i].push(v);
                    }
                }
            }
        }
    }
    if n_files == 0 {
        return Err(Error::EmptyCorpus);
    }

    // Top-N strings by document frequency; ties break lexicographically.
    let mut ranked: Vec<(String, u32)> = string_counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(cfg.top_n_strings);
    let strings: Vec<String> = ranked.into_iter().map(|(s, _)| s).collect();

    let j_max = if cfg.mode.has_wavelet() {
        wavelet_values.keys().map(|(j, _)| *j).max().unwrap_or(0)
    } else {
        0
    };
    let mut wavelet_slots = Vec::new();
    if cfg.mode.has_wavelet() {
        for group in 1..=j_max {
            for level in 1..=group {
                let mut vals = wavelet_values.remove(&(group, level)).unwrap_or_default();
                wavelet_slots.push(ContinuousSlot {
                    name: wavelet_slot_name(group, level),
                    thresholds: quantile_thresholds(&mut vals, cfg.bins_per_feature),
                });
            }
        }
    }

    let mut section_names = Vec::new();
    let mut entropy_slots = Vec::new();
    if cfg.mode.has_entropy() {
        for (section, mut per_stat) in entropy_values {
            for (i, vals) in per_stat.iter_mut().enumerate() {
                entropy_slots.push(ContinuousSlot {
                    name: entropy_slot_name(&section, i),
                    thresholds: quantile_thresholds(vals, cfg.bins_per_feature),
                });
            }
            section_names.push(section);
        }
    }

    FeatureDictionary::from_parts(
        cfg.mode,
        cfg.chunk_size,
        cfg.min_string_len,
        strings,
        j_max,
        wavelet_slots,
        section_names,
        entropy_slots,
    )
}

/// Featurizes one file against a frozen dictionary. Pure in
/// `(bytes, dictionary)`: byte-identical input yields an identical vector.
pub fn featurize(
    bytes: &[u8],
    dict: &FeatureDictionary,
    sample_id: &str,
    label: u8,
) -> Result<FeatureVector> {
    let mut indices: Vec<u32> = Vec::new();

    let mut matched: BTreeSet<u32> = BTreeSet::new();
    for s in extract_strings(bytes, dict.min_string_len) {
        if let Some(id) = dict.string_id(&s) {
            matched.insert(id);
        }
    }
    indices.extend(matched);

    if dict.mode.has_wavelet() {
        if let Some(spectrum) = whole_file_spectrum(bytes, dict.chunk_size) {
            let dense = wavelet_group_features(&spectrum, dict.j_max)?;
            let j = spectrum.j();
            let offset = j * (j - 1) / 2;
            let values: Vec<Option<f64>> = dense
                .iter()
                .enumerate()
                .map(|(i, &v)| (offset..offset + j).contains(&i).then_some(v))
                .collect();
            for local in bin_features(&values, &dict.wavelet_slots) {
                indices.push((dict.wavelet_base() + local) as u32);
            }
        }
    }

    if dict.mode.has_entropy() {
        let streams = section_entropy_streams(bytes, dict.chunk_size)?;
        for s in streams.streams {
            let Ok(sec) = dict.section_names.binary_search(&s.section.name) else {
                continue; // section unseen at training time
            };
            let stats = summary_entropy_features(s.stream.values())?;
            for (i, &v) in stats.iter().enumerate() {
                let slot_idx = sec * ENTROPY_STAT_NAMES.len() + i;
                let slot = &dict.entropy_slots[slot_idx];
                let local = dict.entropy_offsets[slot_idx] + bin_index(v, &slot.thresholds);
                indices.push((dict.entropy_base() + local) as u32);
            }
        }
    }

    indices.sort_unstable();
    // Duplicate section names collapse onto the same slots; keep indicators
    // strictly increasing.
    indices.dedup();
    Ok(FeatureVector {
        indices,
        sample_id: sample_id.to_string(),
        label,
    })
}

// --- serialization ---------------------------------------------------------

/// Percent-encodes bytes outside the safe printable range so names survive
/// line-oriented formats.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for &b in s.as_bytes() {
        if (0x21..=0x7e).contains(&b) && b != b'%' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn unescape(s: &str) -> Result<String> {
    let mut bytes = Vec::with_capacity(s.len());
    let raw = s.as_bytes();
    let mut i = 0;
    while i < raw.len() {
        if raw[i] == b'%' {
            let hex = raw
                .get(i + 1..i + 3)
                .ok_or_else(|| Error::parse("truncated escape"))?;
            let v = u8::from_str_radix(std::str::from_utf8(hex).map_err(|_| Error::parse("bad escape"))?, 16)
                .map_err(|_| Error::parse("bad escape"))?;
            bytes.push(v);
            i += 3;
        } else {
            bytes.push(raw[i]);
            i += 1;
        }
    }
    String::from_utf8(bytes).map_err(|_| Error::parse("escaped name is not UTF-8"))
}

const DICT_MAGIC: &str = "entrospect-dict v1";

struct Cursor<'a> {
    lines: &'a [String],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.at)
            .ok_or_else(|| Error::parse("unexpected end of dictionary"))?;
        self.at += 1;
        Ok(line)
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        self.next()?
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| Error::parse(format!("expected {key} line")))
    }

    fn numeric_field(&mut self, key: &str) -> Result<usize> {
        self.field(key)?
            .parse()
            .map_err(|_| Error::parse(format!("bad {key} value")))
    }

    fn read_slots(
        &mut self,
        key: &str,
        names: impl Fn(usize) -> String,
    ) -> Result<Vec<ContinuousSlot>> {
        let count = self.numeric_field(key)?;
        let mut slots = Vec::with_capacity(count);
        for i in 0..count {
            let mut tokens = self.next()?.split_ascii_whitespace();
            let k: usize = tokens
                .next()
                .ok_or_else(|| Error::parse("empty slot line"))?
                .parse()
                .map_err(|_| Error::parse("bad threshold count"))?;
            let thresholds = tokens
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse("bad threshold")))
                .collect::<Result<Vec<f64>>>()?;
            if thresholds.len() != k {
                return Err(Error::parse("threshold count mismatch"));
            }
            slots.push(ContinuousSlot {
                name: names(i),
                thresholds,
            });
        }
        Ok(slots)
    }
}

fn write_slots(out: &mut String, label: &str, slots: &[ContinuousSlot]) {
    out.push_str(&format!("{label} {}\n", slots.len()));
    for slot in slots {
        out.push_str(&format!("{}", slot.thresholds.len()));
        for t in &slot.thresholds {
            out.push_str(&format!(" {t:?}"));
        }
        out.push('\n');
    }
}

impl FeatureDictionary {
    /// Writes the dictionary in its versioned line-oriented text format.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let mut out = String::new();
        out.push_str(DICT_MAGIC);
        out.push('\n');
        out.push_str(&format!("mode {}\n", self.mode));
        out.push_str(&format!("chunk_size {}\n", self.chunk_size));
        out.push_str(&format!("min_string_len {}\n", self.min_string_len));
        out.push_str(&format!("strings {}\n", self.strings.len()));
        for s in &self.strings {
            out.push_str(&escape(s));
            out.push('\n');
        }
        out.push_str(&format!("j_max {}\n", self.j_max));
        write_slots(&mut out, "wavelet_slots", &self.wavelet_slots);
        out.push_str(&format!("sections {}\n", self.section_names.len()));
        for s in &self.section_names {
            out.push_str(&escape(s));
            out.push('\n');
        }
        write_slots(&mut out, "entropy_slots", &self.entropy_slots);
        out.push_str("end\n");
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn load<R: Read>(r: R) -> Result<Self> {
        let lines: Vec<String> = BufReader::new(r).lines().collect::<std::io::Result<_>>()?;
        let mut cursor = Cursor { lines: &lines, at: 0 };
        if cursor.next()? != DICT_MAGIC {
            return Err(Error::parse("not an entrospect dictionary"));
        }
        let mode: FeatureMode = cursor.field("mode")?.parse()?;
        let chunk_size: usize = cursor.numeric_field("chunk_size")?;
        let min_string_len: usize = cursor.numeric_field("min_string_len")?;
        let n_strings: usize = cursor.numeric_field("strings")?;
        let mut strings = Vec::with_capacity(n_strings);
        for _ in 0..n_strings {
            strings.push(unescape(cursor.next()?)?);
        }
        let j_max: usize = cursor.numeric_field("j_max")?;

        let wavelet_slots = cursor.read_slots("wavelet_slots", |i| {
            // Recover (group, level) from the triangular layout index.
            let mut group = 1;
            let mut at = i;
            while at >= group {
                at -= group;
                group += 1;
            }
            wavelet_slot_name(group, at + 1)
        })?;

        let n_sections: usize = cursor.numeric_field("sections")?;
        let mut section_names = Vec::with_capacity(n_sections);
        for _ in 0..n_sections {
            section_names.push(unescape(cursor.next()?)?);
        }
        let entropy_slots = cursor.read_slots("entropy_slots", |i| {
            let section = &section_names[i / ENTROPY_STAT_NAMES.len()];
            entropy_slot_name(section, i % ENTROPY_STAT_NAMES.len())
        })?;
        if cursor.next()? != "end" {
            return Err(Error::parse("missing dictionary terminator"));
        }
        FeatureDictionary::from_parts(
            mode,
            chunk_size,
            min_string_len,
            strings,
            j_max,
            wavelet_slots,
            section_names,
            entropy_slots,
        )
    }
}

/// One sample in the sparse text format: `label index:1 index:1 ...` with
/// strictly ascending indices.
pub fn write_sparse_line(v: &FeatureVector) -> String {
    let mut line = String::new();
    line.push_str(&v.label.to_string());
    for idx in &v.indices {
        line.push_str(&format!(" {idx}:1"));
    }
    line
}

/// Parses one sparse sample line. Rejects non-binary values and unsorted
/// indices.
pub fn parse_sparse_line(line: &str, sample_id: &str) -> Result<FeatureVector> {
    let mut tokens = line.split_ascii_whitespace();
    let label: u8 = tokens
        .next()
        .ok_or_else(|| Error::parse("empty sample line"))?
        .parse()
        .map_err(|_| Error::parse("bad label"))?;
    if label > 1 {
        return Err(Error::parse(format!("label must be 0 or 1, got {label}")));
    }
    let mut indices = Vec::new();
    for token in tokens {
        let (idx, value) = token
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("malformed feature token {token:?}")))?;
        if value != "1" {
            return Err(Error::invalid(format!(
                "non-binary feature value {value:?} for feature {idx}"
            )));
        }
        let idx: u32 = idx.parse().map_err(|_| Error::parse("bad feature id"))?;
        if indices.last().is_some_and(|last| *last >= idx) {
            return Err(Error::parse("feature ids must be strictly ascending"));
        }
        indices.push(idx);
    }
    Ok(FeatureVector {
        indices,
        sample_id: sample_id.to_string(),
        label,
    })
}

/// Reads a whole sparse data file, one sample per line; sample ids are the
/// zero-based line numbers. Lines starting with `#` are skipped.
pub fn load_sparse<R: Read>(r: R) -> Result<Vec<FeatureVector>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id = out.len().to_string();
        out.push(parse_sparse_line(&line, &id)?);
    }
    Ok(out)
}
