//! Corpus manifests: the line-oriented file list consumed by the training
//! commands, train/test splitting, and manifest-driven spectrum extraction.
//!
//! A manifest is tab-separated text, one entry per line:
//! `path<TAB>label<TAB>split<TAB>note`, where `split` is `train`, `test`,
//! or `-` for untagged, and the trailing note column is optional free text
//! (the synthetic generator stores the segment recipe there). Paths are
//! resolved relative to the manifest's own directory.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::entropy::entropy_stream;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::ssecs::LabeledSpectrum;
use crate::wavelet::{dwt_haar, energy_spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::parse(format!("unknown split tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// As written in the manifest, usually relative.
    pub path: PathBuf,
    /// 1 = malware.
    pub label: u8,
    pub split: Option<Split>,
    pub note: Option<String>,
}

/// Ordered list of corpus files with labels and optional split tags.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    /// Directory paths are resolved against; set on load.
    base_dir: PathBuf,
}

const MANIFEST_MAGIC: &str = "# entrospect-manifest v1";

impl CorpusManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if e.label > 1 {
                return Err(Error::invalid("labels must be 0 or 1"));
            }
            if !seen.insert(e.path.clone()) {
                return Err(Error::invalid(format!(
                    "duplicate manifest path {:?}",
                    e.path
                )));
            }
        }
        Ok(CorpusManifest {
            entries,
            base_dir: PathBuf::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let file = cols
                .next()
                .filter(|c| !c.is_empty())
                .ok_or_else(|| Error::parse(format!("line {}: missing path", no + 1)))?;
            let label: u8 = cols
                .next()
                .ok_or_else(|| Error::parse(format!("line {}: missing label", no + 1)))?
                .parse()
                .map_err(|_| Error::parse(format!("line {}: bad label", no + 1)))?;
            let split = match cols.next() {
                None | Some("-") | Some("") => None,
                Some(tag) => Some(tag.parse()?),
            };
            let note = cols.next().map(str::to_string);
            entries.push(ManifestEntry {
                path: PathBuf::from(file),
                label,
                split,
                note,
            });
        }
        let mut manifest = CorpusManifest::new(entries)?;
        manifest.base_dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::from(MANIFEST_MAGIC);
        out.push('\n');
        out.push_str("# path\tlabel\tsplit\tnote\n");
        for e in &self.entries {
            let split = e.split.map_or("-".to_string(), |s| s.to_string());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.path.display(),
                e.label,
                split,
                e.note.as_deref().unwrap_or("")
            ));
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Absolute location of an entry's file.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    /// Entries matching a split filter; `None` selects everything. When the
    /// manifest carries no tags at all, every entry matches any filter.
    pub fn select(&self, split: Option<Split>) -> Vec<&ManifestEntry> {
        let tagged = self.entries.iter().any(|e| e.split.is_some());
        self.entries
            .iter()
            .filter(|e| match split {
                None => true,
                Some(want) => !tagged || e.split == Some(want),
            })
            .collect()
    }

    /// Deterministic stratified split: within each label class the entries
    /// are shuffled under the seed and the first `round(fraction * n)` go to
    /// the training split. Returns a new manifest; the input is untouched.
    pub fn split_corpus(&self, train_fraction: f64, seed: u64) -> Result<CorpusManifest> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::invalid("train fraction must lie strictly between 0 and 1"));
        }
        let mut tagged = self.clone();
        for class in [0u8, 1] {
            let mut members: Vec<usize> = (0..self.entries.len())
                .filter(|&i| self.entries[i].label == class)
                .collect();
            Rng::derive(seed, class as u64).shuffle(&mut members);
            let n_train = (train_fraction * members.len() as f64).round() as usize;
            for (rank, &i) in members.iter().enumerate() {
                tagged.entries[i].split = Some(if rank < n_train {
                    Split::Train
                } else {
                    Split::Test
                });
            }
        }
        Ok(tagged)
    }
}

/// Per-file note produced while walking a corpus (skipped files and the
/// reason).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipNote {
    pub file_id: String,
    pub reason: String,
}

/// Reads every selected file and reduces it to a labeled whole-file energy
/// spectrum. Files too short for a two-chunk stream are skipped with a
/// note rather than failing the batch.
pub fn collect_spectra(
    manifest: &CorpusManifest,
    chunk_size: usize,
    split: Option<Split>,
) -> Result<(Vec<LabeledSpectrum>, Vec<SkipNote>)> {
    let mut spectra = Vec::new();
    let mut skipped = Vec::new();
    for entry in manifest.select(split) {
        let id = entry.path.display().to_string();
        let bytes = fs::read(manifest.resolve(entry))?;
        let stream = match entropy_stream(&bytes, chunk_size, &id) {
            Ok(stream) => stream,
            Err(err) => {
                skipped.push(SkipNote {
                    file_id: id,
                    reason: err.to_string(),
                });
                continue;
            }
        };
        match dwt_haar(stream.values()) {
            Ok(decomp) => spectra.push(LabeledSpectrum {
                spectrum: energy_spectrum(&decomp),
                label: entry.label,
                file_id: id,
            }),
            Err(err) => skipped.push(SkipNote {
                file_id: id,
                reason: err.to_string(),
            }),
        }
    }
    Ok((spectra, skipped))
}
