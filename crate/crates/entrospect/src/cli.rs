//! Command-line surface: one thin dispatcher mapping subcommands onto the
//! library. Every subcommand is deterministic given its inputs and seed
//! flags, writes machine-readable artifacts, and never mutates its inputs.
//!
//! Exit codes: 0 success, 2 usage errors (unknown subcommand or flag), 1
//! anything else, with a single-line diagnostic on stderr.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::binformat;
use crate::corpus::{collect_spectra, CorpusManifest, ManifestEntry, Split};
use crate::entropy::{entropy_stream, DEFAULT_CHUNK_SIZE};
use crate::error::{Error, Result};
use crate::eval;
use crate::features::{
    build_dictionary, featurize, load_sparse, write_sparse_line, DictionaryConfig,
    FeatureDictionary,
};
use crate::lasso::{self, LassoConfig, LassoModel};
use crate::ssecs::{train_ssecs, SsecsModelFile, TrainConfig};
use crate::synth::{generate_corpus, SynthConfig};
use crate::wavelet::{dwt_haar, energy_spectrum};

const USAGE: &str = "\
entrospect <command> [flags]

streams and spectra
  entropy <file> [--chunk-size N] [--out PATH] [--binary]
  dwt <file> [--chunk-size N] [--out PATH]
  spectrum <file> [--chunk-size N] [--out PATH]
  sections <file>

synthetic corpora
  synth --clean N --dirty M --seed S --out DIR [--min-chunks A] [--max-chunks B]
  split --manifest PATH --out PATH [--train-fraction F] [--seed S]

size-group scoring
  ssecs-train --corpus MANIFEST --out MODEL [--folds K] [--seed S] [--normalize]
              [--chunk-size N] [--scores PATH]
  ssecs-score --model MODEL <file>...

sparse feature pipeline
  build-dict --corpus MANIFEST --out DICT [--mode M] [--top-strings N] [--bins K]
             [--min-string-len L] [--chunk-size N]
  featurize --dict DICT --corpus MANIFEST --out DATA [--split train|test|all]
            [--ids-out PATH]
  train-lasso --data DATA --out MODEL [--lambda F] [--max-epochs N] [--tol F]
  predict --model MODEL --data DATA [--out PATH]

evaluation
  eval (--pred PATH | --scores PATH --labels PATH) [--threshold T] [--roc-out PATH]
  danger-map --models MODEL --out CSV [--raw-out CSV] [--svg PATH] [--hypotheses M]
";

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parsed flags of one invocation.
struct Args {
    positional: Vec<String>,
    values: BTreeMap<&'static str, String>,
    switches: Vec<&'static str>,
}

impl Args {
    fn parse(
        raw: &[String],
        value_flags: &[&'static str],
        switch_flags: &[&'static str],
    ) -> CliResult<Args> {
        let mut positional = Vec::new();
        let mut values = BTreeMap::new();
        let mut switches = Vec::new();
        let mut at = 0;
        while at < raw.len() {
            let token = &raw[at];
            if let Some(name) = token.strip_prefix("--") {
                if let Some(flag) = switch_flags.iter().find(|f| **f == name) {
                    switches.push(*flag);
                } else if let Some(flag) = value_flags.iter().find(|f| **f == name) {
                    at += 1;
                    let value = raw
                        .get(at)
                        .ok_or_else(|| usage(format!("flag --{name} needs a value")))?;
                    values.insert(*flag, value.clone());
                } else {
                    return Err(usage(format!("unknown flag --{name}")));
                }
            } else {
                positional.push(token.clone());
            }
            at += 1;
        }
        Ok(Args {
            positional,
            values,
            switches,
        })
    }

    fn value(&self, flag: &str) -> Option<&str> {
        self.values.get(flag).map(String::as_str)
    }

    fn require(&self, flag: &'static str) -> CliResult<&str> {
        self.value(flag)
            .ok_or_else(|| usage(format!("missing required flag --{flag}")))
    }

    fn switch(&self, flag: &str) -> bool {
        self.switches.contains(&flag)
    }

    fn numeric<T: std::str::FromStr>(&self, flag: &'static str, default: T) -> CliResult<T> {
        match self.value(flag) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| usage(format!("bad value {raw:?} for --{flag}"))),
        }
    }

    fn single_file(&self) -> CliResult<&str> {
        match self.positional.as_slice() {
            [one] => Ok(one),
            _ => Err(usage("expected exactly one input file")),
        }
    }
}

fn write_artifact(path: Option<&str>, content: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(path) => fs::write(path, content).map_err(Error::Io),
        None => {
            out.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_entropy(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let file = args.single_file()?;
    let chunk_size: usize = args.numeric("chunk-size", DEFAULT_CHUNK_SIZE)?;
    let bytes = fs::read(file).map_err(Error::Io)?;
    let stream = entropy_stream(&bytes, chunk_size, file)?;
    if args.switch("binary") {
        let path = args
            .value("out")
            .ok_or_else(|| usage("--binary requires --out PATH"))?;
        let mut blob = Vec::with_capacity(24 + stream.len() * 8);
        blob.extend(b"ENTR");
        blob.extend(1u32.to_le_bytes());
        blob.extend((chunk_size as u64).to_le_bytes());
        blob.extend((stream.len() as u64).to_le_bytes());
        for v in stream.values() {
            blob.extend(v.to_le_bytes());
        }
        fs::write(path, blob).map_err(Error::Io)?;
        return Ok(());
    }
    let mut text = String::new();
    for v in stream.values() {
        text.push_str(&format!("{v:?}\n"));
    }
    write_artifact(args.value("out"), &text, out)?;
    Ok(())
}

fn cmd_dwt(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let file = args.single_file()?;
    let chunk_size: usize = args.numeric("chunk-size", DEFAULT_CHUNK_SIZE)?;
    let bytes = fs::read(file).map_err(Error::Io)?;
    let stream = entropy_stream(&bytes, chunk_size, file)?;
    let decomp = dwt_haar(stream.values())?;
    let mut text = format!(
        "# stream {} truncated {} levels {} mean {:?}\n",
        stream.len(),
        decomp.truncated_len(),
        decomp.j_max(),
        decomp.global_mean()
    );
    for j in 1..=decomp.j_max() {
        for (k0, d) in decomp.level(j).iter().enumerate() {
            text.push_str(&format!("{j} {} {d:?}\n", k0 + 1));
        }
    }
    write_artifact(args.value("out"), &text, out)?;
    Ok(())
}

fn cmd_spectrum(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let file = args.single_file()?;
    let chunk_size: usize = args.numeric("chunk-size", DEFAULT_CHUNK_SIZE)?;
    let bytes = fs::read(file).map_err(Error::Io)?;
    let stream = entropy_stream(&bytes, chunk_size, file)?;
    let spectrum = energy_spectrum(&dwt_haar(stream.values())?);
    let mut text = String::new();
    for (level, e) in spectrum.as_slice().iter().enumerate() {
        text.push_str(&format!("{} {e:?}\n", level + 1));
    }
    write_artifact(args.value("out"), &text, out)?;
    Ok(())
}

fn cmd_sections(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let file = args.single_file()?;
    let bytes = fs::read(file).map_err(Error::Io)?;
    let sections = binformat::parse_sections(&bytes)?;
    let mut text = String::from("# name\toffset\tsize\n");
    for s in &sections {
        text.push_str(&format!("{:?}\t{}\t{}\n", s.name, s.file_offset, s.size));
    }
    out.write_all(text.as_bytes()).map_err(Error::Io)?;
    Ok(())
}

fn cmd_synth(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let cfg = SynthConfig {
        n_clean: args.numeric("clean", 0)?,
        n_dirty: args.numeric("dirty", 0)?,
        min_chunks: args.numeric("min-chunks", 16)?,
        max_chunks: args.numeric("max-chunks", 256)?,
        seed: args.numeric("seed", 0)?,
    };
    let dir = PathBuf::from(args.require("out")?);
    let files_dir = dir.join("files");
    fs::create_dir_all(&files_dir).map_err(Error::Io)?;
    let corpus = generate_corpus(&cfg)?;
    let mut entries = Vec::with_capacity(corpus.len());
    for file in &corpus {
        let rel = Path::new("files").join(format!("{}.bin", file.id));
        fs::write(dir.join(&rel), &file.bytes).map_err(Error::Io)?;
        entries.push(ManifestEntry {
            path: rel,
            label: file.label,
            split: None,
            note: Some(file.spec.summary()),
        });
    }
    CorpusManifest::new(entries)?.save(&dir.join("manifest.tsv"))?;
    writeln!(out, "wrote {} files under {}", corpus.len(), dir.display()).map_err(Error::Io)?;
    Ok(())
}

fn cmd_split(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let manifest = CorpusManifest::load(Path::new(args.require("manifest")?))?;
    let fraction: f64 = args.numeric("train-fraction", 0.8)?;
    let seed: u64 = args.numeric("seed", 0)?;
    let tagged = manifest.split_corpus(fraction, seed)?;
    tagged.save(Path::new(args.require("out")?))?;
    let train = tagged
        .entries
        .iter()
        .filter(|e| e.split == Some(Split::Train))
        .count();
    writeln!(out, "tagged {} train / {} test", train, tagged.entries.len() - train)
        .map_err(Error::Io)?;
    Ok(())
}

fn split_filter(args: &Args) -> CliResult<Option<Split>> {
    match args.value("split").unwrap_or("all") {
        "all" => Ok(None),
        "train" => Ok(Some(Split::Train)),
        "test" => Ok(Some(Split::Test)),
        other => Err(usage(format!("bad --split value {other:?}"))),
    }
}

fn cmd_ssecs_train(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let manifest = CorpusManifest::load(Path::new(args.require("corpus")?))?;
    let chunk_size: usize = args.numeric("chunk-size", DEFAULT_CHUNK_SIZE)?;
    let cfg = TrainConfig {
        folds: args.numeric("folds", 5)?,
        normalize: args.switch("normalize"),
        seed: args.numeric("seed", 0)?,
        ..TrainConfig::default()
    };
    let (spectra, skipped_files) = collect_spectra(&manifest, chunk_size, Some(Split::Train))?;
    for note in &skipped_files {
        eprintln!("skipped {}: {}", note.file_id, note.reason);
    }
    let training = train_ssecs(&spectra, &cfg)?;
    for (j, reason) in &training.skipped {
        eprintln!("skipped group {j}: {reason}");
    }
    let model = SsecsModelFile {
        chunk_size,
        groups: training.groups,
    };
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    fs::write(args.require("out")?, buf).map_err(Error::Io)?;
    if let Some(path) = args.value("scores") {
        let mut text = String::from("# file\tgroup\tfold\tlabel\tssecs\n");
        for s in &training.cv_scores {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:?}\n",
                s.file_id, s.group, s.fold, s.label, s.ssecs
            ));
        }
        fs::write(path, text).map_err(Error::Io)?;
    }
    writeln!(
        out,
        "trained {} size group(s) on {} spectra ({} file(s) skipped, {} group(s) skipped)",
        model.groups.len(),
        spectra.len(),
        skipped_files.len(),
        training.skipped.len()
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn cmd_ssecs_score(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let model_bytes = fs::read(args.require("model")?).map_err(Error::Io)?;
    let model = SsecsModelFile::load(&model_bytes[..])?;
    if args.positional.is_empty() {
        return Err(usage("ssecs-score needs at least one file"));
    }
    for file in &args.positional {
        let bytes = fs::read(file).map_err(Error::Io)?;
        let stream = entropy_stream(&bytes, model.chunk_size, file)?;
        let spectrum = energy_spectrum(&dwt_haar(stream.values())?);
        let fit = model.groups.get(&spectrum.j()).ok_or_else(|| {
            Error::invalid(format!(
                "no model for size group {} (stream of {} chunks)",
                spectrum.j(),
                stream.len()
            ))
        })?;
        let score = fit.model.score(&spectrum)?;
        writeln!(out, "{file}\t{score:?}").map_err(Error::Io)?;
    }
    Ok(())
}

fn manifest_reader<'a>(
    manifest: &'a CorpusManifest,
    split: Option<Split>,
) -> impl Iterator<Item = Result<(String, Vec<u8>)>> + 'a {
    manifest.select(split).into_iter().map(|entry| {
        let bytes = fs::read(manifest.resolve(entry))?;
        Ok((entry.path.display().to_string(), bytes))
    })
}

fn cmd_build_dict(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let manifest = CorpusManifest::load(Path::new(args.require("corpus")?))?;
    let mode = args
        .value("mode")
        .unwrap_or("strings+entropy+wavelet")
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let cfg = DictionaryConfig {
        mode,
        top_n_strings: args.numeric("top-strings", 20_000)?,
        bins_per_feature: args.numeric("bins", 10)?,
        min_string_len: args.numeric("min-string-len", binformat::DEFAULT_MIN_STRING_LEN)?,
        chunk_size: args.numeric("chunk-size", DEFAULT_CHUNK_SIZE)?,
    };
    let dict = build_dictionary(manifest_reader(&manifest, Some(Split::Train)), &cfg)?;
    let mut buf = Vec::new();
    dict.save(&mut buf)?;
    fs::write(args.require("out")?, buf).map_err(Error::Io)?;
    let blocks: Vec<String> = dict
        .block_sizes()
        .iter()
        .map(|(block, n)| format!("{n} {block}"))
        .collect();
    writeln!(
        out,
        "dictionary: {} features ({})",
        dict.feature_count(),
        blocks.join(", ")
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn cmd_featurize(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let dict_bytes = fs::read(args.require("dict")?).map_err(Error::Io)?;
    let dict = FeatureDictionary::load(&dict_bytes[..])?;
    let manifest = CorpusManifest::load(Path::new(args.require("corpus")?))?;
    let split = split_filter(args)?;
    let mut data = String::new();
    let mut ids = String::new();
    let mut written = 0usize;
    let mut skipped = 0usize;
    for entry in manifest.select(split) {
        let id = entry.path.display().to_string();
        let bytes = fs::read(manifest.resolve(entry)).map_err(Error::Io)?;
        match featurize(&bytes, &dict, &id, entry.label) {
            Ok(vector) => {
                data.push_str(&write_sparse_line(&vector));
                data.push('\n');
                ids.push_str(&id);
                ids.push('\n');
                written += 1;
            }
            Err(err) => {
                eprintln!("skipped {id}: {err}");
                skipped += 1;
            }
        }
    }
    fs::write(args.require("out")?, data).map_err(Error::Io)?;
    if let Some(path) = args.value("ids-out") {
        fs::write(path, ids).map_err(Error::Io)?;
    }
    writeln!(out, "featurized {written} sample(s), skipped {skipped}").map_err(Error::Io)?;
    Ok(())
}

fn cmd_train_lasso(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let data = fs::read(args.require("data")?).map_err(Error::Io)?;
    let samples = load_sparse(&data[..])?;
    let cfg = LassoConfig {
        lambda: args.numeric("lambda", 1.0)?,
        max_epochs: args.numeric("max-epochs", 5000)?,
        tol: args.numeric("tol", 1e-9)?,
    };
    let model = lasso::train_lasso(&samples, &cfg)?;
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    fs::write(args.require("out")?, buf).map_err(Error::Io)?;
    writeln!(
        out,
        "lasso: {} nonzero weight(s) after {} epoch(s), objective {:?}",
        model.weights().len(),
        model.epochs(),
        model.objective()
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn cmd_predict(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let model_bytes = fs::read(args.require("model")?).map_err(Error::Io)?;
    let model = LassoModel::load(&model_bytes[..])?;
    let data = fs::read(args.require("data")?).map_err(Error::Io)?;
    let samples = load_sparse(&data[..])?;
    let mut text = String::new();
    for (i, sample) in samples.iter().enumerate() {
        let score = lasso::predict(&model, sample);
        text.push_str(&format!("{i}\t{score:?}\t{}\n", sample.label));
    }
    write_artifact(args.value("out"), &text, out)?;
    Ok(())
}

fn parse_float_lines(path: &str) -> Result<Vec<f64>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(format!("bad score line {l:?}")))
        })
        .collect()
}

fn parse_label_lines(path: &str) -> Result<Vec<u8>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| match l.trim() {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            other => Err(Error::parse(format!("bad label line {other:?}"))),
        })
        .collect()
}

fn cmd_eval(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let (scores, labels) = if let Some(pred) = args.value("pred") {
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for line in fs::read_to_string(pred).map_err(Error::Io)?.lines() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(format!("bad prediction line {line:?}")).into());
            }
            scores.push(
                cols[1]
                    .parse::<f64>()
                    .map_err(|_| Error::parse("bad score"))?,
            );
            labels.push(match cols[2] {
                "0" => 0u8,
                "1" => 1u8,
                other => return Err(Error::parse(format!("bad label {other:?}")).into()),
            });
        }
        (scores, labels)
    } else {
        let scores = parse_float_lines(args.require("scores")?)?;
        let labels = parse_label_lines(args.require("labels")?)?;
        (scores, labels)
    };
    let threshold: f64 = args.numeric("threshold", 0.5)?;
    let report = eval::roc_curve(&scores, &labels)?;
    let metrics = eval::metrics_at_threshold(&scores, &labels, threshold)?;
    writeln!(out, "n_pos {}\nn_neg {}", report.n_pos, report.n_neg).map_err(Error::Io)?;
    writeln!(out, "auc {:?}", report.auc).map_err(Error::Io)?;
    writeln!(out, "threshold {threshold:?}").map_err(Error::Io)?;
    writeln!(out, "accuracy {:?}", metrics.accuracy).map_err(Error::Io)?;
    writeln!(out, "hit_rate {:?}", metrics.hit_rate).map_err(Error::Io)?;
    writeln!(out, "false_positive_rate {:?}", metrics.false_positive_rate).map_err(Error::Io)?;
    writeln!(out, "correct_rejection_rate {:?}", metrics.correct_rejection_rate)
        .map_err(Error::Io)?;
    if let Some(path) = args.value("roc-out") {
        let mut csv = String::from("threshold,fpr,tpr\n");
        for p in &report.points {
            csv.push_str(&format!(
                "{:?},{:?},{:?}\n",
                p.threshold, p.false_positive_rate, p.true_positive_rate
            ));
        }
        fs::write(path, csv).map_err(Error::Io)?;
    }
    Ok(())
}

fn cmd_danger_map(args: &Args, out: &mut dyn Write) -> CliResult<()> {
    let model_bytes = fs::read(args.require("models")?).map_err(Error::Io)?;
    let model = SsecsModelFile::load(&model_bytes[..])?;
    let hypotheses: usize = args.numeric("hypotheses", 0)?;
    let map = eval::danger_map(&model.groups, hypotheses)?;
    fs::write(args.require("out")?, map.to_csv(false)).map_err(Error::Io)?;
    if let Some(path) = args.value("raw-out") {
        fs::write(path, map.to_csv(true)).map_err(Error::Io)?;
    }
    if let Some(path) = args.value("svg") {
        fs::write(path, map.to_svg()).map_err(Error::Io)?;
    }
    writeln!(
        out,
        "danger map: {} row(s), bonferroni m={}",
        map.rows.len(),
        map.hypotheses
    )
    .map_err(Error::Io)?;
    Ok(())
}

fn dispatch(command: &str, rest: &[String], out: &mut dyn Write) -> CliResult<()> {
    match command {
        "entropy" => cmd_entropy(
            &Args::parse(rest, &["chunk-size", "out"], &["binary"])?,
            out,
        ),
        "dwt" => cmd_dwt(&Args::parse(rest, &["chunk-size", "out"], &[])?, out),
        "spectrum" => cmd_spectrum(&Args::parse(rest, &["chunk-size", "out"], &[])?, out),
        "sections" => cmd_sections(&Args::parse(rest, &[], &[])?, out),
        "synth" => cmd_synth(
            &Args::parse(
                rest,
                &["clean", "dirty", "seed", "out", "min-chunks", "max-chunks"],
                &[],
            )?,
            out,
        ),
        "split" => cmd_split(
            &Args::parse(rest, &["manifest", "train-fraction", "seed", "out"], &[])?,
            out,
        ),
        "ssecs-train" => cmd_ssecs_train(
            &Args::parse(
                rest,
                &["corpus", "out", "folds", "seed", "chunk-size", "scores"],
                &["normalize"],
            )?,
            out,
        ),
        "ssecs-score" => cmd_ssecs_score(&Args::parse(rest, &["model"], &[])?, out),
        "build-dict" => cmd_build_dict(
            &Args::parse(
                rest,
                &[
                    "corpus",
                    "out",
                    "mode",
                    "top-strings",
                    "bins",
                    "min-string-len",
                    "chunk-size",
                ],
                &[],
            )?,
            out,
        ),
        "featurize" => cmd_featurize(
            &Args::parse(rest, &["dict", "corpus", "out", "split", "ids-out"], &[])?,
            out,
        ),
        "train-lasso" => cmd_train_lasso(
            &Args::parse(rest, &["data", "out", "lambda", "max-epochs", "tol"], &[])?,
            out,
        ),
        "predict" => cmd_predict(&Args::parse(rest, &["model", "data", "out"], &[])?, out),
        "eval" => cmd_eval(
            &Args::parse(
                rest,
                &["pred", "scores", "labels", "threshold", "roc-out"],
                &[],
            )?,
            out,
        ),
        "danger-map" => cmd_danger_map(
            &Args::parse(
                rest,
                &["models", "out", "raw-out", "svg", "hypotheses"],
                &[],
            )?,
            out,
        ),
        other => Err(usage(format!("unknown subcommand {other:?}"))),
    }
}

/// Runs one invocation against the given stdout writer and returns the
/// process exit code.
pub fn run_with_output<I, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator,
    I::Item: Into<String>,
    W: Write,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let Some((command, rest)) = args.split_first() else {
        eprint!("{USAGE}");
        return 2;
    };
    if command == "--help" || command == "help" || command == "-h" {
        eprint!("{USAGE}");
        return 0;
    }
    match dispatch(command, rest, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            2
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err}");
            1
        }
    }
}

/// Runs against the process stdout.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<String>,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = run_with_output(args, &mut lock);
    lock.flush().ok();
    code
}
