//! End-to-end size-group scoring: synthesize a corpus, train per-group
//! logistic models on the energy spectra with 5-fold cross-validation,
//! score a held-out split, and report the per-level odds sensitivities.
//!
//! ```bash
//! cargo run -p entrospect --example ssecs_pipeline
//! ```

use entrospect::entropy::{entropy_stream, DEFAULT_CHUNK_SIZE};
use entrospect::eval::metrics_at_threshold;
use entrospect::ssecs::{malware_sensitivity, train_ssecs, LabeledSpectrum, TrainConfig};
use entrospect::synth::{generate_corpus, GeneratedFile, SynthConfig};
use entrospect::wavelet::{dwt_haar, energy_spectrum};

fn spectra(files: &[&GeneratedFile]) -> Vec<LabeledSpectrum> {
    files
        .iter()
        .filter_map(|f| {
            let stream = entropy_stream(&f.bytes, DEFAULT_CHUNK_SIZE, &f.id).ok()?;
            let decomp = dwt_haar(stream.values()).ok()?;
            Some(LabeledSpectrum {
                spectrum: energy_spectrum(&decomp),
                label: f.label,
                file_id: f.id.clone(),
            })
        })
        .collect()
}

fn main() {
    let corpus = generate_corpus(&SynthConfig {
        n_clean: 150,
        n_dirty: 150,
        min_chunks: 16,
        max_chunks: 128,
        seed: 11,
    })
    .expect("generate");

    // Hold out every fifth file.
    let holdout: Vec<&GeneratedFile> = corpus.iter().step_by(5).collect();
    let training: Vec<&GeneratedFile> = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| i % 5 != 0)
        .map(|(_, f)| f)
        .collect();

    let trained = train_ssecs(
        &spectra(&training),
        &TrainConfig {
            normalize: true,
            seed: 1,
            ..TrainConfig::default()
        },
    )
    .expect("train");
    println!(
        "trained {} size group(s); {} cross-validated training scores",
        trained.groups.len(),
        trained.cv_scores.len()
    );
    for (j, reason) in &trained.skipped {
        println!("  group {j} skipped: {reason}");
    }

    // Score the held-out files with their group models.
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for sample in spectra(&holdout) {
        if let Some(fit) = trained.groups.get(&sample.spectrum.j()) {
            scores.push(fit.model.score(&sample.spectrum).unwrap());
            labels.push(sample.label);
        }
    }
    let metrics = metrics_at_threshold(&scores, &labels, 0.5).expect("metrics");
    println!(
        "\nheld-out files: {} scored\naccuracy {:.3}, hit rate {:.3}, false positives {:.3}",
        scores.len(),
        metrics.accuracy,
        metrics.hit_rate,
        metrics.false_positive_rate
    );
    println!(
        "balanced accuracy {:.3}",
        (metrics.hit_rate + metrics.correct_rejection_rate) / 2.0
    );

    // How one group's model reads: odds change per standard deviation of
    // energy at each resolution level.
    if let Some((j, fit)) = trained.groups.iter().next_back() {
        println!("\ngroup J={j} ({} files): per-level malware sensitivity", fit.n_samples);
        for (level, beta) in fit.model.betas().iter().enumerate() {
            println!(
                "  level {:>2} ({}): beta {beta:+.3} -> {:+.1}% odds per sd",
                level + 1,
                if level == 0 { "coarsest" } else if level + 1 == *j { "finest" } else { "mid" },
                malware_sensitivity(*beta)
            );
        }
    }
}
