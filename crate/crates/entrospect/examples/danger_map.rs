//! Build a danger map: per-size-group logistic coefficients over resolution
//! levels, annotated with likelihood-ratio significance tests, rendered as
//! CSV and an SVG heatmap.
//!
//! ```bash
//! cargo run -p entrospect --example danger_map
//! ```

use entrospect::entropy::{entropy_stream, DEFAULT_CHUNK_SIZE};
use entrospect::eval::danger_map;
use entrospect::ssecs::{train_ssecs, LabeledSpectrum, TrainConfig};
use entrospect::synth::{generate_corpus, SynthConfig};
use entrospect::wavelet::{dwt_haar, energy_spectrum};

fn main() {
    let corpus = generate_corpus(&SynthConfig {
        n_clean: 250,
        n_dirty: 250,
        min_chunks: 16,
        max_chunks: 256,
        seed: 31,
    })
    .expect("generate");

    let spectra: Vec<LabeledSpectrum> = corpus
        .iter()
        .filter_map(|f| {
            let stream = entropy_stream(&f.bytes, DEFAULT_CHUNK_SIZE, &f.id).ok()?;
            Some(LabeledSpectrum {
                spectrum: energy_spectrum(&dwt_haar(stream.values()).ok()?),
                label: f.label,
                file_id: f.id.clone(),
            })
        })
        .collect();

    let trained = train_ssecs(
        &spectra,
        &TrainConfig {
            normalize: true,
            seed: 2,
            ..TrainConfig::default()
        },
    )
    .expect("train");

    let map = danger_map(&trained.groups, 0).expect("danger map");
    println!("rows (size groups): {}, bonferroni m = {}\n", map.rows.len(), map.hypotheses);
    println!("{:>3} {:>6} {:>10} {:>12} {:>12}  betas (coarse -> fine)", "J", "n", "chi2", "p", "p_adj");
    for (j, row) in &map.rows {
        let betas: Vec<String> = row.betas.iter().map(|b| format!("{b:+.2}")).collect();
        println!(
            "{j:>3} {:>6} {:>10.2} {:>12.3e} {:>12.3e}  {}",
            row.n_samples,
            row.chi2,
            row.p_value,
            row.p_adjusted,
            betas.join(" ")
        );
    }

    let dir = std::env::temp_dir().join("entrospect_danger_map");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("map.csv"), map.to_csv(false)).unwrap();
    std::fs::write(dir.join("map_raw.csv"), map.to_csv(true)).unwrap();
    std::fs::write(dir.join("map.svg"), map.to_svg()).unwrap();
    println!("\nwrote map.csv, map_raw.csv, map.svg under {}", dir.display());
    println!("red cells: energy there raises the malware probability; blue lowers it.");
}
