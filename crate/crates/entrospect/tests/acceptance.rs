//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Oracles here are
//! deliberately independent of the library's implementation paths:
//! histogram entropy, explicit step-function inner products, all-pairs
//! concordance, quadrature-backed chi-square values, and an accelerated
//! proximal-gradient lasso solver.

use std::time::Instant;

use entrospect::corpus::{CorpusManifest, ManifestEntry, Split};
use entrospect::entropy::chunk_entropy;
use entrospect::error::Result;
use entrospect::eval::{bonferroni, likelihood_ratio_test, roc_curve};
use entrospect::features::{build_dictionary, featurize, DictionaryConfig, FeatureMode, FeatureVector};
use entrospect::lasso::{kkt_residual, predict, train_lasso, LassoConfig};
use entrospect::rng::Rng;
use entrospect::ssecs::{
    fit_logistic, logistic_gradient, logistic_log_likelihood, malware_sensitivity, size_group,
    ssecs_score, train_ssecs, LabeledSpectrum, TrainConfig,
};
use entrospect::synth::{generate_corpus, SynthConfig};
use entrospect::wavelet::{dwt_haar, energy_spectrum, mra_approximation};

fn pass(criterion: &str) {
    println!("acceptance {criterion}: PASS");
}

// --- 1: entropy exactness ---------------------------------------------------

fn histogram_oracle(chunk: &[u8]) -> f64 {
    let mut counts = [0u64; 256];
    for &b in chunk {
        counts[b as usize] += 1;
    }
    let n = chunk.len() as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

#[test]
fn acceptance_01_entropy_exactness() {
    let started = Instant::now();

    let constant = [0u8; 256];
    assert_eq!(chunk_entropy(&constant).unwrap(), 0.0);
    let uniform: Vec<u8> = (0..=255).collect();
    assert_eq!(chunk_entropy(&uniform).unwrap(), 8.0);
    let mut half = vec![0x00u8; 128];
    half.extend(vec![0xffu8; 128]);
    assert_eq!(chunk_entropy(&half).unwrap(), 1.0);

    let mut rng = Rng::new(0xE17);
    for _ in 0..1000 {
        let len = 1 + rng.next_below(512) as usize;
        let chunk: Vec<u8> = (0..len).map(|_| (rng.next_u64() & 0xff) as u8).collect();
        let got = chunk_entropy(&chunk).unwrap();
        let want = histogram_oracle(&chunk);
        assert!(
            (got - want).abs() <= 1e-12,
            "len {len}: {got} vs oracle {want}"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass("01 entropy exactness");
}

// --- 2: Parseval and reconstruction ----------------------------------------

#[test]
fn acceptance_02_parseval_suite() {
    let started = Instant::now();
    let mut rng = Rng::new(0x9A25);
    for trial in 0..1000 {
        let len = 4 + rng.next_below(4093) as usize;
        let x: Vec<f64> = (0..len).map(|_| rng.next_f64() * 8.0).collect();
        let d = dwt_haar(&x).unwrap();
        let t = d.truncated_len();
        let signal_energy: f64 = x[..t].iter().map(|v| v * v).sum();
        let reconstructed =
            t as f64 * d.global_mean() * d.global_mean() + energy_spectrum(&d).total();
        let gap = (signal_energy - reconstructed).abs() / signal_energy.max(1e-300);
        assert!(gap <= 1e-9, "trial {trial}: relative gap {gap}");

        let approx = mra_approximation(&d, d.j_max()).unwrap();
        for (got, want) in approx.iter().zip(&x[..t]) {
            assert!((got - want).abs() <= 1e-9, "trial {trial}");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass("02 parseval and reconstruction");
}

// --- 3: transform equals explicit inner products ----------------------------

/// Explicit discretized Haar step function transform: coefficient (j, k) is
/// the inner product of the truncated signal with the step function that is
/// -1/s_j over the first half of its support and +1/s_j over the second,
/// s_j = sqrt(2)^(J - j + 1).
fn step_function_oracle(values: &[f64]) -> Vec<Vec<f64>> {
    let j_max = values.len().ilog2() as usize;
    let t = 1usize << j_max;
    (1..=j_max)
        .map(|j| {
            let s_j = std::f64::consts::SQRT_2.powi((j_max - j + 1) as i32);
            let half = 1usize << (j_max - j);
            (0..1usize << (j - 1))
                .map(|k0| {
                    let start = k0 * 2 * half;
                    let mut acc = 0.0;
                    for (t_idx, &v) in values[..t].iter().enumerate() {
                        if (start..start + half).contains(&t_idx) {
                            acc -= v / s_j;
                        } else if (start + half..start + 2 * half).contains(&t_idx) {
                            acc += v / s_j;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn assert_matches_oracle(values: &[f64], tol: f64) {
    let d = dwt_haar(values).unwrap();
    let oracle = step_function_oracle(values);
    for (level, coeffs) in oracle.iter().enumerate() {
        for (k0, want) in coeffs.iter().enumerate() {
            let got = d.coefficient(level + 1, k0 + 1);
            assert!(
                (got - want).abs() <= tol,
                "len {}: d({},{}) = {got} vs oracle {want}",
                values.len(),
                level + 1,
                k0 + 1
            );
        }
    }
}

#[test]
fn acceptance_03_dwt_oracle_equivalence() {
    // Every binary-valued stream of each length up to 16.
    for len in 2usize..=16 {
        for mask in 0u32..(1u32 << len) {
            let x: Vec<f64> = (0..len)
                .map(|i| if mask >> i & 1 == 1 { 8.0 } else { 0.0 })
                .collect();
            assert_matches_oracle(&x, 1e-10);
        }
    }
    // Plus longer random streams.
    let mut rng = Rng::new(0xD3);
    for _ in 0..200 {
        let len = 2 + rng.next_below(1023) as usize;
        let x: Vec<f64> = (0..len).map(|_| rng.next_f64() * 8.0).collect();
        assert_matches_oracle(&x, 1e-10);
    }
    pass("03 wavelet transform vs step-function oracle");
}

// --- 4 and 5: anchors --------------------------------------------------------

#[test]
fn acceptance_04_size_group_anchors() {
    assert_eq!(size_group(32).unwrap(), 5);
    assert_eq!(size_group(256).unwrap(), 8);
    pass("04 size-group anchors");
}

#[test]
fn acceptance_05_sensitivity_anchors() {
    for (beta, want) in [
        (0.448, 56.5),
        (0.174, 19.0),
        (0.847, 133.2),
        (-0.106, -10.0),
        (-0.240, -21.4),
    ] {
        let got = malware_sensitivity(beta);
        assert!(
            (got - want).abs() <= 0.2,
            "beta {beta}: {got:.2}% vs {want}%"
        );
    }
    pass("05 sensitivity anchors");
}

// --- 6: logistic fitting -----------------------------------------------------

#[test]
fn acceptance_06_logistic_fitting() {
    let mut rng = Rng::new(0x106);
    let mut checked = 0;
    while checked < 50 {
        let n = 10 + rng.next_below(30) as usize;
        let p = 1 + rng.next_below(5) as usize;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.next_f64() * 4.0 - 2.0).collect())
            .collect();
        let y: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
        let pos = y.iter().filter(|&&v| v == 1).count();
        if pos == 0 || pos == n {
            continue;
        }
        checked += 1;

        let beta0 = rng.next_f64() * 2.0 - 1.0;
        let betas: Vec<f64> = (0..p).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
        let eps = 1e-8;
        let (g0, g) = logistic_gradient(&x, &y, beta0, &betas, eps);
        let penalized = |b0: f64, bs: &[f64]| {
            logistic_log_likelihood(&x, &y, b0, bs) - eps * bs.iter().map(|b| b * b).sum::<f64>()
        };
        let h = 1e-6;
        let fd0 = (penalized(beta0 + h, &betas) - penalized(beta0 - h, &betas)) / (2.0 * h);
        assert!(
            (g0 - fd0).abs() / (1.0 + fd0.abs()) < 1e-5,
            "intercept gradient {g0} vs fd {fd0}"
        );
        for j in 0..p {
            let mut hi = betas.clone();
            hi[j] += h;
            let mut lo = betas.clone();
            lo[j] -= h;
            let fd = (penalized(beta0, &hi) - penalized(beta0, &lo)) / (2.0 * h);
            assert!(
                (g[j] - fd).abs() / (1.0 + fd.abs()) < 1e-5,
                "gradient[{j}] {} vs fd {fd}",
                g[j]
            );
        }
    }

    // Intercept-only fit recovers the base-rate logit.
    let x = vec![Vec::new(); 24];
    let mut y = vec![1u8; 18];
    y.extend(vec![0u8; 6]);
    let fit = fit_logistic(&x, &y, 1e-8).unwrap();
    let want = (0.75f64 / 0.25).ln();
    assert!(
        (fit.beta0 - want).abs() < 1e-6,
        "{} vs logit(0.75) = {want}",
        fit.beta0
    );
    pass("06 logistic gradient and intercept recovery");
}

// --- 7: lasso correctness ----------------------------------------------------

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn soft(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Accelerated proximal-gradient (FISTA) reference solver on a dense binary
/// design, run to high precision. Minimizes the same objective as
/// `train_lasso` along an entirely different algorithmic path.
fn fista_lasso(x: &[Vec<f64>], y: &[u8], lambda: f64, iters: usize) -> (f64, Vec<f64>) {
    let n = x.len();
    let p = x[0].len();
    let nnz: f64 = x.iter().map(|r| r.iter().sum::<f64>()).sum();
    let step = 4.0 / (nnz + n as f64); // 1/L with L the curvature bound
    let mut beta = vec![0.0; p + 1];
    let mut z = beta.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let mut grad = vec![0.0; p + 1];
        for (row, &yi) in x.iter().zip(y) {
            let s = z[0] + row.iter().zip(&z[1..]).map(|(a, b)| a * b).sum::<f64>();
            let r = sigmoid(s) - yi as f64;
            grad[0] += r;
            for (g, a) in grad[1..].iter_mut().zip(row) {
                *g += r * a;
            }
        }
        let mut next = vec![0.0; p + 1];
        next[0] = z[0] - step * grad[0];
        for j in 1..=p {
            next[j] = soft(z[j] - step * grad[j], step * lambda);
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        for j in 0..=p {
            z[j] = next[j] + (t - 1.0) / t_next * (next[j] - beta[j]);
        }
        beta = next;
        t = t_next;
    }
    (beta[0], beta[1..].to_vec())
}

fn random_sparse_dataset(n: usize, p: u32, seed: u64) -> Vec<FeatureVector> {
    let mut rng = Rng::new(seed);
    (0..n)
        .map(|i| {
            let label = (rng.next_u64() & 1) as u8;
            let mut indices = Vec::new();
            for j in 0..p {
                let bias = if j == 0 && label == 1 { 0.6 } else { 0.25 };
                if rng.next_f64() < bias {
                    indices.push(j);
                }
            }
            FeatureVector {
                indices,
                sample_id: format!("s{i}"),
                label,
            }
        })
        .collect()
}

#[test]
fn acceptance_07_lasso_correctness() {
    let started = Instant::now();

    // KKT residuals at convergence on 20 random sparse toys.
    for seed in 0..20u64 {
        let data = random_sparse_dataset(50 + (seed as usize % 5) * 10, 12, seed);
        if data.iter().all(|s| s.label == 0) || data.iter().all(|s| s.label == 1) {
            continue;
        }
        let model = train_lasso(
            &data,
            &LassoConfig {
                lambda: 0.4,
                ..LassoConfig::default()
            },
        )
        .unwrap();
        let residual = kkt_residual(&model, &data);
        assert!(residual <= 1e-4, "seed {seed}: KKT residual {residual}");
    }

    // Total shrinkage at enormous lambda.
    let data = random_sparse_dataset(100, 10, 99);
    let model = train_lasso(
        &data,
        &LassoConfig {
            lambda: 1e9,
            ..LassoConfig::default()
        },
    )
    .unwrap();
    assert!(model.weights().is_empty());
    let rate = data.iter().filter(|s| s.label == 1).count() as f64 / data.len() as f64;
    assert!((model.intercept() - (rate / (1.0 - rate)).ln()).abs() < 1e-6);

    // Agreement with the accelerated proximal-gradient oracle on 100 x 10.
    let data = random_sparse_dataset(100, 10, 7);
    let lambda = 1.0;
    let model = train_lasso(
        &data,
        &LassoConfig {
            lambda,
            max_epochs: 100_000,
            tol: 1e-12,
        },
    )
    .unwrap();
    let dense: Vec<Vec<f64>> = data
        .iter()
        .map(|s| {
            let mut row = vec![0.0; 10];
            for &j in &s.indices {
                row[j as usize] = 1.0;
            }
            row
        })
        .collect();
    let labels: Vec<u8> = data.iter().map(|s| s.label).collect();
    let (oracle_intercept, oracle_weights) = fista_lasso(&dense, &labels, lambda, 200_000);
    assert!(
        (model.intercept() - oracle_intercept).abs() <= 1e-3,
        "intercept {} vs oracle {oracle_intercept}",
        model.intercept()
    );
    for j in 0..10u32 {
        let got = model.weight(j);
        let want = oracle_weights[j as usize];
        assert!(
            (got - want).abs() <= 1e-3,
            "weight {j}: {got} vs oracle {want}"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass("07 lasso KKT, shrinkage, and proximal-gradient agreement");
}

// --- 8: evaluation correctness -----------------------------------------------

fn concordance_oracle(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (&si, &yi)) in scores.iter().zip(labels).enumerate() {
        for (&sj, &yj) in scores.iter().zip(labels).take(i) {
            let (pos, neg) = match (yi, yj) {
                (1, 0) => (si, sj),
                (0, 1) => (sj, si),
                _ => continue,
            };
            den += 1.0;
            num += if pos > neg {
                1.0
            } else if pos == neg {
                0.5
            } else {
                0.0
            };
        }
    }
    num / den
}

#[test]
fn acceptance_08_evaluation_correctness() {
    let mut rng = Rng::new(0x8EA);
    let mut checked = 0;
    while checked < 100 {
        let n = 4 + rng.next_below(60) as usize;
        let scores: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 6.0).round() / 6.0).collect();
        let labels: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
        let pos = labels.iter().filter(|&&y| y == 1).count();
        if pos == 0 || pos == n {
            continue;
        }
        checked += 1;
        let report = roc_curve(&scores, &labels).unwrap();
        let oracle = concordance_oracle(&scores, &labels);
        assert!(
            (report.auc - oracle).abs() <= 1e-9,
            "sweep {} vs concordance {oracle}",
            report.auc
        );
    }

    let (stat, p) = likelihood_ratio_test(3.8415 / 2.0, 0.0, 1).unwrap();
    assert!((stat - 3.8415).abs() < 1e-12);
    assert!((p - 0.05).abs() <= 1e-3, "p {p}");

    // The reported chi-square for one group comparison stays significant
    // after Bonferroni over ten hypotheses.
    let (stat, p) = likelihood_ratio_test(198.36 / 2.0, 0.0, 3).unwrap();
    assert!((stat - 198.36).abs() < 1e-12);
    assert!(p < 1e-12, "p {p}");
    assert!(bonferroni(&[p], 10)[0] < 0.05);

    pass("08 AUC oracle, chi-square, bonferroni");
}

// --- 9: synthetic end-to-end -------------------------------------------------

struct Pipeline {
    train_vectors: Vec<FeatureVector>,
    test_vectors: Vec<FeatureVector>,
}

fn featurize_split(
    corpus: &[entrospect::synth::GeneratedFile],
    train_idx: &[usize],
    test_idx: &[usize],
    mode: FeatureMode,
) -> Result<Pipeline> {
    let cfg = DictionaryConfig {
        mode,
        top_n_strings: 5000,
        bins_per_feature: 10,
        ..DictionaryConfig::default()
    };
    let dict = build_dictionary(
        train_idx
            .iter()
            .map(|&i| Ok((corpus[i].id.clone(), corpus[i].bytes.clone()))),
        &cfg,
    )?;
    let featurize_all = |idx: &[usize]| -> Result<Vec<FeatureVector>> {
        idx.iter()
            .map(|&i| featurize(&corpus[i].bytes, &dict, &corpus[i].id, corpus[i].label))
            .collect()
    };
    Ok(Pipeline {
        train_vectors: featurize_all(train_idx)?,
        test_vectors: featurize_all(test_idx)?,
    })
}

fn lasso_auc(pipeline: &Pipeline) -> f64 {
    let model = train_lasso(
        &pipeline.train_vectors,
        &LassoConfig {
            lambda: 1.0,
            max_epochs: 2000,
            tol: 1e-8,
        },
    )
    .unwrap();
    let scores: Vec<f64> = pipeline.test_vectors.iter().map(|v| predict(&model, v)).collect();
    let labels: Vec<u8> = pipeline.test_vectors.iter().map(|v| v.label).collect();
    roc_curve(&scores, &labels).unwrap().auc
}

#[test]
fn acceptance_09_synthetic_end_to_end() {
    let started = Instant::now();
    let corpus = generate_corpus(&SynthConfig {
        n_clean: 1000,
        n_dirty: 1000,
        min_chunks: 16,
        max_chunks: 256,
        seed: 20160512,
    })
    .unwrap();

    // Deterministic stratified 80/20 split via the manifest machinery.
    let manifest = CorpusManifest::new(
        corpus
            .iter()
            .map(|f| ManifestEntry {
                path: std::path::PathBuf::from(&f.id),
                label: f.label,
                split: None,
                note: None,
            })
            .collect(),
    )
    .unwrap()
    .split_corpus(0.8, 42)
    .unwrap();
    let train_idx: Vec<usize> = (0..corpus.len())
        .filter(|&i| manifest.entries[i].split == Some(Split::Train))
        .collect();
    let test_idx: Vec<usize> = (0..corpus.len())
        .filter(|&i| manifest.entries[i].split == Some(Split::Test))
        .collect();
    assert_eq!(train_idx.len(), 1600);
    assert_eq!(test_idx.len(), 400);

    // (a) SSECS as a single feature on the held-out split.
    let spectra = |idx: &[usize]| -> Vec<LabeledSpectrum> {
        idx.iter()
            .map(|&i| {
                let stream =
                    entrospect::entropy::entropy_stream(&corpus[i].bytes, 256, &corpus[i].id)
                        .unwrap();
                LabeledSpectrum {
                    spectrum: energy_spectrum(&dwt_haar(stream.values()).unwrap()),
                    label: corpus[i].label,
                    file_id: corpus[i].id.clone(),
                }
            })
            .collect()
    };
    let train_spectra = spectra(&train_idx);
    let test_spectra = spectra(&test_idx);
    let training = train_ssecs(
        &train_spectra,
        &TrainConfig {
            normalize: true,
            seed: 7,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let mut hits = [0usize; 2];
    let mut totals = [0usize; 2];
    for sample in &test_spectra {
        let Some(fit) = training.groups.get(&sample.spectrum.j()) else {
            continue;
        };
        let score = ssecs_score(&sample.spectrum, &fit.model).unwrap();
        let predicted = u8::from(score >= 0.5);
        totals[sample.label as usize] += 1;
        if predicted == sample.label {
            hits[sample.label as usize] += 1;
        }
    }
    assert!(totals[0] > 0 && totals[1] > 0, "test split lost a class");
    let balanced_accuracy = (hits[0] as f64 / totals[0] as f64
        + hits[1] as f64 / totals[1] as f64)
        / 2.0;
    println!("  (a) ssecs balanced accuracy: {balanced_accuracy:.3}");
    assert!(
        balanced_accuracy >= 0.60,
        "balanced accuracy {balanced_accuracy:.3} below 0.60"
    );

    // (b) lasso on strings+entropy+wavelet features.
    let full = featurize_split(
        &corpus,
        &train_idx,
        &test_idx,
        FeatureMode::StringsEntropyWavelet,
    )
    .unwrap();
    let auc_full = lasso_auc(&full);
    println!("  (b) strings+entropy+wavelet AUC: {auc_full:.4}");
    assert!(auc_full >= 0.90, "AUC {auc_full:.4} below 0.90");

    // (c) the wavelet block strictly improves on the entropy-only model.
    let baseline = featurize_split(&corpus, &train_idx, &test_idx, FeatureMode::StringsEntropy)
        .unwrap();
    let auc_baseline = lasso_auc(&baseline);
    println!("  (c) strings+entropy AUC: {auc_baseline:.4}");
    assert!(
        auc_full > auc_baseline,
        "wavelet features did not improve AUC: {auc_full:.4} vs {auc_baseline:.4}"
    );

    // (d) danger map polarity: coarse energy marks malware, finest marks
    // legitimacy, on average across size groups.
    let map = entrospect::eval::danger_map(&training.groups, 0).unwrap();
    let coarse_mean: f64 =
        map.rows.values().map(|r| r.betas[0]).sum::<f64>() / map.rows.len() as f64;
    let fine_mean: f64 = map
        .rows
        .values()
        .map(|r| *r.betas.last().unwrap())
        .sum::<f64>()
        / map.rows.len() as f64;
    println!("  (d) mean coarse beta {coarse_mean:.3}, mean finest beta {fine_mean:.3}");
    assert!(coarse_mean > 0.0, "coarse-level mean beta {coarse_mean:.3} not positive");
    assert!(fine_mean < 0.0, "finest-level mean beta {fine_mean:.3} not negative");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    pass("09 synthetic end-to-end");
}

// --- 10: determinism ----------------------------------------------------------

#[test]
fn acceptance_10_pipeline_determinism() {
    use std::fs;

    let base = std::env::temp_dir().join(format!("entrospect_accept10_{}", std::process::id()));
    let _ = fs::remove_dir_all(&base);

    let run_pipeline = |tag: &str| -> (Vec<(String, Vec<u8>)>, String) {
        let dir = base.join(tag);
        fs::create_dir_all(&dir).unwrap();
        let dir_str = dir.to_str().unwrap().to_string();
        let mut stdout = Vec::new();
        let mut run = |args: &[String]| {
            let code =
                entrospect::cli::run_with_output(args.iter().map(String::as_str), &mut stdout);
            assert_eq!(code, 0, "command failed: {args:?}");
        };
        let p = |s: &str| format!("{dir_str}/{s}");
        run(&["synth", "--clean", "40", "--dirty", "40", "--seed", "5", "--out", &dir_str,
              "--min-chunks", "16", "--max-chunks", "64"]
            .map(String::from));
        run(&["split", "--manifest", &p("manifest.tsv"), "--train-fraction", "0.8",
              "--seed", "9", "--out", &p("tagged.tsv")]
            .map(String::from));
        run(&["ssecs-train", "--corpus", &p("tagged.tsv"), "--out", &p("ssecs.model"),
              "--seed", "3", "--normalize", "--scores", &p("cv_scores.tsv")]
            .map(String::from));
        run(&["build-dict", "--corpus", &p("tagged.tsv"), "--out", &p("dict.txt"),
              "--top-strings", "500", "--bins", "6"]
            .map(String::from));
        run(&["featurize", "--dict", &p("dict.txt"), "--corpus", &p("tagged.tsv"),
              "--out", &p("train.sparse"), "--split", "train"]
            .map(String::from));
        run(&["featurize", "--dict", &p("dict.txt"), "--corpus", &p("tagged.tsv"),
              "--out", &p("test.sparse"), "--split", "test"]
            .map(String::from));
        run(&["train-lasso", "--data", &p("train.sparse"), "--lambda", "1.0",
              "--out", &p("lasso.model")]
            .map(String::from));
        run(&["predict", "--model", &p("lasso.model"), "--data", &p("test.sparse"),
              "--out", &p("pred.tsv")]
            .map(String::from));
        run(&["eval", "--pred", &p("pred.tsv"), "--roc-out", &p("roc.csv")].map(String::from));
        run(&["danger-map", "--models", &p("ssecs.model"), "--out", &p("map.csv"),
              "--raw-out", &p("map_raw.csv"), "--svg", &p("map.svg")]
            .map(String::from));

        let mut artifacts = Vec::new();
        let names = [
            "manifest.tsv", "tagged.tsv", "ssecs.model", "cv_scores.tsv", "dict.txt",
            "train.sparse", "test.sparse", "lasso.model", "pred.tsv", "roc.csv",
            "map.csv", "map_raw.csv", "map.svg",
            "files/clean_00000.bin", "files/dirty_00007.bin",
        ];
        for name in names {
            artifacts.push((name.to_string(), fs::read(dir.join(name)).unwrap()));
        }
        // The summary lines echo the run directory; mask it so only real
        // output differences count.
        let stdout = String::from_utf8(stdout).unwrap().replace(&dir_str, "<out>");
        (artifacts, stdout)
    };

    let (artifacts_a, stdout_a) = run_pipeline("run_a");
    let (artifacts_b, stdout_b) = run_pipeline("run_b");
    for ((name_a, bytes_a), (_, bytes_b)) in artifacts_a.iter().zip(&artifacts_b) {
        assert_eq!(
            bytes_a, bytes_b,
            "artifact {name_a} differs between identical runs"
        );
    }
    assert_eq!(stdout_a, stdout_b, "pipeline stdout differs");

    fs::remove_dir_all(&base).ok();
    pass("10 pipeline determinism");
}
