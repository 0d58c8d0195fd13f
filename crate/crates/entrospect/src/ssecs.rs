//! Per-size-group logistic scoring of energy spectra.
//!
//! Streams are grouped by `J = floor(log2 T)` so that files of comparable
//! length share one model, and a logistic regression from the J-dimensional
//! energy spectrum to the malware label is fit per group. A file's score is
//! the predicted malware probability under its group's model; during
//! training the score is cross-validated, so no file is scored by a model
//! that saw it.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::wavelet::EnergySpectrum;

/// Fitted logistic model for one size group.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeGroupModel {
    j: usize,
    beta0: f64,
    betas: Vec<f64>,
    normalization: Option<Vec<(f64, f64)>>,
}

impl SizeGroupModel {
    /// `betas` must have length `j`; if per-feature `(mean, std)` pairs are
    /// supplied, every stored std must be positive.
    pub fn new(
        j: usize,
        beta0: f64,
        betas: Vec<f64>,
        normalization: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        if betas.len() != j {
            return Err(Error::invalid(format!(
                "model for group {j} must carry {j} coefficients, got {}",
                betas.len()
            )));
        }
        if let Some(norm) = &normalization {
            if norm.len() != j {
                return Err(Error::invalid("normalization length must equal group size"));
            }
            if norm.iter().any(|(_, s)| !s.is_finite() || *s <= 0.0) {
                return Err(Error::invalid("normalization stds must be positive"));
            }
        }
        Ok(SizeGroupModel {
            j,
            beta0,
            betas,
            normalization,
        })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn normalization(&self) -> Option<&[(f64, f64)]> {
        self.normalization.as_deref()
    }

    /// Coefficients mapped back to raw-feature space. For a model fit on
    /// z-scored features this is `beta_j / std_j`; without normalization it
    /// is the stored coefficients.
    pub fn raw_betas(&self) -> Vec<f64> {
        match &self.normalization {
            Some(norm) => self
                .betas
                .iter()
                .zip(norm)
                .map(|(b, (_, s))| b / s)
                .collect(),
            None => self.betas.clone(),
        }
    }

    /// Predicted malware probability for a spectrum of this group.
    pub fn score(&self, spectrum: &EnergySpectrum) -> Result<f64> {
        if spectrum.j() != self.j {
            return Err(Error::SizeGroupMismatch {
                got: spectrum.j(),
                expected: self.j,
            });
        }
        let mut z = self.beta0;
        for (i, &e) in spectrum.as_slice().iter().enumerate() {
            let x = match &self.normalization {
                Some(norm) => (e - norm[i].0) / norm[i].1,
                None => e,
            };
            z += self.betas[i] * x;
        }
        Ok(sigmoid(z))
    }
}

/// Energy spectrum with its malware label.
#[derive(Debug, Clone)]
pub struct LabeledSpectrum {
    pub spectrum: EnergySpectrum,
    /// 1 = malware.
    pub label: u8,
    pub file_id: String,
}

/// Size group of a stream of length `t`: `floor(log2 t)`.
pub fn size_group(t: usize) -> Result<usize> {
    if t < 2 {
        return Err(Error::NoResolutionLevels(t));
    }
    Ok(t.ilog2() as usize)
}

/// Percent change in malware odds per unit increase of a feature with
/// coefficient `beta`: `(e^beta - 1) * 100`.
pub fn malware_sensitivity(beta: f64) -> f64 {
    (beta.exp() - 1.0) * 100.0
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn log1p_exp(s: f64) -> f64 {
    // Numerically stable ln(1 + e^s).
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

/// Unpenalized Bernoulli log-likelihood of a dense logistic model.
pub fn logistic_log_likelihood(
    features: &[Vec<f64>],
    labels: &[u8],
    beta0: f64,
    betas: &[f64],
) -> f64 {
    features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let s = beta0 + x.iter().zip(betas).map(|(a, b)| a * b).sum::<f64>();
            y as f64 * s - log1p_exp(s)
        })
        .sum()
}

/// Gradient of the ridge-penalized log-likelihood
/// `ll - ridge_eps * sum(betas^2)`; the intercept is unpenalized. Returns
/// `(d/d beta0, d/d betas)`.
pub fn logistic_gradient(
    features: &[Vec<f64>],
    labels: &[u8],
    beta0: f64,
    betas: &[f64],
    ridge_eps: f64,
) -> (f64, Vec<f64>) {
    let mut g0 = 0.0;
    let mut g = vec![0.0; betas.len()];
    for (x, &y) in features.iter().zip(labels) {
        let s = beta0 + x.iter().zip(betas).map(|(a, b)| a * b).sum::<f64>();
        let r = y as f64 - sigmoid(s);
        g0 += r;
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj += r * xj;
        }
    }
    for (gj, bj) in g.iter_mut().zip(betas) {
        *gj -= 2.0 * ridge_eps * bj;
    }
    (g0, g)
}

/// Result of a dense logistic fit.
#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub beta0: f64,
    pub betas: Vec<f64>,
    /// Unpenalized log-likelihood at the optimum.
    pub log_likelihood: f64,
    pub iterations: usize,
    /// Penalized objective after each iteration (non-decreasing).
    pub objective_trace: Vec<f64>,
}

const GRADIENT_TOL: f64 = 1e-8;
const MAX_NEWTON_ITER: usize = 500;

/// Solves the symmetric positive-definite system `a * x = b` in place by
/// Gaussian elimination with partial pivoting. Returns None when singular.
#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
fn solve_in_place(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Maximum-likelihood logistic regression with a tiny ridge penalty on the
/// feature coefficients, fit by damped Newton iterations. The ridge keeps
/// separable data from diverging; convergence is a penalized-gradient norm
/// below 1e-8 or 500 iterations.
#[allow(clippy::needless_range_loop)] // symmetric matrix assembly by index
pub fn fit_logistic(features: &[Vec<f64>], labels: &[u8], ridge_eps: f64) -> Result<LogisticFit> {
    let n = labels.len();
    if features.len() != n || n < 2 {
        return Err(Error::invalid("need at least two labeled samples"));
    }
    if ridge_eps.is_nan() || ridge_eps < 0.0 {
        return Err(Error::invalid("ridge_eps must be non-negative"));
    }
    let p = features[0].len();
    for (i, row) in features.iter().enumerate() {
        if row.len() != p {
            return Err(Error::invalid("ragged feature matrix"));
        }
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { sample: i, column: col });
        }
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == n {
        return Err(Error::DegenerateLabels);
    }

    let penalized = |beta0: f64, betas: &[f64]| {
        logistic_log_likelihood(features, labels, beta0, betas)
            - ridge_eps * betas.iter().map(|b| b * b).sum::<f64>()
    };

    let mut beta0 = 0.0;
    let mut betas = vec![0.0; p];
    let mut objective_trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..MAX_NEWTON_ITER {
        let (g0, g) = logistic_gradient(features, labels, beta0, betas.as_slice(), ridge_eps);
        let norm = (g0 * g0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if norm < GRADIENT_TOL {
            break;
        }
        iterations += 1;

        // Hessian of the negative penalized objective (plus a ridge on the
        // intercept entry for solver stability only; the fixed point is set
        // by the gradient above).
        let mut h = vec![vec![0.0; p + 1]; p + 1];
        for (x, _) in features.iter().zip(labels) {
            let s = beta0 + x.iter().zip(&betas).map(|(a, b)| a * b).sum::<f64>();
            let w = sigmoid(s) * (1.0 - sigmoid(s));
            if w == 0.0 {
                continue;
            }
            h[0][0] += w;
            for a in 0..p {
                h[0][a + 1] += w * x[a];
                for b in a..p {
                    h[a + 1][b + 1] += w * x[a] * x[b];
                }
            }
        }
        for a in 0..=p {
            for b in 0..a {
                h[a][b] = h[b][a];
            }
            h[a][a] += 2.0 * ridge_eps.max(1e-12);
        }

        let mut rhs: Vec<f64> = std::iter::once(g0).chain(g.iter().copied()).collect();
        let step = match solve_in_place(&mut h, &mut rhs) {
            Some(step) => step,
            // Fallback to a scaled gradient step if the system is singular.
            None => std::iter::once(g0)
                .chain(g.iter().copied())
                .map(|v| v / n as f64)
                .collect(),
        };

        // Damping: halve the step until the penalized objective improves.
        let current = penalized(beta0, &betas);
        let mut t = 1.0;
        for _ in 0..40 {
            let cand0 = beta0 + t * step[0];
            let cand: Vec<f64> = betas
                .iter()
                .zip(&step[1..])
                .map(|(b, s)| b + t * s)
                .collect();
            if penalized(cand0, &cand) >= current - 1e-12 {
                beta0 = cand0;
                betas = cand;
                break;
            }
            t /= 2.0;
        }
        objective_trace.push(penalized(beta0, &betas));
    }

    Ok(LogisticFit {
        log_likelihood: logistic_log_likelihood(features, labels, beta0, &betas),
        beta0,
        betas,
        iterations,
        objective_trace,
    })
}

/// Scores a spectrum with its size-group model.
pub fn ssecs_score(spectrum: &EnergySpectrum, model: &SizeGroupModel) -> Result<f64> {
    model.score(spectrum)
}

/// Training configuration for [`train_ssecs`].
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub folds: usize,
    /// Fit on z-scored features; statistics always come from the training
    /// folds only.
    pub normalize: bool,
    pub seed: u64,
    pub ridge_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            folds: 5,
            normalize: false,
            seed: 0,
            ridge_eps: 1e-8,
        }
    }
}

/// Cross-validated score for one file.
#[derive(Debug, Clone)]
pub struct CvScore {
    pub file_id: String,
    pub group: usize,
    /// Fold index whose held-out set contained this file.
    pub fold: usize,
    pub label: u8,
    pub ssecs: f64,
}

/// Final per-group fit plus the log-likelihoods needed for model comparison.
#[derive(Debug, Clone)]
pub struct GroupFit {
    pub model: SizeGroupModel,
    pub ll_full: f64,
    pub ll_null: f64,
    pub n_samples: usize,
}

/// Output of [`train_ssecs`].
#[derive(Debug, Clone)]
pub struct SsecsTraining {
    pub groups: BTreeMap<usize, GroupFit>,
    pub cv_scores: Vec<CvScore>,
    /// Groups left untrained, with reasons.
    pub skipped: Vec<(usize, String)>,
}

fn zscore_stats(features: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = features.len() as f64;
    let p = features[0].len();
    (0..p)
        .map(|j| {
            let mean = features.iter().map(|x| x[j]).sum::<f64>() / n;
            let var = features.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            // Constant features get unit scale so the z-score is plain centering.
            (mean, if std > 1e-12 { std } else { 1.0 })
        })
        .collect()
}

fn apply_zscore(row: &[f64], stats: &[(f64, f64)]) -> Vec<f64> {
    row.iter()
        .zip(stats)
        .map(|(v, (m, s))| (v - m) / s)
        .collect()
}

/// Trains one logistic model per size group with k-fold cross-validated
/// scoring. Every file's score comes from the model fit on the other folds;
/// a final model per group, fit on all of the group's data, is returned for
/// scoring unseen files. Groups without enough data (or with one class) are
/// skipped with a recorded reason.
pub fn train_ssecs(corpus: &[LabeledSpectrum], cfg: &TrainConfig) -> Result<SsecsTraining> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if cfg.folds < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }

    let mut by_group: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, sample) in corpus.iter().enumerate() {
        by_group.entry(sample.spectrum.j()).or_default().push(i);
    }

    let mut groups = BTreeMap::new();
    let mut cv_scores = Vec::new();
    let mut skipped = Vec::new();

    'group: for (&j, members) in &by_group {
        let n = members.len();
        if n < cfg.folds {
            skipped.push((j, format!("{n} sample(s) is fewer than {} folds", cfg.folds)));
            continue;
        }
        let n_pos = members.iter().filter(|&&i| corpus[i].label == 1).count();
        if n_pos == 0 || n_pos == n {
            skipped.push((j, "degenerate labels".to_string()));
            continue;
        }

        let mut order: Vec<usize> = members.clone();
        Rng::derive(cfg.seed, j as u64).shuffle(&mut order);

        // Equal split; the remainder goes to the leading folds round-robin.
        let base = n / cfg.folds;
        let extra = n % cfg.folds;
        let mut bounds = Vec::with_capacity(cfg.folds + 1);
        let mut at = 0;
        bounds.push(0);
        for f in 0..cfg.folds {
            at += base + usize::from(f < extra);
            bounds.push(at);
        }

        let mut group_scores = Vec::with_capacity(n);
        for fold in 0..cfg.folds {
            let holdout = &order[bounds[fold]..bounds[fold + 1]];
            let train: Vec<usize> = order[..bounds[fold]]
                .iter()
                .chain(&order[bounds[fold + 1]..])
                .copied()
                .collect();
            let train_pos = train.iter().filter(|&&i| corpus[i].label == 1).count();
            if train_pos == 0 || train_pos == train.len() {
                skipped.push((j, format!("degenerate labels in fold {fold} training split")));
                continue 'group;
            }

            let mut x: Vec<Vec<f64>> = train
                .iter()
                .map(|&i| corpus[i].spectrum.as_slice().to_vec())
                .collect();
            let y: Vec<u8> = train.iter().map(|&i| corpus[i].label).collect();
            let stats = cfg.normalize.then(|| zscore_stats(&x));
            if let Some(stats) = &stats {
                for row in &mut x {
                    *row = apply_zscore(row, stats);
                }
            }
            let fit = fit_logistic(&x, &y, cfg.ridge_eps)?;
            for &i in holdout {
                let mut row = corpus[i].spectrum.as_slice().to_vec();
                if let Some(stats) = &stats {
                    row = apply_zscore(&row, stats);
                }
                let z = fit.beta0 + row.iter().zip(&fit.betas).map(|(a, b)| a * b).sum::<f64>();
                group_scores.push(CvScore {
                    file_id: corpus[i].file_id.clone(),
                    group: j,
                    fold,
                    label: corpus[i].label,
                    ssecs: sigmoid(z),
                });
            }
        }

        // Final model on all group data, for scoring unseen files.
        let mut x: Vec<Vec<f64>> = members
            .iter()
            .map(|&i| corpus[i].spectrum.as_slice().to_vec())
            .collect();
        let y: Vec<u8> = members.iter().map(|&i| corpus[i].label).collect();
        let stats = cfg.normalize.then(|| zscore_stats(&x));
        if let Some(stats) = &stats {
            for row in &mut x {
                *row = apply_zscore(row, stats);
            }
        }
        let fit = fit_logistic(&x, &y, cfg.ridge_eps)?;
        let null = fit_logistic(&vec![Vec::new(); n], &y, cfg.ridge_eps)?;
        groups.insert(
            j,
            GroupFit {
                model: SizeGroupModel::new(j, fit.beta0, fit.betas, stats)?,
                ll_full: fit.log_likelihood,
                ll_null: null.log_likelihood,
                n_samples: n,
            },
        );
        cv_scores.extend(group_scores);
    }

    Ok(SsecsTraining {
        groups,
        cv_scores,
        skipped,
    })
}

/// On-disk bundle of all trained size-group models, with the chunk size the
/// spectra were computed at and each group's fit log-likelihoods.
#[derive(Debug, Clone)]
pub struct SsecsModelFile {
    pub chunk_size: usize,
    pub groups: BTreeMap<usize, GroupFit>,
}

const SSECS_MAGIC: &str = "entrospect-ssecs v1";

fn write_floats(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    for v in values {
        out.push_str(&format!(" {v:?}"));
    }
    out.push('\n');
}

impl SsecsModelFile {
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let mut out = String::new();
        out.push_str(SSECS_MAGIC);
        out.push('\n');
        out.push_str(&format!("chunk_size {}\n", self.chunk_size));
        out.push_str(&format!("groups {}\n", self.groups.len()));
        for (j, fit) in &self.groups {
            out.push_str(&format!("group {j}\n"));
            out.push_str(&format!("n {}\n", fit.n_samples));
            out.push_str(&format!("loglik {:?} {:?}\n", fit.ll_full, fit.ll_null));
            out.push_str(&format!("beta0 {:?}\n", fit.model.beta0()));
            write_floats(&mut out, "betas", fit.model.betas());
            if let Some(norm) = fit.model.normalization() {
                let means: Vec<f64> = norm.iter().map(|(m, _)| *m).collect();
                let stds: Vec<f64> = norm.iter().map(|(_, s)| *s).collect();
                write_floats(&mut out, "norm_means", &means);
                write_floats(&mut out, "norm_stds", &stds);
            }
            out.push_str("end_group\n");
        }
        out.push_str("end\n");
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    #[allow(unused_assignments)] // the cursor advances past the final line
    pub fn load<R: Read>(r: R) -> Result<Self> {
        let lines: Vec<String> = BufReader::new(r).lines().collect::<std::io::Result<_>>()?;
        let mut at = 0usize;
        macro_rules! next {
            () => {{
                let line = lines
                    .get(at)
                    .ok_or_else(|| Error::parse("unexpected end of model file"))?;
                at += 1;
                line.as_str()
            }};
        }
        fn tail<'a>(line: &'a str, key: &str) -> Result<&'a str> {
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .ok_or_else(|| Error::parse(format!("expected {key} line")))
        }
        fn floats(s: &str) -> Result<Vec<f64>> {
            s.split_ascii_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse("bad float")))
                .collect()
        }

        if next!() != SSECS_MAGIC {
            return Err(Error::parse("not an entrospect ssecs model file"));
        }
        let chunk_size: usize = tail(next!(), "chunk_size")?
            .parse()
            .map_err(|_| Error::parse("bad chunk_size"))?;
        let count: usize = tail(next!(), "groups")?
            .parse()
            .map_err(|_| Error::parse("bad group count"))?;
        let mut groups = BTreeMap::new();
        for _ in 0..count {
            let j: usize = tail(next!(), "group")?
                .parse()
                .map_err(|_| Error::parse("bad group id"))?;
            let n_samples: usize = tail(next!(), "n")?
                .parse()
                .map_err(|_| Error::parse("bad sample count"))?;
            let lls = floats(tail(next!(), "loglik")?)?;
            if lls.len() != 2 {
                return Err(Error::parse("loglik line needs two values"));
            }
            let beta0: f64 = tail(next!(), "beta0")?
                .parse()
                .map_err(|_| Error::parse("bad beta0"))?;
            let betas = floats(tail(next!(), "betas")?)?;
            let mut line = next!();
            let normalization = if let Ok(mean_str) = tail(line, "norm_means") {
                let means = floats(mean_str)?;
                let stds = floats(tail(next!(), "norm_stds")?)?;
                if means.len() != stds.len() {
                    return Err(Error::parse("normalization length mismatch"));
                }
                line = next!();
                Some(means.into_iter().zip(stds).collect::<Vec<_>>())
            } else {
                None
            };
            if line != "end_group" {
                return Err(Error::parse("missing end_group"));
            }
            groups.insert(
                j,
                GroupFit {
                    model: SizeGroupModel::new(j, beta0, betas, normalization)?,
                    ll_full: lls[0],
                    ll_null: lls[1],
                    n_samples,
                },
            );
        }
        if next!() != "end" {
            return Err(Error::parse("missing model file terminator"));
        }
        Ok(SsecsModelFile { chunk_size, groups })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::wavelet::EnergySpectrum;

    fn spectrum(values: &[f64]) -> EnergySpectrum {
        EnergySpectrum::from_energies(values.to_vec()).unwrap()
    }

    #[test]
    fn size_group_anchors() {
        assert_eq!(size_group(32).unwrap(), 5);
        assert_eq!(size_group(256).unwrap(), 8);
        assert_eq!(size_group(7).unwrap(), 2);
        assert_eq!(size_group(2).unwrap(), 1);
        assert!(size_group(1).is_err());
        assert!(size_group(0).is_err());
    }

    #[test]
    fn sensitivity_values() {
        assert_eq!(malware_sensitivity(0.0), 0.0);
        assert!((malware_sensitivity(0.448) - 56.5).abs() < 0.2);
        assert!((malware_sensitivity(0.847) - 133.2).abs() < 0.2);
        assert!((malware_sensitivity(-0.240) - -21.4).abs() < 0.2);
    }

    #[test]
    fn identical_features_split_labels_gives_half() {
        let x = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        let fit = fit_logistic(&x, &[0, 1], 1e-8).unwrap();
        assert!(fit.beta0.abs() < 1e-6);
        assert!(fit.betas.iter().all(|b| b.abs() < 1e-6));
        let p = sigmoid(fit.beta0 + fit.betas[0] + 2.0 * fit.betas[1]);
        assert!((p - 0.5).abs() < 1e-6);
    }

    #[test]
    fn intercept_only_fit_recovers_base_rate() {
        let x = vec![vec![0.0, 0.0]; 20];
        let mut y = vec![1u8; 15];
        y.extend(vec![0u8; 5]);
        let fit = fit_logistic(&x, &y, 1e-8).unwrap();
        assert!((fit.beta0 - (0.75f64 / 0.25).ln()).abs() < 1e-6);
        assert!(fit.betas.iter().all(|b| b.abs() < 1e-6));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = Rng::new(17);
        for _ in 0..10 {
            let n = 20;
            let p = 3;
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| rng.next_f64() * 4.0 - 2.0).collect())
                .collect();
            let y: Vec<u8> = (0..n).map(|_| (rng.next_u64() & 1) as u8).collect();
            if y.iter().all(|&v| v == 0) || y.iter().all(|&v| v == 1) {
                continue;
            }
            let beta0 = rng.next_f64() - 0.5;
            let betas: Vec<f64> = (0..p).map(|_| rng.next_f64() - 0.5).collect();
            let eps = 1e-8;
            let (g0, g) = logistic_gradient(&x, &y, beta0, &betas, eps);
            let h = 1e-6;
            let pen = |b0: f64, bs: &[f64]| {
                logistic_log_likelihood(&x, &y, b0, bs)
                    - eps * bs.iter().map(|b| b * b).sum::<f64>()
            };
            let fd0 = (pen(beta0 + h, &betas) - pen(beta0 - h, &betas)) / (2.0 * h);
            assert!((g0 - fd0).abs() / (1.0 + fd0.abs()) < 1e-5);
            for j in 0..p {
                let mut hi = betas.clone();
                hi[j] += h;
                let mut lo = betas.clone();
                lo[j] -= h;
                let fd = (pen(beta0, &hi) - pen(beta0, &lo)) / (2.0 * h);
                assert!((g[j] - fd).abs() / (1.0 + fd.abs()) < 1e-5);
            }
        }
    }

    #[test]
    fn objective_trace_is_non_decreasing() {
        let mut rng = Rng::new(3);
        let x: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.next_f64() * 5.0, rng.next_f64() * 5.0])
            .collect();
        let y: Vec<u8> = x.iter().map(|r| u8::from(r[0] + r[1] > 5.0)).collect();
        let fit = fit_logistic(&x, &y, 1e-8).unwrap();
        for w in fit.objective_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn separable_data_converges_finite() {
        let x = vec![vec![0.0], vec![0.1], vec![0.9], vec![1.0]];
        let y = [0, 0, 1, 1];
        let fit = fit_logistic(&x, &y, 1e-8).unwrap();
        assert!(fit.beta0.is_finite() && fit.betas[0].is_finite());
        assert!(fit.betas[0] > 0.0);
    }

    #[test]
    fn degenerate_labels_error() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            fit_logistic(&x, &[1, 1], 1e-8),
            Err(Error::DegenerateLabels)
        ));
    }

    #[test]
    fn non_finite_features_error() {
        let x = vec![vec![1.0], vec![f64::NAN]];
        assert!(matches!(
            fit_logistic(&x, &[0, 1], 1e-8),
            Err(Error::NonFinite { sample: 1, column: 0 })
        ));
    }

    #[test]
    fn score_matches_logistic_form() {
        let model = SizeGroupModel::new(2, 0.0, vec![0.0, 0.0], None).unwrap();
        assert_eq!(model.score(&spectrum(&[5.0, 1.0])).unwrap(), 0.5);

        let model = SizeGroupModel::new(1, (0.75f64 / 0.25).ln(), vec![0.0], None).unwrap();
        assert!((model.score(&spectrum(&[123.0])).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn score_rejects_wrong_group() {
        let model = SizeGroupModel::new(2, 0.0, vec![0.1, 0.2], None).unwrap();
        assert!(matches!(
            model.score(&spectrum(&[1.0, 2.0, 3.0])),
            Err(Error::SizeGroupMismatch { got: 3, expected: 2 })
        ));
    }

    #[test]
    fn fine_heavy_spectrum_scores_clean_under_reference_betas() {
        // Raw-feature coefficients for a five-level group where coarse
        // energy indicates malware; a spectrum concentrated at fine levels
        // must fall below 0.5.
        let model = SizeGroupModel::new(
            5,
            0.0,
            vec![0.017, 0.008, 0.046, -0.008, -0.030],
            None,
        )
        .unwrap();
        let score = ssecs_score(&spectrum(&[4.35, 0.80, 5.29, 34.50, 23.84]), &model).unwrap();
        assert!(score < 0.5, "got {score}");
    }

    fn toy_corpus(j: usize, n_per_class: usize, gap: f64) -> Vec<LabeledSpectrum> {
        // Dirty files carry `gap` more energy in the coarsest slot.
        let mut corpus = Vec::new();
        for i in 0..n_per_class {
            let mut clean = vec![1.0; j];
            clean[j - 1] = 3.0;
            corpus.push(LabeledSpectrum {
                spectrum: spectrum(&clean),
                label: 0,
                file_id: format!("clean_{i}"),
            });
            let mut dirty = vec![1.0; j];
            dirty[0] = 1.0 + gap;
            corpus.push(LabeledSpectrum {
                spectrum: spectrum(&dirty),
                label: 1,
                file_id: format!("dirty_{i}"),
            });
        }
        corpus
    }

    #[test]
    fn separable_groups_score_on_correct_side() {
        let corpus = toy_corpus(3, 5, 4.0);
        let result = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        assert!(result.skipped.is_empty());
        assert_eq!(result.cv_scores.len(), 10);
        for score in &result.cv_scores {
            assert!((0.0..=1.0).contains(&score.ssecs));
            if score.label == 1 {
                assert!(score.ssecs > 0.5, "dirty file scored {}", score.ssecs);
            } else {
                assert!(score.ssecs < 0.5, "clean file scored {}", score.ssecs);
            }
        }
    }

    #[test]
    fn single_class_group_is_skipped() {
        let corpus: Vec<LabeledSpectrum> = (0..6)
            .map(|i| LabeledSpectrum {
                spectrum: spectrum(&[1.0, 2.0]),
                label: 0,
                file_id: format!("f{i}"),
            })
            .collect();
        let result = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        assert!(result.groups.is_empty());
        assert_eq!(result.skipped, vec![(2, "degenerate labels".to_string())]);
    }

    #[test]
    fn tiny_group_is_skipped() {
        let corpus = vec![
            LabeledSpectrum {
                spectrum: spectrum(&[1.0]),
                label: 0,
                file_id: "a".into(),
            },
            LabeledSpectrum {
                spectrum: spectrum(&[2.0]),
                label: 1,
                file_id: "b".into(),
            },
        ];
        let result = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        assert_eq!(result.skipped.len(), 1);
        assert!(result.skipped[0].1.contains("fewer than"));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            train_ssecs(&[], &TrainConfig::default()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn folds_partition_every_group_member() {
        let corpus = toy_corpus(4, 7, 2.0);
        let result = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        // Every file scored exactly once, by the fold holding it out.
        let mut seen: Vec<&str> = result.cv_scores.iter().map(|s| s.file_id.as_str()).collect();
        seen.sort_unstable();
        let mut expected: Vec<&str> = corpus.iter().map(|s| s.file_id.as_str()).collect();
        expected.sort_unstable();
        assert_eq!(seen, expected);
        // Fold sizes are as equal as possible.
        let mut fold_counts = [0usize; 5];
        for s in &result.cv_scores {
            fold_counts[s.fold] += 1;
        }
        assert_eq!(fold_counts.iter().sum::<usize>(), 14);
        assert!(fold_counts.iter().all(|&c| c == 2 || c == 3));
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let corpus = toy_corpus(3, 6, 1.5);
        let a = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        let b = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        for (x, y) in a.cv_scores.iter().zip(&b.cv_scores) {
            assert_eq!(x.file_id, y.file_id);
            assert_eq!(x.ssecs, y.ssecs);
        }
        let c = train_ssecs(
            &corpus,
            &TrainConfig {
                seed: 99,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        // A different seed shuffles folds differently.
        assert!(a
            .cv_scores
            .iter()
            .zip(&c.cv_scores)
            .any(|(x, y)| x.file_id != y.file_id || x.fold != y.fold));
    }

    #[test]
    fn zscoring_preserves_fitted_probabilities() {
        let mut rng = Rng::new(41);
        let corpus: Vec<LabeledSpectrum> = (0..60)
            .map(|i| {
                let coarse = rng.next_f64() * 10.0;
                let fine = rng.next_f64() * 10.0;
                // Noisy labels keep the data non-separable so the maximum
                // likelihood estimate is finite and well-conditioned.
                let p = sigmoid(0.4 * (coarse - fine));
                LabeledSpectrum {
                    spectrum: spectrum(&[coarse, fine]),
                    label: u8::from(rng.next_f64() < p),
                    file_id: format!("f{i}"),
                }
            })
            .collect();
        let raw = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        let norm = train_ssecs(
            &corpus,
            &TrainConfig {
                normalize: true,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let raw_model = &raw.groups[&2].model;
        let norm_model = &norm.groups[&2].model;
        for sample in &corpus {
            let a = raw_model.score(&sample.spectrum).unwrap();
            let b = norm_model.score(&sample.spectrum).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        // Raw-space view of the normalized model agrees with the raw fit.
        for (a, b) in norm_model.raw_betas().iter().zip(raw_model.betas()) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn monotone_in_each_component_with_beta_sign() {
        let model = SizeGroupModel::new(2, -0.3, vec![0.8, -0.6], None).unwrap();
        let base = model.score(&spectrum(&[1.0, 1.0])).unwrap();
        assert!(model.score(&spectrum(&[2.0, 1.0])).unwrap() > base);
        assert!(model.score(&spectrum(&[1.0, 2.0])).unwrap() < base);
    }

    #[test]
    fn model_file_roundtrips() {
        let corpus = toy_corpus(3, 6, 2.5);
        let trained = train_ssecs(
            &corpus,
            &TrainConfig {
                normalize: true,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        let file = SsecsModelFile {
            chunk_size: 256,
            groups: trained.groups,
        };
        let mut buf = Vec::new();
        file.save(&mut buf).unwrap();
        let loaded = SsecsModelFile::load(&buf[..]).unwrap();
        assert_eq!(loaded.chunk_size, 256);
        assert_eq!(loaded.groups.len(), file.groups.len());
        for (j, fit) in &file.groups {
            let other = &loaded.groups[j];
            assert_eq!(other.model, fit.model);
            assert_eq!(other.ll_full, fit.ll_full);
            assert_eq!(other.ll_null, fit.ll_null);
            assert_eq!(other.n_samples, fit.n_samples);
        }

        // Without normalization the optional lines are absent.
        let plain = train_ssecs(&corpus, &TrainConfig::default()).unwrap();
        let file = SsecsModelFile {
            chunk_size: 128,
            groups: plain.groups,
        };
        let mut buf = Vec::new();
        file.save(&mut buf).unwrap();
        let loaded = SsecsModelFile::load(&buf[..]).unwrap();
        assert!(loaded.groups[&3].model.normalization().is_none());
    }
}
