//! l1-penalized logistic regression for large sparse binary datasets.
//!
//! The trainer minimizes `negative log-likelihood + lambda * sum |beta_j|`
//! with an unpenalized intercept, by cyclic coordinate descent with
//! soft-thresholding. Each coordinate update uses the quadratic majorization
//! bound `n_j / 4` on the coordinate's curvature (features are binary, and
//! `p (1 - p) <= 1/4`), so every update touches only that feature's active
//! samples and the penalized objective never increases. Coordinates are
//! visited in ascending feature id for reproducible fits.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::features::{FeatureBlock, FeatureDictionary, FeatureVector};

/// Sparse logistic model: only nonzero weights are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoModel {
    weights: BTreeMap<u32, f64>,
    intercept: f64,
    lambda: f64,
    epochs: usize,
    objective: f64,
}

impl LassoModel {
    pub fn weights(&self) -> &BTreeMap<u32, f64> {
        &self.weights
    }

    pub fn weight(&self, feature: u32) -> f64 {
        self.weights.get(&feature).copied().unwrap_or(0.0)
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Coordinate-descent epochs run before convergence.
    pub fn epochs(&self) -> usize {
        self.epochs
    }

    /// Final penalized objective value.
    pub fn objective(&self) -> f64 {
        self.objective
    }
}

/// Training options for [`train_lasso`].
#[derive(Debug, Clone)]
pub struct LassoConfig {
    /// Penalty multiplier on `sum |beta_j|`.
    pub lambda: f64,
    pub max_epochs: usize,
    /// Stop when no weight moved by more than this in an epoch.
    pub tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            lambda: 1.0,
            max_epochs: 5000,
            tol: 1e-9,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

fn validate(samples: &[FeatureVector]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut pos = 0usize;
    for s in samples {
        if s.label > 1 {
            return Err(Error::invalid("labels must be 0 or 1"));
        }
        pos += s.label as usize;
        if s.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "sample {:?} has unsorted or duplicate feature ids",
                s.sample_id
            )));
        }
    }
    if pos == 0 || pos == samples.len() {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

/// Penalized objective `-log-likelihood + lambda * sum |beta|` of an
/// arbitrary weight assignment over the dataset.
pub fn lasso_objective(
    samples: &[FeatureVector],
    intercept: f64,
    weights: &BTreeMap<u32, f64>,
    lambda: f64,
) -> f64 {
    let mut nll = 0.0;
    for s in samples {
        let z = intercept
            + s.indices
                .iter()
                .map(|i| weights.get(i).copied().unwrap_or(0.0))
                .sum::<f64>();
        // ln(1 + e^z) - y z, stably.
        nll += z.max(0.0) + (-z.abs()).exp().ln_1p() - s.label as f64 * z;
    }
    nll + lambda * weights.values().map(|w| w.abs()).sum::<f64>()
}

/// Trains the l1-penalized logistic model.
pub fn train_lasso(samples: &[FeatureVector], cfg: &LassoConfig) -> Result<LassoModel> {
    validate(samples)?;
    if cfg.lambda.is_nan() || cfg.lambda < 0.0 {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let n = samples.len();

    // Column view: for each feature, the samples where it is active.
    let mut columns: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        for &j in &s.indices {
            columns.entry(j).or_default().push(i as u32);
        }
    }

    let mut scores = vec![0.0f64; n];
    let mut weights: BTreeMap<u32, f64> = BTreeMap::new();
    let mut intercept = 0.0f64;
    let mut epochs = 0;

    for _ in 0..cfg.max_epochs {
        epochs += 1;
        let mut max_delta: f64 = 0.0;

        // Intercept first, unpenalized.
        let grad0: f64 = samples
            .iter()
            .zip(&scores)
            .map(|(s, &z)| s.label as f64 - sigmoid(z))
            .sum();
        let delta0 = grad0 / (n as f64 / 4.0);
        if delta0 != 0.0 {
            intercept += delta0;
            for z in &mut scores {
                *z += delta0;
            }
            max_delta = max_delta.max(delta0.abs());
        }

        for (&j, active) in &columns {
            let old = weights.get(&j).copied().unwrap_or(0.0);
            let grad: f64 = active
                .iter()
                .map(|&i| {
                    let i = i as usize;
                    samples[i].label as f64 - sigmoid(scores[i])
                })
                .sum();
            let h = active.len() as f64 / 4.0;
            let new = soft_threshold(h * old + grad, cfg.lambda) / h;
            let delta = new - old;
            if delta != 0.0 {
                for &i in active {
                    scores[i as usize] += delta;
                }
                if new == 0.0 {
                    weights.remove(&j);
                } else {
                    weights.insert(j, new);
                }
                max_delta = max_delta.max(delta.abs());
            }
        }

        if max_delta < cfg.tol {
            break;
        }
    }

    let objective = lasso_objective(samples, intercept, &weights, cfg.lambda);
    Ok(LassoModel {
        weights,
        intercept,
        lambda: cfg.lambda,
        epochs,
        objective,
    })
}

/// Predicted probability that a sample is malware:
/// `sigmoid(intercept + sum of active weights)`.
pub fn predict(model: &LassoModel, vector: &FeatureVector) -> f64 {
    let z = model.intercept
        + vector
            .indices
            .iter()
            .map(|i| model.weight(*i))
            .sum::<f64>();
    sigmoid(z)
}

/// Largest violation of the subgradient stationarity conditions over the
/// dataset's features and the intercept: at a minimum of the penalized
/// negative log-likelihood, `|d nll / d beta_j| <= lambda` for zero weights
/// and `d nll / d beta_j = -lambda * sign(beta_j)` for nonzero ones.
pub fn kkt_residual(model: &LassoModel, samples: &[FeatureVector]) -> f64 {
    let mut grads: BTreeMap<u32, f64> = BTreeMap::new();
    let mut grad0 = 0.0;
    for s in samples {
        let r = s.label as f64 - predict(model, s);
        grad0 += r;
        for &j in &s.indices {
            *grads.entry(j).or_insert(0.0) += r;
        }
    }
    // grads hold d(log-likelihood)/d beta_j; the nll gradient is the negative.
    let mut worst: f64 = grad0.abs();
    for (&j, &g) in &grads {
        let w = model.weight(j);
        let violation = if w == 0.0 {
            (g.abs() - model.lambda).max(0.0)
        } else {
            (model.lambda * w.signum() - g).abs()
        };
        worst = worst.max(violation);
    }
    // Nonzero weights on features absent from the dataset see only the
    // penalty subgradient.
    for (&j, &w) in &model.weights {
        if !grads.contains_key(&j) && w != 0.0 {
            worst = worst.max(model.lambda);
        }
    }
    worst
}

/// The `k` most positive and `k` most negative weighted feature ids, each
/// sorted by weight magnitude; ties break toward the smaller id. Returns
/// fewer than `k` when there are not enough nonzero weights of that sign.
pub fn influential_features(model: &LassoModel, k: usize) -> (Vec<u32>, Vec<u32>) {
    let mut positive: Vec<(u32, f64)> = model
        .weights
        .iter()
        .filter(|(_, w)| **w > 0.0)
        .map(|(j, w)| (*j, *w))
        .collect();
    let mut negative: Vec<(u32, f64)> = model
        .weights
        .iter()
        .filter(|(_, w)| **w < 0.0)
        .map(|(j, w)| (*j, *w))
        .collect();
    positive.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    negative.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    positive.truncate(k);
    negative.truncate(k);
    (
        positive.into_iter().map(|(j, _)| j).collect(),
        negative.into_iter().map(|(j, _)| j).collect(),
    )
}

/// Per-block contribution summary: how much of the whole feature space a
/// block occupies versus how much of the influential set it captured.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockShare {
    pub block: FeatureBlock,
    pub feature_count: usize,
    /// Percent of all dictionary features.
    pub feature_pct: f64,
    pub influential_count: usize,
    /// Percent of the influential set.
    pub influential_pct: f64,
}

/// Shares of the influential set (the union of the top-`k` positive and
/// top-`k` negative features) per dictionary block.
pub fn influence_share(
    model: &LassoModel,
    dict: &FeatureDictionary,
    k: usize,
) -> Result<Vec<BlockShare>> {
    let (pos, neg) = influential_features(model, k);
    let total_influential = pos.len() + neg.len();
    let mut counts: BTreeMap<FeatureBlock, usize> = BTreeMap::new();
    for j in pos.iter().chain(&neg) {
        *counts.entry(dict.block_of(*j)?).or_insert(0) += 1;
    }
    let p = dict.feature_count();
    Ok(dict
        .block_sizes()
        .into_iter()
        .map(|(block, size)| {
            let influential_count = counts.get(&block).copied().unwrap_or(0);
            BlockShare {
                block,
                feature_count: size,
                feature_pct: if p > 0 { size as f64 / p as f64 * 100.0 } else { 0.0 },
                influential_count,
                influential_pct: if total_influential > 0 {
                    influential_count as f64 / total_influential as f64 * 100.0
                } else {
                    0.0
                },
            }
        })
        .collect())
}

const MODEL_MAGIC: &str = "entrospect-lasso v1";

impl LassoModel {
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let mut out = String::new();
        out.push_str(MODEL_MAGIC);
        out.push('\n');
        out.push_str(&format!("lambda {:?}\n", self.lambda));
        out.push_str(&format!("intercept {:?}\n", self.intercept));
        out.push_str(&format!("epochs {}\n", self.epochs));
        out.push_str(&format!("objective {:?}\n", self.objective));
        out.push_str(&format!("weights {}\n", self.weights.len()));
        for (j, weight) in &self.weights {
            out.push_str(&format!("{j} {weight:?}\n"));
        }
        out.push_str("end\n");
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn load<R: Read>(r: R) -> Result<Self> {
        let lines: Vec<String> = BufReader::new(r).lines().collect::<std::io::Result<_>>()?;
        let mut at = 0usize;
        let mut next = || -> Result<&String> {
            let line = lines
                .get(at)
                .ok_or_else(|| Error::parse("unexpected end of model file"))?;
            at += 1;
            Ok(line)
        };
        if next()? != MODEL_MAGIC {
            return Err(Error::parse("not an entrospect lasso model"));
        }
        let mut field = |key: &str| -> Result<String> {
            next()?
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| Error::parse(format!("expected {key} line")))
        };
        let lambda: f64 = field("lambda")?.parse().map_err(|_| Error::parse("bad lambda"))?;
        let intercept: f64 = field("intercept")?
            .parse()
            .map_err(|_| Error::parse("bad intercept"))?;
        let epochs: usize = field("epochs")?.parse().map_err(|_| Error::parse("bad epochs"))?;
        let objective: f64 = field("objective")?
            .parse()
            .map_err(|_| Error::parse("bad objective"))?;
        let count: usize = field("weights")?
            .parse()
            .map_err(|_| Error::parse("bad weight count"))?;
        let mut weights = BTreeMap::new();
        for _ in 0..count {
            let line = next()?;
            let (j, w) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse("malformed weight line"))?;
            let j: u32 = j.parse().map_err(|_| Error::parse("bad feature id"))?;
            let w: f64 = w.parse().map_err(|_| Error::parse("bad weight"))?;
            if w == 0.0 {
                return Err(Error::parse("stored weights must be nonzero"));
            }
            weights.insert(j, w);
        }
        if next()? != "end" {
            return Err(Error::parse("missing model terminator"));
        }
        Ok(LassoModel {
            weights,
            intercept,
            lambda,
            epochs,
            objective,
        })
    }
}
