//! Classifier evaluation: ROC curves and AUC, confusion-matrix rates,
//! likelihood-ratio chi-square tests with Bonferroni correction, and the
//! per-size-group "danger map" of logistic coefficients.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ssecs::GroupFit;
use crate::stats::chi_square_sf;

/// One operating point of a ROC sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
    /// Scores at or above this value classify positive.
    pub threshold: f64,
}

/// ROC sweep with its area under the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RocReport {
    pub points: Vec<RocPoint>,
    /// Probability a random positive outscores a random negative, ties
    /// counted one half; equals the trapezoidal area of `points`.
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Threshold sweep over the distinct score values (ties grouped), bracketed
/// by sentinel thresholds at plus and minus infinity.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocReport> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        false_positive_rate: 0.0,
        true_positive_rate: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut auc = 0.0;
    let mut at = 0;
    while at < order.len() {
        let threshold = scores[order[at]];
        let mut group_tp = 0usize;
        let mut group_fp = 0usize;
        while at < order.len() && scores[order[at]] == threshold {
            if labels[order[at]] == 1 {
                group_tp += 1;
            } else {
                group_fp += 1;
            }
            at += 1;
        }
        // Trapezoid over the tie group; equals counting tied pairs as half
        // concordant.
        auc += (tp as f64 + group_tp as f64 / 2.0) * group_fp as f64;
        tp += group_tp;
        fp += group_fp;
        points.push(RocPoint {
            false_positive_rate: fp as f64 / n_neg as f64,
            true_positive_rate: tp as f64 / n_pos as f64,
            threshold,
        });
    }
    points.push(RocPoint {
        false_positive_rate: 1.0,
        true_positive_rate: 1.0,
        threshold: f64::NEG_INFINITY,
    });
    Ok(RocReport {
        points,
        auc: auc / (n_pos as f64 * n_neg as f64),
        n_pos,
        n_neg,
    })
}

/// Confusion-matrix rates at a decision threshold (score >= threshold is
/// positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdMetrics {
    pub accuracy: f64,
    /// True positive rate.
    pub hit_rate: f64,
    pub false_positive_rate: f64,
    /// True negative rate.
    pub correct_rejection_rate: f64,
}

pub fn metrics_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ThresholdMetrics> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut tp = 0usize;
    let mut tn = 0usize;
    for (s, &y) in scores.iter().zip(labels) {
        let positive = *s >= threshold;
        if positive && y == 1 {
            tp += 1;
        }
        if !positive && y == 0 {
            tn += 1;
        }
    }
    Ok(ThresholdMetrics {
        accuracy: (tp + tn) as f64 / labels.len() as f64,
        hit_rate: tp as f64 / n_pos as f64,
        false_positive_rate: (n_neg - tn) as f64 / n_neg as f64,
        correct_rejection_rate: tn as f64 / n_neg as f64,
    })
}

/// Likelihood-ratio test of a fitted model against a nested null fit:
/// statistic `2 (ll_full - ll_null)`, p-value from the chi-square upper tail
/// with `df` degrees of freedom.
pub fn likelihood_ratio_test(ll_full: f64, ll_null: f64, df: usize) -> Result<(f64, f64)> {
    if df == 0 {
        return Err(Error::invalid("likelihood ratio test needs df >= 1"));
    }
    if ll_full < ll_null - 1e-9 {
        return Err(Error::NonNestedFits {
            full: ll_full,
            null: ll_null,
        });
    }
    let stat = (2.0 * (ll_full - ll_null)).max(0.0);
    Ok((stat, chi_square_sf(stat, df)))
}

/// Bonferroni correction for `m` simultaneous hypotheses:
/// `min(1, m * p)` per value.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    p_values
        .iter()
        .map(|p| (m as f64 * p).min(1.0))
        .collect()
}

/// One row of the danger map: the coefficient vector of a size group's
/// model plus its significance test against the intercept-only null.
#[derive(Debug, Clone, PartialEq)]
pub struct DangerRow {
    /// Model coefficients in the model's own feature space (z-scored when
    /// the group was trained with normalization), coarse to fine.
    pub betas: Vec<f64>,
    /// The same coefficients mapped back to raw energy units.
    pub raw_betas: Vec<f64>,
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    pub p_adjusted: f64,
    pub n_samples: usize,
}

/// Coefficient matrix over size groups: which energy placements predict
/// malware. Positive entries mean energy at that resolution raises the
/// malware probability, negative entries lower it.
#[derive(Debug, Clone, PartialEq)]
pub struct DangerMap {
    pub rows: BTreeMap<usize, DangerRow>,
    /// Number of hypotheses used in the Bonferroni correction.
    pub hypotheses: usize,
}

/// Assembles the danger map from per-group fits. `hypotheses` sets the
/// Bonferroni multiplier; passing 0 uses the number of rows.
pub fn danger_map(groups: &BTreeMap<usize, GroupFit>, hypotheses: usize) -> Result<DangerMap> {
    if groups.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let m = if hypotheses == 0 { groups.len() } else { hypotheses };
    let mut rows = BTreeMap::new();
    for (&j, fit) in groups {
        let (chi2, p_value) = likelihood_ratio_test(fit.ll_full, fit.ll_null, j)?;
        rows.insert(
            j,
            DangerRow {
                betas: fit.model.betas().to_vec(),
                raw_betas: fit.model.raw_betas(),
                chi2,
                df: j,
                p_value,
                p_adjusted: bonferroni(&[p_value], m)[0],
                n_samples: fit.n_samples,
            },
        );
    }
    Ok(DangerMap { rows, hypotheses: m })
}

impl DangerMap {
    /// CSV with one row per size group: `J, n, chi2, df, p, p_adjusted,
    /// beta_1..beta_J` (coarse to fine). `raw` selects the raw-unit
    /// coefficient view.
    pub fn to_csv(&self, raw: bool) -> String {
        let mut out = String::from("j,n,chi2,df,p,p_adjusted,betas...\n");
        for (j, row) in &self.rows {
            out.push_str(&format!(
                "{j},{},{:?},{},{:?},{:?}",
                row.n_samples, row.chi2, row.df, row.p_value, row.p_adjusted
            ));
            let betas = if raw { &row.raw_betas } else { &row.betas };
            for b in betas {
                out.push_str(&format!(",{b:?}"));
            }
            out.push('\n');
        }
        out
    }

    /// SVG heatmap with a diverging red/blue scale centered at zero: red
    /// cells mark energy placements that raise the malware probability.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 34;
        const LEFT: usize = 60;
        const TOP: usize = 40;
        let max_j = self.rows.keys().max().copied().unwrap_or(1);
        let peak = self
            .rows
            .values()
            .flat_map(|r| r.betas.iter())
            .fold(0.0f64, |acc, b| acc.max(b.abs()))
            .max(1e-12);
        let width = LEFT + max_j * CELL + 20;
        let height = TOP + self.rows.len() * CELL + 20;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n\
             <text x=\"{LEFT}\" y=\"20\" font-family=\"monospace\" font-size=\"13\">resolution level (coarse to fine)</text>\n"
        );
        // Large groups on top, like reading a table of rows by size.
        for (row_idx, (j, row)) in self.rows.iter().rev().enumerate() {
            let y = TOP + row_idx * CELL;
            out.push_str(&format!(
                "<text x=\"8\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">J={j}</text>\n",
                y + CELL / 2 + 4
            ));
            for (col, beta) in row.betas.iter().enumerate() {
                let x = LEFT + col * CELL;
                let t = (beta / peak).clamp(-1.0, 1.0);
                // 0 -> white, +1 -> red, -1 -> blue.
                let (r, g, b) = if t >= 0.0 {
                    (255, (255.0 * (1.0 - t)) as u8, (255.0 * (1.0 - t)) as u8)
                } else {
                    ((255.0 * (1.0 + t)) as u8, (255.0 * (1.0 + t)) as u8, 255)
                };
                out.push_str(&format!(
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" \
                     fill=\"rgb({r},{g},{b})\" stroke=\"#888\"><title>J={j} level={} beta={beta:0.4}</title></rect>\n",
                    col + 1
                ));
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
