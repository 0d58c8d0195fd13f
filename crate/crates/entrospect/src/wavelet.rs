//! Haar discrete wavelet transform of entropy streams, multi-resolution
//! approximations, and per-level energy spectra.
//!
//! A stream of length `T` is right-truncated to `2^J` samples with
//! `J = floor(log2 T)`. Resolution levels are indexed `j = 1..=J` from coarse
//! to fine; level `j` splits the signal into `2^(j-1)` locations `k`, each
//! covering two adjacent bins of `B_j = 2^(J-j)` samples. The mother
//! coefficient is the scaled difference of bin sums
//!
//! ```text
//! d_{j,k} = (sum of second bin - sum of first bin) / s_j,   s_j = sqrt(2)^(J-j+1)
//! ```
//!
//! Under this scaling the transform is orthonormal, so signal energy is
//! conserved: `sum x(t)^2 = 2^J * mean^2 + sum d_{j,k}^2`. The energy at
//! level `j` is `E_j = sum_k d_{j,k}^2`; the vector `E_1..E_J` is the energy
//! spectrum, the feature core of the classifiers in this crate.

use crate::error::{Error, Result};

/// Mother wavelet coefficients of one dyadically truncated stream.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    /// `levels[j-1]` holds `d_{j,1..2^(j-1)}` for level `j`.
    levels: Vec<Vec<f64>>,
    global_mean: f64,
    truncated_len: usize,
}

impl WaveletDecomposition {
    /// Number of resolution levels `J`.
    pub fn j_max(&self) -> usize {
        self.levels.len()
    }

    /// Coefficients for level `j` (1-based), ordered by location `k`.
    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j - 1]
    }

    /// All levels, coarse to fine.
    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Coefficient `d_{j,k}` with `j` in `1..=J` and `k` in `1..=2^(j-1)`.
    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        self.levels[j - 1][k - 1]
    }

    /// Mean of the truncated signal (the coarsest approximation).
    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    /// Length of the analyzed prefix, `2^J`.
    pub fn truncated_len(&self) -> usize {
        self.truncated_len
    }

    /// Total number of stored coefficients, `2^J - 1`.
    pub fn coefficient_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

/// Per-level energies `E_1..E_J` of a decomposition, in squared bits.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    energies: Vec<f64>,
}

impl EnergySpectrum {
    /// Builds a spectrum directly from per-level energies. Values must be
    /// non-negative and non-empty.
    pub fn from_energies(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("energy spectrum must have at least one level"));
        }
        if energies.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return Err(Error::invalid("energies must be finite and non-negative"));
        }
        Ok(EnergySpectrum { energies })
    }

    /// Number of resolution levels `J`.
    pub fn j(&self) -> usize {
        self.energies.len()
    }

    /// Energy at level `j` (1-based).
    pub fn energy(&self, j: usize) -> f64 {
        self.energies[j - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.energies
    }

    /// Total energy across levels.
    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }
}

fn scale_factor(j_max: usize, j: usize) -> f64 {
    std::f64::consts::SQRT_2.powi((j_max - j + 1) as i32)
}

/// Haar discrete wavelet transform of a stream.
///
/// The stream is right-truncated to its largest dyadic prefix; trailing data
/// beyond `2^(floor(log2 T))` samples is discarded rather than padded, since
/// padding would fabricate an artificial entropy cliff.
pub fn dwt_haar(values: &[f64]) -> Result<WaveletDecomposition> {
    if values.len() < 2 {
        return Err(Error::NoResolutionLevels(values.len()));
    }
    let j_max = values.len().ilog2() as usize;
    let truncated_len = 1usize << j_max;

    // Pyramid of bin sums: at the step for level j, `sums` holds the 2^j bin
    // sums with bin width B_j = 2^(J-j).
    let mut sums: Vec<f64> = values[..truncated_len].to_vec();
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); j_max];
    for j in (1..=j_max).rev() {
        let s_j = scale_factor(j_max, j);
        let locations = 1usize << (j - 1);
        let mut detail = Vec::with_capacity(locations);
        let mut coarser = Vec::with_capacity(locations);
        for k in 0..locations {
            let first = sums[2 * k];
            let second = sums[2 * k + 1];
            detail.push((second - first) / s_j);
            coarser.push(first + second);
        }
        levels[j - 1] = detail;
        sums = coarser;
    }
    let global_mean = sums[0] / truncated_len as f64;
    Ok(WaveletDecomposition {
        levels,
        global_mean,
        truncated_len,
    })
}

/// Energy spectrum of a decomposition: `E_j = sum_k d_{j,k}^2`.
pub fn energy_spectrum(decomp: &WaveletDecomposition) -> EnergySpectrum {
    EnergySpectrum {
        energies: decomp
            .levels
            .iter()
            .map(|level| level.iter().map(|d| d * d).sum())
            .collect(),
    }
}

/// Level-`level` multi-resolution approximation, reconstructed from the
/// coefficients alone.
///
/// Level 0 is the constant global mean; each level `j` adds the detail
/// `d_{j,k}` scaled over its two half-bins. The result equals replacing each
/// contiguous block of `2^(J-level)` samples of the truncated stream by its
/// block mean, and at `level = J` it reproduces the truncated stream.
pub fn mra_approximation(decomp: &WaveletDecomposition, level: usize) -> Result<Vec<f64>> {
    let j_max = decomp.j_max();
    if level > j_max {
        return Err(Error::invalid(format!(
            "approximation level {level} out of range 0..={j_max}"
        )));
    }
    let mut out = vec![decomp.global_mean; decomp.truncated_len];
    for j in 1..=level {
        let s_j = scale_factor(j_max, j);
        let half = 1usize << (j_max - j); // B_j samples per half-support
        for (k0, &d) in decomp.levels[j - 1].iter().enumerate() {
            let start = k0 * 2 * half;
            let delta = d / s_j;
            for x in &mut out[start..start + half] {
                *x -= delta;
            }
            for x in &mut out[start + half..start + 2 * half] {
                *x += delta;
            }
        }
    }
    Ok(out)
}
