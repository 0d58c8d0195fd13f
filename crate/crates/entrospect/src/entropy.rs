//! Chunked Shannon entropy streams over raw bytes.
//!
//! A file is split into non-overlapping chunks of fixed length (256 bytes by
//! default) and each chunk is reduced to its Shannon entropy
//! `H = -sum p_i log2 p_i` over the 256 possible byte values, giving a value
//! in `[0, 8]` bits. The resulting sequence is the file's entropy stream:
//! padding sits near 0, plain text around 4.3, native code around 5, and
//! compressed or encrypted regions near the top of the scale.

use crate::error::{Error, Result};

/// Default chunk length in bytes.
pub const DEFAULT_CHUNK_SIZE: usize = 256;

/// Per-chunk Shannon entropies of one byte region.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyStream {
    values: Vec<f64>,
    chunk_size: usize,
    source_label: String,
    source_byte_len: usize,
}

impl EntropyStream {
    /// Entropy values in bits, one per full chunk, each in `[0, 8]`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of chunks in the stream.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    /// Identifier of the file or section the stream came from.
    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn source_byte_len(&self) -> usize {
        self.source_byte_len
    }
}

/// Shannon entropy in bits of one chunk of bytes.
///
/// Uses the count form `H = log2 n - (sum c_i log2 c_i) / n`, which is exact
/// for the degenerate cases (single symbol -> 0, all 256 symbols equiprobable
/// -> 8) and algebraically equal to `-sum p_i log2 p_i`.
pub fn chunk_entropy(chunk: &[u8]) -> Result<f64> {
    if chunk.is_empty() {
        return Err(Error::EmptyChunk);
    }
    let mut counts = [0u32; 256];
    for &b in chunk {
        counts[b as usize] += 1;
    }
    let n = chunk.len() as f64;
    let mut sum_c_log_c = 0.0;
    for &c in &counts {
        if c > 0 {
            let c = c as f64;
            sum_c_log_c += c * c.log2();
        }
    }
    Ok((n.log2() - sum_c_log_c / n).clamp(0.0, 8.0))
}

/// Entropy stream of a byte region: one entropy value per full chunk, with a
/// trailing partial chunk dropped so every value covers the same amount of
/// data.
pub fn entropy_stream(bytes: &[u8], chunk_size: usize, source_label: &str) -> Result<EntropyStream> {
    if chunk_size == 0 {
        return Err(Error::invalid("chunk size must be positive"));
    }
    if bytes.len() < chunk_size {
        return Err(Error::StreamTooShort {
            len: bytes.len(),
            chunk_size,
        });
    }
    let values = bytes
        .chunks_exact(chunk_size)
        .map(chunk_entropy)
        .collect::<Result<Vec<f64>>>()?;
    Ok(EntropyStream {
        values,
        chunk_size,
        source_label: source_label.to_string(),
        source_byte_len: bytes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct probability-form oracle, kept independent of the count-form
    /// implementation above.
    fn histogram_entropy(chunk: &[u8]) -> f64 {
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
    fn constant_chunk_is_exactly_zero() {
        let chunk = [0u8; 256];
        assert_eq!(chunk_entropy(&chunk).unwrap(), 0.0);
    }

    #[test]
    fn uniform_256_symbols_is_exactly_eight() {
        let chunk: Vec<u8> = (0..=255).collect();
        assert_eq!(chunk_entropy(&chunk).unwrap(), 8.0);
    }

    #[test]
    fn two_equiprobable_symbols_is_exactly_one() {
        let mut chunk = vec![0x00u8; 128];
        chunk.extend(vec![0xffu8; 128]);
        assert_eq!(chunk_entropy(&chunk).unwrap(), 1.0);
    }

    #[test]
    fn empty_chunk_is_an_error() {
        assert!(matches!(chunk_entropy(&[]), Err(Error::EmptyChunk)));
    }

    #[test]
    fn stream_of_zero_bytes() {
        let stream = entropy_stream(&[0u8; 1024], 256, "t").unwrap();
        assert_eq!(stream.values(), &[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(stream.chunk_size(), 256);
        assert_eq!(stream.source_byte_len(), 1024);
    }

    #[test]
    fn partial_trailing_chunk_is_dropped() {
        let stream = entropy_stream(&[7u8; 300], 256, "t").unwrap();
        assert_eq!(stream.len(), 1);
    }

    #[test]
    fn input_shorter_than_one_chunk_is_an_error() {
        let err = entropy_stream(&[7u8; 255], 256, "t").unwrap_err();
        assert!(err.to_string().contains("stream too short"));
    }

    #[test]
    fn zero_chunk_size_is_an_error() {
        assert!(entropy_stream(&[7u8; 16], 0, "t").is_err());
    }

    proptest! {
        #[test]
        fn matches_histogram_oracle(chunk in proptest::collection::vec(any::<u8>(), 1..=512)) {
            let got = chunk_entropy(&chunk).unwrap();
            let want = histogram_entropy(&chunk);
            prop_assert!((got - want).abs() <= 1e-12);
        }

        #[test]
        fn bounded_zero_to_eight(chunk in proptest::collection::vec(any::<u8>(), 1..=512)) {
            let h = chunk_entropy(&chunk).unwrap();
            prop_assert!((0.0..=8.0).contains(&h));
            let distinct = chunk.iter().collect::<std::collections::HashSet<_>>().len();
            if distinct == 1 {
                prop_assert_eq!(h, 0.0);
            }
            if h == 0.0 {
                prop_assert_eq!(distinct, 1);
            }
        }

        #[test]
        fn invariant_under_permutation(mut chunk in proptest::collection::vec(any::<u8>(), 1..=256), seed in any::<u64>()) {
            let before = chunk_entropy(&chunk).unwrap();
            crate::rng::Rng::new(seed).shuffle(&mut chunk);
            let after = chunk_entropy(&chunk).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn stream_length_is_floor_of_ratio(bytes in proptest::collection::vec(any::<u8>(), 64..=2048), chunk_size in 1usize..=64) {
            let stream = entropy_stream(&bytes, chunk_size, "t").unwrap();
            prop_assert_eq!(stream.len(), bytes.len() / chunk_size);
        }
    }
}
