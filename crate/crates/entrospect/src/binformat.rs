//! Minimal PE ingestion: section-table parsing, printable-string
//! extraction, and per-section entropy streams.
//!
//! Only the COFF section table is read; imports, relocations, and the rest
//! of the PE format are out of scope. Input that does not start with the MZ
//! signature falls back to a single `<whole-file>` pseudo-section so raw
//! blobs (including the synthetic corpus) flow through the same pipeline,
//! while an MZ signature followed by truncated or inconsistent headers is a
//! hard `malformed PE` error.

use crate::entropy::{entropy_stream, EntropyStream};
use crate::error::{Error, Result};

/// Name used for the pseudo-section covering non-PE input.
pub const WHOLE_FILE: &str = "<whole-file>";

/// Default minimum printable-string length.
pub const DEFAULT_MIN_STRING_LEN: usize = 5;

/// One raw-data region of a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionInfo {
    pub name: String,
    pub file_offset: usize,
    pub size: usize,
}

/// Entropy stream of one section.
#[derive(Debug, Clone)]
pub struct SectionStream {
    pub section: SectionInfo,
    pub stream: EntropyStream,
}

/// Section left out of streaming, with the reason recorded.
#[derive(Debug, Clone)]
pub struct SkippedSection {
    pub section: SectionInfo,
    pub reason: String,
}

/// Result of [`section_entropy_streams`].
#[derive(Debug, Clone)]
pub struct SectionStreams {
    pub streams: Vec<SectionStream>,
    pub skipped: Vec<SkippedSection>,
}

fn read_u16(bytes: &[u8], offset: usize) -> Option<u16> {
    Some(u16::from_le_bytes(bytes.get(offset..offset + 2)?.try_into().ok()?))
}

fn read_u32(bytes: &[u8], offset: usize) -> Option<u32> {
    Some(u32::from_le_bytes(bytes.get(offset..offset + 4)?.try_into().ok()?))
}

fn malformed(msg: &str) -> Error {
    Error::MalformedPe(msg.to_string())
}

/// Parses the PE section table, or returns a single `<whole-file>`
/// pseudo-section for input without the MZ signature.
pub fn parse_sections(bytes: &[u8]) -> Result<Vec<SectionInfo>> {
    if bytes.len() < 2 || &bytes[..2] != b"MZ" {
        return Ok(vec![SectionInfo {
            name: WHOLE_FILE.to_string(),
            file_offset: 0,
            size: bytes.len(),
        }]);
    }

    let e_lfanew = read_u32(bytes, 0x3c).ok_or_else(|| malformed("truncated DOS header"))? as usize;
    let sig = bytes
        .get(e_lfanew..e_lfanew + 4)
        .ok_or_else(|| malformed("PE header offset out of bounds"))?;
    if sig != b"PE\0\0" {
        return Err(malformed("missing PE signature"));
    }
    let coff = e_lfanew + 4;
    let n_sections =
        read_u16(bytes, coff + 2).ok_or_else(|| malformed("truncated COFF header"))? as usize;
    let opt_size =
        read_u16(bytes, coff + 16).ok_or_else(|| malformed("truncated COFF header"))? as usize;
    let table = coff + 20 + opt_size;

    let mut sections = Vec::with_capacity(n_sections);
    for i in 0..n_sections {
        let entry = table + i * 40;
        let header = bytes
            .get(entry..entry + 40)
            .ok_or_else(|| malformed("truncated section table"))?;
        let name_raw = &header[..8];
        let name_len = name_raw.iter().position(|&b| b == 0).unwrap_or(8);
        let name = String::from_utf8_lossy(&name_raw[..name_len]).into_owned();
        let size = read_u32(header, 16).unwrap() as usize;
        let file_offset = read_u32(header, 20).unwrap() as usize;
        if file_offset.checked_add(size).is_none_or(|end| end > bytes.len()) {
            return Err(malformed(&format!("section {name:?} exceeds file bounds")));
        }
        sections.push(SectionInfo {
            name,
            file_offset,
            size,
        });
    }

    // Raw-data regions must not overlap.
    let mut spans: Vec<(usize, usize)> = sections
        .iter()
        .filter(|s| s.size > 0)
        .map(|s| (s.file_offset, s.file_offset + s.size))
        .collect();
    spans.sort_unstable();
    for pair in spans.windows(2) {
        if pair[1].0 < pair[0].1 {
            return Err(malformed("overlapping sections"));
        }
    }
    Ok(sections)
}

/// Maximal runs of printable ASCII (0x20..=0x7E) of length >= `min_len`, in
/// file order, duplicates retained.
pub fn extract_strings(bytes: &[u8], min_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut run = Vec::new();
    for &b in bytes.iter().chain(std::iter::once(&0u8)) {
        if (0x20..=0x7e).contains(&b) {
            run.push(b);
        } else {
            if run.len() >= min_len.max(1) {
                out.push(String::from_utf8(std::mem::take(&mut run)).unwrap());
            }
            run.clear();
        }
    }
    out
}

/// One entropy stream per section large enough to hold a full chunk;
/// smaller sections are recorded as skipped. Chunking restarts at every
/// section boundary, so no chunk straddles two sections.
pub fn section_entropy_streams(bytes: &[u8], chunk_size: usize) -> Result<SectionStreams> {
    let sections = parse_sections(bytes)?;
    let mut streams = Vec::new();
    let mut skipped = Vec::new();
    for section in sections {
        if section.size < chunk_size {
            skipped.push(SkippedSection {
                reason: format!(
                    "section {:?} has {} byte(s), smaller than one {}-byte chunk",
                    section.name, section.size, chunk_size
                ),
                section,
            });
            continue;
        }
        let data = &bytes[section.file_offset..section.file_offset + section.size];
        let stream = entropy_stream(data, chunk_size, &section.name)?;
        streams.push(SectionStream { section, stream });
    }
    Ok(SectionStreams { streams, skipped })
}

/// Builds a minimal but structurally valid PE image holding the given
/// sections' raw data. Intended for pipeline tests and demos; the image has
/// no optional header, imports, or entry point.
pub fn build_minimal_pe(sections: &[(&str, &[u8])]) -> Vec<u8> {
    const DOS_LEN: usize = 0x40;
    let pe_off = DOS_LEN;
    let table = pe_off + 4 + 20;
    let headers_len = table + sections.len() * 40;
    // Round raw-data offsets to a 0x100 boundary.
    let mut cursor = headers_len.div_ceil(0x100) * 0x100;

    let mut placed = Vec::new();
    for (name, data) in sections {
        placed.push((*name, *data, cursor));
        cursor += data.len().div_ceil(0x100) * 0x100;
    }

    let mut image = vec![0u8; cursor];
    image[0] = b'M';
    image[1] = b'Z';
    image[0x3c..0x40].copy_from_slice(&(pe_off as u32).to_le_bytes());
    image[pe_off..pe_off + 4].copy_from_slice(b"PE\0\0");
    image[pe_off + 4..pe_off + 6].copy_from_slice(&0x014c_u16.to_le_bytes()); // i386
    image[pe_off + 6..pe_off + 8].copy_from_slice(&(sections.len() as u16).to_le_bytes());
    // Timestamp, symbol table, optional-header size, characteristics all zero.

    for (i, (name, data, offset)) in placed.iter().enumerate() {
        let entry = table + i * 40;
        let name_bytes = name.as_bytes();
        image[entry..entry + name_bytes.len().min(8)]
            .copy_from_slice(&name_bytes[..name_bytes.len().min(8)]);
        image[entry + 8..entry + 12].copy_from_slice(&(data.len() as u32).to_le_bytes()); // VirtualSize
        image[entry + 12..entry + 16].copy_from_slice(&(*offset as u32).to_le_bytes()); // VirtualAddress
        image[entry + 16..entry + 20].copy_from_slice(&(data.len() as u32).to_le_bytes()); // SizeOfRawData
        image[entry + 20..entry + 24].copy_from_slice(&(*offset as u32).to_le_bytes()); // PointerToRawData
        image[*offset..*offset + data.len()].copy_from_slice(data);
    }
    image
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_section_fixture_roundtrips() {
        let text = vec![0x90u8; 512];
        let data = vec![0x41u8; 256];
        let image = build_minimal_pe(&[(".text", &text), (".data", &data)]);
        let sections = parse_sections(&image).unwrap();
        assert_eq!(sections.len(), 2);
        assert_eq!(sections[0].name, ".text");
        assert_eq!(sections[0].size, 512);
        assert_eq!(sections[1].name, ".data");
        assert_eq!(sections[1].size, 256);
        assert_eq!(
            &image[sections[0].file_offset..sections[0].file_offset + 512],
            &text[..]
        );
        assert_eq!(
            &image[sections[1].file_offset..sections[1].file_offset + 256],
            &data[..]
        );
    }

    #[test]
    fn non_pe_input_becomes_whole_file_section() {
        let blob = vec![7u8; 100];
        let sections = parse_sections(&blob).unwrap();
        assert_eq!(sections.len(), 1);
        assert_eq!(sections[0].name, WHOLE_FILE);
        assert_eq!(sections[0].file_offset, 0);
        assert_eq!(sections[0].size, 100);
    }

    #[test]
    fn truncated_pe_is_malformed() {
        let err = parse_sections(b"MZ\x00\x00").unwrap_err();
        assert!(err.to_string().contains("malformed PE"), "{err}");

        // MZ with e_lfanew pointing past the end.
        let mut image = vec![0u8; 0x40];
        image[0] = b'M';
        image[1] = b'Z';
        image[0x3c..0x40].copy_from_slice(&0x1000u32.to_le_bytes());
        assert!(matches!(parse_sections(&image), Err(Error::MalformedPe(_))));
    }

    #[test]
    fn bad_signature_is_malformed() {
        let mut image = build_minimal_pe(&[(".text", &[0u8; 64])]);
        image[0x40..0x44].copy_from_slice(b"XX\0\0");
        assert!(matches!(parse_sections(&image), Err(Error::MalformedPe(_))));
    }

    #[test]
    fn section_past_end_is_malformed() {
        let mut image = build_minimal_pe(&[(".text", &[0u8; 64])]);
        // Inflate SizeOfRawData beyond the file.
        let entry = 0x40 + 24;
        image[entry + 16..entry + 20].copy_from_slice(&0x10_0000u32.to_le_bytes());
        let err = parse_sections(&image).unwrap_err();
        assert!(err.to_string().contains("exceeds file bounds"));
    }

    #[test]
    fn overlapping_sections_are_malformed() {
        let image = build_minimal_pe(&[(".a", &[1u8; 512]), (".b", &[2u8; 512])]);
        let mut tampered = image.clone();
        // Point .b's raw data into the middle of .a.
        let entry_b = 0x40 + 24 + 40;
        let a_offset = u32::from_le_bytes(image[0x40 + 24 + 20..0x40 + 24 + 24].try_into().unwrap());
        tampered[entry_b + 20..entry_b + 24].copy_from_slice(&(a_offset + 0x100).to_le_bytes());
        assert!(matches!(parse_sections(&tampered), Err(Error::MalformedPe(_))));
    }

    #[test]
    fn strings_basic_cases() {
        let bytes = b"ABC\x00hello\x00";
        assert_eq!(extract_strings(bytes, 4), vec!["hello"]);
        assert_eq!(extract_strings(bytes, 3), vec!["ABC", "hello"]);
        assert!(extract_strings(&[], 4).is_empty());
    }

    #[test]
    fn strings_keep_duplicates_in_order() {
        let bytes = b"spam\x01spam\x02eggs";
        assert_eq!(extract_strings(bytes, 4), vec!["spam", "spam", "eggs"]);
    }

    #[test]
    fn per_section_streams_respect_boundaries() {
        let text = vec![0x90u8; 512];
        let data = vec![0x41u8; 256];
        let image = build_minimal_pe(&[(".text", &text), (".data", &data)]);
        let result = section_entropy_streams(&image, 256).unwrap();
        assert_eq!(result.streams.len(), 2);
        assert_eq!(result.streams[0].stream.len(), 2);
        assert_eq!(result.streams[1].stream.len(), 1);
        assert!(result.skipped.is_empty());
    }

    #[test]
    fn small_section_is_skipped_with_note() {
        let image = build_minimal_pe(&[(".text", &[0x90u8; 512]), (".tiny", &[1u8; 100])]);
        let result = section_entropy_streams(&image, 256).unwrap();
        assert_eq!(result.streams.len(), 1);
        assert_eq!(result.skipped.len(), 1);
        assert!(result.skipped[0].reason.contains("smaller than"));
        assert_eq!(result.skipped[0].section.name, ".tiny");
    }

    #[test]
    fn non_pe_blob_streams_whole_file() {
        let blob = vec![3u8; 1024];
        let result = section_entropy_streams(&blob, 256).unwrap();
        assert_eq!(result.streams.len(), 1);
        assert_eq!(result.streams[0].section.name, WHOLE_FILE);
        assert_eq!(result.streams[0].stream.len(), 4);
    }

    proptest! {
        #[test]
        fn strings_are_printable_and_long_enough(bytes in proptest::collection::vec(any::<u8>(), 0..2048), min_len in 1usize..8) {
            let strings = extract_strings(&bytes, min_len);
            for s in &strings {
                prop_assert!(s.len() >= min_len);
                prop_assert!(s.bytes().all(|b| (0x20..=0x7e).contains(&b)));
            }
            // Re-running on the separator-joined output reproduces the set.
            let joined: Vec<u8> = strings.iter().flat_map(|s| {
                let mut v = s.as_bytes().to_vec();
                v.push(0);
                v
            }).collect();
            prop_assert_eq!(extract_strings(&joined, min_len), strings);
        }

        #[test]
        fn parser_never_reads_out_of_range(bytes in proptest::collection::vec(any::<u8>(), 0..4096)) {
            // Must never panic, whatever the input; sections that parse stay
            // in bounds.
            if let Ok(sections) = parse_sections(&bytes) {
                for s in sections {
                    prop_assert!(s.file_offset + s.size <= bytes.len());
                }
            }
        }
    }
}
