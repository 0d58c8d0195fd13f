//! Parse a PE section table, extract printable strings, and stream entropy
//! per section. Without an argument a small two-section image is built in
//! memory; non-PE input degrades to a single whole-file pseudo-section.
//!
//! ```bash
//! cargo run -p entrospect --example pe_sections [-- path/to/file.exe]
//! ```

use entrospect::binformat::{
    build_minimal_pe, extract_strings, section_entropy_streams, DEFAULT_MIN_STRING_LEN,
};
use entrospect::entropy::DEFAULT_CHUNK_SIZE;
use entrospect::synth::{generate_segment, Regime, RegimeSpec};

fn main() {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(&path).expect("read input file"),
        None => {
            let mut text = b"LoadLibraryA\0GetProcAddress\0hello from the demo image\0".to_vec();
            text.resize(768, 0x90);
            let packed =
                generate_segment(&RegimeSpec::from_chunks(Regime::Packed, 2), 9).unwrap();
            build_minimal_pe(&[(".text", &text), (".packed", &packed)])
        }
    };

    let streams = section_entropy_streams(&bytes, DEFAULT_CHUNK_SIZE).expect("parse");
    println!("{:<12} {:>8} {:>8}  mean-entropy", "section", "offset", "size");
    for s in &streams.streams {
        let mean = s.stream.values().iter().sum::<f64>() / s.stream.len() as f64;
        println!(
            "{:<12} {:>8} {:>8}  {mean:.3} bits over {} chunk(s)",
            s.section.name,
            s.section.file_offset,
            s.section.size,
            s.stream.len()
        );
    }
    for skip in &streams.skipped {
        println!("skipped: {}", skip.reason);
    }

    let strings = extract_strings(&bytes, DEFAULT_MIN_STRING_LEN);
    println!("\n{} printable string(s) of length >= {DEFAULT_MIN_STRING_LEN}:", strings.len());
    for s in strings.iter().take(10) {
        println!("  {s:?}");
    }
    if strings.len() > 10 {
        println!("  ... and {} more", strings.len() - 10);
    }
}
