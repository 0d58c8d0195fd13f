//! Compute and display the chunked entropy stream of a file.
//!
//! With a path argument the stream of that file is shown; without one, a
//! demo file is synthesized with known content regimes so the output is
//! self-explanatory.
//!
//! ```bash
//! cargo run -p entrospect --example entropy_stream [-- path/to/file]
//! ```

use entrospect::entropy::{entropy_stream, DEFAULT_CHUNK_SIZE};
use entrospect::synth::{generate_file, FileSpec, Regime, RegimeSpec};

fn bar(value: f64) -> String {
    let filled = (value / 8.0 * 40.0).round() as usize;
    format!("{}{}", "#".repeat(filled), ".".repeat(40 - filled))
}

fn main() {
    let (bytes, label) = match std::env::args().nth(1) {
        Some(path) => (std::fs::read(&path).expect("read input file"), path),
        None => {
            let spec = FileSpec {
                segments: vec![
                    RegimeSpec::from_chunks(Regime::Native, 4),
                    RegimeSpec::from_chunks(Regime::Text, 3),
                    RegimeSpec::from_chunks(Regime::Padding, 2),
                    RegimeSpec::from_chunks(Regime::Encrypted, 4),
                    RegimeSpec::from_chunks(Regime::Native, 3),
                ],
                label: 1,
                seed: 41,
            };
            println!("demo file: {}\n", spec.summary());
            (generate_file(&spec).unwrap(), "<demo>".to_string())
        }
    };

    let stream = entropy_stream(&bytes, DEFAULT_CHUNK_SIZE, &label).expect("stream");
    println!(
        "{}: {} bytes, {} chunks of {} bytes\n",
        stream.source_label(),
        stream.source_byte_len(),
        stream.len(),
        stream.chunk_size()
    );
    println!("chunk  entropy  0........................................8");
    for (i, v) in stream.values().iter().enumerate() {
        println!("{i:>5}  {v:>7.3}  {}", bar(*v));
    }
    let mean = stream.values().iter().sum::<f64>() / stream.len() as f64;
    println!("\nmean entropy: {mean:.3} bits");
}
