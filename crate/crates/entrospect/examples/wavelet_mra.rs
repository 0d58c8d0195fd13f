//! Haar decomposition of a small signal: mother coefficients by level, the
//! energy spectrum, and the ladder of multi-resolution approximations.
//!
//! ```bash
//! cargo run -p entrospect --example wavelet_mra
//! ```

use entrospect::wavelet::{dwt_haar, energy_spectrum, mra_approximation};

fn main() {
    // A step up, a plateau, and an alternating tail.
    let signal = [1.0, 1.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 5.0, 7.0, 5.0, 7.0, 4.0, 4.0, 4.0, 4.0];
    println!("signal ({} samples): {signal:?}\n", signal.len());

    let decomp = dwt_haar(&signal).expect("decompose");
    println!(
        "J = {} levels, {} coefficients, global mean {:.4}\n",
        decomp.j_max(),
        decomp.coefficient_count(),
        decomp.global_mean()
    );

    println!("mother coefficients (level j: k=1..2^(j-1)):");
    for j in 1..=decomp.j_max() {
        let row: Vec<String> = decomp.level(j).iter().map(|d| format!("{d:+.3}")).collect();
        println!("  level {j}: {}", row.join("  "));
    }

    let spectrum = energy_spectrum(&decomp);
    println!("\nenergy spectrum (coarse -> fine):");
    for (level, e) in spectrum.as_slice().iter().enumerate() {
        println!("  E_{} = {e:>8.4}", level + 1);
    }
    let signal_energy: f64 = signal.iter().map(|v| v * v).sum();
    let mean_part = signal.len() as f64 * decomp.global_mean().powi(2);
    println!(
        "\nenergy conservation: sum x^2 = {signal_energy:.4}, T*mean^2 + sum E_j = {:.4}",
        mean_part + spectrum.total()
    );

    println!("\napproximation ladder (each level halves the block width):");
    for level in 0..=decomp.j_max() {
        let approx = mra_approximation(&decomp, level).unwrap();
        let row: Vec<String> = approx.iter().map(|v| format!("{v:>5.2}")).collect();
        println!("  level {level}: {}", row.join(" "));
    }
    println!("\nlevel 0 is the flat mean; level J reproduces the signal.");
}
