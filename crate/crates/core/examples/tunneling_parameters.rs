//! From a measured ground splitting to the tunneling element A.
//!
//! The quick rule A = Δ/4 assumes the splitting is 4A; the exact inverse of
//! the zero-field spectrum needs U and gives a much larger A when U ≫ A.
//!
//! ```text
//! cargo run --example tunneling_parameters
//! ```

use pseudospin::analysis::{extract_a, frequency_annotations, to_frequency, ExtractionMode};
use pseudospin::reference::MOLECULES;

fn main() -> pseudospin::Result<()> {
    for m in MOLECULES {
        let delta = m.process_i.delta;
        let u = m.reported_u_over_a * m.reported_a;
        let quick = extract_a(delta, u, ExtractionMode::Paper)?;
        let exact = extract_a(delta, u, ExtractionMode::Exact)?;
        println!("{}", m.name);
        println!("  splitting     {delta} K = {:.2} GHz", to_frequency(delta));
        println!("  A = delta/4   {:.4} K (reported {} K)", quick, m.reported_a);
        println!("  A exact       {exact:.4} K with U = {u} K");
        for note in frequency_annotations(delta) {
            println!("  note: {note}");
        }
    }
    Ok(())
}
