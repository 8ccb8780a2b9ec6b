//! Zero-field levels as the exchange splitting grows relative to tunneling.
//!
//! The two middle levels stay at 0 and U while the outer pair is pushed
//! apart; for large U/A the ground splitting approaches 4A²/U.
//!
//! ```text
//! cargo run --example spectrum_vs_ua > ua.csv
//! ```

use pseudospin::analysis::sweep_ua;

fn main() -> pseudospin::Result<()> {
    let table = sweep_ua(0.0, 20.0, 41)?;
    print!("{}", table.to_csv());

    for (ua, row) in table.axis_values.iter().zip(&table.eigenvalue_rows).skip(20).step_by(10) {
        let split = row[1] - row[0];
        eprintln!("U/A = {ua:>4}: splitting {split:.4} A, 4A/U gives {:.4} A", 4.0 / ua);
    }
    Ok(())
}
