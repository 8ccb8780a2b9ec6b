//! A field along the y axis drives the ground state from a non-magnetic
//! tunneling superposition to a fully polarized |2bar> once the Zeeman
//! energy exceeds U.
//!
//! ```text
//! cargo run --example zeeman_field_sweep
//! ```

use pseudospin::analysis::{sweep_field, zeeman_threshold};
use pseudospin::model::ModelParams;

fn main() -> pseudospin::Result<()> {
    let params = ModelParams::new(47.5, 0.25, 9.0, 9.0)?;
    let bzt = zeeman_threshold(&params);
    println!("threshold field B_Zt = {bzt:.3} T");

    let table = sweep_field(&params, 2.0, 21)?;
    let moments = table.ground_moment_rows.as_ref().expect("field sweeps carry moments");
    println!("{:>8} {:>10} {:>10} {:>8}", "By/B_Zt", "lambda1/K", "lambda4/K", "my/mu_B");
    for ((x, row), m) in table.axis_values.iter().zip(&table.eigenvalue_rows).zip(moments) {
        println!("{x:>8.2} {:>10.4} {:>10.4} {:>8.3}", row[0], row[3], m.my);
    }
    Ok(())
}
