//! Zero-field eigenstates at U/A = 10, numerically and in closed form.
//!
//! ```text
//! cargo run --example zero_field_eigensystem
//! ```

use pseudospin::model::{
    build_hamiltonian, closed_form_zero_field, eigensystem, moment_expectation, BasisState, FieldVector, ModelParams,
};

fn main() -> pseudospin::Result<()> {
    let params = ModelParams::new(10.0, 1.0, 10.0, 10.0)?;
    let h = build_hamiltonian(&params, &FieldVector::ZERO)?;
    let numeric = eigensystem(&h)?;
    let exact = closed_form_zero_field(&params);

    let labels = BasisState::ALL.map(|b| format!("{:>7}", b.label()));
    println!("{:>10} {} {:>8}", "lambda/A", labels.join(" "), "|<M>|");
    for k in 0..4 {
        let amps = numeric.vectors[k].map(|x| format!("{x:>7.4}"));
        let m = moment_expectation(&numeric.state(k), &params)?;
        println!("{:>10.6} {} {:>8.1e}", numeric.values[k], amps.join(" "), m.magnitude());
        assert!((numeric.values[k] - exact.values[k]).abs() < 1e-12);
    }
    println!("ground splitting {:.6} A", numeric.ground_splitting());
    Ok(())
}
