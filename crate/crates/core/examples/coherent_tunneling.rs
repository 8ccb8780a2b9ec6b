//! Population beating between |1> and |1bar> at zero field.
//!
//! Starting in one magnetic basis state, the moment flips back and forth at
//! the ground tunneling frequency.
//!
//! ```text
//! cargo run --example coherent_tunneling > beat.csv
//! ```

use pseudospin::analysis::to_frequency;
use pseudospin::format::fmt_f64;
use pseudospin::model::{build_hamiltonian, BasisState, FieldVector, ModelParams, Propagator, StateVector};

fn main() -> pseudospin::Result<()> {
    let params = ModelParams::new(10.0, 1.0, 10.0, 10.0)?;
    let prop = Propagator::new(&build_hamiltonian(&params, &FieldVector::ZERO)?)?;
    let beat = to_frequency(prop.spectrum().ground_splitting());
    eprintln!("beat frequency {beat:.3} GHz, period {:.4} ns", 1.0 / beat);

    let start = StateVector::basis(BasisState::One);
    println!("t_ns,p1,p1bar");
    let n = 200;
    for i in 0..=n {
        let t = 2.0 / beat * i as f64 / n as f64;
        let p = prop.evolve(&start, t).populations();
        println!("{},{},{}", fmt_f64(t), fmt_f64(p[0]), fmt_f64(p[1]));
    }
    Ok(())
}
