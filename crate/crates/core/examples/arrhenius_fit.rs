//! Synthesize a noisy lifetime curve for a two-channel magnet and fit it back.
//!
//! ```text
//! cargo run --example arrhenius_fit [seed]
//! ```

use pseudospin::reference::TB2SCN_C80;
use pseudospin::relaxation::{fit, log_spaced, model_lifetime, synthesize};

fn main() -> pseudospin::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let truth = TB2SCN_C80.relaxation_model();
    let temps = log_spaced(0.4, 30.0, 30)?;
    let data = synthesize(&truth, &temps, 0.05, seed)?;

    let result = fit(&data, 2, None)?;
    println!("converged {} after {} iterations, rms {:.4}", result.converged, result.iterations, result.residual_rms);
    for (k, (p, e)) in result.model.processes().iter().zip(&result.std_errors).enumerate() {
        let t = truth.processes()[k];
        println!(
            "channel {}: tau0 = {:.3e} ± {:.1e} s (true {:.1e}), delta = {:.3} ± {:.3} K (true {})",
            k + 1,
            p.tau0(),
            e.tau0,
            t.tau0(),
            p.delta(),
            e.delta,
            t.delta()
        );
    }
    if !result.unresolved_channels().is_empty() {
        println!("unresolved channels: {:?}", result.unresolved_channels());
    }

    println!("\n{:>8} {:>12} {:>12}", "T/K", "tau data/s", "tau fit/s");
    for p in data.points().iter().step_by(5) {
        println!("{:>8.3} {:>12.4e} {:>12.4e}", p.temperature, p.tau, model_lifetime(&result.model, p.temperature)?);
    }
    Ok(())
}
