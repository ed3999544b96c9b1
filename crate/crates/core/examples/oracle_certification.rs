//! Checks analytic levels against the finite-difference eigen-solver.

use monopole_qes::oracle::verify_analytic;
use monopole_qes::spectra::spectrum_record;
use monopole_qes::{DefectGeometry, FluxField, PotentialSpec};

fn main() -> monopole_qes::Result<()> {
    let geom = DefectGeometry::new(0.75, 1.0)?;
    let flux = FluxField::new(0.5)?;
    let cases = [
        PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0),
        PotentialSpec::kratzer(1.0, 1.0, 1.0),
        PotentialSpec::coulomb(1.0, 1.0),
    ];
    for spec in &cases {
        for n in 1..=2 {
            let rec = spectrum_record(n, 1, spec, &geom, &flux)?;
            let rep = verify_analytic(&rec, spec, &geom, &flux, None)?;
            println!(
                "{:<15} n={n} E={:.10} oracle={:.10} rel_gap={:.1e} nodes={} index={} numerov_gap={:.1e} {}",
                spec.family.name(),
                rep.target_energy,
                rep.matched_energy,
                rep.rel_gap,
                rep.node_count,
                rep.spectral_index,
                rep.numerov_gap,
                if rep.converged { "certified" } else { "FAILED" }
            );
        }
    }
    Ok(())
}
