//! Flat space keeps the oscillator's n + l degeneracy; the monopole lifts it.

use monopole_qes::spectra::{degeneracy_report, energy_general_potential, DEFAULT_DEGENERACY_TOL};
use monopole_qes::{DefectGeometry, FluxField, PotentialSpec};

fn main() -> monopole_qes::Result<()> {
    let spec = PotentialSpec::pseudoharmonic(0.5, 0.0, 0.0);
    for alpha in [1.0, 0.6] {
        let geom = DefectGeometry::new(alpha, 1.0)?;
        let report = degeneracy_report(2, 4, &spec, &geom, &FluxField::none(), DEFAULT_DEGENERACY_TOL)?;
        println!("alpha = {alpha}");
        for (l, e) in &report.levels {
            println!("    l = {l}: E = {e:.10}");
        }
        println!("    collisions: {:?}", report.collisions);
    }

    // Across n: E(n, l) = E(n-1, l+1) only when alpha = 1.
    for alpha in [1.0, 0.6] {
        let geom = DefectGeometry::new(alpha, 1.0)?;
        let a = energy_general_potential(2, 1, &spec, &geom, &FluxField::none())?;
        let b = energy_general_potential(1, 2, &spec, &geom, &FluxField::none())?;
        println!("alpha = {alpha}: E(2,1) - E(1,2) = {:.3e}", a - b);
    }
    Ok(())
}
