//! Adding whole flux quanta is the same as lowering l.

use monopole_qes::spectra::flux_shift_identity;
use monopole_qes::{DefectGeometry, FluxField, PotentialSpec};

fn main() -> monopole_qes::Result<()> {
    let geom = DefectGeometry::new(0.6, 1.0)?;
    let flux = FluxField::new(0.3)?;
    let spec = PotentialSpec::kratzer(1.0, 1.0, 1.0);
    for nu in 1..=2 {
        for l in nu as u32..=3 {
            let (shifted, relabelled) = flux_shift_identity(1, l, &spec, &geom, &flux, nu)?;
            println!(
                "E(n=1, l={l}, phi={:.1}) = {:.12}   E(n=1, l={}, phi=0.3) = {:.12}",
                0.3 + nu as f64,
                shifted.energy,
                l - nu as u32,
                relabelled.energy
            );
        }
    }
    Ok(())
}
