//! Constrained QES levels for every potential family at one defect/flux setting.

use monopole_qes::spectra::spectrum_record;
use monopole_qes::{DefectGeometry, FluxField, PotentialSpec};

fn main() -> monopole_qes::Result<()> {
    let geom = DefectGeometry::new(0.75, 1.0)?;
    let flux = FluxField::new(0.5)?;
    let families = [
        PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0),
        PotentialSpec::kratzer(1.0, 1.0, 1.0),
        PotentialSpec::modified_kratzer(1.0, 1.0, 1.0),
        PotentialSpec::coulomb(1.0, 1.0),
        PotentialSpec::general(1.0, 1.0, -1.0, 1.0, 1.0),
    ];

    println!("{:<18} {:>2} {:>2} {:>8} {:>14} {:>14}", "family", "n", "l", "param", "value", "energy");
    for spec in &families {
        for n in 1..=3 {
            for l in 0..=2 {
                let rec = spectrum_record(n, l, spec, &geom, &flux)?;
                println!(
                    "{:<18} {:>2} {:>2} {:>8} {:>14.8} {:>14.8}",
                    spec.family.name(),
                    n,
                    l,
                    rec.constraint.param.name(),
                    rec.constraint.value,
                    rec.energy
                );
            }
        }
    }
    Ok(())
}
