//! Effective potential of the Mie oscillator as the defect strengthens.

use monopole_qes::model::effective_potential;
use monopole_qes::{DefectGeometry, FluxField, PotentialSpec};

fn main() -> monopole_qes::Result<()> {
    let spec = PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0);
    let flux = FluxField::new(0.75)?;
    let alphas = [0.4, 0.6, 0.8, 1.0];

    print!("{:>6}", "r");
    for a in alphas {
        print!("  alpha={a:<6}");
    }
    println!();
    for i in 0..=18 {
        let r = 0.5 + 0.25 * i as f64;
        print!("{r:>6.2}");
        for a in alphas {
            let geom = DefectGeometry::new(a, 1.0)?;
            print!("  {:>12.6}", effective_potential(&spec, &geom, 1, &flux, r)?);
        }
        println!();
    }
    Ok(())
}
