use monopole_qes::heun::{series_coefficients, truncation_kappa_roots};
use monopole_qes::model::{DefectGeometry, FluxField, PotentialSpec};
use monopole_qes::spectra::{energy_general_potential, flux_shift_identity, spectrum_record};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn truncation_roots_terminate_the_series(n in 1u32..6, j in 0.0f64..6.0, chi in -2.0f64..2.0) {
        let roots = truncation_kappa_roots(n, j, chi);
        prop_assert_eq!(roots.len(), n as usize + 1);
        for kappa in roots {
            let d = series_coefficients(j, kappa, chi, 2.0 * n as f64, n as usize + 3);
            let peak = d[..=n as usize].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert!(d[n as usize + 1].abs() <= 1e-9 * peak);
            prop_assert!(d[n as usize + 2].abs() <= 1e-9 * peak);
        }
    }

    #[test]
    fn levels_rise_with_n(
        alpha in 0.3f64..=1.0,
        phi in 0.0f64..2.0,
        l in 0u32..4,
        beta_m2 in 0.3f64..2.0,
        beta1 in -1.0f64..1.0,
    ) {
        let geom = DefectGeometry::new(alpha, 1.0).unwrap();
        let flux = FluxField::new(phi).unwrap();
        let spec = PotentialSpec::general(1.0, beta1, 0.5, beta_m2, 0.0);
        let e: Vec<f64> = (1..5)
            .map(|n| energy_general_potential(n, l, &spec, &geom, &flux).unwrap())
            .collect();
        prop_assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn whole_flux_quanta_relabel_orbitals(
        alpha in 0.4f64..=1.0,
        phi in 0.0f64..1.0,
        nu in 1i32..3,
        l in 2u32..5,
        n in 1u32..4,
    ) {
        let geom = DefectGeometry::new(alpha, 1.0).unwrap();
        let flux = FluxField::new(phi).unwrap();
        let spec = PotentialSpec::kratzer(1.0, 1.0, 1.0);
        let (a, b) = flux_shift_identity(n, l, &spec, &geom, &flux, nu).unwrap();
        prop_assert!((a.energy - b.energy).abs() <= 1e-13 * b.energy.abs());
    }

    #[test]
    fn coulomb_frequency_is_positive(alpha in 0.5f64..=1.0, l in 1u32..4, n in 1u32..4, eta in 0.1f64..3.0) {
        let geom = DefectGeometry::new(alpha, 1.0).unwrap();
        let rec = spectrum_record(n, l, &PotentialSpec::coulomb(1.0, eta), &geom, &FluxField::none()).unwrap();
        prop_assert!(rec.constraint.value > 0.0);
        prop_assert!(rec.energy > 0.0);
    }
}
