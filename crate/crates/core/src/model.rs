//! Geometry, flux, quantum numbers and the potential families.
//!
//! Everything here is in natural units (hbar = c = 1). The radial problem sees
//! the defect only through `alpha` and the flux only through the effective
//! orbital number `l' = l - Phi`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point-like global monopole background: `alpha` scales the radial metric
/// component (`alpha = 1` is flat space), `mass` is the particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectGeometry {
    alpha: f64,
    mass: f64,
}

impl DefectGeometry {
    pub fn new(alpha: f64, mass: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha: must satisfy 0 < alpha <= 1, got {alpha}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass: must be positive, got {mass}")));
        }
        Ok(Self { alpha, mass })
    }

    pub fn flat(mass: f64) -> Result<Self> {
        Self::new(1.0, mass)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Aharonov-Bohm flux line. `quanta` is the dimensionless flux count Phi, kept
/// real so that continuous flux sweeps are possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxField {
    quanta: f64,
    charge: f64,
}

impl FluxField {
    pub fn new(quanta: f64) -> Result<Self> {
        Self::with_charge(quanta, 1.0)
    }

    pub fn with_charge(quanta: f64, charge: f64) -> Result<Self> {
        if !(quanta >= 0.0 && quanta.is_finite()) {
            return Err(Error::Config(format!(
                "phi_quanta: must be a finite non-negative number, got {quanta}"
            )));
        }
        if !(charge != 0.0 && charge.is_finite()) {
            return Err(Error::Config(format!("charge: must be non-zero, got {charge}")));
        }
        Ok(Self { quanta, charge })
    }

    pub fn none() -> Self {
        Self {
            quanta: 0.0,
            charge: 1.0,
        }
    }

    pub fn quanta(&self) -> f64 {
        self.quanta
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    /// Flux quantum `2 pi / e`.
    pub fn flux_quantum(&self) -> f64 {
        2.0 * PI / self.charge
    }

    /// Total flux `Phi_AB = Phi * Phi_0`.
    pub fn ab_flux(&self) -> f64 {
        self.quanta * self.flux_quantum()
    }

    pub fn is_integer(&self) -> bool {
        self.quanta.fract() == 0.0
    }
}

/// Radial mode `n` (counted from 1) and orbital number `l`.
///
/// The magnetic number `m` (with `l = k + |m|`, k = 0, 1, ...) only matters
/// for degeneracy counting and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n: radial mode starts at 1".into()));
        }
        Ok(Self { n, l })
    }

    pub fn effective_orbital(&self, flux: &FluxField) -> f64 {
        effective_orbital(self.l, flux)
    }
}

/// `l' = l - Phi`. May be negative and non-integer.
pub fn effective_orbital(l: u32, flux: &FluxField) -> f64 {
    l as f64 - flux.quanta()
}

/// Centrifugal numerator `l'(l'+1)`.
pub(crate) fn centrifugal(l_eff: f64) -> f64 {
    l_eff * (l_eff + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    General,
    MieOscillator,
    Kratzer,
    ModifiedKratzer,
    Coulomb,
    Pseudoharmonic,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::General,
        Family::MieOscillator,
        Family::Kratzer,
        Family::ModifiedKratzer,
        Family::Coulomb,
        Family::Pseudoharmonic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::General => "general",
            Family::MieOscillator => "mie_oscillator",
            Family::Kratzer => "kratzer",
            Family::ModifiedKratzer => "modified_kratzer",
            Family::Coulomb => "coulomb",
            Family::Pseudoharmonic => "pseudoharmonic",
        }
    }

    pub fn is_molecular(&self) -> bool {
        matches!(
            self,
            Family::Kratzer | Family::ModifiedKratzer | Family::Coulomb
        )
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("case: unknown potential family `{s}`")))
    }
}

/// Molecular constants for the Kratzer-type and Coulomb families.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MolecularParams {
    /// Oscillator frequency; `beta = M omega^2 / 2`.
    pub omega: f64,
    /// Dissociation energy `D_e`.
    pub d_e: f64,
    /// Equilibrium separation `r_0`.
    pub r0: f64,
    /// Coulomb coupling `eta_c`.
    pub eta_c: f64,
}

/// `V(r) = beta r^2 + beta1 r + beta_m1 / r + beta_m2 / r^2 + v0` together with
/// the family tag. Molecular families keep their constants in `molecular` and
/// get their coefficients from [`reduce_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    pub beta: f64,
    pub beta1: f64,
    pub beta_m1: f64,
    pub beta_m2: f64,
    pub v0: f64,
    pub molecular: Option<MolecularParams>,
}

impl PotentialSpec {
    pub fn general(beta: f64, beta1: f64, beta_m1: f64, beta_m2: f64, v0: f64) -> Self {
        Self {
            family: Family::General,
            beta,
            beta1,
            beta_m1,
            beta_m2,
            v0,
            molecular: None,
        }
    }

    pub fn mie_oscillator(beta: f64, beta_m1: f64, beta_m2: f64, v0: f64) -> Self {
        Self {
            family: Family::MieOscillator,
            ..Self::general(beta, 0.0, beta_m1, beta_m2, v0)
        }
    }

    pub fn pseudoharmonic(beta: f64, beta_m2: f64, v0: f64) -> Self {
        Self {
            family: Family::Pseudoharmonic,
            ..Self::general(beta, 0.0, 0.0, beta_m2, v0)
        }
    }

    pub fn kratzer(omega: f64, d_e: f64, r0: f64) -> Self {
        Self::molecular(
            Family::Kratzer,
            MolecularParams {
                omega,
                d_e,
                r0,
                eta_c: 0.0,
            },
        )
    }

    pub fn modified_kratzer(omega: f64, d_e: f64, r0: f64) -> Self {
        Self::molecular(
            Family::ModifiedKratzer,
            MolecularParams {
                omega,
                d_e,
                r0,
                eta_c: 0.0,
            },
        )
    }

    pub fn coulomb(omega: f64, eta_c: f64) -> Self {
        Self::molecular(
            Family::Coulomb,
            MolecularParams {
                omega,
                eta_c,
                ..Default::default()
            },
        )
    }

    fn molecular(family: Family, params: MolecularParams) -> Self {
        Self {
            family,
            beta: 0.0,
            beta1: 0.0,
            beta_m1: 0.0,
            beta_m2: 0.0,
            v0: 0.0,
            molecular: Some(params),
        }
    }

    /// Free particle (all coefficients zero).
    pub fn free() -> Self {
        Self::general(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Oscillator strength `beta` after reduction.
    pub fn beta_for(&self, mass: f64) -> Result<f64> {
        Ok(reduce_potential(self, mass)?.beta)
    }

    /// Evaluates `sum` of the five terms. Expects already-reduced coefficients.
    fn eval_coefficients(&self, r: f64) -> f64 {
        let inv = 1.0 / r;
        self.beta * r * r + self.beta1 * r + self.beta_m1 * inv + self.beta_m2 * inv * inv + self.v0
    }
}

/// Maps any family onto the five General coefficients.
///
/// Kratzer: `beta = M w^2/2, beta_m1 = -2 D_e r0, beta_m2 = D_e r0^2, V0 = 0`;
/// modified Kratzer adds `V0 = D_e`; Coulomb: `beta_m1 = -eta_c, beta_m2 = 0`;
/// pseudoharmonic zeroes `beta1` and `beta_m1`; Mie-oscillator zeroes `beta1`.
pub fn reduce_potential(spec: &PotentialSpec, mass: f64) -> Result<PotentialSpec> {
    let molecular = || {
        spec.molecular.ok_or_else(|| {
            Error::Config(format!(
                "molecular: family `{}` needs molecular parameters",
                spec.family
            ))
        })
    };
    let out = match spec.family {
        Family::General => PotentialSpec {
            molecular: None,
            ..*spec
        },
        Family::MieOscillator => PotentialSpec::general(spec.beta, 0.0, spec.beta_m1, spec.beta_m2, spec.v0),
        Family::Pseudoharmonic => PotentialSpec::general(spec.beta, 0.0, 0.0, spec.beta_m2, spec.v0),
        Family::Kratzer | Family::ModifiedKratzer => {
            let m = molecular()?;
            if !(m.d_e > 0.0) {
                return Err(Error::Config(format!("d_e: must be positive, got {}", m.d_e)));
            }
            if !(m.r0 > 0.0) {
                return Err(Error::Config(format!("r0: must be positive, got {}", m.r0)));
            }
            let v0 = if spec.family == Family::ModifiedKratzer { m.d_e } else { 0.0 };
            PotentialSpec::general(
                0.5 * mass * m.omega * m.omega,
                0.0,
                -2.0 * m.d_e * m.r0,
                m.d_e * m.r0 * m.r0,
                v0,
            )
        }
        Family::Coulomb => {
            let m = molecular()?;
            if !(m.eta_c >= 0.0) {
                return Err(Error::Config(format!(
                    "eta_c: must be non-negative, got {}",
                    m.eta_c
                )));
            }
            PotentialSpec::general(0.5 * mass * m.omega * m.omega, 0.0, -m.eta_c, 0.0, 0.0)
        }
    };
    let finite = [out.beta, out.beta1, out.beta_m1, out.beta_m2, out.v0]
        .iter()
        .all(|c| c.is_finite());
    if !finite {
        return Err(Error::Config("coefficients: all potential coefficients must be finite".into()));
    }
    Ok(out)
}

/// `V(r)` for any family. `mass` is only used by the molecular families
/// (through `beta = M omega^2 / 2`).
pub fn potential_value(spec: &PotentialSpec, mass: f64, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(reduce_potential(spec, mass)?.eval_coefficients(r))
}

/// `V_eff = l'(l'+1) / (2 M alpha^2 r^2) + V(r) / alpha^2`.
pub fn effective_potential(
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    l: u32,
    flux: &FluxField,
    r: f64,
) -> Result<f64> {
    check_radius(r)?;
    let reduced = reduce_potential(spec, geom.mass())?;
    Ok(effective_from_reduced(
        &reduced,
        geom,
        effective_orbital(l, flux),
        r,
    ))
}

pub(crate) fn effective_from_reduced(
    reduced: &PotentialSpec,
    geom: &DefectGeometry,
    l_eff: f64,
    r: f64,
) -> f64 {
    let a2 = geom.alpha() * geom.alpha();
    centrifugal(l_eff) / (2.0 * geom.mass() * a2 * r * r) + reduced.eval_coefficients(r) / a2
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive and finite, got {r}")))
    }
}

/// Effective potential sampled on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotentialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub geometry: DefectGeometry,
    pub flux: FluxField,
    pub l: u32,
    pub potential: PotentialSpec,
}

impl EffectivePotentialProfile {
    /// Indices of interior local minima.
    pub fn interior_minima(&self) -> Vec<usize> {
        self.values
            .windows(3)
            .enumerate()
            .filter(|(_, w)| w[1] < w[0] && w[1] <= w[2])
            .map(|(i, _)| i + 1)
            .collect()
    }
}

pub fn profile(
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    l: u32,
    flux: &FluxField,
    radii: &[f64],
) -> Result<EffectivePotentialProfile> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("profile grid must be strictly increasing".into()));
    }
    let values = radii
        .iter()
        .map(|&r| effective_potential(spec, geom, l, flux, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectivePotentialProfile {
        radii: radii.to_vec(),
        values,
        geometry: *geom,
        flux: *flux,
        l,
        potential: *spec,
    })
}

/// `points` evenly spaced radii on `[r_min, r_max]`.
pub fn linear_radii(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::Domain(format!(
            "radial range must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {points}")));
    }
    let step = (r_max - r_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { r_max } else { r_min + step * i as f64 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn effective_orbital_examples() {
        assert_eq!(effective_orbital(1, &FluxField::none()), 1.0);
        assert_eq!(effective_orbital(1, &FluxField::new(0.75).unwrap()), 0.25);
        assert_eq!(effective_orbital(2, &FluxField::new(2.0).unwrap()), 0.0);
    }

    #[test]
    fn potential_value_examples() {
        let spec = PotentialSpec::general(1.0, 0.0, 1.0, 1.0, 1.0);
        assert_eq!(potential_value(&spec, 1.0, 1.0).unwrap(), 4.0);

        let kratzer = PotentialSpec::kratzer(0.0, 1.0, 1.0);
        assert_eq!(potential_value(&kratzer, 1.0, 1.0).unwrap(), -1.0);

        let modified = PotentialSpec::modified_kratzer(0.0, 2.5, 1.7);
        assert!(potential_value(&modified, 1.0, 1.7).unwrap().abs() < 1e-15);
    }

    #[test]
    fn nonpositive_radius_is_a_domain_error() {
        let spec = PotentialSpec::free();
        assert!(matches!(potential_value(&spec, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(potential_value(&spec, 1.0, -1.0), Err(Error::Domain(_))));
        let geom = DefectGeometry::flat(1.0).unwrap();
        assert!(matches!(
            effective_potential(&spec, &geom, 0, &FluxField::none(), 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn reduce_potential_examples() {
        let k = reduce_potential(&PotentialSpec::kratzer(2.0, 1.0, 1.0), 1.0).unwrap();
        assert_eq!((k.beta, k.beta1, k.beta_m1, k.beta_m2, k.v0), (2.0, 0.0, -2.0, 1.0, 0.0));
        assert_eq!(k.family, Family::General);

        let mk = reduce_potential(&PotentialSpec::modified_kratzer(0.0, 1.0, 1.0), 1.0).unwrap();
        assert_eq!((mk.beta, mk.beta_m1, mk.beta_m2, mk.v0), (0.0, -2.0, 1.0, 1.0));

        let c = reduce_potential(&PotentialSpec::coulomb(3.0, 0.0), 2.0).unwrap();
        assert_eq!((c.beta, c.beta1, c.beta_m1, c.beta_m2, c.v0), (9.0, 0.0, 0.0, 0.0, 0.0));

        let p = reduce_potential(&PotentialSpec {
            family: Family::Pseudoharmonic,
            ..PotentialSpec::general(1.0, 3.0, 4.0, 5.0, 6.0)
        }, 1.0)
        .unwrap();
        assert_eq!((p.beta1, p.beta_m1, p.beta_m2), (0.0, 0.0, 5.0));
    }

    #[test]
    fn missing_molecular_parameters_is_a_config_error() {
        let spec = PotentialSpec {
            family: Family::Kratzer,
            ..PotentialSpec::free()
        };
        let err = reduce_potential(&spec, 1.0).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("molecular")));
    }

    #[test]
    fn effective_potential_examples() {
        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let flux = FluxField::new(0.75).unwrap();
        let spec = PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0);
        // 0.3125 / (2 * 0.5625) + 4 / 0.5625
        let v = effective_potential(&spec, &geom, 1, &flux, 1.0).unwrap();
        assert!((v - 7.388_888_888_888_889).abs() < 1e-12);
        assert!((v - 7.38889).abs() < 1e-5);

        let flat = DefectGeometry::flat(1.0).unwrap();
        let free = PotentialSpec::free();
        for r in [0.1, 1.0, 7.0] {
            assert_eq!(effective_potential(&free, &flat, 0, &FluxField::none(), r).unwrap(), 0.0);
        }
        assert_eq!(
            effective_potential(&free, &flat, 1, &FluxField::none(), 2.0).unwrap(),
            0.25
        );
    }

    #[test]
    fn flat_space_reduces_to_textbook_form() {
        let geom = DefectGeometry::flat(1.3).unwrap();
        let spec = PotentialSpec::general(0.7, 0.2, -0.4, 0.3, 0.1);
        for l in 0..4u32 {
            for r in [0.3, 1.1, 2.9] {
                let v = potential_value(&spec, 1.3, r).unwrap();
                let textbook = (l * (l + 1)) as f64 / (2.0 * 1.3 * r * r) + v;
                let got = effective_potential(&spec, &geom, l, &FluxField::none(), r).unwrap();
                assert!(close(got, textbook, 1e-14));
            }
        }
    }

    #[test]
    fn family_closed_forms_match_reduction() {
        let mass = 1.7;
        let (omega, d_e, r0, eta) = (0.9, 2.3, 1.4, 0.8);
        let radii = linear_radii(0.05, 10.0, 100).unwrap();
        for &r in &radii {
            let osc = 0.5 * mass * omega * omega * r * r;
            let kratzer = osc + 2.0 * d_e * (0.5 * (r0 / r).powi(2) - r0 / r);
            let modified = osc + d_e * ((r - r0) / r).powi(2);
            let coulomb = osc - eta / r;
            let k = potential_value(&PotentialSpec::kratzer(omega, d_e, r0), mass, r).unwrap();
            let mk = potential_value(&PotentialSpec::modified_kratzer(omega, d_e, r0), mass, r).unwrap();
            let c = potential_value(&PotentialSpec::coulomb(omega, eta), mass, r).unwrap();
            let scale = kratzer.abs().max(modified.abs()).max(osc);
            assert!((k - kratzer).abs() <= 1e-14 * scale.max(1.0) * 10.0, "r={r}");
            assert!((mk - modified).abs() <= 1e-14 * scale.max(1.0) * 10.0, "r={r}");
            assert!((c - coulomb).abs() <= 1e-14 * coulomb.abs().max(1.0), "r={r}");
            assert!(((mk - k) - d_e).abs() <= 1e-13 * scale.max(1.0));
        }
    }

    #[test]
    fn profile_examples() {
        let flat = DefectGeometry::flat(1.0).unwrap();
        let p = profile(&PotentialSpec::free(), &flat, 0, &FluxField::none(), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.values, vec![0.0, 0.0, 0.0]);

        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let flux = FluxField::new(0.75).unwrap();
        let spec = PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0);
        let radii = linear_radii(0.5, 5.0, 200).unwrap();
        let p = profile(&spec, &geom, 1, &flux, &radii).unwrap();
        assert_eq!(p.interior_minima().len(), 1);

        assert!(profile(&spec, &geom, 1, &flux, &[1.0, 1.0]).is_err());
        assert!(profile(&spec, &geom, 1, &flux, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn profiles_differ_by_l() {
        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let flux = FluxField::new(0.75).unwrap();
        let spec = PotentialSpec::general(1.0, 1.0, 1.0, 1.0, 1.0);
        let radii = linear_radii(0.5, 5.0, 50).unwrap();
        let profiles: Vec<_> = (0..4)
            .map(|l| profile(&spec, &geom, l, &flux, &radii).unwrap().values)
            .collect();
        for a in 0..profiles.len() {
            for b in a + 1..profiles.len() {
                assert_ne!(profiles[a], profiles[b]);
            }
        }
    }

    #[test]
    fn invalid_geometry_and_flux() {
        assert!(DefectGeometry::new(0.0, 1.0).is_err());
        assert!(DefectGeometry::new(1.1, 1.0).is_err());
        assert!(DefectGeometry::new(0.5, 0.0).is_err());
        assert!(FluxField::new(-0.1).is_err());
        assert!(QuantumNumbers::new(0, 1).is_err());
        let f = FluxField::new(2.0).unwrap();
        assert!((f.ab_flux() - 4.0 * PI).abs() < 1e-15);
        assert!(f.is_integer());
    }
}
