//! Closed-form energy levels and the parameter constraints that make each
//! level quasi-exactly solvable.
//!
//! The unconstrained spectrum is
//! `E = V0 + alpha sqrt(2 beta / M) (n + 1 + j) - beta1^2 / (4 beta)`.
//! A level is only backed by a polynomial wavefunction when, in addition, the
//! series truncation fixes one potential parameter: `beta^{n,l}` for the
//! Mie-type case, `omega_{n,l}` for the molecular cases and `beta_{-1}` when a
//! linear term is present. Records therefore carry the tuned parameter next
//! to the energy instead of mutating the input potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::{
    angular_index_reduced, constraint_from_kappa, radial_parameters_reduced, heun_parameters,
    truncation_kappa_roots, ConstrainedParam, HeunSolution,
};
use crate::model::{
    centrifugal, effective_orbital, reduce_potential, DefectGeometry, Family, FluxField,
    MolecularParams, PotentialSpec,
};

/// Default absolute tolerance for flagging near-degenerate levels.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub param: ConstrainedParam,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n: u32,
    pub l: u32,
    pub family: Family,
    pub energy: f64,
    pub constraint: Constraint,
    /// `j` (or the molecular `varsigma` / `tau`, which are the same quantity).
    pub angular_index: f64,
    /// Truncation root `kappa` the record was built on (signed).
    pub kappa: f64,
    pub chi: f64,
}

impl SpectrumRecord {
    /// The input potential with the constrained parameter substituted.
    pub fn tuned_spec(&self, spec: &PotentialSpec) -> Result<PotentialSpec> {
        let mut out = *spec;
        match self.constraint.param {
            ConstrainedParam::Beta => {
                if spec.family.is_molecular() {
                    return Err(Error::Inconsistent(format!(
                        "family `{}` is tuned through omega, not beta",
                        spec.family
                    )));
                }
                out.beta = self.constraint.value;
            }
            ConstrainedParam::Omega => {
                let mut m = spec.molecular.ok_or_else(|| {
                    Error::Inconsistent("omega constraint needs a molecular family".into())
                })?;
                m.omega = self.constraint.value;
                out.molecular = Some(m);
            }
            ConstrainedParam::BetaM1 => {
                if spec.family.is_molecular() {
                    return Err(Error::Inconsistent(
                        "beta_m1 constraint needs the general family".into(),
                    ));
                }
                out.beta_m1 = self.constraint.value;
            }
        }
        Ok(out)
    }

    pub fn heun_solution(&self) -> HeunSolution {
        HeunSolution::truncated(self.n, self.angular_index, self.kappa, self.chi)
    }
}

fn check_mode(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::Config("n: radial mode starts at 1".into()))
    } else {
        Ok(())
    }
}

/// `V0 + alpha sqrt(2 beta / M) (n + 1 + j) - beta1^2 / (4 beta)`.
fn level(n: u32, j: f64, beta: f64, beta1: f64, v0: f64, geom: &DefectGeometry) -> f64 {
    let base = v0 + geom.alpha() * (2.0 * beta / geom.mass()).sqrt() * (n as f64 + 1.0 + j);
    if beta1 == 0.0 {
        base
    } else {
        base - beta1 * beta1 / (4.0 * beta)
    }
}

/// Unconstrained energy for the Mie-type oscillator (`beta1 = 0`) at the
/// potential's own `beta`.
pub fn energy_mie(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<f64> {
    check_mode(n)?;
    let reduced = reduce_potential(spec, geom.mass())?;
    if reduced.beta1 != 0.0 {
        return Err(Error::Inconsistent(
            "beta1: the Mie-type spectrum has no linear term; use energy_general_potential".into(),
        ));
    }
    energy_for_orbital(n, effective_orbital(l, flux), &reduced, geom)
}

/// Unconstrained energy with the linear (Cornell-type) term.
pub fn energy_general_potential(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<f64> {
    check_mode(n)?;
    let reduced = reduce_potential(spec, geom.mass())?;
    energy_for_orbital(n, effective_orbital(l, flux), &reduced, geom)
}

/// Unconstrained energy as a function of the effective orbital number only.
pub(crate) fn energy_for_orbital(
    n: u32,
    l_eff: f64,
    reduced: &PotentialSpec,
    geom: &DefectGeometry,
) -> Result<f64> {
    if !(reduced.beta > 0.0) {
        return Err(Error::UnsupportedRegime(format!(
            "beta: a bound spectrum needs a positive oscillator term, got {}",
            reduced.beta
        )));
    }
    let j = angular_index_reduced(reduced, geom, l_eff)?;
    Ok(level(n, j, reduced.beta, reduced.beta1, reduced.v0, geom))
}

/// Picks the truncation root consistent with the sign of `beta_m1`; among
/// several, the one of largest magnitude (the most strongly tuned level).
fn select_root(n: u32, roots: &[f64], beta_m1: f64, sign_free: bool) -> Result<f64> {
    let pick = |pred: &dyn Fn(f64) -> bool| {
        roots
            .iter()
            .copied()
            .filter(|k| pred(*k))
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
    };
    let found = if beta_m1 > 0.0 {
        pick(&|k| k > 0.0)
    } else if beta_m1 < 0.0 {
        pick(&|k| k < 0.0)
    } else if sign_free {
        pick(&|_| true)
    } else {
        roots.iter().copied().find(|k| *k == 0.0)
    };
    found.ok_or_else(|| Error::NoTruncationRoot {
        n,
        reason: format!("no root with the sign of beta_m1 = {beta_m1} among {roots:?}"),
    })
}

/// Generic constrained level for any family and any `n >= 1`: truncation
/// roots composed with the kappa inversion.
pub fn constrained_record(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<SpectrumRecord> {
    check_mode(n)?;
    let reduced = reduce_potential(spec, geom.mass())?;
    let l_eff = effective_orbital(l, flux);
    let j = angular_index_reduced(&reduced, geom, l_eff)?;
    if reduced.beta1 == 0.0 {
        let roots = truncation_kappa_roots(n, j, 0.0);
        let kappa = select_root(n, &roots, reduced.beta_m1, false)?;
        let beta = constraint_from_kappa(kappa, ConstrainedParam::Beta, &reduced, geom)?;
        let constraint = if spec.family.is_molecular() {
            Constraint {
                param: ConstrainedParam::Omega,
                value: (2.0 * beta / geom.mass()).sqrt(),
            }
        } else {
            Constraint {
                param: ConstrainedParam::Beta,
                value: beta,
            }
        };
        Ok(SpectrumRecord {
            n,
            l,
            family: spec.family,
            energy: level(n, j, beta, 0.0, reduced.v0, geom),
            constraint,
            angular_index: j,
            kappa,
            chi: 0.0,
        })
    } else {
        let rp = radial_parameters_reduced(&reduced, geom, l_eff, reduced.v0)?;
        let chi = heun_parameters(&rp)?.chi;
        let roots = truncation_kappa_roots(n, j, chi);
        let kappa = select_root(n, &roots, reduced.beta_m1, true)?;
        let beta_m1 = constraint_from_kappa(kappa, ConstrainedParam::BetaM1, &reduced, geom)?;
        Ok(SpectrumRecord {
            n,
            l,
            family: spec.family,
            energy: level(n, j, reduced.beta, reduced.beta1, reduced.v0, geom),
            constraint: Constraint {
                param: ConstrainedParam::BetaM1,
                value: beta_m1,
            },
            angular_index: j,
            kappa,
            chi,
        })
    }
}

/// Every admissible constrained level for mode `n` (one per truncation root
/// allowed by the sign of `beta_m1`), ascending in kappa.
pub fn constrained_records_all(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<Vec<SpectrumRecord>> {
    let best = constrained_record(n, l, spec, geom, flux)?;
    let roots = truncation_kappa_roots(n, best.angular_index, best.chi);
    let reduced = reduce_potential(spec, geom.mass())?;
    let mut out = Vec::new();
    for kappa in roots {
        let admissible = if best.constraint.param == ConstrainedParam::BetaM1 {
            reduced.beta_m1 == 0.0 || kappa.signum() == reduced.beta_m1.signum()
        } else if reduced.beta_m1 == 0.0 {
            kappa == 0.0
        } else {
            kappa != 0.0 && kappa.signum() == reduced.beta_m1.signum()
        };
        if !admissible {
            continue;
        }
        let mut rec = best.clone();
        rec.kappa = kappa;
        match best.constraint.param {
            ConstrainedParam::BetaM1 => {
                rec.constraint.value =
                    constraint_from_kappa(kappa, ConstrainedParam::BetaM1, &reduced, geom)?;
            }
            param => {
                let beta = constraint_from_kappa(kappa, ConstrainedParam::Beta, &reduced, geom)?;
                rec.constraint.value = if param == ConstrainedParam::Omega {
                    (2.0 * beta / geom.mass()).sqrt()
                } else {
                    beta
                };
                rec.energy = level(n, rec.angular_index, beta, 0.0, reduced.v0, geom);
            }
        }
        out.push(rec);
    }
    Ok(out)
}

/// Closed-form constrained levels `n = 1, 2` of the Mie-type oscillator:
///
/// * `beta^{1,l} = M^3 beta_m1^4 / (2 alpha^6 (j + 1/2)^2)`,
///   `E_1 = V0 + (M / alpha^2) beta_m1^2 (2 + j) / (j + 1/2)`
/// * `beta^{2,l} = M^3 beta_m1^4 / (32 alpha^6 (j + 3/4)^2)`,
///   `E_2 = V0 + (M / 4 alpha^2) beta_m1^2 (3 + j) / (j + 3/4)`
///
/// Other `n` (and `beta_m1 = 0`) go through [`constrained_record`].
pub fn energy_mie_constrained(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<SpectrumRecord> {
    check_mode(n)?;
    let reduced = reduce_potential(spec, geom.mass())?;
    if reduced.beta1 != 0.0 {
        return Err(Error::Inconsistent(
            "beta1: the Mie-type closed forms have no linear term".into(),
        ));
    }
    if !(n == 1 || n == 2) || reduced.beta_m1 == 0.0 {
        return constrained_record(n, l, &reduced, geom, flux).map(|r| SpectrumRecord {
            family: spec.family,
            ..r
        });
    }
    let (m, a) = (geom.mass(), geom.alpha());
    let a2 = a * a;
    let a6 = a2 * a2 * a2;
    let j = angular_index_reduced(&reduced, geom, effective_orbital(l, flux))?;
    let b2 = reduced.beta_m1 * reduced.beta_m1;
    let sign = reduced.beta_m1.signum();
    let (beta, energy, kappa) = if n == 1 {
        let s = j + 0.5;
        (
            m * m * m * b2 * b2 / (2.0 * a6 * s * s),
            reduced.v0 + (m / a2) * b2 * (2.0 + j) / s,
            sign * 2.0 * s.sqrt(),
        )
    } else {
        let s = j + 0.75;
        (
            m * m * m * b2 * b2 / (32.0 * a6 * s * s),
            reduced.v0 + (m / (4.0 * a2)) * b2 * (3.0 + j) / s,
            sign * 4.0 * s.sqrt(),
        )
    };
    Ok(SpectrumRecord {
        n,
        l,
        family: spec.family,
        energy,
        constraint: Constraint {
            param: ConstrainedParam::Beta,
            value: beta,
        },
        angular_index: j,
        kappa,
        chi: 0.0,
    })
}

/// Harmonic oscillator plus (modified) Kratzer potential.
///
/// `varsigma = sqrt((l'(l'+1) + 2 M D_e r0^2) / alpha^2 + 1/4)`;
/// `omega_1 = 4 M D_e^2 r0^2 / (alpha^3 (varsigma + 1/2))`,
/// `omega_2 = M D_e^2 r0^2 / (alpha^3 (varsigma + 3/4))` and
/// `E = [D_e] + alpha omega (n + 1 + varsigma)`.
pub fn energy_kratzer(
    n: u32,
    l: u32,
    molecular: &MolecularParams,
    geom: &DefectGeometry,
    flux: &FluxField,
    modified: bool,
) -> Result<SpectrumRecord> {
    check_mode(n)?;
    let spec = if modified {
        PotentialSpec::modified_kratzer(molecular.omega, molecular.d_e, molecular.r0)
    } else {
        PotentialSpec::kratzer(molecular.omega, molecular.d_e, molecular.r0)
    };
    // Validates D_e, r0.
    reduce_potential(&spec, geom.mass())?;
    if !(n == 1 || n == 2) {
        return constrained_record(n, l, &spec, geom, flux);
    }
    let (m, a) = (geom.mass(), geom.alpha());
    let (d_e, r0) = (molecular.d_e, molecular.r0);
    let l_eff = effective_orbital(l, flux);
    let varsigma = crate::heun::angular_index(
        (centrifugal(l_eff) + 2.0 * m * d_e * r0 * r0) / (a * a),
    )?;
    let k = m * d_e * d_e * r0 * r0;
    let (omega, energy, kappa) = if n == 1 {
        let s = varsigma + 0.5;
        (
            4.0 * k / (a * a * a * s),
            4.0 * k / (a * a) * (varsigma + 2.0) / s,
            -2.0 * s.sqrt(),
        )
    } else {
        let s = varsigma + 0.75;
        (
            k / (a * a * a * s),
            k / (a * a) * (varsigma + 3.0) / s,
            -4.0 * s.sqrt(),
        )
    };
    let offset = if modified { d_e } else { 0.0 };
    Ok(SpectrumRecord {
        n,
        l,
        family: spec.family,
        energy: offset + energy,
        constraint: Constraint {
            param: ConstrainedParam::Omega,
            value: omega,
        },
        angular_index: varsigma,
        kappa,
        chi: 0.0,
    })
}

/// Harmonic oscillator plus attractive Coulomb potential.
///
/// `tau = sqrt(l'(l'+1) / alpha^2 + 1/4)`; `omega_1 = M eta^2 / (alpha^3 (tau + 1/2))`,
/// `omega_2 = M eta^2 / (4 alpha^3 (tau + 3/4))` and
/// `E = omega [(n + 1) alpha + sqrt(l'(l'+1) + alpha^2 / 4)]`.
pub fn energy_coulomb(
    n: u32,
    l: u32,
    eta_c: f64,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<SpectrumRecord> {
    check_mode(n)?;
    if !(eta_c > 0.0) {
        return Err(Error::Config(format!("eta_c: must be positive, got {eta_c}")));
    }
    let spec = PotentialSpec::coulomb(1.0, eta_c);
    if !(n == 1 || n == 2) {
        return constrained_record(n, l, &spec, geom, flux);
    }
    let (m, a) = (geom.mass(), geom.alpha());
    let l_eff = effective_orbital(l, flux);
    let tau = crate::heun::angular_index(centrifugal(l_eff) / (a * a))?;
    let bracket_root = (centrifugal(l_eff) + 0.25 * a * a).max(0.0).sqrt();
    let k = m * eta_c * eta_c / (a * a * a);
    let (omega, kappa) = if n == 1 {
        (k / (tau + 0.5), -2.0 * (tau + 0.5).sqrt())
    } else {
        (k / (4.0 * (tau + 0.75)), -4.0 * (tau + 0.75).sqrt())
    };
    Ok(SpectrumRecord {
        n,
        l,
        family: Family::Coulomb,
        energy: omega * ((n as f64 + 1.0) * a + bracket_root),
        constraint: Constraint {
            param: ConstrainedParam::Omega,
            value: omega,
        },
        angular_index: tau,
        kappa,
        chi: 0.0,
    })
}

/// Constrained level for any family, using the closed forms where they exist.
pub fn spectrum_record(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
) -> Result<SpectrumRecord> {
    match spec.family {
        Family::Kratzer | Family::ModifiedKratzer => {
            let m = spec.molecular.ok_or_else(|| {
                Error::Config(format!("molecular: family `{}` needs d_e and r0", spec.family))
            })?;
            energy_kratzer(n, l, &m, geom, flux, spec.family == Family::ModifiedKratzer)
        }
        Family::Coulomb => {
            let m = spec
                .molecular
                .ok_or_else(|| Error::Config("molecular: coulomb family needs eta_c".into()))?;
            energy_coulomb(n, l, m.eta_c, geom, flux)
        }
        Family::MieOscillator | Family::General if spec.beta1 == 0.0 && spec.beta_m1 != 0.0 => {
            energy_mie_constrained(n, l, spec, geom, flux)
        }
        _ => constrained_record(n, l, spec, geom, flux),
    }
}

/// `(E_{n,l}(Phi + nu), E_{n,l-nu}(Phi))`, which agree because the spectrum
/// depends on `l` and `Phi` only through `l - Phi`.
pub fn flux_shift_identity(
    n: u32,
    l: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
    nu: i32,
) -> Result<(SpectrumRecord, SpectrumRecord)> {
    let shifted_quanta = flux.quanta() + nu as f64;
    if shifted_quanta < 0.0 {
        return Err(Error::OutOfRange(format!(
            "flux {} + {nu} is negative",
            flux.quanta()
        )));
    }
    let partner_l = l as i64 - nu as i64;
    if partner_l < 0 {
        return Err(Error::OutOfRange(format!("l - nu = {partner_l} < 0")));
    }
    let shifted = FluxField::with_charge(shifted_quanta, flux.charge())?;
    Ok((
        spectrum_record(n, l, spec, geom, &shifted)?,
        spectrum_record(n, partner_l as u32, spec, geom, flux)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub alpha: f64,
    pub n: u32,
    /// `(l, E_{n,l})`, sorted by `l`.
    pub levels: Vec<(u32, f64)>,
    /// Pairs `(l1, l2)` with `|E_{n,l1} - E_{n,l2}| < tol`.
    pub collisions: Vec<(u32, u32)>,
}

/// Unconstrained levels `l = 0 ..= l_max` at fixed `n`, flagging
/// near-coincidences.
pub fn degeneracy_report(
    n: u32,
    l_max: u32,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
    tol: f64,
) -> Result<DegeneracyReport> {
    if l_max < 1 {
        return Err(Error::Config("l_max: must be at least 1".into()));
    }
    let levels = (0..=l_max)
        .map(|l| Ok((l, energy_general_potential(n, l, spec, geom, flux)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut collisions = Vec::new();
    for (i, (l1, e1)) in levels.iter().enumerate() {
        for (l2, e2) in &levels[i + 1..] {
            if (e1 - e2).abs() < tol {
                collisions.push((*l1, *l2));
            }
        }
    }
    Ok(DegeneracyReport {
        alpha: geom.alpha(),
        n,
        levels,
        collisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn flat() -> DefectGeometry {
        DefectGeometry::flat(1.0).unwrap()
    }

    #[test]
    fn energy_mie_examples() {
        let none = FluxField::none();
        let spec = PotentialSpec::mie_oscillator(0.5, 0.0, 0.0, 0.0);
        assert_eq!(energy_mie(1, 0, &spec, &flat(), &none).unwrap(), 2.5);
        let spec = PotentialSpec::mie_oscillator(0.5, 0.0, 0.0, 2.0);
        assert_eq!(energy_mie(1, 0, &spec, &flat(), &none).unwrap(), 4.5);

        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let flux = FluxField::new(0.75).unwrap();
        let spec = PotentialSpec::mie_oscillator(1.0, 1.0, 1.0, 1.0);
        let expected = 1.0 + 0.75 * 2f64.sqrt() * (2.0 + (2.3125 / 0.5625 + 0.25f64).sqrt());
        assert!(rel(energy_mie(1, 1, &spec, &geom, &flux).unwrap(), expected) < 1e-15);
    }

    #[test]
    fn energy_mie_constrained_examples() {
        let none = FluxField::none();
        let spec = PotentialSpec::mie_oscillator(1.0, 1.0, 0.0, 0.0);
        let r1 = energy_mie_constrained(1, 0, &spec, &flat(), &none).unwrap();
        assert!(rel(r1.constraint.value, 0.5) < 1e-15);
        assert!(rel(r1.energy, 2.5) < 1e-15);
        let r2 = energy_mie_constrained(2, 0, &spec, &flat(), &none).unwrap();
        assert!(rel(r2.constraint.value, 0.02) < 1e-14);
        assert!(rel(r2.energy, 0.7) < 1e-14);
    }

    #[test]
    fn energy_kratzer_examples() {
        let none = FluxField::none();
        let m = MolecularParams { omega: 0.0, d_e: 1.0, r0: 1.0, eta_c: 0.0 };
        let r = energy_kratzer(1, 0, &m, &flat(), &none, false).unwrap();
        assert_eq!(r.angular_index, 1.5);
        assert!(rel(r.constraint.value, 2.0) < 1e-15);
        assert!(rel(r.energy, 7.0) < 1e-15);
        let r = energy_kratzer(1, 0, &m, &flat(), &none, true).unwrap();
        assert!(rel(r.energy, 8.0) < 1e-15);
        let r = energy_kratzer(2, 0, &m, &flat(), &none, false).unwrap();
        assert!(rel(r.constraint.value, 1.0 / 2.25) < 1e-15);
        assert!((r.constraint.value - 0.4444).abs() < 1e-4);
        assert!(rel(r.energy, 2.0) < 1e-15);
    }

    #[test]
    fn energy_coulomb_examples() {
        let none = FluxField::none();
        let r = energy_coulomb(1, 0, 1.0, &flat(), &none).unwrap();
        assert_eq!(r.angular_index, 0.5);
        assert!(rel(r.constraint.value, 1.0) < 1e-15);
        assert!(rel(r.energy, 2.5) < 1e-15);
        let r = energy_coulomb(2, 0, 1.0, &flat(), &none).unwrap();
        assert!(rel(r.constraint.value, 0.2) < 1e-15);
        assert!(rel(r.energy, 0.7) < 1e-15);
        assert!(energy_coulomb(1, 0, 0.0, &flat(), &none).is_err());
    }

    #[test]
    fn coulomb_zero_flux_limit_is_continuous() {
        let geom = DefectGeometry::new(0.8, 1.2).unwrap();
        let reference = energy_coulomb(1, 1, 0.7, &geom, &FluxField::none()).unwrap().energy;
        let tiny = energy_coulomb(1, 1, 0.7, &geom, &FluxField::new(1e-12).unwrap()).unwrap().energy;
        assert!(rel(tiny, reference) < 1e-10);
    }

    #[test]
    fn general_potential_examples() {
        let none = FluxField::none();
        let spec = PotentialSpec::general(0.5, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(energy_general_potential(1, 0, &spec, &flat(), &none).unwrap(), 2.0);

        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let fig2a = PotentialSpec::general(1.0, 1.0, 1.0, 1.0, 1.0);
        let e = energy_general_potential(1, 1, &fig2a, &geom, &FluxField::new(0.75).unwrap()).unwrap();
        // 1 + 0.75 sqrt(2) (2 + j) - 1/4 with j = sqrt(2.3125 / 0.5625 + 1/4)
        let j = (2.3125f64 / 0.5625 + 0.25).sqrt();
        assert!(rel(e, 1.0 + 0.75 * 2f64.sqrt() * (2.0 + j) - 0.25) < 1e-15);
    }

    #[test]
    fn flux_shift_examples() {
        let geom = DefectGeometry::new(0.7, 1.0).unwrap();
        let flux = FluxField::new(0.25).unwrap();
        let mie = PotentialSpec::mie_oscillator(1.0, 0.8, 0.3, 0.0);
        let (a, b) = flux_shift_identity(1, 1, &mie, &geom, &flux, 1).unwrap();
        assert!(rel(a.energy, b.energy) < 1e-14);
        let (a, b) = flux_shift_identity(1, 1, &mie, &geom, &flux, 0).unwrap();
        assert_eq!(a, b);
        let kratzer = PotentialSpec::kratzer(1.0, 1.0, 1.0);
        let (a, b) = flux_shift_identity(2, 2, &kratzer, &geom, &flux, 2).unwrap();
        assert!(rel(a.energy, b.energy) < 1e-14);
        assert!(rel(a.constraint.value, b.constraint.value) < 1e-14);
        assert!(matches!(
            flux_shift_identity(1, 0, &mie, &geom, &flux, 1),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn degeneracy_examples() {
        let none = FluxField::none();
        let osc = PotentialSpec::mie_oscillator(0.5, 0.0, 0.0, 0.0);
        let rep = degeneracy_report(1, 5, &osc, &flat(), &none, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!(rep.collisions.is_empty());
        assert!(rep.levels.windows(2).all(|w| w[1].1 > w[0].1));

        let half = DefectGeometry::new(0.5, 1.0).unwrap();
        let e1 = energy_mie(1, 2, &osc, &flat(), &none).unwrap();
        let e2 = energy_mie(1, 2, &osc, &half, &none).unwrap();
        assert_ne!(e1, e2);

        let one = FluxField::new(1.0).unwrap();
        for l in 0..4 {
            let shifted = energy_mie(1, l + 1, &osc, &flat(), &one).unwrap();
            let base = energy_mie(1, l, &osc, &flat(), &none).unwrap();
            assert!(rel(shifted, base) < 1e-15);
        }
        // l and l' = -(l+1) share l'(l'+1): integer flux creates exact collisions.
        let rep = degeneracy_report(1, 3, &osc, &flat(), &FluxField::new(1.0).unwrap(), 1e-12).unwrap();
        assert_eq!(rep.collisions, vec![(0, 1)]);
    }

    #[test]
    fn general_n_path_reproduces_closed_forms() {
        let geom = DefectGeometry::new(0.6, 1.4).unwrap();
        let flux = FluxField::new(0.5).unwrap();
        let spec = PotentialSpec::mie_oscillator(1.0, -0.9, 0.4, 0.2);
        for n in 1..=2 {
            let closed = energy_mie_constrained(n, 1, &spec, &geom, &flux).unwrap();
            let generic = constrained_record(n, 1, &spec, &geom, &flux).unwrap();
            assert!(rel(generic.constraint.value, closed.constraint.value) < 1e-12);
            assert!(rel(generic.energy, closed.energy) < 1e-12);
            assert!(rel(generic.kappa, closed.kappa) < 1e-12);
        }
    }

    #[test]
    fn linear_term_constrains_beta_m1() {
        let geom = DefectGeometry::new(0.75, 1.0).unwrap();
        let flux = FluxField::new(0.75).unwrap();
        let spec = PotentialSpec::general(1.0, 1.0, -1.0, 1.0, 1.0);
        let rec = constrained_record(1, 1, &spec, &geom, &flux).unwrap();
        assert_eq!(rec.constraint.param, ConstrainedParam::BetaM1);
        assert!(rec.constraint.value < 0.0);
        assert!(rec.chi > 0.0);
        let sol = rec.heun_solution();
        assert!(sol.truncation_certificate() < 1e-12);
        // Positive beta_m1 is not reachable for n = 1 here.
        let repulsive = PotentialSpec::general(1.0, 1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            constrained_record(1, 1, &repulsive, &geom, &flux),
            Err(Error::NoTruncationRoot { .. })
        ));
        let all = constrained_records_all(1, 1, &spec, &geom, &flux).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn pseudoharmonic_uses_the_zero_root() {
        let spec = PotentialSpec::pseudoharmonic(0.7, 0.5, 0.0);
        let rec = constrained_record(2, 0, &spec, &flat(), &FluxField::none()).unwrap();
        assert_eq!(rec.kappa, 0.0);
        assert_eq!(rec.constraint.value, 0.7);
        assert!(matches!(
            constrained_record(1, 0, &spec, &flat(), &FluxField::none()),
            Err(Error::NoTruncationRoot { .. })
        ));
    }

    #[test]
    fn tuned_spec_substitutes_the_constraint() {
        let none = FluxField::none();
        let k = PotentialSpec::kratzer(9.0, 1.0, 1.0);
        let rec = spectrum_record(1, 0, &k, &flat(), &none).unwrap();
        let tuned = rec.tuned_spec(&k).unwrap();
        assert!(rel(tuned.molecular.unwrap().omega, 2.0) < 1e-15);
        let mie = PotentialSpec::mie_oscillator(3.0, 1.0, 0.0, 0.0);
        let rec = spectrum_record(1, 0, &mie, &flat(), &none).unwrap();
        assert!(rel(rec.tuned_spec(&mie).unwrap().beta, 0.5) < 1e-15);
        // The tuned potential reproduces the energy through the unconstrained formula.
        let e = energy_mie(1, 0, &rec.tuned_spec(&mie).unwrap(), &flat(), &none).unwrap();
        assert!(rel(e, rec.energy) < 1e-14);
    }
}
