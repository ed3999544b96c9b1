//! Independent finite-difference eigen-solver for the radial equation
//! `psi'' + (1/alpha^2)[2M(E - V) - l'(l'+1)/r^2] psi = 0`.
//!
//! The problem is discretised in `t = ln r` with `psi = e^{t/2} phi`, which
//! turns it into the symmetric pencil
//! `-(alpha^2/2M) phi'' + [(alpha^2/4 + l'(l'+1))/(2M) + r^2 V] phi = E r^2 phi`.
//! On a uniform `t` grid the `r^{j+1/2}` behaviour at the origin becomes a
//! plain exponential, so second-order convergence holds for every `j >= 0`.
//! The inner end carries the regular-solution condition `phi' = j phi`
//! (corrected to first order in `r`, finite-volume half cell); the outer end is Dirichlet.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heun::{angular_index_reduced, assemble_wavefunction, radial_parameters};
use crate::model::{
    centrifugal, effective_orbital, reduce_potential, DefectGeometry, FluxField, PotentialSpec,
};
use crate::spectra::SpectrumRecord;

pub const MIN_POINTS: usize = 200;
/// Relative change of the extrapolated eigenvalues that stops grid doubling.
pub const REFINEMENT_TOL: f64 = 1e-8;
/// `rel_gap` threshold for a certified level.
pub const CERTIFY_TOL: f64 = 1e-6;
const MAX_LEVELS: usize = 9;
const BASE_STEP: f64 = 0.02;
const TAIL_TOL: f64 = 1e-8;

/// Logarithmically uniform radial grid on `[r_min, r_max]`, both ends
/// included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid: need 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if points < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid.points: need at least {MIN_POINTS}, got {points}"
            )));
        }
        Ok(Self { r_min, r_max, points })
    }

    /// Step in `ln r`.
    pub fn spacing(&self) -> f64 {
        (self.r_max / self.r_min).ln() / (self.points - 1) as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        let (t0, h) = (self.r_min.ln(), self.spacing());
        (0..self.points).map(|i| (t0 + h * i as f64).exp()).collect()
    }

    /// Same domain with every interval halved.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }

    /// Default domain for levels up to `energy`: `r_min` far inside the
    /// centrifugal region, `r_max` three outer turning radii out.
    pub fn auto(
        spec: &PotentialSpec,
        geom: &DefectGeometry,
        l: u32,
        flux: &FluxField,
        energy: f64,
    ) -> Result<Self> {
        let problem = Problem::new(spec, geom, l, flux)?;
        Ok(problem.auto_grid(energy))
    }
}

/// Lowest eigenpairs of the radial problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectrum {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Radii of the finest grid (outer Dirichlet node excluded).
    pub radii: Vec<f64>,
    /// Reduced eigenfunctions `psi(r)` on `radii`, `int psi^2 dr = 1`,
    /// positive near the origin.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Finest grid used.
    pub grid: RadialGrid,
    /// Number of grid doublings performed.
    pub levels: usize,
    /// Last relative change of the extrapolated eigenvalues.
    pub refinement_change: f64,
    /// Largest relative eigenvalue shift when `r_min` is halved.
    pub boundary_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub target_energy: f64,
    pub matched_energy: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    /// Interior nodes of the analytic wavefunction.
    pub node_count: usize,
    /// 0-based position of the matched eigenvalue.
    pub spectral_index: usize,
    pub residual_norm: f64,
    /// Matched level recomputed by Numerov shooting.
    pub numerov_energy: f64,
    pub numerov_gap: f64,
    pub boundary_shift: f64,
    pub converged: bool,
}

/// Reduced radial problem in the log variable.
#[derive(Debug, Clone, Copy)]
struct Problem {
    reduced: PotentialSpec,
    alpha: f64,
    mass: f64,
    centrifugal: f64,
    j: f64,
}

impl Problem {
    fn new(spec: &PotentialSpec, geom: &DefectGeometry, l: u32, flux: &FluxField) -> Result<Self> {
        let reduced = reduce_potential(spec, geom.mass())?;
        if !(reduced.beta > 0.0) {
            return Err(Error::NonConfining(format!(
                "beta = {} (the oscillator term must be positive)",
                reduced.beta
            )));
        }
        let l_eff = effective_orbital(l, flux);
        let j = angular_index_reduced(&reduced, geom, l_eff)?;
        Ok(Self {
            reduced,
            alpha: geom.alpha(),
            mass: geom.mass(),
            centrifugal: centrifugal(l_eff),
            j,
        })
    }

    /// `alpha^2 / 2M`, the kinetic coefficient.
    fn kinetic(&self) -> f64 {
        self.alpha * self.alpha / (2.0 * self.mass)
    }

    /// `(alpha^2/4 + l'(l'+1))/(2M) + r^2 V(r)`.
    fn weight(&self, r: f64) -> f64 {
        let p = &self.reduced;
        let r2 = r * r;
        (0.25 * self.alpha * self.alpha + self.centrifugal) / (2.0 * self.mass)
            + p.beta * r2 * r2
            + p.beta1 * r2 * r
            + p.v0 * r2
            + p.beta_m1 * r
            + p.beta_m2
    }

    /// Effective potential in energy units, `V + l'(l'+1)/(2 M r^2)`, scaled
    /// so its zero crossings with `E` are the classical turning points.
    fn effective(&self, r: f64) -> f64 {
        let p = &self.reduced;
        let v = p.beta * r * r + p.beta1 * r + p.v0 + p.beta_m1 / r + p.beta_m2 / (r * r);
        v + self.centrifugal / (2.0 * self.mass * r * r)
    }

    /// Oscillator length `gamma2^{-1/4}`.
    fn length(&self) -> f64 {
        let gamma2 = 2.0 * self.mass * self.reduced.beta / (self.alpha * self.alpha);
        gamma2.powf(-0.25)
    }

    /// Log-derivative `d ln phi / dt` of the regular solution at `r`, from
    /// `psi ~ r^{j+1/2} (1 + a1 r)` with `a1 = gamma_{-1} / (1 + 2j)`.
    fn regular_slope(&self, r: f64) -> f64 {
        let ar = self.frobenius_a1() * r;
        self.j + ar / (1.0 + ar)
    }

    fn frobenius_a1(&self) -> f64 {
        let gamma_m1 = 2.0 * self.mass * self.reduced.beta_m1 / (self.alpha * self.alpha);
        gamma_m1 / (1.0 + 2.0 * self.j)
    }

    /// Rough energy of the `k`-th level (pseudoharmonic ladder).
    fn level_estimate(&self, k: usize) -> f64 {
        let p = &self.reduced;
        let omega = (2.0 * p.beta / self.mass).sqrt();
        p.v0 - p.beta1 * p.beta1 / (4.0 * p.beta)
            + self.alpha * omega * (2.0 * k as f64 + 1.0 + self.j)
    }

    fn outer_turning(&self, energy: f64) -> f64 {
        let len = self.length();
        let samples = 400;
        let r_at = |i: usize| len * 1e-4 * 1e6f64.powf(i as f64 / samples as f64);
        let last_inside = (0..=samples).rev().find(|&i| self.effective(r_at(i)) < energy);
        let Some(i) = last_inside else {
            // Energy below the well bottom: use the minimum as the scale.
            return (0..=samples)
                .map(r_at)
                .min_by(|a, b| self.effective(*a).total_cmp(&self.effective(*b)))
                .unwrap_or(len);
        };
        if i == samples {
            return r_at(samples);
        }
        let (mut lo, mut hi) = (r_at(i), r_at(i + 1));
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.effective(mid) < energy {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn auto_grid(&self, energy: f64) -> RadialGrid {
        let len = self.length();
        let r_turn = self.outer_turning(energy);
        let r_max = (3.0 * r_turn).max(r_turn + 7.0 * len);
        let r_min = 1e-7 * len.min(r_turn);
        let points = (((r_max / r_min).ln() / BASE_STEP).ceil() as usize + 1).max(MIN_POINTS);
        RadialGrid { r_min, r_max, points }
    }

    fn pencil(&self, grid: &RadialGrid) -> Pencil {
        let h = grid.spacing();
        let a = self.kinetic();
        let t0 = grid.r_min.ln();
        // The last node carries the Dirichlet condition and is dropped.
        let n = grid.points - 1;
        let mut radii = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        let mut mass = Vec::with_capacity(n);
        for i in 0..n {
            let r = (t0 + h * i as f64).exp();
            let w = self.weight(r);
            if i == 0 {
                diag.push(a / h + a * self.regular_slope(r) + 0.5 * h * w);
                mass.push(0.5 * h * r * r);
            } else {
                diag.push(2.0 * a / h + h * w);
                mass.push(h * r * r);
            }
            radii.push(r);
        }
        Pencil {
            radii,
            diag,
            mass,
            off: -a / h,
        }
    }
}

/// Symmetric tridiagonal pencil `A - lambda B` with constant off-diagonal and
/// diagonal `B`.
struct Pencil {
    radii: Vec<f64>,
    diag: Vec<f64>,
    mass: Vec<f64>,
    off: f64,
}

const TINY: f64 = 1e-300;

impl Pencil {
    /// Number of eigenvalues strictly below `lambda` (Sylvester inertia of
    /// the LDL^T factorisation).
    fn count_below(&self, lambda: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (i, (a, b)) in self.diag.iter().zip(&self.mass).enumerate() {
            d = a - lambda * b - if i == 0 { 0.0 } else { off2 / d };
            if d == 0.0 {
                d = -TINY;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th eigenvalue (0-based), starting from a guess and half-width.
    fn eigenvalue(&self, k: usize, guess: f64, width: f64) -> f64 {
        let mut w = width.max(1e-12 * guess.abs()).max(1e-300);
        let mut lo = guess - w;
        while self.count_below(lo) > k {
            lo -= w;
            w *= 2.0;
        }
        let mut w = width.max(1e-12 * guess.abs()).max(1e-300);
        let mut hi = guess + w;
        while self.count_below(hi) < k + 1 {
            hi += w;
            w *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an accurate eigenvalue by a twisted factorisation;
    /// returns `phi` on the nodes.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let d: Vec<f64> = self.diag.iter().zip(&self.mass).map(|(a, b)| a - lambda * b).collect();
        let e = self.off;
        let guard = |x: f64| if x == 0.0 { TINY } else { x };
        let mut fwd = vec![0.0; n];
        fwd[0] = guard(d[0]);
        for i in 1..n {
            fwd[i] = guard(d[i] - e * e / fwd[i - 1]);
        }
        let mut bwd = vec![0.0; n];
        bwd[n - 1] = guard(d[n - 1]);
        for i in (0..n - 1).rev() {
            bwd[i] = guard(d[i] - e * e / bwd[i + 1]);
        }
        let twist = (0..n)
            .min_by(|&a, &b| {
                let ga = (fwd[a] + bwd[a] - d[a]).abs();
                let gb = (fwd[b] + bwd[b] - d[b]).abs();
                ga.total_cmp(&gb)
            })
            .unwrap_or(0);
        let mut z = vec![0.0; n];
        z[twist] = 1.0;
        for i in (0..twist).rev() {
            z[i] = -e * z[i + 1] / fwd[i];
        }
        for i in twist + 1..n {
            z[i] = -e * z[i - 1] / bwd[i];
        }
        z
    }

    /// `psi = sqrt(r) phi`, normalised and made positive near the origin.
    fn reduced_eigenfunction(&self, phi: &[f64]) -> Vec<f64> {
        let norm: f64 = phi.iter().zip(&self.mass).map(|(p, m)| m * p * p).sum::<f64>().sqrt();
        let peak = phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let first = phi
            .iter()
            .copied()
            .find(|p| p.abs() > 1e-8 * peak)
            .unwrap_or(1.0);
        let s = first.signum() / norm;
        phi.iter().zip(&self.radii).map(|(p, r)| s * p * r.sqrt()).collect()
    }
}

fn eigen_ladder(pencil: &Pencil, count: usize, previous: Option<(&[f64], f64)>, problem: &Problem) -> Vec<f64> {
    (0..count)
        .map(|k| match previous {
            Some((prev, width)) => pencil.eigenvalue(k, prev[k], width.max(1e-10 * prev[k].abs())),
            None => {
                let guess = problem.level_estimate(k);
                pencil.eigenvalue(k, guess, 0.1 * (guess.abs() + 1.0))
            }
        })
        .collect()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Lowest `count` eigenpairs, grid-converged by doubling with Richardson
/// extrapolation. `grid = None` picks the domain automatically and widens it
/// until the eigenfunction tails are negligible at `r_max`.
pub fn solve_radial_spectrum(
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    l: u32,
    flux: &FluxField,
    grid: Option<&RadialGrid>,
    count: usize,
) -> Result<RadialSpectrum> {
    let problem = Problem::new(spec, geom, l, flux)?;
    if count == 0 {
        return Err(Error::Config("count: need at least one eigenvalue".into()));
    }
    let top = problem.level_estimate(count - 1);
    let mut base = match grid {
        Some(g) => RadialGrid::new(g.r_min, g.r_max, g.points)?,
        None => problem.auto_grid(top + 0.5 * (top - problem.level_estimate(0)).abs()),
    };

    let mut coarse;
    let mut tries = 0;
    loop {
        let pencil = problem.pencil(&base);
        coarse = eigen_ladder(&pencil, count, None, &problem);
        if grid.is_some() || tries >= 6 {
            break;
        }
        // Widen while any eigenfunction is still visible in the outer fifth.
        let cutoff = 0.8 * base.r_max;
        let leaky = coarse.iter().any(|&e| {
            let psi = pencil.reduced_eigenfunction(&pencil.eigenvector(e));
            let peak = psi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let tail = psi
                .iter()
                .zip(&pencil.radii)
                .filter(|(_, r)| **r >= cutoff)
                .fold(0.0f64, |m, (p, _)| m.max(p.abs()));
            tail > TAIL_TOL * peak
        });
        if !leaky {
            break;
        }
        let t_range = (base.r_max / base.r_min).ln();
        base.r_max *= 1.5;
        base.points = ((base.points - 1) as f64 * (base.r_max / base.r_min).ln() / t_range).ceil() as usize + 1;
        tries += 1;
    }

    let boundary_shift = {
        // Extend inward by whole steps so the shared nodes coincide.
        let h = base.spacing();
        let extra = (std::f64::consts::LN_2 / h).round().max(1.0) as usize;
        let wider = RadialGrid {
            r_min: (base.r_min.ln() - extra as f64 * h).exp(),
            r_max: base.r_max,
            points: base.points + extra,
        };
        let shifted = eigen_ladder(&problem.pencil(&wider), count, Some((&coarse, 1e-6)), &problem);
        shifted
            .iter()
            .zip(&coarse)
            .map(|(a, b)| relative(*a, *b))
            .fold(0.0, f64::max)
    };

    let mut level_grid = base;
    let mut raw = coarse;
    let mut extrapolated: Option<Vec<f64>> = None;
    let mut change = f64::INFINITY;
    let mut levels = 0;
    let mut pencil = problem.pencil(&level_grid);
    while levels < MAX_LEVELS {
        level_grid = level_grid.refined();
        levels += 1;
        pencil = problem.pencil(&level_grid);
        let width = raw
            .iter()
            .zip(extrapolated.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let fine = eigen_ladder(&pencil, count, Some((&raw, 2.0 * width)), &problem);
        let next: Vec<f64> = fine.iter().zip(&raw).map(|(f, c)| f + (f - c) / 3.0).collect();
        if let Some(prev) = &extrapolated {
            change = next.iter().zip(prev).map(|(a, b)| relative(*a, *b)).fold(0.0, f64::max);
        }
        raw = fine;
        extrapolated = Some(next);
        if change < REFINEMENT_TOL {
            break;
        }
    }
    if !(change < REFINEMENT_TOL) {
        return Err(Error::NotConverged(format!(
            "eigenvalues still move by {change:.3e} after {levels} grid doublings \
             ({} points)",
            level_grid.points
        )));
    }
    let energies = extrapolated.unwrap_or(raw);
    let eigenfunctions = energies
        .iter()
        .map(|&e| pencil.reduced_eigenfunction(&pencil.eigenvector(e)))
        .collect();
    Ok(RadialSpectrum {
        energies,
        radii: pencil.radii.clone(),
        eigenfunctions,
        grid: level_grid,
        levels,
        refinement_change: change,
        boundary_shift,
    })
}

/// Number of strict sign changes over interior samples, ignoring values
/// below `1e-12 max|psi|`.
pub fn count_nodes(values: &[f64]) -> usize {
    if values.len() < 3 {
        return 0;
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * peak;
    let mut sign = 0.0;
    let mut nodes = 0;
    for &v in &values[1..values.len() - 1] {
        if v.abs() < floor || v == 0.0 {
            continue;
        }
        let s = v.signum();
        if sign != 0.0 && s != sign {
            nodes += 1;
        }
        sign = s;
    }
    nodes
}

/// Max-norm residual of the radial equation for `psi` at `energy` on the
/// interior of `grid`.
///
/// The second derivative is a centred difference in `t = ln r` applied to
/// `phi = psi / sqrt(r)`, where the equation reads
/// `phi_tt - phi/4 + r^2 Q phi = 0`. Each point is divided by the sum of the
/// magnitudes of the terms in `r^2 Q + 1/4` and by `max|phi|`, so the result
/// is a relative truncation error of order `h^2`.
pub fn ode_residual(
    psi: &dyn Fn(f64) -> f64,
    energy: f64,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    l: u32,
    flux: &FluxField,
    grid: &RadialGrid,
) -> Result<f64> {
    let reduced = reduce_potential(spec, geom.mass())?;
    let lc = centrifugal(effective_orbital(l, flux));
    let (m, a2) = (geom.mass(), geom.alpha() * geom.alpha());
    let h = grid.spacing();
    let radii = grid.radii();
    let phi: Vec<f64> = radii.iter().map(|&r| psi(r) / r.sqrt()).collect();
    let peak = phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::Domain("psi must be finite and not identically zero".into()));
    }
    let p = &reduced;
    let mut worst = 0.0f64;
    for i in 1..radii.len() - 1 {
        let r = radii[i];
        let r2 = r * r;
        let r2v = p.beta * r2 * r2 + p.beta1 * r2 * r + p.v0 * r2 + p.beta_m1 * r + p.beta_m2;
        let r2q = (2.0 * m * (energy * r2 - r2v) - lc) / a2;
        let scale = 0.25
            + (2.0 * m
                * (energy.abs() * r2
                    + p.beta.abs() * r2 * r2
                    + p.beta1.abs() * r2 * r
                    + p.v0.abs() * r2
                    + p.beta_m1.abs() * r
                    + p.beta_m2.abs())
                + lc.abs())
                / a2;
        let d2 = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h);
        let res = (d2 - 0.25 * phi[i] + r2q * phi[i]).abs() / (scale * peak);
        worst = worst.max(res);
    }
    Ok(worst)
}

/// [`ode_residual`] on `grid` and on two successive halvings of its step.
#[allow(clippy::too_many_arguments)]
pub fn ode_residual_refinement(
    psi: &dyn Fn(f64) -> f64,
    energy: f64,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    l: u32,
    flux: &FluxField,
    grid: &RadialGrid,
) -> Result<[f64; 3]> {
    let g1 = grid.refined();
    let g2 = g1.refined();
    Ok([
        ode_residual(psi, energy, spec, geom, l, flux, grid)?,
        ode_residual(psi, energy, spec, geom, l, flux, &g1)?,
        ode_residual(psi, energy, spec, geom, l, flux, &g2)?,
    ])
}

/// Numerov shooting in `t`: outward from the regular end, inward from the
/// Dirichlet end, matched at node `mid`. Returns the mismatch of the
/// normalised discrete log-derivatives.
fn numerov_mismatch(problem: &Problem, pencil_radii: &[f64], h: f64, r_max: f64, mid: usize, energy: f64) -> f64 {
    let a = problem.kinetic();
    let n = pencil_radii.len();
    let r_at = |i: usize| if i < n { pencil_radii[i] } else { r_max };
    let g = |i: usize| {
        let r = r_at(i);
        (problem.weight(r) - energy * r * r) / a
    };
    let c = h * h / 12.0;
    let step = |p0: f64, p1: f64, g0: f64, g1: f64, g2: f64| {
        (2.0 * p1 * (1.0 + 5.0 * c * g1) - p0 * (1.0 - c * g0)) / (1.0 - c * g2)
    };

    let (r0, r1) = (pencil_radii[0], pencil_radii[1]);
    let lead = |r: f64| r.powf(problem.j) * (1.0 + problem.frobenius_a1() * r);
    let (mut u0, mut u1) = (1.0, lead(r1) / lead(r0));
    for i in 1..=mid {
        let u2 = step(u0, u1, g(i - 1), g(i), g(i + 1));
        u0 = u1;
        u1 = u2;
        if u1.abs() > 1e150 {
            u0 /= 1e150;
            u1 /= 1e150;
        }
    }
    // u0 = phi[mid], u1 = phi[mid + 1]
    let (mut v1, mut v0) = (0.0, 1.0);
    // v1 at node n (the Dirichlet end), v0 at n - 1; march down to mid.
    let mut i = n - 1;
    while i > mid {
        let v2 = step(v1, v0, g(i + 1), g(i), g(i - 1));
        v1 = v0;
        v0 = v2;
        i -= 1;
        if v0.abs() > 1e150 {
            v0 /= 1e150;
            v1 /= 1e150;
        }
    }
    // v0 = phi[mid], v1 = phi[mid + 1]
    u1 / u0 - v1 / v0
}

/// Eigenvalue near `guess` by Numerov shooting on the node set of `grid`.
fn numerov_eigenvalue(problem: &Problem, grid: &RadialGrid, guess: f64, mid: usize) -> Option<f64> {
    let radii: Vec<f64> = {
        let mut r = grid.radii();
        r.pop();
        r
    };
    let h = grid.spacing();
    let f = |e: f64| numerov_mismatch(problem, &radii, h, grid.r_max, mid, e);
    let mut w = 1e-7 * guess.abs().max(1e-3);
    let (mut lo, mut hi) = (guess - w, guess + w);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    let mut tries = 0;
    while flo.signum() == fhi.signum() {
        tries += 1;
        if tries > 30 {
            return None;
        }
        w *= 2.0;
        lo = guess - w;
        hi = guess + w;
        flo = f(lo);
        fhi = f(hi);
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let fm = f(m);
        if !fm.is_finite() {
            return None;
        }
        if fm.signum() == flo.signum() {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Certifies an analytic level: solves the tuned radial problem, matches the
/// analytic energy to the nearest eigenvalue and checks that its position in
/// the spectrum equals the node count of the analytic wavefunction.
pub fn verify_analytic(
    record: &SpectrumRecord,
    spec: &PotentialSpec,
    geom: &DefectGeometry,
    flux: &FluxField,
    grid: Option<&RadialGrid>,
) -> Result<OracleReport> {
    let tuned = record.tuned_spec(spec)?;
    let count = record.n as usize + 2;
    let spectrum = solve_radial_spectrum(&tuned, geom, record.l, flux, grid, count)?;
    let target = record.energy;
    let (index, matched) = spectrum
        .energies
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .ok_or_else(|| Error::NotConverged("empty spectrum".into()))?;
    let abs_gap = (matched - target).abs();
    let rel_gap = abs_gap / target.abs().max(f64::MIN_POSITIVE);

    let rp = radial_parameters(&tuned, geom, record.l, flux, target)?;
    let wave = assemble_wavefunction(&record.heun_solution(), &rp).normalized();
    let samples: Vec<f64> = spectrum.radii.iter().map(|&r| wave.eval(r)).collect();
    let node_count = count_nodes(&samples);

    let residual_grid = RadialGrid {
        r_min: spectrum.grid.r_min,
        r_max: spectrum.grid.r_max,
        points: 4000,
    };
    let residual_norm = ode_residual(
        &|r| wave.eval(r),
        target,
        &tuned,
        geom,
        record.l,
        flux,
        &residual_grid,
    )?;

    let problem = Problem::new(&tuned, geom, record.l, flux)?;
    let psi = &spectrum.eigenfunctions[index];
    let mid = psi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(psi.len() / 2)
        .clamp(1, psi.len().saturating_sub(3));
    let numerov_energy = numerov_eigenvalue(&problem, &spectrum.grid, matched, mid).unwrap_or(f64::NAN);
    let numerov_gap = relative(numerov_energy, matched);

    let converged = rel_gap <= CERTIFY_TOL && index == node_count;
    Ok(OracleReport {
        target_energy: target,
        matched_energy: matched,
        abs_gap,
        rel_gap,
        node_count,
        spectral_index: index,
        residual_norm,
        numerov_energy,
        numerov_gap,
        boundary_shift: spectrum.boundary_shift,
        converged,
    })
}
