//! Transparency, swapping and bath-engineering scenarios built on the two engines.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{self, BsMethod, FockTensor4, TwoModeAmplitudes};
use crate::gaussian::{
    self, bs_pair_symplectic, entanglement_of_formation, evolve_covariance,
    four_mode_input_covariance, min_ppt_symplectic_eigenvalue, reduce, twb_covariance,
    ModePartition, QuadratureCovariance,
};

/// Two beam splitters: `phi` mixes modes (1,4), `psi` mixes modes (2,3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterPair {
    pub phi: f64,
    pub psi: f64,
}

impl BeamSplitterPair {
    pub fn new(phi: f64, psi: f64) -> Self {
        Self { phi, psi }
    }

    pub fn balanced() -> Self {
        Self::new(FRAC_PI_4, FRAC_PI_4)
    }

    /// `(T₁₄, T₂₃) = (cos²φ, cos²ψ)`.
    pub fn transmissivities(&self) -> (f64, f64) {
        (self.phi.cos().powi(2), self.psi.cos().powi(2))
    }
}

/// Symmetric loss modelled by two equal beam splitters, `φ = arccos √(1−Γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossChannel {
    gamma: f64,
}

impl LossChannel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::LossOutOfRange(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn angle(&self) -> f64 {
        (1.0 - self.gamma).sqrt().acos()
    }

    pub fn pair(&self) -> BeamSplitterPair {
        let a = self.angle();
        BeamSplitterPair::new(a, a)
    }
}

/// Squeezing amplitudes of the output state on the pairs 12, 34, 13 and 24.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputTwbCoefficients {
    pub c12: f64,
    pub c34: f64,
    pub c13: f64,
    pub c24: f64,
}

pub fn output_twb_coefficients(r: f64, s: f64, phi: f64, psi: f64) -> OutputTwbCoefficients {
    let (sp, cp) = phi.sin_cos();
    let (ss, cs) = psi.sin_cos();
    OutputTwbCoefficients {
        c12: r * cp * cs + s * sp * ss,
        c34: r * sp * ss + s * cp * cs,
        c13: r * cp * ss - s * sp * cs,
        c24: r * sp * cs - s * cp * ss,
    }
}

/// Output covariance of the four modes for TWB inputs `r`, `s`.
pub fn output_covariance(r: f64, s: f64, pair: BeamSplitterPair) -> Result<QuadratureCovariance> {
    evolve_covariance(
        &four_mode_input_covariance(r, s),
        &bs_pair_symplectic(pair.phi, pair.psi),
    )
}

fn reduced_output(r: f64, s: f64, pair: BeamSplitterPair, h: usize, k: usize) -> Result<QuadratureCovariance> {
    reduce(&output_covariance(r, s, pair)?, ModePartition::new(h, k)?)
}

/// `n` uniform points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const DEFAULT_X_POINTS: usize = 81;
pub const DEFAULT_S_POINTS: usize = 51;

pub fn default_x_grid() -> Vec<f64> {
    linspace(-1.0, 1.0, DEFAULT_X_POINTS)
}

pub fn default_s_grid(r: f64) -> Vec<f64> {
    linspace(0.0, 1.5 * r, DEFAULT_S_POINTS)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub x: f64,
    pub kappa12: f64,
    pub kappa13: f64,
}

/// κ̃₋ of the reduced states (1,2) and (1,3) for `s = x·r`.
pub fn separability_scan(r: f64, x_grid: &[f64], pair: BeamSplitterPair) -> Result<Vec<ScanRow>> {
    if !(r > 0.0) {
        return Err(Error::NonPositive {
            what: "squeezing r",
            value: r,
        });
    }
    x_grid
        .par_iter()
        .map(|&x| {
            let out = output_covariance(r, x * r, pair)?;
            let k12 = min_ppt_symplectic_eigenvalue(&reduce(&out, ModePartition::new(1, 2)?)?)?;
            let k13 = min_ppt_symplectic_eigenvalue(&reduce(&out, ModePartition::new(1, 3)?)?)?;
            Ok(ScanRow {
                x,
                kappa12: k12,
                kappa13: k13,
            })
        })
        .collect()
}

/// Contiguous runs of scan points where both (1,2) and (1,3) are entangled.
pub fn jointly_entangled_intervals(rows: &[ScanRow]) -> Vec<(f64, f64)> {
    let mut runs = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for row in rows {
        let both = row.kappa12 < gaussian::SEPARABILITY_THRESHOLD
            && row.kappa13 < gaussian::SEPARABILITY_THRESHOLD;
        match (both, start) {
            (true, None) => start = Some(row.x),
            (false, Some(s)) => {
                runs.push((s, last));
                start = None;
            }
            _ => {}
        }
        last = row.x;
    }
    if let Some(s) = start {
        runs.push((s, last));
    }
    runs
}

/// Fidelity between the input TWB of modes 1,2 and the output reduced state `Σ^(12)`.
pub fn exact_fidelity(r: f64, s: f64, pair: BeamSplitterPair) -> Result<f64> {
    let out = reduced_output(r, s, pair, 1, 2)?;
    Ok(gaussian::gaussian_fidelity(&twb_covariance(r), &out)?.value)
}

/// Second-order expansion in `s − r` at equal angles, as published:
/// `1 − ½[3 + sin²φ cos 2φ](s−r)²`.
pub fn fidelity_expansion_sq(r: f64, s: f64, phi: f64) -> f64 {
    let bracket = 3.0 + phi.sin().powi(2) * (2.0 * phi).cos();
    1.0 - 0.5 * bracket * (s - r).powi(2)
}

/// Second-order expansion in `s − r` at equal angles obtained from the leading term of
/// [`fidelity_expansion_bs`]: `1 − [1 + cos²φ] sin²φ (s−r)²`.
///
/// At equal angles the exact fidelity depends on `sinh²(r−s)` only, so this has a
/// fourth-order error, and it reduces to 1 at `φ = 0` as it must.
pub fn fidelity_expansion_sq_consistent(r: f64, s: f64, phi: f64) -> f64 {
    let c2 = phi.cos().powi(2);
    1.0 - (1.0 + c2) * phi.sin().powi(2) * (s - r).powi(2)
}

/// First-order expansion in `φ − ψ`: `f + f² sin 2φ cos²φ sinh²(r−s) (φ−ψ)`.
pub fn fidelity_expansion_bs(r: f64, s: f64, phi: f64, psi: f64) -> f64 {
    let sh2 = (r - s).sinh().powi(2);
    let f = 1.0 / (1.0 + (1.0 + phi.cos().powi(2)) * phi.sin().powi(2) * sh2);
    f + f * f * (2.0 * phi).sin() * phi.cos().powi(2) * sh2 * (phi - psi)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Perturbations spanning `[1e-3, 1e-1]`, log-uniform.
pub fn perturbation_grid(points: usize) -> Vec<f64> {
    linspace(-3.0, -1.0, points)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

/// Error of an expansion against the exact fidelity at each perturbation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionFit {
    pub perturbations: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// `|F − F_sq|` for `s = r + ε` at equal angles `phi`.
pub fn squeezing_expansion_fit(
    r: f64,
    phi: f64,
    eps: &[f64],
    expansion: fn(f64, f64, f64) -> f64,
) -> Result<ExpansionFit> {
    let errors = eps
        .iter()
        .map(|&e| {
            let s = r + e;
            Ok((exact_fidelity(r, s, BeamSplitterPair::new(phi, phi))? - expansion(r, s, phi)).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionFit {
        slope: loglog_slope(eps, &errors),
        perturbations: eps.to_vec(),
        errors,
    })
}

/// `|F − F_bs|` for `ψ = φ + δ`.
pub fn transmissivity_expansion_fit(r: f64, s: f64, phi: f64, deltas: &[f64]) -> Result<ExpansionFit> {
    let errors = deltas
        .iter()
        .map(|&d| {
            let psi = phi + d;
            Ok((exact_fidelity(r, s, BeamSplitterPair::new(phi, psi))?
                - fidelity_expansion_bs(r, s, phi, psi))
            .abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionFit {
        slope: loglog_slope(deltas, &errors),
        perturbations: deltas.to_vec(),
        errors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryRow {
    pub s: f64,
    pub ef: f64,
    pub purity: f64,
}

/// Entanglement of formation and purity of `ρ^(12)` behind a lossy pair fed by TWB(`s`).
pub fn bath_recovery_curve(r: f64, gamma: f64, s_grid: &[f64]) -> Result<Vec<RecoveryRow>> {
    let pair = LossChannel::new(gamma)?.pair();
    s_grid
        .par_iter()
        .map(|&s| {
            let red = reduced_output(r, s, pair, 1, 2)?;
            let kappa = min_ppt_symplectic_eigenvalue(&red)?;
            Ok(RecoveryRow {
                s,
                ef: entanglement_of_formation(kappa)?,
                purity: gaussian::purity(&red)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Transparent,
    Swapped,
    Generic,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Transparent => "transparent",
            Self::Swapped => "swapped",
            Self::Generic => "generic",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Residual thresholds used to classify a run.
pub const REPORT_RESIDUAL_TOL: f64 = 1e-8;
/// Largest accepted disagreement between the Gaussian and Fock fidelities.
pub const FIDELITY_CROSS_TOL: f64 = 1e-6;

/// Both engines run on the same scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct EntitReport {
    pub r: f64,
    pub s: f64,
    pub pair: BeamSplitterPair,
    pub cutoff: usize,
    /// `‖Σ_out − Σ_in‖∞` for the four-mode covariance.
    pub cm_roundtrip_error: f64,
    /// `‖ψ_out − ψ_in‖` on complete photon-number sectors.
    pub fock_eigen_residual: f64,
    /// `|⟨ψ_in|ψ_out⟩|`, normalized.
    pub overlap: f64,
    /// `|⟨S₁₃(r)S₂₄(r)0|ψ_out⟩|`, normalized.
    pub swap_overlap: f64,
    /// `‖Σ^(13) − Σ₁₃(r)‖∞`.
    pub swap_cm_error: f64,
    pub fidelity_gaussian: f64,
    pub fidelity_fock: f64,
    /// Squared norm discarded by the Fock truncation.
    pub truncation_loss: f64,
    pub classification: Classification,
}

impl EntitReport {
    pub fn fidelity_discrepancy(&self) -> f64 {
        (self.fidelity_gaussian - self.fidelity_fock).abs()
    }

    /// The two fidelity routes agree.
    pub fn consistent(&self) -> bool {
        self.fidelity_discrepancy() <= FIDELITY_CROSS_TOL
    }
}

pub fn entit_report(r: f64, s: f64, pair: BeamSplitterPair, cutoff: usize) -> Result<EntitReport> {
    fock::check_twb_cutoff(r, cutoff, fock::DEFAULT_LEAKAGE_TOL)?;
    fock::check_twb_cutoff(s, cutoff, fock::DEFAULT_LEAKAGE_TOL)?;

    let input = four_mode_input_covariance(r, s);
    let output = evolve_covariance(&input, &bs_pair_symplectic(pair.phi, pair.psi))?;
    let cm_roundtrip_error = (output.matrix() - input.matrix()).amax();
    let r13 = reduce(&output, ModePartition::new(1, 3)?)?;
    let swap_cm_error = (r13.matrix() - twb_covariance(r).matrix()).amax();

    let twb_r = fock::twb_fock(r, cutoff);
    let twb_s = fock::twb_fock(s, cutoff);

    // eigenstate and swap checks on the invariant (sector-complete) subspace
    let sectored = fock::product_state(&twb_r, &twb_s)?.restrict_to_complete_sectors();
    let evolved = fock::apply_bs_pair_fock(&sectored, pair.phi, pair.psi, BsMethod::Exponential)?;
    let norm_in = sectored.norm_sqr().sqrt();
    let norm_out = evolved.norm_sqr().sqrt();
    let fock_eigen_residual = fock::distance(&evolved, &sectored)? / norm_in;
    let overlap = fock::overlap(&sectored, &evolved)?.norm() / (norm_in * norm_out);
    let target = swap_target(r, cutoff)?;
    let swap_overlap =
        fock::overlap(&target, &evolved)?.norm() / (target.norm_sqr().sqrt() * norm_out);

    // fidelity cross-check on the plain per-mode truncation
    let full = fock::product_state(&twb_r, &twb_s)?;
    let full_out = fock::apply_bs_pair_fock(&full, pair.phi, pair.psi, BsMethod::Exponential)?;
    let fidelity_fock = fock::pure_state_overlap(&full_out, ModePartition::new(1, 2)?, &twb_r)?;
    let fidelity_gaussian = gaussian::gaussian_fidelity(
        &twb_covariance(r),
        &reduce(&output, ModePartition::new(1, 2)?)?,
    )?
    .value;

    let classification = if cm_roundtrip_error < 1e-10 && fock_eigen_residual < REPORT_RESIDUAL_TOL {
        Classification::Transparent
    } else if swap_cm_error < 1e-10 && 1.0 - swap_overlap < REPORT_RESIDUAL_TOL {
        Classification::Swapped
    } else {
        Classification::Generic
    };

    Ok(EntitReport {
        r,
        s,
        pair,
        cutoff,
        cm_roundtrip_error,
        fock_eigen_residual,
        overlap,
        swap_overlap,
        swap_cm_error,
        fidelity_gaussian,
        fidelity_fock,
        truncation_loss: evolved.truncation_loss().max(full_out.truncation_loss()),
        classification,
    })
}

/// `S₁₃(r) S₂₄(r)|0⟩` restricted to complete sectors.
pub fn swap_target(r: f64, cutoff: usize) -> Result<FockTensor4> {
    let twb: TwoModeAmplitudes = fock::twb_fock(r, cutoff);
    Ok(fock::product_on(ModePartition::new(1, 3)?, &twb, &twb)?.restrict_to_complete_sectors())
}
