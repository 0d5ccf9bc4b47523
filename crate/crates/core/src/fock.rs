//! Truncated Fock-space simulator for four bosonic modes.
//!
//! Each mode keeps photon numbers `0..=cutoff`. The beam-splitter pair acts on modes
//! (1,4) and (2,3); both conserve the photon number of the pair they mix, so the
//! evolution is block diagonal in pair-excitation sectors and is applied sector by
//! sector.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{ModePartition, QuadratureCovariance};

/// Default photon-number cutoff per mode.
pub const DEFAULT_CUTOFF: usize = 16;

/// Largest truncation loss (discarded squared norm) accepted by default.
pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes `ψ_{n,m}` of a two-mode pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeAmplitudes {
    amps: DMatrix<Complex64>,
    tail: f64,
}

impl TwoModeAmplitudes {
    /// Square `(N+1)×(N+1)` amplitude matrix; rows index the first mode.
    pub fn new(amps: DMatrix<Complex64>) -> Result<Self> {
        if amps.nrows() != amps.ncols() || amps.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: amps.nrows(),
                found: amps.ncols(),
            });
        }
        Ok(Self { amps, tail: 0.0 })
    }

    pub fn from_real(cutoff: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let d = cutoff + 1;
        Self {
            amps: DMatrix::from_fn(d, d, |n, m| Complex64::new(f(n, m), 0.0)),
            tail: 0.0,
        }
    }

    /// Photon-number-entangled state `Σ ψ_n |n,n⟩`.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let d = diag.len().max(1);
        let mut amps = DMatrix::from_element(d, d, ZERO);
        for (n, v) in diag.iter().enumerate() {
            amps[(n, n)] = *v;
        }
        Self { amps, tail: 0.0 }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::from_diagonal(&[Complex64::new(1.0, 0.0)]).padded(cutoff)
    }

    fn padded(mut self, cutoff: usize) -> Self {
        let d = cutoff + 1;
        if self.amps.nrows() < d {
            self.amps = self.amps.resize(d, d, ZERO);
        }
        self
    }

    pub fn cutoff(&self) -> usize {
        self.amps.nrows() - 1
    }

    /// `ψ_{n,m}`, zero beyond the cutoff.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        if n <= self.cutoff() && m <= self.cutoff() {
            self.amps[(n, m)]
        } else {
            ZERO
        }
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared norm discarded by truncation when the state was built.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// `Some(ψ_n)` when the state has the form `ψ_{n,m} = δ_{nm} ψ_n` within `tol`.
    pub fn photon_number_diagonal(&self, tol: f64) -> Option<Vec<Complex64>> {
        let d = self.amps.nrows();
        for n in 0..d {
            for m in 0..d {
                if n != m && self.amps[(n, m)].norm() > tol {
                    return None;
                }
            }
        }
        Some((0..d).map(|n| self.amps[(n, n)]).collect())
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amps /= Complex64::new(norm, 0.0);
        }
        self
    }
}

/// Squared norm of the two-mode squeezed vacuum beyond photon number `cutoff`.
pub fn twb_tail(r: f64, cutoff: usize) -> f64 {
    r.tanh().powi(2 * (cutoff as i32 + 1))
}

/// Rejects cutoffs whose analytic TWB tail exceeds `tolerance`.
pub fn check_twb_cutoff(r: f64, cutoff: usize, tolerance: f64) -> Result<()> {
    let tail = twb_tail(r, cutoff);
    if tail > tolerance {
        return Err(Error::TruncationTooCoarse {
            r,
            cutoff,
            tail,
            tolerance,
        });
    }
    Ok(())
}

/// `S(r)|0⟩ = √(1−λ²) Σ λⁿ |n,n⟩`, `λ = tanh r`, truncated at `cutoff`.
pub fn twb_fock(r: f64, cutoff: usize) -> TwoModeAmplitudes {
    let lambda = r.tanh();
    let norm = (1.0 - lambda * lambda).sqrt();
    let diag: Vec<Complex64> = (0..=cutoff)
        .map(|n| Complex64::new(norm * lambda.powi(n as i32), 0.0))
        .collect();
    let mut state = TwoModeAmplitudes::from_diagonal(&diag);
    state.tail = twb_tail(r, cutoff);
    state
}

/// Four-mode amplitude tensor indexed `(n, m, h, k)` for modes 1..4.
#[derive(Clone, Debug, PartialEq)]
pub struct FockTensor4 {
    cutoff: usize,
    amps: Vec<Complex64>,
    truncation_loss: f64,
    tolerance: f64,
}

impl FockTensor4 {
    pub fn zeros(cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self {
            cutoff,
            amps: vec![ZERO; d * d * d * d],
            truncation_loss: 0.0,
            tolerance: DEFAULT_LEAKAGE_TOL,
        }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut t = Self::zeros(cutoff);
        t.amps[0] = Complex64::new(1.0, 0.0);
        t
    }

    /// Builds a tensor from `f(n, m, h, k)`.
    pub fn from_fn(cutoff: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(cutoff);
        let d = cutoff + 1;
        for n in 0..d {
            for m in 0..d {
                for h in 0..d {
                    for k in 0..d {
                        let i = t.index(n, m, h, k);
                        t.amps[i] = f(n, m, h, k);
                    }
                }
            }
        }
        t
    }

    /// Overrides the truncation-loss tolerance checked by [`apply_bs_pair_fock`].
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Squared norm discarded so far (input tails, leakage and projections).
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    #[inline]
    fn index(&self, n: usize, m: usize, h: usize, k: usize) -> usize {
        let d = self.dim();
        ((n * d + m) * d + h) * d + k
    }

    pub fn get(&self, n: usize, m: usize, h: usize, k: usize) -> Complex64 {
        let c = self.cutoff;
        if n > c || m > c || h > c || k > c {
            return ZERO;
        }
        self.amps[self.index(n, m, h, k)]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Projects onto the span of complete pair-excitation sectors
    /// (`n + k ≤ cutoff` and `m + h ≤ cutoff`).
    ///
    /// That subspace is invariant under the beam-splitter pair, so eigenstate tests on the
    /// projected state carry no truncation artefact. The discarded weight is added to the
    /// truncation loss.
    pub fn restrict_to_complete_sectors(mut self) -> Self {
        let d = self.dim();
        let c = self.cutoff;
        let mut dropped = 0.0;
        for n in 0..d {
            for m in 0..d {
                for h in 0..d {
                    for k in 0..d {
                        if n + k > c || m + h > c {
                            let i = self.index(n, m, h, k);
                            dropped += self.amps[i].norm_sqr();
                            self.amps[i] = ZERO;
                        }
                    }
                }
            }
        }
        self.truncation_loss += dropped;
        self
    }

    /// Applies `a_mode` (zero-based mode index).
    fn annihilate(&self, mode: usize) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = vec![ZERO; self.amps.len()];
        let stride = d.pow(3 - mode as u32);
        for (i, v) in self.amps.iter().enumerate() {
            let occ = (i / stride) % d;
            if occ > 0 {
                out[i - stride] += *v * (occ as f64).sqrt();
            }
        }
        out
    }

    /// Writes `n,m,h,k,re,im` rows in row-major order.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "m", "h", "k", "re", "im"])?;
        let d = self.dim();
        for (i, v) in self.amps.iter().enumerate() {
            let idx = [i / (d * d * d), (i / (d * d)) % d, (i / d) % d, i % d];
            let mut rec: Vec<String> = idx.iter().map(|x| x.to_string()).collect();
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Places `a` on the modes of `pair` and `b` on the complementary modes.
///
/// `a` is indexed by the kept modes in the order given by `pair`; `b` by the
/// remaining modes in ascending order.
pub fn product_on(
    pair: ModePartition,
    a: &TwoModeAmplitudes,
    b: &TwoModeAmplitudes,
) -> Result<FockTensor4> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::CutoffMismatch(a.cutoff(), b.cutoff()));
    }
    let (p, q) = pair.kept();
    let (u, v) = pair.traced();
    let mut t = FockTensor4::from_fn(a.cutoff(), |n, m, h, k| {
        let occ = [n, m, h, k];
        a.get(occ[p - 1], occ[q - 1]) * b.get(occ[u - 1], occ[v - 1])
    });
    t.truncation_loss = 1.0 - (1.0 - a.tail) * (1.0 - b.tail);
    Ok(t)
}

/// `|a⟩₁₂ ⊗ |b⟩₃₄`.
pub fn product_state(a: &TwoModeAmplitudes, b: &TwoModeAmplitudes) -> Result<FockTensor4> {
    product_on(ModePartition::new(1, 2)?, a, b)
}

/// How the per-sector beam-splitter matrices are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BsMethod {
    /// Closed-form binomial expansion of the transformed creation operators.
    CoefficientFormula,
    /// Matrix exponential of the bilinear generator restricted to each sector.
    Exponential,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sector-`total` matrix `B[j', j] = ⟨j', T−j'| U(α) |j, T−j⟩` from the binomial
/// expansion of `U a_h† U† = cos α a_h† + sin α a_k†`, `U a_k† U† = −sin α a_h† + cos α a_k†`.
pub fn sector_matrix_formula(total: usize, angle: f64) -> DMatrix<f64> {
    let (sn, cs) = angle.sin_cos();
    let mut out = DMatrix::zeros(total + 1, total + 1);
    for n in 0..=total {
        let k = total - n;
        let pre = 1.0 / (factorial(n) * factorial(k)).sqrt();
        for s in 0..=n {
            for u in 0..=k {
                let first = n - s + u;
                let second = k - u + s;
                let sign = if u % 2 == 0 { 1.0 } else { -1.0 };
                let term = sign
                    * binomial(n, s)
                    * binomial(k, u)
                    * (factorial(first) * factorial(second)).sqrt()
                    * cs.powi((n + k - s - u) as i32)
                    * sn.powi((s + u) as i32);
                out[(first, n)] += pre * term;
            }
        }
    }
    out
}

/// Same matrix as [`sector_matrix_formula`] via `exp(α (a_k† a_h − a_h† a_k))`.
pub fn sector_matrix_exponential(total: usize, angle: f64) -> DMatrix<f64> {
    let mut gen = DMatrix::zeros(total + 1, total + 1);
    for j in 0..=total {
        if j > 0 {
            gen[(j - 1, j)] = ((j * (total - j + 1)) as f64).sqrt();
        }
        if j < total {
            gen[(j + 1, j)] = -(((j + 1) * (total - j)) as f64).sqrt();
        }
    }
    (gen * angle).exp()
}

fn sector_matrices(cutoff: usize, angle: f64, method: BsMethod) -> Vec<DMatrix<f64>> {
    (0..=2 * cutoff)
        .map(|t| match method {
            BsMethod::CoefficientFormula => sector_matrix_formula(t, angle),
            BsMethod::Exponential => sector_matrix_exponential(t, angle),
        })
        .collect()
}

/// Applies a two-mode number-conserving unitary to modes `first`, `second` (zero-based).
/// Returns the new amplitudes and the squared norm pushed past the cutoff.
fn apply_pair(
    state: &FockTensor4,
    first: usize,
    second: usize,
    sectors: &[DMatrix<f64>],
) -> (Vec<Complex64>, f64) {
    let d = state.dim();
    let others: Vec<usize> = (0..4).filter(|x| *x != first && *x != second).collect();
    let strides = [d * d * d, d * d, d, 1];
    let (sf, ss) = (strides[first], strides[second]);
    let (so0, so1) = (strides[others[0]], strides[others[1]]);

    // one spectator slice per row, assembled in a fixed order
    let slices: Vec<(Vec<(usize, Complex64)>, f64)> = (0..d * d)
        .into_par_iter()
        .map(|slice| {
            let base = (slice / d) * so0 + (slice % d) * so1;
            let mut written = Vec::with_capacity(d * d);
            let mut leaked = 0.0;
            for (total, b) in sectors.iter().enumerate() {
                let lo = total.saturating_sub(d - 1);
                let hi = total.min(d - 1);
                if lo > hi {
                    continue;
                }
                let input: Vec<(usize, Complex64)> = (lo..=hi)
                    .map(|j| (j, state.amps[base + j * sf + (total - j) * ss]))
                    .filter(|(_, v)| *v != ZERO)
                    .collect();
                if input.is_empty() {
                    continue;
                }
                for jp in 0..=total {
                    let acc: Complex64 = input.iter().map(|(j, v)| *v * b[(jp, *j)]).sum();
                    if jp <= hi && jp >= lo {
                        written.push((base + jp * sf + (total - jp) * ss, acc));
                    } else {
                        leaked += acc.norm_sqr();
                    }
                }
            }
            (written, leaked)
        })
        .collect();

    let mut out = vec![ZERO; state.amps.len()];
    let mut leaked = 0.0;
    for (written, l) in slices {
        for (i, v) in written {
            out[i] = v;
        }
        leaked += l;
    }
    (out, leaked)
}

/// `U₁₄(φ) ⊗ U₂₃(ψ)` applied to a four-mode state.
///
/// Fails with [`Error::CutoffOverflow`] when the accumulated truncation loss exceeds the
/// state's tolerance.
pub fn apply_bs_pair_fock(
    state: &FockTensor4,
    phi: f64,
    psi: f64,
    method: BsMethod,
) -> Result<FockTensor4> {
    let s14 = sector_matrices(state.cutoff, phi, method);
    let s23 = sector_matrices(state.cutoff, psi, method);
    let (amps, leak_a) = apply_pair(state, 0, 3, &s14);
    let mid = FockTensor4 {
        amps,
        ..state.clone()
    };
    let (amps, leak_b) = apply_pair(&mid, 1, 2, &s23);
    let loss = state.truncation_loss + leak_a + leak_b;
    if loss > state.tolerance {
        return Err(Error::CutoffOverflow {
            leaked: loss,
            tolerance: state.tolerance,
        });
    }
    Ok(FockTensor4 {
        cutoff: state.cutoff,
        amps,
        truncation_loss: loss,
        tolerance: state.tolerance,
    })
}

/// `⟨a|b⟩`.
pub fn overlap(a: &FockTensor4, b: &FockTensor4) -> Result<Complex64> {
    if a.cutoff != b.cutoff {
        return Err(Error::CutoffMismatch(a.cutoff, b.cutoff));
    }
    Ok(inner(&a.amps, &b.amps))
}

/// `‖a − b‖`.
pub fn distance(a: &FockTensor4, b: &FockTensor4) -> Result<f64> {
    if a.cutoff != b.cutoff {
        return Err(Error::CutoffMismatch(a.cutoff, b.cutoff));
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `‖U ψ − ψ‖` for the beam-splitter pair.
pub fn eigenstate_residual(state: &FockTensor4, phi: f64, psi: f64, method: BsMethod) -> Result<f64> {
    let out = apply_bs_pair_fock(state, phi, psi, method)?;
    distance(&out, state)
}

/// Second moments of the quadratures of the kept pair, normalized by `‖ψ‖²`.
pub fn reduced_moments(state: &FockTensor4, part: ModePartition) -> Result<QuadratureCovariance> {
    let norm = state.norm_sqr();
    let (p, q) = part.kept();
    let modes = [p - 1, q - 1];
    let lowered: Vec<Vec<Complex64>> = modes.iter().map(|&m| state.annihilate(m)).collect();
    let mean: Vec<Complex64> = lowered.iter().map(|l| inner(&state.amps, l) / norm).collect();

    let mut anti = [[ZERO; 2]; 2];
    let mut number = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            // ⟨a_i a_j⟩ and ⟨a_i† a_j⟩
            let twice = FockTensor4 {
                amps: lowered[j].clone(),
                ..state.clone()
            }
            .annihilate(modes[i]);
            anti[i][j] = inner(&state.amps, &twice) / norm;
            number[i][j] = inner(&lowered[i], &lowered[j]) / norm;
        }
    }

    let half = |i: usize, j: usize| if i == j { 0.5 } else { 0.0 };
    let sqrt2 = std::f64::consts::SQRT_2;
    let mx = |i: usize| sqrt2 * mean[i].re;
    let mp = |i: usize| sqrt2 * mean[i].im;
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(2 * i, 2 * j)] = anti[i][j].re + number[i][j].re + half(i, j) - mx(i) * mx(j);
            m[(2 * i + 1, 2 * j + 1)] =
                -anti[i][j].re + number[i][j].re + half(i, j) - mp(i) * mp(j);
            m[(2 * i, 2 * j + 1)] = anti[i][j].im + number[i][j].im - mx(i) * mp(j);
            m[(2 * i + 1, 2 * j)] = anti[j][i].im + number[j][i].im - mp(i) * mx(j);
        }
    }
    let sym = (&m + m.transpose()) * 0.5;
    QuadratureCovariance::new(sym)
}

/// Reduced density matrix of the kept pair, basis index `a·(N+1) + b`.
pub fn reduced_density(state: &FockTensor4, part: ModePartition) -> DMatrix<Complex64> {
    let d = state.dim();
    let norm = state.norm_sqr();
    let blocks = traced_columns(state, part);
    let mut rho = DMatrix::from_element(d * d, d * d, ZERO);
    for col in &blocks {
        let v = DVector::from_column_slice(col);
        rho += &v * v.adjoint();
    }
    rho / Complex64::new(norm, 0.0)
}

/// For each configuration of the traced modes, the amplitude vector over the kept pair.
fn traced_columns(state: &FockTensor4, part: ModePartition) -> Vec<Vec<Complex64>> {
    let d = state.dim();
    let (p, q) = part.kept();
    let (u, v) = part.traced();
    let mut cols = Vec::with_capacity(d * d);
    for tu in 0..d {
        for tv in 0..d {
            let mut col = vec![ZERO; d * d];
            for a in 0..d {
                for b in 0..d {
                    let mut occ = [0usize; 4];
                    occ[p - 1] = a;
                    occ[q - 1] = b;
                    occ[u - 1] = tu;
                    occ[v - 1] = tv;
                    col[a * d + b] = state.get(occ[0], occ[1], occ[2], occ[3]);
                }
            }
            cols.push(col);
        }
    }
    cols
}

/// `⟨φ|ρ|φ⟩` for the reduced state of the kept pair, with both states normalized.
pub fn pure_state_overlap(
    state: &FockTensor4,
    part: ModePartition,
    reference: &TwoModeAmplitudes,
) -> Result<f64> {
    if reference.cutoff() != state.cutoff {
        return Err(Error::CutoffMismatch(state.cutoff, reference.cutoff()));
    }
    let d = state.dim();
    let reference = reference.clone().normalized();
    let phi: Vec<Complex64> = (0..d * d).map(|i| reference.get(i / d, i % d)).collect();
    let total: f64 = traced_columns(state, part)
        .iter()
        .map(|col| inner(&phi, col).norm_sqr())
        .sum();
    Ok(total / state.norm_sqr())
}

/// `|LHS − RHS|` of the single transparency condition on the `|1111⟩` component,
/// transcribed over amplitudes with indices up to 2.
///
/// The condition coincides with `⟨1111|U₁₄(−φ)U₂₃(−ψ)|ψ_in⟩ = ψ₁₁ω₁₁` in the sign
/// convention used by [`apply_bs_pair_fock`].
pub fn transparency_residual_1111(
    a: &TwoModeAmplitudes,
    b: &TwoModeAmplitudes,
    phi: f64,
    psi: f64,
) -> f64 {
    let p = |n, m| a.get(n, m);
    let w = |h, k| b.get(h, k);
    let (c2p, s2p) = ((2.0 * phi).cos(), (2.0 * phi).sin());
    let (c2s, s2s) = ((2.0 * psi).cos(), (2.0 * psi).sin());
    let r2 = std::f64::consts::SQRT_2;
    let lhs = p(1, 1) * w(1, 1);
    let rhs = p(1, 1) * w(1, 1) * (c2p * c2s)
        + (p(1, 0) * w(2, 1) - p(1, 2) * w(0, 1)) * (c2p * s2s / r2)
        + (p(0, 1) * w(1, 2) - p(2, 1) * w(1, 0)) * (s2p * c2s / r2)
        + (p(2, 2) * w(0, 0) - p(0, 2) * w(0, 2) - p(2, 0) * w(2, 0) + p(0, 0) * w(2, 2))
            * (s2p * s2s / 2.0);
    (lhs - rhs).norm()
}

/// Residual of the transparency condition for photon-number-entangled inputs
/// `ψ_{n,m} = δ_{nm} ψ_n`, `ω_{h,k} = δ_{hk} ω_h`.
pub fn pnes_residual(psi_n: &[Complex64], omega_n: &[Complex64], phi: f64, psi: f64) -> f64 {
    let at = |v: &[Complex64], i: usize| v.get(i).copied().unwrap_or(ZERO);
    let lhs = at(psi_n, 1) * at(omega_n, 1);
    let rhs = lhs * ((2.0 * phi).cos() * (2.0 * psi).cos())
        + (at(psi_n, 2) * at(omega_n, 0) + at(psi_n, 0) * at(omega_n, 2))
            * (2.0 * phi.cos() * phi.sin() * psi.cos() * psi.sin());
    (lhs - rhs).norm()
}

/// Outcome of testing whether the single `|1111⟩` condition implies full transparency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsumptionCheck {
    pub condition_residual: f64,
    pub eigenstate_residual: f64,
}

impl SubsumptionCheck {
    /// The condition holds but the state is not left unchanged.
    pub fn is_counterexample(&self, tol: f64) -> bool {
        self.condition_residual < tol && self.eigenstate_residual > tol.sqrt()
    }
}

/// Evaluates the single condition and the full eigenstate residual for the same inputs.
///
/// Inputs are restricted to complete sectors first so the eigenstate residual is free of
/// truncation artefacts.
pub fn subsumption_check(
    a: &TwoModeAmplitudes,
    b: &TwoModeAmplitudes,
    phi: f64,
    psi: f64,
) -> Result<SubsumptionCheck> {
    let state = product_state(a, b)?
        .restrict_to_complete_sectors()
        .with_tolerance(f64::INFINITY);
    let norm = state.norm_sqr().sqrt();
    Ok(SubsumptionCheck {
        condition_residual: transparency_residual_1111(a, b, -phi, -psi),
        eigenstate_residual: eigenstate_residual(&state, phi, psi, BsMethod::Exponential)? / norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_two_mode(rng: &mut ChaCha8Rng, cutoff: usize) -> TwoModeAmplitudes {
        let d = cutoff + 1;
        let amps = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        TwoModeAmplitudes::new(amps).unwrap().normalized()
    }

    #[test]
    fn twb_amplitudes() {
        let vac = twb_fock(0.0, 4);
        assert_eq!(vac.get(0, 0), c(1.0));
        assert_abs_diff_eq!(vac.norm_sqr(), 1.0);

        let s = twb_fock(0.7, 16);
        let lambda = 0.7f64.tanh();
        assert_abs_diff_eq!(lambda, 0.60437, epsilon = 1e-5);
        assert!(s.tail() < 1e-7);
        assert_abs_diff_eq!(s.tail(), lambda.powi(34), epsilon = 1e-20);
        assert_abs_diff_eq!(s.norm_sqr(), 1.0 - s.tail(), epsilon = 1e-14);
        assert!(s.photon_number_diagonal(0.0).is_some());
        assert_eq!(s.get(1, 2), c(0.0));
        assert_eq!(s.get(40, 40), c(0.0));

        // vacuum overlap squared equals 1 − λ² = sech² r
        let v = twb_fock(0.5, 16);
        assert_abs_diff_eq!(v.get(0, 0).norm_sqr(), 0.78645, epsilon = 1e-5);
    }

    #[test]
    fn cutoff_check() {
        assert!(check_twb_cutoff(0.7, 16, 1e-6).is_ok());
        assert!(matches!(
            check_twb_cutoff(1.5, 8, 1e-6),
            Err(Error::TruncationTooCoarse { .. })
        ));
    }

    #[test]
    fn product_norms() {
        let vac = product_state(&TwoModeAmplitudes::vacuum(3), &TwoModeAmplitudes::vacuum(3)).unwrap();
        assert_eq!(vac, FockTensor4::vacuum(3));

        let (r, s, n) = (0.4f64, 0.6f64, 10usize);
        let t = product_state(&twb_fock(r, n), &twb_fock(s, n)).unwrap();
        let geo = |x: f64| {
            let l2 = x.tanh().powi(2);
            (1.0 - l2) * (0..=n).map(|k| l2.powi(k as i32)).sum::<f64>()
        };
        assert_abs_diff_eq!(t.norm_sqr(), geo(r) * geo(s), epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_two_mode(&mut rng, 4);
        let b = random_two_mode(&mut rng, 4);
        assert_abs_diff_eq!(product_state(&a, &b).unwrap().norm_sqr(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            product_state(&a, &random_two_mode(&mut rng, 3)),
            Err(Error::CutoffMismatch(4, 3))
        ));
    }

    #[test]
    fn sector_methods_agree() {
        for total in 0..=20 {
            for angle in [0.0, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2] {
                let f = sector_matrix_formula(total, angle);
                let e = sector_matrix_exponential(total, angle);
                assert!((&f - &e).amax() < 1e-10, "T={total} angle={angle}");
            }
        }
    }

    #[test]
    fn sector_sign_convention() {
        // U a_h† U† = cos α a_h† + sin α a_k†: |1,0⟩ → cos|1,0⟩ + sin|0,1⟩
        let b = sector_matrix_formula(1, 0.3);
        assert_abs_diff_eq!(b[(1, 1)], 0.3f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(b[(0, 1)], 0.3f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(b[(1, 0)], -0.3f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn vacuum_is_invariant() {
        let vac = FockTensor4::vacuum(5);
        for method in [BsMethod::CoefficientFormula, BsMethod::Exponential] {
            let out = apply_bs_pair_fock(&vac, 0.4, 1.1, method).unwrap();
            assert!(distance(&out, &vac).unwrap() < 1e-14);
        }
    }

    #[test]
    fn exchange_at_right_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_two_mode(&mut rng, 3);
        let b = random_two_mode(&mut rng, 3);
        let state = product_state(&a, &b).unwrap().with_tolerance(f64::INFINITY);
        let out = apply_bs_pair_fock(&state, FRAC_PI_2, FRAC_PI_2, BsMethod::Exponential).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                for h in 0..4 {
                    for k in 0..4 {
                        let sign = if (h + k) % 2 == 0 { 1.0 } else { -1.0 };
                        let expected = state.get(n, m, h, k) * sign;
                        assert!((out.get(k, h, m, n) - expected).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let state = product_state(&random_two_mode(&mut rng, 3), &random_two_mode(&mut rng, 3)).unwrap();
        assert!(matches!(
            apply_bs_pair_fock(&state, FRAC_PI_4, FRAC_PI_4, BsMethod::Exponential),
            Err(Error::CutoffOverflow { .. })
        ));
    }

    #[test]
    fn transparency_residual_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_two_mode(&mut rng, 3);
        let b = random_two_mode(&mut rng, 3);
        assert!(transparency_residual_1111(&a, &b, 0.0, 0.0) < 1e-15);
        assert!(transparency_residual_1111(&a, &b, FRAC_PI_4, FRAC_PI_4) > 1e-6);
        for r in [0.2, 0.5, 0.9] {
            let t = twb_fock(r, 4);
            for angle in [0.1, 0.5, FRAC_PI_4, 1.3] {
                assert!(transparency_residual_1111(&t, &t, angle, angle) < 1e-12);
            }
        }
    }

    #[test]
    fn condition_matches_oracle_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_two_mode(&mut rng, 4);
        let b = random_two_mode(&mut rng, 4);
        let state = product_state(&a, &b).unwrap().with_tolerance(f64::INFINITY);
        for (phi, psi) in [(0.3, 0.7), (0.5, 0.2), (1.0, -0.4)] {
            let out = apply_bs_pair_fock(&state, -phi, -psi, BsMethod::Exponential).unwrap();
            let oracle = (state.get(1, 1, 1, 1) - out.get(1, 1, 1, 1)).norm();
            assert_abs_diff_eq!(
                transparency_residual_1111(&a, &b, phi, psi),
                oracle,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn pnes_residual_cases() {
        let lambda = 0.6f64;
        let geo: Vec<Complex64> = (0..6).map(|n| c(lambda.powi(n))).collect();
        for angle in [0.2, FRAC_PI_4, 1.0] {
            assert!(pnes_residual(&geo, &geo, angle, angle) < 1e-15);
        }
        // λ² |1 − cos 2(φ−ψ)|
        let r = pnes_residual(&geo, &geo, 0.6 + FRAC_PI_4, 0.6);
        assert_abs_diff_eq!(r, lambda * lambda, epsilon = 1e-14);
        let other: Vec<Complex64> = [1.0, 0.5, 0.7, 0.1].iter().map(|x| c(*x)).collect();
        assert!(pnes_residual(&other, &other, FRAC_PI_4, FRAC_PI_4) > 1e-3);

        // the diagonal form agrees with the general condition
        let a = TwoModeAmplitudes::from_diagonal(&other);
        assert_abs_diff_eq!(
            pnes_residual(&other, &other, 0.3, 0.8),
            transparency_residual_1111(&a, &a, 0.3, 0.8),
            epsilon = 1e-14
        );
    }

    #[test]
    fn single_condition_does_not_imply_transparency() {
        // ψ₁² = ψ₀ψ₂ satisfies the condition at equal angles, but ψ₃ breaks the
        // geometric pattern that full transparency needs.
        let diag: Vec<Complex64> = [1.0, 0.5, 0.25, 0.6].iter().map(|x| c(*x)).collect();
        let a = TwoModeAmplitudes::from_diagonal(&diag).padded(6).normalized();
        let check = subsumption_check(&a, &a, 0.6, 0.6).unwrap();
        assert!(check.condition_residual < 1e-14);
        assert!(check.eigenstate_residual > 1e-3);
        assert!(check.is_counterexample(1e-12));
    }

    #[test]
    fn moments_of_vacuum() {
        let vac = FockTensor4::vacuum(3);
        let cm = reduced_moments(&vac, ModePartition::new(1, 2).unwrap()).unwrap();
        assert!((cm.matrix() - DMatrix::identity(4, 4) * 0.5).amax() < 1e-15);
    }

    #[test]
    fn pure_overlaps() {
        let twb = twb_fock(0.5, 12);
        let state = product_state(&twb, &twb).unwrap();
        let p12 = ModePartition::new(1, 2).unwrap();
        assert_abs_diff_eq!(pure_state_overlap(&state, p12, &twb).unwrap(), 1.0, epsilon = 1e-12);

        // ⟨0|ρ|0⟩ on the squeezed pair is the squared amplitude 1 − λ²
        let lambda = 0.5f64.tanh();
        let state = product_state(&twb_fock(0.5, 16), &TwoModeAmplitudes::vacuum(16)).unwrap();
        let got = pure_state_overlap(&state, p12, &TwoModeAmplitudes::vacuum(16)).unwrap();
        assert_abs_diff_eq!(got, 1.0 - lambda * lambda, epsilon = 1e-10);
        let p34 = ModePartition::new(3, 4).unwrap();
        assert_abs_diff_eq!(pure_state_overlap(&state, p34, &TwoModeAmplitudes::vacuum(16)).unwrap(), 1.0, epsilon = 1e-12);

        let sectored = product_state(&twb, &twb).unwrap().restrict_to_complete_sectors();
        let out = apply_bs_pair_fock(&sectored, 0.4, 0.4, BsMethod::Exponential).unwrap();
        let ov = overlap(&sectored, &out).unwrap().norm() / sectored.norm_sqr();
        assert_abs_diff_eq!(ov, 1.0, epsilon = 1e-8);
        assert!(pure_state_overlap(&state, p12, &twb_fock(0.5, 8)).is_err());
    }

    #[test]
    fn csv_dump() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        FockTensor4::vacuum(1).write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,m,h,k,re,im");
        assert_eq!(lines[1], "0,0,0,0,1,0");
        assert_eq!(lines.len(), 17);
    }
}
