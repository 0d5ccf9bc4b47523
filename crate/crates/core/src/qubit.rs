//! Remote inversion of Pauli rotations on four qubits.
//!
//! Qubits are ordered (1,2,3,4) as tensor factors, qubit 1 most significant. The
//! θ-rotation acts on qubits (1,4) and the φ-rotation on (2,3).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Amplitude tolerance for branch detection.
pub const BRANCH_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;

/// Rotation angles `(θ₀, θ₁, θ₂, θ₃)` of `exp(−i Σ θ_k σ_k⊗σ_k)`, with `σ₀ = 𝟙`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliAngles(pub [f64; 4]);

impl PauliAngles {
    pub fn new(theta: [f64; 4]) -> Result<Self> {
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite angles {theta:?}")));
        }
        Ok(Self(theta))
    }

    pub fn zero() -> Self {
        Self([0.0; 4])
    }

    pub fn negated(&self) -> Self {
        Self(self.0.map(|t| -t))
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        Self(std::array::from_fn(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
    }
}

pub fn pauli(k: usize) -> Matrix2<Complex64> {
    match k {
        0 => Matrix2::identity(),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {k} out of range"),
    }
}

fn kron2(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Sign of `G_k` contributions from the pair `(n, m)`, `n ≠ m` in `1..=3`.
fn pair_sign(k: usize, n: usize, m: usize) -> f64 {
    if k != 0 && (k == n || k == m) {
        -1.0
    } else {
        1.0
    }
}

/// `(G₀, G₁, G₂, G₃)` with `exp(−i Σ x_k σ_k⊗σ_k) = G₀𝟙 − Σ_{k≥1} G_k σ_k⊗σ_k`.
pub fn gk_coefficients(x: PauliAngles) -> [Complex64; 4] {
    let x = x.0;
    let prefactor = Complex64::from_polar(0.25, -(x[0] - x[1] - x[2] - x[3]));
    std::array::from_fn(|k| {
        let mut bracket = ONE;
        for n in 1..4 {
            for m in 1..4 {
                if n != m {
                    bracket += 0.5 * pair_sign(k, n, m) * Complex64::from_polar(1.0, -2.0 * (x[n] + x[m]));
                }
            }
        }
        prefactor * bracket
    })
}

/// Two-qubit operator assembled from the closed-form coefficients.
pub fn two_qubit_operator(x: PauliAngles) -> Matrix4<Complex64> {
    let g = gk_coefficients(x);
    let mut op = Matrix4::identity() * g[0];
    for k in 1..4 {
        op -= kron2(&pauli(k), &pauli(k)) * g[k];
    }
    op
}

/// Same operator by direct matrix exponentiation.
pub fn two_qubit_operator_exp(x: PauliAngles) -> Matrix4<Complex64> {
    let mut h = Matrix4::zeros();
    for k in 0..4 {
        h += kron2(&pauli(k), &pauli(k)) * Complex64::new(x.0[k], 0.0);
    }
    (h * -I).exp()
}

/// Embed `A⊗B` (on the ordered qubit pair `(p, q)`, `p < q`, zero-based) into four qubits.
fn embed_pair(op: &Matrix4<Complex64>, p: usize, q: usize) -> DMatrix<Complex64> {
    let bit = |idx: usize, qubit: usize| (idx >> (3 - qubit)) & 1;
    DMatrix::from_fn(16, 16, |row, col| {
        for qubit in 0..4 {
            if qubit != p && qubit != q && bit(row, qubit) != bit(col, qubit) {
                return ZERO;
            }
        }
        let r = 2 * bit(row, p) + bit(row, q);
        let c = 2 * bit(col, p) + bit(col, q);
        op[(r, c)]
    })
}

/// `U₁₄(θ)` on four qubits.
pub fn u14(theta: PauliAngles) -> DMatrix<Complex64> {
    embed_pair(&two_qubit_operator(theta), 0, 3)
}

/// `U₂₃(φ)` on four qubits.
pub fn u23(phi: PauliAngles) -> DMatrix<Complex64> {
    embed_pair(&two_qubit_operator(phi), 1, 2)
}

pub fn u14_exp(theta: PauliAngles) -> DMatrix<Complex64> {
    embed_pair(&two_qubit_operator_exp(theta), 0, 3)
}

pub fn u23_exp(phi: PauliAngles) -> DMatrix<Complex64> {
    embed_pair(&two_qubit_operator_exp(phi), 1, 2)
}

/// `U(θ, φ) = U₁₄(θ) U₂₃(φ)`.
pub fn remote_unitary(theta: PauliAngles, phi: PauliAngles) -> DMatrix<Complex64> {
    u14(theta) * u23(phi)
}

/// Real two-qubit amplitudes `a[h][k]` of `Σ a_hk |hk⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitAmplitudes {
    a: [[f64; 2]; 2],
}

impl TwoQubitAmplitudes {
    pub fn new(a: [[f64; 2]; 2]) -> Result<Self> {
        let norm: f64 = a.iter().flatten().map(|v| v * v).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("two-qubit norm² {norm} ≠ 1")));
        }
        Ok(Self { a })
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(a: [[f64; 2]; 2]) -> Result<Self> {
        let norm = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero two-qubit state".into()));
        }
        Self::new(a.map(|row| row.map(|v| v / norm)))
    }

    pub fn get(&self, h: usize, k: usize) -> f64 {
        self.a[h][k]
    }

    pub fn array(&self) -> [[f64; 2]; 2] {
        self.a
    }

    pub fn complex(&self) -> [[Complex64; 2]; 2] {
        self.a.map(|row| row.map(|v| Complex64::new(v, 0.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn amplitudes(&self) -> TwoQubitAmplitudes {
        let h = FRAC_1_SQRT_2;
        let a = match self {
            Self::PhiPlus => [[h, 0.0], [0.0, h]],
            Self::PhiMinus => [[h, 0.0], [0.0, -h]],
            Self::PsiPlus => [[0.0, h], [h, 0.0]],
            Self::PsiMinus => [[0.0, h], [-h, 0.0]],
        };
        TwoQubitAmplitudes { a }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PhiPlus => "phi+",
            Self::PhiMinus => "phi-",
            Self::PsiPlus => "psi+",
            Self::PsiMinus => "psi-",
        }
    }
}

/// Four-qubit state vector, qubit 1 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct FourQubitState {
    amps: DVector<Complex64>,
}

impl FourQubitState {
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: amps.len(),
            });
        }
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("four-qubit norm² {norm} ≠ 1")));
        }
        Ok(Self { amps })
    }

    /// `|ψ⟩₁₂ ⊗ |ψ⟩₃₄`.
    pub fn doubled(a: &[[Complex64; 2]; 2]) -> Self {
        let amps = DVector::from_fn(16, |idx, _| {
            let b = |q: usize| (idx >> (3 - q)) & 1;
            a[b(0)][b(1)] * a[b(2)][b(3)]
        });
        Self { amps }
    }

    /// `|A⟩⟩₁₄ ⊗ |B⟩⟩₂₃` for 2×2 coefficient matrices.
    pub fn from_pair_matrices(a14: &Matrix2<Complex64>, b23: &Matrix2<Complex64>) -> DVector<Complex64> {
        DVector::from_fn(16, |idx, _| {
            let b = |q: usize| (idx >> (3 - q)) & 1;
            a14[(b(0), b(3))] * b23[(b(1), b(2))]
        })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }
}

/// Exact and global-phase-minimized residuals of `U|Ψ⟩` against `|Ψ⟩`.
fn residual_pair(state: &DVector<Complex64>, evolved: &DVector<Complex64>) -> (f64, f64) {
    let exact = (evolved - state).norm();
    let ov = state.dotc(evolved);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
    let phased = (evolved - state * phase).norm();
    (exact, phased)
}

/// Residuals `(‖U|Ψ⟩ − |Ψ⟩‖, min_γ ‖U|Ψ⟩ − e^{iγ}|Ψ⟩‖)` for `|Ψ⟩ = |ψ⟩₁₂|ψ⟩₃₄`.
pub fn invariance_residual_complex(
    a: &[[Complex64; 2]; 2],
    theta: PauliAngles,
    phi: PauliAngles,
) -> (f64, f64) {
    let state = FourQubitState::doubled(a).amps;
    let evolved = remote_unitary(theta, phi) * &state;
    residual_pair(&state, &evolved)
}

pub fn invariance_residual(a: &TwoQubitAmplitudes, theta: PauliAngles, phi: PauliAngles) -> (f64, f64) {
    invariance_residual_complex(&a.complex(), theta, phi)
}

/// `‖U(θ,−θ)|B⟩|B⟩ − |B⟩|B⟩‖`.
pub fn bell_invariance_residual(bell: BellState, theta: PauliAngles) -> f64 {
    invariance_residual(&bell.amplitudes(), theta, theta.negated()).0
}

/// Relation imposed on `θ` (on top of `φ = −θ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleConstraint {
    None,
    /// `θ_i = θ_j`.
    Equal(usize, usize),
    /// `θ_i = −θ_j`.
    Opposite(usize, usize),
    /// `θ₁ = θ₂ = θ₃ = 0`.
    AllZero,
}

impl AngleConstraint {
    pub fn residual(&self, theta: PauliAngles) -> f64 {
        let t = theta.0;
        match *self {
            Self::None => 0.0,
            Self::Equal(i, j) => (t[i] - t[j]).abs(),
            Self::Opposite(i, j) => (t[i] + t[j]).abs(),
            Self::AllZero => t[1].abs().max(t[2].abs()).max(t[3].abs()),
        }
    }

    /// Force a random angle vector onto the constraint.
    pub fn project(&self, theta: PauliAngles) -> PauliAngles {
        let mut t = theta.0;
        match *self {
            Self::None => {}
            Self::Equal(i, j) => t[j] = t[i],
            Self::Opposite(i, j) => t[j] = -t[i],
            Self::AllZero => {
                t[1] = 0.0;
                t[2] = 0.0;
                t[3] = 0.0;
            }
        }
        PauliAngles(t)
    }

    /// Push a constrained vector off the constraint by `offset`.
    pub fn violate(&self, theta: PauliAngles, offset: [f64; 3]) -> PauliAngles {
        let mut t = self.project(theta).0;
        match *self {
            Self::None => {}
            Self::Equal(_, j) | Self::Opposite(_, j) => t[j] += offset[0],
            Self::AllZero => {
                t[1] = offset[0];
                t[2] = offset[1];
                t[3] = offset[2];
            }
        }
        PauliAngles(t)
    }
}

impl fmt::Display for AngleConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Equal(i, j) => write!(f, "theta{i}=theta{j}"),
            Self::Opposite(i, j) => write!(f, "theta{i}=-theta{j}"),
            Self::AllZero => f.write_str("theta=0"),
        }
    }
}

/// Classes of real two-qubit inputs with distinct invariance conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZoologyBranch {
    Bell(BellState),
    /// `a₀₀ = ±1` or `a₁₁ = ±1`.
    ComputationalDiagonal,
    /// `a₀₁ = ±1` or `a₁₀ = ±1`.
    ComputationalAntiDiagonal,
    /// Only `a₀₀, a₁₁` nonzero, `|a₀₀| ≠ |a₁₁|`.
    TwoTermDiagonal,
    /// Only `a₀₁, a₁₀` nonzero, `|a₀₁| ≠ |a₁₀|`.
    TwoTermAntiDiagonal,
    /// All nonzero, `a₀₀ = a₁₁`, `a₀₁ = a₁₀`.
    FourTermEvenEven,
    /// All nonzero, `a₀₀ = −a₁₁`, `a₀₁ = −a₁₀`.
    FourTermOddOdd,
    /// All nonzero, `a₀₀ = −a₁₁`, `a₀₁ = a₁₀`.
    FourTermOddEven,
    /// All nonzero, `a₀₀ = a₁₁`, `a₀₁ = −a₁₀`.
    FourTermEvenOdd,
    Generic,
}

impl ZoologyBranch {
    pub const ALL: [ZoologyBranch; 13] = [
        Self::Bell(BellState::PhiPlus),
        Self::Bell(BellState::PhiMinus),
        Self::Bell(BellState::PsiPlus),
        Self::Bell(BellState::PsiMinus),
        Self::ComputationalDiagonal,
        Self::ComputationalAntiDiagonal,
        Self::TwoTermDiagonal,
        Self::TwoTermAntiDiagonal,
        Self::FourTermEvenEven,
        Self::FourTermOddOdd,
        Self::FourTermOddEven,
        Self::FourTermEvenOdd,
        Self::Generic,
    ];

    pub fn constraint(&self) -> AngleConstraint {
        match self {
            Self::Bell(_) => AngleConstraint::None,
            Self::ComputationalDiagonal | Self::TwoTermDiagonal => AngleConstraint::Equal(1, 2),
            Self::ComputationalAntiDiagonal | Self::TwoTermAntiDiagonal => AngleConstraint::Opposite(1, 2),
            Self::FourTermEvenEven => AngleConstraint::Equal(2, 3),
            Self::FourTermOddOdd => AngleConstraint::Opposite(2, 3),
            Self::FourTermOddEven => AngleConstraint::Equal(1, 3),
            Self::FourTermEvenOdd => AngleConstraint::Opposite(1, 3),
            Self::Generic => AngleConstraint::AllZero,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Bell(b) => format!("bell-{}", b.name()),
            Self::ComputationalDiagonal => "computational-diagonal".into(),
            Self::ComputationalAntiDiagonal => "computational-antidiagonal".into(),
            Self::TwoTermDiagonal => "two-term-diagonal".into(),
            Self::TwoTermAntiDiagonal => "two-term-antidiagonal".into(),
            Self::FourTermEvenEven => "four-term-a00=a11-a01=a10".into(),
            Self::FourTermOddOdd => "four-term-a00=-a11-a01=-a10".into(),
            Self::FourTermOddEven => "four-term-a00=-a11-a01=a10".into(),
            Self::FourTermEvenOdd => "four-term-a00=a11-a01=-a10".into(),
            Self::Generic => "generic".into(),
        }
    }

    /// Random member of this branch.
    pub fn sample(&self, rng: &mut impl Rng) -> TwoQubitAmplitudes {
        let sign = |rng: &mut dyn rand::RngCore| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        // angle whose cos and sin are both bounded away from 0 and from each other in modulus
        let mixing = |rng: &mut dyn rand::RngCore| {
            let t = rng.random_range(0.15..0.65);
            if rng.random_bool(0.5) { t } else { std::f64::consts::FRAC_PI_2 - t }
        };
        let a = match self {
            Self::Bell(b) => {
                let s = sign(rng);
                b.amplitudes().a.map(|row| row.map(|v| s * v))
            }
            Self::ComputationalDiagonal => {
                let s = sign(rng);
                if rng.random_bool(0.5) { [[s, 0.0], [0.0, 0.0]] } else { [[0.0, 0.0], [0.0, s]] }
            }
            Self::ComputationalAntiDiagonal => {
                let s = sign(rng);
                if rng.random_bool(0.5) { [[0.0, s], [0.0, 0.0]] } else { [[0.0, 0.0], [s, 0.0]] }
            }
            Self::TwoTermDiagonal => {
                let t = mixing(rng);
                [[sign(rng) * t.cos(), 0.0], [0.0, sign(rng) * t.sin()]]
            }
            Self::TwoTermAntiDiagonal => {
                let t = mixing(rng);
                [[0.0, sign(rng) * t.cos()], [sign(rng) * t.sin(), 0.0]]
            }
            Self::FourTermEvenEven | Self::FourTermOddOdd | Self::FourTermOddEven | Self::FourTermEvenOdd => {
                let t = rng.random_range(0.15..std::f64::consts::FRAC_PI_2 - 0.15);
                let (d, o) = (sign(rng) * t.cos() * FRAC_1_SQRT_2, sign(rng) * t.sin() * FRAC_1_SQRT_2);
                let (sd, so) = match self {
                    Self::FourTermEvenEven => (1.0, 1.0),
                    Self::FourTermOddOdd => (-1.0, -1.0),
                    Self::FourTermOddEven => (-1.0, 1.0),
                    _ => (1.0, -1.0),
                };
                [[d, o], [so * o, sd * d]]
            }
            Self::Generic => loop {
                let raw: [[f64; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
                let candidate = TwoQubitAmplitudes::normalized(raw).expect("nonzero draw");
                let separated = raw.iter().flatten().all(|v| v.abs() > 0.05)
                    && (raw[0][0].abs() - raw[1][1].abs()).abs() > 0.05
                    && (raw[0][1].abs() - raw[1][0].abs()).abs() > 0.05;
                if separated {
                    return candidate;
                }
            },
        };
        TwoQubitAmplitudes::new(a).expect("branch samples are normalized")
    }
}

impl fmt::Display for ZoologyBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZoologyConstraint {
    pub branch: ZoologyBranch,
    pub constraint: AngleConstraint,
}

/// Classify real amplitudes, most specific branch first.
pub fn zoology_constraints(a: &TwoQubitAmplitudes) -> ZoologyConstraint {
    let [[a00, a01], [a10, a11]] = a.a;
    let zero = |v: f64| v.abs() < BRANCH_TOL;
    let eq = |u: f64, v: f64| (u - v).abs() < BRANCH_TOL;
    let h = FRAC_1_SQRT_2;

    let branch = if zero(a01) && zero(a10) && eq(a00.abs(), h) && eq(a11.abs(), h) {
        ZoologyBranch::Bell(if a00 * a11 > 0.0 { BellState::PhiPlus } else { BellState::PhiMinus })
    } else if zero(a00) && zero(a11) && eq(a01.abs(), h) && eq(a10.abs(), h) {
        ZoologyBranch::Bell(if a01 * a10 > 0.0 { BellState::PsiPlus } else { BellState::PsiMinus })
    } else if eq(a00.abs(), 1.0) || eq(a11.abs(), 1.0) {
        ZoologyBranch::ComputationalDiagonal
    } else if eq(a01.abs(), 1.0) || eq(a10.abs(), 1.0) {
        ZoologyBranch::ComputationalAntiDiagonal
    } else if zero(a01) && zero(a10) {
        ZoologyBranch::TwoTermDiagonal
    } else if zero(a00) && zero(a11) {
        ZoologyBranch::TwoTermAntiDiagonal
    } else if [a00, a01, a10, a11].iter().all(|v| !zero(*v)) {
        match (eq(a00, a11), eq(a00, -a11), eq(a01, a10), eq(a01, -a10)) {
            (true, _, true, _) => ZoologyBranch::FourTermEvenEven,
            (_, true, _, true) => ZoologyBranch::FourTermOddOdd,
            (_, true, true, _) => ZoologyBranch::FourTermOddEven,
            (true, _, _, true) => ZoologyBranch::FourTermEvenOdd,
            _ => ZoologyBranch::Generic,
        }
    } else {
        ZoologyBranch::Generic
    };
    ZoologyConstraint {
        branch,
        constraint: branch.constraint(),
    }
}

/// Per-branch outcome of the randomized zoology check.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchReport {
    pub branch: ZoologyBranch,
    pub draws: usize,
    /// Largest `‖U|Ψ⟩ − |Ψ⟩‖` over satisfying draws.
    pub max_exact_residual: f64,
    /// Largest phase-minimized residual over satisfying draws.
    pub max_phase_residual: f64,
    /// Smallest phase-minimized residual over violating draws.
    pub min_violating_residual: f64,
}

pub const ZOOLOGY_SATISFY_TOL: f64 = 1e-10;
pub const ZOOLOGY_VIOLATE_TOL: f64 = 1e-6;
pub const DEFAULT_ZOOLOGY_DRAWS: usize = 50;
pub const DEFAULT_SEED: u64 = 20_240_917;

impl BranchReport {
    pub fn exact(&self) -> bool {
        self.max_exact_residual < ZOOLOGY_SATISFY_TOL
    }

    pub fn sound(&self) -> bool {
        self.max_phase_residual < ZOOLOGY_SATISFY_TOL
    }

    pub fn necessary(&self) -> bool {
        self.min_violating_residual > ZOOLOGY_VIOLATE_TOL
    }

    pub fn passed(&self) -> bool {
        self.sound() && self.necessary()
    }
}

fn offset(rng: &mut impl Rng) -> f64 {
    let m = rng.random_range(0.2..1.2);
    if rng.random_bool(0.5) { m } else { -m }
}

/// Satisfying draws use `φ = −θ` with θ on the branch constraint; violating draws
/// push θ off it (for Bell inputs, `φ = +θ` instead).
pub fn validate_branch(branch: ZoologyBranch, draws: usize, rng: &mut impl Rng) -> BranchReport {
    let constraint = branch.constraint();
    let mut report = BranchReport {
        branch,
        draws,
        max_exact_residual: 0.0,
        max_phase_residual: 0.0,
        min_violating_residual: f64::INFINITY,
    };
    for _ in 0..draws {
        let state = branch.sample(rng);
        debug_assert_eq!(zoology_constraints(&state).branch, branch);
        let theta = constraint.project(PauliAngles::random(rng));
        let (exact, phase) = invariance_residual(&state, theta, theta.negated());
        report.max_exact_residual = report.max_exact_residual.max(exact);
        report.max_phase_residual = report.max_phase_residual.max(phase);

        let state = branch.sample(rng);
        let (theta, phi) = match constraint {
            AngleConstraint::None => {
                let t = PauliAngles([
                    rng.random_range(-3.0..3.0),
                    offset(rng),
                    offset(rng),
                    offset(rng),
                ]);
                (t, t)
            }
            _ => {
                let t = constraint.violate(PauliAngles::random(rng), [offset(rng), offset(rng), offset(rng)]);
                (t, t.negated())
            }
        };
        let (_, phase) = invariance_residual(&state, theta, phi);
        report.min_violating_residual = report.min_violating_residual.min(phase);
    }
    report
}

/// Run every branch with a seeded generator.
pub fn validate_zoology(seed: u64, draws: usize) -> Vec<BranchReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ZoologyBranch::ALL
        .iter()
        .map(|&b| validate_branch(b, draws, &mut rng))
        .collect()
}

/// CSV with header `branch,draws,max_exact_residual,max_phase_residual`.
pub fn write_zoology_csv(reports: &[BranchReport], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["branch", "draws", "max_exact_residual", "max_phase_residual"])?;
    for r in reports {
        w.write_record([
            r.branch.name(),
            r.draws.to_string(),
            format!("{:e}", r.max_exact_residual),
            format!("{:e}", r.max_phase_residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
