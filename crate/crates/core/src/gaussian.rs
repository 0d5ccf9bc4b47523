//! Covariance-matrix engine for zero-mean Gaussian states.
//!
//! Quadratures are ordered `(x1, p1, x2, p2, ...)` with `x = (a + a†)/√2`, so the
//! vacuum has covariance `I/2`.

use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Symmetry tolerance for covariance matrices and symplectic checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Separability threshold for the minimum PPT symplectic eigenvalue.
pub const SEPARABILITY_THRESHOLD: f64 = 0.5;

/// Symmetric second-moment matrix of an `n`-mode Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureCovariance {
    matrix: DMatrix<f64>,
}

impl QuadratureCovariance {
    /// Validates symmetry, positive definiteness and the uncertainty relation.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || dim % 2 != 0 || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim + dim % 2,
                found: matrix.ncols(),
            });
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let cm = Self { matrix };
        let min = cm
            .symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < 0.5 - SYMMETRY_TOL {
            return Err(Error::UncertaintyViolation(min));
        }
        Ok(cm)
    }

    /// Vacuum covariance `I/2` on `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// The 2×2 block coupling modes `i` and `j` (zero-based).
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.matrix.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Symplectic spectrum: moduli of the eigenvalues of `iΩΣ`, one per mode, ascending.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_spectrum(&self.matrix)
    }

    /// Full 2×2-block view of a two-mode covariance.
    fn as_two_mode(&self) -> Result<Matrix4<f64>> {
        if self.n_modes() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: self.matrix.nrows(),
            });
        }
        Ok(self.matrix.fixed_view::<4, 4>(0, 0).into_owned())
    }
}

/// Block-diagonal symplectic form for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

fn symplectic_spectrum(sigma: &DMatrix<f64>) -> Vec<f64> {
    let n = sigma.nrows() / 2;
    let m = symplectic_form(n) * sigma;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    // eigenvalues come in ±iκ pairs
    moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Covariance of the two-mode squeezed vacuum `S(r)|0⟩`.
///
/// Off-diagonal blocks are `(sinh 2r / 2)·σ₃` on both sides of the diagonal.
pub fn twb_covariance(r: f64) -> QuadratureCovariance {
    let diag = (2.0 * r).cosh() / 2.0;
    let corr = (2.0 * r).sinh() / 2.0;
    let mut m = DMatrix::zeros(4, 4);
    for k in 0..4 {
        m[(k, k)] = diag;
    }
    m[(0, 2)] = corr;
    m[(2, 0)] = corr;
    m[(1, 3)] = -corr;
    m[(3, 1)] = -corr;
    QuadratureCovariance { matrix: m }
}

/// `Σ12(r) ⊕ Σ34(s)`.
pub fn four_mode_input_covariance(r: f64, s: f64) -> QuadratureCovariance {
    let mut m = DMatrix::zeros(8, 8);
    m.view_mut((0, 0), (4, 4)).copy_from(twb_covariance(r).matrix());
    m.view_mut((4, 4), (4, 4)).copy_from(twb_covariance(s).matrix());
    QuadratureCovariance { matrix: m }
}

/// Phase-space map of the beam-splitter pair: modes (1,4) mixed by `phi`, modes (2,3) by `psi`.
///
/// Evolution is the congruence `Sᵀ Σ S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap {
    matrix: DMatrix<f64>,
    phi: f64,
    psi: f64,
}

impl SymplecticMap {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.phi, self.psi)
    }

    /// `‖SᵀΩS − Ω‖∞`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(4);
        (self.matrix.transpose() * &omega * &self.matrix - omega).amax()
    }
}

pub fn bs_pair_symplectic(phi: f64, psi: f64) -> SymplecticMap {
    let (sp, cp) = phi.sin_cos();
    let (ss, cs) = psi.sin_cos();
    // (row block, column block, scalar) in zero-based mode indices
    let blocks = [
        (0, 0, cp),
        (0, 3, sp),
        (1, 1, cs),
        (1, 2, ss),
        (2, 1, -ss),
        (2, 2, cs),
        (3, 0, -sp),
        (3, 3, cp),
    ];
    let mut m = DMatrix::zeros(8, 8);
    for (i, j, v) in blocks {
        m[(2 * i, 2 * j)] = v;
        m[(2 * i + 1, 2 * j + 1)] = v;
    }
    SymplecticMap {
        matrix: m,
        phi,
        psi,
    }
}

pub fn evolve_covariance(
    sigma: &QuadratureCovariance,
    map: &SymplecticMap,
) -> Result<QuadratureCovariance> {
    let s = map.matrix();
    if sigma.matrix.nrows() != s.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            found: sigma.matrix.nrows(),
        });
    }
    let out = s.transpose() * &sigma.matrix * s;
    let sym = (&out + out.transpose()) * 0.5;
    QuadratureCovariance::new(sym)
}

/// Ordered pair of distinct modes, stored one-based as in `Σ^(hk)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModePartition {
    first: usize,
    second: usize,
}

impl ModePartition {
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first == second || !(1..=4).contains(&first) || !(1..=4).contains(&second) {
            return Err(Error::InvalidModePair(first, second));
        }
        Ok(Self { first, second })
    }

    pub fn kept(&self) -> (usize, usize) {
        (self.first, self.second)
    }

    /// The complementary pair, in ascending order.
    pub fn traced(&self) -> (usize, usize) {
        let mut rest = (1..=4).filter(|m| *m != self.first && *m != self.second);
        (rest.next().unwrap(), rest.next().unwrap())
    }
}

/// `[[Σ]]_hk`: keep the blocks of the two selected modes.
pub fn reduce(sigma: &QuadratureCovariance, part: ModePartition) -> Result<QuadratureCovariance> {
    if sigma.n_modes() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: sigma.matrix.nrows(),
        });
    }
    let idx = [part.first - 1, part.second - 1];
    let mut m = DMatrix::zeros(4, 4);
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            m.fixed_view_mut::<2, 2>(2 * bi, 2 * bj)
                .copy_from(&sigma.block(i, j));
        }
    }
    Ok(QuadratureCovariance { matrix: m })
}

/// κ̃₋: smallest symplectic eigenvalue of the partial transpose (p of the second mode flipped).
pub fn min_ppt_symplectic_eigenvalue(sigma: &QuadratureCovariance) -> Result<f64> {
    let mut m = sigma.as_two_mode()?;
    if m.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    for k in 0..4 {
        m[(3, k)] = -m[(3, k)];
        m[(k, 3)] = -m[(k, 3)];
    }
    let pt = DMatrix::from_iterator(4, 4, m.iter().copied());
    Ok(symplectic_spectrum(&pt)[0])
}

pub fn is_separable(kappa: f64) -> bool {
    kappa >= SEPARABILITY_THRESHOLD
}

/// `μ = (16 det Σ)^(-1/2)`.
pub fn purity(sigma: &QuadratureCovariance) -> Result<f64> {
    let m = sigma.as_two_mode()?;
    let det = m.determinant();
    if det <= 0.0 {
        return Err(Error::NonPositive {
            what: "covariance determinant",
            value: det,
        });
    }
    Ok((16.0 * det).powf(-0.5))
}

/// Entanglement of formation in nats as a function of κ̃₋; zero when separable.
pub fn entanglement_of_formation(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::NonPositive {
            what: "symplectic eigenvalue",
            value: kappa,
        });
    }
    if kappa >= SEPARABILITY_THRESHOLD {
        return Ok(0.0);
    }
    let chi = (kappa * kappa + 0.25) / (2.0 * kappa);
    let plus = chi + 0.5;
    let minus = chi - 0.5;
    Ok(plus * plus.ln() - minus * minus.ln())
}

/// Fidelity value together with whether the determinant formula applies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fidelity {
    pub value: f64,
    /// False when neither argument is pure; the value is then outside the formula's validity.
    pub exact_regime: bool,
}

/// Purity tolerance used to decide whether a covariance describes a pure state.
pub const PURE_STATE_TOL: f64 = 1e-9;

/// `F = det(Σa + Σb)^(-1/2)`, valid when one of the states is pure.
pub fn gaussian_fidelity(a: &QuadratureCovariance, b: &QuadratureCovariance) -> Result<Fidelity> {
    let ma = a.as_two_mode()?;
    let mb = b.as_two_mode()?;
    let det = (ma + mb).determinant();
    if det <= 0.0 {
        return Err(Error::NonPositive {
            what: "det(Σa + Σb)",
            value: det,
        });
    }
    let is_pure = |m: &Matrix4<f64>| (16.0 * m.determinant() - 1.0).abs() < PURE_STATE_TOL;
    Ok(Fidelity {
        value: det.powf(-0.5),
        exact_regime: is_pure(&ma) || is_pure(&mb),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    // Closed-form PPT spectrum for two modes, independent of the eigen-solver.
    fn kappa_closed_form(sigma: &QuadratureCovariance) -> f64 {
        let a = sigma.block(0, 0).determinant();
        let b = sigma.block(1, 1).determinant();
        let c = sigma.block(0, 1).determinant();
        let delta = a + b - 2.0 * c;
        let det = sigma.determinant();
        ((delta - (delta * delta - 4.0 * det).sqrt()) / 2.0).sqrt()
    }

    #[test]
    fn vacuum_twb() {
        assert_eq!(twb_covariance(0.0), QuadratureCovariance::vacuum(2));
    }

    #[test]
    fn twb_entries() {
        let cm = twb_covariance(0.7);
        assert_abs_diff_eq!(cm.matrix()[(0, 0)], 1.4f64.cosh() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cm.matrix()[(0, 0)], 1.07545, epsilon = 1e-5);
        assert_abs_diff_eq!(cm.matrix()[(0, 2)], 0.95216, epsilon = 1e-5);
        assert_abs_diff_eq!(cm.matrix()[(1, 3)], -0.95216, epsilon = 1e-5);
        QuadratureCovariance::new(cm.into_matrix()).unwrap();
    }

    #[test]
    fn four_mode_blocks() {
        assert_eq!(
            four_mode_input_covariance(0.0, 0.0),
            QuadratureCovariance::vacuum(4)
        );
        let cm = four_mode_input_covariance(0.7, -0.7);
        let upper = twb_covariance(0.7);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(cm.matrix()[(i, j)], upper.matrix()[(i, j)]);
                let sign = if i % 2 == j % 2 && i != j { -1.0 } else { 1.0 };
                assert_abs_diff_eq!(
                    cm.matrix()[(i + 4, j + 4)],
                    sign * upper.matrix()[(i, j)],
                    epsilon = 1e-15
                );
                assert_eq!(cm.matrix()[(i, j + 4)], 0.0);
            }
        }
    }

    #[test]
    fn symplectic_identity_and_exchange() {
        let id = bs_pair_symplectic(0.0, 0.0);
        assert_eq!(id.matrix(), &DMatrix::identity(8, 8));
        let ex = bs_pair_symplectic(std::f64::consts::FRAC_PI_2, 0.0);
        let sigma = four_mode_input_covariance(0.3, 0.9);
        let out = evolve_covariance(&sigma, &ex).unwrap();
        // mode 1 now carries what mode 4 had and vice versa; 2 and 3 untouched
        assert_abs_diff_eq!(out.block(0, 0), sigma.block(3, 3), epsilon = 1e-15);
        assert_abs_diff_eq!(out.block(3, 3), sigma.block(0, 0), epsilon = 1e-15);
        assert_abs_diff_eq!(out.block(1, 1), sigma.block(1, 1), epsilon = 1e-15);
        assert_abs_diff_eq!(out.block(1, 2), sigma.block(1, 2), epsilon = 1e-15);
        assert!(ex.symplectic_defect() < 1e-12);
    }

    #[test]
    fn entit_and_swap_at_cm_level() {
        let bal = bs_pair_symplectic(FRAC_PI_4, FRAC_PI_4);
        let sigma = four_mode_input_covariance(0.7, 0.7);
        let out = evolve_covariance(&sigma, &bal).unwrap();
        assert!((out.matrix() - sigma.matrix()).amax() < 1e-12);

        let swapped =
            evolve_covariance(&four_mode_input_covariance(0.7, -0.7), &bal).unwrap();
        let r12 = reduce(&swapped, ModePartition::new(1, 2).unwrap()).unwrap();
        let thermal = 1.4f64.cosh() / 2.0;
        assert!((r12.matrix() - DMatrix::identity(4, 4) * thermal).amax() < 1e-12);
        let r13 = reduce(&swapped, ModePartition::new(1, 3).unwrap()).unwrap();
        assert!((r13.matrix() - twb_covariance(0.7).matrix()).amax() < 1e-12);
    }

    #[test]
    fn evolve_rejects_dimension_mismatch() {
        let err = evolve_covariance(&twb_covariance(0.1), &bs_pair_symplectic(0.1, 0.2));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reduce_uncorrelated_pairs() {
        let sigma = four_mode_input_covariance(0.4, 0.9);
        let r12 = reduce(&sigma, ModePartition::new(1, 2).unwrap()).unwrap();
        assert_eq!(r12, twb_covariance(0.4));
        let r13 = reduce(&sigma, ModePartition::new(1, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(r13.matrix()[(0, 0)], 0.8f64.cosh() / 2.0);
        assert_abs_diff_eq!(r13.matrix()[(2, 2)], 1.8f64.cosh() / 2.0);
        assert_eq!(r13.block(0, 1), Matrix2::zeros());
        assert!(ModePartition::new(2, 2).is_err());
        assert!(ModePartition::new(0, 2).is_err());
        assert!(ModePartition::new(1, 5).is_err());
        assert_eq!(ModePartition::new(1, 3).unwrap().traced(), (2, 4));
    }

    #[test]
    fn kappa_values() {
        let vac = QuadratureCovariance::vacuum(2);
        assert_abs_diff_eq!(min_ppt_symplectic_eigenvalue(&vac).unwrap(), 0.5, epsilon = 1e-14);
        let twb = twb_covariance(0.7);
        let k = min_ppt_symplectic_eigenvalue(&twb).unwrap();
        assert_abs_diff_eq!(k, (-1.4f64).exp() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k, 0.12330, epsilon = 1e-5);
        assert_abs_diff_eq!(k, kappa_closed_form(&twb), epsilon = 1e-12);
    }

    #[test]
    fn kappa_matches_closed_form_on_evolved_states() {
        for &(r, s, phi, psi) in &[(0.7, 0.2, 0.3, 0.9), (0.5, -0.4, 1.1, 0.2), (1.0, 0.0, 0.6, 0.6)] {
            let out = evolve_covariance(
                &four_mode_input_covariance(r, s),
                &bs_pair_symplectic(phi, psi),
            )
            .unwrap();
            for (h, k) in [(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)] {
                let red = reduce(&out, ModePartition::new(h, k).unwrap()).unwrap();
                let numeric = min_ppt_symplectic_eigenvalue(&red).unwrap();
                assert_abs_diff_eq!(numeric, kappa_closed_form(&red), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn purity_values() {
        assert_abs_diff_eq!(purity(&QuadratureCovariance::vacuum(2)).unwrap(), 1.0, epsilon = 1e-14);
        for r in [0.1, 0.5, 1.2] {
            assert_abs_diff_eq!(purity(&twb_covariance(r)).unwrap(), 1.0, epsilon = 1e-10);
        }
        let thermal = DMatrix::identity(4, 4) * (1.4f64.cosh() / 2.0);
        let mu = purity(&QuadratureCovariance::new(thermal).unwrap()).unwrap();
        assert_abs_diff_eq!(mu, 1.0 / 1.4f64.cosh().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(mu, 0.21617, epsilon = 5e-5);
    }

    #[test]
    fn eof_values() {
        assert_eq!(entanglement_of_formation(0.5).unwrap(), 0.0);
        assert_eq!(entanglement_of_formation(2.0).unwrap(), 0.0);
        // χ = cosh(2r)/2 for a pure TWB: E_f = cosh²r ln cosh²r − sinh²r ln sinh²r
        for (r, expected) in [(0.5f64, 0.6595), (0.7, 1.0341)] {
            let (c2, s2) = (r.cosh().powi(2), r.sinh().powi(2));
            let oracle = c2 * c2.ln() - s2 * s2.ln();
            let ef = entanglement_of_formation((-2.0 * r).exp() / 2.0).unwrap();
            assert_abs_diff_eq!(ef, oracle, epsilon = 1e-12);
            assert_abs_diff_eq!(ef, expected, epsilon = 1e-4);
        }
        assert!(entanglement_of_formation(0.0).is_err());
        assert!(entanglement_of_formation(-0.1).is_err());
    }

    #[test]
    fn fidelity_values() {
        let twb = twb_covariance(0.5);
        let f = gaussian_fidelity(&twb, &twb).unwrap();
        assert_abs_diff_eq!(f.value, 1.0, epsilon = 1e-12);
        assert!(f.exact_regime);
        let f = gaussian_fidelity(&QuadratureCovariance::vacuum(2), &twb).unwrap();
        assert_abs_diff_eq!(f.value, 1.0 / 0.5f64.cosh().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(f.value, 0.78645, epsilon = 1e-5);

        let thermal = QuadratureCovariance::new(DMatrix::identity(4, 4)).unwrap();
        assert!(!gaussian_fidelity(&thermal, &thermal).unwrap().exact_regime);
    }

    #[test]
    fn rejects_unphysical() {
        let mut m = DMatrix::identity(4, 4) * 0.5;
        m[(0, 1)] = 0.1;
        assert!(matches!(QuadratureCovariance::new(m), Err(Error::NotSymmetric(_))));
        let m = DMatrix::identity(4, 4) * 0.25;
        assert!(matches!(
            QuadratureCovariance::new(m),
            Err(Error::UncertaintyViolation(_))
        ));
        let m = -DMatrix::identity(4, 4);
        assert!(matches!(
            QuadratureCovariance::new(m),
            Err(Error::NotPositiveDefinite)
        ));
    }
}
