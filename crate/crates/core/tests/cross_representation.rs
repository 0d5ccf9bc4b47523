//! Gaussian covariance predictions against the truncated Fock oracle.

use std::f64::consts::FRAC_PI_4;

use entit_core::fock::{self, BsMethod, FockTensor4};
use entit_core::gaussian::{self, ModePartition};
use entit_core::protocols::{self, BeamSplitterPair, Classification};

const CUTOFF: usize = 16;

fn evolved(r: f64, s: f64, pair: BeamSplitterPair) -> FockTensor4 {
    let state = fock::product_state(&fock::twb_fock(r, CUTOFF), &fock::twb_fock(s, CUTOFF)).unwrap();
    fock::apply_bs_pair_fock(&state, pair.phi, pair.psi, BsMethod::Exponential).unwrap()
}

fn moment_gap(r: f64, s: f64, pair: BeamSplitterPair) -> f64 {
    let state = evolved(r, s, pair);
    let cm = protocols::output_covariance(r, s, pair).unwrap();
    let mut worst: f64 = 0.0;
    for (h, k) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
        let part = ModePartition::new(h, k).unwrap();
        let fock_cm = fock::reduced_moments(&state, part).unwrap();
        let gauss_cm = gaussian::reduce(&cm, part).unwrap();
        worst = worst.max((fock_cm.matrix() - gauss_cm.matrix()).amax());
    }
    worst
}

#[test]
fn moments_agree_at_moderate_squeezing() {
    for (r, s) in [(0.3, 0.3), (0.5, 0.5), (0.5, -0.5), (0.5, 0.2), (0.2, -0.4)] {
        for pair in [BeamSplitterPair::balanced(), BeamSplitterPair::new(0.3, 1.1)] {
            let gap = moment_gap(r, s, pair);
            assert!(gap < 1e-6, "r={r} s={s} {pair:?}: {gap:e}");
        }
    }
}

#[test]
fn moment_gap_tracks_the_truncation_tail() {
    // the gap is set by the analytic tail, roughly (N+1)·λ^{2(N+1)} per pair
    for (r, s) in [(0.7, 0.7), (0.7, -0.7), (0.7, 0.3)] {
        let gap = moment_gap(r, s, BeamSplitterPair::balanced());
        let tail = fock::twb_tail(r, CUTOFF);
        assert!(gap < 2.0 * (CUTOFF + 1) as f64 * tail / r.tanh(), "r={r} s={s}: {gap:e}");
    }
}

#[test]
fn fidelities_agree_up_to_strong_squeezing() {
    for (r, s) in [(0.7, 0.7), (0.7, 0.3), (0.7, -0.7), (0.5, 0.0), (0.3, 0.7)] {
        for pair in [BeamSplitterPair::balanced(), BeamSplitterPair::new(0.4, 0.9)] {
            let rep = protocols::entit_report(r, s, pair, CUTOFF).unwrap();
            assert!(rep.consistent(), "r={r} s={s}: {:e}", rep.fidelity_discrepancy());
        }
    }
}

#[test]
fn swapped_pair_matches_reference_in_both_pictures() {
    let r = 0.5;
    let state = evolved(r, -r, BeamSplitterPair::balanced());
    let part = ModePartition::new(1, 3).unwrap();
    let fid = fock::pure_state_overlap(&state, part, &fock::twb_fock(r, CUTOFF)).unwrap();
    assert!((fid - 1.0).abs() < 1e-6);
    let cm = fock::reduced_moments(&state, part).unwrap();
    assert!((cm.matrix() - gaussian::twb_covariance(r).matrix()).amax() < 1e-6);
}

#[test]
fn report_classifies_the_three_regimes() {
    let balanced = BeamSplitterPair::balanced();
    let rep = protocols::entit_report(0.5, 0.5, balanced, CUTOFF).unwrap();
    assert_eq!(rep.classification, Classification::Transparent);
    assert!((rep.fidelity_gaussian - 1.0).abs() < 1e-12);

    let rep = protocols::entit_report(0.5, -0.5, balanced, CUTOFF).unwrap();
    assert_eq!(rep.classification, Classification::Swapped);
    assert!(rep.swap_overlap > 1.0 - 1e-6);

    let rep = protocols::entit_report(0.5, 0.2, balanced, CUTOFF).unwrap();
    assert_eq!(rep.classification, Classification::Generic);
    assert!(rep.fidelity_gaussian < 1.0);
}

#[test]
fn report_rejects_coarse_cutoff() {
    assert!(protocols::entit_report(1.2, 1.2, BeamSplitterPair::new(FRAC_PI_4, FRAC_PI_4), 8).is_err());
}
