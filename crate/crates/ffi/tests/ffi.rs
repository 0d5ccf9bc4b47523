use std::ffi::CStr;
use std::ptr;

use entit_ffi::*;

fn last_error() -> String {
    let p = entit_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn twb_handle_roundtrip() {
    let r: f64 = 0.5;
    let mut cm = ptr::null_mut();
    unsafe {
        assert_eq!(entit_covariance_twb(r, &mut cm), EntitStatus::Ok);
        assert_eq!(entit_covariance_n_modes(cm), 2);
        let mut buf = [0.0; 16];
        assert_eq!(entit_covariance_entries(cm, buf.as_mut_ptr(), 16), EntitStatus::Ok);
        assert!((buf[0] - (2.0 * r).cosh() / 2.0).abs() < 1e-15);
        assert!((buf[2] - (2.0 * r).sinh() / 2.0).abs() < 1e-15);
        assert_eq!(entit_covariance_entries(cm, buf.as_mut_ptr(), 15), EntitStatus::BufferTooSmall);
        assert!(last_error().contains("16"));

        let mut k = 0.0;
        assert_eq!(entit_min_ppt_symplectic_eigenvalue(cm, &mut k), EntitStatus::Ok);
        assert!((k - (-2.0 * r).exp() / 2.0).abs() < 1e-14);
        let mut mu = 0.0;
        assert_eq!(entit_purity(cm, &mut mu), EntitStatus::Ok);
        assert!((mu - 1.0).abs() < 1e-12);
        entit_covariance_free(cm);
    }
}

#[test]
fn evolve_and_reduce_reproduce_transparency() {
    let (r, phi) = (0.5, std::f64::consts::FRAC_PI_4);
    unsafe {
        let mut input = ptr::null_mut();
        let mut out = ptr::null_mut();
        let mut pair = ptr::null_mut();
        let mut reference = ptr::null_mut();
        assert_eq!(entit_covariance_four_mode(r, r, &mut input), EntitStatus::Ok);
        assert_eq!(entit_covariance_evolve(input, phi, phi, &mut out), EntitStatus::Ok);
        assert_eq!(entit_covariance_reduce(out, 1, 2, &mut pair), EntitStatus::Ok);
        assert_eq!(entit_covariance_twb(r, &mut reference), EntitStatus::Ok);
        let mut f = 0.0;
        assert_eq!(entit_gaussian_fidelity(pair, reference, &mut f), EntitStatus::Ok);
        assert!((f - 1.0).abs() < 1e-12);
        for h in [input, out, pair, reference] {
            entit_covariance_free(h);
        }
    }
}

#[test]
fn invalid_inputs_report_status_and_message() {
    unsafe {
        let mut cm = ptr::null_mut();
        assert_eq!(entit_covariance_twb(f64::NAN, &mut cm), EntitStatus::InvalidArgument);
        assert!(cm.is_null());
        assert_eq!(entit_covariance_twb(0.3, ptr::null_mut()), EntitStatus::NullPointer);

        // violates the uncertainty relation
        let bad = [0.1, 0.0, 0.0, 0.1];
        assert_eq!(entit_covariance_from_entries(bad.as_ptr(), 2, &mut cm), EntitStatus::NotPhysical);
        assert!(!last_error().is_empty());

        let mut two = ptr::null_mut();
        assert_eq!(entit_covariance_twb(0.3, &mut two), EntitStatus::Ok);
        let mut red = ptr::null_mut();
        assert_ne!(entit_covariance_reduce(two, 1, 3, &mut red), EntitStatus::Ok);
        entit_covariance_free(two);
        entit_covariance_free(ptr::null_mut());
        assert_eq!(entit_covariance_n_modes(ptr::null()), 0);

        let mut ef = 0.0;
        assert_eq!(entit_entanglement_of_formation(-1.0, &mut ef), EntitStatus::InvalidArgument);
        assert_eq!(entit_entanglement_of_formation(0.5, &mut ef), EntitStatus::Ok);
        assert_eq!(ef, 0.0);
    }
}

#[test]
fn buffer_scans_match_core() {
    let x = [0.0, 0.5, 1.0];
    let (mut k12, mut k13) = ([0.0; 3], [0.0; 3]);
    let phi = std::f64::consts::FRAC_PI_4;
    unsafe {
        let st = entit_separability_scan(0.7, phi, phi, x.as_ptr(), 3, k12.as_mut_ptr(), k13.as_mut_ptr());
        assert_eq!(st, EntitStatus::Ok);
    }
    // x = 1 is transparent: pair (1,2) is the original TWB
    assert!((k12[2] - (-1.4f64).exp() / 2.0).abs() < 1e-12);
    assert!((k13[2] - 1.4f64.cosh() / 2.0).abs() < 1e-12);

    let s = [0.0, 0.3];
    let (mut ef, mut mu) = ([0.0; 2], [0.0; 2]);
    unsafe {
        let st = entit_bath_recovery(0.7, 0.05, s.as_ptr(), 2, ef.as_mut_ptr(), mu.as_mut_ptr());
        assert_eq!(st, EntitStatus::Ok);
        let st = entit_bath_recovery(0.7, 1.5, s.as_ptr(), 2, ef.as_mut_ptr(), mu.as_mut_ptr());
        assert_eq!(st, EntitStatus::InvalidArgument);
    }
    assert!(ef.iter().all(|v| v.is_finite() && *v >= 0.0));
    assert!(mu.iter().all(|v| *v > 0.0 && *v <= 1.0 + 1e-12));
}

#[test]
fn coefficients_and_report() {
    let phi = std::f64::consts::FRAC_PI_4;
    let mut c = EntitTwbCoefficients::default();
    unsafe {
        assert_eq!(entit_output_twb_coefficients(0.5, 0.5, phi, phi, &mut c), EntitStatus::Ok);
    }
    // balanced, equal squeezing: the original pairs come back untouched
    assert!((c.c12 - 0.5).abs() < 1e-12 && (c.c34 - 0.5).abs() < 1e-12);
    assert!(c.c13.abs() < 1e-12 && c.c24.abs() < 1e-12);

    let mut rep = EntitReport::default();
    unsafe {
        assert_eq!(entit_report(0.5, 0.5, phi, phi, 16, &mut rep), EntitStatus::Ok);
    }
    assert_eq!(rep.classification, 0);
    assert!((rep.fidelity_gaussian - 1.0).abs() < 1e-12);
    assert!(rep.fock_eigen_residual < 1e-8);
    unsafe {
        assert_eq!(entit_report(0.5, -0.5, phi, phi, 16, &mut rep), EntitStatus::Ok);
        assert_eq!(rep.classification, 1);
        assert_eq!(entit_report(1.2, 1.2, phi, phi, 8, &mut rep), EntitStatus::Truncation);
    }
}

#[test]
fn qubit_residuals() {
    let theta = [0.3, -0.7, 1.1, 0.2];
    let mut res = 1.0;
    unsafe {
        for b in 0..4 {
            assert_eq!(entit_bell_invariance_residual(b, theta.as_ptr(), &mut res), EntitStatus::Ok);
            assert!(res < 1e-12);
        }
        assert_eq!(entit_bell_invariance_residual(4, theta.as_ptr(), &mut res), EntitStatus::InvalidArgument);
    }

    // |00⟩ is invariant when all angles vanish
    let a = [1.0, 0.0, 0.0, 0.0];
    let zero = [0.0; 4];
    let (mut exact, mut phase) = (1.0, 1.0);
    unsafe {
        let st = entit_invariance_residual(a.as_ptr(), zero.as_ptr(), zero.as_ptr(), &mut exact, &mut phase);
        assert_eq!(st, EntitStatus::Ok);
        assert!(exact < 1e-12 && phase < 1e-12);
        let unnormalized = [1.0, 1.0, 0.0, 0.0];
        let st = entit_invariance_residual(unnormalized.as_ptr(), zero.as_ptr(), zero.as_ptr(), &mut exact, &mut phase);
        assert_eq!(st, EntitStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/entit.h")).unwrap();
    assert!(header.contains("#ifndef ENTIT_H"));
    assert!(header.contains("typedef struct EntitCovariance EntitCovariance;"));
    for name in [
        "entit_last_error_message",
        "entit_covariance_twb",
        "entit_covariance_four_mode",
        "entit_covariance_from_entries",
        "entit_covariance_free",
        "entit_covariance_evolve",
        "entit_covariance_reduce",
        "entit_covariance_entries",
        "entit_min_ppt_symplectic_eigenvalue",
        "entit_purity",
        "entit_entanglement_of_formation",
        "entit_gaussian_fidelity",
        "entit_output_twb_coefficients",
        "entit_separability_scan",
        "entit_bath_recovery",
        "entit_report",
        "entit_bell_invariance_residual",
        "entit_invariance_residual",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
