//! C ABI over `entit-core`.
//!
//! Covariance matrices cross the boundary as opaque handles owned by the caller and
//! released with [`entit_covariance_free`]. Every fallible call returns an
//! [`EntitStatus`]; the message of the most recent failure on the calling thread is
//! available from [`entit_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entit_core::gaussian::{self, ModePartition, QuadratureCovariance};
use entit_core::protocols::{self, BeamSplitterPair, Classification};
use entit_core::qubit::{self, BellState, PauliAngles, TwoQubitAmplitudes};
use entit_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPhysical = 3,
    DimensionMismatch = 4,
    Truncation = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Opaque covariance matrix handle.
pub struct EntitCovariance {
    inner: QuadratureCovariance,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntitTwbCoefficients {
    pub c12: f64,
    pub c34: f64,
    pub c13: f64,
    pub c24: f64,
}

/// `0` transparent, `1` swapped, `2` generic.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntitReport {
    pub classification: i32,
    pub cm_roundtrip_error: f64,
    pub fock_eigen_residual: f64,
    pub overlap: f64,
    pub swap_overlap: f64,
    pub fidelity_gaussian: f64,
    pub fidelity_fock: f64,
    pub truncation_loss: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> EntitStatus {
    match err {
        Error::NotSymmetric(_) | Error::NotPositiveDefinite | Error::UncertaintyViolation(_) => {
            EntitStatus::NotPhysical
        }
        Error::DimensionMismatch { .. } | Error::CutoffMismatch(..) => EntitStatus::DimensionMismatch,
        Error::CutoffOverflow { .. } | Error::TruncationTooCoarse { .. } => EntitStatus::Truncation,
        Error::Io(_) | Error::Csv(_) => EntitStatus::Internal,
        _ => EntitStatus::InvalidArgument,
    }
}

fn fail(status: EntitStatus, msg: impl Into<String>) -> EntitStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), EntitStatus>) -> EntitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntitStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EntitStatus::Internal, "internal panic"),
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, EntitStatus>;
}

impl<T> IntoStatus<T> for entit_core::Result<T> {
    fn status(self) -> Result<T, EntitStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, EntitStatus> {
    // SAFETY: caller guarantees `p` is null or valid for reads.
    unsafe { p.as_ref() }.ok_or_else(|| fail(EntitStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), EntitStatus> {
    if p.is_null() {
        return Err(fail(EntitStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and the caller guarantees it is valid for writes.
    unsafe { p.write(value) };
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], EntitStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(EntitStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], EntitStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(EntitStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: caller guarantees `len` writable elements, not aliased.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

unsafe fn emit(out: *mut *mut EntitCovariance, cm: QuadratureCovariance) -> Result<(), EntitStatus> {
    let handle = Box::into_raw(Box::new(EntitCovariance { inner: cm }));
    // SAFETY: forwarded from the caller's contract on `out`.
    unsafe { write_out(out, handle, "out") }.inspect_err(|_| {
        // SAFETY: `handle` was just created by `Box::into_raw` and never shared.
        drop(unsafe { Box::from_raw(handle) });
    })
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn entit_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Two-mode squeezed vacuum covariance.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_twb(r: f64, out: *mut *mut EntitCovariance) -> EntitStatus {
    guard(|| {
        if !r.is_finite() {
            return Err(fail(EntitStatus::InvalidArgument, "r must be finite"));
        }
        unsafe { emit(out, gaussian::twb_covariance(r)) }
    })
}

/// Four-mode input `TWB(r) ⊕ TWB(s)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_four_mode(r: f64, s: f64, out: *mut *mut EntitCovariance) -> EntitStatus {
    guard(|| {
        if !(r.is_finite() && s.is_finite()) {
            return Err(fail(EntitStatus::InvalidArgument, "r and s must be finite"));
        }
        unsafe { emit(out, gaussian::four_mode_input_covariance(r, s)) }
    })
}

/// Builds a covariance from `dim × dim` row-major entries; `dim` must be even.
///
/// # Safety
/// `entries` must hold `dim * dim` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_from_entries(
    entries: *const f64,
    dim: usize,
    out: *mut *mut EntitCovariance,
) -> EntitStatus {
    guard(|| {
        let data = unsafe { slice(entries, dim * dim, "entries")? };
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, data);
        let cm = QuadratureCovariance::new(m).status()?;
        unsafe { emit(out, cm) }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `cm` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_free(cm: *mut EntitCovariance) {
    if !cm.is_null() {
        // SAFETY: caller guarantees a live handle created by `Box::into_raw`.
        drop(unsafe { Box::from_raw(cm) });
    }
}

/// Number of modes, or 0 for a null handle.
///
/// # Safety
/// `cm` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_n_modes(cm: *const EntitCovariance) -> usize {
    unsafe { cm.as_ref() }.map_or(0, |c| c.inner.n_modes())
}

/// Copies the `2n × 2n` entries row-major into `buf`.
///
/// # Safety
/// `cm` must be a live handle; `buf` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_entries(cm: *const EntitCovariance, buf: *mut f64, len: usize) -> EntitStatus {
    guard(|| {
        let cm = unsafe { deref(cm, "cm")? };
        let m = cm.inner.matrix();
        let need = m.nrows() * m.ncols();
        if len < need {
            return Err(fail(EntitStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        let buf = unsafe { slice_mut(buf, need, "buf")? };
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                buf[i * m.ncols() + j] = m[(i, j)];
            }
        }
        Ok(())
    })
}

/// Evolves a four-mode covariance through the beam-splitter pair.
///
/// # Safety
/// `cm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_evolve(
    cm: *const EntitCovariance,
    phi: f64,
    psi: f64,
    out: *mut *mut EntitCovariance,
) -> EntitStatus {
    guard(|| {
        let cm = unsafe { deref(cm, "cm")? };
        let evolved = gaussian::evolve_covariance(&cm.inner, &gaussian::bs_pair_symplectic(phi, psi)).status()?;
        unsafe { emit(out, evolved) }
    })
}

/// Reduced state of modes `first`, `second` (one-based).
///
/// # Safety
/// `cm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_covariance_reduce(
    cm: *const EntitCovariance,
    first: usize,
    second: usize,
    out: *mut *mut EntitCovariance,
) -> EntitStatus {
    guard(|| {
        let cm = unsafe { deref(cm, "cm")? };
        let part = ModePartition::new(first, second).status()?;
        let reduced = gaussian::reduce(&cm.inner, part).status()?;
        unsafe { emit(out, reduced) }
    })
}

/// Smallest symplectic eigenvalue of the partial transpose of a two-mode state.
///
/// # Safety
/// `cm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_min_ppt_symplectic_eigenvalue(cm: *const EntitCovariance, out: *mut f64) -> EntitStatus {
    guard(|| {
        let cm = unsafe { deref(cm, "cm")? };
        let k = gaussian::min_ppt_symplectic_eigenvalue(&cm.inner).status()?;
        unsafe { write_out(out, k, "out") }
    })
}

/// # Safety
/// `cm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_purity(cm: *const EntitCovariance, out: *mut f64) -> EntitStatus {
    guard(|| {
        let cm = unsafe { deref(cm, "cm")? };
        let mu = gaussian::purity(&cm.inner).status()?;
        unsafe { write_out(out, mu, "out") }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_entanglement_of_formation(kappa: f64, out: *mut f64) -> EntitStatus {
    guard(|| {
        let ef = gaussian::entanglement_of_formation(kappa).status()?;
        unsafe { write_out(out, ef, "out") }
    })
}

/// Fidelity of two two-mode states, at least one pure.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_gaussian_fidelity(
    a: *const EntitCovariance,
    b: *const EntitCovariance,
    out: *mut f64,
) -> EntitStatus {
    guard(|| {
        let (a, b) = unsafe { (deref(a, "a")?, deref(b, "b")?) };
        let f = gaussian::gaussian_fidelity(&a.inner, &b.inner).status()?;
        unsafe { write_out(out, f.value, "out") }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_output_twb_coefficients(
    r: f64,
    s: f64,
    phi: f64,
    psi: f64,
    out: *mut EntitTwbCoefficients,
) -> EntitStatus {
    guard(|| {
        let c = protocols::output_twb_coefficients(r, s, phi, psi);
        let value = EntitTwbCoefficients {
            c12: c.c12,
            c34: c.c34,
            c13: c.c13,
            c24: c.c24,
        };
        unsafe { write_out(out, value, "out") }
    })
}

/// κ̃₋ of pairs (1,2) and (1,3) for `s = x·r` at each of the `n` grid points.
///
/// # Safety
/// `x` must hold `n` readable values; `kappa12` and `kappa13` `n` writable values each.
#[no_mangle]
pub unsafe extern "C" fn entit_separability_scan(
    r: f64,
    phi: f64,
    psi: f64,
    x: *const f64,
    n: usize,
    kappa12: *mut f64,
    kappa13: *mut f64,
) -> EntitStatus {
    guard(|| {
        let grid = unsafe { slice(x, n, "x")? };
        let rows = protocols::separability_scan(r, grid, BeamSplitterPair::new(phi, psi)).status()?;
        let (k12, k13) = unsafe { (slice_mut(kappa12, n, "kappa12")?, slice_mut(kappa13, n, "kappa13")?) };
        for (i, row) in rows.iter().enumerate() {
            k12[i] = row.kappa12;
            k13[i] = row.kappa13;
        }
        Ok(())
    })
}

/// Entanglement of formation and purity of pair (1,2) behind loss `gamma`, fed by TWB(`s`).
///
/// # Safety
/// `s` must hold `n` readable values; `ef` and `purity` `n` writable values each.
#[no_mangle]
pub unsafe extern "C" fn entit_bath_recovery(
    r: f64,
    gamma: f64,
    s: *const f64,
    n: usize,
    ef: *mut f64,
    purity: *mut f64,
) -> EntitStatus {
    guard(|| {
        let grid = unsafe { slice(s, n, "s")? };
        let rows = protocols::bath_recovery_curve(r, gamma, grid).status()?;
        let (ef, mu) = unsafe { (slice_mut(ef, n, "ef")?, slice_mut(purity, n, "purity")?) };
        for (i, row) in rows.iter().enumerate() {
            ef[i] = row.ef;
            mu[i] = row.purity;
        }
        Ok(())
    })
}

/// Runs both engines on one scenario.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_report(
    r: f64,
    s: f64,
    phi: f64,
    psi: f64,
    cutoff: usize,
    out: *mut EntitReport,
) -> EntitStatus {
    guard(|| {
        let rep = protocols::entit_report(r, s, BeamSplitterPair::new(phi, psi), cutoff).status()?;
        let value = EntitReport {
            classification: match rep.classification {
                Classification::Transparent => 0,
                Classification::Swapped => 1,
                Classification::Generic => 2,
            },
            cm_roundtrip_error: rep.cm_roundtrip_error,
            fock_eigen_residual: rep.fock_eigen_residual,
            overlap: rep.overlap,
            swap_overlap: rep.swap_overlap,
            fidelity_gaussian: rep.fidelity_gaussian,
            fidelity_fock: rep.fidelity_fock,
            truncation_loss: rep.truncation_loss,
        };
        unsafe { write_out(out, value, "out") }
    })
}

/// `‖U(θ,−θ)|B⟩|B⟩ − |B⟩|B⟩‖` for Bell index 0..3 (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
///
/// # Safety
/// `theta` must hold 4 readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_bell_invariance_residual(bell: u32, theta: *const f64, out: *mut f64) -> EntitStatus {
    guard(|| {
        let bell = BellState::from_index(bell as usize)
            .ok_or_else(|| fail(EntitStatus::InvalidArgument, format!("Bell index {bell} out of range")))?;
        let t = unsafe { slice(theta, 4, "theta")? };
        let angles = PauliAngles::new([t[0], t[1], t[2], t[3]]).status()?;
        unsafe { write_out(out, qubit::bell_invariance_residual(bell, angles), "out") }
    })
}

/// Exact and phase-minimized residuals for the doubled real input `a` (row-major a00, a01, a10, a11).
///
/// # Safety
/// `a`, `theta`, `phi` must hold 4 readable values each; `exact` and `phase` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn entit_invariance_residual(
    a: *const f64,
    theta: *const f64,
    phi: *const f64,
    exact: *mut f64,
    phase: *mut f64,
) -> EntitStatus {
    guard(|| {
        let (a, t, p) = unsafe { (slice(a, 4, "a")?, slice(theta, 4, "theta")?, slice(phi, 4, "phi")?) };
        let amps = TwoQubitAmplitudes::new([[a[0], a[1]], [a[2], a[3]]]).status()?;
        let t = PauliAngles::new([t[0], t[1], t[2], t[3]]).status()?;
        let p = PauliAngles::new([p[0], p[1], p[2], p[3]]).status()?;
        let (e, ph) = qubit::invariance_residual(&amps, t, p);
        unsafe {
            write_out(exact, e, "exact")?;
            write_out(phase, ph, "phase")
        }
    })
}
