//! C interface to the neutral-inclusion library.
//!
//! Every fallible function returns an [`NiStatus`] and writes its results
//! through out-pointers. On failure a message is stored per thread and can be
//! read with [`ni_last_error_message`]. Maps, interface parameters and solvers
//! are opaque handles owned by the caller and released with the matching
//! `_free` function; freeing `NULL` is a no-op.
//!
//! Tensors are written row-major as four doubles `T11, T12, T21, T22`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use neutral_inclusion::bem::{self, beta_at_nodes, BoundaryMesh, DensitySolution, Grading, ImperfectSystem, PerfectSystem};
use neutral_inclusion::conformal::ConformalMap;
use neutral_inclusion::disk_spectral::{self, GammaModes};
use neutral_inclusion::error::Error;
use neutral_inclusion::interface::{self, InterfaceParameter};
use neutral_inclusion::tensor::PolarizationTensor;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CoefficientTooLarge = 3,
    NotInjective = 4,
    /// The point is inside the unit disk or the inclusion, or the inversion failed.
    OutsideDomain = 5,
    /// `|b|` is outside the closed-form range `[0, 2 - sqrt(3)]`.
    Inadmissible = 6,
    NegativeInterface = 7,
    CalibrationFailed = 8,
    CornerPoint = 9,
    GradingRequired = 10,
    Singular = 11,
    IllConditioned = 12,
    TooClose = 13,
    Degenerate = 14,
    Parse = 15,
    /// A Rust panic was caught at the boundary; this is a bug.
    Panic = 16,
}

impl From<&Error> for NiStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => NiStatus::InvalidArgument,
            Error::CoefficientTooLarge(_) => NiStatus::CoefficientTooLarge,
            Error::NotInjective(_) => NiStatus::NotInjective,
            Error::InsideUnitDisk { .. } | Error::InversionFailed { .. } => NiStatus::OutsideDomain,
            Error::Inadmissible(_) => NiStatus::Inadmissible,
            Error::NegativeInterface { .. } => NiStatus::NegativeInterface,
            Error::CalibrationFailed(_) => NiStatus::CalibrationFailed,
            Error::CornerPoint(_) => NiStatus::CornerPoint,
            Error::GradingRequired => NiStatus::GradingRequired,
            Error::Singular(_) => NiStatus::Singular,
            Error::IllConditioned(_) => NiStatus::IllConditioned,
            Error::TooClose { .. } => NiStatus::TooClose,
            Error::Degenerate(_) => NiStatus::Degenerate,
            Error::Parse(_) => NiStatus::Parse,
        }
    }
}

/// Exterior conformal map `zeta + b1/zeta + ...`.
pub struct NiMap(ConformalMap);

/// Interface parameter designed for a map.
pub struct NiInterface(InterfaceParameter);

/// Factored boundary-element system with the solutions for both unit fields.
pub struct NiSolver {
    mesh: BoundaryMesh,
    solutions: [DensitySolution; 2],
    tensor: PolarizationTensor,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(NiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(NiStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NiStatus::NullPointer, format!("{what} is NULL"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> NiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            NiStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            NiStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_tensor(out: *mut f64, t: &[[f64; 2]; 2]) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("tensor output"));
    }
    std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&[t[0][0], t[0][1], t[1][0], t[1][1]]);
    Ok(())
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("handle output"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ni_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ni_status_string(status: NiStatus) -> *const c_char {
    let s: &'static CStr = match status {
        NiStatus::Ok => c"ok",
        NiStatus::NullPointer => c"null pointer",
        NiStatus::InvalidArgument => c"invalid argument",
        NiStatus::CoefficientTooLarge => c"Laurent coefficient too large",
        NiStatus::NotInjective => c"map is not injective",
        NiStatus::OutsideDomain => c"point outside the domain",
        NiStatus::Inadmissible => c"|b| outside the closed-form range",
        NiStatus::NegativeInterface => c"interface parameter negative somewhere",
        NiStatus::CalibrationFailed => c"calibration failed",
        NiStatus::CornerPoint => c"corner point",
        NiStatus::GradingRequired => c"corner grading required",
        NiStatus::Singular => c"singular system",
        NiStatus::IllConditioned => c"ill-conditioned system",
        NiStatus::TooClose => c"evaluation point too close to the boundary",
        NiStatus::Degenerate => c"degenerate input",
        NiStatus::Parse => c"parse error",
        NiStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length in bytes.
/// With `buf == NULL` only the length is returned.
///
/// # Safety
/// `buf` must be NULL or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ni_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len()
    })
}

/// Map of the unit-capacity ellipse with semi-axis ratio `a : b`.
///
/// # Safety
/// `out` must be NULL or valid for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn ni_map_ellipse(a: f64, b: f64, out: *mut *mut NiMap) -> NiStatus {
    guard(|| emit(out, NiMap(ConformalMap::ellipse(a, b)?)))
}

/// `Phi(zeta) = zeta + 1/(4 zeta + 2)`.
///
/// # Safety
/// `out` must be NULL or valid for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn ni_map_droplet(out: *mut *mut NiMap) -> NiStatus {
    guard(|| emit(out, NiMap(ConformalMap::droplet())))
}

/// The identity map (unit disk).
///
/// # Safety
/// `out` must be NULL or valid for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn ni_map_identity(out: *mut *mut NiMap) -> NiStatus {
    guard(|| emit(out, NiMap(ConformalMap::identity())))
}

/// `zeta + sum_k (re[k] + i im[k]) zeta^{-(k+1)}` for `k < len`.
///
/// # Safety
/// `re` and `im` must be valid for `len` doubles; `out` must be NULL or valid
/// for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn ni_map_laurent(re: *const f64, im: *const f64, len: usize, out: *mut *mut NiMap) -> NiStatus {
    guard(|| {
        if len > 0 && (re.is_null() || im.is_null()) {
            return Err(null("coefficient array"));
        }
        let tail: Vec<Complex64> = if len == 0 {
            Vec::new()
        } else {
            let (re, im) = (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len));
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        emit(out, NiMap(ConformalMap::laurent(&tail)?))
    })
}

/// # Safety
/// `map` must be NULL or a handle from one of the `ni_map_*` constructors, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ni_map_free(map: *mut NiMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// First Laurent coefficient `b1`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_map_b(map: *const NiMap, out_re: *mut f64, out_im: *mut f64) -> NiStatus {
    guard(|| {
        let b = deref(map, "map")?.0.b_omega();
        write(out_re, b.re, "out_re")?;
        write(out_im, b.im, "out_im")
    })
}

/// Whether the boundary has a corner (a zero of `Phi'` on the unit circle).
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_map_has_corner(map: *const NiMap, out: *mut bool) -> NiStatus {
    guard(|| write(out, deref(map, "map")?.0.has_corners(), "out"))
}

/// `Phi(re + i im)` for `|zeta| >= 1`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_map_eval(map: *const NiMap, re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> NiStatus {
    guard(|| {
        let z = deref(map, "map")?.0.eval(Complex64::new(re, im))?;
        write(out_re, z.re, "out_re")?;
        write(out_im, z.im, "out_im")
    })
}

/// Exterior preimage `Phi^{-1}(re + i im)`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_map_invert(map: *const NiMap, re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> NiStatus {
    guard(|| {
        let zeta = deref(map, "map")?.0.invert(Complex64::new(re, im))?;
        write(out_re, zeta.re, "out_re")?;
        write(out_im, zeta.im, "out_im")
    })
}

/// Closed-form `(gamma0, gamma2)` for `|b| = b_abs`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_gamma_closed_form(b_abs: f64, gamma0: *mut f64, gamma2: *mut f64) -> NiStatus {
    guard(|| {
        let (g0, g2) = interface::gamma_closed_form(b_abs)?;
        write(gamma0, g0, "gamma0")?;
        write(gamma2, g2, "gamma2")
    })
}

/// `(gamma0, gamma2)` giving the disk tensor `2 pi diag(b_abs, -b_abs)` at truncation `truncation`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_gamma_calibrated(b_abs: f64, truncation: usize, gamma0: *mut f64, gamma2: *mut f64) -> NiStatus {
    guard(|| {
        let (g0, g2) = interface::calibrate_gamma(b_abs, truncation)?;
        write(gamma0, g0, "gamma0")?;
        write(gamma2, g2, "gamma2")
    })
}

/// Polarization tensor of the unit disk with `gamma = gamma0 + 2 gamma2 cos(2 theta - phase)`.
///
/// # Safety
/// `out` must be NULL or valid for four doubles.
#[no_mangle]
pub unsafe extern "C" fn ni_disk_polarization(gamma0: f64, gamma2: f64, phase: f64, truncation: usize, out: *mut f64) -> NiStatus {
    guard(|| {
        let t = disk_spectral::polarization(&GammaModes::two_harmonic(gamma0, gamma2, phase), truncation)?;
        write_tensor(out, &t.t)
    })
}

/// Closed-form interface parameter for `map`.
///
/// # Safety
/// `map` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_interface_closed_form(map: *const NiMap, out: *mut *mut NiInterface) -> NiStatus {
    guard(|| emit(out, NiInterface(InterfaceParameter::closed_form(&deref(map, "map")?.0)?)))
}

/// Interface parameter calibrated against the disk solver at `truncation`.
///
/// # Safety
/// `map` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_interface_calibrated(map: *const NiMap, truncation: usize, out: *mut *mut NiInterface) -> NiStatus {
    guard(|| emit(out, NiInterface(InterfaceParameter::calibrated(&deref(map, "map")?.0, truncation)?)))
}

/// # Safety
/// `iface` must be NULL or a handle from an `ni_interface_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ni_interface_free(iface: *mut NiInterface) {
    if !iface.is_null() {
        drop(Box::from_raw(iface));
    }
}

/// `gamma0`, `gamma2` and the phase of the `cos 2 theta` term.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_interface_coefficients(
    iface: *const NiInterface,
    gamma0: *mut f64,
    gamma2: *mut f64,
    phase: *mut f64,
) -> NiStatus {
    guard(|| {
        let p = &deref(iface, "interface")?.0;
        write(gamma0, p.gamma0, "gamma0")?;
        write(gamma2, p.gamma2, "gamma2")?;
        write(phase, p.phase, "phase")
    })
}

/// `beta` at the boundary point `Phi(e^{i theta})`.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_interface_beta(iface: *const NiInterface, theta: f64, out: *mut f64) -> NiStatus {
    guard(|| write(out, deref(iface, "interface")?.0.beta(theta)?, "out"))
}

fn finish_solver(
    mesh: BoundaryMesh,
    solve: impl Fn([f64; 2]) -> Result<DensitySolution, Error>,
    tensor: PolarizationTensor,
) -> Result<NiSolver, Failure> {
    let solutions = [solve([1.0, 0.0])?, solve([0.0, 1.0])?];
    Ok(NiSolver { mesh, solutions, tensor })
}

/// Imperfect-interface system on `nodes` boundary nodes (graded toward a corner if the map has one).
///
/// # Safety
/// `iface` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_imperfect(iface: *const NiInterface, nodes: usize, out: *mut *mut NiSolver) -> NiStatus {
    guard(|| {
        let p = &deref(iface, "interface")?.0;
        let mesh = BoundaryMesh::discretize(p.map(), nodes, Grading::for_map(p.map()))?;
        let sys = ImperfectSystem::assemble(&mesh, &beta_at_nodes(&mesh, p)?)?;
        let solver = finish_solver(mesh, |a| sys.solve(a), sys.polarization()?)?;
        emit(out, solver)
    })
}

/// Perfect-bonding (perfectly conducting core) system on `nodes` boundary nodes.
///
/// # Safety
/// `map` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_perfect(map: *const NiMap, nodes: usize, out: *mut *mut NiSolver) -> NiStatus {
    guard(|| {
        let m = &deref(map, "map")?.0;
        let mesh = BoundaryMesh::discretize(m, nodes, Grading::for_map(m))?;
        let sys = PerfectSystem::assemble(&mesh)?;
        let solver = finish_solver(mesh, |a| sys.solve(a), sys.polarization()?)?;
        emit(out, solver)
    })
}

/// # Safety
/// `solver` must be NULL or a handle from an `ni_solver_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_free(solver: *mut NiSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Polarization tensor computed by the solver.
///
/// # Safety
/// `solver` must be NULL or a live handle; `out` must be NULL or valid for four doubles.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_polarization(solver: *const NiSolver, out: *mut f64) -> NiStatus {
    guard(|| write_tensor(out, &deref(solver, "solver")?.tensor.t))
}

/// Number of boundary nodes.
///
/// # Safety
/// Pointers must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_nodes(solver: *const NiSolver, out: *mut usize) -> NiStatus {
    guard(|| write(out, deref(solver, "solver")?.mesh.len(), "out"))
}

unsafe fn evaluate(
    solver: *const NiSolver,
    a: [f64; 2],
    x: [f64; 2],
    out: *mut f64,
    eval: fn(&BoundaryMesh, &DensitySolution, Complex64) -> Result<f64, Error>,
) -> NiStatus {
    guard(|| {
        let s = deref(solver, "solver")?;
        let z = Complex64::new(x[0], x[1]);
        let u1 = eval(&s.mesh, &s.solutions[0], z)?;
        let u2 = eval(&s.mesh, &s.solutions[1], z)?;
        write(out, a[0] * u1 + a[1] * u2, "out")
    })
}

/// Exterior potential `u(x1, x2)` for the applied field `(a1, a2)`.
///
/// # Safety
/// `solver` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_field(solver: *const NiSolver, a1: f64, a2: f64, x1: f64, x2: f64, out: *mut f64) -> NiStatus {
    evaluate(solver, [a1, a2], [x1, x2], out, bem::eval_field)
}

/// Field perturbation `u(x) - a.x` for the applied field `(a1, a2)`.
///
/// # Safety
/// `solver` must be NULL or a live handle; `out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn ni_solver_perturbation(
    solver: *const NiSolver,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    out: *mut f64,
) -> NiStatus {
    evaluate(solver, [a1, a2], [x1, x2], out, bem::eval_perturbation)
}
