//! C ABI for `altdiam`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`AltdiamStatus`]; on failure a message is available from
//! [`altdiam_last_error`] until the next failing call on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`altdiam_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use altdiam::census::{self, CensusError};
use altdiam::decompose::{decompose_two, verify_decomposition, Order};
use altdiam::format::{self, FormatError};
use altdiam::linalg::{self, BlockSplit, FieldMatrix, LinalgError, LinearDecomposition, PrimeField};
use altdiam::perm::{Decomposition, GridPermutation, PermError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltdiamStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range, e.g. an unknown order code.
    InvalidArgument = 2,
    /// Text or JSON input could not be parsed.
    ParseError = 3,
    /// The input does not describe a bijection of the stated shape.
    InvalidPermutation = 4,
    /// A matrix that must be invertible is not, or the field is invalid.
    LinearAlgebra = 5,
    /// The instance exceeds an enumeration limit.
    InstanceTooLarge = 6,
    /// An internal consistency check failed.
    Internal = 7,
}

/// Stage pattern of a three-stage factorization.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltdiamOrder {
    Rlr = 0,
    Lrl = 1,
}

impl From<AltdiamOrder> for Order {
    fn from(o: AltdiamOrder) -> Self {
        match o {
            AltdiamOrder::Rlr => Order::Rlr,
            AltdiamOrder::Lrl => Order::Lrl,
        }
    }
}

/// A permutation of an `m x n` grid.
pub struct AltdiamPermutation(GridPermutation);

/// An alternating three-stage factorization of a grid permutation.
pub struct AltdiamDecomposition(Decomposition);

/// A square matrix over a prime field.
pub struct AltdiamMatrix(FieldMatrix);

/// A factorization of an invertible matrix into block stages.
pub struct AltdiamLinearDecomposition(LinearDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul bytes removed")));
}

struct Error(AltdiamStatus, String);

impl From<PermError> for Error {
    fn from(e: PermError) -> Self {
        Error(AltdiamStatus::InvalidPermutation, e.to_string())
    }
}

impl From<LinalgError> for Error {
    fn from(e: LinalgError) -> Self {
        Error(AltdiamStatus::LinearAlgebra, e.to_string())
    }
}

impl From<FormatError> for Error {
    fn from(e: FormatError) -> Self {
        let status = match e {
            FormatError::Perm(_) | FormatError::Multi(_) | FormatError::Sparse(_) => AltdiamStatus::InvalidPermutation,
            FormatError::Linalg(_) => AltdiamStatus::LinearAlgebra,
            FormatError::Parse { .. } | FormatError::Json(_) | FormatError::Poset(_) => AltdiamStatus::ParseError,
        };
        Error(status, e.to_string())
    }
}

impl From<CensusError> for Error {
    fn from(e: CensusError) -> Self {
        let status = match e {
            CensusError::InstanceTooLarge { .. } => AltdiamStatus::InstanceTooLarge,
            CensusError::BadDims(_) | CensusError::BadAxis { .. } => AltdiamStatus::InvalidArgument,
            CensusError::ConsistencyViolation(_) | CensusError::Threads(_) => AltdiamStatus::Internal,
        };
        Error(status, e.to_string())
    }
}

fn null(what: &str) -> Error {
    Error(AltdiamStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> AltdiamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AltdiamStatus::Ok,
        Ok(Err(Error(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AltdiamStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Error(AltdiamStatus::ParseError, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Error> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| null(what))
}

fn order_from(code: u32) -> Result<Order, Error> {
    match code {
        0 => Ok(AltdiamOrder::Rlr.into()),
        1 => Ok(AltdiamOrder::Lrl.into()),
        _ => Err(Error(AltdiamStatus::InvalidArgument, format!("unknown order code {code}"))),
    }
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn altdiam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn altdiam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a permutation from its image table: `table[a * n + b]` is the
/// linear index `a2 * n + b2` of the image of `(a, b)`; `len` must be `m * n`.
///
/// # Safety
/// `table` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_from_table(
    m: usize,
    n: usize,
    table: *const usize,
    len: usize,
    out: *mut *mut AltdiamPermutation,
) -> AltdiamStatus {
    guard(|| {
        if table.is_null() && len > 0 {
            return Err(null("table"));
        }
        if Some(len) != m.checked_mul(n) {
            return Err(Error(AltdiamStatus::InvalidArgument, format!("table has {len} entries, expected {m}*{n}")));
        }
        let data = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(table, len).to_vec() };
        let p = GridPermutation::from_table(m, n, data)?;
        write_out(out, AltdiamPermutation(p))
    })
}

/// Parses a permutation from its JSON or text form.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_parse(
    text: *const c_char,
    out: *mut *mut AltdiamPermutation,
) -> AltdiamStatus {
    guard(|| {
        let p = format::read_grid(read_str(text, "text")?)?;
        write_out(out, AltdiamPermutation(p))
    })
}

/// # Safety
/// `p` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_free(p: *mut AltdiamPermutation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the grid dimensions.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_dims(
    p: *const AltdiamPermutation,
    m: *mut usize,
    n: *mut usize,
) -> AltdiamStatus {
    guard(|| {
        let p = handle(p, "permutation")?;
        if m.is_null() || n.is_null() {
            return Err(null("output pointer"));
        }
        (*m, *n) = p.0.dims();
        Ok(())
    })
}

/// Image of the cell `(a, b)`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_apply(
    p: *const AltdiamPermutation,
    a: usize,
    b: usize,
    a_out: *mut usize,
    b_out: *mut usize,
) -> AltdiamStatus {
    guard(|| {
        let p = handle(p, "permutation")?;
        if a_out.is_null() || b_out.is_null() {
            return Err(null("output pointer"));
        }
        let (m, n) = p.0.dims();
        if a >= m || b >= n {
            return Err(PermError::RangeViolation { point: (a, b), m, n }.into());
        }
        (*a_out, *b_out) = p.0.apply((a, b));
        Ok(())
    })
}

/// JSON form `{"m","n","map"}`; free the result with [`altdiam_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_permutation_to_json(
    p: *const AltdiamPermutation,
    out: *mut *mut c_char,
) -> AltdiamStatus {
    guard(|| {
        let p = handle(p, "permutation")?;
        write_string(out, serde_json::to_string(&p.0).expect("permutations serialize"))
    })
}

/// Factors `p` into three alternating stages; `order` is an [`AltdiamOrder`].
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decompose(
    p: *const AltdiamPermutation,
    order: u32,
    out: *mut *mut AltdiamDecomposition,
) -> AltdiamStatus {
    guard(|| {
        let p = handle(p, "permutation")?;
        let d = decompose_two(&p.0, order_from(order)?);
        write_out(out, AltdiamDecomposition(d))
    })
}

/// Parses a decomposition from JSON.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decomposition_parse(
    json: *const c_char,
    out: *mut *mut AltdiamDecomposition,
) -> AltdiamStatus {
    guard(|| {
        let d = format::read_decomposition(read_str(json, "json")?)?;
        write_out(out, AltdiamDecomposition(d))
    })
}

/// # Safety
/// `d` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decomposition_free(d: *mut AltdiamDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of stages, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decomposition_stage_count(d: *const AltdiamDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.0.stages.len())
}

/// JSON form `{"order","m","n","stages"}`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decomposition_to_json(
    d: *const AltdiamDecomposition,
    out: *mut *mut c_char,
) -> AltdiamStatus {
    guard(|| {
        let d = handle(d, "decomposition")?;
        write_string(out, serde_json::to_string(&d.0).expect("decompositions serialize"))
    })
}

/// Sets `*ok` to whether `d` certifies `p`. A mismatch is not an error: the
/// call returns `Ok` with `*ok = false` and describes the first mismatch in
/// [`altdiam_last_error`].
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn altdiam_verify(
    d: *const AltdiamDecomposition,
    p: *const AltdiamPermutation,
    ok: *mut bool,
) -> AltdiamStatus {
    guard(|| {
        let d = handle(d, "decomposition")?;
        let p = handle(p, "permutation")?;
        if ok.is_null() {
            return Err(null("output pointer"));
        }
        let v = verify_decomposition(&d.0, &p.0)?;
        if let Some(f) = &v.failure {
            set_error(f.to_string());
        }
        *ok = v.ok;
        Ok(())
    })
}

/// Builds a `rows x cols` matrix over `F_p` from row-major entries, which
/// are reduced modulo `p`.
///
/// # Safety
/// `entries` must point to `rows * cols` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_matrix_new(
    p: u64,
    rows: usize,
    cols: usize,
    entries: *const u64,
    out: *mut *mut AltdiamMatrix,
) -> AltdiamStatus {
    guard(|| {
        let len =
            rows.checked_mul(cols).ok_or_else(|| Error(AltdiamStatus::InvalidArgument, "shape overflows".into()))?;
        if entries.is_null() && len > 0 {
            return Err(null("entries"));
        }
        let data = if len == 0 { &[][..] } else { std::slice::from_raw_parts(entries, len) };
        let m = FieldMatrix::new(PrimeField::new(p)?, rows, cols, data)?;
        write_out(out, AltdiamMatrix(m))
    })
}

/// # Safety
/// `m` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn altdiam_matrix_free(m: *mut AltdiamMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Factors an invertible matrix into block stages for the split `m + n`;
/// `order` is an [`AltdiamOrder`].
///
/// # Safety
/// `mat` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_decompose_linear(
    mat: *const AltdiamMatrix,
    split_m: usize,
    split_n: usize,
    order: u32,
    out: *mut *mut AltdiamLinearDecomposition,
) -> AltdiamStatus {
    guard(|| {
        let mat = handle(mat, "matrix")?;
        let split = BlockSplit::new(split_m, split_n)?;
        let d = linalg::decompose_linear_ordered(&mat.0, split, order_from(order)?)?;
        write_out(out, AltdiamLinearDecomposition(d))
    })
}

/// # Safety
/// `d` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn altdiam_linear_decomposition_free(d: *mut AltdiamLinearDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// JSON form `{"order","split","stages"}`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_linear_decomposition_to_json(
    d: *const AltdiamLinearDecomposition,
    out: *mut *mut c_char,
) -> AltdiamStatus {
    guard(|| {
        let d = handle(d, "linear decomposition")?;
        write_string(out, serde_json::to_string(&d.0).expect("decompositions serialize"))
    })
}

/// Sets `*ok` to whether the stages have the right block shapes and
/// multiply to `mat`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn altdiam_linear_verify(
    d: *const AltdiamLinearDecomposition,
    mat: *const AltdiamMatrix,
    ok: *mut bool,
) -> AltdiamStatus {
    guard(|| {
        let d = handle(d, "linear decomposition")?;
        let mat = handle(mat, "matrix")?;
        if ok.is_null() {
            return Err(null("output pointer"));
        }
        let v = linalg::verify_linear(&d.0, &mat.0)?;
        if let Some(f) = &v.failure {
            set_error(f.to_string());
        }
        *ok = v.ok;
        Ok(())
    })
}

/// Census report of `Sym(m x n)` as JSON, for `m * n <= 9`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn altdiam_census_json(
    m: usize,
    n: usize,
    threads: usize,
    out: *mut *mut c_char,
) -> AltdiamStatus {
    guard(|| {
        let report = census::census(m, n, threads)?;
        write_string(out, serde_json::to_string(&report).expect("reports serialize"))
    })
}
