//! Thin wrappers over the LAPACK Hermitian eigensolvers (eigenvalues only).

extern crate openblas_src;

use num_complex::Complex64;

use crate::error::{Error, Result};

fn check(routine: &'static str, info: i32) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack { routine, info })
    }
}

fn dim(n: usize) -> Result<i32> {
    i32::try_from(n).map_err(|_| Error::InvalidArgument(format!("matrix dimension {n} exceeds LAPACK limits")))
}

/// Eigenvalues (ascending) of a dense Hermitian matrix given column-major;
/// only the upper triangle is read. `a` is overwritten.
pub(crate) fn zheev(n: usize, a: &mut [Complex64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let ni = dim(n)?;
    let lwork = (2 * n).max(1);
    let mut w = vec![0.0; n];
    let mut work = vec![Complex64::new(0.0, 0.0); lwork];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut info = 0;
    unsafe {
        lapack_sys::zheev_(
            b"N".as_ptr() as _,
            b"U".as_ptr() as _,
            &ni,
            a.as_mut_ptr() as _,
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr() as _,
            &dim(lwork)?,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check("zheev", info)?;
    Ok(w)
}

/// Eigenvalues of a Hermitian band matrix in LAPACK upper band storage:
/// `ab[kd + i - j + j * (kd + 1)] = A[i][j]` for `j - kd <= i <= j`.
pub(crate) fn zhbev(n: usize, kd: usize, ab: &mut [Complex64]) -> Result<Vec<f64>> {
    assert_eq!(ab.len(), n * (kd + 1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = vec![0.0; n];
    let mut work = vec![Complex64::new(0.0, 0.0); n];
    let mut rwork = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut z = [Complex64::new(0.0, 0.0)];
    let mut info = 0;
    unsafe {
        lapack_sys::zhbev_(
            b"N".as_ptr() as _,
            b"U".as_ptr() as _,
            &dim(n)?,
            &dim(kd)?,
            ab.as_mut_ptr() as _,
            &dim(kd + 1)?,
            w.as_mut_ptr(),
            z.as_mut_ptr() as _,
            &1,
            work.as_mut_ptr() as _,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    check("zhbev", info)?;
    Ok(w)
}

/// Real symmetric counterpart of [`zhbev`], same storage layout.
pub(crate) fn dsbev(n: usize, kd: usize, ab: &mut [f64]) -> Result<Vec<f64>> {
    assert_eq!(ab.len(), n * (kd + 1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = vec![0.0; n];
    let mut work = vec![0.0; (3 * n).saturating_sub(2).max(1)];
    let mut z = [0.0];
    let mut info = 0;
    unsafe {
        lapack_sys::dsbev_(
            b"N".as_ptr() as _,
            b"U".as_ptr() as _,
            &dim(n)?,
            &dim(kd)?,
            ab.as_mut_ptr(),
            &dim(kd + 1)?,
            w.as_mut_ptr(),
            z.as_mut_ptr(),
            &1,
            work.as_mut_ptr(),
            &mut info,
        );
    }
    check("dsbev", info)?;
    Ok(w)
}
