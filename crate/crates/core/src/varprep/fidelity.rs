use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dense::hermitian_eigen;
use crate::error::{arg, Error, Result};

const PSD_TOLERANCE: f64 = 1e-10;
const MAX_DIM: usize = 1 << 12;

/// 1 − (Tr√(√ρ σ √ρ))², clamped to [0, 1].
pub fn infidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> Result<f64> {
    let d = rho.nrows();
    if !rho.is_square() || sigma.shape() != rho.shape() {
        return arg(format!("shapes {:?} and {:?} differ or are not square", rho.shape(), sigma.shape()));
    }
    if d > MAX_DIM {
        return Err(Error::Capacity { what: "dense infidelity", max: 12, got: d.trailing_zeros() as usize });
    }
    let sqrt_rho = psd_sqrt(rho, "rho")?;
    check_state(sigma, "sigma")?;
    let m = &sqrt_rho * sigma * &sqrt_rho;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let root_sum: f64 = hermitian_eigen(&m).0.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((1.0 - root_sum * root_sum).clamp(0.0, 1.0))
}

fn check_state(m: &DMatrix<C64>, name: &str) -> Result<Vec<f64>> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericInput(format!("{name} has non-finite entries")));
    }
    if (m - m.adjoint()).iter().any(|z| z.norm() > 1e-8) {
        return arg(format!("{name} is not Hermitian"));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return arg(format!("{name} has trace {tr}, expected 1"));
    }
    let vals = hermitian_eigen(m).0;
    if vals[0] < -PSD_TOLERANCE {
        return arg(format!("{name} has eigenvalue {} below zero", vals[0]));
    }
    Ok(vals)
}

fn psd_sqrt(m: &DMatrix<C64>, name: &str) -> Result<DMatrix<C64>> {
    check_state(m, name)?;
    let (vals, vecs) = hermitian_eigen(m);
    let roots = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| C64::new(v.max(0.0).sqrt(), 0.0)),
    ));
    Ok(&vecs * roots * vecs.adjoint())
}
