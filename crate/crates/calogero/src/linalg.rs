//! Dense matrix kernels: exponential, principal logarithm, square root,
//! eigenvalues and singular-value probes.
//!
//! The exponential and the factorizations (LU, SVD, Schur) come from
//! nalgebra. The principal logarithm is inverse scaling-and-squaring:
//! repeated Denman-Beavers square roots bring the argument close to the
//! identity, then the Mercator series is summed and scaled back.

use crate::error::{Error, Result};
use crate::{OpMatrix, Realization, C64};
use nalgebra::DMatrix;

/// Matrix exponential of a complex realization matrix.
pub fn expm(a: &Realization) -> Realization {
    a.exp()
}

/// Matrix exponential of a real operator matrix.
pub fn expm_real(a: &OpMatrix) -> OpMatrix {
    a.exp()
}

fn cplx_identity(n: usize) -> Realization {
    DMatrix::from_diagonal_element(n, n, C64::new(1.0, 0.0))
}

/// Principal matrix square root by the Denman-Beavers iteration.
///
/// Fails when the iteration stalls, which happens in particular for
/// eigenvalues on the closed negative real axis where no principal root
/// exists.
pub fn sqrtm(a: &Realization) -> Result<Realization> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = cplx_identity(n);
    let scale = a.norm().max(1.0);
    for _ in 0..80 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LogBranch("singular iterate in square root".into()))?;
        let y_next = (&y + z_inv) * C64::new(0.5, 0.0);
        let z_next = (&z + y_inv) * C64::new(0.5, 0.0);
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta < 1e-15 * scale {
            let residual = (&y * &y - a).norm() / scale;
            if residual < 1e-11 {
                return Ok(y);
            }
        }
    }
    Err(Error::LogBranch(
        "Denman-Beavers square root did not converge (eigenvalue on the branch cut?)".into(),
    ))
}

/// Principal matrix logarithm via inverse scaling-and-squaring.
pub fn logm(a: &Realization) -> Result<Realization> {
    let n = a.nrows();
    let id = cplx_identity(n);
    let mut b = a.clone();
    let mut squarings = 0u32;
    while (&b - &id).norm() > 0.25 {
        if squarings >= 40 {
            return Err(Error::LogBranch(
                "inverse scaling did not reach the series domain".into(),
            ));
        }
        b = sqrtm(&b)?;
        squarings += 1;
    }
    // Mercator series log(I + X) = X - X^2/2 + X^3/3 - ...
    let x = &b - &id;
    let mut power = x.clone();
    let mut sum = x.clone();
    for k in 2..200 {
        power *= &x;
        let term_scale = power.norm() / k as f64;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        sum += &power * C64::new(sign / k as f64, 0.0);
        if term_scale < 1e-18 {
            break;
        }
    }
    Ok(sum * C64::new(f64::powi(2.0, squarings as i32), 0.0))
}

/// Eigenvalues of a complex matrix through the Schur decomposition,
/// sorted lexicographically by (re, im).
pub fn eigenvalues(a: &Realization) -> Result<Vec<C64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = a
        .clone()
        .try_schur(1e-14, 200_000)
        .ok_or_else(|| Error::EigenFailure("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut eigs: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    sort_complex(&mut eigs);
    Ok(eigs)
}

/// Sort complex values lexicographically by (re, im).
pub fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Characteristic polynomial coefficients [c_1, ..., c_n] with
/// p(t) = t^n + c_1 t^{n-1} + ... + c_n, by the Faddeev-LeVerrier recursion.
///
/// Used as the comparison fallback when the eigenvalue solver gives up on a
/// degenerate spectrum.
pub fn char_poly(a: &Realization) -> Vec<C64> {
    let n = a.nrows();
    let id = cplx_identity(n);
    let mut m = a.clone();
    let mut coeffs = Vec::with_capacity(n);
    let mut c = -m.trace();
    coeffs.push(c);
    for k in 2..=n {
        m = a * (&m + &id * c);
        c = -m.trace() / C64::new(k as f64, 0.0);
        coeffs.push(c);
    }
    coeffs
}

/// trace(a * b) without forming the product.
pub fn trace_prod(a: &Realization, b: &Realization) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Smallest singular value of a real matrix.
pub fn smallest_singular_value(a: &OpMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return f64::INFINITY;
    }
    let svd = a.clone().svd(false, false);
    svd.singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Maximum distance between two complex multisets under greedy nearest
/// matching. Adequate for isospectral comparisons where deviations are far
/// below the spectral gaps.
pub fn spectrum_deviation(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut taken = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, y) in b.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let d = (x - y).norm();
            if d < best {
                best = d;
                best_j = j;
            }
        }
        if best_j == usize::MAX {
            return f64::INFINITY;
        }
        taken[best_j] = true;
        worst = worst.max(best);
    }
    worst
}
