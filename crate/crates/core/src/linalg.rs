//! Small dense helpers for 3x3 complex channels.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type CMatrix3 = Matrix3<Complex64>;
pub type CVector3 = Vector3<Complex64>;

/// Singular value decomposition with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd3 {
    pub u: CMatrix3,
    pub singular_values: [f64; 3],
    /// Right singular vectors as columns, so `A = U diag(s) V^H`.
    pub v: CMatrix3,
}

pub fn svd3(a: &CMatrix3) -> Svd3 {
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    let s = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    Svd3 {
        u: CMatrix3::from_fn(|r, c| u[(r, order[c])]),
        singular_values: order.map(|i| s[i]),
        v: CMatrix3::from_fn(|r, c| v[(r, order[c])]),
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix3) -> f64 {
    svd3(a).singular_values[0]
}

pub fn frobenius(a: &CMatrix3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_complex(a: &Matrix3<f64>) -> CMatrix3 {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Bilinear product `a^T b` (no conjugation): the received amplitude of a
/// coupling row `a` excited by transmit currents `b`.
pub fn bilinear(a: &CVector3, b: &CVector3) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
