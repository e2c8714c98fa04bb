//! Mutual inductance between coils and tri-axis coil sets.
//!
//! For transmit orientation `u_p` and receive orientation `u_q` the mutual
//! inductance is `mu2 pi a^2 n_c u_q^T (L H) u_p`, where `L H` is the
//! Cartesian field matrix at unit transmit current. Stacking both frames
//! gives `M = U_r^T K U_t` with kernel `K = mu2 pi a^2 n_c L H`; row `q` of
//! `M` belongs to receive coil `q`, column `p` to transmit coil `p`.

use crate::em::{Excitation, FieldMatrix};
use crate::error::{invalid, Result};
use crate::linalg::{frobenius, spectral_norm, to_complex, CMatrix3};
use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// A circular coil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilSpec {
    /// Radius a, m.
    pub radius: f64,
    pub turns: u32,
    /// Total loop resistance r_c including source/load, ohms.
    pub resistance: f64,
}

impl Default for CoilSpec {
    fn default() -> Self {
        CoilSpec {
            radius: 0.05,
            turns: 10,
            resistance: 0.5,
        }
    }
}

impl CoilSpec {
    pub fn new(radius: f64, turns: u32, resistance: f64) -> Result<Self> {
        let c = CoilSpec {
            radius,
            turns,
            resistance,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(invalid("coil radius must be positive"));
        }
        if self.turns < 1 {
            return Err(invalid("coil needs at least one turn"));
        }
        if !(self.resistance > 0.0 && self.resistance.is_finite()) {
            return Err(invalid("coil resistance must be positive"));
        }
        Ok(())
    }

    /// Unit-current drive of this coil.
    pub fn excitation(&self) -> Excitation {
        Excitation::unit_current(self.radius, self.turns as f64)
    }

    /// Flux pickup factor `mu pi a^2 n_c` of this coil as a receiver.
    pub fn pickup(&self, permeability: f64) -> f64 {
        permeability * PI * self.radius * self.radius * self.turns as f64
    }
}

/// A unit coil axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation(Vector3<f64>);

impl Orientation {
    /// Normalizes `v`; rejects zero or non-finite input.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("orientation needs a nonzero finite vector"));
        }
        Ok(Orientation(v / n))
    }

    pub fn axis(i: usize) -> Self {
        let mut v = Vector3::zeros();
        v[i] = 1.0;
        Orientation(v)
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }
}

/// Three mutually perpendicular coils; column `i` is coil `i`'s axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriAxisFrame(Matrix3<f64>);

impl TriAxisFrame {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        if !(defect <= 1e-10) {
            return Err(invalid(format!("frame is not orthonormal (defect {defect:.3e})")));
        }
        Ok(TriAxisFrame(m))
    }

    pub fn identity() -> Self {
        TriAxisFrame(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn coil(&self, i: usize) -> Orientation {
        Orientation(self.0.column(i).into_owned())
    }
}

/// Mutual inductances between every transmit and receive coil, H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMatrix {
    /// Entry `(q, p)`: receive coil `q`, transmit coil `p`.
    pub m: CMatrix3,
    /// Orientation-optimal scalar coupling for the same positions.
    pub m_star: f64,
}

impl CouplingMatrix {
    /// Wrap a raw matrix; `m_star` is taken as its spectral norm, i.e. the
    /// frames are treated as already spanning the kernel.
    pub fn from_matrix(m: CMatrix3) -> Self {
        CouplingMatrix {
            m,
            m_star: spectral_norm(&m),
        }
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.m)
    }

    pub fn entry(&self, q: usize, p: usize) -> Complex64 {
        self.m[(q, p)]
    }
}

/// `mu2 pi a^2 n_c L H` for a receive coil.
pub fn coupling_kernel(fm: &FieldMatrix, rx_coil: &CoilSpec) -> CMatrix3 {
    fm.cartesian * Complex64::new(rx_coil.pickup(fm.rx_permeability), 0.0)
}

pub fn mutual_inductance(u_p: &Orientation, u_q: &Orientation, fm: &FieldMatrix, rx_coil: &CoilSpec) -> Complex64 {
    let k = coupling_kernel(fm, rx_coil);
    let up = u_p.0.map(|x| Complex64::new(x, 0.0));
    let uq = u_q.0.map(|x| Complex64::new(x, 0.0));
    (uq.transpose() * k * up)[(0, 0)]
}

pub fn coupling_matrix(
    tx_frame: &TriAxisFrame,
    rx_frame: &TriAxisFrame,
    fm: &FieldMatrix,
    rx_coil: &CoilSpec,
) -> Result<CouplingMatrix> {
    // Frames built through `new` are already checked; this guards the
    // structural constructors used by callers that bypass it.
    TriAxisFrame::new(tx_frame.0)?;
    TriAxisFrame::new(rx_frame.0)?;
    let k = coupling_kernel(fm, rx_coil);
    Ok(coupling_from_kernel(&k, tx_frame, rx_frame))
}

/// `U_r^T K U_t` with `m_star = sigma_max(K)`; no frame checks.
pub fn coupling_from_kernel(kernel: &CMatrix3, tx_frame: &TriAxisFrame, rx_frame: &TriAxisFrame) -> CouplingMatrix {
    let m = to_complex(&rx_frame.0.transpose()) * kernel * to_complex(&tx_frame.0);
    CouplingMatrix {
        m,
        m_star: spectral_norm(kernel),
    }
}

pub fn m_star(fm: &FieldMatrix, rx_coil: &CoilSpec) -> f64 {
    spectral_norm(&coupling_kernel(fm, rx_coil))
}

/// Haar-uniform rotation drawn from `rng`.
pub fn random_frame_with<R: Rng + ?Sized>(rng: &mut R) -> TriAxisFrame {
    loop {
        let q = Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        if q.norm() > 1e-6 {
            return TriAxisFrame(UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner());
        }
    }
}

/// Haar-uniform rotation, deterministic per seed.
pub fn random_frame(seed: u64) -> TriAxisFrame {
    random_frame_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Direction uniform on the unit sphere.
pub fn random_orientation_with<R: Rng + ?Sized>(rng: &mut R) -> Orientation {
    loop {
        let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        if v.norm() > 1e-6 {
            return Orientation(v / v.norm());
        }
    }
}

pub fn random_orientation(seed: u64) -> Orientation {
    random_orientation_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// Real frames whose first coils capture the most coupling achievable with
/// physical (real) orientations, and that coupling's magnitude.
///
/// Physical axes are real, so the best single pair solves
/// `max_theta sigma_max(Re(e^{j theta} K))`; the first columns of the
/// returned frames are that matrix's top singular vectors.
pub fn aligned_frames(kernel: &CMatrix3) -> (TriAxisFrame, TriAxisFrame, f64) {
    let real_part = |theta: f64| {
        let rot = Complex64::from_polar(1.0, theta);
        kernel.map(|z| (z * rot).re)
    };
    let score = |theta: f64| real_part(theta).singular_values().max();
    // Coarse scan followed by golden-section refinement; the objective is
    // pi-periodic.
    let n = 90;
    let step = PI / n as f64;
    let best = (0..n).map(|i| i as f64 * step).fold((0.0, f64::MIN), |acc, t| {
        let s = score(t);
        if s > acc.1 {
            (t, s)
        } else {
            acc
        }
    });
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if score(a) > score(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let theta = 0.5 * (lo + hi);
    let a = real_part(theta);
    let svd = a.svd(true, true);
    let s = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    let mut rx = Matrix3::from_fn(|r, c| u[(r, order[c])]);
    let mut tx = Matrix3::from_fn(|r, c| v[(r, order[c])]);
    for m in [&mut rx, &mut tx] {
        if m.determinant() < 0.0 {
            m.column_mut(2).neg_mut();
        }
    }
    let value = (to_complex(&rx).transpose() * kernel * to_complex(&tx))[(0, 0)].norm();
    (TriAxisFrame(tx), TriAxisFrame(rx), value)
}
