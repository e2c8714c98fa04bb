use super::{
    homogeneous_dipole_field, wavenumber, Axis, CylField, Excitation, Geometry, MediaPair, J,
};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, max_norm, Tolerance};
use crate::special::{bessel_j012, complex::hankel1};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Number of spectral integrals shared by the three source orientations.
pub const COMPONENTS: usize = 5;

/// How the vertical wavenumber square root is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `Im kz >= 0`: waves decay away from the interface. Used on the real axis.
    Physical,
    /// Principal square root, analytic off the real axis away from the cuts.
    Principal,
}

/// `sqrt(k^2 - k_rho^2)` on the requested branch.
pub fn vertical_wavenumber(k: Complex64, k_rho: Complex64, branch: Branch) -> Complex64 {
    let kz = (k * k - k_rho * k_rho).sqrt();
    match branch {
        Branch::Physical if kz.im < 0.0 => -kz,
        _ => kz,
    }
}

/// Fresnel-type coefficients seen from the lower medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    /// `(mu1 k2z - mu2 k1z) / (mu1 k2z + mu2 k1z)`
    pub te: Complex64,
    /// `(eps1 k2z - eps2 k1z) / (eps1 k2z + eps2 k1z)`, complex permittivities.
    pub tm: Complex64,
}

/// Reflection coefficients at horizontal wavenumber `k_rho`.
pub fn reflection_coefficients(
    media: &MediaPair,
    frequency: f64,
    k_rho: Complex64,
    branch: Branch,
) -> Result<Reflection> {
    let c = Constants::new(media, frequency)?;
    let k1z = vertical_wavenumber(c.k1, k_rho, branch);
    let k2z = vertical_wavenumber(c.k2, k_rho, branch);
    Ok(c.reflection(k1z, k2z))
}

#[derive(Debug, Clone, Copy)]
struct Constants {
    k1: Complex64,
    k2: Complex64,
    mu1: f64,
    mu2: f64,
    eps1: Complex64,
    eps2: Complex64,
}

impl Constants {
    fn new(media: &MediaPair, frequency: f64) -> Result<Self> {
        let omega = TAU * frequency;
        Ok(Constants {
            k1: wavenumber(&media.upper, frequency)?.value(),
            k2: wavenumber(&media.lower, frequency)?.value(),
            mu1: media.upper.permeability(),
            mu2: media.lower.permeability(),
            eps1: media.upper.complex_permittivity(omega),
            eps2: media.lower.complex_permittivity(omega),
        })
    }

    fn reflection(&self, k1z: Complex64, k2z: Complex64) -> Reflection {
        let te = (self.mu1 * k2z - self.mu2 * k1z) / (self.mu1 * k2z + self.mu2 * k1z);
        let tm = (self.eps1 * k2z - self.eps2 * k1z) / (self.eps1 * k2z + self.eps2 * k1z);
        Reflection { te, tm }
    }
}

/// The spectral integrands of the layered-medium dipole fields.
///
/// Component order: vertical source `rho`, `z`; horizontal source `rho`,
/// `phi`, `z`. The horizontal `rho` and `phi` terms each sum a TE and a TM
/// part whose `1/k_rho` singularities and long-range tails cancel, so they
/// are combined before integration.
#[derive(Debug, Clone, Copy)]
pub struct SommerfeldIntegrand {
    c: Constants,
    rho: f64,
    height: f64,
    depth_sum: f64,
    /// Include the direct wave; without it only the interface response remains.
    pub direct: bool,
}

impl SommerfeldIntegrand {
    pub fn new(media: &MediaPair, frequency: f64, geometry: &Geometry, direct: bool) -> Result<Self> {
        Ok(SommerfeldIntegrand {
            c: Constants::new(media, frequency)?,
            rho: geometry.range,
            height: geometry.height(),
            depth_sum: geometry.tx_depth + geometry.rx_depth,
            direct,
        })
    }

    pub fn k1(&self) -> Complex64 {
        self.c.k1
    }

    pub fn k2(&self) -> Complex64 {
        self.c.k2
    }

    fn assemble(
        &self,
        k_rho: Complex64,
        branch: Branch,
        bessel: [Complex64; 3],
        d1: Complex64,
    ) -> [Complex64; COMPONENTS] {
        let k1z = vertical_wavenumber(self.c.k1, k_rho, branch);
        let k2z = vertical_wavenumber(self.c.k2, k_rho, branch);
        let r = self.c.reflection(k1z, k2z);
        let s = if self.height > 0.0 {
            1.0
        } else if self.height < 0.0 {
            -1.0
        } else {
            0.0
        };
        let zeta2 = if self.direct {
            (J * k2z * self.height.abs()).exp()
        } else {
            Complex64::new(0.0, 0.0)
        };
        let up = (J * k2z * self.depth_sum).exp();
        let zeta3 = r.te * up;
        let zeta5 = zeta2 + r.tm * up;
        let [b0, b1, _] = bessel;
        let kr2 = k_rho * k_rho;
        let k2sq_over = self.c.k2 * self.c.k2 / k2z;
        let te = k2z * (zeta2 - zeta3);
        let tm = k2sq_over * zeta5;
        [
            kr2 * b1 * (s * zeta2 - zeta3),
            kr2 * k_rho / k2z * b0 * (zeta2 + zeta3),
            te * d1 + tm * b1 / self.rho,
            -te * b1 / self.rho - tm * d1,
            kr2 * b1 * (s * zeta2 + zeta3),
        ]
    }

    /// Half-line form with Bessel `J_n`, real `k_rho >= 0`.
    pub fn eval(&self, k_rho: f64) -> [Complex64; COMPONENTS] {
        let x = k_rho * self.rho;
        let [j0, j1, j2] = bessel_j012(x);
        let j1_over_x = if x < 1e-8 { 0.5 } else { j1 / x };
        let d1 = k_rho * (j1_over_x - j2);
        let c = |v: f64| Complex64::new(v, 0.0);
        self.assemble(c(k_rho), Branch::Physical, [c(j0), c(j1), c(j2)], c(d1))
    }

    /// Full-line form with Hankel `H_n^(1)` at complex `k_rho`. Integrating it
    /// along any path from `-inf` to `+inf` that passes above the origin and
    /// the left branch points and below the right ones equals twice the
    /// half-line integral of [`eval`](Self::eval).
    pub fn eval_hankel(&self, k_rho: Complex64, branch: Branch) -> [Complex64; COMPONENTS] {
        let x = k_rho * self.rho;
        let h = [hankel1(0, x), hankel1(1, x), hankel1(2, x)];
        let d1 = k_rho * (h[1] / x - h[2]);
        self.assemble(k_rho, branch, h, d1)
    }

    /// Combine integrated components into the fields of the three sources.
    fn fields(&self, integrals: &[Complex64; COMPONENTS], excitation: &Excitation, azimuth: f64) -> [CylField; 3] {
        let i = integrals.map(|v| 2.0 * zeta1(excitation) * v);
        let horizontal = |axis: Axis| {
            let (sn, cs) = axis.horizontal_angle(azimuth).sin_cos();
            CylField {
                rho: cs * i[2],
                phi: sn * i[3],
                z: -J * cs * i[4],
            }
        };
        [
            horizontal(Axis::X),
            horizontal(Axis::Y),
            CylField {
                rho: -J * i[0],
                phi: Complex64::new(0.0, 0.0),
                z: i[1],
            },
        ]
    }
}

fn zeta1(excitation: &Excitation) -> Complex64 {
    J * excitation.current * excitation.radius.powi(2) * excitation.turns / 8.0
}

/// Truncation and accuracy settings for the spectral integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Initial upper limit as a multiple of `max(|k1|, |k2|)`.
    pub k_max_factor: f64,
    pub relative_tolerance: f64,
    /// Evaluation budget per field matrix.
    pub max_evaluations: usize,
    /// Extra tail panels of the initial width tried before giving up.
    pub max_tail_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            k_max_factor: 50.0,
            relative_tolerance: 1e-6,
            max_evaluations: 4_000_000,
            max_tail_panels: 400,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max_factor > 0.0 && self.k_max_factor.is_finite()) {
            return Err(invalid("k_max factor must be positive"));
        }
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance < 1.0) {
            return Err(invalid("relative tolerance must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Half-line integral of the spectral integrand to the requested accuracy.
pub(crate) fn integrate_spectrum(
    integrand: &SommerfeldIntegrand,
    spec: &QuadratureSpec,
) -> Result<([Complex64; COMPONENTS], f64)> {
    spec.validate()?;
    let kmax = spec.k_max_factor * integrand.c.k1.norm().max(integrand.c.k2.norm());
    // Panels a few Bessel periods wide keep the adaptive splitter from
    // aliasing the oscillation at long range.
    let period = TAU / integrand.rho;
    let width = (8.0 * period).max(kmax / 4000.0);
    let mut breaks = vec![integrand.c.k1.re, integrand.c.k2.re, integrand.c.k2.norm()];
    let mut x = width;
    while x < kmax {
        breaks.push(x);
        x += width;
    }

    let mut budget = spec.max_evaluations;
    let tol = |budget: usize| Tolerance {
        relative: spec.relative_tolerance,
        absolute: 0.0,
        max_evaluations: budget,
    };
    let f = |k: f64| integrand.eval(k);
    let head = integrate(f, 0.0, kmax, &breaks, &tol(budget))?;
    budget = budget.saturating_sub(head.evaluations);
    let mut total = head.value;
    let mut error = head.error;

    let mut quiet = 0;
    for n in 0..spec.max_tail_panels {
        let a = kmax * (1 + n) as f64;
        let b = a + kmax;
        let inner: Vec<f64> = (1..16).map(|i| a + kmax * i as f64 / 16.0).collect();
        let floor = spec.relative_tolerance * max_norm(&total);
        let panel = integrate(
            f,
            a,
            b,
            &inner,
            &Tolerance {
                absolute: 0.1 * floor,
                ..tol(budget)
            },
        )?;
        budget = budget.saturating_sub(panel.evaluations);
        for (t, v) in total.iter_mut().zip(panel.value.iter()) {
            *t += *v;
        }
        error += panel.error;
        if panel.magnitude <= 0.1 * floor {
            quiet += 1;
            if quiet >= 2 {
                return Ok((total, error));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NumericalFailure {
        error_estimate: error,
        value_scale: max_norm(&total),
        evaluations: spec.max_evaluations - budget,
    })
}

/// Exact fields with the quadrature's error bound.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolution {
    /// Fields of the x, y and z sources.
    pub fields: [CylField; 3],
    /// Estimated absolute error of any single component, A/m.
    pub error_estimate: f64,
}

/// Exact fields of the x, y and z sources, in that order.
///
/// The direct wave is added in closed form; only the interface response is
/// integrated, which keeps long ranges free of cancellation.
pub fn exact_fields(
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
    spec: &QuadratureSpec,
) -> Result<[CylField; 3]> {
    Ok(exact_solution(geometry, media, frequency, excitation, spec)?.fields)
}

pub fn exact_solution(
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
    spec: &QuadratureSpec,
) -> Result<ExactSolution> {
    if geometry.range < 10.0 * excitation.radius {
        return Err(invalid(format!(
            "range {} m is inside the near zone of a {} m coil; use at least 10 radii",
            geometry.range, excitation.radius
        )));
    }
    let integrand = SommerfeldIntegrand::new(media, frequency, geometry, false)?;
    let (integrals, error) = integrate_spectrum(&integrand, spec)?;
    let mut fields = integrand.fields(&integrals, excitation, geometry.azimuth);
    for axis in Axis::ALL {
        let direct = homogeneous_dipole_field(axis, geometry, &media.lower, frequency, excitation)?;
        let f = &mut fields[axis.index()];
        f.rho += direct.rho;
        f.phi += direct.phi;
        f.z += direct.z;
    }
    // A vertical coil is axially symmetric; any azimuthal residue is
    // roundoff from the closed-form direct term.
    fields[2].phi = Complex64::new(0.0, 0.0);
    if fields.iter().any(|f| !f.is_finite()) {
        return Err(Error::NumericalFailure {
            error_estimate: f64::NAN,
            value_scale: f64::NAN,
            evaluations: 0,
        });
    }
    Ok(ExactSolution {
        fields,
        error_estimate: 2.0 * zeta1(excitation).norm() * error,
    })
}

/// Fields of the x, y and z sources with the direct wave integrated
/// numerically along with the interface response.
///
/// Independent of the closed-form dipole, so it serves as its cross-check.
/// Convergence needs the two depths to differ.
pub fn spectral_fields(
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
    spec: &QuadratureSpec,
) -> Result<[CylField; 3]> {
    if geometry.height() == 0.0 {
        return Err(invalid("the fully numerical integral needs distinct depths"));
    }
    let integrand = SommerfeldIntegrand::new(media, frequency, geometry, true)?;
    let (integrals, _) = integrate_spectrum(&integrand, spec)?;
    Ok(integrand.fields(&integrals, excitation, geometry.azimuth))
}

/// Exact field of one source orientation.
pub fn exact_field(
    axis: Axis,
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
    spec: &QuadratureSpec,
) -> Result<CylField> {
    Ok(exact_fields(geometry, media, frequency, excitation, spec)?[axis.index()])
}

/// Integrate the Hankel form along a path deformed off the real axis.
/// Used to check the half-line reduction independently.
pub fn deformed_path_integral(
    integrand: &SommerfeldIntegrand,
    half_width: f64,
    limit: f64,
) -> Result<[Complex64; COMPONENTS]> {
    let k1 = integrand.c.k1.re;
    let centre = 0.5 * k1;
    let scale = 0.25 * k1;
    let path = |t: f64| {
        let th = ((t - centre) / scale).tanh();
        let k = Complex64::new(t, -half_width * th);
        let dk = Complex64::new(1.0, -half_width * (1.0 - th * th) / scale);
        (k, dk)
    };
    let breaks = [-integrand.c.k2.norm(), -k1, 0.0, centre, k1, integrand.c.k2.norm()];
    let est = integrate(
        |t| {
            let (k, dk) = path(t);
            let mut v = integrand.eval_hankel(k, Branch::Principal);
            for c in v.iter_mut() {
                *c *= dk;
            }
            v
        },
        -limit,
        limit,
        &breaks,
        &Tolerance {
            relative: 1e-9,
            absolute: 0.0,
            max_evaluations: 4_000_000,
        },
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{homogeneous_dipole_field, Medium};

    fn exc() -> Excitation {
        Excitation::unit_current(0.05, 10.0)
    }

    fn rel(a: &CylField, b: &CylField) -> f64 {
        let d = CylField {
            rho: a.rho - b.rho,
            phi: a.phi - b.phi,
            z: a.z - b.z,
        };
        d.norm() / b.norm()
    }

    #[test]
    fn branch_has_nonnegative_imaginary_part() {
        let k = wavenumber(&Medium::fresh_water(), 1e6).unwrap().value();
        for i in 0..200 {
            let kr = Complex64::new(i as f64 * 0.05, 0.0);
            assert!(vertical_wavenumber(k, kr, Branch::Physical).im >= 0.0);
            let k1 = Complex64::new(0.02, 0.0);
            assert!(vertical_wavenumber(k1, kr, Branch::Physical).im >= 0.0);
        }
    }

    #[test]
    fn reflection_at_normal_incidence() {
        let r = reflection_coefficients(&MediaPair::air_over_water(), 1e6, Complex64::new(0.0, 0.0), Branch::Physical)
            .unwrap();
        // |k2| ~ 42 k1 so a magnetic source sees a nearly perfect mirror, and
        // the large complex permittivity of water flips the TM sign.
        assert!((r.te - 1.0).norm() < 0.05, "{:?}", r.te);
        assert!((r.tm + 1.0).norm() < 0.05, "{:?}", r.tm);
        let same = reflection_coefficients(
            &MediaPair::homogeneous(Medium::fresh_water()),
            1e6,
            Complex64::new(0.3, 0.0),
            Branch::Physical,
        )
        .unwrap();
        assert_eq!(same.te.norm(), 0.0);
        assert_eq!(same.tm.norm(), 0.0);
    }

    #[test]
    fn homogeneous_medium_reduces_to_free_dipole() {
        let media = MediaPair::homogeneous(Medium::fresh_water());
        let spec = QuadratureSpec::default();
        for &(d1, d2, rho, phi) in &[(1.5, 0.5, 3.0, 0.4), (0.5, 1.7, 6.0, 2.2), (2.0, 1.0, 1.0, 5.0)] {
            let g = Geometry::new(d1, d2, rho, phi).unwrap();
            let integrand = SommerfeldIntegrand::new(&media, 1e6, &g, true).unwrap();
            let (integrals, _) = integrate_spectrum(&integrand, &spec).unwrap();
            let f = integrand.fields(&integrals, &exc(), phi);
            for axis in Axis::ALL {
                let oracle = homogeneous_dipole_field(axis, &g, &Medium::fresh_water(), 1e6, &exc()).unwrap();
                let e = rel(&f[axis.index()], &oracle);
                assert!(e < 1e-4, "{axis:?} {d1} {d2} {rho}: {e}");
            }
        }
    }

    #[test]
    fn half_line_matches_deformed_contour() {
        let media = MediaPair::air_over_water();
        for &(d1, d2, rho, phi) in &[
            (1.0, 0.3, 2.0, 0.0),
            (0.5, 1.5, 4.0, 1.0),
            (2.0, 0.5, 8.0, 2.0),
            (0.8, 0.2, 12.0, 3.0),
            (3.0, 1.0, 20.0, 4.0),
        ] {
            let g = Geometry::new(d1, d2, rho, phi).unwrap();
            let integrand = SommerfeldIntegrand::new(&media, 1e6, &g, true).unwrap();
            let (half, _) = integrate_spectrum(
                &integrand,
                &QuadratureSpec {
                    relative_tolerance: 1e-9,
                    ..QuadratureSpec::default()
                },
            )
            .unwrap();
            let limit = 40.0 / g.height().abs().min(d1 + d2);
            let full = deformed_path_integral(&integrand, 0.25 * integrand.k1().re, limit).unwrap();
            let half = half.map(|v| 2.0 * v);
            let scale = max_norm(&half);
            for i in 0..half.len() {
                let e = (half[i] - full[i]).norm() / scale;
                assert!(e < 1e-5, "component {i} at rho {rho}: {e}");
            }
        }
    }

    #[test]
    fn conducting_upper_space_acts_as_image_mirror() {
        // Over a perfect conductor a magnetic dipole's image keeps its
        // horizontal moment and reverses its vertical one.
        let media = MediaPair {
            upper: Medium::new(1.0, 1.0, 1e9).unwrap(),
            lower: Medium::fresh_water(),
        };
        for &(d1, d2, rho, phi) in &[(0.5, 0.3, 5.0, 0.7), (1.0, 2.0, 3.0, 2.0)] {
            let g = Geometry::new(d1, d2, rho, phi).unwrap();
            let image = Geometry { tx_depth: -d1, ..g };
            let f = exact_fields(&g, &media, 1e6, &exc(), &QuadratureSpec::default()).unwrap();
            for axis in Axis::ALL {
                let direct = homogeneous_dipole_field(axis, &g, &media.lower, 1e6, &exc()).unwrap();
                let mirror = homogeneous_dipole_field(axis, &image, &media.lower, 1e6, &exc()).unwrap();
                let sign = if axis == Axis::Z { -1.0 } else { 1.0 };
                let oracle = CylField {
                    rho: direct.rho + sign * mirror.rho,
                    phi: direct.phi + sign * mirror.phi,
                    z: direct.z + sign * mirror.z,
                };
                let e = rel(&f[axis.index()], &oracle);
                assert!(e < 1e-4, "{axis:?} at {rho}: {e}");
            }
        }
    }

    #[test]
    fn vertical_source_is_axisymmetric() {
        let media = MediaPair::air_over_water();
        let spec = QuadratureSpec::default();
        let a = exact_fields(&Geometry::new(0.5, 0.3, 5.0, 0.0).unwrap(), &media, 1e6, &exc(), &spec).unwrap();
        let b = exact_fields(&Geometry::new(0.5, 0.3, 5.0, 2.1).unwrap(), &media, 1e6, &exc(), &spec).unwrap();
        assert_eq!(a[2].phi.norm(), 0.0);
        assert!(rel(&a[2], &b[2]) < 1e-9);
    }

    #[test]
    fn halving_tolerance_stays_within_reported_error() {
        let media = MediaPair::air_over_water();
        for &rho in &[5.0, 50.0, 200.0] {
            let g = Geometry::new(0.5, 0.3, rho, 0.9).unwrap();
            let spec = QuadratureSpec::default();
            let half = QuadratureSpec {
                relative_tolerance: 0.5 * spec.relative_tolerance,
                ..spec
            };
            let a = exact_solution(&g, &media, 1e6, &exc(), &spec).unwrap();
            let b = exact_solution(&g, &media, 1e6, &exc(), &half).unwrap();
            for (fa, fb) in a.fields.iter().zip(b.fields.iter()) {
                for (x, y) in fa.to_array().iter().zip(fb.to_array().iter()) {
                    assert!((x - y).norm() <= a.error_estimate, "rho {rho}");
                }
            }
        }
    }

    #[test]
    fn near_zone_is_rejected() {
        let g = Geometry::new(0.5, 0.3, 0.4, 0.0).unwrap();
        let r = exact_fields(&g, &MediaPair::air_over_water(), 1e6, &exc(), &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn equal_depths_are_finite() {
        let g = Geometry::new(0.4, 0.4, 10.0, 0.3).unwrap();
        let f = exact_fields(&g, &MediaPair::air_over_water(), 1e6, &exc(), &QuadratureSpec::default()).unwrap();
        assert!(f.iter().all(|c| c.is_finite() && c.norm() > 0.0));
    }
}
