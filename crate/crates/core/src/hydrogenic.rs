//! Hydrogen (Z = 1) orbitals `ψ(n, l, m) = R_nl(r) Θ_lm(θ) e^{imφ}` on a
//! polar grid, and their angular-integrated kinetic distributions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{KineticError, Result};
use crate::functionals::decompose;
use crate::qstate::Wavefunction;
use crate::quadgrid::{Grid, Grid2D};

/// Norm defect above which an orbital is rejected as under-resolved.
pub const MAX_NORM_DEFECT: f64 = 1e-6;

/// Hydrogenic quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitalSpec {
    n: u32,
    l: u32,
    m: i32,
}

impl OrbitalSpec {
    pub fn new(n: i64, l: i64, m: i64) -> Result<Self> {
        if n < 1 {
            return Err(KineticError::InvalidOrbital(format!("n = {n} violates n >= 1")));
        }
        if l < 0 || l >= n {
            return Err(KineticError::InvalidOrbital(format!(
                "l = {l} violates 0 <= l < n (n = {n})"
            )));
        }
        if m.abs() > l {
            return Err(KineticError::InvalidOrbital(format!(
                "m = {m} violates |m| <= l (l = {l})"
            )));
        }
        // bounded above by the checks against n, which fits in i64
        let n = u32::try_from(n).map_err(|_| KineticError::InvalidOrbital(format!("n = {n} too large")))?;
        Ok(Self {
            n,
            l: l as u32,
            m: m as i32,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Every valid orbital with principal quantum number up to `n_max`.
    pub fn all_up_to(n_max: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for n in 1..=n_max as i64 {
            for l in 0..n {
                for m in -l..=l {
                    out.push(Self::new(n, l, m).expect("enumerated quantum numbers are valid"));
                }
            }
        }
        out
    }
}

impl std::fmt::Display for OrbitalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n, self.l, self.m)
    }
}

/// Generalized Laguerre polynomial `L_k^α(x)` by the three-term recurrence.
pub fn assoc_laguerre(k: i64, alpha: f64, x: f64) -> Result<f64> {
    if k < 0 {
        return Err(KineticError::InvalidArgument(format!("Laguerre degree {k} is negative")));
    }
    let mut prev = 1.0;
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Associated Legendre function `P_l^m(x)` with the Condon–Shortley phase.
pub fn assoc_legendre(l: i64, m: i64, x: f64) -> Result<f64> {
    if m < 0 || m > l {
        return Err(KineticError::InvalidArgument(format!(
            "associated Legendre needs 0 <= m <= l, got l = {l}, m = {m}"
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(KineticError::InvalidArgument(format!("x = {x} outside [-1, 1]")));
    }
    // P_m^m = (−1)^m (2m−1)!! (1−x²)^{m/2}
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * s;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut pmm1 = x * (2 * m + 1) as f64 * pmm;
    for ll in m + 2..=l {
        let next = ((2 * ll - 1) as f64 * x * pmm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmm1;
        pmm1 = next;
    }
    Ok(pmm1)
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| f64::from(i).ln()).sum()
}

/// Normalized radial function `R_nl(r)`.
pub fn radial(spec: OrbitalSpec, r: f64) -> f64 {
    let n = f64::from(spec.n);
    let l = spec.l;
    let rho = 2.0 * r / n;
    // log of sqrt((2/n)³ (n−l−1)! / (2n (n+l)!))
    let ln_norm = 0.5
        * (3.0 * (2.0 / n).ln() + ln_factorial(spec.n - l - 1)
            - (2.0 * n).ln()
            - ln_factorial(spec.n + l));
    let poly = assoc_laguerre(i64::from(spec.n - l - 1), f64::from(2 * l + 1), rho)
        .expect("degree is nonnegative");
    let power = if l == 0 { 1.0 } else { rho.powi(l as i32) };
    ln_norm.exp() * (-r / n).exp() * power * poly
}

/// Polar factor `Θ_lm(θ)` of the spherical harmonic, normalized so that
/// `2π ∫ Θ² sin θ dθ = 1`.
pub fn polar(spec: OrbitalSpec, theta: f64) -> f64 {
    let l = spec.l;
    let am = spec.m.unsigned_abs();
    let ln_ratio = ln_factorial(l - am) - ln_factorial(l + am);
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ln_ratio.exp()).sqrt();
    let p = assoc_legendre(i64::from(l), i64::from(am), theta.cos().clamp(-1.0, 1.0))
        .expect("0 <= |m| <= l");
    // Y_{l,−m} = (−1)^m conj(Y_{l,m})
    let sign = if spec.m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    sign * norm * p
}

/// Polar grid sized for orbitals up to principal quantum number `n`.
///
/// Up to `n = 3` this is [`Grid2D::hydrogenic_default`]. Beyond that the
/// radial extent grows as `6.5 n²` Bohr at the same spacing, since the
/// density tail scales with `n²`.
pub fn grid_for(n: u32, theta_points: usize) -> Result<Grid2D> {
    let r_max = (6.5 * f64::from(n * n)).max(60.0);
    let spacing = 60.0 / 4000.0;
    let mut points = (r_max / spacing).ceil() as usize + 1;
    if points.is_multiple_of(2) {
        points += 1;
    }
    Grid2D::with_extent(r_max, points, theta_points)
}

/// Samples `ψ(n, l, m)` on `grid`.
///
/// The analytic orbital is renormalized on the grid when its quadrature norm
/// is within [`MAX_NORM_DEFECT`] of one; larger defects mean the grid is too
/// small and are rejected.
pub fn orbital(spec: OrbitalSpec, grid: &Arc<Grid>) -> Result<Wavefunction> {
    let g = grid
        .as_polar()
        .ok_or(KineticError::WrongGrid { expected: "polar" })?;
    let radial_values: Vec<f64> = g.r().points().iter().map(|&r| radial(spec, r)).collect();
    let polar_values: Vec<f64> = g.theta().points().iter().map(|&t| polar(spec, t)).collect();
    let psi = radial_values
        .iter()
        .flat_map(|&rv| polar_values.iter().map(move |&tv| Complex64::new(rv * tv, 0.0)))
        .collect();
    let w = Wavefunction::new(Arc::clone(grid), psi, spec.m)?;
    let defect = (w.norm_sq() - 1.0).abs();
    if defect > MAX_NORM_DEFECT {
        return Err(KineticError::InsufficientExtent {
            defect,
            limit: MAX_NORM_DEFECT,
        });
    }
    crate::qstate::normalize(&w)
}

/// Angular-integrated kinetic distributions versus radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDistributions {
    pub r: Vec<f64>,
    pub t_c: Vec<f64>,
    pub t_w: Vec<f64>,
    pub t: Vec<f64>,
}

/// Radial profiles of `𝒯_C`, `𝒯_W` and `𝒯` for `ψ(n, l, m)`.
pub fn radial_distributions(spec: OrbitalSpec, grid: &Arc<Grid>) -> Result<RadialDistributions> {
    let report = decompose(&orbital(spec, grid)?)?;
    Ok(RadialDistributions {
        r: report.abscissa,
        t_c: report.integrand_tc.into_inner(),
        t_w: report.integrand_tw.into_inner(),
        t: report.integrand_t.into_inner(),
    })
}

/// Closed forms `(T_C, T_W, T) = (|m|/2n³, (n−|m|)/2n³, 1/2n²)`.
pub fn analytic_values(spec: OrbitalSpec) -> (f64, f64, f64) {
    let n = f64::from(spec.n);
    let am = f64::from(spec.m.unsigned_abs());
    let n3 = 2.0 * n * n * n;
    (am / n3, (n - am) / n3, 1.0 / (2.0 * n * n))
}
