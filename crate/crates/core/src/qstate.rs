//! One-particle wavefunctions on a grid and the pointwise fields derived
//! from them: density, phase gradient, amplitude gradient.
//!
//! The phase gradient is always taken from the probability current
//! `Im(ψ*∇ψ)/p`; `arg ψ` is never unwrapped.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{KineticError, Result};
use crate::quadgrid::{derivative_values, dot, ComplexField, Grid, RealField};

/// Relative density floor: below `P_FLOOR_REL · max p` the phase is undefined.
pub const P_FLOOR_REL: f64 = 1e-12;

/// A sampled one-particle state.
///
/// On polar grids the factor `e^{imφ}` is not sampled; `azimuthal_m` carries
/// it and contributes `m²/(r² sin²θ)` to `|∇S|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Arc<Grid>,
    psi: ComplexField,
    azimuthal_m: i32,
}

impl Wavefunction {
    pub fn new(grid: impl Into<Arc<Grid>>, psi: ComplexField, azimuthal_m: i32) -> Result<Self> {
        let grid = grid.into();
        psi.check_aligned(&grid)?;
        if azimuthal_m != 0 && matches!(*grid, Grid::Line(_)) {
            return Err(KineticError::InvalidArgument(format!(
                "azimuthal quantum number {azimuthal_m} on a 1D grid"
            )));
        }
        Ok(Self {
            grid,
            psi,
            azimuthal_m,
        })
    }

    /// Builds the state and rescales it to unit norm.
    pub fn normalized(grid: impl Into<Arc<Grid>>, psi: ComplexField, azimuthal_m: i32) -> Result<Self> {
        normalize(&Self::new(grid, psi, azimuthal_m)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<Grid> {
        Arc::clone(&self.grid)
    }

    pub fn psi(&self) -> &ComplexField {
        &self.psi
    }

    pub fn azimuthal_m(&self) -> i32 {
        self.azimuthal_m
    }

    /// `∫ |ψ|²` on the grid.
    pub fn norm_sq(&self) -> f64 {
        self.psi
            .iter()
            .zip(self.grid.weights())
            .map(|(z, w)| z.norm_sqr() * w)
            .sum()
    }

    /// Inner product `⟨self|other⟩`. Both states must share the same grid.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(KineticError::InvalidArgument("states live on different grids".into()));
        }
        if self.azimuthal_m != other.azimuthal_m {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self
            .psi
            .iter()
            .zip(other.psi.iter())
            .zip(self.grid.weights())
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    /// `‖self − other‖` in the grid norm.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.azimuthal_m != other.azimuthal_m {
            return Err(KineticError::InvalidArgument(
                "distance needs states on the same grid with the same m".into(),
            ));
        }
        let diff: Vec<f64> = self
            .psi
            .iter()
            .zip(other.psi.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .collect();
        Ok(dot(&diff, self.grid.weights()).max(0.0).sqrt())
    }

    /// Multiplies every sample by `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let phase = Complex64::from_polar(1.0, alpha);
        Self {
            grid: Arc::clone(&self.grid),
            psi: self.psi.iter().map(|z| z * phase).collect(),
            azimuthal_m: self.azimuthal_m,
        }
    }

    pub(crate) fn p_floor(&self, density: &[f64]) -> f64 {
        P_FLOOR_REL * density.iter().copied().fold(0.0, f64::max)
    }
}

/// `p = |ψ|²`.
pub fn density(w: &Wavefunction) -> RealField {
    w.psi.iter().map(|z| z.norm_sqr()).collect()
}

/// Rescales `w` to unit norm.
pub fn normalize(w: &Wavefunction) -> Result<Wavefunction> {
    let norm_sq = w.norm_sq();
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(KineticError::ZeroNorm);
    }
    let scale = norm_sq.sqrt().recip();
    Ok(Wavefunction {
        grid: Arc::clone(&w.grid),
        psi: w.psi.iter().map(|z| z * scale).collect(),
        azimuthal_m: w.azimuthal_m,
    })
}

/// Physical gradient components of a sampled field.
///
/// Lines have the single component `∂_x`; polar grids have `∂_r` and
/// `r⁻¹ ∂_θ`. The unsampled azimuthal dependence is reported separately.
pub(crate) fn physical_gradient<T>(values: &[T], grid: &Grid) -> Result<Vec<Vec<T>>>
where
    T: crate::quadgrid::Sample,
{
    match grid {
        Grid::Line(_) => Ok(vec![derivative_values(values, grid, 0)?]),
        Grid::Polar(g) => {
            let dr = derivative_values(values, grid, 0)?;
            let mut dtheta = derivative_values(values, grid, 1)?;
            let nt = g.theta().len();
            for (i, &r) in g.r().points().iter().enumerate() {
                let inv_r = r.recip();
                for v in &mut dtheta[i * nt..(i + 1) * nt] {
                    *v = *v * inv_r;
                }
            }
            Ok(vec![dr, dtheta])
        }
    }
}

/// `m² / (r² sin²θ)` per node, or `None` when there is no azimuthal phase.
pub(crate) fn azimuthal_factor(w: &Wavefunction) -> Option<Vec<f64>> {
    let g = w.grid.as_polar()?;
    if w.azimuthal_m == 0 {
        return None;
    }
    let m2 = f64::from(w.azimuthal_m).powi(2);
    let mut out = Vec::with_capacity(g.len());
    for &r in g.r().points() {
        for &t in g.theta().points() {
            out.push(m2 / (r * r * t.sin().powi(2)));
        }
    }
    Some(out)
}

/// Sampled state plus everything the kinetic functionals need per node.
pub(crate) struct LocalFields {
    pub density: Vec<f64>,
    pub floor: f64,
    /// Physical components of `∇ψ`.
    pub grad: Vec<Vec<Complex64>>,
    pub azimuthal: Option<Vec<f64>>,
}

impl LocalFields {
    pub fn new(w: &Wavefunction) -> Result<Self> {
        let density = density(w).into_inner();
        let floor = w.p_floor(&density);
        let grad = physical_gradient(w.psi(), w.grid())?;
        Ok(Self {
            density,
            floor,
            grad,
            azimuthal: azimuthal_factor(w),
        })
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    /// Whether node `k` is above the density floor.
    pub fn regular(&self, k: usize) -> bool {
        self.density[k] >= self.floor && self.density[k] > 0.0
    }

    /// `Re(ψ* ∂ψ)` and `Im(ψ* ∂ψ)` along one axis at node `k`.
    pub fn projections(&self, psi: &[Complex64], axis: usize, k: usize) -> (f64, f64) {
        let z = psi[k].conj() * self.grad[axis][k];
        (z.re, z.im)
    }

    pub fn azimuthal_at(&self, k: usize) -> f64 {
        self.azimuthal.as_ref().map_or(0.0, |a| a[k])
    }
}

/// `|∇S|²`, from the probability current plus the analytic azimuthal part.
/// Zero at nodes below the density floor.
pub fn phase_gradient_sq(w: &Wavefunction) -> Result<RealField> {
    let f = LocalFields::new(w)?;
    let psi = w.psi();
    Ok((0..f.len())
        .map(|k| {
            if !f.regular(k) {
                return 0.0;
            }
            let p = f.density[k];
            let current_sq: f64 = (0..f.grad.len())
                .map(|a| f.projections(psi, a, k).1.powi(2))
                .sum();
            current_sq / (p * p) + f.azimuthal_at(k)
        })
        .collect())
}

/// `|∇√p|²`, obtained by differentiating `|ψ|` directly.
///
/// `|ψ|` has a kink at every node of a real wavefunction, so this field is
/// only accurate away from nodes; see [`regular_node_mask`].
pub fn amplitude_gradient_sq(w: &Wavefunction) -> Result<RealField> {
    let modulus: Vec<f64> = w.psi().iter().map(|z| z.norm()).collect();
    let grad = physical_gradient(&modulus, w.grid())?;
    Ok((0..modulus.len())
        .map(|k| grad.iter().map(|g| g[k] * g[k]).sum())
        .collect())
}

/// Nodes where pointwise identities are meaningful: density at least
/// `rel_density · max p` and no sign change of `ψ` within `width` steps
/// along any axis.
///
/// A sign change between neighbours `a`, `b` means `Re(a* b) ≤ 0`, which
/// catches real nodes regardless of the global phase.
pub fn regular_node_mask(w: &Wavefunction, width: usize, rel_density: f64) -> Vec<bool> {
    let p = density(w);
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let mut keep: Vec<bool> = p.iter().map(|&v| v >= rel_density * pmax && v > 0.0).collect();
    let psi = w.psi();
    let crossing = |a: usize, b: usize| (psi[a].conj() * psi[b]).re <= 0.0;

    let mut mark_line = |indices: &[usize]| {
        let n = indices.len();
        for s in 0..n.saturating_sub(1) {
            if crossing(indices[s], indices[s + 1]) {
                let lo = s.saturating_sub(width - 1);
                let hi = (s + 1 + width - 1).min(n - 1);
                for &k in &indices[lo..=hi] {
                    keep[k] = false;
                }
            }
        }
    };

    match w.grid() {
        Grid::Line(g) => {
            let idx: Vec<usize> = (0..g.len()).collect();
            mark_line(&idx);
        }
        Grid::Polar(g) => {
            let (nr, nt) = g.shape();
            for j in 0..nt {
                let idx: Vec<usize> = (0..nr).map(|i| i * nt + j).collect();
                mark_line(&idx);
            }
            for i in 0..nr {
                let idx: Vec<usize> = (0..nt).map(|j| i * nt + j).collect();
                mark_line(&idx);
            }
        }
    }
    keep
}
