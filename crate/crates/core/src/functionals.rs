//! Kinetic-energy functionals and the classical / Weizsäcker split.
//!
//! With `ψ = √p e^{iS}` the positive-definite kinetic integrand
//! `𝒯 = ½|∇ψ|²` splits pointwise into `𝒯_C = ½ p|∇S|²` and
//! `𝒯_W = ½|∇√p|² = |∇p|²/(8p)`. Numerically both parts come from the same
//! projection `ψ*∇ψ`: its imaginary part is the probability current and its
//! real part is `½∇p`. This keeps `𝒯_W` smooth across nodes of real states,
//! where differentiating `|ψ|` would hit a kink.
//!
//! The split is also the minimum of the deformed kinetic energy
//! `T_u = ½∫|∇ψ + uψ|²` over real fields `u`, reached at the osmotic term
//! `u_c = −½∇p/p`. [`OsmoticField`] and [`deformed_kinetic`] expose that
//! variational structure directly.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{KineticError, Result};
use crate::qstate::{
    amplitude_gradient_sq, density, physical_gradient, regular_node_mask, LocalFields, Wavefunction,
};
use crate::quadgrid::{derivative_values, dot, Grid, RealField};

/// Nodes closer than this many steps to a wavefunction node are skipped by
/// [`pointwise_residual`].
pub const NODE_EXCLUSION_STEPS: usize = 3;
/// Relative density below which [`pointwise_residual`] ignores a node.
pub const POINTWISE_DENSITY_REL: f64 = 1e-10;

/// `𝒯 = ½|∇ψ|²`, including the azimuthal term `m² p / (2 r² sin²θ)`.
pub fn quantum_kinetic_integrand(w: &Wavefunction) -> Result<RealField> {
    let f = LocalFields::new(w)?;
    Ok(quantum_values(&f))
}

/// `𝒯_C = ½ p |∇S|²`. Below the density floor the current part is dropped
/// and only the analytic azimuthal part `m² p / (2 r² sin²θ)` remains.
pub fn classical_integrand(w: &Wavefunction) -> Result<RealField> {
    let f = LocalFields::new(w)?;
    Ok(classical_values(w, &f))
}

/// `𝒯_W = |∇p|²/(8p)`, evaluated as `(Re ψ*∇ψ)² / (2p)`.
///
/// Below the density floor the node limit `½|∇ψ|²` is used.
pub fn weizsacker_integrand(w: &Wavefunction) -> Result<RealField> {
    let f = LocalFields::new(w)?;
    Ok(weizsacker_values(w, &f))
}

fn quantum_values(f: &LocalFields) -> RealField {
    (0..f.len())
        .map(|k| {
            let grad: f64 = f.grad.iter().map(|g| g[k].norm_sqr()).sum();
            0.5 * (grad + f.azimuthal_at(k) * f.density[k])
        })
        .collect()
}

fn classical_values(w: &Wavefunction, f: &LocalFields) -> RealField {
    let psi = w.psi();
    (0..f.len())
        .map(|k| {
            let p = f.density[k];
            if !f.regular(k) {
                return 0.5 * f.azimuthal_at(k) * p;
            }
            let current: f64 = (0..f.grad.len())
                .map(|a| f.projections(psi, a, k).1.powi(2))
                .sum();
            0.5 * (current / p + f.azimuthal_at(k) * p)
        })
        .collect()
}

fn weizsacker_values(w: &Wavefunction, f: &LocalFields) -> RealField {
    let psi = w.psi();
    (0..f.len())
        .map(|k| {
            if !f.regular(k) {
                return 0.5 * f.grad.iter().map(|g| g[k].norm_sqr()).sum::<f64>();
            }
            let half_grad_p: f64 = (0..f.grad.len())
                .map(|a| f.projections(psi, a, k).0.powi(2))
                .sum();
            0.5 * half_grad_p / f.density[k]
        })
        .collect()
}

/// `T = ½∫|∇ψ|²`.
pub fn quantum_kinetic(w: &Wavefunction) -> Result<f64> {
    Ok(dot(&quantum_kinetic_integrand(w)?, w.grid().weights()))
}

/// `T_C = ½∫ p|∇S|²`.
pub fn classical_kinetic(w: &Wavefunction) -> Result<f64> {
    Ok(dot(&classical_integrand(w)?, w.grid().weights()))
}

/// `T_W = ⅛∫|∇p|²/p`.
pub fn weizsacker(w: &Wavefunction) -> Result<f64> {
    Ok(dot(&weizsacker_integrand(w)?, w.grid().weights()))
}

/// Fisher information `𝓘 = ∫|∇p|²/p`, reported as `8 T_W`.
pub fn fisher_information(w: &Wavefunction) -> Result<f64> {
    Ok(8.0 * weizsacker(w)?)
}

/// Fisher information from the density alone: `∇p` is differentiated on the
/// grid and `|∇p|²/p` is summed over nodes above the density floor.
///
/// At floored nodes the integrand tends to `2 Σ ∂²p` along each physical
/// axis (the limit at a simple node of a real state), which is used there.
pub fn fisher_information_direct(w: &Wavefunction) -> Result<f64> {
    let p = density(w).into_inner();
    let floor = w.p_floor(&p);
    let grad = physical_gradient(&p, w.grid())?;
    let floored: Vec<usize> = (0..p.len()).filter(|&k| !(p[k] >= floor && p[k] > 0.0)).collect();

    let mut integrand: Vec<f64> = (0..p.len())
        .map(|k| {
            if p[k] >= floor && p[k] > 0.0 {
                grad.iter().map(|g| g[k] * g[k]).sum::<f64>() / p[k]
            } else {
                0.0
            }
        })
        .collect();

    if !floored.is_empty() {
        // same-axis second derivatives; the θ component already carries 1/r
        let mut curvature = vec![0.0; p.len()];
        for (axis, g) in grad.iter().enumerate() {
            let second = derivative_values(g, w.grid(), axis)?;
            let polar = w.grid().as_polar().filter(|_| axis == 1);
            for &k in &floored {
                let scale = polar.map_or(1.0, |pg| pg.r().points()[k / pg.theta().len()].recip());
                curvature[k] += second[k] * scale;
            }
        }
        for &k in &floored {
            integrand[k] = (2.0 * curvature[k]).max(0.0);
        }
    }
    Ok(dot(&integrand, w.grid().weights()))
}

/// Shannon entropy `−∫ p ln p` in nats; floored nodes contribute zero.
pub fn shannon_entropy(w: &Wavefunction) -> f64 {
    let p = density(w).into_inner();
    let floor = w.p_floor(&p);
    let integrand: Vec<f64> = p
        .iter()
        .map(|&v| if v >= floor && v > 0.0 { -v * v.ln() } else { 0.0 })
        .collect();
    dot(&integrand, w.grid().weights())
}

/// Largest node-excluded relative residual of `𝒯 − 𝒯_C − 𝒯_W`, where `𝒯_W`
/// is taken from `|∇|ψ||²/2` (an independent differentiation path).
pub fn pointwise_residual(w: &Wavefunction) -> Result<f64> {
    let f = LocalFields::new(w)?;
    let t = quantum_values(&f);
    let tc = classical_values(w, &f);
    let amp = amplitude_gradient_sq(w)?;
    let mask = regular_node_mask(w, NODE_EXCLUSION_STEPS, POINTWISE_DENSITY_REL);
    let t_max = t.iter().copied().fold(0.0, f64::max);
    let scale_floor = 1e-12 * t_max;
    Ok((0..t.len())
        .filter(|&k| mask[k])
        .map(|k| (t[k] - tc[k] - 0.5 * amp[k]).abs() / t[k].max(scale_floor))
        .fold(0.0, f64::max))
}

#[derive(Debug)]
struct CriticalPart {
    u: Vec<Vec<f64>>,
    singular: Vec<bool>,
}

/// A deformation field `u`, one real component per physical axis.
///
/// Internally `u = scale · u_c + shift`, where `u_c` is the osmotic term of
/// the state it was built from. `u_c` diverges at nodes of the state; there
/// the stored value is zero and [`deformed_kinetic`] uses the limit
/// `u_c ψ → −∇ψ` instead.
#[derive(Debug, Clone)]
pub struct OsmoticField {
    critical: Option<Arc<CriticalPart>>,
    scale: f64,
    shift: Vec<Vec<f64>>,
}

impl OsmoticField {
    /// The undeformed field `u = 0` for states on `grid`.
    pub fn zero(grid: &Grid) -> Self {
        Self {
            critical: None,
            scale: 0.0,
            shift: vec![vec![0.0; grid.len()]; grid.axes()],
        }
    }

    /// An arbitrary field given component by component.
    pub fn from_components(grid: &Grid, components: Vec<RealField>) -> Result<Self> {
        check_components(grid, &components)?;
        Ok(Self {
            critical: None,
            scale: 0.0,
            shift: components.into_iter().map(RealField::into_inner).collect(),
        })
    }

    /// `α · u`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            critical: self.critical.clone(),
            scale: self.scale * alpha,
            shift: self
                .shift
                .iter()
                .map(|c| c.iter().map(|v| v * alpha).collect())
                .collect(),
        }
    }

    /// `u + δ`.
    pub fn perturbed(&self, delta: &[RealField]) -> Result<Self> {
        if delta.len() != self.shift.len() {
            return Err(KineticError::InvalidArgument(format!(
                "perturbation has {} components, field has {}",
                delta.len(),
                self.shift.len()
            )));
        }
        let mut shift = self.shift.clone();
        for (dst, d) in shift.iter_mut().zip(delta) {
            if d.len() != dst.len() {
                return Err(KineticError::LengthMismatch {
                    expected: dst.len(),
                    found: d.len(),
                });
            }
            for (a, b) in dst.iter_mut().zip(d.iter()) {
                *a += b;
            }
        }
        Ok(Self {
            critical: self.critical.clone(),
            scale: self.scale,
            shift,
        })
    }

    pub fn axes(&self) -> usize {
        self.shift.len()
    }

    pub fn len(&self) -> usize {
        self.shift.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sampled values of one component (zero where `u_c` diverges).
    pub fn component(&self, axis: usize) -> RealField {
        let shift = &self.shift[axis];
        match &self.critical {
            Some(c) => c.u[axis]
                .iter()
                .zip(shift)
                .map(|(u, s)| self.scale * u + s)
                .collect(),
            None => shift.clone().into(),
        }
    }

    /// Nodes where the osmotic term is undefined (density below the floor).
    pub fn singular_nodes(&self) -> Option<&[bool]> {
        self.critical.as_ref().map(|c| c.singular.as_slice())
    }
}

fn check_components(grid: &Grid, components: &[RealField]) -> Result<()> {
    if components.len() != grid.axes() {
        return Err(KineticError::InvalidArgument(format!(
            "expected {} components, got {}",
            grid.axes(),
            components.len()
        )));
    }
    for c in components {
        c.check_aligned(grid)?;
    }
    Ok(())
}

/// The critical deformation `u_c = −½∇p/p`, computed per physical axis as
/// `−Re(ψ*∂ψ)/p`.
pub fn osmotic_term(w: &Wavefunction) -> Result<OsmoticField> {
    let f = LocalFields::new(w)?;
    let psi = w.psi();
    let singular: Vec<bool> = (0..f.len()).map(|k| !f.regular(k)).collect();
    let u = (0..f.grad.len())
        .map(|a| {
            (0..f.len())
                .map(|k| {
                    if singular[k] {
                        0.0
                    } else {
                        -f.projections(psi, a, k).0 / f.density[k]
                    }
                })
                .collect()
        })
        .collect();
    Ok(OsmoticField {
        critical: Some(Arc::new(CriticalPart { u, singular })),
        scale: 1.0,
        shift: vec![vec![0.0; f.len()]; f.grad.len()],
    })
}

/// Deformed kinetic energy `T_u = ½∫|∇ψ + uψ|²` (plus the azimuthal term,
/// which `u` cannot touch since the density is φ-independent).
pub fn deformed_kinetic(w: &Wavefunction, u: &OsmoticField) -> Result<f64> {
    if u.axes() != w.grid().axes() {
        return Err(KineticError::InvalidArgument(format!(
            "deformation has {} components, grid has {} axes",
            u.axes(),
            w.grid().axes()
        )));
    }
    if u.len() != w.grid().len() {
        return Err(KineticError::LengthMismatch {
            expected: w.grid().len(),
            found: u.len(),
        });
    }
    let f = LocalFields::new(w)?;
    let psi = w.psi();
    let integrand: Vec<f64> = (0..f.len())
        .map(|k| {
            let singular = u.critical.as_ref().is_some_and(|c| c.singular[k]);
            let sum: f64 = (0..f.grad.len())
                .map(|a| {
                    let shifted = psi[k] * u.shift[a][k];
                    let z: Complex64 = if singular {
                        f.grad[a][k] * (1.0 - u.scale) + shifted
                    } else {
                        let uc = u.critical.as_ref().map_or(0.0, |c| c.u[a][k]);
                        f.grad[a][k] + psi[k] * (u.scale * uc) + shifted
                    };
                    z.norm_sqr()
                })
                .sum();
            0.5 * (sum + f.azimuthal_at(k) * f.density[k])
        })
        .collect();
    Ok(dot(&integrand, w.grid().weights()))
}

/// `T_{α u_c}` for each `α`.
pub fn variational_scan(w: &Wavefunction, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    if alphas.is_empty() {
        return Err(KineticError::InvalidArgument("alpha list is empty".into()));
    }
    let uc = osmotic_term(w)?;
    alphas
        .iter()
        .map(|&a| deformed_kinetic(w, &uc.scaled(a)).map(|t| (a, t)))
        .collect()
}

/// `a α² + b α + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parabola {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Parabola {
    pub fn vertex(&self) -> (f64, f64) {
        let x = -self.b / (2.0 * self.a);
        (x, self.eval(x))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Least-squares parabola through `points`; `None` with fewer than three
/// distinct abscissae.
pub fn fit_parabola(points: &[(f64, f64)]) -> Option<Parabola> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return None;
    }
    // centre the abscissae for conditioning
    let mean = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let mut m = [[0.0; 4]; 3];
    for &(x, y) in points {
        let s = x - mean;
        let basis = [s * s, s, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        m.swap(col, pivot);
        if m[col][col].abs() < f64::EPSILON {
            return None;
        }
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (x, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= factor * p;
            }
        }
    }
    let mut sol = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * sol[k]).sum();
        sol[row] = (m[row][3] - tail) / m[row][row];
    }
    let (a, bs, cs) = (sol[0], sol[1], sol[2]);
    // undo the shift s = x − mean
    Some(Parabola {
        a,
        b: bs - 2.0 * a * mean,
        c: a * mean * mean - bs * mean + cs,
    })
}

/// Random smooth perturbation of the deformation: per component a sum of
/// five sinusoids scaled to a maximum magnitude of 0.5, zeroed wherever the
/// density is below `1e-8 · max p`.
pub fn smooth_perturbation<R: Rng + ?Sized>(w: &Wavefunction, rng: &mut R) -> Vec<RealField> {
    const MODES: usize = 5;
    const AMPLITUDE: f64 = 0.5;
    const WINDOW_REL: f64 = 1e-8;

    let p = density(w);
    let pmax = p.iter().copied().fold(0.0, f64::max);
    let coords: Vec<(f64, f64)> = match w.grid() {
        Grid::Line(g) => g.points().iter().map(|&x| (x, 0.0)).collect(),
        Grid::Polar(g) => g
            .r()
            .points()
            .iter()
            .flat_map(|&r| g.theta().points().iter().map(move |&t| (r, t)))
            .collect(),
    };
    let extent = |i: usize| {
        let (lo, hi) = coords.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            let v = if i == 0 { c.0 } else { c.1 };
            (lo.min(v), hi.max(v))
        });
        (hi - lo).max(1.0)
    };
    let (span0, span1) = (extent(0), extent(1));

    (0..w.grid().axes())
        .map(|_| {
            let modes: Vec<[f64; 4]> = (0..MODES)
                .map(|_| {
                    [
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(1..=6) as f64 * std::f64::consts::PI / span0,
                        rng.gen_range(0..=4) as f64 * std::f64::consts::PI / span1,
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    ]
                })
                .collect();
            let mut values: Vec<f64> = coords
                .iter()
                .zip(p.iter())
                .map(|(&(x, y), &pv)| {
                    if pv < WINDOW_REL * pmax {
                        return 0.0;
                    }
                    modes.iter().map(|m| m[0] * (m[1] * x + m[2] * y + m[3]).sin()).sum()
                })
                .collect();
            let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if peak > 0.0 {
                values.iter_mut().for_each(|v| *v *= AMPLITUDE / peak);
            }
            RealField::new(values)
        })
        .collect()
}

/// `½∫|δ|² p`: the exact excess `T_{u_c+δ} − T_{u_c}`.
pub fn quadratic_excess(w: &Wavefunction, delta: &[RealField]) -> Result<f64> {
    check_components(w.grid(), delta)?;
    let p = density(w);
    let integrand: Vec<f64> = (0..p.len())
        .map(|k| 0.5 * p[k] * delta.iter().map(|d| d[k] * d[k]).sum::<f64>())
        .collect();
    Ok(dot(&integrand, w.grid().weights()))
}

/// Scalar part of a [`DecompositionReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticSummary {
    #[serde(rename = "T")]
    pub kinetic: f64,
    #[serde(rename = "T_C")]
    pub classical: f64,
    #[serde(rename = "T_W")]
    pub weizsacker: f64,
    pub fisher: f64,
    pub shannon: f64,
}

/// Full decomposition of one state at one time.
///
/// On lines the integrand fields are sampled at the grid points. On polar
/// grids they are angular-integrated radial distributions sampled at the
/// radial nodes, so integrating them over `r` gives the totals.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub kinetic: f64,
    pub classical: f64,
    pub weizsacker: f64,
    pub fisher: f64,
    /// Fisher information from the density-only route, kept for cross-checks.
    pub fisher_direct: f64,
    pub shannon: f64,
    /// Coordinates of the integrand samples (x, or r on polar grids).
    pub abscissa: Vec<f64>,
    pub integrand_t: RealField,
    pub integrand_tc: RealField,
    pub integrand_tw: RealField,
}

impl DecompositionReport {
    pub fn summary(&self) -> KineticSummary {
        KineticSummary {
            kinetic: self.kinetic,
            classical: self.classical,
            weizsacker: self.weizsacker,
            fisher: self.fisher,
            shannon: self.shannon,
        }
    }

    /// `|T − T_C − T_W| / T`.
    pub fn split_defect(&self) -> f64 {
        (self.kinetic - self.classical - self.weizsacker).abs() / self.kinetic.abs().max(f64::MIN_POSITIVE)
    }

    /// Checks the report invariants: nonnegative parts, both parts bounded by
    /// `T`, `T = T_C + T_W` to `1e-8 T`, `𝓘 = 8 T_W`, and agreement of the two
    /// Fisher routes to `1e-6`.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(KineticError::InvariantViolation(msg));
        if self.classical < -1e-14 || self.weizsacker < 0.0 {
            return fail(format!(
                "negative component: T_C = {}, T_W = {}",
                self.classical, self.weizsacker
            ));
        }
        if self.kinetic < self.classical.max(self.weizsacker) - 1e-9 {
            return fail(format!("T = {} below one of its lower bounds", self.kinetic));
        }
        if self.split_defect() > 1e-8 {
            return fail(format!(
                "T - T_C - T_W = {:e} exceeds 1e-8 T",
                self.kinetic - self.classical - self.weizsacker
            ));
        }
        if (self.fisher - 8.0 * self.weizsacker).abs() > 1e-10 * self.fisher.abs() {
            return fail("Fisher information differs from 8 T_W".into());
        }
        if (self.fisher_direct - self.fisher).abs() > 1e-6 * self.fisher.abs().max(1e-300) {
            return fail(format!(
                "Fisher cross-check failed: {} vs {}",
                self.fisher_direct, self.fisher
            ));
        }
        Ok(())
    }
}

/// Angular integration of a polar field: `Σ_j 2π r² sin θ_j w_j f(r, θ_j)` per radius.
fn radial_profile(values: &[f64], grid: &Grid) -> Vec<f64> {
    match grid {
        Grid::Line(_) => values.to_vec(),
        Grid::Polar(g) => {
            let nt = g.theta().len();
            let wr = g.r().weights();
            values
                .chunks(nt)
                .zip(g.weights().chunks(nt))
                .zip(wr)
                .map(|((row, w), &radial_weight)| dot(row, w) / radial_weight)
                .collect()
        }
    }
}

/// Computes `T`, `T_C`, `T_W`, `𝓘`, the Shannon entropy and the integrand
/// profiles for `w`.
pub fn decompose(w: &Wavefunction) -> Result<DecompositionReport> {
    let f = LocalFields::new(w)?;
    let t = quantum_values(&f);
    let tc = classical_values(w, &f);
    let tw = weizsacker_values(w, &f);
    drop(f);

    let weights = w.grid().weights();
    let kinetic = dot(&t, weights);
    let classical = dot(&tc, weights);
    let weizsacker = dot(&tw, weights);

    let abscissa = match w.grid() {
        Grid::Line(g) => g.points().to_vec(),
        Grid::Polar(g) => g.r().points().to_vec(),
    };
    Ok(DecompositionReport {
        kinetic,
        classical,
        weizsacker,
        fisher: 8.0 * weizsacker,
        fisher_direct: fisher_information_direct(w)?,
        shannon: shannon_entropy(w),
        abscissa,
        integrand_t: radial_profile(&t, w.grid()).into(),
        integrand_tc: radial_profile(&tc, w.grid()).into(),
        integrand_tw: radial_profile(&tw, w.grid()).into(),
    })
}
