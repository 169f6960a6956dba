//! Nonstationary one-dimensional states: a particle-in-a-box superposition
//! and a freely spreading Gaussian packet, both evolved analytically, plus a
//! Crank–Nicolson propagator that serves as an independent check on the
//! analytic propagators.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{KineticError, Result};
use crate::functionals::{decompose, DecompositionReport};
use crate::qstate::{normalize, Wavefunction};
use crate::quadgrid::{ComplexField, Grid, Grid1D, RealField};

/// Largest norm defect accepted for a sampled analytic state.
pub const MAX_EXTENT_DEFECT: f64 = 1e-9;
/// Largest Crank–Nicolson step accepted (atomic time units).
///
/// The scheme is unitary for any step; beyond this the phase error of the
/// lowest box modes exceeds the oracle tolerance.
pub const MAX_CN_STEP: f64 = 1e-2;
/// Default Crank–Nicolson step for box states.
pub const PIB_DT: f64 = 1e-5;
/// Default Crank–Nicolson step for the free Gaussian.
pub const GAUSSIAN_DT: f64 = 1e-3;

/// Default box grid: `[0, 1]` with 2001 points.
pub fn pib_grid() -> Grid1D {
    Grid1D::new(0.0, 1.0, 2001).expect("valid grid")
}

/// Default Gaussian grid: `[−60, 60]` with 4001 points.
pub fn gaussian_grid() -> Grid1D {
    Grid1D::new(-60.0, 60.0, 4001).expect("valid grid")
}

/// Gaussian grid wide enough for every time up to `t_max`.
///
/// Keeps the default spacing of 0.03 Bohr and widens the symmetric extent
/// to `max(60, 6 √(1 + t²))`, which leaves a norm defect far below 1e-9.
pub fn gaussian_grid_for(t_max: f64) -> Grid1D {
    let half = (6.0 * (1.0 + t_max * t_max).sqrt()).max(60.0);
    let spacing = 0.03;
    let mut points = (2.0 * half / spacing).ceil() as usize + 1;
    if points.is_multiple_of(2) {
        points += 1;
    }
    Grid1D::new(-half, half, points).expect("valid grid")
}

fn line_of(grid: &Arc<Grid>) -> Result<&Grid1D> {
    grid.as_line().ok_or(KineticError::WrongGrid { expected: "1D" })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(KineticError::InvalidArgument(format!("time {t} must be finite and >= 0")))
    }
}

/// Box eigen-energy `E_k = k²π²/(2L²)`.
pub fn pib_energy(k: u32, box_length: f64) -> f64 {
    let k = f64::from(k);
    k * k * PI * PI / (2.0 * box_length * box_length)
}

fn pib_mode(k: u32, box_length: f64, x: f64) -> f64 {
    (2.0 / box_length).sqrt() * (f64::from(k) * PI * x / box_length).sin()
}

fn check_box_grid(g: &Grid1D, box_length: f64) -> Result<()> {
    let tol = 1e-12 * box_length;
    if g.min().abs() > tol || (g.max() - box_length).abs() > tol {
        return Err(KineticError::InvalidGrid(format!(
            "box states need a grid spanning [0, {box_length}], got [{}, {}]",
            g.min(),
            g.max()
        )));
    }
    Ok(())
}

/// `√(2/L) sin(kπx/L)`.
pub fn pib_eigenfunction(k: u32, box_length: f64, grid: &Arc<Grid>) -> Result<Wavefunction> {
    if k < 1 {
        return Err(KineticError::InvalidArgument("box eigenfunction index starts at 1".into()));
    }
    let g = line_of(grid)?;
    check_box_grid(g, box_length)?;
    let psi = g
        .points()
        .iter()
        .map(|&x| Complex64::new(pib_mode(k, box_length, x), 0.0))
        .collect();
    Wavefunction::new(Arc::clone(grid), psi, 0)
}

/// Superposition `Σ c_k ψ_k` of box eigenfunctions (k starting at 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PibSuperposition {
    box_length: f64,
    coefficients: Vec<Complex64>,
}

impl PibSuperposition {
    pub fn new(box_length: f64, coefficients: Vec<Complex64>) -> Result<Self> {
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(KineticError::InvalidArgument(format!("box length {box_length}")));
        }
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(KineticError::InvalidArgument(format!(
                "coefficient norm {norm} is not 1"
            )));
        }
        Ok(Self {
            box_length,
            coefficients,
        })
    }

    /// `2^{−1/2} (ψ₁ + ψ₂)` in a box of unit length.
    pub fn two_lowest() -> Self {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(1.0, vec![c, c]).expect("normalized")
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `⟨T⟩ = Σ |c_k|² E_k`, constant in time.
    pub fn mean_energy(&self) -> f64 {
        self.modes().map(|(k, c)| c.norm_sqr() * pib_energy(k, self.box_length)).sum()
    }

    /// Period of the relative phase of the two lowest modes, `2π/(E₂ − E₁)`.
    pub fn beat_period(&self) -> f64 {
        2.0 * PI / (pib_energy(2, self.box_length) - pib_energy(1, self.box_length))
    }

    fn modes(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coefficients.iter().enumerate().map(|(i, &c)| (i as u32 + 1, c))
    }
}

/// `φ(x, t) = Σ c_k ψ_k(x) e^{−iE_k t}`.
pub fn pib_evolve(s: &PibSuperposition, t: f64, grid: &Arc<Grid>) -> Result<Wavefunction> {
    check_time(t)?;
    let g = line_of(grid)?;
    check_box_grid(g, s.box_length)?;
    let phases: Vec<(u32, Complex64)> = s
        .modes()
        .map(|(k, c)| (k, c * Complex64::from_polar(1.0, -pib_energy(k, s.box_length) * t)))
        .collect();
    let psi = g
        .points()
        .iter()
        .map(|&x| {
            phases
                .iter()
                .map(|&(k, c)| c * pib_mode(k, s.box_length, x))
                .sum()
        })
        .collect();
    Wavefunction::new(Arc::clone(grid), psi, 0)
}

/// The free packet that starts as `π^{−1/4} e^{−x²/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussianPacket;

impl GaussianPacket {
    /// Analytic `(T_C, T_W)` at time `t`: `(t²/(4(1+t²)), 1/(4(1+t²)))`.
    pub fn analytic_split(t: f64) -> (f64, f64) {
        let s = 1.0 + t * t;
        (t * t / (4.0 * s), 1.0 / (4.0 * s))
    }
}

/// `ψ(x, t) = π^{−1/4} (1 + it)^{−1/2} exp(−x² / (2(1 + it)))`.
pub fn gaussian_evolve(t: f64, grid: &Arc<Grid>) -> Result<Wavefunction> {
    check_time(t)?;
    let g = line_of(grid)?;
    let one_it = Complex64::new(1.0, t);
    let prefactor = PI.powf(-0.25) / one_it.sqrt();
    let psi: ComplexField = g
        .points()
        .iter()
        .map(|&x| prefactor * (-(x * x) / (2.0 * one_it)).exp())
        .collect();
    let w = Wavefunction::new(Arc::clone(grid), psi, 0)?;
    let defect = (w.norm_sq() - 1.0).abs();
    if defect > MAX_EXTENT_DEFECT {
        return Err(KineticError::InsufficientExtent {
            defect,
            limit: MAX_EXTENT_DEFECT,
        });
    }
    normalize(&w)
}

/// Either nonstationary system.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Pib(PibSuperposition),
    Gaussian(GaussianPacket),
}

impl System {
    pub fn state_at(&self, t: f64, grid: &Arc<Grid>) -> Result<Wavefunction> {
        match self {
            System::Pib(s) => pib_evolve(s, t, grid),
            System::Gaussian(_) => gaussian_evolve(t, grid),
        }
    }
}

/// One decomposition per requested time.
pub fn decomposition_timeseries(
    system: &System,
    times: &[f64],
    grid: &Arc<Grid>,
) -> Result<Vec<DecompositionReport>> {
    times
        .iter()
        .map(|&t| decompose(&system.state_at(t, grid)?))
        .collect()
}

/// Crank–Nicolson propagation of `w0` under `H = −½∂² + V` with Dirichlet
/// walls at both grid ends.
///
/// The kinetic operator uses the compact fourth-order (Numerov) form
/// `−½ M⁻¹ δ²/h²` with `M = 1 + δ²/12`, which stays tridiagonal. `H` is
/// symmetric, so each step is exactly unitary in the discrete norm.
pub fn cn_propagate(w0: &Wavefunction, potential: &RealField, dt: f64, steps: usize) -> Result<Wavefunction> {
    let grid = w0.shared_grid();
    let g = line_of(&grid)?;
    potential.check_aligned(&grid)?;
    if !(dt > 0.0 && dt <= MAX_CN_STEP) {
        return Err(KineticError::UnstableStep { dt, max: MAX_CN_STEP });
    }
    let mut psi: Vec<Complex64> = w0.psi().to_vec();
    if steps == 0 {
        return Wavefunction::new(grid, psi.into(), 0);
    }
    let n = psi.len();
    if n < 3 {
        return Err(KineticError::GridTooShort { points: n, required: 3 });
    }
    let m = n - 2;
    let h2 = g.spacing() * g.spacing();
    let tau = Complex64::new(0.0, 0.5 * dt);
    let v = &potential[1..n - 1];

    // Row j of  M ± iτ(−½ A + M V):  off-diagonals reference V at the
    // neighbouring node because M V multiplies V first.
    let (m_off, m_diag) = (1.0 / 12.0, 10.0 / 12.0);
    let (a_off, a_diag) = (1.0 / h2, -2.0 / h2);
    let row = |sign: f64, j: usize| -> (Complex64, Complex64, Complex64) {
        let s = tau * sign;
        let lower = if j > 0 { m_off + s * (-0.5 * a_off + m_off * v[j - 1]) } else { Complex64::default() };
        let diag = m_diag + s * (-0.5 * a_diag + m_diag * v[j]);
        let upper = if j + 1 < m { m_off + s * (-0.5 * a_off + m_off * v[j + 1]) } else { Complex64::default() };
        (lower, diag, upper)
    };
    let lhs: Vec<_> = (0..m).map(|j| row(1.0, j)).collect();
    let rhs: Vec<_> = (0..m).map(|j| row(-1.0, j)).collect();
    let solver = Tridiagonal::factor(&lhs);

    psi[0] = Complex64::default();
    psi[n - 1] = Complex64::default();
    let mut b = vec![Complex64::default(); m];
    for _ in 0..steps {
        let inner = &psi[1..n - 1];
        for j in 0..m {
            let (lo, d, up) = rhs[j];
            let mut acc = d * inner[j];
            if j > 0 {
                acc += lo * inner[j - 1];
            }
            if j + 1 < m {
                acc += up * inner[j + 1];
            }
            b[j] = acc;
        }
        solver.solve(&mut b);
        psi[1..n - 1].copy_from_slice(&b);
    }
    Wavefunction::new(grid, psi.into(), 0)
}

/// LU factors of a complex tridiagonal matrix (Thomas algorithm).
struct Tridiagonal {
    lower: Vec<Complex64>,
    upper_prime: Vec<Complex64>,
    inv_diag: Vec<Complex64>,
}

impl Tridiagonal {
    fn factor(rows: &[(Complex64, Complex64, Complex64)]) -> Self {
        let m = rows.len();
        let mut upper_prime = vec![Complex64::default(); m];
        let mut inv_diag = vec![Complex64::default(); m];
        let lower: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
        for j in 0..m {
            let (lo, d, up) = rows[j];
            let denom = if j == 0 { d } else { d - lo * upper_prime[j - 1] };
            inv_diag[j] = denom.inv();
            upper_prime[j] = up * inv_diag[j];
        }
        Self {
            lower,
            upper_prime,
            inv_diag,
        }
    }

    fn solve(&self, b: &mut [Complex64]) {
        let m = b.len();
        b[0] *= self.inv_diag[0];
        for j in 1..m {
            b[j] = (b[j] - self.lower[j] * b[j - 1]) * self.inv_diag[j];
        }
        for j in (0..m - 1).rev() {
            let next = b[j + 1];
            b[j] -= self.upper_prime[j] * next;
        }
    }
}

/// Euclidean norm `h Σ|ψ_j|²`, the quantity Crank–Nicolson conserves.
pub fn discrete_norm_sq(w: &Wavefunction) -> Result<f64> {
    let g = w.grid().as_line().ok_or(KineticError::WrongGrid { expected: "1D" })?;
    Ok(g.spacing() * w.psi().iter().map(|z| z.norm_sqr()).sum::<f64>())
}
