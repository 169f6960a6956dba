//! Uniform grids with composite Simpson weights and sixth-order finite
//! differences.
//!
//! Every field in this crate is a flat vector of samples aligned with a
//! [`Grid`]. Two layouts exist: a 1D line and a polar `(r, θ)` grid for
//! azimuthally symmetric densities, whose weights carry the `2π r² sin θ`
//! volume element.

use std::f64::consts::PI;
use std::ops::{Add, Deref, DerefMut, Mul};

use num_complex::Complex64;

use crate::error::{KineticError, Result};

/// Smallest radius sampled on polar grids (Bohr).
pub const RADIAL_EPS: f64 = 1e-6;
/// Distance from the poles of the first and last polar-angle samples (rad).
pub const POLAR_EPS: f64 = 1e-6;
/// Minimum number of points along an axis that can be differentiated.
pub const MIN_DIFF_POINTS: usize = 7;

const UNIFORM_TOL: f64 = 1e-12;

// Sixth-order first-derivative stencils. Central, then one-sided for the
// first three nodes (mirrored with a sign flip at the far end).
const CENTRAL: [f64; 7] = [
    -1.0 / 60.0,
    3.0 / 20.0,
    -3.0 / 4.0,
    0.0,
    3.0 / 4.0,
    -3.0 / 20.0,
    1.0 / 60.0,
];
const EDGE: [[f64; 7]; 3] = [
    [-49.0 / 20.0, 6.0, -15.0 / 2.0, 20.0 / 3.0, -15.0 / 4.0, 6.0 / 5.0, -1.0 / 6.0],
    [-1.0 / 6.0, -77.0 / 60.0, 5.0 / 2.0, -5.0 / 3.0, 5.0 / 6.0, -1.0 / 4.0, 1.0 / 30.0],
    [1.0 / 30.0, -2.0 / 5.0, -7.0 / 12.0, 4.0 / 3.0, -1.0 / 2.0, 2.0 / 15.0, -1.0 / 60.0],
];

/// Uniformly spaced points on `[min, max]` with composite Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
}

impl Grid1D {
    /// Builds a uniform grid of `n_points` (odd, ≥ 3) nodes on `[xmin, xmax]`.
    pub fn new(xmin: f64, xmax: f64, n_points: usize) -> Result<Self> {
        if !xmin.is_finite() || !xmax.is_finite() || xmax <= xmin {
            return Err(KineticError::InvalidGrid(format!(
                "interval [{xmin}, {xmax}] is empty or not finite"
            )));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(KineticError::InvalidGrid(format!(
                "Simpson weights need an odd point count >= 3, got {n_points}"
            )));
        }
        let intervals = n_points - 1;
        let spacing = (xmax - xmin) / intervals as f64;
        let points = (0..n_points)
            .map(|i| {
                if i == intervals {
                    xmax
                } else {
                    xmin + spacing * i as f64
                }
            })
            .collect();
        let weights = (0..n_points)
            .map(|i| {
                let c = if i == 0 || i == intervals {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * spacing / 3.0
            })
            .collect();
        Ok(Self {
            points,
            weights,
            spacing,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Checks the uniform-spacing invariant.
    pub fn is_uniform(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - self.spacing).abs() <= UNIFORM_TOL * self.spacing.max(1.0))
    }
}

/// Free-function form of [`Grid1D::new`].
pub fn make_uniform_grid(xmin: f64, xmax: f64, n_points: usize) -> Result<Grid1D> {
    Grid1D::new(xmin, xmax, n_points)
}

/// Polar grid over `(r, θ)`; the azimuth is integrated analytically.
///
/// Nodes are stored r-major: node `(i, j)` sits at index `i * n_theta + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    r: Grid1D,
    theta: Grid1D,
    weights: Vec<f64>,
}

impl Grid2D {
    pub fn new(r: Grid1D, theta: Grid1D) -> Result<Self> {
        if r.min() < 0.0 {
            return Err(KineticError::InvalidGrid(format!(
                "radial grid starts at negative radius {}",
                r.min()
            )));
        }
        if theta.min() < 0.0 || theta.max() > PI {
            return Err(KineticError::InvalidGrid(format!(
                "polar grid [{}, {}] leaves [0, π]",
                theta.min(),
                theta.max()
            )));
        }
        let mut weights = Vec::with_capacity(r.len() * theta.len());
        for (&ri, &wr) in r.points().iter().zip(r.weights()) {
            for (&tj, &wt) in theta.points().iter().zip(theta.weights()) {
                weights.push(2.0 * PI * ri * ri * tj.sin() * wr * wt);
            }
        }
        Ok(Self { r, theta, weights })
    }

    /// Radial grid on `[RADIAL_EPS, r_max]` and a polar grid on
    /// `[POLAR_EPS, π − POLAR_EPS]`.
    pub fn with_extent(r_max: f64, r_points: usize, theta_points: usize) -> Result<Self> {
        Self::new(
            Grid1D::new(RADIAL_EPS, r_max, r_points)?,
            Grid1D::new(POLAR_EPS, PI - POLAR_EPS, theta_points)?,
        )
    }

    /// Default hydrogenic grid: r ∈ [1e-6, 60] with 4001 points, 1001 polar points.
    pub fn hydrogenic_default() -> Self {
        Self::with_extent(60.0, 4001, 1001).expect("default grid is valid")
    }

    pub fn r(&self) -> &Grid1D {
        &self.r
    }

    pub fn theta(&self) -> &Grid1D {
        &self.theta
    }

    /// Quadrature weights including the `2π r² sin θ` volume element.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.r.len(), self.theta.len())
    }

    pub fn index(&self, i_r: usize, j_theta: usize) -> usize {
        i_r * self.theta.len() + j_theta
    }
}

/// Either grid layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Line(Grid1D),
    Polar(Grid2D),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Line(g) => g.len(),
            Grid::Polar(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            Grid::Line(g) => g.weights(),
            Grid::Polar(g) => g.weights(),
        }
    }

    /// Number of differentiable axes (1 for lines, 2 for polar grids).
    pub fn axes(&self) -> usize {
        match self {
            Grid::Line(_) => 1,
            Grid::Polar(_) => 2,
        }
    }

    pub fn as_line(&self) -> Option<&Grid1D> {
        match self {
            Grid::Line(g) => Some(g),
            Grid::Polar(_) => None,
        }
    }

    pub fn as_polar(&self) -> Option<&Grid2D> {
        match self {
            Grid::Polar(g) => Some(g),
            Grid::Line(_) => None,
        }
    }
}

impl From<Grid1D> for Grid {
    fn from(g: Grid1D) -> Self {
        Grid::Line(g)
    }
}

impl From<Grid2D> for Grid {
    fn from(g: Grid2D) -> Self {
        Grid::Polar(g)
    }
}

macro_rules! field_type {
    ($(#[$meta:meta])* $name:ident, $elem:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Default)]
        pub struct $name(Vec<$elem>);

        impl $name {
            pub fn new(values: Vec<$elem>) -> Self {
                Self(values)
            }

            pub fn zeros(len: usize) -> Self {
                Self(vec![<$elem>::default(); len])
            }

            pub fn values(&self) -> &[$elem] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<$elem> {
                self.0
            }

            pub fn check_aligned(&self, grid: &Grid) -> Result<()> {
                if self.0.len() == grid.len() {
                    Ok(())
                } else {
                    Err(KineticError::LengthMismatch {
                        expected: grid.len(),
                        found: self.0.len(),
                    })
                }
            }
        }

        impl From<Vec<$elem>> for $name {
            fn from(values: Vec<$elem>) -> Self {
                Self(values)
            }
        }

        impl FromIterator<$elem> for $name {
            fn from_iter<I: IntoIterator<Item = $elem>>(iter: I) -> Self {
                Self(iter.into_iter().collect())
            }
        }

        impl Deref for $name {
            type Target = [$elem];
            fn deref(&self) -> &[$elem] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [$elem] {
                &mut self.0
            }
        }
    };
}

field_type!(
    /// Real samples, one per grid node.
    RealField,
    f64
);
field_type!(
    /// Complex samples, one per grid node.
    ComplexField,
    Complex64
);

/// Weighted quadrature sum of `f` over `grid`.
pub fn integrate(f: &RealField, grid: &Grid) -> Result<f64> {
    f.check_aligned(grid)?;
    Ok(dot(f, grid.weights()))
}

pub(crate) fn dot(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

/// Sample types that can be differentiated by linear stencils.
pub trait Sample: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl Sample for f64 {}
impl Sample for Complex64 {}

/// Stencil for node `i` of `n`: first sample index and seven coefficients.
fn stencil(i: usize, n: usize) -> (usize, [f64; 7]) {
    if i < 3 {
        (0, EDGE[i])
    } else if i >= n - 3 {
        let mut c = EDGE[n - 1 - i];
        c.reverse();
        c.iter_mut().for_each(|v| *v = -*v);
        (n - 7, c)
    } else {
        (i - 3, CENTRAL)
    }
}

fn diff_line<T: Sample>(src: &[T], h: f64, dst: &mut [T]) {
    let inv_h = 1.0 / h;
    let n = src.len();
    for (i, out) in dst.iter_mut().enumerate() {
        let (start, coeffs) = stencil(i, n);
        let mut acc = T::default();
        for (k, &c) in coeffs.iter().enumerate() {
            acc = acc + src[start + k] * c;
        }
        *out = acc * inv_h;
    }
}

/// Derivative of raw samples along `axis` (0 for lines; 0 = r, 1 = θ on
/// polar grids). Derivatives are with respect to the coordinate itself, so
/// the polar-angle derivative is `∂/∂θ`, not a physical gradient component.
pub fn derivative_values<T: Sample>(f: &[T], grid: &Grid, axis: usize) -> Result<Vec<T>> {
    if f.len() != grid.len() {
        return Err(KineticError::LengthMismatch {
            expected: grid.len(),
            found: f.len(),
        });
    }
    let mut out = vec![T::default(); f.len()];
    match (grid, axis) {
        (Grid::Line(g), 0) => {
            ensure_diff_points(g.len())?;
            diff_line(f, g.spacing(), &mut out);
        }
        (Grid::Polar(g), 0) => {
            // whole θ-rows at a time keeps the access pattern contiguous
            let (nr, nt) = g.shape();
            ensure_diff_points(nr)?;
            let inv_h = 1.0 / g.r().spacing();
            for (i, dst) in out.chunks_mut(nt).enumerate() {
                let (start, coeffs) = stencil(i, nr);
                for (k, &c) in coeffs.iter().enumerate() {
                    let src = &f[(start + k) * nt..(start + k + 1) * nt];
                    for (d, &v) in dst.iter_mut().zip(src) {
                        *d = *d + v * (c * inv_h);
                    }
                }
            }
        }
        (Grid::Polar(g), 1) => {
            let (nr, nt) = g.shape();
            ensure_diff_points(nt)?;
            for i in 0..nr {
                let row = &f[i * nt..(i + 1) * nt];
                let dst = &mut out[i * nt..(i + 1) * nt];
                diff_line(row, g.theta().spacing(), dst);
            }
        }
        _ => {
            return Err(KineticError::InvalidArgument(format!(
                "axis {axis} does not exist on a grid with {} axes",
                grid.axes()
            )))
        }
    }
    Ok(out)
}

fn ensure_diff_points(points: usize) -> Result<()> {
    if points < MIN_DIFF_POINTS {
        Err(KineticError::GridTooShort {
            points,
            required: MIN_DIFF_POINTS,
        })
    } else {
        Ok(())
    }
}

/// Fields that [`derivative`] accepts.
pub trait Differentiable: Sized {
    fn differentiate(&self, grid: &Grid, axis: usize) -> Result<Self>;
}

impl Differentiable for RealField {
    fn differentiate(&self, grid: &Grid, axis: usize) -> Result<Self> {
        derivative_values(self, grid, axis).map(Self)
    }
}

impl Differentiable for ComplexField {
    fn differentiate(&self, grid: &Grid, axis: usize) -> Result<Self> {
        derivative_values(self, grid, axis).map(Self)
    }
}

/// Sixth-order finite-difference derivative of `f` along `axis`.
pub fn derivative<F: Differentiable>(f: &F, grid: &Grid, axis: usize) -> Result<F> {
    f.differentiate(grid, axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line(a: f64, b: f64, n: usize) -> Grid {
        Grid1D::new(a, b, n).unwrap().into()
    }

    fn sample(g: &Grid, f: impl Fn(f64) -> f64) -> RealField {
        g.as_line().unwrap().points().iter().map(|&x| f(x)).collect()
    }

    #[test]
    fn one_panel_weights() {
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        assert_eq!(g.points(), &[0.0, 0.5, 1.0]);
        let expected = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
        for (w, e) in g.weights().iter().zip(expected) {
            assert_relative_eq!(*w, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(Grid1D::new(0.0, 1.0, 4), Err(KineticError::InvalidGrid(_))));
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(2.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, f64::NAN, 5).is_err());
    }

    #[test]
    fn weights_sum_to_length_and_spacing_is_uniform() {
        let g = Grid1D::new(-3.5, 7.25, 1001).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, 10.75, max_relative = 1e-12);
        assert!(g.is_uniform());
        assert_eq!(g.max(), 7.25);
    }

    #[test]
    fn gaussian_integral() {
        let g = line(-10.0, 10.0, 2001);
        let f = sample(&g, |x| (-x * x).exp());
        let v = integrate(&f, &g).unwrap();
        assert!((v - 1.772_453_850_905_516).abs() < 1e-12);
    }

    #[test]
    fn integrate_examples() {
        let g = line(0.0, 1.0, 101);
        assert!((integrate(&sample(&g, |_| 1.0), &g).unwrap() - 1.0).abs() < 1e-14);

        let g = line(0.0, 1.0, 201);
        let s = sample(&g, |x| (PI * x).sin().powi(2));
        assert!((integrate(&s, &g).unwrap() - 0.5).abs() < 1e-10);

        // Simpson's error for a quartic is exactly (b − a) h⁴ f⁗ / 180
        let g = line(-1.0, 1.0, 11);
        let v = integrate(&sample(&g, |x| x.powi(4)), &g).unwrap();
        let h: f64 = 0.2;
        assert!((v - (0.4 + 2.0 * h.powi(4) * 24.0 / 180.0)).abs() < 1e-14);
    }

    #[test]
    fn integrate_rejects_misaligned_field() {
        let g = line(0.0, 1.0, 11);
        let f = RealField::zeros(10);
        assert_eq!(
            integrate(&f, &g),
            Err(KineticError::LengthMismatch { expected: 11, found: 10 })
        );
    }

    #[test]
    fn derivative_of_quadratic_is_exact() {
        let g = line(-1.0, 1.0, 21);
        let d = derivative(&sample(&g, |x| x * x), &g, 0).unwrap();
        for (x, v) in g.as_line().unwrap().points().iter().zip(d.iter()) {
            assert!((v - 2.0 * x).abs() < 1e-12, "x = {x}: {v}");
        }
    }

    #[test]
    fn stencils_are_exact_for_sextics() {
        let g = line(0.0, 2.0, 9);
        let f = sample(&g, |x| x.powi(6) - 3.0 * x.powi(5) + x.powi(2));
        let d = derivative(&f, &g, 0).unwrap();
        for (x, v) in g.as_line().unwrap().points().iter().zip(d.iter()) {
            let exact = 6.0 * x.powi(5) - 15.0 * x.powi(4) + 2.0 * x;
            assert!((v - exact).abs() < 1e-9, "x = {x}: {v} vs {exact}");
        }
    }

    #[test]
    fn derivative_of_sine_and_complex_exponential() {
        let g = line(-PI, PI, 201);
        let d = derivative(&sample(&g, f64::sin), &g, 0).unwrap();
        let xs = g.as_line().unwrap().points();
        let err = xs.iter().zip(d.iter()).map(|(x, v)| (v - x.cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");

        let z: ComplexField = xs.iter().map(|&x| Complex64::new(0.0, x).exp()).collect();
        let dz = derivative(&z, &g, 0).unwrap();
        let err = xs
            .iter()
            .zip(dz.iter())
            .map(|(&x, v)| (v - Complex64::i() * Complex64::new(0.0, x).exp()).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn derivative_rejects_short_grid() {
        let g = line(0.0, 1.0, 5);
        assert!(matches!(
            derivative(&RealField::zeros(5), &g, 0),
            Err(KineticError::GridTooShort { points: 5, required: 7 })
        ));
        let g7 = line(0.0, 1.0, 7);
        assert!(derivative(&RealField::zeros(7), &g7, 1).is_err());
    }

    #[test]
    fn stencil_order_is_six() {
        let err = |n: usize| {
            let g = line(-PI, PI, n);
            let d = derivative(&sample(&g, f64::sin), &g, 0).unwrap();
            g.as_line()
                .unwrap()
                .points()
                .iter()
                .zip(d.iter())
                .map(|(x, v)| (v - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(41), err(81), err(161));
        let order1 = (e1 / e2).log2();
        let order2 = (e2 / e3).log2();
        assert!(order1 >= 5.5 && order2 >= 5.5, "{order1} {order2}");
    }

    #[test]
    fn polar_derivatives_follow_axes() {
        let g: Grid = Grid2D::with_extent(2.0, 41, 121).unwrap().into();
        let p = g.as_polar().unwrap();
        let mut f = Vec::with_capacity(g.len());
        for &r in p.r().points() {
            for &t in p.theta().points() {
                f.push(r * r * t.cos());
            }
        }
        let dr = derivative_values(&f, &g, 0).unwrap();
        let dt = derivative_values(&f, &g, 1).unwrap();
        for (i, &r) in p.r().points().iter().enumerate() {
            for (j, &t) in p.theta().points().iter().enumerate() {
                let k = p.index(i, j);
                assert!((dr[k] - 2.0 * r * t.cos()).abs() < 1e-10);
                assert!((dt[k] + r * r * t.sin()).abs() < 1e-9);
            }
        }
        assert!(derivative_values(&f, &g, 2).is_err());
    }

    #[test]
    fn polar_weights_integrate_a_unit_ball_density() {
        // p = e^{-2r}/π integrates to 1 over all space.
        let g: Grid = Grid2D::with_extent(40.0, 4001, 401).unwrap().into();
        let p = g.as_polar().unwrap();
        let f: RealField = p
            .r()
            .points()
            .iter()
            .flat_map(|&r| std::iter::repeat_n((-2.0 * r).exp() / PI, p.theta().len()))
            .collect();
        assert!((integrate(&f, &g).unwrap() - 1.0).abs() < 1e-8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn simpson_exact_for_cubics(
                a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0,
                lo in -3.0f64..0.0, width in 0.5f64..4.0, half in 1usize..40,
            ) {
                let hi = lo + width;
                let g = line(lo, hi, 2 * half + 1);
                let f = sample(&g, |x| a + b * x + c * x * x + d * x * x * x);
                let anti = |x: f64| a * x + b * x * x / 2.0 + c * x.powi(3) / 3.0 + d * x.powi(4) / 4.0;
                let exact = anti(hi) - anti(lo);
                let v = integrate(&f, &g).unwrap();
                prop_assert!((v - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }

            #[test]
            fn derivative_integrates_to_zero(k in 1usize..4, shift in -1.0f64..1.0) {
                // bump vanishing with all derivatives at both ends
                let g = line(-6.0, 6.0, 1201);
                let f = sample(&g, |x| (-(x - shift).powi(2) * k as f64).exp());
                let d = derivative(&f, &g, 0).unwrap();
                prop_assert!(integrate(&d, &g).unwrap().abs() < 1e-9);
            }
        }
    }
}
