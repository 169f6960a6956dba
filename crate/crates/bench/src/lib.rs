//! Fixed states shared by the benchmarks.

use std::sync::Arc;

use kinsplit_core::dynamics::{gaussian_evolve, gaussian_grid, pib_evolve, pib_grid};
use kinsplit_core::hydrogenic::{grid_for, orbital, OrbitalSpec};
use kinsplit_core::{Grid, PibSuperposition, Wavefunction};

pub fn gaussian_state(t: f64) -> Wavefunction {
    let grid: Arc<Grid> = Arc::new(gaussian_grid().into());
    gaussian_evolve(t, &grid).expect("default grid holds the packet")
}

pub fn pib_state(t: f64) -> Wavefunction {
    let grid: Arc<Grid> = Arc::new(pib_grid().into());
    pib_evolve(&PibSuperposition::two_lowest(), t, &grid).expect("valid box state")
}

/// Orbital on a polar grid with `theta_points` polar nodes.
pub fn hydrogen_state(n: i64, l: i64, m: i64, theta_points: usize) -> Wavefunction {
    let spec = OrbitalSpec::new(n, l, m).expect("valid quantum numbers");
    let grid: Arc<Grid> = Arc::new(grid_for(spec.n(), theta_points).expect("valid grid").into());
    orbital(spec, &grid).expect("grid large enough")
}
