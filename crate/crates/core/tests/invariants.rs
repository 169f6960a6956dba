use std::f64::consts::PI;
use std::sync::Arc;

use kinsplit_core::dynamics::{
    cn_propagate, decomposition_timeseries, gaussian_evolve, gaussian_grid, pib_grid,
    pib_evolve, GAUSSIAN_DT, PIB_DT,
};
use kinsplit_core::functionals::{
    classical_integrand, deformed_kinetic, osmotic_term, quantum_kinetic_integrand, weizsacker_integrand,
};
use kinsplit_core::hydrogenic::{grid_for, orbital, radial_distributions, OrbitalSpec};
use kinsplit_core::qstate::{amplitude_gradient_sq, density, phase_gradient_sq, P_FLOOR_REL};
use kinsplit_core::quadgrid::derivative;
use kinsplit_core::{
    decompose, Complex64, ComplexField, GaussianPacket, Grid, Grid1D, PibSuperposition, RealField, System,
    Wavefunction,
};
use proptest::prelude::*;

fn line(g: Grid1D) -> Arc<Grid> {
    Arc::new(g.into())
}

fn spec(n: i64, l: i64, m: i64) -> OrbitalSpec {
    OrbitalSpec::new(n, l, m).unwrap()
}

fn n3_grid() -> Arc<Grid> {
    Arc::new(grid_for(3, 301).unwrap().into())
}

fn sample_states() -> Vec<Wavefunction> {
    let pg = line(pib_grid());
    let s = PibSuperposition::two_lowest();
    let gg = line(gaussian_grid());
    let hg = n3_grid();
    vec![
        pib_evolve(&s, 0.075, &pg).unwrap(),
        pib_evolve(&s, 0.0, &pg).unwrap(),
        gaussian_evolve(1.5, &gg).unwrap(),
        orbital(spec(3, 2, 1), &hg).unwrap(),
        orbital(spec(3, 1, 0), &hg).unwrap(),
    ]
}

#[test]
fn current_form_matches_phase_gradient() {
    for w in sample_states() {
        let p = density(&w);
        let floor = P_FLOOR_REL * p.iter().copied().fold(0.0, f64::max);
        let grad_s = phase_gradient_sq(&w).unwrap();
        let grid = w.grid();
        let mut current_sq = vec![0.0; p.len()];
        for axis in 0..grid.axes() {
            let d = derivative(w.psi(), grid, axis).unwrap();
            for k in 0..p.len() {
                let mut j = (w.psi()[k].conj() * d[k]).im;
                if let Some(g) = grid.as_polar().filter(|_| axis == 1) {
                    j /= g.r().points()[k / g.shape().1];
                }
                current_sq[k] += j * j;
            }
        }
        for k in 0..p.len() {
            if p[k] < floor {
                continue;
            }
            let azimuthal = match grid.as_polar() {
                Some(g) => {
                    let (nt, m) = (g.shape().1, w.azimuthal_m() as f64);
                    let (r, th) = (g.r().points()[k / nt], g.theta().points()[k % nt]);
                    m * m * p[k] / (r * r * th.sin().powi(2))
                }
                None => 0.0,
            };
            let lhs = p[k] * grad_s[k];
            let rhs = current_sq[k] / p[k] + azimuthal;
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1e-300), "node {k}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn fields_are_finite_and_nonnegative() {
    for w in sample_states() {
        for field in [
            phase_gradient_sq(&w).unwrap(),
            amplitude_gradient_sq(&w).unwrap(),
            classical_integrand(&w).unwrap(),
            weizsacker_integrand(&w).unwrap(),
            quantum_kinetic_integrand(&w).unwrap(),
        ] {
            assert!(field.iter().all(|v| v.is_finite()));
            assert!(field.iter().all(|&v| v >= -1e-14));
        }
    }
}

#[test]
fn identity_chain_and_lower_bounds() {
    for w in sample_states() {
        let r = decompose(&w).unwrap();
        let t_uc = deformed_kinetic(&w, &osmotic_term(&w).unwrap()).unwrap();
        let scale = r.kinetic;
        assert!((r.kinetic - r.fisher / 8.0 - t_uc).abs() <= 1e-9 * scale);
        assert!((t_uc - r.classical).abs() <= 1e-10 * scale);
        let bound = r.kinetic * (1.0 + 1e-12);
        assert!(r.classical <= bound && r.weizsacker <= bound);
        r.check().unwrap();
    }
}

#[test]
fn m_sign_symmetry() {
    let g = n3_grid();
    for (l, m) in [(1, 1), (2, 1), (2, 2)] {
        let a = decompose(&orbital(spec(3, l, m), &g).unwrap()).unwrap();
        let b = decompose(&orbital(spec(3, l, -m), &g).unwrap()).unwrap();
        assert!((a.classical - b.classical).abs() <= 1e-14);
        assert!((a.weizsacker - b.weizsacker).abs() <= 1e-14);
        let ra = radial_distributions(spec(3, l, m), &g).unwrap();
        let rb = radial_distributions(spec(3, l, -m), &g).unwrap();
        for (x, y) in ra.t_c.iter().zip(&rb.t_c).chain(ra.t_w.iter().zip(&rb.t_w)) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-12));
        }
    }
}

#[test]
fn monotone_trade_off_in_m() {
    let g = Arc::new(grid_for(4, 301).unwrap().into());
    let n = 4.0f64;
    let l = 3;
    let reports: Vec<_> = (0..=l)
        .map(|m| decompose(&orbital(spec(4, l, m), &g).unwrap()).unwrap())
        .collect();
    for pair in reports.windows(2) {
        assert!(pair[1].classical > pair[0].classical);
        assert!(pair[1].weizsacker < pair[0].weizsacker);
    }
    assert!(reports.iter().all(|r| r.weizsacker > 0.0));
    let last = reports.last().unwrap();
    assert!((last.classical - l as f64 / (2.0 * n.powi(3))).abs() <= 1e-7 * last.classical);
    assert!((last.weizsacker - (n - l as f64) / (2.0 * n.powi(3))).abs() <= 1e-7 * last.weizsacker);
    assert!((reports[0].weizsacker - 1.0 / (2.0 * n * n)).abs() <= 1e-7 * reports[0].weizsacker);
}

#[test]
fn orbitals_are_orthonormal() {
    let g = n3_grid();
    let a = orbital(spec(3, 1, 1), &g).unwrap();
    let b = orbital(spec(3, 2, 1), &g).unwrap();
    assert!(a.overlap(&b).unwrap().norm() <= 1e-8);
    assert!((a.norm_sq() - 1.0).abs() <= 1e-12);
}

#[test]
fn gaussian_exchange_law() {
    let g = line(gaussian_grid());
    let times = [0.0, 0.5, 1.5, 3.0, 10.0];
    let series = decomposition_timeseries(&System::Gaussian(GaussianPacket), &times, &g).unwrap();
    for (&t, r) in times.iter().zip(&series) {
        assert!((r.classical + r.weizsacker - 0.25).abs() <= 1e-8, "t={t}");
        assert!((r.classical * (1.0 + t * t) - t * t / 4.0).abs() <= 1e-8, "t={t}");
        let (tc, tw) = GaussianPacket::analytic_split(t);
        assert!((tc - r.classical).abs() <= 1e-8 && (tw - r.weizsacker).abs() <= 1e-8);
    }
}

#[test]
fn empty_time_list_gives_empty_series() {
    let g = line(gaussian_grid());
    assert!(decomposition_timeseries(&System::Gaussian(GaussianPacket), &[], &g)
        .unwrap()
        .is_empty());
}

#[test]
fn pib_is_periodic() {
    let g = line(pib_grid());
    let s = PibSuperposition::two_lowest();
    let period = s.beat_period();
    assert!((period - 4.0 / (3.0 * PI)).abs() <= 1e-15);
    for t in [0.02, 0.075, 0.15] {
        let a = decompose(&pib_evolve(&s, t, &g).unwrap()).unwrap();
        let b = decompose(&pib_evolve(&s, t + period, &g).unwrap()).unwrap();
        assert!((a.classical - b.classical).abs() <= 1e-8 * a.kinetic);
        assert!((a.weizsacker - b.weizsacker).abs() <= 1e-8 * a.kinetic);
    }
}

#[test]
fn propagator_agrees_at_every_figure_time() {
    let pg = line(pib_grid());
    let s = PibSuperposition::two_lowest();
    let v = RealField::zeros(pg.len());
    let mut w = pib_evolve(&s, 0.0, &pg).unwrap();
    for t in [0.075, 0.150] {
        w = cn_propagate(&w, &v, PIB_DT, 7_500).unwrap();
        assert!(w.l2_distance(&pib_evolve(&s, t, &pg).unwrap()).unwrap() <= 1e-6, "pib t={t}");
    }
    let gg = line(gaussian_grid());
    let v = RealField::zeros(gg.len());
    let mut w = gaussian_evolve(0.0, &gg).unwrap();
    for t in [1.5, 3.0] {
        w = cn_propagate(&w, &v, GAUSSIAN_DT, 1_500).unwrap();
        assert!(w.l2_distance(&gaussian_evolve(t, &gg).unwrap()).unwrap() <= 1e-6, "gaussian t={t}");
    }
}

fn box_state(coeffs: &[(f64, f64)]) -> Wavefunction {
    let g = line(Grid1D::new(0.0, 1.0, 801).unwrap());
    let xs = g.as_line().unwrap().points().to_vec();
    let psi: ComplexField = xs
        .iter()
        .map(|&x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(re, im))| Complex64::new(re, im) * ((k + 1) as f64 * PI * x).sin())
                .sum::<Complex64>()
        })
        .collect();
    Wavefunction::normalized(g, psi, 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn split_holds_for_random_box_states(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5)
            .prop_filter("nonzero", |c| c.iter().any(|&(a, b)| a.abs() + b.abs() > 0.1))
    ) {
        let w = box_state(&coeffs);
        let r = decompose(&w).unwrap();
        prop_assert!(r.split_defect() <= 1e-8 * r.kinetic);
        prop_assert!(r.classical >= 0.0 && r.weizsacker >= 0.0);
        let bound = r.kinetic * (1.0 + 1e-12);
        prop_assert!(r.classical <= bound && r.weizsacker <= bound);
    }

    #[test]
    fn global_phase_changes_nothing(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..4)
            .prop_filter("nonzero", |c| c.iter().any(|&(a, b)| a.abs() + b.abs() > 0.1)),
        alpha in 0.0f64..std::f64::consts::TAU,
    ) {
        let w = box_state(&coeffs);
        let v = w.with_global_phase(alpha);
        let max_diff = |a: RealField, b: RealField| {
            a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        prop_assert!(max_diff(density(&w), density(&v)) <= 1e-12);
        let a = decompose(&w).unwrap();
        let b = decompose(&v).unwrap();
        prop_assert!((a.classical - b.classical).abs() <= 1e-12 * a.kinetic);
        prop_assert!((a.weizsacker - b.weizsacker).abs() <= 1e-12 * a.kinetic);
    }
}
