//! Public-API agreement between independent routes.

use std::f64::consts::PI;

use mirrorpath::kernels::{System, SystemSpec, TimeArgument, UnitSystem};
use mirrorpath::oracle::{grid_eigensolve, grid_propagator, GridHamiltonian};
use mirrorpath::specfun::SeriesPolicy;
use mirrorpath::spectral::{spectral_kernel, Grid};
use mirrorpath::susy::{ground_state, rosen_morse_spectrum, Superpotential};
use mirrorpath::trace::{extract_ground_energy, trace_curve, uniform_ladder};
use proptest::prelude::*;

#[test]
fn grid_propagator_tracks_closed_well_kernel() {
    let u = UnitSystem::natural_susy();
    let well = SystemSpec::new(System::InfiniteWell { width: PI }, u).unwrap();
    let p = grid_propagator(&GridHamiltonian::for_system(well, 0.0, 1500).unwrap(), 0.4, 60).unwrap();
    let t = TimeArgument::euclidean(0.4).unwrap();
    for (a, b) in [(0.5, 1.0), (1.6, 1.6), (2.8, 0.9)] {
        let exact = well.kernel(a, b, t, SeriesPolicy::default()).unwrap().re;
        assert!((p.at(a, b) - exact).abs() < 1e-4, "({a},{b})");
    }
}

#[test]
fn ground_energy_from_trace_ladder() {
    let sys = SystemSpec::new(System::Oscillator { omega: 0.8 }, UnitSystem::atomic()).unwrap();
    let curve = trace_curve(sys, &uniform_ladder(4.0, 2.0, 8).unwrap()).unwrap();
    let e = extract_ground_energy(&curve, 1e-3).unwrap();
    assert!((e.energy - 0.4).abs() < 1e-4, "{e:?}");
}

#[test]
fn rosen_morse_grid_matches_ladder_and_ground_state() {
    let b = 2.5;
    let h = GridHamiltonian::rosen_morse(b, 2000).unwrap();
    let s = grid_eigensolve(&h, 3).unwrap();
    let exact = rosen_morse_spectrum(b, 3).unwrap();
    for (g, e) in s.energies().iter().zip(exact.energies()) {
        assert!((g - e).abs() < 1e-3);
    }
    // grid ground state against the analytic one
    let psi0 = ground_state(Superpotential::rosen_morse(b).unwrap(), &h.grid()).unwrap();
    let states = s.eigenfunctions().unwrap();
    let overlap = h.grid().integrate(&psi0.iter().zip(&states.states[0]).map(|(a, b)| a * b).collect::<Vec<_>>());
    assert!((overlap.abs() - 1.0).abs() < 1e-5, "{overlap}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn well_kernel_symmetric_and_spectral(a in 0.05f64..3.09, b in 0.05f64..3.09, beta in 0.1f64..3.0) {
        let u = UnitSystem::natural_susy();
        let well = SystemSpec::new(System::InfiniteWell { width: PI }, u).unwrap();
        let t = TimeArgument::euclidean(beta).unwrap();
        let p = SeriesPolicy::default();
        let k = well.kernel(a, b, t, p).unwrap().re;
        prop_assert!((k - well.kernel(b, a, t, p).unwrap().re).abs() <= 1e-14 * k.abs().max(1.0));
        let s = spectral_kernel(well, a, b, t, 80).unwrap().value.re;
        prop_assert!((k - s).abs() < 1e-10);
    }

    #[test]
    fn trapezoid_exact_for_lines(lo in -5.0f64..0.0, hi in 0.1f64..5.0, m in -3.0f64..3.0) {
        let g = Grid::new(lo, hi, 11).unwrap();
        let got = g.integrate_fn(|x| m * x + 1.0);
        let want = 0.5 * m * (hi * hi - lo * lo) + (hi - lo);
        prop_assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
    }
}
