use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::spectral::random::{random_field, random_solenoidal, Envelope};
use crate::spectral::{l2_norm_sq, lp_norm, relative_divergence, Field, Grid, Rep};

fn nse(nu: f64) -> Constants {
    Constants {
        nu,
        ..Constants::default()
    }
}

fn max_err(a: &Field, b: &Field) -> f64 {
    lp_norm(&a.sub(b).unwrap(), f64::INFINITY).unwrap()
}

#[test]
fn zero_state_has_zero_tendency_and_stays_zero() {
    for system in System::ALL {
        let grid = Grid::new(system.dim(), 16).unwrap();
        let comps = if system.is_scalar() { 1 } else { system.dim() };
        let b = system
            .has_magnetic()
            .then(|| Field::zeros(&grid, 3, Rep::Spectral));
        let c = Constants {
            nu: 0.1,
            mu: 0.1,
            kappa: 0.1,
            alpha: 0.5,
        };
        let s = SolverState::new(system, c, 0.0, Field::zeros(&grid, comps, Rep::Spectral), b).unwrap();
        let r = rhs(&s).unwrap();
        assert_eq!(l2_norm_sq(&r.primary), 0.0);
        let s1 = step(&s, 0.01).unwrap();
        assert_eq!(l2_norm_sq(&s1.primary), 0.0);
        assert!((s1.t - 0.01).abs() < 1e-15);
    }
}

#[test]
fn sqg_cosine_tendency_is_pure_dissipation() {
    let grid = Grid::new(2, 16).unwrap();
    let theta = Field::scalar_fn(&grid, |x| x[0].cos());
    let c = Constants {
        kappa: 0.7,
        alpha: 0.3,
        ..Constants::default()
    };
    let s = SolverState::new(System::Sqg, c, 0.0, theta.clone(), None).unwrap();
    let r = rhs(&s).unwrap();
    assert!(max_err(&r.primary, &theta.scale(-0.7)) < 1e-13);
}

#[test]
fn mhd_with_b_equal_u_is_pure_diffusion() {
    let grid = Grid::new(3, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_solenoidal(&grid, &Envelope::WHITE, &mut rng);
    let c = Constants {
        nu: 0.2,
        mu: 0.05,
        ..Constants::default()
    };
    let s = SolverState::new(System::Mhd, c, 0.0, u.clone(), Some(u.clone())).unwrap();
    let r = rhs(&s).unwrap();
    let k2 = crate::spectral::ops::fractional_symbol(&grid, 2.0);
    let lap = u.apply_multiplier(&k2).scale(-1.0);
    assert!(max_err(&r.primary, &lap.scale(0.2)) < 1e-12);
    assert!(max_err(r.magnetic.as_ref().unwrap(), &lap.scale(0.05)) < 1e-12);
}

#[test]
fn taylor_green_2d_decays_exactly() {
    let grid = Grid::new(2, 16).unwrap();
    let s0 = InitialCondition::TaylorGreen.build(System::Nse2d, &grid, nse(0.1)).unwrap();
    let mut it = Integrator::new(&s0);
    let mut s = s0.clone();
    for _ in 0..100 {
        s = it.step(&s, 1e-3).unwrap();
    }
    let exact = s0.primary.scale((-2.0 * 0.1 * s.t).exp());
    assert!(max_err(&s.primary, &exact) < 1e-12);
}

#[test]
fn single_mode_decays_at_its_own_rate() {
    let grid = Grid::new(3, 16).unwrap();
    let ic = InitialCondition::SingleMode {
        k: [1, 2, 0],
        amplitude: 2.0,
    };
    let s0 = ic.build(System::Nse3d, &grid, nse(0.05)).unwrap();
    let mut s = s0.clone();
    let mut it = Integrator::new(&s0);
    for _ in 0..20 {
        s = it.step(&s, 5e-3).unwrap();
    }
    let exact = s0.primary.scale((-0.05 * 5.0 * s.t).exp());
    assert!(max_err(&s.primary, &exact) < 1e-12);
    assert!(InitialCondition::SingleMode {
        k: [6, 0, 0],
        amplitude: 1.0
    }
    .build(System::Nse3d, &grid, nse(0.05))
    .is_err());
}

#[test]
fn sqg_single_mode_norm_decay() {
    let grid = Grid::new(2, 16).unwrap();
    let ic = InitialCondition::SingleMode {
        k: [1, 0, 0],
        amplitude: 1.0,
    };
    let c = Constants {
        kappa: 1.0,
        alpha: 0.5,
        ..Constants::default()
    };
    let s0 = ic.build(System::Sqg, &grid, c).unwrap();
    let mut s = s0.clone();
    let mut it = Integrator::new(&s0);
    for _ in 0..100 {
        s = it.step(&s, 1e-2).unwrap();
    }
    let ratio = (l2_norm_sq(&s.primary) / l2_norm_sq(&s0.primary)).sqrt();
    assert!((ratio - (-1.0f64).exp()).abs() < 1e-8);
}

#[test]
fn sqg_mean_is_preserved() {
    let grid = Grid::new(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let theta = random_field(&grid, 1, &Envelope::WHITE, &mut rng);
    let theta = theta.add(&Field::scalar_fn(&grid, |_| 0.3)).unwrap();
    let c = Constants {
        kappa: 0.1,
        alpha: 0.5,
        ..Constants::default()
    };
    let mut s = SolverState::new(System::Sqg, c, 0.0, theta, None).unwrap();
    let m0 = s.primary.mean()[0];
    let mut it = Integrator::new(&s);
    for _ in 0..20 {
        s = it.step(&s, 2e-3).unwrap();
    }
    assert!((s.primary.mean()[0] - m0).abs() < 1e-12);
}

#[test]
fn magnetic_systems_stay_solenoidal_and_hall_power_vanishes() {
    let grid = Grid::new(3, 16).unwrap();
    for system in [System::Mhd, System::HallMhd] {
        let ic = InitialCondition::RandomSpectrum {
            slope: 1.0,
            k_peak: 2.0,
            seed: 17,
            amplitude: 0.3,
        };
        let c = Constants {
            nu: 0.1,
            mu: 0.1,
            ..Constants::default()
        };
        let mut s = ic.build(system, &grid, c).unwrap();
        let mut it = Integrator::new(&s);
        for _ in 0..10 {
            s = it.step(&s, 1e-3).unwrap();
            assert!(relative_divergence(&s.primary).unwrap() < DIVERGENCE_TOL);
            assert!(relative_divergence(s.magnetic().unwrap()).unwrap() < DIVERGENCE_TOL);
        }
        if system == System::HallMhd {
            let p = hall_power(&s).unwrap().unwrap();
            let scale = l2_norm_sq(s.magnetic().unwrap());
            assert!(p.abs() < 1e-12 * scale.max(1.0), "{p}");
        } else {
            assert_eq!(hall_power(&s).unwrap(), None);
        }
    }
}

#[test]
fn energy_budget_closes_for_taylor_green() {
    let grid = Grid::new(2, 16).unwrap();
    let mut s = InitialCondition::TaylorGreen.build(System::Nse2d, &grid, nse(0.1)).unwrap();
    let mut hist = vec![EnergySample::of(&s)];
    let mut it = Integrator::new(&s);
    for _ in 0..200 {
        s = it.step(&s, 5e-3).unwrap();
        hist.push(EnergySample::of(&s));
    }
    let rep = energy_budget(&hist);
    assert!(rep.max_relative_residual() < 1e-6);
    assert!(rep.max_relative_increase() < 0.0);
}

#[test]
fn inviscid_energy_is_conserved() {
    let grid = Grid::new(2, 32).unwrap();
    let ic = InitialCondition::RandomSpectrum {
        slope: 1.0,
        k_peak: 3.0,
        seed: 2,
        amplitude: 1.0,
    };
    let mut s = ic.build(System::Nse2d, &grid, nse(0.0)).unwrap();
    let mut hist = vec![EnergySample::of(&s)];
    let mut it = Integrator::new(&s);
    for _ in 0..50 {
        s = it.step(&s, 2e-3).unwrap();
        hist.push(EnergySample::of(&s));
    }
    assert!(energy_budget(&hist).max_relative_drift() < 1e-8);
}

#[test]
fn stepping_is_deterministic() {
    let grid = Grid::new(3, 16).unwrap();
    let ic = InitialCondition::RandomSpectrum {
        slope: 0.0,
        k_peak: 3.0,
        seed: 99,
        amplitude: 1.0,
    };
    let run = || {
        let mut s = ic.build(System::Nse3d, &grid, nse(0.05)).unwrap();
        for _ in 0..3 {
            s = step(&s, 1e-3).unwrap();
        }
        s.physical_components()
    };
    assert_eq!(run(), run());
}

#[test]
fn blow_up_is_reported_with_time() {
    let grid = Grid::new(2, 16).unwrap();
    let u = Field::vector_fn(&grid, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
    let mut s = SolverState::new(System::Nse2d, nse(0.1), 0.5, u, None).unwrap();
    s.primary = s.primary.scale(f64::NAN);
    match step(&s, 1e-3) {
        Err(crate::Error::NonFinite { field, t }) => {
            assert_eq!(field, "u");
            assert_eq!(t, 0.5);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn state_validation() {
    let g2 = Grid::new(2, 16).unwrap();
    let g3 = Grid::new(3, 16).unwrap();
    let compressible = Field::vector_fn(&g2, |x| [x[0].sin(), 0.0, 0.0]);
    assert!(SolverState::new(System::Nse2d, nse(0.1), 0.0, compressible, None).is_err());
    let u3 = Field::zeros(&g3, 3, Rep::Spectral);
    assert!(SolverState::new(System::Nse2d, nse(0.1), 0.0, u3.clone(), None).is_err());
    assert!(SolverState::new(System::Mhd, nse(0.1), 0.0, u3.clone(), None).is_err());
    assert!(SolverState::new(System::Nse3d, nse(-1.0), 0.0, u3, None).is_err());
    let theta = Field::zeros(&g2, 1, Rep::Spectral);
    let bad_alpha = Constants {
        alpha: 1.0,
        ..Constants::default()
    };
    assert!(SolverState::new(System::Sqg, bad_alpha, 0.0, theta, None).is_err());
}

#[test]
fn physical_components_round_trip() {
    let grid = Grid::new(3, 8).unwrap();
    let s = InitialCondition::TaylorGreen.build(System::HallMhd, &grid, nse(0.1)).unwrap();
    let comps = s.physical_components();
    assert_eq!(comps.len(), 6);
    let back = SolverState::from_physical_components(System::HallMhd, s.constants, &grid, 0.0, comps.clone()).unwrap();
    let again = back.physical_components();
    for (a, b) in comps.iter().zip(&again) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
