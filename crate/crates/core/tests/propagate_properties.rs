use std::f64::consts::TAU;

use proptest::prelude::*;
use tpump::propagate::{
    choose_steps, evolve, inject, run_pump, Direction, EvolveOptions, FieldState, InjectionSite, NearestModel,
    PumpModel, RunOptions, ScheduledModel,
};
use tpump::spectral::{eig_hermitian, track_state};
use tpump::{Boundary, Frequency, LatticeSpec, PumpParams, PumpSchedule};

prop_compose! {
    fn small_lattice()(
        size_x in 2usize..7,
        size_y in 2usize..7,
        q in 2u64..5,
        tbar_x in 0.5..2.5f64,
        tbar_y in 0.5..2.5f64,
        lam_x in -1.0..1.0f64,
        lam_y in -1.0..1.0f64,
        periodic: bool,
    ) -> LatticeSpec {
        let b = Frequency::rational(1, q).unwrap();
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
        LatticeSpec { size_x, size_y, b_x: b, b_y: b, tbar_x, tbar_y, lam_x, lam_y, boundary }
    }
}

prop_compose! {
    fn schedule()(
        phases in prop::array::uniform4(0.0..TAU),
        z_total in 0.5..8.0f64,
    ) -> PumpSchedule {
        PumpSchedule {
            phi_x_start: phases[0],
            phi_x_end: phases[1],
            phi_y_start: phases[2],
            phi_y_end: phases[3],
            z_total,
            ..PumpSchedule::default()
        }
    }
}

fn site(spec: &LatticeSpec) -> impl Strategy<Value = InjectionSite> {
    (0..spec.size_x as i64, 0..spec.size_y as i64).prop_map(|(x, y)| InjectionSite::Explicit(x, y))
}

fn with_site() -> impl Strategy<Value = (LatticeSpec, InjectionSite)> {
    small_lattice().prop_flat_map(|spec| {
        let s = site(&spec);
        (Just(spec), s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_unitary((spec, at) in with_site(), sched in schedule()) {
        let model = NearestModel::new(spec.clone()).unwrap();
        let gen = ScheduledModel { model: &model, schedule: &sched, wavelength_nm: 1550.0 };
        let steps = choose_steps(&model, &sched, 1550.0).unwrap();
        let psi0 = inject(&spec, at).unwrap();
        let ev = evolve(&gen, &psi0, sched.z_total, steps, EvolveOptions { snapshot_every: Some(7), ..EvolveOptions::default() }).unwrap();
        prop_assert!(ev.max_norm_drift <= 1e-12);
        for snap in &ev.snapshots {
            prop_assert!((snap.state.norm() - 1.0).abs() <= 1e-12);
        }
        let total: f64 = ev.final_state.intensities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn reversed_run_returns_the_input((spec, at) in with_site(), sched in schedule()) {
        let model = NearestModel::new(spec.clone()).unwrap();
        let gen = ScheduledModel { model: &model, schedule: &sched, wavelength_nm: 1550.0 };
        let steps = choose_steps(&model, &sched, 1550.0).unwrap();
        let psi0 = inject(&spec, at).unwrap();
        let forward = evolve(&gen, &psi0, sched.z_total, steps, EvolveOptions::default()).unwrap();
        let back = EvolveOptions { direction: Direction::Backward, ..EvolveOptions::default() };
        let restored = evolve(&gen, &forward.final_state, sched.z_total, steps, back).unwrap();
        prop_assert!((restored.final_state.amplitudes() - psi0.amplitudes()).norm() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn frozen_y_keeps_bottom_injection_at_the_bottom(z_total in 1.0..40.0f64) {
        let model = NearestModel::new(LatticeSpec::default()).unwrap();
        let sched = PumpSchedule::scan(z_total, true, false);
        let r = run_pump(&model, &sched, InjectionSite::BottomCenter, &[1550.0], RunOptions::default()).unwrap();
        prop_assert!(r.metrics.weights.bottom > r.metrics.weights.top);
    }
}

/// Overlap between the evolved state and the adiabatically tracked
/// eigenstate that starts as eigenstate `start`.
fn tracking_fidelity(model: &NearestModel, start: usize, ramp_y: bool, z_total: f64) -> f64 {
    let sched = PumpSchedule::scan(z_total, true, ramp_y);
    let h0 = model.hamiltonian(sched.at(0.0), 1550.0).unwrap();
    let e0 = eig_hermitian(&h0).unwrap();
    let (nx, ny) = (h0.size_x(), h0.size_y());
    let psi0 = FieldState::new(e0.vectors.column(start).into_owned(), nx, ny).unwrap();
    let path: Vec<PumpParams> = (0..=2000).map(|k| sched.at(z_total * k as f64 / 2000.0)).collect();
    let tracked = track_state(|p| model.hamiltonian(p, 1550.0), &path, start).unwrap();
    let gen = ScheduledModel { model, schedule: &sched, wavelength_nm: 1550.0 };
    let steps = choose_steps(model, &sched, 1550.0).unwrap();
    let ev = evolve(&gen, &psi0, z_total, steps, EvolveOptions::default()).unwrap();
    ev.final_state.overlap(&tracked.final_vector)
}

#[test]
fn slower_pumping_follows_the_tracked_state() {
    let model = NearestModel::new(LatticeSpec::default()).unwrap();
    // in-gap states of the single-axis and the dual pump
    for (start, ramp_y) in [(82, false), (44, true)] {
        let f: Vec<f64> = [15.0, 50.0, 150.0].iter().map(|&z| tracking_fidelity(&model, start, ramp_y, z)).collect();
        assert!(f[2] > 0.999, "state {start}: {f:?}");
        assert!(f[2] >= f[0] && f[2] >= f[1], "state {start}: {f:?}");
    }
}
