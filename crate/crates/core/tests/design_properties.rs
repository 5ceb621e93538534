use proptest::prelude::*;
use tpump::design::{
    build_layout, fit_coupling_law, solve_two_waveguide_unchecked, spacing_for_coupling, CouplingLaw, CouplingSamples,
    GridSpec, IndexProfile, LawRow, MIN_SPACING_UM,
};
use tpump::io::{read_law, write_law};
use tpump::model::hopping_amplitude;
use tpump::{Axis, Boundary, Frequency, LatticeSpec, PumpSchedule};

fn law_rows() -> impl Strategy<Value = Vec<LawRow>> {
    prop::collection::vec((1.0..5.0f64, 10.0..200.0f64, 0.05..0.5f64), 1..6).prop_map(|rows| {
        let mut wavelength = 1400.0;
        rows.into_iter()
            .map(|(step, a_per_cm, gamma_per_um)| {
                wavelength += step;
                LawRow {
                    wavelength_nm: wavelength,
                    a_per_cm,
                    gamma_per_um,
                }
            })
            .collect()
    })
}

prop_compose! {
    fn realizable()(
        size_x in 2usize..9,
        size_y in 2usize..9,
        p in 1i64..4,
        q in 2u64..6,
        tbar_x in 1.5..4.0f64,
        tbar_y in 1.5..4.0f64,
        frac_x in -0.9..0.9f64,
        frac_y in -0.9..0.9f64,
    ) -> LatticeSpec {
        let b = Frequency::rational(p, q).unwrap();
        LatticeSpec {
            size_x,
            size_y,
            b_x: b,
            b_y: b,
            tbar_x,
            tbar_y,
            lam_x: frac_x * tbar_x,
            lam_y: frac_y * tbar_y,
            boundary: Boundary::Open,
        }
    }
}

fn paper_law() -> CouplingLaw {
    CouplingLaw::constant(67.4, 0.176, 1550.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn law_csv_round_trip(rows in law_rows()) {
        let law = CouplingLaw::new(rows).unwrap();
        let mut buf = Vec::new();
        write_law(&mut buf, &law).unwrap();
        prop_assert_eq!(read_law(buf.as_slice()).unwrap(), law);
    }

    #[test]
    fn inverse_law_recovers_separation(a in 10.0..200.0f64, gamma in 0.05..0.5f64, s in 5.0..30.0f64) {
        let law = CouplingLaw::constant(a, gamma, 1550.0).unwrap();
        let t = law.coupling(1550.0, s, false).unwrap();
        prop_assert!((spacing_for_coupling(&law, 1550.0, t).unwrap() - s).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_exact_law(a in 10.0..200.0f64, gamma in 0.05..0.5f64, seps in prop::collection::btree_set(100u32..260, 3..8)) {
        let points: Vec<(f64, f64)> = seps.iter().map(|&s| {
            let s = s as f64 / 10.0;
            (s, a * (-gamma * s).exp())
        }).collect();
        let (law, diag) = fit_coupling_law(&[CouplingSamples { wavelength_nm: 1550.0, points: points.clone() }]).unwrap();
        prop_assert!(diag[0].r_squared > 1.0 - 1e-12);
        for (s, t) in points {
            prop_assert!((spacing_for_coupling(&law, 1550.0, t).unwrap() - s).abs() < 1e-8);
        }
    }

    #[test]
    fn layout_distances_reproduce_couplings(spec in realizable(), z_total in 1.0..20.0f64, ramp_x: bool, ramp_y: bool) {
        let schedule = PumpSchedule::scan(z_total, ramp_x, ramp_y);
        let law = paper_law();
        let layout = build_layout(&spec, &law, 1550.0, &schedule, 7, MIN_SPACING_UM).unwrap();
        let (nx, ny) = (spec.size_x, spec.size_y);
        for (zi, &z) in layout.z_samples().iter().enumerate() {
            let pos = layout.positions_at_sample(zi);
            let pump = schedule.at(z);
            prop_assert!(layout.min_distance_at(zi) >= MIN_SPACING_UM - 1e-9);
            for y in 0..ny {
                for x in 0..nx - 1 {
                    let (a, b) = (pos[y * nx + x], pos[y * nx + x + 1]);
                    let t = law.coupling(1550.0, (b.0 - a.0).hypot(b.1 - a.1), false).unwrap();
                    prop_assert!((t - hopping_amplitude(&spec, Axis::X, x as i64, pump.phi_x())).abs() < 1e-6);
                }
            }
            for y in 0..ny - 1 {
                for x in 0..nx {
                    let (a, b) = (pos[y * nx + x], pos[(y + 1) * nx + x]);
                    let t = law.coupling(1550.0, (b.0 - a.0).hypot(b.1 - a.1), false).unwrap();
                    prop_assert!((t - hopping_amplitude(&spec, Axis::Y, y as i64, pump.phi_y())).abs() < 1e-6);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn solver_coupling_decreases_with_separation(s in 10.0..22.0f64, gap in 0.5..2.0f64) {
        let profile = IndexProfile::default();
        let near = solve_two_waveguide_unchecked(&profile, s, 1550.0, GridSpec::default()).unwrap().coupling;
        let far = solve_two_waveguide_unchecked(&profile, s + gap, 1550.0, GridSpec::default()).unwrap().coupling;
        prop_assert!(far > 0.0);
        prop_assert!(near > far, "t({}) = {} vs t({}) = {}", s, near, s + gap, far);
    }
}
