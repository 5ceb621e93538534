use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use tpump::model::build_2d_direct_sum;
use tpump::spectral::{
    boundary_weights, classify_state, eig_hermitian, eigvals_hermitian, scan_bands, RegionOptions, ScanOptions, Side, StateClass,
};
use tpump::{Boundary, Frequency, LatticeSpec, PumpParams};

fn frequency() -> impl Strategy<Value = Frequency> {
    (1i64..6, 1u64..7).prop_map(|(p, q)| Frequency::rational(p, q).unwrap())
}

prop_compose! {
    fn lattice(max: usize, boundary: Boundary)(
        size_x in 2..=max,
        size_y in 2..=max,
        b_x in frequency(),
        b_y in frequency(),
        tbar_x in 0.5..3.0f64,
        tbar_y in 0.5..3.0f64,
        lam_x in -1.5..1.5f64,
        lam_y in -1.5..1.5f64,
    ) -> LatticeSpec {
        LatticeSpec { size_x, size_y, b_x, b_y, tbar_x, tbar_y, lam_x, lam_y, boundary }
    }
}

fn any_lattice(max: usize) -> impl Strategy<Value = LatticeSpec> {
    prop_oneof![lattice(max, Boundary::Open), lattice(max, Boundary::Periodic)]
}

fn pump() -> impl Strategy<Value = PumpParams> {
    (0.0..TAU, 0.0..TAU).prop_map(|(x, y)| PumpParams::new(x, y))
}

fn y_chain(spec: &LatticeSpec) -> LatticeSpec {
    LatticeSpec::chain(spec.size_y, spec.tbar_y, spec.lam_y, spec.b_y, spec.boundary)
}

fn x_chain(spec: &LatticeSpec) -> LatticeSpec {
    LatticeSpec::chain(spec.size_x, spec.tbar_x, spec.lam_x, spec.b_x, spec.boundary)
}

/// No region weight within `eps` of the threshold.
fn decisive(v: &[Complex64], spec: &LatticeSpec, eps: f64) -> bool {
    let opts = RegionOptions::default();
    let probs: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    let w = boundary_weights(&probs, spec.size_x, spec.size_y, opts.edge_depth, opts.corner_block);
    [w.left, w.right, w.bottom, w.top, w.bl, w.br, w.tl, w.tr]
        .iter()
        .all(|x| (x - opts.threshold).abs() > eps)
}

fn mirrored(class: StateClass) -> StateClass {
    match class {
        StateClass::Edge(Side::Left) => StateClass::Edge(Side::Right),
        StateClass::Edge(Side::Right) => StateClass::Edge(Side::Left),
        other => other,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigenvalue_count_is_dimension_at_every_sample(spec in any_lattice(6), path in prop::collection::vec(pump(), 1..8)) {
        let scan = scan_bands(|p| build_2d_direct_sum(&spec, p), &path, &ScanOptions::default()).unwrap();
        prop_assert_eq!(scan.num_samples(), path.len());
        for e in &scan.energies {
            prop_assert_eq!(e.len(), spec.size_x * spec.size_y);
            prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigenvectors_are_outer_products(spec in any_lattice(5), p in pump()) {
        let ex = eig_hermitian(&build_2d_direct_sum(&x_chain(&spec), PumpParams::new(p.phi_x(), 0.0)).unwrap()).unwrap();
        let ey = eig_hermitian(&build_2d_direct_sum(&y_chain(&spec), PumpParams::new(p.phi_y(), 0.0)).unwrap()).unwrap();
        let e2 = eig_hermitian(&build_2d_direct_sum(&spec, p).unwrap()).unwrap();
        let (nx, ny) = (spec.size_x, spec.size_y);
        for m in 0..nx {
            for n in 0..ny {
                let energy = ex.values[m] + ey.values[n];
                let product = DVector::<Complex64>::from_fn(nx * ny, |i, _| {
                    ex.vectors[(i % nx, m)] * ey.vectors[(i / nx, n)]
                });
                // weight inside the 2D eigenspace of the summed energy
                let weight: f64 = (0..nx * ny)
                    .filter(|&k| (e2.values[k] - energy).abs() < 1e-7)
                    .map(|k| e2.vectors.column(k).dotc(&product).norm_sqr())
                    .sum();
                prop_assert!(weight >= 1.0 - 1e-9, "pair ({}, {}) overlap {}", m, n, weight);
            }
        }
    }

    #[test]
    fn classification_ignores_global_phase(spec in any_lattice(8), p in pump(), theta in 0.0..TAU) {
        let eig = eig_hermitian(&build_2d_direct_sum(&spec, p).unwrap()).unwrap();
        let phase = Complex64::from_polar(1.0, theta);
        for k in 0..eig.dimension() {
            let v: Vec<Complex64> = eig.vectors.column(k).iter().copied().collect();
            let w: Vec<Complex64> = v.iter().map(|z| z * phase).collect();
            if !decisive(&v, &spec, 1e-9) {
                continue;
            }
            prop_assert_eq!(
                classify_state(&v, &spec, RegionOptions::default()).unwrap(),
                classify_state(&w, &spec, RegionOptions::default()).unwrap()
            );
        }
    }

    #[test]
    fn reflection_swaps_left_and_right(
        size in 6usize..16,
        b in frequency(),
        tbar in 0.5..3.0f64,
        lam in -1.5..1.5f64,
        phi in 0.0..TAU,
    ) {
        let chain = LatticeSpec::chain(size, tbar, lam, b, Boundary::Open);
        let reflected_phi = -phi - TAU * b.value() * (size as f64 - 2.0);
        let a = eig_hermitian(&build_2d_direct_sum(&chain, PumpParams::new(phi, 0.0)).unwrap()).unwrap();
        let r = eig_hermitian(&build_2d_direct_sum(&chain, PumpParams::new(reflected_phi, 0.0)).unwrap()).unwrap();
        for k in 0..size {
            prop_assert!((a.values[k] - r.values[k]).abs() < 1e-9);
            let isolated = (k == 0 || a.values[k] - a.values[k - 1] > 1e-6)
                && (k + 1 == size || a.values[k + 1] - a.values[k] > 1e-6);
            if !isolated {
                continue;
            }
            let v: Vec<Complex64> = a.vectors.column(k).iter().copied().collect();
            let w: Vec<Complex64> = r.vectors.column(k).iter().copied().collect();
            for x in 0..size {
                prop_assert!((v[x].norm_sqr() - w[size - 1 - x].norm_sqr()).abs() < 1e-8);
            }
            if !decisive(&v, &chain, 1e-7) {
                continue;
            }
            let opts = RegionOptions::default();
            prop_assert_eq!(
                mirrored(classify_state(&v, &chain, opts).unwrap()),
                classify_state(&w, &chain, opts).unwrap()
            );
        }
    }

    #[test]
    fn open_spectrum_is_even(spec in lattice(7, Boundary::Open), p in pump()) {
        let e = eigvals_hermitian(&build_2d_direct_sum(&spec, p).unwrap()).unwrap();
        let n = e.len();
        for k in 0..n {
            prop_assert!((e[k] + e[n - 1 - k]).abs() < 1e-9, "{} vs {}", e[k], e[n - 1 - k]);
        }
    }
}
