use optomag_core::wgm::{
    characteristic, fsr, geometric_birefringence, peak_radius, radial_grid,
    resonance_size_parameter, resonance_size_parameter_in, Component, Orbit, Polarization,
    ScanWindow, SphereGeometry, WgmIndex, WgmMode,
};

fn desk() -> SphereGeometry {
    SphereGeometry::new(0.5e-3, 2.19).unwrap()
}

#[test]
fn finer_scan_finds_the_same_roots() {
    let g = desk();
    let fine = ScanWindow {
        step: 0.002,
        extent: 10.0,
    };
    for pol in [Polarization::Te, Polarization::Tm] {
        for l in [10, 50, 100, 200] {
            for q in 1..=3 {
                let coarse = resonance_size_parameter(&g, pol, l, q).unwrap();
                let dense = resonance_size_parameter_in(&g, pol, l, q, &fine).unwrap();
                assert!((coarse - dense).abs() < 1e-10 * coarse, "{pol} l={l} q={q}");
            }
        }
    }
}

#[test]
fn roots_satisfy_the_characteristic_equation() {
    let g = desk();
    for pol in [Polarization::Te, Polarization::Tm] {
        for l in [20, 100, 300] {
            let x = resonance_size_parameter(&g, pol, l, 1).unwrap();
            let h = 1e-6 * x;
            let slope = (characteristic(2.19, pol, l, x + h).unwrap()
                - characteristic(2.19, pol, l, x - h).unwrap())
                / (2.0 * h);
            let residual = characteristic(2.19, pol, l, x).unwrap();
            // the root is located to within 1e-12 relative
            assert!(
                residual.abs() <= 1e-12 * x * slope.abs(),
                "{pol} l={l}: {residual}"
            );
        }
    }
}

#[test]
fn birefringence_ratio_is_stable_in_m() {
    let g = desk();
    let ratio = |m: u32| {
        geometric_birefringence(&g, m, 1).unwrap() / fsr(&g, m, Polarization::Te, 1).unwrap()
    };
    let (a, b) = (ratio(100), ratio(200));
    assert!((a - b).abs() < 0.02, "{a} vs {b}");
    assert!((a - 0.9).abs() < 0.05);
}

#[test]
fn free_spectral_range_varies_slowly() {
    let g = desk();
    for m in [100, 150, 200] {
        let a = fsr(&g, m, Polarization::Te, 1).unwrap();
        let b = fsr(&g, m + 1, Polarization::Te, 1).unwrap();
        assert!((a / b - 1.0).abs() < 0.01, "m={m}: {a} {b}");
    }
}

#[test]
fn inner_component_peaks_inside_outer() {
    let g = desk();
    for l in [100, 200] {
        let index = WgmIndex::new(Orbit::Ccw, Polarization::Tm, l, 1).unwrap();
        let mode = WgmMode::solve(&g, index).unwrap();
        let grid = radial_grid(1.0, 4000);
        let inner = peak_radius(&mode.intensity_profile(Component::Inner, &grid).unwrap()).unwrap();
        let outer = peak_radius(&mode.intensity_profile(Component::Outer, &grid).unwrap()).unwrap();
        assert!(
            inner < outer && outer < 1.0,
            "l={l}: inner {inner}, outer {outer}"
        );
    }
}

#[test]
fn tangential_field_is_continuous_at_the_surface() {
    let g = desk();
    for l in [30, 120] {
        let te = WgmMode::solve(
            &g,
            WgmIndex::new(Orbit::Ccw, Polarization::Te, l, 1).unwrap(),
        )
        .unwrap();
        let a = te.te_profile(1.0 - 1e-9).unwrap();
        let b = te.te_profile(1.0 + 1e-9).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs(), "TE l={l}");
    }
}
