use std::io::BufReader;

use lplab_core::corpus::{default_corpus, sample_family, TestFunctionSpec};
use lplab_core::io::{read_field, write_field};
use lplab_core::quadrature::QuadratureSpec;
use lplab_core::quasinorm::{evaluate, lp_band_quasinorm, Characterization, Scale, SpaceParams};
use lplab_core::{build_band_system, decompose, dyadic_dilate, lp_norm, GridSpec};

#[test]
fn field_files_round_trip_every_member() {
    for g in [GridSpec::new(1, 256, 1.0).unwrap(), GridSpec::new(2, 64, 2.0).unwrap()] {
        for e in default_corpus(&g).unwrap() {
            let f = sample_family(&e.spec, &g).unwrap();
            let mut bytes = Vec::new();
            write_field(&f, &mut bytes).unwrap();
            let back = read_field(BufReader::new(bytes.as_slice())).unwrap();
            assert_eq!(back, f, "{}", e.id);
        }
    }
}

#[test]
fn lp_quasinorm_of_one_band_is_its_lp_norm_times_weight() {
    let g = GridSpec::new(1, 512, 1.0).unwrap();
    let sys = build_band_system(&g, 1.0).unwrap();
    let f = sample_family(&TestFunctionSpec::RandomBand { j: 3, seed: 5 }, &g).unwrap();
    let decomp = decompose(&f, &sys, false).unwrap();
    let pr = SpaceParams::new(0.75, 2.0, 2.0, 1, Scale::B);
    let total = lp_band_quasinorm(&decomp, &pr).unwrap().value;
    let by_hand: f64 = decomp
        .bands()
        .iter()
        .map(|(j, b)| (2f64.powf(0.75 * *j as f64) * lp_norm(b, 2.0).unwrap()).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!((total / by_hand - 1.0).abs() < 1e-12, "{total} vs {by_hand}");
}

#[test]
fn besov_and_triebel_lizorkin_agree_when_p_equals_q() {
    let g = GridSpec::new(1, 512, 1.0).unwrap();
    let quad = QuadratureSpec::for_grid(&g);
    let f = sample_family(&TestFunctionSpec::RandomBand { j: 4, seed: 1 }, &g).unwrap();
    for c in [Characterization::Lp, Characterization::Diff] {
        let a = evaluate(&f, c, &SpaceParams::new(0.5, 2.0, 2.0, 1, Scale::F), &quad).unwrap().value;
        let b = evaluate(&f, c, &SpaceParams::new(0.5, 2.0, 2.0, 1, Scale::B), &quad).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-10, "{c}: {a} vs {b}");
    }
}

#[test]
fn dilation_round_trip_is_exact_for_band_limited_fields() {
    let g = GridSpec::new(2, 64, 1.0).unwrap();
    let f = sample_family(&TestFunctionSpec::RandomBand { j: 2, seed: 9 }, &g).unwrap();
    let up = dyadic_dilate(&f, 1).unwrap();
    let back = dyadic_dilate(&up, -1).unwrap();
    assert!(back.sub(&f).unwrap().max_abs() < 1e-12 * f.max_abs());
}

#[test]
fn unresolvable_energy_is_refused() {
    let g = GridSpec::new(1, 64, 1.0).unwrap();
    let sys = build_band_system(&g, 1.0).unwrap();
    // The Nyquist mode lies above the finest band.
    let f = lplab_core::SampledField::from_fn(g, |x| num_complex::Complex64::new((2.0 * std::f64::consts::PI * 32.0 * x[0]).cos(), 0.0));
    assert!(decompose(&f, &sys, false).is_err());
}
