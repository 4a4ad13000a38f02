mod common;

use common::{
    backward_euler_heat, frozen_index_trajectory, indicator_moments, max_diff, nodal_max_diff,
};
use fracdiff::experiments::{presets, read_csv, temporal_study, to_csv_string};
use fracdiff::fem1d::{l2_norm, prolong};
use fracdiff::{
    solve, CoefficientLaw, Mesh, Nodal, Piecewise, Problem, SourceTerm, Table, TimeProfile,
};
use proptest::prelude::*;

fn table1_like(alpha: f64) -> Problem {
    Problem::new(
        alpha,
        1.0,
        CoefficientLaw::power(1.0, 1.01),
        Piecewise::characteristic(0.5, 1.0).unwrap(),
        SourceTerm::separable(
            TimeProfile::power(1.0, 0.1),
            Piecewise::characteristic(0.0, 0.5).unwrap(),
        ),
    )
    .unwrap()
}

#[test]
fn frozen_index_is_immaterial() {
    let (cells, steps) = (32, 40);
    for alpha in [0.3, 0.7] {
        let spec = table1_like(alpha);
        let run = solve(&spec, cells, steps).unwrap();
        for m in [Some(0), Some(steps / 2), Some(steps), None] {
            let literal = frozen_index_trajectory(&spec, cells, steps, m);
            for (n, w) in literal.iter().enumerate() {
                let diff = nodal_max_diff(run.state(n), w);
                assert!(diff <= 1e-11, "alpha {alpha} m {m:?} step {n}: {diff:e}");
            }
        }
    }
}

#[test]
fn superposition() {
    let (a, b) = (2.5, -1.5);
    let base = table1_like(0.4);
    let only_initial = base.with_source(SourceTerm::zero());
    let only_source = base.with_initial(Piecewise::zero());
    let combined = base
        .with_initial(base.initial().scaled(a))
        .with_source(base.source().scaled(b));
    let r1 = solve(&only_initial, 64, 50).unwrap();
    let r2 = solve(&only_source, 64, 50).unwrap();
    let rc = solve(&combined, 64, 50).unwrap();
    for n in 0..=50 {
        let mut expected = r1.state(n).scaled(a);
        expected.axpy(b, r2.state(n));
        let diff = rc.state(n).sub(&expected).max_abs();
        assert!(diff <= 1e-11, "step {n}: {diff:e}");
    }
}

#[test]
fn symmetric_data_stay_symmetric() {
    let spec = Problem::new(
        0.6,
        1.0,
        CoefficientLaw::power(2.0, 1.5),
        Piecewise::characteristic(0.3, 0.7).unwrap(),
        SourceTerm::separable(
            TimeProfile::power(1.0, 0.5),
            Piecewise::characteristic(0.25, 0.75).unwrap(),
        ),
    )
    .unwrap();
    for cells in [20, 64, 101] {
        let run = solve(&spec, cells, 60).unwrap();
        for w in run.trajectory() {
            let v = w.values();
            let mirrored: Vec<f64> = v.iter().rev().copied().collect();
            assert!(max_diff(v, &mirrored) <= 1e-12, "cells {cells}");
        }
    }
}

#[test]
fn alpha_one_is_backward_euler() {
    let (cells, steps, kappa) = (64, 100, 0.7);
    let spec = Problem::new(
        1.0,
        1.0,
        CoefficientLaw::constant(kappa),
        Piecewise::characteristic(0.5, 1.0).unwrap(),
        SourceTerm::separable(
            TimeProfile::power(1.0, 0.1),
            Piecewise::characteristic(0.0, 0.5).unwrap(),
        ),
    )
    .unwrap();
    let run = solve(&spec, cells, steps).unwrap();
    let reference = backward_euler_heat(
        cells,
        kappa,
        1.0 / steps as f64,
        steps,
        &indicator_moments(cells, 0.5, 1.0),
        &indicator_moments(cells, 0.0, 0.5),
        |t: f64| t.powf(0.1),
    );
    for (n, w) in reference.iter().enumerate() {
        let diff = nodal_max_diff(run.state(n), w);
        assert!(diff <= 1e-12, "step {n}: {diff:e}");
    }
}

#[test]
fn reruns_are_bitwise_identical() {
    let spec = table1_like(0.3);
    let a = solve(&spec, 48, 30).unwrap();
    let b = solve(&spec, 48, 30).unwrap();
    for (x, y) in a.trajectory().iter().zip(b.trajectory()) {
        let xb: Vec<u64> = x.values().iter().map(|v| v.to_bits()).collect();
        let yb: Vec<u64> = y.values().iter().map(|v| v.to_bits()).collect();
        assert_eq!(xb, yb);
    }
    let taus = presets::reciprocals(&[10, 20, 40, 80]);
    let s1 = to_csv_string(&[temporal_study(&spec, 32, &taus, "det").unwrap()]).unwrap();
    let s2 = to_csv_string(&[temporal_study(&spec, 32, &taus, "det").unwrap()]).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn csv_round_trip() {
    let spec = table1_like(0.7);
    let taus = presets::reciprocals(&[10, 20, 40]);
    let t1 = temporal_study(&spec, 16, &taus, "first").unwrap();
    let t2 = Table::from_errors(
        "second",
        fracdiff::Axis::Spatial,
        vec![0.5, 0.25],
        vec![0.0, 0.0],
    )
    .unwrap();
    let text = to_csv_string(&[t1.clone(), t2.clone()]).unwrap();
    let back: Vec<Table> = read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0], t1);
    assert_eq!(back[1].errors, t2.errors);
    assert!(back[1].rates[0].is_nan());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn prolongation_preserves_norm(
        values in prop::collection::vec(-1e3f64..1e3, 1..300)
    ) {
        let cells = values.len() + 1;
        let coarse = Mesh::new(cells).unwrap();
        let fine = coarse.refined();
        let v = Nodal::from_values(&coarse, values).unwrap();
        let p = prolong(&v, &fine).unwrap();
        let (a, b) = (l2_norm(&coarse, &v), l2_norm(&fine, &p));
        prop_assert!((a - b).abs() <= 1e-13 * a.max(f64::MIN_POSITIVE), "{} vs {}", a, b);
    }
}
