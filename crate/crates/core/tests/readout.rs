mod common;

use chua_rc::circuit::ChuaParams;
use chua_rc::lwe::{generate_testcases, LweParams};
use chua_rc::reservoir::{
    nmse_case, run_case, train_readout, Accumulator, ReadoutOptions, ReservoirConfig, StateMatrix, DEFAULT_NMSE_CAP,
};

#[test]
fn accumulator_matches_dense_least_squares() {
    let x = [[1.0, 2.0], [0.5, -1.0], [3.0, 0.25]];
    let y = [1.5, -0.5, 2.0];
    let opts = ReadoutOptions {
        bias: false,
        ..Default::default()
    };
    let mut acc = Accumulator::new(2, 1, opts).unwrap();
    for (row, &t) in x.iter().zip(&y) {
        acc.add_case(&StateMatrix::from_rows(&[row.to_vec()]).unwrap(), &[t])
            .unwrap();
    }
    let w = acc.solve().unwrap();
    let want = common::lstsq_2col(&x, &y);
    assert_eq!(w.row(0)[0], 0.0);
    for (g, e) in w.row(0)[1..].iter().zip(want) {
        assert!((g - e).abs() < 1e-9, "{g} vs {e}");
    }
}

#[test]
fn bias_column_is_dense_oracle_with_ones() {
    // With the bias on, a single channel plus the constant is again a
    // two-column problem.
    let x = [[1.0, 0.2], [1.0, 1.1], [1.0, -0.7], [1.0, 2.5]];
    let y = [0.3, 1.0, -0.4, 2.2];
    let cases: Vec<_> = x
        .iter()
        .zip(&y)
        .map(|(r, &t)| (StateMatrix::from_rows(&[vec![r[1]]]).unwrap(), vec![t]))
        .collect();
    let w = train_readout(&cases, ReadoutOptions::default()).unwrap();
    let want = common::lstsq_2col(&x, &y);
    for (g, e) in w.row(0).iter().zip(want) {
        assert!((g - e).abs() < 1e-9, "{g} vs {e}");
    }
}

#[test]
fn single_lwe_case_is_interpolated() {
    let params = LweParams::default();
    let case = &generate_testcases(&params, 1, 17).unwrap()[0];
    let cfg = ReservoirConfig {
        value_max: (params.q - 1) as f64,
        ..Default::default()
    };
    let x = run_case(&case.message(), &cfg, &ChuaParams::default()).unwrap();
    let teacher = vec![case.u as f64, case.v as f64];
    let w = train_readout(&[(x.clone(), teacher.clone())], ReadoutOptions::default()).unwrap();
    let est = w.predict(&x).unwrap();
    let nmse = nmse_case(&est, &teacher, DEFAULT_NMSE_CAP).unwrap_or(0.0);
    assert!(nmse < 1e-6, "nmse {nmse}, estimate {est:?} vs {teacher:?}");
}
