use stabreg_core::error::Error;
use stabreg_core::linalg::{condition_number, numerical_rank, svd, DenseMatrix, Vector};
use stabreg_core::perturbation::{
    apply_noise, filtered_white_noise, smoothing_perturbation, white_noise, NoiseKind,
    NoiseSpec,
};
use stabreg_core::problems::{gravity, shaw, ShawParams};

#[test]
fn white_noise_with_zero_eta_is_identity() {
    let b = Vector::from_vec(vec![1.0, -2.0, 3.5]).unwrap();
    let bt = white_noise(&b, 0.0, 7).unwrap();
    assert_eq!(b.as_slice(), bt.as_slice());
}

#[test]
fn white_noise_is_deterministic_per_seed() {
    let b = Vector::zeros(100);
    let x = white_noise(&b, 1e-3, 42).unwrap();
    let y = white_noise(&b, 1e-3, 42).unwrap();
    assert_eq!(x.as_slice(), y.as_slice());
    let z = white_noise(&b, 1e-3, 43).unwrap();
    assert_ne!(x.as_slice(), z.as_slice());
}

#[test]
fn white_noise_has_the_requested_moments() {
    let n = 1000;
    let eta = 1e-3;
    let b = Vector::zeros(n);
    let bt = white_noise(&b, eta, 11).unwrap();
    let mean: f64 = bt.iter().sum::<f64>() / n as f64;
    assert!(mean.abs() < 4.0 * eta / (n as f64).sqrt(), "mean = {mean:e}");
    let var: f64 = bt.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    assert!((std - eta).abs() < 0.15 * eta, "std = {std:e}");
}

#[test]
fn filtered_noise_with_zero_eta_is_identity() {
    let a = DenseMatrix::identity(4);
    let b = Vector::from_vec(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let (at, bt) = filtered_white_noise(&a, &b, 0.0, 0.5, 3).unwrap();
    assert_eq!(at.as_array(), a.as_array());
    assert_eq!(bt.as_slice(), b.as_slice());
}

#[test]
fn filtered_noise_adds_one_value_per_row() {
    let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    let b = Vector::zeros(3);
    let (at, bt) = filtered_white_noise(&a, &b, 1e-2, 0.5, 9).unwrap();
    // recovering e_i by subtraction rounds differently per entry, so
    // compare within a few ulps rather than bitwise
    for i in 0..3 {
        let e_row0 = at.get(i, 0) - a.get(i, 0);
        let e_row1 = at.get(i, 1) - a.get(i, 1);
        assert!(
            (e_row0 - e_row1).abs() <= 1e-12 * e_row0.abs(),
            "row {i} must receive a constant shift"
        );
        assert!(
            (e_row0 - bt.get(i)).abs() <= 1e-12 * e_row0.abs(),
            "b receives the same e_i"
        );
    }
}

#[test]
fn filtered_noise_with_zero_coefficient_is_white() {
    let a = DenseMatrix::identity(50);
    let b = Vector::zeros(50);
    let (_, bt) = filtered_white_noise(&a, &b, 1e-3, 0.0, 21).unwrap();
    let w = white_noise(&b, 1e-3, 21).unwrap();
    assert_eq!(bt.as_slice(), w.as_slice());
}

#[test]
fn filtered_noise_has_the_requested_autocorrelation() {
    let n = 5000;
    let a = DenseMatrix::identity(n);
    let b = Vector::zeros(n);
    let (_, e) = filtered_white_noise(&a, &b, 1e-3, 0.5, 17).unwrap();
    let mean: f64 = e.iter().sum::<f64>() / n as f64;
    let num: f64 = (1..n)
        .map(|i| (e.get(i) - mean) * (e.get(i - 1) - mean))
        .sum();
    let den: f64 = e.iter().map(|&x| (x - mean) * (x - mean)).sum();
    let rho = num / den;
    assert!((rho - 0.5).abs() < 0.1, "lag-1 autocorrelation = {rho}");
}

#[test]
fn smoothing_with_zero_mu_is_identity() {
    let p = shaw(8, ShawParams::symmetric()).unwrap();
    let (at, bt) = smoothing_perturbation(&p.a, &p.b, 0.0).unwrap();
    assert_eq!(at.as_array(), p.a.as_array());
    assert_eq!(bt.as_slice(), p.b.as_slice());
}

#[test]
fn smoothing_applies_the_interior_stencil() {
    let a = DenseMatrix::identity(3);
    let b = Vector::from_vec(vec![1.0, 1.0, 1.0]).unwrap();
    let (at, bt) = smoothing_perturbation(&a, &b, 0.01).unwrap();
    assert_eq!(bt.as_slice(), &[1.0, 1.02, 1.0]);
    // only the single interior entry (1,1) changes; its four neighbours are 0
    assert_eq!(at.get(1, 1), 1.0);
    assert_eq!(at.get(0, 0), 1.0);
    assert_eq!(at.get(0, 1), 0.0);
    let c = DenseMatrix::from_rows(&[
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0],
    ])
    .unwrap();
    let (ct, _) = smoothing_perturbation(&c, &b, 0.01).unwrap();
    assert_eq!(ct.get(1, 1), 1.04);
    assert_eq!(ct.get(0, 1), 1.0);
}

#[test]
fn smoothing_reproduces_reference_spectrum_on_shaw1000() {
    let p = shaw(1000, ShawParams::symmetric()).unwrap();
    let (at, _) = smoothing_perturbation(&p.a, &p.b, 0.01).unwrap();
    let s = svd(&at).unwrap();
    let rank = numerical_rank(&s, None);
    assert!(rank.abs_diff(22) <= 1, "rank = {rank}");
    let cond = condition_number(&s);
    assert!(
        (cond.log10() - 2.1681e21f64.log10()).abs() < 1.0,
        "cond = {cond:e}"
    );
}

#[test]
fn smoothing_commutes_with_transposition_on_symmetric_matrices() {
    let p = gravity(12, 0.25, 0.0, 1.0).unwrap();
    let (at, _) = smoothing_perturbation(&p.a, &p.b, 0.01).unwrap();
    let (att, _) = smoothing_perturbation(&p.a.transpose(), &p.b, 0.01).unwrap();
    assert_eq!(at.transpose().as_array(), att.as_array());
}

#[test]
fn smoothing_rejects_small_systems() {
    let a = DenseMatrix::identity(2);
    let b = Vector::from_vec(vec![1.0, 2.0]).unwrap();
    assert!(matches!(
        smoothing_perturbation(&a, &b, 0.01),
        Err(Error::InvalidDimension(_))
    ));
}

#[test]
fn parameter_validation() {
    let b = Vector::zeros(4);
    assert!(matches!(
        white_noise(&b, -1.0, 0),
        Err(Error::InvalidParameter(_))
    ));
    let a = DenseMatrix::identity(4);
    assert!(matches!(
        filtered_white_noise(&a, &b, 1e-3, 1.5, 0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        filtered_white_noise(&a, &b, 1e-3, -0.1, 0),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn apply_noise_dispatches_by_kind() {
    let p = shaw(8, ShawParams::symmetric()).unwrap();
    let (a0, b0) = apply_noise(&NoiseSpec::none(), &p.a, &p.b).unwrap();
    assert_eq!(a0.as_array(), p.a.as_array());
    assert_eq!(b0.as_slice(), p.b.as_slice());

    let spec = NoiseSpec::white(1e-3, 5);
    let (aw, bw) = apply_noise(&spec, &p.a, &p.b).unwrap();
    assert_eq!(aw.as_array(), p.a.as_array(), "white noise leaves A alone");
    assert_eq!(
        bw.as_slice(),
        white_noise(&p.b, 1e-3, 5).unwrap().as_slice()
    );

    let spec = NoiseSpec::filtered_white(1e-3, 0.5, 5);
    assert_eq!(spec.kind, NoiseKind::FilteredWhite);
    let (af, _) = apply_noise(&spec, &p.a, &p.b).unwrap();
    assert_ne!(af.as_array(), p.a.as_array());

    let spec = NoiseSpec::smoothing(0.01);
    let (as_, bs) = apply_noise(&spec, &p.a, &p.b).unwrap();
    let (ar, br) = smoothing_perturbation(&p.a, &p.b, 0.01).unwrap();
    assert_eq!(as_.as_array(), ar.as_array());
    assert_eq!(bs.as_slice(), br.as_slice());
}
