use stabreg_core::error::Error;
use stabreg_core::linalg::{numerical_rank, svd, Vector};
use stabreg_core::operators::{
    derivative_operator, first_derivative_operator, identity_operator,
    second_derivative_operator,
};

#[test]
fn identity_operator_is_identity() {
    let l = identity_operator(4).unwrap();
    assert_eq!((l.rows(), l.cols()), (4, 4));
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(l.get(i, j), if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn first_derivative_of_ramp_is_constant() {
    let l = first_derivative_operator(5).unwrap();
    assert_eq!((l.rows(), l.cols()), (4, 5));
    let v = Vector::from_vec(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
    let d = l.matvec(&v);
    assert_eq!(d.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
}

#[test]
fn second_derivative_of_affine_is_exactly_zero() {
    let l = second_derivative_operator(5).unwrap();
    assert_eq!((l.rows(), l.cols()), (3, 5));
    let v = Vector::from_vec(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(l.matvec(&v).as_slice(), &[0.0, 0.0, 0.0]);
}

#[test]
fn null_spaces_are_exact() {
    let n = 11;
    let ones = Vector::from_fn(n, |_| 1.0).unwrap();
    let ramp = Vector::from_fn(n, |i| 3.0 + 2.0 * i as f64).unwrap();
    let l1 = first_derivative_operator(n).unwrap();
    assert!(l1.matvec(&ones).iter().all(|&x| x == 0.0));
    let l2 = second_derivative_operator(n).unwrap();
    assert!(l2.matvec(&ones).iter().all(|&x| x == 0.0));
    assert!(l2.matvec(&ramp).iter().all(|&x| x == 0.0));
}

#[test]
fn derivative_operators_have_full_row_rank() {
    let n = 12;
    let l1 = first_derivative_operator(n).unwrap();
    assert_eq!(numerical_rank(&svd(&l1).unwrap(), None), n - 1);
    let l2 = second_derivative_operator(n).unwrap();
    assert_eq!(numerical_rank(&svd(&l2).unwrap(), None), n - 2);
}

#[test]
fn dispatcher_selects_by_order() {
    let l0 = derivative_operator(6, 0).unwrap();
    assert_eq!((l0.rows(), l0.cols()), (6, 6));
    let l1 = derivative_operator(6, 1).unwrap();
    assert_eq!((l1.rows(), l1.cols()), (5, 6));
    let l2 = derivative_operator(6, 2).unwrap();
    assert_eq!((l2.rows(), l2.cols()), (4, 6));
    assert!(matches!(
        derivative_operator(6, 3),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn size_preconditions_are_enforced() {
    assert!(matches!(
        first_derivative_operator(1),
        Err(Error::InvalidDimension(_))
    ));
    assert!(matches!(
        second_derivative_operator(2),
        Err(Error::InvalidDimension(_))
    ));
}
