use std::f64::consts::PI;

use fisherlens_web::{curve, least, oracle};

#[test]
fn curve_layout() {
    let c = curve(1.0, 1.0, PI / 6.0, 0.0, 5.0, 11).unwrap();
    assert_eq!(c.len(), 33);
    assert_eq!(&c[..3], &[0.0, 0.25, 0.0]);
    assert_eq!(c[30], 5.0);
    assert!(curve(1.0, 1.0, 0.0, 0.0, 5.0, 1).is_err());
    assert!(curve(-1.0, 1.0, 0.0, 0.0, 5.0, 10).is_err());
}

#[test]
fn least_matches_closed_form() {
    let v = least(1.0, 1.0, PI / 6.0, 0.0).unwrap();
    assert!((v[0] - v[2]).abs() < 1e-6);
    assert!(least(1.0, 0.5, PI / 6.0, 0.0).unwrap()[2].is_nan());
}

#[test]
fn oracle_agrees() {
    let v = oracle(1.0, 0.5, PI / 8.0, 0.3, 1.5).unwrap();
    assert!((v[0] - v[1]).abs() < 1e-6);
}
