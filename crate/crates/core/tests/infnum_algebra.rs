use infppl::{InfError, InfNum};
use proptest::prelude::*;

/// Integer coefficients keep every sum and product exact, so the laws can be
/// checked with `==`.
fn int_num() -> impl Strategy<Value = InfNum> {
    (-50i32..=50, -4i32..=6).prop_map(|(c, n)| InfNum::new(c as f64, n))
}

fn real_num() -> impl Strategy<Value = InfNum> {
    (-1e3f64..1e3, -4i32..=6).prop_map(|(c, n)| InfNum::new(c, n))
}

/// Coefficients `k / 2⁸` with small `k`: products of two such values are exact.
fn dyadic_num() -> impl Strategy<Value = InfNum> {
    (-4096i32..=4096, -4i32..=6).prop_map(|(k, n)| InfNum::new(k as f64 / 256.0, n))
}

fn close(a: InfNum, b: InfNum) -> bool {
    let scale = a.coeff().abs().max(b.coeff().abs()).max(1.0);
    a.order() == b.order() && (a.coeff() - b.coeff()).abs() <= 1e-9 * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exact_laws_on_integer_coefficients(a in int_num(), b in int_num(), c in int_num()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
    }

    #[test]
    fn laws_on_real_coefficients(a in real_num(), b in real_num(), c in real_num()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert!(close((a + b) + c, a + (b + c)));
        prop_assert!(close((a * b) * c, a * (b * c)));
        let lhs = a * (b + c);
        let rhs = a * b + a * c;
        prop_assert_eq!(lhs.order(), rhs.order());
        // a·(b + c) may cancel, so compare against the size of the summands.
        let scale = (a.coeff() * b.coeff()).abs().max((a.coeff() * c.coeff()).abs()).max(1.0);
        prop_assert!((lhs.coeff() - rhs.coeff()).abs() <= 1e-12 * scale);
    }

    #[test]
    fn identities(a in real_num()) {
        prop_assert_eq!(a * InfNum::ONE, a);
        prop_assert_eq!(a + InfNum::new(0.0, a.order()), a);
    }

    #[test]
    fn division_undoes_multiplication(a in dyadic_num(), b in dyadic_num()) {
        prop_assume!(a.coeff() != 0.0);
        prop_assert_eq!((a * b).checked_div(a), Ok(b));
    }

    #[test]
    fn zero_coefficient_divisor_is_undefined(a in real_num(), n in -4i32..=6) {
        let zero = InfNum::new(0.0, n);
        prop_assert_eq!(a.checked_div(zero), Err(InfError::Undefined(zero)));
    }

    #[test]
    fn sum_keeps_lowest_order(a in real_num(), b in real_num()) {
        let s = a + b;
        prop_assert_eq!(s.order(), a.order().min(b.order()));
    }
}

#[test]
fn structural_zero_survives() {
    let f = InfNum::new(5.0, 2) + InfNum::new(0.0, 1);
    assert_eq!((f.coeff(), f.order()), (0.0, 1));
    let g = InfNum::new(5.0, 2);
    assert_ne!(f, g);
    assert_eq!(InfNum::new(0.0, 1) * InfNum::from_real(5.0), InfNum::new(0.0, 1));
}
