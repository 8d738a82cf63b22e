use loopgrade::exact::*;
use loopgrade::Error;
use proptest::prelude::*;

const CONDUCTORS: [u32; 6] = [1, 3, 4, 5, 8, 12];

fn scalar(n: u32, raw: &[(i64, i64)]) -> Scalar {
    let poly: Vec<Rat> = raw.iter().map(|&(p, q)| rat(p, q)).collect();
    Scalar::from_poly(n, &poly)
}

fn raw() -> impl Strategy<Value = Vec<(i64, i64)>> {
    proptest::collection::vec((-6i64..=6, 1i64..=5), 1..8)
}

#[test]
fn scalar_examples() {
    let z4 = embed_root_of_unity(1, 4);
    assert_eq!(&z4 * &z4, Scalar::int(-1));
    let z3 = embed_root_of_unity(1, 3);
    assert_eq!(&z3 + &(&z3 * &z3), Scalar::int(-1));
    let a = &Scalar::one() + &embed_root_of_unity(1, 5);
    let inv = a.inv().unwrap();
    assert_eq!(&inv * &a, Scalar::one());
    // By hand: (1 + z)(-z - z^3) = -(z + z^2 + z^3 + z^4) = 1.
    assert_eq!(inv, -&(&embed_root_of_unity(1, 5) + &embed_root_of_unity(3, 5)));
    assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
    assert_eq!(z3.try_mul(&z4), Err(Error::ConductorMismatch(3, 4)));
    assert_eq!(z3.try_mul(&Scalar::from_rat(rat(2, 3))).unwrap(), z3.scale(&rat(2, 3)));
}

#[test]
fn root_of_unity_examples() {
    assert_eq!(embed_root_of_unity(0, 3), Scalar::one());
    assert_eq!(embed_root_of_unity(3, 3), Scalar::one());
    assert_eq!(embed_root_of_unity(2, 4), Scalar::int(-1));
}

#[test]
fn roots_of_unity_relations() {
    for n in 1..=12u32 {
        let z = embed_root_of_unity(1, n);
        assert_eq!(z.pow(n), Scalar::one(), "z^{n}");
        // Horner evaluation of Phi_n at z.
        let phi = cyclotomic_poly(n);
        let mut acc = Scalar::zero();
        for c in phi.iter().rev() {
            acc = &(&acc * &z) + &Scalar::from_rat(c.clone());
        }
        assert!(acc.is_zero(), "Phi_{n}(z) != 0");
        assert_eq!(z.coeffs().len(), euler_phi(n));
        for k in 1..n {
            assert_ne!(z.pow(k), Scalar::one(), "z_{n} has order {k}");
        }
    }
}

#[test]
fn laurent_examples() {
    let h = LaurentScalar::monomial(2, rat(1, 2), Scalar::one()).unwrap();
    assert_eq!(&h * &h, LaurentScalar::monomial(2, rint(1), Scalar::one()).unwrap());
    let one = LaurentScalar::constant(1, Scalar::one());
    let t = LaurentScalar::monomial(1, rint(1), Scalar::one()).unwrap();
    let sum = &(&one + &t) + &LaurentScalar::constant(1, Scalar::int(-1));
    assert_eq!(sum, t);
    assert_eq!(sum.terms().len(), 1);
    let a = LaurentScalar::monomial(3, rat(1, 3), embed_root_of_unity(1, 3)).unwrap();
    let b = LaurentScalar::monomial(3, rat(2, 3), embed_root_of_unity(2, 3)).unwrap();
    assert_eq!(&a * &b, LaurentScalar::monomial(3, rint(1), Scalar::one()).unwrap());
    assert!(matches!(LaurentScalar::monomial(2, rat(1, 3), Scalar::one()), Err(Error::BadExponent(..))));
    assert!(matches!(h.try_mul(&t), Err(Error::ConductorMismatch(..))));
}

#[test]
fn rational_parsing() {
    assert_eq!(parse_rat("-6/4").unwrap(), rat(-3, 2));
    assert_eq!(parse_rat(" 5 ").unwrap(), rint(5));
    assert!(parse_rat("1/0").is_err());
    assert!(parse_rat("0.5").is_err());
    assert_eq!(fmt_rat(&rat(4, -6)), "-2/3");
    assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
}

proptest! {
    #[test]
    fn field_axioms(ni in 0usize..6, a in raw(), b in raw(), c in raw()) {
        let n = CONDUCTORS[ni];
        let (a, b, c) = (scalar(n, &a), scalar(n, &b), scalar(n, &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &a), &Scalar::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            prop_assert_eq!((&b * &a).try_div(&a).unwrap(), b.clone());
        }
    }

    #[test]
    fn canonical_residue(ni in 0usize..6, a in raw(), shift in proptest::collection::vec(-3i64..=3, 1..4)) {
        // Adding a multiple of Phi_n does not change the element.
        let n = CONDUCTORS[ni];
        let phi = cyclotomic_poly(n);
        let base: Vec<Rat> = a.iter().map(|&(p, q)| rat(p, q)).collect();
        let mut poly = base.clone();
        for (k, m) in shift.iter().enumerate() {
            let need = k + phi.len();
            if poly.len() < need { poly.resize(need, rint(0)); }
            for (i, c) in phi.iter().enumerate() {
                poly[k + i] += c * rint(*m);
            }
        }
        let (x, y) = (Scalar::from_poly(n, &poly), Scalar::from_poly(n, &base));
        prop_assert_eq!(x.coeffs(), y.coeffs());
    }

    #[test]
    fn laurent_commutative_and_additive(n in 1u32..=4, e1 in -6i64..6, e2 in -6i64..6, a in raw(), b in raw()) {
        let (ea, eb) = (rat(e1, n as i64), rat(e2, n as i64));
        let ca = scalar(1, &a[..1]);
        let cb = scalar(1, &b[..1]);
        prop_assume!(!ca.is_zero() && !cb.is_zero());
        let x = LaurentScalar::monomial(n, ea.clone(), ca.clone()).unwrap();
        let y = LaurentScalar::monomial(n, eb.clone(), cb.clone()).unwrap();
        prop_assert_eq!(&x * &y, &y * &x);
        let p = &x * &y;
        prop_assert_eq!(p.terms().len(), 1);
        prop_assert_eq!(p.min_exponent().unwrap(), &(&ea + &eb));
        prop_assert_eq!(p.coeff(&(&ea + &eb)), &ca * &cb);
        let s = &(&x + &y) * &(&x + &y);
        prop_assert_eq!(s.at_one(), &(&ca + &cb) * &(&ca + &cb));
    }
}
