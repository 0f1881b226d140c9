use polar_morse::poly::{gcd, parse_poly, resultant, Poly};
use proptest::prelude::*;
use rug::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(p, q)| Rational::from((p, q)))
}

fn poly(arity: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    let exps = prop::array::uniform3(0..=max_deg).prop_map(move |mut e| {
        for v in e.iter_mut().skip(arity) {
            *v = 0;
        }
        e
    });
    prop::collection::vec((exps, rational()), 0..6).prop_map(move |t| Poly::from_terms(arity, t))
}

const XYZ: [&str; 3] = ["x", "y", "z"];

proptest! {
    #[test]
    fn distributive(p in poly(3, 3), q in poly(3, 3), r in poly(3, 3)) {
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
    }

    #[test]
    fn product_rule(p in poly(3, 3), q in poly(3, 3), var in 0usize..3) {
        let lhs = (&p * &q).differentiate(var);
        let rhs = &(&p * &q.differentiate(var)) + &(&q * &p.differentiate(var));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse_print_round_trip(p in poly(3, 4)) {
        let text = p.to_string_with(&XYZ);
        let back = parse_poly(&text, &XYZ).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string_with(&XYZ), text);
    }

    #[test]
    fn homogenized_is_homogeneous(p in poly(2, 4), pt in prop::array::uniform3(rational()), lambda in rational()) {
        let h = p.homogenize();
        prop_assume!(!h.is_zero());
        let d = h.total_degree().unwrap();
        let scaled: Vec<Rational> = pt.iter().map(|c| Rational::from(c * &lambda)).collect();
        let lhs = h.eval(&scaled);
        let mut rhs = h.eval(&pt);
        for _ in 0..d {
            rhs *= &lambda;
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn resultant_vanishes_with_common_factor(a in poly(2, 2), b in poly(2, 2), c in poly(2, 2)) {
        let p = &a * &c;
        let q = &b * &c;
        prop_assume!(p.involves(1) && q.involves(1));
        let r = resultant(&p, &q, 1).unwrap();
        let common = gcd(&p, &q).involves(1);
        prop_assert_eq!(r.is_zero(), common);
    }

    #[test]
    fn resultant_matches_gcd(p in poly(2, 3), q in poly(2, 3)) {
        prop_assume!(p.involves(1) && q.involves(1));
        let r = resultant(&p, &q, 1).unwrap();
        prop_assert_eq!(r.is_zero(), gcd(&p, &q).involves(1));
    }
}
