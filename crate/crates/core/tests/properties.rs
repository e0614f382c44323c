//! Property tests: structural round-trips and algebraic laws that must hold
//! for arbitrary inputs, not just the pinned grids.

use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use apostol::arith::{divisors, factorize, gcd};
use apostol::exact::{format_rat, parse_rat, Rat};
use apostol::func::{parse_expr, ArithFn};
use apostol::sums::{gen_aa, SumSpec};

// ---------------------------------------------------------------------------
// strategies
// ---------------------------------------------------------------------------

/// Leaves of the expression grammar. `log` is included: round-trips are
/// structural, not numeric.
fn leaf() -> impl Strategy<Value = ArithFn> {
    prop_oneof![
        Just(ArithFn::one()),
        Just(ArithFn::id()),
        (2u32..=6).prop_map(ArithFn::id_power),
        (-4i64..=4).prop_map(ArithFn::power),
        Just(ArithFn::mobius()),
        Just(ArithFn::euler_phi()),
        (-2i64..=3).prop_filter("order 0 is constant", |&m| m != 0).prop_map(ArithFn::jordan),
        Just(ArithFn::log()),
        Just(ArithFn::big_omega()),
    ]
}

fn expr() -> impl Strategy<Value = ArithFn> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| ArithFn::dirichlet(&a, &b)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| ArithFn::pointwise(&a, &b)),
            ((-9i64..=9).prop_filter("zero scale collapses", |&p| p != 0), 1i64..=9, inner)
                .prop_map(|(p, q, f)| {
                    ArithFn::scale(Rat::new(BigInt::from(p), BigInt::from(q)), &f)
                }),
        ]
    })
}

/// Exact-valued leaves only, for numeric laws compared with exact equality.
fn exact_leaf() -> impl Strategy<Value = ArithFn> {
    prop_oneof![
        Just(ArithFn::one()),
        Just(ArithFn::id()),
        (2u32..=4).prop_map(ArithFn::id_power),
        Just(ArithFn::mobius()),
        Just(ArithFn::euler_phi()),
        (1i64..=2).prop_map(ArithFn::jordan),
    ]
}

// ---------------------------------------------------------------------------
// properties
// ---------------------------------------------------------------------------

proptest! {
    /// Printing an expression and parsing the result reproduces the tree.
    #[test]
    fn expression_print_parse_round_trip(e in expr()) {
        let printed = e.to_string();
        let reparsed = parse_expr(&printed)
            .unwrap_or_else(|err| panic!("`{printed}` failed to re-parse: {err}"));
        prop_assert_eq!(&reparsed, &e, "printed form: {}", printed);
        // printing is a fixed point
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    /// Every rational printed as p/q re-parses to the identical value.
    #[test]
    fn rational_print_parse_round_trip(p in any::<i64>(), q in any::<i64>().prop_filter("nonzero", |&q| q != 0)) {
        let r = Rat::new(BigInt::from(p), BigInt::from(q));
        prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }

    /// Dirichlet convolution is commutative on evaluations.
    #[test]
    fn dirichlet_commutes(f in exact_leaf(), g in exact_leaf(), n in 1u64..=200) {
        let fg = ArithFn::dirichlet(&f, &g);
        let gf = ArithFn::dirichlet(&g, &f);
        prop_assert_eq!(fg.eval_exact(n).unwrap(), gf.eval_exact(n).unwrap());
    }

    /// Dirichlet convolution is associative on evaluations.
    #[test]
    fn dirichlet_associates(
        f in exact_leaf(),
        g in exact_leaf(),
        h in exact_leaf(),
        n in 1u64..=200,
    ) {
        let left = ArithFn::dirichlet(&ArithFn::dirichlet(&f, &g), &h);
        let right = ArithFn::dirichlet(&f, &ArithFn::dirichlet(&g, &h));
        prop_assert_eq!(left.eval_exact(n).unwrap(), right.eval_exact(n).unwrap());
    }

    /// The identity element of Dirichlet convolution: f * (mu * one) = f at 1
    /// ... more usefully, (mu * one)(n) = [n = 1] makes it the unit.
    #[test]
    fn dirichlet_unit(f in exact_leaf(), n in 1u64..=200) {
        let unit = ArithFn::dirichlet(&ArithFn::mobius(), &ArithFn::one());
        let conv = ArithFn::dirichlet(&f, &unit);
        prop_assert_eq!(conv.eval_exact(n).unwrap(), f.eval_exact(n).unwrap());
    }

    /// Factorization reconstructs its input from prime powers.
    #[test]
    fn factorization_reconstructs(n in 1u64..=1_000_000) {
        let fac = factorize(n).unwrap();
        let mut prod = 1u64;
        for &(p, e) in fac.factors() {
            // trial check: p has no divisor in 2..p
            prop_assert!(p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0));
            prod *= p.pow(e);
        }
        prop_assert_eq!(prod, n);
        prop_assert_eq!(fac.value(), n);
    }

    /// The divisor list is sorted, complete, and closed under n/d.
    #[test]
    fn divisor_list_sound(n in 1u64..=100_000) {
        let divs = divisors(n).unwrap();
        prop_assert!(divs.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(divs.iter().all(|&d| n % d == 0));
        prop_assert!(divs.iter().all(|&d| divs.binary_search(&(n / d)).is_ok()));
        prop_assert_eq!(divs.len() as u64, factorize(n).unwrap().num_divisors());
    }

    /// The generalized divisor sum is periodic mod k^a in its second argument.
    #[test]
    fn gen_sum_is_periodic(
        k in 1u64..=30,
        a in 1u32..=2,
        j in 0u64..=2_000,
        lap in 1u64..=3,
    ) {
        let spec = SumSpec::new(
            a,
            ArithFn::euler_phi(),
            ArithFn::one(),
            ArithFn::one(),
            k,
        ).unwrap();
        let ka = (k as u128).pow(a) as u64;
        let lhs = gen_aa(&spec, j).unwrap();
        let rhs = gen_aa(&spec, j + lap * ka).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// gcd is actually the greatest common divisor.
    #[test]
    fn gcd_divides_and_dominates(x in 1u64..=1_000_000, y in 1u64..=1_000_000) {
        let g = gcd(x, y);
        prop_assert!(x % g == 0 && y % g == 0);
        // any common divisor divides g
        for d in divisors(g.min(1000)).unwrap().iter() {
            prop_assert!(g % d == 0);
        }
        prop_assert_eq!(gcd(x / g, y / g), 1);
    }
}

/// Round-trip of the unit rational through the report formatter, pinned.
#[test]
fn unit_rational_round_trip() {
    let one = Rat::one();
    assert_eq!(format_rat(&one), "1/1");
    assert_eq!(parse_rat("1/1").unwrap(), one);
}
