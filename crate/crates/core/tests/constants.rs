use ellstat::constants::*;
use ellstat::interval::IntervalReal;
use num_bigint::BigInt;

#[test]
fn generic_product_matches_closed_form() {
    // prod_{p >= 5} (1 - p^-10) = 1 / (zeta(10) (1 - 2^-10)^-1 (1 - 3^-10)^-1), zeta(10) = pi^10 / 93555
    let prec = 160;
    let g = generic_product(2_000, prec);
    let pi10 = IntervalReal::pi(prec).powi(10);
    let z10 = pi10.div_int(&BigInt::from(93555));
    let one = IntervalReal::one(prec);
    let e2 = one.sub(&IntervalReal::from_frac(1, 1024, prec));
    let e3 = one.sub(&IntervalReal::from_frac(1, 59049, prec));
    let closed = z10.recip().div(&e2).div(&e3);
    assert!(g.value.intersect(&closed).is_some());
    assert!(g.value.width_f64() < 1e-12);
}

#[test]
fn euler_constants_are_tight_and_stable() {
    for name in [ConstantName::Sf, ConstantName::Kappa] {
        let a = euler_constant(name, 20_000, 128).unwrap();
        let b = euler_constant(name, DEFAULT_P0, 128).unwrap();
        println!(
            "{name}: {:?} width {:e}",
            b.value.decimal_bounds(15),
            b.width()
        );
        assert!(a.value.intersect(&b.value).is_some(), "{name}");
        assert!(b.width() < 1e-6, "{name}");
    }
}

#[test]
fn signed_constants_add_up() {
    for (p, m, t) in [
        (
            ConstantName::SfPlus,
            ConstantName::SfMinus,
            ConstantName::Sf,
        ),
        (
            ConstantName::KappaPlus,
            ConstantName::KappaMinus,
            ConstantName::Kappa,
        ),
    ] {
        let p = euler_constant(p, 2_000, 96).unwrap();
        let m = euler_constant(m, 2_000, 96).unwrap();
        let t = euler_constant(t, 2_000, 96).unwrap();
        assert!(p.value.add(&m.value).intersect(&t.value).is_some());
    }
}
