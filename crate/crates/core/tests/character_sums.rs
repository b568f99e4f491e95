use ellstat::fourier::*;
use ellstat::local::KodairaSymbol::{self, *};

#[test]
fn magnitudes_match_case_values() {
    for p in [5u64, 7] {
        for t in [III, IV, In(2), In(3)] {
            let rep = verify_stated_magnitudes(t, p, 17).unwrap();
            assert!(rep.ok(), "{rep:?}");
        }
    }
}

#[test]
fn parseval_for_each_family() {
    for t in [III, IV, In(2)] {
        let phi = phi0_indicator(t, 5).unwrap();
        assert!(verify_parseval(&phi).unwrap(), "{t}");
    }
}

#[test]
fn transform_law_for_iii() {
    let phi = phi0_indicator(III, 5).unwrap();
    let rep = verify_transform_law(&phi, III, 5).unwrap();
    assert!(rep.ok() && rep.checked == 25 * 25 * 25 * 25, "{rep:?}");
}

#[test]
fn translate_sum_bound() {
    for t in [III, IV, In(2)] {
        let rep = verify_translate_bound(t, 5).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }
}

#[test]
fn translate_counts_iv_and_corrected_iii() {
    for p in [5u64, 7] {
        assert!(verify_iv(p).unwrap().ok());
        assert!(verify_iii_corrected(p).unwrap().ok());
    }
}

#[test]
fn literal_iii_statement_has_counterexamples() {
    // characters with p | c, p | b and a a unit have r_T = 0, not 1
    let rep = verify_iii_literal(5).unwrap();
    assert!(!rep.ok());
    let chi = CharacterTriple::new(1, 0, 0, 25).unwrap();
    assert_eq!(r_t_count(III, 5, &chi).unwrap(), 0);
}

#[test]
fn translate_counts_multiplicative() {
    for k in 2..=5u32 {
        let t: KodairaSymbol = In(k);
        let rep = verify_in_bound(t, 5).unwrap();
        assert!(rep.ok(), "{rep:?}");
        eprintln!("{t}: max ratio {:?}", rep.max_ratio);
    }
}
