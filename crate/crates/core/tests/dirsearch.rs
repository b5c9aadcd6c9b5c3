use std::time::Duration;

use cyclotomo::crossratio::{enumerate_cross_ratio_set, ExtReal};
use cyclotomo::dirsearch::{
    candidate_slopes, check_size, closed_under_rotation, cross_ratio_profile, magic_number, max_admissible_in_pool,
    max_admissible_set, reference_slopes, verify_admissible, witness_matches_regular, SlopeSet,
};
use cyclotomo::{CycNum, FieldTag};

fn run(n: u32) -> (usize, usize, bool, bool) {
    let set = enumerate_cross_ratio_set(FieldTag::new(n).unwrap());
    let r = magic_number(&set, Some(Duration::from_secs(600)), false).unwrap();
    assert!(verify_admissible(&r.bound.witness, &set).unwrap(), "n={n}: witness fails");
    let matches = r.bound.bound == r.tag.big_n as usize
        && witness_matches_regular(&r.bound.witness).unwrap();
    eprintln!(
        "n={n}: pool {} bound {} magic {} in {:.2?} ({:?})",
        r.bound.pool_size, r.bound.bound, r.magic, r.bound.elapsed, r.bound.diagnostics
    );
    (r.bound.bound, r.magic, r.exhaustive, matches)
}

#[test]
fn bounds_for_small_symmetries() {
    for (n, b, m) in [(3, 6, 7), (5, 10, 11), (8, 8, 9), (12, 12, 13)] {
        let (bound, magic, exhaustive, matches) = run(n);
        assert!(exhaustive, "n={n}");
        assert_eq!(bound, b, "n={n}");
        assert_eq!(magic, m, "n={n}");
        assert!(matches, "n={n}: witness not projectively regular");
    }
}

#[test]
fn square_lattice_magic_number() {
    let (_, magic, exhaustive, _) = run(4);
    assert!(exhaustive);
    assert_eq!(magic, 7);
}

#[test]
fn rotation_never_rescues_a_rejected_quadruple() {
    let set = enumerate_cross_ratio_set(FieldTag::new(8).unwrap());
    let r = max_admissible_set(&set, None, false).unwrap();
    assert!(r.diagnostics.literal_rejections > 0);
    assert_eq!(r.diagnostics.accepted_after_reordering, 0);
}

#[test]
fn larger_pool_never_lowers_the_bound() {
    let tag = FieldTag::new(8).unwrap();
    let set = enumerate_cross_ratio_set(tag);
    let pool = candidate_slopes(&set).unwrap();
    let base = max_admissible_in_pool(tag, &pool, &set, None).unwrap();
    // drop every third non-anchor candidate and confirm the bound does not grow
    let anchors = [
        ExtReal::Finite(CycNum::zero(tag.big_n)),
        ExtReal::Finite(CycNum::one(tag.big_n)),
        ExtReal::Infinity,
    ];
    let smaller: Vec<ExtReal> = pool
        .iter()
        .enumerate()
        .filter(|(i, t)| i % 3 != 1 || anchors.iter().any(|a| a.same_value(t)))
        .map(|(_, t)| t.clone())
        .collect();
    let sub = max_admissible_in_pool(tag, &smaller, &set, None).unwrap();
    assert!(sub.bound <= base.bound);
}

#[test]
fn search_is_deterministic() {
    let set = enumerate_cross_ratio_set(FieldTag::new(12).unwrap());
    let a = max_admissible_set(&set, None, false).unwrap();
    let b = max_admissible_set(&set, None, false).unwrap();
    assert_eq!(a.bound, b.bound);
    assert!(a
        .witness
        .slopes
        .iter()
        .zip(&b.witness.slopes)
        .all(|(x, y)| x.same_value(y)));
}

/// Slope image under the plane map `(x, y) ↦ (ax + by, cx + dy)`.
fn map_slope(t: &ExtReal, [a, b, c, d]: [i64; 4]) -> ExtReal {
    let k = |v: i64| CycNum::from_integer(4, v);
    let (num, den) = match t {
        ExtReal::Infinity => (k(d), k(b)),
        ExtReal::Finite(x) => {
            let x = x.lift(cyclotomo::exactnum::lcm(x.conductor(), 4)).unwrap();
            (&k(c) + &(&k(d) * &x), &k(a) + &(&k(b) * &x))
        }
    };
    if den.is_zero() {
        ExtReal::Infinity
    } else {
        ExtReal::Finite(&num / &den)
    }
}

#[test]
fn reference_profile_survives_linear_maps() {
    let tag = FieldTag::new(12).unwrap();
    let r = reference_slopes(12);
    let base = cross_ratio_profile(&r).unwrap();
    for g in [[2, 1, 1, 3], [1, 2, 0, -1], [0, 1, -1, 0]] {
        let moved: Vec<ExtReal> = r.iter().map(|t| map_slope(t, g)).collect();
        let again = cross_ratio_profile(&moved).unwrap();
        assert_eq!(base.len(), again.len());
        assert!(base.iter().zip(&again).all(|(a, b)| a.same_value(b)), "{g:?}");
        assert!(witness_matches_regular(&SlopeSet::new(tag, moved).unwrap()).unwrap());
    }
}

#[test]
fn reference_matches_itself_and_rejects_a_perturbation() {
    let tag = FieldTag::new(8).unwrap();
    let r = reference_slopes(8);
    let set = SlopeSet::new(tag, r.clone()).unwrap();
    assert!(witness_matches_regular(&set).unwrap());
    let mut bent = r;
    bent[3] = ExtReal::rational(8, 7, 3);
    let bent = SlopeSet::new(tag, bent).unwrap();
    assert!(!witness_matches_regular(&bent).unwrap());
}

#[test]
fn large_conductor_needs_opt_in() {
    let tag = FieldTag::new(301).unwrap();
    assert!(tag.m > 600);
    assert!(check_size(tag, false).is_err());
    assert!(check_size(tag, true).is_ok());
    assert!(check_size(FieldTag::new(12).unwrap(), false).is_ok());
}

#[test]
fn consecutive_anchor_reduction_agrees_with_full_pool() {
    for n in [5, 8, 12] {
        let tag = FieldTag::new(n).unwrap();
        let set = enumerate_cross_ratio_set(tag);
        assert!(closed_under_rotation(&set).unwrap());
        let full = max_admissible_in_pool(tag, &candidate_slopes(&set).unwrap(), &set, None).unwrap();
        let reduced = max_admissible_set(&set, None, false).unwrap();
        assert_eq!(full.bound, reduced.bound, "n={n}");
        assert!(reduced.pool_size < full.pool_size);
    }
}

#[test]
fn candidate_pool_for_twelve() {
    let set = enumerate_cross_ratio_set(FieldTag::new(12).unwrap());
    let pool = candidate_slopes(&set).unwrap();
    assert_eq!(pool.len(), 90);
    // c = 2 contributes 2, 1/2 and −1
    for (p, q) in [(2, 1), (1, 2), (-1, 1)] {
        let t = ExtReal::rational(12, p, q);
        assert!(pool.iter().any(|x| x.same_value(&t)));
    }
}
