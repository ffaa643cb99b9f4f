use std::sync::{Arc, OnceLock};

use nearring_core::constructions::{
    build_nearring, check_h16_conditions, example1_maps, identity_index, mul_general, mul_local, GeneralVariant,
    MapQuad, MulKind,
};
use nearring_core::h1::{ExtBinomial, H1Arith};
use nearring_core::nearring::{
    units_and_locality, verify_axioms, LocalStructure, MulTable, NearringInstance, VerifyMode,
};
use nearring_core::pcgroup::{build_presentation, Coordinates, GroupId, PcPresentation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn coords(p: u32) -> impl Strategy<Value = Coordinates> {
    prop::array::uniform4(0..p).prop_map(Coordinates)
}

fn h1(p: u32) -> &'static (H1Arith, PcPresentation) {
    static CACHE: OnceLock<Vec<(H1Arith, PcPresentation)>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        [5, 7, 11, 13]
            .into_iter()
            .map(|p| (H1Arith::new(p).unwrap(), build_presentation(GroupId::H1(p)).unwrap()))
            .collect()
    });
    all.iter().find(|(a, _)| a.prime() == p).unwrap()
}

struct Example {
    nr: NearringInstance,
    local: LocalStructure,
}

fn example5() -> &'static Example {
    static EX: OnceLock<Example> = OnceLock::new();
    EX.get_or_init(|| {
        let nr = build_nearring(Arc::new(example1_maps(5).unwrap()), MulKind::Local).unwrap();
        let local = units_and_locality(&nr);
        Example { nr, local }
    })
}

/// `beta = x1^k` for k < 5, each screened by the general conditions.
fn power_beta_instances() -> &'static [NearringInstance] {
    static CACHE: OnceLock<Vec<NearringInstance>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (0..5u32)
            .map(|k| {
                let maps = MapQuad::from_fn(5, |c| [0, (c.0[0] as i64).pow(k), 0, 0]).unwrap();
                assert!(check_h16_conditions(&maps, GeneralVariant::Printed).unwrap().pass());
                build_nearring(Arc::new(maps), MulKind::Local).unwrap()
            })
            .collect()
    })
}

/// Random maps with alpha = 0 and the identity row in place.
fn random_local_maps(p: u32, seed: u64) -> MapQuad {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = (p as usize).pow(4);
    let table: Vec<[i64; 3]> = (0..n).map(|_| [0; 3].map(|_: i64| rng.gen_range(0..p as i64))).collect();
    MapQuad::from_fn(p, |x| {
        if *x == Coordinates::generator(0) {
            [0, 1, 0, 0]
        } else {
            let [b, g, f] = table[x.index(p, 4) as usize];
            [0, b, g, f]
        }
    })
    .unwrap()
}

#[test]
fn binomials_agree_with_combinatorial_values() {
    for p in [5u32, 7, 11, 13] {
        let b = ExtBinomial::new(p).unwrap();
        for n in 0..p {
            let c2 = (n as u64 * n.saturating_sub(1) as u64 / 2) % p as u64;
            let c3 = if n < 3 { 0 } else { (n as u64 * (n - 1) as u64 * (n - 2) as u64 / 6) % p as u64 };
            assert_eq!(b.binom2(n) as u64, c2);
            assert_eq!(b.binom3(n) as u64, c3);
        }
    }
}

#[test]
fn commutators_define_c_and_d() {
    let (arith, _) = h1(7);
    let g = Coordinates::generator;
    assert_eq!(arith.commutator(&g(0), &g(1)), g(2));
    assert_eq!(arith.commutator(&g(0), &g(2)), g(3));
    assert_ne!(arith.add(&g(0), &g(1)), arith.add(&g(1), &g(0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn index_is_a_bijection(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), idx in 0u32..14641) {
        let idx = idx % p.pow(4);
        let x = Coordinates::from_index(idx, p, 4);
        prop_assert!(x.0.iter().all(|&v| v < p));
        prop_assert_eq!(x.index(p, 4), idx);
    }

    #[test]
    fn closed_forms_match_collection(p in prop::sample::select(vec![5u32, 7, 11, 13]), x in coords(13), y in coords(13), r in 0u32..30) {
        let (arith, pres) = h1(p);
        let x = Coordinates(x.0.map(|v| v % p));
        let y = Coordinates(y.0.map(|v| v % p));
        prop_assert_eq!(arith.add(&x, &y), pres.add(&x, &y));
        prop_assert_eq!(arith.neg(&x), pres.neg(&x));
        let folded = (0..r).fold(Coordinates::ZERO, |acc, _| pres.add(&acc, &x));
        prop_assert_eq!(arith.smul(&x, r), folded);
    }

    #[test]
    fn presentations_are_associative(
        id in prop::sample::select(vec!["c16", "d16", "qd16", "q16", "g81-7", "g81-8", "g81-9", "g81-10", "h2", "h3", "h4"]),
        a in 0u32..14641, b in 0u32..14641, c in 0u32..14641,
    ) {
        let p = if id.starts_with('h') { Some(11) } else { None };
        let g = build_presentation(GroupId::parse(id, p).unwrap()).unwrap();
        let n = g.order() as u32;
        let (a, b, c) = (g.element(a % n), g.element(b % n), g.element(c % n));
        prop_assert_eq!(g.add(&g.add(&a, &b), &c), g.add(&a, &g.add(&b, &c)));
        prop_assert!(g.add(&a, &g.neg(&a)).is_zero());
    }

    #[test]
    fn general_product_with_vanishing_alpha_is_local_product(seed in any::<u64>(), x in coords(7), y in coords(7)) {
        let maps = random_local_maps(7, seed % 8);
        let (arith, _) = h1(7);
        let local = mul_local(arith, &maps, &x, &y);
        prop_assert_eq!(mul_general(arith, &maps, &x, &y, GeneralVariant::Printed), local);
        prop_assert_eq!(mul_general(arith, &maps, &x, &y, GeneralVariant::Structural), local);
    }

    #[test]
    fn example_left_multiplication_is_an_endomorphism(p in prop::sample::select(vec![5u32, 7, 11]), x in coords(11), y in coords(11), z in coords(11)) {
        let (arith, _) = h1(p);
        let maps = example1_maps(p).unwrap();
        let r = |c: Coordinates| Coordinates(c.0.map(|v| v % p));
        let (x, y, z) = (r(x), r(y), r(z));
        let lhs = mul_local(arith, &maps, &x, &arith.add(&y, &z));
        let rhs = arith.add(&mul_local(arith, &maps, &x, &y), &mul_local(arith, &maps, &x, &z));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(mul_local(arith, &maps, &x, &Coordinates::ZERO).is_zero());
    }

    #[test]
    fn units_and_non_units_are_closed(x in 0u32..625, y in 0u32..625) {
        let Example { nr, local } = example5();
        let unit = |v: u32| local.is_unit(v);
        prop_assert!(unit(nr.identity));
        if unit(x) && unit(y) {
            prop_assert!(unit(nr.mul(x, y)));
        }
        if !unit(x) {
            prop_assert!(!unit(nr.mul(x, y)));
            prop_assert!(!unit(nr.mul(y, x)));
        }
        // units are exactly the elements with nonzero first coordinate
        prop_assert_eq!(unit(x), x >= identity_index(5));
    }

    #[test]
    fn maps_passing_general_conditions_associate_with_b(k in 0usize..5, x in 0u32..625, y in 0u32..625) {
        let nr = &power_beta_instances()[k];
        let b = Coordinates::generator(1).index(5, 4);
        prop_assert_eq!(nr.mul(x, nr.mul(y, b)), nr.mul(nr.mul(x, y), b));
    }

    #[test]
    fn table_csv_round_trip(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = 16usize;
        let data: Vec<u32> = (0..n * n).map(|_| rng.gen_range(0..n as u32)).collect();
        let t = MulTable { p: 2, n, identity: rng.gen_range(1..n as u32), data };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = MulTable::read_csv(&buf[..]).unwrap();
        prop_assert_eq!(back.data, t.data);
        prop_assert_eq!((back.p, back.n, back.identity), (t.p, t.n, t.identity));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn zero_symmetry_matches_maps_at_zero(seed in any::<u64>(), zero_row in any::<bool>()) {
        let mut maps = random_local_maps(5, seed);
        if zero_row {
            maps.beta[0] = 0;
            maps.gamma[0] = 0;
            maps.phi[0] = 0;
        }
        let vanish = maps.vanish_at_zero();
        let nr = build_nearring(Arc::new(maps), MulKind::Local).unwrap();
        let ax = verify_axioms(&nr, VerifyMode::Sampled { count: 1000, seed });
        prop_assert_eq!(ax.zero_symmetric, vanish);
        prop_assert!(ax.right_zero.pass);
    }

    #[test]
    fn sampled_and_exhaustive_agree(seed in any::<u64>(), good in any::<bool>()) {
        let maps = if good { example1_maps(5).unwrap() } else { random_local_maps(5, seed) };
        let nr = build_nearring(Arc::new(maps), MulKind::Local).unwrap();
        let sampled = verify_axioms(&nr, VerifyMode::Sampled { count: 200_000, seed });
        let exhaustive = verify_axioms(&nr, VerifyMode::Exhaustive);
        prop_assert_eq!(sampled.is_nearring(), exhaustive.is_nearring());
        prop_assert_eq!(sampled.is_nearring(), good);
        for s in [&sampled.associativity, &sampled.left_distributivity] {
            prop_assert_eq!(s.pass, s.witness.is_none());
        }
    }
}
