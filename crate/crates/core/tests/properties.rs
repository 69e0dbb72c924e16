use oe_core::actions::{Action, Bernoulli, Coinduced, InnerAction};
use oe_core::cocycles::{homomorphism_cocycle, verify_identity, Star, SyncField};
use oe_core::constructions::{Matcher, TheoremB};
use oe_core::spaces::stream_seed;
use oe_core::words::FactorKind;
use oe_core::{Configuration, Coset, Field, FiniteGroup, GroupSpec, Length, RMode, VerificationReport, Word};
use proptest::prelude::*;
use std::sync::Arc;

fn mixed() -> GroupSpec {
    GroupSpec::free_product(&[
        GroupSpec::integers("a").unwrap(),
        GroupSpec::finite("s", FiniteGroup::symmetric3()).unwrap(),
        GroupSpec::finite("t", FiniteGroup::cyclic(2)).unwrap(),
    ])
    .unwrap()
}

fn word(g: &GroupSpec, parts: &[(usize, i64)]) -> Word {
    parts.iter().fold(Word::identity(), |acc, &(f, v)| {
        let f = f % g.factors().len();
        let v = match &g.factors()[f].kind {
            FactorKind::Integers => v,
            FactorKind::Finite { group, .. } => v.rem_euclid(group.order() as i64),
        };
        g.mul(&acc, &g.syllable_word(f, v))
    })
}

fn syllables() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0usize..3, -4i64..5), 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiplication_is_associative(a in syllables(), b in syllables(), c in syllables()) {
        let g = mixed();
        let (a, b, c) = (word(&g, &a), word(&g, &b), word(&g, &c));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
    }

    #[test]
    fn inverse_cancels(a in syllables()) {
        let g = mixed();
        let a = word(&g, &a);
        prop_assert!(g.mul(&a, &g.inverse(&a)).is_identity());
        prop_assert!(g.mul(&g.inverse(&a), &a).is_identity());
    }

    #[test]
    fn format_parse_round_trip(a in syllables()) {
        let g = mixed();
        let a = word(&g, &a);
        prop_assert_eq!(g.parse(&g.format(&a)).unwrap(), a);
    }

    #[test]
    fn spelling_multiplies_back(a in syllables()) {
        let g = mixed();
        let a = word(&g, &a);
        let letters = g.spell(&a);
        prop_assert_eq!(g.mul_all(letters.iter()), a.clone());
        prop_assert_eq!(letters.len() as u64, g.length(&a, &Length::Word));
    }

    #[test]
    fn coset_action_is_a_right_action(c in syllables(), a in syllables(), b in syllables()) {
        let g = mixed();
        let (c, a, b) = (word(&g, &c), word(&g, &a), word(&g, &b));
        let coset = g.coset(1, &c);
        prop_assert_eq!(g.coset_act(&g.coset_act(&coset, &a), &b), g.coset_act(&coset, &g.mul(&a, &b)));
    }

    #[test]
    fn bernoulli_action_axiom(a in syllables(), b in syllables(), h in syllables(), seed: u64) {
        let g = mixed();
        let act = Bernoulli { group: g.clone(), alphabet: 3 };
        let (a, b, h) = (word(&g, &a), word(&g, &b), word(&g, &h));
        let x = Configuration::<Word>::sample(3, seed);
        let bx = act.apply(&b, &x);
        prop_assert_eq!(act.read(&a, &bx, &h).unwrap(), act.read(&g.mul(&a, &b), &x, &h).unwrap());
    }

    #[test]
    fn coinduced_action_axiom(a in syllables(), b in syllables(), h in syllables(), seed: u64, transversal: bool) {
        let g = GroupSpec::free_product(&[GroupSpec::integers("a").unwrap(), GroupSpec::integers("b").unwrap(), GroupSpec::finite("t", FiniteGroup::cyclic(2)).unwrap()]).unwrap();
        let mode = if transversal { RMode::Transversal } else { RMode::Homomorphism };
        let act = Coinduced::new(g.clone(), 1, mode, InnerAction::Cyclic { modulus: 5 }).unwrap();
        let (a, b, h) = (word(&g, &a), word(&g, &b), word(&g, &h));
        let x = Configuration::<Coset>::sample(5, seed);
        let c = g.coset(1, &h);
        let bx = act.apply(&b, &x);
        prop_assert_eq!(act.read(&a, &bx, &c).unwrap(), act.read(&g.mul(&a, &b), &x, &c).unwrap());
    }

    #[test]
    fn homomorphism_cocycle_identity(seed: u64) {
        let g = GroupSpec::free(&["a", "b"]).unwrap();
        let act = Bernoulli { group: g.clone(), alphabet: 2 };
        let swap = |l: &Word| {
            let s = l.syllables()[0];
            g.syllable_word(1 - s.factor, s.value)
        };
        let c = homomorphism_cocycle(g.clone(), g.clone(), Arc::new(Star(act)), swap).unwrap();
        let xs: Vec<Configuration<Word>> = (0..3).map(|i| Configuration::sample(2, stream_seed(seed, i))).collect();
        let refs: Vec<SyncField<'_, Word>> = xs.iter().map(|x| x as SyncField<'_, Word>).collect();
        prop_assert!(verify_identity(&c, &refs, 3).unwrap().passed());
    }

    #[test]
    fn matcher_inverts(seed: u64, i in 1u32..3) {
        let m = Matcher { radius: 256 };
        let mut z = Configuration::<i64>::sample(3, seed);
        z.set(0, 0);
        if let Ok(k) = m.forward(&z, i) {
            let shifted = Configuration::from_window(3, (k - 300..k + 300).map(|n| (n - k, z.value(&n).unwrap())).collect());
            prop_assert_eq!(m.inverse(&shifted, i).unwrap(), -k);
        }
    }

    #[test]
    fn theorem_b_round_trip(seed: u64) {
        let tb = TheoremB::new(FiniteGroup::cyclic(3), 2).unwrap();
        let x = Configuration::<Word>::sample(3, seed);
        let v = tb.theta(&x, 3).unwrap();
        let back = tb.theta_inverse(&v, 3).unwrap();
        let base = x.value(&Word::identity()).unwrap();
        for (c, val) in back.window() {
            let want = tb.k.mul(tb.k.inv(base), x.value(c).unwrap());
            prop_assert_eq!(*val, want);
        }
    }
}

#[test]
fn report_round_trips_through_json() {
    let mut r = VerificationReport::new("demo", oe_core::Mode::Exact).param("radius", 2).with_seed(7);
    r.stat("states", oe_core::Stat::Count(16));
    r.fail("counterexample at x = 3");
    let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}
