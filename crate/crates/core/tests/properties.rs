use num_rational::Ratio;
use predba_core::harness::suites::honest_forgery;
use predba_core::predgen;
use predba_core::*;
use proptest::prelude::*;

fn alpha_for(mode: Mode) -> impl Strategy<Value = TrustParam> {
    (2i64..=12).prop_flat_map(move |den| {
        let lo = match mode {
            Mode::NonAuth => (den + 2) / 3,
            Mode::Auth => (den + 1) / 2,
        };
        (lo..=den).prop_map(move |num| TrustParam::from_fraction(num, den).unwrap())
    })
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::NonAuth), Just(Mode::Auth)]
}

/// n, faulty flags and input bits.
fn config(max_n: usize) -> impl Strategy<Value = Configuration> {
    (3..=max_n).prop_flat_map(|n| {
        (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n)).prop_map(
            move |(faulty, bits)| {
                let f: Vec<NodeId> = (1..=n as u32).filter(|i| faulty[*i as usize - 1]).map(NodeId).collect();
                Configuration::with_inputs(n, f, |i| if bits[i.index() - 1] { Bit::One } else { Bit::Zero }).unwrap()
            },
        )
    })
}

fn subset(n: usize) -> impl Strategy<Value = Prediction> {
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(|keep| Prediction::new((1..=keep.len() as u32).filter(|i| keep[*i as usize - 1]).map(NodeId)))
}

proptest! {
    #[test]
    fn error_is_symmetric_difference((c, p) in config(24).prop_flat_map(|c| { let n = c.n; (Just(c), subset(n)) })) {
        let e = compute_error(&c, &p);
        let h = c.honest_set();
        prop_assert_eq!(e.eta, h.symmetric_difference(&p.members).count());
        prop_assert_eq!(e.eta, e.eta_f + e.eta_h);
    }

    #[test]
    fn with_error_round_trips(c in config(24), a in 0usize..24, b in 0usize..24, seed: u64) {
        let (a, b) = (a.min(c.f()), b.min(c.n - c.f()));
        let p = predgen::with_error(&c, a, b, seed).unwrap();
        let e = compute_error(&c, &p);
        prop_assert_eq!((e.eta_f, e.eta_h, e.eta), (a, b, a + b));
        prop_assert_eq!(predgen::with_error(&c, a, b, seed).unwrap(), p);
    }

    #[test]
    fn worst_case_maximises_faulty_members(c in config(24), eta in 0usize..24) {
        prop_assume!(eta <= c.n);
        let p = predgen::worst_case(&c, eta).unwrap();
        let e = compute_error(&c, &p);
        prop_assert_eq!(e.eta, eta);
        prop_assert_eq!(e.eta_f, eta.min(c.f()));
    }

    #[test]
    fn smoothness_curve_shape((m, a) in mode().prop_flat_map(|m| (Just(m), alpha_for(m))), n in 3usize..60) {
        let s: Vec<usize> = (0..=n).map(|e| theoretical_smoothness(m, a, n, e).unwrap()).collect();
        prop_assert_eq!(s[0], consistency_bound(m, a, n).unwrap());
        let robust = robustness_bound(m, a, n).unwrap();
        prop_assert!(s.iter().all(|v| *v >= robust));
        let rises: Vec<usize> = (1..=n).filter(|&e| s[e] > s[e - 1]).collect();
        prop_assert!(rises.is_empty(), "curve rises at {:?}", rises);
        if m == Mode::NonAuth {
            // Pieces 1 and 2 meet at eta = (1 - alpha) n - 1, when that is an integer.
            let meet = (Ratio::from_integer(1) - a.value()) * Ratio::from_integer(n as i64) - Ratio::from_integer(1);
            if meet.is_integer() && *meet.numer() >= 0 {
                let e = *meet.numer() as usize;
                let p1 = a.times(n) - Ratio::from_integer(e as i64);
                let p2 = Ratio::from_integer(n as i64 - 2 * e as i64 - 1);
                prop_assert_eq!(p1, p2);
            }
        }
    }

    #[test]
    fn smoothness_stays_below_impossibility((m, a) in mode().prop_flat_map(|m| (Just(m), alpha_for(m))), n in 3usize..60) {
        // Full trust makes the bounds degenerate (n - eta reaches 0 at eta = n).
        prop_assume!(a.value() < Ratio::from_integer(1));
        let boundary = (Ratio::from_integer(1) - a.value()) * Ratio::from_integer(2 * n as i64);
        for e in 0..=n {
            let s = theoretical_smoothness(m, a, n, e).unwrap();
            // The conditional piece only binds algorithms whose middle piece is
            // exactly n - 2 eta, which this one's is not.
            if let Some(bar) = theoretical_impossibility(m, a, n, e).unwrap().filter(|b| !b.conditional) {
                if m == Mode::Auth && boundary == Ratio::from_integer(e as i64) {
                    prop_assert!(s <= bar.value);
                } else {
                    prop_assert!(s < bar.value, "eta={} s={} sbar={}", e, s, bar.value);
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic(c in config(10), adv in 0usize..6, seed: u64) {
        let adv = library()[adv].clone();
        let s = Scenario::wrapper(Mode::NonAuth, TrustParam::from_fraction(1, 2).unwrap(), c.clone(), predgen::perfect(&c), adv, seed);
        let a = run_scenario(&s, true).unwrap();
        let b = run_scenario(&s, true).unwrap();
        prop_assert_eq!(&a.outcome, &b.outcome);
        let json = |r: &predba_core::harness::RunReport| {
            r.transcripts.as_ref().unwrap().iter().map(|t| t.to_json()).collect::<Vec<_>>()
        };
        prop_assert_eq!(json(&a), json(&b));
    }

    #[test]
    fn transcripts_are_complete(c in config(9), adv in 0usize..6, seed: u64, auth: bool) {
        let mode = if auth { Mode::Auth } else { Mode::NonAuth };
        let adv = library()[adv].clone();
        let a = TrustParam::from_fraction(3, 5).unwrap();
        let s = Scenario::wrapper(mode, a, c.clone(), predgen::random_subset(c.n, seed), adv, seed);
        let r = run_scenario(&s, true).unwrap();
        let ts = r.transcripts.unwrap();
        let rounds = ts[0].rounds.len();
        prop_assert!(ts.iter().all(|t| t.rounds.len() == rounds));
        for k in 0..rounds {
            for t in &ts {
                let expected: Vec<_> = ts
                    .iter()
                    .flat_map(|u| u.rounds[k].sent.iter().filter(|m| m.receiver == t.node))
                    .cloned()
                    .collect();
                prop_assert_eq!(&t.rounds[k].received, &expected);
                prop_assert!(t.rounds[k].sent.iter().all(|m| m.sender == t.node && m.round == k as u32 + 1));
            }
        }
    }

    #[test]
    fn honest_keys_are_never_used_by_the_adversary(c in config(9), adv in 0usize..6, seed: u64) {
        let adv = library()[adv].clone();
        let a = TrustParam::from_fraction(1, 2).unwrap();
        let s = Scenario::wrapper(Mode::Auth, a, c.clone(), predgen::random_subset(c.n, seed), adv, seed);
        let r = run_scenario(&s, false).unwrap();
        prop_assert!(!honest_forgery(&r.ledger, &c));
    }

    #[test]
    fn scenarios_round_trip(c in config(12), seed: u64, adv in 0usize..6, local: bool) {
        let a = TrustParam::from_fraction(2, 3).unwrap();
        let mut s = Scenario::wrapper(Mode::NonAuth, a, c.clone(), predgen::random_subset(c.n, seed), library()[adv].clone(), seed);
        if local {
            let per_node = (0..c.n as u64).map(|k| predgen::random_subset(c.n, seed ^ k)).collect();
            s.prediction = Some(PredictionInput::Local(LocalPrediction { per_node }));
        }
        let back = Scenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), s.to_json());
        prop_assert_eq!(back.config, s.config);
        prop_assert_eq!(back.prediction, s.prediction);
        prop_assert_eq!(back.seed, seed);
    }
}

#[test]
fn forged_chains_are_ignored() {
    // A faulty node cannot make a signature of honest node 1 appear in the ledger.
    use predba_core::simnet::{Ledger, Minter, Payload};
    let mut ledger = Ledger::new();
    let d = Payload::Relay { instance: NodeId(1), value: Bit::One }.digest();
    assert!(ledger.mint(NodeId(1), d, Minter::Adversary, false).is_err());
    assert!(ledger.is_empty());
}
