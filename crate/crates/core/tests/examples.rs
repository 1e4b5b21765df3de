//! Worked examples for the model, prediction generators, curves, protocols and adversaries.

use std::collections::BTreeMap;

use predba_core::adversary::scenarios::{build_impossibility_scenarios, Theorem};
use predba_core::harness::sweep::{empirical_resilience, SweepParams};
use predba_core::predgen::{self, local_from_global};
use predba_core::simnet::{Ledger, Minter, Payload};
use predba_core::*;

fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().copied().map(NodeId).collect()
}

fn config(n: usize, faulty: &[u32], input: Bit) -> Configuration {
    Configuration::with_inputs(n, ids(faulty), |_| input).unwrap()
}

fn alpha(num: i64, den: i64) -> TrustParam {
    TrustParam::from_fraction(num, den).unwrap()
}

fn run(s: &Scenario) -> Outcome {
    run_scenario(s, false).unwrap().outcome
}

fn baseline(kind: ProtocolKind, mode: Mode, n: usize, faulty: &[u32], inputs: &[(u32, Bit)], adv: AdversarySpec) -> Outcome {
    let inputs: BTreeMap<NodeId, Bit> = inputs.iter().map(|&(i, b)| (NodeId(i), b)).collect();
    let config = Configuration::new(n, ids(faulty), inputs).unwrap();
    run(&Scenario::baseline(kind, mode, config, adv, 1))
}

fn agreed(o: &Outcome) -> Option<Bit> {
    let mut values = o.decisions.values();
    let first = *values.next()?;
    values.all(|v| *v == first).then_some(first)
}

#[test]
fn error_counts() {
    let c = config(4, &[], Bit::Zero);
    assert_eq!(compute_error(&c, &Prediction::from_ids(1..=4)).eta, 0);

    let c = config(6, &[5, 6], Bit::Zero);
    let e = compute_error(&c, &Prediction::from_ids([1, 2, 5]));
    assert_eq!((e.eta_f, e.eta_h, e.eta), (1, 2, 3));

    let c = config(5, &[1, 2, 3, 4, 5], Bit::Zero);
    let e = compute_error(&c, &Prediction::from_ids(1..=5));
    assert_eq!((e.eta_f, e.eta_h, e.eta), (5, 0, 5));
}

#[test]
fn local_error_counts() {
    let c = config(3, &[], Bit::Zero);
    let perfect = LocalPrediction::constant(&Prediction::from_ids(1..=3), 3);
    assert_eq!(compute_local_error(&c, &perfect), 0);
    assert_eq!(compute_local_error(&c, &LocalPrediction::constant(&Prediction::default(), 3)), 9);

    let c = config(4, &[3, 4], Bit::Zero);
    let local = LocalPrediction {
        per_node: vec![Prediction::from_ids([1, 2]), Prediction::from_ids([1]), Prediction::default(), Prediction::default()],
    };
    assert_eq!(compute_local_error(&c, &local), 1);
}

#[test]
fn generators() {
    let c = config(6, &[5, 6], Bit::One);
    assert_eq!(predgen::perfect(&c), Prediction::from_ids(1..=4));
    assert_eq!(predgen::perfect(&config(3, &[1, 2, 3], Bit::One)), Prediction::default());
    assert_eq!(predgen::with_error(&c, 0, 0, 3).unwrap(), Prediction::from_ids(1..=4));
    let e = compute_error(&c, &predgen::with_error(&c, 1, 2, 3).unwrap());
    assert_eq!((e.eta_f, e.eta_h, e.eta), (1, 2, 3));
    assert_eq!(predgen::with_error(&c, 2, 4, 3).unwrap(), Prediction::from_ids([5, 6]));
    assert!(predgen::with_error(&c, 3, 0, 3).is_err());

    let c = config(10, &[1, 2, 3, 4, 5], Bit::One);
    assert_eq!(predgen::worst_case(&c, 0).unwrap(), predgen::perfect(&c));
    let e = compute_error(&c, &predgen::worst_case(&c, 3).unwrap());
    assert_eq!((e.eta_f, e.eta_h), (3, 0));
    let c = config(10, &[1, 2], Bit::One);
    let e = compute_error(&c, &predgen::worst_case(&c, 5).unwrap());
    assert_eq!((e.eta_f, e.eta_h), (2, 3));
}

#[test]
fn local_assignment() {
    let p0 = Prediction::from_ids([1, 2]);
    let p1 = Prediction::from_ids([3, 4]);
    let assignment: BTreeMap<NodeId, usize> = [(1, 0), (2, 0), (3, 1), (4, 1)].map(|(i, k)| (NodeId(i), k)).into();
    let local = local_from_global(&[p0.clone(), p1.clone()], &assignment, 4).unwrap();
    assert_eq!(local.per_node, vec![p0.clone(), p0.clone(), p1.clone(), p1]);
    assert!(local_from_global(&[], &BTreeMap::new(), 0).unwrap().per_node.is_empty());

    let single: BTreeMap<NodeId, usize> = (1..=4).map(|i| (NodeId(i), 0)).collect();
    let local = local_from_global(&[p0.clone()], &single, 4).unwrap();
    let c = config(4, &[4], Bit::Zero);
    assert_eq!(compute_local_error(&c, &local), 3 * compute_error(&c, &p0).eta);
}

#[test]
fn curve_points() {
    let a = alpha(4, 5);
    assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 4).unwrap(), 28);
    assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 0).unwrap(), 32);
    assert_eq!(theoretical_smoothness(Mode::NonAuth, a, 40, 30).unwrap(), 3);
    assert_eq!(theoretical_smoothness(Mode::Auth, a, 30, 14).unwrap(), 8);

    let sbar = |mode, n, eta| theoretical_impossibility(mode, a, n, eta).unwrap().map(|i| i.value);
    assert_eq!(sbar(Mode::NonAuth, 40, 2), Some(33));
    assert_eq!(sbar(Mode::NonAuth, 40, 10), Some(20));
    assert_eq!(sbar(Mode::Auth, 30, 10), Some(20));

    assert_eq!(consistency_bound(Mode::NonAuth, a, 40).unwrap(), 32);
    assert_eq!(robustness_bound(Mode::NonAuth, a, 40).unwrap(), 3);
    assert_eq!(consistency_bound(Mode::Auth, a, 30).unwrap(), 24);
    assert_eq!(robustness_bound(Mode::Auth, a, 30).unwrap(), 5);
    assert_eq!(robustness_bound(Mode::NonAuth, alpha(1, 1), 17).unwrap(), 0);

    assert!(theoretical_smoothness(Mode::Auth, alpha(2, 5), 30, 0).is_err());
}

#[test]
fn active_sets() {
    let a = alpha(4, 5);
    let l = build_active_set(&Prediction::from_ids([3, 7]), a, 20, Mode::NonAuth).unwrap();
    assert_eq!(l.members, ids(&[1, 2, 3, 4, 7]));
    assert_eq!(l.fault_param, 2);
    let l = build_active_set(&Prediction::from_ids(1..=6), a, 20, Mode::NonAuth).unwrap();
    assert_eq!((l.len(), l.fault_param), (6, 2));
    let l = build_active_set(&Prediction::default(), alpha(3, 4), 16, Mode::Auth).unwrap();
    assert_eq!(l.members, ids(&[1, 2, 3, 4, 5, 6, 7]));
    assert_eq!(l.fault_param, 4);
}

#[test]
fn echo_transcripts() {
    let s = Scenario::baseline(ProtocolKind::Echo, Mode::NonAuth, config(3, &[], Bit::One), AdversarySpec::Silent, 0);
    let r = run_scenario(&s, true).unwrap();
    let ts = r.transcripts.unwrap();
    assert_eq!(ts.len(), 3);
    for t in &ts {
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.rounds[0].sent.len(), 3);
        assert_eq!(t.rounds[0].received.len(), 3);
    }
    assert_eq!(r.outcome.decisions.values().copied().collect::<Vec<_>>(), vec![Bit::One; 3]);

    let again = run_scenario(&s, true).unwrap().transcripts.unwrap();
    assert_eq!(ts.iter().map(|t| t.to_json()).collect::<Vec<_>>(), again.iter().map(|t| t.to_json()).collect::<Vec<_>>());

    let s = Scenario::baseline(ProtocolKind::Echo, Mode::NonAuth, config(3, &[3], Bit::One), AdversarySpec::Silent, 0);
    let ts = run_scenario(&s, true).unwrap().transcripts.unwrap();
    assert!(ts[2].faulty && ts[2].rounds[0].sent.is_empty());
    assert!(ts[0].rounds[0].received.iter().all(|m| m.sender != NodeId(3)));
}

#[test]
fn ledger_examples() {
    let d = Payload::Echo { value: Bit::One }.digest();
    let d2 = Payload::Echo { value: Bit::Zero }.digest();
    let mut ledger = Ledger::new();
    let sig = ledger.mint(NodeId(2), d, Minter::Owner, true).unwrap();
    assert!(ledger.verify(&sig, d));
    assert!(!ledger.verify(&sig, d2));
    assert!(ledger.mint(NodeId(5), d, Minter::Adversary, true).is_ok());
    assert!(ledger.mint(NodeId(1), d, Minter::Adversary, false).is_err());
}

#[test]
fn phase_king_examples() {
    use Bit::*;
    let o = baseline(ProtocolKind::PhaseKing, Mode::NonAuth, 4, &[], &[(1, One), (2, One), (3, One), (4, One)], AdversarySpec::Silent);
    assert!(o.decisions.values().all(|b| *b == One));
    let o = baseline(ProtocolKind::PhaseKing, Mode::NonAuth, 4, &[4], &[(1, Zero), (2, Zero), (3, Zero)], AdversarySpec::Silent);
    assert_eq!(agreed(&o), Some(Zero));
    let o = baseline(
        ProtocolKind::PhaseKing,
        Mode::NonAuth,
        7,
        &[6, 7],
        &[(1, Zero), (2, One), (3, Zero), (4, One), (5, Zero)],
        AdversarySpec::Equivocate,
    );
    assert!(agreed(&o).is_some());
    let o = baseline(
        ProtocolKind::PhaseKing,
        Mode::NonAuth,
        4,
        &[4],
        &[(1, Zero), (2, One), (3, Zero)],
        AdversarySpec::CrashAfter { round: 2, input: None },
    );
    assert!(o.agreement && o.validity);
    let split = library().into_iter().find(|a| a.name() == "split_brain").unwrap();
    let o = baseline(ProtocolKind::PhaseKing, Mode::NonAuth, 7, &[1, 4], &[(2, Zero), (3, One), (5, One), (6, Zero), (7, One)], split);
    assert!(o.agreement && o.validity);
}

#[test]
fn dolev_strong_examples() {
    use Bit::*;
    let bc = ProtocolKind::DolevStrongBroadcast { sender: NodeId(1) };
    let o = baseline(bc, Mode::Auth, 4, &[], &[(1, One), (2, Zero), (3, Zero), (4, Zero)], AdversarySpec::Silent);
    assert!(o.decisions.values().all(|b| *b == One));
    let o = baseline(bc, Mode::Auth, 4, &[1], &[(2, Zero), (3, One), (4, Zero)], AdversarySpec::Equivocate);
    assert!(agreed(&o).is_some() && o.termination);

    let ba = ProtocolKind::DolevStrongBa;
    let o = baseline(ba, Mode::Auth, 4, &[], &[(1, Zero), (2, Zero), (3, Zero), (4, Zero)], AdversarySpec::Silent);
    assert!(o.decisions.values().all(|b| *b == Zero));
    let o = baseline(ba, Mode::Auth, 5, &[4, 5], &[(1, One), (2, One), (3, One)], AdversarySpec::Equivocate);
    assert_eq!(agreed(&o), Some(One));
    let o = baseline(ba, Mode::Auth, 4, &[4], &[(1, Zero), (2, Zero), (3, One)], AdversarySpec::Equivocate);
    assert_eq!(agreed(&o), Some(Zero));
}

#[test]
fn wrapper_examples() {
    let c = config(4, &[], Bit::Zero);
    let o = run(&Scenario::wrapper(Mode::NonAuth, alpha(1, 2), c.clone(), predgen::perfect(&c), AdversarySpec::Silent, 0));
    assert!(o.decisions.values().all(|b| *b == Bit::Zero));

    let c = config(6, &[], Bit::One);
    let o = run(&Scenario::wrapper(Mode::Auth, alpha(2, 3), c.clone(), predgen::perfect(&c), AdversarySpec::Silent, 0));
    assert!(o.decisions.values().all(|b| *b == Bit::One));

    let split = library().into_iter().find(|a| a.name() == "split_brain").unwrap();
    let c = Configuration::with_inputs(20, ids(&(5..=20).collect::<Vec<_>>()), |i| Bit::from_u8((i.0 % 2) as u8).unwrap()).unwrap();
    let o = run(&Scenario::wrapper(Mode::NonAuth, alpha(4, 5), c.clone(), predgen::perfect(&c), split.clone(), 0));
    assert!(o.agreement && o.validity && o.termination);

    let c = Configuration::with_inputs(20, ids(&[20]), |i| Bit::from_u8((i.0 % 2) as u8).unwrap()).unwrap();
    let faulty_only = Prediction::new(c.faulty.iter().copied());
    let o = run(&Scenario::wrapper(Mode::NonAuth, alpha(4, 5), c, faulty_only, AdversarySpec::Equivocate, 0));
    assert!(o.agreement && o.validity && o.termination);

    let c = Configuration::with_inputs(30, ids(&(7..=30).collect::<Vec<_>>()), |i| Bit::from_u8((i.0 % 2) as u8).unwrap()).unwrap();
    let o = run(&Scenario::wrapper(Mode::Auth, alpha(4, 5), c.clone(), predgen::perfect(&c), AdversarySpec::Equivocate, 0));
    assert!(o.agreement && o.validity && o.termination);

    let c = Configuration::with_inputs(30, ids(&[2, 9, 14, 22, 30]), |i| Bit::from_u8((i.0 % 3 == 0) as u8).unwrap()).unwrap();
    let o = run(&Scenario::wrapper(Mode::Auth, alpha(4, 5), c, predgen::random_subset(30, 4), split, 0));
    assert!(o.agreement && o.validity && o.termination);
}

#[test]
fn noise_is_reproducible() {
    let c = config(7, &[6, 7], Bit::Zero);
    let s = Scenario::baseline(ProtocolKind::PhaseKing, Mode::NonAuth, c, AdversarySpec::RandomNoise, 42);
    let a = run_scenario(&s, true).unwrap().transcripts.unwrap();
    let b = run_scenario(&s, true).unwrap().transcripts.unwrap();
    assert_eq!(a.iter().map(|t| t.to_json()).collect::<Vec<_>>(), b.iter().map(|t| t.to_json()).collect::<Vec<_>>());
}

#[test]
fn vacuous_adversaries() {
    let c = config(5, &[], Bit::One);
    for adv in library() {
        let o = run(&Scenario::wrapper(Mode::NonAuth, alpha(3, 5), c.clone(), predgen::perfect(&c), adv, 9));
        assert!(o.agreement && o.validity && o.termination);
    }
}

#[test]
fn family_shapes() {
    let f = build_impossibility_scenarios(Theorem::T41, alpha(4, 5), 20, None).unwrap();
    assert_eq!(f.members.len(), 3);
    let c1 = &f.members[0];
    assert_eq!((c1.groups["A"].len(), c1.groups["B"].len(), c1.groups["C"].len()), (2, 2, 16));
    assert_eq!(c1.scenario.config.f(), 16);

    let f = build_impossibility_scenarios(Theorem::T42p2, alpha(4, 5), 15, Some(5)).unwrap();
    for m in &f.members {
        assert_eq!((m.groups["A"].len(), m.groups["B"].len(), m.groups["C"].len()), (5, 5, 5));
        assert!(m.groups.get("D").map_or(true, |d| d.is_empty()));
        assert_eq!((m.eta, m.f), (5, 5));
    }

    let f = build_impossibility_scenarios(Theorem::T52, alpha(1, 2), 8, None).unwrap();
    assert_eq!(f.members.len(), 3);
    assert!(f.members.iter().all(|m| matches!(m.scenario.prediction, Some(PredictionInput::Local(_)))));
    assert!(build_impossibility_scenarios(Theorem::T52, alpha(1, 2), 7, None).is_err());
}

#[test]
fn verdicts() {
    let c = config(3, &[], Bit::Zero);
    let mut c2 = c.clone();
    c2.inputs.insert(NodeId(1), Bit::One);
    let s = Scenario::baseline(ProtocolKind::Echo, Mode::NonAuth, c2, AdversarySpec::Silent, 0);
    let outcome = |d: [Bit; 3]| Outcome {
        decisions: (1..=3).map(NodeId).zip(d).collect(),
        decided_round: 1,
        agreement: false,
        validity: false,
        termination: false,
    };
    assert!(check_outcome(&s, &outcome([Bit::Zero; 3])).ok());
    assert!(!check_outcome(&s, &outcome([Bit::Zero, Bit::One, Bit::Zero])).agreement);
    let s = Scenario::baseline(ProtocolKind::Echo, Mode::NonAuth, c, AdversarySpec::Silent, 0);
    assert!(!check_outcome(&s, &outcome([Bit::One; 3])).validity);
}

#[test]
fn resilience_at_small_points() {
    let p = SweepParams { mode: Mode::NonAuth, alpha: alpha(1, 3), n: 3, adversaries: library(), trials: 4, seed: 1 };
    assert!(empirical_resilience(&p, 0).unwrap().empirical_f >= 1);
    let p = SweepParams { mode: Mode::NonAuth, alpha: alpha(4, 5), n: 40, adversaries: library(), trials: 2, seed: 1 };
    assert!(empirical_resilience(&p, 4).unwrap().empirical_f >= 28);
}
