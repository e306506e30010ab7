use ising_qec::sim::{
    class_resolved_weights, decode_shot, error_class, exact_failure_polynomial, exhaustive_class_minima, mwpm,
    run_failure_rate, sample_error, syndrome, DecodeOutcome, DecodingContext, GeometryKind,
};

#[test]
fn class_weights_match_coset_enumeration() {
    for (kind, l) in [(GeometryKind::Planar, 4), (GeometryKind::Torus, 4), (GeometryKind::Planar, 5)] {
        let ctx = DecodingContext::new(kind, l).unwrap();
        for s in 0..60 {
            let e = sample_error(ctx.geometry.n_qubits(), 0.13, s, 91);
            let ex = exhaustive_class_minima(&ctx.geometry, &e).unwrap();
            let w = class_resolved_weights(&ctx, &e).unwrap();
            assert_eq!(w.weights, ex, "{kind:?} L={l} shot {s}");
            assert_eq!(w.error_class, error_class(&ctx.geometry, &e));
            let m = mwpm(&ctx, &syndrome(&ctx.geometry, &e)).unwrap();
            assert_eq!(m.weight, *ex.iter().min().unwrap());
        }
    }
}

#[test]
fn decoding_outcome_follows_class_weights() {
    let ctx = DecodingContext::new(GeometryKind::Planar, 5).unwrap();
    for s in 0..200 {
        let e = sample_error(ctx.geometry.n_qubits(), 0.1, s, 5);
        let w = class_resolved_weights(&ctx, &e).unwrap();
        let d = decode_shot(&ctx, &e).unwrap();
        let expected = match w.w_same().cmp(&w.w_opp()) {
            std::cmp::Ordering::Less => DecodeOutcome::Success,
            std::cmp::Ordering::Greater => DecodeOutcome::Failure,
            std::cmp::Ordering::Equal => DecodeOutcome::Tie,
        };
        assert_eq!(d.outcome, expected);
    }
}

#[test]
fn low_p_failure_rate_follows_polynomial() {
    // Planar L=3: P ≈ c p² with c the exhaustive leading coefficient.
    let poly = exact_failure_polynomial(GeometryKind::Planar, 3, 2).unwrap();
    let (order, c) = poly.leading().unwrap();
    assert_eq!(order, 2);
    let ctx = DecodingContext::new(GeometryKind::Planar, 3).unwrap();
    let p = 0.01;
    let s = run_failure_rate(&ctx, p, 200_000, 3).unwrap();
    let predicted = c * p * p;
    assert!(s.ci_low < predicted * 1.3 && s.ci_high > predicted * 0.8, "{s:?} vs {predicted}");
}
