use std::collections::BTreeMap;

use proptest::prelude::*;
use susyode::dsl::parse_system;
use susyode::solve::{expand_to_layers, integrate};
use susyode::{AlgebraCtx, Multivector, Word};

const SQUARE: &str = "[variables]\nx : even\n\n[equations]\ndt(x) = x^2\n";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grassmann_rk4_matches_closed_form(
        body in -1.0f64..0.5,
        soul in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let ctx = AlgebraCtx::new(4).unwrap();
        let file = parse_system(SQUARE).unwrap();
        let built = file.build().unwrap();
        let assignment = file.assignment(&built, ctx).unwrap();
        let layer = expand_to_layers(&built.system, &assignment).unwrap();
        let evens: Vec<Word> = ctx.words_of_parity(susyode::Parity::Even).into_iter().filter(|w| !w.is_empty()).collect();
        let x0 = Multivector::from_terms(
            ctx,
            std::iter::once((Word::EMPTY, body)).chain(evens.iter().copied().zip(soul.iter().copied())),
        );
        let x = built.system.variables()[0].clone();
        let init = layer.state_from(&BTreeMap::from([(x.clone(), x0.clone())])).unwrap();
        let t = 0.5;
        let traj = integrate(&layer, &init, 0.0, t, 1e-3).unwrap();
        let got = layer.values_at(traj.last())[&x].clone();
        // x(t) = x0 (1 - t x0)^-1
        let denom = Multivector::one(ctx).sub(&x0.scale(&t)).unwrap();
        let exact = x0.product(&denom.inverse().unwrap()).unwrap();
        prop_assert!(got.max_abs_diff(&exact) < 1e-8, "deviation {}", got.max_abs_diff(&exact));
    }
}
