use std::collections::BTreeSet;

use proptest::prelude::*;

use m3_core::rdf::{Graph, Triple};
use m3_testkit as tk;
use tk::checks;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        ..ProptestConfig::default()
    }
}

fn holds(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn serializations_round_trip(g in tk::graph(200)) {
        holds(checks::round_trip_case(&g))?;
    }

    #[test]
    fn reasoners_agree_with_oracle(g in tk::ground_graph(50), rules in tk::ruleset(10)) {
        holds(checks::reasoners_agree(&g, &rules))?;
    }

    #[test]
    fn closure_is_order_independent(
        g in tk::ground_graph(50),
        rules in tk::ruleset(10),
        seed in any::<u64>(),
    ) {
        holds(checks::closure_order_independent(&g, &rules, seed))?;
    }

    #[test]
    fn closure_is_monotone_and_idempotent(
        g in tk::ground_graph(40),
        extra in tk::ground_graph(10),
        rules in tk::ruleset(10),
    ) {
        holds(checks::closure_monotone(&g, &extra, &rules))?;
    }

    #[test]
    fn query_matches_oracle(g in tk::dense_graph(40), q in tk::query(4)) {
        holds(checks::query_case(&q, &g))?;
    }

    #[test]
    fn graph_indexes_agree(ts in proptest::collection::vec(tk::triple(), 0..80)) {
        let g: Graph = ts.iter().cloned().collect();
        prop_assert!(g.indexes_consistent());
        let uniq: BTreeSet<Triple> = ts.into_iter().collect();
        prop_assert_eq!(g.len(), uniq.len());
        for t in &uniq {
            prop_assert_eq!(g.match_pattern(Some(t.subject()), None, None).count(), uniq.iter().filter(|u| u.subject() == t.subject()).count());
            prop_assert_eq!(g.match_pattern(None, Some(t.predicate()), Some(t.object())).count(),
                uniq.iter().filter(|u| u.predicate() == t.predicate() && u.object() == t.object()).count());
        }
    }
}
