mod common;

use common::*;
use design_games::hypergraph::{tic_tac_toe_board, GameState, GameVariant, Side, TurnSchedule};
use design_games::solver::{solve, SolverConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_oracle(case in hypergraph_and_state()) {
        prop_matches_oracle(case)?;
    }

    #[test]
    fn solver_matches_oracle_under_schedules(h in small_hypergraph(), prefix in "[XO]{0,3}") {
        let schedule = TurnSchedule::parse(&prefix).unwrap();
        let start = GameState::scheduled(Default::default(), Default::default(), &schedule);
        for variant in [GameVariant::Strong, GameVariant::MakerBreaker] {
            let got = solve(&h, variant, &start, Some(&schedule), &SolverConfig::default()).unwrap().value;
            prop_assert_eq!(got, oracle_value(&h, variant, &start, Some(&schedule)));
        }
    }

    #[test]
    fn reduction_after_two_moves(case in hypergraph_and_pair()) {
        prop_lemma_reduction(case)?;
    }

    #[test]
    fn disjoint_union_of_breaker_wins(a in small_hypergraph(), b in small_hypergraph()) {
        prop_disjoint_union((a, b))?;
    }

    #[test]
    fn relabeling_preserves_values(case in hypergraph_and_permutation()) {
        prop_permutation_invariance(case)?;
    }

    #[test]
    fn second_player_never_wins_strong(h in small_hypergraph()) {
        prop_strategy_stealing(h)?;
    }

    #[test]
    fn memo_matches_plain_search(case in hypergraph_and_state()) {
        prop_memo_matches_plain(case)?;
    }

    #[test]
    fn criteria_agree_with_solver(h in uniform_hypergraph()) {
        prop_criterion_soundness(h)?;
    }

    #[test]
    fn weights_double_or_vanish(
        case in hypergraph_and_state(),
        pick in any::<prop::sample::Index>(),
        maker in any::<bool>(),
    ) {
        prop_weight_transition(case, pick, if maker { Side::First } else { Side::Second })?;
    }

    #[test]
    fn max_weight_breaker_keeps_score_down(case in hypergraph_and_state()) {
        prop_es_monotone(case)?;
    }
}

#[test]
fn oracle_knows_tic_tac_toe() {
    let h = tic_tac_toe_board();
    let s = GameState::empty();
    assert_eq!(oracle_value(&h, GameVariant::Strong, &s, None), design_games::solver::GameValue::Draw);
    assert_eq!(oracle_value(&h, GameVariant::MakerBreaker, &s, None), design_games::solver::GameValue::MakerWin);
}
