//! Erdős–Selfridge weights and the closed-form winner criteria.
//!
//! An edge not touched by Breaker weighs `2^(|X∩h| − |h|)`, an edge Breaker
//! touched weighs 0. A vertex weighs the sum of its edges, and the score of a
//! state is the sum over all edges. All arithmetic is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::designs::DesignParams;
use crate::error::{Error, Result};
use crate::hypergraph::{GameState, Hypergraph, Side};

/// A dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    num: u128,
    exp: u32,
}

impl Weight {
    pub const ZERO: Weight = Weight { num: 0, exp: 0 };
    pub const ONE: Weight = Weight { num: 1, exp: 0 };

    pub fn new(num: u128, exp: u32) -> Self {
        let mut w = Weight { num, exp };
        if w.num == 0 {
            w.exp = 0;
        }
        while w.exp > 0 && w.num.is_multiple_of(2) {
            w.num /= 2;
            w.exp -= 1;
        }
        w
    }

    /// `2^-e`.
    pub fn inverse_power(e: u32) -> Self {
        Weight { num: 1, exp: e }
    }

    pub fn numerator(self) -> u128 {
        self.num
    }

    pub fn denominator_exp(self) -> u32 {
        self.exp
    }

    /// `self · 2^e`, as an integer when that is exact.
    pub fn scaled(self, e: u32) -> Option<u128> {
        (e >= self.exp).then(|| self.num << (e - self.exp))
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        let e = self.exp.max(rhs.exp);
        Weight::new((self.num << (e - self.exp)) + (rhs.num << (e - rhs.exp)), e)
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, |a, b| a + b)
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        (self.num << (e - self.exp)).cmp(&(other.num << (e - other.exp)))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

/// Weight of edge `i` from `side`'s point of view (`side` plays the Maker role).
pub fn edge_weight_for(h: &Hypergraph, state: &GameState, side: Side, i: usize) -> Weight {
    let e = h.edge(i);
    if !e.is_disjoint(state.owned(side.other())) {
        return Weight::ZERO;
    }
    Weight::inverse_power(e.difference(state.owned(side)).len() as u32)
}

/// Weight of edge `i` for Maker / Xeno.
pub fn edge_weight(h: &Hypergraph, state: &GameState, i: usize) -> Weight {
    edge_weight_for(h, state, Side::First, i)
}

/// Sum of the weights of the edges through `v`, from `side`'s point of view.
pub fn vertex_weight_for(h: &Hypergraph, state: &GameState, side: Side, v: usize) -> Weight {
    (0..h.edge_count()).filter(|&i| h.edge(i).contains(v)).map(|i| edge_weight_for(h, state, side, i)).sum()
}

pub fn vertex_weight(h: &Hypergraph, state: &GameState, v: usize) -> Weight {
    vertex_weight_for(h, state, Side::First, v)
}

/// Score of the state for Maker / Xeno.
pub fn total_score(h: &Hypergraph, state: &GameState) -> Weight {
    (0..h.edge_count()).map(|i| edge_weight(h, state, i)).sum()
}

/// Incrementally maintained score, scaled by `2^K` for `K` the largest edge size.
#[derive(Clone, Debug)]
pub struct ScoreTracker {
    scale: u32,
    sizes: Vec<u32>,
    first_count: Vec<u32>,
    second_count: Vec<u32>,
    incidence: Vec<Vec<usize>>,
    total: u128,
}

impl ScoreTracker {
    pub fn new(h: &Hypergraph, state: &GameState) -> Self {
        let scale = h.max_edge_size() as u32;
        let mut incidence = vec![Vec::new(); h.vertex_count()];
        for (i, e) in h.edges().iter().enumerate() {
            for v in e.iter() {
                incidence[v].push(i);
            }
        }
        let mut t = ScoreTracker {
            scale,
            sizes: h.edges().iter().map(|e| e.len() as u32).collect(),
            first_count: h.edges().iter().map(|e| e.intersection(state.first).len() as u32).collect(),
            second_count: h.edges().iter().map(|e| e.intersection(state.second).len() as u32).collect(),
            incidence,
            total: 0,
        };
        t.total = (0..h.edge_count()).map(|i| t.scaled_edge(i)).sum();
        t
    }

    fn scaled_edge(&self, i: usize) -> u128 {
        if self.second_count[i] > 0 {
            0
        } else {
            1u128 << (self.scale - (self.sizes[i] - self.first_count[i]))
        }
    }

    fn update(&mut self, v: usize, side: Side, delta: i32) {
        for idx in 0..self.incidence[v].len() {
            let i = self.incidence[v][idx];
            self.total -= self.scaled_edge(i);
            let c = match side {
                Side::First => &mut self.first_count[i],
                Side::Second => &mut self.second_count[i],
            };
            *c = c.checked_add_signed(delta).expect("count underflow");
            self.total += self.scaled_edge(i);
        }
    }

    pub fn play(&mut self, side: Side, v: usize) {
        self.update(v, side, 1);
    }

    pub fn undo(&mut self, side: Side, v: usize) {
        self.update(v, side, -1);
    }

    pub fn score(&self) -> Weight {
        Weight::new(self.total, self.scale)
    }

    /// Score times `2^K`.
    pub fn scaled_score(&self) -> u128 {
        self.total
    }
}

/// Which player a criterion predicts will win the Maker-Breaker game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Maker,
    Breaker,
    Inconclusive,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Prediction::Maker => "Maker",
            Prediction::Breaker => "Breaker",
            Prediction::Inconclusive => "Inconclusive",
        })
    }
}

/// A criterion's instantiated inequalities and what they imply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: String,
    pub predicted: Prediction,
    /// Each inequality with its numbers filled in, and whether it holds.
    pub checks: Vec<(String, bool)>,
    /// Why the criterion did not apply, if it did not.
    pub reason: Option<String>,
}

impl CriterionVerdict {
    fn refused(criterion: &str, reason: String) -> Self {
        CriterionVerdict {
            criterion: criterion.into(),
            predicted: Prediction::Inconclusive,
            checks: Vec::new(),
            reason: Some(reason),
        }
    }

    fn decide(criterion: &str, maker: Option<(String, bool)>, breaker: Option<(String, bool)>) -> Self {
        let m = maker.as_ref().is_some_and(|c| c.1);
        let b = breaker.as_ref().is_some_and(|c| c.1);
        let predicted = match (m, b) {
            (true, false) => Prediction::Maker,
            (false, true) => Prediction::Breaker,
            _ => Prediction::Inconclusive,
        };
        CriterionVerdict {
            criterion: criterion.into(),
            predicted,
            checks: maker.into_iter().chain(breaker).collect(),
            reason: (m && b).then(|| "both inequalities hold".to_string()),
        }
    }

    /// The checks joined into one line.
    pub fn inequality(&self) -> String {
        if self.checks.is_empty() {
            return self.reason.clone().unwrap_or_default();
        }
        self.checks
            .iter()
            .map(|(s, ok)| format!("{s} [{}]", if *ok { "holds" } else { "fails" }))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn pow2(e: usize) -> Result<u128> {
    if e > 100 {
        return Err(Error::InvalidParameters(format!("exponent {e} too large")));
    }
    Ok(1u128 << e)
}

fn uniform_linear(h: &Hypergraph) -> std::result::Result<usize, String> {
    let k = h.uniformity().ok_or_else(|| "hypergraph is not uniform".to_string())?;
    if !h.is_linear() {
        return Err("hypergraph is not linear".into());
    }
    Ok(k)
}

/// Breaker wins a k-uniform linear game if `2^k > |E| + Δ`.
pub fn es_breaker_criterion(h: &Hypergraph) -> CriterionVerdict {
    const NAME: &str = "erdos-selfridge";
    let k = match uniform_linear(h) {
        Ok(k) => k,
        Err(r) => return CriterionVerdict::refused(NAME, r),
    };
    let Ok(lhs) = pow2(k) else {
        return CriterionVerdict::refused(NAME, "edge size too large".into());
    };
    let (e, d) = (h.edge_count() as u128, h.max_degree() as u128);
    let check = (format!("2^k > |E| + maxdeg: {lhs} > {e} + {d}"), lhs > e + d);
    CriterionVerdict::decide(NAME, None, Some(check))
}

/// Maker wins a k-uniform linear game if `2^(k−3)|V| < |E|`.
pub fn beck_maker_criterion(h: &Hypergraph) -> CriterionVerdict {
    const NAME: &str = "beck";
    let k = match uniform_linear(h) {
        Ok(k) => k,
        Err(r) => return CriterionVerdict::refused(NAME, r),
    };
    let Ok(p) = pow2(k) else {
        return CriterionVerdict::refused(NAME, "edge size too large".into());
    };
    let (v, e) = (h.vertex_count() as u128, h.edge_count() as u128);
    let text = if k >= 3 {
        format!("2^(k-3)|V| < |E|: {} < {e}", (p / 8) * v)
    } else {
        format!("2^(k-3)|V| < |E|: {v}/{} < {e}", 8 / p)
    };
    CriterionVerdict::decide(NAME, Some((text, p * v < 8 * e)), None)
}

/// Bounds for a BIBD(v, k, 1): Maker if `v > k(k−1)2^(k−3) + 1`, Breaker if
/// `v < (−k + 1 + √((k+1)² + k(k−1)2^(k+2)))/2`.
pub fn bibd_mb_bounds(v: usize, k: usize) -> Result<CriterionVerdict> {
    let params = DesignParams::new(v, k, 1)?;
    if !params.is_admissible() {
        return Err(Error::InvalidParameters(format!("({v},{k},1) is not admissible")));
    }
    let p = pow2(k)?;
    let (v, k) = (v as u128, k as u128);
    let maker_bound = k * (k - 1) * p; // 8·(k(k−1)2^(k−3))
    let maker = (format!("v > k(k-1)2^(k-3) + 1: 8*{} > {maker_bound}", v - 1), 8 * (v - 1) > maker_bound);
    let disc = (k + 1) * (k + 1) + k * (k - 1) * 4 * p;
    let lhs = 2 * v + k - 1;
    let breaker = (format!("(2v+k-1)^2 < (k+1)^2 + k(k-1)2^(k+2): {} < {disc}", lhs * lhs), lhs * lhs < disc);
    Ok(CriterionVerdict::decide("bibd-bounds", Some(maker), Some(breaker)))
}

/// Bounds for a TD(k, n): Breaker if `2^k > n(n+1)`, Maker if `n > k·2^(k−3)`.
pub fn td_mb_bounds(k: usize, n: usize) -> Result<CriterionVerdict> {
    if k < 2 || n < 1 {
        return Err(Error::InvalidParameters(format!("TD({k},{n}) needs k >= 2 and n >= 1")));
    }
    let p = pow2(k)?;
    let (kk, nn) = (k as u128, n as u128);
    let maker = (format!("n > k*2^(k-3): 8*{nn} > {kk}*{p}"), 8 * nn > kk * p);
    let breaker = (format!("2^k > n(n+1): {p} > {}", nn * (nn + 1)), p > nn * (nn + 1));
    Ok(CriterionVerdict::decide("td-bounds", Some(maker), Some(breaker)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{make_sts, make_td, td_to_projective};
    use crate::hypergraph::{tic_tac_toe_board, VertexSet};

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn weight_arithmetic() {
        let w = Weight::inverse_power(3) + Weight::inverse_power(3);
        assert_eq!(w, Weight::inverse_power(2));
        assert_eq!(w.to_string(), "1/4");
        assert!(Weight::new(5, 3) > Weight::inverse_power(1));
        assert_eq!(Weight::new(8, 3), Weight::ONE);
        assert_eq!(Weight::new(0, 5), Weight::ZERO);
    }

    #[test]
    fn empty_sts7_score() {
        let h = make_sts(7).unwrap().to_hypergraph().unwrap();
        assert_eq!(total_score(&h, &GameState::empty()), Weight::new(7, 3));
    }

    #[test]
    fn finished_line_scores_one() {
        // X = {1,9,7,4}, O = {5,3,8}
        let h = tic_tac_toe_board();
        let state = GameState::from_sets(set(&[0, 8, 6, 3]), set(&[4, 2, 7])).unwrap();
        assert_eq!(total_score(&h, &state), Weight::ONE);
    }

    #[test]
    fn breaker_touched_edge_is_zero() {
        let h = tic_tac_toe_board();
        let state = GameState::from_sets(set(&[0]), set(&[1])).unwrap();
        assert_eq!(edge_weight(&h, &state, 0), Weight::ZERO);
        assert_eq!(edge_weight(&h, &state, 3), Weight::inverse_power(2));
    }

    #[test]
    fn tracker_matches_recompute() {
        let h = tic_tac_toe_board();
        let mut state = GameState::empty();
        let mut t = ScoreTracker::new(&h, &state);
        for (i, v) in [4, 0, 8, 2, 6].into_iter().enumerate() {
            let side = if i % 2 == 0 { Side::First } else { Side::Second };
            t.play(side, v);
            state = state.play(side, v, &Default::default());
            assert_eq!(t.score(), total_score(&h, &state));
        }
        t.undo(Side::First, 6);
        t.undo(Side::Second, 2);
        let back = GameState::from_sets(set(&[4, 8]), set(&[0])).unwrap();
        assert_eq!(t.score(), total_score(&h, &back));
    }

    #[test]
    fn es_examples() {
        let sts7 = make_sts(7).unwrap().to_hypergraph().unwrap();
        assert_eq!(es_breaker_criterion(&sts7).predicted, Prediction::Inconclusive);
        let td43 = make_td(4, 3).unwrap().to_hypergraph(&[]).unwrap();
        assert_eq!(es_breaker_criterion(&td43).predicted, Prediction::Breaker);
        let pi3 = td_to_projective(&make_td(4, 3).unwrap()).unwrap().to_hypergraph().unwrap();
        assert_eq!(es_breaker_criterion(&pi3).predicted, Prediction::Inconclusive);
        let nonuniform = crate::hypergraph::fixture_h(5).unwrap();
        assert!(es_breaker_criterion(&nonuniform).reason.is_some());
    }

    #[test]
    fn beck_examples() {
        let sts9 = make_sts(9).unwrap().to_hypergraph().unwrap();
        assert_eq!(beck_maker_criterion(&sts9).predicted, Prediction::Maker);
        let sts7 = make_sts(7).unwrap().to_hypergraph().unwrap();
        assert_eq!(beck_maker_criterion(&sts7).predicted, Prediction::Inconclusive);
    }

    #[test]
    fn closed_form_bounds() {
        assert_eq!(bibd_mb_bounds(4, 4).unwrap().predicted, Prediction::Breaker);
        assert_eq!(bibd_mb_bounds(16, 4).unwrap().predicted, Prediction::Inconclusive);
        assert_eq!(bibd_mb_bounds(13, 4).unwrap().predicted, Prediction::Inconclusive);
        assert_eq!(bibd_mb_bounds(9, 3).unwrap().predicted, Prediction::Maker);
        assert!(bibd_mb_bounds(14, 4).is_err());
        assert_eq!(td_mb_bounds(4, 3).unwrap().predicted, Prediction::Breaker);
        assert_eq!(td_mb_bounds(4, 4).unwrap().predicted, Prediction::Inconclusive);
        assert_eq!(td_mb_bounds(3, 4).unwrap().predicted, Prediction::Maker);
        assert_eq!(td_mb_bounds(4, 9).unwrap().predicted, Prediction::Maker);
    }
}
