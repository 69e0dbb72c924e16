//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use oe_core::constructions::{Lemma2, Matcher, ReturnOracle};
use oe_core::spaces::stream_seed;
use oe_core::{Configuration, Coset, GroupSpec, Length, Word};

/// Every word of the ball of radius `r` in `F_2`.
pub fn f2_ball(r: u64) -> (GroupSpec, Vec<Word>) {
    let g = GroupSpec::free(&["a", "b"]).expect("free group");
    let ball = g.ball(r, &Length::Word, None).expect("ball");
    (g, ball)
}

/// The κ = 2 first-return instance at matcher radius 64.
pub fn lemma2() -> Lemma2 {
    Lemma2::new(2, Matcher { radius: 64 }, Arc::new(ReturnOracle { symbol: 0, radius: 64 })).expect("κ = 2")
}

pub fn w0_points(l2: &Lemma2, n: u64) -> Vec<Configuration<Coset>> {
    (0..n).map(|s| l2.sample_w0(stream_seed(7, s))).collect()
}
