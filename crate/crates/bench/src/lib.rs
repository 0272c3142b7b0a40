//! Shared fixtures for the criterion benchmarks.

use priorcs::lab::{self, InstanceSpec};
use priorcs::model::{
    compute_cardinalities, compute_support_profile, CardinalityProfile, SignalPair, SupportProfile,
};

/// A mid-sized instance with its support profile, reused across benchmarks so
/// every timing sees identical data.
pub struct Fixture {
    pub spec: InstanceSpec,
    pub pair: SignalPair,
    pub profile: SupportProfile,
    pub card: CardinalityProfile,
}

pub fn fixture() -> Fixture {
    let spec = InstanceSpec::desk_scale(1);
    let pair = lab::gen_instance(&spec).expect("desk-scale preset is feasible");
    let profile = compute_support_profile(&pair, 0.0);
    let card = compute_cardinalities(&profile, spec.n);
    Fixture { spec, pair, profile, card }
}
