//! The seed system and the self-grafting construction.

mod graft;
mod lift;
mod seed;
mod state;

pub use graft::{fundamental_check, generate, generate_from, graft_step, FundamentalCheck};
pub use lift::{lift_system, LiftSpec};
pub use seed::{
    build_seed, default_seed, leaf_period, load_seed, seed_spec, validate_state, SEED_CYCLE_PERIOD,
    SEED_DEGREE, SEED_JSON, SEED_NOTE,
};
pub use state::{Branch, GraftInfo, GraftState, Provenance, Roles};
