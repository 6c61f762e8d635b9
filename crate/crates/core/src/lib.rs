//! Escrow protocols as optics over finite sets.
//!
//! The base category is finite sets with cartesian product ([`object`],
//! [`map`], [`algebra`]). On top of it sit optics and their lens normal
//! form ([`optic`]), escrows with diamond composition and the escrow monoid
//! ([`escrow`]), the escrow action and partial Vermittler map
//! ([`vermittler`]), settlement traces ([`trade`]) and exhaustive law
//! suites ([`laws`]).

pub mod algebra;
pub mod error;
pub mod escrow;
pub mod laws;
pub mod map;
pub mod object;
pub mod optic;
pub mod trade;
pub mod vermittler;

pub use algebra::{
    check_module, check_monoid, convolve, make_comodule, ComoduleStr, ComonoidStr, ModuleStr,
    ModuleViolation, MonoidStr, MonoidViolation,
};
pub use error::{Error, Result};
pub use escrow::{diamond, emon_product, emon_unit, escrow_shape, nu, Escrow, EscrowMonoidCtx};
pub use map::{
    compose, diagonal, discard, enumerate_maps, symmetry, tensor_map, FinMap,
    DEFAULT_ENUMERATION_CAP,
};
pub use object::{AtomObj, Elem, TensorObj};
pub use optic::{optic_eq, seq_compose, tensor_strength, Lens, Optic, OpticShape, Side, SlideSpan};
pub use trade::{
    chain_escrows, compare_failure_modes, run, run_greedy, run_kind, run_mediated, Event,
    FailureReport, Named, Scenario, SettlementTrace, Topology, Witness,
};
pub use vermittler::{
    alpha_tilde, beta_tilde, escrow_act, unit_counit_restriction, vermittler_act,
    vermittler_fill_law, FillLawViolation, Vermittler, VermittlerCtx,
};
