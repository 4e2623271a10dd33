//! Core library for one-dimensional cellular automata and the subshifts that
//! describe their long-run typical behaviour.
//!
//! The crate provides exact finite-horizon computations (spacetime diagrams,
//! images of cylinder sets, enabling and forcing word checks), decision
//! procedures on subshifts of finite type (transitivity, mixing, periods,
//! chain components, periodic-factor obstructions), and a compiler that turns
//! a Turing machine into a radius-3 signal automaton whose typical orbits
//! stage a bounded-initialization computation.
//!
//! Everything here is `no_std + alloc`; IO and file formats live in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alphabet;
pub mod config;
pub mod engine;
pub mod error;
pub mod lab;
pub mod rule;
pub mod sample;
pub mod signal;
pub mod subshift;
pub mod tm;

pub use alphabet::{Alphabet, Sym};
pub use config::{Configuration, Cylinder};
pub use engine::SpacetimeDiagram;
pub use error::{Error, Result};
pub use lab::{
    check_enables, estimate_generic_language, realizability_report, restriction_classifier,
    search_forcing_word, AnalysisReport, Bounds, CertKind, Certificate, Classification,
    ClassificationCert, ContextEvidence, EnablingCert, EnablingVerdict, ForcingCert,
    ForcingOutcome, Kill, PowerNeighborhood, Refutation, ReportInput, ReportLine,
};
pub use rule::LocalRule;
pub use sample::LanguageSample;
pub use signal::{
    compile_signal_ca, conservation_scan, expected_events, verify_geometry, w_hat,
    ScanReport, SignalCaAlphabet, SignalRule, SpaceTimeEvent, Track0,
};
pub use subshift::{
    is_chain_transitive, sft_approximation, ChainTransitivity, ComponentMap,
    ComponentPartition, Obstruction, ObstructionVerdict, Sft,
};
pub use tm::{PredicateProgram, TuringMachine};
