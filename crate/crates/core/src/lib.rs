//! Solver for a generalized principal–agent contract game.
//!
//! The principal offers a wage vector over a finite set of outcomes, the
//! agent picks an effort level, and nature draws the outcome from an
//! effort-dependent profile. The agent's payment expectation
//! `E(e) = Σ p_i(e)·u(w_i) − v(e)`, its first derivative (motivation) and
//! second derivative (persistence) drive the best response and the
//! contract-dependent risk posture; the principal's move is solved by
//! backward induction over a finite contract family.

pub mod agent;
pub mod analyses;
pub mod cli;
pub mod config;
pub mod curve;
pub mod document;
pub mod error;
pub mod model;
pub mod oracle;
pub mod principal;
pub mod report;
pub mod search;

pub use agent::{
    agent_best_response, agent_expectation, classify_risk, motivation, persistence, transience,
    BestResponse, Maximizer, MaximizerKind, RiskClass, RiskClassification,
};
pub use config::{SolverConfig, TieBreak};
pub use curve::Curve;
pub use error::{Error, Result, ValidationErrors};
pub use model::{
    AgentPreferences, Contract, EffortInterval, EffortProfile, OutcomeSet, PrincipalPreferences,
    Scenario,
};
pub use principal::{principal_expectation, solve_game, ContractFamily, GameSolution};
