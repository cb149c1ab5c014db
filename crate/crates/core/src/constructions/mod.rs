//! Special constructions: steep transitions, unit-mass bumps, the Douady
//! sawtooth, the retraction β, the δ-section γ and the isomorphism pair.

pub mod beta;
pub mod douady;
pub mod iso;
pub mod ladder;
pub mod psi;
pub mod section;

pub use beta::{beta_retraction, beta_term, beta_term_with_budget, BetaTerm};
pub use douady::{douady_sequence, douady_term, plateau, Douady};
pub use iso::{iso_forward, iso_inverse, IsoPair, ISO_FIT_EXPONENT};
pub use ladder::{smoothstep, ScaleLadder, WIDTH_REL_FLOOR};
pub use psi::{psi_bump, psi_with_budget, PsiBump};
pub use section::{
    beta_fit, delta_section, delta_section_unchecked, delta_section_with_tolerance, fit_tolerance,
    mean_zero_budget, mean_zero_correct, DeltaSection, SectionTerm, CLASSICAL_FIT_EXPONENT,
};
