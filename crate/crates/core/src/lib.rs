//! Sequence annotation with hidden Markov models under explicit gain
//! functions.
//!
//! Three decoders share one labeled-HMM model ([`model::Hmm`]):
//!
//! - Viterbi, the single most probable state path;
//! - posterior decoding, the most probable color at every position;
//! - boundary-tolerant maximum expected gain decoding ([`herd`]), which
//!   rewards each predicted feature boundary that has a matching true
//!   boundary within `W` positions and charges `gamma` for each that does not.
//!
//! Supporting modules build jumping profile HMMs from subtype alignments
//! ([`jphmm`]), simulate recombinant queries with known truth ([`simgen`]),
//! score predictions ([`evalkit`]) and compare decoders over parameter grids
//! ([`bench`]).
//!
//! ```
//! use gainhmm::fixtures::t1;
//! use gainhmm::herd::{herd_decode, GainParams};
//!
//! let hmm = t1();
//! let obs = hmm.encode("xy").unwrap();
//! let decoded = herd_decode(&hmm, &obs, &GainParams::new(0, 0.2, 0.0).unwrap()).unwrap();
//! assert_eq!(decoded.annotation.colors(), &[0, 1]);
//! ```

pub mod annotation;
pub mod bench;
pub mod cli;
pub mod error;
pub mod evalkit;
pub mod fixtures;
pub mod herd;
pub mod inference;
pub mod io;
pub mod jphmm;
pub mod model;
pub mod simgen;

pub use annotation::{Annotation, Boundary, Segment};
pub use error::{Error, Result};
pub use herd::{herd_decode, GainParams};
pub use inference::{forward_backward, posterior_decode, viterbi_decode, PosteriorSet};
pub use model::{build_hmm, color_graph, ColorGraph, Hmm};
