//! Source-code plagiarism detection for programming courses.
//!
//! Submissions are lexed into normalized symbol streams, turned into TF-IDF
//! vectors over symbol n-grams, and compared pairwise. Each pair is scored
//! with three cosine similarities (student vs student, each student vs the
//! instructor template) and classified by a random forest. Flagged pairs can
//! be rendered as side-by-side HTML with the overlapping code highlighted.

pub mod corpus;
pub mod error;
pub mod evidence;
pub mod exec;
pub mod features;
pub mod forest;
pub mod lexer;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod vectorspace;

pub use error::{Error, Result};
pub use exec::Execution;
pub use features::PairFeatures;
pub use lexer::{NormalizationProfile, NormalizedStream, SourceFile};
