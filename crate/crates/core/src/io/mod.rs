//! Problem files, reports, the example corpus, and the command-line
//! plumbing around them.

pub mod corpus;
pub mod report;
pub mod run;
pub mod schema;

pub use corpus::{corpus, dual_grid_statuses, emit_corpus, grid_csv, CorpusEntry, Manifest};
pub use report::{Report, Verdict, EXIT_INPUT_ERROR};
pub use run::{error_exit_code, run, Overrides};
pub use schema::{parse_problem, Payload, ProblemFile};
