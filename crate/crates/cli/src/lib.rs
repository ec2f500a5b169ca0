//! Library surface of the command-line tool: JSON schemas, subcommand
//! implementations, and the exit-code contract. The binary in `main.rs` is a
//! thin clap wrapper over these functions.

pub mod commands;
pub mod error;
pub mod schema;

pub use commands::{
    analyze_document, cmd_analyze, cmd_decompose, cmd_numrange, cmd_synthesize, cmd_verify,
    decompose_document, load_map_document, load_problem, numrange_document, synthesize_document,
    verify_document,
};
pub use error::{CliError, CliResult};
pub use schema::{
    ConfigDocument, MapDocument, MatrixDoc, ProblemDocument, RealMatrixDoc, ReportDocument,
    SquareMatrixDoc, TransferMatrixDoc,
};
