//! Batch front end: task-file parsing, execution and reports.

mod expr;
mod lexer;
mod run;
mod taskfile;

pub use expr::{is_derivative_name, Expr, Scope};
pub use lexer::Diagnostic;
pub use run::{run, Report, RunOptions, TaskResult};
pub use taskfile::{fmt_task, parse_poly, parse_taskfile, Decl, Task, TaskFile, TaskSpec, OPERATIONS};
