pub mod cells;
pub mod cli;
pub mod error;
pub mod formula;
pub mod models;
pub mod oracle;
pub mod qe;
pub mod saturation;
pub mod sizesets;

pub use error::{Error, Result};
pub use formula::{Formula, Term, TheoryMode};
