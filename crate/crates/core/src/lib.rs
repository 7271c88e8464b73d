//! Exact sums-of-squares representations by descent, with checkable traces.

pub mod arith;
pub mod cli;
pub mod congruence;
pub mod descent;
pub mod error;
pub mod identities;
pub mod oracle;
pub mod pipeline;

pub use arith::Budget;
pub use descent::{verify_trace, DescentTrace, Form, FormRep, QuadRep, SeedMultiple, Verdict};
pub use error::{Error, Result};
pub use identities::FormKind;
