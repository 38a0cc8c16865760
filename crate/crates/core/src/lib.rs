//! Exact Drazin inverses over the rationals and prime fields.

pub mod cli;
pub mod decomp;
pub mod drazin;
pub mod error;
pub mod field;
pub mod finite;
pub mod linalg;
pub mod oracle;
pub mod pairs;

pub use drazin::{drazin_index, drazin_inverse, group_inverse, DrazinData, Route};
pub use error::{Error, Result};
pub use field::{FieldDescriptor, Scalar};
pub use linalg::Matrix;
