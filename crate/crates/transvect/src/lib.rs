//! Transvection graphs, classification and word synthesis for SL, Sp and SU
//! over finite fields of odd order.

pub mod classify;
pub mod error;
pub mod geom;
pub mod gf;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod trans;

pub use error::{Error, Result};
pub use geom::{Form, FormKind, Mat, Vector};
pub use gf::{Fe, Field, Subfield};
pub use trans::{Family, GroupSpec, Transvection};
