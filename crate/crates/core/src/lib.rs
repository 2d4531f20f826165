pub mod algebraic;
pub mod automata;
pub mod beta;
pub mod christol;
pub mod corpus;
pub mod error;
pub mod expand;
pub mod expr;
pub mod field;
pub mod linalg;
pub mod padic;
pub mod pialgebra;
pub mod poly;
pub mod ratfunc;
pub mod residue;
pub mod series;
pub mod stream;

pub use algebraic::{hensel_root, AlgebraicSpec, BiPoly};
pub use error::{Error, Result};
pub use field::{Field, FieldDesc, Fq};
pub use poly::{Degree, Poly};
pub use ratfunc::{RatFunc, Val};
pub use stream::{LaurentStream, Orientation};
