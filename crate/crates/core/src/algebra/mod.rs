//! Arithmetic substrate: exact rationals, the biquadratic tower, complex
//! floats, dense and polynomial matrices, and binary forms.

pub mod biquad;
pub mod binary_form;
pub mod field;
pub mod matrix;
pub mod numeric;
pub mod poly;

pub use biquad::{Biquad, Radicands};
pub use binary_form::{binary_form_roots, interpolate_binary_form, BinaryForm, ProjParam};
pub use field::{ExactField, Field, Mode, Rational};
pub use matrix::{nullspace_exact, nullspace_naive, Matrix};
pub use poly::{Poly, PolyMatrix, PolyVec};
