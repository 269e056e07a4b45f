//! Numerical toolkit for classes of analytic functions starlike or convex
//! with respect to n-ply symmetric, conjugate, and symmetric-conjugate
//! points.
//!
//! The crate provides:
//!
//! - [`series`]: truncated complex power-series arithmetic, the substrate for
//!   every analytic object handled here;
//! - [`operators`]: weighted tuple combination, n-ply symmetrization,
//!   point-symmetry part extractors, Alexander transforms, and the
//!   generalized Koebe series;
//! - [`targets`]: convex univalent target regions with signed containment
//!   margins;
//! - [`classes`]: subordination-margin membership predicates for the ten
//!   function classes;
//! - [`generators`]: seeded, certified samplers for every hypothesis class;
//! - [`harness`]: randomized property checks mapping each inclusion and
//!   convolution theorem to a margin report;
//! - [`io`]: JSON readers and writers for the file formats.

pub mod classes;
pub mod generators;
pub mod harness;
pub mod io;
pub mod operators;
pub mod series;
pub mod targets;

/// Serializes a complex number as the two-element array `[re, im]`.
pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        (c.re, c.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
