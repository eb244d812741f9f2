//! Finite-field arithmetic, Kloosterman angles over F_q(T) and the statistics
//! used to test their equidistribution.

pub mod census;
pub mod equidist;
pub mod error;
pub mod galois;
pub mod kloosterman;
pub mod places;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use galois::{ExtFieldCtx, FieldSpec, Fq};
pub use kloosterman::{angle_table, AngleSample, AngleTable};
pub use places::{PlaceFilter, ResidueClass, ShortInterval};
pub use poly::{Poly, PolyRing};
pub use rational::{support, PlaceRef, RationalFn, Support};
