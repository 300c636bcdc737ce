//! Numerical toolkit for holomorphic Legendrian approximation on planar
//! admissible sets.
//!
//! The crate follows the approximation pipeline end to end in a flat model:
//! an admissible set `S ⊂ ℂ` (islands plus attached arcs), a contact form given
//! in coordinates on the tube `S × ρB^{2n}`, and the Legendrian axis
//! `S × {0}`. The stages are
//!
//! * [`geometry`]: admissible sets, piecewise-smooth curves and their samples;
//! * [`homology`]: the connected Runge homology basis (islands and bridges) and
//!   the interpolation curve family, certified by raster flood fill;
//! * [`contact`]: contact forms, the contact and isotropy checks, matrix
//!   completion, the Arens identity, tube extension and the partial normal form;
//! * [`approx`]: contour integrals, rational least-squares approximation and the
//!   period-normalised spray;
//! * [`ode`]: integration of `dw = V(p, w, t) dz` along curves and over
//!   rectangles, periods, the period map and the Grönwall bound;
//! * [`solver`]: the identity-proximity degree certificate and the period solve;
//! * [`pipeline`]: the assembled pipeline, fixtures and reports.

pub mod approx;
pub mod contact;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod homology;
pub mod ode;
pub mod pipeline;
pub mod quad;
pub mod raster;
pub mod solver;

pub use num_complex::Complex64 as C64;

/// `C64` constructor shorthand.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Serialises complex numbers as `[re, im]` pairs.
pub mod complex_serde {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }

    pub mod vec {
        use super::C64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            let pairs = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
        }
    }
}
