//! Serde adapters: complex numbers travel as `{"re": .., "im": ..}` objects.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WireComplex {
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for WireComplex {
    fn from(z: Complex64) -> Self {
        WireComplex { re: z.re, im: z.im }
    }
}

impl From<WireComplex> for Complex64 {
    fn from(w: WireComplex) -> Self {
        Complex64::new(w.re, w.im)
    }
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        WireComplex::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        WireComplex::deserialize(d).map(Into::into)
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<WireComplex> = v.iter().map(|&z| z.into()).collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let wire = Vec::<WireComplex>::deserialize(d)?;
        Ok(wire.into_iter().map(Into::into).collect())
    }
}
