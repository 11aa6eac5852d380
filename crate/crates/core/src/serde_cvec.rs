//! `ComplexVec3` as `{"re": [x, y, z], "im": [x, y, z]}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ComplexVec3;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Repr {
    re: [f64; 3],
    #[serde(default)]
    im: [f64; 3],
}

pub fn serialize<S: Serializer>(v: &ComplexVec3, s: S) -> Result<S::Ok, S::Error> {
    Repr {
        re: [v.x.re, v.y.re, v.z.re],
        im: [v.x.im, v.y.im, v.z.im],
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexVec3, D::Error> {
    let r = Repr::deserialize(d)?;
    Ok(ComplexVec3::from_fn(|i, _| Complex64::new(r.re[i], r.im[i])))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<ComplexVec3>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ComplexVec3>, D::Error> {
        Ok(Option::<Repr>::deserialize(d)?
            .map(|r| ComplexVec3::from_fn(|i, _| Complex64::new(r.re[i], r.im[i]))))
    }
}
