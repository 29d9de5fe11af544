//! JSON encoding for arbitrary-size counts: plain numbers while they fit in
//! `u64`, decimal strings beyond that. Both forms are accepted on input.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum Count {
    Num(u64),
    Text(String),
}

impl From<&BigUint> for Count {
    fn from(v: &BigUint) -> Self {
        match u64::try_from(v) {
            Ok(n) => Count::Num(n),
            Err(_) => Count::Text(v.to_string()),
        }
    }
}

impl Count {
    pub(crate) fn into_big(self) -> Result<BigUint, String> {
        match self {
            Count::Num(n) => Ok(BigUint::from(n)),
            Count::Text(s) => s
                .trim()
                .parse::<BigUint>()
                .map_err(|_| format!("not a nonnegative integer: {s:?}")),
        }
    }
}

pub(crate) mod opt_biguint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(Count::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<Count>::deserialize(d)?
            .map(Count::into_big)
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

pub(crate) mod vec_biguint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(Count::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<Count>::deserialize(d)?
            .into_iter()
            .map(Count::into_big)
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}
