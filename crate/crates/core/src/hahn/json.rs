//! JSON form of series: sorted term lists plus a cutoff marker, e.g.
//! `{"n":1,"terms":[{"exp":["1/2"],"coeff":"3"}],"trunc":["5"]}` where a
//! `null` cutoff means the series is exact.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::series::HahnSeries;
use super::HahnError;
use crate::exact::rat::{fmt_rat, parse_rat, Rat};
use crate::groupring::Exponent;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub n: usize,
    pub terms: Vec<SeriesTermJson>,
    pub trunc: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub exp: Vec<String>,
    pub coeff: String,
}

fn exp_strings(e: &Exponent) -> Vec<String> {
    e.coords().iter().map(fmt_rat).collect()
}

fn parse_exp(v: &[String], n: usize) -> Result<Exponent, HahnError> {
    if v.len() != n {
        return Err(HahnError::Json(format!("exponent has {} coordinates, expected {n}", v.len())));
    }
    let coords = v.iter().map(|s| parse_rat(s).map_err(|e| HahnError::Json(e.to_string()))).collect::<Result<Vec<Rat>, _>>()?;
    Ok(Exponent(coords))
}

impl HahnSeries {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            n: self.dim(),
            terms: self.terms().iter().map(|(e, c)| SeriesTermJson { exp: exp_strings(e), coeff: fmt_rat(c) }).collect(),
            trunc: self.trunc().map(exp_strings),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self, HahnError> {
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((parse_exp(&t.exp, j.n)?, parse_rat(&t.coeff).map_err(|e| HahnError::Json(e.to_string()))?)))
            .collect::<Result<Vec<_>, HahnError>>()?;
        let trunc = j.trunc.as_ref().map(|t| parse_exp(t, j.n)).transpose()?;
        HahnSeries::from_terms(j.n, terms, trunc)
    }
}

impl Serialize for HahnSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HahnSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        HahnSeries::from_json(&j).map_err(serde::de::Error::custom)
    }
}
