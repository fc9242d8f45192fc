//! JSON model files: an ensemble as a list of voters, each a list of
//! `(coefficient, hypothesis)` terms.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::voting::{Ensemble, Hypothesis, Voter};
use crate::weak::{AdversarialHypothesis, AdversarialId, AdversarialUniverse, Stump};

pub const MODEL_FORMAT: &str = "boostlab-ensemble";

/// Serialized hypothesis. Stump thresholds of `null` mean the below-minimum
/// sentinel; adversarial hypotheses are stored by pool index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "F: Scalar")]
pub enum HypothesisRecord<F> {
    Stump { feature: usize, threshold: Option<F>, polarity: i8 },
    Pool { index: usize },
    H0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TermRecord<F> {
    pub coefficient: F,
    pub hypothesis: HypothesisRecord<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct VoterRecord<F> {
    pub terms: Vec<TermRecord<F>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct ModelFile<F> {
    pub format: String,
    pub version: u32,
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_features: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub voters: Vec<VoterRecord<F>>,
}

pub trait ToRecord<F> {
    fn to_record(&self) -> HypothesisRecord<F>;
}

impl<F: Scalar> ToRecord<F> for Stump<F> {
    fn to_record(&self) -> HypothesisRecord<F> {
        HypothesisRecord::Stump {
            feature: self.feature,
            threshold: (!self.is_constant()).then_some(self.threshold),
            polarity: self.polarity.value(),
        }
    }
}

impl<F> ToRecord<F> for AdversarialHypothesis {
    fn to_record(&self) -> HypothesisRecord<F> {
        match self.id() {
            AdversarialId::Pool(index) => HypothesisRecord::Pool { index },
            AdversarialId::H0 => HypothesisRecord::H0,
        }
    }
}

impl<F: Scalar> ModelFile<F> {
    pub fn from_ensemble<H>(algorithm: &str, ensemble: &Ensemble<F, H>) -> Self
    where
        H: Hypothesis<F> + ToRecord<F>,
    {
        let voters = ensemble
            .voters()
            .iter()
            .map(|v| VoterRecord {
                terms: v
                    .terms()
                    .iter()
                    .map(|(a, h)| TermRecord { coefficient: *a, hypothesis: h.to_record() })
                    .collect(),
            })
            .collect();
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: 1,
            algorithm: algorithm.to_string(),
            n_features: None,
            master_seed: None,
            voters,
        }
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let model: Self = serde_json::from_reader(input)?;
        if model.format != MODEL_FORMAT {
            return Err(Error::Config(format!("not a model file (format `{}`)", model.format)));
        }
        Ok(model)
    }

    fn decode<H: Hypothesis<F>>(
        &self,
        mut hyp: impl FnMut(&HypothesisRecord<F>) -> Result<H>,
    ) -> Result<Ensemble<F, H>> {
        let voters = self
            .voters
            .iter()
            .map(|v| {
                let terms = v
                    .terms
                    .iter()
                    .map(|t| Ok((t.coefficient, hyp(&t.hypothesis)?)))
                    .collect::<Result<Vec<_>>>()?;
                Voter::new(terms)
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(voters)
    }

    pub fn stump_ensemble(&self) -> Result<Ensemble<F, Stump<F>>> {
        self.decode(|r| match *r {
            HypothesisRecord::Stump { feature, threshold, polarity } => {
                let polarity = Label::from_value(i64::from(polarity))
                    .ok_or_else(|| Error::Config(format!("polarity {polarity} is not ±1")))?;
                Ok(Stump { feature, threshold: threshold.unwrap_or(F::neg_infinity()), polarity })
            }
            _ => Err(Error::Config("expected stump hypotheses".into())),
        })
    }

    pub fn adversarial_ensemble(&self, universe: &AdversarialUniverse) -> Result<Ensemble<F, AdversarialHypothesis>> {
        self.decode(|r| {
            let id = match *r {
                HypothesisRecord::Pool { index } => AdversarialId::Pool(index),
                HypothesisRecord::H0 => AdversarialId::H0,
                HypothesisRecord::Stump { .. } => {
                    return Err(Error::Config("expected adversarial hypotheses".into()))
                }
            };
            universe
                .hypothesis(id)
                .cloned()
                .ok_or_else(|| Error::Config(format!("{id:?} not in the pool")))
        })
    }
}
