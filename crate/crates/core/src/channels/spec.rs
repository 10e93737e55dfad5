//! JSON form of [`ChannelModel`].
//!
//! ```json
//! {"kind": "repeat", "pmf": {"0": 0.1, "1": 0.9}}
//! {"kind": "repeat", "pmf": {"type": "poisson", "lambda": 1.0, "tail_tol": 1e-9}}
//! {"kind": "dobrushin", "d0": {"": 0.1, "0": 0.855, "1": 0.045}, "d1": {"": 0.1, "1": 0.855, "0": 0.045}}
//! {"kind": "trimming_dobrushin", "law": {"type": "deletion_flip", "d": 0.1, "flip": 0.05},
//!  "trim_left": {"type": "uniform", "lo": 0, "hi": 3}, "trim_right": {"0": 1.0}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ChannelModel, DobrushinLaw, OutputDistribution, RepeatDistribution, DEFAULT_TAIL_TOL};
use crate::bits::BitString;
use crate::error::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Repeat,
    TrimmingRepeat,
    Dobrushin,
    TrimmingDobrushin,
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

/// A repetition law, either as an explicit table or parametrically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PmfSpec {
    Parametric(ParametricPmf),
    Table(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParametricPmf {
    Poisson {
        lambda: f64,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
    Deletion {
        d: f64,
    },
    Uniform {
        lo: usize,
        hi: usize,
    },
    Point {
        count: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LawSpec {
    DeletionFlip { d: f64, flip: f64 },
}

impl PmfSpec {
    pub fn build(&self) -> Result<RepeatDistribution> {
        match self {
            Self::Table(t) => {
                let mut table = BTreeMap::new();
                for (k, p) in t {
                    let Ok(r) = k.trim().parse::<usize>() else {
                        return param(format!("repeat count {k:?} is not a non-negative integer"));
                    };
                    *table.entry(r).or_insert(0.0) += p;
                }
                RepeatDistribution::from_table(&table)
            }
            Self::Parametric(ParametricPmf::Poisson { lambda, tail_tol }) => RepeatDistribution::poisson(*lambda, *tail_tol),
            Self::Parametric(ParametricPmf::Deletion { d }) => RepeatDistribution::deletion(*d),
            Self::Parametric(ParametricPmf::Uniform { lo, hi }) => RepeatDistribution::uniform(*lo, *hi),
            Self::Parametric(ParametricPmf::Point { count }) => Ok(RepeatDistribution::point(*count)),
        }
    }

    pub fn from_distribution(d: &RepeatDistribution) -> Self {
        Self::Table(d.support().map(|(r, p)| (r.to_string(), p)).collect())
    }
}

/// Serializable description of a [`ChannelModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<PmfSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<BTreeMap<BitString, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<BTreeMap<BitString, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trim_left: Option<PmfSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trim_right: Option<PmfSpec>,
}

impl ChannelSpec {
    pub fn deletion(d: f64) -> Self {
        Self::repeat(PmfSpec::Parametric(ParametricPmf::Deletion { d }))
    }

    pub fn repeat(pmf: PmfSpec) -> Self {
        Self {
            kind: SpecKind::Repeat,
            pmf: Some(pmf),
            law: None,
            d0: None,
            d1: None,
            trim_left: None,
            trim_right: None,
        }
    }

    pub fn deletion_flip(d: f64, flip: f64) -> Self {
        Self {
            kind: SpecKind::Dobrushin,
            pmf: None,
            law: Some(LawSpec::DeletionFlip { d, flip }),
            d0: None,
            d1: None,
            trim_left: None,
            trim_right: None,
        }
    }

    fn dobrushin_law(&self) -> Result<DobrushinLaw> {
        let table = |t: &BTreeMap<BitString, f64>| OutputDistribution::new(t.iter().map(|(f, p)| (f.clone(), *p)));
        match (&self.law, &self.d0, &self.d1, &self.pmf) {
            (Some(LawSpec::DeletionFlip { d, flip }), None, None, None) => DobrushinLaw::deletion_flip(*d, *flip),
            (None, Some(d0), Some(d1), None) => Ok(DobrushinLaw::new(table(d0)?, table(d1)?)),
            (None, None, None, Some(pmf)) => Ok(DobrushinLaw::from_repeat(&pmf.build()?)),
            _ => param("a Dobrushin channel needs exactly one of: law, d0+d1, pmf"),
        }
    }

    pub fn build(&self) -> Result<ChannelModel> {
        let repeat = || match (&self.pmf, &self.law, &self.d0, &self.d1) {
            (Some(pmf), None, None, None) => pmf.build(),
            _ => param("a repeat channel needs `pmf` and no Dobrushin fields"),
        };
        let no_trims = self.trim_left.is_none() && self.trim_right.is_none();
        match self.kind {
            SpecKind::Repeat if no_trims => Ok(ChannelModel::Repeat(repeat()?)),
            SpecKind::TrimmingRepeat if no_trims => Ok(ChannelModel::TrimmingRepeat(repeat()?)),
            SpecKind::Dobrushin if no_trims => Ok(ChannelModel::Dobrushin(self.dobrushin_law()?)),
            SpecKind::TrimmingDobrushin => {
                let (Some(tl), Some(tr)) = (&self.trim_left, &self.trim_right) else {
                    return param("a trimming Dobrushin channel needs trim_left and trim_right");
                };
                Ok(ChannelModel::TrimmingDobrushin {
                    law: self.dobrushin_law()?,
                    trim_left: tl.build()?,
                    trim_right: tr.build()?,
                })
            }
            _ => param("trim distributions are only valid for trimming_dobrushin"),
        }
    }

    /// Explicit-table spec of an existing model.
    pub fn from_model(model: &ChannelModel) -> Self {
        let table = |od: &OutputDistribution| od.entries().iter().cloned().collect::<BTreeMap<_, _>>();
        let mut spec = Self {
            kind: SpecKind::Repeat,
            pmf: None,
            law: None,
            d0: None,
            d1: None,
            trim_left: None,
            trim_right: None,
        };
        match model {
            ChannelModel::Repeat(d) => spec.pmf = Some(PmfSpec::from_distribution(d)),
            ChannelModel::TrimmingRepeat(d) => {
                spec.kind = SpecKind::TrimmingRepeat;
                spec.pmf = Some(PmfSpec::from_distribution(d));
            }
            ChannelModel::Dobrushin(law) => {
                spec.kind = SpecKind::Dobrushin;
                spec.d0 = Some(table(&law.d0));
                spec.d1 = Some(table(&law.d1));
            }
            ChannelModel::TrimmingDobrushin {
                law,
                trim_left,
                trim_right,
            } => {
                spec.kind = SpecKind::TrimmingDobrushin;
                spec.d0 = Some(table(&law.d0));
                spec.d1 = Some(table(&law.d1));
                spec.trim_left = Some(PmfSpec::from_distribution(trim_left));
                spec.trim_right = Some(PmfSpec::from_distribution(trim_right));
            }
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        let rc: ChannelSpec = serde_json::from_str(r#"{"kind":"repeat","pmf":{"0":0.1,"1":0.9}}"#).unwrap();
        assert_eq!(rc.build().unwrap(), ChannelModel::deletion(0.1).unwrap());

        let poisson: ChannelSpec =
            serde_json::from_str(r#"{"kind":"repeat","pmf":{"type":"poisson","lambda":1.0,"tail_tol":1e-9}}"#).unwrap();
        assert_eq!(poisson.build().unwrap(), ChannelModel::poisson(1.0, 1e-9).unwrap());

        let dc: ChannelSpec = serde_json::from_str(
            r#"{"kind":"dobrushin","d0":{"":0.1,"0":0.855,"1":0.045},"d1":{"":0.1,"1":0.855,"0":0.045}}"#,
        )
        .unwrap();
        let model = dc.build().unwrap();
        assert!((model.ones_fraction() - 0.05).abs() < 1e-12);
        let reference = ChannelSpec::deletion_flip(0.1, 0.05).build().unwrap();
        let x: BitString = "0110".parse().unwrap();
        for y in ["", "01", "0110", "111"] {
            let y: BitString = y.parse().unwrap();
            assert!((model.likelihood(&x, &y) - reference.likelihood(&x, &y)).abs() < 1e-12);
        }

        let tdc: ChannelSpec = serde_json::from_str(
            r#"{"kind":"trimming_dobrushin","law":{"type":"deletion_flip","d":0.1,"flip":0.05},
                "trim_left":{"type":"uniform","lo":0,"hi":3},"trim_right":{"0":1.0}}"#,
        )
        .unwrap();
        assert!(tdc.build().unwrap().is_trimming());
    }

    #[test]
    fn rejects_inconsistent_specs() {
        for bad in [
            r#"{"kind":"repeat"}"#,
            r#"{"kind":"repeat","pmf":{"0":1.0},"trim_left":{"0":1.0}}"#,
            r#"{"kind":"dobrushin","d0":{"0":1.0}}"#,
            r#"{"kind":"trimming_dobrushin","law":{"type":"deletion_flip","d":0.1,"flip":0.05}}"#,
            r#"{"kind":"repeat","pmf":{"type":"deletion","d":1.0}}"#,
        ] {
            let spec: ChannelSpec = serde_json::from_str(bad).unwrap();
            assert!(spec.build().is_err(), "{bad}");
        }
    }

    #[test]
    fn model_round_trips_through_json() {
        let models = [
            ChannelModel::poisson(0.7, 1e-9).unwrap(),
            ChannelModel::deletion(0.2).unwrap().trimming_repeat().unwrap(),
            ChannelSpec::deletion_flip(0.1, 0.05).build().unwrap().trimming_dobrushin(
                RepeatDistribution::uniform(0, 2).unwrap(),
                RepeatDistribution::point(1),
            ),
        ];
        for m in models {
            let json = serde_json::to_string(&ChannelSpec::from_model(&m)).unwrap();
            let back: ChannelSpec = serde_json::from_str(&json).unwrap();
            let rebuilt = back.build().unwrap();
            assert_eq!(rebuilt.kind(), m.kind());
            assert!((rebuilt.mean_output_len() - m.mean_output_len()).abs() < 1e-12);
            assert_eq!(rebuilt.max_fragment_len(), m.max_fragment_len());
        }
    }
}
