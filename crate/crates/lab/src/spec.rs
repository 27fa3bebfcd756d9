//! Strategy and model names as they appear on the command line and in the API.

use std::fmt;
use std::str::FromStr;

use active_core::{
    Albl, AlblConfig, DensityWeighted, DwusConfig, EerConfig, ExpectedErrorReduction,
    LogisticConfig, ModelSpec, Pool, QbcConfig, QueryByCommittee, QueryStrategy, RandomSampling,
    SvmConfig, UncertaintyConfig, UncertaintyMethod, UncertaintySampling,
};
use serde::{Deserialize, Serialize};

/// Names accepted by [`StrategySpec::from_str`], in display order.
pub const STRATEGY_NAMES: &[&str] = &[
    "uncertainty",
    "uncertainty-lc",
    "uncertainty-margin",
    "random",
    "qbc",
    "dwus",
    "eer",
    "albl",
];

/// ALBL candidates used when `albl` is given without a bracketed list.
pub const DEFAULT_ALBL_CANDIDATES: &[&str] = &["uncertainty", "random", "qbc", "dwus"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown strategy `{0}`; valid names: {names}", names = valid_names())]
    UnknownStrategy(String),
    #[error("ALBL candidates cannot include `{0}`")]
    NestedAlbl(String),
    #[error("malformed ALBL candidate list in `{0}`; expected albl[a|b|...]")]
    MalformedAlbl(String),
    #[error("unknown model `{0}`; valid names: logreg, linsvm")]
    UnknownModel(String),
}

pub fn valid_names() -> String {
    let mut names = STRATEGY_NAMES.join(", ");
    names.push_str(", albl[a|b|...]");
    names
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Uncertainty(UncertaintyMethod),
    Random,
    Qbc,
    Dwus,
    Eer,
    Albl(Vec<StrategySpec>),
}

impl StrategySpec {
    pub fn is_albl(&self) -> bool {
        matches!(self, StrategySpec::Albl(_))
    }

    /// Instantiates the strategy against `pool`, registering its update observer.
    pub fn build(&self, pool: &mut Pool, model: ModelSpec, seed: u64) -> active_core::Result<Box<dyn QueryStrategy>> {
        Ok(match self {
            StrategySpec::Uncertainty(method) => {
                Box::new(UncertaintySampling::new(pool, *method, UncertaintyConfig { model }))
            }
            StrategySpec::Random => Box::new(RandomSampling::new(pool, seed)),
            StrategySpec::Qbc => Box::new(QueryByCommittee::new(
                pool,
                QbcConfig { model, seed, ..Default::default() },
            )?),
            StrategySpec::Dwus => Box::new(DensityWeighted::new(
                pool,
                DwusConfig { model, seed, ..Default::default() },
            )),
            StrategySpec::Eer => Box::new(ExpectedErrorReduction::new(
                pool,
                EerConfig { model, seed, ..Default::default() },
            )),
            StrategySpec::Albl(candidates) => {
                let built = candidates
                    .iter()
                    .map(|c| c.build(pool, model, seed))
                    .collect::<active_core::Result<Vec<_>>>()?;
                let config = AlblConfig { seed, reward_model: model, ..Default::default() };
                Box::new(Albl::new(pool, built, config)?)
            }
        })
    }
}

impl FromStr for StrategySpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("albl[") {
            let inner = rest.strip_suffix(']').ok_or_else(|| SpecError::MalformedAlbl(s.into()))?;
            if inner.trim().is_empty() {
                return Err(SpecError::MalformedAlbl(s.into()));
            }
            let candidates = inner
                .split('|')
                .map(|name| match name.trim().parse()? {
                    StrategySpec::Albl(_) => Err(SpecError::NestedAlbl(name.trim().into())),
                    spec => Ok(spec),
                })
                .collect::<Result<_, _>>()?;
            return Ok(StrategySpec::Albl(candidates));
        }
        Ok(match s {
            "uncertainty" => StrategySpec::Uncertainty(UncertaintyMethod::Entropy),
            "uncertainty-lc" => StrategySpec::Uncertainty(UncertaintyMethod::LeastConfident),
            "uncertainty-margin" => StrategySpec::Uncertainty(UncertaintyMethod::SmallestMargin),
            "random" => StrategySpec::Random,
            "qbc" => StrategySpec::Qbc,
            "dwus" => StrategySpec::Dwus,
            "eer" => StrategySpec::Eer,
            "albl" => StrategySpec::Albl(
                DEFAULT_ALBL_CANDIDATES.iter().map(|n| n.parse().expect("default candidates parse")).collect(),
            ),
            other => return Err(SpecError::UnknownStrategy(other.into())),
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Uncertainty(UncertaintyMethod::Entropy) => f.write_str("uncertainty"),
            StrategySpec::Uncertainty(UncertaintyMethod::LeastConfident) => f.write_str("uncertainty-lc"),
            StrategySpec::Uncertainty(UncertaintyMethod::SmallestMargin) => f.write_str("uncertainty-margin"),
            StrategySpec::Random => f.write_str("random"),
            StrategySpec::Qbc => f.write_str("qbc"),
            StrategySpec::Dwus => f.write_str("dwus"),
            StrategySpec::Eer => f.write_str("eer"),
            StrategySpec::Albl(candidates) => {
                f.write_str("albl[")?;
                for (i, c) in candidates.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Parses a comma-separated strategy list.
pub fn parse_strategy_list(s: &str) -> Result<Vec<StrategySpec>, SpecError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Logreg,
    Linsvm,
}

impl ModelKind {
    pub fn spec(self, seed: u64) -> ModelSpec {
        match self {
            ModelKind::Logreg => ModelSpec::Logistic(LogisticConfig::default()),
            ModelKind::Linsvm => ModelSpec::LinearSvm(SvmConfig { seed, ..Default::default() }),
        }
    }
}

impl FromStr for ModelKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s {
            "logreg" => Ok(ModelKind::Logreg),
            "linsvm" => Ok(ModelKind::Linsvm),
            other => Err(SpecError::UnknownModel(other.into())),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Linsvm => "linsvm",
        })
    }
}
