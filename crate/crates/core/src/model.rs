//! Domain types shared by every module: node ids, bits, trust parameters,
//! predictions, configurations and the prediction error function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Node identifier, 1-based and contiguous within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// `1..=n` as node ids.
pub fn all_nodes(n: usize) -> impl DoubleEndedIterator<Item = NodeId> + Clone {
    (1..=n as u32).map(NodeId)
}

/// A binary input or output value. Serialized as the integers 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Bit {
    #[default]
    Zero,
    One,
}

impl Bit {
    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Bit> {
        match v {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    pub fn index(self) -> usize {
        self.as_u8() as usize
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Bit::from_u8(v).ok_or_else(|| serde::de::Error::custom(format!("bit must be 0 or 1, got {v}")))
    }
}

/// Channel model of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    NonAuth,
    Auth,
}

impl Mode {
    /// Smallest admissible trust parameter for the mode's wrapper.
    pub fn min_alpha(self) -> Ratio<i64> {
        match self {
            Mode::NonAuth => Ratio::new(1, 3),
            Mode::Auth => Ratio::new(1, 2),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::NonAuth => "nonauth",
            Mode::Auth => "auth",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonauth" | "non-auth" => Ok(Mode::NonAuth),
            "auth" => Ok(Mode::Auth),
            other => Err(Error::InvalidScenario(format!("unknown mode {other:?}"))),
        }
    }
}

/// Trust parameter alpha, an exact rational in [0, 1].
///
/// Parsed from decimal (`"0.8"`) or fraction (`"4/5"`) notation and printed
/// back as a decimal whenever the value has a finite decimal expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrustParam(Ratio<i64>);

impl TrustParam {
    pub fn new(value: Ratio<i64>) -> Result<Self> {
        if value < Ratio::zero() || value > Ratio::one() {
            return Err(Error::BadAlpha(value.to_string()));
        }
        Ok(TrustParam(value))
    }

    pub fn from_fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadAlpha(format!("{num}/{den}")));
        }
        Self::new(Ratio::new(num, den))
    }

    pub fn value(self) -> Ratio<i64> {
        self.0
    }

    /// Checks the range required by the wrapper of `mode`.
    pub fn check(self, mode: Mode) -> Result<Self> {
        if self.0 < mode.min_alpha() {
            return Err(Error::AlphaOutOfRange {
                alpha: self.to_string(),
                low: TrustParam(mode.min_alpha()).to_string(),
                mode,
            });
        }
        Ok(self)
    }

    /// `alpha * n` as an exact rational.
    pub fn times(self, n: usize) -> Ratio<i64> {
        self.0 * Ratio::from_integer(n as i64)
    }
}

impl FromStr for TrustParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadAlpha(s.to_string());
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den <= 0 {
                return Err(bad());
            }
            return TrustParam::new(Ratio::new(num, den)).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 12 {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        TrustParam::new(Ratio::new(int * den + frac, den)).map_err(|_| bad())
    }
}

impl fmt::Display for TrustParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = (*self.0.numer(), *self.0.denom());
        let mut d = den;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return write!(f, "{num}/{den}");
        }
        let digits = twos.max(fives);
        if digits == 0 {
            return write!(f, "{num}");
        }
        let scaled = num * 10i64.pow(digits) / den;
        let scale = 10i64.pow(digits);
        let frac = format!("{:0width$}", scaled % scale, width = digits as usize);
        write!(f, "{}.{}", scaled / scale, frac.trim_end_matches('0'))
    }
}

impl Serialize for TrustParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TrustParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            // Numbers are read through their shortest decimal form.
            Raw::Number(x) => x.to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A global prediction: the set of nodes claimed to be honest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prediction {
    pub members: BTreeSet<NodeId>,
}

impl Prediction {
    pub fn new(members: impl IntoIterator<Item = NodeId>) -> Self {
        Prediction { members: members.into_iter().collect() }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Self::new(ids.into_iter().map(NodeId))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members.contains(&id)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.members.iter().find(|id| id.0 == 0 || id.index() > n) {
            Some(&id) => Err(Error::NodeOutOfRange(id, n)),
            None => Ok(()),
        }
    }
}

/// Per-node predictions, entry `i - 1` belongs to node `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalPrediction {
    pub per_node: Vec<Prediction>,
}

impl LocalPrediction {
    pub fn constant(pred: &Prediction, n: usize) -> Self {
        LocalPrediction { per_node: vec![pred.clone(); n] }
    }

    pub fn of(&self, id: NodeId) -> &Prediction {
        &self.per_node[id.index() - 1]
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.per_node.len() != n {
            return Err(Error::InvalidConfig(format!(
                "local prediction has {} entries, expected {n}",
                self.per_node.len()
            )));
        }
        self.per_node.iter().try_for_each(|p| p.validate(n))
    }
}

/// Faulty set and honest inputs of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub n: usize,
    pub faulty: BTreeSet<NodeId>,
    pub inputs: BTreeMap<NodeId, Bit>,
}

impl Configuration {
    /// Builds and validates a configuration. `inputs` must cover exactly the honest nodes.
    pub fn new(n: usize, faulty: impl IntoIterator<Item = NodeId>, inputs: BTreeMap<NodeId, Bit>) -> Result<Self> {
        let config = Configuration { n, faulty: faulty.into_iter().collect(), inputs };
        config.validate()?;
        Ok(config)
    }

    /// Honest nodes get their inputs from `input`.
    pub fn with_inputs(n: usize, faulty: impl IntoIterator<Item = NodeId>, input: impl Fn(NodeId) -> Bit) -> Result<Self> {
        let faulty: BTreeSet<NodeId> = faulty.into_iter().collect();
        let inputs = all_nodes(n).filter(|i| !faulty.contains(i)).map(|i| (i, input(i))).collect();
        Self::new(n, faulty, inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > u32::MAX as usize / 2 {
            return Err(Error::InvalidConfig(format!("n = {} is too large", self.n)));
        }
        if let Some(&id) = self.faulty.iter().chain(self.inputs.keys()).find(|id| id.0 == 0 || id.index() > self.n) {
            return Err(Error::NodeOutOfRange(id, self.n));
        }
        if let Some(id) = self.inputs.keys().find(|id| self.faulty.contains(id)) {
            return Err(Error::InvalidConfig(format!("faulty node {id} has an honest input")));
        }
        if let Some(id) = self.honest().find(|id| !self.inputs.contains_key(id)) {
            return Err(Error::InvalidConfig(format!("honest node {id} has no input")));
        }
        Ok(())
    }

    pub fn f(&self) -> usize {
        self.faulty.len()
    }

    pub fn is_faulty(&self, id: NodeId) -> bool {
        self.faulty.contains(&id)
    }

    pub fn honest(&self) -> impl Iterator<Item = NodeId> + '_ {
        all_nodes(self.n).filter(move |i| !self.faulty.contains(i))
    }

    pub fn honest_set(&self) -> BTreeSet<NodeId> {
        self.honest().collect()
    }

    pub fn input(&self, id: NodeId) -> Option<Bit> {
        self.inputs.get(&id).copied()
    }
}

/// Misprediction counts of a global prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    /// Faulty nodes inside the prediction.
    pub eta_f: usize,
    /// Honest nodes missing from the prediction.
    pub eta_h: usize,
    pub eta: usize,
}

pub fn compute_error(config: &Configuration, pred: &Prediction) -> ErrorBreakdown {
    let eta_f = pred.members.iter().filter(|id| config.is_faulty(**id) || id.index() > config.n).count();
    let eta_h = config.honest().filter(|id| !pred.contains(*id)).count();
    ErrorBreakdown { eta_f, eta_h, eta: eta_f + eta_h }
}

/// Sum of the honest nodes' individual errors. Faulty nodes' entries are ignored.
pub fn compute_local_error(config: &Configuration, pred: &LocalPrediction) -> usize {
    config
        .honest()
        .filter_map(|i| pred.per_node.get(i.index() - 1))
        .map(|p| compute_error(config, p).eta)
        .sum()
}

/// Prediction as supplied to a run: one set for everyone, or one per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionInput {
    Global(Prediction),
    Local(LocalPrediction),
}

impl PredictionInput {
    pub fn for_node(&self, id: NodeId) -> &Prediction {
        match self {
            PredictionInput::Global(p) => p,
            PredictionInput::Local(l) => l.of(id),
        }
    }

    pub fn expand(&self, n: usize) -> LocalPrediction {
        match self {
            PredictionInput::Global(p) => LocalPrediction::constant(p, n),
            PredictionInput::Local(l) => l.clone(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            PredictionInput::Global(p) => p.validate(n),
            PredictionInput::Local(l) => l.validate(n),
        }
    }
}
