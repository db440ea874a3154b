//! Antenna configurations, transmit/receive splits, channel realizations and
//! the received-signal map of the full-duplex 3-way channel.
//!
//! Node indices are 1-based on every public surface.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_gaussian_from, rng_for, ComplexMatrix, ComplexVector};
use crate::rational::{self, int, Rational};

pub const NODES: [usize; 3] = [1, 2, 3];

/// Ordered pairs `(i, j)`, `i ≠ j`, in the storage order of [`ChannelSet`].
pub const LINKS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)];

fn link_index(from: usize, to: usize) -> Result<usize> {
    LINKS
        .iter()
        .position(|&l| l == (from, to))
        .ok_or_else(|| Error::InvalidInput(format!("no channel from node {from} to node {to}")))
}

/// Total antenna counts per node, ordered `m1 ≥ m2 ≥ m3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConfigRepr", into = "ConfigRepr")]
pub struct AntennaConfig {
    m: [u32; 3],
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    m: [u32; 3],
}

impl TryFrom<ConfigRepr> for AntennaConfig {
    type Error = Error;
    fn try_from(r: ConfigRepr) -> Result<Self> {
        AntennaConfig::new(r.m[0], r.m[1], r.m[2])
    }
}

impl From<AntennaConfig> for ConfigRepr {
    fn from(c: AntennaConfig) -> Self {
        ConfigRepr { m: c.m }
    }
}

impl AntennaConfig {
    pub fn new(m1: u32, m2: u32, m3: u32) -> Result<Self> {
        if m1 >= m2 && m2 >= m3 {
            Ok(Self { m: [m1, m2, m3] })
        } else {
            Err(Error::Ordering(m1, m2, m3))
        }
    }

    /// Sorts into decreasing order first. Node identities are relabeled.
    pub fn sorted(mut m: [u32; 3]) -> Self {
        m.sort_unstable_by(|a, b| b.cmp(a));
        Self { m }
    }

    pub fn m(&self, node: usize) -> u32 {
        self.m[node - 1]
    }

    pub fn counts(&self) -> [u32; 3] {
        self.m
    }

    pub fn total(&self) -> u32 {
        self.m.iter().sum()
    }

    pub fn scaled(&self, factor: u32) -> Self {
        Self { m: self.m.map(|x| x * factor) }
    }

    pub fn as_rationals(&self) -> [Rational; 3] {
        self.m.map(|x| int(i64::from(x)))
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m[0], self.m[1], self.m[2])
    }
}

/// Per-node transmit/receive partition. Counts are exact rationals so that
/// fractional optima survive until symbol extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SplitRepr", into = "SplitRepr")]
pub struct AntennaSplit {
    mt: [Rational; 3],
    mr: [Rational; 3],
}

#[derive(Serialize, Deserialize)]
struct SplitRepr {
    #[serde(with = "rational::pq_seq")]
    mt: [Rational; 3],
    #[serde(with = "rational::pq_seq")]
    mr: [Rational; 3],
}

impl TryFrom<SplitRepr> for AntennaSplit {
    type Error = Error;
    fn try_from(r: SplitRepr) -> Result<Self> {
        AntennaSplit::new(r.mt, r.mr)
    }
}

impl From<AntennaSplit> for SplitRepr {
    fn from(s: AntennaSplit) -> Self {
        SplitRepr { mt: s.mt, mr: s.mr }
    }
}

impl AntennaSplit {
    pub fn new(mt: [Rational; 3], mr: [Rational; 3]) -> Result<Self> {
        if mt.iter().chain(&mr).any(|x| x.is_negative()) {
            return Err(Error::InvalidInput(format!(
                "antenna counts must be nonnegative, got mt={} mr={}",
                fmt_triple(&mt),
                fmt_triple(&mr)
            )));
        }
        Ok(Self { mt, mr })
    }

    pub fn from_integers(mt: [u32; 3], mr: [u32; 3]) -> Self {
        Self { mt: mt.map(|x| int(x.into())), mr: mr.map(|x| int(x.into())) }
    }

    /// Split of `cfg` with the given receive counts; transmit counts are the
    /// complement `Mℓ − M_Rℓ`.
    pub fn from_receive(cfg: &AntennaConfig, mr: [Rational; 3]) -> Result<Self> {
        let m = cfg.as_rationals();
        let mt = [m[0] - mr[0], m[1] - mr[1], m[2] - mr[2]];
        Self::new(mt, mr)
    }

    pub fn from_transmit(cfg: &AntennaConfig, mt: [Rational; 3]) -> Result<Self> {
        let m = cfg.as_rationals();
        let mr = [m[0] - mt[0], m[1] - mt[1], m[2] - mt[2]];
        Self::new(mt, mr)
    }

    pub fn mt(&self, node: usize) -> Rational {
        self.mt[node - 1]
    }

    pub fn mr(&self, node: usize) -> Rational {
        self.mr[node - 1]
    }

    pub fn transmit(&self) -> [Rational; 3] {
        self.mt
    }

    pub fn receive(&self) -> [Rational; 3] {
        self.mr
    }

    /// `Mℓ = M_Tℓ + M_Rℓ`.
    pub fn totals(&self) -> [Rational; 3] {
        [self.mt[0] + self.mr[0], self.mt[1] + self.mr[1], self.mt[2] + self.mr[2]]
    }

    pub fn matches(&self, cfg: &AntennaConfig) -> bool {
        self.totals() == cfg.as_rationals()
    }

    /// Transmit and receive roles exchanged at every node.
    pub fn mirrored(&self) -> Self {
        Self { mt: self.mr, mr: self.mt }
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let k = int(factor);
        Self { mt: self.mt.map(|x| x * k), mr: self.mr.map(|x| x * k) }
    }

    pub fn is_integer(&self) -> bool {
        self.mt.iter().chain(&self.mr).all(|x| x.is_integer())
    }

    /// Smallest factor that makes every component an integer.
    pub fn extension_factor(&self) -> i64 {
        rational::lcm_denominators(self.mt.iter().chain(&self.mr))
    }

    pub fn to_integer(&self) -> Result<IntegerSplit> {
        if !self.is_integer() {
            return Err(Error::InvalidInput(format!(
                "split mt={} mr={} is fractional; symbol-extend by {} first",
                fmt_triple(&self.mt),
                fmt_triple(&self.mr),
                self.extension_factor()
            )));
        }
        let conv = |x: &Rational| usize::try_from(x.to_integer()).expect("nonnegative by construction");
        Ok(IntegerSplit { mt: [conv(&self.mt[0]), conv(&self.mt[1]), conv(&self.mt[2])], mr: [conv(&self.mr[0]), conv(&self.mr[1]), conv(&self.mr[2])] })
    }
}

impl fmt::Display for AntennaSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mt={} mr={}", fmt_triple(&self.mt), fmt_triple(&self.mr))
    }
}

fn fmt_triple(v: &[Rational; 3]) -> String {
    format!("({},{},{})", v[0], v[1], v[2])
}

/// Integer split, the only kind channels can be drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerSplit {
    pub mt: [usize; 3],
    pub mr: [usize; 3],
}

impl IntegerSplit {
    pub fn mt(&self, node: usize) -> usize {
        self.mt[node - 1]
    }

    pub fn mr(&self, node: usize) -> usize {
        self.mr[node - 1]
    }

    pub fn to_rational(&self) -> AntennaSplit {
        AntennaSplit::from_integers(self.mt.map(|x| x as u32), self.mr.map(|x| x as u32))
    }

    /// Shape of `H_ij`: `M_Rj × M_Ti`.
    pub fn link_shape(&self, from: usize, to: usize) -> (usize, usize) {
        (self.mr(to), self.mt(from))
    }
}

/// The six channel matrices `H_ij` (from node `i` to node `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    split: IntegerSplit,
    h: Vec<ComplexMatrix>,
}

impl ChannelSet {
    /// Assembles a channel set from explicit matrices in [`LINKS`] order.
    pub fn from_matrices(split: IntegerSplit, h: Vec<ComplexMatrix>) -> Result<Self> {
        if h.len() != LINKS.len() {
            return Err(Error::InvalidInput(format!("expected 6 channel matrices, got {}", h.len())));
        }
        for (&(i, j), m) in LINKS.iter().zip(&h) {
            let want = split.link_shape(i, j);
            if m.shape() != want {
                return Err(Error::DimensionMismatch(format!(
                    "H_{i}{j} is {}x{}, split requires {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(Self { split, h })
    }

    pub fn split(&self) -> &IntegerSplit {
        &self.split
    }

    /// `H_ij`, 1-based. Panics for `i == j` or indices outside `1..=3`.
    pub fn h(&self, from: usize, to: usize) -> &ComplexMatrix {
        &self.h[link_index(from, to).expect("valid link")]
    }

    /// Replaces `H_ij`, keeping the shape contract.
    pub fn set(&mut self, from: usize, to: usize, m: ComplexMatrix) -> Result<()> {
        let idx = link_index(from, to)?;
        if m.shape() != self.h[idx].shape() {
            return Err(Error::DimensionMismatch(format!(
                "replacement H_{from}{to} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                self.h[idx].rows(),
                self.h[idx].cols()
            )));
        }
        self.h[idx] = m;
        Ok(())
    }
}

/// Draws the six channels as independent CN(0, 1) matrices. Each link uses
/// its own stream of `seed`, so a link's draw does not depend on the others'
/// shapes.
pub fn draw_channels(split: &AntennaSplit, seed: u64) -> Result<ChannelSet> {
    let int_split = split.to_integer()?;
    let h = LINKS
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let (r, c) = int_split.link_shape(i, j);
            random_gaussian_from(r, c, &mut rng_for(seed, k as u64))
        })
        .collect();
    ChannelSet::from_matrices(int_split, h)
}

/// `y_j = Σ_{i≠j} H_ij x_i + z_j` for every node `j`.
pub fn receive(channels: &ChannelSet, x: &[ComplexVector; 3], noise: &[ComplexVector; 3]) -> Result<[ComplexVector; 3]> {
    let split = channels.split();
    for node in NODES {
        if x[node - 1].len() != split.mt(node) {
            return Err(Error::DimensionMismatch(format!(
                "x_{node} has length {}, node {node} has {} transmit antennas",
                x[node - 1].len(),
                split.mt(node)
            )));
        }
        if noise[node - 1].len() != split.mr(node) {
            return Err(Error::DimensionMismatch(format!(
                "z_{node} has length {}, node {node} has {} receive antennas",
                noise[node - 1].len(),
                split.mr(node)
            )));
        }
    }
    let mut y = noise.clone();
    for &(i, j) in &LINKS {
        y[j - 1] += channels.h(i, j).mul_vec(&x[i - 1])?;
    }
    Ok(y)
}

/// Message identifiers: unicast `W_ij` or broadcast `W_k,BC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MessageId {
    Unicast { from: usize, to: usize },
    Broadcast { from: usize },
}

impl MessageId {
    pub fn unicast(from: usize, to: usize) -> Self {
        MessageId::Unicast { from, to }
    }

    pub fn broadcast(from: usize) -> Self {
        MessageId::Broadcast { from }
    }

    pub fn transmitter(&self) -> usize {
        match *self {
            MessageId::Unicast { from, .. } | MessageId::Broadcast { from } => from,
        }
    }

    /// Nodes that decode the message, in increasing order.
    pub fn receivers(&self) -> Vec<usize> {
        match *self {
            MessageId::Unicast { to, .. } => vec![to],
            MessageId::Broadcast { from } => NODES.iter().copied().filter(|&n| n != from).collect(),
        }
    }

    /// Number of nodes that want the message.
    pub fn weight(&self) -> i64 {
        match self {
            MessageId::Unicast { .. } => 1,
            MessageId::Broadcast { .. } => 2,
        }
    }

    pub fn is_broadcast(&self) -> bool {
        matches!(self, MessageId::Broadcast { .. })
    }

    /// Parses `12`, `u12`, `d12`, `3BC`, `u3BC`, `d3,BC`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['u', 'd']).replace([',', '_'], "");
        let bad = || Error::InvalidInput(format!("unrecognized message label {s:?}"));
        let digits: Vec<usize> = t.chars().take_while(|c| c.is_ascii_digit()).map(|c| c as usize - '0' as usize).collect();
        let rest = &t[digits.len()..];
        let valid = |n: usize| (1..=3).contains(&n);
        match (digits.as_slice(), rest.to_ascii_uppercase().as_str()) {
            (&[from, to], "") if valid(from) && valid(to) && from != to => Ok(Self::unicast(from, to)),
            (&[from], "BC") if valid(from) => Ok(Self::broadcast(from)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageId::Unicast { from, to } => write!(f, "u{from}{to}"),
            MessageId::Broadcast { from } => write!(f, "u{from}BC"),
        }
    }
}

impl Serialize for MessageId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MessageId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        MessageId::parse(&raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageConfig {
    UnicastOnly,
    UnicastAndBroadcast,
}

/// Per-message stream counts (DoF) under one message configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MessageSetRepr", into = "MessageSetRepr")]
pub struct MessageSet {
    config: MessageConfig,
    dof: BTreeMap<MessageId, Rational>,
}

#[derive(Serialize, Deserialize)]
struct MessageSetRepr {
    config: MessageConfig,
    dof: BTreeMap<MessageId, String>,
}

impl TryFrom<MessageSetRepr> for MessageSet {
    type Error = Error;
    fn try_from(r: MessageSetRepr) -> Result<Self> {
        let entries = r
            .dof
            .into_iter()
            .map(|(k, v)| rational::parse(&v).map(|v| (k, v)))
            .collect::<Result<Vec<_>>>()?;
        MessageSet::new(r.config, entries)
    }
}

impl From<MessageSet> for MessageSetRepr {
    fn from(m: MessageSet) -> Self {
        MessageSetRepr { config: m.config, dof: m.dof.iter().map(|(k, v)| (*k, rational::to_pq(v))).collect() }
    }
}

impl MessageSet {
    pub fn new(config: MessageConfig, entries: impl IntoIterator<Item = (MessageId, Rational)>) -> Result<Self> {
        let mut dof = BTreeMap::new();
        for (id, d) in entries {
            if d.is_negative() {
                return Err(Error::InvalidInput(format!("negative DoF {d} for {id}")));
            }
            if config == MessageConfig::UnicastOnly && id.is_broadcast() && !d.is_zero() {
                return Err(Error::InvalidInput(format!("{id} carries {d} DoF in a unicast-only message set")));
            }
            *dof.entry(id).or_insert_with(Rational::zero) += d;
        }
        Ok(Self { config, dof })
    }

    pub fn config(&self) -> MessageConfig {
        self.config
    }

    pub fn get(&self, id: MessageId) -> Rational {
        self.dof.get(&id).copied().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MessageId, &Rational)> {
        self.dof.iter()
    }
}

/// `Σ d_ij + 2 Σ d_k,BC`.
pub fn total_dof(msgs: &MessageSet) -> Rational {
    msgs.dof.iter().map(|(id, d)| *d * int(id.weight())).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn config_ordering_enforced() {
        assert!(AntennaConfig::new(3, 3, 3).is_ok());
        assert_eq!(AntennaConfig::new(2, 3, 1), Err(Error::Ordering(2, 3, 1)));
        assert_eq!(AntennaConfig::sorted([2, 3, 1]).counts(), [3, 2, 1]);
    }

    #[test]
    fn channel_shapes_follow_split() {
        let split = AntennaSplit::from_integers([3, 1, 1], [0, 2, 2]);
        let ch = draw_channels(&split, 1).unwrap();
        assert_eq!(ch.h(1, 2).shape(), (2, 3));
        assert_eq!(ch.h(1, 3).shape(), (2, 3));
        assert_eq!(ch.h(2, 3).shape(), (2, 1));
        assert_eq!(ch.h(3, 2).shape(), (2, 1));
        assert_eq!(ch.h(2, 1).shape(), (0, 1));
        assert_eq!(ch.h(3, 1).shape(), (0, 1));
        assert_eq!(ch, draw_channels(&split, 1).unwrap());
        assert_ne!(ch, draw_channels(&split, 2).unwrap());
    }

    #[test]
    fn fractional_split_cannot_draw() {
        let cfg = AntennaConfig::new(4, 4, 4).unwrap();
        let split = AntennaSplit::from_receive(&cfg, [int(0), frac(8, 3), frac(8, 3)]).unwrap();
        assert_eq!(split.extension_factor(), 3);
        assert!(matches!(draw_channels(&split, 0), Err(Error::InvalidInput(_))));
        assert!(draw_channels(&split.scaled(3), 0).is_ok());
    }

    #[test]
    fn split_rejects_negative_counts() {
        assert!(AntennaSplit::new([int(-1), int(0), int(0)], [int(0); 3]).is_err());
        let cfg = AntennaConfig::new(2, 1, 1).unwrap();
        assert!(AntennaSplit::from_receive(&cfg, [int(3), int(0), int(0)]).is_err());
    }

    #[test]
    fn total_dof_weights_broadcast() {
        let all_ones = MessageSet::new(
            MessageConfig::UnicastOnly,
            LINKS.iter().map(|&(i, j)| (MessageId::unicast(i, j), int(1))),
        )
        .unwrap();
        assert_eq!(total_dof(&all_ones), int(6));

        let mixed = MessageSet::new(
            MessageConfig::UnicastAndBroadcast,
            [(MessageId::unicast(2, 1), int(2)), (MessageId::broadcast(3), frac(3, 2))],
        )
        .unwrap();
        assert_eq!(total_dof(&mixed), int(5));

        let uni_a = MessageSet::new(
            MessageConfig::UnicastOnly,
            [(1, 2), (1, 3), (2, 3), (3, 2)].map(|(i, j)| (MessageId::unicast(i, j), int(1))),
        )
        .unwrap();
        assert_eq!(total_dof(&uni_a), int(4));
    }

    #[test]
    fn unicast_only_rejects_broadcast() {
        assert!(MessageSet::new(MessageConfig::UnicastOnly, [(MessageId::broadcast(1), int(1))]).is_err());
        assert!(MessageSet::new(MessageConfig::UnicastOnly, [(MessageId::broadcast(1), int(0))]).is_ok());
    }

    #[test]
    fn message_labels_round_trip() {
        for id in [MessageId::unicast(1, 2), MessageId::unicast(3, 1), MessageId::broadcast(3)] {
            assert_eq!(MessageId::parse(&id.to_string()).unwrap(), id);
        }
        assert_eq!(MessageId::parse("d3,BC").unwrap(), MessageId::broadcast(3));
        assert!(MessageId::parse("u11").is_err());
        assert!(MessageId::parse("u4BC").is_err());
    }

    #[test]
    fn json_shapes() {
        let cfg = AntennaConfig::new(5, 3, 2).unwrap();
        assert_eq!(serde_json::to_string(&cfg).unwrap(), r#"{"m":[5,3,2]}"#);
        assert!(serde_json::from_str::<AntennaConfig>(r#"{"m":[1,3,2]}"#).is_err());
        let split = AntennaSplit::new([int(3), frac(1, 3), int(1)], [int(0), int(2), int(2)]).unwrap();
        let js = serde_json::to_string(&split).unwrap();
        assert_eq!(js, r#"{"mt":["3/1","1/3","1/1"],"mr":["0/1","2/1","2/1"]}"#);
        assert_eq!(serde_json::from_str::<AntennaSplit>(&js).unwrap(), split);
    }
}
