//! Zero-forcing achievable schemes and their numerical verification.
//!
//! A scheme fixes an integer antenna split, a precoder `T` for every active
//! message and, at each receiver that wants the message, an orthonormal
//! projector whose columns are orthogonal to every interfering stream. The
//! message is then recovered by inverting the square effective matrix
//! `G = Qᴴ H T`. Fractional allocations are realised by symbol extension:
//! every antenna count is multiplied by the extension factor and one larger
//! channel is drawn.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{self, AntennaConfig, ChannelSet, IntegerSplit, MessageConfig, MessageId, MessageSet, NODES};
use crate::error::{Error, Result};
use crate::linalg::{
    null_space_basis, numerical_rank, orthonormalize_columns, random_gaussian_from, random_gaussian_vector, rng_for,
    solve_square, ComplexMatrix, ComplexVector,
};
use crate::rational::{self, frac, Rational};

/// RNG streams under a scheme seed.
const PRECODER_STREAM: u64 = 0;
const SYMBOL_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Unicast, `M1 ≤ M2 + M3`: node 1 only transmits, null-steering each
    /// stream away from the other receiver.
    UniA,
    /// Unicast, `M1 ≥ M2 + M3`: nodes 2 and 3 transmit to node 1.
    UniB,
    /// Unicast plus a broadcast message from node 3.
    Bcast,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::UniA, SchemeKind::UniB, SchemeKind::Bcast];

    pub fn message_config(&self) -> MessageConfig {
        match self {
            SchemeKind::Bcast => MessageConfig::UnicastAndBroadcast,
            _ => MessageConfig::UnicastOnly,
        }
    }

    /// Split, extension factor and stream dimensions for `cfg`.
    pub fn layout(&self, cfg: &AntennaConfig) -> Result<SchemeLayout> {
        let [m1, m2, m3] = cfg.counts();
        if m3 == 0 {
            return Err(Error::RegimeMismatch(format!("{cfg}: every node needs at least one antenna")));
        }
        let (ext, mt, mr, dims) = match self {
            SchemeKind::UniA => {
                if m1 > m2 + m3 {
                    return Err(Error::RegimeMismatch(format!("{self} needs M1 <= M2 + M3, got {cfg}")));
                }
                let ext = if (m2 + m3 - m1) % 3 == 0 { 1 } else { 3 };
                let [m1, m2, m3] = cfg.scaled(ext).counts().map(|x| x as usize);
                if m3 < 3 {
                    return Err(Error::RegimeMismatch(format!(
                        "{self} needs Ml >= 3 at every node to split transmit and receive antennas, got {cfg}{}",
                        if ext > 1 { format!(" (scaled to ({m1},{m2},{m3}))") } else { String::new() }
                    )));
                }
                let k = (m2 + m3 - m1) / 3;
                let mt = [m1, k, k];
                let mr = [0, m2 - k, m3 - k];
                let dims = vec![
                    (MessageId::unicast(1, 2), mt[0] - mr[2]),
                    (MessageId::unicast(1, 3), mt[0] - mr[1]),
                    (MessageId::unicast(2, 3), mt[1]),
                    (MessageId::unicast(3, 2), mt[2]),
                ];
                (ext, mt, mr, dims)
            }
            SchemeKind::UniB => {
                if m1 < m2 + m3 {
                    return Err(Error::RegimeMismatch(format!("{self} needs M1 >= M2 + M3, got {cfg}")));
                }
                let [m1, m2, m3] = [m1, m2, m3].map(|x| x as usize);
                let dims = vec![(MessageId::unicast(2, 1), m2), (MessageId::unicast(3, 1), m3)];
                (1, [m1 - m2 - m3, m2, m3], [m2 + m3, 0, 0], dims)
            }
            SchemeKind::Bcast => {
                let [m1, m2, m3] = [m1, m2, m3].map(|x| x as usize);
                let dims = vec![(MessageId::unicast(2, 1), m2 - m3), (MessageId::broadcast(3), m3)];
                (1, [m1 - m2, m2 - m3, m3], [m2, m3, 0], dims)
            }
        };
        Ok(SchemeLayout { kind: *self, config: *cfg, extension_factor: ext, split: IntegerSplit { mt, mr }, dims })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::UniA => "uni-a",
            SchemeKind::UniB => "uni-b",
            SchemeKind::Bcast => "bcast",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "uni-a" | "unia" => Ok(SchemeKind::UniA),
            "uni-b" | "unib" => Ok(SchemeKind::UniB),
            "bcast" | "broadcast" => Ok(SchemeKind::Bcast),
            _ => Err(Error::InvalidInput(format!("unknown scheme {s:?}; expected uni-a, uni-b or bcast"))),
        }
    }
}

/// Everything about a scheme that does not depend on the channel draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeLayout {
    pub kind: SchemeKind,
    pub config: AntennaConfig,
    pub extension_factor: u32,
    /// Split at the extended configuration.
    pub split: IntegerSplit,
    pub dims: Vec<(MessageId, usize)>,
}

impl SchemeLayout {
    /// `Σ dims`, broadcast streams counted twice.
    pub fn weighted_streams(&self) -> usize {
        self.dims.iter().map(|(id, d)| d * id.weight() as usize).sum()
    }

    pub fn dof(&self) -> Rational {
        frac(self.weighted_streams() as i64, i64::from(self.extension_factor))
    }

    /// Channel realization of the right (extended) size.
    pub fn draw_channels(&self, seed: u64) -> Result<ChannelSet> {
        channel::draw_channels(&self.split.to_rational(), seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoder {
    pub receiver: usize,
    pub label: String,
    pub projector: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub message: MessageId,
    pub dim: usize,
    pub label: String,
    pub precoder: ComplexMatrix,
    pub decoders: Vec<Decoder>,
}

impl Stream {
    /// `G = Qᴴ H T` for one of this stream's decoders.
    pub fn effective(&self, decoder: &Decoder, channels: &ChannelSet) -> Result<ComplexMatrix> {
        let h = channels.h(self.message.transmitter(), decoder.receiver);
        decoder.projector.adjoint().try_mul(&h.try_mul(&self.precoder)?)
    }

    fn effective_label(&self, decoder: &Decoder) -> String {
        let suffix = message_suffix(self.message);
        if self.message.is_broadcast() {
            format!("G_{suffix}@{}", decoder.receiver)
        } else {
            format!("G_{suffix}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeInstance {
    pub kind: SchemeKind,
    pub config: AntennaConfig,
    pub extension_factor: u32,
    pub split: IntegerSplit,
    pub streams: Vec<Stream>,
    pub messages: MessageSet,
    pub seed: u64,
}

impl SchemeInstance {
    /// Streams sent by `node`, summed over its messages.
    pub fn streams_at(&self, node: usize) -> usize {
        self.streams.iter().filter(|s| s.message.transmitter() == node).map(|s| s.dim).sum()
    }

    pub fn stream(&self, message: MessageId) -> Option<&Stream> {
        self.streams.iter().find(|s| s.message == message)
    }

    /// Counted DoF: `Σ dims` (broadcast twice) over the extension factor.
    pub fn dof(&self) -> Rational {
        let weighted: usize = self.streams.iter().map(|s| s.dim * s.message.weight() as usize).sum();
        frac(weighted as i64, i64::from(self.extension_factor))
    }
}

fn message_suffix(id: MessageId) -> String {
    id.to_string()[1..].to_string()
}

fn projector_label(id: MessageId, receiver: usize) -> String {
    let prefix = if receiver == 1 { "V" } else { "Q" };
    format!("{prefix}_{}", message_suffix(id))
}

fn check_channels(layout: &SchemeLayout, channels: &ChannelSet) -> Result<()> {
    if channels.split() == &layout.split {
        return Ok(());
    }
    let got = channels.split();
    let hint = if layout.extension_factor > 1 {
        format!("; symbol extension by {} requires drawing at the scaled configuration", layout.extension_factor)
    } else {
        String::new()
    };
    Err(Error::InvalidInput(format!(
        "channels drawn for mt={:?} mr={:?}, but {} on {} needs mt={:?} mr={:?}{hint}",
        got.mt, got.mr, layout.kind, layout.config, layout.split.mt, layout.split.mr
    )))
}

fn random_precoder(rows: usize, cols: usize, rng: &mut impl rand::RngCore) -> Result<ComplexMatrix> {
    orthonormalize_columns(&random_gaussian_from(rows, cols, rng))
}

/// First `dim` columns of an orthonormal basis of `null(Aᴴ)`, the receive
/// directions that see nothing of the signal space `A`.
fn orthogonal_to(a: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    Ok(null_space_basis(&a.adjoint())?.leading_columns(dim))
}

/// First `dim` columns of an orthonormal basis of `null(H)`.
fn null_precoder(h: &ComplexMatrix, dim: usize) -> Result<ComplexMatrix> {
    Ok(null_space_basis(h)?.leading_columns(dim))
}

/// A message with its precoder and `(receiver, projector)` decoders.
type StreamParts = (MessageId, ComplexMatrix, Vec<(usize, ComplexMatrix)>);

fn assemble(layout: SchemeLayout, seed: u64, parts: Vec<StreamParts>) -> Result<SchemeInstance> {
    let ext = i64::from(layout.extension_factor);
    let messages = MessageSet::new(
        layout.kind.message_config(),
        layout.dims.iter().map(|&(id, d)| (id, frac(d as i64, ext))),
    )?;
    let streams = parts
        .into_iter()
        .map(|(message, precoder, decoders)| {
            let dim = layout.dims.iter().find(|(id, _)| *id == message).map_or(0, |(_, d)| *d);
            Stream {
                message,
                dim,
                label: format!("T_{}", message_suffix(message)),
                precoder,
                decoders: decoders
                    .into_iter()
                    .map(|(receiver, projector)| Decoder { receiver, label: projector_label(message, receiver), projector })
                    .collect(),
            }
        })
        .collect();
    Ok(SchemeInstance {
        kind: layout.kind,
        config: layout.config,
        extension_factor: layout.extension_factor,
        split: layout.split,
        streams,
        messages,
        seed,
    })
}

fn dim_of(layout: &SchemeLayout, id: MessageId) -> usize {
    layout.dims.iter().find(|(m, _)| *m == id).map_or(0, |(_, d)| *d)
}

/// Unicast scheme for `M1 ≤ M2 + M3`. `channels` must be drawn at the
/// layout's (possibly extended) split.
pub fn build_uni_a(cfg: &AntennaConfig, channels: &ChannelSet, seed: u64) -> Result<SchemeInstance> {
    let layout = SchemeKind::UniA.layout(cfg)?;
    check_channels(&layout, channels)?;
    let (u12, u13, u23, u32_) =
        (MessageId::unicast(1, 2), MessageId::unicast(1, 3), MessageId::unicast(2, 3), MessageId::unicast(3, 2));
    let sp = layout.split;
    let mut rng = rng_for(seed, PRECODER_STREAM);

    let t12 = null_precoder(channels.h(1, 3), dim_of(&layout, u12))?;
    let t13 = null_precoder(channels.h(1, 2), dim_of(&layout, u13))?;
    let t23 = random_precoder(sp.mt(2), dim_of(&layout, u23), &mut rng)?;
    let t32 = random_precoder(sp.mt(3), dim_of(&layout, u32_), &mut rng)?;

    let q12 = orthogonal_to(&(channels.h(3, 2) * &t32), dim_of(&layout, u12))?;
    let q32 = orthogonal_to(&(channels.h(1, 2) * &t12), dim_of(&layout, u32_))?;
    let q13 = orthogonal_to(&(channels.h(2, 3) * &t23), dim_of(&layout, u13))?;
    let q23 = orthogonal_to(&(channels.h(1, 3) * &t13), dim_of(&layout, u23))?;

    assemble(
        layout,
        seed,
        vec![
            (u12, t12, vec![(2, q12)]),
            (u13, t13, vec![(3, q13)]),
            (u23, t23, vec![(3, q23)]),
            (u32_, t32, vec![(2, q32)]),
        ],
    )
}

/// Unicast scheme for `M1 ≥ M2 + M3`: nodes 2 and 3 send everything to
/// node 1, which separates the two by zero-forcing.
pub fn build_uni_b(cfg: &AntennaConfig, channels: &ChannelSet, seed: u64) -> Result<SchemeInstance> {
    let layout = SchemeKind::UniB.layout(cfg)?;
    check_channels(&layout, channels)?;
    let (u21, u31) = (MessageId::unicast(2, 1), MessageId::unicast(3, 1));
    let sp = layout.split;
    let mut rng = rng_for(seed, PRECODER_STREAM);

    let t21 = random_precoder(sp.mt(2), dim_of(&layout, u21), &mut rng)?;
    let t31 = random_precoder(sp.mt(3), dim_of(&layout, u31), &mut rng)?;
    let v21 = orthogonal_to(&(channels.h(3, 1) * &t31), dim_of(&layout, u21))?;
    let v31 = orthogonal_to(&(channels.h(2, 1) * &t21), dim_of(&layout, u31))?;

    assemble(layout, seed, vec![(u21, t21, vec![(1, v21)]), (u31, t31, vec![(1, v31)])])
}

/// Unicast plus broadcast: node 3 broadcasts to nodes 1 and 2 while node 2
/// sends a unicast stream to node 1.
pub fn build_bcast(cfg: &AntennaConfig, channels: &ChannelSet, seed: u64) -> Result<SchemeInstance> {
    let layout = SchemeKind::Bcast.layout(cfg)?;
    check_channels(&layout, channels)?;
    let (u21, u3bc) = (MessageId::unicast(2, 1), MessageId::broadcast(3));
    let sp = layout.split;
    let mut rng = rng_for(seed, PRECODER_STREAM);

    let t21 = random_precoder(sp.mt(2), dim_of(&layout, u21), &mut rng)?;
    let t3 = random_precoder(sp.mt(3), dim_of(&layout, u3bc), &mut rng)?;
    let v21 = orthogonal_to(&(channels.h(3, 1) * &t3), dim_of(&layout, u21))?;
    let v3 = orthogonal_to(&(channels.h(2, 1) * &t21), dim_of(&layout, u3bc))?;
    // Node 2 hears only node 3, and M_R2 = M_T3, so the full receive space works.
    let q3 = ComplexMatrix::identity(sp.mr(2));

    assemble(layout, seed, vec![(u21, t21, vec![(1, v21)]), (u3bc, t3, vec![(1, v3), (2, q3)])])
}

pub fn build_scheme(kind: SchemeKind, cfg: &AntennaConfig, channels: &ChannelSet, seed: u64) -> Result<SchemeInstance> {
    match kind {
        SchemeKind::UniA => build_uni_a(cfg, channels, seed),
        SchemeKind::UniB => build_uni_b(cfg, channels, seed),
        SchemeKind::Bcast => build_bcast(cfg, channels, seed),
    }
}

/// Acceptance thresholds for [`verify_scheme_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative leakage `‖Qᴴ H T‖ / (‖H‖ ‖T‖)` of any interfering stream.
    pub residual: f64,
    /// `σ_min(G)` must exceed this times `‖H‖₂ ‖T‖₂ ≥ σ_max(G)`.
    pub conditioning: f64,
    /// Relative error of the noiseless decode.
    pub round_trip: f64,
    /// `‖QᴴQ − I‖₂` for projectors and precoders.
    pub orthonormality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-10, conditioning: 1e-8, round_trip: 1e-8, orthonormality: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    Valid,
    Invalid,
}

/// Checks for one message at one receiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoderCheck {
    pub message: MessageId,
    pub receiver: usize,
    pub projector: String,
    pub effective: String,
    pub dim: usize,
    pub interference_residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `σ_max / σ_min` of the effective matrix; `None` when it is empty.
    pub condition_number: Option<f64>,
    pub projector_defect: f64,
    pub round_trip_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmitterCheck {
    pub node: usize,
    pub streams: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scheme: SchemeKind,
    pub config: AntennaConfig,
    pub extension_factor: u32,
    pub split: IntegerSplit,
    pub status: Validity,
    /// Labels of the matrices whose checks failed.
    pub failures: Vec<String>,
    pub decoders: Vec<DecoderCheck>,
    pub transmitters: Vec<TransmitterCheck>,
    pub stream_dims: Vec<(MessageId, usize)>,
    #[serde(with = "rational::pq")]
    pub achieved_dof: Rational,
    pub max_interference_residual: f64,
    pub max_round_trip_error: f64,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.status == Validity::Valid
    }
}

pub fn verify_scheme(s: &SchemeInstance, channels: &ChannelSet) -> Result<VerificationReport> {
    verify_scheme_with(s, channels, &Tolerances::default())
}

/// Numerical decodability checks on one channel realization. Failing checks
/// mark the report invalid; only a channel set of the wrong shape is an
/// error.
pub fn verify_scheme_with(s: &SchemeInstance, channels: &ChannelSet, tol: &Tolerances) -> Result<VerificationReport> {
    if channels.split() != &s.split {
        return Err(Error::InvalidInput(format!(
            "scheme was built for mt={:?} mr={:?}, channels are mt={:?} mr={:?}",
            s.split.mt,
            s.split.mr,
            channels.split().mt,
            channels.split().mr
        )));
    }
    let mut failures = Vec::new();

    for st in &s.streams {
        let (rows, cols) = st.precoder.shape();
        if rows != s.split.mt(st.message.transmitter()) || cols != st.dim {
            failures.push(format!("{} has shape {rows}x{cols}", st.label));
        } else if st.dim > 0 && numerical_rank(&st.precoder, 0.0)? < st.dim {
            failures.push(format!("{} rank-deficient", st.label));
        }
    }
    let mut transmitters = Vec::new();
    for node in NODES {
        let blocks: Vec<&ComplexMatrix> = s
            .streams
            .iter()
            .filter(|st| st.message.transmitter() == node && st.precoder.rows() == s.split.mt(node))
            .map(|st| &st.precoder)
            .collect();
        let stacked = ComplexMatrix::hstack(s.split.mt(node), &blocks)?;
        let rank = if stacked.is_empty() { 0 } else { numerical_rank(&stacked, 0.0)? };
        if rank < stacked.cols() {
            failures.push(format!("T_{node} rank-deficient"));
        }
        transmitters.push(TransmitterCheck { node, streams: stacked.cols(), rank });
    }

    let symbols: Vec<ComplexVector> = {
        let mut rng = rng_for(s.seed, SYMBOL_STREAM);
        s.streams.iter().map(|st| random_gaussian_vector(st.dim, &mut rng)).collect()
    };
    let shapes_ok = failures.iter().all(|f| !f.contains("shape"));
    let y = if shapes_ok {
        let mut x: [ComplexVector; 3] = NODES.map(|n| ComplexVector::zeros(s.split.mt(n)));
        for (st, u) in s.streams.iter().zip(&symbols) {
            x[st.message.transmitter() - 1] += st.precoder.mul_vec(u)?;
        }
        let noise = NODES.map(|n| ComplexVector::zeros(s.split.mr(n)));
        Some(channel::receive(channels, &x, &noise)?)
    } else {
        None
    };

    let mut decoders = Vec::new();
    for (st, u) in s.streams.iter().zip(&symbols) {
        for dec in &st.decoders {
            decoders.push(check_decoder(s, st, dec, u, y.as_ref(), channels, tol, &mut failures)?);
        }
    }

    let max_of = |f: fn(&DecoderCheck) -> f64| decoders.iter().map(f).fold(0.0, f64::max);
    let max_interference_residual = max_of(|d| d.interference_residual);
    let max_round_trip_error = max_of(|d| d.round_trip_error);
    Ok(VerificationReport {
        scheme: s.kind,
        config: s.config,
        extension_factor: s.extension_factor,
        split: s.split,
        status: if failures.is_empty() { Validity::Valid } else { Validity::Invalid },
        failures,
        decoders,
        transmitters,
        stream_dims: s.streams.iter().map(|st| (st.message, st.dim)).collect(),
        achieved_dof: s.dof(),
        max_interference_residual,
        max_round_trip_error,
        tolerances: *tol,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_decoder(
    s: &SchemeInstance,
    st: &Stream,
    dec: &Decoder,
    u: &ComplexVector,
    y: Option<&[ComplexVector; 3]>,
    channels: &ChannelSet,
    tol: &Tolerances,
    failures: &mut Vec<String>,
) -> Result<DecoderCheck> {
    let g_label = st.effective_label(dec);
    let mut check = DecoderCheck {
        message: st.message,
        receiver: dec.receiver,
        projector: dec.label.clone(),
        effective: g_label.clone(),
        dim: st.dim,
        interference_residual: 0.0,
        sigma_min: 0.0,
        sigma_max: 0.0,
        condition_number: None,
        projector_defect: 0.0,
        round_trip_error: 0.0,
    };
    let (rows, cols) = dec.projector.shape();
    if rows != s.split.mr(dec.receiver) || cols != st.dim {
        failures.push(format!("{} has shape {rows}x{cols}", dec.label));
        check.round_trip_error = f64::INFINITY;
        return Ok(check);
    }
    check.projector_defect = if cols == 0 { 0.0 } else { dec.projector.orthonormality_defect() };
    if check.projector_defect > tol.orthonormality {
        failures.push(format!("{} not orthonormal", dec.label));
    }

    let qh = dec.projector.adjoint();
    for other in s.streams.iter().filter(|o| o.message != st.message && o.message.transmitter() != dec.receiver) {
        if other.precoder.rows() != s.split.mt(other.message.transmitter()) {
            continue;
        }
        let h = channels.h(other.message.transmitter(), dec.receiver);
        let scale = h.frobenius_norm() * other.precoder.frobenius_norm();
        if scale == 0.0 || cols == 0 {
            continue;
        }
        let leak = (&qh * &(h * &other.precoder)).frobenius_norm() / scale;
        check.interference_residual = check.interference_residual.max(leak);
        if leak > tol.residual {
            failures.push(format!("{} leaks {}", dec.label, other.message));
        }
    }

    let g = st.effective(dec, channels)?;
    if st.dim > 0 {
        let sv = g.singular_values();
        check.sigma_max = sv[0];
        check.sigma_min = *sv.last().expect("nonempty");
        check.condition_number = Some(check.sigma_max / check.sigma_min);
        let reference = channels.h(st.message.transmitter(), dec.receiver).spectral_norm() * st.precoder.spectral_norm();
        if !(check.sigma_min > tol.conditioning * reference) {
            failures.push(format!("{g_label} rank-deficient"));
        }
    }

    if let Some(y) = y {
        let z = qh.mul_vec(&y[dec.receiver - 1])?;
        check.round_trip_error = match solve_square(&g, &z) {
            Ok(u_hat) if u.norm() > 0.0 => (u_hat - u).norm() / u.norm(),
            Ok(_) => 0.0,
            Err(_) => f64::INFINITY,
        };
        if !(check.round_trip_error <= tol.round_trip) {
            failures.push(format!("{} round trip at node {}", st.message, dec.receiver));
        }
    }
    Ok(check)
}
