//! Monte-Carlo sum rates of zero-forcing schemes and the empirical DoF, the
//! slope of the mean sum rate against `log₂ SNR`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{optimal_broadcast, optimal_unicast_closed_form};
use crate::channel::{AntennaConfig, ChannelSet};
use crate::error::{Error, Result};
use crate::linalg::{child_seed, log2_det_hpd, orthonormalize_columns, random_gaussian_from, rng_for, ComplexMatrix};
use crate::rational::{self, Rational};
use crate::schemes::{build_scheme, verify_scheme, Decoder, SchemeInstance, SchemeKind, Stream};

/// Child-seed streams of the master seed.
const CHANNEL_STREAM: u64 = 0;
const SCHEME_STREAM: u64 = 1;
const BLIND_STREAM: u64 = 2;

/// How the receivers filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiveMode {
    /// The scheme's zero-forcing projectors; residual interference ignored.
    #[default]
    ZeroForcing,
    /// Ablation: each projector replaced by a random orthonormal basis of the
    /// same width, with the leaked interference treated as noise.
    Blind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeFit {
    /// Finite difference over the two largest SNR points.
    #[default]
    TopTwo,
    /// Least squares over the upper half of the grid (at least two points).
    LeastSquaresTopHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlopeOptions {
    pub fit: SlopeFit,
    pub mode: ReceiveMode,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Sum rate in bits per channel use of a verified-valid scheme.
pub fn sum_rate(s: &SchemeInstance, channels: &ChannelSet, snr_linear: f64) -> Result<f64> {
    let report = verify_scheme(s, channels)?;
    if !report.is_valid() {
        return Err(Error::InvalidScheme(report.failures.join(", ")));
    }
    rates_unchecked(s, channels, &[snr_linear], ReceiveMode::ZeroForcing, 0).map(|r| r[0])
}

/// Sum rate with the chosen receive mode; `seed` only matters for
/// [`ReceiveMode::Blind`].
pub fn sum_rate_with(s: &SchemeInstance, channels: &ChannelSet, snr_linear: f64, mode: ReceiveMode, seed: u64) -> Result<f64> {
    let report = verify_scheme(s, channels)?;
    if !report.is_valid() {
        return Err(Error::InvalidScheme(report.failures.join(", ")));
    }
    rates_unchecked(s, channels, &[snr_linear], mode, seed).map(|r| r[0])
}

/// Receive filters actually used under `mode`.
fn filters(s: &SchemeInstance, mode: ReceiveMode, seed: u64) -> Result<Vec<Vec<ComplexMatrix>>> {
    let mut rng = rng_for(seed, BLIND_STREAM);
    s.streams
        .iter()
        .map(|st| {
            st.decoders
                .iter()
                .map(|d| match mode {
                    ReceiveMode::ZeroForcing => Ok(d.projector.clone()),
                    ReceiveMode::Blind => {
                        orthonormalize_columns(&random_gaussian_from(d.projector.rows(), d.projector.cols(), &mut rng))
                    }
                })
                .collect()
        })
        .collect()
}

/// Per-SNR sum rates. Each message gets `log₂ det(R + S) − log₂ det(R)` with
/// `S = ρ GGᴴ`, `ρ = snr / (streams at the transmitter)` and `R` the
/// whitened noise plus, in blind mode, the leaked interference. A broadcast
/// message is limited by its weaker receiver and counts twice.
fn rates_unchecked(s: &SchemeInstance, channels: &ChannelSet, snrs: &[f64], mode: ReceiveMode, seed: u64) -> Result<Vec<f64>> {
    if let Some(bad) = snrs.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput(format!("SNR must be finite and nonnegative, got {bad}")));
    }
    let filters = filters(s, mode, seed)?;
    let per_stream = |st: &Stream| s.streams_at(st.message.transmitter()).max(1) as f64;

    let mut totals = vec![0.0; snrs.len()];
    for (st, fs) in s.streams.iter().zip(&filters) {
        if st.dim == 0 {
            continue;
        }
        let mut best: Option<Vec<f64>> = None;
        for (dec, q) in st.decoders.iter().zip(fs) {
            let used = Decoder { projector: q.clone(), ..dec.clone() };
            let g = st.effective(&used, channels)?;
            let interference: Vec<(ComplexMatrix, f64)> = match mode {
                ReceiveMode::ZeroForcing => Vec::new(),
                ReceiveMode::Blind => s
                    .streams
                    .iter()
                    .filter(|o| o.message != st.message && o.message.transmitter() != dec.receiver && o.dim > 0)
                    .map(|o| {
                        let h = channels.h(o.message.transmitter(), dec.receiver);
                        Ok((q.adjoint().try_mul(&h.try_mul(&o.precoder)?)?, per_stream(o)))
                    })
                    .collect::<Result<_>>()?,
            };
            let rates = snrs
                .iter()
                .map(|&snr| {
                    let signal = gram(&g, snr / per_stream(st));
                    let mut r = DMatrix::<Complex64>::identity(st.dim, st.dim);
                    for (a, n) in &interference {
                        r += gram(a, snr / n);
                    }
                    Ok(log2_det_hpd(&(&r + signal))? - log2_det_hpd(&r)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            best = Some(match best {
                None => rates,
                Some(prev) => prev.iter().zip(&rates).map(|(a, b)| a.min(*b)).collect(),
            });
        }
        let weight = st.message.weight() as f64;
        for (t, r) in totals.iter_mut().zip(best.unwrap_or_default()) {
            *t += weight * r;
        }
    }
    let ext = f64::from(s.extension_factor);
    Ok(totals.into_iter().map(|t| t / ext).collect())
}

/// `ρ AAᴴ`.
fn gram(a: &ComplexMatrix, rho: f64) -> DMatrix<Complex64> {
    let m = a.as_dmatrix();
    (m * m.adjoint()).scale(rho)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub config: AntennaConfig,
    pub scheme: SchemeKind,
    pub snr_grid_db: Vec<f64>,
    pub mean_sum_rate_bits: Vec<f64>,
    pub slope_dof: f64,
    pub trials: usize,
    pub valid_trials: usize,
    /// Indices of trials whose scheme failed verification.
    pub invalid_trials: Vec<usize>,
    #[serde(with = "rational::pq")]
    pub theoretical_dof: Rational,
    pub abs_error: f64,
    pub fit: SlopeFit,
    pub mode: ReceiveMode,
    pub seed: u64,
}

impl SlopeEstimate {
    /// Two columns, `snr_db,mean_rate`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,mean_rate\n");
        for (db, r) in self.snr_grid_db.iter().zip(&self.mean_sum_rate_bits) {
            out.push_str(&format!("{db},{r}\n"));
        }
        out
    }
}

/// DoF the scheme is designed to reach (the optimum for its message set).
pub fn theoretical_dof(cfg: &AntennaConfig, kind: SchemeKind) -> Result<Rational> {
    Ok(match kind {
        SchemeKind::Bcast => optimal_broadcast(cfg)?.optimal_dof,
        _ => optimal_unicast_closed_form(cfg).optimal_dof,
    })
}

pub fn estimate_dof(cfg: &AntennaConfig, kind: SchemeKind, snr_grid_db: &[f64], trials: usize, seed: u64) -> Result<SlopeEstimate> {
    estimate_dof_with(cfg, kind, snr_grid_db, trials, seed, SlopeOptions::default())
}

/// Draws `trials` channel sets from per-trial child seeds, builds and
/// verifies the scheme on each, and fits the slope of the mean sum rate.
/// Invalid draws are skipped and recorded.
pub fn estimate_dof_with(
    cfg: &AntennaConfig,
    kind: SchemeKind,
    snr_grid_db: &[f64],
    trials: usize,
    seed: u64,
    opts: SlopeOptions,
) -> Result<SlopeEstimate> {
    if snr_grid_db.len() < 2 {
        return Err(Error::Precondition("SNR grid needs at least two points".into()));
    }
    if snr_grid_db.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("SNR grid contains a non-finite value".into()));
    }
    let top = snr_grid_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top < 30.0 {
        return Err(Error::Precondition(format!("highest SNR point must be at least 30 dB, got {top}")));
    }
    let mut sorted = snr_grid_db.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("SNR grid contains duplicate points".into()));
    }
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let layout = kind.layout(cfg)?;
    let snrs: Vec<f64> = snr_grid_db.iter().map(|&db| db_to_linear(db)).collect();

    let outcomes: Vec<Option<Vec<f64>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let channels = layout.draw_channels(child_seed(seed, CHANNEL_STREAM, t as u64))?;
            let scheme_seed = child_seed(seed, SCHEME_STREAM, t as u64);
            let s = build_scheme(kind, cfg, &channels, scheme_seed)?;
            if !verify_scheme(&s, &channels)?.is_valid() {
                return Ok(None);
            }
            rates_unchecked(&s, &channels, &snrs, opts.mode, scheme_seed).map(Some)
        })
        .collect::<Result<_>>()?;

    let invalid_trials: Vec<usize> = outcomes.iter().enumerate().filter(|(_, o)| o.is_none()).map(|(i, _)| i).collect();
    let valid: Vec<&Vec<f64>> = outcomes.iter().flatten().collect();
    if valid.is_empty() {
        return Err(Error::AllTrialsInvalid(trials));
    }
    let mean: Vec<f64> =
        (0..snrs.len()).map(|k| valid.iter().map(|r| r[k]).sum::<f64>() / valid.len() as f64).collect();

    let slope_dof = fit_slope(snr_grid_db, &mean, opts.fit).max(0.0);
    let theoretical = theoretical_dof(cfg, kind)?;
    Ok(SlopeEstimate {
        config: *cfg,
        scheme: kind,
        snr_grid_db: snr_grid_db.to_vec(),
        mean_sum_rate_bits: mean,
        slope_dof,
        trials,
        valid_trials: valid.len(),
        invalid_trials,
        abs_error: (slope_dof - rational::to_f64(&theoretical)).abs(),
        theoretical_dof: theoretical,
        fit: opts.fit,
        mode: opts.mode,
        seed,
    })
}

/// Slope of `rate` against `log₂ snr`.
pub fn fit_slope(snr_db: &[f64], rate: &[f64], fit: SlopeFit) -> f64 {
    let mut pts: Vec<(f64, f64)> = snr_db.iter().map(|db| db / 10.0 * 10f64.log2()).zip(rate.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    let used = match fit {
        SlopeFit::TopTwo => &pts[n - 2..],
        SlopeFit::LeastSquaresTopHalf => &pts[n - (n / 2).max(2)..],
    };
    let k = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / k;
    let my = used.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
