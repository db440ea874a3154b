//! Optimal transmit/receive antenna allocation.
//!
//! For unicast traffic the objective is the combined cut-set/genie bound
//! maximised over all splits `M_Tℓ + M_Rℓ = Mℓ`. It is solved three
//! independent ways: a closed form, an exact enumeration of linear
//! subproblems (one per branch choice of every `max` in the objective) with a
//! primal/dual certificate, and a grid search. With broadcast traffic the
//! optimum is `M2 + M3`, attained by a whole band of transmit allocations.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::genie_terms;
use crate::channel::{AntennaConfig, AntennaSplit};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram};
use crate::rational::{self, frac, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `M1 ≤ M2 + M3`: node 1 does not dominate.
    #[serde(rename = "m1-le-m2+m3")]
    Balanced,
    /// `M1 > M2 + M3`: the two weaker nodes only transmit to and receive from
    /// node 1.
    #[serde(rename = "m1-gt-m2+m3")]
    Dominant,
    Broadcast,
}

impl Regime {
    pub fn of(cfg: &AntennaConfig) -> Self {
        let [m1, m2, m3] = cfg.counts();
        if m1 <= m2 + m3 {
            Regime::Balanced
        } else {
            Regime::Dominant
        }
    }
}

/// Inclusive band `[lower, upper]` for `ΣM_T`, valid with `0 ≤ M_Tℓ ≤ Mℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransmitSumBand {
    #[serde(with = "rational::pq")]
    pub lower: Rational,
    #[serde(with = "rational::pq")]
    pub upper: Rational,
}

impl TransmitSumBand {
    pub fn contains(&self, split: &AntennaSplit) -> bool {
        let sum: Rational = split.transmit().iter().sum();
        self.lower <= sum && sum <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    ClosedForm {
        formula: String,
    },
    DualityPair {
        /// Branch of each `max` term: 0 takes the receive-side argument.
        pattern: [u8; 6],
        lp: LinearProgram,
        #[serde(with = "rational::pq_vec")]
        v: Vec<Rational>,
        #[serde(with = "rational::pq_vec")]
        lambda: Vec<Rational>,
        #[serde(with = "rational::pq")]
        gap: Rational,
        subproblems_solved: usize,
        subproblems_feasible: usize,
    },
    Exhaustive {
        denominator: u32,
        points: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllocationResult {
    #[serde(with = "rational::pq")]
    pub optimal_dof: Rational,
    pub split: AntennaSplit,
    pub certificate: Certificate,
    pub regime: Regime,
    /// Symbol extension needed to make the split and DoF integral.
    pub extension_factor: i64,
    /// Set of optimal transmit sums, when the optimum is not unique.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<TransmitSumBand>,
}

fn extension_for(dof: Rational, split: &AntennaSplit) -> i64 {
    rational::lcm_denominators(std::iter::once(&dof).chain(split.transmit().iter()).chain(split.receive().iter()))
}

/// Closed-form optimum and its canonical split.
fn canonical(cfg: &AntennaConfig) -> (Rational, AntennaSplit, Regime, &'static str) {
    let [m1, m2, m3] = cfg.as_rationals();
    let regime = Regime::of(cfg);
    let (dof, mr, formula) = match regime {
        Regime::Balanced => {
            let formula = if m1 == m2 + m3 { "M1 + (M2+M3-M1)/3 = M2 + M3" } else { "M1 + (M2+M3-M1)/3" };
            let three = int(3);
            (
                m1 + (m2 + m3 - m1) / three,
                [int(0), (m1 + int(2) * m2 - m3) / three, (m1 + int(2) * m3 - m2) / three],
                formula,
            )
        }
        _ => (m2 + m3, [m2 + m3, int(0), int(0)], "M2 + M3"),
    };
    let split = AntennaSplit::from_receive(cfg, mr).expect("canonical split is nonnegative for ordered configs");
    (dof, split, regime, formula)
}

pub fn optimal_unicast_closed_form(cfg: &AntennaConfig) -> AllocationResult {
    let (dof, split, regime, formula) = canonical(cfg);
    AllocationResult {
        optimal_dof: dof,
        extension_factor: extension_for(dof, &split),
        split,
        certificate: Certificate::ClosedForm { formula: formula.into() },
        regime,
        band: None,
    }
}

/// Which branch patterns the enumerated solver visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationScope {
    /// All 64 patterns.
    Full,
    /// The 32 patterns with `M_R2 ≥ M_T3`. Any optimum either has this
    /// property or its transmit/receive mirror does, since otherwise
    /// `M2 < M3`.
    #[default]
    Halved,
}

/// Affine expression `coef · M_R + constant`.
#[derive(Clone, Copy)]
struct Affine {
    coef: [i64; 3],
    constant: Rational,
}

impl Affine {
    fn receive(node: usize) -> Self {
        let mut coef = [0; 3];
        coef[node - 1] = 1;
        Self { coef, constant: int(0) }
    }

    fn transmit(cfg: &AntennaConfig, node: usize) -> Self {
        let mut coef = [0; 3];
        coef[node - 1] = -1;
        Self { coef, constant: int(cfg.m(node).into()) }
    }

    fn plus(self, o: Self) -> Self {
        Self { coef: [0, 1, 2].map(|i| self.coef[i] + o.coef[i]), constant: self.constant + o.constant }
    }

    fn minus(self, o: Self) -> Self {
        Self { coef: [0, 1, 2].map(|i| self.coef[i] - o.coef[i]), constant: self.constant - o.constant }
    }
}

/// Receive/transmit argument pairs of the six `max` terms, in the order they
/// appear in the three pair-sum terms of the objective.
const MAX_TERMS: [(usize, usize); 6] = [(2, 3), (3, 2), (2, 1), (1, 2), (3, 1), (1, 3)];

const VARIABLES: [&str; 4] = ["d", "M_R1", "M_R2", "M_R3"];

fn row(d: i64, mr: [i64; 3]) -> Vec<Rational> {
    vec![int(d), int(mr[0]), int(mr[1]), int(mr[2])]
}

/// `d ≤ e` as a row `[1, −coef] ≤ constant`.
fn d_at_most(e: Affine) -> (Vec<Rational>, Rational) {
    (row(1, e.coef.map(|c| -c)), e.constant)
}

/// `e ≤ 0` as a row `[0, coef] ≤ −constant`.
fn nonpositive(e: Affine) -> (Vec<Rational>, Rational) {
    (row(0, e.coef), -e.constant)
}

/// Subproblem LP for one branch pattern, over `v = [d, M_R1, M_R2, M_R3]`,
/// maximising `d`. Row order: the three pair-sum terms, `M_Rℓ ≤ Mℓ`,
/// `d ≥ 0`, `M_Rℓ ≥ 0`, the six branch conditions, then `d ≤ ΣM_T` and
/// `d ≤ ΣM_R`.
pub fn subproblem_lp(cfg: &AntennaConfig, pattern: [u8; 6]) -> LinearProgram {
    let chosen: Vec<Affine> = MAX_TERMS
        .iter()
        .zip(pattern)
        .map(|(&(r, t), bit)| if bit == 0 { Affine::receive(r) } else { Affine::transmit(cfg, t) })
        .collect();
    let mut rows: Vec<(Vec<Rational>, Rational, String)> = Vec::with_capacity(18);
    let term_labels = ["pair(2,3)", "pair(1,2)", "pair(1,3)"];
    for (k, label) in term_labels.iter().enumerate() {
        let (a, b) = d_at_most(chosen[2 * k].plus(chosen[2 * k + 1]));
        rows.push((a, b, format!("d <= {label}")));
    }
    for l in 1..=3 {
        let mut mr = [0; 3];
        mr[l - 1] = 1;
        rows.push((row(0, mr), int(cfg.m(l).into()), format!("M_R{l} <= M{l}")));
    }
    rows.push((row(-1, [0; 3]), int(0), "d >= 0".into()));
    for l in 1..=3 {
        let mut mr = [0; 3];
        mr[l - 1] = -1;
        rows.push((row(0, mr), int(0), format!("M_R{l} >= 0")));
    }
    for (&(r, t), bit) in MAX_TERMS.iter().zip(pattern) {
        let (rx, tx) = (Affine::receive(r), Affine::transmit(cfg, t));
        let (cond, label) = if bit == 0 {
            (tx.minus(rx), format!("M_R{r} >= M_T{t}"))
        } else {
            (rx.minus(tx), format!("M_T{t} >= M_R{r}"))
        };
        let (a, b) = nonpositive(cond);
        rows.push((a, b, label));
    }
    let sum_t = (1..=3).map(|l| Affine::transmit(cfg, l)).reduce(Affine::plus).expect("three nodes");
    let sum_r = (1..=3).map(Affine::receive).reduce(Affine::plus).expect("three nodes");
    let (a, b) = d_at_most(sum_t);
    rows.push((a, b, "d <= ΣM_T".into()));
    let (a, b) = d_at_most(sum_r);
    rows.push((a, b, "d <= ΣM_R".into()));

    let (a, rest): (Vec<_>, Vec<_>) = rows.into_iter().map(|(a, b, l)| (a, (b, l))).unzip();
    let (b, labels): (Vec<_>, Vec<_>) = rest.into_iter().unzip();
    LinearProgram::new(row(-1, [0; 3]), a, b, VARIABLES.map(String::from).to_vec(), labels)
        .expect("subproblem dimensions are fixed")
}

/// Branch pattern a split lies in; ties take the receive side.
pub fn pattern_of(split: &AntennaSplit) -> [u8; 6] {
    MAX_TERMS.map(|(r, t)| u8::from(split.mr(r) < split.mt(t)))
}

fn patterns(scope: EnumerationScope) -> Vec<[u8; 6]> {
    (0u8..64)
        .map(|bits| [0, 1, 2, 3, 4, 5].map(|k| (bits >> (5 - k)) & 1))
        .filter(|p| scope == EnumerationScope::Full || p[0] == 0)
        .collect()
}

/// Solves every branch subproblem in `scope` over exact rationals and
/// returns the best, certified by a zero-gap primal/dual pair. Among equal
/// optima the canonical closed-form split is preferred.
pub fn optimal_unicast_enumerated_with(cfg: &AntennaConfig, scope: EnumerationScope) -> Result<AllocationResult> {
    let (_, canon_split, regime, _) = canonical(cfg);
    let canon_pattern = pattern_of(&canon_split);
    let canon_v: Vec<Rational> = {
        let d = rational::min_of(genie_terms(canon_split.transmit(), canon_split.receive()));
        std::iter::once(d).chain(canon_split.receive()).collect()
    };

    let mut todo = patterns(scope);
    if !todo.contains(&canon_pattern) {
        todo.push(canon_pattern);
    }
    let solved: Vec<([u8; 6], LinearProgram, Option<lp::LpOptimum>)> = todo
        .par_iter()
        .map(|&p| {
            let program = subproblem_lp(cfg, p);
            let prefer = (p == canon_pattern).then_some(canon_v.as_slice());
            program.solve_by_vertices(prefer).map(|opt| (p, program, opt))
        })
        .collect::<Result<_>>()?;

    let feasible = solved.iter().filter(|s| s.2.is_some()).count();
    let best_value = solved
        .iter()
        .filter_map(|s| s.2.as_ref().map(|o| o.value))
        .min()
        .ok_or_else(|| Error::Internal(format!("every allocation subproblem is infeasible for {cfg}")))?;
    let rank = |s: &([u8; 6], LinearProgram, Option<lp::LpOptimum>)| {
        let opt = s.2.as_ref().expect("filtered to feasible");
        (opt.v != canon_v, s.0 != canon_pattern)
    };
    let (pattern, program, opt) = solved
        .iter()
        .filter(|s| s.2.as_ref().is_some_and(|o| o.value == best_value))
        .min_by_key(|s| rank(s))
        .map(|(p, l, o)| (*p, l.clone(), o.clone().expect("filtered to feasible")))
        .expect("best value is attained");

    let cert = lp::verify_duality(&program, &opt.v, &opt.lambda)?;
    if !cert.is_optimal() {
        return Err(Error::Internal(format!("subproblem certificate failed: {:?}", cert.status)));
    }
    let dof = opt.v[0];
    let split = AntennaSplit::from_receive(cfg, [opt.v[1], opt.v[2], opt.v[3]])?;
    Ok(AllocationResult {
        optimal_dof: dof,
        extension_factor: extension_for(dof, &split),
        split,
        certificate: Certificate::DualityPair {
            pattern,
            lp: program,
            v: opt.v,
            lambda: opt.lambda,
            gap: cert.gap,
            subproblems_solved: solved.len(),
            subproblems_feasible: feasible,
        },
        regime,
        band: None,
    })
}

pub fn optimal_unicast_enumerated(cfg: &AntennaConfig) -> Result<AllocationResult> {
    optimal_unicast_enumerated_with(cfg, EnumerationScope::Halved)
}

/// Grid search over all splits with receive counts on the `1/denominator`
/// grid. Ties prefer the canonical split, then the lexicographically
/// smallest `M_R`.
pub fn optimal_unicast_bruteforce(cfg: &AntennaConfig, denominator: u32) -> Result<AllocationResult> {
    if denominator == 0 {
        return Err(Error::InvalidInput("grid denominator must be at least 1".into()));
    }
    let q = i64::from(denominator);
    let m = cfg.counts().map(|x| i64::from(x) * q);
    let (_, canon_split, regime, _) = canonical(cfg);
    let canon_k = canon_split.receive().map(|r| r * int(q));

    let mut best: Option<(i64, [i64; 3])> = None;
    let mut points = 0u64;
    for k1 in 0..=m[0] {
        for k2 in 0..=m[1] {
            for k3 in 0..=m[2] {
                points += 1;
                let mr = [k1, k2, k3];
                let mt = [m[0] - k1, m[1] - k2, m[2] - k3];
                let value = genie_terms(mt, mr).into_iter().min().expect("five terms");
                if best.is_none_or(|(b, _)| value > b) {
                    best = Some((value, mr));
                }
            }
        }
    }
    let (value, mut mr) = best.expect("grid is nonempty");
    if canon_k.iter().all(|x| x.is_integer()) {
        let ck = canon_k.map(|x| x.to_integer());
        let cmt = [m[0] - ck[0], m[1] - ck[1], m[2] - ck[2]];
        if genie_terms(cmt, ck).into_iter().min() == Some(value) {
            mr = ck;
        }
    }
    let dof = frac(value, q);
    let split = AntennaSplit::from_receive(cfg, mr.map(|k| frac(k, q)))?;
    Ok(AllocationResult {
        optimal_dof: dof,
        extension_factor: extension_for(dof, &split),
        split,
        certificate: Certificate::Exhaustive { denominator, points },
        regime,
        band: None,
    })
}

/// Band of optimal transmit sums with broadcast traffic.
pub fn broadcast_band(cfg: &AntennaConfig) -> TransmitSumBand {
    TransmitSumBand { lower: int(cfg.m(2).into()), upper: int(cfg.m(1).into()) }
}

/// Optimum with unicast and broadcast traffic: `M2 + M3`, with the canonical
/// split `M_T = (M1−M2, M2−M3, M3)`. Every split whose transmit sum lies in
/// [`broadcast_band`] is also optimal.
pub fn optimal_broadcast(cfg: &AntennaConfig) -> Result<AllocationResult> {
    let [m1, m2, m3] = cfg.as_rationals();
    let split = AntennaSplit::from_transmit(cfg, [m1 - m2, m2 - m3, m3])?;
    let band = broadcast_band(cfg);
    if !band.contains(&split) {
        return Err(Error::Internal(format!("canonical broadcast split {split} lies outside the optimal band")));
    }
    let dof = m2 + m3;
    Ok(AllocationResult {
        optimal_dof: dof,
        extension_factor: 1,
        split,
        certificate: Certificate::ClosedForm { formula: "M2 + M3".into() },
        regime: Regime::Broadcast,
        band: Some(band),
    })
}

/// The single subproblem solved analytically for `M1 ≤ M2 + M3`, as a
/// 17-row program over `[d, M_R1, M_R2, M_R3]`. The last row is all zeros
/// with right-hand side `M2 + M3 − M1`, so it holds exactly in that regime.
pub fn reference_subproblem_lp(cfg: &AntennaConfig) -> LinearProgram {
    let [m1, m2, m3] = cfg.as_rationals();
    let rows: [([i64; 4], Rational, &str); 17] = [
        ([1, 0, -1, -1], int(0), "d <= M_R2 + M_R3"),
        ([1, 1, 1, 0], m1 + m2, "d <= M_T1 + M_T2"),
        ([1, 1, 0, 1], m1 + m3, "d <= M_T1 + M_T3"),
        ([0, 1, 0, 0], m1, "M_R1 <= M1"),
        ([0, 0, 1, 0], m2, "M_R2 <= M2"),
        ([0, 0, 0, 1], m3, "M_R3 <= M3"),
        ([-1, 0, 0, 0], int(0), "d >= 0"),
        ([0, -1, 0, 0], int(0), "M_R1 >= 0"),
        ([0, 0, -1, 0], int(0), "M_R2 >= 0"),
        ([0, 0, 0, -1], int(0), "M_R3 >= 0"),
        ([0, 0, -1, -1], -m3, "M_R2 >= M_T3"),
        ([0, 0, -1, -1], -m2, "M_R3 >= M_T2"),
        ([0, 1, 1, 0], m1, "M_T1 >= M_R2"),
        ([0, 1, 1, 0], m2, "M_T2 >= M_R1"),
        ([0, 1, 0, 1], m1, "M_T1 >= M_R3"),
        ([0, 1, 0, 1], m3, "M_T3 >= M_R1"),
        ([0, 0, 0, 0], m2 + m3 - m1, "M1 <= M2 + M3"),
    ];
    LinearProgram::new(
        vec![int(-1), int(0), int(0), int(0)],
        rows.iter().map(|(a, _, _)| a.iter().map(|&x| int(x)).collect()).collect(),
        rows.iter().map(|(_, b, _)| *b).collect(),
        VARIABLES.map(String::from).to_vec(),
        rows.iter().map(|(_, _, l)| (*l).to_string()).collect(),
    )
    .expect("fixed dimensions")
}

/// Closed-form primal/dual pair for [`reference_subproblem_lp`].
pub fn reference_duality_pair(cfg: &AntennaConfig) -> Result<(Vec<Rational>, Vec<Rational>)> {
    if Regime::of(cfg) != Regime::Balanced {
        return Err(Error::RegimeMismatch(format!("{cfg} has M1 > M2 + M3")));
    }
    let [m1, m2, m3] = cfg.as_rationals();
    let three = int(3);
    let v = vec![
        (int(2) * m1 + m2 + m3) / three,
        int(0),
        (m1 + int(2) * m2 - m3) / three,
        (m1 + int(2) * m3 - m2) / three,
    ];
    let mut lambda = vec![int(0); 17];
    lambda[0] = frac(1, 3);
    lambda[1] = frac(1, 3);
    lambda[2] = frac(1, 3);
    lambda[7] = frac(2, 3);
    Ok((v, lambda))
}
