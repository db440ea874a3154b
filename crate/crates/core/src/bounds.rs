//! Closed-form upper bounds on the total DoF for a given antenna split.
//!
//! Every bound is evaluated in exact rational arithmetic and reported with
//! its intermediate per-cut terms, each carrying a stable label, so callers
//! can see which inequality binds.

use std::ops::Add;

use serde::Serialize;

use crate::channel::AntennaSplit;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundTerm {
    pub label: String,
    #[serde(with = "rational::pq")]
    pub value: Rational,
}

impl BoundTerm {
    fn new(label: impl Into<String>, value: Rational) -> Self {
        Self { label: label.into(), value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    CutsetUnicast,
    GenieUnicast,
    CutsetBroadcast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub split: AntennaSplit,
    /// Intermediate inequalities (single cuts, their sums, genie triples).
    pub per_cut: Vec<BoundTerm>,
    /// Candidates whose minimum is the reported bound.
    pub combined_terms: Vec<BoundTerm>,
    #[serde(with = "rational::pq")]
    pub combined_cutset: Rational,
    #[serde(with = "rational::pq_opt")]
    pub combined_genie: Option<Rational>,
    /// Labels in `combined_terms` that attain the minimum.
    pub binding_terms: Vec<String>,
}

impl BoundReport {
    /// The tightest bound in the report.
    pub fn value(&self) -> Rational {
        self.combined_genie.unwrap_or(self.combined_cutset)
    }

    pub fn term(&self, label: &str) -> Option<Rational> {
        self.per_cut.iter().chain(&self.combined_terms).find(|t| t.label == label).map(|t| t.value)
    }
}

pub const CUTSET_UNICAST_LABELS: [&str; 3] = ["M_T2+M_T3+M_R2+M_R3", "ΣM_T", "ΣM_R"];

pub const GENIE_LABELS: [&str; 5] = [
    "ΣM_T",
    "ΣM_R",
    "max(M_R2,M_T3)+max(M_R3,M_T2)",
    "max(M_R2,M_T1)+max(M_R1,M_T2)",
    "max(M_R3,M_T1)+max(M_R1,M_T3)",
];

pub const CUTSET_BROADCAST_LABELS: [&str; 4] = ["ΣM_R", "M_T2+M_T3+M_R2+M_R3", "M_R3+M_T1+M_T2+2M_T3", "2ΣM_T"];

/// Candidates of the combined unicast cut-set bound, in
/// [`CUTSET_UNICAST_LABELS`] order.
pub fn cutset_unicast_terms<T: Copy + Add<Output = T>>(mt: [T; 3], mr: [T; 3]) -> [T; 3] {
    [mt[1] + mt[2] + mr[1] + mr[2], mt[0] + mt[1] + mt[2], mr[0] + mr[1] + mr[2]]
}

/// The five candidates of the combined cut-set + genie-aided unicast bound,
/// in [`GENIE_LABELS`] order. Generic so the grid search can run on scaled
/// integers.
pub fn genie_terms<T: Copy + Ord + Add<Output = T>>(mt: [T; 3], mr: [T; 3]) -> [T; 5] {
    let [t1, t2, t3] = mt;
    let [r1, r2, r3] = mr;
    [
        t1 + t2 + t3,
        r1 + r2 + r3,
        r2.max(t3) + r3.max(t2),
        r2.max(t1) + r1.max(t2),
        r3.max(t1) + r1.max(t3),
    ]
}

pub fn broadcast_cutset_terms<T: Copy + Add<Output = T>>(mt: [T; 3], mr: [T; 3]) -> [T; 4] {
    let [t1, t2, t3] = mt;
    let [r1, r2, r3] = mr;
    let sum_t = t1 + t2 + t3;
    [r1 + r2 + r3, t2 + t3 + r2 + r3, r3 + t1 + t2 + t3 + t3, sum_t + sum_t]
}

fn labeled<const N: usize>(labels: [&str; N], values: [Rational; N]) -> Vec<BoundTerm> {
    labels.iter().zip(values).map(|(l, v)| BoundTerm::new(*l, v)).collect()
}

fn minimum(terms: &[BoundTerm]) -> (Rational, Vec<String>) {
    let min = rational::min_of(terms.iter().map(|t| t.value));
    let binding = terms.iter().filter(|t| t.value == min).map(|t| t.label.clone()).collect();
    (min, binding)
}

/// Single-cut bounds for unicast traffic and their two sums.
fn unicast_cuts(split: &AntennaSplit) -> Vec<BoundTerm> {
    let [t1, t2, t3] = split.transmit();
    let [r1, r2, r3] = split.receive();
    let source_cuts = [
        BoundTerm::new("cut{1|23}", t1.min(r2 + r3)),
        BoundTerm::new("cut{2|13}", t2.min(r1 + r3)),
        BoundTerm::new("cut{3|12}", t3.min(r1 + r2)),
    ];
    let sink_cuts = [
        BoundTerm::new("cut{12|3}", (t1 + t2).min(r3)),
        BoundTerm::new("cut{23|1}", (t2 + t3).min(r1)),
        BoundTerm::new("cut{13|2}", (t1 + t3).min(r2)),
    ];
    let source_sum = source_cuts.iter().map(|t| t.value).sum();
    let sink_sum = sink_cuts.iter().map(|t| t.value).sum();
    let mut out: Vec<BoundTerm> = source_cuts.into_iter().collect();
    out.extend(sink_cuts);
    out.push(BoundTerm::new("cut{1|23}+cut{2|13}+cut{3|12}", source_sum));
    out.push(BoundTerm::new("cut{12|3}+cut{23|1}+cut{13|2}", sink_sum));
    out
}

/// The six three-message genie-aided bounds. The label names the node that
/// receives side information and the message the genie hands it.
pub fn genie_triples(split: &AntennaSplit) -> Vec<BoundTerm> {
    let [t1, t2, t3] = split.transmit();
    let [r1, r2, r3] = split.receive();
    vec![
        BoundTerm::new("genie{1|W23}: d21+d31+d32", r1.max(t3).min(t2 + t3)),
        BoundTerm::new("genie{1|W32}: d21+d31+d23", r1.max(t2).min(t2 + t3)),
        BoundTerm::new("genie{2|W13}: d12+d32+d31", r2.max(t3).min(t1 + t3)),
        BoundTerm::new("genie{2|W31}: d12+d32+d13", r2.max(t1).min(t1 + t3)),
        BoundTerm::new("genie{3|W12}: d13+d23+d21", r3.max(t2).min(t1 + t2)),
        BoundTerm::new("genie{3|W21}: d13+d23+d12", r3.max(t1).min(t1 + t2)),
    ]
}

/// Cut-set bound on the total unicast DoF.
pub fn cutset_bound_unicast(split: &AntennaSplit) -> BoundReport {
    let combined_terms = labeled(CUTSET_UNICAST_LABELS, cutset_unicast_terms(split.transmit(), split.receive()));
    let (value, binding_terms) = minimum(&combined_terms);
    BoundReport {
        kind: BoundKind::CutsetUnicast,
        split: split.clone(),
        per_cut: unicast_cuts(split),
        combined_terms,
        combined_cutset: value,
        combined_genie: None,
        binding_terms,
    }
}

/// Combined cut-set and genie-aided bound on the total unicast DoF.
pub fn genie_bound_unicast(split: &AntennaSplit) -> BoundReport {
    let cutset = cutset_bound_unicast(split);
    let combined_terms = labeled(GENIE_LABELS, genie_terms(split.transmit(), split.receive()));
    let (value, binding_terms) = minimum(&combined_terms);
    let triples = genie_triples(split);
    let pair = |label: &str, a: usize, b: usize| BoundTerm::new(label, triples[a].value + triples[b].value);
    let sums = [
        pair("genie{2|W13}+genie{3|W12}", 2, 4),
        pair("genie{1|W32}+genie{2|W31}", 1, 3),
        pair("genie{1|W23}+genie{3|W21}", 0, 5),
    ];
    let mut per_cut = cutset.per_cut;
    per_cut.extend(triples.iter().cloned());
    per_cut.extend(sums);
    BoundReport {
        kind: BoundKind::GenieUnicast,
        split: split.clone(),
        per_cut,
        combined_terms,
        combined_cutset: cutset.combined_cutset,
        combined_genie: Some(value),
        binding_terms,
    }
}

/// Closed-form bound for the symmetric channel (every node has `mt` transmit
/// and `mr` receive antennas).
pub fn symmetric_bound(mt: Rational, mr: Rational) -> Rational {
    let three = rational::int(3);
    let two = rational::int(2);
    if mt >= mr {
        (three * mr).min(two * mt)
    } else {
        (three * mt).min(two * mr)
    }
}

/// Cut-set bound on the total DoF with unicast and broadcast messages.
pub fn cutset_bound_broadcast(split: &AntennaSplit) -> BoundReport {
    let [t1, t2, t3] = split.transmit();
    let [r1, r2, r3] = split.receive();
    let cuts = [
        BoundTerm::new("cut{12|3}", (t1 + t2).min(r3)),
        BoundTerm::new("cut{23|1}", (t2 + t3).min(r1)),
        BoundTerm::new("cut{13|2}", (t1 + t3).min(r2)),
    ];
    let sum = cuts.iter().map(|t| t.value).sum();
    let mut per_cut: Vec<BoundTerm> = cuts.into_iter().collect();
    per_cut.push(BoundTerm::new("cut{12|3}+cut{23|1}+cut{13|2}", sum));
    let combined_terms = labeled(CUTSET_BROADCAST_LABELS, broadcast_cutset_terms(split.transmit(), split.receive()));
    let (value, binding_terms) = minimum(&combined_terms);
    BoundReport {
        kind: BoundKind::CutsetBroadcast,
        split: split.clone(),
        per_cut,
        combined_terms,
        combined_cutset: value,
        combined_genie: None,
        binding_terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn split(mt: [u32; 3], mr: [u32; 3]) -> AntennaSplit {
        AntennaSplit::from_integers(mt, mr)
    }

    #[test]
    fn cutset_unicast_examples() {
        let r = cutset_bound_unicast(&split([3, 1, 1], [0, 2, 2]));
        assert_eq!(r.combined_cutset, int(4));
        assert_eq!(r.binding_terms, vec!["ΣM_R".to_string()]);
        assert_eq!(r.term("M_T2+M_T3+M_R2+M_R3"), Some(int(6)));
        assert_eq!(r.term("ΣM_T"), Some(int(5)));
        // cut{13|2}: min{MT1+MT3, MR2} = min{4, 2}
        assert_eq!(r.term("cut{13|2}"), Some(int(2)));
        assert_eq!(cutset_bound_unicast(&split([0, 0, 0], [1, 1, 1])).value(), int(0));
    }

    #[test]
    fn cutset_unicast_symmetric_form() {
        for t in 0..6u32 {
            for r in 0..6u32 {
                let got = cutset_bound_unicast(&split([t; 3], [r; 3])).value();
                let (t, r) = (i64::from(t), i64::from(r));
                assert_eq!(got, int((2 * (t + r)).min(3 * t).min(3 * r)));
            }
        }
    }

    #[test]
    fn genie_examples() {
        let r = genie_bound_unicast(&split([3, 1, 1], [0, 2, 2]));
        assert_eq!(r.value(), int(4));
        let values: Vec<Rational> = r.combined_terms.iter().map(|t| t.value).collect();
        assert_eq!(values, vec![int(5), int(4), int(4), int(4), int(4)]);
        assert_eq!(r.binding_terms.len(), 4);

        let r = genie_bound_unicast(&split([1, 1, 1], [1, 1, 1]));
        let values: Vec<Rational> = r.combined_terms.iter().map(|t| t.value).collect();
        assert_eq!(values, vec![int(3), int(3), int(2), int(2), int(2)]);
        assert_eq!(r.value(), int(2));
    }

    #[test]
    fn genie_triples_recombine_into_max_terms() {
        // The pairwise sums of triples are the max-terms whenever the max
        // side is the smaller argument of each min.
        let r = genie_bound_unicast(&split([3, 1, 1], [0, 2, 2]));
        assert_eq!(r.term("genie{2|W13}: d12+d32+d31"), Some(int(2)));
        assert_eq!(r.term("genie{3|W12}: d13+d23+d21"), Some(int(2)));
        assert_eq!(r.term("genie{2|W13}+genie{3|W12}"), Some(int(4)));
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(symmetric_bound(int(2), int(2)), int(4));
        assert_eq!(symmetric_bound(int(5), int(1)), int(3));
        assert_eq!(symmetric_bound(frac(1, 3), int(1)), int(1));
    }

    #[test]
    fn broadcast_examples() {
        let r = cutset_bound_broadcast(&split([2, 1, 2], [3, 2, 0]));
        let values: Vec<Rational> = r.combined_terms.iter().map(|t| t.value).collect();
        assert_eq!(values, vec![int(5), int(5), int(7), int(10)]);
        assert_eq!(r.value(), int(5));
        assert_eq!(cutset_bound_broadcast(&split([4, 2, 1], [0, 0, 0])).value(), int(0));
    }

    #[test]
    fn report_serializes_with_pq() {
        let r = genie_bound_unicast(&split([3, 1, 1], [0, 2, 2]));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["combined_genie"], "4/1");
        assert_eq!(js["combined_cutset"], "4/1");
        assert_eq!(js["kind"], "genie-unicast");
    }
}
