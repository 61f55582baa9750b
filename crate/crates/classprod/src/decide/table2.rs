//! Exhaustive search for tuples of GL(3,q) / GU(3,q²) that satisfy the
//! determinant relation but whose product misses the identity, classified
//! against the known list of exceptional patterns.
//! Tuples are enumerated one per δ-profile (see
//! [`profile_representatives`]).

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;

use super::rules::{exists, View};
use crate::arith::Sign;
use crate::burnside::{n_count, profile_representatives, ClassTuple};
use crate::classes::{Family, GroupSpec, Kind};
use crate::Result;

/// One printed exceptional pattern with its δ-condition.
pub struct Table2Row {
    pub id: &'static str,
    pub pattern: &'static [u8],
    /// Applies to both signs (otherwise unitary only).
    pub both: bool,
    pred: fn(&View) -> bool,
}

impl Table2Row {
    pub fn matches(&self, t: &ClassTuple) -> bool {
        let pat: Vec<&[u8]> = self.pattern.iter().map(std::slice::from_ref).collect();
        exists(t, &pat, self.pred)
    }
}

fn d(v: &View, a: &[usize]) -> u8 {
    v.d(a) as u8
}

fn sum3(v: &View) -> u8 {
    d(v, &[1, 1, 1]) + d(v, &[2, 1, 1]) + d(v, &[3, 1, 1])
}

macro_rules! row {
    ($id:expr, [$($p:expr),*], $both:expr, $pred:expr) => {
        Table2Row { id: $id, pattern: &[$($p),*], both: $both, pred: $pred }
    };
}

/// The printed list.
pub fn table2_rows() -> Vec<Table2Row> {
    vec![
        row!("(2,2,2)* d111=0", [2, 2, 2], true, |v| !v.d(&[1, 1, 1])),
        row!("(3,2,2)* d111=0", [3, 2, 2], true, |v| !v.d(&[1, 1, 1])),
        row!("(3,2,2) d111=1", [3, 2, 2], false, |v| v.d(&[1, 1, 1])),
        row!("(4,2,2)*", [4, 2, 2], true, |_| true),
        row!("(4,3,2)*", [4, 3, 2], true, |_| true),
        row!("(4,4,2)* d111=0", [4, 4, 2], true, |v| !v.d(&[1, 1, 1])),
        row!("(4,4,2) d111=1", [4, 4, 2], false, |v| v.d(&[1, 1, 1])),
        row!("(4,4,3)* d111=0", [4, 4, 3], true, |v| !v.d(&[1, 1, 1])),
        row!("(4,4,4)* d111+d112d121d211=0", [4, 4, 4], true, |v| {
            d(v, &[1, 1, 1]) + d(v, &[1, 1, 2]) * d(v, &[1, 2, 1]) * d(v, &[2, 1, 1]) == 0
        }),
        row!("(5,2,2)* d211=0", [5, 2, 2], true, |v| !v.d(&[2, 1, 1])),
        row!("(5,3,2) d211=1", [5, 3, 2], false, |v| v.d(&[2, 1, 1])),
        row!("(5,4,2)* d111+d211=0", [5, 4, 2], true, |v| d(
            v,
            &[1, 1, 1]
        ) + d(
            v,
            &[2, 1, 1]
        ) == 0),
        row!("(5,4,3) d211=1", [5, 4, 3], false, |v| v.d(&[2, 1, 1])),
        row!("(5,4,4)* d111+d211=0", [5, 4, 4], true, |v| d(
            v,
            &[1, 1, 1]
        ) + d(
            v,
            &[2, 1, 1]
        ) == 0),
        row!("(5,4,4) d211d121d112=1", [5, 4, 4], false, |v| {
            v.d(&[2, 1, 1]) && v.d(&[1, 2, 1]) && v.d(&[1, 1, 2])
        }),
        row!("(5,5,2) d211=1", [5, 5, 2], false, |v| v.d(&[2, 1, 1])),
        row!("(5,5,4) d211=1", [5, 5, 4], false, |v| v.d(&[2, 1, 1])),
        row!("(6,2,2)* d111+d211+d311=0", [6, 2, 2], true, |v| sum3(v)
            == 0),
        row!("(6,3,2) d111+d211+d311=1", [6, 3, 2], false, |v| sum3(v)
            == 1),
        row!("(6,4,2)* d111+d211+d311=0", [6, 4, 2], true, |v| sum3(v)
            == 0),
        row!("(6,4,3) d111+d211+d311=1", [6, 4, 3], false, |v| sum3(v)
            == 1),
        row!("(6,4,4)* d111+d211+d311=0", [6, 4, 4], true, |v| sum3(v)
            == 0),
        row!("(6,5,2) d111+d211+d311=1", [6, 5, 2], false, |v| sum3(v)
            == 1),
        row!("(6,5,4) d111+d211+d311=1", [6, 5, 4], false, |v| sum3(v)
            == 1),
        row!("(6,6,2) sum_a d11a1 d22a1 d33a1=1", [6, 6, 2], false, |v| {
            let s: u8 = (0..3usize)
                .permutations(3)
                .map(|p| {
                    d(v, &[1, p[0] + 1, 1]) * d(v, &[2, p[1] + 1, 1]) * d(v, &[3, p[2] + 1, 1])
                })
                .sum();
            s == 1
        }),
        row!("(7,2,2)* d111=0", [7, 2, 2], true, |v| !v.d(&[1, 1, 1])),
        row!("(7,3,2) d111=1", [7, 3, 2], false, |v| v.d(&[1, 1, 1])),
        row!("(7,4,2)* d111=0", [7, 4, 2], true, |v| !v.d(&[1, 1, 1])),
        row!("(7,4,3) d111=1", [7, 4, 3], false, |v| v.d(&[1, 1, 1])),
        row!("(7,4,4)* d111=0", [7, 4, 4], true, |v| !v.d(&[1, 1, 1])),
        row!("(7,5,2) d111=1", [7, 5, 2], false, |v| v.d(&[1, 1, 1])),
        row!("(7,5,4) d111=1", [7, 5, 4], false, |v| v.d(&[1, 1, 1])),
        row!("(8,2,2)*", [8, 2, 2], true, |_| true),
        row!("(8,4,2)*", [8, 4, 2], true, |_| true),
        row!("(8,4,4)*", [8, 4, 4], true, |_| true),
        row!("(8,8,2)* d111+d121+d131=1", [8, 8, 2], true, |v| {
            d(v, &[1, 1, 1]) + d(v, &[1, 2, 1]) + d(v, &[1, 3, 1]) == 1
        }),
        row!("(3,2,2,2) d1111=1", [3, 2, 2, 2], false, |v| v
            .d(&[1, 1, 1, 1])),
        row!("(4,4,4,2) d1121d1211d2111=1", [4, 4, 4, 2], false, |v| {
            v.d(&[1, 1, 2, 1]) && v.d(&[1, 2, 1, 1]) && v.d(&[2, 1, 1, 1])
        }),
    ]
}

/// Outcome of a scan.
#[derive(Debug, Clone, Default)]
pub struct Table2Scan {
    /// Rows of the list met by at least one tuple with N = 0.
    pub hit: BTreeSet<String>,
    /// Zero tuples that match no row: pattern and the set of vanishing-free δ's.
    pub unlisted: BTreeSet<String>,
    /// Tuples that match a row applicable to this sign but have N > 0.
    pub spurious: Vec<String>,
    /// Tuples enumerated and distinct δ-tables evaluated.
    pub tuples: usize,
    pub profiles: usize,
}

impl Table2Scan {
    /// Row ids expected for the sign.
    pub fn expected(sign: Sign) -> BTreeSet<String> {
        table2_rows()
            .iter()
            .filter(|r| sign == Sign::Unitary || r.both)
            .map(|r| r.id.to_string())
            .collect()
    }
}

fn profile_text(t: &ClassTuple) -> String {
    let n = t.spec.modulus();
    let ones: Vec<String> = t
        .classes
        .iter()
        .map(|c| 0..c.n)
        .multi_cartesian_product()
        .filter(|a| {
            t.classes
                .iter()
                .zip(a)
                .fold(0u64, |s, (c, &ai)| (s + c.eigens[ai].tau_exp) % n)
                == 0
        })
        .map(|a| a.iter().map(|x| (x + 1).to_string()).collect::<String>())
        .collect();
    let pat: Vec<String> = t.series().iter().map(|s| s.to_string()).collect();
    format!("({}) δ=1 at [{}]", pat.join(","), ones.join(" "))
}

/// Scans all non-central tuples of length 3 and 4 of GL(3,q) (linear) or
/// GU(3,q²) (unitary) satisfying the determinant relation.
/// A representative, whether N = 0, the rows it matches, and the matched
/// rows that apply to this sign.
type ScanHit = (ClassTuple, bool, Vec<&'static str>, Vec<&'static str>);

pub fn table2_scan(q: u64, sign: Sign) -> Result<Table2Scan> {
    let spec = GroupSpec::new(Family::of(Kind::G, sign), 3, q)?;
    let mut reps = Vec::new();
    let mut tuples = 0usize;
    for m in 3..=4usize {
        let (n, r) = profile_representatives(&spec, m)?;
        tuples += n;
        reps.extend(r);
    }

    let rows = table2_rows();
    let results: Vec<Result<ScanHit>> = reps
        .into_par_iter()
        .map(|t| {
            let zero = n_count(&t)?.0.is_zero();
            let mut sorted = t.series();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            let matched: Vec<&'static str> = rows
                .iter()
                .filter(|r| r.pattern == sorted.as_slice() && r.matches(&t))
                .map(|r| r.id)
                .collect();
            let applicable: Vec<&'static str> = rows
                .iter()
                .filter(|r| (sign == Sign::Unitary || r.both) && matched.contains(&r.id))
                .map(|r| r.id)
                .collect();
            Ok((t, zero, matched, applicable))
        })
        .collect();

    let mut out = Table2Scan {
        tuples,
        ..Default::default()
    };
    for r in results {
        let (t, zero, _, applicable) = r?;
        out.profiles += 1;
        if zero {
            if applicable.is_empty() {
                out.unlisted.insert(profile_text(&t));
            }
            out.hit.extend(applicable.iter().map(|s| s.to_string()));
        } else if !applicable.is_empty() {
            out.spurious
                .push(format!("{t} matches {}", applicable.join("; ")));
        }
    }
    out.spurious.sort();
    Ok(out)
}
