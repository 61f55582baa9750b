//! Deciding whether the identity lies in a product of conjugacy classes.
//!
//! Two independent routes are available: the theorem rules, which look
//! only at series patterns, split labels and δ-indicators, and positivity
//! of the exact structure constant. [`decide`] runs both when the tuple is
//! short enough and reports a cross-check failure if they disagree.

mod product;
mod rules;
mod table2;

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::burnside::{n_count, ClassTuple};
use crate::classes::{
    all_class_data, class_data, inverse_class, scalar_shift, ClassData, ClassLabel, GroupSpec, Kind,
};
use crate::{Error, Result};

pub use product::ProductMap;
pub use rules::rule_decide;
pub use table2::{table2_rows, table2_scan, Table2Row, Table2Scan};

/// Longest tuple whose rule answer is cross-checked against the count.
pub const CROSS_CHECK_MAX_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionMethod {
    Rule,
    Positivity,
    Oracle,
}

impl fmt::Display for DecisionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionMethod::Rule => "rule",
            DecisionMethod::Positivity => "positivity",
            DecisionMethod::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub contains_identity: bool,
    pub method: DecisionMethod,
    pub rule_id: Option<String>,
    pub count: Option<BigUint>,
}

impl Decision {
    pub fn rule(contains_identity: bool, rule_id: impl Into<String>) -> Self {
        Decision {
            contains_identity,
            method: DecisionMethod::Rule,
            rule_id: Some(rule_id.into()),
            count: None,
        }
    }

    pub fn positivity(count: BigUint) -> Self {
        Decision {
            contains_identity: !count.is_zero(),
            method: DecisionMethod::Positivity,
            rule_id: None,
            count: Some(count),
        }
    }
}

/// Σ det τ-exponents ≡ 0 mod N.
pub fn det_ok(tuple: &ClassTuple) -> bool {
    tuple.det_ok()
}

/// The rank condition: for every choice of λ_ν among the eigenvalues of
/// A_ν or a non-eigenvalue ⋆, with product 1, rk(A_j − λ_j) is at most the
/// sum of the other ranks. Always true for more classes than the dimension.
pub fn rank_ok(tuple: &ClassTuple) -> bool {
    let m = tuple.len();
    let dim = tuple.spec.dim;
    if m > dim as usize {
        return true;
    }
    let n = tuple.spec.modulus();
    let cl = &tuple.classes;
    // Slot index c.n stands for ⋆.
    let choices = cl.iter().map(|c| 0..=c.n).multi_cartesian_product();
    for choice in choices {
        let stars: Vec<usize> = (0..m).filter(|&i| choice[i] == cl[i].n).collect();
        if stars.len() >= 2 {
            continue;
        }
        let sum = (0..m)
            .filter(|&i| choice[i] < cl[i].n)
            .fold(0u64, |s, i| (s + cl[i].eigens[choice[i]].tau_exp) % n);
        if let Some(&v) = stars.first() {
            let forced = (n - sum) % n;
            if cl[v].eigens.iter().any(|e| e.tau_exp == forced) {
                continue;
            }
        } else if sum != 0 {
            continue;
        }
        let ranks: Vec<u32> = (0..m)
            .map(|i| {
                if choice[i] == cl[i].n {
                    dim as u32
                } else {
                    cl[i].rank_at(choice[i]) as u32
                }
            })
            .collect();
        let total: u32 = ranks.iter().sum();
        if ranks.iter().any(|&r| 2 * r > total) {
            return false;
        }
    }
    true
}

/// Result of [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    Final(Decision),
    Reduced(ClassTuple),
}

/// Folds central classes into another class, then settles m ≤ 2 directly.
pub fn normalize(tuple: &ClassTuple) -> Result<(Normalized, Vec<String>)> {
    let spec = tuple.spec;
    let mut log = Vec::new();
    let mut shift: u64 = 0;
    let qpm = spec.q_pm();
    let mut rest: Vec<ClassData> = Vec::new();
    for c in &tuple.classes {
        if c.is_central() {
            let k = if spec.kind() == Kind::P {
                0
            } else {
                c.label.params[0] % qpm
            };
            shift = (shift + k) % qpm;
            log.push(format!("removed central class {}", c.label));
        } else {
            rest.push(c.clone());
        }
    }
    if rest.is_empty() {
        let id = shift == 0;
        log.push(format!("product of scalars is ω^{shift}"));
        return Ok((Normalized::Final(Decision::rule(id, "central")), log));
    }
    if shift != 0 {
        let folded = scalar_shift(&spec, &rest[0].label, shift as i64)?;
        log.push(format!(
            "folded ω^{shift} into {} giving {folded}",
            rest[0].label
        ));
        rest[0] = class_data(&spec, &folded)?;
    }
    match rest.len() {
        1 => {
            log.push("a single non-central class never contains the identity".into());
            Ok((Normalized::Final(Decision::rule(false, "m=1")), log))
        }
        2 => {
            let inv = inverse_class(&spec, &rest[0].label)?;
            let yes = inv == rest[1].label;
            log.push(format!("inverse of {} is {inv}", rest[0].label));
            Ok((Normalized::Final(Decision::rule(yes, "inverse")), log))
        }
        _ => Ok((Normalized::Reduced(ClassTuple::new(&spec, rest)?), log)),
    }
}

/// Options for [`decide_with`].
#[derive(Debug, Clone, Copy)]
pub struct DecideOptions {
    /// Compare a rule answer with the structure constant when the tuple has
    /// at most this many classes (0 disables the comparison).
    pub cross_check_len: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            cross_check_len: CROSS_CHECK_MAX_LEN,
        }
    }
}

/// Decision with the rules cross-checked against positivity.
pub fn decide(tuple: &ClassTuple) -> Result<Decision> {
    decide_with(tuple, DecideOptions::default())
}

pub fn decide_with(tuple: &ClassTuple, opts: DecideOptions) -> Result<Decision> {
    let (norm, _) = normalize(tuple)?;
    let t = match norm {
        Normalized::Final(d) => return Ok(d),
        Normalized::Reduced(t) => t,
    };
    let rule = rule_decide(&t)?;
    match rule {
        Some(mut d) => {
            if t.len() <= opts.cross_check_len {
                let (n, _) = n_count(&t)?;
                if d.contains_identity == n.is_zero() {
                    return Err(Error::CrossCheckFailure(format!(
                        "{t}: rule {} says {}, N = {n}",
                        d.rule_id.as_deref().unwrap_or("?"),
                        d.contains_identity
                    )));
                }
                d.count = Some(n);
            }
            Ok(d)
        }
        None => Ok(Decision::positivity(n_count(&t)?.0)),
    }
}

/// PSL(3,q) / PSU(3,q²): the identity lies in the product of P-classes iff
/// it lies in the S-product for one of the central shifts of the first lift.
pub fn decide_p(tuple: &ClassTuple) -> Result<Decision> {
    let spec = tuple.spec;
    if spec.kind() != Kind::P {
        return Err(Error::WrongGroup(format!("{spec} is not projective")));
    }
    let sspec = spec.s_spec();
    let lift = |labels: &[ClassLabel]| ClassTuple::from_labels(&sspec, labels);
    let labels = tuple.labels();
    if spec.split_r().is_none() {
        return decide(&lift(&labels)?);
    }
    let mut last = None;
    for k in sspec.central_shifts() {
        let mut ls = labels.clone();
        ls[0] = scalar_shift(&sspec, &ls[0], k as i64)?;
        let d = decide(&lift(&ls)?)?;
        if d.contains_identity {
            return Ok(d);
        }
        last = Some(d);
    }
    Ok(last.expect("at least one central shift"))
}

/// Nontrivial classes of a group.
fn nontrivial_classes(spec: &GroupSpec) -> Result<Vec<ClassData>> {
    Ok(all_class_data(spec)?
        .into_iter()
        .filter(|c| {
            !(c.is_central() && (spec.kind() == Kind::P || c.label.params.iter().all(|&p| p == 0)))
        })
        .collect())
}

/// Whether c₁⋯c_m covers the whole group: for every class d, the tuple
/// (c₁, …, c_m, d⁻¹) contains the identity.
fn covers(
    spec: &GroupSpec,
    cs: &[ClassData],
    all: &[ClassData],
    opts: DecideOptions,
) -> Result<bool> {
    for d in all {
        let mut cl = cs.to_vec();
        let id =
            d.is_central() && (spec.kind() == Kind::P || d.label.params.iter().all(|&p| p == 0));
        if !id {
            cl.push(class_data(spec, &inverse_class(spec, &d.label)?)?);
        }
        let t = ClassTuple::new(spec, cl)?;
        if !decide_with(&t, opts)?.contains_identity {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest m tried by [`covering_numbers`].
pub const COVERING_MAX_M: usize = 6;

/// (cn, ecn) for PSL(3,q) / PSU(3,q²).
pub fn covering_numbers(spec: &GroupSpec) -> Result<(usize, usize)> {
    if spec.dim != 3 || spec.kind() != Kind::P {
        return Err(Error::WrongGroup(format!(
            "{spec}: covering numbers are computed for PSL(3,q) and PSU(3,q²)"
        )));
    }
    let opts = DecideOptions { cross_check_len: 0 };
    let all = all_class_data(spec)?;
    let nontriv = nontrivial_classes(spec)?;
    let mut cn = None;
    for m in 2..=COVERING_MAX_M {
        let mut ok = true;
        for c in &nontriv {
            if !covers(spec, &vec![c.clone(); m], &all, opts)? {
                ok = false;
                break;
            }
        }
        if ok {
            cn = Some(m);
            break;
        }
    }
    let cn = cn.ok_or_else(|| Error::CapacityExceeded(format!("cn({spec}) > {COVERING_MAX_M}")))?;
    for m in cn..=COVERING_MAX_M {
        let mut ok = true;
        for combo in (0..nontriv.len()).combinations_with_replacement(m) {
            let cs: Vec<ClassData> = combo.iter().map(|&i| nontriv[i].clone()).collect();
            if !covers(spec, &cs, &all, opts)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((cn, m));
        }
    }
    Err(Error::CapacityExceeded(format!(
        "ecn({spec}) > {COVERING_MAX_M}"
    )))
}

/// Multiset of labels, for order-free comparisons.
pub(crate) fn label_multiset(labels: impl IntoIterator<Item = ClassLabel>) -> Vec<ClassLabel> {
    let mut v: Vec<ClassLabel> = labels.into_iter().collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(g: &str, classes: &str) -> ClassTuple {
        ClassTuple::parse(&g.parse().unwrap(), classes).unwrap()
    }

    #[test]
    fn rank_skips_long_tuples() {
        assert!(rank_ok(&tuple("GL3:4", "C2[1],C2[1],C2[2],C2[1]")));
        assert!(!rank_ok(&tuple("GL3:4", "C2[1],C2[1],C2[2]")));
    }

    #[test]
    fn decision_records_count() {
        let d = decide(&tuple("GL3:3", "C4[0,1],C3[0],C3[0]")).unwrap();
        assert_eq!(
            d.contains_identity,
            !d.count.clone().unwrap_or_default().is_zero()
        );
    }

    #[test]
    fn method_names() {
        assert_eq!(DecisionMethod::Positivity.to_string(), "positivity");
        assert_eq!(
            serde_json::to_string(&DecisionMethod::Rule).unwrap(),
            "\"rule\""
        );
    }
}
