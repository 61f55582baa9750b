//! Enumeration of G-tuples up to the data that determines N.
//!
//! Multiplying the classes by scalars with product 1 changes neither N nor
//! any δ, so every position but the last ranges over scalar-orbit
//! representatives. Beyond that, N depends only on the ordered series
//! pattern and the full table of δ-values, so one tuple per distinct table
//! suffices.

use std::collections::HashMap;

use itertools::Itertools;

use super::ClassTuple;
use crate::classes::{all_class_data, scalar_shift, ClassData, GroupSpec, Kind};
use crate::{Error, Result};

/// Ordered series and the δ-table packed into bits.
pub type ProfileKey = (Vec<u8>, Vec<u64>);

pub fn profile_key(t: &ClassTuple) -> ProfileKey {
    let n = t.spec.modulus();
    let mut bits = Vec::new();
    let mut word = 0u64;
    let mut nb = 0;
    for a in t.classes.iter().map(|c| 0..c.n).multi_cartesian_product() {
        let s = t
            .classes
            .iter()
            .zip(&a)
            .fold(0u64, |s, (c, &ai)| (s + c.eigens[ai].tau_exp) % n);
        word = (word << 1) | (s == 0) as u64;
        nb += 1;
        if nb == 64 {
            bits.push(word);
            word = 0;
            nb = 0;
        }
    }
    bits.push(word);
    (t.series(), bits)
}

/// Non-central classes of `spec` that are least in their scalar orbit.
pub fn scalar_orbit_reps(spec: &GroupSpec) -> Result<Vec<ClassData>> {
    let qpm = spec.q_pm();
    let mut reps = Vec::new();
    for c in all_class_data(spec)?
        .into_iter()
        .filter(|c| !c.is_central())
    {
        let shifted = (0..qpm)
            .map(|k| scalar_shift(spec, &c.label, k as i64))
            .collect::<Result<Vec<_>>>()?;
        if shifted.iter().all(|l| c.label <= *l) {
            reps.push(c);
        }
    }
    Ok(reps)
}

/// One representative per profile among the non-central m-tuples of a
/// G-group that satisfy the determinant relation, with series
/// non-increasing. Also returns the number of tuples enumerated.
pub fn profile_representatives(spec: &GroupSpec, m: usize) -> Result<(usize, Vec<ClassTuple>)> {
    if spec.kind() != Kind::G || m < 2 {
        return Err(Error::WrongGroup(format!(
            "{spec}: profiles are enumerated for GL/GU and m ≥ 2"
        )));
    }
    let classes: Vec<ClassData> = all_class_data(spec)?
        .into_iter()
        .filter(|c| !c.is_central())
        .collect();
    let reps = scalar_orbit_reps(spec)?;
    let by_series = |list: &[ClassData], s: u8| {
        list.iter()
            .filter(|c| c.series() == s)
            .cloned()
            .collect::<Vec<_>>()
    };
    let n = spec.modulus();
    let top = classes.iter().map(|c| c.series()).max().unwrap_or(2);
    let mut seen: HashMap<ProfileKey, ClassTuple> = HashMap::new();
    let mut total = 0usize;
    for pat in (2u8..=top).combinations_with_replacement(m) {
        let pat: Vec<u8> = pat.into_iter().rev().collect();
        let heads: Vec<Vec<ClassData>> =
            pat[..m - 1].iter().map(|&s| by_series(&reps, s)).collect();
        let tails = by_series(&classes, pat[m - 1]);
        for head in heads.iter().map(|v| v.iter()).multi_cartesian_product() {
            let det = head.iter().fold(0u64, |s, c| (s + c.det_exp) % n);
            for tail in tails.iter().filter(|c| (det + c.det_exp) % n == 0) {
                let mut cl: Vec<ClassData> = head.iter().map(|c| (*c).clone()).collect();
                cl.push(tail.clone());
                let t = ClassTuple::new(spec, cl)?;
                total += 1;
                seen.entry(profile_key(&t)).or_insert(t);
            }
        }
    }
    let mut out: Vec<(ProfileKey, ClassTuple)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((total, out.into_iter().map(|(_, t)| t).collect()))
}
