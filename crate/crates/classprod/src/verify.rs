//! Verification suites shared by the `verify` command and the test suites.
//!
//! Each suite compares two independent routes to the same answer and
//! collects every disagreement rather than stopping at the first.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::Rational;
use crate::burnside::{closed_form_triple, n_count, n_sigma, profile_representatives, ClassTuple};
use crate::classes::{all_class_data, ClassData, GroupSpec, Kind};
use crate::decide::rule_decide;
use crate::oracle::build_cached;
use crate::{Error, Result};

/// Disagreements kept verbatim in a report; the rest are only counted.
const KEEP_FAILURES: usize = 20;

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    /// Sorted series patterns that were checked at least once.
    pub patterns: BTreeSet<Vec<u8>>,
}

impl SuiteReport {
    fn new(name: impl Into<String>) -> Self {
        SuiteReport {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < KEEP_FAILURES {
            self.failures.push(msg);
        }
    }

    /// Folds another report into this one.
    pub fn absorb(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = KEEP_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self.patterns.extend(other.patterns);
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checked, {} failed",
            self.name, self.checked, self.failed
        )
    }
}

fn noncentral(spec: &GroupSpec) -> Result<Vec<ClassData>> {
    Ok(all_class_data(spec)?
        .into_iter()
        .filter(|c| !c.is_central())
        .collect())
}

/// n_count against the explicit group for every unordered class triple,
/// central classes included.
pub fn oracle_suite(spec: &GroupSpec) -> Result<SuiteReport> {
    let g = build_cached(spec)?;
    let mut rep = SuiteReport::new(format!("oracle {spec}"));
    let k = g.num_classes();
    for idx in (0..k).combinations_with_replacement(3) {
        let labels: Vec<_> = idx.iter().map(|&i| g.labels[i].clone()).collect();
        let t = ClassTuple::from_labels(spec, &labels)?;
        let want = g.count_by_index(&idx);
        rep.checked += 1;
        match n_count(&t) {
            Ok((got, _)) if got == want => {}
            Ok((got, m)) => rep.fail(format!("{t}: {m} gives {got}, oracle {want}")),
            Err(e) => rep.fail(format!("{t}: {e}, oracle {want}")),
        }
    }
    Ok(rep)
}

fn closed_check(t: &ClassTuple) -> Result<Option<std::result::Result<(), String>>> {
    let (v, first) = match closed_form_triple(t) {
        Ok(x) => x,
        Err(Error::NoClosedForm(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let n = n_sigma(t)?;
    let closed = v * Rational::from_integer(BigInt::from(t.classes[first].size.clone()));
    if closed == Rational::from_integer(BigInt::from(n.clone())) {
        Ok(Some(Ok(())))
    } else {
        Ok(Some(Err(format!("{t}: closed form {closed}, sigma {n}"))))
    }
}

fn collect_closed(name: String, tuples: Vec<ClassTuple>) -> Result<SuiteReport> {
    let results: Vec<Result<Option<std::result::Result<(), String>>>> =
        tuples.par_iter().map(closed_check).collect();
    let mut rep = SuiteReport::new(name);
    for (t, r) in tuples.iter().zip(results) {
        let Some(r) = r? else { continue };
        rep.checked += 1;
        rep.patterns.insert(sorted_series(t));
        if let Err(msg) = r {
            rep.fail(msg);
        }
    }
    Ok(rep)
}

fn sorted_series(t: &ClassTuple) -> Vec<u8> {
    let mut s = t.series();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

/// Closed forms against the Σ-engine for every non-central triple with a
/// closed form. For GL/GU one triple per δ-profile is checked, which covers
/// all parameters because both sides depend only on the profile.
pub fn closed_form_suite(spec: &GroupSpec) -> Result<SuiteReport> {
    let tuples = if spec.kind() == Kind::G {
        profile_representatives(spec, 3)?.1
    } else {
        let cl = noncentral(spec)?;
        let mut v = Vec::new();
        for idx in (0..cl.len()).combinations_with_replacement(3) {
            let t = ClassTuple::new(spec, idx.iter().map(|&i| cl[i].clone()).collect())?;
            if t.det_ok() {
                v.push(t);
            }
        }
        v
    };
    collect_closed(format!("closed forms {spec}"), tuples)
}

/// Which tuples a rules check visits.
#[derive(Debug, Clone, Copy)]
pub enum Coverage {
    /// Every multiset of non-central classes.
    Exhaustive,
    /// This many tuples satisfying the determinant relation, drawn from a
    /// fixed seed.
    Sampled { count: usize, seed: u64 },
    /// One tuple per δ-profile (GL/GU only); complete for the rules, which
    /// like N see only series, δ-values and q.
    Profiles,
}

fn rule_check(t: &ClassTuple) -> Result<Option<std::result::Result<(), String>>> {
    let Some(d) = rule_decide(t)? else {
        return Ok(None);
    };
    let n: BigUint = n_count(t)?.0;
    if d.contains_identity == !n.is_zero() {
        Ok(Some(Ok(())))
    } else {
        let id = d.rule_id.unwrap_or_default();
        Ok(Some(Err(format!(
            "{t}: rule {id} says {}, N = {n}",
            d.contains_identity
        ))))
    }
}

/// `count` index tuples: the first m−1 uniform, the last uniform among the
/// classes that complete the determinant relation.
fn sample_det_ok(
    spec: &GroupSpec,
    cl: &[ClassData],
    m: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    let n = spec.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut ix: Vec<usize> = (0..m - 1).map(|_| rng.gen_range(0..cl.len())).collect();
        let det = ix.iter().fold(0u64, |s, &i| (s + cl[i].det_exp) % n);
        let fits: Vec<usize> = (0..cl.len())
            .filter(|&i| (det + cl[i].det_exp).is_multiple_of(n))
            .collect();
        if fits.is_empty() {
            continue;
        }
        ix.push(fits[rng.gen_range(0..fits.len())]);
        out.push(ix);
    }
    out
}

/// rule_decide against positivity of n_count for m-tuples of non-central
/// classes. Tuples the rules leave open are skipped and not counted.
pub fn rules_suite(spec: &GroupSpec, m: usize, coverage: Coverage) -> Result<SuiteReport> {
    let cl = noncentral(spec)?;
    let idx: Vec<Vec<usize>> = match coverage {
        Coverage::Exhaustive => (0..cl.len()).combinations_with_replacement(m).collect(),
        Coverage::Sampled { count, seed } => sample_det_ok(spec, &cl, m, count, seed),
        Coverage::Profiles => Vec::new(),
    };
    let tuples = match coverage {
        Coverage::Profiles => profile_representatives(spec, m)?.1,
        _ => idx
            .iter()
            .map(|ix| ClassTuple::new(spec, ix.iter().map(|&i| cl[i].clone()).collect()))
            .collect::<Result<Vec<_>>>()?,
    };
    let results: Vec<_> = tuples.par_iter().map(rule_check).collect();
    let mut rep = SuiteReport::new(format!("rules {spec} m={m}"));
    for (t, r) in tuples.iter().zip(results) {
        let Some(r) = r? else { continue };
        rep.checked += 1;
        rep.patterns.insert(sorted_series(t));
        if let Err(msg) = r {
            rep.fail(msg);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_keeps_a_bounded_sample() {
        let mut a = SuiteReport::new("a");
        for i in 0..30 {
            a.fail(format!("x{i}"));
        }
        let mut b = SuiteReport::new("b");
        b.checked = 5;
        b.fail("y".into());
        a.absorb(b);
        assert_eq!(
            (a.checked, a.failed, a.failures.len()),
            (5, 31, KEEP_FAILURES)
        );
        assert!(!a.ok());
    }

    #[test]
    fn samples_satisfy_the_det_relation() {
        let g: GroupSpec = "GU3:3".parse().unwrap();
        let cl = noncentral(&g).unwrap();
        let n = g.modulus();
        let s = sample_det_ok(&g, &cl, 4, 50, 3);
        assert_eq!(s, sample_det_ok(&g, &cl, 4, 50, 3));
        for ix in s {
            assert_eq!(ix.iter().fold(0, |a, &i| (a + cl[i].det_exp) % n), 0);
        }
    }

    #[test]
    fn small_suites_pass() {
        let g: GroupSpec = "GL3:2".parse().unwrap();
        assert!(oracle_suite(&g).unwrap().ok());
        assert!(closed_form_suite(&g).unwrap().ok());
        let r = rules_suite(&g, 3, Coverage::Exhaustive).unwrap();
        assert!(r.ok() && r.checked > 0);
    }
}
