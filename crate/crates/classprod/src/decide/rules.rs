//! The theorem rules. Each returns `None` when it does not cover the group,
//! otherwise the answer and the identifier of the statement that gives it.
//!
//! Conditions quantified "up to permutation and renumbering" are checked
//! over every permutation of the tuple that matches the pattern and every
//! renumbering that keeps eigenvalues ordered by multiplicity with the
//! Ω-members first.

use itertools::Itertools;

use super::{label_multiset, normalize, rank_ok, Decision, Normalized};
use crate::arith::Sign;
use crate::burnside::ClassTuple;
use crate::classes::{
    canonical_label, inverse_class, scalar_shift, sl2_to_su2, ClassData, ClassLabel, Family,
    GroupSpec, Kind,
};
use crate::Result;

type Rule = Option<(bool, String)>;

fn no(id: &str) -> Rule {
    Some((false, id.to_string()))
}

fn yes(id: &str) -> Rule {
    Some((true, id.to_string()))
}

/// A tuple read through a permutation of positions and a renumbering of
/// the eigenvalues of each class.
pub(crate) struct View<'a> {
    cl: Vec<&'a ClassData>,
    slots: Vec<&'a [usize]>,
    n: u64,
}

impl View<'_> {
    /// δ at a 1-based multi-index; false when an index is out of range.
    pub fn d(&self, a: &[usize]) -> bool {
        let mut s = 0u64;
        for ((c, sl), &ai) in self.cl.iter().zip(&self.slots).zip(a) {
            if ai == 0 || ai > c.n {
                return false;
            }
            s = (s + c.eigens[sl[ai - 1]].tau_exp) % self.n;
        }
        s == 0
    }

    pub fn series(&self, i: usize) -> u8 {
        self.cl[i].series()
    }

    pub fn label(&self, i: usize) -> &ClassLabel {
        &self.cl[i].label
    }

    pub fn l(&self, i: usize) -> u8 {
        self.cl[i].label.split.unwrap_or(0)
    }

    pub fn k(&self, i: usize) -> u64 {
        self.cl[i].label.params[0]
    }
}

/// Eigenvalue renumberings allowed by the ordering convention.
fn renumberings(c: &ClassData) -> Vec<Vec<usize>> {
    let key = |i: usize| (c.eigens[i].mult, c.eigens[i].in_omega);
    (0..c.n)
        .permutations(c.n)
        .filter(|p| p.iter().enumerate().all(|(i, &j)| key(i) == key(j)))
        .collect()
}

/// Whether some arrangement of the tuple matches `pattern` (allowed series
/// per position) and satisfies `pred`.
pub(crate) fn exists(t: &ClassTuple, pattern: &[&[u8]], pred: impl Fn(&View) -> bool) -> bool {
    let m = t.len();
    if pattern.len() != m {
        return false;
    }
    let ren: Vec<Vec<Vec<usize>>> = t.classes.iter().map(renumberings).collect();
    for perm in (0..m).permutations(m) {
        if !perm
            .iter()
            .zip(pattern)
            .all(|(&i, p)| p.contains(&t.classes[i].series()))
        {
            continue;
        }
        let choices = perm
            .iter()
            .map(|&i| 0..ren[i].len())
            .multi_cartesian_product();
        for ch in choices {
            let view = View {
                cl: perm.iter().map(|&i| &t.classes[i]).collect(),
                slots: perm
                    .iter()
                    .zip(&ch)
                    .map(|(&i, &r)| ren[i][r].as_slice())
                    .collect(),
                n: t.spec.modulus(),
            };
            if pred(&view) {
                return true;
            }
        }
    }
    false
}

fn any_order(t: &ClassTuple, pattern: &[&[u8]]) -> bool {
    exists(t, pattern, |_| true)
}

/// The rule-based decision, or `None` where no statement applies.
pub fn rule_decide(tuple: &ClassTuple) -> Result<Option<Decision>> {
    let t = match normalize(tuple)?.0 {
        Normalized::Final(d) => return Ok(Some(d)),
        Normalized::Reduced(t) => t,
    };
    let r = match (t.spec.dim, t.spec.kind()) {
        (3, Kind::G) => g3(&t)?,
        (3, Kind::S) => s3(&t)?,
        (3, Kind::P) => p3(&t)?,
        (2, Kind::G) => g2(&t),
        (2, Kind::S) => s2(&t)?,
        _ => None,
    };
    Ok(r.map(|(v, id)| Decision::rule(v, id)))
}

fn g_tuple(t: &ClassTuple) -> Result<ClassTuple> {
    let g = t.spec.g_spec();
    let labels: Vec<ClassLabel> = t
        .labels()
        .into_iter()
        .map(|l| ClassLabel::new(l.series, l.params))
        .collect();
    ClassTuple::from_labels(&g, &labels)
}

// ---------------------------------------------------------------- rank 3, G

fn g3(t: &ClassTuple) -> Result<Rule> {
    if !t.det_ok() {
        return Ok(no("Eq2"));
    }
    let unitary = t.spec.sign() == Sign::Unitary;
    if unitary && t.spec.qv() == 2 {
        return gu_q2(t);
    }
    if !rank_ok(t) {
        return Ok(no("Eq3"));
    }
    if let Some(id) = thm13a(t) {
        return Ok(no(&id));
    }
    // GU(3,3²) has further exceptions with m ≥ 4, e.g. series (5,2,2,2);
    // those are left to the count.
    if unitary && t.spec.qv() == 3 && t.len() >= 4 {
        return Ok(None);
    }
    Ok(yes("Thm1.3(b)"))
}

fn thm13a(t: &ClassTuple) -> Option<String> {
    let id = |s: &str| Some(format!("Thm1.3(a)({s})"));
    let m = t.len();
    if t.spec.sign() == Sign::Unitary {
        if m == 3 {
            if exists(t, &[&[6, 7], &[3, 5], &[2, 4]], |v| v.d(&[1, 1, 1])) {
                return id("i");
            }
            if exists(t, &[&[5], &[3, 5], &[2, 4]], |v| v.d(&[2, 1, 1])) {
                return id("ii");
            }
            if exists(t, &[&[6, 8], &[6, 8], &[2]], |v| {
                v.series(0) == v.series(1) && v.d(&[1, 1, 1]) && v.d(&[2, 2, 1]) && v.d(&[3, 3, 1])
            }) {
                return id("iii");
            }
            if any_order(t, &[&[3], &[2], &[2]]) || any_order(t, &[&[4], &[4], &[2]]) {
                return id("iv");
            }
            if exists(t, &[&[5], &[4], &[4]], |v| {
                v.d(&[1, 1, 2]) && v.d(&[1, 2, 1]) && v.d(&[2, 1, 1])
            }) {
                return id("v");
            }
        }
        if m == 4 {
            if exists(t, &[&[3], &[2], &[2], &[2]], |v| v.d(&[1, 1, 1, 1])) {
                return id("vi");
            }
            if exists(t, &[&[4], &[4], &[4], &[2]], |v| {
                v.d(&[1, 1, 2, 1]) && v.d(&[1, 2, 1, 1]) && v.d(&[2, 1, 1, 1])
            }) {
                return id("vii");
            }
        }
    } else if m == 3 {
        if exists(t, &[&[8], &[8], &[2]], |v| v.d(&[1, 1, 1])) {
            return id("viii");
        }
        if t.spec.qv() == 2 && exists(t, &[&[8], &[8], &[3]], |v| v.label(0) == v.label(1)) {
            return id("ix");
        }
    }
    None
}

/// GU(3,2²).
fn gu_q2(t: &ClassTuple) -> Result<Rule> {
    if prop42(&t.series()) {
        return Ok(no("Prop4.2"));
    }
    if !rank_ok(t) {
        return Ok(no("Eq3"));
    }
    if let Some(id) = thm13a(t) {
        return Ok(no(&id));
    }
    if let Some(id) = prop43(t)? {
        return Ok(no(&id));
    }
    Ok(yes("Prop4.3"))
}

/// Patterns left after removing all 6's and an even number of 2's.
fn prop42(series: &[u8]) -> bool {
    let twos = series.iter().filter(|&&s| s == 2).count();
    let mut rest: Vec<u8> = series
        .iter()
        .copied()
        .filter(|&s| s != 2 && s != 6)
        .collect();
    if twos % 2 == 1 {
        rest.push(2);
    }
    rest.sort_unstable_by(|a, b| b.cmp(a));
    const LIST: [&[u8]; 9] = [
        &[2],
        &[3],
        &[3, 2],
        &[5, 4],
        &[8, 5],
        &[4, 4, 2],
        &[5, 5, 2],
        &[8, 4, 2],
        &[8, 8, 2],
    ];
    LIST.contains(&rest.as_slice())
}

/// The two exceptional quadruples, up to order, scalar factors with
/// product 1 and simultaneous inversion.
fn prop43(t: &ClassTuple) -> Result<Option<String>> {
    if t.len() != 4 {
        return Ok(None);
    }
    let spec = t.spec;
    let c = |s: u8, p: &[u64]| canonical_label(&spec, &ClassLabel::new(s, p.to_vec()));
    let targets = [
        (
            "Prop4.3(i)",
            label_multiset([c(4, &[0, 1])?, c(4, &[0, 1])?, c(4, &[0, 1])?, c(3, &[1])?]),
        ),
        (
            "Prop4.3(ii)",
            label_multiset([
                c(4, &[0, 1])?,
                c(4, &[0, 1])?,
                c(4, &[0, 2])?,
                c(5, &[1, 0])?,
            ]),
        ),
    ];
    let qpm = spec.q_pm() as i64;
    for inv in [false, true] {
        let base: Vec<ClassLabel> = if inv {
            t.labels()
                .iter()
                .map(|l| inverse_class(&spec, l))
                .collect::<Result<_>>()?
        } else {
            t.labels()
        };
        for ks in (0..3).map(|_| 0..qpm).multi_cartesian_product() {
            let k4 = -(ks.iter().sum::<i64>());
            let shifts = [ks[0], ks[1], ks[2], k4];
            let moved = label_multiset(
                base.iter()
                    .zip(shifts)
                    .map(|(l, k)| scalar_shift(&spec, l, k))
                    .collect::<Result<Vec<_>>>()?,
            );
            if let Some((id, _)) = targets.iter().find(|(_, tg)| *tg == moved) {
                return Ok(Some(id.to_string()));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------- rank 3, S

fn s3(t: &ClassTuple) -> Result<Rule> {
    let g = g_tuple(t)?;
    if t.spec.split_r().is_none() {
        return g3(&g);
    }
    let unitary = t.spec.sign() == Sign::Unitary;
    if unitary && t.spec.qv() == 2 {
        return Ok(cor45(t));
    }
    match g3(&g)? {
        None => return Ok(None),
        Some((false, id)) => return Ok(Some((false, id))),
        Some((true, _)) => {}
    }
    if t.len() == 3 {
        if let Some(id) = thm15a(t) {
            return Ok(no(&id));
        }
    }
    Ok(yes("Thm1.5(b)"))
}

fn thm15a(t: &ClassTuple) -> Option<String> {
    let id = |s: &str| Some(format!("Thm1.5(a)({s})"));
    if t.spec.sign() == Sign::Unitary {
        if exists(t, &[&[3], &[3], &[2, 4]], |v| v.l(0) != v.l(1)) {
            return id("i");
        }
        return None;
    }
    if exists(t, &[&[3], &[3], &[2]], |v| {
        v.l(0) != v.l(1) && !v.d(&[1, 1, 1])
    }) {
        return id("ii");
    }
    if exists(t, &[&[3], &[3], &[4]], |v| v.l(0) != v.l(1)) {
        return id("iii");
    }
    if t.spec.qv() == 4 {
        if exists(t, &[&[3], &[3], &[3]], |v| {
            v.l(0) == v.l(1) && v.l(1) != v.l(2) && v.d(&[1, 1, 1])
        }) {
            return id("iv");
        }
        if exists(t, &[&[3], &[3], &[3]], |v| {
            v.l(0) == v.l(1) && v.l(1) == v.l(2) && !v.d(&[1, 1, 1])
        }) {
            return id("v");
        }
    }
    None
}

/// SU(3,2²): parity conditions on the split unipotent classes.
fn cor45(t: &ClassTuple) -> Rule {
    // The three split cosets are the non-identity elements of Z2×Z2, so the
    // product is trivial exactly when their parities agree.
    let par: Vec<usize> = (0..3u8)
        .map(|l| {
            t.classes
                .iter()
                .filter(|c| c.series() == 3 && c.label.split == Some(l))
                .count()
                % 2
        })
        .collect();
    if par[0] != par[1] || par[1] != par[2] {
        return no("Cor4.5(i)");
    }
    let s = t.series();
    if s.iter().all(|&x| x == 2 || x == 6) && s.iter().filter(|&&x| x == 2).count() % 2 == 1 {
        return no("Cor4.5(ii)");
    }
    yes("Cor4.5")
}

// ---------------------------------------------------------------- rank 3, P

fn p3(t: &ClassTuple) -> Result<Rule> {
    let sspec = t.spec.s_spec();
    let labels = t.labels();
    if t.spec.split_r().is_none() {
        return s3(&ClassTuple::from_labels(&sspec, &labels)?);
    }
    if t.spec.qv() == 2 {
        return Ok(None);
    }
    if t.len() >= 4 {
        return Ok(yes("Cor1.6"));
    }
    let mut some_rank = false;
    for k in sspec.central_shifts() {
        let mut ls = labels.clone();
        ls[0] = scalar_shift(&sspec, &ls[0], k as i64)?;
        if rank_ok(&ClassTuple::from_labels(&sspec, &ls)?) {
            some_rank = true;
            break;
        }
    }
    if !some_rank {
        return Ok(no("Eq3"));
    }
    if let Some(id) = cor16_match(t)? {
        return Ok(no(&id));
    }
    Ok(yes("Cor1.6"))
}

/// The exceptional triples of P, as label multisets.
fn cor16_list(spec: &GroupSpec) -> Result<Vec<(&'static str, Vec<ClassLabel>)>> {
    let r = spec.split_r().expect("split case");
    let n = spec.q_pm();
    let md = |x: i64| x.rem_euclid(n as i64) as u64;
    let lab = |s: u8, p: Vec<i64>| ClassLabel::new(s, p.into_iter().map(md).collect());
    let c3 = |l: u8| ClassLabel::with_split(3, vec![0], l);
    let c2 = || lab(2, vec![0]);
    let c6 = || lab(6, vec![0, r as i64, 2 * r as i64]);
    let r = r as i64;
    let mut raw: Vec<(&'static str, Vec<ClassLabel>)> = Vec::new();
    for l1 in 0..3u8 {
        for l2 in (l1 + 1)..3 {
            // For PSL only the (ii) family occurs; the (i) triples have N > 0.
            if spec.sign() == Sign::Unitary {
                raw.push(("Cor1.6(i)", vec![c3(l1), c3(l2), c2()]));
            }
            for k in 1..r {
                raw.push(("Cor1.6(ii)", vec![c3(l1), c3(l2), lab(4, vec![k, -2 * k])]));
            }
        }
    }
    if spec.sign() == Sign::Unitary {
        // Every lift of (C2, C2, C3) is a (3,2,2) exception of GU.
        for l in 0..3u8 {
            raw.push(("Thm1.3(a)(iv)", vec![c2(), c2(), c3(l)]));
        }
        for k in 0..r {
            raw.push((
                "Cor1.6(iii)",
                vec![c2(), lab(4, vec![k, -2 * k]), lab(4, vec![-k, 2 * k])],
            ));
        }
        for k in 1..r {
            if 3 * k != r && 3 * k != 2 * r {
                raw.push((
                    "Cor1.6(iv)",
                    vec![
                        lab(5, vec![k, -2 * k]),
                        lab(4, vec![k, -2 * k]),
                        lab(4, vec![k, -2 * k]),
                    ],
                ));
            }
        }
        for l in 0..3u8 {
            raw.push(("Cor1.6(v)", vec![c6(), c3(l), c2()]));
        }
        for k in 1..r {
            raw.push((
                "Cor1.6(vi)",
                vec![c6(), lab(5, vec![k, -2 * k]), lab(4, vec![-k, 2 * k])],
            ));
        }
        raw.push(("Cor1.6(vii)", vec![c6(), c6(), c2()]));
    }
    let mut out = Vec::new();
    for (id, ls) in raw {
        let canon: Result<Vec<ClassLabel>> = ls.iter().map(|l| canonical_label(spec, l)).collect();
        if let Ok(c) = canon {
            out.push((id, label_multiset(c)));
        }
    }
    Ok(out)
}

fn cor16_match(t: &ClassTuple) -> Result<Option<String>> {
    let ms = label_multiset(t.labels());
    Ok(cor16_list(&t.spec)?
        .into_iter()
        .find(|(_, l)| *l == ms)
        .map(|(id, _)| id.to_string()))
}

// ---------------------------------------------------------------- rank 2

fn g2(t: &ClassTuple) -> Rule {
    if !t.det_ok() {
        return no("Eq2");
    }
    let q = t.spec.qv();
    let unitary = t.spec.sign() == Sign::Unitary;
    let i0 = if unitary { 3 } else { 4 };
    let m = t.len();
    if m == 3
        && exists(t, &[&[i0], &[i0], &[2]], |v| {
            v.d(&[1, 1, 1]) as u8 + v.d(&[1, 2, 1]) as u8 == 1
        })
    {
        return no("Thm5.1(i)");
    }
    if q == 3 {
        let spec = t.spec;
        let set: Vec<ClassLabel> = if unitary {
            vec![
                ClassLabel::new(3, vec![0, 2]),
                ClassLabel::new(3, vec![1, 3]),
            ]
        } else {
            vec![ClassLabel::new(4, vec![2])]
        };
        let set: Vec<ClassLabel> = set
            .iter()
            .filter_map(|l| canonical_label(&spec, l).ok())
            .collect();
        let in_c = t.classes.iter().filter(|c| set.contains(&c.label)).count();
        let in_2 = t.classes.iter().filter(|c| c.series() == 2).count();
        if in_c == m - 1 && in_2 == 1 {
            return no("Thm5.1(ii)");
        }
    }
    if q == 2 && t.series().iter().filter(|&&s| s == 2).count() % 2 == 1 {
        return no("Thm5.1(iii)");
    }
    yes("Thm5.1")
}

fn s2(t: &ClassTuple) -> Result<Rule> {
    let q = t.spec.qv();
    if q.is_multiple_of(2) {
        return Ok(g2(&g_tuple(t)?));
    }
    let su = GroupSpec::new(Family::SU, 2, q)?;
    let t = if t.spec.family == Family::SL {
        let ls: Vec<ClassLabel> = t
            .labels()
            .iter()
            .map(|l| sl2_to_su2(&t.spec, l))
            .collect::<Result<_>>()?;
        ClassTuple::from_labels(&su, &ls)?
    } else {
        t.clone()
    };
    match g2(&g_tuple(&t)?) {
        None => return Ok(None),
        Some((false, id)) => return Ok(Some((false, id))),
        Some((true, _)) => {}
    }
    Ok(Some(match thm54(&t) {
        Some(id) => (false, id),
        None => (true, "Thm5.4".to_string()),
    }))
}

/// Exceptions for SU(2,q²), q = 2r − 1, in SU labels.
fn thm54(t: &ClassTuple) -> Option<String> {
    let id = |s: &str| Some(format!("Thm5.4({s})"));
    let q = t.spec.qv();
    let r = q.div_ceil(2);
    let m = t.len();
    let c2 = |v: &View| (v.k(0) / r, v.k(1) / r, v.l(0) as u64, v.l(1) as u64);
    if m == 3 {
        if exists(t, &[&[2], &[2], &[2]], |v| {
            v.l(0) != v.l(1) && !v.d(&[1, 1, 1])
        }) {
            return id("i");
        }
        if exists(t, &[&[2], &[2], &[3]], |v| {
            let (a, b, l1, l2) = c2(v);
            (r + (a + b) * r + v.k(2) + l1 + l2) % 2 == 1
        }) {
            return id("ii");
        }
        if exists(t, &[&[2], &[2], &[4]], |v| {
            let (a, b, l1, l2) = c2(v);
            let k3 = v.k(2) / (q + 1);
            (r + (r - 1) * (a + b) + k3 + l1 + l2).is_multiple_of(2)
        }) {
            return id("iii");
        }
    }
    if q == 3 {
        let phi: u64 = t
            .classes
            .iter()
            .filter(|c| c.series() == 2)
            .map(|c| 1 + c.label.split.unwrap_or(0) as u64)
            .sum();
        if !phi.is_multiple_of(3) {
            return id("iv");
        }
    }
    if q == 5 {
        let same_l = |v: &View, upto: usize| (0..upto).all(|i| v.l(i) == v.l(0));
        if m == 3 && exists(t, &[&[2], &[2], &[2]], |v| same_l(v, 3) && v.d(&[1, 1, 1])) {
            return id("v");
        }
        if m == 4
            && exists(t, &[&[2], &[2], &[2], &[2]], |v| {
                same_l(v, 4) && !v.d(&[1, 1, 1, 1])
            })
        {
            return id("vi");
        }
        if m == 4
            && exists(t, &[&[2], &[2], &[2], &[3]], |v| {
                same_l(v, 3) && (v.k(0) + v.k(1) + v.k(2) + v.k(3)) % 2 == 1
            })
        {
            return id("vii");
        }
    }
    None
}
