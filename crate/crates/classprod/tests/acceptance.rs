//! Acceptance run. Prints one PASS/FAIL line per criterion, followed by
//! indented detail lines, and exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use classprod::arith::Sign;
use classprod::burnside::{n_count, n_sigma, profile_representatives, ClassTuple, DeltaSummary};
use classprod::classes::{
    all_class_data, group_order, inverse_class, scalar_shift, ClassData, GroupSpec, Kind,
};
use classprod::decide::{
    covering_numbers, rank_ok, rule_decide, table2_scan, ProductMap, Table2Scan,
};
use classprod::verify::{closed_form_suite, oracle_suite, rules_suite, Coverage, SuiteReport};
use classprod::Error;

/// Multisets per (group, m) enumerated in full by the rules check; above this
/// the check falls back to profiles or sampling.
const RULES_EXHAUSTIVE_CAP: f64 = 100_000.0;
const RULES_EXHAUSTIVE_CAP_DIM2: f64 = 500_000.0;
const RULES_SAMPLE: usize = 20_000;
const RULES_SEED: u64 = 1;
/// Longest tuple walked through the q = 2 product map.
const Q2_MAX_M: usize = 6;
const PROPERTY_SEED: u64 = 7;

struct Outcome {
    ok: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        self.ok &= ok;
        let tag = if ok { "ok  " } else { "BAD " };
        self.lines.push(format!("{tag}{}", line.into()));
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("    {}", line.into()));
    }

    fn report(&mut self, r: &SuiteReport) {
        self.check(r.ok(), r.to_string());
        for f in r.failures.iter().take(5) {
            self.note(f.clone());
        }
    }
}

fn spec(s: &str) -> GroupSpec {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn tuple(g: &GroupSpec, cl: Vec<ClassData>) -> ClassTuple {
    ClassTuple::new(g, cl).expect("tuple")
}

fn count(t: &ClassTuple) -> BigUint {
    n_count(t).unwrap_or_else(|e| panic!("{t}: {e}")).0
}

fn is_identity(c: &ClassData) -> bool {
    c.is_central() && c.label.params.iter().all(|&p| p == 0)
}

/// Same tuple with classes ordered by decreasing series.
fn by_series(t: &ClassTuple) -> ClassTuple {
    let mut cl = t.classes.clone();
    cl.sort_by_key(|c| std::cmp::Reverse(c.series()));
    tuple(&t.spec, cl)
}

/// Determinant relation and rank condition. For PSL/PSU they must hold for
/// some central shift of the lift to SL/SU.
fn det_rank_ok(t: &ClassTuple) -> bool {
    if t.spec.kind() != Kind::P {
        return t.det_ok() && rank_ok(t);
    }
    let s = t.spec.s_spec();
    s.central_shifts().into_iter().any(|k| {
        let mut ls = t.labels();
        ls[0] = scalar_shift(&s, &ls[0], k as i64).expect("shift");
        let lt = ClassTuple::from_labels(&s, &ls).expect("lift");
        lt.det_ok() && rank_ok(&lt)
    })
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let mut groups: Vec<String> = [
        "GL3:2", "GL3:3", "GU3:2", "GU3:3", "SL3:3", "SU3:2", "SU3:3",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for q in 2..=5 {
        groups.push(format!("GL2:{q}"));
        groups.push(format!("GU2:{q}"));
    }
    for q in [3, 5, 7] {
        groups.push(format!("SL2:{q}"));
    }
    for g in groups {
        out.report(&oracle_suite(&spec(&g)).expect("oracle suite"));
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let mut all = SuiteReport::default();
    for q in [3, 4, 5, 7, 8, 9, 11, 13] {
        for fam in ["GL", "GU"] {
            let r = closed_form_suite(&spec(&format!("{fam}3:{q}"))).expect("closed forms");
            out.report(&r);
            all.absorb(r);
        }
    }
    let want: BTreeSet<Vec<u8>> = (2..=8u8)
        .combinations_with_replacement(3)
        .map(|mut p| {
            p.reverse();
            p
        })
        .filter(|p| p != &vec![5, 5, 5])
        .collect();
    let missing: Vec<_> = want.difference(&all.patterns).collect();
    out.check(
        missing.is_empty(),
        format!(
            "{} of {} non-central patterns exercised, missing {missing:?}",
            want.len() - missing.len(),
            want.len()
        ),
    );
    let extra: Vec<_> = all.patterns.difference(&want).collect();
    out.check(
        extra.is_empty(),
        format!("no closed form claimed outside the table: {extra:?}"),
    );
    for g in ["SU3:5", "SU3:8", "SL3:4", "SL3:7"] {
        out.report(&closed_form_suite(&spec(g)).expect("closed forms"));
    }
    for q in [2, 3, 4, 5, 7, 8, 9] {
        for fam in ["GL", "GU"] {
            out.report(&closed_form_suite(&spec(&format!("{fam}2:{q}"))).expect("closed forms"));
        }
    }
    for q in [3, 5, 7, 9] {
        for fam in ["SL", "SU"] {
            out.report(&closed_form_suite(&spec(&format!("{fam}2:{q}"))).expect("closed forms"));
        }
    }
    out
}

fn scan_lines(out: &mut Outcome, q: u64, sign: Sign, graded: bool) {
    let s = table2_scan(q, sign).expect("scan");
    let exp = Table2Scan::expected(sign);
    let missing: Vec<_> = exp.difference(&s.hit).cloned().collect();
    let extra: Vec<_> = s.hit.difference(&exp).cloned().collect();
    let exact =
        missing.is_empty() && extra.is_empty() && s.unlisted.is_empty() && s.spurious.is_empty();
    let line = format!(
        "q={q} {sign:?}: {} tuples, {} profiles, {} of {} rows hit, {} unlisted, {} spurious",
        s.tuples,
        s.profiles,
        s.hit.intersection(&exp).count(),
        exp.len(),
        s.unlisted.len(),
        s.spurious.len()
    );
    if graded {
        out.check(exact, line);
    } else {
        out.note(format!(
            "(info) {line}{}",
            if exact { ", exact" } else { "" }
        ));
    }
    for m in &missing {
        out.note(format!("never vanishes: {m}"));
    }
    for m in &extra {
        out.note(format!("hit outside expected set: {m}"));
    }
    for u in s.unlisted.iter().take(5) {
        out.note(format!("unlisted zero: {u}"));
    }
    for u in s.spurious.iter().take(5) {
        out.note(format!("spurious: {u}"));
    }
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    scan_lines(&mut out, 5, Sign::Unitary, true);
    scan_lines(&mut out, 5, Sign::Linear, true);
    scan_lines(&mut out, 7, Sign::Linear, false);
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    for (g, want) in [
        ("PSL3:3", (3, 4)),
        ("PSL3:4", (3, 4)),
        ("PSL3:5", (3, 4)),
        ("PSU3:3", (4, 5)),
        ("PSU3:5", (3, 4)),
    ] {
        let got = covering_numbers(&spec(g)).expect("covering numbers");
        out.check(
            got == want,
            format!("{g}: (cn, ecn) = {got:?}, expected {want:?}"),
        );
    }
    out
}

/// Series left after deleting every 6 and an even number of 2's can be made
/// equal to one of the listed patterns.
fn q2_forbidden(series: &[u8]) -> bool {
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
    let mut rest: Vec<u8> = series
        .iter()
        .copied()
        .filter(|&s| s != 6 && s != 2)
        .collect();
    rest.sort_unstable();
    let twos = series.iter().filter(|&&s| s == 2).count();
    LIST.iter().any(|p| {
        let mut pr: Vec<u8> = p.iter().copied().filter(|&s| s != 2).collect();
        pr.sort_unstable();
        let ptwos = p.iter().filter(|&&s| s == 2).count();
        pr == rest && twos >= ptwos && (twos - ptwos) % 2 == 0
    })
}

/// Called with the class indices, the classes their product meets, and the class list.
type Visit<'a> = dyn FnMut(&[usize], &BTreeSet<usize>, &[ClassData]) + 'a;

struct Q2Walk<'a> {
    pm: ProductMap,
    cls: Vec<ClassData>,
    nc: Vec<usize>,
    visit: &'a mut Visit<'a>,
}

impl Q2Walk<'_> {
    fn walk(&mut self, start: usize, idx: &mut Vec<usize>, set: &BTreeSet<usize>) {
        if idx.len() >= 3 {
            (self.visit)(idx, set, &self.cls);
        }
        if idx.len() == Q2_MAX_M {
            return;
        }
        for k in start..self.nc.len() {
            let c = self.nc[k];
            let next = if idx.is_empty() {
                BTreeSet::from([c])
            } else {
                self.pm.times(set, c).expect("product")
            };
            idx.push(c);
            self.walk(k, idx, &next);
            idx.pop();
        }
    }
}

fn q2_walk(g: &GroupSpec, visit: &mut Visit<'_>) {
    let pm = ProductMap::new(g).expect("product map");
    let cls = pm.classes().to_vec();
    let nc = (0..cls.len()).filter(|&i| !cls[i].is_central()).collect();
    let mut w = Q2Walk { pm, cls, nc, visit };
    w.walk(0, &mut Vec::new(), &BTreeSet::new());
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();

    let gu = spec("GU3:2");
    let (mut n, mut rules_bad, mut forb, mut forb_bad, mut coset, mut coset_bad) =
        (0, 0, 0, 0, 0, 0);
    let mut notes = Vec::new();
    let mut coset_notes = Vec::new();
    q2_walk(&gu, &mut |idx, set, cls| {
        n += 1;
        let t = tuple(&gu, idx.iter().map(|&i| cls[i].clone()).collect());
        let id = set.iter().any(|&x| is_identity(&cls[x]));
        let d = rule_decide(&t).expect("rules").expect("rules cover q = 2");
        if d.contains_identity != id {
            rules_bad += 1;
            notes.push(format!("{t}: rule {:?}, product map {id}", d.rule_id));
        }
        let series = t.series();
        if t.det_ok() && q2_forbidden(&series) {
            forb += 1;
            if id {
                forb_bad += 1;
                notes.push(format!("{t}: forbidden pattern contains I"));
            }
        }
        if (4..=5).contains(&t.len())
            && !q2_forbidden(&series)
            && !series.iter().all(|&s| s == 2 || s == 6)
        {
            coset += 1;
            let det = t
                .classes
                .iter()
                .fold(0, |s, c| (s + c.det_exp) % gu.modulus());
            let want: BTreeSet<usize> = (0..cls.len()).filter(|&i| cls[i].det_exp == det).collect();
            if *set != want {
                coset_bad += 1;
                coset_notes.push(format!("{t}: product is not a coset of SU"));
            }
        }
    });
    out.check(
        rules_bad == 0,
        format!("GU3:2 m<={Q2_MAX_M}: {n} tuples, rules vs product map: {rules_bad} disagreements"),
    );
    out.check(
        forb > 0 && forb_bad == 0,
        format!("GU3:2 forbidden patterns: {forb} tuples, {forb_bad} contain I"),
    );
    // Stated alongside the q = 2 quadruple exceptions, which already break it
    // (their products miss I), so it is reported but not graded.
    out.note(format!(
        "(info) GU3:2 m=4,5 products equal to a coset of SU: {} of {coset}",
        coset - coset_bad
    ));

    let quads = [
        ["C4[0,1]", "C4[0,1]", "C4[0,1]", "C3[1]"],
        ["C4[0,1]", "C4[0,1]", "C4[0,2]", "C5[1,0]"],
    ];
    for q in quads {
        let t = ClassTuple::parse(&gu, &q.join(",")).expect("quadruple");
        let n = count(&t);
        out.check(
            t.det_ok() && rank_ok(&t) && n.is_zero(),
            format!("{t}: N = {n}"),
        );
    }

    let su = spec("SU3:2");
    let (mut n, mut rules_bad, mut par_bad, mut literal_bad, mut coset_bad) = (0, 0, 0, 0, 0);
    q2_walk(&su, &mut |idx, set, cls| {
        n += 1;
        let t = tuple(&su, idx.iter().map(|&i| cls[i].clone()).collect());
        let id = set.iter().any(|&x| is_identity(&cls[x]));
        let d = rule_decide(&t).expect("rules").expect("rules cover q = 2");
        if d.contains_identity != id {
            rules_bad += 1;
            notes.push(format!("{t}: rule {:?}, product map {id}", d.rule_id));
        }
        // C3(*, l) maps to the three involutions of S/(H ∪ C2) = Z2 × Z2, so
        // the product lands in H ∪ C2 iff the three counts share a parity.
        let par: Vec<usize> = (0..3u8)
            .map(|l| {
                t.classes
                    .iter()
                    .filter(|c| c.series() == 3 && c.label.split == Some(l))
                    .count()
                    % 2
            })
            .collect();
        let twos = t.classes.iter().filter(|c| c.series() == 2).count();
        let only_26 = t.classes.iter().all(|c| matches!(c.series(), 2 | 6));
        let cond_ii = only_26 && twos % 2 == 1;
        let predicted = !(par.iter().any(|&p| p != par[0]) || cond_ii);
        if predicted != id {
            par_bad += 1;
            notes.push(format!(
                "{t}: parity rule says {predicted}, product map {id}"
            ));
        }
        let literal = !(par.contains(&1) || cond_ii);
        if literal != id {
            literal_bad += 1;
        }
        // H = C1 ∪ C6, the cosets of H ∪ C2 are H ∪ C2 and C3(*, l).
        let h: BTreeSet<usize> = (0..cls.len())
            .filter(|&i| matches!(cls[i].series(), 1 | 6))
            .collect();
        let c2: BTreeSet<usize> = (0..cls.len()).filter(|&i| cls[i].series() == 2).collect();
        let c3 = |l: u8| -> BTreeSet<usize> {
            (0..cls.len())
                .filter(|&i| cls[i].series() == 3 && cls[i].label.split == Some(l))
                .collect()
        };
        let ok = if t.series().contains(&3) {
            *set == &h | &c2 || (0..3).any(|l| *set == c3(l))
        } else {
            *set == h || *set == c2
        };
        if !ok {
            coset_bad += 1;
            notes.push(format!("{t}: product is not a coset"));
        }
    });
    out.check(
        rules_bad == 0,
        format!("SU3:2 m<={Q2_MAX_M}: {n} tuples, rules vs product map: {rules_bad} disagreements"),
    );
    out.check(
        par_bad == 0,
        format!("SU3:2 parity conditions: {par_bad} disagreements"),
    );
    out.note(format!(
        "(info) reading (i) as 'some C3(*,l) count is odd': {literal_bad} disagreements"
    ));
    out.check(
        coset_bad == 0,
        format!("SU3:2 coset structure: {coset_bad} exceptions"),
    );
    for line in notes.into_iter().take(5) {
        out.note(line);
    }
    for line in coset_notes.into_iter().take(2) {
        out.note(format!("(info) {line}"));
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut total = SuiteReport::default();
    for dim in [3u8, 2] {
        for fam in ["GL", "GU", "SL", "SU", "PSL", "PSU"] {
            for q in [2u64, 3, 4, 5, 7] {
                if dim == 2 && fam.starts_with('P') {
                    continue;
                }
                let g = spec(&format!("{fam}{dim}:{q}"));
                let nc = all_class_data(&g)
                    .expect("classes")
                    .iter()
                    .filter(|c| !c.is_central())
                    .count();
                let cap = if dim == 2 {
                    RULES_EXHAUSTIVE_CAP_DIM2
                } else {
                    RULES_EXHAUSTIVE_CAP
                };
                for m in 3..=5usize {
                    let cov = if binom(nc + m - 1, m) <= cap {
                        Coverage::Exhaustive
                    } else if g.kind() == Kind::G
                        && m <= 4
                        && !(g.sign() == Sign::Unitary && q == 2)
                    {
                        Coverage::Profiles
                    } else {
                        Coverage::Sampled {
                            count: RULES_SAMPLE,
                            seed: RULES_SEED,
                        }
                    };
                    let r = rules_suite(&g, m, cov).expect("rules suite");
                    let cov_text = match cov {
                        Coverage::Exhaustive => "exhaustive".to_string(),
                        Coverage::Profiles => "profiles".to_string(),
                        Coverage::Sampled { count, .. } => format!("{count} sampled"),
                    };
                    if !r.ok() {
                        out.check(false, format!("{r} [{cov_text}]"));
                        for f in r.failures.iter().take(3) {
                            out.note(f.clone());
                        }
                    } else {
                        out.note(format!("{r} [{cov_text}]"));
                    }
                    total.absorb(r);
                }
            }
        }
    }
    out.check(
        total.ok(),
        format!(
            "all groups q<=7, m=3..5: {} checked, {} disagreements",
            total.checked, total.failed
        ),
    );
    out
}

#[derive(Default)]
struct Tally {
    checked: usize,
    bad: usize,
    first: Vec<String>,
}

impl Tally {
    fn see(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.bad += 1;
            if self.first.len() < 3 {
                self.first.push(msg());
            }
        }
    }

    fn emit(self, out: &mut Outcome, name: &str) {
        out.check(
            self.checked > 0 && self.bad == 0,
            format!("{name}: {} checked, {} violations", self.checked, self.bad),
        );
        for f in self.first {
            out.note(f);
        }
    }
}

fn property_groups() -> Vec<GroupSpec> {
    let mut v = Vec::new();
    for q in [2u64, 3, 4, 5] {
        for fam in ["GL", "GU", "SL", "SU", "PSL", "PSU"] {
            v.push(spec(&format!("{fam}3:{q}")));
        }
    }
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for fam in ["GL", "GU", "SL", "SU"] {
            v.push(spec(&format!("{fam}2:{q}")));
        }
    }
    v
}

/// Random m-tuple of classes; with `det` the last class completes the
/// determinant relation.
fn random_tuple(
    g: &GroupSpec,
    cl: &[ClassData],
    m: usize,
    det: bool,
    rng: &mut ChaCha8Rng,
) -> Option<ClassTuple> {
    let n = g.modulus();
    let mut v: Vec<ClassData> = (0..m - 1)
        .map(|_| cl[rng.gen_range(0..cl.len())].clone())
        .collect();
    if det {
        let s = v.iter().fold(0, |s, c| (s + c.det_exp) % n);
        let fits: Vec<&ClassData> = cl.iter().filter(|c| (s + c.det_exp) % n == 0).collect();
        if fits.is_empty() {
            return None;
        }
        v.push(fits[rng.gen_range(0..fits.len())].clone());
    } else {
        v.push(cl[rng.gen_range(0..cl.len())].clone());
    }
    Some(tuple(g, v))
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(PROPERTY_SEED);
    let mut perm = Tally::default();
    let mut inv = Tally::default();
    let mut colsum = Tally::default();
    let mut necessity = Tally::default();
    let mut integral = Tally::default();

    let n_checked = |t: &ClassTuple, tally: &mut Tally| -> Option<BigUint> {
        match n_count(t) {
            Ok((v, _)) => {
                tally.see(true, String::new);
                Some(v)
            }
            Err(e @ Error::IntegralityViolation(_)) => {
                tally.see(false, || e.to_string());
                None
            }
            Err(e) => panic!("{t}: {e}"),
        }
    };

    for g in property_groups() {
        let cl = all_class_data(&g).expect("classes");
        for (m, reps) in [(3usize, 60usize), (4, 15)] {
            for k in 0..reps {
                let Some(t) = random_tuple(&g, &cl, m, k % 4 != 0, &mut rng) else {
                    continue;
                };
                let Some(n) = n_checked(&t, &mut integral) else {
                    continue;
                };
                for p in (0..m).permutations(m).skip(1) {
                    let pt = t.permuted(&p);
                    let Some(np) = n_checked(&pt, &mut integral) else {
                        continue;
                    };
                    perm.see(np == n, || format!("{t}: {n}, permuted {pt}: {np}"));
                }
                let it = tuple(
                    &g,
                    t.classes
                        .iter()
                        .map(|c| {
                            let l = inverse_class(&g, &c.label).expect("inverse");
                            cl.iter()
                                .find(|d| d.label == l)
                                .expect("inverse class")
                                .clone()
                        })
                        .collect(),
                );
                if let Some(ni) = n_checked(&it, &mut integral) {
                    inv.see(ni == n, || format!("{t}: {n}, inverses: {ni}"));
                }
                if !det_rank_ok(&t) {
                    necessity.see(n.is_zero(), || format!("{t}: det/rank fails but N = {n}"));
                }
            }
        }
        for m in [3usize, 4] {
            let reps = if m == 3 { 6 } else { 2 };
            for _ in 0..reps {
                let head: Vec<ClassData> = (0..m - 1)
                    .map(|_| cl[rng.gen_range(0..cl.len())].clone())
                    .collect();
                let want: BigUint = head.iter().map(|c| c.size.clone()).product();
                let mut sum = BigUint::zero();
                for c in &cl {
                    let mut v = head.clone();
                    v.push(c.clone());
                    sum += n_checked(&tuple(&g, v), &mut integral).unwrap_or_default();
                }
                colsum.see(sum == want, || {
                    format!(
                        "{g} {:?}: Σ = {sum}, Π|c| = {want}",
                        head.iter().map(|c| c.label.to_string()).collect::<Vec<_>>()
                    )
                });
            }
        }
    }

    // Exhaustive necessity over triples of the small groups, where rank
    // failures are common enough to matter.
    for s in [
        "GL3:2", "GL3:3", "GU3:2", "GU3:3", "SL3:3", "SU3:3", "GL2:3", "GU2:3", "SL2:5",
    ] {
        let g = spec(s);
        let cl = all_class_data(&g).expect("classes");
        for idx in (0..cl.len()).combinations_with_replacement(3) {
            let t = tuple(&g, idx.iter().map(|&i| cl[i].clone()).collect());
            if det_rank_ok(&t) {
                continue;
            }
            if let Some(n) = n_checked(&t, &mut integral) {
                necessity.see(n.is_zero(), || format!("{t}: det/rank fails but N = {n}"));
            }
        }
    }

    // Character sums through the split-class corrections.
    for s in [
        "SL3:4", "SL3:7", "SU3:5", "SU3:8", "SU3:2", "PSL3:4", "PSU3:5",
    ] {
        let g = spec(s);
        let cl = all_class_data(&g).expect("classes");
        for (m, reps) in [(3usize, 150usize), (4, 60)] {
            for _ in 0..reps {
                let Some(t) = random_tuple(&g, &cl, m, true, &mut rng) else {
                    continue;
                };
                match n_sigma(&t) {
                    Ok(_) => integral.see(true, String::new),
                    Err(e @ Error::IntegralityViolation(_)) => {
                        integral.see(false, || e.to_string())
                    }
                    Err(e) => panic!("{t}: {e}"),
                }
            }
        }
    }

    perm.emit(&mut out, "permutation invariance");
    inv.emit(&mut out, "inversion invariance");
    colsum.emit(&mut out, "column sums");
    necessity.emit(&mut out, "det/rank necessity");
    integral.emit(&mut out, "integrality");

    let mut ineq: BTreeMap<&str, Tally> = BTreeMap::new();
    for q in [3u64, 4, 5, 7, 8, 9, 11, 13] {
        for fam in ["GL", "GU"] {
            let g = spec(&format!("{fam}3:{q}"));
            for t in profile_representatives(&g, 3).expect("profiles").1 {
                let t = by_series(&t);
                let d = DeltaSummary::new(&t).expect("δ");
                match t.series().as_slice() {
                    [8, 8, 8] => ineq
                        .entry("Δ' <= 9 on (8,8,8)")
                        .or_default()
                        .see(d.delta_prime <= 9, || {
                            format!("{t}: Δ' = {}", d.delta_prime)
                        }),
                    [7, 7, 2] => ineq
                        .entry("Δ <= 2 on (7,7,2)")
                        .or_default()
                        .see(d.big_delta <= 2, || format!("{t}: Δ = {}", d.big_delta)),
                    [6, 6, 5] => {
                        let v = d.delta_of(1) + d.delta_of(0) - d.big_delta;
                        ineq.entry("Δ₁ + Δ₀ - Δ >= 0 on (6,6,5)")
                            .or_default()
                            .see(v >= 0, || format!("{t}: {v}"))
                    }
                    _ => {}
                }
            }
        }
    }
    for name in [
        "Δ' <= 9 on (8,8,8)",
        "Δ <= 2 on (7,7,2)",
        "Δ₁ + Δ₀ - Δ >= 0 on (6,6,5)",
    ] {
        ineq.remove(name).unwrap_or_default().emit(&mut out, name);
    }

    let mut sizes = Tally::default();
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for dim in [2u8, 3] {
            for fam in ["GL", "GU", "SL", "SU", "PSL", "PSU"] {
                if dim == 2 && fam.starts_with('P') {
                    continue;
                }
                let g = spec(&format!("{fam}{dim}:{q}"));
                let total: BigUint = all_class_data(&g)
                    .expect("classes")
                    .iter()
                    .map(|c| c.size.clone())
                    .sum();
                let order = group_order(&g);
                sizes.see(total == order, || {
                    format!("{g}: Σ|c| = {total}, |Γ| = {order}")
                });
            }
        }
    }
    sizes.emit(&mut out, "class sizes sum to the group order (q <= 9)");
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for q in [5u64, 7] {
        let g = spec(&format!("GU3:{q}"));
        let qi = q as i64;
        let (mut a, mut b, mut c) = (Tally::default(), Tally::default(), Tally::default());
        let mut seen_5222 = Vec::new();
        for t in profile_representatives(&g, 4).expect("profiles").1 {
            let t = by_series(&t);
            let d = DeltaSummary::new(&t).expect("δ");
            let n = count(&t);
            let c1 = t.classes[0].size.clone();
            let d1111 = d.d(&[1, 1, 1, 1]);
            match t.series().as_slice() {
                [3, 2, 2, 2] if d1111 == 1 => a.see(n.is_zero(), || format!("{t}: N = {n}")),
                [5, 2, 2, 2] => {
                    seen_5222.push(format!("{t}: δ1111 = {d1111}, N/|c1| = {}", &n / &c1));
                    if d1111 == 1 {
                        let want = BigUint::from(((qi + 3) * (qi * qi - 1)) as u64);
                        b.see(&n / &c1 == want && (&n % &c1).is_zero(), || {
                            format!("{t}: N/|c1| = {}, expected {want}", &n / &c1)
                        });
                    }
                }
                [4, 4, 4, 2] if d1111 == 0 => {
                    let (x, y, z) = (d.d(&[1, 1, 2, 1]), d.d(&[1, 2, 1, 1]), d.d(&[2, 1, 1, 1]));
                    let v =
                        qi * (qi * qi - 1) * (qi + 1 - qi * (x + y + z) + (2 * qi - 1) * x * y * z);
                    let want = BigUint::from(v as u64) * &c1;
                    c.see(n == want, || format!("{t}: N = {n}, expected {want}"));
                }
                _ => {}
            }
        }
        a.emit(&mut out, &format!("q={q} (3,2,2,2) δ1111=1: N = 0"));
        b.emit(
            &mut out,
            &format!("q={q} (5,2,2,2) δ1111=1: N/|c1| = (q+3)(q²-1)"),
        );
        for s in seen_5222 {
            out.note(format!("(5,2,2,2) profile {s}"));
        }
        c.emit(
            &mut out,
            &format!("q={q} (4,4,4,2) δ1111=0: printed polynomial"),
        );
    }
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equality", criterion_1),
        ("closed forms vs character sums", criterion_2),
        ("exceptional pattern list at q=5", criterion_3),
        ("covering numbers", criterion_4),
        ("q=2 product structure", criterion_5),
        ("rules vs positivity", criterion_6),
        ("property suite", criterion_7),
        ("m=4 structure constants", criterion_8),
    ];
    // ACCEPTANCE_ONLY=2,5 runs a subset.
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        let verdict = if out.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {verdict} {name} ({:.1}s)",
            i + 1,
            t.elapsed().as_secs_f64()
        );
        for l in &out.lines {
            println!("    {l}");
        }
        if !out.ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
