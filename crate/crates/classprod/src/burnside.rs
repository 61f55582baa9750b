//! Structure constants N(c₁, …, c_m) from character sums.
//!
//! The dimension-3 engine collapses the sums over each character family to
//! counts of eigenvalue selections whose product is 1, which keeps the cost
//! independent of q apart from the residue bookkeeping. The S and P engines
//! reduce to the G engine plus the contribution of the characters that
//! split on restriction.

mod closed;
mod dim2;
mod profile;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{cyc_rational, CycSum, Rational};
use crate::chartab::{char_value, dims, families, s_restriction, AlphaSets, CharFamilySpec};
use crate::classes::{
    class_data, group_order, scalar_shift, ClassData, ClassLabel, GroupSpec, Kind,
};
use crate::{Error, Result};

pub use closed::closed_form_triple;
pub use profile::{profile_key, profile_representatives, scalar_orbit_reps, ProfileKey};

/// Longest tuple the engines accept.
pub const DEFAULT_TUPLE_CAP: usize = 12;
/// Largest q for the uncollapsed character sum.
pub const CHARSUM_MAX_Q: u64 = 7;
/// Longest tuple for which the full δ table is materialized.
pub const SUMMARY_MAX_LEN: usize = 8;

/// A tuple of classes of one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTuple {
    pub spec: GroupSpec,
    pub classes: Vec<ClassData>,
}

impl ClassTuple {
    pub fn new(spec: &GroupSpec, classes: Vec<ClassData>) -> Result<Self> {
        if classes.len() > DEFAULT_TUPLE_CAP {
            return Err(Error::TupleTooLong {
                len: classes.len(),
                cap: DEFAULT_TUPLE_CAP,
            });
        }
        if classes.is_empty() {
            return Err(Error::InvalidParams("empty class tuple".into()));
        }
        if let Some(c) = classes.iter().find(|c| c.dim != spec.dim) {
            return Err(Error::WrongGroup(format!(
                "{} is not a class of {spec}",
                c.label
            )));
        }
        Ok(ClassTuple {
            spec: *spec,
            classes,
        })
    }

    pub fn from_labels(spec: &GroupSpec, labels: &[ClassLabel]) -> Result<Self> {
        if labels.len() > DEFAULT_TUPLE_CAP {
            return Err(Error::TupleTooLong {
                len: labels.len(),
                cap: DEFAULT_TUPLE_CAP,
            });
        }
        let classes = labels
            .iter()
            .map(|l| class_data(spec, l))
            .collect::<Result<Vec<_>>>()?;
        ClassTuple::new(spec, classes)
    }

    /// Parses a comma-separated label list such as `C7[1,1],C7[1,1],C2[0]`.
    pub fn parse(spec: &GroupSpec, text: &str) -> Result<Self> {
        let labels = split_label_list(text)
            .iter()
            .map(|s| crate::classes::parse_label(spec, s))
            .collect::<Result<Vec<_>>>()?;
        ClassTuple::from_labels(spec, &labels)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    pub fn series(&self) -> Vec<u8> {
        self.classes.iter().map(|c| c.series()).collect()
    }

    /// The same classes in another order.
    pub fn permuted(&self, order: &[usize]) -> ClassTuple {
        ClassTuple {
            spec: self.spec,
            classes: order.iter().map(|&i| self.classes[i].clone()).collect(),
        }
    }

    /// Σ det τ-exponents ≡ 0.
    pub fn det_ok(&self) -> bool {
        let n = self.spec.modulus();
        self.classes
            .iter()
            .fold(0u64, |acc, c| (acc + c.det_exp) % n)
            == 0
    }
}

impl fmt::Display for ClassTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.classes.iter().map(|c| c.label.to_string()).collect();
        write!(f, "{}: ({})", self.spec, labels.join(", "))
    }
}

/// Splits on commas that are not inside brackets.
pub fn split_label_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// δ_ā for a 1-based multi-index.
pub fn delta(tuple: &ClassTuple, a: &[usize]) -> Result<u8> {
    if a.len() != tuple.len() {
        return Err(Error::IndexOutOfRange(format!(
            "multi-index of length {} for {} classes",
            a.len(),
            tuple.len()
        )));
    }
    let n = tuple.spec.modulus();
    let mut s = 0u64;
    for (c, &ai) in tuple.classes.iter().zip(a) {
        if ai == 0 || ai > c.n {
            return Err(Error::IndexOutOfRange(format!(
                "index {ai} for {} with {} eigenvalues",
                c.label, c.n
            )));
        }
        s = (s + c.eigens[ai - 1].tau_exp) % n;
    }
    Ok((s == 0) as u8)
}

fn delta0(classes: &[ClassData], a: &[usize], n: u64) -> bool {
    classes
        .iter()
        .zip(a)
        .fold(0u64, |s, (c, &ai)| (s + c.eigens[ai].tau_exp) % n)
        == 0
}

/// All multi-indices (0-based) of a box.
fn multi_indices(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..b).map(move |i| {
                    let mut v = p.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// The δ-quantities of a tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaSummary {
    /// δ_ā keyed by the 1-based multi-index.
    pub delta: BTreeMap<Vec<usize>, u8>,
    #[serde(rename = "Delta")]
    pub big_delta: i64,
    #[serde(rename = "Delta_a")]
    pub delta_a: BTreeMap<usize, i64>,
    #[serde(rename = "Delta_prime")]
    pub delta_prime: i64,
}

impl DeltaSummary {
    pub fn new(tuple: &ClassTuple) -> Result<Self> {
        let m = tuple.len();
        if m > SUMMARY_MAX_LEN {
            return Err(Error::CapacityExceeded(format!("δ table for {m} classes")));
        }
        let n = tuple.spec.modulus();
        let cl = &tuple.classes;
        let mut delta = BTreeMap::new();
        let mut delta_prime = 0;
        for a in multi_indices(&cl.iter().map(|c| c.n).collect::<Vec<_>>()) {
            let d = delta0(cl, &a, n);
            delta_prime += d as i64;
            delta.insert(a.iter().map(|x| x + 1).collect(), d as u8);
        }
        let mut delta_a = BTreeMap::new();
        for a in multi_indices(&cl.iter().map(|c| c.n_prime).collect::<Vec<_>>()) {
            let weight = cl
                .iter()
                .zip(&a)
                .filter(|(c, &ai)| ai == 0 && matches!(c.series(), 4 | 5))
                .count();
            let e = delta_a.entry(weight).or_insert(0);
            *e += delta0(cl, &a, n) as i64;
        }
        let big_delta = if tuple.spec.dim == 3 {
            big_delta_dim3(tuple)
        } else {
            big_delta_dim2(tuple)
        };
        Ok(DeltaSummary {
            delta,
            big_delta,
            delta_a,
            delta_prime,
        })
    }

    /// δ at a 1-based multi-index (0 when out of range).
    pub fn d(&self, a: &[usize]) -> i64 {
        self.delta.get(a).copied().unwrap_or(0) as i64
    }

    pub fn delta_of(&self, a: usize) -> i64 {
        self.delta_a.get(&a).copied().unwrap_or(0)
    }
}

/// Δ: the 𝒜₆ part over orbits of simultaneous coordinate permutations and
/// the 𝒜₇ part over orbits of the swap of the two non-Ω eigenvalues.
fn big_delta_dim3(tuple: &ClassTuple) -> i64 {
    let n = tuple.spec.modulus();
    let cl = &tuple.classes;
    let sets = AlphaSets::new();
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut total = 0;

    let a6: Vec<&[[usize; 3]]> = cl.iter().map(|c| sets.a6(c.series())).collect();
    if a6.iter().all(|s| !s.is_empty()) {
        let mut seen = BTreeSet::new();
        for idx in multi_indices(&a6.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            let alphas: Vec<[usize; 3]> = idx.iter().zip(&a6).map(|(&i, s)| s[i]).collect();
            let rep = perms
                .iter()
                .map(|p| {
                    alphas
                        .iter()
                        .map(|al| [al[p[0]], al[p[1]], al[p[2]]])
                        .collect::<Vec<_>>()
                })
                .min()
                .unwrap();
            if !seen.insert(rep) {
                continue;
            }
            let ok =
                (0..3).all(|j| delta0(cl, &alphas.iter().map(|al| al[j]).collect::<Vec<_>>(), n));
            total += ok as i64;
        }
    }

    let a7: Vec<&[[usize; 2]]> = cl.iter().map(|c| sets.a7(c.series())).collect();
    if a7.iter().all(|s| !s.is_empty()) {
        let swap = |al: [usize; 2], c: &ClassData| -> [usize; 2] {
            if c.series() != 7 {
                return al;
            }
            let f = |x: usize| match x {
                1 => 2,
                2 => 1,
                y => y,
            };
            [f(al[0]), f(al[1])]
        };
        let mut seen = BTreeSet::new();
        for idx in multi_indices(&a7.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            let alphas: Vec<[usize; 2]> = idx.iter().zip(&a7).map(|(&i, s)| s[i]).collect();
            let swapped: Vec<[usize; 2]> =
                alphas.iter().zip(cl).map(|(&al, c)| swap(al, c)).collect();
            let rep = alphas.clone().min(swapped);
            if !seen.insert(rep) {
                continue;
            }
            let ok =
                (0..2).all(|j| delta0(cl, &alphas.iter().map(|al| al[j]).collect::<Vec<_>>(), n));
            total += ok as i64;
        }
    }
    total
}

/// Dimension 2: Σ δ_ā over ā with a₁ = 1, i.e. one multi-index from each
/// complementary pair.
fn big_delta_dim2(tuple: &ClassTuple) -> i64 {
    let n = tuple.spec.modulus();
    let cl = &tuple.classes;
    let mut bounds: Vec<usize> = cl.iter().map(|c| if c.n == 1 { 1 } else { 2 }).collect();
    bounds[0] = 1;
    multi_indices(&bounds)
        .iter()
        .filter(|a| a.iter().zip(cl).all(|(&ai, c)| ai < c.n) && delta0(cl, a, n))
        .count() as i64
}

/// Which engine produced a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Trivial,
    Closed,
    Sigma,
    Charsum,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Trivial => "trivial",
            Method::Closed => "closed",
            Method::Sigma => "sigma",
            Method::Charsum => "charsum",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn ratio(x: i64) -> Rational {
    Rational::from_integer(big(x))
}

fn pow_r(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Number of choices, one option per position, whose K coordinate sums all
/// vanish mod n.
fn zero_sum_count<const K: usize>(options: &[Vec<[u64; K]>], n: u64) -> u64 {
    let mut states: HashMap<[u64; K], u64> = HashMap::new();
    states.insert([0; K], 1);
    for opts in options {
        let mut next: HashMap<[u64; K], u64> = HashMap::with_capacity(states.len() * opts.len());
        for (s, &c) in &states {
            for o in opts {
                let mut t = *s;
                for j in 0..K {
                    t[j] = (t[j] + o[j]) % n;
                }
                *next.entry(t).or_insert(0) += c;
            }
        }
        states = next;
    }
    states.get(&[0; K]).copied().unwrap_or(0)
}

/// Σ over choices with vanishing exponent sum of the product of weights.
fn zero_sum_weighted(options: &[Vec<(u64, i64)>], n: u64) -> BigInt {
    let mut states: HashMap<u64, BigInt> = HashMap::new();
    states.insert(0, BigInt::one());
    for opts in options {
        let mut next: HashMap<u64, BigInt> = HashMap::new();
        for (s, w) in &states {
            for &(e, c) in opts {
                if c == 0 {
                    continue;
                }
                *next.entry((s + e) % n).or_insert_with(BigInt::zero) += w * c;
            }
        }
        next.retain(|_, w| !w.is_zero());
        states = next;
    }
    states.remove(&0).unwrap_or_default()
}

fn require_dim3_g(tuple: &ClassTuple) -> Result<()> {
    if tuple.spec.dim != 3 || tuple.spec.kind() != Kind::G {
        return Err(Error::WrongGroup(format!(
            "{} is not GL(3,q) or GU(3,q²)",
            tuple.spec
        )));
    }
    if tuple.len() < 2 {
        return Err(Error::InvalidParams("need at least two classes".into()));
    }
    Ok(())
}

/// N̄ for GL(3,q) / GU(3,q²): the sum over Irr(G) of Πχ(A_ν)/χ(1)^{m−2}.
pub fn nbar_g(tuple: &ClassTuple) -> Result<Rational> {
    require_dim3_g(tuple)?;
    if !tuple.det_ok() {
        return Ok(Rational::zero());
    }
    Ok(sigma_sums(&tuple.spec, &tuple.classes))
}

fn sigma_sums(spec: &GroupSpec, cl: &[ClassData]) -> Rational {
    let q = spec.qv() as i64;
    let u = spec.sign().s();
    let n = spec.modulus();
    let m = cl.len() as i64;
    let fams = families(spec.qv(), spec.sign());
    let d = dims(spec.qv(), spec.sign());
    let mut total = Rational::zero();

    // Ξ₁ and Ξ₂.
    for f in &fams {
        let dm = pow_r(&ratio(f.dim_d), -(m - 2));
        match f.name.xi() {
            1 => {
                let prod: BigInt = cl.iter().map(|c| big(f.coeff(c.series(), 0))).product();
                total += Rational::from_integer(prod * (q + u)) * &f.sym_factor * dm;
            }
            2 => {
                let options: Vec<Vec<(u64, i64)>> = cl
                    .iter()
                    .map(|c| {
                        (0..c.n_prime)
                            .map(|a| (c.eigens[a].tau_exp, f.coeff(c.series(), a)))
                            .collect()
                    })
                    .collect();
                let w = zero_sum_weighted(&options, n);
                total += Rational::from_integer(w * (q + u) * (q + u)) * &f.sym_factor * dm;
            }
            _ => {}
        }
    }

    let sets = AlphaSets::new();
    let coeff_prod =
        |f: &CharFamilySpec| -> BigInt { cl.iter().map(|c| big(f.coeff(c.series(), 0))).product() };
    let x6 = &fams[11];
    let x7 = &fams[12];
    let x8 = &fams[13];

    // Σ₃: two coordinates suffice, the third is forced by the determinant.
    let cp = coeff_prod(x6);
    if !cp.is_zero() {
        let options: Vec<Vec<[u64; 2]>> = cl
            .iter()
            .map(|c| {
                sets.a6(c.series())
                    .iter()
                    .map(|al| [c.eigens[al[0]].tau_exp, c.eigens[al[1]].tau_exp])
                    .collect()
            })
            .collect();
        let cnt = zero_sum_count(&options, n);
        total += Rational::new(cp * cnt * (q + u).pow(3), big(6)) * pow_r(&ratio(d[5]), -(m - 2));
    }

    // Σ₄.
    let cp = coeff_prod(x7);
    if !cp.is_zero() {
        let options: Vec<Vec<[u64; 2]>> = cl
            .iter()
            .map(|c| {
                sets.a7(c.series())
                    .iter()
                    .map(|al| [c.eigens[al[0]].tau_exp, c.eigens[al[1]].tau_exp])
                    .collect()
            })
            .collect();
        let cnt = zero_sum_count(&options, n);
        total +=
            Rational::new(cp * cnt * (q + u) * (q * q - 1), big(2)) * pow_r(&ratio(d[6]), -(m - 2));
    }

    // Σ₅.
    let cp = coeff_prod(x8);
    if !cp.is_zero() {
        let options: Vec<Vec<[u64; 1]>> = cl
            .iter()
            .map(|c| c.eigens.iter().map(|e| [e.tau_exp]).collect())
            .collect();
        let cnt = zero_sum_count(&options, n);
        total += Rational::new(cp * cnt * (q * q * q + u), big(3)) * pow_r(&ratio(d[7]), -(m - 2));
    }
    total
}

/// N̄ by summing every character of every family explicitly.
pub fn nbar_charsum(tuple: &ClassTuple) -> Result<Rational> {
    require_dim3_g(tuple)?;
    let q = tuple.spec.qv();
    if q > CHARSUM_MAX_Q {
        return Err(Error::CapacityExceeded(format!(
            "character sum at q = {q} (cap {CHARSUM_MAX_Q})"
        )));
    }
    let tower = tuple.spec.tower();
    let m = tuple.len() as i64;
    let mut total = Rational::zero();
    for f in families(q, tuple.spec.sign()) {
        let mut acc = CycSum::zero(tower.modulus);
        for p in f.params() {
            let mut prod = CycSum::constant(tower.modulus, 1);
            for c in &tuple.classes {
                prod = prod.mul(&char_value(&f, &p, c, tower))?;
                if prod.is_zero() {
                    break;
                }
            }
            acc.add_assign(&prod)?;
        }
        total += cyc_rational(&acc) * &f.sym_factor * pow_r(&ratio(f.dim_d), -(m - 2));
    }
    Ok(total)
}

fn unsplit(spec: &GroupSpec, c: &ClassData) -> Result<ClassData> {
    let label = ClassLabel::new(c.series(), c.label.params.clone());
    class_data(&spec.g_spec(), &label)
}

/// N̄ for SL(3,q) / SU(3,q²) from N̄_G and the split characters.
pub fn nbar_s(tuple: &ClassTuple) -> Result<Rational> {
    let spec = tuple.spec;
    if spec.dim != 3 || spec.kind() != Kind::S {
        return Err(Error::WrongGroup(format!(
            "{spec} is not SL(3,q) or SU(3,q²)"
        )));
    }
    if tuple.len() < 2 {
        return Err(Error::InvalidParams("need at least two classes".into()));
    }
    let gspec = spec.g_spec();
    let qpm = spec.q_pm() as i64;
    // C₃ entries first.
    let mut order: Vec<usize> = (0..tuple.len()).collect();
    order.sort_by_key(|&i| tuple.classes[i].series() != 3);
    let cl: Vec<&ClassData> = order.iter().map(|&i| &tuple.classes[i]).collect();
    let g_cl = cl
        .iter()
        .map(|c| unsplit(&spec, c))
        .collect::<Result<Vec<_>>>()?;
    let base = sigma_sums(&gspec, &g_cl) / ratio(qpm);
    let Ok(sr) = s_restriction(spec.tower()) else {
        return Ok(base);
    };
    let u = spec.sign().s();
    let m = cl.len() as i64;
    let n = cl.iter().take_while(|c| c.series() == 3).count();

    let mut split_sum = BigInt::zero();
    for t in 0..3u8 {
        let mut p = BigInt::one();
        for c in &cl[..n] {
            let l = c.label.split.unwrap_or(0);
            p *= sr.split6_value(t, l);
        }
        split_sum += p;
    }
    let f1 = Rational::new(-big((-u).pow(n as u32)), big(3))
        + pow_r(&ratio(3), n as i64 - 2) * Rational::from_integer(split_sum);
    if f1.is_zero() {
        return Ok(base);
    }

    let tower = spec.tower();
    let modulus = tower.modulus;
    let fams = families(spec.qv(), spec.sign());
    let (x6, x8) = (&fams[11], &fams[13]);
    let e2 = |f: &CharFamilySpec, params: &[u64]| -> Result<CycSum> {
        let mut prod = CycSum::constant(modulus, 1);
        for c in &g_cl[n..] {
            prod = prod.mul(&char_value(f, params, c, tower))?;
        }
        Ok(prod)
    };
    let d = dims(spec.qv(), spec.sign());
    let (d6, d8) = (big(d[5]), big(d[7]));
    let k_sum = g_cl[..n]
        .iter()
        .fold(0u64, |s, c| (s + c.label.params[0]) % spec.q_pm());
    // F₂·(d₆d₈)^{m−2} as one cyclotomic sum.
    let e = (m - 2).max(0) as usize;
    let mut bracket = e2(x6, &sr.d6_params())?.scale(&num_traits::pow(d8.clone(), e));
    for uu in 1..=2u64 {
        let tw = CycSum::term(modulus, sr.split8_twist(uu, k_sum), 1);
        let v = tw.mul(&e2(x8, &[sr.d8_param(uu)])?)?;
        bracket.add_assign(&v.scale(&num_traits::pow(d6.clone(), e)))?;
    }
    let f2 = cyc_rational(&bracket) / Rational::from_integer(num_traits::pow(d6 * d8, e));
    Ok(base + f1 * f2)
}

/// |Π c_ν| / |Γ| · N̄ as a checked nonnegative integer.
fn assemble(tuple: &ClassTuple, nbar: &Rational) -> Result<BigUint> {
    let sizes: BigUint = tuple.classes.iter().map(|c| c.size.clone()).product();
    let order = group_order(&tuple.spec);
    let v = Rational::from_integer(BigInt::from(sizes)) * nbar
        / Rational::from_integer(BigInt::from(order));
    if !v.is_integer() || v.is_negative() {
        return Err(Error::IntegralityViolation(format!("{tuple}: N = {v}")));
    }
    Ok(v.to_integer().to_biguint().unwrap())
}

fn trivial_count(tuple: &ClassTuple) -> Option<BigUint> {
    if tuple.len() == 1 {
        let c = &tuple.classes[0];
        let id = c.series() == 1 && c.label.params.iter().all(|&p| p == 0);
        let id = id || (tuple.spec.kind() == Kind::P && c.series() == 1);
        return Some(BigUint::from(id as u32));
    }
    None
}

/// N via the character-sum engines, never via closed forms.
pub fn n_sigma(tuple: &ClassTuple) -> Result<BigUint> {
    if let Some(v) = trivial_count(tuple) {
        return Ok(v);
    }
    let spec = tuple.spec;
    match (spec.dim, spec.kind()) {
        (3, Kind::G) => assemble(tuple, &nbar_g(tuple)?),
        (3, Kind::S) => assemble(tuple, &nbar_s(tuple)?),
        (3, Kind::P) => n_projective(tuple),
        (2, Kind::G) => assemble(tuple, &dim2::nbar_g2(tuple)?),
        (2, Kind::S) => assemble(tuple, &dim2::nbar_s2(tuple)?),
        _ => Err(Error::WrongGroup(format!("{spec} is not supported"))),
    }
}

/// N for PSL(3,q) / PSU(3,q²) from the counts in S over central lifts.
fn n_projective(tuple: &ClassTuple) -> Result<BigUint> {
    let pspec = tuple.spec;
    let sspec = pspec.s_spec();
    let shifts = pspec.central_shifts();
    let z = shifts.len() as u64;
    let s_classes = tuple
        .classes
        .iter()
        .map(|c| class_data(&sspec, &c.label))
        .collect::<Result<Vec<_>>>()?;
    // Stabilizer of each lift under central shifts.
    let mut denom = BigUint::one();
    for c in &s_classes {
        let orbit: BTreeSet<ClassLabel> = shifts
            .iter()
            .map(|&k| scalar_shift(&sspec, &c.label, k as i64))
            .collect::<Result<_>>()?;
        denom *= z / orbit.len() as u64;
    }
    let mut total = BigUint::zero();
    for &k in &shifts {
        let mut cl = s_classes.clone();
        cl[0] = class_data(&sspec, &scalar_shift(&sspec, &cl[0].label, k as i64)?)?;
        let t = ClassTuple::new(&sspec, cl)?;
        total += n_sigma(&t)?;
    }
    if (&total % &denom) != BigUint::zero() {
        return Err(Error::IntegralityViolation(format!(
            "{tuple}: lifted sum {total} / {denom}"
        )));
    }
    Ok(total / denom)
}

/// N(c₁, …, c_m) and the method that produced it. Triples with a closed
/// form use it; everything else goes through the character-sum engines.
pub fn n_count(tuple: &ClassTuple) -> Result<(BigUint, Method)> {
    if let Some(v) = trivial_count(tuple) {
        return Ok((v, Method::Trivial));
    }
    if tuple.len() == 2 {
        let inv = crate::classes::inverse_class(&tuple.spec, &tuple.classes[0].label)?;
        let v = if inv == tuple.classes[1].label {
            tuple.classes[0].size.clone()
        } else {
            BigUint::zero()
        };
        return Ok((v, Method::Trivial));
    }
    if tuple.len() == 3 && tuple.classes.iter().all(|c| c.series() != 1) {
        match closed_form_triple(tuple) {
            Ok((v, first)) => {
                let n = v * Rational::from_integer(BigInt::from(tuple.classes[first].size.clone()));
                if !n.is_integer() || n.is_negative() {
                    return Err(Error::IntegralityViolation(format!(
                        "{tuple}: closed form gives {n}"
                    )));
                }
                return Ok((n.to_integer().to_biguint().unwrap(), Method::Closed));
            }
            Err(Error::NoClosedForm(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((n_sigma(tuple)?, Method::Sigma))
}

/// Exact N(c₁, …, c_m) as a u64 when it fits (test convenience).
pub fn n_u64(tuple: &ClassTuple) -> Result<u64> {
    let (v, _) = n_count(tuple)?;
    v.to_u64()
        .ok_or_else(|| Error::CapacityExceeded(format!("N = {v} does not fit in 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_lists_split_outside_brackets() {
        assert_eq!(split_label_list("C7[1,1], C2[0]"), vec!["C7[1,1]", "C2[0]"]);
        assert_eq!(split_label_list("C3[0;l=1]"), vec!["C3[0;l=1]"]);
    }

    #[test]
    fn permuted_and_det() {
        let g: GroupSpec = "GL3:3".parse().unwrap();
        let t = ClassTuple::parse(&g, "C4[0,1],C2[0],C2[1]").unwrap();
        assert_eq!(t.permuted(&[2, 0, 1]).series(), vec![2, 4, 2]);
        assert_eq!(t.det_ok(), t.permuted(&[1, 2, 0]).det_ok());
    }

    #[test]
    fn summary_agrees_with_delta() {
        let g: GroupSpec = "GU3:3".parse().unwrap();
        let t = ClassTuple::parse(&g, "C4[0,1],C2[0],C2[0]").unwrap();
        let s = DeltaSummary::new(&t).unwrap();
        for a in [[1, 1, 1], [2, 1, 1]] {
            assert_eq!(s.d(&a), delta(&t, &a).unwrap() as i64);
        }
    }

    #[test]
    fn sigma_matches_count_on_pairs() {
        let g: GroupSpec = "GL2:5".parse().unwrap();
        for c in crate::classes::all_class_data(&g).unwrap() {
            let inv = crate::classes::inverse_class(&g, &c.label).unwrap();
            let t = ClassTuple::from_labels(&g, &[c.label.clone(), inv]).unwrap();
            assert_eq!(n_sigma(&t).unwrap(), c.size);
        }
    }
}
