//! Conjugacy-class catalogs for GL/GU/SL/SU/PSL/PSU in dimension 3 and
//! GL/GU/SL/SU in dimension 2, with the label algebra (inverse, scalar
//! shift, split classes, SU(2) ↔ SL(2)).
//!
//! Parameters are residues in `[0, n)`: Ω-exponents mod q±1, ρ-exponents
//! mod q²−1 and θ-exponents mod q³±1. Eigenvalues are stored as exponents of
//! τ modulo N (see [`RootTower`]).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{root_tower, PrimePowerQ, RootTower, Sign};
use crate::error::{Error, Result};

/// Largest q accepted for dimension 3 (q⁶ must stay well inside u64).
pub const MAX_Q_DIM3: u64 = 1000;
/// Largest q accepted for dimension 2.
pub const MAX_Q_DIM2: u64 = 1 << 20;
/// Upper bound on the number of labels [`enumerate_classes`] will produce.
pub const MAX_ENUMERATED_CLASSES: u64 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    GL,
    GU,
    SL,
    SU,
    PSL,
    PSU,
}

/// Whether a group is the full group G, the determinant-one subgroup S, or
/// its central quotient P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    G,
    S,
    P,
}

impl Family {
    pub fn sign(self) -> Sign {
        match self {
            Family::GU | Family::SU | Family::PSU => Sign::Unitary,
            _ => Sign::Linear,
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Family::GL | Family::GU => Kind::G,
            Family::SL | Family::SU => Kind::S,
            Family::PSL | Family::PSU => Kind::P,
        }
    }

    pub fn of(kind: Kind, sign: Sign) -> Family {
        match (kind, sign) {
            (Kind::G, Sign::Linear) => Family::GL,
            (Kind::G, Sign::Unitary) => Family::GU,
            (Kind::S, Sign::Linear) => Family::SL,
            (Kind::S, Sign::Unitary) => Family::SU,
            (Kind::P, Sign::Linear) => Family::PSL,
            (Kind::P, Sign::Unitary) => Family::PSU,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::GL => "GL",
            Family::GU => "GU",
            Family::SL => "SL",
            Family::SU => "SU",
            Family::PSL => "PSL",
            Family::PSU => "PSU",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(Family::GL),
            "GU" => Ok(Family::GU),
            "SL" => Ok(Family::SL),
            "SU" => Ok(Family::SU),
            "PSL" => Ok(Family::PSL),
            "PSU" => Ok(Family::PSU),
            _ => Err(Error::Parse(format!("unknown group family `{s}`"))),
        }
    }
}

/// A concrete group: family, dimension and q. For unitary families the
/// group is GU(n, q²) etc., so `q` is the order of the fixed field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub family: Family,
    pub dim: u8,
    pub q: PrimePowerQ,
    tower: RootTower,
}

impl GroupSpec {
    pub fn new(family: Family, dim: u8, q: u64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::WrongGroup(format!(
                "dimension {dim} is not supported"
            )));
        }
        if dim == 2 && family.kind() == Kind::P {
            return Err(Error::WrongGroup(format!("{family}2 is not supported")));
        }
        let cap = if dim == 3 { MAX_Q_DIM3 } else { MAX_Q_DIM2 };
        if q > cap {
            return Err(Error::CapacityExceeded(format!(
                "q = {q} exceeds {cap} in dimension {dim}"
            )));
        }
        let q = PrimePowerQ::new(q)?;
        let tower = root_tower(q, family.sign(), dim)?;
        Ok(GroupSpec {
            family,
            dim,
            q,
            tower,
        })
    }

    pub fn sign(&self) -> Sign {
        self.family.sign()
    }

    pub fn kind(&self) -> Kind {
        self.family.kind()
    }

    pub fn tower(&self) -> &RootTower {
        &self.tower
    }

    pub fn qv(&self) -> u64 {
        self.q.q
    }

    /// q ± 1, the order of Ω.
    pub fn q_pm(&self) -> u64 {
        self.tower.q_pm()
    }

    /// q ∓ 1.
    pub fn q_mp(&self) -> u64 {
        self.tower.q_mp()
    }

    /// Modulus of τ-exponents.
    pub fn modulus(&self) -> u64 {
        self.tower.modulus
    }

    pub fn with_kind(&self, kind: Kind) -> GroupSpec {
        let family = Family::of(kind, self.sign());
        GroupSpec { family, ..*self }
    }

    pub fn g_spec(&self) -> GroupSpec {
        self.with_kind(Kind::G)
    }

    pub fn s_spec(&self) -> GroupSpec {
        self.with_kind(Kind::S)
    }

    /// Order of the center of S, gcd(dim, q±1).
    pub fn center_s(&self) -> u64 {
        (self.dim as u64).gcd(&self.q_pm())
    }

    /// r with q±1 = dim·r when the unipotent classes of S split
    /// (dimension 3: 3 | q±1; dimension 2: q odd).
    pub fn split_r(&self) -> Option<u64> {
        let d = self.dim as u64;
        self.q_pm().is_multiple_of(d).then(|| self.q_pm() / d)
    }

    /// Ω-exponents k' such that ω^{k'}·I lies in the group. For S and P
    /// these are the central elements of S.
    pub fn central_shifts(&self) -> Vec<u64> {
        let qpm = self.q_pm();
        match self.kind() {
            Kind::G => (0..qpm).collect(),
            _ => {
                let step = qpm / self.center_s();
                (0..self.center_s()).map(|j| j * step).collect()
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}:{}", self.family, self.dim, self.q.q)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;
    /// Parses `<FAMILY><dim>:<q>`, e.g. `GU3:5` or `SL2:7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, q) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected <FAMILY><dim>:<q>, got `{s}`")))?;
        if head.len() < 2 {
            return Err(Error::Parse(format!("bad group `{s}`")));
        }
        let (fam, dim) = head.split_at(head.len() - 1);
        let family: Family = fam.parse()?;
        let dim: u8 = dim
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension in `{s}`")))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad q in `{s}`")))?;
        GroupSpec::new(family, dim, q)
    }
}

pub fn group_order(spec: &GroupSpec) -> BigUint {
    let q = BigUint::from(spec.qv());
    let qpm = BigUint::from(spec.q_pm());
    let q2m1 = &q * &q - 1u32;
    let g = if spec.dim == 3 {
        let q3pm = BigUint::from(spec.tower.q3_pm());
        q.pow(3) * &qpm * &q2m1 * q3pm
    } else {
        &q * &qpm * &q2m1
    };
    match spec.kind() {
        Kind::G => g,
        Kind::S => g / qpm,
        Kind::P => g / qpm / spec.center_s(),
    }
}

/// A conjugacy-class label `C_series^{(params)}` with an optional split
/// index for the classes that break up in S.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLabel {
    pub series: u8,
    pub params: Vec<u64>,
    pub split: Option<u8>,
}

impl ClassLabel {
    pub fn new(series: u8, params: Vec<u64>) -> Self {
        ClassLabel {
            series,
            params,
            split: None,
        }
    }

    pub fn with_split(series: u8, params: Vec<u64>, split: u8) -> Self {
        ClassLabel {
            series,
            params,
            split: Some(split),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}[", self.series)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        if let Some(l) = self.split {
            write!(f, ";l={l}")?;
        }
        f.write_str("]")
    }
}

/// Label text before reduction: parameters may be negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLabel {
    pub series: u8,
    pub params: Vec<i64>,
    pub split: Option<i64>,
}

impl FromStr for RawLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad class label `{s}`"));
        let rest = t
            .strip_prefix('C')
            .or_else(|| t.strip_prefix('c'))
            .ok_or_else(bad)?;
        let open = rest.find('[').ok_or_else(bad)?;
        let series: u8 = rest[..open].parse().map_err(|_| bad())?;
        let inner = rest[open + 1..].strip_suffix(']').ok_or_else(bad)?;
        let (plist, split) = match inner.split_once(';') {
            Some((p, sp)) => {
                let v = sp.strip_prefix("l=").ok_or_else(bad)?;
                (p, Some(v.parse::<i64>().map_err(|_| bad())?))
            }
            None => (inner, None),
        };
        let params = plist
            .split(',')
            .map(|x| x.parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(RawLabel {
            series,
            params,
            split,
        })
    }
}

impl FromStr for ClassLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let raw: RawLabel = s.parse()?;
        let to_u = |v: i64| {
            u64::try_from(v)
                .map_err(|_| Error::Parse(format!("negative entry in `{s}`; use parse_label")))
        };
        Ok(ClassLabel {
            series: raw.series,
            params: raw.params.into_iter().map(to_u).collect::<Result<_>>()?,
            split: raw
                .split
                .map(|l| u8::try_from(l).map_err(|_| Error::Parse(format!("bad split in `{s}`"))))
                .transpose()?,
        })
    }
}

/// Parses a label in the context of a group, reducing negative or
/// out-of-range parameters and returning the canonical label.
pub fn parse_label(spec: &GroupSpec, s: &str) -> Result<ClassLabel> {
    let raw: RawLabel = s.parse()?;
    let moduli = param_moduli(spec, raw.series)?;
    if moduli.len() != raw.params.len() {
        return Err(Error::InvalidParams(format!(
            "C{} takes {} parameters, got {}",
            raw.series,
            moduli.len(),
            raw.params.len()
        )));
    }
    let params = raw
        .params
        .iter()
        .zip(&moduli)
        .map(|(&p, &n)| md(p as i128, n))
        .collect();
    let split = match raw.split {
        None => None,
        Some(l) => {
            let parts = spec.dim as i64;
            Some(l.rem_euclid(parts) as u8)
        }
    };
    canonical_label(
        spec,
        &ClassLabel {
            series: raw.series,
            params,
            split,
        },
    )
}

/// One eigenvalue with its multiplicity and Jordan block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigen {
    pub tau_exp: u64,
    pub mult: u8,
    pub jordan: Vec<u8>,
    pub in_omega: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassData {
    pub label: ClassLabel,
    pub size: BigUint,
    /// τ-exponent of the determinant.
    pub det_exp: u64,
    /// Ω-exponent of the determinant, mod q±1.
    pub det_omega: u64,
    /// Distinct eigenvalues ordered by non-increasing multiplicity with the
    /// Ω-members first.
    pub eigens: Vec<Eigen>,
    pub n: usize,
    pub n_prime: usize,
    pub dim: u8,
}

impl ClassData {
    pub fn series(&self) -> u8 {
        self.label.series
    }

    /// rk(A − λ_a I) for eigenvalue slot `a` (0-based).
    pub fn rank_at(&self, a: usize) -> u8 {
        self.dim - self.eigens[a].jordan.len() as u8
    }

    pub fn is_central(&self) -> bool {
        self.label.series == 1
    }
}

fn md(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn neg(a: u64, n: u64) -> u64 {
    (n - a % n) % n
}

fn number_of_series(spec: &GroupSpec) -> u8 {
    if spec.dim == 3 {
        8
    } else {
        4
    }
}

/// Residue moduli of the parameters of series `series`.
pub fn param_moduli(spec: &GroupSpec, series: u8) -> Result<Vec<u64>> {
    let qpm = spec.q_pm();
    let q = spec.qv();
    let m2 = q * q - 1;
    let v = match (spec.dim, series) {
        (3, 1..=3) => vec![qpm],
        (3, 4 | 5) => vec![qpm, qpm],
        (3, 6) => vec![qpm; 3],
        (3, 7) => vec![qpm, m2],
        (3, 8) => vec![spec.tower.q3_pm()],
        (2, 1 | 2) => vec![qpm],
        (2, 3) => vec![qpm, qpm],
        (2, 4) => vec![m2],
        _ => {
            return Err(Error::InvalidParams(format!(
                "series C{series} does not exist in dimension {}",
                spec.dim
            )))
        }
    };
    Ok(v)
}

/// Canonical G-level parameters (no split handling), validating ranges.
fn canonical_g_params(spec: &GroupSpec, series: u8, params: &[u64]) -> Result<Vec<u64>> {
    let moduli = param_moduli(spec, series)?;
    if params.len() != moduli.len() {
        return Err(Error::InvalidParams(format!(
            "C{series} takes {} parameters, got {}",
            moduli.len(),
            params.len()
        )));
    }
    for (p, n) in params.iter().zip(&moduli) {
        if p >= n {
            return Err(Error::InvalidParams(format!(
                "parameter {p} of C{series} is not below {n}"
            )));
        }
    }
    let q = spec.qv();
    let m2 = q * q - 1;
    let unitary = spec.sign() == Sign::Unitary;
    // The Frobenius-type map l ↦ ∓q·l on ρ-exponents.
    let frob = |l: u64| {
        if unitary {
            neg(mulmod(q, l, m2), m2)
        } else {
            mulmod(q, l, m2)
        }
    };
    match (spec.dim, series) {
        (3, 4 | 5) | (2, 3) => {
            if params[0] == params[1] {
                return Err(Error::InvalidParams(format!(
                    "C{series} needs distinct eigenvalues"
                )));
            }
            if spec.dim == 2 {
                let mut v = params.to_vec();
                v.sort_unstable();
                return Ok(v);
            }
            Ok(params.to_vec())
        }
        (3, 6) => {
            let mut v = params.to_vec();
            v.sort_unstable();
            if v[0] == v[1] || v[1] == v[2] {
                return Err(Error::InvalidParams(
                    "C6 needs three distinct eigenvalues".into(),
                ));
            }
            Ok(v)
        }
        (3, 7) => {
            let l = params[1];
            if l.is_multiple_of(spec.q_mp()) {
                return Err(Error::InvalidParams(format!(
                    "C7 needs l ≢ 0 mod {}",
                    spec.q_mp()
                )));
            }
            Ok(vec![params[0], l.min(frob(l))])
        }
        (3, 8) => {
            let n = spec.tower.q3_pm();
            let k = params[0];
            if k.is_multiple_of(spec.tower.q2_mp_q_1()) {
                return Err(Error::InvalidParams(format!(
                    "C8 needs k ≢ 0 mod {}",
                    spec.tower.q2_mp_q_1()
                )));
            }
            let q2 = mulmod(q, q, n);
            let k2 = mulmod(q2, k, n);
            let k4 = mulmod(q2, k2, n);
            Ok(vec![k.min(k2).min(k4)])
        }
        (2, 4) => {
            let k = params[0];
            if k.is_multiple_of(spec.q_mp()) {
                return Err(Error::InvalidParams(format!(
                    "C4 needs k ≢ 0 mod {}",
                    spec.q_mp()
                )));
            }
            Ok(vec![k.min(frob(k))])
        }
        _ => Ok(params.to_vec()),
    }
}

/// Ω-exponent of det for a G-label.
fn det_omega_of(spec: &GroupSpec, series: u8, p: &[u64]) -> u64 {
    let qpm = spec.q_pm();
    let unitary = spec.sign() == Sign::Unitary;
    let v: i128 = match (spec.dim, series) {
        (3, 1..=3) => 3 * p[0] as i128,
        (3, 4 | 5) => 2 * p[0] as i128 + p[1] as i128,
        (3, 6) => p.iter().map(|&x| x as i128).sum(),
        (3, 7) => {
            if unitary {
                p[0] as i128 - p[1] as i128
            } else {
                p[0] as i128 + p[1] as i128
            }
        }
        (3, 8) => p[0] as i128,
        (2, 1 | 2) => 2 * p[0] as i128,
        (2, 3) => p[0] as i128 + p[1] as i128,
        (2, 4) => {
            if unitary {
                -(p[0] as i128)
            } else {
                p[0] as i128
            }
        }
        _ => unreachable!("series validated earlier"),
    };
    md(v, qpm)
}

/// Whether the class of this G-label breaks into several S-classes.
fn splits_in_s(spec: &GroupSpec, series: u8) -> bool {
    spec.kind() != Kind::G
        && spec.split_r().is_some()
        && ((spec.dim == 3 && series == 3) || (spec.dim == 2 && series == 2))
}

fn canonical_s(spec: &GroupSpec, raw: &ClassLabel) -> Result<ClassLabel> {
    let params = canonical_g_params(spec, raw.series, &raw.params)?;
    if spec.kind() != Kind::G && det_omega_of(spec, raw.series, &params) != 0 {
        return Err(Error::InvalidParams(format!(
            "{} does not have determinant 1",
            ClassLabel::new(raw.series, params)
        )));
    }
    let split = if splits_in_s(spec, raw.series) {
        match raw.split {
            Some(l) if (l as u64) < spec.dim as u64 => Some(l),
            Some(l) => {
                return Err(Error::InvalidParams(format!(
                    "split index {l} out of range"
                )))
            }
            None => {
                return Err(Error::InvalidParams(format!(
                    "C{} splits in {}; give `;l=` with the split index",
                    raw.series, spec.family
                )))
            }
        }
    } else {
        if raw.split.is_some() {
            return Err(Error::InvalidParams(format!(
                "C{} does not split in {spec}",
                raw.series
            )));
        }
        None
    };
    Ok(ClassLabel {
        series: raw.series,
        params,
        split,
    })
}

/// The least representative of a label under the parameter identifications
/// (and, for P, under multiplication by central scalars).
pub fn canonical_label(spec: &GroupSpec, raw: &ClassLabel) -> Result<ClassLabel> {
    let s = canonical_s(spec, raw)?;
    if spec.kind() != Kind::P {
        return Ok(s);
    }
    let sspec = spec.s_spec();
    let mut best = s.clone();
    for &k in &spec.central_shifts() {
        let c = scalar_shift(&sspec, &s, k as i64)?;
        if c < best {
            best = c;
        }
    }
    Ok(best)
}

/// All canonical class labels of the group, in increasing label order.
pub fn enumerate_classes(spec: &GroupSpec) -> Result<Vec<ClassLabel>> {
    let q = spec.qv();
    let est = if spec.dim == 3 {
        2 * q * q * q + 8
    } else {
        2 * q * q + 8
    };
    if est > MAX_ENUMERATED_CLASSES {
        return Err(Error::CapacityExceeded(format!(
            "{spec} has too many classes to enumerate"
        )));
    }
    let mut out = Vec::new();
    for series in 1..=number_of_series(spec) {
        let moduli = param_moduli(spec, series)?;
        let mut push = |params: Vec<u64>| {
            if let Ok(p) = canonical_g_params(spec, series, &params) {
                if p != params {
                    return;
                }
                if spec.kind() != Kind::G && det_omega_of(spec, series, &p) != 0 {
                    return;
                }
                if splits_in_s(spec, series) {
                    for l in 0..spec.dim {
                        out.push(ClassLabel::with_split(series, p.clone(), l));
                    }
                } else {
                    out.push(ClassLabel::new(series, p));
                }
            }
        };
        match moduli.len() {
            1 => (0..moduli[0]).for_each(|k| push(vec![k])),
            2 => {
                for k in 0..moduli[0] {
                    for l in 0..moduli[1] {
                        push(vec![k, l]);
                    }
                }
            }
            _ => {
                let n = moduli[0];
                for k in 0..n {
                    for l in k + 1..n {
                        for m in l + 1..n {
                            push(vec![k, l, m]);
                        }
                    }
                }
            }
        }
    }
    if spec.kind() == Kind::P {
        let mut reps: Vec<ClassLabel> = out
            .into_iter()
            .map(|c| canonical_label(spec, &c))
            .collect::<Result<_>>()?;
        reps.sort();
        reps.dedup();
        return Ok(reps);
    }
    out.sort();
    Ok(out)
}

fn g_size(spec: &GroupSpec, series: u8) -> BigUint {
    let q = BigUint::from(spec.qv());
    let qpm = BigUint::from(spec.q_pm());
    let qmp = BigUint::from(spec.q_mp());
    let q2m1 = &q * &q - 1u32;
    if spec.dim == 2 {
        return match series {
            1 => BigUint::from(1u32),
            2 => q2m1,
            3 => &q * &qmp,
            _ => &q * &qpm,
        };
    }
    let q3pm = BigUint::from(spec.tower.q3_pm());
    let q2mq1 = BigUint::from(spec.tower.q2_mp_q_1());
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    match series {
        1 => BigUint::from(1u32),
        2 => &qmp * &q3pm,
        3 => &q * &q2m1 * &q3pm,
        4 => &q2 * &q2mq1,
        5 => &q2 * &qmp * &q3pm,
        6 => &q3 * &qmp * &q2mq1,
        7 => &q3 * &q3pm,
        _ => &q3 * &qpm * &qpm * &qmp,
    }
}

fn eigens_of(spec: &GroupSpec, series: u8, p: &[u64]) -> Vec<Eigen> {
    let t = &spec.tower;
    let e = |tau_exp: u64, mult: u8, jordan: Vec<u8>, in_omega: bool| Eigen {
        tau_exp,
        mult,
        jordan,
        in_omega,
    };
    let q = spec.qv();
    let unitary = spec.sign() == Sign::Unitary;
    let m2 = q * q - 1;
    let frob = |l: u64| {
        if unitary {
            neg(mulmod(q, l, m2), m2)
        } else {
            mulmod(q, l, m2)
        }
    };
    match (spec.dim, series) {
        (3, 1) => vec![e(t.omega(p[0]), 3, vec![1, 1, 1], true)],
        (3, 2) => vec![e(t.omega(p[0]), 3, vec![2, 1], true)],
        (3, 3) => vec![e(t.omega(p[0]), 3, vec![3], true)],
        (3, 4) => vec![
            e(t.omega(p[0]), 2, vec![1, 1], true),
            e(t.omega(p[1]), 1, vec![1], true),
        ],
        (3, 5) => vec![
            e(t.omega(p[0]), 2, vec![2], true),
            e(t.omega(p[1]), 1, vec![1], true),
        ],
        (3, 6) => p.iter().map(|&k| e(t.omega(k), 1, vec![1], true)).collect(),
        (3, 7) => vec![
            e(t.omega(p[0]), 1, vec![1], true),
            e(t.rho(p[1]), 1, vec![1], false),
            e(t.rho(frob(p[1])), 1, vec![1], false),
        ],
        (3, 8) => {
            let n = t.q3_pm();
            let q2 = mulmod(q, q, n);
            let k2 = mulmod(q2, p[0], n);
            let k4 = mulmod(q2, k2, n);
            [p[0], k2, k4]
                .iter()
                .map(|&k| e(t.theta(k), 1, vec![1], false))
                .collect()
        }
        (2, 1) => vec![e(t.omega(p[0]), 2, vec![1, 1], true)],
        (2, 2) => vec![e(t.omega(p[0]), 2, vec![2], true)],
        (2, 3) => p.iter().map(|&k| e(t.omega(k), 1, vec![1], true)).collect(),
        _ => vec![
            e(t.rho(p[0]), 1, vec![1], false),
            e(t.rho(frob(p[0])), 1, vec![1], false),
        ],
    }
}

/// Size, determinant and eigenvalue data of a canonical label.
pub fn class_data(spec: &GroupSpec, label: &ClassLabel) -> Result<ClassData> {
    let canon = canonical_label(spec, label)?;
    if &canon != label {
        return Err(Error::InvalidParams(format!(
            "{label} is not canonical (use {canon})"
        )));
    }
    let series = label.series;
    let mut size = g_size(spec, series);
    if label.split.is_some() {
        size /= spec.dim as u32;
    }
    if spec.kind() == Kind::P {
        let sspec = spec.s_spec();
        let mut orbit: Vec<ClassLabel> = spec
            .central_shifts()
            .iter()
            .map(|&k| scalar_shift(&sspec, label, k as i64))
            .collect::<Result<_>>()?;
        orbit.sort();
        orbit.dedup();
        size = size * orbit.len() / spec.center_s();
    }
    let eigens = eigens_of(spec, series, &label.params);
    let det_omega = det_omega_of(spec, series, &label.params);
    let n = eigens.len();
    let n_prime = eigens.iter().filter(|e| e.in_omega).count();
    Ok(ClassData {
        label: label.clone(),
        size,
        det_exp: spec.tower.omega(det_omega),
        det_omega,
        eigens,
        n,
        n_prime,
        dim: spec.dim,
    })
}

/// Class data for every class of the group, in label order.
pub fn all_class_data(spec: &GroupSpec) -> Result<Vec<ClassData>> {
    enumerate_classes(spec)?
        .iter()
        .map(|c| class_data(spec, c))
        .collect()
}

/// The class of A⁻¹ for A in `label`.
pub fn inverse_class(spec: &GroupSpec, label: &ClassLabel) -> Result<ClassLabel> {
    if spec.kind() == Kind::P {
        let inv = inverse_class(&spec.s_spec(), label)?;
        return canonical_label(spec, &inv);
    }
    let moduli = param_moduli(spec, label.series)?;
    let params: Vec<u64> = label
        .params
        .iter()
        .zip(&moduli)
        .map(|(&p, &n)| neg(p, n))
        .collect();
    let mut split = label.split;
    if spec.dim == 2 && label.series == 2 && spec.qv() % 4 == 3 {
        // −1 is a non-square in F_q, so the two unipotent classes swap.
        split = split.map(|l| 1 - l);
    }
    canonical_label(
        spec,
        &ClassLabel {
            series: label.series,
            params,
            split,
        },
    )
}

/// The class of ω^{k'}·A. In S and P the shift must be central.
pub fn scalar_shift(spec: &GroupSpec, label: &ClassLabel, kp: i64) -> Result<ClassLabel> {
    let qpm = spec.q_pm();
    let j = md(kp as i128, qpm);
    if spec.kind() != Kind::G && !(spec.dim as u64 * j).is_multiple_of(qpm) {
        return Err(Error::InvalidParams(format!(
            "ω^{kp} is not central in {spec}"
        )));
    }
    if spec.kind() == Kind::P {
        return Ok(label.clone());
    }
    let moduli = param_moduli(spec, label.series)?;
    let p = &label.params;
    let params: Vec<u64> = match (spec.dim, label.series) {
        (3, 7) => {
            let m2 = moduli[1];
            vec![(p[0] + j) % qpm, (p[1] + mulmod(j, spec.q_mp(), m2)) % m2]
        }
        (3, 8) => {
            let n = moduli[0];
            vec![(p[0] + mulmod(j, spec.tower.q2_mp_q_1(), n)) % n]
        }
        (2, 4) => {
            let m2 = moduli[0];
            vec![(p[0] + mulmod(j, spec.q_mp(), m2)) % m2]
        }
        _ => p.iter().map(|&x| (x + j) % qpm).collect(),
    };
    canonical_label(
        spec,
        &ClassLabel {
            series: label.series,
            params,
            split: label.split,
        },
    )
}

fn su2_sl2_check(su: &GroupSpec) -> Result<(GroupSpec, GroupSpec)> {
    if su.dim != 2 || su.kind() != Kind::S {
        return Err(Error::WrongGroup(format!("{su} is not SU(2) or SL(2)")));
    }
    let q = su.qv();
    Ok((
        GroupSpec::new(Family::SU, 2, q)?,
        GroupSpec::new(Family::SL, 2, q)?,
    ))
}

/// Image of an SU(2,q²) class in SL(2,q) under the isomorphism used by the
/// oracle. Eigenvalues are preserved, so C3 and C4 trade places.
pub fn su2_to_sl2(su: &GroupSpec, label: &ClassLabel) -> Result<ClassLabel> {
    let (su, sl) = su2_sl2_check(su)?;
    let label = canonical_label(&su, label)?;
    let q = su.qv();
    let p = &label.params;
    let out = match label.series {
        1 | 2 => {
            // ±1: k ∈ {0, (q+1)/2} ↦ {0, (q−1)/2}.
            let k = if p[0] == 0 { 0 } else { sl.q_pm() / 2 };
            ClassLabel {
                series: label.series,
                params: vec![k],
                split: label.split,
            }
        }
        3 => {
            // ω_U^{±k} = ρ^{±(q−1)k}.
            ClassLabel::new(4, vec![(q - 1) * p[0]])
        }
        _ => {
            let k = p[0] / (q + 1);
            ClassLabel::new(3, vec![k, neg(k, q - 1)])
        }
    };
    canonical_label(&sl, &out)
}

pub fn sl2_to_su2(sl: &GroupSpec, label: &ClassLabel) -> Result<ClassLabel> {
    let (su, sl) = su2_sl2_check(sl)?;
    let label = canonical_label(&sl, label)?;
    let q = sl.qv();
    let p = &label.params;
    let out = match label.series {
        1 | 2 => {
            let k = if p[0] == 0 { 0 } else { su.q_pm() / 2 };
            ClassLabel {
                series: label.series,
                params: vec![k],
                split: label.split,
            }
        }
        3 => ClassLabel::new(4, vec![(q + 1) * p[0]]),
        _ => {
            let k = p[0] / (q - 1);
            ClassLabel::new(3, vec![k, neg(k, q + 1)])
        }
    };
    canonical_label(&su, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn sp(s: &str) -> GroupSpec {
        s.parse().unwrap()
    }

    fn lab(s: &str) -> ClassLabel {
        s.parse().unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(group_order(&sp("GU3:2")), 648u32.into());
        assert_eq!(group_order(&sp("SU3:2")), 216u32.into());
        assert_eq!(group_order(&sp("GL3:2")), 168u32.into());
        assert_eq!(group_order(&sp("SL2:3")), 24u32.into());
        assert_eq!(group_order(&sp("PSL3:4")), 20160u32.into());
    }

    #[test]
    fn class_counts() {
        assert_eq!(enumerate_classes(&sp("GU3:2")).unwrap().len(), 24);
        assert_eq!(enumerate_classes(&sp("SU3:2")).unwrap().len(), 16);
        let gl = enumerate_classes(&sp("GL3:2")).unwrap();
        let names: Vec<String> = gl.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            names,
            ["C1[0]", "C2[0]", "C3[0]", "C7[0,1]", "C8[1]", "C8[3]"]
        );
    }

    #[test]
    fn sizes_sum_to_order() {
        for fam in ["GL", "GU", "SL", "SU", "PSL", "PSU"] {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                let spec = sp(&format!("{fam}3:{q}"));
                let total: BigUint = all_class_data(&spec)
                    .unwrap()
                    .iter()
                    .map(|c| c.size.clone())
                    .sum();
                assert_eq!(total, group_order(&spec), "{spec}");
            }
        }
        for fam in ["GL", "GU", "SL", "SU"] {
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                let spec = sp(&format!("{fam}2:{q}"));
                let total: BigUint = all_class_data(&spec)
                    .unwrap()
                    .iter()
                    .map(|c| c.size.clone())
                    .sum();
                assert_eq!(total, group_order(&spec), "{spec}");
            }
        }
    }

    #[test]
    fn canonical_examples() {
        let gu3 = sp("GU3:3");
        assert_eq!(
            canonical_label(&gu3, &lab("C7[1,5]")).unwrap(),
            lab("C7[1,1]")
        );
        let gl2 = sp("GL3:2");
        assert_eq!(canonical_label(&gl2, &lab("C8[4]")).unwrap(), lab("C8[1]"));
        assert!(matches!(
            canonical_label(&sp("GU3:2"), &lab("C4[1,1]")),
            Err(Error::InvalidParams(_))
        ));
        assert!(canonical_label(&gu3, &lab("C7[0,4]")).is_err());
        assert_eq!(parse_label(&gu3, "C6[-1,0,1]").unwrap(), lab("C6[0,1,3]"));
    }

    #[test]
    fn data_examples() {
        let gu = sp("GU3:2");
        let size = |s: &str| class_data(&gu, &parse_label(&gu, s).unwrap()).unwrap().size;
        assert_eq!(size("C2[0]"), 9u32.into());
        assert_eq!(size("C3[0]"), 54u32.into());
        assert_eq!(size("C4[0,1]"), 12u32.into());
        assert_eq!(size("C5[0,1]"), 36u32.into());
        assert_eq!(size("C6[0,1,2]"), 24u32.into());
        assert_eq!(size("C8[1]"), 72u32.into());
        let gl = sp("GL3:2");
        assert_eq!(class_data(&gl, &lab("C3[0]")).unwrap().size, 42u32.into());
        assert_eq!(class_data(&gl, &lab("C7[0,1]")).unwrap().size, 56u32.into());
    }

    #[test]
    fn eigen_invariants() {
        for s in ["GU3:3", "GL3:4", "GU3:4", "GL3:5", "GU2:5", "GL2:4"] {
            let spec = sp(s);
            let n = spec.modulus();
            for c in all_class_data(&spec).unwrap() {
                let msum: u8 = c.eigens.iter().map(|e| e.mult).sum();
                assert_eq!(msum, spec.dim);
                let esum = c
                    .eigens
                    .iter()
                    .fold(0u64, |acc, e| (acc + e.mult as u64 * e.tau_exp) % n);
                assert_eq!(esum, c.det_exp, "{s} {}", c.label);
                for w in c.eigens.windows(2) {
                    assert!(w[0].mult >= w[1].mult);
                    assert!(w[0].in_omega || !w[1].in_omega);
                }
                let expected_n: &[usize] = if spec.dim == 3 {
                    &[1, 1, 1, 2, 2, 3, 3, 3]
                } else {
                    &[1, 1, 2, 2]
                };
                assert_eq!(c.n, expected_n[c.label.series as usize - 1]);
                if spec.dim == 3 && c.label.series == 7 {
                    assert_eq!(c.n_prime, 1);
                }
                if spec.dim == 3 && c.label.series == 8 {
                    assert_eq!(c.n_prime, 0);
                }
            }
        }
    }

    #[test]
    fn inverse_and_shift() {
        let su5 = sp("SU3:5");
        let c = lab("C3[0;l=1]");
        assert_eq!(scalar_shift(&su5, &c, 2).unwrap(), lab("C3[2;l=1]"));
        assert_eq!(
            inverse_class(&su5, &lab("C3[2;l=1]")).unwrap(),
            lab("C3[4;l=1]")
        );
        let su2 = sp("SU2:5");
        assert_eq!(
            inverse_class(&su2, &lab("C2[0;l=1]")).unwrap(),
            lab("C2[0;l=1]")
        );
        let sl2 = sp("SL2:7");
        assert_eq!(
            inverse_class(&sl2, &lab("C2[0;l=1]")).unwrap(),
            lab("C2[0;l=0]")
        );
        let gl5 = sp("GL3:5");
        assert_eq!(
            inverse_class(&gl5, &lab("C6[0,1,2]")).unwrap(),
            lab("C6[0,2,3]")
        );
        let gu3 = sp("GU3:3");
        assert_eq!(
            scalar_shift(&gu3, &lab("C4[0,1]"), 1).unwrap(),
            lab("C4[1,2]")
        );
        assert!(scalar_shift(&su5, &c, 1).is_err());
        for s in [
            "GU3:4", "GL3:4", "SU3:5", "SL3:4", "PSU3:5", "SU2:5", "SL2:7", "GU2:4",
        ] {
            let spec = sp(s);
            for c in enumerate_classes(&spec).unwrap() {
                let i = inverse_class(&spec, &c).unwrap();
                assert_eq!(inverse_class(&spec, &i).unwrap(), c, "{s} {c}");
                assert_eq!(scalar_shift(&spec, &c, 0).unwrap(), c);
                if spec.kind() == Kind::G {
                    let d = class_data(&spec, &c).unwrap();
                    let di = class_data(&spec, &i).unwrap();
                    assert_eq!((d.det_exp + di.det_exp) % spec.modulus(), 0);
                }
            }
        }
    }

    #[test]
    fn shift_moves_eigenvalues() {
        for s in ["GU3:4", "GL3:5", "GU2:5", "GL2:7"] {
            let spec = sp(s);
            let t = *spec.tower();
            for c in enumerate_classes(&spec).unwrap() {
                let d = class_data(&spec, &c).unwrap();
                let sh = class_data(&spec, &scalar_shift(&spec, &c, 1).unwrap()).unwrap();
                let mut a: Vec<u64> = d
                    .eigens
                    .iter()
                    .map(|e| (e.tau_exp + t.exp_omega) % t.modulus)
                    .collect();
                let mut b: Vec<u64> = sh.eigens.iter().map(|e| e.tau_exp).collect();
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b, "{s} {c}");
            }
        }
    }

    #[test]
    fn su2_sl2_correspondence() {
        for q in [3u64, 5, 7, 9] {
            let su = GroupSpec::new(Family::SU, 2, q).unwrap();
            let sl = GroupSpec::new(Family::SL, 2, q).unwrap();
            let su_classes = enumerate_classes(&su).unwrap();
            let mut images: Vec<ClassLabel> = su_classes
                .iter()
                .map(|c| su2_to_sl2(&su, c).unwrap())
                .collect();
            for (c, img) in su_classes.iter().zip(&images) {
                assert_eq!(&sl2_to_su2(&sl, img).unwrap(), c);
                let ds = class_data(&su, c).unwrap();
                let dl = class_data(&sl, img).unwrap();
                assert_eq!(ds.size, dl.size);
                let mut a: Vec<u64> = ds.eigens.iter().map(|e| e.tau_exp).collect();
                let mut b: Vec<u64> = dl.eigens.iter().map(|e| e.tau_exp).collect();
                a.sort_unstable();
                b.sort_unstable();
                assert_eq!(a, b);
            }
            images.sort();
            assert_eq!(images, enumerate_classes(&sl).unwrap());
        }
        let su = sp("SU2:5");
        // q = 5, r = 3: C3^{(1,−1)} ↦ C4^{(4)} and C4^{(6)} ↦ C3^{(1,−1)}.
        assert_eq!(su2_to_sl2(&su, &lab("C3[1,5]")).unwrap(), lab("C4[4]"));
        assert_eq!(su2_to_sl2(&su, &lab("C4[6]")).unwrap(), lab("C3[1,3]"));
        assert_eq!(su2_to_sl2(&su, &lab("C1[3]")).unwrap(), lab("C1[2]"));
        assert_eq!(
            su2_to_sl2(&su, &lab("C2[3;l=1]")).unwrap(),
            lab("C2[2;l=1]")
        );
    }

    #[test]
    fn spec_parsing() {
        let s = sp("psu3:5");
        assert_eq!(s.to_string(), "PSU3:5");
        assert!("GU4:3".parse::<GroupSpec>().is_err());
        assert!("GU3:6".parse::<GroupSpec>().is_err());
        assert!("PSL2:5".parse::<GroupSpec>().is_err());
        assert_eq!(lab("C3[0;l=2]").to_string(), "C3[0;l=2]");
        assert!("C3[0;l=x]".parse::<ClassLabel>().is_err());
        assert!(group_order(&s) > BigUint::zero());
    }

    #[test]
    fn p_classes() {
        let p = sp("PSU3:5");
        let classes = enumerate_classes(&p).unwrap();
        assert!(classes.contains(&lab("C3[0;l=0]")));
        assert!(!classes.contains(&lab("C3[2;l=0]")));
        assert_eq!(
            canonical_label(&p, &lab("C3[4;l=2]")).unwrap(),
            lab("C3[0;l=2]")
        );
        let p3 = sp("PSL3:3");
        assert_eq!(
            enumerate_classes(&p3).unwrap(),
            enumerate_classes(&sp("SL3:3")).unwrap()
        );
    }
}
