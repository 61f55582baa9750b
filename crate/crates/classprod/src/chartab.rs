//! Character families of GL(3,q) and GU(3,q²) in the collapsed form used by
//! the structure-constant engines, plus the restriction data for SL/SU.
//!
//! A family X is a parametrized set of class functions. The sum over
//! Irr(G) of any expression equals Σ_X s(X)·Σ_{χ∈X} of the same expression,
//! so no full character table is ever built.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{CycSum, Rational, RootTower, Sign};
use crate::classes::ClassData;
use crate::error::{Error, Result};

/// The fourteen families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyName {
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
    X8,
    X4p,
    X5p,
    X6p,
    X6pp,
    X7p,
    X8p,
}

impl FamilyName {
    pub const ALL: [FamilyName; 14] = [
        FamilyName::X1,
        FamilyName::X2,
        FamilyName::X3,
        FamilyName::X4p,
        FamilyName::X5p,
        FamilyName::X6pp,
        FamilyName::X8p,
        FamilyName::X4,
        FamilyName::X5,
        FamilyName::X6p,
        FamilyName::X7p,
        FamilyName::X6,
        FamilyName::X7,
        FamilyName::X8,
    ];

    /// Index j of the group Ξ_j the family belongs to.
    pub fn xi(self) -> u8 {
        use FamilyName::*;
        match self {
            X1 | X2 | X3 | X4p | X5p | X6pp | X8p => 1,
            X4 | X5 | X6p | X7p => 2,
            X6 => 3,
            X7 => 4,
            X8 => 5,
        }
    }

    /// The character series j whose dimension d_j the family carries.
    pub fn series(self) -> u8 {
        use FamilyName::*;
        match self {
            X1 => 1,
            X2 => 2,
            X3 => 3,
            X4 | X4p => 4,
            X5 | X5p => 5,
            X6 | X6p | X6pp => 6,
            X7 | X7p => 7,
            X8 | X8p => 8,
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FamilyName::*;
        let s = match self {
            X1 => "X1",
            X2 => "X2",
            X3 => "X3",
            X4 => "X4",
            X5 => "X5",
            X6 => "X6",
            X7 => "X7",
            X8 => "X8",
            X4p => "X4'",
            X5p => "X5'",
            X6p => "X6'",
            X6pp => "X6''",
            X7p => "X7'",
            X8p => "X8'",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyName::ALL
            .iter()
            .copied()
            .find(|f| f.to_string() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown character family `{s}`")))
    }
}

/// Coefficients of a family on the eight class series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coeffs {
    /// One coefficient per series (Ξ₁, X₆, X₇, X₈).
    PerSeries([i64; 8]),
    /// Ξ₂: per series, one coefficient per Ω-eigenvalue slot. Series 6 uses
    /// the same value on all three slots and series 8 has no slots.
    PerSlot {
        c1: i64,
        c2: i64,
        c3: i64,
        c4: [i64; 2],
        c5: [i64; 2],
        c6: i64,
        c7: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharFamilySpec {
    pub name: FamilyName,
    pub dim_d: i64,
    pub sym_factor: Rational,
    /// Number of values taken by each summation index.
    pub param_ranges: Vec<u64>,
    pub coeffs: Coeffs,
}

impl CharFamilySpec {
    /// c_i^X for Ξ₁ and the Ξ₃–Ξ₅ families, or c_{i,a}^X for Ξ₂ (slot `a`
    /// 0-based; ignored elsewhere).
    pub fn coeff(&self, series: u8, slot: usize) -> i64 {
        match &self.coeffs {
            Coeffs::PerSeries(c) => c[series as usize - 1],
            Coeffs::PerSlot {
                c1,
                c2,
                c3,
                c4,
                c5,
                c6,
                c7,
            } => match series {
                1 => *c1,
                2 => *c2,
                3 => *c3,
                4 => c4[slot],
                5 => c5[slot],
                6 => *c6,
                7 => *c7,
                _ => 0,
            },
        }
    }

    /// Number of characters in the family (with repetitions).
    pub fn size(&self) -> u64 {
        self.param_ranges.iter().product()
    }

    /// All summation-index tuples of the family.
    pub fn params(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &r in &self.param_ranges {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..r).map(move |t| {
                        let mut v = p.clone();
                        v.push(t);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// The dimensions d₁, …, d₈ at (q, sign).
pub fn dims(q: u64, sign: Sign) -> [i64; 8] {
    let q = q as i64;
    let u = sign.s();
    [
        1,
        q * q - u * q,
        q * q * q,
        q * q - u * q + 1,
        q * (q * q - u * q + 1),
        (q - u) * (q * q - u * q + 1),
        q * q * q + u,
        (q + u) * (q * q - 1),
    ]
}

/// The index sets 𝒜₆,ᵢ and 𝒜₇,ᵢ (0-based eigenvalue slots).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSets {
    pub a6: Vec<Vec<[usize; 3]>>,
    pub a7: Vec<Vec<[usize; 2]>>,
}

impl AlphaSets {
    pub fn new() -> Self {
        let s3 = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut a6 = vec![vec![[0, 0, 0]]; 3];
        a6.push(vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        a6.push(vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        a6.push(s3);
        a6.push(vec![]);
        a6.push(vec![]);
        let mut a7 = vec![vec![[0, 0]]; 3];
        a7.push(vec![[1, 0]]);
        a7.push(vec![[1, 0]]);
        a7.push(vec![]);
        a7.push(vec![[0, 1], [0, 2]]);
        a7.push(vec![]);
        AlphaSets { a6, a7 }
    }

    pub fn a6(&self, series: u8) -> &[[usize; 3]] {
        &self.a6[series as usize - 1]
    }

    pub fn a7(&self, series: u8) -> &[[usize; 2]] {
        &self.a7[series as usize - 1]
    }
}

impl Default for AlphaSets {
    fn default() -> Self {
        Self::new()
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The fourteen families at (q, sign), in the order Ξ₁, Ξ₂, Ξ₃, Ξ₄, Ξ₅.
pub fn families(q: u64, sign: Sign) -> Vec<CharFamilySpec> {
    use FamilyName::*;
    let d = dims(q, sign);
    let qi = q as i64;
    let u = sign.s();
    let qpm = (qi + u) as u64;
    let q2 = q * q - 1;
    let q3pm = (qi * qi * qi + u) as u64;
    let row = |name, s: Rational, ranges: Vec<u64>, c: [i64; 8]| CharFamilySpec {
        name,
        dim_d: d[name_series(name) - 1],
        sym_factor: s,
        param_ranges: ranges,
        coeffs: Coeffs::PerSeries(c),
    };
    let one = rat(1, 1);
    vec![
        row(X1, one.clone(), vec![qpm], [1; 8]),
        row(
            X2,
            one.clone(),
            vec![qpm],
            [d[1], -u * qi, 0, 1 - u * qi, 1, 2, 0, -1],
        ),
        row(X3, one.clone(), vec![qpm], [d[2], 0, 0, qi, 0, -u, u, -u]),
        row(
            X4p,
            -one.clone(),
            vec![qpm],
            [d[3], 1 - u * qi, 1, 2 - u * qi, 2, 3, 1, 0],
        ),
        // On C5 the value is c_{5,1}+c_{5,2} of X5, i.e. ∓1.
        row(
            X5p,
            -one.clone(),
            vec![qpm],
            [d[4], qi, 0, 2 * qi - u, -u, -3 * u, u, 0],
        ),
        row(
            X6pp,
            rat(1, 3),
            vec![qpm],
            [d[5], 2 * qi - u, -u, 3 * qi - 3 * u, -3 * u, -6 * u, 0, 0],
        ),
        row(
            X8p,
            rat(-1, 3),
            vec![qpm],
            [d[7], -qi - u, -u, 0, 0, 0, 0, -3 * u],
        ),
        CharFamilySpec {
            name: X4,
            dim_d: d[3],
            sym_factor: one.clone(),
            param_ranges: vec![qpm, qpm],
            coeffs: Coeffs::PerSlot {
                c1: d[3],
                c2: 1 - u * qi,
                c3: 1,
                c4: [1 - u * qi, 1],
                c5: [1, 1],
                c6: 1,
                c7: 1,
            },
        },
        CharFamilySpec {
            name: X5,
            dim_d: d[4],
            sym_factor: one.clone(),
            param_ranges: vec![qpm, qpm],
            coeffs: Coeffs::PerSlot {
                c1: d[4],
                c2: qi,
                c3: 0,
                c4: [qi - u, qi],
                c5: [-u, 0],
                c6: -u,
                c7: u,
            },
        },
        CharFamilySpec {
            name: X6p,
            dim_d: d[5],
            sym_factor: rat(-1, 2),
            param_ranges: vec![qpm, qpm],
            coeffs: Coeffs::PerSlot {
                c1: d[5],
                c2: 2 * qi - u,
                c3: -u,
                c4: [2 * (qi - u), qi - u],
                c5: [-2 * u, -u],
                c6: -2 * u,
                c7: 0,
            },
        },
        CharFamilySpec {
            name: X7p,
            dim_d: d[6],
            sym_factor: rat(-1, 2),
            param_ranges: vec![qpm, qpm],
            coeffs: Coeffs::PerSlot {
                c1: d[6],
                c2: u,
                c3: u,
                c4: [0, qi + u],
                c5: [0, u],
                c6: 0,
                c7: 2 * u,
            },
        },
        row(
            X6,
            rat(1, 6),
            vec![qpm, qpm, qpm],
            [d[5], 2 * qi - u, -u, qi - u, -u, -u, 0, 0],
        ),
        row(
            X7,
            rat(1, 2),
            vec![qpm, q2],
            [d[6], u, u, qi + u, u, 0, u, 0],
        ),
        row(
            X8,
            rat(1, 3),
            vec![q3pm],
            [d[7], -qi - u, -u, 0, 0, 0, 0, -u],
        ),
    ]
}

fn name_series(n: FamilyName) -> usize {
    n.series() as usize
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// The value of the family member with summation indices `params` on a
/// class of G, as a formal sum of τ-power roots of unity (f(τ) = ζ_N).
pub fn char_value(
    family: &CharFamilySpec,
    params: &[u64],
    cls: &ClassData,
    tower: &RootTower,
) -> CycSum {
    let n = tower.modulus;
    let series = cls.series();
    let mut out = CycSum::zero(n);
    if params.len() != family.param_ranges.len() {
        return out;
    }
    let lam = |a: usize| cls.eigens[a].tau_exp;
    let alpha = AlphaSets::new();
    match family.name.xi() {
        1 => {
            let e = mulmod(params[0], cls.det_exp, n);
            out.add_term(e, family.coeff(series, 0).into());
        }
        2 => {
            let (t, u) = (params[0], params[1]);
            for a in 0..cls.n_prime {
                let rest = (cls.det_exp + n - lam(a)) % n;
                let e = (mulmod(t, lam(a), n) + mulmod(u, rest, n)) % n;
                out.add_term(e, family.coeff(series, a).into());
            }
        }
        3 => {
            let c = family.coeff(series, 0);
            for al in alpha.a6(series) {
                let e = (mulmod(params[0], lam(al[0]), n)
                    + mulmod(params[1], lam(al[1]), n)
                    + mulmod(params[2], lam(al[2]), n))
                    % n;
                out.add_term(e, c.into());
            }
        }
        4 => {
            let c = family.coeff(series, 0);
            for al in alpha.a7(series) {
                let e = (mulmod(params[0], lam(al[0]), n) + mulmod(params[1], lam(al[1]), n)) % n;
                out.add_term(e, c.into());
            }
        }
        _ => {
            let c = family.coeff(series, 0);
            for a in 0..cls.n {
                out.add_term(mulmod(params[0], lam(a), n), c.into());
            }
        }
    }
    out
}

/// Restriction data for S = SU(3,q²) or SL(3,q) when q = 3r ∓ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SRestriction {
    pub q: u64,
    pub sign: Sign,
    pub r: u64,
    pub d6_3: i64,
    pub d8_3: i64,
    /// τ-exponent of ε = f(ω).
    pub eps_exp: u64,
    /// τ-exponent modulus.
    pub modulus: u64,
}

impl SRestriction {
    /// Value of χ_{d₆/3}^{(t)} on the split class C₃^{(k,l)}.
    pub fn split6_value(&self, t: u8, l: u8) -> i64 {
        let r = self.r as i64;
        if t == l {
            self.q as i64 - r
        } else {
            -r
        }
    }

    /// τ-exponent of the twist ε^{u·k} relating χ_{d₈/3}^{(t,u)} to χ_{d₆/3}^{(t)} on C₃^{(k,l)}.
    pub fn split8_twist(&self, u: u64, k: u64) -> u64 {
        mulmod(mulmod(u, k, self.modulus), self.eps_exp, self.modulus)
    }

    /// Summation parameter t of χ_{d₈}^{(u(q²∓q+1)/3)} for u = 1, 2.
    pub fn d8_param(&self, u: u64) -> u64 {
        let qi = self.q as i64;
        let s = self.sign.s();
        (u as i64 * (qi * qi - s * qi + 1) / 3) as u64
    }

    /// Summation parameters (0, r, 2r) of the reducible χ_{d₆}.
    pub fn d6_params(&self) -> [u64; 3] {
        [0, self.r, 2 * self.r]
    }
}

pub fn s_restriction(tower: &RootTower) -> Result<SRestriction> {
    let qpm = tower.q_pm();
    if !qpm.is_multiple_of(3) {
        return Err(Error::NotSplitCase(format!("q = {}, q±1 = {qpm}", tower.q)));
    }
    let d = dims(tower.q, tower.sign);
    Ok(SRestriction {
        q: tower.q,
        sign: tower.sign,
        r: qpm / 3,
        d6_3: d[5] / 3,
        d8_3: d[7] / 3,
        eps_exp: tower.exp_omega,
        modulus: tower.modulus,
    })
}

/// Σ over Irr(G) of |χ(A)|², evaluated family by family. Equals the
/// centralizer order of A.
pub fn column_norm(
    fams: &[CharFamilySpec],
    cls: &ClassData,
    tower: &RootTower,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for f in fams {
        let mut acc = CycSum::zero(tower.modulus);
        for p in f.params() {
            let v = char_value(f, &p, cls, tower);
            acc.add_assign(&v.mul(&v.conj())?)?;
        }
        total += acc.rational() * &f.sym_factor;
    }
    Ok(total)
}

/// Σ over Irr(G) of χ(1)², which must be |G|.
pub fn degree_square_sum(fams: &[CharFamilySpec]) -> Rational {
    fams.iter().fold(Rational::zero(), |acc, f| {
        let d = BigInt::from(f.dim_d);
        acc + Rational::from_integer(&d * &d * BigInt::from(f.size())) * &f.sym_factor
    })
}

/// Σ over Irr(G) of χ(1)·χ(A): the regular character, |G| at the identity
/// and 0 elsewhere.
pub fn regular_value(
    fams: &[CharFamilySpec],
    cls: &ClassData,
    tower: &RootTower,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for f in fams {
        let mut acc = CycSum::zero(tower.modulus);
        for p in f.params() {
            acc.add_assign(&char_value(f, &p, cls, tower))?;
        }
        total += acc.rational() * BigInt::from(f.dim_d) * &f.sym_factor;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{all_class_data, class_data, group_order, ClassLabel, Family, GroupSpec};

    fn spec(f: Family, q: u64) -> GroupSpec {
        GroupSpec::new(f, 3, q).unwrap()
    }

    #[test]
    fn first_column_is_the_dimension() {
        for q in [2, 3, 4, 5, 7] {
            for sign in [Sign::Unitary, Sign::Linear] {
                for f in families(q, sign) {
                    assert_eq!(f.coeff(1, 0), f.dim_d, "{} at q={q}", f.name);
                }
            }
        }
    }

    #[test]
    fn symmetry_factors() {
        let f = families(5, Sign::Unitary);
        let s = |n: FamilyName| f.iter().find(|x| x.name == n).unwrap().sym_factor.clone();
        assert_eq!(s(FamilyName::X6pp), rat(1, 3));
        assert_eq!(s(FamilyName::X8p), rat(-1, 3));
        assert_eq!(s(FamilyName::X6), rat(1, 6));
        assert_eq!(s(FamilyName::X7p), rat(-1, 2));
        let x3 = f.iter().find(|x| x.name == FamilyName::X3).unwrap();
        assert_eq!(x3.coeff(4, 0), 5);
        let x5 = f.iter().find(|x| x.name == FamilyName::X5).unwrap();
        assert_eq!(x5.coeff(4, 0), 4);
    }

    #[test]
    fn degree_sums_give_group_order() {
        for q in [2, 3, 4, 5] {
            for fam in [Family::GU, Family::GL] {
                let sp = spec(fam, q);
                let got = degree_square_sum(&families(q, sp.sign()));
                assert_eq!(got, Rational::from_integer(group_order(&sp).into()), "{sp}");
            }
        }
    }

    #[test]
    fn identity_value_is_dimension() {
        for q in [2, 3, 5, 7] {
            for fam in [Family::GU, Family::GL] {
                let sp = spec(fam, q);
                let id = class_data(&sp, &ClassLabel::new(1, vec![0])).unwrap();
                for f in families(q, sp.sign()) {
                    for p in f.params().into_iter().take(5) {
                        let v = char_value(&f, &p, &id, sp.tower());
                        assert_eq!(v, CycSum::constant(sp.modulus(), f.dim_d));
                    }
                }
            }
        }
    }

    #[test]
    fn x6_vanishes_off_omega_classes() {
        let sp = spec(Family::GU, 3);
        let fams = families(3, sp.sign());
        let x6 = fams.iter().find(|f| f.name == FamilyName::X6).unwrap();
        for c in all_class_data(&sp).unwrap() {
            if c.series() >= 7 {
                assert!(char_value(x6, &[1, 2, 3], &c, sp.tower()).is_zero());
            }
        }
    }

    #[test]
    fn column_orthogonality_small_q() {
        for (fam, q) in [
            (Family::GU, 2),
            (Family::GL, 2),
            (Family::GU, 3),
            (Family::GL, 3),
        ] {
            let sp = spec(fam, q);
            let fams = families(q, sp.sign());
            let order = Rational::from_integer(group_order(&sp).into());
            for c in all_class_data(&sp).unwrap() {
                let cent = &order / Rational::from_integer(c.size.clone().into());
                assert_eq!(
                    column_norm(&fams, &c, sp.tower()).unwrap(),
                    cent,
                    "{sp} {}",
                    c.label
                );
                let reg = regular_value(&fams, &c, sp.tower()).unwrap();
                let want = if c.label == ClassLabel::new(1, vec![0]) {
                    order.clone()
                } else {
                    Rational::zero()
                };
                assert_eq!(reg, want, "{sp} {}", c.label);
            }
        }
    }

    #[test]
    fn primed_families_are_diagonals() {
        for (fam, q) in [
            (Family::GU, 3),
            (Family::GL, 3),
            (Family::GU, 4),
            (Family::GL, 5),
        ] {
            let sp = spec(fam, q);
            let fams = families(q, sp.sign());
            let get = |n: FamilyName| fams.iter().find(|f| f.name == n).unwrap();
            let qpm = sp.q_pm();
            let (qi, u) = (q as i64, sp.sign().s());
            let q2 = q * q - 1;
            let x7u = |t: u64| (((1 - u * qi) * t as i64).rem_euclid(q2 as i64)) as u64;
            let x8t = |t: u64| ((qi * qi - u * qi + 1) as u64 * t) % sp.tower().q3_pm();
            for c in all_class_data(&sp).unwrap() {
                let val = |n: FamilyName, p: &[u64]| char_value(get(n), p, &c, sp.tower());
                for t in 0..qpm {
                    assert_eq!(val(FamilyName::X4p, &[t]), val(FamilyName::X4, &[t, t]));
                    assert_eq!(val(FamilyName::X5p, &[t]), val(FamilyName::X5, &[t, t]));
                    assert_eq!(val(FamilyName::X6pp, &[t]), val(FamilyName::X6, &[t, t, t]));
                    assert_eq!(val(FamilyName::X8p, &[t]), val(FamilyName::X8, &[x8t(t)]));
                    for w in 0..qpm {
                        assert_eq!(
                            val(FamilyName::X6p, &[t, w]),
                            val(FamilyName::X6, &[t, w, w])
                        );
                        assert_eq!(
                            val(FamilyName::X7p, &[t, w]),
                            val(FamilyName::X7, &[t, x7u(w)])
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_data() {
        let sp = spec(Family::SU, 5);
        let s = s_restriction(sp.tower()).unwrap();
        assert_eq!((s.split6_value(1, 1), s.split6_value(0, 1)), (3, -2));
        let sum: i64 = (0..3).map(|t| s.split6_value(t, 0)).sum();
        assert_eq!(sum, -1);
        let sl = spec(Family::SL, 4);
        assert_eq!(s_restriction(sl.tower()).unwrap().d6_3, 35);
        assert!(matches!(
            s_restriction(spec(Family::SU, 3).tower()),
            Err(Error::NotSplitCase(_))
        ));
    }
}
