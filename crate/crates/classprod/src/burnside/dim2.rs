//! GL(2,q), GU(2,q²) and SL(2,q) ≅ SU(2,q²).
//!
//! Character families of the rank-2 groups, written with the same sign
//! parameter u as dimension 3 (coefficients listed on C₁, C₂, C₃, C₄):
//!
//! * linear characters (1, 1, 1, 1)·f(det)^t and the Steinberg twists
//!   (q, 0, −u, u)·f(det)^t, t ∈ [q±1];
//! * the principal pairs (t, w) ∈ [q±1]², of degree q∓1, summed over all
//!   ordered pairs with factor ½ and corrected on the diagonal by
//!   (q∓1, ∓1, ∓2, 0)·f(det)^t with factor −½;
//! * the discrete family t ∈ [q²−1], of degree q±1, with factor ½ and the
//!   excluded parameters corrected by (q±1, ±1, 0, ±2)·f(det)^t with
//!   factor −½.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{big, pow_r, ratio, zero_sum_count, zero_sum_weighted, ClassTuple};
use crate::arith::{cyc_rational, CycSum, Rational};
use crate::classes::{class_data, su2_to_sl2, ClassData, ClassLabel, Family, GroupSpec, Kind};
use crate::{Error, Result};

fn require(tuple: &ClassTuple, kind: Kind) -> Result<()> {
    if tuple.spec.dim != 2 || tuple.spec.kind() != kind {
        return Err(Error::WrongGroup(format!(
            "{} is not a rank-2 {kind:?}-type group",
            tuple.spec
        )));
    }
    if tuple.len() < 2 {
        return Err(Error::InvalidParams("need at least two classes".into()));
    }
    Ok(())
}

/// N̄ for GL(2,q) / GU(2,q²).
pub fn nbar_g2(tuple: &ClassTuple) -> Result<Rational> {
    require(tuple, Kind::G)?;
    if !tuple.det_ok() {
        return Ok(Rational::zero());
    }
    Ok(sums_g2(&tuple.spec, &tuple.classes))
}

fn sums_g2(spec: &GroupSpec, cl: &[ClassData]) -> Rational {
    let q = spec.qv() as i64;
    let u = spec.sign().s();
    let n = spec.modulus();
    let m = cl.len() as i64;
    let half = Rational::new(BigInt::one(), big(2));
    let mut total = Rational::zero();

    let xi1: [(i64, [i64; 4], Rational); 4] = [
        (1, [1, 1, 1, 1], Rational::one()),
        (q, [q, 0, -u, u], Rational::one()),
        (q - u, [q - u, -u, -2 * u, 0], -half.clone()),
        (q + u, [q + u, u, 0, 2 * u], -half.clone()),
    ];
    for (d, c, s) in xi1 {
        let prod: BigInt = cl.iter().map(|x| big(c[x.series() as usize - 1])).product();
        total += Rational::from_integer(prod * (q + u)) * s * pow_r(&ratio(d), -(m - 2));
    }

    // Principal pairs.
    let pc = |series: u8| match series {
        1 => q - u,
        2 | 3 => -u,
        _ => 0,
    };
    let options: Vec<Vec<(u64, i64)>> = cl
        .iter()
        .map(|c| {
            (0..c.n_prime)
                .map(|a| (c.eigens[a].tau_exp, pc(c.series())))
                .collect()
        })
        .collect();
    let w = zero_sum_weighted(&options, n);
    total += Rational::from_integer(w * (q + u) * (q + u)) * &half * pow_r(&ratio(q - u), -(m - 2));

    // Discrete family.
    let dc = |series: u8| match series {
        1 => q + u,
        3 => 0,
        _ => u,
    };
    let prod: BigInt = cl.iter().map(|c| big(dc(c.series()))).product();
    if !prod.is_zero() {
        let options: Vec<Vec<[u64; 1]>> = cl
            .iter()
            .map(|c| c.eigens.iter().map(|e| [e.tau_exp]).collect())
            .collect();
        let cnt = zero_sum_count(&options, n);
        total += Rational::from_integer(prod * cnt * (q * q - 1))
            * &half
            * pow_r(&ratio(q + u), -(m - 2));
    }
    total
}

/// Value of the principal-series character with parameters (t, w) on a
/// class of the rank-2 G.
fn principal_value(spec: &GroupSpec, c: &ClassData, t: u64, w: u64) -> CycSum {
    let n = spec.modulus();
    let u = spec.sign().s();
    let q = spec.qv() as i64;
    let mut out = CycSum::zero(n);
    let coeff = match c.series() {
        1 => q - u,
        2 | 3 => -u,
        _ => return out,
    };
    for a in 0..c.n_prime {
        let lam = c.eigens[a].tau_exp;
        let rest = (c.det_exp + n - lam) % n;
        let e = ((t as u128 * lam as u128 + w as u128 * rest as u128) % n as u128) as u64;
        out.add_term(e, big(coeff));
    }
    out
}

/// Value of the discrete-series character with parameter t.
fn discrete_value(spec: &GroupSpec, c: &ClassData, t: u64) -> CycSum {
    let n = spec.modulus();
    let u = spec.sign().s();
    let q = spec.qv() as i64;
    let mut out = CycSum::zero(n);
    let coeff = match c.series() {
        1 => q + u,
        3 => return out,
        _ => u,
    };
    for e in &c.eigens {
        out.add_term(
            ((t as u128 * e.tau_exp as u128) % n as u128) as u64,
            big(coeff),
        );
    }
    out
}

/// Σ_j Π_ν ψ_j(A_ν) for the two halves ψ₁, ψ₂ of a character χ that splits
/// on S, where ψ_j = χ/2 off the unipotent classes and
/// χ·(1 ± √(εq))/2 on z·u_l with the sign flipping with l and j.
fn split_pair_sum(values: &[CycSum], splits: &[Option<u8>], disc: i64) -> Result<CycSum> {
    let n = values[0].modulus();
    let mut even = CycSum::constant(n, 1);
    let mut odd = CycSum::zero(n);
    for (v, s) in values.iter().zip(splits) {
        match s {
            None => {
                even = even.mul(v)?;
                odd = odd.mul(v)?;
            }
            Some(l) => {
                let sg = if *l == 0 { 1 } else { -1 };
                let ne = {
                    let mut a = even.mul(v)?;
                    a.add_assign(&odd.mul(v)?.scale(&big(sg * disc)))?;
                    a
                };
                let mut no = odd.mul(v)?;
                no.add_assign(&even.mul(v)?.scale(&big(sg)))?;
                even = ne;
                odd = no;
            }
        }
    }
    Ok(even.scale(&big(2)))
}

/// N̄ for SL(2,q) / SU(2,q²).
pub fn nbar_s2(tuple: &ClassTuple) -> Result<Rational> {
    require(tuple, Kind::S)?;
    let q = tuple.spec.qv();
    if q.is_multiple_of(2) {
        let g = tuple.spec.g_spec();
        let cl = tuple
            .classes
            .iter()
            .map(|c| class_data(&g, &ClassLabel::new(c.series(), c.label.params.clone())))
            .collect::<Result<Vec<_>>>()?;
        return Ok(sums_g2(&g, &cl) / ratio(g.q_pm() as i64));
    }
    // Odd q: work in SL(2,q).
    let sl = GroupSpec::new(Family::SL, 2, q)?;
    let labels: Vec<ClassLabel> = if tuple.spec.family == Family::SU {
        tuple
            .classes
            .iter()
            .map(|c| su2_to_sl2(&tuple.spec, &c.label))
            .collect::<Result<_>>()?
    } else {
        tuple.labels()
    };
    let gl = sl.g_spec();
    let g_cl = labels
        .iter()
        .map(|l| class_data(&gl, &ClassLabel::new(l.series, l.params.clone())))
        .collect::<Result<Vec<_>>>()?;
    let splits: Vec<Option<u8>> = labels.iter().map(|l| l.split).collect();
    let qi = q as i64;
    let m = g_cl.len() as i64;
    let base = sums_g2(&gl, &g_cl) / ratio(qi - 1);

    let disc = if q % 4 == 1 { qi } else { -qi };
    let hq = (q - 1) / 2;
    let p_vals: Vec<CycSum> = g_cl
        .iter()
        .map(|c| principal_value(&gl, c, 0, hq))
        .collect();
    let d_vals: Vec<CycSum> = g_cl
        .iter()
        .map(|c| discrete_value(&gl, c, q.div_ceil(2)))
        .collect();
    let prod = |vals: &[CycSum]| -> Result<CycSum> {
        vals.iter()
            .try_fold(CycSum::constant(gl.modulus(), 1), |acc, v| {
                acc.mul(v).map_err(Error::from)
            })
    };
    let half = Rational::new(BigInt::one(), big(2));
    let two_m = Rational::from_integer(num_traits::pow(BigInt::from(2), g_cl.len()));

    let mut corr = Rational::zero();
    corr -= &half * cyc_rational(&prod(&p_vals)?) * pow_r(&ratio(qi + 1), -(m - 2));
    corr -= &half * cyc_rational(&prod(&d_vals)?) * pow_r(&ratio(qi - 1), -(m - 2));
    let xi = cyc_rational(&split_pair_sum(&p_vals, &splits, disc)?) / &two_m;
    corr += xi * pow_r(&Rational::new(big(qi + 1), big(2)), -(m - 2));
    let eta = cyc_rational(&split_pair_sum(&d_vals, &splits, disc)?) / &two_m;
    corr += eta * pow_r(&Rational::new(big(qi - 1), big(2)), -(m - 2));
    Ok(base + corr)
}
