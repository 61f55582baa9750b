//! Closed-form values of N(A₁, A₂, A₃)/|A₁| for triples.
//!
//! Each evaluator sorts the triple into the order its table uses, evaluates
//! the polynomial in q, δ_L and the δ-quantities of the sorted triple, and
//! reports which input position the normalization refers to. Raw δ values
//! are used throughout: the simplifications applied in the tables are all
//! consequences of the determinant relation, which is checked first.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{ClassTuple, DeltaSummary};
use crate::arith::Rational;
use crate::classes::{class_data, sl2_to_su2, ClassData, ClassLabel, Family, GroupSpec, Kind};
use crate::{Error, Result};

/// N/|c| for a triple covered by a closed form, with the index of c in the
/// input tuple.
pub fn closed_form_triple(tuple: &ClassTuple) -> Result<(Rational, usize)> {
    let none = || Error::NoClosedForm(tuple.to_string());
    if tuple.len() != 3 || tuple.classes.iter().any(|c| c.is_central()) {
        return Err(none());
    }
    let spec = tuple.spec;
    match (spec.dim, spec.kind()) {
        (3, Kind::G) => table4(tuple).ok_or_else(none),
        (3, Kind::S) => {
            let n3 = tuple.classes.iter().filter(|c| c.series() == 3).count();
            if spec.split_r().is_some() && n3 >= 2 {
                table7(tuple).ok_or_else(none)
            } else {
                via_g(tuple, table4).ok_or_else(none)
            }
        }
        (2, Kind::G) => table8(tuple).ok_or_else(none),
        (2, Kind::S) => {
            if spec.qv().is_multiple_of(2) {
                return via_g(tuple, table8).ok_or_else(none);
            }
            let su = if spec.family == Family::SU {
                tuple.clone()
            } else {
                let su = GroupSpec::new(Family::SU, 2, spec.qv())?;
                let labels = tuple
                    .labels()
                    .iter()
                    .map(|l| sl2_to_su2(&spec, l))
                    .collect::<Result<Vec<_>>>()?;
                ClassTuple::from_labels(&su, &labels)?
            };
            let n2 = su.classes.iter().filter(|c| c.series() == 2).count();
            if n2 >= 2 {
                su2_split(&su).ok_or_else(none)
            } else {
                via_g(&su, table8).ok_or_else(none)
            }
        }
        _ => Err(none()),
    }
}

type Eval = fn(&ClassTuple) -> Option<(Rational, usize)>;

/// S-triples with at most one split class: N_S = N_G·Π|c^S|/|c^G|.
fn via_g(tuple: &ClassTuple, eval: Eval) -> Option<(Rational, usize)> {
    let g = tuple.spec.g_spec();
    let g_cl: Vec<ClassData> = tuple
        .classes
        .iter()
        .map(|c| class_data(&g, &ClassLabel::new(c.series(), c.label.params.clone())))
        .collect::<Result<_>>()
        .ok()?;
    let gt = ClassTuple::new(&g, g_cl.clone()).ok()?;
    let (v, first) = eval(&gt)?;
    let mut n = v * Rational::from_integer(BigInt::from(g_cl[first].size.clone()));
    for (s, gc) in tuple.classes.iter().zip(&g_cl) {
        n *= Rational::new(BigInt::from(s.size.clone()), BigInt::from(gc.size.clone()));
    }
    Some((
        n / Rational::from_integer(BigInt::from(tuple.classes[first].size.clone())),
        first,
    ))
}

/// Indices of the tuple sorted by descending series (stable).
fn descending(tuple: &ClassTuple) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..tuple.len()).collect();
    idx.sort_by_key(|&i| std::cmp::Reverse(tuple.classes[i].series()));
    idx
}

/// The δ-quantities of a sorted triple.
struct Ds {
    s: DeltaSummary,
}

impl Ds {
    fn new(t: &ClassTuple) -> Option<Ds> {
        DeltaSummary::new(t).ok().map(|s| Ds { s })
    }

    fn d(&self, a: usize, b: usize, c: usize) -> i128 {
        self.s.d(&[a, b, c]) as i128
    }

    fn big(&self) -> i128 {
        self.s.big_delta as i128
    }

    fn da(&self, a: usize) -> i128 {
        self.s.delta_of(a) as i128
    }

    fn dp(&self) -> i128 {
        self.s.delta_prime as i128
    }
}

fn r(num: i128, den: i128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(v: i128) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// GL(3,q) and GU(3,q²), every pattern except (5,5,5).
fn table4(tuple: &ClassTuple) -> Option<(Rational, usize)> {
    let order = descending(tuple);
    let t = tuple.permuted(&order);
    if !t.det_ok() {
        return Some((Rational::zero(), order[0]));
    }
    let q = t.spec.qv() as i128;
    let u = t.spec.sign().s() as i128;
    let dl = t.spec.sign().delta_l() as i128;
    let x = Ds::new(&t)?;
    let d = |a, b, c| x.d(a, b, c);
    let big = x.big();
    let (d0, d1, d2) = (x.da(0), x.da(1), x.da(2));
    let dp = x.dp();
    let s = t.series();
    let q2 = q * q;
    let q3 = q2 * q;
    let qp = q + u;
    let qm = q - u;
    let h = q2 - u * q + 1;
    let v = match (s[0], s[1], s[2]) {
        (2, 2, 2) => int((2 * q2 * dl + u * q - 2) * d(1, 1, 1)),
        (3, 2, 2) => int(2 * q * dl * d(1, 1, 1)),
        (3, 3, 2) => {
            int(q2 * (1 - u * d(1, 1, 1)) + (q - 1) * d(1, 1, 1) - 4 * q * dl * d(1, 1, 1))
        }
        (3, 3, 3) => int(q2 * (q2 - 2) + q * (q2 + 2 * u * q - 2 + 6 * dl) * d(1, 1, 1)),
        (4, 2, 2) | (4, 3, 2) => int(0),
        (4, 3, 3) => int(q * qp * qp * qm),
        (4, 4, 2) => int(2 * (q2 - 1) * dl * d(1, 1, 1)),
        (4, 4, 3) => int(qp * qp * qm * d(1, 1, 1)),
        (4, 4, 4) => {
            int((2 * q2 * dl + u) * d(1, 1, 1) + q * qm * d(1, 1, 2) * d(1, 2, 1) * d(2, 1, 1))
        }
        (5, 2, 2) => int(q * d(2, 1, 1)),
        (5, 3, 2) => int(q * qp * (1 - u * d(2, 1, 1))),
        (5, 3, 3) => int(q * qp * qp * ((q - 2 * u) + d(2, 1, 1))),
        (5, 4, 2) => int((q - u * q + u) * d(1, 1, 1) + q * d(2, 1, 1)),
        (5, 4, 3) => int(qp * (q + (2 * q * dl - 1) * d(1, 1, 1) - u * q * d(2, 1, 1))),
        (5, 4, 4) => int(qp * d(1, 1, 1) + q * d(2, 1, 1) * (1 - u * d(1, 1, 2) * d(1, 2, 1))),
        (5, 5, 2) => int(q2 + u * q + 2 * ((q - 1) * (q - 1) * dl - 1) * d(1, 1, 1)
            - u * (q2 + u * q) * d1
            - u * q2 * d(2, 2, 1)),
        (5, 5, 3) => int(qp
            * (q * (q2 - 2 * u * q - 2)
                + (q2 - 4 * q * dl + 1) * d(1, 1, 1)
                + q * qp * d1
                + q2 * d(2, 2, 1))),
        (5, 5, 4) => int(q
            * qp
            * (d(1, 1, 2) * d(1, 2, 1) * d(2, 1, 1) - u * d(1, 2, 1) - u * d(2, 1, 1) + 1)
            - u * q2 * d(2, 2, 1)
            + (2 * q2 * dl - 2 * q - u) * d(1, 1, 1)),
        (5, 5, 5) => return None,
        (6, 2, 2) => int(qp * d0),
        (6, 3, 2) => int(qp * qp * (1 - u * d0)),
        (6, 3, 3) => int(qp * qp * (q2 - 2 * u * q - 1 + qp * d0)),
        (6, 4, 2) => int(qp * d1),
        (6, 4, 3) => int(qp * qp * (1 - u * d1)),
        (6, 4, 4) => int(qp * d2 - u * q * big),
        (6, 5, 2) => int(qp * (qp * (1 - u * d1) - u * q * d0)),
        (6, 5, 3) => int(qp * qp * ((q2 - 3 * u * q - 1) + qp * d1 + q * d0)),
        (6, 5, 4) => {
            int(qp * (qp * (1 - u * d2) - u * q * (d(1, 2, 1) + d(2, 2, 1) + d(3, 2, 1)) + q * big))
        }
        (6, 5, 5) => {
            int(qp * (qp * (q2 - 4 * u * q - 1) + qp * qp * d2 + q * qp * (d1 - u * big) + q2 * d0))
        }
        (6, 6, 2) => int(qp * (qp - u * q * d0 + (2 * q - u) * big)),
        (6, 6, 3) => int(q * qp * qp * (q - 4 * u + d0 - u * big)),
        (6, 6, 4) => int(qp * (1 + q * (1 - u * d1) - 2 * dl) + q2 * big),
        (6, 6, 5) => int(q * qp * (qp * (q - 5 * u) + qp * d1 + q * d0 - u * q * big)),
        (6, 6, 6) => int(qp * qp * (q2 - 6 * u * q + 1) + q2 * qp * d0 - u * q3 * big),
        (7, 2, 2) | (7, 4, 2) | (7, 4, 4) => int(qm * d(1, 1, 1)),
        (7, 3, 2) | (7, 4, 3) => int((q2 - 1) * (1 - u * d(1, 1, 1))),
        (7, 3, 3) => int(qp * (q2 - 1) * (qm + d(1, 1, 1))),
        (7, 5, 2) | (7, 5, 4) => int(qm * (qp * (1 - u * d(1, 1, 1)) - u * q * d(1, 2, 1))),
        (7, 5, 3) => int((q2 - 1) * (q2 - u * q - 1 + qp * d(1, 1, 1) + q * d(1, 2, 1))),
        (7, 5, 5) => {
            int(qm
                * (qp * (q2 - 2 * u * q - 1)
                    + qp * qp * d(1, 1, 1)
                    + q * qp * d1
                    + q2 * d(1, 2, 2)))
        }
        (7, 6, 2) => int(qm * (qp - u * q * d0)),
        (7, 6, 3) => int(q * (q2 - 1) * (q - 2 * u + d0)),
        (7, 6, 4) => int(qm * (qp - u * q * d1)),
        (7, 6, 5) => int(q * qm * (qp * (q - 3 * u) + qp * d1 + q * d0)),
        (7, 6, 6) => int(qm * (qp * (q2 - 4 * u * q + 1) + q2 * d0)),
        (7, 7, 2) => int(qm * (u + q * (1 - u * d(1, 1, 1)) + u * big)),
        (7, 7, 3) => int(q * (q2 - 1) * (q + d(1, 1, 1) + u * big)),
        (7, 7, 4) => int(qm * (qp - u * q * d(1, 1, 1)) + q2 * big),
        (7, 7, 5) => int(q * qm * (q2 - 1 + qp * d(1, 1, 1) + q * d(1, 1, 2) + u * q * big)),
        (7, 7, 6) => int(qm * ((q2 - 1) * qm + q2 * d0)),
        (7, 7, 7) => int((q2 * q2 - 1) + q2 * qm * d(1, 1, 1) + u * q3 * big),
        (8, 2, 2) | (8, 4, 2) | (8, 4, 4) => int(0),
        (8, 3, 2)
        | (8, 4, 3)
        | (8, 5, 2)
        | (8, 5, 4)
        | (8, 6, 4)
        | (8, 7, 2)
        | (8, 7, 4)
        | (8, 8, 4)
        | (8, 6, 2) => int(h),
        (8, 3, 3) => int(h * (q2 + u * q - 1)),
        (8, 5, 5) => int(h * (q2 - u * q - 1)),
        (8, 5, 3) => int((q2 - 1) * h),
        (8, 6, 3) => int(q * qm * h),
        (8, 6, 5) => int(q * (q - 2 * u) * h),
        (8, 6, 6) => int(h * (q2 - 3 * u * q + 1)),
        (8, 7, 3) | (8, 8, 5) => int(q * (q3 + u)),
        (8, 7, 5) => int(q2 * h),
        (8, 7, 6) => int(h * h),
        (8, 7, 7) => int(q2 * q2 + q2 + 1),
        (8, 8, 2) => r(h * (3 - dp), 3),
        (8, 8, 3) => r(q * h * (3 * (q + 2 * u) - u * dp), 3),
        (8, 8, 6) => int((q2 + 1) * h),
        (8, 8, 7) => int(qp * (q3 + u)),
        (8, 8, 8) => r(3 * h * (q2 + 3 * u * q + 1) - u * q3 * dp, 3),
        _ => return None,
    };
    Some((v, order[0]))
}

/// SU(3,q²) and SL(3,q), q = 3r ∓ 1, triples with at least two C₃ classes.
fn table7(tuple: &ClassTuple) -> Option<(Rational, usize)> {
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by_key(|&i| tuple.classes[i].series() != 3);
    // For (3,3,3) put the class with the odd split label last.
    let l = |i: usize| tuple.classes[i].label.split.unwrap_or(0);
    if tuple.classes.iter().all(|c| c.series() == 3) {
        let (a, b, c) = (l(0), l(1), l(2));
        if a == c && a != b {
            order = vec![0, 2, 1];
        } else if b == c && a != b {
            order = vec![1, 2, 0];
        }
    }
    let t = tuple.permuted(&order);
    let spec = t.spec;
    let q = spec.qv() as i128;
    let u = spec.sign().s() as i128;
    let dl = spec.sign().delta_l() as i128;
    let rr = spec.split_r()? as i128;
    let x = Ds::new(&t)?;
    let d111 = x.d(1, 1, 1);
    let ls: Vec<u8> = t
        .classes
        .iter()
        .map(|c| c.label.split.unwrap_or(0))
        .collect();
    let dstar = (ls[0] == ls[1]) as i128;
    let q2 = q * q;
    let c3 = &t.classes[2];
    let v = match c3.series() {
        3 => {
            if ls[0] != ls[1] && ls[1] != ls[2] && ls[0] != ls[2] {
                q * rr * (q * rr + (2 * q * rr - u * q + rr) * d111)
            } else if ls[0] == ls[1] && ls[1] != ls[2] {
                q * rr * (q * (rr - u) - (q * rr - u * q - rr + 1) * d111)
            } else {
                q * (q * (rr * rr - 1) + (2 * q * (rr - u) * (rr - u) + rr * rr - u) * d111)
            }
        }
        2 => (q2 - (q2 - u * q + 1) * d111) * dstar + 2 * q * rr * dl * d111,
        4 => q2 * dstar,
        5 => q2 * rr * (q - u - 3 * u * dstar + x.d(1, 1, 2)),
        6 => {
            let n = spec.modulus() as u128;
            let e = |a: usize| (c3.eigens[a].tau_exp as u128 * rr as u128) % n;
            let d0 = x.da(0);
            if e(0) == e(1) {
                q2 * ((q - u) * rr - 2 * u * q * dstar + rr * d0)
            } else {
                q2 * ((q - u) * rr - u * q * (1 - dstar) + rr * d0)
            }
        }
        7 => q2 * rr * (q - u + d111),
        8 => {
            let qpm = spec.q_pm() as i128;
            let p = c3.label.params[0] as i128;
            let kp = p / qpm;
            let k1 = t.classes[0].label.params[0] as i128;
            let k2 = t.classes[1].label.params[0] as i128;
            // k' enters through its residue mod 3, scaled to the ω-exponent.
            let ds111 = ((k1 + k2 + rr * kp).rem_euclid(qpm) == 0) as i128;
            q2 * ((q - u) * rr + u * q * (dstar + ds111 - 3 * dstar * ds111))
        }
        _ => return None,
    };
    Some((int(v), order[0]))
}

/// GL(2,q) and GU(2,q²).
fn table8(tuple: &ClassTuple) -> Option<(Rational, usize)> {
    let order = descending(tuple);
    let t = tuple.permuted(&order);
    if !t.det_ok() {
        return Some((Rational::zero(), order[0]));
    }
    let q = t.spec.qv() as i128;
    let u = t.spec.sign().s() as i128;
    let x = Ds::new(&t)?;
    let d = |a, b, c| x.d(a, b, c);
    let big = d(1, 1, 1) + d(1, 1, 2) + d(1, 2, 1) + d(2, 1, 1);
    let s = t.series();
    let v = match (s[0], s[1], s[2]) {
        (2, 2, 2) => q - 2 * d(1, 1, 1),
        (3, 2, 2) => q + u,
        (3, 3, 2) => (q + u) * (1 - u * (d(1, 1, 1) + d(1, 2, 1))),
        (3, 3, 3) => q + u - u * q * big,
        (4, 2, 2) | (4, 3, 2) | (4, 3, 3) | (4, 4, 3) => q - u,
        (4, 4, 2) => (q - u) * (1 + u * (d(1, 1, 1) + d(1, 2, 1))),
        (4, 4, 4) => q - u + u * q * big,
        _ => return None,
    };
    Some((int(v), order[0]))
}

/// SU(2,q²), q = 2r − 1, triples with at least two split unipotent classes.
fn su2_split(tuple: &ClassTuple) -> Option<(Rational, usize)> {
    let spec = tuple.spec;
    let q = spec.qv() as i128;
    let rr = spec.split_r()? as i128;
    let l = |i: usize| tuple.classes[i].label.split;
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by_key(|&i| tuple.classes[i].series() != 2);
    if tuple.classes.iter().all(|c| c.series() == 2) {
        if l(0) == l(2) && l(0) != l(1) {
            order = vec![0, 2, 1];
        } else if l(1) == l(2) && l(0) != l(1) {
            order = vec![1, 2, 0];
        }
    }
    let t = tuple.permuted(&order);
    let k = |i: usize| t.classes[i].label.params[0] as i128;
    let ls: Vec<Option<u8>> = t.classes.iter().map(|c| c.label.split).collect();
    let c3 = &t.classes[2];
    let size1 = Rational::from_integer(BigInt::from(t.classes[0].size.clone()));
    let n: Rational = if c3.series() == 2 {
        let d111 = ((k(0) + k(1) + k(2)).rem_euclid(2 * rr) == 0) as i128;
        let er = (rr % 2 == 0) as i128;
        if ls[0] == ls[1] && ls[1] == ls[2] {
            int(rr * (rr - 1) * (2 * q - (3 * rr - 3 * er + 1) * d111))
        } else {
            int(rr * (rr - 1) * (rr - er - 1) * d111)
        }
    } else {
        let r_even = rr % 2 == 0;
        let same = ls[0] == ls[1];
        let ksum_r = (k(0) + k(1)).rem_euclid(2 * rr) == rr;
        let k3 = if c3.series() == 3 {
            k(2)
        } else {
            k(2) / (q + 1)
        };
        let k3_odd = k3 % 2 == 1;
        // Columns: r parity, l₁ = l₂, k₁ + k₂ ∈ {0, r}, k₃ parity.
        let col =
            (!r_even as usize) * 8 + (!same as usize) * 4 + (ksum_r as usize) * 2 + k3_odd as usize;
        let row3 = [1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1];
        let row4 = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1];
        let ds = if c3.series() == 3 {
            row3[col]
        } else {
            row4[col]
        };
        int(q * rr * (q - 1) * ds)
    };
    Some((n / size1, order[0]))
}
