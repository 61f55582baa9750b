//! Brute-force ground truth: explicit matrix groups over F_{q²}, their
//! conjugacy partition, label matching and class-algebra counts.
//!
//! Field elements are stored as small indices: 0 is zero and `1 + i` is
//! ρ^i, where ρ = τ^{(q⁶−1)/(q²−1)} comes from the same τ as the
//! [`RootTower`](crate::arith::RootTower), so eigenvalue exponents read off
//! a matrix agree with the ones in [`ClassData`](crate::classes::ClassData).

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_bigint::BigUint;
use rayon::prelude::*;

use crate::arith::{make_field, FieldCtx, Sign};
use crate::classes::{
    class_data, enumerate_classes, sl2_to_su2, ClassLabel, Family, GroupSpec, Kind,
};
use crate::error::{Error, Result};

/// Default bound on the order of a group the oracle will build.
pub const DEFAULT_ORACLE_CAP: u64 = 300_000;
/// Bump when the cache layout or any labelling convention changes.
pub const CACHE_VERSION: u32 = 1;
const CACHE_MAGIC: &[u8; 4] = b"CPOR";

/// F_{q²} as index tables.
#[derive(Clone)]
pub struct SmallField {
    pub q: u64,
    /// q², the number of elements.
    pub size: usize,
    add: Vec<u8>,
    neg: Vec<u8>,
}

impl SmallField {
    fn order(&self) -> u64 {
        (self.size - 1) as u64
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            (1 + ((a as u64 - 1) + (b as u64 - 1)) % self.order()) as u8
        }
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        let o = self.order();
        (1 + (o - (a as u64 - 1)) % o) as u8
    }

    /// x ↦ x^q.
    pub fn conj(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            (1 + ((a as u64 - 1) * self.q) % self.order()) as u8
        }
    }

    /// ρ^e.
    pub fn rho(&self, e: u64) -> u8 {
        (1 + e % self.order()) as u8
    }

    /// Exponent of a nonzero element with respect to ρ.
    pub fn log(&self, a: u8) -> u64 {
        assert!(a != 0, "log of zero");
        a as u64 - 1
    }

    /// Elements of the subfield F_q, zero first.
    pub fn subfield(&self) -> Vec<u8> {
        let mut v = vec![0u8];
        v.extend((0..self.q - 1).map(|j| self.rho((self.q + 1) * j)));
        v
    }
}

/// Builds F_{q²} tables through the big field F_{q^{dim·…}} that defines τ.
fn small_field(spec: &GroupSpec) -> Result<(SmallField, FieldCtx, u64)> {
    let pq = spec.q;
    let big = make_field(pq.p, pq.e, if spec.dim == 3 { 6 } else { 2 })?;
    let exp_rho = spec.tower().exp_rho;
    let size = (pq.q * pq.q) as usize;
    let elem = |a: usize| {
        if a == 0 {
            0u32
        } else {
            big.exp(exp_rho * (a as u64 - 1))
        }
    };
    let back = |x: u32| -> Result<u8> {
        if x == 0 {
            return Ok(0);
        }
        let d = big.dlog(x)?;
        debug_assert_eq!(d % exp_rho, 0);
        Ok((1 + d / exp_rho) as u8)
    };
    let mut add = vec![0u8; size * size];
    let mut neg = vec![0u8; size];
    for a in 0..size {
        neg[a] = back(big.neg(elem(a)))?;
        for b in 0..size {
            add[a * size + b] = back(big.add(elem(a), elem(b)))?;
        }
    }
    Ok((
        SmallField {
            q: pq.q,
            size,
            add,
            neg,
        },
        big,
        exp_rho,
    ))
}

type Mat = [u8; 9];

#[derive(Clone, Copy)]
struct Ops<'a> {
    f: &'a SmallField,
    d: usize,
}

impl<'a> Ops<'a> {
    fn identity(&self) -> Mat {
        let mut m = [0u8; 9];
        for i in 0..self.d {
            m[i * self.d + i] = 1;
        }
        m
    }

    fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let (f, d) = (self.f, self.d);
        let mut c = [0u8; 9];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0u8;
                for k in 0..d {
                    s = f.add(s, f.mul(a[i * d + k], b[k * d + j]));
                }
                c[i * d + j] = s;
            }
        }
        c
    }

    fn det(&self, a: &Mat) -> u8 {
        let f = self.f;
        if self.d == 2 {
            return f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2]));
        }
        let m = |i: usize, j: usize| a[i * 3 + j];
        let t1 = f.mul(
            m(0, 0),
            f.sub(f.mul(m(1, 1), m(2, 2)), f.mul(m(1, 2), m(2, 1))),
        );
        let t2 = f.mul(
            m(0, 1),
            f.sub(f.mul(m(1, 0), m(2, 2)), f.mul(m(1, 2), m(2, 0))),
        );
        let t3 = f.mul(
            m(0, 2),
            f.sub(f.mul(m(1, 0), m(2, 1)), f.mul(m(1, 1), m(2, 0))),
        );
        f.add(f.sub(t1, t2), t3)
    }

    fn inv(&self, a: &Mat) -> Mat {
        let f = self.f;
        let dinv = f.inv(self.det(a));
        let mut r = [0u8; 9];
        if self.d == 2 {
            r[0] = f.mul(a[3], dinv);
            r[1] = f.mul(f.neg(a[1]), dinv);
            r[2] = f.mul(f.neg(a[2]), dinv);
            r[3] = f.mul(a[0], dinv);
            return r;
        }
        let m = |i: usize, j: usize| a[(i % 3) * 3 + (j % 3)];
        for i in 0..3 {
            for j in 0..3 {
                // Cofactor of (j, i) via cyclic index trick.
                let c = f.sub(
                    f.mul(m(j + 1, i + 1), m(j + 2, i + 2)),
                    f.mul(m(j + 1, i + 2), m(j + 2, i + 1)),
                );
                r[i * 3 + j] = f.mul(c, dinv);
            }
        }
        r
    }

    fn conj_transpose(&self, a: &Mat) -> Mat {
        let d = self.d;
        let mut r = [0u8; 9];
        for i in 0..d {
            for j in 0..d {
                r[i * d + j] = self.f.conj(a[j * d + i]);
            }
        }
        r
    }

    fn sub_scalar(&self, a: &Mat, l: u8) -> Mat {
        let mut r = *a;
        for i in 0..self.d {
            r[i * self.d + i] = self.f.sub(r[i * self.d + i], l);
        }
        r
    }

    fn rank(&self, a: &Mat) -> usize {
        let (f, d) = (self.f, self.d);
        let mut m = *a;
        let mut rank = 0;
        for col in 0..d {
            let Some(p) = (rank..d).find(|&r| m[r * d + col] != 0) else {
                continue;
            };
            for j in 0..d {
                m.swap(rank * d + j, p * d + j);
            }
            let pinv = f.inv(m[rank * d + col]);
            for r in 0..d {
                if r != rank && m[r * d + col] != 0 {
                    let factor = f.mul(m[r * d + col], pinv);
                    for j in 0..d {
                        let v = f.mul(factor, m[rank * d + j]);
                        m[r * d + j] = f.sub(m[r * d + j], v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn apply(&self, a: &Mat, v: &[u8; 3]) -> [u8; 3] {
        let mut r = [0u8; 3];
        for i in 0..self.d {
            let mut s = 0;
            for k in 0..self.d {
                s = self.f.add(s, self.f.mul(a[i * self.d + k], v[k]));
            }
            r[i] = s;
        }
        r
    }

    /// Monic characteristic polynomial, coefficients of x^{d−1}, …, x^0.
    fn charpoly(&self, a: &Mat) -> Vec<u8> {
        let f = self.f;
        let d = self.d;
        let tr = (0..d).fold(0u8, |s, i| f.add(s, a[i * d + i]));
        if d == 2 {
            return vec![f.neg(tr), self.det(a)];
        }
        let m = |i: usize, j: usize| a[i * 3 + j];
        let minor = |i: usize, j: usize| f.sub(f.mul(m(i, i), m(j, j)), f.mul(m(i, j), m(j, i)));
        let c2 = f.add(f.add(minor(0, 1), minor(0, 2)), minor(1, 2));
        vec![f.neg(tr), c2, f.neg(self.det(a))]
    }

    fn pack(&self, a: &Mat) -> u64 {
        let base = self.f.size as u64;
        a[..self.d * self.d]
            .iter()
            .rev()
            .fold(0u64, |acc, &x| acc * base + x as u64)
    }

    fn unpack(&self, mut key: u64) -> Mat {
        let base = self.f.size as u64;
        let mut m = [0u8; 9];
        for x in m.iter_mut().take(self.d * self.d) {
            *x = (key % base) as u8;
            key /= base;
        }
        m
    }
}

/// Conjugacy-class invariant: characteristic polynomial plus the rank of
/// A − λ for each root λ in F_{q²}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ClassKey {
    charpoly: Vec<u8>,
    ranks: Vec<(u8, u8)>,
}

fn matrix_key(ops: Ops, a: &Mat) -> ClassKey {
    let f = ops.f;
    let cp = ops.charpoly(a);
    let mut ranks = Vec::new();
    for l in 0..f.size as u8 {
        let val = cp.iter().fold(1u8, |acc, &c| f.add(f.mul(acc, l), c));
        if val == 0 {
            ranks.push((l, ops.rank(&ops.sub_scalar(a, l)) as u8));
        }
    }
    ClassKey {
        charpoly: cp,
        ranks,
    }
}

fn label_key(
    spec: &GroupSpec,
    big: &FieldCtx,
    exp_rho: u64,
    label: &ClassLabel,
) -> Result<ClassKey> {
    let data = class_data(
        &spec.g_spec(),
        &ClassLabel {
            split: None,
            ..label.clone()
        },
    )?;
    let mut poly: Vec<u32> = vec![1];
    for e in &data.eigens {
        let root = big.neg(big.exp(e.tau_exp));
        for _ in 0..e.mult {
            let mut next = vec![0u32; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i] = big.add(next[i], c);
                next[i + 1] = big.add(next[i + 1], big.mul(c, root));
            }
            poly = next;
        }
    }
    let to_small = |x: u32| -> Result<u8> {
        if x == 0 {
            return Ok(0);
        }
        let d = big.dlog(x)?;
        if d % exp_rho != 0 {
            return Err(Error::LabelMismatch(format!(
                "{label}: coefficient outside F_q²"
            )));
        }
        Ok((1 + d / exp_rho) as u8)
    };
    let charpoly = poly[1..]
        .iter()
        .map(|&c| to_small(c))
        .collect::<Result<Vec<_>>>()?;
    let mut ranks: Vec<(u8, u8)> = data
        .eigens
        .iter()
        .enumerate()
        .filter(|(_, e)| e.tau_exp % exp_rho == 0)
        .map(|(a, e)| ((1 + e.tau_exp / exp_rho) as u8, data.rank_at(a)))
        .collect();
    ranks.sort_unstable();
    Ok(ClassKey { charpoly, ranks })
}

/// A fully enumerated matrix group with its conjugacy partition and class
/// algebra.
pub struct ExplicitGroup {
    pub spec: GroupSpec,
    pub field: SmallField,
    pub modulus_poly: Vec<u64>,
    pub generator: u32,
    pub elements: Vec<u64>,
    index: HashMap<u64, u32>,
    pub class_of: Vec<u32>,
    pub class_reps: Vec<u32>,
    pub class_sizes: Vec<u64>,
    pub labels: Vec<ClassLabel>,
    label_index: HashMap<ClassLabel, usize>,
    inverse_class: Vec<usize>,
    /// a[(i·c + j)·c + k] = #{(x, y) ∈ C_i × C_j : xy = z_k} for the fixed
    /// representative z_k of class k.
    algebra: Vec<u64>,
}

fn ops_of(g: &ExplicitGroup) -> Ops<'_> {
    Ops {
        f: &g.field,
        d: g.spec.dim as usize,
    }
}

fn transvections(ops: Ops, fq: &[u8]) -> Vec<Mat> {
    let d = ops.d;
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            for &a in &fq[1..] {
                let mut m = ops.identity();
                m[i * d + j] = a;
                out.push(m);
            }
        }
    }
    out
}

fn hermitian_form(spec: &GroupSpec, f: &SmallField) -> Mat {
    let mut j = [0u8; 9];
    if spec.dim == 3 {
        j[2] = 1;
        j[4] = 1;
        j[6] = 1;
    } else {
        // z with z̄ = −z: ρ^{(q+1)/2} for odd q, 1 in characteristic 2.
        let z = if f.q % 2 == 1 {
            f.rho(f.q.div_ceil(2))
        } else {
            1
        };
        j[1] = z;
        j[2] = f.conj(z);
    }
    j
}

fn is_unitary(ops: Ops, form: &Mat, a: &Mat) -> bool {
    let lhs = ops.mul(&ops.mul(&ops.conj_transpose(a), form), a);
    lhs[..ops.d * ops.d] == form[..ops.d * ops.d]
}

/// Elements plus a generating set used for conjugation orbits.
fn elements_and_generators(spec: &GroupSpec, ops: Ops, cap: u64) -> Result<(Vec<u64>, Vec<Mat>)> {
    let f = ops.f;
    let d = ops.d;
    let fq = f.subfield();
    let linear_like = matches!(spec.family, Family::GL | Family::SL)
        || (spec.dim == 2 && spec.family == Family::SU);
    if linear_like {
        let want_det_one = spec.kind() == Kind::S;
        let q = fq.len() as u64;
        let total = q.pow((d * d) as u32);
        if total > 20 * cap {
            return Err(Error::CapacityExceeded(format!(
                "{spec}: {total} candidate matrices"
            )));
        }
        let mut gens = transvections(ops, &fq);
        if !want_det_one {
            let mut dg = ops.identity();
            dg[0] = f.rho(f.q + 1);
            gens.push(dg);
        }
        let elements: Vec<u64> = (0..total)
            .into_par_iter()
            .filter_map(|mut code| {
                let mut m = [0u8; 9];
                for x in m.iter_mut().take(d * d) {
                    *x = fq[(code % q) as usize];
                    code /= q;
                }
                let det = ops.det(&m);
                let ok = if want_det_one { det == 1 } else { det != 0 };
                ok.then(|| ops.pack(&m))
            })
            .collect();
        return Ok((elements, gens));
    }
    let form = hermitian_form(spec, f);
    let mut gens: Vec<Mat> = Vec::new();
    if d == 2 {
        gens.extend(transvections(ops, &fq));
        let mut dg = ops.identity();
        dg[0] = f.rho(1);
        dg[3] = f.inv(f.conj(f.rho(1)));
        gens.push(dg);
    } else {
        let det_one = spec.kind() == Kind::S;
        let rho = f.rho(1);
        let mut t = ops.identity();
        t[0] = rho;
        t[8] = f.inv(f.conj(rho));
        if det_one {
            t[4] = f.rho(f.q - 1);
        }
        gens.push(t);
        if !det_one {
            let mut w = ops.identity();
            w[4] = f.rho(f.q - 1);
            gens.push(w);
        }
        let mut jm = form;
        if det_one {
            for x in jm.iter_mut().take(9) {
                *x = f.neg(*x);
            }
        }
        gens.push(jm);
        let all: Vec<u8> = (0..f.size as u8).collect();
        for &a in &all {
            for &b in &all {
                for &c in &all {
                    let m: Mat = [1, 0, 0, a, 1, 0, b, c, 1];
                    if m != ops.identity() && is_unitary(ops, &form, &m) {
                        gens.push(m);
                    }
                }
            }
        }
    }
    for g in &gens {
        debug_assert!(is_unitary(ops, &form, g));
    }
    let id = ops.identity();
    let mut elements = vec![ops.pack(&id)];
    let mut seen: HashMap<u64, ()> = HashMap::new();
    seen.insert(elements[0], ());
    let mut head = 0;
    while head < elements.len() {
        let x = ops.unpack(elements[head]);
        head += 1;
        for g in &gens {
            let y = ops.pack(&ops.mul(&x, g));
            if seen.insert(y, ()).is_none() {
                elements.push(y);
                if elements.len() as u64 > cap {
                    return Err(Error::CapacityExceeded(format!(
                        "{spec}: closure exceeds {cap}"
                    )));
                }
            }
        }
    }
    Ok((elements, gens))
}

/// Split index of a C3 (dimension 3) or C2 (dimension 2) element of S.
fn split_index(spec: &GroupSpec, ops: Ops, a: &Mat, lambda: u8) -> u8 {
    let f = ops.f;
    let q = f.q;
    let n = ops.sub_scalar(a, lambda);
    let basis = [[1u8, 0, 0], [0, 1, 0], [0, 0, 1]];
    let d = ops.d;
    let depth = d - 1;
    let v = basis[..d]
        .iter()
        .copied()
        .find(|v| {
            let mut w = *v;
            for _ in 0..depth {
                w = ops.apply(&n, &w);
            }
            w[..d].iter().any(|&x| x != 0)
        })
        .expect("non-semisimple part has a cyclic vector");
    let mut cols = vec![v];
    for _ in 0..depth {
        let last = *cols.last().unwrap();
        cols.push(ops.apply(&n, &last));
    }
    let mut m = [0u8; 9];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..d {
            m[i * d + j] = c[i];
        }
    }
    let det = ops.det(&m);
    if d == 3 {
        // SU: cube class in F_{q²}* with respect to ρ; SL: in F_q* w.r.t. ω.
        let e = if spec.sign() == Sign::Unitary {
            f.log(det)
        } else {
            f.log(det) / (q + 1)
        };
        ((3 - e % 3) % 3) as u8
    } else {
        // (−1)^{k/r}·[[1,0],[σ^l,1]] gives det = ±σ^l; strip the sign.
        let ld = f.log(det) / (q + 1);
        let le = f.log(lambda) / (q + 1);
        ((ld + 2 - le % 2) % 2) as u8
    }
}

impl ExplicitGroup {
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        Self::build_capped(spec, DEFAULT_ORACLE_CAP)
    }

    pub fn build_capped(spec: &GroupSpec, cap: u64) -> Result<Self> {
        if spec.kind() == Kind::P {
            return Err(Error::WrongGroup(format!(
                "the oracle builds G and S only, not {spec}"
            )));
        }
        let expected = crate::classes::group_order(spec);
        if expected > BigUint::from(cap) {
            return Err(Error::CapacityExceeded(format!(
                "|{spec}| = {expected} exceeds {cap}"
            )));
        }
        if spec.qv() > 16 {
            return Err(Error::CapacityExceeded(format!("{spec}: q above 16")));
        }
        let (field, big, exp_rho) = small_field(spec)?;
        let ops = Ops {
            f: &field,
            d: spec.dim as usize,
        };
        let (mut elements, gens) = elements_and_generators(spec, ops, cap)?;
        let expected: u64 = expected.try_into().expect("bounded by cap");
        if elements.len() as u64 != expected {
            return Err(Error::ClosureSizeMismatch {
                got: elements.len() as u64,
                expected,
            });
        }
        elements.sort_unstable();
        let index: HashMap<u64, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i as u32))
            .collect();

        // Conjugacy orbits under the generators.
        let gens_inv: Vec<Mat> = gens.iter().map(|g| ops.inv(g)).collect();
        let mut class_of = vec![u32::MAX; elements.len()];
        let mut class_reps = Vec::new();
        let mut class_sizes = Vec::new();
        for start in 0..elements.len() {
            if class_of[start] != u32::MAX {
                continue;
            }
            let cid = class_reps.len() as u32;
            class_reps.push(start as u32);
            class_of[start] = cid;
            let mut queue = VecDeque::from([start]);
            let mut size = 1u64;
            while let Some(x) = queue.pop_front() {
                let xm = ops.unpack(elements[x]);
                for (g, gi) in gens.iter().zip(&gens_inv) {
                    let y = index[&ops.pack(&ops.mul(&ops.mul(g, &xm), gi))] as usize;
                    if class_of[y] == u32::MAX {
                        class_of[y] = cid;
                        size += 1;
                        queue.push_back(y);
                    }
                }
            }
            class_sizes.push(size);
        }

        let labels = Self::match_labels_raw(spec, ops, &big, exp_rho, &elements, &class_reps)?;
        let label_index: HashMap<ClassLabel, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        if label_index.len() != labels.len() {
            return Err(Error::LabelMismatch(format!(
                "{spec}: two classes share a label"
            )));
        }
        let expected_labels = enumerate_classes(spec)?;
        if expected_labels.len() != labels.len() {
            return Err(Error::LabelMismatch(format!(
                "{spec}: {} explicit classes but {} labels",
                labels.len(),
                expected_labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            let data = class_data(spec, l)?;
            if data.size != BigUint::from(class_sizes[i]) {
                return Err(Error::LabelMismatch(format!(
                    "{spec}: {l} has {} elements, catalog says {}",
                    class_sizes[i], data.size
                )));
            }
        }

        let inv_elem: Vec<u32> = elements
            .par_iter()
            .map(|&k| index[&ops.pack(&ops.inv(&ops.unpack(k)))])
            .collect();
        let inverse_class: Vec<usize> = class_reps
            .iter()
            .map(|&r| class_of[inv_elem[r as usize] as usize] as usize)
            .collect();
        let c = class_reps.len();
        let algebra_cols: Vec<Vec<u64>> = (0..c)
            .into_par_iter()
            .map(|k| {
                let z = ops.unpack(elements[class_reps[k] as usize]);
                let mut counts = vec![0u64; c * c];
                for (x, &xi) in inv_elem.iter().enumerate() {
                    let xinv = ops.unpack(elements[xi as usize]);
                    let y = index[&ops.pack(&ops.mul(&xinv, &z))];
                    counts[class_of[x] as usize * c + class_of[y as usize] as usize] += 1;
                }
                counts
            })
            .collect();
        let mut algebra = vec![0u64; c * c * c];
        for (k, col) in algebra_cols.iter().enumerate() {
            for ij in 0..c * c {
                algebra[ij * c + k] = col[ij];
            }
        }
        Ok(ExplicitGroup {
            spec: *spec,
            field: field.clone(),
            modulus_poly: big.modulus.clone(),
            generator: big.generator,
            elements,
            index,
            class_of,
            class_reps,
            class_sizes,
            labels,
            label_index,
            inverse_class,
            algebra,
        })
    }

    fn match_labels_raw(
        spec: &GroupSpec,
        ops: Ops,
        big: &FieldCtx,
        exp_rho: u64,
        elements: &[u64],
        reps: &[u32],
    ) -> Result<Vec<ClassLabel>> {
        // SU(2) is realized as SL(2,q) (the form above is preserved by it),
        // so matching runs in SL-language and is translated at the end.
        let su2 = spec.dim == 2 && spec.family == Family::SU;
        let work = if su2 {
            GroupSpec::new(Family::SL, 2, spec.qv())?
        } else {
            *spec
        };
        let gspec = work.g_spec();
        let mut by_key: HashMap<ClassKey, ClassLabel> = HashMap::new();
        for l in enumerate_classes(&gspec)? {
            let key = label_key(&gspec, big, exp_rho, &l)?;
            if let Some(prev) = by_key.insert(key, l.clone()) {
                return Err(Error::LabelMismatch(format!(
                    "{prev} and {l} share invariants"
                )));
            }
        }
        let splitting = work.kind() == Kind::S && work.split_r().is_some();
        let split_series = if work.dim == 3 { 3 } else { 2 };
        reps.iter()
            .map(|&r| {
                let a = ops.unpack(elements[r as usize]);
                let key = matrix_key(ops, &a);
                let mut label = by_key.get(&key).cloned().ok_or_else(|| {
                    Error::LabelMismatch(format!("{spec}: no label for invariants {key:?}"))
                })?;
                if splitting && label.series == split_series {
                    let lambda = key.ranks[0].0;
                    label.split = Some(split_index(&work, ops, &a, lambda));
                }
                if su2 {
                    label = sl2_to_su2(&work, &label)?;
                }
                Ok(label)
            })
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn class_index(&self, label: &ClassLabel) -> Result<usize> {
        self.label_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("{label} is not a class of {}", self.spec)))
    }

    pub fn inverse_of(&self, class: usize) -> usize {
        self.inverse_class[class]
    }

    /// #{(x, y) ∈ C_i × C_j : xy = z} for a fixed z ∈ C_k.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u64 {
        let c = self.num_classes();
        self.algebra[(i * c + j) * c + k]
    }

    /// Classes meeting the product C_i·C_j.
    pub fn product_support(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.num_classes())
            .filter(|&k| self.structure_constant(i, j, k) > 0)
            .collect()
    }

    /// Number of tuples (y_1, …, y_m), y_ν ∈ C_{c_ν}, with y_1⋯y_m = 1.
    pub fn count_by_index(&self, classes: &[usize]) -> BigUint {
        let c = self.num_classes();
        let m = classes.len();
        if m == 0 {
            return BigUint::from(1u32);
        }
        if m == 1 {
            let id_class = self.class_of[self.index[&self.identity_key()] as usize] as usize;
            return BigUint::from((id_class == classes[0]) as u32);
        }
        let mut v = vec![BigUint::from(0u32); c];
        v[classes[0]] = BigUint::from(1u32);
        for &cj in &classes[1..m - 1] {
            let mut next = vec![BigUint::from(0u32); c];
            for (i, vi) in v.iter().enumerate() {
                if vi == &BigUint::from(0u32) {
                    continue;
                }
                for (k, nk) in next.iter_mut().enumerate() {
                    let a = self.structure_constant(i, cj, k);
                    if a != 0 {
                        *nk += vi * a;
                    }
                }
            }
            v = next;
        }
        let last = classes[m - 1];
        &v[self.inverse_class[last]] * self.class_sizes[last]
    }

    fn identity_key(&self) -> u64 {
        let ops = ops_of(self);
        ops.pack(&ops.identity())
    }

    /// True iff A⁻¹B is never the transvection I + E₂₁ for A ~ B without
    /// eigenvalues in F_q.
    pub fn check_prop_1_1(&self) -> Result<bool> {
        if self.spec.dim != 3 || self.spec.family != Family::GL {
            return Err(Error::WrongGroup(format!("{} is not GL(3,q)", self.spec)));
        }
        let ops = ops_of(self);
        let mut t = ops.identity();
        t[3] = 1;
        for (x, &key) in self.elements.iter().enumerate() {
            let cx = self.class_of[x] as usize;
            if self.labels[cx].series != 8 {
                continue;
            }
            let b = self.index[&ops.pack(&ops.mul(&ops.unpack(key), &t))];
            if self.class_of[b as usize] as usize == cx {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serializes the group into the versioned cache format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        w.extend_from_slice(CACHE_MAGIC);
        w.write_u32::<LittleEndian>(CACHE_VERSION).unwrap();
        write_str(&mut w, &self.spec.to_string());
        w.write_u32::<LittleEndian>(self.modulus_poly.len() as u32)
            .unwrap();
        for &c in &self.modulus_poly {
            w.write_u64::<LittleEndian>(c).unwrap();
        }
        w.write_u32::<LittleEndian>(self.generator).unwrap();
        w.write_u64::<LittleEndian>(self.elements.len() as u64)
            .unwrap();
        for &e in &self.elements {
            w.write_u64::<LittleEndian>(e).unwrap();
        }
        for &c in &self.class_of {
            w.write_u32::<LittleEndian>(c).unwrap();
        }
        w.write_u32::<LittleEndian>(self.class_reps.len() as u32)
            .unwrap();
        for i in 0..self.class_reps.len() {
            w.write_u32::<LittleEndian>(self.class_reps[i]).unwrap();
            w.write_u64::<LittleEndian>(self.class_sizes[i]).unwrap();
            w.write_u32::<LittleEndian>(self.inverse_class[i] as u32)
                .unwrap();
            write_str(&mut w, &self.labels[i].to_string());
        }
        for &a in &self.algebra {
            w.write_u64::<LittleEndian>(a).unwrap();
        }
        w
    }

    /// Restores a group written by [`to_bytes`](Self::to_bytes), checking the
    /// header against `spec` and the current field convention.
    pub fn from_bytes(spec: &GroupSpec, bytes: &[u8]) -> Result<Self> {
        let corrupt = |what: &str| Error::Io(format!("cache for {spec}: {what}"));
        let mut r = Cursor::new(bytes);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| corrupt("truncated"))?;
        if &magic != CACHE_MAGIC {
            return Err(corrupt("bad magic"));
        }
        let rd32 = |r: &mut Cursor<&[u8]>| {
            r.read_u32::<LittleEndian>()
                .map_err(|_| corrupt("truncated"))
        };
        let rd64 = |r: &mut Cursor<&[u8]>| {
            r.read_u64::<LittleEndian>()
                .map_err(|_| corrupt("truncated"))
        };
        if rd32(&mut r)? != CACHE_VERSION {
            return Err(corrupt("version mismatch"));
        }
        if read_str(&mut r).ok_or_else(|| corrupt("bad spec"))? != spec.to_string() {
            return Err(corrupt("spec mismatch"));
        }
        let (field, big, _) = small_field(spec)?;
        let nmod = rd32(&mut r)? as usize;
        let mut modulus_poly = Vec::with_capacity(nmod.min(64));
        for _ in 0..nmod {
            modulus_poly.push(rd64(&mut r)?);
        }
        let generator = rd32(&mut r)?;
        if modulus_poly != big.modulus || generator != big.generator {
            return Err(corrupt("field convention changed"));
        }
        let ne = rd64(&mut r)? as usize;
        if ne as u64 > 4 * DEFAULT_ORACLE_CAP.max(1 << 22) {
            return Err(corrupt("implausible element count"));
        }
        let mut elements = Vec::with_capacity(ne);
        for _ in 0..ne {
            elements.push(rd64(&mut r)?);
        }
        let mut class_of = Vec::with_capacity(ne);
        for _ in 0..ne {
            class_of.push(rd32(&mut r)?);
        }
        let nc = rd32(&mut r)? as usize;
        let mut class_reps = Vec::new();
        let mut class_sizes = Vec::new();
        let mut inverse_class = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..nc {
            class_reps.push(rd32(&mut r)?);
            class_sizes.push(rd64(&mut r)?);
            inverse_class.push(rd32(&mut r)? as usize);
            let s = read_str(&mut r).ok_or_else(|| corrupt("bad label"))?;
            labels.push(s.parse::<ClassLabel>().map_err(|_| corrupt("bad label"))?);
        }
        let mut algebra = Vec::with_capacity(nc * nc * nc);
        for _ in 0..nc * nc * nc {
            algebra.push(rd64(&mut r)?);
        }
        if r.position() as usize != bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        if class_of.iter().any(|&c| c as usize >= nc)
            || class_reps.iter().any(|&x| x as usize >= ne)
            || inverse_class.iter().any(|&x| x >= nc)
        {
            return Err(corrupt("index out of range"));
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i as u32))
            .collect();
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(ExplicitGroup {
            spec: *spec,
            field,
            modulus_poly,
            generator,
            elements,
            index,
            class_of,
            class_reps,
            class_sizes,
            labels,
            label_index,
            inverse_class,
            algebra,
        })
    }
}

fn write_str(w: &mut Vec<u8>, s: &str) {
    w.write_u32::<LittleEndian>(s.len() as u32).unwrap();
    w.extend_from_slice(s.as_bytes());
}

fn read_str(r: &mut Cursor<&[u8]>) -> Option<String> {
    let n = r.read_u32::<LittleEndian>().ok()? as usize;
    if n > 4096 {
        return None;
    }
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf).ok()?;
    String::from_utf8(buf).ok()
}

/// Cache directory: `$CLASSPROD_CACHE_DIR`, else `$XDG_CACHE_HOME/classprod`,
/// else `$HOME/.cache/classprod`.
pub fn cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("CLASSPROD_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("classprod"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("classprod"))
}

fn cache_file(dir: &Path, spec: &GroupSpec) -> PathBuf {
    dir.join(format!(
        "{}{}_{}_v{}.bin",
        spec.family,
        spec.dim,
        spec.qv(),
        CACHE_VERSION
    ))
}

/// Loads the group from `dir` when a valid cache file exists, otherwise
/// builds it and tries to write the cache. Cache problems never fail the
/// call.
pub fn build_cached_in(spec: &GroupSpec, dir: Option<&Path>) -> Result<ExplicitGroup> {
    if let Some(dir) = dir {
        let path = cache_file(dir, spec);
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(g) = ExplicitGroup::from_bytes(spec, &bytes) {
                return Ok(g);
            }
        }
        let g = ExplicitGroup::build(spec)?;
        if fs::create_dir_all(dir).is_ok() {
            let tmp = path.with_extension("tmp");
            if let Ok(mut f) = fs::File::create(&tmp) {
                if f.write_all(&g.to_bytes()).is_ok() {
                    let _ = fs::rename(&tmp, &path);
                }
            }
        }
        return Ok(g);
    }
    ExplicitGroup::build(spec)
}

pub fn build_cached(spec: &GroupSpec) -> Result<ExplicitGroup> {
    build_cached_in(spec, cache_dir().as_deref())
}

/// Exact N(c_1, …, c_m) from the explicit group.
pub fn n_oracle(g: &ExplicitGroup, labels: &[ClassLabel]) -> Result<BigUint> {
    if labels.len() < 2 {
        return Err(Error::InvalidParams("need at least two classes".into()));
    }
    let idx = labels
        .iter()
        .map(|l| g.class_index(l))
        .collect::<Result<Vec<_>>>()?;
    Ok(g.count_by_index(&idx))
}
