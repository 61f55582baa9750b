//! Class products as sets of classes.
//!
//! A^Γ·C^Γ is a union of classes, and X lies in it exactly when
//! N(A, C, X⁻¹) > 0. Folding this over a tuple gives the set of classes met
//! by A₁^Γ⋯A_m^Γ using only triple constants.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use crate::burnside::{n_count, ClassTuple};
use crate::classes::{all_class_data, inverse_class, ClassData, ClassLabel, GroupSpec};
use crate::{Error, Result};

pub struct ProductMap {
    spec: GroupSpec,
    classes: Vec<ClassData>,
    index: HashMap<ClassLabel, usize>,
    inv: Vec<usize>,
    pairs: HashMap<(usize, usize), BTreeSet<usize>>,
}

impl ProductMap {
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let classes = all_class_data(spec)?;
        let index: HashMap<ClassLabel, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.label.clone(), i))
            .collect();
        let inv = classes
            .iter()
            .map(|c| Ok(index[&inverse_class(spec, &c.label)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductMap {
            spec: *spec,
            classes,
            index,
            inv,
            pairs: HashMap::new(),
        })
    }

    pub fn classes(&self) -> &[ClassData] {
        &self.classes
    }

    pub fn index_of(&self, label: &ClassLabel) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("{label} is not a class of {}", self.spec)))
    }

    /// Classes met by a·c.
    pub fn pair(&mut self, a: usize, c: usize) -> Result<&BTreeSet<usize>> {
        let key = if a <= c { (a, c) } else { (c, a) };
        if !self.pairs.contains_key(&key) {
            let mut out = BTreeSet::new();
            for x in 0..self.classes.len() {
                let t = ClassTuple::new(
                    &self.spec,
                    vec![
                        self.classes[a].clone(),
                        self.classes[c].clone(),
                        self.classes[self.inv[x]].clone(),
                    ],
                )?;
                if !n_count(&t)?.0.is_zero() {
                    out.insert(x);
                }
            }
            self.pairs.insert(key, out);
        }
        Ok(&self.pairs[&key])
    }

    /// Classes met by (union of `set`)·c.
    pub fn times(&mut self, set: &BTreeSet<usize>, c: usize) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &a in set {
            out.extend(self.pair(a, c)?.iter().copied());
        }
        Ok(out)
    }

    /// Classes met by the product of the given classes.
    pub fn product(&mut self, idx: &[usize]) -> Result<BTreeSet<usize>> {
        let (&first, rest) = idx
            .split_first()
            .ok_or_else(|| Error::InvalidParams("empty class tuple".into()))?;
        let mut set = BTreeSet::from([first]);
        for &c in rest {
            set = self.times(&set, c)?;
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_times_inverse_contains_identity() {
        let g: GroupSpec = "GL3:2".parse().unwrap();
        let mut pm = ProductMap::new(&g).unwrap();
        let id = pm.index_of(&ClassLabel::new(1, vec![0])).unwrap();
        for a in 0..pm.classes().len() {
            let set = pm.pair(a, pm.inv[a]).unwrap().clone();
            assert!(set.contains(&id));
            assert_eq!(pm.product(&[a, id]).unwrap(), BTreeSet::from([a]));
        }
        assert!(pm.product(&[]).is_err());
    }
}
