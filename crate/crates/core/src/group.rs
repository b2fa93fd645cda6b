//! Finite abelian groups in invariant-factor form.

use alloc::vec::Vec;
use core::fmt;

use crate::error::CoreError;

/// Direct product of cyclic groups `Z_{o_1} x ... x Z_{o_r}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupSpec {
    cyclic_orders: Vec<u32>,
}

/// An element of a [`GroupSpec`], stored as reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl GroupSpec {
    pub fn new(cyclic_orders: Vec<u32>) -> Result<Self, CoreError> {
        if cyclic_orders.iter().any(|&o| o == 0) {
            return Err(CoreError::MalformedGroup("cyclic orders must be >= 1".into()));
        }
        Ok(Self { cyclic_orders })
    }

    pub fn trivial() -> Self {
        Self { cyclic_orders: Vec::new() }
    }

    pub fn z2() -> Self {
        Self { cyclic_orders: alloc::vec![2] }
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.cyclic_orders
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn order(&self) -> usize {
        self.cyclic_orders.iter().map(|&o| o as usize).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.cyclic_orders.iter().all(|&o| o == 1)
    }

    /// True for the group `Z2` written with a single cyclic factor.
    pub fn is_z2(&self) -> bool {
        self.cyclic_orders == [2]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { residues: alloc::vec![0; self.rank()] }
    }

    /// Builds an element, reducing every residue modulo its factor order.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement, CoreError> {
        if residues.len() != self.rank() {
            return Err(CoreError::MalformedElement {
                expected: self.rank(),
                found: residues.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(&r, &o)| r.rem_euclid(o as i64) as u32)
            .collect();
        Ok(GroupElement { residues })
    }

    /// Checks that `g` has the right shape and reduced residues.
    pub fn check(&self, g: &GroupElement) -> Result<(), CoreError> {
        if g.residues.len() != self.rank() {
            return Err(CoreError::MalformedElement {
                expected: self.rank(),
                found: g.residues.len(),
            });
        }
        if g.residues.iter().zip(&self.cyclic_orders).any(|(&r, &o)| r >= o) {
            return Err(CoreError::MalformedGroup("residue out of range".into()));
        }
        Ok(())
    }

    pub fn op(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, CoreError> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.cyclic_orders)
                .map(|((&x, &y), &o)| (x + y) % o)
                .collect(),
        })
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement, CoreError> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.cyclic_orders)
                .map(|(&x, &o)| (o - x) % o)
                .collect(),
        })
    }

    /// All elements, in lexicographic residue order.
    pub fn elements(&self) -> Vec<GroupElement> {
        let mut out = alloc::vec![self.identity()];
        for (pos, &o) in self.cyclic_orders.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            for g in &out {
                for r in 0..o {
                    let mut h = g.clone();
                    h.residues[pos] = r;
                    next.push(h);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Position of `g` in [`GroupSpec::elements`].
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.cyclic_orders)
            .fold(0usize, |acc, (&r, &o)| acc * o as usize + r as usize)
    }
}

/// Group operation on two elements of `spec`.
pub fn group_op(a: &GroupElement, b: &GroupElement, spec: &GroupSpec) -> Result<GroupElement, CoreError> {
    spec.op(a, b)
}

impl GroupElement {
    /// Builds an element without validating it against a group.
    pub fn from_residues(residues: Vec<u32>) -> Self {
        Self { residues }
    }

    /// The degree-0 or degree-1 element of `Z2`.
    pub fn z2(bit: u32) -> Self {
        Self { residues: alloc::vec![bit & 1] }
    }

    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    /// Parity of a `Z2` element; `None` for any other shape.
    pub fn z2_bit(&self) -> Option<u32> {
        match self.residues.as_slice() {
            [b] if *b < 2 => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_addition() {
        let g = GroupSpec::z2();
        let one = g.element(&[1]).unwrap();
        assert_eq!(group_op(&one, &one, &g).unwrap(), g.identity());
    }

    #[test]
    fn z2_times_z3_componentwise() {
        let g = GroupSpec::new(alloc::vec![2, 3]).unwrap();
        let a = g.element(&[1, 2]).unwrap();
        assert_eq!(group_op(&a, &a, &g).unwrap(), g.element(&[0, 1]).unwrap());
        assert_eq!(group_op(&a, &g.identity(), &g).unwrap(), a);
        let inv = g.inverse(&a).unwrap();
        assert!(group_op(&a, &inv, &g).unwrap().is_identity());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let g = GroupSpec::z2();
        let bad = GroupElement::from_residues(alloc::vec![1, 0]);
        assert!(matches!(
            group_op(&bad, &g.identity(), &g),
            Err(CoreError::MalformedElement { .. })
        ));
        assert!(GroupSpec::new(alloc::vec![0]).is_err());
    }

    #[test]
    fn element_listing() {
        let g = GroupSpec::new(alloc::vec![2, 3]).unwrap();
        let els = g.elements();
        assert_eq!(els.len(), 6);
        for (i, e) in els.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
        assert_eq!(GroupSpec::trivial().elements().len(), 1);
    }
}
