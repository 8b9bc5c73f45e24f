//! Finite groups as multiplication tables, and their subgroups.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic group")
    }

    /// Direct product; element `(a, b)` has index `a * |other| + b`.
    pub fn product(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order(), other.order());
        let table = (0..n * m)
            .map(|x| (0..n * m).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        Self::from_table(table).expect("product of groups")
    }

    pub fn klein_four() -> Self {
        Self::cyclic(2).product(&Self::cyclic(2))
    }

    /// Dihedral group of order `2n`: element `r^i s^j` has index `i + n*j`.
    pub fn dihedral(n: usize) -> Self {
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let (i1, j1) = decode(x);
                        let (i2, j2) = decode(y);
                        // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
                        let i = if j1 == 0 { (i1 + i2) % n } else { (i1 + n - i2) % n };
                        i + n * ((j1 + j2) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("dihedral group")
    }

    pub fn symmetric_three() -> Self {
        Self::dihedral(3)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Closure of a generating set.
    pub fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([self.identity]);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }
}

/// A subgroup of a shared parent group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
    position: Vec<Option<usize>>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && (Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent)
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, members: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        if set.iter().any(|&x| x >= parent.order()) || !set.contains(&parent.identity()) {
            return Err(Error::NotASubgroup);
        }
        for &a in &set {
            if !set.contains(&parent.inv(a)) || set.iter().any(|&b| !set.contains(&parent.mul(a, b))) {
                return Err(Error::NotASubgroup);
            }
        }
        Ok(Self::from_set(parent, set))
    }

    fn from_set(parent: Arc<FiniteGroup>, set: BTreeSet<usize>) -> Self {
        // Identity first, the rest in index order.
        let id = parent.identity();
        let mut members = vec![id];
        members.extend(set.into_iter().filter(|&x| x != id));
        let mut position = vec![None; parent.order()];
        for (p, &m) in members.iter().enumerate() {
            position[m] = Some(p);
        }
        Subgroup { parent, members, position }
    }

    pub fn generated_by(parent: Arc<FiniteGroup>, gens: &[usize]) -> Self {
        let set = parent.generated(gens);
        Self::from_set(parent, set)
    }

    pub fn whole(parent: Arc<FiniteGroup>) -> Self {
        let set = (0..parent.order()).collect();
        Self::from_set(parent, set)
    }

    pub fn trivial(parent: Arc<FiniteGroup>) -> Self {
        let set = BTreeSet::from([parent.identity()]);
        Self::from_set(parent, set)
    }

    /// Every subgroup, found by closing all pairs of elements and their joins.
    pub fn all(parent: Arc<FiniteGroup>) -> Vec<Subgroup> {
        let n = parent.order();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: Vec<BTreeSet<usize>> = (0..n).map(|a| parent.generated(&[a])).collect();
        while let Some(s) = queue.pop() {
            let key: Vec<usize> = s.iter().copied().collect();
            if !found.insert(key.clone()) {
                continue;
            }
            for a in 0..n {
                if !s.contains(&a) {
                    let mut gens = key.clone();
                    gens.push(a);
                    queue.push(parent.generated(&gens));
                }
            }
        }
        found.into_iter().map(|k| Self::from_set(parent.clone(), k.into_iter().collect())).collect()
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.position.get(g).map_or(false, |p| p.is_some())
    }

    /// Position of a member in [`Self::members`].
    pub fn position(&self, g: usize) -> Option<usize> {
        self.position.get(g).copied().flatten()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.parent.order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groups_satisfy_axioms() {
        for g in [
            FiniteGroup::cyclic(5),
            FiniteGroup::klein_four(),
            FiniteGroup::dihedral(4),
            FiniteGroup::symmetric_three(),
        ] {
            assert!(FiniteGroup::from_table(g.table().to_vec()).is_ok());
        }
        assert!(!FiniteGroup::symmetric_three().is_abelian());
        assert!(FiniteGroup::klein_four().is_abelian());
    }

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteGroup::from_table(vec![vec![0, 0], vec![0, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn subgroup_counts() {
        let s3 = Arc::new(FiniteGroup::symmetric_three());
        assert_eq!(Subgroup::all(s3).len(), 6);
        let v4 = Arc::new(FiniteGroup::klein_four());
        assert_eq!(Subgroup::all(v4.clone()).len(), 5);
        assert!(Subgroup::new(v4.clone(), &[0, 1]).is_ok());
        assert_eq!(Subgroup::new(v4, &[0, 1, 2]), Err(Error::NotASubgroup));
    }
}
