//! Inhomogeneous cochains on a subgroup with values in a G-module.
//!
//! A degree-`i` cochain is stored as a flat table: tuple index first
//! (mixed radix over subgroup positions, first entry most significant),
//! then the module coordinates.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::lattice::{AbHom, FiniteAbelianGroup};
use crate::module::{GModule, GModuleHom, ModulePairing};

pub const MAX_DEGREE: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    group: Arc<Subgroup>,
    module: Arc<GModule>,
    values: Vec<i64>,
}

pub(crate) fn tuple_count(h: usize, degree: usize) -> usize {
    h.pow(degree as u32)
}

pub(crate) fn decode(mut idx: usize, h: usize, degree: usize) -> Vec<usize> {
    let mut out = vec![0; degree];
    for slot in out.iter_mut().rev() {
        *slot = idx % h;
        idx /= h;
    }
    out
}

pub(crate) fn encode(pos: &[usize], h: usize) -> usize {
    pos.iter().fold(0, |acc, &p| acc * h + p)
}

/// `C^i(H, M)` as an abelian group.
pub fn cochain_space(h: &Subgroup, m: &GModule, degree: usize) -> FiniteAbelianGroup {
    let n = tuple_count(h.order(), degree);
    let mut moduli = Vec::with_capacity(n * m.rank());
    for _ in 0..n {
        moduli.extend_from_slice(m.underlying().moduli());
    }
    FiniteAbelianGroup::diagonal(moduli)
}

fn check_group(h: &Subgroup, m: &GModule) -> Result<()> {
    if h.parent().order() != m.group().order() || **h.parent() != **m.group() {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

impl Cochain {
    pub fn zero(group: Arc<Subgroup>, module: Arc<GModule>, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(degree));
        }
        check_group(&group, &module)?;
        let len = tuple_count(group.order(), degree) * module.rank();
        Ok(Cochain { degree, group, module, values: vec![0; len] })
    }

    /// Builds a cochain from a function of parent-group element tuples.
    pub fn from_fn(
        group: Arc<Subgroup>,
        module: Arc<GModule>,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Vec<i64>,
    ) -> Result<Self> {
        let mut c = Self::zero(group, module, degree)?;
        let h = c.group.order();
        let r = c.module.rank();
        for t in 0..tuple_count(h, degree) {
            let elems: Vec<usize> = decode(t, h, degree).into_iter().map(|p| c.group.members()[p]).collect();
            let v = c.module.underlying().reduce(&f(&elems));
            c.values[t * r..(t + 1) * r].copy_from_slice(&v);
        }
        Ok(c)
    }

    /// Builds a cochain from its flat value table.
    pub fn from_values(group: Arc<Subgroup>, module: Arc<GModule>, degree: usize, values: Vec<i64>) -> Result<Self> {
        let mut c = Self::zero(group, module, degree)?;
        if values.len() != c.values.len() {
            return Err(Error::NotWellDefined("cochain table has the wrong length".into()));
        }
        c.values = cochain_space(&c.group, &c.module, degree).reduce(&values);
        Ok(c)
    }

    /// The degree-0 cochain with value `m`.
    pub fn constant(group: Arc<Subgroup>, module: Arc<GModule>, m: &[i64]) -> Result<Self> {
        let v = module.underlying().reduce(m);
        Self::from_values(group, module, 0, v)
    }

    pub fn random<R: Rng + ?Sized>(group: Arc<Subgroup>, module: Arc<GModule>, degree: usize, rng: &mut R) -> Result<Self> {
        let mut c = Self::zero(group, module, degree)?;
        let moduli = c.module.underlying().moduli().to_vec();
        let r = moduli.len();
        for (k, v) in c.values.iter_mut().enumerate() {
            *v = rng.gen_range(0..moduli[k % r]);
        }
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &Arc<Subgroup> {
        &self.group
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn space(&self) -> FiniteAbelianGroup {
        cochain_space(&self.group, &self.module, self.degree)
    }

    pub fn tuple_count(&self) -> usize {
        tuple_count(self.group.order(), self.degree)
    }

    pub fn value_at(&self, t: usize) -> &[i64] {
        let r = self.module.rank();
        &self.values[t * r..(t + 1) * r]
    }

    /// Value on a tuple of positions in the subgroup's member list.
    pub fn value_pos(&self, pos: &[usize]) -> &[i64] {
        self.value_at(encode(pos, self.group.order()))
    }

    /// Value on a tuple of parent-group elements.
    pub fn value(&self, elems: &[usize]) -> Result<&[i64]> {
        if elems.len() != self.degree {
            return Err(Error::NotWellDefined("tuple length differs from the degree".into()));
        }
        let pos: Vec<usize> =
            elems.iter().map(|&g| self.group.position(g).ok_or(Error::NotASubgroup)).collect::<Result<_>>()?;
        Ok(self.value_pos(&pos))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn same_shape(&self, other: &Cochain) -> Result<()> {
        if self.degree != other.degree || *self.group != *other.group {
            return Err(Error::GroupMismatch);
        }
        if *self.module != *other.module {
            return Err(Error::NotWellDefined("cochains take values in different modules".into()));
        }
        Ok(())
    }

    fn with_values(&self, values: Vec<i64>) -> Cochain {
        let values = self.space().reduce(&values);
        Cochain { degree: self.degree, group: self.group.clone(), module: self.module.clone(), values }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.same_shape(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.same_shape(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn neg(&self) -> Cochain {
        self.with_values(self.values.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Cochain {
        self.with_values(self.values.iter().map(|a| a * k).collect())
    }

    /// `d c` by the alternating-sum formula.
    pub fn coboundary(&self) -> Result<Cochain> {
        let i = self.degree;
        if i >= MAX_DEGREE {
            return Err(Error::DegreeTooHigh(i));
        }
        let h = self.group.order();
        let m = self.module.underlying();
        let parent = self.group.parent();
        let members = self.group.members();
        let mut out = Cochain::zero(self.group.clone(), self.module.clone(), i + 1)?;
        let r = self.module.rank();
        let mut merged = vec![0usize; i];
        for t in 0..tuple_count(h, i + 1) {
            let p = decode(t, h, i + 1);
            let mut acc = self.module.act(members[p[0]], self.value_pos(&p[1..]));
            for j in 1..=i {
                merged.clear();
                merged.extend_from_slice(&p[..j - 1]);
                let prod = parent.mul(members[p[j - 1]], members[p[j]]);
                merged.push(self.group.position(prod).expect("subgroup is closed"));
                merged.extend_from_slice(&p[j + 1..]);
                let v = self.value_pos(&merged);
                acc = if j % 2 == 0 { m.add(&acc, v) } else { m.sub(&acc, v) };
            }
            let v = self.value_pos(&p[..i]);
            acc = if (i + 1) % 2 == 0 { m.add(&acc, v) } else { m.sub(&acc, v) };
            out.values[t * r..(t + 1) * r].copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `(self ∪_P other)(σ₁..σ_{i+j}) = P(self(σ₁..σᵢ), σ₁⋯σᵢ · other(σ_{i+1}..))`.
    pub fn cup(&self, other: &Cochain, pairing: &ModulePairing) -> Result<Cochain> {
        let (i, j) = (self.degree, other.degree);
        if i + j > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(i + j));
        }
        if *self.group != *other.group {
            return Err(Error::GroupMismatch);
        }
        if *pairing.left != *self.module || *pairing.right != *other.module {
            return Err(Error::NotWellDefined("pairing does not match the cochain modules".into()));
        }
        let h = self.group.order();
        let parent = self.group.parent();
        let members = self.group.members();
        let mut out = Cochain::zero(self.group.clone(), pairing.target.clone(), i + j)?;
        let r = pairing.target.rank();
        for t in 0..tuple_count(h, i + j) {
            let p = decode(t, h, i + j);
            let g = p[..i].iter().fold(parent.identity(), |acc, &x| parent.mul(acc, members[x]));
            let right = other.module.act(g, other.value_pos(&p[i..]));
            let v = pairing.eval(self.value_pos(&p[..i]), &right);
            out.values[t * r..(t + 1) * r].copy_from_slice(&v);
        }
        Ok(out)
    }

    /// Restriction to a subgroup of the current group.
    pub fn restrict(&self, sub: &Arc<Subgroup>) -> Result<Cochain> {
        if !Arc::ptr_eq(sub.parent(), self.group.parent()) && **sub.parent() != **self.group.parent() {
            return Err(Error::GroupMismatch);
        }
        if !sub.is_subgroup_of(&self.group) {
            return Err(Error::NotASubgroup);
        }
        let h = self.group.order();
        Cochain::from_fn(sub.clone(), self.module.clone(), self.degree, |elems| {
            let pos: Vec<usize> = elems.iter().map(|&g| self.group.position(g).expect("member")).collect();
            self.value_at(encode(&pos, h)).to_vec()
        })
    }

    /// Pointwise image under a module map.
    pub fn map(&self, f: &GModuleHom) -> Result<Cochain> {
        if *f.source != *self.module {
            return Err(Error::NotWellDefined("map source differs from the cochain module".into()));
        }
        let r = self.module.rank();
        let mut values = Vec::with_capacity(self.tuple_count() * f.target.rank());
        for t in 0..self.tuple_count() {
            values.extend(f.apply(&self.values[t * r..(t + 1) * r]));
        }
        Cochain::from_values(self.group.clone(), f.target.clone(), self.degree, values)
    }

    /// Pointwise preimage under an injective module map.
    pub fn preimage(&self, f: &GModuleHom) -> Result<Cochain> {
        if *f.target != *self.module {
            return Err(Error::NotWellDefined("map target differs from the cochain module".into()));
        }
        let r = self.module.rank();
        let mut memo: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut values = Vec::with_capacity(self.tuple_count() * f.source.rank());
        for t in 0..self.tuple_count() {
            let y = &self.values[t * r..(t + 1) * r];
            if let Some(x) = memo.get(y) {
                values.extend_from_slice(x);
                continue;
            }
            let x = f.map.solve(y).map_err(|_| Error::NotWellDefined("value outside the image".into()))?;
            values.extend_from_slice(&x);
            memo.insert(y.to_vec(), x);
        }
        Cochain::from_values(self.group.clone(), f.source.clone(), self.degree, values)
    }

    /// `s ∘ self` for a deterministic set-section `s` of a surjection.
    pub fn lift_through(&self, section: &SetSection) -> Result<Cochain> {
        if *section.map.target != *self.module {
            return Err(Error::NotWellDefined("section target differs from the cochain module".into()));
        }
        let r = self.module.rank();
        let mut values = Vec::with_capacity(self.tuple_count() * section.map.source.rank());
        for t in 0..self.tuple_count() {
            values.extend_from_slice(section.lift(&self.values[t * r..(t + 1) * r]));
        }
        Cochain::from_values(self.group.clone(), section.map.source.clone(), self.degree, values)
    }
}

/// Smallest preimage (in element index order) of every target element.
#[derive(Clone, Debug)]
pub struct SetSection {
    pub map: GModuleHom,
    table: Vec<Vec<i64>>,
}

impl SetSection {
    pub fn new(map: &GModuleHom) -> Result<Self> {
        let src = map.source.underlying();
        let tgt = map.target.underlying();
        let n = tgt.order() as usize;
        let mut table: Vec<Option<Vec<i64>>> = vec![None; n];
        let mut missing = n;
        for x in src.elements() {
            let y = tgt.index_of(&map.apply(&x));
            if table[y].is_none() {
                table[y] = Some(x);
                missing -= 1;
                if missing == 0 {
                    break;
                }
            }
        }
        let table = table.into_iter().collect::<Option<Vec<_>>>().ok_or(Error::NotSurjective)?;
        Ok(SetSection { map: map.clone(), table })
    }

    pub fn lift(&self, y: &[i64]) -> &[i64] {
        let tgt = self.map.target.underlying();
        &self.table[tgt.index_of(&tgt.reduce(y))]
    }
}

/// `lift_through(π, a)` with a freshly built section.
pub fn lift_through(pi: &GModuleHom, a: &Cochain) -> Result<Cochain> {
    a.lift_through(&SetSection::new(pi)?)
}

/// The coboundary `C^i(H, M) → C^{i+1}(H, M)` as a matrix.
pub fn coboundary_map(h: &Subgroup, m: &GModule, degree: usize) -> Result<AbHom> {
    if degree >= MAX_DEGREE {
        return Err(Error::DegreeTooHigh(degree));
    }
    check_group(h, m)?;
    let n = h.order();
    let r = m.rank();
    let source = cochain_space(h, m, degree);
    let target = cochain_space(h, m, degree + 1);
    let mut matrix = vec![vec![0i64; source.rank()]; target.rank()];
    let parent = h.parent();
    let members = h.members();
    let mut merged = Vec::with_capacity(degree);
    for t in 0..tuple_count(n, degree + 1) {
        let p = decode(t, n, degree + 1);
        let act = m.action(members[p[0]]).matrix();
        let tail = encode(&p[1..], n);
        for row in 0..r {
            for k in 0..r {
                matrix[t * r + row][tail * r + k] += act[row][k];
            }
        }
        for j in 1..=degree {
            merged.clear();
            merged.extend_from_slice(&p[..j - 1]);
            merged.push(h.position(parent.mul(members[p[j - 1]], members[p[j]])).expect("closed"));
            merged.extend_from_slice(&p[j + 1..]);
            let col = encode(&merged, n);
            let sign = if j % 2 == 0 { 1 } else { -1 };
            for k in 0..r {
                matrix[t * r + k][col * r + k] += sign;
            }
        }
        let col = encode(&p[..degree], n);
        let sign = if (degree + 1) % 2 == 0 { 1 } else { -1 };
        for k in 0..r {
            matrix[t * r + k][col * r + k] += sign;
        }
    }
    for (row, md) in matrix.iter_mut().zip(target.moduli()) {
        for e in row.iter_mut() {
            *e = e.rem_euclid(*md);
        }
    }
    AbHom::new(source, target, matrix)
}
