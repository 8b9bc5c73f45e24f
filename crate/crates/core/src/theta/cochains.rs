use std::sync::Arc;

use rand::Rng;

use super::{HElem, ThetaPresentation};
use crate::cochain::{decode, tuple_count, Cochain};
use crate::error::{Error, Result};
use crate::group::Subgroup;

/// A cochain with values in a theta group, stored as its `C` and `M` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HCochain {
    pub alpha: Cochain,
    pub m: Cochain,
}

impl HCochain {
    pub fn new(h: &ThetaPresentation, alpha: Cochain, m: Cochain) -> Result<Self> {
        if alpha.degree() != m.degree()
            || *alpha.group() != *m.group()
            || **alpha.module() != **h.coefficient().module()
            || **m.module() != **h.module()
        {
            return Err(Error::GroupMismatch);
        }
        Ok(HCochain { alpha, m })
    }

    /// `σ ↦ (0, a(σ))`.
    pub fn lift(h: &ThetaPresentation, a: &Cochain) -> Result<Self> {
        let alpha = Cochain::zero(a.group().clone(), h.coefficient().module().clone(), a.degree())?;
        Self::new(h, alpha, a.clone())
    }

    pub fn random<R: Rng + ?Sized>(h: &ThetaPresentation, group: Arc<Subgroup>, degree: usize, rng: &mut R) -> Result<Self> {
        let alpha = Cochain::random(group.clone(), h.coefficient().module().clone(), degree, rng)?;
        let m = Cochain::random(group, h.module().clone(), degree, rng)?;
        Self::new(h, alpha, m)
    }

    /// Builds a cochain from a function of parent-group element tuples.
    pub fn from_fn(
        h: &ThetaPresentation,
        group: Arc<Subgroup>,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Result<HElem>,
    ) -> Result<Self> {
        let count = tuple_count(group.order(), degree);
        let mut alphas = Vec::with_capacity(count);
        let mut ms = Vec::with_capacity(count * h.module().rank());
        for t in 0..count {
            let elems: Vec<usize> = decode(t, group.order(), degree).into_iter().map(|p| group.members()[p]).collect();
            let x = f(&elems)?;
            if h.n() > 1 {
                alphas.push(x.alpha);
            }
            ms.extend(x.m);
        }
        let alpha = Cochain::from_values(group.clone(), h.coefficient().module().clone(), degree, alphas)?;
        let m = Cochain::from_values(group, h.module().clone(), degree, ms)?;
        Self::new(h, alpha, m)
    }

    pub fn degree(&self) -> usize {
        self.m.degree()
    }

    pub fn group(&self) -> &Arc<Subgroup> {
        self.m.group()
    }

    /// The value at a tuple of parent-group elements.
    pub fn value(&self, elems: &[usize]) -> Result<HElem> {
        let alpha = self.alpha.value(elems)?.first().copied().unwrap_or(0);
        Ok(HElem { alpha, m: self.m.value(elems)?.to_vec() })
    }

    pub fn mul(&self, h: &ThetaPresentation, other: &HCochain) -> Result<Self> {
        if self.degree() != other.degree() || *self.group() != *other.group() {
            return Err(Error::GroupMismatch);
        }
        Self::from_fn(h, self.group().clone(), self.degree(), |e| Ok(h.mul(&self.value(e)?, &other.value(e)?)))
    }

    pub fn inv(&self, h: &ThetaPresentation) -> Result<Self> {
        Self::from_fn(h, self.group().clone(), self.degree(), |e| Ok(h.inv(&self.value(e)?)))
    }

    /// `db(σ, τ) = b(σ) · σb(τ) · b(στ)⁻¹` for a 1-cochain `b`.
    pub fn differential(&self, h: &ThetaPresentation) -> Result<Self> {
        if self.degree() != 1 {
            return Err(Error::NotWellDefined("the non-abelian differential is defined on 1-cochains".into()));
        }
        let g = self.group().parent().clone();
        Self::from_fn(h, self.group().clone(), 2, |e| {
            let (s, t) = (e[0], e[1]);
            let first = h.mul(&self.value(&[s])?, &h.act(s, &self.value(&[t])?));
            Ok(h.mul(&first, &h.inv(&self.value(&[g.mul(s, t)])?)))
        })
    }

    /// The alternating-sum coboundary, computed with the group law; meaningful when the values commute.
    pub fn abelian_coboundary(&self, h: &ThetaPresentation) -> Result<Self> {
        let i = self.degree();
        let g = self.group().parent().clone();
        Self::from_fn(h, self.group().clone(), i + 1, |e| {
            let mut acc = h.act(e[0], &self.value(&e[1..])?);
            let mut merged = Vec::with_capacity(i);
            for j in 1..=i {
                merged.clear();
                merged.extend_from_slice(&e[..j - 1]);
                merged.push(g.mul(e[j - 1], e[j]));
                merged.extend_from_slice(&e[j + 1..]);
                let v = self.value(&merged)?;
                acc = h.mul(&acc, &if j % 2 == 0 { v } else { h.inv(&v) });
            }
            let v = self.value(&e[..i])?;
            Ok(h.mul(&acc, &if (i + 1) % 2 == 0 { v } else { h.inv(&v) }))
        })
    }

    /// The pointwise product with the `C`-valued cochain `z`.
    pub fn shift(&self, h: &ThetaPresentation, z: &Cochain) -> Result<Self> {
        Self::new(h, self.alpha.add(z)?, self.m.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::ArithmeticFixture;
    use crate::lattice::FiniteAbelianGroup;
    use crate::module::GModule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn differential_of_a_lifted_cocycle_is_central() {
        let f = ArithmeticFixture::dbl4();
        let m = Arc::new(GModule::trivial_action(f.group().clone(), FiniteAbelianGroup::new(vec![2, 2]).unwrap()));
        let h = ThetaPresentation::from_fns(f.coefficient().clone(), m.clone(), |x, y| 2 * x[0] * y[1], |_, _| 0).unwrap();
        let h1 = f.global(&m, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for x in h1.elements() {
            let db = HCochain::lift(&h, &h1.representative(&x)).unwrap().differential(&h).unwrap();
            assert!(db.m.is_zero());
            assert!(db.alpha.coboundary().unwrap().is_zero());
        }
        let b = HCochain::random(&h, f.whole().clone(), 1, &mut rng).unwrap();
        let prod = b.mul(&h, &b.inv(&h).unwrap()).unwrap();
        assert!(prod.alpha.is_zero() && prod.m.is_zero());
    }
}
