//! Cohomology groups `H^i(H, M) = Z^i / B^i` with cocycle representatives.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::cochain::{coboundary_map, cochain_space, Cochain, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::lattice::{quotient, subgroup, AbHom, FiniteAbelianGroup, Quotient, SubgroupPresentation};
use crate::module::GModule;

#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    degree: usize,
    group: Arc<Subgroup>,
    module: Arc<GModule>,
    pub carrier: FiniteAbelianGroup,
    cocycles: SubgroupPresentation,
    quotient: Quotient,
    representatives: Vec<Cochain>,
    lower: Option<Arc<AbHom>>,
}

impl CohomologyGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &Arc<Subgroup> {
        &self.group
    }

    pub fn module(&self) -> &Arc<GModule> {
        &self.module
    }

    pub fn cocycles(&self) -> &SubgroupPresentation {
        &self.cocycles
    }

    /// One cocycle per carrier generator.
    pub fn representatives(&self) -> &[Cochain] {
        &self.representatives
    }

    /// A cocycle representing the class `x`.
    pub fn representative(&self, x: &[i64]) -> Cochain {
        let z = self.cocycles.include(&self.quotient.lift(x));
        Cochain::from_values(self.group.clone(), self.module.clone(), self.degree, z).expect("cocycle table")
    }

    /// Class of a cocycle.
    pub fn reduce(&self, c: &Cochain) -> Result<Vec<i64>> {
        if c.degree() != self.degree || **c.group() != *self.group || **c.module() != *self.module {
            return Err(Error::GroupMismatch);
        }
        let coords = self.cocycles.coordinates(c.values()).map_err(|_| Error::NotACocycle)?;
        Ok(self.quotient.projection.apply(&coords))
    }

    /// Some `ε` with `dε = z`.
    pub fn solve_coboundary(&self, z: &Cochain) -> Result<Cochain> {
        solve_with(self.lower.as_deref(), &self.group, &self.module, z)
    }

    /// All classes, in carrier element order.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        self.carrier.elements().collect()
    }
}

fn solve_with(lower: Option<&AbHom>, h: &Arc<Subgroup>, m: &Arc<GModule>, z: &Cochain) -> Result<Cochain> {
    let i = z.degree();
    if i == 0 {
        return if z.is_zero() { Ok(z.clone()) } else { Err(Error::NoSolution) };
    }
    let built;
    let d = match lower {
        Some(d) => d,
        None => {
            built = coboundary_map(h, m, i - 1)?;
            &built
        }
    };
    let x = d.solve(z.values())?;
    Cochain::from_values(h.clone(), m.clone(), i - 1, x)
}

fn build(h: &Arc<Subgroup>, m: &Arc<GModule>, degree: usize, cache: &CohomologyCache) -> Result<CohomologyGroup> {
    if degree >= MAX_DEGREE {
        return Err(Error::DegreeTooHigh(degree));
    }
    let d = cache.coboundary(h, m, degree)?;
    let cocycles = if d.target().rank() == 0 {
        SubgroupPresentation::whole(d.source())
    } else {
        d.kernel()
    };
    let lower = if degree == 0 { None } else { Some(cache.coboundary(h, m, degree - 1)?) };
    // Coordinates of B^i inside Z^i: kernel of (z, y) ↦ incl(z) − d(y), first block.
    let inside = match &lower {
        None => SubgroupPresentation::trivial(&cocycles.carrier),
        Some(dl) => {
            let zr = cocycles.carrier.rank();
            let mut moduli = cocycles.carrier.moduli().to_vec();
            moduli.extend_from_slice(dl.source().moduli());
            let src = FiniteAbelianGroup::diagonal(moduli);
            let incl = cocycles.inclusion.matrix();
            let dm = dl.matrix();
            let amb = cochain_space(h, m, degree);
            let rows: Vec<Vec<i64>> = (0..amb.rank())
                .map(|r| {
                    let mut row: Vec<i64> = incl[r].clone();
                    row.extend(dm[r].iter().map(|x| (-x).rem_euclid(amb.moduli()[r])));
                    row
                })
                .collect();
            let joint = AbHom::new(src, amb, rows)?;
            let gens: Vec<Vec<i64>> = if joint.target().rank() == 0 {
                (0..joint.source().rank()).map(|k| joint.source().basis(k)[..zr].to_vec()).collect()
            } else {
                joint.kernel().generators().into_iter().map(|g| g[..zr].to_vec()).collect()
            };
            subgroup(&cocycles.carrier, &gens)
        }
    };
    let q = quotient(&cocycles.carrier, &inside)?;
    let representatives = q
        .lifts
        .iter()
        .map(|l| Cochain::from_values(h.clone(), m.clone(), degree, cocycles.include(l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CohomologyGroup {
        degree,
        group: h.clone(),
        module: m.clone(),
        carrier: q.group.clone(),
        cocycles,
        quotient: q,
        representatives,
        lower,
    })
}

/// `H^i(H, M)` computed afresh.
pub fn cohomology(h: &Arc<Subgroup>, m: &Arc<GModule>, degree: usize) -> Result<CohomologyGroup> {
    build(h, m, degree, &CohomologyCache::default())
}

/// Some `ε` with `dε = z`, or `NoSolution`.
pub fn solve_coboundary(z: &Cochain) -> Result<Cochain> {
    if z.degree() == 0 || z.degree() > MAX_DEGREE {
        return Err(Error::DegreeTooHigh(z.degree()));
    }
    solve_with(None, z.group(), z.module(), z)
}

type Key = (Vec<usize>, Vec<i64>, usize);

/// Memoized coboundary matrices and cohomology groups.
#[derive(Debug, Default)]
pub struct CohomologyCache {
    maps: Mutex<HashMap<Key, Arc<AbHom>>>,
    groups: Mutex<HashMap<Key, Arc<CohomologyGroup>>>,
}

impl CohomologyCache {
    fn key(h: &Subgroup, m: &GModule, degree: usize) -> Key {
        (h.members().to_vec(), m.key(), degree)
    }

    pub fn coboundary(&self, h: &Arc<Subgroup>, m: &Arc<GModule>, degree: usize) -> Result<Arc<AbHom>> {
        let key = Self::key(h, m, degree);
        if let Some(d) = self.maps.lock().expect("cache lock").get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(coboundary_map(h, m, degree)?);
        self.maps.lock().expect("cache lock").insert(key, d.clone());
        Ok(d)
    }

    pub fn cohomology(&self, h: &Arc<Subgroup>, m: &Arc<GModule>, degree: usize) -> Result<Arc<CohomologyGroup>> {
        let key = Self::key(h, m, degree);
        if let Some(c) = self.groups.lock().expect("cache lock").get(&key) {
            if *c.module == **m {
                return Ok(c.clone());
            }
        }
        let c = Arc::new(build(h, m, degree, self)?);
        self.groups.lock().expect("cache lock").insert(key, c.clone());
        Ok(c)
    }

    /// Some `ε` with `dε = z`, reusing the cached matrix.
    pub fn solve_coboundary(&self, z: &Cochain) -> Result<Cochain> {
        if z.degree() == 0 || z.degree() > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(z.degree()));
        }
        let d = self.coboundary(z.group(), z.module(), z.degree() - 1)?;
        solve_with(Some(&d), z.group(), z.module(), z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(g: FiniteGroup, n: i64, units: Vec<i64>) -> (Arc<Subgroup>, Arc<GModule>) {
        let g = Arc::new(g);
        let m = Arc::new(GModule::cyclic(g.clone(), n, &units).unwrap());
        (Arc::new(Subgroup::whole(g)), m)
    }

    #[test]
    fn h0_is_fixed_points() {
        let (h, m) = setup(FiniteGroup::cyclic(2), 4, vec![1, 3]);
        let h0 = cohomology(&h, &m, 0).unwrap();
        assert_eq!(h0.carrier.moduli(), &[2]);
        assert_eq!(h0.representatives()[0].values(), &[2]);
    }

    #[test]
    fn h1_of_z2_trivial() {
        let (h, m) = setup(FiniteGroup::cyclic(2), 2, vec![1, 1]);
        let h1 = cohomology(&h, &m, 1).unwrap();
        assert_eq!(h1.carrier.moduli(), &[2]);
    }

    #[test]
    fn h2_of_z2_in_twisted_z4() {
        let (h, m) = setup(FiniteGroup::cyclic(2), 4, vec![1, 3]);
        let h2 = cohomology(&h, &m, 2).unwrap();
        assert_eq!(h2.carrier.moduli(), &[2]);
        let z = Cochain::from_fn(h.clone(), m.clone(), 2, |s| vec![if s == [1, 1] { 2 } else { 0 }]).unwrap();
        assert!(z.coboundary().unwrap().is_zero());
        assert_eq!(h2.reduce(&z).unwrap(), vec![1]);
        assert!(matches!(h2.solve_coboundary(&z), Err(Error::NoSolution)));
        let h3 = cohomology(&h, &m, 3).unwrap();
        assert_eq!(h3.carrier.moduli(), &[2]);
    }

    #[test]
    fn reduce_and_representatives_round_trip() {
        let (h, m) = setup(FiniteGroup::klein_four(), 4, vec![1, 3, 3, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for deg in 1..3 {
            let hc = cohomology(&h, &m, deg).unwrap();
            for x in hc.elements() {
                let rep = hc.representative(&x);
                assert_eq!(hc.reduce(&rep).unwrap(), x);
                let e = Cochain::random(h.clone(), m.clone(), deg - 1, &mut rng).unwrap();
                let shifted = rep.add(&e.coboundary().unwrap()).unwrap();
                assert_eq!(hc.reduce(&shifted).unwrap(), x);
                let dz = e.coboundary().unwrap();
                let eps = hc.solve_coboundary(&dz).unwrap();
                assert_eq!(eps.coboundary().unwrap(), dz);
            }
            let bad = Cochain::random(h.clone(), m.clone(), deg, &mut rng).unwrap();
            if !bad.coboundary().unwrap().is_zero() {
                assert!(matches!(hc.reduce(&bad), Err(Error::NotACocycle)));
            }
        }
    }

    #[test]
    fn cache_returns_same_group() {
        let (h, m) = setup(FiniteGroup::cyclic(2), 4, vec![1, 3]);
        let cache = CohomologyCache::default();
        let a = cache.cohomology(&h, &m, 1).unwrap();
        let b = cache.cohomology(&h, &m, 1).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let z = Cochain::zero(h.clone(), m.clone(), 3).unwrap();
        assert!(cache.solve_coboundary(&z).unwrap().is_zero());
    }
}
