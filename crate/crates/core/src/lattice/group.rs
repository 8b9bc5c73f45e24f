//! Finite abelian groups in diagonal presentation, homomorphisms, subgroups.

use std::sync::{Arc, OnceLock};

use num_integer::Integer;

use super::linear::{LinearSolver, ModSolver};
use crate::error::{Error, Result};

/// `Z/d_1 + ... + Z/d_k` with every `d_i >= 2`.
///
/// Groups built by [`subgroup`], [`quotient`] and cohomology are in
/// invariant-factor form (`d_i | d_{i+1}`). Direct sums and cochain spaces keep
/// the diagonal presentation they were built from; [`Self::invariant_factors`]
/// is the canonical form used for comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    moduli: Vec<i64>,
}

impl FiniteAbelianGroup {
    /// Group from invariant factors; each must be at least 2 and divide the next.
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::InvalidGroup("invariant factors must be >= 2".into()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidGroup("invariant factors must form a divisor chain".into()));
        }
        Ok(FiniteAbelianGroup { moduli: factors })
    }

    /// Diagonal presentation; factors equal to 1 are dropped.
    pub fn diagonal(moduli: Vec<i64>) -> Self {
        assert!(moduli.iter().all(|&d| d >= 1), "moduli must be positive");
        FiniteAbelianGroup { moduli: moduli.into_iter().filter(|&d| d > 1).collect() }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::diagonal(vec![n])
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { moduli: Vec::new() }
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    /// Group order, saturating at `u128::MAX`.
    pub fn order(&self) -> u128 {
        self.moduli.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }

    pub fn exponent(&self) -> i64 {
        self.moduli.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn invariant_factors(&self) -> Vec<i64> {
        let rows: Vec<Vec<i64>> = (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| if i == j { self.moduli[i] } else { 0 }).collect())
            .collect();
        LinearSolver::new(&rows, self.rank())
            .diag_full()
            .into_iter()
            .filter(|&d| d > 1)
            .collect()
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        FiniteAbelianGroup { moduli }
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.rank(), "element has wrong length");
        v.iter().zip(&self.moduli).map(|(x, m)| x.mod_floor(m)).collect()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.rank() && v.iter().zip(&self.moduli).all(|(x, m)| (0..*m).contains(x))
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x + y).mod_floor(m)).collect()
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x - y).mod_floor(m)).collect()
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.moduli).map(|(x, m)| (-x).mod_floor(m)).collect()
    }

    pub fn scale(&self, k: i64, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.moduli).map(|(x, m)| (k.mod_floor(m) * x).mod_floor(m)).collect()
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Order of an element.
    pub fn element_order(&self, a: &[i64]) -> i64 {
        a.iter().zip(&self.moduli).fold(1, |acc, (x, m)| acc.lcm(&(m / x.gcd(m))))
    }

    /// Position in the fixed element ordering (first coordinate varies fastest).
    pub fn index_of(&self, a: &[i64]) -> usize {
        let mut idx = 0usize;
        for (x, m) in a.iter().zip(&self.moduli).rev() {
            idx = idx * (*m as usize) + (x.mod_floor(m) as usize);
        }
        idx
    }

    pub fn element(&self, mut idx: usize) -> Vec<i64> {
        self.moduli
            .iter()
            .map(|&m| {
                let x = (idx % m as usize) as i64;
                idx /= m as usize;
                x
            })
            .collect()
    }

    /// All elements in the fixed ordering. Only sensible for small groups.
    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let n = usize::try_from(self.order()).expect("group too large to enumerate");
        (0..n).map(move |i| self.element(i))
    }

    /// Standard basis vector `e_i`.
    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut v = self.zero();
        v[i] = 1;
        v
    }
}

/// Homomorphism given by an integer matrix of shape `target.rank x source.rank`.
#[derive(Clone, Debug)]
pub struct AbHom {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    matrix: Vec<Vec<i64>>,
    solver: OnceLock<Arc<ModSolver>>,
}

impl PartialEq for AbHom {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.matrix == other.matrix
    }
}

impl Eq for AbHom {}

impl AbHom {
    /// Matrix rows index target coordinates. Entries are reduced and the map is
    /// checked for well-definedness.
    pub fn new(source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::NotWellDefined("matrix has the wrong shape".into()));
        }
        let matrix: Vec<Vec<i64>> = matrix
            .into_iter()
            .zip(target.moduli())
            .map(|(r, m)| r.into_iter().map(|x| x.mod_floor(m)).collect())
            .collect();
        for (j, d) in source.moduli().iter().enumerate() {
            for (i, m) in target.moduli().iter().enumerate() {
                if (d * matrix[i][j]) % m != 0 {
                    return Err(Error::NotWellDefined(format!(
                        "generator {j} of order {d} maps to an element of order not dividing {d}"
                    )));
                }
            }
        }
        Ok(AbHom { source, target, matrix, solver: OnceLock::new() })
    }

    /// Homomorphism sending the `j`-th source generator to `images[j]`.
    pub fn from_images(source: FiniteAbelianGroup, target: FiniteAbelianGroup, images: &[Vec<i64>]) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::NotWellDefined("one image per source generator is required".into()));
        }
        let matrix = (0..target.rank()).map(|i| images.iter().map(|c| c[i]).collect()).collect();
        Self::new(source, target, matrix)
    }

    pub fn zero(source: FiniteAbelianGroup, target: FiniteAbelianGroup) -> Self {
        let matrix = vec![vec![0; source.rank()]; target.rank()];
        AbHom { source, target, matrix, solver: OnceLock::new() }
    }

    pub fn identity(g: FiniteAbelianGroup) -> Self {
        let n = g.rank();
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        AbHom { source: g.clone(), target: g, matrix, solver: OnceLock::new() }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Image of the `j`-th source generator.
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|r| r[j]).collect()
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.source.rank(), "element of the wrong group");
        self.matrix
            .iter()
            .zip(self.target.moduli())
            .map(|(row, m)| {
                let mut acc = 0i64;
                for (a, b) in row.iter().zip(x) {
                    acc = (acc + a * b).mod_floor(m);
                }
                acc
            })
            .collect()
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AbHom) -> AbHom {
        assert_eq!(g.target, self.source, "composition over mismatched groups");
        let images: Vec<Vec<i64>> = (0..g.source.rank()).map(|j| self.apply(&g.column(j))).collect();
        AbHom::from_images(g.source.clone(), self.target.clone(), &images).expect("composite is well defined")
    }

    pub fn add(&self, other: &AbHom) -> AbHom {
        assert!(self.source == other.source && self.target == other.target);
        let images: Vec<Vec<i64>> = (0..self.source.rank())
            .map(|j| self.target.add(&self.column(j), &other.column(j)))
            .collect();
        AbHom::from_images(self.source.clone(), self.target.clone(), &images).unwrap()
    }

    pub fn neg(&self) -> AbHom {
        let images: Vec<Vec<i64>> = (0..self.source.rank()).map(|j| self.target.neg(&self.column(j))).collect();
        AbHom::from_images(self.source.clone(), self.target.clone(), &images).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Solver for the congruence system after embedding the target into
    /// `(Z/e)^m`, `e` its exponent, via `x_i ↦ (e/b_i) x_i`.
    fn solver(&self) -> &ModSolver {
        self.solver.get_or_init(|| {
            let e = self.target.exponent();
            let rows: Vec<Vec<i64>> = self
                .matrix
                .iter()
                .zip(self.target.moduli())
                .map(|(r, b)| r.iter().map(|x| x * (e / b)).collect())
                .collect();
            Arc::new(ModSolver::new(&rows, self.source.rank(), e))
        })
    }

    fn embed_target(&self, b: &[i64]) -> Vec<i64> {
        let e = self.target.exponent();
        b.iter().zip(self.target.moduli()).map(|(x, m)| x * (e / m)).collect()
    }

    /// Some `x` with `f(x) = b`.
    pub fn solve(&self, b: &[i64]) -> Result<Vec<i64>> {
        let b = self.target.reduce(b);
        if self.source.rank() == 0 {
            return if self.target.is_zero(&b) { Ok(Vec::new()) } else { Err(Error::NoSolution) };
        }
        if self.target.rank() == 0 {
            return Ok(self.source.zero());
        }
        self.solver().solve(&self.embed_target(&b), self.source.moduli()).ok_or(Error::NoSolution)
    }

    pub fn kernel(&self) -> SubgroupPresentation {
        if self.target.rank() == 0 || self.source.rank() == 0 {
            return SubgroupPresentation::whole(&self.source);
        }
        let gens = self.solver().kernel(self.source.moduli());
        subgroup(&self.source, &gens)
    }

    pub fn image(&self) -> SubgroupPresentation {
        let gens: Vec<Vec<i64>> = (0..self.source.rank()).map(|j| self.column(j)).collect();
        subgroup(&self.target, &gens)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().carrier.order() == self.target.order()
    }
}

/// A subgroup carried as an injective map from its own invariant-factor group.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    pub ambient: FiniteAbelianGroup,
    pub carrier: FiniteAbelianGroup,
    pub inclusion: AbHom,
}

impl SubgroupPresentation {
    pub fn whole(g: &FiniteAbelianGroup) -> Self {
        let gens: Vec<Vec<i64>> = (0..g.rank()).map(|i| g.basis(i)).collect();
        subgroup(g, &gens)
    }

    pub fn trivial(g: &FiniteAbelianGroup) -> Self {
        SubgroupPresentation {
            ambient: g.clone(),
            carrier: FiniteAbelianGroup::trivial(),
            inclusion: AbHom::zero(FiniteAbelianGroup::trivial(), g.clone()),
        }
    }

    pub fn order(&self) -> u128 {
        self.carrier.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.carrier.is_trivial()
    }

    pub fn is_whole(&self) -> bool {
        self.carrier.order() == self.ambient.order()
    }

    /// Ambient images of the carrier generators.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        (0..self.carrier.rank()).map(|j| self.inclusion.column(j)).collect()
    }

    pub fn include(&self, x: &[i64]) -> Vec<i64> {
        self.inclusion.apply(x)
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        self.inclusion.solve(y).is_ok()
    }

    /// Carrier coordinates of an ambient element of the subgroup.
    pub fn coordinates(&self, y: &[i64]) -> Result<Vec<i64>> {
        self.inclusion.solve(y)
    }

    pub fn elements(&self) -> Vec<Vec<i64>> {
        self.carrier.elements().map(|x| self.include(&x)).collect()
    }

    pub fn is_subgroup_of(&self, other: &SubgroupPresentation) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(Error::MismatchedAmbient);
        }
        Ok(self.generators().iter().all(|g| other.contains(g)))
    }

    pub fn same_as(&self, other: &SubgroupPresentation) -> Result<bool> {
        Ok(self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }

    pub fn intersect(&self, other: &SubgroupPresentation) -> Result<SubgroupPresentation> {
        if self.ambient != other.ambient {
            return Err(Error::MismatchedAmbient);
        }
        let inner = preimage(&other.inclusion, self)?;
        Ok(image(&other.inclusion, &inner))
    }

    pub fn sum(&self, other: &SubgroupPresentation) -> Result<SubgroupPresentation> {
        if self.ambient != other.ambient {
            return Err(Error::MismatchedAmbient);
        }
        let mut gens = self.generators();
        gens.extend(other.generators());
        Ok(subgroup(&self.ambient, &gens))
    }
}

/// Subgroup generated by `generators`.
pub fn subgroup(ambient: &FiniteAbelianGroup, generators: &[Vec<i64>]) -> SubgroupPresentation {
    let mut gens: Vec<Vec<i64>> = Vec::new();
    for g in generators {
        let g = ambient.reduce(g);
        if !ambient.is_zero(&g) && !gens.contains(&g) {
            gens.push(g);
        }
    }
    if gens.is_empty() {
        return SubgroupPresentation::trivial(ambient);
    }
    let r = gens.len();
    let n = ambient.rank();
    let orders: Vec<i64> = gens.iter().map(|g| ambient.element_order(g)).collect();
    // Relations among the generators: kernel of [G | diag(a)].
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut row: Vec<i64> = gens.iter().map(|g| g[i]).collect();
            row.extend((0..n).map(|k| if k == i { ambient.moduli()[i] } else { 0 }));
            row
        })
        .collect();
    let mut relations = LinearSolver::new(&rows, r + n).kernel(r, &orders);
    for (j, &o) in orders.iter().enumerate() {
        let mut v = vec![0; r];
        v[j] = o;
        relations.push(v);
    }
    relations.retain(|v| v.iter().any(|&x| x != 0));
    // Smith form of the relation matrix (r x k) gives the carrier.
    let rel_rows: Vec<Vec<i64>> = (0..r).map(|i| relations.iter().map(|v| v[i]).collect()).collect();
    let smith = LinearSolver::new(&rel_rows, relations.len());
    let diag = smith.diag_full();
    let kept: Vec<usize> = (0..r).filter(|&i| diag[i] > 1).collect();
    let carrier = FiniteAbelianGroup::new(kept.iter().map(|&i| diag[i]).collect()).expect("Smith diagonal is a chain");
    let coeffs = smith.u_inv_cols(&kept, &orders);
    let images: Vec<Vec<i64>> = coeffs
        .iter()
        .map(|c| {
            let mut acc = ambient.zero();
            for (cj, g) in c.iter().zip(&gens) {
                acc = ambient.add(&acc, &ambient.scale(*cj, g));
            }
            acc
        })
        .collect();
    let inclusion = AbHom::from_images(carrier.clone(), ambient.clone(), &images).expect("inclusion is well defined");
    SubgroupPresentation { ambient: ambient.clone(), carrier, inclusion }
}

/// Quotient `ambient / S` with its projection and lifts of the quotient generators.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteAbelianGroup,
    pub projection: AbHom,
    pub lifts: Vec<Vec<i64>>,
}

impl Quotient {
    pub fn lift(&self, q: &[i64]) -> Vec<i64> {
        let amb = self.projection.source();
        let mut acc = amb.zero();
        for (c, l) in q.iter().zip(&self.lifts) {
            acc = amb.add(&acc, &amb.scale(*c, l));
        }
        acc
    }
}

pub fn quotient(ambient: &FiniteAbelianGroup, s: &SubgroupPresentation) -> Result<Quotient> {
    if &s.ambient != ambient {
        return Err(Error::MismatchedAmbient);
    }
    let n = ambient.rank();
    if n == 0 {
        return Ok(Quotient {
            group: FiniteAbelianGroup::trivial(),
            projection: AbHom::zero(ambient.clone(), FiniteAbelianGroup::trivial()),
            lifts: Vec::new(),
        });
    }
    let gens = s.generators();
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut row: Vec<i64> = (0..n).map(|k| if k == i { ambient.moduli()[i] } else { 0 }).collect();
            row.extend(gens.iter().map(|g| g[i]));
            row
        })
        .collect();
    let smith = LinearSolver::new(&rows, n + gens.len());
    let diag = smith.diag_full();
    let kept: Vec<usize> = (0..n).filter(|&i| diag[i] > 1).collect();
    let qmod: Vec<i64> = kept.iter().map(|&i| diag[i]).collect();
    let group = FiniteAbelianGroup::new(qmod.clone()).expect("Smith diagonal is a chain");
    let proj_rows = smith.u_rows(&kept, &qmod);
    let projection = AbHom::new(ambient.clone(), group.clone(), proj_rows).expect("projection is well defined");
    let lifts = smith.u_inv_cols(&kept, ambient.moduli());
    Ok(Quotient { group, projection, lifts })
}

/// `{x : f(x) ∈ S}`.
pub fn preimage(f: &AbHom, s: &SubgroupPresentation) -> Result<SubgroupPresentation> {
    if f.target() != &s.ambient {
        return Err(Error::MismatchedAmbient);
    }
    let q = quotient(f.target(), s)?;
    Ok(q.projection.compose(f).kernel())
}

/// `f(S)`.
pub fn image(f: &AbHom, s: &SubgroupPresentation) -> SubgroupPresentation {
    assert_eq!(f.source(), &s.ambient, "image of a subgroup of another group");
    let gens: Vec<Vec<i64>> = s.generators().iter().map(|g| f.apply(g)).collect();
    subgroup(f.target(), &gens)
}

/// Bilinear map `A x B -> Z/N` given by its values on generator pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub left: FiniteAbelianGroup,
    pub right: FiniteAbelianGroup,
    pub modulus: i64,
    pub table: Vec<Vec<i64>>,
}

impl BilinearForm {
    pub fn new(left: FiniteAbelianGroup, right: FiniteAbelianGroup, modulus: i64, table: Vec<Vec<i64>>) -> Result<Self> {
        if table.len() != left.rank() || table.iter().any(|r| r.len() != right.rank()) {
            return Err(Error::NotBilinear("table has the wrong shape".into()));
        }
        let table: Vec<Vec<i64>> =
            table.into_iter().map(|r| r.into_iter().map(|x| x.mod_floor(&modulus)).collect()).collect();
        for (i, a) in left.moduli().iter().enumerate() {
            for (j, b) in right.moduli().iter().enumerate() {
                if (a * table[i][j]) % modulus != 0 || (b * table[i][j]) % modulus != 0 {
                    return Err(Error::NotBilinear(format!("entry ({i},{j}) is not killed by the generator orders")));
                }
            }
        }
        Ok(BilinearForm { left, right, modulus, table })
    }

    pub fn eval(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0i64;
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                acc = (acc + x * y % self.modulus * self.table[i][j]).mod_floor(&self.modulus);
            }
        }
        acc
    }

    pub fn transpose(&self) -> BilinearForm {
        let table = (0..self.right.rank()).map(|j| (0..self.left.rank()).map(|i| self.table[i][j]).collect()).collect();
        BilinearForm { left: self.right.clone(), right: self.left.clone(), modulus: self.modulus, table }
    }

    /// `b ↦ (P(s_k, b))_k` as a homomorphism into `(Z/N)^k`.
    fn against(&self, gens: &[Vec<i64>]) -> AbHom {
        let target = FiniteAbelianGroup::diagonal(vec![self.modulus; gens.len()]);
        let images: Vec<Vec<i64>> =
            (0..self.right.rank()).map(|j| gens.iter().map(|s| self.eval(s, &self.right.basis(j))).collect()).collect();
        AbHom::from_images(self.right.clone(), FiniteAbelianGroup::diagonal(target.moduli().to_vec()), &images)
            .expect("bilinear values define a homomorphism")
    }

    pub fn left_kernel(&self) -> SubgroupPresentation {
        self.transpose().right_kernel()
    }

    pub fn right_kernel(&self) -> SubgroupPresentation {
        annihilator(self, &SubgroupPresentation::whole(&self.left)).expect("whole group has matching ambient")
    }

    pub fn is_perfect(&self) -> bool {
        self.left.order() == self.right.order() && self.left_kernel().is_trivial() && self.right_kernel().is_trivial()
    }
}

/// `{b : P(s, b) = 0 for all s in S}`.
pub fn annihilator(p: &BilinearForm, s: &SubgroupPresentation) -> Result<SubgroupPresentation> {
    if s.ambient != p.left {
        return Err(Error::MismatchedAmbient);
    }
    let gens = s.generators();
    if gens.is_empty() || p.right.rank() == 0 {
        return Ok(SubgroupPresentation::whole(&p.right));
    }
    Ok(p.against(&gens).kernel())
}
