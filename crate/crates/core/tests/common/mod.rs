//! Brute-force oracles and fixture builders shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use ctpair::group::FiniteGroup;
use ctpair::lattice::FiniteAbelianGroup;
use ctpair::module::GModule;

pub fn groups_up_to(order: usize) -> Vec<(&'static str, Arc<FiniteGroup>)> {
    let all = vec![
        ("C1", FiniteGroup::trivial()),
        ("C2", FiniteGroup::cyclic(2)),
        ("C3", FiniteGroup::cyclic(3)),
        ("C4", FiniteGroup::cyclic(4)),
        ("V4", FiniteGroup::klein_four()),
        ("C5", FiniteGroup::cyclic(5)),
        ("C6", FiniteGroup::cyclic(6)),
        ("S3", FiniteGroup::symmetric_three()),
        ("C7", FiniteGroup::cyclic(7)),
        ("C8", FiniteGroup::cyclic(8)),
        ("C2xC4", FiniteGroup::cyclic(2).product(&FiniteGroup::cyclic(4))),
        ("C2^3", FiniteGroup::klein_four().product(&FiniteGroup::cyclic(2))),
        ("D4", FiniteGroup::dihedral(4)),
    ];
    all.into_iter().filter(|(_, g)| g.order() <= order).map(|(n, g)| (n, Arc::new(g))).collect()
}

fn automorphisms(moduli: &[i64]) -> Vec<Vec<Vec<i64>>> {
    match moduli {
        [2] => vec![vec![vec![1]]],
        [3] => vec![vec![vec![1]], vec![vec![2]]],
        [4] => vec![vec![vec![1]], vec![vec![3]]],
        [2, 2] => {
            let mut out = Vec::new();
            for a in 0..16i64 {
                let m = vec![vec![a & 1, (a >> 1) & 1], vec![(a >> 2) & 1, (a >> 3) & 1]];
                if (m[0][0] * m[1][1] - m[0][1] * m[1][0]).rem_euclid(2) == 1 {
                    out.push(m);
                }
            }
            out
        }
        _ => panic!("no automorphism list for {moduli:?}"),
    }
}

/// Every module structure on `Z/2, Z/3, Z/4, (Z/2)²` of order at most `max`.
pub fn modules_up_to(g: &Arc<FiniteGroup>, max: i64) -> Vec<Arc<GModule>> {
    let mut out = Vec::new();
    for moduli in [vec![2], vec![3], vec![4], vec![2, 2]] {
        if moduli.iter().product::<i64>() > max {
            continue;
        }
        let auts = automorphisms(&moduli);
        let n = g.order();
        let total = auts.len().pow(n as u32);
        let mut seen: Vec<GModule> = Vec::new();
        for mut k in 0..total {
            let action: Vec<Vec<Vec<i64>>> = (0..n)
                .map(|_| {
                    let a = auts[k % auts.len()].clone();
                    k /= auts.len();
                    a
                })
                .collect();
            if let Ok(m) = GModule::new(g.clone(), FiniteAbelianGroup::diagonal(moduli.clone()), action) {
                if !seen.contains(&m) {
                    seen.push(m);
                }
            }
        }
        out.extend(seen.into_iter().map(Arc::new));
    }
    out
}

/// Tables of a module's elements, indexed as in `underlying().elements()`.
pub struct ModuleTables {
    pub elements: Vec<Vec<i64>>,
    pub add: Vec<Vec<u8>>,
    pub neg: Vec<u8>,
    /// `act[g][x]`.
    pub act: Vec<Vec<u8>>,
}

impl ModuleTables {
    pub fn new(m: &GModule) -> Self {
        let u = m.underlying();
        let elements: Vec<Vec<i64>> = u.elements().collect();
        let index = |x: &[i64]| elements.iter().position(|y| y.as_slice() == x).expect("element") as u8;
        let add = elements.iter().map(|a| elements.iter().map(|b| index(&u.add(a, b))).collect()).collect();
        let neg = elements.iter().map(|a| index(&u.neg(a))).collect();
        let act = (0..m.group().order()).map(|g| elements.iter().map(|a| index(&m.act(g, a))).collect()).collect();
        ModuleTables { elements, add, neg, act }
    }
}

/// Normalized cochains: functions on `(G∖{e})^k`, stored as element indices.
struct Normalized<'a> {
    g: &'a FiniteGroup,
    t: &'a ModuleTables,
    rest: Vec<usize>,
    /// Position of each group element in `rest`, `None` for the identity.
    pos: Vec<Option<usize>>,
}

impl<'a> Normalized<'a> {
    fn new(g: &'a FiniteGroup, t: &'a ModuleTables) -> Self {
        let rest: Vec<usize> = (0..g.order()).filter(|&x| x != g.identity()).collect();
        let pos = (0..g.order()).map(|x| rest.iter().position(|&y| y == x)).collect();
        Normalized { g, t, rest, pos }
    }

    fn value(&self, f: &[u8], args: &[usize]) -> u8 {
        let mut idx = 0usize;
        for &a in args {
            match self.pos[a] {
                Some(p) => idx = idx * self.rest.len() + p,
                None => return 0,
            }
        }
        f[idx]
    }

    /// Writes `df` into `out`; returns whether it vanishes.
    fn coboundary(&self, k: usize, f: &[u8], out: &mut Vec<u8>, stop_early: bool) -> bool {
        let (r, t) = (self.rest.len(), self.t);
        let count = r.pow(k as u32 + 1);
        out.clear();
        let mut args = vec![0usize; k + 1];
        let mut merged = vec![0usize; k];
        let mut zero = true;
        for slot in 0..count {
            let mut s = slot;
            for a in args.iter_mut().rev() {
                *a = self.rest[s % r];
                s /= r;
            }
            let mut acc = t.act[args[0]][self.value(f, &args[1..]) as usize];
            for i in 0..k {
                merged[..i].copy_from_slice(&args[..i]);
                merged[i] = self.g.mul(args[i], args[i + 1]);
                merged[i + 1..].copy_from_slice(&args[i + 2..]);
                let v = self.value(f, &merged);
                acc = if i % 2 == 0 { t.add[acc as usize][t.neg[v as usize] as usize] } else { t.add[acc as usize][v as usize] };
            }
            let last = self.value(f, &args[..k]);
            acc = if k % 2 == 0 { t.add[acc as usize][t.neg[last as usize] as usize] } else { t.add[acc as usize][last as usize] };
            out.push(acc);
            if acc != 0 {
                zero = false;
                if stop_early {
                    return false;
                }
            }
        }
        zero
    }
}

fn all_cochains(size: usize, slots: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = size.pow(slots as u32);
    (0..total).map(move |mut k| {
        (0..slots)
            .map(|_| {
                let v = (k % size) as u8;
                k /= size;
                v
            })
            .collect()
    })
}

/// `|H^k(G, M)[t]|` for `t = 1..=exponent`, from the normalized complex by enumeration.
pub fn brute_torsion_profile(g: &FiniteGroup, m: &GModule, k: usize) -> Vec<u128> {
    let t = ModuleTables::new(m);
    let size = t.elements.len();
    let r = g.order() - 1;
    let zero_of = |slots: usize| vec![0u8; slots];
    let n = Normalized::new(g, &t);
    let mut buf = Vec::new();
    let boundaries: HashSet<Vec<u8>> = if k == 0 {
        HashSet::from([zero_of(1)])
    } else {
        all_cochains(size, r.pow(k as u32 - 1))
            .map(|f| {
                n.coboundary(k - 1, &f, &mut buf, false);
                buf.clone()
            })
            .collect()
    };
    let slots = r.pow(k as u32);
    let cocycles: Vec<Vec<u8>> = all_cochains(size, slots).filter(|f| n.coboundary(k, f, &mut buf, true)).collect();
    let exponent = m.exponent();
    let scale = |f: &[u8], s: i64| -> Vec<u8> {
        f.iter()
            .map(|&x| {
                let mut acc = 0u8;
                for _ in 0..s {
                    acc = t.add[acc as usize][x as usize];
                }
                acc
            })
            .collect()
    };
    (1..=exponent)
        .map(|s| {
            let hits = cocycles.iter().filter(|z| boundaries.contains(&scale(z, s))).count();
            (hits / boundaries.len()) as u128
        })
        .collect()
}

/// `|A[t]|` for `t = 1..=exponent` from invariant factors.
pub fn torsion_profile(a: &FiniteAbelianGroup, exponent: i64) -> Vec<u128> {
    (1..=exponent)
        .map(|s| a.moduli().iter().map(|&d| num_integer::gcd(d, s) as u128).product())
        .collect()
}
