//! Integer linear systems solved through a cached Smith form.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use num_integer::Integer;

use super::snf::{replay, smith_normal_form, smith_normal_form_lean, IntMatrix, Smith};
use crate::scalar::{Overflow, Scalar};

/// Run a computation on machine words, redoing it over big integers on overflow.
pub(crate) fn exact<R>(
    word: impl FnOnce() -> Result<R, Overflow>,
    big: impl FnOnce() -> Result<R, Overflow>,
) -> R {
    word().or_else(|_| big()).expect("big-integer arithmetic cannot overflow")
}

fn kernel_basis<T: Scalar>(s: &Smith<T>, keep: usize, moduli: &[i64]) -> Vec<Vec<i64>> {
    let n = s.v.rows();
    (s.rank..n)
        .map(|j| {
            (0..keep)
                .map(|i| {
                    let x = s.v.get(i, j);
                    match moduli.get(i) {
                        Some(&m) => x.residue(m),
                        None => x.to_i64().expect("unreduced kernel entry fits i64"),
                    }
                })
                .collect()
        })
        .collect()
}

fn solve_with<T: Scalar>(
    s: &Smith<T>,
    b: &[i64],
    moduli: &[i64],
) -> Result<Option<Vec<i64>>, Overflow> {
    let bt: Vec<T> = b.iter().map(|&x| T::of(x)).collect();
    let w = s.u.mul_vec(&bt)?;
    let n = s.v.rows();
    let mut y = vec![T::zero(); n];
    for (i, wi) in w.iter().enumerate() {
        if i < s.rank {
            let (q, r) = num_integer::Integer::div_mod_floor(wi, &s.diag[i]);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !wi.is_zero() {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y)?;
    Ok(Some(
        moduli.iter().zip(x.iter()).map(|(&m, xi)| xi.residue(m)).collect(),
    ))
}

#[derive(Clone, Debug)]
enum Form {
    Word(Smith<i64>),
    Big(Smith<BigInt>),
}

/// Solver for `A x = b` over the integers, with `A` fixed.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    rows: usize,
    cols: usize,
    form: Form,
}

impl LinearSolver {
    pub fn new(rows: &[Vec<i64>], cols: usize) -> Self {
        let form = match smith_normal_form(&IntMatrix::<i64>::from_rows(rows, cols)) {
            Ok(s) => Form::Word(s),
            Err(Overflow) => Form::Big(
                smith_normal_form(&IntMatrix::<BigInt>::from_rows(rows, cols))
                    .expect("big-integer arithmetic cannot overflow"),
            ),
        };
        LinearSolver { rows: rows.len(), cols, form }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// A solution `x` of `A x = b`, with the first `moduli.len()` coordinates
    /// reduced modulo `moduli`; `None` when the system has no integer solution.
    pub fn solve(&self, b: &[i64], moduli: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(b.len(), self.rows);
        match &self.form {
            Form::Word(s) => exact(|| solve_with(s, b, moduli), || solve_with(&s.convert::<BigInt>(), b, moduli)),
            Form::Big(s) => solve_with(s, b, moduli).expect("no overflow"),
        }
    }

    /// Basis of the integer kernel, truncated to the first `keep` coordinates
    /// and reduced modulo `moduli` where given.
    pub fn kernel(&self, keep: usize, moduli: &[i64]) -> Vec<Vec<i64>> {
        match &self.form {
            Form::Word(s) => kernel_basis(s, keep, moduli),
            Form::Big(s) => kernel_basis(s, keep, moduli),
        }
    }

    /// Nonzero diagonal entries of the Smith form.
    pub fn elementary_divisors(&self) -> Vec<i64> {
        match &self.form {
            Form::Word(s) => s.diag[..s.rank].to_vec(),
            Form::Big(s) => s.diag[..s.rank].iter().map(|x| x.residue(i64::MAX)).collect(),
        }
    }

    /// Rows `i` of `U` (reduced mod `moduli[k]`) for the listed row indices.
    pub(crate) fn u_rows(&self, which: &[usize], moduli: &[i64]) -> Vec<Vec<i64>> {
        fn go<T: Scalar>(s: &Smith<T>, which: &[usize], moduli: &[i64]) -> Vec<Vec<i64>> {
            which
                .iter()
                .zip(moduli)
                .map(|(&i, &m)| s.u.row(i).iter().map(|x| x.residue(m)).collect())
                .collect()
        }
        match &self.form {
            Form::Word(s) => go(s, which, moduli),
            Form::Big(s) => go(s, which, moduli),
        }
    }

    /// Columns `j` of `U^{-1}`, each reduced modulo the matching `moduli`.
    pub(crate) fn u_inv_cols(&self, which: &[usize], moduli: &[i64]) -> Vec<Vec<i64>> {
        fn go<T: Scalar>(s: &Smith<T>, which: &[usize], moduli: &[i64]) -> Vec<Vec<i64>> {
            which
                .iter()
                .map(|&j| s.u_inv.column(j).iter().zip(moduli).map(|(x, &m)| x.residue(m)).collect())
                .collect()
        }
        match &self.form {
            Form::Word(s) => go(s, which, moduli),
            Form::Big(s) => go(s, which, moduli),
        }
    }

    pub(crate) fn diag_full(&self) -> Vec<i64> {
        match &self.form {
            Form::Word(s) => s.diag.clone(),
            Form::Big(s) => s.diag.iter().map(|x| x.to_i64().expect("invariant factor fits i64")).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_detects_inconsistency() {
        // 2x = 4 mod 8, written as [2 | 8] (x, y) = 4
        let s = LinearSolver::new(&[vec![2, 8]], 2);
        let x = s.solve(&[4], &[8]).unwrap();
        assert_eq!((2 * x[0]) % 8, 4);
        assert!(s.solve(&[3], &[8]).is_none());
    }

    #[test]
    fn kernel_spans_relations() {
        let s = LinearSolver::new(&[vec![1, 1, 1]], 3);
        let k = s.kernel(3, &[]);
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
    }
}

fn mod_solve_with<T: Scalar>(
    s: &Smith<T>,
    e: i64,
    b: &[i64],
    moduli: &[i64],
) -> Result<Option<Vec<i64>>, Overflow> {
    let mut w: Vec<T> = b.iter().map(|&x| T::of(x)).collect();
    replay(&s.ops, &mut w)?;
    let n = s.v.rows();
    let mut y = vec![T::zero(); n];
    for (i, wi) in w.iter().enumerate() {
        let wi = wi.residue(e);
        if i < s.rank {
            let di = s.diag[i].residue(e);
            let g = di.gcd(&e);
            if wi % g != 0 {
                return Ok(None);
            }
            let ep = e / g;
            let inv = mod_inverse((di / g) % ep, ep);
            y[i] = T::of(((wi / g) % ep * inv) % ep);
        } else if wi != 0 {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y)?;
    Ok(Some(moduli.iter().zip(x.iter()).map(|(&m, xi)| xi.residue(m)).collect()))
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let ext = a.extended_gcd(&m);
    debug_assert_eq!(ext.gcd, 1);
    ext.x.mod_floor(&m)
}

fn mod_kernel_with<T: Scalar>(s: &Smith<T>, e: i64, moduli: &[i64]) -> Vec<Vec<i64>> {
    let n = s.v.rows();
    (0..n)
        .filter_map(|j| {
            let scale = if j < s.rank { e / s.diag[j].residue(e).gcd(&e) } else { 1 };
            if scale == 0 {
                return None;
            }
            let col: Vec<i64> = (0..n)
                .zip(moduli)
                .map(|(i, &m)| (s.v.get(i, j).residue(m) * (scale % m)).mod_floor(&m))
                .collect();
            col.iter().any(|&x| x != 0).then_some(col)
        })
        .collect()
}

/// Solver for `F x ≡ b (mod e)` with a single modulus `e`, from the Smith
/// form of `F` alone. Scalar multiplication by `e` commutes with `U`, so the
/// congruence diagonalizes.
#[derive(Clone, Debug)]
pub struct ModSolver {
    e: i64,
    rows: usize,
    form: Form,
}

impl ModSolver {
    pub fn new(rows: &[Vec<i64>], cols: usize, e: i64) -> Self {
        let form = match smith_normal_form_lean(&IntMatrix::<i64>::from_rows(rows, cols)) {
            Ok(s) => Form::Word(s),
            Err(Overflow) => Form::Big(
                smith_normal_form_lean(&IntMatrix::<BigInt>::from_rows(rows, cols))
                    .expect("big-integer arithmetic cannot overflow"),
            ),
        };
        ModSolver { e, rows: rows.len(), form }
    }

    pub fn solve(&self, b: &[i64], moduli: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(b.len(), self.rows);
        match &self.form {
            Form::Word(s) => exact(
                || mod_solve_with(s, self.e, b, moduli),
                || mod_solve_with(&s.convert::<BigInt>(), self.e, b, moduli),
            ),
            Form::Big(s) => mod_solve_with(s, self.e, b, moduli).expect("no overflow"),
        }
    }

    /// Generators of `{x : F x ≡ 0 (mod e)}` reduced modulo `moduli`.
    pub fn kernel(&self, moduli: &[i64]) -> Vec<Vec<i64>> {
        match &self.form {
            Form::Word(s) => mod_kernel_with(s, self.e, moduli),
            Form::Big(s) => mod_kernel_with(s, self.e, moduli),
        }
    }
}
