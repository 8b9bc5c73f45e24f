//! Smith normal form over any [`Scalar`].


use crate::scalar::{Overflow, Scalar};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m.data[i * cols + j] = T::of(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, Overflow> {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    let p = a.mul_checked(other.get(k, j))?;
                    out.data[idx] = out.data[idx].add_checked(&p)?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, Overflow> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![T::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                let a = self.get(i, j);
                if a.is_zero() || x.is_zero() {
                    continue;
                }
                *o = o.add_checked(&a.mul_checked(x)?)?;
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src], restricted to columns `from..`.
    fn row_sub(&mut self, dst: usize, src: usize, q: &T, from: usize) -> Result<(), Overflow> {
        for j in from..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if s.is_zero() {
                continue;
            }
            let idx = dst * self.cols + j;
            self.data[idx] = self.data[idx].sub_mul(q, &s)?;
        }
        Ok(())
    }

    /// col[dst] -= q * col[src], restricted to rows `from..`.
    fn col_sub(&mut self, dst: usize, src: usize, q: &T, from: usize) -> Result<(), Overflow> {
        for i in from..self.rows {
            let s = self.data[i * self.cols + src].clone();
            if s.is_zero() {
                continue;
            }
            let idx = i * self.cols + dst;
            self.data[idx] = self.data[idx].sub_mul(q, &s)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -self.data[idx].clone();
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let idx = i * self.cols + c;
            self.data[idx] = -self.data[idx].clone();
        }
    }

    pub fn convert<S: Scalar>(&self) -> IntMatrix<S> {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|v| {
                    let s = v.to_i128().expect("entry fits i128");
                    S::from_i128(s).expect("target scalar holds entry")
                })
                .collect(),
        }
    }
}

/// Elementary row operation recorded during elimination.
#[derive(Clone, Debug)]
pub enum RowOp<T> {
    Swap(usize, usize),
    /// `row[dst] -= q * row[src]`
    Sub { dst: usize, src: usize, q: T },
    Negate(usize),
}

/// Apply `U` (the product of the logged operations) to a vector.
pub fn replay<T: Scalar>(ops: &[RowOp<T>], v: &mut [T]) -> Result<(), Overflow> {
    for op in ops {
        match op {
            RowOp::Swap(a, b) => v.swap(*a, *b),
            RowOp::Sub { dst, src, q } => {
                if !v[*src].is_zero() {
                    v[*dst] = v[*dst].sub_mul(q, &v[*src])?;
                }
            }
            RowOp::Negate(r) => v[*r] = -v[*r].clone(),
        }
    }
    Ok(())
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
///
/// `U` and its inverse are materialized only by [`smith_normal_form`]; the
/// lean variant keeps the operation log alone.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub ops: Vec<RowOp<T>>,
    pub u: IntMatrix<T>,
    pub u_inv: IntMatrix<T>,
    pub v: IntMatrix<T>,
    /// Diagonal entries, length `min(rows, cols)`, nonnegative.
    pub diag: Vec<T>,
    pub rank: usize,
}

impl<T: Scalar> Smith<T> {
    pub fn d_matrix(&self) -> IntMatrix<T> {
        let mut d = IntMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    pub fn convert<S: Scalar>(&self) -> Smith<S> {
        Smith {
            ops: self
                .ops
                .iter()
                .map(|op| match op {
                    RowOp::Swap(a, b) => RowOp::Swap(*a, *b),
                    RowOp::Sub { dst, src, q } => {
                        RowOp::Sub { dst: *dst, src: *src, q: S::from_i128(q.to_i128().unwrap()).unwrap() }
                    }
                    RowOp::Negate(r) => RowOp::Negate(*r),
                })
                .collect(),
            u: self.u.convert(),
            u_inv: self.u_inv.convert(),
            v: self.v.convert(),
            diag: self.diag.iter().map(|x| S::from_i128(x.to_i128().unwrap()).unwrap()).collect(),
            rank: self.rank,
        }
    }
}

fn smallest_nonzero<T: Scalar>(d: &IntMatrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let a = d.get(i, j);
            if a.is_zero() {
                continue;
            }
            let abs = a.abs();
            if best.as_ref().map_or(true, |b| abs < b.2) {
                let one = abs.is_one();
                best = Some((i, j, abs));
                if one {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

/// Smith normal form with transformation matrices. Fails only on overflow of `T`.
pub fn smith_normal_form<T: Scalar>(a: &IntMatrix<T>) -> Result<Smith<T>, Overflow> {
    smith_core(a, true)
}

/// Smith normal form keeping `V` and the row-operation log, but not `U`.
pub fn smith_normal_form_lean<T: Scalar>(a: &IntMatrix<T>) -> Result<Smith<T>, Overflow> {
    smith_core(a, false)
}

fn smith_core<T: Scalar>(a: &IntMatrix<T>, track_u: bool) -> Result<Smith<T>, Overflow> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let um = if track_u { m } else { 0 };
    let mut u = IntMatrix::<T>::identity(um);
    let mut u_inv = IntMatrix::<T>::identity(um);
    let mut ops: Vec<RowOp<T>> = Vec::new();
    let mut v = IntMatrix::<T>::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pi);
        swap_u(&mut u, &mut u_inv, &mut ops, t, pi, track_u);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            let p = d.get(t, t).clone();
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(&p);
                d.row_sub(i, t, &q, t)?;
                sub_u(&mut u, &mut u_inv, &mut ops, i, t, q, track_u)?;
                if !d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(&p);
                d.col_sub(j, t, &q, t)?;
                v.col_sub(j, t, &q, 0)?;
                if !d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let mut best: Option<(bool, usize, T)> = None;
                for i in t + 1..m {
                    let x = d.get(i, t);
                    if !x.is_zero() && best.as_ref().map_or(true, |b| x.abs() < b.2) {
                        best = Some((true, i, x.abs()));
                    }
                }
                for j in t + 1..n {
                    let x = d.get(t, j);
                    if !x.is_zero() && best.as_ref().map_or(true, |b| x.abs() < b.2) {
                        best = Some((false, j, x.abs()));
                    }
                }
                let (is_row, k, _) = best.expect("dirty implies a nonzero remainder");
                if is_row {
                    d.swap_rows(t, k);
                    swap_u(&mut u, &mut u_inv, &mut ops, t, k, track_u);
                } else {
                    d.swap_cols(t, k);
                    v.swap_cols(t, k);
                }
                continue;
            }
            let mut offender = None;
            'search: for i in t + 1..m {
                for j in t + 1..n {
                    if !d.get(i, j).mod_floor(&p).is_zero() {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // row t += row i
                    let minus_one = -T::one();
                    d.row_sub(t, i, &minus_one, t)?;
                    sub_u(&mut u, &mut u_inv, &mut ops, t, i, minus_one, track_u)?;
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            ops.push(RowOp::Negate(t));
            if track_u {
                u.negate_row(t);
                u_inv.negate_col(t);
            }
        }
        t += 1;
    }
    let diag = (0..m.min(n)).map(|i| d.get(i, i).clone()).collect();
    Ok(Smith { ops, u, u_inv, v, diag, rank: t })
}

fn swap_u<T: Scalar>(
    u: &mut IntMatrix<T>,
    u_inv: &mut IntMatrix<T>,
    ops: &mut Vec<RowOp<T>>,
    a: usize,
    b: usize,
    track_u: bool,
) {
    if a == b {
        return;
    }
    ops.push(RowOp::Swap(a, b));
    if track_u {
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    }
}

/// Record `row[dst] -= q * row[src]`; `U^{-1}` picks up the inverse column operation.
fn sub_u<T: Scalar>(
    u: &mut IntMatrix<T>,
    u_inv: &mut IntMatrix<T>,
    ops: &mut Vec<RowOp<T>>,
    dst: usize,
    src: usize,
    q: T,
    track_u: bool,
) -> Result<(), Overflow> {
    if track_u {
        u.row_sub(dst, src, &q, 0)?;
        u_inv.col_sub(src, dst, &(-q.clone()), 0)?;
    }
    ops.push(RowOp::Sub { dst, src, q });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn check<T: Scalar>(a: &IntMatrix<T>) {
        use num_integer::Integer;
        use num_traits::Zero;
        // Products of the transforms are verified over big integers.
        let s: Smith<BigInt> = smith_normal_form(a).unwrap().convert();
        let a: IntMatrix<BigInt> = a.convert();
        let a = &a;
        let mut col = a.column(0);
        replay(&s.ops, &mut col).unwrap();
        assert_eq!(col, s.u.mul_vec(&a.column(0)).unwrap());
        let uav = s.u.mul(a).unwrap().mul(&s.v).unwrap();
        assert_eq!(uav, s.d_matrix());
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        for w in s.diag[..s.rank].windows(2) {
            assert!(w[1].mod_floor(&w[0]).is_zero());
        }
        for x in &s.diag[s.rank..] {
            assert!(x.is_zero());
        }
    }

    #[test]
    fn two_by_two_example() {
        let a = IntMatrix::<i64>::from_rows(&[vec![2, 4], vec![6, 8]], 2);
        let s = smith_normal_form(&a).unwrap();
        assert_eq!(s.diag, vec![2, 4]);
        check(&a);
    }

    #[test]
    fn identity_and_zero() {
        let s = smith_normal_form(&IntMatrix::<i64>::identity(3)).unwrap();
        assert_eq!(s.diag, vec![1, 1, 1]);
        let z = IntMatrix::<i64>::zeros(2, 3);
        let s = smith_normal_form(&z).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.diag, vec![0, 0]);
    }

    proptest! {
        #[test]
        fn random_matrices(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-9i64..10, 36)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| seed[i * 6..i * 6 + cols].to_vec()).collect();
            check(&IntMatrix::<i64>::from_rows(&data, cols));
            check(&IntMatrix::<BigInt>::from_rows(&data, cols));
        }
    }
}
