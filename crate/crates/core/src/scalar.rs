//! Integer scalars for exact lattice work.
//!
//! Every lattice algorithm is written once against [`Scalar`] and runs with
//! checked arithmetic. The machine-word instantiation reports overflow instead
//! of wrapping, and callers then redo the computation over [`num_bigint::BigInt`].

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

/// Arithmetic overflowed the scalar type; retry with a wider one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

pub trait Scalar:
    Integer
    + Signed
    + Clone
    + Debug
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
{
    fn of(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 fits every scalar")
    }

    /// `self - q * other`, checked.
    fn sub_mul(&self, q: &Self, other: &Self) -> Result<Self, Overflow> {
        let p = q.checked_mul(other).ok_or(Overflow)?;
        self.checked_sub(&p).ok_or(Overflow)
    }

    fn add_checked(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_add(other).ok_or(Overflow)
    }

    fn mul_checked(&self, other: &Self) -> Result<Self, Overflow> {
        self.checked_mul(other).ok_or(Overflow)
    }

    /// Least nonnegative residue modulo `m > 0`, as an `i64`.
    fn residue(&self, m: i64) -> i64 {
        let r = self.mod_floor(&Self::of(m));
        r.to_i64().expect("residue below an i64 modulus")
    }
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn residue_is_nonnegative() {
        assert_eq!((-3i64).residue(4), 1);
        assert_eq!(BigInt::from(-7).residue(5), 3);
    }

    #[test]
    fn machine_word_reports_overflow() {
        assert_eq!(i64::MAX.sub_mul(&2, &(i64::MIN)), Err(Overflow));
        let big = BigInt::from(i64::MAX);
        assert!(big.sub_mul(&BigInt::from(2), &BigInt::from(i64::MIN)).is_ok());
    }
}
