//! Path extraction from a tree whose Lebesgue measure is promised to be c.

use crate::bits::BitString;
use crate::dag::Forest;
use crate::error::{Error, Result};
use crate::trees::TreeSource;
use crate::weights::Dyadic;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

/// X↾depth where X(k) = 1 − i for the first (m, i), m = k+1..=cap and
/// i = 0, 1, with W_m[X↾k⌢i] + W_m[¬X↾k] < c. Only `member` is queried.
pub fn lebesgue_path(src: &dyn TreeSource, c: &Dyadic, depth: u32, cap: u32) -> Result<BitString> {
    if c.signum() <= 0 {
        return Err(Error::InvalidArgument(format!("promised measure must be positive, got {c}")));
    }
    if depth > cap {
        return Err(Error::HorizonExceeded { needed: depth, horizon: cap });
    }
    let mut f = Forest::new();
    let root = f.ambient(src, cap, false)?;
    let below = |count: &BigUint, m: u32| -> bool {
        // count · 2^{-m} < c
        let lhs = BigInt::from(count.clone()) << c.exponent();
        let rhs = c.numerator().clone() << m;
        lhs < rhs
    };
    if below(&f.count_level(root, cap), cap) {
        return Err(Error::PromiseViolated { cap });
    }
    let mut x = BitString::empty();
    for k in 0..depth {
        let here = f.restrict(root, &x);
        let mut chosen = None;
        'search: for m in k + 1..=cap {
            let total = f.count_level(root, m);
            let inside = f.count_level(here, m);
            let outside = total - inside;
            for i in [false, true] {
                let t = f.restrict(root, &x.child(i));
                if below(&(f.count_level(t, m) + &outside), m) {
                    chosen = Some(!i);
                    break 'search;
                }
            }
        }
        let bit = chosen.ok_or(Error::PromiseViolated { cap })?;
        x.push(bit);
        let next = f.restrict(root, &x);
        if f.count_level(next, cap).is_zero() {
            return Err(Error::PromiseViolated { cap });
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::Builtin;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn branch_left_half() {
        let x = lebesgue_path(&Builtin::BranchLeft, &d("1/2"), 8, 20).unwrap();
        assert_eq!(x.to_string(), "01111111");
    }

    #[test]
    fn full_tree_starts_with_one() {
        let x = lebesgue_path(&Builtin::Full, &d("1"), 4, 10).unwrap();
        assert_eq!(x.get(0), Some(true));
    }

    #[test]
    fn three_quarters() {
        let t = Builtin::parse("dyadic:3/4").unwrap();
        let x = lebesgue_path(&t, &d("3/4"), 64, 80).unwrap();
        assert_eq!(&x.to_string()[..5], "10111");
        for k in 0..=64 {
            assert!(t.member(&x.prefix(k)));
        }
    }

    #[test]
    fn false_promise() {
        let r = lebesgue_path(&Builtin::BranchLeft, &d("3/4"), 8, 20);
        assert!(matches!(r, Err(Error::PromiseViolated { cap: 20 })));
    }
}
