use num_bigint::BigUint;

use crate::error::{Result, WdsError};

fn tree_sum(levels: usize) -> BigUint {
    (1..=levels)
        .map(|n| (BigUint::from(1u8) << n) * BigUint::from(2 * n + 1))
        .sum()
}

/// Worst-case multiplications of a sphere decoder: `Σ_{n=1}^{2N} 2ⁿ(2n+1)` over
/// the full band, or `(N/N_B)·Σ_{n=1}^{2N_B} 2ⁿ(2n+1)` when every `N_B`-carrier
/// sub-band is decoded separately.
pub fn sd_complexity_bound(n: usize, n_b: Option<usize>) -> Result<BigUint> {
    if n == 0 {
        return Err(WdsError::OutOfRange("N must be positive".into()));
    }
    match n_b {
        None => Ok(tree_sum(2 * n)),
        Some(b) if b == 0 || !n.is_multiple_of(b) => Err(WdsError::OutOfRange(format!(
            "sub-band size {b} does not divide {n}"
        ))),
        Some(b) => Ok(BigUint::from(n / b) * tree_sum(2 * b)),
    }
}

/// Multiplications of an `N`-point radix-2 transform, `(N/2)·log₂N`.
pub fn fft_complexity(n: usize) -> Result<BigUint> {
    if !n.is_power_of_two() {
        return Err(WdsError::OutOfRange(format!("{n} is not a power of two")));
    }
    Ok(BigUint::from(n / 2) * BigUint::from(n.trailing_zeros()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(fft_complexity(16).unwrap(), BigUint::from(32u32));
        assert_eq!(sd_complexity_bound(1, None).unwrap(), BigUint::from(6u32 + 20));
        assert!(fft_complexity(12).is_err());
        assert!(sd_complexity_bound(16, Some(5)).is_err());
        assert_eq!(
            sd_complexity_bound(16, Some(16)).unwrap(),
            sd_complexity_bound(16, None).unwrap()
        );
    }
}
