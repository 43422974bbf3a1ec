//! Integer matrix rank: fast modular elimination and exact fraction-free
//! elimination.
//!
//! Full rank modulo a prime certifies full rank over the rationals (a nonzero
//! maximal minor mod p is nonzero over ℤ); the converse can fail for unlucky
//! primes, so deficiency is confirmed exactly with Bareiss elimination.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// 2^61 − 1, prime.
pub const P1: u64 = (1 << 61) - 1;
/// 2^63 − 25, the largest prime below 2^63.
pub const P2: u64 = 9_223_372_036_854_775_783;

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn modpow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn modinv(a: u64, p: u64) -> u64 {
    modpow(a, p - 2, p)
}

/// Rank of the matrix over GF(p). Entries must already be reduced mod p.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = modinv(m[r][c], p);
        for i in r + 1..rows {
            if m[i][c] == 0 {
                continue;
            }
            let factor = mulmod(m[i][c], inv, p);
            for j in c..cols {
                let sub = mulmod(factor, m[r][j], p);
                m[i][j] = (m[i][j] + p - sub) % p;
            }
        }
        rank += 1;
        r += 1;
        if r == rows {
            break;
        }
    }
    rank
}

/// Exact rank over ℚ via Bareiss (fraction-free) elimination; every division
/// below is exact by Sylvester's identity.
pub fn rank_exact(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        rank += 1;
        r += 1;
        if r == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn big(m: &[Vec<u64>]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|&e| BigInt::from(e)).collect()).collect()
    }

    #[test]
    fn test_rank_basics() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(rank_mod_p(id.clone(), P1), 3);
        assert_eq!(rank_exact(big(&id)), 3);
        let zero = vec![vec![0, 0], vec![0, 0], vec![0, 0]];
        assert_eq!(rank_mod_p(zero.clone(), P1), 0);
        assert_eq!(rank_exact(big(&zero)), 0);
        let dep = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(rank_mod_p(dep.clone(), P2), 1);
        assert_eq!(rank_exact(big(&dep)), 1);
        let wide = vec![vec![0, 1, 5, 7]];
        assert_eq!(rank_mod_p(wide.clone(), P1), 1);
        assert_eq!(rank_exact(big(&wide)), 1);
    }

    #[test]
    fn test_rank_exact_signed() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(-1)],
            vec![BigInt::from(-4), BigInt::from(2)],
        ];
        assert_eq!(rank_exact(m), 1);
    }

    #[test]
    fn test_modular_matches_exact_on_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..25 {
            let rows = rng.gen_range(1..=7);
            let cols = rng.gen_range(1..=7);
            let m: Vec<Vec<u64>> =
                (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..50)).collect()).collect();
            let exact = rank_exact(big(&m));
            assert_eq!(rank_mod_p(m.clone(), P1), exact);
            assert_eq!(rank_mod_p(m, P2), exact);
        }
    }

    #[test]
    fn test_rank_deficient_products() {
        // A (6×2) · B (2×6) has rank ≤ 2
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a: Vec<Vec<u64>> =
                (0..6).map(|_| (0..2).map(|_| rng.gen_range(0..30)).collect()).collect();
            let b: Vec<Vec<u64>> =
                (0..2).map(|_| (0..6).map(|_| rng.gen_range(0..30)).collect()).collect();
            let m: Vec<Vec<u64>> = (0..6)
                .map(|i| (0..6).map(|j| (0..2).map(|k| a[i][k] * b[k][j]).sum()).collect())
                .collect();
            let exact = rank_exact(big(&m));
            assert!(exact <= 2);
            assert_eq!(rank_mod_p(m, P1), exact);
        }
    }
}
