//! Strong-Lefschetz checks for Artinian monomial quotients: Hilbert-function
//! symmetry and full-rank tests for multiplication by ℓ = x_1 + ⋯ + x_n.

use num_bigint::BigInt;
use serde::Serialize;

use crate::matrix::{modinv, mulmod, rank_exact, rank_mod_p, P1, P2};
use crate::monomial::{IdealError, MonomialIdeal};

/// Default bound on the standard-monomial count for enumeration-based checks.
pub const DEFAULT_CAP: usize = 20_000;

/// Outcome of a strong-Lefschetz check with ℓ = x_1 + ⋯ + x_n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlpReport {
    /// True iff every map ×ℓ^d: A_i → A_{i+d} has full rank over ℚ.
    pub holds: bool,
    /// The smallest (d, i) in lexicographic order whose map is rank-deficient.
    pub failing: Option<(usize, usize)>,
}

/// True iff the Hilbert function of the quotient reads the same reversed.
pub fn hilbert_is_symmetric(ideal: &MonomialIdeal, cap: usize) -> Result<bool, IdealError> {
    let h = ideal.hilbert_function(cap)?;
    let rev: Vec<u64> = h.iter().rev().copied().collect();
    Ok(h == rev)
}

fn is_unimodal(h: &[usize]) -> bool {
    let mut i = 0;
    while i + 1 < h.len() && h[i] <= h[i + 1] {
        i += 1;
    }
    while i + 1 < h.len() && h[i] >= h[i + 1] {
        i += 1;
    }
    i + 1 == h.len()
}

/// Standard monomials grouped by total degree, each degree sorted.
fn graded_basis(ideal: &MonomialIdeal, cap: usize) -> Result<Vec<Vec<Vec<u64>>>, IdealError> {
    let monos = ideal.standard_monomials(cap)?;
    let mut by_degree: Vec<Vec<Vec<u64>>> = Vec::new();
    for v in monos {
        let deg = v.iter().sum::<u64>() as usize;
        if by_degree.len() <= deg {
            by_degree.resize(deg + 1, Vec::new());
        }
        by_degree[deg].push(v);
    }
    for level in &mut by_degree {
        level.sort();
    }
    Ok(by_degree)
}

/// Factorials 0..=max and their inverses, mod p (valid because max < p).
fn factorial_tables(max: usize, p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut fact = vec![1u64; max + 1];
    for i in 1..=max {
        fact[i] = mulmod(fact[i - 1], i as u64 % p, p);
    }
    let mut inv_fact = vec![1u64; max + 1];
    inv_fact[max] = modinv(fact[max], p);
    for i in (0..max).rev() {
        inv_fact[i] = mulmod(inv_fact[i + 1], (i + 1) as u64 % p, p);
    }
    (fact, inv_fact)
}

/// d! / ∏ parts! mod p, where d = Σ parts.
fn multinomial_mod_p(parts: &[u64], fact: &[u64], inv_fact: &[u64], p: u64) -> u64 {
    let d: u64 = parts.iter().sum();
    let mut acc = fact[d as usize];
    for &b in parts {
        acc = mulmod(acc, inv_fact[b as usize], p);
    }
    acc
}

fn multinomial_exact(parts: &[u64]) -> BigInt {
    let mut acc = BigInt::from(1u32);
    let mut total = BigInt::from(0u32);
    for &b in parts {
        total += BigInt::from(b);
        acc *= num_integer::binomial(total.clone(), BigInt::from(b));
    }
    acc
}

/// Exponent difference dst − src, or None if some coordinate goes negative.
fn diff(dst: &[u64], src: &[u64]) -> Option<Vec<u64>> {
    dst.iter().zip(src).map(|(&a, &b)| a.checked_sub(b)).collect()
}

/// Matrix of ×ℓ^d from the span of `src` to the span of `dst` over GF(p),
/// where d is the degree gap; non-standard product terms are dropped.
fn transition_matrix_mod_p(
    src: &[Vec<u64>],
    dst: &[Vec<u64>],
    fact: &[u64],
    inv_fact: &[u64],
    p: u64,
) -> Vec<Vec<u64>> {
    dst.iter()
        .map(|v| {
            src.iter()
                .map(|u| match diff(v, u) {
                    Some(parts) => multinomial_mod_p(&parts, fact, inv_fact, p),
                    None => 0,
                })
                .collect()
        })
        .collect()
}

fn transition_matrix_exact(src: &[Vec<u64>], dst: &[Vec<u64>]) -> Vec<Vec<BigInt>> {
    dst.iter()
        .map(|v| {
            src.iter()
                .map(|u| match diff(v, u) {
                    Some(parts) => multinomial_exact(&parts),
                    None => BigInt::from(0u32),
                })
                .collect()
        })
        .collect()
}

/// Whether ×ℓ^d: span(src) → span(dst) has full rank over ℚ. A full-rank
/// answer mod one prime already certifies full rank; deficiency is confirmed
/// with a second prime and then exact elimination.
fn map_has_full_rank(src: &[Vec<u64>], dst: &[Vec<u64>]) -> bool {
    let want = src.len().min(dst.len());
    for p in [P1, P2] {
        let max_deg: usize = dst[0].iter().sum::<u64>() as usize;
        let (fact, inv_fact) = factorial_tables(max_deg, p);
        let m = transition_matrix_mod_p(src, dst, &fact, &inv_fact, p);
        if rank_mod_p(m, p) == want {
            return true;
        }
    }
    rank_exact(transition_matrix_exact(src, dst)) == want
}

/// Checks the strong Lefschetz property of the quotient by `ideal` for
/// ℓ = x_1 + ⋯ + x_n: every ×ℓ^d: A_i → A_{i+d} (d ≥ 1) must have full rank
/// over ℚ. When the Hilbert function is symmetric and unimodal it suffices to
/// check the square maps A_i → A_{c−i}; any suspected failure is re-located by
/// a full scan so `failing` is always the lexicographically first bad (d, i).
pub fn check_slp(ideal: &MonomialIdeal, cap: usize) -> Result<SlpReport, IdealError> {
    let basis = graded_basis(ideal, cap)?;
    let holds = SlpReport { holds: true, failing: None };
    if basis.is_empty() {
        return Ok(holds);
    }
    let c = basis.len() - 1;
    if c == 0 {
        return Ok(holds);
    }
    let h: Vec<usize> = basis.iter().map(Vec::len).collect();
    let symmetric = h.iter().eq(h.iter().rev());
    if symmetric && is_unimodal(&h) {
        let mut all_square_maps_ok = true;
        let mut i = 0;
        while c >= 2 * i + 1 {
            if !map_has_full_rank(&basis[i], &basis[c - i]) {
                all_square_maps_ok = false;
                break;
            }
            i += 1;
        }
        if all_square_maps_ok {
            return Ok(holds);
        }
    }
    for d in 1..c {
        for i in 0..=c - d {
            if !map_has_full_rank(&basis[i], &basis[i + d]) {
                return Ok(SlpReport { holds: false, failing: Some((d, i)) });
            }
        }
    }
    Ok(holds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(n: usize, gens: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(n, gens)
    }

    #[test]
    fn test_hilbert_symmetry() {
        let i1 = ideal(3, &[&[4, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 0], &[1, 0, 1]]);
        assert_eq!(i1.hilbert_function(100).unwrap(), vec![1, 3, 4, 3, 1]);
        assert!(hilbert_is_symmetric(&i1, 100).unwrap());

        let i2 = ideal(2, &[&[2, 0], &[1, 1], &[0, 4]]);
        assert_eq!(i2.hilbert_function(100).unwrap(), vec![1, 2, 1, 1]);
        assert!(!hilbert_is_symmetric(&i2, 100).unwrap());

        // one fewer power of x2: the function becomes (1,2,1), a palindrome
        let i3 = ideal(2, &[&[2, 0], &[1, 1], &[0, 3]]);
        assert_eq!(i3.hilbert_function(100).unwrap(), vec![1, 2, 1]);
        assert!(hilbert_is_symmetric(&i3, 100).unwrap());

        assert!(hilbert_is_symmetric(&ideal(1, &[&[1]]), 100).unwrap());
    }

    #[test]
    fn test_unimodal() {
        assert!(is_unimodal(&[1, 3, 4, 3, 1]));
        assert!(is_unimodal(&[1, 1, 1]));
        assert!(is_unimodal(&[1, 5]));
        assert!(!is_unimodal(&[1, 3, 1, 3, 1]));
        assert!(!is_unimodal(&[2, 1, 2]));
    }

    #[test]
    fn test_transition_matrix_entries() {
        // span{1} → span{xy} under ×(x+y)^2: coefficient of xy is 2
        let src = vec![vec![0, 0]];
        let dst = vec![vec![1, 1]];
        assert_eq!(transition_matrix_exact(&src, &dst), vec![vec![BigInt::from(2)]]);
        let (fact, inv_fact) = factorial_tables(2, P1);
        assert_eq!(transition_matrix_mod_p(&src, &dst, &fact, &inv_fact, P1), vec![vec![2]]);
        // incomparable exponent vectors contribute 0
        let src = vec![vec![2, 0]];
        let dst = vec![vec![1, 2]];
        assert_eq!(transition_matrix_exact(&src, &dst), vec![vec![BigInt::from(0)]]);
    }

    #[test]
    fn test_multinomial() {
        assert_eq!(multinomial_exact(&[1, 1, 1]), BigInt::from(6));
        assert_eq!(multinomial_exact(&[2, 1]), BigInt::from(3));
        assert_eq!(multinomial_exact(&[0, 0]), BigInt::from(1));
        assert_eq!(multinomial_exact(&[3]), BigInt::from(1));
        let (fact, inv_fact) = factorial_tables(10, P2);
        assert_eq!(multinomial_mod_p(&[2, 2, 1], &fact, &inv_fact, P2), 30);
    }

    #[test]
    fn test_slp_two_squares() {
        let report = check_slp(&ideal(2, &[&[2, 0], &[0, 2]]), 100).unwrap();
        assert_eq!(report, SlpReport { holds: true, failing: None });
    }

    #[test]
    fn test_slp_one_colour_ideal() {
        let i = ideal(3, &[&[4, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 0], &[1, 0, 1]]);
        assert_eq!(check_slp(&i, 100).unwrap(), SlpReport { holds: true, failing: None });
    }

    #[test]
    fn test_slp_single_variable() {
        let report = check_slp(&ideal(1, &[&[5]]), 100).unwrap();
        assert!(report.holds);
        assert_eq!(check_slp(&ideal(1, &[&[1]]), 100).unwrap().holds, true);
    }

    #[test]
    fn test_slp_failure_located() {
        // x³, y³, z³, xyz: multiplication A_2 → A_3 by x+y+z is singular,
        // and (1, 2) is the first failing (d, i) pair
        let i = ideal(3, &[&[3, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 1]]);
        assert_eq!(i.hilbert_function(100).unwrap(), vec![1, 3, 6, 6, 3]);
        let report = check_slp(&i, 100).unwrap();
        assert_eq!(report, SlpReport { holds: false, failing: Some((1, 2)) });
    }

    #[test]
    fn test_slp_cap_and_unit() {
        assert_eq!(check_slp(&ideal(1, &[&[500]]), 100), Err(IdealError::CapExceeded(100)));
        assert!(check_slp(&MonomialIdeal::unit(3), 100).unwrap().holds);
    }

    #[test]
    fn test_graded_basis_ordering() {
        let basis = graded_basis(&ideal(2, &[&[2, 0], &[0, 2]]), 100).unwrap();
        assert_eq!(basis, vec![vec![vec![0, 0]], vec![vec![0, 1], vec![1, 0]], vec![vec![1, 1]]]);
    }
}
