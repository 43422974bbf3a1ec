//! Monomials with arbitrary-precision exponents and monomial-ideal arithmetic.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent vector of a monomial; position t holds the exponent of x_{t+1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<BigUint>);

/// Errors surfaced by ideal-level computations.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error("ideal is not Artinian: x{0} has no pure-power generator")]
    NotArtinian(usize),
    #[error("standard monomial count exceeds cap {0}")]
    CapExceeded(usize),
}

impl Monomial {
    pub fn from_u64s(exps: &[u64]) -> Self {
        Monomial(exps.iter().map(|&e| BigUint::from(e)).collect())
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![BigUint::zero(); n])
    }

    /// x_{t+1}^e in n variables (t is a 0-based position).
    pub fn pure_power(n: usize, t: usize, e: BigUint) -> Self {
        let mut exps = vec![BigUint::zero(); n];
        exps[t] = e;
        Monomial(exps)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    pub fn degree(&self) -> BigUint {
        self.0.iter().sum()
    }

    /// 0-based positions with a nonzero exponent, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&t| !self.0[t].is_zero()).collect()
    }

    /// True iff self divides other (coordinate-wise ≤). Panics on length mismatch.
    pub fn divides(&self, other: &Monomial) -> bool {
        assert_eq!(self.len(), other.len(), "monomial length mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// self : m, i.e. coordinate-wise max(self − m, 0).
    pub fn quotient_by(&self, m: &Monomial) -> Monomial {
        assert_eq!(self.len(), m.len(), "monomial length mismatch");
        Monomial(
            self.0
                .iter()
                .zip(&m.0)
                .map(|(a, b)| if a >= b { a - b } else { BigUint::zero() })
                .collect(),
        )
    }
}

/// Storage order for generator lists: compare exponents from the last variable
/// backwards; the first difference decides, larger exponent first.
pub fn revlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for t in (0..a.len()).rev() {
        match b.0[t].cmp(&a.0[t]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        revlex_cmp(self, other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (t, e) in self.0.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == BigUint::from(1u32) {
                write!(f, "x{}", t + 1)?;
            } else {
                write!(f, "x{}^{}", t + 1, e)?;
            }
        }
        Ok(())
    }
}

/// A monomial ideal in n variables. Generators are kept deduplicated and
/// sorted (see [`revlex_cmp`]) but not minimalized; the unit ideal is stored
/// as the single all-zero generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    n: usize,
    gens: Vec<Monomial>,
}

impl MonomialIdeal {
    /// Builds an ideal, sorting and deduplicating the generators. Panics if a
    /// generator's length differs from n.
    pub fn new(n: usize, mut gens: Vec<Monomial>) -> Self {
        for g in &gens {
            assert_eq!(g.len(), n, "generator length must equal n");
        }
        if gens.iter().any(|g| g.is_one()) {
            gens = vec![Monomial::one(n)];
        }
        gens.sort();
        gens.dedup();
        MonomialIdeal { n, gens }
    }

    pub fn from_exponents(n: usize, rows: &[&[u64]]) -> Self {
        MonomialIdeal::new(n, rows.iter().map(|r| Monomial::from_u64s(r)).collect())
    }

    pub fn unit(n: usize) -> Self {
        MonomialIdeal::new(n, vec![Monomial::one(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.gens
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_one()
    }

    /// True iff the ideal has no generators at all.
    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Membership test: some generator divides m.
    pub fn contains(&self, m: &Monomial) -> bool {
        self.gens.iter().any(|g| g.divides(m))
    }

    /// The unique minimal generating set.
    pub fn minimalize(&self) -> Self {
        let gens: Vec<Monomial> = self
            .gens
            .iter()
            .filter(|g| !self.gens.iter().any(|h| h != *g && h.divides(g)))
            .cloned()
            .collect();
        MonomialIdeal { n: self.n, gens }
    }

    /// The colon ideal I : (m), minimalized.
    pub fn colon_by_monomial(&self, m: &Monomial) -> Self {
        assert_eq!(m.len(), self.n, "monomial length must equal n");
        let gens = self.gens.iter().map(|g| g.quotient_by(m)).collect();
        MonomialIdeal::new(self.n, gens).minimalize()
    }

    /// True iff every variable has a pure-power generator (the unit ideal
    /// counts as Artinian: the quotient is the zero ring).
    pub fn is_artinian(&self) -> bool {
        self.is_unit() || (0..self.n).all(|t| self.gens.iter().any(|g| g.support() == [t]))
    }

    /// All monomials outside the ideal, as u64 exponent vectors, or an error
    /// if the ideal is not Artinian or more than `cap` of them exist.
    pub fn standard_monomials(&self, cap: usize) -> Result<Vec<Vec<u64>>, IdealError> {
        if self.is_unit() {
            return Ok(Vec::new());
        }
        for t in 0..self.n {
            if !self.gens.iter().any(|g| g.support() == [t]) {
                return Err(IdealError::NotArtinian(t + 1));
            }
        }
        // Every coordinate of a standard monomial is < the standard count, so
        // clamping generator exponents just above the cap keeps divisibility
        // tests exact over the whole reachable range.
        let clamp = cap as u64 + 2;
        let gens_u64: Vec<Vec<u64>> = self
            .gens
            .iter()
            .map(|g| {
                g.0.iter()
                    .map(|e| u64::try_from(e).unwrap_or(u64::MAX).min(clamp))
                    .collect()
            })
            .collect();
        let in_ideal =
            |v: &[u64]| gens_u64.iter().any(|g| g.iter().zip(v).all(|(ge, ve)| ge <= ve));
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut queue: VecDeque<Vec<u64>> = VecDeque::new();
        let start = vec![0u64; self.n];
        if in_ideal(&start) {
            return Ok(Vec::new());
        }
        seen.insert(start.clone());
        queue.push_back(start);
        if seen.len() > cap {
            return Err(IdealError::CapExceeded(cap));
        }
        while let Some(v) = queue.pop_front() {
            for t in 0..self.n {
                let mut w = v.clone();
                w[t] += 1;
                if !in_ideal(&w) && !seen.contains(&w) {
                    seen.insert(w.clone());
                    if seen.len() > cap {
                        return Err(IdealError::CapExceeded(cap));
                    }
                    queue.push_back(w.clone());
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Dimensions of the graded pieces of the quotient, degree 0 upward.
    /// Empty for the unit ideal.
    pub fn hilbert_function(&self, cap: usize) -> Result<Vec<u64>, IdealError> {
        let std_mons = self.standard_monomials(cap)?;
        let mut tally: Vec<u64> = Vec::new();
        for v in &std_mons {
            let d = v.iter().sum::<u64>() as usize;
            if d >= tally.len() {
                tally.resize(d + 1, 0);
            }
            tally[d] += 1;
        }
        Ok(tally)
    }

    /// True iff both ideals have the same minimal generating set.
    pub fn equal_ideals(&self, other: &Self) -> bool {
        self.n == other.n && self.minimalize().gens == other.minimalize().gens
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

fn biguint_to_number(x: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_str_radix(10)).expect("digits form a JSON number")
}

fn number_to_biguint(x: &serde_json::Number) -> Result<BigUint, String> {
    BigUint::from_str(&x.to_string())
        .map_err(|_| format!("exponent {x} is not a non-negative integer"))
}

#[derive(Serialize, Deserialize)]
struct IdealRepr {
    n: usize,
    generators: Vec<Vec<serde_json::Number>>,
}

impl Serialize for MonomialIdeal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = IdealRepr {
            n: self.n,
            generators: self
                .gens
                .iter()
                .map(|g| g.0.iter().map(biguint_to_number).collect())
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonomialIdeal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = IdealRepr::deserialize(deserializer)?;
        let mut gens = Vec::with_capacity(repr.generators.len());
        for row in &repr.generators {
            if row.len() != repr.n {
                return Err(D::Error::custom(format!(
                    "generator has {} exponents, expected {}",
                    row.len(),
                    repr.n
                )));
            }
            let exps = row
                .iter()
                .map(number_to_biguint)
                .collect::<Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            gens.push(Monomial(exps));
        }
        Ok(MonomialIdeal::new(repr.n, gens))
    }
}
