//! (s,n)-tables, the monomial ideals they generate, normal-form checks, and
//! the rewriting rules that bring any generalised table to normal form.
//!
//! A table is an (s+1)×n matrix of non-negative integers: row 0 holds the
//! degrees d_1..d_n, rows 1..s hold the entries α_{i,j}, and the three
//! conditions below must hold. Columns 1..s are "constrained", the rest
//! "unconstrained"; each column carries a variable label.

use std::collections::HashSet;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::monomial::{Monomial, MonomialIdeal};

/// A violated table condition, with 1-based row/column positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum TableViolation {
    /// α_{row,col} ≠ 0 below the diagonal (row > col).
    #[serde(rename = "i")]
    I { row: usize, col: usize },
    /// Σ_i α_{i,col} > d_col.
    #[serde(rename = "ii")]
    II { col: usize },
    /// d_col ≠ Σ_{i<col} α_{i,col} + Σ_{j>col} α_{col,j} + α_{col+1,col+1}.
    #[serde(rename = "iii")]
    III { col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("entries matrix must have at least one row")]
    EmptyMatrix,
    #[error("entries matrix must be rectangular")]
    NonRectangular,
    #[error("entries matrix must have between 1 and n rows, got {rows} rows and {cols} columns")]
    BadShape { rows: usize, cols: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("labels must be positive integers")]
    ZeroLabel,
    #[error("duplicate label {0}")]
    DuplicateLabel(usize),
    #[error("table conditions violated: {0:?}")]
    Invalid(Vec<TableViolation>),
    #[error("member label sets must be disjoint and lie in 1..=n_total")]
    BadLabelSets,
    #[error("improper table: the ideal contains 1 (witness variable x{label})")]
    Improper { label: usize },
    #[error("variable x{0} appears in no member table")]
    UncoveredVariable(usize),
}

/// Indices violating each normal-form condition; empty ⟺ normal form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormalFormReport {
    /// Rows i with α_{i,i} = 0.
    pub diag_zeros: Vec<usize>,
    /// Unconstrained columns whose α entries are all zero.
    pub almost_zero_columns: Vec<usize>,
    /// Columns with Σ_i α_{i,j} = d_j.
    pub singular_columns: Vec<usize>,
}

impl NormalFormReport {
    pub fn is_empty(&self) -> bool {
        self.diag_zeros.is_empty()
            && self.almost_zero_columns.is_empty()
            && self.singular_columns.is_empty()
    }
}

/// A valid (s,n)-table. Construct through [`validate_table`] or serde.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    s: usize,
    labels: Vec<usize>,
    entries: Vec<Vec<BigUint>>,
}

/// Checks the shape, the labels, and conditions (i)–(iii); returns the Table
/// or the full list of violations.
pub fn validate_table(entries: Vec<Vec<BigUint>>, labels: Vec<usize>) -> Result<Table, TableError> {
    let rows = entries.len();
    if rows == 0 {
        return Err(TableError::EmptyMatrix);
    }
    let n = entries[0].len();
    if entries.iter().any(|r| r.len() != n) {
        return Err(TableError::NonRectangular);
    }
    if n == 0 || rows > n {
        return Err(TableError::BadShape { rows, cols: n });
    }
    if labels.len() != n {
        return Err(TableError::LabelCount { expected: n, got: labels.len() });
    }
    if labels.iter().any(|&l| l == 0) {
        return Err(TableError::ZeroLabel);
    }
    let mut seen = HashSet::new();
    for &l in &labels {
        if !seen.insert(l) {
            return Err(TableError::DuplicateLabel(l));
        }
    }
    let s = rows - 1;
    let mut violations = Vec::new();
    for i in 1..=s {
        for j in 1..i {
            if !entries[i][j - 1].is_zero() {
                violations.push(TableViolation::I { row: i, col: j });
            }
        }
    }
    for j in 1..=n {
        let col_sum: BigUint = (1..=s).map(|i| &entries[i][j - 1]).sum();
        if col_sum > entries[0][j - 1] {
            violations.push(TableViolation::II { col: j });
        }
    }
    for k in 1..=s {
        let mut expected: BigUint = (1..k).map(|i| &entries[i][k - 1]).sum();
        expected += (k + 1..=n).map(|j| &entries[k][j - 1]).sum::<BigUint>();
        if k + 1 <= s {
            expected += &entries[k + 1][k];
        }
        if expected != entries[0][k - 1] {
            violations.push(TableViolation::III { col: k });
        }
    }
    if !violations.is_empty() {
        return Err(TableError::Invalid(violations));
    }
    Ok(Table { s, labels, entries })
}

impl Table {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn entries(&self) -> &[Vec<BigUint>] {
        &self.entries
    }

    /// d_j (row 0), 1-based column position.
    pub fn d(&self, j: usize) -> &BigUint {
        &self.entries[0][j - 1]
    }

    /// α_{i,j}, 1-based row 1..=s and column position.
    pub fn alpha(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i][j - 1]
    }

    /// Σ_{i=1..s} α_{i,j}.
    pub fn col_alpha_sum(&self, j: usize) -> BigUint {
        (1..=self.s).map(|i| &self.entries[i][j - 1]).sum()
    }

    fn max_label(&self) -> usize {
        *self.labels.iter().max().expect("tables are non-empty")
    }

    /// Exponent of the column-j variable in the generator m_{i,j}:
    /// d_j − α_{1,j} − … − α_{i,j}.
    fn gen_exponent(&self, i: usize, j: usize) -> BigUint {
        let used: BigUint = (1..=i).map(|r| &self.entries[r][j - 1]).sum();
        self.d(j) - used
    }

    /// The single generator m_{i,j} (0 ≤ i ≤ s, i < j ≤ n), embedded in
    /// `n_total` variables by column label.
    pub fn generator_at(&self, i: usize, j: usize, n_total: usize) -> Monomial {
        assert!(i <= self.s && i < j && j <= self.n(), "no generator slot ({i}, {j})");
        let mut exps = vec![BigUint::zero(); n_total];
        for t in (1..=i).chain([j]) {
            exps[self.labels[t - 1] - 1] = self.gen_exponent(i, t);
        }
        Monomial(exps)
    }

    /// The generating set m_{i,j} for 0 ≤ i ≤ s, i < j ≤ n, embedded in
    /// `n_total` variables by column label.
    pub fn generators_in(&self, n_total: usize) -> MonomialIdeal {
        let n = self.n();
        let mut gens = Vec::new();
        for i in 0..=self.s {
            for j in i + 1..=n {
                gens.push(self.generator_at(i, j, n_total));
            }
        }
        MonomialIdeal::new(n_total, gens)
    }

    /// Generators in the smallest ambient ring containing every label.
    pub fn generators(&self) -> MonomialIdeal {
        self.generators_in(self.max_label())
    }

    /// Label of a column witnessing that some generator equals 1, if any.
    fn improper_witness(&self) -> Option<usize> {
        for i in 0..=self.s {
            for j in i + 1..=self.n() {
                if (1..=i).chain([j]).all(|t| self.gen_exponent(i, t).is_zero()) {
                    return Some(self.labels[j - 1]);
                }
            }
        }
        None
    }

    /// True iff the generated ideal is not the whole ring.
    pub fn is_proper(&self) -> bool {
        self.improper_witness().is_none()
    }

    /// Evaluates the three normal-form conditions. (0,n)-tables report empty.
    pub fn normal_form_report(&self) -> NormalFormReport {
        let mut report = NormalFormReport::default();
        if self.s == 0 {
            return report;
        }
        for i in 1..=self.s {
            if self.alpha(i, i).is_zero() {
                report.diag_zeros.push(i);
            }
        }
        for j in self.s + 1..=self.n() {
            if (1..=self.s).all(|i| self.alpha(i, j).is_zero()) {
                report.almost_zero_columns.push(j);
            }
        }
        for j in 1..=self.n() {
            if self.col_alpha_sum(j) == *self.d(j) {
                report.singular_columns.push(j);
            }
        }
        report
    }

    /// Σ d_j − α_{1,1} − n (α_{1,1} read as 0 when s = 0).
    pub fn max_socle_degree(&self) -> Result<BigUint, TableError> {
        if let Some(label) = self.improper_witness() {
            return Err(TableError::Improper { label });
        }
        let mut total: BigInt = self.entries[0].iter().map(|d| BigInt::from(d.clone())).sum();
        if self.s >= 1 {
            total -= BigInt::from(self.alpha(1, 1).clone());
        }
        total -= BigInt::from(self.n());
        total
            .to_biguint()
            .ok_or(TableError::Improper { label: self.labels[0] })
    }

    /// Wraps the table as a one-member generalised table.
    pub fn to_generalised(&self) -> GeneralisedTable {
        GeneralisedTable::new(self.max_label(), vec![self.clone()])
            .expect("a single valid table is a valid generalised table")
    }

    fn revalidate(&self) -> Result<Table, TableError> {
        validate_table(self.entries.clone(), self.labels.clone())
    }

    /// Reorders unconstrained columns by (d descending, α column descending
    /// lexicographically, label ascending).
    fn sort_unconstrained(&self) -> Table {
        let mut order: Vec<usize> = (self.s..self.n()).collect();
        order.sort_by(|&a, &b| {
            self.entries[0][b]
                .cmp(&self.entries[0][a])
                .then_with(|| {
                    for r in 1..=self.s {
                        let c = self.entries[r][b].cmp(&self.entries[r][a]);
                        if c != std::cmp::Ordering::Equal {
                            return c;
                        }
                    }
                    std::cmp::Ordering::Equal
                })
                .then(self.labels[a].cmp(&self.labels[b]))
        });
        let full_order: Vec<usize> = (0..self.s).chain(order).collect();
        let entries = self
            .entries
            .iter()
            .map(|row| full_order.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let labels = full_order.iter().map(|&c| self.labels[c]).collect();
        Table { s: self.s, labels, entries }
    }
}

/// A disjoint union of tables inside an ambient ring of n_total variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralisedTable {
    n_total: usize,
    tables: Vec<Table>,
}

impl GeneralisedTable {
    /// Builds a union after checking the label sets are disjoint and within
    /// 1..=n_total.
    pub fn new(n_total: usize, tables: Vec<Table>) -> Result<Self, TableError> {
        let mut seen = HashSet::new();
        for t in &tables {
            for &l in t.labels() {
                if l > n_total || !seen.insert(l) {
                    return Err(TableError::BadLabelSets);
                }
            }
        }
        Ok(GeneralisedTable { n_total, tables })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// Union of the members' generating sets.
    pub fn generators(&self) -> MonomialIdeal {
        let gens = self
            .tables
            .iter()
            .flat_map(|t| t.generators_in(self.n_total).generators().to_vec())
            .collect();
        MonomialIdeal::new(self.n_total, gens)
    }

    pub fn is_proper(&self) -> bool {
        self.tables.iter().all(|t| t.is_proper())
    }

    /// Sum of the members' socle degrees; requires every ambient variable to
    /// be covered and every member to be proper.
    pub fn max_socle_degree(&self) -> Result<BigUint, TableError> {
        let covered: HashSet<usize> =
            self.tables.iter().flat_map(|t| t.labels().iter().copied()).collect();
        for v in 1..=self.n_total {
            if !covered.contains(&v) {
                return Err(TableError::UncoveredVariable(v));
            }
        }
        let mut total = BigUint::zero();
        for t in &self.tables {
            total += t.max_socle_degree()?;
        }
        Ok(total)
    }

    /// Canonical presentation: (0,n)-members split into (0,1) singletons,
    /// unconstrained columns sorted within members, members sorted by their
    /// smallest label. Permutes only; the ideal is unchanged.
    pub fn canonical(&self) -> GeneralisedTable {
        let mut members = Vec::new();
        for t in &self.tables {
            if t.s == 0 {
                for (idx, &label) in t.labels.iter().enumerate() {
                    members.push(Table {
                        s: 0,
                        labels: vec![label],
                        entries: vec![vec![t.entries[0][idx].clone()]],
                    });
                }
            } else {
                members.push(t.sort_unconstrained());
            }
        }
        members.sort_by_key(|t| *t.labels.iter().min().expect("tables are non-empty"));
        GeneralisedTable { n_total: self.n_total, tables: members }
    }

    /// Applies the four rewriting rules to every member until each is in
    /// normal form, then canonicalises. The ideal is preserved; an improper
    /// input (its ideal contains 1) is reported as an error.
    pub fn reduce_to_normal_form(&self) -> Result<GeneralisedTable, TableError> {
        let mut members = Vec::new();
        for t in &self.tables {
            reduce_member(t.clone(), &mut members)?;
        }
        Ok(GeneralisedTable::new(self.n_total, members)
            .expect("reduction never duplicates labels")
            .canonical())
    }
}

fn reduce_member(mut t: Table, out: &mut Vec<Table>) -> Result<(), TableError> {
    loop {
        // A zero degree means the ideal contains x_j^0 = 1. Improper inputs
        // always funnel here: the rules preserve the ideal, and a table whose
        // ideal contains 1 cannot reach normal form (strict column
        // inequalities force positive exponents on every generator).
        if let Some(j) = (1..=t.n()).find(|&j| t.d(j).is_zero()) {
            return Err(TableError::Improper { label: t.labels[j - 1] });
        }
        if t.s == 0 {
            out.push(t);
            return Ok(());
        }
        if let Some(i) = (1..=t.s).find(|&i| t.alpha(i, i).is_zero()) {
            t = rule1_cut(t, i);
        } else if let Some(i) = (1..=t.s).find(|&i| t.col_alpha_sum(i) == *t.d(i)) {
            t = rule4_constrained_singularity(t, i);
        } else if let Some(j) = (t.s + 1..=t.n()).find(|&j| t.col_alpha_sum(j) == *t.d(j)) {
            t = rule3_unconstrained_singularity(t, j);
        } else if let Some(j) = (t.s + 1..=t.n()).find(|&j| t.col_alpha_sum(j).is_zero()) {
            t = rule2_split_zero_column(t, j, out);
        } else {
            debug_assert!(t.normal_form_report().is_empty());
            out.push(t);
            return Ok(());
        }
        debug_assert!(t.revalidate().is_ok(), "rules must keep tables valid");
    }
}

/// Rule 1: α_{i,i} = 0. Rows i..s are dropped; every dropped generator is a
/// multiple of m_{i−1,i}, whose x_i-exponent already equals the frozen column
/// sum, so the ideal is unchanged.
fn rule1_cut(mut t: Table, i: usize) -> Table {
    t.entries.truncate(i);
    t.s = i - 1;
    t
}

/// Rule 2: an unconstrained column j with all α zero only contributes
/// multiples of x_j^{d_j}; it splits off as a (0,1) singleton.
fn rule2_split_zero_column(mut t: Table, j: usize, out: &mut Vec<Table>) -> Table {
    out.push(Table {
        s: 0,
        labels: vec![t.labels[j - 1]],
        entries: vec![vec![t.entries[0][j - 1].clone()]],
    });
    t.labels.remove(j - 1);
    for row in &mut t.entries {
        row.remove(j - 1);
    }
    t
}

/// Rule 3: a singularity in an unconstrained column j. Add α_{s,s} into
/// α_{s−1,s} and delete row s; if the deleted α_{s,j} was zero the column is
/// still singular and the step repeats (at most s times). When s = 1,
/// m_{1,j} = x_1^{d_1−α_{1,1}} divides every other m_{1,·}, so the table
/// flattens to the (0,n)-table with d_1 replaced by d_1 − α_{1,1}.
fn rule3_unconstrained_singularity(mut t: Table, j: usize) -> Table {
    for _ in 0..t.s {
        if t.s == 1 {
            let a11 = t.entries[1][0].clone();
            t.entries[0][0] -= a11;
            t.entries.truncate(1);
            t.s = 0;
            return t;
        }
        let s = t.s;
        let deleted = t.entries[s][j - 1].clone();
        let a_ss = t.entries[s][s - 1].clone();
        t.entries[s - 1][s - 1] += a_ss;
        t.entries.truncate(s);
        t.s = s - 1;
        if !deleted.is_zero() {
            return t;
        }
    }
    unreachable!("rule 3 resolves a singularity in at most s steps");
}

/// Rule 4: a singularity in constrained column i. The column moves to the
/// last position; row i folds into row i−1 on the columns that sat to the
/// right of it (for i = 1, row 1 is subtracted from the degree row instead);
/// row i is deleted. The singularity Σ_{r≤i} α_{r,i} = d_i is exactly what
/// makes condition (iii) survive the fold.
fn rule4_constrained_singularity(t: Table, i: usize) -> Table {
    let s = t.s;
    let n = t.n();
    let col_order: Vec<usize> = (1..=n).filter(|&c| c != i).chain([i]).collect();
    let mut entries: Vec<Vec<BigUint>> = Vec::with_capacity(s);
    for r in (0..=s).filter(|&r| r != i) {
        entries.push(col_order.iter().map(|&c| t.entries[r][c - 1].clone()).collect());
    }
    // old column c > i now sits at 0-based position c − 2
    if i > 1 {
        for c in i + 1..=n {
            entries[i - 1][c - 2] += &t.entries[i][c - 1];
        }
    } else {
        for c in 2..=n {
            entries[0][c - 2] -= &t.entries[1][c - 1];
        }
    }
    let labels = col_order.iter().map(|&c| t.labels[c - 1]).collect();
    Table { s: s - 1, labels, entries }
}

fn number_to_biguint(x: &serde_json::Number) -> Result<BigUint, String> {
    BigUint::from_str(&x.to_string())
        .map_err(|_| format!("entry {x} is not a non-negative integer"))
}

fn biguint_to_number(x: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_str_radix(10)).expect("digits form a JSON number")
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    s: usize,
    labels: Vec<usize>,
    entries: Vec<Vec<serde_json::Number>>,
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TableRepr {
            s: self.s,
            labels: self.labels.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(biguint_to_number).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Table {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.s + 1 {
            return Err(D::Error::custom(format!(
                "s = {} requires {} rows, got {}",
                repr.s,
                repr.s + 1,
                repr.entries.len()
            )));
        }
        let mut entries = Vec::with_capacity(repr.entries.len());
        for row in &repr.entries {
            entries.push(
                row.iter()
                    .map(number_to_biguint)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?,
            );
        }
        validate_table(entries, repr.labels).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct GeneralisedRepr {
    n_total: usize,
    tables: Vec<Table>,
}

impl Serialize for GeneralisedTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GeneralisedRepr { n_total: self.n_total, tables: self.tables.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GeneralisedTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GeneralisedRepr::deserialize(deserializer)?;
        GeneralisedTable::new(repr.n_total, repr.tables).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tb(labels: &[usize], rows: &[&[u64]]) -> Table {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&e| BigUint::from(e)).collect())
            .collect();
        validate_table(entries, labels.to_vec()).unwrap()
    }

    fn try_tb(labels: &[usize], rows: &[&[u64]]) -> Result<Table, TableError> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&e| BigUint::from(e)).collect())
            .collect();
        validate_table(entries, labels.to_vec())
    }

    fn mi(n: usize, rows: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(n, rows)
    }

    fn t1() -> Table {
        tb(&[1, 2, 3, 4], &[&[12, 7, 5, 4], &[3, 4, 3, 2], &[0, 3, 2, 1]])
    }

    fn t2() -> Table {
        tb(&[1, 2, 3, 4], &[&[12, 7, 5, 4], &[3, 7, 3, 2]])
    }

    fn t3() -> Table {
        tb(&[1, 2, 3, 4], &[&[9, 7, 5, 4]])
    }

    fn union_example() -> GeneralisedTable {
        GeneralisedTable::new(
            8,
            vec![
                tb(&[2, 3, 5, 7], &[&[12, 9, 6, 4], &[3, 6, 3, 1], &[0, 2, 2, 1]]),
                tb(&[4], &[&[3]]),
                tb(&[1, 6, 8], &[&[8, 6, 7], &[5, 3, 5]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn test_validate() {
        assert!(try_tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2]]).is_ok());
        // labels name variables, not positions
        assert!(try_tb(&[2, 3, 1], &[&[5, 7, 9], &[2, 1, 4]]).is_ok());
        assert_eq!(
            try_tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 1]]),
            Err(TableError::Invalid(vec![TableViolation::III { col: 1 }]))
        );
        assert_eq!(
            try_tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2], &[1, 0, 1]]),
            Err(TableError::Invalid(vec![TableViolation::I { row: 2, col: 1 }]))
        );
        assert_eq!(
            try_tb(&[1, 1, 3], &[&[4, 3, 3], &[3, 2, 2]]),
            Err(TableError::DuplicateLabel(1))
        );
        assert_eq!(
            try_tb(&[1, 2], &[&[4, 3, 3], &[3, 2, 2]]),
            Err(TableError::LabelCount { expected: 3, got: 2 })
        );
        assert_eq!(
            try_tb(&[1, 2], &[&[2, 2], &[1, 1], &[0, 1]]),
            Err(TableError::BadShape { rows: 3, cols: 2 })
        );
    }

    #[test]
    fn test_generators_small() {
        let t = tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2]]);
        assert_eq!(
            t.generators(),
            mi(3, &[&[4, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 0], &[1, 0, 1]])
        );
    }

    #[test]
    fn test_generators_difftables() {
        let g1 = t1().generators();
        assert_eq!(g1.generators().len(), 9);
        assert_eq!(
            g1,
            mi(
                4,
                &[
                    &[12, 0, 0, 0],
                    &[0, 7, 0, 0],
                    &[0, 0, 5, 0],
                    &[0, 0, 0, 4],
                    &[9, 3, 0, 0],
                    &[9, 0, 2, 0],
                    &[9, 0, 0, 2],
                    &[9, 0, 0, 0],
                    &[9, 0, 0, 1],
                ]
            )
        );
        let minimal = mi(4, &[&[9, 0, 0, 0], &[0, 7, 0, 0], &[0, 0, 5, 0], &[0, 0, 0, 4]]);
        assert_eq!(g1.minimalize(), minimal);
        let g2 = t2().generators();
        assert_eq!(g2.generators().len(), 7);
        assert!(g1.equal_ideals(&g2));
        assert!(g1.equal_ideals(&t3().generators()));
    }

    #[test]
    fn test_generators_union() {
        let ideal = union_example().generators();
        assert_eq!(ideal.generators().len(), 15);
        assert_eq!(
            ideal,
            mi(
                8,
                &[
                    &[0, 12, 0, 0, 0, 0, 0, 0],
                    &[0, 0, 9, 0, 0, 0, 0, 0],
                    &[0, 0, 0, 0, 6, 0, 0, 0],
                    &[0, 0, 0, 0, 0, 0, 4, 0],
                    &[0, 9, 3, 0, 0, 0, 0, 0],
                    &[0, 9, 0, 0, 3, 0, 0, 0],
                    &[0, 9, 0, 0, 0, 0, 3, 0],
                    &[0, 9, 1, 0, 1, 0, 0, 0],
                    &[0, 9, 1, 0, 0, 0, 2, 0],
                    &[0, 0, 0, 3, 0, 0, 0, 0],
                    &[8, 0, 0, 0, 0, 0, 0, 0],
                    &[0, 0, 0, 0, 0, 6, 0, 0],
                    &[0, 0, 0, 0, 0, 0, 0, 7],
                    &[3, 0, 0, 0, 0, 3, 0, 0],
                    &[3, 0, 0, 0, 0, 0, 0, 2],
                ]
            )
        );
        // singleton (0,1)-tables in a union give exactly the pure powers
        let singles = GeneralisedTable::new(
            4,
            vec![tb(&[1], &[&[9]]), tb(&[2], &[&[7]]), tb(&[3], &[&[5]]), tb(&[4], &[&[4]])],
        )
        .unwrap();
        assert_eq!(
            singles.generators(),
            mi(4, &[&[9, 0, 0, 0], &[0, 7, 0, 0], &[0, 0, 5, 0], &[0, 0, 0, 4]])
        );
    }

    #[test]
    fn test_normal_form_report() {
        let report = t1().normal_form_report();
        assert!(report.diag_zeros.is_empty());
        assert!(report.almost_zero_columns.is_empty());
        assert_eq!(report.singular_columns, vec![2, 3]);
        assert!(t3().normal_form_report().is_empty());
        let diag_zero = tb(&[1, 2], &[&[2, 5], &[0, 2]]);
        assert_eq!(diag_zero.normal_form_report().diag_zeros, vec![1]);
        let almost_zero = tb(&[1, 2, 3], &[&[3, 4, 5], &[2, 0, 3]]);
        assert_eq!(almost_zero.normal_form_report().almost_zero_columns, vec![2]);
    }

    #[test]
    fn test_reduce_difftables() {
        let expected = GeneralisedTable::new(
            4,
            vec![tb(&[1], &[&[9]]), tb(&[2], &[&[7]]), tb(&[3], &[&[5]]), tb(&[4], &[&[4]])],
        )
        .unwrap();
        for t in [t1(), t2(), t3()] {
            let ideal = t.generators();
            let reduced = t.to_generalised().reduce_to_normal_form().unwrap();
            assert_eq!(reduced, expected);
            assert!(reduced.generators().equal_ideals(&ideal));
        }
    }

    #[test]
    fn test_reduce_union_canonicalises() {
        let union = union_example();
        let reduced = union.reduce_to_normal_form().unwrap();
        let expected = GeneralisedTable::new(
            8,
            vec![
                tb(&[1, 8, 6], &[&[8, 7, 6], &[5, 5, 3]]),
                tb(&[2, 3, 5, 7], &[&[12, 9, 6, 4], &[3, 6, 3, 1], &[0, 2, 2, 1]]),
                tb(&[4], &[&[3]]),
            ],
        )
        .unwrap();
        assert_eq!(reduced, expected);
        assert!(reduced.generators().equal_ideals(&union.generators()));
        for t in reduced.tables() {
            assert!(t.normal_form_report().is_empty());
        }
    }

    #[test]
    fn test_reduce_rule1_and_rule2() {
        // diagonal zero: cutting keeps the ideal
        let t = tb(&[1, 2], &[&[2, 5], &[0, 2]]);
        let reduced = t.to_generalised().reduce_to_normal_form().unwrap();
        let expected =
            GeneralisedTable::new(2, vec![tb(&[1], &[&[2]]), tb(&[2], &[&[5]])]).unwrap();
        assert_eq!(reduced, expected);
        assert!(reduced.generators().equal_ideals(&t.generators()));
        // almost-zero unconstrained column splits off
        let t = tb(&[1, 2, 3], &[&[3, 4, 5], &[2, 0, 3]]);
        let reduced = t.to_generalised().reduce_to_normal_form().unwrap();
        assert_eq!(reduced.tables().len(), 2);
        assert!(reduced.generators().equal_ideals(&t.generators()));
        for m in reduced.tables() {
            assert!(m.normal_form_report().is_empty());
        }
    }

    #[test]
    fn test_reduce_improper() {
        let zero_degree = tb(&[1], &[&[0]]);
        assert_eq!(
            zero_degree.to_generalised().reduce_to_normal_form(),
            Err(TableError::Improper { label: 1 })
        );
        // all degrees positive, but m_{1,2} = 1: the hidden unit is caught
        let hidden = tb(&[1, 2], &[&[1, 1], &[1, 1]]);
        assert!(hidden.generators().is_unit());
        assert!(matches!(
            hidden.to_generalised().reduce_to_normal_form(),
            Err(TableError::Improper { .. })
        ));
    }

    #[test]
    fn test_max_socle_degree() {
        let t = tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2]]);
        assert_eq!(t.max_socle_degree().unwrap(), BigUint::from(4u32));
        assert_eq!(tb(&[1], &[&[5]]).max_socle_degree().unwrap(), BigUint::from(4u32));
        let two = tb(&[1, 2], &[&[2, 2]]);
        assert_eq!(two.max_socle_degree().unwrap(), BigUint::from(2u32));
        assert_eq!(
            two.generators().hilbert_function(1000).unwrap(),
            vec![1, 2, 1]
        );
        assert_eq!(
            tb(&[1, 2], &[&[1, 1], &[1, 1]]).max_socle_degree(),
            Err(TableError::Improper { label: 2 })
        );
    }

    #[test]
    fn test_socle_matches_hilbert_top_degree() {
        for t in [t1(), t2(), t3(), tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2]])] {
            let h = t.generators().hilbert_function(20000).unwrap();
            let socle = usize::try_from(t.max_socle_degree().unwrap()).unwrap();
            assert_eq!(h.len() - 1, socle);
        }
        // socle degrees add over disjoint unions
        let union = GeneralisedTable::new(
            5,
            vec![
                tb(&[1, 4], &[&[3, 4], &[1, 3]]),
                tb(&[2, 5], &[&[2, 3]]),
                tb(&[3], &[&[2]]),
            ],
        )
        .unwrap();
        let h = union.generators().hilbert_function(20000).unwrap();
        assert_eq!(union.max_socle_degree().unwrap(), BigUint::from(8u32));
        assert_eq!(h.len() - 1, 8);
    }

    #[test]
    fn test_permute_unconstrained_columns() {
        let t = tb(&[1, 2, 3], &[&[4, 3, 3], &[3, 2, 2]]);
        let p = tb(&[1, 3, 2], &[&[4, 3, 3], &[3, 2, 2]]);
        assert!(t.generators().equal_ideals(&p.generators()));
        let q = tb(&[2, 3, 5, 7], &[&[12, 9, 6, 4], &[3, 6, 3, 1], &[0, 2, 2, 1]]);
        let q_perm = tb(&[2, 3, 7, 5], &[&[12, 9, 4, 6], &[3, 6, 1, 3], &[0, 2, 1, 2]]);
        assert!(q.generators_in(8).equal_ideals(&q_perm.generators_in(8)));
    }

    #[test]
    fn test_serde_table() {
        let text = r#"{"s":2,"labels":[1,2,3,4],"entries":[[12,7,5,4],[3,4,3,2],[0,3,2,1]]}"#;
        let t: Table = serde_json::from_str(text).unwrap();
        assert_eq!(t, t1());
        assert_eq!(serde_json::to_string(&t).unwrap(), text);
        let bad = r#"{"s":1,"labels":[1,2,3],"entries":[[4,3,3],[3,2,1]]}"#;
        let err = serde_json::from_str::<Table>(bad).unwrap_err().to_string();
        assert!(err.contains("violated"), "{err}");
        let wrong_rows = r#"{"s":2,"labels":[1,2,3],"entries":[[4,3,3],[3,2,2]]}"#;
        assert!(serde_json::from_str::<Table>(wrong_rows).is_err());
    }

    #[test]
    fn test_serde_generalised() {
        let text = serde_json::to_string(&union_example()).unwrap();
        let back: GeneralisedTable = serde_json::from_str(&text).unwrap();
        assert_eq!(back, union_example());
        let overlap = r#"{"n_total":2,"tables":[{"s":0,"labels":[1],"entries":[[2]]},{"s":0,"labels":[1],"entries":[[3]]}]}"#;
        assert!(serde_json::from_str::<GeneralisedTable>(overlap).is_err());
    }
}
