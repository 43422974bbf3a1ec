//! Decides whether a monomial ideal is generated by a table and, if so,
//! reconstructs the unique generalised table in normal form.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::monomial::{Monomial, MonomialIdeal};
use crate::simplicial::build_complex;
use crate::table::{validate_table, GeneralisedTable, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Table,
    NotTable,
}

/// Why an ideal failed to be a table ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NonArtinian,
    Improper,
    EmptyF,
    TiedPurePowers,
    DimensionMismatch,
    NonLadderSupport,
    InconsistentAlphas,
    ConditionViolation,
    NotNormalForm,
    RegenerationMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionOutcome {
    pub verdict: Verdict,
    pub reason: Option<Reason>,
    pub table: Option<GeneralisedTable>,
}

impl RecognitionOutcome {
    fn rejected(reason: Reason) -> Self {
        RecognitionOutcome { verdict: Verdict::NotTable, reason: Some(reason), table: None }
    }

    pub fn is_table(&self) -> bool {
        self.verdict == Verdict::Table
    }
}

fn mixed_generators(ideal: &MonomialIdeal) -> Vec<&Monomial> {
    ideal.generators().iter().filter(|g| g.support().len() >= 2).collect()
}

/// Pure-power exponent of the 1-based variable `v`, if the ideal has that
/// generator.
fn pure_power_of(ideal: &MonomialIdeal, v: usize) -> Option<&BigUint> {
    ideal
        .generators()
        .iter()
        .find(|g| g.support() == [v - 1])
        .map(|g| &g.0[v - 1])
}

/// Variables whose exponent is the same (and positive) in every generator
/// other than the pure powers — the candidates for the first constrained
/// variable. Returns None when there are no such generators at all.
pub fn possible_first_variables(ideal: &MonomialIdeal) -> Option<Vec<usize>> {
    let mixed = mixed_generators(ideal);
    let first = mixed.first()?;
    let candidates = (0..ideal.n()).filter(|&t| {
        let e = &first.0[t];
        !e.is_zero() && mixed.iter().all(|g| &g.0[t] == e)
    });
    Some(candidates.map(|t| t + 1).collect())
}

/// Iteratively picks constrained variables: the candidate with the strictly
/// smallest pure-power exponent wins, the ideal is divided by its common
/// exponent, and the leftover pure power plus any variables left without
/// neighbours are dropped. Returns the variables in constraint order.
pub fn constrained_order(ideal: &MonomialIdeal) -> Result<Vec<usize>, Reason> {
    let s = match mixed_generators(ideal).iter().map(|g| g.support().len()).max() {
        Some(width) => width - 1,
        None => return Ok(Vec::new()),
    };
    let mut current = ideal.clone();
    let mut order = Vec::with_capacity(s);
    for _ in 0..s {
        let candidates = match possible_first_variables(&current) {
            Some(f) => f,
            None => return Err(Reason::DimensionMismatch),
        };
        let mut ranked: Vec<(&BigUint, usize)> = candidates
            .into_iter()
            .filter_map(|v| pure_power_of(&current, v).map(|d| (d, v)))
            .collect();
        ranked.sort();
        match ranked.as_slice() {
            [] => return Err(Reason::EmptyF),
            [_] => {}
            [(d0, _), (d1, _), ..] if d0 == d1 => return Err(Reason::TiedPurePowers),
            _ => {}
        }
        let (_, chosen) = ranked[0];
        let e = mixed_generators(&current)[0].0[chosen - 1].clone();
        let quotient = current.colon_by_monomial(&Monomial::pure_power(current.n(), chosen - 1, e));
        let mixed: Vec<Monomial> =
            quotient.generators().iter().filter(|g| g.support().len() >= 2).cloned().collect();
        let active: BTreeSet<usize> =
            mixed.iter().flat_map(|g| g.support()).collect();
        let mut kept = mixed;
        for g in quotient.generators() {
            if let [t] = g.support()[..] {
                if active.contains(&t) {
                    kept.push(g.clone());
                }
            }
        }
        current = MonomialIdeal::new(current.n(), kept);
        order.push(chosen);
    }
    if !mixed_generators(&current).is_empty() {
        return Err(Reason::DimensionMismatch);
    }
    Ok(order)
}

/// Rebuilds the table of a connected component: `order` names the constrained
/// variables in constraint order; the remaining variables of the ideal follow
/// in increasing order. Every generator beyond the pure powers must cover
/// positions {1..i} ∪ {j}; its exponents pin down the column entries and the
/// running diagonal sums, and all determinations must agree.
pub fn fill_table(ideal: &MonomialIdeal, order: &[usize]) -> Result<Table, Reason> {
    let in_order: BTreeSet<usize> = order.iter().copied().collect();
    let mut vars: BTreeSet<usize> = ideal
        .generators()
        .iter()
        .flat_map(|g| g.support().into_iter().map(|t| t + 1))
        .collect();
    for &v in order {
        vars.insert(v);
    }
    let labels: Vec<usize> =
        order.iter().copied().chain(vars.iter().copied().filter(|v| !in_order.contains(v))).collect();
    let n = labels.len();
    let s = order.len();
    let pos_of: HashMap<usize, usize> =
        labels.iter().enumerate().map(|(p, &v)| (v, p + 1)).collect();

    let mut d = Vec::with_capacity(n);
    for &v in &labels {
        match pure_power_of(ideal, v) {
            Some(e) => d.push(e.clone()),
            None => return Err(Reason::NonArtinian),
        }
    }

    // (i, j, generator) for each non-pure generator, sorted so lower rows are
    // final before deeper rows consult them
    let mut slots: Vec<(usize, usize, &Monomial)> = Vec::new();
    for g in mixed_generators(ideal) {
        let mapped: Vec<usize> = {
            let mut m: Vec<usize> = g.support().iter().map(|&t| pos_of[&(t + 1)]).collect();
            m.sort_unstable();
            m
        };
        let i = mapped.len() - 1;
        let j = mapped[i];
        if i > s || !(1..=i).eq(mapped[..i].iter().copied()) {
            return Err(Reason::NonLadderSupport);
        }
        slots.push((i, j, g));
    }
    slots.sort_by_key(|&(i, j, _)| (i, j));

    let mut alpha = vec![vec![BigUint::zero(); n]; s + 1];
    alpha[0] = d.clone();
    let mut filled = vec![vec![false; n]; s + 1];
    let mut column_sum: Vec<Option<BigUint>> = vec![None; s + 1];
    for (i, j, g) in slots {
        let e_j = &g.0[labels[j - 1] - 1];
        let lower: BigUint = alpha[1..i].iter().map(|row| &row[j - 1]).sum();
        let spent = &lower + e_j;
        if d[j - 1] < spent {
            return Err(Reason::InconsistentAlphas);
        }
        let value = &d[j - 1] - spent;
        if filled[i][j - 1] {
            if alpha[i][j - 1] != value {
                return Err(Reason::InconsistentAlphas);
            }
        } else {
            alpha[i][j - 1] = value;
            filled[i][j - 1] = true;
        }
        for t in 1..=i {
            let e_t = &g.0[labels[t - 1] - 1];
            if d[t - 1] < *e_t {
                return Err(Reason::InconsistentAlphas);
            }
            let sum_t = &d[t - 1] - e_t;
            match &column_sum[t] {
                Some(prev) if *prev != sum_t => return Err(Reason::InconsistentAlphas),
                Some(_) => {}
                None => column_sum[t] = Some(sum_t),
            }
        }
    }
    for t in 1..=s {
        let Some(total) = column_sum[t].take() else {
            return Err(Reason::DimensionMismatch);
        };
        let off_diagonal: BigUint = alpha[1..t].iter().map(|row| &row[t - 1]).sum();
        if total < off_diagonal {
            return Err(Reason::InconsistentAlphas);
        }
        alpha[t][t - 1] = total - off_diagonal;
    }
    validate_table(alpha, labels).map_err(|_| Reason::ConditionViolation)
}

/// Full decision procedure: minimalize, require Artinian, split into the
/// connected components of the support complex, rebuild each component's
/// table, and accept only if the regenerated ideal matches.
pub fn recognize(ideal: &MonomialIdeal) -> RecognitionOutcome {
    let k = ideal.minimalize();
    if k.is_unit() {
        return RecognitionOutcome::rejected(Reason::Improper);
    }
    if !k.is_artinian() {
        return RecognitionOutcome::rejected(Reason::NonArtinian);
    }
    let complex = build_complex(&k).expect("non-unit ideal always has a complex");
    let components = complex
        .connected_components()
        .expect("an Artinian ideal covers every variable");
    let mut members = Vec::with_capacity(components.len());
    for component in components {
        let comp: BTreeSet<usize> = component.iter().copied().collect();
        let gens: Vec<Monomial> = k
            .generators()
            .iter()
            .filter(|g| g.support().iter().all(|&t| comp.contains(&(t + 1))))
            .cloned()
            .collect();
        let sub = MonomialIdeal::new(k.n(), gens);
        let order = match constrained_order(&sub) {
            Ok(order) => order,
            Err(reason) => return RecognitionOutcome::rejected(reason),
        };
        let table = match fill_table(&sub, &order) {
            Ok(table) => table,
            Err(reason) => return RecognitionOutcome::rejected(reason),
        };
        if !table.normal_form_report().is_empty() {
            return RecognitionOutcome::rejected(Reason::NotNormalForm);
        }
        if !table.generators_in(k.n()).equal_ideals(&sub) {
            return RecognitionOutcome::rejected(Reason::RegenerationMismatch);
        }
        members.push(table);
    }
    let assembled = GeneralisedTable::new(k.n(), members)
        .expect("component labels are disjoint")
        .canonical();
    RecognitionOutcome { verdict: Verdict::Table, reason: None, table: Some(assembled) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(n: usize, gens: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(n, gens)
    }

    fn tb(labels: &[usize], rows: &[&[u64]]) -> Table {
        let entries =
            rows.iter().map(|r| r.iter().map(|&e| BigUint::from(e)).collect()).collect();
        validate_table(entries, labels.to_vec()).unwrap()
    }

    fn two_colour_example(a: u64) -> MonomialIdeal {
        ideal(3, &[&[9, 0, 0], &[0, 5, 0], &[0, 0, 7], &[6, 2, 0], &[a, 2, 1]])
    }

    #[test]
    fn test_possible_first_variables() {
        let f = possible_first_variables(&ideal(
            3,
            &[&[4, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 0], &[1, 0, 1]],
        ));
        assert_eq!(f, Some(vec![1]));
        let f = possible_first_variables(&ideal(
            3,
            &[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6], &[2, 1, 0], &[3, 0, 1]],
        ));
        assert_eq!(f, Some(vec![]));
        let f = possible_first_variables(&ideal(
            5,
            &[
                &[2, 0, 0, 0, 0],
                &[0, 4, 0, 0, 0],
                &[0, 0, 7, 0, 0],
                &[0, 0, 0, 8, 0],
                &[0, 0, 0, 0, 10],
                &[1, 2, 3, 1, 2],
            ],
        ));
        assert_eq!(f, Some(vec![1, 2, 3, 4, 5]));
        assert_eq!(possible_first_variables(&ideal(2, &[&[2, 0], &[0, 2]])), None);
    }

    #[test]
    fn test_constrained_order() {
        assert_eq!(constrained_order(&two_colour_example(4)), Ok(vec![2, 1]));
        let five = ideal(
            5,
            &[
                &[2, 0, 0, 0, 0],
                &[0, 4, 0, 0, 0],
                &[0, 0, 7, 0, 0],
                &[0, 0, 0, 8, 0],
                &[0, 0, 0, 0, 10],
                &[1, 2, 3, 1, 2],
            ],
        );
        assert_eq!(constrained_order(&five), Ok(vec![1, 2, 3, 4]));
        let empty_f = ideal(3, &[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6], &[2, 1, 0], &[3, 0, 1]]);
        assert_eq!(constrained_order(&empty_f), Err(Reason::EmptyF));
    }

    #[test]
    fn test_fill_table_two_colours() {
        let table = fill_table(&two_colour_example(4), &[2, 1]).unwrap();
        assert_eq!(table, tb(&[2, 1, 3], &[&[5, 9, 7], &[3, 3, 0], &[0, 2, 6]]));
    }

    #[test]
    fn test_fill_table_rejects() {
        // support {2,3} skips the first constrained position
        let skip = ideal(3, &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[0, 1, 1]]);
        assert_eq!(fill_table(&skip, &[1]), Err(Reason::NonLadderSupport));
        // same support, incompatible exponents
        let clash = ideal(
            3,
            &[&[3, 0, 0], &[0, 5, 0], &[0, 0, 5], &[1, 2, 2], &[2, 2, 1]],
        );
        assert_eq!(fill_table(&clash, &[1, 2]), Err(Reason::InconsistentAlphas));
    }

    #[test]
    fn test_recognize_two_colour_family() {
        let outcome = recognize(&two_colour_example(4));
        assert_eq!(outcome.verdict, Verdict::Table);
        assert_eq!(outcome.reason, None);
        let expected = GeneralisedTable::new(
            3,
            vec![tb(&[2, 1, 3], &[&[5, 9, 7], &[3, 3, 0], &[0, 2, 6]])],
        )
        .unwrap()
        .canonical();
        assert_eq!(outcome.table, Some(expected));
        for a in [1, 2, 3, 5] {
            let outcome = recognize(&two_colour_example(a));
            assert_eq!(outcome.verdict, Verdict::NotTable, "a = {a}");
            assert_eq!(outcome.reason, Some(Reason::ConditionViolation), "a = {a}");
        }
    }

    #[test]
    fn test_recognize_five_variables() {
        let outcome = recognize(&ideal(
            5,
            &[
                &[2, 0, 0, 0, 0],
                &[0, 4, 0, 0, 0],
                &[0, 0, 7, 0, 0],
                &[0, 0, 0, 8, 0],
                &[0, 0, 0, 0, 10],
                &[1, 2, 3, 1, 2],
            ],
        ));
        let expected = tb(
            &[1, 2, 3, 4, 5],
            &[
                &[2, 4, 7, 8, 10],
                &[1, 0, 0, 0, 0],
                &[0, 2, 0, 0, 0],
                &[0, 0, 4, 0, 0],
                &[0, 0, 0, 7, 8],
            ],
        );
        assert_eq!(outcome.table, Some(GeneralisedTable::new(5, vec![expected]).unwrap()));
    }

    #[test]
    fn test_recognize_pure_powers() {
        let outcome = recognize(&ideal(4, &[&[9, 0, 0, 0], &[0, 7, 0, 0], &[0, 0, 5, 0], &[0, 0, 0, 4]]));
        let expected = GeneralisedTable::new(
            4,
            vec![tb(&[1], &[&[9]]), tb(&[2], &[&[7]]), tb(&[3], &[&[5]]), tb(&[4], &[&[4]])],
        )
        .unwrap();
        assert_eq!(outcome.table, Some(expected));
    }

    #[test]
    fn test_recognize_union_round_trip() {
        let union = GeneralisedTable::new(
            8,
            vec![
                tb(&[2, 3, 5, 7], &[&[12, 9, 6, 4], &[3, 6, 3, 1], &[0, 2, 2, 1]]),
                tb(&[4], &[&[3]]),
                tb(&[1, 6, 8], &[&[8, 6, 7], &[5, 3, 5]]),
            ],
        )
        .unwrap();
        let outcome = recognize(&union.generators());
        assert_eq!(outcome.verdict, Verdict::Table);
        assert_eq!(outcome.table, Some(union.canonical()));
    }

    #[test]
    fn test_recognize_small_table_with_constrained_column_entry() {
        let t = tb(&[1, 2, 3], &[&[3, 3, 4], &[1, 1, 1], &[0, 1, 2]]);
        let g = GeneralisedTable::new(3, vec![t]).unwrap();
        let outcome = recognize(&g.generators());
        assert_eq!(outcome.verdict, Verdict::Table);
        assert_eq!(outcome.table, Some(g.canonical()));
    }

    #[test]
    fn test_recognize_two_variable_table() {
        let outcome = recognize(&ideal(2, &[&[2, 0], &[0, 3], &[1, 1]]));
        assert_eq!(outcome.table, Some(GeneralisedTable::new(2, vec![tb(&[1, 2], &[&[2, 3], &[1, 2]])]).unwrap()));
    }

    #[test]
    fn test_recognize_rejections() {
        let outcome = recognize(&ideal(2, &[&[2, 0], &[1, 1]]));
        assert_eq!(outcome.reason, Some(Reason::NonArtinian));
        let outcome = recognize(&ideal(2, &[&[0, 0]]));
        assert_eq!(outcome.reason, Some(Reason::Improper));
        let outcome = recognize(&ideal(2, &[&[2, 0], &[0, 2], &[1, 1]]));
        assert_eq!(outcome.reason, Some(Reason::TiedPurePowers));
        let outcome = recognize(&ideal(
            3,
            &[&[4, 0, 0], &[0, 5, 0], &[0, 0, 6], &[2, 1, 0], &[3, 0, 1]],
        ));
        assert_eq!(outcome.reason, Some(Reason::EmptyF));
        assert_eq!(outcome.table, None);
    }

    #[test]
    fn test_outcome_json() {
        let outcome = recognize(&ideal(2, &[&[2, 0], &[1, 1]]));
        let json = serde_json::to_value(&outcome).unwrap();
        assert_eq!(json["verdict"], "not_table");
        assert_eq!(json["reason"], "non_artinian");
        assert_eq!(json["table"], serde_json::Value::Null);
        let outcome = recognize(&ideal(1, &[&[3]]));
        let json = serde_json::to_value(&outcome).unwrap();
        assert_eq!(json["verdict"], "table");
        assert_eq!(json["reason"], serde_json::Value::Null);
        assert_eq!(json["table"]["n_total"], 1);
    }
}
