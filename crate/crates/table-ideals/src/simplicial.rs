//! The weighted simplicial complex attached to a monomial ideal: faces are
//! supports of minimal generators, weighted by how many generators share the
//! support.

use std::collections::BTreeMap;

use num_traits::Zero;
use petgraph::unionfind::UnionFind;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::monomial::MonomialIdeal;
use crate::table::GeneralisedTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("the unit ideal has no complex")]
    UnitIdeal,
    #[error("empty complex has no dimension")]
    Empty,
    #[error("variable x{0} lies in no face")]
    IsolatedVariable(usize),
}

/// A weighted simplicial complex on vertices 1..=n. Faces are sorted lists of
/// variable indices; the downward closure is generated by the positively
/// weighted faces and is never materialised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedComplex {
    n: usize,
    faces: BTreeMap<Vec<usize>, u64>,
}

impl WeightedComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Faces with explicitly recorded weights (including recorded zeros).
    pub fn faces(&self) -> &BTreeMap<Vec<usize>, u64> {
        &self.faces
    }

    /// Recorded weight of a face; faces present only in the closure weigh 0.
    pub fn weight(&self, face: &[usize]) -> u64 {
        self.faces.get(face).copied().unwrap_or(0)
    }

    /// Whether the face lies in the downward closure of the positively
    /// weighted faces.
    pub fn closure_contains(&self, face: &[usize]) -> bool {
        self.faces
            .iter()
            .filter(|(_, &w)| w > 0)
            .any(|(big, _)| face.iter().all(|v| big.contains(v)))
    }

    /// Records a face at weight 0 (a ladder slot with no minimal generator).
    /// Skips faces already recorded and faces outside the closure, so the
    /// facet invariant survives.
    pub fn record_zero_face(&mut self, mut vars: Vec<usize>) {
        vars.sort_unstable();
        vars.dedup();
        assert!(!vars.is_empty() && vars.iter().all(|&v| 1 <= v && v <= self.n));
        if !self.faces.contains_key(&vars) && self.closure_contains(&vars) {
            self.faces.insert(vars, 0);
        }
    }

    /// (max face cardinality) − 1.
    pub fn dimension(&self) -> Result<usize, ComplexError> {
        self.faces.keys().map(|f| f.len() - 1).max().ok_or(ComplexError::Empty)
    }

    /// Partition of {1..n} by 1-skeleton connectivity; every variable must
    /// occur in some face.
    pub fn connected_components(&self) -> Result<Vec<Vec<usize>>, ComplexError> {
        let mut uf = UnionFind::<usize>::new(self.n);
        let mut seen = vec![false; self.n];
        for face in self.faces.keys() {
            for &v in face {
                seen[v - 1] = true;
            }
            for pair in face.windows(2) {
                uf.union(pair[0] - 1, pair[1] - 1);
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(ComplexError::IsolatedVariable(v + 1));
        }
        let labeling = uf.into_labeling();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            groups.entry(labeling[v]).or_default().push(v + 1);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| g[0]);
        Ok(out)
    }
}

impl Serialize for WeightedComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct FaceRepr<'a> {
            vars: &'a [usize],
            weight: u64,
        }
        let faces: Vec<FaceRepr> =
            self.faces.iter().map(|(vars, &weight)| FaceRepr { vars, weight }).collect();
        let mut st = serializer.serialize_struct("WeightedComplex", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("faces", &faces)?;
        st.end()
    }
}

/// Complex of a monomial ideal: one face per minimal-generator support,
/// weighted by the number of minimal generators sharing it.
pub fn build_complex(ideal: &MonomialIdeal) -> Result<WeightedComplex, ComplexError> {
    if ideal.is_unit() {
        return Err(ComplexError::UnitIdeal);
    }
    let minimal = ideal.minimalize();
    let mut faces: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for g in minimal.generators() {
        let face: Vec<usize> = g.support().into_iter().map(|t| t + 1).collect();
        *faces.entry(face).or_insert(0) += 1;
    }
    Ok(WeightedComplex { n: ideal.n(), faces })
}

/// Complex of a generalised table's ideal with the empty ladder slots of each
/// member recorded at weight 0. Meaningful for members in normal form, where
/// generator supports fill the ladder exactly.
pub fn complex_from_generalised(g: &GeneralisedTable) -> Result<WeightedComplex, ComplexError> {
    let mut complex = build_complex(&g.generators())?;
    for member in g.tables() {
        for i in 1..=member.s() {
            for j in i + 1..=member.n() {
                if !member.alpha(i, j).is_zero() {
                    continue;
                }
                // support of the slot's monomial: constrained variables whose
                // running exponent stays positive, plus column j's remainder
                let mut face = Vec::new();
                for t in 1..=i {
                    let spent: num_bigint::BigUint = (1..=i).map(|r| member.alpha(r, t)).sum();
                    if member.d(t) > &spent {
                        face.push(member.labels()[t - 1]);
                    }
                }
                let spent: num_bigint::BigUint = (1..=i).map(|r| member.alpha(r, j)).sum();
                if member.d(j) > &spent {
                    face.push(member.labels()[j - 1]);
                }
                if !face.is_empty() {
                    complex.record_zero_face(face);
                }
            }
        }
    }
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::validate_table;
    use num_bigint::BigUint;

    fn ideal(n: usize, gens: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_exponents(n, gens)
    }

    fn tb(labels: &[usize], rows: &[&[u64]]) -> crate::table::Table {
        let entries =
            rows.iter().map(|r| r.iter().map(|&e| BigUint::from(e)).collect()).collect();
        validate_table(entries, labels.to_vec()).unwrap()
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
    fn test_build_complex_one_colour() {
        let c = build_complex(&ideal(
            3,
            &[&[4, 0, 0], &[0, 3, 0], &[0, 0, 3], &[1, 1, 0], &[1, 0, 1]],
        ))
        .unwrap();
        let faces: Vec<(Vec<usize>, u64)> =
            c.faces().iter().map(|(f, &w)| (f.clone(), w)).collect();
        assert_eq!(
            faces,
            vec![
                (vec![1], 1),
                (vec![1, 2], 1),
                (vec![1, 3], 1),
                (vec![2], 1),
                (vec![3], 1)
            ]
        );
        assert_eq!(c.dimension().unwrap(), 1);
        assert_eq!(c.connected_components().unwrap(), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn test_build_complex_vertices_only() {
        let c = build_complex(&ideal(2, &[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(c.faces().len(), 2);
        assert_eq!(c.dimension().unwrap(), 0);
        assert_eq!(c.connected_components().unwrap(), vec![vec![1], vec![2]]);
    }

    #[test]
    fn test_build_complex_errors() {
        assert_eq!(build_complex(&MonomialIdeal::unit(3)), Err(ComplexError::UnitIdeal));
        let empty = build_complex(&MonomialIdeal::from_exponents(2, &[])).unwrap();
        assert_eq!(empty.dimension(), Err(ComplexError::Empty));
        let partial = build_complex(&ideal(2, &[&[2, 0]])).unwrap();
        assert_eq!(partial.connected_components(), Err(ComplexError::IsolatedVariable(2)));
    }

    #[test]
    fn test_union_complex() {
        let g = union_example();
        let c = build_complex(&g.generators()).unwrap();
        assert_eq!(
            c.connected_components().unwrap(),
            vec![vec![1, 6, 8], vec![2, 3, 5, 7], vec![4]]
        );
        assert_eq!(c.dimension().unwrap(), 2);
        assert_eq!(c.faces().len(), 15);
        assert!(c.faces().values().all(|&w| w == 1));
        assert_eq!(c.weight(&[2, 3, 5]), 1);
        assert_eq!(c.weight(&[3, 5]), 0);
        assert!(c.closure_contains(&[3, 5]));
        assert!(c.closure_contains(&[3, 7]));
        assert!(!c.closure_contains(&[5, 7]));
        assert!(!c.closure_contains(&[2, 4]));
    }

    #[test]
    fn test_complex_from_generalised_matches_ideal_when_ladder_full() {
        // every slot of the union example carries a nonzero entry, so the
        // table-derived complex lists the same 15 faces as the ideal's
        let g = union_example();
        let c = complex_from_generalised(&g).unwrap();
        assert_eq!(&c, &build_complex(&g.generators()).unwrap());
        assert_eq!(c.faces().len(), 15);
    }

    #[test]
    fn test_complex_from_generalised_records_ladder_zeros() {
        // slot (1,3) is empty: x1*x3^3 is a multiple of x3^3, so no minimal
        // generator has support {1,3}, yet the slot face gets recorded at 0
        let t = tb(&[1, 2, 3], &[&[2, 3, 3], &[1, 1, 0], &[0, 1, 2]]);
        let g = GeneralisedTable::new(3, vec![t]).unwrap();
        let c = complex_from_generalised(&g).unwrap();
        let faces: Vec<(Vec<usize>, u64)> =
            c.faces().iter().map(|(f, &w)| (f.clone(), w)).collect();
        assert_eq!(
            faces,
            vec![
                (vec![1], 1),
                (vec![1, 2], 1),
                (vec![1, 2, 3], 1),
                (vec![1, 3], 0),
                (vec![2], 1),
                (vec![3], 1)
            ]
        );
        // the ideal alone shows only the five positive faces
        assert_eq!(build_complex(&g.generators()).unwrap().faces().len(), 5);
        // recorded zeros must not disturb connectivity or dimension
        assert_eq!(c.dimension().unwrap(), 2);
        assert_eq!(c.connected_components().unwrap(), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn test_five_variable_dimension() {
        let c = build_complex(&ideal(
            5,
            &[
                &[2, 0, 0, 0, 0],
                &[0, 4, 0, 0, 0],
                &[0, 0, 7, 0, 0],
                &[0, 0, 0, 8, 0],
                &[0, 0, 0, 0, 10],
                &[1, 2, 3, 1, 2],
            ],
        ))
        .unwrap();
        assert_eq!(c.dimension().unwrap(), 4);
        assert_eq!(c.connected_components().unwrap(), vec![vec![1, 2, 3, 4, 5]]);
    }

    #[test]
    fn test_complex_json() {
        let c = build_complex(&ideal(2, &[&[2, 0], &[1, 1], &[0, 3]])).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"faces":[{"vars":[1],"weight":1},{"vars":[1,2],"weight":1},{"vars":[2],"weight":1}]}"#
        );
    }
}
