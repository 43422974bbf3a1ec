//! Random table sampling, labeled record families for the classification
//! experiments, and the flat-vector / support-graph encodings with writers.

use std::io::Write as _;
use std::path::Path;
use std::{fs, io};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monomial::{Monomial, MonomialIdeal};
use crate::recognition::{recognize, Verdict};
use crate::table::{validate_table, GeneralisedTable, Table};

/// Flat feature length for each supported variable count.
pub const FLAT_LENGTHS: [(usize, usize); 8] = [
    (3, 45),
    (4, 92),
    (5, 180),
    (6, 258),
    (7, 511),
    (8, 624),
    (9, 810),
    (10, 1070),
];

/// Flat feature length for `n` variables, if supported.
pub fn flat_length(n: usize) -> Option<usize> {
    FLAT_LENGTHS.iter().find(|&&(m, _)| m == n).map(|&(_, l)| l)
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("encoding needs {required} slots but the vector length is {available}")]
    VectorTooLong { required: usize, available: usize },
    #[error("an exponent does not fit in the signed 64-bit encoding")]
    ExponentOverflow,
    #[error("no flat vector length is defined for n = {0}")]
    UnsupportedWidth(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reverse-lexicographic row order: compare from the last coordinate
/// backwards; at the first difference the larger entry sorts first.
fn revlex_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match y.cmp(x) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Sorts exponent rows into the fixed revlex encoding order.
pub fn sort_rows(rows: &mut [Vec<i64>]) {
    rows.sort_by(|a, b| revlex_cmp(a, b));
}

fn monomial_rows(ideal: &MonomialIdeal) -> Result<Vec<Vec<i64>>, DatasetError> {
    ideal
        .generators()
        .iter()
        .map(|g| {
            g.0.iter()
                .map(|e| e.to_i64().ok_or(DatasetError::ExponentOverflow))
                .collect()
        })
        .collect()
}

/// Fixed-length feature vector: exponent rows concatenated in revlex order,
/// left-padded with zeros to `len`.
pub fn rows_vector(rows: &[Vec<i64>], len: usize) -> Result<Vec<i64>, DatasetError> {
    let required: usize = rows.iter().map(Vec::len).sum();
    if required > len {
        return Err(DatasetError::VectorTooLong {
            required,
            available: len,
        });
    }
    let mut sorted: Vec<&Vec<i64>> = rows.iter().collect();
    sorted.sort_by(|a, b| revlex_cmp(a, b));
    let mut v = vec![0i64; len - required];
    for row in sorted {
        v.extend_from_slice(row);
    }
    Ok(v)
}

/// [`rows_vector`] for the stored generators of a monomial ideal.
pub fn ideal_vector(ideal: &MonomialIdeal, len: usize) -> Result<Vec<i64>, DatasetError> {
    rows_vector(&monomial_rows(ideal)?, len)
}

/// Support-inclusion digraph of a generating set: one node per stored
/// generator, an edge `(i, j)` whenever `supp(m_i) ⊆ supp(m_j)` and `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealGraph {
    pub nodes: Vec<Vec<i64>>,
    pub edges: Vec<(usize, usize)>,
}

/// Encodes exponent rows as an [`IdealGraph`]; the support of a row is the
/// set of positions with a nonzero entry.
pub fn rows_graph(rows: &[Vec<i64>]) -> IdealGraph {
    let supports: Vec<Vec<usize>> = rows
        .iter()
        .map(|r| (0..r.len()).filter(|&t| r[t] != 0).collect())
        .collect();
    let mut edges = Vec::new();
    for i in 0..supports.len() {
        for j in 0..supports.len() {
            if i != j && is_subset(&supports[i], &supports[j]) {
                edges.push((i, j));
            }
        }
    }
    IdealGraph {
        nodes: rows.to_vec(),
        edges,
    }
}

/// [`rows_graph`] for the stored generators of a monomial ideal.
pub fn ideal_graph(ideal: &MonomialIdeal) -> Result<IdealGraph, DatasetError> {
    Ok(rows_graph(&monomial_rows(ideal)?))
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Bound on `n_max` keeping every derived quantity inside `i64`.
const N_MAX_LIMIT: u64 = 1 << 40;

const PROPER_ATTEMPTS: usize = 1000;

/// Random `(s, n)`-table with labels `1..=n`. Generating entries are uniform
/// in `[0, n_max]` and unconstrained degrees in `[1, n_max]`; each
/// unconstrained column is redrawn until its sum fits under its degree (with
/// a budgeted fallback), diagonals are drawn under the row budget the column
/// bound leaves them, and the constrained degrees follow from the degree
/// condition. Improper draws are resampled, so every returned table is valid
/// and proper.
pub fn random_table(s: usize, n: usize, n_max: u64, rng: &mut impl Rng) -> Table {
    random_table_with_labels(s, (1..=n).collect(), n_max, rng)
}

/// Same sampler as [`random_table`] but with an explicit label list.
pub fn random_table_with_labels(
    s: usize,
    labels: Vec<usize>,
    n_max: u64,
    rng: &mut impl Rng,
) -> Table {
    let n = labels.len();
    assert!(n >= 1 && s < n, "need 0 <= s < n");
    assert!((1..=N_MAX_LIMIT).contains(&n_max), "need 1 <= n_max <= 2^40");
    for _ in 0..PROPER_ATTEMPTS {
        let entries = sample_entries(s, n, n_max, rng);
        if entries[0].iter().any(|&d| d == 0) {
            continue;
        }
        debug_assert!(column_sums_bounded(&entries, s));
        let big = entries
            .iter()
            .map(|row| row.iter().map(|&e| BigUint::from(e)).collect())
            .collect();
        return validate_table(big, labels.clone())
            .expect("sampled entries satisfy the table conditions");
    }
    panic!("resampling failed to produce a proper table for s = {s}, n = {n}, n_max = {n_max}");
}

/// Draws an entry matrix satisfying the three table conditions: the upper
/// block and unconstrained columns first, then the diagonals (descending,
/// each capped by its row budget so the column bound holds), and finally the
/// constrained degrees from the degree condition.
fn sample_entries(s: usize, n: usize, n_max: u64, rng: &mut impl Rng) -> Vec<Vec<u64>> {
    let mut entries = vec![vec![0u64; n]; s + 1];
    for i in 1..=s {
        for j in i + 1..=s {
            entries[i][j - 1] = rng.gen_range(0..=n_max);
        }
    }
    for j in s + 1..=n {
        let dj = rng.gen_range(1..=n_max);
        entries[0][j - 1] = dj;
        let mut column: Option<Vec<u64>> = None;
        for _ in 0..64 {
            let c: Vec<u64> = (0..s).map(|_| rng.gen_range(0..=n_max)).collect();
            if c.iter().sum::<u64>() <= dj {
                column = Some(c);
                break;
            }
        }
        let column = column.unwrap_or_else(|| {
            let mut order: Vec<usize> = (0..s).collect();
            order.shuffle(rng);
            let mut c = vec![0u64; s];
            let mut budget = dj;
            for &i in &order {
                c[i] = rng.gen_range(0..=n_max.min(budget));
                budget -= c[i];
            }
            c
        });
        for i in 1..=s {
            entries[i][j - 1] = column[i - 1];
        }
    }
    for k in (1..=s).rev() {
        let right: u64 = (k + 1..=n).map(|j| entries[k][j - 1]).sum();
        let diag_below = if k < s { entries[k + 1][k] } else { 0 };
        let cap = n_max.min(right + diag_below);
        entries[k][k - 1] = if cap >= 1 { rng.gen_range(1..=cap) } else { 0 };
    }
    for k in 1..=s {
        let above: u64 = (1..k).map(|i| entries[i][k - 1]).sum();
        let right: u64 = (k + 1..=n).map(|j| entries[k][j - 1]).sum();
        let diag_below = if k < s { entries[k + 1][k] } else { 0 };
        entries[0][k - 1] = above + right + diag_below;
    }
    entries
}

fn column_sums_bounded(entries: &[Vec<u64>], s: usize) -> bool {
    let n = entries[0].len();
    (1..=n).all(|j| (1..=s).map(|i| entries[i][j - 1]).sum::<u64>() <= entries[0][j - 1])
}

/// Random generalised table on `{1, …, n}`: the labels are shuffled, split
/// into consecutive blocks of random size, and each block gets a random
/// member table with a random number of constrained columns.
pub fn random_generalised_table(n: usize, n_max: u64, rng: &mut impl Rng) -> GeneralisedTable {
    assert!(n >= 1, "need at least one variable");
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut tables = Vec::new();
    let mut rest = &labels[..];
    while !rest.is_empty() {
        let take = rng.gen_range(1..=rest.len());
        let (block, tail) = rest.split_at(take);
        let s = rng.gen_range(0..block.len());
        tables.push(random_table_with_labels(s, block.to_vec(), n_max, rng));
        rest = tail;
    }
    GeneralisedTable::new(n, tables).expect("blocks partition the labels")
}

/// Random generalised table reduced to canonical normal form; improper draws
/// are resampled.
pub fn random_normal_generalised(n: usize, n_max: u64, rng: &mut impl Rng) -> GeneralisedTable {
    for _ in 0..PROPER_ATTEMPTS {
        if let Ok(g) = random_generalised_table(n, n_max, rng).reduce_to_normal_form() {
            return g;
        }
    }
    panic!("resampling failed to produce a proper table for n = {n}");
}

/// The four record families of the classification datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RandomTable,
    ScrambledTable,
    AlmostTable,
    RandomArtinian,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RandomTable,
        Family::ScrambledTable,
        Family::AlmostTable,
        Family::RandomArtinian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomTable => "random_table",
            Family::ScrambledTable => "scrambled_table",
            Family::AlmostTable => "almost_table",
            Family::RandomArtinian => "random_artinian",
        }
    }
}

/// What to generate: variable count, entry bound, master seed, and the
/// requested record count per family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub n: usize,
    pub n_max: u64,
    pub seed: u64,
    pub families: Vec<(Family, usize)>,
}

impl DatasetSpec {
    /// Label-balanced split of `total`: the table family gets half, the
    /// negative families share the rest evenly (with or without the
    /// almost-table family).
    pub fn with_total(n: usize, total: usize, n_max: u64, seed: u64, almost: bool) -> Self {
        let positives = total.div_ceil(2);
        let negative_families: Vec<Family> = Family::ALL
            .into_iter()
            .filter(|&f| f != Family::RandomTable && (almost || f != Family::AlmostTable))
            .collect();
        let k = negative_families.len();
        let rest = total - positives;
        let mut families = vec![(Family::RandomTable, positives)];
        families.extend(
            negative_families
                .into_iter()
                .enumerate()
                .map(|(i, f)| (f, rest / k + usize::from(i < rest % k))),
        );
        DatasetSpec {
            n,
            n_max,
            seed,
            families,
        }
    }
}

/// One labeled record: the exponent rows of the generating set exactly as
/// produced (revlex-sorted, duplicates kept, entries possibly negative for
/// scrambled or perturbed matrices) plus the oracle's verdict.
#[derive(Debug, Clone)]
pub struct DatasetRecord {
    pub id: u64,
    pub family: Family,
    pub label: u8,
    pub rows: Vec<Vec<i64>>,
}

/// Per-family bookkeeping for the run manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub requested: usize,
    pub produced: usize,
    pub labeled_table: usize,
    pub labeled_not_table: usize,
    pub discarded: usize,
}

/// Echo of the spec plus what was actually produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub spec: DatasetSpec,
    pub total_records: usize,
    pub families: Vec<FamilyReport>,
}

const RETRY_BUDGET: usize = 200;

/// Generates the labeled records for `spec`. Rows containing a negative
/// entry cannot be a monomial ideal and are labeled 0 outright; all other
/// labels come from the recognition oracle. In the scrambled and artinian
/// families candidates that turn out to be table ideals are discarded and
/// resampled within a retry budget, while the almost-table family keeps them
/// (relabeled 1). A family that exhausts its budget produces fewer records
/// than requested, which the manifest reports.
pub fn generate_dataset(
    spec: &DatasetSpec,
) -> Result<(Vec<DatasetRecord>, DatasetManifest), DatasetError> {
    let len = flat_length(spec.n).ok_or(DatasetError::UnsupportedWidth(spec.n))?;
    assert!(
        (1..=N_MAX_LIMIT).contains(&spec.n_max),
        "need 1 <= n_max <= 2^40"
    );
    let mut records = Vec::new();
    let mut reports = Vec::new();
    for (fi, &(family, count)) in spec.families.iter().enumerate() {
        let sampled: Vec<(Option<(u8, Vec<Vec<i64>>)>, usize)> = (0..count)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
                rng.set_stream(((fi as u64) << 32) | k as u64);
                sample_record(family, spec.n, spec.n_max, len, &mut rng)
            })
            .collect();
        let mut report = FamilyReport {
            family,
            requested: count,
            produced: 0,
            labeled_table: 0,
            labeled_not_table: 0,
            discarded: 0,
        };
        for (hit, discarded) in sampled {
            report.discarded += discarded;
            if let Some((label, mut rows)) = hit {
                report.produced += 1;
                if label == 1 {
                    report.labeled_table += 1;
                } else {
                    report.labeled_not_table += 1;
                }
                sort_rows(&mut rows);
                records.push(DatasetRecord {
                    id: records.len() as u64,
                    family,
                    label,
                    rows,
                });
            }
        }
        reports.push(report);
    }
    let manifest = DatasetManifest {
        spec: spec.clone(),
        total_records: records.len(),
        families: reports,
    };
    Ok((records, manifest))
}

/// Oracle label for a row set: negative entries make it a non-ideal (label
/// 0); otherwise the rows are recognized as a monomial ideal.
fn oracle_label(n: usize, rows: &[Vec<i64>]) -> u8 {
    if rows.iter().flatten().any(|&x| x < 0) {
        return 0;
    }
    let gens = rows
        .iter()
        .map(|r| {
            let as_u64: Vec<u64> = r.iter().map(|&x| x as u64).collect();
            Monomial::from_u64s(&as_u64)
        })
        .collect();
    let ideal = MonomialIdeal::new(n, gens);
    u8::from(recognize(&ideal).verdict == Verdict::Table)
}

fn sample_record(
    family: Family,
    n: usize,
    n_max: u64,
    len: usize,
    rng: &mut impl Rng,
) -> (Option<(u8, Vec<Vec<i64>>)>, usize) {
    let mut discarded = 0;
    for _ in 0..RETRY_BUDGET {
        let rows = match family {
            Family::RandomTable => Some(sample_table_rows(n, n_max, rng)),
            Family::ScrambledTable => sample_scrambled_rows(n, n_max, rng),
            Family::AlmostTable => sample_almost_rows(n, n_max, rng),
            Family::RandomArtinian => Some(sample_artinian_rows(n, n_max, len, rng)),
        };
        let Some(rows) = rows else {
            return (None, discarded);
        };
        let label = oracle_label(n, &rows);
        let keep = match family {
            Family::RandomTable | Family::AlmostTable => true,
            Family::ScrambledTable | Family::RandomArtinian => label == 0,
        };
        if keep {
            return (Some((label, rows)), discarded);
        }
        discarded += 1;
    }
    (None, discarded)
}

/// The generator formula applied verbatim to an entry matrix over the signed
/// integers: no clamping, so an invalid matrix can yield negative exponents.
fn signed_rows(entries: &[Vec<u64>], n: usize) -> Vec<Vec<i64>> {
    let s = entries.len() - 1;
    let mut rows = Vec::new();
    for i in 0..=s {
        for j in i + 1..=n {
            let mut exps = vec![0i64; n];
            for t in (1..=i).chain([j]) {
                let spent: u64 = (1..=i).map(|r| entries[r][t - 1]).sum();
                exps[t - 1] = entries[0][t - 1] as i64 - spent as i64;
            }
            rows.push(exps);
        }
    }
    rows
}

fn sample_table_rows(n: usize, n_max: u64, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let s = rng.gen_range(0..n);
    let t = random_table(s, n, n_max, rng);
    let mut rows = Vec::new();
    for i in 0..=s {
        for j in i + 1..=n {
            let row: Vec<i64> = t
                .generator_at(i, j, n)
                .0
                .iter()
                .map(|e| e.to_i64().expect("bounded exponents fit i64"))
                .collect();
            rows.push(row);
        }
    }
    rows
}

fn sample_scrambled_rows(n: usize, n_max: u64, rng: &mut impl Rng) -> Option<Vec<Vec<i64>>> {
    for _ in 0..RETRY_BUDGET {
        let s = rng.gen_range(1..n);
        let mut entries = sample_entries(s, n, n_max, rng);
        let mut values: Vec<u64> = entries.iter().flatten().copied().collect();
        values.shuffle(rng);
        for (slot, v) in entries.iter_mut().flatten().zip(values) {
            *slot = v;
        }
        if degree_condition_holds(&entries, s) {
            continue;
        }
        let rows = signed_rows(&entries, n);
        if rows.iter().flatten().any(|&x| x != 0) {
            return Some(rows);
        }
    }
    None
}

fn sample_almost_rows(n: usize, n_max: u64, rng: &mut impl Rng) -> Option<Vec<Vec<i64>>> {
    for _ in 0..RETRY_BUDGET {
        let s = rng.gen_range(1..n);
        let mut entries = sample_entries(s, n, n_max, rng);
        let slots: Vec<(usize, usize)> = (1..=s)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let &(i, j) = slots.choose(rng).expect("s >= 1 gives at least one slot");
        let v = entries[i][j - 1];
        entries[i][j - 1] = if v == 0 || rng.gen_bool(0.5) { v + 1 } else { v - 1 };
        let rows = signed_rows(&entries, n);
        if rows.iter().flatten().any(|&x| x != 0) {
            return Some(rows);
        }
    }
    None
}

fn sample_artinian_rows(n: usize, n_max: u64, len: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let d: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=n_max)).collect();
    let mut rows: Vec<Vec<i64>> = (0..n)
        .map(|t| {
            let mut row = vec![0i64; n];
            row[t] = d[t] as i64;
            row
        })
        .collect();
    if d.iter().any(|&dt| dt >= 2) {
        let capacity = (len / n).saturating_sub(n).max(1);
        let extras = rng.gen_range(1..=(2 * n).min(capacity));
        for _ in 0..extras {
            for _ in 0..RETRY_BUDGET {
                let e: Vec<i64> = d.iter().map(|&dt| rng.gen_range(0..dt) as i64).collect();
                if e.iter().any(|&x| x > 0) {
                    rows.push(e);
                    break;
                }
            }
        }
    }
    rows
}

fn degree_condition_holds(entries: &[Vec<u64>], s: usize) -> bool {
    let n = entries[0].len();
    (1..=s).all(|k| {
        let above: u64 = (1..k).map(|i| entries[i][k - 1]).sum();
        let right: u64 = (k + 1..=n).map(|j| entries[k][j - 1]).sum();
        let diag_below = if k < s { entries[k + 1][k] } else { 0 };
        entries[0][k - 1] == above + right + diag_below
    })
}

#[derive(Serialize)]
struct GraphRecord<'a> {
    nodes: &'a Vec<Vec<i64>>,
    edges: &'a Vec<(usize, usize)>,
    label: u8,
    family: Family,
}

/// Flat CSV body: one row per record, `len` feature columns then the label,
/// no header.
pub fn flat_csv(records: &[DatasetRecord], len: usize) -> Result<String, DatasetError> {
    let mut out = String::new();
    for r in records {
        let v = rows_vector(&r.rows, len)?;
        for x in v {
            out.push_str(&x.to_string());
            out.push(',');
        }
        out.push_str(&r.label.to_string());
        out.push('\n');
    }
    Ok(out)
}

/// Graph JSONL body: one JSON object per record.
pub fn graph_jsonl(records: &[DatasetRecord]) -> Result<String, DatasetError> {
    let mut out = String::new();
    for r in records {
        let g = rows_graph(&r.rows);
        let line = serde_json::to_string(&GraphRecord {
            nodes: &g.nodes,
            edges: &g.edges,
            label: r.label,
            family: r.family,
        })
        .expect("graph records serialize");
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes the flat CSV for `records` to `path` atomically.
pub fn write_flat_csv(
    path: &Path,
    records: &[DatasetRecord],
    len: usize,
) -> Result<(), DatasetError> {
    Ok(atomic_write(path, flat_csv(records, len)?.as_bytes())?)
}

/// Writes the graph JSONL for `records` to `path` atomically.
pub fn write_graph_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<(), DatasetError> {
    Ok(atomic_write(path, graph_jsonl(records)?.as_bytes())?)
}

/// Writes the manifest as pretty JSON to `path` atomically.
pub fn write_manifest(path: &Path, manifest: &DatasetManifest) -> Result<(), DatasetError> {
    let body = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    Ok(atomic_write(path, body.as_bytes())?)
}
