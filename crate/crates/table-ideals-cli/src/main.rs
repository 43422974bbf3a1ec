//! Batch command line for the table calculus: table sampling, recognition,
//! reduction to normal form, dataset emission, invariant verification, and
//! the decision-tree experiments.

use std::path::PathBuf;
use std::process::ExitCode;
use std::{fmt, fs};

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use table_ideals::datasets::{
    atomic_write, flat_length, generate_dataset, ideal_vector, random_generalised_table,
    random_normal_generalised, random_table, DatasetSpec,
};
use table_ideals::monomial::IdealError;
use table_ideals::table::{validate_table, TableError};
use table_ideals::{
    averaged_experiment, build_complex, check_slp, recognize, train_tree, GeneralisedTable,
    MonomialIdeal, DEFAULT_CAP,
};

#[derive(Parser)]
#[command(
    name = "table-ideals",
    version,
    about = "Monomial table calculus: sampling, recognition, reduction, datasets, verification, training"
)]
struct Cli {
    /// Master seed; every command derives its own named streams from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (or directory for `dataset`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where the command supports a choice.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Bound on quotient-basis enumeration for Hilbert/Lefschetz work.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random tables (with their generated ideals).
    Generate {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// How many tables to sample.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Fixed number of constrained columns (random per table if omitted).
        #[arg(long)]
        s: Option<usize>,
        /// Upper bound for sampled entries.
        #[arg(long, default_value_t = 40)]
        n_max: u64,
        /// Sample generalised tables with several members.
        #[arg(long)]
        mixed: bool,
        /// Reduce every sample to canonical normal form (improper draws are resampled).
        #[arg(long)]
        normal_form: bool,
    },
    /// Run the recognition algorithm on a JSONL file of monomial ideals.
    Recognize {
        /// Input file: one {"n": .., "generators": [[..]]} object per line.
        #[arg(long)]
        input: PathBuf,
    },
    /// Reduce a JSONL file of generalised tables to canonical normal form.
    Reduce {
        /// Input file: one generalised-table JSON object per line.
        #[arg(long)]
        input: PathBuf,
        /// Also check that reduction preserved each ideal.
        #[arg(long)]
        verify: bool,
    },
    /// Emit a labeled dataset: flat CSV, graph JSONL, and a manifest.
    Dataset {
        /// Number of variables (3 to 10).
        #[arg(long)]
        n: usize,
        /// Total record budget, split evenly over the families.
        #[arg(long, default_value_t = 400)]
        total: usize,
        /// Upper bound for sampled entries.
        #[arg(long, default_value_t = 40)]
        n_max: u64,
        /// Include the almost-table family.
        #[arg(long)]
        almost: bool,
    },
    /// Re-run the seeded invariant suites; exits nonzero on any violation.
    Verify {
        /// Rounds per suite.
        #[arg(long, default_value_t = 100)]
        rounds: usize,
        /// Lefschetz instances (small parameters).
        #[arg(long, default_value_t = 5)]
        slp: usize,
        /// Largest variable count the suites sample.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Upper bound for sampled entries.
        #[arg(long, default_value_t = 9)]
        n_max: u64,
        /// Corrupt a valid table and require the violation to be caught.
        #[arg(long)]
        inject_mutant: bool,
    },
    /// Train the decision tree on a fresh dataset and report averaged results.
    Train {
        /// Number of variables (3 to 10).
        #[arg(long)]
        n: usize,
        /// Total record budget.
        #[arg(long, default_value_t = 2500)]
        total: usize,
        /// Training rows per iteration (the rest are held out).
        #[arg(long, default_value_t = 2000)]
        train: usize,
        /// Shuffle/train/test iterations to average over.
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        /// Upper bound for sampled entries.
        #[arg(long, default_value_t = 40)]
        n_max: u64,
        /// Include the almost-table family.
        #[arg(long)]
        almost: bool,
        /// Also write one trained tree as nested JSON to this path.
        #[arg(long)]
        emit_tree: Option<PathBuf>,
    },
    /// Run the averaged experiment over a range of n and emit a summary table.
    Stats {
        /// Smallest variable count.
        #[arg(long, default_value_t = 3)]
        from: usize,
        /// Largest variable count.
        #[arg(long, default_value_t = 10)]
        to: usize,
        /// Total record budget per n.
        #[arg(long, default_value_t = 600)]
        total: usize,
        /// Training rows per iteration.
        #[arg(long, default_value_t = 480)]
        train: usize,
        /// Iterations to average over.
        #[arg(long, default_value_t = 25)]
        iterations: usize,
        /// Upper bound for sampled entries.
        #[arg(long, default_value_t = 40)]
        n_max: u64,
        /// Include the almost-table family.
        #[arg(long)]
        almost: bool,
    },
}

/// Derives a per-purpose 64-bit seed from the master seed (FNV-1a of the
/// purpose name, xored with the seed).
fn purpose_seed(seed: u64, purpose: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in purpose.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed
}

fn record_rng(seed: u64, purpose: &str, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(purpose_seed(seed, purpose));
    rng.set_stream(stream);
    rng
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => atomic_write(path, body.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn emit_records(cli: &Cli, records: &[Value]) -> Result<()> {
    let body = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(records)?),
        Format::Jsonl => {
            let mut s = String::new();
            for r in records {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            s
        }
        Format::Csv => bail!("this command writes json or jsonl, not csv"),
    };
    emit(&cli.out, &body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            n,
            count,
            s,
            n_max,
            mixed,
            normal_form,
        } => cmd_generate(cli, n, count, s, n_max, mixed, normal_form),
        Command::Recognize { ref input } => cmd_recognize(cli, input),
        Command::Reduce { ref input, verify } => cmd_reduce(cli, input, verify),
        Command::Dataset {
            n,
            total,
            n_max,
            almost,
        } => cmd_dataset(cli, n, total, n_max, almost),
        Command::Verify {
            rounds,
            slp,
            max_n,
            n_max,
            inject_mutant,
        } => cmd_verify(cli, rounds, slp, max_n, n_max, inject_mutant),
        Command::Train {
            n,
            total,
            train,
            iterations,
            n_max,
            almost,
            ref emit_tree,
        } => cmd_train(cli, n, total, train, iterations, n_max, almost, emit_tree),
        Command::Stats {
            from,
            to,
            total,
            train,
            iterations,
            n_max,
            almost,
        } => cmd_stats(cli, from, to, total, train, iterations, n_max, almost),
    }
}

fn cmd_generate(
    cli: &Cli,
    n: usize,
    count: usize,
    s: Option<usize>,
    n_max: u64,
    mixed: bool,
    normal_form: bool,
) -> Result<ExitCode> {
    ensure!(n >= 1, "--n must be at least 1");
    if let Some(s) = s {
        ensure!(s < n, "--s must be smaller than --n");
        ensure!(!mixed, "--s applies to single tables, not --mixed");
    }
    let mut records = Vec::new();
    for k in 0..count {
        let mut rng = record_rng(cli.seed, "generate", k as u64);
        let table = if mixed && normal_form {
            random_normal_generalised(n, n_max, &mut rng)
        } else if mixed {
            random_generalised_table(n, n_max, &mut rng)
        } else {
            loop {
                let s_k = s.unwrap_or_else(|| rng.gen_range(0..n));
                let single = GeneralisedTable::new(n, vec![random_table(s_k, n, n_max, &mut rng)])
                    .expect("a full-width table is a valid generalised table");
                if !normal_form {
                    break single;
                }
                if let Ok(reduced) = single.reduce_to_normal_form() {
                    break reduced;
                }
            }
        };
        records.push(json!({
            "index": k,
            "table": table,
            "ideal": table.generators(),
        }));
    }
    emit_records(cli, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &PathBuf, what: &str) -> Result<Vec<T>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: T = serde_json::from_str(line)
            .with_context(|| format!("record {}: not a valid {what}", idx + 1))?;
        out.push(value);
    }
    ensure!(!out.is_empty(), "{} holds no records", path.display());
    Ok(out)
}

fn cmd_recognize(cli: &Cli, input: &PathBuf) -> Result<ExitCode> {
    let ideals: Vec<MonomialIdeal> = read_jsonl(input, "monomial ideal")?;
    let records: Vec<Value> = ideals
        .iter()
        .enumerate()
        .map(|(idx, ideal)| {
            let mut value = serde_json::to_value(recognize(ideal)).expect("outcomes serialize");
            value["index"] = json!(idx);
            value
        })
        .collect();
    emit_records(cli, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reduce(cli: &Cli, input: &PathBuf, verify: bool) -> Result<ExitCode> {
    let tables: Vec<GeneralisedTable> = read_jsonl(input, "generalised table")?;
    let mut records = Vec::new();
    for (idx, table) in tables.iter().enumerate() {
        let record = match table.reduce_to_normal_form() {
            Ok(reduced) => {
                let preserved =
                    verify.then(|| reduced.generators().equal_ideals(&table.generators()));
                json!({
                    "index": idx,
                    "status": "reduced",
                    "table": reduced,
                    "ideal_preserved": preserved,
                })
            }
            Err(TableError::Improper { label }) => json!({
                "index": idx,
                "status": "improper",
                "label": label,
            }),
            Err(other) => bail!("record {}: {other}", idx + 1),
        };
        records.push(record);
    }
    emit_records(cli, &records)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dataset(cli: &Cli, n: usize, total: usize, n_max: u64, almost: bool) -> Result<ExitCode> {
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("dataset-n{n}")));
    let spec = DatasetSpec::with_total(n, total, n_max, purpose_seed(cli.seed, "dataset"), almost);
    let (records, manifest) = generate_dataset(&spec)?;
    let len = flat_length(n).expect("generate_dataset enforces supported widths");
    table_ideals::datasets::write_flat_csv(&dir.join("flat.csv"), &records, len)?;
    table_ideals::datasets::write_graph_jsonl(&dir.join("graphs.jsonl"), &records)?;
    let full = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": "dataset",
        "seed": cli.seed,
        "config": {"n": n, "total": total, "n_max": n_max, "almost": almost},
        "manifest": manifest,
    });
    atomic_write(
        &dir.join("manifest.json"),
        format!("{}\n", serde_json::to_string_pretty(&full)?).as_bytes(),
    )?;
    eprintln!(
        "wrote {} records to {} (flat.csv, graphs.jsonl, manifest.json)",
        manifest.total_records,
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

struct Suite {
    name: &'static str,
    runs: usize,
    failures: usize,
    skipped: usize,
    first_failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            runs: 0,
            failures: 0,
            skipped: 0,
            first_failure: None,
        }
    }

    fn fail(&mut self, message: impl fmt::Display) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(message.to_string());
        }
    }

    fn report(&self) -> Value {
        json!({
            "name": self.name,
            "runs": self.runs,
            "failures": self.failures,
            "skipped": self.skipped,
            "first_failure": self.first_failure,
        })
    }
}

fn cmd_verify(
    cli: &Cli,
    rounds: usize,
    slp: usize,
    max_n: usize,
    n_max: u64,
    inject_mutant: bool,
) -> Result<ExitCode> {
    ensure!(max_n >= 2, "--max-n must be at least 2");
    let mut suites = Vec::new();

    let mut suite = Suite::new("round_trip");
    for k in 0..rounds {
        suite.runs += 1;
        let mut rng = record_rng(cli.seed, "verify.round_trip", k as u64);
        let n = 1 + k % max_n;
        let table = random_normal_generalised(n, n_max, &mut rng);
        let outcome = recognize(&table.generators());
        match outcome.table {
            Some(found) if found == table => {}
            _ => suite.fail(format!("round {k}: recognition did not return the sampled table")),
        }
    }
    suites.push(suite);

    let mut suite = Suite::new("minimal_generator_lemma");
    for k in 0..rounds {
        suite.runs += 1;
        let mut rng = record_rng(cli.seed, "verify.lemma", k as u64);
        let n = 2 + k % (max_n - 1);
        let table = random_normal_generalised(n, n_max, &mut rng);
        for member in table.tables() {
            let ideal = member.generators();
            let minimal = ideal.minimalize();
            for i in 1..=member.s() {
                for j in i + 1..=member.n() {
                    let mono = member.generator_at(i, j, ideal.n());
                    let is_minimal = minimal.generators().contains(&mono);
                    let alpha_nonzero = member.alpha(i, j).bits() != 0;
                    if is_minimal != alpha_nonzero {
                        suite.fail(format!(
                            "round {k}: slot ({i}, {j}) has alpha {} but minimality {}",
                            member.alpha(i, j),
                            is_minimal
                        ));
                    }
                }
            }
        }
    }
    suites.push(suite);

    let mut suite = Suite::new("components");
    for k in 0..rounds {
        suite.runs += 1;
        let mut rng = record_rng(cli.seed, "verify.components", k as u64);
        let n = 2 + k % (max_n - 1);
        let table = random_normal_generalised(n, n_max, &mut rng);
        let complex = build_complex(&table.generators())
            .expect("proper tables give proper ideals with non-unit complexes");
        match complex.connected_components() {
            Ok(components) if components.len() == table.tables().len() => {}
            Ok(components) => suite.fail(format!(
                "round {k}: {} components for {} members",
                components.len(),
                table.tables().len()
            )),
            Err(err) => suite.fail(format!("round {k}: {err}")),
        }
    }
    suites.push(suite);

    let mut suite = Suite::new("hilbert_socle");
    for k in 0..rounds {
        suite.runs += 1;
        let mut rng = record_rng(cli.seed, "verify.hilbert", k as u64);
        let n = 1 + k % max_n;
        let table = loop {
            let s = rng.gen_range(0..n);
            let t = random_table(s, n, n_max, &mut rng);
            if t.is_proper() {
                break t;
            }
        };
        match table.generators().hilbert_function(cli.cap) {
            Err(IdealError::CapExceeded(_)) => suite.skipped += 1,
            Err(err) => suite.fail(format!("round {k}: {err}")),
            Ok(h) => {
                let mirrored: Vec<u64> = h.iter().rev().copied().collect();
                if h != mirrored {
                    suite.fail(format!("round {k}: function {h:?} is not symmetric"));
                }
                let socle = table.max_socle_degree().expect("single tables have a socle degree");
                if socle != (h.len() as u64 - 1).into() {
                    suite.fail(format!(
                        "round {k}: top degree {} but socle formula gives {socle}",
                        h.len() - 1
                    ));
                }
            }
        }
    }
    suites.push(suite);

    let mut suite = Suite::new("lefschetz");
    for k in 0..slp {
        suite.runs += 1;
        let mut rng = record_rng(cli.seed, "verify.lefschetz", k as u64);
        let n = 2 + k % 3;
        let table = loop {
            let s = rng.gen_range(0..n);
            let t = random_table(s, n, 4.min(n_max), &mut rng);
            if t.is_proper() {
                break t;
            }
        };
        match check_slp(&table.generators(), cli.cap) {
            Err(IdealError::CapExceeded(_)) => suite.skipped += 1,
            Err(err) => suite.fail(format!("instance {k}: {err}")),
            Ok(report) if report.holds => {}
            Ok(report) => suite.fail(format!(
                "instance {k}: multiplication map {:?} lost rank",
                report.failing
            )),
        }
    }
    suites.push(suite);

    let mutant = inject_mutant.then(|| {
        let mut rng = record_rng(cli.seed, "verify.mutant", 0);
        let table = random_table(2, 4, n_max.max(2), &mut rng);
        let mut entries = table.entries().to_vec();
        entries[1][2] += 1u32;
        let detected = validate_table(entries, table.labels().to_vec()).is_err();
        json!({"detected": detected})
    });

    let violations: usize = suites.iter().map(|s| s.failures).sum();
    let mutant_ok = mutant
        .as_ref()
        .map_or(true, |m| m["detected"] == json!(true));
    let ok = violations == 0 && mutant_ok;
    let report = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
        "suites": suites.iter().map(Suite::report).collect::<Vec<_>>(),
        "mutant": mutant,
        "ok": ok,
    });
    emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn labeled_rows(
    cli: &Cli,
    n: usize,
    total: usize,
    n_max: u64,
    almost: bool,
) -> Result<(Vec<Vec<u64>>, Vec<u8>, Value)> {
    let spec = DatasetSpec::with_total(n, total, n_max, purpose_seed(cli.seed, "dataset"), almost);
    let (records, manifest) = generate_dataset(&spec)?;
    let len = flat_length(n).expect("generate_dataset enforces supported widths");
    let mut x = Vec::with_capacity(records.len());
    let mut y = Vec::with_capacity(records.len());
    for record in &records {
        x.push(ideal_vector(&record.ideal, len)?);
        y.push(record.label);
    }
    Ok((x, y, serde_json::to_value(manifest)?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    cli: &Cli,
    n: usize,
    total: usize,
    train: usize,
    iterations: usize,
    n_max: u64,
    almost: bool,
    emit_tree: &Option<PathBuf>,
) -> Result<ExitCode> {
    let (x, y, manifest) = labeled_rows(cli, n, total, n_max, almost)?;
    ensure!(
        train < x.len(),
        "--train must be below the produced record count ({})",
        x.len()
    );
    let summary = averaged_experiment(&x, &y, train, iterations, purpose_seed(cli.seed, "train"));
    if let Some(path) = emit_tree {
        let mut rng = record_rng(cli.seed, "train", 0);
        let (tr, _) = table_ideals::ml::train_test_split(x.len(), train, &mut rng);
        let tx: Vec<Vec<u64>> = tr.iter().map(|&i| x[i].clone()).collect();
        let ty: Vec<u8> = tr.iter().map(|&i| y[i]).collect();
        let tree = train_tree(&tx, &ty);
        atomic_write(path, format!("{}\n", tree.to_json()).as_bytes())?;
    }
    let report = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": cli.seed,
        "config": {
            "n": n, "total": total, "train": train,
            "iterations": iterations, "n_max": n_max, "almost": almost,
        },
        "dataset": manifest,
        "summary": summary,
    });
    emit(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_stats(
    cli: &Cli,
    from: usize,
    to: usize,
    total: usize,
    train: usize,
    iterations: usize,
    n_max: u64,
    almost: bool,
) -> Result<ExitCode> {
    ensure!(from <= to, "--from must not exceed --to");
    let mut summaries = Vec::new();
    for n in from..=to {
        let (x, y, _) = labeled_rows(cli, n, total, n_max, almost)?;
        ensure!(
            train < x.len(),
            "--train must be below the produced record count ({}) at n = {n}",
            x.len()
        );
        let summary =
            averaged_experiment(&x, &y, train, iterations, purpose_seed(cli.seed, "train"));
        summaries.push((n, summary));
    }
    let body = match cli.format {
        Format::Json => {
            let rows: Vec<Value> = summaries
                .iter()
                .map(|(n, s)| {
                    let mut v = serde_json::to_value(s).expect("summaries serialize");
                    v["n"] = json!(n);
                    v
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows)?)
        }
        Format::Csv => {
            let mut s = String::from("n,nodes,depth,leaves,errors\n");
            for (n, summary) in &summaries {
                s.push_str(&format!(
                    "{n},{:.2},{:.2},{:.2},{:.2}\n",
                    summary.mean_nodes,
                    summary.mean_depth,
                    summary.mean_leaves,
                    summary.mean_errors
                ));
            }
            s
        }
        Format::Jsonl => bail!("stats writes csv or json, not jsonl"),
    };
    emit(&cli.out, &body)?;
    Ok(ExitCode::SUCCESS)
}
