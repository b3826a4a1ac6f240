use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use efx_core::allocation::{
    is_ef1_in, is_efx_in, is_envy_free_in, strong_envy_witnesses, Allocation, PhiOrder,
};
use efx_core::generate::{generate, GenParams};
use efx_core::oracle::{enumerate_efx, enumerate_with_query, OracleOptions};
use efx_core::solver::trace_to_json;
use efx_core::{repro, solve_with, EpsPoly, Instance, Order, Rational, SolveOptions, Value};
use serde_json::{json, Value as Json};

/// Exact EFX allocations for three additive agents.
#[derive(Parser)]
#[command(name = "efx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a complete EFX allocation.
    Solve {
        instance: PathBuf,
        /// Write the step trace as JSON.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Print one JSON object instead of the summary.
        #[arg(long)]
        json: bool,
        /// Potential agent order, 1-based and comma separated, e.g. 2,1,3.
        #[arg(long, value_name = "A,B,C", value_delimiter = ',')]
        phi_order: Option<Vec<usize>>,
    },
    /// Test an allocation against a fairness criterion.
    Check {
        instance: PathBuf,
        allocation: PathBuf,
        #[arg(long, value_enum, default_value = "efx")]
        criterion: Criterion,
        /// List every (envier, envied, good) strong-envy witness.
        #[arg(long)]
        strong_envy_witness: bool,
        /// Compare bundles with the tie-breaking perturbation instead of base values.
        #[arg(long)]
        perturbed: bool,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate every complete allocation.
    Oracle {
        instance: PathBuf,
        /// Include every EFX allocation in the report.
        #[arg(long, conflicts_with = "dominates")]
        list: bool,
        /// Report only the maximum Nash product and its witness.
        #[arg(long, conflicts_with_all = ["list", "dominates"])]
        max_nsw: bool,
        /// Look for a complete EFX allocation Pareto dominating this one.
        #[arg(long, value_name = "ALLOCATION")]
        dominates: Option<PathBuf>,
        /// Refuse instances with more goods than this (default 16, or EFX_MAX_GOODS).
        #[arg(long, value_name = "N")]
        max_goods: Option<usize>,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long)]
        goods: usize,
        #[arg(long, default_value_t = 20)]
        max_value: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-check one of the seven-good counterexamples.
    Repro {
        #[arg(value_enum)]
        table: Table,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Criterion {
    Efx,
    Ef1,
    Ef,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Table1,
    Table2,
}

enum Failure {
    /// Exit 1: the property does not hold.
    Property,
    /// Exit 2: bad input or usage.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Json, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Instances whose values are JSON objects are over the ε-ring.
fn is_eps(doc: &Json) -> bool {
    doc.get("values")
        .and_then(Json::as_array)
        .is_some_and(|rows| {
            rows.iter()
                .filter_map(Json::as_array)
                .flatten()
                .any(Json::is_object)
        })
}

trait Run {
    fn run<V: Value>(self, inst: Instance<V>) -> Outcome;
}

fn with_instance(path: &Path, cmd: impl Run) -> Outcome {
    let doc = read_json(path)?;
    if is_eps(&doc) {
        cmd.run(Instance::<EpsPoly>::from_json(&doc).map_err(usage)?)
    } else {
        cmd.run(Instance::<Rational>::from_json(&doc).map_err(usage)?)
    }
}

fn print_json(doc: &Json) {
    println!("{}", serde_json::to_string_pretty(doc).expect("JSON values always serialize"));
}

struct Solve {
    trace: Option<PathBuf>,
    json: bool,
    phi_order: Option<Vec<usize>>,
}

impl Run for Solve {
    fn run<V: Value>(self, inst: Instance<V>) -> Outcome {
        let phi_order = match self.phi_order {
            None => None,
            Some(agents) => {
                let zero_based = agents
                    .iter()
                    .map(|&a| a.checked_sub(1))
                    .collect::<Option<Vec<_>>>()
                    .and_then(PhiOrder::new)
                    .filter(|o| o.agents().len() == inst.num_agents());
                Some(zero_based.ok_or_else(|| usage("--phi-order must be a permutation of the agents"))?)
            }
        };
        let opts = SolveOptions {
            phi_order,
            ..Default::default()
        };
        let sol = solve_with(&inst, &opts).map_err(usage)?;
        if let Some(path) = &self.trace {
            let text = serde_json::to_string_pretty(&trace_to_json(&inst, &sol.trace))
                .expect("JSON values always serialize");
            fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        }
        let x = &sol.allocation;
        let values: Vec<V> = (0..inst.num_agents()).map(|i| inst.base(i, &x.bundles[i])).collect();
        if self.json {
            print_json(&json!({
                "allocation": x.to_json(&inst),
                "values": values.iter().map(Value::to_json).collect::<Vec<_>>(),
                "steps": sol.trace.len(),
            }));
        } else {
            for (i, v) in values.iter().enumerate() {
                let ids: Vec<&str> = x.bundles[i].iter().map(|g| inst.good_id(g)).collect();
                println!("agent {}: {{{}}} value {}", i + 1, ids.join(", "), v.display());
            }
            println!("steps: {}", sol.trace.len());
            println!("{}", x.serialize(&inst));
        }
        Ok(())
    }
}

struct Check {
    allocation: PathBuf,
    criterion: Criterion,
    witness: bool,
    perturbed: bool,
    json: bool,
}

impl Run for Check {
    fn run<V: Value>(self, inst: Instance<V>) -> Outcome {
        let x = Allocation::parse(&inst, &read(&self.allocation)?).map_err(usage)?;
        let order = if self.perturbed { Order::Perturbed } else { Order::Base };
        let (name, holds) = match self.criterion {
            Criterion::Efx => ("efx", is_efx_in(order, &inst, &x)),
            Criterion::Ef1 => ("ef1", is_ef1_in(order, &inst, &x)),
            Criterion::Ef => ("ef", is_envy_free_in(order, &inst, &x)),
        };
        let witnesses = if self.witness {
            strong_envy_witnesses(order, &inst, &x)
        } else {
            Vec::new()
        };
        if self.json {
            print_json(&json!({
                "criterion": name,
                "holds": holds,
                "strong_envy_witnesses": witnesses.iter().map(|&(i, j, g)| json!({
                    "envier": i + 1,
                    "envied": j + 1,
                    "good": inst.good_id(g),
                })).collect::<Vec<_>>(),
            }));
        } else {
            println!("{name}: {}", if holds { "holds" } else { "fails" });
            for (i, j, g) in witnesses {
                println!("strong envy: agent {} -> agent {} without {}", i + 1, j + 1, inst.good_id(g));
            }
        }
        if holds {
            Ok(())
        } else {
            Err(Failure::Property)
        }
    }
}

struct Oracle {
    list: bool,
    max_nsw: bool,
    dominates: Option<PathBuf>,
    max_goods: Option<usize>,
}

impl Run for Oracle {
    fn run<V: Value>(self, inst: Instance<V>) -> Outcome {
        let mut opts = OracleOptions::from_env().map_err(usage)?;
        if let Some(n) = self.max_goods {
            opts.max_goods = n;
        }
        opts.list = self.list;
        if let Some(path) = &self.dominates {
            let x = Allocation::parse(&inst, &read(path)?).map_err(usage)?;
            let report = enumerate_with_query(&inst, &opts, &x).map_err(usage)?;
            print_json(&report.to_json(&inst));
            let found = report.dominance.as_ref().is_some_and(|(_, w)| w.is_some());
            return if found { Err(Failure::Property) } else { Ok(()) };
        }
        let report = enumerate_efx(&inst, &opts).map_err(usage)?;
        if self.max_nsw {
            print_json(&json!({
                "total": report.total.to_string(),
                "efx_count": report.efx_count,
                "max_nash": report.to_json(&inst)["max_nash"],
            }));
        } else {
            print_json(&report.to_json(&inst));
        }
        Ok(())
    }
}

fn gen(agents: usize, goods: usize, max_value: u64, seed: u64) -> Outcome {
    if agents == 0 {
        return Err(usage("--agents must be at least 1"));
    }
    if max_value > i64::MAX as u64 {
        return Err(usage("--max-value is too large"));
    }
    let inst = generate(&GenParams {
        agents,
        goods,
        max_value,
        seed,
    });
    print_json(&inst.to_json());
    Ok(())
}

fn repro_cmd(table: Table, as_json: bool) -> Outcome {
    let report = match table {
        Table::Table1 => repro::table1(),
        Table::Table2 => repro::table2(),
    }
    .map_err(usage)?;
    if as_json {
        print_json(&report.to_json());
    } else {
        for c in &report.checks {
            println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            if !c.passed {
                println!("  {}", c.detail);
            }
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            instance,
            trace,
            json,
            phi_order,
        } => with_instance(&instance, Solve { trace, json, phi_order }),
        Command::Check {
            instance,
            allocation,
            criterion,
            strong_envy_witness,
            perturbed,
            json,
        } => with_instance(
            &instance,
            Check {
                allocation,
                criterion,
                witness: strong_envy_witness,
                perturbed,
                json,
            },
        ),
        Command::Oracle {
            instance,
            list,
            max_nsw,
            dominates,
            max_goods,
        } => with_instance(
            &instance,
            Oracle {
                list,
                max_nsw,
                dominates,
                max_goods,
            },
        ),
        Command::Gen {
            agents,
            goods,
            max_value,
            seed,
        } => gen(agents, goods, max_value, seed),
        Command::Repro { table, json } => repro_cmd(table, json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
