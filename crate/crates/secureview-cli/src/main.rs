//! `secureview` — command-line front end for the workflow-privacy
//! toolkit.
//!
//! Machine output goes to stdout as JSON (CSV for `bench`), diagnostics
//! to stderr. Exit codes: 0 success, 1 infeasible/unsafe verdict, 2 usage
//! error, 3 budget exceeded. `SECUREVIEW_BUDGET` overrides the
//! enumeration and branch-and-bound budgets.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use secureview_core::budget::Budget;
use secureview_core::error::Error;
use secureview_core::harness::{self, Instance, RandomParams};
use secureview_core::model::{
    execute_workflow, validate_workflow, CostModel, Costs, ModuleRelation, Relation,
    RelationData, Workflow, WorkflowDef,
};
use secureview_core::privacy::{
    check_standalone_view, count_worlds, enumerate_worlds_exact, is_workflow_safe, CheckMode,
    Gammas, View,
};
use secureview_core::rational::{rat_int, NumDen};
use secureview_core::solvers::{
    self, Method, Requirements, RequirementsEntry, Solution, SolutionData,
};
use secureview_core::standalone::{analyze_module, to_requirements, RequirementForm};

#[derive(Parser)]
#[command(name = "secureview", version, about = "Workflow-provenance privacy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Exact,
    Compositional,
    Standalone,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    Set,
    Cardinality,
}

#[derive(ValueEnum, Clone, Copy)]
enum MethodArg {
    Exact,
    CardRound,
    SetRound,
    Greedy,
    GeneralSet,
}

#[derive(ValueEnum, Clone, Copy)]
enum FamilyArg {
    Example41,
    OneoneChain,
    Majority,
    PublicConstant,
    RandomDag,
    Setcover,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a workflow file; print its topological order or the
    /// violations.
    Validate {
        #[arg(long)]
        workflow: PathBuf,
    },
    /// Execute a workflow on the given (or the full default)
    /// initial-input relation.
    Execute {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check Γ-workflow-privacy of a view.
    CheckSafe {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        view: PathBuf,
        #[arg(long, default_value_t = 1)]
        gamma: u64,
        /// Per-module Γ as a JSON object, overriding --gamma.
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        inputs: Option<PathBuf>,
    },
    /// Minimum-cost safe hidden subset for one module.
    Standalone {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        module: String,
        #[arg(long)]
        gamma: u64,
        #[arg(long)]
        costs: Option<PathBuf>,
        /// Also list the antichain of minimal safe hidden sets.
        #[arg(long)]
        all: bool,
    },
    /// Extract per-module requirement lists from standalone analysis.
    Requirements {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long, default_value_t = 1)]
        gamma: u64,
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the secure-view problem.
    Solve {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        reqs: PathBuf,
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a solution file against requirements.
    Verify {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        reqs: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Count or list the possible worlds of a view.
    Worlds {
        #[arg(long)]
        workflow: PathBuf,
        #[arg(long)]
        view: PathBuf,
        #[arg(long)]
        count: bool,
        #[arg(long)]
        list: bool,
        /// Overrides the candidate-world budget.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        inputs: Option<PathBuf>,
    },
    /// Generate an instance family.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family parameters as a JSON object.
        #[arg(long)]
        params: Option<String>,
        /// Write workflow.json / requirements.json / costs.json here
        /// instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a comparison suite; CSV on stdout, summary on stderr.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BudgetExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_workflow(path: &Path) -> Result<Workflow, Error> {
    let def: WorkflowDef = load_json(path)?;
    validate_workflow(def)
}

fn load_costs(workflow: &Workflow, path: &Option<PathBuf>) -> Result<Costs, Error> {
    match path {
        Some(p) => {
            let model: CostModel = load_json(p)?;
            Costs::from_model(workflow, &model)
        }
        None => Ok(Costs::from_workflow(workflow)),
    }
}

fn load_requirements(workflow: &Workflow, path: &Path) -> Result<Requirements, Error> {
    let entries: Vec<RequirementsEntry> = load_json(path)?;
    let reqs = Requirements::from_entries(entries)?;
    reqs.validate(workflow)?;
    Ok(reqs)
}

fn load_relation(workflow: &Workflow, inputs: &Option<PathBuf>) -> Result<Relation, Error> {
    let initial = match inputs {
        Some(p) => {
            let data: RelationData = load_json(p)?;
            Some(data.to_relation(workflow)?)
        }
        None => None,
    };
    execute_workflow(workflow, initial.as_ref())
}

fn parse_gammas(gamma: u64, gammas: &Option<String>) -> Result<Gammas, Error> {
    match gammas {
        Some(text) => {
            let map: BTreeMap<String, u64> = serde_json::from_str(text).map_err(Error::Json)?;
            Ok(Gammas::per_module(map))
        }
        None => Ok(Gammas::uniform(gamma)),
    }
}

fn emit(value: &Json, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = format!("{}\n", serde_json::to_string_pretty(value)?);
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Error> {
    let budget = Budget::from_env();
    match command {
        Command::Validate { workflow } => {
            let def: WorkflowDef = load_json(&workflow)?;
            match validate_workflow(def) {
                Ok(wf) => {
                    let order: Vec<&str> = wf
                        .topo_order()
                        .iter()
                        .map(|&i| wf.modules()[i].name.as_str())
                        .collect();
                    emit(&json!({"valid": true, "order": order}), &None)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::InvalidWorkflow(violations)) => {
                    emit(&json!({"valid": false, "violations": violations}), &None)?;
                    Ok(ExitCode::from(1))
                }
                Err(other) => Err(other),
            }
        }
        Command::Execute {
            workflow,
            inputs,
            out,
        } => {
            let wf = load_workflow(&workflow)?;
            let rel = load_relation(&wf, &inputs)?;
            let data = RelationData::from_relation(&wf, &rel)?;
            emit(&serde_json::to_value(&data)?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckSafe {
            workflow,
            view,
            gamma,
            gammas,
            mode,
            inputs,
        } => {
            let wf = load_workflow(&workflow)?;
            let view: View = load_json(&view)?;
            view.validate(&wf)?;
            let gammas = parse_gammas(gamma, &gammas)?;
            let cert = match mode {
                ModeArg::Standalone => check_standalone_view(&wf, &view, &gammas, &budget)?,
                ModeArg::Exact | ModeArg::Compositional => {
                    let rel = load_relation(&wf, &inputs)?;
                    let mode = match mode {
                        ModeArg::Exact => CheckMode::Exact,
                        _ => CheckMode::Compositional,
                    };
                    is_workflow_safe(&wf, &rel, &view, &gammas, mode, &budget)?
                }
            };
            emit(&serde_json::to_value(&cert)?, &None)?;
            Ok(if cert.is_safe() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Standalone {
            workflow,
            module,
            gamma,
            costs,
            all,
        } => {
            let wf = load_workflow(&workflow)?;
            let costs = load_costs(&wf, &costs)?;
            let idx = wf.module(&module)?;
            let table = ModuleRelation::from_behavior(&wf, idx, budget.max_table_rows)?;
            match analyze_module(&table, &costs, gamma, &budget) {
                Ok(report) => {
                    let data = report.to_data()?;
                    let mut value = serde_json::to_value(&data)?;
                    if !all {
                        value.as_object_mut().unwrap().remove("safe_hidden_sets");
                    }
                    emit(&value, &None)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::InfeasibleStandalone { module, gamma }) => {
                    emit(
                        &json!({"module": module, "gamma": gamma, "infeasible": true}),
                        &None,
                    )?;
                    Ok(ExitCode::from(1))
                }
                Err(other) => Err(other),
            }
        }
        Command::Requirements {
            workflow,
            gamma,
            gammas,
            form,
            out,
        } => {
            let wf = load_workflow(&workflow)?;
            let costs = Costs::from_workflow(&wf);
            let gammas = parse_gammas(gamma, &gammas)?;
            let form = match form {
                FormArg::Set => RequirementForm::Set,
                FormArg::Cardinality => RequirementForm::Cardinality,
            };
            let mut requirements = Requirements::default();
            for (idx, module) in wf.modules().iter().enumerate() {
                if module.is_public() {
                    continue;
                }
                let table = ModuleRelation::from_behavior(&wf, idx, budget.max_table_rows)?;
                let report =
                    analyze_module(&table, &costs, gammas.for_module(&module.name), &budget)?;
                let list = to_requirements(&table, &report, form)?;
                requirements.modules.insert(module.name.clone(), list);
            }
            emit(&serde_json::to_value(requirements.to_entries())?, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            workflow,
            method,
            reqs,
            costs,
            seed,
            out,
        } => {
            let wf = load_workflow(&workflow)?;
            let costs = load_costs(&wf, &costs)?;
            let requirements = load_requirements(&wf, &reqs)?;
            let solution = match method {
                MethodArg::Exact => solvers::solve_exact(&wf, &requirements, &costs, &budget)?,
                MethodArg::CardRound => solvers::solve_cardinality_rounding(
                    &wf,
                    &requirements,
                    &costs,
                    seed.unwrap_or(0),
                    &budget,
                )?,
                MethodArg::SetRound => {
                    solvers::solve_set_rounding(&wf, &requirements, &costs, &budget)?
                }
                MethodArg::Greedy => solvers::solve_greedy_bounded(&wf, &requirements, &costs)?,
                MethodArg::GeneralSet => {
                    solvers::solve_general_set(&wf, &requirements, &costs, &budget)?
                }
            };
            let data = solution.to_data()?;
            emit(&serde_json::to_value(&data)?, &out)?;
            Ok(if solution.feasible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify {
            workflow,
            reqs,
            solution,
        } => {
            let wf = load_workflow(&workflow)?;
            let requirements = load_requirements(&wf, &reqs)?;
            let data: SolutionData = load_json(&solution)?;
            let solution = Solution::from_data(data)?;
            let (feasible, satisfied) = solvers::verify_solution(
                &wf,
                &requirements,
                &solution.hidden_attributes,
                &solution.hidden_modules,
            )?;
            emit(
                &json!({"feasible": feasible, "satisfied_option": satisfied}),
                &None,
            )?;
            Ok(if feasible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Worlds {
            workflow,
            view,
            count,
            list,
            budget: budget_override,
            inputs,
        } => {
            if count == list {
                return Err(Error::Precondition(
                    "pass exactly one of --count or --list".into(),
                ));
            }
            let mut budget = budget;
            if let Some(b) = budget_override {
                budget.max_world_candidates = b;
            }
            let wf = load_workflow(&workflow)?;
            let view: View = load_json(&view)?;
            let rel = load_relation(&wf, &inputs)?;
            if count {
                let n = count_worlds(&wf, &rel, &view, &budget)?;
                emit(&json!({"count": n}), &None)?;
            } else {
                let worlds = enumerate_worlds_exact(&wf, &rel, &view, &budget)?;
                let data: Vec<RelationData> = worlds
                    .iter()
                    .map(|w| RelationData::from_relation(&wf, w))
                    .collect::<Result<_, _>>()?;
                emit(&json!({"count": data.len(), "worlds": data}), &None)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            family,
            params,
            out_dir,
        } => {
            let params: Json = match params {
                Some(text) => serde_json::from_str(&text)?,
                None => json!({}),
            };
            let instance = generate(family, &params)?;
            let workflow_json = serde_json::to_value(instance.workflow.def())?;
            let requirements_json = serde_json::to_value(instance.requirements.to_entries())?;
            let costs_json = serde_json::to_value(instance.costs.to_model())?;
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let write = |name: &str, value: &Json| -> Result<(), Error> {
                        let text = format!("{}\n", serde_json::to_string_pretty(value)?);
                        fs::write(dir.join(name), text)?;
                        Ok(())
                    };
                    write("workflow.json", &workflow_json)?;
                    write("requirements.json", &requirements_json)?;
                    write("costs.json", &costs_json)?;
                    emit(&json!({"written": dir.display().to_string()}), &None)?;
                }
                None => {
                    emit(
                        &json!({
                            "workflow": workflow_json,
                            "requirements": requirements_json,
                            "costs": costs_json,
                        }),
                        &None,
                    )?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { suite, csv } => {
            let spec: BenchSuite = load_json(&suite)?;
            let mut instances = Vec::new();
            for entry in &spec.instances {
                let instance = generate(entry.family, &entry.params)?;
                instances.push((entry.name.clone(), instance));
            }
            let report = harness::run_comparison(&instances, &spec.methods, &spec.seeds, &budget);
            let csv_text = report.to_csv();
            if let Some(path) = csv {
                fs::write(path, &csv_text)?;
            }
            print!("{csv_text}");
            eprint!("{}", report.summary());
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchSuite {
    instances: Vec<BenchInstance>,
    methods: Vec<Method>,
    #[serde(default)]
    seeds: Vec<u64>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchInstance {
    name: String,
    family: FamilyArg,
    #[serde(default)]
    params: Json,
}

impl<'de> serde::Deserialize<'de> for FamilyArg {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        <FamilyArg as ValueEnum>::from_str(&s, false)
            .map_err(|_| serde::de::Error::custom(format!("unknown family `{s}`")))
    }
}

fn u64_param(params: &Json, key: &str, default: u64) -> u64 {
    params.get(key).and_then(Json::as_u64).unwrap_or(default)
}

fn generate(family: FamilyArg, params: &Json) -> Result<Instance, Error> {
    match family {
        FamilyArg::Example41 => {
            let n = u64_param(params, "n", 8) as usize;
            let eps = match params.get("eps") {
                Some(v) => serde_json::from_value::<NumDen>(v.clone())?
                    .to_rational()
                    .map_err(Error::Precondition)?,
                None => rat_int(1) / rat_int(4),
            };
            harness::gen_example41(n, &eps)
        }
        FamilyArg::OneoneChain => {
            let k = u64_param(params, "k", 2) as usize;
            let workflow = harness::gen_oneone_chain(k)?;
            let costs = Costs::from_workflow(&workflow);
            Ok(Instance {
                workflow,
                requirements: Requirements::default(),
                costs,
            })
        }
        FamilyArg::Majority => {
            let k = u64_param(params, "k", 2) as usize;
            let workflow = harness::gen_majority_workflow(k)?;
            let costs = Costs::from_workflow(&workflow);
            Ok(Instance {
                workflow,
                requirements: Requirements::default(),
                costs,
            })
        }
        FamilyArg::PublicConstant => {
            let k = u64_param(params, "k", 3) as usize;
            let gamma = u64_param(params, "gamma", 2);
            let inst = harness::gen_public_counterexample(k, gamma)?;
            Ok(Instance {
                workflow: inst.workflow,
                requirements: inst.requirements,
                costs: inst.costs,
            })
        }
        FamilyArg::RandomDag => {
            let form = match params.get("form").and_then(Json::as_str) {
                Some("cardinality") => RequirementForm::Cardinality,
                _ => RequirementForm::Set,
            };
            harness::gen_random_instance(&RandomParams {
                seed: u64_param(params, "seed", 0),
                n_modules: u64_param(params, "n_modules", 4) as usize,
                max_inputs: u64_param(params, "max_inputs", 2) as usize,
                max_outputs: u64_param(params, "max_outputs", 2) as usize,
                gamma_bound: u64_param(params, "gamma_bound", 2) as usize,
                l_max: u64_param(params, "l_max", 2) as usize,
                form,
            })
        }
        FamilyArg::Setcover => harness::gen_setcover_shape(
            u64_param(params, "seed", 0),
            u64_param(params, "elements", 4) as usize,
            u64_param(params, "sets", 3) as usize,
        ),
    }
}
