use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use cayley_chid::bounds::{
    chernoff_size_tail, delta_exact, janson_delta_bound, janson_mu, janson_tail, lemma21_core, lemma21_value,
    overlap_census, size_tail_offset, triple_count_formula, JansonTail,
};
use cayley_chid::coloring::{chromatic_number_exact, greedy_coloring, is_proper, GreedyStrategy, DEFAULT_CHI_EXACT_CAP};
use cayley_chid::distinguishing::{
    distinguishing_chromatic_number_exact, enumerate_zero_sum_triples, find_independent_triple, is_distinguishing, motion_bound, motion_recolor,
    type1_from_base, DEFAULT_CHI_D_EXACT_CAP,
};
use cayley_chid::exec::Execution;
use cayley_chid::group::{enumerate_subgroups, EnumerationCaps};
use cayley_chid::harness::{run_experiment, ExperimentConfig, ExperimentReport};
use cayley_chid::sampler::{sample_connection_set, RandomStream};
use cayley_chid::symmetry::{
    automorphism_group, cayley_automorphism_order, is_small, semidirect_elements, stabilizer_of_partition,
    AutomorphismGroup, SymmetryCaps,
};
use cayley_chid::{CayleyGraph, ConnectionSet, Error, Family, GroupSpec};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_SCALE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "cayley-chid", version, about = "Random Cayley graphs on finite abelian groups and their distinguishing colorings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a random inverse-closed connection set.
    Sample {
        /// Group as comma-separated cyclic factors, e.g. `2,2,9`.
        #[arg(long)]
        group: GroupSpec,
        /// Inclusion probability per inverse pair.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Substream index; trial `i` of an experiment uses stream `i`.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze one Cayley graph: degree, chromatic number, automorphisms, certificates.
    Analyze {
        #[arg(long)]
        group: GroupSpec,
        /// A file or an inline list: `[1,6]` or `1,6`.
        #[arg(long)]
        set: String,
        /// List the full automorphism group.
        #[arg(long)]
        exact_aut: bool,
        /// Exact chromatic number (otherwise greedy).
        #[arg(long)]
        exact_chi: bool,
        /// Exact distinguishing chromatic number.
        #[arg(long)]
        exact_chid: bool,
        /// Seed for the randomized recoloring path.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the graph in DIMACS edge format.
        #[arg(long)]
        export_dimacs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; 1 runs serially. Defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the CSV summary here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Stamp the report with the generation time.
        #[arg(long)]
        timestamp: bool,
    },
    /// Evaluate a closed-form bound.
    Bounds {
        #[arg(long)]
        formula: String,
        /// Comma-separated `key=value` pairs, e.g. `n=25,q=0.5`.
        #[arg(long, default_value = "")]
        params: String,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive censuses of a group.
    Census {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, value_enum)]
        what: CensusKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CensusKind {
    Triples,
    Overlaps,
    Subgroups,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ScaleCap { .. } => EXIT_SCALE,
            Error::InvalidGroup(_)
            | Error::SpecMismatch
            | Error::IndexOutOfRange { .. }
            | Error::Parameter(_)
            | Error::FormulaDomain(_)
            | Error::UnsupportedFamily(_)
            | Error::Malformed(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_RUNTIME,
        message: message.into(),
    }
}

type CliResult<T> = Result<T, Failure>;

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| runtime(format!("writing {}: {e}", path.display()))),
        // a closed pipe (`| head`) is not an error
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(runtime(format!("writing stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn cmd_sample(group: &GroupSpec, p: f64, seed: u64, stream: u64, out: Option<&Path>) -> CliResult<()> {
    let s = sample_connection_set(group, p, RandomStream::new(seed, stream))?;
    let d = s.decomposition();
    let v = json!({
        "config": { "group": group, "p": p, "seed": seed, "stream": stream },
        "set": s.to_vec(),
        "size": s.size(),
        "decomposition": d,
    });
    write_output(out, &pretty(&v))
}

fn parse_set(group: &GroupSpec, arg: &str) -> CliResult<ConnectionSet> {
    let text = if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| runtime(format!("reading {arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return Ok(ConnectionSet::from_json(group, trimmed)?);
    }
    let mut indices = Vec::new();
    for part in trimmed.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        indices.push(part.parse::<usize>().map_err(|_| usage(format!("set element {part:?} is not an index")))?);
    }
    Ok(ConnectionSet::from_indices(group, indices)?)
}

struct AnalyzeFlags {
    exact_aut: bool,
    exact_chi: bool,
    exact_chid: bool,
    seed: u64,
}

fn cmd_analyze(group: &GroupSpec, set: &str, flags: &AnalyzeFlags, dimacs: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let s = parse_set(group, set)?;
    let graph = CayleyGraph::build(group, &s)?;
    let n = graph.order();
    if let Some(path) = dimacs {
        fs::write(path, graph.graph().to_dimacs()).map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
    }
    let caps = SymmetryCaps::default();

    let (chi, base) = if flags.exact_chi {
        chromatic_number_exact(graph.graph(), DEFAULT_CHI_EXACT_CAP)?
    } else {
        let c = greedy_coloring(graph.graph(), GreedyStrategy::Saturation);
        (c.num_colors(), c)
    };
    let chi_json = json!({
        "value": chi,
        "exact": flags.exact_chi,
        "method": if flags.exact_chi { "dsatur_branch_and_bound" } else { "dsatur_greedy" },
    });

    // the group used to verify certificates, and how it was obtained
    let mut aut_json = json!({});
    let mut verifier: Option<(AutomorphismGroup, &str)> = None;
    if flags.exact_aut || flags.exact_chid {
        let aut = automorphism_group(graph.graph(), &caps)?;
        let small = is_small(&graph, &caps)?;
        aut_json = json!({
            "order": aut.order(),
            "exact": true,
            "is_small": small,
            "generators": aut.generators().iter().map(|g| g.to_vec()).collect::<Vec<_>>(),
        });
        verifier = Some((aut, "full_automorphism_group"));
    } else if n <= caps.max_vertices {
        let small = is_small(&graph, &caps)?;
        let order = cayley_automorphism_order(&graph, &caps, 10_000)?;
        aut_json = json!({ "order": order, "exact": order.is_some(), "is_small": small });
        if small {
            verifier = Some((semidirect_elements(group), "semidirect_group_equals_aut"));
        }
    } else {
        aut_json["skipped"] = json!(format!("n = {n} exceeds the automorphism cap {}", caps.max_vertices));
    }

    let certificate = certificate_json(&graph, &base, chi, verifier.as_ref(), flags.seed);

    let mut chi_d = json!({ "certificate": certificate });
    if flags.exact_chid {
        let (aut, _) = verifier.as_ref().expect("computed with the exact flag");
        let (value, witness) = distinguishing_chromatic_number_exact(graph.graph(), aut, DEFAULT_CHI_D_EXACT_CAP)?;
        chi_d["exact"] = json!({ "value": value, "witness": witness });
    }

    let v = json!({
        "config": {
            "group": group,
            "set": s.to_vec(),
            "exact_aut": flags.exact_aut,
            "exact_chi": flags.exact_chi,
            "exact_chid": flags.exact_chid,
            "seed": flags.seed,
        },
        "order": n,
        "degree": graph.degree(),
        "edges": graph.graph().edge_count(),
        "family": group.family(),
        "chi": chi_json,
        "aut": aut_json,
        "chi_d": chi_d,
    });
    write_output(out, &pretty(&v))
}

fn certificate_json(
    graph: &CayleyGraph,
    base: &cayley_chid::Coloring,
    chi: usize,
    verifier: Option<&(AutomorphismGroup, &str)>,
    seed: u64,
) -> Value {
    let family = graph.spec().family();
    let triple_path = family != Family::TypeII;
    if family == Family::TypeI && find_independent_triple(graph).is_none() {
        return json!({ "path": "triple", "status": "NoTripleFound" });
    }
    let Some((aut, provenance)) = verifier else {
        return json!({ "status": "skipped", "reason": "automorphism group not known to be small; pass --exact-aut" });
    };
    if triple_path {
        match type1_from_base(graph, base, aut) {
            Ok(cert) => {
                return json!({
                    "path": "triple",
                    "status": if cert.proper && cert.verdict.is_distinguishing { "ok" } else { "failed" },
                    "triple": cert.triple.elements,
                    "colors": cert.coloring.num_colors(),
                    "chi_plus_one": cert.coloring.num_colors() == chi + 1,
                    "proper": cert.proper,
                    "distinguishing": cert.verdict.is_distinguishing,
                    "violating_automorphism": cert.verdict.witness,
                    "coloring": cert.coloring,
                    "verified_against": provenance,
                })
            }
            Err(Error::NoTripleFound) => {}
            Err(e) => return json!({ "path": "triple", "status": "error", "reason": e.to_string() }),
        }
    }
    let c1 = base.largest_class();
    let stabilizer = stabilizer_of_partition(aut, base);
    let bound = match motion_bound(&stabilizer, &base.class(c1), 2) {
        Ok(b) => b,
        Err(e) => return json!({ "path": "motion", "status": "error", "reason": e.to_string() }),
    };
    let mut rng = RandomStream::new(seed, 0).rng();
    match motion_recolor(base, c1, 2, aut, &mut rng, 1000) {
        Some((coloring, attempts)) => json!({
            "path": "motion",
            "status": "ok",
            "t": 2,
            "f": bound.f,
            "criterion_holds": bound.criterion_holds,
            "attempts": attempts,
            "colors": coloring.num_colors(),
            "chi_plus_one": coloring.num_colors() <= chi + 1,
            "proper": is_proper(graph.graph(), &coloring),
            "distinguishing": is_distinguishing(&coloring, aut).is_distinguishing,
            "coloring": coloring,
            "verified_against": provenance,
        }),
        None => json!({ "path": "motion", "status": "recolor exhausted", "t": 2, "f": bound.f }),
    }
}

struct ExperimentFlags {
    threads: Option<usize>,
    trials: Option<usize>,
    timestamp: bool,
}

fn cmd_experiment(config: &Path, flags: &ExperimentFlags, out: Option<&Path>, csv: Option<&Path>) -> CliResult<()> {
    let text = fs::read_to_string(config).map_err(|e| usage(format!("reading {}: {e}", config.display())))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(t) = flags.trials {
        config.trials = t;
        config.validate()?;
    }
    config.execution = Execution::with_threads(flags.threads);
    let stamp = flags
        .timestamp
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let mut reports: Vec<ExperimentReport> = Vec::new();
    for c in config.expand_grid() {
        let mut r = run_experiment(&c)?;
        r.generated_unix = stamp;
        if !r.verify_consistency() {
            return Err(runtime("report failed its self-consistency check"));
        }
        reports.push(r);
    }
    let json = if config.p_grid.is_some() {
        serde_json::to_string_pretty(&reports).expect("reports serialize")
    } else {
        reports[0].to_json()
    };
    write_output(out, &json)?;
    if let Some(path) = csv {
        let mut text = String::new();
        for (i, r) in reports.iter().enumerate() {
            let body = r.to_csv();
            text.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |(_, rest)| rest) });
        }
        fs::write(path, text).map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
    }
    for r in &reports {
        for v in r.violations() {
            eprintln!(
                "bound violated at p = {}: {} (parameter {:?}): empirical {} vs bound {:?}",
                r.config.p, v.name, v.parameter, v.empirical, v.bound
            );
        }
    }
    Ok(())
}

const FORMULAS: &[(&str, &[&str])] = &[
    ("lemma21_core", &["p", "c1", "c2"]),
    ("lemma21_value", &["n", "p", "c1", "c2"]),
    ("triple_count", &["n"]),
    ("janson_mu", &["n", "q"]),
    ("janson_delta_bound", &["n", "q"]),
    ("janson_tail", &["mu", "delta"]),
    ("delta_exact", &["n", "q"]),
    ("chernoff_size_tail", &["n", "m", "p", "t"]),
    ("size_tail_offset", &["n", "m"]),
];

fn parse_params(raw: &str) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("parameter {part:?} is not key=value")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("parameter {k} = {v:?} is not a number")))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

fn as_count(name: &str, v: f64) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(usage(format!("parameter {name} = {v} must be a non-negative integer")))
    }
}

fn cmd_bounds(formula: &str, params: &str, as_json: bool) -> CliResult<()> {
    let Some((_, required)) = FORMULAS.iter().find(|(name, _)| *name == formula) else {
        let names: Vec<&str> = FORMULAS.iter().map(|(n, _)| *n).collect();
        return Err(usage(format!("unknown formula {formula:?}; available: {}", names.join(", "))));
    };
    let params = parse_params(params)?;
    for key in params.keys() {
        if !required.contains(&key.as_str()) {
            return Err(usage(format!("{formula} takes {}; unexpected {key}", required.join(", "))));
        }
    }
    let get = |k: &str| params.get(k).copied().ok_or_else(|| usage(format!("{formula} needs parameter {k}")));
    let mut log2_value = None;
    let mut note = None;
    let value = match formula {
        "lemma21_core" => lemma21_core(get("p")?, get("c1")?, get("c2")?)?,
        "lemma21_value" => {
            let r = lemma21_value(get("n")?, get("p")?, get("c1")?, get("c2")?)?;
            log2_value = r.log2_value;
            r.value
        }
        "triple_count" => triple_count_formula(as_count("n", get("n")?)?)? as f64,
        "janson_mu" => janson_mu(as_count("n", get("n")?)?, get("q")?)?,
        "janson_delta_bound" => janson_delta_bound(as_count("n", get("n")?)?, get("q")?)?,
        "janson_tail" => match janson_tail(get("mu")?, get("delta")?) {
            JansonTail::Bound(b) => b,
            JansonTail::Inapplicable { .. } => {
                note = Some("inapplicable: needs 0 < delta and mu <= delta");
                f64::NAN
            }
        },
        "delta_exact" => {
            let n = as_count("n", get("n")?)?;
            delta_exact(&GroupSpec::cyclic(n)?, get("q")?, EnumerationCaps::default().max_order)?
        }
        "chernoff_size_tail" => chernoff_size_tail(
            as_count("n", get("n")?)?,
            as_count("m", get("m")?)?,
            get("p")?,
            get("t")?,
        )?,
        "size_tail_offset" => size_tail_offset(as_count("n", get("n")?)?, as_count("m", get("m")?)?),
        _ => unreachable!("formula table and dispatch agree"),
    };
    if as_json {
        let v = json!({
            "name": formula,
            "parameters": params,
            "value": if value.is_nan() { Value::Null } else { json!(value) },
            "log2_value": log2_value,
            "note": note,
        });
        return write_output(None, &pretty(&v));
    }
    let mut rows: Vec<(String, String)> = vec![("formula".into(), formula.into())];
    rows.extend(params.iter().map(|(k, v)| (k.clone(), v.to_string())));
    rows.push(("value".into(), note.map_or_else(|| value.to_string(), str::to_string)));
    if let Some(l) = log2_value {
        rows.push(("log2_value".into(), l.to_string()));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let table: Vec<String> = rows.iter().map(|(k, v)| format!("{k:<width$}  {v}")).collect();
    write_output(None, &table.join("\n"))
}

fn cmd_census(group: &GroupSpec, what: CensusKind, out: Option<&Path>) -> CliResult<()> {
    let caps = EnumerationCaps::default();
    let v = match what {
        CensusKind::Triples => {
            let triples = enumerate_zero_sum_triples(group);
            json!({
                "config": { "group": group, "what": "triples" },
                "count": triples.len(),
                "formula": triple_count_formula(group.order()).ok(),
                "triples": triples,
            })
        }
        CensusKind::Overlaps => {
            let census = overlap_census(group, caps.max_order)?;
            json!({
                "config": { "group": group, "what": "overlaps" },
                "census": census,
                "delta_exact_q_half": census.delta_exact(0.5),
            })
        }
        CensusKind::Subgroups => {
            let subgroups = enumerate_subgroups(group, &caps)?;
            json!({
                "config": { "group": group, "what": "subgroups" },
                "count": subgroups.len(),
                "subgroups": subgroups.iter().map(|h| json!({ "order": h.order(), "elements": h.elements() })).collect::<Vec<_>>(),
            })
        }
    };
    write_output(out, &pretty(&v))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample {
            group,
            p,
            seed,
            stream,
            out,
        } => cmd_sample(&group, p, seed, stream, out.as_deref()),
        Command::Analyze {
            group,
            set,
            exact_aut,
            exact_chi,
            exact_chid,
            seed,
            export_dimacs,
            out,
        } => {
            let flags = AnalyzeFlags {
                exact_aut,
                exact_chi,
                exact_chid,
                seed,
            };
            cmd_analyze(&group, &set, &flags, export_dimacs.as_deref(), out.as_deref())
        }
        Command::Experiment {
            config,
            threads,
            trials,
            out,
            csv,
            timestamp,
        } => {
            let flags = ExperimentFlags {
                threads,
                trials,
                timestamp,
            };
            cmd_experiment(&config, &flags, out.as_deref(), csv.as_deref())
        }
        Command::Bounds { formula, params, json } => cmd_bounds(&formula, &params, json),
        Command::Census { group, what, out } => cmd_census(&group, what, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
