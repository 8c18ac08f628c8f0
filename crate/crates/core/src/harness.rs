//! Seeded Monte Carlo experiments over random Cayley graphs.
//!
//! Trial `i` draws from the substream `mix(seed, i)`: first the connection set,
//! then any randomized recoloring. Aggregates and bound comparisons are pure
//! functions of the configuration and the per-trial records.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{chernoff_size_tail, janson_delta_bound, janson_mu, janson_tail, size_tail_offset};
use crate::cayley::{inversion, translation, CayleyGraph};
use crate::coloring::{chromatic_number_exact, greedy_coloring, Coloring, GreedyStrategy};
use crate::distinguishing::{
    distinguishing_chromatic_number_exact, motion_bound, motion_recolor, type1_from_base, type2_threshold_check,
    TripleFamily,
};
use crate::error::{Error, Result};
use crate::events::{good_pair_event, normalizer_event_in, CosetPairs};
use crate::exec::{map_trials, Execution};
use crate::group::{enumerate_group_automorphisms, gcd, EnumerationCaps, Family, GroupSpec};
use crate::perm::Permutation;
use crate::sampler::{sample_with_rng, trial_count, RandomStream};
use crate::symmetry::{
    automorphism_group, cayley_automorphism_order, is_small, semidirect_elements, stabilizer_of_partition,
    AutomorphismGroup, SymmetryCaps,
};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Slack, in standard errors, for one-sided bound comparisons.
pub const UPPER_SLACK_SE: f64 = 3.0;
/// Slack, in standard errors, for comparisons of a mean with its expectation.
pub const MEAN_SLACK_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AutSmall,
    Triple,
    ChiD,
    StructureEvents,
    SizeConcentration,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AutSmall => "aut_small",
            ExperimentKind::Triple => "triple",
            ExperimentKind::ChiD => "chi_d",
            ExperimentKind::StructureEvents => "structure_events",
            ExperimentKind::SizeConcentration => "size_concentration",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessCaps {
    /// Largest `n` for exact automorphism computation.
    pub aut_exact: usize,
    /// Largest `n` for the exact chromatic number; greedy above.
    pub chi_exact: usize,
    /// Largest `n` for the exact distinguishing chromatic number cross-check.
    pub chi_d_exact: usize,
    /// Largest vertex stabilizer enumerated when recording `|Aut|`.
    pub stabilizer_limit: usize,
    /// Largest automorphism group listed element by element.
    pub max_group_order: usize,
    pub enumeration: EnumerationCaps,
}

impl Default for HarnessCaps {
    fn default() -> Self {
        HarnessCaps {
            aut_exact: 64,
            chi_exact: 40,
            chi_d_exact: 9,
            stabilizer_limit: 10_000,
            max_group_order: 200_000,
            enumeration: EnumerationCaps::default(),
        }
    }
}

impl HarnessCaps {
    fn symmetry(&self) -> SymmetryCaps {
        SymmetryCaps {
            max_vertices: self.aut_exact,
            max_group_order: self.max_group_order,
        }
    }
}

fn default_recolor_attempts() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub group: GroupSpec,
    pub p: f64,
    /// Runs the experiment once per value instead of at `p` (command line only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub caps: HarnessCaps,
    /// Tail offsets for the size experiment; a fixed grid plus the analytic offset by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "default_recolor_attempts")]
    pub max_recolor_attempts: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, group: GroupSpec, p: f64, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            group,
            p,
            p_grid: None,
            trials,
            seed,
            caps: HarnessCaps::default(),
            t_grid: None,
            max_recolor_attempts: default_recolor_attempts(),
            execution: Execution::default(),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(json).map_err(|e| Error::Malformed(format!("experiment config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        for &p in std::iter::once(&self.p).chain(self.p_grid.iter().flatten()) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
            }
        }
        if let Some(grid) = &self.t_grid {
            if let Some(t) = grid.iter().find(|t| !(**t > 0.0)) {
                return Err(Error::Parameter(format!("tail offset {t} must be positive")));
            }
        }
        if self.experiment == ExperimentKind::Triple && gcd(self.group.order(), 6) != 1 {
            return Err(Error::FormulaDomain(format!(
                "triple experiment needs gcd(n, 6) = 1, got n = {}",
                self.group.order()
            )));
        }
        Ok(())
    }

    /// One configuration per grid point, or just this one.
    pub fn expand_grid(&self) -> Vec<ExperimentConfig> {
        match &self.p_grid {
            None => vec![self.clone()],
            Some(grid) => grid
                .iter()
                .map(|&p| ExperimentConfig {
                    p,
                    p_grid: None,
                    ..self.clone()
                })
                .collect(),
        }
    }

    fn tail_offsets(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(|| {
            let n = self.group.order();
            let mut grid = vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0];
            grid.push(size_tail_offset(n, self.group.involution_count()));
            grid
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificatePath {
    Triple,
    Motion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub path: CertificatePath,
    pub colors: usize,
    pub proper: bool,
    pub distinguishing: bool,
    /// Motion path: the split arity and the number of recoloring attempts used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion_f: Option<f64>,
}

impl CertificateRecord {
    /// Proper and distinguishing with `χ + 1` colors (at most `χ + 1` on the motion path).
    pub fn succeeds(&self, chi: usize) -> bool {
        let colors_ok = match self.path {
            CertificatePath::Triple => self.colors == chi + 1,
            CertificatePath::Motion => self.colors <= chi + 1,
        };
        self.proper && self.distinguishing && colors_ok
    }
}

/// What one trial observed; fields an experiment does not measure stay empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub set_size: usize,
    pub x_prime: usize,
    pub x_double_prime: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains_semidirect: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aut_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_small: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent_triples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_is_exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple_found: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_d_exact: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset_event: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer_event: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_pair_event: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl TrialRecord {
    pub fn certificate_succeeds(&self) -> bool {
        match (&self.certificate, self.chi) {
            (Some(c), Some(chi)) => c.succeeds(chi),
            _ => false,
        }
    }

    /// Aut is small and the constructive path had what it needs.
    pub fn qualifies(&self) -> bool {
        self.is_small == Some(true)
            && match &self.certificate {
                Some(c) => c.path == CertificatePath::Motion || self.triple_found == Some(true),
                None => self.triple_found == Some(true),
            }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl Frequency {
    pub fn new(name: &str, parameter: Option<f64>, successes: usize, trials: usize) -> Self {
        let (estimate, wilson_low, wilson_high) = wilson(successes, trials);
        Frequency {
            name: name.to_string(),
            parameter,
            successes,
            trials,
            estimate,
            wilson_low,
            wilson_high,
        }
    }

    /// `√(p̂(1 − p̂)/T)`.
    pub fn standard_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

/// Point estimate and Wilson 95% interval; `(0, 0, 1)` with no trials.
pub fn wilson(successes: usize, trials: usize) -> (f64, f64, f64) {
    if trials == 0 {
        return (0.0, 0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (p, (center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    pub standard_error: f64,
}

impl MeanEstimate {
    pub fn new(name: &str, values: &[f64]) -> Self {
        let count = values.len();
        let mean = if count == 0 { 0.0 } else { values.iter().sum::<f64>() / count as f64 };
        let standard_error = if count < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        };
        MeanEstimate {
            name: name.to_string(),
            count,
            mean,
            standard_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// `empirical ≤ bound + 3 SE`.
    Upper,
    /// `|empirical − expected| ≤ 4 SE`.
    Mean,
    /// Printed alongside, never judged.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    pub kind: ComparisonKind,
    pub empirical: f64,
    pub standard_error: f64,
    /// Absent when the bound does not apply at these parameters.
    pub bound: Option<f64>,
    pub passes: Option<bool>,
}

impl BoundComparison {
    fn new(name: &str, parameter: Option<f64>, kind: ComparisonKind, empirical: f64, se: f64, bound: Option<f64>) -> Self {
        let passes = match kind {
            ComparisonKind::Reference => None,
            ComparisonKind::Upper => bound.map(|b| empirical <= b + UPPER_SLACK_SE * se),
            ComparisonKind::Mean => bound.map(|b| (empirical - b).abs() <= MEAN_SLACK_SE * se),
        };
        BoundComparison {
            name: name.to_string(),
            parameter,
            kind,
            empirical,
            standard_error: se,
            bound,
            passes,
        }
    }

    fn upper(name: &str, parameter: Option<f64>, freq: &Frequency, bound: Option<f64>) -> Self {
        BoundComparison::new(name, parameter, ComparisonKind::Upper, freq.estimate, freq.standard_error(), bound)
    }

    fn mean(name: &str, mean: &MeanEstimate, expected: f64) -> Self {
        BoundComparison::new(name, None, ComparisonKind::Mean, mean.mean, mean.standard_error, Some(expected))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    pub frequencies: Vec<Frequency>,
    pub means: Vec<MeanEstimate>,
}

impl Aggregates {
    pub fn frequency(&self, name: &str) -> Option<&Frequency> {
        self.frequencies.iter().find(|f| f.name == name)
    }

    pub fn mean(&self, name: &str) -> Option<&MeanEstimate> {
        self.means.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub bounds: Vec<BoundComparison>,
    /// Seconds since the epoch; excluded from the determinism contract.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Malformed(format!("experiment report: {e}")))
    }

    /// Record count and indices match the config, and every aggregate and bound
    /// row equals its recomputation from the records.
    pub fn verify_consistency(&self) -> bool {
        if self.trials.len() != self.config.trials || self.trials.iter().enumerate().any(|(i, t)| t.trial != i) {
            return false;
        }
        match summarize(&self.config, &self.trials) {
            Ok((aggregates, bounds)) => aggregates == self.aggregates && bounds == self.bounds,
            Err(_) => false,
        }
    }

    /// Bound rows that were judged and failed.
    pub fn violations(&self) -> Vec<&BoundComparison> {
        self.bounds.iter().filter(|b| b.passes == Some(false)).collect()
    }

    /// One row per aggregate and per bound comparison.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "experiment,group,p,trials,section,name,parameter,value,standard_error,low,high,bound,passes\n",
        );
        let c = &self.config;
        let prefix = format!("{},\"{}\",{},{}", c.experiment.name(), c.group, c.p, c.trials);
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for f in &self.aggregates.frequencies {
            writeln!(
                out,
                "{prefix},frequency,{},{},{},{},{},{},,",
                f.name,
                opt(f.parameter),
                f.estimate,
                f.standard_error(),
                f.wilson_low,
                f.wilson_high
            )
            .unwrap();
        }
        for m in &self.aggregates.means {
            writeln!(out, "{prefix},mean,{},,{},{},,,,", m.name, m.mean, m.standard_error).unwrap();
        }
        for b in &self.bounds {
            writeln!(
                out,
                "{prefix},bound,{},{},{},{},,,{},{}",
                b.name,
                opt(b.parameter),
                b.empirical,
                b.standard_error,
                opt(b.bound),
                b.passes.map(|p| p.to_string()).unwrap_or_default()
            )
            .unwrap();
        }
        out
    }
}

/// Per-configuration data shared read-only by all trials.
struct Context {
    spec: GroupSpec,
    semidirect: Option<AutomorphismGroup>,
    triples: Option<TripleFamily>,
    coset_pairs: Option<std::result::Result<CosetPairs, String>>,
    group_automorphisms: Option<std::result::Result<Vec<Permutation>, String>>,
}

impl Context {
    fn new(config: &ExperimentConfig) -> Self {
        let spec = config.group.clone();
        let kind = config.experiment;
        let n = spec.order();
        let semidirect = (kind == ExperimentKind::ChiD && n <= config.caps.aut_exact).then(|| semidirect_elements(&spec));
        let triples = matches!(kind, ExperimentKind::Triple).then(|| TripleFamily::new(&spec));
        let (coset_pairs, group_automorphisms) = if kind == ExperimentKind::StructureEvents {
            (
                Some(CosetPairs::new(&spec, &config.caps.enumeration).map_err(|e| e.to_string())),
                Some(enumerate_group_automorphisms(&spec, &config.caps.enumeration).map_err(|e| e.to_string())),
            )
        } else {
            (None, None)
        };
        Context {
            spec,
            semidirect,
            triples,
            coset_pairs,
            group_automorphisms,
        }
    }
}

/// Runs the configured experiment at `config.p`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let ctx = Context::new(config);
    let trials = map_trials(config.trials, config.execution, |i| run_trial(config, &ctx, i));
    let (aggregates, bounds) = summarize(config, &trials)?;
    Ok(ExperimentReport {
        config: config.clone(),
        trials,
        aggregates,
        bounds,
        generated_unix: None,
    })
}

fn run_trial(config: &ExperimentConfig, ctx: &Context, index: usize) -> TrialRecord {
    let mut rng = RandomStream::new(config.seed, index as u64).rng();
    let spec = &ctx.spec;
    let s = sample_with_rng(spec, config.p, &mut rng).expect("probability validated with the config");
    let d = s.decomposition();
    let mut record = TrialRecord {
        trial: index,
        set_size: s.size(),
        x_prime: d.x_prime,
        x_double_prime: d.x_double_prime,
        ..TrialRecord::default()
    };
    match config.experiment {
        ExperimentKind::SizeConcentration => {}
        ExperimentKind::Triple => {
            let family = ctx.triples.as_ref().expect("triple family prepared");
            record.independent_triples = Some(family.count_independent(s.members()));
        }
        ExperimentKind::AutSmall => {
            let graph = CayleyGraph::build(spec, &s).expect("sampled set belongs to the group");
            aut_small_trial(config, &graph, &mut record);
        }
        ExperimentKind::ChiD => {
            let graph = CayleyGraph::build(spec, &s).expect("sampled set belongs to the group");
            chi_d_trial(config, ctx, &graph, &mut rng, &mut record);
        }
        ExperimentKind::StructureEvents => {
            let mut failures = Vec::new();
            match ctx.coset_pairs.as_ref().expect("coset pairs prepared") {
                Ok(pairs) => record.coset_event = Some(pairs.first_witness(&s).expect("same spec").is_some()),
                Err(e) => failures.push(e.clone()),
            }
            match ctx.group_automorphisms.as_ref().expect("automorphisms prepared") {
                Ok(auts) => record.normalizer_event = Some(normalizer_event_in(spec, auts, &s).is_some()),
                Err(e) => failures.push(e.clone()),
            }
            match good_pair_event(spec, &s) {
                Ok(b) => record.good_pair_event = Some(b),
                Err(e) => failures.push(e.to_string()),
            }
            if !failures.is_empty() {
                record.failure = Some(failures.join("; "));
            }
        }
    }
    record
}

fn aut_small_trial(config: &ExperimentConfig, graph: &CayleyGraph, record: &mut TrialRecord) {
    let spec = graph.spec();
    let caps = config.caps.symmetry();
    if graph.order() > caps.max_vertices {
        record.failure = Some(format!("scale cap: n = {} exceeds aut_exact = {}", graph.order(), caps.max_vertices));
        return;
    }
    let g = graph.graph();
    let contains = g.is_automorphism(&inversion(spec)) && (0..spec.order()).all(|a| g.is_automorphism(&translation(spec, a)));
    record.contains_semidirect = Some(contains);
    record.is_small = is_small(graph, &caps).ok();
    record.aut_order = cayley_automorphism_order(graph, &caps, config.caps.stabilizer_limit).ok().flatten();
}

fn chi_d_trial(
    config: &ExperimentConfig,
    ctx: &Context,
    graph: &CayleyGraph,
    rng: &mut rand_chacha::ChaCha8Rng,
    record: &mut TrialRecord,
) {
    let n = graph.order();
    let caps = &config.caps;
    let (chi, base) = if n <= caps.chi_exact {
        chromatic_number_exact(graph.graph(), caps.chi_exact).expect("within cap")
    } else {
        let c = greedy_coloring(graph.graph(), GreedyStrategy::Saturation);
        (c.num_colors(), c)
    };
    record.chi = Some(chi);
    record.chi_is_exact = Some(n <= caps.chi_exact);
    let Some(semidirect) = &ctx.semidirect else {
        record.failure = Some(format!("scale cap: n = {n} exceeds aut_exact = {}", caps.aut_exact));
        return;
    };
    let small = is_small(graph, &caps.symmetry()).expect("within cap");
    record.is_small = Some(small);
    let aut = if small {
        semidirect.clone()
    } else if n <= caps.chi_d_exact {
        match automorphism_group(graph.graph(), &caps.symmetry()) {
            Ok(a) => a,
            Err(e) => {
                record.failure = Some(format!("aut not small: {e}"));
                return;
            }
        }
    } else {
        record.failure = Some("aut not small".into());
        return;
    };
    record.aut_order = Some(aut.order());

    let spec = graph.spec();
    let use_triple = match spec.family() {
        Family::TypeI => true,
        Family::TypeII => false,
        Family::Other => TripleFamily::new(spec).first_independent(graph.connection().members()).is_some(),
    };
    if use_triple {
        match type1_from_base(graph, &base, &aut) {
            Ok(cert) => {
                record.triple_found = Some(true);
                record.certificate = Some(CertificateRecord {
                    path: CertificatePath::Triple,
                    colors: cert.coloring.num_colors(),
                    proper: cert.proper,
                    distinguishing: cert.verdict.is_distinguishing,
                    t: None,
                    attempts: None,
                    motion_f: None,
                });
            }
            Err(_) => {
                record.triple_found = Some(false);
                record.failure = Some("no triple".into());
            }
        }
    } else {
        motion_path(config, graph, &base, chi, &aut, rng, record);
    }
    if !small && record.failure.is_none() && !record.certificate_succeeds() {
        record.failure = Some("aut not small".into());
    }
    if n <= caps.chi_d_exact {
        if let Ok((chi_d, _)) = distinguishing_chromatic_number_exact(graph.graph(), &aut, caps.chi_d_exact) {
            record.chi_d_exact = Some(chi_d);
        }
    }
}

fn motion_path(
    config: &ExperimentConfig,
    graph: &CayleyGraph,
    base: &Coloring,
    chi: usize,
    aut: &AutomorphismGroup,
    rng: &mut rand_chacha::ChaCha8Rng,
    record: &mut TrialRecord,
) {
    let n = graph.order();
    let m = graph.spec().involution_count();
    let c1 = base.largest_class();
    let stabilizer = stabilizer_of_partition(aut, base);
    let bound = motion_bound(&stabilizer, &base.class(c1), 2).expect("t = 2 is valid");
    let t = if bound.criterion_holds {
        2
    } else {
        type2_threshold_check(n, m, chi).map(|th| th.t.max(2)).unwrap_or(2)
    };
    match motion_recolor(base, c1, t, aut, rng, config.max_recolor_attempts) {
        Some((coloring, attempts)) => {
            record.certificate = Some(CertificateRecord {
                path: CertificatePath::Motion,
                colors: coloring.num_colors(),
                proper: crate::coloring::is_proper(graph.graph(), &coloring),
                distinguishing: true,
                t: Some(t),
                attempts: Some(attempts),
                motion_f: Some(bound.f),
            });
        }
        None => record.failure = Some("recolor exhausted".into()),
    }
}

fn count(trials: &[TrialRecord], pred: impl Fn(&TrialRecord) -> bool) -> usize {
    trials.iter().filter(|t| pred(t)).count()
}

/// Frequency of `flag == Some(true)` over the trials where it is defined.
fn flag_frequency(name: &str, trials: &[TrialRecord], flag: impl Fn(&TrialRecord) -> Option<bool>) -> Frequency {
    let defined: Vec<bool> = trials.iter().filter_map(&flag).collect();
    Frequency::new(name, None, defined.iter().filter(|&&b| b).count(), defined.len())
}

fn size_tail_rows(
    config: &ExperimentConfig,
    trials: &[TrialRecord],
    offsets: &[f64],
    aggregates: &mut Aggregates,
    bounds: &mut Vec<BoundComparison>,
) -> Result<()> {
    let spec = &config.group;
    let (n, m, p) = (spec.order(), spec.involution_count(), config.p);
    let expected = (n - 1) as f64 * p;
    for &t in offsets {
        let hits = count(trials, |r| r.set_size as f64 >= expected + 3.0 * t);
        let freq = Frequency::new("size_tail", Some(t), hits, trials.len());
        let bound = chernoff_size_tail(n, m, p, t)?;
        bounds.push(BoundComparison::upper("size_tail_chernoff", Some(t), &freq, Some(bound)));
        aggregates.frequencies.push(freq);
    }
    Ok(())
}

/// Aggregates and bound rows, from the records alone.
pub fn summarize(config: &ExperimentConfig, trials: &[TrialRecord]) -> Result<(Aggregates, Vec<BoundComparison>)> {
    let spec = &config.group;
    let (n, p) = (spec.order(), config.p);
    let total = trials.len();
    let mut agg = Aggregates::default();
    let mut bounds = Vec::new();
    match config.experiment {
        ExperimentKind::AutSmall => {
            agg.frequencies.push(flag_frequency("contains_semidirect", trials, |r| r.contains_semidirect));
            agg.frequencies.push(flag_frequency("is_small", trials, |r| r.is_small));
            agg.frequencies.push(flag_frequency("not_small", trials, |r| r.is_small.map(|b| !b)));
            agg.frequencies
                .push(Frequency::new("skipped", None, count(trials, |r| r.is_small.is_none()), total));
            let orders: Vec<f64> = trials.iter().filter_map(|r| r.aut_order.map(|o| o as f64)).collect();
            agg.means.push(MeanEstimate::new("aut_order", &orders));
        }
        ExperimentKind::Triple => {
            let q = 1.0 - p;
            let values: Vec<f64> = trials.iter().filter_map(|r| r.independent_triples.map(|v| v as f64)).collect();
            let mean = MeanEstimate::new("independent_triples", &values);
            let zero = Frequency::new("no_independent_triple", None, count(trials, |r| r.independent_triples == Some(0)), total);
            let mu = janson_mu(n, q)?;
            let delta = janson_delta_bound(n, q)?;
            bounds.push(BoundComparison::mean("independent_triples_mean", &mean, mu));
            bounds.push(BoundComparison::upper("janson_tail", None, &zero, janson_tail(mu, delta).bound()));
            agg.means.push(mean);
            agg.frequencies.push(zero);
        }
        ExperimentKind::ChiD => {
            let qualifying: Vec<&TrialRecord> = trials.iter().filter(|r| r.qualifies()).collect();
            agg.frequencies
                .push(Frequency::new("certificate_success", None, count(trials, TrialRecord::certificate_succeeds), total));
            agg.frequencies.push(Frequency::new("qualifying", None, qualifying.len(), total));
            agg.frequencies.push(Frequency::new(
                "certificate_success_given_qualifying",
                None,
                qualifying.iter().filter(|r| r.certificate_succeeds()).count(),
                qualifying.len(),
            ));
            agg.frequencies.push(flag_frequency("is_small", trials, |r| r.is_small));
            agg.frequencies.push(flag_frequency("triple_found", trials, |r| r.triple_found));
            let limit = 13.0 * n as f64 * p / 7.0;
            agg.frequencies.push(Frequency::new(
                "size_at_most_13np_over_7",
                None,
                count(trials, |r| r.set_size as f64 <= limit),
                total,
            ));
            agg.frequencies.push(flag_frequency("chi_d_exact_at_most_chi_plus_one", trials, |r| {
                Some(r.chi_d_exact? <= r.chi? + 1)
            }));
            let chis: Vec<f64> = trials.iter().filter_map(|r| r.chi.map(|c| c as f64)).collect();
            agg.means.push(MeanEstimate::new("chi", &chis));
            if spec.family() == Family::TypeII {
                let t = size_tail_offset(n, spec.involution_count());
                size_tail_rows(config, trials, &[t], &mut agg, &mut bounds)?;
            }
        }
        ExperimentKind::StructureEvents => {
            agg.frequencies.push(flag_frequency("coset_event", trials, |r| r.coset_event));
            agg.frequencies.push(flag_frequency("normalizer_event", trials, |r| r.normalizer_event));
            let good = flag_frequency("good_pair_event", trials, |r| r.good_pair_event);
            if spec.family() == Family::TypeI && spec.is_cyclic() {
                let k = trial_count(spec) as i32;
                let exact = (1.0 - p).powi(k) + p.powi(k);
                bounds.push(BoundComparison::new(
                    "good_pair_exact_probability",
                    None,
                    ComparisonKind::Reference,
                    good.estimate,
                    good.standard_error(),
                    Some(exact),
                ));
            }
            agg.frequencies.push(good);
        }
        ExperimentKind::SizeConcentration => {
            let m = spec.involution_count();
            agg.frequencies.push(Frequency::new(
                "decomposition_identity",
                None,
                count(trials, |r| r.set_size == r.x_prime + 2 * r.x_double_prime),
                total,
            ));
            let size = MeanEstimate::new("set_size", &trials.iter().map(|r| r.set_size as f64).collect::<Vec<_>>());
            let x1 = MeanEstimate::new("x_prime", &trials.iter().map(|r| r.x_prime as f64).collect::<Vec<_>>());
            let x2 = MeanEstimate::new(
                "x_double_prime",
                &trials.iter().map(|r| r.x_double_prime as f64).collect::<Vec<_>>(),
            );
            bounds.push(BoundComparison::mean("set_size_mean", &size, (n - 1) as f64 * p));
            bounds.push(BoundComparison::mean("x_prime_mean", &x1, (m - 1) as f64 * p));
            bounds.push(BoundComparison::mean("x_double_prime_mean", &x2, (n - m) as f64 / 2.0 * p));
            agg.means.extend([size, x1, x2]);
            size_tail_rows(config, trials, &config.tail_offsets(), &mut agg, &mut bounds)?;
        }
    }
    Ok((agg, bounds))
}
