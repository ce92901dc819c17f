//! Experiment specifications and their plain-text `key=value` form.
//!
//! The same keys are accepted from command-line flags, `--config` files and
//! written manifests, so a manifest fed back as a config reproduces the batch.

use std::path::PathBuf;

use crate::error::{invalid, Error, Result};
use crate::objective::BaseFunctionId;
use crate::orchestrator::{self, RunConfig, RunLog, VariantId};

/// Keys understood by [`ExperimentSpec::from_settings`].
pub const KEYS: &[&str] = &[
    "function",
    "D",
    "de",
    "dims",
    "variant",
    "pop",
    "fes",
    "seeds",
    "cr",
    "f",
    "alpha",
    "epsilon",
    "c_max",
    "ridge",
    "floor",
    "transfer",
    "random_attribution",
    "skip_duplicates",
    "reference",
    "curves",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub functions: Vec<BaseFunctionId>,
    pub variants: Vec<VariantId>,
    /// Shared settings; `function`, `variant` and `seed` are overwritten per run.
    pub template: RunConfig,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Emit per-run convergence curves.
    pub curves: bool,
    /// Variant the summary marks are computed against.
    pub reference: VariantId,
}

impl ExperimentSpec {
    /// Builds a spec from ordered `(key, value)` settings; later entries win.
    pub fn from_settings(settings: &[(String, String)], out_dir: PathBuf) -> Result<Self> {
        let get = |key: &str| {
            settings
                .iter()
                .rev()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.trim())
        };
        if let Some((k, _)) = settings.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return invalid(format!("unknown setting `{k}`"));
        }
        let required = |key: &str| {
            get(key)
                .ok_or_else(|| Error::InvalidInput(format!("missing required setting `--{key}`")))
        };

        let functions = parse_list(required("function")?, |s| s.parse::<BaseFunctionId>())?;
        let variants = parse_list(required("variant")?, |s| s.parse::<VariantId>())?;
        let ambient_dim = parse_num::<usize>("D", required("D")?)?;
        let effective_dim = parse_num::<usize>("de", required("de")?)?;
        let seeds = parse_seeds(required("seeds")?)?;
        let dims = match get("dims") {
            Some(s) if !s.is_empty() => parse_list(s, |v| parse_num::<usize>("dims", v))?,
            _ => Vec::new(),
        };
        if dims.is_empty() && variants.iter().any(|v| v.uses_embeddings()) {
            return invalid("missing required setting `--dims` for an embedding variant");
        }

        let mut template =
            RunConfig::new(functions[0], ambient_dim, effective_dim, dims, variants[0]);
        if let Some(v) = get("pop") {
            template.population = parse_num("pop", v)?;
        }
        if let Some(v) = get("fes") {
            template.max_fes = parse_num("fes", v)?;
        }
        if let Some(v) = get("cr") {
            template.de.crossover_rate = parse_num("cr", v)?;
        }
        if let Some(v) = get("f") {
            template.de.scale = parse_num("f", v)?;
        }
        if let Some(v) = get("alpha") {
            template.alpha = parse_num("alpha", v)?;
        }
        if let Some(v) = get("epsilon") {
            template.epsilon = parse_num("epsilon", v)?;
        }
        if let Some(v) = get("c_max") {
            template.trend_clamp = parse_num("c_max", v)?;
        }
        if let Some(v) = get("ridge") {
            template.ridge = parse_num("ridge", v)?;
        }
        if let Some(v) = get("floor") {
            template.floor = parse_num("floor", v)?;
        }
        if let Some(v) = get("transfer") {
            template.transfer_override = match v {
                "auto" => None,
                other => Some(parse_bool("transfer", other)?),
            };
        }
        if let Some(v) = get("random_attribution") {
            template.random_attribution = parse_bool("random_attribution", v)?;
        }
        if let Some(v) = get("skip_duplicates") {
            template.skip_duplicate_transfers = parse_bool("skip_duplicates", v)?;
        }
        let curves = get("curves")
            .map(|v| parse_bool("curves", v))
            .transpose()?
            .unwrap_or(true);
        let reference = match get("reference") {
            Some(v) => v.parse()?,
            None if variants.contains(&VariantId::SMF) => VariantId::SMF,
            None => variants[0],
        };

        let spec = Self {
            functions,
            variants,
            template,
            seeds,
            out_dir,
            curves,
            reference,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() || self.variants.is_empty() || self.seeds.is_empty() {
            return invalid("an experiment needs at least one function, variant and seed");
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return invalid("seeds must be unique");
        }
        if !self.variants.contains(&self.reference) {
            return invalid(format!(
                "reference variant {} is not part of the experiment",
                self.reference
            ));
        }
        for &function in &self.functions {
            for &variant in &self.variants {
                RunConfig {
                    function,
                    variant,
                    ..self.template.clone()
                }
                .validate()?;
            }
        }
        Ok(())
    }

    /// Every run of the batch: function-major, then variant, then seed.
    pub fn run_configs(&self) -> impl Iterator<Item = RunConfig> + '_ {
        self.functions.iter().flat_map(move |&function| {
            self.variants.iter().flat_map(move |&variant| {
                self.seeds.iter().map(move |&seed| RunConfig {
                    function,
                    variant,
                    seed,
                    ..self.template.clone()
                })
            })
        })
    }

    /// Runs the whole batch. Variants of the same function and seed share one
    /// objective instance.
    pub fn execute(&self) -> Result<Vec<RunLog>> {
        let mut logs = Vec::new();
        for &function in &self.functions {
            let base = RunConfig {
                function,
                ..self.template.clone()
            };
            logs.extend(orchestrator::run_variant_suite(
                &base,
                &self.variants,
                &self.seeds,
            )?);
        }
        Ok(logs)
    }

    /// The settings that reproduce this spec, in [`KEYS`] order.
    pub fn to_settings(&self) -> Vec<(String, String)> {
        let t = &self.template;
        let join = |items: Vec<String>| items.join(",");
        let pairs: Vec<(&str, String)> = vec![
            (
                "function",
                join(self.functions.iter().map(|f| f.to_string()).collect()),
            ),
            ("D", t.ambient_dim.to_string()),
            ("de", t.effective_dim.to_string()),
            ("dims", join(t.dims.iter().map(|d| d.to_string()).collect())),
            (
                "variant",
                join(self.variants.iter().map(|v| v.to_string()).collect()),
            ),
            ("pop", t.population.to_string()),
            ("fes", t.max_fes.to_string()),
            (
                "seeds",
                join(self.seeds.iter().map(|s| s.to_string()).collect()),
            ),
            ("cr", t.de.crossover_rate.to_string()),
            ("f", t.de.scale.to_string()),
            ("alpha", t.alpha.to_string()),
            ("epsilon", t.epsilon.to_string()),
            ("c_max", t.trend_clamp.to_string()),
            ("ridge", t.ridge.to_string()),
            ("floor", t.floor.to_string()),
            (
                "transfer",
                t.transfer_override
                    .map_or("auto".to_string(), |b| b.to_string()),
            ),
            ("random_attribution", t.random_attribution.to_string()),
            ("skip_duplicates", t.skip_duplicate_transfers.to_string()),
            ("reference", self.reference.to_string()),
            ("curves", self.curves.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Manifest text: a comment header followed by one `key=value` per line.
    pub fn manifest(&self) -> String {
        let mut out = String::from("# multiform experiment manifest\n");
        for (k, v) in self.to_settings() {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_settings(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return invalid(format!(
                "line {}: expected key=value, got `{line}`",
                lineno + 1
            ));
        };
        let key = k.trim().trim_start_matches("--").to_string();
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Seeds as an inclusive range `a..b` (or `a..=b`), a comma list, or a mix.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = parse_num("seeds", lo)?;
            let hi: u64 = parse_num("seeds", hi.trim_start_matches('='))?;
            if hi < lo {
                return invalid(format!("empty seed range `{part}`"));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(parse_num("seeds", part)?);
        }
    }
    if seeds.is_empty() {
        return invalid("no seeds given");
    }
    Ok(seeds)
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return invalid(format!("empty list `{text}`"));
    }
    Ok(items)
}

fn parse_num<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("invalid value `{text}` for `{key}`")))
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => invalid(format!("invalid boolean `{text}` for `{key}`")),
    }
}
