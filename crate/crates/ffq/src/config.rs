//! Experiment configuration for `ffq recur`, written as TOML.
//!
//! ```toml
//! field = "2"
//! c = 1
//! M = 2
//! alpha = ["sparse:squares"]   # one stream per coordinate
//! q = "x^2"
//! N = [4, 6, 8]
//! eps = 0.1
//! ladder = 3                   # divisor-ladder moduli tried
//!
//! [A]
//! kind = "subgroup"            # "subgroup", "list" or "random"
//! span = ["t^-2"]              # subgroup: generators, or file = "sub.txt"
//! # points = ["0", "t^-1"]     # list
//! # seed = 7, density = 0.5    # random
//!
//! [syndetic]                   # optional
//! N = 4
//! f_deg = 1
//! ```

use std::path::Path;

use serde::Deserialize;

use ffq_core::intersective::IntPoly;
use ffq_core::recurrence::FiniteRotation;
use ffq_core::subtorus::{Ambient, FpSubspace};

use crate::bind::{parse_field, stream_text, Env};
use crate::error::{CliError, CliResult};
use crate::subspace_io::read_subspace;

fn default_c() -> usize {
    1
}

fn default_ladder() -> usize {
    3
}

fn default_slack() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurConfig {
    pub field: String,
    #[serde(default = "default_c")]
    pub c: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub alpha: Vec<String>,
    pub q: String,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub eps: f64,
    #[serde(default = "default_ladder")]
    pub ladder: usize,
    /// Extra precision of α beyond `M` kept before re-expanding.
    #[serde(default = "default_slack")]
    pub slack: usize,
    #[serde(rename = "A")]
    pub a: SetSpec,
    pub syndetic: Option<SyndeticSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Subgroup {
        #[serde(default)]
        span: Vec<String>,
        file: Option<String>,
    },
    List {
        points: Vec<String>,
    },
    Random {
        seed: u64,
        density: f64,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyndeticSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub f_deg: usize,
}

/// A parsed config with everything bound.
pub struct RecurSetup {
    pub env: Env,
    pub system: FiniteRotation,
    pub q: IntPoly,
    pub config: RecurConfig,
    /// The config echoed in canonical form.
    pub echo: serde_json::Value,
}

impl RecurConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Format(format!("recur config: {}", e.message())))
    }

    /// Binds the config; relative file paths resolve against `base`.
    pub fn bind(self, base: &Path) -> CliResult<RecurSetup> {
        let env = Env::new(parse_field(&self.field)?);
        let f = &env.field;
        if self.alpha.len() != self.c {
            return Err(CliError::Format(format!("alpha has {} streams, c = {}", self.alpha.len(), self.c)));
        }
        if self.n.is_empty() {
            return Err(CliError::Format("N schedule is empty".into()));
        }
        let streams = self.alpha.iter().map(|s| env.stream(s)).collect::<CliResult<Vec<_>>>()?;
        let base_sys = FiniteRotation::from_streams(f, streams.clone(), self.m, self.slack, std::iter::empty())?;
        let (system, a_echo) = match &self.a {
            SetSpec::Subgroup { span, file } => {
                let sub = match file {
                    Some(path) => {
                        if !span.is_empty() {
                            return Err(CliError::Format("give either span or file for a subgroup".into()));
                        }
                        let s = read_subspace(&std::fs::read_to_string(base.join(path))?)?;
                        if s.ambient() != &Ambient::new(f.clone(), self.c, self.m)? {
                            return Err(CliError::Format("subgroup file lives in a different ambient".into()));
                        }
                        s
                    }
                    None => {
                        let pts =
                            span.iter().map(|p| env.torus_point(p, self.m)).collect::<CliResult<Vec<_>>>()?;
                        FpSubspace::span(Ambient::new(f.clone(), self.c, self.m)?, pts.iter())?
                    }
                };
                let echo = serde_json::json!({ "kind": "subgroup", "basis": sub.basis().iter().map(|x| x.to_text(f)).collect::<Vec<_>>() });
                (base_sys.with_subgroup(&sub)?, echo)
            }
            SetSpec::List { points } => {
                let mut idx = Vec::new();
                for p in points {
                    idx.push(env.torus_point(p, self.m)?.group_index(f));
                }
                (base_sys.with_indices(idx)?, serde_json::json!({ "kind": "list", "points": points }))
            }
            SetSpec::Random { seed, density } => (
                base_sys.with_random(*seed, *density)?,
                serde_json::json!({ "kind": "random", "seed": seed, "density": density }),
            ),
        };
        let q = env.int_poly(&self.q)?;
        let echo = serde_json::json!({
            "field": crate::bind::field_text(f),
            "c": self.c,
            "M": self.m,
            "alpha": streams.iter().map(|s| stream_text(s, f)).collect::<Vec<_>>(),
            "q": q.to_text(f),
            "N": self.n,
            "eps": self.eps,
            "ladder": self.ladder,
            "A": a_echo,
        });
        Ok(RecurSetup { env, system, q, config: self, echo })
    }
}
