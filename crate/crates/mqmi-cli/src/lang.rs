//! Inline mini-languages for states, channels, partitions and subsystem
//! sets. Party indices are 1-based everywhere on the command line.
//!
//! States: `kind:key=val,...` (e.g. `ggz:n=3,p=0.5,phi=0`,
//! `dicke:n=4,r=2`, `cluster4`, `random_mixed:dims=2x2x2,rank=4,seed=7`)
//! or `@file.json` / `dense@file.json` to load a JSON spec from disk; the
//! file may hold either a full `{"kind": ..., "params": ...}` object or
//! bare dense params `{"dims": ..., "matrix": ...}`.
//!
//! Channels: `depolarize:party=1,p=1`, `random:party=1,rank=2,seed=5`,
//! `identity:party=1`, or `@file.json` with the Kraus schema
//! `{"target": 1-based, "kraus": [[[re,im],...],...]}`.
//!
//! Partitions: `1,2;3` groups parties 1 and 2 into one block and party 3
//! into another.

use std::collections::BTreeMap;
use std::fs;

use mqmi::channels::{ChannelSpec, KrausChannel};
use mqmi::error::{Error, Result};
use mqmi::measures::Partition;
use mqmi::states::{StateKind, StateParams, StateSpec};
use mqmi::SubsystemSet;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn parse_kv(body: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for piece in body.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = piece
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got `{piece}`")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn take_usize(map: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>> {
    map.get(key)
        .map(|v| v.parse::<usize>().map_err(|_| bad(format!("`{key}` must be an integer"))))
        .transpose()
}

fn take_u64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<u64>> {
    map.get(key)
        .map(|v| v.parse::<u64>().map_err(|_| bad(format!("`{key}` must be an integer"))))
        .transpose()
}

fn take_f64(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    map.get(key)
        .map(|v| v.parse::<f64>().map_err(|_| bad(format!("`{key}` must be a number"))))
        .transpose()
}

fn take_dims(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<usize>>> {
    map.get(key)
        .map(|v| {
            v.split('x')
                .map(|d| d.parse::<usize>().map_err(|_| bad("dims must look like 2x2x2")))
                .collect::<Result<Vec<usize>>>()
        })
        .transpose()
}

/// Parses an inline state spec or loads one from `@file.json`.
pub fn parse_state_spec(text: &str) -> Result<StateSpec> {
    if let Some(path) = text.strip_prefix('@').or_else(|| {
        text.strip_prefix("dense@")
    }) {
        return load_state_file(path);
    }
    let (kind_text, body) = match text.split_once(':') {
        Some((k, b)) => (k, b),
        None => (text, ""),
    };
    let map = parse_kv(body)?;
    let kind = match kind_text {
        "ggz" | "gghz" => StateKind::Ggz,
        "dicke" => StateKind::Dicke,
        "antisym3" | "psi_as" => StateKind::Antisym3,
        "cluster4" => StateKind::Cluster4,
        "hs4" => StateKind::Hs4,
        "random_pure" => StateKind::RandomPure,
        "random_mixed" => StateKind::RandomMixed,
        other => return Err(bad(format!("unknown state kind `{other}`"))),
    };
    let params = StateParams {
        n: take_usize(&map, "n")?,
        r: take_usize(&map, "r")?,
        p: take_f64(&map, "p")?,
        phi: take_f64(&map, "phi")?,
        dims: take_dims(&map, "dims")?,
        rank: take_usize(&map, "rank")?,
        seed: take_u64(&map, "seed")?,
        ..Default::default()
    };
    Ok(StateSpec { kind, params })
}

fn load_state_file(path: &str) -> Result<StateSpec> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("kind").is_some() {
        Ok(serde_json::from_value(value)?)
    } else if value.get("dims").is_some() && value.get("matrix").is_some() {
        // bare dense params
        let params: StateParams = serde_json::from_value(value)?;
        Ok(StateSpec {
            kind: StateKind::Dense,
            params,
        })
    } else {
        Err(bad(format!(
            "{path}: expected a state spec or dense params object"
        )))
    }
}

/// A channel recipe; the Kraus dimension is resolved against the target
/// party of a concrete state.
pub enum ChannelRecipe {
    Depolarize { party: usize, p: f64 },
    Random { party: usize, rank: usize, seed: u64 },
    Identity { party: usize },
    File(ChannelSpec),
}

impl ChannelRecipe {
    /// 0-based target party.
    pub fn party(&self) -> Result<usize> {
        let one_based = match self {
            ChannelRecipe::Depolarize { party, .. } => *party,
            ChannelRecipe::Random { party, .. } => *party,
            ChannelRecipe::Identity { party } => *party,
            ChannelRecipe::File(spec) => spec.target,
        };
        if one_based == 0 {
            return Err(bad("party indices are 1-based"));
        }
        Ok(one_based - 1)
    }

    pub fn materialize(&self, dims: &[usize]) -> Result<KrausChannel> {
        let party = self.party()?;
        if party >= dims.len() {
            return Err(Error::InvalidSubsystems(format!(
                "party {} out of range for {} parties",
                party + 1,
                dims.len()
            )));
        }
        let d = dims[party];
        match self {
            ChannelRecipe::Depolarize { p, .. } => KrausChannel::depolarizing(party, d, *p),
            ChannelRecipe::Random { rank, seed, .. } => {
                KrausChannel::random(party, d, *rank, *seed)
            }
            ChannelRecipe::Identity { .. } => Ok(KrausChannel::identity(party, d)),
            ChannelRecipe::File(spec) => spec.to_channel(),
        }
    }
}

pub fn parse_channel(text: &str) -> Result<ChannelRecipe> {
    if let Some(path) = text.strip_prefix('@') {
        let body = fs::read_to_string(path)?;
        return Ok(ChannelRecipe::File(serde_json::from_str(&body)?));
    }
    let (kind, body) = match text.split_once(':') {
        Some((k, b)) => (k, b),
        None => (text, ""),
    };
    let map = parse_kv(body)?;
    let party = take_usize(&map, "party")?
        .ok_or_else(|| bad("channel needs party=<1-based index>"))?;
    match kind {
        "depolarize" => Ok(ChannelRecipe::Depolarize {
            party,
            p: take_f64(&map, "p")?.ok_or_else(|| bad("depolarize needs p=<0..1>"))?,
        }),
        "random" => Ok(ChannelRecipe::Random {
            party,
            rank: take_usize(&map, "rank")?.unwrap_or(2),
            seed: take_u64(&map, "seed")?.unwrap_or(0),
        }),
        "identity" => Ok(ChannelRecipe::Identity { party }),
        other => Err(bad(format!("unknown channel kind `{other}`"))),
    }
}

/// `"1,2;3"` → blocks `{0,1}` and `{2}`.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let blocks = text
        .split(';')
        .map(parse_subsystems)
        .collect::<Result<Vec<SubsystemSet>>>()?;
    Partition::new(blocks).map_err(|e| match e {
        Error::InvalidPartition(m) => Error::InvalidPartition(m),
        other => other,
    })
}

/// `"1,3"` → `{0, 2}`; the empty string is the empty set.
pub fn parse_subsystems(text: &str) -> Result<SubsystemSet> {
    let mut indices = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let idx: usize = piece
            .parse()
            .map_err(|_| bad(format!("party index `{piece}` is not an integer")))?;
        if idx == 0 {
            return Err(bad("party indices are 1-based"));
        }
        indices.push(idx - 1);
    }
    Ok(SubsystemSet::new(indices))
}

/// Human-readable 1-based rendering of a subsystem set.
pub fn render_subsystems(set: &SubsystemSet) -> String {
    let parts: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
    parts.join(",")
}

pub fn render_partition(parts: &Partition) -> String {
    let blocks: Vec<String> = parts.blocks().iter().map(render_subsystems).collect();
    blocks.join(";")
}
