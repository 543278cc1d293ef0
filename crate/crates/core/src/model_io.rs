//! Text serialisation of trained models.
//!
//! ```text
//! tmhcrf-model 1
//! config_hash <sha256 of the feature section>
//! features <K>
//! topology <binary|extended>
//! begin_config
//! group.basic = on
//! ...
//! end_config
//! <group> <key> <context> <index> <weight>     (tab separated, K lines)
//! ```

use std::fs;
use std::path::Path;

use crate::chain::CrfModel;
use crate::config::{feature_hash, ExperimentConfig};
use crate::error::{Error, Result};
use crate::features::{parse_key_fields, FeatureConfig, FeatureIndex};
use crate::topology::{StateTopology, TopologyKind};

pub const FORMAT_HEADER: &str = "tmhcrf-model 1";

pub fn model_hash(model: &CrfModel) -> String {
    feature_hash(model.config(), model.topology().kind())
}

pub fn model_to_string(model: &CrfModel) -> String {
    let kind = model.topology().kind();
    let mut out = format!(
        "{FORMAT_HEADER}\nconfig_hash {}\nfeatures {}\ntopology {}\nbegin_config\n",
        model_hash(model),
        model.num_features(),
        kind.name()
    );
    out.push_str(&ExperimentConfig::feature_text(model.config(), kind));
    out.push_str("end_config\n");
    for (j, (key, w)) in model.index().keys().iter().zip(model.weights()).enumerate() {
        out.push_str(&format!("{key}\t{j}\t{w}\n"));
    }
    out
}

pub fn model_from_str(text: &str) -> Result<CrfModel> {
    let err = |line: usize, msg: &str| Error::ModelFormat {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("missing {what}")));
    let field = |(n, l): (usize, &str), name: &str| -> Result<String> {
        l.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| err(n, &format!("expected `{name}`")))
    };

    let (n, head) = next("header")?;
    if head != FORMAT_HEADER {
        return Err(err(n, "not a model file or unsupported version"));
    }
    let hash = field(next("config_hash")?, "config_hash")?;
    let line = next("features")?;
    let k: usize = field(line, "features")?.parse().map_err(|_| err(line.0, "bad feature count"))?;
    let line = next("topology")?;
    let kind = TopologyKind::parse(&field(line, "topology")?).ok_or_else(|| err(line.0, "unknown topology"))?;
    let (n, l) = next("begin_config")?;
    if l != "begin_config" {
        return Err(err(n, "expected `begin_config`"));
    }
    let mut cfg = ExperimentConfig::with_features(FeatureConfig::none());
    loop {
        let (n, l) = next("end_config")?;
        if l == "end_config" {
            break;
        }
        cfg.apply(l).map_err(|e| err(n, &e.to_string()))?;
    }
    let features = cfg.features;
    if feature_hash(&features, kind) != hash {
        return Err(Error::IncompatibleModel(
            "configuration hash does not match the stored configuration".into(),
        ));
    }

    let mut index_tsv = String::new();
    let mut weights = Vec::with_capacity(k);
    let mut first = None;
    for (n, l) in lines.filter(|(_, l)| !l.is_empty()) {
        first.get_or_insert(n);
        let (rest, w) = l.rsplit_once('\t').ok_or_else(|| err(n, "expected 5 tab-separated fields"))?;
        let fields: Vec<&str> = rest.split('\t').collect();
        if fields.len() != 4 {
            return Err(err(n, "expected 5 tab-separated fields"));
        }
        parse_key_fields(&fields[..3], n)?;
        let w: f64 = w.parse().map_err(|_| err(n, "bad weight"))?;
        weights.push(w);
        index_tsv.push_str(rest);
        index_tsv.push('\n');
    }
    if weights.len() != k {
        return Err(err(0, &format!("header says {k} features, found {}", weights.len())));
    }
    let index = FeatureIndex::from_tsv(&index_tsv).map_err(|e| match e {
        Error::ModelFormat { line, msg } => Error::ModelFormat {
            line: line + first.unwrap_or(1) - 1,
            msg,
        },
        other => other,
    })?;
    CrfModel::new(weights, index, StateTopology::new(kind), features)
}

pub fn save_model(model: &CrfModel, path: &Path) -> Result<()> {
    fs::write(path, model_to_string(model)).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_model(path: &Path) -> Result<CrfModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    model_from_str(&text)
}
