use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tile's input files. Relative paths are resolved against the manifest's
/// directory by [`load_manifest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activations: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_weights: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<PathBuf>,
    #[serde(default = "default_gsd")]
    pub gsd_cm: f64,
}

fn default_gsd() -> f64 {
    30.0
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ManifestFile {
    // Arrays first: a struct whose fields all default also accepts `[]`.
    Many(Vec<TileManifest>),
    One(TileManifest),
}

impl TileManifest {
    /// Name used in reports: the stem of the first available file.
    pub fn name(&self) -> String {
        [
            &self.probability,
            &self.activations,
            &self.labels,
            &self.image,
        ]
        .into_iter()
        .flatten()
        .next()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tile".to_string())
    }

    pub fn require(&self, field: &str) -> Result<&Path> {
        let value = match field {
            "image" => &self.image,
            "labels" => &self.labels,
            "activations" => &self.activations,
            "se_weights" => &self.se_weights,
            "probability" => &self.probability,
            _ => &None,
        };
        value.as_deref().ok_or_else(|| {
            Error::Manifest(format!("tile {} has no '{field}' entry", self.name()))
        })
    }

    fn resolve(mut self, base: &Path) -> Self {
        for p in [
            &mut self.image,
            &mut self.labels,
            &mut self.activations,
            &mut self.se_weights,
            &mut self.probability,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        self
    }
}

/// Reads a manifest holding either a single tile object or an array of them.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<TileManifest>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: ManifestFile = serde_json::from_str(&text)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let tiles = match parsed {
        ManifestFile::One(t) => vec![t],
        ManifestFile::Many(ts) => ts,
    };
    if tiles.is_empty() {
        return Err(Error::Manifest(format!("{} lists no tiles", path.display())));
    }
    Ok(tiles.into_iter().map(|t| t.resolve(base)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_object_and_array_forms() {
        let dir = tempfile::tempdir().unwrap();
        let one = dir.path().join("one.json");
        fs::write(
            &one,
            r#"{"image": "a.png", "labels": "a_gt.png", "activations": "a.npy",
                "se_weights": "se.npy", "probability": "/abs/a_prob.npy", "gsd_cm": 30}"#,
        )
        .unwrap();
        let tiles = load_manifest(&one).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(tiles[0].labels.as_deref(), Some(dir.path().join("a_gt.png").as_path()));
        assert_eq!(tiles[0].probability.as_deref(), Some(Path::new("/abs/a_prob.npy")));
        assert_eq!(tiles[0].name(), "a_prob");

        let many = dir.path().join("many.json");
        fs::write(&many, r#"[{"labels": "x.png"}, {"labels": "y.png", "gsd_cm": 5}]"#).unwrap();
        let tiles = load_manifest(&many).unwrap();
        assert_eq!(tiles.len(), 2);
        assert_eq!(tiles[1].gsd_cm, 5.0);
        assert!(tiles[0].require("probability").is_err());
    }
}
