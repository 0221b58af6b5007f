use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::{load_csv, Dataset, LabelColumn};
use crate::error::{Error, Result};

/// One dataset line of a manifest: `name,path[,N,n]`.
///
/// Relative paths are resolved against the manifest's directory. When the
/// expected instance and feature counts are given they are checked on load.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub name: String,
    pub path: PathBuf,
    pub n_instances: Option<usize>,
    pub n_features: Option<usize>,
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::invalid(format!("manifest line {}: {line:?}", lineno + 1));
        if parts.len() != 2 && parts.len() != 4 {
            return Err(bad());
        }
        let path = PathBuf::from(parts[1]);
        let (n_instances, n_features) = if parts.len() == 4 {
            (
                Some(parts[2].parse().map_err(|_| bad())?),
                Some(parts[3].parse().map_err(|_| bad())?),
            )
        } else {
            (None, None)
        };
        out.push(ManifestEntry {
            name: parts[0].to_string(),
            path: if path.is_absolute() { path } else { base.join(path) },
            n_instances,
            n_features,
        });
    }
    if out.is_empty() {
        return Err(Error::invalid("manifest lists no datasets"));
    }
    Ok(out)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))
}

impl ManifestEntry {
    /// Loads the CSV (label in the last column) and checks its shape.
    pub fn load(&self) -> Result<Dataset> {
        let d = load_csv(&self.path, &LabelColumn::Last)?.with_name(self.name.clone());
        if let Some(n) = self.n_instances {
            if d.n_instances() != n {
                return Err(Error::InvalidDataset(format!(
                    "{}: expected {n} instances, found {}",
                    self.name,
                    d.n_instances()
                )));
            }
        }
        if let Some(n) = self.n_features {
            if d.n_features() != n {
                return Err(Error::InvalidDataset(format!(
                    "{}: expected {n} features, found {}",
                    self.name,
                    d.n_features()
                )));
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_resolves_paths() {
        let m = parse_manifest("# datasets\nsonar, data/sonar.csv, 208, 60\n\nw,/abs/w.csv\n", Path::new("/base")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].path, PathBuf::from("/base/data/sonar.csv"));
        assert_eq!(m[0].n_instances, Some(208));
        assert_eq!(m[1].path, PathBuf::from("/abs/w.csv"));
        assert_eq!(m[1].n_features, None);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_manifest("a,b,c\n", Path::new(".")).is_err());
        assert!(parse_manifest("a,b,x,3\n", Path::new(".")).is_err());
        assert!(parse_manifest("# nothing\n", Path::new(".")).is_err());
    }
}
