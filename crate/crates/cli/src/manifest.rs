use std::fmt::{Display, Write as _};
use std::path::Path;

use anyhow::Context;

/// Plain-text run record. Config lines come first and are valid `--config`
/// input; `result.*` lines record what the run produced.
#[derive(Debug, Clone)]
pub struct Manifest {
    config: Vec<(String, String)>,
    results: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            config: vec![
                ("command".into(), command.into()),
                ("version".into(), format!("handgeom {}", env!("CARGO_PKG_VERSION"))),
            ],
            results: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.config.push((key.into(), value.to_string()));
        self
    }

    pub fn set_list<T: Display>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let joined = values.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        self.set(key, joined)
    }

    pub fn result(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.results.push((format!("result.{key}"), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.config.iter().chain(&self.results) {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let path = dir.join("manifest.txt");
        std::fs::write(&path, self.render()).with_context(|| format!("writing {}", path.display()))
    }
}
