use std::fmt::Write as _;

use super::{create_dir, read_text, write_text};
use crate::args::ReportArgs;
use crate::config::read_pairs;
use crate::manifest::Manifest;

/// Result files worth quoting in full, by the command that writes them.
const QUOTED: [&str; 3] = ["subsets.txt", "identification.txt", "eer.txt"];

pub fn run(a: &ReportArgs) -> anyhow::Result<()> {
    let mut s = String::new();
    for dir in &a.input {
        let path = dir.join("manifest.txt");
        let text = read_text(&path)?;
        let pairs = read_pairs(&text, &path.display().to_string())?;
        let command = pairs
            .iter()
            .find(|(_, k, _)| k == "command")
            .map_or("?", |(_, _, v)| v.as_str());
        let _ = writeln!(s, "== {} ({command})", dir.display());
        for (_, k, v) in pairs.iter().filter(|(_, k, _)| k.starts_with("result.")) {
            let _ = writeln!(s, "{} = {v}", &k["result.".len()..]);
        }
        for name in QUOTED {
            let p = dir.join(name);
            if p.exists() {
                let _ = writeln!(s, "-- {name}");
                s.push_str(&read_text(&p)?);
            }
        }
        s.push('\n');
    }
    create_dir(&a.out)?;
    write_text(&a.out.join("summary.txt"), &s)?;
    let inputs: Vec<String> = a.input.iter().map(|p| p.display().to_string()).collect();
    let mut m = Manifest::new("report");
    m.set_list("input", &inputs)
        .set("out", a.out.display())
        .result("runs", a.input.len());
    m.write(&a.out)
}
