//! On-disk finger sets: per finger a region PBM, an outline PBM and the
//! ordered boundary as `x,y` lines.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

use handgeom::features::FingerShape;
use handgeom::pnm::{load_pbm, save_pbm};
use handgeom::profile::FingerSet;
use handgeom::{Point, FINGER_NAMES};

pub fn save(dir: &Path, set: &FingerSet) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for f in &set.fingers {
        let shape = FingerShape::from(f);
        let name = FINGER_NAMES[f.index];
        save_pbm(&shape.region, dir.join(format!("{name}_region.pbm")))?;
        save_pbm(&shape.outline, dir.join(format!("{name}_outline.pbm")))?;
        let mut text = String::new();
        for p in &shape.boundary {
            let _ = writeln!(text, "{},{}", p.x, p.y);
        }
        let path = dir.join(format!("{name}_boundary.txt"));
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn parse_boundary(text: &str, path: &Path) -> anyhow::Result<Vec<Point>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let parsed = line
                .split_once(',')
                .and_then(|(x, y)| Some(Point::new(x.trim().parse().ok()?, y.trim().parse().ok()?)));
            parsed.ok_or_else(|| {
                handgeom::Error::Format(format!("{} line {}: expected x,y", path.display(), i + 1)).into()
            })
        })
        .collect()
}

/// The five shapes saved by [`save`], thumb first.
pub fn load(dir: &Path) -> anyhow::Result<Vec<FingerShape>> {
    FINGER_NAMES
        .iter()
        .map(|name| {
            let region = load_pbm(dir.join(format!("{name}_region.pbm")))?;
            let outline = load_pbm(dir.join(format!("{name}_outline.pbm")))?;
            let path = dir.join(format!("{name}_boundary.txt"));
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let boundary = parse_boundary(&text, &path)?;
            if boundary.iter().any(|p| p.x >= region.width() || p.y >= region.height()) {
                bail!(handgeom::Error::Format(format!(
                    "{}: boundary leaves the canvas",
                    path.display()
                )));
            }
            Ok(FingerShape {
                region,
                boundary,
                outline,
            })
        })
        .collect()
}
