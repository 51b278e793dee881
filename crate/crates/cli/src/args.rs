use std::path::PathBuf;

use clap::{Args, ValueEnum};

use handgeom::classify::{Classifier, ForestConfig, KnnConfig, Metric};
use handgeom::eval::Variant;
use handgeom::imaging::CannyParams;
use handgeom::profile::{Canvas, PipelineParams};
use handgeom::FINGER_NAMES;

use crate::manifest::Manifest;
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HandArg {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArtifactArg {
    None,
    CropLittle,
    SleeveBlob,
    NailSpot,
}

impl ArtifactArg {
    pub fn name(self) -> &'static str {
        match self {
            ArtifactArg::None => "none",
            ArtifactArg::CropLittle => "crop-little",
            ArtifactArg::SleeveBlob => "sleeve-blob",
            ArtifactArg::NailSpot => "nail-spot",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub subjects: usize,
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    /// Master seed; fixes every byte of the cohort.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Between-subject spread relative to the within-subject spread.
    #[arg(long, default_value_t = 3.0)]
    pub separability: f64,
    /// Per-sample thumb perturbation scale.
    #[arg(long, default_value_t = 0.0)]
    pub thumb_jitter: f64,
    #[arg(long, value_enum, default_value_t = HandArg::Right)]
    pub hand: HandArg,
    /// Failure analogue to render.
    #[arg(long, value_enum, default_value_t = ArtifactArg::None)]
    pub artifact: ArtifactArg,
    /// Subjects (0-based) that get the artifact; all subjects when omitted.
    #[arg(long, value_delimiter = ',')]
    pub artifact_subjects: Vec<usize>,
    /// Also write PBM ground-truth masks (hand and each finger).
    #[arg(long)]
    pub truth_masks: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, default_value_t = 3)]
    pub median_window: usize,
    #[arg(long, default_value_t = 1.4)]
    pub canny_sigma: f64,
    /// Canny hysteresis thresholds as fractions of the peak gradient.
    #[arg(long, default_value_t = 0.1)]
    pub canny_low: f64,
    #[arg(long, default_value_t = 0.3)]
    pub canny_high: f64,
    /// Blobs below this fraction of the image area are discarded.
    #[arg(long, default_value_t = 0.001)]
    pub min_area: f64,
    /// Gradient divisor.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 3)]
    pub close_size: usize,
    #[arg(long, default_value_t = 15)]
    pub min_component: usize,
    #[arg(long, default_value_t = 0.02)]
    pub xor_tolerance: f64,
    #[arg(long, default_value_t = 160)]
    pub canvas_width: usize,
    #[arg(long, default_value_t = 280)]
    pub canvas_height: usize,
}

impl PipelineArgs {
    pub fn params(&self) -> anyhow::Result<PipelineParams> {
        let p = PipelineParams {
            median_window: self.median_window,
            canny: CannyParams {
                sigma: self.canny_sigma,
                t_low: self.canny_low,
                t_high: self.canny_high,
            },
            min_area_fraction: self.min_area,
            p: self.p,
            close_size: self.close_size,
            min_component_len: self.min_component,
            xor_tolerance: self.xor_tolerance,
            canvas: Canvas {
                width: self.canvas_width,
                height: self.canvas_height,
            },
        };
        p.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(p)
    }

    pub fn record(&self, m: &mut Manifest) {
        m.set("median-window", self.median_window)
            .set("canny-sigma", self.canny_sigma)
            .set("canny-low", self.canny_low)
            .set("canny-high", self.canny_high)
            .set("min-area", self.min_area)
            .set("p", self.p)
            .set("close-size", self.close_size)
            .set("min-component", self.min_component)
            .set("xor-tolerance", self.xor_tolerance)
            .set("canvas-width", self.canvas_width)
            .set("canvas-height", self.canvas_height);
    }
}

#[derive(Debug, Clone, Args)]
pub struct PreprocessArgs {
    /// Directory holding `scans.csv` (as written by `synth`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Write every intermediate binary image as PBM under `stages/`.
    #[arg(long)]
    pub dump_stages: bool,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    /// Output directory of `preprocess`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Knn,
    Forest,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifierArgs {
    #[arg(long, value_enum, default_value_t = ClassifierKind::Knn)]
    pub classifier: ClassifierKind,
    /// Neighbours for kNN.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// kNN distance: euclidean or pearson.
    #[arg(long, default_value = "euclidean")]
    pub metric: Metric,
    /// Feed kNN the raw columns instead of training-set z-scores.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value_t = 150)]
    pub trees: usize,
    #[arg(long, default_value_t = 0)]
    pub forest_seed: u64,
}

impl ClassifierArgs {
    pub fn build(&self) -> anyhow::Result<Box<dyn Classifier>> {
        Ok(match self.classifier {
            ClassifierKind::Knn => {
                if self.k == 0 {
                    return Err(UsageError("--k must be at least 1".into()).into());
                }
                Box::new(KnnConfig {
                    k: self.k,
                    metric: self.metric,
                    standardize: !self.raw,
                })
            }
            ClassifierKind::Forest => {
                if self.trees == 0 {
                    return Err(UsageError("--trees must be at least 1".into()).into());
                }
                Box::new(ForestConfig {
                    n_trees: self.trees,
                    seed: self.forest_seed,
                })
            }
        })
    }

    pub fn record(&self, m: &mut Manifest) {
        let kind = match self.classifier {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Forest => "forest",
        };
        m.set("classifier", kind)
            .set("k", self.k)
            .set("metric", self.metric.as_str())
            .set("raw", self.raw)
            .set("trees", self.trees)
            .set("forest-seed", self.forest_seed);
    }
}

/// Fingers by name or index (0 = thumb).
pub fn parse_finger(s: &str) -> Result<usize, String> {
    if let Some(i) = FINGER_NAMES.iter().position(|n| n.eq_ignore_ascii_case(s)) {
        return Ok(i);
    }
    match s.parse::<usize>() {
        Ok(i) if i < 5 => Ok(i),
        _ => Err(format!("unknown finger `{s}`; use {} or 0-4", FINGER_NAMES.join(", "))),
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Feature CSV written by `extract`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Fingers whose features are used together.
    #[arg(long, value_delimiter = ',', value_parser = parse_finger, default_value = "index,middle,ring,little")]
    pub fingers: Vec<usize>,
}

impl DataArgs {
    pub fn record(&self, m: &mut Manifest) {
        let names: Vec<&str> = self.fingers.iter().map(|&f| FINGER_NAMES[f]).collect();
        m.set("input", self.input.display())
            .set("out", self.out.display())
            .set_list("fingers", &names);
    }
}

#[derive(Debug, Clone, Args)]
pub struct SubsetArgs {
    /// Feature subset: `all`, a list such as `a5,a6,c3`, or b_sel / b_opt /
    /// b_opt_delta read from `--selection`.
    #[arg(long, default_value = "all")]
    pub subset: String,
    /// `subsets.txt` written by `select`.
    #[arg(long)]
    pub selection: Option<PathBuf>,
}

impl SubsetArgs {
    pub fn record(&self, m: &mut Manifest) {
        m.set("subset", &self.subset);
        if let Some(s) = &self.selection {
            m.set("selection", s.display());
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Largest accuracy loss accepted when pruning b_opt.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Class subsamples averaged when ranking features.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Classes per ranking subsample.
    #[arg(long, default_value_t = 100)]
    pub subsample: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub subset: SubsetArgs,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Test every subject combination of this size built from partition
    /// segments; the whole cohort when omitted.
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub segment_size: usize,
    /// Where the short segment goes: tc1 (last) or tc2 (first).
    #[arg(long, default_value = "tc1")]
    pub variant: Variant,
    #[arg(long, default_value_t = 0)]
    pub partition_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub subset: SubsetArgs,
    /// Enrolled subjects, drawn with `--seed`; all when omitted.
    #[arg(long)]
    pub population: Option<usize>,
    /// Extra subjects, disjoint from the enrolled ones, used only as imposters.
    #[arg(long, default_value_t = 0)]
    pub imposters: usize,
    /// Which sample is the probe (1-3); the other two are enrolled.
    #[arg(long, default_value_t = 3)]
    pub probe: usize,
    /// Threshold grid points.
    #[arg(long, default_value_t = 500)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Output directories of earlier runs.
    #[arg(long, value_delimiter = ',', required = true)]
    pub input: Vec<PathBuf>,
    /// Directory for `summary.txt`.
    #[arg(long)]
    pub out: PathBuf,
}
