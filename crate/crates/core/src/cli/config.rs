use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::deblur::{LossWeights, SolverConfig};
use crate::error::{Error, Result};
use crate::motion::LkParams;
use crate::simulator::{MotionSchedule, MotionSegment, Pattern, SimConfig};

/// How `deblur` and `flow` obtain per-interval flows from events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMethod {
    /// Lucas-Kanade between event-integration reconstructions at interval
    /// starts.
    Reconstruction,
    /// Lucas-Kanade between count images of each interval's two halves.
    Counts,
}

impl FlowMethod {
    pub fn name(self) -> &'static str {
        match self {
            FlowMethod::Reconstruction => "reconstruction",
            FlowMethod::Counts => "counts",
        }
    }
}

impl FromStr for FlowMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "reconstruction" => Ok(FlowMethod::Reconstruction),
            "counts" => Ok(FlowMethod::Counts),
            _ => Err(format!("unknown flow method '{s}' (expected reconstruction or counts)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    Checker,
    Ramp,
    Texture,
}

impl PatternKind {
    fn name(self) -> &'static str {
        match self {
            PatternKind::Checker => "checker",
            PatternKind::Ramp => "ramp",
            PatternKind::Texture => "texture",
        }
    }
}

impl FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "checker" => Ok(PatternKind::Checker),
            "ramp" => Ok(PatternKind::Ramp),
            "texture" => Ok(PatternKind::Texture),
            _ => Err(format!("unknown pattern '{s}' (expected checker, ramp or texture)")),
        }
    }
}

/// Every setting of the pipeline commands.
///
/// Read from a flat `key = value` file (`#` starts a comment); see
/// [`PipelineConfig::KEYS`] for the documented keys. Command-line flags
/// are applied on top with [`PipelineConfig::set`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub events: Option<PathBuf>,
    pub blurry: Option<PathBuf>,
    pub frames: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub flows: Option<PathBuf>,
    pub out: PathBuf,

    pub pattern: PatternKind,
    pub cell: usize,
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    /// Per-frame offset in the first half of the sequence.
    pub velocity: (f64, f64),
    /// Per-frame offset in the second half; equal to `velocity` unless set.
    pub velocity2: Option<(f64, f64)>,
    pub frame_interval_us: u64,

    pub sim: SimConfig,
    pub ba_rate: f64,
    pub fn_prob: f64,
    /// Read-out bandwidth in events per second; 0 disables jitter.
    pub jitter_bandwidth: f64,
    pub write_csv: bool,

    pub m_count: usize,
    pub k: usize,

    pub flow_method: FlowMethod,
    pub lk: LkParams,
    pub solver: SolverConfig,

    pub t_ref: Option<u64>,
    pub decay_us: Option<f64>,
    pub ssim: bool,

    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            events: None,
            blurry: None,
            frames: None,
            truth: None,
            flows: None,
            out: PathBuf::from("out"),
            pattern: PatternKind::Checker,
            cell: 8,
            width: 64,
            height: 64,
            n_frames: 49,
            velocity: (1.0 / 7.0, 0.0),
            velocity2: None,
            frame_interval_us: 1000,
            sim: SimConfig::default(),
            ba_rate: 0.0,
            fn_prob: 0.0,
            jitter_bandwidth: 0.0,
            write_csv: false,
            m_count: 7,
            k: 7,
            flow_method: FlowMethod::Reconstruction,
            lk: LkParams::default(),
            solver: SolverConfig::default(),
            t_ref: None,
            decay_us: None,
            ssim: true,
            seed: 0,
        }
    }
}

fn parse_val<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for key '{key}'"))
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("invalid boolean '{value}' for key '{key}'")),
    }
}

fn opt_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl PipelineConfig {
    /// Documented keys with a one-line description each.
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        ("events", "event file (binary EVT1 or t_us,x,y,p text)"),
        ("blurry", "blurry input frame"),
        ("frames", "frame sequence directory or manifest"),
        ("truth", "ground-truth sequence directory or manifest"),
        ("flows", "directory of per-interval flows; skips estimation in deblur"),
        ("out", "output directory"),
        ("pattern", "scene pattern: checker, ramp or texture"),
        ("cell", "checker cell size in pixels"),
        ("width", "scene width"),
        ("height", "scene height"),
        ("n_frames", "number of sharp frames; must equal m_count * k"),
        ("velocity_x", "per-frame x offset (first half of the sequence)"),
        ("velocity_y", "per-frame y offset (first half of the sequence)"),
        ("velocity2_x", "per-frame x offset in the second half"),
        ("velocity2_y", "per-frame y offset in the second half"),
        ("frame_interval_us", "time between sharp frames"),
        ("contrast_threshold", "nominal event threshold in log units"),
        ("threshold_sigma", "per-pixel threshold spread"),
        ("log_eps", "offset inside the log"),
        ("ba_rate", "background events per pixel per second"),
        ("fn_prob", "probability of dropping each real event"),
        ("jitter_bandwidth", "read-out events per second; 0 disables"),
        ("write_csv", "also write events.csv"),
        ("m_count", "number of intervals M"),
        ("k", "latent sub-steps per interval"),
        ("flow_method", "reconstruction or counts"),
        ("window_radius", "Lucas-Kanade window radius"),
        ("lk_iterations", "Lucas-Kanade refinement passes"),
        ("min_eigenvalue", "Lucas-Kanade texture threshold"),
        ("iterations", "solver iterations"),
        ("step_size", "solver step"),
        ("charbonnier_eps", "solver smoothing of the absolute value"),
        ("alpha", "weight of the sequence reconstruction term"),
        ("beta", "weight of the single-frame reconstruction term"),
        ("gamma", "weight of the blur term"),
        ("delta", "weight of the photometric term"),
        ("t_ref", "time-surface reference time; default stream end"),
        ("decay_us", "time-surface decay constant; empty for none"),
        ("ssim", "compute SSIM in eval"),
        ("seed", "seed for every random choice"),
    ];

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "events" => self.events = opt_path(v),
            "blurry" => self.blurry = opt_path(v),
            "frames" => self.frames = opt_path(v),
            "truth" => self.truth = opt_path(v),
            "flows" => self.flows = opt_path(v),
            "out" => self.out = PathBuf::from(v),
            "pattern" => self.pattern = v.parse()?,
            "cell" => self.cell = parse_val(key, v)?,
            "width" => self.width = parse_val(key, v)?,
            "height" => self.height = parse_val(key, v)?,
            "n_frames" => self.n_frames = parse_val(key, v)?,
            "velocity_x" => self.velocity.0 = parse_val(key, v)?,
            "velocity_y" => self.velocity.1 = parse_val(key, v)?,
            "velocity2_x" => self.velocity2.get_or_insert(self.velocity).0 = parse_val(key, v)?,
            "velocity2_y" => self.velocity2.get_or_insert(self.velocity).1 = parse_val(key, v)?,
            "frame_interval_us" => self.frame_interval_us = parse_val(key, v)?,
            "contrast_threshold" => self.sim.contrast_threshold = parse_val(key, v)?,
            "threshold_sigma" => self.sim.threshold_sigma = parse_val(key, v)?,
            "log_eps" => self.sim.log_eps = parse_val(key, v)?,
            "ba_rate" => self.ba_rate = parse_val(key, v)?,
            "fn_prob" => self.fn_prob = parse_val(key, v)?,
            "jitter_bandwidth" => self.jitter_bandwidth = parse_val(key, v)?,
            "write_csv" => self.write_csv = parse_bool(key, v)?,
            "m_count" => self.m_count = parse_val(key, v)?,
            "k" => self.k = parse_val(key, v)?,
            "flow_method" => self.flow_method = v.parse()?,
            "window_radius" => self.lk.window_radius = parse_val(key, v)?,
            "lk_iterations" => self.lk.iterations = parse_val(key, v)?,
            "min_eigenvalue" => self.lk.min_eigenvalue = parse_val(key, v)?,
            "iterations" => self.solver.iterations = parse_val(key, v)?,
            "step_size" => self.solver.step_size = parse_val(key, v)?,
            "charbonnier_eps" => self.solver.charbonnier_eps = parse_val(key, v)?,
            "alpha" => self.solver.weights.alpha = parse_val(key, v)?,
            "beta" => self.solver.weights.beta = parse_val(key, v)?,
            "gamma" => self.solver.weights.gamma = parse_val(key, v)?,
            "delta" => self.solver.weights.delta = parse_val(key, v)?,
            "t_ref" => self.t_ref = if v.is_empty() { None } else { Some(parse_val(key, v)?) },
            "decay_us" => self.decay_us = if v.is_empty() { None } else { Some(parse_val(key, v)?) },
            "ssim" => self.ssim = parse_bool(key, v)?,
            "seed" => self.seed = parse_val(key, v)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Applies `key = value` lines from `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, "expected 'key = value'"))?;
            self.set(key.trim(), value).map_err(|m| Error::parse(path, i + 1, m))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    /// Every key with its current value, in [`PipelineConfig::KEYS`] order.
    /// Parsing the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let opt = |v: Option<String>| v.unwrap_or_default();
        let v2 = self.velocity2.unwrap_or(self.velocity);
        let w = &self.solver.weights;
        let values: Vec<String> = vec![
            path(&self.events),
            path(&self.blurry),
            path(&self.frames),
            path(&self.truth),
            path(&self.flows),
            self.out.display().to_string(),
            self.pattern.name().into(),
            self.cell.to_string(),
            self.width.to_string(),
            self.height.to_string(),
            self.n_frames.to_string(),
            format!("{:?}", self.velocity.0),
            format!("{:?}", self.velocity.1),
            format!("{:?}", v2.0),
            format!("{:?}", v2.1),
            self.frame_interval_us.to_string(),
            format!("{:?}", self.sim.contrast_threshold),
            format!("{:?}", self.sim.threshold_sigma),
            format!("{:?}", self.sim.log_eps),
            format!("{:?}", self.ba_rate),
            format!("{:?}", self.fn_prob),
            format!("{:?}", self.jitter_bandwidth),
            self.write_csv.to_string(),
            self.m_count.to_string(),
            self.k.to_string(),
            self.flow_method.name().into(),
            self.lk.window_radius.to_string(),
            self.lk.iterations.to_string(),
            format!("{:?}", self.lk.min_eigenvalue),
            self.solver.iterations.to_string(),
            format!("{:?}", self.solver.step_size),
            format!("{:?}", self.solver.charbonnier_eps),
            format!("{:?}", w.alpha),
            format!("{:?}", w.beta),
            format!("{:?}", w.gamma),
            format!("{:?}", w.delta),
            opt(self.t_ref.map(|t| t.to_string())),
            opt(self.decay_us.map(|d| format!("{d:?}"))),
            self.ssim.to_string(),
            self.seed.to_string(),
        ];
        let mut out = String::new();
        for ((key, doc), value) in Self::KEYS.iter().zip(values) {
            let _ = writeln!(out, "# {doc}\n{key} = {value}");
        }
        out
    }

    /// Checks cross-field consistency needed by the scene and model.
    pub fn validate(&self) -> Result<()> {
        if self.m_count == 0 || self.k == 0 {
            return Err(Error::arg("m_count and k must be at least 1"));
        }
        if self.n_frames != self.m_count * self.k {
            return Err(Error::arg(format!(
                "n_frames ({}) must equal m_count * k ({} * {})",
                self.n_frames, self.m_count, self.k
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::arg("width and height must be positive"));
        }
        if self.frame_interval_us == 0 {
            return Err(Error::arg("frame_interval_us must be positive"));
        }
        LossWeights::validate(&self.solver.weights)?;
        self.solver.validate()
    }

    pub fn pattern(&self) -> Pattern {
        match self.pattern {
            PatternKind::Checker => Pattern::Checker { cell: self.cell },
            PatternKind::Ramp => Pattern::Ramp,
            PatternKind::Texture => Pattern::Texture { seed: self.seed },
        }
    }

    /// Constant motion, or two equal halves when `velocity2` differs.
    pub fn motion(&self) -> MotionSchedule {
        match self.velocity2 {
            Some(v2) if v2 != self.velocity => {
                let first = self.n_frames / 2;
                MotionSchedule {
                    segments: vec![
                        MotionSegment { frames: first, velocity: self.velocity },
                        MotionSegment { frames: self.n_frames - first, velocity: v2 },
                    ],
                    frame_interval_us: self.frame_interval_us,
                }
            }
            _ => MotionSchedule::constant(self.velocity, self.frame_interval_us),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            rng_seed: self.seed,
            ..self.sim
        }
    }
}
