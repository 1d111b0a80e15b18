use std::fs;
use std::path::{Path, PathBuf};

use log::info;

use super::config::{FlowMethod, PipelineConfig};
use crate::deblur::{flows_from_reconstruction, reblur, solve, write_trace_csv, SolverReport};
use crate::error::{Error, Result};
use crate::event::{
    interval_bounds, read_events_binary, read_events_text, time_surface, write_events_binary, write_events_text,
    EventStream,
};
use crate::frame::{Frame, FrameSequence};
use crate::io::{read_flows, read_frame, read_sequence, write_flows, write_frame, write_sequence, FrameFormat};
use crate::metrics::{evaluate_with, write_report_csv, EvalReport};
use crate::motion::{flows_from_events, FlowField, PlmModel};
use crate::simulator::{
    generate_scene, ground_truth_model, inject_spatial_noise, inject_temporal_jitter, simulate_events,
    synthesize_blur,
};

/// File and directory names written under the output directory.
pub mod names {
    pub const CONFIG: &str = "config.txt";
    pub const EVENTS_BIN: &str = "events.bin";
    pub const EVENTS_CSV: &str = "events.csv";
    pub const BLURRY: &str = "blurry";
    pub const TRUTH_DIR: &str = "truth";
    pub const SHARP_DIR: &str = "sharp";
    pub const GT_FLOWS_DIR: &str = "gt_flows";
    pub const FRAMES_DIR: &str = "frames";
    pub const FLOWS_DIR: &str = "flows";
    pub const TRACE: &str = "trace.csv";
    pub const REBLUR: &str = "reblur";
    pub const TIME_SURFACE: &str = "timesurface";
    pub const REPORT: &str = "report.csv";
}

fn require<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::arg(format!("missing input: set '{key}' in the config or pass --{key}")))
}

fn prepare_out(cfg: &PipelineConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let path = cfg.out.join(names::CONFIG);
    fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))
}

/// Writes `<stem>.pfg` and an 8-bit `<stem>.pgm` preview.
fn write_image_pair(dir: &Path, stem: &str, frame: &Frame) -> Result<Vec<PathBuf>> {
    let float = dir.join(format!("{stem}.{}", FrameFormat::Float32.extension()));
    let pgm = dir.join(format!("{stem}.{}", FrameFormat::Pgm8.extension()));
    write_frame(&float, frame, FrameFormat::Float32)?;
    write_frame(&pgm, frame, FrameFormat::Pgm8)?;
    Ok(vec![float, pgm])
}

fn read_any_events(path: &Path, text_dims: Option<(usize, usize)>) -> Result<EventStream> {
    let mut head = [0u8; 4];
    let n = fs::File::open(path)
        .and_then(|mut f| std::io::Read::read(&mut f, &mut head))
        .map_err(|e| Error::io(path, e))?;
    if n == 4 && &head == b"EVT1" {
        read_events_binary(path)
    } else {
        read_events_text(path, text_dims)
    }
}

/// Loads either event format; text files take their sensor size from `dims`
/// when known, and binary files must match it.
pub fn load_events(path: &Path, dims: Option<(usize, usize)>) -> Result<EventStream> {
    let stream = read_any_events(path, dims)?;
    if let Some(d) = dims {
        if (stream.width(), stream.height()) != d {
            return Err(Error::arg(format!(
                "{}: sensor is {}x{} but the frame is {}x{}",
                path.display(),
                stream.width(),
                stream.height(),
                d.0,
                d.1
            )));
        }
    }
    Ok(stream)
}

/// Renders the configured scene, simulates its events and blur, and writes
/// them with the ground truth. Returns the written paths.
///
/// The event window runs to the end of the last frame's slot,
/// `t_0 + n_frames * frame_interval_us`, so that splitting it into
/// `m_count` intervals puts each boundary on a keyframe.
pub fn cmd_simulate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    prepare_out(cfg)?;
    let motion = cfg.motion();
    let seq = generate_scene(cfg.pattern(), &motion, cfg.n_frames, cfg.width, cfg.height)?;
    let blur = synthesize_blur(&seq)?;
    let raw = simulate_events(&seq, &cfg.sim_config())?;
    let t0 = seq.timestamps()[0];
    let t_end = t0 + cfg.n_frames as u64 * cfg.frame_interval_us;
    let mut events = EventStream::new(cfg.width, cfg.height, t0, t_end, raw.into_events())?;
    if cfg.ba_rate > 0.0 || cfg.fn_prob > 0.0 {
        events = inject_spatial_noise(&events, cfg.ba_rate, cfg.fn_prob, cfg.seed.wrapping_add(1))?;
    }
    if cfg.jitter_bandwidth > 0.0 {
        events = inject_temporal_jitter(&events, cfg.jitter_bandwidth)?;
    }
    info!("simulated {} events over {} frames", events.len(), cfg.n_frames);

    let mut written = vec![cfg.out.join(names::CONFIG)];
    let ev_path = cfg.out.join(names::EVENTS_BIN);
    write_events_binary(&ev_path, &events)?;
    written.push(ev_path);
    if cfg.write_csv {
        let csv = cfg.out.join(names::EVENTS_CSV);
        write_events_text(&csv, &events)?;
        written.push(csv);
    }
    written.extend(write_image_pair(&cfg.out, names::BLURRY, &blur)?);
    written.push(write_sequence(&cfg.out.join(names::TRUTH_DIR), &seq, FrameFormat::Float32)?);

    let keys: Vec<usize> = (0..cfg.m_count).map(|m| m * cfg.k).collect();
    let sharp = FrameSequence::new(
        keys.iter().map(|&i| seq.frames()[i].clone()).collect(),
        keys.iter().map(|&i| seq.timestamps()[i]).collect(),
    )?;
    written.push(write_sequence(&cfg.out.join(names::SHARP_DIR), &sharp, FrameFormat::Float32)?);

    let gt = ground_truth_model(&motion, cfg.width, cfg.height, cfg.m_count, cfg.k)?;
    let gt_dir = cfg.out.join(names::GT_FLOWS_DIR);
    write_flows(&gt_dir, &gt.interval_displacements())?;
    written.push(gt_dir);
    Ok(written)
}

/// Averages a sharp sequence into one blurry frame.
pub fn cmd_blur(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let seq = read_sequence(require(&cfg.frames, "frames")?)?;
    let blur = synthesize_blur(&seq)?;
    prepare_out(cfg)?;
    write_image_pair(&cfg.out, names::BLURRY, &blur)
}

/// Estimates per-interval displacement fields with the configured method.
pub fn estimate_flows(cfg: &PipelineConfig, blurry: &Frame, events: &EventStream) -> Result<Vec<FlowField>> {
    match cfg.flow_method {
        FlowMethod::Reconstruction => {
            flows_from_reconstruction(blurry, events, cfg.sim.contrast_threshold, cfg.m_count, &cfg.lk)
        }
        FlowMethod::Counts => flows_from_events(events, cfg.m_count, cfg.lk.window_radius),
    }
}

/// Writes estimated flows for the configured events (and blurry frame,
/// which the reconstruction method needs).
pub fn cmd_flow(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let flows = match cfg.flow_method {
        FlowMethod::Reconstruction => {
            let blurry = read_frame(require(&cfg.blurry, "blurry")?)?;
            let events = load_events(require(&cfg.events, "events")?, Some(blurry.dims()))?;
            estimate_flows(cfg, &blurry, &events)?
        }
        FlowMethod::Counts => {
            let events = read_any_events(require(&cfg.events, "events")?, Some((cfg.width, cfg.height)))?;
            flows_from_events(&events, cfg.m_count, cfg.lk.window_radius)?
        }
    };
    prepare_out(cfg)?;
    let dir = cfg.out.join(names::FLOWS_DIR);
    write_flows(&dir, &flows)?;
    Ok(vec![dir])
}

/// Where `cmd_deblur` took its flows from.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowSource {
    Loaded(PathBuf),
    Estimated(FlowMethod),
}

impl std::fmt::Display for FlowSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowSource::Loaded(p) => write!(f, "loaded from {}", p.display()),
            FlowSource::Estimated(m) => write!(f, "estimated from events ({})", m.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeblurOutcome {
    pub flow_source: FlowSource,
    pub frames: Vec<Frame>,
    pub flows: Vec<FlowField>,
    pub report: SolverReport,
}

fn load_flow_dir(dir: &Path, m_count: usize, dims: (usize, usize)) -> Result<Vec<FlowField>> {
    let flows = read_flows(dir)?;
    if flows.len() != m_count {
        return Err(Error::arg(format!(
            "{}: found {} flows, expected m_count = {m_count}",
            dir.display(),
            flows.len()
        )));
    }
    if let Some(f) = flows.iter().find(|f| f.dims() != dims) {
        return Err(Error::arg(format!(
            "{}: flow is {}x{} but the frame is {}x{}",
            dir.display(),
            f.width(),
            f.height(),
            dims.0,
            dims.1
        )));
    }
    Ok(flows)
}

/// Recovers `m_count` sharp frames from the blurry frame and its events,
/// and writes them with the flows used and the loss trace.
pub fn cmd_deblur(cfg: &PipelineConfig) -> Result<DeblurOutcome> {
    cfg.solver.validate()?;
    let blurry = read_frame(require(&cfg.blurry, "blurry")?)?;
    let events = load_events(require(&cfg.events, "events")?, Some(blurry.dims()))?;
    let (flows, flow_source) = match &cfg.flows {
        Some(dir) => (load_flow_dir(dir, cfg.m_count, blurry.dims())?, FlowSource::Loaded(dir.clone())),
        None => (estimate_flows(cfg, &blurry, &events)?, FlowSource::Estimated(cfg.flow_method)),
    };
    info!("flow source: {flow_source}");
    let model = PlmModel::from_interval_displacements(flows.clone(), cfg.k)?;
    let (frames, report) = solve(&blurry, &model, &cfg.solver)?;
    info!(
        "solver: {} iterations, objective {:.6e} -> {:.6e}",
        report.iterations_run,
        report.loss_trace.first().copied().unwrap_or(f64::NAN),
        report.total_loss_final
    );

    prepare_out(cfg)?;
    let bounds = interval_bounds(events.t_start(), events.t_end(), cfg.m_count);
    let mut stamps = bounds[..cfg.m_count].to_vec();
    if stamps.windows(2).any(|w| w[0] >= w[1]) {
        stamps = (0..cfg.m_count as u64).collect();
    }
    let seq = FrameSequence::new(frames.clone(), stamps)?;
    write_sequence(&cfg.out.join(names::FRAMES_DIR), &seq, FrameFormat::Float32)?;
    write_flows(&cfg.out.join(names::FLOWS_DIR), &flows)?;
    write_trace_csv(&cfg.out.join(names::TRACE), &report)?;
    Ok(DeblurOutcome {
        flow_source,
        frames,
        flows,
        report,
    })
}

/// Reblurs a keyframe sequence under the given flows.
pub fn cmd_reblur(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let seq = read_sequence(require(&cfg.frames, "frames")?)?;
    let dims = seq.dims().ok_or_else(|| Error::arg("empty frame sequence"))?;
    let flows = load_flow_dir(require(&cfg.flows, "flows")?, seq.len(), dims)?;
    let model = PlmModel::from_interval_displacements(flows, cfg.k)?;
    let out = reblur(seq.frames(), &model)?;
    prepare_out(cfg)?;
    write_image_pair(&cfg.out, names::REBLUR, &out)
}

/// Time surface of the configured events at `t_ref` (default: stream end).
/// Text event files take their sensor size from the `width`/`height` keys.
pub fn cmd_timesurface(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let events = read_any_events(require(&cfg.events, "events")?, Some((cfg.width, cfg.height)))?;
    let t_ref = cfg.t_ref.unwrap_or(events.t_end());
    let surface = time_surface(&events, t_ref, cfg.decay_us)?;
    prepare_out(cfg)?;
    write_image_pair(&cfg.out, names::TIME_SURFACE, &surface)
}

/// Scores `frames` against `truth` and writes the report CSV.
pub fn cmd_eval(cfg: &PipelineConfig) -> Result<EvalReport> {
    let frames = read_sequence(require(&cfg.frames, "frames")?)?;
    let truth = read_sequence(require(&cfg.truth, "truth")?)?;
    let report = evaluate_with(frames.frames(), truth.frames(), cfg.ssim)?;
    prepare_out(cfg)?;
    write_report_csv(&cfg.out.join(names::REPORT), &report)?;
    info!(
        "mean PSNR {:.3} dB, frame {} PSNR {:.3} dB",
        report.mean_psnr, report.single_frame_index, report.single_frame_psnr
    );
    Ok(report)
}
