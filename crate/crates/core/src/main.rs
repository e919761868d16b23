use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fingerangle::annotate::annotate;
use fingerangle::bench::bench;
use fingerangle::config::PipelineConfig;
use fingerangle::image::RgbImage;
use fingerangle::io::{list_frames, read_image, read_jsonl, to_json_line, write_image, InputError};
use fingerangle::pipeline::{FrameResult, FrameStatus, Mode, Pipeline, Tracker};
use fingerangle::synth::{one_hand_corpus, two_hand_corpus, CorpusParams, Session};

const EXIT_INPUT: u8 = 1;
const EXIT_NO_REFERENCE: u8 = 2;

#[derive(Parser)]
#[command(version, about = "Fingertips, palm centres and finger bend angles for up to two hands")]
struct Cli {
    /// Configuration file of key = value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. --set csf_score_min=0.6.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process a frame or a directory of frames against an open-hand reference.
    Run {
        input: PathBuf,
        /// Reference frame: index in frame order or file name. Defaults to the first frame.
        #[arg(long)]
        reference: Option<String>,
        /// Write results.jsonl and reference.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time sequential against combined processing.
    Bench {
        /// Frame directory; the standard synthetic corpus when omitted.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Use the one-hand synthetic corpus.
        #[arg(long)]
        one_hand: bool,
    },
    /// Write a synthetic corpus with ground-truth sidecars.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        sessions: usize,
        /// Bent frames per session after the reference frame.
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        hands: u8,
        /// Image format: png or ppm.
        #[arg(long, default_value = "png")]
        format: String,
    },
    /// Draw palm centres, fingertips and angles onto frames.
    Annotate {
        input: PathBuf,
        /// Existing results to draw; otherwise the frames are processed first.
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

/// A reader that closed stdout early, as `head` does, ends the run quietly.
fn stdout_error(e: std::io::Error) -> Failure {
    match e.kind() {
        std::io::ErrorKind::BrokenPipe => Failure(0, String::new()),
        _ => input_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) | Err(Failure(0, _)) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path).map_err(input_error)?,
        None => PipelineConfig::default(),
    };
    config = config.with_overrides(&cli.overrides).map_err(input_error)?;
    if let Some(mode) = cli.mode {
        config.mode = mode;
    }
    let pipeline = Pipeline::new(config).map_err(input_error)?;

    match &cli.command {
        Command::Run { input, reference, out } => run(cli, pipeline, input, reference.as_deref(), out.as_deref()),
        Command::Bench { input, repetitions, one_hand } => {
            run_bench(cli, &pipeline, input.as_deref(), *repetitions, *one_hand)
        }
        Command::Synth { out, sessions, frames, seed, hands, format } => {
            synth(cli, out, *sessions, *frames, *seed, *hands, format)
        }
        Command::Annotate { input, results, reference, out } => {
            run_annotate(pipeline, input, results.as_deref(), reference.as_deref(), out)
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Index of the reference frame: a number, or a file name or stem.
fn reference_index(frames: &[PathBuf], reference: Option<&str>) -> Result<usize, Failure> {
    let Some(r) = reference else { return Ok(0) };
    let by_name =
        frames.iter().position(|p| file_name(p) == r || p.file_stem().is_some_and(|s| s.to_string_lossy() == r));
    by_name
        .or_else(|| r.parse::<usize>().ok().filter(|&i| i < frames.len()))
        .ok_or_else(|| Failure(EXIT_NO_REFERENCE, format!("reference frame {r:?} not found")))
}

/// Captures the reference and processes every frame in order.
fn process_all(
    pipeline: Pipeline,
    frames: &[PathBuf],
    reference: Option<&str>,
    mut emit: impl FnMut(&FrameResult, &RgbImage) -> Result<(), Failure>,
) -> Result<Tracker, Failure> {
    let ref_index = reference_index(frames, reference)?;
    let mut tracker = Tracker::new(pipeline);
    let ref_image = read_image(&frames[ref_index])?;
    tracker
        .capture(ref_index as u64, &ref_image)
        .map_err(|e| Failure(EXIT_NO_REFERENCE, format!("{}: {e}", frames[ref_index].display())))?;
    for (k, path) in frames.iter().enumerate() {
        let image = if k == ref_index { ref_image.clone() } else { read_image(path)? };
        let mut result = tracker.process(k as u64, &image);
        result.source = Some(file_name(path));
        emit(&result, &image)?;
    }
    Ok(tracker)
}

fn summary_line(r: &FrameResult) -> String {
    let src = r.source.as_deref().unwrap_or("-");
    match r.status {
        FrameStatus::NoHandsFound => format!("{:>4} {src}: no hands found", r.frame_id),
        _ => {
            let hands: Vec<String> = r
                .hands
                .iter()
                .map(|h| {
                    let cop = h.cop.map_or("none".to_string(), |c| format!("({},{})", c.row, c.col));
                    let a2: Vec<String> = h.angles.iter().map(|a| format!("{:.0}", a.a2)).collect();
                    format!("hand {} cop {cop} tips {} a2 [{}]", h.ordinal, h.tips.len(), a2.join(" "))
                })
                .collect();
            let tag = if r.reference { " (reference)" } else { "" };
            format!("{:>4} {src}{tag}: {}", r.frame_id, hands.join("; "))
        }
    }
}

fn run(
    cli: &Cli,
    pipeline: Pipeline,
    input: &Path,
    reference: Option<&str>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let frames = list_frames(input)?;
    let mut sink = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(input_error)?;
            Some(std::fs::File::create(dir.join("results.jsonl")).map_err(input_error)?)
        }
        None => None,
    };
    let stdout = std::io::stdout();
    let tracker = process_all(pipeline, &frames, reference, |result, _| {
        if let Some(f) = sink.as_mut() {
            writeln!(f, "{}", to_json_line(result)).map_err(input_error)?;
        }
        let line = if cli.json { to_json_line(result) } else { summary_line(result) };
        writeln!(stdout.lock(), "{line}").map_err(stdout_error)
    })?;
    if let (Some(dir), Some(model)) = (out, tracker.reference()) {
        let json = serde_json::to_string_pretty(model).expect("reference serializes");
        std::fs::write(dir.join("reference.json"), json).map_err(input_error)?;
    }
    Ok(())
}

fn corpus_frames(sessions: &[Session]) -> Vec<RgbImage> {
    sessions.iter().flat_map(|s| s.frames.iter().map(|f| f.image.clone())).collect()
}

fn run_bench(
    cli: &Cli,
    pipeline: &Pipeline,
    input: Option<&Path>,
    repetitions: usize,
    one_hand: bool,
) -> Result<(), Failure> {
    let frames = match input {
        Some(dir) => list_frames(dir)?.iter().map(|p| read_image(p)).collect::<Result<Vec<_>, _>>()?,
        None if one_hand => corpus_frames(&one_hand_corpus(&CorpusParams::default())),
        None => corpus_frames(&two_hand_corpus(&CorpusParams::default())),
    };
    let summary = bench(pipeline, &frames, repetitions);
    if cli.json {
        println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
        return Ok(());
    }
    println!("frames {} x {} repetitions", summary.frames, summary.repetitions);
    for s in [&summary.sequential, &summary.combined].into_iter().flatten() {
        let st = &s.stages;
        println!(
            "{:>10}: median {:.0} us (segment {} label {} fingertips {} palm {})",
            s.mode, s.median_us, st.segment_us, st.label_us, st.fingertips_us, st.palm_us
        );
    }
    if let Some(r) = summary.ratio {
        println!("combined / sequential = {r:.3}; identical results: {}", summary.identical);
    }
    Ok(())
}

fn synth(
    cli: &Cli,
    out: &Path,
    sessions: usize,
    frames: usize,
    seed: u64,
    hands: u8,
    format: &str,
) -> Result<(), Failure> {
    if !matches!(format, "png" | "ppm") {
        return Err(input_error(format!("unknown format {format:?}, expected png or ppm")));
    }
    let params = CorpusParams { sessions, frames_per_session: frames, seed, ..Default::default() };
    let corpus = if hands == 1 { one_hand_corpus(&params) } else { two_hand_corpus(&params) };
    for (s, session) in corpus.iter().enumerate() {
        let dir = out.join(format!("session_{s:02}"));
        std::fs::create_dir_all(&dir).map_err(input_error)?;
        for (k, frame) in std::iter::once(&session.reference).chain(&session.frames).enumerate() {
            let stem = format!("frame_{k:03}");
            write_image(&dir.join(format!("{stem}.{format}")), &frame.image)?;
            let truth = serde_json::to_string(&frame.truth).expect("truth serializes");
            std::fs::write(dir.join(format!("{stem}.json")), &truth).map_err(input_error)?;
            if cli.json {
                println!("{{\"session\":{s},\"frame\":{k},\"truth\":{truth}}}");
            }
        }
    }
    if !cli.json {
        println!("wrote {} sessions of {} frames to {}", corpus.len(), frames + 1, out.display());
    }
    Ok(())
}

fn run_annotate(
    pipeline: Pipeline,
    input: &Path,
    results: Option<&Path>,
    reference: Option<&str>,
    out: &Path,
) -> Result<(), Failure> {
    let frames = list_frames(input)?;
    std::fs::create_dir_all(out).map_err(input_error)?;
    let save = |result: &FrameResult, image: &RgbImage, path: &Path| {
        let stem = path.file_stem().map_or("frame".into(), |s| s.to_string_lossy().into_owned());
        write_image(&out.join(format!("{stem}_annotated.png")), &annotate(image, result)).map_err(Failure::from)
    };
    match results {
        Some(file) => {
            let reader = std::io::BufReader::new(std::fs::File::open(file).map_err(input_error)?);
            for result in read_jsonl(reader)? {
                let path = frames
                    .iter()
                    .find(|p| result.source.as_deref() == Some(file_name(p).as_str()))
                    .or_else(|| frames.get(result.frame_id as usize))
                    .ok_or_else(|| input_error(format!("no frame for record {}", result.frame_id)))?;
                save(&result, &read_image(path)?, path)?;
            }
        }
        None => {
            process_all(pipeline, &frames, reference, |result, image| {
                save(result, image, &frames[result.frame_id as usize])
            })?;
        }
    }
    Ok(())
}
