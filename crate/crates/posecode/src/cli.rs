//! Command-line interface.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use posecode_core::rng::stream;
use posecode_core::sampler::filter_frames;
use posecode_core::selection::{
    classify_eligibility, compute_category_frequencies, is_suspect_rule, mine_statistics_rules,
    TRIVIAL_AT, UNSKIPPABLE_BELOW,
};
use posecode_core::{
    caption_seed, catalog, skeleton, synthetic, Captioner, PoseKeypoints, PoseRecord,
};

use crate::config::{file_names, DataFiles, PipelineConfig};
use crate::dataset::{self, GenerateOptions};
use crate::formats::{self, ExtractLine, ExtractedItem};

#[derive(Debug, Parser)]
#[command(
    name = "posecode",
    version,
    about = "Rule-based captions for 3D human poses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Caption every pose of a corpus.
    Generate(GenerateArgs),
    /// Mine statistics-based redundancy rules from a corpus.
    Mine(MineArgs),
    /// Category frequencies and the eligibility classes they imply.
    Stats(StatsArgs),
    /// Farthest-point sampling of a pose corpus or of motion sequences.
    Sample(SampleArgs),
    /// Swap left and right in a caption file.
    Mirror(MirrorArgs),
    /// Dump the raw posecodes of every pose.
    Extract(ExtractArgs),
    /// Write the built-in tables and a matching config to a directory.
    ExportDefaults(ExportArgs),
    /// Write a corpus of random synthetic poses.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Pipeline configuration (TOML); built-in defaults when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: logical cores].
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Poses, JSON lines or `.pskp`.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub per_pose: Option<u32>,
    /// Captions file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Profile schedule, comma separated (e.g. `A1,A2,A3`).
    #[arg(long, value_delimiter = ',')]
    pub profile: Vec<String>,
    #[arg(long)]
    pub skip_prob: Option<f64>,
    #[arg(long)]
    pub agg_prob: Option<f64>,
    #[arg(long)]
    pub noise_scale: Option<f64>,
    /// Attach the conveyed facts to every caption.
    #[arg(long)]
    pub provenance: bool,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Rules file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suspect-rule report [default: next to --out as `<name>.review.tsv`].
    #[arg(long)]
    pub review: Option<PathBuf>,
    #[arg(long)]
    pub min_support: Option<usize>,
    #[arg(long)]
    pub tau1: Option<f64>,
    #[arg(long)]
    pub tau2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Frequency table; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the eligibility classes implied by the frequencies.
    #[arg(long)]
    pub eligibility_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Candidate poses, JSON lines or `.pskp`.
    #[arg(
        long,
        conflicts_with = "sequences",
        required_unless_present = "sequences"
    )]
    pub corpus: Option<PathBuf>,
    /// Motion sequences (JSON lines); candidates are filtered frames.
    #[arg(long)]
    pub sequences: Option<PathBuf>,
    /// Number of poses to select.
    #[arg(long, short)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 25)]
    pub head_tail: usize,
    #[arg(long, default_value_t = 25)]
    pub stride: usize,
    /// Selected pose ids, one per line; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the selected poses, in selection order.
    #[arg(long)]
    pub poses_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MirrorArgs {
    /// Caption file (JSON lines or plain text).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Jitter scale; 0 gives the noiseless categories.
    #[arg(long, default_value_t = 0.0)]
    pub noise_scale: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Target directory, created if needed.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long, short)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; `.pskp` selects the packed format.
    #[arg(long)]
    pub out: PathBuf,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<PipelineConfig> {
    Ok(match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    })
}

fn build_captioner(config: &PipelineConfig) -> anyhow::Result<Captioner> {
    let data = config.captioner_data()?;
    Captioner::new(data).context("invalid pipeline data")
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut out = open_out(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn read_corpus(path: &Path, captioner: &Captioner) -> anyhow::Result<Vec<PoseRecord>> {
    Ok(formats::read_corpus(
        path,
        captioner.deriver().base_registry(),
    )?)
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Mine(a) => mine(a),
        Command::Stats(a) => stats(a),
        Command::Sample(a) => sample(a),
        Command::Mirror(a) => mirror(a),
        Command::Extract(a) => extract(a),
        Command::ExportDefaults(a) => export_defaults(a),
        Command::Synthesize(a) => synthesize(a),
    }
}

fn generate(a: GenerateArgs) -> anyhow::Result<ExitCode> {
    let mut config = load_config(a.common.config.as_deref())?;
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(n) = a.per_pose {
        config.per_pose = n;
    }
    if a.common.jobs.is_some() {
        config.jobs = a.common.jobs;
    }
    if !a.profile.is_empty() {
        config.schedule = a.profile.clone();
    }
    if a.skip_prob.is_some() {
        config.knobs.skip_prob = a.skip_prob;
    }
    if a.agg_prob.is_some() {
        config.knobs.aggregation_prob = a.agg_prob;
    }
    if a.noise_scale.is_some() {
        config.knobs.noise_scale = a.noise_scale;
    }
    let opts = GenerateOptions {
        schedule: config.profiles()?,
        per_pose: config.per_pose,
        seed: config.seed,
        provenance: a.provenance,
    };
    let captioner = build_captioner(&config)?;
    let corpus = read_corpus(&a.corpus, &captioner)?;
    let pool = dataset::thread_pool(config.jobs)?;

    let start = Instant::now();
    let out = open_out(a.out.as_deref())?;
    let report = dataset::generate_dataset(&corpus, &captioner, &opts, &pool, out)?;
    let secs = start.elapsed().as_secs_f64();

    for f in &report.failures {
        eprintln!("failed: {}: {}", f.pose_id, f.error);
    }
    eprintln!("poses: {}", report.poses);
    eprintln!("captions: {}", report.captions);
    eprintln!("failures: {}", report.failures.len());
    eprintln!("wall time: {secs:.3} s");
    eprintln!(
        "captions/sec: {:.0}",
        report.captions as f64 / secs.max(1e-9)
    );
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn mine(a: MineArgs) -> anyhow::Result<ExitCode> {
    let mut config = load_config(a.common.config.as_deref())?;
    if let Some(v) = a.min_support {
        config.mining.min_support = v;
    }
    if let Some(v) = a.tau1 {
        config.mining.tau1 = v;
    }
    if let Some(v) = a.tau2 {
        config.mining.tau2 = v;
    }
    config.validate()?;
    let params = config.mining_params();
    let captioner = build_captioner(&config)?;
    let corpus = read_corpus(&a.corpus, &captioner)?;
    if corpus.is_empty() {
        bail!("{}: corpus is empty", a.corpus.display());
    }
    let pool = dataset::thread_pool(a.common.jobs.or(config.jobs))?;
    let matrix = dataset::category_matrix(&corpus, &captioner, &pool)?;
    let rules = mine_statistics_rules(
        &matrix,
        captioner.posecodes(),
        captioner.eligibility(),
        &params,
    )?;
    let suspects: Vec<_> = rules
        .iter()
        .filter(|r| is_suspect_rule(r, captioner.posecodes()))
        .collect();

    write_text(a.out.as_deref(), &formats::write_rules(&rules, &params))?;
    let review = formats::write_review(&suspects, &params);
    match (a.review.as_deref(), a.out.as_deref()) {
        (Some(p), _) => write_text(Some(p), &review)?,
        (None, Some(out)) => write_text(Some(&out.with_extension("review.tsv")), &review)?,
        (None, None) => eprint!("{review}"),
    }
    eprintln!(
        "{} poses, {} rules, {} flagged for review",
        corpus.len(),
        rules.len(),
        suspects.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn stats(a: StatsArgs) -> anyhow::Result<ExitCode> {
    let config = load_config(a.common.config.as_deref())?;
    let captioner = build_captioner(&config)?;
    let corpus = read_corpus(&a.corpus, &captioner)?;
    if corpus.is_empty() {
        bail!("{}: corpus is empty", a.corpus.display());
    }
    let pool = dataset::thread_pool(a.common.jobs.or(config.jobs))?;
    let matrix = dataset::category_matrix(&corpus, &captioner, &pool)?;
    let freqs = compute_category_frequencies(&matrix, captioner.posecodes())?;
    write_text(a.out.as_deref(), &formats::write_frequencies(&freqs))?;
    if let Some(p) = a.eligibility_out.as_deref() {
        let ambiguous = catalog::default_ambiguous(captioner.posecodes())
            .into_iter()
            .collect();
        let table = classify_eligibility(&freqs, TRIVIAL_AT, UNSKIPPABLE_BELOW, &ambiguous);
        write_text(Some(p), &formats::write_eligibility(&table))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(a: SampleArgs) -> anyhow::Result<ExitCode> {
    let config = load_config(a.common.config.as_deref())?;
    let registry = config.captioner_data()?.base_registry;
    let candidates: Vec<PoseRecord> = match (&a.corpus, &a.sequences) {
        (Some(p), _) => formats::read_corpus(p, &registry)?,
        (None, Some(p)) => {
            let text = fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            let seqs = formats::read_sequences_jsonl(
                io::BufReader::new(text),
                &registry,
                &p.display().to_string(),
            )?;
            seqs.iter()
                .flat_map(|s| {
                    filter_frames(&s.frames, a.head_tail, a.stride)
                        .into_iter()
                        .map(|mut r| {
                            r.aux_labels = s.labels.clone();
                            r
                        })
                })
                .collect()
        }
        (None, None) => bail!("either --corpus or --sequences is required"),
    };
    let poses: Vec<&PoseKeypoints> = candidates.iter().map(|r| &r.keypoints).collect();
    let pool = dataset::thread_pool(a.common.jobs.or(config.jobs))?;
    let order = dataset::farthest_point_sample_parallel(&poses, a.n, a.seed, &pool)?;

    let mut ids = String::new();
    for &i in &order {
        ids.push_str(&candidates[i].pose_id);
        ids.push('\n');
    }
    write_text(a.out.as_deref(), &ids)?;
    if let Some(p) = a.poses_out.as_deref() {
        let selected: Vec<PoseRecord> = order.iter().map(|&i| candidates[i].clone()).collect();
        let mut out = open_out(Some(p))?;
        formats::write_poses_jsonl(&selected, &mut out)?;
        out.flush()?;
    }
    eprintln!(
        "selected {} of {} candidates",
        order.len(),
        candidates.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn mirror(a: MirrorArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&a.input)
        .with_context(|| format!("cannot read {}", a.input.display()))?;
    write_text(a.out.as_deref(), &formats::mirror_caption_lines(&text))?;
    Ok(ExitCode::SUCCESS)
}

fn extract(a: ExtractArgs) -> anyhow::Result<ExitCode> {
    if !(a.noise_scale.is_finite() && a.noise_scale >= 0.0) {
        bail!("--noise-scale must be finite and non-negative");
    }
    let config = load_config(a.common.config.as_deref())?;
    let captioner = build_captioner(&config)?;
    let corpus = read_corpus(&a.corpus, &captioner)?;
    let set = captioner.posecodes();
    let mut out = open_out(a.out.as_deref())?;
    for r in &corpus {
        let pose = captioner.extend(&r.keypoints)?;
        let mut rng = stream(caption_seed(a.seed, &r.pose_id, 0));
        let extracted = set
            .extract(&pose, a.noise_scale, &mut rng)
            .with_context(|| format!("pose `{}`", r.pose_id))?;
        let line = ExtractLine {
            pose_id: r.pose_id.clone(),
            posecodes: extracted
                .iter()
                .map(|e| ExtractedItem {
                    id: set.def(e.def).id.clone(),
                    value: e.raw.value,
                    unit: e.raw.unit.name().into(),
                    category: set.category_name(e.def, e.category).into(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn export_defaults(a: ExportArgs) -> anyhow::Result<ExitCode> {
    use file_names::*;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let set = catalog::default_posecode_set()?;
    let data = posecode_core::pipeline::CaptionerData::defaults();
    let files: [(&str, String); 9] = [
        (REGISTRY, formats::write_registry(&data.base_registry)),
        (POSECODES, formats::write_posecodes(&data.posecodes)),
        (BINNING, formats::write_binning(&data.binning)),
        (
            SUPER_POSECODES,
            formats::write_super_posecodes(&data.super_posecodes),
        ),
        (ROLES, formats::write_roles(&data.roles)),
        (
            ELIGIBILITY,
            formats::write_eligibility(&catalog::default_eligibility(&set)),
        ),
        (
            RULES,
            formats::write_rules(&data.rules, &PipelineConfig::default().mining_params()),
        ),
        (TEMPLATES, data.templates.to_text()),
        (EXCLUSIONS, formats::write_exclusions(&[])),
    ];
    for (name, text) in &files {
        let p = a.out.join(name);
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    let config = PipelineConfig {
        data: DataFiles {
            registry: Some(REGISTRY.into()),
            posecodes: Some(POSECODES.into()),
            binning: Some(BINNING.into()),
            super_posecodes: Some(SUPER_POSECODES.into()),
            roles: Some(ROLES.into()),
            eligibility: Some(ELIGIBILITY.into()),
            rules: Some(RULES.into()),
            templates: Some(TEMPLATES.into()),
            exclusions: Some(EXCLUSIONS.into()),
        },
        ..PipelineConfig::default()
    };
    let p = a.out.join(CONFIG);
    fs::write(&p, config.to_toml()).with_context(|| format!("cannot write {}", p.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn synthesize(a: SynthesizeArgs) -> anyhow::Result<ExitCode> {
    let corpus = synthetic::varied_corpus(a.n, a.seed);
    let mut out = open_out(Some(&a.out))?;
    if a.out.extension().is_some_and(|e| e == "pskp") {
        formats::write_poses_binary(&corpus, &skeleton::smplh_registry(), &mut out)?;
    } else {
        formats::write_poses_jsonl(&corpus, &mut out)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
