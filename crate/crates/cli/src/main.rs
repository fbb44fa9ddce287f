//! `sortnet` — generate complete sets of filters, search optimal sorting
//! network sizes, and test subsumption between comparator networks.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sortnet_core::generate::{self, FilterSet, GenerationStats};
use sortnet_core::notation;
use sortnet_core::persist::{self, FileFormat, LevelStatsRecord};
use sortnet_core::subsumption::{self, NetworkSignature, Variant};
use sortnet_core::ComparatorNetwork;

#[derive(Parser)]
#[command(
    name = "sortnet",
    about = "Optimal-size sorting network search by generate-and-prune",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate complete sets of filters N^n_k for k = 1..=K.
    Generate(GenerateArgs),
    /// Find the minimum comparator count s_n and print a witness network.
    Search(SearchArgs),
    /// Test whether network A subsumes network B.
    Check(CheckArgs),
    /// Verify whether a network is a sorting network and show its clusters.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Permutation,
    Matching,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Permutation => Variant::Permutation,
            VariantArg::Matching => Variant::Matching,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Binary,
}

impl From<FormatArg> for FileFormat {
    fn from(f: FormatArg) -> FileFormat {
        match f {
            FormatArg::Text => FileFormat::Text,
            FormatArg::Binary => FileFormat::Binary,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Channel count (2..=11).
    #[arg(short = 'n', long = "channels", value_name = "N")]
    channels: usize,
    /// Highest level to generate.
    #[arg(short = 'k', long = "levels", value_name = "K")]
    k_max: usize,
    #[arg(long, value_enum, default_value = "matching")]
    variant: VariantArg,
    /// Worker threads for the subsumption scans.
    #[arg(long, default_value_t = 8)]
    workers: usize,
    /// Directory receiving one level file per completed level.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Resume from a previously written level file.
    #[arg(long, value_name = "PATH")]
    resume: Option<PathBuf>,
    /// Append one JSON stats record per level to this file.
    #[arg(long, value_name = "PATH")]
    stats: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args)]
struct SearchArgs {
    /// Channel count (2..=11).
    #[arg(short = 'n', long = "channels", value_name = "N")]
    channels: usize,
    #[arg(long, value_enum, default_value = "matching")]
    variant: VariantArg,
    #[arg(long, default_value_t = 8)]
    workers: usize,
    /// Safety bound on the level count; defaults to n(n-1)/2.
    #[arg(short = 'k', long = "ceiling", value_name = "K")]
    ceiling: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// Network A in `low:high,low:high` notation.
    net_a: String,
    /// Network B in the same notation.
    net_b: String,
    /// Channel count; inferred from the comparators when omitted.
    #[arg(short = 'n', long = "channels", value_name = "N")]
    channels: Option<usize>,
    #[arg(long, value_enum, default_value = "matching")]
    variant: VariantArg,
    /// Run both variants and report their candidate counters.
    #[arg(long)]
    compare: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Network in `low:high,low:high` notation.
    net: String,
    /// Channel count; inferred from the comparators when omitted.
    #[arg(short = 'n', long = "channels", value_name = "N")]
    channels: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Search(args) => cmd_search(args),
        Command::Check(args) => cmd_check(args),
        Command::Verify(args) => cmd_verify(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn validate_run(channels: usize, workers: usize) -> Result<()> {
    if !(2..=11).contains(&channels) {
        bail!("channel count {channels} not in 2..=11");
    }
    if workers == 0 {
        bail!("worker count must be at least 1");
    }
    Ok(())
}

fn level_file_name(channels: usize, level: usize, format: FileFormat) -> String {
    let ext = match format {
        FileFormat::Text => "txt",
        FileFormat::Binary => "snf",
    };
    format!("n{channels}-k{level}.{ext}")
}

fn write_level(dir: &Path, set: &FilterSet, format: FileFormat) -> Result<PathBuf> {
    let path = dir.join(level_file_name(set.channels(), set.level(), format));
    let file = File::create(&path)
        .with_context(|| format!("creating level file {}", path.display()))?;
    let mut w = BufWriter::new(file);
    persist::write_filter_set(&mut w, set, format)?;
    w.flush()?;
    Ok(path)
}

fn print_level_line(set: &FilterSet, stats: &GenerationStats) {
    println!(
        "level {:2}  size {:7}  checks {:>12}  subsumptions {:>9}  permutations {:>13}  {:.3}s",
        set.level(),
        set.len(),
        stats.total_checks,
        stats.subsumptions_found,
        stats.permutations_checked,
        stats.elapsed.as_secs_f64()
    );
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    validate_run(args.channels, args.workers)?;
    let variant: Variant = args.variant.into();
    let format: FileFormat = args.format.into();

    let start = match &args.resume {
        Some(path) => {
            let mut file = File::open(path)
                .with_context(|| format!("opening resume file {}", path.display()))?;
            let set = persist::read_filter_set(&mut file)
                .with_context(|| format!("reading resume file {}", path.display()))?;
            if set.channels() != args.channels {
                bail!(
                    "resume file has {} channels, run requested {}",
                    set.channels(),
                    args.channels
                );
            }
            if set.level() >= args.k_max {
                bail!(
                    "resume file is already at level {}, nothing to do for k = {}",
                    set.level(),
                    args.k_max
                );
            }
            println!(
                "resuming from level {} ({} networks)",
                set.level(),
                set.len()
            );
            set
        }
        None => FilterSet::initial(args.channels),
    };

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let mut stats_file = match &args.stats {
        Some(path) => Some(BufWriter::new(
            fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening stats file {}", path.display()))?,
        )),
        None => None,
    };

    let mut io_error: Option<anyhow::Error> = None;
    generate::generate_from(
        start,
        args.k_max,
        variant,
        args.workers,
        &mut |set, stats| {
            print_level_line(set, stats);
            if io_error.is_some() {
                return;
            }
            if let Some(dir) = &args.out {
                if let Err(err) = write_level(dir, set, format) {
                    io_error = Some(err);
                    return;
                }
            }
            if let Some(w) = &mut stats_file {
                let record = LevelStatsRecord::new(set, stats);
                if let Err(err) = persist::write_stats_record(w, &record) {
                    io_error = Some(err.into());
                }
            }
        },
    );
    if let Some(w) = &mut stats_file {
        w.flush()?;
    }
    match io_error {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    validate_run(args.channels, args.workers)?;
    let ceiling = args
        .ceiling
        .unwrap_or_else(|| generate::default_ceiling(args.channels));
    let (size, witness) =
        generate::search_optimal_size(args.channels, args.variant.into(), args.workers, ceiling)?;
    // search_optimal_size re-verifies the witness on all 2^n inputs
    println!("s={size}");
    println!("witness: {witness}");
    println!(
        "verified: sorts all {} binary inputs on {} channels",
        1u32 << args.channels,
        args.channels
    );
    Ok(())
}

fn parse_pair(
    net_a: &str,
    net_b: &str,
    channels: Option<usize>,
) -> Result<(ComparatorNetwork, ComparatorNetwork)> {
    let channels = match channels {
        Some(n) => n,
        None => notation::infer_channels(net_a)?
            .max(notation::infer_channels(net_b)?),
    };
    let a = notation::parse_network(net_a, channels).context("parsing network A")?;
    let b = notation::parse_network(net_b, channels).context("parsing network B")?;
    Ok((a, b))
}

fn describe_outcome(outcome: &subsumption::SubsumptionOutcome) -> String {
    if outcome.subsumes {
        format!(
            "yes, witness {}",
            outcome.witness.as_ref().expect("witness present")
        )
    } else {
        let reason = match outcome.rejected_by {
            Some(subsumption::Rejection::St1) => "rejected by ST1 (output-set size)".into(),
            Some(subsumption::Rejection::St2) => "rejected by ST2 (cluster sizes)".into(),
            Some(subsumption::Rejection::St3) => "rejected by ST3 (zeros/ones counts)".into(),
            Some(subsumption::Rejection::NoPerfectMatching) => {
                "subsumption graph has no perfect matching".into()
            }
            Some(subsumption::Rejection::Exhausted) => format!(
                "no witness among {} verified candidates",
                outcome.candidates_checked
            ),
            None => "unknown".into(),
        };
        format!("no ({reason})")
    }
}

fn cmd_check(args: CheckArgs) -> Result<()> {
    let (a, b) = parse_pair(&args.net_a, &args.net_b, args.channels)?;
    let out_a = a.outputs();
    let out_b = b.outputs();
    println!("A: {a} on {} channels, |outputs| = {}", a.channels(), out_a.len());
    println!("B: {b} on {} channels, |outputs| = {}", b.channels(), out_b.len());
    let sig_a = NetworkSignature::of(&out_a);
    let sig_b = NetworkSignature::of(&out_b);
    match subsumption::precheck(&sig_a, &sig_b) {
        Ok(()) => println!("precheck: pass"),
        Err(stage) => println!("precheck: fail ({stage:?})"),
    }
    if args.compare {
        let v1 = subsumption::subsumes_by_permutations(&out_a, &out_b);
        let v2 = subsumption::subsumes_by_matchings(&out_a, &out_b);
        println!("permutation variant: A subsumes B: {}", describe_outcome(&v1));
        println!(
            "  examined {} permutations, fully verified {}",
            v1.candidates_examined, v1.candidates_checked
        );
        println!("matching variant:    A subsumes B: {}", describe_outcome(&v2));
        println!(
            "  examined {} perfect matchings, fully verified {}",
            v2.candidates_examined, v2.candidates_checked
        );
        if v1.subsumes != v2.subsumes {
            bail!("variants disagree; this is a bug");
        }
    } else {
        let outcome = Variant::from(args.variant).subsumes(&out_a, &out_b);
        println!("A subsumes B: {}", describe_outcome(&outcome));
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let channels = match args.channels {
        Some(n) => n,
        None => notation::infer_channels(&args.net)?,
    };
    let network = notation::parse_network(&args.net, channels)?;
    let outputs = network.outputs();
    println!(
        "network: {} ({} comparators on {} channels)",
        network,
        network.size(),
        channels
    );
    println!("output size: {}", outputs.len());
    let sizes: Vec<String> = outputs
        .cluster_sizes()
        .iter()
        .map(|s| s.to_string())
        .collect();
    println!("cluster sizes: {}", sizes.join(" "));
    if outputs.is_sorting() {
        println!("sorting network: yes");
    } else {
        println!("sorting network: no");
    }
    Ok(())
}
