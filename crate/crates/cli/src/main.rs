use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mandarin_cs::corpus::{vowel_histogram, Corpus};
use mandarin_cs::inventory::{
    solve_consonant_table, verify_consonant_table, verify_vowel_allocation, ConsonantRules, ConsonantTable, Handshape,
    VowelAllocation, VowelRules, LPC_ANCHORS,
};
use mandarin_cs::lip::{
    by_speaker, evaluate_allocation, read_lip_csv, write_lip_csv, EvalConfig, LipSample, VowelClouds,
};
use mandarin_cs::optimize::{exhaustive_swap_search, hill_climb, SearchConfig, SearchResult};
use mandarin_cs::pinyin::Syllabary;
use mandarin_cs::synth::{generate, SynthConfig, SynthOptions};
use mandarin_cs::transcode::{chart, transcode_text, transcode_text_lenient, CueTables};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 20_200_601;

#[derive(Parser)]
#[command(name = "mcs", version, about = "Mandarin Chinese Cued Speech toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct TableArgs {
    /// Vowel allocation file (`vowel=P1` lines); `preliminary`, `final` or a path
    #[arg(long, default_value = "final")]
    alloc: String,
    /// Consonant table file (`unit=handshape` lines); defaults to the shipped table
    #[arg(long)]
    consonants: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SeedArgs {
    /// Random seed [default: 20200601]
    #[arg(long, conflicts_with = "random_seed")]
    seed: Option<u64>,
    /// Draw a fresh seed and print it to stderr
    #[arg(long)]
    random_seed: bool,
}

impl SeedArgs {
    fn resolve(&self) -> u64 {
        if self.random_seed {
            let seed = rand::random::<u64>();
            eprintln!("seed {seed}");
            seed
        } else {
            self.seed.unwrap_or(DEFAULT_SEED)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transcode pinyin into hand cues, one tab-separated record per syllable
    Transcode {
        /// Pinyin text; read from --file or stdin when absent
        text: Option<String>,
        #[arg(long, conflicts_with = "text")]
        file: Option<PathBuf>,
        /// Report bad chunks on stderr and keep going
        #[arg(long)]
        lenient: bool,
        /// Print the cue chart instead of transcoding
        #[arg(long)]
        chart: bool,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Print the base-vowel histogram of a corpus
    CorpusStats {
        /// Whitespace-separated word list; defaults to the recording corpus
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Check a vowel allocation and consonant table against their constraints
    Verify {
        #[command(flatten)]
        tables: TableArgs,
        /// Print a freshly solved consonant table and exit
        #[arg(long)]
        solve: bool,
    },
    /// Score an allocation on lip data, per speaker
    Eval {
        /// Lip CSV with columns speaker,word,vowel,frame,A,B
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "final")]
        alloc: String,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, default_value_t = 100)]
        reps: usize,
    },
    /// Improve an allocation by steepest-ascent vowel swaps
    Optimize {
        #[arg(long)]
        data: PathBuf,
        /// Only use samples from this speaker
        #[arg(long)]
        speaker: Option<String>,
        #[arg(long, default_value = "preliminary")]
        start: String,
        #[command(flatten)]
        seed: SeedArgs,
        /// Also run the exhaustive swap search and compare
        #[arg(long)]
        oracle: bool,
        /// Depth of the exhaustive search
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Generate synthetic lip data from per-vowel Gaussian parameters
    GenSynthetic {
        /// `separated`, `confusion`, or a config file path
        #[arg(long, default_value = "separated")]
        config: String,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        frames: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "synthetic")]
        speaker: String,
        /// Output CSV; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_allocation(choice: &str) -> Result<VowelAllocation> {
    Ok(match choice {
        "final" => VowelAllocation::final_allocation(),
        "preliminary" => VowelAllocation::preliminary(),
        path => VowelAllocation::from_text(&read_text(Path::new(path))?).with_context(|| format!("in {path}"))?,
    })
}

fn load_tables(args: &TableArgs) -> Result<CueTables> {
    let mut tables = CueTables {
        allocation: load_allocation(&args.alloc)?,
        ..CueTables::default()
    };
    if let Some(path) = &args.consonants {
        tables.consonants =
            ConsonantTable::from_text(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
    }
    Ok(tables)
}

fn load_corpus(path: Option<&Path>) -> Result<Corpus> {
    match path {
        Some(p) => Ok(Corpus::from_text(&read_text(p)?)),
        None => Ok(Corpus::standard()),
    }
}

fn load_samples(path: &Path) -> Result<Vec<LipSample>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_lip_csv(file).with_context(|| format!("in {}", path.display()))
}

fn transcode(
    out: &mut impl Write,
    text: Option<String>,
    file: Option<PathBuf>,
    lenient: bool,
    show_chart: bool,
    args: &TableArgs,
) -> Result<ExitCode> {
    let tables = load_tables(args)?;
    if show_chart {
        write!(out, "{}", chart(&tables))?;
        return Ok(ExitCode::SUCCESS);
    }
    let text = match (text, file) {
        (Some(t), _) => t,
        (None, Some(p)) => read_text(&p)?,
        (None, None) => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    if lenient {
        let (records, errors) = transcode_text_lenient(&text, &tables);
        for r in &records {
            writeln!(out, "{}", r.to_line())?;
        }
        out.flush()?;
        for e in &errors {
            eprintln!("error: {e}");
        }
        return Ok(if errors.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    for r in transcode_text(&text, &tables)? {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(out: &mut impl Write, args: &TableArgs, solve: bool) -> Result<ExitCode> {
    let rules = ConsonantRules::standard();
    if solve {
        let isolated = Handshape::new(5).expect("handshape 5 exists");
        let Some(table) = solve_consonant_table(&rules, &LPC_ANCHORS, isolated) else {
            bail!("consonant rules are unsatisfiable");
        };
        write!(out, "{}", table.to_text())?;
        return Ok(ExitCode::SUCCESS);
    }
    let tables = load_tables(args)?;
    let vowel = verify_vowel_allocation(&tables.allocation, VowelRules::standard());
    let consonant = verify_consonant_table(&tables.consonants, &rules);
    for v in &vowel {
        writeln!(out, "vowel\t{v}")?;
    }
    for v in &consonant {
        writeln!(out, "consonant\t{v}")?;
    }
    if vowel.is_empty() && consonant.is_empty() {
        writeln!(out, "ok")?;
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn eval(out: &mut impl Write, data: &Path, alloc: &str, seed: u64, reps: usize) -> Result<()> {
    let alloc = load_allocation(alloc)?;
    let cfg = EvalConfig::with_seed(seed).with_repetitions(reps);
    for (speaker, samples) in by_speaker(&load_samples(data)?) {
        let report = evaluate_allocation(&VowelClouds::from_samples(&samples), &alloc, &cfg)
            .with_context(|| format!("speaker {speaker}"))?;
        writeln!(out, "# speaker {speaker}")?;
        write!(out, "{report}")?;
    }
    Ok(())
}

fn print_search(out: &mut impl Write, label: &str, r: &SearchResult) -> io::Result<()> {
    writeln!(out, "# {label}")?;
    for step in &r.trace {
        writeln!(out, "{step}")?;
    }
    writeln!(out, "allocation\t{}", r.best)?;
    write!(out, "{}", r.score)
}

fn optimize(
    out: &mut impl Write,
    data: &Path,
    speaker: Option<&str>,
    start: &str,
    seed: u64,
    oracle: bool,
    depth: usize,
) -> Result<ExitCode> {
    let mut samples = load_samples(data)?;
    if let Some(name) = speaker {
        samples.retain(|s| s.speaker == name);
        if samples.is_empty() {
            bail!("no samples for speaker `{name}`");
        }
    }
    let clouds = VowelClouds::from_samples(&samples);
    let start = load_allocation(start)?;
    let rules = VowelRules::standard();
    let cfg = SearchConfig::with_seed(seed);
    let hill = hill_climb(&clouds, &start, rules, &cfg)?;
    print_search(out, "hill-climb", &hill)?;
    if oracle {
        let best = exhaustive_swap_search(&clouds, &start, rules, depth, &cfg)?;
        print_search(out, &format!("exhaustive depth {depth}"), &best)?;
        let agree = best.best == hill.best;
        writeln!(out, "agree\t{agree}")?;
        if !agree {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn gen_synthetic(
    out: &mut impl Write,
    config: &str,
    corpus: Option<&Path>,
    opts: SynthOptions,
    dest: Option<&Path>,
) -> Result<()> {
    let cfg = match config {
        "separated" => SynthConfig::separated(),
        "confusion" => SynthConfig::confusion(),
        path => SynthConfig::from_text(&read_text(Path::new(path))?).with_context(|| format!("in {path}"))?,
    };
    let samples = generate(&cfg, &load_corpus(corpus)?, &opts)?;
    match dest {
        Some(p) => write_lip_csv(
            BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            &samples,
        )?,
        None => write_lip_csv(&mut *out, &samples)?,
    }
    Ok(())
}

fn run(out: &mut impl Write, cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Transcode {
            text,
            file,
            lenient,
            chart,
            tables,
        } => transcode(out, text, file, lenient, chart, &tables),
        Command::CorpusStats { corpus } => {
            write!(
                out,
                "{}",
                vowel_histogram(&load_corpus(corpus.as_deref())?, Syllabary::standard())?
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { tables, solve } => verify(out, &tables, solve),
        Command::Eval {
            data,
            alloc,
            seed,
            reps,
        } => {
            eval(out, &data, &alloc, seed.resolve(), reps)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize {
            data,
            speaker,
            start,
            seed,
            oracle,
            depth,
        } => optimize(out, &data, speaker.as_deref(), &start, seed.resolve(), oracle, depth),
        Command::GenSynthetic {
            config,
            corpus,
            frames,
            seed,
            speaker,
            out: dest,
        } => {
            let opts = SynthOptions {
                speaker,
                frames_per_word: frames,
                seed,
            };
            gen_synthetic(out, &config, corpus.as_deref(), opts, dest.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = BufWriter::new(io::stdout().lock());
    match run(&mut out, cli).and_then(|code| out.flush().map(|()| code).map_err(Into::into)) {
        Ok(code) => code,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
