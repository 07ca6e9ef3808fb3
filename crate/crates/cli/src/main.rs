//! `twofaced` command-line front end.
//!
//! Every command reads and writes bit streams in one of three formats
//! (`ascii01`, `packed`, `hex`). Stochastic commands need an explicit
//! randomness choice: `--seed N`, `--os-entropy` or `--entropy-file PATH`.
//! Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use twofaced::stats::{battery, report_csv, report_text};
use twofaced::{
    expand, inverse_transform, transform_variant, whiten, whiten_with, xor_streams, BitSequence,
    BitSource, BitStream, CounterSource, Error, ExpanderConfig, Generator, KernelSpec, MaskSpec,
    OsSource, ReplaySource, StreamFormat, TwiceTwoFacedConfig, Variant,
};

#[derive(Parser)]
#[command(
    name = "twofaced",
    version,
    about = "Two-faced processes: generate, convert, combine, whiten, analyze, expand"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit bits from the order-k kernel T(k, pi), or its mirror with --bar.
    Gen {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        length: usize,
        /// Fixed initial word of k bits instead of a uniform one.
        #[arg(long)]
        init: Option<String>,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Apply the order-k two-faced conversion to stdin.
    Transform {
        #[arg(long)]
        order: usize,
        /// Initial word of k bits (ascii01).
        #[arg(long)]
        init: String,
        #[arg(long)]
        bar: bool,
        /// Recover the input from a converted stream.
        #[arg(long)]
        inverse: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// XOR two stream files, or generate a twice-two-faced stream from a config file.
    Combine {
        #[arg(
            num_args = 2,
            required_unless_present = "config",
            conflicts_with = "config"
        )]
        inputs: Vec<PathBuf>,
        #[arg(long, requires = "length")]
        config: Option<PathBuf>,
        #[arg(long)]
        length: Option<usize>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// XOR stdin with a freshly generated two-faced or twice-two-faced mask.
    Whiten {
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        order: Option<usize>,
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        pi: Option<f64>,
        #[arg(long, conflicts_with = "config")]
        bar: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Block-frequency and chi-square report for block lengths in a range.
    Analyze {
        #[arg(long, default_value_t = 1)]
        min_block: usize,
        #[arg(long, default_value_t = 8)]
        max_block: usize,
        /// Significance level for the uniformity verdict.
        #[arg(long, default_value_t = 1e-4)]
        alpha: f64,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Stretch a short seed into a long order-k two-faced stream.
    Expand {
        #[arg(
            long,
            required_unless_present = "seed_file",
            conflicts_with = "seed_file"
        )]
        seed_hex: Option<String>,
        /// Seed file, read in the input format.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    order: usize,
    #[arg(long)]
    pi: f64,
    /// Use the mirror kernel.
    #[arg(long)]
    bar: bool,
}

impl KernelArgs {
    fn spec(&self) -> Result<KernelSpec, Failure> {
        Ok(KernelSpec::new(variant(self.bar), self.order, self.pi)?)
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct SourceArgs {
    /// Seed of the deterministic counter-mode source.
    #[arg(long)]
    seed: Option<u64>,
    /// Draw randomness from the operating system.
    #[arg(long)]
    os_entropy: bool,
    /// Replay randomness from a packed bit file.
    #[arg(long)]
    entropy_file: Option<PathBuf>,
}

impl SourceArgs {
    fn open(&self) -> Result<Box<dyn BitSource>, Failure> {
        match (self.seed, self.os_entropy, &self.entropy_file) {
            (Some(seed), _, _) => Ok(Box::new(CounterSource::new(seed))),
            (_, true, _) => Ok(Box::new(OsSource::new())),
            (_, _, Some(path)) => Ok(Box::new(ReplaySource::from_file(path)?)),
            _ => Err(Failure::Usage(
                "this command needs --seed, --os-entropy or --entropy-file".into(),
            )),
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// Output stream format.
    #[arg(long, default_value = "ascii01", value_parser = StreamFormat::from_str)]
    format: StreamFormat,
    /// Input stream format (defaults to --format).
    #[arg(long, value_parser = StreamFormat::from_str)]
    input_format: Option<StreamFormat>,
    /// Keep only the first N input bits (drops packing padding).
    #[arg(long)]
    input_length: Option<usize>,
}

impl IoArgs {
    fn decode(&self, data: &[u8]) -> Result<BitSequence, Failure> {
        Ok(BitSequence::decode(
            data,
            self.input_format.unwrap_or(self.format),
            self.input_length,
        )?)
    }

    fn read_stdin(&self) -> Result<BitSequence, Failure> {
        let mut data = Vec::new();
        io::stdin()
            .read_to_end(&mut data)
            .map_err(|e| Failure::Runtime(format!("reading stdin: {e}")))?;
        self.decode(&data)
    }

    fn read_file(&self, path: &Path) -> Result<BitSequence, Failure> {
        self.decode(&read(path)?)
    }

    fn write(&self, bits: &BitSequence) -> Result<(), Failure> {
        let mut data = bits.encode(self.format);
        if self.format != StreamFormat::Packed {
            data.push(b'\n');
        }
        write_stdout(&data)
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::Capacity { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn variant(bar: bool) -> Variant {
    if bar {
        Variant::Bar
    } else {
        Variant::Plain
    }
}

/// A bit word given on the command line.
fn parse_word(text: &str) -> Result<BitSequence, Failure> {
    text.parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Runtime(format!("reading {}: {e}", path.display())))
}

fn read_config(path: &Path) -> Result<TwiceTwoFacedConfig, Failure> {
    let text = String::from_utf8(read(path)?)
        .map_err(|_| Failure::Runtime(format!("{} is not utf-8 text", path.display())))?;
    text.parse()
        .map_err(|e: Error| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write_stdout(data: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(data).and_then(|_| out.flush()) {
        // A closed downstream pipe is not an error for a stream producer.
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| Failure::Runtime(format!("writing stdout: {e}"))),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            kernel,
            length,
            init,
            source,
            io,
        } => {
            let spec = kernel.spec()?;
            let source = source.open()?;
            let bits = match init {
                Some(word) => {
                    Generator::with_initial(spec, &parse_word(&word)?, source)?.take_bits(length)?
                }
                None => Generator::new(spec, source)?.take_bits(length)?,
            };
            io.write(&bits)
        }
        Command::Transform {
            order,
            init,
            bar,
            inverse,
            io,
        } => {
            let initial = parse_word(&init)?;
            let input = io.read_stdin()?;
            let out = if inverse {
                inverse_transform(variant(bar), order, &input, &initial)?
            } else {
                transform_variant(variant(bar), order, &input, &initial)?
            };
            io.write(&out)
        }
        Command::Combine {
            inputs,
            config,
            length,
            io,
        } => {
            let out = match (config, length) {
                (Some(path), Some(n)) => read_config(&path)?.generate(n)?,
                _ => xor_streams(&io.read_file(&inputs[0])?, &io.read_file(&inputs[1])?)?,
            };
            io.write(&out)
        }
        Command::Whiten {
            order,
            pi,
            bar,
            config,
            source,
            io,
        } => {
            let out = match config {
                Some(path) => {
                    let mut mask = read_config(&path)?.build()?;
                    whiten_with(&io.read_stdin()?, &mut mask)?
                }
                None => {
                    let kernel = KernelArgs {
                        order: order.unwrap_or_default(),
                        pi: pi.unwrap_or_default(),
                        bar,
                    };
                    let spec = kernel.spec()?;
                    let source = source.open()?;
                    whiten(&io.read_stdin()?, &MaskSpec::Kernel(spec), source)?
                }
            };
            io.write(&out)
        }
        Command::Analyze {
            min_block,
            max_block,
            alpha,
            csv,
            io,
        } => {
            if min_block == 0 || min_block > max_block {
                return Err(Failure::Usage(format!(
                    "empty block range {min_block}..={max_block}"
                )));
            }
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Failure::Usage(format!(
                    "alpha must lie in (0, 1), got {alpha}"
                )));
            }
            let input = io.read_stdin()?;
            let stats = battery(&input, min_block..=max_block)?;
            for s in stats.iter().filter(|s| s.sparse()) {
                eprintln!(
                    "warning: m={} has expected count below 5; chi-square is unreliable",
                    s.block_len
                );
            }
            let report = if csv {
                report_csv(&stats)
            } else {
                report_text(&stats, alpha)
            };
            write_stdout(report.as_bytes())
        }
        Command::Expand {
            seed_hex,
            seed_file,
            order,
            length,
            io,
        } => {
            let seed = match (seed_hex, seed_file) {
                (Some(hex), _) => {
                    BitSequence::from_hex(&hex, None).map_err(|e| Failure::Usage(e.to_string()))?
                }
                (_, Some(path)) => io.read_file(&path)?,
                _ => unreachable!("clap requires one seed option"),
            };
            io.write(&expand(&seed, &ExpanderConfig::new(order, length)?)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("twofaced: usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("twofaced: {msg}");
            ExitCode::from(1)
        }
    }
}
