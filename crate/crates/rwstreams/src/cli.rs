//! Command-line front end: argument parsing, flag validation and one
//! function per subcommand. Every command runs on its own [`Machine`].

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rwstreams_core::bwt::{bwt_forward, bwt_inverse, entropy_only_compress, entropy_only_decompress, BwtString};
use rwstreams_core::debruijn::{adversarial_string, count_cycles};
use rwstreams_core::entropy::EntropyReport;
use rwstreams_core::grammar::build_periodic_grammar;
use rwstreams_core::period::min_period_streams;
use rwstreams_core::reduction::{sort_via_bwt, SortInstance};
use rwstreams_core::universal::{self, block_memory_bits, max_order, BlockSchedule, MAX_BLOCK};
use rwstreams_core::{Error, Machine, MachineBudget, Symbol, UsageReport};

use crate::format::{self, Snapshot};
use crate::grammar_text::parse_grammar;
use crate::report::RunReport;

/// Block size when the input length is not known up front.
pub const STREAMING_BLOCK: u32 = 4096;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 0 success, 1 I/O, 2 usage, 3 budget, 4 pass limit, 5 format, 6 decode.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::Budget(_) => 3,
                Error::PassLimit { .. } => 4,
                Error::Format(_) | Error::Cycle(_) | Error::Length(_) => 5,
                Error::Decode(_) | Error::BlockDecode { .. } | Error::InvalidPermutation(_) => 6,
                Error::InvalidInput(_) | Error::Size(_) | Error::Overflow(_) => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rws", version, about = "Compression in the read/write-streams model")]
pub struct Cli {
    #[command(flatten)]
    pub machine: MachineArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct MachineArgs {
    /// Memory budget in bits [default: 64 * ceil(log2 n)^2]
    #[arg(long, global = true)]
    pub memory_bits: Option<u64>,
    /// Fail once the total number of passes exceeds this
    #[arg(long, global = true)]
    pub pass_limit: Option<u64>,
    /// Number of streams [default: 2]
    #[arg(long, global = true)]
    pub streams: Option<usize>,
    /// Write the usage report here instead of standard error
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Recorded in the report; every command is deterministic
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    /// Input file, `-` for standard input
    pub input: PathBuf,
    /// Output file [default: standard output]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// One-pass block-wise universal compression
    Compress {
        #[command(flatten)]
        io: Io,
        /// Symbols per block [default: ceil(log2 n)^2]
        #[arg(long)]
        block_size: Option<u32>,
        /// Largest context order tried per block [default: largest that fits the budget]
        #[arg(long)]
        k_max: Option<u32>,
        /// Alphabet size; input bytes must be below it
        #[arg(long, default_value_t = 256)]
        sigma: u32,
    },
    /// Inverse of `compress`
    Decompress {
        #[command(flatten)]
        io: Io,
    },
    /// BWT, move-to-front, run-length and arithmetic coding
    EoCompress {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 256)]
        sigma: u32,
    },
    /// Inverse of `eo-compress`
    EoDecompress {
        #[command(flatten)]
        io: Io,
    },
    /// Burrows-Wheeler transform, written as a stream snapshot (0 = `$`, byte b = b + 1)
    Bwt {
        #[command(flatten)]
        io: Io,
    },
    /// Inverse of `bwt`
    Unbwt {
        #[command(flatten)]
        io: Io,
    },
    /// Empirical entropy for orders 0..=k
    Entropy {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Minimum period
    Period {
        #[command(flatten)]
        io: Io,
    },
    /// Grammar for a periodic input, or with --expand the string a grammar derives
    Grammar {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        expand: bool,
        #[arg(long, default_value_t = 256)]
        sigma: u32,
    },
    /// De Bruijn cycle (digits and lowercase letters up to sigma = 36, raw bytes above)
    Debruijn {
        #[arg(long)]
        sigma: u32,
        #[arg(long)]
        k: u32,
        /// Repeat the cycle to this length, cutting the last copy short
        #[arg(long)]
        repeat_to: Option<usize>,
        /// Print the number of cycles instead
        #[arg(long)]
        count: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sort whitespace-separated integers through the BWT
    Sortnums {
        #[command(flatten)]
        io: Io,
    },
}

/// Everything one run needs, validated before any input is read.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub memory_bits: Option<u64>,
    pub pass_limit: Option<u64>,
    pub streams: usize,
    pub report: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_byte_sigma(sigma: u32) -> CliResult<()> {
    if !(1..=256).contains(&sigma) {
        return Err(usage(format!("--sigma {sigma} outside 1..=256 for byte input")));
    }
    Ok(())
}

impl RunConfig {
    pub fn new(cli: Cli) -> CliResult<Self> {
        let m = cli.machine;
        let streams = m.streams.unwrap_or(2);
        if streams == 0 {
            return Err(usage("--streams must be at least 1"));
        }
        match &cli.command {
            Command::Compress {
                block_size,
                k_max,
                sigma,
                ..
            } => {
                check_byte_sigma(*sigma)?;
                if let Some(c) = block_size {
                    if *c == 0 || *c > MAX_BLOCK {
                        return Err(usage(format!("--block-size {c} outside 1..={MAX_BLOCK}")));
                    }
                    if let Some(k) = k_max {
                        let top = max_order(*sigma, u64::from(*c));
                        if *k > top {
                            return Err(usage(format!("--k-max {k} exceeds {top} for block size {c}")));
                        }
                    }
                }
            }
            Command::EoCompress { sigma, .. } | Command::Grammar { sigma, .. } => check_byte_sigma(*sigma)?,
            Command::Debruijn { sigma, k, .. } if *sigma < 2 || *sigma > 256 || *k == 0 => {
                return Err(usage("debruijn needs --sigma in 2..=256 and --k >= 1"));
            }
            _ => {}
        }
        Ok(RunConfig {
            command: cli.command,
            memory_bits: m.memory_bits,
            pass_limit: m.pass_limit,
            streams,
            report: m.report,
            seed: m.seed,
        })
    }

    /// Budget for an input of `n` symbols.
    pub fn budget(&self, n: u64) -> MachineBudget {
        let memory = self.memory_bits.unwrap_or(MachineBudget::polylog(n).memory_bits);
        let b = MachineBudget::new(memory, self.streams);
        match self.pass_limit {
            Some(p) => b.with_pass_limit(p),
            None => b,
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match &self.command {
            Command::Compress { io, .. }
            | Command::Decompress { io }
            | Command::EoCompress { io, .. }
            | Command::EoDecompress { io }
            | Command::Bwt { io }
            | Command::Unbwt { io }
            | Command::Entropy { io, .. }
            | Command::Period { io }
            | Command::Grammar { io, .. }
            | Command::Sortnums { io } => Some(&io.input),
            Command::Debruijn { .. } => None,
        }
    }

    fn output(&self) -> Option<&PathBuf> {
        match &self.command {
            Command::Debruijn { output, .. } => output.as_ref(),
            Command::Compress { io, .. }
            | Command::Decompress { io }
            | Command::EoCompress { io, .. }
            | Command::EoDecompress { io }
            | Command::Bwt { io }
            | Command::Unbwt { io }
            | Command::Entropy { io, .. }
            | Command::Period { io }
            | Command::Grammar { io, .. }
            | Command::Sortnums { io } => io.output.as_ref(),
        }
    }

    fn streaming_input(&self) -> bool {
        self.input().is_some_and(|p| p.as_os_str() == "-")
    }
}

fn read_input(path: &PathBuf) -> io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().lock().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

/// Reads the input, runs the command and writes the payload and report.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let input = match cfg.input() {
        Some(p) => read_input(p)?,
        None => Vec::new(),
    };
    let (payload, mut report) = execute(cfg, &input)?;
    match cfg.output() {
        Some(p) => std::fs::write(p, &payload)?,
        None => io::stdout().lock().write_all(&payload)?,
    }
    if let Some(seed) = cfg.seed {
        report = report.detail("seed", seed);
    }
    let json = report.to_json();
    match &cfg.report {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => eprintln!("{json}"),
    }
    Ok(())
}

fn symbols(bytes: &[u8], sigma: u32) -> CliResult<Vec<Symbol>> {
    if let Some(pos) = bytes.iter().position(|&b| u32::from(b) >= sigma) {
        return Err(usage(format!("byte {} at offset {pos} is not below --sigma {sigma}", bytes[pos])));
    }
    Ok(bytes.iter().map(|&b| Symbol::from(b)).collect())
}

fn to_bytes(s: &[Symbol]) -> CliResult<Vec<u8>> {
    s.iter()
        .map(|&x| u8::try_from(x).map_err(|_| Error::Decode(format!("symbol {x} does not fit in a byte")).into()))
        .collect()
}

fn ceil_log2(n: u64) -> u32 {
    n.max(1).next_power_of_two().trailing_zeros()
}

/// Largest order up to `max_order(sigma, c)` whose tables fit in `memory` bits.
pub fn default_k_max(c: u32, sigma: u32, memory: u64) -> u32 {
    (0..=max_order(sigma, u64::from(c)))
        .take_while(|&k| block_memory_bits(c, sigma, k) <= memory)
        .last()
        .unwrap_or(0)
}

/// Runs the command on `input`; returns the payload and the report.
pub fn execute(cfg: &RunConfig, input: &[u8]) -> CliResult<(Vec<u8>, RunReport)> {
    let n = input.len() as u64;
    match &cfg.command {
        Command::Compress {
            block_size,
            k_max,
            sigma,
            ..
        } => {
            let s = symbols(input, *sigma)?;
            let budget = cfg.budget(n);
            let schedule = if cfg.streaming_input() {
                BlockSchedule::Growing(block_size.unwrap_or(STREAMING_BLOCK))
            } else {
                let lg = ceil_log2(n);
                BlockSchedule::Fixed(block_size.unwrap_or((lg * lg).clamp(1, MAX_BLOCK)))
            };
            let c = schedule.initial();
            let k_max = k_max.unwrap_or_else(|| default_k_max(c, *sigma, budget.memory_bits));
            let mut m = Machine::new(budget);
            let bits = 32 - sigma.saturating_sub(1).leading_zeros();
            let stream = m.attach_stream(s.iter().map(|&x| u128::from(x)), bits.max(1))?;
            let container = universal::compress(&mut m, stream, *sigma, schedule, k_max)?;
            let out = format::write_container(&container);
            let report = RunReport::new("compress", n, budget, m.report())
                .detail("output_bits", 8 * out.len() as u64)
                .detail("block_size", c)
                .detail("k_max", k_max)
                .detail("blocks", container.blocks.len());
            Ok((out, report))
        }
        Command::Decompress { .. } => {
            let container = format::read_container(input)?;
            let s = universal::decompress(&container)?;
            let report = RunReport::new("decompress", container.n, cfg.budget(container.n), UsageReport::default());
            Ok((to_bytes(&s)?, report))
        }
        Command::EoCompress { sigma, .. } => {
            let s = symbols(input, *sigma)?;
            let budget = cfg.budget(n);
            let mut m = Machine::new(budget);
            let eo = entropy_only_compress(&mut m, &s, *sigma)?;
            let out = format::write_eo(&eo);
            let report = RunReport::new("eo-compress", n, budget, m.report())
                .detail("payload_bits", eo.payload.len())
                .detail("output_bits", 8 * out.len() as u64);
            Ok((out, report))
        }
        Command::EoDecompress { .. } => {
            let eo = format::read_eo(input)?;
            let budget = cfg.budget(eo.n);
            let mut m = Machine::new(budget);
            let s = entropy_only_decompress(&mut m, &eo)?;
            let report = RunReport::new("eo-decompress", eo.n, budget, m.report());
            Ok((to_bytes(&s)?, report))
        }
        Command::Bwt { .. } => {
            let s = symbols(input, 256)?;
            let budget = cfg.budget(n);
            let mut m = Machine::new(budget);
            let t = bwt_forward(&mut m, &s)?;
            let top = t.as_slice().iter().copied().max().unwrap_or(0);
            let snap = Snapshot {
                record_bits: (32 - top.leading_zeros()).max(1) as u8,
                records: t.as_slice().iter().map(|&x| u128::from(x)).collect(),
            };
            let report = RunReport::new("bwt", n, budget, m.report())
                .detail("sentinel_position", t.sentinel_position());
            Ok((format::write_snapshot(&snap), report))
        }
        Command::Unbwt { .. } => {
            let snap = format::read_snapshot(input)?;
            let image = snap
                .records
                .iter()
                .map(|&r| u32::try_from(r).map_err(|_| Error::Format(format!("record {r} is not a symbol"))))
                .collect::<Result<Vec<_>, _>>()?;
            let t = BwtString::new(image).map_err(|e| Error::Decode(e.to_string()))?;
            let len = t.len() as u64 - 1;
            let budget = cfg.budget(len);
            let mut m = Machine::new(budget);
            let s = bwt_inverse(&mut m, &t).map_err(|e| match e {
                Error::InvalidInput(msg) | Error::InvalidPermutation(msg) => Error::Decode(msg),
                e => e,
            })?;
            let report = RunReport::new("unbwt", len, budget, m.report());
            Ok((to_bytes(&s)?, report))
        }
        Command::Entropy { k, .. } => {
            let s = symbols(input, 256)?;
            if s.is_empty() {
                return Err(usage("entropy of an empty input"));
            }
            let orders: Vec<usize> = (0..=*k).take_while(|&k| k < s.len()).collect();
            let e = EntropyReport::new(&s, &orders)?;
            let mut out = String::from("k\tH_k\tH_k*_total\n");
            for row in &e.per_order {
                writeln!(out, "{}\t{:.6}\t{:.3}", row.k, row.hk, row.hk_star_total).unwrap();
            }
            let report = RunReport::new("entropy", n, cfg.budget(n), UsageReport::default())
                .detail("distinct_symbols", e.sigma);
            Ok((out.into_bytes(), report))
        }
        Command::Period { .. } => {
            let s = symbols(input, 256)?;
            let budget = cfg.budget(n);
            let mut m = Machine::new(budget);
            let l = min_period_streams(&mut m, &s)?;
            let report = RunReport::new("period", n, budget, m.report()).detail("period", l);
            Ok((format!("{l}\n").into_bytes(), report))
        }
        Command::Grammar { expand, sigma, .. } => {
            if *expand {
                let text = std::str::from_utf8(input).map_err(|e| Error::Format(e.to_string()))?;
                let g = parse_grammar(text, *sigma)?;
                let s = g.expand()?;
                let report = RunReport::new("grammar", s.len() as u64, cfg.budget(s.len() as u64), UsageReport::default())
                    .detail("size_bits", g.size_bits());
                return Ok((to_bytes(&s)?, report));
            }
            let s = symbols(input, *sigma)?;
            let budget = cfg.budget(n);
            let mut m = Machine::new(budget);
            let l = min_period_streams(&mut m, &s)?;
            let g = build_periodic_grammar(&s, l, *sigma)?;
            let report = RunReport::new("grammar", n, budget, m.report())
                .detail("period", l)
                .detail("size_bits", g.size_bits());
            Ok((g.to_string().into_bytes(), report))
        }
        Command::Debruijn {
            sigma,
            k,
            repeat_to,
            count,
            ..
        } => {
            let report = RunReport::new("debruijn", 0, cfg.budget(0), UsageReport::default());
            if *count {
                return Ok((format!("{}\n", count_cycles(*sigma, *k)?).into_bytes(), report));
            }
            let len = match repeat_to {
                Some(n) => *n,
                None => (*sigma as usize)
                    .checked_pow(*k)
                    .ok_or_else(|| Error::Size(format!("{sigma}^{k} symbols")))?,
            };
            let s = adversarial_string(*sigma, *k, len)?;
            let out = if *sigma <= 36 {
                s.iter().map(|&x| char::from_digit(x, 36).unwrap() as u8).collect()
            } else {
                to_bytes(&s)?
            };
            Ok((out, report.detail("length", len)))
        }
        Command::Sortnums { .. } => {
            let text = std::str::from_utf8(input).map_err(|e| Error::Format(e.to_string()))?;
            let values = text
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| usage(format!("{t:?} is not a non-negative integer"))))
                .collect::<CliResult<Vec<_>>>()?;
            let count = values.len();
            if count == 0 {
                return Ok((Vec::new(), RunReport::new("sortnums", 0, cfg.budget(0), UsageReport::default())));
            }
            let inst = SortInstance::padded(values)?;
            let budget = cfg.budget(inst.encoded_len());
            let mut m = Machine::new(budget);
            let sorted = sort_via_bwt(&mut m, &inst)?;
            let mut out = String::new();
            for v in sorted {
                writeln!(out, "{v}").unwrap();
            }
            let report = RunReport::new("sortnums", count as u64, budget, m.report())
                .detail("encoded_length", inst.encoded_len());
            Ok((out.into_bytes(), report))
        }
    }
}
