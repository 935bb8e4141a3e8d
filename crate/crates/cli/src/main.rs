use std::ffi::{OsStr, OsString};
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use case_stego::analysis::{compare_histograms, histogram, verify_invariance, Channel};
use case_stego::bitcodec::{bits_to_bytes, bytes_to_bits};
use case_stego::caseless::{self, LanguageProfile, Strategy};
use case_stego::html::{self, LengthMode};
use case_stego::{ident, BitVector, XorKey};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "case-stego",
    version,
    about = "Hide bits in the letter case of HTML and source code"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a payload in a cover document.
    Embed(Common),
    /// Recover the payload from a stego document.
    Extract(Common),
    /// Print the number of payload bits the cover can carry.
    Capacity(Common),
    /// Print a cover/stego byte histogram comparison.
    Analyze(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    Html,
    Caseless,
    Ident,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Inband,
    HeaderTag,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    All,
    FirstChar,
    Keywords,
    Identifiers,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    channel: ChannelArg,
    /// Input document (stdin when omitted).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Payload file.
    #[arg(long, value_name = "FILE", conflicts_with = "payload_text")]
    payload: Option<PathBuf>,
    /// Payload given inline; its raw bytes are embedded.
    #[arg(long, value_name = "TEXT")]
    payload_text: Option<OsString>,
    /// Length transport for the html channel.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Carrier selection for the caseless channel.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Language profile for the caseless channel: `pascal`, `basic` or a file.
    #[arg(long, value_name = "NAME|FILE")]
    profile: Option<String>,
    /// XOR key as hex bytes.
    #[arg(long, value_name = "HEX")]
    key: Option<String>,
    /// Existing stego document to compare against (analyze only).
    #[arg(long, value_name = "FILE")]
    stego: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Op(String, String),
}

impl From<case_stego::Error> for Failure {
    fn from(e: case_stego::Error) -> Self {
        Failure::Op(e.code().to_string(), e.to_string())
    }
}

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    let what = path.map_or_else(
        || "standard stream".to_string(),
        |p| p.display().to_string(),
    );
    Failure::Op("E_IO".into(), format!("{what}: {e}"))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Embed,
    Extract,
    Capacity,
    Analyze,
}

enum Selected {
    Html(LengthMode),
    Caseless(Box<LanguageProfile>, Strategy),
    Ident,
}

/// Options checked before touching any file.
struct Plan {
    op: Op,
    key: Option<XorKey>,
}

fn plan(op: Op, args: &Common) -> Result<Plan, Failure> {
    let usage = |m: &str| Err(Failure::Usage(m.to_string()));
    if args.mode.is_some() && args.channel != ChannelArg::Html {
        return usage("--mode applies only to --channel html");
    }
    if args.channel != ChannelArg::Caseless {
        if args.strategy.is_some() {
            return usage("--strategy applies only to --channel caseless");
        }
        if args.profile.is_some() {
            return usage("--profile applies only to --channel caseless");
        }
    }
    let has_payload = args.payload.is_some() || args.payload_text.is_some();
    match op {
        Op::Embed if !has_payload => return usage("embed needs --payload or --payload-text"),
        Op::Extract | Op::Capacity if has_payload => {
            return usage("--payload and --payload-text apply only to embed and analyze")
        }
        Op::Analyze if args.stego.is_none() && !has_payload => {
            return usage("analyze needs --stego or a payload to embed")
        }
        Op::Analyze if args.stego.is_some() && has_payload => {
            return usage("analyze takes either --stego or a payload, not both")
        }
        _ => {}
    }
    if args.stego.is_some() && op != Op::Analyze {
        return usage("--stego applies only to analyze");
    }
    if args.key.is_some() && op == Op::Capacity {
        return usage("--key does not apply to capacity");
    }
    let key = match &args.key {
        None => None,
        Some(text) => {
            let bytes = hex::decode(text.trim())
                .map_err(|e| Failure::Usage(format!("--key is not valid hex: {e}")))?;
            Some(XorKey::new(bytes)?)
        }
    };
    Ok(Plan { op, key })
}

fn select(args: &Common) -> Result<Selected, Failure> {
    Ok(match args.channel {
        ChannelArg::Html => Selected::Html(match args.mode {
            Some(ModeArg::HeaderTag) => LengthMode::HeaderTag,
            Some(ModeArg::Inband) | None => LengthMode::InBand,
        }),
        ChannelArg::Ident => Selected::Ident,
        ChannelArg::Caseless => {
            let name = args.profile.as_deref().unwrap_or("pascal");
            let profile = match LanguageProfile::builtin(name) {
                Some(p) => p,
                None => {
                    let path = Path::new(name);
                    let text = fs::read_to_string(path).map_err(|e| io_failure(Some(path), e))?;
                    LanguageProfile::parse(&text)?
                }
            };
            let strategy = match args.strategy.unwrap_or(StrategyArg::All) {
                StrategyArg::All => Strategy::All,
                StrategyArg::FirstChar => Strategy::FirstChar,
                StrategyArg::Keywords => Strategy::KeywordsOnly,
                StrategyArg::Identifiers => Strategy::IdentifiersOnly,
            };
            Selected::Caseless(Box::new(profile), strategy)
        }
    })
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Failure> {
    match path {
        Some(p) => fs::read(p).map_err(|e| io_failure(Some(p), e)),
        None => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| io_failure(None, e))?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, data: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, data).map_err(|e| io_failure(Some(p), e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data)
                .and_then(|_| out.flush())
                .map_err(|e| io_failure(None, e))
        }
    }
}

#[cfg(unix)]
fn os_bytes(text: &OsStr) -> Vec<u8> {
    use std::os::unix::ffi::OsStrExt;
    text.as_bytes().to_vec()
}

#[cfg(not(unix))]
fn os_bytes(text: &OsStr) -> Vec<u8> {
    text.to_string_lossy().into_owned().into_bytes()
}

fn payload(args: &Common) -> Result<BitVector, Failure> {
    let bytes = match (&args.payload, &args.payload_text) {
        (Some(p), _) => fs::read(p).map_err(|e| io_failure(Some(p), e))?,
        (None, Some(text)) => os_bytes(text),
        (None, None) => Vec::new(),
    };
    Ok(bytes_to_bits(&bytes))
}

fn capacity(doc: &[u8], sel: &Selected) -> case_stego::Result<usize> {
    match sel {
        Selected::Html(mode) => html::capacity(doc, *mode),
        Selected::Caseless(profile, strategy) => caseless::capacity(doc, profile, *strategy),
        Selected::Ident => ident::capacity(doc),
    }
}

fn embed(
    doc: &[u8],
    bits: &BitVector,
    sel: &Selected,
    key: Option<&XorKey>,
) -> case_stego::Result<Vec<u8>> {
    match sel {
        Selected::Html(mode) => html::embed(doc, bits, *mode, key),
        Selected::Caseless(profile, strategy) => {
            caseless::embed(doc, bits, profile, *strategy, key)
        }
        Selected::Ident => ident::embed(doc, bits, key),
    }
}

fn extract(doc: &[u8], sel: &Selected, key: Option<&XorKey>) -> case_stego::Result<Vec<u8>> {
    let bits = match sel {
        Selected::Html(mode) => html::extract_bits(doc, *mode, key)?,
        Selected::Caseless(profile, strategy) => {
            caseless::extract_bits(doc, profile, *strategy, key)?
        }
        Selected::Ident => ident::extract_bits(doc, key)?,
    };
    bits_to_bytes(&bits)
}

fn run(op: Op, args: Common) -> Result<(), Failure> {
    let plan = plan(op, &args)?;
    let sel = select(&args)?;
    let key = plan.key.as_ref();
    let input = read_input(args.input.as_deref())?;
    match plan.op {
        Op::Capacity => {
            let n = capacity(&input, &sel)?;
            write_output(args.out.as_deref(), format!("{n}\n").as_bytes())
        }
        Op::Embed => {
            let bits = payload(&args)?;
            let available = capacity(&input, &sel)?;
            let stego = embed(&input, &bits, &sel, key)?;
            write_output(args.out.as_deref(), &stego)?;
            eprintln!("embedded {} of {} bits", bits.len(), available);
            Ok(())
        }
        Op::Extract => {
            let bytes = extract(&input, &sel, key)?;
            write_output(args.out.as_deref(), &bytes)
        }
        Op::Analyze => {
            let stego = match &args.stego {
                Some(p) => fs::read(p).map_err(|e| io_failure(Some(p), e))?,
                None => embed(&input, &payload(&args)?, &sel, key)?,
            };
            let report = compare_histograms(&histogram(&input), &histogram(&stego));
            let channel = match &sel {
                Selected::Html(mode) => Channel::Html(*mode),
                Selected::Caseless(profile, strategy) => Channel::Caseless {
                    profile,
                    strategy: *strategy,
                },
                Selected::Ident => Channel::Ident,
            };
            let invariance = verify_invariance(&input, &stego, channel);
            let mut text = report.to_string();
            if invariance.holds {
                text.push_str("# invariance=holds\n");
            } else {
                text.push_str(&format!("# invariance=broken {}\n", invariance.detail));
            }
            write_output(args.out.as_deref(), text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (op, args) = match cli.command {
        Command::Embed(a) => (Op::Embed, a),
        Command::Extract(a) => (Op::Extract, a),
        Command::Capacity(a) => (Op::Capacity, a),
        Command::Analyze(a) => (Op::Analyze, a),
    };
    match run(op, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Op(code, msg)) => {
            eprintln!("error: {code}: {msg}");
            ExitCode::from(1)
        }
    }
}
