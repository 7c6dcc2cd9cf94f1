use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use sdeqr_core::cipher::password_bytes;
use sdeqr_core::pipeline::DEFAULT_LIMIT;
use sdeqr_core::{
    decode_symbol, decrypt_from_symbols, encode_symbol, encrypt_to_symbols, CipherError, DecodeError, EcLevel,
    EncodeError, Manifest, MaskId, MaskPolicy, ModuleMatrix, Options, PipelineError, QrVersion, Serialization,
    VersionPolicy,
};
use thiserror::Error;

use crate::render::{parse_matrix, render, ParseError, RenderFormat};

const MANIFEST_NAME: &str = "manifest.json";
const SAMPLE_MESSAGE: &str = "I love you ÿþý";
const SAMPLE_PASSWORD: &str = "Hello World";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {source}", path.display())]
    Decode { path: PathBuf, source: DecodeError },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// 2 for problems with the invocation itself, 1 for bad data.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { source: ParseError::Unsupported(_), .. } => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Parser)]
#[command(name = "sdeqr", version, about = "Password-keyed text cipher carried in QR Code symbols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a message and write it as one or more QR symbols plus a manifest.
    Encrypt(EncryptArgs),
    /// Read QR symbols, check them against the manifest and decrypt.
    Decrypt(DecryptArgs),
    /// Encode a payload as a single QR symbol, without the cipher.
    Encode(EncodeArgs),
    /// Decode a single QR symbol to its raw payload, without the cipher.
    Decode(DecodeArgs),
    /// Report version, EC level, mask and payload length of symbols.
    Inspect(InspectArgs),
    /// Encrypt, render, parse and decrypt in memory and compare.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SerializationArg {
    Entity,
    Raw16,
}

impl From<SerializationArg> for Serialization {
    fn from(s: SerializationArg) -> Self {
        match s {
            SerializationArg::Entity => Serialization::Entity,
            SerializationArg::Raw16 => Serialization::Raw16,
        }
    }
}

fn parse_ec(s: &str) -> Result<EcLevel, String> {
    s.parse().map_err(|e: EncodeError| e.to_string())
}

fn parse_mask(s: &str) -> Result<MaskPolicy, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(MaskPolicy::Auto);
    }
    let n: u32 = s.parse().map_err(|_| format!("expected auto or 0-7, got {s:?}"))?;
    MaskId::new(n).map(MaskPolicy::Force).map_err(|e| e.to_string())
}

fn parse_version(s: &str) -> Result<VersionPolicy, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(VersionPolicy::Auto);
    }
    let n: u32 = s.parse().map_err(|_| format!("expected auto or 1-40, got {s:?}"))?;
    QrVersion::new(n).map(VersionPolicy::Force).map_err(|e| e.to_string())
}

fn parse_limit(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive byte count, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct PasswordArgs {
    /// Read the password from this environment variable instead of prompting.
    #[arg(long, value_name = "VAR")]
    pub password_env: Option<String>,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    /// Error correction level: L, M, Q or H.
    #[arg(long, default_value = "H", value_parser = parse_ec)]
    pub ec: EcLevel,
    /// Mask pattern: auto or 0-7.
    #[arg(long, default_value = "auto", value_parser = parse_mask)]
    pub mask: MaskPolicy,
    /// Symbol version: auto or 1-40.
    #[arg(long, default_value = "auto", value_parser = parse_version)]
    pub version: VersionPolicy,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Output format; taken from the --out extension when omitted, else PBM.
    #[arg(long, value_enum)]
    pub format: Option<RenderFormat>,
    /// Light modules around each rendered symbol (PBM, TXT, SVG).
    #[arg(long, default_value_t = 4)]
    pub quiet_zone: usize,
}

impl RenderArgs {
    fn format_for(&self, out: Option<&Path>) -> RenderFormat {
        self.format.or_else(|| out.and_then(RenderFormat::from_path)).unwrap_or(RenderFormat::Pbm)
    }
}

#[derive(Debug, Args)]
pub struct ReadArgs {
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<RenderFormat>,
    /// Quiet-zone width to strip from PBM and TXT input.
    #[arg(long, default_value_t = 4)]
    pub quiet_zone: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("dest").required(true).args(["out_dir", "out", "stdout"])))]
pub struct EncryptArgs {
    #[command(flatten)]
    pub password: PasswordArgs,
    /// Message file (UTF-8); standard input when omitted or "-".
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Directory for symbol-NNN files and manifest.json.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Single output file; fails if the message needs more than one symbol.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the single rendered symbol to standard output.
    #[arg(long)]
    pub stdout: bool,
    #[command(flatten)]
    pub render: RenderArgs,
    #[command(flatten)]
    pub symbol: SymbolArgs,
    /// Ciphertext serialization carried in the symbols.
    #[arg(long, value_enum, default_value = "entity")]
    pub serialization: SerializationArg,
    /// Largest number of ciphertext bytes per symbol.
    #[arg(long, default_value_t = DEFAULT_LIMIT, value_parser = parse_limit)]
    pub limit: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("dest").required(true).args(["out", "stdout"])))]
pub struct DecryptArgs {
    #[command(flatten)]
    pub password: PasswordArgs,
    /// Symbol files, or a directory holding symbol-NNN files and manifest.json.
    #[arg(long = "in", value_name = "PATH", required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Manifest to check against; found automatically in an input directory.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// File to receive the plaintext; written only if decryption succeeds.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Print the plaintext on standard output.
    #[arg(long)]
    pub stdout: bool,
    #[command(flatten)]
    pub read: ReadArgs,
    /// Serialization to assume when there is no manifest.
    #[arg(long, value_enum, default_value = "entity")]
    pub serialization: SerializationArg,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("dest").required(true).args(["out", "stdout"])))]
pub struct EncodeArgs {
    /// Payload file; standard input when omitted or "-".
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub stdout: bool,
    #[command(flatten)]
    pub render: RenderArgs,
    #[command(flatten)]
    pub symbol: SymbolArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("dest").required(true).args(["out", "stdout"])))]
pub struct DecodeArgs {
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub stdout: bool,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Password source; the built-in sample password is used without --in.
    #[command(flatten)]
    pub password: PasswordArgs,
    /// Message file; a built-in sample message when omitted.
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub symbol: SymbolArgs,
    #[arg(long, value_enum, default_value = "entity")]
    pub serialization: SerializationArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT, value_parser = parse_limit)]
    pub limit: usize,
    #[arg(long, default_value_t = 4)]
    pub quiet_zone: usize,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Encrypt(args) => encrypt(args, stdout),
        Command::Decrypt(args) => decrypt(args, stdout),
        Command::Encode(args) => encode(args, stdout),
        Command::Decode(args) => decode(args, stdout),
        Command::Inspect(args) => inspect(args, stdout),
        Command::Roundtrip(args) => roundtrip(args, stdout),
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::read(p).map_err(io_err(p)),
        _ => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).map_err(io_err(Path::new("<stdin>")))?;
            Ok(buf)
        }
    }
}

fn read_message(path: Option<&Path>) -> Result<String, CliError> {
    String::from_utf8(read_input(path)?).map_err(|_| CliError::Data("message is not valid UTF-8".into()))
}

fn read_password(args: &PasswordArgs) -> Result<Vec<u8>, CliError> {
    let text = match &args.password_env {
        Some(var) => std::env::var(var)
            .map_err(|_| CliError::Usage(format!("environment variable {var} is not set or not valid UTF-8")))?,
        None => rpassword::prompt_password("Password: ").map_err(io_err(Path::new("<terminal>")))?,
    };
    Ok(password_bytes(&text)?)
}

/// Writes through a sibling temporary file so a failed run never leaves a
/// truncated output behind.
fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

fn symbol_name(index: usize, format: RenderFormat) -> String {
    format!("symbol-{:03}.{}", index + 1, format.extension())
}

fn encrypt(args: EncryptArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let message = read_message(args.input.as_deref())?;
    let password = read_password(&args.password)?;
    let options = Options {
        ec: args.symbol.ec,
        serialization: args.serialization.into(),
        mask: args.symbol.mask,
        version: args.symbol.version,
        limit: args.limit,
    };
    let set = encrypt_to_symbols(&message, &password, &options)?;
    let format = args.render.format_for(args.out.as_deref());
    let rendered: Vec<Vec<u8>> = set.symbols.iter().map(|m| render(m, format, args.render.quiet_zone)).collect();

    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (i, bytes) in rendered.iter().enumerate() {
            write_file(&dir.join(symbol_name(i, format)), bytes)?;
        }
        write_file(&dir.join(MANIFEST_NAME), format!("{}\n", set.manifest.to_json()).as_bytes())?;
        eprintln!("wrote {} symbol(s) and {MANIFEST_NAME} to {}", rendered.len(), dir.display());
        return Ok(());
    }
    if rendered.len() > 1 {
        return Err(CliError::Data(format!("ciphertext needs {} symbols; use --out-dir", rendered.len())));
    }
    match &args.out {
        Some(path) => write_file(path, &rendered[0]),
        None => stdout.write_all(&rendered[0]).map_err(io_err(Path::new("<stdout>"))),
    }
}

/// Symbol files in a directory, in name order. With a manifest only the
/// first `total` numbered symbols are taken.
fn scan_dir(dir: &Path, format: Option<RenderFormat>, total: Option<usize>) -> Result<Vec<PathBuf>, CliError> {
    let mut found: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("symbol-")))
        .filter(|p| match format {
            Some(f) => RenderFormat::from_path(p) == Some(f),
            None => RenderFormat::from_path(p).is_some_and(|f| f != RenderFormat::Svg),
        })
        .collect();
    found.sort();
    let mut formats: Vec<_> = found.iter().filter_map(|p| RenderFormat::from_path(p)).collect();
    formats.dedup();
    if formats.len() > 1 {
        return Err(CliError::Usage(format!(
            "{} holds symbols in several formats; pick one with --format",
            dir.display()
        )));
    }
    if found.is_empty() {
        return Err(CliError::Data(format!("no symbol files in {}", dir.display())));
    }
    if let (Some(total), Some(f)) = (total, formats.first()) {
        found = (0..total).map(|i| dir.join(symbol_name(i, *f))).collect();
    }
    Ok(found)
}

fn load_matrix(path: &Path, read: &ReadArgs) -> Result<ModuleMatrix, CliError> {
    let format = read
        .format
        .or_else(|| RenderFormat::from_path(path))
        .ok_or_else(|| CliError::Usage(format!("cannot tell the format of {}; pass --format", path.display())))?;
    let data = fs::read(path).map_err(io_err(path))?;
    parse_matrix(&data, format, read.quiet_zone).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn load_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Manifest::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn decrypt(args: DecryptArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dirs: Vec<&PathBuf> = args.input.iter().filter(|p| p.is_dir()).collect();
    if !dirs.is_empty() && args.input.len() > 1 {
        return Err(CliError::Usage("pass either one directory or a list of symbol files".into()));
    }
    let manifest_path = args.manifest.clone().or_else(|| {
        let candidate = dirs.first()?.join(MANIFEST_NAME);
        candidate.is_file().then_some(candidate)
    });
    let manifest = manifest_path.as_deref().map(load_manifest).transpose()?;
    let paths = match dirs.first() {
        Some(dir) => scan_dir(dir, args.read.format, manifest.as_ref().map(|m| m.total))?,
        None => args.input.clone(),
    };
    let matrices = paths.iter().map(|p| load_matrix(p, &args.read)).collect::<Result<Vec<_>, _>>()?;
    let password = read_password(&args.password)?;
    let plaintext = decrypt_from_symbols(&matrices, manifest.as_ref(), &password, args.serialization.into())?;

    match &args.out {
        Some(path) => write_file(path, plaintext.as_bytes()),
        None => stdout.write_all(plaintext.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn encode(args: EncodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let payload = read_input(args.input.as_deref())?;
    let sym = encode_symbol(&payload, args.symbol.ec, args.symbol.mask, args.symbol.version)?;
    let format = args.render.format_for(args.out.as_deref());
    let bytes = render(&sym.matrix, format, args.render.quiet_zone);
    eprintln!("version {}, ec {}, mask {}", sym.version, sym.ec, sym.mask);
    match &args.out {
        Some(path) => write_file(path, &bytes),
        None => stdout.write_all(&bytes).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn decode_file(path: &Path, read: &ReadArgs) -> Result<sdeqr_core::DecodedSymbol, CliError> {
    let matrix = load_matrix(path, read)?;
    decode_symbol(&matrix).map_err(|source| CliError::Decode { path: path.to_path_buf(), source })
}

fn decode(args: DecodeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let decoded = decode_file(&args.input, &args.read)?;
    match &args.out {
        Some(path) => write_file(path, &decoded.payload),
        None => stdout.write_all(&decoded.payload).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn inspect(args: InspectArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    for path in &args.files {
        let d = decode_file(path, &args.read)?;
        writeln!(
            stdout,
            "{}: version {}, ec {}, mask {}, errors corrected {}, payload {} bytes",
            path.display(),
            d.version,
            d.ec,
            d.mask,
            d.errors_corrected,
            d.payload.len()
        )
        .map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}

fn roundtrip(args: RoundtripArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (message, password) = match &args.input {
        Some(path) => (read_message(Some(path))?, read_password(&args.password)?),
        None if args.password.password_env.is_some() => (SAMPLE_MESSAGE.to_string(), read_password(&args.password)?),
        None => (SAMPLE_MESSAGE.to_string(), password_bytes(SAMPLE_PASSWORD)?),
    };
    let serialization: Serialization = args.serialization.into();
    let options = Options {
        ec: args.symbol.ec,
        serialization,
        mask: args.symbol.mask,
        version: args.symbol.version,
        limit: args.limit,
    };
    let set = encrypt_to_symbols(&message, &password, &options)?;
    let formats = [RenderFormat::Pbm, RenderFormat::Txt, RenderFormat::Json];
    for format in formats {
        let mut parsed = Vec::with_capacity(set.symbols.len());
        for (i, m) in set.symbols.iter().enumerate() {
            let bytes = render(m, format, args.quiet_zone);
            if bytes != render(m, format, args.quiet_zone) {
                return Err(CliError::Data(format!("{format:?} rendering is not deterministic")));
            }
            let back = parse_matrix(&bytes, format, args.quiet_zone)
                .map_err(|source| CliError::Parse { path: symbol_name(i, format).into(), source })?;
            parsed.push(back);
        }
        let manifest = Manifest::from_json(&set.manifest.to_json())?;
        let back = decrypt_from_symbols(&parsed, Some(&manifest), &password, serialization)?;
        if back != message {
            return Err(CliError::Data(format!("{format:?} round trip did not reproduce the message")));
        }
    }
    let versions: Vec<String> = set.symbols.iter().map(|m| m.version().map_or("?".into(), |v| v.to_string())).collect();
    writeln!(
        stdout,
        "roundtrip ok: {} symbol(s) (versions {}), {} ciphertext bytes, formats pbm txt json",
        set.symbols.len(),
        versions.join(", "),
        set.manifest.chunk_lengths.iter().sum::<usize>()
    )
    .map_err(io_err(Path::new("<stdout>")))
}
