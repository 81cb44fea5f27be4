use std::path::PathBuf;

use num_rational::BigRational;
use vie_core::coeff::{parse_rational, Backend, MIN_DIGITS};
use vie_core::expr::{parse_document, parse_expr, split_kernel, Equation, Expr, Header};

use crate::error::CliError;

pub const DEFAULT_ORDER: usize = 10;
pub const DEFAULT_PRECISION: u32 = 64;
pub const DEFAULT_ORACLE_PRECISION: u32 = 32;
pub const DEFAULT_SAMPLES: usize = 11;
pub const DEFAULT_PLACES: usize = 5;
/// Comparison windows must lie within `[a, a + HORIZON]`.
pub const HORIZON: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BackendChoice {
    Rational,
    Float,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Path to a `.vie` file.
    pub input: Option<PathBuf>,
    /// Inline equation instead of a file, e.g. "y(t) = 1 + int(y(s), s=0..t)".
    #[arg(long, short = 'e', conflicts_with = "input")]
    pub equation: Option<String>,
    /// Truncation order N.
    #[arg(long)]
    pub order: Option<usize>,
    /// Number of Picard steps; without it the solver runs until stable.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Decimal digits for the float backend and numeric evaluation.
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Decimal places for rounded coefficients.
    #[arg(long, default_value_t = DEFAULT_PLACES)]
    pub places: usize,
    /// Include wall time in JSON solve output.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CompareArgs {
    /// Closed-form reference in t; defaults to the file's `reference:` header.
    #[arg(long)]
    pub reference: Option<String>,
    /// Comparison window `lo..hi`.
    #[arg(long, default_value = "0..1")]
    pub window: String,
    /// Number of evenly spaced sample points.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Also compare against the trapezoid solver with this step.
    #[arg(long)]
    pub oracle_h: Option<String>,
}

#[derive(Debug, Clone)]
pub enum Input {
    Path(PathBuf),
    Inline(String),
}

/// Fully resolved settings for one run: flags override the file header,
/// which overrides the defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Input,
    pub order: usize,
    pub iters: Option<usize>,
    pub precision: u32,
    pub backend: Option<Backend>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub places: usize,
    pub timing: bool,
    pub header: Header,
}

pub struct Loaded {
    pub config: RunConfig,
    pub equation: Equation,
}

impl Input {
    fn read(&self) -> Result<String, CliError> {
        match self {
            Input::Path(p) => {
                std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))
            }
            Input::Inline(text) => Ok(text.clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Input::Path(p) => p.display().to_string(),
            Input::Inline(_) => "inline".to_string(),
        }
    }

    fn default_label(&self) -> String {
        match self {
            Input::Path(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "equation".into()),
            Input::Inline(_) => "equation".into(),
        }
    }
}

impl RunConfig {
    /// Reads and parses the input, then resolves every setting.
    pub fn load(common: &Common) -> Result<Loaded, CliError> {
        let input = match (&common.input, &common.equation) {
            (Some(p), _) => Input::Path(p.clone()),
            (None, Some(e)) => Input::Inline(e.clone()),
            (None, None) => return Err(CliError::Usage("give a .vie file or --equation".into())),
        };
        let text = input.read()?;
        let doc = parse_document(&text)?;
        let mut equation = split_kernel(&doc.rhs)?;
        equation.label = doc.header.label.clone().unwrap_or_else(|| input.default_label());
        let header = doc.header;

        let precision = common.precision.or(header.precision).unwrap_or(DEFAULT_PRECISION);
        let backend_name = match common.backend {
            Some(BackendChoice::Rational) => Some("rational".to_string()),
            Some(BackendChoice::Float) => Some("float".to_string()),
            None => header.backend.clone(),
        };
        let backend = match backend_name.as_deref() {
            None => None,
            Some("rational") => Some(Backend::Rational),
            Some("float") => Some(
                Backend::float(precision)
                    .map_err(|_| CliError::Usage(format!("precision must be at least {MIN_DIGITS} digits")))?,
            ),
            Some(other) => return Err(CliError::Usage(format!("unknown backend `{other}`"))),
        };
        if precision < MIN_DIGITS {
            return Err(CliError::Usage(format!(
                "precision must be at least {MIN_DIGITS} digits"
            )));
        }
        let config = RunConfig {
            input,
            order: common.order.or(header.order).unwrap_or(DEFAULT_ORDER),
            iters: common.iters.or(header.iters),
            precision,
            backend,
            format: common.format,
            out: common.out.clone(),
            places: common.places,
            timing: common.timing,
            header,
        };
        if config.iters == Some(0) {
            return Err(CliError::Usage("--iters must be at least 1".into()));
        }
        Ok(Loaded { config, equation })
    }

    pub fn reference(&self, flag: &Option<String>) -> Result<Option<Expr>, CliError> {
        match flag.as_ref().or(self.header.reference.as_ref()) {
            None => Ok(None),
            Some(text) => Ok(Some(parse_expr(text)?)),
        }
    }
}

/// Parses `lo..hi` and checks it against `[a, a + HORIZON]`.
pub fn parse_window(text: &str, a: &BigRational) -> Result<(BigRational, BigRational), CliError> {
    let bad = || CliError::Usage(format!("window must look like `lo..hi`, got `{text}`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo = parse_rational(lo.trim()).map_err(|_| bad())?;
    let hi = parse_rational(hi.trim()).map_err(|_| bad())?;
    let end = a + BigRational::from_integer(HORIZON.into());
    if lo > hi || &lo < a || hi > end {
        return Err(CliError::Usage(format!(
            "window {text} must satisfy {} <= lo <= hi <= {}",
            a, end
        )));
    }
    Ok((lo, hi))
}

pub fn parse_step(text: &str) -> Result<BigRational, CliError> {
    parse_rational(text.trim()).map_err(|_| CliError::Usage(format!("bad --oracle-h `{text}`")))
}
